//! The 6x6 two-electron matrix with balanced gain/loss and its spectrum,
//! both numerically and in closed form.
//!
//! In the singlet/triplet product basis the two-electron block Hamiltonian
//! is sparse: two decoupled levels at `h2 = 2 eps + K - J` (labelled E1, E2),
//! one at `2 eps + K + J` reached by exchange (E3), and a cubic trio
//! (E4, E5, E6) mixing the ionic and covalent singlets through `t + V` and
//! the gain/loss `i gamma`. The trio's characteristic cubic reduces to
//! `y^3 - (beta/3) y + 2 c0 / 27 = 0` with `y = E - d1/3`; its discriminant
//! combination `disc = c0^2 - beta^3` changes sign exactly where two trio
//! members collide and leave the real axis, which is the PT-symmetry
//! breaking point. E4 stays real for every gamma and is the ground state at
//! physical parameters.
//!
//! Branch conventions, fixed so that the closed form and the numeric path
//! agree componentwise: for `disc < 0` (unbroken) the principal complex
//! cube root is used and the trio sorts ascending as [E4, E6, E5]; for
//! `disc >= 0` (broken) the REAL-signed cube root keeps E4 real, making
//! Im(E5) < 0 and Im(E6) > 0 always.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::eigenvalues6;
use crate::error::Result;
use crate::geometry::GainLossCoupling;
use crate::integrals::HubbardParams;

type C = Complex64;

/// Threshold on |Im E| below which an energy counts as real; this defines
/// the PT classification.
pub const PT_IM_THRESHOLD: f64 = 1e-9;

/// Spectrum of the six two-electron levels, ordered by the closed-form
/// labels E1..E6.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DimerSpectrum {
    /// E1..E6; E1 = E2 exactly, E3 = E1 + 2J, E4 real ground of the trio.
    pub energies: [Complex64; 6],
    /// True when any energy carries |Im| above `PT_IM_THRESHOLD`.
    pub pt_broken: bool,
    /// Index into `energies` of the lowest real eigenvalue.
    pub ground_index: usize,
}

/// Builds the 6x6 matrix; gamma may be negative here (symmetry tests).
pub(crate) fn build_matrix_signed(p: &HubbardParams, gamma: f64) -> [[C; 6]; 6] {
    let z = C::new(0.0, 0.0);
    let tv = C::new(p.t + p.v, 0.0);
    let j = C::new(p.j, 0.0);
    let h2 = C::new(2.0 * p.eps + p.k - p.j, 0.0);
    let diag_k = C::new(2.0 * p.eps + p.k, 0.0);
    let h1p = C::new(2.0 * p.eps + p.u, 2.0 * gamma);
    let h1m = C::new(2.0 * p.eps + p.u, -2.0 * gamma);
    [
        [h1p, z, tv, z, j, tv],
        [z, h2, z, z, z, z],
        [tv, z, diag_k, z, tv, -j],
        [z, z, z, h2, z, z],
        [j, z, tv, z, h1m, tv],
        [tv, z, -j, z, tv, diag_k],
    ]
}

/// The 6x6 two-electron matrix at coupling `g`.
///
/// # Arguments
/// * `p` - model parameters
/// * `g` - gain/loss strength
pub fn build_matrix(p: &HubbardParams, g: GainLossCoupling) -> [[C; 6]; 6] {
    build_matrix_signed(p, g.value())
}

/// Cubic-trio coefficients: (d1, beta, c0, disc).
fn cubic_invariants(p: &HubbardParams, gamma: f64) -> (f64, f64, f64, f64) {
    let (k, u, j) = (p.k, p.u, p.j);
    let tv = p.t + p.v;
    let tv2 = tv * tv;
    let g2 = gamma * gamma;
    let ku = k - u;
    let d1 = 6.0 * p.eps + 2.0 * u + k - j;
    let beta = 4.0 * j * j + ku * ku - 2.0 * j * ku + 12.0 * (tv2 - g2);
    let c0 = -8.0 * j * j * j + 6.0 * j * j * ku + 3.0 * j * (ku * ku + 12.0 * (g2 - tv2))
        - ku * (ku * ku + 18.0 * (tv2 + 2.0 * g2));
    let disc = c0 * c0 - beta * beta * beta;
    (d1, beta, c0, disc)
}

/// The printed discriminant combination A - B (equal to 4 disc).
///
/// # Arguments
/// * `p` - model parameters
/// * `g` - gain/loss strength
pub fn a_minus_b(p: &HubbardParams, g: GainLossCoupling) -> f64 {
    let gamma = g.value();
    let (k, u, j) = (p.k, p.u, p.j);
    let tv = p.t + p.v;
    let inner = (2.0 * j + k - u) * ((j - k + u) * (4.0 * j - k + u) + 18.0 * tv * tv)
        - 36.0 * (j - k + u) * gamma * gamma;
    let a = 4.0 * inner * inner;
    let bracket = 4.0 * j * j + (k - u) * (k - u) + 2.0 * j * (u - k)
        + 12.0 * (tv - gamma) * (tv + gamma);
    let b = 4.0 * bracket * bracket * bracket;
    a - b
}

/// Real-signed cube root.
fn signed_cbrt(x: f64) -> f64 {
    x.signum() * x.abs().cbrt()
}

/// Trio energies [E4, E5, E6] from the closed forms with the branch rules
/// described in the module docs. Returns None when the evaluation is
/// ill-conditioned (vanishing cube root or failed residual check), in which
/// case the caller falls back to the numeric path.
fn trio_closed(p: &HubbardParams, gamma: f64) -> Option<[C; 3]> {
    let (d1, beta, c0, disc) = cubic_invariants(p, gamma);
    let trio: [C; 3];
    if disc >= 0.0 {
        let cc = c0 + disc.sqrt();
        let u = signed_cbrt(cc);
        if u.abs() < 1e-150 {
            return None;
        }
        let bu = beta / u;
        let e4 = (d1 - bu - u) / 3.0;
        let re = d1 / 3.0 + (bu + u) / 6.0;
        let im = (3.0_f64.sqrt() / 6.0) * (bu - u);
        trio = [C::new(e4, 0.0), C::new(re, im), C::new(re, -im)];
    } else {
        let s = C::new(0.0, (-disc).sqrt());
        let u = (C::new(c0, 0.0) + s).powf(1.0 / 3.0);
        if u.norm() < 1e-150 {
            return None;
        }
        let bu = C::new(beta, 0.0) / u;
        let w_plus = C::new(1.0, 3.0_f64.sqrt());
        let w_minus = C::new(1.0, -3.0_f64.sqrt());
        let e4 = (C::new(d1, 0.0) - bu - u) / 3.0;
        let e5 = (w_plus * bu + w_minus * u) / 6.0 + d1 / 3.0;
        let e6 = (w_minus * bu + w_plus * u) / 6.0 + d1 / 3.0;
        // All three are mathematically real here; anything beyond rounding
        // noise means the branch logic broke down.
        let scale = e4.norm().max(e5.norm()).max(e6.norm()).max(1.0);
        if e4.im.abs() > 1e-10 * scale
            || e5.im.abs() > 1e-10 * scale
            || e6.im.abs() > 1e-10 * scale
        {
            return None;
        }
        trio = [
            C::new(e4.re, 0.0),
            C::new(e5.re, 0.0),
            C::new(e6.re, 0.0),
        ];
    }
    // Residual check against the depressed cubic y^3 - (beta/3) y + 2 c0/27.
    for e in trio {
        let y = e - d1 / 3.0;
        let r = y * y * y - y * (beta / 3.0) + C::new(2.0 * c0 / 27.0, 0.0);
        let scale = y.norm().powi(3) + (beta / 3.0).abs() * y.norm() + (2.0 * c0 / 27.0).abs();
        if r.norm() > 1e-9 * scale.max(1e-12) {
            return None;
        }
    }
    Some(trio)
}

/// Assembles a `DimerSpectrum` from the three exact levels and the trio.
fn assemble(p: &HubbardParams, trio: [C; 3]) -> DimerSpectrum {
    let h2 = 2.0 * p.eps + p.k - p.j;
    let e3 = 2.0 * p.eps + p.k + p.j;
    let energies = [
        C::new(h2, 0.0),
        C::new(h2, 0.0),
        C::new(e3, 0.0),
        trio[0],
        trio[1],
        trio[2],
    ];
    let pt_broken = energies.iter().any(|e| e.im.abs() > PT_IM_THRESHOLD);
    let mut ground_index = 0;
    let mut ground = f64::INFINITY;
    for (i, e) in energies.iter().enumerate() {
        if e.im.abs() <= PT_IM_THRESHOLD && e.re < ground {
            ground = e.re;
            ground_index = i;
        }
    }
    DimerSpectrum {
        energies,
        pt_broken,
        ground_index,
    }
}

/// Spectrum from the closed-form expressions; falls back to the numeric
/// path when the closed-form branch logic fails its residual check.
///
/// # Arguments
/// * `p` - model parameters
/// * `g` - gain/loss strength
pub fn spectrum_closed_form(p: &HubbardParams, g: GainLossCoupling) -> Result<DimerSpectrum> {
    match trio_closed(p, g.value()) {
        Some(trio) => Ok(assemble(p, trio)),
        None => spectrum_numeric(p, g),
    }
}

/// Spectrum by direct diagonalization of the built matrix, labelled to
/// match the closed-form ordering (E1/E2 at h2, E3 at h2 + 2J, trio sorted
/// ascending when unbroken, complex pair signed Im(E5) < 0 < Im(E6)).
///
/// # Arguments
/// * `p` - model parameters
/// * `g` - gain/loss strength
pub fn spectrum_numeric(p: &HubbardParams, g: GainLossCoupling) -> Result<DimerSpectrum> {
    let m = build_matrix(p, g);
    let raw = eigenvalues6(&m)?;
    let h2 = C::new(2.0 * p.eps + p.k - p.j, 0.0);
    let e3_ref = C::new(2.0 * p.eps + p.k + p.j, 0.0);

    // Pull out the two values nearest h2, then the one nearest h2 + 2J.
    let mut remaining: Vec<C> = raw.to_vec();
    let take_nearest = |target: C, pool: &mut Vec<C>| -> C {
        let (idx, _) = pool
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                (*a - target)
                    .norm()
                    .partial_cmp(&(*b - target).norm())
                    .unwrap()
            })
            .expect("pool never empty");
        pool.swap_remove(idx)
    };
    let e1a = take_nearest(h2, &mut remaining);
    let e1b = take_nearest(h2, &mut remaining);
    let e3 = take_nearest(e3_ref, &mut remaining);
    // The two decoupled levels are exactly equal by construction; store
    // their mean in both slots so the equality is exact in the output.
    let e12 = (e1a + e1b) * 0.5;

    let scale = raw.iter().map(|e| e.norm()).fold(1.0_f64, f64::max);
    let mut real_trio: Vec<C> = remaining
        .iter()
        .copied()
        .filter(|e| e.im.abs() <= PT_IM_THRESHOLD * scale.max(1.0))
        .collect();
    let trio: [C; 3] = if real_trio.len() == 3 {
        real_trio.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        // Ascending order is [E4, E6, E5] in the unbroken phase.
        [
            C::new(real_trio[0].re, 0.0),
            C::new(real_trio[2].re, 0.0),
            C::new(real_trio[1].re, 0.0),
        ]
    } else {
        // One real member (E4) plus a conjugate pair.
        let (ridx, _) = remaining
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.im.abs().partial_cmp(&b.im.abs()).unwrap())
            .unwrap();
        let e4 = remaining.swap_remove(ridx);
        let (c1, c2) = (remaining[0], remaining[1]);
        let (e5, e6) = if c1.im <= c2.im { (c1, c2) } else { (c2, c1) };
        [C::new(e4.re, 0.0), e5, e6]
    };
    Ok(assemble_numeric(p, e12, e3, trio))
}

/// Like `assemble` but keeps the numerically obtained E1/E2/E3 instead of
/// substituting closed-form values.
fn assemble_numeric(_p: &HubbardParams, e12: C, e3: C, trio: [C; 3]) -> DimerSpectrum {
    let energies = [
        C::new(e12.re, 0.0),
        C::new(e12.re, 0.0),
        C::new(e3.re, 0.0),
        trio[0],
        trio[1],
        trio[2],
    ];
    let pt_broken = energies.iter().any(|e| e.im.abs() > PT_IM_THRESHOLD);
    let mut ground_index = 0;
    let mut ground = f64::INFINITY;
    for (i, e) in energies.iter().enumerate() {
        if e.im.abs() <= PT_IM_THRESHOLD && e.re < ground {
            ground = e.re;
            ground_index = i;
        }
    }
    DimerSpectrum {
        energies,
        pt_broken,
        ground_index,
    }
}

/// True when the spectrum at `g` carries complex energies.
pub fn pt_phase(p: &HubbardParams, g: GainLossCoupling) -> Result<bool> {
    Ok(spectrum_closed_form(p, g)?.pt_broken)
}

/// Fast real-arithmetic ground energy E4 for optimizer inner loops.
/// Identical to `spectrum_closed_form(...).energies[3].re` up to rounding.
///
/// # Arguments
/// * `p` - model parameters
/// * `gamma` - gain/loss strength in Ry (non-negative)
pub fn ground_energy(p: &HubbardParams, gamma: f64) -> f64 {
    let (d1, beta, c0, disc) = cubic_invariants(p, gamma);
    if disc >= 0.0 {
        let u = signed_cbrt(c0 + disc.sqrt());
        (d1 - beta / u - u) / 3.0
    } else {
        // Trig form of the principal branch, all-real arithmetic.
        let sb = beta.sqrt();
        let theta = (c0 / (sb * sb * sb)).clamp(-1.0, 1.0).acos();
        (d1 - 2.0 * sb * (theta / 3.0).cos()) / 3.0
    }
}
