//! Second-quantized assembly of the two-electron Hamiltonian on the
//! four-mode Fock space, used as an independent cross-check of the printed
//! 6x6 matrix and to prepare correlated initial states for the dynamics.
//!
//! Modes are numbered 0 = site1 up, 1 = site1 down, 2 = site2 up,
//! 3 = site2 down. The two-particle basis is fixed by explicit creation
//! orders so that fermionic signs follow from operator algebra rather than
//! hand-set phases. The interaction carries the density-density pieces
//! (U on-site, K - J/2 inter-site), the transverse and Ising exchange, the
//! pair hop, and the density-assisted hop V; gain/loss enters as
//! +i gamma on site-1 occupations and -i gamma on site 2.

use num_complex::Complex64;

use crate::eigen::symmetric_eigen;
use crate::error::Result;
use crate::integrals::HubbardParams;

type C = Complex64;

/// One creation (true) or annihilation (false) operator on a mode.
type Op = (bool, u8);

/// Creation orders defining the six two-particle basis states.
const B_ORDERS: [[u8; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 3], [2, 3], [2, 1]];

/// Applies c^dag_m to (mask, sign); None when the mode is occupied.
fn cdag(state: Option<(u8, i32)>, m: u8) -> Option<(u8, i32)> {
    let (mask, s) = state?;
    if mask >> m & 1 == 1 {
        return None;
    }
    let parity = (mask & ((1 << m) - 1)).count_ones() & 1;
    Some((mask | (1 << m), s * (1 - 2 * parity as i32)))
}

/// Applies c_m to (mask, sign); None when the mode is empty.
fn cann(state: Option<(u8, i32)>, m: u8) -> Option<(u8, i32)> {
    let (mask, s) = state?;
    if mask >> m & 1 == 0 {
        return None;
    }
    let parity = (mask & ((1 << m) - 1)).count_ones() & 1;
    Some((mask & !(1 << m), s * (1 - 2 * parity as i32)))
}

/// Applies an operator string to a basis mask; rightmost operator first.
fn apply_ops(mask: u8, ops: &[Op]) -> Option<(u8, i32)> {
    let mut st = Some((mask, 1));
    for &(dag, m) in ops.iter().rev() {
        st = if dag { cdag(st, m) } else { cann(st, m) };
    }
    st
}

/// (mask, sign) for each basis state, built from its creation order.
fn basis_vectors() -> [(u8, i32); 6] {
    let mut out = [(0u8, 0i32); 6];
    for (i, order) in B_ORDERS.iter().enumerate() {
        let mut st = Some((0u8, 1i32));
        for &m in order.iter().rev() {
            st = cdag(st, m);
        }
        out[i] = st.expect("creation orders are valid");
    }
    out
}

/// mask -> (basis index, sign) lookup over the 16 masks.
fn mask_index(bv: &[(u8, i32); 6]) -> [Option<(usize, i32)>; 16] {
    let mut out = [None; 16];
    for (i, &(mask, sign)) in bv.iter().enumerate() {
        out[mask as usize] = Some((i, sign));
    }
    out
}

/// The Hamiltonian as a list of (coefficient, operator string) terms.
fn h_terms(p: &HubbardParams, gamma: f64) -> Vec<(C, Vec<Op>)> {
    let mut terms: Vec<(C, Vec<Op>)> = Vec::new();
    let re = |x: f64| C::new(x, 0.0);
    let n = |m: u8| vec![(true, m), (false, m)];
    let nn = |a: u8, b: u8| vec![(true, a), (false, a), (true, b), (false, b)];

    for m in 0..4u8 {
        terms.push((re(p.eps), n(m)));
    }
    for s in 0..2u8 {
        terms.push((re(p.t), vec![(true, s), (false, 2 + s)]));
        terms.push((re(p.t), vec![(true, 2 + s), (false, s)]));
    }
    terms.push((re(p.u), nn(0, 1)));
    terms.push((re(p.u), nn(2, 3)));
    for a in 0..2u8 {
        for b in 2..4u8 {
            terms.push((re(p.k - p.j / 2.0), nn(a, b)));
        }
    }
    // Transverse exchange with the sign matching the printed 6x6 matrix.
    terms.push((re(p.j), vec![(true, 0), (false, 1), (true, 3), (false, 2)]));
    terms.push((re(p.j), vec![(true, 1), (false, 0), (true, 2), (false, 3)]));
    for (a, sa) in [(0u8, 0.5), (1, -0.5)] {
        for (b, sb) in [(2u8, 0.5), (3, -0.5)] {
            terms.push((re(-2.0 * p.j * sa * sb), nn(a, b)));
        }
    }
    terms.push((re(p.j), vec![(true, 0), (true, 1), (false, 3), (false, 2)]));
    terms.push((re(p.j), vec![(true, 2), (true, 3), (false, 1), (false, 0)]));
    for (s, so) in [(0u8, 1u8), (1, 0)] {
        for hop in [vec![(true, s), (false, 2 + s)], vec![(true, 2 + s), (false, s)]] {
            for nm in [so, 2 + so] {
                let mut ops = n(nm);
                ops.extend_from_slice(&hop);
                terms.push((re(p.v), ops));
            }
        }
    }
    if gamma != 0.0 {
        for (m, sg) in [(0u8, 1.0), (1, 1.0), (2, -1.0), (3, -1.0)] {
            terms.push((C::new(0.0, gamma * sg), n(m)));
        }
    }
    terms
}

/// The 6x6 matrix assembled operator-by-operator on the Fock basis.
/// Must reproduce `spectrum::build_matrix` to rounding.
///
/// # Arguments
/// * `p` - model parameters
/// * `gamma` - gain/loss strength in Ry
pub fn assemble_dimer_matrix(p: &HubbardParams, gamma: f64) -> [[C; 6]; 6] {
    let bv = basis_vectors();
    let idx = mask_index(&bv);
    let mut h = [[C::new(0.0, 0.0); 6]; 6];
    let terms = h_terms(p, gamma);
    for (jcol, &(mask, bsign)) in bv.iter().enumerate() {
        for (c, ops) in &terms {
            if let Some((m2, sg)) = apply_ops(mask, ops) {
                if let Some((irow, rsign)) = idx[m2 as usize] {
                    h[irow][jcol] += c * ((sg * bsign * rsign) as f64);
                }
            }
        }
    }
    h
}

/// Expectation value <vec| ops |vec> for a real vector on the 6-basis.
fn expect(vec: &[f64; 6], ops: &[Op], bv: &[(u8, i32); 6], idx: &[Option<(usize, i32)>; 16]) -> f64 {
    let mut out = 0.0;
    for (jcol, &(mask, bsign)) in bv.iter().enumerate() {
        if vec[jcol] == 0.0 {
            continue;
        }
        if let Some((m2, sg)) = apply_ops(mask, ops) {
            if let Some((irow, rsign)) = idx[m2 as usize] {
                out += vec[irow] * ((sg * bsign * rsign) as f64) * vec[jcol];
            }
        }
    }
    out
}

/// The sixteen single- and two-mode operators tracked by the mean-field
/// dynamics, in the state-vector slot order: four occupations, four
/// inter-site coherences (0->2, 1->3, 2->0, 3->1), four on-site spin flips,
/// and four pairing amplitudes.
fn ops16() -> [Vec<Op>; 16] {
    [
        vec![(true, 0), (false, 0)],
        vec![(true, 1), (false, 1)],
        vec![(true, 2), (false, 2)],
        vec![(true, 3), (false, 3)],
        vec![(true, 0), (false, 2)],
        vec![(true, 1), (false, 3)],
        vec![(true, 2), (false, 0)],
        vec![(true, 3), (false, 1)],
        vec![(true, 0), (false, 1)],
        vec![(true, 1), (false, 0)],
        vec![(true, 2), (false, 3)],
        vec![(true, 3), (false, 2)],
        vec![(true, 0), (true, 1)],
        vec![(false, 1), (false, 0)],
        vec![(true, 2), (true, 3)],
        vec![(false, 3), (false, 2)],
    ]
}

/// Correlated ground state of the Hermitian (gamma = 0) dimer.
#[derive(Debug, Clone, Copy)]
pub struct FockGround {
    /// Ground eigenvalue of the 6x6 block (electronic part only).
    pub energy: f64,
    /// The sixteen tracked expectation values in dynamics slot order.
    pub expectations: [Complex64; 16],
}

/// Diagonalizes the Hermitian dimer and evaluates the sixteen tracked
/// expectation values in the ground state.
///
/// # Arguments
/// * `p` - model parameters
pub fn ground_state_expectations(p: &HubbardParams) -> Result<FockGround> {
    let h = assemble_dimer_matrix(p, 0.0);
    let rows: Vec<Vec<f64>> = (0..6).map(|i| (0..6).map(|j| h[i][j].re).collect()).collect();
    let (vals, vecs) = symmetric_eigen(&rows)?;
    let mut gs = [0.0; 6];
    gs.copy_from_slice(&vecs[0]);
    let bv = basis_vectors();
    let idx = mask_index(&bv);
    let mut expectations = [C::new(0.0, 0.0); 16];
    for (k, ops) in ops16().iter().enumerate() {
        expectations[k] = C::new(expect(&gs, ops, &bv, &idx), 0.0);
    }
    Ok(FockGround {
        energy: vals[0],
        expectations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::OrbitalGeometry;
    use crate::integrals::hubbard_params;
    use crate::spectrum::build_matrix_signed;

    fn equilibrium_params() -> HubbardParams {
        let g = OrbitalGeometry::new(1.41968, 1.199206).unwrap();
        hubbard_params(&g).unwrap()
    }

    #[test]
    fn operator_assembly_reproduces_printed_matrix() {
        let p = equilibrium_params();
        for gamma in [0.0, 0.3, 0.9] {
            let a = assemble_dimer_matrix(&p, gamma);
            let b = build_matrix_signed(&p, gamma);
            for i in 0..6 {
                for j in 0..6 {
                    assert!(
                        (a[i][j] - b[i][j]).norm() < 1e-13,
                        "gamma = {gamma}, ({i},{j}): {} vs {}",
                        a[i][j],
                        b[i][j]
                    );
                }
            }
        }
    }

    #[test]
    fn fermion_signs_anticommute() {
        // c0^dag c1^dag |0> = -c1^dag c0^dag |0>
        let a = cdag(cdag(Some((0, 1)), 1), 0).unwrap();
        let b = cdag(cdag(Some((0, 1)), 0), 1).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, -b.1);
        // Double creation annihilates.
        assert!(cdag(cdag(Some((0, 1)), 2), 2).is_none());
    }

    #[test]
    fn ground_state_matches_frozen_reference() {
        let p = equilibrium_params();
        let gs = ground_state_expectations(&p).unwrap();
        assert!(
            (gs.energy - -3.731_779_665_447_352_7).abs() < 1e-12,
            "energy {}",
            gs.energy
        );
        // Half filling on every mode by left-right and spin symmetry.
        for k in 0..4 {
            assert!((gs.expectations[k].re - 0.5).abs() < 1e-12);
            assert!(gs.expectations[k].im == 0.0);
        }
        // Bond order, equal on all four coherence slots.
        let w = 0.485_308_041_533_470_4;
        for k in 4..8 {
            assert!(
                (gs.expectations[k].re - w).abs() < 1e-12,
                "slot {k}: {}",
                gs.expectations[k]
            );
        }
        // Spin flips and pairing vanish in the singlet ground state.
        for k in 8..16 {
            assert!(gs.expectations[k].norm() < 1e-12, "slot {k}");
        }
    }

    #[test]
    fn ground_energy_agrees_with_closed_form_trio_root() {
        use crate::spectrum::ground_energy;
        for (r, alpha) in [(1.41968, 1.199206), (2.0, 1.05), (1.1, 1.35)] {
            let g = OrbitalGeometry::new(r, alpha).unwrap();
            let p = hubbard_params(&g).unwrap();
            let gs = ground_state_expectations(&p).unwrap();
            let e4 = ground_energy(&p, 0.0);
            assert!(
                (gs.energy - e4).abs() < 1e-11,
                "({r},{alpha}): {} vs {e4}",
                gs.energy
            );
        }
    }
}
