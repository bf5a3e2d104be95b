//! Mean-field time evolution of sixteen operator expectations under the
//! dimer Hamiltonian, in the Hermitian form and in the generalized
//! non-Hermitian form where balanced gain/loss adds linear gain terms and
//! nonlinear normalization terms to every equation.
//!
//! State slots: [n1u, n1d, n2u, n2d, b12u, b12d, b21u, b21d, f1ud, f1du,
//! f2ud, f2du, p1dag, p1, p2dag, p2] - four occupations, four inter-site
//! coherences, four on-site spin flips, four pairing amplitudes. The
//! coefficients multiplying each term are themselves functions of the
//! instantaneous state (self-consistent mean field), refreshed at every
//! right-hand-side evaluation.
//!
//! Dissociation is detected by a dual trigger: any occupation growing an
//! imaginary part beyond 1e-6, or its real part leaving [-0.05, 1.05].
//! The trigger time T_D is localized by bisection to 1e-4 time units
//! (time in units of hbar/Ry).
//!
//! The right-hand side is written once, generically, over a small ring
//! abstraction; evaluating it over plain complex numbers gives the RHS
//! value while evaluating it over a forward-mode tangent type gives the
//! holomorphic Jacobian, so the two can never drift apart. The only
//! non-holomorphic dependence (|pairing|^2 in the gain terms) enters the
//! Jacobian through a small explicit conjugate block.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{H2Error, Result};
use crate::exec::par_map;
use crate::fock::ground_state_expectations;
use crate::geometry::GainLossCoupling;
use crate::integrals::HubbardParams;
use crate::ode::{integrate_with_event, EventOutcome, OdeOptions};
use crate::variational::{equilibrium, params_at};

type C = Complex64;

/// Number of tracked expectation values.
pub const STATE_DIM: usize = 16;
/// |Im| threshold on occupations that flags dissociation.
pub const IM_TRIGGER: f64 = 1e-6;
/// Slack around [0, 1] allowed for occupation real parts.
pub const WINDOW_SLACK: f64 = 0.05;
/// Bisection tolerance on the dissociation time.
pub const EVENT_TOL: f64 = 1e-4;
/// Relative refinement applied when the trigger fires before t = 1, so the
/// localized time stays proportionally as sharp as a late event's.
pub const EVENT_TOL_REL: f64 = 1e-4;

/// The sixteen tracked expectations at one instant.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MeanFieldState(pub [Complex64; STATE_DIM]);

impl MeanFieldState {
    /// Occupation of site `j` (1 or 2) with spin up (`true`) or down.
    pub fn occupation(&self, site: usize, up: bool) -> C {
        debug_assert!(site == 1 || site == 2);
        self.0[2 * (site - 1) + usize::from(!up)]
    }
    /// Inter-site coherence <c^dag_{j sigma} c_{jbar sigma}>.
    pub fn bond(&self, from_site_1: bool, up: bool) -> C {
        self.0[4 + 2 * usize::from(!from_site_1) + usize::from(!up)]
    }
    /// On-site spin flip <c^dag_{j up} c_{j down}> or its reverse.
    pub fn spin_flip(&self, site: usize, up_down: bool) -> C {
        self.0[8 + 2 * (site - 1) + usize::from(!up_down)]
    }
    /// Pairing amplitude <Delta_j> (`dagger = false`) or <Delta^dag_j>.
    pub fn pairing(&self, site: usize, dagger: bool) -> C {
        self.0[12 + 2 * (site - 1) + usize::from(!dagger)]
    }
}

/// State-dependent coefficients of the equations of motion. Built with the
/// complex on-site energies: +i gamma on site 1, -i gamma on site 2.
#[derive(Debug, Clone, Copy)]
pub struct MeanFieldCoefficients {
    /// On-site energies e_{j sigma}, order [1up, 1dn, 2up, 2dn].
    pub e: [C; 4],
    /// Effective hops t_{j sigma}, same order.
    pub t_eff: [C; 4],
    /// Exchange couplings J_{j sigma}, same order.
    pub j_eff: [C; 4],
    /// Pair couplings [P1, P1*, P2, P2*].
    pub p_eff: [C; 4],
}

/// Minimal ring of operations the equations of motion are written in.
trait Ring:
    Copy
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
{
    /// Lift a constant.
    fn cst(c: C) -> Self;
    /// Multiply by a constant.
    fn scale(self, c: C) -> Self;
    /// Complex conjugate treated as a constant (no derivative flows
    /// through it); the conjugate dependence is handled separately.
    fn conj_const(self) -> Self;
}

impl Ring for C {
    fn cst(c: C) -> Self {
        c
    }
    fn scale(self, c: C) -> Self {
        self * c
    }
    fn conj_const(self) -> Self {
        self.conj()
    }
}

/// Forward-mode tangent: a value plus holomorphic partials with respect
/// to the sixteen state slots.
#[derive(Clone, Copy)]
struct Lin {
    v: C,
    d: [C; STATE_DIM],
}

impl Lin {
    fn var(v: C, k: usize) -> Lin {
        let mut d = [C::new(0.0, 0.0); STATE_DIM];
        d[k] = C::new(1.0, 0.0);
        Lin { v, d }
    }
}

impl std::ops::Add for Lin {
    type Output = Lin;
    fn add(self, o: Lin) -> Lin {
        let mut d = self.d;
        for (a, b) in d.iter_mut().zip(&o.d) {
            *a += b;
        }
        Lin { v: self.v + o.v, d }
    }
}

impl std::ops::Sub for Lin {
    type Output = Lin;
    fn sub(self, o: Lin) -> Lin {
        let mut d = self.d;
        for (a, b) in d.iter_mut().zip(&o.d) {
            *a -= b;
        }
        Lin { v: self.v - o.v, d }
    }
}

impl std::ops::Mul for Lin {
    type Output = Lin;
    fn mul(self, o: Lin) -> Lin {
        let mut d = [C::new(0.0, 0.0); STATE_DIM];
        for k in 0..STATE_DIM {
            d[k] = self.v * o.d[k] + self.d[k] * o.v;
        }
        Lin {
            v: self.v * o.v,
            d,
        }
    }
}

impl Ring for Lin {
    fn cst(c: C) -> Self {
        Lin {
            v: c,
            d: [C::new(0.0, 0.0); STATE_DIM],
        }
    }
    fn scale(self, c: C) -> Self {
        let mut d = self.d;
        for a in d.iter_mut() {
            *a *= c;
        }
        Lin { v: self.v * c, d }
    }
    fn conj_const(self) -> Self {
        Lin::cst(self.v.conj())
    }
}

/// State-dependent coefficients over any ring; `gamma_envelope` adds the
/// +-i gamma imaginary parts to the on-site energies.
fn coeffs_generic<T: Ring>(p: &HubbardParams, s: &[T; STATE_DIM], gamma_envelope: f64) -> [T; 16] {
    let re = |x: f64| C::new(x, 0.0);
    let ig = C::new(0.0, gamma_envelope);
    let eps = T::cst(re(p.eps));
    let e1u = eps + s[1].scale(re(p.u)) + (s[2] + s[3]).scale(re(p.k)) - s[2].scale(re(p.j))
        + (s[5] + s[7]).scale(re(p.v))
        + T::cst(ig);
    let e1d = eps + s[0].scale(re(p.u)) + (s[2] + s[3]).scale(re(p.k)) - s[3].scale(re(p.j))
        + (s[4] + s[6]).scale(re(p.v))
        + T::cst(ig);
    let e2u = eps + s[3].scale(re(p.u)) + (s[0] + s[1]).scale(re(p.k)) - s[0].scale(re(p.j))
        + (s[7] + s[5]).scale(re(p.v))
        - T::cst(ig);
    let e2d = eps + s[2].scale(re(p.u)) + (s[0] + s[1]).scale(re(p.k)) - s[1].scale(re(p.j))
        + (s[6] + s[4]).scale(re(p.v))
        - T::cst(ig);
    let t = T::cst(re(p.t));
    let t1u = t + (s[1] + s[3]).scale(re(p.v));
    let t1d = t + (s[0] + s[2]).scale(re(p.v));
    let t2u = t + (s[3] + s[1]).scale(re(p.v));
    let t2d = t + (s[2] + s[0]).scale(re(p.v));
    let j1u = s[11].scale(re(-p.j));
    let j1d = s[10].scale(re(-p.j));
    let j2u = s[9].scale(re(-p.j));
    let j2d = s[8].scale(re(-p.j));
    let p1 = s[15].scale(re(p.j));
    let p1s = s[14].scale(re(p.j));
    let p2 = s[13].scale(re(p.j));
    let p2s = s[12].scale(re(p.j));
    [
        e1u, e1d, e2u, e2d, t1u, t1d, t2u, t2d, j1u, j1d, j2u, j2d, p1, p1s, p2, p2s,
    ]
}

/// The sixteen right-hand sides d<O>/dT over any ring. `gamma` feeds the
/// gain/loss system; `hermitian` drops it entirely (closed-system form).
fn rhs_generic<T: Ring>(
    p: &HubbardParams,
    gamma: f64,
    hermitian: bool,
    s: &[T; STATE_DIM],
) -> [T; STATE_DIM] {
    // Coefficients carry no gamma envelope here: the commutator system uses
    // the Hermitian on-site energies, and every explicit gamma term lives
    // in the gain/loss system below.
    let [e1u, e1d, e2u, e2d, t1u, t1d, t2u, t2d, j1u, j1d, j2u, j2d, p1, p1s, p2, p2s] =
        coeffs_generic(p, s, 0.0);

    // i d<O>/dT from the commutator with the mean-field Hamiltonian.
    let f: [T; STATE_DIM] = [
        t1u * s[4] - t2u * s[6] + j1u * s[8] - j1d * s[9] + p1 * s[12] - p1s * s[13],
        t1d * s[5] - t2d * s[7] + j1d * s[9] - j1u * s[8] + p1 * s[12] - p1s * s[13],
        t2u * s[6] - t1u * s[4] + j2u * s[10] - j2d * s[11] + p2 * s[14] - p2s * s[15],
        t2d * s[7] - t1d * s[5] + j2d * s[11] - j2u * s[10] + p2 * s[14] - p2s * s[15],
        (e2u - e1u) * s[4] + t2u * (s[0] - s[2]),
        (e2d - e1d) * s[5] + t2d * (s[1] - s[3]),
        (e1u - e2u) * s[6] + t1u * (s[2] - s[0]),
        (e1d - e2d) * s[7] + t1d * (s[3] - s[1]),
        (e1d - e1u) * s[8] + j1d * (s[0] - s[1]),
        (e1u - e1d) * s[9] + j1u * (s[1] - s[0]),
        (e2d - e2u) * s[10] + j2d * (s[2] - s[3]),
        (e2u - e2d) * s[11] + j2u * (s[3] - s[2]),
        p1s * (s[0] + s[1]) - p1s - (e1u + e1d) * s[12],
        (e1u + e1d) * s[13] - p1 * (s[0] + s[1]) + p1,
        p2s * (s[2] + s[3]) - p2s - (e2u + e2d) * s[14],
        (e2u + e2d) * s[15] - p2 * (s[2] + s[3]) + p2,
    ];

    let minus_i = C::new(0.0, -1.0);
    if hermitian || gamma == 0.0 {
        return f.map(|x| x.scale(minus_i));
    }

    // Gain/loss system: linear +-i gamma terms, |pairing|^2 feedback on the
    // occupations, and the nonlinear normalization terms proportional to
    // the site-imbalance sum.
    let ig = C::new(0.0, gamma);
    let two_ig = C::new(0.0, 2.0 * gamma);
    let sg = s[0] + s[1] - s[2] - s[3];
    let d1 = s[13] * s[13].conj_const();
    let d2 = s[15] * s[15].conj_const();
    let mut g = [T::cst(C::new(0.0, 0.0)); STATE_DIM];
    g[0] = s[0].scale(ig) - d1.scale(two_ig) - (s[0] * sg).scale(two_ig);
    g[1] = s[1].scale(ig) - d1.scale(two_ig) - (s[1] * sg).scale(two_ig);
    g[2] = d2.scale(two_ig) - s[2].scale(ig) - (s[2] * sg).scale(two_ig);
    g[3] = d2.scale(two_ig) - s[3].scale(ig) - (s[3] * sg).scale(two_ig);
    for (k, sign) in [
        (4, 1.0),
        (5, 1.0),
        (6, -1.0),
        (7, -1.0),
        (8, 1.0),
        (9, 1.0),
        (10, -1.0),
        (11, -1.0),
    ] {
        g[k] = s[k].scale(ig * sign) - (s[k] * sg).scale(two_ig);
    }
    g[12] = s[12].scale(two_ig) + (s[12] * s[1]).scale(two_ig) - (s[12] * sg).scale(two_ig);
    g[13] = (s[13] * s[1]).scale(two_ig) - s[13].scale(ig) - (s[13] * sg).scale(two_ig);
    g[14] = T::cst(C::new(0.0, 0.0))
        - s[14].scale(two_ig)
        - (s[14] * s[3]).scale(two_ig)
        - (s[14] * sg).scale(two_ig);
    g[15] = s[15].scale(ig) - (s[15] * s[3]).scale(two_ig) - (s[15] * sg).scale(two_ig);

    let mut out = f;
    for k in 0..STATE_DIM {
        out[k] = (f[k] + g[k]).scale(minus_i);
    }
    out
}

/// Coefficients of the equations of motion at a state, with the +-i gamma
/// envelope on the on-site energies.
///
/// # Arguments
/// * `p` - integrals at the working geometry
/// * `s` - instantaneous state
/// * `gamma` - gain/loss strength in Ry
pub fn coefficients(p: &HubbardParams, s: &MeanFieldState, gamma: f64) -> MeanFieldCoefficients {
    let c = coeffs_generic::<C>(p, &s.0, gamma);
    MeanFieldCoefficients {
        e: [c[0], c[1], c[2], c[3]],
        t_eff: [c[4], c[5], c[6], c[7]],
        j_eff: [c[8], c[9], c[10], c[11]],
        p_eff: [c[12], c[13], c[14], c[15]],
    }
}

/// Closed-system equations of motion d<O>/dT (no gain/loss anywhere).
///
/// # Arguments
/// * `p` - integrals at the working geometry
/// * `s` - instantaneous state
pub fn rhs_hermitian(p: &HubbardParams, s: &MeanFieldState) -> MeanFieldState {
    MeanFieldState(rhs_generic::<C>(p, 0.0, true, &s.0))
}

/// Gain/loss equations of motion d<O>/dT, including the linear gamma terms
/// and the nonlinear normalization terms. Reduces exactly to
/// `rhs_hermitian` at gamma = 0.
///
/// # Arguments
/// * `p` - integrals at the working geometry
/// * `s` - instantaneous state
/// * `gamma` - gain/loss strength in Ry
pub fn rhs_nonhermitian(p: &HubbardParams, s: &MeanFieldState, gamma: f64) -> MeanFieldState {
    MeanFieldState(rhs_generic::<C>(p, gamma, false, &s.0))
}

/// Holomorphic and conjugate Jacobian blocks, in that order.
pub type JacobianPair = ([[C; STATE_DIM]; STATE_DIM], [[C; STATE_DIM]; STATE_DIM]);

/// Analytic Jacobian of the RHS at a state, split into the holomorphic
/// block A[i][j] = d(rhs_i)/d(s_j) and the conjugate block
/// B[i][j] = d(rhs_i)/d(conj s_j). B is nonzero only for the |pairing|^2
/// feedback (rows 0..3, columns 13 and 15) in the gain/loss form.
///
/// # Arguments
/// * `p` - integrals at the working geometry
/// * `s` - instantaneous state
/// * `gamma` - gain/loss strength in Ry
/// * `hermitian` - evaluate the closed-system form instead
pub fn jacobian(
    p: &HubbardParams,
    s: &MeanFieldState,
    gamma: f64,
    hermitian: bool,
) -> JacobianPair {
    let vars: [Lin; STATE_DIM] = std::array::from_fn(|k| Lin::var(s.0[k], k));
    let rows = rhs_generic::<Lin>(p, gamma, hermitian, &vars);
    let mut a = [[C::new(0.0, 0.0); STATE_DIM]; STATE_DIM];
    for (i, row) in rows.iter().enumerate() {
        a[i] = row.d;
    }
    let mut b = [[C::new(0.0, 0.0); STATE_DIM]; STATE_DIM];
    if !hermitian && gamma != 0.0 {
        // rhs_k = -i * (... - 2 i gamma |s13|^2 ...) for k in {0, 1}:
        // d/d(conj s13) = -i * (-2 i gamma) * s13 = -2 gamma s13.
        let c13 = C::new(-2.0 * gamma, 0.0) * s.0[13];
        let c15 = C::new(2.0 * gamma, 0.0) * s.0[15];
        b[0][13] = c13;
        b[1][13] = c13;
        b[2][15] = c15;
        b[3][15] = c15;
    }
    (a, b)
}

/// Mean-field energy functional consistent with the equations of motion;
/// a constant of the Hermitian evolution. Each interaction channel is
/// counted once via the same factorization that defines the coefficients.
///
/// # Arguments
/// * `p` - integrals at the working geometry
/// * `s` - instantaneous state
pub fn mean_field_energy(p: &HubbardParams, s: &MeanFieldState) -> C {
    let v = &s.0;
    let re = |x: f64| C::new(x, 0.0);
    let occ = v[0] + v[1] + v[2] + v[3];
    let bonds = v[4] + v[5] + v[6] + v[7];
    let mut e = re(p.eps) * occ + re(p.t) * bonds;
    e += re(p.u) * (v[0] * v[1] + v[2] * v[3]);
    e += re(p.k - p.j / 2.0) * (v[0] + v[1]) * (v[2] + v[3]);
    e -= re(p.j / 2.0) * (v[0] - v[1]) * (v[2] - v[3]);
    e += re(p.j) * (v[8] * v[11] + v[9] * v[10]);
    e += re(p.j) * (v[12] * v[15] + v[14] * v[13]);
    e += re(p.v) * ((v[1] + v[3]) * (v[4] + v[6]) + (v[0] + v[2]) * (v[5] + v[7]));
    e
}

/// Prepared initial condition for one trajectory.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DynamicsSetup {
    /// Ground-state expectations of the Hermitian dimer.
    pub state: MeanFieldState,
    /// Integrals at the working geometry.
    pub params: HubbardParams,
    /// Proton distance of the working geometry in a0.
    pub r0: f64,
    /// Orbital exponent of the working geometry in 1/a0.
    pub alpha0: f64,
}

/// Snaps raw ground-state expectations onto their exact symmetry pattern.
///
/// The two-electron ground state is a spin singlet with even site parity:
/// every occupation is exactly 1/2, the four bond amplitudes are equal and
/// real, and all spin-flip and pair amplitudes vanish. The eigensolver
/// delivers these up to roundoff, and the residue matters: the mean-field
/// flow linearized at this point carries an unstable direction (exponent
/// about 0.37/time unit) that is odd under the symmetry, so a 1e-16 seed
/// grows to an O(0.1) excursion by t ~ 100. On the exactly patterned
/// state every commutator term cancels bitwise and the closed-system
/// trajectory is constant to the last ulp.
fn symmetrize_ground_state(raw: &[Complex64; 16]) -> [Complex64; 16] {
    let bond = (raw[4] + raw[5] + raw[6] + raw[7]) / 4.0;
    let mut out = [Complex64::new(0.0, 0.0); 16];
    for slot in &mut out[0..4] {
        *slot = Complex64::new(0.5, 0.0);
    }
    for slot in &mut out[4..8] {
        *slot = Complex64::new(bond.re, 0.0);
    }
    let worst = raw
        .iter()
        .zip(&out)
        .map(|(r, o)| (r - o).norm())
        .fold(0.0_f64, f64::max);
    assert!(
        worst <= 1e-9,
        "ground-state expectations deviate {worst:.2e} from the singlet pattern"
    );
    out
}

/// Evaluates the sixteen expectations in the exact two-electron ground
/// state of the Hermitian matrix at the equilibrium geometry for `g`
/// (or the gamma = 0 geometry when `frozen_geometry` is set), snapped
/// onto the exact singlet symmetry pattern.
///
/// # Arguments
/// * `g` - gain/loss strength (selects the geometry; the state itself is
///   always the Hermitian ground state)
/// * `frozen_geometry` - use the gamma = 0 equilibrium geometry instead
pub fn initial_state(g: GainLossCoupling, frozen_geometry: bool) -> Result<DynamicsSetup> {
    let geom_g = if frozen_geometry {
        GainLossCoupling::new(0.0)?
    } else {
        g
    };
    let eq = equilibrium(geom_g)?;
    let (Some(r0), Some(alpha0)) = (eq.r0, eq.alpha0) else {
        return Err(H2Error::InvalidInput(format!(
            "gamma = {} is past the breakup coupling; no bound geometry to start from",
            geom_g.value()
        )));
    };
    let params = params_at(&eq)?;
    let gs = ground_state_expectations(&params)?;
    Ok(DynamicsSetup {
        state: MeanFieldState(symmetrize_ground_state(&gs.expectations)),
        params,
        r0,
        alpha0,
    })
}

/// Controls for one trajectory integration.
#[derive(Debug, Clone, Copy)]
pub struct DynamicsOptions {
    /// Time horizon in units of hbar/Ry.
    pub t_max: f64,
    /// Integrate the closed-system equations instead of the gain/loss ones.
    pub hermitian: bool,
    /// Build the initial state at the gamma = 0 geometry.
    pub frozen_geometry: bool,
    /// Integrator tolerances.
    pub ode: OdeOptions,
}

impl Default for DynamicsOptions {
    fn default() -> Self {
        DynamicsOptions {
            t_max: 200.0,
            hermitian: false,
            frozen_geometry: false,
            ode: OdeOptions {
                h_max: 0.5,
                ..OdeOptions::default()
            },
        }
    }
}

/// Outcome of one trajectory.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DynamicsRun {
    /// Gain/loss strength in Ry.
    pub gamma: f64,
    /// Dissociation time, if the trigger fired before t_max.
    pub t_d: Option<f64>,
    /// Time of the final reported state: T_D, an observer stop, or t_max.
    pub final_t: f64,
    /// State at `final_t`.
    pub final_state: MeanFieldState,
}

/// True when any occupation has left the physical window.
fn dissociation_trigger(y: &[C]) -> bool {
    y[..4].iter().any(|n| {
        n.im.abs() > IM_TRIGGER || n.re < -WINDOW_SLACK || n.re > 1.0 + WINDOW_SLACK
    })
}

/// Integrates one trajectory from the prepared ground-state expectations,
/// watching for dissociation. The observer receives every accepted step
/// up to the trigger; return false from it to stop early.
///
/// # Arguments
/// * `g` - gain/loss strength
/// * `opts` - horizon, form (Hermitian or gain/loss), geometry, tolerances
/// * `observer` - accepted-step callback `(t, state) -> continue`
pub fn integrate<O>(g: GainLossCoupling, opts: &DynamicsOptions, mut observer: O) -> Result<DynamicsRun>
where
    O: FnMut(f64, &MeanFieldState) -> bool,
{
    let setup = initial_state(g, opts.frozen_geometry)?;
    let p = setup.params;
    let gamma = g.value();
    let hermitian = opts.hermitian;
    let mut rhs = |_t: f64, y: &[C], dy: &mut [C]| {
        let s: &[C; STATE_DIM] = y.try_into().expect("state dimension fixed");
        let out = rhs_generic::<C>(&p, gamma, hermitian, s);
        dy.copy_from_slice(&out);
    };
    let mut stopped_at: Option<f64> = None;
    let outcome = integrate_with_event(
        &mut rhs,
        0.0,
        &setup.state.0,
        opts.t_max,
        &opts.ode,
        |_t, y| dissociation_trigger(y),
        EVENT_TOL,
        |t, y| {
            let arr: [C; STATE_DIM] = y.try_into().expect("state dimension fixed");
            let keep_going = observer(t, &MeanFieldState(arr));
            if !keep_going {
                stopped_at = Some(t);
            }
            keep_going
        },
    )?;
    // An event before t = 1 deserves a proportionally tighter bracket than
    // the absolute 1e-4, so the time survives relative-error comparisons.
    let outcome = match outcome {
        EventOutcome::Event { t, state } if t > 0.0 && t * EVENT_TOL_REL < EVENT_TOL => {
            let refined = integrate_with_event(
                &mut rhs,
                0.0,
                &setup.state.0,
                (t + EVENT_TOL).min(opts.t_max),
                &opts.ode,
                |_t, y| dissociation_trigger(y),
                (t * EVENT_TOL_REL).max(1e-13),
                |_, _| true,
            )?;
            match refined {
                // The clamped horizon can in principle stop just short of
                // an accepted step that sees the trigger; keep the first
                // localization rather than losing the event.
                EventOutcome::Completed(_) => EventOutcome::Event { t, state },
                ev => ev,
            }
        }
        other => other,
    };
    let (t_d, final_t, yf) = match outcome {
        EventOutcome::Completed(yf) => (None, stopped_at.unwrap_or(opts.t_max), yf),
        EventOutcome::Event { t, state } => (Some(t), t, state),
    };
    let arr: [C; STATE_DIM] = yf.as_slice().try_into().expect("state dimension fixed");
    Ok(DynamicsRun {
        gamma,
        t_d,
        final_t,
        final_state: MeanFieldState(arr),
    })
}

/// One point of a dissociation-time sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TdPoint {
    /// Gain/loss strength in Ry.
    pub gamma: f64,
    /// Dissociation time, when one was detected.
    pub t_d: Option<f64>,
    /// Failure description when the trajectory could not be computed.
    pub error: Option<String>,
}

/// Runs the gain/loss dynamics over a gamma grid in parallel. Per-point
/// failures are recorded in the output and do not abort the sweep.
///
/// # Arguments
/// * `gammas` - coupling grid (any order, reported in input order)
/// * `opts` - shared trajectory controls
pub fn td_sweep(gammas: &[f64], opts: &DynamicsOptions) -> Vec<TdPoint> {
    par_map(gammas, |&gamma| {
        let run = GainLossCoupling::new(gamma).and_then(|g| integrate(g, opts, |_, _| true));
        match run {
            Ok(r) => TdPoint {
                gamma,
                t_d: r.t_d,
                error: None,
            },
            Err(e) => TdPoint {
                gamma,
                t_d: None,
                error: Some(e.to_string()),
            },
        }
    })
}

/// Fit constants of T_D(gamma) = (a / gamma^b) exp(c gamma).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TdFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Least-squares fit of log T_D = log a - b log gamma + c gamma, which is
/// linear in (log a, b, c).
///
/// # Arguments
/// * `points` - (gamma, T_D) samples; needs at least 5 with positive
///   gamma and T_D
pub fn fit_td(points: &[(f64, f64)]) -> Result<TdFit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(g, t)| g.is_finite() && t.is_finite() && *g > 0.0 && *t > 0.0)
        .collect();
    if usable.len() < 5 {
        return Err(H2Error::InvalidInput(format!(
            "T_D fit needs at least 5 finite points, got {}",
            usable.len()
        )));
    }
    // Normal equations for rows [1, -ln gamma, gamma] -> ln T_D.
    let mut m = [[0.0_f64; 3]; 3];
    let mut rhs = [0.0_f64; 3];
    for (g, t) in &usable {
        let row = [1.0, -g.ln(), *g];
        let y = t.ln();
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += row[i] * row[j];
            }
            rhs[i] += row[i] * y;
        }
    }
    // Gaussian elimination with partial pivoting.
    let mut aug = [[0.0_f64; 4]; 3];
    for i in 0..3 {
        aug[i][..3].copy_from_slice(&m[i]);
        aug[i][3] = rhs[i];
    }
    let scale = m
        .iter()
        .flatten()
        .fold(0.0_f64, |acc, x| acc.max(x.abs()));
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&a, &b| aug[a][col].abs().partial_cmp(&aug[b][col].abs()).unwrap())
            .unwrap();
        if aug[piv][col].abs() < 1e-12 * scale.max(1.0) {
            return Err(H2Error::RankDeficient(
                "T_D fit normal equations are singular; gamma grid has no spread".into(),
            ));
        }
        aug.swap(col, piv);
        for r in col + 1..3 {
            let f = aug[r][col] / aug[col][col];
            for c in col..4 {
                aug[r][c] -= f * aug[col][c];
            }
        }
    }
    let mut x = [0.0_f64; 3];
    for i in (0..3).rev() {
        let mut acc = aug[i][3];
        for j in i + 1..3 {
            acc -= aug[i][j] * x[j];
        }
        x[i] = acc / aug[i][i];
    }
    Ok(TdFit {
        a: x[0].exp(),
        b: x[1],
        c: x[2],
    })
}
