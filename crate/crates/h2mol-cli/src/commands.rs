//! The subcommand implementations.
//!
//! Single-record results (integrals, spectrum, equilibrium, phonons,
//! couplings, thresholds, report) emit JSON; tabular results (sweep,
//! curve, density, dynamics, td-sweep) emit CSV with units in the header
//! row and a `#`-prefixed JSON line for run-level metadata. Complex values
//! appear as paired re/im columns in CSV and {"re", "im"} objects in JSON.
//!
//! Expensive computations go through the content-addressed cache at the
//! finest natural grain: equilibrium solves and dissociation times per
//! point (so overlapping grids reuse each other's work), energy curves,
//! phonon fits, couplings, and thresholds per request.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use h2mol::dynamics::STATE_DIM;
use h2mol::spectrum::a_minus_b;
use h2mol::variational::params_at;
use h2mol::vibrational::REDUCED_MASS;
use h2mol::{
    density_grid, energy_curve, eph_couplings, find_gamma_d, find_gamma_ms, find_gamma_pt,
    hubbard_params, initial_state, integrate, phonon_fit, rotational_constant,
    spectrum_closed_form, CouplingSet, DynamicsOptions, EquilibriumPoint, GainLossCoupling,
    HubbardParams, MeanFieldState, OrbitalGeometry, PhononFit, TdPoint,
};

use crate::cache::{Cache, CacheKey, SCHEMA_VERSION};
use crate::render::{csv_quote, emit_json, emit_text, fmt_f, fmt_opt, sink};
use crate::{CliError, CliResult};

/// Scalar minimizer tolerance baked into the library's nested optimization;
/// part of every cache key that depends on an equilibrium solve.
const MIN_XTOL: f64 = 1e-7;
/// Finite-difference step of the coupling derivatives.
const COUPLING_STEP: f64 = 1e-3;

/// Uniform grid of `steps` points from `lo` to `hi` inclusive.
fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect()
}

/// Validates a (lo, hi, steps) range request.
fn check_range(name: &str, lo: f64, hi: f64, steps: usize) -> CliResult<()> {
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(CliError::Input(format!(
            "empty {name} range [{lo}, {hi}]"
        )));
    }
    if steps == 0 || (steps == 1 && hi != lo) {
        return Err(CliError::Input(format!(
            "{name} range [{lo}, {hi}] needs at least 2 steps, got {steps}"
        )));
    }
    Ok(())
}

/// Equilibrium solve behind the cache, shared by every command that needs
/// a geometry at some coupling.
fn cached_equilibrium(cache: &Cache, gamma: f64) -> CliResult<EquilibriumPoint> {
    let key = CacheKey::new("equilibrium")
        .f64("gamma", gamma)
        .f64("xtol", MIN_XTOL);
    cache.remember(&key, || {
        let g = GainLossCoupling::new(gamma)?;
        Ok(h2mol::equilibrium(g)?)
    })
}

/// Phonon fit behind the cache.
fn cached_phonons(cache: &Cache, gamma: f64) -> CliResult<PhononFit> {
    let key = CacheKey::new("phonons")
        .f64("gamma", gamma)
        .f64("xtol", MIN_XTOL);
    let eq = cached_equilibrium(cache, gamma)?;
    cache.remember(&key, || Ok(phonon_fit(&eq)?))
}

/// Coupling derivatives behind the cache.
fn cached_couplings(cache: &Cache, gamma: f64) -> CliResult<CouplingSet> {
    let key = CacheKey::new("couplings")
        .f64("gamma", gamma)
        .f64("fd_step", COUPLING_STEP)
        .f64("xtol", MIN_XTOL);
    cache.remember(&key, || {
        let g = GainLossCoupling::new(gamma)?;
        Ok(eph_couplings(g)?)
    })
}

/// Oracle cross-check column of the integrals document.
#[derive(Serialize)]
struct OracleEntry {
    integral: &'static str,
    value: f64,
    error_estimate: f64,
}

/// `integrals --R --alpha`: the closed-form sextet plus overlap, each with
/// its independent quadrature value and error estimate.
#[derive(Serialize)]
struct IntegralsDoc {
    schema_version: u32,
    r_a0: f64,
    alpha_inv_a0: f64,
    /// eps, t, u, k, j, v in Ry; s is the dimensionless overlap.
    integrals_ry: HubbardParams,
    oracle: Vec<OracleEntry>,
}

pub fn integrals(out: Option<&Path>, r: f64, alpha: f64) -> CliResult<()> {
    let geom = OrbitalGeometry::new(r, alpha)?;
    let params = hubbard_params(&geom)?;
    let oracle = h2mol::oracle::quadrature_oracle_all(&geom)?;
    let names = h2mol::oracle::OracleIntegrand::ALL.map(|w| w.name());
    let doc = IntegralsDoc {
        schema_version: SCHEMA_VERSION,
        r_a0: r,
        alpha_inv_a0: alpha,
        integrals_ry: params,
        oracle: names
            .iter()
            .zip(oracle.iter())
            .map(|(name, v)| OracleEntry {
                integral: name,
                value: v.value,
                error_estimate: v.error_estimate,
            })
            .collect(),
    };
    emit_json(out, &doc)
}

/// `spectrum --R --alpha --gamma`: the six levels and the phase data.
#[derive(Serialize)]
struct SpectrumDoc {
    schema_version: u32,
    r_a0: f64,
    alpha_inv_a0: f64,
    gamma_ry: f64,
    /// E1..E6 in Ry as {"re", "im"} pairs.
    energies_ry: [crate::render::ComplexJson; 6],
    pt_broken: bool,
    ground_index: usize,
    /// Sign decides the phase: positive in the broken regime.
    a_minus_b: f64,
}

pub fn spectrum(out: Option<&Path>, r: f64, alpha: f64, gamma: f64) -> CliResult<()> {
    let geom = OrbitalGeometry::new(r, alpha)?;
    let params = hubbard_params(&geom)?;
    let g = GainLossCoupling::new(gamma)?;
    let spec = spectrum_closed_form(&params, g)?;
    let doc = SpectrumDoc {
        schema_version: SCHEMA_VERSION,
        r_a0: r,
        alpha_inv_a0: alpha,
        gamma_ry: gamma,
        energies_ry: spec.energies.map(Into::into),
        pt_broken: spec.pt_broken,
        ground_index: spec.ground_index,
        a_minus_b: a_minus_b(&params, g),
    };
    emit_json(out, &doc)
}

/// `equilibrium --gamma`: one variational solve.
#[derive(Serialize)]
struct EquilibriumDoc {
    schema_version: u32,
    /// gamma in Ry, r0 in a0, alpha0 in 1/a0, energies in Ry.
    #[serde(flatten)]
    point: EquilibriumPoint,
}

pub fn equilibrium(cache: &Cache, out: Option<&Path>, gamma: f64) -> CliResult<()> {
    let point = cached_equilibrium(cache, gamma)?;
    emit_json(
        out,
        &EquilibriumDoc {
            schema_version: SCHEMA_VERSION,
            point,
        },
    )
}

/// One CSV row of an equilibrium table.
fn equilibrium_row(p: &EquilibriumPoint) -> String {
    format!(
        "{},{},{},{},{},{:?}\n",
        fmt_f(p.gamma),
        fmt_opt(p.r0),
        fmt_opt(p.alpha0),
        fmt_opt(p.e_total),
        fmt_opt(p.e_diss),
        p.stability
    )
}

const SWEEP_HEADER: &str = "gamma_Ry,R0_a0,alpha0_inv_a0,E_total_Ry,E_diss_Ry,stability\n";

pub fn sweep(
    cache: &Cache,
    out: Option<&Path>,
    gamma_from: f64,
    gamma_to: f64,
    steps: usize,
) -> CliResult<()> {
    check_range("gamma", gamma_from, gamma_to, steps)?;
    if gamma_from < 0.0 {
        return Err(CliError::Input(format!(
            "gamma must be non-negative, range starts at {gamma_from}"
        )));
    }
    let gammas = linspace(gamma_from, gamma_to, steps);
    let points = h2mol::exec::par_map(&gammas, |g| cached_equilibrium(cache, *g));
    let mut text = String::from(SWEEP_HEADER);
    for point in points {
        text.push_str(&equilibrium_row(&point?));
    }
    emit_text(out, &text)
}

pub fn curve(
    cache: &Cache,
    out: Option<&Path>,
    gamma: f64,
    r_min: f64,
    r_max: f64,
    steps: usize,
) -> CliResult<()> {
    check_range("R", r_min, r_max, steps)?;
    if r_min <= 0.0 {
        return Err(CliError::Input(format!(
            "R range must be positive, starts at {r_min}"
        )));
    }
    let key = CacheKey::new("curve")
        .f64("gamma", gamma)
        .f64("r_min", r_min)
        .f64("r_max", r_max)
        .int("steps", steps as u64)
        .f64("xtol", MIN_XTOL);
    let curve = cache.remember(&key, || {
        let g = GainLossCoupling::new(gamma)?;
        Ok(energy_curve(g, &linspace(r_min, r_max, steps))?)
    })?;

    let mut text = format!(
        "# {}\n",
        serde_json::json!({"schema_version": SCHEMA_VERSION, "gamma_ry": gamma})
    );
    text.push_str("R_a0,alpha_opt_inv_a0");
    for i in 1..=6 {
        text.push_str(&format!(",E{i}_re_Ry,E{i}_im_Ry"));
    }
    text.push_str(",eps_Ry,t_Ry,U_Ry,K_Ry,J_Ry,V_Ry,S_overlap\n");
    for s in &curve.samples {
        text.push_str(&fmt_f(s.r));
        text.push(',');
        text.push_str(&fmt_f(s.alpha_opt));
        for e in &s.e_total {
            text.push_str(&format!(",{},{}", fmt_f(e.re), fmt_f(e.im)));
        }
        let p = &s.params;
        for v in [p.eps, p.t, p.u, p.k, p.j, p.v, p.s] {
            text.push(',');
            text.push_str(&fmt_f(v));
        }
        text.push('\n');
    }
    emit_text(out, &text)
}

pub fn density(
    cache: &Cache,
    out: Option<&Path>,
    gamma: f64,
    plane: &str,
    n: usize,
) -> CliResult<()> {
    if plane != "xz" {
        return Err(CliError::Input(format!(
            "unsupported plane {plane:?}: the density is axially symmetric, only \"xz\" exists"
        )));
    }
    let eq = cached_equilibrium(cache, gamma)?;
    let (Some(r0), Some(alpha0)) = (eq.r0, eq.alpha0) else {
        return Err(CliError::Input(format!(
            "no bound equilibrium at gamma = {gamma}; no density to sample"
        )));
    };
    let geom = OrbitalGeometry::new(r0, alpha0)?;
    let grid = density_grid(&geom, n)?;

    let mut text = format!(
        "# {}\n",
        serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "gamma_ry": gamma,
            "R0_a0": r0,
            "alpha0_inv_a0": alpha0,
            "integral_electrons": grid.integral,
        })
    );
    text.push_str("x_a0,z_a0,rho_inv_a0^3\n");
    for (iz, &z) in grid.zs.iter().enumerate() {
        for (ix, &x) in grid.xs.iter().enumerate() {
            text.push_str(&format!(
                "{},{},{}\n",
                fmt_f(x),
                fmt_f(z),
                fmt_f(grid.values[iz * grid.xs.len() + ix])
            ));
        }
    }
    emit_text(out, &text)
}

/// Internal-consistency diagnostics attached to every phonon document.
#[derive(Serialize)]
struct PhononConsistency {
    /// sqrt(k_H / m') recomputed from the emitted fields equals omega_H
    /// bitwise; a false here flags an inconsistent (k, omega) pair of the
    /// kind that appears in published reference tables.
    omega_h_consistent: bool,
    /// Relative deviation of the Morse force constant from the harmonic
    /// one; None without a Morse fit.
    k_mo_over_k_h_minus_1: Option<f64>,
    /// |deviation| < 0.05, the advertised agreement band.
    k_within_5_percent: Option<bool>,
}

impl PhononConsistency {
    fn from_fit(fit: &PhononFit) -> Self {
        let dev = fit.k_mo.map(|k_mo| k_mo / fit.k_h - 1.0);
        PhononConsistency {
            omega_h_consistent: (fit.k_h / fit.reduced_mass).sqrt() == fit.omega_h,
            k_mo_over_k_h_minus_1: dev,
            k_within_5_percent: dev.map(|d| d.abs() < 0.05),
        }
    }
}

/// `phonons --gamma`: harmonic and Morse characterization of the bond.
#[derive(Serialize)]
struct PhononsDoc {
    schema_version: u32,
    /// k in Ry/a0^2, omegas in Ry, e_d in Ry, alpha_mo in 1/a0.
    #[serde(flatten)]
    fit: PhononFit,
    consistency: PhononConsistency,
}

pub fn phonons(cache: &Cache, out: Option<&Path>, gamma: f64) -> CliResult<()> {
    let fit = cached_phonons(cache, gamma)?;
    emit_json(
        out,
        &PhononsDoc {
            schema_version: SCHEMA_VERSION,
            consistency: PhononConsistency::from_fit(&fit),
            fit,
        },
    )
}

/// `couplings --gamma`: distance derivatives of the six integrals.
#[derive(Serialize)]
struct CouplingsDoc {
    schema_version: u32,
    gamma_ry: f64,
    r0_a0: f64,
    alpha0_inv_a0: f64,
    couplings_ry_per_a0: CouplingSet,
    /// Whether the on-site energy is nearly stretch-invariant here; it is
    /// at zero coupling, and the near-invariance degrades as the coupling
    /// deforms the equilibrium.
    g_eps_below_0p01: bool,
}

pub fn couplings(cache: &Cache, out: Option<&Path>, gamma: f64) -> CliResult<()> {
    let eq = cached_equilibrium(cache, gamma)?;
    let (Some(r0), Some(alpha0)) = (eq.r0, eq.alpha0) else {
        return Err(CliError::Input(format!(
            "no bound equilibrium at gamma = {gamma}; no couplings to evaluate"
        )));
    };
    let set = cached_couplings(cache, gamma)?;
    emit_json(
        out,
        &CouplingsDoc {
            schema_version: SCHEMA_VERSION,
            gamma_ry: gamma,
            r0_a0: r0,
            alpha0_inv_a0: alpha0,
            g_eps_below_0p01: set.g_eps.abs() < 0.01,
            couplings_ry_per_a0: set,
        },
    )
}

/// Trajectory controls shared by `dynamics` and `td-sweep`.
pub struct TrajectoryOpts {
    pub t_max: f64,
    pub rtol: f64,
    pub atol: f64,
    pub hermitian: bool,
    pub frozen_geometry: bool,
}

impl TrajectoryOpts {
    fn validate(&self) -> CliResult<()> {
        for (name, v) in [
            ("t-max", self.t_max),
            ("rtol", self.rtol),
            ("atol", self.atol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Input(format!("--{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    fn to_options(&self) -> DynamicsOptions {
        let mut opts = DynamicsOptions::default();
        opts.t_max = self.t_max;
        opts.hermitian = self.hermitian;
        opts.frozen_geometry = self.frozen_geometry;
        opts.ode.rtol = self.rtol;
        opts.ode.atol = self.atol;
        opts
    }
}

/// Column names of the sixteen tracked expectations, in state order:
/// occupations, inter-site bonds, on-site spin flips, pairings.
const STATE_COLUMNS: [&str; STATE_DIM] = [
    "n1u", "n1d", "n2u", "n2d", "b12u", "b12d", "b21u", "b21d", "f1ud", "f1du", "f2ud", "f2du",
    "pair1dag", "pair1", "pair2dag", "pair2",
];

/// One trajectory CSV row: time plus re/im of every expectation.
fn dynamics_row(t: f64, s: &MeanFieldState) -> String {
    let mut row = fmt_f(t);
    for c in &s.0 {
        row.push(',');
        row.push_str(&fmt_f(c.re));
        row.push(',');
        row.push_str(&fmt_f(c.im));
    }
    row.push('\n');
    row
}

pub fn dynamics(out: Option<&Path>, gamma: f64, traj: &TrajectoryOpts) -> CliResult<()> {
    traj.validate()?;
    let g = GainLossCoupling::new(gamma)?;
    let opts = traj.to_options();
    let setup = initial_state(g, opts.frozen_geometry)?;

    let mut w = sink(out)?;
    let mut header = String::from("T_hbar_per_Ry");
    for name in STATE_COLUMNS {
        header.push_str(&format!(",{name}_re,{name}_im"));
    }
    header.push('\n');
    w.write_all(header.as_bytes()).map_err(CliError::Io)?;
    w.write_all(dynamics_row(0.0, &setup.state).as_bytes())
        .map_err(CliError::Io)?;

    // The observer cannot return an error, so the first write failure is
    // parked here and the integration is stopped on the next step.
    let mut io_err: Option<std::io::Error> = None;
    let run = integrate(g, &opts, |t, state| {
        match w.write_all(dynamics_row(t, state).as_bytes()) {
            Ok(()) => true,
            Err(e) => {
                io_err = Some(e);
                false
            }
        }
    })?;
    if let Some(e) = io_err {
        return Err(CliError::Io(e));
    }

    let footer = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "gamma_ry": gamma,
        "hermitian": opts.hermitian,
        "frozen_geometry": opts.frozen_geometry,
        "R0_a0": setup.r0,
        "alpha0_inv_a0": setup.alpha0,
        "t_d": run.t_d,
        "final_t": run.final_t,
    });
    writeln!(w, "# {footer}").map_err(CliError::Io)?;
    w.flush().map_err(CliError::Io)
}

/// One dissociation time behind the cache. Per-point failures become data
/// (the error column), never an abort: a sweep should deliver every point
/// it can.
fn cached_td_point(cache: &Cache, gamma: f64, traj: &TrajectoryOpts) -> TdPoint {
    let key = CacheKey::new("td_point")
        .f64("gamma", gamma)
        .f64("t_max", traj.t_max)
        .f64("rtol", traj.rtol)
        .f64("atol", traj.atol)
        .flag("hermitian", traj.hermitian)
        .flag("frozen_geometry", traj.frozen_geometry);
    let computed = cache.remember(&key, || {
        let point = match GainLossCoupling::new(gamma)
            .and_then(|g| integrate(g, &traj.to_options(), |_, _| true))
        {
            Ok(run) => TdPoint {
                gamma,
                t_d: run.t_d,
                error: None,
            },
            Err(e) => TdPoint {
                gamma,
                t_d: None,
                error: Some(e.to_string()),
            },
        };
        Ok(point)
    });
    computed.unwrap_or_else(|_| unreachable!("td point computation is infallible by construction"))
}

pub fn td_sweep(
    cache: &Cache,
    out: Option<&Path>,
    from: f64,
    to: f64,
    steps: usize,
    traj: &TrajectoryOpts,
) -> CliResult<()> {
    traj.validate()?;
    check_range("gamma", from, to, steps)?;
    if from <= 0.0 {
        return Err(CliError::Input(format!(
            "td-sweep needs gamma > 0, range starts at {from}"
        )));
    }
    let gammas = linspace(from, to, steps);
    let points = h2mol::exec::par_map(&gammas, |g| cached_td_point(cache, *g, traj));

    let mut text = String::from("gamma_Ry,T_D_hbar_per_Ry,error\n");
    for p in &points {
        text.push_str(&format!(
            "{},{},{}\n",
            fmt_f(p.gamma),
            fmt_opt(p.t_d),
            p.error.as_deref().map(csv_quote).unwrap_or_default()
        ));
    }

    let detected: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|p| p.t_d.map(|t| (p.gamma, t)))
        .collect();
    let (fit, fit_error) = match h2mol::fit_td(&detected) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let footer = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "t_max": traj.t_max,
        "n_points": points.len(),
        "n_detected": detected.len(),
        "fit": fit,
        "fit_error": fit_error,
    });
    text.push_str(&format!("# {footer}\n"));
    emit_text(out, &text)
}

/// The three special couplings of the equilibrium family.
#[derive(Serialize, serde::Deserialize)]
struct Thresholds {
    gamma_pt: f64,
    gamma_ms: f64,
    gamma_d: f64,
}

#[derive(Serialize)]
struct ThresholdsDoc {
    schema_version: u32,
    /// All in Ry: symmetry breaking at the equilibrium, zero dissociation
    /// energy, loss of the bound minimum.
    #[serde(flatten)]
    thresholds: Thresholds,
}

pub fn thresholds(cache: &Cache, out: Option<&Path>) -> CliResult<()> {
    let key = CacheKey::new("thresholds").f64("xtol", MIN_XTOL);
    let t = cache.remember(&key, || {
        Ok(Thresholds {
            gamma_pt: find_gamma_pt()?,
            gamma_ms: find_gamma_ms()?,
            gamma_d: find_gamma_d()?,
        })
    })?;
    emit_json(
        out,
        &ThresholdsDoc {
            schema_version: SCHEMA_VERSION,
            thresholds: t,
        },
    )
}

/// Morse block of the report, present only below the metastable onset.
#[derive(Serialize)]
struct MorseDoc {
    e_d_ry: f64,
    alpha_mo_inv_a0: f64,
    k_mo_ry_per_a0sq: f64,
    omega_mo_ry: f64,
}

/// `report --gamma`: one document collecting every equilibrium property
/// at a single coupling. Sections that do not exist at this coupling
/// (Morse past metastability, everything past breakup) are null.
#[derive(Serialize)]
struct ReportDoc {
    schema_version: u32,
    gamma_ry: f64,
    reduced_mass_me: f64,
    equilibrium: EquilibriumPoint,
    integrals_ry: Option<HubbardParams>,
    phonons: Option<PhononFit>,
    morse: Option<MorseDoc>,
    couplings_ry_per_a0: Option<CouplingSet>,
    rotational_b0_ry: Option<f64>,
    consistency: Option<PhononConsistency>,
}

pub fn report(cache: &Cache, out: Option<&Path>, gamma: f64) -> CliResult<()> {
    let eq = cached_equilibrium(cache, gamma)?;
    let bound = eq.r0.is_some();

    let (integrals, phonon, morse, coupling, b0, consistency) = if bound {
        let fit = cached_phonons(cache, gamma)?;
        let morse = match (fit.e_d_morse, fit.alpha_mo, fit.k_mo, fit.omega_mo) {
            (Some(e_d), Some(alpha_mo), Some(k_mo), Some(omega_mo)) => Some(MorseDoc {
                e_d_ry: e_d,
                alpha_mo_inv_a0: alpha_mo,
                k_mo_ry_per_a0sq: k_mo,
                omega_mo_ry: omega_mo,
            }),
            _ => None,
        };
        (
            Some(params_at(&eq)?),
            Some(fit),
            morse,
            Some(cached_couplings(cache, gamma)?),
            Some(rotational_constant(&eq)?),
            Some(PhononConsistency::from_fit(&fit)),
        )
    } else {
        (None, None, None, None, None, None)
    };

    emit_json(
        out,
        &ReportDoc {
            schema_version: SCHEMA_VERSION,
            gamma_ry: gamma,
            reduced_mass_me: REDUCED_MASS,
            equilibrium: eq,
            integrals_ry: integrals,
            phonons: phonon,
            morse,
            couplings_ry_per_a0: coupling,
            rotational_b0_ry: b0,
            consistency,
        },
    )
}
