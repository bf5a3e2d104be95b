//! Error type shared by every module of the crate.
//!
//! Failures split into two families: invalid requests (bad geometry, domain
//! refusals, malformed fit input) and numerical failures (an iteration that
//! did not reach its target). Callers that drive sweeps usually log the
//! numerical family per point and keep going; invalid requests abort.

use thiserror::Error;

/// Crate-wide error enumeration.
#[derive(Debug, Error)]
pub enum H2Error {
    /// A caller-supplied value is outside the physical domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Orbital overlap reached 1; the two-orbital basis collapses to one
    /// function and the orthogonalized pair is undefined.
    #[error("degenerate orbital basis: overlap S = {s} is not below 1")]
    DegenerateBasis { s: f64 },

    /// Panel refinement stalled above the requested accuracy. The best value
    /// and its error estimate are carried so callers can still inspect them.
    #[error(
        "quadrature accuracy {achieved:.3e} misses target {target:.3e} (best value {best:.15e})"
    )]
    QuadratureAccuracy {
        best: f64,
        achieved: f64,
        target: f64,
    },

    /// The QR iteration failed to deflate every eigenvalue.
    #[error("eigenvalue iteration did not converge within {sweeps} sweeps")]
    EigenConvergence { sweeps: usize },

    /// A scalar minimization found nothing below both bracket endpoints.
    #[error(
        "no interior minimum in ({lo}, {hi}): f(lo) = {f_lo:.9}, f(hi) = {f_hi:.9}, \
         best interior f = {f_best:.9}"
    )]
    NoInteriorMinimum {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
        f_best: f64,
    },

    /// A root finder was handed a bracket without a sign change, or failed
    /// to build one by scanning.
    #[error("bracket failure: {0}")]
    BracketFailure(String),

    /// Second derivative of the energy at the reported minimum came out
    /// non-positive; no harmonic frequency exists there.
    #[error("negative curvature k = {k:.6e} at R0 = {r0:.6}: no bound vibration")]
    NegativeCurvature { k: f64, r0: f64 },

    /// Morse fits require a positive dissociation energy, which fails at and
    /// beyond the metastability threshold.
    #[error(
        "Morse fit refused at gamma = {gamma}: dissociation energy {e_diss:.6e} is not positive"
    )]
    MorseDomain { gamma: f64, e_diss: f64 },

    /// The adaptive integrator shrank its step below the useful resolution.
    /// `t_last` is the last time that was still integrated successfully.
    #[error("ODE step size underflow at T = {t_last:.9e} (step {h:.3e})")]
    StepUnderflow { t_last: f64, h: f64 },

    /// A least-squares normal system was singular to working precision.
    #[error("rank-deficient fit: {0}")]
    RankDeficient(String),
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, H2Error>;
