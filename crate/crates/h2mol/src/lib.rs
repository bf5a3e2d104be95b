//! Hydrogen molecule coupled to an environment through balanced gain and
//! loss, in the two-site Hubbard description built from 1s Slater
//! orbitals.
//!
//! The pipeline, bottom to top:
//!
//! * [`integrals`] - closed-form Hubbard integrals (on-site energy, hop,
//!   on-site and inter-site repulsion, exchange, correlated hop) over
//!   orthogonalized orbitals at a given proton distance and orbital
//!   exponent, with an independent quadrature [`oracle`] for every form.
//! * [`spectrum`] - the six two-electron energies of the non-Hermitian
//!   dimer matrix, in closed form (quadratic plus depressed cubic) with a
//!   general eigensolver fallback, and the symmetry-phase classification.
//! * [`variational`] - nested optimization of the total energy over the
//!   orbital exponent and proton distance, equilibrium summaries vs the
//!   coupling, and the three special couplings: symmetry breaking at the
//!   equilibrium, zero dissociation energy, and loss of a bound minimum.
//! * [`vibrational`] - harmonic and anharmonic stiffness of the bond,
//!   vibrational ladders, rotational constants, and the per-integral
//!   sensitivities to bond stretch.
//! * [`dynamics`] - mean-field equations of motion for sixteen operator
//!   expectations, Hermitian and gain/loss forms, dissociation-time
//!   detection and the power-law-times-exponential fit of its decay.
//!
//! Energies are in Rydberg, lengths in Bohr radii, times in hbar/Ry.
//! Heavy sweeps go through [`exec`], which runs them on a thread pool
//! when the `parallel` feature (default) is enabled and sequentially
//! otherwise.

pub mod density;
pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod exec;
pub mod fock;
pub mod geometry;
pub mod integrals;
pub mod minimize;
pub mod ode;
pub mod oracle;
pub mod special;
pub mod spectrum;
pub mod variational;
pub mod vibrational;

pub use density::{density_grid, DensityGrid};
pub use dynamics::{
    fit_td, initial_state, integrate, mean_field_energy, rhs_hermitian, rhs_nonhermitian,
    td_sweep, DynamicsOptions, DynamicsRun, MeanFieldState, TdFit, TdPoint,
};
pub use error::{H2Error, Result};
pub use geometry::{GainLossCoupling, OrbitalGeometry};
pub use integrals::{hubbard_params, HubbardParams, WannierCoefficients};
pub use spectrum::{pt_phase, spectrum_closed_form, spectrum_numeric, DimerSpectrum};
pub use variational::{
    energy_curve, equilibrium, find_gamma_d, find_gamma_ms, find_gamma_pt, optimize_alpha,
    EnergyCurve, EquilibriumPoint, Stability,
};
pub use vibrational::{
    eph_couplings, harmonic_fit, morse_fit, phonon_fit, rotational_constant, rotational_levels,
    vibrational_levels, CouplingSet, PhononFit, VibrationalLevel,
};
