//! Molecular geometry and environment-coupling value types.
//!
//! Everything downstream is parameterized by two positive numbers: the
//! inter-proton distance `R` (Bohr radii) and the shared Slater exponent
//! `alpha` (inverse Bohr radii) of the two 1s orbitals. Their product
//! `rho = alpha * R` is the only combination the dimensionless two-center
//! integrals depend on. The gain/loss strength `gamma` (Ry) enters the
//! electronic problem as +i*gamma on site 1 and -i*gamma on site 2.

use serde::{Deserialize, Serialize};

use crate::error::{H2Error, Result};

/// Two-proton geometry plus the variational orbital exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitalGeometry {
    /// Inter-proton distance in Bohr radii. Strictly positive.
    pub r: f64,
    /// Slater 1s exponent in inverse Bohr radii. Strictly positive.
    pub alpha: f64,
}

impl OrbitalGeometry {
    /// Validates and builds a geometry.
    ///
    /// # Arguments
    /// * `r` - inter-proton distance, must be finite and > 0
    /// * `alpha` - orbital exponent, must be finite and > 0
    ///
    /// # Returns
    /// The geometry, or `InvalidInput` describing the offending value.
    pub fn new(r: f64, alpha: f64) -> Result<Self> {
        if !r.is_finite() || r <= 0.0 {
            return Err(H2Error::InvalidInput(format!(
                "inter-proton distance R must be finite and positive, got {r}"
            )));
        }
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(H2Error::InvalidInput(format!(
                "orbital exponent alpha must be finite and positive, got {alpha}"
            )));
        }
        Ok(Self { r, alpha })
    }

    /// Dimensionless separation `rho = alpha * R`.
    pub fn rho(&self) -> f64 {
        self.alpha * self.r
    }
}

/// Balanced gain/loss strength. Only the magnitude matters physically
/// (the spectrum is invariant under gamma -> -gamma), so negative input is
/// rejected rather than silently folded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainLossCoupling {
    gamma: f64,
}

impl GainLossCoupling {
    /// Validates and wraps a coupling strength.
    ///
    /// # Arguments
    /// * `gamma` - gain/loss strength in Ry, must be finite and >= 0
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(H2Error::InvalidInput(format!(
                "gain/loss strength gamma must be finite and non-negative, got {gamma}; \
                 negative gamma maps to the same spectrum by symmetry"
            )));
        }
        Ok(Self { gamma })
    }

    /// The wrapped strength in Ry.
    pub fn value(&self) -> f64 {
        self.gamma
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_rejects_nonpositive_and_nonfinite() {
        assert!(OrbitalGeometry::new(0.0, 1.0).is_err());
        assert!(OrbitalGeometry::new(-1.0, 1.0).is_err());
        assert!(OrbitalGeometry::new(1.0, 0.0).is_err());
        assert!(OrbitalGeometry::new(1.0, -0.5).is_err());
        assert!(OrbitalGeometry::new(f64::NAN, 1.0).is_err());
        assert!(OrbitalGeometry::new(1.0, f64::INFINITY).is_err());
        assert!(OrbitalGeometry::new(1.41968, 1.199206).is_ok());
    }

    #[test]
    fn rho_is_product() {
        let g = OrbitalGeometry::new(1.41968, 1.199206).unwrap();
        assert!((g.rho() - 1.41968 * 1.199206).abs() < 1e-15);
    }

    #[test]
    fn coupling_rejects_negative() {
        assert!(GainLossCoupling::new(-0.1).is_err());
        assert!(GainLossCoupling::new(f64::NAN).is_err());
        assert_eq!(GainLossCoupling::new(0.3).unwrap().value(), 0.3);
    }
}
