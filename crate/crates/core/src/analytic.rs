//! Closed-form splitting and bearing-strength formulas.
//!
//! Everything is SI (N, m, Pa) except [`eccentricity_strength`], which keeps
//! the regression's own units: eccentricity in mm, strength in MPa.

use crate::error::{Error, Result};

/// Coefficient of the cube splitting formula, rounded from `2 / pi`.
pub const CUBE_COEFFICIENT: f64 = 0.64;

/// Slope (MPa/mm) and intercept (MPa) of the strength-eccentricity fit.
pub const ECC_SLOPE: f64 = -0.1035;
pub const ECC_INTERCEPT: f64 = 25.226;
/// Coefficient of determination reported for the fit.
pub const ECC_R_SQUARED: f64 = 0.88;

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Input(format!("{name} must be positive, got {v}")))
    }
}

/// Uniform tensile stress on the loaded mid-plane of a splitting specimen,
/// `2 N / (pi d l)`. `d * l` is the area of the splitting plane (height times
/// length).
pub fn brazilian_stress(load: f64, height: f64, length: f64) -> Result<f64> {
    require_positive("height", height)?;
    require_positive("length", length)?;
    Ok(2.0 * load / (std::f64::consts::PI * height * length))
}

/// Splitting strength of a cube with rib `a`: `0.64 N / a^2`.
pub fn cube_splitting_strength(load: f64, rib: f64) -> Result<f64> {
    require_positive("rib", rib)?;
    Ok(CUBE_COEFFICIENT * load / (rib * rib))
}

/// Same as [`cube_splitting_strength`] with the exact `2 / pi` coefficient.
pub fn cube_splitting_strength_exact(load: f64, rib: f64) -> Result<f64> {
    brazilian_stress(load, rib, rib)
}

/// Overall strength `F / A` and contact stress `F / A_s`.
pub fn strength_ratios(f_ult: f64, area: f64, strip_area: f64) -> Result<(f64, f64)> {
    require_positive("specimen area", area)?;
    require_positive("strip area", strip_area)?;
    Ok((f_ult / area, f_ult / strip_area))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EccentricityStrength {
    /// Overall strength in MPa.
    pub strength_mpa: f64,
    /// Eccentricity lies outside the fitted range of non-negative values.
    pub extrapolated: bool,
}

/// Linear fit of overall strength (MPa) against strip eccentricity (mm). The
/// fit was made on one specimen geometry and material.
pub fn eccentricity_strength(ecc_mm: f64) -> EccentricityStrength {
    EccentricityStrength {
        strength_mpa: ECC_SLOPE * ecc_mm + ECC_INTERCEPT,
        extrapolated: ecc_mm < 0.0,
    }
}
