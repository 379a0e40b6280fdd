//! Spatial correlation kernels and their spectral properties.
//!
//! Two isotropic kernels are supported, parameterised by port separation
//! `delta` in wavelengths:
//!
//! * Jakes: `rho(delta) = J0(2 pi |delta|)`, PSD `1/(pi sqrt(1 - f^2))` on `|f| < 1`.
//! * Gaussian: `rho(delta) = exp(-pi^2 delta^2)`, PSD `exp(-f^2)/sqrt(pi)`.
//!
//! The Gaussian PSD is normalised so that it integrates to `rho(0) = 1`.
//! Its second spectral moment then reproduces `-rho''(0) = 2 pi^2`, the same
//! value as Jakes.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{ensure_finite, FasError, Result};
use crate::integrate::adaptive_simpson;
use crate::specialfn::{bessel_j0, erf, SQRT_PI};

/// Coefficient of the quartic error bound, `pi^4 / 4`.
pub const QUARTIC_BOUND_COEFF: f64 = PI * PI * PI * PI / 4.0;

/// Separation below which the quartic bound is guaranteed.
pub const QUARTIC_BOUND_RANGE: f64 = 0.30;

/// Spatial correlation model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrelationModel {
    Jakes,
    Gaussian,
}

impl CorrelationModel {
    pub const ALL: [CorrelationModel; 2] = [CorrelationModel::Jakes, CorrelationModel::Gaussian];

    pub fn name(self) -> &'static str {
        match self {
            CorrelationModel::Jakes => "jakes",
            CorrelationModel::Gaussian => "gauss",
        }
    }
}

impl fmt::Display for CorrelationModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CorrelationModel {
    type Err = FasError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jakes" | "j" => Ok(CorrelationModel::Jakes),
            "gauss" | "gaussian" | "g" => Ok(CorrelationModel::Gaussian),
            other => Err(FasError::Config(format!("unknown correlation model '{other}'"))),
        }
    }
}

/// Correlation between two points `delta` wavelengths apart.
pub fn correlation(model: CorrelationModel, delta: f64) -> Result<f64> {
    ensure_finite("delta", delta)?;
    match model {
        CorrelationModel::Jakes => bessel_j0(2.0 * PI * delta.abs()),
        CorrelationModel::Gaussian => Ok((-PI * PI * delta * delta).exp()),
    }
}

/// Pointwise gap between the Jakes and Gaussian kernels together with the
/// quartic bound `pi^4 delta^4 / 4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxError {
    pub actual: f64,
    pub bound: f64,
}

impl ApproxError {
    /// Whether the bound is guaranteed at this separation.
    pub fn bound_applies(delta: f64) -> bool {
        (0.0..=QUARTIC_BOUND_RANGE).contains(&delta)
    }
}

pub fn approx_error(delta: f64) -> Result<ApproxError> {
    ensure_finite("delta", delta)?;
    if delta < 0.0 {
        return Err(FasError::Domain(format!("delta must be >= 0, got {delta}")));
    }
    let jakes = correlation(CorrelationModel::Jakes, delta)?;
    let gauss = correlation(CorrelationModel::Gaussian, delta)?;
    Ok(ApproxError {
        actual: (jakes - gauss).abs(),
        bound: QUARTIC_BOUND_COEFF * delta.powi(4),
    })
}

/// Largest kernel gap over `points` equally spaced separations in `[0, upper]`.
pub fn max_approx_error(upper: f64, points: usize) -> Result<(f64, f64)> {
    let mut best = (0.0, 0.0);
    for i in 0..points {
        let delta = upper * i as f64 / (points - 1).max(1) as f64;
        let e = approx_error(delta)?;
        if e.actual > best.1 {
            best = (delta, e.actual);
        }
    }
    Ok(best)
}

/// Power spectral density at spatial frequency `f` (cycles per wavelength).
pub fn psd(model: CorrelationModel, f: f64) -> Result<f64> {
    ensure_finite("f", f)?;
    match model {
        CorrelationModel::Jakes => {
            let af = f.abs();
            if af > 1.0 {
                Ok(0.0)
            } else if af == 1.0 {
                Err(FasError::Singularity("Jakes PSD diverges at |f| = 1".into()))
            } else {
                Ok(1.0 / (PI * (1.0 - f * f).sqrt()))
            }
        }
        CorrelationModel::Gaussian => Ok((-f * f).exp() / SQRT_PI),
    }
}

/// Integral of `g(f) S(f)` over the real line. Jakes uses `f = sin(theta)` to
/// absorb the endpoint singularities; the Gaussian tail beyond `|f| = 12` is
/// below double precision.
pub fn spectral_integral<G: Fn(f64) -> f64>(model: CorrelationModel, g: G, tol: f64) -> f64 {
    match model {
        CorrelationModel::Jakes => {
            adaptive_simpson(|theta| g(theta.sin()) / PI, -FRAC_PI_2, FRAC_PI_2, tol)
        }
        CorrelationModel::Gaussian => {
            // Unit panels so the recursion never sees a locally flat sample set.
            let s = |f: f64| g(f) * (-f * f).exp() / SQRT_PI;
            (-12..12)
                .map(|k| adaptive_simpson(s, k as f64, (k + 1) as f64, tol / 24.0))
                .sum()
        }
    }
}

/// Fraction of Gaussian spectral mass outside the Jakes band, `1 - erf(1)`.
pub fn spectral_leakage() -> f64 {
    1.0 - erf(1.0).expect("erf(1) is finite")
}

/// Same quantity as [`spectral_leakage`], from a numeric integral of the PSD
/// over `[-1, 1]`.
pub fn spectral_leakage_numeric() -> f64 {
    let inside = adaptive_simpson(
        |f| psd(CorrelationModel::Gaussian, f).unwrap_or(0.0),
        -1.0,
        1.0,
        1e-13,
    );
    1.0 - inside
}

/// Second spectral moment `lambda2 = -rho''(0)`. Both kernels give `2 pi^2`.
pub fn second_spectral_moment(_model: CorrelationModel) -> f64 {
    2.0 * PI * PI
}

/// `-rho''(0)` by a central second difference with step `h`.
pub fn second_moment_finite_difference(model: CorrelationModel, h: f64) -> Result<f64> {
    let r0 = correlation(model, 0.0)?;
    let rp = correlation(model, h)?;
    let rm = correlation(model, -h)?;
    Ok(-(rp - 2.0 * r0 + rm) / (h * h))
}

/// `int (2 pi f)^2 S(f) df`.
pub fn second_moment_spectral(model: CorrelationModel) -> f64 {
    spectral_integral(model, |f| (2.0 * PI * f).powi(2), 1e-12)
}

/// Local structure parameters of a kernel near the origin:
/// `rho(delta) = 1 - c |delta|^alpha + o(|delta|^alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumParams {
    pub lambda2: f64,
    pub local_coeff_c: f64,
    pub local_exponent_alpha: f64,
    pub pickands_h: f64,
}

impl ContinuumParams {
    pub fn for_model(model: CorrelationModel) -> Self {
        // Both kernels expand as 1 - pi^2 delta^2 + O(delta^4).
        ContinuumParams {
            lambda2: second_spectral_moment(model),
            local_coeff_c: PI * PI,
            local_exponent_alpha: 2.0,
            pickands_h: 1.0 / SQRT_PI,
        }
    }
}
