//! Effective degrees of freedom of a port correlation matrix.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{ensure_finite, FasError, Result};
use crate::fieldmodel::{eigendecompose, CorrMatrix, EigenSpectrum};
use crate::kernels::CorrelationModel;

/// `N^2 / sum_{m,n} R_{mn}^2`, the participation ratio of the spectrum.
pub fn participation_ratio(r: &CorrMatrix) -> f64 {
    let n = r.dim() as f64;
    let frob_sq: f64 = r.entries().as_slice().iter().map(|v| v * v).sum();
    n * n / frob_sq
}

/// Which large-aperture form to use for the Jakes kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JakesDof {
    /// `2W + 1`.
    #[default]
    Continuous,
    /// `2 ceil(W) + 1`.
    Ceil,
}

/// Large-`N` degrees of freedom: `pi sqrt(2) W` for the Gaussian kernel,
/// `2W + 1` (or `2 ceil(W) + 1`) for Jakes.
pub fn keff_asymptotic(model: CorrelationModel, w: f64, jakes: JakesDof) -> Result<f64> {
    ensure_finite("W", w)?;
    if w <= 0.0 {
        return Err(FasError::Domain(format!("aperture must be > 0, got {w}")));
    }
    Ok(match (model, jakes) {
        (CorrelationModel::Gaussian, _) => PI * SQRT_2 * w,
        (CorrelationModel::Jakes, JakesDof::Continuous) => 2.0 * w + 1.0,
        (CorrelationModel::Jakes, JakesDof::Ceil) => 2.0 * w.ceil() + 1.0,
    })
}

/// Smallest `K` with `sum_{k <= K} lambda_k >= (1 - eps0) N`.
pub fn energy_threshold_k(spec: &EigenSpectrum, eps0: f64) -> Result<usize> {
    ensure_finite("eps0", eps0)?;
    if !(eps0 > 0.0 && eps0 < 1.0) {
        return Err(FasError::Domain(format!("eps0 must be in (0, 1), got {eps0}")));
    }
    let n = spec.dim();
    // Trace of a unit-diagonal matrix, relaxed by round-off in the spectrum.
    let target = (1.0 - eps0) * n as f64 - 1e-12 * n as f64;
    let mut acc = 0.0;
    for (k, &l) in spec.eigenvalues.iter().enumerate() {
        acc += l;
        if acc >= target {
            return Ok(k + 1);
        }
    }
    Ok(n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DofReport {
    pub participation_ratio: f64,
    pub asymptotic_keff: f64,
    pub energy_threshold_k: usize,
    pub epsilon0: f64,
}

impl DofReport {
    /// Needs a matrix built from an aperture configuration, which supplies
    /// the model and `W` for the asymptotic value.
    pub fn compute(r: &CorrMatrix, eps0: f64, jakes: JakesDof) -> Result<Self> {
        let src = r.source().ok_or_else(|| {
            FasError::Config("DoF report needs a matrix built from an aperture".into())
        })?;
        let spec = eigendecompose(r)?;
        Ok(DofReport {
            participation_ratio: participation_ratio(r),
            asymptotic_keff: keff_asymptotic(src.model, src.aperture, jakes)?,
            energy_threshold_k: energy_threshold_k(&spec, eps0)?,
            epsilon0: eps0,
        })
    }
}
