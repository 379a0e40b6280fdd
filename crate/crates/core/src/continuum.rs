//! Continuous-aperture asymptotics for `sup_{tau in [0, W]} |g(tau)|^2`.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use crate::error::{ensure_finite, FasError, Result};
use crate::kernels::ContinuumParams;

/// Above this threshold the deep-tail (Piterbarg) form is the better guide.
pub const DEEP_REGIME_X: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Moderate,
    Deep,
}

impl Regime {
    pub fn for_threshold(x: f64) -> Self {
        if x >= DEEP_REGIME_X {
            Regime::Deep
        } else {
            Regime::Moderate
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::Moderate => "moderate",
            Regime::Deep => "deep",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An asymptotic probability clipped to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumResult {
    pub value: f64,
    pub raw: f64,
    pub clamped: bool,
    pub regime_hint: Regime,
}

impl ContinuumResult {
    fn new(raw: f64, level: f64) -> Self {
        let value = raw.clamp(0.0, 1.0);
        ContinuumResult {
            value,
            raw,
            clamped: value != raw,
            regime_hint: Regime::for_threshold(level),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    ensure_finite(name, v)?;
    if v <= 0.0 {
        return Err(FasError::Domain(format!("{name} must be > 0, got {v}")));
    }
    Ok(())
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    ensure_finite(name, v)?;
    if v < 0.0 {
        return Err(FasError::Domain(format!("{name} must be >= 0, got {v}")));
    }
    Ok(())
}

/// `e^{-u} (1 + W sqrt(lambda2) u)`.
pub fn exceedance_adler_taylor(u: f64, w: f64, lambda2: f64) -> Result<ContinuumResult> {
    positive("u", u)?;
    non_negative("W", w)?;
    positive("lambda2", lambda2)?;
    Ok(ContinuumResult::new((-u).exp() * (1.0 + w * lambda2.sqrt() * u), u))
}

/// `1 - e^{-x} (1 + pi sqrt(2) W x)`, the complement of the clipped
/// exceedance with `lambda2 = 2 pi^2`.
pub fn outage_continuous(x: f64, w: f64) -> Result<ContinuumResult> {
    let exc = exceedance_adler_taylor(x, w, 2.0 * PI * PI)?;
    Ok(ContinuumResult {
        value: 1.0 - exc.value,
        raw: 1.0 - exc.raw,
        clamped: exc.clamped,
        regime_hint: exc.regime_hint,
    })
}

/// Mean upcrossing rate of level `u` per unit length,
/// `sqrt(lambda2 / (2 pi)) u e^{-u}`.
pub fn rice_upcrossing_rate(u: f64, lambda2: f64) -> Result<f64> {
    positive("u", u)?;
    positive("lambda2", lambda2)?;
    Ok((lambda2 / (2.0 * PI)).sqrt() * u * (-u).exp())
}

/// `H_alpha c^{1/alpha} W u^{1/alpha} e^{-u}`.
pub fn exceedance_piterbarg(u: f64, w: f64, params: &ContinuumParams) -> Result<ContinuumResult> {
    positive("u", u)?;
    positive("W", w)?;
    let alpha = params.local_exponent_alpha;
    ensure_finite("alpha", alpha)?;
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(FasError::Domain(format!("alpha must be in (0, 2], got {alpha}")));
    }
    positive("c", params.local_coeff_c)?;
    positive("H", params.pickands_h)?;
    let inv = 1.0 / alpha;
    let raw = params.pickands_h * params.local_coeff_c.powf(inv) * w * u.powf(inv) * (-u).exp();
    Ok(ContinuumResult::new(raw, u))
}

/// Pointwise exceedance plus expected upcrossings,
/// `e^{-u} + W sqrt(lambda2 / (2 pi)) u e^{-u}`.
pub fn exceedance_crossing_heuristic(u: f64, w: f64, lambda2: f64) -> Result<ContinuumResult> {
    non_negative("W", w)?;
    let rate = rice_upcrossing_rate(u, lambda2)?;
    Ok(ContinuumResult::new((-u).exp() + w * rate, u))
}

/// `1 + pi sqrt(2) W x`.
pub fn n_eff(x: f64, w: f64) -> Result<f64> {
    positive("x", x)?;
    non_negative("W", w)?;
    Ok(1.0 + PI * SQRT_2 * w * x)
}
