//! Outage bounds from the equi-correlated model.
//!
//! `F_eq(x; rho, N)` is the CDF of `max_n |h_n|^2` when all `N` complex
//! gains share the pairwise correlation `rho`. Raising every pairwise
//! correlation can only raise the CDF of the maximum, so the outage of a
//! general matrix lies between `F_eq` at its smallest and at its largest
//! off-diagonal magnitude.

use std::ops::Range;

use crate::error::{ensure_finite, FasError, Result};
use crate::fieldmodel::CorrMatrix;
use crate::specialfn::{gauss_legendre, marcum_q1};

/// Gauss–Legendre nodes per unit panel in [`equicorr_cdf_exact`].
pub const DEFAULT_PANEL_ORDER: usize = 8;

fn check_rho(rho: f64) -> Result<()> {
    ensure_finite("rho", rho)?;
    if !(0.0..1.0).contains(&rho) {
        return Err(FasError::Domain(format!("rho must be in [0, 1), got {rho}")));
    }
    Ok(())
}

fn check_args(x: f64, rho: f64, n: usize) -> Result<()> {
    ensure_finite("x", x)?;
    if x < 0.0 {
        return Err(FasError::Domain(format!("x must be >= 0, got {x}")));
    }
    if n == 0 {
        return Err(FasError::Config("port count must be >= 1".into()));
    }
    check_rho(rho)
}

/// Value of the alternating series together with a flag saying whether it
/// behaves like a CDF at this point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    /// False when `value` leaves `[0, 1]` or the `x -> inf` limit of the
    /// series (its `k = 0` term `1 / (1 - rho)`) is not 1.
    pub valid: bool,
}

/// `sum_{k=0}^{N} C(N,k) (-1)^k exp(-k x / (1 + (k-1) rho)) / (1 + (k-1) rho)`.
///
/// For `rho > 0` this is not normalised; use [`equicorr_cdf_exact`] for
/// bounds.
pub fn equicorr_cdf_series(x: f64, rho: f64, n: usize) -> Result<SeriesValue> {
    check_args(x, rho, n)?;
    let mut binom = 1.0;
    let mut sum = 0.0;
    for k in 0..=n {
        if k > 0 {
            binom *= (n + 1 - k) as f64 / k as f64;
        }
        let d = 1.0 + (k as f64 - 1.0) * rho;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binom * (-(k as f64) * x / d).exp() / d;
    }
    let limit = 1.0 / (1.0 - rho);
    let valid = (0.0..=1.0).contains(&sum) && (limit - 1.0).abs() < 1e-12;
    Ok(SeriesValue { value: sum, valid })
}

/// `E_t[(1 - Q1(sqrt(2 rho t / (1 - rho)), sqrt(2 x / (1 - rho))))^N]` with
/// `t ~ Exp(1)`, from `h_n = sqrt(rho) a + sqrt(1 - rho) w_n`.
///
/// The expectation is taken in the Rician parameter
/// `a = sqrt(2 rho t / (1 - rho))`, where the conditional CDF switches from
/// 1 to 0 over a unit-width window around `a = b` for every `rho`, using a
/// composite Gauss–Legendre rule with `panel_order` nodes per panel of
/// width at most one.
pub fn equicorr_cdf_exact(x: f64, rho: f64, n: usize, panel_order: usize) -> Result<f64> {
    check_args(x, rho, n)?;
    if rho == 0.0 {
        return Ok((-(-x).exp_m1()).powi(n as i32));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let rule = gauss_legendre(panel_order)?;
    let b = (2.0 * x / (1.0 - rho)).sqrt();
    // t = c a^2, dt e^{-t} = 2 c a e^{-c a^2} da.
    let c = (1.0 - rho) / (2.0 * rho);
    // Beyond a_max either the mixing density or the conditional CDF has
    // vanished; panels also resolve the density's own scale 1/sqrt(c).
    let a_max = (b + 12.0).min((EXP_TAIL / c).sqrt());
    let width = 1.0f64.min(0.5 / c.sqrt());
    let panels = (a_max / width).ceil().max(1.0) as usize;
    let width = a_max / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let left = p as f64 * width;
        for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
            let a = left + 0.5 * width * (u + 1.0);
            let density = 2.0 * c * a * (-c * a * a).exp();
            if density == 0.0 {
                continue;
            }
            let cdf = 1.0 - marcum_q1(a, b)?;
            sum += 0.5 * width * w * density * cdf.powi(n as i32);
        }
    }
    Ok(sum.clamp(0.0, 1.0))
}

/// Truncation point of the `Exp(1)` mixing variable.
const EXP_TAIL: f64 = 45.0;

/// Extremes of the off-diagonal correlation magnitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationExtremes {
    pub rho_min: f64,
    pub rho_max: f64,
    pub rho_avg: f64,
}

pub fn rho_extremes(r: &CorrMatrix) -> Result<CorrelationExtremes> {
    let n = r.dim();
    if n < 2 {
        return Err(FasError::Config("correlation extremes need at least 2 ports".into()));
    }
    let (mut lo, mut hi, mut sum) = (f64::INFINITY, 0.0f64, 0.0);
    for i in 0..n {
        for j in 0..i {
            let v = r.get(i, j).abs();
            lo = lo.min(v);
            hi = hi.max(v);
            sum += v;
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    Ok(CorrelationExtremes {
        rho_min: lo.min(1.0),
        rho_max: hi.min(1.0),
        rho_avg: (sum / pairs).min(1.0),
    })
}

/// Clamps a correlation magnitude into the domain of `F_eq`.
fn eq_rho(rho: f64) -> f64 {
    rho.min(1.0 - 1e-12)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichBounds {
    /// `F_eq(x; rho_min, N)`.
    pub lower: f64,
    /// `F_eq(x; rho_max, N)`.
    pub upper: f64,
    pub extremes: CorrelationExtremes,
}

/// Two-sided outage bounds from the weakest and strongest pairwise
/// correlation.
pub fn slepian_sandwich(r: &CorrMatrix, x: f64, quad_points: usize) -> Result<SandwichBounds> {
    ensure_finite("x", x)?;
    if x <= 0.0 {
        return Err(FasError::Domain(format!("x must be > 0, got {x}")));
    }
    let ext = rho_extremes(r)?;
    let n = r.dim();
    let lower = equicorr_cdf_exact(x, eq_rho(ext.rho_min), n, quad_points)?;
    let upper = equicorr_cdf_exact(x, eq_rho(ext.rho_max), n, quad_points)?;
    Ok(SandwichBounds {
        lower: lower.min(upper),
        upper: upper.max(lower),
        extremes: ext,
    })
}

/// Contiguous near-equal partition of the ports.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPartition {
    pub blocks: Vec<Range<usize>>,
    /// Smallest in-block correlation magnitude; 0 for singleton blocks.
    pub rho_block_min: Vec<f64>,
    /// Largest correlation magnitude between ports of different blocks.
    pub rho_cross_max: f64,
    /// Whether `rho_cross_max <= min_b rho_block_min`.
    pub valid: bool,
}

impl BlockPartition {
    /// Sizes differ by at most one; the remainder goes to the leading blocks.
    pub fn new(r: &CorrMatrix, count: usize) -> Result<Self> {
        let n = r.dim();
        if count == 0 || count > n {
            return Err(FasError::Config(format!("block count must be in 1..={n}, got {count}")));
        }
        let (base, extra) = (n / count, n % count);
        let mut blocks = Vec::with_capacity(count);
        let mut start = 0;
        for b in 0..count {
            let len = base + usize::from(b < extra);
            blocks.push(start..start + len);
            start += len;
        }
        let rho_block_min: Vec<f64> = blocks
            .iter()
            .map(|blk| {
                let mut m = f64::INFINITY;
                for i in blk.clone() {
                    for j in blk.start..i {
                        m = m.min(r.get(i, j).abs());
                    }
                }
                if m.is_finite() {
                    m
                } else {
                    0.0
                }
            })
            .collect();
        let mut rho_cross_max = 0.0f64;
        for (bi, blk) in blocks.iter().enumerate() {
            for other in &blocks[..bi] {
                for i in blk.clone() {
                    for j in other.clone() {
                        rho_cross_max = rho_cross_max.max(r.get(i, j).abs());
                    }
                }
            }
        }
        let floor = rho_block_min.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(BlockPartition {
            valid: rho_cross_max <= floor,
            blocks,
            rho_block_min,
            rho_cross_max,
        })
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// `prod_b F_eq(x; rho_b_min, N_b)` over a `count`-block partition. The
/// partition's `valid` flag reports whether the block condition holds; the
/// product is returned either way.
pub fn block_refined_bound(
    r: &CorrMatrix,
    x: f64,
    count: usize,
    quad_points: usize,
) -> Result<(f64, BlockPartition)> {
    ensure_finite("x", x)?;
    if x <= 0.0 {
        return Err(FasError::Domain(format!("x must be > 0, got {x}")));
    }
    let part = BlockPartition::new(r, count)?;
    let mut bound = 1.0;
    for (blk, &rho) in part.blocks.iter().zip(&part.rho_block_min) {
        bound *= equicorr_cdf_exact(x, eq_rho(rho), blk.len(), quad_points)?;
    }
    Ok((bound, part))
}
