//! Outage and ergodic rate of the rank-`K` Karhunen–Loève model
//! `g_n = sum_k sqrt(lambda_k) u_{n,k} z_k` with i.i.d. standard complex
//! normal `z_k`.

use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;

use crate::error::{ensure_finite, FasError, Result};
use crate::estimate::{Method, OutageEstimate};
use crate::fieldmodel::{kl_truncate, EigenSpectrum};
use crate::matrix::Matrix;
use crate::specialfn::{
    erf, exp_integral_e1_scaled, gauss_hermite, gauss_legendre, QuadratureRule, SQRT_PI,
};

pub const DEFAULT_QUAD_ORDER: usize = 24;
pub const DEFAULT_INNER_GRID: usize = 200;
/// Largest rank handled by tensor-grid quadrature.
pub const MAX_TENSOR_RANK: usize = 4;
/// Second-mode entries below this magnitude are treated as zero.
pub const DEGENERATE_MODE_TOL: f64 = 1e-12;
/// Sub-grids whose total probability mass is below this are skipped.
pub const PRUNE_MASS: f64 = 1e-14;

/// Operating point expressed in dB, with the normalised threshold
/// `x = 10^((threshold_db - avg_snr_db) / 10)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSpec {
    pub avg_snr_db: f64,
    pub threshold_db: f64,
    pub x: f64,
}

impl ThresholdSpec {
    pub fn new(avg_snr_db: f64, threshold_db: f64) -> Result<Self> {
        ensure_finite("avg_snr_db", avg_snr_db)?;
        ensure_finite("threshold_db", threshold_db)?;
        let x = 10f64.powf((threshold_db - avg_snr_db) / 10.0);
        if !(x > 0.0 && x.is_finite()) {
            return Err(FasError::Domain(format!(
                "normalised threshold out of range for {threshold_db} dB over {avg_snr_db} dB"
            )));
        }
        Ok(ThresholdSpec {
            avg_snr_db,
            threshold_db,
            x,
        })
    }

    pub fn avg_snr_linear(&self) -> f64 {
        10f64.powf(self.avg_snr_db / 10.0)
    }
}

fn check_threshold(x: f64) -> Result<()> {
    ensure_finite("x", x)?;
    if x <= 0.0 {
        return Err(FasError::Domain(format!("threshold x must be > 0, got {x}")));
    }
    Ok(())
}

/// `1 - exp(-x / (lambda1 c1))`.
pub fn outage_rank1(spec: &EigenSpectrum, x: f64) -> Result<OutageEstimate> {
    check_threshold(x)?;
    let g = spec.rank1_params().gain();
    Ok(OutageEstimate::analytic(-(-x / g).exp_m1(), Method::Rank1))
}

/// `e^beta E1(beta) / ln 2` with `beta = 1 / (avg_snr lambda1 c1)`.
pub fn ergodic_rate_rank1(spec: &EigenSpectrum, avg_snr: f64) -> Result<f64> {
    ensure_finite("avg_snr", avg_snr)?;
    if avg_snr <= 0.0 {
        return Err(FasError::Domain(format!("average SNR must be > 0, got {avg_snr}")));
    }
    let beta = 1.0 / (avg_snr * spec.rank1_params().gain());
    Ok(exp_integral_e1_scaled(beta)? / LN_2)
}

/// Rank-2 outage `E_{z1}[P(z2 in all disks | z1)]` where port `n`
/// contributes the disk `|a_n z1 + b_n z2|^2 < x`.
///
/// With real mixing coefficients the conditional probability depends on
/// `z1` only through `s = |z1|^2 ~ Exp(1)`, so the outer average is the
/// 1-D integral `int_0^{s*} e^{-s} P(sqrt(s)) ds` over the exact support
/// `[0, s*)` on which the disks still intersect. It is evaluated with a
/// `quad_order`-point Gauss–Legendre rule in `v = 1 - e^{-s}`. The inner
/// probability is integrated in closed form along `Re z2` and with an
/// `inner_grid`-point midpoint rule in `theta` along `Im z2 = r sin(theta)`.
pub fn outage_rank2(
    spec: &EigenSpectrum,
    x: f64,
    quad_order: usize,
    inner_grid: usize,
) -> Result<OutageEstimate> {
    check_threshold(x)?;
    let n = spec.dim();
    if n < 2 {
        return Err(FasError::Config("rank-2 outage needs at least 2 ports".into()));
    }
    if inner_grid == 0 {
        return Err(FasError::Config("inner grid must have at least 1 point".into()));
    }
    let kl = kl_truncate(spec, 2)?;
    let m = kl.mixing_matrix();
    let a: Vec<f64> = (0..n).map(|i| m[(i, 0)]).collect();
    let b: Vec<f64> = (0..n).map(|i| m[(i, 1)]).collect();
    let p = rank2_from_coeffs(&a, &b, x, quad_order, inner_grid)?;
    Ok(OutageEstimate::analytic(p, Method::Rank2))
}

/// Beyond this value of `|z1|^2` the remaining mass `e^{-s}` is negligible.
const RADIAL_CAP: f64 = 60.0;

/// Disks of the rank-2 model for `z1 = r` real: centre `k_n r` on the real
/// axis and radius `rho_n`, plus the `|a_n|` of degenerate ports.
struct DiskFamily {
    slopes: Vec<f64>,
    radii: Vec<f64>,
    degenerate: Vec<f64>,
}

impl DiskFamily {
    fn new(a: &[f64], b: &[f64], x: f64) -> Self {
        let mut fam = DiskFamily {
            slopes: Vec::new(),
            radii: Vec::new(),
            degenerate: Vec::new(),
        };
        for (&an, &bn) in a.iter().zip(b) {
            if bn.abs() < DEGENERATE_MODE_TOL {
                fam.degenerate.push(an.abs());
            } else {
                fam.slopes.push(-an / bn);
                fam.radii.push(x.sqrt() / bn.abs());
            }
        }
        fam
    }

    /// Largest `r` for which the conditional probability is positive.
    /// Collinear disks intersect iff their diameters along the axis do.
    fn support(&self, x: f64) -> f64 {
        let mut r_max = f64::INFINITY;
        for &a in &self.degenerate {
            if a > 0.0 {
                r_max = r_max.min(x.sqrt() / a);
            }
        }
        for i in 0..self.slopes.len() {
            for j in 0..i {
                let gap = (self.slopes[i] - self.slopes[j]).abs();
                if gap > 0.0 {
                    r_max = r_max.min((self.radii[i] + self.radii[j]) / gap);
                }
            }
        }
        r_max
    }

    fn conditional(&self, r: f64, inner_grid: usize) -> Result<f64> {
        if self.slopes.is_empty() {
            return Ok(1.0);
        }
        let rho_min = self.radii.iter().cloned().fold(f64::INFINITY, f64::min);
        let dtheta = 0.5 * PI / inner_grid as f64;
        let mut sum = 0.0;
        for j in 0..inner_grid {
            let theta = (j as f64 + 0.5) * dtheta;
            let y = rho_min * theta.sin();
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for (&k, &rho) in self.slopes.iter().zip(&self.radii) {
                let h = (rho * rho - y * y).max(0.0).sqrt();
                lo = lo.max(k * r - h);
                hi = hi.min(k * r + h);
            }
            if lo < hi {
                let strip = 0.5 * SQRT_PI * (erf(hi)? - erf(lo)?);
                sum += (-y * y).exp() * strip * rho_min * theta.cos();
            }
        }
        // Symmetric in Im z2; density 1/pi.
        Ok(2.0 * sum * dtheta / PI)
    }
}

pub(crate) fn rank2_from_coeffs(
    a: &[f64],
    b: &[f64],
    x: f64,
    quad_order: usize,
    inner_grid: usize,
) -> Result<f64> {
    let fam = DiskFamily::new(a, b, x);
    let r_max = fam.support(x);
    let s_max = (r_max * r_max).min(RADIAL_CAP);
    let v_max = -(-s_max).exp_m1();
    let gl = gauss_legendre(quad_order)?;
    let mut total = 0.0;
    for (&t, &w) in gl.nodes.iter().zip(&gl.weights) {
        let v = 0.5 * v_max * (t + 1.0);
        let r = (-(-v).ln_1p()).sqrt();
        total += w * fam.conditional(r, inner_grid)?;
    }
    Ok(0.5 * v_max * total)
}

/// Rank-`K` outage by a `Q^(2K)` tensor Gauss–Hermite rule applied to the
/// product indicator, with prefactor `1 / pi^K`.
///
/// The innermost dimension is summed exactly over the node interval on
/// which every port satisfies the threshold, and sub-grids carrying less
/// than [`PRUNE_MASS`] probability are skipped.
pub fn outage_rank_k(
    spec: &EigenSpectrum,
    k: usize,
    x: f64,
    quad_order: usize,
) -> Result<OutageEstimate> {
    check_threshold(x)?;
    if k == 0 {
        return Err(FasError::Config("KL rank must be >= 1".into()));
    }
    if k > MAX_TENSOR_RANK {
        return Err(FasError::Config(format!(
            "tensor quadrature supports K <= {MAX_TENSOR_RANK}, got {k}; \
             use the truncated-model Monte Carlo estimator instead"
        )));
    }
    let kl = kl_truncate(spec, k)?;
    let gh = gauss_hermite(quad_order)?;
    let p = tensor_outage(&kl.mixing_matrix(), x, &gh);
    Ok(OutageEstimate::analytic(p, Method::RankK))
}

struct TensorGrid<'a> {
    /// Mixing coefficients stored per mode: `coeff[k][n]`.
    coeff: Vec<Vec<f64>>,
    gh: &'a QuadratureRule,
    prefix: Vec<f64>,
    x: f64,
    dims: usize,
    /// `1 / pi^K`.
    scale: f64,
}

impl TensorGrid<'_> {
    fn descend(&self, depth: usize, weight: f64, re: &mut [Vec<f64>], im: &mut [Vec<f64>]) -> f64 {
        if depth == self.dims - 1 {
            return weight * self.last_dimension(&re[depth], &im[depth], &self.coeff[depth / 2]);
        }
        // Weights are positive and sum to sqrt(pi) on every axis.
        let bound = SQRT_PI.powi((self.dims - depth - 1) as i32) * self.scale;
        let coeff = &self.coeff[depth / 2];
        let real_part = depth.is_multiple_of(2);
        let mut total = 0.0;
        for (&t, &w) in self.gh.nodes.iter().zip(&self.gh.weights) {
            let w_next = weight * w;
            if w_next * bound < PRUNE_MASS {
                continue;
            }
            let (lower_re, upper_re) = re.split_at_mut(depth + 1);
            let (lower_im, upper_im) = im.split_at_mut(depth + 1);
            let (next_re, next_im) = (&mut upper_re[0], &mut upper_im[0]);
            next_re.copy_from_slice(&lower_re[depth]);
            next_im.copy_from_slice(&lower_im[depth]);
            if real_part {
                for (g, &c) in next_re.iter_mut().zip(coeff) {
                    *g += c * t;
                }
            } else {
                for (g, &c) in next_im.iter_mut().zip(coeff) {
                    *g += c * t;
                }
            }
            total += self.descend(depth + 1, w_next, re, im);
        }
        total
    }

    /// Sum of weights of the final-axis nodes `t` with
    /// `re_n^2 + (im_n + c_n t)^2 < x` for every port.
    fn last_dimension(&self, re: &[f64], im: &[f64], coeff: &[f64]) -> f64 {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for ((&r, &i), &c) in re.iter().zip(im).zip(coeff) {
            let s = self.x - r * r;
            if s <= 0.0 {
                return 0.0;
            }
            if c.abs() < DEGENERATE_MODE_TOL {
                if i * i >= s {
                    return 0.0;
                }
                continue;
            }
            let root = s.sqrt();
            let (t1, t2) = ((-root - i) / c, (root - i) / c);
            lo = lo.max(t1.min(t2));
            hi = hi.min(t1.max(t2));
            if lo >= hi {
                return 0.0;
            }
        }
        let nodes = &self.gh.nodes;
        let first = nodes.partition_point(|&t| t <= lo);
        let last = nodes.partition_point(|&t| t < hi);
        if last <= first {
            0.0
        } else {
            self.prefix[last] - self.prefix[first]
        }
    }
}

pub(crate) fn tensor_outage(mixing: &Matrix, x: f64, gh: &QuadratureRule) -> f64 {
    let n = mixing.rows();
    let k = mixing.cols();
    let dims = 2 * k;
    let mut prefix = vec![0.0; gh.order() + 1];
    for (i, w) in gh.weights.iter().enumerate() {
        prefix[i + 1] = prefix[i] + w;
    }
    let grid = TensorGrid {
        coeff: (0..k).map(|j| mixing.column(j)).collect(),
        gh,
        prefix,
        x,
        dims,
        scale: PI.powi(-(k as i32)),
    };
    // Split over first-axis nodes; partial sums are combined in node order.
    let coeff0 = &grid.coeff[0];
    let partials: Vec<f64> = gh
        .nodes
        .par_iter()
        .zip(gh.weights.par_iter())
        .map(|(&t, &w)| {
            let mut re = vec![vec![0.0; n]; dims];
            let mut im = vec![vec![0.0; n]; dims];
            for (g, &c) in re[1].iter_mut().zip(coeff0) {
                *g = c * t;
            }
            grid.descend(1, w, &mut re, &mut im)
        })
        .collect();
    partials.iter().sum::<f64>() * grid.scale
}
