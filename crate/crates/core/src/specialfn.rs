//! Special functions used throughout the crate.
//!
//! Everything here is implemented from scratch in `f64`: Bessel functions of
//! the first kind (orders 0 and 1), the modified Bessel function `I0` and an
//! exponentially scaled `I_k` sequence, the error function, the exponential
//! integral `E1`, the Marcum Q-function of order one, and Gauss–Hermite /
//! Gauss–Laguerre quadrature rules.

use std::f64::consts::{FRAC_2_SQRT_PI, PI};

use crate::error::{ensure_finite, FasError, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `sqrt(pi)`.
pub const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Switch-over point between the power series and the Hankel asymptotic
/// expansion for `J0`/`J1`.
const BESSEL_SERIES_LIMIT: f64 = 12.0;

pub const MAX_QUADRATURE_ORDER: usize = 64;

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> Result<f64> {
    ensure_finite("x", x)?;
    let ax = x.abs();
    Ok(if ax <= BESSEL_SERIES_LIMIT {
        j_series(0, ax)
    } else {
        j_asymptotic(0, ax)
    })
}

/// Bessel function of the first kind, order one.
pub fn bessel_j1(x: f64) -> Result<f64> {
    ensure_finite("x", x)?;
    let ax = x.abs();
    let v = if ax <= BESSEL_SERIES_LIMIT {
        j_series(1, ax)
    } else {
        j_asymptotic(1, ax)
    };
    Ok(if x < 0.0 { -v } else { v })
}

/// Power series `J_n(x) = (x/2)^n sum_k (-x^2/4)^k / (k! (k+n)!)` for `n` in {0, 1}.
fn j_series(order: u32, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = if order == 0 { 1.0 } else { 0.5 * x };
    let mut sum = term;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (kf + order as f64));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && k > 2 {
            break;
        }
    }
    sum
}

/// Hankel asymptotic expansion with the P/Q phase series, truncated at the
/// smallest term.
fn j_asymptotic(order: u32, x: f64) -> f64 {
    let mu = 4.0 * (order * order) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0_f64;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        // a_k / x^k, with sign pattern (-1)^{floor(k/2)} split over P and Q.
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * order as f64 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Error function.
pub fn erf(x: f64) -> Result<f64> {
    ensure_finite("x", x)?;
    let ax = x.abs();
    let v = if ax <= 2.0 {
        erf_series(ax)
    } else {
        1.0 - erfc_continued_fraction(ax)
    };
    Ok(v.copysign(x))
}

/// Complementary error function.
pub fn erfc(x: f64) -> Result<f64> {
    ensure_finite("x", x)?;
    Ok(if x < 0.0 {
        2.0 - erfc(-x)?
    } else if x <= 2.0 {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    })
}

fn erf_series(x: f64) -> f64 {
    // erf(x) = 2/sqrt(pi) * sum_n (-1)^n x^{2n+1} / (n! (2n+1))
    let x2 = x * x;
    let mut power = x;
    let mut sum = x;
    for n in 1..200 {
        let nf = n as f64;
        power *= -x2 / nf;
        let term = power / (2.0 * nf + 1.0);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    FRAC_2_SQRT_PI * sum
}

/// `erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))`,
/// evaluated with the modified Lentz method. Valid for `x > 0`; used for `x > 2`.
fn erfc_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..500 {
        let a = n as f64 * 0.5;
        d = x + a * d;
        d = if d.abs() < TINY { TINY } else { d };
        c = x + a / c;
        c = if c.abs() < TINY { TINY } else { c };
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (SQRT_PI * f)
}

/// Exponential integral `E1(x) = int_1^inf exp(-x t)/t dt` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    ensure_finite("x", x)?;
    if x <= 0.0 {
        return Err(FasError::Domain(format!("E1 requires x > 0, got {x}")));
    }
    if x <= 1.0 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..100 {
            let kf = k as f64;
            term *= -x / kf;
            let t = term / kf;
            sum += t;
            if t.abs() < 1e-18 {
                break;
            }
        }
        Ok(-EULER_GAMMA - x.ln() - sum)
    } else {
        Ok(exp_integral_e1_scaled(x)? * (-x).exp())
    }
}

/// `exp(x) E1(x)` for `x > 0`, finite for arbitrarily large `x`.
pub fn exp_integral_e1_scaled(x: f64) -> Result<f64> {
    ensure_finite("x", x)?;
    if x <= 0.0 {
        return Err(FasError::Domain(format!("E1 requires x > 0, got {x}")));
    }
    if x <= 1.0 {
        return Ok(x.exp() * exp_integral_e1(x)?);
    }
    // Continued fraction (modified Lentz).
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    Ok(h)
}

/// Exponentially scaled modified Bessel functions `exp(-z) I_k(z)` for
/// `k = 0..=n`, via Miller's backward recurrence normalised with
/// `I_0(z) + 2 sum_{k>=1} I_k(z) = exp(z)`.
pub fn bessel_i_scaled_sequence(z: f64, n: usize) -> Result<Vec<f64>> {
    ensure_finite("z", z)?;
    if z < 0.0 {
        return Err(FasError::Domain(format!("scaled I_k requires z >= 0, got {z}")));
    }
    let mut out = vec![0.0; n + 1];
    if z == 0.0 {
        out[0] = 1.0;
        return Ok(out);
    }
    let start = n + 30 + (10.0 * z.sqrt()).ceil() as usize;
    let mut next = 0.0; // I_{k+1}
    let mut cur = 1e-280; // I_k
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        if k <= n {
            out[k] = cur;
        }
        norm += 2.0 * cur;
        let prev = (2.0 * k as f64 / z) * cur + next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e250 {
            let s = 1e-250;
            cur *= s;
            next *= s;
            norm *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    out[0] = cur;
    norm += cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    Ok(out)
}

/// Modified Bessel function of the first kind, order zero.
pub fn bessel_i0(z: f64) -> Result<f64> {
    let az = z.abs();
    let scaled = bessel_i_scaled_sequence(az, 0)?[0];
    Ok(scaled * az.exp())
}

/// Marcum Q-function of order one, `Q1(a, b) = P(|a + w| > b)` for a
/// standard bivariate normal `w`.
pub fn marcum_q1(a: f64, b: f64) -> Result<f64> {
    ensure_finite("a", a)?;
    ensure_finite("b", b)?;
    if a < 0.0 || b < 0.0 {
        return Err(FasError::Domain(format!(
            "Marcum Q1 requires a, b >= 0, got ({a}, {b})"
        )));
    }
    if b == 0.0 {
        return Ok(1.0);
    }
    if a == 0.0 {
        return Ok((-0.5 * b * b).exp());
    }
    let z = a * b;
    let gap = (-0.5 * (a - b) * (a - b)).exp();
    if gap == 0.0 {
        return Ok(if a > b { 1.0 } else { 0.0 });
    }
    let terms = 30 + (10.0 * z.sqrt()).ceil() as usize;
    let scaled = bessel_i_scaled_sequence(z, terms)?;
    let q = if a == b {
        0.5 * (1.0 + scaled[0])
    } else if a < b {
        let r = a / b;
        let mut sum = 0.0;
        let mut rk = 1.0;
        for ik in &scaled {
            sum += rk * ik;
            rk *= r;
            if rk < 1e-300 {
                break;
            }
        }
        gap * sum
    } else {
        let r = b / a;
        let mut sum = 0.0;
        let mut rk = r;
        for ik in &scaled[1..] {
            sum += rk * ik;
            rk *= r;
            if rk < 1e-300 {
                break;
            }
        }
        1.0 - gap * sum
    };
    Ok(q.clamp(0.0, 1.0))
}

/// A quadrature rule `sum_i w_i f(t_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

fn check_order(q: usize) -> Result<()> {
    if q == 0 || q > MAX_QUADRATURE_ORDER {
        return Err(FasError::Config(format!(
            "quadrature order must be in 1..={MAX_QUADRATURE_ORDER}, got {q}"
        )));
    }
    Ok(())
}

/// Gauss–Hermite rule for the weight `exp(-t^2)` on the real line.
///
/// Newton iteration on the normalised Hermite recurrence, with the usual
/// asymptotic starting guesses for the largest roots and extrapolation from
/// previously found roots for the rest. Nodes are returned ascending.
pub fn gauss_hermite(q: usize) -> Result<QuadratureRule> {
    check_order(q)?;
    const PIM4: f64 = 0.751_125_544_464_942_5; // pi^{-1/4}
    let n = q as f64;
    let m = q.div_ceil(2);
    let mut x = vec![0.0; q];
    let mut w = vec![0.0; q];
    let mut z = 0.0_f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * n + 1.0).sqrt() - 1.855_75 * (2.0 * n + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * n.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        let mut converged = false;
        for _ in 0..100 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 1..=q {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * n).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(FasError::Numerical {
                message: format!("Gauss-Hermite root {i} of order {q} did not converge"),
                residual: f64::NAN,
            });
        }
        x[i] = z;
        w[i] = 2.0 / (pp * pp);
    }
    // x[0..m] holds the non-negative roots, largest first.
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    for i in 0..m {
        nodes[q - 1 - i] = x[i];
        nodes[i] = -x[i];
        weights[q - 1 - i] = w[i];
        weights[i] = w[i];
    }
    if q % 2 == 1 {
        nodes[q / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Gauss–Legendre rule on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(q: usize) -> Result<QuadratureRule> {
    check_order(q)?;
    let n = q as f64;
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    for i in 0..q.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 1..=q {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * pp * pp);
        nodes[i] = -z;
        nodes[q - 1 - i] = z;
        weights[i] = w;
        weights[q - 1 - i] = w;
    }
    if q % 2 == 1 {
        nodes[q / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Gauss–Laguerre rule for the weight `exp(-t)` on `[0, inf)`.
pub fn gauss_laguerre(q: usize) -> Result<QuadratureRule> {
    check_order(q)?;
    let n = q as f64;
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    let mut z = 0.0_f64;
    for i in 0..q {
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * n),
            1 => z + 15.0 / (1.0 + 2.5 * n),
            _ => {
                let ai = (i - 1) as f64;
                z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2])
            }
        };
        let mut pp = 0.0;
        let mut p2 = 0.0;
        let mut converged = false;
        for _ in 0..200 {
            let mut p1 = 1.0;
            p2 = 0.0;
            for j in 1..=q {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = (n * p1 - n * p2) / z;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-14 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(FasError::Numerical {
                message: format!("Gauss-Laguerre root {i} of order {q} did not converge"),
                residual: f64::NAN,
            });
        }
        nodes[i] = z;
        weights[i] = -1.0 / (pp * n * p2);
    }
    Ok(QuadratureRule { nodes, weights })
}
