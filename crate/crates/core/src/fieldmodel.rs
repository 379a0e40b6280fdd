//! Discretised aperture: port grid, correlation matrix, eigendecomposition,
//! Cholesky factors and Karhunen–Loève truncation.

use std::io::{self, Write};

use crate::error::{FasError, Result};
use crate::kernels::{correlation, CorrelationModel};
use crate::matrix::Matrix;

/// Physical scenario: `ports` equally spaced positions over an aperture of
/// `aperture` wavelengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApertureConfig {
    pub aperture: f64,
    pub ports: usize,
    pub model: CorrelationModel,
}

impl ApertureConfig {
    pub fn new(aperture: f64, ports: usize, model: CorrelationModel) -> Result<Self> {
        if !(aperture.is_finite() && aperture > 0.0) {
            return Err(FasError::Config(format!("aperture must be > 0, got {aperture}")));
        }
        if ports == 0 {
            return Err(FasError::Config("port count must be >= 1".into()));
        }
        Ok(ApertureConfig {
            aperture,
            ports,
            model,
        })
    }

    /// Separation between neighbouring ports (zero for a single port).
    pub fn spacing(&self) -> f64 {
        if self.ports < 2 {
            0.0
        } else {
            self.aperture / (self.ports - 1) as f64
        }
    }

    /// Port positions `tau_n = (n - 1) W / (N - 1)`.
    pub fn port_positions(&self) -> Vec<f64> {
        let n = self.ports;
        if n == 1 {
            return vec![0.0];
        }
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.aperture
                } else {
                    i as f64 * self.aperture / (n - 1) as f64
                }
            })
            .collect()
    }
}

/// Unit-diagonal symmetric correlation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrMatrix {
    entries: Matrix,
    source: Option<ApertureConfig>,
}

impl CorrMatrix {
    /// Wraps an arbitrary correlation matrix after checking it is square,
    /// symmetric, unit-diagonal and bounded by one in magnitude.
    pub fn from_matrix(entries: Matrix) -> Result<Self> {
        let n = entries.rows();
        if n == 0 || entries.cols() != n {
            return Err(FasError::Config("correlation matrix must be square and non-empty".into()));
        }
        if !entries.is_symmetric(1e-12) {
            return Err(FasError::Config("correlation matrix must be symmetric".into()));
        }
        for i in 0..n {
            if (entries[(i, i)] - 1.0).abs() > 1e-12 {
                return Err(FasError::Config(format!("diagonal entry {i} is not 1")));
            }
            for j in 0..n {
                let v = entries[(i, j)];
                if !v.is_finite() || v.abs() > 1.0 + 1e-12 {
                    return Err(FasError::Config(format!("entry ({i},{j}) = {v} out of [-1, 1]")));
                }
            }
        }
        Ok(CorrMatrix {
            entries,
            source: None,
        })
    }

    /// Equi-correlated matrix with all off-diagonal entries equal to `rho`.
    pub fn equicorrelated(n: usize, rho: f64) -> Result<Self> {
        Self::from_matrix(Matrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { rho }))
    }

    pub fn identity(n: usize) -> Self {
        CorrMatrix {
            entries: Matrix::identity(n),
            source: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn source(&self) -> Option<&ApertureConfig> {
        self.source.as_ref()
    }

    /// Row-major CSV dump with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for i in 0..self.dim() {
            let line: Vec<String> = self
                .entries
                .row(i)
                .iter()
                .map(|v| format!("{v:.16e}"))
                .collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Builds `[R]_{mn} = rho((m - n) W / (N - 1))`.
pub fn correlation_matrix(config: &ApertureConfig) -> Result<CorrMatrix> {
    let n = config.ports;
    let step = config.spacing();
    let lags: Vec<f64> = (0..n)
        .map(|lag| correlation(config.model, lag as f64 * step))
        .collect::<Result<_>>()?;
    let entries = Matrix::from_fn(n, n, |i, j| lags[i.abs_diff(j)]);
    Ok(CorrMatrix {
        entries,
        source: Some(*config),
    })
}

/// Eigenpairs of a correlation matrix, sorted by descending eigenvalue.
/// Column `k` of `eigenvectors` pairs with `eigenvalues[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
    pub sweeps: usize,
}

impl EigenSpectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U diag(lambda) U^T`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.dim();
        let u = &self.eigenvectors;
        Matrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| u[(i, k)] * self.eigenvalues[k] * u[(j, k)]).sum()
        })
    }

    /// Dominant eigenvalue and `c1 = max_n |u_{n,1}|^2`.
    pub fn rank1_params(&self) -> Rank1Params {
        let c1 = (0..self.dim())
            .map(|i| self.eigenvectors[(i, 0)].powi(2))
            .fold(0.0, f64::max);
        Rank1Params {
            lambda1: self.eigenvalues[0],
            c1,
        }
    }
}

/// Parameters of the rank-1 model: `max_n |g_n|^2 = lambda1 c1 |z_1|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rank1Params {
    pub lambda1: f64,
    pub c1: f64,
}

impl Rank1Params {
    pub fn gain(&self) -> f64 {
        self.lambda1 * self.c1
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigendecomposition.
///
/// Converges when the off-diagonal Frobenius norm drops below `1e-12 N`.
/// Eigenvalues are sorted descending (stable in the original index for
/// ties) and each eigenvector is signed so its largest-magnitude entry is
/// positive.
pub fn eigendecompose(r: &CorrMatrix) -> Result<EigenSpectrum> {
    let n = r.dim();
    let mut a = r.entries().clone();
    let mut v = Matrix::identity(n);
    let tol = 1e-12 * n as f64;
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off < tol {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(FasError::Numerical {
                message: format!("Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps"),
                residual: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                // Negligible relative to both diagonal entries: drop it.
                if sweeps > 4 && (app.abs() + 100.0 * apq.abs() == app.abs())
                    && (aqq.abs() + 100.0 * apq.abs() == aqq.abs())
                {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    let new_kp = c * akp - s * akq;
                    let new_kq = s * akp + c * akq;
                    a[(k, p)] = new_kp;
                    a[(p, k)] = new_kp;
                    a[(k, q)] = new_kq;
                    a[(q, k)] = new_kq;
                }
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].partial_cmp(&a[(i, i)]).expect("finite eigenvalues"));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut eigenvectors = Matrix::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        let mut pivot = 0;
        for i in 0..n {
            if v[(i, src)].abs() > v[(pivot, src)].abs() {
                pivot = i;
            }
        }
        let sign = if v[(pivot, src)] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            eigenvectors[(i, k)] = sign * v[(i, src)];
        }
    }
    Ok(EigenSpectrum {
        eigenvalues,
        eigenvectors,
        sweeps,
    })
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Diagonal jitter ladder tried in order when the plain factorisation fails.
pub const JITTER_LADDER: [f64; 6] = [0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8];

/// Lower-triangular Cholesky factor and the diagonal jitter it needed.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    pub lower: Matrix,
    pub jitter: f64,
}

/// Cholesky factorisation `R + jitter I = L L^T`, walking [`JITTER_LADDER`].
pub fn cholesky(r: &CorrMatrix) -> Result<CholeskyFactor> {
    for &jitter in &JITTER_LADDER {
        if let Some(lower) = try_cholesky(r.entries(), jitter) {
            return Ok(CholeskyFactor { lower, jitter });
        }
    }
    Err(FasError::Factorization(format!(
        "matrix of order {} is not positive definite with jitter up to {:e}",
        r.dim(),
        JITTER_LADDER[JITTER_LADDER.len() - 1]
    )))
}

fn try_cholesky(a: &Matrix, jitter: f64) -> Option<Matrix> {
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let lj = l.row(j)[..j].to_vec();
        let d = a[(j, j)] + jitter - lj.iter().map(|x| x * x).sum::<f64>();
        if d <= 0.0 || !d.is_finite() {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in j + 1..n {
            let dot: f64 = l.row(i)[..j].iter().zip(&lj).map(|(x, y)| x * y).sum();
            l[(i, j)] = (a[(i, j)] - dot) / djj;
        }
    }
    Some(l)
}

/// Low-rank factor `F` (N x r) with `F F^T ~ R`, from diagonally pivoted
/// Cholesky stopped once every residual variance is below `tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowRankFactor {
    pub factor: Matrix,
    pub residual: f64,
}

impl LowRankFactor {
    pub fn rank(&self) -> usize {
        self.factor.cols()
    }
}

pub fn pivoted_cholesky(r: &CorrMatrix, tol: f64) -> LowRankFactor {
    let n = r.dim();
    let a = r.entries();
    let mut diag: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    let mut used = vec![false; n];
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let mut residual = 0.0;
    for _ in 0..n {
        let (piv, dmax) = diag
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .fold((usize::MAX, f64::NEG_INFINITY), |best, (i, &d)| {
                if d > best.1 {
                    (i, d)
                } else {
                    best
                }
            });
        if piv == usize::MAX {
            residual = 0.0;
            break;
        }
        residual = dmax.max(0.0);
        if dmax <= tol {
            break;
        }
        used[piv] = true;
        let root = dmax.sqrt();
        let mut col = vec![0.0; n];
        col[piv] = root;
        for i in 0..n {
            if used[i] {
                continue;
            }
            let dot: f64 = cols.iter().map(|c| c[i] * c[piv]).sum();
            let v = (a[(i, piv)] - dot) / root;
            col[i] = v;
            diag[i] -= v * v;
        }
        diag[piv] = 0.0;
        cols.push(col);
        residual = 0.0;
    }
    let rank = cols.len();
    let factor = Matrix::from_fn(n, rank, |i, k| cols[k][i]);
    LowRankFactor { factor, residual }
}

/// Rank-`K` Karhunen–Loève truncation of a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct KlSpec {
    pub rank: usize,
    pub eigenvalues: Vec<f64>,
    /// N x K matrix of retained eigenvector columns.
    pub modes: Matrix,
    /// `1 - (sum of retained eigenvalues) / N`.
    pub truncation_error: f64,
}

impl KlSpec {
    pub fn ports(&self) -> usize {
        self.modes.rows()
    }

    /// N x K matrix with entries `sqrt(lambda_k) u_{n,k}`; negative round-off
    /// eigenvalues are treated as zero.
    pub fn mixing_matrix(&self) -> Matrix {
        let roots: Vec<f64> = self.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
        Matrix::from_fn(self.ports(), self.rank, |n, k| roots[k] * self.modes[(n, k)])
    }
}

pub fn kl_truncate(spec: &EigenSpectrum, k: usize) -> Result<KlSpec> {
    let n = spec.dim();
    if k == 0 || k > n {
        return Err(FasError::Config(format!("KL rank must be in 1..={n}, got {k}")));
    }
    let eigenvalues = spec.eigenvalues[..k].to_vec();
    let modes = Matrix::from_fn(n, k, |i, j| spec.eigenvectors[(i, j)]);
    let captured: f64 = eigenvalues.iter().sum();
    let truncation_error = if k == n {
        0.0
    } else {
        (1.0 - captured / n as f64).clamp(0.0, 1.0)
    };
    Ok(KlSpec {
        rank: k,
        eigenvalues,
        modes,
        truncation_error,
    })
}
