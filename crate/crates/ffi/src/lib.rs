//! C ABI over the `fas-extremes` library.
//!
//! Every fallible function returns a [`FasStatus`] and writes its results
//! through out-pointers. On failure a message is kept per thread and can be
//! read with [`fas_last_error_message`]. Handles are opaque and must be
//! released with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fas_extremes::bounds::{block_refined_bound, equicorr_cdf_exact, slepian_sandwich};
use fas_extremes::continuum::outage_continuous;
use fas_extremes::dof::participation_ratio;
use fas_extremes::error::FasError;
use fas_extremes::fieldmodel::{
    correlation_matrix, eigendecompose, ApertureConfig, CorrMatrix, EigenSpectrum,
};
use fas_extremes::kernels::CorrelationModel;
use fas_extremes::kl_outage::{ergodic_rate_rank1, outage_rank1, outage_rank2, outage_rank_k};
use fas_extremes::montecarlo::{simulate_outage, McConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FasStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Config = 3,
    Numerical = 4,
    Factorization = 5,
    Singularity = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FasModel {
    Jakes = 0,
    Gaussian = 1,
}

impl From<FasModel> for CorrelationModel {
    fn from(m: FasModel) -> Self {
        match m {
            FasModel::Jakes => CorrelationModel::Jakes,
            FasModel::Gaussian => CorrelationModel::Gaussian,
        }
    }
}

/// Port correlation matrix.
pub struct FasCorrMatrix(CorrMatrix);

/// Eigendecomposition of a correlation matrix, eigenvalues descending.
pub struct FasSpectrum(EigenSpectrum);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &FasError) -> FasStatus {
    match e {
        FasError::Domain(_) => FasStatus::Domain,
        FasError::Config(_) => FasStatus::Config,
        FasError::Numerical { .. } => FasStatus::Numerical,
        FasError::Factorization(_) => FasStatus::Factorization,
        FasError::Singularity(_) => FasStatus::Singularity,
    }
}

enum Failure {
    Null(&'static str),
    Lib(FasError),
}

impl From<FasError> for Failure {
    fn from(e: FasError) -> Self {
        Failure::Lib(e)
    }
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> FasStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FasStatus::Ok,
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("null pointer: {name}"));
            FasStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".to_string());
            FasStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

unsafe fn put<T>(p: *mut T, v: T, name: &'static str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    p.write(v);
    Ok(())
}

/// Message of the last failed call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fas_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fas_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Correlation matrix of `ports` uniformly spaced ports over an aperture of
/// `aperture` wavelengths.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn fas_corr_matrix_new(
    model: FasModel,
    aperture: f64,
    ports: usize,
    out: *mut *mut FasCorrMatrix,
) -> FasStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let cfg = ApertureConfig::new(aperture, ports, model.into())?;
        let r = correlation_matrix(&cfg)?;
        put(out, Box::into_raw(Box::new(FasCorrMatrix(r))), "out")
    })
}

/// Equi-correlated matrix with off-diagonal `rho`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn fas_corr_matrix_equicorrelated(
    ports: usize,
    rho: f64,
    out: *mut *mut FasCorrMatrix,
) -> FasStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let r = CorrMatrix::equicorrelated(ports, rho)?;
        put(out, Box::into_raw(Box::new(FasCorrMatrix(r))), "out")
    })
}

/// # Safety
/// `matrix` must be null or a handle from `fas_corr_matrix_new*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fas_corr_matrix_free(matrix: *mut FasCorrMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

/// Number of ports, or 0 for a null handle.
///
/// # Safety
/// `matrix` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fas_corr_matrix_dim(matrix: *const FasCorrMatrix) -> usize {
    matrix.as_ref().map_or(0, |m| m.0.dim())
}

/// # Safety
/// `matrix` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fas_corr_matrix_get(
    matrix: *const FasCorrMatrix,
    row: usize,
    col: usize,
    out: *mut f64,
) -> FasStatus {
    guard(|| {
        let m = get(matrix, "matrix")?;
        let n = m.0.dim();
        if row >= n || col >= n {
            return Err(FasError::Config(format!("index ({row}, {col}) outside {n}x{n}")).into());
        }
        put(out, m.0.get(row, col), "out")
    })
}

/// # Safety
/// `matrix` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fas_spectrum_new(
    matrix: *const FasCorrMatrix,
    out: *mut *mut FasSpectrum,
) -> FasStatus {
    guard(|| {
        let m = get(matrix, "matrix")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let s = eigendecompose(&m.0)?;
        put(out, Box::into_raw(Box::new(FasSpectrum(s))), "out")
    })
}

/// # Safety
/// `spectrum` must be null or a handle from `fas_spectrum_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fas_spectrum_free(spectrum: *mut FasSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// # Safety
/// `spectrum` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fas_spectrum_eigenvalue(
    spectrum: *const FasSpectrum,
    k: usize,
    out: *mut f64,
) -> FasStatus {
    guard(|| {
        let s = get(spectrum, "spectrum")?;
        let v = s.0.eigenvalues.get(k).copied().ok_or_else(|| {
            FasError::Config(format!("eigenvalue index {k} outside {}", s.0.dim()))
        })?;
        put(out, v, "out")
    })
}

/// # Safety
/// `spectrum` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fas_outage_rank1(
    spectrum: *const FasSpectrum,
    x: f64,
    out: *mut f64,
) -> FasStatus {
    guard(|| {
        let s = get(spectrum, "spectrum")?;
        put(out, outage_rank1(&s.0, x)?.p, "out")
    })
}

/// # Safety
/// `spectrum` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fas_outage_rank2(
    spectrum: *const FasSpectrum,
    x: f64,
    quad_order: usize,
    inner_grid: usize,
    out: *mut f64,
) -> FasStatus {
    guard(|| {
        let s = get(spectrum, "spectrum")?;
        put(out, outage_rank2(&s.0, x, quad_order, inner_grid)?.p, "out")
    })
}

/// # Safety
/// `spectrum` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fas_outage_rank_k(
    spectrum: *const FasSpectrum,
    rank: usize,
    x: f64,
    quad_order: usize,
    out: *mut f64,
) -> FasStatus {
    guard(|| {
        let s = get(spectrum, "spectrum")?;
        put(out, outage_rank_k(&s.0, rank, x, quad_order)?.p, "out")
    })
}

/// Rank-1 ergodic rate in bit/s/Hz; `avg_snr` is linear.
///
/// # Safety
/// `spectrum` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fas_ergodic_rate_rank1(
    spectrum: *const FasSpectrum,
    avg_snr: f64,
    out: *mut f64,
) -> FasStatus {
    guard(|| {
        let s = get(spectrum, "spectrum")?;
        put(out, ergodic_rate_rank1(&s.0, avg_snr)?, "out")
    })
}

/// `P(max_n |g_n|^2 < x)` for `n` equi-correlated ports.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fas_equicorr_cdf_exact(
    x: f64,
    rho: f64,
    ports: usize,
    panel_order: usize,
    out: *mut f64,
) -> FasStatus {
    guard(|| put(out, equicorr_cdf_exact(x, rho, ports, panel_order)?, "out"))
}

/// # Safety
/// `matrix` must be a live handle; `lower` and `upper` writable.
#[no_mangle]
pub unsafe extern "C" fn fas_slepian_sandwich(
    matrix: *const FasCorrMatrix,
    x: f64,
    panel_order: usize,
    lower: *mut f64,
    upper: *mut f64,
) -> FasStatus {
    guard(|| {
        let m = get(matrix, "matrix")?;
        if lower.is_null() || upper.is_null() {
            return Err(Failure::Null("lower/upper"));
        }
        let b = slepian_sandwich(&m.0, x, panel_order)?;
        put(lower, b.lower, "lower")?;
        put(upper, b.upper, "upper")
    })
}

/// Product of per-block equi-correlated CDFs. `valid` receives 1 when the
/// largest cross-block correlation does not exceed the smallest in-block one.
///
/// # Safety
/// `matrix` must be a live handle; `out` and `valid` writable.
#[no_mangle]
pub unsafe extern "C" fn fas_block_bound(
    matrix: *const FasCorrMatrix,
    x: f64,
    blocks: usize,
    panel_order: usize,
    out: *mut f64,
    valid: *mut i32,
) -> FasStatus {
    guard(|| {
        let m = get(matrix, "matrix")?;
        if out.is_null() || valid.is_null() {
            return Err(Failure::Null("out/valid"));
        }
        let (p, part) = block_refined_bound(&m.0, x, blocks, panel_order)?;
        put(out, p, "out")?;
        put(valid, part.valid as i32, "valid")
    })
}

/// # Safety
/// `matrix` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fas_participation_ratio(
    matrix: *const FasCorrMatrix,
    out: *mut f64,
) -> FasStatus {
    guard(|| {
        let m = get(matrix, "matrix")?;
        put(out, participation_ratio(&m.0), "out")
    })
}

/// Clamped continuous-aperture outage `1 - e^{-x}(1 + pi sqrt(2) W x)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fas_outage_continuous(x: f64, aperture: f64, out: *mut f64) -> FasStatus {
    guard(|| put(out, outage_continuous(x, aperture)?.value, "out"))
}

/// Monte Carlo outage. Deterministic for fixed `seed` and `workers`.
///
/// # Safety
/// `matrix` must be a live handle; `p` and `std_err` writable.
#[no_mangle]
pub unsafe extern "C" fn fas_simulate_outage(
    matrix: *const FasCorrMatrix,
    x: f64,
    trials: u64,
    seed: u64,
    workers: usize,
    p: *mut f64,
    std_err: *mut f64,
) -> FasStatus {
    guard(|| {
        let m = get(matrix, "matrix")?;
        if p.is_null() || std_err.is_null() {
            return Err(Failure::Null("p/std_err"));
        }
        if !(x > 0.0 && x.is_finite()) {
            return Err(FasError::Domain(format!("x must be > 0, got {x}")).into());
        }
        let cfg = McConfig::new(trials, seed, workers)?;
        let e = simulate_outage(&m.0, x, &cfg);
        put(p, e.p, "p")?;
        put(std_err, e.std_err_or_zero(), "std_err")
    })
}
