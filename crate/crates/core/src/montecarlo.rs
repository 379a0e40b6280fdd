//! Seeded Monte Carlo oracle for correlated Rayleigh port gains.
//!
//! Port gains are `g = F z` where `F` is an `N x M` mixing matrix (a
//! Cholesky-type factor of `R`, or the scaled KL modes) and `z` holds `M`
//! independent standard complex normals with real and imaginary parts
//! `N(0, 1/2)`, so `|g_n|^2 ~ Exp(1)` whenever `[F F^T]_{nn} = 1`.
//!
//! Trials are split across `workers` partitions. Partition `w` draws from a
//! ChaCha8 stream seeded with `seed` and stream id `w`, and partial results
//! are reduced in partition order, so `(seed, workers, trials)` fully
//! determines every estimate.

use std::f64::consts::FRAC_1_SQRT_2;
use std::io::{self, BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{FasError, Result};
use crate::estimate::OutageEstimate;
use crate::fieldmodel::{correlation_matrix, pivoted_cholesky, ApertureConfig, CorrMatrix, KlSpec};
use crate::matrix::Matrix;

/// Residual variance at which the sampling factor stops adding columns.
pub const SAMPLING_FACTOR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64, workers: usize) -> Result<Self> {
        if trials == 0 {
            return Err(FasError::Config("trial count must be >= 1".into()));
        }
        if workers == 0 {
            return Err(FasError::Config("worker count must be >= 1".into()));
        }
        Ok(McConfig {
            trials,
            seed,
            workers,
        })
    }

    /// Trials assigned to partition `w`; the remainder goes to the leading
    /// partitions.
    pub fn partition_trials(&self, w: usize) -> u64 {
        let base = self.trials / self.workers as u64;
        let extra = (w as u64) < self.trials % self.workers as u64;
        base + u64::from(extra)
    }

    pub fn rng_for_worker(&self, w: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(w as u64);
        rng
    }
}

/// Runs `task` once per partition and returns the partial results in
/// partition order.
pub fn run_partitioned<R, F>(cfg: &McConfig, task: F) -> Vec<R>
where
    R: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> R + Sync,
{
    (0..cfg.workers)
        .into_par_iter()
        .map(|w| {
            let mut rng = cfg.rng_for_worker(w);
            task(&mut rng, cfg.partition_trials(w))
        })
        .collect()
}

/// Draws correlated complex gains `g = F z`.
#[derive(Debug, Clone)]
pub struct GainSampler {
    mixing: Matrix,
    z_re: Vec<f64>,
    z_im: Vec<f64>,
}

impl GainSampler {
    pub fn new(mixing: Matrix) -> Self {
        let m = mixing.cols();
        GainSampler {
            mixing,
            z_re: vec![0.0; m],
            z_im: vec![0.0; m],
        }
    }

    /// Sampler for `CN(0, R)` from a pivoted Cholesky factor of `R`.
    pub fn for_matrix(r: &CorrMatrix) -> Self {
        GainSampler::new(pivoted_cholesky(r, SAMPLING_FACTOR_TOL).factor)
    }

    pub fn ports(&self) -> usize {
        self.mixing.rows()
    }

    /// Fills `re`/`im` with one realisation of the port gains.
    pub fn draw<G: Rng>(&mut self, rng: &mut G, re: &mut [f64], im: &mut [f64]) {
        for (a, b) in self.z_re.iter_mut().zip(self.z_im.iter_mut()) {
            *a = rng.sample::<f64, _>(StandardNormal) * FRAC_1_SQRT_2;
            *b = rng.sample::<f64, _>(StandardNormal) * FRAC_1_SQRT_2;
        }
        for n in 0..self.mixing.rows() {
            let row = self.mixing.row(n);
            let mut sr = 0.0;
            let mut si = 0.0;
            for ((&f, &zr), &zi) in row.iter().zip(&self.z_re).zip(&self.z_im) {
                sr += f * zr;
                si += f * zi;
            }
            re[n] = sr;
            im[n] = si;
        }
    }

    /// Draws one realisation and returns `max_n |g_n|^2`.
    pub fn draw_max_power<G: Rng>(&mut self, rng: &mut G, re: &mut [f64], im: &mut [f64]) -> f64 {
        self.draw(rng, re, im);
        re.iter()
            .zip(im.iter())
            .map(|(a, b)| a * a + b * b)
            .fold(0.0, f64::max)
    }
}

/// Outage estimates at several thresholds from one shared set of trials.
pub fn simulate_outage_with(mixing: &Matrix, xs: &[f64], cfg: &McConfig) -> Vec<OutageEstimate> {
    let partials = run_partitioned(cfg, |rng, count| {
        let mut sampler = GainSampler::new(mixing.clone());
        let n = sampler.ports();
        let (mut re, mut im) = (vec![0.0; n], vec![0.0; n]);
        let mut hits = vec![0u64; xs.len()];
        for _ in 0..count {
            let m = sampler.draw_max_power(rng, &mut re, &mut im);
            for (h, &x) in hits.iter_mut().zip(xs) {
                if m < x {
                    *h += 1;
                }
            }
        }
        hits
    });
    let mut total = vec![0u64; xs.len()];
    for part in partials {
        for (t, h) in total.iter_mut().zip(part) {
            *t += h;
        }
    }
    total
        .into_iter()
        .map(|h| OutageEstimate::monte_carlo(h, cfg.trials))
        .collect()
}

/// `P(max_n |g_n|^2 < x)` for `g ~ CN(0, R)`.
pub fn simulate_outage(r: &CorrMatrix, x: f64, cfg: &McConfig) -> OutageEstimate {
    simulate_outage_many(r, &[x], cfg)[0]
}

pub fn simulate_outage_many(r: &CorrMatrix, xs: &[f64], cfg: &McConfig) -> Vec<OutageEstimate> {
    let factor = pivoted_cholesky(r, SAMPLING_FACTOR_TOL).factor;
    simulate_outage_with(&factor, xs, cfg)
}

/// Outage of the rank-`K` truncated model `g_n = sum_k sqrt(lambda_k) u_{n,k} z_k`.
pub fn simulate_outage_truncated(spec: &KlSpec, x: f64, cfg: &McConfig) -> OutageEstimate {
    simulate_outage_with(&spec.mixing_matrix(), &[x], cfg)[0]
}

pub fn simulate_outage_truncated_many(
    spec: &KlSpec,
    xs: &[f64],
    cfg: &McConfig,
) -> Vec<OutageEstimate> {
    simulate_outage_with(&spec.mixing_matrix(), xs, cfg)
}

/// Sample mean and standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub trials: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    sum: f64,
    sum_sq: f64,
}

fn reduce_moments(parts: Vec<Moments>, trials: u64) -> MeanEstimate {
    let (sum, sum_sq) = parts
        .into_iter()
        .fold((0.0, 0.0), |(s, q), m| (s + m.sum, q + m.sum_sq));
    let n = trials as f64;
    let mean = sum / n;
    let var = if trials > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    MeanEstimate {
        mean,
        std_err: (var / n).sqrt(),
        trials,
    }
}

fn ergodic_with(mixing: &Matrix, avg_snr: f64, cfg: &McConfig) -> Result<MeanEstimate> {
    if !(avg_snr > 0.0 && avg_snr.is_finite()) {
        return Err(FasError::Domain(format!("average SNR must be > 0, got {avg_snr}")));
    }
    let parts = run_partitioned(cfg, |rng, count| {
        let mut sampler = GainSampler::new(mixing.clone());
        let n = sampler.ports();
        let (mut re, mut im) = (vec![0.0; n], vec![0.0; n]);
        let mut m = Moments::default();
        for _ in 0..count {
            let rate = (avg_snr * sampler.draw_max_power(rng, &mut re, &mut im)).ln_1p()
                / std::f64::consts::LN_2;
            m.sum += rate;
            m.sum_sq += rate * rate;
        }
        m
    });
    Ok(reduce_moments(parts, cfg.trials))
}

/// `E[log2(1 + snr max_n |g_n|^2)]` with `snr` on a linear scale.
pub fn simulate_ergodic_rate(r: &CorrMatrix, avg_snr: f64, cfg: &McConfig) -> Result<MeanEstimate> {
    ergodic_with(&pivoted_cholesky(r, SAMPLING_FACTOR_TOL).factor, avg_snr, cfg)
}

pub fn simulate_ergodic_rate_truncated(
    spec: &KlSpec,
    avg_snr: f64,
    cfg: &McConfig,
) -> Result<MeanEstimate> {
    ergodic_with(&spec.mixing_matrix(), avg_snr, cfg)
}

/// Mean number of grid upcrossings of level `u` by `chi_n = |g_n|^2`, i.e.
/// indices with `chi_n < u <= chi_{n+1}`.
pub fn count_upcrossings(config: &ApertureConfig, u: f64, cfg: &McConfig) -> Result<MeanEstimate> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(FasError::Domain(format!("crossing level must be > 0, got {u}")));
    }
    let r = correlation_matrix(config)?;
    let factor = pivoted_cholesky(&r, SAMPLING_FACTOR_TOL).factor;
    let parts = run_partitioned(cfg, |rng, count| {
        let mut sampler = GainSampler::new(factor.clone());
        let n = sampler.ports();
        let (mut re, mut im) = (vec![0.0; n], vec![0.0; n]);
        let mut m = Moments::default();
        for _ in 0..count {
            sampler.draw(rng, &mut re, &mut im);
            let mut crossings = 0u32;
            let mut prev = re[0] * re[0] + im[0] * im[0];
            for i in 1..n {
                let cur = re[i] * re[i] + im[i] * im[i];
                if prev < u && cur >= u {
                    crossings += 1;
                }
                prev = cur;
            }
            let c = crossings as f64;
            m.sum += c;
            m.sum_sq += c * c;
        }
        m
    });
    Ok(reduce_moments(parts, cfg.trials))
}

/// One line of a committed regression fixture.
#[derive(Debug, Clone, PartialEq)]
pub struct FixtureRecord {
    pub config_hash: String,
    pub description: String,
    pub seed: u64,
    pub trials: u64,
    pub workers: usize,
    pub estimate: f64,
    pub std_err: f64,
}

pub const FIXTURE_HEADER: &str = "config_hash,description,seed,trials,workers,estimate,std_err";

impl FixtureRecord {
    pub fn new(description: &str, cfg: &McConfig, estimate: f64, std_err: f64) -> Self {
        FixtureRecord {
            config_hash: config_hash(description),
            description: description.to_string(),
            seed: cfg.seed,
            trials: cfg.trials,
            workers: cfg.workers,
            estimate,
            std_err,
        }
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{:.16e},{:.16e}",
            self.config_hash,
            self.description,
            self.seed,
            self.trials,
            self.workers,
            self.estimate,
            self.std_err
        )
    }

    pub fn parse(line: &str) -> Result<Self> {
        let f: Vec<&str> = line.trim().split(',').collect();
        let bad = || FasError::Config(format!("malformed fixture line '{line}'"));
        if f.len() != 7 {
            return Err(bad());
        }
        Ok(FixtureRecord {
            config_hash: f[0].to_string(),
            description: f[1].to_string(),
            seed: f[2].parse().map_err(|_| bad())?,
            trials: f[3].parse().map_err(|_| bad())?,
            workers: f[4].parse().map_err(|_| bad())?,
            estimate: f[5].parse().map_err(|_| bad())?,
            std_err: f[6].parse().map_err(|_| bad())?,
        })
    }
}

/// First 16 hex digits of the SHA-256 of a canonical configuration string.
pub fn config_hash(description: &str) -> String {
    let digest = Sha256::digest(description.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_fixtures<W: Write>(mut out: W, records: &[FixtureRecord]) -> io::Result<()> {
    writeln!(out, "{FIXTURE_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.to_csv_line())?;
    }
    Ok(())
}

pub fn read_fixtures<R: BufRead>(input: R) -> Result<Vec<FixtureRecord>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line.map_err(|e| FasError::Config(e.to_string()))?;
        if line.trim().is_empty() || line.starts_with("config_hash") || line.starts_with('#') {
            continue;
        }
        out.push(FixtureRecord::parse(&line)?);
    }
    Ok(out)
}
