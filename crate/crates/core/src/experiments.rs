//! Tabular experiment runners behind the command-line tool.

use std::fmt;
use std::io::{self, Write};

use crate::bounds::{block_refined_bound, slepian_sandwich, DEFAULT_PANEL_ORDER};
use crate::continuum::outage_continuous;
use crate::dof::{keff_asymptotic, participation_ratio, JakesDof};
use crate::error::{FasError, Result};
use crate::estimate::{Method, OutageEstimate};
use crate::fieldmodel::{
    correlation_matrix, eigendecompose, kl_truncate, ApertureConfig, CorrMatrix, EigenSpectrum,
};
use crate::kernels::{approx_error, correlation, psd, CorrelationModel};
use crate::kl_outage::{outage_rank1, outage_rank2, ThresholdSpec, DEFAULT_INNER_GRID};
use crate::montecarlo::{simulate_outage_many, simulate_outage_truncated_many, McConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    KernelCompare,
    Psd,
    Eigen,
    OutageSnr,
    OutageAperture,
    Dof,
    OutagePorts,
    KlConvergence,
    SlepianBlocks,
    GaussError,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::KernelCompare,
        Experiment::Psd,
        Experiment::Eigen,
        Experiment::OutageSnr,
        Experiment::OutageAperture,
        Experiment::Dof,
        Experiment::OutagePorts,
        Experiment::KlConvergence,
        Experiment::SlepianBlocks,
        Experiment::GaussError,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::KernelCompare => "kernel-compare",
            Experiment::Psd => "psd",
            Experiment::Eigen => "eigen",
            Experiment::OutageSnr => "outage-snr",
            Experiment::OutageAperture => "outage-aperture",
            Experiment::Dof => "dof",
            Experiment::OutagePorts => "outage-ports",
            Experiment::KlConvergence => "kl-convergence",
            Experiment::SlepianBlocks => "slepian-blocks",
            Experiment::GaussError => "gauss-error",
        }
    }

    /// Trials per Monte Carlo point when none are requested.
    pub fn default_trials(self) -> u64 {
        match self {
            Experiment::OutageSnr | Experiment::OutagePorts => 100_000,
            _ => 1_000_000,
        }
    }

    fn uses_monte_carlo(self) -> bool {
        matches!(
            self,
            Experiment::OutageSnr
                | Experiment::OutageAperture
                | Experiment::OutagePorts
                | Experiment::KlConvergence
                | Experiment::SlepianBlocks
                | Experiment::GaussError
        )
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Requested settings; `None` and empty lists fall back to the
/// experiment's defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub experiment: Experiment,
    pub models: Vec<CorrelationModel>,
    pub apertures: Vec<f64>,
    pub ports: Vec<usize>,
    pub snr_db: Vec<f64>,
    pub th_db: f64,
    pub rank: Option<usize>,
    pub quad_order: usize,
    pub blocks: Option<usize>,
    pub trials: Option<u64>,
    pub seed: u64,
    pub workers: usize,
}

impl Settings {
    pub fn new(experiment: Experiment) -> Self {
        Settings {
            experiment,
            models: CorrelationModel::ALL.to_vec(),
            apertures: Vec::new(),
            ports: Vec::new(),
            snr_db: Vec::new(),
            th_db: 0.0,
            rank: None,
            quad_order: 16,
            blocks: None,
            trials: None,
            seed: 1,
            workers: 1,
        }
    }

    fn apertures_or(&self, default: &[f64]) -> Vec<f64> {
        if self.apertures.is_empty() {
            default.to_vec()
        } else {
            self.apertures.clone()
        }
    }

    fn ports_or(&self, default: &[usize]) -> Vec<usize> {
        if self.ports.is_empty() {
            default.to_vec()
        } else {
            self.ports.clone()
        }
    }

    fn snr_or(&self, default: &[f64]) -> Vec<f64> {
        if self.snr_db.is_empty() {
            default.to_vec()
        } else {
            self.snr_db.clone()
        }
    }

    fn aperture(&self, default: f64) -> f64 {
        self.apertures.first().copied().unwrap_or(default)
    }

    fn port_count(&self, default: usize) -> usize {
        self.ports.first().copied().unwrap_or(default)
    }

    pub fn mc(&self) -> Result<McConfig> {
        McConfig::new(
            self.trials.unwrap_or(self.experiment.default_trials()),
            self.seed,
            self.workers,
        )
    }

    /// Checks everything that can be checked before any computation.
    pub fn validate(&self) -> Result<()> {
        if self.models.is_empty() {
            return Err(FasError::Config("at least one model is required".into()));
        }
        for &w in &self.apertures {
            if !(w > 0.0 && w.is_finite()) {
                return Err(FasError::Config(format!("aperture must be > 0, got {w}")));
            }
        }
        for &n in &self.ports {
            if n == 0 {
                return Err(FasError::Config("port count must be >= 1".into()));
            }
        }
        for &s in self.snr_db.iter().chain(std::iter::once(&self.th_db)) {
            if !s.is_finite() {
                return Err(FasError::Config(format!("dB values must be finite, got {s}")));
            }
        }
        if self.quad_order == 0 || self.quad_order > crate::specialfn::MAX_QUADRATURE_ORDER {
            return Err(FasError::Config(format!(
                "quad order must be in 1..={}",
                crate::specialfn::MAX_QUADRATURE_ORDER
            )));
        }
        if self.rank == Some(0) || self.blocks == Some(0) {
            return Err(FasError::Config("K and block count must be >= 1".into()));
        }
        if self.experiment.uses_monte_carlo() {
            self.mc()?;
        }
        let needs_two_ports = matches!(
            self.experiment,
            Experiment::OutageSnr | Experiment::SlepianBlocks | Experiment::OutagePorts
        );
        if needs_two_ports && self.ports.iter().any(|&n| n < 2) {
            return Err(FasError::Config(format!(
                "{} needs at least 2 ports",
                self.experiment
            )));
        }
        if let (Experiment::KlConvergence, Some(k), Some(&n)) =
            (self.experiment, self.rank, self.ports.first())
        {
            if k > n {
                return Err(FasError::Config(format!("K = {k} exceeds N = {n}")));
            }
        }
        if let (Experiment::SlepianBlocks, Some(b), Some(&n)) =
            (self.experiment, self.blocks, self.ports.first())
        {
            if b > n {
                return Err(FasError::Config(format!("block count {b} exceeds N = {n}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Num(v) if v.is_nan() => f.write_str("nan"),
            Cell::Num(v) if v.is_infinite() => f.write_str(if *v > 0.0 { "inf" } else { "-inf" }),
            Cell::Num(v) => write!(f, "{v:.16e}"),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(i64::from(v))
    }
}

/// Experiment output: metadata lines, a header and rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Table {
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn meta(&mut self, key: &str, value: impl fmt::Display) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric value at `(row, column name)`.
    pub fn value(&self, row: usize, name: &str) -> Option<f64> {
        match self.rows.get(row)?.get(self.column(name)?)? {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            Cell::Text(_) => None,
        }
    }

    /// Writes `# key: value` lines, the header and the rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (k, v) in &self.meta {
            writeln!(out, "# {k}: {v}")?;
        }
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn matrix(w: f64, n: usize, m: CorrelationModel) -> Result<CorrMatrix> {
    correlation_matrix(&ApertureConfig::new(w, n, m)?)
}

fn spectrum(w: f64, n: usize, m: CorrelationModel) -> Result<EigenSpectrum> {
    eigendecompose(&matrix(w, n, m)?)
}

fn thresholds(snr_db: &[f64], th_db: f64) -> Result<Vec<f64>> {
    snr_db
        .iter()
        .map(|&s| ThresholdSpec::new(s, th_db).map(|t| t.x))
        .collect()
}

fn has(s: &Settings, m: CorrelationModel) -> bool {
    s.models.contains(&m)
}

/// Model used for the analytic columns: Gaussian when requested.
fn analytic_model(s: &Settings) -> CorrelationModel {
    if has(s, CorrelationModel::Gaussian) {
        CorrelationModel::Gaussian
    } else {
        CorrelationModel::Jakes
    }
}

fn mc_or_nan(e: Option<&OutageEstimate>) -> (Cell, Cell) {
    match e {
        Some(e) => (e.p.into(), e.std_err_or_zero().into()),
        None => (f64::NAN.into(), f64::NAN.into()),
    }
}

pub fn run(s: &Settings) -> Result<Table> {
    s.validate()?;
    let mut t = match s.experiment {
        Experiment::KernelCompare => kernel_compare(s)?,
        Experiment::Psd => psd_table(s)?,
        Experiment::Eigen => eigen(s)?,
        Experiment::OutageSnr => outage_snr(s)?,
        Experiment::OutageAperture => outage_aperture(s)?,
        Experiment::Dof => dof(s)?,
        Experiment::OutagePorts => outage_ports(s)?,
        Experiment::KlConvergence => kl_convergence(s)?,
        Experiment::SlepianBlocks => slepian_blocks(s)?,
        Experiment::GaussError => gauss_error(s)?,
    };
    let mut meta = vec![
        ("tool".to_string(), format!("fas-extremes {}", env!("CARGO_PKG_VERSION"))),
        ("experiment".to_string(), s.experiment.to_string()),
        (
            "models".to_string(),
            s.models.iter().map(|m| m.name()).collect::<Vec<_>>().join(" "),
        ),
    ];
    if s.experiment.uses_monte_carlo() {
        let mc = s.mc()?;
        meta.push(("trials".into(), mc.trials.to_string()));
        meta.push(("seed".into(), mc.seed.to_string()));
        meta.push(("workers".into(), mc.workers.to_string()));
    }
    meta.append(&mut t.meta);
    t.meta = meta;
    Ok(t)
}

fn kernel_compare(s: &Settings) -> Result<Table> {
    let span = s.aperture(2.0);
    let n = s.port_count(401);
    let mut t = Table::new(&["delta", "jakes", "gauss", "abs_error", "quartic_bound"]);
    t.meta("delta_range", format!("[0, {span}]"));
    for d in linspace(0.0, span, n) {
        let e = approx_error(d)?;
        t.push(vec![
            d.into(),
            correlation(CorrelationModel::Jakes, d)?.into(),
            correlation(CorrelationModel::Gaussian, d)?.into(),
            e.actual.into(),
            e.bound.into(),
        ]);
    }
    Ok(t)
}

fn psd_table(s: &Settings) -> Result<Table> {
    let span = s.aperture(2.0);
    let n = s.port_count(401);
    let mut t = Table::new(&["f", "psd_jakes", "psd_gauss"]);
    t.meta("f_range", format!("[-{span}, {span}]"));
    for f in linspace(-span, span, n) {
        let j = match psd(CorrelationModel::Jakes, f) {
            Ok(v) => v,
            Err(FasError::Singularity(_)) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        t.push(vec![f.into(), j.into(), psd(CorrelationModel::Gaussian, f)?.into()]);
    }
    Ok(t)
}

fn eigen(s: &Settings) -> Result<Table> {
    let w = s.aperture(2.0);
    let n = s.port_count(100);
    let mut cols = vec!["k".to_string()];
    let mut spectra = Vec::new();
    for &m in &s.models {
        cols.push(format!("lambda_{}", m.name()));
        cols.push(format!("energy_{}", m.name()));
        spectra.push(spectrum(w, n, m)?);
    }
    let refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = Table::new(&refs);
    t.meta("W", w);
    t.meta("N", n);
    let mut acc = vec![0.0; spectra.len()];
    for k in 0..n {
        let mut row = vec![Cell::from(k + 1)];
        for (sp, a) in spectra.iter().zip(acc.iter_mut()) {
            *a += sp.eigenvalues[k];
            row.push(sp.eigenvalues[k].into());
            row.push((*a / n as f64).into());
        }
        t.push(row);
    }
    Ok(t)
}

fn outage_snr(s: &Settings) -> Result<Table> {
    let w = s.aperture(1.0);
    let n = s.port_count(10);
    let snrs = s.snr_or(&linspace(-10.0, 20.0, 13));
    let xs = thresholds(&snrs, s.th_db)?;
    let mc = s.mc()?;
    let mut sims = Vec::new();
    for m in CorrelationModel::ALL {
        sims.push(if has(s, m) {
            Some(simulate_outage_many(&matrix(w, n, m)?, &xs, &mc))
        } else {
            None
        });
    }
    let am = analytic_model(s);
    let r = matrix(w, n, am)?;
    let sp = eigendecompose(&r)?;
    let mut t = Table::new(&[
        "snr_db",
        "x",
        "mc_jakes",
        "mc_gauss",
        "rank1",
        "rank2",
        "slepian_lo",
        "slepian_hi",
        "continuum",
        "std_err_jakes",
        "std_err_gauss",
    ]);
    t.meta("W", w);
    t.meta("N", n);
    t.meta("th_db", s.th_db);
    t.meta("analytic_model", am);
    t.meta("quad_order", s.quad_order);
    t.meta(
        "methods",
        format!(
            "mc_*={} rank1={} rank2={} slepian_lo={} slepian_hi={} continuum={}",
            Method::MonteCarlo,
            Method::Rank1,
            Method::Rank2,
            Method::SandwichLower,
            Method::SandwichUpper,
            Method::Continuum
        ),
    );
    for (i, (&snr, &x)) in snrs.iter().zip(&xs).enumerate() {
        let (mj, ej) = mc_or_nan(sims[0].as_ref().map(|v| &v[i]));
        let (mg, eg) = mc_or_nan(sims[1].as_ref().map(|v| &v[i]));
        let b = slepian_sandwich(&r, x, DEFAULT_PANEL_ORDER)?;
        t.push(vec![
            snr.into(),
            x.into(),
            mj,
            mg,
            outage_rank1(&sp, x)?.p.into(),
            outage_rank2(&sp, x, s.quad_order, DEFAULT_INNER_GRID)?.p.into(),
            b.lower.into(),
            b.upper.into(),
            outage_continuous(x, w)?.value.into(),
            ej,
            eg,
        ]);
    }
    Ok(t)
}

/// Ports used for an aperture when none are given: 20 per wavelength.
fn dense_ports(w: f64) -> usize {
    ((20.0 * w).ceil() as usize).max(10)
}

fn outage_aperture(s: &Settings) -> Result<Table> {
    let ws = s.apertures_or(&linspace(0.5, 5.0, 10));
    let snrs = s.snr_or(&[-5.0, 0.0]);
    let xs = thresholds(&snrs, s.th_db)?;
    let mc = s.mc()?;
    let mut t = Table::new(&[
        "snr_db",
        "W",
        "N",
        "x",
        "mc_jakes",
        "mc_gauss",
        "continuum",
        "continuum_clamped",
        "std_err_jakes",
        "std_err_gauss",
    ]);
    t.meta("th_db", s.th_db);
    t.meta("ports", if s.ports.is_empty() { "20W (min 10)".to_string() } else { s.ports[0].to_string() });
    let mut rows = Vec::new();
    for &w in &ws {
        let n = s.ports.first().copied().unwrap_or_else(|| dense_ports(w));
        let mut sims = Vec::new();
        for m in CorrelationModel::ALL {
            sims.push(if has(s, m) {
                Some(simulate_outage_many(&matrix(w, n, m)?, &xs, &mc))
            } else {
                None
            });
        }
        for (i, (&snr, &x)) in snrs.iter().zip(&xs).enumerate() {
            let (mj, ej) = mc_or_nan(sims[0].as_ref().map(|v| &v[i]));
            let (mg, eg) = mc_or_nan(sims[1].as_ref().map(|v| &v[i]));
            let c = outage_continuous(x, w)?;
            rows.push((
                i,
                vec![
                    snr.into(),
                    w.into(),
                    n.into(),
                    x.into(),
                    mj,
                    mg,
                    c.value.into(),
                    c.clamped.into(),
                    ej,
                    eg,
                ],
            ));
        }
    }
    // Group rows by SNR, then aperture.
    rows.sort_by_key(|(i, _)| *i);
    for (_, r) in rows {
        t.push(r);
    }
    Ok(t)
}

fn dof(s: &Settings) -> Result<Table> {
    let ws = s.apertures_or(&linspace(0.5, 5.0, 10));
    let n = s.port_count(200);
    let mut t = Table::new(&["W", "pr_jakes", "pr_gauss", "asym_jakes", "asym_gauss"]);
    t.meta("N", n);
    t.meta("asym_jakes_form", "2W+1");
    for &w in &ws {
        t.push(vec![
            w.into(),
            participation_ratio(&matrix(w, n, CorrelationModel::Jakes)?).into(),
            participation_ratio(&matrix(w, n, CorrelationModel::Gaussian)?).into(),
            keff_asymptotic(CorrelationModel::Jakes, w, JakesDof::Continuous)?.into(),
            keff_asymptotic(CorrelationModel::Gaussian, w, JakesDof::Continuous)?.into(),
        ]);
    }
    Ok(t)
}

fn outage_ports(s: &Settings) -> Result<Table> {
    let w = s.aperture(1.0);
    let ns = s.ports_or(&[3, 5, 10, 15, 20, 30, 50, 75, 100]);
    let snrs = s.snr_or(&[-5.0, 0.0]);
    let xs = thresholds(&snrs, s.th_db)?;
    let mc = s.mc()?;
    let mut t = Table::new(&[
        "snr_db",
        "N",
        "x",
        "mc_jakes",
        "mc_gauss",
        "continuum",
        "std_err_jakes",
        "std_err_gauss",
    ]);
    t.meta("W", w);
    t.meta("th_db", s.th_db);
    let mut rows = Vec::new();
    for &n in &ns {
        let mut sims = Vec::new();
        for m in CorrelationModel::ALL {
            sims.push(if has(s, m) {
                Some(simulate_outage_many(&matrix(w, n, m)?, &xs, &mc))
            } else {
                None
            });
        }
        for (i, (&snr, &x)) in snrs.iter().zip(&xs).enumerate() {
            let (mj, ej) = mc_or_nan(sims[0].as_ref().map(|v| &v[i]));
            let (mg, eg) = mc_or_nan(sims[1].as_ref().map(|v| &v[i]));
            rows.push((
                i,
                vec![
                    snr.into(),
                    n.into(),
                    x.into(),
                    mj,
                    mg,
                    outage_continuous(x, w)?.value.into(),
                    ej,
                    eg,
                ],
            ));
        }
    }
    rows.sort_by_key(|(i, _)| *i);
    for (_, r) in rows {
        t.push(r);
    }
    Ok(t)
}

fn kl_convergence(s: &Settings) -> Result<Table> {
    let w = s.aperture(2.0);
    let n = s.port_count(20);
    let k_max = s.rank.unwrap_or(n).min(n);
    let snrs = s.snr_or(&[-5.0]);
    let xs = thresholds(&snrs, s.th_db)?;
    let mc = s.mc()?;
    let mut t = Table::new(&[
        "snr_db",
        "K",
        "mc_trunc_jakes",
        "mc_trunc_gauss",
        "mc_full_jakes",
        "mc_full_gauss",
        "eps_jakes",
        "eps_gauss",
        "std_err_trunc_jakes",
        "std_err_trunc_gauss",
    ]);
    t.meta("W", w);
    t.meta("N", n);
    t.meta("th_db", s.th_db);
    struct PerModel {
        full: Vec<OutageEstimate>,
        trunc: Vec<Vec<OutageEstimate>>,
        eps: Vec<f64>,
    }
    let mut per = Vec::new();
    for m in CorrelationModel::ALL {
        if !has(s, m) {
            per.push(None);
            continue;
        }
        let r = matrix(w, n, m)?;
        let sp = eigendecompose(&r)?;
        let full = simulate_outage_many(&r, &xs, &mc);
        let mut trunc = Vec::new();
        let mut eps = Vec::new();
        for k in 1..=k_max {
            let kl = kl_truncate(&sp, k)?;
            eps.push(kl.truncation_error);
            trunc.push(simulate_outage_truncated_many(&kl, &xs, &mc));
        }
        per.push(Some(PerModel { full, trunc, eps }));
    }
    for (i, &snr) in snrs.iter().enumerate() {
        for k in 1..=k_max {
            let mut row = vec![snr.into(), k.into()];
            let mut errs = Vec::new();
            let mut fulls = Vec::new();
            let mut epss = Vec::new();
            for p in &per {
                let (v, e) = mc_or_nan(p.as_ref().map(|p| &p.trunc[k - 1][i]));
                row.push(v);
                errs.push(e);
                fulls.push(Cell::from(p.as_ref().map_or(f64::NAN, |p| p.full[i].p)));
                epss.push(Cell::from(p.as_ref().map_or(f64::NAN, |p| p.eps[k - 1])));
            }
            row.extend(fulls);
            row.extend(epss);
            row.extend(errs);
            t.push(row);
        }
    }
    Ok(t)
}

fn slepian_blocks(s: &Settings) -> Result<Table> {
    let w = s.aperture(1.0);
    let n = s.port_count(20);
    let model = analytic_model(s);
    let max_b = s.blocks.unwrap_or(8).min(n);
    let counts: Vec<usize> = (0..)
        .map(|j| 1usize << j)
        .take_while(|&b| b <= max_b)
        .collect();
    let snrs = s.snr_or(&linspace(-10.0, 10.0, 9));
    let xs = thresholds(&snrs, s.th_db)?;
    let r = matrix(w, n, model)?;
    let sims = simulate_outage_many(&r, &xs, &s.mc()?);
    let mut cols = vec!["snr_db".to_string(), "x".to_string(), "mc".to_string()];
    for b in &counts {
        cols.push(format!("block_{b}"));
    }
    for b in &counts {
        cols.push(format!("valid_{b}"));
    }
    cols.push("std_err".into());
    let refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = Table::new(&refs);
    t.meta("W", w);
    t.meta("N", n);
    t.meta("model", model);
    t.meta("th_db", s.th_db);
    for ((&snr, &x), sim) in snrs.iter().zip(&xs).zip(&sims) {
        let mut row = vec![snr.into(), x.into(), sim.p.into()];
        let mut flags = Vec::new();
        for &b in &counts {
            let (bound, part) = block_refined_bound(&r, x, b, DEFAULT_PANEL_ORDER)?;
            row.push(bound.into());
            flags.push(part.valid.into());
        }
        row.extend(flags);
        row.push(sim.std_err_or_zero().into());
        t.push(row);
    }
    Ok(t)
}

fn snr_label(db: f64) -> String {
    let text = format!("{db}");
    text.replace('-', "m").replace('.', "p")
}

fn gauss_error(s: &Settings) -> Result<Table> {
    let ws = s.apertures_or(&linspace(0.5, 5.0, 10));
    let n = s.port_count(20);
    let snrs = s.snr_or(&[-5.0, 0.0, 5.0, 10.0]);
    let xs = thresholds(&snrs, s.th_db)?;
    let mc = s.mc()?;
    let mut cols = vec!["W".to_string()];
    for &snr in &snrs {
        let l = snr_label(snr);
        cols.push(format!("mc_jakes_{l}"));
        cols.push(format!("mc_gauss_{l}"));
        cols.push(format!("relerr_{l}"));
    }
    let refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = Table::new(&refs);
    t.meta("N", n);
    t.meta("th_db", s.th_db);
    t.meta("relerr", "|mc_gauss - mc_jakes| / mc_jakes");
    for &w in &ws {
        let j = simulate_outage_many(&matrix(w, n, CorrelationModel::Jakes)?, &xs, &mc);
        let g = simulate_outage_many(&matrix(w, n, CorrelationModel::Gaussian)?, &xs, &mc);
        let mut row = vec![Cell::from(w)];
        for (ej, eg) in j.iter().zip(&g) {
            row.push(ej.p.into());
            row.push(eg.p.into());
            row.push(((eg.p - ej.p).abs() / ej.p).into());
        }
        t.push(row);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(e: Experiment) -> Settings {
        let mut s = Settings::new(e);
        s.trials = Some(2_000);
        s
    }

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert!(!e.name().is_empty());
        }
        assert_eq!(Experiment::GaussError.to_string(), "gauss-error");
    }

    #[test]
    fn kernel_compare_columns() {
        let mut s = quick(Experiment::KernelCompare);
        s.ports = vec![11];
        let t = run(&s).unwrap();
        assert_eq!(t.rows.len(), 11);
        assert_eq!(t.value(0, "jakes"), Some(1.0));
        assert_eq!(t.value(0, "abs_error"), Some(0.0));
    }

    #[test]
    fn psd_marks_singularity() {
        let mut s = quick(Experiment::Psd);
        s.ports = vec![5];
        let t = run(&s).unwrap();
        // Grid -2, -1, 0, 1, 2.
        assert_eq!(t.value(1, "psd_jakes"), Some(f64::INFINITY));
        assert_eq!(t.value(0, "psd_jakes"), Some(0.0));
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().contains(",inf,"));
    }

    #[test]
    fn eigen_energy_reaches_one() {
        let mut s = quick(Experiment::Eigen);
        s.ports = vec![12];
        let t = run(&s).unwrap();
        assert_eq!(t.rows.len(), 12);
        assert!((t.value(11, "energy_gauss").unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn outage_snr_default_columns() {
        let mut s = quick(Experiment::OutageSnr);
        s.snr_db = vec![0.0, 10.0];
        let t = run(&s).unwrap();
        for c in [
            "snr_db", "mc_jakes", "mc_gauss", "rank1", "rank2", "slepian_lo", "slepian_hi",
            "continuum", "std_err_jakes", "std_err_gauss",
        ] {
            assert!(t.column(c).is_some(), "{c}");
        }
        assert_eq!(t.rows.len(), 2);
        assert!(t.value(1, "rank1").unwrap() < t.value(0, "rank1").unwrap());
    }

    #[test]
    fn dof_columns() {
        let mut s = quick(Experiment::Dof);
        s.ports = vec![60];
        s.apertures = vec![1.0, 2.0];
        let t = run(&s).unwrap();
        assert_eq!(t.value(1, "asym_jakes"), Some(5.0));
        assert!(t.value(1, "pr_gauss").unwrap() > t.value(0, "pr_gauss").unwrap());
    }

    #[test]
    fn single_model_leaves_other_column_nan() {
        let mut s = quick(Experiment::OutagePorts);
        s.models = vec![CorrelationModel::Jakes];
        s.ports = vec![5];
        s.snr_db = vec![0.0];
        let t = run(&s).unwrap();
        assert!(t.value(0, "mc_gauss").unwrap().is_nan());
        assert!(t.value(0, "mc_jakes").unwrap() > 0.0);
    }

    #[test]
    fn blocks_and_kl_shapes() {
        let mut s = quick(Experiment::SlepianBlocks);
        s.snr_db = vec![-5.0];
        let t = run(&s).unwrap();
        assert!(t.column("block_8").is_some() && t.column("valid_1").is_some());
        assert_eq!(t.value(0, "valid_1"), Some(1.0));

        let mut s = quick(Experiment::KlConvergence);
        s.ports = vec![6];
        s.apertures = vec![1.0];
        let t = run(&s).unwrap();
        assert_eq!(t.rows.len(), 6);
        assert_eq!(t.value(5, "eps_gauss"), Some(0.0));
    }

    #[test]
    fn gauss_error_labels() {
        let mut s = quick(Experiment::GaussError);
        s.apertures = vec![1.0];
        s.snr_db = vec![-5.0, 2.5];
        let t = run(&s).unwrap();
        assert!(t.column("relerr_m5").is_some());
        assert!(t.column("relerr_2p5").is_some());
    }

    #[test]
    fn validation_rejects_bad_settings() {
        let mut s = quick(Experiment::OutageSnr);
        s.ports = vec![1];
        assert!(s.validate().is_err());
        let mut s = quick(Experiment::OutageSnr);
        s.trials = Some(0);
        assert!(s.validate().is_err());
        let mut s = quick(Experiment::KlConvergence);
        s.ports = vec![5];
        s.rank = Some(6);
        assert!(s.validate().is_err());
        let mut s = quick(Experiment::Dof);
        s.apertures = vec![-1.0];
        assert!(s.validate().is_err());
    }

    #[test]
    fn bodies_are_reproducible() {
        let mut s = quick(Experiment::OutagePorts);
        s.ports = vec![4, 8];
        let a = run(&s).unwrap();
        let b = run(&s).unwrap();
        assert_eq!(a.rows, b.rows);
    }
}
