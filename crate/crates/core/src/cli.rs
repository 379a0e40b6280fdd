//! Command-line front end for the experiment runners.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, ValueEnum};

use crate::error::FasError;
use crate::experiments::{run, Experiment, Settings, Table};
use crate::kernels::CorrelationModel;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentArg {
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

impl From<ExperimentArg> for Experiment {
    fn from(e: ExperimentArg) -> Self {
        match e {
            ExperimentArg::KernelCompare => Experiment::KernelCompare,
            ExperimentArg::Psd => Experiment::Psd,
            ExperimentArg::Eigen => Experiment::Eigen,
            ExperimentArg::OutageSnr => Experiment::OutageSnr,
            ExperimentArg::OutageAperture => Experiment::OutageAperture,
            ExperimentArg::Dof => Experiment::Dof,
            ExperimentArg::OutagePorts => Experiment::OutagePorts,
            ExperimentArg::KlConvergence => Experiment::KlConvergence,
            ExperimentArg::SlepianBlocks => Experiment::SlepianBlocks,
            ExperimentArg::GaussError => Experiment::GaussError,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Jakes,
    Gauss,
    Both,
}

impl ModelArg {
    fn models(self) -> Vec<CorrelationModel> {
        match self {
            ModelArg::Jakes => vec![CorrelationModel::Jakes],
            ModelArg::Gauss => vec![CorrelationModel::Gaussian],
            ModelArg::Both => CorrelationModel::ALL.to_vec(),
        }
    }
}

/// Outage experiments for fluid antenna systems under correlated Rayleigh
/// fading. Each run writes one CSV table.
#[derive(Debug, Parser)]
#[command(name = "fas-extremes", version)]
pub struct Args {
    /// Experiment to run.
    #[arg(value_enum)]
    pub experiment: ExperimentArg,

    /// Correlation kernel(s).
    #[arg(long, value_enum, default_value_t = ModelArg::Both)]
    pub model: ModelArg,

    /// Normalized aperture(s) in wavelengths, comma separated.
    #[arg(long = "W", value_delimiter = ',', allow_hyphen_values = true)]
    pub aperture: Vec<f64>,

    /// Port count(s), comma separated.
    #[arg(long = "N", value_delimiter = ',')]
    pub ports: Vec<usize>,

    /// Average SNR values in dB, comma separated.
    #[arg(long = "snr-db", value_delimiter = ',', allow_hyphen_values = true)]
    pub snr_db: Vec<f64>,

    /// SNR threshold in dB.
    #[arg(long = "th-db", default_value_t = 0.0, allow_hyphen_values = true)]
    pub th_db: f64,

    /// Largest KL rank.
    #[arg(long = "K")]
    pub rank: Option<usize>,

    /// Quadrature order for the rank-2 outer integral.
    #[arg(long = "quad-order", default_value_t = 16)]
    pub quad_order: usize,

    /// Largest block count (powers of two up to this value are used).
    #[arg(long)]
    pub blocks: Option<usize>,

    /// Monte Carlo trials per point.
    #[arg(long)]
    pub trials: Option<u64>,

    /// RNG seed.
    #[arg(long, env = "FAS_SEED", default_value_t = 1)]
    pub seed: u64,

    /// Monte Carlo partitions; defaults to the available cores.
    #[arg(long)]
    pub workers: Option<usize>,

    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Args {
    pub fn settings(&self) -> Settings {
        let workers = self.workers.unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        });
        Settings {
            experiment: self.experiment.into(),
            models: self.model.models(),
            apertures: self.aperture.clone(),
            ports: self.ports.clone(),
            snr_db: self.snr_db.clone(),
            th_db: self.th_db,
            rank: self.rank,
            quad_order: self.quad_order,
            blocks: self.blocks,
            trials: self.trials,
            seed: self.seed,
            workers,
        }
    }
}

fn write_table(table: &Table, command: &str, out: &mut dyn Write) -> io::Result<()> {
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    writeln!(out, "# command: {command}")?;
    writeln!(out, "# timestamp: {stamp}")?;
    table.write_csv(out)
}

/// Writes through a sibling temporary file so a failed run leaves nothing
/// behind at `path`.
fn write_file(path: &Path, table: &Table, command: &str) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    let result = (|| {
        let mut f = io::BufWriter::new(fs::File::create(&tmp)?);
        write_table(table, command, &mut f)?;
        f.flush()?;
        drop(f);
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

fn is_usage(e: &FasError) -> bool {
    matches!(e, FasError::Config(_) | FasError::Domain(_))
}

/// Parses `argv`, runs the experiment and returns the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let args = match Args::try_parse_from(&argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let settings = args.settings();
    if let Err(e) = settings.validate() {
        eprintln!("fas-extremes: {e}");
        return EXIT_USAGE;
    }
    let table = match run(&settings) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("fas-extremes: {e}");
            return if is_usage(&e) { EXIT_USAGE } else { EXIT_NUMERICAL };
        }
    };
    let command = argv
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");
    let written = match &args.out {
        Some(path) => write_file(path, &table, &command),
        None => write_table(&table, &command, &mut io::stdout().lock()),
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("fas-extremes: cannot write output: {e}");
            EXIT_NUMERICAL
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lists_and_negative_values() {
        let a = Args::try_parse_from([
            "fas-extremes",
            "outage-snr",
            "--snr-db",
            "-5,0,5",
            "--W",
            "1,2",
            "--N",
            "10",
            "--th-db",
            "-3",
            "--model",
            "gauss",
            "--workers",
            "2",
        ])
        .unwrap();
        let s = a.settings();
        assert_eq!(s.snr_db, vec![-5.0, 0.0, 5.0]);
        assert_eq!(s.apertures, vec![1.0, 2.0]);
        assert_eq!(s.th_db, -3.0);
        assert_eq!(s.models, vec![CorrelationModel::Gaussian]);
        assert_eq!(s.workers, 2);
    }

    #[test]
    fn unknown_experiment_is_usage_error() {
        assert_eq!(run_cli(["fas-extremes", "nope"]), EXIT_USAGE);
        assert_eq!(run_cli(["fas-extremes", "dof", "--N", "abc"]), EXIT_USAGE);
        assert_eq!(run_cli(["fas-extremes", "dof", "--W", "-1"]), EXIT_USAGE);
    }
}
