//! Bit-exact regression against recorded Monte Carlo oracle runs.

use std::fs;
use std::path::PathBuf;

use fas_extremes::fieldmodel::{correlation_matrix, ApertureConfig, CorrMatrix};
use fas_extremes::kernels::CorrelationModel;
use fas_extremes::montecarlo::{
    read_fixtures, simulate_ergodic_rate, simulate_outage, write_fixtures, FixtureRecord, McConfig,
};

fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/mc_regression.csv")
}

fn gauss(w: f64, n: usize) -> CorrMatrix {
    correlation_matrix(&ApertureConfig::new(w, n, CorrelationModel::Gaussian).unwrap()).unwrap()
}

fn compute() -> Vec<FixtureRecord> {
    let cfg = McConfig::new(1_000_000, 42, 4).unwrap();
    let mut out = Vec::new();
    let e = simulate_outage(&gauss(1.0, 10), 1.0, &cfg);
    out.push(FixtureRecord::new("outage;gauss;N=10;W=1;x=1", &cfg, e.p, e.std_err.unwrap()));
    let e = simulate_outage(&CorrMatrix::equicorrelated(4, 0.5).unwrap(), 1.0, &cfg);
    out.push(FixtureRecord::new("outage;equicorr;N=4;rho=0.5;x=1", &cfg, e.p, e.std_err.unwrap()));
    let r = simulate_ergodic_rate(&gauss(1.0, 10), 10.0, &cfg).unwrap();
    out.push(FixtureRecord::new("ergodic;gauss;N=10;W=1;snr=10", &cfg, r.mean, r.std_err));
    out
}

#[test]
fn monte_carlo_reproduces_recorded_fixtures() {
    let text = fs::read_to_string(fixture_path()).expect("fixture file");
    let recorded = read_fixtures(text.as_bytes()).unwrap();
    let fresh = compute();
    assert_eq!(recorded.len(), fresh.len());
    for (r, f) in recorded.iter().zip(&fresh) {
        assert_eq!(r.config_hash, f.config_hash, "{}", r.description);
        assert_eq!(r.estimate.to_bits(), f.estimate.to_bits(), "{}", r.description);
        assert_eq!(r.std_err.to_bits(), f.std_err.to_bits(), "{}", r.description);
    }
}

/// Rewrites the fixture file; run with `--ignored` after an intentional
/// change to the sampler.
#[test]
#[ignore]
fn regenerate_fixtures() {
    let mut buf = Vec::new();
    write_fixtures(&mut buf, &compute()).unwrap();
    fs::write(fixture_path(), buf).unwrap();
}
