use fas_extremes::bounds::{
    block_refined_bound, equicorr_cdf_exact, slepian_sandwich, DEFAULT_PANEL_ORDER,
};
use fas_extremes::fieldmodel::{correlation_matrix, ApertureConfig, CorrMatrix};
use fas_extremes::kernels::CorrelationModel;
use fas_extremes::montecarlo::{simulate_outage, McConfig};

fn mc() -> McConfig {
    McConfig::new(1_000_000, 77, 4).unwrap()
}

#[test]
fn equicorrelated_cdf_matches_simulation() {
    let exact = equicorr_cdf_exact(1.0, 0.5, 4, DEFAULT_PANEL_ORDER).unwrap();
    let sim = simulate_outage(&CorrMatrix::equicorrelated(4, 0.5).unwrap(), 1.0, &mc());
    assert!((exact - sim.p).abs() < 3.0 * sim.std_err.unwrap(), "{exact} vs {sim:?}");
}

#[test]
fn sandwich_contains_simulated_outage() {
    for m in CorrelationModel::ALL {
        let r = correlation_matrix(&ApertureConfig::new(1.0, 20, m).unwrap()).unwrap();
        let b = slepian_sandwich(&r, 1.0, DEFAULT_PANEL_ORDER).unwrap();
        let sim = simulate_outage(&r, 1.0, &mc());
        let se = sim.std_err.unwrap();
        assert!(
            b.lower - 3.0 * se <= sim.p && sim.p <= b.upper + 3.0 * se,
            "{m}: {sim:?} outside [{}, {}]",
            b.lower,
            b.upper
        );
    }
}

#[test]
fn block_bound_endpoints() {
    let r = correlation_matrix(&ApertureConfig::new(1.0, 20, CorrelationModel::Gaussian).unwrap())
        .unwrap();
    let s = slepian_sandwich(&r, 1.0, DEFAULT_PANEL_ORDER).unwrap();
    let (b1, p1) = block_refined_bound(&r, 1.0, 1, DEFAULT_PANEL_ORDER).unwrap();
    assert!((b1 - s.lower).abs() < 1e-14);
    assert!(p1.valid);
    for count in [2, 4, 8] {
        let (b, p) = block_refined_bound(&r, 1.0, count, DEFAULT_PANEL_ORDER).unwrap();
        assert!((0.0..=1.0).contains(&b));
        assert_eq!(p.len(), count);
        assert!(!p.valid, "dense grid should violate the block condition");
    }
}
