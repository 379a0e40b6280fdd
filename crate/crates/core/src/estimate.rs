//! Uniform result record shared by every outage evaluator.

use std::fmt;

/// Which evaluator produced an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    MonteCarlo,
    Rank1,
    Rank2,
    RankK,
    SandwichLower,
    SandwichUpper,
    Continuum,
    Piterbarg,
    Block,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::MonteCarlo => "mc",
            Method::Rank1 => "rank1",
            Method::Rank2 => "rank2",
            Method::RankK => "rankK",
            Method::SandwichLower => "sandwich_lo",
            Method::SandwichUpper => "sandwich_hi",
            Method::Continuum => "continuum",
            Method::Piterbarg => "piterbarg",
            Method::Block => "block",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// An outage probability with provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub p: f64,
    pub method: Method,
    /// Monte Carlo trial count.
    pub trials: Option<u64>,
    /// Monte Carlo standard error `sqrt(p (1 - p) / trials)`.
    pub std_err: Option<f64>,
    /// Raw value before clipping to `[0, 1]`, when clipping happened.
    pub raw: Option<f64>,
    /// False when the evaluator is outside its range of validity.
    pub valid: bool,
}

impl OutageEstimate {
    pub fn analytic(p: f64, method: Method) -> Self {
        let clipped = p.clamp(0.0, 1.0);
        OutageEstimate {
            p: clipped,
            method,
            trials: None,
            std_err: None,
            raw: (clipped != p).then_some(p),
            valid: true,
        }
    }

    pub fn monte_carlo(hits: u64, trials: u64) -> Self {
        let p = hits as f64 / trials as f64;
        OutageEstimate {
            p,
            method: Method::MonteCarlo,
            trials: Some(trials),
            std_err: Some((p * (1.0 - p) / trials as f64).sqrt()),
            raw: None,
            valid: true,
        }
    }

    pub fn clamped(&self) -> bool {
        self.raw.is_some()
    }

    pub fn std_err_or_zero(&self) -> f64 {
        self.std_err.unwrap_or(0.0)
    }
}
