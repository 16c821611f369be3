//! Probability that at least one schema set is solvable when each of N
//! candidates per action is independently solvable with probability p.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("monte carlo needs at least 100 trials, got {0}")]
    TooFewTrials(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolvabilityModel {
    pub p: f64,
    /// Actions per domain.
    pub m: u32,
    /// LLM instances, i.e. candidates per action.
    pub n: u32,
    /// Number of combinations treated as independent trials; N^M when unset.
    pub k: Option<f64>,
}

impl SolvabilityModel {
    pub fn new(p: f64, m: u32, n: u32) -> Self {
        SolvabilityModel { p, m, n, k: None }
    }

    pub fn with_exponent(mut self, k: f64) -> Self {
        self.k = Some(k);
        self
    }

    pub fn exponent(&self) -> f64 {
        self.k.unwrap_or_else(|| (self.n as f64).powi(self.m as i32))
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(AnalysisError::InvalidModel(format!("p = {} outside [0, 1]", self.p)));
        }
        if self.m == 0 || self.n == 0 {
            return Err(AnalysisError::InvalidModel("M and N must be at least 1".into()));
        }
        if !self.exponent().is_finite() || self.exponent() < 1.0 {
            return Err(AnalysisError::InvalidModel(format!("K = {} must be finite and ≥ 1", self.exponent())));
        }
        Ok(())
    }
}

/// 1 − (1 − p^M)^K, evaluated as −expm1(K·ln(1 − p^M)).
pub fn analytic_success_probability(m: &SolvabilityModel) -> Result<f64, AnalysisError> {
    m.validate()?;
    let pm = m.p.powi(m.m as i32);
    if pm >= 1.0 {
        return Ok(1.0);
    }
    Ok(-(m.exponent() * (-pm).ln_1p()).exp_m1())
}

/// (1 − (1 − p)^N)^M: every action has at least one solvable candidate.
pub fn exact_bucket_probability(m: &SolvabilityModel) -> Result<f64, AnalysisError> {
    m.validate()?;
    let per_action = if m.p >= 1.0 {
        1.0
    } else {
        -(m.n as f64 * (-m.p).ln_1p()).exp_m1()
    };
    Ok(per_action.powi(m.m as i32))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: usize,
}

const BLOCKS: u64 = 64;

/// Simulates N×M Bernoulli(p) candidates per trial. Trials are split into a
/// fixed number of blocks, block b drawing from ChaCha8 stream b of `seed`,
/// so the result does not depend on the thread count.
pub fn monte_carlo_success(m: &SolvabilityModel, trials: usize, seed: u64) -> Result<Estimate, AnalysisError> {
    m.validate()?;
    if trials < 100 {
        return Err(AnalysisError::TooFewTrials(trials));
    }
    let per = trials as u64 / BLOCKS;
    let extra = trials as u64 % BLOCKS;
    let hits: u64 = (0..BLOCKS)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = per + u64::from(b < extra);
            (0..count)
                .filter(|_| (0..m.m).all(|_| (0..m.n).any(|_| rng.random_bool(m.p))))
                .count() as u64
        })
        .sum();
    let est = hits as f64 / trials as f64;
    Ok(Estimate {
        estimate: est,
        stderr: (est * (1.0 - est) / trials as f64).sqrt(),
        trials,
    })
}

/// The `analyze` output object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub p: f64,
    #[serde(rename = "M")]
    pub m: u32,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "K")]
    pub k: f64,
    pub paper_model: f64,
    pub exact_bucket: f64,
    pub monte_carlo: Option<f64>,
    pub stderr: Option<f64>,
}

pub fn analyze(m: &SolvabilityModel, trials: Option<usize>, seed: u64) -> Result<AnalysisReport, AnalysisError> {
    let mc = trials.map(|t| monte_carlo_success(m, t, seed)).transpose()?;
    Ok(AnalysisReport {
        p: m.p,
        m: m.m,
        n: m.n,
        k: m.exponent(),
        paper_model: analytic_success_probability(m)?,
        exact_bucket: exact_bucket_probability(m)?,
        monte_carlo: mc.map(|e| e.estimate),
        stderr: mc.map(|e| e.stderr),
    })
}
