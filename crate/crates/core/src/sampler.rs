//! Proportional sampling end to end: error budget, pipeline assembly,
//! Las Vegas sampling and total-variation checks.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blockenc::{
    amplify, phase_oracle_model, plan_amplification, AmplificationPlan, BlockEncodedState,
    EigenphaseEnsemble, OracleTable, ParityPair, QueryCount, StatePrep,
};
use crate::error::{Error, Result};
use crate::phasefn::{degree_for_epsilon, FourierTruncation, SmoothingSpec, DEFAULT_DEGREE_CAP};

/// Width of the smoothing window around `±π`.
pub const DELTA: f64 = PI / 2.0;

/// Default completion headroom.
pub const DEFAULT_ETA: f64 = 0.01;

/// Draws allowed per requested sample before giving up.
pub const RETRY_FACTOR: u64 = 1000;

/// Per-element target (`Element`) or the stricter `eps/N` target used to
/// bound total variation (`Tv`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BudgetMode {
    #[default]
    Element,
    Tv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    pub mode: BudgetMode,
    /// Requested error.
    pub eps: f64,
    /// Per-element error actually budgeted (`eps`, or `eps/N` in TV mode).
    pub eps_element: f64,
    pub c_bar: f64,
    /// `ε′ = c̄·eps_element/2`.
    pub eps_prime: f64,
    /// Smallest `m′` with `2^{-(m′-1)} <= ε′/2`.
    pub m_prime: u32,
    pub d: usize,
    pub delta: f64,
    pub p: usize,
    /// Certified truncation error, at most `ε′/16`.
    pub sup_error: f64,
    /// Whether `ε′ <= c̄/2`; false only for vacuous targets.
    pub eps_prime_in_range: bool,
}

impl ErrorBudget {
    /// The three budget inequalities.
    pub fn holds(&self) -> bool {
        self.eps_prime_in_range
            && (-(self.m_prime as f64 - 1.0)).exp2() <= self.eps_prime / 2.0
            && self.sup_error <= self.eps_prime / 16.0
    }
}

/// `⌈log₂(4/ε′)⌉`, at least 1.
pub fn truncation_bits(eps_prime: f64) -> u32 {
    ((4.0 / eps_prime).log2().ceil().max(1.0)) as u32
}

/// Budget for `table` at error `eps` with smoothness `p`, and the
/// truncation of `g_p` that meets it.
pub fn error_budget(
    table: &OracleTable,
    eps: f64,
    p: usize,
    mode: BudgetMode,
) -> Result<(ErrorBudget, FourierTruncation)> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::param("eps", "must be positive and finite"));
    }
    let c_bar = table.mean();
    if c_bar <= 0.0 {
        return Err(Error::ZeroSuccess);
    }
    let eps_element = match mode {
        BudgetMode::Element => eps,
        BudgetMode::Tv => eps / table.len() as f64,
    };
    let eps_prime = c_bar * eps_element / 2.0;
    let m_prime = truncation_bits(eps_prime);
    if m_prime > 52 {
        return Err(Error::param(
            "eps",
            "needs more than 52 bits of oracle precision",
        ));
    }
    let spec = SmoothingSpec::new(p, DELTA)?;
    let (d, trunc) = degree_for_epsilon(spec, eps_prime / 16.0, DEFAULT_DEGREE_CAP)?;
    Ok((
        ErrorBudget {
            mode,
            eps,
            eps_element,
            c_bar,
            eps_prime,
            m_prime,
            d,
            delta: DELTA,
            p,
            sup_error: trunc.sup_error,
            eps_prime_in_range: eps_prime <= c_bar / 2.0,
        },
        trunc,
    ))
}

/// `c(x) = 1/4` on the first half, `1/8` on the second; `c̄ = 3/16`.
pub fn separation_instance(n: usize) -> Result<OracleTable> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::param(
            "N",
            format!("{n} is not a positive even number"),
        ));
    }
    let values = (0..n)
        .map(|x| if x < n / 2 { 0.25 } else { 0.125 })
        .collect();
    OracleTable::new(values, 3)
}

/// A fully assembled sampler: budget, synthesized blocks, simulated state
/// preparation and its amplification.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub table: OracleTable,
    pub budget: ErrorBudget,
    pub ensemble: EigenphaseEnsemble,
    pub pair: ParityPair,
    pub prep: StatePrep,
    /// `S|Ψ⟩` before amplification.
    pub initial: BlockEncodedState,
    pub plan: AmplificationPlan,
    pub amplified: BlockEncodedState,
    pub queries: QueryCount,
}

impl Pipeline {
    pub fn build(
        table: OracleTable,
        eps: f64,
        p: usize,
        mode: BudgetMode,
        eta: f64,
    ) -> Result<Self> {
        let (budget, trunc) = error_budget(&table, eps, p, mode)?;
        let ensemble = phase_oracle_model(&table, budget.m_prime)?;
        let pair = ParityPair::synthesize(&trunc, eta)?;
        let prep = StatePrep::new(&ensemble, &pair.seq0, &pair.seq1);
        let initial = prep.prepare();
        let plan = plan_amplification(initial.success_probability().sqrt())?;
        let amplified = amplify(&prep, &plan);
        let queries = QueryCount::new(&pair, plan.iterations);
        Ok(Pipeline {
            table,
            budget,
            ensemble,
            pair,
            prep,
            initial,
            plan,
            amplified,
            queries,
        })
    }
}

/// `q(x) = |amp_x|² / P(00)` of the amplified state, without shot noise.
pub fn exact_distribution(pipeline: &Pipeline) -> Result<Vec<f64>> {
    pipeline.amplified.conditional_distribution()
}

/// `½ Σ |p(x) - q(x)|`.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch(p.len(), q.len()));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Largest `|q(x) - c(x)/Σc|`.
pub fn max_element_error(q: &[f64], target: &[f64]) -> Result<f64> {
    if q.len() != target.len() {
        return Err(Error::LengthMismatch(q.len(), target.len()));
    }
    Ok(q.iter()
        .zip(target)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub n_samples: u64,
    pub seed: u64,
    pub counts: Vec<u64>,
    /// Las Vegas attempts, successful or not.
    pub trials: u64,
    pub failed_post_selections: u64,
    pub oracle_calls_per_trial: u64,
    pub oracle_queries: u64,
    pub success_probability: f64,
    pub amplification_iterations: usize,
    /// TV distance between the exact output distribution and `c/Σc`.
    pub tv_exact: f64,
    /// TV distance between the empirical histogram and the exact output
    /// distribution.
    pub tv_empirical: f64,
    /// Largest per-element error of the exact output distribution.
    pub max_element_error: f64,
}

/// Draws `n_samples` elements: each attempt measures the ancillae of the
/// amplified state, retrying until `|00⟩`, then draws `x` from the success
/// branch by inverse CDF.
pub fn sample(pipeline: &Pipeline, n_samples: u64, seed: u64) -> Result<SampleReport> {
    if n_samples == 0 {
        return Err(Error::param("n_samples", "must be at least 1"));
    }
    let exact = exact_distribution(pipeline)?;
    let target = pipeline.table.target_distribution()?;
    let success = pipeline.amplified.success_probability();
    let mut cdf = Vec::with_capacity(exact.len());
    let mut acc = 0.0;
    for q in &exact {
        acc += q;
        cdf.push(acc);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cap = RETRY_FACTOR * n_samples;
    let mut counts = vec![0u64; exact.len()];
    let mut trials = 0u64;
    let mut failed = 0u64;
    for _ in 0..n_samples {
        loop {
            trials += 1;
            if trials > cap {
                return Err(Error::RetryCap(cap));
            }
            if rng.random::<f64>() < success {
                let u = rng.random::<f64>() * acc;
                let x = cdf.partition_point(|&c| c <= u).min(exact.len() - 1);
                counts[x] += 1;
                break;
            }
            failed += 1;
        }
    }

    let empirical: Vec<f64> = counts
        .iter()
        .map(|&c| c as f64 / n_samples as f64)
        .collect();
    let per_trial = pipeline.queries.oracle_calls_per_trial as u64;
    Ok(SampleReport {
        n_samples,
        seed,
        counts,
        trials,
        failed_post_selections: failed,
        oracle_calls_per_trial: per_trial,
        oracle_queries: trials * per_trial,
        success_probability: success,
        amplification_iterations: pipeline.plan.iterations,
        tv_exact: tv_distance(&exact, &target)?,
        tv_empirical: tv_distance(&empirical, &exact)?,
        max_element_error: max_element_error(&exact, &target)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub eps: f64,
    pub p: usize,
    /// Oracle calls per Las Vegas attempt.
    pub queries: u64,
    pub tv_exact: f64,
    pub tv_empirical: f64,
}

/// One row per `(eps, N)` on the separation family.
pub fn query_scaling_sweep(
    p: usize,
    eps_list: &[f64],
    n_list: &[usize],
    n_samples: u64,
    seed: u64,
    eta: f64,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(eps_list.len() * n_list.len());
    for &eps in eps_list {
        for &n in n_list {
            let pipeline =
                Pipeline::build(separation_instance(n)?, eps, p, BudgetMode::Element, eta)?;
            let report = sample(&pipeline, n_samples, seed)?;
            rows.push(SweepRow {
                n,
                eps,
                p,
                queries: report.oracle_calls_per_trial,
                tv_exact: report.tv_exact,
                tv_empirical: report.tv_empirical,
            });
        }
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: std::io::Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
