//! Multi-seed studies: run a set of methods over a common seed list,
//! aggregate per-seed outcomes, and export comparison tables and
//! convergence curves.
//!
//! A *method* is a (sampler, promotion rule) pair. All methods share the
//! bracket ladder and the per-seed sampling streams, so two methods on
//! the same seed see identical candidate draws wherever both sample
//! uniformly — differences in outcomes come from promotion decisions, not
//! from sampling luck.

use rayon::prelude::*;

use crate::benchio::BenchmarkTable;
use crate::error::{Error, Result};
use crate::scalarize::{ScalarMethod, DEFAULT_RHO};
use crate::scheduler::{
    run_hyperband, NonDominatedRank, RankStrategy, RunTrace, SampleStrategy, ScalarizedRank,
    SingleObjectiveRank, UniformSampler,
};
use crate::transfer::{
    fit_normalizer, fit_surrogate, TransferCorpus, TransferSampler, DEFAULT_SIGMA_FLOOR2,
};
use crate::types::Fidelity;

/// The methods a study can compare. Labels follow the
/// `HB[+rule][+tr]` scheme: the promotion rule defaults to error-only
/// ranking, and `tr` swaps uniform sampling for the transfer sampler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Uniform sampling, error-only promotion.
    Hb,
    /// Uniform sampling, non-dominated promotion.
    HbNd,
    /// Uniform sampling, random-weight linear scalarization.
    HbRw,
    /// Uniform sampling, ParEGO scalarization.
    HbParego,
    /// Uniform sampling, hypervolume scalarization.
    HbHv,
    /// Transfer sampling, error-only promotion.
    HbTr,
    /// Transfer sampling, non-dominated promotion.
    HbNdTr,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Hb,
        Method::HbNd,
        Method::HbRw,
        Method::HbParego,
        Method::HbHv,
        Method::HbTr,
        Method::HbNdTr,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Method::Hb => "HB",
            Method::HbNd => "HB+ND",
            Method::HbRw => "HB+RW",
            Method::HbParego => "HB+Parego",
            Method::HbHv => "HB+HV",
            Method::HbTr => "HB+tr",
            Method::HbNdTr => "HB+ND+tr",
        }
    }

    /// Whether this method samples from a fitted transfer surrogate.
    pub fn uses_transfer(&self) -> bool {
        matches!(self, Method::HbTr | Method::HbNdTr)
    }

    fn ranker(&self, bench: &BenchmarkTable, rho: f64) -> Box<dyn RankStrategy> {
        match self {
            Method::Hb | Method::HbTr => Box::new(SingleObjectiveRank {
                objective_index: bench.error_index(),
            }),
            Method::HbNd | Method::HbNdTr => Box::new(NonDominatedRank),
            Method::HbRw => Box::new(ScalarizedRank {
                method: ScalarMethod::Linear,
                rho,
            }),
            Method::HbParego => Box::new(ScalarizedRank {
                method: ScalarMethod::ParEgo,
                rho,
            }),
            Method::HbHv => Box::new(ScalarizedRank {
                method: ScalarMethod::Hypervolume,
                rho,
            }),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let known: Vec<&str> = Method::ALL.iter().map(|m| m.label()).collect();
                Error::invalid(format!(
                    "unknown method `{s}` (known: {})",
                    known.join(", ")
                ))
            })
    }
}

/// Shape of one study: which methods to run, on which seeds, and the
/// shared bracket parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub methods: Vec<Method>,
    pub seeds: Vec<u64>,
    pub r_max: Fidelity,
    pub eta: u32,
    /// ParEGO augmentation weight (scalarized promotion rules only).
    pub rho: f64,
    /// Variance floor for transfer-surrogate sampling.
    pub sigma_floor2: f64,
    /// Worker threads; 1 runs everything on the calling thread.
    pub threads: usize,
}

impl StudyConfig {
    pub fn new(methods: Vec<Method>, r_max: Fidelity) -> Self {
        Self {
            methods,
            seeds: (0..=29).collect(),
            r_max,
            eta: 3,
            rho: DEFAULT_RHO,
            sigma_floor2: DEFAULT_SIGMA_FLOOR2,
            threads: 1,
        }
    }
}

/// What one seeded run achieved: best full-fidelity error and the total
/// simulated charges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedOutcome {
    pub final_error: f64,
    pub total_runtime_s: f64,
    pub total_cost_usd: f64,
}

/// One method's outcomes across all seeds, plus their means.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodResult {
    pub method: Method,
    pub outcomes: Vec<SeedOutcome>,
    pub mean: SeedOutcome,
}

/// Aggregated study outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult {
    pub methods: Vec<MethodResult>,
    /// Index of the row other rows are compared against: the plain
    /// error-only baseline when present, otherwise the first method.
    pub baseline: usize,
    pub has_runtime: bool,
    pub has_cost: bool,
}

/// A study's aggregates plus the raw traces behind them,
/// `traces[method][seed]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyOutput {
    pub result: StudyResult,
    pub traces: Vec<Vec<RunTrace>>,
}

/// Baseline-to-method ratio in percent, rounded half away from zero.
/// The baseline compared against itself reads 100; values above 100 mean
/// the method improves on the baseline for that metric.
pub fn percentage(baseline_mean: f64, method_mean: f64) -> i64 {
    (100.0 * baseline_mean / method_mean).round() as i64
}

fn outcome_from_trace(bench: &BenchmarkTable, trace: &RunTrace) -> Result<SeedOutcome> {
    let max_fid = trace.max_fidelity().ok_or(Error::EmptyInput {
        op: "outcome_from_trace",
    })?;
    let err_idx = bench.error_index();
    let final_error = trace
        .events
        .iter()
        .filter(|e| e.fidelity == max_fid)
        .map(|e| e.objectives[err_idx])
        .fold(f64::INFINITY, f64::min);
    Ok(SeedOutcome {
        final_error,
        total_runtime_s: trace.total_runtime_s(),
        total_cost_usd: trace.total_cost_usd(),
    })
}

fn mean_outcome(outcomes: &[SeedOutcome]) -> SeedOutcome {
    let n = outcomes.len() as f64;
    SeedOutcome {
        final_error: outcomes.iter().map(|o| o.final_error).sum::<f64>() / n,
        total_runtime_s: outcomes.iter().map(|o| o.total_runtime_s).sum::<f64>() / n,
        total_cost_usd: outcomes.iter().map(|o| o.total_cost_usd).sum::<f64>() / n,
    }
}

/// Runs every configured method on every seed and aggregates the results.
///
/// The transfer surrogate, when any method needs one, is fitted once on
/// the corpus and shared across methods and seeds. With `threads > 1`
/// the (method, seed) jobs run on a local thread pool; results are
/// collected in order, so the output is identical to a serial run.
pub fn run_study(
    bench: &BenchmarkTable,
    corpus: Option<&TransferCorpus>,
    config: &StudyConfig,
) -> Result<StudyOutput> {
    if config.methods.is_empty() {
        return Err(Error::EmptyInput {
            op: "run_study (methods)",
        });
    }
    if config.seeds.is_empty() {
        return Err(Error::EmptyInput {
            op: "run_study (seeds)",
        });
    }
    let mut seen = std::collections::HashSet::new();
    for m in &config.methods {
        if !seen.insert(*m) {
            return Err(Error::invalid(format!("method {m} is listed twice")));
        }
    }
    let mut seed_set = std::collections::HashSet::new();
    for s in &config.seeds {
        if !seed_set.insert(*s) {
            return Err(Error::invalid(format!("seed {s} is listed twice")));
        }
    }
    if config.threads == 0 {
        return Err(Error::invalid("thread count must be at least 1"));
    }
    if config.r_max > bench.max_fidelity() {
        return Err(Error::invalid(format!(
            "budget {} exceeds the benchmark's maximum fidelity {}",
            config.r_max,
            bench.max_fidelity()
        )));
    }
    if !(config.rho.is_finite() && config.rho >= 0.0) {
        return Err(Error::invalid("rho must be non-negative"));
    }

    let transfer = if config.methods.iter().any(Method::uses_transfer) {
        let corpus = corpus
            .ok_or_else(|| Error::invalid("transfer methods need a corpus, but none was given"))?;
        if corpus.n_configs() != bench.n_configs() {
            return Err(Error::invalid(format!(
                "corpus covers {} configs but the benchmark grid has {}",
                corpus.n_configs(),
                bench.n_configs()
            )));
        }
        if corpus.objective_names() != bench.objective_names() {
            return Err(Error::invalid(format!(
                "corpus objectives {:?} do not match benchmark objectives {:?}",
                corpus.objective_names(),
                bench.objective_names()
            )));
        }
        let normalizer = fit_normalizer(corpus)?;
        let surrogate = fit_surrogate(corpus, &normalizer)?;
        Some(TransferSampler::new(surrogate, config.sigma_floor2)?)
    } else {
        None
    };

    let uniform = UniformSampler;
    let run_one = |method: Method, seed: u64| -> Result<RunTrace> {
        let ranker = method.ranker(bench, config.rho);
        let sampler: &dyn SampleStrategy = if method.uses_transfer() {
            transfer.as_ref().expect("fitted above")
        } else {
            &uniform
        };
        run_hyperband(
            bench,
            config.r_max,
            config.eta,
            sampler,
            ranker.as_ref(),
            seed,
        )
    };

    let jobs: Vec<(Method, u64)> = config
        .methods
        .iter()
        .flat_map(|&m| config.seeds.iter().map(move |&s| (m, s)))
        .collect();
    let flat: Vec<RunTrace> = if config.threads == 1 {
        jobs.iter()
            .map(|&(m, s)| run_one(m, s))
            .collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::invalid(format!("worker pool failed to start: {e}")))?;
        pool.install(|| {
            jobs.par_iter()
                .map(|&(m, s)| run_one(m, s))
                .collect::<Result<_>>()
        })?
    };

    let mut traces: Vec<Vec<RunTrace>> = Vec::with_capacity(config.methods.len());
    let mut flat = flat.into_iter();
    for _ in &config.methods {
        traces.push(flat.by_ref().take(config.seeds.len()).collect());
    }

    let mut methods = Vec::with_capacity(config.methods.len());
    for (&method, seed_traces) in config.methods.iter().zip(&traces) {
        let outcomes: Vec<SeedOutcome> = seed_traces
            .iter()
            .map(|t| outcome_from_trace(bench, t))
            .collect::<Result<_>>()?;
        let mean = mean_outcome(&outcomes);
        methods.push(MethodResult {
            method,
            outcomes,
            mean,
        });
    }
    let baseline = config
        .methods
        .iter()
        .position(|m| *m == Method::Hb)
        .unwrap_or(0);
    let result = StudyResult {
        methods,
        baseline,
        has_runtime: bench.runtime_index().is_some(),
        has_cost: bench.cost_index().is_some(),
    };
    Ok(StudyOutput { result, traces })
}

/// Renders the study as an aligned text table. Each cell shows the mean
/// and, in parentheses, the baseline-to-method percentage; runtimes are
/// reported in hours.
pub fn render_table(result: &StudyResult) -> String {
    let base = &result.methods[result.baseline].mean;
    let mut header = vec!["method".to_string(), "error".to_string()];
    if result.has_runtime {
        header.push("runtime_h".to_string());
    }
    if result.has_cost {
        header.push("cost_usd".to_string());
    }
    let mut rows = vec![header];
    for m in &result.methods {
        let mut row = vec![
            m.method.label().to_string(),
            format!(
                "{:.4} ({})",
                m.mean.final_error,
                percentage(base.final_error, m.mean.final_error)
            ),
        ];
        if result.has_runtime {
            row.push(format!(
                "{:.2} ({})",
                m.mean.total_runtime_s / 3600.0,
                percentage(base.total_runtime_s, m.mean.total_runtime_s)
            ));
        }
        if result.has_cost {
            row.push(format!(
                "{:.2} ({})",
                m.mean.total_cost_usd,
                percentage(base.total_cost_usd, m.mean.total_cost_usd)
            ));
        }
        rows.push(row);
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        out.push('|');
        for (cell, w) in row.iter().zip(&widths) {
            out.push_str(&format!(" {cell:<w$} |"));
        }
        out.push('\n');
        if i == 0 {
            out.push('|');
            for w in &widths {
                out.push_str(&format!("{:-<1$}|", "", w + 2));
            }
            out.push('\n');
        }
    }
    out
}

/// Exports mean best-error-so-far curves as CSV with columns
/// `method,axis,x,mean,stderr`.
///
/// For each charged axis (runtime, then cost, when the benchmark carries
/// them), the grid of x values pools every seed's event boundaries,
/// starting at the largest first-event boundary so each seed already has
/// an observation at every reported x. The mean is over seeds of the
/// running best error; stderr is the sample standard error (0 for a
/// single seed).
pub fn convergence_csv(output: &StudyOutput, bench: &BenchmarkTable) -> String {
    type AxisReader = fn(&crate::scheduler::TraceEvent) -> f64;
    let err_idx = bench.error_index();
    let mut axes: Vec<(&str, AxisReader)> = Vec::new();
    if output.result.has_runtime {
        axes.push(("runtime_s", |e| e.cumulative_runtime_s));
    }
    if output.result.has_cost {
        axes.push(("cost_usd", |e| e.cumulative_cost_usd));
    }
    let mut out = String::from("method,axis,x,mean,stderr\n");
    for (m, seed_traces) in output.result.methods.iter().zip(&output.traces) {
        for &(axis, coord) in &axes {
            // Per seed: event boundaries with the running best error.
            let series: Vec<Vec<(f64, f64)>> = seed_traces
                .iter()
                .map(|t| {
                    let mut best = f64::INFINITY;
                    t.events
                        .iter()
                        .map(|e| {
                            best = best.min(e.objectives[err_idx]);
                            (coord(e), best)
                        })
                        .collect()
                })
                .collect();
            if series.iter().any(|s| s.is_empty()) {
                continue;
            }
            let start = series
                .iter()
                .map(|s| s[0].0)
                .fold(f64::NEG_INFINITY, f64::max);
            let mut grid: Vec<f64> = series.iter().flatten().map(|&(x, _)| x).collect();
            grid.sort_by(|a, b| a.partial_cmp(b).expect("charges are finite"));
            grid.dedup();
            grid.retain(|&x| x >= start);
            let mut cursor = vec![0usize; series.len()];
            let mut best = vec![f64::INFINITY; series.len()];
            for &x in &grid {
                for (s, serie) in series.iter().enumerate() {
                    while cursor[s] < serie.len() && serie[cursor[s]].0 <= x {
                        best[s] = serie[cursor[s]].1;
                        cursor[s] += 1;
                    }
                }
                let n = best.len() as f64;
                let mean = best.iter().sum::<f64>() / n;
                let stderr = if best.len() > 1 {
                    let var = best.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (n - 1.0);
                    (var / n).sqrt()
                } else {
                    0.0
                };
                out.push_str(&format!(
                    "{},{axis},{x},{mean},{stderr}\n",
                    m.method.label()
                ));
            }
        }
    }
    out
}
