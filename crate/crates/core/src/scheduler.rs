//! Hyperband planning and execution over tabular benchmarks.
//!
//! A run builds the standard bracket ladder for a maximum resource `R` and
//! halving rate `eta`, then executes each bracket with successive halving:
//! sample the bracket's starting configs, evaluate every survivor at each
//! rung's fidelity, and promote the top slice chosen by a pluggable
//! ranking strategy. Evaluations are table lookups, charged with their
//! recorded runtime and cost so that traces reflect simulated wall-clock
//! and dollars.

use std::collections::{BTreeMap, HashMap};

use crate::benchio::BenchmarkTable;
use crate::error::{Error, Result};
use crate::pareto::{pareto_front, top_k_nd};
use crate::rng::SeededRng;
use crate::scalarize::{top_k_scalarized, ScalarMethod};
use crate::types::{batch_dim, ConfigId, Fidelity, ObjectiveVector};

// Sub-stream tags: one purpose-keyed stream per (purpose, bracket[, rung]).
const STREAM_SAMPLE: u64 = 1;
const STREAM_RANK: u64 = 2;

/// One rung of a bracket: how many configs are evaluated, at what fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rung {
    pub n: usize,
    pub fidelity: Fidelity,
}

/// A successive-halving bracket: start `n0` configs at the lowest rung,
/// keep `floor(n_i / eta)` (at least one) into each subsequent rung.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketPlan {
    /// Bracket index; the most exploratory bracket has the largest `s`.
    pub s: u32,
    pub n0: usize,
    pub rungs: Vec<Rung>,
}

fn int_pow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

/// Builds the full bracket ladder for `r_max` and `eta`.
///
/// With `s_max = floor(log_eta(r_max))` and budget `B = (s_max + 1) *
/// r_max`, bracket `s` (from `s_max` down to 0) starts `n0 = ceil((B /
/// r_max) * eta^s / (s + 1))` configs at fidelity `r_max / eta^s` and runs
/// `s + 1` rungs, multiplying fidelity by `eta` per rung; rung `i` holds
/// `floor(n0 / eta^i)` configs, never fewer than one. Fidelities use
/// integer division, which is exact whenever `r_max` is a power of `eta`.
pub fn plan_hyperband(r_max: Fidelity, eta: u32) -> Result<Vec<BracketPlan>> {
    if eta < 2 {
        return Err(Error::invalid("eta must be at least 2"));
    }
    let r = r_max.level();
    let mut s_max = 0u32;
    while int_pow(eta as u64, s_max + 1).is_some_and(|p| p <= r) {
        s_max += 1;
    }
    let brackets_total = (s_max + 1) as u64; // == B / R
    let mut plans = Vec::with_capacity(s_max as usize + 1);
    for s in (0..=s_max).rev() {
        let eta_s = int_pow(eta as u64, s).ok_or_else(|| Error::invalid("eta^s overflows"))?;
        let n0 = (brackets_total * eta_s).div_ceil(s as u64 + 1) as usize;
        let mut rungs = Vec::with_capacity(s as usize + 1);
        for i in 0..=s {
            let n = (n0 as u64 / int_pow(eta as u64, i).unwrap()).max(1) as usize;
            let fidelity = Fidelity::new((r / int_pow(eta as u64, s - i).unwrap()).max(1))?;
            rungs.push(Rung { n, fidelity });
        }
        plans.push(BracketPlan { s, n0, rungs });
    }
    Ok(plans)
}

/// Picks which configs join a bracket.
pub trait SampleStrategy: Sync {
    fn name(&self) -> &str;

    /// Returns `count` config ids. Implementations draw distinct configs
    /// whenever the benchmark is large enough and fall back to sampling
    /// with replacement otherwise.
    fn sample(
        &self,
        bench: &BenchmarkTable,
        count: usize,
        rng: &mut SeededRng,
    ) -> Result<Vec<ConfigId>>;
}

/// Orders a rung's survivors for promotion.
pub trait RankStrategy: Sync {
    fn name(&self) -> &str;

    /// Returns the indices of the `k` most promotable points.
    fn top_k(
        &self,
        points: &[ObjectiveVector],
        k: usize,
        rng: &mut SeededRng,
    ) -> Result<Vec<usize>>;
}

/// Uniform sampling over the benchmark's config grid: without replacement
/// when the grid has at least `count` configs, with replacement otherwise.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformSampler;

impl SampleStrategy for UniformSampler {
    fn name(&self) -> &str {
        "uniform"
    }

    fn sample(
        &self,
        bench: &BenchmarkTable,
        count: usize,
        rng: &mut SeededRng,
    ) -> Result<Vec<ConfigId>> {
        let n = bench.n_configs();
        if n == 0 {
            return Err(Error::EmptyInput {
                op: "UniformSampler::sample",
            });
        }
        if count <= n {
            // Partial Fisher-Yates: the first `count` slots are a uniform
            // distinct sample in random order.
            let mut pool: Vec<usize> = (0..n).collect();
            for i in 0..count {
                let j = i + rng.below(n - i);
                pool.swap(i, j);
            }
            Ok(pool[..count].iter().map(|&i| ConfigId(i)).collect())
        } else {
            Ok((0..count).map(|_| ConfigId(rng.below(n))).collect())
        }
    }
}

/// Keeps the `k` smallest values of one objective coordinate; ties break
/// toward the lowest index.
pub fn rank_single_objective(
    points: &[ObjectiveVector],
    k: usize,
    objective_index: usize,
) -> Result<Vec<usize>> {
    let m = batch_dim(points, "rank_single_objective")?;
    if objective_index >= m {
        return Err(Error::invalid(format!(
            "objective index {objective_index} out of range for {m} objectives"
        )));
    }
    if k > points.len() {
        return Err(Error::KTooLarge { k, n: points.len() });
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a][objective_index]
            .partial_cmp(&points[b][objective_index])
            .expect("objectives are finite")
            .then(a.cmp(&b))
    });
    order.truncate(k);
    Ok(order)
}

/// Promotion by a single objective coordinate (classic Hyperband).
#[derive(Debug, Clone, Copy)]
pub struct SingleObjectiveRank {
    pub objective_index: usize,
}

impl RankStrategy for SingleObjectiveRank {
    fn name(&self) -> &str {
        "single-objective"
    }

    fn top_k(
        &self,
        points: &[ObjectiveVector],
        k: usize,
        _rng: &mut SeededRng,
    ) -> Result<Vec<usize>> {
        rank_single_objective(points, k, self.objective_index)
    }
}

/// Promotion by non-dominated sorting with the epsilon-net order.
#[derive(Debug, Clone, Copy, Default)]
pub struct NonDominatedRank;

impl RankStrategy for NonDominatedRank {
    fn name(&self) -> &str {
        "nd"
    }

    fn top_k(
        &self,
        points: &[ObjectiveVector],
        k: usize,
        _rng: &mut SeededRng,
    ) -> Result<Vec<usize>> {
        top_k_nd(points, k)
    }
}

/// Promotion by a random scalarization, one fresh weight draw per rung.
#[derive(Debug, Clone, Copy)]
pub struct ScalarizedRank {
    pub method: ScalarMethod,
    pub rho: f64,
}

impl RankStrategy for ScalarizedRank {
    fn name(&self) -> &str {
        match self.method {
            ScalarMethod::Linear => "linear",
            ScalarMethod::ParEgo => "parego",
            ScalarMethod::Hypervolume => "hv",
        }
    }

    fn top_k(
        &self,
        points: &[ObjectiveVector],
        k: usize,
        rng: &mut SeededRng,
    ) -> Result<Vec<usize>> {
        top_k_scalarized(points, k, self.method, self.rho, rng)
    }
}

/// One evaluation: a config observed at a fidelity, with the cumulative
/// simulated charges up to and including this event.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent {
    pub config: ConfigId,
    pub fidelity: Fidelity,
    pub objectives: ObjectiveVector,
    pub cumulative_runtime_s: f64,
    pub cumulative_cost_usd: f64,
}

/// The full evaluation history of one run, plus the Pareto front of every
/// config observed at the run's maximum fidelity.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTrace {
    pub events: Vec<TraceEvent>,
    pub final_front: Vec<(ConfigId, ObjectiveVector)>,
}

impl RunTrace {
    fn push_event(
        &mut self,
        config: ConfigId,
        fidelity: Fidelity,
        objectives: ObjectiveVector,
        runtime_s: f64,
        cost_usd: f64,
    ) {
        let (rt, cost) = self
            .events
            .last()
            .map(|e| (e.cumulative_runtime_s, e.cumulative_cost_usd))
            .unwrap_or((0.0, 0.0));
        self.events.push(TraceEvent {
            config,
            fidelity,
            objectives,
            cumulative_runtime_s: rt + runtime_s,
            cumulative_cost_usd: cost + cost_usd,
        });
    }

    pub fn total_runtime_s(&self) -> f64 {
        self.events
            .last()
            .map(|e| e.cumulative_runtime_s)
            .unwrap_or(0.0)
    }

    pub fn total_cost_usd(&self) -> f64 {
        self.events
            .last()
            .map(|e| e.cumulative_cost_usd)
            .unwrap_or(0.0)
    }

    /// Highest fidelity any event reached.
    pub fn max_fidelity(&self) -> Option<Fidelity> {
        self.events.iter().map(|e| e.fidelity).max()
    }

    fn finalize_front(&mut self) -> Result<()> {
        let Some(max_fid) = self.max_fidelity() else {
            return Ok(());
        };
        // Tables are deterministic, so repeated observations of a config at
        // max fidelity carry identical objectives; keep one per config.
        let mut by_config: BTreeMap<ConfigId, ObjectiveVector> = BTreeMap::new();
        for e in &self.events {
            if e.fidelity == max_fid {
                by_config.insert(e.config, e.objectives.clone());
            }
        }
        let (ids, points): (Vec<ConfigId>, Vec<ObjectiveVector>) = by_config.into_iter().unzip();
        let front = pareto_front(&points)?;
        self.final_front = front
            .into_iter()
            .map(|i| (ids[i], points[i].clone()))
            .collect();
        Ok(())
    }
}

/// Executes one bracket, appending its evaluations to `trace`.
///
/// Sampling uses the sub-stream `(sample, s)` of `root`; ranking at rung
/// `i` uses `(rank, s, i)`, so strategies that draw (scalarizations) can
/// never perturb each other's streams. Duplicate configs in a rung (only
/// possible with replacement sampling) are evaluated and charged once but
/// keep their multiplicity for promotion.
pub fn run_successive_halving(
    plan: &BracketPlan,
    sampler: &dyn SampleStrategy,
    ranker: &dyn RankStrategy,
    bench: &BenchmarkTable,
    root: &SeededRng,
    trace: &mut RunTrace,
) -> Result<()> {
    let runtime_idx = bench.runtime_index();
    let cost_idx = bench.cost_index();
    let mut sample_rng = root.substream(&[STREAM_SAMPLE, plan.s as u64]);
    let mut current = sampler.sample(bench, plan.n0, &mut sample_rng)?;
    if current.len() != plan.n0 {
        return Err(Error::invalid(format!(
            "sampler `{}` returned {} configs, bracket needs {}",
            sampler.name(),
            current.len(),
            plan.n0
        )));
    }
    for (i, rung) in plan.rungs.iter().enumerate() {
        debug_assert_eq!(current.len(), rung.n, "survivor count must match the plan");
        let mut evaluated: HashMap<ConfigId, ObjectiveVector> = HashMap::new();
        let mut rung_points = Vec::with_capacity(current.len());
        for &cfg in &current {
            if let Some(y) = evaluated.get(&cfg) {
                rung_points.push(y.clone());
                continue;
            }
            let y = bench.cell(cfg, rung.fidelity)?;
            let runtime = runtime_idx.map(|c| y[c]).unwrap_or(0.0);
            let cost = cost_idx.map(|c| y[c]).unwrap_or(0.0);
            trace.push_event(cfg, rung.fidelity, y.clone(), runtime, cost);
            evaluated.insert(cfg, y.clone());
            rung_points.push(y);
        }
        if i + 1 < plan.rungs.len() {
            let keep = plan.rungs[i + 1].n;
            let mut rank_rng = root.substream(&[STREAM_RANK, plan.s as u64, i as u64]);
            let chosen = ranker.top_k(&rung_points, keep, &mut rank_rng)?;
            current = chosen.into_iter().map(|p| current[p]).collect();
        }
    }
    Ok(())
}

/// Runs every bracket of the Hyperband ladder for `(r_max, eta)` under one
/// seed and returns the combined trace.
pub fn run_hyperband(
    bench: &BenchmarkTable,
    r_max: Fidelity,
    eta: u32,
    sampler: &dyn SampleStrategy,
    ranker: &dyn RankStrategy,
    seed: u64,
) -> Result<RunTrace> {
    let plans = plan_hyperband(r_max, eta)?;
    let root = SeededRng::new(seed);
    let mut trace = RunTrace::default();
    for plan in &plans {
        run_successive_halving(plan, sampler, ranker, bench, &root, &mut trace)?;
    }
    trace.finalize_front()?;
    Ok(trace)
}

/// Total number of evaluation events a plan produces on a benchmark large
/// enough for distinct sampling (used by tests and budget checks).
pub fn planned_evaluations(plans: &[BracketPlan]) -> usize {
    plans
        .iter()
        .map(|p| p.rungs.iter().map(|r| r.n).sum::<usize>())
        .sum()
}
