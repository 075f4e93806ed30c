//! Transfer-learning sampler: fit a probabilistic Pareto-front surrogate
//! on related tasks, then propose configs for a new task by ranking draws
//! from that surrogate.
//!
//! Each task's objective columns are mapped to standard-normal space with
//! a rank-based transform (empirical CDF with average ranks for ties and
//! plotting position `rank / (n + 1)`, followed by the standard-normal
//! quantile). Per config and objective, the surrogate keeps the mean and
//! population variance of the transformed values across tasks; proposals
//! sample a front from those moments and keep the leading block of its
//! non-dominated sort.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::benchio::BenchmarkTable;
use crate::error::{Error, Result};
use crate::pareto::top_k_nd;
use crate::rng::SeededRng;
use crate::scheduler::SampleStrategy;
use crate::types::{ConfigId, ObjectiveVector};

/// Default variance floor used when sampling surrogate fronts.
pub const DEFAULT_SIGMA_FLOOR2: f64 = 1e-4;

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal is valid")
}

/// Full-fidelity objective values of one config grid across several
/// related tasks. Dense over (config, task, objective).
#[derive(Debug, Clone, PartialEq)]
pub struct TransferCorpus {
    tasks: Vec<String>,
    objective_names: Vec<String>,
    n_configs: usize,
    /// Layout: `[(config * T + task) * m + objective]`.
    values: Vec<f64>,
}

impl TransferCorpus {
    pub fn new(
        tasks: Vec<String>,
        objective_names: Vec<String>,
        n_configs: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        if tasks.is_empty() {
            return Err(Error::EmptyInput {
                op: "TransferCorpus::new (tasks)",
            });
        }
        if objective_names.is_empty() {
            return Err(Error::EmptyInput {
                op: "TransferCorpus::new (objectives)",
            });
        }
        let mut seen = std::collections::HashSet::new();
        for t in &tasks {
            if !seen.insert(t.as_str()) {
                return Err(Error::invalid(format!("duplicate task name `{t}`")));
            }
        }
        if n_configs < 2 {
            return Err(Error::invalid(
                "a transfer corpus needs at least two configs",
            ));
        }
        let expect = n_configs * tasks.len() * objective_names.len();
        if values.len() != expect {
            return Err(Error::invalid(format!(
                "corpus holds {} values, expected {} for a complete grid",
                values.len(),
                expect
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("corpus values must be finite"));
        }
        Ok(Self {
            tasks,
            objective_names,
            n_configs,
            values,
        })
    }

    pub fn tasks(&self) -> &[String] {
        &self.tasks
    }

    pub fn objective_names(&self) -> &[String] {
        &self.objective_names
    }

    pub fn n_configs(&self) -> usize {
        self.n_configs
    }

    pub fn n_tasks(&self) -> usize {
        self.tasks.len()
    }

    pub fn n_objectives(&self) -> usize {
        self.objective_names.len()
    }

    pub fn value(&self, config: usize, task: usize, objective: usize) -> f64 {
        self.values[(config * self.n_tasks() + task) * self.n_objectives() + objective]
    }
}

/// Per-task, per-objective rank-to-Gaussian transform fitted on a corpus.
#[derive(Debug, Clone)]
pub struct RankNormalizer {
    /// Sorted column values, indexed `[task * m + objective]`.
    sorted: Vec<Vec<f64>>,
    n: usize,
    m: usize,
}

impl RankNormalizer {
    /// Maps a value through the fitted column transform. For values present
    /// in the fitted column this equals `quantile(avg_rank / (n + 1))`;
    /// unseen values interpolate by their insertion rank. Outputs are
    /// always finite because the plotting position stays inside (0, 1).
    pub fn transform(&self, task: usize, objective: usize, value: f64) -> f64 {
        let col = &self.sorted[task * self.m + objective];
        let n = self.n as f64;
        let less = col.partition_point(|v| *v < value) as f64;
        let leq = col.partition_point(|v| *v <= value) as f64;
        let equal = leq - less;
        let position = (less + (equal + 1.0) / 2.0) / (n + 1.0);
        std_normal().inverse_cdf(position)
    }
}

/// Fits the rank-based normalizer of every (task, objective) column.
pub fn fit_normalizer(corpus: &TransferCorpus) -> Result<RankNormalizer> {
    let (n, t, m) = (corpus.n_configs(), corpus.n_tasks(), corpus.n_objectives());
    let mut sorted = Vec::with_capacity(t * m);
    for task in 0..t {
        for obj in 0..m {
            let mut col: Vec<f64> = (0..n).map(|i| corpus.value(i, task, obj)).collect();
            col.sort_by(|a, b| a.partial_cmp(b).expect("corpus values are finite"));
            sorted.push(col);
        }
    }
    Ok(RankNormalizer { sorted, n, m })
}

/// Gaussian surrogate of a Pareto front: per (config, objective) mean and
/// population variance of the rank-normalized task values.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateFront {
    n_configs: usize,
    n_objectives: usize,
    /// Layout: `[config * m + objective]`.
    mean: Vec<f64>,
    var: Vec<f64>,
}

impl SurrogateFront {
    pub fn n_configs(&self) -> usize {
        self.n_configs
    }

    pub fn n_objectives(&self) -> usize {
        self.n_objectives
    }

    pub fn mean(&self, config: usize, objective: usize) -> f64 {
        self.mean[config * self.n_objectives + objective]
    }

    pub fn var(&self, config: usize, objective: usize) -> f64 {
        self.var[config * self.n_objectives + objective]
    }

    pub fn max_var(&self) -> f64 {
        self.var.iter().fold(0.0, |a, &b| a.max(b))
    }
}

/// Builds a surrogate from already-normalized task values, laid out
/// `[(config * T + task) * m + objective]`.
pub fn surrogate_from_normalized(
    values: &[f64],
    n_configs: usize,
    n_tasks: usize,
    n_objectives: usize,
) -> Result<SurrogateFront> {
    if n_configs == 0 || n_tasks == 0 || n_objectives == 0 {
        return Err(Error::EmptyInput {
            op: "surrogate_from_normalized",
        });
    }
    if values.len() != n_configs * n_tasks * n_objectives {
        return Err(Error::invalid("normalized grid has the wrong size"));
    }
    let t = n_tasks as f64;
    let mut mean = Vec::with_capacity(n_configs * n_objectives);
    let mut var = Vec::with_capacity(n_configs * n_objectives);
    for cfg in 0..n_configs {
        for obj in 0..n_objectives {
            let at = |task: usize| values[(cfg * n_tasks + task) * n_objectives + obj];
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            let mut sum = 0.0;
            for task in 0..n_tasks {
                let z = at(task);
                lo = lo.min(z);
                hi = hi.max(z);
                sum += z;
            }
            let mu = sum / t;
            // Identical values across tasks mean exactly zero spread; do
            // not let rounding noise masquerade as variance.
            let v2 = if lo == hi {
                0.0
            } else {
                (0..n_tasks).map(|j| (at(j) - mu).powi(2)).sum::<f64>() / t
            };
            mean.push(mu);
            var.push(v2);
        }
    }
    Ok(SurrogateFront {
        n_configs,
        n_objectives,
        mean,
        var,
    })
}

/// Normalizes every corpus column and aggregates it into the surrogate.
pub fn fit_surrogate(
    corpus: &TransferCorpus,
    normalizer: &RankNormalizer,
) -> Result<SurrogateFront> {
    let (n, t, m) = (corpus.n_configs(), corpus.n_tasks(), corpus.n_objectives());
    let mut z = Vec::with_capacity(n * t * m);
    for cfg in 0..n {
        for task in 0..t {
            for obj in 0..m {
                z.push(normalizer.transform(task, obj, corpus.value(cfg, task, obj)));
            }
        }
    }
    surrogate_from_normalized(&z, n, t, m)
}

/// Draws one front realization: each (config, objective) is an independent
/// normal draw with the surrogate mean and `max(var, sigma_floor2)`.
/// Configs with zero sampled spread reproduce their means exactly when the
/// floor is zero.
pub fn sample_front(
    surrogate: &SurrogateFront,
    sigma_floor2: f64,
    rng: &mut SeededRng,
) -> Vec<ObjectiveVector> {
    assert!(
        sigma_floor2 >= 0.0 && sigma_floor2.is_finite(),
        "variance floor must be finite and non-negative"
    );
    let m = surrogate.n_objectives;
    let mut out = Vec::with_capacity(surrogate.n_configs);
    for cfg in 0..surrogate.n_configs {
        let mut values = Vec::with_capacity(m);
        for obj in 0..m {
            let sd = surrogate.var(cfg, obj).max(sigma_floor2).sqrt();
            let g = rng.standard_normal();
            values.push(surrogate.mean(cfg, obj) + sd * g);
        }
        out.push(ObjectiveVector::from_vec_unchecked(values));
    }
    out
}

/// Samples one front and returns the `k` leading configs of its
/// non-dominated sort.
pub fn propose_configs(
    surrogate: &SurrogateFront,
    k: usize,
    sigma_floor2: f64,
    rng: &mut SeededRng,
) -> Result<Vec<ConfigId>> {
    if !sigma_floor2.is_finite() || sigma_floor2 < 0.0 {
        return Err(Error::invalid("variance floor must be non-negative"));
    }
    if k > surrogate.n_configs {
        return Err(Error::KTooLarge {
            k,
            n: surrogate.n_configs,
        });
    }
    let front = sample_front(surrogate, sigma_floor2, rng);
    let chosen = top_k_nd(&front, k)?;
    Ok(chosen.into_iter().map(ConfigId).collect())
}

/// Sampling strategy backed by a fitted surrogate. When a bracket needs
/// more configs than the grid holds, proposals from fresh front draws are
/// concatenated until the request is filled.
#[derive(Debug, Clone)]
pub struct TransferSampler {
    surrogate: SurrogateFront,
    sigma_floor2: f64,
}

impl TransferSampler {
    pub fn new(surrogate: SurrogateFront, sigma_floor2: f64) -> Result<Self> {
        if !sigma_floor2.is_finite() || sigma_floor2 < 0.0 {
            return Err(Error::invalid("variance floor must be non-negative"));
        }
        Ok(Self {
            surrogate,
            sigma_floor2,
        })
    }

    pub fn surrogate(&self) -> &SurrogateFront {
        &self.surrogate
    }
}

impl SampleStrategy for TransferSampler {
    fn name(&self) -> &str {
        "transfer"
    }

    fn sample(
        &self,
        bench: &BenchmarkTable,
        count: usize,
        rng: &mut SeededRng,
    ) -> Result<Vec<ConfigId>> {
        if bench.n_configs() != self.surrogate.n_configs() {
            return Err(Error::invalid(format!(
                "surrogate covers {} configs but the benchmark grid has {}",
                self.surrogate.n_configs(),
                bench.n_configs()
            )));
        }
        let n = self.surrogate.n_configs();
        if count <= n {
            return propose_configs(&self.surrogate, count, self.sigma_floor2, rng);
        }
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let take = (count - out.len()).min(n);
            out.extend(propose_configs(
                &self.surrogate,
                take,
                self.sigma_floor2,
                rng,
            )?);
        }
        Ok(out)
    }
}
