//! Synthetic benchmark generator.
//!
//! Produces a complete benchmark table with learning-curve cells, a
//! transfer corpus of related tasks whose config rankings correlate with
//! the benchmark's, and (optionally) a rented-hardware cost model the
//! table is expanded across.
//!
//! Each config gets an error curve `A + (0.9 - A) * v * h(r)` where the
//! normalized decay `h` starts at 1 and reaches exactly 0 at full
//! fidelity, so full-fidelity error equals the asymptote `A` bit for bit.
//! A chosen set of planted configs receives asymptotes on a tight ladder
//! below everything else plus per-fidelity runtimes on an opposing speed
//! ladder, making the planted set the exact full-fidelity Pareto front:
//! every other config converges to a strictly worse error and runs
//! strictly slower than the fastest planted config.
//!
//! Cross-task structure comes from one shared latent per config:
//! task-level values use `sqrt(rho) * shared + sqrt(1 - rho) * noise`, so
//! `rho` is the exact Pearson correlation of config latents between
//! tasks. At `rho = 1` every corpus task ranks configs identically and
//! task runtimes carry no jitter, making the corpus columns equal.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::benchio::expand::{expand_cloud, HardwareCostModel, HardwareEntry};
use crate::benchio::{BenchmarkTable, ConfigRow};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::transfer::TransferCorpus;

/// Best and worst full-fidelity error on the planted ladder. The band is
/// deliberately narrow so any planted config is a near-optimal outcome.
const PLANTED_ERROR_LO: f64 = 0.10;
const PLANTED_ERROR_HI: f64 = 0.103;
/// Per-fidelity-unit runtime of the fastest and slowest planted config,
/// in seconds. Lower error pairs with a slower config.
const PLANTED_TAU_FAST: f64 = 0.25;
const PLANTED_TAU_SLOW: f64 = 1.0;
/// Background asymptotes start this far above the worst planted error.
const BACKGROUND_MARGIN: f64 = 0.04;
/// Background asymptotes spread this far above their floor.
const BACKGROUND_RANGE: f64 = 0.5;
/// Background per-unit runtimes: log-uniform, strictly slower than the
/// fastest planted config so no background point can join the front.
const BACKGROUND_TAU_LO: f64 = PLANTED_TAU_FAST * 1.05;
const BACKGROUND_TAU_HI: f64 = 10.0;
/// Error-curve decay rates (per fidelity unit).
const KAPPA_LO: f64 = 0.3;
const KAPPA_HI: f64 = 0.7;
/// Fraction of the gap to 0.9 that the curve starts above its asymptote.
/// Kept narrow so low-fidelity rankings carry signal about asymptotes.
const START_LO: f64 = 0.65;
const START_HI: f64 = 0.8;
/// Shared-latent ladder for planted configs; several sigmas below the
/// standard-normal background latents, so planted configs rank best in
/// every correlated task.
const PLANTED_LATENT_TOP: f64 = -3.0;
const PLANTED_LATENT_STEP: f64 = -1.5;
/// Corpus runtime jitter scale; vanishes at full correlation.
const CORPUS_JITTER: f64 = 0.05;
/// Rented-device batch-runtime ratios and dollar-per-second rates.
const HW_RATIO_LO: f64 = 0.3;
const HW_RATIO_HI: f64 = 3.0;
const HW_PRICE_LO: f64 = 1e-5;
const HW_PRICE_HI: f64 = 1e-3;

/// Devices to expand the generated table across.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthHardware {
    pub n_hardware: usize,
}

/// Shape of a generated benchmark family.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub name: String,
    pub n_configs: usize,
    pub r_max: u64,
    /// Number of related tasks in the transfer corpus.
    pub n_tasks: usize,
    /// Pearson correlation of config latents across tasks, in [0, 1].
    pub correlation: f64,
    /// Size of the planted Pareto front (0 plants nothing).
    pub n_planted: usize,
    pub hardware: Option<SynthHardware>,
}

/// A generated benchmark plus its companion artifacts.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub benchmark: BenchmarkTable,
    pub corpus: TransferCorpus,
    pub hardware: Option<HardwareCostModel>,
}

/// Normalized learning-curve decay: 1 at fidelity 1, exactly 0 at `r_max`.
fn decay(kappa: f64, r: u64, r_max: u64) -> f64 {
    if r_max == 1 {
        return 0.0;
    }
    let tail = (-kappa * (r_max - 1) as f64).exp();
    ((-kappa * (r - 1) as f64).exp() - tail) / (1.0 - tail)
}

fn log_uniform(lo: f64, hi: f64, rng: &mut SeededRng) -> f64 {
    (lo.ln() + rng.uniform() * (hi.ln() - lo.ln())).exp()
}

struct ConfigLatents {
    params: Vec<f64>,
    kappa: f64,
    start: f64,
    /// Per-fidelity-unit runtime, seconds.
    tau: f64,
    /// Full-fidelity error on the generated benchmark's own task.
    asymptote: f64,
    /// Shared cross-task latent; corpus errors are monotone in it.
    shared: f64,
}

pub fn generate_synthetic(spec: &SynthSpec, rng: &SeededRng) -> Result<SynthOutput> {
    if spec.name.is_empty() {
        return Err(Error::invalid("benchmark name must not be empty"));
    }
    if spec.n_configs < 2 {
        return Err(Error::invalid("generation needs at least two configs"));
    }
    if spec.r_max == 0 {
        return Err(Error::invalid("maximum fidelity must be at least 1"));
    }
    if spec.n_tasks == 0 {
        return Err(Error::invalid("the corpus needs at least one task"));
    }
    if !(0.0..=1.0).contains(&spec.correlation) {
        return Err(Error::invalid(format!(
            "correlation must lie in [0, 1], got {}",
            spec.correlation
        )));
    }
    if spec.n_planted > spec.n_configs {
        return Err(Error::invalid(format!(
            "cannot plant {} configs into a grid of {}",
            spec.n_planted, spec.n_configs
        )));
    }
    if let Some(hw) = &spec.hardware {
        if hw.n_hardware == 0 {
            return Err(Error::invalid(
                "hardware expansion needs at least one device",
            ));
        }
    }

    let normal = Normal::new(0.0, 1.0).expect("unit normal is valid");
    let (n, t, r_max, rho) = (spec.n_configs, spec.n_tasks, spec.r_max, spec.correlation);
    let k_planted = spec.n_planted;

    // Planted configs sit at evenly spaced grid indices; `frac` walks the
    // ladder from the fast/high-error end to the slow/low-error end.
    let planted_rank =
        |i: usize| -> Option<usize> { (0..k_planted).find(|k| k * n / k_planted == i) };
    let frac = |k: usize| -> f64 {
        if k_planted > 1 {
            k as f64 / (k_planted - 1) as f64
        } else {
            0.0
        }
    };

    // Per-config shape draws come from dedicated substreams so the
    // structure of one block never shifts another.
    let mut shape_rng = rng.substream(&[1]);
    let mut latent_rng = rng.substream(&[2]);
    let mut test_noise_rng = rng.substream(&[3, 0]);
    let weight = (rho.sqrt(), (1.0 - rho).sqrt());

    let mut configs = Vec::with_capacity(n);
    for i in 0..n {
        let params = vec![shape_rng.uniform(), shape_rng.uniform()];
        let kappa = KAPPA_LO + shape_rng.uniform() * (KAPPA_HI - KAPPA_LO);
        let start = START_LO + shape_rng.uniform() * (START_HI - START_LO);
        let tau_background = log_uniform(BACKGROUND_TAU_LO, BACKGROUND_TAU_HI, &mut shape_rng);
        let shared_background = latent_rng.standard_normal();
        let test_noise = test_noise_rng.standard_normal();
        let (tau, asymptote, shared) = match planted_rank(i) {
            Some(k) => {
                let f = frac(k);
                (
                    PLANTED_TAU_FAST * (PLANTED_TAU_SLOW / PLANTED_TAU_FAST).powf(f),
                    PLANTED_ERROR_HI + (PLANTED_ERROR_LO - PLANTED_ERROR_HI) * f,
                    PLANTED_LATENT_TOP + PLANTED_LATENT_STEP * f,
                )
            }
            None => {
                let latent = weight.0 * shared_background + weight.1 * test_noise;
                let floor = PLANTED_ERROR_HI + BACKGROUND_MARGIN;
                (
                    tau_background,
                    floor + BACKGROUND_RANGE * normal.cdf(latent),
                    shared_background,
                )
            }
        };
        configs.push(ConfigLatents {
            params,
            kappa,
            start,
            tau,
            asymptote,
            shared,
        });
    }

    // Benchmark cells over the full integer fidelity grid.
    let fidelities: Vec<u64> = (1..=r_max).collect();
    let mut cells = Vec::with_capacity(n * fidelities.len() * 2);
    for c in &configs {
        for &r in &fidelities {
            let error = c.asymptote + (0.9 - c.asymptote) * c.start * decay(c.kappa, r, r_max);
            cells.push(error);
            cells.push(c.tau * r as f64);
        }
    }
    let rows = configs
        .iter()
        .map(|c| ConfigRow {
            params: c.params.clone(),
            hardware: None,
        })
        .collect();
    let base = BenchmarkTable::new(
        spec.name.clone(),
        vec!["error".to_string(), "runtime_s".to_string()],
        vec!["x0".to_string(), "x1".to_string()],
        rows,
        fidelities,
        cells,
    )?;

    // Corpus tasks: full-fidelity values whose config ranking follows the
    // shared latents, blurred by per-task noise below full correlation.
    let floor = PLANTED_ERROR_HI + BACKGROUND_MARGIN;
    let mut task_error = vec![0.0; n * t];
    let mut task_runtime = vec![0.0; n * t];
    for task in 0..t {
        let mut noise_rng = rng.substream(&[3, task as u64 + 1]);
        let mut jitter_rng = rng.substream(&[4, task as u64 + 1]);
        for (i, c) in configs.iter().enumerate() {
            let latent = weight.0 * c.shared + weight.1 * noise_rng.standard_normal();
            let jitter = (CORPUS_JITTER * (1.0 - rho) * jitter_rng.standard_normal()).exp();
            task_error[i * t + task] = floor + BACKGROUND_RANGE * normal.cdf(latent);
            task_runtime[i * t + task] = c.tau * r_max as f64 * jitter;
        }
    }
    let task_names: Vec<String> = (0..t).map(|j| format!("{}-task{j}", spec.name)).collect();

    let Some(hw_spec) = &spec.hardware else {
        let mut values = Vec::with_capacity(n * t * 2);
        for i in 0..n {
            for task in 0..t {
                values.push(task_error[i * t + task]);
                values.push(task_runtime[i * t + task]);
            }
        }
        let corpus = TransferCorpus::new(task_names, base.objective_names().to_vec(), n, values)?;
        return Ok(SynthOutput {
            benchmark: base,
            corpus,
            hardware: None,
        });
    };

    // Hardware mode: draw a rented-device model, expand the table across
    // it, and mirror the same expansion in the corpus so its configs line
    // up with the expanded grid.
    let mut hw_rng = rng.substream(&[5]);
    let entries: Vec<HardwareEntry> = (0..hw_spec.n_hardware)
        .map(|h| HardwareEntry {
            name: format!("hw{h}"),
            batch_runtime_s: Some(log_uniform(HW_RATIO_LO, HW_RATIO_HI, &mut hw_rng)),
            price_per_second: Some(log_uniform(HW_PRICE_LO, HW_PRICE_HI, &mut hw_rng)),
            total_price: None,
        })
        .collect();
    let model = HardwareCostModel::new(
        Some("hw0".to_string()),
        crate::benchio::expand::DEFAULT_AMORTIZATION_SECONDS,
        entries,
    )?;
    let expanded = expand_cloud(&base, &model)?;

    let ref_runtime = model.entry("hw0").unwrap().batch_runtime_s.unwrap();
    let mut values = Vec::with_capacity(n * hw_spec.n_hardware * t * 3);
    for i in 0..n {
        for e in model.entries() {
            let ratio = e.batch_runtime_s.unwrap() / ref_runtime;
            let gamma = e.price_per_second.unwrap();
            for task in 0..t {
                let runtime = task_runtime[i * t + task] * ratio;
                values.push(task_error[i * t + task]);
                values.push(runtime);
                values.push(gamma * runtime);
            }
        }
    }
    let corpus = TransferCorpus::new(
        task_names,
        expanded.objective_names().to_vec(),
        expanded.n_configs(),
        values,
    )?;
    Ok(SynthOutput {
        benchmark: expanded,
        corpus,
        hardware: Some(model),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pareto::pareto_front;
    use crate::types::{ConfigId, Fidelity, ObjectiveVector};
    use approx::assert_relative_eq;

    fn spec(n: usize, planted: usize) -> SynthSpec {
        SynthSpec {
            name: "syn".into(),
            n_configs: n,
            r_max: 27,
            n_tasks: 3,
            correlation: 0.8,
            n_planted: planted,
            hardware: None,
        }
    }

    fn full_fidelity_points(table: &BenchmarkTable) -> Vec<ObjectiveVector> {
        let r = table.max_fidelity();
        (0..table.n_configs())
            .map(|i| table.cell(ConfigId(i), r).unwrap())
            .collect()
    }

    #[test]
    fn generates_the_declared_shape() {
        let out = generate_synthetic(&spec(40, 4), &SeededRng::new(1)).unwrap();
        let b = &out.benchmark;
        assert_eq!(b.n_configs(), 40);
        assert_eq!(b.fidelities(), (1..=27).collect::<Vec<u64>>());
        assert_eq!(
            b.objective_names(),
            &["error".to_string(), "runtime_s".to_string()]
        );
        assert_eq!(out.corpus.n_configs(), 40);
        assert_eq!(out.corpus.n_tasks(), 3);
        assert_eq!(out.corpus.objective_names(), b.objective_names());
        assert!(out.hardware.is_none());
    }

    #[test]
    fn generation_is_seed_deterministic() {
        let a = generate_synthetic(&spec(30, 3), &SeededRng::new(9)).unwrap();
        let b = generate_synthetic(&spec(30, 3), &SeededRng::new(9)).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic(&spec(30, 3), &SeededRng::new(10)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn planted_configs_are_exactly_the_full_fidelity_front() {
        let n = 100;
        let out = generate_synthetic(&spec(n, 3), &SeededRng::new(4)).unwrap();
        let points = full_fidelity_points(&out.benchmark);
        let front = pareto_front(&points).unwrap();
        let planted: Vec<usize> = (0..3).map(|k| k * n / 3).collect();
        assert_eq!(front, planted);
    }

    #[test]
    fn planted_errors_hit_the_ladder_exactly_at_full_fidelity() {
        let n = 50;
        let out = generate_synthetic(&spec(n, 5), &SeededRng::new(2)).unwrap();
        let r = out.benchmark.max_fidelity();
        for k in 0..5usize {
            let idx = k * n / 5;
            let y = out.benchmark.cell(ConfigId(idx), r).unwrap();
            let f = k as f64 / 4.0;
            let expect = PLANTED_ERROR_HI + (PLANTED_ERROR_LO - PLANTED_ERROR_HI) * f;
            assert_eq!(y[0], expect, "planted {k} misses its ladder rung");
        }
        // Every background config converges strictly above the margin and
        // runs strictly slower than the fastest planted config.
        let planted: Vec<usize> = (0..5).map(|k| k * n / 5).collect();
        let fast_runtime = out.benchmark.cell(ConfigId(planted[0]), r).unwrap()[1];
        for i in (0..n).filter(|i| !planted.contains(i)) {
            let y = out.benchmark.cell(ConfigId(i), r).unwrap();
            assert!(y[0] >= PLANTED_ERROR_HI + BACKGROUND_MARGIN);
            assert!(y[1] > fast_runtime);
        }
    }

    #[test]
    fn learning_curves_decay_toward_their_asymptote() {
        let out = generate_synthetic(&spec(20, 2), &SeededRng::new(3)).unwrap();
        let b = &out.benchmark;
        for i in 0..b.n_configs() {
            let mut last = f64::INFINITY;
            for &r in b.fidelities() {
                let y = b.cell(ConfigId(i), Fidelity::new(r).unwrap()).unwrap();
                assert!(y[0] < last, "error must strictly decrease along fidelity");
                last = y[0];
            }
        }
    }

    #[test]
    fn full_correlation_makes_corpus_tasks_identical() {
        let mut s = spec(25, 3);
        s.correlation = 1.0;
        let out = generate_synthetic(&s, &SeededRng::new(6)).unwrap();
        let c = &out.corpus;
        for i in 0..c.n_configs() {
            for o in 0..c.n_objectives() {
                let v0 = c.value(i, 0, o);
                for task in 1..c.n_tasks() {
                    assert_eq!(c.value(i, task, o), v0);
                }
            }
        }
    }

    #[test]
    fn zero_correlation_decouples_task_rankings() {
        // Spearman rank correlation between two tasks' error columns
        // should be near zero; ranks are computed directly here as an
        // independent check.
        let mut s = spec(300, 0);
        s.correlation = 0.0;
        s.n_tasks = 2;
        let out = generate_synthetic(&s, &SeededRng::new(8)).unwrap();
        let n = out.corpus.n_configs();
        let ranks = |task: usize| -> Vec<usize> {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| {
                out.corpus
                    .value(a, task, 0)
                    .partial_cmp(&out.corpus.value(b, task, 0))
                    .unwrap()
            });
            let mut rank = vec![0usize; n];
            for (r, &i) in idx.iter().enumerate() {
                rank[i] = r;
            }
            rank
        };
        let (ra, rb) = (ranks(0), ranks(1));
        let d2: f64 = ra
            .iter()
            .zip(&rb)
            .map(|(&a, &b)| ((a as f64) - (b as f64)).powi(2))
            .sum();
        let nf = n as f64;
        let rho = 1.0 - 6.0 * d2 / (nf * (nf * nf - 1.0));
        assert!(rho.abs() < 0.15, "spearman {rho} should be near zero");
    }

    #[test]
    fn high_correlation_couples_task_rankings() {
        let out = generate_synthetic(&spec(300, 0), &SeededRng::new(8)).unwrap();
        let n = out.corpus.n_configs();
        let value = |i: usize, task: usize| out.corpus.value(i, task, 0);
        // Count rank inversions between tasks on a sample of pairs.
        let mut agree = 0;
        let mut total = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                let same = (value(i, 0) < value(j, 0)) == (value(i, 1) < value(j, 1));
                agree += usize::from(same);
                total += 1;
            }
        }
        let share = agree as f64 / total as f64;
        assert!(
            share > 0.8,
            "pairwise rank agreement {share} too weak for rho = 0.8"
        );
    }

    #[test]
    fn hardware_mode_expands_table_and_corpus_consistently() {
        let mut s = spec(12, 2);
        s.hardware = Some(SynthHardware { n_hardware: 5 });
        let out = generate_synthetic(&s, &SeededRng::new(11)).unwrap();
        let b = &out.benchmark;
        let model = out.hardware.as_ref().unwrap();
        assert_eq!(b.n_configs(), 60);
        assert_eq!(b.n_objectives(), 3);
        assert_eq!(out.corpus.n_configs(), 60);
        assert_eq!(out.corpus.n_objectives(), 3);
        let r = b.max_fidelity();
        for cfg in 0..b.n_configs() {
            let device = b.configs()[cfg].hardware.as_deref().unwrap();
            let gamma = model.gamma(device).unwrap();
            let y = b.cell(ConfigId(cfg), r).unwrap();
            assert_relative_eq!(y[2], y[1] * gamma, max_relative = 1e-12);
            let base_cfg = cfg / 5 * 5;
            let y0 = b.cell(ConfigId(base_cfg), r).unwrap();
            assert_eq!(y[0], y0[0], "error must not depend on the device");
            // Corpus rows carry the same per-device pricing.
            for task in 0..out.corpus.n_tasks() {
                let rt = out.corpus.value(cfg, task, 1);
                let cost = out.corpus.value(cfg, task, 2);
                assert_relative_eq!(cost, rt * gamma, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn generation_rejects_bad_shapes() {
        let base = spec(10, 2);
        let tweak = |f: &mut dyn FnMut(&mut SynthSpec)| {
            let mut s = base.clone();
            f(&mut s);
            generate_synthetic(&s, &SeededRng::new(0))
        };
        assert!(tweak(&mut |s| s.name = String::new()).is_err());
        assert!(tweak(&mut |s| s.n_configs = 1).is_err());
        assert!(tweak(&mut |s| s.r_max = 0).is_err());
        assert!(tweak(&mut |s| s.n_tasks = 0).is_err());
        assert!(tweak(&mut |s| s.correlation = 1.5).is_err());
        assert!(tweak(&mut |s| s.correlation = -0.1).is_err());
        assert!(tweak(&mut |s| s.n_planted = 11).is_err());
        assert!(tweak(&mut |s| s.hardware = Some(SynthHardware { n_hardware: 0 })).is_err());
    }

    #[test]
    fn single_fidelity_tables_are_flat_at_the_asymptote() {
        let mut s = spec(8, 2);
        s.r_max = 1;
        let out = generate_synthetic(&s, &SeededRng::new(5)).unwrap();
        assert_eq!(out.benchmark.fidelities(), &[1]);
        let y = out
            .benchmark
            .cell(ConfigId(0), Fidelity::new(1).unwrap())
            .unwrap();
        assert_eq!(
            y[0], PLANTED_ERROR_HI,
            "single-fidelity error is the asymptote"
        );
    }
}
