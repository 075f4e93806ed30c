//! Shared fixtures for the criterion benchmarks.

use paretoband_core::benchio::{generate_synthetic, BenchmarkTable, SynthSpec};
use paretoband_core::{ObjectiveVector, SeededRng};

/// A reproducible cloud of objective vectors, uniform in the unit cube.
pub fn random_points(n: usize, m: usize, seed: u64) -> Vec<ObjectiveVector> {
    let mut rng = SeededRng::new(seed);
    (0..n)
        .map(|_| ObjectiveVector::new((0..m).map(|_| rng.uniform()).collect()).unwrap())
        .collect()
}

/// A mid-sized synthetic benchmark shared by the scheduler benchmarks.
pub fn standard_table(n_configs: usize, r_max: u64) -> BenchmarkTable {
    let spec = SynthSpec {
        name: "bench".into(),
        n_configs,
        r_max,
        n_tasks: 3,
        correlation: 0.8,
        n_planted: 5,
        hardware: None,
    };
    generate_synthetic(&spec, &SeededRng::new(11))
        .expect("fixture generation succeeds")
        .benchmark
}
