//! Small fixtures shared by unit tests across modules.

use crate::benchio::{BenchmarkTable, ConfigRow};

/// Builds a complete (error, runtime_s) benchmark over fidelities
/// `1..=r_max` from a per-cell closure.
pub(crate) fn table_from_rows(
    n: usize,
    r_max: u64,
    cell: impl Fn(usize, u64) -> Vec<f64>,
) -> BenchmarkTable {
    let fidelities: Vec<u64> = (1..=r_max).collect();
    let configs: Vec<ConfigRow> = (0..n)
        .map(|i| ConfigRow {
            params: vec![i as f64],
            hardware: None,
        })
        .collect();
    let mut cells = Vec::with_capacity(n * fidelities.len() * 2);
    for cfg in 0..n {
        for &f in &fidelities {
            cells.extend(cell(cfg, f));
        }
    }
    BenchmarkTable::new(
        "toy".to_string(),
        vec!["error".to_string(), "runtime_s".to_string()],
        vec!["x0".to_string()],
        configs,
        fidelities,
        cells,
    )
    .expect("toy table is well-formed")
}
