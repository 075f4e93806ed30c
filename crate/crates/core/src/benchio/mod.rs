//! Tabular benchmarks and their on-disk formats.
//!
//! A [`BenchmarkTable`] is a dense grid of objective values over
//! (config, fidelity); every optimizer run replays values from such a
//! table instead of training anything. Submodules cover the JSON Lines
//! file formats ([`format`]), hardware-aware expansion of a base table
//! into a (config × hardware) product grid ([`expand`]), and the
//! synthetic benchmark generator ([`synth`]).

pub mod expand;
pub mod format;
pub mod synth;

pub use expand::{
    expand_cloud, expand_edge, HardwareCostModel, HardwareEntry, LatencyTable,
    DEFAULT_AMORTIZATION_SECONDS,
};
pub use format::{
    load_benchmark, load_corpus, load_hardware_model, load_latency_table, save_benchmark,
    save_corpus, save_hardware_model, save_latency_table,
};
pub use synth::{generate_synthetic, SynthHardware, SynthOutput, SynthSpec};

use crate::error::{Error, Result};
use crate::types::{ConfigId, Fidelity, ObjectiveVector};

/// Objective name carrying the error coordinate. When absent, the first
/// objective is treated as the error.
pub const ERROR_OBJECTIVE: &str = "error";
/// Objective name whose values are charged against the runtime budget.
pub const RUNTIME_OBJECTIVE: &str = "runtime_s";
/// Objective name whose values are charged against the monetary budget.
pub const COST_OBJECTIVE: &str = "cost_usd";

/// One config of a benchmark grid: its hyperparameter values plus, for
/// hardware-expanded tables, the device it runs on.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigRow {
    pub params: Vec<f64>,
    pub hardware: Option<String>,
}

/// Dense benchmark: `n_configs × n_fidelities` cells of `m` objective
/// values each, all minimized.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkTable {
    name: String,
    objective_names: Vec<String>,
    param_names: Vec<String>,
    configs: Vec<ConfigRow>,
    fidelities: Vec<u64>,
    /// Layout: `[(config * n_fidelities + fidelity_pos) * m + objective]`.
    cells: Vec<f64>,
    runtime_idx: Option<usize>,
    cost_idx: Option<usize>,
}

impl BenchmarkTable {
    pub fn new(
        name: String,
        objective_names: Vec<String>,
        param_names: Vec<String>,
        configs: Vec<ConfigRow>,
        fidelities: Vec<u64>,
        cells: Vec<f64>,
    ) -> Result<Self> {
        if name.is_empty() {
            return Err(Error::invalid("benchmark name must not be empty"));
        }
        if objective_names.is_empty() {
            return Err(Error::EmptyInput {
                op: "BenchmarkTable::new (objectives)",
            });
        }
        let mut seen = std::collections::HashSet::new();
        for o in &objective_names {
            if !seen.insert(o.as_str()) {
                return Err(Error::invalid(format!("duplicate objective name `{o}`")));
            }
        }
        if configs.is_empty() {
            return Err(Error::EmptyInput {
                op: "BenchmarkTable::new (configs)",
            });
        }
        for (i, row) in configs.iter().enumerate() {
            if row.params.len() != param_names.len() {
                return Err(Error::invalid(format!(
                    "config {i} has {} params, expected {}",
                    row.params.len(),
                    param_names.len()
                )));
            }
            if row.params.iter().any(|p| !p.is_finite()) {
                return Err(Error::invalid(format!("config {i} has non-finite params")));
            }
        }
        let mut rows = std::collections::HashSet::new();
        for (i, row) in configs.iter().enumerate() {
            let key: (Vec<u64>, &Option<String>) = (
                row.params.iter().map(|p| p.to_bits()).collect(),
                &row.hardware,
            );
            if !rows.insert(key) {
                return Err(Error::invalid(format!(
                    "config {i} duplicates an earlier row"
                )));
            }
        }
        if fidelities.is_empty() {
            return Err(Error::EmptyInput {
                op: "BenchmarkTable::new (fidelities)",
            });
        }
        if fidelities[0] == 0 {
            return Err(Error::invalid("fidelities must be at least 1"));
        }
        if fidelities.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("fidelities must be strictly ascending"));
        }
        let m = objective_names.len();
        let expect = configs.len() * fidelities.len() * m;
        if cells.len() != expect {
            return Err(Error::invalid(format!(
                "table holds {} values, expected {} for a complete grid",
                cells.len(),
                expect
            )));
        }
        if cells.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("cell values must be finite"));
        }
        let idx_of = |target: &str| objective_names.iter().position(|o| o == target);
        let error_idx = idx_of(ERROR_OBJECTIVE);
        let runtime_idx = idx_of(RUNTIME_OBJECTIVE);
        let cost_idx = idx_of(COST_OBJECTIVE);
        for (at, v) in cells.iter().enumerate() {
            let obj = at % m;
            if Some(obj) == error_idx && !(0.0..=1.0).contains(v) {
                return Err(Error::invalid(format!(
                    "error values must lie in [0, 1], got {v}"
                )));
            }
            if Some(obj) == runtime_idx && *v <= 0.0 {
                return Err(Error::invalid(format!(
                    "runtime values must be positive, got {v}"
                )));
            }
            if Some(obj) == cost_idx && *v < 0.0 {
                return Err(Error::invalid(format!(
                    "cost values must be non-negative, got {v}"
                )));
            }
        }
        Ok(Self {
            name,
            objective_names,
            param_names,
            configs,
            fidelities,
            cells,
            runtime_idx,
            cost_idx,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn objective_names(&self) -> &[String] {
        &self.objective_names
    }

    pub fn param_names(&self) -> &[String] {
        &self.param_names
    }

    pub fn configs(&self) -> &[ConfigRow] {
        &self.configs
    }

    pub fn n_configs(&self) -> usize {
        self.configs.len()
    }

    pub fn n_objectives(&self) -> usize {
        self.objective_names.len()
    }

    pub fn fidelities(&self) -> &[u64] {
        &self.fidelities
    }

    pub fn max_fidelity(&self) -> Fidelity {
        Fidelity::new(*self.fidelities.last().expect("validated non-empty"))
            .expect("validated >= 1")
    }

    /// Position of a named objective, if the table has it.
    pub fn objective_index(&self, objective: &str) -> Option<usize> {
        self.objective_names.iter().position(|o| o == objective)
    }

    /// Coordinate holding the error objective; falls back to the first
    /// objective when no column is named for it.
    pub fn error_index(&self) -> usize {
        self.objective_index(ERROR_OBJECTIVE).unwrap_or(0)
    }

    /// Coordinate charged as wall-clock seconds, if present.
    pub fn runtime_index(&self) -> Option<usize> {
        self.runtime_idx
    }

    /// Coordinate charged as money, if present.
    pub fn cost_index(&self) -> Option<usize> {
        self.cost_idx
    }

    /// Objective values of one cell. Unknown configs and fidelities the
    /// grid was never measured at report their coordinates.
    pub fn cell(&self, config: ConfigId, fidelity: Fidelity) -> Result<ObjectiveVector> {
        let missing = || Error::MissingCell {
            name: self.name.clone(),
            config: config.0,
            fidelity: fidelity.level(),
        };
        if config.0 >= self.configs.len() {
            return Err(missing());
        }
        let pos = self
            .fidelities
            .binary_search(&fidelity.level())
            .map_err(|_| missing())?;
        let m = self.n_objectives();
        let at = (config.0 * self.fidelities.len() + pos) * m;
        Ok(ObjectiveVector::from_vec_unchecked(
            self.cells[at..at + m].to_vec(),
        ))
    }
}
