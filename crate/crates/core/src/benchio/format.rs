//! JSON Lines formats for benchmarks, transfer corpora, hardware cost
//! models, and latency tables.
//!
//! Every file starts with a `record: "header"` line naming its `kind` and
//! shape, followed by one record per row. Loaders validate completeness
//! and report the offending `path:line` on failure; savers emit a
//! canonical row order, so save → load → save reproduces a file byte for
//! byte.

use std::collections::HashMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::benchio::expand::{HardwareCostModel, HardwareEntry, LatencyTable};
use crate::benchio::{BenchmarkTable, ConfigRow};
use crate::error::{Error, Result};
use crate::transfer::TransferCorpus;

#[derive(Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum BenchRecord {
    Header {
        kind: String,
        name: String,
        objectives: Vec<String>,
        params: Vec<String>,
        fidelities: Vec<u64>,
    },
    Config {
        id: usize,
        params: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        hardware: Option<String>,
    },
    Cell {
        config: usize,
        fidelity: u64,
        values: Vec<f64>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum CorpusRecord {
    Header {
        kind: String,
        tasks: Vec<String>,
        objectives: Vec<String>,
        n_configs: usize,
    },
    Obs {
        config: usize,
        task: usize,
        values: Vec<f64>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum HardwareRecord {
    Header {
        kind: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reference: Option<String>,
        amortization_seconds: f64,
    },
    Hardware {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        batch_runtime_s: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        price_per_second: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        total_price: Option<f64>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum LatencyRecord {
    Header {
        kind: String,
        hardware: Vec<String>,
    },
    Row {
        config: usize,
        base_latency_s: f64,
        latency_s: Vec<f64>,
    },
}

fn load_err(path: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::Load {
        path: path.to_string(),
        line,
        msg: msg.into(),
    }
}

/// Parses every non-blank line, keeping 1-based line numbers.
fn parse_lines<R: DeserializeOwned>(text: &str, path: &str) -> Result<Vec<(usize, R)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record =
            serde_json::from_str(line).map_err(|e| load_err(path, i + 1, e.to_string()))?;
        out.push((i + 1, record));
    }
    if out.is_empty() {
        return Err(load_err(path, 1, "file holds no records"));
    }
    Ok(out)
}

fn check_kind(path: &str, line: usize, expected: &str, found: &str) -> Result<()> {
    if found != expected {
        return Err(load_err(
            path,
            line,
            format!("expected a {expected} file, found kind `{found}`"),
        ));
    }
    Ok(())
}

fn push_line<T: Serialize>(out: &mut String, record: &T) {
    out.push_str(&serde_json::to_string(record).expect("records serialize"));
    out.push('\n');
}

// ---------------------------------------------------------------------
// Benchmark tables
// ---------------------------------------------------------------------

pub fn save_benchmark_string(table: &BenchmarkTable) -> String {
    let mut out = String::new();
    push_line(
        &mut out,
        &BenchRecord::Header {
            kind: "benchmark".into(),
            name: table.name().to_string(),
            objectives: table.objective_names().to_vec(),
            params: table.param_names().to_vec(),
            fidelities: table.fidelities().to_vec(),
        },
    );
    for (id, row) in table.configs().iter().enumerate() {
        push_line(
            &mut out,
            &BenchRecord::Config {
                id,
                params: row.params.clone(),
                hardware: row.hardware.clone(),
            },
        );
    }
    for id in 0..table.n_configs() {
        for &fid in table.fidelities() {
            let values = table
                .cell(
                    crate::types::ConfigId(id),
                    crate::types::Fidelity::new(fid).expect("table fidelities are valid"),
                )
                .expect("complete table")
                .into_values();
            push_line(
                &mut out,
                &BenchRecord::Cell {
                    config: id,
                    fidelity: fid,
                    values,
                },
            );
        }
    }
    out
}

pub fn save_benchmark(table: &BenchmarkTable, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, save_benchmark_string(table))?;
    Ok(())
}

pub fn load_benchmark_str(text: &str, path: &str) -> Result<BenchmarkTable> {
    let records = parse_lines::<BenchRecord>(text, path)?;
    let (header_line, name, objectives, params, fidelities) = match &records[0] {
        (
            line,
            BenchRecord::Header {
                kind,
                name,
                objectives,
                params,
                fidelities,
            },
        ) => {
            check_kind(path, *line, "benchmark", kind)?;
            (
                *line,
                name.clone(),
                objectives.clone(),
                params.clone(),
                fidelities.clone(),
            )
        }
        (line, _) => return Err(load_err(path, *line, "first record must be a header")),
    };
    let m = objectives.len();
    let mut configs: HashMap<usize, ConfigRow> = HashMap::new();
    let mut cells: HashMap<(usize, u64), Vec<f64>> = HashMap::new();
    for (line, record) in records.into_iter().skip(1) {
        match record {
            BenchRecord::Header { .. } => {
                return Err(load_err(path, line, "duplicate header"));
            }
            BenchRecord::Config {
                id,
                params,
                hardware,
            } => {
                if configs.insert(id, ConfigRow { params, hardware }).is_some() {
                    return Err(load_err(path, line, format!("duplicate config {id}")));
                }
            }
            BenchRecord::Cell {
                config,
                fidelity,
                values,
            } => {
                if values.len() != m {
                    return Err(load_err(
                        path,
                        line,
                        format!("cell holds {} values, expected {m}", values.len()),
                    ));
                }
                if !fidelities.contains(&fidelity) {
                    return Err(load_err(
                        path,
                        line,
                        format!("fidelity {fidelity} is not in the header grid"),
                    ));
                }
                if cells.insert((config, fidelity), values).is_some() {
                    return Err(load_err(
                        path,
                        line,
                        format!("duplicate cell for config {config} at fidelity {fidelity}"),
                    ));
                }
            }
        }
    }
    let n = configs.len();
    let mut rows = Vec::with_capacity(n);
    for id in 0..n {
        match configs.remove(&id) {
            Some(row) => rows.push(row),
            None => {
                return Err(load_err(
                    path,
                    header_line,
                    format!("config ids are not contiguous: {id} is missing"),
                ))
            }
        }
    }
    let mut dense = Vec::with_capacity(n * fidelities.len() * m);
    for id in 0..n {
        for &fid in &fidelities {
            match cells.remove(&(id, fid)) {
                Some(values) => dense.extend(values),
                None => {
                    return Err(load_err(
                        path,
                        header_line,
                        format!("no cell for config {id} at fidelity {fid}"),
                    ))
                }
            }
        }
    }
    if let Some((&(config, fidelity), _)) = cells.iter().next() {
        return Err(load_err(
            path,
            header_line,
            format!("cell for config {config} at fidelity {fidelity} has no config record"),
        ));
    }
    BenchmarkTable::new(name, objectives, params, rows, fidelities, dense)
        .map_err(|e| load_err(path, header_line, e.to_string()))
}

pub fn load_benchmark(path: impl AsRef<Path>) -> Result<BenchmarkTable> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    load_benchmark_str(&text, &path.display().to_string())
}

// ---------------------------------------------------------------------
// Transfer corpora
// ---------------------------------------------------------------------

pub fn save_corpus_string(corpus: &TransferCorpus) -> String {
    let mut out = String::new();
    push_line(
        &mut out,
        &CorpusRecord::Header {
            kind: "corpus".into(),
            tasks: corpus.tasks().to_vec(),
            objectives: corpus.objective_names().to_vec(),
            n_configs: corpus.n_configs(),
        },
    );
    for config in 0..corpus.n_configs() {
        for task in 0..corpus.n_tasks() {
            let values = (0..corpus.n_objectives())
                .map(|o| corpus.value(config, task, o))
                .collect();
            push_line(
                &mut out,
                &CorpusRecord::Obs {
                    config,
                    task,
                    values,
                },
            );
        }
    }
    out
}

pub fn save_corpus(corpus: &TransferCorpus, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, save_corpus_string(corpus))?;
    Ok(())
}

pub fn load_corpus_str(text: &str, path: &str) -> Result<TransferCorpus> {
    let records = parse_lines::<CorpusRecord>(text, path)?;
    let (header_line, tasks, objectives, n_configs) = match &records[0] {
        (
            line,
            CorpusRecord::Header {
                kind,
                tasks,
                objectives,
                n_configs,
            },
        ) => {
            check_kind(path, *line, "corpus", kind)?;
            (*line, tasks.clone(), objectives.clone(), *n_configs)
        }
        (line, _) => return Err(load_err(path, *line, "first record must be a header")),
    };
    let (t, m) = (tasks.len(), objectives.len());
    if t == 0 || m == 0 || n_configs == 0 {
        return Err(load_err(
            path,
            header_line,
            "corpus header declares an empty grid",
        ));
    }
    let mut slots: Vec<Option<Vec<f64>>> = vec![None; n_configs * t];
    for (line, record) in records.into_iter().skip(1) {
        match record {
            CorpusRecord::Header { .. } => {
                return Err(load_err(path, line, "duplicate header"));
            }
            CorpusRecord::Obs {
                config,
                task,
                values,
            } => {
                if config >= n_configs || task >= t {
                    return Err(load_err(
                        path,
                        line,
                        format!("observation ({config}, {task}) is outside the declared grid"),
                    ));
                }
                if values.len() != m {
                    return Err(load_err(
                        path,
                        line,
                        format!("observation holds {} values, expected {m}", values.len()),
                    ));
                }
                let slot = &mut slots[config * t + task];
                if slot.is_some() {
                    return Err(load_err(
                        path,
                        line,
                        format!("duplicate observation for config {config} in task {task}"),
                    ));
                }
                *slot = Some(values);
            }
        }
    }
    let mut values = Vec::with_capacity(n_configs * t * m);
    for config in 0..n_configs {
        for task in 0..t {
            match slots[config * t + task].take() {
                Some(v) => values.extend(v),
                None => {
                    return Err(load_err(
                        path,
                        header_line,
                        format!("no observation for config {config} in task {task}"),
                    ))
                }
            }
        }
    }
    TransferCorpus::new(tasks, objectives, n_configs, values)
        .map_err(|e| load_err(path, header_line, e.to_string()))
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<TransferCorpus> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    load_corpus_str(&text, &path.display().to_string())
}

// ---------------------------------------------------------------------
// Hardware cost models
// ---------------------------------------------------------------------

pub fn save_hardware_model_string(model: &HardwareCostModel) -> String {
    let mut out = String::new();
    push_line(
        &mut out,
        &HardwareRecord::Header {
            kind: "hardware".into(),
            reference: model.reference().map(str::to_string),
            amortization_seconds: model.amortization_seconds(),
        },
    );
    for e in model.entries() {
        push_line(
            &mut out,
            &HardwareRecord::Hardware {
                name: e.name.clone(),
                batch_runtime_s: e.batch_runtime_s,
                price_per_second: e.price_per_second,
                total_price: e.total_price,
            },
        );
    }
    out
}

pub fn save_hardware_model(model: &HardwareCostModel, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, save_hardware_model_string(model))?;
    Ok(())
}

pub fn load_hardware_model_str(text: &str, path: &str) -> Result<HardwareCostModel> {
    let records = parse_lines::<HardwareRecord>(text, path)?;
    let (header_line, reference, amortization) = match &records[0] {
        (
            line,
            HardwareRecord::Header {
                kind,
                reference,
                amortization_seconds,
            },
        ) => {
            check_kind(path, *line, "hardware", kind)?;
            (*line, reference.clone(), *amortization_seconds)
        }
        (line, _) => return Err(load_err(path, *line, "first record must be a header")),
    };
    let mut entries = Vec::new();
    for (line, record) in records.into_iter().skip(1) {
        match record {
            HardwareRecord::Header { .. } => {
                return Err(load_err(path, line, "duplicate header"));
            }
            HardwareRecord::Hardware {
                name,
                batch_runtime_s,
                price_per_second,
                total_price,
            } => {
                entries.push(HardwareEntry {
                    name,
                    batch_runtime_s,
                    price_per_second,
                    total_price,
                });
            }
        }
    }
    HardwareCostModel::new(reference, amortization, entries)
        .map_err(|e| load_err(path, header_line, e.to_string()))
}

pub fn load_hardware_model(path: impl AsRef<Path>) -> Result<HardwareCostModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    load_hardware_model_str(&text, &path.display().to_string())
}

// ---------------------------------------------------------------------
// Latency tables
// ---------------------------------------------------------------------

pub fn save_latency_table_string(table: &LatencyTable) -> String {
    let mut out = String::new();
    push_line(
        &mut out,
        &LatencyRecord::Header {
            kind: "latency".into(),
            hardware: table.hardware().to_vec(),
        },
    );
    for config in 0..table.n_configs() {
        push_line(
            &mut out,
            &LatencyRecord::Row {
                config,
                base_latency_s: table.base_latency(config),
                latency_s: (0..table.n_hardware())
                    .map(|h| table.latency(config, h))
                    .collect(),
            },
        );
    }
    out
}

pub fn save_latency_table(table: &LatencyTable, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, save_latency_table_string(table))?;
    Ok(())
}

pub fn load_latency_table_str(text: &str, path: &str) -> Result<LatencyTable> {
    let records = parse_lines::<LatencyRecord>(text, path)?;
    let (header_line, hardware) = match &records[0] {
        (line, LatencyRecord::Header { kind, hardware }) => {
            check_kind(path, *line, "latency", kind)?;
            (*line, hardware.clone())
        }
        (line, _) => return Err(load_err(path, *line, "first record must be a header")),
    };
    let h = hardware.len();
    let mut rows: HashMap<usize, (f64, Vec<f64>)> = HashMap::new();
    for (line, record) in records.into_iter().skip(1) {
        match record {
            LatencyRecord::Header { .. } => {
                return Err(load_err(path, line, "duplicate header"));
            }
            LatencyRecord::Row {
                config,
                base_latency_s,
                latency_s,
            } => {
                if latency_s.len() != h {
                    return Err(load_err(
                        path,
                        line,
                        format!("row holds {} latencies, expected {h}", latency_s.len()),
                    ));
                }
                if rows.insert(config, (base_latency_s, latency_s)).is_some() {
                    return Err(load_err(
                        path,
                        line,
                        format!("duplicate row for config {config}"),
                    ));
                }
            }
        }
    }
    let n = rows.len();
    let mut base = Vec::with_capacity(n);
    let mut lat = Vec::with_capacity(n * h);
    for config in 0..n {
        match rows.remove(&config) {
            Some((b, l)) => {
                base.push(b);
                lat.extend(l);
            }
            None => {
                return Err(load_err(
                    path,
                    header_line,
                    format!("config ids are not contiguous: {config} is missing"),
                ))
            }
        }
    }
    LatencyTable::new(hardware, base, lat).map_err(|e| load_err(path, header_line, e.to_string()))
}

pub fn load_latency_table(path: impl AsRef<Path>) -> Result<LatencyTable> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    load_latency_table_str(&text, &path.display().to_string())
}
