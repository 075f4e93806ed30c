//! Hardware-aware expansion: turn a device-agnostic benchmark into a
//! (config × hardware) product grid with a monetary cost objective.
//!
//! Two deployment models are covered. *Cloud* devices are rented: each
//! one carries a reference batch runtime (runtimes scale by its ratio to
//! the reference device's) and a rental price per second. *Edge* devices
//! are bought: runtimes scale by measured per-config latency ratios, and
//! the price per second amortizes the purchase over a fixed service life.

use crate::benchio::{BenchmarkTable, ConfigRow, COST_OBJECTIVE, RUNTIME_OBJECTIVE};
use crate::error::{Error, Result};
use crate::types::{ConfigId, Fidelity};

/// Default amortization window for bought devices: 200 days of
/// around-the-clock service, in seconds.
pub const DEFAULT_AMORTIZATION_SECONDS: f64 = 3600.0 * 24.0 * 200.0;

/// One device row of a cost model. Cloud devices carry
/// `batch_runtime_s` + `price_per_second`; edge devices carry
/// `total_price`.
#[derive(Debug, Clone, PartialEq)]
pub struct HardwareEntry {
    pub name: String,
    /// Runtime of a reference workload on this device, in seconds.
    pub batch_runtime_s: Option<f64>,
    /// Rental price in dollars per second.
    pub price_per_second: Option<f64>,
    /// Purchase price in dollars, amortized into a per-second rate.
    pub total_price: Option<f64>,
}

/// A set of devices with enough pricing data to charge runtimes in
/// dollars.
#[derive(Debug, Clone, PartialEq)]
pub struct HardwareCostModel {
    reference: Option<String>,
    amortization_seconds: f64,
    entries: Vec<HardwareEntry>,
}

impl HardwareCostModel {
    pub fn new(
        reference: Option<String>,
        amortization_seconds: f64,
        entries: Vec<HardwareEntry>,
    ) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyInput {
                op: "HardwareCostModel::new",
            });
        }
        if !(amortization_seconds > 0.0 && amortization_seconds.is_finite()) {
            return Err(Error::invalid("amortization window must be positive"));
        }
        let mut seen = std::collections::HashSet::new();
        for e in &entries {
            if !seen.insert(e.name.as_str()) {
                return Err(Error::invalid(format!(
                    "duplicate hardware name `{}`",
                    e.name
                )));
            }
            for (label, v) in [
                ("batch_runtime_s", e.batch_runtime_s),
                ("price_per_second", e.price_per_second),
                ("total_price", e.total_price),
            ] {
                if let Some(v) = v {
                    if !(v > 0.0 && v.is_finite()) {
                        return Err(Error::invalid(format!(
                            "hardware `{}` has non-positive {label}",
                            e.name
                        )));
                    }
                }
            }
            if e.price_per_second.is_none() && e.total_price.is_none() {
                return Err(Error::invalid(format!(
                    "hardware `{}` has neither a rental price nor a purchase price",
                    e.name
                )));
            }
        }
        if let Some(r) = &reference {
            if !entries.iter().any(|e| &e.name == r) {
                return Err(Error::invalid(format!(
                    "reference hardware `{r}` is not listed"
                )));
            }
        }
        Ok(Self {
            reference,
            amortization_seconds,
            entries,
        })
    }

    /// Seven bought devices with list prices, amortized over the default
    /// service life.
    pub fn default_edge() -> Self {
        let buy = |name: &str, total_price: f64| HardwareEntry {
            name: name.to_string(),
            batch_runtime_s: None,
            price_per_second: None,
            total_price: Some(total_price),
        };
        Self::new(
            None,
            DEFAULT_AMORTIZATION_SECONDS,
            vec![
                buy("gpu1080", 800.0),
                buy("edgegpu", 499.0),
                buy("raspi4", 99.99),
                buy("edgetpu", 129.99),
                buy("pixel3", 140.0),
                buy("eyeriss", 2500.0),
                buy("fpga", 2500.0),
            ],
        )
        .expect("built-in model is well-formed")
    }

    pub fn reference(&self) -> Option<&str> {
        self.reference.as_deref()
    }

    pub fn amortization_seconds(&self) -> f64 {
        self.amortization_seconds
    }

    pub fn entries(&self) -> &[HardwareEntry] {
        &self.entries
    }

    pub fn entry(&self, name: &str) -> Option<&HardwareEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Dollars charged per second on the named device: the rental rate
    /// when it is rented, the amortized purchase price when it is bought.
    pub fn gamma(&self, name: &str) -> Result<f64> {
        let e = self
            .entry(name)
            .ok_or_else(|| Error::invalid(format!("unknown hardware `{name}`")))?;
        match (e.price_per_second, e.total_price) {
            (Some(pps), _) => Ok(pps),
            (None, Some(total)) => Ok(total / self.amortization_seconds),
            (None, None) => unreachable!("validated at construction"),
        }
    }
}

/// Measured inference latencies of every config on every device, plus
/// the config's latency on the device the base benchmark was recorded on.
#[derive(Debug, Clone, PartialEq)]
pub struct LatencyTable {
    hardware: Vec<String>,
    /// `base[config]`: latency on the recording device, seconds.
    base: Vec<f64>,
    /// `lat[config * n_hardware + h]`, seconds.
    lat: Vec<f64>,
}

impl LatencyTable {
    pub fn new(hardware: Vec<String>, base: Vec<f64>, lat: Vec<f64>) -> Result<Self> {
        if hardware.is_empty() || base.is_empty() {
            return Err(Error::EmptyInput {
                op: "LatencyTable::new",
            });
        }
        let mut seen = std::collections::HashSet::new();
        for h in &hardware {
            if !seen.insert(h.as_str()) {
                return Err(Error::invalid(format!("duplicate hardware name `{h}`")));
            }
        }
        if lat.len() != base.len() * hardware.len() {
            return Err(Error::invalid(format!(
                "latency table holds {} values, expected {} for a complete grid",
                lat.len(),
                base.len() * hardware.len()
            )));
        }
        if base
            .iter()
            .chain(lat.iter())
            .any(|v| !(v.is_finite() && *v > 0.0))
        {
            return Err(Error::invalid("latencies must be positive"));
        }
        Ok(Self {
            hardware,
            base,
            lat,
        })
    }

    pub fn hardware(&self) -> &[String] {
        &self.hardware
    }

    pub fn n_hardware(&self) -> usize {
        self.hardware.len()
    }

    pub fn n_configs(&self) -> usize {
        self.base.len()
    }

    pub fn base_latency(&self, config: usize) -> f64 {
        self.base[config]
    }

    pub fn latency(&self, config: usize, hardware: usize) -> f64 {
        self.lat[config * self.hardware.len() + hardware]
    }
}

/// Checks shared preconditions and returns the base runtime column.
fn expandable_runtime_index(base: &BenchmarkTable) -> Result<usize> {
    let runtime_idx = base.runtime_index().ok_or_else(|| {
        Error::invalid(format!(
            "hardware expansion needs a `{RUNTIME_OBJECTIVE}` objective to scale"
        ))
    })?;
    if base.cost_index().is_some() {
        return Err(Error::invalid(format!(
            "benchmark already has a `{COST_OBJECTIVE}` objective; it was expanded before"
        )));
    }
    if base.configs().iter().any(|c| c.hardware.is_some()) {
        return Err(Error::invalid(
            "benchmark configs already name hardware; it was expanded before",
        ));
    }
    Ok(runtime_idx)
}

/// Shared product-grid assembly: scales the runtime of every base cell by
/// a per-(config, device) factor, charges it at the device's dollar rate,
/// and appends the cost objective.
fn expand_with(
    base: &BenchmarkTable,
    suffix: &str,
    devices: &[(String, f64)], // (name, gamma)
    scale: impl Fn(usize, usize) -> f64,
) -> Result<BenchmarkTable> {
    let runtime_idx = expandable_runtime_index(base)?;
    let mut objectives = base.objective_names().to_vec();
    objectives.push(COST_OBJECTIVE.to_string());
    let mut configs = Vec::with_capacity(base.n_configs() * devices.len());
    let mut cells =
        Vec::with_capacity(configs.capacity() * base.fidelities().len() * objectives.len());
    for (x, row) in base.configs().iter().enumerate() {
        for (h, (name, gamma)) in devices.iter().enumerate() {
            configs.push(ConfigRow {
                params: row.params.clone(),
                hardware: Some(name.clone()),
            });
            for &fid in base.fidelities() {
                let y = base
                    .cell(ConfigId(x), Fidelity::new(fid).expect("valid grid"))
                    .expect("complete table");
                let mut values = y.into_values();
                let runtime = values[runtime_idx] * scale(x, h);
                values[runtime_idx] = runtime;
                values.push(gamma * runtime);
                cells.extend(values);
            }
        }
    }
    BenchmarkTable::new(
        format!("{}-{suffix}", base.name()),
        objectives,
        base.param_names().to_vec(),
        configs,
        base.fidelities().to_vec(),
        cells,
    )
}

/// Expands a benchmark across rented devices: runtimes scale by each
/// device's batch-runtime ratio to the reference device, and cost is the
/// rental rate times the scaled runtime.
pub fn expand_cloud(base: &BenchmarkTable, model: &HardwareCostModel) -> Result<BenchmarkTable> {
    let reference = model
        .reference()
        .ok_or_else(|| Error::invalid("cloud expansion needs a reference hardware"))?;
    let r_ref = model
        .entry(reference)
        .expect("validated at construction")
        .batch_runtime_s
        .ok_or_else(|| {
            Error::invalid(format!(
                "reference hardware `{reference}` has no batch runtime"
            ))
        })?;
    let mut devices = Vec::with_capacity(model.entries().len());
    let mut ratios = Vec::with_capacity(model.entries().len());
    for e in model.entries() {
        let (Some(rt), Some(pps)) = (e.batch_runtime_s, e.price_per_second) else {
            return Err(Error::invalid(format!(
                "hardware `{}` is missing cloud pricing (batch runtime and price per second)",
                e.name
            )));
        };
        devices.push((e.name.clone(), pps));
        ratios.push(rt / r_ref);
    }
    expand_with(base, "cloud", &devices, |_, h| ratios[h])
}

/// Expands a benchmark across bought devices: runtimes scale by each
/// config's measured latency ratio to its base latency, and cost is the
/// amortized purchase rate times the scaled runtime.
pub fn expand_edge(
    base: &BenchmarkTable,
    model: &HardwareCostModel,
    latency: &LatencyTable,
) -> Result<BenchmarkTable> {
    if latency.n_configs() != base.n_configs() {
        return Err(Error::invalid(format!(
            "latency table covers {} configs but the benchmark has {}",
            latency.n_configs(),
            base.n_configs()
        )));
    }
    let mut devices = Vec::with_capacity(latency.n_hardware());
    for name in latency.hardware() {
        if model.entry(name).is_none() {
            return Err(Error::invalid(format!(
                "latency table names hardware `{name}` that the cost model lacks"
            )));
        }
        devices.push((name.clone(), model.gamma(name)?));
    }
    expand_with(base, "edge", &devices, |x, h| {
        latency.latency(x, h) / latency.base_latency(x)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::table_from_rows;
    use approx::assert_relative_eq;

    fn base_table(n: usize) -> BenchmarkTable {
        table_from_rows(n, 3, |cfg, fid| {
            vec![
                0.9 / (cfg + fid as usize + 1) as f64,
                (cfg + 1) as f64 * fid as f64,
            ]
        })
    }

    fn cloud_model() -> HardwareCostModel {
        let rent = |name: &str, rt: f64, pps: f64| HardwareEntry {
            name: name.into(),
            batch_runtime_s: Some(rt),
            price_per_second: Some(pps),
            total_price: None,
        };
        HardwareCostModel::new(
            Some("v100".into()),
            DEFAULT_AMORTIZATION_SECONDS,
            vec![
                rent("v100", 1.0, 3e-4),
                rent("t4", 2.5, 1e-4),
                rent("a100", 0.5, 9e-4),
            ],
        )
        .unwrap()
    }

    #[test]
    fn model_construction_validates_entries() {
        let e = |name: &str| HardwareEntry {
            name: name.into(),
            batch_runtime_s: None,
            price_per_second: None,
            total_price: Some(1.0),
        };
        assert!(HardwareCostModel::new(None, 1.0, vec![]).is_err());
        assert!(HardwareCostModel::new(None, 0.0, vec![e("a")]).is_err());
        assert!(HardwareCostModel::new(None, 1.0, vec![e("a"), e("a")]).is_err());
        assert!(HardwareCostModel::new(Some("b".into()), 1.0, vec![e("a")]).is_err());
        let unpriced = HardwareEntry {
            name: "a".into(),
            batch_runtime_s: Some(1.0),
            price_per_second: None,
            total_price: None,
        };
        assert!(HardwareCostModel::new(None, 1.0, vec![unpriced]).is_err());
        let negative = HardwareEntry {
            total_price: Some(-5.0),
            ..e("a")
        };
        assert!(HardwareCostModel::new(None, 1.0, vec![negative]).is_err());
    }

    #[test]
    fn bought_devices_amortize_their_purchase_price() {
        let model = HardwareCostModel::default_edge();
        assert_relative_eq!(
            model.gamma("gpu1080").unwrap(),
            800.0 / 17_280_000.0,
            epsilon = 1e-18
        );
        // Rental rates win over purchase prices when both are present.
        let both = HardwareCostModel::new(
            None,
            100.0,
            vec![HardwareEntry {
                name: "x".into(),
                batch_runtime_s: None,
                price_per_second: Some(0.5),
                total_price: Some(1000.0),
            }],
        )
        .unwrap();
        assert_eq!(both.gamma("x").unwrap(), 0.5);
        assert!(both.gamma("nope").is_err());
    }

    #[test]
    fn cloud_expansion_builds_the_product_grid() {
        let base = base_table(10);
        let model = cloud_model();
        let big = expand_cloud(&base, &model).unwrap();
        assert_eq!(big.n_configs(), 30);
        assert_eq!(big.name(), "toy-cloud");
        assert_eq!(
            big.objective_names(),
            &[
                "error".to_string(),
                "runtime_s".to_string(),
                "cost_usd".to_string()
            ]
        );
        // Config-major, device-minor layout: row x*H + h pairs config x
        // with device h, keeping the base params.
        let row = &big.configs()[7 * 3 + 1];
        assert_eq!(row.params, base.configs()[7].params);
        assert_eq!(row.hardware.as_deref(), Some("t4"));
    }

    #[test]
    fn cloud_expansion_scales_runtimes_and_charges_rent() {
        let base = base_table(4);
        let big = expand_cloud(&base, &cloud_model()).unwrap();
        let fid = Fidelity::new(3).unwrap();
        for x in 0..4 {
            let y0 = base.cell(ConfigId(x), fid).unwrap();
            for (h, (ratio, pps)) in [(1.0, 3e-4), (2.5, 1e-4), (0.5, 9e-4)].iter().enumerate() {
                let y = big.cell(ConfigId(x * 3 + h), fid).unwrap();
                assert_eq!(y[0], y0[0], "error is device-independent");
                assert_relative_eq!(y[1], y0[1] * ratio, max_relative = 1e-12);
                assert_relative_eq!(y[2], y[1] * pps, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn edge_expansion_scales_by_latency_ratios() {
        let base = base_table(2);
        let model = HardwareCostModel::new(
            None,
            1000.0,
            vec![
                HardwareEntry {
                    name: "devA".into(),
                    batch_runtime_s: None,
                    price_per_second: None,
                    total_price: Some(10.0),
                },
                HardwareEntry {
                    name: "devB".into(),
                    batch_runtime_s: None,
                    price_per_second: None,
                    total_price: Some(500.0),
                },
            ],
        )
        .unwrap();
        let latency = LatencyTable::new(
            vec!["devA".into(), "devB".into()],
            vec![0.1, 0.2],
            vec![0.2, 0.05, 0.2, 0.1],
        )
        .unwrap();
        let big = expand_edge(&base, &model, &latency).unwrap();
        assert_eq!(big.name(), "toy-edge");
        assert_eq!(big.n_configs(), 4);
        let fid = Fidelity::new(2).unwrap();
        // Per-config latency ratios: config 0 runs 2x slower than its
        // base device on devA and 2x faster on devB; config 1 keeps
        // 1x / 0.5x. Expanded row x * 2 + h pairs config x with device h.
        let cases = [
            (0usize, 0usize, 2.0, 10.0),
            (0, 1, 0.5, 500.0),
            (1, 0, 1.0, 10.0),
            (1, 1, 0.5, 500.0),
        ];
        for (x, h, scale, price) in cases {
            let y0 = base.cell(ConfigId(x), fid).unwrap();
            let y = big.cell(ConfigId(x * 2 + h), fid).unwrap();
            assert_eq!(y[0], y0[0], "error is device-independent");
            assert_relative_eq!(y[1], y0[1] * scale, max_relative = 1e-12);
            assert_relative_eq!(y[2], y[1] * (price / 1000.0), max_relative = 1e-12);
        }
    }

    #[test]
    fn expansion_rejects_unfit_inputs() {
        let base = base_table(2);
        let model = cloud_model();

        // Expanding twice: the product grid already names hardware and
        // carries a cost objective.
        let once = expand_cloud(&base, &model).unwrap();
        assert!(expand_cloud(&once, &model).is_err());

        // No runtime objective to scale.
        let no_runtime = BenchmarkTable::new(
            "t".into(),
            vec!["error".into()],
            vec!["x".into()],
            vec![ConfigRow {
                params: vec![0.0],
                hardware: None,
            }],
            vec![1],
            vec![0.5],
        )
        .unwrap();
        assert!(expand_cloud(&no_runtime, &model).is_err());

        // Cloud pricing requires a reference and per-second rates.
        assert!(expand_cloud(&base, &HardwareCostModel::default_edge()).is_err());

        // Edge expansion requires one latency row per config.
        let latency = LatencyTable::new(vec!["gpu1080".into()], vec![0.1], vec![0.2]).unwrap();
        let err = expand_edge(&base, &HardwareCostModel::default_edge(), &latency).unwrap_err();
        assert!(err.to_string().contains("covers 1 configs"));

        // And every latency column must be priced.
        let latency =
            LatencyTable::new(vec!["mystery".into()], vec![0.1, 0.2], vec![0.2, 0.3]).unwrap();
        assert!(expand_edge(&base, &HardwareCostModel::default_edge(), &latency).is_err());
    }

    #[test]
    fn latency_table_validates_shape() {
        assert!(LatencyTable::new(vec![], vec![0.1], vec![]).is_err());
        assert!(LatencyTable::new(vec!["a".into()], vec![], vec![]).is_err());
        assert!(
            LatencyTable::new(vec!["a".into(), "a".into()], vec![0.1], vec![0.1, 0.2]).is_err()
        );
        assert!(LatencyTable::new(vec!["a".into()], vec![0.1], vec![0.1, 0.2]).is_err());
        assert!(LatencyTable::new(vec!["a".into()], vec![0.1], vec![-0.2]).is_err());
    }
}
