//! Shared domain types: objective vectors, config handles, fidelity levels,
//! and the batch normalization used before every distance or scalarization
//! computation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in objective space. Every coordinate is minimized.
///
/// Vectors are finite and non-empty by construction; the owning benchmark
/// guarantees that all points it hands out share one dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectiveVector(Vec<f64>);

impl ObjectiveVector {
    /// Builds a vector, rejecting empty or non-finite input.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput {
                op: "ObjectiveVector::new",
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "objective vectors must be finite, got {v}"
            )));
        }
        Ok(Self(values))
    }

    /// Internal constructor for values already known to be finite.
    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty() && values.iter().all(|v| v.is_finite()));
        Self(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Objective vectors are never empty; provided for clippy symmetry.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for ObjectiveVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Index of a configuration row in a benchmark table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConfigId(pub usize);

impl std::fmt::Display for ConfigId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A resource level (epochs, iterations, ...). Strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fidelity(u64);

impl Fidelity {
    pub fn new(level: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::invalid("fidelity levels start at 1"));
        }
        Ok(Self(level))
    }

    pub fn level(&self) -> u64 {
        self.0
    }
}

impl std::fmt::Display for Fidelity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Pareto dominance under minimization: `a` dominates `b` iff `a` is no
/// worse in every coordinate and strictly better in at least one.
///
/// Equal points do not dominate each other, so duplicates always survive
/// front extraction together.
///
/// # Panics
///
/// Panics if the two vectors disagree on dimension; that is a caller bug,
/// not a data condition.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> bool {
    assert_eq!(
        a.len(),
        b.len(),
        "dominance requires equal-length objective vectors"
    );
    dominates_slices(a.values(), b.values())
}

/// Slice-level dominance check shared by the sorting internals.
pub(crate) fn dominates_slices(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b.iter()) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

/// Checks a batch is non-empty and shares one dimension; returns it.
pub(crate) fn batch_dim(points: &[ObjectiveVector], op: &'static str) -> Result<usize> {
    let first = points.first().ok_or(Error::EmptyInput { op })?;
    let m = first.len();
    for p in points {
        if p.len() != m {
            return Err(Error::LengthMismatch {
                left: m,
                right: p.len(),
            });
        }
    }
    Ok(m)
}

/// Z-score normalization per coordinate, using the population variance of
/// the batch. Coordinates whose values are all identical map to zero, which
/// keeps downstream distances and scalarizations finite on degenerate
/// batches (e.g. a rung holding a single config).
pub fn zscore_normalize(points: &[ObjectiveVector]) -> Result<Vec<ObjectiveVector>> {
    let m = batch_dim(points, "zscore_normalize")?;
    let n = points.len() as f64;
    let mut out = vec![vec![0.0f64; m]; points.len()];
    for c in 0..m {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for p in points {
            let v = p[c];
            lo = lo.min(v);
            hi = hi.max(v);
            sum += v;
        }
        // An exactly constant column has no scale; leave it at zero rather
        // than dividing by rounding noise.
        if lo == hi {
            continue;
        }
        let mean = sum / n;
        let var = points.iter().map(|p| (p[c] - mean).powi(2)).sum::<f64>() / n;
        let sd = var.sqrt();
        for (i, p) in points.iter().enumerate() {
            out[i][c] = (p[c] - mean) / sd;
        }
    }
    Ok(out
        .into_iter()
        .map(ObjectiveVector::from_vec_unchecked)
        .collect())
}
