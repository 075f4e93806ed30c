//! Random-scalarization baselines: linear, augmented Chebyshev (ParEGO
//! style), and hypervolume scalarization.
//!
//! Ranking a batch always follows the same pipeline: z-score normalize the
//! batch, draw one fresh weight vector, score every point, and keep the k
//! best. Linear and ParEGO scores are minimized directly. The hypervolume
//! scalarization measures how far a point pushes into the region it
//! dominates, so large values are good; the batch is reflected coordinate-
//! wise (negated and shifted non-negative) before scoring and the ranking
//! keeps the largest scores.

use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::types::{batch_dim, zscore_normalize, ObjectiveVector};

/// Default augmentation coefficient for the ParEGO scalarization.
pub const DEFAULT_RHO: f64 = 0.05;

/// How a weight vector is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    /// Uniform on the probability simplex (entries sum to 1).
    Simplex,
    /// Absolute value of an isotropic Gaussian, normalized to unit length.
    PositiveSphere,
}

/// Which scalarization scores a batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarMethod {
    Linear,
    ParEgo,
    Hypervolume,
}

impl ScalarMethod {
    /// The weight distribution each method draws from.
    pub fn weight_mode(&self) -> WeightMode {
        match self {
            ScalarMethod::Linear | ScalarMethod::ParEgo => WeightMode::Simplex,
            ScalarMethod::Hypervolume => WeightMode::PositiveSphere,
        }
    }
}

/// A weight vector plus the ParEGO augmentation coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarizationWeights {
    lambda: Vec<f64>,
    rho: f64,
}

impl ScalarizationWeights {
    /// Builds weights, rejecting empty, non-finite, or negative entries.
    pub fn new(lambda: Vec<f64>, rho: f64) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::EmptyInput {
                op: "ScalarizationWeights::new",
            });
        }
        if lambda.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("weights must be finite and non-negative"));
        }
        if !rho.is_finite() || rho < 0.0 {
            return Err(Error::invalid("rho must be finite and non-negative"));
        }
        Ok(Self { lambda, rho })
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn check_len(&self, y: &ObjectiveVector) -> Result<()> {
        if y.len() != self.lambda.len() {
            return Err(Error::LengthMismatch {
                left: y.len(),
                right: self.lambda.len(),
            });
        }
        Ok(())
    }
}

/// Draws one weight vector of dimension `m`.
pub fn draw_weights(
    rng: &mut SeededRng,
    m: usize,
    mode: WeightMode,
) -> Result<ScalarizationWeights> {
    if m == 0 {
        return Err(Error::invalid("weight dimension must be at least 1"));
    }
    let lambda = match mode {
        // Normalized unit-rate exponentials are uniform on the simplex.
        WeightMode::Simplex => {
            let draws: Vec<f64> = (0..m).map(|_| rng.exp1()).collect();
            let total: f64 = draws.iter().sum();
            draws.into_iter().map(|v| v / total).collect()
        }
        WeightMode::PositiveSphere => loop {
            let draws: Vec<f64> = (0..m).map(|_| rng.standard_normal().abs()).collect();
            let norm = draws.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                break draws.into_iter().map(|v| v / norm).collect();
            }
        },
    };
    ScalarizationWeights::new(lambda, DEFAULT_RHO)
}

/// Weighted sum: `lambda . y`.
pub fn scalarize_linear(y: &ObjectiveVector, w: &ScalarizationWeights) -> Result<f64> {
    w.check_len(y)?;
    Ok(y.values().iter().zip(w.lambda()).map(|(v, l)| l * v).sum())
}

/// Augmented Chebyshev: `max_i(lambda_i y_i) + rho * sum_i(lambda_i y_i)`.
pub fn scalarize_parego(y: &ObjectiveVector, w: &ScalarizationWeights) -> Result<f64> {
    w.check_len(y)?;
    let mut max_term = f64::NEG_INFINITY;
    let mut sum_term = 0.0;
    for (v, l) in y.values().iter().zip(w.lambda()) {
        let t = l * v;
        max_term = max_term.max(t);
        sum_term += t;
    }
    Ok(max_term + w.rho() * sum_term)
}

/// Hypervolume scalarization: `min_i(max(0, y_i / lambda_i))^m`.
///
/// Callers must hand in non-negative data (the batch pipeline reflects
/// minimized objectives first). Zero weight coordinates are floored at
/// 1e-12; negative ones are rejected.
pub fn scalarize_hypervolume(y: &ObjectiveVector, w: &ScalarizationWeights) -> Result<f64> {
    w.check_len(y)?;
    let m = y.len() as i32;
    let mut min_ratio = f64::INFINITY;
    for (v, l) in y.values().iter().zip(w.lambda()) {
        if *l < 0.0 {
            return Err(Error::invalid("hypervolume weights must be non-negative"));
        }
        let l = l.max(1e-12);
        min_ratio = min_ratio.min((v / l).max(0.0));
    }
    Ok(min_ratio.powi(m))
}

/// Ranks a batch under one freshly drawn weight vector and returns the k
/// best indices. Every call draws new weights; ties break toward the
/// lowest input index.
pub fn top_k_scalarized(
    points: &[ObjectiveVector],
    k: usize,
    method: ScalarMethod,
    rho: f64,
    rng: &mut SeededRng,
) -> Result<Vec<usize>> {
    let m = batch_dim(points, "top_k_scalarized")?;
    let w = draw_weights(rng, m, method.weight_mode())?.with_rho(rho);
    top_k_scalarized_with(points, k, method, &w)
}

/// Same as [`top_k_scalarized`] with caller-supplied weights.
pub fn top_k_scalarized_with(
    points: &[ObjectiveVector],
    k: usize,
    method: ScalarMethod,
    w: &ScalarizationWeights,
) -> Result<Vec<usize>> {
    let m = batch_dim(points, "top_k_scalarized")?;
    if k > points.len() {
        return Err(Error::KTooLarge { k, n: points.len() });
    }
    if w.len() != m {
        return Err(Error::LengthMismatch {
            left: m,
            right: w.len(),
        });
    }
    let z = zscore_normalize(points)?;
    let scores: Vec<f64> = match method {
        ScalarMethod::Linear => z
            .iter()
            .map(|p| scalarize_linear(p, w))
            .collect::<Result<_>>()?,
        ScalarMethod::ParEgo => z
            .iter()
            .map(|p| scalarize_parego(p, w))
            .collect::<Result<_>>()?,
        ScalarMethod::Hypervolume => {
            // Reflect each coordinate (good becomes large, minimum lands at
            // zero), score, and negate so that ascending order keeps the
            // largest hypervolume scores.
            let mut max_c = vec![f64::NEG_INFINITY; m];
            for p in &z {
                for (c, v) in p.values().iter().enumerate() {
                    max_c[c] = max_c[c].max(*v);
                }
            }
            let mut scores = Vec::with_capacity(z.len());
            for p in &z {
                let reflected: Vec<f64> = p
                    .values()
                    .iter()
                    .enumerate()
                    .map(|(c, v)| max_c[c] - v)
                    .collect();
                let refl = ObjectiveVector::from_vec_unchecked(reflected);
                scores.push(-scalarize_hypervolume(&refl, w)?);
            }
            scores
        }
    };
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        scores[a]
            .partial_cmp(&scores[b])
            .expect("scores are finite")
            .then(a.cmp(&b))
    });
    order.truncate(k);
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::RngCore;

    fn ov(values: &[f64]) -> ObjectiveVector {
        ObjectiveVector::new(values.to_vec()).unwrap()
    }

    fn weights(lambda: &[f64], rho: f64) -> ScalarizationWeights {
        ScalarizationWeights::new(lambda.to_vec(), rho).unwrap()
    }

    #[test]
    fn linear_spot_values() {
        let w = weights(&[0.3, 0.7], DEFAULT_RHO);
        let s = scalarize_linear(&ov(&[1.0, 2.0]), &w).unwrap();
        assert!((s - 1.7).abs() < 1e-12);
        let w = weights(&[1.0], DEFAULT_RHO);
        assert_eq!(scalarize_linear(&ov(&[0.0]), &w).unwrap(), 0.0);
    }

    #[test]
    fn parego_spot_values() {
        let w = weights(&[0.5, 0.5], 0.05);
        let s = scalarize_parego(&ov(&[1.0, 2.0]), &w).unwrap();
        assert!((s - 1.075).abs() < 1e-12);
        // rho = 0 reduces to the weighted Chebyshev term alone.
        let w0 = weights(&[0.5, 0.5], 0.0);
        let s0 = scalarize_parego(&ov(&[1.0, 2.0]), &w0).unwrap();
        assert!((s0 - 1.0).abs() < 1e-12);
        // Spot check with uneven weights: max(0.2*3, 0.8*1) + 0.05*(0.6+0.8).
        let w2 = weights(&[0.2, 0.8], 0.05);
        let s2 = scalarize_parego(&ov(&[3.0, 1.0]), &w2).unwrap();
        assert!((s2 - (0.8 + 0.05 * 1.4)).abs() < 1e-12);
    }

    #[test]
    fn hypervolume_spot_values() {
        let w = weights(&[1.0, 1.0], DEFAULT_RHO);
        let s = scalarize_hypervolume(&ov(&[2.0, 3.0]), &w).unwrap();
        assert!((s - 4.0).abs() < 1e-12);

        let inv = 1.0 / 2.0f64.sqrt();
        let w = weights(&[inv, inv], DEFAULT_RHO);
        let s = scalarize_hypervolume(&ov(&[4.0, 4.0]), &w).unwrap();
        assert_relative_eq!(s, 32.0, max_relative = 1e-12);

        // A zero coordinate clamps the score to zero.
        let w = weights(&[1.0, 1.0], DEFAULT_RHO);
        assert_eq!(scalarize_hypervolume(&ov(&[0.0, 5.0]), &w).unwrap(), 0.0);
    }

    #[test]
    fn hypervolume_floors_zero_weights_and_rejects_negative() {
        let w = weights(&[0.0, 1.0], DEFAULT_RHO);
        // The zero coordinate is floored, producing a huge but finite ratio.
        let s = scalarize_hypervolume(&ov(&[1.0, 1.0]), &w).unwrap();
        assert!(s.is_finite());
        let bad = ScalarizationWeights {
            lambda: vec![-1.0, 1.0],
            rho: DEFAULT_RHO,
        };
        assert!(scalarize_hypervolume(&ov(&[1.0, 1.0]), &bad).is_err());
    }

    #[test]
    fn scalarize_rejects_length_mismatch() {
        let w = weights(&[0.5, 0.5], DEFAULT_RHO);
        assert!(scalarize_linear(&ov(&[1.0]), &w).is_err());
        assert!(scalarize_parego(&ov(&[1.0]), &w).is_err());
        assert!(scalarize_hypervolume(&ov(&[1.0]), &w).is_err());
    }

    #[test]
    fn simplex_draws_sum_to_one_and_match_uniform_marginals() {
        let mut rng = SeededRng::new(11);
        let m = 3;
        let draws = 10_000;
        let mut mean = vec![0.0; m];
        for _ in 0..draws {
            let w = draw_weights(&mut rng, m, WeightMode::Simplex).unwrap();
            let total: f64 = w.lambda().iter().sum();
            assert!((total - 1.0).abs() < 1e-9);
            assert!(w.lambda().iter().all(|&v| v >= 0.0));
            for (acc, v) in mean.iter_mut().zip(w.lambda()) {
                *acc += v / draws as f64;
            }
        }
        for v in mean {
            assert!((v - 1.0 / m as f64).abs() < 0.02, "marginal mean {v}");
        }
    }

    #[test]
    fn sphere_draws_have_unit_norm_and_symmetric_marginals() {
        let mut rng = SeededRng::new(13);
        let m = 2;
        let draws = 10_000;
        let mut mean = vec![0.0; m];
        for _ in 0..draws {
            let w = draw_weights(&mut rng, m, WeightMode::PositiveSphere).unwrap();
            let norm: f64 = w.lambda().iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-9);
            assert!(w.lambda().iter().all(|&v| v >= 0.0));
            for (acc, v) in mean.iter_mut().zip(w.lambda()) {
                *acc += v / draws as f64;
            }
        }
        // Coordinates are exchangeable; their means agree.
        assert!((mean[0] - mean[1]).abs() < 0.02);
    }

    #[test]
    fn draw_weights_rejects_dimension_zero() {
        let mut rng = SeededRng::new(0);
        assert!(draw_weights(&mut rng, 0, WeightMode::Simplex).is_err());
    }

    #[test]
    fn top_k_picks_the_dominating_point_under_every_method() {
        // (0,0) z-normalizes to the per-coordinate minimum, which must win
        // under all three methods for any valid weights.
        let p = vec![ov(&[0.0, 0.0]), ov(&[10.0, 10.0])];
        for method in [
            ScalarMethod::Linear,
            ScalarMethod::ParEgo,
            ScalarMethod::Hypervolume,
        ] {
            for seed in 0..20 {
                let mut rng = SeededRng::new(seed);
                let got = top_k_scalarized(&p, 1, method, DEFAULT_RHO, &mut rng).unwrap();
                assert_eq!(got, vec![0], "method {method:?} seed {seed}");
            }
        }
    }

    #[test]
    fn top_k_linear_with_forced_axis_weight() {
        let p = vec![ov(&[1.0, 3.0]), ov(&[3.0, 1.0])];
        let w = weights(&[1.0, 0.0], DEFAULT_RHO);
        let got = top_k_scalarized_with(&p, 1, ScalarMethod::Linear, &w).unwrap();
        assert_eq!(got, vec![0]);
        let w = weights(&[0.0, 1.0], DEFAULT_RHO);
        let got = top_k_scalarized_with(&p, 1, ScalarMethod::Linear, &w).unwrap();
        assert_eq!(got, vec![1]);
    }

    #[test]
    fn top_k_full_batch_returns_score_order() {
        let p = vec![ov(&[2.0, 2.0]), ov(&[0.0, 0.0]), ov(&[1.0, 1.0])];
        let w = weights(&[0.5, 0.5], DEFAULT_RHO);
        let got = top_k_scalarized_with(&p, 3, ScalarMethod::Linear, &w).unwrap();
        assert_eq!(got, vec![1, 2, 0]);
    }

    #[test]
    fn top_k_ties_break_toward_lowest_index() {
        let p = vec![ov(&[1.0, 1.0]), ov(&[1.0, 1.0]), ov(&[2.0, 2.0])];
        let w = weights(&[0.5, 0.5], DEFAULT_RHO);
        let got = top_k_scalarized_with(&p, 2, ScalarMethod::Linear, &w).unwrap();
        assert_eq!(got, vec![0, 1]);
    }

    #[test]
    fn top_k_bounds_checks() {
        let p = vec![ov(&[1.0, 2.0])];
        let mut rng = SeededRng::new(5);
        assert!(top_k_scalarized(&p, 2, ScalarMethod::Linear, DEFAULT_RHO, &mut rng).is_err());
        assert!(top_k_scalarized(&[], 0, ScalarMethod::Linear, DEFAULT_RHO, &mut rng).is_err());
    }

    #[test]
    fn single_config_rung_stays_finite_under_every_method() {
        let p = vec![ov(&[0.3, 120.0])];
        for method in [
            ScalarMethod::Linear,
            ScalarMethod::ParEgo,
            ScalarMethod::Hypervolume,
        ] {
            let mut rng = SeededRng::new(3);
            let got = top_k_scalarized(&p, 1, method, DEFAULT_RHO, &mut rng).unwrap();
            assert_eq!(got, vec![0]);
        }
    }

    #[test]
    fn fresh_weights_each_call_move_the_stream() {
        let p = vec![ov(&[1.0, 3.0]), ov(&[3.0, 1.0])];
        let mut rng = SeededRng::new(21);
        let before = rng.clone().next_u64();
        let _ = top_k_scalarized(&p, 1, ScalarMethod::Linear, DEFAULT_RHO, &mut rng).unwrap();
        let after = rng.next_u64();
        assert_ne!(before, after, "ranking must consume draws");
    }
}
