//! Pareto-front extraction, non-dominated sorting, and the epsilon-net
//! order used to rank points within a front.
//!
//! Sorting peels successive fronts with the usual domination-count pass,
//! then orders each front by greedy farthest-point selection: start at the
//! point with the smallest first coordinate, then repeatedly pick the point
//! maximizing the minimum Euclidean distance to everything already chosen.
//! Distances are computed in z-score-normalized objective space so that no
//! coordinate's unit dominates the geometry. All ties break toward the
//! lowest input index, which keeps every ordering deterministic.

use crate::error::{Error, Result};
use crate::types::{batch_dim, dominates_slices, zscore_normalize, ObjectiveVector};

/// A complete ranking of a point batch.
///
/// `order[j]` is the input index of the j-th ranked point; `front_label[j]`
/// is the front that point belongs to (0 = Pareto front). Labels are
/// non-decreasing along `order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedIndices {
    order: Vec<usize>,
    front_label: Vec<usize>,
}

impl RankedIndices {
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn front_label(&self) -> &[usize] {
        &self.front_label
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Front label of an input index (position-independent view).
    pub fn front_of(&self, input_index: usize) -> Option<usize> {
        self.order
            .iter()
            .position(|&i| i == input_index)
            .map(|pos| self.front_label[pos])
    }
}

/// Peels all fronts by domination counts. Each front's indices come back
/// in ascending input order.
fn peel_fronts(points: &[ObjectiveVector]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_count = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates_slices(points[i].values(), points[j].values()) {
                dominates_list[i].push(j);
                dominated_count[j] += 1;
            } else if dominates_slices(points[j].values(), points[i].values()) {
                dominates_list[j].push(i);
                dominated_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_count[j] -= 1;
                if dominated_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Indices of the non-dominated points, ascending. Duplicate points never
/// dominate each other, so copies of a front point are all included.
pub fn pareto_front(points: &[ObjectiveVector]) -> Result<Vec<usize>> {
    batch_dim(points, "pareto_front")?;
    let n = points.len();
    let mut out = Vec::new();
    'outer: for i in 0..n {
        for j in 0..n {
            if j != i && dominates_slices(points[j].values(), points[i].values()) {
                continue 'outer;
            }
        }
        out.push(i);
    }
    Ok(out)
}

/// Greedy farthest-point order over `members` (indices into `points`),
/// with distances measured in the members' z-score-normalized space.
fn epsilon_net_order(points: &[ObjectiveVector], members: &[usize]) -> Vec<usize> {
    let k = members.len();
    if k == 1 {
        return members.to_vec();
    }
    let member_points: Vec<ObjectiveVector> = members.iter().map(|&i| points[i].clone()).collect();
    let z = zscore_normalize(&member_points).expect("members are a validated non-empty batch");

    // Seed with the smallest first coordinate; `members` is ascending, so
    // a strict comparison breaks ties toward the lowest input index.
    let mut start = 0;
    for p in 1..k {
        if z[p][0] < z[start][0] {
            start = p;
        }
    }

    let dist2 = |a: usize, b: usize| -> f64 {
        z[a].values()
            .iter()
            .zip(z[b].values())
            .map(|(x, y)| (x - y).powi(2))
            .sum()
    };

    let mut selected = Vec::with_capacity(k);
    let mut chosen = vec![false; k];
    let mut min_dist2 = vec![f64::INFINITY; k];
    selected.push(start);
    chosen[start] = true;
    for p in 0..k {
        if !chosen[p] {
            min_dist2[p] = dist2(p, start);
        }
    }
    while selected.len() < k {
        let mut best = usize::MAX;
        for p in 0..k {
            if !chosen[p] && (best == usize::MAX || min_dist2[p] > min_dist2[best]) {
                best = p;
            }
        }
        selected.push(best);
        chosen[best] = true;
        for p in 0..k {
            if !chosen[p] {
                let d = dist2(p, best);
                if d < min_dist2[p] {
                    min_dist2[p] = d;
                }
            }
        }
    }
    selected.into_iter().map(|p| members[p]).collect()
}

/// Orders one front for promotion: coverage-first, deterministic.
///
/// The first pick is the point with the minimum first coordinate; each
/// subsequent pick maximizes the minimum normalized Euclidean distance to
/// the points already picked. Duplicates sit at distance zero and are
/// selected last, in input order.
pub fn epsilon_net_sort(points: &[ObjectiveVector]) -> Result<Vec<usize>> {
    batch_dim(points, "epsilon_net_sort")?;
    let members: Vec<usize> = (0..points.len()).collect();
    Ok(epsilon_net_order(points, &members))
}

/// Full non-dominated sort: peel Pareto fronts, then order each front by
/// the epsilon-net rule. The result ranks every input point.
pub fn nondominated_sort(points: &[ObjectiveVector]) -> Result<RankedIndices> {
    batch_dim(points, "nondominated_sort")?;
    let fronts = peel_fronts(points);
    let mut order = Vec::with_capacity(points.len());
    let mut front_label = Vec::with_capacity(points.len());
    for (label, front) in fronts.iter().enumerate() {
        for idx in epsilon_net_order(points, front) {
            order.push(idx);
            front_label.push(label);
        }
    }
    Ok(RankedIndices { order, front_label })
}

/// The first `k` points of the non-dominated sort.
pub fn top_k_nd(points: &[ObjectiveVector], k: usize) -> Result<Vec<usize>> {
    batch_dim(points, "top_k_nd")?;
    if k > points.len() {
        return Err(Error::KTooLarge { k, n: points.len() });
    }
    let ranked = nondominated_sort(points)?;
    Ok(ranked.order()[..k].to_vec())
}
