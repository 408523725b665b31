//! Linear order preservation checks and ranking comparisons.
//!
//! A weight vector preserves the linear order of a pattern when no edge
//! (i, j) — "i preferred to j" — has `w_i < w_j`. Equal weights never count
//! as a violation; float comparisons use a relative tie band of 1e-9 so
//! numerically equal weights pass, while exact rational comparisons are
//! strict.

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::graph::DagPattern;
use crate::weights::{LogWeights, Weights};

/// Relative tie band for float weight comparisons.
pub const FLOAT_TIE_EPS: f64 = 1e-9;

/// Outcome of a linear-order-preservation check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LopReport {
    /// Edges (i, j) whose preference is contradicted by the weights
    /// (1-indexed, canonical order).
    pub violations: Vec<(usize, usize)>,
    /// Alternatives grouped by descending weight; alternatives in one group
    /// are tied. Labels are 1-indexed.
    pub ranking: Vec<Vec<usize>>,
    pub satisfied: bool,
}

/// Sign of `w_i - w_j` under the relative tie band: 1, 0 or -1.
fn float_sign(wi: f64, wj: f64) -> i8 {
    let tie = FLOAT_TIE_EPS * wi.max(wj);
    if (wi - wj).abs() <= tie {
        0
    } else if wi > wj {
        1
    } else {
        -1
    }
}

fn ranking_from_order(order: Vec<usize>, tied: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for label in order {
        match groups.last_mut() {
            Some(group) if tied(group[0], label) => group.push(label),
            _ => groups.push(vec![label]),
        }
    }
    // Tied alternatives have no preferred order; list them by label.
    for group in &mut groups {
        group.sort_unstable();
    }
    groups
}

/// Checks a float weight vector against a pattern.
///
/// Panics if the dimensions disagree.
pub fn check_lop(pattern: &DagPattern, w: &Weights) -> LopReport {
    assert_eq!(pattern.n(), w.len(), "weight vector must match pattern size");
    check_lop_edges(&pattern.edges(), w)
}

/// Checks a float weight vector against an explicit preference edge list
/// "from -> to" in arbitrary labeling (for ordinal matrices that are not in
/// sorted form). Every label must be within 1..=w.len().
pub fn check_lop_edges(edges: &[(usize, usize)], w: &Weights) -> LopReport {
    let violations: Vec<(usize, usize)> = edges
        .iter()
        .copied()
        .filter(|&(i, j)| float_sign(w.get(i), w.get(j)) < 0)
        .collect();
    let mut order: Vec<usize> = (1..=w.len()).collect();
    order.sort_by(|&a, &b| w.get(b).total_cmp(&w.get(a)).then(a.cmp(&b)));
    let ranking = ranking_from_order(order, |a, b| float_sign(w.get(a), w.get(b)) == 0);
    LopReport { satisfied: violations.is_empty(), violations, ranking }
}

/// Checks exact rational log-weights against a pattern; comparisons are
/// exact, with no tie band.
///
/// Panics if the dimensions disagree.
pub fn check_lop_exact(pattern: &DagPattern, c: &LogWeights) -> LopReport {
    assert_eq!(pattern.n(), c.len(), "coefficient vector must match pattern size");
    let violations: Vec<(usize, usize)> = pattern
        .edges()
        .into_iter()
        .filter(|&(i, j)| c.gap(i, j).is_negative())
        .collect();
    let mut order: Vec<usize> = (1..=pattern.n()).collect();
    order.sort_by(|&a, &b| c.coeff(b).cmp(c.coeff(a)).then(a.cmp(&b)));
    let ranking = ranking_from_order(order, |a, b| c.coeff(a) == c.coeff(b));
    LopReport { satisfied: violations.is_empty(), violations, ranking }
}

/// Index pairs (i, j), i < j, whose relative order differs between the two
/// vectors, ties included: a pair that is tied in one vector and strict in
/// the other counts as a difference. Empty exactly when the rankings agree.
///
/// Panics if the dimensions disagree.
pub fn compare_rankings(w1: &Weights, w2: &Weights) -> Vec<(usize, usize)> {
    assert_eq!(w1.len(), w2.len(), "weight vectors must have equal length");
    let mut flips = Vec::new();
    for i in 1..=w1.len() {
        for j in i + 1..=w1.len() {
            if float_sign(w1.get(i), w1.get(j)) != float_sign(w2.get(i), w2.get(j)) {
                flips.push((i, j));
            }
        }
    }
    flips
}

/// Smallest `w_i - w_j` over the edges of the pattern: negative exactly when
/// the weights violate linear order preservation, and its magnitude measures
/// the strength of the worst violation. Positive infinity for an edgeless
/// pattern.
///
/// Panics if the dimensions disagree.
pub fn lop_gap(pattern: &DagPattern, w: &Weights) -> f64 {
    assert_eq!(pattern.n(), w.len(), "weight vector must match pattern size");
    pattern
        .edges()
        .into_iter()
        .map(|(i, j)| w.get(i) - w.get(j))
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn uniform_weights_always_satisfy() {
        let p = DagPattern::new(4, &[(1, 2), (2, 3), (3, 4), (1, 4)]).unwrap();
        let w = Weights::new(vec![1.0; 4]).unwrap();
        let report = check_lop(&p, &w);
        assert!(report.satisfied);
        assert!(report.violations.is_empty());
        assert_eq!(report.ranking, vec![vec![1, 2, 3, 4]]);
    }

    #[test]
    fn violations_are_edges_with_reversed_weights() {
        let p = DagPattern::new(3, &[(1, 2), (2, 3)]).unwrap();
        let w = Weights::new(vec![1.0, 2.0, 0.5]).unwrap();
        let report = check_lop(&p, &w);
        assert_eq!(report.violations, vec![(1, 2)]);
        assert!(!report.satisfied);
        assert_eq!(report.ranking, vec![vec![2], vec![1], vec![3]]);
    }

    #[test]
    fn exact_check_has_no_tie_band() {
        let p = DagPattern::new(2, &[(1, 2)]).unwrap();
        let ok = LogWeights::new(vec![rat(0, 1), rat(0, 1)]).unwrap();
        assert!(check_lop_exact(&p, &ok).satisfied);
        let bad = LogWeights::new(vec![rat(-1, 1_000_000_000), rat(1, 1_000_000_000)]).unwrap();
        assert!(!check_lop_exact(&p, &bad).satisfied);
    }

    #[test]
    fn near_equal_floats_are_ties() {
        let p = DagPattern::new(2, &[(1, 2)]).unwrap();
        let w = Weights::new(vec![0.5, 0.5 * (1.0 + 1e-12)]).unwrap();
        assert!(check_lop(&p, &w).satisfied);
        assert_eq!(check_lop(&p, &w).ranking, vec![vec![1, 2]]);
    }

    #[test]
    fn compare_rankings_reports_sign_changes() {
        let w1 = Weights::new(vec![3.0, 2.0, 1.0]).unwrap();
        let w2 = Weights::new(vec![2.0, 3.0, 1.0]).unwrap();
        assert_eq!(compare_rankings(&w1, &w2), vec![(1, 2)]);
        assert!(compare_rankings(&w1, &w1).is_empty());
    }

    #[test]
    fn gap_sign_matches_satisfaction() {
        let p = DagPattern::new(3, &[(1, 2), (2, 3)]).unwrap();
        let good = Weights::new(vec![3.0, 2.0, 1.0]).unwrap();
        assert!(lop_gap(&p, &good) > 0.0);
        assert!(check_lop(&p, &good).satisfied);
        let bad = Weights::new(vec![1.0, 2.0, 0.5]).unwrap();
        assert!(lop_gap(&p, &bad) < 0.0);
        assert!(!check_lop(&p, &bad).satisfied);
        let empty = DagPattern::new(3, &[]).unwrap();
        assert_eq!(lop_gap(&empty, &good), f64::INFINITY);
    }

    #[test]
    fn reversing_weights_flips_strict_edges() {
        let p = DagPattern::new(4, &[(1, 2), (2, 3), (1, 4)]).unwrap();
        let w = Weights::new(vec![4.0, 3.0, 2.0, 1.0]).unwrap();
        let forward = check_lop(&p, &w);
        let backward = check_lop(&p, &w.reversed());
        assert!(forward.satisfied);
        assert_eq!(backward.violations.len(), p.edge_count());
    }
}
