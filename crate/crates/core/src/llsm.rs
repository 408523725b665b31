//! Logarithmic least squares weights for incomplete matrices.
//!
//! Minimizing the sum of squared log-residuals over the known entries reduces
//! to a linear system on the log-weights whose matrix is the Laplacian of the
//! comparison graph: `L_ii` is the number of known comparisons of alternative
//! `i`, `L_ij = -1` when `a_ij` is known. The system determines the solution
//! up to a constant shift exactly when the graph is weakly connected; the
//! shift is pinned by requiring the log-weights to sum to 0.
//!
//! For an ordinal matrix every known entry is `b` or `1/b`, so the right-hand
//! side is an integer vector of log-b units and the solution is a rational
//! multiple of `log b` per coordinate, independent of `b`. That path runs in
//! exact rational arithmetic; general matrices are solved in floating point.

use num_rational::BigRational;
use num_traits::{FromPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::DagPattern;
use crate::linalg::{solve_f64, solve_rational};
use crate::pcm::GeneralPcm;
use crate::weights::{LogWeights, Weights};

/// Normal equations of the log least squares problem.
///
/// `matrix` is the integer Laplacian of the comparison graph; `rhs[i]` is the
/// sum of logs of the known entries in row `i` — exact rational log-b units
/// for ordinal input, natural logs for general input.
#[derive(Debug, Clone)]
pub struct LaplacianSystem<R> {
    pub matrix: Vec<Vec<i64>>,
    pub rhs: Vec<R>,
}

impl LaplacianSystem<BigRational> {
    /// System for an ordinal pattern. The right-hand side of vertex `i` is
    /// its out-degree minus in-degree, in units of `log b`.
    pub fn from_pattern(pattern: &DagPattern) -> Self {
        let n = pattern.n();
        let mut matrix = vec![vec![0i64; n]; n];
        let mut net = vec![0i64; n];
        for (i, j) in pattern.edges() {
            matrix[i - 1][i - 1] += 1;
            matrix[j - 1][j - 1] += 1;
            matrix[i - 1][j - 1] -= 1;
            matrix[j - 1][i - 1] -= 1;
            net[i - 1] += 1;
            net[j - 1] -= 1;
        }
        let rhs = net.into_iter().map(|v| BigRational::from_i64(v).unwrap()).collect();
        LaplacianSystem { matrix, rhs }
    }
}

impl LaplacianSystem<f64> {
    /// System for a general matrix, right-hand side in natural logs.
    pub fn from_pcm(pcm: &GeneralPcm) -> Self {
        let n = pcm.n();
        let mut matrix = vec![vec![0i64; n]; n];
        let mut rhs = vec![0.0f64; n];
        for (i, j) in pcm.known_pairs() {
            let log = pcm.entry_f64(i, j).expect("known pair").ln();
            matrix[i - 1][i - 1] += 1;
            matrix[j - 1][j - 1] += 1;
            matrix[i - 1][j - 1] -= 1;
            matrix[j - 1][i - 1] -= 1;
            rhs[i - 1] += log;
            rhs[j - 1] -= log;
        }
        LaplacianSystem { matrix, rhs }
    }
}

/// Exact log-weight coefficients of an ordinal pattern, in units of `log b`.
///
/// Solves `L c = rhs` with the sum of the coefficients pinned to 0: the last
/// coefficient is eliminated through the constraint, the reduced system is
/// solved by rational elimination, and the eliminated equation is verified.
pub fn llsm_exact(pattern: &DagPattern) -> Result<LogWeights> {
    llsm_exact_digraph(pattern.n(), &pattern.edges())
}

/// Exact coefficients for a preference digraph in arbitrary labeling (edges
/// "from -> to" need not satisfy from < to). Used for ordinal matrices that
/// are not in sorted form; the digraph may even contain cycles, the solution
/// just loses its order-preservation reading then.
pub fn llsm_exact_digraph(n: usize, edges: &[(usize, usize)]) -> Result<LogWeights> {
    if n < 2 {
        return Err(Error::TooFewAlternatives { n });
    }
    let mut matrix = vec![vec![0i64; n]; n];
    let mut net = vec![0i64; n];
    let mut seen = std::collections::BTreeSet::new();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for &(i, j) in edges {
        if i == j || i < 1 || j < 1 || i > n || j > n || !seen.insert((i.min(j), i.max(j))) {
            return Err(Error::InvalidEdge { i, j, n });
        }
        matrix[i - 1][i - 1] += 1;
        matrix[j - 1][j - 1] += 1;
        matrix[i - 1][j - 1] -= 1;
        matrix[j - 1][i - 1] -= 1;
        net[i - 1] += 1;
        net[j - 1] -= 1;
        let (a, b) = (find(&mut parent, i - 1), find(&mut parent, j - 1));
        parent[a] = b;
    }
    let root = find(&mut parent, 0);
    if (1..n).any(|v| find(&mut parent, v) != root) {
        return Err(Error::NotConnected);
    }
    let rhs = net.into_iter().map(|v| BigRational::from_i64(v).unwrap()).collect();
    let system = LaplacianSystem { matrix, rhs };
    solve_laplacian_exact(n, &system)
}

fn solve_laplacian_exact(n: usize, system: &LaplacianSystem<BigRational>) -> Result<LogWeights> {
    let reduced: Vec<Vec<BigRational>> = (0..n - 1)
        .map(|row| {
            (0..n - 1)
                .map(|col| BigRational::from_i64(system.matrix[row][col] - system.matrix[row][n - 1]).unwrap())
                .collect()
        })
        .collect();
    let rhs: Vec<BigRational> = system.rhs[..n - 1].to_vec();
    let head = solve_rational(reduced, rhs).ok_or(Error::SingularSystem)?;
    let tail = -head.iter().sum::<BigRational>();
    let mut coeffs = head;
    coeffs.push(tail);
    // The eliminated equation must hold automatically; check it does.
    let residual: BigRational = (0..n)
        .map(|col| BigRational::from_i64(system.matrix[n - 1][col]).unwrap() * &coeffs[col])
        .sum::<BigRational>()
        - &system.rhs[n - 1];
    if !residual.is_zero() {
        return Err(Error::SingularSystem);
    }
    LogWeights::new(coeffs)
}

/// Floating-point log least squares weights of a general incomplete matrix,
/// normalized to sum 1.
pub fn llsm_float(pcm: &GeneralPcm) -> Result<Weights> {
    let y = llsm_log_weights(pcm)?;
    let peak = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Weights::new(y.iter().map(|v| (v - peak).exp()).collect())
}

/// Mean-zero log-weights of [`llsm_float`], useful for scale checks.
pub fn llsm_log_weights(pcm: &GeneralPcm) -> Result<Vec<f64>> {
    if !pcm.is_weakly_connected() {
        return Err(Error::NotConnected);
    }
    let system = LaplacianSystem::from_pcm(pcm);
    let n = pcm.n();
    let reduced: Vec<Vec<f64>> = (0..n - 1)
        .map(|row| {
            (0..n - 1)
                .map(|col| (system.matrix[row][col] - system.matrix[row][n - 1]) as f64)
                .collect()
        })
        .collect();
    let rhs: Vec<f64> = system.rhs[..n - 1].to_vec();
    let head = solve_f64(reduced, rhs).ok_or(Error::SingularSystem)?;
    let tail = -head.iter().sum::<f64>();
    let mut y = head;
    y.push(tail);
    Ok(y)
}

/// Sum of squared log-residuals over the known entries, both orientations
/// counted, matching the double-sum definition of the objective.
///
/// Panics if the weight vector length differs from the matrix size.
pub fn llsm_objective(pcm: &GeneralPcm, w: &Weights) -> f64 {
    assert_eq!(pcm.n(), w.len(), "weight vector must match matrix size");
    let mut total = 0.0;
    for (i, j) in pcm.known_pairs() {
        let r = pcm.entry_f64(i, j).expect("known pair").ln() - (w.get(i) / w.get(j)).ln();
        total += 2.0 * r * r;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcm::realize;
    use num_traits::One;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn single_edge_splits_evenly() {
        let p = DagPattern::new(2, &[(1, 2)]).unwrap();
        let c = llsm_exact(&p).unwrap();
        assert_eq!(c.coeffs(), &[rat(1, 2), rat(-1, 2)]);
    }

    #[test]
    fn consistent_chain_has_integer_coeffs() {
        let p = DagPattern::new(3, &[(1, 2), (2, 3)]).unwrap();
        let c = llsm_exact(&p).unwrap();
        assert_eq!(c.coeffs(), &[rat(1, 1), rat(0, 1), rat(-1, 1)]);
    }

    #[test]
    fn disconnected_pattern_is_rejected() {
        let p = DagPattern::new(4, &[(1, 2), (3, 4)]).unwrap();
        assert!(matches!(llsm_exact(&p), Err(Error::NotConnected)));
        let a = realize(&p, 2.0).unwrap();
        assert!(matches!(llsm_float(&a), Err(Error::NotConnected)));
    }

    #[test]
    fn float_weights_recover_consistent_matrix() {
        // a_ij = w_i / w_j for w = (1/2, 1/3, 1/6): zero-residual optimum.
        let w = [0.5, 1.0 / 3.0, 1.0 / 6.0];
        let mut a = GeneralPcm::new(3).unwrap();
        for i in 1..=3usize {
            for j in i + 1..=3usize {
                a.set_f64(i, j, w[i - 1] / w[j - 1]).unwrap();
            }
        }
        let weights = llsm_float(&a).unwrap();
        for i in 1..=3 {
            assert!((weights.get(i) - w[i - 1]).abs() < 1e-12);
        }
        assert!(llsm_objective(&a, &weights) < 1e-24);
    }

    #[test]
    fn objective_with_uniform_weights_sums_square_logs() {
        let p = DagPattern::new(3, &[(1, 2), (1, 3)]).unwrap();
        let a = realize(&p, 4.0).unwrap();
        let uniform = Weights::new(vec![1.0, 1.0, 1.0]).unwrap();
        let expected = 2.0 * 2.0 * 4.0f64.ln().powi(2);
        assert!((llsm_objective(&a, &uniform) - expected).abs() < 1e-12);
    }

    #[test]
    fn exact_and_float_agree_on_ordinal_input() {
        let p = DagPattern::new(4, &[(1, 2), (1, 3), (2, 4), (3, 4), (1, 4)]).unwrap();
        let exact = llsm_exact(&p).unwrap();
        for b in [2.0, 3.0, 9.0] {
            let float = llsm_float(&realize(&p, b).unwrap()).unwrap();
            let from_exact = exact.to_weights(b).unwrap();
            for i in 1..=4 {
                let rel = (float.get(i) - from_exact.get(i)).abs() / from_exact.get(i);
                assert!(rel < 1e-10, "b = {b}, i = {i}, rel = {rel}");
            }
        }
    }

    #[test]
    fn coefficients_sum_to_zero_exactly() {
        let p = DagPattern::new(5, &[(1, 2), (2, 3), (3, 4), (4, 5), (1, 5), (2, 5)]).unwrap();
        let c = llsm_exact(&p).unwrap();
        let sum: BigRational = c.coeffs().iter().sum();
        assert!(sum.is_zero());
        // llsm_exact never depends on b: coefficients are pure rationals.
        assert!(c.coeffs().iter().any(|v| !v.denom().is_one()));
    }
}
