//! Eigenvector-method weights.
//!
//! Complete positive matrices get their dominant eigenpair by power
//! iteration. Incomplete matrices are first completed by choosing the missing
//! entries that minimize the dominant eigenvalue — the completion that makes
//! the matrix as consistent as possible — and the weights are the Perron
//! vector of that completion. The minimizer is characterized by a stationarity
//! condition coupling the right and left Perron vectors: for a filled
//! position (i, j), `x_ij^2 = (v_j w_i) / (v_i w_j)`. The eigenvalue is
//! convex in the logs of the fill values, so a stationary completion is the
//! global minimum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pcm::GeneralPcm;
use crate::weights::Weights;

/// Hard cap on power-iteration steps.
const POWER_ITERATION_CAP: usize = 1_000_000;
/// Hard cap on completion sweeps.
const SWEEP_CAP: usize = 10_000;
/// Accepted per-sweep eigenvalue increase attributable to rounding.
const LAMBDA_SLACK: f64 = 1e-13;
/// Stationarity tolerance on fill values, in log units.
const STATIONARITY_TOL: f64 = 1e-10;

/// Dominant eigenpair of a complete positive matrix.
#[derive(Debug, Clone)]
pub struct PerronResult {
    pub lambda_max: f64,
    pub weights: Weights,
    pub iterations: usize,
    /// `max_i |(A w)_i - lambda w_i|` at the returned eigenpair.
    pub residual: f64,
}

/// An eigenvalue-minimizing completion together with its eigenpair.
#[derive(Debug, Clone)]
pub struct CompletionResult {
    /// Input matrix with every missing pair filled.
    pub completed: GeneralPcm,
    /// Fill values by upper-triangular position.
    pub filled: Vec<((usize, usize), f64)>,
    pub lambda_max: f64,
    pub perron: PerronResult,
    /// Completion sweeps performed.
    pub sweeps: usize,
    /// Eigenvalue after each accepted sweep, non-increasing.
    pub lambda_history: Vec<f64>,
}

fn validate_positive(a: &[f64], n: usize) -> Result<()> {
    assert_eq!(a.len(), n * n, "matrix buffer must be n x n");
    for i in 0..n {
        for j in 0..n {
            let v = a[i * n + j];
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::NonPositiveEntry { i: i + 1, j: j + 1 });
            }
        }
    }
    Ok(())
}

/// Power iteration with a deterministic uniform start vector.
///
/// Converges when the max relative change of the normalized vector and the
/// Rayleigh-quotient change both drop to 1e-14.
pub fn perron(a: &[f64], n: usize) -> Result<PerronResult> {
    validate_positive(a, n)?;
    let start = vec![1.0 / n as f64; n];
    power_iterate(a, n, start)
}

fn power_iterate(a: &[f64], n: usize, mut w: Vec<f64>) -> Result<PerronResult> {
    let total: f64 = w.iter().sum();
    for v in w.iter_mut() {
        *v /= total;
    }
    let mut y = vec![0.0; n];
    let mut rho_prev = f64::INFINITY;
    for iter in 1..=POWER_ITERATION_CAP {
        matvec(a, n, &w, &mut y);
        let mut dot_wy = 0.0;
        let mut dot_ww = 0.0;
        let mut sum_y = 0.0;
        for i in 0..n {
            dot_wy += w[i] * y[i];
            dot_ww += w[i] * w[i];
            sum_y += y[i];
        }
        let rho = dot_wy / dot_ww;
        let mut vec_change = 0.0f64;
        for i in 0..n {
            let next = y[i] / sum_y;
            vec_change = vec_change.max((next - w[i]).abs() / next);
            w[i] = next;
        }
        if vec_change <= 1e-14 && (rho - rho_prev).abs() <= 1e-14 {
            matvec(a, n, &w, &mut y);
            let residual = (0..n).map(|i| (y[i] - rho * w[i]).abs()).fold(0.0, f64::max);
            return Ok(PerronResult {
                lambda_max: rho,
                weights: Weights::new(w)?,
                iterations: iter,
                residual,
            });
        }
        rho_prev = rho;
    }
    Err(Error::NoConvergence { iterations: POWER_ITERATION_CAP })
}

fn matvec(a: &[f64], n: usize, x: &[f64], out: &mut [f64]) {
    for i in 0..n {
        let row = &a[i * n..(i + 1) * n];
        let mut acc = 0.0;
        for j in 0..n {
            acc += row[j] * x[j];
        }
        out[i] = acc;
    }
}

/// Cheap eigenvalue evaluation with a warm start; returns the updated warm
/// vector so successive calls on nearby matrices converge in a few steps.
fn lambda_warm(a: &[f64], n: usize, warm: &mut Vec<f64>) -> Result<f64> {
    let result = power_iterate(a, n, warm.clone())?;
    *warm = result.weights.as_slice().to_vec();
    Ok(result.lambda_max)
}

fn transpose(a: &[f64], n: usize, out: &mut [f64]) {
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = a[i * n + j];
        }
    }
}

/// Eigenvalue-minimizing completion of a weakly connected incomplete matrix.
///
/// Missing entries start at 1. Sweeps first refill with the Perron-vector
/// ratios `w_i / w_j`, which drops the eigenvalue quickly; once that map
/// stalls, fills move toward the stationarity values
/// `sqrt((v_j w_i) / (v_i w_j))` with backtracking, and a per-coordinate
/// golden-section descent stands behind it as a guaranteed-decrease fallback.
/// The eigenvalue never increases from sweep to sweep, and at termination
/// every fill is at its coordinate optimum within 1e-10 in log scale.
///
/// `tol` is the per-sweep eigenvalue-change threshold below which a sweep
/// counts as stalled (1e-12 is the conventional choice).
pub fn em_complete(pcm: &GeneralPcm, tol: f64) -> Result<CompletionResult> {
    let n = pcm.n();
    let missing = pcm.missing_pairs();
    if missing.is_empty() {
        let dense = pcm.to_dense()?;
        let pr = perron(&dense, n)?;
        return Ok(CompletionResult {
            completed: pcm.clone(),
            filled: Vec::new(),
            lambda_max: pr.lambda_max,
            perron: pr.clone(),
            sweeps: 0,
            lambda_history: vec![pr.lambda_max],
        });
    }
    if !pcm.is_weakly_connected() {
        return Err(Error::NotConnected);
    }

    let mut a = vec![0.0f64; n * n];
    for i in 1..=n {
        for j in 1..=n {
            a[(i - 1) * n + (j - 1)] = pcm.entry_f64(i, j).unwrap_or(1.0);
        }
    }
    validate_positive(&a, n)?;

    let mut warm = vec![1.0 / n as f64; n];
    let mut warm_left = warm.clone();
    let mut at = vec![0.0f64; n * n];
    let mut lambda = lambda_warm(&a, n, &mut warm)?;
    let mut history = vec![lambda];
    let mut sweeps = 0;
    let mut ratio_phase = true;

    while sweeps < SWEEP_CAP {
        sweeps += 1;
        let w = warm.clone();

        if ratio_phase {
            // Primary map: refill with right-Perron ratios.
            let mut candidate = a.clone();
            for &(i, j) in &missing {
                let x = w[i - 1] / w[j - 1];
                candidate[(i - 1) * n + (j - 1)] = x;
                candidate[(j - 1) * n + (i - 1)] = 1.0 / x;
            }
            let mut cand_warm = warm.clone();
            let cand_lambda = lambda_warm(&candidate, n, &mut cand_warm)?;
            if cand_lambda <= lambda + LAMBDA_SLACK {
                let improved = lambda - cand_lambda >= tol;
                a = candidate;
                warm = cand_warm;
                lambda = lambda.min(cand_lambda);
                history.push(lambda);
                if improved {
                    continue;
                }
            }
            // Stalled (or would increase): switch to the stationarity phase.
            ratio_phase = false;
            continue;
        }

        // Stationarity phase: need the left Perron vector as well.
        transpose(&a, n, &mut at);
        let left = power_iterate(&at, n, warm_left.clone())?;
        warm_left = left.weights.as_slice().to_vec();
        let v = left.weights.as_slice();

        let mut worst_log_gap = 0.0f64;
        let mut targets = Vec::with_capacity(missing.len());
        for &(i, j) in &missing {
            let x = a[(i - 1) * n + (j - 1)];
            let target = ((v[j - 1] * w[i - 1]) / (v[i - 1] * w[j - 1])).sqrt();
            worst_log_gap = worst_log_gap.max((x.ln() - target.ln()).abs());
            targets.push(target);
        }
        if worst_log_gap <= STATIONARITY_TOL {
            break;
        }

        // Damped multiplicative step toward the stationarity targets.
        let mut step = 1.0f64;
        let mut accepted = false;
        for _ in 0..40 {
            let mut candidate = a.clone();
            for (idx, &(i, j)) in missing.iter().enumerate() {
                let x = a[(i - 1) * n + (j - 1)];
                let x_new = x * (targets[idx] / x).powf(step);
                candidate[(i - 1) * n + (j - 1)] = x_new;
                candidate[(j - 1) * n + (i - 1)] = 1.0 / x_new;
            }
            let mut cand_warm = warm.clone();
            let cand_lambda = lambda_warm(&candidate, n, &mut cand_warm)?;
            if cand_lambda <= lambda + LAMBDA_SLACK {
                a = candidate;
                warm = cand_warm;
                lambda = lambda.min(cand_lambda);
                history.push(lambda);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // Guaranteed-decrease fallback: golden-section on each fill.
            for &(i, j) in &missing {
                let t = golden_coordinate(&mut a, n, i, j, &mut warm)?;
                let x = t.exp();
                a[(i - 1) * n + (j - 1)] = x;
                a[(j - 1) * n + (i - 1)] = 1.0 / x;
            }
            let new_lambda = lambda_warm(&a, n, &mut warm)?;
            lambda = lambda.min(new_lambda);
            history.push(lambda);
        }
    }
    if sweeps >= SWEEP_CAP {
        return Err(Error::CompletionDiverged { sweeps });
    }

    let mut completed = pcm.clone();
    let mut filled = Vec::with_capacity(missing.len());
    for &(i, j) in &missing {
        let x = a[(i - 1) * n + (j - 1)];
        completed.set_f64(i, j, x)?;
        filled.push(((i, j), x));
    }
    let pr = perron(&a, n)?;
    Ok(CompletionResult {
        completed,
        filled,
        lambda_max: pr.lambda_max,
        perron: pr.clone(),
        sweeps,
        lambda_history: history,
    })
}

fn eval_fill(a: &mut [f64], n: usize, i: usize, j: usize, t: f64, warm: &mut Vec<f64>) -> Result<f64> {
    let x = t.exp();
    a[(i - 1) * n + (j - 1)] = x;
    a[(j - 1) * n + (i - 1)] = 1.0 / x;
    lambda_warm(a, n, warm)
}

/// Minimizes the eigenvalue over the single fill at (i, j); returns the
/// optimal log-value. The eigenvalue is convex in the log of the fill, so
/// bracket-and-shrink cannot miss the minimum.
fn golden_coordinate(
    a: &mut [f64],
    n: usize,
    i: usize,
    j: usize,
    warm: &mut Vec<f64>,
) -> Result<f64> {
    let t0 = a[(i - 1) * n + (j - 1)].ln();
    let mut lo = t0 - 1.0;
    let mut hi = t0 + 1.0;
    let mut f_lo = eval_fill(a, n, i, j, lo, warm)?;
    let mut f_hi = eval_fill(a, n, i, j, hi, warm)?;
    let mut f_inner = eval_fill(a, n, i, j, t0, warm)?;
    // Widen until both ends sit above some interior value; convexity then
    // pins the minimum inside [lo, hi].
    for _ in 0..200 {
        if f_lo >= f_inner && f_hi >= f_inner {
            break;
        }
        let width = hi - lo;
        if f_lo < f_inner {
            f_inner = f_lo;
            lo -= width;
            f_lo = eval_fill(a, n, i, j, lo, warm)?;
        } else {
            f_inner = f_hi;
            hi += width;
            f_hi = eval_fill(a, n, i, j, hi, warm)?;
        }
    }
    // Golden-section shrink on [lo, hi].
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = eval_fill(a, n, i, j, x1, warm)?;
    let mut f2 = eval_fill(a, n, i, j, x2, warm)?;
    while hi - lo > 1e-11 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = eval_fill(a, n, i, j, x1, warm)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = eval_fill(a, n, i, j, x2, warm)?;
        }
    }
    let best = 0.5 * (lo + hi);
    eval_fill(a, n, i, j, best, warm)?;
    Ok(best)
}

/// Weights of the eigenvalue-minimizing completion; complete input goes
/// straight to the eigenpair.
pub fn em_weights(pcm: &GeneralPcm) -> Result<Weights> {
    if pcm.is_complete() {
        let dense = pcm.to_dense()?;
        return Ok(perron(&dense, pcm.n())?.weights);
    }
    Ok(em_complete(pcm, 1e-12)?.perron.weights)
}

/// Consistency ratio `(lambda_max - n) / excess` of a complete matrix, where
/// `excess` is the mean dominant-eigenvalue surplus of random matrices of the
/// same size (see [`estimate_random_index`]). Zero exactly on consistent
/// matrices. The conventional acceptability cutoff CR < 0.1 is a reporting
/// convention, never enforced here.
pub fn cr_index(pcm: &GeneralPcm, excess: f64) -> Result<f64> {
    if !(excess > 0.0) {
        return Err(Error::NonPositiveExcess { excess });
    }
    let n = pcm.n();
    let dense = pcm.to_dense()?;
    let pr = perron(&dense, n)?;
    Ok((pr.lambda_max - n as f64) / excess)
}

/// The 17-value comparison scale used for random matrices:
/// 1/9, 1/8, ..., 1/2, 1, 2, ..., 9.
pub const SAATY_SCALE: [f64; 17] = [
    1.0 / 9.0,
    1.0 / 8.0,
    1.0 / 7.0,
    1.0 / 6.0,
    1.0 / 5.0,
    1.0 / 4.0,
    1.0 / 3.0,
    1.0 / 2.0,
    1.0,
    2.0,
    3.0,
    4.0,
    5.0,
    6.0,
    7.0,
    8.0,
    9.0,
];

/// Mean dominant eigenvalue of `samples` random reciprocal matrices whose
/// upper-triangle entries are drawn uniformly from [`SAATY_SCALE`].
///
/// Sampling uses ChaCha8 seeded with `seed`: the same (n, samples, seed)
/// always reproduces the same estimate. The mean is at least `n`, with the
/// excess over `n` being the denominator for [`cr_index`].
pub fn estimate_random_index(n: usize, samples: usize, seed: u64) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidTask {
            msg: format!("random index needs n >= 3, got {n}"),
        });
    }
    if samples == 0 {
        return Err(Error::InvalidTask { msg: "need at least one sample".into() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = vec![1.0f64; n * n];
    let mut total = 0.0;
    for _ in 0..samples {
        for i in 0..n {
            for j in i + 1..n {
                let v = SAATY_SCALE[rng.gen_range(0..SAATY_SCALE.len())];
                a[i * n + j] = v;
                a[j * n + i] = 1.0 / v;
            }
        }
        total += perron(&a, n)?.lambda_max;
    }
    Ok(total / samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DagPattern;
    use crate::pcm::realize;

    fn consistent_3x3() -> GeneralPcm {
        let w = [0.5, 1.0 / 3.0, 1.0 / 6.0];
        let mut a = GeneralPcm::new(3).unwrap();
        for i in 1..=3usize {
            for j in i + 1..=3usize {
                a.set_f64(i, j, w[i - 1] / w[j - 1]).unwrap();
            }
        }
        a
    }

    #[test]
    fn perron_on_consistent_matrix() {
        let a = consistent_3x3().to_dense().unwrap();
        let pr = perron(&a, 3).unwrap();
        assert!((pr.lambda_max - 3.0).abs() < 1e-12);
        for (got, want) in pr.weights.as_slice().iter().zip([0.5, 1.0 / 3.0, 1.0 / 6.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(pr.residual <= 1e-12 * pr.lambda_max);
    }

    #[test]
    fn perron_two_by_two() {
        for a12 in [2.0, 5.0, 9.0] {
            let a = vec![1.0, a12, 1.0 / a12, 1.0];
            let pr = perron(&a, 2).unwrap();
            assert!((pr.lambda_max - 2.0).abs() < 1e-12);
            assert!((pr.weights.get(1) - a12 / (1.0 + a12)).abs() < 1e-12);
            assert!((pr.weights.get(2) - 1.0 / (1.0 + a12)).abs() < 1e-12);
        }
    }

    #[test]
    fn perron_rejects_non_positive() {
        assert!(perron(&[1.0, 0.0, 2.0, 1.0], 2).is_err());
        assert!(perron(&[1.0, -1.0, -1.0, 1.0], 2).is_err());
    }

    #[test]
    fn completion_of_consistent_pattern_fills_consistently() {
        // Entries from w = (1/2, 1/3, 1/6) with the (1,3) comparison removed.
        let mut a = consistent_3x3();
        let mut b = GeneralPcm::new(3).unwrap();
        for (i, j) in [(1, 2), (2, 3)] {
            b.set(i, j, a.entry(i, j).unwrap()).unwrap();
        }
        std::mem::swap(&mut a, &mut b);
        let done = em_complete(&a, 1e-12).unwrap();
        assert_eq!(done.filled.len(), 1);
        let ((i, j), x) = done.filled[0];
        assert_eq!((i, j), (1, 3));
        assert!((x - 3.0).abs() < 1e-8, "fill = {x}");
        assert!((done.lambda_max - 3.0).abs() < 1e-10);
    }

    #[test]
    fn completion_matches_golden_section_oracle_on_one_missing_pair() {
        // Inconsistent known entries, one missing pair: the sweep result must
        // match an independent 1-D minimization of the eigenvalue.
        let mut pcm = GeneralPcm::new(4).unwrap();
        pcm.set_f64(1, 2, 3.0).unwrap();
        pcm.set_f64(1, 3, 2.0).unwrap();
        pcm.set_f64(2, 3, 4.0).unwrap();
        pcm.set_f64(2, 4, 5.0).unwrap();
        pcm.set_f64(3, 4, 7.0).unwrap();
        let done = em_complete(&pcm, 1e-12).unwrap();

        // Brute-force oracle: sample the 1-D eigenvalue curve, then refine.
        let eval = |x: f64| -> f64 {
            let mut a = pcm.clone();
            a.set_f64(1, 4, x).unwrap();
            perron(&a.to_dense().unwrap(), 4).unwrap().lambda_max
        };
        let mut best_t = 0.0;
        let mut best = f64::INFINITY;
        let mut t: f64 = -6.0;
        while t <= 6.0 {
            let lam = eval(t.exp());
            if lam < best {
                best = lam;
                best_t = t;
            }
            t += 0.01;
        }
        let (mut lo, mut hi): (f64, f64) = (best_t - 0.02, best_t + 0.02);
        for _ in 0..60 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if eval(m1.exp()) < eval(m2.exp()) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let oracle_x = ((lo + hi) / 2.0).exp();
        let oracle_lambda = eval(oracle_x);
        assert!(
            (done.lambda_max - oracle_lambda).abs() <= 1e-8,
            "lambda {} vs oracle {}",
            done.lambda_max,
            oracle_lambda
        );
        assert!(
            (done.filled[0].1 / oracle_x - 1.0).abs() <= 1e-6,
            "fill {} vs oracle {}",
            done.filled[0].1,
            oracle_x
        );
    }

    #[test]
    fn lambda_history_is_monotone() {
        let p = DagPattern::new(5, &[(1, 2), (2, 3), (3, 4), (4, 5), (1, 5), (1, 4)]).unwrap();
        let a = realize(&p, 3.0).unwrap();
        let done = em_complete(&a, 1e-12).unwrap();
        for pair in done.lambda_history.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-13, "history not monotone: {:?}", pair);
        }
        assert!(done.lambda_max >= 5.0 - 1e-12);
    }

    #[test]
    fn random_index_is_deterministic_and_bounded() {
        let a = estimate_random_index(3, 200, 42).unwrap();
        let b = estimate_random_index(3, 200, 42).unwrap();
        assert_eq!(a, b);
        assert!(a >= 3.0);
        let c = estimate_random_index(3, 200, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn random_index_single_consistent_sample_is_exact() {
        // Some seed draws a consistent matrix (for instance all ones); find
        // one and pin the eigenvalue it yields.
        let seed = (0..)
            .find(|&s| (estimate_random_index(3, 1, s).unwrap() - 3.0).abs() < 1e-12)
            .unwrap();
        let est = estimate_random_index(3, 1, seed).unwrap();
        assert!((est - 3.0).abs() < 1e-12);
    }

    #[test]
    fn cr_index_zero_iff_consistent() {
        let consistent = consistent_3x3();
        let cr = cr_index(&consistent, 0.5).unwrap();
        assert!(cr.abs() < 1e-12);

        let mut bad = GeneralPcm::new(3).unwrap();
        bad.set_f64(1, 2, 2.0).unwrap();
        bad.set_f64(2, 3, 2.0).unwrap();
        bad.set_f64(1, 3, 8.0).unwrap();
        let cr = cr_index(&bad, 0.5).unwrap();
        assert!(cr > 0.0);

        assert!(cr_index(&bad, 0.0).is_err());
        let mut incomplete = GeneralPcm::new(3).unwrap();
        incomplete.set_f64(1, 2, 2.0).unwrap();
        assert!(matches!(cr_index(&incomplete, 0.5), Err(Error::IncompleteMatrix)));
    }

    #[test]
    fn em_weights_requires_connectivity() {
        let p = DagPattern::new(4, &[(1, 2)]).unwrap();
        let a = realize(&p, 2.0).unwrap();
        assert!(matches!(em_weights(&a), Err(Error::NotConnected)));
    }
}
