//! Weight vectors: positive floats normalized to sum 1, and exact rational
//! log-coefficients for ordinal matrices.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Strictly positive weights with `sum = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    w: Vec<f64>,
}

impl Weights {
    /// Normalizes `raw` to sum 1. Every entry must be finite and positive.
    pub fn new(raw: Vec<f64>) -> Result<Self> {
        if raw.len() < 2 {
            return Err(Error::TooFewAlternatives { n: raw.len() });
        }
        for (idx, &v) in raw.iter().enumerate() {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::NonPositiveEntry { i: idx + 1, j: idx + 1 });
            }
        }
        let total: f64 = raw.iter().sum();
        let w = raw.into_iter().map(|v| v / total).collect();
        Ok(Weights { w })
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// Weight of alternative `i` (1-indexed).
    pub fn get(&self, i: usize) -> f64 {
        self.w[i - 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    /// Elementwise reciprocal, renormalized. Reverses every strict order.
    pub fn reversed(&self) -> Weights {
        Weights::new(self.w.iter().map(|v| 1.0 / v).collect()).expect("reciprocals stay positive")
    }
}

/// Exact log-weights of an ordinal matrix: the weight of alternative `i` is
/// proportional to `b^{c_i}` with rational coefficients summing to 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogWeights {
    coeffs: Vec<BigRational>,
}

impl LogWeights {
    pub fn new(coeffs: Vec<BigRational>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::TooFewAlternatives { n: coeffs.len() });
        }
        let sum: BigRational = coeffs.iter().sum();
        debug_assert!(sum.is_zero(), "log-weight coefficients must sum to 0 exactly");
        if !sum.is_zero() {
            return Err(Error::SingularSystem);
        }
        Ok(LogWeights { coeffs })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of alternative `i` (1-indexed).
    pub fn coeff(&self, i: usize) -> &BigRational {
        &self.coeffs[i - 1]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Exact difference `c_i - c_j` (1-indexed).
    pub fn gap(&self, i: usize, j: usize) -> BigRational {
        self.coeff(i) - self.coeff(j)
    }

    /// Positive weights proportional to `b^{c_i}`, normalized to sum 1.
    pub fn to_weights(&self, b: f64) -> Result<Weights> {
        if !(b > 1.0) {
            return Err(Error::InvalidIntensity { b });
        }
        let log_b = b.ln();
        let exps: Vec<f64> = self
            .coeffs
            .iter()
            .map(|c| c.to_f64().expect("coefficient representable") * log_b)
            .collect();
        let peak = exps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Weights::new(exps.iter().map(|e| (e - peak).exp()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn weights_normalize_and_validate() {
        let w = Weights::new(vec![2.0, 1.0, 1.0]).unwrap();
        assert!((w.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((w.get(1) - 0.5).abs() < 1e-12);
        assert!(Weights::new(vec![1.0, 0.0]).is_err());
        assert!(Weights::new(vec![1.0, -2.0]).is_err());
        assert!(Weights::new(vec![1.0]).is_err());
    }

    #[test]
    fn log_weights_exponentiate() {
        let lw = LogWeights::new(vec![rat(1, 2), rat(-1, 2)]).unwrap();
        let w = lw.to_weights(4.0).unwrap();
        // 4^{1/2} : 4^{-1/2} = 2 : 1/2 -> (0.8, 0.2)
        assert!((w.get(1) - 0.8).abs() < 1e-12);
        assert!((w.get(2) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn reversal_flips_order() {
        let w = Weights::new(vec![3.0, 1.0]).unwrap();
        let r = w.reversed();
        assert!(w.get(1) > w.get(2));
        assert!(r.get(1) < r.get(2));
    }
}
