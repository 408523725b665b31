//! Dense linear solves: exact rational and floating point, both with partial
//! pivoting. Systems here are small (at most a few dozen unknowns), so plain
//! Gaussian elimination is the right tool.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Solves `a x = rhs` in exact rational arithmetic. Pivoting is by largest
/// absolute value. Returns `None` when the matrix is singular.
pub fn solve_rational(mut a: Vec<Vec<BigRational>>, mut rhs: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n) && rhs.len() == n);
    for col in 0..n {
        let pivot_row = (col..n).max_by(|&r, &s| a[r][col].abs().cmp(&a[s][col].abs()))?;
        if a[pivot_row][col].is_zero() {
            return None;
        }
        a.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        for row in col + 1..n {
            if a[row][col].is_zero() {
                continue;
            }
            let factor = &a[row][col] / &a[col][col];
            for k in col..n {
                let delta = &factor * &a[col][k];
                a[row][k] = &a[row][k] - delta;
            }
            let delta = &factor * &rhs[col];
            rhs[row] = &rhs[row] - delta;
        }
    }
    let mut x = vec![BigRational::zero(); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row].clone();
        for k in row + 1..n {
            acc -= &a[row][k] * &x[k];
        }
        x[row] = acc / &a[row][row];
    }
    Some(x)
}

/// Floating-point twin of [`solve_rational`].
pub fn solve_f64(mut a: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n) && rhs.len() == n);
    for col in 0..n {
        let pivot_row = (col..n).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[pivot_row][col] == 0.0 {
            return None;
        }
        a.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        for row in col + 1..n {
            if a[row][col] == 0.0 {
                continue;
            }
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn rational_solve_small_system() {
        // x + y = 3, x - y = 1 -> (2, 1)
        let a = vec![vec![rat(1, 1), rat(1, 1)], vec![rat(1, 1), rat(-1, 1)]];
        let rhs = vec![rat(3, 1), rat(1, 1)];
        let x = solve_rational(a, rhs).unwrap();
        assert_eq!(x, vec![rat(2, 1), rat(1, 1)]);
    }

    #[test]
    fn rational_solve_detects_singular() {
        let a = vec![vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(4, 1)]];
        let rhs = vec![BigRational::one(), BigRational::one()];
        assert!(solve_rational(a, rhs).is_none());
    }

    #[test]
    fn float_solve_matches_rational() {
        let a = vec![
            vec![4.0, -1.0, 0.0],
            vec![-1.0, 4.0, -1.0],
            vec![0.0, -1.0, 4.0],
        ];
        let rhs = vec![1.0, 2.0, 3.0];
        let x = solve_f64(a.clone(), rhs.clone()).unwrap();
        let ar: Vec<Vec<BigRational>> = a
            .iter()
            .map(|row| row.iter().map(|&v| BigRational::from_float(v).unwrap()).collect())
            .collect();
        let rr: Vec<BigRational> = rhs.iter().map(|&v| BigRational::from_float(v).unwrap()).collect();
        let xr = solve_rational(ar, rr).unwrap();
        use num_traits::ToPrimitive;
        for (f, r) in x.iter().zip(xr.iter()) {
            assert!((f - r.to_f64().unwrap()).abs() < 1e-12);
        }
    }
}
