//! Small dense complex linear algebra used by the Newton and condition-number
//! machinery. Matrices here are at most a handful of rows, so explicit
//! inverses are cheap and give an exact 1-norm condition estimate.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::poly::{C64, ZERO};

/// Stacked matrices whose 1-norm condition estimate exceeds this are singular.
pub const SINGULAR_CONDITION: f64 = 1e14;

pub fn one_norm(m: &DMatrix<C64>) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|c| c.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Inverse via partial-pivoting LU, rejecting numerically singular input.
pub fn checked_inverse(m: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let norm = one_norm(m);
    if !norm.is_finite() {
        return Err(Error::NonFinite("matrix entry".into()));
    }
    let inv = m
        .clone()
        .lu()
        .try_inverse()
        .ok_or(Error::Singular(f64::INFINITY))?;
    let cond = norm * one_norm(&inv);
    if !cond.is_finite() || cond > SINGULAR_CONDITION {
        return Err(Error::Singular(cond));
    }
    Ok(inv)
}

/// Largest singular value (operator 2-norm).
pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian product `<u, v> = sum u_j conj(v_j)`.
pub fn hermitian(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).fold(ZERO, |acc, (a, b)| acc + a * b.conj())
}

pub fn mat_vec(m: &DMatrix<C64>, v: &[C64]) -> Vec<C64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).fold(ZERO, |acc, j| acc + m[(i, j)] * v[j]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_norm_of_diagonal() {
        let m =
            DMatrix::from_row_slice(2, 2, &[C64::new(3.0, 0.0), ZERO, ZERO, C64::new(0.0, -5.0)]);
        assert!((spectral_norm(&m) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let one = C64::new(1.0, 0.0);
        let m = DMatrix::from_row_slice(2, 2, &[one, one, one, one]);
        assert!(matches!(checked_inverse(&m), Err(Error::Singular(_))));
        let m = DMatrix::from_row_slice(2, 2, &[one, one, one, one * (1.0 + 1e-16)]);
        assert!(matches!(checked_inverse(&m), Err(Error::Singular(_))));
    }

    #[test]
    fn inverse_round_trip() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 1.0),
                C64::new(2.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(-1.0, 0.5),
            ],
        );
        let inv = checked_inverse(&m).unwrap();
        let id = &m * &inv;
        for i in 0..2 {
            for j in 0..2 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - C64::new(e, 0.0)).norm() < 1e-14);
            }
        }
    }
}
