use num_traits::{One, Signed, Zero};

use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Rational;

pub const DEFAULT_EPS: f64 = 1e-9;

/// Arithmetic mode for decisions that may involve user-supplied irrational data.
#[derive(Clone, Copy, Debug, PartialEq)]
#[derive(Default)]
pub enum Arithmetic {
    #[default]
    Exact,
    Float { eps: f64 },
}


/// Exact PSD decision via symmetric-pivoted LDL†.
///
/// A zero diagonal entry of a PSD matrix forces its row to vanish, so the
/// elimination only ever pivots on strictly positive diagonals.
pub fn is_psd(m: &Matrix) -> Result<bool> {
    if let Some((row, col)) = m.first_non_hermitian() {
        return Err(Error::NotHermitian { row, col });
    }
    let mut a = m.rows();
    let mut live: Vec<usize> = (0..m.size()).collect();
    while !live.is_empty() {
        if live.iter().any(|&k| a[k][k].re.is_negative()) {
            return Ok(false);
        }
        let Some(pos) = live.iter().position(|&k| !a[k][k].re.is_zero()) else {
            let all_zero = live.iter().all(|&i| live.iter().all(|&j| a[i][j].is_zero()));
            return Ok(all_zero);
        };
        let k = live.remove(pos);
        let inv_pivot = Rational::one() / &a[k][k].re;
        for &i in &live {
            if a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].scale(&inv_pivot);
            for &j in &live {
                if a[k][j].is_zero() {
                    continue;
                }
                let delta = &f * &a[k][j];
                a[i][j] -= &delta;
            }
        }
    }
    Ok(true)
}

/// Floating-point PSD test: all eigenvalues `≥ -eps`.
pub fn is_psd_float(m: &nalgebra::DMatrix<nalgebra::Complex<f64>>, eps: f64) -> Result<bool> {
    let n = m.nrows();
    for r in 0..n {
        for c in r..n {
            if (m[(r, c)] - m[(c, r)].conj()).norm() > eps {
                return Err(Error::NotHermitian { row: r, col: c });
            }
        }
    }
    let eig = m.clone().symmetric_eigenvalues();
    Ok(eig.iter().all(|&e| e >= -eps))
}

pub fn is_psd_with(m: &Matrix, mode: Arithmetic) -> Result<bool> {
    match mode {
        Arithmetic::Exact => is_psd(m),
        Arithmetic::Float { eps } => is_psd_float(&m.to_float(), eps),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;
    use crate::operators::maximally_entangled_projector;
    use crate::scalar::{int, ratio};

    #[test]
    fn simple_cases() {
        assert!(is_psd(&Matrix::identity(4)).unwrap());
        let d = Matrix::diagonal(&[int(1), ratio(-1, 3), int(0), int(0)]);
        assert!(!is_psd(&d).unwrap());
        let plus = maximally_entangled_projector(3).unwrap();
        assert!(is_psd(plus.matrix()).unwrap());
    }

    #[test]
    fn zero_diagonal_with_offdiagonal_is_not_psd() {
        let m = Matrix::from_real_rows(&[vec![int(0), int(1)], vec![int(1), int(0)]]).unwrap();
        assert!(!is_psd(&m).unwrap());
        assert!(is_psd(&Matrix::zeros(3)).unwrap());
    }

    #[test]
    fn complex_hermitian() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2.
        let m = Matrix::from_rows(vec![
            vec![Scalar::one(), Scalar::i()],
            vec![-Scalar::i(), Scalar::one()],
        ])
        .unwrap();
        assert!(is_psd(&m).unwrap());
        let bad = Matrix::from_rows(vec![
            vec![Scalar::one(), Scalar::from_int(2)],
            vec![Scalar::from_int(2), Scalar::one()],
        ])
        .unwrap();
        assert!(!is_psd(&bad).unwrap());
        assert!(is_psd_float(&m.to_float(), DEFAULT_EPS).unwrap());
        assert!(!is_psd_with(&bad, Arithmetic::Float { eps: DEFAULT_EPS }).unwrap());
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = Matrix::from_real_rows(&[vec![int(1), int(1)], vec![int(0), int(1)]]).unwrap();
        assert!(matches!(is_psd(&m), Err(Error::NotHermitian { .. })));
    }
}
