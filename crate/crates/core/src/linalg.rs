//! Dense exact linear algebra over the rationals.

use num_traits::{One, Zero};

use crate::scalar::Rational;

pub type RMatrix = Vec<Vec<Rational>>;

/// Reduced row echelon form of `rows` (each of length `cols`).
/// Returns the reduced rows (zero rows removed) and their pivot columns.
pub fn rref(rows: &[Vec<Rational>], cols: usize) -> (RMatrix, Vec<usize>) {
    let mut m: RMatrix = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..m[i].len() {
                    let delta = &f * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[Vec<Rational>], cols: usize) -> usize {
    rref(rows, cols).1.len()
}

/// Basis of the right kernel `{x : rows·x = 0}`.
pub fn kernel(rows: &[Vec<Rational>], cols: usize) -> RMatrix {
    let (m, pivots) = rref(rows, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (row, &p) in m.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Affine solution set of `rows·x = rhs` as `x0 + span(kernel)`, or `None` if
/// the system is inconsistent.
pub fn affine_solution(rows: &[Vec<Rational>], rhs: &[Rational], cols: usize) -> Option<(Vec<Rational>, RMatrix)> {
    let augmented: RMatrix = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut a = r.clone();
            a.push(b.clone());
            a
        })
        .collect();
    let (m, pivots) = rref(&augmented, cols + 1);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x0 = vec![Rational::zero(); cols];
    for (row, &p) in m.iter().zip(&pivots) {
        x0[p] = row[cols].clone();
    }
    Some((x0, kernel(rows, cols)))
}

/// Solves the square system `a·x = b`; `None` when singular.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let (x0, k) = affine_solution(a, b, n)?;
    if !k.is_empty() {
        return None;
    }
    Some(x0)
}

pub fn inverse(a: &[Vec<Rational>]) -> Option<RMatrix> {
    let n = a.len();
    let augmented: RMatrix = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            row
        })
        .collect();
    let (m, pivots) = rref(&augmented, 2 * n);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn determinant(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        for i in c + 1..n {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[c][c];
                for j in c..n {
                    let delta = &f * &m[c][j];
                    m[i][j] -= delta;
                }
            }
        }
    }
    det
}

pub fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> RMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner)
                        .filter(|&k| !row[k].is_zero() && !b[k][j].is_zero())
                        .map(|k| &row[k] * &b[k][j])
                        .sum()
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    a.iter().map(|row| dot(row, v)).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

pub fn identity(n: usize) -> RMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect()
}

pub fn transpose(a: &[Vec<Rational>]) -> RMatrix {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}
