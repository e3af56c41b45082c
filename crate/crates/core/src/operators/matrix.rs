use std::ops::{Add, Sub};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Dense square matrix over the Gaussian rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    n: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Scalar::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                data.push(f(r, c));
            }
        }
        Self { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { n, data })
    }

    pub fn from_real_rows(rows: &[Vec<Rational>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().cloned().map(Scalar::real).collect())
                .collect(),
        )
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, Scalar::real(e.clone()));
        }
        m
    }

    /// `|v⟩⟨v|` (unnormalised).
    pub fn outer(v: &[Scalar]) -> Self {
        Self::from_fn(v.len(), |r, c| &v[r] * &v[c].conj())
    }

    /// Computational basis projector `|i⟩⟨i|` in dimension `n`.
    pub fn basis_projector(n: usize, i: usize) -> Self {
        let mut m = Self::zeros(n);
        m.set(i, i, Scalar::one());
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.n + c] = v;
    }

    pub fn rows(&self) -> Vec<Vec<Scalar>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|x| x.scale(k)).collect(),
        }
    }

    pub fn scale_complex(&self, k: &Scalar) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |r, c| self.get(c, r).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |r, c| self.get(c, r).clone())
    }

    pub fn trace(&self) -> Scalar {
        let mut t = Scalar::zero();
        for i in 0..self.n {
            t += self.get(i, i);
        }
        t
    }

    pub fn is_hermitian(&self) -> bool {
        self.first_non_hermitian().is_none()
    }

    pub(crate) fn first_non_hermitian(&self) -> Option<(usize, usize)> {
        for r in 0..self.n {
            for c in r..self.n {
                if *self.get(r, c) != self.get(c, r).conj() {
                    return Some((r, c));
                }
            }
        }
        None
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|r| (0..self.n).all(|c| r == c || self.get(r, c).is_zero()))
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same(other)?;
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let b = other.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let p = a * b;
                    out.data[r * n + c] += &p;
                }
            }
        }
        Ok(out)
    }

    /// `tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Matrix) -> Result<Scalar> {
        self.check_same(other)?;
        let mut t = Scalar::zero();
        for r in 0..self.n {
            for c in 0..self.n {
                let a = self.get(r, c);
                if a.is_zero() {
                    continue;
                }
                let b = other.get(c, r);
                if !b.is_zero() {
                    t += &(a * b);
                }
            }
        }
        Ok(t)
    }

    /// Kronecker product, row index `(i, j) -> i * other.n + j`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (n, m) = (self.n, other.n);
        let mut out = Matrix::zeros(n * m);
        for r1 in 0..n {
            for c1 in 0..n {
                let a = self.get(r1, c1);
                if a.is_zero() {
                    continue;
                }
                for r2 in 0..m {
                    for c2 in 0..m {
                        let b = other.get(r2, c2);
                        if b.is_zero() {
                            continue;
                        }
                        out.set(r1 * m + r2, c1 * m + c2, a * b);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        Ok((0..self.n)
            .map(|r| {
                let mut acc = Scalar::zero();
                for (c, x) in v.iter().enumerate() {
                    let a = self.get(r, c);
                    if !a.is_zero() && !x.is_zero() {
                        acc += &(a * x);
                    }
                }
                acc
            })
            .collect())
    }

    /// Real parts of a Hermitian diagonal, if the matrix is diagonal.
    pub fn real_diagonal(&self) -> Vec<Rational> {
        (0..self.n).map(|i| self.get(i, i).re.clone()).collect()
    }

    pub fn to_float(&self) -> nalgebra::DMatrix<nalgebra::Complex<f64>> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |r, c| self.get(r, c).to_complex())
    }

    fn check_same(&self, other: &Matrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(())
    }

    pub(crate) fn nonzero_entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        let n = self.n;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(move |(k, v)| (k / n, k % n, v))
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "matrix size mismatch");
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "matrix size mismatch");
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}
