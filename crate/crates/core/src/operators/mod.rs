//! Bipartite operators on `C^d ⊗ C^d` in exact Gaussian-rational arithmetic.
//!
//! The composite basis is `|i⟩⊗|j⟩ ↦ i·d + j` (Alice-major), and the partial
//! transpose always acts on Bob's factor.

mod kraus;
mod matrix;
mod psd;

pub use kraus::{kraus_from_separable_form, FloatKrausPair, KrausDecomposition, KrausPair, SeparableTerm};
pub use matrix::Matrix;
pub use psd::{is_psd, is_psd_float, is_psd_with, Arithmetic, DEFAULT_EPS};

use crate::error::{Error, Result};
use crate::scalar::{ratio, Rational, Scalar};

/// A `d²×d²` operator on a two-party system with local dimension `d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BipartiteOperator {
    dim: usize,
    matrix: Matrix,
}

impl BipartiteOperator {
    pub fn new(dim: usize, matrix: Matrix) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        if matrix.size() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: matrix.size(),
            });
        }
        Ok(Self { dim, matrix })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            matrix: Matrix::zeros(dim * dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: Matrix::identity(dim * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    /// Entry `⟨i j| M |k l⟩`.
    pub fn entry(&self, (i, j): (usize, usize), (k, l): (usize, usize)) -> &Scalar {
        self.matrix.get(i * self.dim + j, k * self.dim + l)
    }

    pub fn trace(&self) -> Scalar {
        self.matrix.trace()
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.scale(k),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            dim: self.dim,
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            dim: self.dim,
            matrix: &self.matrix - &other.matrix,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            dim: self.dim,
            matrix: self.matrix.mul(&other.matrix)?,
        })
    }

    pub fn trace_product(&self, other: &Self) -> Result<Scalar> {
        self.check_dim(other)?;
        self.matrix.trace_product(&other.matrix)
    }

    pub fn is_hermitian(&self) -> bool {
        self.matrix.is_hermitian()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }
}

/// `a ⊗ b` for two `d×d` factors.
pub fn tensor(a: &Matrix, b: &Matrix) -> Result<BipartiteOperator> {
    if a.size() != b.size() {
        return Err(Error::DimensionMismatch {
            expected: a.size(),
            got: b.size(),
        });
    }
    BipartiteOperator::new(a.size(), a.kron(b))
}

/// Transposes Bob's factor: `⟨ij|M^Γ|kl⟩ = ⟨il|M|kj⟩`.
pub fn partial_transpose(m: &BipartiteOperator) -> BipartiteOperator {
    let d = m.dim;
    let mut out = Matrix::zeros(d * d);
    for (r, c, v) in m.matrix.nonzero_entries() {
        let (i, j) = (r / d, r % d);
        let (k, l) = (c / d, c % d);
        out.set(i * d + l, k * d + j, v.clone());
    }
    BipartiteOperator { dim: d, matrix: out }
}

/// `|+⟩⟨+|` with `|+⟩ = Σ_i |ii⟩/√d`.
pub fn maximally_entangled_projector(d: usize) -> Result<BipartiteOperator> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    let mut m = Matrix::zeros(d * d);
    let w = Scalar::real(ratio(1, d as i64));
    for i in 0..d {
        for j in 0..d {
            m.set(i * d + i, j * d + j, w.clone());
        }
    }
    BipartiteOperator::new(d, m)
}

/// Swap operator `F = Σ |ij⟩⟨ji|`.
pub fn swap_operator(d: usize) -> Result<BipartiteOperator> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    let mut m = Matrix::zeros(d * d);
    for i in 0..d {
        for j in 0..d {
            m.set(i * d + j, j * d + i, Scalar::one());
        }
    }
    BipartiteOperator::new(d, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn pauli_x() -> Matrix {
        Matrix::from_real_rows(&[vec![int(0), int(1)], vec![int(1), int(0)]]).unwrap()
    }

    #[test]
    fn tensor_identity_and_basis_projector() {
        let i2 = Matrix::identity(2);
        assert_eq!(tensor(&i2, &i2).unwrap(), BipartiteOperator::identity(2));
        let p = tensor(&Matrix::basis_projector(2, 0), &Matrix::basis_projector(2, 1)).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let expected = if (r, c) == (1, 1) { Scalar::one() } else { Scalar::zero() };
                assert_eq!(p.matrix().get(r, c), &expected);
            }
        }
        assert_eq!(*p.entry((0, 1), (0, 1)), Scalar::one());
    }

    #[test]
    fn sigma_x_tensor_maps_00_to_11() {
        let xx = tensor(&pauli_x(), &pauli_x()).unwrap();
        let ket00 = vec![Scalar::one(), Scalar::zero(), Scalar::zero(), Scalar::zero()];
        let out = xx.matrix().apply(&ket00).unwrap();
        assert_eq!(out, vec![Scalar::zero(), Scalar::zero(), Scalar::zero(), Scalar::one()]);
    }

    #[test]
    fn tensor_dimension_mismatch() {
        assert!(tensor(&Matrix::identity(2), &Matrix::identity(3)).is_err());
    }

    #[test]
    fn swap_partial_transpose_is_d_times_plus() {
        let f = swap_operator(2).unwrap();
        let plus = maximally_entangled_projector(2).unwrap();
        assert_eq!(partial_transpose(&f), plus.scale(&int(2)));
    }

    #[test]
    fn psi_plus_partial_transpose_in_bell_basis() {
        // Ψ+ = (|01⟩+|10⟩)/√2; its partial transpose is ½(Ψ+ + Ψ− + Φ+ − Φ−).
        let s = Scalar::real(ratio(1, 2));
        let mut psi_plus = Matrix::zeros(4);
        for (r, c) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            psi_plus.set(r, c, s.clone());
        }
        let pt = partial_transpose(&BipartiteOperator::new(2, psi_plus).unwrap());
        let mut expected = Matrix::zeros(4);
        // ½(Ψ+ + Ψ−) = ½(|01⟩⟨01| + |10⟩⟨10|), ½(Φ+ − Φ−) = ½(|00⟩⟨11| + |11⟩⟨00|).
        for (r, c) in [(1, 1), (2, 2), (0, 3), (3, 0)] {
            expected.set(r, c, s.clone());
        }
        assert_eq!(pt.matrix(), &expected);
    }

    #[test]
    fn trace_identities() {
        assert_eq!(maximally_entangled_projector(2).unwrap().trace(), Scalar::one());
        assert_eq!(swap_operator(2).unwrap().trace(), Scalar::from_int(2));
        let f3 = swap_operator(3).unwrap();
        assert_eq!(f3.mul(&f3).unwrap(), BipartiteOperator::identity(3));
        let f4 = swap_operator(4).unwrap();
        let p4 = maximally_entangled_projector(4).unwrap();
        assert_eq!(f4.mul(&p4).unwrap(), p4);
        assert!(maximally_entangled_projector(1).is_err());
        assert!(swap_operator(0).is_err());
    }
}
