use nalgebra::{Complex, DMatrix};
use num_traits::{One, Signed, Zero};

use super::{is_psd, tensor, BipartiteOperator, Matrix};
use crate::error::{Error, Result};
use crate::scalar::{four_squares, rational_sqrt, Rational};

/// One product term `weight · (a ⊗ b)` of a separable POVM element.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableTerm {
    pub weight: Rational,
    pub a: Matrix,
    pub b: Matrix,
}

/// Local Kraus operators `(A, B)` contributing `A†A ⊗ B†B`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausPair {
    pub a_op: Matrix,
    pub b_op: Matrix,
}

#[derive(Clone, Debug)]
pub struct FloatKrausPair {
    pub a_op: DMatrix<Complex<f64>>,
    pub b_op: DMatrix<Complex<f64>>,
}

#[derive(Clone, Debug)]
pub enum KrausDecomposition {
    Exact(Vec<KrausPair>),
    /// Used only when some factor has no rational square-root decomposition.
    Float(Vec<FloatKrausPair>),
}

impl KrausDecomposition {
    pub fn is_exact(&self) -> bool {
        matches!(self, KrausDecomposition::Exact(_))
    }

    pub fn len(&self) -> usize {
        match self {
            KrausDecomposition::Exact(v) => v.len(),
            KrausDecomposition::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `Σ A†A ⊗ B†B` in exact arithmetic, if exact.
    pub fn reconstruct(&self, dim: usize) -> Option<BipartiteOperator> {
        let KrausDecomposition::Exact(pairs) = self else {
            return None;
        };
        let mut acc = BipartiteOperator::zeros(dim);
        for p in pairs {
            let a = p.a_op.adjoint().mul(&p.a_op).ok()?;
            let b = p.b_op.adjoint().mul(&p.b_op).ok()?;
            acc = acc.add(&tensor(&a, &b).ok()?).ok()?;
        }
        Some(acc)
    }

    pub fn reconstruct_float(&self) -> DMatrix<Complex<f64>> {
        let pairs: Vec<(DMatrix<Complex<f64>>, DMatrix<Complex<f64>>)> = match self {
            KrausDecomposition::Exact(v) => v.iter().map(|p| (p.a_op.to_float(), p.b_op.to_float())).collect(),
            KrausDecomposition::Float(v) => v.iter().map(|p| (p.a_op.clone(), p.b_op.clone())).collect(),
        };
        let n = pairs.first().map_or(0, |(a, b)| a.nrows() * b.nrows());
        let mut acc = DMatrix::zeros(n, n);
        for (a, b) in pairs {
            let aa = a.adjoint() * &a;
            let bb = b.adjoint() * &b;
            acc += aa.kronecker(&bb);
        }
        acc
    }
}

/// Builds local Kraus operators for `Σ weight·(a ⊗ b)`.
///
/// Each factor `X` is split as `X = Σ_k A_k†A_k` exactly when `X` is diagonal
/// or satisfies `X² = λX` (rank one, scaled projectors); irrational square
/// roots are avoided by writing positive rationals as sums of four rational
/// squares. Anything else falls back to a floating-point eigendecomposition.
pub fn kraus_from_separable_form(terms: &[SeparableTerm]) -> Result<KrausDecomposition> {
    let mut exact = Vec::new();
    let mut all_exact = true;
    let mut float_terms = Vec::new();
    for term in terms {
        if term.weight.is_negative() {
            return Err(Error::NotPsd);
        }
        if term.a.size() != term.b.size() {
            return Err(Error::DimensionMismatch {
                expected: term.a.size(),
                got: term.b.size(),
            });
        }
        if !is_psd(&term.a)? || !is_psd(&term.b)? {
            return Err(Error::NotPsd);
        }
        if term.weight.is_zero() {
            continue;
        }
        let weighted = term.a.scale(&term.weight);
        float_terms.push((weighted.clone(), term.b.clone()));
        if !all_exact {
            continue;
        }
        match (exact_roots(&weighted), exact_roots(&term.b)) {
            (Some(alice), Some(bob)) => {
                for a_op in &alice {
                    for b_op in &bob {
                        exact.push(KrausPair {
                            a_op: a_op.clone(),
                            b_op: b_op.clone(),
                        });
                    }
                }
            }
            _ => all_exact = false,
        }
    }
    if all_exact {
        return Ok(KrausDecomposition::Exact(exact));
    }
    let mut pairs = Vec::new();
    for (a, b) in float_terms {
        let ra = float_root(&a);
        let rb = float_root(&b);
        pairs.push(FloatKrausPair { a_op: ra, b_op: rb });
    }
    Ok(KrausDecomposition::Float(pairs))
}

/// Operators `A_k` with `Σ A_k†A_k = x`, in exact arithmetic.
fn exact_roots(x: &Matrix) -> Option<Vec<Matrix>> {
    if x.is_zero() {
        return Some(Vec::new());
    }
    if x.is_diagonal() {
        let diag = x.real_diagonal();
        if let Some(roots) = diag.iter().map(rational_sqrt).collect::<Option<Vec<_>>>() {
            return Some(vec![Matrix::diagonal(&roots)]);
        }
        let splits: Vec<Vec<Rational>> = diag.iter().map(four_squares).collect::<Option<_>>()?;
        let terms = splits.iter().map(Vec::len).max().unwrap_or(0);
        return Some(
            (0..terms)
                .map(|k| {
                    let entries: Vec<Rational> = splits
                        .iter()
                        .map(|s| s.get(k).cloned().unwrap_or_else(Rational::zero))
                        .collect();
                    Matrix::diagonal(&entries)
                })
                .collect(),
        );
    }
    // x² = λx  ⇒  x = Σ_k (s_k x)† (s_k x) with Σ s_k² = 1/λ.
    let sq = x.mul(x).ok()?;
    let (r, c, v) = x.nonzero_entries().next()?;
    let lambda = sq.get(r, c) * &v.inv()?;
    if !lambda.is_real() || !lambda.re.is_positive() || sq != x.scale(&lambda.re) {
        return None;
    }
    let inv = Rational::one() / &lambda.re;
    Some(four_squares(&inv)?.iter().map(|s| x.scale(s)).collect())
}

fn float_root(x: &Matrix) -> DMatrix<Complex<f64>> {
    let m = x.to_float();
    let n = m.nrows();
    let eig = m.symmetric_eigen();
    let sqrt_diag = DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Complex::new(eig.eigenvalues[r].max(0.0).sqrt(), 0.0)
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    sqrt_diag * eig.eigenvectors.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    fn term(weight: Rational, a: Matrix, b: Matrix) -> SeparableTerm {
        SeparableTerm { weight, a, b }
    }

    fn expected(terms: &[SeparableTerm]) -> BipartiteOperator {
        let d = terms[0].a.size();
        terms.iter().fold(BipartiteOperator::zeros(d), |acc, t| {
            acc.add(&tensor(&t.a.scale(&t.weight), &t.b).unwrap()).unwrap()
        })
    }

    #[test]
    fn projector_is_its_own_root() {
        let terms = [term(int(1), Matrix::basis_projector(2, 0), Matrix::identity(2))];
        let k = kraus_from_separable_form(&terms).unwrap();
        let KrausDecomposition::Exact(pairs) = &k else { panic!("expected exact") };
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].a_op, Matrix::basis_projector(2, 0));
        assert_eq!(pairs[0].b_op, Matrix::identity(2));
        assert_eq!(k.reconstruct(2).unwrap(), expected(&terms));
    }

    #[test]
    fn diagonal_square_root() {
        let terms = [term(int(1), Matrix::diagonal(&[int(4), int(1)]), Matrix::identity(2))];
        let KrausDecomposition::Exact(pairs) = kraus_from_separable_form(&terms).unwrap() else {
            panic!("expected exact")
        };
        assert_eq!(pairs[0].a_op, Matrix::diagonal(&[int(2), int(1)]));
    }

    #[test]
    fn irrational_roots_stay_exact() {
        let plus = Matrix::from_real_rows(&[vec![ratio(1, 2), ratio(1, 2)], vec![ratio(1, 2), ratio(1, 2)]]).unwrap();
        let terms = [
            term(ratio(1, 3), Matrix::diagonal(&[ratio(2, 7), int(1)]), plus.clone()),
            term(ratio(5, 6), plus.clone(), Matrix::diagonal(&[int(0), ratio(3, 5)])),
        ];
        let k = kraus_from_separable_form(&terms).unwrap();
        assert!(k.is_exact());
        assert_eq!(k.reconstruct(2).unwrap(), expected(&terms));
    }

    #[test]
    fn isotropic_style_element() {
        // Σ_i |i⟩⟨i| ⊗ |i⟩⟨i| in d = 2.
        let terms: Vec<_> = (0..2)
            .map(|i| term(int(1), Matrix::basis_projector(2, i), Matrix::basis_projector(2, i)))
            .collect();
        let KrausDecomposition::Exact(pairs) = kraus_from_separable_form(&terms).unwrap() else {
            panic!("expected exact")
        };
        assert_eq!(pairs.len(), 2);
        for (i, p) in pairs.iter().enumerate() {
            assert_eq!(p.a_op, Matrix::basis_projector(2, i));
            assert_eq!(p.b_op, Matrix::basis_projector(2, i));
        }
    }

    #[test]
    fn float_fallback_for_generic_factor() {
        let x = Matrix::from_real_rows(&[vec![int(2), int(1)], vec![int(1), int(1)]]).unwrap();
        let terms = [term(int(1), x, Matrix::identity(2))];
        let k = kraus_from_separable_form(&terms).unwrap();
        assert!(!k.is_exact());
        let want = expected(&terms).matrix().to_float();
        let got = k.reconstruct_float();
        assert!((got - want).norm() < 1e-9);
    }

    #[test]
    fn non_psd_factor_rejected() {
        let terms = [term(int(1), Matrix::diagonal(&[int(1), int(-1)]), Matrix::identity(2))];
        assert_eq!(kraus_from_separable_form(&terms).unwrap_err(), Error::NotPsd);
    }
}
