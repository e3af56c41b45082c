//! Basic vectors (generators of the cone of feasible elements) and structural
//! checks on vertex sets.

use std::fmt;

use num_traits::{Signed, Zero};

use super::{catalog_extrema, VertexSet};
use crate::error::{Error, Result};
use crate::feasible::{simplex_standard, StandardOutcome};
use crate::linalg::rank;
use crate::scalar::Rational;
use crate::symmetry::{pt_coefficient_map, CoeffVector, Family, SymmetryKind};

/// Elements generating every feasible element by nonnegative combination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicVectorSet {
    pub kind: SymmetryKind,
    pub vectors: Vec<CoeffVector>,
}

/// The distinct elements of the two-outcome extrema.
///
/// For Bell these are the six vectors with two ones, the zero vector and the
/// all-ones vector.
pub fn basic_vectors(kind: SymmetryKind) -> Result<BasicVectorSet> {
    let mut vectors: Vec<CoeffVector> = catalog_extrema(kind, 2)?
        .vertices
        .into_iter()
        .flat_map(|p| p.elements)
        .collect();
    vectors.sort();
    vectors.dedup();
    Ok(BasicVectorSet { kind, vectors })
}

/// Nonnegative weights `w` with `Σ w_i·basic_i = v`.
pub fn decompose_into_basic(v: &CoeffVector) -> Result<Vec<(usize, Rational)>> {
    let map = pt_coefficient_map(v.kind)?;
    if !v.is_nonnegative() || !map.apply(v)?.is_nonnegative() {
        return Err(Error::Infeasible("element is not positive and PPT".into()));
    }
    let basic = basic_vectors(v.kind)?;
    let n = v.kind.n_coeffs();
    let a: Vec<Vec<Rational>> = (0..n)
        .map(|r| basic.vectors.iter().map(|b| b.coeffs[r].clone()).collect())
        .collect();
    let cost = vec![Rational::zero(); basic.vectors.len()];
    match simplex_standard(&a, &v.coeffs, &cost)? {
        StandardOutcome::Optimal { z, .. } => Ok(z.into_iter().enumerate().filter(|(_, w)| !w.is_zero()).collect()),
        StandardOutcome::Infeasible { .. } => Err(Error::Infeasible("element outside the cone of basic vectors".into())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StructureKind {
    /// Nonzero elements of an extremal POVM are linearly independent.
    LinearIndependence,
    /// Bell: with `K` nonzero outcomes at least `K - 1` columns are tight.
    TightColumns,
    /// With the maximal number of nonzero outcomes, each element is a multiple
    /// of a two-outcome extremal element.
    TwoOutcomeProportional,
    /// OO, three or more outcomes: no complementary pair of basic vectors and
    /// no identity vector is used.
    NoComplementaryPair,
}

impl fmt::Display for StructureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StructureKind::LinearIndependence => "linear-independence",
            StructureKind::TightColumns => "tight-columns",
            StructureKind::TwoOutcomeProportional => "two-outcome-proportional",
            StructureKind::NoComplementaryPair => "no-complementary-pair",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureCheck {
    /// Index into `VertexSet::classes`.
    pub class: usize,
    pub property: StructureKind,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureReport {
    pub checks: Vec<StructureCheck>,
}

impl StructureReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&StructureCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

fn is_tight(c: &CoeffVector) -> bool {
    let max = c.coeffs.iter().max().cloned().unwrap_or_else(Rational::zero);
    let total: Rational = c.coeffs.iter().sum();
    &total - &max == max
}

/// Index of the basic vector that `e` is a positive multiple of.
fn proportional_to(e: &CoeffVector, basic: &BasicVectorSet) -> Option<usize> {
    let i = e.coeffs.iter().position(|c| !c.is_zero())?;
    basic.vectors.iter().position(|b| {
        if b.coeffs[i].is_zero() {
            return false;
        }
        let s = &e.coeffs[i] / &b.coeffs[i];
        s.is_positive() && b.scale(&s) == *e
    })
}

/// Runs the structural checks applicable to each vertex class.
pub fn check_vertex_structure(set: &VertexSet) -> Result<StructureReport> {
    let basic = basic_vectors(set.kind)?;
    let n = set.kind.n_coeffs();
    let ones = CoeffVector::ones(set.kind);
    let mut checks = Vec::new();
    for (class, vc) in set.classes.iter().enumerate() {
        let nonzero: Vec<&CoeffVector> = vc.representative.elements.iter().filter(|e| !e.is_zero()).collect();
        let k = nonzero.len();
        let rows: Vec<Vec<Rational>> = nonzero.iter().map(|e| e.coeffs.clone()).collect();
        let r = rank(&rows, n);
        checks.push(StructureCheck {
            class,
            property: StructureKind::LinearIndependence,
            passed: r == k,
            detail: format!("{k} nonzero elements, rank {r}"),
        });
        if set.kind.family() == Family::Bell {
            let tight = nonzero.iter().filter(|e| is_tight(e)).count();
            checks.push(StructureCheck {
                class,
                property: StructureKind::TightColumns,
                passed: tight + 1 >= k,
                detail: format!("{tight} of {k} columns tight"),
            });
        }
        let matches: Vec<Option<usize>> = nonzero.iter().map(|e| proportional_to(e, &basic)).collect();
        if k == n {
            checks.push(StructureCheck {
                class,
                property: StructureKind::TwoOutcomeProportional,
                passed: matches.iter().all(Option::is_some),
                detail: format!("basic vector matches {matches:?}"),
            });
        }
        if set.kind.family() == Family::OO && k >= 3 {
            let used: Vec<&CoeffVector> = matches.iter().flatten().map(|&i| &basic.vectors[i]).collect();
            let all_matched = used.len() == k;
            let uses_identity = used.iter().any(|b| **b == ones);
            let has_pair = used
                .iter()
                .enumerate()
                .any(|(i, a)| used[i + 1..].iter().any(|b| a.add(b).map(|s| s == ones).unwrap_or(false)));
            checks.push(StructureCheck {
                class,
                property: StructureKind::NoComplementaryPair,
                passed: all_matched && !uses_identity && !has_pair,
                detail: format!("matched {all_matched}, identity {uses_identity}, complementary pair {has_pair}"),
            });
        }
    }
    Ok(StructureReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::enumerate_feasible;
    use crate::feasible::SymPovm;
    use crate::scalar::{int, ratio};

    fn bell(c: [Rational; 4]) -> CoeffVector {
        CoeffVector::new(SymmetryKind::bell(), c.to_vec()).unwrap()
    }

    fn reconstruct(v: &CoeffVector, w: &[(usize, Rational)]) -> CoeffVector {
        let basic = basic_vectors(v.kind).unwrap();
        let mut acc = CoeffVector::zeros(v.kind);
        for (i, x) in w {
            assert!(!x.is_negative());
            acc = acc.add(&basic.vectors[*i].scale(x)).unwrap();
        }
        acc
    }

    #[test]
    fn bell_basic_vectors() {
        let b = basic_vectors(SymmetryKind::bell()).unwrap();
        assert_eq!(b.vectors.len(), 8);
        assert!(b.vectors.contains(&CoeffVector::zeros(SymmetryKind::bell())));
        assert!(b.vectors.contains(&CoeffVector::ones(SymmetryKind::bell())));
    }

    #[test]
    fn bell_decompositions() {
        let v = bell([int(1), ratio(1, 2), ratio(1, 2), int(0)]);
        let w = decompose_into_basic(&v).unwrap();
        assert_eq!(reconstruct(&v, &w), v);
        let ones = CoeffVector::ones(SymmetryKind::bell());
        let w = decompose_into_basic(&ones).unwrap();
        assert_eq!(reconstruct(&ones, &w), ones);
        let tight = bell([int(1), int(1), int(0), int(0)]);
        let w = decompose_into_basic(&tight).unwrap();
        let basic = basic_vectors(SymmetryKind::bell()).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(basic.vectors[w[0].0], tight);
        assert!(decompose_into_basic(&bell([int(1), int(0), int(0), int(0)])).is_err());
    }

    #[test]
    fn oo_decompositions() {
        let kind = SymmetryKind::oo(4).unwrap();
        let v = CoeffVector::new(kind, vec![ratio(1, 2), ratio(1, 3), ratio(1, 3)]).unwrap();
        let w = decompose_into_basic(&v).unwrap();
        assert_eq!(reconstruct(&v, &w), v);
    }

    #[test]
    fn structure_checks_on_enumerated_sets() {
        for (kind, n) in [(SymmetryKind::bell(), 3), (SymmetryKind::oo(3).unwrap(), 3)] {
            let vs = enumerate_feasible(kind, n).unwrap();
            let report = check_vertex_structure(&vs).unwrap();
            assert!(report.all_passed(), "{:?}", report.failures());
        }
    }

    #[test]
    fn dependent_columns_fail_independence() {
        let k = SymmetryKind::bell();
        let h = ratio(1, 2);
        let z = int(0);
        let p = SymPovm::from_rows(
            k,
            vec![
                vec![h.clone(), h.clone(), z.clone(), z.clone()],
                vec![h.clone(), z.clone(), h.clone(), z.clone()],
                vec![z.clone(), h.clone(), z.clone(), h.clone()],
                vec![z.clone(), z.clone(), h.clone(), h.clone()],
            ],
        )
        .unwrap();
        let set = VertexSet::from_povms(k, 4, vec![p]).unwrap();
        let report = check_vertex_structure(&set).unwrap();
        assert!(report
            .failures()
            .iter()
            .any(|c| c.property == StructureKind::LinearIndependence));
    }
}
