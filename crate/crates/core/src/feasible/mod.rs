//! The feasible-POVM polytope (positivity, PPT and completeness in
//! coefficient space) and exact linear programming over it.

mod lp;

pub use lp::{
    lp_solve, simplex_standard, FarkasCertificate, LinearProgram, LpOutcome, LpSolution, Sense, StandardOutcome,
};

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::scalar::Rational;
use crate::symmetry::{check_kind, pt_coefficient_map, CoeffVector, SymmetryKind};

/// An invariant POVM: one coefficient vector per outcome.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymPovm {
    pub kind: SymmetryKind,
    pub elements: Vec<CoeffVector>,
}

impl SymPovm {
    pub fn new(kind: SymmetryKind, elements: Vec<CoeffVector>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::NoOutcomes);
        }
        for e in &elements {
            check_kind(kind, e.kind)?;
        }
        Ok(Self { kind, elements })
    }

    /// Builds a POVM from raw coefficient rows.
    pub fn from_rows(kind: SymmetryKind, rows: Vec<Vec<Rational>>) -> Result<Self> {
        let elements = rows
            .into_iter()
            .map(|r| CoeffVector::new(kind, r))
            .collect::<Result<Vec<_>>>()?;
        Self::new(kind, elements)
    }

    /// The single-outcome "do nothing" measurement.
    pub fn identity(kind: SymmetryKind) -> Self {
        Self {
            kind,
            elements: vec![CoeffVector::ones(kind)],
        }
    }

    pub fn n_outcomes(&self) -> usize {
        self.elements.len()
    }

    /// Number of outcomes whose element is not the zero operator.
    pub fn nonzero_outcomes(&self) -> usize {
        self.elements.iter().filter(|e| !e.is_zero()).count()
    }

    /// Component indices where the elements fail to sum to one.
    pub fn completeness_defects(&self) -> Vec<usize> {
        (0..self.kind.n_coeffs())
            .filter(|&i| {
                let s: Rational = self.elements.iter().map(|e| e.coeffs[i].clone()).sum();
                !s.is_one()
            })
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.completeness_defects().is_empty()
    }

    /// Same POVM with zero elements removed.
    pub fn strip_zero(&self) -> Self {
        let elements: Vec<_> = self.elements.iter().filter(|e| !e.is_zero()).cloned().collect();
        if elements.is_empty() {
            return self.clone();
        }
        Self {
            kind: self.kind,
            elements,
        }
    }

    /// Pads with zero outcomes up to `n` outcomes.
    pub fn padded(&self, n: usize) -> Self {
        let mut elements = self.elements.clone();
        while elements.len() < n {
            elements.push(CoeffVector::zeros(self.kind));
        }
        Self {
            kind: self.kind,
            elements,
        }
    }

    /// Outcomes sorted lexicographically by coefficients.
    pub fn canonical(&self) -> Self {
        let mut elements = self.elements.clone();
        elements.sort();
        Self {
            kind: self.kind,
            elements,
        }
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            kind: self.kind,
            elements: perm.iter().map(|&i| self.elements[i].clone()).collect(),
        }
    }

    /// Flattened coefficients, outcome-major.
    pub fn flatten(&self) -> Vec<Rational> {
        self.elements.iter().flat_map(|e| e.coeffs.iter().cloned()).collect()
    }

    /// `Σ w·other` helper: `self + k·other`.
    pub fn add_scaled(&self, k: &Rational, other: &Self) -> Result<Self> {
        check_kind(self.kind, other.kind)?;
        if self.n_outcomes() != other.n_outcomes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_outcomes(),
                got: other.n_outcomes(),
            });
        }
        let elements = self
            .elements
            .iter()
            .zip(&other.elements)
            .map(|(a, b)| a.add(&b.scale(k)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            kind: self.kind,
            elements,
        })
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self {
            kind: self.kind,
            elements: self.elements.iter().map(|e| e.scale(k)).collect(),
        }
    }
}

/// Identifies one constraint of the feasible polytope. Elements are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConstraintLabel {
    /// `coeffs[component] >= 0` for one element.
    Positivity { element: usize, component: String },
    /// `(PT · coeffs)[component] >= 0` for one element.
    PartialTranspose { element: usize, component: String },
    /// Elements sum to one on `component`.
    Completeness { component: String },
    Named { name: String },
}

impl fmt::Display for ConstraintLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintLabel::Positivity { element, component } => {
                write!(f, "M{}[{component}] >= 0", element + 1)
            }
            ConstraintLabel::PartialTranspose { element, component } => {
                write!(f, "PT(M{})[{component}] >= 0", element + 1)
            }
            ConstraintLabel::Completeness { component } => write!(f, "sum M[{component}] = 1"),
            ConstraintLabel::Named { name } => f.write_str(name),
        }
    }
}

/// `row · x >= bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Halfspace {
    pub row: Vec<Rational>,
    pub bound: Rational,
    pub label: ConstraintLabel,
}

impl Halfspace {
    pub fn slack(&self, x: &[Rational]) -> Rational {
        dot(&self.row, x) - &self.bound
    }
}

/// `row · x = value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equality {
    pub row: Vec<Rational>,
    pub value: Rational,
    pub label: ConstraintLabel,
}

/// How polytope coordinates map back to POVM elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub kind: SymmetryKind,
    pub outcomes: usize,
    /// Two-outcome polytope written in the first element only (`M2 = 1 - M1`).
    pub eliminated: bool,
}

impl Layout {
    pub fn point_to_povm(&self, x: &[Rational]) -> Result<SymPovm> {
        let n = self.kind.n_coeffs();
        if self.eliminated {
            let first = CoeffVector::new(self.kind, x.to_vec())?;
            let second = first.complement();
            return SymPovm::new(self.kind, vec![first, second]);
        }
        SymPovm::from_rows(self.kind, x.chunks(n).map(|c| c.to_vec()).collect())
    }

    pub fn povm_to_point(&self, p: &SymPovm) -> Result<Vec<Rational>> {
        check_kind(self.kind, p.kind)?;
        if p.n_outcomes() != self.outcomes {
            return Err(Error::DimensionMismatch {
                expected: self.outcomes,
                got: p.n_outcomes(),
            });
        }
        if self.eliminated {
            return Ok(p.elements[0].coeffs.clone());
        }
        Ok(p.flatten())
    }
}

/// H-representation `{x : A x >= b, E x = f}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polytope {
    pub ambient_dim: usize,
    pub inequalities: Vec<Halfspace>,
    pub equalities: Vec<Equality>,
    pub layout: Option<Layout>,
}

impl Polytope {
    pub fn new(ambient_dim: usize, inequalities: Vec<Halfspace>, equalities: Vec<Equality>) -> Result<Self> {
        for r in inequalities.iter().map(|h| &h.row).chain(equalities.iter().map(|e| &e.row)) {
            if r.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    got: r.len(),
                });
            }
        }
        Ok(Self {
            ambient_dim,
            inequalities,
            equalities,
            layout: None,
        })
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.inequalities.iter().all(|h| !h.slack(x).is_negative())
            && self.equalities.iter().all(|e| dot(&e.row, x) == e.value)
    }

    /// Indices of inequalities holding with equality at `x`.
    pub fn active_set(&self, x: &[Rational]) -> Vec<usize> {
        (0..self.inequalities.len())
            .filter(|&i| self.inequalities[i].slack(x).is_zero())
            .collect()
    }

    /// Axis-aligned box `lo <= x_i <= hi`.
    pub fn cube(dim: usize, lo: Rational, hi: Rational) -> Self {
        let mut ineqs = Vec::new();
        for i in 0..dim {
            let mut up = vec![Rational::zero(); dim];
            up[i] = Rational::one();
            let down: Vec<Rational> = up.iter().map(|x| -x).collect();
            ineqs.push(Halfspace {
                row: up,
                bound: lo.clone(),
                label: ConstraintLabel::Named {
                    name: format!("x{} >= lower", i + 1),
                },
            });
            ineqs.push(Halfspace {
                row: down,
                bound: -hi.clone(),
                label: ConstraintLabel::Named {
                    name: format!("x{} <= upper", i + 1),
                },
            });
        }
        Self {
            ambient_dim: dim,
            inequalities: ineqs,
            equalities: Vec::new(),
            layout: None,
        }
    }
}

/// Feasible polytope with the two-outcome elimination applied for `N = 2`.
pub fn build_feasible_polytope(kind: SymmetryKind, outcomes: usize) -> Result<Polytope> {
    build_feasible_polytope_with(kind, outcomes, outcomes == 2)
}

/// Feasible polytope in `n·N` coordinates (or `n` when `eliminate` and `N = 2`).
pub fn build_feasible_polytope_with(kind: SymmetryKind, outcomes: usize, eliminate: bool) -> Result<Polytope> {
    if outcomes == 0 {
        return Err(Error::NoOutcomes);
    }
    let n = kind.n_coeffs();
    let map = pt_coefficient_map(kind)?;
    let labels = kind.family().component_labels();
    let pt_labels = map.target().family().component_labels();
    let r = map.matrix();
    let mut ineqs = Vec::new();
    if eliminate && outcomes == 2 {
        for (element, sign) in [(0usize, Rational::one()), (1usize, -Rational::one())] {
            let bound = if element == 0 { Rational::zero() } else { -Rational::one() };
            for c in 0..n {
                let mut row = vec![Rational::zero(); n];
                row[c] = sign.clone();
                ineqs.push(Halfspace {
                    row,
                    bound: bound.clone(),
                    label: ConstraintLabel::Positivity {
                        element,
                        component: labels[c].to_string(),
                    },
                });
            }
            for c in 0..n {
                ineqs.push(Halfspace {
                    row: r[c].iter().map(|x| x * &sign).collect(),
                    bound: bound.clone(),
                    label: ConstraintLabel::PartialTranspose {
                        element,
                        component: pt_labels[c].to_string(),
                    },
                });
            }
        }
        return Ok(Polytope {
            ambient_dim: n,
            inequalities: ineqs,
            equalities: Vec::new(),
            layout: Some(Layout {
                kind,
                outcomes,
                eliminated: true,
            }),
        });
    }
    let dim = n * outcomes;
    for element in 0..outcomes {
        for c in 0..n {
            let mut row = vec![Rational::zero(); dim];
            row[element * n + c] = Rational::one();
            ineqs.push(Halfspace {
                row,
                bound: Rational::zero(),
                label: ConstraintLabel::Positivity {
                    element,
                    component: labels[c].to_string(),
                },
            });
        }
        for c in 0..n {
            let mut row = vec![Rational::zero(); dim];
            row[element * n..(element + 1) * n].clone_from_slice(&r[c]);
            ineqs.push(Halfspace {
                row,
                bound: Rational::zero(),
                label: ConstraintLabel::PartialTranspose {
                    element,
                    component: pt_labels[c].to_string(),
                },
            });
        }
    }
    let eqs = (0..n)
        .map(|c| {
            let mut row = vec![Rational::zero(); dim];
            for element in 0..outcomes {
                row[element * n + c] = Rational::one();
            }
            Equality {
                row,
                value: Rational::one(),
                label: ConstraintLabel::Completeness {
                    component: labels[c].to_string(),
                },
            }
        })
        .collect();
    Ok(Polytope {
        ambient_dim: dim,
        inequalities: ineqs,
        equalities: eqs,
        layout: Some(Layout {
            kind,
            outcomes,
            eliminated: false,
        }),
    })
}

/// One failed constraint and the amount by which it fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub label: ConstraintLabel,
    /// Negative slack for inequalities, `sum - 1` for completeness.
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

/// Checks positivity, PPT and completeness of every element.
pub fn is_feasible(p: &SymPovm) -> Result<FeasibilityReport> {
    let map = pt_coefficient_map(p.kind)?;
    let labels = p.kind.family().component_labels();
    let pt_labels = map.target().family().component_labels();
    let mut violations = Vec::new();
    for (element, e) in p.elements.iter().enumerate() {
        for (c, v) in e.coeffs.iter().enumerate() {
            if v.is_negative() {
                violations.push(Violation {
                    label: ConstraintLabel::Positivity {
                        element,
                        component: labels[c].to_string(),
                    },
                    value: v.clone(),
                });
            }
        }
        for (c, v) in map.apply(e)?.coeffs.iter().enumerate() {
            if v.is_negative() {
                violations.push(Violation {
                    label: ConstraintLabel::PartialTranspose {
                        element,
                        component: pt_labels[c].to_string(),
                    },
                    value: v.clone(),
                });
            }
        }
    }
    for c in 0..p.kind.n_coeffs() {
        let s: Rational = p.elements.iter().map(|e| e.coeffs[c].clone()).sum();
        if !s.is_one() {
            violations.push(Violation {
                label: ConstraintLabel::Completeness {
                    component: labels[c].to_string(),
                },
                value: s - Rational::one(),
            });
        }
    }
    Ok(FeasibilityReport {
        feasible: violations.is_empty(),
        violations,
    })
}

/// All distinct outcome relabellings of each POVM, padded to `outcomes`.
pub fn permutation_closure(povms: &[SymPovm], outcomes: usize) -> Vec<SymPovm> {
    let mut seen = BTreeSet::new();
    for p in povms {
        if p.nonzero_outcomes() > outcomes {
            continue;
        }
        let base = if p.n_outcomes() > outcomes {
            p.strip_zero().padded(outcomes)
        } else {
            p.padded(outcomes)
        };
        for perm in permutations(outcomes) {
            seen.insert(base.permuted(&perm));
        }
    }
    seen.into_iter().collect()
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

/// Result of writing a POVM as a convex combination of candidates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decomposition {
    /// `(candidate index, weight)` pairs with positive weights summing to one.
    Found(Vec<(usize, Rational)>),
    /// Hyperplane `normal · x + offset` that is `<= 0` on every candidate and
    /// `> 0` on the target.
    Separated { normal: Vec<Rational>, offset: Rational },
}

/// Convex weights over `candidates` reproducing `p`, or a separating hyperplane.
pub fn convex_decompose(p: &SymPovm, candidates: &[SymPovm]) -> Result<Decomposition> {
    for c in candidates {
        check_kind(p.kind, c.kind)?;
        if c.n_outcomes() != p.n_outcomes() {
            return Err(Error::DimensionMismatch {
                expected: p.n_outcomes(),
                got: c.n_outcomes(),
            });
        }
    }
    let target = p.flatten();
    let points: Vec<Vec<Rational>> = candidates.iter().map(SymPovm::flatten).collect();
    let mut a: Vec<Vec<Rational>> = (0..target.len())
        .map(|r| points.iter().map(|v| v[r].clone()).collect())
        .collect();
    a.push(vec![Rational::one(); points.len()]);
    let mut b = target.clone();
    b.push(Rational::one());
    let cost = vec![Rational::zero(); points.len()];
    match simplex_standard(&a, &b, &cost)? {
        StandardOutcome::Optimal { z, .. } => Ok(Decomposition::Found(
            z.into_iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .collect(),
        )),
        StandardOutcome::Infeasible { y } => {
            let offset = y[target.len()].clone();
            let normal = y[..target.len()].to_vec();
            Ok(Decomposition::Separated { normal, offset })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};
    use crate::symmetry::Family;

    fn iso(d: usize) -> SymmetryKind {
        SymmetryKind::isotropic(d).unwrap()
    }

    #[test]
    fn oo_two_outcome_has_twelve_halfspaces() {
        let p = build_feasible_polytope(SymmetryKind::oo(3).unwrap(), 2).unwrap();
        assert_eq!(p.ambient_dim, 3);
        assert_eq!(p.inequalities.len(), 12);
        assert!(p.equalities.is_empty());
        let full = build_feasible_polytope(SymmetryKind::oo(3).unwrap(), 3).unwrap();
        assert_eq!(full.ambient_dim, 9);
        assert_eq!(full.inequalities.len(), 18);
        assert_eq!(full.equalities.len(), 3);
    }

    #[test]
    fn isotropic_boundary_element_is_feasible() {
        for d in 2..=6 {
            let k = iso(d);
            let e = CoeffVector::new(k, vec![int(1), ratio(1, d as i64 + 1)]).unwrap();
            let p = SymPovm::new(k, vec![e.clone(), e.complement()]).unwrap();
            assert!(is_feasible(&p).unwrap().feasible);
            let poly = build_feasible_polytope(k, 2).unwrap();
            let x = poly.layout.unwrap().povm_to_point(&p).unwrap();
            assert!(poly.contains(&x));
            let tight = poly.active_set(&x);
            assert!(tight
                .iter()
                .any(|&i| matches!(poly.inequalities[i].label, ConstraintLabel::PartialTranspose { element: 0, .. })));
        }
    }

    #[test]
    fn isotropic_beyond_boundary_is_infeasible() {
        for d in 2..=6 {
            let k = iso(d);
            let e = CoeffVector::new(k, vec![int(1), ratio(1, d as i64 + 2)]).unwrap();
            let report = is_feasible(&SymPovm::new(k, vec![e.clone(), e.complement()]).unwrap()).unwrap();
            assert!(!report.feasible);
            assert_eq!(report.violations.len(), 1);
            assert_eq!(
                report.violations[0].label,
                ConstraintLabel::PartialTranspose {
                    element: 0,
                    component: "P_A".into()
                }
            );
        }
    }

    #[test]
    fn bell_violation_is_on_first_element() {
        let k = SymmetryKind::bell();
        let p = SymPovm::from_rows(
            k,
            vec![vec![int(1), int(0), int(0), int(0)], vec![int(0), int(1), int(1), int(1)]],
        )
        .unwrap();
        let report = is_feasible(&p).unwrap();
        assert!(!report.feasible);
        assert!(report.violations.iter().all(|v| matches!(
            v.label,
            ConstraintLabel::PartialTranspose { element: 0, .. }
        )));
    }

    #[test]
    fn bell_equal_weight_povm_is_feasible() {
        let k = SymmetryKind::bell();
        let h = ratio(1, 2);
        let z = int(0);
        let rows = vec![
            vec![h.clone(), h.clone(), z.clone(), z.clone()],
            vec![h.clone(), z.clone(), h.clone(), z.clone()],
            vec![z.clone(), h.clone(), z.clone(), h.clone()],
            vec![z.clone(), z.clone(), h.clone(), h.clone()],
        ];
        let p = SymPovm::from_rows(k, rows).unwrap();
        assert!(is_feasible(&p).unwrap().feasible);
        let poly = build_feasible_polytope(k, 4).unwrap();
        assert_eq!(poly.inequalities.len(), 32);
        assert!(poly.contains(&p.flatten()));
    }

    #[test]
    fn identity_is_feasible_everywhere() {
        for family in Family::ALL {
            let d = if family == Family::Bell { 2 } else { 3 };
            let k = SymmetryKind::new(family, d).unwrap();
            assert!(is_feasible(&SymPovm::identity(k)).unwrap().feasible);
        }
    }

    #[test]
    fn permutations_and_closure() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(1), vec![vec![0]]);
        let k = iso(2);
        let p = SymPovm::identity(k);
        let closure = permutation_closure(&[p], 3);
        assert_eq!(closure.len(), 3);
    }

    #[test]
    fn decompose_vertex_and_separate_outside_point() {
        let k = iso(2);
        let a = SymPovm::from_rows(k, vec![vec![int(1), ratio(1, 3)], vec![int(0), ratio(2, 3)]]).unwrap();
        let b = SymPovm::from_rows(k, vec![vec![int(0), ratio(2, 3)], vec![int(1), ratio(1, 3)]]).unwrap();
        let c = SymPovm::identity(k).padded(2);
        let cands = vec![a.clone(), b, c];
        assert_eq!(
            convex_decompose(&a, &cands).unwrap(),
            Decomposition::Found(vec![(0, int(1))])
        );
        let bad = SymPovm::from_rows(k, vec![vec![int(1), ratio(1, 4)], vec![int(0), ratio(3, 4)]]).unwrap();
        let Decomposition::Separated { normal, offset } = convex_decompose(&bad, &cands).unwrap() else {
            panic!("expected separation")
        };
        for cand in &cands {
            assert!(!(dot(&normal, &cand.flatten()) + &offset).is_positive());
        }
        assert!((dot(&normal, &bad.flatten()) + &offset).is_positive());
    }
}
