//! Exhaustive search for a "naive" coefficient transformation: a nonnegative,
//! row-stochastic, invertible `L` with `R·L` nonnegative that carries the
//! stipulated product form `N = x X + y Y (+ z Z)` onto the feasible
//! coefficients.
//!
//! Two independent routes are reported. The matching route enumerates every
//! complement-preserving assignment of cube vertices to the two-outcome
//! extrema and tests the induced `L`. The unit-row route settles, by exact LP,
//! every placement of unit rows `e_j` among the rows of `L` and `R·L`.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::extremal::{basic_vectors, oo_two_outcome_elements};
use crate::feasible::{
    lp_solve, permutations, ConstraintLabel, Equality, FarkasCertificate, Halfspace, LinearProgram, LpOutcome, Polytope,
    Sense,
};
use crate::linalg::{determinant, identity, inverse, mat_mul, mat_vec, RMatrix};
use crate::scalar::{format_rational, Rational};
use crate::symmetry::{pt_coefficient_map, CoeffVector, Family, SymmetryKind};

/// Which of `L` and `R·L` a witness refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    L,
    RL,
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Factor::L => "L",
            Factor::RL => "RL",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    NegativeEntry {
        factor: Factor,
        row: usize,
        col: usize,
        value: Rational,
    },
    RowSum {
        factor: Factor,
        row: usize,
        sum: Rational,
    },
    Singular {
        determinant: Rational,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::NegativeEntry { factor, row, col, value } => {
                write!(f, "{factor}[{row}][{col}] = {}", format_rational(value))
            }
            Witness::RowSum { factor, row, sum } => write!(f, "row {row} of {factor} sums to {}", format_rational(sum)),
            Witness::Singular { determinant } => write!(f, "det L = {}", format_rational(determinant)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Requirement {
    pub passed: bool,
    pub witness: Option<Witness>,
}

impl Requirement {
    fn from_witness(witness: Option<Witness>) -> Self {
        Self {
            passed: witness.is_none(),
            witness,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LRequirementsReport {
    pub l_nonnegative: Requirement,
    pub l_rows_sum_one: Requirement,
    pub invertible: Requirement,
    pub rl_nonnegative: Requirement,
    pub rl_rows_sum_one: Requirement,
}

impl LRequirementsReport {
    pub fn passed(&self) -> bool {
        self.requirements().iter().all(|(_, r)| r.passed)
    }

    pub fn requirements(&self) -> [(&'static str, &Requirement); 5] {
        [
            ("L >= 0", &self.l_nonnegative),
            ("L rows sum to 1", &self.l_rows_sum_one),
            ("L invertible", &self.invertible),
            ("RL >= 0", &self.rl_nonnegative),
            ("RL rows sum to 1", &self.rl_rows_sum_one),
        ]
    }

    pub fn witnesses(&self) -> Vec<Witness> {
        self.requirements().iter().filter_map(|(_, r)| r.witness.clone()).collect()
    }
}

fn first_negative(m: &[Vec<Rational>], factor: Factor) -> Option<Witness> {
    m.iter().enumerate().find_map(|(row, r)| {
        r.iter().enumerate().find(|(_, v)| v.is_negative()).map(|(col, v)| Witness::NegativeEntry {
            factor,
            row,
            col,
            value: v.clone(),
        })
    })
}

fn first_bad_row_sum(m: &[Vec<Rational>], factor: Factor) -> Option<Witness> {
    m.iter().enumerate().find_map(|(row, r)| {
        let sum: Rational = r.iter().sum();
        (!sum.is_one()).then_some(Witness::RowSum { factor, row, sum })
    })
}

/// Checks a candidate `L` against the PT coefficient matrix `r`.
pub fn verify_l_requirements_with(l: &[Vec<Rational>], r: &[Vec<Rational>]) -> LRequirementsReport {
    let rl = mat_mul(r, l);
    let det = determinant(l);
    LRequirementsReport {
        l_nonnegative: Requirement::from_witness(first_negative(l, Factor::L)),
        l_rows_sum_one: Requirement::from_witness(first_bad_row_sum(l, Factor::L)),
        invertible: Requirement::from_witness(det.is_zero().then_some(Witness::Singular { determinant: det })),
        rl_nonnegative: Requirement::from_witness(first_negative(&rl, Factor::RL)),
        rl_rows_sum_one: Requirement::from_witness(first_bad_row_sum(&rl, Factor::RL)),
    }
}

/// Checks a candidate `L` for the OO family in local dimension `d`.
pub fn verify_l_requirements(l: &[Vec<Rational>], d: usize) -> Result<LRequirementsReport> {
    let map = pt_coefficient_map(SymmetryKind::oo(d)?)?;
    if l.len() != 3 || l.iter().any(|r| r.len() != 3) {
        return Err(Error::DimensionMismatch { expected: 3, got: l.len() });
    }
    Ok(verify_l_requirements_with(l, map.matrix()))
}

/// The stipulated form and the target polytope for one family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaiveTransformProblem {
    pub kind: SymmetryKind,
    /// PT coefficient matrix.
    pub r: RMatrix,
    /// Complementary pairs of two-outcome extrema other than `(0, 1)`.
    pub target_pairs: Vec<[(String, CoeffVector); 2]>,
}

impl NaiveTransformProblem {
    pub fn new(kind: SymmetryKind) -> Result<Self> {
        if kind.family() == Family::Bell {
            return Err(Error::KindMismatch {
                expected: "Isotropic, Werner or OO".into(),
                got: kind.family().to_string(),
            });
        }
        let r = pt_coefficient_map(kind)?.matrix().clone();
        let target_pairs = if kind.family() == Family::OO {
            let two = oo_two_outcome_elements(kind.dim())?;
            two[2..]
                .chunks(2)
                .map(|p| [(p[0].0.to_string(), p[0].1.clone()), (p[1].0.to_string(), p[1].1.clone())])
                .collect()
        } else {
            let zero = CoeffVector::zeros(kind);
            let ones = CoeffVector::ones(kind);
            let mut pairs = Vec::new();
            for v in basic_vectors(kind)?.vectors {
                let c = v.complement();
                if v != zero && v != ones && v < c {
                    pairs.push([(coeff_label(&v), v), (coeff_label(&c), c)]);
                }
            }
            pairs
        };
        Ok(Self { kind, r, target_pairs })
    }

    pub fn n(&self) -> usize {
        self.kind.n_coeffs()
    }

    /// `R·1 = 1` and `R² = I`.
    pub fn r_invariants_hold(&self) -> bool {
        let n = self.n();
        let ones = vec![Rational::one(); n];
        mat_vec(&self.r, &ones) == ones && mat_mul(&self.r, &self.r) == identity(n)
    }

    /// Complementary pairs of cube vertices other than `(0, 1)`, as bitmasks.
    fn cube_pairs(&self) -> Vec<(u32, u32)> {
        let full = (1u32 << self.n()) - 1;
        (1..full).filter(|&s| s < full ^ s).map(|s| (s, full ^ s)).collect()
    }
}

fn coeff_label(v: &CoeffVector) -> String {
    let parts: Vec<String> = v.coeffs.iter().map(format_rational).collect();
    format!("({})", parts.join(","))
}

fn mask_vector(mask: u32, n: usize) -> Vec<Rational> {
    (0..n)
        .map(|i| if mask >> i & 1 == 1 { Rational::one() } else { Rational::zero() })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CaseFailure {
    Requirement(Witness),
    /// `L·v` differs from the vertex the matching assigns to `v`.
    VertexImageMismatch {
        vertex: Vec<Rational>,
        expected: Vec<Rational>,
        got: Vec<Rational>,
    },
    /// Two unit rows were placed in the same row.
    ConflictingPlacement,
    /// Exact LP infeasibility with a verified Farkas certificate.
    LpInfeasible(FarkasCertificate),
}

impl fmt::Display for CaseFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vec = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>().join(",");
        match self {
            CaseFailure::Requirement(w) => write!(f, "{w}"),
            CaseFailure::VertexImageMismatch { vertex, expected, got } => {
                write!(f, "L({}) = ({}) but ({}) required", vec(vertex), vec(got), vec(expected))
            }
            CaseFailure::ConflictingPlacement => f.write_str("two unit rows share a row"),
            CaseFailure::LpInfeasible(_) => f.write_str("LP infeasible (Farkas certificate verified)"),
        }
    }
}

/// One complement-preserving assignment of cube vertices to extrema.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingCase {
    /// `(cube vertex, label of its image)` for every non-trivial vertex.
    pub assignment: Vec<(Vec<Rational>, String)>,
    pub l: RMatrix,
    pub failures: Vec<CaseFailure>,
}

impl MatchingCase {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// One placement of the unit rows `e_0, …, e_{n-1}` into rows of `L` or `R·L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitRowCase {
    /// `placements[j] = (factor, row)` holds `e_j`.
    pub placements: Vec<(Factor, usize)>,
    /// Feasible `L` when the LP has a solution.
    pub solution: Option<RMatrix>,
    pub failure: Option<CaseFailure>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Infeasible,
    Counterexample,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Infeasible => "infeasible",
            Verdict::Counterexample => "counterexample",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoGoCertificate {
    pub kind: SymmetryKind,
    pub r_invariants_hold: bool,
    pub matching_verdict: Verdict,
    pub unit_row_verdict: Verdict,
    pub matchings: Vec<MatchingCase>,
    pub unit_row_cases: Vec<UnitRowCase>,
}

impl NoGoCertificate {
    /// Overall verdict; infeasible only when both routes agree.
    pub fn verdict(&self) -> Verdict {
        if self.matching_verdict == Verdict::Infeasible && self.unit_row_verdict == Verdict::Infeasible {
            Verdict::Infeasible
        } else {
            Verdict::Counterexample
        }
    }

    pub fn routes_agree(&self) -> bool {
        self.matching_verdict == self.unit_row_verdict
    }

    /// `L` from every matching that passes all checks.
    pub fn admissible(&self) -> Vec<&RMatrix> {
        self.matchings.iter().filter(|m| m.passed()).map(|m| &m.l).collect()
    }
}

/// Route (i): every complement-preserving matching of cube vertices to extrema.
pub fn matching_search(problem: &NaiveTransformProblem) -> Vec<MatchingCase> {
    let n = problem.n();
    let cube = problem.cube_pairs();
    let targets = &problem.target_pairs;
    if cube.len() != targets.len() {
        return Vec::new();
    }
    let mut cases = Vec::new();
    for perm in permutations(cube.len()) {
        for flips in 0..1u32 << cube.len() {
            let mut assignment: Vec<(u32, &(String, CoeffVector))> = Vec::new();
            for (p, &(lo, hi)) in cube.iter().enumerate() {
                let pair = &targets[perm[p]];
                let f = (flips >> p & 1) as usize;
                assignment.push((lo, &pair[f]));
                assignment.push((hi, &pair[1 - f]));
            }
            assignment.sort_by_key(|(m, _)| *m);
            // Columns of L are the images of the unit vectors.
            let mut l = vec![vec![Rational::zero(); n]; n];
            for j in 0..n {
                let (_, (_, image)) = assignment.iter().find(|(m, _)| *m == 1 << j).expect("unit vertex assigned");
                for i in 0..n {
                    l[i][j] = image.coeffs[i].clone();
                }
            }
            let report = verify_l_requirements_with(&l, &problem.r);
            let mut failures: Vec<CaseFailure> = report.witnesses().into_iter().map(CaseFailure::Requirement).collect();
            for (mask, (_, image)) in &assignment {
                let vertex = mask_vector(*mask, n);
                let got = mat_vec(&l, &vertex);
                if got != image.coeffs {
                    failures.push(CaseFailure::VertexImageMismatch {
                        vertex,
                        expected: image.coeffs.clone(),
                        got,
                    });
                }
            }
            cases.push(MatchingCase {
                assignment: assignment
                    .into_iter()
                    .map(|(m, (label, _))| (mask_vector(m, n), label.clone()))
                    .collect(),
                l,
                failures,
            });
        }
    }
    cases
}

/// Route (ii): exact LP over `L` for every placement of the unit rows.
pub fn unit_row_search(problem: &NaiveTransformProblem) -> Result<Vec<UnitRowCase>> {
    let n = problem.n();
    let slots: Vec<(Factor, usize)> = [Factor::L, Factor::RL]
        .iter()
        .flat_map(|&f| (0..n).map(move |r| (f, r)))
        .collect();
    let total = slots.len().pow(n as u32);
    let mut cases = Vec::with_capacity(total);
    for code in 0..total {
        let placements: Vec<(Factor, usize)> = (0..n).map(|j| slots[code / slots.len().pow(j as u32) % slots.len()]).collect();
        let mut seen = placements.clone();
        seen.sort();
        seen.dedup();
        if seen.len() < n {
            cases.push(UnitRowCase {
                placements,
                solution: None,
                failure: Some(CaseFailure::ConflictingPlacement),
            });
            continue;
        }
        let poly = unit_row_polytope(problem, &placements)?;
        let lp = LinearProgram {
            polytope: poly.clone(),
            objective: vec![Rational::zero(); n * n],
            sense: Sense::Minimize,
        };
        let case = match lp_solve(&lp)? {
            LpOutcome::Optimal(sol) => UnitRowCase {
                placements,
                solution: Some(sol.point.chunks(n).map(<[Rational]>::to_vec).collect()),
                failure: None,
            },
            LpOutcome::Infeasible(cert) => {
                if !cert.verify(&poly) {
                    return Err(Error::Internal("Farkas certificate failed verification".into()));
                }
                UnitRowCase {
                    placements,
                    solution: None,
                    failure: Some(CaseFailure::LpInfeasible(cert)),
                }
            }
        };
        cases.push(case);
    }
    Ok(cases)
}

/// Variables `L[i][k]` at index `i·n + k`.
fn unit_row_polytope(problem: &NaiveTransformProblem, placements: &[(Factor, usize)]) -> Result<Polytope> {
    let n = problem.n();
    let var = |i: usize, k: usize| i * n + k;
    let named = |s: String| ConstraintLabel::Named { name: s };
    // Row i of R·L, column k, as a linear form in the variables.
    let rl_row = |i: usize, k: usize| {
        let mut row = vec![Rational::zero(); n * n];
        for m in 0..n {
            row[var(m, k)] = problem.r[i][m].clone();
        }
        row
    };
    let l_row = |i: usize, k: usize| {
        let mut row = vec![Rational::zero(); n * n];
        row[var(i, k)] = Rational::one();
        row
    };
    let mut ineqs = Vec::new();
    for i in 0..n {
        for k in 0..n {
            ineqs.push(Halfspace {
                row: l_row(i, k),
                bound: Rational::zero(),
                label: named(format!("L[{i}][{k}] >= 0")),
            });
            ineqs.push(Halfspace {
                row: rl_row(i, k),
                bound: Rational::zero(),
                label: named(format!("RL[{i}][{k}] >= 0")),
            });
        }
    }
    let mut eqs = Vec::new();
    for i in 0..n {
        let mut row = vec![Rational::zero(); n * n];
        for k in 0..n {
            row[var(i, k)] = Rational::one();
        }
        eqs.push(Equality {
            row,
            value: Rational::one(),
            label: named(format!("L row {i} sums to 1")),
        });
    }
    for (j, &(factor, i)) in placements.iter().enumerate() {
        for k in 0..n {
            let row = match factor {
                Factor::L => l_row(i, k),
                Factor::RL => rl_row(i, k),
            };
            let value = if k == j { Rational::one() } else { Rational::zero() };
            eqs.push(Equality {
                row,
                value,
                label: named(format!("{factor}[{i}][{k}] = e{j}[{k}]")),
            });
        }
    }
    Polytope::new(n * n, ineqs, eqs)
}

/// Runs both routes for an arbitrary supported family.
pub fn naive_transform_search_for(kind: SymmetryKind) -> Result<NoGoCertificate> {
    let problem = NaiveTransformProblem::new(kind)?;
    let matchings = matching_search(&problem);
    let unit_row_cases = unit_row_search(&problem)?;
    let verdict = |any_pass: bool| if any_pass { Verdict::Counterexample } else { Verdict::Infeasible };
    Ok(NoGoCertificate {
        kind,
        r_invariants_hold: problem.r_invariants_hold(),
        matching_verdict: verdict(matchings.iter().any(MatchingCase::passed)),
        unit_row_verdict: verdict(unit_row_cases.iter().any(|c| c.failure.is_none())),
        matchings,
        unit_row_cases,
    })
}

/// Runs both routes for the OO family in local dimension `d`.
pub fn naive_transform_search(d: usize) -> Result<NoGoCertificate> {
    naive_transform_search_for(SymmetryKind::oo(d)?)
}

/// Inverse of an admissible `L`: the map from feasible coefficients to
/// protocol weights.
pub fn protocol_map(l: &[Vec<Rational>]) -> Option<RMatrix> {
    inverse(l)
}
