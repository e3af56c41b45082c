//! Local protocols realising extremal POVMs after a twirl, and their exact
//! verification.
//!
//! A protocol is a product measurement: each outcome is a sum of weighted
//! terms `w·(A ⊗ B)` with `A`, `B` positive semidefinite. Twirling the
//! measurement with the family's group leaves statistics on invariant states
//! unchanged, so the protocol realises `twirl_coefficients` of its outcomes.

mod states;

pub use states::{build_pure_state_set, cube_rotations, PureState, PureStateSet};

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::feasible::SymPovm;
use crate::operators::{
    is_psd, is_psd_float, kraus_from_separable_form, tensor, Arithmetic, BipartiteOperator, KrausDecomposition, Matrix,
    SeparableTerm,
};
use crate::scalar::{int, ratio, to_f64, Rational, Scalar};
use crate::symmetry::{check_kind, commutant_basis, twirl_coefficients, CoeffVector, Family, SymmetryKind};

#[derive(Clone, Debug, PartialEq)]
pub struct LocalProtocol {
    pub twirl: SymmetryKind,
    /// Product terms for each outcome; an empty list is the zero element.
    pub outcomes: Vec<Vec<SeparableTerm>>,
}

impl LocalProtocol {
    pub fn dim(&self) -> usize {
        self.twirl.dim()
    }

    /// `Σ w·(a ⊗ b)` for outcome `k`.
    pub fn outcome_operator(&self, k: usize) -> Result<BipartiteOperator> {
        let mut acc = BipartiteOperator::zeros(self.dim());
        for t in &self.outcomes[k] {
            acc = acc.add(&tensor(&t.a, &t.b)?.scale(&t.weight))?;
        }
        Ok(acc)
    }

    /// Coefficients of the twirled outcomes.
    pub fn twirled(&self) -> Result<SymPovm> {
        let elements = (0..self.outcomes.len())
            .map(|k| twirl_coefficients(&self.outcome_operator(k)?, self.twirl))
            .collect::<Result<Vec<_>>>()?;
        SymPovm::new(self.twirl, elements)
    }

    /// Local Kraus operators for outcome `k`.
    pub fn kraus(&self, k: usize) -> Result<KrausDecomposition> {
        kraus_from_separable_form(&self.outcomes[k])
    }
}

fn projector_terms(d: usize, x: &Rational, y: &Rational) -> Vec<SeparableTerm> {
    // Σ_i |i⟩⟨i| ⊗ [x|i⟩⟨i| + y(I - |i⟩⟨i|)]
    if x.is_zero() && y.is_zero() {
        return Vec::new();
    }
    (0..d)
        .map(|i| {
            let diag: Vec<Rational> = (0..d).map(|j| if i == j { x.clone() } else { y.clone() }).collect();
            SeparableTerm {
                weight: Rational::one(),
                a: Matrix::basis_projector(d, i),
                b: Matrix::diagonal(&diag),
            }
        })
        .collect()
}

fn require_family(p: &SymPovm, family: Family) -> Result<()> {
    if p.kind.family() != family {
        return Err(Error::KindMismatch {
            expected: family.to_string(),
            got: p.kind.family().to_string(),
        });
    }
    Ok(())
}

fn weights_protocol(
    target: &SymPovm,
    weights: impl Fn(&Rational, &Rational) -> (Rational, Rational),
) -> Result<LocalProtocol> {
    let d = target.kind.dim();
    let mut outcomes = Vec::new();
    for (k, e) in target.elements.iter().enumerate() {
        let (x, y) = weights(&e.coeffs[0], &e.coeffs[1]);
        if x.is_negative() || y.is_negative() {
            return Err(Error::Infeasible(format!(
                "element {}: protocol weights x = {x}, y = {y} must be nonnegative",
                k + 1
            )));
        }
        outcomes.push(projector_terms(d, &x, &y));
    }
    Ok(LocalProtocol {
        twirl: target.kind,
        outcomes,
    })
}

/// Product measurement realising an isotropic POVM: `x = a`,
/// `y = ((d+1)b - a)/d`.
pub fn isotropic_protocol(target: &SymPovm) -> Result<LocalProtocol> {
    require_family(target, Family::Isotropic)?;
    let d = int(target.kind.dim() as i64);
    weights_protocol(target, |a, b| {
        let y = ((&d + Rational::one()) * b - a) / &d;
        (a.clone(), y)
    })
}

/// Product measurement realising a Werner POVM: `x = ((1-d)a + (d+1)b)/2`,
/// `y = a`.
pub fn werner_protocol(target: &SymPovm) -> Result<LocalProtocol> {
    require_family(target, Family::Werner)?;
    let d = int(target.kind.dim() as i64);
    weights_protocol(target, |a, b| {
        let x = ((Rational::one() - &d) * a + (&d + Rational::one()) * b) / int(2);
        (x, a.clone())
    })
}

/// Extremal Bell POVMs: the trivial measurement, or a two-outcome split with
/// ones on components `i < j` in the first element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BellExtremum {
    Identity,
    Split(usize, usize),
}

impl BellExtremum {
    pub fn all() -> Vec<BellExtremum> {
        let mut v = vec![BellExtremum::Identity];
        for i in 0..4 {
            for j in i + 1..4 {
                v.push(BellExtremum::Split(i, j));
            }
        }
        v
    }
}

impl fmt::Display for BellExtremum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels = Family::Bell.component_labels();
        match self {
            BellExtremum::Identity => f.write_str("identity"),
            BellExtremum::Split(i, j) => write!(f, "{},{}", labels[*i], labels[*j]),
        }
    }
}

impl FromStr for BellExtremum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("identity") {
            return Ok(BellExtremum::Identity);
        }
        let labels = Family::Bell.component_labels();
        let idx = |name: &str| labels.iter().position(|l| l.eq_ignore_ascii_case(name.trim()));
        let parts: Vec<&str> = s.split(',').collect();
        if let [a, b] = parts.as_slice() {
            if let (Some(i), Some(j)) = (idx(a), idx(b)) {
                if i != j {
                    return Ok(BellExtremum::Split(i.min(j), i.max(j)));
                }
            }
        }
        Err(Error::UnknownExtremum(s.to_string()))
    }
}

/// Eigenprojectors `(|e0⟩⟨e0|, |e1⟩⟨e1|)` of `σ_z`, `σ_x` or `σ_y`.
fn pauli_eigenprojectors(axis: char) -> [Matrix; 2] {
    let h = Scalar::real(ratio(1, 2));
    let mk = |off: Scalar| {
        Matrix::from_rows(vec![vec![h.clone(), off.clone()], vec![off.conj(), h.clone()]]).expect("2x2")
    };
    match axis {
        'z' => [Matrix::basis_projector(2, 0), Matrix::basis_projector(2, 1)],
        'x' => [mk(Scalar::real(ratio(1, 2))), mk(Scalar::real(ratio(-1, 2)))],
        _ => [
            mk(Scalar::new(Rational::zero(), ratio(-1, 2))),
            mk(Scalar::new(Rational::zero(), ratio(1, 2))),
        ],
    }
}

/// Both parties measure the same Pauli observable; outcome one is "equal
/// results" or "opposite results".
fn correlated_terms(axis: char, equal: bool) -> Vec<SeparableTerm> {
    let p = pauli_eigenprojectors(axis);
    (0..2)
        .map(|s| SeparableTerm {
            weight: Rational::one(),
            a: p[s].clone(),
            b: p[if equal { s } else { 1 - s }].clone(),
        })
        .collect()
}

/// Two-outcome product protocol for a Bell extremum.
///
/// Each split of the Bell basis into two pairs is the "equal / opposite
/// results" split of a joint `σ_z`, `σ_x` or `σ_y` measurement.
pub fn bell_protocol(id: BellExtremum) -> Result<LocalProtocol> {
    let twirl = SymmetryKind::bell();
    let (axis, equal) = match id {
        BellExtremum::Identity => {
            return Ok(LocalProtocol {
                twirl,
                outcomes: vec![vec![SeparableTerm {
                    weight: Rational::one(),
                    a: Matrix::identity(2),
                    b: Matrix::identity(2),
                }]],
            })
        }
        BellExtremum::Split(2, 3) => ('z', true),
        BellExtremum::Split(0, 1) => ('z', false),
        BellExtremum::Split(0, 2) => ('x', true),
        BellExtremum::Split(1, 3) => ('x', false),
        BellExtremum::Split(0, 3) => ('y', true),
        BellExtremum::Split(1, 2) => ('y', false),
        other => return Err(Error::UnknownExtremum(other.to_string())),
    };
    Ok(LocalProtocol {
        twirl,
        outcomes: vec![correlated_terms(axis, equal), correlated_terms(axis, !equal)],
    })
}

/// `M = (σ_k ⊗ σ_l)(|00⟩⟨00| + |11⟩⟨11|)(σ_k ⊗ σ_l)†` and its complement,
/// with `k, l ∈ {0, 1, 2, 3}` indexing `I, σ_x, σ_y, σ_z`.
pub fn bell_pauli_protocol(k: usize, l: usize) -> Result<LocalProtocol> {
    if k > 3 || l > 3 {
        return Err(Error::UnknownExtremum(format!("pauli ({k}, {l})")));
    }
    let i = Scalar::i();
    let paulis = [
        Matrix::identity(2),
        Matrix::from_real_rows(&[vec![int(0), int(1)], vec![int(1), int(0)]])?,
        Matrix::from_rows(vec![vec![Scalar::zero(), -i.clone()], vec![i, Scalar::zero()]])?,
        Matrix::diagonal(&[int(1), int(-1)]),
    ];
    let rot = |s: &Matrix, p: &Matrix| s.mul(p).and_then(|m| m.mul(&s.adjoint()));
    let mut first = Vec::new();
    let mut second = Vec::new();
    for s in 0..2 {
        let ps = Matrix::basis_projector(2, s);
        let po = Matrix::basis_projector(2, 1 - s);
        first.push(SeparableTerm {
            weight: Rational::one(),
            a: rot(&paulis[k], &ps)?,
            b: rot(&paulis[l], &ps)?,
        });
        second.push(SeparableTerm {
            weight: Rational::one(),
            a: rot(&paulis[k], &ps)?,
            b: rot(&paulis[l], &po)?,
        });
    }
    Ok(LocalProtocol {
        twirl: SymmetryKind::bell(),
        outcomes: vec![first, second],
    })
}

/// Named OO protocols. `A`, `B`, `C`, `D` realise the two-outcome pairs
/// `(A2, A1)`, `(B1, B2)`, `(C1, C2)`, `(D1, D2)`; `Triple` realises
/// `(M1, M2, M3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OoVertex {
    A,
    B,
    C,
    D,
    Triple,
}

impl OoVertex {
    pub const ALL: [OoVertex; 5] = [OoVertex::A, OoVertex::B, OoVertex::C, OoVertex::D, OoVertex::Triple];
}

impl FromStr for OoVertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(OoVertex::A),
            "b" => Ok(OoVertex::B),
            "c" => Ok(OoVertex::C),
            "d" => Ok(OoVertex::D),
            "triple" => Ok(OoVertex::Triple),
            _ => Err(Error::UnknownExtremum(s.to_string())),
        }
    }
}

impl fmt::Display for OoVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OoVertex::A => "A",
            OoVertex::B => "B",
            OoVertex::C => "C",
            OoVertex::D => "D",
            OoVertex::Triple => "triple",
        };
        f.write_str(s)
    }
}

/// Product protocol for an OO extremum in local dimension `d`.
///
/// `B`, `C` and the triple use the pure-state set of
/// [`build_pure_state_set`]: Alice projects onto `|q⟩` (weight `w_q`) and Bob
/// tests `|q⟩`, its complex conjugate, or neither.
pub fn oo_protocol(id: OoVertex, d: usize, set: Option<&PureStateSet>) -> Result<LocalProtocol> {
    let twirl = SymmetryKind::oo(d)?;
    let id_d = Matrix::identity(d);
    let term = |w: Rational, a: Matrix, b: Matrix| SeparableTerm { weight: w, a, b };
    let outcomes = match id {
        OoVertex::A => vec![vec![term(Rational::one(), id_d.clone(), id_d.clone())], vec![]],
        OoVertex::D => {
            let mut same = Vec::new();
            let mut diff = Vec::new();
            for i in 0..d {
                let p = Matrix::basis_projector(d, i);
                same.push(term(Rational::one(), p.clone(), p.clone()));
                diff.push(term(Rational::one(), p.clone(), &id_d - &p));
            }
            vec![same, diff]
        }
        OoVertex::B | OoVertex::C | OoVertex::Triple => {
            let set = set.ok_or_else(|| Error::Infeasible("pure-state set required for this protocol".into()))?;
            if set.dim != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: set.dim,
                });
            }
            let mut parallel = Vec::new();
            let mut conjugate = Vec::new();
            let mut parallel_rest = Vec::new();
            let mut conjugate_rest = Vec::new();
            let mut neither = Vec::new();
            for s in &set.states {
                let p = s.projector();
                let pt = p.transpose();
                parallel.push(term(s.weight.clone(), p.clone(), p.clone()));
                conjugate.push(term(s.weight.clone(), p.clone(), pt.clone()));
                parallel_rest.push(term(s.weight.clone(), p.clone(), &id_d - &p));
                conjugate_rest.push(term(s.weight.clone(), p.clone(), &id_d - &pt));
                neither.push(term(s.weight.clone(), p.clone(), &(&id_d - &p) - &pt));
            }
            match id {
                OoVertex::B => vec![parallel, parallel_rest],
                OoVertex::C => vec![conjugate, conjugate_rest],
                _ => vec![parallel, neither, conjugate],
            }
        }
    };
    Ok(LocalProtocol { twirl, outcomes })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeVerdict {
    pub index: usize,
    pub expected: Vec<Rational>,
    /// Twirled coefficients in exact mode.
    pub got: Option<Vec<Rational>>,
    /// Twirled coefficients in float mode.
    pub got_float: Option<Vec<f64>>,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolVerdict {
    pub outcomes: Vec<OutcomeVerdict>,
    /// Untwirled outcomes sum to the identity.
    pub complete: bool,
    /// Every weight is nonnegative and every factor PSD.
    pub factors_psd: bool,
}

impl ProtocolVerdict {
    pub fn ok(&self) -> bool {
        self.complete && self.factors_psd && self.outcomes.iter().all(|o| o.matches)
    }

    pub fn mismatched(&self) -> Vec<usize> {
        self.outcomes.iter().filter(|o| !o.matches).map(|o| o.index).collect()
    }
}

/// Twirls each outcome and compares it with `target`; also checks physical
/// completeness and positivity of every factor.
pub fn verify_protocol(p: &LocalProtocol, target: &SymPovm, mode: Arithmetic) -> Result<ProtocolVerdict> {
    check_kind(p.twirl, target.kind)?;
    if p.outcomes.len() != target.n_outcomes() {
        return Err(Error::DimensionMismatch {
            expected: target.n_outcomes(),
            got: p.outcomes.len(),
        });
    }
    let d = p.dim();
    let mut total = BipartiteOperator::zeros(d);
    let mut factors_psd = true;
    let mut outcomes = Vec::new();
    for (k, expected) in target.elements.iter().enumerate() {
        for t in &p.outcomes[k] {
            factors_psd &= !t.weight.is_negative()
                && match mode {
                    Arithmetic::Exact => is_psd(&t.a)? && is_psd(&t.b)?,
                    Arithmetic::Float { eps } => is_psd_float(&t.a.to_float(), eps)? && is_psd_float(&t.b.to_float(), eps)?,
                };
        }
        let op = p.outcome_operator(k)?;
        total = total.add(&op)?;
        let verdict = match mode {
            Arithmetic::Exact => {
                let got = twirl_coefficients(&op, p.twirl)?;
                OutcomeVerdict {
                    index: k,
                    expected: expected.coeffs.clone(),
                    matches: got == *expected,
                    got: Some(got.coeffs),
                    got_float: None,
                }
            }
            Arithmetic::Float { eps } => {
                let got = float_twirl(&op, p.twirl);
                let matches = got
                    .iter()
                    .zip(&expected.coeffs)
                    .all(|(g, e)| (g - to_f64(e)).abs() <= eps);
                OutcomeVerdict {
                    index: k,
                    expected: expected.coeffs.clone(),
                    got: None,
                    got_float: Some(got),
                    matches,
                }
            }
        };
        outcomes.push(verdict);
    }
    Ok(ProtocolVerdict {
        outcomes,
        complete: total == BipartiteOperator::identity(d),
        factors_psd,
    })
}

fn float_twirl(op: &BipartiteOperator, kind: SymmetryKind) -> Vec<f64> {
    let m = op.matrix().to_float();
    let basis = commutant_basis(kind);
    basis
        .projectors
        .iter()
        .zip(&basis.traces)
        .map(|(p, t)| (&m * p.matrix().to_float()).trace().re / to_f64(t))
        .collect()
}

/// Expected twirl of a named OO protocol, from the closed-form catalog.
pub fn oo_protocol_target(id: OoVertex, d: usize) -> Result<SymPovm> {
    let kind = SymmetryKind::oo(d)?;
    let two = crate::extremal::oo_two_outcome_elements(d)?;
    let get = |name: &str| two.iter().find(|(l, _)| *l == name).expect("known label").1.clone();
    let elements: Vec<CoeffVector> = match id {
        OoVertex::A => vec![get("A2"), get("A1")],
        OoVertex::B => vec![get("B1"), get("B2")],
        OoVertex::C => vec![get("C1"), get("C2")],
        OoVertex::D => vec![get("D1"), get("D2")],
        OoVertex::Triple => crate::extremal::oo_triple(d)?.to_vec(),
    };
    SymPovm::new(kind, elements)
}

/// Expected twirl of a Bell protocol.
pub fn bell_protocol_target(id: BellExtremum) -> Result<SymPovm> {
    let kind = SymmetryKind::bell();
    match id {
        BellExtremum::Identity => Ok(SymPovm::identity(kind)),
        BellExtremum::Split(i, j) => {
            let u = crate::extremal::bell_split(i, j);
            SymPovm::new(kind, vec![u.clone(), u.complement()])
        }
    }
}
