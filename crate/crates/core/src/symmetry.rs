//! Commutant projector bases, twirls and partial-transpose coefficient maps
//! for the four symmetry families.
//!
//! Every family has an abelian commutant spanned by mutually orthogonal
//! projectors `Π_i`. An invariant operator is stored as its coefficients on
//! that basis, in the fixed orders below:
//!
//! | family    | basis                                   | traces                              |
//! |-----------|-----------------------------------------|-------------------------------------|
//! | Isotropic | `P+`, `I - P+`                          | `1`, `d²-1`                         |
//! | Werner    | `P_A`, `P_S`                            | `d(d-1)/2`, `d(d+1)/2`              |
//! | Bell      | `Ψ+`, `Ψ-`, `Φ+`, `Φ-`                  | `1, 1, 1, 1`                        |
//! | OO        | `P+`, `P_A`, `P_S - P+`                 | `1`, `d(d-1)/2`, `(d+2)(d-1)/2`     |

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::RMatrix;
use crate::operators::{
    maximally_entangled_projector, partial_transpose, swap_operator, BipartiteOperator, Matrix,
};
use crate::scalar::{int, ratio, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Isotropic,
    Werner,
    Bell,
    #[serde(rename = "OO")]
    OO,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Isotropic, Family::Werner, Family::Bell, Family::OO];

    /// Number of commutant projectors.
    pub fn n_coeffs(self) -> usize {
        match self {
            Family::Isotropic | Family::Werner => 2,
            Family::Bell => 4,
            Family::OO => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Isotropic => "Isotropic",
            Family::Werner => "Werner",
            Family::Bell => "Bell",
            Family::OO => "OO",
        }
    }

    /// Short names of the basis projectors, in canonical order.
    pub fn component_labels(self) -> &'static [&'static str] {
        match self {
            Family::Isotropic => &["P+", "I-P+"],
            Family::Werner => &["P_A", "P_S"],
            Family::Bell => &["Psi+", "Psi-", "Phi+", "Phi-"],
            Family::OO => &["P+", "P_A", "P_S-P+"],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "isotropic" | "iso" => Ok(Family::Isotropic),
            "werner" => Ok(Family::Werner),
            "bell" => Ok(Family::Bell),
            "oo" => Ok(Family::OO),
            _ => Err(Error::Parse(format!("unknown family {s:?}"))),
        }
    }
}

/// A symmetry family at a fixed local dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymmetryKind {
    family: Family,
    dim: usize,
}

impl SymmetryKind {
    pub fn new(family: Family, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        if family == Family::Bell && dim != 2 {
            return Err(Error::BellDimension(dim));
        }
        Ok(Self { family, dim })
    }

    pub fn isotropic(dim: usize) -> Result<Self> {
        Self::new(Family::Isotropic, dim)
    }

    pub fn werner(dim: usize) -> Result<Self> {
        Self::new(Family::Werner, dim)
    }

    pub fn bell() -> Self {
        Self {
            family: Family::Bell,
            dim: 2,
        }
    }

    pub fn oo(dim: usize) -> Result<Self> {
        Self::new(Family::OO, dim)
    }

    pub fn family(self) -> Family {
        self.family
    }

    pub fn dim(self) -> usize {
        self.dim
    }

    pub fn n_coeffs(self) -> usize {
        self.family.n_coeffs()
    }

    /// `tr(Π_i)` in canonical order.
    pub fn traces(self) -> Vec<Rational> {
        let d = self.dim as i64;
        match self.family {
            Family::Isotropic => vec![int(1), int(d * d - 1)],
            Family::Werner => vec![int(d * (d - 1) / 2), int(d * (d + 1) / 2)],
            Family::Bell => vec![int(1); 4],
            Family::OO => vec![int(1), int(d * (d - 1) / 2), int((d + 2) * (d - 1) / 2)],
        }
    }

    /// The family whose basis diagonalises the partial transposes of this
    /// family's projectors.
    pub fn pt_target(self) -> SymmetryKind {
        let family = match self.family {
            Family::Isotropic => Family::Werner,
            Family::Werner => Family::Isotropic,
            other => other,
        };
        SymmetryKind {
            family,
            dim: self.dim,
        }
    }
}

impl fmt::Display for SymmetryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(d={})", self.family, self.dim)
    }
}

pub(crate) fn check_kind(expected: SymmetryKind, got: SymmetryKind) -> Result<()> {
    if expected != got {
        return Err(Error::KindMismatch {
            expected: expected.to_string(),
            got: got.to_string(),
        });
    }
    Ok(())
}

/// Canonical projector basis of a commutant.
#[derive(Clone, Debug)]
pub struct CommutantBasis {
    pub kind: SymmetryKind,
    pub projectors: Vec<BipartiteOperator>,
    pub traces: Vec<Rational>,
}

fn basis_cache() -> &'static Mutex<HashMap<SymmetryKind, Arc<CommutantBasis>>> {
    static CACHE: OnceLock<Mutex<HashMap<SymmetryKind, Arc<CommutantBasis>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The commutant basis for `kind`. Bases are built once per kind and shared.
pub fn commutant_basis(kind: SymmetryKind) -> Arc<CommutantBasis> {
    if let Some(b) = basis_cache().lock().expect("basis cache poisoned").get(&kind) {
        return b.clone();
    }
    let basis = Arc::new(build_basis(kind));
    basis_cache()
        .lock()
        .expect("basis cache poisoned")
        .entry(kind)
        .or_insert(basis)
        .clone()
}

fn build_basis(kind: SymmetryKind) -> CommutantBasis {
    let d = kind.dim;
    let id = BipartiteOperator::identity(d);
    let projectors = match kind.family {
        Family::Isotropic => {
            let plus = maximally_entangled_projector(d).expect("d >= 2");
            let rest = id.sub(&plus).expect("same dim");
            vec![plus, rest]
        }
        Family::Werner => {
            let (anti, sym) = swap_projectors(d);
            vec![anti, sym]
        }
        Family::Bell => bell_projectors(),
        Family::OO => {
            let plus = maximally_entangled_projector(d).expect("d >= 2");
            let (anti, sym) = swap_projectors(d);
            let rest = sym.sub(&plus).expect("same dim");
            vec![plus, anti, rest]
        }
    };
    CommutantBasis {
        kind,
        projectors,
        traces: kind.traces(),
    }
}

/// `((I - F)/2, (I + F)/2)`.
fn swap_projectors(d: usize) -> (BipartiteOperator, BipartiteOperator) {
    let id = BipartiteOperator::identity(d);
    let f = swap_operator(d).expect("d >= 2");
    let half = ratio(1, 2);
    (
        id.sub(&f).expect("same dim").scale(&half),
        id.add(&f).expect("same dim").scale(&half),
    )
}

/// Unnormalised Bell vectors in the order `Ψ+, Ψ-, Φ+, Φ-`; each has norm² 2.
fn bell_vectors() -> [[i64; 4]; 4] {
    [[0, 1, 1, 0], [0, 1, -1, 0], [1, 0, 0, 1], [1, 0, 0, -1]]
}

fn bell_projectors() -> Vec<BipartiteOperator> {
    bell_vectors()
        .iter()
        .map(|v| {
            let ket: Vec<Scalar> = v.iter().map(|&x| Scalar::from_int(x)).collect();
            let m = Matrix::outer(&ket).scale(&ratio(1, 2));
            BipartiteOperator::new(2, m).expect("4x4")
        })
        .collect()
}

/// An invariant operator `Σ coeffs[i]·Π_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoeffVector {
    pub kind: SymmetryKind,
    pub coeffs: Vec<Rational>,
}

impl CoeffVector {
    pub fn new(kind: SymmetryKind, coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.len() != kind.n_coeffs() {
            return Err(Error::CoeffLength {
                family: kind.family,
                expected: kind.n_coeffs(),
                got: coeffs.len(),
            });
        }
        Ok(Self { kind, coeffs })
    }

    pub fn zeros(kind: SymmetryKind) -> Self {
        Self {
            kind,
            coeffs: vec![Rational::zero(); kind.n_coeffs()],
        }
    }

    /// The identity operator.
    pub fn ones(kind: SymmetryKind) -> Self {
        Self {
            kind,
            coeffs: vec![Rational::one(); kind.n_coeffs()],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    /// `1 - self`, the complementary element.
    pub fn complement(&self) -> Self {
        Self {
            kind: self.kind,
            coeffs: self.coeffs.iter().map(|c| Rational::one() - c).collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self {
            kind: self.kind,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_kind(self.kind, other.kind)?;
        Ok(Self {
            kind: self.kind,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_kind(self.kind, other.kind)?;
        Ok(Self {
            kind: self.kind,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    /// `tr` of the represented operator.
    pub fn trace(&self) -> Rational {
        self.kind
            .traces()
            .iter()
            .zip(&self.coeffs)
            .map(|(t, c)| t * c)
            .sum()
    }
}

/// `Σ coeffs[i]·Π_i` as an explicit operator.
pub fn coeff_to_operator(v: &CoeffVector) -> BipartiteOperator {
    let basis = commutant_basis(v.kind);
    let mut acc = BipartiteOperator::zeros(v.kind.dim);
    for (c, p) in v.coeffs.iter().zip(&basis.projectors) {
        if !c.is_zero() {
            acc = acc.add(&p.scale(c)).expect("same dim");
        }
    }
    acc
}

/// Projects `m` onto the commutant: `c_i = tr(m·Π_i) / tr(Π_i)`.
///
/// This is the statistics-level twirl, `tr(N·T(ρ)) = tr(T(N)·ρ)`.
pub fn twirl_coefficients(m: &BipartiteOperator, kind: SymmetryKind) -> Result<CoeffVector> {
    if m.dim() != kind.dim {
        return Err(Error::DimensionMismatch {
            expected: kind.dim,
            got: m.dim(),
        });
    }
    if let Some((row, col)) = m.matrix().first_non_hermitian() {
        return Err(Error::NotHermitian { row, col });
    }
    let basis = commutant_basis(kind);
    let coeffs = basis
        .projectors
        .iter()
        .zip(&basis.traces)
        .map(|(p, t)| m.trace_product(p).map(|s| s.re / t))
        .collect::<Result<Vec<_>>>()?;
    CoeffVector::new(kind, coeffs)
}

/// Finite-group twirl for the Bell family: `¼ Σ_k (σ_k⊗σ_k) m (σ_k⊗σ_k)†`
/// over `k ∈ {0, x, y, z}`. Independent of the trace projection and used to
/// cross-check it.
pub fn bell_group_average(m: &BipartiteOperator) -> Result<BipartiteOperator> {
    if m.dim() != 2 {
        return Err(Error::BellDimension(m.dim()));
    }
    let i = Scalar::i();
    let paulis = [
        Matrix::identity(2),
        Matrix::from_real_rows(&[vec![int(0), int(1)], vec![int(1), int(0)]])?,
        Matrix::from_rows(vec![vec![Scalar::zero(), -i.clone()], vec![i, Scalar::zero()]])?,
        Matrix::diagonal(&[int(1), int(-1)]),
    ];
    let mut acc = BipartiteOperator::zeros(2);
    for s in &paulis {
        let u = BipartiteOperator::new(2, s.kron(s))?;
        let conj = BipartiteOperator::new(2, u.matrix().adjoint())?;
        acc = acc.add(&u.mul(m)?.mul(&conj)?)?;
    }
    Ok(acc.scale(&ratio(1, 4)))
}

/// Linear map on coefficient vectors implementing the partial transpose:
/// `coeff(Γ(Σ v_i Π_i)) = matrix · v`, expressed in the target family's basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PtMap {
    source: SymmetryKind,
    target: SymmetryKind,
    matrix: RMatrix,
}

impl PtMap {
    pub fn source(&self) -> SymmetryKind {
        self.source
    }

    pub fn target(&self) -> SymmetryKind {
        self.target
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.matrix
    }

    pub fn apply(&self, v: &CoeffVector) -> Result<CoeffVector> {
        check_kind(self.source, v.kind)?;
        CoeffVector::new(self.target, crate::linalg::mat_vec(&self.matrix, &v.coeffs))
    }

    /// `next ∘ self`. Fails unless `self.target == next.source`.
    pub fn then(&self, next: &PtMap) -> Result<PtMap> {
        if self.target != next.source {
            return Err(Error::MapTagMismatch(self.target.to_string(), next.source.to_string()));
        }
        Ok(PtMap {
            source: self.source,
            target: next.target,
            matrix: crate::linalg::mat_mul(&next.matrix, &self.matrix),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.matrix == crate::linalg::identity(self.matrix.len())
    }
}

/// The OO coefficient map `R`, as a closed-form matrix.
pub fn oo_r_matrix(d: usize) -> RMatrix {
    let di = d as i64;
    let s = ratio(1, 2 * di);
    let rows = [
        [2, di * (1 - di), (di + 2) * (di - 1)],
        [-2, di, di + 2],
        [2, di, di - 2],
    ];
    rows.iter().map(|r| r.iter().map(|&x| int(x) * &s).collect()).collect()
}

fn map_cache() -> &'static Mutex<HashMap<SymmetryKind, PtMap>> {
    static CACHE: OnceLock<Mutex<HashMap<SymmetryKind, PtMap>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The partial-transpose coefficient map out of `source`.
///
/// OO uses the closed form [`oo_r_matrix`]; the other families are computed
/// from the operators. Every map is checked on each basis projector:
/// `coeff_to_operator(map·e_i) = Γ(Π_i)` exactly.
pub fn pt_coefficient_map(source: SymmetryKind) -> Result<PtMap> {
    if let Some(m) = map_cache().lock().expect("map cache poisoned").get(&source) {
        return Ok(m.clone());
    }
    let target = source.pt_target();
    let basis = commutant_basis(source);
    let n = source.n_coeffs();
    let images: Vec<BipartiteOperator> = basis.projectors.iter().map(partial_transpose).collect();
    let matrix = if source.family == Family::OO {
        oo_r_matrix(source.dim)
    } else {
        let columns = images
            .iter()
            .map(|img| twirl_coefficients(img, target))
            .collect::<Result<Vec<_>>>()?;
        (0..n).map(|r| columns.iter().map(|c| c.coeffs[r].clone()).collect()).collect()
    };
    for (i, img) in images.iter().enumerate() {
        let column: Vec<Rational> = matrix.iter().map(|row| row[i].clone()).collect();
        if coeff_to_operator(&CoeffVector::new(target, column)?) != *img {
            return Err(Error::Internal(format!(
                "partial-transpose map for {source} fails on basis element {i}"
            )));
        }
    }
    let map = PtMap {
        source,
        target,
        matrix,
    };
    map_cache()
        .lock()
        .expect("map cache poisoned")
        .insert(source, map.clone());
    Ok(map)
}
