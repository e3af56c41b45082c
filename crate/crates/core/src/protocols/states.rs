//! Weighted pure-state sets resolving the identity with `Σ_j v_j² = 0`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::operators::Matrix;
use crate::scalar::{ratio, Rational, Scalar};

/// One state, stored as an unnormalised Gaussian-integer vector. The
/// normalised projector `|v⟩⟨v| / ⟨v|v⟩` is exact because `⟨v|v⟩` is rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PureState {
    pub weight: Rational,
    pub vector: Vec<Scalar>,
}

impl PureState {
    pub fn norm_sqr(&self) -> Rational {
        self.vector.iter().map(Scalar::norm_sqr).sum()
    }

    pub fn projector(&self) -> Matrix {
        Matrix::outer(&self.vector).scale(&(Rational::one() / self.norm_sqr()))
    }

    /// `Σ_j v_j²` (no conjugation).
    pub fn self_overlap(&self) -> Scalar {
        let mut acc = Scalar::zero();
        for v in &self.vector {
            acc += &(v * v);
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PureStateSet {
    pub dim: usize,
    pub states: Vec<PureState>,
}

impl PureStateSet {
    /// `Σ_q w_q |q⟩⟨q|`.
    pub fn resolution(&self) -> Matrix {
        self.states
            .iter()
            .fold(Matrix::zeros(self.dim), |acc, s| &acc + &s.projector().scale(&s.weight))
    }

    pub fn resolves_identity(&self) -> bool {
        self.resolution() == Matrix::identity(self.dim)
    }

    /// Every state is orthogonal to its own transpose.
    pub fn transpose_orthogonal(&self) -> bool {
        self.states.iter().all(|s| s.self_overlap().is_zero())
    }
}

/// Proper rotations of the cube: signed permutation matrices with determinant 1.
pub fn cube_rotations() -> Vec<[[i64; 3]; 3]> {
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let parity = [1, -1, -1, 1, 1, -1];
    let mut out = Vec::new();
    for (p, par) in perms.iter().zip(parity) {
        for signs in 0..8u8 {
            let s: Vec<i64> = (0..3).map(|k| if signs >> k & 1 == 1 { -1 } else { 1 }).collect();
            if par * s[0] * s[1] * s[2] != 1 {
                continue;
            }
            let mut m = [[0i64; 3]; 3];
            for r in 0..3 {
                m[r][p[r]] = s[r];
            }
            out.push(m);
        }
    }
    out
}

/// Builds the state set for local dimension `d`.
///
/// Levels are paired into 2-blocks carrying `e_r ± i e_s` with weight 1. For
/// odd `d` the last three levels form a block carrying the orbit of
/// `e_1 + i e_2` under the 24 cube rotations, each with weight 1/8.
pub fn build_pure_state_set(d: usize) -> Result<PureStateSet> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    let pairs = if d.is_multiple_of(2) { d / 2 } else { (d - 3) / 2 };
    let mut states = Vec::new();
    for b in 0..pairs {
        let (r, s) = (2 * b, 2 * b + 1);
        for sign in [1, -1] {
            let mut v = vec![Scalar::zero(); d];
            v[r] = Scalar::one();
            v[s] = Scalar::new(Rational::zero(), ratio(sign, 1));
            states.push(PureState {
                weight: Rational::one(),
                vector: v,
            });
        }
    }
    if d % 2 == 1 {
        let base = d - 3;
        for g in cube_rotations() {
            // g · (1, i, 0) = first column + i · second column.
            let mut v = vec![Scalar::zero(); d];
            for row in 0..3 {
                v[base + row] = Scalar::new(ratio(g[row][0], 1), ratio(g[row][1], 1));
            }
            states.push(PureState {
                weight: ratio(1, 8),
                vector: v,
            });
        }
    }
    let set = PureStateSet { dim: d, states };
    if !set.resolves_identity() || !set.transpose_orthogonal() {
        return Err(Error::Internal(format!("pure-state set for d={d} fails its invariants")));
    }
    Ok(set)
}
