//! Seeded random corpora of coefficient vectors and feasible POVMs.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::extremal::catalog_extrema;
use crate::feasible::{permutation_closure, SymPovm};
use crate::scalar::Rational;
use crate::symmetry::{CoeffVector, SymmetryKind};

/// Largest denominator used for random rationals.
pub const DEFAULT_DENOMINATOR: i64 = 12;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p/q` with `q ∈ [1, max_den]` and `p/q ∈ [lo, hi]`.
pub fn random_rational<R: Rng>(rng: &mut R, lo: i64, hi: i64, max_den: i64) -> Rational {
    let q = rng.gen_range(1..=max_den);
    let p = rng.gen_range(lo * q..=hi * q);
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// `n` positive weights summing to one, each a multiple of `1/den` with `den ≥ n`.
pub fn random_positive_weights<R: Rng>(rng: &mut R, n: usize, max_den: i64) -> Vec<Rational> {
    let den = rng.gen_range(n as i64..=max_den.max(n as i64));
    // Cut points among 1..den give n positive parts.
    let mut cuts: Vec<i64> = sample(rng, (den - 1) as usize, n - 1)
        .into_iter()
        .map(|c| c as i64 + 1)
        .collect();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(n);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(den)) {
        parts.push(Rational::new(BigInt::from(c - prev), BigInt::from(den)));
        prev = c;
    }
    parts
}

/// Coefficient vector with entries in `[-1, 1]`.
pub fn random_coeff_vector<R: Rng>(rng: &mut R, kind: SymmetryKind) -> CoeffVector {
    let coeffs = (0..kind.n_coeffs())
        .map(|_| random_rational(rng, -1, 1, DEFAULT_DENOMINATOR))
        .collect();
    CoeffVector::new(kind, coeffs).expect("length matches")
}

/// Draws feasible POVMs as convex combinations of labelled extremal POVMs.
#[derive(Clone, Debug)]
pub struct PovmSampler {
    pub kind: SymmetryKind,
    pub outcomes: usize,
    pub vertices: Vec<SymPovm>,
}

impl PovmSampler {
    pub fn new(kind: SymmetryKind, outcomes: usize) -> Result<Self> {
        let cat = catalog_extrema(kind, outcomes)?;
        let vertices = permutation_closure(&cat.vertices, outcomes);
        Ok(Self {
            kind,
            outcomes,
            vertices,
        })
    }

    fn combine(&self, idx: &[usize], weights: &[Rational]) -> SymPovm {
        let mut acc = SymPovm::identity(self.kind).padded(self.outcomes).scale(&Rational::zero());
        for (&i, w) in idx.iter().zip(weights) {
            acc = acc.add_scaled(w, &self.vertices[i]).expect("same kind and size");
        }
        acc
    }

    /// Convex combination of up to `max_terms` vertices, possibly a vertex itself.
    pub fn feasible<R: Rng>(&self, rng: &mut R, max_terms: usize) -> SymPovm {
        let k = rng.gen_range(1..=max_terms.min(self.vertices.len()).max(1));
        let idx = sample(rng, self.vertices.len(), k).into_vec();
        let w = random_positive_weights(rng, k, DEFAULT_DENOMINATOR);
        self.combine(&idx, &w)
    }

    /// Combination with positive weights of at least two distinct vertices.
    pub fn strict_combination<R: Rng>(&self, rng: &mut R, max_terms: usize) -> Option<SymPovm> {
        if self.vertices.len() < 2 {
            return None;
        }
        let k = rng.gen_range(2..=max_terms.clamp(2, self.vertices.len()));
        let idx = sample(rng, self.vertices.len(), k).into_vec();
        let w = random_positive_weights(rng, k, DEFAULT_DENOMINATOR);
        Some(self.combine(&idx, &w))
    }
}
