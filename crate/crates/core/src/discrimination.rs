//! Local and global discrimination of symmetric state ensembles.
//!
//! A symmetric state is fixed by its block weights `p_i = tr(ρ Π_i)`, and an
//! element with coefficients `v` fires with probability `Σ_i v_i p_i`. Linear
//! costs are optimised by exact LP over the feasible polytope and cross-checked
//! by a sweep over the extremal catalog; mutual information is convex in the
//! channel, so its maximum over the polytope sits at a catalog vertex.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::extremal::catalog_extrema;
use crate::feasible::{build_feasible_polytope_with, lp_solve, LinearProgram, LpOutcome, Sense, SymPovm};
use crate::linalg::RMatrix;
use crate::operators::BipartiteOperator;
use crate::scalar::{int, to_f64, Rational};
use crate::symmetry::{check_kind, twirl_coefficients, CoeffVector, SymmetryKind};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StateCoeffs {
    pub kind: SymmetryKind,
    /// `p_i = tr(ρ Π_i)`.
    pub weights: Vec<Rational>,
}

impl StateCoeffs {
    pub fn new(kind: SymmetryKind, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != kind.n_coeffs() {
            return Err(Error::CoeffLength {
                family: kind.family(),
                expected: kind.n_coeffs(),
                got: weights.len(),
            });
        }
        if weights.iter().any(Signed::is_negative) {
            return Err(Error::Infeasible("state weights must be nonnegative".into()));
        }
        if !weights.iter().sum::<Rational>().is_one() {
            return Err(Error::Infeasible("state weights must sum to 1".into()));
        }
        Ok(Self { kind, weights })
    }

    /// Block weights of the twirl of a density operator.
    pub fn from_operator(rho: &BipartiteOperator, kind: SymmetryKind) -> Result<Self> {
        let c = twirl_coefficients(rho, kind)?;
        let weights = c.coeffs.iter().zip(kind.traces()).map(|(x, t)| x * t).collect();
        Self::new(kind, weights)
    }

    /// The `i`-th Bell state.
    pub fn bell_state(i: usize) -> Result<Self> {
        let mut w = vec![Rational::zero(); 4];
        *w.get_mut(i).ok_or(Error::DimensionMismatch { expected: 4, got: i + 1 })? = Rational::one();
        Self::new(SymmetryKind::bell(), w)
    }

    /// `σ(f) = f |+⟩⟨+| + (1 - f)(I - |+⟩⟨+|)/(d² - 1)`.
    pub fn isotropic(d: usize, f: Rational) -> Result<Self> {
        let w = vec![f.clone(), Rational::one() - f];
        Self::new(SymmetryKind::isotropic(d)?, w)
    }

    /// Probability that element `v` fires.
    pub fn probability(&self, v: &CoeffVector) -> Result<Rational> {
        check_kind(self.kind, v.kind)?;
        Ok(v.coeffs.iter().zip(&self.weights).map(|(a, b)| a * b).sum())
    }
}

/// `Pr(k) = Σ_i coeffs_k[i] p_i`.
pub fn outcome_distribution(p: &SymPovm, s: &StateCoeffs) -> Result<Vec<Rational>> {
    p.elements.iter().map(|e| s.probability(e)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cost {
    /// Maximise the probability of a correct guess.
    BayesSuccess,
    MutualInformation,
    /// Minimise the expected cost `C[guess][state]`.
    Matrix(RMatrix),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscriminationProblem {
    pub states: Vec<StateCoeffs>,
    pub priors: Vec<Rational>,
    pub cost: Cost,
}

impl DiscriminationProblem {
    pub fn new(states: Vec<StateCoeffs>, priors: Vec<Rational>, cost: Cost) -> Result<Self> {
        let first = states.first().ok_or(Error::NoOutcomes)?;
        for s in &states {
            check_kind(first.kind, s.kind)?;
        }
        if priors.len() != states.len() {
            return Err(Error::DimensionMismatch {
                expected: states.len(),
                got: priors.len(),
            });
        }
        if priors.iter().any(Signed::is_negative) || !priors.iter().sum::<Rational>().is_one() {
            return Err(Error::Infeasible("priors must be nonnegative and sum to 1".into()));
        }
        if let Cost::Matrix(c) = &cost {
            if c.len() != states.len() || c.iter().any(|r| r.len() != states.len()) {
                return Err(Error::DimensionMismatch {
                    expected: states.len(),
                    got: c.len(),
                });
            }
        }
        Ok(Self { states, priors, cost })
    }

    /// Equal priors.
    pub fn uniform(states: Vec<StateCoeffs>, cost: Cost) -> Result<Self> {
        let m = states.len() as i64;
        let priors = vec![Rational::new(1.into(), m.max(1).into()); states.len()];
        Self::new(states, priors, cost)
    }

    pub fn kind(&self) -> SymmetryKind {
        self.states[0].kind
    }

    /// Utility `U[guess][state]` to maximise, and the sign that turns the
    /// maximal utility back into the reported value.
    fn utility(&self) -> Result<(RMatrix, Rational)> {
        let m = self.states.len();
        match &self.cost {
            Cost::BayesSuccess => Ok((
                (0..m)
                    .map(|k| (0..m).map(|j| if k == j { Rational::one() } else { Rational::zero() }).collect())
                    .collect(),
                Rational::one(),
            )),
            Cost::Matrix(c) => Ok((c.iter().map(|r| r.iter().map(|x| -x).collect()).collect(), int(-1))),
            Cost::MutualInformation => Err(Error::Infeasible("mutual information is not a linear cost".into())),
        }
    }

    /// `P(outcome | state)` for each state.
    pub fn channel(&self, p: &SymPovm) -> Result<Vec<Vec<Rational>>> {
        self.states.iter().map(|s| outcome_distribution(p, s)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalBayes {
    /// Optimum from the LP.
    pub value: Rational,
    /// Optimal guessing POVM: outcome `k` means "guess state `k`".
    pub povm: SymPovm,
    /// Optimum from the catalog sweep with per-outcome MAP guessing.
    pub sweep_value: Rational,
    pub sweep_povm: SymPovm,
}

impl LocalBayes {
    pub fn methods_agree(&self) -> bool {
        self.value == self.sweep_value
    }
}

/// Optimal local guessing strategy for a linear cost.
pub fn optimal_local_bayes(problem: &DiscriminationProblem) -> Result<LocalBayes> {
    let (u, sign) = problem.utility()?;
    let kind = problem.kind();
    let n = kind.n_coeffs();
    let m = problem.states.len();

    let poly = build_feasible_polytope_with(kind, m, false)?;
    let mut objective = vec![Rational::zero(); m * n];
    for k in 0..m {
        for i in 0..n {
            objective[k * n + i] = (0..m)
                .map(|j| &problem.priors[j] * &u[k][j] * &problem.states[j].weights[i])
                .sum();
        }
    }
    let layout = poly.layout.expect("feasible polytope has a layout");
    let lp = LinearProgram {
        polytope: poly,
        objective,
        sense: Sense::Maximize,
    };
    let sol = match lp_solve(&lp)? {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Infeasible(_) => return Err(Error::Internal("feasible polytope reported empty".into())),
    };
    let povm = layout.point_to_povm(&sol.point)?;

    let mut best: Option<(Rational, SymPovm)> = None;
    for class in catalog_extrema(kind, m)?.classes {
        let (value, merged) = map_guess(problem, &u, &class.representative)?;
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, merged));
        }
    }
    let (sweep, sweep_povm) = best.expect("catalog is never empty");
    Ok(LocalBayes {
        value: &sol.value * &sign,
        povm,
        sweep_value: sweep * sign,
        sweep_povm,
    })
}

/// Assigns each outcome to the guess of largest expected utility and merges
/// outcomes with equal guesses.
fn map_guess(problem: &DiscriminationProblem, u: &RMatrix, p: &SymPovm) -> Result<(Rational, SymPovm)> {
    let m = problem.states.len();
    let channel = problem.channel(p)?;
    let mut merged = vec![CoeffVector::zeros(p.kind); m];
    let mut total = Rational::zero();
    for (o, element) in p.elements.iter().enumerate() {
        let score = |k: usize| -> Rational { (0..m).map(|j| &problem.priors[j] * &u[k][j] * &channel[j][o]).sum() };
        let (guess, value) = (0..m)
            .map(|k| (k, score(k)))
            .fold(None::<(usize, Rational)>, |acc, (k, s)| match acc {
                Some((_, ref b)) if s <= *b => acc,
                _ => Some((k, s)),
            })
            .expect("at least one guess");
        total += value;
        merged[guess] = merged[guess].add(element)?;
    }
    Ok((total, SymPovm::new(p.kind, merged)?))
}

/// `I(state; outcome)` in bits.
pub fn mutual_information(priors: &[Rational], channel: &[Vec<Rational>]) -> f64 {
    let outcomes = channel.first().map_or(0, Vec::len);
    let pk: Vec<f64> = (0..outcomes)
        .map(|k| priors.iter().zip(channel).map(|(q, row)| to_f64(&(q * &row[k]))).sum())
        .collect();
    let mut info = 0.0;
    for (q, row) in priors.iter().zip(channel) {
        let q = to_f64(q);
        for (k, pr) in row.iter().enumerate() {
            let pr = to_f64(pr);
            if q > 0.0 && pr > 0.0 {
                info += q * pr * (pr / pk[k]).ln();
            }
        }
    }
    (info / std::f64::consts::LN_2).max(0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalInfo {
    pub bits: f64,
    pub povm: SymPovm,
    /// Exact `P(outcome | state)` of the optimal POVM.
    pub channel: Vec<Vec<Rational>>,
}

/// Largest mutual information over the extremal catalog.
pub fn optimal_local_info(problem: &DiscriminationProblem) -> Result<LocalInfo> {
    let kind = problem.kind();
    let mut best: Option<LocalInfo> = None;
    // Nonzero outcomes of an extremal POVM are linearly independent.
    for class in catalog_extrema(kind, kind.n_coeffs())?.classes {
        let povm = class.representative.strip_zero();
        let channel = problem.channel(&povm)?;
        let bits = mutual_information(&problem.priors, &channel);
        if best.as_ref().is_none_or(|b| bits > b.bits + 1e-12) {
            best = Some(LocalInfo { bits, povm, channel });
        }
    }
    Ok(best.expect("catalog is never empty"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GlobalOptimum {
    /// Optimal success probability, or minimal expected cost.
    pub value: Option<Rational>,
    pub bits: f64,
    /// `P(block | state)`.
    pub channel: Vec<Vec<Rational>>,
    /// Block projectors, merged by guess when the cost is a utility.
    pub povm: SymPovm,
}

/// Classical optimum of a measurement resolving every commutant block.
pub fn global_optimal(problem: &DiscriminationProblem) -> Result<GlobalOptimum> {
    let channel: Vec<Vec<Rational>> = problem.states.iter().map(|s| s.weights.clone()).collect();
    let bits = mutual_information(&problem.priors, &channel);
    let n = problem.kind().n_coeffs();
    let unit = |hit: &dyn Fn(usize) -> bool| (0..n).map(|i| if hit(i) { int(1) } else { Rational::zero() }).collect();
    let (value, rows) = match problem.utility() {
        Ok((u, sign)) => {
            let m = problem.states.len();
            let mut total = Rational::zero();
            let mut guess = Vec::with_capacity(n);
            for i in 0..n {
                let gains: Vec<Rational> = (0..m)
                    .map(|k| (0..m).map(|j| &problem.priors[j] * &u[k][j] * &channel[j][i]).sum())
                    .collect();
                // First maximiser, so ties resolve deterministically.
                let best = (0..m).fold(0, |b, k| if gains[k] > gains[b] { k } else { b });
                total += &gains[best];
                guess.push(best);
            }
            let rows = (0..m).map(|k| unit(&|i| guess[i] == k)).collect();
            (Some(total * sign), rows)
        }
        Err(_) => (None, (0..n).map(|k| unit(&|i| i == k)).collect()),
    };
    let povm = SymPovm::from_rows(problem.kind(), rows)?;
    Ok(GlobalOptimum { value, bits, channel, povm })
}
