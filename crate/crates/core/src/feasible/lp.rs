//! Exact two-phase simplex over the rationals with Bland's rule.

use num_traits::{One, Signed, Zero};

use super::{ConstraintLabel, Polytope};
use crate::error::{Error, Result};
use crate::linalg::{dot, kernel};
use crate::scalar::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub polytope: Polytope,
    pub objective: Vec<Rational>,
    pub sense: Sense,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub value: Rational,
    /// A vertex of the polytope attaining `value`.
    pub point: Vec<Rational>,
    /// Inequality indices active at `point`.
    pub active: Vec<usize>,
    pub active_labels: Vec<ConstraintLabel>,
}

/// Multipliers proving `{A x >= b, E x = f}` empty: `λ >= 0`,
/// `λᵀA + μᵀE = 0` and `λᵀb + μᵀf > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub inequality_multipliers: Vec<Rational>,
    pub equality_multipliers: Vec<Rational>,
}

impl FarkasCertificate {
    pub fn verify(&self, p: &Polytope) -> bool {
        if self.inequality_multipliers.len() != p.inequalities.len()
            || self.equality_multipliers.len() != p.equalities.len()
            || self.inequality_multipliers.iter().any(Signed::is_negative)
        {
            return false;
        }
        let mut combo = vec![Rational::zero(); p.ambient_dim];
        let mut rhs = Rational::zero();
        for (l, h) in self.inequality_multipliers.iter().zip(&p.inequalities) {
            if l.is_zero() {
                continue;
            }
            for (c, a) in combo.iter_mut().zip(&h.row) {
                *c += l * a;
            }
            rhs += l * &h.bound;
        }
        for (m, e) in self.equality_multipliers.iter().zip(&p.equalities) {
            if m.is_zero() {
                continue;
            }
            for (c, a) in combo.iter_mut().zip(&e.row) {
                *c += m * a;
            }
            rhs += m * &e.value;
        }
        combo.iter().all(Zero::is_zero) && rhs.is_positive()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible(FarkasCertificate),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StandardOutcome {
    /// Optimal basic solution of `min cᵀz`.
    Optimal { z: Vec<Rational>, value: Rational },
    /// `y` with `Aᵀy <= 0` and `bᵀy > 0`.
    Infeasible { y: Vec<Rational> },
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Reduced costs.
    obj: Vec<Rational>,
    /// Columns allowed to enter.
    allowed: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rational::one() / &self.rows[r][c];
        for x in self.rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        self.rhs[r] *= &inv;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for &j in &nz {
                let delta = &f * &prow[j];
                self.rows[i][j] -= delta;
            }
            let delta = &f * &prhs;
            self.rhs[i] -= delta;
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for &j in &nz {
                let delta = &f * &prow[j];
                self.obj[j] -= delta;
            }
        }
        self.basis[r] = c;
    }

    /// Minimises with Bland's rule. `Err(Unbounded)` if the objective is unbounded.
    fn run(&mut self) -> Result<()> {
        loop {
            let Some(c) = (0..self.allowed).find(|&j| self.obj[j].is_negative()) else {
                return Ok(());
            };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            let Some((r, _)) = best else {
                return Err(Error::Unbounded);
            };
            self.pivot(r, c);
        }
    }

    fn set_costs(&mut self, cost: &[Rational]) {
        let width = self.obj.len();
        let mut obj: Vec<Rational> = (0..width).map(|j| cost.get(j).cloned().unwrap_or_else(Rational::zero)).collect();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = cost.get(b).cloned().unwrap_or_else(Rational::zero);
            if cb.is_zero() {
                continue;
            }
            for (j, o) in obj.iter_mut().enumerate() {
                if !self.rows[r][j].is_zero() {
                    *o -= &cb * &self.rows[r][j];
                }
            }
        }
        self.obj = obj;
    }
}

/// Solves `min cᵀz` subject to `A z = b`, `z >= 0`, exactly.
pub fn simplex_standard(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> Result<StandardOutcome> {
    let m = a.len();
    let n = c.len();
    if b.len() != m || a.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: b.len(),
        });
    }
    // Rows are sign-normalised so that rhs >= 0; `sign` undoes it for duals.
    let mut sign = vec![Rational::one(); m];
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative();
        if flip {
            sign[i] = -Rational::one();
        }
        let mut row: Vec<Rational> = a[i].iter().map(|x| if flip { -x } else { x.clone() }).collect();
        row.extend((0..m).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
        rows.push(row);
        rhs.push(if flip { -b[i].clone() } else { b[i].clone() });
    }
    let mut t = Tableau {
        rows,
        rhs,
        basis: (n..n + m).collect(),
        obj: vec![Rational::zero(); n + m],
        allowed: n,
    };
    let mut phase1 = vec![Rational::zero(); n];
    phase1.extend(std::iter::repeat_n(Rational::one(), m));
    t.set_costs(&phase1);
    t.run()?;
    let infeas: Rational = t
        .basis
        .iter()
        .zip(&t.rhs)
        .filter(|(&bv, _)| bv >= n)
        .map(|(_, v)| v.clone())
        .sum();
    if infeas.is_positive() {
        // y_i = c_Bᵀ B⁻¹ e_i; the artificial columns hold B⁻¹.
        let y: Vec<Rational> = (0..m)
            .map(|i| {
                let s: Rational = (0..m)
                    .filter(|&r| t.basis[r] >= n)
                    .map(|r| t.rows[r][n + i].clone())
                    .sum();
                s * &sign[i]
            })
            .collect();
        return Ok(StandardOutcome::Infeasible { y });
    }
    // Drive remaining (zero-valued) artificials out of the basis.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            if let Some(c) = (0..n).find(|&j| !t.rows[r][j].is_zero()) {
                t.pivot(r, c);
            } else {
                t.rows.remove(r);
                t.rhs.remove(r);
                t.basis.remove(r);
                continue;
            }
        }
        r += 1;
    }
    t.set_costs(c);
    t.run()?;
    let mut z = vec![Rational::zero(); n];
    for (r, &bv) in t.basis.iter().enumerate() {
        z[bv] = t.rhs[r].clone();
    }
    let value = dot(c, &z);
    Ok(StandardOutcome::Optimal { z, value })
}

/// Exact LP over an H-polytope. The returned point is a vertex.
pub fn lp_solve(lp: &LinearProgram) -> Result<LpOutcome> {
    let p = &lp.polytope;
    let nv = p.ambient_dim;
    if lp.objective.len() != nv {
        return Err(Error::DimensionMismatch {
            expected: nv,
            got: lp.objective.len(),
        });
    }
    let ni = p.inequalities.len();
    // Columns: u (nv), w (nv), slacks (ni); x = u - w.
    let width = 2 * nv + ni;
    let mut a = Vec::with_capacity(ni + p.equalities.len());
    let mut b = Vec::with_capacity(ni + p.equalities.len());
    for (i, h) in p.inequalities.iter().enumerate() {
        let mut row = vec![Rational::zero(); width];
        for j in 0..nv {
            row[j] = h.row[j].clone();
            row[nv + j] = -h.row[j].clone();
        }
        row[2 * nv + i] = -Rational::one();
        a.push(row);
        b.push(h.bound.clone());
    }
    for e in &p.equalities {
        let mut row = vec![Rational::zero(); width];
        for j in 0..nv {
            row[j] = e.row[j].clone();
            row[nv + j] = -e.row[j].clone();
        }
        a.push(row);
        b.push(e.value.clone());
    }
    let mut cost = vec![Rational::zero(); width];
    for j in 0..nv {
        let cj = match lp.sense {
            Sense::Minimize => lp.objective[j].clone(),
            Sense::Maximize => -lp.objective[j].clone(),
        };
        cost[nv + j] = -cj.clone();
        cost[j] = cj;
    }
    match simplex_standard(&a, &b, &cost)? {
        StandardOutcome::Infeasible { y } => {
            let cert = FarkasCertificate {
                inequality_multipliers: y[..ni].to_vec(),
                equality_multipliers: y[ni..].to_vec(),
            };
            if !cert.verify(p) {
                return Err(Error::Internal("Farkas certificate failed verification".into()));
            }
            Ok(LpOutcome::Infeasible(cert))
        }
        StandardOutcome::Optimal { z, .. } => {
            let x0: Vec<Rational> = (0..nv).map(|j| &z[j] - &z[nv + j]).collect();
            let point = purify(p, &lp.objective, x0)?;
            let value = dot(&lp.objective, &point);
            let active = p.active_set(&point);
            let active_labels = active.iter().map(|&i| p.inequalities[i].label.clone()).collect();
            Ok(LpOutcome::Optimal(LpSolution {
                value,
                point,
                active,
                active_labels,
            }))
        }
    }
}

/// Moves an optimal point along objective-neutral directions until the
/// active constraints reach full rank.
fn purify(p: &Polytope, objective: &[Rational], mut x: Vec<Rational>) -> Result<Vec<Rational>> {
    let nv = p.ambient_dim;
    loop {
        let mut rows: Vec<Vec<Rational>> = p.equalities.iter().map(|e| e.row.clone()).collect();
        let active = p.active_set(&x);
        rows.extend(active.iter().map(|&i| p.inequalities[i].row.clone()));
        let ker = kernel(&rows, nv);
        let Some(dir) = ker.into_iter().next() else {
            return Ok(x);
        };
        if !dot(objective, &dir).is_zero() {
            return Err(Error::Internal("optimum is not stationary along a free direction".into()));
        }
        let mut moved = false;
        for d in [dir.clone(), dir.iter().map(|v| -v).collect::<Vec<_>>()] {
            // Largest t with slack_i(x) + t·(row_i·d) >= 0 for all inactive i.
            let mut step: Option<Rational> = None;
            for (i, h) in p.inequalities.iter().enumerate() {
                if active.contains(&i) {
                    continue;
                }
                let rate = dot(&h.row, &d);
                if rate.is_negative() {
                    let t = h.slack(&x) / -rate;
                    if step.as_ref().is_none_or(|s| t < *s) {
                        step = Some(t);
                    }
                }
            }
            if let Some(t) = step {
                for (xi, di) in x.iter_mut().zip(&d) {
                    *xi += &t * di;
                }
                moved = true;
                break;
            }
        }
        if !moved {
            return Err(Error::UnboundedPolytope);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasible::{build_feasible_polytope, Halfspace};
    use crate::scalar::{int, ratio};
    use crate::symmetry::SymmetryKind;

    #[test]
    fn isotropic_max_first_coefficient() {
        let p = build_feasible_polytope(SymmetryKind::isotropic(2).unwrap(), 2).unwrap();
        let lp = LinearProgram {
            polytope: p,
            objective: vec![int(1), int(0)],
            sense: Sense::Maximize,
        };
        let LpOutcome::Optimal(sol) = lp_solve(&lp).unwrap() else { panic!() };
        assert_eq!(sol.value, int(1));
        // Maximising a alone has a tie between (1, 1/3) and (1, 1); both are vertices.
        assert!(sol.point == vec![int(1), ratio(1, 3)] || sol.point == vec![int(1), int(1)]);
        assert!(sol.active.len() >= 2);
    }

    #[test]
    fn lexicographic_tie_breaking_is_stable() {
        let p = build_feasible_polytope(SymmetryKind::isotropic(2).unwrap(), 2).unwrap();
        let lp = LinearProgram {
            polytope: p,
            objective: vec![int(1000), int(-1)],
            sense: Sense::Maximize,
        };
        let LpOutcome::Optimal(sol) = lp_solve(&lp).unwrap() else { panic!() };
        assert_eq!(sol.point, vec![int(1), ratio(1, 3)]);
    }

    #[test]
    fn bell_four_state_bayes() {
        let p = build_feasible_polytope(SymmetryKind::bell(), 4).unwrap();
        let mut objective = vec![int(0); 16];
        for k in 0..4 {
            objective[k * 4 + k] = ratio(1, 4);
        }
        let lp = LinearProgram {
            polytope: p.clone(),
            objective,
            sense: Sense::Maximize,
        };
        let LpOutcome::Optimal(sol) = lp_solve(&lp).unwrap() else { panic!() };
        assert_eq!(sol.value, ratio(1, 2));
        assert!(p.contains(&sol.point));
    }

    #[test]
    fn infeasible_toy_system() {
        let p = Polytope::new(
            1,
            vec![
                Halfspace {
                    row: vec![int(1)],
                    bound: int(1),
                    label: ConstraintLabel::Named { name: "x >= 1".into() },
                },
                Halfspace {
                    row: vec![int(-1)],
                    bound: int(0),
                    label: ConstraintLabel::Named { name: "-x >= 0".into() },
                },
            ],
            vec![],
        )
        .unwrap();
        let lp = LinearProgram {
            polytope: p.clone(),
            objective: vec![int(1)],
            sense: Sense::Maximize,
        };
        let LpOutcome::Infeasible(cert) = lp_solve(&lp).unwrap() else { panic!() };
        assert!(cert.verify(&p));
    }

    #[test]
    fn unbounded_reported() {
        let p = Polytope::new(
            1,
            vec![Halfspace {
                row: vec![int(1)],
                bound: int(0),
                label: ConstraintLabel::Named { name: "x >= 0".into() },
            }],
            vec![],
        )
        .unwrap();
        let lp = LinearProgram {
            polytope: p,
            objective: vec![int(1)],
            sense: Sense::Maximize,
        };
        assert_eq!(lp_solve(&lp), Err(Error::Unbounded));
    }

    #[test]
    fn zero_objective_returns_vertex() {
        let p = Polytope::cube(3, int(0), int(1));
        let lp = LinearProgram {
            polytope: p.clone(),
            objective: vec![int(0); 3],
            sense: Sense::Minimize,
        };
        let LpOutcome::Optimal(sol) = lp_solve(&lp).unwrap() else { panic!() };
        assert_eq!(sol.active.len(), 3);
        assert!(sol.point.iter().all(|x| x.is_zero() || x.is_one()));
    }
}
