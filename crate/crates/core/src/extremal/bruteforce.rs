//! Active-set vertex enumeration, used as an independent oracle for the
//! double-description method.
//!
//! Works directly in ambient coordinates: every subset of inequalities that
//! completes the equality rows to a nonsingular system is solved, and the
//! solution is kept when it satisfies all constraints. Elimination is done
//! incrementally over `i128` with overflow checks.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::feasible::Polytope;
use crate::scalar::Rational;

/// Echelon rows over `[coefficients | rhs]`, each pivot column cleared in all
/// other rows.
#[derive(Clone)]
struct Echelon {
    rows: Vec<Vec<i128>>,
    pivots: Vec<usize>,
}

fn checked_gcd_normalize(row: &mut [i128]) {
    let g = row.iter().fold(0i128, |acc, &x| acc.gcd(&x));
    if g > 1 {
        for x in row.iter_mut() {
            *x /= g;
        }
    }
}

/// `a·x - b·y` elementwise with overflow detection.
fn combine(a: i128, x: &[i128], b: i128, y: &[i128]) -> Result<Vec<i128>> {
    x.iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let l = a.checked_mul(xi).ok_or(Error::Overflow)?;
            let r = b.checked_mul(yi).ok_or(Error::Overflow)?;
            l.checked_sub(r).ok_or(Error::Overflow)
        })
        .collect()
}

impl Echelon {
    /// Adds a row; returns `Ok(false)` if it is dependent on the current rows
    /// in its coefficient part.
    fn push(&mut self, row: &[i128], n: usize) -> Result<bool> {
        let mut r = row.to_vec();
        for (p, &c) in self.rows.iter().zip(&self.pivots) {
            if r[c] != 0 {
                r = combine(p[c], &r, r[c], p)?;
                checked_gcd_normalize(&mut r);
            }
        }
        let Some(c) = (0..n).find(|&j| r[j] != 0) else {
            return Ok(false);
        };
        for p in self.rows.iter_mut() {
            if p[c] != 0 {
                *p = combine(r[c], p, p[c], &r)?;
                checked_gcd_normalize(p);
            }
        }
        self.rows.push(r);
        self.pivots.push(c);
        Ok(true)
    }

    /// The unique solution once the coefficient part has full rank.
    fn solution(&self, n: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); n];
        for (r, &c) in self.rows.iter().zip(&self.pivots) {
            x[c] = Rational::new(BigInt::from(r[n]), BigInt::from(r[c]));
        }
        x
    }
}

fn integer_row(coeffs: &[Rational], rhs: &Rational) -> Result<Vec<i128>> {
    let lcm = coeffs
        .iter()
        .chain(std::iter::once(rhs))
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scale = Rational::from_integer(lcm);
    coeffs
        .iter()
        .chain(std::iter::once(rhs))
        .map(|x| {
            let v = (x * &scale).to_integer();
            i128::try_from(v).map_err(|_| Error::Overflow)
        })
        .collect()
}

/// Vertices by exhaustive search over active sets, sorted and deduplicated.
pub fn brute_force_vertices(p: &Polytope) -> Result<Vec<Vec<Rational>>> {
    let n = p.ambient_dim;
    let mut base = Echelon {
        rows: Vec::new(),
        pivots: Vec::new(),
    };
    for e in &p.equalities {
        let row = integer_row(&e.row, &e.value)?;
        if !base.push(&row, n)? {
            // Dependent equality: inconsistent iff its rhs survives reduction.
            let mut r = row.clone();
            for (q, &c) in base.rows.iter().zip(&base.pivots) {
                if r[c] != 0 {
                    r = combine(q[c], &r, r[c], q)?;
                }
            }
            if r[n] != 0 {
                return Err(Error::EmptyPolytope);
            }
        }
    }
    let ineq_rows: Vec<Vec<i128>> = p
        .inequalities
        .iter()
        .map(|h| integer_row(&h.row, &h.bound))
        .collect::<Result<_>>()?;
    let mut found = Vec::new();
    search(p, &ineq_rows, 0, &base, n, &mut found)?;
    found.sort();
    found.dedup();
    if found.is_empty() {
        return Err(Error::EmptyPolytope);
    }
    Ok(found)
}

fn search(
    p: &Polytope,
    rows: &[Vec<i128>],
    start: usize,
    current: &Echelon,
    n: usize,
    found: &mut Vec<Vec<Rational>>,
) -> Result<()> {
    if current.pivots.len() == n {
        let x = current.solution(n);
        if p.inequalities.iter().all(|h| h.slack(&x) >= Rational::zero()) {
            found.push(x);
        }
        return Ok(());
    }
    let needed = n - current.pivots.len();
    for i in start..rows.len() {
        if rows.len() - i < needed {
            break;
        }
        let mut next = current.clone();
        if next.push(&rows[i], n)? {
            search(p, rows, i + 1, &next, n, found)?;
        }
    }
    Ok(())
}
