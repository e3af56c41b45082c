//! Double-description vertex enumeration over exact integers.
//!
//! The polytope `{x : G x >= h, E x = f}` is parametrised as `x = x0 + K y`
//! on the affine hull of the equalities, then homogenised to the cone
//! `{(t, y) : (G K) y - (h - G x0) t >= 0, t >= 0}`. Extreme rays with
//! `t > 0` are the vertices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::feasible::Polytope;
use crate::linalg::{affine_solution, dot, inverse, mat_vec, rank};
use crate::scalar::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn contains(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }
}

struct Ray {
    z: Vec<BigInt>,
    zeros: Bits,
}

/// Scales a rational vector to a primitive integer vector with the same direction.
pub(crate) fn primitive(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rational::from_integer(lcm.clone())).to_integer()).collect();
    normalize(ints)
}

fn normalize(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        return v;
    }
    v.into_iter().map(|x| x / &g).collect()
}

fn int_dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

/// Vertices of a bounded polytope, sorted and deduplicated.
pub fn double_description(p: &Polytope) -> Result<Vec<Vec<Rational>>> {
    let n = p.ambient_dim;
    let eq_rows: Vec<Vec<Rational>> = p.equalities.iter().map(|e| e.row.clone()).collect();
    let eq_rhs: Vec<Rational> = p.equalities.iter().map(|e| e.value.clone()).collect();
    let Some((x0, kernel)) = affine_solution(&eq_rows, &eq_rhs, n) else {
        return Err(Error::EmptyPolytope);
    };
    let k = kernel.len();
    if k == 0 {
        return if p.contains(&x0) {
            Ok(vec![x0])
        } else {
            Err(Error::EmptyPolytope)
        };
    }
    // Homogeneous rows over (t, y); the last row is t >= 0.
    let mut rows: Vec<Vec<BigInt>> = p
        .inequalities
        .iter()
        .map(|h| {
            let mut r = Vec::with_capacity(k + 1);
            r.push(h.slack(&x0));
            r.extend(kernel.iter().map(|kv| dot(&h.row, kv)));
            primitive(&r)
        })
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    let mut t_row = vec![BigInt::zero(); k + 1];
    t_row[0] = BigInt::one();
    rows.push(t_row);

    let rays = cone_rays(&rows, k + 1)?;
    let mut vertices = Vec::new();
    let mut at_infinity = false;
    for z in rays {
        if z[0].is_zero() {
            at_infinity = true;
            continue;
        }
        let t = Rational::from_integer(z[0].clone());
        let y: Vec<Rational> = z[1..].iter().map(|v| Rational::from_integer(v.clone()) / &t).collect();
        let mut x = x0.clone();
        for (yi, kv) in y.iter().zip(&kernel) {
            if yi.is_zero() {
                continue;
            }
            for (xj, kj) in x.iter_mut().zip(kv) {
                *xj += yi * kj;
            }
        }
        vertices.push(x);
    }
    if vertices.is_empty() {
        return Err(Error::EmptyPolytope);
    }
    if at_infinity {
        return Err(Error::UnboundedPolytope);
    }
    vertices.sort();
    vertices.dedup();
    Ok(vertices)
}

/// Extreme rays of the pointed cone `{z : rows·z >= 0}` in `dim` dimensions.
fn cone_rays(rows: &[Vec<BigInt>], dim: usize) -> Result<Vec<Vec<BigInt>>> {
    let rat_rows: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect())
        .collect();
    // Greedy choice of `dim` independent rows for the initial simplicial cone.
    let mut initial: Vec<usize> = Vec::new();
    let mut chosen_rows: Vec<Vec<Rational>> = Vec::new();
    for (i, r) in rat_rows.iter().enumerate() {
        chosen_rows.push(r.clone());
        if rank(&chosen_rows, dim) == chosen_rows.len() {
            initial.push(i);
            if initial.len() == dim {
                break;
            }
        } else {
            chosen_rows.pop();
        }
    }
    if initial.len() < dim {
        return Err(Error::UnboundedPolytope);
    }
    let inv = inverse(&chosen_rows).ok_or_else(|| Error::Internal("initial rows are singular".into()))?;
    let total = rows.len();
    let mut rays: Vec<Ray> = (0..dim)
        .map(|j| {
            let col: Vec<Rational> = inv.iter().map(|r| r[j].clone()).collect();
            let z = primitive(&col);
            let mut zeros = Bits::new(total);
            for (pos, &row_idx) in initial.iter().enumerate() {
                if pos != j {
                    zeros.set(row_idx);
                }
            }
            debug_assert_eq!(mat_vec(&chosen_rows, &col)[j], Rational::one());
            Ray { z, zeros }
        })
        .collect();

    for (idx, row) in rows.iter().enumerate() {
        if initial.contains(&idx) {
            continue;
        }
        let values: Vec<BigInt> = rays.iter().map(|r| int_dot(row, &r.z)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
        let mut next: Vec<Ray> = Vec::new();
        for &pi in &pos {
            for &ni in &neg {
                let common = rays[pi].zeros.and(&rays[ni].zeros);
                if common.count() + 2 < dim {
                    continue;
                }
                let blocked = rays
                    .iter()
                    .enumerate()
                    .any(|(ri, r)| ri != pi && ri != ni && r.zeros.contains(&common));
                if blocked {
                    continue;
                }
                let z: Vec<BigInt> = rays[ni]
                    .z
                    .iter()
                    .zip(&rays[pi].z)
                    .map(|(a, b)| &values[pi] * a - &values[ni] * b)
                    .collect();
                let mut zeros = common;
                zeros.set(idx);
                next.push(Ray {
                    z: normalize(z),
                    zeros,
                });
            }
        }
        let old = std::mem::take(&mut rays);
        for (i, mut r) in old.into_iter().enumerate() {
            if values[i].is_negative() {
                continue;
            }
            if values[i].is_zero() {
                r.zeros.set(idx);
            }
            rays.push(r);
        }
        rays.extend(next);
    }
    Ok(rays.into_iter().map(|r| r.z).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    #[test]
    fn unit_cube() {
        let v = double_description(&Polytope::cube(3, int(0), int(1))).unwrap();
        assert_eq!(v.len(), 8);
        assert!(v.iter().all(|x| x.iter().all(|c| c.is_zero() || c.is_one())));
    }

    #[test]
    fn primitive_scaling() {
        assert_eq!(
            primitive(&[ratio(1, 2), ratio(-1, 3), int(0)]),
            vec![BigInt::from(3), BigInt::from(-2), BigInt::from(0)]
        );
    }

    #[test]
    fn half_space_is_unbounded() {
        let mut p = Polytope::cube(2, int(0), int(1));
        p.inequalities.truncate(3);
        assert_eq!(double_description(&p), Err(Error::UnboundedPolytope));
    }

    #[test]
    fn empty_box() {
        let p = Polytope::cube(2, int(1), int(0));
        assert_eq!(double_description(&p), Err(Error::EmptyPolytope));
    }
}
