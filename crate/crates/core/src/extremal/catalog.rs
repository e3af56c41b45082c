//! Closed-form extremal POVMs for each family.

use num_traits::{One, Zero};

use super::VertexSet;
use crate::error::{Error, Result};
use crate::feasible::SymPovm;
use crate::scalar::{int, ratio, Rational};
use crate::symmetry::{CoeffVector, Family, SymmetryKind};

/// The eight two-outcome OO extrema, labelled `A1, A2, B1, B2, C1, C2, D1, D2`.
/// Each pair `X1, X2` is complementary.
pub fn oo_two_outcome_elements(d: usize) -> Result<Vec<(&'static str, CoeffVector)>> {
    let kind = SymmetryKind::oo(d)?;
    let di = d as i64;
    let den = (di + 2) * (di - 1);
    let v = |a: Rational, b: Rational, c: Rational| CoeffVector::new(kind, vec![a, b, c]).expect("length 3");
    Ok(vec![
        ("A1", v(int(0), int(0), int(0))),
        ("A2", v(int(1), int(1), int(1))),
        ("B1", v(int(0), int(0), ratio(2 * di, den))),
        ("B2", v(int(1), int(1), ratio((di + 1) * (di - 2), den))),
        ("C1", v(int(1), ratio(1, di - 1), ratio(di - 2, den))),
        ("C2", v(int(0), ratio(di - 2, di - 1), ratio(di * di, den))),
        ("D1", v(int(1), int(0), ratio(2, di + 2))),
        ("D2", v(int(0), int(1), ratio(di, di + 2))),
    ])
}

/// The genuine three-outcome OO extremum `(M1, M2, M3)`.
pub fn oo_triple(d: usize) -> Result<[CoeffVector; 3]> {
    let kind = SymmetryKind::oo(d)?;
    let di = d as i64;
    let den = (di + 2) * (di - 1);
    let v = |a: Rational, b: Rational, c: Rational| CoeffVector::new(kind, vec![a, b, c]).expect("length 3");
    Ok([
        v(int(0), int(0), ratio(2 * di, den)),
        v(int(0), ratio(di - 2, di - 1), ratio(di * (di - 2), den)),
        v(int(1), ratio(1, di - 1), ratio(di - 2, den)),
    ])
}

/// Bell element with ones on components `i` and `j`.
pub fn bell_split(i: usize, j: usize) -> CoeffVector {
    let mut c = vec![Rational::zero(); 4];
    c[i] = Rational::one();
    c[j] = Rational::one();
    CoeffVector::new(SymmetryKind::bell(), c).expect("length 4")
}

/// Isotropic/Werner element for protocol weights `(x, y)`.
pub fn twirl_pair_element(kind: SymmetryKind, x: &Rational, y: &Rational) -> CoeffVector {
    let d = Rational::from_integer((kind.dim() as i64).into());
    let dp1 = &d + Rational::one();
    let coeffs = match kind.family() {
        Family::Isotropic => vec![x.clone(), (&d * y + x) / &dp1],
        Family::Werner => vec![y.clone(), (int(2) * x + (&d - Rational::one()) * y) / &dp1],
        _ => unreachable!("only isotropic and Werner use (x, y) weights"),
    };
    CoeffVector::new(kind, coeffs).expect("length 2")
}

/// Places `parts` into the given slots of an `outcomes`-element POVM.
fn place(kind: SymmetryKind, outcomes: usize, parts: &[(usize, &CoeffVector)]) -> SymPovm {
    let mut elements = vec![CoeffVector::zeros(kind); outcomes];
    for (slot, v) in parts {
        elements[*slot] = (*v).clone();
    }
    SymPovm { kind, elements }
}

/// All labelled extremal POVMs with `outcomes` outcomes, from closed forms.
pub fn catalog_extrema(kind: SymmetryKind, outcomes: usize) -> Result<VertexSet> {
    if outcomes == 0 {
        return Err(Error::NoOutcomes);
    }
    let n = outcomes;
    let mut povms = Vec::new();
    match kind.family() {
        Family::Isotropic | Family::Werner => {
            // Point masses of the x and y distributions.
            for i in 0..n {
                for j in 0..n {
                    let elements = (0..n)
                        .map(|k| {
                            let x = if k == i { Rational::one() } else { Rational::zero() };
                            let y = if k == j { Rational::one() } else { Rational::zero() };
                            twirl_pair_element(kind, &x, &y)
                        })
                        .collect();
                    povms.push(SymPovm { kind, elements });
                }
            }
        }
        Family::Bell => {
            let ones = CoeffVector::ones(kind);
            for s in 0..n {
                povms.push(place(kind, n, &[(s, &ones)]));
            }
            for i in 0..4 {
                for j in i + 1..4 {
                    let u = bell_split(i, j);
                    let w = u.complement();
                    for s in 0..n {
                        for t in 0..n {
                            if s != t {
                                povms.push(place(kind, n, &[(s, &u), (t, &w)]));
                            }
                        }
                    }
                }
            }
        }
        Family::OO => {
            let two = oo_two_outcome_elements(kind.dim())?;
            let ones = CoeffVector::ones(kind);
            for s in 0..n {
                povms.push(place(kind, n, &[(s, &ones)]));
            }
            for pair in two[2..].chunks(2) {
                let (u, w) = (&pair[0].1, &pair[1].1);
                for s in 0..n {
                    for t in 0..n {
                        if s != t {
                            povms.push(place(kind, n, &[(s, u), (t, w)]));
                        }
                    }
                }
            }
            let triple = oo_triple(kind.dim())?;
            for s in 0..n {
                for t in 0..n {
                    for u in 0..n {
                        if s != t && t != u && s != u {
                            povms.push(place(kind, n, &[(s, &triple[0]), (t, &triple[1]), (u, &triple[2])]));
                        }
                    }
                }
            }
        }
    }
    VertexSet::from_povms(kind, outcomes, povms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasible::is_feasible;

    #[test]
    fn oo_d3_values() {
        let two = oo_two_outcome_elements(3).unwrap();
        let get = |name: &str| two.iter().find(|(l, _)| *l == name).unwrap().1.coeffs.clone();
        assert_eq!(get("B1"), vec![int(0), int(0), ratio(3, 5)]);
        assert_eq!(get("B2"), vec![int(1), int(1), ratio(2, 5)]);
        assert_eq!(get("C1"), vec![int(1), ratio(1, 2), ratio(1, 10)]);
        assert_eq!(get("C2"), vec![int(0), ratio(1, 2), ratio(9, 10)]);
        assert_eq!(get("D1"), vec![int(1), int(0), ratio(2, 5)]);
        assert_eq!(get("D2"), vec![int(0), int(1), ratio(3, 5)]);
        let t = oo_triple(3).unwrap();
        assert_eq!(t[0].coeffs, vec![int(0), int(0), ratio(3, 5)]);
        assert_eq!(t[1].coeffs, vec![int(0), ratio(1, 2), ratio(3, 10)]);
        assert_eq!(t[2].coeffs, vec![int(1), ratio(1, 2), ratio(1, 10)]);
    }

    #[test]
    fn pairs_are_complementary() {
        for d in 2..=6 {
            let two = oo_two_outcome_elements(d).unwrap();
            for pair in two.chunks(2) {
                assert_eq!(pair[0].1.complement(), pair[1].1);
            }
            let t = oo_triple(d).unwrap();
            let s = t[0].add(&t[1]).unwrap().add(&t[2]).unwrap();
            assert_eq!(s, CoeffVector::ones(SymmetryKind::oo(d).unwrap()));
        }
    }

    #[test]
    fn catalog_sizes() {
        let bell = catalog_extrema(SymmetryKind::bell(), 2).unwrap();
        assert_eq!(bell.vertices.len(), 8);
        assert_eq!(catalog_extrema(SymmetryKind::bell(), 4).unwrap().vertices.len(), 40);
        let iso = catalog_extrema(SymmetryKind::isotropic(2).unwrap(), 2).unwrap();
        assert_eq!(iso.vertices.len(), 4);
        let oo = catalog_extrema(SymmetryKind::oo(3).unwrap(), 3).unwrap();
        assert_eq!(oo.vertices.len(), 3 + 18 + 6);
    }

    #[test]
    fn catalog_entries_feasible() {
        for kind in [
            SymmetryKind::bell(),
            SymmetryKind::isotropic(3).unwrap(),
            SymmetryKind::werner(3).unwrap(),
            SymmetryKind::oo(4).unwrap(),
        ] {
            for v in catalog_extrema(kind, 3).unwrap().vertices {
                assert!(is_feasible(&v).unwrap().feasible, "{v:?}");
            }
        }
    }

    #[test]
    fn isotropic_d2_catalog() {
        let k = SymmetryKind::isotropic(2).unwrap();
        let cat = catalog_extrema(k, 2).unwrap();
        let expected = [
            [[0, 1, 0, 1], [1, 1, 1, 1]],
            [[0, 1, 2, 3], [1, 1, 1, 3]],
            [[1, 1, 1, 3], [0, 1, 2, 3]],
            [[1, 1, 1, 1], [0, 1, 0, 1]],
        ];
        for e in expected {
            let p = SymPovm::from_rows(
                k,
                e.iter().map(|r| vec![ratio(r[0], r[1]), ratio(r[2], r[3])]).collect(),
            )
            .unwrap();
            assert!(cat.vertices.contains(&p), "{p:?}");
        }
    }
}
