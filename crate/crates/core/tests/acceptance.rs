//! End-to-end acceptance criteria. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rand::Rng;

use sympovm::corpus::{random_coeff_vector, random_rational, rng, PovmSampler};
use sympovm::discrimination::{
    global_optimal, optimal_local_bayes, optimal_local_info, Cost, DiscriminationProblem, StateCoeffs,
};
use sympovm::extremal::{
    catalog_extrema, enumerate_feasible, enumerate_vertices, enumerate_vertices_oracle, is_extremal,
};
use sympovm::feasible::{
    build_feasible_polytope, convex_decompose, is_feasible, permutation_closure, ConstraintLabel, Decomposition,
    SymPovm,
};
use sympovm::nogo::{naive_transform_search, naive_transform_search_for, protocol_map, Verdict};
use sympovm::operators::{is_psd, partial_transpose, Arithmetic, BipartiteOperator, Matrix};
use sympovm::protocols::{
    bell_protocol, bell_protocol_target, build_pure_state_set, isotropic_protocol, oo_protocol, oo_protocol_target,
    verify_protocol, werner_protocol, BellExtremum, OoVertex,
};
use sympovm::scalar::{int, ratio, Rational, Scalar};
use sympovm::symmetry::{
    coeff_to_operator, oo_r_matrix, pt_coefficient_map, twirl_coefficients, CoeffVector, Family, SymmetryKind,
};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn r(n: i64, d: i64) -> Rational {
    ratio(n, d)
}

fn within(limit: Duration, start: Instant, what: &str) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure!(t <= limit, "{what} took {t:?}, limit {limit:?}");
    Ok(t)
}

/// OO two-outcome elements written out from the closed forms.
fn oo_two_outcome_oracle(d: i64) -> Vec<[Rational; 3]> {
    let den = (d + 2) * (d - 1);
    vec![
        [int(0), int(0), int(0)],
        [int(1), int(1), int(1)],
        [int(0), int(0), r(2 * d, den)],
        [int(1), int(1), r((d + 1) * (d - 2), den)],
        [int(1), r(1, d - 1), r(d - 2, den)],
        [int(0), r(d - 2, d - 1), r(d * d, den)],
        [int(1), int(0), r(2, d + 2)],
        [int(0), int(1), r(d, d + 2)],
    ]
}

fn oo_triple_oracle(d: i64) -> [[Rational; 3]; 3] {
    let den = (d + 2) * (d - 1);
    [
        [int(0), int(0), r(2 * d, den)],
        [int(0), r(d - 2, d - 1), r(d * (d - 2), den)],
        [int(1), r(1, d - 1), r(d - 2, den)],
    ]
}

fn povm(kind: SymmetryKind, rows: &[&[Rational]]) -> SymPovm {
    SymPovm::from_rows(kind, rows.iter().map(|r| r.to_vec()).collect()).unwrap()
}

fn criterion_1() -> Outcome {
    let mut times = Vec::new();
    for d in 3..=6i64 {
        let kind = SymmetryKind::oo(d as usize).unwrap();
        let start = Instant::now();
        let vs = enumerate_feasible(kind, 2).map_err(|e| e.to_string())?;
        times.push(within(Duration::from_secs(1), start, &format!("d={d}"))?);
        let got: BTreeSet<Vec<Rational>> = vs.vertices.iter().map(|p| p.elements[0].coeffs.clone()).collect();
        let want: BTreeSet<Vec<Rational>> = oo_two_outcome_oracle(d).into_iter().map(|v| v.to_vec()).collect();
        ensure!(vs.vertices.len() == 8, "d={d}: {} vertices", vs.vertices.len());
        ensure!(got == want, "d={d}: vertex set differs: {got:?}");
        for p in &vs.vertices {
            let second: Vec<Rational> = p.elements[0].coeffs.iter().map(|c| Rational::one() - c).collect();
            ensure!(p.elements[1].coeffs == second, "d={d}: second element is not the complement");
        }
    }
    Ok(format!("8 vertices for d=3..6, max time {:?}", times.iter().max().unwrap()))
}

fn criterion_2() -> Outcome {
    let mut times = Vec::new();
    for d in 3..=5i64 {
        let kind = SymmetryKind::oo(d as usize).unwrap();
        let start = Instant::now();
        let vs = enumerate_feasible(kind, 3).map_err(|e| e.to_string())?;
        times.push(within(Duration::from_secs(30), start, &format!("d={d}"))?);
        let genuine: BTreeSet<SymPovm> = vs
            .vertices
            .iter()
            .filter(|p| p.nonzero_outcomes() == 3)
            .map(SymPovm::canonical)
            .collect();
        let t = oo_triple_oracle(d);
        let expected = povm(kind, &[&t[0], &t[1], &t[2]]).canonical();
        ensure!(genuine.len() == 1, "d={d}: {} genuine 3-outcome classes", genuine.len());
        ensure!(genuine.contains(&expected), "d={d}: genuine vertex differs from the triple");
        let triples = vs.vertices.iter().filter(|p| p.nonzero_outcomes() == 3).count();
        ensure!(triples == 6, "d={d}: {triples} labelled triples, expected 3! = 6");
        // Every other vertex is a padded one- or two-outcome extremum.
        let two: BTreeSet<Vec<Rational>> = oo_two_outcome_oracle(d).into_iter().map(|v| v.to_vec()).collect();
        for p in vs.vertices.iter().filter(|p| p.nonzero_outcomes() < 3) {
            ensure!(
                p.elements.iter().all(|e| two.contains(&e.coeffs)),
                "d={d}: unexpected vertex {p:?}"
            );
        }
    }
    Ok(format!("unique genuine triple for d=3..5, max time {:?}", times.iter().max().unwrap()))
}

/// Bell extrema built from the closed form: the identity in any slot, or a
/// two-ones vector and its complement in two distinct slots.
fn bell_catalog_oracle(n: usize) -> Vec<SymPovm> {
    let kind = SymmetryKind::bell();
    let zero = vec![int(0); 4];
    let mut out = Vec::new();
    for s in 0..n {
        let mut rows = vec![zero.clone(); n];
        rows[s] = vec![int(1); 4];
        out.push(SymPovm::from_rows(kind, rows).unwrap());
    }
    for i in 0..4 {
        for j in i + 1..4 {
            let u: Vec<Rational> = (0..4).map(|k| if k == i || k == j { int(1) } else { int(0) }).collect();
            let w: Vec<Rational> = u.iter().map(|c| Rational::one() - c).collect();
            for s in 0..n {
                for t in 0..n {
                    if s != t {
                        let mut rows = vec![zero.clone(); n];
                        rows[s] = u.clone();
                        rows[t] = w.clone();
                        out.push(SymPovm::from_rows(kind, rows).unwrap());
                    }
                }
            }
        }
    }
    // (u, w) in slots (s, t) equals (w, u) in slots (t, s).
    out.sort();
    out.dedup();
    out
}

fn criterion_3() -> Outcome {
    let kind = SymmetryKind::bell();
    for n in 2..=3 {
        let p = build_feasible_polytope(kind, n).map_err(|e| e.to_string())?;
        let dd = enumerate_vertices(&p).map_err(|e| e.to_string())?;
        let bf = enumerate_vertices_oracle(&p).map_err(|e| e.to_string())?;
        ensure!(dd == bf, "N={n}: double description and brute force disagree");
        ensure!(dd.vertices == bell_catalog_oracle(n), "N={n}: vertex set differs from the closed form");
    }
    let start = Instant::now();
    let p = build_feasible_polytope(kind, 4).map_err(|e| e.to_string())?;
    let vs = enumerate_vertices(&p).map_err(|e| e.to_string())?;
    let t = start.elapsed();
    ensure!(vs.max_nonzero_outcomes() <= 2, "N=4 has a vertex with {} outcomes", vs.max_nonzero_outcomes());
    let oracle = bell_catalog_oracle(4);
    ensure!(vs.vertices == oracle, "N=4: {} vertices, expected {}", vs.vertices.len(), oracle.len());
    let cat = catalog_extrema(kind, 4).map_err(|e| e.to_string())?;
    ensure!(vs.vertices == permutation_closure(&cat.vertices, 4), "N=4 differs from the catalog closure");
    Ok(format!("N=2,3 oracle agreement; N=4 has {} vertices in {t:?}", vs.vertices.len()))
}

fn criterion_4() -> Outcome {
    let mut g = rng(4);
    let mut verified = 0;
    for family in [Family::Isotropic, Family::Werner] {
        for i in 0..1000 {
            let d = 2 + i % 4;
            let kind = SymmetryKind::new(family, d).unwrap();
            let n = g.gen_range(2..=4);
            let sampler = PovmSampler::new(kind, n).map_err(|e| e.to_string())?;
            let target = sampler.feasible(&mut g, 4);
            let protocol = match family {
                Family::Isotropic => isotropic_protocol(&target),
                _ => werner_protocol(&target),
            }
            .map_err(|e| format!("{kind}: {e}"))?;
            let v = verify_protocol(&protocol, &target, Arithmetic::Exact).map_err(|e| e.to_string())?;
            ensure!(v.ok(), "{kind}: protocol mismatch on outcomes {:?}", v.mismatched());
            // Independent check of the twirl: coefficients of Σ w·(a⊗b).
            for (k, e) in target.elements.iter().enumerate() {
                let tw = twirl_coefficients(&protocol.outcome_operator(k).unwrap(), kind).unwrap();
                ensure!(tw == *e, "{kind}: outcome {k} twirls to {tw:?}");
            }
            verified += 1;
        }
    }
    for id in BellExtremum::all() {
        let v = verify_protocol(&bell_protocol(id).unwrap(), &bell_protocol_target(id).unwrap(), Arithmetic::Exact)
            .map_err(|e| e.to_string())?;
        ensure!(v.ok(), "Bell {id}: {v:?}");
    }
    for d in 3..=5 {
        let set = build_pure_state_set(d).map_err(|e| e.to_string())?;
        for id in OoVertex::ALL {
            let p = oo_protocol(id, d, Some(&set)).map_err(|e| e.to_string())?;
            let v = verify_protocol(&p, &oo_protocol_target(id, d).unwrap(), Arithmetic::Exact)
                .map_err(|e| e.to_string())?;
            ensure!(v.ok(), "OO d={d} {id}: mismatched {:?}", v.mismatched());
        }
    }
    Ok(format!("{verified} random Isotropic/Werner targets; all Bell and OO (d=3..5) catalog protocols exact"))
}

fn criterion_5() -> Outcome {
    for d in 2..=6 {
        let set = build_pure_state_set(d).map_err(|e| e.to_string())?;
        let mut sum = vec![vec![Scalar::zero(); d]; d];
        for s in &set.states {
            let norm: Rational = s.vector.iter().map(Scalar::norm_sqr).sum();
            let w = &s.weight / &norm;
            for a in 0..d {
                for b in 0..d {
                    sum[a][b] += &(&s.vector[a] * &s.vector[b].conj()).scale(&w);
                }
            }
            let mut sq = Scalar::zero();
            for x in &s.vector {
                sq += &(x * x);
            }
            ensure!(sq.is_zero(), "d={d}: state with Σ v_j² = {sq:?}");
        }
        for a in 0..d {
            for b in 0..d {
                let want = if a == b { Scalar::one() } else { Scalar::zero() };
                ensure!(sum[a][b] == want, "d={d}: resolution entry ({a},{b}) = {:?}", sum[a][b]);
            }
        }
    }
    Ok("resolution of identity and transpose-orthogonality exact for d=2..6".into())
}

fn normalise(row: &[Rational]) -> Vec<Rational> {
    let m = row.iter().map(Signed::abs).max().unwrap();
    row.iter().map(|x| x / &m).collect()
}

fn criterion_6() -> Outcome {
    for d in 2..=8 {
        let rm = oo_r_matrix(d);
        let mut sq = vec![vec![int(0); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                sq[i][j] = (0..3).map(|k| &rm[i][k] * &rm[k][j]).sum();
            }
        }
        let id: Vec<Vec<Rational>> = (0..3).map(|i| (0..3).map(|j| if i == j { int(1) } else { int(0) }).collect()).collect();
        ensure!(sq == id, "R² ≠ I at d={d}");
    }
    for d in 2..=6 {
        let iso = pt_coefficient_map(SymmetryKind::isotropic(d).unwrap()).unwrap();
        let wer = pt_coefficient_map(SymmetryKind::werner(d).unwrap()).unwrap();
        ensure!(iso.then(&wer).unwrap().is_identity(), "Iso→Werner→Iso is not the identity at d={d}");
        ensure!(wer.then(&iso).unwrap().is_identity(), "Werner→Iso→Werner is not the identity at d={d}");
    }
    let mut g = rng(6);
    let mut counts = Vec::new();
    for kind in [
        SymmetryKind::isotropic(3).unwrap(),
        SymmetryKind::werner(3).unwrap(),
        SymmetryKind::bell(),
        SymmetryKind::oo(3).unwrap(),
    ] {
        let map = pt_coefficient_map(kind).unwrap();
        let mut positive = 0;
        for i in 0..1000 {
            let v = if i % 2 == 0 {
                random_coeff_vector(&mut g, kind)
            } else {
                let c = (0..kind.n_coeffs()).map(|_| random_rational(&mut g, 0, 1, 12)).collect();
                CoeffVector::new(kind, c).unwrap()
            };
            let coeff = map.apply(&v).unwrap().is_nonnegative();
            let op = is_psd(partial_transpose(&coeff_to_operator(&v)).matrix()).unwrap();
            ensure!(coeff == op, "{kind}: PT positivity disagrees on {:?}", v.coeffs);
            positive += usize::from(op);
        }
        ensure!(positive > 0 && positive < 1000, "{kind}: corpus is one-sided ({positive} PPT)");
        counts.push(format!("{kind}: {positive} PPT"));
    }
    // a+b ≥ |c-d| and c+d ≥ |a-b| for one Bell element.
    let want: BTreeSet<Vec<Rational>> = [[1, 1, -1, 1], [1, 1, 1, -1], [-1, 1, 1, 1], [1, -1, 1, 1]]
        .iter()
        .map(|r| normalise(&r.iter().map(|&x| int(x)).collect::<Vec<_>>()))
        .collect();
    let p = build_feasible_polytope(SymmetryKind::bell(), 3).unwrap();
    let got: BTreeSet<Vec<Rational>> = p
        .inequalities
        .iter()
        .filter(|h| matches!(&h.label, ConstraintLabel::PartialTranspose { element: 0, .. }))
        .map(|h| {
            ensure!(h.bound.is_zero(), "PT halfspace with nonzero bound");
            Ok(normalise(&h.row[..4]))
        })
        .collect::<Result<_, String>>()?;
    ensure!(got == want, "Bell PT halfspaces {got:?}");
    Ok(format!("R²=I for d=2..8; Iso/Werner maps invert; {}", counts.join(", ")))
}

fn criterion_7() -> Outcome {
    let mut times = Vec::new();
    for d in 3..=6 {
        let start = Instant::now();
        let cert = naive_transform_search(d).map_err(|e| e.to_string())?;
        times.push(within(Duration::from_secs(10), start, &format!("d={d}"))?);
        ensure!(cert.matchings.len() == 48, "d={d}: {} matchings", cert.matchings.len());
        ensure!(cert.matchings.iter().all(|m| !m.failures.is_empty()), "d={d}: a matching passed");
        ensure!(
            cert.unit_row_cases.iter().all(|c| c.failure.is_some()),
            "d={d}: a unit-row case is feasible"
        );
        ensure!(cert.verdict() == Verdict::Infeasible && cert.routes_agree(), "d={d}: verdict {}", cert.verdict());
        ensure!(cert.r_invariants_hold, "d={d}: R invariants fail");
    }
    for d in 2..=6i64 {
        let cert = naive_transform_search_for(SymmetryKind::isotropic(d as usize).unwrap()).map_err(|e| e.to_string())?;
        ensure!(cert.verdict() == Verdict::Counterexample, "isotropic d={d}: no transformation found");
        let want = vec![vec![int(1), int(0)], vec![r(-1, d), r(d + 1, d)]];
        let maps: Vec<_> = cert.admissible().iter().filter_map(|l| protocol_map(l)).collect();
        ensure!(maps.contains(&want), "isotropic d={d}: maps {maps:?}");
    }
    Ok(format!("OO infeasible for d=3..6 (48 matchings, 216 LP cases each), max time {:?}; isotropic map recovered", times.iter().max().unwrap()))
}

fn criterion_8() -> Outcome {
    let bell: Vec<StateCoeffs> = (0..4).map(|i| StateCoeffs::bell_state(i).unwrap()).collect();
    let pb = DiscriminationProblem::uniform(bell.clone(), Cost::BayesSuccess).unwrap();
    let local = optimal_local_bayes(&pb).map_err(|e| e.to_string())?;
    ensure!(local.value == r(1, 2) && local.methods_agree(), "Bell local Bayes {} / {}", local.value, local.sweep_value);
    let pi = DiscriminationProblem::uniform(bell, Cost::MutualInformation).unwrap();
    let info = optimal_local_info(&pi).map_err(|e| e.to_string())?;
    ensure!((info.bits - 1.0).abs() < 1e-9, "Bell local MI {}", info.bits);
    let global = global_optimal(&pb).unwrap();
    ensure!(global.value == Some(int(1)), "Bell global Bayes {:?}", global.value);
    ensure!((global.bits - 2.0).abs() < 1e-9, "Bell global MI {}", global.bits);
    let iso = vec![
        StateCoeffs::isotropic(2, int(1)).unwrap(),
        StateCoeffs::isotropic(2, int(0)).unwrap(),
    ];
    let pb = DiscriminationProblem::uniform(iso, Cost::BayesSuccess).unwrap();
    let local = optimal_local_bayes(&pb).map_err(|e| e.to_string())?;
    ensure!(local.value == r(5, 6) && local.sweep_value == r(5, 6), "isotropic local Bayes {}", local.value);
    Ok("Bell: local 1/2 and 1 bit, global 1 and 2 bits; isotropic pair 5/6".into())
}

fn random_operator<R: Rng>(g: &mut R, d: usize) -> BipartiteOperator {
    let m = Matrix::from_fn(d * d, |_, _| Scalar::new(random_rational(g, -2, 2, 6), random_rational(g, -2, 2, 6)));
    BipartiteOperator::new(d, m).unwrap()
}

fn hermitian_operator<R: Rng>(g: &mut R, d: usize) -> BipartiteOperator {
    let m = random_operator(g, d);
    let h = &m.matrix().clone() + &m.matrix().adjoint();
    BipartiteOperator::new(d, h).unwrap()
}

fn criterion_9() -> Outcome {
    let mut g = rng(9);
    for i in 0..1000 {
        let m = random_operator(&mut g, 2 + i % 2);
        ensure!(partial_transpose(&partial_transpose(&m)) == m, "PT is not an involution");
    }
    for kind in [
        SymmetryKind::isotropic(3).unwrap(),
        SymmetryKind::werner(3).unwrap(),
        SymmetryKind::bell(),
        SymmetryKind::oo(3).unwrap(),
    ] {
        for _ in 0..200 {
            let v = random_coeff_vector(&mut g, kind);
            ensure!(twirl_coefficients(&coeff_to_operator(&v), kind).unwrap() == v, "{kind}: twirl round-trip");
            let m = hermitian_operator(&mut g, kind.dim());
            let once = twirl_coefficients(&m, kind).unwrap();
            let twice = twirl_coefficients(&coeff_to_operator(&once), kind).unwrap();
            ensure!(once == twice, "{kind}: twirl is not idempotent");
        }
    }
    let mut extremal_checked = 0;
    for kind in [
        SymmetryKind::isotropic(3).unwrap(),
        SymmetryKind::werner(3).unwrap(),
        SymmetryKind::bell(),
        SymmetryKind::oo(3).unwrap(),
    ] {
        for n in 2..=3 {
            for v in &PovmSampler::new(kind, n).unwrap().vertices {
                ensure!(is_extremal(v).unwrap().extremal, "{kind}: catalog vertex not extremal: {v:?}");
                extremal_checked += 1;
            }
        }
        let sampler = PovmSampler::new(kind, 3).unwrap();
        for _ in 0..1000 {
            let p = sampler.feasible(&mut g, 4);
            ensure!(is_feasible(&p).unwrap().feasible, "{kind}: sample infeasible");
            match convex_decompose(&p, &sampler.vertices).map_err(|e| e.to_string())? {
                Decomposition::Found(w) => {
                    let mut acc = p.scale(&Rational::zero());
                    let mut total = Rational::zero();
                    for (i, x) in &w {
                        ensure!(x.is_positive(), "{kind}: nonpositive weight");
                        acc = acc.add_scaled(x, &sampler.vertices[*i]).unwrap();
                        total += x;
                    }
                    ensure!(acc == p && total.is_one(), "{kind}: decomposition does not reconstruct");
                }
                Decomposition::Separated { .. } => return Err(format!("{kind}: feasible POVM separated")),
            }
            let q = sampler.strict_combination(&mut g, 3).unwrap();
            ensure!(!is_extremal(&q).unwrap().extremal, "{kind}: strict combination reported extremal");
        }
    }
    Ok(format!(
        "PT involution, twirl idempotence; {extremal_checked} catalog vertices extremal; 1000 decompositions and strict combinations per family"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 OO two-outcome vertices", criterion_1),
        ("2 OO three-outcome vertices", criterion_2),
        ("3 Bell vertex enumeration", criterion_3),
        ("4 protocol exactness", criterion_4),
        ("5 pure-state sets", criterion_5),
        ("6 partial-transpose structure", criterion_6),
        ("7 no-go certificate", criterion_7),
        ("8 discrimination", criterion_8),
        ("9 property suites", criterion_9),
    ];
    let mut failed = Vec::new();
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{:.2?}]", start.elapsed()),
            Err(why) => {
                println!("FAIL  {name}: {why} [{:.2?}]", start.elapsed());
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
