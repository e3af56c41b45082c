//! Reproduction checks for the headline results, runnable from the CLI.

use std::time::Instant;

use rand::Rng;
use serde_json::{json, Value};

use crate::corpus::{random_coeff_vector, rng, PovmSampler};
use crate::discrimination::{
    global_optimal, optimal_local_bayes, optimal_local_info, Cost, DiscriminationProblem, StateCoeffs,
};
use crate::error::Result;
use crate::extremal::{
    catalog_extrema, check_vertex_structure, enumerate_feasible, enumerate_vertices, enumerate_vertices_oracle,
    is_extremal,
};
use crate::feasible::{build_feasible_polytope, convex_decompose, permutation_closure, Decomposition};
use crate::nogo::{naive_transform_search, naive_transform_search_for, Verdict};
use crate::operators::{is_psd, partial_transpose, Arithmetic};
use crate::protocols::{
    bell_protocol, bell_protocol_target, build_pure_state_set, isotropic_protocol, oo_protocol, oo_protocol_target,
    verify_protocol, werner_protocol, BellExtremum, OoVertex,
};
use crate::scalar::{int, ratio};
use crate::symmetry::{coeff_to_operator, pt_coefficient_map, twirl_coefficients, Family, SymmetryKind};

#[derive(Clone, Debug, PartialEq)]
pub struct ReproCheck {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReproOptions {
    /// Random samples per family for the corpus checks.
    pub samples: usize,
    pub seed: u64,
}

impl Default for ReproOptions {
    fn default() -> Self {
        Self {
            samples: 1000,
            seed: 0,
        }
    }
}

type Check = fn(&ReproOptions) -> Result<(bool, String)>;

const CHECKS: [(&str, Check); 9] = [
    ("OO two-outcome vertices match the closed forms", oo_two_outcome),
    ("OO three-outcome vertices contain one genuine triple", oo_three_outcome),
    ("Bell vertex enumeration", bell_vertices),
    ("local protocols realise their targets exactly", protocols),
    ("pure-state sets resolve the identity", pure_state_sets),
    ("coefficient and operator partial transposes agree", pt_structure),
    ("no naive OO transformation", nogo),
    ("discrimination optima", discrimination),
    ("extremality and decomposition", extremality),
];

/// Runs every check; a check that errors is reported as failed.
pub fn run(opts: &ReproOptions) -> Vec<ReproCheck> {
    CHECKS
        .iter()
        .enumerate()
        .map(|(i, (name, f))| {
            let start = Instant::now();
            let (passed, detail) = f(opts).unwrap_or_else(|e| (false, format!("error: {e}")));
            ReproCheck {
                id: i + 1,
                name,
                passed,
                detail,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

pub fn report_json(checks: &[ReproCheck]) -> Value {
    json!({
        "passed": checks.iter().all(|c| c.passed),
        "checks": checks.iter().map(|c| json!({
            "id": c.id,
            "name": c.name,
            "passed": c.passed,
            "detail": c.detail,
            "seconds": c.seconds,
        })).collect::<Vec<_>>(),
    })
}

fn oo_two_outcome(_: &ReproOptions) -> Result<(bool, String)> {
    let mut ok = true;
    for d in 3..=6 {
        let kind = SymmetryKind::oo(d)?;
        ok &= enumerate_feasible(kind, 2)?.vertices == catalog_extrema(kind, 2)?.vertices;
    }
    Ok((ok, "d = 3..6, 8 vertices each".into()))
}

fn oo_three_outcome(_: &ReproOptions) -> Result<(bool, String)> {
    let mut ok = true;
    for d in 3..=5 {
        let kind = SymmetryKind::oo(d)?;
        let vs = enumerate_feasible(kind, 3)?;
        let cat = catalog_extrema(kind, 3)?;
        let genuine = vs.classes.iter().filter(|c| c.representative.nonzero_outcomes() == 3).count();
        ok &= vs.vertices == permutation_closure(&cat.vertices, 3) && genuine == 1;
        ok &= check_vertex_structure(&vs)?.all_passed();
    }
    Ok((ok, "d = 3..5".into()))
}

fn bell_vertices(_: &ReproOptions) -> Result<(bool, String)> {
    let kind = SymmetryKind::bell();
    let mut ok = true;
    for n in 2..=3 {
        let p = build_feasible_polytope(kind, n)?;
        ok &= enumerate_vertices(&p)? == enumerate_vertices_oracle(&p)?;
    }
    let vs = enumerate_feasible(kind, 4)?;
    ok &= vs.max_nonzero_outcomes() <= 2;
    ok &= vs.vertices == permutation_closure(&catalog_extrema(kind, 4)?.vertices, 4);
    Ok((ok, format!("N = 4: {} vertices, at most 2 nonzero outcomes", vs.vertices.len())))
}

fn protocols(opts: &ReproOptions) -> Result<(bool, String)> {
    let mut g = rng(opts.seed);
    let mut ok = true;
    for family in [Family::Isotropic, Family::Werner] {
        for i in 0..opts.samples {
            let kind = SymmetryKind::new(family, 2 + i % 4)?;
            let sampler = PovmSampler::new(kind, g.gen_range(2..=4))?;
            let target = sampler.feasible(&mut g, 4);
            let p = match family {
                Family::Isotropic => isotropic_protocol(&target)?,
                _ => werner_protocol(&target)?,
            };
            ok &= verify_protocol(&p, &target, Arithmetic::Exact)?.ok();
        }
    }
    for id in BellExtremum::all() {
        ok &= verify_protocol(&bell_protocol(id)?, &bell_protocol_target(id)?, Arithmetic::Exact)?.ok();
    }
    for d in 3..=5 {
        let set = build_pure_state_set(d)?;
        for id in OoVertex::ALL {
            ok &= verify_protocol(&oo_protocol(id, d, Some(&set))?, &oo_protocol_target(id, d)?, Arithmetic::Exact)?.ok();
        }
    }
    Ok((ok, format!("{} random targets per family", opts.samples)))
}

fn pure_state_sets(_: &ReproOptions) -> Result<(bool, String)> {
    let ok = (2..=6).all(|d| build_pure_state_set(d).is_ok());
    Ok((ok, "d = 2..6".into()))
}

fn pt_structure(opts: &ReproOptions) -> Result<(bool, String)> {
    let mut ok = true;
    for d in 2..=8 {
        let m = pt_coefficient_map(SymmetryKind::oo(d)?)?;
        ok &= m.then(&m)?.is_identity();
        let iso = pt_coefficient_map(SymmetryKind::isotropic(d)?)?;
        let wer = pt_coefficient_map(SymmetryKind::werner(d)?)?;
        ok &= iso.then(&wer)?.is_identity();
    }
    let mut g = rng(opts.seed);
    for kind in [
        SymmetryKind::isotropic(3)?,
        SymmetryKind::werner(3)?,
        SymmetryKind::bell(),
        SymmetryKind::oo(3)?,
    ] {
        let map = pt_coefficient_map(kind)?;
        for _ in 0..opts.samples {
            let v = random_coeff_vector(&mut g, kind);
            let op = coeff_to_operator(&v);
            ok &= map.apply(&v)?.is_nonnegative() == is_psd(partial_transpose(&op).matrix())?;
            ok &= twirl_coefficients(&op, kind)? == v;
        }
    }
    Ok((ok, format!("R² = I for d = 2..8; {} random elements per family", opts.samples)))
}

fn nogo(_: &ReproOptions) -> Result<(bool, String)> {
    let mut ok = true;
    for d in 3..=6 {
        let c = naive_transform_search(d)?;
        ok &= c.verdict() == Verdict::Infeasible && c.routes_agree() && c.matchings.len() == 48;
    }
    let iso = naive_transform_search_for(SymmetryKind::isotropic(2)?)?;
    ok &= iso.verdict() == Verdict::Counterexample;
    Ok((ok, "OO infeasible for d = 3..6; isotropic analog feasible".into()))
}

fn discrimination(_: &ReproOptions) -> Result<(bool, String)> {
    let bell: Vec<StateCoeffs> = (0..4).map(StateCoeffs::bell_state).collect::<Result<_>>()?;
    let pb = DiscriminationProblem::uniform(bell.clone(), Cost::BayesSuccess)?;
    let local = optimal_local_bayes(&pb)?;
    let info = optimal_local_info(&DiscriminationProblem::uniform(bell, Cost::MutualInformation)?)?;
    let global = global_optimal(&pb)?;
    let iso = DiscriminationProblem::uniform(
        vec![StateCoeffs::isotropic(2, int(1))?, StateCoeffs::isotropic(2, int(0))?],
        Cost::BayesSuccess,
    )?;
    let iso_local = optimal_local_bayes(&iso)?;
    let ok = local.value == ratio(1, 2)
        && local.methods_agree()
        && (info.bits - 1.0).abs() < 1e-9
        && global.value == Some(int(1))
        && (global.bits - 2.0).abs() < 1e-9
        && iso_local.value == ratio(5, 6)
        && iso_local.methods_agree();
    Ok((
        ok,
        format!(
            "Bell local {} / {:.6} bits, global {} / {:.6} bits; isotropic pair {}",
            local.value,
            info.bits,
            global.value.map(|v| v.to_string()).unwrap_or_default(),
            global.bits,
            iso_local.value
        ),
    ))
}

fn extremality(opts: &ReproOptions) -> Result<(bool, String)> {
    let mut g = rng(opts.seed);
    let mut ok = true;
    for kind in [
        SymmetryKind::isotropic(3)?,
        SymmetryKind::werner(3)?,
        SymmetryKind::bell(),
        SymmetryKind::oo(3)?,
    ] {
        let sampler = PovmSampler::new(kind, 3)?;
        for v in &sampler.vertices {
            ok &= is_extremal(v)?.extremal;
        }
        for _ in 0..opts.samples {
            let p = sampler.feasible(&mut g, 4);
            ok &= matches!(convex_decompose(&p, &sampler.vertices)?, Decomposition::Found(_));
            if let Some(q) = sampler.strict_combination(&mut g, 3) {
                ok &= !is_extremal(&q)?.extremal;
            }
        }
    }
    Ok((ok, format!("{} samples per family", opts.samples)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes() {
        let checks = run(&ReproOptions { samples: 5, seed: 3 });
        assert_eq!(checks.len(), 9);
        for c in &checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
        assert_eq!(report_json(&checks)["passed"], json!(true));
    }
}
