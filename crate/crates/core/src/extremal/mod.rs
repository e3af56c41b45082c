//! Vertex enumeration, extremality certificates and closed-form catalogs of
//! extremal feasible POVMs.

mod basic;
mod bruteforce;
mod catalog;
mod dd;

pub use basic::{
    basic_vectors, check_vertex_structure, decompose_into_basic, BasicVectorSet, StructureCheck, StructureKind,
    StructureReport,
};
pub use bruteforce::brute_force_vertices;
pub use catalog::{bell_split, catalog_extrema, oo_triple, oo_two_outcome_elements, twirl_pair_element};
pub use dd::double_description;

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::feasible::{build_feasible_polytope, build_feasible_polytope_with, is_feasible, ConstraintLabel, Polytope, SymPovm};
use crate::linalg::{dot, kernel, rank};
use crate::scalar::Rational;
use crate::symmetry::SymmetryKind;

/// Vertices equal up to relabelling of outcomes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexClass {
    /// Outcomes sorted lexicographically.
    pub representative: SymPovm,
    /// Number of labelled vertices in the class.
    pub multiplicity: usize,
    /// Inequalities of the full (uneliminated) polytope active at the representative.
    pub active: Vec<ConstraintLabel>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSet {
    pub kind: SymmetryKind,
    pub outcomes: usize,
    /// Every labelled vertex, sorted.
    pub vertices: Vec<SymPovm>,
    pub classes: Vec<VertexClass>,
}

impl VertexSet {
    pub fn from_povms(kind: SymmetryKind, outcomes: usize, mut povms: Vec<SymPovm>) -> Result<Self> {
        povms.sort();
        povms.dedup();
        let full = build_feasible_polytope_with(kind, outcomes, false)?;
        let mut groups: BTreeMap<SymPovm, usize> = BTreeMap::new();
        for p in &povms {
            if p.n_outcomes() != outcomes {
                return Err(Error::DimensionMismatch {
                    expected: outcomes,
                    got: p.n_outcomes(),
                });
            }
            *groups.entry(p.canonical()).or_default() += 1;
        }
        let classes = groups
            .into_iter()
            .map(|(representative, multiplicity)| {
                let x = representative.flatten();
                let active = full
                    .active_set(&x)
                    .into_iter()
                    .map(|i| full.inequalities[i].label.clone())
                    .collect();
                VertexClass {
                    representative,
                    multiplicity,
                    active,
                }
            })
            .collect();
        Ok(Self {
            kind,
            outcomes,
            vertices: povms,
            classes,
        })
    }

    /// Largest number of nonzero outcomes over all vertices.
    pub fn max_nonzero_outcomes(&self) -> usize {
        self.vertices.iter().map(SymPovm::nonzero_outcomes).max().unwrap_or(0)
    }
}

fn to_vertex_set(p: &Polytope, points: Vec<Vec<Rational>>) -> Result<VertexSet> {
    let layout = p
        .layout
        .ok_or_else(|| Error::Internal("polytope has no POVM layout".into()))?;
    let povms = points
        .iter()
        .map(|x| layout.point_to_povm(x))
        .collect::<Result<Vec<_>>>()?;
    VertexSet::from_povms(layout.kind, layout.outcomes, povms)
}

/// Vertices of a feasible-POVM polytope by double description.
pub fn enumerate_vertices(p: &Polytope) -> Result<VertexSet> {
    to_vertex_set(p, double_description(p)?)
}

/// Vertices of a feasible-POVM polytope by exhaustive active-set search.
pub fn enumerate_vertices_oracle(p: &Polytope) -> Result<VertexSet> {
    to_vertex_set(p, brute_force_vertices(p)?)
}

/// All extremal feasible POVMs of `kind` with `outcomes` outcomes.
pub fn enumerate_feasible(kind: SymmetryKind, outcomes: usize) -> Result<VertexSet> {
    enumerate_vertices(&build_feasible_polytope(kind, outcomes)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremalityReport {
    pub extremal: bool,
    /// Rank of the active inequalities together with the equalities.
    pub rank: usize,
    /// Ambient dimension that the rank has to reach.
    pub required: usize,
    /// When not extremal: `δ` with both `p + δ` and `p - δ` feasible.
    pub perturbation: Option<SymPovm>,
}

/// Decides extremality from the rank of the active constraints.
pub fn is_extremal(p: &SymPovm) -> Result<ExtremalityReport> {
    let report = is_feasible(p)?;
    if !report.feasible {
        let first = report.violations.first().map(|v| v.label.to_string()).unwrap_or_default();
        return Err(Error::Infeasible(first));
    }
    let poly = build_feasible_polytope_with(p.kind, p.n_outcomes(), false)?;
    let x = p.flatten();
    let active = poly.active_set(&x);
    let mut rows: Vec<Vec<Rational>> = poly.equalities.iter().map(|e| e.row.clone()).collect();
    rows.extend(active.iter().map(|&i| poly.inequalities[i].row.clone()));
    let required = poly.ambient_dim;
    let r = rank(&rows, required);
    if r == required {
        return Ok(ExtremalityReport {
            extremal: true,
            rank: r,
            required,
            perturbation: None,
        });
    }
    let dir = kernel(&rows, required)
        .into_iter()
        .next()
        .ok_or_else(|| Error::Internal("rank deficient without kernel".into()))?;
    // Largest s with slack_i >= s·|row_i·δ| for all inactive rows.
    let mut scale: Option<Rational> = None;
    for (i, h) in poly.inequalities.iter().enumerate() {
        if active.contains(&i) {
            continue;
        }
        let rate = dot(&h.row, &dir).abs();
        if rate.is_zero() {
            continue;
        }
        let s = h.slack(&x) / rate;
        if scale.as_ref().is_none_or(|c| s < *c) {
            scale = Some(s);
        }
    }
    let scale = scale.ok_or(Error::UnboundedPolytope)?;
    let delta: Vec<Rational> = dir.iter().map(|v| v * &scale).collect();
    let layout = poly.layout.expect("feasible polytope has a layout");
    Ok(ExtremalityReport {
        extremal: false,
        rank: r,
        required,
        perturbation: Some(layout.point_to_povm(&delta)?),
    })
}
