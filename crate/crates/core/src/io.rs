//! JSON encodings. Rationals are always strings `"p/q"`; complex entries are
//! `[re, im]` pairs of such strings.

use serde_json::{json, Map, Value};

use crate::discrimination::{GlobalOptimum, LocalBayes, LocalInfo, StateCoeffs};
use crate::error::{Error, Result};
use crate::extremal::{ExtremalityReport, StructureReport, VertexSet};
use crate::feasible::{
    ConstraintLabel, Decomposition, Equality, FarkasCertificate, FeasibilityReport, Halfspace, Layout, LpOutcome,
    LpSolution, Polytope, SymPovm,
};
use crate::linalg::RMatrix;
use crate::nogo::{CaseFailure, LRequirementsReport, NoGoCertificate, Witness};
use crate::operators::{Matrix, SeparableTerm};
use crate::protocols::{LocalProtocol, ProtocolVerdict, PureState, PureStateSet};
use crate::scalar::{format_rational, parse_rational, Rational, Scalar};
use crate::symmetry::{CoeffVector, Family, PtMap, SymmetryKind};

pub trait ToJson {
    fn to_json(&self) -> Value;
}

pub trait FromJson: Sized {
    fn from_json(v: &Value) -> Result<Self>;
}

/// Parses JSON text into `T`.
pub fn from_str<T: FromJson>(text: &str) -> Result<T> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    T::from_json(&v)
}

/// Pretty-printed JSON text.
pub fn to_string<T: ToJson + ?Sized>(value: &T) -> String {
    serde_json::to_string_pretty(&value.to_json()).expect("JSON values always serialise")
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| Error::Parse(format!("missing field {name:?}")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Parse(format!("{what} must be an array")))
}

fn usize_field(v: &Value, name: &str) -> Result<usize> {
    field(v, name)?
        .as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| Error::Parse(format!("{name} must be a nonnegative integer")))
}

pub fn rational_json(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().expect("checked").into())),
        _ => Err(Error::Parse(format!("expected a rational string, got {v}"))),
    }
}

pub fn rationals_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_json).collect())
}

pub fn rationals_from_json(v: &Value) -> Result<Vec<Rational>> {
    array(v, "rational list")?.iter().map(rational_from_json).collect()
}

pub fn rmatrix_json(m: &[Vec<Rational>]) -> Value {
    Value::Array(m.iter().map(|r| rationals_json(r)).collect())
}

pub fn rmatrix_from_json(v: &Value) -> Result<RMatrix> {
    array(v, "matrix")?.iter().map(rationals_from_json).collect()
}

fn scalar_json(s: &Scalar) -> Value {
    json!([format_rational(&s.re), format_rational(&s.im)])
}

fn scalar_from_json(v: &Value) -> Result<Scalar> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => Ok(Scalar::new(rational_from_json(re)?, rational_from_json(im)?)),
        _ => Ok(Scalar::real(rational_from_json(v)?)),
    }
}

fn kind_json(kind: SymmetryKind, map: &mut Map<String, Value>) {
    map.insert("family".into(), json!(kind.family()));
    map.insert("dim".into(), json!(kind.dim()));
}

fn kind_from_json(v: &Value) -> Result<SymmetryKind> {
    let family: Family = field(v, "family")?
        .as_str()
        .ok_or_else(|| Error::Parse("family must be a string".into()))?
        .parse()?;
    let dim = match v.get("dim") {
        Some(_) => usize_field(v, "dim")?,
        None if family == Family::Bell => 2,
        None => return Err(Error::Parse("missing field \"dim\"".into())),
    };
    SymmetryKind::new(family, dim)
}

fn with_kind(kind: SymmetryKind, rest: Value) -> Value {
    let mut map = Map::new();
    kind_json(kind, &mut map);
    if let Value::Object(o) = rest {
        map.extend(o);
    }
    Value::Object(map)
}

impl ToJson for Matrix {
    fn to_json(&self) -> Value {
        json!({
            "dim": self.size(),
            "entries": self.rows().iter().map(|r| r.iter().map(scalar_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

impl FromJson for Matrix {
    fn from_json(v: &Value) -> Result<Self> {
        let dim = usize_field(v, "dim")?;
        let rows = array(field(v, "entries")?, "entries")?
            .iter()
            .map(|r| array(r, "row")?.iter().map(scalar_from_json).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let m = Matrix::from_rows(rows)?;
        if m.size() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: m.size() });
        }
        Ok(m)
    }
}

impl ToJson for CoeffVector {
    fn to_json(&self) -> Value {
        with_kind(self.kind, json!({ "coeffs": rationals_json(&self.coeffs) }))
    }
}

impl FromJson for CoeffVector {
    fn from_json(v: &Value) -> Result<Self> {
        CoeffVector::new(kind_from_json(v)?, rationals_from_json(field(v, "coeffs")?)?)
    }
}

fn povm_elements_json(p: &SymPovm) -> Value {
    Value::Array(p.elements.iter().map(|e| rationals_json(&e.coeffs)).collect())
}

impl ToJson for SymPovm {
    fn to_json(&self) -> Value {
        with_kind(self.kind, json!({ "elements": povm_elements_json(self) }))
    }
}

impl FromJson for SymPovm {
    fn from_json(v: &Value) -> Result<Self> {
        let kind = kind_from_json(v)?;
        let rows = array(field(v, "elements")?, "elements")?
            .iter()
            .map(rationals_from_json)
            .collect::<Result<Vec<_>>>()?;
        SymPovm::from_rows(kind, rows)
    }
}

impl ToJson for PtMap {
    fn to_json(&self) -> Value {
        json!({
            "source": self.source().to_string(),
            "target": self.target().to_string(),
            "matrix": rmatrix_json(self.matrix()),
        })
    }
}

fn label_json(l: &ConstraintLabel) -> Value {
    let mut v = serde_json::to_value(l).expect("labels serialise");
    v["text"] = json!(l.to_string());
    v
}

fn label_from_json(v: &Value) -> Result<ConstraintLabel> {
    let mut v = v.clone();
    if let Value::Object(o) = &mut v {
        o.remove("text");
    }
    serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))
}

impl ToJson for Polytope {
    fn to_json(&self) -> Value {
        let ineqs: Vec<Value> = self
            .inequalities
            .iter()
            .map(|h| json!({"row": rationals_json(&h.row), "bound": rational_json(&h.bound), "label": label_json(&h.label)}))
            .collect();
        let eqs: Vec<Value> = self
            .equalities
            .iter()
            .map(|e| json!({"row": rationals_json(&e.row), "value": rational_json(&e.value), "label": label_json(&e.label)}))
            .collect();
        let layout = self.layout.map_or(Value::Null, |l| {
            with_kind(l.kind, json!({"outcomes": l.outcomes, "eliminated": l.eliminated}))
        });
        json!({
            "ambient_dim": self.ambient_dim,
            "inequalities": ineqs,
            "equalities": eqs,
            "layout": layout,
        })
    }
}

impl FromJson for Polytope {
    fn from_json(v: &Value) -> Result<Self> {
        let ambient = usize_field(v, "ambient_dim")?;
        let ineqs = array(field(v, "inequalities")?, "inequalities")?
            .iter()
            .map(|h| {
                Ok(Halfspace {
                    row: rationals_from_json(field(h, "row")?)?,
                    bound: rational_from_json(field(h, "bound")?)?,
                    label: label_from_json(field(h, "label")?)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let eqs = array(field(v, "equalities")?, "equalities")?
            .iter()
            .map(|e| {
                Ok(Equality {
                    row: rationals_from_json(field(e, "row")?)?,
                    value: rational_from_json(field(e, "value")?)?,
                    label: label_from_json(field(e, "label")?)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut p = Polytope::new(ambient, ineqs, eqs)?;
        if let Some(l) = v.get("layout").filter(|l| !l.is_null()) {
            p.layout = Some(Layout {
                kind: kind_from_json(l)?,
                outcomes: usize_field(l, "outcomes")?,
                eliminated: field(l, "eliminated")?
                    .as_bool()
                    .ok_or_else(|| Error::Parse("eliminated must be a boolean".into()))?,
            });
        }
        Ok(p)
    }
}

impl ToJson for LpSolution {
    fn to_json(&self) -> Value {
        json!({
            "status": "optimal",
            "value": rational_json(&self.value),
            "point": rationals_json(&self.point),
            "active": self.active,
            "active_labels": self.active_labels.iter().map(label_json).collect::<Vec<_>>(),
        })
    }
}

impl ToJson for FarkasCertificate {
    fn to_json(&self) -> Value {
        json!({
            "inequality_multipliers": rationals_json(&self.inequality_multipliers),
            "equality_multipliers": rationals_json(&self.equality_multipliers),
        })
    }
}

impl ToJson for LpOutcome {
    fn to_json(&self) -> Value {
        match self {
            LpOutcome::Optimal(s) => s.to_json(),
            LpOutcome::Infeasible(c) => json!({"status": "infeasible", "certificate": c.to_json()}),
        }
    }
}

impl ToJson for FeasibilityReport {
    fn to_json(&self) -> Value {
        let violations: Vec<Value> = self
            .violations
            .iter()
            .map(|v| json!({"label": label_json(&v.label), "value": rational_json(&v.value)}))
            .collect();
        json!({"feasible": self.feasible, "violations": violations})
    }
}

impl ToJson for ExtremalityReport {
    fn to_json(&self) -> Value {
        json!({
            "extremal": self.extremal,
            "rank": self.rank,
            "required": self.required,
            "perturbation": self.perturbation.as_ref().map_or(Value::Null, povm_elements_json),
        })
    }
}

impl ToJson for Decomposition {
    fn to_json(&self) -> Value {
        match self {
            Decomposition::Found(w) => json!({
                "found": true,
                "weights": w.iter().map(|(i, x)| json!({"index": i, "weight": rational_json(x)})).collect::<Vec<_>>(),
            }),
            Decomposition::Separated { normal, offset } => json!({
                "found": false,
                "normal": rationals_json(normal),
                "offset": rational_json(offset),
            }),
        }
    }
}

impl ToJson for VertexSet {
    fn to_json(&self) -> Value {
        let classes: Vec<Value> = self
            .classes
            .iter()
            .map(|c| {
                json!({
                    "representative": povm_elements_json(&c.representative),
                    "multiplicity": c.multiplicity,
                    "active": c.active.iter().map(label_json).collect::<Vec<_>>(),
                })
            })
            .collect();
        with_kind(
            self.kind,
            json!({
                "outcomes": self.outcomes,
                "vertices": self.vertices.iter().map(povm_elements_json).collect::<Vec<_>>(),
                "classes": classes,
            }),
        )
    }
}

impl FromJson for VertexSet {
    fn from_json(v: &Value) -> Result<Self> {
        let kind = kind_from_json(v)?;
        let outcomes = usize_field(v, "outcomes")?;
        let povms = array(field(v, "vertices")?, "vertices")?
            .iter()
            .map(|p| {
                let rows = array(p, "vertex")?.iter().map(rationals_from_json).collect::<Result<Vec<_>>>()?;
                SymPovm::from_rows(kind, rows)
            })
            .collect::<Result<Vec<_>>>()?;
        VertexSet::from_povms(kind, outcomes, povms)
    }
}

impl ToJson for StructureReport {
    fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| json!({"class": c.class, "check": c.property.to_string(), "passed": c.passed, "detail": c.detail}))
            .collect();
        json!({"all_passed": self.all_passed(), "checks": checks})
    }
}

impl ToJson for PureStateSet {
    fn to_json(&self) -> Value {
        let states: Vec<Value> = self
            .states
            .iter()
            .map(|s| json!({"weight": rational_json(&s.weight), "vector": s.vector.iter().map(scalar_json).collect::<Vec<_>>()}))
            .collect();
        json!({"dim": self.dim, "states": states})
    }
}

impl FromJson for PureStateSet {
    fn from_json(v: &Value) -> Result<Self> {
        let dim = usize_field(v, "dim")?;
        let states = array(field(v, "states")?, "states")?
            .iter()
            .map(|s| {
                let vector = array(field(s, "vector")?, "vector")?
                    .iter()
                    .map(scalar_from_json)
                    .collect::<Result<Vec<_>>>()?;
                if vector.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: vector.len() });
                }
                Ok(PureState {
                    weight: rational_from_json(field(s, "weight")?)?,
                    vector,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PureStateSet { dim, states })
    }
}

impl ToJson for LocalProtocol {
    fn to_json(&self) -> Value {
        let outcomes: Vec<Value> = self
            .outcomes
            .iter()
            .map(|terms| {
                Value::Array(
                    terms
                        .iter()
                        .map(|t| json!({"w": rational_json(&t.weight), "a": t.a.to_json(), "b": t.b.to_json()}))
                        .collect(),
                )
            })
            .collect();
        json!({"twirl": self.twirl.family(), "dim": self.twirl.dim(), "outcomes": outcomes})
    }
}

impl FromJson for LocalProtocol {
    fn from_json(v: &Value) -> Result<Self> {
        let family: Family = field(v, "twirl")?
            .as_str()
            .ok_or_else(|| Error::Parse("twirl must be a string".into()))?
            .parse()?;
        let twirl = SymmetryKind::new(family, usize_field(v, "dim")?)?;
        let outcomes = array(field(v, "outcomes")?, "outcomes")?
            .iter()
            .map(|o| {
                array(o, "outcome")?
                    .iter()
                    .map(|t| {
                        let term = SeparableTerm {
                            weight: rational_from_json(field(t, "w")?)?,
                            a: Matrix::from_json(field(t, "a")?)?,
                            b: Matrix::from_json(field(t, "b")?)?,
                        };
                        if term.a.size() != twirl.dim() || term.b.size() != twirl.dim() {
                            return Err(Error::DimensionMismatch {
                                expected: twirl.dim(),
                                got: term.a.size().max(term.b.size()),
                            });
                        }
                        Ok(term)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LocalProtocol { twirl, outcomes })
    }
}

impl ToJson for ProtocolVerdict {
    fn to_json(&self) -> Value {
        let outcomes: Vec<Value> = self
            .outcomes
            .iter()
            .map(|o| {
                json!({
                    "index": o.index,
                    "expected": rationals_json(&o.expected),
                    "got": o.got.as_ref().map_or_else(|| json!(o.got_float), |g| rationals_json(g)),
                    "matches": o.matches,
                })
            })
            .collect();
        json!({
            "ok": self.ok(),
            "complete": self.complete,
            "factors_psd": self.factors_psd,
            "outcomes": outcomes,
        })
    }
}

fn witness_json(w: &Witness) -> Value {
    let mut v = match w {
        Witness::NegativeEntry { factor, row, col, value } => json!({
            "type": "negative_entry", "factor": factor.to_string(), "row": row, "col": col, "value": rational_json(value),
        }),
        Witness::RowSum { factor, row, sum } => json!({
            "type": "row_sum", "factor": factor.to_string(), "row": row, "sum": rational_json(sum),
        }),
        Witness::Singular { determinant } => json!({"type": "singular", "determinant": rational_json(determinant)}),
    };
    v["text"] = json!(w.to_string());
    v
}

fn failure_json(f: &CaseFailure) -> Value {
    match f {
        CaseFailure::Requirement(w) => witness_json(w),
        CaseFailure::VertexImageMismatch { vertex, expected, got } => json!({
            "type": "vertex_image_mismatch",
            "vertex": rationals_json(vertex),
            "expected": rationals_json(expected),
            "got": rationals_json(got),
            "text": f.to_string(),
        }),
        CaseFailure::ConflictingPlacement => json!({"type": "conflicting_placement", "text": f.to_string()}),
        CaseFailure::LpInfeasible(c) => json!({"type": "lp_infeasible", "certificate": c.to_json(), "text": f.to_string()}),
    }
}

impl ToJson for LRequirementsReport {
    fn to_json(&self) -> Value {
        let reqs: Vec<Value> = self
            .requirements()
            .iter()
            .map(|(name, r)| {
                json!({"requirement": name, "passed": r.passed, "witness": r.witness.as_ref().map_or(Value::Null, witness_json)})
            })
            .collect();
        json!({"passed": self.passed(), "requirements": reqs})
    }
}

impl ToJson for NoGoCertificate {
    fn to_json(&self) -> Value {
        let matchings: Vec<Value> = self
            .matchings
            .iter()
            .map(|m| {
                json!({
                    "assignment": m.assignment.iter().map(|(v, l)| json!({"vertex": rationals_json(v), "image": l})).collect::<Vec<_>>(),
                    "L": rmatrix_json(&m.l),
                    "passed": m.passed(),
                    "failures": m.failures.iter().map(failure_json).collect::<Vec<_>>(),
                })
            })
            .collect();
        let unit_rows: Vec<Value> = self
            .unit_row_cases
            .iter()
            .map(|c| {
                json!({
                    "placements": c.placements.iter().enumerate().map(|(j, (f, r))| json!({"unit": j, "factor": f.to_string(), "row": r})).collect::<Vec<_>>(),
                    "solution": c.solution.as_ref().map_or(Value::Null, |l| rmatrix_json(l)),
                    "failure": c.failure.as_ref().map_or(Value::Null, failure_json),
                })
            })
            .collect();
        with_kind(
            self.kind,
            json!({
                "verdict": self.verdict().to_string(),
                "matching_verdict": self.matching_verdict.to_string(),
                "unit_row_verdict": self.unit_row_verdict.to_string(),
                "r_invariants_hold": self.r_invariants_hold,
                "matchings": matchings,
                "unit_row_cases": unit_rows,
            }),
        )
    }
}

/// Reads `{"family", "dim", "states": [[p_0, ...], ...]}`.
pub fn states_from_json(v: &Value) -> Result<Vec<StateCoeffs>> {
    let kind = kind_from_json(v)?;
    array(field(v, "states")?, "states")?
        .iter()
        .map(|s| StateCoeffs::new(kind, rationals_from_json(s)?))
        .collect()
}

pub fn states_json(states: &[StateCoeffs]) -> Result<Value> {
    let first = states.first().ok_or(Error::NoOutcomes)?;
    Ok(with_kind(
        first.kind,
        json!({"states": states.iter().map(|s| rationals_json(&s.weights)).collect::<Vec<_>>()}),
    ))
}

impl ToJson for LocalBayes {
    fn to_json(&self) -> Value {
        json!({
            "value": rational_json(&self.value),
            "sweep_value": rational_json(&self.sweep_value),
            "methods_agree": self.methods_agree(),
            "optimal_povm": self.povm.to_json(),
        })
    }
}

impl ToJson for LocalInfo {
    fn to_json(&self) -> Value {
        json!({
            "value": self.bits,
            "optimal_povm": self.povm.to_json(),
            "channel": rmatrix_json(&self.channel),
        })
    }
}

impl ToJson for GlobalOptimum {
    fn to_json(&self) -> Value {
        json!({
            "value": self.value.as_ref().map_or(json!(self.bits), rational_json),
            "bits": self.bits,
            "optimal_povm": self.povm.to_json(),
            "channel": rmatrix_json(&self.channel),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::enumerate_feasible;
    use crate::feasible::build_feasible_polytope;
    use crate::protocols::{build_pure_state_set, oo_protocol, OoVertex};
    use crate::scalar::{int, ratio};

    fn roundtrip<T: ToJson + FromJson + PartialEq + std::fmt::Debug>(x: &T) {
        let text = to_string(x);
        let back: T = from_str(&text).unwrap();
        assert_eq!(&back, x);
        assert_eq!(to_string(&back), text);
    }

    #[test]
    fn coeff_vector_schema() {
        let k = SymmetryKind::oo(3).unwrap();
        let v = CoeffVector::new(k, vec![int(1), int(0), ratio(2, 5)]).unwrap();
        assert_eq!(v.to_json(), json!({"family": "OO", "dim": 3, "coeffs": ["1", "0", "2/5"]}));
        roundtrip(&v);
        let bell: CoeffVector = from_str(r#"{"family":"bell","coeffs":["1","1","0","0"]}"#).unwrap();
        assert_eq!(bell.kind, SymmetryKind::bell());
        assert!(from_str::<CoeffVector>(r#"{"family":"OO","dim":3,"coeffs":["1","0"]}"#).is_err());
    }

    #[test]
    fn matrix_schema() {
        let m = Matrix::from_rows(vec![
            vec![Scalar::real(ratio(1, 2)), Scalar::new(int(0), ratio(-1, 2))],
            vec![Scalar::new(int(0), ratio(1, 2)), Scalar::real(ratio(1, 2))],
        ])
        .unwrap();
        assert_eq!(m.to_json()["entries"][0][1], json!(["0", "-1/2"]));
        roundtrip(&m);
    }

    #[test]
    fn structured_roundtrips() {
        let k = SymmetryKind::oo(3).unwrap();
        roundtrip(&SymPovm::identity(k).padded(2));
        roundtrip(&build_feasible_polytope(k, 2).unwrap());
        roundtrip(&build_feasible_polytope(SymmetryKind::bell(), 3).unwrap());
        roundtrip(&enumerate_feasible(k, 2).unwrap());
        let set = build_pure_state_set(3).unwrap();
        roundtrip(&set);
        roundtrip(&oo_protocol(OoVertex::Triple, 3, Some(&set)).unwrap());
    }

    #[test]
    fn states_roundtrip() {
        let states = vec![StateCoeffs::bell_state(0).unwrap(), StateCoeffs::bell_state(3).unwrap()];
        let v = states_json(&states).unwrap();
        assert_eq!(states_from_json(&v).unwrap(), states);
    }

    #[test]
    fn parse_errors() {
        assert!(from_str::<SymPovm>("not json").is_err());
        assert!(from_str::<SymPovm>(r#"{"family":"OO","dim":3}"#).is_err());
        assert!(from_str::<SymPovm>(r#"{"family":"OO","dim":3,"elements":[["x","0","0"]]}"#).is_err());
    }
}
