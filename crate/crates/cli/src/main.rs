use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sympovm::discrimination::{
    global_optimal, optimal_local_bayes, optimal_local_info, Cost, DiscriminationProblem,
};
use sympovm::extremal::{
    catalog_extrema, check_vertex_structure, decompose_into_basic, enumerate_vertices, enumerate_vertices_oracle,
    is_extremal, oo_triple, oo_two_outcome_elements, VertexSet,
};
use sympovm::feasible::{build_feasible_polytope, convex_decompose, is_feasible, permutation_closure, Decomposition, SymPovm};
use sympovm::io::{
    rational_json, rationals_json, rmatrix_from_json, states_from_json, to_string, FromJson, ToJson,
};
use sympovm::nogo::{naive_transform_search_for, Verdict};
use sympovm::operators::{Arithmetic, DEFAULT_EPS};
use sympovm::protocols::{
    bell_protocol, build_pure_state_set, isotropic_protocol, oo_protocol, verify_protocol, werner_protocol,
    BellExtremum, LocalProtocol, OoVertex,
};
use sympovm::repro::{report_json, run, ReproOptions};
use sympovm::scalar::{format_rational, parse_rational, Rational};
use sympovm::symmetry::{commutant_basis, pt_coefficient_map, CoeffVector, Family, SymmetryKind};
use sympovm::Error;

#[derive(Parser, Debug)]
#[command(name = "sympovm", version, about = "Exact analysis of symmetric bipartite POVMs")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Symmetry family: isotropic, werner, bell or oo.
    #[arg(long, global = true)]
    family: Option<Family>,
    /// Local dimension d (defaults to 2 for bell).
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Number of POVM outcomes.
    #[arg(long, global = true)]
    outcomes: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Shorthand for --format json.
    #[arg(long, global = true)]
    json: bool,
    /// Exact rational arithmetic (default).
    #[arg(long, global = true, conflicts_with = "float")]
    exact: bool,
    /// Floating-point checks with tolerance --eps.
    #[arg(long, global = true)]
    float: bool,
    #[arg(long, global = true, default_value_t = DEFAULT_EPS)]
    eps: f64,
    /// Seed for random corpora.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Commutant projectors, their traces and the partial-transpose map.
    Basis {
        /// Include the projector matrices.
        #[arg(long)]
        matrices: bool,
    },
    /// Feasibility (and optionally extremality) of a POVM.
    Check {
        #[arg(long)]
        povm: PathBuf,
        #[arg(long)]
        extremal: bool,
    },
    /// Vertices of the feasible polytope by enumeration.
    Vertices {
        /// Use the exhaustive active-set oracle instead of double description.
        #[arg(long)]
        oracle: bool,
        /// Also run the structural checks on each vertex class.
        #[arg(long)]
        structure: bool,
    },
    /// Closed-form extremal POVMs.
    Extrema,
    /// Convex decomposition of a POVM into extrema, or of an element into basic vectors.
    Decompose {
        #[arg(long, conflicts_with = "element")]
        povm: Option<PathBuf>,
        #[arg(long)]
        element: Option<PathBuf>,
    },
    /// Local protocol for a target POVM or a named extremum.
    ProtocolSynth {
        /// Isotropic or Werner target POVM.
        #[arg(long)]
        target: Option<PathBuf>,
        /// Bell: "identity" or two component labels such as "Psi+,Phi-"; OO: A, B, C, D or triple.
        #[arg(long)]
        extremum: Option<String>,
    },
    /// Twirls a protocol and compares it with a target POVM.
    ProtocolVerify {
        #[arg(long)]
        protocol: PathBuf,
        #[arg(long)]
        target: PathBuf,
    },
    /// Weighted pure-state set used by the OO protocols.
    StateSet,
    /// Search for a naive coefficient transformation (OO by default).
    Nogo,
    /// Optimal local or global discrimination.
    Discriminate {
        #[arg(long)]
        states: PathBuf,
        /// Comma-separated priors; uniform when omitted.
        #[arg(long)]
        priors: Option<String>,
        /// bayes, info, or a path to a JSON cost matrix C[guess][state].
        #[arg(long, default_value = "bayes")]
        cost: String,
        #[arg(long, value_enum, default_value_t = Mode::Local)]
        mode: Mode,
    },
    /// Runs the reproduction checks and prints a report.
    Repro {
        /// Random samples per family.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Local,
    Global,
}

enum Fail {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

struct Output {
    text: String,
    /// Exit code 1 marks an infeasible or mismatching result.
    negative: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, negative: false }
    }
}

type CmdResult = Result<Output, Fail>;

impl Common {
    fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else {
            self.format
        }
    }

    fn arithmetic(&self) -> Arithmetic {
        if self.float {
            Arithmetic::Float { eps: self.eps }
        } else {
            Arithmetic::Exact
        }
    }

    fn family(&self) -> Result<Family, Fail> {
        self.family.ok_or_else(|| Fail::Usage("--family is required".into()))
    }

    fn kind(&self) -> Result<SymmetryKind, Fail> {
        let family = self.family()?;
        let dim = match (self.dim, family) {
            (Some(d), _) => d,
            (None, Family::Bell) => 2,
            (None, _) => return Err(Fail::Usage(format!("--dim is required for family {family}"))),
        };
        SymmetryKind::new(family, dim).map_err(|e| Fail::Usage(format!("--dim: {e}")))
    }

    fn outcomes(&self) -> Result<usize, Fail> {
        match self.outcomes {
            Some(0) => Err(Fail::Usage("--outcomes must be at least 1".into())),
            Some(n) => Ok(n),
            None => Err(Fail::Usage("--outcomes is required".into())),
        }
    }

    fn require_json(&self, command: &str) -> Result<(), Fail> {
        if self.format() == Format::Csv {
            return Err(Fail::Usage(format!("--format csv is not supported by {command}")));
        }
        Ok(())
    }
}

fn read_json(path: &Path, flag: &str) -> Result<Value, Fail> {
    let text = fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{flag}: cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Fail::Usage(format!("{flag}: invalid JSON in {}: {e}", path.display())))
}

fn parse_file<T: FromJson>(path: &Path, flag: &str) -> Result<T, Fail> {
    T::from_json(&read_json(path, flag)?).map_err(|e| Fail::Usage(format!("{flag}: {e}")))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values always serialise")
}

fn csv_row<I: IntoIterator<Item = String>>(cells: I) -> String {
    cells.into_iter().collect::<Vec<_>>().join(",")
}

fn basis(c: &Common, matrices: bool) -> CmdResult {
    let kind = c.kind()?;
    let b = commutant_basis(kind);
    let map = pt_coefficient_map(kind)?;
    let labels = kind.family().component_labels();
    match c.format() {
        Format::Json => {
            let components: Vec<Value> = labels
                .iter()
                .zip(&b.traces)
                .zip(&b.projectors)
                .map(|((l, t), p)| {
                    let mut v = json!({"label": l, "trace": rational_json(t)});
                    if matrices {
                        v["matrix"] = p.matrix().to_json();
                    }
                    v
                })
                .collect();
            Ok(Output::ok(pretty(&json!({
                "family": kind.family(),
                "dim": kind.dim(),
                "components": components,
                "pt_map": map.to_json(),
            }))))
        }
        Format::Csv => {
            let target = kind.pt_target().family().component_labels();
            let mut lines = vec![csv_row(
                ["component", "trace"].iter().map(|s| s.to_string()).chain(target.iter().map(|t| format!("PT->{t}"))),
            )];
            for (j, l) in labels.iter().enumerate() {
                // Column j of the map is the image of basis element j.
                lines.push(csv_row(
                    [l.to_string(), format_rational(&b.traces[j])]
                        .into_iter()
                        .chain(map.matrix().iter().map(|row| format_rational(&row[j]))),
                ));
            }
            Ok(Output::ok(lines.join("\n")))
        }
    }
}

fn check(c: &Common, path: &Path, extremal: bool) -> CmdResult {
    c.require_json("check")?;
    let p: SymPovm = parse_file(path, "--povm")?;
    let report = is_feasible(&p)?;
    let mut v = report.to_json();
    if report.feasible && extremal {
        v["extremality"] = is_extremal(&p)?.to_json();
    }
    Ok(Output {
        text: pretty(&v),
        negative: !report.feasible,
    })
}

/// Names of known closed-form elements, for table output.
fn element_names(kind: SymmetryKind) -> Vec<(String, CoeffVector)> {
    if kind.family() != Family::OO {
        return Vec::new();
    }
    let mut names: Vec<(String, CoeffVector)> = oo_two_outcome_elements(kind.dim())
        .map(|v| v.into_iter().map(|(l, e)| (l.to_string(), e)).collect())
        .unwrap_or_default();
    if let Ok(t) = oo_triple(kind.dim()) {
        for (i, e) in t.into_iter().enumerate() {
            if !names.iter().any(|(_, x)| *x == e) {
                names.push((format!("M{}", i + 1), e));
            }
        }
    }
    names
}

fn vertex_table(vs: &VertexSet) -> String {
    let labels = vs.kind.family().component_labels();
    let names = element_names(vs.kind);
    let mut lines = vec![csv_row(
        ["class", "multiplicity", "outcome", "name"]
            .iter()
            .map(|s| s.to_string())
            .chain(labels.iter().map(|s| s.to_string())),
    )];
    for (i, class) in vs.classes.iter().enumerate() {
        for (k, e) in class.representative.elements.iter().enumerate() {
            let name = names.iter().find(|(_, x)| x == e).map(|(n, _)| n.clone()).unwrap_or_default();
            lines.push(csv_row(
                [(i + 1).to_string(), class.multiplicity.to_string(), (k + 1).to_string(), name]
                    .into_iter()
                    .chain(e.coeffs.iter().map(format_rational)),
            ));
        }
    }
    lines.join("\n")
}

fn vertices_output(c: &Common, vs: &VertexSet, extra: Option<Value>) -> CmdResult {
    match c.format() {
        Format::Json => {
            let mut v = vs.to_json();
            if let Some(x) = extra {
                v["structure"] = x;
            }
            Ok(Output::ok(pretty(&v)))
        }
        Format::Csv => Ok(Output::ok(vertex_table(vs))),
    }
}

fn vertices(c: &Common, oracle: bool, structure: bool) -> CmdResult {
    let kind = c.kind()?;
    let p = build_feasible_polytope(kind, c.outcomes()?)?;
    let vs = if oracle {
        enumerate_vertices_oracle(&p)?
    } else {
        enumerate_vertices(&p)?
    };
    let report = if structure { Some(check_vertex_structure(&vs)?) } else { None };
    let negative = report.as_ref().is_some_and(|r| !r.all_passed());
    let mut out = vertices_output(c, &vs, report.map(|r| r.to_json()))?;
    out.negative = negative;
    Ok(out)
}

fn extrema(c: &Common) -> CmdResult {
    let kind = c.kind()?;
    let n = c.outcomes()?;
    let cat = catalog_extrema(kind, n)?;
    let closed = VertexSet::from_povms(kind, n, permutation_closure(&cat.vertices, n))?;
    vertices_output(c, &closed, None)
}

fn decompose(c: &Common, povm: Option<&Path>, element: Option<&Path>) -> CmdResult {
    c.require_json("decompose")?;
    if let Some(path) = element {
        let v: CoeffVector = parse_file(path, "--element")?;
        return match decompose_into_basic(&v) {
            Ok(w) => {
                let basic = sympovm::extremal::basic_vectors(v.kind)?;
                let terms: Vec<Value> = w
                    .iter()
                    .map(|(i, x)| json!({"basic": rationals_json(&basic.vectors[*i].coeffs), "weight": rational_json(x)}))
                    .collect();
                Ok(Output::ok(pretty(&json!({"found": true, "terms": terms}))))
            }
            Err(Error::Infeasible(why)) => Ok(Output {
                text: pretty(&json!({"found": false, "reason": why})),
                negative: true,
            }),
            Err(e) => Err(e.into()),
        };
    }
    let path = povm.ok_or_else(|| Fail::Usage("one of --povm or --element is required".into()))?;
    let p: SymPovm = parse_file(path, "--povm")?;
    let n = p.n_outcomes();
    let candidates = permutation_closure(&catalog_extrema(p.kind, n)?.vertices, n);
    let d = convex_decompose(&p, &candidates)?;
    let mut v = d.to_json();
    if let (Decomposition::Found(w), Some(arr)) = (&d, v.get_mut("weights").and_then(Value::as_array_mut)) {
        for ((i, _), entry) in w.iter().zip(arr.iter_mut()) {
            entry["vertex"] = candidates[*i].to_json()["elements"].clone();
        }
    }
    Ok(Output {
        text: pretty(&v),
        negative: matches!(d, Decomposition::Separated { .. }),
    })
}

fn protocol_synth(c: &Common, target: Option<&Path>, extremum: Option<&str>) -> CmdResult {
    c.require_json("protocol-synth")?;
    let protocol: LocalProtocol = if let Some(path) = target {
        let t: SymPovm = parse_file(path, "--target")?;
        let r = match t.kind.family() {
            Family::Isotropic => isotropic_protocol(&t),
            Family::Werner => werner_protocol(&t),
            f => {
                return Err(Fail::Usage(format!(
                    "--target: {f} targets are synthesised from --extremum, not from a POVM file"
                )))
            }
        };
        match r {
            Ok(p) => p,
            Err(Error::Infeasible(why)) => {
                return Ok(Output {
                    text: pretty(&json!({"synthesised": false, "reason": why})),
                    negative: true,
                })
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        let name = extremum.ok_or_else(|| Fail::Usage("one of --target or --extremum is required".into()))?;
        let kind = c.kind()?;
        match kind.family() {
            Family::Bell => {
                let id: BellExtremum = name.parse().map_err(|e: Error| Fail::Usage(format!("--extremum: {e}")))?;
                bell_protocol(id)?
            }
            Family::OO => {
                let id: OoVertex = name.parse().map_err(|e: Error| Fail::Usage(format!("--extremum: {e}")))?;
                let set = build_pure_state_set(kind.dim())?;
                oo_protocol(id, kind.dim(), Some(&set))?
            }
            f => return Err(Fail::Usage(format!("--extremum applies to bell and oo, not {f}"))),
        }
    };
    Ok(Output::ok(to_string(&protocol)))
}

fn protocol_verify(c: &Common, protocol: &Path, target: &Path) -> CmdResult {
    c.require_json("protocol-verify")?;
    let p: LocalProtocol = parse_file(protocol, "--protocol")?;
    let t: SymPovm = parse_file(target, "--target")?;
    let verdict = verify_protocol(&p, &t, c.arithmetic())?;
    Ok(Output {
        text: to_string(&verdict),
        negative: !verdict.ok(),
    })
}

fn state_set(c: &Common) -> CmdResult {
    let d = c.dim.ok_or_else(|| Fail::Usage("--dim is required".into()))?;
    let set = build_pure_state_set(d).map_err(|e| Fail::Usage(format!("--dim: {e}")))?;
    match c.format() {
        Format::Json => Ok(Output::ok(to_string(&set))),
        Format::Csv => {
            let mut lines = vec![csv_row(
                std::iter::once("weight".to_string())
                    .chain((0..d).flat_map(|j| [format!("re{j}"), format!("im{j}")])),
            )];
            for s in &set.states {
                lines.push(csv_row(
                    std::iter::once(format_rational(&s.weight))
                        .chain(s.vector.iter().flat_map(|x| [format_rational(&x.re), format_rational(&x.im)])),
                ));
            }
            Ok(Output::ok(lines.join("\n")))
        }
    }
}

fn nogo(c: &Common) -> CmdResult {
    let kind = match c.family {
        None => SymmetryKind::oo(c.dim.ok_or_else(|| Fail::Usage("--dim is required".into()))?)
            .map_err(|e| Fail::Usage(format!("--dim: {e}")))?,
        Some(_) => c.kind()?,
    };
    let cert = naive_transform_search_for(kind).map_err(|e| match e {
        Error::KindMismatch { .. } => Fail::Usage(format!("--family: {e}")),
        e => Fail::Lib(e),
    })?;
    let text = match c.format() {
        Format::Json => to_string(&cert),
        Format::Csv => {
            let mut lines = vec!["route,case,passed,reason".to_string()];
            for (i, m) in cert.matchings.iter().enumerate() {
                let reason = m.failures.first().map(ToString::to_string).unwrap_or_default();
                lines.push(csv_row([
                    "matching".into(),
                    (i + 1).to_string(),
                    m.passed().to_string(),
                    reason.replace(',', ";"),
                ]));
            }
            for (i, u) in cert.unit_row_cases.iter().enumerate() {
                let reason = u.failure.as_ref().map(ToString::to_string).unwrap_or_default();
                lines.push(csv_row([
                    "unit-row".into(),
                    (i + 1).to_string(),
                    u.failure.is_none().to_string(),
                    reason.replace(',', ";"),
                ]));
            }
            lines.join("\n")
        }
    };
    // The certificate is the product; only a split verdict is a failure.
    Ok(Output {
        text,
        negative: !cert.routes_agree() || (kind.family() == Family::OO && cert.verdict() != Verdict::Infeasible),
    })
}

fn parse_priors(text: &str, m: usize) -> Result<Vec<Rational>, Fail> {
    let priors = text
        .split(',')
        .map(parse_rational)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Fail::Usage(format!("--priors: {e}")))?;
    if priors.len() != m {
        return Err(Fail::Usage(format!("--priors: {} values for {m} states", priors.len())));
    }
    Ok(priors)
}

fn discriminate(c: &Common, states: &Path, priors: Option<&str>, cost: &str, mode: Mode) -> CmdResult {
    c.require_json("discriminate")?;
    let states = states_from_json(&read_json(states, "--states")?).map_err(|e| Fail::Usage(format!("--states: {e}")))?;
    let cost = match cost {
        "bayes" => Cost::BayesSuccess,
        "info" => Cost::MutualInformation,
        path => {
            let v = read_json(Path::new(path), "--cost")?;
            Cost::Matrix(rmatrix_from_json(v.get("cost").unwrap_or(&v)).map_err(|e| Fail::Usage(format!("--cost: {e}")))?)
        }
    };
    let m = states.len();
    let problem = match priors {
        Some(p) => DiscriminationProblem::new(states, parse_priors(p, m)?, cost),
        None => DiscriminationProblem::uniform(states, cost),
    }
    .map_err(|e| Fail::Usage(format!("problem: {e}")))?;
    let v = match (mode, &problem.cost) {
        (Mode::Global, _) => global_optimal(&problem)?.to_json(),
        (Mode::Local, Cost::MutualInformation) => optimal_local_info(&problem)?.to_json(),
        (Mode::Local, _) => {
            let r = optimal_local_bayes(&problem)?;
            let mut v = r.to_json();
            v["channel"] = sympovm::io::rmatrix_json(&problem.channel(&r.povm)?);
            v
        }
    };
    Ok(Output::ok(pretty(&v)))
}

fn repro(c: &Common, samples: usize, out: Option<&Path>) -> CmdResult {
    c.require_json("repro")?;
    let checks = run(&ReproOptions { samples, seed: c.seed });
    let v = report_json(&checks);
    let text = pretty(&v);
    if let Some(path) = out {
        fs::write(path, &text).map_err(|e| Fail::Usage(format!("--out: cannot write {}: {e}", path.display())))?;
    }
    Ok(Output {
        text,
        negative: !checks.iter().all(|c| c.passed),
    })
}

fn dispatch(cli: &Cli) -> CmdResult {
    let c = &cli.common;
    match &cli.command {
        Command::Basis { matrices } => basis(c, *matrices),
        Command::Check { povm, extremal } => check(c, povm, *extremal),
        Command::Vertices { oracle, structure } => vertices(c, *oracle, *structure),
        Command::Extrema => extrema(c),
        Command::Decompose { povm, element } => decompose(c, povm.as_deref(), element.as_deref()),
        Command::ProtocolSynth { target, extremum } => protocol_synth(c, target.as_deref(), extremum.as_deref()),
        Command::ProtocolVerify { protocol, target } => protocol_verify(c, protocol, target),
        Command::StateSet => state_set(c),
        Command::Nogo => nogo(c),
        Command::Discriminate {
            states,
            priors,
            cost,
            mode,
        } => discriminate(c, states, priors.as_deref(), cost, *mode),
        Command::Repro { samples, out } => repro(c, *samples, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(out) => {
            // A closed pipe (e.g. `| head`) is not an error.
            let _ = writeln!(std::io::stdout().lock(), "{}", out.text);
            ExitCode::from(u8::from(out.negative))
        }
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Fail::Lib(e)) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Infeasible(_) | Error::EmptyPolytope | Error::Unbounded => 1,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}
