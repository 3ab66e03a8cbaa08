use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use ctxkit_core::graph_invariants::{self as gi, WeightedGraph};
use ctxkit_core::lp::LP_TOL;
use ctxkit_core::models::{self, ModelJson};
use ctxkit_core::ontomodels::{self as om, ToyAxis, ToyState};
use ctxkit_core::pps_weak::{self as pps, PPS_TOL};
use ctxkit_core::quantum_kernel::{self as qk, HermitianOp};
use ctxkit_core::scenario::{self as sc, Scenario};
use ctxkit_core::sheaf::{self, TableJson};

use crate::report::{Failure, Input, Outcome, Report, EXIT_PARSE, EXIT_UNKNOWN, EXIT_VALIDATION};
use crate::{Cli, Command, NcTarget, ToyAction};

pub fn run(cli: &Cli, command: Vec<String>) -> Outcome<Report> {
    let (inputs, tolerances, results) = match &cli.command {
        Command::Classify { file, preset } => classify(file.as_deref(), preset.as_deref())?,
        Command::Invariants { file, preset } => invariants(file.as_deref(), preset.as_deref())?,
        Command::Inequality { preset } => inequality(preset)?,
        Command::Paradox { name, weak, toy } => paradox(name, *weak, *toy)?,
        Command::Ncbound { target, vectors } => ncbound(*target, vectors.as_deref())?,
        Command::Toy { action, state, axes, trials } => toy(*action, state, axes, *trials, cli.seed)?,
        Command::Scenario { file, preset } => scenario(file.as_deref(), preset.as_deref())?,
    };
    Ok(Report { command, inputs, seed: cli.seed, tolerances, results })
}

type Tolerances = Vec<(&'static str, f64)>;
type Produced = (Vec<Input>, Tolerances, Value);

fn read_file(path: &Path) -> Outcome<Input> {
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::new(EXIT_UNKNOWN, format!("cannot read {}: {e}", path.display())))?;
    Ok(Input::File { path: path.display().to_string(), bytes })
}

fn bytes(input: &Input) -> &[u8] {
    match input {
        Input::File { bytes, .. } => bytes,
        _ => &[],
    }
}

/// Syntax errors are parse failures; a well-formed document of the wrong
/// shape is a validation failure.
fn parse_json<T: DeserializeOwned>(input: &Input) -> Outcome<T> {
    let v: Value = serde_json::from_slice(bytes(input))
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", input.describe())))?;
    serde_json::from_value(v).map_err(|e| Failure::new(EXIT_VALIDATION, format!("{}: {e}", input.describe())))
}

fn source<'a>(file: Option<&'a Path>, preset: Option<&'a str>) -> Outcome<Result<&'a Path, &'a str>> {
    match (file, preset) {
        (Some(f), None) => Ok(Ok(f)),
        (None, Some(p)) => Ok(Err(p)),
        (Some(_), Some(_)) => Err(Failure::new(EXIT_PARSE, "give either a file or --preset, not both")),
        (None, None) => Err(Failure::new(EXIT_PARSE, "a file or --preset is required")),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn unknown(kind: &str, name: &str) -> Failure {
    Failure::new(EXIT_UNKNOWN, format!("unknown {kind} {name:?}"))
}

// ---------------------------------------------------------------------------

fn classify(file: Option<&Path>, preset: Option<&str>) -> Outcome<Produced> {
    let (input, table) = match source(file, preset)? {
        Ok(path) => {
            let input = read_file(path)?;
            let t = parse_json::<TableJson>(&input)?.into_table()?;
            (input, t)
        }
        Err(name) => (Input::Preset(name.into()), sheaf::paradox_table(name)?),
    };
    let v = sheaf::classify(&table)?;
    let contexts: Vec<String> = (0..table.cover.contexts.len()).map(|k| table.cover.context_label(k)).collect();
    let results = json!({
        "observables": table.cover.observables,
        "contexts": contexts,
        "level": v.level,
        "witness": v.witness().map(|s| s.to_string()),
        "non_extendable": v.non_extendable.iter().map(|s| json!({
            "context": contexts[s.context],
            "section": s.to_string(),
        })).collect::<Vec<_>>(),
        "global_sections": v.global_sections,
        "global_weights": v.global_weights,
        "farkas": v.farkas,
    });
    let tol = vec![
        ("row", sheaf::ROW_TOL),
        ("support", sheaf::SUPPORT_TOL),
        ("global", sheaf::GLOBAL_TOL),
        ("lp", LP_TOL),
    ];
    Ok((vec![input], tol, results))
}

fn graph_preset(name: &str) -> Outcome<WeightedGraph> {
    if name == "chsh" {
        return Ok(gi::chsh_graph());
    }
    let size = |rest: &str, min: usize| -> Option<usize> { rest.parse().ok().filter(|&n| n >= min && n <= 64) };
    let g = match name.split_at(name.len().min(1)) {
        ("c", rest) => size(rest, 3).map(gi::cycle_graph),
        ("k", rest) => size(rest, 1).map(gi::complete_graph),
        ("e", rest) => size(rest, 1).map(|n| WeightedGraph::unweighted(n, vec![]).expect("edgeless graph")),
        _ => None,
    };
    g.ok_or_else(|| unknown("graph preset", name))
}

fn invariants(file: Option<&Path>, preset: Option<&str>) -> Outcome<Produced> {
    let (input, g) = match source(file, preset)? {
        Ok(path) => {
            let input = read_file(path)?;
            let g = parse_json::<WeightedGraph>(&input)?.validated()?;
            (input, g)
        }
        Err(name) => (Input::Preset(name.into()), graph_preset(name)?),
    };
    let r = gi::csw_report(&g)?;
    let results = json!({
        "n": g.n,
        "edges": g.edges.len(),
        "alpha": r.alpha,
        "theta": r.theta,
        "witness": r.witness,
    });
    Ok((vec![input], vec![("theta", gi::THETA_TOL)], results))
}

fn inequality(preset: &str) -> Outcome<Produced> {
    let results = match preset {
        "kcbs" => {
            let k = qk::kcbs_realization();
            let csw = gi::csw_report(&gi::cycle_graph(5))?;
            json!({
                "classical_bound": csw.alpha,
                "quantum_bound": csw.theta,
                "quantum_value": k.beta,
                "violated": k.beta > csw.alpha + PPS_TOL,
                "realization": to_json(&k),
            })
        }
        "chsh" => {
            let t = sheaf::chsh_table();
            let csw = gi::csw_report(&gi::chsh_graph())?;
            let v = sheaf::classify(&t)?;
            let value = sheaf::chsh_sum(&t);
            json!({
                "classical_bound": csw.alpha,
                "quantum_bound": csw.theta,
                "quantum_value": value,
                "violated": value > csw.alpha + PPS_TOL,
                "level": v.level,
            })
        }
        "mermin-peres" => {
            let sq = qk::mermin_peres_square();
            let rho = HermitianOp::new(qk::identity(4) * qk::r(0.25))?;
            let chi = sq.chi(&rho);
            json!({
                "classical_bound": 4.0,
                "quantum_value": chi,
                "violated": chi > 4.0 + PPS_TOL,
                "products": to_json(&sq.products()),
            })
        }
        other => return Err(unknown("inequality preset", other)),
    };
    Ok((vec![Input::Preset(preset.into())], vec![("value", PPS_TOL), ("theta", gi::THETA_TOL)], results))
}

fn toy_cheshire_json() -> Value {
    let c = om::toy_cheshire();
    let q = |r: num_rational::Rational64| json!({ "exact": r.to_string(), "value": *r.numer() as f64 / *r.denom() as f64 });
    json!({
        "right_path": q(c.right_path),
        "right_plus": q(c.right_plus),
        "right_minus": q(c.right_minus),
        "post_direct": q(c.post_direct),
        "post_via_path": q(c.post_via_path),
        "post_via_circular": q(c.post_via_circular),
    })
}

fn paradox(name: &str, weak: bool, toy: bool) -> Outcome<Produced> {
    let g = pps::gallery_entry(name)?;
    let input = vec![Input::Preset(name.into())];
    if toy {
        if name != "cheshire" {
            return Err(unknown("toy reproduction for paradox", name));
        }
        return Ok((input, vec![("exact", 0.0)], json!({ "paradox": name, "toy": toy_cheshire_json() })));
    }
    let e = &g.experiment;
    let mut weak_values = Vec::new();
    for (label, op) in &g.observables {
        let w = pps::weak_value_complex(op, &e.pre, &e.post)?;
        weak_values.push(json!({ "observable": label, "re": w.re, "im": w.im }));
    }
    let tol = vec![("pps", PPS_TOL), ("overlap", pps::OVERLAP_TOL), ("abl_denominator", pps::ABL_DENOM_TOL)];
    if weak {
        return Ok((input, tol, json!({ "paradox": name, "weak_values": weak_values })));
    }
    let mut abl = Vec::new();
    for m in &e.measurements {
        let d = pps::abl_distribution(e, &m.name)?;
        let outcomes: Vec<Value> = m.labels.iter().zip(&d).map(|(l, p)| json!({ "outcome": l, "p": p })).collect();
        abl.push(json!({ "measurement": m.name, "distribution": outcomes }));
    }
    let verdict = pps::is_logical_pps_paradox(e, &g.family)?;
    let anomalies: Vec<Value> = pps::anomalous_weak_values(e, &g.family)?
        .into_iter()
        .map(|(n, w)| json!({ "projector": n, "weak_value": w }))
        .collect();
    let ov = e.overlap();
    let mut results = json!({
        "paradox": name,
        "overlap": { "re": ov.re, "im": ov.im },
        "abl": abl,
        "weak_values": weak_values,
        "logical_paradox": verdict.logical,
        "verdict": to_json(&verdict),
        "anomalous_weak_values": anomalies,
    });
    if name == "square" {
        results["square"] = to_json(&pps::square_report()?);
    }
    Ok((input, tol, results))
}

fn ncbound(target: NcTarget, vectors: Option<&Path>) -> Outcome<Produced> {
    match target {
        NcTarget::Cabello18 => {
            let (input, c) = match vectors {
                Some(path) => {
                    let input = read_file(path)?;
                    let text = String::from_utf8(bytes(&input).to_vec())
                        .map_err(|_| Failure::new(EXIT_PARSE, format!("{}: not UTF-8", input.describe())))?;
                    let c = qk::cabello18(qk::parse_vectors(&text)?)?;
                    (input, c)
                }
                None => (Input::Preset("cabello18".into()), qk::cabello18_default()),
            };
            let r = om::kunjwal_spekkens_bound(&c)?;
            let results = json!({
                "nc_bound": r.nc.value,
                "quantum_value": r.quantum_value,
                "violation": r.quantum_value - r.nc.value,
                "optimal_selection": r.nc.selection,
                "optimal_assignment": r.nc.assignment,
                "selections_examined": r.nc.selections_examined,
                "example_assignment": r.example_assignment.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
                "example_value": r.example_value.to_string(),
            });
            Ok((vec![input], vec![("lp", LP_TOL), ("model", om::MODEL_TOL)], results))
        }
        NcTarget::Prep => {
            if vectors.is_some() {
                return Err(Failure::new(EXIT_PARSE, "--vectors applies to cabello18 only"));
            }
            let r = om::prep_contextuality(om::PrepOptions::default())?;
            Ok((vec![Input::Preset("prep".into())], vec![("lp", LP_TOL)], json!({ "prep": to_json(&r) })))
        }
    }
}

fn toy(action: ToyAction, state: &str, axes: &str, trials: usize, seed: u64) -> Outcome<Produced> {
    let tol = vec![("exact", 0.0)];
    match action {
        ToyAction::Table => {
            let rows: Vec<Value> = om::toy_update_table()
                .into_iter()
                .map(|u| {
                    json!({
                        "state": u.state.to_string(),
                        "axis": u.axis.name(),
                        "outcome": u.outcome,
                        "probability": u.probability.to_string(),
                        "post": u.post.map(|s| s.to_string()),
                    })
                })
                .collect();
            Ok((vec![Input::Preset("toy-table".into())], tol, json!({ "updates": rows })))
        }
        ToyAction::Cheshire => Ok((vec![Input::Preset("toy-cheshire".into())], tol, toy_cheshire_json())),
        ToyAction::Demo => {
            let s0 = ToyState::parse(state)?;
            let axes: Vec<ToyAxis> = axes.split(',').map(|a| ToyAxis::parse(a.trim())).collect::<Result<_, _>>()?;
            if axes.is_empty() {
                return Err(Failure::new(EXIT_VALIDATION, "no axes given"));
            }
            let steps: Vec<Value> = om::toy_sequence(s0, &axes, seed)
                .into_iter()
                .map(|(a, k, s)| json!({ "axis": a.name(), "outcome": k, "state": s.to_string() }))
                .collect();
            let rep = om::toy_repeatability(s0, axes[0], trials, seed);
            let results = json!({
                "initial": s0.to_string(),
                "steps": steps,
                "repeatability": { "axis": axes[0].name(), "trials": trials, "agreement": rep },
            });
            Ok((vec![Input::Args(format!("state={state};axes={axes:?}"))], tol, results))
        }
    }
}

fn scenario_preset(name: &str) -> Outcome<Scenario> {
    Ok(match name {
        "triangle" => sc::triangle_scenario(),
        "kcbs" => sc::kcbs_scenario(),
        "bell122" => sc::bell_scenario(1, 2, 2)?,
        "bell222" => sc::bell_scenario(2, 2, 2)?,
        "cabello18" => qk::cabello18_default().scenario,
        other => return Err(unknown("scenario preset", other)),
    })
}

fn scenario(file: Option<&Path>, preset: Option<&str>) -> Outcome<Produced> {
    let (input, s, model) = match source(file, preset)? {
        Ok(path) => {
            let input = read_file(path)?;
            let v: Value = parse_json(&input)?;
            if v.get("scenario").is_some() {
                let m: ModelJson = serde_json::from_value(v)
                    .map_err(|e| Failure::new(EXIT_VALIDATION, format!("{}: {e}", input.describe())))?;
                let (s, p) = m.into_model()?;
                (input, s, Some(p))
            } else {
                let s: Scenario = serde_json::from_value(v)
                    .map_err(|e| Failure::new(EXIT_VALIDATION, format!("{}: {e}", input.describe())))?;
                (input, s, None)
            }
        }
        Err(name) => (Input::Preset(name.into()), scenario_preset(name)?, None),
    };
    let det = models::enumerate_deterministic(&s)?;
    let coloring = models::ks_colorable(&s)?.map(|c| {
        s.vertices()
            .iter()
            .zip(&c.values)
            .filter(|(_, &x)| x == 1.0)
            .map(|(n, _)| n.clone())
            .collect::<Vec<_>>()
    });
    let mut results = json!({
        "vertices": s.num_vertices(),
        "edges": s.num_edges(),
        "degrees": s.degrees(),
        "exclusivity_edges": s.exclusivity_graph().edges().len(),
        "non_orthogonality_edges": s.non_orthogonality_graph().edges().len(),
        "deterministic_models": det.len(),
        "ks_coloring": coloring,
    });
    if let Some(p) = model {
        results["model"] = json!({
            "classical": to_json(&models::classical_from(&det, &p)?),
            "consistent_exclusivity": to_json(&models::satisfies_consistent_exclusivity(&s, &p)?),
        });
    }
    let tol = vec![("norm", models::NORM_TOL), ("classical", models::CLASSICAL_TOL), ("lp", LP_TOL)];
    Ok((vec![input], tol, results))
}
