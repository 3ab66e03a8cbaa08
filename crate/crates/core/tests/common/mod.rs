//! Property checks shared by the property suite and the acceptance run.
//! Each check draws one random instance from `seed` and compares the library
//! against an oracle written independently here.
#![allow(dead_code)]

use ctxkit_core::graph_invariants::{chsh_graph, cycle_graph, independence_number, lovasz_theta, WeightedGraph, THETA_TOL};
use ctxkit_core::models::{
    enumerate_deterministic, is_classical, is_no_signaling, satisfies_consistent_exclusivity, validate_model, ProbModel,
};
use ctxkit_core::pps_weak::{abl_distribution, paradox_gallery, weak_value, NamedPvm, PPSExperiment};
use ctxkit_core::quantum_kernel::{cabello18_default, random_ket, CMat, Ket};
use ctxkit_core::scenario::{bell_scenario, kcbs_scenario, triangle_scenario, BellStructure, Scenario};
use ctxkit_core::sheaf::{build_table, classify, paradox_tables, remarginalize, EmpiricalTable, Level};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = std::result::Result<(), String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

pub fn random_scenario(r: &mut ChaCha8Rng) -> Scenario {
    loop {
        let n = r.random_range(2..=8);
        let m = r.random_range(1..=4);
        let mut edges: Vec<Vec<usize>> = (0..m)
            .map(|_| {
                let k = r.random_range(1..=n.min(4));
                let mut all: Vec<usize> = (0..n).collect();
                all.shuffle(r);
                all.truncate(k);
                all
            })
            .collect();
        for v in 0..n {
            if !edges.iter().any(|e| e.contains(&v)) {
                let i = r.random_range(0..edges.len());
                edges[i].push(v);
            }
        }
        let names = (0..n).map(|i| format!("v{i}")).collect();
        if let Ok(s) = Scenario::from_indices(names, edges) {
            return s;
        }
    }
}

pub fn corpus_scenarios() -> Vec<Scenario> {
    vec![
        triangle_scenario(),
        kcbs_scenario(),
        bell_scenario(1, 2, 2).unwrap(),
        bell_scenario(2, 2, 2).unwrap(),
        cabello18_default().scenario,
    ]
}

fn mixture(r: &mut ChaCha8Rng, det: &[ProbModel], n: usize) -> ProbModel {
    let k = r.random_range(1..=det.len().min(4));
    let w: Vec<f64> = (0..k).map(|_| r.random_range(0.05..1.0)).collect();
    let tot: f64 = w.iter().sum();
    let mut values = vec![0.0; n];
    for wi in &w {
        let d = &det[r.random_range(0..det.len())];
        for (v, x) in values.iter_mut().zip(&d.values) {
            *v += wi / tot * x;
        }
    }
    ProbModel { values }
}

/// Deterministic models sum to exactly one on every edge; their mixtures
/// validate, are classical and satisfy consistent exclusivity.
pub fn edge_normalization(seed: u64) -> Check {
    let mut r = rng(seed);
    let s = random_scenario(&mut r);
    let det = enumerate_deterministic(&s).map_err(|e| e.to_string())?;
    for d in &det {
        for e in s.edges() {
            let sum: f64 = e.iter().map(|&v| d.values[v]).sum();
            ensure!(sum == 1.0, "deterministic model sums to {sum}");
        }
        validate_model(&s, &d.values).map_err(|e| e.to_string())?;
    }
    // brute-force oracle for the count: all 0/1 vectors
    let n = s.num_vertices();
    let brute = (0u32..1 << n)
        .filter(|m| s.edges().iter().all(|e| e.iter().filter(|&&v| m >> v & 1 == 1).count() == 1))
        .count();
    ensure!(brute == det.len(), "enumeration found {} of {brute}", det.len());
    if det.is_empty() {
        return Ok(());
    }
    let p = mixture(&mut r, &det, n);
    validate_model(&s, &p.values).map_err(|e| e.to_string())?;
    ensure!(is_classical(&s, &p).map_err(|e| e.to_string())?.classical, "mixture not classical");
    ensure!(satisfies_consistent_exclusivity(&s, &p).map_err(|e| e.to_string())?.satisfied, "mixture violates CE");
    Ok(())
}

/// Exclusivity and non-orthogonality graphs are complements.
pub fn graph_complement(seed: u64) -> Check {
    let mut r = rng(seed);
    let s = random_scenario(&mut r);
    let ex = s.exclusivity_graph();
    let no = s.non_orthogonality_graph();
    for i in 0..s.num_vertices() {
        for j in 0..s.num_vertices() {
            if i != j {
                ensure!(ex.adjacent(i, j) != no.adjacent(i, j), "pair {i},{j} in both or neither");
                let shared = s.edges().iter().any(|e| e.contains(&i) && e.contains(&j));
                ensure!(ex.adjacent(i, j) == shared, "pair {i},{j} exclusivity wrong");
            }
        }
    }
    Ok(())
}

/// Mixtures of local deterministic boxes never signal.
pub fn classical_no_signaling(seed: u64) -> Check {
    let mut r = rng(seed);
    let (k, m) = [(2, 2), (2, 3), (3, 2)][r.random_range(0..3)];
    let s = bell_scenario(2, k, m).map_err(|e| e.to_string())?;
    let st = BellStructure::new(2, k, m).map_err(|e| e.to_string())?;
    let det = enumerate_deterministic(&s).map_err(|e| e.to_string())?;
    let p = mixture(&mut r, &det, s.num_vertices());
    let rep = is_no_signaling(&s, &p, &st).map_err(|e| e.to_string())?;
    ensure!(rep.no_signaling, "classical model signals: {:?}", rep.witness);
    Ok(())
}

fn bell_table(rows: Vec<Vec<f64>>) -> EmpiricalTable {
    let obs = ["A", "A'", "B", "B'"].iter().map(|s| (s.to_string(), 2)).collect();
    let ctx = [["A", "B"], ["A", "B'"], ["A'", "B"], ["A'", "B'"]]
        .iter()
        .map(|c| c.iter().map(|s| s.to_string()).collect())
        .collect();
    build_table(obs, ctx, rows).expect("no-signaling mixture is a valid table")
}

/// Rows of a box on contexts (A,B), (A,B'), (A',B), (A',B').
type Box4 = [[f64; 4]; 4];

fn det_box(g: [usize; 4]) -> Box4 {
    let mut b = [[0.0; 4]; 4];
    for (k, (x, y)) in [(0, 2), (0, 3), (1, 2), (1, 3)].iter().enumerate() {
        b[k][2 * g[*x] + g[*y]] = 1.0;
    }
    b
}

/// PR-type box a⊕b = xy ⊕ αx ⊕ βy ⊕ γ.
fn pr_box(alpha: usize, beta: usize, gamma: usize) -> Box4 {
    let mut b = [[0.0; 4]; 4];
    for (k, (x, y)) in [(0, 0), (0, 1), (1, 0), (1, 1)].iter().enumerate() {
        let par = (x & y) ^ (alpha & x) ^ (beta & y) ^ gamma;
        for a in 0..2 {
            b[k][2 * a + (a ^ par)] = 0.5;
        }
    }
    b
}

fn random_box_table(r: &mut ChaCha8Rng) -> EmpiricalTable {
    let parts = r.random_range(1..=3);
    let mut acc = [[0.0; 4]; 4];
    let mut tot = 0.0;
    for _ in 0..parts {
        let w = r.random_range(0.1..1.0);
        let b = match r.random_range(0..3) {
            0 => pr_box(r.random_range(0..2), r.random_range(0..2), r.random_range(0..2)),
            1 => det_box(std::array::from_fn(|_| r.random_range(0..2))),
            _ => [[0.25; 4]; 4],
        };
        for k in 0..4 {
            for j in 0..4 {
                acc[k][j] += w * b[k][j];
            }
        }
        tot += w;
    }
    bell_table(acc.iter().map(|row| row.iter().map(|x| x / tot).collect()).collect())
}

/// Fine's criterion: a no-signaling two-setting two-outcome box is local iff
/// every CHSH expression lies in [-2, 2].
fn fine_local(t: &EmpiricalTable) -> bool {
    let e: Vec<f64> = t.rows.iter().map(|r| r[0] - r[1] - r[2] + r[3]).collect();
    let total: f64 = e.iter().sum();
    (0..4).all(|k| (total - 2.0 * e[k]).abs() <= 2.0 + 1e-9)
}

/// Global assignments by exhaustion over all 16 value tuples.
fn brute_sections(t: &EmpiricalTable) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for m in 0..16usize {
        let g = [m >> 3 & 1, m >> 2 & 1, m >> 1 & 1, m & 1];
        let ok = [(0, 2), (0, 3), (1, 2), (1, 3)].iter().enumerate().all(|(k, &(x, y))| t.rows[k][2 * g[x] + g[y]] > 1e-12);
        if ok {
            out.push(g);
        }
    }
    out
}

fn expected_level(t: &EmpiricalTable) -> Level {
    if fine_local(t) {
        return Level::Noncontextual;
    }
    let secs = brute_sections(t);
    if secs.is_empty() {
        return Level::Strong;
    }
    let covered = (0..4).all(|k| {
        let (x, y) = [(0, 2), (0, 3), (1, 2), (1, 3)][k];
        (0..4).all(|j| t.rows[k][j] <= 1e-12 || secs.iter().any(|g| 2 * g[x] + g[y] == j))
    });
    if covered {
        Level::Probabilistic
    } else {
        Level::Logical
    }
}

/// classify agrees with Fine's criterion and exhaustive section search on
/// random no-signaling boxes, and a returned global distribution
/// re-marginalizes to the table.
pub fn hierarchy_oracles(seed: u64) -> Check {
    let mut r = rng(seed);
    let t = random_box_table(&mut r);
    let v = classify(&t).map_err(|e| e.to_string())?;
    let want = expected_level(&t);
    ensure!(v.level == want, "classify {:?}, oracles {:?}", v.level, want);
    if v.level == Level::Strong {
        ensure!(v.global_sections.is_empty(), "strong but sections exist");
    }
    if v.level >= Level::Logical {
        ensure!(v.witness().is_some(), "no witness at level {:?}", v.level);
    }
    if let Some(w) = &v.global_weights {
        let back = remarginalize(&t.cover, w);
        for (a, b) in back.iter().flatten().zip(t.rows.iter().flatten()) {
            ensure!((a - b).abs() <= 1e-6, "re-marginalized {a} vs {b}");
        }
    }
    let p = t.possibilistic_collapse();
    ensure!(p.collapse() == p, "collapse not idempotent");
    Ok(())
}

/// Corpus tables: the level never sits below what its sections certify.
pub fn corpus_hierarchy() -> Check {
    for (name, t) in paradox_tables() {
        let v = classify(&t).map_err(|e| e.to_string())?;
        let secs = &v.global_sections;
        if secs.is_empty() {
            ensure!(v.level == Level::Strong, "{name}: no sections but {:?}", v.level);
        } else if !v.non_extendable.is_empty() {
            ensure!(v.level == Level::Logical, "{name}: uncovered support but {:?}", v.level);
        } else {
            ensure!(v.level <= Level::Probabilistic, "{name}: {:?}", v.level);
        }
    }
    Ok(())
}

fn random_weighted_graph(r: &mut ChaCha8Rng) -> WeightedGraph {
    let n = r.random_range(1..=8);
    let p = r.random_range(0.1..0.8);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if r.random_bool(p) {
                edges.push([i, j]);
            }
        }
    }
    let weights = (0..n).map(|_| if r.random_bool(0.5) { 1.0 } else { r.random_range(0.0..3.0) }).collect();
    WeightedGraph::new(n, edges, weights).expect("valid random graph")
}

/// α ≤ θ, with α checked against subset enumeration.
pub fn sandwich(seed: u64) -> Check {
    let mut r = rng(seed);
    let g = random_weighted_graph(&mut r);
    let a = independence_number(&g).map_err(|e| e.to_string())?.value;
    let adj = g.adjacency();
    let mut brute: f64 = 0.0;
    for m in 0u32..1 << g.n {
        let set: Vec<usize> = (0..g.n).filter(|i| m >> i & 1 == 1).collect();
        if set.iter().all(|&x| set.iter().all(|&y| !adj[x][y])) {
            brute = brute.max(set.iter().map(|&i| g.weights[i]).sum());
        }
    }
    ensure!((a - brute).abs() < 1e-9, "alpha {a} vs brute force {brute}");
    let th = lovasz_theta(&g).map_err(|e| e.to_string())?;
    ensure!(a <= th + THETA_TOL, "alpha {a} > theta {th}");
    Ok(())
}

pub fn corpus_sandwich() -> Check {
    for g in [cycle_graph(5), chsh_graph(), cycle_graph(7)] {
        let a = independence_number(&g).map_err(|e| e.to_string())?.value;
        let th = lovasz_theta(&g).map_err(|e| e.to_string())?;
        ensure!(a <= th + THETA_TOL, "alpha {a} > theta {th}");
    }
    Ok(())
}

fn random_pvm(r: &mut ChaCha8Rng, d: usize) -> Vec<CMat> {
    let mut basis: Vec<Ket> = Vec::new();
    while basis.len() < d {
        let mut v = random_ket(d, r);
        for b in &basis {
            v = Ket(&v.0 - &b.0 * b.inner(&v));
        }
        if v.norm() > 1e-6 {
            basis.push(v.normalized());
        }
    }
    // group the rank-one projectors into a random number of outcomes
    let k = r.random_range(1..=d);
    let mut out = vec![CMat::zeros(d, d); k];
    for (i, b) in basis.iter().enumerate() {
        out[if i < k { i } else { r.random_range(0..k) }] += b.projector();
    }
    out
}

/// ABL probabilities sum to one; weak values of a PVM sum to one.
pub fn abl_normalization(seed: u64) -> Check {
    let mut r = rng(seed);
    let d = r.random_range(2..=4);
    let projs = random_pvm(&mut r, d);
    let labels: Vec<String> = (0..projs.len()).map(|i| i.to_string()).collect();
    let lrefs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
    let m = NamedPvm::new("M", &lrefs, projs.clone()).map_err(|e| e.to_string())?;
    let e = PPSExperiment::new(random_ket(d, &mut r), random_ket(d, &mut r), vec![m]).map_err(|e| e.to_string())?;
    let abl = abl_distribution(&e, "M").map_err(|e| e.to_string())?;
    let s: f64 = abl.iter().sum();
    ensure!((s - 1.0).abs() < 1e-10, "ABL sums to {s}");
    ensure!(abl.iter().all(|&p| (-1e-12..=1.0 + 1e-12).contains(&p)), "ABL outside [0,1]");
    let w: f64 = projs.iter().map(|p| weak_value(p, &e.pre, &e.post).unwrap()).sum();
    ensure!((w - 1.0).abs() < 1e-9, "weak values sum to {w}");
    Ok(())
}

pub fn corpus_abl() -> Check {
    for g in paradox_gallery() {
        for m in &g.experiment.measurements {
            let s: f64 = abl_distribution(&g.experiment, &m.name).map_err(|e| e.to_string())?.iter().sum();
            ensure!((s - 1.0).abs() < 1e-10, "{} {}: ABL sums to {s}", g.name, m.name);
        }
    }
    Ok(())
}

pub fn corpus_models() -> Check {
    for s in corpus_scenarios() {
        for d in enumerate_deterministic(&s).map_err(|e| e.to_string())? {
            validate_model(&s, &d.values).map_err(|e| e.to_string())?;
            ensure!(satisfies_consistent_exclusivity(&s, &d).map_err(|e| e.to_string())?.satisfied, "CE");
        }
    }
    Ok(())
}

/// Every property over the corpus plus `n` seeded random instances each.
pub fn all_properties(n: u64) -> Vec<(&'static str, Check)> {
    let run = |f: fn(u64) -> Check| (0..n).try_for_each(f);
    vec![
        ("edge normalization", corpus_models().and_then(|_| run(edge_normalization))),
        ("graph complement", run(graph_complement)),
        ("classical no-signaling", run(classical_no_signaling)),
        ("hierarchy oracles", corpus_hierarchy().and_then(|_| run(hierarchy_oracles))),
        ("alpha <= theta", corpus_sandwich().and_then(|_| run(sandwich))),
        ("ABL normalization", corpus_abl().and_then(|_| run(abl_normalization))),
    ]
}
