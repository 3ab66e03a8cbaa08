//! Probabilistic models on scenarios: validation, deterministic enumeration,
//! classicality, no-signaling, consistent exclusivity and KS colorings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_invariants::{independence_number_with_budget, WeightedGraph};
use crate::lp::{Cmp, LinearProgram, LpOutcome};
use crate::scenario::{BellStructure, Scenario};

pub const NORM_TOL: f64 = 1e-9;
pub const CLASSICAL_TOL: f64 = 1e-7;
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Values indexed like the scenario's vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbModel {
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelJson {
    pub scenario: Scenario,
    pub values: BTreeMap<String, f64>,
}

impl ModelJson {
    pub fn new(s: &Scenario, p: &ProbModel) -> Self {
        let values = s.vertices().iter().cloned().zip(p.values.iter().copied()).collect();
        ModelJson { scenario: s.clone(), values }
    }

    pub fn into_model(self) -> Result<(Scenario, ProbModel)> {
        let p = validate_named(&self.scenario, &self.values)?;
        Ok((self.scenario, p))
    }
}

pub fn validate_model(s: &Scenario, values: &[f64]) -> Result<ProbModel> {
    if values.len() != s.num_vertices() {
        return Err(Error::InvalidDimension(format!(
            "{} values for {} vertices",
            values.len(),
            s.num_vertices()
        )));
    }
    for (v, &x) in s.vertices().iter().zip(values) {
        if !(-NORM_TOL..=1.0 + NORM_TOL).contains(&x) || x.is_nan() {
            return Err(Error::OutOfRange { vertex: v.clone(), value: x });
        }
    }
    for (k, e) in s.edges().iter().enumerate() {
        let sum: f64 = e.iter().map(|&v| values[v]).sum();
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(Error::EdgeNotNormalized { edge: k, sum });
        }
    }
    Ok(ProbModel { values: values.to_vec() })
}

pub fn validate_named(s: &Scenario, values: &BTreeMap<String, f64>) -> Result<ProbModel> {
    for k in values.keys() {
        if s.vertex_index(k).is_none() {
            return Err(Error::UnknownVertex(k.clone()));
        }
    }
    let mut v = Vec::with_capacity(s.num_vertices());
    for name in s.vertices() {
        match values.get(name) {
            Some(&x) => v.push(x),
            None => return Err(Error::UnknownVertex(name.clone())),
        }
    }
    validate_model(s, &v)
}

struct DetSearch<'a> {
    s: &'a Scenario,
    incident: Vec<Vec<usize>>,
    last_of_edge: Vec<usize>,
    assign: Vec<u8>,
    ones: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl<'a> DetSearch<'a> {
    fn new(s: &'a Scenario, budget: u64) -> Self {
        let n = s.num_vertices();
        let mut incident = vec![Vec::new(); n];
        for (k, e) in s.edges().iter().enumerate() {
            for &v in e {
                incident[v].push(k);
            }
        }
        let last_of_edge = s.edges().iter().map(|e| *e.iter().max().unwrap()).collect();
        DetSearch {
            s,
            incident,
            last_of_edge,
            assign: vec![0; n],
            ones: vec![0; s.num_edges()],
            nodes: 0,
            budget,
        }
    }

    fn consistent(&self, v: usize) -> bool {
        self.incident[v].iter().all(|&k| {
            self.ones[k] <= 1 && (self.last_of_edge[k] != v || self.ones[k] == 1)
        })
    }

    /// Visits assignments in lexicographic order; `visit` returns false to stop.
    fn run(&mut self, v: usize, visit: &mut dyn FnMut(&[u8]) -> bool) -> Result<bool> {
        if v == self.s.num_vertices() {
            return Ok(visit(&self.assign));
        }
        for bit in [0u8, 1] {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::SearchBudgetExceeded(self.budget));
            }
            self.assign[v] = bit;
            if bit == 1 {
                for &k in &self.incident[v] {
                    self.ones[k] += 1;
                }
            }
            let ok = self.consistent(v);
            let cont = if ok { self.run(v + 1, visit)? } else { true };
            if bit == 1 {
                for &k in &self.incident[v] {
                    self.ones[k] -= 1;
                }
            }
            self.assign[v] = 0;
            if !cont {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn to_model(a: &[u8]) -> ProbModel {
    ProbModel { values: a.iter().map(|&b| b as f64).collect() }
}

/// All 0/1 models with exactly one 1 per edge, in lexicographic order.
pub fn enumerate_deterministic(s: &Scenario) -> Result<Vec<ProbModel>> {
    enumerate_deterministic_with_budget(s, DEFAULT_BUDGET)
}

pub fn enumerate_deterministic_with_budget(s: &Scenario, budget: u64) -> Result<Vec<ProbModel>> {
    let mut out = Vec::new();
    DetSearch::new(s, budget).run(0, &mut |a| {
        out.push(to_model(a));
        true
    })?;
    Ok(out)
}

/// First deterministic model, or `None` when the scenario is a KS proof.
pub fn ks_colorable(s: &Scenario) -> Result<Option<ProbModel>> {
    let mut found = None;
    DetSearch::new(s, DEFAULT_BUDGET).run(0, &mut |a| {
        found = Some(to_model(a));
        false
    })?;
    Ok(found)
}

/// Linear inequality `Σ coeffs·p ≤ bound` holding for every classical model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hyperplane {
    pub coeffs: Vec<f64>,
    pub bound: f64,
}

impl Hyperplane {
    pub fn evaluate(&self, p: &ProbModel) -> f64 {
        self.coeffs.iter().zip(&p.values).map(|(c, v)| c * v).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalityCertificate {
    pub classical: bool,
    /// `(index into enumerate_deterministic, weight)` pairs with positive weight.
    pub weights: Vec<(usize, f64)>,
    pub witness: Option<Hyperplane>,
}

pub fn is_classical(s: &Scenario, p: &ProbModel) -> Result<ClassicalityCertificate> {
    let det = enumerate_deterministic(s)?;
    classical_from(&det, p)
}

/// Convex-hull membership of `p` in the listed deterministic models.
pub fn classical_from(det: &[ProbModel], p: &ProbModel) -> Result<ClassicalityCertificate> {
    let n = p.values.len();
    let k = det.len();
    let mut lp = LinearProgram::new(k);
    for v in 0..n {
        lp.add(det.iter().map(|d| d.values[v]).collect(), Cmp::Eq, p.values[v]);
    }
    lp.add(vec![1.0; k], Cmp::Eq, 1.0);
    match lp.solve()? {
        LpOutcome::Optimal { x, .. } => {
            let weights = x.into_iter().enumerate().filter(|(_, w)| *w > 1e-12).collect();
            Ok(ClassicalityCertificate { classical: true, weights, witness: None })
        }
        LpOutcome::Infeasible { farkas } => {
            let coeffs = farkas[..n].iter().map(|y| -y).collect();
            Ok(ClassicalityCertificate {
                classical: false,
                weights: vec![],
                witness: Some(Hyperplane { coeffs, bound: farkas[n] }),
            })
        }
        LpOutcome::Unbounded => unreachable!("feasibility problem has a zero objective"),
    }
}

/// Two settings tuples of the other parties giving different marginals for `party`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignalingWitness {
    pub party: usize,
    pub outcome: usize,
    pub settings: Vec<usize>,
    pub other_settings: Vec<usize>,
    pub marginal: f64,
    pub other_marginal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoSignalingReport {
    pub no_signaling: bool,
    pub witness: Option<SignalingWitness>,
}

fn settings_tuples(st: &BellStructure) -> Vec<Vec<usize>> {
    let total = st.settings.pow(st.parties as u32);
    (0..total)
        .map(|mut t| {
            let mut x = vec![0; st.parties];
            for p in (0..st.parties).rev() {
                x[p] = t % st.settings;
                t /= st.settings;
            }
            x
        })
        .collect()
}

/// Single-party marginals must not depend on the other parties' settings.
pub fn is_no_signaling(s: &Scenario, p: &ProbModel, st: &BellStructure) -> Result<NoSignalingReport> {
    let n = st.num_vertices();
    if s.num_vertices() != n || p.values.len() != n {
        return Err(Error::StructureMismatch(format!(
            "{} vertices, structure expects {n}",
            s.num_vertices()
        )));
    }
    for v in 0..n {
        if s.vertices()[v] != st.name(v) {
            return Err(Error::StructureMismatch(format!("vertex {} is not {}", s.vertices()[v], st.name(v))));
        }
    }
    let marginal = |party: usize, a: usize, x: &[usize]| -> f64 {
        (0..n)
            .filter(|&v| {
                let (av, xv) = st.decode(v);
                xv == x && av[party] == a
            })
            .map(|v| p.values[v])
            .sum()
    };
    let tuples = settings_tuples(st);
    for party in 0..st.parties {
        for a in 0..st.outcomes {
            for x in &tuples {
                for x2 in &tuples {
                    if x2 <= x || x2[party] != x[party] {
                        continue;
                    }
                    let m1 = marginal(party, a, x);
                    let m2 = marginal(party, a, x2);
                    if (m1 - m2).abs() > NORM_TOL {
                        return Ok(NoSignalingReport {
                            no_signaling: false,
                            witness: Some(SignalingWitness {
                                party,
                                outcome: a,
                                settings: x.clone(),
                                other_settings: x2.clone(),
                                marginal: m1,
                                other_marginal: m2,
                            }),
                        });
                    }
                }
            }
        }
    }
    Ok(NoSignalingReport { no_signaling: true, witness: None })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CeReport {
    pub satisfied: bool,
    pub worst_set: Vec<usize>,
    pub worst_total: f64,
}

/// Every set of pairwise-exclusive outcomes (an independent set of the
/// non-orthogonality graph) carries total probability at most 1.
pub fn satisfies_consistent_exclusivity(s: &Scenario, p: &ProbModel) -> Result<CeReport> {
    let g = WeightedGraph::from_orthogonality(&s.non_orthogonality_graph(), p.values.clone())?;
    let best = independence_number_with_budget(&g, DEFAULT_BUDGET)?;
    Ok(CeReport {
        satisfied: best.value <= 1.0 + NORM_TOL,
        worst_set: best.vertices,
        worst_total: best.value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{bell_scenario, triangle_scenario};

    #[test]
    fn triangle_example_model() {
        let s = triangle_scenario();
        validate_model(&s, &[0.5, 0.0, 0.5, 0.0, 0.5, 0.0]).unwrap();
        assert!(matches!(
            validate_model(&s, &[0.0; 6]),
            Err(Error::EdgeNotNormalized { edge: 0, .. })
        ));
        assert!(matches!(
            validate_model(&s, &[1.5, -0.5, 0.0, 1.0, 0.0, 0.0]),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn local_bell_models() {
        let s = bell_scenario(1, 2, 2).unwrap();
        assert_eq!(enumerate_deterministic(&s).unwrap().len(), 4);
        let s = bell_scenario(1, 1, 5).unwrap();
        assert_eq!(enumerate_deterministic(&s).unwrap().len(), 5);
    }

    #[test]
    fn budget_is_enforced() {
        let s = bell_scenario(2, 2, 2).unwrap();
        assert_eq!(
            enumerate_deterministic_with_budget(&s, 10),
            Err(Error::SearchBudgetExceeded(10))
        );
    }
}
