//! Empirical tables over measurement covers, global sections and the
//! contextuality hierarchy (probabilistic, logical, strong).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{Cmp, LinearProgram, LpOutcome};
use crate::models::{validate_model, ProbModel};
use crate::quantum_kernel::{Ket, HermitianOp};
use crate::scenario::Scenario;

pub const ROW_TOL: f64 = 1e-9;
pub const SUPPORT_TOL: f64 = 1e-12;
pub const GLOBAL_TOL: f64 = 1e-7;
pub const MAX_GLOBAL_ASSIGNMENTS: u128 = 1_000_000;

/// Observables, outcome counts and a cover of contexts. Joint outcomes of a
/// context are listed lexicographically, first observable most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    pub observables: Vec<String>,
    pub arities: Vec<usize>,
    pub contexts: Vec<Vec<usize>>,
}

impl Cover {
    pub fn new(observables: Vec<(String, usize)>, contexts: Vec<Vec<String>>) -> Result<Cover> {
        let mut names = Vec::new();
        let mut arities = Vec::new();
        for (name, a) in observables {
            if names.contains(&name) {
                return Err(Error::InvalidTable(format!("observable {name:?} declared twice")));
            }
            if a < 1 {
                return Err(Error::InvalidTable(format!("observable {name:?} has no outcomes")));
            }
            names.push(name);
            arities.push(a);
        }
        let mut ctx = Vec::new();
        for c in contexts {
            if c.is_empty() {
                return Err(Error::InvalidTable("empty context".into()));
            }
            let mut idx = Vec::new();
            for o in c {
                let i = names
                    .iter()
                    .position(|n| *n == o)
                    .ok_or_else(|| Error::InvalidTable(format!("unknown observable {o:?}")))?;
                if idx.contains(&i) {
                    return Err(Error::InvalidTable(format!("observable {o:?} repeated in a context")));
                }
                idx.push(i);
            }
            ctx.push(idx);
        }
        Ok(Cover { observables: names, arities, contexts: ctx })
    }

    pub fn context_size(&self, k: usize) -> usize {
        self.contexts[k].iter().map(|&o| self.arities[o]).product()
    }

    /// Outcome of each context observable for joint index `j`.
    pub fn decode(&self, k: usize, mut j: usize) -> Vec<usize> {
        let ctx = &self.contexts[k];
        let mut out = vec![0; ctx.len()];
        for (slot, &o) in ctx.iter().enumerate().rev() {
            out[slot] = j % self.arities[o];
            j /= self.arities[o];
        }
        out
    }

    /// Joint index in context `k` of the restriction of a global assignment.
    pub fn restrict(&self, k: usize, global: &[usize]) -> usize {
        self.contexts[k].iter().fold(0, |acc, &o| acc * self.arities[o] + global[o])
    }

    pub fn context_label(&self, k: usize) -> String {
        self.contexts[k].iter().map(|&o| self.observables[o].as_str()).collect::<Vec<_>>().join(",")
    }

    pub fn global_count(&self) -> u128 {
        self.arities.iter().map(|&a| a as u128).product()
    }

    fn check_shape<T>(&self, rows: &[Vec<T>]) -> Result<()> {
        if rows.len() != self.contexts.len() {
            return Err(Error::InvalidTable(format!(
                "{} rows for {} contexts",
                rows.len(),
                self.contexts.len()
            )));
        }
        for (k, row) in rows.iter().enumerate() {
            if row.len() != self.context_size(k) {
                return Err(Error::InvalidTable(format!(
                    "context {k} needs {} entries, got {}",
                    self.context_size(k),
                    row.len()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalTable {
    pub cover: Cover,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PossibilityTable {
    pub cover: Cover,
    pub rows: Vec<Vec<bool>>,
}

#[derive(Serialize, Deserialize)]
pub struct TableJson {
    pub observables: serde_json::Map<String, serde_json::Value>,
    pub contexts: Vec<Vec<String>>,
    pub rows: Vec<Vec<f64>>,
}

impl TableJson {
    pub fn from_table(t: &EmpiricalTable) -> Self {
        let observables = t
            .cover
            .observables
            .iter()
            .zip(&t.cover.arities)
            .map(|(n, &a)| (n.clone(), serde_json::Value::from(a)))
            .collect();
        let contexts = t
            .cover
            .contexts
            .iter()
            .map(|c| c.iter().map(|&o| t.cover.observables[o].clone()).collect())
            .collect();
        TableJson { observables, contexts, rows: t.rows.clone() }
    }

    pub fn into_table(self) -> Result<EmpiricalTable> {
        let mut obs = Vec::new();
        for (k, v) in self.observables {
            let a = v
                .as_u64()
                .ok_or_else(|| Error::InvalidTable(format!("arity of {k:?} is not a positive integer")))?;
            obs.push((k, a as usize));
        }
        build_table(obs, self.contexts, self.rows)
    }
}

/// Validates row normalization and marginal agreement on shared observables.
pub fn build_table(
    observables: Vec<(String, usize)>,
    contexts: Vec<Vec<String>>,
    rows: Vec<Vec<f64>>,
) -> Result<EmpiricalTable> {
    let cover = Cover::new(observables, contexts)?;
    EmpiricalTable::new(cover, rows)
}

fn obs(names: &[&str]) -> Vec<(String, usize)> {
    names.iter().map(|n| (n.to_string(), 2)).collect()
}

fn ctxs(c: &[&[&str]]) -> Vec<Vec<String>> {
    c.iter().map(|c| c.iter().map(|s| s.to_string()).collect()).collect()
}

impl EmpiricalTable {
    pub fn new(cover: Cover, rows: Vec<Vec<f64>>) -> Result<EmpiricalTable> {
        cover.check_shape(&rows)?;
        for (k, row) in rows.iter().enumerate() {
            if row.iter().any(|&p| !(-ROW_TOL..=1.0 + ROW_TOL).contains(&p) || p.is_nan()) {
                return Err(Error::InvalidTable(format!("context {k} has an entry outside [0,1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_TOL {
                return Err(Error::RowNotNormalized { context: k, sum });
            }
        }
        let t = EmpiricalTable { cover, rows };
        t.check_marginals()?;
        Ok(t)
    }

    fn marginal(&self, k: usize, o: usize) -> Vec<f64> {
        let slot = self.cover.contexts[k].iter().position(|&x| x == o).unwrap();
        let mut m = vec![0.0; self.cover.arities[o]];
        for (j, p) in self.rows[k].iter().enumerate() {
            m[self.cover.decode(k, j)[slot]] += p;
        }
        m
    }

    fn check_marginals(&self) -> Result<()> {
        let c = &self.cover;
        for k in 0..c.contexts.len() {
            for l in k + 1..c.contexts.len() {
                for &o in &c.contexts[k] {
                    if c.contexts[l].contains(&o) {
                        let a = self.marginal(k, o);
                        let b = self.marginal(l, o);
                        if a.iter().zip(&b).any(|(x, y)| (x - y).abs() > ROW_TOL) {
                            return Err(Error::MarginalMismatch(k, l, c.observables[o].clone()));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Entry is possible iff its probability exceeds `1e-12`.
    pub fn possibilistic_collapse(&self) -> PossibilityTable {
        let rows = self.rows.iter().map(|r| r.iter().map(|&p| p > SUPPORT_TOL).collect()).collect();
        PossibilityTable { cover: self.cover.clone(), rows }
    }

    /// Probability of the joint outcome `outcomes` in context `k`.
    pub fn prob(&self, k: usize, outcomes: &[usize]) -> f64 {
        let j = self.cover.contexts[k]
            .iter()
            .zip(outcomes)
            .fold(0, |acc, (&o, &a)| acc * self.cover.arities[o] + a);
        self.rows[k][j]
    }
}

pub fn possibilistic_collapse(t: &EmpiricalTable) -> PossibilityTable {
    t.possibilistic_collapse()
}

impl PossibilityTable {
    pub fn new(cover: Cover, rows: Vec<Vec<bool>>) -> Result<PossibilityTable> {
        cover.check_shape(&rows)?;
        if let Some(k) = rows.iter().position(|r| !r.iter().any(|&b| b)) {
            return Err(Error::InvalidTable(format!("context {k} has no possible outcome")));
        }
        Ok(PossibilityTable { cover, rows })
    }

    /// Re-applies the support threshold to the 0/1 entries.
    pub fn collapse(&self) -> PossibilityTable {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&b| (if b { 1.0 } else { 0.0 }) > SUPPORT_TOL).collect())
            .collect();
        PossibilityTable { cover: self.cover.clone(), rows }
    }

    pub fn possible(&self, k: usize, global: &[usize]) -> bool {
        self.rows[k][self.cover.restrict(k, global)]
    }
}

fn global_assignments(cover: &Cover) -> Result<Vec<Vec<usize>>> {
    let total = cover.global_count();
    if total > MAX_GLOBAL_ASSIGNMENTS {
        return Err(Error::StateSpaceTooLarge(total));
    }
    let n = cover.observables.len();
    let mut out = Vec::with_capacity(total as usize);
    let mut g = vec![0usize; n];
    loop {
        out.push(g.clone());
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            g[i] += 1;
            if g[i] < cover.arities[i] {
                break;
            }
            g[i] = 0;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalDistribution {
    pub feasible: bool,
    /// Global assignments (outcome per observable) with positive weight.
    pub weights: Vec<(Vec<usize>, f64)>,
    /// Infeasibility witness: one coefficient per (context, joint outcome)
    /// followed by the normalization coefficient.
    pub witness: Option<Vec<f64>>,
}

/// LP over distributions on global assignments reproducing every row.
pub fn has_global_distribution(t: &EmpiricalTable) -> Result<GlobalDistribution> {
    let globals = global_assignments(&t.cover)?;
    let mut lp = LinearProgram::new(globals.len());
    for k in 0..t.cover.contexts.len() {
        for j in 0..t.cover.context_size(k) {
            let coeffs = globals
                .iter()
                .map(|g| if t.cover.restrict(k, g) == j { 1.0 } else { 0.0 })
                .collect();
            lp.add(coeffs, Cmp::Eq, t.rows[k][j]);
        }
    }
    lp.add(vec![1.0; globals.len()], Cmp::Eq, 1.0);
    match lp.solve()? {
        LpOutcome::Optimal { x, .. } => {
            let weights = globals
                .into_iter()
                .zip(x)
                .filter(|(_, w)| *w > SUPPORT_TOL)
                .collect();
            Ok(GlobalDistribution { feasible: true, weights, witness: None })
        }
        LpOutcome::Infeasible { farkas } => {
            Ok(GlobalDistribution { feasible: false, weights: vec![], witness: Some(farkas) })
        }
        LpOutcome::Unbounded => unreachable!("feasibility problem has a zero objective"),
    }
}

/// Marginalizes a distribution on global assignments back onto the cover.
pub fn remarginalize(cover: &Cover, weights: &[(Vec<usize>, f64)]) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = (0..cover.contexts.len()).map(|k| vec![0.0; cover.context_size(k)]).collect();
    for (g, w) in weights {
        for (k, row) in rows.iter_mut().enumerate() {
            row[cover.restrict(k, g)] += w;
        }
    }
    rows
}

/// Global assignments whose every restriction is possible, in lexicographic
/// order, found by backtracking; stops after `limit` sections.
pub fn global_sections(p: &PossibilityTable, limit: usize) -> Vec<Vec<usize>> {
    let c = &p.cover;
    let n = c.observables.len();
    // contexts become checkable once their last observable is assigned
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, ctx) in c.contexts.iter().enumerate() {
        ready[*ctx.iter().max().unwrap()].push(k);
    }
    let mut out = Vec::new();
    let mut g = vec![0usize; n];
    fn rec(
        p: &PossibilityTable,
        ready: &[Vec<usize>],
        g: &mut Vec<usize>,
        i: usize,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if i == g.len() {
            out.push(g.clone());
            return;
        }
        for a in 0..p.cover.arities[i] {
            g[i] = a;
            if ready[i].iter().all(|&k| p.possible(k, g)) {
                rec(p, ready, g, i + 1, out, limit);
            }
        }
        g[i] = 0;
    }
    rec(p, &ready, &mut g, 0, &mut out, limit);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Level {
    Noncontextual,
    Probabilistic,
    Logical,
    Strong,
}

/// A local section: one context and an outcome for each of its observables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Section {
    pub context: usize,
    pub assignment: Vec<(String, usize)>,
}

impl std::fmt::Display for Section {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.assignment.iter().map(|(o, a)| format!("{o}->{a}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchyVerdict {
    pub level: Level,
    pub global_weights: Option<Vec<(Vec<usize>, f64)>>,
    pub non_extendable: Vec<Section>,
    pub global_sections: Vec<Vec<usize>>,
    pub farkas: Option<Vec<f64>>,
}

impl HierarchyVerdict {
    pub fn witness(&self) -> Option<&Section> {
        self.non_extendable.first()
    }
}

fn section(c: &Cover, k: usize, j: usize) -> Section {
    let outcomes = c.decode(k, j);
    let assignment = c.contexts[k]
        .iter()
        .zip(outcomes)
        .map(|(&o, a)| (c.observables[o].clone(), a))
        .collect();
    Section { context: k, assignment }
}

/// Support cells that lie on no global section, in context then outcome order.
pub fn non_extendable_sections(p: &PossibilityTable, sections: &[Vec<usize>]) -> Vec<Section> {
    let c = &p.cover;
    let mut covered: Vec<Vec<bool>> = p.rows.iter().map(|r| vec![false; r.len()]).collect();
    for g in sections {
        for (k, cov) in covered.iter_mut().enumerate() {
            cov[c.restrict(k, g)] = true;
        }
    }
    let mut out = Vec::new();
    for (k, row) in p.rows.iter().enumerate() {
        for (j, &possible) in row.iter().enumerate() {
            if possible && !covered[k][j] {
                out.push(section(c, k, j));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum PossibilisticLevel {
    Extendable,
    Logical,
    Strong,
}

pub fn classify_possibilistic(p: &PossibilityTable) -> Result<(PossibilisticLevel, Vec<Vec<usize>>, Vec<Section>)> {
    let total = p.cover.global_count();
    if total > MAX_GLOBAL_ASSIGNMENTS {
        return Err(Error::StateSpaceTooLarge(total));
    }
    let sections = global_sections(p, usize::MAX);
    let missing = non_extendable_sections(p, &sections);
    let level = if sections.is_empty() {
        PossibilisticLevel::Strong
    } else if !missing.is_empty() {
        PossibilisticLevel::Logical
    } else {
        PossibilisticLevel::Extendable
    };
    Ok((level, sections, missing))
}

pub fn classify(t: &EmpiricalTable) -> Result<HierarchyVerdict> {
    let gd = has_global_distribution(t)?;
    let p = t.possibilistic_collapse();
    let (plevel, sections, missing) = classify_possibilistic(&p)?;
    let level = if gd.feasible {
        Level::Noncontextual
    } else {
        match plevel {
            PossibilisticLevel::Strong => Level::Strong,
            PossibilisticLevel::Logical => Level::Logical,
            PossibilisticLevel::Extendable => Level::Probabilistic,
        }
    };
    Ok(HierarchyVerdict {
        level,
        global_weights: if gd.feasible { Some(gd.weights) } else { None },
        non_extendable: missing,
        global_sections: sections,
        farkas: gd.witness,
    })
}

/// `x1 = x2, ..., x_{n-1} = x_n, x_n ≠ x1` over binary observables.
pub fn liar_cycle(n: usize) -> Result<PossibilityTable> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!("liar cycle of length {n}")));
    }
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let observables = names.iter().map(|s| (s.clone(), 2)).collect();
    let contexts = (0..n).map(|i| vec![names[i].clone(), names[(i + 1) % n].clone()]).collect();
    let cover = Cover::new(observables, contexts)?;
    let eq = vec![true, false, false, true];
    let neq = vec![false, true, true, false];
    let rows = (0..n).map(|i| if i + 1 < n { eq.clone() } else { neq.clone() }).collect();
    PossibilityTable::new(cover, rows)
}

type SupportSet = BTreeSet<(BTreeSet<usize>, BTreeSet<BTreeMap<usize, usize>>)>;

fn support_set(p: &PossibilityTable, obs_map: &[usize], out_map: &[Vec<usize>]) -> SupportSet {
    let c = &p.cover;
    let mut set = BTreeSet::new();
    for (k, ctx) in c.contexts.iter().enumerate() {
        let key: BTreeSet<usize> = ctx.iter().map(|&o| obs_map[o]).collect();
        let mut secs = BTreeSet::new();
        for (j, &possible) in p.rows[k].iter().enumerate() {
            if possible {
                let a = c.decode(k, j);
                secs.insert(ctx.iter().zip(a).map(|(&o, v)| (obs_map[o], out_map[o][v])).collect());
            }
        }
        set.insert((key, secs));
    }
    set
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Relabeling `(observable map, outcome maps)` carrying `a`'s support onto
/// `b`'s, searching observable bijections and per-observable outcome
/// permutations exhaustively (small covers only).
#[allow(clippy::type_complexity)]
pub fn support_equivalent(a: &PossibilityTable, b: &PossibilityTable) -> Option<(Vec<usize>, Vec<Vec<usize>>)> {
    let n = a.cover.observables.len();
    if n != b.cover.observables.len() || n > 8 {
        return None;
    }
    let target = support_set(b, &(0..n).collect::<Vec<_>>(), &b.cover.arities.iter().map(|&k| (0..k).collect()).collect::<Vec<_>>());
    for perm in permutations(n) {
        if (0..n).any(|o| a.cover.arities[o] != b.cover.arities[perm[o]]) {
            continue;
        }
        let choices: Vec<Vec<Vec<usize>>> = a.cover.arities.iter().map(|&k| permutations(k)).collect();
        let mut idx = vec![0usize; n];
        loop {
            let out_map: Vec<Vec<usize>> = (0..n).map(|o| choices[o][idx[o]].clone()).collect();
            if support_set(a, &perm, &out_map) == target {
                return Some((perm, out_map));
            }
            let mut i = 0;
            while i < n {
                idx[i] += 1;
                if idx[i] < choices[i].len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
    None
}

/// One edge per context over `"context:outcomes"` vertices; outcomes shared
/// between contexts are not merged.
pub fn to_scenario(t: &EmpiricalTable) -> Result<(Scenario, ProbModel)> {
    let c = &t.cover;
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut values = Vec::new();
    for k in 0..c.contexts.len() {
        let mut e = Vec::new();
        for j in 0..c.context_size(k) {
            let outs: String = c.decode(k, j).iter().map(|a| a.to_string()).collect::<Vec<_>>().join("");
            e.push(vertices.len());
            vertices.push(format!("{}:{}", c.context_label(k), outs));
            values.push(t.rows[k][j]);
        }
        edges.push(e);
    }
    let s = Scenario::from_indices(vertices, edges)?;
    let p = validate_model(&s, &values)?;
    Ok((s, p))
}

/// `P(A=B) + P(A=B') + P(A'=B) + P(A'≠B')` over the four contexts in order.
pub fn chsh_sum(t: &EmpiricalTable) -> f64 {
    (0..t.cover.contexts.len().min(4))
        .map(|k| {
            let (eq, neq) = (t.rows[k][0] + t.rows[k][3], t.rows[k][1] + t.rows[k][2]);
            if k == 3 {
                neq
            } else {
                eq
            }
        })
        .sum()
}

pub fn chsh_table() -> EmpiricalTable {
    build_table(
        obs(&["A", "A'", "B", "B'"]),
        ctxs(&[&["A", "B"], &["A", "B'"], &["A'", "B"], &["A'", "B'"]]),
        vec![
            vec![0.5, 0.0, 0.0, 0.5],
            vec![3.0 / 8.0, 1.0 / 8.0, 1.0 / 8.0, 3.0 / 8.0],
            vec![3.0 / 8.0, 1.0 / 8.0, 1.0 / 8.0, 3.0 / 8.0],
            vec![1.0 / 8.0, 3.0 / 8.0, 3.0 / 8.0, 1.0 / 8.0],
        ],
    )
    .expect("chsh table is valid")
}

pub fn pr_box_table() -> EmpiricalTable {
    let eq = vec![0.5, 0.0, 0.0, 0.5];
    build_table(
        obs(&["A", "A'", "B", "B'"]),
        ctxs(&[&["A", "B"], &["A", "B'"], &["A'", "B"], &["A'", "B'"]]),
        vec![eq.clone(), eq.clone(), eq, vec![0.0, 0.5, 0.5, 0.0]],
    )
    .expect("pr table is valid")
}

/// Hardy's model from `(|00⟩+|01⟩+|10⟩)/√3`; primed observables measure
/// the computational basis, unprimed ones the basis `(|0⟩∓|1⟩)/√2`.
pub fn hardy_table() -> EmpiricalTable {
    let psi = Ket::real(&[1.0, 1.0, 1.0, 0.0]).normalized();
    let s = 1.0 / 2f64.sqrt();
    let unprimed = [Ket::real(&[s, -s]), Ket::real(&[s, s])];
    let primed = [Ket::basis(2, 0), Ket::basis(2, 1)];
    let pairs: [(&[Ket; 2], &[Ket; 2]); 4] =
        [(&unprimed, &unprimed), (&unprimed, &primed), (&primed, &unprimed), (&primed, &primed)];
    let rows = pairs
        .iter()
        .map(|(a, b)| {
            let mut row = Vec::new();
            for x in a.iter() {
                for y in b.iter() {
                    let e = HermitianOp(x.kron(y).projector());
                    row.push(e.expectation(&psi));
                }
            }
            row
        })
        .collect();
    build_table(
        obs(&["A", "A'", "B", "B'"]),
        ctxs(&[&["A", "B"], &["A", "B'"], &["A'", "B"], &["A'", "B'"]]),
        rows,
    )
    .expect("hardy table is valid")
}

fn anticorrelated_cycle(names: &[&str]) -> EmpiricalTable {
    let n = names.len();
    let contexts = (0..n).map(|i| vec![names[i].to_string(), names[(i + 1) % n].to_string()]).collect();
    build_table(obs(names), contexts, vec![vec![0.0, 0.5, 0.5, 0.0]; n]).expect("cycle table is valid")
}

pub fn kcbs_table() -> EmpiricalTable {
    anticorrelated_cycle(&["A1", "A2", "A3", "A4", "A5"])
}

pub fn overprotective_seer_table() -> EmpiricalTable {
    anticorrelated_cycle(&["A", "B", "C"])
}

pub fn hanging_paradox_table() -> EmpiricalTable {
    anticorrelated_cycle(&["V", "J", "M'", "M", "L"])
}

pub fn sea_battle_table() -> EmpiricalTable {
    build_table(
        obs(&["H", "A", "D"]),
        ctxs(&[&["H", "A"], &["A", "D"], &["D", "H"]]),
        vec![vec![0.5, 0.0, 0.0, 0.5], vec![0.5, 0.0, 0.0, 0.5], vec![0.25; 4]],
    )
    .expect("sea battle table is valid")
}

pub fn paradox_tables() -> Vec<(&'static str, EmpiricalTable)> {
    vec![
        ("chsh", chsh_table()),
        ("hardy", hardy_table()),
        ("pr_box", pr_box_table()),
        ("kcbs", kcbs_table()),
        ("overprotective_seer", overprotective_seer_table()),
        ("sea_battle", sea_battle_table()),
        ("hanging_paradox", hanging_paradox_table()),
    ]
}

pub fn paradox_table(name: &str) -> Result<EmpiricalTable> {
    paradox_tables()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| t)
        .ok_or_else(|| Error::UnknownName(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marginal_mismatch_detected() {
        let r = build_table(
            obs(&["A", "B", "C"]),
            ctxs(&[&["A", "B"], &["A", "C"]]),
            vec![vec![0.5, 0.0, 0.0, 0.5], vec![1.0, 0.0, 0.0, 0.0]],
        );
        assert_eq!(r, Err(Error::MarginalMismatch(0, 1, "A".into())));
    }

    #[test]
    fn row_normalization() {
        let r = build_table(obs(&["A"]), ctxs(&[&["A"]]), vec![vec![0.5, 0.4]]);
        assert!(matches!(r, Err(Error::RowNotNormalized { context: 0, .. })));
    }

    #[test]
    fn liar_rejects_short() {
        assert!(matches!(liar_cycle(1), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn hardy_entries() {
        let t = hardy_table();
        assert!((t.rows[0][0] - 1.0 / 12.0).abs() < 1e-12);
        assert!(t.rows[1][0].abs() < 1e-15 && t.rows[2][0].abs() < 1e-15 && t.rows[3][3].abs() < 1e-15);
    }
}
