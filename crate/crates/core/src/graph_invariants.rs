//! Weighted independence number and Lovász theta of exclusivity graphs.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{BellStructure, OrthogonalityGraph};

pub const THETA_TOL: f64 = 1e-5;
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub weights: Vec<f64>,
}

impl WeightedGraph {
    /// Validates the graph; an empty weight list means unit weights.
    pub fn new(n: usize, edges: Vec<[usize; 2]>, weights: Vec<f64>) -> Result<Self> {
        WeightedGraph { n, edges, weights }.validated()
    }

    pub fn unweighted(n: usize, edges: Vec<[usize; 2]>) -> Result<Self> {
        Self::new(n, edges, vec![1.0; n])
    }

    pub fn validated(mut self) -> Result<Self> {
        if self.weights.is_empty() {
            self.weights = vec![1.0; self.n];
        }
        if self.weights.len() != self.n {
            return Err(Error::InvalidGraph(format!(
                "{} weights for {} vertices",
                self.weights.len(),
                self.n
            )));
        }
        if let Some(w) = self.weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidGraph(format!("weight {w} is not a non-negative number")));
        }
        for &[i, j] in &self.edges {
            if i >= self.n || j >= self.n {
                return Err(Error::InvalidGraph(format!("edge ({i},{j}) out of range")));
            }
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop at {i}")));
            }
        }
        Ok(self)
    }

    pub fn from_orthogonality(g: &OrthogonalityGraph, weights: Vec<f64>) -> Result<Self> {
        let edges = g.edges().into_iter().map(|(i, j)| [i, j]).collect();
        Self::new(g.len(), edges, weights)
    }

    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        let mut a = vec![vec![false; self.n]; self.n];
        for &[i, j] in &self.edges {
            a[i][j] = true;
            a[j][i] = true;
        }
        a
    }

    /// Graph with vertex `v` removed; later vertices shift down by one.
    pub fn delete_vertex(&self, v: usize) -> WeightedGraph {
        let re = |i: usize| if i > v { i - 1 } else { i };
        let edges = self
            .edges
            .iter()
            .filter(|e| e[0] != v && e[1] != v)
            .map(|e| [re(e[0]), re(e[1])])
            .collect();
        let weights = self
            .weights
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != v)
            .map(|(_, w)| *w)
            .collect();
        WeightedGraph { n: self.n - 1, edges, weights }
    }

    /// Subgraph induced by `keep`, in the given order.
    pub fn induced(&self, keep: &[usize]) -> WeightedGraph {
        let mut pos = vec![usize::MAX; self.n];
        for (k, &v) in keep.iter().enumerate() {
            pos[v] = k;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| pos[e[0]] != usize::MAX && pos[e[1]] != usize::MAX)
            .map(|e| [pos[e[0]], pos[e[1]]])
            .collect();
        let weights = keep.iter().map(|&v| self.weights[v]).collect();
        WeightedGraph { n: keep.len(), edges, weights }
    }
}

pub fn cycle_graph(n: usize) -> WeightedGraph {
    let edges = (0..n).map(|i| [i, (i + 1) % n]).collect();
    WeightedGraph { n, edges, weights: vec![1.0; n] }
}

pub fn complete_graph(n: usize) -> WeightedGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push([i, j]);
        }
    }
    WeightedGraph { n, edges, weights: vec![1.0; n] }
}

/// Exclusivity graph of the two-party, two-setting, two-outcome Bell scenario
/// (events `(ab|xy)`, adjacent when locally orthogonal) with weights
/// `δ(a⊕b = x·y)`.
pub fn chsh_graph() -> WeightedGraph {
    let st = BellStructure { parties: 2, settings: 2, outcomes: 2 };
    let n = st.num_vertices();
    let mut edges = Vec::new();
    for u in 0..n {
        let (a, x) = st.decode(u);
        for v in u + 1..n {
            let (b, y) = st.decode(v);
            let lo = (0..2).any(|p| x[p] == y[p] && a[p] != b[p]);
            if lo {
                edges.push([u, v]);
            }
        }
    }
    let weights = (0..n)
        .map(|v| {
            let (a, x) = st.decode(v);
            if (a[0] ^ a[1]) == (x[0] & x[1]) {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    WeightedGraph { n, edges, weights }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndependentSet {
    pub value: f64,
    pub vertices: Vec<usize>,
}

type Mask = u128;

struct Mwis<'a> {
    w: &'a [f64],
    nbr: Vec<Mask>,
    best: f64,
    best_set: Mask,
    nodes: u64,
    budget: u64,
}

impl Mwis<'_> {
    fn bound(&self, mut cand: Mask) -> f64 {
        // greedy clique cover: a clique contributes its heaviest member
        let mut total = 0.0;
        while cand != 0 {
            let mut clique_top = 0.0f64;
            let mut allowed = cand;
            while allowed != 0 {
                let v = allowed.trailing_zeros() as usize;
                allowed &= self.nbr[v];
                cand &= !(1 << v);
                clique_top = clique_top.max(self.w[v]);
            }
            total += clique_top;
        }
        total
    }

    fn search(&mut self, cand: Mask, chosen: Mask, value: f64) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::SearchBudgetExceeded(self.budget));
        }
        if value > self.best + 1e-12 {
            self.best = value;
            self.best_set = chosen;
        }
        if cand == 0 || value + self.bound(cand) <= self.best + 1e-12 {
            return Ok(());
        }
        // branch on the heaviest candidate (lowest index on ties)
        let mut v = cand.trailing_zeros() as usize;
        let mut rest = cand;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if self.w[u] > self.w[v] {
                v = u;
            }
        }
        let bit: Mask = 1 << v;
        self.search(cand & !bit & !self.nbr[v], chosen | bit, value + self.w[v])?;
        self.search(cand & !bit, chosen, value)
    }
}

/// Exact maximum-weight independent set by branch and bound.
pub fn independence_number(g: &WeightedGraph) -> Result<IndependentSet> {
    independence_number_with_budget(g, DEFAULT_NODE_BUDGET)
}

pub fn independence_number_with_budget(g: &WeightedGraph, budget: u64) -> Result<IndependentSet> {
    if g.n > 128 {
        return Err(Error::InvalidGraph(format!("{} vertices exceeds the 128-vertex limit", g.n)));
    }
    let mut nbr = vec![0 as Mask; g.n];
    for &[i, j] in &g.edges {
        nbr[i] |= 1 << j;
        nbr[j] |= 1 << i;
    }
    let all: Mask = if g.n == 128 { !0 } else { (1 << g.n) - 1 };
    let mut s = Mwis { w: &g.weights, nbr, best: 0.0, best_set: 0, nodes: 0, budget };
    s.search(all, 0, 0.0)?;
    let vertices = (0..g.n).filter(|&v| s.best_set >> v & 1 == 1).collect();
    Ok(IndependentSet { value: s.best, vertices })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaResult {
    pub value: f64,
    pub iterations: usize,
    pub gap: f64,
}

/// Weighted Lovász theta:
/// `max Σ √(w_i w_j) X_ij` over `X ⪰ 0`, `tr X = 1`, `X_ij = 0` on edges.
pub fn lovasz_theta(g: &WeightedGraph) -> Result<f64> {
    lovasz_theta_detailed(g).map(|r| r.value)
}

pub fn lovasz_theta_detailed(g: &WeightedGraph) -> Result<ThetaResult> {
    let support: Vec<usize> = (0..g.n).filter(|&v| g.weights[v] > 0.0).collect();
    if support.is_empty() {
        return Ok(ThetaResult { value: 0.0, iterations: 0, gap: 0.0 });
    }
    let h = g.induced(&support);
    let edges: Vec<(usize, usize)> = h.edges.iter().map(|e| (e[0].min(e[1]), e[0].max(e[1]))).collect();
    let mut uniq = edges.clone();
    uniq.sort_unstable();
    uniq.dedup();
    let sq: Vec<f64> = h.weights.iter().map(|w| w.sqrt()).collect();
    let j = DMatrix::from_fn(h.n, h.n, |a, b| sq[a] * sq[b]);
    ThetaSdp::new(j, uniq).solve()
}

/// Primal-dual interior point (HKM direction, Mehrotra predictor-corrector)
/// for `min ⟨C,X⟩` with `C = -J`, constraints `tr X = 1` and `X_ij = 0`.
struct ThetaSdp {
    n: usize,
    c: DMatrix<f64>,
    edges: Vec<(usize, usize)>,
}

const SDP_MAX_ITER: usize = 200;
const SDP_EPS: f64 = 1e-10;
/// Accepted when the iteration breaks down numerically close to the optimum.
const SDP_ACCEPT: f64 = 1e-7;

impl ThetaSdp {
    fn new(j: DMatrix<f64>, edges: Vec<(usize, usize)>) -> Self {
        ThetaSdp { n: j.nrows(), c: -j, edges }
    }

    fn m(&self) -> usize {
        1 + self.edges.len()
    }

    /// `⟨A_k, G⟩` for every constraint (G need not be symmetric).
    fn apply(&self, g: &DMatrix<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.m());
        out[0] = g.trace();
        for (k, &(i, j)) in self.edges.iter().enumerate() {
            out[k + 1] = 0.5 * (g[(i, j)] + g[(j, i)]);
        }
        out
    }

    fn adjoint(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let mut a = DMatrix::identity(self.n, self.n) * y[0];
        for (k, &(i, j)) in self.edges.iter().enumerate() {
            a[(i, j)] += 0.5 * y[k + 1];
            a[(j, i)] += 0.5 * y[k + 1];
        }
        a
    }

    fn b(&self) -> DVector<f64> {
        let mut b = DVector::zeros(self.m());
        b[0] = 1.0;
        b
    }

    fn schur(&self, x: &DMatrix<f64>, sinv: &DMatrix<f64>) -> DMatrix<f64> {
        let m = self.m();
        let mut cols = Vec::with_capacity(m);
        cols.push(self.apply(&(x * sinv)));
        for &(i, j) in &self.edges {
            let g = (x.column(i) * sinv.row(j) + x.column(j) * sinv.row(i)) * 0.5;
            cols.push(self.apply(&g));
        }
        let mut mm = DMatrix::from_columns(&cols);
        let t = mm.transpose();
        mm = (mm + t) * 0.5;
        mm
    }

    fn max_step(x: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
        let Some(ch) = x.clone().cholesky() else { return 0.0 };
        let l = ch.l();
        let Some(linv) = l.clone().try_inverse() else { return 0.0 };
        let mut t = &linv * d * linv.transpose();
        let tt = t.transpose();
        t = (t + tt) * 0.5;
        let lmin = SymmetricEigen::new(t).eigenvalues.min();
        if lmin >= 0.0 {
            f64::INFINITY
        } else {
            -1.0 / lmin
        }
    }

    fn solve(&self) -> Result<ThetaResult> {
        let n = self.n;
        let b = self.b();
        let mut x = DMatrix::identity(n, n) / n as f64;
        let mut y = DVector::zeros(self.m());
        y[0] = -(self.c.abs().sum() + 1.0);
        let mut s = &self.c - self.adjoint(&y);
        for it in 0..SDP_MAX_ITER {
            let rp = &b - self.apply(&x);
            let rd = &self.c - self.adjoint(&y) - &s;
            let gap = x.dot(&s);
            let primal = -self.c.dot(&x);
            let dual = -y[0];
            let scale = 1.0 + primal.abs();
            if gap < SDP_EPS * scale && rp.norm() < SDP_EPS && rd.norm() < SDP_EPS * scale {
                return Ok(ThetaResult { value: 0.5 * (primal + dual), iterations: it, gap });
            }
            let near = gap < SDP_ACCEPT * scale && rp.norm() < SDP_ACCEPT && rd.norm() < SDP_ACCEPT * scale;
            let stalled = |it: usize| {
                if near {
                    Ok(ThetaResult { value: 0.5 * (primal + dual), iterations: it, gap })
                } else {
                    Err(Error::SolverDidNotConverge { iterations: it, residual: gap })
                }
            };
            let mu = gap / n as f64;
            let Some(sinv) = s.clone().cholesky().map(|c| c.inverse()) else {
                return stalled(it);
            };
            let schur = self.schur(&x, &sinv);
            let Some(schur_ch) = schur.cholesky() else {
                return stalled(it);
            };
            let a_sinv = self.apply(&sinv);
            let a_xrds = self.apply(&(&x * &rd * &sinv));
            let direction = |sigma: f64, corr: Option<&DMatrix<f64>>| {
                let mut rhs = &b - &a_sinv * (sigma * mu) + &a_xrds;
                if let Some(dd) = corr {
                    rhs += self.apply(dd);
                }
                let dy = schur_ch.solve(&rhs);
                let ds = &rd - self.adjoint(&dy);
                let mut dx = &sinv * (sigma * mu) - &x - &x * &ds * &sinv;
                if let Some(dd) = corr {
                    dx -= dd;
                }
                let dxt = dx.transpose();
                dx = (dx + dxt) * 0.5;
                (dx, dy, ds)
            };
            let (dxa, _, dsa) = direction(0.0, None);
            let ap = (0.98 * Self::max_step(&x, &dxa)).min(1.0);
            let ad = (0.98 * Self::max_step(&s, &dsa)).min(1.0);
            let mu_aff = (&x + &dxa * ap).dot(&(&s + &dsa * ad)) / n as f64;
            let sigma = (mu_aff / mu).powi(3).clamp(0.0, 1.0);
            let corr = &dxa * &dsa * &sinv;
            let (dx, dy, ds) = direction(sigma, Some(&corr));
            let ap = (0.98 * Self::max_step(&x, &dx)).min(1.0);
            let ad = (0.98 * Self::max_step(&s, &ds)).min(1.0);
            if ap <= 0.0 || ad <= 0.0 {
                return stalled(it);
            }
            x += &dx * ap;
            y += &dy * ad;
            s += &ds * ad;
        }
        let gap = x.dot(&s);
        Err(Error::SolverDidNotConverge { iterations: SDP_MAX_ITER, residual: gap })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CswReport {
    pub alpha: f64,
    pub theta: f64,
    pub witness: Vec<usize>,
}

/// Classical and quantum bounds of `Σ w_i p_i` together.
pub fn csw_report(g: &WeightedGraph) -> Result<CswReport> {
    let a = independence_number(g)?;
    let theta = lovasz_theta(g)?;
    if a.value > theta + THETA_TOL {
        return Err(Error::SolverDidNotConverge { iterations: 0, residual: a.value - theta });
    }
    Ok(CswReport { alpha: a.value, theta, witness: a.vertices })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pentagon() {
        let g = cycle_graph(5);
        assert_eq!(independence_number(&g).unwrap().value, 2.0);
        assert!((lovasz_theta(&g).unwrap() - 5f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn complete_and_edgeless() {
        for n in 1..6 {
            assert!((lovasz_theta(&complete_graph(n)).unwrap() - 1.0).abs() < 1e-6);
            let e = WeightedGraph::unweighted(n, vec![]).unwrap();
            assert!((lovasz_theta(&e).unwrap() - n as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn odd_cycle_closed_form() {
        // θ(C_n) = n cos(π/n) / (1 + cos(π/n)) for odd n
        for n in [7usize, 9] {
            let c = (std::f64::consts::PI / n as f64).cos();
            let want = n as f64 * c / (1.0 + c);
            assert!((lovasz_theta(&cycle_graph(n)).unwrap() - want).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_weights_dropped() {
        let g = WeightedGraph::new(3, vec![[0, 1]], vec![0.0, 0.0, 0.0]).unwrap();
        assert_eq!(lovasz_theta(&g).unwrap(), 0.0);
    }
}
