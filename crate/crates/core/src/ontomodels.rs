//! Ontological models: finite hidden-variable accounts, the toy theory of
//! four ontic states, a continuous qubit model, a preparation-contextuality
//! proof by linear programming, and the noncontextual bound on the
//! eighteen-vector predictability inequality.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{verify_farkas, Cmp, LinearProgram, LpOutcome, LP_TOL};
use crate::quantum_kernel::{born_probability, Cabello18, Ket, Pvm};
use crate::scenario::Scenario;

pub const MODEL_TOL: f64 = 1e-9;

/// Finite ontic space with named preparations and measurements.
///
/// `preparations[P][λ]` is μ_P(λ); `measurements[M][k][λ]` is ξ_{M,k}(λ).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OntologicalModel {
    pub ontic_labels: Vec<String>,
    pub preparations: BTreeMap<String, Vec<f64>>,
    pub measurements: BTreeMap<String, Vec<Vec<f64>>>,
}

impl OntologicalModel {
    pub fn new(ontic_labels: Vec<String>) -> Self {
        OntologicalModel { ontic_labels, preparations: BTreeMap::new(), measurements: BTreeMap::new() }
    }

    pub fn num_ontic(&self) -> usize {
        self.ontic_labels.len()
    }

    pub fn add_preparation(&mut self, name: &str, mu: Vec<f64>) -> Result<()> {
        if mu.len() != self.num_ontic() {
            return Err(Error::DimensionMismatch(format!("preparation {name} has {} weights", mu.len())));
        }
        if let Some((i, &v)) = mu.iter().enumerate().find(|(_, &v)| !(-MODEL_TOL..=1.0 + MODEL_TOL).contains(&v)) {
            return Err(Error::OutOfRange { vertex: self.ontic_labels[i].clone(), value: v });
        }
        let s: f64 = mu.iter().sum();
        if (s - 1.0).abs() > MODEL_TOL {
            return Err(Error::EdgeNotNormalized { edge: self.preparations.len(), sum: s });
        }
        self.preparations.insert(name.to_string(), mu);
        Ok(())
    }

    pub fn add_measurement(&mut self, name: &str, xi: Vec<Vec<f64>>) -> Result<()> {
        let n = self.num_ontic();
        if xi.is_empty() || xi.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("measurement {name} response shape")));
        }
        for lam in 0..n {
            let mut s = 0.0;
            for r in &xi {
                let v = r[lam];
                if !(-MODEL_TOL..=1.0 + MODEL_TOL).contains(&v) {
                    return Err(Error::OutOfRange { vertex: self.ontic_labels[lam].clone(), value: v });
                }
                s += v;
            }
            if (s - 1.0).abs() > MODEL_TOL {
                return Err(Error::EdgeNotNormalized { edge: lam, sum: s });
            }
        }
        self.measurements.insert(name.to_string(), xi);
        Ok(())
    }

    /// p(k|P,M) = Σ_λ μ_P(λ) ξ_{M,k}(λ).
    pub fn predict(&self, prep: &str, meas: &str) -> Result<Vec<f64>> {
        let mu = self.preparations.get(prep).ok_or_else(|| Error::UnknownName(prep.to_string()))?;
        let xi = self.measurements.get(meas).ok_or_else(|| Error::UnknownName(meas.to_string()))?;
        Ok(xi.iter().map(|r| r.iter().zip(mu).map(|(a, b)| a * b).sum()).collect())
    }
}

/// Beltrametti-Bugajski model restricted to the listed states: the ontic
/// state is the quantum state itself, μ_ψ is a point mass, and the response
/// functions are Born probabilities.
pub fn beltrametti_bugajski(states: &[(&str, Ket)], pvms: &[(&str, Pvm)]) -> Result<OntologicalModel> {
    let mut m = OntologicalModel::new(states.iter().map(|(n, _)| n.to_string()).collect());
    let rhos = states
        .iter()
        .map(|(_, k)| {
            if !k.is_normalized() {
                return Err(Error::NotUnitVector);
            }
            Ok(k.density())
        })
        .collect::<Result<Vec<_>>>()?;
    for (i, (name, _)) in states.iter().enumerate() {
        let mut mu = vec![0.0; states.len()];
        mu[i] = 1.0;
        m.add_preparation(name, mu)?;
    }
    for (name, pvm) in pvms {
        let mut xi = Vec::with_capacity(pvm.len());
        for p in &pvm.projectors {
            xi.push(rhos.iter().map(|rho| born_probability(rho, p)).collect::<Result<Vec<_>>>()?);
        }
        m.add_measurement(name, xi)?;
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// toy theory

/// Ontic states (+,+), (+,-), (-,+), (-,-) in that order.
pub const TOY_ONTIC: [&str; 4] = ["(+,+)", "(+,-)", "(-,+)", "(-,-)"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ToyAxis {
    X,
    Y,
    Z,
}

impl ToyAxis {
    pub const ALL: [ToyAxis; 3] = [ToyAxis::X, ToyAxis::Y, ToyAxis::Z];

    /// Support of the +1 and -1 outcomes as bitmasks over the ontic states.
    /// X asks for the column, Y for the row, Z for their parity.
    pub fn cells(self) -> [u8; 2] {
        match self {
            ToyAxis::X => [0b0011, 0b1100],
            ToyAxis::Y => [0b0101, 0b1010],
            ToyAxis::Z => [0b1001, 0b0110],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ToyAxis::X => "X",
            ToyAxis::Y => "Y",
            ToyAxis::Z => "Z",
        }
    }

    pub fn parse(s: &str) -> Result<ToyAxis> {
        match s.to_ascii_uppercase().as_str() {
            "X" => Ok(ToyAxis::X),
            "Y" => Ok(ToyAxis::Y),
            "Z" => Ok(ToyAxis::Z),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

/// Epistemic state of the toy theory: a uniform distribution over a support
/// of two (maximal knowledge) or four ontic states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ToyState(u8);

impl ToyState {
    pub fn from_support(mask: u8) -> Result<ToyState> {
        let n = mask.count_ones();
        if mask & !0b1111 != 0 || !(n == 2 || n == 4) {
            return Err(Error::InvalidDimension(format!("toy support {mask:#06b} violates knowledge balance")));
        }
        Ok(ToyState(mask))
    }

    pub fn eigenstate(axis: ToyAxis, plus: bool) -> ToyState {
        ToyState(axis.cells()[usize::from(!plus)])
    }

    pub fn mixed() -> ToyState {
        ToyState(0b1111)
    }

    /// The six maximal states followed by the mixed one.
    pub fn all() -> Vec<ToyState> {
        let mut v: Vec<ToyState> =
            ToyAxis::ALL.iter().flat_map(|&a| [ToyState::eigenstate(a, true), ToyState::eigenstate(a, false)]).collect();
        v.push(ToyState::mixed());
        v
    }

    pub fn support(self) -> u8 {
        self.0
    }

    pub fn ontic(self) -> Vec<usize> {
        (0..4).filter(|i| self.0 >> i & 1 == 1).collect()
    }

    pub fn is_maximal(self) -> bool {
        self.0.count_ones() == 2
    }

    /// Uniform μ over the support, exact.
    pub fn distribution(self) -> [Rational64; 4] {
        let n = i64::from(self.0.count_ones());
        std::array::from_fn(|i| if self.0 >> i & 1 == 1 { Rational64::new(1, n) } else { Rational64::from(0) })
    }

    pub fn parse(s: &str) -> Result<ToyState> {
        let s = s.trim();
        if s == "mixed" || s == "I/2" {
            return Ok(ToyState::mixed());
        }
        let (sign, rest) = s.split_at(s.len().min(1));
        let plus = match sign {
            "+" => true,
            "-" => false,
            _ => return Err(Error::UnknownName(s.to_string())),
        };
        Ok(ToyState::eigenstate(ToyAxis::parse(rest).map_err(|_| Error::UnknownName(s.to_string()))?, plus))
    }
}

impl fmt::Display for ToyState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in ToyAxis::ALL {
            let [p, m] = a.cells();
            if self.0 == p {
                return write!(f, "+{}", a.name().to_lowercase());
            }
            if self.0 == m {
                return write!(f, "-{}", a.name().to_lowercase());
            }
        }
        if self.0 == 0b1111 {
            return write!(f, "mixed");
        }
        write!(f, "{{{}}}", self.ontic().iter().map(|&i| TOY_ONTIC[i]).collect::<Vec<_>>().join(";"))
    }
}

/// One line of the measurement-update table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToyUpdate {
    pub state: ToyState,
    pub axis: ToyAxis,
    /// +1 or -1
    pub outcome: i8,
    pub probability: Rational64,
    pub post: Option<ToyState>,
}

/// Outcome probabilities of `axis` on `state`, exact.
pub fn toy_probabilities(state: ToyState, axis: ToyAxis) -> [Rational64; 2] {
    let n = i64::from(state.0.count_ones());
    axis.cells().map(|c| Rational64::new(i64::from((state.0 & c).count_ones()), n))
}

/// Full table: every state, axis and outcome with its probability and the
/// epistemic state left behind. The measurement randomizes the ontic state
/// within the observed cell, so the post-measurement state is that cell.
pub fn toy_update_table() -> Vec<ToyUpdate> {
    let mut out = Vec::new();
    for state in ToyState::all() {
        for axis in ToyAxis::ALL {
            let probs = toy_probabilities(state, axis);
            for (i, c) in axis.cells().into_iter().enumerate() {
                let p = probs[i];
                out.push(ToyUpdate {
                    state,
                    axis,
                    outcome: if i == 0 { 1 } else { -1 },
                    probability: p,
                    post: (p != Rational64::from(0)).then_some(ToyState(c)),
                });
            }
        }
    }
    out
}

/// Samples one measurement using `rng`.
pub fn toy_measure_with<R: Rng + ?Sized>(state: ToyState, axis: ToyAxis, rng: &mut R) -> (i8, ToyState) {
    let ontic = state.ontic();
    let lam = ontic[rng.random_range(0..ontic.len())];
    let [plus, minus] = axis.cells();
    if plus >> lam & 1 == 1 {
        (1, ToyState(plus))
    } else {
        (-1, ToyState(minus))
    }
}

pub fn toy_measure(state: ToyState, axis: ToyAxis, seed: u64) -> (i8, ToyState) {
    toy_measure_with(state, axis, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Fraction of `trials` in which an immediate second measurement of the same
/// axis repeats the first outcome.
pub fn toy_repeatability(state: ToyState, axis: ToyAxis, trials: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agree = 0usize;
    for _ in 0..trials {
        let (k1, s1) = toy_measure_with(state, axis, &mut rng);
        let (k2, _) = toy_measure_with(s1, axis, &mut rng);
        if k1 == k2 {
            agree += 1;
        }
    }
    agree as f64 / trials as f64
}

/// Successive measurements from one seeded generator; each entry is the
/// axis, the outcome and the state left behind.
pub fn toy_sequence(state: ToyState, axes: &[ToyAxis], seed: u64) -> Vec<(ToyAxis, i8, ToyState)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = state;
    axes.iter()
        .map(|&a| {
            let (k, next) = toy_measure_with(cur, a, &mut rng);
            cur = next;
            (a, k, next)
        })
        .collect()
}

/// The toy theory as a finite ontological model, with preparations
/// "+x", "-x", ..., "mixed" and measurements "X", "Y", "Z".
pub fn toy_model() -> OntologicalModel {
    let mut m = OntologicalModel::new(TOY_ONTIC.iter().map(|s| s.to_string()).collect());
    for s in ToyState::all() {
        let mu = s.distribution().iter().map(|r| *r.numer() as f64 / *r.denom() as f64).collect();
        m.add_preparation(&s.to_string(), mu).expect("toy distributions normalize");
    }
    for a in ToyAxis::ALL {
        let xi = a.cells().iter().map(|c| (0..4).map(|l| f64::from(c >> l & 1)).collect()).collect();
        m.add_measurement(a.name(), xi).expect("toy responses normalize");
    }
    m
}

/// Toy reproduction of the Cheshire-cat experiment on two toy bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToyCheshire {
    /// Probability of passing post-selection after finding the photon on the
    /// right path.
    pub right_path: Rational64,
    /// Same after finding it on the right path with circular polarization ±.
    pub right_plus: Rational64,
    pub right_minus: Rational64,
    /// P(post) with no intermediate measurement.
    pub post_direct: Rational64,
    /// P(post) summed over the path outcomes.
    pub post_via_path: Rational64,
    /// P(post) summed over the four path/circular outcomes.
    pub post_via_circular: Rational64,
}

type Pair = (u8, u8);

fn pair_support(a: u8, b: u8) -> Vec<Pair> {
    let mut v = Vec::new();
    for i in 0..4u8 {
        for j in 0..4u8 {
            if a >> i & 1 == 1 && b >> j & 1 == 1 {
                v.push((i, j));
            }
        }
    }
    v
}

fn overlap(cell: &[Pair], post: &[Pair]) -> Rational64 {
    let hits = cell.iter().filter(|p| post.contains(p)).count();
    Rational64::new(hits as i64, cell.len() as i64)
}

/// The qubit encodings |0⟩ ↦ -x and |1⟩ ↦ +x; (|0⟩+|1⟩)/√2 ↦ +z; circular
/// polarizations ↦ ±y. The pre-selection is (+z, -x); the post-selected
/// correlated state has support {(λ,λ)} over the 16 ontic pairs.
pub fn toy_cheshire() -> ToyCheshire {
    let zero = ToyState::eigenstate(ToyAxis::X, false).0;
    let one = ToyState::eigenstate(ToyAxis::X, true).0;
    let plus_z = ToyState::eigenstate(ToyAxis::Z, true).0;
    let [cp, cm] = ToyAxis::Y.cells();
    let pre = pair_support(plus_z, zero);
    let post: Vec<Pair> = (0..4u8).map(|l| (l, l)).collect();

    let p_pre = |cell: &[Pair]| Rational64::new(cell.iter().filter(|p| pre.contains(p)).count() as i64, pre.len() as i64);

    // path only: polarization untouched
    let mut via_path = Rational64::from(0);
    for a in [zero, one] {
        let hit = pair_support(a, 0b1111);
        let after = pair_support(a, zero);
        via_path += p_pre(&hit) * overlap(&after, &post);
    }
    let mut via_circ = Rational64::from(0);
    for a in [zero, one] {
        for b in [cp, cm] {
            let cell = pair_support(a, b);
            via_circ += p_pre(&cell) * overlap(&cell, &post);
        }
    }
    ToyCheshire {
        right_path: overlap(&pair_support(one, zero), &post),
        right_plus: overlap(&pair_support(one, cp), &post),
        right_minus: overlap(&pair_support(one, cm), &post),
        post_direct: overlap(&pre, &post),
        post_via_path: via_path,
        post_via_circular: via_circ,
    }
}

// ---------------------------------------------------------------------------
// continuous qubit model

pub const KS_DEFAULT_RESOLUTION: usize = 128;
pub const KS_MIN_RESOLUTION: usize = 64;

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, nodes: &(Vec<f64>, Vec<f64>)) -> f64 {
    let (h, m) = ((b - a) / 2.0, (a + b) / 2.0);
    nodes.0.iter().zip(&nodes.1).map(|(x, w)| w * f(m + h * x)).sum::<f64>() * h
}

fn unit(v: &[f64; 3]) -> Result<()> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnitVector);
    }
    Ok(())
}

/// ∫ dλ (1/π) H(ψ·λ) (ψ·λ) H(φ·λ) over the unit sphere.
///
/// Coordinates are polar about ψ. The azimuthal integral of the indicator
/// H(φ·λ) is done in closed form; the polar integral uses Gauss-Legendre
/// with `resolution` nodes on each side of the kink at |π/2 - γ|.
pub fn ks_qubit_predict(psi: &[f64; 3], phi: &[f64; 3], resolution: usize) -> Result<f64> {
    use std::f64::consts::{FRAC_PI_2, PI};
    unit(psi)?;
    unit(phi)?;
    if resolution < KS_MIN_RESOLUTION {
        return Err(Error::InvalidDimension(format!("quadrature resolution {resolution} below {KS_MIN_RESOLUTION}")));
    }
    let cg = psi.iter().zip(phi).map(|(a, b)| a * b).sum::<f64>().clamp(-1.0, 1.0);
    let gamma = cg.acos();
    let sg = gamma.sin();
    let arc = |t: f64| {
        let (st, ct) = t.sin_cos();
        let den = sg * st;
        if den < 1e-300 {
            return if cg * ct > 0.0 { 2.0 * PI } else { 0.0 };
        }
        2.0 * (-cg * ct / den).clamp(-1.0, 1.0).acos()
    };
    let f = |t: f64| t.cos() * t.sin() * arc(t);
    let nodes = gauss_legendre(resolution);
    let kink = (FRAC_PI_2 - gamma).abs();
    let mut total = integrate(&f, kink, FRAC_PI_2, &nodes);
    if kink > 0.0 {
        total += integrate(&f, 0.0, kink, &nodes);
    }
    Ok(total / PI)
}

// ---------------------------------------------------------------------------
// preparation contextuality

/// Which constraints enter the preparation-contextuality LP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrepOptions {
    /// Require I/2 = (a+b+c)/3 = (A+B+C)/3.
    pub thirds: bool,
    /// Forbid cells that contain both members of an orthogonal pair.
    pub disjoint: bool,
}

impl Default for PrepOptions {
    fn default() -> Self {
        PrepOptions { thirds: true, disjoint: true }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PrepReport {
    pub options: PrepOptions,
    pub cells: usize,
    pub variables: usize,
    pub feasible: bool,
    /// Largest total mass μ_{I/2} can carry when the preparations are only
    /// required to have mass at most one.
    pub max_mixed_mass: f64,
    pub farkas: Option<Vec<f64>>,
    pub farkas_verified: bool,
}

/// Preparations a, A, b, B, c, C where (a, A), (b, B), (c, C) are orthogonal
/// pairs and a, b, c (resp. A, B, C) are trine states. A cell records which
/// supports contain it; only membership matters to every constraint.
pub const PREPARATIONS: [&str; 6] = ["a", "A", "b", "B", "c", "C"];

fn prep_lp(opts: PrepOptions, relaxed_norm: bool) -> (LinearProgram, usize) {
    let cells: Vec<u8> = (0u8..64)
        .filter(|m| !opts.disjoint || (0..3).all(|p| m >> (2 * p) & 0b11 != 0b11))
        .collect();
    // variable per (cell, preparation in cell)
    let mut index = vec![[usize::MAX; 6]; cells.len()];
    let mut nv = 0;
    for (ci, &m) in cells.iter().enumerate() {
        for (p, slot) in index[ci].iter_mut().enumerate() {
            if m >> p & 1 == 1 {
                *slot = nv;
                nv += 1;
            }
        }
    }
    let mut lp = LinearProgram::new(nv);
    let mut obj = vec![0.0; nv];
    for idx in &index {
        // linear form Σ coef·m_p
        let form = |coefs: &[(usize, f64)]| {
            let mut row = vec![0.0; nv];
            for &(p, c) in coefs {
                if idx[p] != usize::MAX {
                    row[idx[p]] += c;
                }
            }
            row
        };
        let half = |p: usize, q: usize| form(&[(p, 0.5), (q, 0.5)]);
        let base = half(0, 1);
        for (k, &v) in base.iter().enumerate() {
            obj[k] += v;
        }
        let mut others = vec![half(2, 3), half(4, 5)];
        if opts.thirds {
            let t = 1.0 / 3.0;
            others.push(form(&[(0, t), (2, t), (4, t)]));
            others.push(form(&[(1, t), (3, t), (5, t)]));
        }
        for o in others {
            let row: Vec<f64> = base.iter().zip(&o).map(|(a, b)| a - b).collect();
            if row.iter().any(|&v| v != 0.0) {
                lp.add(row, Cmp::Eq, 0.0);
            }
        }
    }
    for p in 0..6 {
        let mut row = vec![0.0; nv];
        for idx in &index {
            if idx[p] != usize::MAX {
                row[idx[p]] = 1.0;
            }
        }
        lp.add(row, if relaxed_norm { Cmp::Le } else { Cmp::Eq }, 1.0);
    }
    let cells_n = cells.len();
    (if relaxed_norm { lp.maximize(obj) } else { lp }, cells_n)
}

pub fn prep_contextuality(opts: PrepOptions) -> Result<PrepReport> {
    let (lp, cells) = prep_lp(opts, false);
    let variables = lp.n_vars;
    let (feasible, farkas) = match lp.solve()? {
        LpOutcome::Optimal { .. } => (true, None),
        LpOutcome::Infeasible { farkas } => (false, Some(farkas)),
        LpOutcome::Unbounded => (true, None),
    };
    let farkas_verified = farkas.as_ref().is_some_and(|y| verify_farkas(&lp, y, LP_TOL));
    let (relaxed, _) = prep_lp(opts, true);
    let max_mixed_mass = match relaxed.solve()? {
        LpOutcome::Optimal { value, .. } => value,
        _ => return Err(Error::SolverDidNotConverge { iterations: 0, residual: f64::NAN }),
    };
    Ok(PrepReport { options: opts, cells, variables, feasible, max_mixed_mass, farkas, farkas_verified })
}

/// The full system: 27 cells, no valid epistemic states.
pub fn prep_contextuality_infeasible() -> Result<PrepReport> {
    prep_contextuality(PrepOptions::default())
}

// ---------------------------------------------------------------------------
// predictability bound on the 18-vector hypergraph

pub const KS_SELECTION_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, Serialize)]
pub struct NcBound {
    /// max over noncontextual assignments of (1/|E|) Σ_e max_{v∈e} p(v)
    pub value: f64,
    /// One optimal vertex per edge.
    pub selection: Vec<usize>,
    pub assignment: Vec<f64>,
    pub selections_examined: u64,
}

/// Enumerates one candidate argmax per edge and solves the LP maximizing the
/// selected values subject to per-edge normalization. Vertex sharing is
/// enforced by using a single variable per vertex.
pub fn nc_bound(s: &Scenario) -> Result<NcBound> {
    nc_bound_with_limit(s, KS_SELECTION_LIMIT)
}

pub fn nc_bound_with_limit(s: &Scenario, limit: u64) -> Result<NcBound> {
    let edges = s.edges();
    let total = edges.iter().try_fold(1u64, |acc, e| acc.checked_mul(e.len() as u64)).unwrap_or(u64::MAX);
    if total > limit {
        return Err(Error::SearchBudgetExceeded(limit));
    }
    let n = s.num_vertices();
    let m = edges.len() as f64;
    let mut base = LinearProgram::new(n);
    for e in edges {
        let mut row = vec![0.0; n];
        for &v in e {
            row[v] = 1.0;
        }
        base.add(row, Cmp::Eq, 1.0);
    }
    let decode = |mut code: u64| {
        let mut sel = vec![0usize; edges.len()];
        for (i, e) in edges.iter().enumerate().rev() {
            let k = e.len() as u64;
            sel[i] = e[(code % k) as usize];
            code /= k;
        }
        sel
    };
    let best = (0..total)
        .into_par_iter()
        .map(|code| -> std::result::Result<(f64, u64, Vec<f64>), Error> {
            let sel = decode(code);
            let mut obj = vec![0.0; n];
            for &v in &sel {
                obj[v] += 1.0 / m;
            }
            let lp = LinearProgram { objective: obj, ..base.clone() };
            match lp.solve()? {
                LpOutcome::Optimal { x, value } => Ok((value, code, x)),
                LpOutcome::Infeasible { .. } => Ok((f64::NEG_INFINITY, code, Vec::new())),
                LpOutcome::Unbounded => Err(Error::SolverDidNotConverge { iterations: 0, residual: f64::INFINITY }),
            }
        })
        .try_reduce(
            || (f64::NEG_INFINITY, u64::MAX, Vec::new()),
            |a, b| {
                // larger value wins; ties go to the smaller code
                let better = b.0 > a.0 + LP_TOL || ((b.0 - a.0).abs() <= LP_TOL && b.1 < a.1);
                Ok(if better { b } else { a })
            },
        )?;
    if !best.0.is_finite() {
        return Err(Error::EdgeNotNormalized { edge: 0, sum: 0.0 });
    }
    Ok(NcBound { value: best.0, selection: decode(best.1), assignment: best.2, selections_examined: total })
}

/// (1/|E|) Σ_e max_{v∈e} p(v), exact. Every edge must sum to one.
pub fn predictability(s: &Scenario, p: &[Rational64]) -> Result<Rational64> {
    if p.len() != s.num_vertices() {
        return Err(Error::DimensionMismatch(format!("{} values for {} vertices", p.len(), s.num_vertices())));
    }
    let zero = Rational64::from(0);
    let one = Rational64::from(1);
    for (v, x) in p.iter().enumerate() {
        if *x < zero || *x > one {
            return Err(Error::OutOfRange { vertex: s.vertices()[v].clone(), value: *x.numer() as f64 / *x.denom() as f64 });
        }
    }
    let mut acc = zero;
    for (i, e) in s.edges().iter().enumerate() {
        let sum: Rational64 = e.iter().map(|&v| p[v]).sum();
        if sum != one {
            return Err(Error::EdgeNotNormalized { edge: i, sum: *sum.numer() as f64 / *sum.denom() as f64 });
        }
        acc += e.iter().map(|&v| p[v]).max().expect("edges are nonempty");
    }
    Ok(acc / Rational64::from(s.num_edges() as i64))
}

/// Finds an assignment with values in {0, 1/2, 1} in which exactly
/// `whole_edges` edges contain a 1 and every other edge splits into two
/// halves on vertices it shares. Vertices are filled in index order with
/// 0 tried before 1/2 before 1.
pub fn half_integral_assignment(s: &Scenario, whole_edges: usize) -> Option<Vec<Rational64>> {
    let n = s.num_vertices();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in s.edges().iter().enumerate() {
        for &v in e {
            incident[v].push(i);
        }
    }
    let last: Vec<usize> = s.edges().iter().map(|e| *e.iter().max().expect("nonempty")).collect();
    struct St<'a> {
        incident: &'a [Vec<usize>],
        last: &'a [usize],
        sum: Vec<u8>,
        wholes: Vec<bool>,
        vals: Vec<u8>,
        target: usize,
    }
    fn go(st: &mut St, v: usize) -> bool {
        if v == st.vals.len() {
            return st.wholes.iter().filter(|&&w| w).count() == st.target;
        }
        let inc = st.incident;
        for x in 0..=2u8 {
            let ok = inc[v].iter().all(|&e| st.sum[e] + x <= 2 && (st.last[e] != v || st.sum[e] + x == 2));
            if !ok {
                continue;
            }
            for &e in &inc[v] {
                st.sum[e] += x;
                if x == 2 {
                    st.wholes[e] = true;
                }
            }
            if st.wholes.iter().filter(|&&w| w).count() <= st.target {
                st.vals[v] = x;
                if go(st, v + 1) {
                    return true;
                }
            }
            for &e in &inc[v] {
                st.sum[e] -= x;
                if x == 2 {
                    st.wholes[e] = false;
                }
            }
        }
        false
    }
    let mut st = St {
        incident: &incident,
        last: &last,
        sum: vec![0; s.num_edges()],
        wholes: vec![false; s.num_edges()],
        vals: vec![0; n],
        target: whole_edges,
    };
    go(&mut st, 0).then(|| st.vals.iter().map(|&x| Rational64::new(i64::from(x), 2)).collect())
}

/// Average of p(k|M_i, P_{i,k}) over all edges and outcomes when P_{i,k} is
/// the eigenstate of outcome k.
pub fn eigenstate_predictability(c: &Cabello18) -> Result<f64> {
    let mut acc = 0.0;
    let mut count = 0usize;
    for (e, pvm) in c.scenario.edges().iter().zip(&c.pvms) {
        for (k, &v) in e.iter().enumerate() {
            acc += born_probability(&c.vectors[v].density(), &pvm.projectors[k])?;
            count += 1;
        }
    }
    Ok(acc / count as f64)
}

#[derive(Debug, Clone)]
pub struct KsBoundReport {
    pub nc: NcBound,
    pub quantum_value: f64,
    pub example_assignment: Vec<Rational64>,
    pub example_value: Rational64,
}

/// Noncontextual bound, quantum value and a six-whole/three-split example
/// assignment for a validated 18-vector configuration.
pub fn kunjwal_spekkens_bound(c: &Cabello18) -> Result<KsBoundReport> {
    let s = &c.scenario;
    if s.num_vertices() != 18 || s.num_edges() != 9 || s.degrees().iter().any(|&d| d != 2) {
        return Err(Error::IncidenceMismatch("expected an 18-vertex, 9-edge hypergraph of degree 2".into()));
    }
    let nc = nc_bound(s)?;
    let quantum_value = eigenstate_predictability(c)?;
    let example_assignment = half_integral_assignment(s, 6)
        .ok_or_else(|| Error::IncidenceMismatch("no half-integral example assignment".into()))?;
    let example_value = predictability(s, &example_assignment)?;
    Ok(KsBoundReport { nc, quantum_value, example_assignment, example_value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let nodes = gauss_legendre(8);
        let v = integrate(&|x: f64| x.powi(14) + x.powi(3), -1.0, 1.0, &nodes);
        assert!((v - 2.0 / 15.0).abs() < 1e-13);
        let w: f64 = nodes.1.iter().sum();
        assert!((w - 2.0).abs() < 1e-13);
    }

    #[test]
    fn toy_state_names_roundtrip() {
        for s in ToyState::all() {
            assert_eq!(ToyState::parse(&s.to_string()).unwrap(), s);
        }
        assert!(ToyState::from_support(0b0001).is_err());
        assert!(ToyState::from_support(0b0111).is_err());
    }

    #[test]
    fn low_resolution_rejected() {
        let z = [0.0, 0.0, 1.0];
        assert!(ks_qubit_predict(&z, &z, 63).is_err());
        assert_eq!(ks_qubit_predict(&[0.0, 0.0, 2.0], &z, 64), Err(Error::NotUnitVector));
    }
}
