//! Dense complex linear algebra and the concrete quantum realizations:
//! KCBS, the Mermin-Peres square, the 18-vector KS set and weak POVMs.

use std::f64::consts::PI;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scenario::Scenario;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const MEASUREMENT_TOL: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ket(pub CVec);

impl Ket {
    pub fn new(amps: Vec<Complex64>) -> Ket {
        Ket(CVec::from_vec(amps))
    }

    pub fn real(amps: &[f64]) -> Ket {
        Ket(CVec::from_iterator(amps.len(), amps.iter().map(|&a| r(a))))
    }

    /// Computational basis vector `|i⟩` in dimension `d`.
    pub fn basis(d: usize, i: usize) -> Ket {
        let mut v = CVec::zeros(d);
        v[i] = r(1.0);
        Ket(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn normalized(&self) -> Ket {
        Ket(&self.0 / r(self.norm()))
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= HERMITIAN_TOL
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Ket) -> Complex64 {
        self.0.dotc(&other.0)
    }

    pub fn projector(&self) -> CMat {
        &self.0 * self.0.adjoint()
    }

    pub fn density(&self) -> HermitianOp {
        HermitianOp(self.normalized().projector())
    }

    pub fn kron(&self, other: &Ket) -> Ket {
        Ket(self.0.kronecker(&other.0))
    }

    pub fn apply(&self, m: &CMat) -> Ket {
        Ket(m * &self.0)
    }
}

/// Haar-random pure state from normalized complex Gaussians.
pub fn random_ket<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Ket {
    let amps = (0..d)
        .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    Ket::new(amps).normalized()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOp(pub CMat);

impl HermitianOp {
    pub fn new(m: CMat) -> Result<HermitianOp> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch("operator is not square".into()));
        }
        if (&m - m.adjoint()).iter().any(|z| z.norm() > HERMITIAN_TOL) {
            return Err(Error::DimensionMismatch("operator is not Hermitian".into()));
        }
        Ok(HermitianOp(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = SymmetricEigen::new(self.0.clone()).eigenvalues.iter().copied().collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    pub fn expectation(&self, k: &Ket) -> f64 {
        k.0.dotc(&(&self.0 * &k.0)).re
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.eigenvalues().first().is_none_or(|&l| l >= -tol)
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        (&self.0 * &self.0 - &self.0).iter().all(|z| z.norm() <= tol)
    }
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn sigma_x() -> CMat {
    CMat::from_row_slice(2, 2, &[r(0.0), r(1.0), r(1.0), r(0.0)])
}

pub fn sigma_y() -> CMat {
    CMat::from_row_slice(2, 2, &[r(0.0), c(0.0, -1.0), c(0.0, 1.0), r(0.0)])
}

pub fn sigma_z() -> CMat {
    CMat::from_row_slice(2, 2, &[r(1.0), r(0.0), r(0.0), r(-1.0)])
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_all(ms: &[CMat]) -> CMat {
    ms.iter().skip(1).fold(ms[0].clone(), |acc, m| acc.kronecker(m))
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn von_neumann_entropy(rho: &HermitianOp) -> f64 {
    rho.eigenvalues().into_iter().filter(|&l| l > 1e-15).map(|l| -l * l.log2()).sum()
}

pub fn binary_entropy(p: f64) -> f64 {
    shannon_entropy(&[p, 1.0 - p])
}

pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

/// `Tr(ρE)` clamped to `[0,1]`.
pub fn born_probability(state: &HermitianOp, effect: &HermitianOp) -> Result<f64> {
    if state.dim() != effect.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", state.dim(), effect.dim())));
    }
    if (state.0.trace().re - 1.0).abs() > MEASUREMENT_TOL || !state.is_psd(MEASUREMENT_TOL) {
        return Err(Error::NotAState);
    }
    let ev = effect.eigenvalues();
    if ev.first().is_some_and(|&l| l < -MEASUREMENT_TOL) || ev.last().is_some_and(|&l| l > 1.0 + MEASUREMENT_TOL) {
        return Err(Error::NotAnEffect);
    }
    let p = (&state.0 * &effect.0).trace().re;
    Ok(p.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    pub effects: Vec<HermitianOp>,
}

impl Povm {
    pub fn new(effects: Vec<CMat>) -> Result<Povm> {
        let effects = effects.into_iter().map(HermitianOp::new).collect::<Result<Vec<_>>>()?;
        let d = effects.first().map(|e| e.dim()).ok_or(Error::NotAnEffect)?;
        if effects.iter().any(|e| e.dim() != d) {
            return Err(Error::DimensionMismatch("effects of different sizes".into()));
        }
        if effects.iter().any(|e| !e.is_psd(MEASUREMENT_TOL)) {
            return Err(Error::NotAnEffect);
        }
        let sum = effects.iter().fold(CMat::zeros(d, d), |acc, e| acc + &e.0);
        if max_abs_diff(&sum, &identity(d)) > MEASUREMENT_TOL {
            return Err(Error::NotAnEffect);
        }
        Ok(Povm { effects })
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn is_projective(&self) -> bool {
        self.effects.iter().all(|e| e.is_projector(MEASUREMENT_TOL))
    }

    pub fn probabilities(&self, rho: &HermitianOp) -> Result<Vec<f64>> {
        self.effects.iter().map(|e| born_probability(rho, e)).collect()
    }
}

/// Projective measurement: a complete family of orthogonal projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Pvm {
    pub projectors: Vec<HermitianOp>,
}

impl Pvm {
    pub fn new(projectors: Vec<CMat>) -> Result<Pvm> {
        let povm = Povm::new(projectors)?;
        let p = povm.effects;
        for (i, a) in p.iter().enumerate() {
            if !a.is_projector(MEASUREMENT_TOL) {
                return Err(Error::NotAnEffect);
            }
            for b in &p[i + 1..] {
                if (&a.0 * &b.0).iter().any(|z| z.norm() > MEASUREMENT_TOL) {
                    return Err(Error::NotAnEffect);
                }
            }
        }
        Ok(Pvm { projectors: p })
    }

    /// Rank-one projectors onto the given (normalized) kets.
    pub fn from_kets(kets: &[Ket]) -> Result<Pvm> {
        Pvm::new(kets.iter().map(|k| k.normalized().projector()).collect())
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KcbsRealization {
    /// Squared norms of the vectors as typeset, in the typeset order.
    pub printed_norms_sq: Vec<f64>,
    /// Unit vectors ordered so consecutive ones (cyclically) are orthogonal.
    #[serde(skip)]
    pub vectors: Vec<Ket>,
    #[serde(skip)]
    pub projectors: Vec<HermitianOp>,
    #[serde(skip)]
    pub state: Ket,
    /// Labels of the typeset vectors in cyclic order.
    pub order: Vec<usize>,
    pub probabilities: Vec<f64>,
    pub beta: f64,
    pub alpha_corr: f64,
    pub max_adjacent_overlap: f64,
}

fn kcbs_raw(angle: f64, scale: f64) -> [f64; 3] {
    let h = (PI / 5.0).cos().sqrt();
    [scale * angle.cos(), scale * angle.sin(), scale * h]
}

/// The five vectors as typeset: `ν1 = (1,0,√cos(π/5))/√2`,
/// `ν2..ν5 = (cos θ, sin θ, √cos(π/5))/√3` for θ = 4π/5, −2π/5, −4π/5, 2π/5.
pub fn kcbs_printed_vectors() -> Vec<[f64; 3]> {
    let s2 = 1.0 / 2f64.sqrt();
    let s3 = 1.0 / 3f64.sqrt();
    vec![
        kcbs_raw(0.0, s2),
        kcbs_raw(4.0 * PI / 5.0, s3),
        kcbs_raw(-2.0 * PI / 5.0, s3),
        kcbs_raw(-4.0 * PI / 5.0, s3),
        kcbs_raw(2.0 * PI / 5.0, s3),
    ]
}

/// KCBS pentagram in ℝ³ with the state `(0,0,1)`.
///
/// The typeset vectors share their directions with this realization but are
/// not unit vectors, and `ν4`, `ν5` must be swapped for consecutive vectors
/// to be orthogonal. Both facts are reported in the returned value.
pub fn kcbs_realization() -> KcbsRealization {
    let printed = kcbs_printed_vectors();
    let printed_norms_sq = printed.iter().map(|v| v.iter().map(|x| x * x).sum()).collect();
    let order = vec![1, 2, 3, 5, 4];
    let vectors: Vec<Ket> = order
        .iter()
        .map(|&i| Ket::real(&printed[i - 1]).normalized())
        .collect();
    let projectors: Vec<HermitianOp> = vectors.iter().map(|k| HermitianOp(k.projector())).collect();
    let state = Ket::real(&[0.0, 0.0, 1.0]);
    let probabilities: Vec<f64> = projectors.iter().map(|p| p.expectation(&state)).collect();
    let beta = probabilities.iter().sum();
    let id = identity(3);
    let obs: Vec<CMat> = projectors.iter().map(|p| &p.0 * r(2.0) - &id).collect();
    let alpha_corr = (0..5)
        .map(|i| HermitianOp(&obs[i] * &obs[(i + 1) % 5]).expectation(&state))
        .sum();
    let max_adjacent_overlap = (0..5)
        .map(|i| vectors[i].inner(&vectors[(i + 1) % 5]).norm())
        .fold(0.0, f64::max);
    KcbsRealization {
        printed_norms_sq,
        vectors,
        projectors,
        state,
        order,
        probabilities,
        beta,
        alpha_corr,
        max_adjacent_overlap,
    }
}

#[derive(Debug, Clone)]
pub struct MerminPeres {
    pub names: [[&'static str; 3]; 3],
    pub grid: [[CMat; 3]; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductCheck {
    pub label: String,
    pub sign: i32,
    pub commuting: bool,
}

/// Two-qubit Mermin-Peres square: rows `A B C`, `a b c`, `α β γ`.
pub fn mermin_peres_square() -> MerminPeres {
    let (i, x, y, z) = (identity(2), sigma_x(), sigma_y(), sigma_z());
    MerminPeres {
        names: [["A", "B", "C"], ["a", "b", "c"], ["alpha", "beta", "gamma"]],
        grid: [
            [kron(&z, &i), kron(&i, &z), kron(&z, &z)],
            [kron(&i, &x), kron(&x, &i), kron(&x, &x)],
            [kron(&z, &x), kron(&x, &z), kron(&y, &y)],
        ],
    }
}

fn product_sign(ops: &[&CMat]) -> (i32, bool) {
    let d = ops[0].nrows();
    let p = ops.iter().fold(identity(d), |acc, m| acc * *m);
    let commuting = ops.iter().enumerate().all(|(k, a)| {
        ops[k + 1..].iter().all(|b| max_abs_diff(&(*a * *b), &(*b * *a)) == 0.0)
    });
    let id = identity(d);
    let sign = if p == id {
        1
    } else if p == -id {
        -1
    } else {
        0
    };
    (sign, commuting)
}

impl MerminPeres {
    /// Exact product of each row then each column (entries are small integers).
    pub fn products(&self) -> Vec<ProductCheck> {
        let mut out = Vec::new();
        for row in 0..3 {
            let ops: Vec<&CMat> = self.grid[row].iter().collect();
            let (sign, commuting) = product_sign(&ops);
            out.push(ProductCheck { label: self.names[row].concat(), sign, commuting });
        }
        for col in 0..3 {
            let ops: Vec<&CMat> = (0..3).map(|row| &self.grid[row][col]).collect();
            let (sign, commuting) = product_sign(&ops);
            let label = (0..3).map(|row| self.names[row][col]).collect::<Vec<_>>().concat();
            out.push(ProductCheck { label, sign, commuting });
        }
        out
    }

    /// `⟨ABC⟩+⟨abc⟩+⟨αβγ⟩+⟨Aaα⟩+⟨Bbβ⟩−⟨Ccγ⟩`
    pub fn chi(&self, rho: &HermitianOp) -> f64 {
        let g = &self.grid;
        let e = |a: &CMat, b: &CMat, cc: &CMat| (&rho.0 * a * b * cc).trace().re;
        e(&g[0][0], &g[0][1], &g[0][2])
            + e(&g[1][0], &g[1][1], &g[1][2])
            + e(&g[2][0], &g[2][1], &g[2][2])
            + e(&g[0][0], &g[1][0], &g[2][0])
            + e(&g[0][1], &g[1][1], &g[2][1])
            - e(&g[0][2], &g[1][2], &g[2][2])
    }
}

/// Bases of the 18-vector set as indices into the vector list.
pub const CABELLO18_BASES: [[usize; 4]; 9] = [
    [0, 1, 2, 3],
    [0, 4, 5, 6],
    [7, 8, 2, 9],
    [7, 10, 6, 11],
    [1, 4, 12, 13],
    [8, 10, 13, 14],
    [15, 16, 3, 9],
    [15, 17, 5, 11],
    [16, 17, 12, 14],
];

pub const CABELLO18_DATA: &str = include_str!("../data/cabello18.txt");

/// Parses one complex vector per line; `#` starts a comment line.
pub fn parse_vectors(text: &str) -> Result<Vec<Ket>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let amps = line
            .split_whitespace()
            .map(|t| {
                Complex64::from_str(t).map_err(|_| Error::Parse(format!("line {}: bad number {t:?}", ln + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(Ket::new(amps));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Cabello18 {
    pub vectors: Vec<Ket>,
    pub pvms: Vec<Pvm>,
    pub scenario: Scenario,
}

/// Validates the supplied vectors against the nine-basis incidence structure.
pub fn cabello18(vectors: Vec<Ket>) -> Result<Cabello18> {
    if vectors.len() != 18 {
        return Err(Error::IncidenceMismatch(format!("expected 18 vectors, got {}", vectors.len())));
    }
    if let Some(k) = vectors.iter().position(|v| v.dim() != 4) {
        return Err(Error::IncidenceMismatch(format!("vector {} is not four-dimensional", k + 1)));
    }
    let mut pvms = Vec::with_capacity(9);
    for (k, basis) in CABELLO18_BASES.iter().enumerate() {
        let kets: Vec<Ket> = basis.iter().map(|&i| vectors[i].clone()).collect();
        if kets.iter().any(|k| (k.norm() - 1.0).abs() > MEASUREMENT_TOL) {
            return Err(Error::NotAPVM(k));
        }
        let pvm = Pvm::new(kets.iter().map(|k| k.projector()).collect()).map_err(|_| Error::NotAPVM(k))?;
        pvms.push(pvm);
    }
    // the orthogonal 4-sets must be exactly the nine listed bases
    let orth = |a: usize, b: usize| vectors[a].inner(&vectors[b]).norm() <= MEASUREMENT_TOL;
    let mut cliques = Vec::new();
    for a in 0..18 {
        for b in a + 1..18 {
            if !orth(a, b) {
                continue;
            }
            for cc in b + 1..18 {
                if !(orth(a, cc) && orth(b, cc)) {
                    continue;
                }
                for d in cc + 1..18 {
                    if orth(a, d) && orth(b, d) && orth(cc, d) {
                        cliques.push([a, b, cc, d]);
                    }
                }
            }
        }
    }
    let mut listed: Vec<[usize; 4]> = CABELLO18_BASES
        .iter()
        .map(|b| {
            let mut s = *b;
            s.sort_unstable();
            s
        })
        .collect();
    listed.sort_unstable();
    if cliques != listed {
        return Err(Error::IncidenceMismatch(format!(
            "{} orthogonal bases found, expected the 9 listed",
            cliques.len()
        )));
    }
    let names = (1..=18).map(|i| format!("u{i}")).collect();
    let edges = CABELLO18_BASES.iter().map(|b| b.to_vec()).collect();
    let scenario = Scenario::from_indices(names, edges)?;
    if scenario.degrees().iter().any(|&d| d != 2) {
        return Err(Error::IncidenceMismatch("a vector is not shared by exactly two bases".into()));
    }
    Ok(Cabello18 { vectors, pvms, scenario })
}

pub fn cabello18_default() -> Cabello18 {
    cabello18(parse_vectors(CABELLO18_DATA).expect("bundled data parses")).expect("bundled data is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WeakVariant {
    RareClick,
    Symmetric,
}

#[derive(Debug, Clone)]
pub struct WeakPovm {
    pub epsilon: f64,
    pub variant: WeakVariant,
    pub povm: Povm,
    pub kraus: Vec<CMat>,
}

fn diag(a: f64, b: f64) -> CMat {
    CMat::from_row_slice(2, 2, &[r(a), r(0.0), r(0.0), r(b)])
}

/// Two-outcome qubit measurement of strength `ε`.
///
/// Rare click: `E0 = |0⟩⟨0| + (1−ε)|1⟩⟨1|`, `E1 = ε|1⟩⟨1|`.
/// Symmetric: `E0 = diag((1+ε)/2, (1−ε)/2)`, `E1 = diag((1−ε)/2, (1+ε)/2)`.
/// Kraus operators are the positive square roots of the effects.
pub fn weak_povm(epsilon: f64, variant: WeakVariant) -> Result<WeakPovm> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    let (e0, e1) = match variant {
        WeakVariant::RareClick => ((1.0, 1.0 - epsilon), (0.0, epsilon)),
        WeakVariant::Symmetric => (
            ((1.0 + epsilon) / 2.0, (1.0 - epsilon) / 2.0),
            ((1.0 - epsilon) / 2.0, (1.0 + epsilon) / 2.0),
        ),
    };
    let povm = Povm::new(vec![diag(e0.0, e0.1), diag(e1.0, e1.1)])?;
    let kraus = vec![diag(e0.0.sqrt(), e0.1.sqrt()), diag(e1.0.sqrt(), e1.1.sqrt())];
    Ok(WeakPovm { epsilon, variant, povm, kraus })
}

impl WeakPovm {
    /// Outcome probability and normalized post-measurement state `A_k|ψ⟩/√p_k`.
    pub fn measure(&self, psi: &Ket, k: usize) -> (f64, Option<Ket>) {
        let p = self.povm.effects[k].expectation(psi);
        if p <= 1e-15 {
            return (p, None);
        }
        let post = Ket(&self.kraus[k] * &psi.0 / r(p.sqrt()));
        (p, Some(post))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementEntropies {
    pub shannon: f64,
    pub von_neumann_decrease: f64,
}

/// Shannon entropy of the outcomes and `S(ρ) − Σ_k p_k S(ρ_k)` where
/// `ρ_k = A_k ρ A_k† / p_k`.
pub fn measurement_entropies(m: &WeakPovm, rho: &HermitianOp) -> Result<MeasurementEntropies> {
    let probs = m.povm.probabilities(rho)?;
    let before = von_neumann_entropy(rho);
    let mut after = 0.0;
    for (k, &p) in probs.iter().enumerate() {
        if p > 1e-15 {
            let a = &m.kraus[k];
            let post = HermitianOp(a * &rho.0 * a.adjoint() / r(p));
            after += p * von_neumann_entropy(&post);
        }
    }
    Ok(MeasurementEntropies { shannon: shannon_entropy(&probs), von_neumann_decrease: before - after })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn born_basics() {
        let zero = Ket::basis(2, 0).density();
        let one = HermitianOp(Ket::basis(2, 1).projector());
        let plus = Ket::real(&[1.0, 1.0]).density();
        assert_eq!(born_probability(&zero, &HermitianOp(Ket::basis(2, 0).projector())).unwrap(), 1.0);
        assert!((born_probability(&plus, &one).unwrap() - 0.5).abs() < 1e-15);
        let bad = HermitianOp(identity(2));
        assert_eq!(born_probability(&bad, &one), Err(Error::NotAState));
        let big = HermitianOp(identity(2) * r(2.0));
        assert_eq!(born_probability(&zero, &big), Err(Error::NotAnEffect));
    }

    #[test]
    fn printed_kcbs_norms_are_not_one() {
        let k = kcbs_realization();
        let c5 = (PI / 5.0).cos();
        assert!((k.printed_norms_sq[0] - (1.0 + c5) / 2.0).abs() < 1e-12);
        for n in &k.printed_norms_sq[1..] {
            assert!((n - (1.0 + c5) / 3.0).abs() < 1e-12);
        }
        // typeset ν3 and ν4 are not orthogonal
        let p = kcbs_printed_vectors();
        let d: f64 = p[2].iter().zip(&p[3]).map(|(a, b)| a * b).sum();
        assert!(d.abs() > 0.1);
    }

    #[test]
    fn epsilon_range() {
        assert!(matches!(weak_povm(1.5, WeakVariant::RareClick), Err(Error::EpsilonOutOfRange(_))));
    }

    #[test]
    fn perturbed_vector_breaks_pvm() {
        let mut v = parse_vectors(CABELLO18_DATA).unwrap();
        let t = 0.1f64;
        let (a, b) = (v[2].0[0], v[2].0[1]);
        v[2].0[0] = a * r(t.cos()) - b * r(t.sin());
        v[2].0[1] = a * r(t.sin()) + b * r(t.cos());
        assert!(matches!(cabello18(v), Err(Error::NotAPVM(0))));
    }
}
