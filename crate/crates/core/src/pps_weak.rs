//! Pre- and post-selected experiments: ABL probabilities, weak values,
//! algebraic consistency conditions and the paradox gallery.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantum_kernel::{identity, kron, kron_all, max_abs_diff, r, c, sigma_x, sigma_y, sigma_z, CMat, Ket, Pvm};

pub const PPS_TOL: f64 = 1e-9;
pub const OVERLAP_TOL: f64 = 1e-12;
pub const ABL_DENOM_TOL: f64 = 1e-14;
pub const CLOSURE_CAP: usize = 64;

#[derive(Debug, Clone)]
pub struct NamedPvm {
    pub name: String,
    pub labels: Vec<String>,
    pub pvm: Pvm,
}

impl NamedPvm {
    pub fn new(name: &str, labels: &[&str], projectors: Vec<CMat>) -> Result<NamedPvm> {
        let pvm = Pvm::new(projectors)?;
        if labels.len() != pvm.len() {
            return Err(Error::DimensionMismatch(format!("{} labels for {} projectors", labels.len(), pvm.len())));
        }
        Ok(NamedPvm { name: name.into(), labels: labels.iter().map(|s| s.to_string()).collect(), pvm })
    }
}

#[derive(Debug, Clone)]
pub struct PPSExperiment {
    pub pre: Ket,
    pub post: Ket,
    pub measurements: Vec<NamedPvm>,
}

impl PPSExperiment {
    pub fn new(pre: Ket, post: Ket, measurements: Vec<NamedPvm>) -> Result<PPSExperiment> {
        let d = pre.dim();
        if post.dim() != d || measurements.iter().any(|m| m.pvm.projectors[0].dim() != d) {
            return Err(Error::DimensionMismatch("pre, post and measurements disagree".into()));
        }
        Ok(PPSExperiment { pre: pre.normalized(), post: post.normalized(), measurements })
    }

    pub fn measurement(&self, name: &str) -> Result<&NamedPvm> {
        self.measurements
            .iter()
            .find(|m| m.name == name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn overlap(&self) -> Complex64 {
        self.post.inner(&self.pre)
    }

    pub fn projector(&self, p: &ProjectorRef) -> Result<CMat> {
        let m = self.measurement(&p.measurement)?;
        m.pvm
            .projectors
            .get(p.outcome)
            .map(|h| h.0.clone())
            .ok_or_else(|| Error::UnknownName(format!("{}[{}]", p.measurement, p.outcome)))
    }
}

/// ABL distribution over the outcomes of the named measurement.
pub fn abl_distribution(e: &PPSExperiment, measurement: &str) -> Result<Vec<f64>> {
    let m = e.measurement(measurement)?;
    let amps: Vec<f64> = m
        .pvm
        .projectors
        .iter()
        .map(|p| e.post.inner(&e.pre.apply(&p.0)).norm_sqr())
        .collect();
    let denom: f64 = amps.iter().sum();
    if denom <= ABL_DENOM_TOL {
        return Err(Error::ZeroPostSelectionProbability);
    }
    Ok(amps.into_iter().map(|a| a / denom).collect())
}

/// `|⟨φ|P_k|ψ⟩|² / Σ_j |⟨φ|P_j|ψ⟩|²`
pub fn abl_probability(e: &PPSExperiment, measurement: &str, outcome: usize) -> Result<f64> {
    let d = abl_distribution(e, measurement)?;
    d.get(outcome)
        .copied()
        .ok_or_else(|| Error::UnknownName(format!("{measurement}[{outcome}]")))
}

/// `⟨φ|A|ψ⟩ / ⟨φ|ψ⟩` including the imaginary part.
pub fn weak_value_complex(op: &CMat, pre: &Ket, post: &Ket) -> Result<Complex64> {
    let ov = post.inner(pre);
    if ov.norm() <= OVERLAP_TOL {
        return Err(Error::OrthogonalPrePost);
    }
    Ok(post.inner(&pre.apply(op)) / ov)
}

/// `Re(⟨φ|A|ψ⟩ / ⟨φ|ψ⟩)`
pub fn weak_value(op: &CMat, pre: &Ket, post: &Ket) -> Result<f64> {
    weak_value_complex(op, pre, post).map(|z| z.re)
}

/// Outcome `outcome` of the named measurement of an experiment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectorRef {
    pub measurement: String,
    pub outcome: usize,
}

impl ProjectorRef {
    pub fn new(measurement: &str, outcome: usize) -> Self {
        ProjectorRef { measurement: measurement.into(), outcome }
    }
}

#[derive(Debug, Clone)]
pub struct Valued {
    pub name: String,
    pub op: CMat,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaCheck {
    pub p: String,
    pub q: String,
    pub meet: String,
    pub join: Option<String>,
    /// `f(P ∨ Q)` when the join is in the family.
    pub join_value: Option<f64>,
    /// `f(P) + f(Q) − f(PQ)`
    pub implied: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraicConditionReport {
    pub alpha_holds: bool,
    pub alpha_violations: Vec<(String, f64)>,
    pub beta_holds: bool,
    pub identity_value: f64,
    pub gamma_holds: bool,
    pub gamma_checks: Vec<GammaCheck>,
    pub skipped_pairs: usize,
}

impl AlgebraicConditionReport {
    pub fn all_hold(&self) -> bool {
        self.alpha_holds && self.beta_holds && self.gamma_holds
    }
}

fn same(a: &CMat, b: &CMat) -> bool {
    max_abs_diff(a, b) <= PPS_TOL
}

fn commute(a: &CMat, b: &CMat) -> bool {
    same(&(a * b), &(b * a))
}

fn find(family: &[Valued], m: &CMat) -> Option<usize> {
    family.iter().position(|v| same(&v.op, m))
}

/// Checks (α) `0 ≤ f ≤ 1`, (β) `f(I) = 1` and (γ) partial additivity on the
/// given commuting pairs (all commuting pairs when `pairs` is `None`).
///
/// For (γ), a pair is checked only when its product `PQ` is in the family.
/// If `P + Q − PQ` is also present the identity must hold exactly;
/// otherwise the implied value `f(P) + f(Q) − f(PQ)` must lie in `[0,1]`.
pub fn algebraic_conditions(family: &[Valued], pairs: Option<&[(usize, usize)]>) -> Result<AlgebraicConditionReport> {
    let d = family
        .first()
        .map(|v| v.op.nrows())
        .ok_or_else(|| Error::FamilyNotClosed("empty family".into()))?;
    let zero = CMat::zeros(d, d);
    let id = identity(d);
    if find(family, &zero).is_none() {
        return Err(Error::FamilyNotClosed("0 missing".into()));
    }
    let ii = find(family, &id).ok_or_else(|| Error::FamilyNotClosed("I missing".into()))?;
    let alpha_violations: Vec<(String, f64)> = family
        .iter()
        .filter(|v| v.value < -PPS_TOL || v.value > 1.0 + PPS_TOL)
        .map(|v| (v.name.clone(), v.value))
        .collect();
    let identity_value = family[ii].value;
    let beta_holds = (identity_value - 1.0).abs() <= PPS_TOL;
    let all_pairs: Vec<(usize, usize)>;
    let pairs = match pairs {
        Some(p) => p,
        None => {
            all_pairs = (0..family.len())
                .flat_map(|i| (i + 1..family.len()).map(move |j| (i, j)))
                .filter(|&(i, j)| commute(&family[i].op, &family[j].op))
                .collect();
            &all_pairs
        }
    };
    let mut gamma_checks = Vec::new();
    let mut skipped = 0;
    for &(i, j) in pairs {
        let (p, q) = (&family[i], &family[j]);
        if !commute(&p.op, &q.op) {
            skipped += 1;
            continue;
        }
        let meet_op = &p.op * &q.op;
        let Some(mi) = find(family, &meet_op) else {
            skipped += 1;
            continue;
        };
        let join_op = &p.op + &q.op - &meet_op;
        let implied = p.value + q.value - family[mi].value;
        let ji = find(family, &join_op);
        let holds = match ji {
            Some(ji) => (family[ji].value - implied).abs() <= PPS_TOL,
            None => (-PPS_TOL..=1.0 + PPS_TOL).contains(&implied),
        };
        gamma_checks.push(GammaCheck {
            p: p.name.clone(),
            q: q.name.clone(),
            meet: family[mi].name.clone(),
            join: ji.map(|k| family[k].name.clone()),
            join_value: ji.map(|k| family[k].value),
            implied,
            holds,
        });
    }
    Ok(AlgebraicConditionReport {
        alpha_holds: alpha_violations.is_empty(),
        alpha_violations,
        beta_holds,
        identity_value,
        gamma_holds: gamma_checks.iter().all(|g| g.holds),
        gamma_checks,
        skipped_pairs: skipped,
    })
}

/// ABL-valued family: each referenced projector valued in its own measurement,
/// with `0 ↦ 0` and `I ↦ 1` appended when absent.
pub fn abl_family(e: &PPSExperiment, family: &[ProjectorRef]) -> Result<Vec<Valued>> {
    let mut out = Vec::new();
    for p in family {
        let m = e.measurement(&p.measurement)?;
        let op = e.projector(p)?;
        let value = abl_probability(e, &p.measurement, p.outcome)?;
        let label = m.labels.get(p.outcome).cloned().unwrap_or_default();
        out.push(Valued { name: label, op, value });
    }
    let d = e.pre.dim();
    if find(&out, &CMat::zeros(d, d)).is_none() {
        out.push(Valued { name: "0".into(), op: CMat::zeros(d, d), value: 0.0 });
    }
    if find(&out, &identity(d)).is_none() {
        out.push(Valued { name: "I".into(), op: identity(d), value: 1.0 });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogicalVerdict {
    pub logical: bool,
    pub all_abl_zero_one: bool,
    pub nonorthogonal: bool,
    pub values: Vec<(String, f64)>,
    pub report: AlgebraicConditionReport,
}

pub fn is_logical_pps_paradox(e: &PPSExperiment, family: &[ProjectorRef]) -> Result<LogicalVerdict> {
    let nonorthogonal = e.overlap().norm() > OVERLAP_TOL;
    let fam = abl_family(e, family)?;
    let all01 = fam.iter().all(|v| v.value.abs() <= PPS_TOL || (v.value - 1.0).abs() <= PPS_TOL);
    let report = algebraic_conditions(&fam, None)?;
    Ok(LogicalVerdict {
        logical: nonorthogonal && all01 && !report.all_hold(),
        all_abl_zero_one: all01,
        nonorthogonal,
        values: fam.iter().map(|v| (v.name.clone(), v.value)).collect(),
        report,
    })
}

/// Commuting closure under complement, product and join, capped at 64 projectors.
pub fn commuting_closure(ops: &[(String, CMat)]) -> Vec<(String, CMat)> {
    let mut fam: Vec<(String, CMat)> = Vec::new();
    let push = |fam: &mut Vec<(String, CMat)>, name: String, m: CMat| {
        if fam.len() < CLOSURE_CAP && !fam.iter().any(|(_, x)| same(x, &m)) {
            fam.push((name, m));
            true
        } else {
            false
        }
    };
    for (n, m) in ops {
        push(&mut fam, n.clone(), m.clone());
    }
    let Some(d) = fam.first().map(|(_, m)| m.nrows()) else { return fam };
    let id = identity(d);
    loop {
        let mut grew = false;
        let snapshot = fam.clone();
        for (i, (a, pa)) in snapshot.iter().enumerate() {
            grew |= push(&mut fam, format!("not {a}"), &id - pa);
            for (b, pb) in snapshot.iter().skip(i + 1) {
                if commute(pa, pb) {
                    let meet = pa * pb;
                    grew |= push(&mut fam, format!("({a} and {b})"), meet.clone());
                    grew |= push(&mut fam, format!("({a} or {b})"), pa + pb - meet);
                }
            }
        }
        if !grew || fam.len() >= CLOSURE_CAP {
            return fam;
        }
    }
}

/// Projectors of the commuting closure whose weak value leaves `[0,1]`.
pub fn anomalous_weak_values(e: &PPSExperiment, family: &[ProjectorRef]) -> Result<Vec<(String, f64)>> {
    let mut ops = Vec::new();
    for p in family {
        let m = e.measurement(&p.measurement)?;
        ops.push((m.labels[p.outcome].clone(), e.projector(p)?));
    }
    let mut out = Vec::new();
    for (name, op) in commuting_closure(&ops) {
        let w = weak_value(&op, &e.pre, &e.post)?;
        if !(-PPS_TOL..=1.0 + PPS_TOL).contains(&w) {
            out.push((name, w));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct GalleryEntry {
    pub name: &'static str,
    pub experiment: PPSExperiment,
    /// Projectors examined for the logical-paradox verdict.
    pub family: Vec<ProjectorRef>,
    /// Operators whose weak values are reported.
    pub observables: Vec<(String, CMat)>,
}

fn proj(v: &Ket) -> CMat {
    v.normalized().projector()
}

/// Three boxes: `ψ = (1,1,1)/√3`, `φ = (1,1,−1)/√3`.
pub fn three_box() -> GalleryEntry {
    let pre = Ket::real(&[1.0, 1.0, 1.0]).normalized();
    let post = Ket::real(&[1.0, 1.0, -1.0]).normalized();
    let p: Vec<CMat> = (0..3).map(|i| proj(&Ket::basis(3, i))).collect();
    let id = identity(3);
    let ms = vec![
        NamedPvm::new("M1", &["P1", "not P1"], vec![p[0].clone(), &id - &p[0]]).unwrap(),
        NamedPvm::new("M2", &["P2", "not P2"], vec![p[1].clone(), &id - &p[1]]).unwrap(),
        NamedPvm::new("M1'", &["P1", "P2", "P3"], p.clone()).unwrap(),
    ];
    GalleryEntry {
        name: "three-box",
        experiment: PPSExperiment::new(pre, post, ms).unwrap(),
        family: vec![
            ProjectorRef::new("M1", 0),
            ProjectorRef::new("M1", 1),
            ProjectorRef::new("M2", 0),
            ProjectorRef::new("M2", 1),
        ],
        observables: vec![
            ("P1".into(), p[0].clone()),
            ("P2".into(), p[1].clone()),
            ("P1+P2".into(), &p[0] + &p[1]),
            ("P3".into(), p[2].clone()),
        ],
    }
}

/// Photon path `{L,R}` ⊗ polarization `{H,V}`;
/// `ψ = (i|L⟩+|R⟩)|H⟩/√2`, `φ = (|LH⟩+|RV⟩)/√2`, `|±⟩ = (|H⟩ ± i|V⟩)/√2`.
pub fn cheshire() -> GalleryEntry {
    let l = Ket::basis(2, 0);
    let rr = Ket::basis(2, 1);
    let h = Ket::basis(2, 0);
    let v = Ket::basis(2, 1);
    let pre = Ket::new(vec![c(0.0, 1.0), r(0.0), r(1.0), r(0.0)]).normalized();
    let post = Ket(l.kron(&h).0 + rr.kron(&v).0).normalized();
    let plus = Ket::new(vec![r(1.0), c(0.0, 1.0)]).normalized();
    let minus = Ket::new(vec![r(1.0), c(0.0, -1.0)]).normalized();
    let (pl, pr) = (proj(&l), proj(&rr));
    let (pp, pm) = (proj(&plus), proj(&minus));
    let i2 = identity(2);
    let ms = vec![
        NamedPvm::new("path", &["L", "R"], vec![kron(&pl, &i2), kron(&pr, &i2)]).unwrap(),
        NamedPvm::new(
            "path_circular",
            &["L,+", "L,-", "R,+", "R,-"],
            vec![kron(&pl, &pp), kron(&pl, &pm), kron(&pr, &pp), kron(&pr, &pm)],
        )
        .unwrap(),
    ];
    GalleryEntry {
        name: "cheshire",
        experiment: PPSExperiment::new(pre, post, ms).unwrap(),
        family: vec![
            ProjectorRef::new("path", 1),
            ProjectorRef::new("path_circular", 2),
            ProjectorRef::new("path_circular", 3),
        ],
        observables: vec![
            ("L".into(), kron(&pl, &i2)),
            ("R".into(), kron(&pr, &i2)),
            ("spin_L".into(), kron(&pl, &sigma_y())),
            ("spin_R".into(), kron(&pr, &sigma_y())),
            ("R,-".into(), kron(&pr, &pm)),
            ("R,+".into(), kron(&pr, &pp)),
        ],
    }
}

/// Projector on "particles `i` and `j` share a box" for three two-box particles.
pub fn same_box(i: usize, j: usize) -> CMat {
    let z = sigma_z();
    let id = identity(2);
    let mut f = vec![id.clone(), id.clone(), id.clone()];
    f[i] = z.clone();
    f[j] = z;
    (identity(8) + kron_all(&f)) * r(0.5)
}

/// Three particles, two boxes: `ψ = |LR⟩^⊗3`, `φ = |+⟩^⊗3` with
/// `|LR⟩ = (|L⟩+|R⟩)/√2` and `|+⟩ = (|L⟩+i|R⟩)/√2`.
pub fn pigeonhole() -> GalleryEntry {
    let lr = Ket::real(&[1.0, 1.0]).normalized();
    let plus = Ket::new(vec![r(1.0), c(0.0, 1.0)]).normalized();
    let pre = lr.kron(&lr).kron(&lr);
    let post = plus.kron(&plus).kron(&plus);
    let id = identity(8);
    let mut ms = Vec::new();
    let mut family = Vec::new();
    let mut observables = Vec::new();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let s = same_box(i, j);
        let name = format!("pair{}{}", i + 1, j + 1);
        let same_label = format!("same{}{}", i + 1, j + 1);
        let diff_label = format!("diff{}{}", i + 1, j + 1);
        ms.push(NamedPvm::new(&name, &[&same_label, &diff_label], vec![s.clone(), &id - &s]).unwrap());
        family.push(ProjectorRef::new(&name, 0));
        family.push(ProjectorRef::new(&name, 1));
        observables.push((same_label, s));
    }
    GalleryEntry {
        name: "pigeonhole",
        experiment: PPSExperiment::new(pre, post, ms).unwrap(),
        family,
        observables,
    }
}

pub const SQUARE_ROWS: [[&str; 3]; 3] = [["ZIZ", "ZZI", "IZZ"], ["XIX", "XXI", "IXX"], ["YIY", "YYI", "IYY"]];

pub fn pauli_string(s: &str) -> CMat {
    let ms: Vec<CMat> = s
        .chars()
        .map(|ch| match ch {
            'X' => sigma_x(),
            'Y' => sigma_y(),
            'Z' => sigma_z(),
            _ => identity(2),
        })
        .collect();
    kron_all(&ms)
}

/// Three-qubit square with the pigeonhole boundary states; every observable
/// is measured on its own as a two-outcome PVM.
pub fn square() -> GalleryEntry {
    let base = pigeonhole();
    let id = identity(8);
    let mut ms = Vec::new();
    let mut family = Vec::new();
    let mut observables = Vec::new();
    for row in SQUARE_ROWS {
        for s in row {
            let o = pauli_string(s);
            let plus = (&id + &o) * r(0.5);
            let minus = (&id - &o) * r(0.5);
            let pl = format!("{s}=+1");
            let mi = format!("{s}=-1");
            ms.push(NamedPvm::new(s, &[&pl, &mi], vec![plus, minus]).unwrap());
            family.push(ProjectorRef::new(s, 0));
            family.push(ProjectorRef::new(s, 1));
            observables.push((s.to_string(), o));
        }
    }
    GalleryEntry {
        name: "square",
        experiment: PPSExperiment::new(base.experiment.pre, base.experiment.post, ms).unwrap(),
        family,
        observables,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SquareReport {
    /// `(observable, forced value)`; 0 when ABL does not force an outcome.
    pub forced: Vec<(String, i32)>,
    /// `(context, operator product sign, product of forced values)`.
    pub contexts: Vec<(String, i32, i32)>,
    pub contradictory_contexts: Vec<String>,
}

fn operator_sign(ops: &[CMat]) -> i32 {
    let p = ops.iter().skip(1).fold(ops[0].clone(), |acc, m| acc * m);
    let id = identity(p.nrows());
    if same(&p, &id) {
        1
    } else if same(&p, &(-id)) {
        -1
    } else {
        0
    }
}

/// Values forced by ABL on each square observable and the contexts (rows
/// and columns) where they contradict the operator product.
pub fn square_report() -> Result<SquareReport> {
    let e = square().experiment;
    let mut forced = Vec::new();
    let mut val = std::collections::HashMap::new();
    for row in SQUARE_ROWS {
        for s in row {
            let d = abl_distribution(&e, s)?;
            let v = if (d[0] - 1.0).abs() <= PPS_TOL {
                1
            } else if (d[1] - 1.0).abs() <= PPS_TOL {
                -1
            } else {
                0
            };
            val.insert(s, v);
            forced.push((s.to_string(), v));
        }
    }
    let mut contexts = Vec::new();
    let mut bad = Vec::new();
    let mut lines: Vec<Vec<&str>> = SQUARE_ROWS.iter().map(|r| r.to_vec()).collect();
    for col in 0..3 {
        lines.push((0..3).map(|row| SQUARE_ROWS[row][col]).collect());
    }
    for line in lines {
        let ops: Vec<CMat> = line.iter().map(|s| pauli_string(s)).collect();
        let sign = operator_sign(&ops);
        let prod: i32 = line.iter().map(|s| val[s]).product();
        let name = line.join(",");
        if prod != sign {
            bad.push(name.clone());
        }
        contexts.push((name, sign, prod));
    }
    Ok(SquareReport { forced, contexts, contradictory_contexts: bad })
}

pub fn paradox_gallery() -> Vec<GalleryEntry> {
    vec![three_box(), cheshire(), pigeonhole(), square()]
}

pub fn gallery_entry(name: &str) -> Result<GalleryEntry> {
    paradox_gallery()
        .into_iter()
        .find(|g| g.name == name)
        .ok_or_else(|| Error::UnknownName(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_needs_zero_and_identity() {
        let f = vec![Valued { name: "P".into(), op: identity(2), value: 1.0 }];
        assert!(matches!(algebraic_conditions(&f, None), Err(Error::FamilyNotClosed(_))));
    }

    #[test]
    fn alpha_violation() {
        let p = proj(&Ket::basis(2, 0));
        let f = vec![
            Valued { name: "0".into(), op: CMat::zeros(2, 2), value: 0.0 },
            Valued { name: "I".into(), op: identity(2), value: 1.0 },
            Valued { name: "P".into(), op: p, value: 1.2 },
        ];
        let rep = algebraic_conditions(&f, None).unwrap();
        assert!(!rep.alpha_holds);
        assert_eq!(rep.alpha_violations, vec![("P".to_string(), 1.2)]);
    }

    #[test]
    fn orthogonal_boundary_states() {
        let a = Ket::basis(2, 0);
        let b = Ket::basis(2, 1);
        assert_eq!(weak_value(&identity(2), &a, &b), Err(Error::OrthogonalPrePost));
    }
}
