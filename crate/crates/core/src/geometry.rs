//! Base varieties and the presented intersection rings of their elliptic
//! fibrations, with Todd classes and effectivity oracles.
//!
//! Two kinds of total space are modeled: a Calabi-Yau threefold fibered
//! over a surface (with the section relation Θ² = −Θ·p*c₁(B)) and an
//! elliptic surface over a curve (Θ² = −e·w). Only the rational even
//! cohomology ring is represented.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::ring::{BasisElem, GradedClass, RingPresentation};
use crate::scalar::Rat;

/// A base surface given by its divisor lattice, anticanonical class,
/// Euler number and effective-cone generators.
#[derive(Debug, Clone)]
pub struct BaseSurface {
    pub name: String,
    pub divisor_names: Vec<String>,
    pub pairing: Vec<Vec<Rat>>,
    /// Coefficients of c₁(B) = −K_B over the divisor basis.
    pub c1: Vec<Rat>,
    /// Euler number c₂(B).
    pub c2: Rat,
    pub effective_generators: Vec<Vec<Rat>>,
}

impl BaseSurface {
    pub fn h11(&self) -> usize {
        self.divisor_names.len()
    }

    /// Intersection number of two divisor classes.
    pub fn dot(&self, u: &[Rat], v: &[Rat]) -> Rat {
        let mut out = Rat::zero();
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                out += &(ui * vj) * &self.pairing[i][j];
            }
        }
        out
    }

    pub fn c1_dot(&self, v: &[Rat]) -> Rat {
        self.dot(&self.c1, v)
    }

    pub fn c1_sq(&self) -> Rat {
        self.dot(&self.c1, &self.c1)
    }

    /// Decides membership of `d` in the cone spanned by the effective
    /// generators, with an exact certificate either way.
    pub fn effective_check(&self, d: &[Rat]) -> Result<EffectiveResult, CoreError> {
        if d.len() != self.h11() {
            return Err(CoreError::DimensionMismatch(format!(
                "divisor has {} components, base {} has h11 = {}",
                d.len(),
                self.name,
                self.h11()
            )));
        }
        Ok(cone_membership(&self.effective_generators, d))
    }
}

/// Catalog entry or custom lattice for [`build_base`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum BaseSpec {
    /// The projective plane.
    P2,
    /// Hirzebruch surface F_m.
    F { m: u32 },
    /// Del Pezzo surface dP_k, 0 ≤ k ≤ 8 (dP_0 = P²).
    DP { k: u32 },
    /// Enriques surface, modeled rationally with c₁ = 0 (K is 2-torsion)
    /// on a rank-1 lattice; a documented model limitation.
    Enriques,
    Custom {
        name: String,
        divisor_names: Vec<String>,
        pairing: Vec<Vec<Rat>>,
        c1: Vec<Rat>,
        c2: Rat,
        effective_generators: Vec<Vec<Rat>>,
    },
}

/// Builds a [`BaseSurface`] from a catalog name or full lattice data.
pub fn build_base(spec: &BaseSpec) -> Result<BaseSurface, CoreError> {
    match spec {
        BaseSpec::P2 => Ok(BaseSurface {
            name: "P2".into(),
            divisor_names: vec!["H".into()],
            pairing: vec![vec![Rat::one()]],
            c1: vec![Rat::from_int(3)],
            c2: Rat::from_int(3),
            effective_generators: vec![vec![Rat::one()]],
        }),
        BaseSpec::F { m } => {
            let mm = Rat::from_int(*m as i64);
            Ok(BaseSurface {
                name: format!("F{m}"),
                divisor_names: vec!["b".into(), "fB".into()],
                pairing: vec![
                    vec![-mm.clone(), Rat::one()],
                    vec![Rat::one(), Rat::zero()],
                ],
                c1: vec![Rat::from_int(2), Rat::from_int(*m as i64 + 2)],
                c2: Rat::from_int(4),
                effective_generators: vec![
                    vec![Rat::one(), Rat::zero()],
                    vec![Rat::zero(), Rat::one()],
                ],
            })
        }
        BaseSpec::DP { k } => {
            if *k > 8 {
                return Err(CoreError::UnknownCatalogEntry(format!("dP{k}")));
            }
            if *k == 0 {
                let mut b = build_base(&BaseSpec::P2)?;
                b.name = "dP0".into();
                return Ok(b);
            }
            let k = *k as usize;
            let mut names = vec!["H".to_string()];
            for i in 1..=k {
                names.push(format!("E{i}"));
            }
            let mut pairing = vec![vec![Rat::zero(); k + 1]; k + 1];
            pairing[0][0] = Rat::one();
            for i in 1..=k {
                pairing[i][i] = Rat::from_int(-1);
            }
            let mut c1 = vec![Rat::from_int(3)];
            c1.extend(std::iter::repeat(Rat::from_int(-1)).take(k));
            let effective_generators = del_pezzo_cone_generators(k);
            Ok(BaseSurface {
                name: format!("dP{k}"),
                divisor_names: names,
                pairing,
                c1,
                c2: Rat::from_int(3 + k as i64),
                effective_generators,
            })
        }
        BaseSpec::Enriques => Ok(BaseSurface {
            name: "Enriques".into(),
            divisor_names: vec!["A".into()],
            pairing: vec![vec![Rat::one()]],
            c1: vec![Rat::zero()],
            c2: Rat::from_int(12),
            effective_generators: vec![vec![Rat::one()]],
        }),
        BaseSpec::Custom { name, divisor_names, pairing, c1, c2, effective_generators } => {
            let n = divisor_names.len();
            if n == 0 {
                return Err(CoreError::InconsistentCustomLattice("empty divisor basis".into()));
            }
            if pairing.len() != n || pairing.iter().any(|r| r.len() != n) {
                return Err(CoreError::InconsistentCustomLattice(format!(
                    "pairing must be {n}x{n}"
                )));
            }
            for i in 0..n {
                for j in 0..n {
                    if pairing[i][j] != pairing[j][i] {
                        return Err(CoreError::InconsistentCustomLattice(format!(
                            "pairing not symmetric at ({i},{j})"
                        )));
                    }
                }
            }
            if c1.len() != n {
                return Err(CoreError::InconsistentCustomLattice("c1 length mismatch".into()));
            }
            if effective_generators.iter().any(|g| g.len() != n) {
                return Err(CoreError::InconsistentCustomLattice(
                    "effective generator length mismatch".into(),
                ));
            }
            Ok(BaseSurface {
                name: name.clone(),
                divisor_names: divisor_names.clone(),
                pairing: pairing.clone(),
                c1: c1.clone(),
                c2: c2.clone(),
                effective_generators: effective_generators.clone(),
            })
        }
    }
}

/// Effective-cone generators of dP_k, computed by bounded enumeration:
/// classes aH − Σ bᵢEᵢ with C² = −1, C·c₁ = 1 (exceptional curves), plus
/// ruling classes C² = 0, C·c₁ = 2 which are only extremal for k ≤ 1.
/// The coefficient box follows from Cauchy-Schwarz: (3a−1)² ≤ k(a²+1).
fn del_pezzo_cone_generators(k: usize) -> Vec<Vec<Rat>> {
    let mut gens: Vec<Vec<i64>> = enumerate_classes(k, -1, 1);
    if k <= 1 {
        gens.extend(enumerate_classes(k, 0, 2));
    }
    gens.sort();
    gens.dedup();
    gens.into_iter()
        .map(|g| g.into_iter().map(Rat::from_int).collect())
        .collect()
}

/// Enumerates classes C = aH − Σ bᵢEᵢ on dP_k with C² = `self_int` and
/// C·c₁ = `c1_deg`, over the derived box a ≥ 0, bᵢ ∈ [−1, a+1].
fn enumerate_classes(k: usize, self_int: i64, c1_deg: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut a: i64 = 0;
    loop {
        // box bound: (3a − c1_deg)² ≤ k(a² − self_int) must be satisfiable
        let lhs = (3 * a - c1_deg) * (3 * a - c1_deg);
        let rhs = (k as i64) * (a * a - self_int);
        if a > 0 && lhs > rhs {
            break;
        }
        let target_sq = a * a - self_int; // Σ bᵢ²
        let target_lin = 3 * a - c1_deg; // Σ bᵢ
        let mut b = vec![0i64; k];
        search_b(k, 0, target_lin, target_sq, a, &mut b, &mut |bs| {
            // class coordinates are (a, −b₁, ..., −b_k) over (H, E₁..E_k)
            let coords: Vec<i64> =
                std::iter::once(a).chain(bs.iter().map(|x| -x)).collect();
            out.push(coords);
        });
        a += 1;
        if a > 16 {
            break; // unreachable for k ≤ 8; hard stop for safety
        }
    }
    out
}

fn search_b(
    k: usize,
    i: usize,
    rem_lin: i64,
    rem_sq: i64,
    a: i64,
    b: &mut Vec<i64>,
    emit: &mut dyn FnMut(&[i64]),
) {
    if i == k {
        if rem_lin == 0 && rem_sq == 0 {
            emit(b);
        }
        return;
    }
    let slots = (k - i) as i64;
    let hi = a + 1;
    for v in -1..=hi {
        let nl = rem_lin - v;
        let ns = rem_sq - v * v;
        if ns < 0 {
            continue;
        }
        // remaining entries must satisfy Σb = nl, Σb² = ns with b ∈ [−1, hi]
        let s = slots - 1;
        if nl < -s || nl > s * hi {
            continue;
        }
        if s > 0 && nl * nl > ns * s {
            continue; // Cauchy-Schwarz
        }
        if s == 0 && (nl != 0 || ns != 0) {
            continue;
        }
        if ns > s * hi * hi {
            continue;
        }
        b[i] = v;
        search_b(k, i + 1, nl, ns, a, b, emit);
    }
    b[i] = 0;
}

/// Outcome of a cone-membership test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectiveResult {
    pub effective: bool,
    pub certificate: EffectiveCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EffectiveCertificate {
    /// Nonnegative coefficients on generators reproducing the class.
    Combination(Vec<(usize, Rat)>),
    /// Functional y with y·gᵢ ≤ 0 for every generator but y·D > 0.
    Separating(Vec<Rat>),
}

/// Exact phase-1 simplex (Bland's rule) deciding whether `d` is a
/// nonnegative combination of `gens`; returns the combination or a Farkas
/// separating functional.
pub fn cone_membership(gens: &[Vec<Rat>], d: &[Rat]) -> EffectiveResult {
    let rows = d.len();
    let m = gens.len();
    // tableau columns: m generator columns | rows artificial columns | rhs
    let cols = m + rows + 1;
    let mut t = vec![vec![Rat::zero(); cols]; rows];
    let mut sign = vec![Rat::one(); rows];
    for r in 0..rows {
        if d[r].is_negative() {
            sign[r] = Rat::from_int(-1);
        }
        for (j, g) in gens.iter().enumerate() {
            t[r][j] = &sign[r] * &g[r];
        }
        t[r][m + r] = Rat::one();
        t[r][cols - 1] = &sign[r] * &d[r];
    }
    let mut basis: Vec<usize> = (m..m + rows).collect();
    // objective row: minimize sum of artificials -> z = Σ rows (expressed over basics)
    let mut obj = vec![Rat::zero(); cols];
    for r in 0..rows {
        for c in 0..cols {
            obj[c] = &obj[c] + &t[r][c];
        }
    }
    for artificial in m..m + rows {
        obj[artificial] = Rat::zero();
    }
    loop {
        // Bland: first column with positive reduced cost among non-artificials
        // (artificials may re-enter but never help; keep them excluded).
        let enter = (0..m).find(|&c| obj[c].is_positive());
        let Some(enter) = enter else { break };
        // ratio test
        let mut leave: Option<usize> = None;
        let mut best: Option<Rat> = None;
        for r in 0..rows {
            if t[r][enter].is_positive() {
                let ratio = &t[r][cols - 1] / &t[r][enter];
                let better = match &best {
                    None => true,
                    Some(b) => ratio < *b || (ratio == *b && basis[r] < basis[leave.unwrap()]),
                };
                if better {
                    best = Some(ratio);
                    leave = Some(r);
                }
            }
        }
        let Some(lr) = leave else { break }; // unbounded cannot happen in phase 1
        // pivot
        let piv = t[lr][enter].clone();
        for c in 0..cols {
            t[lr][c] = &t[lr][c] / &piv;
        }
        for r in 0..rows {
            if r != lr && !t[r][enter].is_zero() {
                let f = t[r][enter].clone();
                for c in 0..cols {
                    t[r][c] = &t[r][c] - &(&f * &t[lr][c]);
                }
            }
        }
        if !obj[enter].is_zero() {
            let f = obj[enter].clone();
            for c in 0..cols {
                obj[c] = &obj[c] - &(&f * &t[lr][c]);
            }
        }
        basis[lr] = enter;
    }
    let objective = obj[cols - 1].clone();
    if objective.is_zero() {
        let mut combo = Vec::new();
        for (r, &b) in basis.iter().enumerate() {
            if b < m && !t[r][cols - 1].is_zero() {
                combo.push((b, t[r][cols - 1].clone()));
            }
        }
        combo.sort_by_key(|(i, _)| *i);
        EffectiveResult { effective: true, certificate: EffectiveCertificate::Combination(combo) }
    } else {
        // Farkas: the duals of the flipped system are c_B·B⁻¹, readable off
        // the artificial-column block of the tableau (the initial identity),
        // with cost 1 exactly on rows whose basic variable is artificial.
        let mut y = Vec::with_capacity(rows);
        for r in 0..rows {
            let mut yr = Rat::zero();
            for (i, &b) in basis.iter().enumerate() {
                if b >= m {
                    yr += t[i][m + r].clone();
                }
            }
            y.push(&sign[r] * &yr);
        }
        // by construction y·gᵢ ≤ 0 for every generator and y·d = objective > 0
        EffectiveResult { effective: false, certificate: EffectiveCertificate::Separating(y) }
    }
}

/// Base of an elliptic surface: a smooth projective curve, carrying the
/// genus and the degree e ≥ 0 of K̄ on it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaseCurve {
    pub genus: u32,
    pub e: u32,
}

impl BaseCurve {
    /// Degree of c₁(B) = −K_B, i.e. 2 − 2g.
    pub fn c1_degree(&self) -> Rat {
        Rat::from_int(2 - 2 * self.genus as i64)
    }
}

/// Extra H² classes a user may declare on an elliptic surface, with their
/// pairings against Θ, the fiber, and each other.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtraClassSpec {
    pub name: String,
    pub dot_theta: Rat,
    pub dot_fiber: Rat,
    pub dot_extras: Vec<Rat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FibrationKind {
    Cy3,
    Surface,
}

impl std::fmt::Display for FibrationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FibrationKind::Cy3 => write!(f, "CY3-over-surface"),
            FibrationKind::Surface => write!(f, "elliptic-surface-over-curve"),
        }
    }
}

/// The presented intersection ring of an elliptic fibration with section,
/// together with its distinguished classes.
#[derive(Debug, Clone)]
pub struct FibrationModel {
    pub kind: FibrationKind,
    pub ring: Arc<RingPresentation>,
    pub surface_base: Option<BaseSurface>,
    pub curve_base: Option<BaseCurve>,
    pub extras: Vec<ExtraClassSpec>,
}

/// Basis layout, CY3 over a surface with h11 = r:
///   0: 1 | 1: Θ | 2..2+r: p*Dᵢ | 2+r..2+2r: Θ·p*Dᵢ | 2+2r: f | 3+2r: pt
/// Elliptic surface with t extra classes:
///   0: 1 | 1: Θ | 2: f | 3..3+t: extras | 3+t: w
impl FibrationModel {
    pub fn cy3(base: BaseSurface) -> Result<Self, CoreError> {
        let r = base.h11();
        let dim = 2 * r + 4;
        let mut basis = Vec::with_capacity(dim);
        basis.push(BasisElem::new("1", 0));
        basis.push(BasisElem::new("T", 2));
        for n in &base.divisor_names {
            basis.push(BasisElem::new(format!("p*{n}"), 2));
        }
        for n in &base.divisor_names {
            basis.push(BasisElem::new(format!("T.p*{n}"), 4));
        }
        basis.push(BasisElem::new("f", 4));
        basis.push(BasisElem::new("pt", 6));

        let theta = 1usize;
        let pd = |i: usize| 2 + i;
        let tpd = |i: usize| 2 + r + i;
        let fib = 2 + 2 * r;
        let pt = 3 + 2 * r;

        let mut table = vec![vec![Vec::new(); dim]; dim];
        for i in 0..dim {
            table[0][i] = vec![(i, Rat::one())];
            table[i][0] = vec![(i, Rat::one())];
        }
        let mut set = |i: usize, j: usize, v: Vec<(usize, Rat)>| {
            let vv: Vec<(usize, Rat)> =
                v.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            table[i][j] = vv.clone();
            table[j][i] = vv;
        };
        // Θ·Θ = −Σ c1ᵢ Θ·p*Dᵢ
        set(
            theta,
            theta,
            (0..r).map(|i| (tpd(i), -base.c1[i].clone())).collect(),
        );
        for i in 0..r {
            // Θ·p*Dᵢ
            set(theta, pd(i), vec![(tpd(i), Rat::one())]);
            // Θ·(Θ·p*Dᵢ) = −(c1·Dᵢ) pt
            let ei: Vec<Rat> = (0..r)
                .map(|j| if j == i { Rat::one() } else { Rat::zero() })
                .collect();
            set(theta, tpd(i), vec![(pt, -base.c1_dot(&ei))]);
            for j in i..r {
                // p*Dᵢ·p*Dⱼ = (Dᵢ·Dⱼ) f
                set(pd(i), pd(j), vec![(fib, base.pairing[i][j].clone())]);
            }
            for j in 0..r {
                // p*Dᵢ·(Θ·p*Dⱼ) = (Dᵢ·Dⱼ) pt
                set(pd(i), tpd(j), vec![(pt, base.pairing[i][j].clone())]);
            }
            set(pd(i), fib, vec![]);
        }
        set(theta, fib, vec![(pt, Rat::one())]);
        // all remaining products exceed degree 6 and vanish

        let ring = RingPresentation::new(
            format!("CY3/{}", base.name),
            6,
            basis,
            table,
        )?;
        Ok(FibrationModel {
            kind: FibrationKind::Cy3,
            ring,
            surface_base: Some(base),
            curve_base: None,
            extras: Vec::new(),
        })
    }

    pub fn elliptic_surface(
        base: BaseCurve,
        extras: Vec<ExtraClassSpec>,
    ) -> Result<Self, CoreError> {
        let t = extras.len();
        for (i, x) in extras.iter().enumerate() {
            if x.dot_extras.len() != t {
                return Err(CoreError::InconsistentCustomLattice(format!(
                    "extra class {} pairing row must have {t} entries",
                    x.name
                )));
            }
            for j in 0..t {
                if extras[i].dot_extras[j] != extras[j].dot_extras[i] {
                    return Err(CoreError::InconsistentCustomLattice(format!(
                        "extra-class pairing not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let dim = 4 + t;
        let mut basis = Vec::with_capacity(dim);
        basis.push(BasisElem::new("1", 0));
        basis.push(BasisElem::new("T", 2));
        basis.push(BasisElem::new("f", 2));
        for x in &extras {
            basis.push(BasisElem::new(x.name.clone(), 2));
        }
        basis.push(BasisElem::new("w", 4));
        let theta = 1usize;
        let fib = 2usize;
        let ex = |i: usize| 3 + i;
        let w = 3 + t;

        let mut table = vec![vec![Vec::new(); dim]; dim];
        for i in 0..dim {
            table[0][i] = vec![(i, Rat::one())];
            table[i][0] = vec![(i, Rat::one())];
        }
        let mut set = |i: usize, j: usize, v: Vec<(usize, Rat)>| {
            let vv: Vec<(usize, Rat)> =
                v.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            table[i][j] = vv.clone();
            table[j][i] = vv;
        };
        set(theta, theta, vec![(w, Rat::from_int(-(base.e as i64)))]);
        set(theta, fib, vec![(w, Rat::one())]);
        set(fib, fib, vec![]);
        for i in 0..t {
            set(theta, ex(i), vec![(w, extras[i].dot_theta.clone())]);
            set(fib, ex(i), vec![(w, extras[i].dot_fiber.clone())]);
            for j in i..t {
                set(ex(i), ex(j), vec![(w, extras[i].dot_extras[j].clone())]);
            }
        }
        let ring = RingPresentation::new(
            format!("EllSurf(g={},e={})", base.genus, base.e),
            4,
            basis,
            table,
        )?;
        Ok(FibrationModel {
            kind: FibrationKind::Surface,
            ring,
            surface_base: None,
            curve_base: Some(base),
            extras,
        })
    }

    pub fn require_kind(&self, kind: FibrationKind) -> Result<(), CoreError> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(CoreError::WrongKind {
                expected: kind.to_string(),
                found: self.kind.to_string(),
            })
        }
    }

    pub fn base_surface(&self) -> &BaseSurface {
        self.surface_base.as_ref().expect("CY3 model carries a base surface")
    }

    pub fn h11_base(&self) -> usize {
        match self.kind {
            FibrationKind::Cy3 => self.base_surface().h11(),
            FibrationKind::Surface => 1,
        }
    }

    // -- distinguished classes ------------------------------------------

    pub fn one(&self) -> GradedClass {
        self.ring.one()
    }

    pub fn theta(&self) -> GradedClass {
        self.ring.basis_class(1)
    }

    pub fn fiber(&self) -> GradedClass {
        match self.kind {
            FibrationKind::Cy3 => self.ring.basis_class(2 + 2 * self.h11_base()),
            FibrationKind::Surface => self.ring.basis_class(2),
        }
    }

    pub fn point(&self) -> GradedClass {
        self.ring.basis_class(self.ring.dim() - 1)
    }

    /// Pullback p*D of a base divisor class (CY3) given by coefficients.
    pub fn pullback_divisor(&self, v: &[Rat]) -> GradedClass {
        assert_eq!(self.kind, FibrationKind::Cy3);
        let mut c = self.ring.zero();
        for (i, vi) in v.iter().enumerate() {
            c = c.set_coeff(2 + i, vi.clone());
        }
        c
    }

    /// Θ·p*D for a base divisor class (CY3).
    pub fn theta_pullback_divisor(&self, v: &[Rat]) -> GradedClass {
        assert_eq!(self.kind, FibrationKind::Cy3);
        let r = self.h11_base();
        let mut c = self.ring.zero();
        for (i, vi) in v.iter().enumerate() {
            c = c.set_coeff(2 + r + i, vi.clone());
        }
        c
    }

    pub fn c1_pullback(&self) -> GradedClass {
        self.pullback_divisor(&self.base_surface().c1.clone())
    }

    // -- Todd classes ----------------------------------------------------

    /// Todd class of the virtual relative tangent bundle of p.
    pub fn todd_relative(&self) -> GradedClass {
        match self.kind {
            FibrationKind::Cy3 => {
                let c1 = self.c1_pullback();
                let theta = self.theta();
                let c1sq = c1.mul(&c1).unwrap();
                let one = self.one();
                // 1 − c₁/2 + (13c₁² + 12Θc₁)/12 − Θc₁²/2
                one.sub(&c1.scale(&Rat::new(1, 2)))
                    .unwrap()
                    .add(&c1sq.scale(&Rat::new(13, 12)))
                    .unwrap()
                    .add(&theta.mul(&c1).unwrap())
                    .unwrap()
                    .sub(&theta.mul(&c1sq).unwrap().scale(&Rat::new(1, 2)))
                    .unwrap()
            }
            FibrationKind::Surface => {
                let e = Rat::from_int(self.curve_base.as_ref().unwrap().e as i64);
                // 1 − p*K̄/2 + e·w, with p*K̄ = e·f
                let one = self.one();
                let half_k = self.fiber().scale(&(Rat::new(1, 2) * e.clone()));
                let top = self.point().scale(&e);
                one.sub(&half_k).unwrap().add(&top).unwrap()
            }
        }
    }

    /// Total Todd class of the total space.
    pub fn todd_total(&self) -> GradedClass {
        match self.kind {
            FibrationKind::Cy3 => {
                // c₁(X) = 0; td = 1 + c₂(X)/12 and td₆ = 0
                self.one()
                    .add(&self.c2_tangent().unwrap().scale(&Rat::new(1, 12)))
                    .unwrap()
            }
            FibrationKind::Surface => {
                let b = self.curve_base.as_ref().unwrap();
                let e = Rat::from_int(b.e as i64);
                let kdeg = Rat::from_int(2 * b.genus as i64 - 2) + e.clone();
                // td = 1 − K_X/2 + χ(O_X)·w, K_X = (2g−2+e)f, χ(O_X) = e
                self.one()
                    .sub(&self.fiber().scale(&(Rat::new(1, 2) * kdeg)))
                    .unwrap()
                    .add(&self.point().scale(&e))
                    .unwrap()
            }
        }
    }

    /// c₂ of the tangent bundle, CY3 only: 12Θ·p*c₁ + (11c₁² + c₂)f.
    pub fn c2_tangent(&self) -> Result<GradedClass, CoreError> {
        self.require_kind(FibrationKind::Cy3)?;
        let b = self.base_surface();
        let theta_c1 = self.theta_pullback_divisor(&b.c1.clone());
        let fib_coeff = Rat::from_int(11) * b.c1_sq() + b.c2.clone();
        Ok(theta_c1
            .scale(&Rat::from_int(12))
            .add(&self.fiber().scale(&fib_coeff))
            .unwrap())
    }

    // -- pushforward to the base ------------------------------------------

    /// p_* as the degree −2 map: Θ↦1, Θ·p*D↦D, f↦0, p*D↦0, pt↦pt_B, 1↦0.
    pub fn push_to_base(&self, a: &GradedClass) -> BaseGraded {
        match self.kind {
            FibrationKind::Cy3 => {
                let r = self.h11_base();
                let d2 = (0..r).map(|i| a.coeff(2 + r + i).clone()).collect();
                BaseGraded {
                    d0: a.coeff(1).clone(),
                    d2,
                    d4: a.coeff(3 + 2 * r).clone(),
                }
            }
            FibrationKind::Surface => {
                // Θ↦1, extras↦(ξ·f)·1 is zero in degree −2 terms: p_*ξ = (ξ·f);
                // fiber and 1 push to zero; w ↦ pt_B.
                let mut d0 = a.coeff(1).clone();
                for (i, x) in self.extras.iter().enumerate() {
                    d0 += &x.dot_fiber * a.coeff(3 + i);
                }
                BaseGraded {
                    d0,
                    d2: vec![a.coeff(self.ring.dim() - 1).clone()],
                    d4: Rat::zero(),
                }
            }
        }
    }

    /// p* of a graded base class.
    pub fn pull_from_base(&self, b: &BaseGraded) -> GradedClass {
        match self.kind {
            FibrationKind::Cy3 => {
                let mut c = self.one().scale(&b.d0);
                c = c.add(&self.pullback_divisor(&b.d2)).unwrap();
                c.add(&self.fiber().scale(&b.d4)).unwrap()
            }
            FibrationKind::Surface => {
                let c = self.one().scale(&b.d0);
                c.add(&self.fiber().scale(&b.d2[0])).unwrap()
            }
        }
    }
}

/// A graded class on the base, by degree: scalars in degree 0 and top,
/// a divisor coefficient vector in degree 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseGraded {
    pub d0: Rat,
    pub d2: Vec<Rat>,
    pub d4: Rat,
}

impl BaseGraded {
    pub fn zero(r: usize) -> Self {
        BaseGraded { d0: Rat::zero(), d2: vec![Rat::zero(); r], d4: Rat::zero() }
    }
}
