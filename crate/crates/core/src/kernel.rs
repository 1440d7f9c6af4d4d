//! Kernel-side evaluation of integral transforms on the fibered square.
//!
//! Classes on X×_B X are represented as a "bi-pullback" part living in the
//! ring generated by π*, π̂* pullbacks (a free module over the base ring on
//! the four sector monomials 1⊗1, Θ⊗1, 1⊗Θ, Θ⊗Θ) plus a diagonal part
//! δ⋆(z) with z a class on X. The evaluator enforces the reduction rule
//! π̂⋆(π*x · Δ · π̂*y) = x·y.

use std::sync::Arc;

use crate::error::CoreError;
use crate::geometry::{BaseGraded, FibrationKind, FibrationModel};
use crate::ring::{BasisElem, GradedClass, RingPresentation};
use crate::scalar::Rat;

/// Symbolic Chern character of a transform kernel.
#[derive(Debug, Clone)]
pub enum KernelCharacter {
    /// The normalized relative universal sheaf on X×_B X.
    Poincare,
    /// Structure sheaf of the fibered product inside X×X: acts by
    /// ch ↦ p*(p⋆(ch·td_rel)).
    RelativeStructure,
    /// Ideal of the relative diagonal inside the fibered product:
    /// the structure-sheaf action minus the identity.
    RelativeIdeal,
    /// O_Δ(D): tensoring by the line bundle, ch ↦ ch·exp(D).
    DiagonalTwist(GradedClass),
}

/// The intersection ring of the fibered square of a CY3 fibration,
/// together with the pullback/pushforward/diagonal maps into it.
pub struct FiberedSquare {
    pub ring: Arc<RingPresentation>,
    r: usize,
}

// base monomial indices: 0 → 1, 1..=r → Dᵢ, r+1 → pt_B
const SECTOR_NONE: usize = 0; // 1⊗1
const SECTOR_LEFT: usize = 1; // Θ⊗1
const SECTOR_RIGHT: usize = 2; // 1⊗Θ
const SECTOR_BOTH: usize = 3; // Θ⊗Θ

impl FiberedSquare {
    pub fn new(x: &FibrationModel) -> Result<Self, CoreError> {
        x.require_kind(FibrationKind::Cy3)?;
        let b = x.base_surface();
        let r = b.h11();
        let nb = r + 2;
        let base_deg = |m: usize| if m == 0 { 0 } else if m <= r { 2 } else { 4 };
        let base_name = |m: usize| -> String {
            if m == 0 {
                "1".into()
            } else if m <= r {
                b.divisor_names[m - 1].clone()
            } else {
                "ptB".into()
            }
        };
        let sector_deg = [0usize, 2, 2, 4];
        let sector_name = ["", "Tl", "Tr", "Tl.Tr"];

        let mut basis = Vec::with_capacity(4 * nb);
        for s in 0..4 {
            for m in 0..nb {
                let name = match (s, m) {
                    (SECTOR_NONE, 0) => "1".to_string(),
                    (SECTOR_NONE, _) => format!("q*{}", base_name(m)),
                    (_, 0) => sector_name[s].to_string(),
                    _ => format!("{}.q*{}", sector_name[s], base_name(m)),
                };
                basis.push(BasisElem::new(name, sector_deg[s] + base_deg(m)));
            }
        }
        let idx = |s: usize, m: usize| s * nb + m;

        // product of base monomials as a sparse vector over base monomials
        let bprod = |m1: usize, m2: usize| -> Vec<(usize, Rat)> {
            match (m1, m2) {
                (0, m) | (m, 0) => vec![(m, Rat::one())],
                (i, j) if i <= r && j <= r => {
                    let g = b.pairing[i - 1][j - 1].clone();
                    if g.is_zero() {
                        vec![]
                    } else {
                        vec![(r + 1, g)]
                    }
                }
                _ => vec![], // anything involving pt_B beyond degree 4
            }
        };
        // multiply a sparse base vector by the divisor class −c₁
        let times_minus_c1 = |v: Vec<(usize, Rat)>| -> Vec<(usize, Rat)> {
            let mut out: Vec<(usize, Rat)> = Vec::new();
            for (m, c) in v {
                for (i, c1i) in b.c1.iter().enumerate() {
                    if c1i.is_zero() {
                        continue;
                    }
                    for (m2, g) in bprod(m, i + 1) {
                        let coeff = &(-c1i) * &(&c * &g);
                        if let Some(slot) = out.iter_mut().find(|(k, _)| *k == m2) {
                            slot.1 = &slot.1 + &coeff;
                        } else {
                            out.push((m2, coeff));
                        }
                    }
                }
            }
            out.retain(|(_, c)| !c.is_zero());
            out
        };

        let dim = 4 * nb;
        let mut table = vec![vec![Vec::new(); dim]; dim];
        for s1 in 0..4 {
            for m1 in 0..nb {
                for s2 in 0..4 {
                    for m2 in 0..nb {
                        let i = idx(s1, m1);
                        let j = idx(s2, m2);
                        let l = usize::from(s1 == SECTOR_LEFT || s1 == SECTOR_BOTH)
                            + usize::from(s2 == SECTOR_LEFT || s2 == SECTOR_BOTH);
                        let rr = usize::from(s1 == SECTOR_RIGHT || s1 == SECTOR_BOTH)
                            + usize::from(s2 == SECTOR_RIGHT || s2 == SECTOR_BOTH);
                        let mut v = bprod(m1, m2);
                        // Θ² = −c₁·Θ on each side
                        if l == 2 {
                            v = times_minus_c1(v);
                        }
                        if rr == 2 {
                            v = times_minus_c1(v);
                        }
                        let sector = match (l.min(1), rr.min(1)) {
                            (0, 0) => SECTOR_NONE,
                            (1, 0) => SECTOR_LEFT,
                            (0, 1) => SECTOR_RIGHT,
                            _ => SECTOR_BOTH,
                        };
                        table[i][j] = v
                            .into_iter()
                            .map(|(m, c)| (idx(sector, m), c))
                            .collect();
                    }
                }
            }
        }
        let ring = RingPresentation::new(
            format!("{} x_B {0}", x.ring.name),
            8,
            basis,
            table,
        )?;
        Ok(FiberedSquare { ring, r })
    }

    fn nb(&self) -> usize {
        self.r + 2
    }

    /// π* of a class on X (first projection).
    pub fn pi_star(&self, x: &FibrationModel, a: &GradedClass) -> GradedClass {
        self.pull(x, a, SECTOR_NONE, SECTOR_LEFT)
    }

    /// π̂* of a class on X (second projection).
    pub fn pihat_star(&self, x: &FibrationModel, a: &GradedClass) -> GradedClass {
        self.pull(x, a, SECTOR_NONE, SECTOR_RIGHT)
    }

    fn pull(
        &self,
        x: &FibrationModel,
        a: &GradedClass,
        plain: usize,
        with_theta: usize,
    ) -> GradedClass {
        let r = self.r;
        let nb = self.nb();
        let mut out = self.ring.zero();
        // X basis: 0→1, 1→Θ, 2+i→p*Dᵢ, 2+r+i→Θp*Dᵢ, 2+2r→f, 3+2r→pt
        let _ = x;
        out = out.set_coeff(plain * nb, a.coeff(0).clone());
        out = out.set_coeff(with_theta * nb, a.coeff(1).clone());
        for i in 0..r {
            out = out.set_coeff(plain * nb + 1 + i, a.coeff(2 + i).clone());
            out = out.set_coeff(with_theta * nb + 1 + i, a.coeff(2 + r + i).clone());
        }
        out = out.set_coeff(plain * nb + r + 1, a.coeff(2 + 2 * r).clone());
        out.set_coeff(with_theta * nb + r + 1, a.coeff(3 + 2 * r).clone())
    }

    /// q* of a graded base class.
    pub fn q_star(&self, bg: &BaseGraded) -> GradedClass {
        let nb = self.nb();
        let mut out = self.ring.zero();
        out = out.set_coeff(0, bg.d0.clone());
        for (i, v) in bg.d2.iter().enumerate() {
            out = out.set_coeff(1 + i, v.clone());
        }
        out.set_coeff(nb - 1, bg.d4.clone())
        // sector 0 throughout
    }

    /// π̂⋆ of a bi-pullback class: only sectors with a left Θ survive.
    pub fn pihat_push(&self, x: &FibrationModel, z: &GradedClass) -> GradedClass {
        let r = self.r;
        let nb = self.nb();
        let mut coeffs = vec![Rat::zero(); x.ring.dim()];
        for m in 0..nb {
            // (Θ⊗1)·q*b ↦ p*(b): 1→1, Dᵢ→p*Dᵢ, ptB→f
            let c = z.coeff(SECTOR_LEFT * nb + m);
            let target = if m == 0 { 0 } else if m <= r { 2 + (m - 1) } else { 2 + 2 * r };
            coeffs[target] = &coeffs[target] + c;
            // (Θ⊗Θ)·q*b ↦ Θ·p*(b): 1→Θ, Dᵢ→Θp*Dᵢ, ptB→pt
            let c = z.coeff(SECTOR_BOTH * nb + m);
            let target = if m == 0 { 1 } else if m <= r { 2 + r + (m - 1) } else { 3 + 2 * r };
            coeffs[target] = &coeffs[target] + c;
        }
        x.ring.from_coeffs(coeffs)
    }

    /// δ* of a bi-pullback class: both pullbacks restrict to the identity on
    /// the diagonal, so sector (ε₁, ε₂) lands on Θ^{ε₁+ε₂}·p*(b) in X.
    pub fn delta_pull(&self, x: &FibrationModel, z: &GradedClass) -> GradedClass {
        let r = self.r;
        let nb = self.nb();
        let theta = x.theta();
        let theta2 = theta.mul(&theta).unwrap();
        let mut out = x.ring.zero();
        for (s, theta_pow) in [
            (SECTOR_NONE, x.one()),
            (SECTOR_LEFT, theta.clone()),
            (SECTOR_RIGHT, theta),
            (SECTOR_BOTH, theta2),
        ] {
            let mut base = x.ring.zero();
            base = base.set_coeff(0, z.coeff(s * nb).clone());
            for i in 0..r {
                base = base.set_coeff(2 + i, z.coeff(s * nb + 1 + i).clone());
            }
            base = base.set_coeff(2 + 2 * r, z.coeff(s * nb + r + 1).clone());
            out = out.add(&theta_pow.mul(&base).unwrap()).unwrap();
        }
        out
    }
}

/// Precomputed state for the kernel pipeline on a fixed fibration; build
/// once, transform many.
pub struct PoincareEvaluator {
    sq: FiberedSquare,
    td_rel: GradedClass,
    exp_twist: GradedClass,
    diag_kernel: GradedClass,
}

impl PoincareEvaluator {
    pub fn new(x: &FibrationModel) -> Result<Self, CoreError> {
        let sq = FiberedSquare::new(x)?;
        let td_rel = x.todd_relative();
        // exp(π*Θ + π̂*Θ + q*c₁)
        let b = x.base_surface();
        let expo = sq
            .pi_star(x, &x.theta())
            .add(&sq.pihat_star(x, &x.theta()))?
            .add(&sq.q_star(&BaseGraded {
                d0: Rat::zero(),
                d2: b.c1.clone(),
                d4: Rat::zero(),
            }))?;
        let exp_twist = expo.exp_nilpotent()?;
        // ch(I_Δ) = 1 − δ⋆(td_rel⁻¹); the δ-term of ch(P) is
        // −δ⋆(td_rel⁻¹ · δ*(exp)).
        let diag_kernel = td_rel
            .inv_unit()?
            .mul(&sq.delta_pull(x, &exp_twist))?
            .neg();
        Ok(PoincareEvaluator { sq, td_rel, exp_twist, diag_kernel })
    }

    pub fn transform(&self, x: &FibrationModel, e: &GradedClass) -> Result<GradedClass, CoreError> {
        // bi-pullback part of the integrand: π*(ch E)·exp·π*(td_rel)
        let bipart = self
            .sq
            .pi_star(x, e)
            .mul(&self.exp_twist)?
            .mul(&self.sq.pi_star(x, &self.td_rel))?;
        // diagonal part: π*(ch E)·δ⋆(z)·π*(td_rel) = δ⋆(z·ch E·td_rel),
        // and π̂⋆δ⋆ = id.
        let diag = self.diag_kernel.mul(e)?.mul(&self.td_rel)?;
        self.sq.pihat_push(x, &bipart).add(&diag)
    }
}

/// Applies the cohomological action of a kernel to a class on X.
pub fn apply_kernel(
    x: &FibrationModel,
    kernel: &KernelCharacter,
    e: &GradedClass,
) -> Result<GradedClass, CoreError> {
    match kernel {
        KernelCharacter::DiagonalTwist(d) => e.mul(&d.exp_nilpotent()?),
        KernelCharacter::RelativeStructure => {
            let td_rel = x.todd_relative();
            let pushed = x.push_to_base(&e.mul(&td_rel)?);
            Ok(x.pull_from_base(&pushed))
        }
        KernelCharacter::RelativeIdeal => {
            let td_rel = x.todd_relative();
            let pushed = x.push_to_base(&e.mul(&td_rel)?);
            x.pull_from_base(&pushed).sub(e)
        }
        KernelCharacter::Poincare => PoincareEvaluator::new(x)?.transform(x, e),
    }
}
