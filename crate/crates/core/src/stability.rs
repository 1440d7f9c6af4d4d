//! Simpson stability arithmetic: Hilbert polynomials through
//! Riemann-Roch, reduced polynomials and slopes, polarized rank, the
//! asymptotic polynomial order, and the transformed-sheaf invariants on
//! elliptic surfaces.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::fm::ChernData2;
use crate::geometry::{FibrationKind, FibrationModel};
use crate::ring::GradedClass;
use crate::scalar::Rat;

/// A polarization class; arbitrary in general, with the surface preset
/// a·Θ + b·f requiring a, b > 0.
#[derive(Debug, Clone)]
pub struct Polarization {
    pub class: GradedClass,
}

impl Polarization {
    pub fn new(class: GradedClass) -> Self {
        Polarization { class }
    }

    pub fn surface(x: &FibrationModel, a: &Rat, b: &Rat) -> Result<Self, CoreError> {
        x.require_kind(FibrationKind::Surface)?;
        if !a.is_positive() || !b.is_positive() {
            return Err(CoreError::DimensionMismatch(
                "surface polarization needs a > 0 and b > 0".into(),
            ));
        }
        Ok(Polarization {
            class: x.theta().scale(a).add(&x.fiber().scale(b)).unwrap(),
        })
    }
}

/// Exact coefficients of the Hilbert polynomial P(m) = Σ coeffs[i]·mⁱ,
/// with the leading-coefficient invariants r(E) and d(E) read off per the
/// factorial normalization P = r/s!·mˢ + d/(s−1)!·m^{s−1} + ….
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertData {
    pub coeffs: Vec<Rat>,
}

impl HilbertData {
    pub fn new(coeffs: Vec<Rat>) -> Self {
        HilbertData { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rat::is_zero)
    }

    /// Degree of the polynomial = dimension of the support class;
    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    fn factorial(n: usize) -> Rat {
        let mut out = Rat::one();
        for k in 2..=n {
            out *= Rat::from_int(k as i64);
        }
        out
    }

    /// r(E) = s!·(leading coefficient).
    pub fn r(&self) -> Rat {
        match self.degree() {
            None => Rat::zero(),
            Some(s) => &Self::factorial(s) * &self.coeffs[s],
        }
    }

    /// d(E) = (s−1)!·(subleading coefficient); zero for constants.
    pub fn d(&self) -> Rat {
        match self.degree() {
            None | Some(0) => Rat::zero(),
            Some(s) => &Self::factorial(s - 1) * &self.coeffs[s - 1],
        }
    }

    pub fn eval(&self, m: &Rat) -> Rat {
        let mut out = Rat::zero();
        for c in self.coeffs.iter().rev() {
            out = &(&out * m) + c;
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        HilbertData { coeffs: self.coeffs.iter().map(|v| v * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &Vec<Rat>, i: usize| v.get(i).cloned().unwrap_or_else(Rat::zero);
        HilbertData {
            coeffs: (0..n)
                .map(|i| get(&self.coeffs, i) + get(&other.coeffs, i))
                .collect(),
        }
    }
}

impl std::fmt::Display for HilbertData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})m")?,
                _ => write!(f, "({c})m^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// χ(E(mH)) = ∫ ch(E)·exp(mH)·td(X), exact in m.
pub fn hilbert_polynomial(
    ch: &GradedClass,
    x: &FibrationModel,
    h: &Polarization,
) -> Result<HilbertData, CoreError> {
    let dim = x.ring.top_degree / 2;
    let td = x.todd_total();
    let base = ch.mul(&td)?;
    let mut coeffs = Vec::with_capacity(dim + 1);
    let mut hpow = x.one();
    let mut fact = Rat::one();
    for k in 0..=dim {
        if k > 0 {
            hpow = hpow.mul(&h.class)?;
            fact *= Rat::from_int(k as i64);
        }
        coeffs.push(&base.mul(&hpow)?.integrate() / &fact);
    }
    Ok(HilbertData::new(coeffs))
}

/// p_S = P/r(E) and μ_S = d(E)/r(E).
pub fn reduced_and_slope(p: &HilbertData) -> Result<(HilbertData, Rat), CoreError> {
    let r = p.r();
    if r.is_zero() {
        return Err(CoreError::ZeroRank);
    }
    Ok((p.scale(&r.recip()?), &p.d() / &r))
}

/// r(E)/deg_H(Supp E). The support class is inferred as the lowest
/// nonvanishing Chern component unless a dimension is supplied, and is
/// normalized to leading coefficient 1 so that the denominator sees the
/// reduced support cycle, not the sheaf multiplicity. Chern data alone
/// cannot always resolve the support, hence the override.
pub fn polarized_rank(
    ch: &GradedClass,
    x: &FibrationModel,
    h: &Polarization,
    support_dim: Option<usize>,
) -> Result<Rat, CoreError> {
    let dim = x.ring.top_degree / 2;
    let sdim = match support_dim {
        Some(d) => d,
        None => {
            let mut found = None;
            for codim in 0..=dim {
                if !ch.component(2 * codim).is_zero() {
                    found = Some(dim - codim);
                    break;
                }
            }
            found.ok_or(CoreError::ZeroSupportDegree)?
        }
    };
    let support = ch.component(2 * (dim - sdim));
    let lead = support
        .coeffs()
        .iter()
        .find(|c| !c.is_zero())
        .cloned()
        .ok_or(CoreError::ZeroSupportDegree)?;
    let support = support.scale(&lead.recip()?);
    // deg_H = ∫ [Supp]·H^sdim
    let mut hpow = x.one();
    for _ in 0..sdim {
        hpow = hpow.mul(&h.class)?;
    }
    let deg = support.mul(&hpow)?.integrate();
    if deg.is_zero() {
        return Err(CoreError::ZeroSupportDegree);
    }
    let p = hilbert_polynomial(ch, x, h)?;
    Ok(&p.r() / &deg)
}

/// Asymptotic order: p ≤ q iff p(n) ≤ q(n) for n ≫ 0, i.e. lexicographic
/// from the top coefficient down.
pub fn poly_compare(p: &HilbertData, q: &HilbertData) -> Ordering {
    let n = p.coeffs.len().max(q.coeffs.len());
    let get = |v: &HilbertData, i: usize| v.coeffs.get(i).cloned().unwrap_or_else(Rat::zero);
    for i in (0..n).rev() {
        match get(p, i).cmp(&get(q, i)) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// The transformed-sheaf Hilbert line on an elliptic surface polarized by
/// aΘ + bf: (nb − nae − as)m + c − ne + n·c₁/2, together with its slope.
/// Inputs are the invariants of the fiberwise-degree-zero sheaf upstairs;
/// the line is the Hilbert polynomial of the (degree-shifted) transform.
pub fn transformed_hilbert_line(
    n: &Rat,
    c: &Rat,
    s: &Rat,
    e: &Rat,
    c1_deg: &Rat,
    a: &Rat,
    b: &Rat,
) -> Result<(HilbertData, Option<Rat>), CoreError> {
    if !a.is_positive() {
        return Err(CoreError::DimensionMismatch("polarization needs a > 0".into()));
    }
    let slope_den = &(&(n * b) - &(&(n * a) * e)) - &(a * s);
    let constant = &(c - &(n * e)) + &(&Rat::new(1, 2) * &(n * c1_deg));
    let line = HilbertData::new(vec![constant.clone(), slope_den.clone()]);
    let slope = if slope_den.is_zero() {
        None
    } else {
        Some(&constant / &slope_den)
    };
    Ok((line, slope))
}

/// Numerical invariants of the inverse transform of a line bundle on a
/// degree-n spectral divisor: rank n, relative degree 0,
/// c = ne + r − n·c₁/2, s = ℓ − ne.
pub fn spectral_surface_invariants(
    n: u32,
    ell: &Rat,
    r_chi: &Rat,
    e: &Rat,
    c1_deg: &Rat,
) -> Result<ChernData2, CoreError> {
    if n == 0 {
        return Err(CoreError::NonPositiveRank(n.to_string()));
    }
    let nn = Rat::from_int(n as i64);
    let c = &(&(&nn * e) + r_chi) - &(&Rat::new(1, 2) * &(&nn * c1_deg));
    let s = ell - &(&nn * e);
    // relative degree 0 forces c₁ = c·f on the basic {Θ, f} lattice
    Ok(ChernData2 {
        rank: nn,
        c1_theta: Rat::zero(),
        c1_fiber: c,
        c1_extra: vec![],
        point_part: s,
    })
}

/// Experimental helper scanning which polarization parameters b admit a
/// numerically destabilizing subobject among user-bounded invariant
/// triples. Reports an empirical flip threshold, never a claimed bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DestabilizerScanRow {
    pub b: Rat,
    pub destabilizer_exists: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn destabilizer_scan(
    n: &Rat,
    c: &Rat,
    s: &Rat,
    e: &Rat,
    c1_deg: &Rat,
    a: &Rat,
    b_values: &[Rat],
    sub_bounds: &[(Rat, Rat, Rat)],
) -> Vec<DestabilizerScanRow> {
    b_values
        .iter()
        .map(|b| {
            let exists = sub_bounds.iter().any(|(nb, cb, sb)| {
                // (n̄c − nc̄)b + a(nc̄ − n̄c + cs̄ − c̄s + e(n̄s − ns̄) + c₁(ns̄ − n̄s)/2) > 0
                let lead = &(nb * c) - &(n * cb);
                let inner = &(&(&(&(n * cb) - &(nb * c)) + &(&(c * sb) - &(cb * s)))
                    + &(e * &(&(nb * s) - &(n * sb))))
                    + &(&Rat::new(1, 2) * &(c1_deg * &(&(n * sb) - &(nb * s))));
                (&(&lead * b) + &(a * &inner)).is_positive()
            });
            DestabilizerScanRow { b: b.clone(), destabilizer_exists: exists }
        })
        .collect()
}
