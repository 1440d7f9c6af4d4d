//! Spectral-cover bundle invariants on elliptic Calabi-Yau threefolds and
//! the heterotic consistency checks: five-brane classes, the anomaly
//! identity, generation counts, and a deterministic parameter scanner.

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::fm::ChernData3;
use crate::geometry::{EffectiveCertificate, FibrationKind, FibrationModel};
use crate::ring::GradedClass;
use crate::scalar::Rat;

/// Input data (n, η, λ) for a spectral bundle; `eta_e` selects the general
/// determinant twist and defaults to the traceless value n·c₁/2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralInput {
    pub n: u32,
    pub eta: Vec<Rat>,
    pub lambda: Rat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_e: Option<Vec<Rat>>,
}

/// Derived bundle data: Chern character, the restricted twist class γ|_S,
/// the fiber-component invariant ϖ, and the Chern classes.
#[derive(Debug, Clone)]
pub struct SpectralBundle {
    pub input: SpectralInput,
    pub ch: ChernData3,
    pub gamma_s: Rat,
    pub varpi: Rat,
    pub a_e: Rat,
    pub s_e: Rat,
    pub c1: GradedClass,
    pub c2: GradedClass,
    pub c3: Rat,
    pub su_n: bool,
}

/// Five-brane class [W] = Θ·p*(W_B) + a_f·f.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiveBraneClass {
    pub w_b: Vec<Rat>,
    pub a_f: Rat,
    /// c₂(TX) − c₂(V) = [W], checked as an exact ring identity.
    pub anomaly_identity: bool,
}

/// Builds the bundle invariants from (n, η, λ):
/// γ|_S = −λ·η·(η − n·c₁) and
/// ϖ = −c₁²(n³−n)/24 + (λ²−¼)·n·η·(η−n·c₁)/2,
/// then a_E = γ|_S + η_E·η/n and s_E = n·c₁²/24 + η_E²/(2n) − ϖ.
pub fn build_bundle(
    input: &SpectralInput,
    x: &FibrationModel,
) -> Result<SpectralBundle, CoreError> {
    x.require_kind(FibrationKind::Cy3)?;
    if input.n == 0 {
        return Err(CoreError::NonPositiveRank(input.n.to_string()));
    }
    let b = x.base_surface();
    let r = b.h11();
    if input.eta.len() != r || input.eta_e.as_ref().is_some_and(|v| v.len() != r) {
        return Err(CoreError::DimensionMismatch(format!(
            "eta must have {r} components for base {}",
            b.name
        )));
    }
    let n = Rat::from_int(input.n as i64);
    let half = Rat::new(1, 2);
    let eta_e: Vec<Rat> = match &input.eta_e {
        Some(v) => v.clone(),
        None => b.c1.iter().map(|c| &(&half * &n) * c).collect(),
    };
    let c1sq = b.c1_sq();
    // η·(η − n·c₁)
    let eta_shift: Vec<Rat> = input
        .eta
        .iter()
        .zip(&b.c1)
        .map(|(e, c)| e - &(&n * c))
        .collect();
    let eta_dot = b.dot(&input.eta, &eta_shift);
    let gamma_s = -(&input.lambda * &eta_dot);
    let n3n = &n.pow(3) - &n;
    let varpi = &(-(&Rat::new(1, 24) * &(&c1sq * &n3n)))
        + &(&(&half * &(&(&input.lambda * &input.lambda) - &Rat::new(1, 4))) * &(&n * &eta_dot));
    let a_e = &gamma_s + &(&b.dot(&eta_e, &input.eta) / &n);
    let s_e = &(&(&n * &c1sq) / &Rat::from_int(24))
        + &(&(&b.dot(&eta_e, &eta_e) / &(&Rat::from_int(2) * &n)) - &varpi);

    // ch(V): rank n, ch₁ = p*(η_E − n·c₁/2), ch₂ = −Θ·p*η + (s_E − (η_E·c₁)/2
    // + n·c₁²/12)f, ch₃ = −a_E + (c₁·η)/2
    let base_part: Vec<Rat> = eta_e
        .iter()
        .zip(&b.c1)
        .map(|(e, c)| e - &(&(&half * &n) * c))
        .collect();
    let fiber_part = &(&s_e - &(&half * &b.c1_dot(&eta_e)))
        + &(&(&n * &c1sq) / &Rat::from_int(12));
    let point_part = &(-a_e.clone()) + &(&half * &b.c1_dot(&input.eta));
    let ch = ChernData3 {
        rank: n.clone(),
        fiber_deg: Rat::zero(),
        base_part,
        section_curve: input.eta.iter().map(|e| -e).collect(),
        fiber_part,
        point_part,
    };

    // Chern classes from the character, in the ring: c₁ = ch₁,
    // c₂ = c₁²/2 − ch₂, c₃ = 2ch₃ + c₁·c₂ − c₁³/3.
    let ch_class = ch.to_class(x);
    let c1_class = ch_class.component(2);
    let ch2 = ch_class.component(4);
    let ch3 = ch_class.component(6);
    let c1sq_class = c1_class.mul(&c1_class).unwrap();
    let c2_class = c1sq_class.scale(&half).sub(&ch2).unwrap();
    let c3_val = (ch3.scale(&Rat::from_int(2)))
        .add(&c1_class.mul(&c2_class).unwrap())
        .unwrap()
        .sub(&c1sq_class.mul(&c1_class).unwrap().scale(&Rat::new(1, 3)))
        .unwrap()
        .integrate();
    let su_n = c1_class.is_zero();
    Ok(SpectralBundle {
        input: input.clone(),
        ch,
        gamma_s,
        varpi,
        a_e,
        s_e,
        c1: c1_class,
        c2: c2_class,
        c3: c3_val,
        su_n,
    })
}

/// W_B = 12c₁ − η and a_f = c₂(B) + 11c₁² − ϖ, for traceless bundles;
/// the anomaly identity c₂(TX) − c₂(V) = [W] is re-derived in the ring and
/// returned with the class.
pub fn five_brane_class(
    v: &SpectralBundle,
    x: &FibrationModel,
) -> Result<FiveBraneClass, CoreError> {
    if !v.su_n {
        return Err(CoreError::NotSUn(format!("{}", v.c1)));
    }
    let b = x.base_surface();
    let w_b: Vec<Rat> = b
        .c1
        .iter()
        .zip(&v.input.eta)
        .map(|(c, e)| &(&Rat::from_int(12) * c) - e)
        .collect();
    let a_f = &(&b.c2 + &(&Rat::from_int(11) * &b.c1_sq())) - &v.varpi;
    let w_class = x
        .theta_pullback_divisor(&w_b)
        .add(&x.fiber().scale(&a_f))
        .unwrap();
    let anomaly_identity = x.c2_tangent()?.sub(&v.c2)? == w_class;
    Ok(FiveBraneClass { w_b, a_f, anomaly_identity })
}

/// Heterotic consistency report for one bundle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnomalyReport {
    pub c1_even: bool,
    pub w_b_effective: bool,
    pub a_f_nonneg: bool,
    pub anomaly_identity: bool,
    pub pass: bool,
}

pub fn anomaly_check(v: &SpectralBundle, x: &FibrationModel) -> Result<AnomalyReport, CoreError> {
    // c₁(V) ≡ 0 (mod 2), checked coordinatewise on the divisor basis
    let r = x.h11_base();
    let c1_coords = ChernData3::from_class(x, &v.c1);
    let c1_even = c1_coords.base_part.iter().all(|c| {
        c.is_zero()
            || (c.is_integer() && (c.numer() % num_bigint::BigInt::from(2)) == 0.into())
    }) && (0..r).all(|_| c1_coords.fiber_deg.is_zero());
    let (w_b_effective, a_f_nonneg, anomaly_identity) = if v.su_n {
        let w = five_brane_class(v, x)?;
        let eff = x.base_surface().effective_check(&w.w_b)?;
        (eff.effective, !w.a_f.is_negative(), w.anomaly_identity)
    } else {
        (false, false, false)
    };
    let pass = c1_even && w_b_effective && a_f_nonneg && anomaly_identity;
    Ok(AnomalyReport { c1_even, w_b_effective, a_f_nonneg, anomaly_identity, pass })
}

/// Net generation number: the signed index ½∫c₃(V) and its absolute value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generations {
    pub signed: Rat,
    pub count: Rat,
}

pub fn n_generations(v: &SpectralBundle) -> Generations {
    let signed = &Rat::new(1, 2) * &v.c3;
    Generations { count: signed.abs(), signed }
}

/// Index ∫ ch(V)·td(X), the ring-level route to the generation count for
/// traceless bundles.
pub fn dirac_index(v: &SpectralBundle, x: &FibrationModel) -> Rat {
    v.ch.to_class(x).mul(&x.todd_total()).unwrap().integrate()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanRanges {
    /// Inclusive rank range.
    pub n_min: u32,
    pub n_max: u32,
    /// Inclusive integer range per η coordinate.
    pub eta_min: Vec<i64>,
    pub eta_max: Vec<i64>,
    pub lambdas: Vec<Rat>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanTargets {
    /// Keep only models whose |N_gen| equals this value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_gen: Option<Rat>,
    /// Keep only models passing the full anomaly check.
    #[serde(default)]
    pub require_anomaly_pass: bool,
}

/// Integrality flags; the congruence conditions making γ an honest
/// integral class are not enforced, they are reported so users can filter.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanFlags {
    pub c2_integral: bool,
    pub c3_integral: bool,
    pub n_gen_integral: bool,
}

#[derive(Debug, Clone)]
pub struct ScanRow {
    pub bundle: SpectralBundle,
    pub anomaly: AnomalyReport,
    pub five_brane: Option<FiveBraneClass>,
    pub generations: Generations,
    pub flags: ScanFlags,
}

/// Deterministic enumeration over the (n, η, λ) grid, filtered by the
/// targets and sorted by (n, η lexicographic, λ).
pub fn scan_models(
    x: &FibrationModel,
    ranges: &ScanRanges,
    targets: &ScanTargets,
) -> Result<Vec<ScanRow>, CoreError> {
    x.require_kind(FibrationKind::Cy3)?;
    let r = x.h11_base();
    if ranges.n_min > ranges.n_max {
        return Err(CoreError::EmptyRange(format!(
            "n range {}..{} is empty",
            ranges.n_min, ranges.n_max
        )));
    }
    if ranges.eta_min.len() != r || ranges.eta_max.len() != r {
        return Err(CoreError::DimensionMismatch(format!(
            "eta ranges must have {r} components"
        )));
    }
    if ranges.eta_min.iter().zip(&ranges.eta_max).any(|(lo, hi)| lo > hi) {
        return Err(CoreError::EmptyRange("empty eta coordinate range".into()));
    }
    if ranges.lambdas.is_empty() {
        return Err(CoreError::EmptyRange("no lambda values".into()));
    }
    let mut lambdas = ranges.lambdas.clone();
    lambdas.sort();
    lambdas.dedup();

    let mut rows = Vec::new();
    for n in ranges.n_min..=ranges.n_max {
        let mut eta = ranges.eta_min.clone();
        'grid: loop {
            for lambda in &lambdas {
                let input = SpectralInput {
                    n,
                    eta: eta.iter().map(|&v| Rat::from_int(v)).collect(),
                    lambda: lambda.clone(),
                    eta_e: None,
                };
                let bundle = build_bundle(&input, x)?;
                let anomaly = anomaly_check(&bundle, x)?;
                let generations = n_generations(&bundle);
                if targets.require_anomaly_pass && !anomaly.pass {
                    continue;
                }
                if let Some(want) = &targets.n_gen {
                    if &generations.count != want {
                        continue;
                    }
                }
                let five_brane = if bundle.su_n {
                    Some(five_brane_class(&bundle, x)?)
                } else {
                    None
                };
                let flags = ScanFlags {
                    c2_integral: bundle.c2.coeffs().iter().all(Rat::is_integer),
                    c3_integral: bundle.c3.is_integer(),
                    n_gen_integral: generations.count.is_integer(),
                };
                rows.push(ScanRow { bundle, anomaly, five_brane, generations, flags });
            }
            // advance the η odometer lexicographically
            let mut i = r;
            while i > 0 {
                i -= 1;
                if eta[i] < ranges.eta_max[i] {
                    eta[i] += 1;
                    for j in i + 1..r {
                        eta[j] = ranges.eta_min[j];
                    }
                    continue 'grid;
                }
            }
            break;
        }
    }
    Ok(rows)
}

/// Short human-readable tag for the effectivity certificate, used in scan
/// output.
pub fn certificate_summary(cert: &EffectiveCertificate) -> String {
    match cert {
        EffectiveCertificate::Combination(c) => {
            let parts: Vec<String> =
                c.iter().map(|(i, v)| format!("{v}*g{i}")).collect();
            format!("combination: {}", parts.join(" + "))
        }
        EffectiveCertificate::Separating(y) => {
            let parts: Vec<String> = y.iter().map(|v| v.to_string()).collect();
            format!("separating functional: [{}]", parts.join(", "))
        }
    }
}
