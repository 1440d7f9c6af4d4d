//! Property tests for the algebraic identities the engine is built on.
//! Everything here is an exact equality; proptest supplies the rational
//! samples.

use proptest::prelude::*;

use fmcalc_core::charges::{
    central_charge_a, central_charge_b, charge_to_chern, chern_to_charge, conifold_on_charges,
    effective_charge, lcsl_on_charges, ChargeVector, JChern, KahlerPoint, PrepotentialData,
};
use fmcalc_core::fm::{
    fm_cy3, fm_surface, grr_transform, relative_invariants_surface, ChernData2, ChernData3,
    Direction,
};
use fmcalc_core::geometry::{build_base, BaseCurve, BaseSpec, FibrationModel};
use fmcalc_core::scalar::{CRat, Rat};
use fmcalc_core::stability::{hilbert_polynomial, poly_compare, Polarization};

fn rat() -> impl Strategy<Value = Rat> {
    (-24i64..=24, 1i64..=6).prop_map(|(n, d)| Rat::new(n, d))
}

fn crat() -> impl Strategy<Value = CRat> {
    (rat(), rat()).prop_map(|(re, im)| CRat::new(re, im))
}

fn rat_vec(len: usize) -> impl Strategy<Value = Vec<Rat>> {
    prop::collection::vec(rat(), len)
}

fn catalog_specs() -> Vec<BaseSpec> {
    let mut specs = vec![BaseSpec::P2, BaseSpec::Enriques];
    for m in 0..=3 {
        specs.push(BaseSpec::F { m });
    }
    for k in 1..=8 {
        specs.push(BaseSpec::DP { k });
    }
    specs
}

fn cy3(spec: &BaseSpec) -> FibrationModel {
    FibrationModel::cy3(build_base(spec).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_mul_commutes_and_distributes(
        idx in 0usize..14,
        coeffs in rat_vec(44),
    ) {
        let specs = catalog_specs();
        let x = cy3(&specs[idx % specs.len()]);
        let dim = x.ring.dim();
        let a = x.ring.from_coeffs(coeffs[..dim].to_vec());
        let b = x.ring.from_coeffs(coeffs[dim..2 * dim].to_vec());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        let c = x.theta();
        let lhs = a.add(&b).unwrap().mul(&c).unwrap();
        let rhs = a.mul(&c).unwrap().add(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn exponential_group_law(u in rat_vec(6), v in rat_vec(6)) {
        let x = cy3(&BaseSpec::P2);
        let mut uu = u.clone();
        let mut vv = v.clone();
        uu[0] = Rat::zero();
        vv[0] = Rat::zero();
        let a = x.ring.from_coeffs(uu);
        let b = x.ring.from_coeffs(vv);
        let lhs = a.add(&b).unwrap().exp_nilpotent().unwrap();
        let rhs = a.exp_nilpotent().unwrap().mul(&b.exp_nilpotent().unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        // exp(−a)·exp(a) = 1
        let inv = a.neg().exp_nilpotent().unwrap();
        prop_assert_eq!(inv.mul(&a.exp_nilpotent().unwrap()).unwrap(), x.one());
    }

    #[test]
    fn sqrt_squares_back(u in rat_vec(6)) {
        let x = cy3(&BaseSpec::P2);
        let mut uu = u;
        uu[0] = Rat::one();
        let a = x.ring.from_coeffs(uu);
        let s = a.sqrt_unit().unwrap();
        prop_assert_eq!(s.mul(&s).unwrap(), a);
    }

    #[test]
    fn coefficients_stay_canonical(u in rat_vec(6), v in rat_vec(6)) {
        let x = cy3(&BaseSpec::P2);
        let a = x.ring.from_coeffs(u);
        let b = x.ring.from_coeffs(v);
        for c in a.mul(&b).unwrap().coeffs() {
            prop_assert!(c.is_canonical());
        }
    }

    #[test]
    fn projection_formula(idx in 0usize..14, seed in rat_vec(40)) {
        let specs = catalog_specs();
        let x = cy3(&specs[idx % specs.len()]);
        let r = x.h11_base();
        let dim = x.ring.dim();
        let a = x.ring.from_coeffs(seed[..dim].to_vec());
        let d: Vec<Rat> = seed[dim..dim + r].to_vec();
        // push(p*(D)·a) = D·push(a) in the base ring
        let pd = x.pullback_divisor(&d);
        let lhs = x.push_to_base(&pd.mul(&a).unwrap());
        let rhs_in = x.push_to_base(&a);
        // multiply the base class by D
        let b = x.base_surface();
        let want_d2: Vec<Rat> = d.iter().map(|di| di * &rhs_in.d0).collect();
        let want_d4 = b.dot(&d, &rhs_in.d2);
        prop_assert_eq!(&lhs.d0, &Rat::zero());
        prop_assert_eq!(&lhs.d2, &want_d2);
        prop_assert_eq!(&lhs.d4, &want_d4);
    }

    #[test]
    fn c2_pairing_is_12_c1(idx in 0usize..14, d in rat_vec(9)) {
        let specs = catalog_specs();
        let x = cy3(&specs[idx % specs.len()]);
        let r = x.h11_base();
        let dv = d[..r].to_vec();
        let lhs = x
            .c2_tangent()
            .unwrap()
            .mul(&x.pullback_divisor(&dv))
            .unwrap()
            .integrate();
        let rhs = &Rat::from_int(12) * &x.base_surface().c1_dot(&dv);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn roundtrip_minus_identity_random_base(idx in 0usize..14, seed in rat_vec(22)) {
        let specs = catalog_specs();
        let x = cy3(&specs[idx % specs.len()]);
        let r = x.h11_base();
        let e = ChernData3 {
            rank: seed[0].clone(),
            fiber_deg: seed[1].clone(),
            base_part: seed[2..2 + r].to_vec(),
            section_curve: seed[2 + r..2 + 2 * r].to_vec(),
            fiber_part: seed[20].clone(),
            point_part: seed[21].clone(),
        };
        let fwd = fm_cy3(&e, &x, Direction::Forward).unwrap();
        let back = fm_cy3(&fwd, &x, Direction::Inverse).unwrap();
        prop_assert_eq!(back, e.neg());
    }

    #[test]
    fn transform_is_linear(seed in rat_vec(14), alpha in rat(), beta in rat()) {
        let x = cy3(&BaseSpec::P2);
        let e1 = ChernData3::from_vec(1, &seed[..6]);
        let e2 = ChernData3::from_vec(1, &seed[6..12]);
        let combo = e1.scale(&alpha).add(&e2.scale(&beta));
        let lhs = fm_cy3(&combo, &x, Direction::Forward).unwrap();
        let rhs = fm_cy3(&e1, &x, Direction::Forward)
            .unwrap()
            .scale(&alpha)
            .add(&fm_cy3(&e2, &x, Direction::Forward).unwrap().scale(&beta));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn surface_roundtrip_minus_identity(seed in rat_vec(5), e_deg in 0u32..4, g in 0u32..3) {
        let x = FibrationModel::elliptic_surface(BaseCurve { genus: g, e: e_deg }, vec![]).unwrap();
        let e = ChernData2 {
            rank: seed[0].clone(),
            c1_theta: seed[1].clone(),
            c1_fiber: seed[2].clone(),
            c1_extra: vec![],
            point_part: seed[3].clone(),
        };
        let fwd = fm_surface(&e, &x, Direction::Forward).unwrap();
        prop_assert_eq!(fm_surface(&fwd, &x, Direction::Inverse).unwrap(), e.neg());
        // relative flip
        let (n, d) = relative_invariants_surface(&e, &x);
        let (n2, d2) = relative_invariants_surface(&fwd, &x);
        prop_assert_eq!(n2, d);
        prop_assert_eq!(d2, -n);
    }

    #[test]
    fn hilbert_additivity(u in rat_vec(4), v in rat_vec(4), a in 1i64..4, b in 1i64..5) {
        let x = FibrationModel::elliptic_surface(BaseCurve { genus: 0, e: 1 }, vec![]).unwrap();
        let h = Polarization::surface(&x, &Rat::from_int(a), &Rat::from_int(b)).unwrap();
        let ca = x.ring.from_coeffs(u);
        let cb = x.ring.from_coeffs(v);
        let lhs = hilbert_polynomial(&ca.add(&cb).unwrap(), &x, &h).unwrap();
        let rhs = hilbert_polynomial(&ca, &x, &h)
            .unwrap()
            .add(&hilbert_polynomial(&cb, &x, &h).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn poly_compare_matches_large_evaluation(p in rat_vec(4), q in rat_vec(4)) {
        use fmcalc_core::stability::HilbertData;
        let hp = HilbertData::new(p);
        let hq = HilbertData::new(q);
        let ord = poly_compare(&hp, &hq);
        // evaluation at a large point agrees with the asymptotic order
        let big = Rat::from_int(1_000_003);
        let pe = hp.eval(&big);
        let qe = hq.eval(&big);
        prop_assert_eq!(ord, pe.cmp(&qe));
    }
}

#[test]
fn grr_oracle_matches_closed_formula_on_random_inputs() {
    use fmcalc_core::kernel::PoincareEvaluator;
    let mut lcg: u64 = 0x5eed_cafe;
    let mut next = move || {
        lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((lcg >> 33) as i64 % 13) - 6
    };
    for spec in catalog_specs() {
        let x = cy3(&spec);
        let ev = PoincareEvaluator::new(&x).unwrap();
        let r = x.h11_base();
        for _ in 0..20 {
            let e = ChernData3 {
                rank: Rat::from_int(next()),
                fiber_deg: Rat::from_int(next()),
                base_part: (0..r).map(|_| Rat::from_int(next())).collect(),
                section_curve: (0..r).map(|_| Rat::from_int(next())).collect(),
                fiber_part: Rat::new(next(), 2),
                point_part: Rat::new(next(), 3),
            };
            let via_kernel =
                ChernData3::from_class(&x, &ev.transform(&x, &e.to_class(&x)).unwrap());
            let via_formula = fm_cy3(&e, &x, Direction::Forward).unwrap();
            assert_eq!(via_kernel, via_formula, "base {:?}", x.ring.name);
            assert_eq!(grr_transform(&e, &x).unwrap(), via_formula);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn z_contract_and_linearity(
        n6 in rat(), n4 in rat_vec(2), n2 in rat_vec(2), n0 in rat(),
        t in prop::collection::vec(crat(), 2),
        k_diag in rat(), k_mixed in rat(), c2j in rat_vec(2), cab in rat(),
    ) {
        let p = PrepotentialData::new(
            2,
            &[
                (0, 0, 0, k_diag.clone()),
                (0, 0, 1, k_mixed.clone()),
                (1, 1, 1, k_diag),
            ],
            c2j,
            Rat::from_int(-540),
            vec![vec![Rat::zero(), cab.clone()], vec![cab, Rat::zero()]],
            Rat::zero(),
        )
        .unwrap();
        let n = ChargeVector { n6, n4, n2, n0 };
        let t = KahlerPoint { t };
        let za = central_charge_a(&n, &t, &p).unwrap();
        let zb = central_charge_b(&charge_to_chern(&n, &p).unwrap(), &t, &p).unwrap();
        prop_assert_eq!(za, zb);
        // charge map roundtrip
        let back = chern_to_charge(&charge_to_chern(&n, &p).unwrap(), &p).unwrap();
        prop_assert_eq!(back, n);
    }

    #[test]
    fn conifold_fixes_lower_charges(
        n6 in rat(), n4 in rat_vec(2), n2 in rat_vec(2), n0 in rat(),
        c2j in rat_vec(2),
    ) {
        let p = PrepotentialData::new(
            2,
            &[(0, 0, 0, Rat::from_int(9)), (0, 1, 1, Rat::from_int(2))],
            c2j,
            Rat::from_int(-540),
            vec![vec![Rat::new(1, 2), Rat::zero()], vec![Rat::zero(), Rat::new(1, 3)]],
            Rat::zero(),
        )
        .unwrap();
        let n = ChargeVector { n6: n6.clone(), n4: n4.clone(), n2: n2.clone(), n0: n0.clone() };
        let act = conifold_on_charges(&n, &p).unwrap();
        prop_assert_eq!(&act.normalized.n6, &(&n6 + &n0));
        prop_assert_eq!(&act.normalized.n4, &n4);
        prop_assert_eq!(&act.normalized.n2, &n2);
        prop_assert_eq!(&act.normalized.n0, &n0);
    }

    #[test]
    fn lcsl_kahler_shift(
        n6 in rat(), n4 in rat_vec(2), n2 in rat_vec(2), n0 in rat(),
        t in prop::collection::vec(crat(), 2),
        a in 0usize..2,
    ) {
        let p = PrepotentialData::new(
            2,
            &[
                (0, 0, 0, Rat::from_int(9)),
                (0, 0, 1, Rat::from_int(3)),
                (0, 1, 1, Rat::one()),
            ],
            vec![Rat::from_int(-6), Rat::from_int(36)],
            Rat::from_int(-540),
            vec![vec![Rat::zero(); 2]; 2],
            Rat::zero(),
        )
        .unwrap();
        let n = ChargeVector { n6, n4, n2, n0 };
        let t = KahlerPoint { t };
        let mut d = vec![Rat::zero(); 2];
        d[a] = Rat::one();
        let twisted = lcsl_on_charges(&n, &d, &p).unwrap();
        let lhs = central_charge_a(&twisted, &t, &p).unwrap();
        let mut shifted = t.clone();
        shifted.t[a] = &shifted.t[a] + &CRat::real(Rat::from_int(-1));
        prop_assert_eq!(lhs, central_charge_a(&n, &shifted, &p).unwrap());
    }

    #[test]
    fn effective_charge_linear(seed in rat_vec(12), alpha in rat()) {
        let x = cy3(&BaseSpec::P2);
        let e1 = ChernData3::from_vec(1, &seed[..6]);
        let e2 = ChernData3::from_vec(1, &seed[6..12]);
        let q1 = effective_charge(&e1, &x).unwrap();
        let q2 = effective_charge(&e2, &x).unwrap();
        let combo = effective_charge(&e1.scale(&alpha).add(&e2), &x).unwrap();
        let want: Vec<Rat> = q1
            .coords
            .iter()
            .zip(&q2.coords)
            .map(|(u, v)| &(u * &alpha) + v)
            .collect();
        prop_assert_eq!(combo.coords, want);
    }
}

#[test]
fn wit_slope_reciprocity_on_samples() {
    let x = cy3(&BaseSpec::F { m: 1 });
    for (n, d) in [(2i64, 3i64), (5, -4), (1, 7), (3, 1)] {
        let mut e = ChernData3::zero(2);
        e.rank = Rat::from_int(n);
        e.fiber_deg = Rat::from_int(d);
        let out = fm_cy3(&e, &x, Direction::Forward).unwrap();
        let mu = Rat::from_int(d) / Rat::from_int(n);
        let mu_out = &out.fiber_deg / &out.rank;
        assert_eq!(mu_out, -(mu.recip().unwrap()));
    }
}

#[test]
fn jchern_identity_under_zero_prepotential_constants() {
    // with c_ab = 0 the charge map is the plain shift dictionary
    let p = PrepotentialData::new(
        1,
        &[(0, 0, 0, Rat::from_int(5))],
        vec![Rat::from_int(50)],
        Rat::from_int(-200),
        vec![vec![Rat::zero()]],
        Rat::zero(),
    )
    .unwrap();
    let e = JChern {
        ch0: Rat::one(),
        ch1: vec![Rat::from_int(2)],
        ch2: vec![Rat::new(1, 2)],
        ch3: Rat::from_int(-3),
    };
    let n = chern_to_charge(&e, &p).unwrap();
    assert_eq!(n.n2, vec![Rat::new(1, 2)]);
    assert_eq!(n.n0, &Rat::from_int(3) - &(&Rat::from_int(50) / &Rat::from_int(12) * &Rat::from_int(2)));
}
