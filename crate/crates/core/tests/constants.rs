use proptest::prelude::*;
use std::f64::consts::PI;
use thl_core::constants::*;
use thl_core::Error;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn p(n: usize, s: f64, beta: f64) -> InequalityParams {
    InequalityParams::new(n, s, beta).unwrap()
}

#[test]
fn derived_parameters() {
    let q = p(3, 0.5, 2.0);
    assert_eq!(q.n_s(), 4.5);
    assert_eq!(q.alpha(), 0.25);
    assert!(rel(q.two_s_star(), 6.0 / 2.5) < 1e-15);
    assert!(InequalityParams::new(1, 0.0, 2.0).is_err());
    assert!(InequalityParams::new(2, 1.0, 2.0).is_err());
}

#[test]
fn cone_constant_values() {
    let c = |n, s, b| sharp_constant(ConstantKind::HCone, p(n, s, b), None).unwrap();
    assert!(rel(c(3, 0.0, 2.0), 2.0 / PI) < 1e-13);
    assert!(rel(c(3, 0.0, 3.0), 0.5) < 1e-13);
    assert!(rel(c(2, 0.5, 2.5), 0.228_473_290_522_231_81) < 1e-13);
    assert!(rel(c(4, -0.5, 3.0), 1.934_325_615_179_900_6) < 1e-13);
    assert!(rel(c(5, 0.3, 4.1), 0.788_778_913_447_731_26) < 1e-13);
    assert_eq!(c(3, 0.2, 4.2), 0.0);
    let k = sharp_constant(ConstantKind::Kato, p(3, 0.0, 2.0), None).unwrap();
    assert!(rel(k, 2.0 / PI) < 1e-13);
    let err = sharp_constant(ConstantKind::HCone, p(3, 0.0, 1.5), None).unwrap_err();
    assert!(matches!(err, Error::Range(m) if m.contains("beta")));
}

#[test]
fn half_space_constant_values() {
    let k = |s, b| sharp_constant(ConstantKind::KHalf, p(2, s, b), None).unwrap();
    assert!(rel(k(0.0, 1.0), 0.228_473_290_522_231_81) < 1e-13);
    assert!(rel(k(0.0, 0.0), 2.0 / PI) < 1e-13);
    assert!(rel(k(0.0, 0.5), 0.577_915_145_216_145_93) < 1e-13);
    assert!(rel(k(-0.5, 0.5), 0.790_678_874_313_624_51) < 1e-13);
    assert!(rel(k(0.5, 1.0), 0.247_564_687_801_113_46) < 1e-13);
    assert!(rel(k(0.3, 0.2), 0.494_142_191_813_937_73) < 1e-13);
    assert!(sharp_constant(ConstantKind::KHalf, p(2, 0.0, 1.5), None).is_err());
}

#[test]
fn trace_and_sobolev_values() {
    let c = |kind, n, s, extra| sharp_constant(kind, p(n, s, 2.0), extra).unwrap();
    assert!(rel(c(ConstantKind::CsTrace, 2, 0.0, None), 1.0) < 1e-15);
    assert!(rel(c(ConstantKind::HardyWeighted, 3, 0.0, None), 1.0) < 1e-15);
    assert!(rel(c(ConstantKind::TraceSobolev, 2, 0.0, None), 0.564_189_583_547_756_29) < 1e-13);
    assert!(rel(c(ConstantKind::TraceSobolev, 3, 0.5, None), 1.255_075_975_345_999) < 1e-13);
    assert!(rel(c(ConstantKind::TraceSobolev, 4, -0.5, None), 0.079_023_273_345_566_205) < 1e-13);
    assert!(rel(c(ConstantKind::FracSobolev, 3, 0.0, Some(0.5)), 0.370_018_484_153_678_11) < 1e-13);
    assert!(rel(c(ConstantKind::FracSobolev, 2, 0.0, Some(0.25)), 0.718_059_191_519_817_49) < 1e-13);
    let spec = sharp_constant(ConstantKind::SpectralTrace, p(2, 0.0, 0.5), Some(0.3)).unwrap();
    assert!(rel(spec, 0.738_990_956_179_594_6) < 1e-13);
    assert!(rel(c(ConstantKind::SpectralEnergyFactor, 2, 0.0, Some(0.3)), 0.572_540_458_568_311_72) < 1e-13);
    assert!(rel(c(ConstantKind::SpectralEnergyFactor, 2, 0.0, Some(0.5)), 1.0) < 1e-14);
    assert!(rel(c(ConstantKind::LogsobHalfline, 2, 0.0, Some(3.0)), 0.421_959_687_830_095_33) < 1e-13);
}

#[test]
fn radial_log_constants() {
    let cases = [
        (2, 0.0, 0.293_525_326_347_479_8, 0.447_334_526_289_135_25),
        (3, 0.0, 0.213_210_089_979_134_09, 0.274_006_915_608_045_83),
        (3, 0.5, 0.538_521_552_279_266_07, 0.604_583_848_059_836_99),
    ];
    for (n, s, ls, lh) in cases {
        assert!(rel(cls_r(n, s).unwrap(), ls) < 1e-13);
        assert!(rel(clh_r(n, s).unwrap(), lh) < 1e-13);
        let pre = radial_prefactor(n, s).unwrap();
        let a = 2.0 * n as f64 / (1.0 - s);
        assert!(rel(pre * logsob_halfline(a).unwrap(), ls) < 1e-12);
        assert!(rel(pre * flhs_c(n, -0.5 * (1.0 + s)).unwrap(), lh) < 1e-12);
    }
    for n in 2..=6 {
        for s in [-0.5, 0.0, 0.5] {
            assert!(cls_r(n, s).unwrap() > 0.0 && clh_r(n, s).unwrap() > 0.0);
        }
    }
}

#[test]
fn sphere_weights_and_gamma_p() {
    assert!(rel(omega_ns(2, 0.0).unwrap(), 2.0 * PI) < 1e-14);
    assert!(rel(omega_ns(3, 0.0).unwrap(), PI * PI) < 1e-14);
    assert!(rel(omega_sphere(2).unwrap(), 2.0 * PI) < 1e-14);
    assert!(rel(gamma_p(3, 0.4, 2.0), 0.3) < 1e-15);
}

#[test]
fn identity_suite_small() {
    let rep = constant_identities(&[p(3, 0.0, 2.0)]).unwrap();
    assert!(rep.pass());
    assert!(rep.max_deviation() < 1e-13);
    assert!(constant_identities(&[]).is_err());
    assert!(h_cone(3, 0.0, 4.0 - 1e-6).unwrap() < 1e-5);
}

#[test]
fn kind_names_round_trip() {
    for k in ConstantKind::ALL {
        assert_eq!(k.name().parse::<ConstantKind>().unwrap(), k);
    }
    assert!("nope".parse::<ConstantKind>().is_err());
}

proptest! {
    #[test]
    fn cone_constant_positive_and_vanishing(n in 2usize..7, s in -0.95f64..0.95, t in 0.0f64..0.999) {
        let ns = n as f64 + 1.0 + s;
        let beta = 2.0 + t * (ns - 2.0);
        let h = h_cone(n, s, beta).unwrap();
        prop_assert!(h > 0.0);
        // Linear vanishing at n_s.
        let ratio = h_cone(n, s, ns - 1e-6).unwrap() / h_cone(n, s, ns - 1e-4).unwrap();
        prop_assert!((ratio / 1e-2 - 1.0).abs() < 1e-2);
    }

    #[test]
    fn identities_hold(n in 2usize..8, s in -0.9f64..0.9, t in 0.0f64..1.0) {
        let ns = n as f64 + 1.0 + s;
        let rep = constant_identities(&[p(n, s, 2.0 + t * (ns - 2.0))]).unwrap();
        prop_assert!(rep.pass(), "{:?}", rep);
    }

    #[test]
    fn k_half_decreases_in_beta(s in -0.9f64..0.9, b in 0.0f64..0.99) {
        prop_assert!(k_half(s, b + 0.01).unwrap() < k_half(s, b).unwrap());
    }
}
