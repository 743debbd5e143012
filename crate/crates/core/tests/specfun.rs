use proptest::prelude::*;
use thl_core::specfun::*;
use thl_core::Error;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn gamma_values() {
    assert_eq!(gamma(1.0).unwrap(), 1.0);
    assert_eq!(gamma(5.0).unwrap(), 24.0);
    assert!(rel(gamma(0.5).unwrap(), 1.772_453_850_905_516) < 1e-14);
    let cases = [
        (0.3, 2.991_568_987_687_590_7),
        (2.7, 1.544_685_845_850_593_9),
        (-1.3, 3.328_347_006_788_609_3),
        (25.5, 3.086_770_540_528_696_8e24),
        (-4.2, -0.164_061_050_477_614_05),
        (100.5, 9.320_963_104_082_716_6e156),
        (150.5, 4.661_072_627_097_377_9e261),
    ];
    for (x, want) in cases {
        assert!(rel(gamma(x).unwrap(), want) < 1e-13, "gamma({x})");
    }
    assert!(matches!(gamma(-3.0), Err(Error::Pole(_))));
    assert!(matches!(gamma(0.0), Err(Error::Pole(_))));
    assert!(rel(gamma_fn(25.5, true).unwrap(), 3.086_770_540_528_696_8e24f64.ln()) < 1e-14);
    assert!(rel(ln_gamma(100.5).unwrap(), 9.320_963_104_082_716_6e156f64.ln()) < 1e-14);
}

#[test]
fn digamma_values() {
    let em = 0.577_215_664_901_532_9;
    assert!(rel(digamma(1.0).unwrap(), -em) < 1e-13);
    assert!(rel(digamma(2.0).unwrap(), 1.0 - em) < 1e-13);
    assert!(rel(digamma(0.5).unwrap(), -em - 2.0 * 2f64.ln()) < 1e-13);
    assert!(matches!(digamma(-2.0), Err(Error::Pole(_))));
}

#[test]
fn pochhammer_values() {
    assert_eq!(pochhammer(7.3, 0), 1.0);
    assert_eq!(pochhammer(3.0, 2), 12.0);
    assert!(rel(pochhammer(0.5, 3), 1.875) < 1e-15);
}

#[test]
fn hyp2f1_values() {
    assert_eq!(f21(0.3, 0.4, 0.5, 0.0).unwrap(), 1.0);
    let cases = [
        ((1.0, 1.0, 2.0, 0.5), 1.386_294_361_119_890_6),
        ((0.5, 0.25, 1.75, -3.0), 0.880_774_529_199_855_9),
        ((0.5, 0.25, 1.75, 0.9), 1.107_177_441_570_612_1),
        ((0.3, 0.7, 0.5, 0.99), 8.319_121_711_109_082_9),
        ((1.2, 0.8, 0.5, 0.95), 128.873_975_516_109_49),
        ((0.5, 0.25, 1.75, -50.0), 0.606_142_286_171_453_97),
        ((0.3, 1.3, 0.5, -10.0), 0.244_930_328_355_404_01),
        ((2.5, 1.5, 1.2, -0.7), 0.173_246_599_095_405_74),
        ((0.25, 0.25, 0.5, 0.999), 1.915_880_788_159_571_4),
    ];
    for ((a, b, c, z), want) in cases {
        let got = f21(a, b, c, z).unwrap();
        assert!(rel(got, want) < 1e-10, "F({a},{b},{c},{z}) = {got}, want {want}");
    }
    assert!(matches!(f21(1.0, 1.0, -2.0, 0.1), Err(Error::Pole(_))));
    assert!(f21(1.0, 1.0, 2.0, 1.0).is_err());
}

#[test]
fn pfaff_branch_matches_raw_series() {
    // F(a,b;c;z) = (1−z)^{−a} F(a, c−b; c; z/(z−1)), right side summed term by term.
    let (a, b, c, z) = (0.5, 0.25, 1.75, -3.0);
    let w: f64 = z / (z - 1.0);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..200 {
        let k = k as f64;
        term *= (a + k) * (c - b + k) / ((c + k) * (k + 1.0)) * w;
        sum += term;
    }
    let want = (1.0 - z).powf(-a) * sum;
    assert!(rel(f21(a, b, c, z).unwrap(), want) < 1e-10);
}

#[test]
fn hyp2f1_derivatives() {
    assert_eq!(hyp2f1_deriv(HypParams::new(0.0, 1.0, 2.0, 0.3)).unwrap(), 0.0);
    assert!(rel(hyp2f1_deriv(HypParams::new(1.0, 1.0, 2.0, 0.0)).unwrap(), 0.5) < 1e-15);
    let (a, b, c, z) = (0.5, 0.25, 1.75, 0.3);
    let h = 1e-6;
    let fd = (f21(a, b, c, z + h).unwrap() - f21(a, b, c, z - h).unwrap()) / (2.0 * h);
    assert!((hyp2f1_deriv(HypParams::new(a, b, c, z)).unwrap() - fd).abs() < 1e-7);
}

#[test]
fn regime_classification() {
    let r = z1_classify(0.5, 0.25, 1.75).unwrap();
    assert_eq!(r.tag, Z1Tag::Finite);
    assert!(rel(r.coefficient, 1.144_139_645_252_719_8) < 1e-12);
    let r = z1_classify(0.25, 0.25, 0.5).unwrap();
    assert_eq!(r.tag, Z1Tag::Logarithmic);
    let want = -gamma(0.5).unwrap() / gamma(0.25).unwrap().powi(2);
    assert!(rel(r.coefficient, want) < 1e-13);
    let r = z1_classify(1.0, 1.0, 1.5).unwrap();
    assert_eq!(r.tag, Z1Tag::PowerBlowup);
    assert!((r.exponent + 0.5).abs() < 1e-15);
}

#[test]
fn eta_limit_closed_form() {
    // η(1) = Γ(a−c+1)Γ(b−c+1)/(Γ(a+b−c+1)Γ(1−c)).
    let cases = [
        ((0.25, 0.25, 0.5), 0.847_213_084_793_979_09),
        ((1.0, 0.75, 0.5), 0.4),
        ((0.3, 0.4, 0.7), 0.646_167_261_348_396_67),
        ((0.6, 0.9, 0.3), 0.560_693_264_533_913_04),
    ];
    for ((a, b, c), want) in cases {
        let got = eta_limit(a, b, c).unwrap();
        assert!((got - want).abs() < 1e-8, "eta({a},{b},{c}) = {got}, want {want}");
        assert!((eta_limit(b, a, c).unwrap() - got).abs() < 1e-9);
    }
    assert!(matches!(eta_limit(0.1, 0.1, 0.5), Err(Error::Range(_))));
}

#[test]
fn bessel_values() {
    let (k, t) = bessel_k_profile(0.5, 1.0).unwrap();
    assert!(rel(k, 0.461_068_504_447_894_56) < 1e-10);
    assert!(rel(t, (-1.0f64).exp()) < 1e-10);
    for x in [0.01, 0.3, 2.0, 9.0, 40.0] {
        let (_, t) = bessel_k_profile(0.5, x).unwrap();
        assert!(rel(t, (-x).exp()) < 1e-10, "T({x})");
    }
    assert!(rel(bessel_k(0.3, 1e-6).unwrap(), 116.164_630_606_269_12) < 1e-10);
    assert!(rel(bessel_k(0.3, 2.5).unwrap(), 0.063_313_879_296_295_56) < 1e-10);
    assert!(rel(bessel_k(0.7, 0.01).unwrap(), 26.433_878_465_829_248) < 1e-10);
    // 1 − T(t) ~ c·t^{2ν}: at ν = 0.3 the gap is 2.4e-4 at t = 1e-6 and 3.8e-6 at t = 1e-9.
    let (_, t) = bessel_k_profile(0.3, 1e-6).unwrap();
    assert!(rel(1.0 - t, 2.396_927_678_710_58e-4) < 1e-8);
    let (_, t) = bessel_k_profile(0.3, 1e-9).unwrap();
    assert!((t - 1.0).abs() < 1e-5);
    assert_eq!(bessel_k(0.3, 800.0).unwrap(), 0.0);
}

proptest! {
    #[test]
    fn hyp2f1_symmetric(a in 0.1..2.0f64, b in 0.1..2.0f64, c in 0.2..4.0f64, z in -5.0..0.45f64) {
        let f = f21(a, b, c, z).unwrap();
        prop_assert!(rel(f21(b, a, c, z).unwrap(), f) <= 1e-12);
    }

    #[test]
    fn hyp2f1_derivative_matches_differences(a in 0.1..2.0f64, b in 0.1..2.0f64, c in 0.2..4.0f64, z in -5.0..0.45f64) {
        let central = |h: f64| (f21(a, b, c, z + h).unwrap() - f21(a, b, c, z - h).unwrap()) / (2.0 * h);
        let fd = (4.0 * central(5e-4) - central(1e-3)) / 3.0;
        let d = hyp2f1_deriv(HypParams::new(a, b, c, z)).unwrap();
        prop_assert!((d - fd).abs() <= 1e-6 * d.abs().max(1e-3), "{d} vs {fd}");
    }

    #[test]
    fn gamma_recurrence(x in -4.5..30.0f64) {
        prop_assume!(x > 0.0 || (x - x.round()).abs() > 0.01);
        prop_assert!(rel(gamma(x + 1.0).unwrap(), x * gamma(x).unwrap()) <= 1e-13);
    }

    #[test]
    fn digamma_recurrence(x in -4.5..30.0f64) {
        prop_assume!(x > 0.0 || (x - x.round()).abs() > 0.01);
        let (p, p1) = (digamma(x).unwrap(), digamma(x + 1.0).unwrap());
        prop_assert!((p1 - p - 1.0 / x).abs() <= 1e-13 * p.abs().max(1.0 / x.abs()).max(1.0));
    }

    #[test]
    fn pochhammer_recurrence(a in -5.0..5.0f64, k in 0u32..20) {
        let next = pochhammer(a, k + 1);
        let want = pochhammer(a, k) * (a + k as f64);
        prop_assert!((next - want).abs() <= 1e-13 * want.abs());
    }

    #[test]
    fn eta_limit_swap_and_closed_form(c in 0.1..0.9f64, a in 0.1..1.5f64, extra in 0.1..1.5f64) {
        let b = (c - a).max(0.0) + extra;
        let got = eta_limit(a, b, c).unwrap();
        prop_assert!((eta_limit(b, a, c).unwrap() - got).abs() <= 1e-7);
        let want = gamma(a - c + 1.0).unwrap() * gamma(b - c + 1.0).unwrap()
            / (gamma(a + b - c + 1.0).unwrap() * gamma(1.0 - c).unwrap());
        prop_assert!((got - want).abs() <= 1e-8, "{got} vs {want}");
    }
}
