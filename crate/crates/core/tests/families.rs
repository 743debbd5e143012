use proptest::prelude::*;
use thl_core::constants::{clh_r, cls_r, h_cone, k_half, trace_sobolev, InequalityParams};
use thl_core::families::*;
use thl_core::integrate::*;
use thl_core::profiles::{build_cone_profile, cone_profile_eval};
use thl_core::Error;

fn spec() -> QuadratureSpec {
    QuadratureSpec { mc_samples: 20_000, ..Default::default() }
}

fn quarter() -> ConeDomain {
    ConeDomain::new(vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap()
}

fn fd_check<F: TestField>(u: &F, x: &[f64], tol: f64) {
    let g = u.gradient(x);
    let f = fd_gradient(u, x);
    let scale = g.iter().map(|v| v.abs()).fold(1.0, f64::max);
    for (a, b) in g.iter().zip(&f) {
        assert!((a - b).abs() <= tol * scale, "gradient {g:?} vs differences {f:?} at {x:?}");
    }
}

fn along_check<F: TestField>(u: &F, base: &[f64], dir: &[f64]) {
    let coords = [0.013, 0.3, 0.77, 1.21, 1.6, 2.5];
    for (&c, (v, g2)) in coords.iter().zip(u.along(base, dir, &coords)) {
        let x: Vec<f64> = base.iter().zip(dir).map(|(b, d)| b + c * d).collect();
        let g = u.gradient(&x);
        let want: f64 = g.iter().map(|a| a * a).sum();
        assert!((v - u.value(&x)).abs() <= 1e-12 * v.abs().max(1e-300));
        assert!((g2 - want).abs() <= 1e-9 * want.max(1e-300), "{g2} vs {want} at {x:?}");
    }
}

#[test]
fn cutoff_values() {
    let c = CutoffSpec::default();
    assert_eq!(bump_cutoff(&c, &[0.5, 0.0]), 1.0);
    assert_eq!(bump_cutoff(&c, &[3.0, 0.0, 0.0]), 0.0);
    let mid = bump_cutoff(&c, &[1.5]);
    assert!(mid > 0.0 && mid < 1.0);
    assert!((mid - 0.5).abs() < 1e-15);
    let mut prev = 1.0;
    for k in 0..=100 {
        let v = c.phi(1.0 + k as f64 / 100.0);
        assert!(v <= prev);
        prev = v;
    }
    for &r in &[1.1, 1.37, 1.5, 1.83, 1.97] {
        let fd = (c.phi(r + 1e-6) - c.phi(r - 1e-6)) / 2e-6;
        assert!((c.dphi(r) - fd).abs() < 1e-7);
    }
}

proptest! {
    #[test]
    fn cutoff_range(r in 0.0..4.0f64) {
        let c = CutoffSpec::default();
        let v = c.phi(r);
        prop_assert!((0.0..=1.0).contains(&v));
        if r <= 1.0 { prop_assert_eq!(v, 1.0); }
        if r >= 2.0 { prop_assert_eq!(v, 0.0); }
    }

    #[test]
    fn bump_field_lines_match_pointwise(
        i in 0usize..20,
        base in prop::collection::vec(-1.0..1.0f64, 3),
        dir in prop::collection::vec(-1.0..1.0f64, 3),
    ) {
        let u = &half_corpus(2, 20, 9, true)[i];
        let coords: Vec<f64> = (0..40).map(|k| -2.0 + 0.1 * k as f64).collect();
        for (&c, (v, g2)) in coords.iter().zip(u.along(&base, &dir, &coords)) {
            let x: Vec<f64> = base.iter().zip(&dir).map(|(b, d)| b + c * d).collect();
            let g = u.gradient(&x);
            let want: f64 = g.iter().map(|a| a * a).sum();
            prop_assert!((v - u.value(&x)).abs() <= 1e-12);
            prop_assert!((g2 - want).abs() <= 1e-10 * want.max(1.0));
        }
    }

    #[test]
    fn remainder_series_bounded(t in 1e-12..1.0f64, k in 1usize..8) {
        let (x, p) = xk_pk(k, t).unwrap();
        prop_assert!(x > 0.0 && x <= 1.0);
        prop_assert!(p > 0.0 && p <= x);
        prop_assert!(remainder_weight(t, k) <= k as f64);
    }
}

#[test]
fn spec_validation() {
    let p = InequalityParams::new(2, 0.0, 0.5).unwrap();
    let ok = ExtremizerSpec { tag: FamilyTag::HalfGeneric, params: p, eps: 0.1, delta: 0.0 };
    assert!(ok.validate().is_ok());
    assert!(matches!(ExtremizerSpec { eps: 0.3, ..ok }.validate(), Err(Error::Range(_))));
    assert!(matches!(ExtremizerSpec { eps: 0.0, ..ok }.validate(), Err(Error::Range(_))));
    let pc = InequalityParams::new(2, 0.0, 1.0).unwrap();
    let crit = ExtremizerSpec { tag: FamilyTag::HalfCritical, params: pc, eps: 0.1, delta: 0.2 };
    assert!(crit.validate().is_ok());
    assert!(ExtremizerSpec { delta: 1.5, ..crit }.validate().is_err());
    assert!(ExtremizerSpec { params: p, ..crit }.validate().is_err());
    assert!(ExtremizerSpec { params: pc, ..ok }.validate().is_err());
    let cone_tag = ExtremizerSpec { tag: FamilyTag::ConeTruncation, ..ok };
    assert!(matches!(half_extremizer(&cone_tag, CutoffSpec::default()), Err(Error::Invalid(_))));
}

#[test]
fn cone_extremizer_support_and_plateau() {
    let cone = quarter();
    let prm = InequalityParams::new(2, 0.5, 2.5).unwrap();
    let prof = build_cone_profile(prm).unwrap();
    let eps = 0.05;
    assert!(cone_extremizer(&prof, &cone, 0.3, CutoffSpec::default()).is_err());
    let u = cone_extremizer(&prof, &cone, eps, CutoffSpec::default()).unwrap();
    assert_eq!(u.support_radius(), 2.0 / eps);
    let dir = [0.3, 0.8, 0.52];
    let l = norm(&dir);
    for &r in &[0.5 * eps, 0.99 * eps, 2.01 / eps, 3.0 / eps] {
        let x: Vec<f64> = dir.iter().map(|d| d / l * r).collect();
        assert_eq!(u.value(&x), 0.0);
    }
    for &r in &[2.0 * eps, 0.5, 3.0, 1.0 / eps] {
        let x: Vec<f64> = dir.iter().map(|d| d / l * r).collect();
        let (phi, _) = cone_profile_eval(&prof, &x, &cone).unwrap();
        assert!((u.value(&x) - phi).abs() <= 1e-14 * phi.abs());
    }
    assert!(check_support(&u, 2000, 3).is_ok());
}

#[test]
fn cone_extremizer_gradients() {
    let cone = quarter();
    let prof = build_cone_profile(InequalityParams::new(2, 0.0, 2.0).unwrap()).unwrap();
    let u = cone_extremizer(&prof, &cone, 0.2, CutoffSpec::default()).unwrap();
    for x in [[0.1, 0.35, 0.2], [1.0, 2.0, 3.0], [-4.0, 1.5, 2.0], [0.3, 0.6, 0.25]] {
        fd_check(&u, &x, 1e-6);
    }
    along_check(&u, &[0.0; 3], &[0.2, 0.7, 0.4]);
    along_check(&u, &[0.1, 0.2, 0.3], &[0.5, 0.6, 0.7]);
}

#[test]
fn half_extremizer_fields() {
    let p = InequalityParams::new(2, 0.3, 0.6).unwrap();
    let sp = ExtremizerSpec { tag: FamilyTag::HalfGeneric, params: p, eps: 0.05, delta: 0.0 };
    let u = half_extremizer(&sp, CutoffSpec::default()).unwrap();
    for x in [[0.2, 0.5, 0.3], [1.3, 0.7, 2.0], [-0.4, 1.4, 0.07], [0.1, 0.05, 40.0]] {
        fd_check(&u, &x, 1e-6);
    }
    // Frozen below t = ε.
    assert_eq!(u.value(&[0.2, 0.5, 0.0]), u.value(&[0.2, 0.5, 0.05]));
    assert_eq!(u.gradient(&[0.2, 0.5, 0.01])[2], 0.0);
    along_check(&u, &[-2.0, 0.6, 0.4], &[1.0, 0.0, 0.0]);
    along_check(&u, &[0.1, 0.6, 0.4], &[0.3, 0.2, 0.1]);
    let crit = ExtremizerSpec {
        tag: FamilyTag::HalfCritical,
        params: InequalityParams::new(2, 0.0, 1.0).unwrap(),
        eps: 0.05,
        delta: 0.25,
    };
    let v = half_extremizer(&crit, CutoffSpec::default()).unwrap();
    assert!((v.gamma() - 0.25).abs() < 1e-14);
    for x in [[0.2, 0.5, 0.3], [1.3, 0.7, 2.0]] {
        fd_check(&v, &x, 1e-6);
    }
}

/// Traces grow like −ln ε and quotients decrease toward k(s, β).
#[test]
fn half_family_sequences() {
    let sp = spec();
    for &(s, b) in &[(0.0, 0.5), (-0.5, 0.5)] {
        let p = InequalityParams::new(2, s, b).unwrap();
        let k = k_half(s, b).unwrap();
        let mut q_prev = f64::INFINITY;
        let mut traces = vec![];
        for &eps in &[1e-1, 1e-2, 1e-3] {
            let e = ExtremizerSpec { tag: FamilyTag::HalfGeneric, params: p, eps, delta: 0.0 };
            let u = half_extremizer(&e, CutoffSpec::default()).unwrap();
            let f = halfspace_functionals(&u, s, HalfMode::XnWeight, &sp).unwrap();
            let q = quotient_of(&f, &Geometry::HalfSpace, b).unwrap();
            assert!(q > k && q < q_prev, "q = {q} at eps = {eps}");
            q_prev = q;
            traces.push(f.trace.value);
        }
        let (d1, d2) = (traces[1] - traces[0], traces[2] - traces[1]);
        assert!(d1 > 0.0 && (d2 / d1 - 1.0).abs() < 0.05, "trace increments {d1} {d2}");
    }
}

/// Trace ≥ c(−ln ε) and gradient excess ≤ C(1/δ + δ(−ln ε)) with stable fitted constants.
#[test]
fn critical_family_rates() {
    let sp = spec();
    let p = InequalityParams::new(2, 0.0, 1.0).unwrap();
    let k = k_half(0.0, 1.0).unwrap();
    for &delta in &[0.1, 0.3] {
        let mut slopes = vec![];
        let mut fits = vec![];
        for &eps in &[1e-1, 1e-2, 1e-3] {
            let e = ExtremizerSpec { tag: FamilyTag::HalfCritical, params: p, eps, delta };
            let u = half_extremizer(&e, CutoffSpec::default()).unwrap();
            let f = halfspace_functionals(&u, 0.0, HalfMode::XnWeight, &sp).unwrap();
            let l = -eps.ln();
            let excess = f.energy.value - 0.25 * f.hardy.value - k * f.trace.value;
            slopes.push(f.trace.value / l);
            fits.push(excess / (1.0 / delta + delta * l));
        }
        assert!(slopes.iter().all(|&c| c > 2.5 && c < 3.5), "{slopes:?}");
        assert!(fits.iter().all(|&c| c > 0.0 && c <= fits[0] * 1.0001), "{fits:?}");
    }
}

#[test]
fn cone_family_decreasing() {
    let sp = spec();
    let cone = ConeDomain::half_space(3);
    let prm = InequalityParams::new(2, 0.0, 2.0).unwrap();
    let prof = build_cone_profile(prm).unwrap();
    let mut prev = f64::INFINITY;
    for &eps in &[1e-1, 1e-2, 1e-3] {
        let u = cone_extremizer(&prof, &cone, eps, CutoffSpec::default()).unwrap();
        let q = rayleigh_quotient(&u, &Geometry::Cone(cone.clone()), &prm, &sp).unwrap();
        assert!(q > h_cone(2, 0.0, 2.0).unwrap() && q < prev);
        prev = q;
    }
}

#[test]
fn remainder_terms() {
    assert_eq!(xk_pk(1, 1.0).unwrap(), (1.0, 1.0));
    assert_eq!(xk_pk(4, 1.0).unwrap().1, 1.0);
    assert!((xk_pk(1, (-1f64).exp()).unwrap().0 - 0.5).abs() < 1e-15);
    assert!((xk_pk(2, (-1f64).exp()).unwrap().1 - 0.295308054574820624871903454662).abs() < 1e-15);
    let (x5, p5) = xk_pk(5, 0.3).unwrap();
    assert!((x5 - 0.72584984799761768835292552084185).abs() < 1e-15);
    assert!((p5 - 0.079686962723605414995544983464279).abs() < 1e-15);
    assert!(matches!(xk_pk(1, 1.5), Err(Error::Domain(_))));
    assert!(matches!(xk_pk(1, 0.0), Err(Error::Domain(_))));
    assert!(matches!(xk_pk(0, 0.5), Err(Error::Domain(_))));
}

#[test]
fn improved_remainder_bounds() {
    let sp = spec();
    let cone = quarter();
    let prm = InequalityParams::new(2, 0.0, 2.0).unwrap();
    let zero = FnField::new(3, 0.5, |_: &[f64]| 0.0);
    assert_eq!(improved_remainder(&zero, &cone, &prm, 1.0, 5, &sp).unwrap().value, 0.0);
    let corpus = cone_corpus(&cone, 10, 11, 1.0);
    assert!(matches!(
        improved_remainder(&corpus[0], &cone, &prm, 0.1, 5, &sp),
        Err(Error::SupportExceeds(_))
    ));
    for u in &corpus {
        let f = cone_functionals(u, &cone, &prm, &sp).unwrap();
        let r = improved_remainder(u, &cone, &prm, 1.0, 5, &sp).unwrap();
        assert!(r.value >= 0.0 && r.value <= 1.25 * f.hardy.value * (1.0 + 1e-9));
        let c = improved_certificate(u, &cone, &prm, 1.0, 5, &sp).unwrap();
        assert!(c.margin >= -1e-8, "{c:?}");
    }
}

#[test]
fn halfline_deficit() {
    let sp = spec();
    for &a in &[1.0, 2.5, 4.0, 12.0] {
        for &lambda in &[1.0, 2.0, 0.3] {
            let u = RadialProfile::gaussian(a, lambda).unwrap();
            let d = logsob_halfline(&u, a, &sp).unwrap();
            assert!(d.deficit.abs() <= 1e-8, "a={a} lambda={lambda}: {d:?}");
        }
        let g = RadialProfile::gaussian(a, 1.0).unwrap();
        let pert = RadialProfile::new(1.0, move |r| {
            let (v, dv) = g.eval(r);
            let m = 1.0 + 0.1 * r * (-r).exp();
            (v * m, dv * m + v * 0.1 * (1.0 - r) * (-r).exp())
        });
        assert!(logsob_halfline(&pert, a, &sp).unwrap().deficit > 1e-6);
        for u in radial_corpus(a, 12, 5) {
            assert!(logsob_halfline(&u, a, &sp).unwrap().deficit >= -1e-6);
        }
    }
    let zero = RadialProfile::new(1.0, |_| (0.0, 0.0));
    assert!(matches!(logsob_halfline(&zero, 2.0, &sp), Err(Error::Normalization(_))));
}

#[test]
fn transport() {
    let sp = spec();
    let a = 3.0;
    let grid: Vec<f64> = (1..=100).map(|k| 0.04 * k as f64).collect();
    let u0 = RadialProfile::gaussian(a, 1.0).unwrap();
    for (t, r) in transport_map(&u0, a, &grid, &sp).unwrap().iter().zip(&grid) {
        assert!((t - r).abs() < 1e-8);
    }
    let u = u0.dilated(a, 1.7);
    for (t, r) in transport_map(&u, a, &grid, &sp).unwrap().iter().zip(&grid) {
        // T is recovered from a cumulative mass, so its error scales with 1/density in the tail.
        let x = 1.7 * r;
        let density = 2.0 / 0.886226925452758 * x * x * (-x * x).exp();
        let tol = 1e-8 + 1e-14 / density;
        assert!((t - 1.7 * r).abs() < tol, "{t} vs {}", 1.7 * r);
    }
    let w = &radial_corpus(a, 4, 9)[2];
    let tw = transport_map(w, a, &grid, &sp).unwrap();
    assert!(tw.windows(2).all(|p| p[1] > p[0]));
    // ∫₀^r w² t^{a−1} = ∫₀^{T(r)} u₀² t^{a−1} on every checkpoint.
    let mass = |f: &dyn Fn(f64) -> f64, hi: f64| quad1d_singular(f, 0.0, hi, a - 1.0, 0.0, &sp).unwrap().0;
    let wf = |t: f64| w.value(t).powi(2) * t.powf(a - 1.0);
    let total = mass(&wf, 60.0);
    let gf = |t: f64| u0.value(t).powi(2) * t.powf(a - 1.0);
    for (&r, &t) in grid.iter().zip(&tw) {
        assert!((mass(&wf, r) / total - mass(&gf, t)).abs() < 1e-9);
    }
}

#[test]
fn radial_constants() {
    let sp = spec();
    for &(n, s) in &[(2usize, 0.0), (3, 0.0), (3, 0.5)] {
        let a = halfline_exponent(n, s);
        for &lambda in &[1.0, 2.3] {
            let v = to_halfline_variable(&ls_extremal(n, s, lambda).unwrap(), n, s).unwrap();
            let q = radial_log_quotients(&v, n, s, LogKind::Ls, &sp).unwrap();
            assert!((q - cls_r(n, s).unwrap()).abs() < 1e-6 * cls_r(n, s).unwrap());
            let v = to_halfline_variable(&lh_extremal(n, s, lambda).unwrap(), n, s).unwrap();
            let q = radial_log_quotients(&v, n, s, LogKind::Lh, &sp).unwrap();
            assert!((q - clh_r(n, s).unwrap()).abs() < 1e-6 * clh_r(n, s).unwrap());
        }
        // The displayed amplitude differs from the normalized one; rescaling absorbs it.
        let shown = to_halfline_variable(&ls_extremal_display(n, s, 1.0).unwrap(), n, s).unwrap();
        let q = radial_log_quotients(&shown, n, s, LogKind::Ls, &sp).unwrap();
        assert!((q - cls_r(n, s).unwrap()).abs() < 1e-6 * cls_r(n, s).unwrap());
        for v in radial_corpus(a, 12, 21) {
            assert!(radial_log_quotients(&v, n, s, LogKind::Ls, &sp).unwrap() <= cls_r(n, s).unwrap() + 1e-6);
            assert!(radial_log_quotients(&v, n, s, LogKind::Lh, &sp).unwrap() <= clh_r(n, s).unwrap() + 1e-6);
        }
    }
}

#[test]
fn trace_log_certificates() {
    let sp = spec();
    let (n, s) = (2, 0.0);
    let u = RadialField::new(ls_extremal(n, s, 1.0).unwrap(), n + 1);
    let c = trace_log_checks(&u, n, s, LogKind::Ls, &sp).unwrap();
    let gap = 2.0 * (trace_sobolev(n, s).unwrap() / cls_r(n, s).unwrap()).ln();
    assert!(c.margin >= 0.0 && (c.margin - gap).abs() < 1e-8, "{c:?}");
    let u = RadialField::new(lh_extremal(n, s, 1.0).unwrap(), n + 1);
    let c = trace_log_checks(&u, n, s, LogKind::Lh, &sp).unwrap();
    let gap = 2.0 * (trace_sobolev(n, s).unwrap() / clh_r(n, s).unwrap()).ln();
    assert!(c.margin >= 0.0 && (c.margin - gap).abs() < 1e-8, "{c:?}");
    for u in flat_corpus(n, 20, 4) {
        for kind in [LogKind::Ls, LogKind::Lh] {
            let c = trace_log_checks(&u, n, s, kind, &sp).unwrap();
            assert!(c.passes(), "{c:?}");
        }
    }
    let zero = FnField::new(3, 1.0, |_: &[f64]| 0.0);
    assert!(matches!(trace_log_checks(&zero, n, s, LogKind::Ls, &sp), Err(Error::Normalization(_))));
}

#[test]
fn whole_line() {
    let sp = spec();
    assert!((whole_line_constant() - 0.456946581044463625374966622548).abs() < 1e-14);
    for u in half_corpus(2, 10, 8, true) {
        let c = whole_line_certificate(&u, &sp).unwrap();
        assert!(c.passes() && c.rhs_terms[1].1 > 0.0, "{c:?}");
    }
}

#[test]
fn corpora_are_deterministic() {
    let cone = quarter();
    assert_eq!(cone_corpus(&cone, 5, 1, 1.0), cone_corpus(&cone, 5, 1, 1.0));
    assert_ne!(cone_corpus(&cone, 5, 1, 1.0), cone_corpus(&cone, 5, 2, 1.0));
    for u in cone_corpus(&cone, 20, 3, 1.0) {
        assert!(u.support_radius() <= 1.0);
        assert!(u.bumps.iter().all(|b| cone.contains(&b.center) || norm(&b.center) == 0.0));
    }
    for u in half_corpus(3, 20, 3, false) {
        assert!(u.bumps.iter().all(|b| b.center[2] - b.width > 0.0 && b.center[3].abs() < b.width));
    }
}
