use crate::constants::{self, omega_sphere, radial_prefactor, trace_sobolev, InequalityParams};
use crate::error::{Error, Result};
use crate::integrate::functionals::flat_moments;
use crate::integrate::quad::adaptive_gk;
use crate::integrate::{
    cone_functionals_with, Certificate, ConeDomain, Estimate, FieldHints, FunctionalOptions, QuadratureSpec, TestField,
};
use crate::specfun::ln_gamma;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_lr;
use std::f64::consts::PI;
use std::sync::Arc;

/// Half-width of the integration window in ln r around the profile scale.
const LOG_WINDOW: f64 = 60.0;
const LOG_PANEL: f64 = 1.0;
const TRANSPORT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogKind {
    /// Logarithmic Sobolev trace inequality.
    #[serde(rename = "LS")]
    Ls,
    /// Logarithmic Hardy trace inequality.
    #[serde(rename = "LH")]
    Lh,
}

type RadialFn = dyn Fn(f64) -> (f64, f64) + Send + Sync;

/// A function on ℝ₊ together with its derivative.
#[derive(Clone)]
pub struct RadialProfile {
    f: Arc<RadialFn>,
    /// Length scale where the profile lives; quadrature windows are centred on it.
    pub scale: f64,
}

impl std::fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialProfile").field("scale", &self.scale).finish_non_exhaustive()
    }
}

impl RadialProfile {
    /// `f` returns (v(r), v′(r)).
    pub fn new(scale: f64, f: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f), scale }
    }

    pub fn eval(&self, r: f64) -> (f64, f64) {
        (self.f)(r)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.eval(r).0
    }

    /// c·v.
    pub fn scaled(&self, c: f64) -> Self {
        let f = self.f.clone();
        Self::new(self.scale, move |r| {
            let (v, dv) = f(r);
            (c * v, c * dv)
        })
    }

    /// λ^{a/2} v(λr), which keeps ∫ v² r^{a−1} dr fixed.
    pub fn dilated(&self, a: f64, lambda: f64) -> Self {
        let f = self.f.clone();
        let c = lambda.powf(0.5 * a);
        Self::new(self.scale / lambda, move |r| {
            let (v, dv) = f(lambda * r);
            (c * v, c * lambda * dv)
        })
    }

    /// λ^{a/2}(2/Γ(a/2))^{1/2} exp(−λ²r²/2), the equality case on the half-line.
    pub fn gaussian(a: f64, lambda: f64) -> Result<Self> {
        if !(a >= 1.0 && lambda > 0.0) {
            return Err(Error::Range(format!("gaussian profile needs a >= 1 and lambda > 0, got {a}, {lambda}")));
        }
        let c = (0.5 * a * lambda.ln() + 0.5 * (2f64.ln() - ln_gamma(0.5 * a)?)).exp();
        let l2 = lambda * lambda;
        Ok(Self::new(1.0 / lambda, move |r| {
            let v = c * (-0.5 * l2 * r * r).exp();
            (v, -l2 * r * v)
        }))
    }

    /// Equality case of the half-line logarithmic Hardy inequality with weight exponent b = n/(1+a):
    /// (( b−2)²/(2π(b−1)))^{1/4} λ^{(b−2)/2} (λr)^{1−b/2} exp(−(b−2)²/(4(b−1)) ln²(λr)).
    pub fn log_gaussian(b: f64, lambda: f64) -> Result<Self> {
        if !(b > 2.0 && lambda > 0.0) {
            return Err(Error::Range(format!("log-gaussian profile needs b > 2 and lambda > 0, got {b}, {lambda}")));
        }
        let q = (b - 2.0).powi(2) / (4.0 * (b - 1.0));
        let c = ((b - 2.0).powi(2) / (2.0 * PI * (b - 1.0))).powf(0.25) * lambda.powf(0.5 * (b - 2.0));
        Ok(Self::new(1.0 / lambda, move |r| {
            let l = (lambda * r).ln();
            let v = c * (lambda * r).powf(1.0 - 0.5 * b) * (-q * l * l).exp();
            (v, v * ((1.0 - 0.5 * b) - 2.0 * q * l) / r)
        }))
    }
}

/// ∫_lo^hi f(r) dr over r = scale·e^x, in unit panels of x.
fn log_axis_integral(f: &dyn Fn(f64) -> f64, scale: f64, x_hi: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let g = |x: f64| {
        let r = scale * x.exp();
        let v = f(r) * r;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let rel = spec.rel_tol.min(1e-10);
    let mut lo = -LOG_WINDOW;
    let (mut value, mut error) = (0.0, 0.0);
    while lo < x_hi {
        let hi = (lo + LOG_PANEL).min(x_hi);
        let (v, e) = match adaptive_gk(&g, lo, hi, rel, 1e-3 * spec.abs_tol, spec.max_depth) {
            Ok(p) => p,
            Err(Error::DepthExhausted { value, error }) => (value, error),
            Err(e) => return Err(e),
        };
        value += v;
        error += e;
        lo = hi;
    }
    Ok((value, error))
}

fn halfline_integral(f: &dyn Fn(f64) -> f64, scale: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(log_axis_integral(f, scale, LOG_WINDOW, spec)?.0)
}

fn xlogx(m: f64) -> f64 {
    if m > 0.0 {
        m * m.ln()
    } else {
        0.0
    }
}

/// Terms of the half-line logarithmic Sobolev inequality for a profile normalized in L²(r^{a−1}dr).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalflineLogSob {
    /// (a/2) ln(K_a·energy) − entropy, nonnegative.
    pub deficit: f64,
    /// ∫ u² ln u² r^{a−1} dr.
    pub entropy: f64,
    /// ∫ u′² r^{a−1} dr.
    pub energy: f64,
}

/// ∫ u² r^{a−1} dr, failing when it is not a positive finite number.
fn mass(u: &RadialProfile, a: f64, spec: &QuadratureSpec) -> Result<f64> {
    let m = halfline_integral(&|r| u.value(r).powi(2) * r.powf(a - 1.0), u.scale, spec)?;
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::Normalization(format!("profile mass {m} is not positive and finite")));
    }
    Ok(m)
}

/// Rescales to unit mass unless already normalized to 1e−8.
fn normalized(u: &RadialProfile, a: f64, spec: &QuadratureSpec) -> Result<RadialProfile> {
    let m = mass(u, a, spec)?;
    Ok(if (m - 1.0).abs() <= 1e-8 { u.clone() } else { u.scaled(m.sqrt().recip()) })
}

/// Deficit, entropy and energy of the half-line logarithmic Sobolev inequality with exponent a ≥ 1.
pub fn logsob_halfline(u: &RadialProfile, a: f64, spec: &QuadratureSpec) -> Result<HalflineLogSob> {
    let k = constants::logsob_halfline(a)?;
    let u = normalized(u, a, spec)?;
    let entropy = halfline_integral(&|r| xlogx(u.value(r).powi(2)) * r.powf(a - 1.0), u.scale, spec)?;
    let energy = halfline_integral(&|r| u.eval(r).1.powi(2) * r.powf(a - 1.0), u.scale, spec)?;
    Ok(HalflineLogSob { deficit: 0.5 * a * (k * energy).ln() - entropy, entropy, energy })
}

/// Monotone T with ∫₀^r u² t^{a−1} dt = ∫₀^{T(r)} u₀² t^{a−1} dt, u₀ = c_a^{−1} e^{−t²/2}.
///
/// The right side is the regularized incomplete gamma P(a/2, T²); T is found by bisection.
pub fn transport_map(u: &RadialProfile, a: f64, r_grid: &[f64], spec: &QuadratureSpec) -> Result<Vec<f64>> {
    if !(a >= 1.0) {
        return Err(Error::Range(format!("transport map needs a >= 1, got {a}")));
    }
    let total = mass(u, a, spec)?;
    let g = |r: f64| u.value(r).powi(2) * r.powf(a - 1.0);
    r_grid
        .iter()
        .map(|&r| {
            if !(r > 0.0) {
                return if r == 0.0 { Ok(0.0) } else { Err(Error::Domain(format!("negative radius {r}"))) };
            }
            let x_hi = (r / u.scale).ln();
            let target = if x_hi <= -LOG_WINDOW { 0.0 } else { log_axis_integral(&g, u.scale, x_hi, spec)?.0 / total };
            invert_gaussian_mass(a, target)
        })
        .collect()
}

/// T with P(a/2, T²) = target.
fn invert_gaussian_mass(a: f64, target: f64) -> Result<f64> {
    if target <= 0.0 {
        return Ok(0.0);
    }
    let cdf = |t: f64| gamma_lr(0.5 * a, t * t);
    let mut hi = 1.0;
    while cdf(hi) < target {
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::Bracketing(format!("cumulative mass {target} cannot be matched")));
        }
    }
    let mut lo = 0.0;
    while hi - lo > TRANSPORT_TOL * hi.max(1e-3) {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// 2n/(1−s), the half-line exponent after r ↦ r^{2/(1−s)}.
pub fn halfline_exponent(n: usize, s: f64) -> f64 {
    2.0 * n as f64 / (1.0 - s)
}

/// The radial quotient whose supremum is C_{LS,r}(n, s) or C_{LH,r}(n, s).
///
/// `v` lives in the variable where the weight is r^{a−1}, a = 2n/(1−s); it is
/// rescaled to ∫ v² r^{a−1} = 1 (LS) or ∫ v² r^{a−3} = 1 (LH) first.
pub fn radial_log_quotients(v: &RadialProfile, n: usize, s: f64, kind: LogKind, spec: &QuadratureSpec) -> Result<f64> {
    let p = radial_prefactor(n, s)?;
    let a = halfline_exponent(n, s);
    let v = match kind {
        LogKind::Ls => normalized(v, a, spec)?,
        LogKind::Lh => normalized(v, a - 2.0, spec)?,
    };
    let entropy = match kind {
        LogKind::Ls => halfline_integral(&|r| xlogx(v.value(r).powi(2)) * r.powf(a - 1.0), v.scale, spec)?,
        LogKind::Lh => halfline_integral(
            &|r| {
                let w = v.value(r).powi(2);
                if w > 0.0 {
                    w * (w.ln() + (a - 2.0) * r.ln()) * r.powf(a - 3.0)
                } else {
                    0.0
                }
            },
            v.scale,
            spec,
        )?,
    };
    let energy = halfline_integral(&|r| v.eval(r).1.powi(2) * r.powf(a - 1.0), v.scale, spec)?;
    Ok(p * (2.0 / a * entropy).exp() / energy)
}

/// The logarithmic Sobolev extremal as displayed:
/// λ^{n/2}(Γ(n/(1−s))ω_{n−1}/(1−s))^{1/2} exp(−(λR)^{1−s}/2) as a function of R = |(x, t)|.
pub fn ls_extremal_display(n: usize, s: f64, lambda: f64) -> Result<RadialProfile> {
    InequalityParams::new(n, s, 0.0)?;
    let m = 1.0 - s;
    let nf = n as f64;
    let c = (0.5 * nf * lambda.ln() + 0.5 * (ln_gamma(nf / m)? + omega_sphere(n)?.ln() - m.ln())).exp();
    Ok(RadialProfile::new(1.0 / lambda, move |r| {
        let z = (lambda * r).powf(m);
        let v = c * (-0.5 * z).exp();
        (v, -0.5 * m * z / r * v)
    }))
}

/// The logarithmic Sobolev extremal with the amplitude that makes ∫ u(x, 0)² dx = 1.
pub fn ls_extremal(n: usize, s: f64, lambda: f64) -> Result<RadialProfile> {
    let m = 1.0 - s;
    let nf = n as f64;
    let shown = (ln_gamma(nf / m)? + omega_sphere(n)?.ln() - m.ln()).exp();
    Ok(ls_extremal_display(n, s, lambda)?.scaled(shown.recip()))
}

/// The logarithmic Hardy extremal
/// ((n−1+s)²/(2π(2n/(1−s)−1)ω_{n−1}²))^{1/4} λ^{(n−1+s)/2}|λR|^{−(n−1+s)/2} exp(−(n−1+s)²/(4(2n/(1−s)−1)) ln²|λR|).
pub fn lh_extremal(n: usize, s: f64, lambda: f64) -> Result<RadialProfile> {
    InequalityParams::new(n, s, 0.0)?;
    let g = n as f64 - 1.0 + s;
    let b1 = halfline_exponent(n, s) - 1.0;
    let w = omega_sphere(n)?;
    let c = (g * g / (2.0 * PI * b1 * w * w)).powf(0.25) * lambda.powf(0.5 * g);
    let q = g * g / (4.0 * b1);
    Ok(RadialProfile::new(1.0 / lambda, move |r| {
        let l = (lambda * r).ln();
        let v = c * (lambda * r).powf(-0.5 * g) * (-q * l * l).exp();
        (v, v * (-0.5 * g - 2.0 * q * l) / r)
    }))
}

/// v(ρ) = (2ω_{n−1}/(1−s))^{1/2} U(ρ^{2/(1−s)}): a radial function of R = |(x, t)| in the
/// half-line variable of [`radial_log_quotients`].
pub fn to_halfline_variable(u: &RadialProfile, n: usize, s: f64) -> Result<RadialProfile> {
    let m = 1.0 - s;
    let c = (2.0 * omega_sphere(n)? / m).sqrt();
    let e = 2.0 / m;
    let inner = u.clone();
    Ok(RadialProfile::new(u.scale.powf(1.0 / e), move |rho| {
        let big = rho.powf(e);
        let (v, dv) = inner.eval(big);
        (c * v, c * dv * e * big / rho)
    }))
}

/// A radial field U(|(x, t)|) on ℝ^n × ℝ₊, cut off beyond `radius`.
#[derive(Debug, Clone)]
pub struct RadialField {
    pub profile: RadialProfile,
    pub dim: usize,
    pub radius: f64,
}

impl RadialField {
    /// Support radius chosen where |U| drops below 1e−17 of its size near the scale.
    pub fn new(profile: RadialProfile, dim: usize) -> Self {
        let peak = (-8..=8).map(|k| profile.value(profile.scale * 2f64.powi(k)).abs()).fold(0.0, f64::max);
        let mut radius = profile.scale * 2.0;
        while profile.value(radius).abs() > 1e-17 * peak && radius < 1e12 * profile.scale {
            radius *= 1.25;
        }
        Self { profile, dim, radius }
    }

    fn breaks(&self) -> Vec<f64> {
        (-24..=8).map(|k| self.profile.scale * 2f64.powi(k)).filter(|&b| b < self.radius).collect()
    }
}

impl TestField for RadialField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        let r = crate::integrate::norm(x);
        if r > self.radius {
            return 0.0;
        }
        self.profile.value(r)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let r = crate::integrate::norm(x);
        if r > self.radius || r == 0.0 {
            return vec![0.0; x.len()];
        }
        let d = self.profile.eval(r).1;
        x.iter().map(|v| d * v / r).collect()
    }

    fn support_radius(&self) -> f64 {
        self.radius
    }

    fn hints(&self) -> FieldHints {
        FieldHints { radial_breaks: self.breaks(), ..Default::default() }
    }

    fn along(&self, base: &[f64], dir: &[f64], coords: &[f64]) -> Vec<(f64, f64)> {
        if base.iter().any(|&b| b != 0.0) {
            return coords
                .iter()
                .map(|&c| {
                    let x: Vec<f64> = base.iter().zip(dir).map(|(b, d)| b + c * d).collect();
                    let g = self.gradient(&x);
                    (self.value(&x), g.iter().map(|a| a * a).sum())
                })
                .collect();
        }
        let len = crate::integrate::norm(dir);
        coords
            .iter()
            .map(|&c| {
                let r = c.abs() * len;
                if r > self.radius {
                    return (0.0, 0.0);
                }
                let (v, d) = self.profile.eval(r);
                (v, d * d)
            })
            .collect()
    }
}

/// Checks entropy ≤ (n/(1−s)) ln(C_{n,s}·energy) for the trace of u on ℝ^n × ℝ₊ (points (x, t)).
///
/// The trace normalization is imposed by rescaling u; the energy is ∫|∇u|² t^s.
pub fn trace_log_checks<F: TestField + ?Sized>(
    u: &F,
    n: usize,
    s: f64,
    kind: LogKind,
    spec: &QuadratureSpec,
) -> Result<Certificate> {
    trace_log_checks_with(u, n, s, kind, spec, &FunctionalOptions::default())
}

pub fn trace_log_checks_with<F: TestField + ?Sized>(
    u: &F,
    n: usize,
    s: f64,
    kind: LogKind,
    spec: &QuadratureSpec,
    opts: &FunctionalOptions,
) -> Result<Certificate> {
    let params = InequalityParams::new(n, s, 0.0)?;
    if u.dim() != n + 1 {
        return Err(Error::Invalid(format!("field dimension {} does not match n + 1 = {}", u.dim(), n + 1)));
    }
    let c = trace_sobolev(n, s)?;
    let nf = n as f64;
    let [m, ent] = match kind {
        LogKind::Ls => flat_moments(u, nf - 1.0, spec, opts, |v, _| [v * v, xlogx(v * v)])?,
        LogKind::Lh => flat_moments(u, nf - 2.0 + s, spec, opts, |v, r| {
            let w = v * v;
            let e = if w > 0.0 { w * (w.ln() + (nf - 1.0 + s) * r.ln()) } else { 0.0 };
            [w * r.powf(s - 1.0), e * r.powf(s - 1.0)]
        })?,
    };
    if !(m.value.is_finite() && m.value > 0.0) {
        return Err(Error::Normalization(format!("trace mass {} is not positive and finite", m.value)));
    }
    let f = cone_functionals_with(u, &ConeDomain::half_space(n + 1), s, spec, opts)?;
    let e = f.energy;
    if !(e.value > 0.0) {
        return Err(Error::Normalization("energy vanishes".into()));
    }
    let k = nf / (1.0 - s);
    let mv = m.value;
    let rel_m = m.error / mv;
    let lhs = Estimate { value: k * (c * e.value / mv).ln(), error: k * (e.error / e.value + rel_m) };
    let entropy = Estimate {
        value: ent.value / mv - mv.ln(),
        error: ent.error / mv + ent.value.abs() / mv * rel_m + rel_m,
    };
    let tag = match kind {
        LogKind::Ls => "log_sobolev_trace",
        LogKind::Lh => "log_hardy_trace",
    };
    Ok(Certificate::new(tag, params, lhs, &[("entropy", 1.0, entropy)], f.confidence()))
}
