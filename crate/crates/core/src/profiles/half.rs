use super::cone::{flux_exponents, ProfileValue};
use crate::constants::k_half;
use crate::error::{Error, Result};
use crate::integrate::quad::{quad1d_singular, QuadratureSpec};
use crate::specfun::{digamma, extrapolate, gamma, hyp2f1, hyp2f1_deriv, hyp2f1_deriv2, rgamma, HypParams};
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

/// Below this threshold β² + s(s+2) is treated as zero.
const DEGENERATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HalfCase {
    Generic,
    Critical,
    Degenerate,
}

/// ω(y) = F(a₁,b₁;c₁;−y²) − K y^{1−s} F(a₂,b₂;c₂;−y²), solution of
/// (y²+1)ω″ + ((s+2)y + s/y)ω′ + ((s(s+2)+β²)/4)ω = 0 with ω(0) = 1, ω(∞) = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfProfile {
    pub s: f64,
    pub beta: f64,
    pub case_tag: HalfCase,
    /// r = √(1−β²), forced to 1+s in the degenerate case.
    pub r: f64,
    #[serde(rename = "K")]
    pub k_coef: f64,
    /// k(s, β) = (1−s)K.
    pub k: f64,
    /// (1+s+r)/2.
    pub decay_exponent: f64,
    /// Amplitude of y^{−q} F(a₁, a₂; 1+r/2; −1/y²) at infinity.
    pub tail_coef: f64,
    pub first: (f64, f64, f64),
    pub second: (f64, f64, f64),
}

impl HalfProfile {
    /// (s(s+2)+β²)/4.
    pub fn c(&self) -> f64 {
        0.25 * (self.s * (self.s + 2.0) + self.beta * self.beta)
    }

    /// C = −(1−s)K; equals −2/(Γ((1−s)/2)Γ((1+s)/2)) in the degenerate case.
    pub fn degenerate_c(&self) -> f64 {
        -(1.0 - self.s) * self.k_coef
    }

    fn near(&self, y: f64, with_d2: bool) -> Result<ProfileValue> {
        let (a1, b1, c1) = self.first;
        let (a2, b2, c2) = self.second;
        let x = -y * y;
        let f1 = hyp2f1(HypParams::new(a1, b1, c1, x))?;
        let df1 = hyp2f1_deriv(HypParams::new(a1, b1, c1, x))?;
        let d2f1 = if with_d2 { hyp2f1_deriv2(HypParams::new(a1, b1, c1, x))? } else { f64::NAN };
        if y == 0.0 {
            let dw = match self.s {
                s if s > 0.0 => f64::NEG_INFINITY,
                s if s == 0.0 => -self.k_coef,
                _ => 0.0,
            };
            return Ok(ProfileValue { w: f1, dw, d2w: f64::NAN });
        }
        let f2 = hyp2f1(HypParams::new(a2, b2, c2, x))?;
        let df2 = hyp2f1_deriv(HypParams::new(a2, b2, c2, x))?;
        let d2f2 = if with_d2 { hyp2f1_deriv2(HypParams::new(a2, b2, c2, x))? } else { f64::NAN };
        let p = 1.0 - self.s;
        let yp = y.powf(p);
        let k = self.k_coef;
        let w = f1 - k * yp * f2;
        let dw = -2.0 * y * df1 - k * (p * yp / y * f2 - 2.0 * yp * y * df2);
        let t1 = -2.0 * df1 + 4.0 * y * y * d2f1;
        let t2 = p * (p - 1.0) * yp / (y * y) * f2 - 2.0 * (2.0 * p + 1.0) * yp * df2 + 4.0 * yp * y * y * d2f2;
        Ok(ProfileValue { w, dw, d2w: t1 - k * t2 })
    }

    fn far(&self, y: f64, with_d2: bool) -> Result<ProfileValue> {
        let q = self.decay_exponent;
        let (a, b, c) = (self.first.0, self.second.0, 1.0 + 0.5 * self.r);
        let x = -1.0 / (y * y);
        let g = hyp2f1(HypParams::new(a, b, c, x))?;
        let dg = hyp2f1_deriv(HypParams::new(a, b, c, x))?;
        let d2g = if with_d2 { hyp2f1_deriv2(HypParams::new(a, b, c, x))? } else { f64::NAN };
        let yq = y.powf(-q);
        let y2 = y * y;
        let d = self.tail_coef;
        let w = yq * g;
        let dw = -q * yq / y * g + 2.0 * yq / (y2 * y) * dg;
        let d2w = q * (q + 1.0) * yq / y2 * g - 2.0 * (2.0 * q + 3.0) * yq / (y2 * y2) * dg + 4.0 * yq / (y2 * y2 * y2) * d2g;
        Ok(ProfileValue { w: d * w, dw: d * dw, d2w: d * d2w })
    }

    /// ω, ω′, ω″ at y ≥ 0.
    pub fn eval_full(&self, y: f64) -> Result<ProfileValue> {
        self.eval_with(y, true)
    }

    /// ω and ω′ only.
    pub fn value_slope(&self, y: f64) -> Result<(f64, f64)> {
        self.eval_with(y, false).map(|v| (v.w, v.dw))
    }

    fn eval_with(&self, y: f64, with_d2: bool) -> Result<ProfileValue> {
        if !(y >= 0.0) || y.is_infinite() {
            return Err(Error::Domain(format!("half-space profile needs y >= 0, got {y}")));
        }
        if y <= SQRT_2 {
            self.near(y, with_d2)
        } else {
            self.far(y, with_d2)
        }
    }

    pub fn omega(&self, y: f64) -> Result<f64> {
        self.value_slope(y).map(|v| v.0)
    }

    pub fn omega_prime(&self, y: f64) -> Result<f64> {
        self.value_slope(y).map(|v| v.1)
    }

    /// φ(x_n, t) = x_n^{−s/2} ω(t/x_n).
    pub fn phi(&self, xn: f64, t: f64) -> Result<f64> {
        if !(xn > 0.0) {
            return Err(Error::Domain(format!("phi needs x_n > 0, got {xn}")));
        }
        Ok(xn.powf(-0.5 * self.s) * self.omega(t / xn)?)
    }
}

/// Builds the half-space profile for s ∈ (−1,1), β ∈ [0,1].
pub fn build_half_profile(s: f64, beta: f64) -> Result<HalfProfile> {
    if !(s > -1.0 && s < 1.0) {
        return Err(Error::Range(format!("s in (-1, 1) required, got {s}")));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::Range(format!("half-space profile needs 0 <= beta <= 1, got {beta}")));
    }
    let (case_tag, r) = if (beta * beta + s * (s + 2.0)).abs() < DEGENERATE_TOL {
        (HalfCase::Degenerate, 1.0 + s)
    } else if beta == 1.0 {
        (HalfCase::Critical, 0.0)
    } else {
        (HalfCase::Generic, (1.0 - beta * beta).sqrt())
    };
    let first = ((1.0 + s + r) / 4.0, (1.0 + s - r) / 4.0, 0.5 * (1.0 + s));
    let second = ((3.0 - s + r) / 4.0, (3.0 - s - r) / 4.0, 0.5 * (3.0 - s));
    let (a1, b1, c1) = first;
    let (a2, b2, c2) = second;
    let g_c1 = gamma(c1)?;
    let k_coef = g_c1 * gamma(a2)?.powi(2) * rgamma(c2) * rgamma(a1).powi(2);
    let tail_coef = if case_tag == HalfCase::Critical {
        2.0 * g_c1 * rgamma(a1).powi(2) * (digamma(a2)? - digamma(a1)?)
    } else {
        let bracket = rgamma(b1).powi(2) - (gamma(a2)? * rgamma(a1) * rgamma(b2)).powi(2);
        g_c1 * gamma(-0.5 * r)? * bracket
    };
    Ok(HalfProfile {
        s,
        beta,
        case_tag,
        r,
        k_coef,
        k: (1.0 - s) * k_coef,
        decay_exponent: 0.5 * (1.0 + s + r),
        tail_coef,
        first,
        second,
    })
}

/// (ω, ω′, φ(x_n, t)).
pub fn half_profile_eval(p: &HalfProfile, y: f64, xn: f64, t: f64) -> Result<(f64, f64, f64)> {
    let v = p.eval_full(y)?;
    Ok((v.w, v.dw, p.phi(xn, t)?))
}

/// max |(y²+1)ω″ + ((s+2)y + s/y)ω′ + cω| over the grid.
pub fn half_ode_residual(p: &HalfProfile, y_grid: &[f64]) -> Result<f64> {
    let s = p.s;
    let c = p.c();
    let mut worst = 0.0f64;
    for &y in y_grid {
        if !(y > 0.0) || !y.is_finite() {
            return Err(Error::Domain(format!("residual grid point {y} outside (0, inf)")));
        }
        let v = p.eval_full(y)?;
        let r = (y * y + 1.0) * v.d2w + ((s + 2.0) * y + s / y) * v.dw + c * v.w;
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// Numerically integrated profile on [y₀, Y] in the variable x = ln y.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotProfile {
    pub s: f64,
    pub beta: f64,
    /// Coefficient of y^{1−s}/(1−s) in the small-y data; tends to −k(s, β).
    pub kappa: f64,
    pub y0: f64,
    pub y_max: f64,
    x0: f64,
    h: f64,
    w: Vec<f64>,
    dw: Vec<f64>,
}

impl ShotProfile {
    /// ω(y) by cubic Hermite interpolation in ln y.
    pub fn omega(&self, y: f64) -> Result<f64> {
        if !(y >= self.y0 && y <= self.y_max) {
            return Err(Error::Domain(format!("shot profile covers [{}, {}], got {y}", self.y0, self.y_max)));
        }
        let u = (y.ln() - self.x0) / self.h;
        let i = (u.floor() as usize).min(self.w.len() - 2);
        let t = u - i as f64;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * t) * (1.0 - t).powi(2),
            t * (1.0 - t).powi(2),
            t * t * (3.0 - 2.0 * t),
            t * t * (t - 1.0),
        );
        Ok(h00 * self.w[i] + h10 * self.h * self.dw[i] + h01 * self.w[i + 1] + h11 * self.h * self.dw[i + 1])
    }

    /// ω′(y) at a grid-interpolated point.
    pub fn omega_prime(&self, y: f64) -> Result<f64> {
        let e = 1e-6 * y;
        Ok((self.omega(y + e)? - self.omega(y - e)?) / (2.0 * e))
    }
}

/// Frobenius solution y^μ Σ a_j y^{2j} with a₀ = 1 and its y-derivative times y.
fn frobenius(mu: f64, s: f64, c: f64, y: f64) -> (f64, f64) {
    let y2 = y * y;
    let mut a = 1.0;
    let mut yp = y.powf(mu);
    let (mut w, mut dw) = (0.0, 0.0);
    for j in 0..200 {
        let m = mu + 2.0 * j as f64;
        w += a * yp;
        dw += m * a * yp;
        a *= -(m * (m + 1.0 + s) + c) / ((m + 2.0) * (m + 1.0 + s));
        yp *= y2;
        if (a * yp).abs() < 1e-18 * w.abs() {
            break;
        }
    }
    (w, dw)
}

fn rk4_path(s: f64, c: f64, x0: f64, h: f64, steps: usize, w0: f64, d0: f64) -> (Vec<f64>, Vec<f64>) {
    // (y²+1) D²ω + ((s+1)y² + s − 1) Dω + c y² ω = 0, D = d/dx.
    let rhs = |x: f64, w: f64, d: f64| {
        let y2 = (2.0 * x).exp();
        (d, -(((s + 1.0) * y2 + s - 1.0) * d + c * y2 * w) / (y2 + 1.0))
    };
    let mut ws = Vec::with_capacity(steps + 1);
    let mut ds = Vec::with_capacity(steps + 1);
    let (mut w, mut d) = (w0, d0);
    ws.push(w);
    ds.push(d);
    for i in 0..steps {
        let x = x0 + i as f64 * h;
        let (k1w, k1d) = rhs(x, w, d);
        let (k2w, k2d) = rhs(x + 0.5 * h, w + 0.5 * h * k1w, d + 0.5 * h * k1d);
        let (k3w, k3d) = rhs(x + 0.5 * h, w + 0.5 * h * k2w, d + 0.5 * h * k2d);
        let (k4w, k4d) = rhs(x + h, w + h * k3w, d + h * k3d);
        w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        d += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        ws.push(w);
        ds.push(d);
    }
    (ws, ds)
}

/// Integrates the equation from y₀ = 10⁻⁴ to Y = 10³ with data 1 + κ y^{1−s}/(1−s)
/// and bisects κ on the decay condition yω′ + ((1+s+√(1−β²))/2)ω = 0 at Y.
pub fn shoot_half_ode(s: f64, beta: f64) -> Result<ShotProfile> {
    if !(s > -1.0 && s < 1.0) || !(0.0..=1.0).contains(&beta) {
        return Err(Error::Range(format!("shooting needs s in (-1, 1), beta in [0, 1], got ({s}, {beta})")));
    }
    let (y0, y_max) = (1e-4f64, 1e3f64);
    let steps = 16_000;
    let x0 = y0.ln();
    let h = (y_max.ln() - x0) / steps as f64;
    let c = 0.25 * (s * (s + 2.0) + beta * beta);
    let q = 0.5 * (1.0 + s + (1.0 - beta * beta).sqrt());
    let (rw, rd) = frobenius(0.0, s, c, y0);
    let (sw, sd) = frobenius(1.0 - s, s, c, y0);
    let (sw, sd) = (sw / (1.0 - s), sd / (1.0 - s));
    let (regular, regular_d) = rk4_path(s, c, x0, h, steps, rw, rd);
    let (second, second_d) = rk4_path(s, c, x0, h, steps, sw, sd);
    // Logarithmic derivative of the decaying solution at Y to first order in Y^{−2}.
    let (a, b, cc) = (0.5 * q, 0.5 * q + 0.5 * (1.0 - s), 1.0 + q - 0.5 * (1.0 + s));
    let rate = -q + 2.0 * a * b / (cc * y_max * y_max);
    let robin = |kappa: f64| {
        let w = regular[steps] + kappa * second[steps];
        let d = regular_d[steps] + kappa * second_d[steps];
        d - rate * w
    };
    let (mut lo, mut hi) = (-20.0f64, 0.0f64);
    let (mut flo, fhi) = (robin(lo), robin(hi));
    if !(flo * fhi < 0.0) {
        return Err(Error::Bracketing(format!("decay condition does not change sign on [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = robin(mid);
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    let kappa = 0.5 * (lo + hi);
    let w = regular.iter().zip(&second).map(|(a, b)| a + kappa * b).collect();
    let dw = regular_d.iter().zip(&second_d).map(|(a, b)| a + kappa * b).collect();
    Ok(ShotProfile { s, beta, kappa, y0, y_max, x0, h, w, dw })
}

/// Outcome of the property checks on a half-space profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfPropertyReport {
    pub k: f64,
    /// Extrapolated lim_{y→0} y^s ω′(y).
    pub flux_limit: f64,
    /// Extrapolated lim_{y→∞} yω′/ω.
    pub ratio_limit: f64,
    pub decay_exponent: f64,
    /// min and max of ω(y)(1+y²)^{q/2} on [0, 10³].
    pub bound_ratio: (f64, f64),
    pub energy: f64,
    /// lim_{y→∞} −y^s(1+y²)ωω′, nonzero only when β = 1.
    pub boundary_term: f64,
    /// Whether yω′ + (s/2)ω ≤ 0 on the scan grid; None for s > 0.
    pub monotone_weighted: Option<bool>,
}

/// Richardson limit of y^s ω′(y) as y → 0⁺.
pub fn half_boundary_flux_limit(p: &HalfProfile) -> Result<f64> {
    let s = p.s;
    let samples: Vec<f64> = (0..12)
        .map(|k| {
            let y = 0.1 * 0.5f64.powi(k);
            p.omega_prime(y).map(|dw| y.powf(s) * dw)
        })
        .collect::<Result<_>>()?;
    let ex = extrapolate(&samples, 0.5, &flux_exponents(s, 8));
    if !(ex.error <= 1e-8 * ex.value.abs().max(1e-300)) {
        return Err(Error::NoConvergence(format!("flux extrapolation unstable (error {:e})", ex.error)));
    }
    Ok(ex.value)
}

fn ratio_limit(p: &HalfProfile) -> Result<f64> {
    let samples: Vec<f64> = (0..8)
        .map(|k| {
            let y = 10.0 * 2f64.powi(k);
            let v = p.eval_full(y)?;
            Ok(y * v.dw / v.w)
        })
        .collect::<Result<_>>()?;
    let exps: Vec<f64> = (1..samples.len()).map(|j| j as f64).collect();
    Ok(extrapolate(&samples, 0.25, &exps).value)
}

/// ∫₀^∞ y^s(1+y²)ω′² − c ∫₀^∞ y^s ω².
pub fn half_energy(p: &HalfProfile) -> Result<f64> {
    let s = p.s;
    let c = p.c();
    let f = |y: f64| match p.eval_full(y) {
        Ok(v) => y.powf(s) * ((1.0 + y * y) * v.dw * v.dw - c * v.w * v.w),
        Err(_) => f64::NAN,
    };
    let right = if p.r > 0.0 { p.r - 1.0 } else { 1.0 };
    let spec = QuadratureSpec { rel_tol: 1e-11, abs_tol: 1e-13, ..QuadratureSpec::default() };
    quad1d_singular(&f, 0.0, f64::INFINITY, s.min(-s), right, &spec).map(|(v, _)| v)
}

/// lim_{y→∞} −y^s(1+y²)ω(y)ω′(y) = qD² y^{−r}; survives only for r = 0.
pub fn half_boundary_term(p: &HalfProfile) -> f64 {
    if p.r == 0.0 {
        p.decay_exponent * p.tail_coef * p.tail_coef
    } else {
        0.0
    }
}

/// Checks the boundary flux, the decay rate, the two-sided bounds, the
/// energy identity and, for s ≤ 0, the sign of yω′ + (s/2)ω.
pub fn half_property_suite(p: &HalfProfile) -> Result<HalfPropertyReport> {
    let k = k_half(p.s, p.beta)?;
    let flux = half_boundary_flux_limit(p)?;
    if (flux + k).abs() > 1e-6 * k {
        return Err(Error::PropertyViolation(format!("(i) boundary flux {flux} differs from -k = {}", -k)));
    }
    let q = p.decay_exponent;
    let ratio = ratio_limit(p)?;
    if (ratio + q).abs() > 1e-4 {
        return Err(Error::PropertyViolation(format!("(ii) decay ratio {ratio} differs from -{q}")));
    }
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let grid = 10_000;
    for i in 0..=grid {
        let y = 1e3 * (i as f64 / grid as f64).powi(2);
        let b = p.omega(y)? * (1.0 + y * y).powf(0.5 * q);
        lo = lo.min(b);
        hi = hi.max(b);
    }
    if !(lo > 0.0 && hi.is_finite()) {
        return Err(Error::PropertyViolation(format!("(ii) two-sided bound ratio range [{lo}, {hi}]")));
    }
    let energy = half_energy(p)?;
    let boundary_term = half_boundary_term(p);
    if (energy + boundary_term - k).abs() > 1e-6 * k {
        return Err(Error::PropertyViolation(format!(
            "(iii) energy {energy} plus boundary term {boundary_term} differs from k = {k}"
        )));
    }
    let monotone_weighted = if p.s <= 0.0 {
        let mut ok = true;
        for i in 1..=grid {
            let y = 1e3 * (i as f64 / grid as f64).powi(2);
            let v = p.eval_full(y)?;
            if y * v.dw + 0.5 * p.s * v.w > 1e-14 * v.w.abs() {
                ok = false;
                break;
            }
        }
        if !ok {
            return Err(Error::PropertyViolation("(iv) y w' + (s/2) w <= 0 fails".into()));
        }
        Some(true)
    } else {
        None
    };
    Ok(HalfPropertyReport {
        k,
        flux_limit: flux,
        ratio_limit: ratio,
        decay_exponent: q,
        bound_ratio: (lo, hi),
        energy,
        boundary_term,
        monotone_weighted,
    })
}
