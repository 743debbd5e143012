use super::cutoff::CutoffSpec;
use crate::constants::InequalityParams;
use crate::error::{Error, Result};
use crate::integrate::field::{FieldHints, TestField};
use crate::integrate::geometry::{jitter_tie, norm, ConeDomain};
use crate::profiles::{build_half_profile, cone_profile_eval, ConeProfile, HalfProfile};
use serde::{Deserialize, Serialize};

/// Beyond this height in t the half-space family is integrated through its power tail.
const T_TAIL_START: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    ConeTruncation,
    HalfGeneric,
    HalfCritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremizerSpec {
    pub tag: FamilyTag,
    pub params: InequalityParams,
    pub eps: f64,
    /// Exponent shift of the critical family; ignored otherwise.
    pub delta: f64,
}

impl ExtremizerSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 0.25) {
            return Err(Error::Range(format!("eps must lie in (0, 1/4), got {}", self.eps)));
        }
        match self.tag {
            FamilyTag::HalfCritical if !(self.delta > 0.0 && self.delta < 1.0) => {
                Err(Error::Range(format!("delta must lie in (0, 1), got {}", self.delta)))
            }
            FamilyTag::HalfCritical if self.params.beta != 1.0 => {
                Err(Error::Invalid(format!("the critical family needs beta = 1, got {}", self.params.beta)))
            }
            FamilyTag::HalfGeneric if !(self.params.beta >= 0.0 && self.params.beta < 1.0) => {
                Err(Error::Invalid(format!("the generic family needs 0 <= beta < 1, got {}", self.params.beta)))
            }
            _ => Ok(()),
        }
    }
}

/// φ(x)(1 − Φ(|x|/ε))Φ(ε|x|) for the cone profile φ.
#[derive(Debug, Clone)]
pub struct ConeExtremizer {
    pub profile: ConeProfile,
    pub cone: ConeDomain,
    pub eps: f64,
    pub cut: CutoffSpec,
}

/// Truncated cone profile; requires 0 < ε < 1/4.
pub fn cone_extremizer(p: &ConeProfile, cone: &ConeDomain, eps: f64, cutoffs: CutoffSpec) -> Result<ConeExtremizer> {
    if !(eps > 0.0 && eps < 0.25) {
        return Err(Error::Range(format!("eps must lie in (0, 1/4), got {eps}")));
    }
    if cone.dim() != p.params.n + 1 {
        return Err(Error::Invalid(format!("cone dimension {} does not match n + 1 = {}", cone.dim(), p.params.n + 1)));
    }
    Ok(ConeExtremizer { profile: p.clone(), cone: cone.clone(), eps, cut: cutoffs })
}

impl ConeExtremizer {
    /// Radial factor and its derivative.
    fn rho(&self, r: f64) -> (f64, f64) {
        let e = self.eps;
        let (a, da) = (1.0 - self.cut.phi(r / e), -self.cut.dphi(r / e) / e);
        let (b, db) = (self.cut.phi(e * r), self.cut.dphi(e * r) * e);
        (a * b, da * b + a * db)
    }

    /// Profile value and gradient, zero outside the cone.
    fn profile_at(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let y = jitter_tie(&self.cone, x);
        match cone_profile_eval(&self.profile, &y, &self.cone) {
            Ok(v) => v,
            Err(_) => (0.0, vec![0.0; x.len()]),
        }
    }

    fn eval(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let r = norm(x);
        let (rho, drho) = self.rho(r);
        if rho == 0.0 && drho == 0.0 {
            return (0.0, vec![0.0; x.len()]);
        }
        let (phi, grad) = self.profile_at(x);
        let g = grad.iter().zip(x).map(|(gi, xi)| rho * gi + phi * drho * xi / r).collect();
        (phi * rho, g)
    }
}

impl TestField for ConeExtremizer {
    fn dim(&self) -> usize {
        self.cone.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x).0
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.eval(x).1
    }

    fn support_radius(&self) -> f64 {
        self.cut.outer / self.eps
    }

    fn hints(&self) -> FieldHints {
        let e = self.eps;
        FieldHints {
            inner_radius: self.cut.inner * e,
            radial_breaks: vec![self.cut.outer * e, self.cut.inner / e],
            ..Default::default()
        }
    }

    /// On rays from the origin φ(rθ) = r^{−g}φ(θ), so the angular profile is evaluated once.
    fn along(&self, base: &[f64], dir: &[f64], coords: &[f64]) -> Vec<(f64, f64)> {
        if base.iter().any(|&b| b != 0.0) {
            return coords
                .iter()
                .map(|&c| {
                    let x: Vec<f64> = base.iter().zip(dir).map(|(b, d)| b + c * d).collect();
                    let (v, g) = self.eval(&x);
                    (v, g.iter().map(|a| a * a).sum())
                })
                .collect();
        }
        let len = norm(dir);
        let theta: Vec<f64> = dir.iter().map(|d| d / len).collect();
        let (p0, g0) = self.profile_at(&theta);
        let gsq: f64 = g0.iter().map(|a| a * a).sum();
        let deg = self.profile.degree();
        coords
            .iter()
            .map(|&c| {
                let r = c * len;
                let (rho, drho) = self.rho(r);
                if rho == 0.0 && drho == 0.0 {
                    return (0.0, 0.0);
                }
                let rg = r.powf(-deg);
                let g2 = rg * rg
                    * (rho * rho * gsq / (r * r) - 2.0 * deg * rho * drho * p0 * p0 / r + drho * drho * p0 * p0);
                (rg * p0 * rho, g2)
            })
            .collect()
    }
}

/// η(x′)h(x_n)x_n^{−s/2}ω(max(t, ε)/x_n)^{1+δ} on ℝ^n × ℝ₊, points (x′, x_n, t).
#[derive(Debug, Clone)]
pub struct HalfExtremizer {
    pub spec: ExtremizerSpec,
    pub profile: HalfProfile,
    pub cut: CutoffSpec,
    power: f64,
}

/// Builds the generic (β < 1) or critical (β = 1, exponent 1+δ) half-space family.
pub fn half_extremizer(spec: &ExtremizerSpec, cutoffs: CutoffSpec) -> Result<HalfExtremizer> {
    spec.validate()?;
    let power = match spec.tag {
        FamilyTag::HalfGeneric => 1.0,
        FamilyTag::HalfCritical => 1.0 + spec.delta,
        FamilyTag::ConeTruncation => {
            return Err(Error::Invalid("cone_truncation is not a half-space family".into()));
        }
    };
    let profile = build_half_profile(spec.params.s, spec.params.beta)?;
    Ok(HalfExtremizer { spec: *spec, profile, cut: cutoffs, power })
}

impl HalfExtremizer {
    /// Decay rate γ of the integrands: t^{−1−γ} at infinity, x_n^{γ−1} at 0.
    pub fn gamma(&self) -> f64 {
        2.0 * self.profile.decay_exponent * self.power - self.spec.params.s - 1.0
    }

    /// (A, A′, W, ∂_{x_n}W, ∂_t W) with A = h x_n^{−s/2} and W = ω^{1+δ}.
    fn factors(&self, xn: f64, t: f64) -> (f64, f64, f64, f64, f64) {
        let s = self.spec.params.s;
        let eps = self.spec.eps;
        let hv = self.cut.h(xn);
        let dh = self.cut.dphi(xn);
        let xs = xn.powf(-0.5 * s);
        let a = hv * xs;
        let da = dh * xs - 0.5 * s * hv * xs / xn;
        if a == 0.0 && da == 0.0 {
            return (0.0, 0.0, 0.0, 0.0, 0.0);
        }
        let frozen = t < eps;
        let y = t.max(eps) / xn;
        let (w, dw) = self.profile.value_slope(y).unwrap_or((0.0, 0.0));
        let p = self.power;
        let wp = w.max(0.0).powf(p);
        let dwp = p * w.max(0.0).powf(p - 1.0) * dw;
        let d_xn = -dwp * y / xn;
        let d_t = if frozen { 0.0 } else { dwp / xn };
        (a, da, wp, d_xn, d_t)
    }

    fn eval(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let n = x.len() - 1;
        let (xn, t) = (x[n - 1], x[n]);
        let mut grad = vec![0.0; x.len()];
        if !(xn > 0.0) || t < 0.0 {
            return (0.0, grad);
        }
        let xp = &x[..n - 1];
        let rp = norm(xp);
        let eta = self.cut.phi(rp);
        if eta == 0.0 {
            return (0.0, grad);
        }
        let (a, da, w, wx, wt) = self.factors(xn, t);
        let deta = self.cut.dphi(rp);
        if rp > 0.0 {
            for k in 0..n - 1 {
                grad[k] = deta * xp[k] / rp * a * w;
            }
        }
        grad[n - 1] = eta * (da * w + a * wx);
        grad[n] = eta * a * wt;
        (eta * a * w, grad)
    }
}

impl TestField for HalfExtremizer {
    fn dim(&self) -> usize {
        self.spec.params.n + 1
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x).0
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.eval(x).1
    }

    fn support_radius(&self) -> f64 {
        f64::INFINITY
    }

    fn hints(&self) -> FieldHints {
        let n = self.spec.params.n;
        let (lo, hi) = (self.cut.inner, self.cut.outer);
        let eps = self.spec.eps;
        let mut bbox = vec![(-hi, hi); n - 1];
        bbox.push((0.0, hi));
        bbox.push((0.0, T_TAIL_START));
        let g = self.gamma();
        FieldHints {
            x_breaks: vec![-lo, lo],
            xn_breaks: vec![eps, lo],
            t_breaks: vec![eps],
            bbox: Some(bbox),
            xn_exp: g - 1.0,
            t_tail: Some(g),
            ..Default::default()
        }
    }

    /// Along a direction in x′ the (x_n, t) factors are shared.
    fn along(&self, base: &[f64], dir: &[f64], coords: &[f64]) -> Vec<(f64, f64)> {
        let n = base.len() - 1;
        if dir[n - 1] != 0.0 || dir[n] != 0.0 || !(base[n - 1] > 0.0) || base[n] < 0.0 {
            return coords
                .iter()
                .map(|&c| {
                    let x: Vec<f64> = base.iter().zip(dir).map(|(b, d)| b + c * d).collect();
                    let (v, g) = self.eval(&x);
                    (v, g.iter().map(|a| a * a).sum())
                })
                .collect();
        }
        let (a, da, w, wx, wt) = self.factors(base[n - 1], base[n]);
        let mut xp = base[..n - 1].to_vec();
        coords
            .iter()
            .map(|&c| {
                for k in 0..n - 1 {
                    xp[k] = base[k] + c * dir[k];
                }
                let rp = norm(&xp);
                let eta = self.cut.phi(rp);
                let deta = self.cut.dphi(rp);
                let g_tan = deta * a * w;
                let g_n = eta * (da * w + a * wx);
                let g_t = eta * a * wt;
                (eta * a * w, g_tan * g_tan + g_n * g_n + g_t * g_t)
            })
            .collect()
    }
}
