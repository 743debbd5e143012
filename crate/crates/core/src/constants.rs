//! Closed forms of the sharp constants and the identity suite tying them together.
//!
//! Every constant is assembled in log-Gamma space and exponentiated once, so
//! large dimensions do not overflow.

use crate::error::{Error, Result};
use crate::specfun::{gamma, ln_gamma};
use serde::{Deserialize, Serialize};
use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

/// The triple (n, s, β).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityParams {
    pub n: usize,
    pub s: f64,
    pub beta: f64,
}

impl InequalityParams {
    pub fn new(n: usize, s: f64, beta: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Range(format!("n >= 2 required, got {n}")));
        }
        if !(s > -1.0 && s < 1.0) {
            return Err(Error::Range(format!("s in (-1, 1) required, got {s}")));
        }
        if !beta.is_finite() {
            return Err(Error::Range(format!("beta must be finite, got {beta}")));
        }
        Ok(Self { n, s, beta })
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// n_s = n + 1 + s.
    pub fn n_s(&self) -> f64 {
        self.nf() + 1.0 + self.s
    }

    /// α = (1 − s)/2.
    pub fn alpha(&self) -> f64 {
        0.5 * (1.0 - self.s)
    }

    /// 2(s)* = 2n/(n − 1 + s).
    pub fn two_s_star(&self) -> f64 {
        2.0 * self.nf() / (self.nf() - 1.0 + self.s)
    }

    /// Checks 2 ≤ β ≤ n_s.
    pub fn check_cone(&self) -> Result<()> {
        if !(self.beta >= 2.0 && self.beta <= self.n_s()) {
            return Err(Error::Range(format!("cone constants need 2 <= beta <= n_s = {}, got {}", self.n_s(), self.beta)));
        }
        Ok(())
    }

    /// Checks 0 ≤ β ≤ 1.
    pub fn check_half(&self) -> Result<()> {
        if !(self.beta >= 0.0 && self.beta <= 1.0) {
            return Err(Error::Range(format!("half-space constants need 0 <= beta <= 1, got {}", self.beta)));
        }
        Ok(())
    }
}

impl fmt::Display for InequalityParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, s={}, beta={})", self.n, self.s, self.beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstantKind {
    #[serde(rename = "H_cone")]
    HCone,
    #[serde(rename = "kato")]
    Kato,
    #[serde(rename = "avf")]
    Avf,
    #[serde(rename = "trace_hardy_weighted")]
    TraceHardyWeighted,
    #[serde(rename = "hardy_weighted")]
    HardyWeighted,
    #[serde(rename = "cs_trace")]
    CsTrace,
    #[serde(rename = "pitt")]
    Pitt,
    #[serde(rename = "frac_sobolev")]
    FracSobolev,
    #[serde(rename = "trace_sobolev")]
    TraceSobolev,
    #[serde(rename = "k_half")]
    KHalf,
    #[serde(rename = "spectral_trace")]
    SpectralTrace,
    #[serde(rename = "spectral_energy_factor")]
    SpectralEnergyFactor,
    #[serde(rename = "cls_r")]
    ClsR,
    #[serde(rename = "clh_r")]
    ClhR,
    #[serde(rename = "logsob_halfline")]
    LogsobHalfline,
    #[serde(rename = "flhs_c")]
    FlhsC,
}

impl ConstantKind {
    pub const ALL: [ConstantKind; 16] = [
        ConstantKind::HCone,
        ConstantKind::Kato,
        ConstantKind::Avf,
        ConstantKind::TraceHardyWeighted,
        ConstantKind::HardyWeighted,
        ConstantKind::CsTrace,
        ConstantKind::Pitt,
        ConstantKind::FracSobolev,
        ConstantKind::TraceSobolev,
        ConstantKind::KHalf,
        ConstantKind::SpectralTrace,
        ConstantKind::SpectralEnergyFactor,
        ConstantKind::ClsR,
        ConstantKind::ClhR,
        ConstantKind::LogsobHalfline,
        ConstantKind::FlhsC,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ConstantKind::HCone => "H_cone",
            ConstantKind::Kato => "kato",
            ConstantKind::Avf => "avf",
            ConstantKind::TraceHardyWeighted => "trace_hardy_weighted",
            ConstantKind::HardyWeighted => "hardy_weighted",
            ConstantKind::CsTrace => "cs_trace",
            ConstantKind::Pitt => "pitt",
            ConstantKind::FracSobolev => "frac_sobolev",
            ConstantKind::TraceSobolev => "trace_sobolev",
            ConstantKind::KHalf => "k_half",
            ConstantKind::SpectralTrace => "spectral_trace",
            ConstantKind::SpectralEnergyFactor => "spectral_energy_factor",
            ConstantKind::ClsR => "cls_r",
            ConstantKind::ClhR => "clh_r",
            ConstantKind::LogsobHalfline => "logsob_halfline",
            ConstantKind::FlhsC => "flhs_c",
        }
    }
}

impl fmt::Display for ConstantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConstantKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ConstantKind::ALL
            .iter()
            .copied()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Invalid(format!("unknown constant kind '{s}'")))
    }
}

fn lg(x: f64) -> Result<f64> {
    ln_gamma(x).map_err(|_| Error::Range(format!("Gamma argument {x} must be positive")))
}

fn check_s(s: f64) -> Result<()> {
    if s > -1.0 && s < 1.0 {
        Ok(())
    } else {
        Err(Error::Range(format!("s in (-1, 1) required, got {s}")))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Range(format!("alpha in (0, 1) required, got {alpha}")))
    }
}

/// H(n, s, β) of the cone inequality, 0 at β = n_s.
pub fn h_cone(n: usize, s: f64, beta: f64) -> Result<f64> {
    let p = InequalityParams::new(n, s, beta)?;
    p.check_cone()?;
    let ns = p.n_s();
    if beta == ns {
        return Ok(0.0);
    }
    let l = lg(0.5 * (1.0 + s))? + lg((ns + beta - 2.0 - 2.0 * s) / 4.0)? + lg((ns - beta + 2.0 - 2.0 * s) / 4.0)?
        - lg(0.5 * (1.0 - s))?
        - lg((ns + beta - 4.0) / 4.0)?
        - lg((ns - beta) / 4.0)?;
    Ok(2.0 * l.exp())
}

/// 2 (Γ((n+1)/4)/Γ((n−1)/4))².
pub fn kato(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Range(format!("n >= 2 required, got {n}")));
    }
    let nf = n as f64;
    Ok(2.0 * (2.0 * (lg((nf + 1.0) / 4.0)? - lg((nf - 1.0) / 4.0)?)).exp())
}

/// The unweighted interpolating constant H(n, β), 2 ≤ β ≤ n + 1.
pub fn avf(n: usize, beta: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Range(format!("n >= 2 required, got {n}")));
    }
    let nf = n as f64;
    if !(beta >= 2.0 && beta <= nf + 1.0) {
        return Err(Error::Range(format!("avf needs 2 <= beta <= n + 1, got {beta}")));
    }
    if beta == nf + 1.0 {
        return Ok(0.0);
    }
    let l = lg((nf + beta - 1.0) / 4.0)? + lg((nf - beta + 3.0) / 4.0)?
        - lg((nf + beta - 3.0) / 4.0)?
        - lg((nf + 1.0 - beta) / 4.0)?;
    Ok(2.0 * l.exp())
}

/// 2Γ((1+s)/2)/Γ((1−s)/2) (Γ((n+1−s)/4)/Γ((n−1+s)/4))².
pub fn trace_hardy_weighted(n: usize, s: f64) -> Result<f64> {
    let p = InequalityParams::new(n, s, 2.0)?;
    let nf = p.nf();
    let l = lg(0.5 * (1.0 + s))? - lg(0.5 * (1.0 - s))?
        + 2.0 * (lg((nf + 1.0 - s) / 4.0)? - lg((nf - 1.0 + s) / 4.0)?);
    Ok(2.0 * l.exp())
}

/// (n_s − 2)²/4.
pub fn hardy_weighted(n: usize, s: f64) -> Result<f64> {
    let p = InequalityParams::new(n, s, 2.0)?;
    Ok((p.n_s() - 2.0).powi(2) / 4.0)
}

/// 2^s Γ((1+s)/2)/Γ((1−s)/2).
pub fn cs_trace(s: f64) -> Result<f64> {
    check_s(s)?;
    Ok((s * 2f64.ln() + lg(0.5 * (1.0 + s))? - lg(0.5 * (1.0 - s))?).exp())
}

/// (2^{(1−s)/2} Γ((n+1−s)/4)/Γ((n−1+s)/4))².
pub fn pitt(n: usize, s: f64) -> Result<f64> {
    let p = InequalityParams::new(n, s, 2.0)?;
    let nf = p.nf();
    let l = 0.5 * (1.0 - s) * 2f64.ln() + lg((nf + 1.0 - s) / 4.0)? - lg((nf - 1.0 + s) / 4.0)?;
    Ok((2.0 * l).exp())
}

/// Sharp fractional Sobolev constant of order α ∈ (0, n/2).
pub fn frac_sobolev(n: usize, alpha: f64) -> Result<f64> {
    let nf = n as f64;
    if !(alpha > 0.0 && alpha < 0.5 * nf) {
        return Err(Error::Range(format!("frac_sobolev needs 0 < alpha < n/2, got {alpha}")));
    }
    let l = lg(0.5 * (nf - 2.0 * alpha))? - 2.0 * alpha * 2f64.ln() - alpha * PI.ln() - lg(0.5 * (nf + 2.0 * alpha))?
        + 2.0 * alpha / nf * (lg(nf)? - lg(0.5 * nf)?);
    Ok(l.exp())
}

/// C_{n,s} of the weighted trace Sobolev inequality.
pub fn trace_sobolev(n: usize, s: f64) -> Result<f64> {
    let p = InequalityParams::new(n, s, 2.0)?;
    let nf = p.nf();
    let l = -(2f64.ln()) - 0.5 * (1.0 - s) * PI.ln() + lg(0.5 * (1.0 - s))? + lg(0.5 * (nf - 1.0 + s))?
        - lg(0.5 * (1.0 + s))?
        - lg(0.5 * (nf + 1.0 - s))?
        + (1.0 - s) / nf * (lg(nf)? - lg(0.5 * nf)?);
    Ok(l.exp())
}

/// k(s, β) = 2Γ((1+s)/2)/Γ((1−s)/2) (Γ((3−s+r)/4)/Γ((1+s+r)/4))², r = √(1−β²).
pub fn k_half(s: f64, beta: f64) -> Result<f64> {
    check_s(s)?;
    if !(beta >= 0.0 && beta <= 1.0) {
        return Err(Error::Range(format!("k_half needs 0 <= beta <= 1, got {beta}")));
    }
    let r = (1.0 - beta * beta).sqrt();
    let l = lg(0.5 * (1.0 + s))? - lg(0.5 * (1.0 - s))? + 2.0 * (lg((3.0 - s + r) / 4.0)? - lg((1.0 + s + r) / 4.0)?);
    Ok(2.0 * l.exp())
}

/// k(s, β) in the form (1−s)Γ((1+s)/2)Γ(a₂)²/(Γ((3−s)/2)Γ(a₁)²), evaluated with plain Γ.
pub fn k_half_gamma_form(s: f64, beta: f64) -> Result<f64> {
    check_s(s)?;
    let r = (1.0 - beta * beta).sqrt();
    let a1 = (1.0 + s + r) / 4.0;
    let a2 = (3.0 - s + r) / 4.0;
    Ok((1.0 - s) * gamma(0.5 * (1.0 + s))? * gamma(a2)?.powi(2) / (gamma(0.5 * (3.0 - s))? * gamma(a1)?.powi(2)))
}

/// Boundary constant for the spectral fractional Laplacian of order α.
pub fn spectral_trace(alpha: f64, beta: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(beta >= 0.0 && beta <= 1.0) {
        return Err(Error::Range(format!("spectral_trace needs 0 <= beta <= 1, got {beta}")));
    }
    let r = (1.0 - beta * beta).sqrt();
    let l = 2.0 * alpha * 2f64.ln() + 2.0 * (lg((2.0 * (1.0 + alpha) + r) / 4.0)? - lg((2.0 * (1.0 - alpha) + r) / 4.0)?);
    Ok(l.exp())
}

/// 2^{1−2α} Γ(1−α)/Γ(α).
pub fn spectral_energy_factor(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(((1.0 - 2.0 * alpha) * 2f64.ln() + lg(1.0 - alpha)? - lg(alpha)?).exp())
}

/// Weighted measure of the upper unit hemisphere, π^{n/2}Γ((1+s)/2)/Γ(n_s/2).
pub fn omega_ns(n: usize, s: f64) -> Result<f64> {
    let p = InequalityParams::new(n, s, 2.0)?;
    Ok((0.5 * p.nf() * PI.ln() + lg(0.5 * (1.0 + s))? - lg(0.5 * p.n_s())?).exp())
}

/// Surface area of S^{n−1}, 2π^{n/2}/Γ(n/2).
pub fn omega_sphere(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::Range("sphere dimension must be positive".into()));
    }
    let nf = n as f64;
    Ok(2.0 * (0.5 * nf * PI.ln() - lg(0.5 * nf)?).exp())
}

/// Factor 4ω_{n−1}/((1−s)²ω_{n,s}) (2ω_{n−1}/(1−s))^{−(1−s)/n} in front of the radial suprema.
pub fn radial_prefactor(n: usize, s: f64) -> Result<f64> {
    let p = InequalityParams::new(n, s, 2.0)?;
    let w1 = omega_sphere(n)?;
    let wns = omega_ns(n, s)?;
    let m = 1.0 - s;
    Ok(4.0 * w1 / (m * m * wns) * (2.0 * w1 / m).powf(-m / p.nf()))
}

/// Radial logarithmic Sobolev trace constant, closed form.
pub fn cls_r(n: usize, s: f64) -> Result<f64> {
    let p = InequalityParams::new(n, s, 2.0)?;
    let nf = p.nf();
    let m = 1.0 - s;
    let l = (8.0 / (nf * m * E)).ln() + lg(0.5 * (nf + 1.0 + s))? - lg(0.5 * nf)? - lg(0.5 * (1.0 + s))?
        + m / nf * (m.ln() + lg(0.5 * nf)? - 2f64.ln() - 0.5 * nf * PI.ln() - lg(nf / m)?);
    Ok(l.exp())
}

/// Radial logarithmic Hardy trace constant, closed form.
pub fn clh_r(n: usize, s: f64) -> Result<f64> {
    let p = InequalityParams::new(n, s, 2.0)?;
    let nf = p.nf();
    let m = 1.0 - s;
    let q = m / (2.0 * nf);
    let l = 2f64.ln() + lg(0.5 * (nf + 1.0 + s))? - 0.5 * m * PI.ln() - lg(0.5 * nf + 1.0)? - lg(0.5 * (1.0 + s))?
        + (1.0 - q) * ((2.0 * nf - 1.0 + s) / (nf - 1.0 + s).powi(2)).ln()
        + q * (m.ln() + 2.0 * lg(0.5 * nf)? - (8.0 * PI * E).ln());
    Ok(l.exp())
}

/// K_a = (2/(ae)) (2/Γ(a/2))^{2/a}, the half-line log-Sobolev constant for a ≥ 1.
pub fn logsob_halfline(a: f64) -> Result<f64> {
    if !(a >= 1.0) {
        return Err(Error::Range(format!("logsob_halfline needs a >= 1, got {a}")));
    }
    Ok((2.0 / (a * E)) * (2.0 / a * (2f64.ln() - lg(0.5 * a)?)).exp())
}

/// C(n, a) of the half-line logarithmic Hardy inequality, −1 < a < (n−2)/2.
pub fn flhs_c(n: usize, a: f64) -> Result<f64> {
    let nf = n as f64;
    if n < 2 || !(a > -1.0 && a < 0.5 * (nf - 2.0)) {
        return Err(Error::Range(format!("flhs_c needs n >= 2 and -1 < a < (n-2)/2, got n={n}, a={a}")));
    }
    let b = 1.0 + a;
    let l = (4.0 * b * b / nf).ln() - b / nf * (2.0 * PI * E * b).ln()
        + (1.0 - b / nf) * ((nf - 1.0 - a) / (nf - 2.0 * b).powi(2)).ln();
    Ok(l.exp())
}

/// γ_p = (1−s)/p − (p−2)(n+s−1)/(2p).
pub fn gamma_p(n: usize, s: f64, p: f64) -> f64 {
    let nf = n as f64;
    (1.0 - s) / p - (p - 2.0) * (nf + s - 1.0) / (2.0 * p)
}

/// Evaluates `kind` at `params`. `extra` carries the half-line exponent a
/// (`logsob_halfline`, `flhs_c`) or the order α (`frac_sobolev`,
/// `spectral_trace`, `spectral_energy_factor`); when absent the value tied
/// to (n, s) is used: a = 2n/(1−s), a = −(1+s)/2, α = (1−s)/2.
pub fn sharp_constant(kind: ConstantKind, params: InequalityParams, extra: Option<f64>) -> Result<f64> {
    let InequalityParams { n, s, beta } = params;
    check_s(s)?;
    let alpha = extra.unwrap_or(params.alpha());
    match kind {
        ConstantKind::HCone => h_cone(n, s, beta),
        ConstantKind::Kato => kato(n),
        ConstantKind::Avf => avf(n, beta),
        ConstantKind::TraceHardyWeighted => trace_hardy_weighted(n, s),
        ConstantKind::HardyWeighted => hardy_weighted(n, s),
        ConstantKind::CsTrace => cs_trace(s),
        ConstantKind::Pitt => pitt(n, s),
        ConstantKind::FracSobolev => frac_sobolev(n, alpha),
        ConstantKind::TraceSobolev => trace_sobolev(n, s),
        ConstantKind::KHalf => k_half(s, beta),
        ConstantKind::SpectralTrace => spectral_trace(alpha, beta),
        ConstantKind::SpectralEnergyFactor => spectral_energy_factor(alpha),
        ConstantKind::ClsR => cls_r(n, s),
        ConstantKind::ClhR => clh_r(n, s),
        ConstantKind::LogsobHalfline => logsob_halfline(extra.unwrap_or(2.0 * params.nf() / (1.0 - s))),
        ConstantKind::FlhsC => flhs_c(n, extra.unwrap_or(-0.5 * (1.0 + s))),
    }
}

/// Outcome of one relation at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub relation: String,
    /// Relative deviation, or the vanishing value for the β → n_s relation; `None` when skipped.
    pub deviation: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityRow {
    pub params: InequalityParams,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityRow {
    pub fn max_deviation(&self) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.relation != "vanishing_at_n_s")
            .filter_map(|c| c.deviation)
            .fold(0.0, f64::max)
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub rows: Vec<IdentityRow>,
    pub tolerance: f64,
}

impl IdentityReport {
    pub fn max_deviation(&self) -> f64 {
        self.rows.iter().map(IdentityRow::max_deviation).fold(0.0, f64::max)
    }

    pub fn pass(&self) -> bool {
        self.rows.iter().all(IdentityRow::pass)
    }

    /// First failing relation as an error.
    pub fn into_result(self) -> Result<Self> {
        for row in &self.rows {
            for c in &row.checks {
                if !c.pass {
                    return Err(Error::IdentityViolation {
                        relation: format!("{} at {}", c.relation, row.params),
                        deviation: c.deviation.unwrap_or(f64::NAN),
                    });
                }
            }
        }
        Ok(self)
    }
}

pub const IDENTITY_TOL: f64 = 1e-12;

fn reldev(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn check(relation: &str, dev: Result<f64>, tol: f64) -> IdentityCheck {
    match dev {
        Ok(d) => IdentityCheck { relation: relation.into(), deviation: Some(d), pass: d <= tol },
        Err(_) => IdentityCheck { relation: relation.into(), deviation: None, pass: false },
    }
}

fn skipped(relation: &str) -> IdentityCheck {
    IdentityCheck { relation: relation.into(), deviation: None, pass: true }
}

/// Half-space β used for the k-relations at a grid point: β itself when it
/// lies in [0, 1], otherwise its relative position (β − 2)/(n_s − 2) in the cone range.
pub fn half_beta_for(p: &InequalityParams) -> f64 {
    if (0.0..=1.0).contains(&p.beta) {
        p.beta
    } else {
        ((p.beta - 2.0) / (p.n_s() - 2.0)).clamp(0.0, 1.0)
    }
}

/// Cross-checks the specializations linking the constants at each grid point.
///
/// Relations: `avf` H(n,0,β) = H(n,β); `trace_hardy` H(n,s,2) equals the
/// trace Hardy constant; `vanishing_at_n_s` H(n,s,n_s−1e−6) < 1e−5·max(1, H(n,s,2));
/// `k_forms` the two forms of k(s,β); `pitt` Pitt = H(n,s,2)/cs_trace(s);
/// `whole_line` 4(Γ(3/4)/Γ(1/4))² = 2k(0,1). The `avf` relation is skipped
/// when β ≥ n + 1 or β < 2, where the unweighted constant vanishes or is undefined.
pub fn constant_identities(grid: &[InequalityParams]) -> Result<IdentityReport> {
    if grid.is_empty() {
        return Err(Error::Invalid("identity grid is empty".into()));
    }
    let tol = IDENTITY_TOL;
    let mut rows = Vec::with_capacity(grid.len());
    for p in grid {
        let InequalityParams { n, s, beta } = *p;
        let nf = p.nf();
        let cone_beta = if p.check_cone().is_ok() { beta } else { 2.0 };
        let mut checks = Vec::with_capacity(6);
        if cone_beta >= 2.0 && cone_beta < nf + 1.0 {
            checks.push(check("avf", (|| Ok(reldev(h_cone(n, 0.0, cone_beta)?, avf(n, cone_beta)?)))(), tol));
        } else {
            checks.push(skipped("avf"));
        }
        checks.push(check("trace_hardy", (|| Ok(reldev(h_cone(n, s, 2.0)?, trace_hardy_weighted(n, s)?)))(), tol));
        let vanish = h_cone(n, s, p.n_s() - 1e-6);
        let scale = h_cone(n, s, 2.0).unwrap_or(1.0).max(1.0);
        checks.push(match vanish {
            Ok(v) => IdentityCheck {
                relation: "vanishing_at_n_s".into(),
                deviation: Some(v),
                pass: v > 0.0 && v < 1e-5 * scale,
            },
            Err(_) => IdentityCheck { relation: "vanishing_at_n_s".into(), deviation: None, pass: false },
        });
        let bh = half_beta_for(p);
        checks.push(check("k_forms", (|| Ok(reldev(k_half(s, bh)?, k_half_gamma_form(s, bh)?)))(), tol));
        checks.push(check("pitt", (|| Ok(reldev(pitt(n, s)?, h_cone(n, s, 2.0)? / cs_trace(s)?)))(), tol));
        let whole = 4.0 * (gamma(0.75)? / gamma(0.25)?).powi(2);
        checks.push(check("whole_line", k_half(0.0, 1.0).map(|k| reldev(whole, 2.0 * k)), tol));
        rows.push(IdentityRow { params: *p, checks });
    }
    Ok(IdentityReport { rows, tolerance: tol })
}
