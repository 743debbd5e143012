use super::gamma::{gamma, rgamma};
use super::ode::PolyOde;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

const MAX_SERIES_TERMS: usize = 1_000_000;
const SERIES_TOL: f64 = 1e-17;

/// Real parameter set of F(a, b; c; z).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub z: f64,
}

impl HypParams {
    pub fn new(a: f64, b: f64, c: f64, z: f64) -> Self {
        Self { a, b, c, z }
    }
}

/// Behaviour of F(a, b; c; z) as z → 1⁻.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Z1Tag {
    Finite,
    Logarithmic,
    PowerBlowup,
}

/// Limit law at z = 1: F(1), the ln(1−z) coefficient, or the (1−z)^{c−a−b} coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Z1Regime {
    pub tag: Z1Tag,
    pub coefficient: f64,
    pub exponent: f64,
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

fn terminates(p: f64) -> bool {
    is_nonpositive_integer(p)
}

/// Direct Gauss series; converges for |z| < 1.
pub(crate) fn series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut small = 0;
    for k in 0..MAX_SERIES_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        if term.abs() <= SERIES_TOL * sum.abs() {
            small += 1;
            if small >= 2 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NoConvergence(format!(
        "hypergeometric series ({a}, {b}; {c}; {z}) did not reach tolerance"
    )))
}

fn check_c(c: f64) -> Result<()> {
    if is_nonpositive_integer(c) {
        Err(Error::Pole(c))
    } else {
        Ok(())
    }
}

/// Value and derivative of F at z in (1/2, 1) by Taylor continuation from z = 1/2.
fn continued(a: f64, b: f64, c: f64, z: f64) -> Result<(f64, f64)> {
    let w0 = series(a, b, c, 0.5)?;
    let dw0 = if a == 0.0 || b == 0.0 { 0.0 } else { a * b / c * series(a + 1.0, b + 1.0, c + 1.0, 0.5)? };
    let st = PolyOde::hypergeometric(a, b, c).advance(0.5, w0, dw0, z, 0.5);
    if !st.w.is_finite() {
        return Err(Error::NoConvergence(format!("continuation of F({a}, {b}; {c}) to {z}")));
    }
    Ok((st.w, st.dw))
}

/// Connection formula for z ≤ −2 in terms of F at 1/z.
fn inverse_z(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let d = b - a;
    if (d - d.round()).abs() < 1e-6 {
        return Err(Error::Degenerate);
    }
    let gc = gamma(c)?;
    let t1 = gc * gamma(d)? * rgamma(b) * rgamma(c - a);
    let t2 = gc * gamma(-d)? * rgamma(a) * rgamma(c - b);
    let w = 1.0 / z;
    let mut v = 0.0;
    if t1 != 0.0 {
        v += t1 * (-z).powf(-a) * series(a, 1.0 - c + a, 1.0 - d, w)?;
    }
    if t2 != 0.0 {
        v += t2 * (-z).powf(-b) * series(b, 1.0 - c + b, 1.0 + d, w)?;
    }
    Ok(v)
}

/// Pfaff transformation F(a,b;c;z) = (1−z)^{−a} F(a, c−b; c; z/(z−1)).
fn pfaff(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let (a, b) = if terminates(c - a) && !terminates(c - b) { (b, a) } else { (a, b) };
    let w = z / (z - 1.0);
    Ok((1.0 - z).powf(-a) * hyp2f1_raw(a, c - b, c, w)?)
}

fn hyp2f1_raw(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if z == 0.0 || a == 0.0 || b == 0.0 {
        return Ok(1.0);
    }
    if (terminates(a) || terminates(b)) && z.abs() <= 1.0 {
        return series(a, b, c, z);
    }
    if z.abs() <= 0.5 {
        return series(a, b, c, z);
    }
    if z > 0.5 {
        return continued(a, b, c, z).map(|(w, _)| w);
    }
    if z > -2.0 {
        return pfaff(a, b, c, z);
    }
    match inverse_z(a, b, c, z) {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) | Err(Error::Degenerate) | Err(Error::Pole(_)) => pfaff(a, b, c, z),
        Err(e) => Err(e),
    }
}

/// Gauss hypergeometric function F(a, b; c; z) for real z < 1.
///
/// Direct series for |z| ≤ 1/2, Taylor continuation of the hypergeometric
/// equation from z = 1/2 on (1/2, 1), the Pfaff map on (−2, −1/2) and the
/// 1/z connection formula for z ≤ −2 (Pfaff plus continuation when that
/// formula meets a Gamma pole).
pub fn hyp2f1(p: HypParams) -> Result<f64> {
    let HypParams { a, b, c, z } = p;
    check_c(c)?;
    if !z.is_finite() || z >= 1.0 {
        return Err(Error::Domain(format!("hyp2f1 needs z < 1, got {z}")));
    }
    hyp2f1_raw(a, b, c, z)
}

/// Shorthand for [`hyp2f1`] with positional arguments.
pub fn f21(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    hyp2f1(HypParams { a, b, c, z })
}

/// d/dz F(a, b; c; z) = (ab/c) F(a+1, b+1; c+1; z).
pub fn hyp2f1_deriv(p: HypParams) -> Result<f64> {
    let HypParams { a, b, c, z } = p;
    check_c(c)?;
    check_c(c + 1.0)?;
    if a == 0.0 || b == 0.0 {
        return Ok(0.0);
    }
    Ok(a * b / c * hyp2f1(HypParams { a: a + 1.0, b: b + 1.0, c: c + 1.0, z })?)
}

/// Second derivative of F(a, b; c; z).
pub fn hyp2f1_deriv2(p: HypParams) -> Result<f64> {
    let HypParams { a, b, c, z } = p;
    if a == 0.0 || b == 0.0 || a == -1.0 || b == -1.0 {
        return Ok(0.0);
    }
    let k = a * (a + 1.0) * b * (b + 1.0) / (c * (c + 1.0));
    Ok(k * hyp2f1(HypParams { a: a + 2.0, b: b + 2.0, c: c + 2.0, z })?)
}

/// Classifies the z → 1 behaviour of F(a, b; c; z) and returns the matching coefficient.
pub fn z1_classify(a: f64, b: f64, c: f64) -> Result<Z1Regime> {
    let e = c - a - b;
    let finite = |v: f64, what: &str| {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("coefficient pole in {what}")))
        }
    };
    if e.abs() <= 1e-12 {
        let coef = -gamma(a + b)? * rgamma(a) * rgamma(b);
        return Ok(Z1Regime { tag: Z1Tag::Logarithmic, coefficient: finite(coef, "ln(1-z) law")?, exponent: e });
    }
    if e > 0.0 {
        let coef = gamma(c)? * gamma(e)? * rgamma(c - a) * rgamma(c - b);
        Ok(Z1Regime { tag: Z1Tag::Finite, coefficient: finite(coef, "F(1)")?, exponent: e })
    } else {
        let coef = gamma(c)? * gamma(-e)? * rgamma(a) * rgamma(b);
        Ok(Z1Regime { tag: Z1Tag::PowerBlowup, coefficient: finite(coef, "power law")?, exponent: e })
    }
}

/// Coefficient C making η = F(a,b;c;z) + C z^{1−c} F(a+1−c, b+1−c; 2−c; z) finite at z = 1.
pub fn eta_coefficient(a: f64, b: f64, c: f64) -> Result<f64> {
    Ok(-gamma(c)? * gamma(a + 1.0 - c)? * gamma(b + 1.0 - c)? * rgamma(2.0 - c) * rgamma(a) * rgamma(b))
}

/// lim_{z→1} η(z) for the combination of [`eta_coefficient`].
///
/// η solves the hypergeometric equation and stays finite at z = 1, so it is a
/// multiple of F(a, b; a+b−c+1; 1−z), the solution regular there with value 1
/// at z = 1. The multiple is read off at z = 1/2, where every series converges.
pub fn eta_limit(a: f64, b: f64, c: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Range(format!("eta_limit needs a, b > 0, got ({a}, {b})")));
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Range(format!("eta_limit needs c in (0, 1), got {c}")));
    }
    if a + b < c - 1e-12 {
        return Err(Error::Range(format!("eta_limit needs a + b >= c, got {}", a + b)));
    }
    let coef = eta_coefficient(a, b, c)?;
    let z0 = 0.5;
    let eta = series(a, b, c, z0)? + coef * z0.powf(1.0 - c) * series(a + 1.0 - c, b + 1.0 - c, 2.0 - c, z0)?;
    let regular = series(a, b, a + b - c + 1.0, 1.0 - z0)?;
    Ok(eta / regular)
}
