use super::gamma::gamma;
use crate::error::{Error, Result};
use crate::integrate::quad::adaptive_gk;

/// e^t K_ν(t) = ∫₀^∞ e^{−t(cosh u − 1)} cosh(νu) du.
fn scaled_k(nu: f64, t: f64) -> Result<f64> {
    // Cut where the integrand is below e^{-45} relative to its value at u = 0.
    let mut upper: f64 = 1.0;
    while t * (upper.cosh() - 1.0) - nu.abs() * upper < 45.0 {
        upper *= 1.25;
    }
    let f = |u: f64| (-t * (u.cosh() - 1.0)).exp() * (nu * u).cosh();
    let mut breaks = vec![0.0];
    // Resolve the scale u ~ acosh(1 + 1/t) where the decay starts.
    let knee = (1.0 + 1.0 / t).acosh();
    if knee < upper {
        breaks.push(knee);
    }
    breaks.push(upper);
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (v, _) = adaptive_gk(&f, w[0], w[1], 1e-13, 0.0, 60)?;
        total += v;
    }
    Ok(total)
}

/// Modified Bessel function K_ν(t) for t > 0; returns 0 for t > 700.
pub fn bessel_k(nu: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("bessel_k needs t > 0, got {t}")));
    }
    if t > 700.0 {
        return Ok(0.0);
    }
    Ok((-t).exp() * scaled_k(nu, t)?)
}

/// K_ν(t) together with the extension profile T(t) = 2^{1−ν}/Γ(ν) t^ν K_ν(t), T(0⁺) = 1.
pub fn bessel_k_profile(nu: f64, t: f64) -> Result<(f64, f64)> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::Range(format!("bessel_k_profile needs nu in (0, 1), got {nu}")));
    }
    let k = bessel_k(nu, t)?;
    let pref = 2f64.powf(1.0 - nu) / gamma(nu)?;
    Ok((k, pref * t.powf(nu) * k))
}

/// T′(t) = −2^{1−ν}/Γ(ν) t^ν K_{1−ν}(t).
pub fn bessel_profile_deriv(nu: f64, t: f64) -> Result<f64> {
    let k = bessel_k(1.0 - nu, t)?;
    Ok(-2f64.powf(1.0 - nu) / gamma(nu)? * t.powf(nu) * k)
}
