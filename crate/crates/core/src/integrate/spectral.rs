use super::quad::{quad1d_singular, QuadratureSpec};
use crate::constants::spectral_energy_factor;
use crate::error::{Error, Result};
use crate::specfun::{bessel_k_profile, bessel_profile_deriv};

/// Energy of the extension of one Dirichlet mode of (0, π), normalized by λ_k^α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub deviation: f64,
}

/// k^{−2α} ∫₀^∞ (k²T(kt)² + T′(kt)²k²) t^{1−2α} dt against 2^{1−2α}Γ(1−α)/Γ(α).
pub fn spectral_energy_identity(alpha: f64, mode_k: u32, spec: &QuadratureSpec) -> Result<SpectralCheck> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Range(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if mode_k == 0 {
        return Err(Error::Range("mode index must be positive".into()));
    }
    let k = mode_k as f64;
    let w = 1.0 - 2.0 * alpha;
    let f = |t: f64| {
        let tau = k * t;
        match (bessel_k_profile(alpha, tau), bessel_profile_deriv(alpha, tau)) {
            (Ok((_, tv)), Ok(dv)) => k * k * (tv * tv + dv * dv) * t.powf(w),
            _ => f64::NAN,
        }
    };
    let q = QuadratureSpec { rel_tol: spec.rel_tol.min(1e-10), ..*spec };
    let split = 1.0 / k;
    let (near, _) = quad1d_singular(&f, 0.0, split, -w.abs(), 0.0, &q)?;
    let (far, _) = quad1d_singular(&|t: f64| f(split + t), 0.0, f64::INFINITY, 0.0, 0.0, &q)?;
    let lhs = k.powf(-2.0 * alpha) * (near + far);
    let rhs = spectral_energy_factor(alpha)?;
    Ok(SpectralCheck { lhs, rhs, deviation: (lhs - rhs).abs() / rhs })
}
