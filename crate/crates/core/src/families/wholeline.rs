use super::corpus::Reflected;
use crate::constants::InequalityParams;
use crate::error::Result;
use crate::integrate::{halfspace_functionals, Certificate, Estimate, HalfMode, QuadratureSpec, TestField};
use crate::specfun::ln_gamma;

/// 4(Γ(3/4)/Γ(1/4))², the trace constant on {x_n > 0} × ℝ.
pub fn whole_line_constant() -> f64 {
    4.0 * (2.0 * (ln_gamma(0.75).unwrap_or(f64::NAN) - ln_gamma(0.25).unwrap_or(f64::NAN))).exp()
}

fn sum(a: Estimate, b: Estimate) -> Estimate {
    Estimate { value: a.value + b.value, error: a.error + b.error }
}

/// ∫_ℝ∫|∇u|² ≥ (1/4)∫_ℝ∫u²/x_n² + 4(Γ(3/4)/Γ(1/4))²∫u(x, 0)²/x_n for u on {x_n > 0} × ℝ,
/// assembled from the two half-spaces t > 0 and t < 0.
pub fn whole_line_certificate<F: TestField + ?Sized>(u: &F, spec: &QuadratureSpec) -> Result<Certificate> {
    let n = u.dim() - 1;
    let params = InequalityParams::new(n, 0.0, 1.0)?;
    let up = halfspace_functionals(u, 0.0, HalfMode::XnWeight, spec)?;
    let down = halfspace_functionals(&Reflected { inner: u }, 0.0, HalfMode::XnWeight, spec)?;
    Ok(Certificate::new(
        "whole_line_hardy",
        params,
        sum(up.energy, down.energy),
        &[("hardy", 0.25, sum(up.hardy, down.hardy)), ("trace", whole_line_constant(), up.trace)],
        up.confidence().max(down.confidence()),
    ))
}
