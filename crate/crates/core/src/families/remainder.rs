use crate::constants::{h_cone, InequalityParams};
use crate::error::{Error, Result};
use crate::integrate::{
    cone_functionals_with, hardy_coefficient, Certificate, ConeDomain, Estimate, FunctionalOptions, Geometry,
    QuadratureSpec, TestField,
};

/// Terms of the remainder series kept by default.
pub const DEFAULT_TERMS: usize = 5;

/// (X_k(t), P_k(t)) with X₁(t) = 1/(1 − ln t), X_k = X₁∘X_{k−1}, P_k = X₁⋯X_k.
pub fn xk_pk(k: usize, t: f64) -> Result<(f64, f64)> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::Domain(format!("X_k needs t in (0, 1], got {t}")));
    }
    if k == 0 {
        return Err(Error::Domain("k must be positive".into()));
    }
    let mut x = t;
    let mut p = 1.0;
    for _ in 0..k {
        x = 1.0 / (1.0 - x.ln());
        p *= x;
    }
    Ok((x, p))
}

/// Σ_{i≤K} P_i(t)², zero for t ≤ 0.
pub fn remainder_weight(t: f64, terms: usize) -> f64 {
    if !(t > 0.0) {
        return 0.0;
    }
    let t = t.min(1.0);
    let mut x = t;
    let mut p = 1.0;
    let mut sum = 0.0;
    for _ in 0..terms {
        x = 1.0 / (1.0 - x.ln());
        p *= x;
        sum += p * p;
    }
    sum
}

fn check_radius<F: TestField + ?Sized>(u: &F, d: f64, terms: usize) -> Result<()> {
    if terms == 0 {
        return Err(Error::Invalid("the remainder series needs at least one term".into()));
    }
    let r = u.support_radius();
    if !(r <= d) {
        return Err(Error::SupportExceeds(r));
    }
    Ok(())
}

/// Integrals of the cone inequality together with ∫ Σ_{i≤K} P_i(|x|/D)² u²/|x|² d^s.
fn improved_functionals<F: TestField + ?Sized>(
    u: &F,
    cone: &ConeDomain,
    params: &InequalityParams,
    d: f64,
    terms: usize,
    spec: &QuadratureSpec,
) -> Result<crate::integrate::Functionals> {
    check_radius(u, d, terms)?;
    let w = move |r: f64| remainder_weight(r / d, terms);
    let opts = FunctionalOptions { remainder_weight: Some(&w), ..Default::default() };
    cone_functionals_with(u, cone, params.s, spec, &opts)
}

/// (1/4) Σ_{i≤K} ∫ P_i(|x|/D)² u²/|x|² d^s dx over the cone.
pub fn improved_remainder<F: TestField + ?Sized>(
    u: &F,
    cone: &ConeDomain,
    params: &InequalityParams,
    d: f64,
    terms: usize,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let f = improved_functionals(u, cone, params, d, terms, spec)?;
    let r = f.remainder.unwrap_or_default();
    Ok(Estimate { value: 0.25 * r.value, error: 0.25 * r.error })
}

/// The plain cone certificate and its improved form from one set of integrals.
pub fn cone_certificates<F: TestField + ?Sized>(
    u: &F,
    cone: &ConeDomain,
    params: &InequalityParams,
    d: f64,
    terms: usize,
    spec: &QuadratureSpec,
) -> Result<(Certificate, Certificate)> {
    let h = h_cone(params.n, params.s, params.beta)?;
    let f = improved_functionals(u, cone, params, d, terms, spec)?;
    let c = hardy_coefficient(&Geometry::Cone(cone.clone()), params.beta);
    let base = [("hardy", c, f.hardy), ("trace", h, f.trace)];
    let plain = Certificate::new("cone_trace_hardy", *params, f.energy, &base, f.confidence());
    let improved = Certificate::new(
        "cone_trace_hardy_improved",
        *params,
        f.energy,
        &[base[0], base[1], ("remainder", 0.25, f.remainder.unwrap_or_default())],
        f.confidence(),
    );
    Ok((plain, improved))
}

/// Cone inequality with the truncated remainder series added to the right side.
pub fn improved_certificate<F: TestField + ?Sized>(
    u: &F,
    cone: &ConeDomain,
    params: &InequalityParams,
    d: f64,
    terms: usize,
    spec: &QuadratureSpec,
) -> Result<Certificate> {
    Ok(cone_certificates(u, cone, params, d, terms, spec)?.1)
}
