//! Real-argument special functions: Gamma family, Gauss ₂F₁ with
//! continuation and z → 1 laws, and modified Bessel K.

pub mod bessel;
pub mod gamma;
pub mod hyp2f1;
pub mod ode;
pub mod richardson;

pub use bessel::{bessel_k, bessel_k_profile, bessel_profile_deriv};
pub use gamma::{digamma, gamma, gamma_fn, ln_gamma, pochhammer, rgamma};
pub use hyp2f1::{
    eta_coefficient, eta_limit, f21, hyp2f1, hyp2f1_deriv, hyp2f1_deriv2, z1_classify, HypParams, Z1Regime, Z1Tag,
};
pub use ode::{OdeState, PolyOde};
pub use richardson::{extrapolate, Extrapolation};
