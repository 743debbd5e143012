//! Explicit solutions of the Euler–Lagrange equations: the cone profile in the
//! variable z = d²/|x|² and the half-space profile in y = t/x_n.

pub mod cone;
pub mod half;

pub use cone::{
    build_cone_profile, cone_boundary_flux_limit, cone_ode_residual, cone_profile_eval, ConeProfile, ProfileValue,
};
pub use half::{
    build_half_profile, half_boundary_flux_limit, half_boundary_term, half_energy, half_ode_residual, half_profile_eval,
    half_property_suite, shoot_half_ode, HalfCase, HalfProfile, HalfPropertyReport, ShotProfile,
};
