//! Cone geometry, singular quadrature and the weighted functionals.

pub mod field;
pub mod functionals;
pub mod geometry;
pub mod quad;
pub mod spectral;

pub use field::{check_support, fd_gradient, Dilated, FieldHints, FnField, TestField};
pub use functionals::{
    cone_certificate, cone_functionals, cone_functionals_with, geometry_functionals, halfspace_certificate,
    halfspace_functionals, halfspace_functionals_with, hardy_coefficient, quotient_of, rayleigh_quotient,
    sphere_weight, Certificate, Estimate, FunctionalOptions, Functionals, Geometry, HalfMode, Method, MethodChoice,
};
pub use geometry::{cone_distance, dot, jitter_tie, norm, ConeDomain, FacetDistance};
pub use quad::{quad1d_singular, QuadratureSpec, Rule};
pub use spectral::{spectral_energy_identity, SpectralCheck};
