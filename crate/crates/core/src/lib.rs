//! Sharp constants, explicit boundary profiles and numerical certificates for
//! weighted trace Hardy, Hardy–Sobolev–Maz'ya and logarithmic trace inequalities
//! on polyhedral cones and half-spaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: Gamma family, Gauss hypergeometric function, Bessel K.
//! * [`constants`]: closed forms of every sharp constant and their identities.
//! * [`profiles`]: hypergeometric solutions of the Euler–Lagrange equations.
//! * [`integrate`]: cone geometry, singular quadrature and weighted functionals.
//! * [`families`]: extremizer families, remainder terms, logarithmic inequalities.
//! * [`report`]: parameter sweeps and report rows consumed by the CLI.

pub mod constants;
pub mod error;
pub mod families;
pub mod integrate;
pub mod profiles;
pub mod report;
pub mod specfun;

pub use error::{Error, Result};
