//! Extremizer families realizing the sharp constants, the logarithmic
//! remainder of the cone inequality, and the logarithmic trace inequalities.

pub mod corpus;
pub mod cutoff;
pub mod extremizers;
pub mod logsob;
pub mod remainder;
pub mod wholeline;

pub use corpus::{cone_corpus, flat_corpus, half_corpus, radial_corpus, Bump, BumpField, Reflected};
pub use cutoff::{bump_cutoff, CutoffSpec};
pub use extremizers::{cone_extremizer, half_extremizer, ConeExtremizer, ExtremizerSpec, FamilyTag, HalfExtremizer};
pub use logsob::{
    halfline_exponent, lh_extremal, logsob_halfline, ls_extremal, ls_extremal_display, radial_log_quotients,
    to_halfline_variable, trace_log_checks, trace_log_checks_with, transport_map, HalflineLogSob, LogKind,
    RadialField, RadialProfile,
};
pub use remainder::{cone_certificates, improved_certificate, improved_remainder, remainder_weight, xk_pk, DEFAULT_TERMS};
pub use wholeline::{whole_line_certificate, whole_line_constant};
