//! Magnitude of finite metric spaces and its behavior along lines between
//! spaces.
//!
//! The crate provides:
//!
//! - validated finite metric spaces and the constructions they compose from
//!   (scaling, wedges, distance joins, complete graphs) — [`space`];
//! - similarity matrices, weightings, magnitude, and magnitude functions,
//!   with closed forms for cross-checking — [`magnitude`];
//! - lines between spaces (`d_{f,t} = t d_Y + (1-t) d_X(f x f)` along a
//!   surjection `f`), numerical limits of magnitude along a line, isometry
//!   groups, line equivalence, and canonical block forms — [`lines`];
//! - the genericity polynomial whose non-vanishing certifies that the
//!   magnitude limit along a line equals the target's magnitude, together
//!   with its non-vanishing witness, a block-determinant identity oracle,
//!   and a numeric probe of the predicted leading coefficients —
//!   [`genericity`];
//! - limit extrapolation on geometric grids — [`extrapolate`] — and JSON/CSV
//!   space formats — [`io`].
//!
//! All operations are pure functions of immutable values and safe to use
//! from multiple threads.

pub mod extrapolate;
pub mod genericity;
pub mod io;
pub mod linalg;
pub mod lines;
pub mod magnitude;
pub mod space;

pub use extrapolate::{ExtrapolationConfig, ExtrapolationError, LimitEstimate};
pub use genericity::{
    block_det_identity_check, certify_line, f_polynomial_eval, leading_coefficient_probe,
    witness_space, GenericityCertificate, GenericityError, Verdict,
};
pub use lines::{
    canonical_block_matrix, iso_group, line_limit_magnitude, line_space, lines_equivalent,
    BlockPartition, CanonicalForm, LineError, LineSpec,
};
pub use magnitude::{
    join_magnitude_closed_form, kn_magnitude_closed_form, magnitude, magnitude_function,
    similarity_matrix, wedge_magnitude_closed_form, MagnitudeError, MagnitudeResult,
    SimilarityMatrix, WeightingStatus,
};
pub use space::{
    complete_graph, join, one_point, random_space, wedge, FiniteMetricSpace, SpaceError,
};
