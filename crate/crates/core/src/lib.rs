//! Exact computations with tight spans of finite distance spaces.
//!
//! * [`exactnum`]: rationals, an exact simplex solver and vertex enumeration.
//! * [`distance`]: distance spaces, metric and four-point checks with certificates.
//! * [`tightspan`]: membership in `P_d` and `T_d`, retractions, geodesics and gate points.
//! * [`domination`]: dominating metrics, pinning and minimal dominating metrics.
//! * [`realtree`]: weighted trees, subtree representations and additive reconstruction.
//! * [`diversity`]: diversities, their induced distance `D_δ` and tight-span tests.

#![allow(clippy::result_large_err, clippy::needless_range_loop)]

pub mod distance;
pub mod diversity;
pub mod domination;
pub mod exactnum;
pub mod random;
pub mod realtree;
pub mod tightspan;

pub use exactnum::Rational;
