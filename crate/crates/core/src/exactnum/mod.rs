//! Exact rational arithmetic, linear programming and vertex enumeration.

pub mod linalg;
mod lp;
mod rational;
mod vertices;

use thiserror::Error;

pub use lp::{
    lex_minimize, minimize, solve_lp, solve_lp_with, Constraint, LinearProgram, LpOutcome, PivotRule, Polyhedron,
    Relation,
};
pub use rational::{
    abs, common_denominator, format_rational, frac, half, int, parse_rational, pow2_inv, primitive_integer_vector,
    to_f64, zero, ParseRationalError, Rational, Q,
};
pub use vertices::{enumerate_vertices, enumerate_vertices_with_cap, DEFAULT_RAY_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("the region is empty")]
    Infeasible,
    #[error("coordinate {0} is unbounded below on the region")]
    UnboundedCoordinate(usize),
    #[error("vertex enumeration exceeded the cap of {cap} rays")]
    ResourceLimit { cap: usize },
}

/// Componentwise `a ≤ b`.
pub fn dominated_by(a: &[Rational], b: &[Rational]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Sup-norm distance `max_i |a_i - b_i|`.
pub fn sup_distance(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| abs(&(x - y))).max().unwrap_or_else(zero)
}
