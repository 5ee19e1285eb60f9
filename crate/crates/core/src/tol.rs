//! Global tolerances.

/// Feasibility and membership slack.
pub const FEAS: f64 = 1e-9;
/// Objective comparison slack.
pub const OBJ: f64 = 1e-8;
/// Margin required before a strict inequality counts as satisfied.
pub const STRICT: f64 = 1e-7;
/// Pivot threshold inside the simplex solver.
pub const PIVOT: f64 = 1e-11;

/// `lhs < rhs` with the strict margin.
pub fn strictly_less(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs - STRICT
}
