//! Presentation rounding. Computation always runs at full precision; values
//! are rounded only when printed.

/// Rounds to 2 decimals, halves away from zero.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Formats with exactly 2 decimals after [`round2`].
pub fn fmt2(x: f64) -> String {
    format!("{:.2}", round2(x))
}
