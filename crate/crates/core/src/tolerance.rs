//! Floating-point comparison discipline shared by all checks.

/// Relative tolerance used when nothing more specific is requested.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// `|a - b| ≤ tol · max(|a|, |b|)`; equal values always pass.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// `|a - b| ≤ tol · scale`, for sums whose terms may cancel.
pub fn scaled_close(a: f64, b: f64, tol: f64, scale: f64) -> bool {
    a == b || (a - b).abs() <= tol * scale
}

/// Relative deviation `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_deviation(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}
