//! Error functions used by the similarity solution.
//!
//! Thin wrappers around `libm` so every caller in the crate goes through one
//! place whose accuracy is pinned by a high-precision reference table in the
//! test suite (1e-14 absolute on [0, 6]).

/// Error function erf(x).
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function erfc(x) = 1 - erf(x), accurate for large x.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}
