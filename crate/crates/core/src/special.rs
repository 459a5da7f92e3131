//! Gamma-function constants used across the crate.

use statrs::function::gamma::{gamma, ln_gamma};
use std::f64::consts::PI;

/// Surface area of the unit sphere S^{n-1} in R^n.
pub fn omega(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// Volume of the unit ball in R^n.
pub fn ball_volume(n: usize) -> f64 {
    omega(n) / n as f64
}

/// Ratio Γ(a)/Γ(b) computed through log-gamma.
pub fn gamma_ratio(a: f64, b: f64) -> f64 {
    (ln_gamma(a) - ln_gamma(b)).exp()
}

pub fn gamma_fn(x: f64) -> f64 {
    gamma(x)
}
