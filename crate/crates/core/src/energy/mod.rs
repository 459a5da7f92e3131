//! Fractional seminorms and energies, closed-form constants and the
//! one-dimensional reductions of the planar vortex.

mod crofton;
mod fourier;
mod grid;
mod mc;
mod oscillation;
mod slab;
mod vortex;

pub use crofton::{crofton_beta, crofton_check, CroftonCurve, CroftonResult};
pub use fourier::{
    fourier_const, fourier_const_exact, gaussian_outer_energy, grassmann_factor, slicing_const, FourierConst,
    SlicingConst,
};
pub use grid::{near_field_moments, seminorm_grid, seminorm_grid_with, GridEstimate, GridOptions};
pub use mc::{energy_e, seminorm_mc, seminorm_mc_with, McOptions, PairDomain};
pub use oscillation::{oscillation_diagnostic, OscillationRow};
pub use slab::{slab_vortex_energy, slab_vortex_total_reduced, SlabEnergy, SlabMethod};
pub use vortex::{
    appendix_integral, line_gradient_energy, line_seminorm, line_seminorm_density, vortex_limit_1d, VortexLimit,
};

use crate::special::omega;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Grid,
    MonteCarlo,
    Sliced1d,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Grid => "grid",
            Method::MonteCarlo => "montecarlo",
            Method::Sliced1d => "sliced1d",
        }
    }
}

/// Value of a seminorm or energy with its error estimate and method metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub value: f64,
    pub std_error: f64,
    pub method: Method,
    pub grid_h: Option<f64>,
    pub samples: Option<usize>,
    pub r_cut: Option<f64>,
    pub truncation: Option<f64>,
    pub rejections: usize,
    pub warning: bool,
}

impl EnergyEstimate {
    pub fn new(value: f64, std_error: f64, method: Method) -> EnergyEstimate {
        EnergyEstimate {
            value,
            std_error,
            method,
            grid_h: None,
            samples: None,
            r_cut: None,
            truncation: None,
            rejections: 0,
            warning: false,
        }
    }

    pub fn scaled(&self, c: f64) -> EnergyEstimate {
        EnergyEstimate { value: self.value * c, std_error: self.std_error * c.abs(), ..self.clone() }
    }
}

/// s ∈ (0,1) with α = (1+s)/2 in ambient dimension n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracParams {
    pub s: f64,
    pub n: usize,
}

impl FracParams {
    pub fn new(s: f64, n: usize) -> crate::error::Result<FracParams> {
        if !(s > 0.0 && s < 1.0) {
            return Err(crate::error::Error::InvalidInput("s must lie in (0,1)".into()));
        }
        Ok(FracParams { s, n })
    }

    pub fn alpha(&self) -> f64 {
        0.5 * (1.0 + self.s)
    }

    pub fn rescale(&self) -> f64 {
        (1.0 - self.s) * (1.0 - self.s)
    }
}

/// (1-s)² times the estimate.
pub fn rescaled_mass(est: &EnergyEstimate, s: f64) -> f64 {
    (1.0 - s) * (1.0 - s) * est.value
}

/// (2π ω_{n-1}/n) Σ d_i |Σ_i|.
pub fn limit_constant(n: usize, weights: &[(f64, f64)]) -> f64 {
    let c = 2.0 * std::f64::consts::PI * omega(n) / n as f64;
    c * weights.iter().map(|(d, m)| d * m).sum::<f64>()
}

/// 4|Ω| ω_{n-1} R^{-2α}/(2α): bound on the pair energy beyond distance R.
pub fn tail_bound(n: usize, volume: f64, alpha: f64, r_cut: f64) -> f64 {
    4.0 * volume * omega(n) * r_cut.powf(-2.0 * alpha) / (2.0 * alpha)
}
