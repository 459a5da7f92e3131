use super::mc::{seminorm_mc_with, McOptions, PairDomain};
use super::EnergyEstimate;
use crate::error::{Error, Result};
use crate::fields::AnalyticField;
use crate::geom::{Component, Region, SurfaceSpec, TubeChart};
use crate::quad::integrate_rel;
use crate::special::gamma_ratio;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum SlabMethod {
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlabEnergy {
    pub n: usize,
    pub d: i32,
    pub s: f64,
    pub delta: f64,
    /// Pairs inside F = E × (-δ,δ)².
    pub inner: EnergyEstimate,
    /// ∬_{F×Fᶜ}, one-sided.
    pub cross: EnergyEstimate,
}

impl SlabEnergy {
    pub fn rescaled_inner(&self) -> f64 {
        (1.0 - self.s).powi(2) * self.inner.value
    }

    pub fn rescaled_cross(&self) -> f64 {
        (1.0 - self.s).powi(2) * self.cross.value
    }
}

fn slab_region(lo: &[f64], hi: &[f64], delta: f64) -> Region {
    let mut l = lo.to_vec();
    let mut h = hi.to_vec();
    l.extend([-delta, -delta]);
    h.extend([delta, delta]);
    Region::Box { lo: l, hi: h }
}

/// Inner and cross energies of φ_d∘u_⋆ on E × (-δ,δ)².
pub fn slab_vortex_energy(
    lo: &[f64],
    hi: &[f64],
    delta: f64,
    d: i32,
    s: f64,
    method: &SlabMethod,
) -> Result<SlabEnergy> {
    let n = lo.len() + 2;
    if n < 3 {
        return Err(Error::InvalidInput("slab vortex needs n ≥ 3".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput("δ must lie in (0,1)".into()));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidInput("s must lie in (0,1)".into()));
    }
    let alpha = 0.5 * (1.0 + s);
    let field = AnalyticField::SlabVortex { n, d, base: Some((lo.to_vec(), hi.to_vec())) };
    let domain = slab_region(lo, hi, delta);
    let spec = SurfaceSpec { ambient_dim: n, components: vec![Component::slab(lo.to_vec(), hi.to_vec(), delta, 1)], tube_radius: delta };
    let charts = TubeChart::all(&spec)?;
    let SlabMethod::MonteCarlo { samples, seed } = method;
    let base = McOptions {
        samples: *samples,
        seed: *seed,
        charts: Some(charts),
        rho_max: Some(delta),
        ..McOptions::default()
    };
    let inner = seminorm_mc_with(&field, &domain, alpha, &McOptions { pairs: PairDomain::Inner, ..base.clone() })?;
    let mut cross = seminorm_mc_with(
        &field,
        &domain,
        alpha,
        &McOptions { pairs: PairDomain::Cross, seed: seed.wrapping_add(1), ..base },
    )?;
    cross.std_error += cross.truncation.unwrap_or(0.0);
    Ok(SlabEnergy { n, d, s, delta, inner, cross })
}

/// g(ρ) = ∫₀^{2π} |φ_d(e₁) - φ_d(e₁ + ρe^{iψ})|² dψ.
fn ring_gap(rho: f64, d: i32) -> Result<f64> {
    let f = |psi: f64| {
        let (x, y) = (1.0 + rho * psi.cos(), rho * psi.sin());
        let a = y.atan2(x) * d as f64;
        let h = (0.5 * a).sin();
        4.0 * h * h
    };
    if (rho - 1.0).abs() < 1e-12 {
        return integrate_rel(f, 0.0, 2.0 * PI, 1e-10);
    }
    Ok(integrate_rel(f, 0.0, PI, 1e-10)? + integrate_rel(f, PI, 2.0 * PI, 1e-10)?)
}

/// ∫_F ∫_{Rⁿ} |u(x)-u(y)|²/|x-y|^{n+1+s} for the slab vortex, reduced to one dimension:
/// |E| · A · ∫ρ^{-2-s} g(ρ) dρ · ∫_{(-δ,δ)²} |p|^{-1-s} dp. Equals inner + cross.
pub fn slab_vortex_total_reduced(n: usize, d: i32, s: f64, delta: f64, e_measure: f64) -> Result<f64> {
    if n < 3 || !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidInput("need n ≥ 3 and s ∈ (0,1)".into()));
    }
    let m = (n - 2) as f64;
    let a = PI.powf(0.5 * m) * gamma_ratio(0.5 * (3.0 + s), 0.5 * (n as f64 + 1.0 + s));
    let e = 1.0 - s;
    let mut err = None;
    let mut g = |rho: f64| match ring_gap(rho, d) {
        Ok(v) => v,
        Err(x) => {
            err.get_or_insert(x);
            0.0
        }
    };
    // ρ^{-s} dρ = dw/(1-s) with ρ = w^{1/(1-s)}
    let small = integrate_rel(
        |w| {
            let rho = w.powf(1.0 / e);
            if rho < 1e-6 {
                return PI * (d * d) as f64 / e;
            }
            g(rho) / (rho * rho) / e
        },
        0.0,
        0.5f64.powf(e),
        1e-9,
    )?;
    let mid = integrate_rel(|r| g(r) * r.powf(-2.0 - s), 0.5, 1.0, 1e-9)?
        + integrate_rel(|r| g(r) * r.powf(-2.0 - s), 1.0, 2.0, 1e-9)?;
    let large = integrate_rel(
        |v| {
            if v <= 0.0 {
                return 0.0;
            }
            let rho = 2.0 / v;
            g(rho) * rho.powf(-2.0 - s) * 2.0 / (v * v)
        },
        0.0,
        1.0,
        1e-9,
    )?;
    if let Some(x) = err {
        return Err(x);
    }
    let radial = small + mid + large;
    let angular = integrate_rel(|t| t.cos().powf(s - 1.0), 0.0, PI / 4.0, 1e-12)?;
    let fiber = 8.0 * delta.powf(e) / e * angular;
    Ok(e_measure * a * radial * fiber)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_gap_small_radius() {
        // g(ρ) ≈ π d² ρ² for small ρ
        for d in [1, 2] {
            let rho = 1e-3;
            let g = ring_gap(rho, d).unwrap();
            let want = PI * (d * d) as f64 * rho * rho;
            assert!((g - want).abs() < 1e-3 * want, "{g} vs {want}");
        }
    }
}
