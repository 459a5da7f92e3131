use super::grid::{seminorm_grid_with, GridOptions};
use crate::error::{Error, Result};
use crate::fields::AnalyticField;
use crate::geom::{sample_frame, Region};
use crate::special::{gamma_fn, omega};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// C_F(n, α) in [u]² = C_F ∫|ξ|^{2α}|Fu|², unitary Fourier transform.
pub fn fourier_const_exact(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    PI.powf(0.5 * nf) * 2f64.powf(1.0 - 2.0 * alpha) * gamma_fn(1.0 - alpha) / (alpha * gamma_fn(alpha + 0.5 * nf))
}

/// ∫|ξ|^{2α}|F g_λ|² for g_λ(x) = exp(-|x|²/(2λ²)).
fn gaussian_denominator(n: usize, alpha: f64, scale: f64) -> f64 {
    let nf = n as f64;
    0.5 * omega(n) * gamma_fn(alpha + 0.5 * nf) * scale.powf(nf - 2.0 * alpha)
}

/// [g]²_{Rⁿ} - [g]²_{B_R} for the unit Gaussian, from the expansion of
/// ∫_{|y|>R} |x - y|^{-n-2α} dy around x = 0 up to fourth order.
///
/// Returns the value and the size of the last term kept.
pub fn gaussian_outer_energy(n: usize, alpha: f64, r: f64) -> (f64, f64) {
    let nf = n as f64;
    let p = nf + 2.0 * alpha;
    let c = omega(n) * PI.powf(0.5 * nf);
    let t0 = c * r.powf(-2.0 * alpha) / alpha;
    let t2 = 0.5 * c * p * r.powf(-2.0 * alpha - 2.0);
    let t4 = c * p * (p + 2.0) * (2.0 * alpha + 2.0) * r.powf(-2.0 * alpha - 4.0) / 16.0;
    (t0 + t2 + t4, t4)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierConst {
    pub n: usize,
    pub alpha: f64,
    pub value: f64,
    pub error: f64,
    pub exact: f64,
    /// Whole-space Gaussian seminorm at the larger truncation.
    pub numerator: f64,
    pub denominator: f64,
    pub truncations: (f64, f64),
    pub h: f64,
    pub scale: f64,
}

/// C_F(n, α) as the ratio of the grid seminorm of a Gaussian of width `scale`
/// to its closed-form Fourier side, on balls of radius 5 and 6 widths.
pub fn fourier_const(n: usize, alpha: f64, h: f64, scale: f64) -> Result<FourierConst> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput("α must lie in (0,1)".into()));
    }
    let field = AnalyticField::Gaussian { n, scale };
    let opts = GridOptions::default();
    let den = gaussian_denominator(n, alpha, scale);
    let unit = scale.powf(n as f64 - 2.0 * alpha);
    let mut rows = Vec::new();
    for l in [5.0, 6.0] {
        let half = l * scale;
        let steps = (half / h).round().max(1.0);
        let hh = half / steps;
        let est = seminorm_grid_with(&field, &Region::ball(vec![0.0; n], half), alpha, hh, &opts)?;
        let (outer, last) = gaussian_outer_energy(n, alpha, l);
        rows.push((l, est.estimate.value, outer * unit, last * unit + est.estimate.std_error, hh));
    }
    let r1 = (rows[0].1 + rows[0].2) / den;
    let r2 = (rows[1].1 + rows[1].2) / den;
    if (r1 - r2).abs() > 0.02 * r2.abs() {
        return Err(Error::Unstable(format!(
            "Fourier constant ratio moved from {r1} to {r2} between truncations"
        )));
    }
    Ok(FourierConst {
        n,
        alpha,
        value: r2,
        error: (r1 - r2).abs() + rows[1].3 / den,
        exact: fourier_const_exact(n, alpha),
        numerator: rows[1].1 + rows[1].2,
        denominator: den,
        truncations: (rows[0].0, rows[1].0),
        h: rows[1].4,
        scale,
    })
}

/// Monte Carlo of ∫_{G(n,k)} |P_L(e₁)|^{2α} dL: (mean, standard error).
pub fn grassmann_factor<R: Rng + ?Sized>(n: usize, k: usize, alpha: f64, samples: usize, rng: &mut R) -> (f64, f64) {
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..samples {
        let f = sample_frame(n, rng);
        let p2: f64 = f.vectors[..k].iter().map(|v| v[0] * v[0]).sum();
        let v = p2.powf(alpha);
        s1 += v;
        s2 += v * v;
    }
    let m = s1 / samples as f64;
    let var = (s2 / samples as f64 - m * m).max(0.0);
    (m, (var / samples as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlicingConst {
    pub n: usize,
    pub k: usize,
    pub alpha: f64,
    pub value: f64,
    pub error: f64,
    pub grassmann: f64,
    pub grassmann_error: f64,
}

/// C(n,k,α) = C_F(n,α)/C_F(k,α) · (∫|P_L e₁|^{2α} dL)^{-1}.
pub fn slicing_const<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    alpha: f64,
    samples: usize,
    rng: &mut R,
) -> Result<SlicingConst> {
    if k == 0 || k >= n {
        return Err(Error::InvalidInput("slicing needs 1 ≤ k ≤ n-1".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput("α must lie in (0,1)".into()));
    }
    let (g, ge) = grassmann_factor(n, k, alpha, samples, rng);
    let ratio = fourier_const_exact(n, alpha) / fourier_const_exact(k, alpha);
    let value = ratio / g;
    Ok(SlicingConst { n, k, alpha, value, error: value * ge / g, grassmann: g, grassmann_error: ge })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_constant_limit() {
        for n in 1..=4 {
            let a = 1.0 - 1e-7;
            let lim = omega(n) / (2.0 * n as f64);
            assert!(((1.0 - a) * fourier_const_exact(n, a) - lim).abs() < 1e-5 * lim);
        }
    }

    #[test]
    fn half_order_in_one_dimension() {
        // C_F(1, ½) = 2π
        assert!((fourier_const_exact(1, 0.5) - 2.0 * PI).abs() < 1e-13);
    }
}
