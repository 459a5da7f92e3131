use crate::error::{Error, Result};
use crate::quad::{integrate_real_line, integrate_rel, integrate_with_error};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// ∫_R dx/(1+x²)².
pub fn appendix_integral(tol: f64) -> Result<f64> {
    integrate_real_line(|x| 1.0 / ((1.0 + x * x) * (1.0 + x * x)), tol)
}

/// ∫_R |u₁'|² for u₁(x) = (x,1)/√(1+x²); equal to the appendix integral.
pub fn line_gradient_energy(tol: f64) -> Result<f64> {
    integrate_real_line(
        |x| {
            let d = 1.0 + x * x;
            1.0 / (d * d)
        },
        tol,
    )
}

/// G(b) = ∫_{-b}^{b} |u₁(b) - u₁(y)|² / |b - y|^{2+s} dy, so that
/// [u₁]²_{(-a,a)} = 4 ∫₀^a G(b) db.
pub fn line_seminorm_density(b: f64, s: f64, rel: f64) -> Result<f64> {
    if b <= 0.0 {
        return Ok(0.0);
    }
    let top = 2.0 * b;
    let t0 = top.min(0.5);
    let g = |t: f64| {
        // |u₁(b) - u₁(b - t)|² / t², with the angle taken without cancellation
        let h = (0.5 * t.atan2(b * (b - t) + 1.0)).sin() / t;
        4.0 * h * h
    };
    let d = 1.0 + b * b;
    let g0 = 1.0 / (d * d);
    // subtract the t → 0 limit of g and integrate it against t^{-s} exactly
    let e = 1.0 - s;
    let exact = g0 * t0.powf(e) / e;
    // t = t₀u³ turns the t^{1-s} endpoint behaviour into u^{5-3s}
    let mut diff = |u: f64| {
        let t = t0 * u * u * u;
        if t <= 0.0 {
            0.0
        } else {
            (g(t) - g0) * t.powf(-s) * 3.0 * t0 * u * u
        }
    };
    let near = integrate_with_error(&mut diff, 0.0, 1.0, rel * exact)?.0 + exact;
    let far = if top > t0 {
        integrate_rel(
            |tau| {
                let t = tau.exp();
                g(t) * t.powf(-s) * t
            },
            t0.ln(),
            top.ln(),
            rel,
        )?
    } else {
        0.0
    };
    Ok(near + far)
}

/// [u₁]²_{H^{(1+s)/2}((-T,T))}.
pub fn line_seminorm(s: f64, t: f64, rel: f64) -> Result<f64> {
    check_s(s)?;
    let mut err = None;
    let v = integrate_rel(
        |b| match line_seminorm_density(b, s, 0.1 * rel) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        0.0,
        t,
        rel,
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok(4.0 * v),
    }
}

fn check_s(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidInput("s must lie in (0,1)".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VortexLimit {
    pub s: f64,
    /// (1-s)² [u_⋆]²_{H^{(1+s)/2}(D₁)}.
    pub value: f64,
    /// |value - 2π²|.
    pub gap: f64,
    pub relative_gap: f64,
    /// Difference between the two quadrature tolerances.
    pub error: f64,
    pub truncation: f64,
}

fn vortex_integral(s: f64, split: f64, rel: f64) -> Result<f64> {
    let e = 1.0 - s;
    let mut err = None;
    let mut density = |b: f64| match line_seminorm_density(b, s, 0.1 * rel) {
        Ok(v) => v * (1.0 + b * b).powf(-0.5 * e),
        Err(x) => {
            err.get_or_insert(x);
            0.0
        }
    };
    let head = integrate_rel(&mut density, 0.0, split, rel)?;
    // b = T/v on the tail; the integrand tends to a constant as v → 0
    let tail = integrate_rel(
        |v| {
            if v <= 0.0 {
                return 0.0;
            }
            let b = split / v;
            density(b) * split / (v * v)
        },
        0.0,
        1.0,
        rel,
    )?;
    if let Some(x) = err {
        return Err(x);
    }
    Ok(e * 8.0 * PI * (head + tail))
}

/// (1-s)²[u_⋆]² on the unit disk through the line reduction, with the
/// r-integral exchanged against the half-width b of the slices.
pub fn vortex_limit_1d(s: f64, truncation: f64, rel: f64) -> Result<VortexLimit> {
    check_s(s)?;
    if truncation < 10.0 {
        return Err(Error::InvalidInput("truncation T must be at least 10".into()));
    }
    let coarse = vortex_integral(s, truncation, rel)?;
    let fine = vortex_integral(s, truncation, 0.1 * rel)?;
    let diff = (fine - coarse).abs();
    if diff > 0.01 * fine.abs() {
        return Err(Error::NonConvergent(format!(
            "vortex limit at s = {s}: refinements {coarse} and {fine} differ by more than 1%"
        )));
    }
    let target = 2.0 * PI * PI;
    Ok(VortexLimit {
        s,
        value: fine,
        gap: (fine - target).abs(),
        relative_gap: (fine - target).abs() / target,
        error: diff,
        truncation,
    })
}
