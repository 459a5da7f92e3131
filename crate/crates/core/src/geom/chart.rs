use super::surface::plane_basis;
use super::{ComponentKind, SurfaceSpec};
use crate::error::{Error, Result};
use crate::linkdeg::LoopSample;
use rand::Rng;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Circle { c: [f64; 3], r: f64, nu: [f64; 3], e1: [f64; 3], e2: [f64; 3] },
    Point { c: [f64; 2] },
    Slab { lo: Vec<f64>, hi: Vec<f64> },
}

/// Fiber frames at a base point.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartFrames {
    pub tangent: Option<Vec<f64>>,
    pub n_sigma: Vec<f64>,
    pub n_m: Vec<f64>,
}

/// Tubular chart Φ(σ, p) = curve(σ) + p₁ n_Σ(σ) + p₂ n_M(σ) of one component.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeChart {
    kind: Kind,
    pub delta0: f64,
    pub multiplicity: u32,
    pub n: usize,
}

impl TubeChart {
    pub fn new(spec: &SurfaceSpec, index: usize) -> Result<TubeChart> {
        let comp = spec
            .components
            .get(index)
            .ok_or_else(|| Error::InvalidInput(format!("no component {index}")))?;
        let kind = match &comp.kind {
            ComponentKind::Circle3D { center, radius, normal } => {
                let (e1, e2) = plane_basis(normal);
                Kind::Circle { c: *center, r: *radius, nu: *normal, e1, e2 }
            }
            ComponentKind::PointVortex2D { center } => Kind::Point { c: *center },
            ComponentKind::Slab { lo, hi, .. } => Kind::Slab { lo: lo.clone(), hi: hi.clone() },
        };
        Ok(TubeChart { kind, delta0: spec.tube_radius, multiplicity: comp.multiplicity, n: spec.ambient_dim })
    }

    pub fn all(spec: &SurfaceSpec) -> Result<Vec<TubeChart>> {
        (0..spec.components.len()).map(|i| TubeChart::new(spec, i)).collect()
    }

    pub fn base_dim(&self) -> usize {
        self.n - 2
    }

    /// Length of the σ-range for circles.
    pub fn period(&self) -> Option<f64> {
        match &self.kind {
            Kind::Circle { r, .. } => Some(2.0 * PI * r),
            _ => None,
        }
    }

    pub fn measure(&self) -> f64 {
        match &self.kind {
            Kind::Circle { r, .. } => 2.0 * PI * r,
            Kind::Point { .. } => 1.0,
            Kind::Slab { lo, hi } => lo.iter().zip(hi).map(|(a, b)| b - a).product(),
        }
    }

    pub fn curve(&self, sigma: &[f64]) -> Vec<f64> {
        match &self.kind {
            Kind::Circle { c, r, e1, e2, .. } => {
                let phi = sigma[0] / r;
                (0..3).map(|k| c[k] + r * (phi.cos() * e1[k] + phi.sin() * e2[k])).collect()
            }
            Kind::Point { c } => c.to_vec(),
            Kind::Slab { .. } => {
                let mut x = sigma.to_vec();
                x.extend([0.0, 0.0]);
                x
            }
        }
    }

    pub fn frames(&self, sigma: &[f64]) -> ChartFrames {
        match &self.kind {
            Kind::Circle { r, nu, e1, e2, .. } => {
                let phi = sigma[0] / r;
                let radial: Vec<f64> = (0..3).map(|k| phi.cos() * e1[k] + phi.sin() * e2[k]).collect();
                let tangent: Vec<f64> = (0..3).map(|k| -phi.sin() * e1[k] + phi.cos() * e2[k]).collect();
                ChartFrames {
                    tangent: Some(tangent),
                    n_sigma: radial.iter().map(|v| -v).collect(),
                    n_m: nu.to_vec(),
                }
            }
            Kind::Point { .. } => ChartFrames { tangent: None, n_sigma: vec![1.0, 0.0], n_m: vec![0.0, 1.0] },
            Kind::Slab { .. } => {
                let n = self.n;
                let mut a = vec![0.0; n];
                let mut b = vec![0.0; n];
                a[n - 2] = 1.0;
                b[n - 1] = 1.0;
                ChartFrames { tangent: None, n_sigma: a, n_m: b }
            }
        }
    }

    /// Φ(σ, p) without the tube restriction.
    pub fn eval_unchecked(&self, sigma: &[f64], p: [f64; 2]) -> Vec<f64> {
        let base = self.curve(sigma);
        let fr = self.frames(sigma);
        (0..self.n).map(|k| base[k] + p[0] * fr.n_sigma[k] + p[1] * fr.n_m[k]).collect()
    }

    pub fn eval(&self, sigma: &[f64], p: [f64; 2]) -> Result<Vec<f64>> {
        let lim = self.delta0 * (1.0 + 1e-12);
        if p[0].abs() > lim || p[1].abs() > lim {
            return Err(Error::OutsideTube);
        }
        Ok(self.eval_unchecked(sigma, p))
    }

    /// Fiber coordinates of x relative to the whole normal bundle.
    pub fn fiber_coords(&self, x: &[f64]) -> Option<(Vec<f64>, [f64; 2])> {
        match &self.kind {
            Kind::Circle { c, r, nu, e1, e2 } => {
                let w = [x[0] - c[0], x[1] - c[1], x[2] - c[2]];
                let z = w[0] * nu[0] + w[1] * nu[1] + w[2] * nu[2];
                let a = w[0] * e1[0] + w[1] * e1[1] + w[2] * e1[2];
                let b = w[0] * e2[0] + w[1] * e2[1] + w[2] * e2[2];
                let rho = a.hypot(b);
                if rho == 0.0 {
                    return None;
                }
                let mut phi = b.atan2(a);
                if phi < 0.0 {
                    phi += 2.0 * PI;
                }
                Some((vec![r * phi], [r - rho, z]))
            }
            Kind::Point { c } => Some((vec![], [x[0] - c[0], x[1] - c[1]])),
            Kind::Slab { .. } => {
                let n = self.n;
                Some((x[..n - 2].to_vec(), [x[n - 2], x[n - 1]]))
            }
        }
    }

    pub fn in_base(&self, sigma: &[f64]) -> bool {
        match &self.kind {
            Kind::Slab { lo, hi } => sigma.iter().zip(lo.iter().zip(hi)).all(|(s, (a, b))| s >= a && s <= b),
            _ => true,
        }
    }

    /// Inverse chart; `None` means outside the tube.
    pub fn inverse(&self, x: &[f64]) -> Option<(Vec<f64>, [f64; 2])> {
        let (sigma, p) = self.fiber_coords(x)?;
        if p[0].abs() <= self.delta0 && p[1].abs() <= self.delta0 && self.in_base(&sigma) {
            Some((sigma, p))
        } else {
            None
        }
    }

    /// Volume factor of Φ at fiber point p.
    pub fn jacobian(&self, p: [f64; 2]) -> f64 {
        match &self.kind {
            Kind::Circle { r, .. } => (r - p[0]) / r,
            _ => 1.0,
        }
    }

    /// Euclidean distance from x to the component.
    pub fn distance_to_core(&self, x: &[f64]) -> f64 {
        match &self.kind {
            Kind::Slab { lo, hi } => {
                let n = self.n;
                let mut d2 = x[n - 2] * x[n - 2] + x[n - 1] * x[n - 1];
                for k in 0..n - 2 {
                    let e = (lo[k] - x[k]).max(0.0).max(x[k] - hi[k]);
                    d2 += e * e;
                }
                d2.sqrt()
            }
            Kind::Circle { c, r, nu, .. } => match self.fiber_coords(x) {
                Some((_, p)) => p[0].hypot(p[1]),
                None => {
                    let z = (0..3).map(|k| (x[k] - c[k]) * nu[k]).sum::<f64>();
                    r.hypot(z)
                }
            },
            Kind::Point { c } => (x[0] - c[0]).hypot(x[1] - c[1]),
        }
    }

    /// Uniform base point on the component.
    pub fn sample_base<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match &self.kind {
            Kind::Circle { r, .. } => vec![2.0 * PI * r * rng.random::<f64>()],
            Kind::Point { .. } => vec![],
            Kind::Slab { lo, hi } => lo.iter().zip(hi).map(|(a, b)| a + (b - a) * rng.random::<f64>()).collect(),
        }
    }

    pub fn is_circle(&self) -> bool {
        matches!(self.kind, Kind::Circle { .. })
    }

    pub fn circle_data(&self) -> Option<([f64; 3], f64, [f64; 3])> {
        match &self.kind {
            Kind::Circle { c, r, nu, .. } => Some((*c, *r, *nu)),
            _ => None,
        }
    }

    pub fn point_center(&self) -> Option<[f64; 2]> {
        match &self.kind {
            Kind::Point { c } => Some(*c),
            _ => None,
        }
    }

    pub fn slab_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match &self.kind {
            Kind::Slab { lo, hi } => Some((lo.clone(), hi.clone())),
            _ => None,
        }
    }
}

/// Closed polyline Φ(σ, ∂[-ℓ,ℓ]²), counterclockwise in the fiber, N points per side.
pub fn meridian_loop(chart: &TubeChart, sigma: &[f64], ell: f64, per_side: usize) -> Result<LoopSample> {
    if !(ell > 0.0) || ell > chart.delta0 * (1.0 + 1e-12) {
        return Err(Error::InvalidInput("meridian half-width must lie in (0, δ₀]".into()));
    }
    if per_side < 2 {
        return Err(Error::InvalidInput("need at least 2 points per side".into()));
    }
    let corners = [[ell, -ell], [ell, ell], [-ell, ell], [-ell, -ell]];
    let mut pts = Vec::with_capacity(4 * per_side * chart.n);
    for s in 0..4 {
        let (a, b) = (corners[s], corners[(s + 1) % 4]);
        for j in 0..per_side {
            let t = j as f64 / per_side as f64;
            let p = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            pts.extend(chart.eval_unchecked(sigma, p));
        }
    }
    Ok(LoopSample::from_flat(chart.n, pts))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_chart(delta0: f64) -> TubeChart {
        TubeChart::new(&SurfaceSpec::single_circle(1.0, 1, delta0), 0).unwrap()
    }

    #[test]
    fn on_curve_point() {
        let ch = unit_chart(0.2);
        let x = ch.eval(&[0.0], [0.0, 0.0]).unwrap();
        assert!((super::super::norm(&x) - 1.0).abs() < 1e-14);
        assert!(x[2].abs() < 1e-14);
    }

    #[test]
    fn inward_convention() {
        let ch = unit_chart(0.2);
        let x = ch.eval(&[0.0], [0.1, 0.0]).unwrap();
        assert!((super::super::norm(&x) - 0.9).abs() < 1e-14);
    }

    #[test]
    fn outside_tube_rejected() {
        let ch = unit_chart(0.2);
        assert_eq!(ch.eval(&[0.0], [0.3, 0.0]), Err(Error::OutsideTube));
        assert!(ch.inverse(&[0.0, 0.0, 0.0]).is_none());
    }

    #[test]
    fn meridian_perimeter() {
        let ch = unit_chart(0.2);
        let lp = meridian_loop(&ch, &[1.0], 0.1, 64).unwrap();
        assert!((lp.perimeter() - 0.8).abs() < 1e-12);
    }
}
