//! S¹-valued maps: the smoothed vortex profile, the competitor of a surface,
//! slab and planar vortices, and a few auxiliary test fields.

use crate::discrete::Lattice;
use crate::error::{Error, Result};
use crate::geom::{Frame, SurfaceSpec, TubeChart};
use num_complex::Complex64;
use std::f64::consts::PI;

/// A map from R^n to C, unit-valued for the S¹ fields.
pub trait Field: Sync {
    fn dim(&self) -> usize;

    /// `None` on the singular set.
    fn eval(&self, x: &[f64]) -> Option<Complex64>;

    /// Charts of the singular set, used for importance sampling and cell exclusion.
    fn singular_charts(&self) -> Vec<TubeChart> {
        Vec::new()
    }

    /// Tube radius of the underlying surface, for fields built from one.
    fn tube_radius(&self) -> Option<f64> {
        None
    }

    /// Distance to the singular set, if the field has one.
    fn singular_distance(&self, x: &[f64]) -> Option<f64> {
        self.singular_charts()
            .iter()
            .map(|c| c.distance_to_core(x))
            .reduce(f64::min)
    }
}

/// Quintic smoothstep from 0 on t ≤ -½ to 2π on t ≥ ½.
pub fn theta(t: f64) -> f64 {
    let x = (t + 0.5).clamp(0.0, 1.0);
    2.0 * PI * x * x * x * (10.0 + x * (6.0 * x - 15.0))
}

/// The model vortex on the unit square: p/|p| in the core, a θ(p₂) phase
/// band on the right edge, 1 elsewhere near the boundary.
pub fn vortex_profile(p: [f64; 2]) -> Result<Complex64> {
    let (a, b) = (p[0], p[1]);
    if a == 0.0 && b == 0.0 {
        return Err(Error::SingularPoint);
    }
    let m = a.abs().max(b.abs());
    if m <= 0.5 {
        let r = a.hypot(b);
        return Ok(Complex64::new(a / r, b / r));
    }
    if a >= 0.75 {
        return Ok(Complex64::from_polar(1.0, theta(b)));
    }
    if m >= 0.75 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let psi = b.atan2(a);
    let outer = if a >= m {
        theta(0.75 * b / m)
    } else if psi > 0.0 {
        2.0 * PI
    } else {
        0.0
    };
    let lambda = (m - 0.5) / 0.25;
    Ok(Complex64::from_polar(1.0, (1.0 - lambda) * psi + lambda * outer))
}

fn component_value(chart: &TubeChart, x: &[f64]) -> Option<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let Some((sigma, p)) = chart.fiber_coords(x) else { return Some(one) };
    let d = chart.delta0;
    if !chart.in_base(&sigma) {
        return Some(one);
    }
    if p[0].abs() <= d && p[1].abs() <= d {
        return vortex_profile([p[0] / d, p[1] / d]).ok();
    }
    if p[0] > d && p[1].abs() <= d {
        return Some(Complex64::from_polar(1.0, theta(p[1] / d)));
    }
    Some(one)
}

/// Unit-normalized complex product Π u_{Σ_i}(x)^{d_i}.
pub fn competitor_eval(spec: &SurfaceSpec, x: &[f64]) -> Result<Complex64> {
    let charts = TubeChart::all(spec)?;
    competitor_with_charts(&charts, x).ok_or(Error::SingularPoint)
}

fn competitor_with_charts(charts: &[TubeChart], x: &[f64]) -> Option<Complex64> {
    let mut z = Complex64::new(1.0, 0.0);
    for c in charts {
        z *= component_value(c, x)?.powu(c.multiplicity);
    }
    Some(z / z.norm())
}

/// φ_d(p/|p|) with p the last two coordinates.
pub fn slab_vortex_eval(d: i32, x: &[f64]) -> Result<Complex64> {
    let n = x.len();
    if n < 2 {
        return Err(Error::InvalidInput("slab vortex needs n ≥ 2".into()));
    }
    let (a, b) = (x[n - 2], x[n - 1]);
    let r = a.hypot(b);
    if r == 0.0 {
        return Err(Error::SingularPoint);
    }
    Ok(Complex64::new(a / r, b / r).powi(d))
}

/// (x, 1)/√(1+x²): the trace of the planar vortex on the line {y = 1}.
pub fn line_trace(x: f64) -> Complex64 {
    let r = x.hypot(1.0);
    Complex64::new(x / r, 1.0 / r)
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticField {
    Competitor { spec: SurfaceSpec, charts: Vec<TubeChart> },
    SlabVortex { n: usize, d: i32, base: Option<(Vec<f64>, Vec<f64>)> },
    PlanarVortex { center: [f64; 2], d: i32 },
    LineTrace,
    Gaussian { n: usize, scale: f64 },
    Constant { n: usize, value: Complex64 },
    Power { inner: Box<AnalyticField>, d: i32 },
    /// x ↦ inner(Rᵀ(x - shift)/λ).
    Transformed { inner: Box<AnalyticField>, lambda: f64, rotation: Option<Frame>, shift: Vec<f64> },
}

impl AnalyticField {
    pub fn competitor(spec: &SurfaceSpec) -> Result<AnalyticField> {
        spec.validate()?;
        Ok(AnalyticField::Competitor { spec: spec.clone(), charts: TubeChart::all(spec)? })
    }

    pub fn slab_vortex(n: usize, d: i32) -> AnalyticField {
        AnalyticField::SlabVortex { n, d, base: None }
    }

    pub fn planar_vortex(center: [f64; 2]) -> AnalyticField {
        AnalyticField::PlanarVortex { center, d: 1 }
    }

    pub fn power(self, d: i32) -> AnalyticField {
        AnalyticField::Power { inner: Box::new(self), d }
    }

    pub fn scaled(self, lambda: f64) -> AnalyticField {
        let n = self.dim();
        AnalyticField::Transformed { inner: Box::new(self), lambda, rotation: None, shift: vec![0.0; n] }
    }

    pub fn rotated(self, frame: Frame) -> AnalyticField {
        let n = self.dim();
        AnalyticField::Transformed { inner: Box::new(self), lambda: 1.0, rotation: Some(frame), shift: vec![0.0; n] }
    }

    fn pull_back(lambda: f64, rotation: &Option<Frame>, shift: &[f64], x: &[f64]) -> Vec<f64> {
        let y: Vec<f64> = x.iter().zip(shift).map(|(a, b)| a - b).collect();
        let y = match rotation {
            Some(f) => f.coords(&y),
            None => y,
        };
        y.into_iter().map(|v| v / lambda).collect()
    }
}

impl Field for AnalyticField {
    fn dim(&self) -> usize {
        match self {
            AnalyticField::Competitor { spec, .. } => spec.ambient_dim,
            AnalyticField::SlabVortex { n, .. } => *n,
            AnalyticField::PlanarVortex { .. } => 2,
            AnalyticField::LineTrace => 1,
            AnalyticField::Gaussian { n, .. } | AnalyticField::Constant { n, .. } => *n,
            AnalyticField::Power { inner, .. } | AnalyticField::Transformed { inner, .. } => inner.dim(),
        }
    }

    fn eval(&self, x: &[f64]) -> Option<Complex64> {
        match self {
            AnalyticField::Competitor { charts, .. } => competitor_with_charts(charts, x),
            AnalyticField::SlabVortex { d, .. } => slab_vortex_eval(*d, x).ok(),
            AnalyticField::PlanarVortex { center, d } => {
                let (a, b) = (x[0] - center[0], x[1] - center[1]);
                let r = a.hypot(b);
                (r > 0.0).then(|| Complex64::new(a / r, b / r).powi(*d))
            }
            AnalyticField::LineTrace => Some(line_trace(x[0])),
            AnalyticField::Gaussian { scale, .. } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                Some(Complex64::new((-0.5 * r2 / (scale * scale)).exp(), 0.0))
            }
            AnalyticField::Constant { value, .. } => Some(*value),
            AnalyticField::Power { inner, d } => inner.eval(x).map(|z| z.powi(*d)),
            AnalyticField::Transformed { inner, lambda, rotation, shift } => {
                inner.eval(&Self::pull_back(*lambda, rotation, shift, x))
            }
        }
    }

    fn singular_charts(&self) -> Vec<TubeChart> {
        match self {
            AnalyticField::Competitor { charts, .. } => charts.clone(),
            AnalyticField::SlabVortex { n, base, .. } => {
                let (lo, hi) = base.clone().unwrap_or((vec![-1e6; n - 2], vec![1e6; n - 2]));
                let spec = SurfaceSpec {
                    ambient_dim: *n,
                    components: vec![crate::geom::Component::slab(lo, hi, 1.0, 1)],
                    tube_radius: 1.0,
                };
                TubeChart::all(&spec).unwrap_or_default()
            }
            AnalyticField::PlanarVortex { center, .. } => {
                let spec = SurfaceSpec {
                    ambient_dim: 2,
                    components: vec![crate::geom::Component::point(*center, 1)],
                    tube_radius: 1.0,
                };
                TubeChart::all(&spec).unwrap_or_default()
            }
            AnalyticField::Power { inner, .. } => inner.singular_charts(),
            _ => Vec::new(),
        }
    }

    fn tube_radius(&self) -> Option<f64> {
        match self {
            AnalyticField::Competitor { spec, .. } => Some(spec.tube_radius),
            AnalyticField::Power { inner, .. } => inner.tube_radius(),
            AnalyticField::Transformed { inner, lambda, .. } => inner.tube_radius().map(|t| t * lambda),
            _ => None,
        }
    }

    fn singular_distance(&self, x: &[f64]) -> Option<f64> {
        match self {
            AnalyticField::SlabVortex { n, .. } => Some(x[n - 2].hypot(x[n - 1])),
            AnalyticField::Power { inner, .. } => inner.singular_distance(x),
            AnalyticField::Transformed { inner, lambda, rotation, shift } => inner
                .singular_distance(&Self::pull_back(*lambda, rotation, shift, x))
                .map(|d| d * lambda),
            _ => self.singular_charts().iter().map(|c| c.distance_to_core(x)).reduce(f64::min),
        }
    }
}

/// Closure-backed field.
pub struct FnField<F: Fn(&[f64]) -> Option<Complex64> + Sync> {
    pub n: usize,
    pub f: F,
}

impl<F: Fn(&[f64]) -> Option<Complex64> + Sync> Field for FnField<F> {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &[f64]) -> Option<Complex64> {
        (self.f)(x)
    }
}

/// Phases on lattice sites.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeField {
    pub phases: Vec<f64>,
}

impl LatticeField {
    pub fn constant(sites: usize, phase: f64) -> LatticeField {
        LatticeField { phases: vec![phase; sites] }
    }

    pub fn value(&self, i: usize) -> Complex64 {
        Complex64::from_polar(1.0, self.phases[i])
    }
}

/// Phases of the field at every lattice site.
pub fn sample_to_lattice<F: Field + ?Sized>(field: &F, lattice: &Lattice) -> Result<LatticeField> {
    let phases = lattice
        .sites()
        .iter()
        .map(|x| match field.eval(x) {
            Some(z) if z.norm() > 0.0 => Ok(z.arg()),
            _ => Err(Error::InvalidInput("lattice site on the singular set: resample offset z".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LatticeField { phases })
}
