use super::{cross3, dist, dot, norm};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComponentKind {
    Circle3D { center: [f64; 3], radius: f64, normal: [f64; 3] },
    PointVortex2D { center: [f64; 2] },
    Slab { lo: Vec<f64>, hi: Vec<f64>, delta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    #[serde(flatten)]
    pub kind: ComponentKind,
    #[serde(default = "one")]
    pub multiplicity: u32,
}

fn one() -> u32 {
    1
}

impl Component {
    pub fn circle(center: [f64; 3], radius: f64, normal: [f64; 3], multiplicity: u32) -> Component {
        Component { kind: ComponentKind::Circle3D { center, radius, normal }, multiplicity }
    }

    pub fn point(center: [f64; 2], multiplicity: u32) -> Component {
        Component { kind: ComponentKind::PointVortex2D { center }, multiplicity }
    }

    pub fn slab(lo: Vec<f64>, hi: Vec<f64>, delta: f64, multiplicity: u32) -> Component {
        Component { kind: ComponentKind::Slab { lo, hi, delta }, multiplicity }
    }

    /// H^{n-2} measure of the component.
    pub fn measure(&self) -> f64 {
        match &self.kind {
            ComponentKind::Circle3D { radius, .. } => 2.0 * PI * radius,
            ComponentKind::PointVortex2D { .. } => 1.0,
            ComponentKind::Slab { lo, hi, .. } => lo.iter().zip(hi).map(|(a, b)| b - a).product(),
        }
    }

    /// Points on the component used for separation checks.
    fn probe_points(&self) -> Vec<Vec<f64>> {
        match &self.kind {
            ComponentKind::Circle3D { center, radius, normal } => {
                let (e1, e2) = plane_basis(normal);
                (0..720)
                    .map(|k| {
                        let t = 2.0 * PI * k as f64 / 720.0;
                        (0..3).map(|i| center[i] + radius * (t.cos() * e1[i] + t.sin() * e2[i])).collect()
                    })
                    .collect()
            }
            ComponentKind::PointVortex2D { center } => vec![center.to_vec()],
            ComponentKind::Slab { lo, hi, .. } => {
                let m = lo.len();
                let per = 9usize;
                let count = per.pow(m as u32);
                (0..count)
                    .map(|mut idx| {
                        let mut x = Vec::with_capacity(m + 2);
                        for k in 0..m {
                            let j = idx % per;
                            idx /= per;
                            x.push(lo[k] + (hi[k] - lo[k]) * j as f64 / (per - 1) as f64);
                        }
                        x.extend([0.0, 0.0]);
                        x
                    })
                    .collect()
            }
        }
    }
}

/// Orthonormal (e1, e2) spanning the plane orthogonal to the unit normal, with e1 × e2 = normal.
pub fn plane_basis(normal: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let nu = *normal;
    let seed = if nu[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let c = dot(&seed, &nu);
    let mut e1 = [seed[0] - c * nu[0], seed[1] - c * nu[1], seed[2] - c * nu[2]];
    let r = norm(&e1);
    for v in &mut e1 {
        *v /= r;
    }
    let e2 = cross3(&nu, &e1);
    (e1, e2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub ambient_dim: usize,
    pub components: Vec<Component>,
    pub tube_radius: f64,
}

impl SurfaceSpec {
    /// Validates and normalizes circle normals.
    pub fn new(ambient_dim: usize, components: Vec<Component>, tube_radius: f64) -> Result<SurfaceSpec> {
        let mut spec = SurfaceSpec { ambient_dim, components, tube_radius };
        for c in &mut spec.components {
            if let ComponentKind::Circle3D { normal, .. } = &mut c.kind {
                let r = norm(normal);
                if !(r > 0.0) {
                    return Err(Error::InvalidInput("circle normal must be nonzero".into()));
                }
                for v in normal.iter_mut() {
                    *v /= r;
                }
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn single_circle(radius: f64, multiplicity: u32, tube_radius: f64) -> SurfaceSpec {
        SurfaceSpec::new(3, vec![Component::circle([0.0; 3], radius, [0.0, 0.0, 1.0], multiplicity)], tube_radius)
            .expect("valid circle")
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.ambient_dim;
        if n < 2 {
            return Err(Error::InvalidInput("ambient_dim must be at least 2".into()));
        }
        if !(self.tube_radius > 0.0) {
            return Err(Error::InvalidInput("tube_radius must be positive".into()));
        }
        for (i, c) in self.components.iter().enumerate() {
            if c.multiplicity == 0 {
                return Err(Error::InvalidInput(format!("component {i}: multiplicity must be ≥ 1")));
            }
            match &c.kind {
                ComponentKind::Circle3D { radius, normal, .. } => {
                    if n != 3 {
                        return Err(Error::InvalidInput(format!("component {i}: circles need ambient_dim 3")));
                    }
                    if !(*radius > self.tube_radius) {
                        return Err(Error::InvalidInput(format!(
                            "component {i}: tube_radius must be below the circle radius"
                        )));
                    }
                    if (norm(normal) - 1.0).abs() > 1e-9 {
                        return Err(Error::InvalidInput(format!("component {i}: normal must be a unit vector")));
                    }
                }
                ComponentKind::PointVortex2D { .. } => {
                    if n != 2 {
                        return Err(Error::InvalidInput(format!("component {i}: point vortices need ambient_dim 2")));
                    }
                }
                ComponentKind::Slab { lo, hi, delta } => {
                    if n < 3 || lo.len() != n - 2 || hi.len() != n - 2 {
                        return Err(Error::InvalidInput(format!("component {i}: slab box must live in R^(n-2), n ≥ 3")));
                    }
                    if lo.iter().zip(hi).any(|(a, b)| !(b > a)) || !(*delta > 0.0) {
                        return Err(Error::InvalidInput(format!("component {i}: degenerate slab")));
                    }
                }
            }
        }
        let probes: Vec<Vec<Vec<f64>>> = self.components.iter().map(|c| c.probe_points()).collect();
        for i in 0..probes.len() {
            for j in i + 1..probes.len() {
                let d = probes[i]
                    .iter()
                    .flat_map(|a| probes[j].iter().map(move |b| dist(a, b)))
                    .fold(f64::INFINITY, f64::min);
                if !(d > 2.0 * self.tube_radius) {
                    return Err(Error::InvalidInput(format!(
                        "components {i} and {j} are closer than twice the tube radius"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn total_weighted_measure(&self) -> f64 {
        self.components.iter().map(|c| c.multiplicity as f64 * c.measure()).sum()
    }
}

/// Splits every weighted circle into unit-multiplicity parallel copies shifted
/// by (1-s)·v_j along the disk normal, v_j = (j - (d-1)/2)·δ₀.
pub fn perturb_surface(spec: &SurfaceSpec, s: f64) -> Result<SurfaceSpec> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidInput("s must lie in (0,1)".into()));
    }
    if !spec.components.iter().any(|c| matches!(c.kind, ComponentKind::Circle3D { .. })) {
        return Err(Error::InvalidInput("perturb_surface needs circle components".into()));
    }
    let d0 = spec.tube_radius;
    let mut out = Vec::new();
    let mut min_gap = f64::INFINITY;
    for c in &spec.components {
        match &c.kind {
            ComponentKind::Circle3D { center, radius, normal } if c.multiplicity > 1 => {
                let d = c.multiplicity;
                let reach = (1.0 - s) * 0.5 * (d - 1) as f64 * d0;
                if reach >= d0 {
                    return Err(Error::InvalidInput("offsets collide with the tube boundary".into()));
                }
                min_gap = min_gap.min((1.0 - s) * d0);
                for j in 0..d {
                    let v = (j as f64 - 0.5 * (d - 1) as f64) * d0;
                    let shift = (1.0 - s) * v;
                    let c2 = [
                        center[0] + shift * normal[0],
                        center[1] + shift * normal[1],
                        center[2] + shift * normal[2],
                    ];
                    out.push(Component::circle(c2, *radius, *normal, 1));
                }
            }
            _ => out.push(c.clone()),
        }
    }
    let tube = if min_gap.is_finite() { d0.min(0.45 * min_gap) } else { d0 };
    SurfaceSpec::new(spec.ambient_dim, out, tube)
}
