//! Geometric substrate: regions, orthonormal frames, affine planes, squares,
//! codimension-two surfaces and their tubular charts.

mod chart;
mod surface;

pub use chart::{meridian_loop, TubeChart};
pub use surface::{perturb_surface, plane_basis, Component, ComponentKind, SurfaceSpec};

use crate::error::{Error, Result};
use crate::linkdeg::LoopSample;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Uniform direction on S^{n-1}.
pub fn random_direction<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    if n == 1 {
        return vec![if rng.random::<bool>() { 1.0 } else { -1.0 }];
    }
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let r = norm(&v);
        if r > 1e-12 {
            return v.into_iter().map(|x| x / r).collect();
        }
    }
}

/// Axis-aligned box or Euclidean ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Region {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl Region {
    pub fn cube(n: usize, lo: f64, hi: f64) -> Region {
        Region::Box { lo: vec![lo; n], hi: vec![hi; n] }
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Region {
        Region::Ball { center, radius }
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Box { lo, .. } => lo.len(),
            Region::Ball { center, .. } => center.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Region::Box { lo, hi } => lo.len() != hi.len() || lo.iter().zip(hi).any(|(a, b)| !(b > a)),
            Region::Ball { radius, .. } => !(*radius > 0.0),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| *v > *a && *v < *b),
            Region::Ball { center, radius } => dist(x, center) < *radius,
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Region::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| b - a).product(),
            Region::Ball { center, radius } => {
                crate::special::ball_volume(center.len()) * radius.powi(center.len() as i32)
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Region::Box { lo, hi } => dist(lo, hi),
            Region::Ball { radius, .. } => 2.0 * radius,
        }
    }

    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Region::Box { lo, hi } => (lo.clone(), hi.clone()),
            Region::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
        }
    }

    pub fn center(&self) -> Vec<f64> {
        match self {
            Region::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect(),
            Region::Ball { center, .. } => center.clone(),
        }
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            Region::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| a + (b - a) * rng.random::<f64>()).collect(),
            Region::Ball { center, radius } => {
                let n = center.len();
                let d = random_direction(n, rng);
                let r = radius * rng.random::<f64>().powf(1.0 / n as f64);
                center.iter().zip(&d).map(|(c, u)| c + r * u).collect()
            }
        }
    }

    /// Euclidean distance from x to the complement (0 outside).
    pub fn depth(&self, x: &[f64]) -> f64 {
        match self {
            Region::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(v, (a, b))| (v - a).min(b - v))
                .fold(f64::INFINITY, f64::min)
                .max(0.0),
            Region::Ball { center, radius } => (radius - dist(x, center)).max(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub vectors: Vec<Vec<f64>>,
}

impl Frame {
    pub fn identity(n: usize) -> Frame {
        Frame {
            vectors: (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(a, b) - target).abs());
            }
        }
        worst
    }

    /// R_ν y = Σ y_i ν_i.
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n];
        for (yi, v) in y.iter().zip(&self.vectors) {
            for k in 0..n {
                out[k] += yi * v[k];
            }
        }
        out
    }

    /// Coordinates of x in the frame.
    pub fn coords(&self, x: &[f64]) -> Vec<f64> {
        self.vectors.iter().map(|v| dot(v, x)).collect()
    }
}

/// Haar-distributed orthonormal frame from Gaussian vectors.
pub fn sample_frame<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Frame {
    'draw: loop {
        let mut vs: Vec<Vec<f64>> = Vec::with_capacity(n);
        for _ in 0..n {
            let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let scale = norm(&v);
            for _ in 0..2 {
                for u in &vs {
                    let c = dot(&v, u);
                    for k in 0..n {
                        v[k] -= c * u[k];
                    }
                }
            }
            let r = norm(&v);
            if r < 1e-8 * scale.max(1e-300) {
                continue 'draw;
            }
            vs.push(v.into_iter().map(|x| x / r).collect());
        }
        return Frame { vectors: vs };
    }
}

/// Affine plane L + h with orthonormal basis (e, f) of L and h ⊥ L.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plane2 {
    pub e: Vec<f64>,
    pub f: Vec<f64>,
    pub h: Vec<f64>,
}

impl Plane2 {
    pub fn identity() -> Plane2 {
        Plane2 { e: vec![1.0, 0.0], f: vec![0.0, 1.0], h: vec![0.0, 0.0] }
    }

    pub fn dim(&self) -> usize {
        self.e.len()
    }

    pub fn point(&self, a: f64, b: f64) -> Vec<f64> {
        (0..self.dim()).map(|k| self.h[k] + a * self.e[k] + b * self.f[k]).collect()
    }

    pub fn plane_coords(&self, x: &[f64]) -> [f64; 2] {
        [dot(x, &self.e), dot(x, &self.f)]
    }

    pub fn defect(&self) -> f64 {
        [
            dot(&self.e, &self.f).abs(),
            (norm(&self.e) - 1.0).abs(),
            (norm(&self.f) - 1.0).abs(),
            dot(&self.h, &self.e).abs(),
            dot(&self.h, &self.f).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Intersection of the plane with a region, in (e, f) coordinates.
    pub fn slice(&self, region: &Region) -> Slice {
        match region {
            Region::Ball { center, radius } => {
                let c = self.plane_coords(center);
                let proj: Vec<f64> = (0..self.dim())
                    .map(|k| center[k] - c[0] * self.e[k] - c[1] * self.f[k])
                    .collect();
                let d = dist(&proj, &self.h);
                let r2 = radius * radius - d * d;
                Slice::Disk { center: c, radius: if r2 > 0.0 { r2.sqrt() } else { 0.0 } }
            }
            Region::Box { lo, hi } => {
                let big = 2.0 * (region.diameter() + norm(&self.h) + norm(&region.center()));
                let mut poly = vec![[-big, -big], [big, -big], [big, big], [-big, big]];
                for k in 0..self.dim() {
                    let (ek, fk, hk) = (self.e[k], self.f[k], self.h[k]);
                    poly = clip(&poly, ek, fk, hi[k] - hk);
                    poly = clip(&poly, -ek, -fk, hk - lo[k]);
                    if poly.is_empty() {
                        break;
                    }
                }
                Slice::Polygon(poly)
            }
        }
    }
}

/// Keep the half-plane a·x + b·y ≤ c.
fn clip(poly: &[[f64; 2]], a: f64, b: f64, c: f64) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let m = poly.len();
    for i in 0..m {
        let p = poly[i];
        let q = poly[(i + 1) % m];
        let fp = a * p[0] + b * p[1] - c;
        let fq = a * q[0] + b * q[1] - c;
        if fp <= 0.0 {
            out.push(p);
        }
        if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
            let t = fp / (fp - fq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum Slice {
    Polygon(Vec<[f64; 2]>),
    Disk { center: [f64; 2], radius: f64 },
}

impl Slice {
    pub fn area(&self) -> f64 {
        match self {
            Slice::Disk { radius, .. } => PI * radius * radius,
            Slice::Polygon(p) => {
                let m = p.len();
                if m < 3 {
                    return 0.0;
                }
                0.5 * (0..m)
                    .map(|i| {
                        let (a, b) = (p[i], p[(i + 1) % m]);
                        a[0] * b[1] - a[1] * b[0]
                    })
                    .sum::<f64>()
                    .abs()
            }
        }
    }

    pub fn contains(&self, q: [f64; 2]) -> bool {
        match self {
            Slice::Disk { center, radius } => (q[0] - center[0]).hypot(q[1] - center[1]) < *radius,
            Slice::Polygon(p) => {
                let m = p.len();
                if m < 3 {
                    return false;
                }
                let mut sign = 0.0;
                for i in 0..m {
                    let (a, b) = (p[i], p[(i + 1) % m]);
                    let c = (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0]);
                    if c == 0.0 {
                        continue;
                    }
                    if sign == 0.0 {
                        sign = c.signum();
                    } else if c.signum() != sign {
                        return false;
                    }
                }
                true
            }
        }
    }

    fn bbox(&self) -> ([f64; 2], [f64; 2]) {
        match self {
            Slice::Disk { center, radius } => (
                [center[0] - radius, center[1] - radius],
                [center[0] + radius, center[1] + radius],
            ),
            Slice::Polygon(p) => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for q in p {
                    for k in 0..2 {
                        lo[k] = lo[k].min(q[k]);
                        hi[k] = hi[k].max(q[k]);
                    }
                }
                (lo, hi)
            }
        }
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<[f64; 2]> {
        if self.area() <= 0.0 {
            return None;
        }
        let (lo, hi) = self.bbox();
        for _ in 0..10_000 {
            let q = [
                lo[0] + (hi[0] - lo[0]) * rng.random::<f64>(),
                lo[1] + (hi[1] - lo[1]) * rng.random::<f64>(),
            ];
            if self.contains(q) {
                return Some(q);
            }
        }
        None
    }
}

/// Plane with Haar-distributed direction and offset uniform over the
/// projection of the region onto the orthogonal complement.
pub fn sample_plane2<R: Rng + ?Sized>(region: &Region, rng: &mut R) -> Result<Plane2> {
    if region.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let n = region.dim();
    if n < 2 {
        return Err(Error::InvalidInput("planes need n ≥ 2".into()));
    }
    if n == 2 {
        return Ok(Plane2::identity());
    }
    let frame = sample_frame(n, rng);
    let e = frame.vectors[0].clone();
    let f = frame.vectors[1].clone();
    let perp = &frame.vectors[2..];
    let c = region.center();
    let cperp: Vec<f64> = perp.iter().map(|v| dot(v, &c)).collect();
    let r = match region {
        Region::Ball { radius, .. } => *radius,
        Region::Box { .. } => 0.5 * region.diameter(),
    };
    for _ in 0..100_000 {
        let d = random_direction(n - 2, rng);
        let rho = r * rng.random::<f64>().powf(1.0 / (n - 2) as f64);
        let mut h = vec![0.0; n];
        for (j, v) in perp.iter().enumerate() {
            let coef = cperp[j] + rho * d[j];
            for k in 0..n {
                h[k] += coef * v[k];
            }
        }
        let plane = Plane2 { e: e.clone(), f: f.clone(), h };
        match region {
            Region::Ball { .. } => return Ok(plane),
            Region::Box { .. } => {
                if plane.slice(region).area() > 0.0 {
                    return Ok(plane);
                }
            }
        }
    }
    Err(Error::EmptyRegion)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareLoop {
    pub plane: Plane2,
    pub center: Vec<f64>,
    pub direction: Vec<f64>,
    pub half_side: f64,
}

impl SquareLoop {
    fn normal_direction(&self) -> Vec<f64> {
        let a = dot(&self.direction, &self.plane.e);
        let b = dot(&self.direction, &self.plane.f);
        (0..self.plane.dim()).map(|k| -b * self.plane.e[k] + a * self.plane.f[k]).collect()
    }

    /// Corners in counterclockwise order within the plane.
    pub fn corners(&self) -> [Vec<f64>; 4] {
        let t = self.half_side;
        let u = &self.direction;
        let w = self.normal_direction();
        let c = &self.center;
        let mk = |a: f64, b: f64| -> Vec<f64> { (0..c.len()).map(|k| c[k] + t * (a * u[k] + b * w[k])).collect() };
        [mk(1.0, -1.0), mk(1.0, 1.0), mk(-1.0, 1.0), mk(-1.0, -1.0)]
    }

    /// Closed polyline with `per_side` points on each side.
    pub fn to_loop(&self, per_side: usize) -> LoopSample {
        let cs = self.corners();
        let n = self.plane.dim();
        let mut pts = Vec::with_capacity(4 * per_side * n);
        for s in 0..4 {
            let (a, b) = (&cs[s], &cs[(s + 1) % 4]);
            for j in 0..per_side {
                let t = j as f64 / per_side as f64;
                for k in 0..n {
                    pts.push(a[k] + t * (b[k] - a[k]));
                }
            }
        }
        LoopSample::from_flat(n, pts)
    }
}

/// Square drawn from the factorized square measure restricted to a region.
pub fn sample_square<R: Rng + ?Sized>(region: &Region, t_max: f64, rng: &mut R) -> Result<SquareLoop> {
    if !(t_max > 0.0) {
        return Err(Error::InvalidInput("t_max must be positive".into()));
    }
    for _ in 0..100 {
        let plane = sample_plane2(region, rng)?;
        let slice = plane.slice(region);
        let Some(q) = slice.sample_uniform(rng) else { continue };
        let center = plane.point(q[0], q[1]);
        let phi = 2.0 * PI * rng.random::<f64>();
        let direction: Vec<f64> = (0..plane.dim())
            .map(|k| phi.cos() * plane.e[k] + phi.sin() * plane.f[k])
            .collect();
        let half_side = t_max * (1.0 - rng.random::<f64>());
        return Ok(SquareLoop { plane, center, direction, half_side });
    }
    Err(Error::EmptyRegion)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn frame_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 2..6 {
            assert!(sample_frame(n, &mut rng).orthonormality_defect() < 1e-12);
        }
    }

    #[test]
    fn identity_plane_in_two_dimensions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = sample_plane2(&Region::cube(2, -1.0, 1.0), &mut rng).unwrap();
        assert_eq!(p, Plane2::identity());
    }

    #[test]
    fn empty_region_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = Region::Box { lo: vec![0.0; 3], hi: vec![0.0, 1.0, 1.0] };
        assert_eq!(sample_plane2(&r, &mut rng), Err(Error::EmptyRegion));
    }

    #[test]
    fn box_slice_of_axis_plane_is_square() {
        let p = Plane2 { e: vec![1.0, 0.0, 0.0], f: vec![0.0, 1.0, 0.0], h: vec![0.0, 0.0, 0.25] };
        let s = p.slice(&Region::cube(3, -1.0, 1.0));
        assert!((s.area() - 4.0).abs() < 1e-12);
        let p = Plane2 { h: vec![0.0, 0.0, 2.0], ..p };
        assert_eq!(p.slice(&Region::cube(3, -1.0, 1.0)).area(), 0.0);
    }

    #[test]
    fn square_corners_stay_near_region() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let region = Region::cube(2, -1.0, 1.0);
        for _ in 0..1000 {
            let sq = sample_square(&region, 0.5, &mut rng).unwrap();
            for c in sq.corners() {
                assert!(c.iter().all(|v| v.abs() < 1.8));
            }
        }
    }
}
