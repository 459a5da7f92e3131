//! Winding degree of S¹-valued traces, Gauss and intersection linking numbers.

use crate::error::{Error, Result};
use crate::geom::{cross3, dot, SurfaceSpec, TubeChart};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Oriented closed polyline, optionally carrying unit trace values.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopSample {
    pub dim: usize,
    pub coords: Vec<f64>,
    pub values: Option<Vec<Complex64>>,
}

impl LoopSample {
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> LoopSample {
        LoopSample { dim, coords, values: None }
    }

    pub fn from_points(points: &[Vec<f64>]) -> LoopSample {
        let dim = points.first().map_or(0, |p| p.len());
        LoopSample { dim, coords: points.iter().flatten().copied().collect(), values: None }
    }

    /// Values only, on an abstract loop.
    pub fn from_values(values: Vec<Complex64>) -> LoopSample {
        LoopSample { dim: 0, coords: vec![], values: Some(values) }
    }

    pub fn len(&self) -> usize {
        match self.coords.len().checked_div(self.dim) {
            Some(m) => m,
            None => self.values.as_ref().map_or(0, |v| v.len()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn with_values(mut self, values: Vec<Complex64>) -> LoopSample {
        self.values = Some(values);
        self
    }

    pub fn perimeter(&self) -> f64 {
        let m = self.len();
        (0..m).map(|i| crate::geom::dist(self.point(i), self.point((i + 1) % m))).sum()
    }

    pub fn reversed(&self) -> LoopSample {
        let m = self.len();
        let mut coords = Vec::with_capacity(self.coords.len());
        for i in (0..m).rev() {
            coords.extend_from_slice(self.point(i));
        }
        let values = self.values.as_ref().map(|v| v.iter().rev().copied().collect());
        LoopSample { dim: self.dim, coords, values }
    }

    /// Splits every segment into `factor` equal pieces; trace values are dropped.
    pub fn refined(&self, factor: usize) -> LoopSample {
        let m = self.len();
        let mut coords = Vec::with_capacity(self.coords.len() * factor);
        for i in 0..m {
            let (a, b) = (self.point(i), self.point((i + 1) % m));
            for j in 0..factor {
                let t = j as f64 / factor as f64;
                coords.extend(a.iter().zip(b).map(|(x, y)| x + t * (y - x)));
            }
        }
        LoopSample::from_flat(self.dim, coords)
    }

    pub fn map_points<F: Fn(&[f64]) -> Vec<f64>>(&self, f: F) -> LoopSample {
        let mut coords = Vec::with_capacity(self.coords.len());
        for i in 0..self.len() {
            coords.extend(f(self.point(i)));
        }
        LoopSample { dim: self.dim, coords, values: self.values.clone() }
    }

    /// Evaluates a field along the loop.
    pub fn sample_values<F: Fn(&[f64]) -> Option<Complex64>>(&self, f: F) -> Result<LoopSample> {
        let values = (0..self.len())
            .map(|i| f(self.point(i)).ok_or(Error::SingularPoint))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.clone().with_values(values))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Winding {
    pub degree: i64,
    pub residual: f64,
}

/// Degree of the trace by principal-branch angle accumulation.
pub fn winding_degree(lp: &LoopSample) -> Result<Winding> {
    let v = lp
        .values
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("loop has no trace values".into()))?;
    let m = v.len();
    if m < 2 {
        return Err(Error::InvalidInput("trace needs at least two values".into()));
    }
    let mut total = 0.0;
    for k in 0..m {
        let inc = (v[(k + 1) % m] * v[k].conj()).arg();
        if inc.abs() >= PI {
            return Err(Error::UndersampledTrace { step: k, gap: inc.abs() });
        }
        total += inc;
    }
    let turns = total / (2.0 * PI);
    let degree = turns.round();
    let residual = (turns - degree).abs();
    if residual > 0.1 {
        return Err(Error::InconsistentTrace { residual });
    }
    Ok(Winding { degree: degree as i64, residual })
}

/// Winding degree of a field along a loop, refining the loop up to three times
/// when the trace is undersampled.
pub fn winding_degree_of<F: Fn(&[f64]) -> Option<Complex64>>(lp: &LoopSample, f: F) -> Result<Winding> {
    let mut current = lp.clone();
    let mut last = Error::InvalidInput("empty loop".into());
    for attempt in 0..4 {
        if attempt > 0 {
            current = current.refined(2);
        }
        match winding_degree(&current.sample_values(&f)?) {
            Ok(w) => return Ok(w),
            Err(e @ Error::UndersampledTrace { .. }) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

fn segment_distance(p1: &[f64], q1: &[f64], p2: &[f64], q2: &[f64]) -> f64 {
    let d1: Vec<f64> = (0..3).map(|k| q1[k] - p1[k]).collect();
    let d2: Vec<f64> = (0..3).map(|k| q2[k] - p2[k]).collect();
    let r: Vec<f64> = (0..3).map(|k| p1[k] - p2[k]).collect();
    let a = dot(&d1, &d1);
    let e = dot(&d2, &d2);
    let f = dot(&d2, &r);
    let (s, t);
    if a <= 1e-300 && e <= 1e-300 {
        return crate::geom::norm(&r);
    }
    if a <= 1e-300 {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = dot(&d1, &r);
        if e <= 1e-300 {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = dot(&d1, &d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 1e-300 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    (0..3)
        .map(|k| {
            let d = p1[k] + s * d1[k] - p2[k] - t * d2[k];
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Smallest distance between the two closed polylines.
pub fn loop_distance(a: &LoopSample, b: &LoopSample) -> f64 {
    let (ma, mb) = (a.len(), b.len());
    (0..ma)
        .into_par_iter()
        .map(|i| {
            let (p1, q1) = (a.point(i), a.point((i + 1) % ma));
            (0..mb)
                .map(|j| segment_distance(p1, q1, b.point(j), b.point((j + 1) % mb)))
                .fold(f64::INFINITY, f64::min)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

fn gauss_midpoint(a: &LoopSample, b: &LoopSample) -> f64 {
    let seg = |lp: &LoopSample| -> Vec<([f64; 3], [f64; 3])> {
        let m = lp.len();
        (0..m)
            .map(|i| {
                let (p, q) = (lp.point(i), lp.point((i + 1) % m));
                (
                    [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1]), 0.5 * (p[2] + q[2])],
                    [q[0] - p[0], q[1] - p[1], q[2] - p[2]],
                )
            })
            .collect()
    };
    let sa = seg(a);
    let sb = seg(b);
    let rows: Vec<f64> = sa
        .par_iter()
        .map(|(m1, t1)| {
            sb.iter()
                .map(|(m2, t2)| {
                    let r = [m1[0] - m2[0], m1[1] - m2[1], m1[2] - m2[2]];
                    let d = dot(&r, &r).sqrt();
                    dot(&r, &cross3(t1, t2)) / (d * d * d)
                })
                .sum::<f64>()
        })
        .collect();
    rows.iter().sum::<f64>() / (4.0 * PI)
}

/// Gauss linking integral of two closed polylines in R³.
pub fn gauss_linking(a: &LoopSample, b: &LoopSample) -> Result<f64> {
    if a.dim != 3 || b.dim != 3 {
        return Err(Error::InvalidInput("Gauss linking needs loops in R³".into()));
    }
    let d = loop_distance(a, b);
    if !(d > 1e-6) {
        return Err(Error::NearIntersection { distance: d });
    }
    let mut factor = 1usize;
    let mut prev = gauss_midpoint(a, b);
    loop {
        factor *= 2;
        let cur = gauss_midpoint(&a.refined(factor), &b.refined(factor));
        if (cur - prev).abs() < 1e-4 {
            return Ok(cur);
        }
        if a.len() * factor > 1 << 14 || b.len() * factor > 1 << 14 {
            return Err(Error::NonConvergent(format!(
                "Gauss integral still changing by {:.2e}",
                (cur - prev).abs()
            )));
        }
        prev = cur;
    }
}

/// Flat disk spanning a round circle in R³, oriented by its normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: [f64; 3],
    pub radius: f64,
    pub normal: [f64; 3],
}

impl Disk {
    pub fn from_chart(chart: &TubeChart) -> Option<Disk> {
        chart.circle_data().map(|(center, radius, normal)| Disk { center, radius, normal })
    }
}

/// Signed count of crossings of the loop through the disk.
pub fn intersection_linking(lp: &LoopSample, disk: &Disk) -> Result<i64> {
    if lp.dim != 3 {
        return Err(Error::InvalidInput("intersection linking needs loops in R³".into()));
    }
    let c = disk.center;
    let nu = disk.normal;
    let m = lp.len();
    let height = |x: &[f64]| (x[0] - c[0]) * nu[0] + (x[1] - c[1]) * nu[1] + (x[2] - c[2]) * nu[2];
    let tol = 1e-12 * disk.radius.max(1.0);
    let mut total = 0i64;
    for i in 0..m {
        let (a, b) = (lp.point(i), lp.point((i + 1) % m));
        let (da, db) = (height(a), height(b));
        let len = crate::geom::dist(a, b);
        if da.abs() <= tol && db.abs() <= tol {
            let near = |x: &[f64]| crate::geom::dist(x, &c) <= disk.radius;
            if near(a) || near(b) || segment_distance(a, b, &c, &c) <= disk.radius {
                return Err(Error::NonTransversal);
            }
            continue;
        }
        let crosses = (da < 0.0 && db >= 0.0) || (da >= 0.0 && db < 0.0);
        if !crosses {
            continue;
        }
        let t = da / (da - db);
        let q: Vec<f64> = (0..3).map(|k| a[k] + t * (b[k] - a[k])).collect();
        let rho = crate::geom::dist(&q, &c);
        if (rho - disk.radius).abs() <= 1e-9 * disk.radius {
            return Err(Error::IllPosed);
        }
        if rho < disk.radius {
            if (db - da).abs() < (1e-3f64).sin() * len {
                return Err(Error::NonTransversal);
            }
            total += if db > da { 1 } else { -1 };
        }
    }
    Ok(total)
}

/// Winding number of a planar polyline about a point.
pub fn planar_winding(lp: &LoopSample, center: [f64; 2]) -> Result<i64> {
    if lp.dim != 2 {
        return Err(Error::InvalidInput("planar winding needs loops in R²".into()));
    }
    let m = lp.len();
    let mut total = 0.0;
    for i in 0..m {
        let (a, b) = (lp.point(i), lp.point((i + 1) % m));
        let (ax, ay) = (a[0] - center[0], a[1] - center[1]);
        let (bx, by) = (b[0] - center[0], b[1] - center[1]);
        let cr = ax * by - ay * bx;
        let dt = ax * bx + ay * by;
        if cr == 0.0 && dt <= 0.0 {
            return Err(Error::IllPosed);
        }
        total += cr.atan2(dt);
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

/// Signed crossings through the half-hyperplane E × {p₁ > 0, p₂ = 0}.
pub fn slab_crossings(lp: &LoopSample, lo: &[f64], hi: &[f64]) -> Result<i64> {
    let n = lp.dim;
    if n < 3 || lo.len() != n - 2 {
        return Err(Error::InvalidInput("slab crossing dimension mismatch".into()));
    }
    let m = lp.len();
    let mut total = 0i64;
    for i in 0..m {
        let (a, b) = (lp.point(i), lp.point((i + 1) % m));
        let (da, db) = (a[n - 1], b[n - 1]);
        let crosses = (da < 0.0 && db >= 0.0) || (da >= 0.0 && db < 0.0);
        if !crosses {
            continue;
        }
        let t = da / (da - db);
        let q: Vec<f64> = (0..n).map(|k| a[k] + t * (b[k] - a[k])).collect();
        let inside = (0..n - 2).all(|k| q[k] > lo[k] && q[k] < hi[k]);
        if inside && q[n - 2] == 0.0 {
            return Err(Error::IllPosed);
        }
        if inside && q[n - 2] > 0.0 {
            total += if db > da { 1 } else { -1 };
        }
    }
    Ok(total)
}

/// Σ_i d_i · link(loop, Σ_i) with signs.
pub fn signed_expected_degree(spec: &SurfaceSpec, lp: &LoopSample) -> Result<i64> {
    let mut total = 0i64;
    for chart in TubeChart::all(spec)? {
        let link = if let Some(disk) = Disk::from_chart(&chart) {
            intersection_linking(lp, &disk)?
        } else if let Some(c) = chart.point_center() {
            planar_winding(lp, c)?
        } else if let Some((lo, hi)) = chart.slab_box() {
            slab_crossings(lp, &lo, &hi)?
        } else {
            0
        };
        total += chart.multiplicity as i64 * link;
    }
    Ok(total)
}

/// |Σ_i d_i · link(loop, Σ_i)|.
pub fn expected_degree(spec: &SurfaceSpec, lp: &LoopSample) -> Result<u64> {
    signed_expected_degree(spec, lp).map(|d| d.unsigned_abs())
}

/// Polyline of a round circle in R³, counterclockwise about its normal.
pub fn circle_loop(center: [f64; 3], radius: f64, normal: [f64; 3], samples: usize) -> LoopSample {
    let nn = crate::geom::norm(&normal);
    let nu = [normal[0] / nn, normal[1] / nn, normal[2] / nn];
    let (e1, e2) = crate::geom::plane_basis(&nu);
    let mut coords = Vec::with_capacity(3 * samples);
    for k in 0..samples {
        let t = 2.0 * PI * k as f64 / samples as f64;
        for i in 0..3 {
            coords.push(center[i] + radius * (t.cos() * e1[i] + t.sin() * e2[i]));
        }
    }
    LoopSample::from_flat(3, coords)
}
