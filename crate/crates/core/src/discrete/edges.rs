use super::{build_lattice, Lattice};
use crate::error::Result;
use crate::fields::{Field, LatticeField};
use crate::geom::{sample_frame, Region};
use crate::linkdeg::Disk;
use rand::Rng;

/// Obstacle set counted along lattice edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeObstacle {
    Disk(Disk),
}

impl EdgeObstacle {
    pub fn measure(&self) -> f64 {
        match self {
            EdgeObstacle::Disk(d) => std::f64::consts::PI * d.radius * d.radius,
        }
    }

    fn crossings(&self, a: &[f64], b: &[f64]) -> usize {
        match self {
            EdgeObstacle::Disk(d) => {
                let h = |x: &[f64]| (0..3).map(|k| (x[k] - d.center[k]) * d.normal[k]).sum::<f64>();
                let (ha, hb) = (h(a), h(b));
                if (ha < 0.0) == (hb < 0.0) {
                    return 0;
                }
                let t = ha / (ha - hb);
                let q: Vec<f64> = (0..3).map(|k| a[k] + t * (b[k] - a[k])).collect();
                usize::from(crate::geom::dist(&q, &d.center) < d.radius)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeStats {
    pub eps: f64,
    pub s: f64,
    /// Σ_I ε^{n-1-s} osc(w, I)².
    pub oscillation_sum: f64,
    /// Σ_I ε^{n-1} H⁰(I ∩ M).
    pub crossing_sum: f64,
    /// H^{n-1}(M), zero without an obstacle.
    pub obstacle_measure: f64,
    pub edges: usize,
}

/// Oscillation of an analytic field along a segment: diameter of its sampled image.
fn edge_oscillation<F: Field + ?Sized>(field: &F, a: &[f64], b: &[f64], samples: usize) -> f64 {
    let vals: Vec<_> = (0..=samples)
        .filter_map(|j| {
            let t = j as f64 / samples as f64;
            let x: Vec<f64> = a.iter().zip(b).map(|(p, q)| p + t * (q - p)).collect();
            field.eval(&x)
        })
        .collect();
    let mut osc: f64 = 0.0;
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            osc = osc.max((vals[i] - vals[j]).norm());
        }
    }
    osc
}

/// Edge sums on one lattice; the trace is the analytic field if given, else the
/// linear interpolation of the lattice phases.
pub fn edge_statistics<F: Field + ?Sized>(
    field: Option<&F>,
    lattice_field: Option<&LatticeField>,
    lattice: &Lattice,
    s: f64,
    obstacle: Option<&EdgeObstacle>,
) -> EdgeStats {
    let n = lattice.n() as i32;
    let eps = lattice.eps;
    let sites = lattice.sites();
    let mut osc2 = 0.0;
    let mut cross = 0usize;
    for &(a, b) in lattice.edges() {
        let o = match (field, lattice_field) {
            (Some(f), _) => edge_oscillation(f, &sites[a], &sites[b], 16),
            (None, Some(w)) => (w.value(a) - w.value(b)).norm(),
            (None, None) => 0.0,
        };
        osc2 += o * o;
        if let Some(m) = obstacle {
            cross += m.crossings(&sites[a], &sites[b]);
        }
    }
    EdgeStats {
        eps,
        s,
        oscillation_sum: eps.powf(n as f64 - 1.0 - s) * osc2,
        crossing_sum: eps.powi(n - 1) * cross as f64,
        obstacle_measure: obstacle.map_or(0.0, |m| m.measure()),
        edges: lattice.edges().len(),
    }
}

/// Averages `edge_statistics` over Haar frames and uniform offsets.
pub fn edge_statistics_averaged<F: Field + ?Sized, R: Rng + ?Sized>(
    field: &F,
    domain: &Region,
    eps: f64,
    s: f64,
    obstacle: Option<&EdgeObstacle>,
    draws: usize,
    rng: &mut R,
) -> Result<EdgeStats> {
    let n = domain.dim();
    let mut acc = EdgeStats { eps, s, oscillation_sum: 0.0, crossing_sum: 0.0, obstacle_measure: 0.0, edges: 0 };
    for _ in 0..draws {
        let frame = sample_frame(n, rng);
        let z: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let lat = build_lattice(eps, &frame, &z, domain)?;
        let st = edge_statistics(Some(field), None, &lat, s, obstacle);
        acc.oscillation_sum += st.oscillation_sum / draws as f64;
        acc.crossing_sum += st.crossing_sum / draws as f64;
        acc.obstacle_measure = st.obstacle_measure;
        acc.edges += st.edges;
    }
    acc.edges /= draws.max(1);
    Ok(acc)
}
