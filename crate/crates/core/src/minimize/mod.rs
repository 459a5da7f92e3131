//! Projected gradient descent on lattice phases for the truncated pair-kernel energy.

mod audit;

pub use audit::{degree_audit, field_degree_audit, interpolate_phase, local_mass_probe, AuditRow, DegreeAudit, MassProbe, ProbeRow};

use crate::discrete::Lattice;
use crate::energy::tail_bound;
use crate::error::{Error, Result};
use crate::fields::Field;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Symmetric sparse weights K_xy = h^{2n}/|x-y|^{n+2α} for 0 < |x-y| ≤ R_cut, in CSR layout.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub h: f64,
    pub alpha: f64,
    pub r_cut: f64,
    /// Bound on the pair energy dropped beyond R_cut.
    pub bias_bound: f64,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl KernelMatrix {
    pub fn num_sites(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.cols[a..b].iter().zip(&self.vals[a..b]).map(|(c, v)| (*c as usize, *v))
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.row(i).find(|(c, _)| *c == j).map(|(_, v)| v)
    }

    /// max_x Σ_y K_xy.
    pub fn max_row_sum(&self) -> f64 {
        (0..self.num_sites()).map(|i| self.row(i).map(|(_, v)| v).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Builds a kernel from explicit symmetric entries (i, j, K) with i ≠ j, each pair listed once.
    pub fn from_pairs(sites: usize, h: f64, alpha: f64, pairs: &[(usize, usize, f64)]) -> Result<KernelMatrix> {
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); sites];
        for &(i, j, v) in pairs {
            if i == j || i >= sites || j >= sites || !(v > 0.0) {
                return Err(Error::InvalidInput(format!("bad kernel entry ({i}, {j}, {v})")));
            }
            rows[i].push((j as u32, v));
            rows[j].push((i as u32, v));
        }
        Ok(Self::from_rows(h, alpha, f64::INFINITY, 0.0, rows))
    }

    fn from_rows(h: f64, alpha: f64, r_cut: f64, bias_bound: f64, rows: Vec<Vec<(u32, f64)>>) -> KernelMatrix {
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for mut r in rows {
            r.sort_by_key(|e| e.0);
            for (c, v) in r {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        KernelMatrix { h, alpha, r_cut, bias_bound, row_ptr, cols, vals }
    }
}

/// Default memory budget for the kernel, in bytes.
pub const KERNEL_BUDGET: usize = 1 << 30;

/// Kernel over the lattice sites with cutoff R_cut ≥ 4h.
pub fn assemble_kernel(lattice: &Lattice, alpha: f64, r_cut: f64, budget: usize) -> Result<KernelMatrix> {
    let h = lattice.eps;
    let n = lattice.n();
    if r_cut < 4.0 * h * (1.0 - 1e-12) {
        return Err(Error::InvalidInput("R_cut must be at least 4h".into()));
    }
    let reach = (r_cut / h).floor() as i64;
    let mut stencil: Vec<(Vec<i64>, f64)> = Vec::new();
    let side = (2 * reach + 1) as usize;
    let p = n as f64 + 2.0 * alpha;
    for flat in 0..side.pow(n as u32) {
        let k: Vec<i64> = (0..n).map(|d| ((flat / side.pow(d as u32)) % side) as i64 - reach).collect();
        let r = h * (k.iter().map(|v| (v * v) as f64).sum::<f64>()).sqrt();
        if r > 0.0 && r <= r_cut * (1.0 + 1e-12) {
            stencil.push((k, h.powi(2 * n as i32) / r.powf(p)));
        }
    }
    let sites = lattice.num_sites();
    let estimate = sites * stencil.len() * 12;
    if estimate > budget {
        let ratio = (budget as f64 / estimate as f64).powf(1.0 / n as f64);
        return Err(Error::Budget { needed: estimate, suggested_r_cut: (r_cut * ratio).max(4.0 * h) });
    }
    let rows: Vec<Vec<(u32, f64)>> = (0..sites)
        .into_par_iter()
        .map(|i| {
            let key = lattice.key(i);
            let mut row = Vec::new();
            let mut other = key.to_vec();
            for (k, w) in &stencil {
                for d in 0..n {
                    other[d] = key[d] + k[d];
                }
                if let Some(j) = lattice.site_index(&other) {
                    row.push((j as u32, *w));
                }
            }
            row
        })
        .collect();
    let vol = lattice.domain.volume();
    Ok(KernelMatrix::from_rows(h, alpha, r_cut, tail_bound(n, vol, alpha, r_cut), rows))
}

/// E = Σ_{x<y} 2K_xy(1 - cos(φ_x - φ_y)) and its gradient.
pub fn energy_and_grad(phases: &[f64], k: &KernelMatrix) -> (f64, Vec<f64>) {
    let rows: Vec<(f64, f64)> = (0..k.num_sites())
        .into_par_iter()
        .map(|i| {
            let (mut e, mut g) = (0.0, 0.0);
            for (j, w) in k.row(i) {
                let d = phases[i] - phases[j];
                e += w * (1.0 - d.cos());
                g += 2.0 * w * d.sin();
            }
            (e, g)
        })
        .collect();
    let energy = rows.iter().map(|r| r.0).sum();
    (energy, rows.into_iter().map(|r| r.1).collect())
}

pub fn energy_only(phases: &[f64], k: &KernelMatrix) -> f64 {
    energy_and_grad(phases, k).0
}

/// Sites within δ_pin of the singular set.
pub fn pinned_sites<F: Field + ?Sized>(field: &F, lattice: &Lattice, delta_pin: f64) -> Vec<bool> {
    lattice
        .sites()
        .iter()
        .map(|x| field.singular_distance(x).is_some_and(|d| d < delta_pin))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    /// Initial step; 1/L when absent.
    pub step: Option<f64>,
    pub max_iter: usize,
    pub tol: f64,
    pub armijo: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions { step: None, max_iter: 500, tol: 1e-6, armijo: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeReport {
    /// Energy after every accepted step, starting with the initial energy.
    pub history: Vec<f64>,
    pub steps: Vec<f64>,
    pub iterations: usize,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub converged: bool,
    /// The line search found no admissible step.
    pub stalled: bool,
    pub pinned: usize,
    /// Trial steps refused because they moved a vortex.
    pub rejected_steps: usize,
    pub audit_before: Option<DegreeAudit>,
    pub audit_after: Option<DegreeAudit>,
    pub rescaled_mass: Option<f64>,
    #[serde(skip)]
    pub phases: Vec<f64>,
}

fn wrap(d: f64) -> f64 {
    d - TAU * (d / TAU).round()
}

/// Winding number of the phases around each plaquette.
pub fn vorticity(phases: &[f64], plaquettes: &[[usize; 4]]) -> Vec<i32> {
    plaquettes
        .iter()
        .map(|q| {
            let turn: f64 = (0..4).map(|i| wrap(phases[q[(i + 1) % 4]] - phases[q[i]])).sum();
            (turn / TAU).round() as i32
        })
        .collect()
}

/// Armijo backtracking descent from φ₀ with the pinned sites frozen.
pub fn minimize(phi0: &[f64], k: &KernelMatrix, pinned: &[bool], opts: &MinimizeOptions) -> Result<MinimizeReport> {
    minimize_projected(phi0, k, pinned, &[], opts)
}

/// As [`minimize`], rejecting every trial step that changes the vorticity of a plaquette.
pub fn minimize_projected(
    phi0: &[f64],
    k: &KernelMatrix,
    pinned: &[bool],
    plaquettes: &[[usize; 4]],
    opts: &MinimizeOptions,
) -> Result<MinimizeReport> {
    if phi0.len() != k.num_sites() || pinned.len() != phi0.len() {
        return Err(Error::InvalidInput("phase, pin and kernel sizes differ".into()));
    }
    if phi0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("initial phases".into()));
    }
    let lip = 4.0 * k.max_row_sum();
    let step0 = opts.step.unwrap_or(if lip > 0.0 { 1.0 / lip } else { 1.0 });
    let mut phi = phi0.to_vec();
    let (mut e, mut g) = energy_and_grad(&phi, k);
    if !e.is_finite() {
        return Err(Error::NonFinite("initial energy".into()));
    }
    let initial = e;
    let mut history = vec![e];
    let mut steps = Vec::new();
    let mut converged = false;
    let mut stalled = false;
    let mut iterations = 0;
    let mut rejected = 0;
    let charges = vorticity(&phi, plaquettes);
    for _ in 0..opts.max_iter {
        for (gi, p) in g.iter_mut().zip(pinned) {
            if *p {
                *gi = 0.0;
            }
        }
        let g2: f64 = g.iter().map(|v| v * v).sum();
        if g2 == 0.0 {
            converged = true;
            break;
        }
        let mut t = step0;
        let mut accepted = None;
        while t > 1e-30 {
            let trial: Vec<f64> = phi.iter().zip(&g).map(|(p, gi)| p - t * gi).collect();
            let (et, gt) = energy_and_grad(&trial, k);
            if !et.is_finite() {
                return Err(Error::NonFinite(format!("energy at step {t:e}")));
            }
            if et <= e - opts.armijo * t * g2 {
                if vorticity(&trial, plaquettes) == charges {
                    accepted = Some((trial, et, gt));
                    break;
                }
                rejected += 1;
            }
            t *= 0.5;
        }
        let Some((trial, et, gt)) = accepted else {
            stalled = true;
            break;
        };
        phi = trial;
        e = et;
        g = gt;
        iterations += 1;
        history.push(e);
        steps.push(t);
        if history.len() > 10 {
            let old = history[history.len() - 11];
            if old <= 0.0 || (old - e) / old < opts.tol {
                converged = true;
                break;
            }
        }
    }
    Ok(MinimizeReport {
        history,
        steps,
        iterations,
        initial_energy: initial,
        final_energy: e,
        converged,
        stalled,
        pinned: pinned.iter().filter(|p| **p).count(),
        rejected_steps: rejected,
        audit_before: None,
        audit_after: None,
        rescaled_mass: None,
        phases: phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antipodal_pair() {
        let k = KernelMatrix::from_pairs(2, 1.0, 0.5, &[(0, 1, 0.7)]).unwrap();
        let (e, g) = energy_and_grad(&[0.0, std::f64::consts::PI], &k);
        assert!((e - 4.0 * 0.7).abs() < 1e-14);
        assert!(g.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn constant_start_returns_immediately() {
        let k = KernelMatrix::from_pairs(3, 1.0, 0.5, &[(0, 1, 1.0), (1, 2, 0.5)]).unwrap();
        let r = minimize(&[0.3; 3], &k, &[false; 3], &MinimizeOptions::default()).unwrap();
        assert_eq!(r.iterations, 0);
        assert_eq!(r.final_energy, 0.0);
    }
}
