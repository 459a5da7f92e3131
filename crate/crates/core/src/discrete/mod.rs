//! Rotated, shifted lattices with their cubes and edges; discrete energies,
//! Kuhn interpolation and Ginzburg–Landau comparison.

mod edges;
mod kuhn;

pub use edges::{edge_statistics, edge_statistics_averaged, EdgeObstacle, EdgeStats};
pub use kuhn::{check_e_ge_gl_grad, gl_energy, kuhn_interpolate, EGlCheck, KuhnInterpolant};

use crate::error::{Error, Result};
use crate::fields::LatticeField;
use crate::geom::{Frame, Region};
use std::collections::HashMap;

/// Sites of R_ν(εZⁿ + εz) inside an open box, with cubes lying in the box
/// and the edges of those cubes.
#[derive(Debug, Clone)]
pub struct Lattice {
    pub eps: f64,
    pub frame: Frame,
    pub z: Vec<f64>,
    pub domain: Region,
    keys: Vec<Vec<i64>>,
    positions: Vec<Vec<f64>>,
    index: HashMap<Vec<i64>, usize>,
    cubes: Vec<Vec<usize>>,
    cube_of: HashMap<Vec<i64>, usize>,
    edges: Vec<(usize, usize)>,
}

impl Lattice {
    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn sites(&self) -> &[Vec<f64>] {
        &self.positions
    }

    pub fn num_sites(&self) -> usize {
        self.positions.len()
    }

    pub fn key(&self, i: usize) -> &[i64] {
        &self.keys[i]
    }

    pub fn site_index(&self, key: &[i64]) -> Option<usize> {
        self.index.get(key).copied()
    }

    /// Corner site indices of every cube, ordered by bitmask (bit i = step along ν_i).
    pub fn cubes(&self) -> &[Vec<usize>] {
        &self.cubes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Position of the lattice point with integer coordinates k.
    pub fn position(&self, k: &[i64]) -> Vec<f64> {
        let y: Vec<f64> = k.iter().zip(&self.z).map(|(a, b)| self.eps * (*a as f64 + b)).collect();
        self.frame.apply(&y)
    }

    /// Lattice coordinates y with x = R_ν(ε y).
    pub fn lattice_coords(&self, x: &[f64]) -> Vec<f64> {
        self.frame.coords(x).into_iter().map(|v| v / self.eps).collect()
    }

    /// Cube containing x as (cube index, local coordinates in [0,1]ⁿ). Points on a
    /// face shared with a missing cube are assigned to the cube that exists.
    pub fn locate(&self, x: &[f64]) -> Option<(usize, Vec<f64>)> {
        const FACE: f64 = 1e-9;
        let y: Vec<f64> = self.lattice_coords(x).iter().zip(&self.z).map(|(a, b)| a - b).collect();
        let n = y.len();
        let floor: Vec<i64> = y.iter().map(|v| v.floor() as i64).collect();
        let shift: Vec<i64> = y
            .iter()
            .zip(&floor)
            .map(|(v, f)| {
                let frac = v - *f as f64;
                if frac < FACE {
                    -1
                } else if frac > 1.0 - FACE {
                    1
                } else {
                    0
                }
            })
            .collect();
        let mut key = floor.clone();
        for mask in 0..(1usize << n) {
            if (0..n).any(|d| mask >> d & 1 == 1 && shift[d] == 0) {
                continue;
            }
            for d in 0..n {
                key[d] = floor[d] + if mask >> d & 1 == 1 { shift[d] } else { 0 };
            }
            if let Some(&c) = self.cube_of.get(&key) {
                let t = y.iter().zip(&key).map(|(v, b)| (v - *b as f64).clamp(0.0, 1.0)).collect();
                return Some((c, t));
            }
        }
        None
    }

    /// Pairs (j, j + εν_i) of existing sites, each counted once.
    pub fn neighbor_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        let mut k2 = vec![0i64; n];
        for (j, k) in self.keys.iter().enumerate() {
            for i in 0..n {
                k2.copy_from_slice(k);
                k2[i] += 1;
                if let Some(&m) = self.index.get(&k2) {
                    out.push((j, m));
                }
            }
        }
        out
    }

    /// Elementary squares (j, j+εν_a, j+εν_a+εν_b, j+εν_b), a < b, with all four sites present.
    pub fn plaquettes(&self) -> Vec<[usize; 4]> {
        let n = self.n();
        let mut out = Vec::new();
        let mut q = vec![0i64; n];
        for (j, k) in self.keys.iter().enumerate() {
            for a in 0..n {
                for b in a + 1..n {
                    let mut get = |da: i64, db: i64| {
                        q.copy_from_slice(k);
                        q[a] += da;
                        q[b] += db;
                        self.index.get(&q).copied()
                    };
                    if let (Some(p1), Some(p2), Some(p3)) = (get(1, 0), get(1, 1), get(0, 1)) {
                        out.push([j, p1, p2, p3]);
                    }
                }
            }
        }
        out
    }

    /// Total volume of the cubes.
    pub fn cube_volume(&self) -> f64 {
        self.cubes.len() as f64 * self.eps.powi(self.n() as i32)
    }
}

/// Enumerates sites, cubes and edges of the lattice inside a box.
pub fn build_lattice(eps: f64, frame: &Frame, z: &[f64], domain: &Region) -> Result<Lattice> {
    let n = z.len();
    let Region::Box { lo, hi } = domain else {
        return Err(Error::InvalidInput("lattice domains are boxes".into()));
    };
    if frame.dim() != n || lo.len() != n {
        return Err(Error::InvalidInput("lattice dimension mismatch".into()));
    }
    if !(eps > 0.0) || !(eps < domain.diameter() / 4.0) {
        return Err(Error::EpsilonTooLarge);
    }
    let mut ymin = vec![f64::INFINITY; n];
    let mut ymax = vec![f64::NEG_INFINITY; n];
    for mask in 0..(1usize << n) {
        let corner: Vec<f64> = (0..n).map(|k| if mask >> k & 1 == 1 { hi[k] } else { lo[k] }).collect();
        let y = frame.coords(&corner);
        for k in 0..n {
            ymin[k] = ymin[k].min(y[k] / eps - z[k]);
            ymax[k] = ymax[k].max(y[k] / eps - z[k]);
        }
    }
    let kmin: Vec<i64> = ymin.iter().map(|v| v.floor() as i64 - 1).collect();
    let kmax: Vec<i64> = ymax.iter().map(|v| v.ceil() as i64 + 1).collect();
    let mut lat = Lattice {
        eps,
        frame: frame.clone(),
        z: z.to_vec(),
        domain: domain.clone(),
        keys: Vec::new(),
        positions: Vec::new(),
        index: HashMap::new(),
        cubes: Vec::new(),
        cube_of: HashMap::new(),
        edges: Vec::new(),
    };
    let mut k = kmin.clone();
    'outer: loop {
        let x = lat.position(&k);
        if domain.contains(&x) {
            lat.index.insert(k.clone(), lat.keys.len());
            lat.keys.push(k.clone());
            lat.positions.push(x);
        }
        for d in 0..n {
            k[d] += 1;
            if k[d] <= kmax[d] {
                continue 'outer;
            }
            k[d] = kmin[d];
        }
        break;
    }
    let mut corner = vec![0i64; n];
    for key in lat.keys.clone() {
        let mut ids = Vec::with_capacity(1 << n);
        for mask in 0..(1usize << n) {
            for d in 0..n {
                corner[d] = key[d] + (mask >> d & 1) as i64;
            }
            match lat.index.get(&corner) {
                Some(&i) => ids.push(i),
                None => break,
            }
        }
        if ids.len() == 1 << n {
            lat.cube_of.insert(key.clone(), lat.cubes.len());
            lat.cubes.push(ids);
        }
    }
    if lat.cubes.is_empty() {
        return Err(Error::EpsilonTooLarge);
    }
    let mut seen = std::collections::HashSet::new();
    for cube in &lat.cubes {
        for mask in 0..(1usize << n) {
            for d in 0..n {
                if mask >> d & 1 == 0 {
                    let e = (cube[mask], cube[mask | 1 << d]);
                    if seen.insert(e) {
                        lat.edges.push(e);
                    }
                }
            }
        }
    }
    Ok(lat)
}

/// ε^{n-2}/(2|log ε|) Σ_j Σ_i |w(j+εν_i) - w(j)|² over existing neighbor pairs.
pub fn discrete_energy(w: &LatticeField, lattice: &Lattice) -> Result<f64> {
    let eps = lattice.eps;
    if !(eps < 1.0) {
        return Err(Error::EpsilonTooLarge);
    }
    if w.phases.len() != lattice.num_sites() {
        return Err(Error::InvalidInput("field does not match the lattice".into()));
    }
    let sum: f64 = lattice
        .neighbor_pairs()
        .iter()
        .map(|&(a, b)| 2.0 - 2.0 * (w.phases[a] - w.phases[b]).cos())
        .sum();
    Ok(eps.powi(lattice.n() as i32 - 2) * sum / (2.0 * eps.ln().abs()))
}

/// r^{2/(1-s)}.
pub fn r_s_schedule(r: f64, s: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0 && s > 0.0 && s < 1.0) {
        return Err(Error::InvalidInput("r and s must lie in (0,1)".into()));
    }
    Ok(r.powf(2.0 / (1.0 - s)))
}
