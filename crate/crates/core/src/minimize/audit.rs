use crate::discrete::Lattice;
use crate::error::{Error, Result};
use crate::fields::Field;
use crate::geom::{dist, meridian_loop, sample_square, Region, SurfaceSpec, TubeChart};
use crate::linkdeg::{expected_degree, winding_degree, LoopSample};
use std::f64::consts::FRAC_PI_4;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Multilinear interpolation of e^{iφ} over the containing cube, renormalized.
pub fn interpolate_phase(lattice: &Lattice, phases: &[f64], x: &[f64]) -> Option<Complex64> {
    let (c, t) = lattice.locate(x)?;
    let corners = &lattice.cubes()[c];
    let mut z = Complex64::new(0.0, 0.0);
    for (mask, &site) in corners.iter().enumerate() {
        let mut w = 1.0;
        for (d, td) in t.iter().enumerate() {
            w *= if mask >> d & 1 == 1 { *td } else { 1.0 - td };
        }
        z += w * Complex64::from_polar(1.0, phases[site]);
    }
    let r = z.norm();
    (r > 1e-3).then(|| z / r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub kind: String,
    pub expected: u64,
    pub measured: i64,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeAudit {
    pub rows: Vec<AuditRow>,
    pub mismatches: usize,
}

fn singular_distance(charts: &[TubeChart], x: &[f64]) -> f64 {
    charts.iter().map(|c| c.distance_to_core(x)).fold(f64::INFINITY, f64::min)
}

/// Winding of the interpolated phases on sampled meridian loops and squares against the linking prediction.
pub fn degree_audit<R: Rng + ?Sized>(
    phases: &[f64],
    lattice: &Lattice,
    spec: &SurfaceSpec,
    n_loops: usize,
    delta_pin: f64,
    rng: &mut R,
) -> Result<DegreeAudit> {
    let (lo, hi) = lattice.domain.bounds();
    let h = lattice.eps;
    let inner = Region::Box {
        lo: lo.iter().map(|v| v + h).collect(),
        hi: hi.iter().map(|v| v - h).collect(),
    };
    let inside = |x: &[f64]| lattice.locate(x).is_some();
    let value = |x: &[f64]| interpolate_phase(lattice, phases, x);
    run_audit(spec, &inner, h, 2.0 * delta_pin, n_loops, false, &inside, &value, rng)
}

/// The same audit on an analytic field, with far loops added to the rotation.
pub fn field_degree_audit<F: Field + ?Sized, R: Rng + ?Sized>(
    field: &F,
    spec: &SurfaceSpec,
    region: &Region,
    n_loops: usize,
    rng: &mut R,
) -> Result<DegreeAudit> {
    let h = 0.01 * region.diameter();
    let clearance = 0.02 * spec.tube_radius;
    run_audit(spec, region, h, clearance, n_loops, true, &|_| true, &|x| field.eval(x), rng)
}

/// Samples the trace, refining the loop until no step turns the phase by π/4 or more.
fn resolve_trace(mut lp: LoopSample, value: &dyn Fn(&[f64]) -> Option<Complex64>) -> Option<LoopSample> {
    for _ in 0..MAX_REFINEMENTS {
        let vals: Vec<Complex64> = (0..lp.len()).map(|i| value(lp.point(i))).collect::<Option<_>>()?;
        let m = vals.len();
        let coarse = (0..m).any(|k| (vals[(k + 1) % m] * vals[k].conj()).arg().abs() >= FRAC_PI_4);
        if !coarse {
            return Some(lp.with_values(vals));
        }
        lp = lp.refined(2);
    }
    None
}

const MAX_REFINEMENTS: usize = 10;

#[allow(clippy::too_many_arguments)]
fn run_audit<R: Rng + ?Sized>(
    spec: &SurfaceSpec,
    region: &Region,
    h: f64,
    clearance: f64,
    n_loops: usize,
    far: bool,
    inside: &dyn Fn(&[f64]) -> bool,
    value: &dyn Fn(&[f64]) -> Option<Complex64>,
    rng: &mut R,
) -> Result<DegreeAudit> {
    let charts = TubeChart::all(spec)?;
    if charts.iter().any(|c| clearance >= c.delta0) {
        return Err(Error::InvalidInput(format!(
            "audit clearance {clearance} leaves no room for meridian loops inside tube radius {}",
            spec.tube_radius
        )));
    }
    let t_max = 0.25 * region.diameter();
    let kinds: &[&str] = if far { &["meridian", "square", "far"] } else { &["meridian", "square"] };
    let mut loops = Vec::new();
    let mut tries = 0;
    while loops.len() < n_loops {
        tries += 1;
        if tries > 200 * n_loops + 1000 {
            return Err(Error::NonConvergent(format!("only {} admissible audit loops found", loops.len())));
        }
        let mut kind = kinds[loops.len() % kinds.len()];
        if kind == "meridian" && charts.is_empty() {
            kind = "square";
        }
        let lp = match kind {
            "meridian" => {
                let c = &charts[rng.random_range(0..charts.len())];
                let lmin = (clearance * 1.05).min(c.delta0);
                let ell = lmin + (c.delta0 - lmin) * rng.random::<f64>();
                let sigma = c.sample_base(rng);
                let per = ((8.0 * ell / h).ceil() as usize).max(8);
                meridian_loop(c, &sigma, ell, per)?
            }
            "square" => {
                let sq = sample_square(region, t_max, rng)?;
                let per = ((4.0 * sq.half_side / h).ceil() as usize).max(8);
                sq.to_loop(per)
            }
            _ => {
                // a small square translated well beyond the region
                let sq = sample_square(region, t_max, rng)?;
                let shift = 2.0 * region.diameter();
                let lp = sq.to_loop(((4.0 * sq.half_side / h).ceil() as usize).max(8));
                lp.map_points(|x| x.iter().enumerate().map(|(k, v)| if k == 0 { v + shift } else { *v }).collect())
            }
        };
        let ok = (0..lp.len()).all(|i| {
            let x = lp.point(i);
            (kind == "far" || inside(x)) && singular_distance(&charts, x) > clearance
        });
        if !ok {
            continue;
        }
        let Ok(expected) = expected_degree(spec, &lp) else { continue };
        let Some(lp) = resolve_trace(lp, value) else { continue };
        loops.push((kind, expected, lp));
    }
    let rows: Vec<AuditRow> = loops
        .into_iter()
        .map(|(kind, expected, lp)| {
            let measured = winding_degree(&lp).map(|w| w.degree).unwrap_or(i64::MIN);
            AuditRow {
                kind: kind.to_string(),
                expected,
                measured,
                matched: measured != i64::MIN && measured.unsigned_abs() == expected,
            }
        })
        .collect();
    let mismatches = rows.iter().filter(|r| !r.matched).count();
    Ok(DegreeAudit { rows, mismatches })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub center: usize,
    pub radius: f64,
    pub energy: f64,
    pub sites: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassProbe {
    pub rows: Vec<ProbeRow>,
    /// Least-squares slope of log energy against log radius, per center.
    pub exponents: Vec<f64>,
    /// n - 1 - s.
    pub expected: f64,
}

/// Σ_{x≠y ∈ B_r(c)} h^{2n} |e^{iφ_x} - e^{iφ_y}|² / |x-y|^{n+2α} over each center and radius.
pub fn local_mass_probe(
    phases: &[f64],
    lattice: &Lattice,
    centers: &[Vec<f64>],
    radii: &[f64],
    s: f64,
) -> Result<MassProbe> {
    let n = lattice.n();
    let alpha = 0.5 * (1.0 + s);
    let h = lattice.eps;
    let p = n as f64 + 2.0 * alpha;
    let w = h.powi(2 * n as i32);
    let mut rows = Vec::new();
    let mut exponents = Vec::new();
    for (ci, c) in centers.iter().enumerate() {
        let mut pts = Vec::new();
        for &r in radii {
            let idx: Vec<usize> = (0..lattice.num_sites()).filter(|&i| dist(&lattice.sites()[i], c) < r).collect();
            if idx.len() < 16 {
                return Err(Error::InvalidInput(format!("ball of radius {r} holds only {} sites", idx.len())));
            }
            let e: f64 = idx
                .par_iter()
                .map(|&i| {
                    let xi = &lattice.sites()[i];
                    let ui = Complex64::from_polar(1.0, phases[i]);
                    idx.iter()
                        .filter(|&&j| j != i)
                        .map(|&j| {
                            let d = dist(xi, &lattice.sites()[j]);
                            w * (ui - Complex64::from_polar(1.0, phases[j])).norm_sqr() / d.powf(p)
                        })
                        .sum::<f64>()
                })
                .collect::<Vec<_>>()
                .into_iter()
                .sum();
            rows.push(ProbeRow { center: ci, radius: r, energy: e, sites: idx.len() });
            pts.push((r.ln(), e.ln()));
        }
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        exponents.push(if sxx > 0.0 { sxy / sxx } else { f64::NAN });
    }
    Ok(MassProbe { rows, exponents, expected: n as f64 - 1.0 - s })
}
