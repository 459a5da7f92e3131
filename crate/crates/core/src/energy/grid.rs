use super::{EnergyEstimate, Method};
use crate::error::{Error, Result};
use crate::fields::Field;
use crate::geom::Region;
use crate::quad::gauss_legendre;
use num_complex::Complex64;
use rayon::prelude::*;

/// Knobs of the cell-pair quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct GridOptions {
    /// Offsets with Chebyshev norm ≤ `near` get the Taylor correction.
    pub near: usize,
    /// Cells closer than `exclusion · h` to the singular set are refined instead of Taylor-corrected.
    pub exclusion: f64,
    /// Refinement levels for pairs touching the singular set.
    pub depth: usize,
    /// Also evaluate on the 2h grid and report |I_h - I_2h| as the error.
    pub richardson: bool,
    /// Central-difference step as a fraction of the cell size.
    pub fd_step: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions { near: 2, exclusion: 2.0, depth: 3, richardson: true, fd_step: 0.125 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridEstimate {
    pub estimate: EnergyEstimate,
    /// Sum of the same-cell terms.
    pub diagonal: f64,
    pub diagonal_share: f64,
    /// Measure of cells dropped because the field is undefined at their center.
    pub excluded_measure: f64,
    /// Measure of cells within the exclusion distance of the singular set.
    pub refined_measure: f64,
    pub cells: usize,
}

/// M_k = ∫ w_k(z) z zᵀ |z|^{-n-2α} dz with w_k(z) = Π (1 - |z_i - k_i|)₊,
/// for every k ∈ {-m..m}ⁿ, flattened row-major with offset m.
pub fn near_field_moments(n: usize, alpha: f64, m: usize) -> Vec<Vec<f64>> {
    let side = 2 * m + 1;
    let count = side.pow(n as u32);
    let (gx, gw) = gauss_legendre(16);
    let nodes: Vec<(f64, f64)> = gx.iter().zip(&gw).map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect();
    let q = nodes.len();
    let p = n as f64 + 2.0 * alpha;
    (0..count)
        .into_par_iter()
        .map(|flat| {
            let k: Vec<i64> = (0..n).map(|d| ((flat / side.pow(d as u32)) % side) as i64 - m as i64).collect();
            let mut mk = vec![0.0; n * n];
            for sub in 0..(1usize << n) {
                let a: Vec<i64> = (0..n).map(|d| k[d] - 1 + (sub >> d & 1) as i64).collect();
                if a.iter().all(|&v| v == -1 || v == 0) {
                    let sign: Vec<f64> = a.iter().map(|&v| if v == 0 { 1.0 } else { -1.0 }).collect();
                    // factor_i(t) = 1 - |s_i t - k_i| is affine on [0,1]
                    let f0: Vec<f64> = (0..n).map(|d| 1.0 - (k[d] as f64).abs()).collect();
                    let f1: Vec<f64> = (0..n).map(|d| 1.0 - (sign[d] - k[d] as f64).abs()).collect();
                    for j in 0..n {
                        let free = n - 1;
                        let total = q.pow(free as u32);
                        for idx in 0..total {
                            let mut v = vec![1.0; n];
                            let mut wv = 1.0;
                            let mut r = idx;
                            for d in (0..n).filter(|&d| d != j) {
                                let (x, w) = nodes[r % q];
                                r /= q;
                                v[d] = x;
                                wv *= w;
                            }
                            let vn2: f64 = v.iter().map(|x| x * x).sum();
                            // polynomial in ρ: Π (f0 + (f1 - f0) ρ v_d)
                            let mut poly = vec![1.0];
                            for d in 0..n {
                                let (c0, c1) = (f0[d], (f1[d] - f0[d]) * v[d]);
                                let mut next = vec![0.0; poly.len() + 1];
                                for (e, c) in poly.iter().enumerate() {
                                    next[e] += c * c0;
                                    next[e + 1] += c * c1;
                                }
                                poly = next;
                            }
                            let radial: f64 = poly
                                .iter()
                                .enumerate()
                                .map(|(e, c)| c / (2.0 - 2.0 * alpha + e as f64))
                                .sum();
                            let scale = wv * radial * vn2.powf(-0.5 * p);
                            for r1 in 0..n {
                                for r2 in 0..n {
                                    mk[r1 * n + r2] += scale * sign[r1] * sign[r2] * v[r1] * v[r2];
                                }
                            }
                        }
                    }
                } else {
                    let total = q.pow(n as u32);
                    for idx in 0..total {
                        let mut z = vec![0.0; n];
                        let mut w = 1.0;
                        let mut r = idx;
                        for d in 0..n {
                            let (x, wx) = nodes[r % q];
                            r /= q;
                            z[d] = a[d] as f64 + x;
                            w *= wx * (1.0 - (z[d] - k[d] as f64).abs()).max(0.0);
                        }
                        let z2: f64 = z.iter().map(|x| x * x).sum();
                        let scale = w * z2.powf(-0.5 * p);
                        for r1 in 0..n {
                            for r2 in 0..n {
                                mk[r1 * n + r2] += scale * z[r1] * z[r2];
                            }
                        }
                    }
                }
            }
            mk
        })
        .collect()
}

struct Layout {
    n: usize,
    h: f64,
    counts: Vec<usize>,
    lo: Vec<f64>,
}

fn layout(domain: &Region, h: f64) -> Result<Layout> {
    let (lo, hi) = domain.bounds();
    let n = lo.len();
    let mut counts = Vec::with_capacity(n);
    for k in 0..n {
        let len = hi[k] - lo[k];
        let c = (len / h).round();
        if c < 1.0 || (c * h - len).abs() > 1e-9 * len {
            return Err(Error::InvalidInput(format!(
                "grid step {h} does not divide the domain side {len}"
            )));
        }
        counts.push(c as usize);
    }
    Ok(Layout { n, h, counts, lo })
}

struct CellData {
    idx: Vec<i64>,
    centers: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<Complex64>,
    flagged: Vec<bool>,
    gram: Vec<f64>,
}

fn gram_at<F: Field + ?Sized>(field: &F, x: &[f64], eta: f64) -> Option<Vec<f64>> {
    let n = x.len();
    let mut grads = Vec::with_capacity(n);
    let mut y = x.to_vec();
    for d in 0..n {
        y[d] = x[d] + eta;
        let a = field.eval(&y)?;
        y[d] = x[d] - eta;
        let b = field.eval(&y)?;
        y[d] = x[d];
        grads.push((a - b) / (2.0 * eta));
    }
    let mut g = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            g[i * n + j] = (grads[i] * grads[j].conj()).re;
        }
    }
    Some(g)
}

fn is_flagged<F: Field + ?Sized>(field: &F, x: &[f64], h: f64, opts: &GridOptions) -> bool {
    field.singular_distance(x).is_some_and(|d| d < opts.exclusion * h)
}

fn cell_weight(domain: &Region, center: &[f64], h: f64) -> f64 {
    match domain {
        Region::Box { .. } => 1.0,
        Region::Ball { center: c, radius } => {
            let n = center.len();
            let far = crate::geom::dist(center, c);
            let half_diag = 0.5 * h * (n as f64).sqrt();
            if far + half_diag < *radius {
                return 1.0;
            }
            if far - half_diag > *radius {
                return 0.0;
            }
            let per = 8usize;
            let total = per.pow(n as u32);
            let mut inside = 0usize;
            let mut x = vec![0.0; n];
            for idx in 0..total {
                let mut r = idx;
                for d in 0..n {
                    x[d] = center[d] + h * (((r % per) as f64 + 0.5) / per as f64 - 0.5);
                    r /= per;
                }
                if domain.contains(&x) {
                    inside += 1;
                }
            }
            inside as f64 / total as f64
        }
    }
}

/// Index, center, weight, value, flag and gradient of one cell.
type RawCell = (Vec<i64>, Vec<f64>, f64, Option<Complex64>, bool, Vec<f64>);

fn collect_cells<F: Field + ?Sized>(
    field: &F,
    domain: &Region,
    lay: &Layout,
    opts: &GridOptions,
) -> (CellData, f64) {
    let n = lay.n;
    let total: usize = lay.counts.iter().product();
    let h = lay.h;
    let raw: Vec<Option<RawCell>> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut r = flat;
            let mut idx = vec![0i64; n];
            let mut c = vec![0.0; n];
            for d in 0..n {
                let i = r % lay.counts[d];
                r /= lay.counts[d];
                idx[d] = i as i64;
                c[d] = lay.lo[d] + (i as f64 + 0.5) * h;
            }
            let w = cell_weight(domain, &c, h);
            if w <= 0.0 {
                return None;
            }
            let value = field.eval(&c);
            let mut flagged = is_flagged(field, &c, h, opts);
            let g = if flagged || value.is_none() {
                vec![0.0; n * n]
            } else {
                match gram_at(field, &c, opts.fd_step * h) {
                    Some(g) => g,
                    None => {
                        flagged = true;
                        vec![0.0; n * n]
                    }
                }
            };
            Some((idx, c, w, value, flagged, g))
        })
        .collect();
    let mut data = CellData {
        idx: Vec::new(),
        centers: Vec::new(),
        weights: Vec::new(),
        values: Vec::new(),
        flagged: Vec::new(),
        gram: Vec::new(),
    };
    let mut excluded = 0.0;
    let vol = h.powi(n as i32);
    for (idx, c, w, value, flagged, g) in raw.into_iter().flatten() {
        match value {
            Some(v) => {
                data.idx.extend(idx);
                data.centers.extend(c);
                data.weights.push(w);
                data.values.push(v);
                data.flagged.push(flagged);
                data.gram.extend(g);
            }
            None => excluded += w * vol,
        }
    }
    (data, excluded)
}

struct Ctx<'a, F: Field + ?Sized> {
    field: &'a F,
    n: usize,
    alpha: f64,
    m: i64,
    moments: &'a [Vec<f64>],
    opts: &'a GridOptions,
}

impl<'a, F: Field + ?Sized> Ctx<'a, F> {
    fn moment_index(&self, k: &[i64]) -> usize {
        let side = 2 * self.m + 1;
        let mut flat = 0i64;
        for d in (0..self.n).rev() {
            flat = flat * side + (k[d] + self.m);
        }
        flat as usize
    }

    /// Taylor correction h^{n+2-2α}[tr(Ḡ M_k) - kᵀḠk |k|^{-n-2α}] for an ordered pair.
    fn correction(&self, k: &[i64], g: &[f64], h: f64) -> f64 {
        let n = self.n;
        let mk = &self.moments[self.moment_index(k)];
        let mut tr = 0.0;
        for i in 0..n * n {
            tr += g[i] * mk[i];
        }
        let k2: f64 = k.iter().map(|v| (*v * *v) as f64).sum();
        let mid = if k2 > 0.0 {
            let mut q = 0.0;
            for i in 0..n {
                for j in 0..n {
                    q += g[i * n + j] * (k[i] * k[j]) as f64;
                }
            }
            q * k2.powf(-0.5 * (n as f64 + 2.0 * self.alpha))
        } else {
            0.0
        };
        h.powf(n as f64 + 2.0 - 2.0 * self.alpha) * (tr - mid)
    }

    fn midpoint(&self, k2: f64, du: f64, h: f64) -> f64 {
        let p = self.n as f64 + 2.0 * self.alpha;
        h.powf(self.n as f64 - 2.0 * self.alpha) * k2.powf(-0.5 * p) * du
    }

    /// Integral over C(x, h) × C(y, h) of the ordered pair, refining near the singular set.
    /// Returns the values at the full depth and at one level less.
    fn refine(&self, x: &[f64], y: &[f64], h: f64, level: usize) -> (f64, f64) {
        let n = self.n;
        let hc = 0.5 * h;
        let children = |c: &[f64]| -> Vec<Vec<f64>> {
            (0..(1usize << n))
                .map(|mask| (0..n).map(|d| c[d] + if mask >> d & 1 == 1 { 0.5 * hc } else { -0.5 * hc }).collect())
                .collect()
        };
        let cx = children(x);
        let cy = children(y);
        let info = |c: &Vec<f64>| -> (Option<Complex64>, bool) {
            (self.field.eval(c), is_flagged(self.field, c, hc, self.opts))
        };
        let ix: Vec<_> = cx.iter().map(info).collect();
        let iy: Vec<_> = cy.iter().map(info).collect();
        let mut fine = 0.0;
        let mut coarse = 0.0;
        for (a, ca) in cx.iter().enumerate() {
            let (Some(ua), fa) = ix[a] else { continue };
            for (b, cb) in cy.iter().enumerate() {
                let (Some(ub), fb) = iy[b] else { continue };
                let k: Vec<i64> = (0..n).map(|d| ((cb[d] - ca[d]) / hc).round() as i64).collect();
                let kmax = k.iter().map(|v| v.abs()).max().unwrap_or(0);
                let k2: f64 = k.iter().map(|v| (*v * *v) as f64).sum();
                let du = (ua - ub).norm_sqr();
                let mid = if k2 > 0.0 { self.midpoint(k2, du, hc) } else { 0.0 };
                let leaf = if kmax > self.m || fa || fb {
                    mid
                } else {
                    let ga = gram_at(self.field, ca, self.opts.fd_step * hc);
                    let gb = gram_at(self.field, cb, self.opts.fd_step * hc);
                    match (ga, gb) {
                        (Some(ga), Some(gb)) => {
                            let g: Vec<f64> = ga.iter().zip(&gb).map(|(p, q)| 0.5 * (p + q)).collect();
                            (mid + self.correction(&k, &g, hc)).max(0.0)
                        }
                        _ => mid,
                    }
                };
                if kmax <= self.m && (fa || fb) && level + 1 < self.opts.depth {
                    let (f, c) = self.refine(ca, cb, hc, level + 1);
                    fine += f;
                    coarse += if level + 2 < self.opts.depth { c } else { leaf };
                } else {
                    fine += leaf;
                    coarse += leaf;
                }
            }
        }
        (fine, coarse)
    }
}

struct Partial {
    total: f64,
    shallow: f64,
    diagonal: f64,
    excluded: f64,
    refined: f64,
    cells: usize,
}

fn grid_pass<F: Field + ?Sized>(
    field: &F,
    domain: &Region,
    alpha: f64,
    h: f64,
    opts: &GridOptions,
    moments: &[Vec<f64>],
) -> Result<Partial> {
    let lay = layout(domain, h)?;
    let n = lay.n;
    let (cells, excluded) = collect_cells(field, domain, &lay, opts);
    let ctx = Ctx { field, n, alpha, m: opts.near as i64, moments, opts };
    let mcount = cells.values.len();
    let p = n as f64 + 2.0 * alpha;
    let strides: Vec<usize> = (0..n).map(|d| lay.counts[..d].iter().product()).collect();
    let table_len: usize = lay.counts.iter().product();
    let far: Vec<f64> = (0..table_len)
        .map(|flat| {
            let k2: f64 = (0..n)
                .map(|d| {
                    let v = ((flat / strides[d]) % lay.counts[d]) as f64;
                    v * v
                })
                .sum();
            if k2 > 0.0 {
                k2.powf(-0.5 * p)
            } else {
                0.0
            }
        })
        .collect();
    let hfar = h.powf(n as f64 - 2.0 * alpha);
    let m = opts.near as i64;
    let rows: Vec<(f64, f64, f64)> = (0..mcount)
        .into_par_iter()
        .map(|i| {
            let ii = &cells.idx[i * n..(i + 1) * n];
            let ui = cells.values[i];
            let wi = cells.weights[i];
            let fi = cells.flagged[i];
            let gi = &cells.gram[i * n * n..(i + 1) * n * n];
            let xi = &cells.centers[i * n..(i + 1) * n];
            let mut acc = 0.0;
            let mut low = 0.0;
            let mut k = vec![0i64; n];
            for j in i + 1..mcount {
                let jj = &cells.idx[j * n..(j + 1) * n];
                let mut flat = 0usize;
                let mut kmax = 0i64;
                for d in 0..n {
                    let v = jj[d] - ii[d];
                    k[d] = v;
                    let a = v.abs();
                    kmax = kmax.max(a);
                    flat += a as usize * strides[d];
                }
                let du = (ui - cells.values[j]).norm_sqr();
                let wij = wi * cells.weights[j];
                let mid = hfar * far[flat] * du;
                if kmax > m {
                    acc += 2.0 * wij * mid;
                    low += 2.0 * wij * mid;
                    continue;
                }
                let fj = cells.flagged[j];
                if !fi && !fj {
                    let gj = &cells.gram[j * n * n..(j + 1) * n * n];
                    let g: Vec<f64> = gi.iter().zip(gj).map(|(a, b)| 0.5 * (a + b)).collect();
                    let v = 2.0 * wij * (mid + ctx.correction(&k, &g, h)).max(0.0);
                    acc += v;
                    low += v;
                } else if opts.depth > 0 {
                    let xj = &cells.centers[j * n..(j + 1) * n];
                    let (f, c) = ctx.refine(xi, xj, h, 0);
                    acc += 2.0 * wij * f;
                    low += 2.0 * wij * if opts.depth > 1 { c } else { mid };
                } else {
                    acc += 2.0 * wij * mid;
                    low += 2.0 * wij * mid;
                }
            }
            let (diag, diag_low) = if !fi {
                let v = wi * wi * ctx.correction(&vec![0; n], gi, h);
                (v, v)
            } else if opts.depth > 0 {
                let (f, c) = ctx.refine(xi, xi, h, 0);
                (wi * wi * f, if opts.depth > 1 { wi * wi * c } else { 0.0 })
            } else {
                (0.0, 0.0)
            };
            (acc + diag, diag, low + diag_low)
        })
        .collect();
    let total: f64 = rows.iter().map(|r| r.0).sum();
    let diagonal: f64 = rows.iter().map(|r| r.1).sum();
    let shallow: f64 = rows.iter().map(|r| r.2).sum();
    let vol = h.powi(n as i32);
    let refined: f64 = cells
        .flagged
        .iter()
        .zip(&cells.weights)
        .filter(|(f, _)| **f)
        .map(|(_, w)| w * vol)
        .sum();
    Ok(Partial { total, shallow, diagonal, excluded, refined, cells: mcount })
}

/// [u]²_{H^α(Ω)} by cell-pair quadrature with the default options.
pub fn seminorm_grid<F: Field + ?Sized>(field: &F, domain: &Region, alpha: f64, h: f64) -> Result<GridEstimate> {
    seminorm_grid_with(field, domain, alpha, h, &GridOptions::default())
}

pub fn seminorm_grid_with<F: Field + ?Sized>(
    field: &F,
    domain: &Region,
    alpha: f64,
    h: f64,
    opts: &GridOptions,
) -> Result<GridEstimate> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput("α must lie in (0,1)".into()));
    }
    if field.dim() != domain.dim() {
        return Err(Error::InvalidInput("field and domain dimensions differ".into()));
    }
    if let Some(d0) = field.tube_radius() {
        if h > d0 / 4.0 {
            return Err(Error::ResolveTube { h, delta0: d0 });
        }
    }
    let n = domain.dim();
    let moments = near_field_moments(n, alpha, opts.near);
    let fine = grid_pass(field, domain, alpha, h, opts, &moments)?;
    // refined pairs carry an O(h^{2-2α}) bias per level
    let gain = 1.0 / (2f64.powf(2.0 - 2.0 * alpha) - 1.0);
    let shift = if opts.depth > 0 { gain * (fine.total - fine.shallow) } else { 0.0 };
    let value = fine.total + shift;
    let mut err = shift.abs();
    let mut warning = false;
    if opts.richardson {
        match grid_pass(field, domain, alpha, 2.0 * h, opts, &moments) {
            Ok(coarse) => {
                let cs = if opts.depth > 0 { gain * (coarse.total - coarse.shallow) } else { 0.0 };
                err = err.max((value - coarse.total - cs).abs());
            }
            Err(_) => warning = true,
        }
    }
    let mut est = EnergyEstimate::new(value, err, Method::Grid);
    est.grid_h = Some(h);
    est.warning = warning;
    Ok(GridEstimate {
        estimate: est,
        diagonal: fine.diagonal,
        diagonal_share: if fine.total > 0.0 { fine.diagonal / fine.total } else { 0.0 },
        excluded_measure: fine.excluded,
        refined_measure: fine.refined,
        cells: fine.cells,
    })
}
