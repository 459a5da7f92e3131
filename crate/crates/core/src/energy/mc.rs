use super::{tail_bound, EnergyEstimate, Method};
use crate::error::{Error, Result};
use crate::fields::Field;
use crate::geom::{random_direction, Region, TubeChart};
use crate::special::omega;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Which pairs (x, y) with x ∈ Ω enter the integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairDomain {
    /// y ∈ Ω.
    Inner,
    /// y ∉ Ω, |y - x| ≤ R_cut.
    Cross,
    /// y ∈ Ω with weight 1, y ∉ Ω with weight 2, |y - x| ≤ R_cut.
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McOptions {
    pub samples: usize,
    pub seed: u64,
    pub pairs: PairDomain,
    pub r_cut: Option<f64>,
    /// Fraction of x-draws taken near the singular set; defaults to ½ when charts exist.
    pub mixture: Option<f64>,
    /// Fiber radius of the singular-adapted x-density.
    pub rho_max: Option<f64>,
    /// Replaces the field's own charts for the x-density.
    pub charts: Option<Vec<TubeChart>>,
    pub chunk: usize,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            samples: 100_000,
            seed: 0,
            pairs: PairDomain::Inner,
            r_cut: None,
            mixture: None,
            rho_max: None,
            charts: None,
            chunk: 4096,
        }
    }
}

struct Sampler<'a, F: Field + ?Sized> {
    field: &'a F,
    domain: &'a Region,
    alpha: f64,
    n: usize,
    pairs: PairDomain,
    r_max: f64,
    beta: f64,
    charts: Vec<TubeChart>,
    rho_max: f64,
    fiber_exp: f64,
    vol: f64,
    sphere: f64,
    scale: f64,
}

const RHO_FLOOR: f64 = 1e-6;

impl<'a, F: Field + ?Sized> Sampler<'a, F> {
    fn chart_density(&self, c: &TubeChart, x: &[f64]) -> f64 {
        let Some((sigma, p)) = c.fiber_coords(x) else { return 0.0 };
        let rho = p[0].hypot(p[1]);
        if rho >= self.rho_max || rho == 0.0 || !c.in_base(&sigma) {
            return 0.0;
        }
        let s = self.fiber_exp;
        let radial = (1.0 - s) * rho.powf(-s) / self.rho_max.powf(1.0 - s);
        radial / (2.0 * PI * rho) / c.measure() / c.jacobian(p)
    }

    fn density(&self, x: &[f64]) -> f64 {
        let uniform = if self.domain.contains(x) { 1.0 / self.vol } else { 0.0 };
        if self.beta == 0.0 {
            return uniform;
        }
        let k = self.charts.len() as f64;
        let sing: f64 = self.charts.iter().map(|c| self.chart_density(c, x)).sum::<f64>() / k;
        (1.0 - self.beta) * uniform + self.beta * sing
    }

    fn draw_x<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        if self.beta > 0.0 && rng.random::<f64>() < self.beta {
            let c = &self.charts[rng.random_range(0..self.charts.len())];
            let sigma = c.sample_base(rng);
            let u: f64 = 1.0 - rng.random::<f64>();
            // below the floor the weight f/q no longer depends on ρ near a vortex core
            let rho = (self.rho_max * u.powf(1.0 / (1.0 - self.fiber_exp))).max(RHO_FLOOR * self.rho_max);
            let phi = 2.0 * PI * rng.random::<f64>();
            c.eval_unchecked(&sigma, [rho * phi.cos(), rho * phi.sin()])
        } else {
            self.domain.sample_uniform(rng)
        }
    }

    /// Local length scale ℓ of the field at x.
    fn length_scale(&self, x: &[f64]) -> f64 {
        let floor = 1e-12 * self.scale;
        match self.field.singular_distance(x) {
            Some(d) => d.clamp(floor, self.scale),
            None => self.scale,
        }
    }

    /// One weighted sample; `None` when a point hits the singular set.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<f64> {
        let x = self.draw_x(rng);
        if !self.domain.contains(&x) {
            return Some(0.0);
        }
        let q = self.density(&x);
        let ux = self.field.eval(&x)?;
        let ell = self.length_scale(&x);
        let a = 2.0 - 2.0 * self.alpha;
        let b = 2.0 * self.alpha;
        let m = ell.min(self.r_max);
        let inner_mass = m.powf(a) / a;
        let outer_mass = if ell < self.r_max { ell * ell * (ell.powf(-b) - self.r_max.powf(-b)) / b } else { 0.0 };
        let z = inner_mass + outer_mass;
        let t = rng.random::<f64>() * z;
        let r = if t < inner_mass {
            (a * t).powf(1.0 / a)
        } else {
            let v = ell.powf(-b) - b * (t - inner_mass) / (ell * ell);
            v.max(self.r_max.powf(-b)).powf(-1.0 / b)
        };
        let theta = random_direction(self.n, rng);
        let r_eff = r.max(1e-4 * ell);
        let y: Vec<f64> = x.iter().zip(&theta).map(|(a, t)| a + r_eff * t).collect();
        let inside = self.domain.contains(&y);
        let w = match (self.pairs, inside) {
            (PairDomain::Inner, true) => 1.0,
            (PairDomain::Inner, false) => return Some(0.0),
            (PairDomain::Cross, true) => return Some(0.0),
            (PairDomain::Cross, false) => 1.0,
            (PairDomain::Full, true) => 1.0,
            (PairDomain::Full, false) => 2.0,
        };
        let uy = self.field.eval(&y)?;
        let ratio = (ux - uy).norm_sqr() / (r_eff * r_eff);
        let shape = if r < ell { 1.0 } else { (r / ell).powi(2) };
        Some(w * self.sphere * z * ratio * shape / q)
    }
}

/// Monte Carlo estimate of the pair integral of |u(x)-u(y)|²/|x-y|^{n+2α}.
pub fn seminorm_mc<F: Field + ?Sized, R: Rng + ?Sized>(
    field: &F,
    domain: &Region,
    alpha: f64,
    samples: usize,
    rng: &mut R,
) -> Result<EnergyEstimate> {
    let opts = McOptions { samples, seed: rng.next_u64(), ..McOptions::default() };
    seminorm_mc_with(field, domain, alpha, &opts)
}

pub fn seminorm_mc_with<F: Field + ?Sized>(
    field: &F,
    domain: &Region,
    alpha: f64,
    opts: &McOptions,
) -> Result<EnergyEstimate> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput("α must lie in (0,1)".into()));
    }
    if opts.samples < 1000 {
        return Err(Error::InvalidInput("at least 10³ samples are required".into()));
    }
    if domain.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let n = domain.dim();
    if field.dim() != n {
        return Err(Error::InvalidInput("field and domain dimensions differ".into()));
    }
    let diam = domain.diameter();
    let r_max = match opts.pairs {
        PairDomain::Inner => diam,
        _ => opts.r_cut.unwrap_or(4.0 * diam),
    };
    let charts = opts.charts.clone().unwrap_or_else(|| field.singular_charts());
    let beta = if charts.is_empty() { 0.0 } else { opts.mixture.unwrap_or(0.5).clamp(0.0, 0.95) };
    let mut rho_max = opts.rho_max.unwrap_or_else(|| {
        charts.iter().map(|c| c.delta0).fold(diam / 4.0, f64::min)
    });
    for c in &charts {
        if let Some((_, r, _)) = c.circle_data() {
            rho_max = rho_max.min(0.9 * r);
        }
    }
    let sampler = Sampler {
        field,
        domain,
        alpha,
        n,
        pairs: opts.pairs,
        r_max,
        beta,
        charts,
        rho_max,
        fiber_exp: (2.0 * alpha - 1.0).clamp(0.0, 0.995),
        vol: domain.volume(),
        sphere: omega(n),
        scale: diam,
    };
    let chunk = opts.chunk.max(1);
    let chunks = opts.samples.div_ceil(chunk);
    let parts: Vec<(f64, f64, usize, usize)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(c as u64);
            let count = chunk.min(opts.samples - c * chunk);
            let (mut s1, mut s2, mut rej) = (0.0, 0.0, 0usize);
            let mut done = 0;
            while done < count {
                match sampler.sample(&mut rng) {
                    Some(v) => {
                        s1 += v;
                        s2 += v * v;
                        done += 1;
                    }
                    None => {
                        rej += 1;
                        if rej > 10 * count + 100 {
                            break;
                        }
                    }
                }
            }
            (s1, s2, done, rej)
        })
        .collect();
    let (mut s1, mut s2, mut cnt, mut rej) = (0.0, 0.0, 0usize, 0usize);
    for (a, b, c, r) in parts {
        s1 += a;
        s2 += b;
        cnt += c;
        rej += r;
    }
    if cnt == 0 {
        return Err(Error::NonConvergent("every sample hit the singular set".into()));
    }
    let mean = s1 / cnt as f64;
    let var = (s2 / cnt as f64 - mean * mean).max(0.0);
    let se = (var / cnt as f64).sqrt();
    if !mean.is_finite() || !se.is_finite() {
        return Err(Error::NonFinite("Monte Carlo estimate".into()));
    }
    let mut est = EnergyEstimate::new(mean, se, Method::MonteCarlo);
    est.samples = Some(cnt);
    est.rejections = rej;
    est.warning = rej as f64 > 0.01 * cnt as f64;
    if opts.pairs != PairDomain::Inner {
        est.r_cut = Some(r_max);
        let w = if opts.pairs == PairDomain::Full { 2.0 } else { 1.0 };
        est.truncation = Some(w * tail_bound(n, sampler.vol, alpha, r_max));
    }
    Ok(est)
}

/// E_α(u, Ω) = [u]²_Ω + 2∬_{Ω×Ωᶜ}, the far tail bounded analytically and folded into the error.
pub fn energy_e<F: Field + ?Sized>(field: &F, domain: &Region, alpha: f64, opts: &McOptions) -> Result<EnergyEstimate> {
    if opts.r_cut.is_none() && !eventually_constant(field, domain) {
        return Err(Error::InvalidInput(
            "field not eventually constant and no bounding box given: set r_cut".into(),
        ));
    }
    let full = McOptions { pairs: PairDomain::Full, ..opts.clone() };
    let mut est = seminorm_mc_with(field, domain, alpha, &full)?;
    est.std_error += est.truncation.unwrap_or(0.0);
    Ok(est)
}

fn eventually_constant<F: Field + ?Sized>(field: &F, domain: &Region) -> bool {
    let n = domain.dim();
    let c = domain.center();
    let far = 1e3 * domain.diameter().max(1.0);
    let mut probes = Vec::new();
    for k in 0..n {
        for s in [-1.0, 1.0] {
            let mut x = c.clone();
            x[k] += s * far;
            probes.push(x);
        }
    }
    let vals: Vec<_> = probes.iter().map(|x| field.eval(x)).collect();
    match vals.first() {
        Some(Some(v0)) => vals.iter().all(|v| v.is_some_and(|v| (v - v0).norm() < 1e-12)),
        _ => false,
    }
}
