use crate::config::ExperimentConfig;
use crate::output::Sink;
use fracmass::discrete::{
    build_lattice, check_e_ge_gl_grad, discrete_energy, edge_statistics_averaged, gl_energy, kuhn_interpolate, r_s_schedule, Lattice,
};
use fracmass::energy::{
    appendix_integral, crofton_check, energy_e, fourier_const, limit_constant, slab_vortex_energy,
    slab_vortex_total_reduced, vortex_limit_1d, CroftonCurve, McOptions, SlabMethod,
};
use fracmass::fields::{sample_to_lattice, AnalyticField, LatticeField};
use fracmass::geom::{random_direction, sample_frame, Component, ComponentKind, Frame, Region, SurfaceSpec, TubeChart};
use fracmass::linkdeg::{circle_loop, gauss_linking, intersection_linking, loop_distance, Disk};
use fracmass::minimize::{
    assemble_kernel, degree_audit, field_degree_audit, minimize_projected, pinned_sites, MinimizeOptions,
    KERNEL_BUDGET,
};
use fracmass::special::omega;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug)]
pub struct RunError {
    pub context: String,
    pub message: String,
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.context, self.message)
    }
}

trait Context<T> {
    fn ctx(self, what: &str) -> Result<T, RunError>;
}

impl<T, E: std::fmt::Display> Context<T> for Result<T, E> {
    fn ctx(self, what: &str) -> Result<T, RunError> {
        self.map_err(|e| RunError { context: what.to_string(), message: e.to_string() })
    }
}

pub const COMMANDS: [&str; 8] =
    ["vortex-limit", "slab", "mass", "minimize", "link", "crofton", "fourier-const", "discrete"];

pub fn run(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<(), RunError> {
    let command = cfg.command.clone().unwrap_or_default();
    match command.as_str() {
        "vortex-limit" => vortex_limit(cfg, sink),
        "slab" => slab(cfg, sink),
        "mass" => mass(cfg, sink),
        "minimize" => minimize(cfg, sink),
        "link" => link(cfg, sink),
        "crofton" => crofton(cfg, sink),
        "fourier-const" => fourier(cfg, sink),
        "discrete" => discrete(cfg, sink),
        other => Err(RunError { context: "command".into(), message: format!("unknown command {other:?}") }),
    }
}

#[derive(Serialize)]
struct VortexRow {
    command: &'static str,
    method: &'static str,
    s: f64,
    truncation: f64,
    tolerance: f64,
    value: f64,
    error: f64,
    target: f64,
    gap: f64,
    relative_gap: f64,
}

fn vortex_limit(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<(), RunError> {
    let grid = cfg.s_grid.clone().unwrap_or_else(|| vec![0.8, 0.9, 0.95, 0.99]);
    let t = cfg.truncation.unwrap_or(1000.0);
    let tol = cfg.tolerance.unwrap_or(1e-8);
    let appendix = appendix_integral(1e-12).ctx("vortex-limit: appendix integral")?;
    sink.line(format!("∫ dx/(1+x²)² = {appendix:.12} (π/2 = {:.12})", PI / 2.0));
    let mut rows = Vec::new();
    for &s in &grid {
        let v = vortex_limit_1d(s, t, tol).ctx(&format!("vortex-limit: s = {s}"))?;
        sink.line(format!(
            "s = {s:<5} (1-s)²[u⋆]² = {:.6} ± {:.1e}  gap to 2π² = {:.4} ({:.2}%)",
            v.value,
            v.error,
            v.gap,
            100.0 * v.relative_gap
        ));
        rows.push(VortexRow {
            command: "vortex-limit",
            method: "swapped-quadrature",
            s,
            truncation: t,
            tolerance: tol,
            value: v.value,
            error: v.error,
            target: 2.0 * PI * PI,
            gap: v.gap,
            relative_gap: v.relative_gap,
        });
    }
    sink.csv("vortex_limit", &rows)
}

#[derive(Serialize)]
struct SlabRow {
    command: &'static str,
    method: &'static str,
    n: usize,
    d: i32,
    s: f64,
    delta: f64,
    base_measure: f64,
    samples: usize,
    seed: u64,
    inner: f64,
    inner_error: f64,
    cross: f64,
    cross_error: f64,
    rescaled_inner: f64,
    rescaled_cross: f64,
    target: f64,
    reduced_total: f64,
}

fn slab(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<(), RunError> {
    let lo = cfg.base_lo.clone().unwrap_or_else(|| vec![0.0]);
    let hi = cfg.base_hi.clone().unwrap_or_else(|| vec![1.0]);
    if lo.len() != hi.len() || lo.iter().zip(&hi).any(|(a, b)| b <= a) {
        return Err(RunError { context: "slab".into(), message: "base_lo/base_hi must describe a box".into() });
    }
    let n = lo.len() + 2;
    let delta = cfg.delta.unwrap_or(0.5);
    let grid = cfg.s_grid.clone().unwrap_or_else(|| vec![0.99]);
    let degrees = cfg.degrees.clone().unwrap_or_else(|| vec![1, 2]);
    let samples = cfg.samples.unwrap_or(1_000_000);
    let seed = cfg.seed();
    let measure: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let mut rows = Vec::new();
    for &s in &grid {
        for &d in &degrees {
            let method = SlabMethod::MonteCarlo { samples, seed };
            let e = slab_vortex_energy(&lo, &hi, delta, d, s, &method).ctx(&format!("slab: s = {s}, d = {d}"))?;
            let reduced = slab_vortex_total_reduced(n, d, s, delta, measure).ctx("slab: reduced oracle")?;
            let k = (1.0 - s) * (1.0 - s);
            let target = limit_constant(n, &[((d * d) as f64, measure)]);
            sink.line(format!(
                "s = {s} d = {d}: (1-s)²·inner = {:.4} ± {:.4}, (1-s)²·cross = {:.4}, target {:.4}",
                e.rescaled_inner(),
                k * e.inner.std_error,
                e.rescaled_cross(),
                target
            ));
            rows.push(SlabRow {
                command: "slab",
                method: "montecarlo",
                n,
                d,
                s,
                delta,
                base_measure: measure,
                samples,
                seed,
                inner: e.inner.value,
                inner_error: e.inner.std_error,
                cross: e.cross.value,
                cross_error: e.cross.std_error,
                rescaled_inner: e.rescaled_inner(),
                rescaled_cross: e.rescaled_cross(),
                target,
                reduced_total: reduced,
            });
        }
    }
    for &s in &grid {
        let at = |d: i32| rows.iter().find(|r| r.s == s && r.d == d).map(|r| r.inner);
        if let (Some(a), Some(b)) = (at(1), at(2)) {
            sink.line(format!("s = {s}: inner(d=2)/inner(d=1) = {:.4}", b / a));
        }
    }
    sink.csv("slab", &rows)
}

/// Box around the tubes of every component, padded by a quarter of its extent.
pub fn default_domain(spec: &SurfaceSpec) -> Region {
    let n = spec.ambient_dim;
    let t = spec.tube_radius;
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    let mut grow = |a: &[f64], b: &[f64]| {
        for k in 0..n {
            lo[k] = lo[k].min(a[k]);
            hi[k] = hi[k].max(b[k]);
        }
    };
    for c in &spec.components {
        match &c.kind {
            ComponentKind::Circle3D { center, radius, .. } => {
                let r = radius + t;
                let a: Vec<f64> = center.iter().map(|v| v - r).collect();
                let b: Vec<f64> = center.iter().map(|v| v + r).collect();
                grow(&a, &b);
            }
            ComponentKind::PointVortex2D { center } => {
                let a: Vec<f64> = center.iter().map(|v| v - t).collect();
                let b: Vec<f64> = center.iter().map(|v| v + t).collect();
                grow(&a, &b);
            }
            ComponentKind::Slab { lo: l, hi: h, delta } => {
                let mut a: Vec<f64> = l.iter().map(|v| v - delta).collect();
                let mut b: Vec<f64> = h.iter().map(|v| v + delta).collect();
                a.extend([-delta, -delta]);
                b.extend([*delta, *delta]);
                grow(&a, &b);
            }
        }
    }
    let pad = 0.25 * lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0, f64::max);
    Region::Box { lo: lo.iter().map(|v| v - pad).collect(), hi: hi.iter().map(|v| v + pad).collect() }
}

#[derive(Serialize)]
struct MassRow {
    command: &'static str,
    method: &'static str,
    s: f64,
    alpha: f64,
    samples: usize,
    seed: u64,
    r_cut: Option<f64>,
    energy: f64,
    error: f64,
    truncation: Option<f64>,
    rescaled: f64,
    rescaled_error: f64,
    limit: f64,
    ratio: f64,
}

fn mass(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<(), RunError> {
    let spec = cfg.surface.clone().unwrap_or_else(|| SurfaceSpec::single_circle(1.0, 1, 0.5));
    let domain = cfg.domain.clone().unwrap_or_else(|| default_domain(&spec));
    let grid = cfg.s_grid.clone().unwrap_or_else(|| vec![0.5, 0.7, 0.9]);
    let samples = cfg.samples.unwrap_or(200_000);
    let seed = cfg.seed();
    let field = AnalyticField::competitor(&spec).ctx("mass: competitor")?;
    let charts = TubeChart::all(&spec).ctx("mass: tube charts")?;
    let weights: Vec<(f64, f64)> = spec.components.iter().map(|c| (c.multiplicity as f64, c.measure())).collect();
    let limit = limit_constant(spec.ambient_dim, &weights);
    let mut rows = Vec::new();
    for &s in &grid {
        let alpha = 0.5 * (1.0 + s);
        let opts = McOptions { samples, seed, r_cut: cfg.r_cut, charts: Some(charts.clone()), ..McOptions::default() };
        let e = energy_e(&field, &domain, alpha, &opts).ctx(&format!("mass: s = {s}"))?;
        let k = (1.0 - s) * (1.0 - s);
        sink.line(format!(
            "s = {s}: E = {:.4} ± {:.4}, (1-s)²E = {:.4}, limit {:.4}",
            e.value,
            e.std_error,
            k * e.value,
            limit
        ));
        rows.push(MassRow {
            command: "mass",
            method: e.method.name(),
            s,
            alpha,
            samples,
            seed,
            r_cut: e.r_cut,
            energy: e.value,
            error: e.std_error,
            truncation: e.truncation,
            rescaled: k * e.value,
            rescaled_error: k * e.std_error,
            limit,
            ratio: k * e.value / limit,
        });
    }
    sink.csv("mass", &rows)
}

#[derive(Serialize)]
struct HistoryRow {
    iteration: usize,
    energy: f64,
    step: Option<f64>,
}

#[derive(Serialize)]
struct MinimizeSummary<'a> {
    command: &'static str,
    s: f64,
    h: f64,
    r_cut: f64,
    kernel_entries: usize,
    kernel_bias_bound: f64,
    sites: usize,
    seed: u64,
    competitor_rescaled: f64,
    report: &'a fracmass::minimize::MinimizeReport,
}

fn minimize(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<(), RunError> {
    let spec = cfg.surface.clone().unwrap_or_else(|| SurfaceSpec::single_circle(1.0, 1, 0.9));
    let domain = cfg.domain.clone().unwrap_or_else(|| Region::cube(spec.ambient_dim, -2.0, 2.0));
    let h = cfg.h.unwrap_or(0.2);
    let s = cfg.s_grid.as_ref().and_then(|g| g.first().copied()).unwrap_or(0.5);
    let alpha = 0.5 * (1.0 + s);
    let r_cut = cfg.r_cut.unwrap_or(0.25 * domain.diameter());
    let delta_pin = cfg.delta_pin.unwrap_or(2.0 * h);
    let n_loops = cfg.loops.unwrap_or(64);
    let seed = cfg.seed();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.ambient_dim;
    let lattice = build_lattice(h, &Frame::identity(n), &vec![0.5; n], &domain).ctx("minimize: lattice")?;
    let field = AnalyticField::competitor(&spec).ctx("minimize: competitor")?;
    let w = sample_to_lattice(&field, &lattice).ctx("minimize: sampling the competitor")?;
    let kernel = assemble_kernel(&lattice, alpha, r_cut, KERNEL_BUDGET).ctx("minimize: kernel")?;
    let pins = pinned_sites(&field, &lattice, delta_pin);
    let before = degree_audit(&w.phases, &lattice, &spec, n_loops, delta_pin, &mut rng).ctx("minimize: audit")?;
    let opts = MinimizeOptions {
        step: cfg.step,
        max_iter: cfg.max_iter.unwrap_or(500),
        tol: cfg.tol.unwrap_or(1e-6),
        ..MinimizeOptions::default()
    };
    let mut report =
        minimize_projected(&w.phases, &kernel, &pins, &lattice.plaquettes(), &opts).ctx("minimize: descent")?;
    let after = degree_audit(&report.phases, &lattice, &spec, n_loops, delta_pin, &mut rng).ctx("minimize: audit")?;
    let k = (1.0 - s) * (1.0 - s);
    // the kernel sum counts each unordered pair once
    report.rescaled_mass = Some(2.0 * k * report.final_energy);
    sink.line(format!(
        "{} sites, {} kernel entries, {} pinned; energy {:.4} -> {:.4} in {} iterations",
        lattice.num_sites(),
        kernel.nnz(),
        report.pinned,
        report.initial_energy,
        report.final_energy,
        report.iterations
    ));
    sink.line(format!(
        "degree audit: {} mismatches before, {} after ({} loops)",
        before.mismatches, after.mismatches, n_loops
    ));
    sink.line(format!(
        "rescaled mass bracket: minimizer {:.4} <= competitor {:.4}",
        2.0 * k * report.final_energy,
        2.0 * k * report.initial_energy
    ));
    report.audit_before = Some(before);
    report.audit_after = Some(after);
    let history: Vec<HistoryRow> = report
        .history
        .iter()
        .enumerate()
        .map(|(i, e)| HistoryRow { iteration: i, energy: *e, step: i.checked_sub(1).map(|j| report.steps[j]) })
        .collect();
    sink.csv("minimize_history", &history)?;
    let summary = MinimizeSummary {
        command: "minimize",
        s,
        h,
        r_cut,
        kernel_entries: kernel.nnz(),
        kernel_bias_bound: kernel.bias_bound,
        sites: lattice.num_sites(),
        seed,
        competitor_rescaled: 2.0 * k * report.initial_energy,
        report: &report,
    };
    sink.json("minimize", &summary)?;
    let phases = LatticeField { phases: report.phases.clone() };
    sink.binary("minimize_phases", n, h, &phases)
}

#[derive(Serialize)]
struct LinkRow {
    command: &'static str,
    configuration: String,
    gauss: f64,
    intersections: Option<i64>,
    agree: Option<bool>,
}

#[derive(Serialize)]
struct AuditCsvRow {
    command: &'static str,
    multiplicity: u32,
    kind: String,
    expected: u64,
    measured: i64,
    matched: bool,
}

fn random_circle<R: Rng + ?Sized>(rng: &mut R) -> ([f64; 3], f64, [f64; 3]) {
    let c = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
    let r = rng.random_range(0.5..1.5);
    let v = random_direction(3, rng);
    (c, r, [v[0], v[1], v[2]])
}

fn link(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<(), RunError> {
    let seed = cfg.seed();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = 512;
    let mut rows = Vec::new();
    let a = circle_loop([0.0; 3], 1.0, [0.0, 0.0, 1.0], m);
    let hopf = circle_loop([1.0, 0.0, 0.0], 1.0, [0.0, 1.0, 0.0], m);
    let apart = circle_loop([3.0, 0.0, 0.0], 1.0, [0.0, 1.0, 0.0], m);
    for (name, b) in [("hopf", &hopf), ("unlinked", &apart)] {
        let g = gauss_linking(&a, b).ctx("link: gauss integral")?;
        sink.line(format!("{name}: gauss linking = {g:.6}"));
        rows.push(LinkRow { command: "link", configuration: name.into(), gauss: g, intersections: None, agree: None });
    }
    let wanted = cfg.configurations.unwrap_or(20);
    let mut agree = 0;
    let mut tries = 0;
    let mut found = 0;
    while found < wanted {
        tries += 1;
        if tries > 100 * wanted + 100 {
            return Err(RunError { context: "link".into(), message: "too many rejected configurations".into() });
        }
        let (c1, r1, n1) = random_circle(&mut rng);
        let (c2, r2, n2) = random_circle(&mut rng);
        let la = circle_loop(c1, r1, n1, m);
        let lb = circle_loop(c2, r2, n2, m);
        if loop_distance(&la, &lb) < 0.05 {
            continue;
        }
        let Ok(g) = gauss_linking(&la, &lb) else { continue };
        let Ok(k) = intersection_linking(&la, &Disk { center: c2, radius: r2, normal: n2 }) else { continue };
        let ok = (g - k as f64).abs() < 1e-3 || (g + k as f64).abs() < 1e-3;
        agree += ok as usize;
        found += 1;
        rows.push(LinkRow {
            command: "link",
            configuration: format!("random-{found}"),
            gauss: g,
            intersections: Some(k),
            agree: Some(ok),
        });
    }
    sink.line(format!("random configurations: {agree}/{wanted} agree with intersection counting"));
    sink.csv("link", &rows)?;
    let degrees = cfg.degrees.clone().unwrap_or_else(|| vec![1, 2, 3]);
    let n_loops = cfg.loops.unwrap_or(64);
    let mut audit_rows = Vec::new();
    for d in degrees {
        if d <= 0 {
            return Err(RunError { context: "link".into(), message: format!("degree {d} must be positive") });
        }
        let spec = match &cfg.surface {
            Some(s) => SurfaceSpec {
                components: s.components.iter().map(|c| Component { multiplicity: d as u32, ..c.clone() }).collect(),
                ..s.clone()
            },
            None => SurfaceSpec::single_circle(1.0, d as u32, 0.5),
        };
        let field = AnalyticField::competitor(&spec).ctx("link: competitor")?;
        let region = default_domain(&spec);
        let audit = field_degree_audit(&field, &spec, &region, n_loops, &mut rng).ctx("link: degree audit")?;
        sink.line(format!("multiplicity {d}: {} mismatches on {n_loops} loops", audit.mismatches));
        audit_rows.extend(audit.rows.into_iter().map(|r| AuditCsvRow {
            command: "link",
            multiplicity: d as u32,
            kind: r.kind,
            expected: r.expected,
            measured: r.measured,
            matched: r.matched,
        }));
    }
    sink.csv("link_audit", &audit_rows)
}

#[derive(Serialize)]
struct CroftonRow {
    command: &'static str,
    curve: &'static str,
    samples: usize,
    seed: u64,
    lhs: f64,
    lhs_error: f64,
    rhs: f64,
    beta: f64,
    length: f64,
    relative_error: f64,
    tangential: usize,
}

fn crofton(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<(), RunError> {
    let samples = cfg.samples.unwrap_or(100_000);
    let seed = cfg.seed();
    let curves = [
        ("unit-circle", CroftonCurve::Circle { center: [0.0, 0.0], radius: 1.0 }),
        (
            "unit-square",
            CroftonCurve::Polyline { points: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], closed: true },
        ),
    ];
    let mut rows = Vec::new();
    for (i, (name, curve)) in curves.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        let r = crofton_check(curve, samples, &mut rng);
        sink.line(format!("{name}: E[#crossings] = {:.4} ± {:.4} vs β·length = {:.4}", r.lhs, r.lhs_error, r.rhs));
        rows.push(CroftonRow {
            command: "crofton",
            curve: name,
            samples,
            seed,
            lhs: r.lhs,
            lhs_error: r.lhs_error,
            rhs: r.rhs,
            beta: r.beta,
            length: r.length,
            relative_error: (r.lhs - r.rhs).abs() / r.rhs,
            tangential: r.tangential,
        });
    }
    sink.csv("crofton", &rows)
}

#[derive(Serialize)]
struct FourierRow {
    command: &'static str,
    method: &'static str,
    n: usize,
    alpha: f64,
    h: f64,
    value: f64,
    error: f64,
    exact: f64,
    rescaled: f64,
    target: f64,
    relative_gap: f64,
}

fn default_fourier_h(n: usize) -> f64 {
    match n {
        1 => 0.05,
        2 => 0.25,
        _ => 0.5,
    }
}

fn fourier(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<(), RunError> {
    let dims = cfg.dims.clone().unwrap_or_else(|| vec![1, 2, 3]);
    let alpha = cfg.alpha.unwrap_or(0.99);
    let mut rows = Vec::new();
    for n in dims {
        let h = cfg.h.unwrap_or_else(|| default_fourier_h(n));
        let c = fourier_const(n, alpha, h, 1.0).ctx(&format!("fourier-const: n = {n}"))?;
        let target = omega(n) / (2.0 * n as f64);
        let rescaled = (1.0 - alpha) * c.value;
        sink.line(format!(
            "n = {n}: C_F = {:.4} ± {:.4} (closed form {:.4}); (1-α)C_F = {:.4} vs ω/(2n) = {:.4}",
            c.value, c.error, c.exact, rescaled, target
        ));
        rows.push(FourierRow {
            command: "fourier-const",
            method: "grid-gaussian",
            n,
            alpha,
            h: c.h,
            value: c.value,
            error: c.error,
            exact: c.exact,
            rescaled,
            target,
            relative_gap: (rescaled - target).abs() / target,
        });
    }
    sink.csv("fourier_const", &rows)
}

#[derive(Serialize)]
struct DiscreteEnergyRow {
    command: &'static str,
    eps: f64,
    sites: usize,
    energy: f64,
    target: f64,
    relative_gap: f64,
    gl_energy: f64,
}

#[derive(Serialize)]
struct GlRow {
    command: &'static str,
    instance: usize,
    eps: f64,
    lhs: f64,
    rhs: f64,
    pass: bool,
}

#[derive(Serialize)]
struct EdgeRow {
    command: &'static str,
    eps: f64,
    s: f64,
    draws: usize,
    seed: u64,
    oscillation_sum: f64,
    edges: usize,
}

fn random_field<R: Rng + ?Sized>(lattice: &Lattice, rng: &mut R) -> LatticeField {
    LatticeField { phases: (0..lattice.num_sites()).map(|_| rng.random_range(-PI..PI)).collect() }
}

fn discrete(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<(), RunError> {
    let seed = cfg.seed();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let square = Region::cube(2, -1.0, 1.0);
    let vortex = AnalyticField::planar_vortex([0.0, 0.0]);
    let eps_list = cfg.eps.clone().unwrap_or_else(|| vec![1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0]);
    let beta = cfg.beta.unwrap_or(0.5);
    let c0 = cfg.c0.unwrap_or(1.0);
    let mut rows = Vec::new();
    for &eps in &eps_list {
        let lat = build_lattice(eps, &Frame::identity(2), &[0.5, 0.5], &square).ctx("discrete: lattice")?;
        let w = sample_to_lattice(&vortex, &lat).ctx("discrete: sampling")?;
        let e = discrete_energy(&w, &lat).ctx("discrete: energy")?;
        let gl = gl_energy(&kuhn_interpolate(&w, &lat), eps, beta, c0);
        sink.line(format!("ε = {eps}: planar vortex discrete energy {e:.5} (π = {PI:.5}), GL energy {gl:.5}"));
        rows.push(DiscreteEnergyRow {
            command: "discrete",
            eps,
            sites: lat.num_sites(),
            energy: e,
            target: PI,
            relative_gap: (e - PI).abs() / PI,
            gl_energy: gl,
        });
    }
    sink.csv("discrete_energy", &rows)?;

    let instances = cfg.instances.unwrap_or(1000);
    let cube = Region::cube(3, 0.0, 1.0);
    let mut gl = Vec::with_capacity(instances);
    for i in 0..instances {
        let frame = sample_frame(3, &mut rng);
        let z: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
        let lat = match build_lattice(0.24, &frame, &z, &cube) {
            Ok(l) => l,
            Err(_) => build_lattice(0.24, &Frame::identity(3), &z, &cube).ctx("discrete: lattice")?,
        };
        let w = random_field(&lat, &mut rng);
        let c = check_e_ge_gl_grad(&w, &lat).ctx("discrete: E ≥ GL")?;
        gl.push(GlRow { command: "discrete", instance: i, eps: lat.eps, lhs: c.lhs, rhs: c.rhs, pass: c.pass });
    }
    let violations = gl.iter().filter(|r| !r.pass).count();
    sink.line(format!("E ≥ GL gradient term: {violations} violations on {instances} random fields"));
    sink.csv("discrete_gl", &gl)?;

    let grid = cfg.s_grid.clone().unwrap_or_else(|| vec![0.5, 0.7, 0.9]);
    let draws = 32;
    let mut edges = Vec::new();
    for &s in &grid {
        let st = edge_statistics_averaged(&vortex, &square, 1.0 / 32.0, s, None, draws, &mut rng)
            .ctx("discrete: edge statistics")?;
        sink.line(format!("s = {s}: Σ ε^(n-1-s) osc² = {:.5}", st.oscillation_sum));
        edges.push(EdgeRow {
            command: "discrete",
            eps: st.eps,
            s,
            draws,
            seed,
            oscillation_sum: st.oscillation_sum,
            edges: st.edges,
        });
    }
    let eps = r_s_schedule(0.5, 0.5).ctx("discrete: r_s")?;
    sink.line(format!("r_s(0.5, 0.5) = {eps}"));
    sink.csv("discrete_edges", &edges)
}
