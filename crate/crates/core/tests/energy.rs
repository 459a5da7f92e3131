mod common;

use fracmass::energy::{
    energy_e, fourier_const_exact, limit_constant, line_seminorm, seminorm_grid, seminorm_mc_with, slab_vortex_total_reduced,
    vortex_limit_1d, McOptions,
};
use fracmass::fields::{AnalyticField, Field};
use fracmass::geom::{Frame, Region};
use fracmass::special::omega;
use proptest::prelude::*;
use std::f64::consts::PI;

fn grid_value<F: Field + ?Sized>(f: &F, domain: &Region, alpha: f64, h: f64) -> f64 {
    seminorm_grid(f, domain, alpha, h).unwrap().estimate.value
}

fn square(c: [f64; 2], half: f64) -> Region {
    Region::Box { lo: vec![c[0] - half, c[1] - half], hi: vec![c[0] + half, c[1] + half] }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn grid_scaling_is_exact(lambda in 0.2..5.0f64, alpha in 0.55..0.95f64, vortex in any::<bool>()) {
        let base = if vortex { AnalyticField::planar_vortex([0.15, -0.1]) } else { AnalyticField::Gaussian { n: 2, scale: 0.4 } };
        let e1 = grid_value(&base, &Region::cube(2, -1.0, 1.0), alpha, 0.125);
        let e2 = grid_value(&base.scaled(lambda), &Region::cube(2, -lambda, lambda), alpha, lambda * 0.125);
        prop_assert!((e2 / (e1 * lambda.powf(2.0 - 2.0 * alpha)) - 1.0).abs() < 1e-10);
    }
}

#[test]
fn grid_respects_lattice_symmetries() {
    // a quarter turn about the center and a translation by whole cells map the grid onto itself
    let alpha = 0.7;
    let h = 0.125;
    let f = AnalyticField::planar_vortex([0.2, -0.3]);
    let e0 = grid_value(&f, &Region::cube(2, -1.0, 1.0), alpha, h);
    let quarter = Frame { vectors: vec![vec![0.0, 1.0], vec![-1.0, 0.0]] };
    let e1 = grid_value(&AnalyticField::planar_vortex([0.2, -0.3]).rotated(quarter), &Region::cube(2, -1.0, 1.0), alpha, h);
    let moved = AnalyticField::Transformed {
        inner: Box::new(AnalyticField::planar_vortex([0.2, -0.3])),
        lambda: 1.0,
        rotation: None,
        shift: vec![0.5, -0.25],
    };
    let e2 = grid_value(&moved, &square([0.5, -0.25], 1.0), alpha, h);
    assert!((e1 / e0 - 1.0).abs() < 1e-10, "{e0} {e1}");
    assert!((e2 / e0 - 1.0).abs() < 1e-10, "{e0} {e2}");
}

#[test]
fn seminorm_grows_with_the_domain() {
    let f = AnalyticField::Gaussian { n: 2, scale: 0.5 };
    let inner = grid_value(&f, &Region::cube(2, -0.5, 0.5), 0.75, 0.125);
    let outer = grid_value(&f, &Region::cube(2, -1.0, 1.0), 0.75, 0.125);
    assert!(inner < outer);
}

#[test]
fn power_map_energy_is_at_most_d_squared() {
    let domain = Region::cube(2, -1.0, 1.0);
    let base = grid_value(&AnalyticField::planar_vortex([0.1, 0.05]), &domain, 0.6, 0.0625);
    for d in [2, 3] {
        let est = seminorm_grid(&AnalyticField::planar_vortex([0.1, 0.05]).power(d), &domain, 0.6, 0.0625).unwrap();
        let bound = (d * d) as f64 * base;
        assert!(est.estimate.value <= bound + 3.0 * est.estimate.std_error, "d = {d}");
    }
}

#[test]
fn full_energy_dominates_the_seminorm() {
    let spec = fracmass::geom::SurfaceSpec::single_circle(1.0, 1, 0.5);
    let f = AnalyticField::competitor(&spec).unwrap();
    let domain = Region::cube(3, -1.6, 1.6);
    let opts = McOptions { samples: 100_000, seed: 4, ..Default::default() };
    let e = energy_e(&f, &domain, 0.75, &opts).unwrap();
    let u = seminorm_mc_with(&f, &domain, 0.75, &McOptions { seed: 5, ..opts }).unwrap();
    assert!(e.value - u.value > -3.0 * (e.std_error + u.std_error));
}

#[test]
fn monte_carlo_agrees_with_grid() {
    let cases: Vec<(AnalyticField, f64)> = vec![
        (AnalyticField::Gaussian { n: 2, scale: 0.3 }, 0.6),
        (AnalyticField::Gaussian { n: 2, scale: 0.6 }, 0.8),
        (AnalyticField::planar_vortex([0.0, 0.0]), 0.6),
        (AnalyticField::planar_vortex([0.3, -0.2]), 0.7),
        (AnalyticField::planar_vortex([-0.4, 0.1]), 0.55),
        (AnalyticField::planar_vortex([0.2, 0.2]).power(2), 0.6),
        (AnalyticField::Gaussian { n: 2, scale: 0.45 }.scaled(1.5), 0.65),
        (AnalyticField::planar_vortex([0.0, 0.5]).scaled(0.8), 0.6),
        (AnalyticField::Gaussian { n: 2, scale: 0.2 }, 0.75),
        (AnalyticField::planar_vortex([0.5, 0.5]), 0.65),
    ];
    let domain = Region::cube(2, -1.0, 1.0);
    for (i, (f, alpha)) in cases.iter().enumerate() {
        let g = seminorm_grid(f, &domain, *alpha, 1.0 / 32.0).unwrap().estimate;
        let m = seminorm_mc_with(f, &domain, *alpha, &McOptions { samples: 200_000, seed: i as u64, ..Default::default() })
            .unwrap();
        let sigma = (g.std_error.powi(2) + m.std_error.powi(2)).sqrt();
        assert!((g.value - m.value).abs() < 3.0 * sigma, "case {i}: grid {} ± {}, mc {} ± {}", g.value, g.std_error, m.value, m.std_error);
    }
}

#[test]
fn vortex_table_matches_frozen_oracle() {
    // values from the angle-parametrized double integral in tests/common
    let frozen = [(0.8, 25.2341401), (0.9, 22.4764777), (0.95, 21.1069915), (0.99, 20.0128130)];
    for (s, v) in frozen {
        let r = vortex_limit_1d(s, 1000.0, 1e-8).unwrap();
        assert!((r.value - v).abs() < 1e-6 * v, "s = {s}: {}", r.value);
    }
}

#[test]
fn frozen_oracle_is_reproduced() {
    let v = common::vortex_limit_oracle(0.9);
    assert!((v - 22.4764777).abs() < 1e-6 * v, "{v}");
}

#[test]
fn line_seminorm_matches_angle_oracle() {
    for (s, a) in [(0.5, 3.0), (0.9, 20.0), (0.99, 100.0)] {
        let lib = (1.0 - s) * line_seminorm(s, a, 1e-9).unwrap();
        let oracle = common::line_oracle(s, a);
        assert!((lib - oracle).abs() < 1e-6 * oracle, "s = {s}: {lib} vs {oracle}");
    }
}

#[test]
fn fourier_constant_closed_forms() {
    // unitary angular-frequency convention: C_F(1, ½) = 2π
    assert!((fourier_const_exact(1, 0.5) - 2.0 * PI).abs() < 1e-12);
    for n in 1..=3 {
        let v = (1.0 - 0.999999) * fourier_const_exact(n, 0.999999);
        let target = omega(n) / (2.0 * n as f64);
        assert!((v - target).abs() < 1e-4 * target, "n = {n}");
    }
}

#[test]
fn sphere_areas() {
    assert!((omega(1) - 2.0).abs() < 1e-14);
    assert!((omega(2) - 2.0 * PI).abs() < 1e-13);
    assert!((omega(3) - 4.0 * PI).abs() < 1e-13);
    assert!((limit_constant(3, &[(1.0, 1.0)]) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
}

#[test]
fn reduced_slab_energy_tends_to_the_limit() {
    let target = 8.0 * PI * PI / 3.0;
    let far = 0.01f64.powi(2) * slab_vortex_total_reduced(3, 1, 0.99, 0.5, 1.0).unwrap();
    let near = 0.1f64.powi(2) * slab_vortex_total_reduced(3, 1, 0.9, 0.5, 1.0).unwrap();
    assert!((far - target).abs() < (near - target).abs());
    assert!((far - target).abs() < 0.02 * target, "{far}");
}
