use fracmass::geom::{dist, sample_frame, sample_plane2, Component, Region, SurfaceSpec, TubeChart};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tilted_circle() -> TubeChart {
    let spec = SurfaceSpec::new(3, vec![Component::circle([0.3, -0.2, 0.5], 1.4, [1.0, 2.0, -0.5], 1)], 0.6).unwrap();
    TubeChart::new(&spec, 0).unwrap()
}

proptest! {
    #[test]
    fn haar_frames_are_orthonormal(seed in any::<u64>(), n in 2usize..6) {
        let f = sample_frame(n, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(f.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn planes_are_orthonormal(seed in any::<u64>(), n in 2usize..5) {
        let p = sample_plane2(&Region::cube(n, -1.0, 1.0), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert!(p.defect() < 1e-12);
    }

    #[test]
    fn chart_is_a_fiber_isometry(sigma in 0.0..8.0f64, p in prop::array::uniform2(-0.6..0.6f64), q in prop::array::uniform2(-0.6..0.6f64)) {
        let c = tilted_circle();
        let a = c.eval(&[sigma], p).unwrap();
        let b = c.eval(&[sigma], q).unwrap();
        let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
        prop_assert!((dist(&a, &b) - d).abs() < 1e-12);
    }
}

#[test]
fn chart_round_trip() {
    let c = tilted_circle();
    let period = c.period().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    use rand::Rng;
    for _ in 0..1000 {
        let sigma = rng.random_range(0.0..period);
        let p = [rng.random_range(-0.6..0.6), rng.random_range(-0.6..0.6)];
        let x = c.eval(&[sigma], p).unwrap();
        let (s2, p2) = c.inverse(&x).unwrap();
        let ds = (s2[0] - sigma).abs().min(period - (s2[0] - sigma).abs());
        assert!(ds < 1e-10 && (p2[0] - p[0]).abs() < 1e-10 && (p2[1] - p[1]).abs() < 1e-10);
    }
}

#[test]
fn plane_projection_statistics() {
    // E|P_L e₁|² = 2/n for Haar-distributed planes
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in [3usize, 4] {
        let m = 100_000;
        let mean: f64 = (0..m)
            .map(|_| {
                let p = sample_plane2(&Region::cube(n, -1.0, 1.0), &mut rng).unwrap();
                p.e[0] * p.e[0] + p.f[0] * p.f[0]
            })
            .sum::<f64>()
            / m as f64;
        let want = 2.0 / n as f64;
        assert!((mean - want).abs() < 0.01 * want, "n = {n}: {mean}");
    }
}

#[test]
fn overlapping_tubes_are_rejected() {
    let comps = vec![
        Component::circle([0.0, 0.0, 0.0], 1.0, [0.0, 0.0, 1.0], 1),
        Component::circle([0.0, 0.0, 0.5], 1.0, [0.0, 0.0, 1.0], 1),
    ];
    assert!(SurfaceSpec::new(3, comps, 0.3).is_err());
}
