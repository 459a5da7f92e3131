mod common;

use fracmass::discrete::{build_lattice, discrete_energy, kuhn_interpolate, r_s_schedule, Lattice};
use fracmass::fields::{sample_to_lattice, AnalyticField, LatticeField};
use fracmass::geom::{sample_frame, Frame, Region};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn square_vortex(eps: f64) -> f64 {
    let lat = build_lattice(eps, &Frame::identity(2), &[0.5, 0.5], &Region::cube(2, -1.0, 1.0)).unwrap();
    let w = sample_to_lattice(&AnalyticField::planar_vortex([0.0, 0.0]), &lat).unwrap();
    discrete_energy(&w, &lat).unwrap()
}

fn random_field(lat: &Lattice, rng: &mut ChaCha8Rng) -> LatticeField {
    LatticeField { phases: (0..lat.num_sites()).map(|_| rng.random_range(-PI..PI)).collect() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn energy_is_gauge_invariant(seed in any::<u64>(), k in -64i32..64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lat = build_lattice(0.2, &sample_frame(3, &mut rng), &[0.1, 0.4, 0.7], &Region::cube(3, 0.0, 1.0)).unwrap();
        // dyadic phases and shift: every difference is computed exactly
        let w = LatticeField { phases: random_field(&lat, &mut rng).phases.iter().map(|p| (p * 256.0).round() / 256.0).collect() };
        let c = k as f64 / 16.0;
        let shifted = LatticeField { phases: w.phases.iter().map(|p| p + c).collect() };
        prop_assert_eq!(discrete_energy(&w, &lat).unwrap(), discrete_energy(&shifted, &lat).unwrap());
    }

    #[test]
    fn r_s_identity(r in 0.01..0.99f64, s in 0.01..0.99f64) {
        let rs = r_s_schedule(r, s).unwrap();
        prop_assert!(((1.0 - s) - 2.0 * r.ln().abs() / rs.ln().abs()).abs() < 1e-12);
    }

    #[test]
    fn kuhn_interpolant_is_site_exact_and_bounded(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cube = Region::cube(3, 0.0, 1.0);
        let lat = build_lattice(0.25, &sample_frame(3, &mut rng), &[0.2, 0.5, 0.8], &cube).unwrap();
        let w = random_field(&lat, &mut rng);
        let v = kuhn_interpolate(&w, &lat);
        for c in lat.cubes() {
            for &i in c {
                let z = v.eval(&lat.sites()[i]).unwrap();
                prop_assert!((z - w.value(i)).norm() < 1e-12);
            }
        }
        for _ in 0..64 {
            if let Some(z) = v.eval(&cube.sample_uniform(&mut rng)) {
                prop_assert!(z.norm() <= 1.0 + 1e-12);
            }
        }
    }
}

#[test]
fn energy_ignores_the_labelling_of_axes() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let domain = Region::cube(2, -1.0, 1.0);
    let a = build_lattice(0.1, &Frame::identity(2), &[0.5, 0.5], &domain).unwrap();
    let swapped = Frame { vectors: vec![vec![0.0, 1.0], vec![1.0, 0.0]] };
    let b = build_lattice(0.1, &swapped, &[0.5, 0.5], &domain).unwrap();
    assert_eq!(a.num_sites(), b.num_sites());
    let wa = random_field(&a, &mut rng);
    // the same phase at the same point, stored under the other labelling
    let wb = LatticeField {
        phases: b
            .sites()
            .iter()
            .map(|x| {
                let i = a.sites().iter().position(|y| (y[0] - x[0]).abs() + (y[1] - x[1]).abs() < 1e-12).unwrap();
                wa.phases[i]
            })
            .collect(),
    };
    let (ea, eb) = (discrete_energy(&wa, &a).unwrap(), discrete_energy(&wb, &b).unwrap());
    assert!((ea - eb).abs() < 1e-12 * ea);
}

#[test]
fn lattice_vortex_matches_direct_sum() {
    for k in [4, 5, 6] {
        let eps = 0.5f64.powi(k);
        let (lib, oracle) = (square_vortex(eps), common::lattice_vortex_oracle(eps));
        assert!((lib - oracle).abs() < 1e-12 * oracle, "ε = 2^-{k}: {lib} vs {oracle}");
    }
    // frozen from the direct sum
    assert!((square_vortex(1.0 / 64.0) - 4.206916374495837).abs() < 1e-10);
}

#[test]
fn lattice_vortex_approaches_pi() {
    // the lattice core constant decays like 1/|log ε|, so 25% needs ε ≤ 2⁻⁹
    let e = common::lattice_vortex_oracle(0.5f64.powi(9));
    assert!((e - PI).abs() < 0.25 * PI, "{e}");
    let coarse = common::lattice_vortex_oracle(0.5f64.powi(6));
    assert!((e - PI).abs() < (coarse - PI).abs());
}

#[test]
fn eps_must_fit_the_domain() {
    assert!(build_lattice(0.6, &Frame::identity(2), &[0.5, 0.5], &Region::cube(2, 0.0, 1.0)).is_err());
}
