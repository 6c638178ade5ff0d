mod common;

use std::time::Instant;

use common::{brute_force_weak_collision, sphere_rule, MeanRelativeOracle};
use kinetic_core::collision::{
    conservation_fix, tested_moments, BoltzmannOperator, CollisionKernel, CollisionQuadrature,
};
use kinetic_core::velocity_space::{project_maxwellian, VelocityBasis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn two_maxwellians(b: &VelocityBasis<f64>) -> Vec<f64> {
    let m1 = project_maxwellian(1.0, [0.3, -0.1, 0.0], 0.35, b).unwrap();
    let m2 = project_maxwellian(0.6, [-0.4, 0.2, 0.1], 0.3, b).unwrap();
    m1.coeffs.iter().zip(&m2.coeffs).map(|(a, c)| a + c).collect()
}

#[test]
fn matches_brute_force_oracle_at_order_two() {
    let b = VelocityBasis::<f64>::new(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let g: Vec<f64> = (0..b.ndof()).map(|_| rng.gen_range(0.2..1.5)).collect();
    let op = BoltzmannOperator::new(&b, CollisionKernel::maxwell(), CollisionQuadrature::default_for(2)).unwrap();
    let q = op.apply(&g);
    let nodes = b.nodes1d().to_vec();
    let gf = |v: [f64; 3]| b.interpolate_poly(&g, v);
    let oracle = brute_force_weak_collision(&gf, &nodes, 0.0, 6, &sphere_rule(24, 20));
    let scale = max_abs(&oracle);
    let err = q.iter().zip(&oracle).fold(0.0f64, |m, (a, c)| m.max((a - c).abs()));
    assert!(err < 1e-6 * scale, "relative deviation {:e}", err / scale);
}

#[test]
fn maxwellian_is_annihilated() {
    for n in 2..=3 {
        let b = VelocityBasis::<f64>::new(n).unwrap();
        let op = BoltzmannOperator::new(&b, CollisionKernel::maxwell(), CollisionQuadrature::default_for(n)).unwrap();
        let m = project_maxwellian(1.4, [0.0; 3], 0.5, &b).unwrap();
        let parts = op.apply_parts(&m.coeffs);
        let q: Vec<f64> = parts.gain.iter().zip(&parts.loss).map(|(a, c)| a - c).collect();
        assert!(max_abs(&q) < 1e-12 * max_abs(&parts.loss), "N = {n}: {:e}", max_abs(&q));
    }
}

#[test]
fn invariants_of_bimodal_data() {
    let b = VelocityBasis::<f64>::new(3).unwrap();
    let g = two_maxwellians(&b);
    for beta in [0.0, 1.0] {
        let op = BoltzmannOperator::new(&b, CollisionKernel::new(beta, 1.0).unwrap(), CollisionQuadrature::default_for(3))
            .unwrap();
        let mut q = op.apply(&g);
        let m = tested_moments(&q, &b);
        assert!(max_abs(&m) < 1e-6 * max_abs(&q), "beta = {beta}: {m:?}");
        conservation_fix(&mut q, &b).unwrap();
        assert!(max_abs(&tested_moments(&q, &b)) < 1e-13 * max_abs(&q));
    }
}

#[test]
fn application_cost_at_order_three() {
    let b = VelocityBasis::<f64>::new(3).unwrap();
    let op = BoltzmannOperator::new(&b, CollisionKernel::maxwell(), CollisionQuadrature::default_for(3)).unwrap();
    let g = two_maxwellians(&b);
    let t = Instant::now();
    for _ in 0..10 {
        std::hint::black_box(op.apply(&g));
    }
    eprintln!("N = 3 application: {:?}", t.elapsed() / 10);
}

#[test]
fn mean_relative_oracle_agrees_with_brute_force() {
    // consistency of the two reference integrators on a Maxwellian-weighted
    // polynomial density
    let b = VelocityBasis::<f64>::new(2).unwrap();
    let g = |v: [f64; 3]| 1.0 + 0.3 * v[0] + 0.2 * v[1] * v[1] - 0.1 * v[0] * v[2];
    let f = |v: [f64; 3]| (-(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])).exp() * g(v);
    let nodes = b.nodes1d().to_vec();
    let brute = brute_force_weak_collision(&g, &nodes, 0.0, 6, &sphere_rule(24, 20));
    let oracle = MeanRelativeOracle {
        n_mean: 8,
        n_radial: 30,
        r_max_factor: 6.0,
        rel_sphere: sphere_rule(20, 40),
        scat_sphere: sphere_rule(20, 20),
    };
    let m = 5;
    let phi = |v: [f64; 3]| common::lagrange3(&nodes, m, v);
    let val = oracle.weak(&f, &phi, 0.0, [0.0; 3], std::f64::consts::FRAC_1_SQRT_2);
    assert!((val - brute[m]).abs() < 1e-8 * max_abs(&brute), "{val} vs {}", brute[m]);
}

#[test]
fn hard_sphere_kernel_matches_mean_relative_oracle() {
    let b = VelocityBasis::<f64>::new(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g: Vec<f64> = (0..b.ndof()).map(|_| rng.gen_range(0.2..1.5)).collect();
    let op = BoltzmannOperator::new(&b, CollisionKernel::new(1.0, 1.0).unwrap(), CollisionQuadrature::default_for(2))
        .unwrap();
    let q = op.apply(&g);
    let f = |v: [f64; 3]| (-(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])).exp() * b.interpolate_poly(&g, v);
    let nodes = b.nodes1d().to_vec();
    let oracle = MeanRelativeOracle {
        n_mean: 8,
        n_radial: 32,
        r_max_factor: 6.5,
        rel_sphere: sphere_rule(24, 48),
        scat_sphere: sphere_rule(16, 32),
    };
    let scale = max_abs(&q);
    for m in [0, 13] {
        let phi = |v: [f64; 3]| common::lagrange3(&nodes, m, v);
        let val = oracle.weak(&f, &phi, 1.0, [0.0; 3], std::f64::consts::FRAC_1_SQRT_2);
        assert!((val - q[m]).abs() < 1e-8 * scale, "m = {m}: {val} vs {}", q[m]);
    }
}
