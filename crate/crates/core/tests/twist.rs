mod common;

use std::f64::consts::{PI, TAU};

use rand::Rng;
use twistmap::construct::{analytic_bump, poisson_solve, toy_generating, toy_phi};
use twistmap::grid::c0_norm;
use twistmap::twist::{
    gg_residual, gg_residual_at, graph_residual, graph_transform, lipschitz_bound, GeneratingMap, GraphCandidate,
    GraphOptions, Termination,
};
use twistmap::{wrap_angle, Complex, GridFunction64, TrigPoly64};

use common::*;

fn cosine_map(eps: f64) -> GeneratingMap<f64> {
    let c = Complex::new(eps / 2.0, 0.0);
    GeneratingMap::from_potential(TrigPoly64::from_terms(1, &[(vec![1], c), (vec![-1], c)]).unwrap()).unwrap()
}

fn golden() -> f64 {
    TAU * (5f64.sqrt() - 1.0) / 2.0
}

#[test]
fn step_examples() {
    let shear = GeneratingMap::<f64>::integrable(1).unwrap();
    let (x, y) = shear.step(&[1.0], &[0.5]).unwrap();
    assert_eq!((x[0], y[0]), (1.5, 0.5));
    let (x, _) = shear.step(&[3.0], &[0.5]).unwrap();
    assert!((x[0] - (3.5 - TAU)).abs() < 1e-15);
    let toy = toy_generating::<f64>(1).unwrap();
    let (x, y) = toy.step(&[0.0], &[0.0]).unwrap();
    assert!(x[0].abs() < 1e-15 && (y[0] + 1.25).abs() < 1e-14);
}

#[test]
fn integrable_orbit_stays_on_its_line() {
    let shear = GeneratingMap::<f64>::integrable(2).unwrap();
    let orbit = shear.orbit(&[0.1, -2.0], &[golden(), 0.3], 1000).unwrap();
    assert_eq!(orbit.states.len(), 1001);
    assert!(orbit.states.iter().all(|(x, y)| y == &vec![golden(), 0.3] && x.iter().all(|v| (-PI..PI).contains(v))));
}

#[test]
fn symplectic_and_exact_at_random_states() {
    let bump = analytic_bump::<f64>(2, 4, 64).unwrap();
    let maps = vec![
        toy_generating::<f64>(1).unwrap(),
        toy_generating::<f64>(5).unwrap(),
        cosine_map(0.3),
        GeneratingMap::from_grid(&poisson_solve(&bump).unwrap()).unwrap(),
    ];
    let mut r = rng(31);
    for f in maps {
        let d = f.dims();
        let states = if d == 1 { 1000 } else { 200 };
        for _ in 0..states {
            let x: Vec<f64> = (0..d).map(|_| r.gen_range(-PI..PI)).collect();
            let y: Vec<f64> = (0..d).map(|_| r.gen_range(-4.0..4.0)).collect();
            assert!((f.jacobian_determinant(&x, &y).unwrap() - 1.0).abs() < 1e-10);
            assert!(f.exactness_defect(&x, &y).unwrap() < 1e-10);
            let id: Vec<f64> = (0..d * d).map(|i| if i / d == i % d { 1.0 } else { 0.0 }).collect();
            assert_eq!(f.twist_block(), id);
        }
    }
}

#[test]
fn generating_function_partials_by_differences() {
    let f = toy_generating::<f64>(2).unwrap();
    let (x, xp) = (0.4, 1.7);
    let h = 1e-5;
    let d1 = (f.generating_function(&[x + h], &[xp]) - f.generating_function(&[x - h], &[xp])) / (2.0 * h);
    let d2 = (f.generating_function(&[x], &[xp + h]) - f.generating_function(&[x], &[xp - h])) / (2.0 * h);
    let (y, yp) = f.momenta(&[x], &[xp]);
    assert!((y[0] + d1).abs() < 1e-8);
    assert!((yp[0] - d2).abs() < 1e-8);
}

#[test]
fn residual_examples() {
    let shear = GeneratingMap::<f64>::integrable(1).unwrap();
    let flat = GraphCandidate::constant(&[0.37], 64).unwrap();
    assert!(graph_residual(&shear, &flat).unwrap() < 1e-12);
    for n in [1usize, 3] {
        let toy = toy_generating::<f64>(n).unwrap();
        // omega a multiple of the node spacing keeps x + omega on the grid
        let omega = TAU * 5.0 / 64.0;
        let c = GraphCandidate::constant(&[omega], 64).unwrap();
        let phi = toy_phi::<f64>(n, 64).unwrap();
        assert!((graph_residual(&toy, &c).unwrap() - c0_norm(&phi)).abs() < 1e-12);
    }
}

#[test]
fn conjugacy_and_invariance_forms_agree() {
    let map = cosine_map(0.05);
    let mut r = rng(32);
    let psi = GridFunction64::from_fn(1, 64, |x| 1.1 + 0.03 * x[0].sin() - 0.01 * (2.0 * x[0]).cos()).unwrap();
    let cand = GraphCandidate::new(vec![psi.clone()]).unwrap();
    for _ in 0..20 {
        let j = r.gen_range(0..64);
        let x = node(64, j);
        let z = x + psi.values()[j];
        let grad = map.gradient_at(&[z])[0];
        let psi_z = 1.1 + 0.03 * z.sin() - 0.01 * (2.0 * z).cos();
        let invariance = psi_z - psi.values()[j] - grad;
        let gg = gg_residual_at(&map, &cand, z).unwrap();
        assert!((gg - invariance / 2.0).abs() < 1e-12);
    }
    let sup = gg_residual(&map, &cand).unwrap();
    assert!(sup > 0.0 && sup <= graph_residual(&map, &cand).unwrap());
}

#[test]
fn unperturbed_search_converges_in_one_step() {
    let shear = GeneratingMap::<f64>::integrable(1).unwrap();
    for omega in [0.0, 1.0, golden()] {
        let out = graph_transform(&shear, &[omega], &GraphOptions { resolution: 64, ..Default::default() }).unwrap();
        assert!(out.report.converged);
        assert_eq!(out.report.iterations, 1);
        assert!(out.candidate.components[0].values().iter().all(|&v| (v - omega).abs() < 1e-14));
    }
}

#[test]
fn toy_search_folds_above_the_bound() {
    let toy = toy_generating::<f64>(1).unwrap();
    let bound = lipschitz_bound(1.0).unwrap();
    for j in [0usize, 17, 40] {
        let omega = wrap_angle(TAU * j as f64 / 64.0);
        let out = graph_transform(&toy, &[omega], &GraphOptions { resolution: 128, ..Default::default() }).unwrap();
        assert!(!out.report.converged);
        assert_eq!(out.report.reason, Termination::Fold);
        assert!((out.report.mm_bound - bound).abs() < 1e-9);
        assert!(out.report.lipschitz_estimate > bound);
        let json = serde_json::to_value(&out.report).unwrap();
        for key in ["omega", "iterations", "final_residual", "lipschitz_estimate", "mm_bound"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }
}

#[test]
fn small_perturbation_converges() {
    let map = cosine_map(1e-6);
    let out = graph_transform(&map, &[golden()], &GraphOptions { resolution: 128, ..Default::default() }).unwrap();
    assert!(out.report.converged, "{:?}", out.report);
    assert!(graph_residual(&map, &out.candidate).unwrap() < 1e-8);
    assert!(out.report.lipschitz_estimate < lipschitz_bound(2e-6).unwrap() + 1e-6);
}

#[test]
fn lipschitz_bound_examples() {
    assert_eq!(lipschitz_bound(0.0f64).unwrap(), 1.0);
    assert!((lipschitz_bound(1.0f64).unwrap() - 2.618034).abs() < 1e-6);
    assert!((lipschitz_bound(0.01f64).unwrap() - 1.105).abs() < 1e-3);
    assert!(lipschitz_bound(-1.0f64).is_err());
}
