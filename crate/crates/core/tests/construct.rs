mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use twistmap::construct::{
    analytic_bump, approximate_and_normalize, herman_bump, poisson_solve, poisson_solve_poly, toy_derivative_extrema,
    toy_generating, toy_phi, BumpSpec, ScalingParams,
};
use twistmap::criterion::trace_field;
use twistmap::grid::{c0_norm, cr_norm, from_spectrum, laplacian};
use twistmap::pipeline::fit_loglog_slope;
use twistmap::{Error, GridFunction64};

use common::*;

#[test]
fn toy_phi_has_zero_mean_and_triangle_bound() {
    for n in [1usize, 2, 5, 16] {
        let phi = toy_phi::<f64>(n, 256).unwrap();
        assert!(phi.mean().abs() < 1e-12);
        let dense = dense_sup(|x| -1.25 / n as f64 * (n as f64 * x).cos() + 0.125 / n as f64 * (2.0 * n as f64 * x).sin(), 200_000);
        assert!(dense <= 11.0 / (8.0 * n as f64));
        assert!(c0_norm(&phi) <= dense + 1e-15);
    }
    assert!(toy_phi::<f64>(0, 16).is_err());
}

#[test]
fn toy_extremum_locations() {
    for n in [1usize, 3, 8] {
        let e = toy_derivative_extrema::<f64>(n).unwrap();
        let dphi = |x: f64| 1.25 * (n as f64 * x).sin() + 0.25 * (2.0 * n as f64 * x).cos();
        assert!((dphi(e.argmin) + 1.5).abs() < 1e-12);
        assert!((dphi(e.argmax) - 1.0).abs() < 1e-12);
        assert!(((n as f64 * e.argmax).sin() - 1.0).abs() < 1e-12);
        assert!(((n as f64 * e.argmin).sin() + 1.0).abs() < 1e-12);
        // the shifted copies are extrema as well
        assert!((dphi(e.argmax + 2.0 * PI / n as f64) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn toy_map_examples() {
    let f = toy_generating::<f64>(1).unwrap();
    let (x, y) = f.step(&[0.0], &[0.0]).unwrap();
    assert!(x[0].abs() < 1e-15 && (y[0] + 1.25).abs() < 1e-14);
    let mut r = rng(21);
    for _ in 0..100 {
        let (x0, y0) = (rand::Rng::gen_range(&mut r, -PI..PI), rand::Rng::gen_range(&mut r, -3.0..3.0));
        let (_, y1) = f.step_lifted(&[x0], &[y0]).unwrap();
        let z = x0 + y0;
        let phi = -1.25 * z.cos() + 0.125 * (2.0 * z).sin();
        assert!((y1[0] - y0 - phi).abs() < 1e-13);
        assert!((f.jacobian_determinant(&[x0], &[y0]).unwrap() - 1.0).abs() < 1e-12);
    }
}

fn lobe_check(spec: &BumpSpec<f64>, f: &GridFunction64) {
    for i in 0..f.len() {
        let x = f.point(i);
        if !spec.in_support(&x) {
            assert!(f.values()[i].abs() <= 1e-14, "{x:?} -> {}", f.values()[i]);
        }
    }
}

#[test]
fn herman_family_properties() {
    for n in [4usize, 16, 64] {
        let bump = BumpSpec::<f64>::herman(2, n).unwrap().realize(256).unwrap();
        let t = &bump.field;
        assert!(t.mean().abs() < 1e-12);
        assert!((t.max() / (1.0 / (9.0 * n as f64)) - 1.0).abs() <= 0.01);
        assert!((-t.min() / (1.0 / (n as f64).sqrt()) - 1.0).abs() <= 0.01);
        lobe_check(&bump.spec, t);
    }
    let norms: Vec<f64> = [4, 8, 16, 32].iter().map(|&n| cr_norm(&herman_bump::<f64>(2, n, 256).unwrap(), 2)).collect();
    let spread = norms.iter().cloned().fold(0.0, f64::max) / norms.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread <= 3.0, "{norms:?}");
}

#[test]
fn analytic_family_properties() {
    for n in [8usize, 32] {
        let bump = BumpSpec::<f64>::analytic(2, n).unwrap().realize(512).unwrap();
        let t = &bump.field;
        assert!(t.mean().abs() < 1e-12);
        assert!((t.max() - 1.0).abs() <= 0.01);
        assert!((-t.min() / n as f64 - 1.0).abs() <= 0.01);
        lobe_check(&bump.spec, t);
        let r = bump.spec.minus_radius;
        assert!(r > 0.0 && r < PI / 2.0);
    }
    assert!(matches!(BumpSpec::<f64>::analytic(2, 100_000).unwrap().realize(256), Err(Error::Infeasible(_))));
}

#[test]
fn analytic_ck_growth_exponent() {
    // coarse check of the C^k growth; the full ladder runs in the acceptance suite
    let ns = [8usize, 16, 32];
    let norms: Vec<f64> = ns.iter().map(|&n| cr_norm(&analytic_bump::<f64>(2, n, 256).unwrap(), 4)).collect();
    let slope = fit_loglog_slope(&ns.map(|n| n as f64), &norms);
    assert!((slope - 3.0).abs() <= 0.15, "slope {slope}");
}

#[test]
fn poisson_examples() {
    let t = GridFunction64::from_fn(2, 32, |x| x[0].cos()).unwrap();
    let want = GridFunction64::from_fn(2, 32, |x| -2.0 * x[0].cos()).unwrap();
    assert!(poisson_solve(&t).unwrap().max_abs_diff(&want).unwrap() < 1e-10);
    let z = GridFunction64::zeros(2, 16).unwrap();
    assert_eq!(c0_norm(&poisson_solve(&z).unwrap()), 0.0);
    let bump = analytic_bump::<f64>(2, 16, 512).unwrap();
    let psi = poisson_solve(&bump).unwrap();
    assert!(psi.mean().abs() < 1e-12);
    let back = laplacian(&psi).scaled(0.5);
    assert!(back.max_abs_diff(&bump).unwrap() / c0_norm(&bump) < 1e-9);
    let off = bump.map(|v| v + 1e-3);
    assert!(matches!(poisson_solve(&off), Err(Error::NonZeroMean { .. })));
}

#[test]
fn poisson_coefficients() {
    let t = analytic_bump::<f64>(2, 4, 128).unwrap();
    let p = twistmap::grid::to_spectrum(&t).unwrap();
    let q = poisson_solve_poly(&p).unwrap();
    for (xi, c) in p.terms() {
        let k2 = (xi[0] * xi[0] + xi[1] * xi[1]) as f64;
        let want = if k2 == 0.0 { twistmap::Complex::new(0.0, 0.0) } else { c * (-2.0 / k2) };
        assert!((q.coeff(&xi) - want).norm() < 1e-15);
    }
    let grid = poisson_solve(&t).unwrap();
    assert!(from_spectrum(&q, 128).unwrap().max_abs_diff(&grid).unwrap() < 1e-13);
}

#[test]
fn approximation_and_normalization() {
    let sp = ScalingParams::new(2, 16, 0.1).unwrap();
    let t = analytic_bump::<f64>(2, 16, 256).unwrap();
    let a = approximate_and_normalize(&t, &sp, 0.05).unwrap();
    assert!(a.p_tilde.mean().abs() < 1e-12);
    assert!(a.p.mean().abs() < 1e-12);
    assert!(a.search.error <= 0.05);
    assert_eq!(a.p.degrees(), &[a.search.degree, a.search.degree]);
    let g = &a.p_tilde_grid;
    assert!((c0_norm(g) - 16f64.powf(-0.9)).abs() < 1e-12);
    // -min/max grows like n; within the factor-3 band at this n
    let ratio = -g.min() / g.max();
    assert!(ratio > 16.0 / 3.0 && ratio < 16.0 * 3.0, "{ratio}");
    let off = t.map(|v| v + 0.1);
    assert!(matches!(approximate_and_normalize(&off, &sp, 0.05), Err(Error::NonZeroMean { .. })));
    assert!(matches!(approximate_and_normalize(&t, &sp, 1e-14), Err(Error::ToleranceUnreachable { .. })));
}

#[test]
fn potential_of_normalized_polynomial_round_trips() {
    let sp = ScalingParams::new(2, 8, 0.1).unwrap();
    let t = analytic_bump::<f64>(2, 8, 256).unwrap();
    let a = approximate_and_normalize(&t, &sp, 0.05).unwrap();
    let psi = poisson_solve(&a.p_tilde_grid).unwrap();
    assert!(trace_field(&psi).max_abs_diff(&a.p_tilde_grid).unwrap() < 1e-9 * c0_norm(&a.p_tilde_grid));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn poisson_is_linear(seed in 0u64..10_000, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mut r = rng(seed);
        let f = random_band_limited_2d(&mut r, 32, 10, 4);
        let g = random_band_limited_2d(&mut r, 32, 10, 4);
        let (f, g) = (f.map(|v| v - f.mean()), g.map(|v| v - g.mean()));
        let lhs = poisson_solve(&f.combine(a, &g, b).unwrap()).unwrap();
        let rhs = poisson_solve(&f).unwrap().combine(a, &poisson_solve(&g).unwrap(), b).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-10);
    }
}
