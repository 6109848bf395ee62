mod common;

use common::rel;
use skin_core::kinetic::PlasmaParams;
use skin_core::neumann::{
    distribution_function, field_profile, grid_spec_for, solve_direct, KernelMatrix, SolverError, Spectrum,
};
use skin_core::quadrature::build_grid;
use std::f64::consts::PI;

fn kernel(r: f64, alpha: f64) -> KernelMatrix {
    let p = PlasmaParams::new(r, alpha, 0.0).unwrap();
    KernelMatrix::new(build_grid(&grid_spec_for(&p)).unwrap(), p).unwrap()
}

fn slope_at_surface(spectrum: &Spectrum, h: f64) -> f64 {
    let prof = field_profile(spectrum, &[0.0, h, 2.0 * h], 1e-11).unwrap();
    let e = prof.e_values();
    let d = (-3.0 * e[0] + 4.0 * e[1] - e[2]) / (2.0 * h);
    assert!(d.im.abs() < 0.01, "{d}");
    d.re
}

#[test]
fn surface_gradient_is_unity() {
    for &(r, alpha, q) in &[(1.0, 1.0, 0.0), (1.0, 1.0, 1.0), (1.0, 100.0, 0.5), (0.0, 0.1, 0.0)] {
        let k = kernel(r, alpha);
        let sol = solve_direct(&k, q).unwrap();
        let h = 1e-3 / k.params().wavenumber_scale().max(1.0);
        let d = slope_at_surface(sol.spectrum(), h);
        assert!(
            (d - 1.0).abs() <= 0.01,
            "r = {r}, alpha = {alpha}, q = {q}: e'(0) = {d}"
        );
    }
}

#[test]
fn field_decays_into_the_bulk() {
    let k = kernel(1.0, 1.0);
    let sol = solve_direct(&k, 0.0).unwrap();
    let prof = field_profile(sol.spectrum(), &[0.0, 30.0], 1e-8).unwrap();
    assert!(prof.is_accurate());
    let e = prof.e_values();
    assert!(e[1].norm() < 1e-3 * e[0].norm(), "{} vs {}", e[1], e[0]);
}

#[test]
fn surface_value_is_impedance_over_pi() {
    let k = kernel(1.0, 1e4);
    let sol = solve_direct(&k, 0.0).unwrap();
    let prof = field_profile(sol.spectrum(), &[0.0], 1e-10).unwrap();
    assert!(rel(prof.e_values()[0], sol.impedance() / PI) < 1e-8);
    assert_eq!(prof.e_s_prime(), 1.0);
}

#[test]
fn specular_profile_matches_zero_order() {
    let k = kernel(1.0, 10.0);
    let sol = solve_direct(&k, 1.0).unwrap();
    let xs = [0.0, 0.5, 2.0, 8.0];
    let a = field_profile(sol.spectrum(), &xs, 1e-9).unwrap();
    let b = field_profile(&Spectrum::zero_order(&k), &xs, 1e-9).unwrap();
    assert_eq!(a, b);
}

#[test]
fn anomalous_profile_oscillates() {
    let k = kernel(1.0, 1e4);
    let sol = solve_direct(&k, 0.0).unwrap();
    let xs: Vec<f64> = (0..=60).map(|i| i as f64 * 0.05).collect();
    let prof = field_profile(sol.spectrum(), &xs, 1e-8).unwrap();
    assert!(prof.is_accurate());
    assert!(prof.last_oscillation_node().is_some());
}

#[test]
fn specular_boundary_condition() {
    let k = kernel(1.0, 1.0);
    let sol = solve_direct(&k, 1.0).unwrap();
    for &mu in &[0.3, 1.0, 2.5] {
        let plus = distribution_function(sol.spectrum(), 1.0, 0.0, mu, 1e-10).unwrap();
        let minus = distribution_function(sol.spectrum(), 1.0, 0.0, -mu, 1e-10).unwrap();
        assert!(plus.accurate && minus.accurate);
        assert!(rel(plus.value, minus.value) < 1e-7, "mu = {mu}");
    }
}

#[test]
fn partially_diffuse_boundary_condition() {
    let q = 0.5;
    let k = kernel(1.0, 1.0);
    let sol = solve_direct(&k, q).unwrap();
    let mu = 0.3;
    let plus = distribution_function(sol.spectrum(), q, 0.0, mu, 1e-10).unwrap();
    let minus = distribution_function(sol.spectrum(), q, 0.0, -mu, 1e-10).unwrap();
    let residual = (plus.value - q * minus.value).norm();
    assert!(
        residual < 1e-4 * plus.value.norm(),
        "{residual:e} vs {}",
        plus.value.norm()
    );
}

#[test]
fn distribution_decays() {
    let k = kernel(1.0, 1.0);
    let sol = solve_direct(&k, 0.0).unwrap();
    let near = distribution_function(sol.spectrum(), 0.0, 0.1, 0.7, 1e-8).unwrap();
    let far = distribution_function(sol.spectrum(), 0.0, 40.0, 0.7, 1e-8).unwrap();
    assert!(far.value.norm() < 1e-3 * near.value.norm());
}

#[test]
fn bad_depth_and_velocity() {
    let k = kernel(1.0, 1.0);
    let s = Spectrum::zero_order(&k);
    assert!(matches!(field_profile(&s, &[-1.0], 1e-8), Err(SolverError::Depth(_))));
    assert!(matches!(
        distribution_function(&s, 0.0, 1.0, 0.0, 1e-8),
        Err(SolverError::Velocity(_))
    ));
}
