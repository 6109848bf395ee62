#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use skin_core::kinetic::PlasmaParams;
use skin_core::quadrature::{integrate_semi_infinite_scaled, Tolerance};
use skin_core::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn log_uniform(rng: &mut StdRng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Random parameters with alpha in [1e-2, 1e4], omega/nu in [0, 10].
pub fn random_params(rng: &mut StdRng) -> PlasmaParams {
    let alpha = log_uniform(rng, 1e-2, 1e4);
    let r = rng.random_range(0.0..10.0);
    PlasmaParams::new(r, alpha, 0.0).unwrap()
}

/// Tight adaptive integral over (0, inf) with characteristic scale `scale`.
pub fn quad<F: Fn(f64) -> Complex64>(f: F, scale: f64) -> Complex64 {
    integrate_semi_infinite_scaled(&f, scale, Tolerance::relative(1e-12).with_budget(50_000))
        .unwrap()
        .value
}
