//! Fourier reconstruction of the field and of the distribution correction.
//!
//! With the even continuation of the field, `e(x) = (1/pi) int_0^inf E(k) cos(kx) dk`.
//! `E(k) ~ -2/k^2`, so the slowly decaying part is removed analytically:
//! with `R(k) = E(k) + 2/(k^2 + beta^2)`,
//!
//! ```text
//! e(x) = (1/pi) int_0^inf R(k) cos(kx) dk - exp(-beta x) / beta,
//! ```
//!
//! which makes `e'(0+) = 1` exact and leaves a fast-decaying remainder.
//!
//! For `x >= 0` the distribution correction is
//!
//! ```text
//! h(x, mu) = (1/pi) int_0^inf E(k) (z0 cos kx + k mu sin kx) / (z0^2 + k^2 mu^2) dk
//!          - [mu > 0] (1 - q) (z0/pi) I(mu) exp(-z0 x / mu),
//! I(mu)    = int_0^inf E(k) / (z0^2 + k^2 mu^2) dk,
//! ```
//!
//! the second line being the diffusely re-emitted electrons, which enforces
//! `h(0, mu) = q h(0, -mu)` for `mu > 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{SolverError, Spectrum};
use crate::quadrature::{integrate_fourier, Integral, Oscillation, QuadratureError, Tolerance};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldProfile {
    x_nodes: Vec<f64>,
    e_values: Vec<Complex64>,
    errors: Vec<f64>,
    e_s_prime: f64,
    accurate: bool,
}

impl FieldProfile {
    pub fn x_nodes(&self) -> &[f64] {
        &self.x_nodes
    }

    /// `e(x) / e_s'`.
    pub fn e_values(&self) -> &[Complex64] {
        &self.e_values
    }

    /// Absolute error estimates of the Fourier integrals.
    pub fn errors(&self) -> &[f64] {
        &self.errors
    }

    pub fn e_s_prime(&self) -> f64 {
        self.e_s_prime
    }

    /// False if any node's oscillatory integral missed its tolerance.
    pub fn is_accurate(&self) -> bool {
        self.accurate
    }

    /// Largest sampled depth at which `Re e(x)` changes sign.
    pub fn last_oscillation_node(&self) -> Option<f64> {
        self.x_nodes
            .windows(2)
            .zip(self.e_values.windows(2))
            .filter(|(_, e)| e[0].re * e[1].re < 0.0)
            .map(|(x, _)| x[1])
            .next_back()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistributionValue {
    pub value: Complex64,
    pub error: f64,
    pub accurate: bool,
}

struct Accumulated {
    value: Complex64,
    error: f64,
    accurate: bool,
}

fn accept(result: Result<Integral, QuadratureError>) -> Result<Accumulated, SolverError> {
    match result {
        Ok(i) => Ok(Accumulated {
            value: i.value,
            error: i.error,
            accurate: true,
        }),
        Err(QuadratureError::NoConvergence { best }) => Ok(Accumulated {
            value: best.value,
            error: best.error,
            accurate: false,
        }),
        Err(e) => Err(e.into()),
    }
}

fn spectrum_eval(spectrum: &Spectrum, k: f64) -> Complex64 {
    spectrum.at(k).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
}

fn oscillation_scale(spectrum: &Spectrum) -> f64 {
    spectrum.kernel().params().wavenumber_scale().max(1.0)
}

/// Sample `e(x)` at the given depths (in mean free paths) to relative
/// tolerance `tol`, with an absolute floor of `1e-3 tol |e(0)|`.
pub fn field_profile(spectrum: &Spectrum, x_nodes: &[f64], tol: f64) -> Result<FieldProfile, SolverError> {
    if let Some(&x) = x_nodes.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
        return Err(SolverError::Depth(x));
    }
    let beta = oscillation_scale(spectrum);
    let surface = spectrum.impedance().norm() / PI;
    let tolerance = Tolerance::relative(tol).with_abs(1e-3 * tol * surface * PI);
    let remainder = |k: f64| spectrum_eval(spectrum, k) + 2.0 / (k * k + beta * beta);
    let mut e_values = Vec::with_capacity(x_nodes.len());
    let mut errors = Vec::with_capacity(x_nodes.len());
    let mut accurate = true;
    for &x in x_nodes {
        let r = accept(integrate_fourier(&remainder, x, Oscillation::Cosine, beta, tolerance))?;
        accurate &= r.accurate;
        e_values.push(r.value / PI - (-beta * x).exp() / beta);
        errors.push(r.error / PI);
    }
    Ok(FieldProfile {
        x_nodes: x_nodes.to_vec(),
        e_values,
        errors,
        e_s_prime: 1.0,
        accurate,
    })
}

/// `h(x, mu)` for the solution `spectrum` obtained at specularity `q`.
pub fn distribution_function(
    spectrum: &Spectrum,
    q: f64,
    x: f64,
    mu: f64,
    tol: f64,
) -> Result<DistributionValue, SolverError> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(SolverError::Depth(x));
    }
    if !(mu != 0.0 && mu.is_finite()) {
        return Err(SolverError::Velocity(mu));
    }
    let z0 = spectrum.kernel().params().z0();
    let mu2 = mu * mu;
    let scale = oscillation_scale(spectrum).max(z0.norm() / mu.abs());
    let floor = 1e-3 * tol * spectrum.impedance().norm() / (z0.norm() * PI);
    let tolerance = Tolerance::relative(tol).with_abs(floor);
    let even = |k: f64| spectrum_eval(spectrum, k) / (z0 * z0 + k * k * mu2);
    let odd = |k: f64| k * spectrum_eval(spectrum, k) / (z0 * z0 + k * k * mu2);
    let c = accept(integrate_fourier(&even, x, Oscillation::Cosine, scale, tolerance))?;
    let s = accept(integrate_fourier(&odd, x, Oscillation::Sine, scale, tolerance))?;
    let mut value = (z0 * c.value + mu * s.value) / PI;
    let mut error = (z0.norm() * c.error + mu.abs() * s.error) / PI;
    let mut accurate = c.accurate && s.accurate;
    if mu > 0.0 && q < 1.0 {
        let i = if x == 0.0 {
            c
        } else {
            accept(integrate_fourier(&even, 0.0, Oscillation::Cosine, scale, tolerance))?
        };
        let decay = (-z0 * x / mu).exp();
        value -= (1.0 - q) * z0 / PI * i.value * decay;
        error += (1.0 - q) * z0.norm() / PI * i.error * decay.norm();
        accurate &= i.accurate;
    }
    Ok(DistributionValue { value, error, accurate })
}
