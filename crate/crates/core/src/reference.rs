//! Exact impedances for purely specular (`q = 1`) and purely diffuse
//! (`q = 0`) reflection, in the reduced units of [`crate::neumann`]:
//!
//! ```text
//! zeta_ref = -2 int_0^inf dk / L(k) = -2 int_0^inf dtau / lambda(i z0 tau)
//! zeta_dif = -pi^2 / int_0^inf ln(L(k) / k^2) dk
//! ```
//!
//! The logarithm is taken on the branch continuous in `k` and vanishing as
//! `k -> inf`, found by tracking the phase of `L(k)/k^2` downward from large `k`.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::kinetic::{dispersion_l, lambda_form, KineticError, PlasmaParams};
use crate::quadrature::{integrate_semi_infinite_scaled, QuadratureError, Tolerance};
use crate::specfun::scaled_erfc;

const SQRT_PI: f64 = 1.772_453_850_905_516;
/// Default relative tolerance of the reference quadratures.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;
const MAX_REFINEMENTS: usize = 6;
/// Adjacent-sample phase change above which tracking is considered unreliable.
const MAX_PHASE_STEP: f64 = 0.5 * PI;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReferenceError {
    #[error(transparent)]
    Kinetic(#[from] KineticError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("phase of L(k)/k^2 jumps by {jump:.3} near k = {k:.3e} even at {per_decade} samples per decade")]
    BranchDiscontinuity { k: f64, jump: f64, per_decade: usize },
}

// L(k)/k^2 - 1 = -i alpha sqrt(pi) S(z0/k) / k^3
fn log_argument_offset(k: f64, params: &PlasmaParams) -> Result<Complex64, ReferenceError> {
    let s = scaled_erfc(params.z0() / k).map_err(KineticError::from)?;
    Ok(Complex64::new(0.0, -params.alpha() * SQRT_PI / (k * k * k)) * s)
}

// Principal ln(1 + d), accurate for small |d|.
fn ln_1p(d: Complex64) -> Complex64 {
    if d.norm() < 0.5 {
        let modulus = 0.5 * (2.0 * d.re + d.norm_sqr()).ln_1p();
        Complex64::new(modulus, d.im.atan2(1.0 + d.re))
    } else {
        (1.0 + d).ln()
    }
}

/// Continuous phase of `L(k)/k^2` on log-spaced samples, anchored at zero
/// at the largest sample.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchTracker {
    k_samples: Vec<f64>,
    phase: Vec<f64>,
    per_decade: usize,
}

impl BranchTracker {
    /// Track on `[k_lo, k_hi]` at `per_decade` samples per decade, doubling
    /// the density up to six times while any step exceeds `pi/2`.
    pub fn new(params: &PlasmaParams, k_lo: f64, k_hi: f64, per_decade: usize) -> Result<Self, ReferenceError> {
        let mut density = per_decade.max(2);
        let mut last_failure = None;
        for _ in 0..=MAX_REFINEMENTS {
            match Self::try_build(params, k_lo, k_hi, density)? {
                Ok(tracker) => return Ok(tracker),
                Err((k, jump)) => last_failure = Some((k, jump)),
            }
            density *= 2;
        }
        let (k, jump) = last_failure.expect("at least one attempt");
        Err(ReferenceError::BranchDiscontinuity {
            k,
            jump,
            per_decade: density / 2,
        })
    }

    /// Default sampling range for `params`: four decades beyond `k*` and `|z0|`.
    pub fn for_params(params: &PlasmaParams) -> Result<Self, ReferenceError> {
        let k_star = params.wavenumber_scale();
        let z0 = params.z0().norm();
        Self::new(params, 1e-4 * k_star.min(z0), 1e4 * k_star.max(z0), 16)
    }

    #[allow(clippy::type_complexity)]
    fn try_build(
        params: &PlasmaParams,
        k_lo: f64,
        k_hi: f64,
        per_decade: usize,
    ) -> Result<Result<Self, (f64, f64)>, ReferenceError> {
        let decades = (k_hi / k_lo).log10();
        let n = ((decades * per_decade as f64).ceil() as usize).max(2);
        let k_samples: Vec<f64> = (0..=n)
            .map(|i| k_lo * (k_hi / k_lo).powf(i as f64 / n as f64))
            .collect();
        let mut phase = vec![0.0; k_samples.len()];
        let mut previous: Option<f64> = None;
        for i in (0..k_samples.len()).rev() {
            let k = k_samples[i];
            let principal = ln_1p(log_argument_offset(k, params)?).im;
            phase[i] = match previous {
                None => principal,
                Some(prev_principal) => {
                    let step = wrap(principal - prev_principal);
                    if step.abs() > MAX_PHASE_STEP {
                        return Ok(Err((k, step)));
                    }
                    phase[i + 1] + step
                }
            };
            previous = Some(principal);
        }
        Ok(Ok(BranchTracker {
            k_samples,
            phase,
            per_decade,
        }))
    }

    pub fn k_samples(&self) -> &[f64] {
        &self.k_samples
    }

    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    pub fn per_decade(&self) -> usize {
        self.per_decade
    }

    /// Tracked phase at `k`, interpolated linearly in `ln k` and held
    /// constant beyond the sampled range.
    pub fn phase_at(&self, k: f64) -> f64 {
        let ks = &self.k_samples;
        if k <= ks[0] {
            return self.phase[0];
        }
        if k >= ks[ks.len() - 1] {
            return self.phase[ks.len() - 1];
        }
        let j = ks.partition_point(|&s| s <= k).min(ks.len() - 1);
        let (a, b) = (ks[j - 1], ks[j]);
        let t = (k / a).ln() / (b / a).ln();
        self.phase[j - 1] + t * (self.phase[j] - self.phase[j - 1])
    }

    /// `ln(L(k)/k^2)` on the tracked branch.
    pub fn log(&self, k: f64, params: &PlasmaParams) -> Result<Complex64, ReferenceError> {
        let principal = ln_1p(log_argument_offset(k, params)?);
        let turns = ((self.phase_at(k) - principal.im) / (2.0 * PI)).round();
        Ok(principal + Complex64::new(0.0, 2.0 * PI * turns))
    }
}

fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

fn integrate_scaled<F>(f: F, scale: f64, tol: f64) -> Result<Complex64, ReferenceError>
where
    F: Fn(f64) -> Result<Complex64, ReferenceError>,
{
    let failure = RefCell::new(None);
    let g = |k: f64| match f(k) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            Complex64::new(f64::NAN, f64::NAN)
        }
    };
    let result = integrate_semi_infinite_scaled(&g, scale, Tolerance::relative(tol));
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(result?.value)
}

/// `zeta_ref = -2 int_0^inf dk / L(k)`.
pub fn impedance_specular(params: &PlasmaParams) -> Result<Complex64, ReferenceError> {
    impedance_specular_with_tolerance(params, DEFAULT_TOLERANCE)
}

pub fn impedance_specular_with_tolerance(params: &PlasmaParams, tol: f64) -> Result<Complex64, ReferenceError> {
    let integral = integrate_scaled(|k| Ok(dispersion_l(k, params)?.inv()), params.wavenumber_scale(), tol)?;
    Ok(-2.0 * integral)
}

/// `zeta_ref` through the collision-time form `-2 int_0^inf dtau / lambda(i z0 tau)`.
pub fn impedance_specular_tau_form(params: &PlasmaParams) -> Result<Complex64, ReferenceError> {
    let scale = 1.0 / params.wavenumber_scale();
    let integral = integrate_scaled(|t| Ok(lambda_form(t, params)?.inv()), scale, DEFAULT_TOLERANCE)?;
    Ok(-2.0 * integral)
}

/// `zeta_dif = -pi^2 / int_0^inf ln(L(k)/k^2) dk`.
pub fn impedance_diffuse(params: &PlasmaParams) -> Result<Complex64, ReferenceError> {
    let tracker = BranchTracker::for_params(params)?;
    impedance_diffuse_with(params, &tracker, DEFAULT_TOLERANCE)
}

pub fn impedance_diffuse_with(
    params: &PlasmaParams,
    tracker: &BranchTracker,
    tol: f64,
) -> Result<Complex64, ReferenceError> {
    let integral = integrate_scaled(|k| tracker.log(k, params), params.wavenumber_scale(), tol)?;
    Ok(-PI * PI / integral)
}
