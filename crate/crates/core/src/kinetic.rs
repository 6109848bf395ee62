//! Problem parameters, the dispersion function `L(k)` and the exponential-weight
//! kernel coupling wavenumbers through diffusely scattered electrons.
//!
//! Velocity integrals carry the normalized Gaussian weight `exp(-mu^2)/sqrt(pi)`.
//! With it the dispersion function has the closed form
//!
//! ```text
//! L(k) = k^2 - i alpha sqrt(pi) / k * S(z0 / k),      S(a) = exp(a^2) erfc(a)
//! ```
//!
//! and the kernel is
//!
//! ```text
//! K(k1, k2) = int_0^inf exp(-u) du / ((z0^2 + k1^2 u) (z0^2 + k2^2 u))
//!           = A J0(k1) + B J0(k2),
//! J0(k)     = int_0^inf exp(-u) du / (z0^2 + k^2 u) = exp(x) E1(x) / k^2,  x = z0^2 / k^2.
//! ```
//!
//! Boundary reflection is modelled with `mu > 0` / `mu < 0` half-ranges of the
//! unbounded thermal velocity.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::specfun::{scaled_e1, scaled_e1_complement, scaled_erfc, SpecialFunctionError};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Relative width of the band around `k1 = k2` where the partial-fraction
/// form is replaced by the diagonal closed form.
pub const DIAGONAL_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("alpha must be positive and finite, got {0}")]
    Alpha(f64),
    #[error("omega/nu must be non-negative and finite, got {0}")]
    OmegaOverNu(f64),
    #[error("specularity q must lie in [0, 1], got {0}")]
    Specularity(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KineticError {
    #[error("wavenumber must be non-negative and finite, got {0}")]
    Wavenumber(f64),
    #[error(transparent)]
    SpecialFunction(#[from] SpecialFunctionError),
}

/// Dimensionless inputs: collision-frequency ratio, anomaly parameter
/// `alpha = 2 (l / delta)^2` and specularity `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct PlasmaParams {
    omega_over_nu: f64,
    alpha: f64,
    q: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    omega_over_nu: f64,
    alpha: f64,
    q: f64,
}

impl TryFrom<RawParams> for PlasmaParams {
    type Error = ParamError;
    fn try_from(r: RawParams) -> Result<Self, ParamError> {
        PlasmaParams::new(r.omega_over_nu, r.alpha, r.q)
    }
}

impl From<PlasmaParams> for RawParams {
    fn from(p: PlasmaParams) -> Self {
        RawParams {
            omega_over_nu: p.omega_over_nu,
            alpha: p.alpha,
            q: p.q,
        }
    }
}

impl PlasmaParams {
    pub fn new(omega_over_nu: f64, alpha: f64, q: f64) -> Result<Self, ParamError> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(ParamError::Alpha(alpha));
        }
        if !(omega_over_nu >= 0.0 && omega_over_nu.is_finite()) {
            return Err(ParamError::OmegaOverNu(omega_over_nu));
        }
        if !(0.0..=1.0).contains(&q) {
            return Err(ParamError::Specularity(q));
        }
        Ok(PlasmaParams {
            omega_over_nu,
            alpha,
            q,
        })
    }

    pub fn omega_over_nu(&self) -> f64 {
        self.omega_over_nu
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn with_q(&self, q: f64) -> Result<Self, ParamError> {
        PlasmaParams::new(self.omega_over_nu, self.alpha, q)
    }

    /// `z0 = 1 - i omega/nu`.
    pub fn z0(&self) -> Complex64 {
        Complex64::new(1.0, -self.omega_over_nu)
    }

    /// Wavenumber where `k^2` and the kinetic term of `L(k)` are comparable:
    /// `sqrt(alpha / |z0|)` in the normal regime, `(alpha sqrt(pi))^(1/3)` in
    /// the anomalous one. This is where `1/L(k)` has its peak.
    pub fn wavenumber_scale(&self) -> f64 {
        let normal = (self.alpha / self.z0().norm()).sqrt();
        let anomalous = (self.alpha * SQRT_PI).cbrt();
        normal.min(anomalous)
    }
}

fn check_wavenumber(k: f64) -> Result<(), KineticError> {
    if k >= 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(KineticError::Wavenumber(k))
    }
}

/// Dispersion function `L(k)`; `k = 0` returns the limit `-i alpha / z0`.
pub fn dispersion_l(k: f64, params: &PlasmaParams) -> Result<Complex64, KineticError> {
    check_wavenumber(k)?;
    let z0 = params.z0();
    if k == 0.0 {
        return Ok(Complex64::new(0.0, -params.alpha) / z0);
    }
    let s = scaled_erfc(z0 / k)?;
    Ok(Complex64::new(k * k, 0.0) - Complex64::new(0.0, params.alpha * SQRT_PI / k) * s)
}

/// `lambda(i z0 tau) = 1 - i alpha sqrt(pi) tau^3 S(z0 tau)`, so that
/// `L(k) = k^2 lambda(i z0 / k)`.
pub fn lambda_form(tau: f64, params: &PlasmaParams) -> Result<Complex64, KineticError> {
    check_wavenumber(tau)?;
    if tau == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let s = scaled_erfc(params.z0() * tau)?;
    Ok(Complex64::new(1.0, 0.0) - Complex64::new(0.0, params.alpha * SQRT_PI * tau.powi(3)) * s)
}

/// `J0(k) = int_0^inf exp(-u) / (z0^2 + k^2 u) du`.
pub fn kernel_j0(k: f64, params: &PlasmaParams) -> Result<Complex64, KineticError> {
    check_wavenumber(k)?;
    let z02 = params.z0() * params.z0();
    if k == 0.0 {
        return Ok(z02.inv());
    }
    Ok(scaled_e1(z02 / (k * k))? / (k * k))
}

/// `K(k, k) = int_0^inf exp(-u) / (z0^2 + k^2 u)^2 du
///          = (1/x - exp(x) E1(x)) / k^4,  x = z0^2 / k^2`.
pub fn kernel_j_diag(k: f64, params: &PlasmaParams) -> Result<Complex64, KineticError> {
    check_wavenumber(k)?;
    let z02 = params.z0() * params.z0();
    if k == 0.0 {
        return Ok((z02 * z02).inv());
    }
    let k2 = k * k;
    Ok(scaled_e1_complement(z02 / k2)? / (k2 * k2))
}

/// Kernel `K(k1, k2)` by partial fractions, switching to the diagonal form
/// inside the guard band `|k1^2 - k2^2| < 1e-6 max(k1^2, k2^2)`.
pub fn kernel_j(k1: f64, k2: f64, params: &PlasmaParams) -> Result<Complex64, KineticError> {
    check_wavenumber(k1)?;
    check_wavenumber(k2)?;
    let (p1, p2) = (k1 * k1, k2 * k2);
    if (p1 - p2).abs() <= DIAGONAL_GUARD * p1.max(p2) {
        return kernel_j_diag((0.5 * (p1 + p2)).sqrt(), params);
    }
    let z02 = params.z0() * params.z0();
    let denom = z02 * (p2 - p1);
    let a = -p1 / denom;
    let b = p2 / denom;
    Ok(a * kernel_j0(k1, params)? + b * kernel_j0(k2, params)?)
}

/// Constant `c_J` in the coupling `(1 - q) c_J alpha z0^2 int E(k1) K(k, k1) dk1 / L(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum CouplingConstant {
    /// `1 / (i pi sqrt(pi))`, from substituting the kinetic solution into the
    /// field equation with normalized Gaussian weights.
    #[default]
    Derived,
    /// `2 / (i pi sqrt(pi))`: the outer factor `alpha z0^2 / (pi i)` with an
    /// unnormalized `2 / sqrt(pi)` kernel weight.
    Unnormalized,
    Custom {
        re: f64,
        im: f64,
    },
}

impl CouplingConstant {
    pub fn value(&self) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        match *self {
            CouplingConstant::Derived => (i * PI * SQRT_PI).inv(),
            CouplingConstant::Unnormalized => 2.0 * (i * PI * SQRT_PI).inv(),
            CouplingConstant::Custom { re, im } => Complex64::new(re, im),
        }
    }

    /// Full prefactor `c_J alpha z0^2` of the coupling integral.
    pub fn prefactor(&self, params: &PlasmaParams) -> Complex64 {
        self.value() * params.alpha() * params.z0() * params.z0()
    }
}
