//! Nyström discretization of the diffuse-coupling integral equation
//!
//! ```text
//! E(k) = -2 / L(k) + (1 - q) c alpha z0^2 / L(k) * int_0^inf K(k, k1) E(k1) dk1
//! ```
//!
//! on a shared [`SpectralGrid`], its von Neumann series in powers of `1 - q`,
//! a direct solve used as an oracle, and reconstruction of the field `e(x)`
//! and the distribution correction `h(x, mu)`.
//!
//! All quantities are in reduced units with surface gradient `e_s' = 1`; the
//! dimensionless impedance is `zeta = int_0^inf E(k) dk`, so that
//! `e(0) = zeta / pi` and the physical impedance is `(4 i omega l / c^2) zeta`.

mod direct;
mod kernel;
mod profile;
mod series;

use num_complex::Complex64;
use thiserror::Error;

use crate::kinetic::{dispersion_l, KineticError, ParamError, PlasmaParams};
use crate::quadrature::{Cluster, GridError, GridSpec, QuadratureError, SpectralGrid};
use crate::specfun::SpecialFunctionError;
use crate::summation::compensated_sum;

pub use direct::{solve_direct, DirectSolution, MAX_CONDITION};
pub use kernel::{KernelMatrix, Spectrum};
pub use profile::{distribution_function, field_profile, DistributionValue, FieldProfile};
pub use series::{sum_series, ImpedanceSeries, NeumannSeries};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Kinetic(#[from] KineticError),
    #[error(transparent)]
    SpecialFunction(#[from] SpecialFunctionError),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("vector of length {found} does not match grid of {expected} nodes")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("system matrix is singular")]
    Singular,
    #[error("system matrix is ill-conditioned (1-norm condition {condition:.3e})")]
    IllConditioned { condition: f64 },
    #[error("depth must be non-negative and finite, got {0}")]
    Depth(f64),
    #[error("velocity must be nonzero and finite, got {0}")]
    Velocity(f64),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

const PANELS_PER_DECADE: f64 = 2.0;

/// Grid adapted to the scales of `params`: geometric panels spanning two
/// decades either side of `k*` and `|z0|`, doubled around the peak of `1/L`
/// at `k*`.
pub fn grid_spec_for(params: &PlasmaParams) -> GridSpec {
    let k_star = params.wavenumber_scale();
    let z0 = params.z0().norm();
    let lo = 1e-2 * k_star.min(z0);
    let hi = 1e2 * k_star.max(z0);
    let decades = (hi / lo).log10();
    GridSpec {
        k_min: lo,
        split: hi,
        panels: (PANELS_PER_DECADE * decades).ceil() as usize,
        order: 16,
        tail_panels: 2,
        tail_order: 16,
        cluster: Some(Cluster {
            center: k_star,
            width: 4.0,
            refinement: 1,
        }),
    }
}

/// Zero-order spectrum `E0(k_i) = -2 / L(k_i)`.
pub fn build_e0(grid: &SpectralGrid, params: &PlasmaParams) -> Result<Vec<Complex64>, SolverError> {
    grid.nodes()
        .iter()
        .map(|&k| Ok(-2.0 / dispersion_l(k, params)?))
        .collect()
}

/// `E_n = M E_{n-1}`.
pub fn iterate_en(prev: &[Complex64], kernel: &KernelMatrix) -> Result<Vec<Complex64>, SolverError> {
    kernel.apply(prev)
}

/// `zeta_n = sum_i w_i E_n(k_i)`.
pub fn impedance_term(en: &[Complex64], grid: &SpectralGrid) -> Result<Complex64, SolverError> {
    check_len(en, grid.len())?;
    Ok(compensated_sum(en.iter().zip(grid.weights()).map(|(e, &w)| e * w)))
}

fn check_len(v: &[Complex64], expected: usize) -> Result<(), SolverError> {
    if v.len() == expected {
        Ok(())
    } else {
        Err(SolverError::DimensionMismatch {
            expected,
            found: v.len(),
        })
    }
}
