//! Quadrature on the wavenumber axis: adaptive integrators and the fixed
//! node/weight grids shared by the Nystrom discretization.

mod adaptive;
mod grid;
mod rules;

pub use adaptive::{
    integrate, integrate_fourier, integrate_partitioned, integrate_semi_infinite, integrate_semi_infinite_scaled,
    wynn_epsilon, Integral, Oscillation, QuadratureError, Tolerance,
};
pub use grid::{build_grid, Cluster, GridError, GridSpec, PanelMap, SpectralGrid, TailMap};
pub use rules::gauss_legendre;
