use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{build_e0, check_len, SolverError};
use crate::kinetic::{dispersion_l, kernel_j_diag, CouplingConstant, PlasmaParams, DIAGONAL_GUARD};
use crate::parallel::{map_indexed, Execution};
use crate::quadrature::SpectralGrid;
use crate::specfun::scaled_e1;
use crate::summation::{compensated_sum, ComplexSum};

/// Discretized coupling operator
/// `M[i][j] = c alpha z0^2 w_j K(k_i, k_j) / L(k_i)`.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    grid: SpectralGrid,
    params: PlasmaParams,
    coupling: CouplingConstant,
    prefactor: Complex64,
    dispersion: Vec<Complex64>,
    // exp(x) E1(x) at x = z0^2 / k_j^2
    scaled_e1: Vec<Complex64>,
    zero_order: Vec<Complex64>,
    entries: DMatrix<Complex64>,
}

fn scaled_e1_at(k: f64, params: &PlasmaParams) -> Result<Complex64, SolverError> {
    let z0 = params.z0();
    Ok(scaled_e1(z0 * z0 / (k * k))?)
}

// K(k1, k2) = (G(x2) - G(x1)) / (z0^2 (k2^2 - k1^2)) with cached G = exp(x) E1(x).
fn cached_kernel(
    (k1, g1): (f64, Complex64),
    (k2, g2): (f64, Complex64),
    params: &PlasmaParams,
) -> Result<Complex64, SolverError> {
    let (p1, p2) = (k1 * k1, k2 * k2);
    if (p1 - p2).abs() <= DIAGONAL_GUARD * p1.max(p2) {
        return Ok(kernel_j_diag((0.5 * (p1 + p2)).sqrt(), params)?);
    }
    let z0 = params.z0();
    Ok((g2 - g1) / (z0 * z0 * (p2 - p1)))
}

impl KernelMatrix {
    /// Default coupling constant, rows built in parallel when available.
    pub fn new(grid: SpectralGrid, params: PlasmaParams) -> Result<Self, SolverError> {
        Self::build(grid, params, CouplingConstant::default(), Execution::best_available())
    }

    pub fn build(
        grid: SpectralGrid,
        params: PlasmaParams,
        coupling: CouplingConstant,
        exec: Execution,
    ) -> Result<Self, SolverError> {
        let nodes = grid.nodes();
        let n = nodes.len();
        let dispersion = nodes
            .iter()
            .map(|&k| Ok(dispersion_l(k, &params)?))
            .collect::<Result<Vec<_>, SolverError>>()?;
        let scaled_e1 = nodes
            .iter()
            .map(|&k| scaled_e1_at(k, &params))
            .collect::<Result<Vec<_>, _>>()?;
        let zero_order = build_e0(&grid, &params)?;
        let prefactor = coupling.prefactor(&params);
        let weights = grid.weights();
        let rows = map_indexed(n, exec, |i| -> Result<Vec<Complex64>, SolverError> {
            let scale = prefactor / dispersion[i];
            (0..n)
                .map(|j| {
                    let k = cached_kernel((nodes[i], scaled_e1[i]), (nodes[j], scaled_e1[j]), &params)?;
                    Ok(scale * weights[j] * k)
                })
                .collect()
        });
        let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
        let entries = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        if entries.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(SolverError::NonFinite("kernel matrix"));
        }
        Ok(KernelMatrix {
            grid,
            params,
            coupling,
            prefactor,
            dispersion,
            scaled_e1,
            zero_order,
            entries,
        })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn params(&self) -> &PlasmaParams {
        &self.params
    }

    pub fn coupling(&self) -> CouplingConstant {
        self.coupling
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// `L(k_i)` on the grid.
    pub fn dispersion(&self) -> &[Complex64] {
        &self.dispersion
    }

    /// `E0(k_i) = -2 / L(k_i)`.
    pub fn zero_order(&self) -> &[Complex64] {
        &self.zero_order
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// `M v`, each row summed in node order.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>, SolverError> {
        check_len(v, self.len())?;
        Ok((0..self.len())
            .map(|i| {
                let mut s = ComplexSum::new();
                for (j, x) in v.iter().enumerate() {
                    s.add(self.entries[(i, j)] * x);
                }
                s.value()
            })
            .collect())
    }

    /// Operator row at an arbitrary wavenumber, `c alpha z0^2 w_j K(k, k_j) / L(k)`,
    /// together with `L(k)`.
    pub fn row_at(&self, k: f64) -> Result<(Vec<Complex64>, Complex64), SolverError> {
        let l = dispersion_l(k, &self.params)?;
        let g = if k == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            scaled_e1_at(k, &self.params)?
        };
        let scale = self.prefactor / l;
        let z02 = self.params.z0() * self.params.z0();
        let row = self
            .grid
            .nodes()
            .iter()
            .zip(self.grid.weights())
            .zip(&self.scaled_e1)
            .map(|((&kj, &w), &gj)| {
                // K(0, k_j) = J0(k_j) / z0^2 = G(x_j) / (z0^2 k_j^2)
                let kk = if k == 0.0 {
                    gj / (z02 * kj * kj)
                } else {
                    cached_kernel((k, g), (kj, gj), &self.params)?
                };
                Ok(scale * w * kk)
            })
            .collect::<Result<Vec<_>, SolverError>>()?;
        Ok((row, l))
    }
}

/// A spectrum `E(k)` known on the grid and extended to any `k` by Nyström
/// interpolation,
///
/// ```text
/// E(k) = b (-2 / L(k)) + c sum_j M(k, k_j) s_j,
/// ```
///
/// with `b`, `c` and the source vector `s` fixed by how the spectrum was
/// produced (single series term, partial sum, or direct solve).
#[derive(Debug, Clone)]
pub struct Spectrum<'a> {
    kernel: &'a KernelMatrix,
    values: Vec<Complex64>,
    base: Complex64,
    weight: Complex64,
    source: Vec<Complex64>,
}

impl<'a> Spectrum<'a> {
    pub(crate) fn new(
        kernel: &'a KernelMatrix,
        values: Vec<Complex64>,
        base: f64,
        weight: f64,
        source: Vec<Complex64>,
    ) -> Self {
        Spectrum {
            kernel,
            values,
            base: Complex64::new(base, 0.0),
            weight: Complex64::new(weight, 0.0),
            source,
        }
    }

    /// `E0 = -2/L`, the specular solution.
    pub fn zero_order(kernel: &'a KernelMatrix) -> Self {
        Spectrum::new(kernel, kernel.zero_order().to_vec(), 1.0, 0.0, Vec::new())
    }

    pub fn kernel(&self) -> &'a KernelMatrix {
        self.kernel
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `zeta = int_0^inf E(k) dk` on the grid.
    pub fn impedance(&self) -> Complex64 {
        compensated_sum(self.values.iter().zip(self.kernel.grid.weights()).map(|(e, &w)| e * w))
    }

    /// `E(k)` at any `k >= 0`.
    pub fn at(&self, k: f64) -> Result<Complex64, SolverError> {
        if self.weight == Complex64::new(0.0, 0.0) || self.source.is_empty() {
            let l = dispersion_l(k, self.kernel.params())?;
            return Ok(self.base * (-2.0 / l));
        }
        let (row, l) = self.kernel.row_at(k)?;
        let coupled = compensated_sum(row.iter().zip(&self.source).map(|(m, s)| m * s));
        Ok(self.base * (-2.0 / l) + self.weight * coupled)
    }
}
