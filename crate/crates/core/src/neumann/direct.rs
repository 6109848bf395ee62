use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{KernelMatrix, SolverError, Spectrum};

/// Largest accepted 1-norm condition number of `I - (1 - q) M`.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct DirectSolution<'a> {
    spectrum: Spectrum<'a>,
    impedance: Complex64,
    condition: f64,
}

impl<'a> DirectSolution<'a> {
    pub fn spectrum(&self) -> &Spectrum<'a> {
        &self.spectrum
    }

    pub fn impedance(&self) -> Complex64 {
        self.impedance
    }

    /// 1-norm condition number of the system matrix.
    pub fn condition(&self) -> f64 {
        self.condition
    }
}

fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solve `(I - (1 - q) M) E = E0` by LU.
pub fn solve_direct<'a>(kernel: &'a KernelMatrix, q: f64) -> Result<DirectSolution<'a>, SolverError> {
    let damping = 1.0 - q;
    let n = kernel.len();
    let e0 = kernel.zero_order();
    if damping == 0.0 {
        let spectrum = Spectrum::zero_order(kernel);
        let impedance = spectrum.impedance();
        return Ok(DirectSolution {
            spectrum,
            impedance,
            condition: 1.0,
        });
    }
    let a = DMatrix::<Complex64>::identity(n, n) - kernel.entries() * Complex64::new(damping, 0.0);
    let lu = a.clone().lu();
    let rhs = DVector::from_column_slice(e0);
    let x = lu.solve(&rhs).ok_or(SolverError::Singular)?;
    let inverse = lu.try_inverse().ok_or(SolverError::Singular)?;
    let condition = one_norm(&a) * one_norm(&inverse);
    if !condition.is_finite() {
        return Err(SolverError::Singular);
    }
    if condition > MAX_CONDITION {
        return Err(SolverError::IllConditioned { condition });
    }
    let values: Vec<Complex64> = x.iter().copied().collect();
    let spectrum = Spectrum::new(kernel, values.clone(), 1.0, damping, values);
    let impedance = spectrum.impedance();
    Ok(DirectSolution {
        spectrum,
        impedance,
        condition,
    })
}
