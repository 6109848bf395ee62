use num_complex::Complex64;
use serde::Serialize;

use super::{grid_spec_for, impedance_term, iterate_en, KernelMatrix, SolverError, Spectrum};
use crate::kinetic::PlasmaParams;
use crate::quadrature::build_grid;

/// Spectra `E_0 ... E_N` of the von Neumann series on one kernel.
#[derive(Debug, Clone)]
pub struct NeumannSeries<'a> {
    kernel: &'a KernelMatrix,
    spectra: Vec<Vec<Complex64>>,
    terms: Vec<Complex64>,
}

impl<'a> NeumannSeries<'a> {
    pub fn new(kernel: &'a KernelMatrix, max_order: usize) -> Result<Self, SolverError> {
        let mut spectra = vec![kernel.zero_order().to_vec()];
        for _ in 0..max_order {
            let next = iterate_en(spectra.last().expect("nonempty"), kernel)?;
            spectra.push(next);
        }
        let terms = spectra
            .iter()
            .map(|e| impedance_term(e, kernel.grid()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(NeumannSeries { kernel, spectra, terms })
    }

    pub fn max_order(&self) -> usize {
        self.spectra.len() - 1
    }

    /// `zeta_n`, unweighted.
    pub fn terms(&self) -> &[Complex64] {
        &self.terms
    }

    pub fn spectrum_values(&self, n: usize) -> &[Complex64] {
        &self.spectra[n]
    }

    /// `E_n` alone as an interpolable spectrum.
    pub fn term_spectrum(&self, n: usize) -> Spectrum<'a> {
        if n == 0 {
            return Spectrum::zero_order(self.kernel);
        }
        Spectrum::new(
            self.kernel,
            self.spectra[n].clone(),
            0.0,
            1.0,
            self.spectra[n - 1].clone(),
        )
    }

    /// `sum_{n <= order} (1 - q)^n E_n`.
    pub fn partial_spectrum(&self, q: f64, order: usize) -> Spectrum<'a> {
        let weighted = |upto: usize| {
            let mut acc = vec![Complex64::new(0.0, 0.0); self.kernel.len()];
            let mut w = 1.0;
            for e in &self.spectra[..=upto] {
                for (a, x) in acc.iter_mut().zip(e) {
                    *a += w * x;
                }
                w *= 1.0 - q;
            }
            acc
        };
        if order == 0 {
            return Spectrum::zero_order(self.kernel);
        }
        Spectrum::new(self.kernel, weighted(order), 1.0, 1.0 - q, weighted(order - 1))
    }

    pub fn impedance(&self, q: f64) -> ImpedanceSeries {
        ImpedanceSeries::from_terms(self.terms.clone(), q)
    }
}

/// Impedance terms `zeta_n` and their `(1 - q)^n`-weighted partial sums.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImpedanceSeries {
    terms: Vec<Complex64>,
    q: f64,
    partial_sums: Vec<Complex64>,
    tail_estimate: f64,
    diverging: bool,
}

impl ImpedanceSeries {
    pub fn from_terms(terms: Vec<Complex64>, q: f64) -> Self {
        assert!(!terms.is_empty(), "series needs at least the zero-order term");
        let damping = 1.0 - q;
        let mut partial_sums = Vec::with_capacity(terms.len());
        let mut acc = Complex64::new(0.0, 0.0);
        let mut w = 1.0;
        for t in &terms {
            acc += w * t;
            partial_sums.push(acc);
            w *= damping;
        }
        let ratios: Vec<f64> = terms
            .windows(2)
            .map(|p| {
                if damping == 0.0 {
                    0.0
                } else {
                    damping * p[1].norm() / p[0].norm()
                }
            })
            .collect();
        let n = terms.len() - 1;
        let last = terms[n].norm();
        let tail_estimate = match ratios.last() {
            None if damping == 0.0 => 0.0,
            None => f64::INFINITY,
            Some(&r) if r >= 1.0 => f64::INFINITY,
            Some(&r) => last * damping.powi(n as i32) * r / (1.0 - r),
        };
        let recent = &ratios[ratios.len().saturating_sub(2)..];
        let diverging = !recent.is_empty() && recent.iter().all(|&r| r >= 1.0);
        ImpedanceSeries {
            terms,
            q,
            partial_sums,
            tail_estimate,
            diverging,
        }
    }

    pub fn terms(&self) -> &[Complex64] {
        &self.terms
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn partial_sums(&self) -> &[Complex64] {
        &self.partial_sums
    }

    pub fn total(&self) -> Complex64 {
        *self.partial_sums.last().expect("nonempty")
    }

    /// Geometric estimate of `|sum_{n > N} (1 - q)^n zeta_n|` from the last term ratio.
    pub fn tail_estimate(&self) -> f64 {
        self.tail_estimate
    }

    /// Set when the last (up to two) term ratios `|(1-q) zeta_{n+1} / zeta_n|`
    /// are all `>= 1`.
    pub fn is_diverging(&self) -> bool {
        self.diverging
    }
}

/// Series through order `max_order` on the grid adapted to `params`, summed
/// with `params.q()`.
pub fn sum_series(params: &PlasmaParams, max_order: usize) -> Result<ImpedanceSeries, SolverError> {
    let grid = build_grid(&grid_spec_for(params))?;
    let kernel = KernelMatrix::new(grid, *params)?;
    Ok(NeumannSeries::new(&kernel, max_order)?.impedance(params.q()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn partial_sums_use_powers_of_damping() {
        let s = ImpedanceSeries::from_terms(vec![c(1.0, 1.0), c(0.5, 0.0), c(0.25, 0.1)], 0.5);
        let p = s.partial_sums();
        assert!((p[1] - p[0] - 0.5 * c(0.5, 0.0)).norm() < 1e-15);
        assert!((p[2] - p[1] - 0.25 * c(0.25, 0.1)).norm() < 1e-15);
        // remainder estimate (1-q)^2 |t2| r / (1 - r)
        let r = 0.5 * c(0.25, 0.1).norm() / 0.5;
        assert!((s.tail_estimate() - 0.25 * c(0.25, 0.1).norm() * r / (1.0 - r)).abs() < 1e-15);
        assert!(!s.is_diverging());
    }

    #[test]
    fn specular_total_is_zero_order() {
        let s = ImpedanceSeries::from_terms(vec![c(1.0, 2.0), c(5.0, 5.0), c(-3.0, 1.0)], 1.0);
        assert_eq!(s.total(), c(1.0, 2.0));
        assert_eq!(s.tail_estimate(), 0.0);
    }

    #[test]
    fn growing_terms_flag_divergence() {
        let s = ImpedanceSeries::from_terms(vec![c(1.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)], 0.0);
        assert!(s.is_diverging());
        assert!(s.tail_estimate().is_infinite());
    }
}
