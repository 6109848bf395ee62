//! Complex special functions behind the dispersion function and the kernel.
//!
//! Two functions are provided, each split into regions where a single
//! expansion is accurate to a few ulp:
//!
//! * `scaled_erfc(a) = exp(a^2) erfc(a)` on `Re(a) > 0`. The erf power series
//!   is used for `Re(a) <= 1.5, |a| < 7`; the Laplace continued fraction
//!   everywhere else. Near the imaginary axis the erf terms share a phase, so
//!   the series loses at most `exp(2 Re(a)^2)` to cancellation, while the
//!   continued fraction there needs tens of thousands of terms.
//! * `exp_e1(z) = E1(z)` on the principal branch, together with the scaled
//!   `exp(z) E1(z)`. The power series covers `|z| < 2` and the strip along the
//!   negative real axis where `|z| + Re(z) <= 4` (cancellation bounded by
//!   `exp(|z| + Re z)`); the Jacobi continued fraction covers the rest and
//!   converges in under ~200 terms there.

use num_complex::Complex64;
use thiserror::Error;

use crate::summation::ComplexSum;

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const ERF_SERIES_MAX_RE: f64 = 1.5;
const ERF_SERIES_MAX_ABS: f64 = 7.0;
const E1_SERIES_RADIUS: f64 = 2.0;
const E1_SERIES_STRIP: f64 = 4.0;
const E1_SERIES_MAX_ABS: f64 = 40.0;
const E1_ASYMPTOTIC_MIN_ABS: f64 = 40.0;
const MAX_CF_TERMS: usize = 20_000;
// A few ulp: at very large arguments successive Lentz factors differ from 1
// only by rounding.
const CF_TOLERANCE: f64 = 4.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SpecialFunctionError {
    #[error("scaled erfc requires Re(a) > 0, got {0}")]
    LeftHalfPlane(Complex64),
    #[error("E1 has a logarithmic singularity at z = 0")]
    Pole,
    #[error("E1 argument {0} lies on the branch cut along the negative real axis")]
    BranchCut(Complex64),
    #[error("{function}({arg}) is not representable in double precision")]
    Overflow { function: &'static str, arg: Complex64 },
    #[error("non-finite argument {0}")]
    NonFinite(Complex64),
    #[error("continued fraction for {function} did not converge at {arg}")]
    NoConvergence { function: &'static str, arg: Complex64 },
}

fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `exp(a^2) * erfc(a)` for `Re(a) > 0`.
pub fn scaled_erfc(a: Complex64) -> Result<Complex64, SpecialFunctionError> {
    if !is_finite(a) {
        return Err(SpecialFunctionError::NonFinite(a));
    }
    if a.re <= 0.0 {
        return Err(SpecialFunctionError::LeftHalfPlane(a));
    }
    let value = if a.re <= ERF_SERIES_MAX_RE && a.norm() < ERF_SERIES_MAX_ABS {
        scaled_erfc_series(a)
    } else {
        scaled_erfc_continued_fraction(a)?
    };
    if is_finite(value) {
        Ok(value)
    } else {
        Err(SpecialFunctionError::Overflow {
            function: "scaled_erfc",
            arg: a,
        })
    }
}

// exp(a^2) (1 - erf(a)) with erf(a) = 2/sqrt(pi) sum (-1)^n a^(2n+1) / (n! (2n+1)).
fn scaled_erfc_series(a: Complex64) -> Complex64 {
    let minus_a2 = -a * a;
    let mut term = a;
    let mut sum = ComplexSum::new();
    for n in 0..400usize {
        let contribution = term / (2 * n + 1) as f64;
        sum.add(contribution);
        if contribution.norm() <= 1e-17 * sum.value().norm() {
            break;
        }
        term = term * minus_a2 / (n + 1) as f64;
    }
    let erf = 2.0 * FRAC_1_SQRT_PI * sum.value();
    (a * a).exp() * (Complex64::new(1.0, 0.0) - erf)
}

// sqrt(pi) * S(a) = 1 / (a + (1/2) / (a + 1 / (a + (3/2) / (a + ...)))), modified Lentz.
fn scaled_erfc_continued_fraction(a: Complex64) -> Result<Complex64, SpecialFunctionError> {
    let tiny = Complex64::new(1e-300, 0.0);
    let mut f = a;
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for n in 1..MAX_CF_TERMS {
        let coeff = n as f64 * 0.5;
        d = a + d * coeff;
        if d == Complex64::new(0.0, 0.0) {
            d = tiny;
        }
        c = a + coeff / c;
        if c == Complex64::new(0.0, 0.0) {
            c = tiny;
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < CF_TOLERANCE {
            return Ok(FRAC_1_SQRT_PI / f);
        }
    }
    Err(SpecialFunctionError::NoConvergence {
        function: "scaled_erfc",
        arg: a,
    })
}

fn check_e1_argument(z: Complex64) -> Result<(), SpecialFunctionError> {
    if !is_finite(z) {
        return Err(SpecialFunctionError::NonFinite(z));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Err(SpecialFunctionError::Pole);
    }
    if z.im == 0.0 && z.re < 0.0 {
        return Err(SpecialFunctionError::BranchCut(z));
    }
    Ok(())
}

fn e1_uses_series(z: Complex64) -> bool {
    let r = z.norm();
    r < E1_SERIES_RADIUS || (r + z.re <= E1_SERIES_STRIP && r <= E1_SERIES_MAX_ABS)
}

/// Exponential integral `E1(z)`, principal branch.
pub fn exp_e1(z: Complex64) -> Result<Complex64, SpecialFunctionError> {
    check_e1_argument(z)?;
    let value = if e1_uses_series(z) {
        e1_series(z)
    } else {
        let scaled = scaled_e1_continued_fraction(z)?;
        (-z).exp() * scaled
    };
    if is_finite(value) {
        Ok(value)
    } else {
        Err(SpecialFunctionError::Overflow {
            function: "exp_e1",
            arg: z,
        })
    }
}

/// `exp(z) * E1(z)`, which stays of order `1/z` where `E1` itself under- or
/// overflows.
pub fn scaled_e1(z: Complex64) -> Result<Complex64, SpecialFunctionError> {
    check_e1_argument(z)?;
    let value = if e1_uses_series(z) {
        z.exp() * e1_series(z)
    } else {
        scaled_e1_continued_fraction(z)?
    };
    if is_finite(value) {
        Ok(value)
    } else {
        Err(SpecialFunctionError::Overflow {
            function: "scaled_e1",
            arg: z,
        })
    }
}

/// `1/z - exp(z) E1(z) = int_0^inf exp(-t) / (z + t)^2 dt`.
///
/// The difference cancels badly for large `|z|`, where the asymptotic
/// series `sum_{n>=1} (-1)^(n+1) n! / z^(n+1)` is used directly instead.
pub fn scaled_e1_complement(z: Complex64) -> Result<Complex64, SpecialFunctionError> {
    check_e1_argument(z)?;
    if z.norm() < E1_ASYMPTOTIC_MIN_ABS {
        return Ok(z.inv() - scaled_e1(z)?);
    }
    let inv = z.inv();
    let mut term = inv * inv;
    let mut sum = ComplexSum::new();
    for n in 1..200usize {
        sum.add(term);
        let next = -term * (n + 1) as f64 * inv;
        if next.norm() >= term.norm() || next.norm() <= 1e-17 * sum.value().norm() {
            break;
        }
        term = next;
    }
    Ok(sum.value())
}

// E1(z) = -gamma - ln z - sum_{n>=1} (-z)^n / (n n!)
fn e1_series(z: Complex64) -> Complex64 {
    let mut sum = ComplexSum::new();
    sum.add(Complex64::new(-EULER_GAMMA, 0.0));
    sum.add(-z.ln());
    let mut power = Complex64::new(1.0, 0.0);
    let mut tail = ComplexSum::new();
    for n in 1..2000usize {
        power = power * (-z) / n as f64;
        let term = power / n as f64;
        tail.add(term);
        if term.norm() <= 1e-17 * tail.value().norm().max(1e-300) {
            break;
        }
    }
    sum.add(-tail.value());
    sum.value()
}

// exp(z) E1(z) = 1 / (z + 1 - 1 / (z + 3 - 4 / (z + 5 - 9 / ...))), modified Lentz.
fn scaled_e1_continued_fraction(z: Complex64) -> Result<Complex64, SpecialFunctionError> {
    let tiny = Complex64::new(1e-300, 0.0);
    let mut f = z + 1.0;
    if f == Complex64::new(0.0, 0.0) {
        f = tiny;
    }
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for n in 1..MAX_CF_TERMS {
        let a = -((n * n) as f64);
        let b = z + (2 * n + 1) as f64;
        d = b + d * a;
        if d == Complex64::new(0.0, 0.0) {
            d = tiny;
        }
        c = b + a / c;
        if c == Complex64::new(0.0, 0.0) {
            c = tiny;
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < CF_TOLERANCE {
            return Ok(f.inv());
        }
    }
    Err(SpecialFunctionError::NoConvergence {
        function: "scaled_e1",
        arg: z,
    })
}
