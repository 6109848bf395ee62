//! Globally adaptive Gauss-Kronrod integration of complex-valued integrands,
//! with a logarithmic map for `(0, inf)` and a cycle-by-cycle driver for
//! Fourier cosine and sine transforms.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use super::rules::{GK21_GAUSS_WEIGHTS, GK21_KRONROD_WEIGHTS, GK21_NODES};
use crate::summation::{ComplexSum, NeumaierSum};

/// Result of a quadrature with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

impl Integral {
    pub fn relative_error(&self) -> f64 {
        if self.value.norm() == 0.0 {
            self.error
        } else {
            self.error / self.value.norm()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("integrand is not finite at {at}")]
    NonFinite { at: f64 },
    #[error("no convergence within budget: best estimate {} with error {}", best.value, best.error)]
    NoConvergence { best: Integral },
    #[error("tolerance must be positive and finite")]
    InvalidTolerance,
    #[error("invalid integration interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
}

/// Stopping rule: stop once the error estimate is below `max(abs, rel * |I|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_subdivisions: usize,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Tolerance {
            rel,
            abs: 0.0,
            max_subdivisions: 4000,
        }
    }

    pub fn with_abs(mut self, abs: f64) -> Self {
        self.abs = abs;
        self
    }

    pub fn with_budget(mut self, max_subdivisions: usize) -> Self {
        self.max_subdivisions = max_subdivisions;
        self
    }

    fn validate(&self) -> Result<(), QuadratureError> {
        let ok = self.rel.is_finite()
            && self.abs.is_finite()
            && self.rel >= 0.0
            && self.abs >= 0.0
            && (self.rel > 0.0 || self.abs > 0.0)
            && self.max_subdivisions > 0;
        if ok {
            Ok(())
        } else {
            Err(QuadratureError::InvalidTolerance)
        }
    }

    fn target(&self, value: Complex64) -> f64 {
        self.abs.max(self.rel * value.norm())
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

fn gk21<F>(f: &F, a: f64, b: f64) -> Result<Segment, QuadratureError>
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    if !finite(fc) {
        return Err(QuadratureError::NonFinite { at: center });
    }
    let mut kronrod = fc * GK21_KRONROD_WEIGHTS[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut abs_sum = fc.norm() * GK21_KRONROD_WEIGHTS[10];
    let mut values = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 10];
    for (j, (&x, &wk)) in GK21_NODES[..10].iter().zip(&GK21_KRONROD_WEIGHTS[..10]).enumerate() {
        let dx = half * x;
        let (lo, hi) = (center - dx, center + dx);
        let (fl, fh) = (f(lo), f(hi));
        if !finite(fl) {
            return Err(QuadratureError::NonFinite { at: lo });
        }
        if !finite(fh) {
            return Err(QuadratureError::NonFinite { at: hi });
        }
        values[j] = (fl, fh);
        kronrod += (fl + fh) * wk;
        abs_sum += (fl.norm() + fh.norm()) * wk;
        if j % 2 == 1 {
            gauss += (fl + fh) * GK21_GAUSS_WEIGHTS[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = (fc - mean).norm() * GK21_KRONROD_WEIGHTS[10];
    for (j, &(fl, fh)) in values.iter().enumerate() {
        asc += GK21_KRONROD_WEIGHTS[j] * ((fl - mean).norm() + (fh - mean).norm());
    }
    let scale = half.abs();
    let value = kronrod * half;
    let res_abs = abs_sum * scale;
    let res_asc = asc * scale;
    let mut error = ((kronrod - gauss) * half).norm();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment { a, b, value, error })
}

/// Adaptive integration over `[breaks[0], breaks[last]]`, starting from the
/// given partition.
pub fn integrate_partitioned<F>(f: &F, breaks: &[f64], tol: Tolerance) -> Result<Integral, QuadratureError>
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    tol.validate()?;
    if breaks.len() < 2 {
        return Err(QuadratureError::InvalidInterval {
            a: breaks.first().copied().unwrap_or(f64::NAN),
            b: f64::NAN,
        });
    }
    for w in breaks.windows(2) {
        if w[0] >= w[1] || !w[0].is_finite() || !w[1].is_finite() {
            return Err(QuadratureError::InvalidInterval { a: w[0], b: w[1] });
        }
    }
    let mut segments = Vec::with_capacity(breaks.len() * 2);
    for w in breaks.windows(2) {
        segments.push(gk21(f, w[0], w[1])?);
    }
    let mut evaluations = 21 * segments.len();
    let budget = tol.max_subdivisions.max(segments.len());

    loop {
        let value: Complex64 = segments.iter().map(|s| s.value).collect::<ComplexSum>().value();
        let error: f64 = {
            let mut e = NeumaierSum::new();
            for s in &segments {
                e.add(s.error);
            }
            e.value()
        };
        if error <= tol.target(value) {
            return Ok(finish(segments, evaluations));
        }
        if segments.len() >= budget {
            return Err(QuadratureError::NoConvergence {
                best: finish(segments, evaluations),
            });
        }
        let (worst, _) = segments.iter().enumerate().fold(
            (0, -1.0),
            |acc, (i, s)| if s.error > acc.1 { (i, s.error) } else { acc },
        );
        let s = segments[worst];
        let mid = 0.5 * (s.a + s.b);
        if !(s.a < mid && mid < s.b) {
            return Err(QuadratureError::NoConvergence {
                best: finish(segments, evaluations),
            });
        }
        let left = gk21(f, s.a, mid)?;
        let right = gk21(f, mid, s.b)?;
        evaluations += 42;
        segments[worst] = left;
        segments.push(right);
    }
}

fn finish(mut segments: Vec<Segment>, evaluations: usize) -> Integral {
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = segments.iter().map(|s| s.value).collect::<ComplexSum>().value();
    let mut e = NeumaierSum::new();
    for s in &segments {
        e.add(s.error);
    }
    Integral {
        value,
        error: e.value(),
        evaluations,
    }
}

/// Adaptive integration over a finite interval.
pub fn integrate<F>(f: &F, a: f64, b: f64, tol: Tolerance) -> Result<Integral, QuadratureError>
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    if a == b {
        return Ok(Integral {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
        });
    }
    if a > b {
        let r = integrate_partitioned(f, &[b, a], tol)?;
        return Ok(Integral { value: -r.value, ..r });
    }
    integrate_partitioned(f, &[a, b], tol)
}

/// `int_0^inf f(k) dk` with unit length scale. See [`integrate_semi_infinite_scaled`].
pub fn integrate_semi_infinite<F>(f: &F, tol: f64) -> Result<Integral, QuadratureError>
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    integrate_semi_infinite_scaled(f, 1.0, Tolerance::relative(tol))
}

/// `int_0^inf f(k) dk` through `k = scale * exp(y)`.
///
/// Integrands that are bounded (or logarithmic) at the origin and decay
/// algebraically at infinity become exponentially decaying in `y`. The `y`
/// window is widened until the neglected end pieces are below the target;
/// their estimate is folded into the reported error.
pub fn integrate_semi_infinite_scaled<F>(f: &F, scale: f64, tol: Tolerance) -> Result<Integral, QuadratureError>
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    tol.validate()?;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(QuadratureError::InvalidInterval { a: 0.0, b: scale });
    }
    let mapped = |y: f64| {
        let k = scale * y.exp();
        f(k) * k
    };
    let mut half_width = 40.0;
    loop {
        let n = (half_width / 2.0) as usize;
        let breaks: Vec<f64> = (0..=2 * n)
            .map(|i| -half_width + 2.0 * i as f64 * half_width / (2 * n) as f64)
            .collect();
        let result = integrate_partitioned(&mapped, &breaks, tol);
        let left = mapped(-half_width);
        let right = mapped(half_width);
        let end_estimate = if finite(left) && finite(right) {
            left.norm() + right.norm()
        } else {
            f64::INFINITY
        };
        match result {
            Ok(mut integral) => {
                if end_estimate <= 0.1 * tol.target(integral.value) || half_width >= 160.0 {
                    integral.error += end_estimate;
                    if integral.error > tol.target(integral.value) {
                        return Err(QuadratureError::NoConvergence { best: integral });
                    }
                    return Ok(integral);
                }
            }
            Err(e) => {
                if half_width >= 160.0 || !matches!(e, QuadratureError::NonFinite { .. }) {
                    return Err(e);
                }
            }
        }
        half_width += 40.0;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Oscillation {
    Cosine,
    Sine,
}

/// `int_0^inf g(k) cos(kx) dk` (or `sin`) for a non-oscillatory `g` with
/// length scale `scale`.
///
/// The range up to twenty `scale` is integrated directly on a
/// partition aligned with the half-periods; the remainder is summed one
/// half-period at a time and accelerated with the epsilon algorithm.
pub fn integrate_fourier<F>(
    g: &F,
    x: f64,
    kind: Oscillation,
    scale: f64,
    tol: Tolerance,
) -> Result<Integral, QuadratureError>
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    tol.validate()?;
    if !(x >= 0.0 && x.is_finite()) {
        return Err(QuadratureError::InvalidInterval { a: 0.0, b: x });
    }
    if x == 0.0 {
        return match kind {
            Oscillation::Cosine => integrate_semi_infinite_scaled(g, scale, tol),
            Oscillation::Sine => Ok(Integral {
                value: Complex64::new(0.0, 0.0),
                error: 0.0,
                evaluations: 0,
            }),
        };
    }
    let weight = move |k: f64| match kind {
        Oscillation::Cosine => (k * x).cos(),
        Oscillation::Sine => (k * x).sin(),
    };
    let integrand = |k: f64| g(k) * weight(k);
    let half_period = PI / x;

    const HEAD_SCALES: f64 = 20.0;
    const MAX_HEAD_CYCLES: usize = 4_000;
    let head_cycles = ((HEAD_SCALES * scale / half_period).ceil() as usize).clamp(1, MAX_HEAD_CYCLES);
    let head_end = head_cycles as f64 * half_period;
    let mut breaks: Vec<f64> = (0..=head_cycles).map(|j| j as f64 * half_period).collect();
    let mut s = scale * 1e-6;
    while s < head_end {
        breaks.push(s);
        s *= 2.0;
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1e-300));
    let head_tol = Tolerance {
        max_subdivisions: tol.max_subdivisions.max(4 * breaks.len()),
        ..tol
    };
    let head = integrate_partitioned(&integrand, &breaks, head_tol)?;

    // Tail: half-period pieces, epsilon-accelerated.
    let target = tol.target(head.value).max(1e-300);
    let mut partial = Vec::new();
    let mut running = ComplexSum::new();
    let mut evaluations = head.evaluations;
    let mut error = head.error;
    let mut previous: Option<Complex64> = None;
    let mut stable = 0;
    let piece_tol = Tolerance::relative(tol.rel).with_abs(0.01 * target);
    for j in 0..2000usize {
        let a = head_end + j as f64 * half_period;
        let piece = integrate(&integrand, a, a + half_period, piece_tol)?;
        evaluations += piece.evaluations;
        error += piece.error;
        running.add(piece.value);
        partial.push(running.value());
        if piece.value.norm() <= 1e-3 * target && j >= 2 {
            return Ok(Integral {
                value: head.value + running.value(),
                error,
                evaluations,
            });
        }
        let window = &partial[partial.len().saturating_sub(40)..];
        let extrapolated = wynn_epsilon(window);
        if let Some(prev) = previous {
            if (extrapolated - prev).norm() <= 0.1 * target {
                stable += 1;
                if stable >= 3 {
                    return Ok(Integral {
                        value: head.value + extrapolated,
                        error: error + (extrapolated - prev).norm(),
                        evaluations,
                    });
                }
            } else {
                stable = 0;
            }
        }
        previous = Some(extrapolated);
    }
    Err(QuadratureError::NoConvergence {
        best: Integral {
            value: head.value + previous.unwrap_or(running.value()),
            error: f64::INFINITY,
            evaluations,
        },
    })
}

/// Wynn's epsilon algorithm: limit estimate of a sequence of partial sums.
pub fn wynn_epsilon(seq: &[Complex64]) -> Complex64 {
    let n = seq.len();
    if n < 3 {
        return *seq.last().unwrap_or(&Complex64::new(0.0, 0.0));
    }
    // prev = eps_{k-1}, cur = eps_k; columns shrink by one each step.
    let mut prev = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut cur: Vec<Complex64> = seq.to_vec();
    let mut best = seq[n - 1];
    let mut k = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let diff = cur[j + 1] - cur[j];
            if diff.norm() == 0.0 || !finite(diff.inv()) {
                return best;
            }
            next.push(prev[j + 1] + diff.inv());
        }
        k += 1;
        prev = cur;
        cur = next;
        if k % 2 == 0 {
            let candidate = *cur.last().unwrap();
            if finite(candidate) {
                best = candidate;
            } else {
                return best;
            }
        }
    }
    best
}
