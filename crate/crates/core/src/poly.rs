//! Dense complex polynomials (ascending coefficients) and the Aberth–Ehrlich
//! simultaneous root iteration.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Product of two ascending-coefficient polynomials.
pub fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Sum of two polynomials, padding the shorter one.
pub fn add(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or_default() + b.get(i).copied().unwrap_or_default())
        .collect()
}

pub fn scale(a: &[Complex64], k: Complex64) -> Vec<Complex64> {
    a.iter().map(|c| c * k).collect()
}

/// Horner evaluation.
pub fn eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// Value and first derivative in one Horner pass.
pub fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    let mut p = zero;
    let mut dp = zero;
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// `sum |a_i| |z|^i`, the scale against which rounding in [`eval`] is measured.
pub fn magnitude_bound(coeffs: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

/// Initial guesses spread on a circle whose radius is the geometric-mean
/// root magnitude, rotated off the real axis.
pub fn circle_guesses(coeffs: &[Complex64]) -> Vec<Complex64> {
    let degree = coeffs.len().saturating_sub(1);
    if degree == 0 {
        return Vec::new();
    }
    let lead = coeffs[degree].norm();
    let tail = coeffs[0].norm();
    let radius = if tail > 0.0 && lead > 0.0 {
        (tail / lead).powf(1.0 / degree as f64)
    } else {
        1.0
    };
    (0..degree)
        .map(|k| {
            let phase = 2.0 * std::f64::consts::PI * k as f64 / degree as f64 + 0.4;
            Complex64::from_polar(radius, phase)
        })
        .collect()
}

/// Converged roots together with the iteration count it took.
#[derive(Debug, Clone)]
pub struct AberthOutcome {
    pub roots: Vec<Complex64>,
    pub iterations: usize,
}

/// Aberth–Ehrlich iteration on all roots simultaneously.
///
/// A root stops moving once its Newton correction falls below a relative
/// `1e-15` or its residual reaches the rounding floor of Horner evaluation.
/// Multiple roots converge linearly; the rounding-floor test is what lets
/// them terminate.
pub fn aberth(coeffs: &[Complex64], initial: &[Complex64], max_iterations: usize) -> Result<AberthOutcome> {
    let degree = coeffs.len().saturating_sub(1);
    if degree == 0 || coeffs[degree] == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("polynomial has no leading coefficient".into()));
    }
    if initial.len() != degree {
        return Err(Error::Domain(format!(
            "need {degree} initial guesses, got {}",
            initial.len()
        )));
    }

    let mut z = initial.to_vec();
    let mut done = vec![false; degree];
    for iteration in 1..=max_iterations {
        for k in 0..degree {
            if done[k] {
                continue;
            }
            let (p, dp) = eval_with_derivative(coeffs, z[k]);
            if p.norm() <= 4.0 * f64::EPSILON * magnitude_bound(coeffs, z[k]) {
                done[k] = true;
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..degree)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.is_finite() {
                continue;
            }
            z[k] -= step;
            if step.norm() <= 1e-15 * z[k].norm().max(f64::MIN_POSITIVE) {
                done[k] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return Ok(AberthOutcome { roots: z, iterations: iteration });
        }
    }

    let residuals: Vec<f64> = z.iter().map(|&r| eval(coeffs, r).norm()).collect();
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    Err(Error::NoConvergence {
        iterations: max_iterations,
        best: z,
        residuals,
        max_residual,
    })
}
