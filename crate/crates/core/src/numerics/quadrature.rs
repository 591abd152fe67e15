//! Adaptive panel Gauss-Legendre quadrature for smooth oscillatory integrands.
//!
//! The integrands of this crate are smooth but oscillate with a frequency
//! that is known in advance (a mode frequency, or a frequency difference).
//! The panel count therefore starts at four panels per oscillation period
//! and doubles until two successive refinements agree, enforcing at least
//! spectral accuracy per panel.

use crate::error::{Error, Result};
use crate::numerics::kahan::{KahanComplex, KahanSum};
use num_complex::Complex64;
use std::sync::OnceLock;

const GL_ORDER: usize = 15;

/// Tolerances and panel budget for adaptive refinement.
#[derive(Debug, Clone, Copy)]
pub struct QuadTol {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadTol {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_panels: 1 << 17,
        }
    }
}

impl QuadTol {
    pub fn with_tolerance(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: tol,
            ..Self::default()
        }
    }

    fn met(&self, delta: f64, magnitude: f64) -> bool {
        delta <= self.abs_tol.max(self.rel_tol * magnitude)
    }
}

/// Nodes and weights of the 15-point Gauss-Legendre rule on [-1, 1],
/// computed once by Newton iteration on the Legendre recurrence.
fn gl_rule() -> &'static ([f64; GL_ORDER], [f64; GL_ORDER]) {
    static RULE: OnceLock<([f64; GL_ORDER], [f64; GL_ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut nodes = [0.0; GL_ORDER];
        let mut weights = [0.0; GL_ORDER];
        for i in 0..n {
            // Chebyshev-like initial guess, then Newton on P_n(x) = 0
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn panel_count_for(freq_hint: f64, length: f64, min_panels: usize) -> usize {
    // at least 4 panels per oscillation period
    let periods = freq_hint.abs() * length / (2.0 * std::f64::consts::PI);
    let wanted = (4.0 * periods).ceil() as usize;
    wanted.max(min_panels)
}

fn sweep_complex<F: Fn(f64) -> Complex64>(f: &F, lo: f64, hi: f64, panels: usize) -> Complex64 {
    let (nodes, weights) = gl_rule();
    let h = (hi - lo) / panels as f64;
    let mut acc = KahanComplex::new();
    for p in 0..panels {
        let a = lo + p as f64 * h;
        let c = a + 0.5 * h;
        let s = 0.5 * h;
        for (x, w) in nodes.iter().zip(weights.iter()) {
            acc.add(f(c + s * x) * (w * s));
        }
    }
    acc.value()
}

fn sweep_real<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, panels: usize) -> f64 {
    let (nodes, weights) = gl_rule();
    let h = (hi - lo) / panels as f64;
    let mut acc = KahanSum::new();
    for p in 0..panels {
        let a = lo + p as f64 * h;
        let c = a + 0.5 * h;
        let s = 0.5 * h;
        for (x, w) in nodes.iter().zip(weights.iter()) {
            acc.add(f(c + s * x) * (w * s));
        }
    }
    acc.value()
}

/// Integrate a complex-valued integrand over [lo, hi].
///
/// `freq_hint` is the largest angular frequency present in the integrand;
/// it fixes the initial panel count (>= 4 panels per period). Refinement
/// doubles the panel count until two sweeps agree within `tol`.
pub fn integrate_complex<F: Fn(f64) -> Complex64>(
    f: F,
    lo: f64,
    hi: f64,
    freq_hint: f64,
    tol: &QuadTol,
) -> Result<Complex64> {
    let mut panels = panel_count_for(freq_hint, hi - lo, 4);
    let mut coarse = sweep_complex(&f, lo, hi, panels);
    loop {
        let next = panels * 2;
        if next > tol.max_panels {
            return Err(Error::QuadratureNotConverged {
                panels,
                last_delta: f64::NAN,
            });
        }
        let fine = sweep_complex(&f, lo, hi, next);
        let delta = (fine - coarse).norm();
        if tol.met(delta, fine.norm()) {
            return Ok(fine);
        }
        panels = next;
        coarse = fine;
        if panels * 2 > tol.max_panels {
            return Err(Error::QuadratureNotConverged {
                panels,
                last_delta: delta,
            });
        }
    }
}

/// Real-valued counterpart of [`integrate_complex`].
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    freq_hint: f64,
    tol: &QuadTol,
) -> Result<f64> {
    let mut panels = panel_count_for(freq_hint, hi - lo, 4);
    let mut coarse = sweep_real(&f, lo, hi, panels);
    loop {
        let next = panels * 2;
        if next > tol.max_panels {
            return Err(Error::QuadratureNotConverged {
                panels,
                last_delta: f64::NAN,
            });
        }
        let fine = sweep_real(&f, lo, hi, next);
        let delta = (fine - coarse).abs();
        if tol.met(delta, fine.abs()) {
            return Ok(fine);
        }
        panels = next;
        coarse = fine;
        if panels * 2 > tol.max_panels {
            return Err(Error::QuadratureNotConverged {
                panels,
                last_delta: delta,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gl_rule_integrates_polynomials_exactly() {
        // degree 29 is exact for a 15-point rule
        let v = integrate(|x| x.powi(28), -1.0, 1.0, 0.0, &QuadTol::default()).unwrap();
        assert_abs_diff_eq!(v, 2.0 / 29.0, epsilon = 1e-14);
    }

    #[test]
    fn oscillatory_exponential_matches_closed_form() {
        for &omega in &[1.0, 37.5, 400.0] {
            let v = integrate_complex(
                |x| Complex64::new(0.0, omega * x).exp(),
                -1.0,
                1.0,
                omega,
                &QuadTol::default(),
            )
            .unwrap();
            let exact = 2.0 * omega.sin() / omega;
            assert_abs_diff_eq!(v.re, exact, epsilon = 1e-13);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn budget_exhaustion_reports_error() {
        let tol = QuadTol {
            abs_tol: 1e-300,
            rel_tol: 0.0,
            max_panels: 8,
        };
        let err = integrate(|x| (1e4 * x).sin() * x.abs().sqrt(), -1.0, 1.0, 1e4, &tol).unwrap_err();
        assert!(matches!(err, Error::QuadratureNotConverged { .. }));
    }
}
