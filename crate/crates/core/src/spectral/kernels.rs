//! Oscillatory integral kernels shared by matrix elements and overlaps.
//!
//! Every spinor bilinear of the model reduces, through the constancy of
//! |w_+-|, to one of two scalar integrals over the box:
//!
//! - the Fourier kernel `J(D) = int V(x) e^{i D x} dx`, closed-form for
//!   analytic potentials and quadrature-backed otherwise;
//! - the phase kernel `K(D) = int e^{i (f(x) + D x)} dx`, always evaluated
//!   by adaptive panel quadrature.
//!
//! The frequency differences `D` of an N x N block live on an O(N) lattice,
//! so both engines memoize kernel values keyed by the exact bit pattern of
//! `D`; the distinct set is integrated in parallel and the (deterministic)
//! entry assembly is pure arithmetic on cached values.

use crate::error::Result;
use crate::numerics::quadrature::{integrate_complex, QuadTol};
use crate::spectral::potential::{Potential, TrigKind, TrigTerm};
use crate::spectral::{level_from_raw, perturbed_eigenvalue_exact, unperturbed_eigenvalue, ModelParams};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::HashMap;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `int_{-a}^{a} e^{i y x} dx = 2 sin(y a)/y`, real.
fn box_exponential(y: f64, a: f64) -> f64 {
    if y == 0.0 {
        2.0 * a
    } else {
        2.0 * (y * a).sin() / y
    }
}

/// Moment `int_{-a}^{a} x^m e^{i d x} dx`.
///
/// Small |d a| uses the Taylor series in (i d); otherwise the closed-form
/// antiderivative `e^{i d x} sum_t (-1)^t m!/(m-t)! x^{m-t} / (i d)^{t+1}`
/// evaluated at the endpoints.
fn moment(m: usize, d: f64, a: f64) -> Complex64 {
    if d.abs() * a <= 1.0 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut pow = Complex64::new(1.0, 0.0); // (i d)^t / t!
        for t in 0..200 {
            if (m + t) % 2 == 0 {
                let p = m + t + 1;
                let term = pow * (2.0 * a.powi(p as i32) / p as f64);
                acc += term;
                if term.norm() < 1e-18 * acc.norm().max(1e-300) && t > 2 {
                    break;
                }
            }
            pow *= I * d / (t as f64 + 1.0);
        }
        acc
    } else {
        let id = I * d;
        let anti = |x: f64| -> Complex64 {
            let mut sum = Complex64::new(0.0, 0.0);
            let mut fact = 1.0; // m!/(m-t)!
            let mut inv = 1.0 / id; // 1/(i d)^{t+1}
            for t in 0..=m {
                let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
                sum += sign * fact * x.powi((m - t) as i32) * inv;
                fact *= (m - t) as f64;
                inv /= id;
            }
            (id * x).exp() * sum
        };
        anti(a) - anti(-a)
    }
}

fn trig_kernel(t: &TrigTerm, d: f64, a: f64) -> Complex64 {
    let kappa = t.harmonic as f64 * std::f64::consts::PI / a;
    let gp = box_exponential(d + kappa, a);
    let gm = box_exponential(d - kappa, a);
    match t.kind {
        // int sin(kx) e^{idx} = i (G(d-k) - G(d+k))/2
        TrigKind::Sin => I * (t.amp * 0.5 * (gm - gp)),
        TrigKind::Cos => Complex64::new(t.amp * 0.5 * (gp + gm), 0.0),
    }
}

/// Fourier kernel `J(D)` by closed form (analytic potentials only).
pub(crate) fn fourier_kernel_closed(pot: &Potential, d: f64) -> Option<Complex64> {
    let (poly, trig) = pot.analytic_parts()?;
    let a = pot.half_width();
    let mut j = Complex64::new(0.0, 0.0);
    for (m, &c) in poly.iter().enumerate() {
        if c != 0.0 {
            j += c * moment(m, d, a);
        }
    }
    for t in trig {
        j += trig_kernel(t, d, a);
    }
    Some(j)
}

/// Fourier kernel `J(D)` by adaptive panel quadrature.
pub(crate) fn fourier_kernel_quadrature(
    pot: &Potential,
    d: f64,
    tol: &QuadTol,
) -> Result<Complex64> {
    let a = pot.half_width();
    let freq = d.abs() + pot.freq_bound();
    integrate_complex(
        |x| Complex64::new(0.0, d * x).exp() * pot.value(x),
        -a,
        a,
        freq,
        tol,
    )
}

/// Phase kernel `K(D) = int e^{i(f(x) + D x)} dx` by quadrature; the phase
/// derivative is `V(x) + D`, so the frequency hint is `|D| + max|V|`.
pub(crate) fn phase_kernel(pot: &Potential, d: f64, tol: &QuadTol) -> Result<Complex64> {
    let a = pot.half_width();
    let freq = d.abs() + pot.max_abs();
    integrate_complex(
        |x| Complex64::new(0.0, pot.phase(x) + d * x).exp(),
        -a,
        a,
        freq,
        tol,
    )
}

/// Normalization constants (C+, C-) of the mode with eigenvalue `eta`.
///
/// C+ is real positive, 1/sqrt(2a); C- follows from the boundary condition
/// at x = -a: C- = -i C+ e^{2i (f(-a) + eta a)}.
pub(crate) fn mode_constants(f_at_minus_a: f64, eta: f64, a: f64) -> (Complex64, Complex64) {
    let cp = Complex64::new(1.0 / (2.0 * a).sqrt(), 0.0);
    let cm = -I * cp * (2.0 * I * (f_at_minus_a + eta * a)).exp();
    (cp, cm)
}

fn bits(d: f64) -> u64 {
    d.to_bits()
}

/// Memoized matrix elements `<phi_m | V | phi_n>` between unperturbed modes.
///
/// `V_{m,n} = (conj(C+_m) C+_n J(D) + conj(C-_m) C-_n J(-D)) / 2` with
/// `D = eps_m - eps_n`.
pub struct MatrixElementEngine {
    a: f64,
    analytic: bool,
    jcache: HashMap<u64, Complex64>,
}

impl MatrixElementEngine {
    /// Prepare kernels for all index pairs `|m|, |n| <= max_index`.
    pub fn new(
        pot: &Potential,
        params: &ModelParams,
        max_index: u32,
        tol: &QuadTol,
    ) -> Result<Self> {
        let a = params.a();
        let mut deltas: Vec<f64> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let idx: Vec<i32> = signed_indices(max_index);
        for &m in &idx {
            for &n in &idx {
                let d = delta_unperturbed(m, n, params);
                if seen.insert(bits(d)) {
                    deltas.push(d);
                }
            }
        }
        let analytic = pot.analytic_parts().is_some();
        let jcache: HashMap<u64, Complex64> = if analytic {
            deltas
                .iter()
                .map(|&d| (bits(d), fourier_kernel_closed(pot, d).unwrap()))
                .collect()
        } else {
            let pairs: Result<Vec<(u64, Complex64)>> = deltas
                .par_iter()
                .map(|&d| Ok((bits(d), fourier_kernel_quadrature(pot, d, tol)?)))
                .collect();
            pairs?.into_iter().collect()
        };
        Ok(Self { a, analytic, jcache })
    }

    pub fn is_closed_form(&self) -> bool {
        self.analytic
    }

    /// Matrix element for raw signed level indices (nonzero).
    pub fn mel(&self, m: i32, n: i32) -> Complex64 {
        let a = self.a;
        let em = raw_eigenvalue(m, a);
        let en = raw_eigenvalue(n, a);
        let d = em - en;
        let j = self.jcache[&bits(d)];
        let jneg = j.conj(); // J(-D) = conj(J(D)) for real V
        let (cpm, cmm) = mode_constants(0.0, em, a);
        let (cpn, cmn) = mode_constants(0.0, en, a);
        (cpm.conj() * cpn * j + cmm.conj() * cmn * jneg) * 0.5
    }
}

/// Memoized overlaps `<psi_k | phi_n>` between perturbed and unperturbed
/// modes, backed by the phase kernel.
pub struct OverlapEngine {
    pot: Potential,
    a: f64,
    mean: f64,
    kcache: HashMap<u64, Complex64>,
}

impl OverlapEngine {
    /// Prepare phase kernels for the given perturbed rows and unperturbed
    /// columns (raw signed indices). Only pairs from `rows` x `cols` may be
    /// queried afterwards.
    pub fn new(
        pot: &Potential,
        params: &ModelParams,
        rows: &[i32],
        cols: &[i32],
        tol: &QuadTol,
    ) -> Result<Self> {
        let mut deltas: Vec<f64> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for &k in rows {
            for &n in cols {
                let d = delta_overlap(k, n, pot, params);
                if seen.insert(bits(d)) {
                    deltas.push(d);
                }
            }
        }
        let pairs: Result<Vec<(u64, Complex64)>> = deltas
            .par_iter()
            .map(|&d| Ok((bits(d), phase_kernel(pot, d, tol)?)))
            .collect();
        Ok(Self {
            pot: pot.clone(),
            a: params.a(),
            mean: pot.mean(),
            kcache: pairs?.into_iter().collect(),
        })
    }

    /// `<psi_k | phi_n>` for raw signed indices.
    pub fn overlap(&self, k: i32, n: i32) -> Complex64 {
        let a = self.a;
        let eta = raw_eigenvalue(k, a) + self.mean;
        let en = raw_eigenvalue(n, a);
        let d = en - eta;
        let kk = self.kcache[&bits(d)];
        let (cp_psi, cm_psi) = mode_constants(self.pot.phase(-a), eta, a);
        let (cp_phi, cm_phi) = mode_constants(0.0, en, a);
        (cp_psi.conj() * cp_phi * kk.conj() + cm_psi.conj() * cm_phi * kk) * 0.5
    }
}

/// eps for a raw nonzero index without LevelIndex construction overhead.
pub(crate) fn raw_eigenvalue(k: i32, a: f64) -> f64 {
    let n = if k >= 1 { k - 1 } else { k };
    (2 * n + 1) as f64 * std::f64::consts::FRAC_PI_4 / a
}

fn delta_unperturbed(m: i32, n: i32, params: &ModelParams) -> f64 {
    unperturbed_eigenvalue(level_from_raw(m), params)
        - unperturbed_eigenvalue(level_from_raw(n), params)
}

fn delta_overlap(k: i32, n: i32, pot: &Potential, params: &ModelParams) -> f64 {
    unperturbed_eigenvalue(level_from_raw(n), params)
        - perturbed_eigenvalue_exact(level_from_raw(k), pot, params)
}

/// Both branches: 1..=max and -1..=-max.
pub fn signed_indices(max: u32) -> Vec<i32> {
    let mut v: Vec<i32> = (1..=max as i32).collect();
    v.extend((1..=max as i32).map(|j| -j));
    v
}

/// Positive branch 1..=max.
pub fn positive_indices(max: u32) -> Vec<i32> {
    (1..=max as i32).collect()
}

/// Negative branch -1..=-max.
pub fn negative_indices(max: u32) -> Vec<i32> {
    (1..=max as i32).map(|j| -j).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn moments_match_quadrature() {
        let tol = QuadTol::default();
        for &m in &[0usize, 1, 2, 5, 8] {
            for &d in &[0.0, 0.3, 0.9, 1.1, 7.7, 153.2] {
                let closed = moment(m, d, 1.0);
                let quad = integrate_complex(
                    |x| Complex64::new(0.0, d * x).exp() * x.powi(m as i32),
                    -1.0,
                    1.0,
                    d,
                    &tol,
                )
                .unwrap();
                assert_abs_diff_eq!(closed.re, quad.re, epsilon = 1e-12);
                assert_abs_diff_eq!(closed.im, quad.im, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn trig_kernel_matches_quadrature_including_resonance() {
        let params = ModelParams::new(1.0, 0.0).unwrap();
        let pot = Potential::sine(0.8, 2, &params).unwrap();
        let tol = QuadTol::default();
        // d = 2 pi hits the resonance of harmonic 2 exactly
        for &d in &[0.0, 1.0, 2.0 * std::f64::consts::PI, 40.0] {
            let closed = fourier_kernel_closed(&pot, d).unwrap();
            let quad = fourier_kernel_quadrature(&pot, d, &tol).unwrap();
            assert_abs_diff_eq!(closed.re, quad.re, epsilon = 1e-12);
            assert_abs_diff_eq!(closed.im, quad.im, epsilon = 1e-12);
        }
    }
}
