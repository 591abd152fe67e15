//! Exact eigenvalues, eigenmodes, matrix elements, and overlaps of the
//! one-dimensional massless Dirac particle confined to |x| < a by an
//! infinite scalar wall.
//!
//! Inside the box the two spinor components combine into w_+- = u +- i v,
//! which decouple into pure phases. With an external perturbation V(x)
//! (and antiderivative f, f' = V) the modes are
//!
//! ```text
//! w_+-(x) = C_+- exp(+-i [f(x) - eta x]),
//! ```
//!
//! confined by the wall boundary condition `w_+(+-a) = -+ i w_-(+-a)`.
//! The condition quantizes the spectrum as
//!
//! ```text
//! eta_k = eps_k + (1/2a) int_{-a}^{a} V dx,
//! eps_k = (2 n(k) + 1) pi / (4a),
//! ```
//!
//! so every level shifts by the potential mean and nothing else: an odd
//! perturbation leaves the whole spectrum fixed. Levels are labeled by a
//! nonzero integer k with n(k) = k - 1 for k >= 1 and n(k) = k for
//! k <= -1, making eps_k strictly increasing and odd under k -> -k.

pub mod kernels;
pub mod potential;
pub mod shooting;

use crate::error::{Error, Result};
use crate::numerics::quadrature::{integrate, integrate_complex, QuadTol};
use kernels::{mode_constants, raw_eigenvalue};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use kernels::{MatrixElementEngine, OverlapEngine};
pub use potential::{Parity, Potential, TrigKind, TrigTerm};
pub use shooting::eigenvalue_by_shooting;

/// Units are fixed throughout: hbar = c = 1.
pub const UNITS_LABEL: &str = "hbar=c=1";

/// Box half-width and particle mass. The exact machinery of this crate is
/// valid only for m = 0; constructors reject anything else.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    a: f64,
    m: f64,
}

impl ModelParams {
    pub fn new(a: f64, m: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "box half-width must be positive, got {a}"
            )));
        }
        if m != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "only the massless model is solvable here; got m = {m}"
            )));
        }
        Ok(Self { a, m })
    }

    /// Box half-width a.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Particle mass (always 0).
    pub fn mass(&self) -> f64 {
        self.m
    }
}

/// Nonzero integer level label; positive k are positive-energy levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LevelIndex(i32);

impl LevelIndex {
    pub fn new(k: i32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("level index must be nonzero".into()));
        }
        Ok(Self(k))
    }

    pub fn raw(&self) -> i32 {
        self.0
    }

    /// Quantum number n(k): k - 1 on the positive branch, k on the negative.
    pub fn n(&self) -> i32 {
        if self.0 >= 1 {
            self.0 - 1
        } else {
            self.0
        }
    }

    pub fn is_positive_branch(&self) -> bool {
        self.0 > 0
    }
}

impl std::fmt::Display for LevelIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Internal constructor for loop indices that are nonzero by construction.
pub(crate) fn level_from_raw(k: i32) -> LevelIndex {
    debug_assert!(k != 0);
    LevelIndex(k)
}

/// eps_k = (2 n(k) + 1) pi/(4a).
pub fn unperturbed_eigenvalue(k: LevelIndex, params: &ModelParams) -> f64 {
    raw_eigenvalue(k.raw(), params.a())
}

/// eta_k = eps_k + mean(V): the exact eigenvalue under the perturbation.
/// The shift is the same for every level.
pub fn perturbed_eigenvalue_exact(k: LevelIndex, pot: &Potential, params: &ModelParams) -> f64 {
    unperturbed_eigenvalue(k, params) + pot.mean()
}

/// True when the perturbed and unperturbed eigenvalues of level k disagree
/// in sign (a uniform shift has pushed the level across zero). The exact
/// formulas remain valid; pairing-sensitive vacuum bookkeeping does not.
pub fn sign_pairing_violated(k: LevelIndex, pot: &Potential, params: &ModelParams) -> bool {
    let eps = unperturbed_eigenvalue(k, params);
    let eta = perturbed_eigenvalue_exact(k, pot, params);
    eps.signum() != eta.signum()
}

/// A two-component eigenmode in the w_+- representation.
#[derive(Debug, Clone)]
pub struct Mode {
    level: LevelIndex,
    eigenvalue: f64,
    cplus: Complex64,
    cminus: Complex64,
    half_width: f64,
    pot: Option<Potential>,
}

impl Mode {
    fn build(level: LevelIndex, eigenvalue: f64, pot: Option<&Potential>, params: &ModelParams) -> Self {
        let a = params.a();
        let f_ma = pot.map_or(0.0, |p| p.phase(-a));
        let (cplus, cminus) = mode_constants(f_ma, eigenvalue, a);
        Self {
            level,
            eigenvalue,
            cplus,
            cminus,
            half_width: a,
            pot: pot.cloned(),
        }
    }

    pub fn level(&self) -> LevelIndex {
        self.level
    }

    pub fn eigenvalue(&self) -> f64 {
        self.eigenvalue
    }

    pub fn cplus(&self) -> Complex64 {
        self.cplus
    }

    pub fn cminus(&self) -> Complex64 {
        self.cminus
    }

    fn phase_at(&self, x: f64) -> f64 {
        let f = self.pot.as_ref().map_or(0.0, |p| p.phase(x));
        f - self.eigenvalue * x
    }

    /// w_+(x) = C+ e^{i [f(x) - eta x]}.
    pub fn w_plus(&self, x: f64) -> Complex64 {
        self.cplus * Complex64::new(0.0, self.phase_at(x)).exp()
    }

    /// w_-(x) = C- e^{-i [f(x) - eta x]}.
    pub fn w_minus(&self, x: f64) -> Complex64 {
        self.cminus * Complex64::new(0.0, -self.phase_at(x)).exp()
    }

    /// Upper spinor component u = (w_+ + w_-)/2.
    pub fn upper(&self, x: f64) -> Complex64 {
        (self.w_plus(x) + self.w_minus(x)) * 0.5
    }

    /// Lower spinor component v = (w_+ - w_-)/(2i).
    pub fn lower(&self, x: f64) -> Complex64 {
        (self.w_plus(x) - self.w_minus(x)) * Complex64::new(0.0, -0.5)
    }

    /// |u|^2 + |v|^2; constant 1/(2a) for every mode of the massless model.
    pub fn density(&self, x: f64) -> f64 {
        (self.w_plus(x).norm_sqr() + self.w_minus(x).norm_sqr()) * 0.5
    }

    /// Total violation of the wall condition at both ends,
    /// |w_+(a) + i w_-(a)| + |w_+(-a) - i w_-(-a)|.
    pub fn boundary_residual(&self) -> f64 {
        let a = self.half_width;
        let i = Complex64::new(0.0, 1.0);
        (self.w_plus(a) + i * self.w_minus(a)).norm()
            + (self.w_plus(-a) - i * self.w_minus(-a)).norm()
    }

    /// int (|u|^2 + |v|^2) dx by quadrature.
    pub fn norm_quadrature(&self, tol: &QuadTol) -> Result<f64> {
        let a = self.half_width;
        integrate(|x| self.density(x), -a, a, 0.0, tol)
    }

    fn freq_bound(&self) -> f64 {
        self.eigenvalue.abs() + self.pot.as_ref().map_or(0.0, |p| p.max_abs())
    }
}

/// The unperturbed eigenmode of level k.
pub fn unperturbed_mode(k: LevelIndex, params: &ModelParams) -> Mode {
    let eps = unperturbed_eigenvalue(k, params);
    Mode::build(k, eps, None, params)
}

/// The exact perturbed eigenmode of level k under `pot`.
pub fn perturbed_mode(k: LevelIndex, pot: &Potential, params: &ModelParams) -> Mode {
    let eta = perturbed_eigenvalue_exact(k, pot, params);
    Mode::build(k, eta, Some(pot), params)
}

/// `<phi_m | V | phi_n>`: closed form for analytic potentials, quadrature
/// kernel otherwise. Hermitian for real V.
pub fn matrix_element(
    m: LevelIndex,
    n: LevelIndex,
    pot: &Potential,
    params: &ModelParams,
    tol: &QuadTol,
) -> Result<Complex64> {
    let a = params.a();
    let em = unperturbed_eigenvalue(m, params);
    let en = unperturbed_eigenvalue(n, params);
    let d = em - en;
    let j = match kernels::fourier_kernel_closed(pot, d) {
        Some(j) => j,
        None => kernels::fourier_kernel_quadrature(pot, d, tol)?,
    };
    let (cpm, cmm) = mode_constants(0.0, em, a);
    let (cpn, cmn) = mode_constants(0.0, en, a);
    Ok((cpm.conj() * cpn * j + cmm.conj() * cmn * j.conj()) * 0.5)
}

/// Independent route for `<phi_m | V | phi_n>`: direct adaptive quadrature
/// of the spinor bilinear, bypassing the Fourier-kernel decomposition.
pub fn matrix_element_quadrature(
    m: LevelIndex,
    n: LevelIndex,
    pot: &Potential,
    params: &ModelParams,
    tol: &QuadTol,
) -> Result<Complex64> {
    let bra = unperturbed_mode(m, params);
    let ket = unperturbed_mode(n, params);
    let a = params.a();
    let freq = bra.eigenvalue().abs() + ket.eigenvalue().abs() + pot.freq_bound();
    integrate_complex(
        |x| {
            let dens = bra.w_plus(x).conj() * ket.w_plus(x)
                + bra.w_minus(x).conj() * ket.w_minus(x);
            dens * (0.5 * pot.value(x))
        },
        -a,
        a,
        freq,
        tol,
    )
}

/// `<psi_k | phi_n>`: overlap of the exact perturbed mode k with the
/// unperturbed mode n, by the phase-kernel quadrature.
pub fn overlap(
    perturbed_k: LevelIndex,
    unperturbed_n: LevelIndex,
    pot: &Potential,
    params: &ModelParams,
    tol: &QuadTol,
) -> Result<Complex64> {
    let a = params.a();
    let eta = perturbed_eigenvalue_exact(perturbed_k, pot, params);
    let en = unperturbed_eigenvalue(unperturbed_n, params);
    let d = en - eta;
    let kk = kernels::phase_kernel(pot, d, tol)?;
    let (cp_psi, cm_psi) = mode_constants(pot.phase(-a), eta, a);
    let (cp_phi, cm_phi) = mode_constants(0.0, en, a);
    Ok((cp_psi.conj() * cp_phi * kk.conj() + cm_psi.conj() * cm_phi * kk) * 0.5)
}

/// `<bra | ket>` by direct quadrature on the spinor bilinear; the oracle
/// twin of [`overlap`] and the Gram-matrix probe.
pub fn inner_product_quadrature(bra: &Mode, ket: &Mode, tol: &QuadTol) -> Result<Complex64> {
    let a = bra.half_width;
    let freq = bra.freq_bound() + ket.freq_bound();
    integrate_complex(
        |x| {
            (bra.w_plus(x).conj() * ket.w_plus(x) + bra.w_minus(x).conj() * ket.w_minus(x)) * 0.5
        },
        -a,
        a,
        freq,
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params() -> ModelParams {
        ModelParams::new(1.0, 0.0).unwrap()
    }

    fn lvl(k: i32) -> LevelIndex {
        LevelIndex::new(k).unwrap()
    }

    #[test]
    fn constructors_reject_bad_input() {
        assert!(ModelParams::new(0.0, 0.0).is_err());
        assert!(ModelParams::new(-2.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, 0.5).is_err());
        assert!(LevelIndex::new(0).is_err());
    }

    #[test]
    fn ground_state_eigenvalues() {
        let p = params();
        assert_eq!(
            unperturbed_eigenvalue(lvl(1), &p),
            std::f64::consts::FRAC_PI_4
        );
        assert_eq!(
            unperturbed_eigenvalue(lvl(-1), &p),
            -std::f64::consts::FRAC_PI_4
        );
        // k = 3, a = 2: n = 2, so (2n+1) pi/(4a) = 5 pi / 8
        let p2 = ModelParams::new(2.0, 0.0).unwrap();
        assert_abs_diff_eq!(
            unperturbed_eigenvalue(lvl(3), &p2),
            5.0 * std::f64::consts::PI / 8.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn spectrum_is_increasing_and_odd() {
        let p = params();
        for k in 1..=64 {
            let pos = unperturbed_eigenvalue(lvl(k), &p);
            let neg = unperturbed_eigenvalue(lvl(-k), &p);
            assert_eq!(neg, -pos); // bitwise antisymmetry
            // closed form
            let n = (k - 1) as f64;
            assert_eq!(pos, (2.0 * n + 1.0) * std::f64::consts::FRAC_PI_4);
        }
        let mut prev = f64::NEG_INFINITY;
        for k in (-64..=64).filter(|&k| k != 0) {
            let e = unperturbed_eigenvalue(lvl(k), &p);
            assert!(e > prev);
            prev = e;
        }
    }

    #[test]
    fn modes_satisfy_boundary_and_norm() {
        let p = params();
        let tol = QuadTol::default();
        for k in [-5, -1, 1, 2, 9] {
            let mode = unperturbed_mode(lvl(k), &p);
            assert!(mode.boundary_residual() < 1e-12);
            assert_abs_diff_eq!(mode.norm_quadrature(&tol).unwrap(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(mode.cplus().norm(), 1.0 / 2.0_f64.sqrt(), epsilon = 1e-15);
            assert_abs_diff_eq!(mode.cminus().norm(), 1.0 / 2.0_f64.sqrt(), epsilon = 1e-14);
        }
    }

    #[test]
    fn distinct_modes_are_orthogonal_by_quadrature() {
        let p = params();
        let tol = QuadTol::default();
        let m1 = unperturbed_mode(lvl(1), &p);
        let m2 = unperturbed_mode(lvl(2), &p);
        let ov = inner_product_quadrature(&m1, &m2, &tol).unwrap();
        assert!(ov.norm() < 1e-13);
        let mm = inner_product_quadrature(&m1, &m1, &tol).unwrap();
        assert_abs_diff_eq!(mm.re, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn exact_shift_is_the_potential_mean() {
        let p = params();
        // odd potential: no shift at all, bitwise
        let linear = Potential::linear(3.7, &p);
        for k in [1, -4, 8] {
            assert_eq!(
                perturbed_eigenvalue_exact(lvl(k), &linear, &p),
                unperturbed_eigenvalue(lvl(k), &p)
            );
        }
        // constant: uniform shift
        let c = Potential::constant(0.3, &p);
        assert_abs_diff_eq!(
            perturbed_eigenvalue_exact(lvl(2), &c, &p),
            unperturbed_eigenvalue(lvl(2), &p) + 0.3,
            epsilon = 1e-15
        );
        // x^2 on a = 1: shift 1/3
        let sq = Potential::polynomial(&[0.0, 0.0, 1.0], &p).unwrap();
        assert_abs_diff_eq!(
            perturbed_eigenvalue_exact(lvl(1), &sq, &p),
            std::f64::consts::FRAC_PI_4 + 1.0 / 3.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn perturbed_mode_reduces_to_unperturbed_at_zero_potential() {
        let p = params();
        let zero = Potential::zero(&p);
        let pm = perturbed_mode(lvl(3), &zero, &p);
        let um = unperturbed_mode(lvl(3), &p);
        for &x in &[-0.99, -0.4, 0.0, 0.77] {
            assert!((pm.w_plus(x) - um.w_plus(x)).norm() < 1e-12);
            assert!((pm.w_minus(x) - um.w_minus(x)).norm() < 1e-12);
        }
    }

    #[test]
    fn perturbed_mode_invariants_under_linear_potential() {
        let p = params();
        let pot = Potential::linear(1.0, &p);
        let tol = QuadTol::default();
        for k in [-3, 1, 6] {
            let mode = perturbed_mode(lvl(k), &pot, &p);
            assert!(mode.boundary_residual() < 1e-12, "k = {k}");
            assert_abs_diff_eq!(mode.norm_quadrature(&tol).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn sign_pairing_flags_levels_pushed_across_zero() {
        let p = params();
        // +1 shift pushes eps_{-1} = -pi/4 over zero
        let c = Potential::constant(1.0, &p);
        assert!(sign_pairing_violated(lvl(-1), &c, &p));
        assert!(!sign_pairing_violated(lvl(1), &c, &p));
        assert!(!sign_pairing_violated(lvl(-2), &c, &p));
    }
}
