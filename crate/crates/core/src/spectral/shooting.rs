//! Independent eigenvalue oracle: shoot the Dirac system across the box
//! and root-find the wall condition.
//!
//! The spinor components obey `u' = (eta - V) v`, `v' = -(eta - V) u`.
//! The wall condition reads `u(-a) = v(-a)` on the left and
//! `u(a) + v(a) = 0` on the right, so shooting from `(1, 1)/sqrt(2)` at
//! `x = -a` turns the eigenvalue problem into a scalar root search on the
//! residual `R(eta) = u(a) + v(a)`. Integration is fixed-step RK4 with the
//! step chosen from the rotation rate; nothing of the closed-form
//! eigenvalue route is reused.
//!
//! A uniform spectral shift larger than half the level spacing would let a
//! naive bracket around eps_k capture a neighbor's root, so the potential
//! is switched on in stages small enough that the tracked root moves less
//! than half a bracket width per stage.

use crate::error::{Error, Result};
use crate::numerics::rootfind::brent;
use crate::spectral::{unperturbed_eigenvalue, LevelIndex, ModelParams, Potential};

/// Eigenvalue of level k under `pot`, found by shooting + continuation.
///
/// Agrees with the closed-form eigenvalue within the root-finder tolerance;
/// used as a cross-check oracle.
pub fn eigenvalue_by_shooting(
    k: LevelIndex,
    pot: &Potential,
    params: &ModelParams,
) -> Result<f64> {
    let a = params.a();
    let half_spacing = std::f64::consts::FRAC_PI_4 / a;
    let bracket = 0.98 * half_spacing;
    let mean = pot.mean();
    let stages = ((mean.abs() / (0.5 * bracket)).ceil() as usize).max(1);

    let mut root = unperturbed_eigenvalue(k, params);
    for s in 1..=stages {
        let scaled = pot.scale(s as f64 / stages as f64);
        root = solve_stage(k, &scaled, params, root, bracket)?;
    }
    Ok(root)
}

fn solve_stage(
    k: LevelIndex,
    pot: &Potential,
    params: &ModelParams,
    center: f64,
    halfwidth: f64,
) -> Result<f64> {
    let (lo, hi) = (center - halfwidth, center + halfwidth);
    let residual = |eta: f64| boundary_residual(eta, pot, params);
    brent(residual, lo, hi, 1e-13, 200).ok_or(Error::NoRootInBracket {
        level: k.raw(),
        lo,
        hi,
    })
}

/// R(eta) = u(a) + v(a) after RK4 transport from the left-wall state.
fn boundary_residual(eta: f64, pot: &Potential, params: &ModelParams) -> f64 {
    let a = params.a();
    let omega = eta.abs() + pot.max_abs() + 1.0;
    // global RK4 error ~ L h^4 omega^5 / 120; aim below 1e-12
    let h_target = (120.0 * 1e-12 / (2.0 * a * omega.powi(5))).powf(0.25);
    let steps = ((2.0 * a / h_target).ceil() as usize).clamp(256, 4_000_000);
    let h = 2.0 * a / steps as f64;

    let deriv = |x: f64, u: f64, v: f64| {
        let w = eta - pot.value(x);
        (w * v, -w * u)
    };

    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let (mut u, mut v) = (inv_sqrt2, inv_sqrt2);
    let mut x = -a;
    for _ in 0..steps {
        let (k1u, k1v) = deriv(x, u, v);
        let (k2u, k2v) = deriv(x + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v);
        let (k3u, k3v) = deriv(x + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v);
        let (k4u, k4v) = deriv(x + h, u + h * k3u, v + h * k3v);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        x += h;
    }
    u + v
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
    fn unperturbed_ground_state() {
        let p = params();
        let pot = Potential::zero(&p);
        let eta = eigenvalue_by_shooting(lvl(1), &pot, &p).unwrap();
        assert_abs_diff_eq!(eta, std::f64::consts::FRAC_PI_4, epsilon = 1e-10);
    }

    #[test]
    fn odd_potential_leaves_levels_fixed() {
        let p = params();
        let pot = Potential::linear(1.0, &p);
        for k in [-2, 1, 3] {
            let eta = eigenvalue_by_shooting(lvl(k), &pot, &p).unwrap();
            assert_abs_diff_eq!(eta, unperturbed_eigenvalue(lvl(k), &p), epsilon = 1e-10);
        }
    }

    #[test]
    fn quadratic_potential_shifts_by_one_third() {
        let p = params();
        let pot = Potential::polynomial(&[0.0, 0.0, 1.0], &p).unwrap();
        let eta = eigenvalue_by_shooting(lvl(1), &pot, &p).unwrap();
        assert_abs_diff_eq!(
            eta,
            std::f64::consts::FRAC_PI_4 + 1.0 / 3.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn large_uniform_shift_is_tracked_by_continuation() {
        let p = params();
        // shift exceeds half the level spacing; a single bracket around
        // eps_k would capture the wrong root
        let pot = Potential::constant(1.0, &p);
        let eta = eigenvalue_by_shooting(lvl(-1), &pot, &p).unwrap();
        assert_abs_diff_eq!(
            eta,
            -std::f64::consts::FRAC_PI_4 + 1.0,
            epsilon = 1e-10
        );
    }
}
