//! Cross-route oracle checks: every fast path is held against an
//! independent evaluation route (direct spinor quadrature, frozen
//! closed-form values, first-order formulas).

use diracsea::numerics::quadrature::QuadTol;
use diracsea::qftvacuum::{bogoliubov_blocks, vacuum_shift_from_blocks};
use diracsea::spectral::{
    inner_product_quadrature, matrix_element, matrix_element_quadrature, overlap, perturbed_mode,
    unperturbed_eigenvalue, unperturbed_mode, LevelIndex, ModelParams, Potential,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

fn params() -> ModelParams {
    ModelParams::new(1.0, 0.0).unwrap()
}

fn lvl(k: i32) -> LevelIndex {
    LevelIndex::new(k).unwrap()
}

fn signed(n: i32) -> Vec<i32> {
    (1..=n).flat_map(|k| [k, -k]).collect()
}

/// Frozen before the build by an independent high-order quadrature run:
/// V_{1,-1} = 4i/pi^2 for V = x, a = 1.
const V_1_M1_IM: f64 = 0.405_284_734_569_351_1;

#[test]
fn matrix_element_routes_agree_on_the_frozen_value() {
    let p = params();
    let pot = Potential::linear(1.0, &p);
    let tol = QuadTol::default();
    let closed = matrix_element(lvl(1), lvl(-1), &pot, &p, &tol).unwrap();
    let quad = matrix_element_quadrature(lvl(1), lvl(-1), &pot, &p, &tol).unwrap();
    assert!((closed - Complex64::new(0.0, V_1_M1_IM)).norm() < 1e-12);
    assert!((quad - Complex64::new(0.0, V_1_M1_IM)).norm() < 1e-12);
    assert!((closed - quad).norm() < 1e-10);
}

#[test]
fn closed_form_and_quadrature_matrix_elements_agree_everywhere() {
    let p = params();
    let pot = Potential::linear(1.0, &p);
    let tol = QuadTol::default();
    let idx = signed(32);
    let worst = idx
        .par_iter()
        .map(|&m| {
            let mut w: f64 = 0.0;
            for &n in &idx {
                let closed = matrix_element(lvl(m), lvl(n), &pot, &p, &tol).unwrap();
                let quad = matrix_element_quadrature(lvl(m), lvl(n), &pot, &p, &tol).unwrap();
                w = w.max((closed - quad).norm());
            }
            w
        })
        .reduce(|| 0.0, f64::max);
    assert!(worst < 1e-10, "worst closed-vs-quadrature deviation {worst:.3e}");
}

#[test]
fn overlap_matches_direct_spinor_quadrature() {
    let p = params();
    let pot = Potential::linear(1.0, &p);
    let tol = QuadTol::default();
    for &k in &signed(5) {
        for &n in &signed(5) {
            let fast = overlap(lvl(k), lvl(n), &pot, &p, &tol).unwrap();
            let bra = perturbed_mode(lvl(k), &pot, &p);
            let ket = unperturbed_mode(lvl(n), &p);
            let slow = inner_product_quadrature(&bra, &ket, &tol).unwrap();
            assert!(
                (fast - slow).norm() < 1e-12,
                "overlap ({k},{n}): fast {fast}, direct {slow}"
            );
        }
    }
}

#[test]
fn overlap_deviation_from_first_order_scales_linearly() {
    let p = params();
    let tol = QuadTol::default();
    let mut devs = Vec::new();
    for &lam in &[1e-3, 1e-2, 1e-1] {
        let pot = Potential::linear(lam, &p);
        let ov = overlap(lvl(1), lvl(-1), &pot, &p, &tol).unwrap();
        let mel = matrix_element(lvl(1), lvl(-1), &pot, &p, &tol).unwrap();
        let de = unperturbed_eigenvalue(lvl(1), &p) - unperturbed_eigenvalue(lvl(-1), &p);
        let first = mel / de;
        devs.push((ov - first).norm() / first.norm());
    }
    // measured: deviation = 0.500 * lambda (the residual phase is
    // lambda a^2/2), so successive decades step by a factor 10
    for (i, &lam) in [1e-3, 1e-2, 1e-1].iter().enumerate() {
        let coeff = devs[i] / lam;
        assert!((coeff - 0.5).abs() < 0.05, "dev/lam = {coeff}");
    }
    for w in devs.windows(2) {
        let ratio = w[1] / w[0];
        assert!(
            (10.0 / 3.0..=30.0).contains(&ratio),
            "decade ratio {ratio} outside [10/3, 30]"
        );
    }
}

#[test]
fn perturbed_row_is_complete_over_the_unperturbed_basis() {
    let p = params();
    let pot = Potential::linear(1.0, &p);
    let tol = QuadTol::default();
    let mut total = 0.0;
    for &n in &signed(64) {
        total += overlap(lvl(1), lvl(n), &pot, &p, &tol).unwrap().norm_sqr();
    }
    assert!((1.0 - total).abs() < 1e-9, "completeness defect {:.3e}", 1.0 - total);
}

#[test]
fn vacuum_shift_is_invariant_under_mode_phase_conventions() {
    let p = params();
    let pot = Potential::linear(1.0, &p);
    let tol = QuadTol::default();
    let blocks = bogoliubov_blocks(&pot, &p, 32, &tol).unwrap();
    let baseline = vacuum_shift_from_blocks(&blocks, 1e-7).unwrap();

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let mut twisted = blocks.clone();
    let n = twisted.cutoff;
    let phase = |rng: &mut rand_chacha::ChaCha8Rng| {
        Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
    };
    // rows: one phase per perturbed mode, shared across its blocks
    for r in 0..n {
        let th = phase(&mut rng);
        for c in 0..n {
            twisted.pp[[r, c]] *= th;
            twisted.pa[[r, c]] *= th;
        }
        let th = phase(&mut rng);
        for c in 0..n {
            twisted.ap[[r, c]] *= th;
            twisted.aa[[r, c]] *= th;
        }
    }
    // columns: one phase per unperturbed mode
    for c in 0..n {
        let ph = phase(&mut rng);
        for r in 0..n {
            twisted.pp[[r, c]] *= ph;
            twisted.ap[[r, c]] *= ph;
        }
        let ph = phase(&mut rng);
        for r in 0..n {
            twisted.pa[[r, c]] *= ph;
            twisted.aa[[r, c]] *= ph;
        }
    }
    let shifted = vacuum_shift_from_blocks(&twisted, 1e-7).unwrap();
    let rel = (shifted.value - baseline.value).abs() / baseline.value.abs();
    assert!(rel < 1e-12, "phase twist moved the shift by {rel:.3e}");
}
