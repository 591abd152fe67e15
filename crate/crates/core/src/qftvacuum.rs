//! Field-theory vacuum energetics: normal-ordered Hamiltonians make the
//! unperturbed vacuum energy zero, and the perturbed vacuum acquires an
//! exact shift expressible through the overlaps between perturbed and
//! unperturbed single-particle bases.
//!
//! The overlap matrices are the numerical face of the Bogoliubov
//! transformation connecting the two sets of creation/annihilation
//! operators. With `pa[i][j] = <psi_i|phi_{-j}>` (particle row, sea
//! column) and `ap[j][i] = <psi_{-j}|phi_i>`, the exact vacuum shift is
//!
//! ```text
//! shift = - sum_{i,j} ( eta_i |pa[i][j]|^2 + etabar_j |ap[j][i]|^2 ),
//! ```
//!
//! manifestly <= 0 whenever spectral sign pairing holds, and zero only for
//! a vanishing perturbation. Its leading perturbative term,
//! `-sum |V_{i,-j}|^2/(eps_i + epsbar_j)`, coincides term by term with the
//! hole-theory method-I sum; the sea-internal X ambiguity has no
//! field-theory counterpart because the vacuum holds no particles to block
//! or vacate.

use crate::error::{Error, Result};
use crate::numerics::quadrature::QuadTol;
use crate::numerics::{sum_square_grid, SeriesResult};
use crate::spectral::kernels::{negative_indices, positive_indices, raw_eigenvalue, signed_indices};
use crate::spectral::{
    matrix_element, unperturbed_eigenvalue, LevelIndex, MatrixElementEngine, ModelParams,
    OverlapEngine, Potential,
};
use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Truncated overlap matrices between the perturbed and unperturbed bases.
///
/// Rows are perturbed levels, columns unperturbed ones; `pp`/`aa` connect
/// like branches, `pa`/`ap` mix them. Indices are (level - 1) on each
/// branch.
#[derive(Debug, Clone)]
pub struct BogoliubovBlocks {
    /// `<psi_i | phi_{i'}>`, both positive.
    pub pp: Array2<Complex64>,
    /// `<psi_i | phi_{-j}>`.
    pub pa: Array2<Complex64>,
    /// `<psi_{-j} | phi_i>`.
    pub ap: Array2<Complex64>,
    /// `<psi_{-j} | phi_{-j'}>`, both negative.
    pub aa: Array2<Complex64>,
    pub cutoff: usize,
    pub potential: Potential,
    pub params: ModelParams,
}

/// Fill all four overlap blocks at the given truncation.
pub fn bogoliubov_blocks(
    pot: &Potential,
    params: &ModelParams,
    cutoff: usize,
    tol: &QuadTol,
) -> Result<BogoliubovBlocks> {
    if cutoff < 1 {
        return Err(Error::InvalidParameter("cutoff must be >= 1".into()));
    }
    let n = cutoff;
    let all = signed_indices(n as u32);
    let engine = OverlapEngine::new(pot, params, &all, &all, tol)?;
    let fill = |row_sign: i32, col_sign: i32| -> Array2<Complex64> {
        let data: Vec<Complex64> = (1..=n as i32)
            .flat_map(|r| (1..=n as i32).map(move |c| (r, c)))
            .map(|(r, c)| engine.overlap(row_sign * r, col_sign * c))
            .collect();
        Array2::from_shape_vec((n, n), data).expect("shape")
    };
    Ok(BogoliubovBlocks {
        pp: fill(1, 1),
        pa: fill(1, -1),
        ap: fill(-1, 1),
        aa: fill(-1, -1),
        cutoff,
        potential: pot.clone(),
        params: *params,
    })
}

impl BogoliubovBlocks {
    /// Worst deviation of a perturbed row from completeness,
    /// `max_row |1 - sum_cols |entry|^2|`, over the first `window` rows of
    /// both branches. Rows near the truncation edge lose weight to clipped
    /// columns, so the defect is meaningful for `window << cutoff`.
    pub fn completeness_defect(&self, window: usize) -> f64 {
        let w = window.min(self.cutoff);
        let mut worst: f64 = 0.0;
        for r in 0..w {
            let pos: f64 = self.pp.row(r).iter().map(|z| z.norm_sqr()).sum::<f64>()
                + self.pa.row(r).iter().map(|z| z.norm_sqr()).sum::<f64>();
            let neg: f64 = self.ap.row(r).iter().map(|z| z.norm_sqr()).sum::<f64>()
                + self.aa.row(r).iter().map(|z| z.norm_sqr()).sum::<f64>();
            worst = worst.max((1.0 - pos).abs()).max((1.0 - neg).abs());
        }
        worst
    }
}

/// Second-order vacuum shift `-sum_{j,i <= cutoff} |V_{i,-j}|^2 /
/// (eps_i + epsbar_j)`; coincides term by term with the hole-theory
/// method-I sum.
pub fn qft_second_order(
    pot: &Potential,
    params: &ModelParams,
    cutoff: u64,
    tol: &QuadTol,
    series_tol: f64,
) -> Result<SeriesResult> {
    let engine = MatrixElementEngine::new(pot, params, cutoff as u32, tol)?;
    let a = params.a();
    let terms = |j: u64, i: u64| {
        let mel = engine.mel(i as i32, -(j as i32));
        let ebar = -raw_eigenvalue(-(j as i32), a);
        -mel.norm_sqr() / (raw_eigenvalue(i as i32, a) + ebar)
    };
    sum_square_grid(terms, cutoff, series_tol)
}

/// Exact vacuum shift at truncation `cutoff`, from the overlap blocks and
/// the exact perturbed eigenvalues.
pub fn qft_vacuum_shift_exact(
    pot: &Potential,
    params: &ModelParams,
    cutoff: u64,
    tol: &QuadTol,
    series_tol: f64,
) -> Result<SeriesResult> {
    let n = cutoff as usize;
    let pos = positive_indices(cutoff as u32);
    let neg = negative_indices(cutoff as u32);
    let pa = OverlapEngine::new(pot, params, &pos, &neg, tol)?;
    let ap = OverlapEngine::new(pot, params, &neg, &pos, tol)?;
    let pa_sq: Vec<f64> = (1..=n as i32)
        .flat_map(|i| (1..=n as i32).map(move |j| (i, j)))
        .map(|(i, j)| pa.overlap(i, -j).norm_sqr())
        .collect();
    let ap_sq: Vec<f64> = (1..=n as i32)
        .flat_map(|j| (1..=n as i32).map(move |i| (j, i)))
        .map(|(j, i)| ap.overlap(-j, i).norm_sqr())
        .collect();
    vacuum_shift_from_squares(&pa_sq, &ap_sq, pot, params, cutoff, series_tol)
}

/// Exact vacuum shift evaluated from prebuilt overlap blocks. Bitwise
/// identical to [`qft_vacuum_shift_exact`] at the same truncation.
pub fn vacuum_shift_from_blocks(
    blocks: &BogoliubovBlocks,
    series_tol: f64,
) -> Result<SeriesResult> {
    let n = blocks.cutoff;
    let pa_sq: Vec<f64> = blocks.pa.iter().map(|z| z.norm_sqr()).collect();
    let ap_sq: Vec<f64> = blocks.ap.iter().map(|z| z.norm_sqr()).collect();
    let _ = n;
    vacuum_shift_from_squares(
        &pa_sq,
        &ap_sq,
        &blocks.potential,
        &blocks.params,
        blocks.cutoff as u64,
        series_tol,
    )
}

fn vacuum_shift_from_squares(
    pa_sq: &[f64],
    ap_sq: &[f64],
    pot: &Potential,
    params: &ModelParams,
    cutoff: u64,
    series_tol: f64,
) -> Result<SeriesResult> {
    let n = cutoff as usize;
    let a = params.a();
    let mean = pot.mean();
    let eta: Vec<f64> = (1..=n as i32).map(|i| raw_eigenvalue(i, a) + mean).collect();
    let etabar: Vec<f64> = (1..=n as i32)
        .map(|j| -(raw_eigenvalue(-j, a) + mean))
        .collect();
    let terms = |i: u64, j: u64| {
        let (i, j) = (i as usize - 1, j as usize - 1);
        -(eta[i] * pa_sq[i * n + j] + etabar[j] * ap_sq[j * n + i])
    };
    sum_square_grid(terms, cutoff, series_tol)
}

/// Fitted power of the trace's tail decay (per cutoff doubling); `None`
/// when the trace is too short or has stalled at round-off.
pub fn tail_decay_order(series: &SeriesResult) -> Option<f64> {
    let t = &series.cutoff_trace;
    if t.len() < 3 {
        return None;
    }
    let n = t.len();
    let d_prev = (t[n - 2].1 - t[n - 3].1).abs();
    let d_last = (t[n - 1].1 - t[n - 2].1).abs();
    if d_prev == 0.0 || d_last == 0.0 {
        return None;
    }
    let ratio = (t[n - 1].0 as f64 / t[n - 2].0 as f64).ln();
    Some((d_prev / d_last).ln() / ratio)
}

/// Residual of the spectral resolution identity on a fixed window of
/// positive levels: completeness of the perturbed basis should rebuild
/// `<phi_{i'}|(H0 + V)|phi_{i''}>` from the overlaps,
///
/// ```text
/// sum_m eta_m <psi_m|phi_{i'}>* <psi_m|phi_{i''}>  =  eps_{i'} d_{i'i''} + V_{i'i''},
/// ```
///
/// with m running over both branches up to the cutoff. Returns the max
/// entrywise deviation over an 8 x 8 window; it decays as the cutoff grows.
pub fn spectral_resolution_check(
    pot: &Potential,
    params: &ModelParams,
    cutoff: u64,
    tol: &QuadTol,
) -> Result<f64> {
    const WINDOW: usize = 8;
    let w = WINDOW.min(cutoff as usize);
    let rows = signed_indices(cutoff as u32);
    let cols = positive_indices(w as u32);
    let engine = OverlapEngine::new(pot, params, &rows, &cols, tol)?;
    let a = params.a();
    let mean = pot.mean();

    // overlaps ov[m][c] for every perturbed row m, window column c
    let ov: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|&m| cols.iter().map(|&c| engine.overlap(m, c)).collect())
        .collect();

    let mut worst: f64 = 0.0;
    for (ci, &i1) in cols.iter().enumerate() {
        for (cj, &i2) in cols.iter().enumerate() {
            let mut acc = crate::numerics::kahan::KahanComplex::new();
            for (ri, &m) in rows.iter().enumerate() {
                let eta = raw_eigenvalue(m, a) + mean;
                acc.add(ov[ri][ci].conj() * ov[ri][cj] * eta);
            }
            let lhs = acc.value();
            let mut rhs = matrix_element(
                crate::spectral::level_from_raw(i1),
                crate::spectral::level_from_raw(i2),
                pot,
                params,
                tol,
            )?;
            if i1 == i2 {
                rhs += raw_eigenvalue(i1, a);
            }
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}

/// Occupied particle/antiparticle levels on top of the vacuum. Indices are
/// positive-branch labels; repeats within a list are rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccupationSet {
    particles: Vec<LevelIndex>,
    antiparticles: Vec<LevelIndex>,
}

impl OccupationSet {
    pub fn new(particles: Vec<LevelIndex>, antiparticles: Vec<LevelIndex>) -> Result<Self> {
        for list in [&particles, &antiparticles] {
            if list.iter().any(|k| !k.is_positive_branch()) {
                return Err(Error::InvalidParameter(
                    "occupation indices must be positive-branch labels".into(),
                ));
            }
            let mut sorted: Vec<i32> = list.iter().map(|k| k.raw()).collect();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidParameter(
                    "occupation indices must be distinct".into(),
                ));
            }
        }
        Ok(Self {
            particles,
            antiparticles,
        })
    }

    pub fn empty() -> Self {
        Self {
            particles: vec![],
            antiparticles: vec![],
        }
    }

    pub fn particles(&self) -> &[LevelIndex] {
        &self.particles
    }

    pub fn antiparticles(&self) -> &[LevelIndex] {
        &self.antiparticles
    }
}

/// Energy shift of a state with occupied particles/antiparticles over the
/// vacuum: single-level shifts plus the common vacuum shift.
///
/// The level sums use the exact eigenvalues (for an odd potential they
/// vanish and every occupation shares the bare vacuum shift); the vacuum
/// term is the raw partial sum of [`qft_vacuum_shift_exact`] at `cutoff`.
pub fn system_shift(
    occ: &OccupationSet,
    pot: &Potential,
    params: &ModelParams,
    cutoff: u64,
    tol: &QuadTol,
    series_tol: f64,
) -> Result<f64> {
    let vacuum = qft_vacuum_shift_exact(pot, params, cutoff, tol, series_tol)?;
    let mut acc = crate::numerics::kahan::KahanSum::new();
    for &k in &occ.particles {
        acc.add(crate::spectral::perturbed_eigenvalue_exact(k, pot, params)
            - unperturbed_eigenvalue(k, params));
    }
    for &k in &occ.antiparticles {
        let minus = crate::spectral::level_from_raw(-k.raw());
        let etabar = -crate::spectral::perturbed_eigenvalue_exact(minus, pot, params);
        let epsbar = -unperturbed_eigenvalue(minus, params);
        acc.add(etabar - epsbar);
    }
    Ok(acc.value() + vacuum.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holetheory::ht_second_order_pp;
    use approx::assert_abs_diff_eq;

    fn params() -> ModelParams {
        ModelParams::new(1.0, 0.0).unwrap()
    }

    fn lvl(k: i32) -> LevelIndex {
        LevelIndex::new(k).unwrap()
    }

    #[test]
    fn zero_potential_gives_identity_blocks() {
        let p = params();
        let pot = Potential::zero(&p);
        let blocks = bogoliubov_blocks(&pot, &p, 8, &QuadTol::default()).unwrap();
        for r in 0..8 {
            for c in 0..8 {
                let d = if r == c { 1.0 } else { 0.0 };
                assert!((blocks.pp[[r, c]] - d).norm() < 1e-12);
                assert!((blocks.aa[[r, c]] - d).norm() < 1e-12);
                assert!(blocks.pa[[r, c]].norm() < 1e-12);
                assert!(blocks.ap[[r, c]].norm() < 1e-12);
            }
        }
        assert!(blocks.completeness_defect(4) < 1e-12);
    }

    #[test]
    fn pa_entries_follow_first_order_for_weak_coupling() {
        let p = params();
        let lam = 1e-2;
        let pot = Potential::linear(lam, &p);
        let tol = QuadTol::default();
        let blocks = bogoliubov_blocks(&pot, &p, 12, &tol).unwrap();
        for i in 1..=4i32 {
            for j in 1..=4i32 {
                let got = blocks.pa[[(i - 1) as usize, (j - 1) as usize]];
                if (i + j) % 2 == 0 {
                    // parity-allowed entry: first-order formula to O(lam)
                    let mel = matrix_element(lvl(i), lvl(-j), &pot, &p, &tol).unwrap();
                    let de = raw_eigenvalue(i, 1.0) - raw_eigenvalue(-j, 1.0);
                    let first = mel / de;
                    let rel = (got - first).norm() / first.norm();
                    assert!(rel < 3.0 * lam, "entry ({i},{j}): rel dev {rel}");
                } else {
                    // parity-forbidden at first order: entry is O(lam^2)
                    assert!(got.norm() < 10.0 * lam * lam, "entry ({i},{j}): {got}");
                }
            }
        }
    }

    #[test]
    fn second_order_identity_with_hole_theory_is_bitwise() {
        let p = params();
        let tol = QuadTol::default();
        for pot in [
            Potential::linear(1.0, &p),
            Potential::sine(0.7, 1, &p).unwrap(),
            Potential::parse("x + 0.3", &p).unwrap(),
        ] {
            let qft = qft_second_order(&pot, &p, 96, &tol, 1e-7).unwrap();
            let ht = ht_second_order_pp(&pot, &p, 96, &tol, 1e-7).unwrap();
            assert_eq!(qft.value.to_bits(), ht.value.to_bits());
            assert_eq!(qft.cutoff_trace, ht.cutoff_trace);
        }
    }

    #[test]
    fn vacuum_shift_is_negative_and_matches_block_route() {
        let p = params();
        let pot = Potential::linear(1.0, &p);
        let tol = QuadTol::default();
        let direct = qft_vacuum_shift_exact(&pot, &p, 48, &tol, 1e-7).unwrap();
        assert!(direct.value < 0.0);
        let blocks = bogoliubov_blocks(&pot, &p, 48, &tol).unwrap();
        let via_blocks = vacuum_shift_from_blocks(&blocks, 1e-7).unwrap();
        assert_eq!(direct.value.to_bits(), via_blocks.value.to_bits());
    }

    #[test]
    fn vacuum_shift_vanishes_only_at_zero_potential() {
        let p = params();
        let tol = QuadTol::default();
        let zero = qft_vacuum_shift_exact(&Potential::zero(&p), &p, 16, &tol, 1e-7).unwrap();
        assert!(zero.value.abs() < 1e-12);
        let tiny = qft_vacuum_shift_exact(&Potential::linear(0.05, &p), &p, 16, &tol, 1e-7)
            .unwrap();
        assert!(tiny.value < -1e-7);
    }

    #[test]
    fn second_order_is_blind_to_the_sign_of_v() {
        let p = params();
        let tol = QuadTol::default();
        let plus = qft_second_order(&Potential::linear(1.0, &p), &p, 64, &tol, 1e-7).unwrap();
        let minus = qft_second_order(&Potential::linear(-1.0, &p), &p, 64, &tol, 1e-7).unwrap();
        assert_eq!(plus.value.to_bits(), minus.value.to_bits());
    }

    #[test]
    fn resolution_residual_decays_with_cutoff() {
        let p = params();
        let pot = Potential::linear(0.1, &p);
        let tol = QuadTol::default();
        let r64 = spectral_resolution_check(&pot, &p, 64, &tol).unwrap();
        let r128 = spectral_resolution_check(&pot, &p, 128, &tol).unwrap();
        assert!(r128 < r64 / 2.0, "r64 = {r64:.3e}, r128 = {r128:.3e}");
        // diagonal content: rhs = eps + V_ii exactly, so a zero potential
        // leaves no residual at all
        let r0 = spectral_resolution_check(&Potential::zero(&p), &p, 32, &tol).unwrap();
        assert!(r0 < 1e-12);
    }

    #[test]
    fn occupation_construction_rejects_bad_sets() {
        assert!(OccupationSet::new(vec![lvl(1), lvl(1)], vec![]).is_err());
        assert!(OccupationSet::new(vec![lvl(-1)], vec![]).is_err());
        assert!(OccupationSet::new(vec![lvl(1), lvl(3)], vec![lvl(2)]).is_ok());
    }

    #[test]
    fn system_shift_reduces_to_vacuum_for_empty_occupation() {
        let p = params();
        let pot = Potential::linear(0.5, &p);
        let tol = QuadTol::default();
        let vac = qft_vacuum_shift_exact(&pot, &p, 24, &tol, 1e-7).unwrap();
        let sys = system_shift(&OccupationSet::empty(), &pot, &p, 24, &tol, 1e-7).unwrap();
        assert_eq!(sys.to_bits(), vac.value.to_bits());
        // odd potential: every occupation shares the vacuum shift
        let occ = OccupationSet::new(vec![lvl(1), lvl(2)], vec![lvl(1)]).unwrap();
        let sys2 = system_shift(&occ, &pot, &p, 24, &tol, 1e-7).unwrap();
        assert_abs_diff_eq!(sys2, vac.value, epsilon = 1e-14);
    }

    #[test]
    fn uniform_shift_moves_one_particle_by_its_mean() {
        let p = params();
        let tol = QuadTol::default();
        let pot = Potential::parse("x + 0.25", &p).unwrap();
        let vac = qft_vacuum_shift_exact(&pot, &p, 24, &tol, 1e-7).unwrap();
        let occ = OccupationSet::new(vec![lvl(1)], vec![]).unwrap();
        let sys = system_shift(&occ, &pot, &p, 24, &tol, 1e-7).unwrap();
        assert_abs_diff_eq!(sys, 0.25 + vac.value, epsilon = 1e-13);
    }
}
