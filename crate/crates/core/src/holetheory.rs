//! Hole-theory vacuum energetics: the filled negative-energy sea under an
//! external perturbation.
//!
//! The sea energy shift is evaluated three ways:
//!
//! - exactly, from the closed-form spectrum (every level shifts by the
//!   potential mean, so the exact shift is zero for zero-mean potentials
//!   and a uniform divergence otherwise);
//! - perturbatively with the exclusion principle enforced in intermediate
//!   states (method I): the negative-definite sum of Eq.-(7) type,
//!   `sum_{j,i} |V_{i,-j}|^2 / (eps_{-j} - eps_i)` with `i` on the
//!   positive branch;
//! - perturbatively with the exclusion principle disregarded (method II):
//!   the same sum plus the sea-internal transition term X,
//!   `sum_j sum_{k != j} |V_{-k,-j}|^2 / (eps_{-j} - eps_{-k})`,
//!   a conditionally convergent double series whose value depends on the
//!   summation scheme.
//!
//! The X summand is symmetric in its numerator and antisymmetric in its
//! denominator, so square cutoffs kill it while iterated (row-by-row)
//! summation does not: the method-II total recovers the exact zero for odd
//! potentials only under the iterated ordering.

use crate::error::Result;
use crate::numerics::quadrature::QuadTol;
use crate::numerics::{sum_double, sum_single, sum_square_grid, SeriesResult, SummationScheme};
use crate::spectral::kernels::raw_eigenvalue;
use crate::spectral::{MatrixElementEngine, ModelParams, Potential};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// First-order sea shift: either a finite partial sum or a uniform
/// divergence with the given per-level increment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HtFirstOrder {
    Finite(SeriesResult),
    Divergent { per_level: f64 },
}

/// Exact sea shift classification from the closed-form spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HtExactShift {
    /// Zero-mean potential: the sea energy does not move at all.
    Zero,
    /// Every sea level shifts by `per_level`; the total diverges.
    DivergentUniform { per_level: f64 },
}

/// Full hole-theory shift report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HtReport {
    pub first_order: HtFirstOrder,
    pub second_order_pp: SeriesResult,
    /// X term per summation scheme, keyed by the scheme's canonical string.
    pub x_term: BTreeMap<String, SeriesResult>,
    /// Method-II total per scheme: `second_order_pp.value + x_term.value`.
    pub second_order_total: BTreeMap<String, f64>,
    pub exact: HtExactShift,
}

/// Threshold below which per-term values count as "a constant" when
/// classifying first-order divergence.
const DIVERGENCE_TOL: f64 = 1e-10;

/// First-order shift `sum_j V_{-j,-j}` up to `cutoff`.
///
/// Classified as divergent when the per-term values settle on a nonzero
/// constant over the last decade of terms (the sea density is uniform, so
/// a nonzero-mean potential shifts every level alike and the partial sums
/// grow linearly).
pub fn ht_first_order(
    pot: &Potential,
    params: &ModelParams,
    cutoff: u64,
    tol: &QuadTol,
    series_tol: f64,
) -> Result<HtFirstOrder> {
    let engine = MatrixElementEngine::new(pot, params, cutoff as u32, tol)?;
    let diag = |j: u64| engine.mel(-(j as i32), -(j as i32)).re;

    let last = diag(cutoff);
    let decade_start = (cutoff / 10).max(1);
    let settled = (decade_start..=cutoff).all(|j| (diag(j) - last).abs() <= DIVERGENCE_TOL);
    if settled && last.abs() > DIVERGENCE_TOL {
        return Ok(HtFirstOrder::Divergent { per_level: last });
    }
    Ok(HtFirstOrder::Finite(sum_single(diag, cutoff, series_tol)?))
}

/// Method-I second-order shift (exclusion principle enforced):
/// `sum_{j,i <= cutoff} |V_{i,-j}|^2 / (eps_{-j} - eps_i)`.
///
/// Every denominator is negative, so partial sums decrease monotonically
/// in the cutoff.
pub fn ht_second_order_pp(
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
        mel.norm_sqr() / (raw_eigenvalue(-(j as i32), a) - raw_eigenvalue(i as i32, a))
    };
    sum_square_grid(terms, cutoff, series_tol)
}

/// Sea-internal transition term X under an explicit summation scheme:
/// `sum_j sum_{k != j} |V_{-k,-j}|^2 / (eps_{-j} - eps_{-k})`.
pub fn ht_x_term(
    pot: &Potential,
    params: &ModelParams,
    scheme: &SummationScheme,
    tol: &QuadTol,
    series_tol: f64,
) -> Result<SeriesResult> {
    scheme.validate()?;
    let a = params.a();
    let max_index = scheme_max_index(scheme, a);
    let engine = MatrixElementEngine::new(pot, params, max_index as u32, tol)?;
    let terms = |j: u64, k: u64| {
        let mel = engine.mel(-(k as i32), -(j as i32));
        mel.norm_sqr() / (raw_eigenvalue(-(j as i32), a) - raw_eigenvalue(-(k as i32), a))
    };
    // sea level energies for the energy-cutoff and damped schemes
    let energy = |j: u64| -raw_eigenvalue(-(j as i32), a);
    sum_double(terms, scheme, energy, series_tol)
}

fn scheme_max_index(scheme: &SummationScheme, a: f64) -> u64 {
    match scheme {
        SummationScheme::SquareCutoff(n) => *n,
        SummationScheme::RectangularCutoff { rows, cols } => (*rows).max(*cols),
        SummationScheme::RowIterated { outer, inner } => (*outer).max(*inner),
        SummationScheme::EnergyCutoff { emax } => {
            // largest j with (2j-1) pi/(4a) <= emax
            let n = (emax * 4.0 * a / std::f64::consts::PI + 1.0) / 2.0;
            (n.floor() as u64).max(1)
        }
        SummationScheme::AbelRegularized { cutoff, .. } => *cutoff,
    }
}

/// Exact sea shift from the closed-form spectrum: zero when the potential
/// mean vanishes, otherwise a uniform per-level shift (divergent total).
pub fn ht_exact_vacuum_shift(pot: &Potential) -> HtExactShift {
    let scale = pot.max_abs().max(1.0);
    if pot.mean().abs() <= 1e-13 * scale {
        HtExactShift::Zero
    } else {
        HtExactShift::DivergentUniform {
            per_level: pot.mean(),
        }
    }
}

/// Assemble the full report: first order, method I, X per scheme, method-II
/// totals, and the exact classification.
pub fn ht_report(
    pot: &Potential,
    params: &ModelParams,
    cutoff: u64,
    schemes: &[SummationScheme],
    tol: &QuadTol,
    series_tol: f64,
) -> Result<HtReport> {
    let first_order = ht_first_order(pot, params, cutoff, tol, series_tol)?;
    let second_order_pp = ht_second_order_pp(pot, params, cutoff, tol, series_tol)?;
    let mut x_term = BTreeMap::new();
    let mut second_order_total = BTreeMap::new();
    for scheme in schemes {
        let x = ht_x_term(pot, params, scheme, tol, series_tol)?;
        let key = scheme.to_string();
        second_order_total.insert(key.clone(), second_order_pp.value + x.value);
        x_term.insert(key, x);
    }
    Ok(HtReport {
        first_order,
        second_order_pp,
        x_term,
        second_order_total,
        exact: ht_exact_vacuum_shift(pot),
    })
}
