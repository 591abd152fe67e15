//! Report structures and their CSV/JSON renderings.
//!
//! CSV columns are fixed and documented in the README; JSON is the same
//! data as serde structures (round-trips to equal values).

use crate::config::RunConfig;
use crate::CliError;
use diracsea::holetheory::{ht_report, HtExactShift, HtFirstOrder, HtReport};
use diracsea::numerics::SeriesResult;
use diracsea::qftvacuum::{
    bogoliubov_blocks, qft_second_order, qft_vacuum_shift_exact, spectral_resolution_check,
    system_shift, tail_decay_order, OccupationSet,
};
use diracsea::spectral::{
    perturbed_eigenvalue_exact, sign_pairing_violated, unperturbed_eigenvalue, LevelIndex,
    UNITS_LABEL,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

fn fmt_f(v: f64) -> String {
    format!("{v:.12e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f).unwrap_or_default()
}

// ------------------------------------------------------------- spectrum

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub k: i32,
    pub epsilon: f64,
    pub eta: f64,
    pub shift: f64,
    /// True when the perturbed level changed sign relative to the
    /// unperturbed one (sign pairing broken).
    pub sign_flip: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub units: String,
    pub a: f64,
    pub potential: String,
    pub rows: Vec<SpectrumRow>,
}

pub fn spectrum_report(cfg: &RunConfig) -> Result<SpectrumReport, CliError> {
    let mut rows = Vec::new();
    let n = cfg.levels as i32;
    for k in (-n..=n).filter(|&k| k != 0) {
        let k = LevelIndex::new(k).expect("nonzero");
        let epsilon = unperturbed_eigenvalue(k, &cfg.params);
        let eta = perturbed_eigenvalue_exact(k, &cfg.potential, &cfg.params);
        rows.push(SpectrumRow {
            k: k.raw(),
            epsilon,
            eta,
            shift: eta - epsilon,
            sign_flip: sign_pairing_violated(k, &cfg.potential, &cfg.params),
        });
    }
    Ok(SpectrumReport {
        units: UNITS_LABEL.into(),
        a: cfg.params.a(),
        potential: cfg.potential.to_string(),
        rows,
    })
}

impl SpectrumReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,epsilon,eta,shift,sign_flip\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                r.k,
                fmt_f(r.epsilon),
                fmt_f(r.eta),
                fmt_f(r.shift),
                r.sign_flip
            );
        }
        s
    }
}

// ------------------------------------------------------------------- ht

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HtCliReport {
    pub units: String,
    pub a: f64,
    pub potential: String,
    pub cutoff: u64,
    pub series_tolerance: f64,
    pub report: HtReport,
}

pub fn ht_cli_report(cfg: &RunConfig) -> Result<HtCliReport, CliError> {
    let report = ht_report(
        &cfg.potential,
        &cfg.params,
        cfg.cutoff,
        &cfg.schemes,
        &cfg.quad_tol,
        cfg.series_tol,
    )?;
    Ok(HtCliReport {
        units: UNITS_LABEL.into(),
        a: cfg.params.a(),
        potential: cfg.potential.to_string(),
        cutoff: cfg.cutoff,
        series_tolerance: cfg.series_tol,
        report,
    })
}

fn push_series_rows(s: &mut String, quantity: &str, scheme: &str, r: &SeriesResult) {
    let _ = writeln!(
        s,
        "{quantity},{scheme},{},{},{},{},",
        r.cutoff_trace.last().map(|t| t.0).unwrap_or_default(),
        fmt_f(r.value),
        fmt_opt(r.extrapolated),
        r.converged
    );
    for &(n, v) in &r.cutoff_trace {
        let _ = writeln!(s, "{quantity}_trace,{scheme},{n},{},,,", fmt_f(v));
    }
}

impl HtCliReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("quantity,scheme,cutoff,value,extrapolated,converged,note\n");
        match &self.report.first_order {
            HtFirstOrder::Finite(r) => push_series_rows(&mut s, "first_order", "", r),
            HtFirstOrder::Divergent { per_level } => {
                let _ = writeln!(
                    s,
                    "first_order,,{},{},,,divergent_uniform",
                    self.cutoff,
                    fmt_f(*per_level)
                );
            }
        }
        push_series_rows(&mut s, "second_order_pp", "", &self.report.second_order_pp);
        for (scheme, r) in &self.report.x_term {
            push_series_rows(&mut s, "x_term", scheme, r);
        }
        for (scheme, v) in &self.report.second_order_total {
            let _ = writeln!(s, "second_order_total,{scheme},{},{},,,", self.cutoff, fmt_f(*v));
        }
        match &self.report.exact {
            HtExactShift::Zero => {
                let _ = writeln!(s, "exact_shift,,,{},,,zero", fmt_f(0.0));
            }
            HtExactShift::DivergentUniform { per_level } => {
                let _ = writeln!(
                    s,
                    "exact_shift,,,{},,,divergent_uniform_per_level",
                    fmt_f(*per_level)
                );
            }
        }
        s
    }
}

// ------------------------------------------------------------------ qft

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QftCliReport {
    pub units: String,
    pub a: f64,
    pub potential: String,
    pub cutoff: u64,
    pub second_order: SeriesResult,
    pub vacuum_shift: SeriesResult,
    /// Fitted power of the vacuum-shift tail decay per cutoff doubling.
    pub tail_order: Option<f64>,
    /// Worst row-completeness defect of the overlap blocks (first 8 rows).
    pub completeness_defect: f64,
    /// Max residual of the spectral resolution identity on an 8x8 window.
    pub resolution_residual: f64,
    pub occupation: Option<OccupationSet>,
    pub system_shift: Option<f64>,
}

pub fn qft_cli_report(cfg: &RunConfig) -> Result<QftCliReport, CliError> {
    let second_order = qft_second_order(
        &cfg.potential,
        &cfg.params,
        cfg.cutoff,
        &cfg.quad_tol,
        cfg.series_tol,
    )?;
    let vacuum_shift = qft_vacuum_shift_exact(
        &cfg.potential,
        &cfg.params,
        cfg.cutoff,
        &cfg.quad_tol,
        cfg.series_tol,
    )?;
    let tail_order = tail_decay_order(&vacuum_shift);
    let blocks = bogoliubov_blocks(
        &cfg.potential,
        &cfg.params,
        cfg.cutoff as usize,
        &cfg.quad_tol,
    )?;
    let completeness_defect = blocks.completeness_defect(8);
    let resolution_residual =
        spectral_resolution_check(&cfg.potential, &cfg.params, cfg.cutoff, &cfg.quad_tol)?;
    let shift = match &cfg.occupation {
        Some(occ) => Some(system_shift(
            occ,
            &cfg.potential,
            &cfg.params,
            cfg.cutoff,
            &cfg.quad_tol,
            cfg.series_tol,
        )?),
        None => None,
    };
    Ok(QftCliReport {
        units: UNITS_LABEL.into(),
        a: cfg.params.a(),
        potential: cfg.potential.to_string(),
        cutoff: cfg.cutoff,
        second_order,
        vacuum_shift,
        tail_order,
        completeness_defect,
        resolution_residual,
        occupation: cfg.occupation.clone(),
        system_shift: shift,
    })
}

impl QftCliReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("quantity,scheme,cutoff,value,extrapolated,converged,note\n");
        push_series_rows(&mut s, "second_order", "", &self.second_order);
        push_series_rows(&mut s, "vacuum_shift", "", &self.vacuum_shift);
        let _ = writeln!(s, "tail_order,,,{},,,", fmt_opt(self.tail_order));
        let _ = writeln!(
            s,
            "completeness_defect,,{},{},,,window8",
            self.cutoff,
            fmt_f(self.completeness_defect)
        );
        let _ = writeln!(
            s,
            "resolution_residual,,{},{},,,window8",
            self.cutoff,
            fmt_f(self.resolution_residual)
        );
        if let Some(v) = self.system_shift {
            let _ = writeln!(s, "system_shift,,{},{},,,", self.cutoff, fmt_f(v));
        }
        s
    }
}

// -------------------------------------------------------------- compare

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareFlags {
    pub ht_exact_is_zero: bool,
    pub ht_exact_divergent: bool,
    pub qft_shift_negative: bool,
    /// Second-order identity between the two pictures at equal cutoffs.
    pub second_order_identity_holds: bool,
    /// True when the exact sea shift and the exact field-theory shift
    /// agree within `agreement_tolerance`.
    pub ht_qft_equivalent: bool,
    pub agreement_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub units: String,
    pub a: f64,
    pub potential: String,
    pub cutoff: u64,
    pub ht_exact: HtExactShift,
    pub ht_second_order_pp: f64,
    pub ht_second_order_pp_extrapolated: Option<f64>,
    pub x_term: BTreeMap<String, f64>,
    pub ht_second_order_total: BTreeMap<String, f64>,
    pub qft_second_order: f64,
    pub qft_vacuum_shift: f64,
    pub qft_vacuum_shift_extrapolated: Option<f64>,
    pub flags: CompareFlags,
}

pub fn compare_report(cfg: &RunConfig) -> Result<CompareReport, CliError> {
    let ht = ht_report(
        &cfg.potential,
        &cfg.params,
        cfg.cutoff,
        &cfg.schemes,
        &cfg.quad_tol,
        cfg.series_tol,
    )?;
    let qft2 = qft_second_order(
        &cfg.potential,
        &cfg.params,
        cfg.cutoff,
        &cfg.quad_tol,
        cfg.series_tol,
    )?;
    let qft = qft_vacuum_shift_exact(
        &cfg.potential,
        &cfg.params,
        cfg.cutoff,
        &cfg.quad_tol,
        cfg.series_tol,
    )?;

    let agreement_tolerance = 100.0 * cfg.series_tol;
    let ht_exact_is_zero = matches!(ht.exact, HtExactShift::Zero);
    let ht_exact_divergent = !ht_exact_is_zero;
    let scale = ht.second_order_pp.value.abs().max(1e-300);
    let flags = CompareFlags {
        ht_exact_is_zero,
        ht_exact_divergent,
        qft_shift_negative: qft.value < 0.0,
        second_order_identity_holds: (qft2.value - ht.second_order_pp.value).abs()
            <= 1e-13 * scale.max(1.0),
        ht_qft_equivalent: ht_exact_is_zero && qft.value.abs() <= agreement_tolerance,
        agreement_tolerance,
    };
    let x_term = ht
        .x_term
        .iter()
        .map(|(k, r)| (k.clone(), r.value))
        .collect();
    Ok(CompareReport {
        units: UNITS_LABEL.into(),
        a: cfg.params.a(),
        potential: cfg.potential.to_string(),
        cutoff: cfg.cutoff,
        ht_exact: ht.exact,
        ht_second_order_pp: ht.second_order_pp.value,
        ht_second_order_pp_extrapolated: ht.second_order_pp.extrapolated,
        x_term,
        ht_second_order_total: ht.second_order_total,
        qft_second_order: qft2.value,
        qft_vacuum_shift: qft.value,
        qft_vacuum_shift_extrapolated: qft.extrapolated,
        flags,
    })
}

impl CompareReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("quantity,scheme,value,flag\n");
        match &self.ht_exact {
            HtExactShift::Zero => {
                let _ = writeln!(s, "ht_exact,,{},zero", fmt_f(0.0));
            }
            HtExactShift::DivergentUniform { per_level } => {
                let _ = writeln!(s, "ht_exact,,{},divergent_uniform_per_level", fmt_f(*per_level));
            }
        }
        let _ = writeln!(s, "ht_second_order_pp,,{},", fmt_f(self.ht_second_order_pp));
        for (scheme, v) in &self.x_term {
            let _ = writeln!(s, "x_term,{scheme},{},", fmt_f(*v));
        }
        for (scheme, v) in &self.ht_second_order_total {
            let _ = writeln!(s, "ht_second_order_total,{scheme},{},", fmt_f(*v));
        }
        let _ = writeln!(s, "qft_second_order,,{},", fmt_f(self.qft_second_order));
        let _ = writeln!(
            s,
            "qft_vacuum_shift,,{},{}",
            fmt_f(self.qft_vacuum_shift),
            if self.flags.qft_shift_negative { "negative" } else { "" }
        );
        let f = &self.flags;
        let _ = writeln!(s, "flag_ht_exact_is_zero,,{},", f.ht_exact_is_zero);
        let _ = writeln!(s, "flag_qft_shift_negative,,{},", f.qft_shift_negative);
        let _ = writeln!(
            s,
            "flag_second_order_identity_holds,,{},",
            f.second_order_identity_holds
        );
        let _ = writeln!(
            s,
            "flag_ht_qft_equivalent,,{},{}",
            f.ht_qft_equivalent,
            if f.ht_qft_equivalent { "agree" } else { "mismatch" }
        );
        let _ = writeln!(s, "agreement_tolerance,,{},", fmt_f(f.agreement_tolerance));
        s
    }
}
