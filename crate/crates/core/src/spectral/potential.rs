//! External perturbations V(x) on the box [-a, a].
//!
//! Built-in analytic forms (polynomials and sin/cos harmonics of the box)
//! carry an exact antiderivative and exact parity, so the phase entering
//! the perturbed modes is exact. Arbitrary user functions are resolved
//! into a Chebyshev series once at construction; their antiderivative is
//! the exact antiderivative of that series, and their parity is `Mixed`.

use crate::error::{Error, Result};
use crate::spectral::ModelParams;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Parity of V(x) on the symmetric box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrigKind {
    Sin,
    Cos,
}

/// One harmonic term `amp * sin(h pi x / a)` or `amp * cos(h pi x / a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub kind: TrigKind,
    pub amp: f64,
    pub harmonic: u32,
}

/// Highest polynomial degree the analytic fast path supports; beyond it the
/// oscillatory-moment recurrences lose accuracy.
pub const MAX_POLY_DEGREE: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Repr {
    /// v(x) = sum_m poly[m] x^m + sum of trig terms
    Analytic { poly: Vec<f64>, trig: Vec<TrigTerm> },
    /// Chebyshev resolution of a user-supplied function
    Custom { value: ChebSeries, antider: ChebSeries },
}

/// A real perturbation on [-a, a] with its exact antiderivative (phase
/// function, fixed by `f(0) = 0`), parity tag, and cached mean.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    half_width: f64,
    repr: Repr,
    parity: Parity,
    mean: f64,
}

impl Potential {
    /// V = 0.
    pub fn zero(params: &ModelParams) -> Self {
        Self::from_terms(vec![], vec![], params)
    }

    /// V(x) = lambda x.
    pub fn linear(lambda: f64, params: &ModelParams) -> Self {
        Self::from_terms(vec![0.0, lambda], vec![], params)
    }

    /// V(x) = c.
    pub fn constant(c: f64, params: &ModelParams) -> Self {
        Self::from_terms(vec![c], vec![], params)
    }

    /// V(x) = sum_m coeffs[m] x^m.
    pub fn polynomial(coeffs: &[f64], params: &ModelParams) -> Result<Self> {
        if coeffs.len() > MAX_POLY_DEGREE + 1 {
            return Err(Error::InvalidParameter(format!(
                "polynomial degree {} exceeds supported maximum {}",
                coeffs.len() - 1,
                MAX_POLY_DEGREE
            )));
        }
        Ok(Self::from_terms(coeffs.to_vec(), vec![], params))
    }

    /// V(x) = amp sin(harmonic pi x / a).
    pub fn sine(amp: f64, harmonic: u32, params: &ModelParams) -> Result<Self> {
        Self::trig(TrigKind::Sin, amp, harmonic, params)
    }

    /// V(x) = amp cos(harmonic pi x / a).
    pub fn cosine(amp: f64, harmonic: u32, params: &ModelParams) -> Result<Self> {
        Self::trig(TrigKind::Cos, amp, harmonic, params)
    }

    fn trig(kind: TrigKind, amp: f64, harmonic: u32, params: &ModelParams) -> Result<Self> {
        if harmonic == 0 {
            return Err(Error::InvalidParameter(
                "trig harmonic must be >= 1 (use a constant instead)".into(),
            ));
        }
        Ok(Self::from_terms(
            vec![],
            vec![TrigTerm { kind, amp, harmonic }],
            params,
        ))
    }

    /// Assemble from raw analytic parts.
    pub fn from_terms(mut poly: Vec<f64>, trig: Vec<TrigTerm>, params: &ModelParams) -> Self {
        while poly.last() == Some(&0.0) {
            poly.pop();
        }
        let trig: Vec<TrigTerm> = trig.into_iter().filter(|t| t.amp != 0.0).collect();
        let a = params.a();
        let mean = analytic_mean(&poly, a);
        let parity = analytic_parity(&poly, &trig);
        Self {
            half_width: a,
            repr: Repr::Analytic { poly, trig },
            parity,
            mean,
        }
    }

    /// Resolve an arbitrary function into a Chebyshev series on [-a, a].
    ///
    /// The returned potential evaluates the series (not the original
    /// closure), its antiderivative is the exact series antiderivative,
    /// and its parity is [`Parity::Mixed`].
    pub fn from_fn<F: Fn(f64) -> f64>(v: F, params: &ModelParams) -> Result<Self> {
        let a = params.a();
        let value = ChebSeries::fit(|t| v(a * t))?;
        let antider = value.antiderivative();
        let mean = (antider.eval(1.0) - antider.eval(-1.0)) / 2.0;
        Ok(Self {
            half_width: a,
            repr: Repr::Custom { value, antider },
            parity: Parity::Mixed,
            mean,
        })
    }

    /// Parse an inline expression: sums of polynomial and sin/cos terms,
    /// e.g. `"x"`, `"0.3 + 2*x^2"`, `"0.5*sin(1) - cos(2)"`. `sin(h)` and
    /// `cos(h)` denote `sin(h pi x / a)` and `cos(h pi x / a)`.
    pub fn parse(expr: &str, params: &ModelParams) -> Result<Self> {
        let (poly, trig) = parse_expression(expr)?;
        if poly.len() > MAX_POLY_DEGREE + 1 {
            return Err(Error::InvalidParameter(format!(
                "polynomial degree {} exceeds supported maximum {}",
                poly.len() - 1,
                MAX_POLY_DEGREE
            )));
        }
        Ok(Self::from_terms(poly, trig, params))
    }

    /// The potential scaled by a constant factor.
    pub fn scale(&self, factor: f64) -> Self {
        let repr = match &self.repr {
            Repr::Analytic { poly, trig } => Repr::Analytic {
                poly: poly.iter().map(|c| c * factor).collect(),
                trig: trig
                    .iter()
                    .map(|t| TrigTerm {
                        amp: t.amp * factor,
                        ..*t
                    })
                    .collect(),
            },
            Repr::Custom { value, antider } => Repr::Custom {
                value: value.scale(factor),
                antider: antider.scale(factor),
            },
        };
        Self {
            half_width: self.half_width,
            repr,
            parity: self.parity,
            mean: self.mean * factor,
        }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Cached (1/2a) int_{-a}^{a} V(x) dx.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Analytic { poly, trig } => poly.is_empty() && trig.is_empty(),
            Repr::Custom { value, .. } => value.coeffs.iter().all(|&c| c == 0.0),
        }
    }

    /// V(x).
    pub fn value(&self, x: f64) -> f64 {
        match &self.repr {
            Repr::Analytic { poly, trig } => {
                let mut v = poly.iter().rev().fold(0.0, |acc, &c| acc * x + c);
                let k = std::f64::consts::PI / self.half_width;
                for t in trig {
                    let arg = t.harmonic as f64 * k * x;
                    v += match t.kind {
                        TrigKind::Sin => t.amp * arg.sin(),
                        TrigKind::Cos => t.amp * arg.cos(),
                    };
                }
                v
            }
            Repr::Custom { value, .. } => value.eval(x / self.half_width),
        }
    }

    /// Phase function f(x): the antiderivative of V with f(0) = 0.
    pub fn phase(&self, x: f64) -> f64 {
        match &self.repr {
            Repr::Analytic { poly, trig } => {
                // int sum c_m x^m = sum c_m x^{m+1}/(m+1), zero at x = 0
                let mut f = 0.0;
                for (m, &c) in poly.iter().enumerate().rev() {
                    f = f * x + c / (m as f64 + 1.0);
                }
                f *= x;
                let k = std::f64::consts::PI / self.half_width;
                for t in trig {
                    let w = t.harmonic as f64 * k;
                    f += match t.kind {
                        TrigKind::Sin => -t.amp / w * ((w * x).cos() - 1.0),
                        TrigKind::Cos => t.amp / w * (w * x).sin(),
                    };
                }
                f
            }
            Repr::Custom { antider, .. } => {
                self.half_width * (antider.eval(x / self.half_width) - antider.eval(0.0))
            }
        }
    }

    /// Upper bound on |V| over the box (supremum estimate).
    pub fn max_abs(&self) -> f64 {
        match &self.repr {
            Repr::Analytic { poly, trig } => {
                let a = self.half_width;
                let p: f64 = poly
                    .iter()
                    .enumerate()
                    .map(|(m, &c)| c.abs() * a.powi(m as i32))
                    .sum();
                let t: f64 = trig.iter().map(|t| t.amp.abs()).sum();
                p + t
            }
            Repr::Custom { value, .. } => value.coeffs.iter().map(|c| c.abs()).sum(),
        }
    }

    /// Upper bound on the angular frequency of V itself (quadrature hint).
    pub fn freq_bound(&self) -> f64 {
        match &self.repr {
            Repr::Analytic { trig, .. } => trig
                .iter()
                .map(|t| t.harmonic as f64 * std::f64::consts::PI / self.half_width)
                .fold(0.0, f64::max),
            Repr::Custom { value, .. } => value.coeffs.len() as f64 / self.half_width,
        }
    }

    pub(crate) fn analytic_parts(&self) -> Option<(&[f64], &[TrigTerm])> {
        match &self.repr {
            Repr::Analytic { poly, trig } => Some((poly, trig)),
            Repr::Custom { .. } => None,
        }
    }

    /// Check the structural invariants: f(0) = 0, f' = V at sample points,
    /// odd parity implies zero mean.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.phase(0.0).abs() > tol {
            return Err(Error::InvalidParameter("phase does not vanish at 0".into()));
        }
        if self.parity == Parity::Odd && self.mean.abs() > tol {
            return Err(Error::InvalidParameter(
                "odd potential with nonzero mean".into(),
            ));
        }
        let a = self.half_width;
        let h = 1e-6 * a;
        let scale = self.max_abs().max(1.0);
        for i in 0..=64 {
            let x = -a + 2.0 * a * (i as f64 + 0.5) / 65.0;
            let fd = (self.phase(x + h) - self.phase(x - h)) / (2.0 * h);
            if (fd - self.value(x)).abs() > tol.max(1e-8 * scale) {
                return Err(Error::InvalidParameter(format!(
                    "antiderivative inconsistent with value near x = {x:.4}"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Analytic { poly, trig } => {
                let mut parts: Vec<String> = Vec::new();
                for (m, &c) in poly.iter().enumerate() {
                    if c == 0.0 {
                        continue;
                    }
                    parts.push(match m {
                        0 => format!("{c}"),
                        1 => format!("{c}*x"),
                        _ => format!("{c}*x^{m}"),
                    });
                }
                for t in trig {
                    let name = match t.kind {
                        TrigKind::Sin => "sin",
                        TrigKind::Cos => "cos",
                    };
                    parts.push(format!("{}*{name}({})", t.amp, t.harmonic));
                }
                if parts.is_empty() {
                    write!(f, "0")
                } else {
                    write!(f, "{}", parts.join(" + "))
                }
            }
            Repr::Custom { value, .. } => write!(f, "custom[cheb deg {}]", value.coeffs.len() - 1),
        }
    }
}

fn analytic_mean(poly: &[f64], a: f64) -> f64 {
    // trig harmonics integrate to zero over the symmetric box
    poly.iter()
        .enumerate()
        .filter(|(m, _)| m % 2 == 0)
        .map(|(m, &c)| c * a.powi(m as i32) / (m as f64 + 1.0))
        .sum()
}

fn analytic_parity(poly: &[f64], trig: &[TrigTerm]) -> Parity {
    let mut has_odd = trig.iter().any(|t| t.kind == TrigKind::Sin);
    let mut has_even = trig.iter().any(|t| t.kind == TrigKind::Cos);
    for (m, &c) in poly.iter().enumerate() {
        if c != 0.0 {
            if m % 2 == 0 {
                has_even = true;
            } else {
                has_odd = true;
            }
        }
    }
    match (has_odd, has_even) {
        (true, false) => Parity::Odd,
        (true, true) => Parity::Mixed,
        _ => Parity::Even,
    }
}

// ---------------------------------------------------------------------------
// Chebyshev series on [-1, 1]

/// Coefficients with the halved-c0 convention:
/// value = c[0]/2 + sum_{m>=1} c[m] T_m(t).
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ChebSeries {
    coeffs: Vec<f64>,
}

impl ChebSeries {
    /// Fit with adaptive degree; errors out if the coefficient tail does
    /// not fall below 1e-13 of the largest coefficient by degree 1024.
    fn fit<F: Fn(f64) -> f64>(f: F) -> Result<Self> {
        for pow in 4..=10u32 {
            let n = 1usize << pow;
            let coeffs = Self::coeffs_at(&f, n);
            let scale = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
            if scale == 0.0 {
                return Ok(Self { coeffs: vec![0.0] });
            }
            let tail = coeffs[n - 4..].iter().fold(0.0_f64, |m, c| m.max(c.abs()));
            if tail <= 1e-13 * scale {
                let mut coeffs = coeffs;
                while coeffs.len() > 1
                    && coeffs.last().map_or(false, |c| c.abs() <= 1e-15 * scale)
                {
                    coeffs.pop();
                }
                return Ok(Self { coeffs });
            }
        }
        Err(Error::InvalidParameter(
            "function could not be resolved by a degree-1024 Chebyshev series".into(),
        ))
    }

    fn coeffs_at<F: Fn(f64) -> f64>(f: &F, n: usize) -> Vec<f64> {
        let fx: Vec<f64> = (0..n)
            .map(|i| {
                let theta = std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
                f(theta.cos())
            })
            .collect();
        (0..n)
            .map(|m| {
                let mut acc = 0.0;
                for (i, &v) in fx.iter().enumerate() {
                    let theta = std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
                    acc += v * (m as f64 * theta).cos();
                }
                2.0 * acc / n as f64
            })
            .collect()
    }

    fn eval(&self, t: f64) -> f64 {
        // Clenshaw
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + self.coeffs[0] / 2.0
    }

    fn antiderivative(&self) -> Self {
        let n = self.coeffs.len();
        let c = |m: usize| if m < n { self.coeffs[m] } else { 0.0 };
        let mut b = vec![0.0; n + 1];
        for m in 1..=n {
            b[m] = (c(m - 1) - c(m + 1)) / (2.0 * m as f64);
        }
        Self { coeffs: b }
    }

    fn scale(&self, factor: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Inline expression parser

fn parse_expression(expr: &str) -> Result<(Vec<f64>, Vec<TrigTerm>)> {
    let bad = |what: &str| Error::InvalidParameter(format!("potential expression: {what}"));
    let mut poly = vec![0.0; MAX_POLY_DEGREE + 2];
    let mut trig: Vec<TrigTerm> = Vec::new();

    let compact: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad("empty expression"));
    }
    // split into signed terms
    let mut terms: Vec<(f64, String)> = Vec::new();
    let mut sign = 1.0;
    let mut cur = String::new();
    let mut depth = 0usize;
    let mut chars = compact.chars().peekable();
    while let Some(ch) = chars.next() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth = depth.checked_sub(1).ok_or_else(|| bad("unbalanced parens"))?;
                cur.push(ch);
            }
            '+' | '-' if depth == 0 && !cur.is_empty() && !cur.ends_with(['e', 'E']) => {
                terms.push((sign, std::mem::take(&mut cur)));
                sign = if ch == '-' { -1.0 } else { 1.0 };
            }
            '-' if depth == 0 && cur.is_empty() => sign = -sign,
            '+' if depth == 0 && cur.is_empty() => {}
            _ => cur.push(ch),
        }
    }
    if depth != 0 {
        return Err(bad("unbalanced parens"));
    }
    if cur.is_empty() {
        return Err(bad("dangling operator"));
    }
    terms.push((sign, cur));

    for (sign, term) in terms {
        // optional leading coefficient, optional '*', then a factor
        let (coeff, factor) = split_coeff(&term);
        let coeff = sign * coeff.map_or(Ok(1.0), |c| {
            c.parse::<f64>().map_err(|_| bad(&format!("bad number `{c}`")))
        })?;
        match factor {
            None => poly[0] += coeff,
            Some(f) if f == "x" => poly[1] += coeff,
            Some(f) if f.starts_with("x^") => {
                let deg: usize = f[2..].parse().map_err(|_| bad("bad exponent"))?;
                if deg > MAX_POLY_DEGREE {
                    return Err(bad(&format!("degree {deg} exceeds {MAX_POLY_DEGREE}")));
                }
                poly[deg] += coeff;
            }
            Some(f) if f.starts_with("sin(") && f.ends_with(')') => {
                let h: u32 = f[4..f.len() - 1].parse().map_err(|_| bad("bad harmonic"))?;
                if h == 0 {
                    return Err(bad("harmonic must be >= 1"));
                }
                trig.push(TrigTerm {
                    kind: TrigKind::Sin,
                    amp: coeff,
                    harmonic: h,
                });
            }
            Some(f) if f.starts_with("cos(") && f.ends_with(')') => {
                let h: u32 = f[4..f.len() - 1].parse().map_err(|_| bad("bad harmonic"))?;
                if h == 0 {
                    return Err(bad("harmonic must be >= 1"));
                }
                trig.push(TrigTerm {
                    kind: TrigKind::Cos,
                    amp: coeff,
                    harmonic: h,
                });
            }
            Some(f) => return Err(bad(&format!("unrecognized factor `{f}`"))),
        }
    }
    poly.truncate(MAX_POLY_DEGREE + 1);
    // merge duplicate harmonics
    trig.sort_by_key(|t| (t.harmonic, t.kind == TrigKind::Cos));
    let mut merged: Vec<TrigTerm> = Vec::new();
    for t in trig {
        match merged.last_mut() {
            Some(last) if last.harmonic == t.harmonic && last.kind == t.kind => last.amp += t.amp,
            _ => merged.push(t),
        }
    }
    Ok((poly, merged))
}

/// Split "2.5*x^2" into ("2.5", Some("x^2")); bare numbers give (num, None);
/// bare factors give (None, Some(factor)).
fn split_coeff(term: &str) -> (Option<&str>, Option<&str>) {
    if let Some(pos) = term.find('*') {
        return (Some(&term[..pos]), Some(&term[pos + 1..]));
    }
    if term.starts_with('x') || term.starts_with("sin(") || term.starts_with("cos(") {
        return (None, Some(term));
    }
    (Some(term), None)
}
