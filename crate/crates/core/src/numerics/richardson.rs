//! Richardson extrapolation of cutoff traces.
//!
//! Partial sums of the model's series approach their limit polynomially in
//! 1/N, so a short Neville tableau in h = 1/N evaluated at h = 0
//! accelerates the trace. Order 2 (three points, quadratic) is the default
//! used throughout.

/// Neville polynomial extrapolation of `(xs, ys)` to `x = 0`.
///
/// Panics if `xs` is empty or lengths differ; callers guard.
pub fn neville_to_zero(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    let mut p = ys.to_vec();
    let n = p.len();
    for level in 1..n {
        for m in 0..n - level {
            let (x0, x1) = (xs[m], xs[m + level]);
            p[m] = (x0 * p[m + 1] - x1 * p[m]) / (x0 - x1);
        }
    }
    p[0]
}

/// Richardson extrapolation in 1/N over the last `order + 1` points of a
/// cutoff trace. Returns `None` when fewer than two points are available.
pub fn extrapolate_trace(trace: &[(u64, f64)], order: usize) -> Option<f64> {
    if trace.len() < 2 {
        return None;
    }
    let pts = (order + 1).min(trace.len());
    let tail = &trace[trace.len() - pts..];
    let xs: Vec<f64> = tail.iter().map(|&(n, _)| 1.0 / n as f64).collect();
    let ys: Vec<f64> = tail.iter().map(|&(_, v)| v).collect();
    Some(neville_to_zero(&xs, &ys))
}
