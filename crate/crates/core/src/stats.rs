/// Ordinary least-squares slope of `ys` against `xs`.
///
/// Returns `None` with fewer than two points or when all `xs` coincide.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// Slope of `values` against `ln d`.
pub fn slope_vs_ln(ds: &[usize], values: &[f64]) -> Option<f64> {
    let xs: Vec<f64> = ds.iter().map(|&d| (d as f64).ln()).collect();
    least_squares_slope(&xs, values)
}
