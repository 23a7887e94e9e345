//! Small moment helpers shared by the ingest and correlation modules.

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population covariance of two equal-length slices.
pub(crate) fn covariance(xs: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    let mx = mean(xs);
    let my = mean(ys);
    xs.iter()
        .zip(ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / xs.len() as f64
}

/// Raw Pearson ratio, `None` when either side has zero spread.
pub(crate) fn pearson_raw(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let mx = mean(xs);
    let my = mean(ys);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx.sqrt() * syy.sqrt()))
}

/// Mean and population variance of the strict upper triangle of a square
/// row-major matrix.
pub(crate) fn upper_triangle_moments(n: usize, data: &[f64]) -> (f64, f64) {
    let count = n * (n - 1) / 2;
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            sum += data[i * n + j];
        }
    }
    let m = sum / count as f64;
    let mut ss = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = data[i * n + j] - m;
            ss += d * d;
        }
    }
    (m, ss / count as f64)
}
