//! Exact ERGM likelihood for dyad-independent statistics by summing over
//! every graph on a small dyad set.

/// Statistic vector of the graph encoded by bitmask `mask` over dyads whose
/// per-dyad contributions are the rows of `dyad_stats`.
fn graph_stats(dyad_stats: &[Vec<f64>], mask: u64) -> Vec<f64> {
    let p = dyad_stats[0].len();
    let mut z = vec![0.0; p];
    for (d, row) in dyad_stats.iter().enumerate() {
        if mask >> d & 1 == 1 {
            for k in 0..p {
                z[k] += row[k];
            }
        }
    }
    z
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Exact mean and covariance of the statistics under `theta`, together with
/// `log kappa(theta)`.
pub fn moments(dyad_stats: &[Vec<f64>], theta: &[f64]) -> (f64, Vec<f64>, Vec<Vec<f64>>) {
    let dyads = dyad_stats.len();
    assert!(dyads <= 20, "enumeration limited to 20 dyads");
    let p = theta.len();
    let all: Vec<(f64, Vec<f64>)> = (0..1u64 << dyads)
        .map(|m| {
            let z = graph_stats(dyad_stats, m);
            (dot(theta, &z), z)
        })
        .collect();
    let shift = all
        .iter()
        .map(|(e, _)| *e)
        .fold(f64::NEG_INFINITY, f64::max);
    let kappa: f64 = all.iter().map(|(e, _)| (e - shift).exp()).sum();
    let log_kappa = shift + kappa.ln();
    let mut mean = vec![0.0; p];
    let mut second = vec![vec![0.0; p]; p];
    for (e, z) in &all {
        let w = (e - log_kappa).exp();
        for a in 0..p {
            mean[a] += w * z[a];
            for b in 0..p {
                second[a][b] += w * z[a] * z[b];
            }
        }
    }
    let cov = (0..p)
        .map(|a| (0..p).map(|b| second[a][b] - mean[a] * mean[b]).collect())
        .collect();
    (log_kappa, mean, cov)
}

/// Log-likelihood `theta . z_obs - log kappa(theta)`.
pub fn log_likelihood(dyad_stats: &[Vec<f64>], observed: &[f64], theta: &[f64]) -> f64 {
    dot(theta, observed) - moments(dyad_stats, theta).0
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in (col + 1)..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = ((r + 1)..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Exact MLE by Newton's method on the enumerated likelihood. Returns `None`
/// if the iteration fails to settle (e.g. the MLE does not exist).
pub fn exact_mle(dyad_stats: &[Vec<f64>], observed: &[f64]) -> Option<(Vec<f64>, f64)> {
    let p = observed.len();
    let mut theta = vec![0.0; p];
    for _ in 0..200 {
        let (_, mean, cov) = moments(dyad_stats, &theta);
        let grad: Vec<f64> = (0..p).map(|k| observed[k] - mean[k]).collect();
        let step = solve(cov, grad.clone())?;
        // damped Newton keeps early iterations stable
        let norm = step.iter().map(|s| s * s).sum::<f64>().sqrt();
        let scale = if norm > 5.0 { 5.0 / norm } else { 1.0 };
        for k in 0..p {
            theta[k] += scale * step[k];
        }
        if norm < 1e-11 && grad.iter().all(|g| g.abs() < 1e-9) {
            // saturated probabilities: the maximum is only approached at infinity
            let saturated = dyad_stats
                .iter()
                .any(|r| r.iter().zip(&theta).map(|(a, t)| a * t).sum::<f64>().abs() > 25.0);
            if saturated {
                return None;
            }
            let ll = log_likelihood(dyad_stats, observed, &theta);
            return Some((theta, ll));
        }
    }
    None
}
