//! Plain and conditional Pearson correlation matrices and the metric
//! distance transform `d = sqrt(2 (1 - r))`.

use std::fmt;
use std::io::Write;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Window;
use crate::stats;

/// Rounding overshoot beyond +-1 up to this amount is clamped silently.
pub const CLAMP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CorrKind {
    Plain,
    #[default]
    Conditional,
}

impl fmt::Display for CorrKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorrKind::Plain => "plain",
            CorrKind::Conditional => "conditional",
        })
    }
}

impl std::str::FromStr for CorrKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "plain" => Ok(CorrKind::Plain),
            "conditional" => Ok(CorrKind::Conditional),
            other => Err(Error::Method(format!("unknown correlation kind `{other}`"))),
        }
    }
}

fn clamp_unit(r: f64) -> Result<f64> {
    if !r.is_finite() {
        return Err(Error::Numerical(format!("correlation is {r}")));
    }
    if r.abs() > 1.0 + CLAMP_TOLERANCE {
        return Err(Error::Numerical(format!(
            "correlation {r} exceeds unit bound beyond tolerance"
        )));
    }
    Ok(r.clamp(-1.0, 1.0))
}

/// Sample Pearson correlation of two equal-length series.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!(
            "series lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::Dimension("need at least 2 observations".into()));
    }
    let r = stats::pearson_raw(x, y).ok_or(Error::ZeroVariance)?;
    clamp_unit(r)
}

/// Row indices of one series split into extreme and middle quantiles.
///
/// The high set holds the `ceil(T/4)` lowest and `floor(T/4)` highest values;
/// the low set holds the rest. Ties are broken by earlier row first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupSplit {
    pub high_idx: Vec<usize>,
    pub low_idx: Vec<usize>,
}

impl SubgroupSplit {
    pub fn of(series: &[f64]) -> Self {
        let t = series.len();
        let n_lowest = t.div_ceil(4);
        let n_highest = t / 4;
        let mut order: Vec<usize> = (0..t).collect();
        order.sort_by(|&a, &b| series[a].total_cmp(&series[b]).then(a.cmp(&b)));
        let mut in_high = vec![false; t];
        for &k in &order[..n_lowest] {
            in_high[k] = true;
        }
        // highest values, earlier rows preferred among ties
        let mut desc: Vec<usize> = order[n_lowest..].to_vec();
        desc.sort_by(|&a, &b| series[b].total_cmp(&series[a]).then(a.cmp(&b)));
        for &k in &desc[..n_highest] {
            in_high[k] = true;
        }
        let (high_idx, low_idx) = (0..t).partition(|&k| in_high[k]);
        Self { high_idx, low_idx }
    }
}

fn gather(xs: &[f64], idx: &[usize]) -> Vec<f64> {
    idx.iter().map(|&k| xs[k]).collect()
}

fn subset_cov(x: &[f64], y: &[f64], idx: &[usize]) -> f64 {
    stats::covariance(&gather(x, idx), &gather(y, idx))
}

/// Applies the volatility adjustment `r * sqrt((1 + beta) / (1 + beta r^2))`.
pub fn adjust_correlation(r: f64, beta: f64) -> f64 {
    if beta == 0.0 {
        return r;
    }
    let v = r * ((1.0 + beta) / (1.0 + beta * r * r)).sqrt();
    v.clamp(-1.0, 1.0)
}

/// Intermediate quantities of a conditional correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalCorrelation {
    pub r: f64,
    pub sigma_high: f64,
    pub sigma_low: f64,
    pub beta: f64,
    pub value: f64,
}

/// Conditional correlation from precomputed splits of both series.
pub fn conditional_with_splits(
    x: &[f64],
    y: &[f64],
    sx: &SubgroupSplit,
    sy: &SubgroupSplit,
) -> Result<ConditionalCorrelation> {
    let r = pearson(x, y)?;
    for s in [sx, sy] {
        if s.high_idx.len() < 2 || s.low_idx.len() < 2 {
            return Err(Error::DegenerateSubgroup(format!(
                "subgroups of sizes {} and {} need at least 2 rows each",
                s.high_idx.len(),
                s.low_idx.len()
            )));
        }
    }
    let sigma_high = 0.5 * (subset_cov(x, y, &sx.high_idx) + subset_cov(x, y, &sy.high_idx));
    let sigma_low = 0.5 * (subset_cov(x, y, &sx.low_idx) + subset_cov(x, y, &sy.low_idx));
    if sigma_low == 0.0 {
        return Err(Error::DegenerateSubgroup(
            "low-volatility covariance is zero".into(),
        ));
    }
    let ratio = sigma_high / sigma_low;
    let beta = if ratio.is_finite() {
        (ratio - 1.0).max(0.0)
    } else {
        0.0
    };
    Ok(ConditionalCorrelation {
        r,
        sigma_high,
        sigma_low,
        beta,
        value: adjust_correlation(r, beta),
    })
}

/// Full breakdown of the conditional correlation of `x` and `y`.
pub fn conditional_parts(x: &[f64], y: &[f64]) -> Result<ConditionalCorrelation> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!(
            "series lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    conditional_with_splits(x, y, &SubgroupSplit::of(x), &SubgroupSplit::of(y))
}

/// Volatility-adjusted Pearson correlation.
pub fn conditional_pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    conditional_parts(x, y).map(|c| c.value)
}

/// Symmetric correlation matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    names: Vec<String>,
    kind: CorrKind,
    rows: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    pub fn from_rows(names: Vec<String>, kind: CorrKind, rows: Vec<Vec<f64>>) -> Result<Self> {
        check_square(&names, &rows)?;
        let n = names.len();
        for i in 0..n {
            if rows[i][i] != 1.0 {
                return Err(Error::Dimension(format!("diagonal entry {i} is not 1")));
            }
            for j in 0..n {
                let v = rows[i][j];
                if !(-1.0..=1.0).contains(&v) {
                    return Err(Error::Dimension(format!(
                        "entry ({i},{j}) = {v} outside [-1,1]"
                    )));
                }
                if v != rows[j][i] {
                    return Err(Error::Dimension(format!("entry ({i},{j}) not symmetric")));
                }
            }
        }
        Ok(Self { names, kind, rows })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn kind(&self) -> CorrKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    fn flat(&self) -> Vec<f64> {
        self.rows.iter().flatten().copied().collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_matrix_csv(w, &self.names, &self.rows)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "names": self.names, "kind": self.kind, "rows": self.rows })
    }
}

fn check_square(names: &[String], rows: &[Vec<f64>]) -> Result<()> {
    let n = names.len();
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension(format!("matrix is not {n}x{n}")));
    }
    Ok(())
}

fn write_matrix_csv<W: Write>(w: W, names: &[String], rows: &[Vec<f64>]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec![String::new()];
    header.extend(names.iter().cloned());
    wtr.write_record(&header)?;
    for (name, row) in names.iter().zip(rows) {
        let mut rec = vec![name.clone()];
        rec.extend(row.iter().map(f64::to_string));
        wtr.write_record(&rec)?;
    }
    wtr.flush().map_err(|source| Error::Io {
        path: "<matrix>".into(),
        source,
    })?;
    Ok(())
}

/// Correlation matrix of the columns of a window.
pub fn correlation_matrix(window: &Window<'_>, kind: CorrKind) -> Result<CorrelationMatrix> {
    correlation_matrix_from_columns(window.names, &window.columns, kind)
        .map_err(|e| e.in_window(window.end_date))
}

/// Correlation matrix of equal-length columns. Each pair is computed once and
/// mirrored, so the result is exactly symmetric.
pub fn correlation_matrix_from_columns<C: AsRef<[f64]>>(
    names: &[String],
    columns: &[C],
    kind: CorrKind,
) -> Result<CorrelationMatrix> {
    let n = names.len();
    if columns.len() != n {
        return Err(Error::Dimension(format!(
            "{n} names but {} columns",
            columns.len()
        )));
    }
    for (name, col) in names.iter().zip(columns) {
        let col = col.as_ref();
        if col.len() < 2 || col.iter().all(|v| *v == col[0]) {
            return Err(Error::ConstantSeries {
                entity: name.clone(),
                window_end: None,
            });
        }
    }
    let splits: Vec<SubgroupSplit> = match kind {
        CorrKind::Plain => Vec::new(),
        CorrKind::Conditional => columns
            .iter()
            .map(|c| SubgroupSplit::of(c.as_ref()))
            .collect(),
    };
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        rows[i][i] = 1.0;
        for j in (i + 1)..n {
            let (x, y) = (columns[i].as_ref(), columns[j].as_ref());
            let v = match kind {
                CorrKind::Plain => pearson(x, y),
                CorrKind::Conditional => {
                    conditional_with_splits(x, y, &splits[i], &splits[j]).map(|c| c.value)
                }
            }
            .map_err(|e| match e {
                Error::DegenerateSubgroup(msg) => {
                    Error::DegenerateSubgroup(format!("pair `{}`-`{}`: {msg}", names[i], names[j]))
                }
                other => other,
            })?;
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    Ok(CorrelationMatrix {
        names: names.to_vec(),
        kind,
        rows,
    })
}

/// Mean of the off-diagonal (upper-triangle) correlations.
pub fn mean_correlation(c: &CorrelationMatrix) -> f64 {
    stats::upper_triangle_moments(c.n(), &c.flat()).0
}

/// Population variance of the off-diagonal correlations.
pub fn corr_variance(c: &CorrelationMatrix) -> f64 {
    stats::upper_triangle_moments(c.n(), &c.flat()).1.max(0.0)
}

/// Symmetric, zero-diagonal, non-negative matrix of pairwise distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    names: Vec<String>,
    kind: Option<CorrKind>,
    rows: Vec<Vec<f64>>,
}

impl DistanceMatrix {
    /// Builds a distance matrix from explicit rows (no correlation provenance).
    pub fn from_rows(names: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        check_square(&names, &rows)?;
        let n = names.len();
        for i in 0..n {
            if rows[i][i] != 0.0 {
                return Err(Error::Dimension(format!("diagonal entry {i} is not 0")));
            }
            for j in 0..n {
                let v = rows[i][j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Dimension(format!(
                        "entry ({i},{j}) = {v} is not a distance"
                    )));
                }
                if v != rows[j][i] {
                    return Err(Error::Dimension(format!("entry ({i},{j}) not symmetric")));
                }
            }
        }
        Ok(Self {
            names,
            kind: None,
            rows,
        })
    }

    /// Builds a matrix on nodes named `0, 1, ...` from upper-triangle weights
    /// listed row by row.
    pub fn from_upper(n: usize, upper: &[f64]) -> Result<Self> {
        if upper.len() != n * (n.saturating_sub(1)) / 2 {
            return Err(Error::Dimension(format!(
                "{} upper entries for n = {n}",
                upper.len()
            )));
        }
        let mut rows = vec![vec![0.0; n]; n];
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                rows[i][j] = upper[k];
                rows[j][i] = upper[k];
                k += 1;
            }
        }
        Self::from_rows((0..n).map(|i| i.to_string()).collect(), rows)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn kind(&self) -> Option<CorrKind> {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Same names, entries replaced by `f(i, j, d_ij)` for `i != j`.
    pub fn map_offdiag(&self, f: impl Fn(usize, usize, f64) -> f64) -> Result<Self> {
        let n = self.n();
        let mut rows = self.rows.clone();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j, self.rows[i][j]);
                rows[i][j] = v;
                rows[j][i] = v;
            }
        }
        let mut out = Self::from_rows(self.names.clone(), rows)?;
        out.kind = self.kind;
        Ok(out)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_matrix_csv(w, &self.names, &self.rows)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "names": self.names, "kind": self.kind, "rows": self.rows })
    }
}

/// Elementwise `sqrt(2 (1 - r))`, mapping `[-1, 1]` onto `[0, 2]`.
pub fn to_distance(c: &CorrelationMatrix) -> DistanceMatrix {
    let rows = c
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &r)| {
                    if i == j {
                        0.0
                    } else {
                        correlation_to_distance(r)
                    }
                })
                .collect()
        })
        .collect();
    DistanceMatrix {
        names: c.names.clone(),
        kind: Some(c.kind),
        rows,
    }
}

pub fn correlation_to_distance(r: f64) -> f64 {
    (2.0 * (1.0 - r)).max(0.0).sqrt().min(2.0)
}

/// Inverse of [`correlation_to_distance`].
pub fn distance_to_correlation(d: f64) -> f64 {
    1.0 - d * d / 2.0
}

/// Window end date attached to matrices produced by a rolling run.
#[derive(Debug, Clone, PartialEq)]
pub struct DatedMatrix {
    pub window_end: NaiveDate,
    pub correlation: CorrelationMatrix,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("E{i}")).collect()
    }

    #[test]
    fn pearson_identity_and_negation() {
        let x = [1.0, 2.0, 4.0, 3.0, 7.0];
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_eq!(pearson(&x, &x).unwrap(), 1.0);
        assert_eq!(pearson(&x, &y).unwrap(), -1.0);
    }

    #[test]
    fn pearson_hand_value() {
        // sxy = 4.5, sxx = 5, syy = 4.75
        let r = pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 2.0, 4.0]).unwrap();
        let expected = 4.5 / (5.0f64 * 4.75).sqrt();
        assert!((r - expected).abs() < 1e-15);
        assert!((r - 0.923_380_516_876_638_8).abs() < 1e-12);
    }

    #[test]
    fn pearson_constant_input() {
        assert!(matches!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::ZeroVariance)
        ));
    }

    #[test]
    fn adjustment_oracle_values() {
        assert_eq!(adjust_correlation(0.37, 0.0), 0.37);
        assert_eq!(adjust_correlation(0.0, 3.5), 0.0);
        let expected = 0.6 * (2.0f64 / 1.36).sqrt();
        assert!((adjust_correlation(0.6, 1.0) - expected).abs() < 1e-15);
        assert!((adjust_correlation(0.6, 1.0) - 0.72761).abs() < 5e-6);
    }

    #[test]
    fn split_sizes_follow_quartile_rule() {
        for t in 4usize..30 {
            let xs: Vec<f64> = (0..t).map(|k| ((k * 7) % t) as f64).collect();
            let s = SubgroupSplit::of(&xs);
            assert_eq!(s.high_idx.len(), t.div_ceil(4) + t / 4);
            assert_eq!(s.high_idx.len() + s.low_idx.len(), t);
        }
        let xs = [5.0, 1.0, 9.0, 3.0, 7.0, 2.0, 8.0, 4.0];
        let s = SubgroupSplit::of(&xs);
        // two lowest (1, 2) and two highest (9, 8)
        assert_eq!(s.high_idx, vec![1, 2, 5, 6]);
        assert_eq!(s.low_idx, vec![0, 3, 4, 7]);
    }

    #[test]
    fn split_ties_prefer_earlier_rows() {
        let s = SubgroupSplit::of(&[1.0; 8]);
        // lowest: rows 0,1; highest: rows 2,3
        assert_eq!(s.high_idx, vec![0, 1, 2, 3]);
    }

    #[test]
    fn conditional_matches_formula_on_measured_beta() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let x: Vec<f64> = (0..40).map(|_| rng.random::<f64>()).collect();
            let y: Vec<f64> = x
                .iter()
                .map(|v| v * v + 0.3 * rng.random::<f64>())
                .collect();
            let c = conditional_parts(&x, &y).unwrap();
            let r = pearson(&x, &y).unwrap();
            assert_eq!(c.r, r);
            let beta = (c.sigma_high / c.sigma_low - 1.0).max(0.0);
            let oracle = r * ((1.0 + beta) / (1.0 + beta * r * r)).sqrt();
            assert!((c.value - oracle).abs() < 1e-14);
        }
    }

    #[test]
    fn conditional_degenerate_low_group() {
        // all middle values identical in x and y -> zero low covariance
        let x = [0.0, 0.0, 5.0, 5.0, 5.0, 5.0, 9.0, 9.0];
        let y = [1.0, 0.0, 3.0, 3.0, 3.0, 3.0, 8.0, 9.0];
        assert!(matches!(
            conditional_pearson(&x, &y),
            Err(Error::DegenerateSubgroup(_))
        ));
    }

    #[test]
    fn small_matrices() {
        let a = vec![1.0, 2.0, 3.0, 5.0];
        let m =
            correlation_matrix_from_columns(&names(2), &[a.clone(), a.clone()], CorrKind::Plain)
                .unwrap();
        assert!(m.rows().iter().flatten().all(|v| *v == 1.0));

        let b: Vec<f64> = a.iter().map(|v| -v).collect();
        let c = vec![0.3, -1.0, 2.0, 0.1];
        let m = correlation_matrix_from_columns(&names(3), &[a, b, c], CorrKind::Plain).unwrap();
        assert_eq!(m.get(0, 1), -1.0);
        assert_eq!(m.get(1, 0), -1.0);
    }

    #[test]
    fn constant_column_is_named() {
        let err = correlation_matrix_from_columns(
            &names(2),
            &[vec![1.0, 2.0, 3.0], vec![4.0, 4.0, 4.0]],
            CorrKind::Plain,
        )
        .unwrap_err();
        assert!(matches!(err, Error::ConstantSeries { ref entity, .. } if entity == "E1"));
    }

    #[test]
    fn matrix_matches_pairwise_calls() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cols: Vec<Vec<f64>> = (0..17)
            .map(|_| {
                let mut level = 1.0;
                (0..120)
                    .map(|_| {
                        level += rng.random::<f64>() - 0.5;
                        level
                    })
                    .collect()
            })
            .collect();
        for kind in [CorrKind::Plain, CorrKind::Conditional] {
            let m = correlation_matrix_from_columns(&names(17), &cols, kind).unwrap();
            for i in 0..17 {
                for j in 0..17 {
                    let expected = match (i == j, kind) {
                        (true, _) => 1.0,
                        (false, CorrKind::Plain) => pearson(&cols[i], &cols[j]).unwrap(),
                        (false, CorrKind::Conditional) => {
                            let (a, b) = (i.min(j), i.max(j));
                            conditional_pearson(&cols[a], &cols[b]).unwrap()
                        }
                    };
                    assert_eq!(m.get(i, j), expected);
                    assert_eq!(m.get(i, j), m.get(j, i));
                }
            }
        }
    }

    #[test]
    fn distance_endpoints() {
        assert_eq!(correlation_to_distance(1.0), 0.0);
        assert_eq!(correlation_to_distance(-1.0), 2.0);
        assert!((correlation_to_distance(0.0) - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn mean_and_variance_of_offdiagonals() {
        let rows = vec![
            vec![1.0, 0.2, 0.4],
            vec![0.2, 1.0, 0.6],
            vec![0.4, 0.6, 1.0],
        ];
        let c = CorrelationMatrix::from_rows(names(3), CorrKind::Plain, rows).unwrap();
        assert!((mean_correlation(&c) - 0.4).abs() < 1e-15);
        // ((0.2)^2 + 0 + (0.2)^2) / 3
        assert!((corr_variance(&c) - 0.08 / 3.0).abs() < 1e-15);
        assert!((corr_variance(&c) - 0.02667).abs() < 1e-5);

        let id = CorrelationMatrix::from_rows(
            names(3),
            CorrKind::Plain,
            vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
        )
        .unwrap();
        assert_eq!(mean_correlation(&id), 0.0);
        assert_eq!(corr_variance(&id), 0.0);

        let half = CorrelationMatrix::from_rows(
            names(2),
            CorrKind::Plain,
            vec![vec![1.0, 0.5], vec![0.5, 1.0]],
        )
        .unwrap();
        assert_eq!(mean_correlation(&half), 0.5);
        assert_eq!(corr_variance(&half), 0.0);
    }

    #[test]
    fn json_shape() {
        let c = CorrelationMatrix::from_rows(
            names(2),
            CorrKind::Conditional,
            vec![vec![1.0, 0.5], vec![0.5, 1.0]],
        )
        .unwrap();
        let v = c.to_json();
        assert_eq!(v["kind"], "conditional");
        assert_eq!(v["names"][1], "E1");
        assert_eq!(v["rows"][0][1], 0.5);
        let mut buf = Vec::new();
        to_distance(&c).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(",E0,E1\nE0,0,1\n"));
    }

    fn series_strategy(len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-5.0f64..5.0, len)
    }

    proptest! {
        #[test]
        fn conditional_amplifies_without_flipping(x in series_strategy(24), y in series_strategy(24)) {
            let Ok(c) = conditional_parts(&x, &y) else { return Ok(()); };
            prop_assert!(c.value.abs() <= 1.0);
            prop_assert!(c.value.abs() >= c.r.abs());
            prop_assert!(c.r == 0.0 || c.value.signum() == c.r.signum());
            if c.beta == 0.0 {
                prop_assert_eq!(c.value, c.r);
            }
        }

        #[test]
        fn distance_round_trip(r in -1.0f64..=1.0) {
            let d = correlation_to_distance(r);
            prop_assert!((0.0..=2.0).contains(&d));
            prop_assert!((distance_to_correlation(d) - r).abs() < 1e-12);
        }

        #[test]
        fn distance_strictly_decreasing(a in -1.0f64..1.0, b in -1.0f64..1.0) {
            prop_assume!((a - b).abs() > 1e-9);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(correlation_to_distance(lo) > correlation_to_distance(hi));
        }

        #[test]
        fn permutation_equivariance(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 5;
            let cols: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..30).map(|_| rng.random::<f64>()).collect())
                .collect();
            let mut perm: Vec<usize> = (0..n).collect();
            for k in (1..n).rev() {
                perm.swap(k, rng.random_range(0..=k));
            }
            let permuted: Vec<Vec<f64>> = perm.iter().map(|&p| cols[p].clone()).collect();
            let pnames: Vec<String> = perm.iter().map(|&p| format!("E{p}")).collect();
            for kind in [CorrKind::Plain, CorrKind::Conditional] {
                let a = correlation_matrix_from_columns(&names(n), &cols, kind).unwrap();
                let b = correlation_matrix_from_columns(&pnames, &permuted, kind).unwrap();
                for i in 0..n {
                    for j in 0..n {
                        prop_assert_eq!(b.get(i, j), a.get(perm[i], perm[j]));
                    }
                }
                prop_assert!((mean_correlation(&a) - mean_correlation(&b)).abs() < 1e-12);
                prop_assert!((corr_variance(&a) - corr_variance(&b)).abs() < 1e-12);
            }
        }
    }
}
