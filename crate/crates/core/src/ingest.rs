//! Yield panel loading, sliding windows and per-series summary statistics.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;

/// Default number of consecutive missing cells tolerated per entity.
pub const DEFAULT_GAP_LIMIT: usize = 5;

/// Aligned multivariate yield series, one column per entity.
#[derive(Debug, Clone, PartialEq)]
pub struct YieldPanel {
    dates: Vec<NaiveDate>,
    names: Vec<String>,
    /// Column-major: `series[i][t]` is entity `i` at row `t`.
    series: Vec<Vec<f64>>,
}

impl YieldPanel {
    /// Builds a panel from complete columns, checking every invariant.
    pub fn new(dates: Vec<NaiveDate>, names: Vec<String>, series: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != series.len() {
            return Err(Error::Dimension(format!(
                "{} names but {} series",
                names.len(),
                series.len()
            )));
        }
        if dates.len() < 2 {
            return Err(Error::DataQuality(format!(
                "panel needs at least 2 dates, got {}",
                dates.len()
            )));
        }
        if let Some(w) = dates.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::DataQuality(format!(
                "dates not strictly increasing at {}",
                w[1]
            )));
        }
        check_unique_names(&names)?;
        for (name, col) in names.iter().zip(&series) {
            if col.len() != dates.len() {
                return Err(Error::Dimension(format!(
                    "series `{name}` has {} values for {} dates",
                    col.len(),
                    dates.len()
                )));
            }
            if let Some(t) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::DataQuality(format!(
                    "non-finite value for `{name}` at {}",
                    dates[t]
                )));
            }
        }
        Ok(Self {
            dates,
            names,
            series,
        })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n_entities(&self) -> usize {
        self.names.len()
    }

    pub fn n_rows(&self) -> usize {
        self.dates.len()
    }

    pub fn series(&self, entity: usize) -> &[f64] {
        &self.series[entity]
    }

    pub fn value(&self, row: usize, entity: usize) -> f64 {
        self.series[entity][row]
    }

    /// Restricts the panel to dates within `[from, to]` (either bound optional).
    pub fn slice_dates(&self, from: Option<NaiveDate>, to: Option<NaiveDate>) -> Result<Self> {
        let lo = from.map_or(0, |d| self.dates.partition_point(|x| *x < d));
        let hi = to.map_or(self.dates.len(), |d| {
            self.dates.partition_point(|x| *x <= d)
        });
        if hi <= lo {
            return Err(Error::DataQuality("date range selects no rows".into()));
        }
        Self::new(
            self.dates[lo..hi].to_vec(),
            self.names.clone(),
            self.series.iter().map(|s| s[lo..hi].to_vec()).collect(),
        )
    }
}

fn check_unique_names(names: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(Error::DataQuality(format!("duplicate entity label `{n}`")));
        }
    }
    Ok(())
}

/// Reads a wide CSV (`date,<name1>,<name2>,...`) from disk.
pub fn load_panel(path: impl AsRef<Path>, gap_limit: usize) -> Result<YieldPanel> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_panel(file, gap_limit)
}

/// Reads a wide yield CSV from any reader.
///
/// Rows are sorted by date. Rows where every entity is missing are dropped
/// (the date is absent for all entities); remaining missing cells are
/// forward-filled as long as no run exceeds `gap_limit`.
pub fn read_panel<R: Read>(reader: R, gap_limit: usize) -> Result<YieldPanel> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() || !headers[0].eq_ignore_ascii_case("date") {
        return Err(Error::Parse {
            row: 1,
            column: headers.get(0).unwrap_or("").to_string(),
            message: "first column must be `date`".into(),
        });
    }
    let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    if names.is_empty() {
        return Err(Error::DataQuality("no entity columns".into()));
    }
    check_unique_names(&names)?;

    let mut rows: Vec<(NaiveDate, Vec<Option<f64>>)> = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        // header is line 1
        let line = rec.position().map_or(k + 2, |p| p.line() as usize);
        if rec.len() != headers.len() {
            return Err(Error::Parse {
                row: line,
                column: "*".into(),
                message: format!("expected {} fields, found {}", headers.len(), rec.len()),
            });
        }
        let date = NaiveDate::parse_from_str(&rec[0], "%Y-%m-%d").map_err(|e| Error::Parse {
            row: line,
            column: "date".into(),
            message: format!("`{}`: {e}", &rec[0]),
        })?;
        let mut values = Vec::with_capacity(names.len());
        for (i, cell) in rec.iter().skip(1).enumerate() {
            if cell.is_empty() {
                values.push(None);
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row: line,
                column: names[i].clone(),
                message: format!("`{cell}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row: line,
                    column: names[i].clone(),
                    message: format!("`{cell}` is not finite"),
                });
            }
            values.push(Some(v));
        }
        rows.push((date, values));
    }

    rows.sort_by_key(|(d, _)| *d);
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::DataQuality(format!("duplicate date {}", w[0].0)));
    }
    rows.retain(|(_, vals)| vals.iter().any(Option::is_some));

    let dates: Vec<NaiveDate> = rows.iter().map(|(d, _)| *d).collect();
    let mut series = Vec::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        let raw: Vec<Option<f64>> = rows.iter().map(|(_, v)| v[i]).collect();
        series.push(forward_fill(name, &dates, &raw, gap_limit)?);
    }
    YieldPanel::new(dates, names, series)
}

/// Forward-fills missing cells. A leading missing value or a run longer than
/// `gap_limit` is an error.
pub fn forward_fill(
    name: &str,
    dates: &[NaiveDate],
    raw: &[Option<f64>],
    gap_limit: usize,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(raw.len());
    let mut last: Option<f64> = None;
    let mut run_start = 0;
    let mut run = 0usize;
    for (t, cell) in raw.iter().enumerate() {
        match cell {
            Some(v) => {
                run = 0;
                last = Some(*v);
                out.push(*v);
            }
            None => {
                let Some(prev) = last else {
                    return Err(Error::DataQuality(format!(
                        "entity `{name}` has no value on the first date {}",
                        dates[0]
                    )));
                };
                if run == 0 {
                    run_start = t;
                }
                run += 1;
                if run > gap_limit {
                    // report the full run
                    let end = raw[t..]
                        .iter()
                        .position(Option::is_some)
                        .map_or(raw.len() - 1, |k| t + k - 1);
                    return Err(Error::GapTooLong {
                        entity: name.to_string(),
                        from: dates[run_start],
                        to: dates[end],
                        count: end - run_start + 1,
                        limit: gap_limit,
                    });
                }
                out.push(prev);
            }
        }
    }
    Ok(out)
}

/// Sliding-window protocol: `length` rows, advanced by `displacement` rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub length: usize,
    pub displacement: usize,
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self {
            length: 120,
            displacement: 10,
        }
    }
}

impl WindowSpec {
    pub fn new(length: usize, displacement: usize) -> Result<Self> {
        if length == 0 {
            return Err(Error::InvalidWindow("length must be at least 1".into()));
        }
        if displacement == 0 {
            return Err(Error::InvalidWindow(
                "displacement must be at least 1".into(),
            ));
        }
        Ok(Self {
            length,
            displacement,
        })
    }

    /// Number of windows that fit in `rows` rows.
    pub fn count(&self, rows: usize) -> usize {
        if self.length > rows || self.length == 0 || self.displacement == 0 {
            0
        } else {
            (rows - self.length) / self.displacement + 1
        }
    }
}

/// A borrowed view of consecutive panel rows.
#[derive(Debug, Clone)]
pub struct Window<'a> {
    pub index: usize,
    pub start_row: usize,
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    pub names: &'a [String],
    pub columns: Vec<&'a [f64]>,
}

impl Window<'_> {
    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, |c| c.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Splits `panel` into windows `[k*displacement, k*displacement + length)`,
/// keeping only windows that fit entirely.
pub fn windows<'a>(panel: &'a YieldPanel, spec: WindowSpec) -> Result<Vec<Window<'a>>> {
    if spec.length == 0 || spec.displacement == 0 {
        return Err(Error::InvalidWindow(format!("{spec:?}")));
    }
    let rows = panel.n_rows();
    if spec.length > rows {
        return Err(Error::EmptyWindows {
            length: spec.length,
            available: rows,
        });
    }
    Ok((0..spec.count(rows))
        .map(|k| {
            let start = k * spec.displacement;
            let end = start + spec.length;
            Window {
                index: k,
                start_row: start,
                start_date: panel.dates[start],
                end_date: panel.dates[end - 1],
                names: &panel.names,
                columns: panel.series.iter().map(|s| &s[start..end]).collect(),
            }
        })
        .collect())
}

/// Per-series summary statistics in table column order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub ac1: f64,
    pub ac2_1: f64,
}

pub const SUMMARY_HEADER: [&str; 9] = [
    "name", "min", "max", "mean", "variance", "skewness", "kurtosis", "ac1", "ac2_1",
];

/// Moments of the level series plus lag-1 autocorrelations of the first
/// differences and of the squared first differences.
///
/// Variance is 1/T; kurtosis is non-excess (`m4 / m2^2`).
/// Level moments of a series: extremes, mean, population variance,
/// skewness and (non-excess) kurtosis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

pub fn moments(series: &[f64]) -> Result<Moments> {
    if series.len() < 3 {
        return Err(Error::UndefinedMoments(format!(
            "need at least 3 observations, got {}",
            series.len()
        )));
    }
    let n = series.len() as f64;
    let mean = stats::mean(series);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for x in series {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if m2 == 0.0 {
        return Err(Error::UndefinedMoments("series has zero variance".into()));
    }
    let min = series.iter().copied().fold(f64::INFINITY, f64::min);
    let max = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Moments {
        min,
        max,
        mean: mean.clamp(min, max),
        variance: m2,
        skewness: m3 / m2.powf(1.5),
        kurtosis: m4 / (m2 * m2),
    })
}

pub fn summary_stats(series: &[f64]) -> Result<SummaryRow> {
    let m = moments(series)?;
    Ok(SummaryRow {
        min: m.min,
        max: m.max,
        mean: m.mean,
        variance: m.variance,
        skewness: m.skewness,
        kurtosis: m.kurtosis,
        ac1: ac1(series)?,
        ac2_1: ac2_1(series)?,
    })
}

fn differences(series: &[f64]) -> Vec<f64> {
    series.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Pearson correlation between `x[t]` and `x[t+1]`.
pub fn lag1_autocorrelation(x: &[f64]) -> Result<f64> {
    if x.len() < 3 {
        return Err(Error::UndefinedMoments(
            "lag-1 autocorrelation needs at least 3 values".into(),
        ));
    }
    let r = stats::pearson_raw(&x[..x.len() - 1], &x[1..])
        .ok_or_else(|| Error::UndefinedMoments("lagged series has zero variance".into()))?;
    Ok(r.clamp(-1.0, 1.0))
}

/// Lag-1 autocorrelation of the first-differenced series.
pub fn ac1(series: &[f64]) -> Result<f64> {
    lag1_autocorrelation(&differences(series))
}

/// Lag-1 autocorrelation of the squared first differences.
pub fn ac2_1(series: &[f64]) -> Result<f64> {
    let sq: Vec<f64> = differences(series).into_iter().map(|d| d * d).collect();
    lag1_autocorrelation(&sq)
}

/// One summary row per entity, in panel column order.
pub fn panel_summary(panel: &YieldPanel) -> Result<Vec<(String, SummaryRow)>> {
    panel
        .names
        .iter()
        .zip(&panel.series)
        .map(|(name, s)| {
            summary_stats(s)
                .map(|row| (name.clone(), row))
                .map_err(|e| Error::UndefinedMoments(format!("`{name}`: {e}")))
        })
        .collect()
}

/// Writes summary rows as CSV with the column order of [`SUMMARY_HEADER`].
pub fn write_summary_csv<W: std::io::Write>(w: W, rows: &[(String, SummaryRow)]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(SUMMARY_HEADER)?;
    for (name, r) in rows {
        wtr.write_record([
            name.clone(),
            r.min.to_string(),
            r.max.to_string(),
            r.mean.to_string(),
            r.variance.to_string(),
            r.skewness.to_string(),
            r.kurtosis.to_string(),
            r.ac1.to_string(),
            r.ac2_1.to_string(),
        ])?;
    }
    wtr.flush().map_err(|source| Error::Io {
        path: "<summary>".into(),
        source,
    })?;
    Ok(())
}
