use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("parse error at row {row}, column `{column}`: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("data quality: {0}")]
    DataQuality(String),

    #[error("entity `{entity}` has {count} consecutive missing values ({from} to {to}), limit is {limit}")]
    GapTooLong {
        entity: String,
        from: NaiveDate,
        to: NaiveDate,
        count: usize,
        limit: usize,
    },

    #[error("window length {length} exceeds panel length {available}")]
    EmptyWindows { length: usize, available: usize },

    #[error("invalid window spec: {0}")]
    InvalidWindow(String),

    #[error("moments undefined: {0}")]
    UndefinedMoments(String),

    #[error("series `{entity}` is constant{}", window_suffix(.window_end))]
    ConstantSeries {
        entity: String,
        window_end: Option<NaiveDate>,
    },

    #[error("zero variance in input")]
    ZeroVariance,

    #[error("degenerate subgroup: {0}")]
    DegenerateSubgroup(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("method error: {0}")]
    Method(String),

    #[error("empty network: no edges")]
    EmptyNetwork,

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("ERGM spec error: {0}")]
    Spec(String),

    #[error("attribute error: {0}")]
    Attribute(String),

    #[error("fit did not converge: {0}")]
    NotConverged(String),

    #[error("model fit undefined: null log-likelihood is zero")]
    UndefinedFit,

    #[error("window ending {window_end}: {source}")]
    InWindow {
        window_end: NaiveDate,
        #[source]
        source: Box<Error>,
    },
}

fn window_suffix(end: &Option<NaiveDate>) -> String {
    match end {
        Some(d) => format!(" in window ending {d}"),
        None => String::new(),
    }
}

impl Error {
    /// Wraps `self` with the end date of the window it occurred in.
    pub fn in_window(self, window_end: NaiveDate) -> Self {
        match self {
            Error::ConstantSeries { entity, .. } => Error::ConstantSeries {
                entity,
                window_end: Some(window_end),
            },
            e @ Error::InWindow { .. } => e,
            other => Error::InWindow {
                window_end,
                source: Box::new(other),
            },
        }
    }

    /// True for errors caused by the input data rather than numerics.
    pub fn is_data_error(&self) -> bool {
        match self {
            Error::NotConverged(_) | Error::Numerical(_) => false,
            Error::InWindow { source, .. } => source.is_data_error(),
            _ => true,
        }
    }
}
