//! Maximum pseudo-likelihood fitting. For dyad-independent statistics the
//! pseudo-likelihood is the exact likelihood, so this is the MLE.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::filter::FilteredNetwork;

use super::attributes::NodeAttributes;
use super::spec::{DyadDesign, ErgmSpec};

pub const MAX_ITERATIONS: usize = 100;
const STEP_TOLERANCE: f64 = 1e-10;
const SATURATION: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgmFit {
    pub spec: Vec<String>,
    pub theta: Vec<f64>,
    pub std_err: Vec<f64>,
    pub p_values: Vec<f64>,
    pub stars: Vec<String>,
    pub ll_model: f64,
    pub ll_null: f64,
    pub aic: f64,
    pub bic: f64,
    pub model_fit_pct: f64,
    pub converged: bool,
    pub iterations: usize,
    pub n_nodes: usize,
    pub n_dyads: usize,
    pub n_edges: usize,
    pub ridge: f64,
}

/// Information criteria and relative likelihood gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub aic: f64,
    pub bic: f64,
    pub model_fit_pct: f64,
}

/// AIC `2p - 2LL`, BIC `p ln(D) - 2LL` over `D` dyads, and model fit
/// `100 (1 - LL / LL0)`.
pub fn information_criteria(
    ll_model: f64,
    ll_null: f64,
    p: usize,
    n_dyads: usize,
) -> Result<Diagnostics> {
    if ll_null == 0.0 {
        return Err(Error::UndefinedFit);
    }
    let p = p as f64;
    Ok(Diagnostics {
        aic: 2.0 * p - 2.0 * ll_model,
        bic: (n_dyads as f64).ln() * p - 2.0 * ll_model,
        model_fit_pct: 100.0 * (1.0 - ll_model / ll_null),
    })
}

pub fn diagnostics(fit: &ErgmFit, p: usize) -> Result<Diagnostics> {
    information_criteria(fit.ll_model, fit.ll_null, p, fit.n_dyads)
}

/// Bernoulli log-likelihood of `m` edges among `dyads` dyads at the MLE
/// density.
pub fn null_log_likelihood(dyads: usize, m: usize) -> f64 {
    let xlogx = |k: usize| {
        if k == 0 {
            0.0
        } else {
            k as f64 * (k as f64 / dyads as f64).ln()
        }
    };
    xlogx(m) + xlogx(dyads - m)
}

pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn bernoulli_ll(x: &DMatrix<f64>, y: &DVector<f64>, theta: &DVector<f64>) -> f64 {
    let eta = x * theta;
    eta.iter()
        .zip(y.iter())
        .map(|(e, yy)| yy * e - softplus(*e))
        .sum()
}

pub(crate) struct Irls {
    pub theta: DVector<f64>,
    pub covariance: Option<DMatrix<f64>>,
    pub ll: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Newton-Raphson (IRLS) for logistic regression with an optional ridge
/// penalty on every coefficient.
pub(crate) fn irls(x: &DMatrix<f64>, y: &DVector<f64>, init: DVector<f64>, ridge: f64) -> Irls {
    let p = x.ncols();
    let penalised = |t: &DVector<f64>| bernoulli_ll(x, y, t) - 0.5 * ridge * t.norm_squared();
    let mut theta = init;
    let mut current = penalised(&theta);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let eta = x * &theta;
        let mu = eta.map(logistic);
        let w = mu.map(|m| m * (1.0 - m));
        let grad = x.transpose() * (y - &mu) - &theta * ridge;
        let mut info = x.transpose() * DMatrix::from_diagonal(&w) * x;
        for k in 0..p {
            info[(k, k)] += ridge;
        }
        let step = match info.clone().cholesky() {
            Some(ch) => ch.solve(&grad),
            None => match info.try_inverse() {
                Some(inv) => inv * &grad,
                None => break,
            },
        };
        if !step.iter().all(|s| s.is_finite()) {
            break;
        }
        // step halving guards against overshoot far from the optimum
        let mut scale = 1.0;
        let mut next = &theta + &step;
        let mut value = penalised(&next);
        while value < current - 1e-12 * current.abs().max(1.0) && scale > 1e-6 {
            scale *= 0.5;
            next = &theta + &step * scale;
            value = penalised(&next);
        }
        theta = next;
        current = value;
        // fitted probabilities pinned at 0 or 1 mean the optimum is at infinity
        let saturated = (x * &theta).iter().any(|e| e.abs() > SATURATION);
        if step.amax() < STEP_TOLERANCE && !saturated {
            converged = true;
            break;
        }
    }
    let eta = x * &theta;
    let w = eta.map(|e| {
        let m = logistic(e);
        m * (1.0 - m)
    });
    let mut info = x.transpose() * DMatrix::from_diagonal(&w) * x;
    for k in 0..p {
        info[(k, k)] += ridge;
    }
    Irls {
        ll: bernoulli_ll(x, y, &theta),
        covariance: info.try_inverse(),
        theta,
        converged,
        iterations,
    }
}

pub(crate) fn design_matrix(design: &DyadDesign) -> DMatrix<f64> {
    let p = design.rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(design.n_dyads(), p, |r, c| design.rows[r][c])
}

fn logit_density(m: usize, dyads: usize) -> f64 {
    let q = m as f64 / dyads as f64;
    (q / (1.0 - q)).ln()
}

/// Fits `spec` to `g` by logistic regression of dyad indicators on change
/// statistics. A fit that hits the iteration cap is returned with
/// `converged = false`.
pub fn fit_mple(
    g: &FilteredNetwork,
    attrs: &NodeAttributes,
    spec: &ErgmSpec,
    ridge: f64,
) -> Result<ErgmFit> {
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(Error::Spec(format!(
            "ridge must be a finite non-negative number, got {ridge}"
        )));
    }
    let attrs = attrs.align(g.names())?;
    let design = DyadDesign::new(&attrs, spec)?;
    let dyads = design.n_dyads();
    let m = g.edges().len();
    if m == 0 || m == dyads {
        return Err(Error::Spec(format!(
            "need at least one present and one absent dyad ({m} of {dyads} present)"
        )));
    }
    let y = DVector::from_vec(design.response(g));
    let x = design_matrix(&design);
    let p = spec.len();
    let rank = x.clone().svd(false, false).rank(1e-9 * x.amax().max(1.0));
    if rank < p {
        return Err(Error::Spec(format!(
            "model terms are collinear on these nodes (design rank {rank} < {p})"
        )));
    }
    let edges_col = spec.edges_index();

    let mut init = DVector::zeros(p);
    init[edges_col] = logit_density(m, dyads);
    let fit = irls(&x, &y, init, ridge);

    let null_x = DMatrix::from_element(dyads, 1, 1.0);
    let null_fit = irls(
        &null_x,
        &y,
        DVector::from_element(1, logit_density(m, dyads)),
        0.0,
    );
    let ll_null = if p == 1 { fit.ll } else { null_fit.ll };

    let std_err: Vec<f64> = match &fit.covariance {
        Some(cov) => (0..p).map(|k| cov[(k, k)].max(0.0).sqrt()).collect(),
        None => vec![f64::NAN; p],
    };
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let p_values: Vec<f64> = fit
        .theta
        .iter()
        .zip(&std_err)
        .map(|(t, se)| {
            if se.is_finite() && *se > 0.0 {
                2.0 * (1.0 - normal.cdf((t / se).abs()))
            } else {
                f64::NAN
            }
        })
        .collect();
    let stars = p_values
        .iter()
        .map(|p| significance_stars(*p).to_string())
        .collect();
    let diag = information_criteria(fit.ll, ll_null, p, dyads)?;
    Ok(ErgmFit {
        spec: spec.names(),
        theta: fit.theta.iter().copied().collect(),
        std_err,
        p_values,
        stars,
        ll_model: fit.ll,
        ll_null,
        aic: diag.aic,
        bic: diag.bic,
        model_fit_pct: diag.model_fit_pct,
        converged: fit.converged,
        iterations: fit.iterations,
        n_nodes: g.n(),
        n_dyads: dyads,
        n_edges: m,
        ridge,
    })
}

impl ErgmFit {
    /// JSON report with the stable field set used by the CLI.
    pub fn report_json(&self) -> serde_json::Value {
        serde_json::json!({
            "spec": self.spec,
            "theta": self.theta,
            "std_err": self.std_err,
            "p_values": self.p_values,
            "stars": self.stars,
            "ll_model": self.ll_model,
            "ll_null": self.ll_null,
            "aic": self.aic,
            "bic": self.bic,
            "model_fit_pct": self.model_fit_pct,
            "converged": self.converged,
        })
    }

    /// Coefficient table followed by the diagnostics block.
    pub fn table(&self, spec: &ErgmSpec, column: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<34}{:>14} {:>11} {:>9}",
            "Parameters", column, "Std.Err", "p"
        );
        for (k, term) in spec.terms().iter().enumerate() {
            let coef = format!("{:.2}{}", self.theta[k], self.stars[k]);
            let _ = writeln!(
                out,
                "{:<34}{:>14} {:>11.3} {:>9.4}",
                term.label(),
                coef,
                self.std_err[k],
                self.p_values[k]
            );
        }
        let _ = writeln!(out, "Diagnostics");
        let rows = [
            ("Goodness of Fit Test: AIC", format!("{:.2}", self.aic)),
            ("Goodness of Fit Test: BIC", format!("{:.2}", self.bic)),
            ("Log Likelihood (LL^M)", format!("{:.2}", self.ll_model)),
            ("Log Likelihood (LL^0)", format!("{:.2}", self.ll_null)),
            ("Model Fit", format!("{:.2}%", self.model_fit_pct)),
        ];
        for (label, v) in rows {
            let _ = writeln!(out, "{label:<34}{v:>14}");
        }
        if !self.converged {
            let _ = writeln!(
                out,
                "WARNING: estimation did not converge after {} iterations",
                self.iterations
            );
        }
        let _ = writeln!(out, "Signif. codes: *** p<0.001, ** p<0.01, * p<0.05");
        out
    }
}
