//! Metropolis-Hastings sampling of networks by single-dyad toggles, and
//! simulation-based goodness of fit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::FilteredNetwork;

use super::attributes::NodeAttributes;
use super::fit::ErgmFit;
use super::spec::{global_stats, DyadDesign, ErgmSpec};

/// Sampler settings. `burn_in` and `thin` count toggle proposals and default
/// to `10 D` and `D` for `D` dyads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub n_networks: usize,
    pub burn_in: Option<usize>,
    pub thin: Option<usize>,
    pub seed: u64,
    pub keep_networks: bool,
}

impl SimulationConfig {
    pub fn new(n_networks: usize, seed: u64) -> Self {
        Self {
            n_networks,
            burn_in: None,
            thin: None,
            seed,
            keep_networks: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub terms: Vec<String>,
    /// Edge lists of the sampled networks (empty when not kept).
    pub networks: Vec<Vec<(usize, usize)>>,
    /// `stats[s]` is the statistic vector of sample `s`.
    pub stats: Vec<Vec<f64>>,
    pub acceptance_rate: f64,
}

impl Simulation {
    pub fn mean(&self) -> Vec<f64> {
        let p = self.terms.len();
        let n = self.stats.len() as f64;
        (0..p)
            .map(|k| self.stats.iter().map(|s| s[k]).sum::<f64>() / n)
            .collect()
    }

    pub fn sd(&self) -> Vec<f64> {
        let mean = self.mean();
        let n = self.stats.len() as f64;
        mean.iter()
            .enumerate()
            .map(|(k, m)| {
                let ss: f64 = self.stats.iter().map(|s| (s[k] - m).powi(2)).sum();
                (ss / (n - 1.0).max(1.0)).sqrt()
            })
            .collect()
    }

    /// Monte Carlo standard error of each mean by non-overlapping batch
    /// means, which absorbs the chain's autocorrelation.
    pub fn mc_std_err(&self) -> Vec<f64> {
        (0..self.terms.len())
            .map(|k| {
                let xs: Vec<f64> = self.stats.iter().map(|s| s[k]).collect();
                batch_means_se(&xs)
            })
            .collect()
    }
}

/// Batch-means standard error with about `sqrt(N)` batches.
pub fn batch_means_se(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 4 {
        return f64::NAN;
    }
    let batches = (n as f64).sqrt().floor() as usize;
    let size = n / batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| xs[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let grand = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (batches as f64 - 1.0);
    (var / batches as f64).sqrt()
}

/// Samples networks on the nodes of `attrs` from the ERGM with coefficients
/// `theta`, starting from the empty graph. The same seed always yields the
/// same sequence.
pub fn simulate(
    theta: &[f64],
    attrs: &NodeAttributes,
    spec: &ErgmSpec,
    config: SimulationConfig,
) -> Result<Simulation> {
    if config.n_networks == 0 {
        return Err(Error::Spec("n_networks must be at least 1".into()));
    }
    if theta.len() != spec.len() {
        return Err(Error::Dimension(format!(
            "{} coefficients for {} terms",
            theta.len(),
            spec.len()
        )));
    }
    let design = DyadDesign::new(attrs, spec)?;
    let dyads = design.n_dyads();
    if dyads == 0 {
        return Err(Error::Spec("need at least 2 nodes".into()));
    }
    let p = spec.len();
    let log_odds: Vec<f64> = design
        .rows
        .iter()
        .map(|r| r.iter().zip(theta).map(|(x, t)| x * t).sum())
        .collect();
    let burn_in = config.burn_in.unwrap_or(10 * dyads);
    let thin = config.thin.unwrap_or(dyads).max(1);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut present = vec![false; dyads];
    let mut accepted = 0usize;
    let mut proposals = 0usize;
    let mut step = |present: &mut [bool], rng: &mut ChaCha8Rng| {
        let d = rng.random_range(0..dyads);
        let delta = if present[d] {
            -log_odds[d]
        } else {
            log_odds[d]
        };
        let u: f64 = rng.random();
        proposals += 1;
        if delta >= 0.0 || u < delta.exp() {
            present[d] = !present[d];
            accepted += 1;
        }
    };
    for _ in 0..burn_in {
        step(&mut present, &mut rng);
    }
    let mut stats = Vec::with_capacity(config.n_networks);
    let mut networks = Vec::new();
    for _ in 0..config.n_networks {
        for _ in 0..thin {
            step(&mut present, &mut rng);
        }
        let mut z = vec![0.0; p];
        for (d, _) in present.iter().enumerate().filter(|(_, on)| **on) {
            for (acc, x) in z.iter_mut().zip(&design.rows[d]) {
                *acc += x;
            }
        }
        stats.push(z);
        if config.keep_networks {
            networks.push(
                present
                    .iter()
                    .enumerate()
                    .filter(|(_, on)| **on)
                    .map(|(d, _)| design.dyads[d])
                    .collect(),
            );
        }
    }
    Ok(Simulation {
        terms: spec.names(),
        networks,
        stats,
        acceptance_rate: accepted as f64 / proposals.max(1) as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofRow {
    pub term: String,
    pub observed: f64,
    pub simulated_mean: f64,
    pub simulated_sd: f64,
    pub mc_std_err: f64,
    pub z_score: f64,
}

/// Compares observed statistics with their simulated means at the fitted
/// coefficients. At the MLE these agree up to Monte Carlo error.
pub fn gof(
    g: &FilteredNetwork,
    attrs: &NodeAttributes,
    spec: &ErgmSpec,
    fit: &ErgmFit,
    config: SimulationConfig,
) -> Result<Vec<GofRow>> {
    if !fit.converged {
        return Err(Error::NotConverged(
            "goodness of fit needs a converged fit".into(),
        ));
    }
    if fit.spec != spec.names() {
        return Err(Error::Spec("fit was produced for a different spec".into()));
    }
    let attrs = attrs.align(g.names())?;
    let observed = global_stats(g, &attrs, spec)?;
    let sim = simulate(
        &fit.theta,
        &attrs,
        spec,
        SimulationConfig {
            keep_networks: false,
            ..config
        },
    )?;
    let (mean, sd, se) = (sim.mean(), sim.sd(), sim.mc_std_err());
    Ok(spec
        .names()
        .into_iter()
        .enumerate()
        .map(|(k, term)| GofRow {
            term,
            observed: observed[k],
            simulated_mean: mean[k],
            simulated_sd: sd[k],
            mc_std_err: se[k],
            z_score: (mean[k] - observed[k]) / se[k],
        })
        .collect())
}
