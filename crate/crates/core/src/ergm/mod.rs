//! Exponential random graph models with dyad-independent statistics: edge
//! count, binary group main effects and continuous nodal covariates.

mod attributes;
mod fit;
mod simulate;
mod spec;

pub use attributes::{
    attr_kind, load_attributes, read_attributes, AttrKind, CovidScale, NodeAttributes, NodeRecord,
    BINARY_ATTRS, CONTINUOUS_ATTRS,
};
pub use fit::{
    diagnostics, fit_mple, information_criteria, null_log_likelihood, significance_stars,
    Diagnostics, ErgmFit, MAX_ITERATIONS,
};
pub use simulate::{batch_means_se, gof, simulate, GofRow, Simulation, SimulationConfig};
pub use spec::{change_stats, global_stats, DyadDesign, ErgmSpec, Term};
