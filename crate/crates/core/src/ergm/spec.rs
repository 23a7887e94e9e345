use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::FilteredNetwork;

use super::attributes::{attr_kind, AttrKind, NodeAttributes};

/// One sufficient statistic of a dyad-independent ERGM.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    Edges,
    /// Binary attribute main effect, `x_i + x_j` per edge.
    NodeFactor(String),
    /// Continuous attribute main effect, `c_i + c_j` per edge.
    NodeCov(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Edges => f.write_str("edges"),
            Term::NodeFactor(a) => write!(f, "nodefactor.{a}"),
            Term::NodeCov(a) => write!(f, "nodecov.{a}"),
        }
    }
}

impl FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "edges" {
            return Ok(Term::Edges);
        }
        match s.split_once('.') {
            Some(("nodefactor", a)) => Ok(Term::NodeFactor(a.to_string())),
            Some(("nodecov", a)) => Ok(Term::NodeCov(a.to_string())),
            _ => Err(Error::Spec(format!("cannot parse term `{s}`"))),
        }
    }
}

impl Term {
    /// Human-readable label for report tables.
    pub fn label(&self) -> String {
        match self {
            Term::Edges => "Edges".into(),
            Term::NodeFactor(a) | Term::NodeCov(a) => match a.as_str() {
                "giips" => "GIIPS".into(),
                "abfn" => "ABFN".into(),
                "euro" => "Euro".into(),
                "covid_deaths" => "COVID-19 Deaths".into(),
                "debt_to_gdp" => "Debt to GDP".into(),
                "inflation" => "Inflation".into(),
                "account_balance" => "Account Balance".into(),
                other => other.into(),
            },
        }
    }
}

/// Ordered list of model statistics; contains `edges` exactly once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErgmSpec {
    terms: Vec<Term>,
}

impl ErgmSpec {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        let edges = terms.iter().filter(|t| **t == Term::Edges).count();
        if edges != 1 {
            return Err(Error::Spec(format!(
                "edges term must appear exactly once, found {edges}"
            )));
        }
        for t in &terms {
            match t {
                Term::Edges => {}
                Term::NodeFactor(a) => match attr_kind(a) {
                    Some(AttrKind::Binary) => {}
                    Some(AttrKind::Continuous) => {
                        return Err(Error::Spec(format!(
                            "nodefactor needs a binary attribute, `{a}` is continuous"
                        )))
                    }
                    None => return Err(Error::Spec(format!("unknown attribute `{a}`"))),
                },
                Term::NodeCov(a) => {
                    if attr_kind(a).is_none() {
                        return Err(Error::Spec(format!("unknown attribute `{a}`")));
                    }
                }
            }
        }
        for (k, t) in terms.iter().enumerate() {
            if terms[..k].contains(t) {
                return Err(Error::Spec(format!("duplicate term `{t}`")));
            }
        }
        Ok(Self { terms })
    }

    pub fn edges_only() -> Self {
        Self {
            terms: vec![Term::Edges],
        }
    }

    /// Edges, three group factors and four economic/health covariates.
    pub fn economic() -> Self {
        let mut terms = vec![Term::Edges];
        for a in ["giips", "abfn", "euro"] {
            terms.push(Term::NodeFactor(a.into()));
        }
        for a in [
            "covid_deaths",
            "debt_to_gdp",
            "inflation",
            "account_balance",
        ] {
            terms.push(Term::NodeCov(a.into()));
        }
        Self { terms }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.terms.iter().map(Term::to_string).collect()
    }

    pub fn edges_index(&self) -> usize {
        self.terms.iter().position(|t| *t == Term::Edges).unwrap()
    }
}

/// Per-node values feeding each term (`None` for the edges term).
fn term_columns(spec: &ErgmSpec, attrs: &NodeAttributes) -> Result<Vec<Option<Vec<f64>>>> {
    spec.terms()
        .iter()
        .map(|t| match t {
            Term::Edges => Ok(None),
            Term::NodeFactor(a) | Term::NodeCov(a) => attrs.column(a).map(Some),
        })
        .collect()
}

fn dyad_row(cols: &[Option<Vec<f64>>], i: usize, j: usize) -> Vec<f64> {
    cols.iter()
        .map(|c| match c {
            None => 1.0,
            Some(v) => v[i] + v[j],
        })
        .collect()
}

/// Change statistics of every dyad `(i, j)`, `i < j`, in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadDesign {
    pub n_nodes: usize,
    pub dyads: Vec<(usize, usize)>,
    /// `rows[d]` is the change-statistic vector of dyad `d`.
    pub rows: Vec<Vec<f64>>,
}

impl DyadDesign {
    /// `attrs` must already be aligned to node order.
    pub fn new(attrs: &NodeAttributes, spec: &ErgmSpec) -> Result<Self> {
        let n = attrs.len();
        let cols = term_columns(spec, attrs)?;
        let mut dyads = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        let mut rows = Vec::with_capacity(dyads.capacity());
        for i in 0..n {
            for j in (i + 1)..n {
                dyads.push((i, j));
                rows.push(dyad_row(&cols, i, j));
            }
        }
        Ok(Self {
            n_nodes: n,
            dyads,
            rows,
        })
    }

    pub fn n_dyads(&self) -> usize {
        self.dyads.len()
    }

    pub fn dyad_index(&self, i: usize, j: usize) -> usize {
        let (i, j) = (i.min(j), i.max(j));
        let n = self.n_nodes;
        i * (2 * n - i - 1) / 2 + (j - i - 1)
    }

    /// 0/1 indicator of each dyad in `g`.
    pub fn response(&self, g: &FilteredNetwork) -> Vec<f64> {
        let mut y = vec![0.0; self.n_dyads()];
        for e in g.edges() {
            y[self.dyad_index(e.i, e.j)] = 1.0;
        }
        y
    }
}

fn aligned(g: &FilteredNetwork, attrs: &NodeAttributes) -> Result<NodeAttributes> {
    attrs.align(g.names())
}

/// Gain in each statistic from adding dyad `(i, j)` to `g`.
pub fn change_stats(
    g: &FilteredNetwork,
    attrs: &NodeAttributes,
    spec: &ErgmSpec,
    dyad: (usize, usize),
) -> Result<Vec<f64>> {
    let (i, j) = dyad;
    if i >= j || j >= g.n() {
        return Err(Error::Spec(format!("invalid dyad ({i}, {j})")));
    }
    let attrs = aligned(g, attrs)?;
    let cols = term_columns(spec, &attrs)?;
    Ok(dyad_row(&cols, i, j))
}

/// Statistics of the whole network: sum of change statistics over edges.
pub fn global_stats(
    g: &FilteredNetwork,
    attrs: &NodeAttributes,
    spec: &ErgmSpec,
) -> Result<Vec<f64>> {
    let attrs = aligned(g, attrs)?;
    let cols = term_columns(spec, &attrs)?;
    let mut z = vec![0.0; spec.len()];
    for e in g.edges() {
        for (acc, v) in z.iter_mut().zip(dyad_row(&cols, e.i, e.j)) {
            *acc += v;
        }
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::Method;

    fn table_graph(pairs: &[(&str, &str)]) -> FilteredNetwork {
        let t = NodeAttributes::table_2020();
        let names: Vec<String> = t.nodes().iter().map(|r| r.name.clone()).collect();
        let idx = |s: &str| names.iter().position(|n| n == s).unwrap();
        let pairs: Vec<_> = pairs.iter().map(|(a, b)| (idx(a), idx(b))).collect();
        FilteredNetwork::from_pairs(names, Method::Mst, &pairs).unwrap()
    }

    #[test]
    fn change_stat_examples() {
        let t = NodeAttributes::table_2020();
        let g = table_graph(&[]);
        let spec = ErgmSpec::new(vec![
            Term::Edges,
            Term::NodeFactor("giips".into()),
            Term::NodeCov("debt_to_gdp".into()),
        ])
        .unwrap();
        let names = g.names();
        let idx = |s: &str| names.iter().position(|n| n == s).unwrap();
        let (it, es) = (idx("Italy"), idx("Spain"));
        let cs = change_stats(&g, &t, &spec, (it.min(es), it.max(es))).unwrap();
        assert_eq!(cs[0], 1.0);
        assert_eq!(cs[1], 2.0);
        let cs = change_stats(&g, &t, &spec, (idx("Austria"), idx("Belgium"))).unwrap();
        assert!((cs[2] - 201.40).abs() < 1e-9);
        assert!(change_stats(&g, &t, &spec, (3, 3)).is_err());
    }

    #[test]
    fn global_stat_examples() {
        let t = NodeAttributes::table_2020();
        let spec = ErgmSpec::economic();
        let empty = table_graph(&[]);
        assert_eq!(global_stats(&empty, &t, &spec).unwrap(), vec![0.0; 8]);

        let one = table_graph(&[("Austria", "Belgium")]);
        assert_eq!(
            global_stats(&one, &t, &spec).unwrap(),
            change_stats(&one, &t, &spec, (0, 1)).unwrap()
        );

        let star: Vec<(&str, &str)> = t.nodes()[1..]
            .iter()
            .map(|r| ("Austria", r.name.as_str()))
            .collect();
        let tree = table_graph(&star);
        assert_eq!(global_stats(&tree, &t, &spec).unwrap()[0], 16.0);
    }

    #[test]
    fn spec_validation() {
        assert!(ErgmSpec::new(vec![]).is_err());
        assert!(ErgmSpec::new(vec![Term::Edges, Term::Edges]).is_err());
        assert!(ErgmSpec::new(vec![Term::Edges, Term::NodeCov("gdp".into())]).is_err());
        assert!(ErgmSpec::new(vec![Term::Edges, Term::NodeFactor("inflation".into())]).is_err());
        assert_eq!(ErgmSpec::economic().len(), 8);
        let parsed: Vec<Term> = ErgmSpec::economic()
            .names()
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        assert_eq!(ErgmSpec::new(parsed).unwrap(), ErgmSpec::economic());
    }

    #[test]
    fn dyad_index_is_row_major_upper_triangle() {
        let t = NodeAttributes::table_2020();
        let d = DyadDesign::new(&t, &ErgmSpec::edges_only()).unwrap();
        assert_eq!(d.n_dyads(), 136);
        for (k, &(i, j)) in d.dyads.iter().enumerate() {
            assert_eq!(d.dyad_index(i, j), k);
            assert_eq!(d.dyad_index(j, i), k);
        }
    }
}
