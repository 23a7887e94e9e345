//! Network filtering of a distance matrix: minimum and maximum spanning
//! trees, the asset graph, and the triangulated maximally filtered graph.
//!
//! All methods break weight ties by lexicographic `(i, j)` order so the
//! output is reproducible bit for bit.

mod planar;
mod tmfg;
mod union_find;

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::io::Write;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::correlation::DistanceMatrix;
use crate::error::{Error, Result};

pub use planar::verify_planar_embedding;
pub use tmfg::{tmfg, tmfg_construction, TmfgConstruction};
pub use union_find::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mst,
    Mast,
    Ag,
    Tmfg,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Mst, Method::Mast, Method::Ag, Method::Tmfg];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Mst => "mst",
            Method::Mast => "mast",
            Method::Ag => "ag",
            Method::Tmfg => "tmfg",
        }
    }

    /// Edge count the method produces on `n` nodes.
    pub fn edge_count(self, n: usize) -> usize {
        match self {
            Method::Mst | Method::Mast | Method::Ag => n.saturating_sub(1),
            Method::Tmfg => 3 * n.saturating_sub(2),
        }
    }

    pub fn apply(self, d: &DistanceMatrix) -> Result<FilteredNetwork> {
        match self {
            Method::Mst => mst(d),
            Method::Mast => mast(d),
            Method::Ag => asset_graph(d),
            Method::Tmfg => tmfg(d),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mst" => Ok(Method::Mst),
            "mast" => Ok(Method::Mast),
            "ag" => Ok(Method::Ag),
            "tmfg" => Ok(Method::Tmfg),
            other => Err(Error::Method(format!("unknown filtering method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Undirected weighted graph retained by a filtering method.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredNetwork {
    names: Vec<String>,
    method: Method,
    edges: Vec<Edge>,
}

impl FilteredNetwork {
    /// Edges are normalised to `i < j` and sorted; duplicates and self-loops
    /// are rejected.
    pub fn new(names: Vec<String>, method: Method, edges: Vec<Edge>) -> Result<Self> {
        let n = names.len();
        let mut norm: Vec<Edge> = edges
            .into_iter()
            .map(|e| Edge {
                i: e.i.min(e.j),
                j: e.i.max(e.j),
                weight: e.weight,
            })
            .collect();
        norm.sort_by_key(|e| (e.i, e.j));
        for e in &norm {
            if e.i == e.j || e.j >= n {
                return Err(Error::Method(format!("invalid edge ({}, {})", e.i, e.j)));
            }
        }
        if norm
            .windows(2)
            .any(|w| (w[0].i, w[0].j) == (w[1].i, w[1].j))
        {
            return Err(Error::Method("duplicate edge".into()));
        }
        Ok(Self {
            names,
            method,
            edges: norm,
        })
    }

    /// Convenience constructor for unweighted pairs (weight 1).
    pub fn from_pairs(
        names: Vec<String>,
        method: Method,
        pairs: &[(usize, usize)],
    ) -> Result<Self> {
        let edges = pairs
            .iter()
            .map(|&(i, j)| Edge { i, j, weight: 1.0 })
            .collect();
        Self::new(names, method, edges)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_pairs(&self) -> BTreeSet<(usize, usize)> {
        self.edges.iter().map(|e| (e.i, e.j)).collect()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        self.edges
            .binary_search_by(|e| (e.i, e.j).cmp(&key))
            .is_ok()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n()];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n()];
        for e in &self.edges {
            deg[e.i] += 1;
            deg[e.j] += 1;
        }
        deg
    }

    /// Hop distances from `source`; `None` for unreachable nodes.
    pub fn hops_from(&self, source: usize) -> Vec<Option<usize>> {
        hop_distances(&self.adjacency(), source)
    }

    pub fn is_connected(&self) -> bool {
        self.n() == 0 || self.hops_from(0).iter().all(Option::is_some)
    }

    pub fn is_spanning_tree(&self) -> bool {
        self.n() >= 1 && self.edges.len() + 1 == self.n() && self.is_connected()
    }

    /// Writes `source,target,distance,method,window_end` rows.
    pub fn write_edges_csv<W: Write>(&self, w: W, window_end: Option<NaiveDate>) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["source", "target", "distance", "method", "window_end"])?;
        let end = window_end.map(|d| d.to_string()).unwrap_or_default();
        for e in &self.edges {
            wtr.write_record([
                self.names[e.i].as_str(),
                self.names[e.j].as_str(),
                &e.weight.to_string(),
                self.method.as_str(),
                &end,
            ])?;
        }
        wtr.flush().map_err(|source| Error::Io {
            path: "<edges>".into(),
            source,
        })?;
        Ok(())
    }

    pub fn to_json(&self, window_end: Option<NaiveDate>) -> serde_json::Value {
        let edges: Vec<serde_json::Value> = self
            .edges
            .iter()
            .map(|e| {
                serde_json::json!({
                    "source": self.names[e.i],
                    "target": self.names[e.j],
                    "distance": e.weight,
                    "method": self.method,
                    "window_end": window_end,
                })
            })
            .collect();
        serde_json::json!({ "method": self.method, "window_end": window_end, "edges": edges })
    }
}

pub(crate) fn hop_distances(adj: &[Vec<usize>], source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let next = dist[v].map(|d| d + 1);
        for &w in &adj[v] {
            if dist[w].is_none() {
                dist[w] = next;
                queue.push_back(w);
            }
        }
    }
    dist
}

fn check_size(d: &DistanceMatrix, min: usize) -> Result<()> {
    if d.n() < min {
        return Err(Error::Dimension(format!(
            "need at least {min} nodes, got {}",
            d.n()
        )));
    }
    Ok(())
}

/// Upper-triangle edges sorted by weight (ascending or descending), then by
/// `(i, j)`.
fn sorted_edges(d: &DistanceMatrix, descending: bool) -> Vec<Edge> {
    let n = d.n();
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push(Edge {
                i,
                j,
                weight: d.get(i, j),
            });
        }
    }
    edges.sort_by(|a, b| {
        let by_weight = if descending {
            b.weight.total_cmp(&a.weight)
        } else {
            a.weight.total_cmp(&b.weight)
        };
        match by_weight {
            Ordering::Equal => (a.i, a.j).cmp(&(b.i, b.j)),
            other => other,
        }
    });
    edges
}

fn kruskal(d: &DistanceMatrix, method: Method, descending: bool) -> Result<FilteredNetwork> {
    check_size(d, 2)?;
    let n = d.n();
    let mut uf = UnionFind::new(n);
    let mut kept = Vec::with_capacity(n - 1);
    for e in sorted_edges(d, descending) {
        if uf.union(e.i, e.j) {
            kept.push(e);
            if kept.len() == n - 1 {
                break;
            }
        }
    }
    FilteredNetwork::new(d.names().to_vec(), method, kept)
}

/// Minimum spanning tree by Kruskal's algorithm.
pub fn mst(d: &DistanceMatrix) -> Result<FilteredNetwork> {
    kruskal(d, Method::Mst, false)
}

/// Maximum spanning tree (Kruskal on descending weights).
pub fn mast(d: &DistanceMatrix) -> Result<FilteredNetwork> {
    kruskal(d, Method::Mast, true)
}

/// The `n - 1` globally smallest distances. Connectivity is not enforced.
pub fn asset_graph(d: &DistanceMatrix) -> Result<FilteredNetwork> {
    check_size(d, 2)?;
    let n = d.n();
    let kept = sorted_edges(d, false).into_iter().take(n - 1).collect();
    FilteredNetwork::new(d.names().to_vec(), Method::Ag, kept)
}

/// Subdominant ultrametric of a spanning tree: the largest edge weight on the
/// tree path between each pair.
pub fn ultrametric(tree: &FilteredNetwork) -> Result<DistanceMatrix> {
    if !tree.is_spanning_tree() {
        return Err(Error::Method(format!(
            "ultrametric needs a spanning tree, got {} edges on {} nodes",
            tree.edges().len(),
            tree.n()
        )));
    }
    let n = tree.n();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for e in tree.edges() {
        adj[e.i].push((e.j, e.weight));
        adj[e.j].push((e.i, e.weight));
    }
    let mut rows = vec![vec![0.0; n]; n];
    for (s, row) in rows.iter_mut().enumerate() {
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut stack = vec![(s, 0.0f64)];
        while let Some((v, widest)) = stack.pop() {
            row[v] = widest;
            for &(w, weight) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push((w, widest.max(weight)));
                }
            }
        }
    }
    DistanceMatrix::from_rows(tree.names().to_vec(), rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use corrnet_testkit::spanning;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn k3() -> DistanceMatrix {
        // AB = 1, AC = 2, BC = 3
        DistanceMatrix::from_upper(3, &[1.0, 2.0, 3.0]).unwrap()
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DistanceMatrix {
        let upper: Vec<f64> = (0..n * (n - 1) / 2)
            .map(|_| rng.random::<f64>() * 2.0)
            .collect();
        DistanceMatrix::from_upper(n, &upper).unwrap()
    }

    #[test]
    fn k3_trees() {
        let t = mst(&k3()).unwrap();
        assert_eq!(t.edge_pairs(), BTreeSet::from([(0, 1), (0, 2)]));
        assert_eq!(t.total_weight(), 3.0);
        let t = mast(&k3()).unwrap();
        assert_eq!(t.edge_pairs(), BTreeSet::from([(0, 2), (1, 2)]));
        assert_eq!(t.total_weight(), 5.0);
        let g = asset_graph(&k3()).unwrap();
        assert_eq!(g.edge_pairs(), BTreeSet::from([(0, 1), (0, 2)]));
    }

    #[test]
    fn two_nodes() {
        let d = DistanceMatrix::from_upper(2, &[0.4]).unwrap();
        for m in [Method::Mst, Method::Mast, Method::Ag] {
            let g = m.apply(&d).unwrap();
            assert_eq!(g.edge_pairs(), BTreeSet::from([(0, 1)]));
        }
        assert!(tmfg(&d).is_err());
    }

    #[test]
    fn equal_weights_pick_lexicographic_star() {
        let d = DistanceMatrix::from_upper(5, &[1.0; 10]).unwrap();
        let expected: BTreeSet<_> = (1..5).map(|j| (0, j)).collect();
        assert_eq!(mast(&d).unwrap().edge_pairs(), expected);
        assert_eq!(mst(&d).unwrap().edge_pairs(), expected);
    }

    #[test]
    fn asset_graph_can_isolate_a_node() {
        // AB, AC, BC smallest; D far from everyone
        let d = DistanceMatrix::from_upper(4, &[0.1, 0.2, 1.5, 0.3, 1.6, 1.7]).unwrap();
        let g = asset_graph(&d).unwrap();
        assert_eq!(g.edge_pairs(), BTreeSet::from([(0, 1), (0, 2), (1, 2)]));
        assert_eq!(g.degrees()[3], 0);
        assert!(!g.is_connected());
    }

    #[test]
    fn seventeen_node_edge_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = random_matrix(&mut rng, 17);
        for m in Method::ALL {
            let g = m.apply(&d).unwrap();
            assert_eq!(g.edges().len(), m.edge_count(17), "{m}");
        }
        assert!(mst(&d).unwrap().is_spanning_tree());
        assert!(mast(&d).unwrap().is_spanning_tree());
    }

    #[test]
    fn ultrametric_examples() {
        // path A-B-C with weights 1, 2
        let path = FilteredNetwork::new(
            vec!["A".into(), "B".into(), "C".into()],
            Method::Mst,
            vec![
                Edge {
                    i: 0,
                    j: 1,
                    weight: 1.0,
                },
                Edge {
                    i: 1,
                    j: 2,
                    weight: 2.0,
                },
            ],
        )
        .unwrap();
        assert_eq!(ultrametric(&path).unwrap().get(0, 2), 2.0);
        let u = ultrametric(&mst(&k3()).unwrap()).unwrap();
        assert_eq!(u.get(1, 2), 2.0);
        assert_eq!(u.get(0, 1), 1.0);
    }

    #[test]
    fn ultrametric_rejects_non_tree() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = random_matrix(&mut rng, 6);
        assert!(matches!(
            ultrametric(&tmfg(&d).unwrap()),
            Err(Error::Method(_))
        ));
    }

    #[test]
    fn ultrametric_equals_minimax_closure() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let n = rng.random_range(2..10);
            let d = random_matrix(&mut rng, n);
            let u = ultrametric(&mst(&d).unwrap()).unwrap();
            let oracle = spanning::minimax_closure(d.rows());
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(u.get(i, j), oracle[i][j]);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn tree_weights_match_enumeration(seed in 0u64..10_000, n in 2usize..=6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = random_matrix(&mut rng, n);
            let (lo, hi) = spanning::extreme_tree_weights(d.rows());
            prop_assert!((mst(&d).unwrap().total_weight() - lo).abs() < 1e-12);
            prop_assert!((mast(&d).unwrap().total_weight() - hi).abs() < 1e-12);
            prop_assert!(asset_graph(&d).unwrap().total_weight() <= lo + 1e-12);
        }

        #[test]
        fn mst_mast_duality(seed in 0u64..10_000, n in 2usize..=9) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = random_matrix(&mut rng, n);
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for i in 0..n {
                for j in (i + 1)..n {
                    lo = lo.min(d.get(i, j));
                    hi = hi.max(d.get(i, j));
                }
            }
            let flipped = d.map_offdiag(|_, _, w| hi + lo - w).unwrap();
            prop_assert_eq!(mst(&d).unwrap().edge_pairs(), mast(&flipped).unwrap().edge_pairs());
        }

        #[test]
        fn constant_shift_preserves_edge_sets(seed in 0u64..10_000, n in 4usize..=9, shift in 0.0f64..3.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = random_matrix(&mut rng, n);
            let shifted = d.map_offdiag(|_, _, w| w + shift).unwrap();
            for m in Method::ALL {
                prop_assert_eq!(m.apply(&d).unwrap().edge_pairs(), m.apply(&shifted).unwrap().edge_pairs());
            }
        }

        #[test]
        fn ultrametric_inequality(seed in 0u64..10_000, n in 3usize..=10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = ultrametric(&mst(&random_matrix(&mut rng, n)).unwrap()).unwrap();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        prop_assert!(u.get(i, j) <= u.get(i, k).max(u.get(k, j)));
                    }
                }
            }
        }
    }
}
