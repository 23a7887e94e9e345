//! Statistics of filtered networks and the rolling-window driver.
//!
//! Path-based measures (betweenness, occupation layers, hop diameter) use the
//! unweighted topology; only the length measures read edge distances.

use std::collections::{BTreeSet, VecDeque};
use std::io::Write;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::{self, CorrKind};
use crate::error::{Error, Result};
use crate::filter::{FilteredNetwork, Method};
use crate::ingest::{self, Window, WindowSpec, YieldPanel};

/// Mean edge distance.
pub fn network_length(g: &FilteredNetwork) -> Result<f64> {
    if g.edges().is_empty() {
        return Err(Error::EmptyNetwork);
    }
    Ok(g.total_weight() / g.edges().len() as f64)
}

/// Population variance of edge distances.
pub fn network_length_var(g: &FilteredNetwork) -> Result<f64> {
    let mean = network_length(g)?;
    let ss: f64 = g.edges().iter().map(|e| (e.weight - mean).powi(2)).sum();
    Ok(ss / g.edges().len() as f64)
}

fn argmax_first<T: PartialOrd + Copy>(values: &[T], names: &[String]) -> usize {
    let mut best = 0;
    for k in 1..values.len() {
        let better =
            values[k] > values[best] || (values[k] == values[best] && names[k] < names[best]);
        if better {
            best = k;
        }
    }
    best
}

/// Largest degree and its node; ties go to the lexicographically smallest
/// label. Every edge counts, including zero-distance ones.
pub fn max_degree(g: &FilteredNetwork) -> (usize, String) {
    let deg = g.degrees();
    let k = argmax_first(&deg, g.names());
    (deg[k], g.names()[k].clone())
}

/// Shortest-path counts from `s` on the unweighted graph: BFS order,
/// distances, path counts and predecessor lists.
struct Bfs {
    order: Vec<usize>,
    dist: Vec<Option<usize>>,
    sigma: Vec<f64>,
    preds: Vec<Vec<usize>>,
}

fn bfs_counts(adj: &[Vec<usize>], s: usize) -> Bfs {
    let n = adj.len();
    let mut out = Bfs {
        order: Vec::with_capacity(n),
        dist: vec![None; n],
        sigma: vec![0.0; n],
        preds: vec![Vec::new(); n],
    };
    out.dist[s] = Some(0);
    out.sigma[s] = 1.0;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        out.order.push(v);
        let dv = out.dist[v].unwrap();
        for &w in &adj[v] {
            if out.dist[w].is_none() {
                out.dist[w] = Some(dv + 1);
                queue.push_back(w);
            }
            if out.dist[w] == Some(dv + 1) {
                out.sigma[w] += out.sigma[v];
                out.preds[w].push(v);
            }
        }
    }
    out
}

/// Betweenness summed over ordered pairs `(i, j)`, `i != j != k`, without
/// normalisation. Disconnected pairs contribute nothing.
pub fn betweenness(g: &FilteredNetwork) -> Vec<f64> {
    let adj = g.adjacency();
    let n = g.n();
    let mut score = vec![0.0; n];
    for s in 0..n {
        let bfs = bfs_counts(&adj, s);
        let mut delta = vec![0.0; n];
        for &w in bfs.order.iter().rev() {
            for &v in &bfs.preds[w] {
                delta[v] += bfs.sigma[v] / bfs.sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                score[w] += delta[w];
            }
        }
    }
    score
}

/// Betweenness from explicit pair dependencies `sigma_ik sigma_kj / sigma_ij`,
/// over unordered pairs `i < j` or all ordered pairs.
pub fn pair_betweenness(g: &FilteredNetwork, ordered: bool) -> Vec<f64> {
    let adj = g.adjacency();
    let n = g.n();
    let runs: Vec<Bfs> = (0..n).map(|s| bfs_counts(&adj, s)).collect();
    let mut score = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            if i == j || (!ordered && j < i) {
                continue;
            }
            let Some(dij) = runs[i].dist[j] else { continue };
            for (k, s) in score.iter_mut().enumerate() {
                if k == i || k == j {
                    continue;
                }
                if let (Some(dik), Some(dkj)) = (runs[i].dist[k], runs[k].dist[j]) {
                    if dik + dkj == dij {
                        *s += runs[i].sigma[k] * runs[k].sigma[j] / runs[i].sigma[j];
                    }
                }
            }
        }
    }
    score
}

/// Node of largest betweenness; ties go to the smallest label.
pub fn central_node(g: &FilteredNetwork) -> String {
    let b = betweenness(g);
    g.names()[argmax_first(&b, g.names())].clone()
}

/// Mean hop level relative to `central`, with the central node and nodes
/// unreachable from it at level 0.
pub fn mean_occupation_layer(g: &FilteredNetwork, central: &str) -> Result<f64> {
    let c = g
        .names()
        .iter()
        .position(|n| n == central)
        .ok_or_else(|| Error::UnknownNode(central.to_string()))?;
    let total: usize = g.hops_from(c).into_iter().flatten().sum();
    Ok(total as f64 / g.n() as f64)
}

/// Largest finite hop distance between any two nodes.
pub fn max_hop_distance(g: &FilteredNetwork) -> usize {
    let adj = g.adjacency();
    (0..g.n())
        .map(|s| {
            crate::filter::hop_distances(&adj, s)
                .into_iter()
                .flatten()
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkStats {
    pub method: Method,
    pub n_edges: usize,
    pub length: f64,
    pub length_var: f64,
    pub max_degree: usize,
    pub max_degree_node: String,
    pub central_node: String,
    pub mol: f64,
    pub names: Vec<String>,
    pub degrees: Vec<usize>,
    pub betweenness: Vec<f64>,
    pub connected: bool,
    /// Largest hop distance between connected pairs.
    pub max_hops: usize,
}

pub fn network_stats(g: &FilteredNetwork) -> Result<NetworkStats> {
    if g.n() < 2 {
        return Err(Error::Dimension(
            "network statistics need at least 2 nodes".into(),
        ));
    }
    let (max_degree, max_degree_node) = max_degree(g);
    let betweenness = betweenness(g);
    let central = g.names()[argmax_first(&betweenness, g.names())].clone();
    Ok(NetworkStats {
        method: g.method(),
        n_edges: g.edges().len(),
        length: network_length(g)?,
        length_var: network_length_var(g)?,
        max_degree,
        max_degree_node,
        mol: mean_occupation_layer(g, &central)?,
        central_node: central,
        names: g.names().to_vec(),
        degrees: g.degrees(),
        betweenness,
        connected: g.is_connected(),
        max_hops: max_hop_distance(g),
    })
}

/// Results for one window of a rolling run.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowResult {
    pub window_end: NaiveDate,
    pub mean_corr: f64,
    pub corr_var: f64,
    pub stats: Vec<NetworkStats>,
}

/// Correlation, distance, filtering and statistics for a single window.
pub fn evaluate_window(
    window: &Window<'_>,
    kind: CorrKind,
    methods: &[Method],
) -> Result<WindowResult> {
    let run = || -> Result<WindowResult> {
        let corr =
            correlation::correlation_matrix_from_columns(window.names, &window.columns, kind)?;
        let dist = correlation::to_distance(&corr);
        let stats = methods
            .iter()
            .map(|m| m.apply(&dist).and_then(|g| network_stats(&g)))
            .collect::<Result<Vec<_>>>()?;
        Ok(WindowResult {
            window_end: window.end_date,
            mean_corr: correlation::mean_correlation(&corr),
            corr_var: correlation::corr_variance(&corr),
            stats,
        })
    };
    run().map_err(|e| e.in_window(window.end_date))
}

/// Time series of correlation moments and network statistics, one row per
/// window.
#[derive(Debug, Clone, PartialEq)]
pub struct RollingSeries {
    pub methods: Vec<Method>,
    pub window_end: Vec<NaiveDate>,
    pub mean_corr: Vec<f64>,
    pub corr_var: Vec<f64>,
    /// `stats[k][w]` is method `methods[k]` at window `w`.
    pub stats: Vec<Vec<NetworkStats>>,
}

impl RollingSeries {
    pub fn len(&self) -> usize {
        self.window_end.len()
    }

    pub fn is_empty(&self) -> bool {
        self.window_end.is_empty()
    }

    pub fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = ["window_end", "mean_corr", "corr_var"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        for m in &self.methods {
            for col in ["length", "length_var", "max_degree", "central", "mol"] {
                h.push(format!("{m}_{col}"));
            }
        }
        h
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(self.header())?;
        for row in 0..self.len() {
            let mut rec = vec![
                self.window_end[row].to_string(),
                self.mean_corr[row].to_string(),
                self.corr_var[row].to_string(),
            ];
            for per_method in &self.stats {
                let s = &per_method[row];
                rec.push(s.length.to_string());
                rec.push(s.length_var.to_string());
                rec.push(s.max_degree.to_string());
                rec.push(s.central_node.clone());
                rec.push(s.mol.to_string());
            }
            wtr.write_record(&rec)?;
        }
        wtr.flush().map_err(|source| Error::Io {
            path: "<rolling>".into(),
            source,
        })?;
        Ok(())
    }
}

/// Deduplicated methods in canonical order (mst, mast, ag, tmfg).
pub fn canonical_methods(methods: &[Method]) -> Vec<Method> {
    methods
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Evaluates every window of `panel`. Windows run in parallel; the output
/// keeps window order and the first failing window (in date order) aborts
/// the run.
pub fn rolling_run(
    panel: &YieldPanel,
    spec: WindowSpec,
    kind: CorrKind,
    methods: &[Method],
) -> Result<RollingSeries> {
    let methods = canonical_methods(methods);
    if methods.is_empty() {
        return Err(Error::Method("no filtering methods requested".into()));
    }
    let windows = ingest::windows(panel, spec)?;
    let results: Vec<Result<WindowResult>> = windows
        .par_iter()
        .map(|w| evaluate_window(w, kind, &methods))
        .collect();
    let mut series = RollingSeries {
        methods: methods.clone(),
        window_end: Vec::with_capacity(results.len()),
        mean_corr: Vec::with_capacity(results.len()),
        corr_var: Vec::with_capacity(results.len()),
        stats: vec![Vec::with_capacity(results.len()); methods.len()],
    };
    for r in results {
        let r = r?;
        series.window_end.push(r.window_end);
        series.mean_corr.push(r.mean_corr);
        series.corr_var.push(r.corr_var);
        for (k, s) in r.stats.into_iter().enumerate() {
            series.stats[k].push(s);
        }
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::DistanceMatrix;
    use crate::filter::{tmfg, Edge};
    use corrnet_testkit::betweenness::ordered_pair_betweenness;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("N{i:02}")).collect()
    }

    fn graph(n: usize, pairs: &[(usize, usize)]) -> FilteredNetwork {
        FilteredNetwork::from_pairs(names(n), Method::Mst, pairs).unwrap()
    }

    fn weighted(ws: &[f64]) -> FilteredNetwork {
        let edges = ws
            .iter()
            .enumerate()
            .map(|(k, &w)| Edge {
                i: k,
                j: k + 1,
                weight: w,
            })
            .collect();
        FilteredNetwork::new(names(ws.len() + 1), Method::Mst, edges).unwrap()
    }

    fn star(n: usize) -> FilteredNetwork {
        let pairs: Vec<_> = (1..n).map(|j| (0, j)).collect();
        graph(n, &pairs)
    }

    fn path3() -> FilteredNetwork {
        FilteredNetwork::from_pairs(
            vec!["A".into(), "B".into(), "C".into()],
            Method::Mst,
            &[(0, 1), (1, 2)],
        )
        .unwrap()
    }

    fn k4() -> FilteredNetwork {
        graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    }

    #[test]
    fn lengths() {
        assert!((network_length(&weighted(&[0.3, 0.3, 0.3])).unwrap() - 0.3).abs() < 1e-15);
        let g = weighted(&[1.0, 1.2, 1.4]);
        assert!((network_length(&g).unwrap() - 1.2).abs() < 1e-12);
        assert!((network_length_var(&g).unwrap() - 0.08 / 3.0).abs() < 1e-12);
        assert_eq!(network_length(&weighted(&[0.7])).unwrap(), 0.7);
        assert_eq!(network_length_var(&weighted(&[0.5, 0.5])).unwrap(), 0.0);
        let empty = graph(3, &[]);
        assert!(matches!(network_length(&empty), Err(Error::EmptyNetwork)));
        assert!(matches!(
            network_length_var(&empty),
            Err(Error::EmptyNetwork)
        ));
    }

    #[test]
    fn degrees() {
        assert_eq!(max_degree(&star(17)), (16, "N00".to_string()));
        assert_eq!(max_degree(&path3()), (2, "B".to_string()));
        assert_eq!(max_degree(&k4()).0, 3);
        // zero-distance edges still count
        let g = weighted(&[0.0, 0.0]);
        assert_eq!(max_degree(&g).0, 2);
    }

    #[test]
    fn betweenness_examples() {
        assert_eq!(betweenness(&path3()), vec![0.0, 2.0, 0.0]);
        let b = betweenness(&star(9));
        assert_eq!(b[0], (8 * 7) as f64);
        assert!(b[1..].iter().all(|&x| x == 0.0));
        assert_eq!(betweenness(&k4()), vec![0.0; 4]);
    }

    #[test]
    fn central_node_examples() {
        assert_eq!(central_node(&star(6)), "N00");
        assert_eq!(central_node(&path3()), "B");
        assert_eq!(central_node(&k4()), "N00");
    }

    #[test]
    fn occupation_layer_examples() {
        let mol = mean_occupation_layer(&star(17), "N00").unwrap();
        assert_eq!(mol, 16.0 / 17.0);
        assert!((mol - 0.9412).abs() < 1e-4);
        assert_eq!(
            mean_occupation_layer(&graph(4, &[(1, 2)]), "N00").unwrap(),
            0.0
        );
        assert_eq!(mean_occupation_layer(&path3(), "B").unwrap(), 2.0 / 3.0);
        assert!(matches!(
            mean_occupation_layer(&path3(), "Z"),
            Err(Error::UnknownNode(_))
        ));
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> FilteredNetwork {
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < p {
                    pairs.push((i, j));
                }
            }
        }
        graph(n, &pairs)
    }

    #[test]
    fn betweenness_matches_path_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..60 {
            let n = rng.random_range(2..9);
            let g = random_graph(&mut rng, n, 0.4);
            let oracle =
                ordered_pair_betweenness(n, &g.edge_pairs().into_iter().collect::<Vec<_>>());
            let b = betweenness(&g);
            let ordered = pair_betweenness(&g, true);
            let unordered = pair_betweenness(&g, false);
            for k in 0..n {
                assert!((b[k] - oracle[k]).abs() < 1e-9);
                assert!((ordered[k] - oracle[k]).abs() < 1e-9);
                assert!((ordered[k] - 2.0 * unordered[k]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn degree_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 12;
        let upper: Vec<f64> = (0..n * (n - 1) / 2).map(|_| rng.random::<f64>()).collect();
        let d = DistanceMatrix::from_upper(n, &upper).unwrap();
        for m in [Method::Mst, Method::Mast] {
            let sum: usize = m.apply(&d).unwrap().degrees().iter().sum();
            assert_eq!(sum, 2 * (n - 1));
        }
        let sum: usize = tmfg(&d).unwrap().degrees().iter().sum();
        assert_eq!(sum, 6 * (n - 2));
        let s_mst = network_stats(&Method::Mst.apply(&d).unwrap()).unwrap();
        let s_mast = network_stats(&Method::Mast.apply(&d).unwrap()).unwrap();
        assert!(s_mst.length <= s_mast.length);
    }

    #[test]
    fn stats_record_isolated_nodes() {
        let d = DistanceMatrix::from_upper(4, &[0.1, 0.2, 1.5, 0.3, 1.6, 1.7]).unwrap();
        let s = network_stats(&Method::Ag.apply(&d).unwrap()).unwrap();
        assert_eq!(s.degrees[3], 0);
        assert!(!s.connected);
        assert_eq!(s.max_hops, 1);
        for v in [s.length, s.length_var, s.mol] {
            assert!(v >= 0.0);
        }
    }

    fn panel(rows: usize, n: usize, seed: u64) -> YieldPanel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = NaiveDate::from_ymd_opt(2019, 1, 1).unwrap();
        let dates = (0..rows)
            .map(|k| start + chrono::Days::new(k as u64))
            .collect();
        let mut common = 0.0;
        let mut cols = vec![Vec::with_capacity(rows); n];
        let mut levels = vec![1.0; n];
        for _ in 0..rows {
            common += rng.random::<f64>() - 0.5;
            for (i, col) in cols.iter_mut().enumerate() {
                levels[i] += 0.1 * (rng.random::<f64>() - 0.5);
                col.push(levels[i] + common * (i as f64 / n as f64));
            }
        }
        YieldPanel::new(dates, names(n), cols).unwrap()
    }

    #[test]
    fn rolling_single_window() {
        let p = panel(120, 6, 1);
        let r = rolling_run(
            &p,
            WindowSpec::default(),
            CorrKind::Conditional,
            &[Method::Mst],
        )
        .unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.stats.len(), 1);
        assert_eq!(r.header().len(), 8);
    }

    #[test]
    fn rolling_rows_equal_independent_runs() {
        let p = panel(140, 7, 2);
        let all = rolling_run(
            &p,
            WindowSpec::default(),
            CorrKind::Conditional,
            &Method::ALL,
        )
        .unwrap();
        assert_eq!(all.len(), 3);
        for (k, start) in [0usize, 10, 20].into_iter().enumerate() {
            let sub = YieldPanel::new(
                p.dates()[start..start + 120].to_vec(),
                p.names().to_vec(),
                (0..7)
                    .map(|i| p.series(i)[start..start + 120].to_vec())
                    .collect(),
            )
            .unwrap();
            let one = rolling_run(
                &sub,
                WindowSpec::default(),
                CorrKind::Conditional,
                &Method::ALL,
            )
            .unwrap();
            assert_eq!(one.window_end[0], all.window_end[k]);
            assert_eq!(one.mean_corr[0], all.mean_corr[k]);
            assert_eq!(one.corr_var[0], all.corr_var[k]);
            for m in 0..4 {
                assert_eq!(one.stats[m][0], all.stats[m][k]);
            }
        }
    }

    #[test]
    fn rolling_identical_windows_identical_rows() {
        // periodic panel: windows 0 and 1 see the same values
        let base = panel(10, 5, 3);
        let rows = 130;
        let dates = (0..rows)
            .map(|k| NaiveDate::from_ymd_opt(2020, 1, 1).unwrap() + chrono::Days::new(k as u64))
            .collect();
        let cols = (0..5)
            .map(|i| (0..rows).map(|t| base.series(i)[t % 10]).collect())
            .collect();
        let p = YieldPanel::new(dates, names(5), cols).unwrap();
        let r = rolling_run(&p, WindowSpec::default(), CorrKind::Plain, &Method::ALL).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.mean_corr[0], r.mean_corr[1]);
        for m in 0..4 {
            assert_eq!(r.stats[m][0], r.stats[m][1]);
        }
    }

    #[test]
    fn rolling_reports_failing_window() {
        let mut p = panel(140, 4, 5);
        // make entity 2 flat over the last window only
        let dates = p.dates().to_vec();
        let mut cols: Vec<Vec<f64>> = (0..4).map(|i| p.series(i).to_vec()).collect();
        for v in cols[2].iter_mut().skip(20) {
            *v = 1.0;
        }
        p = YieldPanel::new(dates.clone(), p.names().to_vec(), cols).unwrap();
        let err =
            rolling_run(&p, WindowSpec::default(), CorrKind::Plain, &[Method::Mst]).unwrap_err();
        match err {
            Error::ConstantSeries { entity, window_end } => {
                assert_eq!(entity, "N02");
                assert_eq!(window_end, Some(dates[139]));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn methods_are_canonicalised() {
        assert_eq!(
            canonical_methods(&[Method::Tmfg, Method::Mst, Method::Tmfg]),
            vec![Method::Mst, Method::Tmfg]
        );
    }
}
