//! Betweenness by explicit enumeration of every shortest path.

use std::collections::VecDeque;

fn bfs(adj: &[Vec<usize>], s: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[s] = Some(0);
    let mut q = VecDeque::from([s]);
    while let Some(v) = q.pop_front() {
        for &w in &adj[v] {
            if dist[w].is_none() {
                dist[w] = Some(dist[v].unwrap() + 1);
                q.push_back(w);
            }
        }
    }
    dist
}

fn walk(
    adj: &[Vec<usize>],
    dist_to_target: &[Option<usize>],
    path: &mut Vec<usize>,
    target: usize,
    out: &mut Vec<Vec<usize>>,
) {
    let v = *path.last().unwrap();
    if v == target {
        out.push(path.clone());
        return;
    }
    let here = dist_to_target[v].unwrap();
    for &w in &adj[v] {
        if dist_to_target[w] == Some(here - 1) {
            path.push(w);
            walk(adj, dist_to_target, path, target, out);
            path.pop();
        }
    }
}

/// Sum over ordered pairs `(i, j)` with `i != j != k` of the fraction of
/// shortest `i`-`j` paths passing through `k`.
pub fn ordered_pair_betweenness(n: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut score = vec![0.0; n];
    for j in 0..n {
        let to_j = bfs(&adj, j);
        for i in 0..n {
            if i == j || to_j[i].is_none() {
                continue;
            }
            let mut paths = Vec::new();
            walk(&adj, &to_j, &mut vec![i], j, &mut paths);
            let total = paths.len() as f64;
            for (k, s) in score.iter_mut().enumerate() {
                if k == i || k == j {
                    continue;
                }
                let through = paths.iter().filter(|p| p.contains(&k)).count() as f64;
                *s += through / total;
            }
        }
    }
    score
}
