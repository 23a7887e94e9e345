use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// Checks that `faces` is a triangulation of the sphere whose 1-skeleton is
/// exactly `edges`: every edge borders two faces, the link of every vertex is
/// a single cycle, the complex is connected, and `V - E + F = 2`. Such a
/// complex is a planar embedding of the graph.
pub fn verify_planar_embedding(
    n: usize,
    edges: &BTreeSet<(usize, usize)>,
    faces: &[[usize; 3]],
) -> Result<()> {
    let fail = |msg: String| Err(Error::Method(format!("not a planar triangulation: {msg}")));
    let mut edge_faces: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut link: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for f in faces {
        let [a, b, c] = *f;
        if a == b || b == c || a == c || a.max(b).max(c) >= n {
            return fail(format!("bad face {f:?}"));
        }
        for (x, y, opp) in [(a, b, c), (a, c, b), (b, c, a)] {
            let key = (x.min(y), x.max(y));
            if !edges.contains(&key) {
                return fail(format!("face edge {key:?} missing from graph"));
            }
            *edge_faces.entry(key).or_default() += 1;
            link[opp].push(key);
        }
    }
    for e in edges {
        match edge_faces.get(e) {
            Some(2) => {}
            other => {
                return fail(format!(
                    "edge {e:?} borders {} faces",
                    other.copied().unwrap_or(0)
                ))
            }
        }
    }
    // each vertex link must be one cycle through all its neighbours
    for (v, segs) in link.iter().enumerate() {
        if segs.is_empty() {
            return fail(format!("vertex {v} is on no face"));
        }
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(x, y) in segs {
            adj.entry(x).or_default().push(y);
            adj.entry(y).or_default().push(x);
        }
        if adj.values().any(|nb| nb.len() != 2) {
            return fail(format!("link of vertex {v} is not a cycle"));
        }
        let start = *adj.keys().next().unwrap();
        let (mut prev, mut cur, mut steps) = (start, adj[&start][0], 1);
        while cur != start {
            let nb = &adj[&cur];
            let next = if nb[0] == prev { nb[1] } else { nb[0] };
            prev = cur;
            cur = next;
            steps += 1;
        }
        if steps != adj.len() {
            return fail(format!("link of vertex {v} splits into several cycles"));
        }
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in edges.iter().filter(|(a, b)| *a == v || *b == v) {
            let w = if a == v { b } else { a };
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return fail("graph is disconnected".into());
    }
    let euler = n as i64 - edges.len() as i64 + faces.len() as i64;
    if euler != 2 {
        return fail(format!("Euler characteristic {euler}"));
    }
    Ok(())
}
