//! Spanning-tree enumeration via Prufer sequences.

/// Calls `visit` with the edge list of every labelled spanning tree of K_n.
pub fn for_each_spanning_tree(n: usize, mut visit: impl FnMut(&[(usize, usize)])) {
    assert!(n >= 2);
    if n == 2 {
        visit(&[(0, 1)]);
        return;
    }
    let len = n - 2;
    let mut seq = vec![0usize; len];
    let mut edges = Vec::with_capacity(n - 1);
    loop {
        decode_prufer(n, &seq, &mut edges);
        visit(&edges);
        // odometer increment
        let mut k = 0;
        loop {
            if k == len {
                return;
            }
            seq[k] += 1;
            if seq[k] < n {
                break;
            }
            seq[k] = 0;
            k += 1;
        }
    }
}

fn decode_prufer(n: usize, seq: &[usize], edges: &mut Vec<(usize, usize)>) {
    edges.clear();
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.push(crate::edge(leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push(crate::edge(rest[0], rest[1]));
}

/// Minimum and maximum total weight over all spanning trees.
pub fn extreme_tree_weights(w: &[Vec<f64>]) -> (f64, f64) {
    let n = w.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for_each_spanning_tree(n, |edges| {
        let total: f64 = edges.iter().map(|&(a, b)| w[a][b]).sum();
        lo = lo.min(total);
        hi = hi.max(total);
    });
    (lo, hi)
}

/// Minimax path distances over the complete graph (the subdominant
/// ultrametric), by a Floyd-Warshall style closure.
pub fn minimax_closure(w: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = w.len();
    let mut u = w.to_vec();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = u[i][k].max(u[k][j]);
                if via < u[i][j] {
                    u[i][j] = via;
                }
            }
        }
    }
    for (i, row) in u.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    u
}
