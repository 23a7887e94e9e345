//! Exhaustive enumeration of TMFG constructions.
//!
//! A construction is a seed 4-clique followed by a sequence of
//! (vertex, triangular face) insertions. A construction is *greedy* when the
//! seed has maximal total score and every insertion has maximal gain among
//! all (remaining vertex, current face) pairs at that step.

use std::collections::BTreeSet;

pub type EdgeSet = BTreeSet<(usize, usize)>;

const TOL: f64 = 1e-12;

fn seed_score(s: &[Vec<f64>], q: &[usize; 4]) -> f64 {
    let mut t = 0.0;
    for a in 0..4 {
        for b in (a + 1)..4 {
            t += s[q[a]][q[b]];
        }
    }
    t
}

fn gain(s: &[Vec<f64>], v: usize, f: &[usize; 3]) -> f64 {
    s[v][f[0]] + s[v][f[1]] + s[v][f[2]]
}

struct State {
    remaining: Vec<usize>,
    faces: Vec<[usize; 3]>,
    edges: EdgeSet,
}

fn sorted3(mut f: [usize; 3]) -> [usize; 3] {
    f.sort_unstable();
    f
}

fn extend(
    s: &[Vec<f64>],
    st: &State,
    greedy_only: bool,
    out: &mut Vec<(EdgeSet, bool)>,
    greedy_so_far: bool,
) {
    if st.remaining.is_empty() {
        out.push((st.edges.clone(), greedy_so_far));
        return;
    }
    let mut best = f64::NEG_INFINITY;
    for &v in &st.remaining {
        for f in &st.faces {
            best = best.max(gain(s, v, f));
        }
    }
    for (vi, &v) in st.remaining.iter().enumerate() {
        for (fi, f) in st.faces.iter().enumerate() {
            let g = gain(s, v, f);
            let is_greedy = g >= best - TOL;
            if greedy_only && !is_greedy {
                continue;
            }
            let mut remaining = st.remaining.clone();
            remaining.remove(vi);
            let mut faces = st.faces.clone();
            faces.remove(fi);
            faces.push(sorted3([f[0], f[1], v]));
            faces.push(sorted3([f[0], f[2], v]));
            faces.push(sorted3([f[1], f[2], v]));
            let mut edges = st.edges.clone();
            for &u in f {
                edges.insert(crate::edge(u, v));
            }
            let next = State {
                remaining,
                faces,
                edges,
            };
            extend(s, &next, greedy_only, out, greedy_so_far && is_greedy);
        }
    }
}

/// Every construction on score matrix `s`, each tagged with whether it
/// follows the greedy rule at every step.
pub fn all_constructions(s: &[Vec<f64>]) -> Vec<(EdgeSet, bool)> {
    enumerate(s, false)
}

/// Edge sets of all greedy constructions.
pub fn greedy_edge_sets(s: &[Vec<f64>]) -> BTreeSet<EdgeSet> {
    enumerate(s, true)
        .into_iter()
        .filter(|(_, g)| *g)
        .map(|(e, _)| e)
        .collect()
}

fn enumerate(s: &[Vec<f64>], greedy_only: bool) -> Vec<(EdgeSet, bool)> {
    let n = s.len();
    assert!(n >= 4);
    let mut quads = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                for d in (c + 1)..n {
                    quads.push([a, b, c, d]);
                }
            }
        }
    }
    let best = quads
        .iter()
        .map(|q| seed_score(s, q))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut out = Vec::new();
    for q in &quads {
        let seed_greedy = seed_score(s, q) >= best - TOL;
        if greedy_only && !seed_greedy {
            continue;
        }
        let mut edges = EdgeSet::new();
        for a in 0..4 {
            for b in (a + 1)..4 {
                edges.insert(crate::edge(q[a], q[b]));
            }
        }
        let faces = vec![
            [q[0], q[1], q[2]],
            [q[0], q[1], q[3]],
            [q[0], q[2], q[3]],
            [q[1], q[2], q[3]],
        ];
        let remaining = (0..n).filter(|v| !q.contains(v)).collect();
        let st = State {
            remaining,
            faces,
            edges,
        };
        extend(s, &st, greedy_only, &mut out, seed_greedy);
    }
    out
}

/// Total score of an edge set.
pub fn total_score(s: &[Vec<f64>], edges: &EdgeSet) -> f64 {
    edges.iter().map(|&(a, b)| s[a][b]).sum()
}
