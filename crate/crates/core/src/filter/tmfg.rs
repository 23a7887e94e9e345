//! Triangulated maximally filtered graph.
//!
//! Scores are similarities `s_ij = 2 - d_ij`. The seed is the 4-clique of
//! largest total score (exhaustive search). Each step inserts the remaining
//! vertex into the triangular face with the largest gain `s_va + s_vb + s_vc`
//! and replaces that face by the three new ones. Ties go to the smallest
//! vertex, then the lexicographically smallest face.

use crate::correlation::DistanceMatrix;
use crate::error::{Error, Result};

use super::{Edge, FilteredNetwork, Method};

/// Full record of a TMFG build.
#[derive(Debug, Clone)]
pub struct TmfgConstruction {
    pub seed: [usize; 4],
    /// `(vertex, face)` in insertion order.
    pub insertions: Vec<(usize, [usize; 3])>,
    /// Final triangular faces, each sorted ascending.
    pub faces: Vec<[usize; 3]>,
    pub network: FilteredNetwork,
}

fn score(d: &DistanceMatrix, a: usize, b: usize) -> f64 {
    2.0 - d.get(a, b)
}

fn sorted3(mut f: [usize; 3]) -> [usize; 3] {
    f.sort_unstable();
    f
}

fn best_seed(d: &DistanceMatrix) -> [usize; 4] {
    let n = d.n();
    let mut best = [0, 1, 2, 3];
    let mut best_score = f64::NEG_INFINITY;
    for a in 0..n {
        for b in (a + 1)..n {
            let ab = score(d, a, b);
            for c in (b + 1)..n {
                let abc = ab + score(d, a, c) + score(d, b, c);
                for e in (c + 1)..n {
                    let total = abc + score(d, a, e) + score(d, b, e) + score(d, c, e);
                    if total > best_score {
                        best_score = total;
                        best = [a, b, c, e];
                    }
                }
            }
        }
    }
    best
}

pub fn tmfg_construction(d: &DistanceMatrix) -> Result<TmfgConstruction> {
    let n = d.n();
    if n < 4 {
        return Err(Error::Dimension(format!(
            "TMFG needs at least 4 nodes, got {n}"
        )));
    }
    let seed = best_seed(d);
    let [a, b, c, e] = seed;
    let mut faces = vec![[a, b, c], [a, b, e], [a, c, e], [b, c, e]];
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(3 * (n - 2));
    for x in 0..4 {
        for y in (x + 1)..4 {
            pairs.push((seed[x], seed[y]));
        }
    }
    let mut placed = vec![false; n];
    for &v in &seed {
        placed[v] = true;
    }
    let mut insertions = Vec::with_capacity(n - 4);
    for _ in 4..n {
        let mut best: Option<(f64, usize, [usize; 3], usize)> = None;
        for v in (0..n).filter(|&v| !placed[v]) {
            for (fi, f) in faces.iter().enumerate() {
                let gain = score(d, v, f[0]) + score(d, v, f[1]) + score(d, v, f[2]);
                let better = match &best {
                    None => true,
                    Some((g, bv, bf, _)) => gain > *g || (gain == *g && (v, *f) < (*bv, *bf)),
                };
                if better {
                    best = Some((gain, v, *f, fi));
                }
            }
        }
        let (_, v, f, fi) = best.expect("faces and vertices remain");
        faces.swap_remove(fi);
        faces.push(sorted3([f[0], f[1], v]));
        faces.push(sorted3([f[0], f[2], v]));
        faces.push(sorted3([f[1], f[2], v]));
        for &u in &f {
            pairs.push((u, v));
        }
        placed[v] = true;
        insertions.push((v, f));
    }
    faces.sort_unstable();
    let edges = pairs
        .into_iter()
        .map(|(i, j)| Edge {
            i,
            j,
            weight: d.get(i, j),
        })
        .collect();
    let network = FilteredNetwork::new(d.names().to_vec(), Method::Tmfg, edges)?;
    Ok(TmfgConstruction {
        seed,
        insertions,
        faces,
        network,
    })
}

/// Planar graph with `3(n - 2)` edges built by greedy face insertion.
pub fn tmfg(d: &DistanceMatrix) -> Result<FilteredNetwork> {
    tmfg_construction(d).map(|c| c.network)
}
