//! Exhaustive enumeration of small connected graphs up to isomorphism, and
//! seeded random connected graph sampling.
//!
//! Graphs on up to 8 vertices are represented as edge bitmasks over the
//! C(n,2) vertex pairs. Enumeration grows graphs one vertex at a time and
//! deduplicates by an exact canonical form (minimum edge mask over all
//! vertex permutations, pruned by a degree-refinement partition), so each
//! isomorphism class appears exactly once.

use crate::graph::{AttributedGraph, NodeId};
use crate::par;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

/// Edge-mask graph on `n <= 8` vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MaskGraph {
    pub n: usize,
    pub mask: u32,
}

fn pair_index(n: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < n);
    // Index of (a, b) in lexicographic order over pairs.
    a * n - a * (a + 1) / 2 + (b - a - 1)
}

impl MaskGraph {
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let (a, b) = (a.min(b), a.max(b));
        self.mask >> pair_index(self.n, a, b) & 1 == 1
    }

    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.has_edge(a, b) {
                    out.push((a as NodeId, b as NodeId));
                }
            }
        }
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        (0..self.n).filter(|&u| u != v && self.has_edge(v, u)).count()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let mut seen = 1u32;
        let mut frontier = vec![0usize];
        while let Some(v) = frontier.pop() {
            for u in 0..self.n {
                if u != v && seen >> u & 1 == 0 && self.has_edge(v, u) {
                    seen |= 1 << u;
                    frontier.push(u);
                }
            }
        }
        seen.count_ones() as usize == self.n
    }

    fn permuted(&self, perm: &[usize]) -> u32 {
        let mut mask = 0u32;
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.has_edge(a, b) {
                    let (x, y) = (perm[a].min(perm[b]), perm[a].max(perm[b]));
                    mask |= 1 << pair_index(self.n, x, y);
                }
            }
        }
        mask
    }

    /// Minimum edge mask over all permutations consistent with the ordered
    /// degree partition. Degrees are permutation-invariant, so restricting
    /// to degree-sorted candidate permutations loses no minimum.
    pub fn canonical(&self) -> u32 {
        let n = self.n;
        let mut degs: Vec<(usize, usize)> = (0..n).map(|v| (self.degree(v), v)).collect();
        degs.sort_unstable();
        // Positions grouped by degree; permutations may only map vertices to
        // slots of equal degree.
        let mut best = u32::MAX;
        let mut slot_of = vec![0usize; n];
        permute_within_cells(&degs, &mut slot_of, 0, &mut |assign| {
            let m = self.permuted(assign);
            if m < best {
                best = m;
            }
        });
        best
    }

    pub fn to_graph(&self) -> AttributedGraph {
        AttributedGraph::unattributed(self.n, &self.edges()).expect("enumerated graph is connected")
    }
}

/// Enumerate assignments vertex -> slot where a vertex may occupy any slot
/// holding its degree class.
fn permute_within_cells(
    degs: &[(usize, usize)],
    assign: &mut Vec<usize>,
    pos: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    let n = degs.len();
    if pos == n {
        visit(assign);
        return;
    }
    let (deg, _) = degs[pos];
    let mut used = vec![false; n];
    for k in 0..pos {
        used[assign[degs[k].1]] = true;
    }
    for slot in 0..n {
        if degs[slot].0 == deg && !used[slot] {
            assign[degs[pos].1] = slot;
            permute_within_cells(degs, assign, pos + 1, visit);
        }
    }
}

/// All connected graphs on exactly `n` vertices, one per isomorphism class.
///
/// Built by extending each (n-1)-vertex class with every possible non-empty
/// neighborhood for the new vertex, then canonical-form deduplication.
/// Class counts for n = 1..=8: 1, 1, 2, 6, 21, 112, 853, 11117.
pub fn connected_graphs_exactly(n: usize) -> Vec<MaskGraph> {
    assert!((1..=8).contains(&n), "mask enumeration supports n <= 8");
    if n == 1 {
        return vec![MaskGraph { n: 1, mask: 0 }];
    }
    let prev = connected_graphs_exactly(n - 1);
    let mut seen: HashSet<u32> = HashSet::new();
    let mut out = Vec::new();
    // The new vertex is index n-1; edges to it occupy the pair indices
    // (a, n-1) for a < n-1.
    let chunks: Vec<Vec<u32>> = par::map_collect(&prev, |g| {
        // Re-embed the old mask: pair indices shift because the stride
        // depends on n.
        let mut base = 0u32;
        for a in 0..n - 1 {
            for b in a + 1..n - 1 {
                if g.mask >> pair_index(n - 1, a, b) & 1 == 1 {
                    base |= 1 << pair_index(n, a, b);
                }
            }
        }
        let mut local = Vec::new();
        for nbhd in 1u32..1 << (n - 1) {
            let mut mask = base;
            for a in 0..n - 1 {
                if nbhd >> a & 1 == 1 {
                    mask |= 1 << pair_index(n, a, n - 1);
                }
            }
            local.push(MaskGraph { n, mask }.canonical());
        }
        local
    });
    for chunk in chunks {
        for canon in chunk {
            if seen.insert(canon) {
                out.push(MaskGraph { n, mask: canon });
            }
        }
    }
    out.sort_unstable_by_key(|g| g.mask);
    out
}

/// All connected graphs with 1..=n vertices, one per isomorphism class.
pub fn connected_graphs_upto(n: usize) -> Vec<MaskGraph> {
    (1..=n).flat_map(connected_graphs_exactly).collect()
}

/// Seeded random connected graph: a uniform random spanning tree skeleton
/// plus each remaining pair independently with probability `extra_p`.
pub fn random_connected_graph(n: usize, extra_p: f64, seed: u64) -> AttributedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    // Random attachment tree.
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push((u as NodeId, v as NodeId));
    }
    for a in 0..n {
        for b in a + 1..n {
            let e = (a as NodeId, b as NodeId);
            if !edges.contains(&e) && rng.gen_bool(extra_p) {
                edges.push(e);
            }
        }
    }
    AttributedGraph::unattributed(n, &edges).expect("tree skeleton keeps it connected")
}
