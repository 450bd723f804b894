//! 1-dimensional Weisfeiler-Lehman color refinement.
//!
//! Colors are canonical dense integers, not hashes: each round the
//! (own color, sorted neighbor color multiset) signatures are relabeled in
//! sorted signature order, so equal partitions get bit-equal color vectors
//! and cross-graph comparisons are exact.

use gnncap_core::graph::AttributedGraph;

/// Per-round color vectors, round 0 first. Refinement runs for `rounds`
/// rounds or until the partition stabilizes, whichever comes first; the
/// stable partition is repeated if `rounds` exceeds stabilization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WlRefinement {
    pub rounds: Vec<Vec<u32>>,
    pub stable_after: usize,
}

impl WlRefinement {
    pub fn final_colors(&self) -> &[u32] {
        self.rounds.last().expect("round 0 present")
    }

    /// Sorted multiset of colors at a round; the graph-level invariant.
    pub fn color_multiset(&self, round: usize) -> Vec<u32> {
        let mut m = self.rounds[round.min(self.rounds.len() - 1)].clone();
        m.sort_unstable();
        m
    }

    pub fn class_count(&self, round: usize) -> usize {
        let m = self.color_multiset(round);
        m.windows(2).filter(|w| w[0] != w[1]).count() + usize::from(!m.is_empty())
    }
}

/// Refine from uniform initial colors, or from colors derived from the
/// node attribute vectors when `use_attributes` is set.
pub fn wl_refinement(g: &AttributedGraph, rounds: usize, use_attributes: bool) -> WlRefinement {
    let n = g.n();
    let initial: Vec<u32> = if use_attributes {
        let mut keys: Vec<_> = (0..n as u32).map(|v| g.node_attr(v).clone()).collect();
        keys.sort();
        keys.dedup();
        (0..n as u32)
            .map(|v| keys.binary_search(g.node_attr(v)).unwrap() as u32)
            .collect()
    } else {
        vec![0; n]
    };
    let mut history = vec![initial];
    let mut stable_after = rounds;
    for r in 1..=rounds {
        let prev = history.last().unwrap();
        let mut sigs: Vec<(u32, Vec<u32>)> = (0..n as u32)
            .map(|v| {
                let mut nb: Vec<u32> = g.neighbors(v).iter().map(|&u| prev[u as usize]).collect();
                nb.sort_unstable();
                (prev[v as usize], nb)
            })
            .collect();
        let mut keys = sigs.clone();
        keys.sort();
        keys.dedup();
        let next: Vec<u32> = sigs
            .drain(..)
            .map(|s| keys.binary_search(&s).unwrap() as u32)
            .collect();
        let refined = class_count(&next) > class_count(prev);
        let same_partition = !refined;
        history.push(next);
        if same_partition {
            stable_after = r - 1;
            // Fill the remaining rounds with the stable partition.
            let stable = history.last().unwrap().clone();
            while history.len() <= rounds {
                history.push(stable.clone());
            }
            break;
        }
    }
    WlRefinement {
        rounds: history,
        stable_after,
    }
}

fn class_count(colors: &[u32]) -> usize {
    let mut m = colors.to_vec();
    m.sort_unstable();
    m.dedup();
    m.len()
}
