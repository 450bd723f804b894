//! Node attribute schemes for training runs.
//!
//! One-hot dimensions are sized to the dataset (maximum node count or
//! maximum degree), so every graph in a dataset gets features of the same
//! width. Random unique ids are a fresh seeded permutation of the id
//! one-hots per graph, fixed for that graph: consistent within a graph,
//! inconsistent across graphs.

use gnncap_core::graph::{AttrVec, AttributedGraph};
use gnncap_core::Fixed;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AttrError {
    #[error("graph needs dimension {need} but the scheme allows {dim}")]
    DimensionExceeded { need: usize, dim: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SchemeKind {
    Anonymous,
    DegreeOneHot,
    UniqueIdOneHot,
    RandomUniqueId,
}

impl SchemeKind {
    pub fn parse(s: &str) -> Option<SchemeKind> {
        Some(match s {
            "anonymous" => SchemeKind::Anonymous,
            "degree" | "degree_onehot" => SchemeKind::DegreeOneHot,
            "unique_id" | "unique_id_onehot" => SchemeKind::UniqueIdOneHot,
            "random_unique_id" | "random_id" => SchemeKind::RandomUniqueId,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::Anonymous => "anonymous",
            SchemeKind::DegreeOneHot => "degree",
            SchemeKind::UniqueIdOneHot => "unique_id",
            SchemeKind::RandomUniqueId => "random_unique_id",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeScheme {
    pub kind: SchemeKind,
    /// Feature dimension: 1 for anonymous, max degree + 1 for degree
    /// one-hots, max n for id one-hots.
    pub dim: usize,
}

impl AttributeScheme {
    /// Size a scheme to a dataset.
    pub fn sized_for(kind: SchemeKind, max_n: usize, max_degree: usize) -> AttributeScheme {
        let dim = match kind {
            SchemeKind::Anonymous => 1,
            SchemeKind::DegreeOneHot => max_degree + 1,
            SchemeKind::UniqueIdOneHot | SchemeKind::RandomUniqueId => max_n,
        };
        AttributeScheme { kind, dim }
    }
}

fn one_hot(dim: usize, k: usize) -> AttrVec {
    (0..dim)
        .map(|i| if i == k { Fixed::ONE } else { Fixed::ZERO })
        .collect()
}

/// Replace `g`'s node attributes according to the scheme. The seed matters
/// only for random unique ids, where it fixes the per-graph permutation.
pub fn assign_attributes(
    g: &AttributedGraph,
    scheme: &AttributeScheme,
    seed: u64,
) -> Result<AttributedGraph, AttrError> {
    let attrs: Vec<AttrVec> = match scheme.kind {
        SchemeKind::Anonymous => vec![vec![Fixed::ONE]; g.n()],
        SchemeKind::DegreeOneHot => (0..g.n() as u32)
            .map(|v| {
                let d = g.degree(v);
                if d >= scheme.dim {
                    return Err(AttrError::DimensionExceeded {
                        need: d + 1,
                        dim: scheme.dim,
                    });
                }
                Ok(one_hot(scheme.dim, d))
            })
            .collect::<Result<_, _>>()?,
        SchemeKind::UniqueIdOneHot => (0..g.n() as u32)
            .map(|v| {
                let id = g.id_of(v) as usize;
                if id >= scheme.dim {
                    return Err(AttrError::DimensionExceeded {
                        need: id + 1,
                        dim: scheme.dim,
                    });
                }
                Ok(one_hot(scheme.dim, id))
            })
            .collect::<Result<_, _>>()?,
        SchemeKind::RandomUniqueId => {
            if g.n() > scheme.dim {
                return Err(AttrError::DimensionExceeded {
                    need: g.n(),
                    dim: scheme.dim,
                });
            }
            let mut slots: Vec<usize> = (0..scheme.dim).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            slots.shuffle(&mut rng);
            (0..g.n() as u32)
                .map(|v| one_hot(scheme.dim, slots[g.id_of(v) as usize]))
                .collect()
        }
    };
    Ok(g.with_node_attrs(attrs).expect("length matches"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_one_hot_on_regular_graph_is_uniform() {
        let g = AttributedGraph::cycle(6);
        let scheme = AttributeScheme::sized_for(SchemeKind::DegreeOneHot, 6, 2);
        let a = assign_attributes(&g, &scheme, 0).unwrap();
        let want = one_hot(3, 2);
        assert!((0..6).all(|v| a.node_attr(v) == &want));
    }

    #[test]
    fn anonymous_is_constant_scalar() {
        let g = AttributedGraph::path(4);
        let scheme = AttributeScheme::sized_for(SchemeKind::Anonymous, 4, 2);
        let a = assign_attributes(&g, &scheme, 0).unwrap();
        assert!((0..4).all(|v| a.node_attr(v) == &vec![Fixed::ONE]));
    }

    #[test]
    fn unique_ids_are_distinct_basis_vectors() {
        let g = AttributedGraph::cycle(8);
        let scheme = AttributeScheme::sized_for(SchemeKind::UniqueIdOneHot, 8, 2);
        let a = assign_attributes(&g, &scheme, 0).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for v in 0..8 {
            let attr = a.node_attr(v);
            assert_eq!(attr.iter().filter(|x| **x == Fixed::ONE).count(), 1);
            seen.insert(attr.clone());
        }
        assert_eq!(seen.len(), 8);
    }

    #[test]
    fn random_ids_differ_across_seeds_but_not_within() {
        let g = AttributedGraph::cycle(8);
        let scheme = AttributeScheme::sized_for(SchemeKind::RandomUniqueId, 8, 2);
        let a = assign_attributes(&g, &scheme, 1).unwrap();
        let b = assign_attributes(&g, &scheme, 1).unwrap();
        let c = assign_attributes(&g, &scheme, 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn dimension_guard_fires() {
        let g = AttributedGraph::cycle(8);
        let scheme = AttributeScheme {
            kind: SchemeKind::UniqueIdOneHot,
            dim: 4,
        };
        assert!(assign_attributes(&g, &scheme, 0).is_err());
    }
}
