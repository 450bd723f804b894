//! Attributed-graph data model and structural metrics.
//!
//! An [`AttributedGraph`] is an undirected connected graph with per-node and
//! per-directed-edge attribute vectors and a bijective node-id labeling.
//! Graphs are immutable after construction and safe to share across threads.
//! Self-loops are never stored; the closed neighborhood is derived on demand.

use crate::fixed::Fixed;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

pub type NodeId = u32;
pub type AttrVec = Vec<Fixed>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge ({0}, {1}) references a node outside 0..{2}")]
    EdgeOutOfRange(NodeId, NodeId, usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("self-loop ({0}, {0}) is not allowed")]
    SelfLoop(NodeId),
    #[error("graph is disconnected; components: {0:?}")]
    Disconnected(Vec<Vec<NodeId>>),
    #[error("attribute count {got} does not match node count {expected}")]
    NodeAttrMismatch { got: usize, expected: usize },
    #[error("ids are not a bijection onto 0..n")]
    BadIds,
    #[error("indicator size mismatch: {0}")]
    IndicatorMismatch(String),
    #[error("graph must have at least one node")]
    Empty,
}

/// Undirected connected graph with node/edge attributes and unique ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributedGraph {
    n: usize,
    /// Undirected edges, each stored once with endpoints ordered low-high.
    edges: Vec<(NodeId, NodeId)>,
    /// Adjacency lists, sorted ascending.
    adj: Vec<Vec<NodeId>>,
    node_attr: Vec<AttrVec>,
    /// Attributes per directed edge (i <- j); absent means empty vector.
    edge_attr: BTreeMap<(NodeId, NodeId), AttrVec>,
    /// ids[v] is the unique id of vertex index v, a bijection onto 0..n.
    ids: Vec<NodeId>,
}

impl AttributedGraph {
    /// Build a graph, checking every structural invariant.
    ///
    /// `edge_attr` maps directed pairs `(i, j)` (the attribute on the edge
    /// from j into i) to vectors; unspecified directions default to empty.
    pub fn build(
        n: usize,
        edges: &[(NodeId, NodeId)],
        node_attr: Vec<AttrVec>,
        edge_attr: BTreeMap<(NodeId, NodeId), AttrVec>,
    ) -> Result<AttributedGraph, GraphError> {
        Self::build_inner(n, edges, node_attr, edge_attr, true)
    }

    /// Build without the connectivity requirement.
    ///
    /// Disconnected graphs violate the type's documented invariant and are
    /// rejected everywhere else; this constructor exists solely for anonymity
    /// demonstrations that compare a cycle against a union of smaller cycles.
    pub fn build_disconnected(
        n: usize,
        edges: &[(NodeId, NodeId)],
        node_attr: Vec<AttrVec>,
    ) -> Result<AttributedGraph, GraphError> {
        Self::build_inner(n, edges, node_attr, BTreeMap::new(), false)
    }

    fn build_inner(
        n: usize,
        edges: &[(NodeId, NodeId)],
        node_attr: Vec<AttrVec>,
        edge_attr: BTreeMap<(NodeId, NodeId), AttrVec>,
        require_connected: bool,
    ) -> Result<AttributedGraph, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        if node_attr.len() != n {
            return Err(GraphError::NodeAttrMismatch {
                got: node_attr.len(),
                expected: n,
            });
        }
        let mut norm: Vec<(NodeId, NodeId)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a as usize >= n || b as usize >= n {
                return Err(GraphError::EdgeOutOfRange(a, b, n));
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        if let Some(w) = norm.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }
        for (&(i, j), _) in &edge_attr {
            if i as usize >= n || j as usize >= n {
                return Err(GraphError::EdgeOutOfRange(i, j, n));
            }
            let key = (i.min(j), i.max(j));
            if norm.binary_search(&key).is_err() {
                return Err(GraphError::EdgeOutOfRange(i, j, n));
            }
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &norm {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        let g = AttributedGraph {
            n,
            edges: norm,
            adj,
            node_attr,
            edge_attr,
            ids: (0..n as NodeId).collect(),
        };
        if require_connected {
            let comps = g.components();
            if comps.len() > 1 {
                return Err(GraphError::Disconnected(comps));
            }
        }
        Ok(g)
    }

    /// Convenience constructor with empty attributes everywhere.
    pub fn unattributed(n: usize, edges: &[(NodeId, NodeId)]) -> Result<AttributedGraph, GraphError> {
        AttributedGraph::build(n, edges, vec![Vec::new(); n], BTreeMap::new())
    }

    pub fn cycle(n: usize) -> AttributedGraph {
        let edges: Vec<_> = (0..n as NodeId)
            .map(|i| (i, (i + 1) % n as NodeId))
            .collect();
        AttributedGraph::unattributed(n, &edges).expect("cycle is connected")
    }

    pub fn path(n: usize) -> AttributedGraph {
        let edges: Vec<_> = (0..n as NodeId - 1).map(|i| (i, i + 1)).collect();
        AttributedGraph::unattributed(n, &edges).expect("path is connected")
    }

    pub fn complete(n: usize) -> AttributedGraph {
        let mut edges = Vec::new();
        for i in 0..n as NodeId {
            for j in i + 1..n as NodeId {
                edges.push((i, j));
            }
        }
        AttributedGraph::unattributed(n, &edges).expect("complete graph is connected")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Undirected edges, endpoints ordered low-high, ascending.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    /// Open neighborhood, ascending.
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v as usize]
    }

    /// Closed neighborhood including `v` itself, ascending.
    pub fn closed_neighbors(&self, v: NodeId) -> Vec<NodeId> {
        let mut out = self.adj[v as usize].clone();
        let pos = out.partition_point(|&u| u < v);
        out.insert(pos, v);
        out
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v as usize].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.adj[v].len()).max().unwrap_or(0)
    }

    pub fn node_attr(&self, v: NodeId) -> &AttrVec {
        &self.node_attr[v as usize]
    }

    pub fn node_attrs(&self) -> &[AttrVec] {
        &self.node_attr
    }

    /// Attribute on the directed edge from `j` into `i`. Empty when unset;
    /// the self-loop direction (i, i) is always empty.
    pub fn edge_attr_into(&self, i: NodeId, j: NodeId) -> &[Fixed] {
        static EMPTY: &[Fixed] = &[];
        self.edge_attr.get(&(i, j)).map(Vec::as_slice).unwrap_or(EMPTY)
    }

    pub fn edge_attrs(&self) -> &BTreeMap<(NodeId, NodeId), AttrVec> {
        &self.edge_attr
    }

    pub fn id_of(&self, v: NodeId) -> NodeId {
        self.ids[v as usize]
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    /// Replace all node attributes. Lengths must match.
    pub fn with_node_attrs(&self, node_attr: Vec<AttrVec>) -> Result<AttributedGraph, GraphError> {
        if node_attr.len() != self.n {
            return Err(GraphError::NodeAttrMismatch {
                got: node_attr.len(),
                expected: self.n,
            });
        }
        let mut g = self.clone();
        g.node_attr = node_attr;
        Ok(g)
    }

    /// Relabel ids by `perm`: the vertex currently labeled v gets id perm[v].
    /// Supports the permutation-invariance tests; the adjacency structure is
    /// untouched.
    pub fn permute_ids(&self, perm: &[NodeId]) -> Result<AttributedGraph, GraphError> {
        if perm.len() != self.n {
            return Err(GraphError::BadIds);
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p as usize >= self.n || seen[p as usize] {
                return Err(GraphError::BadIds);
            }
            seen[p as usize] = true;
        }
        let mut g = self.clone();
        g.ids = self.ids.iter().map(|&v| perm[v as usize]).collect();
        Ok(g)
    }

    /// Rebuild the graph so that vertex indices equal ids under `perm`,
    /// relabeling adjacency, attributes, and edge attributes accordingly.
    pub fn relabel(&self, perm: &[NodeId]) -> Result<AttributedGraph, GraphError> {
        if perm.len() != self.n {
            return Err(GraphError::BadIds);
        }
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|&(a, b)| (perm[a as usize], perm[b as usize]))
            .collect();
        let mut node_attr = vec![Vec::new(); self.n];
        for v in 0..self.n {
            node_attr[perm[v] as usize] = self.node_attr[v].clone();
        }
        let edge_attr = self
            .edge_attr
            .iter()
            .map(|(&(i, j), a)| ((perm[i as usize], perm[j as usize]), a.clone()))
            .collect();
        AttributedGraph::build_inner(self.n, &edges, node_attr, edge_attr, false)
    }

    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let mut seen = vec![false; self.n];
        let mut comps = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start as NodeId];
            seen[start] = true;
            let mut queue = vec![start as NodeId];
            while let Some(v) = queue.pop() {
                for &u in self.neighbors(v) {
                    if !seen[u as usize] {
                        seen[u as usize] = true;
                        comp.push(u);
                        queue.push(u);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// BFS distances from `start`; unreachable nodes get `usize::MAX`.
    pub fn bfs_distances(&self, start: NodeId) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[start as usize] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &u in self.neighbors(v) {
                if dist[u as usize] == usize::MAX {
                    dist[u as usize] = dist[v as usize] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Longest shortest path over all node pairs.
    pub fn diameter(&self) -> usize {
        debug_assert!(self.is_connected());
        (0..self.n as NodeId)
            .map(|v| {
                self.bfs_distances(v)
                    .into_iter()
                    .filter(|&d| d != usize::MAX)
                    .max()
                    .unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }

    /// Length of the shortest cycle, or `None` for forests.
    ///
    /// BFS from every vertex; the first non-tree edge closing two branches
    /// bounds the girth. Standard O(n * m) exact computation.
    pub fn girth(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for s in 0..self.n as NodeId {
            let mut dist = vec![usize::MAX; self.n];
            let mut parent = vec![u32::MAX; self.n];
            dist[s as usize] = 0;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &u in self.neighbors(v) {
                    if dist[u as usize] == usize::MAX {
                        dist[u as usize] = dist[v as usize] + 1;
                        parent[u as usize] = v;
                        queue.push_back(u);
                    } else if parent[v as usize] != u {
                        let cyc = dist[v as usize] + dist[u as usize] + 1;
                        if best.map_or(true, |b| cyc < b) {
                            best = Some(cyc);
                        }
                    }
                }
            }
        }
        best
    }
}

/// One-hot membership marks for a subgraph H of a host graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgraphIndicator {
    /// Per vertex index of the host graph.
    pub node_member: Vec<bool>,
    /// Per undirected edge, in the host's `edges()` order.
    pub edge_member: Vec<bool>,
}

impl SubgraphIndicator {
    pub fn validate(&self, g: &AttributedGraph) -> Result<(), GraphError> {
        if self.node_member.len() != g.n() {
            return Err(GraphError::IndicatorMismatch(format!(
                "node indicator has {} entries for {} nodes",
                self.node_member.len(),
                g.n()
            )));
        }
        if self.edge_member.len() != g.edge_count() {
            return Err(GraphError::IndicatorMismatch(format!(
                "edge indicator has {} entries for {} edges",
                self.edge_member.len(),
                g.edge_count()
            )));
        }
        for (k, &(a, b)) in g.edges().iter().enumerate() {
            if self.edge_member[k] && !(self.node_member[a as usize] && self.node_member[b as usize]) {
                return Err(GraphError::IndicatorMismatch(format!(
                    "edge ({a}, {b}) is marked but an endpoint is not"
                )));
            }
        }
        Ok(())
    }

    pub fn full(g: &AttributedGraph) -> SubgraphIndicator {
        SubgraphIndicator {
            node_member: vec![true; g.n()],
            edge_member: vec![true; g.edge_count()],
        }
    }

    pub fn from_edges(g: &AttributedGraph, edges: &[(NodeId, NodeId)]) -> SubgraphIndicator {
        let mut node_member = vec![false; g.n()];
        let mut edge_member = vec![false; g.edge_count()];
        for &(a, b) in edges {
            let key = (a.min(b), a.max(b));
            if let Ok(k) = g.edges().binary_search(&key) {
                edge_member[k] = true;
                node_member[a as usize] = true;
                node_member[b as usize] = true;
            }
        }
        SubgraphIndicator {
            node_member,
            edge_member,
        }
    }

    pub fn marked_edges(&self, g: &AttributedGraph) -> Vec<(NodeId, NodeId)> {
        g.edges()
            .iter()
            .zip(&self.edge_member)
            .filter_map(|(&e, &m)| m.then_some(e))
            .collect()
    }

    pub fn marked_nodes(&self) -> Vec<NodeId> {
        self.node_member
            .iter()
            .enumerate()
            .filter_map(|(v, &m)| m.then_some(v as NodeId))
            .collect()
    }
}

/// Re-attribute `g` with membership one-hots: each node gets its membership
/// bit appended, each marked edge gets attribute 1 in both directions.
/// The input graph is unchanged.
pub fn encode_subgraph(
    g: &AttributedGraph,
    h: &SubgraphIndicator,
) -> Result<AttributedGraph, GraphError> {
    h.validate(g)?;
    let node_attr = (0..g.n())
        .map(|v| {
            let mut a = g.node_attr(v as NodeId).clone();
            a.push(if h.node_member[v] { Fixed::ONE } else { Fixed::ZERO });
            a
        })
        .collect();
    let mut edge_attr: BTreeMap<(NodeId, NodeId), AttrVec> = g.edge_attrs().clone();
    for (k, &(a, b)) in g.edges().iter().enumerate() {
        let bit = if h.edge_member[k] { Fixed::ONE } else { Fixed::ZERO };
        for key in [(a, b), (b, a)] {
            edge_attr.entry(key).or_default().push(bit);
        }
    }
    let edges = g.edges().to_vec();
    AttributedGraph::build(g.n(), &edges, node_attr, edge_attr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: i64) -> AttrVec {
        vec![Fixed::from_int(v)]
    }

    #[test]
    fn triangle_builds() {
        let g = AttributedGraph::unattributed(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.closed_neighbors(1), vec![0, 1, 2]);
    }

    #[test]
    fn disconnected_rejected_with_components() {
        let err = AttributedGraph::unattributed(2, &[]).unwrap_err();
        match err {
            GraphError::Disconnected(comps) => {
                assert_eq!(comps, vec![vec![0], vec![1]]);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn duplicate_edge_rejected() {
        let err = AttributedGraph::unattributed(3, &[(0, 1), (1, 0), (1, 2)]).unwrap_err();
        assert_eq!(err, GraphError::DuplicateEdge(0, 1));
    }

    #[test]
    fn six_cycle_is_regular_with_diameter_three() {
        let g = AttributedGraph::cycle(6);
        assert!((0..6).all(|v| g.degree(v) == 2));
        assert_eq!(g.diameter(), 3);
        assert_eq!(g.girth(), Some(6));
    }

    #[test]
    fn path_diameter_and_girth() {
        let g = AttributedGraph::path(4);
        assert_eq!(g.diameter(), 3);
        assert_eq!(g.girth(), None);
    }

    #[test]
    fn k4_girth_matches_exhaustive_cycle_enumeration() {
        // Independent oracle: enumerate all simple cycles via DFS and take
        // the shortest.
        fn all_cycle_lengths(g: &AttributedGraph) -> Vec<usize> {
            let mut lens = Vec::new();
            let n = g.n();
            fn dfs(
                g: &AttributedGraph,
                start: NodeId,
                v: NodeId,
                visited: &mut Vec<bool>,
                depth: usize,
                lens: &mut Vec<usize>,
            ) {
                for &u in g.neighbors(v) {
                    if u == start && depth >= 3 {
                        lens.push(depth);
                    } else if u > start && !visited[u as usize] {
                        visited[u as usize] = true;
                        dfs(g, start, u, visited, depth + 1, lens);
                        visited[u as usize] = false;
                    }
                }
            }
            for s in 0..n as NodeId {
                let mut visited = vec![false; n];
                visited[s as usize] = true;
                dfs(g, s, s, &mut visited, 1, &mut lens);
            }
            lens
        }
        let k4 = AttributedGraph::complete(4);
        let oracle = all_cycle_lengths(&k4).into_iter().min();
        assert_eq!(k4.girth(), oracle);
        assert_eq!(k4.girth(), Some(3));

        let c6 = AttributedGraph::cycle(6);
        assert_eq!(c6.girth(), all_cycle_lengths(&c6).into_iter().min());
    }

    #[test]
    fn structural_bounds_hold() {
        for g in [
            AttributedGraph::cycle(5),
            AttributedGraph::path(7),
            AttributedGraph::complete(5),
        ] {
            assert!(g.diameter() <= g.n() - 1);
            if let Some(girth) = g.girth() {
                assert!(girth >= 3);
            }
        }
    }

    #[test]
    fn encode_subgraph_single_edge() {
        let g = AttributedGraph::cycle(6);
        let h = SubgraphIndicator::from_edges(&g, &[(0, 1)]);
        let enc = encode_subgraph(&g, &h).unwrap();
        assert_eq!(enc.node_attr(0), &scalar(1));
        assert_eq!(enc.node_attr(1), &scalar(1));
        assert_eq!(enc.node_attr(2), &scalar(0));
        assert_eq!(enc.edge_attr_into(0, 1), scalar(1).as_slice());
        assert_eq!(enc.edge_attr_into(1, 0), scalar(1).as_slice());
        assert_eq!(enc.edge_attr_into(2, 1), scalar(0).as_slice());
        // Original untouched.
        assert!(g.node_attr(0).is_empty());
    }

    #[test]
    fn encode_subgraph_full_marks_everything() {
        let g = AttributedGraph::cycle(4);
        let enc = encode_subgraph(&g, &SubgraphIndicator::full(&g)).unwrap();
        assert!((0..4).all(|v| enc.node_attr(v) == &scalar(1)));
        assert!(enc.edge_attrs().values().all(|a| a == &scalar(1)));
    }

    #[test]
    fn encode_subgraph_spanning_tree_of_k4() {
        // Any BFS tree of K4: 4 node bits, 3 edge bits.
        let g = AttributedGraph::complete(4);
        let h = SubgraphIndicator::from_edges(&g, &[(0, 1), (0, 2), (0, 3)]);
        let enc = encode_subgraph(&g, &h).unwrap();
        let node_bits: usize = (0..4).filter(|&v| enc.node_attr(v) == &scalar(1)).count();
        let edge_bits = enc
            .edges()
            .iter()
            .filter(|&&(a, b)| enc.edge_attr_into(a, b) == scalar(1).as_slice())
            .count();
        assert_eq!(node_bits, 4);
        assert_eq!(edge_bits, 3);
    }

    #[test]
    fn indicator_size_mismatch_rejected() {
        let g = AttributedGraph::cycle(4);
        let h = SubgraphIndicator {
            node_member: vec![true; 3],
            edge_member: vec![false; 4],
        };
        assert!(matches!(
            encode_subgraph(&g, &h),
            Err(GraphError::IndicatorMismatch(_))
        ));
    }

    #[test]
    fn permute_ids_is_a_bijection_or_error() {
        let g = AttributedGraph::cycle(3);
        let p = g.permute_ids(&[2, 0, 1]).unwrap();
        assert_eq!(p.id_of(0), 2);
        assert_eq!(p.id_of(1), 0);
        assert!(g.permute_ids(&[0, 0, 1]).is_err());
        assert!(g.permute_ids(&[0, 1]).is_err());
    }

    #[test]
    fn relabel_moves_structure() {
        let g = AttributedGraph::build(
            3,
            &[(0, 1), (1, 2)],
            vec![scalar(10), scalar(20), scalar(30)],
            BTreeMap::new(),
        )
        .unwrap();
        let r = g.relabel(&[2, 1, 0]).unwrap();
        assert_eq!(r.node_attr(2), &scalar(10));
        assert!(r.has_edge(2, 1));
        assert!(r.has_edge(1, 0));
        assert!(!r.has_edge(0, 2));
    }
}
