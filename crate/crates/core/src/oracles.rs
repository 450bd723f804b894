//! Brute-force reference solvers.
//!
//! These are the ground truth for dataset labels and for every verification
//! sweep: deliberately exhaustive, deterministic (lexicographic tie-breaks),
//! and guarded by explicit instance-size limits instead of silent slowness.

use crate::graph::{AttributedGraph, NodeId, SubgraphIndicator};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

pub type Weight = Ratio<i64>;
pub type WeightMap = BTreeMap<(NodeId, NodeId), Weight>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("instance too large for exhaustive search: n={n}, limit={limit}")]
    Budget { n: usize, limit: usize },
    #[error("missing terminals for s-t predicate")]
    MissingTerminals,
    #[error("negative edge weight on ({0}, {1})")]
    NegativeWeight(NodeId, NodeId),
    #[error("optimum is zero; approximation ratio undefined")]
    ZeroOptimum,
    #[error("indicator: {0}")]
    Indicator(String),
}

/// A problem instance bundling the graph with the optional extras a solver
/// may need.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub graph: AttributedGraph,
    pub weights: Option<WeightMap>,
    pub terminals: Option<(NodeId, NodeId)>,
    pub subgraph: Option<SubgraphIndicator>,
    pub parameter: Option<usize>,
}

impl ProblemInstance {
    pub fn new(graph: AttributedGraph) -> ProblemInstance {
        ProblemInstance {
            graph,
            weights: None,
            terminals: None,
            subgraph: None,
            parameter: None,
        }
    }
}

/// Solver output payload.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Solution {
    Decision(bool),
    NodeSet {
        nodes: Vec<NodeId>,
        objective: i64,
    },
    EdgeSet {
        edges: Vec<(NodeId, NodeId)>,
        objective_num: i64,
        objective_den: i64,
    },
    Value(i64),
    Coloring {
        colors: Vec<u32>,
        count: u32,
    },
}

fn unit_weights(g: &AttributedGraph) -> WeightMap {
    g.edges()
        .iter()
        .map(|&e| (e, Weight::from_integer(1)))
        .collect()
}

fn weight_of(w: &WeightMap, a: NodeId, b: NodeId) -> Weight {
    *w.get(&(a.min(b), a.max(b))).expect("weight defined on every edge")
}

fn check_weights(g: &AttributedGraph, w: &Option<WeightMap>) -> Result<WeightMap, OracleError> {
    let w = match w {
        Some(w) => w.clone(),
        None => unit_weights(g),
    };
    for &(a, b) in g.edges() {
        match w.get(&(a, b)) {
            Some(x) if *x < Weight::from_integer(0) => {
                return Err(OracleError::NegativeWeight(a, b))
            }
            Some(_) => {}
            None => {
                return Err(OracleError::BadParameter(format!(
                    "weight missing for edge ({a}, {b})"
                )))
            }
        }
    }
    Ok(w)
}

// ---------------------------------------------------------------------------
// k-cycle detection
// ---------------------------------------------------------------------------

/// Does `g` contain a simple cycle on exactly `k` nodes?
///
/// DFS from each anchor vertex, restricted to vertices >= the anchor so each
/// cycle is found from its minimum vertex only, pruned at depth k.
pub fn contains_k_cycle(g: &AttributedGraph, k: usize) -> Result<bool, OracleError> {
    if k < 3 || k > g.n() {
        return Err(OracleError::BadParameter(format!(
            "k = {k} outside 3..=n ({})",
            g.n()
        )));
    }
    fn dfs(
        g: &AttributedGraph,
        start: NodeId,
        v: NodeId,
        visited: &mut Vec<bool>,
        depth: usize,
        k: usize,
    ) -> bool {
        if depth == k {
            return g.has_edge(v, start);
        }
        for &u in g.neighbors(v) {
            if u > start && !visited[u as usize] {
                visited[u as usize] = true;
                if dfs(g, start, u, visited, depth + 1, k) {
                    visited[u as usize] = false;
                    return true;
                }
                visited[u as usize] = false;
            }
        }
        false
    }
    for s in 0..g.n() as NodeId {
        let mut visited = vec![false; g.n()];
        visited[s as usize] = true;
        if dfs(g, s, s, &mut visited, 1, k) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Independent k-cycle detector: enumerate k-subsets containing each anchor
/// and test whether the subset carries a Hamiltonian cycle of `g`-edges.
/// Used to cross-validate [`contains_k_cycle`]; keep the two implementations
/// structurally different.
pub fn contains_k_cycle_subsets(g: &AttributedGraph, k: usize) -> Result<bool, OracleError> {
    if k < 3 || k > g.n() {
        return Err(OracleError::BadParameter(format!(
            "k = {k} outside 3..=n ({})",
            g.n()
        )));
    }
    if g.n() > 16 {
        return Err(OracleError::Budget { n: g.n(), limit: 16 });
    }
    let nodes: Vec<NodeId> = (0..g.n() as NodeId).collect();
    let mut subset = Vec::with_capacity(k);
    fn subsets(
        g: &AttributedGraph,
        nodes: &[NodeId],
        from: usize,
        subset: &mut Vec<NodeId>,
        k: usize,
    ) -> bool {
        if subset.len() == k {
            return has_ham_cycle_on(g, subset);
        }
        for i in from..nodes.len() {
            subset.push(nodes[i]);
            if subsets(g, nodes, i + 1, subset, k) {
                subset.pop();
                return true;
            }
            subset.pop();
        }
        false
    }
    fn has_ham_cycle_on(g: &AttributedGraph, set: &[NodeId]) -> bool {
        // Permutations fixing set[0] first; closing edge checked at the end.
        let k = set.len();
        let mut order: Vec<usize> = (1..k).collect();
        loop {
            let ok = {
                let mut prev = set[0];
                let mut good = true;
                for &i in &order {
                    if !g.has_edge(prev, set[i]) {
                        good = false;
                        break;
                    }
                    prev = set[i];
                }
                good && g.has_edge(prev, set[0])
            };
            if ok {
                return true;
            }
            if !next_permutation(&mut order) {
                return false;
            }
        }
    }
    fn next_permutation(a: &mut [usize]) -> bool {
        if a.len() < 2 {
            return false;
        }
        let mut i = a.len() - 1;
        while i > 0 && a[i - 1] >= a[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = a.len() - 1;
        while a[j] <= a[i - 1] {
            j -= 1;
        }
        a.swap(i - 1, j);
        a[i..].reverse();
        true
    }
    Ok(subsets(g, &nodes, 0, &mut subset, k))
}

// ---------------------------------------------------------------------------
// Subgraph predicates
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubgraphPredicate {
    Connected,
    ContainsCycle,
    SpanningTree,
    Bipartite,
    Cut,
    StCut(NodeId, NodeId),
    HamiltonianCycle,
    SimplePath,
}

/// Evaluate a standard predicate of the marked subgraph H with respect to g.
pub fn verify_subgraph(
    g: &AttributedGraph,
    h: &SubgraphIndicator,
    predicate: SubgraphPredicate,
) -> Result<bool, OracleError> {
    h.validate(g).map_err(|e| OracleError::Indicator(e.to_string()))?;
    let h_edges = h.marked_edges(g);
    let h_nodes = h.marked_nodes();
    let mut adj: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for &v in &h_nodes {
        adj.entry(v).or_default();
    }
    for &(a, b) in &h_edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let h_connected = || -> bool {
        let Some(&start) = h_nodes.first() else { return false };
        let mut seen = std::collections::BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &u in adj.get(&v).into_iter().flatten() {
                if seen.insert(u) {
                    stack.push(u);
                }
            }
        }
        seen.len() == h_nodes.len()
    };
    let complement_connected_without = |cut_edges: &[(NodeId, NodeId)]| -> bool {
        // Is g minus the marked edges still connected?
        let keep: Vec<(NodeId, NodeId)> = g
            .edges()
            .iter()
            .copied()
            .filter(|e| !cut_edges.contains(e))
            .collect();
        let mut dsu: Vec<usize> = (0..g.n()).collect();
        fn find(dsu: &mut Vec<usize>, x: usize) -> usize {
            if dsu[x] != x {
                let r = find(dsu, dsu[x]);
                dsu[x] = r;
            }
            dsu[x]
        }
        for &(a, b) in &keep {
            let (ra, rb) = (find(&mut dsu, a as usize), find(&mut dsu, b as usize));
            dsu[ra] = rb;
        }
        let r0 = find(&mut dsu, 0);
        (1..g.n()).all(|v| find(&mut dsu, v) == r0)
    };
    Ok(match predicate {
        SubgraphPredicate::Connected => !h_nodes.is_empty() && h_connected(),
        SubgraphPredicate::ContainsCycle => {
            // H has a cycle iff some component has at least as many edges
            // as vertices.
            let mut comp_of: BTreeMap<NodeId, usize> = Default::default();
            let mut comp_count = 0usize;
            for &root in &h_nodes {
                if comp_of.contains_key(&root) {
                    continue;
                }
                comp_of.insert(root, comp_count);
                let mut stack = vec![root];
                while let Some(v) = stack.pop() {
                    for &u in adj.get(&v).into_iter().flatten() {
                        if !comp_of.contains_key(&u) {
                            comp_of.insert(u, comp_count);
                            stack.push(u);
                        }
                    }
                }
                comp_count += 1;
            }
            let mut nodes_in = vec![0usize; comp_count];
            let mut edges_in = vec![0usize; comp_count];
            for &v in &h_nodes {
                nodes_in[comp_of[&v]] += 1;
            }
            for &(a, _) in &h_edges {
                edges_in[comp_of[&a]] += 1;
            }
            (0..comp_count).any(|c| edges_in[c] >= nodes_in[c])
        }
        SubgraphPredicate::SpanningTree => {
            h_nodes.len() == g.n() && h_edges.len() == g.n() - 1 && h_connected()
        }
        SubgraphPredicate::Bipartite => {
            let mut color: BTreeMap<NodeId, bool> = Default::default();
            let mut ok = true;
            for &root in &h_nodes {
                if color.contains_key(&root) {
                    continue;
                }
                color.insert(root, false);
                let mut stack = vec![root];
                while let Some(v) = stack.pop() {
                    let cv = color[&v];
                    for &u in adj.get(&v).into_iter().flatten() {
                        match color.get(&u) {
                            Some(&cu) if cu == cv => ok = false,
                            Some(_) => {}
                            None => {
                                color.insert(u, !cv);
                                stack.push(u);
                            }
                        }
                    }
                }
            }
            ok
        }
        SubgraphPredicate::Cut => !h_edges.is_empty() && !complement_connected_without(&h_edges),
        SubgraphPredicate::StCut(s, t) => {
            if s == t || s as usize >= g.n() || t as usize >= g.n() {
                return Err(OracleError::MissingTerminals);
            }
            let keep: Vec<(NodeId, NodeId)> = g
                .edges()
                .iter()
                .copied()
                .filter(|e| !h_edges.contains(e))
                .collect();
            let sub = AttributedGraph::build_disconnected(g.n(), &keep, vec![Vec::new(); g.n()])
                .expect("edge subset of a valid graph");
            sub.bfs_distances(s)[t as usize] == usize::MAX
        }
        SubgraphPredicate::HamiltonianCycle => {
            h_nodes.len() == g.n()
                && h_edges.len() == g.n()
                && h_nodes.iter().all(|v| adj[v].len() == 2)
                && h_connected()
        }
        SubgraphPredicate::SimplePath => {
            if h_nodes.is_empty() || h_edges.len() + 1 != h_nodes.len() || !h_connected() {
                false
            } else {
                let degs: Vec<usize> = h_nodes.iter().map(|v| adj[v].len()).collect();
                let ones = degs.iter().filter(|&&d| d == 1).count();
                let twos = degs.iter().filter(|&&d| d == 2).count();
                (ones == 2 && ones + twos == h_nodes.len())
                    || (h_nodes.len() == 1 && h_edges.is_empty())
            }
        }
    })
}

// ---------------------------------------------------------------------------
// Shortest path / MST / min cut
// ---------------------------------------------------------------------------

/// Exhaustive shortest simple path; ties broken by the lexicographically
/// smallest node sequence.
pub fn shortest_path(
    g: &AttributedGraph,
    weights: Option<&WeightMap>,
    s: NodeId,
    t: NodeId,
) -> Result<Solution, OracleError> {
    if s == t {
        return Err(OracleError::BadParameter("s == t".into()));
    }
    let w = check_weights(g, &weights.cloned())?;
    let mut best: Option<(Weight, Vec<NodeId>)> = None;
    fn dfs(
        g: &AttributedGraph,
        w: &WeightMap,
        t: NodeId,
        path: &mut Vec<NodeId>,
        visited: &mut Vec<bool>,
        acc: Weight,
        best: &mut Option<(Weight, Vec<NodeId>)>,
    ) {
        let v = *path.last().unwrap();
        if v == t {
            let better = match best {
                None => true,
                Some((bw, bp)) => acc < *bw || (acc == *bw && path[..] < bp[..]),
            };
            if better {
                *best = Some((acc, path.clone()));
            }
            return;
        }
        for &u in g.neighbors(v) {
            if !visited[u as usize] {
                visited[u as usize] = true;
                path.push(u);
                dfs(g, w, t, path, visited, acc + weight_of(w, v, u), best);
                path.pop();
                visited[u as usize] = false;
            }
        }
    }
    let mut visited = vec![false; g.n()];
    visited[s as usize] = true;
    dfs(g, &w, t, &mut vec![s], &mut visited, Weight::from_integer(0), &mut best);
    let (obj, path) = best.expect("graph is connected");
    let edges: Vec<(NodeId, NodeId)> = path
        .windows(2)
        .map(|p| (p[0].min(p[1]), p[0].max(p[1])))
        .collect();
    Ok(Solution::EdgeSet {
        edges,
        objective_num: *obj.numer(),
        objective_den: *obj.denom(),
    })
}

/// Exact minimum spanning tree (Kruskal), ties broken by edge order.
pub fn min_spanning_tree(
    g: &AttributedGraph,
    weights: Option<&WeightMap>,
) -> Result<Solution, OracleError> {
    let w = check_weights(g, &weights.cloned())?;
    let mut order: Vec<(NodeId, NodeId)> = g.edges().to_vec();
    order.sort_by(|&a, &b| weight_of(&w, a.0, a.1).cmp(&weight_of(&w, b.0, b.1)).then(a.cmp(&b)));
    let mut dsu: Vec<usize> = (0..g.n()).collect();
    fn find(dsu: &mut Vec<usize>, x: usize) -> usize {
        if dsu[x] != x {
            let r = find(dsu, dsu[x]);
            dsu[x] = r;
        }
        dsu[x]
    }
    let mut picked = Vec::new();
    let mut total = Weight::from_integer(0);
    for (a, b) in order {
        let (ra, rb) = (find(&mut dsu, a as usize), find(&mut dsu, b as usize));
        if ra != rb {
            dsu[ra] = rb;
            total += weight_of(&w, a, b);
            picked.push((a, b));
        }
    }
    picked.sort_unstable();
    Ok(Solution::EdgeSet {
        edges: picked,
        objective_num: *total.numer(),
        objective_den: *total.denom(),
    })
}

/// Exact global minimum cut by bipartition enumeration.
pub fn min_cut(g: &AttributedGraph, weights: Option<&WeightMap>) -> Result<Solution, OracleError> {
    const LIMIT: usize = 20;
    if g.n() > LIMIT {
        return Err(OracleError::Budget { n: g.n(), limit: LIMIT });
    }
    let w = check_weights(g, &weights.cloned())?;
    let mut best: Option<(Weight, u64)> = None;
    // Fix node 0 on one side; enumerate the rest.
    for side in 0u64..1 << (g.n() - 1) {
        let side = side << 1; // node 0 has bit 0 = 0
        let mut cutw = Weight::from_integer(0);
        for &(a, b) in g.edges() {
            if (side >> a & 1) != (side >> b & 1) {
                cutw += weight_of(&w, a, b);
            }
        }
        if side.count_ones() == 0 || side.count_ones() as usize == g.n() {
            continue;
        }
        let better = match &best {
            None => true,
            Some((bw, bs)) => cutw < *bw || (cutw == *bw && side < *bs),
        };
        if better {
            best = Some((cutw, side));
        }
    }
    let (obj, side) = best.expect("n >= 2 has a cut");
    let edges: Vec<(NodeId, NodeId)> = g
        .edges()
        .iter()
        .copied()
        .filter(|&(a, b)| (side >> a & 1) != (side >> b & 1))
        .collect();
    Ok(Solution::EdgeSet {
        edges,
        objective_num: *obj.numer(),
        objective_den: *obj.denom(),
    })
}

// ---------------------------------------------------------------------------
// MIS / MVC / coloring
// ---------------------------------------------------------------------------

const EXP_LIMIT: usize = 24;

fn exp_guard(g: &AttributedGraph) -> Result<(), OracleError> {
    if g.n() > EXP_LIMIT {
        return Err(OracleError::Budget {
            n: g.n(),
            limit: EXP_LIMIT,
        });
    }
    Ok(())
}

/// Maximum independent set; ties broken by lexicographically smallest set.
pub fn max_independent_set(g: &AttributedGraph) -> Result<Solution, OracleError> {
    exp_guard(g)?;
    let n = g.n();
    let adj: Vec<u32> = (0..n)
        .map(|v| {
            g.neighbors(v as NodeId)
                .iter()
                .fold(0u32, |m, &u| m | 1 << u)
        })
        .collect();
    let mut best: (usize, u32) = (0, 0);
    // Branch on the lowest eligible vertex: include or exclude.
    fn branch(adj: &[u32], n: usize, v: usize, chosen: u32, blocked: u32, best: &mut (usize, u32)) {
        if v == n {
            let size = chosen.count_ones() as usize;
            if size > best.0 || (size == best.0 && lex_smaller(chosen, best.1)) {
                *best = (size, chosen);
            }
            return;
        }
        // Prune: even taking all remaining cannot beat best.
        if chosen.count_ones() as usize + (n - v) < best.0 {
            return;
        }
        if blocked >> v & 1 == 0 {
            branch(adj, n, v + 1, chosen | 1 << v, blocked | adj[v], best);
        }
        branch(adj, n, v + 1, chosen, blocked, best);
    }
    fn lex_smaller(a: u32, b: u32) -> bool {
        // Smaller node set in lexicographic order of member lists.
        let mut av: Vec<u32> = (0..32).filter(|k| a >> k & 1 == 1).collect();
        let mut bv: Vec<u32> = (0..32).filter(|k| b >> k & 1 == 1).collect();
        av.sort_unstable();
        bv.sort_unstable();
        av < bv
    }
    branch(&adj, n, 0, 0, 0, &mut best);
    let nodes: Vec<NodeId> = (0..n as u32).filter(|&v| best.1 >> v & 1 == 1).collect();
    Ok(Solution::NodeSet {
        objective: nodes.len() as i64,
        nodes,
    })
}

/// Minimum vertex cover, solved by its own subset search (kept independent
/// of the MIS solver so complementarity is a real cross-check).
pub fn min_vertex_cover(g: &AttributedGraph) -> Result<Solution, OracleError> {
    exp_guard(g)?;
    let n = g.n();
    let mut best: Option<(usize, u32)> = None;
    fn covers(g: &AttributedGraph, set: u32) -> bool {
        g.edges()
            .iter()
            .all(|&(a, b)| set >> a & 1 == 1 || set >> b & 1 == 1)
    }
    // Iterate by popcount so the first cover found has minimum size; among
    // equal sizes the numeric mask order matches lexicographic set order.
    for size in 0..=n {
        let mut found: Option<u32> = None;
        // Gosper's hack over masks of the given popcount.
        if size == 0 {
            if covers(g, 0) {
                found = Some(0);
            }
        } else {
            let mut mask = (1u32 << size) - 1;
            let limit = 1u32 << n;
            while mask < limit {
                if covers(g, mask) {
                    found = Some(mask);
                    break;
                }
                let c = mask & mask.wrapping_neg();
                let r = mask + c;
                mask = (((r ^ mask) >> 2) / c) | r;
                if c == 0 {
                    break;
                }
            }
        }
        if let Some(mask) = found {
            best = Some((size, mask));
            break;
        }
    }
    let (size, mask) = best.expect("full vertex set always covers");
    let nodes: Vec<NodeId> = (0..n as u32).filter(|&v| mask >> v & 1 == 1).collect();
    Ok(Solution::NodeSet {
        objective: size as i64,
        nodes,
    })
}

/// Chromatic-number coloring: smallest k admitting a proper coloring,
/// by backtracking with the first color class anchored.
pub fn perfect_coloring(g: &AttributedGraph) -> Result<Solution, OracleError> {
    exp_guard(g)?;
    let n = g.n();
    fn try_color(g: &AttributedGraph, k: u32, colors: &mut Vec<u32>, v: usize) -> bool {
        if v == g.n() {
            return true;
        }
        // Symmetry break: vertex v may use at most (max color so far) + 1.
        let cap = colors[..v].iter().copied().max().map_or(0, |m| m + 1).min(k - 1);
        for c in 0..=cap {
            if g.neighbors(v as NodeId)
                .iter()
                .all(|&u| (u as usize) >= v || colors[u as usize] != c)
            {
                colors[v] = c;
                if try_color(g, k, colors, v + 1) {
                    return true;
                }
            }
        }
        false
    }
    for k in 1..=n as u32 {
        let mut colors = vec![0u32; n];
        if try_color(g, k, &mut colors, 0) {
            return Ok(Solution::Coloring { colors, count: k });
        }
    }
    unreachable!("n colors always suffice")
}

// ---------------------------------------------------------------------------
// Approximation ratio
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

/// ALG / OPT. For minimization a ratio in [1, alpha]; for maximization in
/// [1/alpha, 1].
pub fn approximation_ratio(alg: Weight, opt: Weight, _sense: Sense) -> Result<Weight, OracleError> {
    if opt <= Weight::from_integer(0) {
        return Err(OracleError::ZeroOptimum);
    }
    Ok(alg / opt)
}

/// Maximal-matching 2-approximation for vertex cover, the demonstrator used
/// in ratio measurements.
pub fn two_approx_vertex_cover(g: &AttributedGraph) -> Vec<NodeId> {
    let mut covered = vec![false; g.n()];
    let mut out = Vec::new();
    for &(a, b) in g.edges() {
        if !covered[a as usize] && !covered[b as usize] {
            covered[a as usize] = true;
            covered[b as usize] = true;
            out.push(a);
            out.push(b);
        }
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::random_connected_graph;

    #[test]
    fn k_cycle_on_cycles() {
        let c6 = AttributedGraph::cycle(6);
        assert!(contains_k_cycle(&c6, 6).unwrap());
        assert!(!contains_k_cycle(&c6, 4).unwrap());
        assert!(!contains_k_cycle(&c6, 3).unwrap());
        assert!(contains_k_cycle(&c6, 2).is_err());
        assert!(contains_k_cycle(&c6, 7).is_err());
    }

    #[test]
    fn k_cycle_two_triangles_bridged() {
        let g = AttributedGraph::unattributed(
            6,
            &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)],
        )
        .unwrap();
        assert!(contains_k_cycle(&g, 3).unwrap());
        assert!(!contains_k_cycle(&g, 4).unwrap());
        assert!(!contains_k_cycle(&g, 6).unwrap());
    }

    #[test]
    fn detectors_agree_on_random_graphs() {
        for seed in 0..30 {
            let g = random_connected_graph(8, 0.3, seed);
            for k in 3..=8 {
                assert_eq!(
                    contains_k_cycle(&g, k).unwrap(),
                    contains_k_cycle_subsets(&g, k).unwrap(),
                    "seed {seed} k {k}"
                );
            }
        }
    }

    #[test]
    fn subgraph_predicates_basic() {
        let g = AttributedGraph::complete(4);
        let tree = SubgraphIndicator::from_edges(&g, &[(0, 1), (0, 2), (0, 3)]);
        assert!(verify_subgraph(&g, &tree, SubgraphPredicate::SpanningTree).unwrap());
        assert!(verify_subgraph(&g, &tree, SubgraphPredicate::Connected).unwrap());
        assert!(!verify_subgraph(&g, &tree, SubgraphPredicate::ContainsCycle).unwrap());
        assert!(verify_subgraph(&g, &tree, SubgraphPredicate::Bipartite).unwrap());

        let single = SubgraphIndicator::from_edges(&g, &[(0, 1)]);
        assert!(!verify_subgraph(&g, &single, SubgraphPredicate::HamiltonianCycle).unwrap());
        let ham = SubgraphIndicator::from_edges(&g, &[(0, 1), (1, 2), (2, 3), (0, 3)]);
        assert!(verify_subgraph(&g, &ham, SubgraphPredicate::HamiltonianCycle).unwrap());
        assert!(verify_subgraph(&g, &ham, SubgraphPredicate::ContainsCycle).unwrap());
    }

    #[test]
    fn cut_predicate_matches_complement_connectivity() {
        // All edges incident to one node of C6: removing them isolates it.
        let g = AttributedGraph::cycle(6);
        let star = SubgraphIndicator::from_edges(&g, &[(0, 1), (5, 0)]);
        assert!(verify_subgraph(&g, &star, SubgraphPredicate::Cut).unwrap());
        let one = SubgraphIndicator::from_edges(&g, &[(0, 1)]);
        assert!(!verify_subgraph(&g, &one, SubgraphPredicate::Cut).unwrap());
        assert!(verify_subgraph(&g, &one, SubgraphPredicate::StCut(0, 1)).is_ok());
    }

    #[test]
    fn st_cut_needs_terminals_in_range() {
        let g = AttributedGraph::cycle(4);
        let h = SubgraphIndicator::from_edges(&g, &[(0, 1), (2, 3)]);
        assert!(verify_subgraph(&g, &h, SubgraphPredicate::StCut(0, 2)).unwrap());
        assert!(matches!(
            verify_subgraph(&g, &h, SubgraphPredicate::StCut(0, 0)),
            Err(OracleError::MissingTerminals)
        ));
    }

    #[test]
    fn shortest_path_on_c6() {
        let g = AttributedGraph::cycle(6);
        match shortest_path(&g, None, 0, 3).unwrap() {
            Solution::EdgeSet {
                objective_num,
                objective_den,
                edges,
            } => {
                assert_eq!((objective_num, objective_den), (3, 1));
                assert_eq!(edges.len(), 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn shortest_path_scales_with_uniform_weights() {
        let g = AttributedGraph::cycle(6);
        let w: WeightMap = g
            .edges()
            .iter()
            .map(|&e| (e, Weight::new(7, 2)))
            .collect();
        match shortest_path(&g, Some(&w), 0, 2).unwrap() {
            Solution::EdgeSet {
                objective_num,
                objective_den,
                ..
            } => assert_eq!((objective_num, objective_den), (7, 1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mst_unit_weights_has_objective_n_minus_one() {
        let g = AttributedGraph::complete(5);
        match min_spanning_tree(&g, None).unwrap() {
            Solution::EdgeSet {
                objective_num,
                objective_den,
                edges,
            } => {
                assert_eq!((objective_num, objective_den), (4, 1));
                assert_eq!(edges.len(), 4);
                let ind = SubgraphIndicator::from_edges(&g, &edges);
                assert!(verify_subgraph(&g, &ind, SubgraphPredicate::SpanningTree).unwrap());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn min_cut_of_tree_is_lightest_edge() {
        let g = AttributedGraph::path(4);
        let mut w = WeightMap::new();
        w.insert((0, 1), Weight::from_integer(5));
        w.insert((1, 2), Weight::from_integer(2));
        w.insert((2, 3), Weight::from_integer(9));
        match min_cut(&g, Some(&w)).unwrap() {
            Solution::EdgeSet {
                edges,
                objective_num,
                objective_den,
            } => {
                assert_eq!(edges, vec![(1, 2)]);
                assert_eq!((objective_num, objective_den), (2, 1));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mis_mvc_coloring_on_c6_and_k4() {
        let c6 = AttributedGraph::cycle(6);
        let k4 = AttributedGraph::complete(4);
        match (max_independent_set(&c6).unwrap(), min_vertex_cover(&c6).unwrap()) {
            (Solution::NodeSet { objective: mis, .. }, Solution::NodeSet { objective: mvc, .. }) => {
                assert_eq!((mis, mvc), (3, 3));
            }
            _ => unreachable!(),
        }
        match perfect_coloring(&c6).unwrap() {
            Solution::Coloring { count, .. } => assert_eq!(count, 2),
            _ => unreachable!(),
        }
        match (max_independent_set(&k4).unwrap(), min_vertex_cover(&k4).unwrap()) {
            (Solution::NodeSet { objective: mis, .. }, Solution::NodeSet { objective: mvc, .. }) => {
                assert_eq!((mis, mvc), (1, 3));
            }
            _ => unreachable!(),
        }
        match perfect_coloring(&k4).unwrap() {
            Solution::Coloring { count, .. } => assert_eq!(count, 4),
            _ => unreachable!(),
        }
    }

    #[test]
    fn mis_plus_mvc_equals_n_on_random_graphs() {
        for seed in 0..25 {
            let g = random_connected_graph(10, 0.25, 1000 + seed);
            let mis = match max_independent_set(&g).unwrap() {
                Solution::NodeSet { objective, .. } => objective,
                _ => unreachable!(),
            };
            let mvc = match min_vertex_cover(&g).unwrap() {
                Solution::NodeSet { objective, .. } => objective,
                _ => unreachable!(),
            };
            assert_eq!(mis + mvc, g.n() as i64, "seed {seed}");
        }
    }

    #[test]
    fn budget_guard_fires() {
        let g = AttributedGraph::cycle(25);
        assert!(matches!(
            max_independent_set(&g),
            Err(OracleError::Budget { .. })
        ));
    }

    #[test]
    fn approximation_ratio_contract() {
        let r = approximation_ratio(Weight::from_integer(10), Weight::from_integer(10), Sense::Min)
            .unwrap();
        assert_eq!(r, Weight::from_integer(1));
        let r = approximation_ratio(Weight::from_integer(15), Weight::from_integer(10), Sense::Min)
            .unwrap();
        assert_eq!(r, Weight::new(3, 2));
        assert!(approximation_ratio(
            Weight::from_integer(1),
            Weight::from_integer(0),
            Sense::Min
        )
        .is_err());
    }

    #[test]
    fn two_approx_cover_ratio_within_two() {
        for seed in 0..15 {
            let g = random_connected_graph(12, 0.3, 7000 + seed);
            let approx = two_approx_vertex_cover(&g);
            // Feasibility.
            assert!(g
                .edges()
                .iter()
                .all(|&(a, b)| approx.contains(&a) || approx.contains(&b)));
            let opt = match min_vertex_cover(&g).unwrap() {
                Solution::NodeSet { objective, .. } => objective,
                _ => unreachable!(),
            };
            let ratio = approximation_ratio(
                Weight::from_integer(approx.len() as i64),
                Weight::from_integer(opt),
                Sense::Min,
            )
            .unwrap();
            assert!(ratio >= Weight::from_integer(1) && ratio <= Weight::from_integer(2));
        }
    }

    #[test]
    fn oracles_invariant_under_relabeling() {
        for seed in 0..10 {
            let g = random_connected_graph(9, 0.3, 4000 + seed);
            let perm: Vec<NodeId> = {
                use rand::seq::SliceRandom;
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let mut p: Vec<NodeId> = (0..9).collect();
                p.shuffle(&mut rng);
                p
            };
            let h = g.relabel(&perm).unwrap();
            for k in 3..=6 {
                assert_eq!(
                    contains_k_cycle(&g, k).unwrap(),
                    contains_k_cycle(&h, k).unwrap()
                );
            }
            let mis_g = match max_independent_set(&g).unwrap() {
                Solution::NodeSet { objective, .. } => objective,
                _ => unreachable!(),
            };
            let mis_h = match max_independent_set(&h).unwrap() {
                Solution::NodeSet { objective, .. } => objective,
                _ => unreachable!(),
            };
            assert_eq!(mis_g, mis_h);
        }
    }
}
