//! Synchronous round-based simulator with exact bit accounting.
//!
//! Execution follows the standard synchronous model: before round 1 every
//! directed edge (including each node's self-loop) carries an initial
//! message encoding the sender's attribute and id; in round `l` each node
//! computes its new state from the multiset of received (message, edge
//! attribute) pairs and its own id, then sends a message derived from that
//! state along every outgoing edge. States and messages are length-explicit
//! bit strings.
//!
//! The bandwidth-bounded variant caps every message, initial round
//! included, at `b` bits and fails on the first violation.
//!
//! Algorithms receive a [`RoundCtx`] carrying the round index and the id
//! domain size `n`. Both are model-level knowledge: the round counter could
//! equivalently ride in the state for O(log d) extra bits, and fixed-width
//! id fields presuppose ids drawn from a known domain of size n.

use crate::bits::{
    push_attr_vec, push_node_id, read_attr_vec, read_node_id, BitReader, BitString, CodecError,
};
use crate::graph::{AttrVec, AttributedGraph, NodeId};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("bandwidth violation in round {round}: message on edge ({from} -> {to}) is {bits} bits, budget {budget}")]
    Bandwidth {
        round: usize,
        from: NodeId,
        to: NodeId,
        bits: usize,
        budget: usize,
    },
    #[error("bounded bandwidth required; got unbounded")]
    UnboundedBudget,
    #[error("invalid budget: {0}")]
    BadBudget(String),
    #[error("partition does not cover all nodes exactly once")]
    BadPartition,
    #[error("terminal state of node {0} does not decode to a boolean")]
    NonBooleanTerminal(NodeId),
    #[error("algorithm decode failure at node {node}, round {round}: {err}")]
    Decode {
        node: NodeId,
        round: usize,
        err: CodecError,
    },
}

/// Message budget for the bandwidth-bounded model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BandwidthBudget {
    Unbounded,
    Bits(usize),
}

impl BandwidthBudget {
    pub fn bounded(b: usize) -> Result<BandwidthBudget, SimError> {
        if b == 0 {
            return Err(SimError::BadBudget("budget must be >= 1".into()));
        }
        Ok(BandwidthBudget::Bits(b))
    }
}

/// Model context handed to every algorithm callback.
#[derive(Debug, Clone, Copy)]
pub struct RoundCtx {
    /// Current round, 1-based; 0 for initialization.
    pub round: usize,
    /// Id domain size (the number of nodes).
    pub n: usize,
}

/// A node's complete initial knowledge, before any computation: its own
/// attribute and id, and per open neighbor the initialization tuple
/// (attribute, id) together with the attribute of the edge into this node.
#[derive(Debug, Clone)]
pub struct InitInfo {
    pub attr: AttrVec,
    pub id: NodeId,
    /// (neighbor attribute, neighbor id, edge attribute into this node).
    pub neighbors: Vec<(AttrVec, NodeId, AttrVec)>,
}

/// One received item: the message string plus the attribute of the edge it
/// arrived on (empty for the self-loop).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Received {
    pub message: BitString,
    pub edge_attr: AttrVec,
}

/// A deterministic per-node algorithm: the same procedure runs at every
/// node, parameterized only by local information.
pub trait NodeAlgorithm: Send + Sync {
    /// State before any communication.
    fn init_state(&self, info: &InitInfo, ctx: &RoundCtx) -> BitString;

    /// The initial wave on the wire: one message per outgoing edge, a
    /// function of the sender's initial knowledge. The default is the bare
    /// initialization tuple (attribute, id); algorithms whose semantics
    /// need the whole local view in the first exchange may encode more.
    fn init_message(&self, info: &InitInfo, ctx: &RoundCtx) -> BitString {
        let mut out = BitString::new();
        push_attr_vec(&mut out, &info.attr);
        push_node_id(&mut out, info.id, ctx.n);
        out
    }

    /// New state from the received multiset. `inbox` is sorted canonically,
    /// so implementations see a multiset, not an ordering.
    fn update(&self, inbox: &[Received], id: NodeId, ctx: &RoundCtx)
        -> Result<BitString, SimError>;

    /// Outgoing message for the current state.
    fn message(&self, state: &BitString, id: NodeId, ctx: &RoundCtx)
        -> Result<BitString, SimError>;
}

/// Full execution record: states for rounds 0..=d and the messages sent in
/// each of those rounds (round 0 being initialization). Every round carries
/// exactly 2|E| + n messages, one per directed edge of the self-loop closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub rounds: usize,
    /// states[l][v] is the state of vertex v after round l.
    pub states: Vec<Vec<BitString>>,
    /// messages[l] maps (receiver, sender) to the message sent in round l.
    pub messages: Vec<BTreeMap<(NodeId, NodeId), BitString>>,
}

impl Transcript {
    pub fn terminal_states(&self) -> &[BitString] {
        self.states.last().expect("at least round 0")
    }

    /// Exact bit size of the message sent from `j` to `i` in round `l`.
    pub fn message_bits(&self, l: usize, i: NodeId, j: NodeId) -> Option<usize> {
        self.messages.get(l).and_then(|m| m.get(&(i, j))).map(BitString::len)
    }

    pub fn total_message_bits(&self) -> usize {
        self.messages
            .iter()
            .flat_map(|m| m.values())
            .map(BitString::len)
            .sum()
    }
}

fn directed_closure(g: &AttributedGraph) -> Vec<(NodeId, NodeId)> {
    // (receiver, sender) pairs over E*, self-loops included.
    let mut out = Vec::with_capacity(2 * g.edge_count() + g.n());
    for i in 0..g.n() as NodeId {
        out.push((i, i));
        for &j in g.neighbors(i) {
            out.push((i, j));
        }
    }
    out
}

/// The initial knowledge of vertex `v` in `g`.
pub fn init_info(g: &AttributedGraph, v: NodeId) -> InitInfo {
    InitInfo {
        attr: g.node_attr(v).clone(),
        id: g.id_of(v),
        neighbors: g
            .neighbors(v)
            .iter()
            .map(|&j| (g.node_attr(j).clone(), g.id_of(j), g.edge_attr_into(v, j).to_vec()))
            .collect(),
    }
}

fn run(
    g: &AttributedGraph,
    alg: &dyn NodeAlgorithm,
    d: usize,
    budget: Option<usize>,
) -> Result<Transcript, SimError> {
    let n = g.n();
    let edges = directed_closure(g);
    let check = |round: usize, to: NodeId, from: NodeId, msg: &BitString| -> Result<(), SimError> {
        if let Some(b) = budget {
            if msg.len() > b {
                return Err(SimError::Bandwidth {
                    round,
                    from,
                    to,
                    bits: msg.len(),
                    budget: b,
                });
            }
        }
        Ok(())
    };

    let ctx0 = RoundCtx { round: 0, n };
    let infos: Vec<InitInfo> = (0..n as NodeId).map(|v| init_info(g, v)).collect();
    let mut states: Vec<Vec<BitString>> =
        vec![infos.iter().map(|info| alg.init_state(info, &ctx0)).collect()];
    let mut messages: Vec<BTreeMap<(NodeId, NodeId), BitString>> = Vec::new();

    let init_msgs: Vec<BitString> = infos
        .iter()
        .map(|info| alg.init_message(info, &ctx0))
        .collect();
    let mut round0 = BTreeMap::new();
    for &(i, j) in &edges {
        let m = init_msgs[j as usize].clone();
        check(0, i, j, &m)?;
        round0.insert((i, j), m);
    }
    messages.push(round0);

    for l in 1..=d {
        let ctx = RoundCtx { round: l, n };
        let prev = &messages[l - 1];
        let mut next_states = Vec::with_capacity(n);
        for v in 0..n as NodeId {
            let mut inbox: Vec<Received> = g
                .closed_neighbors(v)
                .iter()
                .map(|&j| Received {
                    message: prev[&(v, j)].clone(),
                    edge_attr: if j == v {
                        Vec::new()
                    } else {
                        g.edge_attr_into(v, j).to_vec()
                    },
                })
                .collect();
            // Canonical multiset order.
            inbox.sort_unstable();
            next_states.push(alg.update(&inbox, g.id_of(v), &ctx)?);
        }
        let mut round_msgs = BTreeMap::new();
        for &(i, j) in &edges {
            let m = alg.message(&next_states[j as usize], g.id_of(j), &ctx)?;
            check(l, i, j, &m)?;
            round_msgs.insert((i, j), m);
        }
        states.push(next_states);
        messages.push(round_msgs);
    }
    Ok(Transcript {
        rounds: d,
        states,
        messages,
    })
}

/// Unbounded-bandwidth execution for `d` rounds.
pub fn run_local(
    g: &AttributedGraph,
    alg: &dyn NodeAlgorithm,
    d: usize,
) -> Result<Transcript, SimError> {
    run(g, alg, d, None)
}

/// Bandwidth-bounded execution; every message of every round must fit the
/// budget or the run fails with the offending round, edge, and size.
pub fn run_congest(
    g: &AttributedGraph,
    alg: &dyn NodeAlgorithm,
    d: usize,
    budget: BandwidthBudget,
) -> Result<Transcript, SimError> {
    match budget {
        BandwidthBudget::Unbounded => Err(SimError::UnboundedBudget),
        BandwidthBudget::Bits(b) => run(g, alg, d, Some(b)),
    }
}

/// Conjunction decision over boolean terminal states: accept iff every node
/// accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Accept,
    Reject,
}

pub fn decide(terminal_states: &[BitString]) -> Result<Decision, SimError> {
    let mut all = true;
    for (v, s) in terminal_states.iter().enumerate() {
        if s.len() != 1 {
            return Err(SimError::NonBooleanTerminal(v as NodeId));
        }
        all &= s.get(0).unwrap();
    }
    Ok(if all { Decision::Accept } else { Decision::Reject })
}

/// Per-round and total bits crossing a node bipartition. Self-messages never
/// cross; messages in both directions count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutTraffic {
    pub per_round: Vec<usize>,
    pub total: usize,
    pub crossing_edges: usize,
}

pub fn cut_traffic(
    g: &AttributedGraph,
    t: &Transcript,
    side_a: &[NodeId],
) -> Result<CutTraffic, SimError> {
    let mut in_a = vec![false; g.n()];
    for &v in side_a {
        if v as usize >= g.n() || in_a[v as usize] {
            return Err(SimError::BadPartition);
        }
        in_a[v as usize] = true;
    }
    if side_a.is_empty() || side_a.len() == g.n() {
        return Err(SimError::BadPartition);
    }
    let crossing_edges = g
        .edges()
        .iter()
        .filter(|&&(a, b)| in_a[a as usize] != in_a[b as usize])
        .count();
    let per_round: Vec<usize> = t
        .messages
        .iter()
        .map(|round| {
            round
                .iter()
                .filter(|(&(i, j), _)| i != j && in_a[i as usize] != in_a[j as usize])
                .map(|(_, m)| m.len())
                .sum()
        })
        .collect();
    let total = per_round.iter().sum();
    Ok(CutTraffic {
        per_round,
        total,
        crossing_edges,
    })
}

// ---------------------------------------------------------------------------
// Graph-knowledge states (the union algorithm)
// ---------------------------------------------------------------------------

/// Partial knowledge of an attributed graph: node records plus edge records
/// with per-direction attributes, each direction possibly still unknown.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Knowledge {
    pub nodes: BTreeMap<NodeId, AttrVec>,
    /// Keyed by (lo, hi); values are (attr into lo, attr into hi), None when
    /// that direction has not been observed yet.
    pub edges: BTreeMap<(NodeId, NodeId), (Option<AttrVec>, Option<AttrVec>)>,
}

impl Knowledge {
    pub fn merge(&mut self, other: &Knowledge) {
        for (id, attr) in &other.nodes {
            self.nodes.entry(*id).or_insert_with(|| attr.clone());
        }
        for (key, (lo, hi)) in &other.edges {
            let entry = self.edges.entry(*key).or_insert((None, None));
            if entry.0.is_none() {
                entry.0 = lo.clone();
            }
            if entry.1.is_none() {
                entry.1 = hi.clone();
            }
        }
    }

    /// The full knowledge of an attributed graph, id-labeled.
    pub fn of_graph(g: &AttributedGraph) -> Knowledge {
        let mut k = Knowledge::default();
        for v in 0..g.n() as NodeId {
            k.nodes.insert(g.id_of(v), g.node_attr(v).clone());
        }
        for &(a, b) in g.edges() {
            let (ia, ib) = (g.id_of(a), g.id_of(b));
            let (lo, hi) = (ia.min(ib), ia.max(ib));
            // Attribute stored per direction in id space.
            let (into_lo, into_hi) = if ia < ib {
                (g.edge_attr_into(a, b).to_vec(), g.edge_attr_into(b, a).to_vec())
            } else {
                (g.edge_attr_into(b, a).to_vec(), g.edge_attr_into(a, b).to_vec())
            };
            k.edges.insert((lo, hi), (Some(into_lo), Some(into_hi)));
        }
        k
    }

    pub fn encode(&self, n: usize) -> BitString {
        let mut out = BitString::new();
        out.push_gamma(self.nodes.len() as u64);
        for (id, attr) in &self.nodes {
            push_node_id(&mut out, *id, n);
            push_attr_vec(&mut out, attr);
        }
        out.push_gamma(self.edges.len() as u64);
        for ((lo, hi), (a_lo, a_hi)) in &self.edges {
            push_node_id(&mut out, *lo, n);
            push_node_id(&mut out, *hi, n);
            for side in [a_lo, a_hi] {
                match side {
                    Some(a) => {
                        out.push(true);
                        push_attr_vec(&mut out, a);
                    }
                    None => out.push(false),
                }
            }
        }
        out
    }

    pub fn decode(r: &mut BitReader, n: usize) -> Result<Knowledge, CodecError> {
        let mut k = Knowledge::default();
        let nodes = r.read_gamma()? as usize;
        for _ in 0..nodes {
            let id = read_node_id(r, n)?;
            let attr = read_attr_vec(r)?;
            k.nodes.insert(id, attr);
        }
        let edges = r.read_gamma()? as usize;
        for _ in 0..edges {
            let lo = read_node_id(r, n)?;
            let hi = read_node_id(r, n)?;
            let mut sides = [None, None];
            for side in &mut sides {
                if r.read_bit()? {
                    *side = Some(read_attr_vec(r)?);
                }
            }
            let [a_lo, a_hi] = sides;
            k.edges.insert((lo, hi), (a_lo, a_hi));
        }
        Ok(k)
    }

    pub fn decode_state(s: &BitString, n: usize) -> Result<Knowledge, CodecError> {
        let mut r = s.reader();
        let k = Knowledge::decode(&mut r, n)?;
        r.expect_end()?;
        Ok(k)
    }
}

/// The local star of a node as a knowledge set: its own record, its
/// neighbors' records, and the incident edges with the attribute of the
/// incoming direction (the outgoing direction is not part of the node's
/// initial knowledge).
pub fn star_knowledge(info: &InitInfo) -> Knowledge {
    let mut k = Knowledge::default();
    k.nodes.insert(info.id, info.attr.clone());
    for (attr, nid, edge_attr) in &info.neighbors {
        k.nodes.insert(*nid, attr.clone());
        let (lo, hi) = (info.id.min(*nid), info.id.max(*nid));
        let entry = k.edges.entry((lo, hi)).or_insert((None, None));
        if info.id == lo {
            entry.0 = Some(edge_attr.clone());
        } else {
            entry.1 = Some(edge_attr.clone());
        }
    }
    k
}

/// Flooding by set union: the state is a knowledge set, each round merged
/// with every received one. The initial wave carries each node's local
/// star (a function of its initial knowledge), so after rounds equal to
/// the graph diameter every node's state is the entire attributed graph,
/// and one round fewer always leaves the farthest node's incoming edge
/// attributes unknown somewhere.
pub struct UnionReconstruction {
    /// Intended horizon; kept so decision wrappers know the final round.
    pub rounds: usize,
}

pub fn union_reconstruction(rounds: usize) -> UnionReconstruction {
    UnionReconstruction { rounds }
}

impl NodeAlgorithm for UnionReconstruction {
    fn init_state(&self, info: &InitInfo, ctx: &RoundCtx) -> BitString {
        // Own record only; the star is what goes on the wire.
        let mut k = Knowledge::default();
        k.nodes.insert(info.id, info.attr.clone());
        k.encode(ctx.n)
    }

    fn init_message(&self, info: &InitInfo, ctx: &RoundCtx) -> BitString {
        star_knowledge(info).encode(ctx.n)
    }

    fn update(&self, inbox: &[Received], id: NodeId, ctx: &RoundCtx)
        -> Result<BitString, SimError> {
        let mut k = Knowledge::default();
        for item in inbox {
            let mut r = item.message.reader();
            let other = Knowledge::decode(&mut r, ctx.n).map_err(|err| SimError::Decode {
                node: id,
                round: ctx.round,
                err,
            })?;
            k.merge(&other);
        }
        Ok(k.encode(ctx.n))
    }

    fn message(&self, state: &BitString, _id: NodeId, _ctx: &RoundCtx)
        -> Result<BitString, SimError> {
        Ok(state.clone())
    }
}

// ---------------------------------------------------------------------------
// Reference algorithms
// ---------------------------------------------------------------------------

/// Identity echo: the state is always the node's own (attribute, id) tuple
/// and that is also the message.
pub struct EchoAlgorithm;

impl NodeAlgorithm for EchoAlgorithm {
    fn init_state(&self, info: &InitInfo, ctx: &RoundCtx) -> BitString {
        let mut out = BitString::new();
        push_attr_vec(&mut out, &info.attr);
        push_node_id(&mut out, info.id, ctx.n);
        out
    }

    fn update(&self, inbox: &[Received], id: NodeId, ctx: &RoundCtx)
        -> Result<BitString, SimError> {
        // Recover own tuple from the self-message (the one carrying our id).
        for item in inbox {
            let mut r = item.message.reader();
            let attr = read_attr_vec(&mut r).map_err(|err| SimError::Decode {
                node: id,
                round: ctx.round,
                err,
            })?;
            let sender = read_node_id(&mut r, ctx.n).map_err(|err| SimError::Decode {
                node: id,
                round: ctx.round,
                err,
            })?;
            if sender == id {
                let mut out = BitString::new();
                push_attr_vec(&mut out, &attr);
                push_node_id(&mut out, sender, ctx.n);
                return Ok(out);
            }
        }
        Err(SimError::Decode {
            node: id,
            round: ctx.round,
            err: CodecError::Invalid("self-message missing".into()),
        })
    }

    fn message(&self, state: &BitString, _id: NodeId, _ctx: &RoundCtx)
        -> Result<BitString, SimError> {
        Ok(state.clone())
    }
}

/// Degree computation: after round 1 the state is the node degree (closed
/// neighborhood size minus one), encoded in gamma form; unchanged afterwards.
pub struct DegreeAlgorithm;

impl NodeAlgorithm for DegreeAlgorithm {
    fn init_state(&self, _info: &InitInfo, _ctx: &RoundCtx) -> BitString {
        let mut out = BitString::new();
        out.push_gamma(0);
        out
    }

    fn update(&self, inbox: &[Received], _id: NodeId, _ctx: &RoundCtx)
        -> Result<BitString, SimError> {
        // The closed neighborhood delivers degree + 1 messages every round.
        let mut out = BitString::new();
        out.push_gamma(inbox.len() as u64 - 1);
        Ok(out)
    }

    fn message(&self, state: &BitString, _id: NodeId, _ctx: &RoundCtx)
        -> Result<BitString, SimError> {
        Ok(state.clone())
    }
}

/// Union flooding for `rounds - 1`-ish horizon, then a boolean verdict from
/// the reconstructed graph in the final round. Terminal states decode to
/// booleans, ready for [`decide`].
pub struct UnionDecider {
    pub rounds: usize,
    inner: UnionReconstruction,
    predicate: Arc<dyn Fn(&Knowledge) -> bool + Send + Sync>,
}

impl UnionDecider {
    pub fn new(
        rounds: usize,
        predicate: impl Fn(&Knowledge) -> bool + Send + Sync + 'static,
    ) -> UnionDecider {
        UnionDecider {
            rounds,
            inner: UnionReconstruction { rounds },
            predicate: Arc::new(predicate),
        }
    }
}

impl NodeAlgorithm for UnionDecider {
    fn init_state(&self, info: &InitInfo, ctx: &RoundCtx) -> BitString {
        self.inner.init_state(info, ctx)
    }

    fn init_message(&self, info: &InitInfo, ctx: &RoundCtx) -> BitString {
        self.inner.init_message(info, ctx)
    }

    fn update(&self, inbox: &[Received], id: NodeId, ctx: &RoundCtx)
        -> Result<BitString, SimError> {
        let merged = self.inner.update(inbox, id, ctx)?;
        if ctx.round == self.rounds {
            let k = Knowledge::decode_state(&merged, ctx.n).map_err(|err| SimError::Decode {
                node: id,
                round: ctx.round,
                err,
            })?;
            let mut out = BitString::new();
            out.push((self.predicate)(&k));
            Ok(out)
        } else {
            Ok(merged)
        }
    }

    fn message(&self, state: &BitString, id: NodeId, ctx: &RoundCtx)
        -> Result<BitString, SimError> {
        self.inner.message(state, id, ctx)
    }
}

/// Build a knowledge set into an attributed graph, when complete. Node ids
/// become vertex indices.
pub fn knowledge_to_graph(k: &Knowledge) -> Option<AttributedGraph> {
    let n = k.nodes.len();
    if k.nodes.keys().enumerate().any(|(i, &id)| i != id as usize) {
        return None;
    }
    let node_attr: Vec<AttrVec> = k.nodes.values().cloned().collect();
    let mut edges = Vec::new();
    let mut edge_attr = BTreeMap::new();
    for (&(lo, hi), (a_lo, a_hi)) in &k.edges {
        edges.push((lo, hi));
        if let Some(a) = a_lo {
            if !a.is_empty() {
                edge_attr.insert((lo, hi), a.clone());
            }
        }
        if let Some(a) = a_hi {
            if !a.is_empty() {
                edge_attr.insert((hi, lo), a.clone());
            }
        }
    }
    AttributedGraph::build(n, &edges, node_attr, edge_attr).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::read_attr_vec;
    use crate::fixed::Fixed;

    fn scalar(v: i64) -> AttrVec {
        vec![Fixed::from_int(v)]
    }

    fn attributed_cycle(n: usize) -> AttributedGraph {
        let g = AttributedGraph::cycle(n);
        g.with_node_attrs((0..n as i64).map(scalar).collect()).unwrap()
    }

    #[test]
    fn echo_round_one_inbox_holds_all_initial_tuples() {
        let g = attributed_cycle(3);
        let t = run_local(&g, &EchoAlgorithm, 1).unwrap();
        // Every node's round-1 state equals its own initial tuple, and the
        // round-0 messages into each node are the three initial tuples.
        for v in 0..3u32 {
            assert_eq!(t.states[1][v as usize], t.states[0][v as usize]);
            let senders: Vec<NodeId> = g.closed_neighbors(v);
            assert_eq!(senders.len(), 3);
            for j in senders {
                let msg = &t.messages[0][&(v, j)];
                let mut r = msg.reader();
                let attr = read_attr_vec(&mut r).unwrap();
                let id = crate::bits::read_node_id(&mut r, 3).unwrap();
                assert_eq!(attr, scalar(j as i64));
                assert_eq!(id, j);
            }
        }
    }

    #[test]
    fn zero_rounds_transcript_holds_only_initial_states() {
        let g = attributed_cycle(4);
        let t = run_local(&g, &UnionReconstruction { rounds: 0 }, 0).unwrap();
        assert_eq!(t.rounds, 0);
        assert_eq!(t.states.len(), 1);
        for v in 0..4u32 {
            let k = Knowledge::decode_state(&t.states[0][v as usize], 4).unwrap();
            assert_eq!(k.nodes.len(), 1);
            assert_eq!(k.nodes[&v], scalar(v as i64));
            assert!(k.edges.is_empty());
        }
    }

    #[test]
    fn union_on_path_reaches_full_graph_at_diameter() {
        let g = AttributedGraph::path(4);
        let d = g.diameter();
        assert_eq!(d, 3);
        let t = run_local(&g, &UnionReconstruction { rounds: d }, d).unwrap();
        let full = Knowledge::of_graph(&g);
        for v in 0..4 {
            let k = Knowledge::decode_state(&t.states[d][v], 4).unwrap();
            assert_eq!(k, full, "node {v}");
        }
        // One round short: endpoints cannot know the opposite edge.
        let t2 = run_local(&g, &UnionReconstruction { rounds: d - 1 }, d - 1).unwrap();
        let k0 = Knowledge::decode_state(&t2.states[d - 1][0], 4).unwrap();
        assert_ne!(k0, full);
    }

    #[test]
    fn union_star_center_knows_everything_after_one_round() {
        let star = AttributedGraph::unattributed(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let t = run_local(&star, &UnionReconstruction { rounds: 1 }, 1).unwrap();
        let center = Knowledge::decode_state(&t.states[1][0], 5).unwrap();
        assert_eq!(center, Knowledge::of_graph(&star));
        // A leaf sees the full node set and every edge incident to its
        // neighbor, but the attribute directions into the other leaves have
        // not reached it yet.
        let leaf = Knowledge::decode_state(&t.states[1][1], 5).unwrap();
        assert_ne!(leaf, Knowledge::of_graph(&star));
        assert_eq!(leaf.nodes.len(), 5);
        assert_eq!(leaf.edges.len(), 4);
        assert_eq!(leaf.edges[&(0, 1)], (Some(vec![]), Some(vec![])));
        // Edge (0, 2): direction into 0 came from the center's star, the
        // direction into leaf 2 is still unknown.
        assert_eq!(leaf.edges[&(0, 2)], (Some(vec![]), None));
    }

    #[test]
    fn union_terminal_equals_canonical_encoding_on_c6() {
        let g = attributed_cycle(6);
        let d = g.diameter();
        let t = run_local(&g, &UnionReconstruction { rounds: d }, d).unwrap();
        let want = Knowledge::of_graph(&g).encode(6);
        for v in 0..6 {
            assert_eq!(t.states[d][v], want);
        }
    }

    #[test]
    fn congest_echo_fits_twice_log_budget() {
        let g = AttributedGraph::cycle(8);
        let b = 2 * crate::bits::id_bits(8) as usize + 8;
        let t = run_congest(&g, &EchoAlgorithm, 2, BandwidthBudget::bounded(b).unwrap());
        assert!(t.is_ok());
    }

    #[test]
    fn congest_union_violates_log_budget_by_round_two() {
        let g = AttributedGraph::complete(8);
        let b = crate::bits::id_bits(8) as usize;
        let err = run_congest(
            &g,
            &UnionReconstruction { rounds: 2 },
            2,
            BandwidthBudget::bounded(b).unwrap(),
        )
        .unwrap_err();
        match err {
            SimError::Bandwidth { round, bits, budget, .. } => {
                assert!(round <= 2, "violated in round {round}");
                assert!(bits > budget);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn congest_rejects_unbounded() {
        let g = AttributedGraph::cycle(3);
        assert!(matches!(
            run_congest(&g, &EchoAlgorithm, 1, BandwidthBudget::Unbounded),
            Err(SimError::UnboundedBudget)
        ));
        assert!(BandwidthBudget::bounded(0).is_err());
    }

    #[test]
    fn congest_success_transcript_equals_local() {
        let g = AttributedGraph::cycle(5);
        let free = run_local(&g, &UnionReconstruction { rounds: 3 }, 3).unwrap();
        let capped = run_congest(
            &g,
            &UnionReconstruction { rounds: 3 },
            3,
            BandwidthBudget::bounded(10_000).unwrap(),
        )
        .unwrap();
        assert_eq!(free, capped);
    }

    #[test]
    fn determinism_bit_identical() {
        let g = attributed_cycle(6);
        let a = run_local(&g, &UnionReconstruction { rounds: 3 }, 3).unwrap();
        let b = run_local(&g, &UnionReconstruction { rounds: 3 }, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn decide_is_conjunction() {
        let mut t = BitString::new();
        t.push(true);
        let mut f = BitString::new();
        f.push(false);
        assert_eq!(decide(&[t.clone(), t.clone()]).unwrap(), Decision::Accept);
        assert_eq!(decide(&[t.clone(), f]).unwrap(), Decision::Reject);
        let mut bad = BitString::new();
        bad.push(true);
        bad.push(false);
        assert!(decide(&[bad]).is_err());
    }

    #[test]
    fn union_k_cycle_decision_matches_oracle() {
        let g = AttributedGraph::cycle(6);
        let d = g.diameter();
        let alg = UnionDecider::new(d, |k| {
            knowledge_to_graph(k)
                .map(|g| crate::oracles::contains_k_cycle(&g, 6).unwrap())
                .unwrap_or(false)
        });
        let t = run_local(&g, &alg, d).unwrap();
        assert_eq!(decide(t.terminal_states()).unwrap(), Decision::Accept);
        assert!(crate::oracles::contains_k_cycle(&g, 6).unwrap());

        let alg4 = UnionDecider::new(d, |k| {
            knowledge_to_graph(k)
                .map(|g| crate::oracles::contains_k_cycle(&g, 4).unwrap())
                .unwrap_or(false)
        });
        let t4 = run_local(&g, &alg4, d).unwrap();
        assert_eq!(decide(t4.terminal_states()).unwrap(), Decision::Reject);
    }

    #[test]
    fn cut_traffic_counts_both_directions_of_one_edge() {
        let g = AttributedGraph::path(4);
        let t = run_local(&g, &EchoAlgorithm, 2).unwrap();
        let cut = cut_traffic(&g, &t, &[0]).unwrap();
        assert_eq!(cut.crossing_edges, 1);
        // Rounds 0..=2, each with exactly the two directed messages over
        // the cut edge (0,1).
        assert_eq!(cut.per_round.len(), 3);
        for l in 0..=2 {
            let expect = t.message_bits(l, 0, 1).unwrap() + t.message_bits(l, 1, 0).unwrap();
            assert_eq!(cut.per_round[l], expect);
        }
        assert_eq!(cut.total, cut.per_round.iter().sum::<usize>());
    }

    #[test]
    fn cut_traffic_bounded_by_crossing_messages_times_max_size() {
        let g = AttributedGraph::cycle(6);
        let t = run_local(&g, &UnionReconstruction { rounds: 2 }, 2).unwrap();
        let part: Vec<NodeId> = vec![0, 1, 2];
        let cut = cut_traffic(&g, &t, &part).unwrap();
        for (l, &bits) in cut.per_round.iter().enumerate() {
            let max_msg = t.messages[l].values().map(BitString::len).max().unwrap();
            assert!(bits <= 2 * cut.crossing_edges * max_msg);
        }
    }

    /// Two-party disjointness over one edge: secrets ride in as attribute
    /// vectors, each side decides after one exchange.
    struct DisjointnessProtocol;

    impl NodeAlgorithm for DisjointnessProtocol {
        fn init_state(&self, info: &InitInfo, ctx: &RoundCtx) -> BitString {
            let mut out = BitString::new();
            push_attr_vec(&mut out, &info.attr);
            push_node_id(&mut out, info.id, ctx.n);
            out
        }

        fn update(&self, inbox: &[Received], id: NodeId, ctx: &RoundCtx)
            -> Result<BitString, SimError> {
            let mut own: Option<AttrVec> = None;
            let mut peer: Option<AttrVec> = None;
            for item in inbox {
                let mut r = item.message.reader();
                let attr = read_attr_vec(&mut r).map_err(|err| SimError::Decode {
                    node: id,
                    round: ctx.round,
                    err,
                })?;
                let sender = crate::bits::read_node_id(&mut r, ctx.n).map_err(|err| {
                    SimError::Decode {
                        node: id,
                        round: ctx.round,
                        err,
                    }
                })?;
                if sender == id {
                    own = Some(attr);
                } else {
                    peer = Some(attr);
                }
            }
            let (own, peer) = (own.unwrap(), peer.unwrap());
            let disjoint = own
                .iter()
                .zip(&peer)
                .all(|(a, b)| a.is_zero() || b.is_zero());
            let mut out = BitString::new();
            out.push(disjoint);
            Ok(out)
        }

        fn message(&self, state: &BitString, _id: NodeId, _ctx: &RoundCtx)
            -> Result<BitString, SimError> {
            Ok(state.clone())
        }
    }

    #[test]
    fn disjointness_protocol_needs_q_bits_across_the_cut() {
        // Exhaustive over all 2^q x 2^q secret pairs at q = 4: the protocol
        // must announce disjointness correctly, the fooling pairs
        // (x, complement x) must have pairwise distinct cut transcripts, and
        // the worst-case cut traffic must be at least q bits.
        let q = 4usize;
        let secrets = |bits: u64| -> AttrVec {
            (0..q)
                .map(|i| Fixed::from_int((bits >> i & 1) as i64))
                .collect()
        };
        let mut max_cut_bits = 0usize;
        let mut fooling_transcripts = Vec::new();
        for a in 0..1u64 << q {
            for b in 0..1u64 << q {
                let g = AttributedGraph::build(
                    2,
                    &[(0, 1)],
                    vec![secrets(a), secrets(b)],
                    Default::default(),
                )
                .unwrap();
                let t = run_local(&g, &DisjointnessProtocol, 1).unwrap();
                let want = (0..q).all(|i| a >> i & 1 == 0 || b >> i & 1 == 0);
                let got = decide(t.terminal_states()).unwrap();
                assert_eq!(got == Decision::Accept, want, "a={a:b} b={b:b}");
                // The cut transcript: all messages crossing the partition.
                let mut crossing = Vec::new();
                for round in &t.messages {
                    for (&(to, from), m) in round {
                        if to != from {
                            crossing.push((to, from, m.clone()));
                        }
                    }
                }
                let bits: usize = crossing.iter().map(|(_, _, m)| m.len()).sum();
                max_cut_bits = max_cut_bits.max(bits);
                if b == (!a) & ((1 << q) - 1) {
                    fooling_transcripts.push(crossing);
                }
            }
        }
        assert_eq!(fooling_transcripts.len(), 1 << q);
        for i in 0..fooling_transcripts.len() {
            for j in i + 1..fooling_transcripts.len() {
                assert_ne!(
                    fooling_transcripts[i], fooling_transcripts[j],
                    "fooling pairs {i} and {j} are indistinguishable"
                );
            }
        }
        assert!(max_cut_bits >= q, "cut traffic {max_cut_bits} < q = {q}");
    }

    #[test]
    fn bad_partitions_rejected() {
        let g = AttributedGraph::cycle(4);
        let t = run_local(&g, &EchoAlgorithm, 1).unwrap();
        assert!(cut_traffic(&g, &t, &[]).is_err());
        assert!(cut_traffic(&g, &t, &[0, 1, 2, 3]).is_err());
        assert!(cut_traffic(&g, &t, &[0, 0]).is_err());
        assert!(cut_traffic(&g, &t, &[9]).is_err());
    }
}
