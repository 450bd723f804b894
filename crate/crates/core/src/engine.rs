//! Exact fixed-precision message-passing engine.
//!
//! A network is a stack of layers over vectors of dyadic fixed-point
//! scalars. Two layer families exist:
//!
//! - [`AffineLayer`]: static-dimension layers whose message and update maps
//!   are affine; aggregation is the elementwise sum. Every output scalar is
//!   quantized to the run precision, and out-of-range values abort the run.
//! - bridge layers ([`LayerRule::LocalRound`]): each layer simulates one
//!   round of a round-based node algorithm. Messages carry the tuple
//!   (algorithm message, edge attribute, receiver id, sender id) chunked
//!   into p-bit scalars; aggregation reconstructs the multiset exactly and
//!   the update applies the algorithm. In positional mode messages are laid
//!   out as per-sender indicator blocks so the aggregation is a plain
//!   elementwise sum; in multiset mode the messages stay ragged and the
//!   aggregation consumes the multiset directly. Both modes produce
//!   identical states wherever the encoding fits, which is the content of
//!   the sum-rewriting property.
//!
//! States are bit-comparable with simulator states through the `10*`
//! chunk padding: `unpad(state vector bits) == state string`, no tolerance.

use crate::bits::{
    chunks_to_string, id_bits, push_attr_vec, push_bitstring, push_node_id, read_attr_vec,
    read_bitstring, read_node_id, string_to_chunks, BitString, CodecError,
};
use crate::fixed::{Fixed, FixedError, Precision};
use crate::graph::{AttrVec, AttributedGraph, NodeId};
use crate::local::{
    knowledge_to_graph, InitInfo, Knowledge, NodeAlgorithm, Received, RoundCtx, SimError,
};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("network must have at least one layer")]
    ZeroDepth,
    #[error("precision {p} bits is too small for n = {n} (ids need {need})")]
    PrecisionTooSmall { p: u32, n: usize, need: u32 },
    #[error("shape mismatch at layer {layer}: {msg}")]
    Shape { layer: usize, msg: String },
    #[error("arithmetic overflow at layer {layer}, node {node}: {err}")]
    Overflow {
        layer: usize,
        node: NodeId,
        err: FixedError,
    },
    #[error("state encoding at layer {layer}: {err}")]
    Codec { layer: usize, err: CodecError },
    #[error("simulated algorithm failed: {0}")]
    Sim(#[from] SimError),
    #[error("readout: {0}")]
    Readout(String),
}

/// Affine message/update maps with declared dimensions.
#[derive(Debug, Clone)]
pub struct AffineLayer {
    pub in_dim: usize,
    pub attr_dim: usize,
    pub msg_dim: usize,
    pub out_dim: usize,
    /// msg = m_self * x_i + m_peer * x_j + m_attr * a + m_bias
    pub m_self: Vec<Vec<Fixed>>,
    pub m_peer: Vec<Vec<Fixed>>,
    pub m_attr: Vec<Vec<Fixed>>,
    pub m_bias: Vec<Fixed>,
    /// up = u_mat * agg + u_bias
    pub u_mat: Vec<Vec<Fixed>>,
    pub u_bias: Vec<Fixed>,
}

impl AffineLayer {
    /// Zero-initialized layer of the given shape.
    pub fn zero(in_dim: usize, attr_dim: usize, msg_dim: usize, out_dim: usize) -> AffineLayer {
        AffineLayer {
            in_dim,
            attr_dim,
            msg_dim,
            out_dim,
            m_self: vec![vec![Fixed::ZERO; in_dim]; msg_dim],
            m_peer: vec![vec![Fixed::ZERO; in_dim]; msg_dim],
            m_attr: vec![vec![Fixed::ZERO; attr_dim]; msg_dim],
            m_bias: vec![Fixed::ZERO; msg_dim],
            u_mat: vec![vec![Fixed::ZERO; msg_dim]; out_dim],
            u_bias: vec![Fixed::ZERO; out_dim],
        }
    }

    /// The identity-forwarding layer: message = x_j, update = agg.
    pub fn sum(dim: usize) -> AffineLayer {
        let mut l = AffineLayer::zero(dim, 0, dim, dim);
        for k in 0..dim {
            l.m_peer[k][k] = Fixed::ONE;
            l.u_mat[k][k] = Fixed::ONE;
        }
        l
    }

    /// Degree layer: message = 1, update = agg - 1 (the self-loop message is
    /// excluded from the count).
    pub fn degree(in_dim: usize) -> AffineLayer {
        let mut l = AffineLayer::zero(in_dim, 0, 1, 1);
        l.m_bias[0] = Fixed::ONE;
        l.u_mat[0][0] = Fixed::ONE;
        l.u_bias[0] = Fixed::from_int(-1);
        l
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BridgeMode {
    /// Per-sender indicator blocks; aggregation is the elementwise sum.
    Positional,
    /// Ragged multiset aggregation.
    Multiset,
}

#[derive(Clone)]
pub enum LayerRule {
    Affine(AffineLayer),
    LocalRound {
        alg: Arc<dyn NodeAlgorithm>,
        mode: BridgeMode,
    },
}

impl std::fmt::Debug for LayerRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LayerRule::Affine(a) => f
                .debug_struct("Affine")
                .field("in_dim", &a.in_dim)
                .field("out_dim", &a.out_dim)
                .finish(),
            LayerRule::LocalRound { mode, .. } => {
                f.debug_struct("LocalRound").field("mode", mode).finish()
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct GnnLayer {
    pub rule: LayerRule,
}

/// Graph-level readout over the multiset of terminal states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Readout {
    /// Elementwise sum of terminal state vectors.
    Sum,
    /// Sorted (state, multiplicity) histogram, flattened.
    Histogram,
    /// Decode knowledge states, merge them, and output the diameter of the
    /// reconstructed graph. Exercises single-layer whole-graph readouts.
    ReconstructDiameter,
}

#[derive(Clone)]
pub struct GnnNetwork {
    pub layers: Vec<GnnLayer>,
    pub readout: Option<Readout>,
    pub precision: Precision,
}

impl GnnNetwork {
    pub fn new(
        layers: Vec<GnnLayer>,
        readout: Option<Readout>,
        precision: Precision,
    ) -> Result<GnnNetwork, EngineError> {
        if layers.is_empty() {
            return Err(EngineError::ZeroDepth);
        }
        Ok(GnnNetwork {
            layers,
            readout,
            precision,
        })
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Per-layer state dimensions (input layer first) when every layer has a
    /// static shape; bridge layers make dimensions input-dependent.
    pub fn static_dims(&self) -> Option<Vec<usize>> {
        let mut dims = Vec::with_capacity(self.layers.len() + 1);
        let first = match &self.layers[0].rule {
            LayerRule::Affine(a) => a.in_dim,
            LayerRule::LocalRound { .. } => return None,
        };
        dims.push(first);
        for l in &self.layers {
            match &l.rule {
                LayerRule::Affine(a) => dims.push(a.out_dim),
                LayerRule::LocalRound { .. } => return None,
            }
        }
        Some(dims)
    }
}

/// Per-layer, per-node state vectors of a forward run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateTrace {
    /// states[l][v]: layer 0 holds the input attributes.
    pub states: Vec<Vec<Vec<Fixed>>>,
    pub precision: Precision,
}

impl StateTrace {
    /// Largest state dimension over all layers and nodes.
    pub fn width(&self) -> usize {
        self.states
            .iter()
            .flat_map(|layer| layer.iter().map(Vec::len))
            .max()
            .unwrap_or(0)
    }

    pub fn terminal(&self) -> &[Vec<Fixed>] {
        self.states.last().expect("layer 0 exists")
    }
}

fn quantized_dot(
    prec: &Precision,
    row: &[Fixed],
    x: &[Fixed],
    acc: Fixed,
) -> Result<Fixed, FixedError> {
    let mut sum = acc;
    for (a, b) in row.iter().zip(x) {
        if a.is_zero() || b.is_zero() {
            continue;
        }
        let prod = a
            .checked_mul(b)
            .ok_or_else(|| FixedError::Overflow {
                value: "product".into(),
                bits: prec.total_bits,
            })?;
        sum = sum.checked_add(&prod).ok_or_else(|| FixedError::Overflow {
            value: "sum".into(),
            bits: prec.total_bits,
        })?;
    }
    prec.quantize(&sum)
}

fn affine_message(
    prec: &Precision,
    layer: &AffineLayer,
    xi: &[Fixed],
    xj: &[Fixed],
    attr: &[Fixed],
) -> Result<Vec<Fixed>, FixedError> {
    let mut out = Vec::with_capacity(layer.msg_dim);
    for k in 0..layer.msg_dim {
        let mut v = quantized_dot(prec, &layer.m_self[k], xi, layer.m_bias[k])?;
        v = quantized_dot(prec, &layer.m_peer[k], xj, v)?;
        // Attribute vectors shorter than attr_dim act as zero-padded.
        let use_len = attr.len().min(layer.attr_dim);
        v = quantized_dot(prec, &layer.m_attr[k][..use_len], &attr[..use_len], v)?;
        out.push(v);
    }
    Ok(out)
}

fn affine_update(
    prec: &Precision,
    layer: &AffineLayer,
    agg: &[Fixed],
) -> Result<Vec<Fixed>, FixedError> {
    let mut out = Vec::with_capacity(layer.out_dim);
    for k in 0..layer.out_dim {
        out.push(quantized_dot(prec, &layer.u_mat[k], agg, layer.u_bias[k])?)
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Bridge payload codec
// ---------------------------------------------------------------------------

/// Payload of one bridge message: (algorithm message, edge attribute,
/// receiver id, sender id), self-delimiting.
fn bridge_payload(
    msg: &BitString,
    edge_attr: &[Fixed],
    vi: NodeId,
    vj: NodeId,
    n: usize,
) -> BitString {
    let mut out = BitString::new();
    push_bitstring(&mut out, msg);
    push_attr_vec(&mut out, edge_attr);
    push_node_id(&mut out, vi, n);
    push_node_id(&mut out, vj, n);
    out
}

fn decode_bridge_payload(
    payload: &BitString,
    n: usize,
) -> Result<(BitString, AttrVec, NodeId, NodeId), CodecError> {
    let mut r = payload.reader();
    let msg = read_bitstring(&mut r)?;
    let attr = read_attr_vec(&mut r)?;
    let vi = read_node_id(&mut r, n)?;
    let vj = read_node_id(&mut r, n)?;
    r.expect_end()?;
    Ok((msg, attr, vi, vj))
}

/// The algorithm message string sent by a node whose previous-layer state
/// vector is `prev`: for layers past the first this is the algorithm's
/// message function on the unchunked state; the first layer instead carries
/// the algorithm's initial message, which the caller supplies because it is
/// a function of the sender's initial knowledge rather than of the layer-0
/// state vector.
fn bridge_wire_message(
    alg: &dyn NodeAlgorithm,
    layer_index: usize,
    prev: &[Fixed],
    sender_id: NodeId,
    n: usize,
    prec: &Precision,
) -> Result<BitString, EngineError> {
    debug_assert!(layer_index >= 2);
    let state = chunks_to_string(prev, prec).map_err(|err| EngineError::Codec {
        layer: layer_index,
        err,
    })?;
    alg.message(
        &state,
        sender_id,
        &RoundCtx {
            round: layer_index - 1,
            n,
        },
    )
    .map_err(EngineError::Sim)
}

/// Expand payload chunk vectors into aligned per-sender indicator blocks and
/// sum them; returns the aggregated vector. Block b of the result holds
/// [presence, payload chunks, zero padding] for sender id b.
fn positional_sum(
    payloads: &[(NodeId, Vec<Fixed>)],
    n: usize,
) -> Vec<Fixed> {
    let w = payloads.iter().map(|(_, c)| c.len()).max().unwrap_or(0);
    let block = 1 + w;
    let mut agg = vec![Fixed::ZERO; n * block];
    for (sender, chunks) in payloads {
        let base = *sender as usize * block;
        // Distinct senders occupy disjoint blocks, so these adds never
        // carry; the sum over the multiset is still a true elementwise sum.
        agg[base] = agg[base].checked_add(&Fixed::ONE).expect("presence flag");
        for (k, c) in chunks.iter().enumerate() {
            agg[base + 1 + k] = agg[base + 1 + k].checked_add(c).expect("disjoint blocks");
        }
    }
    agg
}

fn positional_decode(
    agg: &[Fixed],
    n: usize,
    prec: &Precision,
) -> Result<Vec<BitString>, CodecError> {
    if n == 0 || agg.len() % n != 0 {
        return Err(CodecError::Invalid(format!(
            "aggregate length {} not divisible into {} blocks",
            agg.len(),
            n
        )));
    }
    let block = agg.len() / n;
    let mut out = Vec::new();
    for b in 0..n {
        let slice = &agg[b * block..(b + 1) * block];
        if slice[0].is_zero() {
            continue;
        }
        out.push(chunks_to_string(&slice[1..], prec)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Forward execution
// ---------------------------------------------------------------------------

/// Evaluate an affine layer for one receiving node; `senders` lists
/// (previous state, edge attribute into the receiver) over the closed
/// neighborhood.
fn affine_forward_node(
    prec: &Precision,
    aff: &AffineLayer,
    layer_index: usize,
    vi: NodeId,
    xi: &[Fixed],
    senders: &[(&[Fixed], &[Fixed])],
) -> Result<Vec<Fixed>, EngineError> {
    if xi.len() != aff.in_dim {
        return Err(EngineError::Shape {
            layer: layer_index,
            msg: format!("state dim {} != layer in_dim {}", xi.len(), aff.in_dim),
        });
    }
    let mut agg = vec![Fixed::ZERO; aff.msg_dim];
    for (xj, edge_attr) in senders {
        if xj.len() != aff.in_dim {
            return Err(EngineError::Shape {
                layer: layer_index,
                msg: format!("peer dim {} != layer in_dim {}", xj.len(), aff.in_dim),
            });
        }
        if edge_attr.len() > aff.attr_dim {
            return Err(EngineError::Shape {
                layer: layer_index,
                msg: format!(
                    "edge attribute dim {} exceeds layer attr_dim {}",
                    edge_attr.len(),
                    aff.attr_dim
                ),
            });
        }
        let m = affine_message(prec, aff, xi, xj, edge_attr).map_err(|err| {
            EngineError::Overflow {
                layer: layer_index,
                node: vi,
                err,
            }
        })?;
        for (k, v) in m.iter().enumerate() {
            let s = agg[k].checked_add(v).ok_or_else(|| EngineError::Overflow {
                layer: layer_index,
                node: vi,
                err: FixedError::Overflow {
                    value: "aggregation".into(),
                    bits: prec.total_bits,
                },
            })?;
            agg[k] = prec.quantize(&s).map_err(|err| EngineError::Overflow {
                layer: layer_index,
                node: vi,
                err,
            })?;
        }
    }
    affine_update(prec, aff, &agg).map_err(|err| EngineError::Overflow {
        layer: layer_index,
        node: vi,
        err,
    })
}

/// Aggregate bridge wire messages for one receiver and apply the simulated
/// algorithm's update. `items` lists (wire message, edge attribute into the
/// receiver, sender vertex).
fn bridge_receive(
    alg: &dyn NodeAlgorithm,
    mode: BridgeMode,
    layer_index: usize,
    n: usize,
    vi: NodeId,
    items: &[(BitString, AttrVec, NodeId)],
    prec: &Precision,
) -> Result<Vec<Fixed>, EngineError> {
    let payloads: Vec<(NodeId, BitString)> = items
        .iter()
        .map(|(wire, edge_attr, vj)| (*vj, bridge_payload(wire, edge_attr, vi, *vj, n)))
        .collect();
    let received: Vec<BitString> = match mode {
        BridgeMode::Positional => {
            let chunked: Vec<(NodeId, Vec<Fixed>)> = payloads
                .iter()
                .map(|(v, p)| (*v, string_to_chunks(p, prec)))
                .collect();
            let agg = positional_sum(&chunked, n);
            positional_decode(&agg, n, prec).map_err(|err| EngineError::Codec {
                layer: layer_index,
                err,
            })?
        }
        BridgeMode::Multiset => payloads.into_iter().map(|(_, p)| p).collect(),
    };
    let mut inbox = Vec::with_capacity(received.len());
    for p in &received {
        let (msg, attr, pv_i, _pv_j) =
            decode_bridge_payload(p, n).map_err(|err| EngineError::Codec {
                layer: layer_index,
                err,
            })?;
        if pv_i != vi {
            return Err(EngineError::Codec {
                layer: layer_index,
                err: CodecError::Invalid("payload for a different receiver".into()),
            });
        }
        inbox.push(Received {
            message: msg,
            edge_attr: attr,
        });
    }
    inbox.sort_unstable();
    let state = alg.update(
        &inbox,
        vi,
        &RoundCtx {
            round: layer_index,
            n,
        },
    )?;
    Ok(string_to_chunks(&state, prec))
}

/// Execute the network over the self-loop closure of `g`.
pub fn forward(net: &GnnNetwork, g: &AttributedGraph) -> Result<StateTrace, EngineError> {
    let prec = net.precision;
    let need = id_bits(g.n());
    if prec.total_bits < need {
        return Err(EngineError::PrecisionTooSmall {
            p: prec.total_bits,
            n: g.n(),
            need,
        });
    }
    // Layer 0: input attributes, range-checked against the run precision.
    let mut layer0 = Vec::with_capacity(g.n());
    for v in 0..g.n() as NodeId {
        let mut x = Vec::with_capacity(g.node_attr(v).len());
        for a in g.node_attr(v) {
            x.push(prec.quantize(a).map_err(|err| EngineError::Overflow {
                layer: 0,
                node: v,
                err,
            })?);
        }
        layer0.push(x);
    }
    let mut states = vec![layer0];
    for l in 1..=net.depth() {
        let prev = &states[l - 1];
        let mut next = Vec::with_capacity(g.n());
        match &net.layers[l - 1].rule {
            LayerRule::Affine(aff) => {
                for v in 0..g.n() as NodeId {
                    let senders: Vec<(&[Fixed], &[Fixed])> = g
                        .closed_neighbors(v)
                        .iter()
                        .map(|&j| {
                            (
                                prev[j as usize].as_slice(),
                                if j == v { &[] as &[Fixed] } else { g.edge_attr_into(v, j) },
                            )
                        })
                        .collect();
                    next.push(affine_forward_node(
                        &prec,
                        aff,
                        l,
                        v,
                        &prev[v as usize],
                        &senders,
                    )?);
                }
            }
            LayerRule::LocalRound { alg, mode } => {
                // One wire message per sender, broadcast to its closed
                // neighborhood.
                let wires: Vec<BitString> = (0..g.n() as NodeId)
                    .map(|j| {
                        if l == 1 {
                            Ok(alg.init_message(
                                &crate::local::init_info(g, j),
                                &RoundCtx { round: 0, n: g.n() },
                            ))
                        } else {
                            bridge_wire_message(
                                alg.as_ref(),
                                l,
                                &prev[j as usize],
                                g.id_of(j),
                                g.n(),
                                &prec,
                            )
                        }
                    })
                    .collect::<Result<_, _>>()?;
                for v in 0..g.n() as NodeId {
                    let items: Vec<(BitString, AttrVec, NodeId)> = g
                        .closed_neighbors(v)
                        .iter()
                        .map(|&j| {
                            (
                                wires[j as usize].clone(),
                                if j == v {
                                    Vec::new()
                                } else {
                                    g.edge_attr_into(v, j).to_vec()
                                },
                                g.id_of(j),
                            )
                        })
                        .collect();
                    next.push(bridge_receive(
                        alg.as_ref(),
                        *mode,
                        l,
                        g.n(),
                        g.id_of(v),
                        &items,
                        &prec,
                    )?);
                }
            }
        }
        states.push(next);
    }
    Ok(StateTrace {
        states,
        precision: prec,
    })
}

/// Largest state dimension in the trace.
pub fn width(trace: &StateTrace) -> usize {
    trace.width()
}

/// Apply a readout to the terminal states.
pub fn readout(trace: &StateTrace, read: Readout) -> Result<Vec<Fixed>, EngineError> {
    let terminal = trace.terminal();
    match read {
        Readout::Sum => {
            let dim = terminal.iter().map(Vec::len).max().unwrap_or(0);
            let mut out = vec![Fixed::ZERO; dim];
            for x in terminal {
                for (k, v) in x.iter().enumerate() {
                    out[k] = out[k]
                        .checked_add(v)
                        .ok_or_else(|| EngineError::Readout("sum overflow".into()))?;
                }
            }
            out.iter()
                .map(|v| trace.precision.quantize(v))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| EngineError::Readout(e.to_string()))
        }
        Readout::Histogram => {
            let mut sorted: Vec<&Vec<Fixed>> = terminal.iter().collect();
            sorted.sort();
            let mut out = Vec::new();
            let mut k = 0;
            while k < sorted.len() {
                let mut count = 1i64;
                while k + (count as usize) < sorted.len() && sorted[k + count as usize] == sorted[k] {
                    count += 1;
                }
                out.extend(sorted[k].iter().copied());
                out.push(Fixed::from_int(count));
                k += count as usize;
            }
            Ok(out)
        }
        Readout::ReconstructDiameter => {
            let n = terminal.len();
            let mut merged = Knowledge::default();
            for x in terminal {
                let s = chunks_to_string(x, &trace.precision)
                    .map_err(|e| EngineError::Readout(e.to_string()))?;
                let k = Knowledge::decode_state(&s, n)
                    .map_err(|e| EngineError::Readout(e.to_string()))?;
                merged.merge(&k);
            }
            let g = knowledge_to_graph(&merged)
                .ok_or_else(|| EngineError::Readout("incomplete reconstruction".into()))?;
            Ok(vec![Fixed::from_int(g.diameter() as i64)])
        }
    }
}

// ---------------------------------------------------------------------------
// Cross-simulation
// ---------------------------------------------------------------------------

/// Wrap a node algorithm as a network of bridge layers: one layer per round,
/// positional-sum aggregation.
pub fn gnn_from_local(
    alg: Arc<dyn NodeAlgorithm>,
    depth: usize,
    precision: Precision,
) -> Result<GnnNetwork, EngineError> {
    let layers = (0..depth.max(1))
        .map(|_| GnnLayer {
            rule: LayerRule::LocalRound {
                alg: alg.clone(),
                mode: BridgeMode::Positional,
            },
        })
        .collect();
    GnnNetwork::new(layers, None, precision)
}

/// Rewrite bridge layers between multiset and positional aggregation.
pub fn with_bridge_mode(net: &GnnNetwork, mode: BridgeMode) -> GnnNetwork {
    let layers = net
        .layers
        .iter()
        .map(|l| GnnLayer {
            rule: match &l.rule {
                LayerRule::Affine(a) => LayerRule::Affine(a.clone()),
                LayerRule::LocalRound { alg, .. } => LayerRule::LocalRound {
                    alg: alg.clone(),
                    mode,
                },
            },
        })
        .collect();
    GnnNetwork {
        layers,
        readout: net.readout,
        precision: net.precision,
    }
}

/// Message budget sufficient for width-w states plus a node id.
pub fn congest_budget(w: usize, p: u32, n: usize) -> usize {
    w * p as usize + id_bits(n) as usize
}

/// Largest width runnable under budget `b`; inverse of [`congest_budget`].
pub fn width_budget(b: usize, p: u32, n: usize) -> usize {
    b.saturating_sub(id_bits(n) as usize) / p as usize
}

/// A node algorithm simulating a network: states are the network's state
/// vectors on the wire, and each message is the sender's state plus its id.
/// Static-shape networks use fixed-width encodings (dim * p bits plus the
/// id), which is exactly the congest budget for the network width; bridge
/// networks self-delimit with a length prefix. When the first layer is a
/// bridge layer, the initial wave additionally carries the simulated
/// algorithm's own initial message, since that is a function of the
/// sender's initial knowledge rather than of its layer-0 state.
pub struct BridgedAlgorithm {
    net: GnnNetwork,
    static_dims: Option<Vec<usize>>,
}

/// Build the node algorithm executing `net` round by round.
pub fn local_from_gnn(net: &GnnNetwork) -> BridgedAlgorithm {
    BridgedAlgorithm {
        static_dims: net.static_dims(),
        net: net.clone(),
    }
}

impl BridgedAlgorithm {
    /// The on-wire encoding of a state vector at the given layer; exposed so
    /// equality tests can compare simulator states against engine traces.
    pub fn encode_state(&self, x: &[Fixed], layer: usize) -> BitString {
        self.encode_vec(x, layer)
    }

    fn first_layer_alg(&self) -> Option<&Arc<dyn NodeAlgorithm>> {
        match &self.net.layers[0].rule {
            LayerRule::LocalRound { alg, .. } => Some(alg),
            LayerRule::Affine(_) => None,
        }
    }

    fn encode_vec(&self, x: &[Fixed], layer: usize) -> BitString {
        let prec = &self.net.precision;
        let mut out = BitString::new();
        match &self.static_dims {
            Some(dims) => {
                debug_assert_eq!(x.len(), dims[layer]);
            }
            None => {
                out.push_gamma(x.len() as u64);
            }
        }
        for v in x {
            out.push_uint(
                prec.raw_bits(v).expect("state scalars fit the precision"),
                prec.total_bits,
            );
        }
        out
    }

    fn decode_vec(
        &self,
        r: &mut crate::bits::BitReader,
        layer: usize,
    ) -> Result<Vec<Fixed>, CodecError> {
        let prec = &self.net.precision;
        let count = match &self.static_dims {
            Some(dims) => dims[layer],
            None => r.read_gamma()? as usize,
        };
        (0..count)
            .map(|_| r.read_uint(prec.total_bits).map(|raw| prec.from_raw_bits(raw)))
            .collect()
    }

    fn quantize_input(&self, attr: &AttrVec) -> Vec<Fixed> {
        attr.iter()
            .map(|a| self.net.precision.quantize(a).expect("input fits precision"))
            .collect()
    }
}

impl NodeAlgorithm for BridgedAlgorithm {
    fn init_state(&self, info: &InitInfo, _ctx: &RoundCtx) -> BitString {
        self.encode_vec(&self.quantize_input(&info.attr), 0)
    }

    fn init_message(&self, info: &InitInfo, ctx: &RoundCtx) -> BitString {
        let mut out = BitString::new();
        if let Some(alg) = self.first_layer_alg() {
            push_bitstring(&mut out, &alg.init_message(info, ctx));
        }
        out.extend(&self.encode_vec(&self.quantize_input(&info.attr), 0));
        push_node_id(&mut out, info.id, ctx.n);
        out
    }

    fn update(&self, inbox: &[Received], id: NodeId, ctx: &RoundCtx)
        -> Result<BitString, SimError> {
        let l = ctx.round;
        let n = ctx.n;
        let prec = &self.net.precision;
        let fail = |err: CodecError| SimError::Decode {
            node: id,
            round: l,
            err,
        };
        // Decode every received item: optional nested algorithm payload in
        // the initial wave, then the sender's state vector and id.
        let mut decoded: Vec<(Option<BitString>, Vec<Fixed>, NodeId, AttrVec)> = Vec::new();
        for item in inbox {
            let mut r = item.message.reader();
            let nested = if l == 1 && self.first_layer_alg().is_some() {
                Some(read_bitstring(&mut r).map_err(fail)?)
            } else {
                None
            };
            let x = self.decode_vec(&mut r, l - 1).map_err(fail)?;
            let sender = read_node_id(&mut r, n).map_err(fail)?;
            decoded.push((nested, x, sender, item.edge_attr.clone()));
        }
        let xi = decoded
            .iter()
            .find(|(_, _, sender, _)| *sender == id)
            .map(|(_, x, _, _)| x.clone())
            .ok_or_else(|| fail(CodecError::Invalid("self-message missing".into())))?;

        let next = match &self.net.layers[l - 1].rule {
            LayerRule::Affine(aff) => {
                let senders: Vec<(&[Fixed], &[Fixed])> = decoded
                    .iter()
                    .map(|(_, x, _, attr)| (x.as_slice(), attr.as_slice()))
                    .collect();
                affine_forward_node(prec, aff, l, id, &xi, &senders)
            }
            LayerRule::LocalRound { alg, mode } => {
                let mut items: Vec<(BitString, AttrVec, NodeId)> = Vec::new();
                for (nested, x, sender, attr) in &decoded {
                    let wire = match nested {
                        Some(w) => w.clone(),
                        None => bridge_wire_message(alg.as_ref(), l, x, *sender, n, prec)
                            .map_err(|e| fail(CodecError::Invalid(e.to_string())))?,
                    };
                    items.push((wire, attr.clone(), *sender));
                }
                bridge_receive(alg.as_ref(), *mode, l, n, id, &items, prec)
            }
        }
        .map_err(|e| fail(CodecError::Invalid(e.to_string())))?;
        Ok(self.encode_vec(&next, l))
    }

    fn message(&self, state: &BitString, id: NodeId, ctx: &RoundCtx)
        -> Result<BitString, SimError> {
        let mut out = state.clone();
        push_node_id(&mut out, id, ctx.n);
        Ok(out)
    }
}
