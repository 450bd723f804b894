//! Sum-aggregation message-passing classifier with residual connections and
//! explicit backpropagation.
//!
//! Per layer: aggregate states over closed neighborhoods, apply a two-layer
//! MLP, add the residual when shapes allow. Readout: sum the terminal
//! states and apply a two-layer MLP classifier head with two logits.
//! Parameters live in one flat vector addressed through a layout table, so
//! the optimizer and the finite-difference oracle see plain slices.
//! All arithmetic is f64.

use gnncap_core::graph::AttributedGraph;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Network shape. Capacity is depth * width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GinDims {
    pub input_dim: usize,
    pub width: usize,
    pub depth: usize,
    pub residual: bool,
}

impl GinDims {
    pub fn capacity(&self) -> usize {
        self.depth * self.width
    }
}

/// Byte offsets of one linear map inside the flat parameter vector.
#[derive(Debug, Clone, Copy)]
struct Linear {
    w: usize,
    b: usize,
    rows: usize,
    cols: usize,
}

impl Linear {
    fn len(&self) -> usize {
        self.rows * self.cols + self.rows
    }

    fn forward(&self, params: &[f64], x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        for r in 0..self.rows {
            let row = &params[self.w + r * self.cols..self.w + (r + 1) * self.cols];
            let mut acc = params[self.b + r];
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            out[r] = acc;
        }
    }

    /// Accumulate gradients for the map and return the input gradient.
    fn backward(
        &self,
        params: &[f64],
        x: &[f64],
        dout: &[f64],
        grads: &mut [f64],
        dx: &mut [f64],
    ) {
        for r in 0..self.rows {
            let g = dout[r];
            if g == 0.0 {
                continue;
            }
            grads[self.b + r] += g;
            let wrow = self.w + r * self.cols;
            for c in 0..self.cols {
                grads[wrow + c] += g * x[c];
                dx[c] += g * params[wrow + c];
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct LayerLayout {
    lin1: Linear,
    lin2: Linear,
}

/// The trainable network: dims, layout, and the flat parameter vector.
#[derive(Debug, Clone)]
pub struct GinNetwork {
    pub dims: GinDims,
    layers: Vec<LayerLayout>,
    head1: Linear,
    head2: Linear,
    pub params: Vec<f64>,
}

pub const CLASSES: usize = 2;

impl GinNetwork {
    pub fn new(dims: GinDims, seed: u64) -> GinNetwork {
        let mut net = GinNetwork::zeroed(dims);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Uniform fan-in scaled initialization.
        let linears: Vec<Linear> = net
            .layers
            .iter()
            .flat_map(|l| [l.lin1, l.lin2])
            .chain([net.head1, net.head2])
            .collect();
        for lin in linears {
            let bound = 1.0 / (lin.cols as f64).sqrt();
            for k in 0..lin.rows * lin.cols {
                net.params[lin.w + k] = rng.gen_range(-bound..bound);
            }
            for k in 0..lin.rows {
                net.params[lin.b + k] = rng.gen_range(-bound..bound);
            }
        }
        net
    }

    pub fn zeroed(dims: GinDims) -> GinNetwork {
        let mut offset = 0usize;
        let mut alloc = |rows: usize, cols: usize| {
            let lin = Linear {
                w: offset,
                b: offset + rows * cols,
                rows,
                cols,
            };
            offset += lin.len();
            lin
        };
        let mut layers = Vec::with_capacity(dims.depth);
        for l in 0..dims.depth {
            let in_dim = if l == 0 { dims.input_dim } else { dims.width };
            let lin1 = alloc(dims.width, in_dim);
            let lin2 = alloc(dims.width, dims.width);
            layers.push(LayerLayout { lin1, lin2 });
        }
        let head1 = alloc(dims.width, dims.width);
        let head2 = alloc(CLASSES, dims.width);
        GinNetwork {
            dims,
            layers,
            head1,
            head2,
            params: vec![0.0; offset],
        }
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }
}

/// Node features extracted from an attributed graph.
pub fn features_of(g: &AttributedGraph) -> Vec<Vec<f64>> {
    (0..g.n() as u32)
        .map(|v| g.node_attr(v).iter().map(|a| a.to_f64()).collect())
        .collect()
}

/// Cached activations of one forward pass, enough to backpropagate.
pub struct ForwardCache {
    /// Per layer: aggregated inputs and first-linear pre-activations.
    layer_z: Vec<Vec<Vec<f64>>>,
    layer_a1: Vec<Vec<Vec<f64>>>,
    /// States per layer, states[0] = input features.
    pub states: Vec<Vec<Vec<f64>>>,
    sum: Vec<f64>,
    head_a: Vec<f64>,
    pub logits: Vec<f64>,
}

fn relu(v: f64) -> f64 {
    if v > 0.0 {
        v
    } else {
        0.0
    }
}

/// Forward pass with caches. Features must have the network's input width.
pub fn forward_train(
    net: &GinNetwork,
    g: &AttributedGraph,
    features: &[Vec<f64>],
) -> ForwardCache {
    let n = g.n();
    let w = net.dims.width;
    assert_eq!(features.len(), n);
    assert!(
        features.iter().all(|f| f.len() == net.dims.input_dim),
        "feature dim mismatch: expected {}",
        net.dims.input_dim
    );
    let mut states: Vec<Vec<Vec<f64>>> = vec![features.to_vec()];
    let mut layer_z = Vec::with_capacity(net.dims.depth);
    let mut layer_a1 = Vec::with_capacity(net.dims.depth);
    for (l, layout) in net.layers.iter().enumerate() {
        let prev = states.last().unwrap();
        let in_dim = if l == 0 { net.dims.input_dim } else { w };
        let mut z = vec![vec![0.0; in_dim]; n];
        for v in 0..n {
            for &u in g.closed_neighbors(v as u32).iter() {
                for k in 0..in_dim {
                    z[v][k] += prev[u as usize][k];
                }
            }
        }
        let mut a1 = vec![vec![0.0; w]; n];
        let mut h = vec![vec![0.0; w]; n];
        let mut x = vec![vec![0.0; w]; n];
        for v in 0..n {
            layout.lin1.forward(&net.params, &z[v], &mut a1[v]);
            let r1: Vec<f64> = a1[v].iter().copied().map(relu).collect();
            layout.lin2.forward(&net.params, &r1, &mut h[v]);
            for k in 0..w {
                x[v][k] = h[v][k];
            }
            if net.dims.residual && in_dim == w {
                for k in 0..w {
                    x[v][k] += prev[v][k];
                }
            }
        }
        layer_z.push(z);
        layer_a1.push(a1);
        states.push(x);
    }
    let terminal = states.last().unwrap();
    let mut sum = vec![0.0; w];
    for x in terminal {
        for k in 0..w {
            sum[k] += x[k];
        }
    }
    let mut head_a = vec![0.0; w];
    net.head1.forward(&net.params, &sum, &mut head_a);
    let head_r: Vec<f64> = head_a.iter().copied().map(relu).collect();
    let mut logits = vec![0.0; CLASSES];
    net.head2.forward(&net.params, &head_r, &mut logits);
    ForwardCache {
        layer_z,
        layer_a1,
        states,
        sum,
        head_a,
        logits,
    }
}

/// Softmax cross-entropy against a boolean label; returns (loss, dlogits).
pub fn cross_entropy(logits: &[f64], label: bool) -> (f64, Vec<f64>) {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&v| (v - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    let target = label as usize;
    let loss = -(exps[target] / total).ln();
    let dlogits: Vec<f64> = exps
        .iter()
        .enumerate()
        .map(|(k, &e)| e / total - if k == target { 1.0 } else { 0.0 })
        .collect();
    (loss, dlogits)
}

pub fn predict(logits: &[f64]) -> bool {
    logits[1] > logits[0]
}

/// Backpropagate one graph's loss gradient into `grads` (accumulating).
pub fn backward(
    net: &GinNetwork,
    g: &AttributedGraph,
    cache: &ForwardCache,
    dlogits: &[f64],
    grads: &mut [f64],
) {
    let n = g.n();
    let w = net.dims.width;
    // Head.
    let head_r: Vec<f64> = cache.head_a.iter().copied().map(relu).collect();
    let mut dhead_r = vec![0.0; w];
    net.head2
        .backward(&net.params, &head_r, dlogits, grads, &mut dhead_r);
    let dhead_a: Vec<f64> = dhead_r
        .iter()
        .zip(&cache.head_a)
        .map(|(&d, &a)| if a > 0.0 { d } else { 0.0 })
        .collect();
    let mut dsum = vec![0.0; w];
    net.head1
        .backward(&net.params, &cache.sum, &dhead_a, grads, &mut dsum);
    // Readout sum broadcasts the gradient to every node.
    let mut dx: Vec<Vec<f64>> = vec![dsum.clone(); n];
    // Layers in reverse.
    for l in (0..net.dims.depth).rev() {
        let layout = &net.layers[l];
        let in_dim = if l == 0 { net.dims.input_dim } else { w };
        let mut dprev = vec![vec![0.0; in_dim]; n];
        let mut dz = vec![vec![0.0; in_dim]; n];
        for v in 0..n {
            // Residual passthrough.
            if net.dims.residual && in_dim == w {
                for k in 0..w {
                    dprev[v][k] += dx[v][k];
                }
            }
            let r1: Vec<f64> = cache.layer_a1[l][v].iter().copied().map(relu).collect();
            let mut dr1 = vec![0.0; w];
            layout
                .lin2
                .backward(&net.params, &r1, &dx[v], grads, &mut dr1);
            let da1: Vec<f64> = dr1
                .iter()
                .zip(&cache.layer_a1[l][v])
                .map(|(&d, &a)| if a > 0.0 { d } else { 0.0 })
                .collect();
            layout
                .lin1
                .backward(&net.params, &cache.layer_z[l][v], &da1, grads, &mut dz[v]);
        }
        // Aggregation transpose: z_v sums x_u over closed neighborhoods, so
        // each dz_v flows back to every u in N*(v).
        for v in 0..n {
            for &u in g.closed_neighbors(v as u32).iter() {
                for k in 0..in_dim {
                    dprev[u as usize][k] += dz[v][k];
                }
            }
        }
        dx = dprev;
    }
}
