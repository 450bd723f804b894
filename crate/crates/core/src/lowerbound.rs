//! Two-player secret-pair graph families and balanced datasets.
//!
//! Each family takes a pair of q-bit secrets held by two players, builds a
//! graph split into an Alice side and a Bob side joined by a small cut, and
//! guarantees that a structural property of the graph is a function of
//! whether the secrets' one-bit index sets intersect. The properties are
//! never assumed: [`verify_family`] sweeps secret pairs exhaustively and
//! reports the observed polarity and any counterexamples, and the dataset
//! sampler labels every graph with the brute-force oracle.

use crate::format::Dataset;
use crate::graph::{AttributedGraph, GraphError, NodeId};
use crate::oracles::{contains_k_cycle, OracleError};
use crate::par;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("secret lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("cycle family needs even k >= 4, got {0}")]
    OddK(usize),
    #[error("cycle family needs q = p^2 (p = {p} wants {want} bits, got {got})")]
    WrongQ { p: usize, want: usize, got: usize },
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("family self-check failed: {0}")]
    SelfCheck(String),
    #[error("graph construction: {0}")]
    Graph(#[from] GraphError),
    #[error("oracle: {0}")]
    Oracle(#[from] OracleError),
    #[error("rejection sampling budget exhausted after {attempts} attempts (need {need} more labels of class {class})")]
    SamplingBudget {
        attempts: usize,
        need: usize,
        class: bool,
    },
}

/// Two q-bit secret strings, one per player.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecretPair {
    pub s_a: Vec<bool>,
    pub s_b: Vec<bool>,
}

impl SecretPair {
    pub fn new(s_a: Vec<bool>, s_b: Vec<bool>) -> Result<SecretPair, FamilyError> {
        if s_a.len() != s_b.len() {
            return Err(FamilyError::LengthMismatch(s_a.len(), s_b.len()));
        }
        if s_a.is_empty() {
            return Err(FamilyError::Infeasible("q must be >= 1".into()));
        }
        Ok(SecretPair { s_a, s_b })
    }

    pub fn from_bits(q: usize, a: u64, b: u64) -> Result<SecretPair, FamilyError> {
        SecretPair::new(
            (0..q).map(|i| a >> i & 1 == 1).collect(),
            (0..q).map(|i| b >> i & 1 == 1).collect(),
        )
    }

    pub fn q(&self) -> usize {
        self.s_a.len()
    }
}

/// True iff no index has a one bit in both secrets.
pub fn disjoint(sp: &SecretPair) -> bool {
    sp.s_a.iter().zip(&sp.s_b).all(|(&a, &b)| !(a && b))
}

/// A family instance with its player partition.
#[derive(Debug, Clone)]
pub struct PartitionedGraph {
    pub graph: AttributedGraph,
    pub alice_nodes: Vec<NodeId>,
    pub bob_nodes: Vec<NodeId>,
    pub cut_edges: Vec<(NodeId, NodeId)>,
}

impl PartitionedGraph {
    fn from_split(graph: AttributedGraph, alice_size: usize) -> PartitionedGraph {
        let alice_nodes: Vec<NodeId> = (0..alice_size as NodeId).collect();
        let bob_nodes: Vec<NodeId> = (alice_size as NodeId..graph.n() as NodeId).collect();
        let cut_edges = graph
            .edges()
            .iter()
            .copied()
            .filter(|&(a, b)| ((a as usize) < alice_size) != ((b as usize) < alice_size))
            .collect();
        PartitionedGraph {
            graph,
            alice_nodes,
            bob_nodes,
            cut_edges,
        }
    }
}

// ---------------------------------------------------------------------------
// Cycle family
// ---------------------------------------------------------------------------

/// Port pairs indexed by secret bit. For k >= 6 the natural complete
/// bipartite assignment works because kept pairs become long paths; for
/// k = 4 the pairs must themselves form a 4-cycle-free graph on the 2p
/// ports, which the pair budget q = p^2 only permits at p = 2.
fn cycle_pair_map(p: usize, k: usize) -> Result<Vec<(usize, usize)>, FamilyError> {
    let q = p * p;
    if k >= 6 {
        // bit (x, y) -> (u_x, w_y); ports u_x = x, w_y = p + y.
        return Ok((0..q).map(|t| (t / p, p + t % p)).collect());
    }
    // k == 4: direct edges. ex(4 vertices; C4) = 4 admits exactly a
    // triangle-plus-pendant shape; no such assignment exists for p >= 3.
    if p != 2 {
        return Err(FamilyError::Infeasible(format!(
            "k = 4 requires p = 2: {q} direct port edges on {} ports cannot avoid \
             4-cycles within one player",
            2 * p
        )));
    }
    Ok(vec![(0, 2), (0, 3), (1, 2), (0, 1)])
}

/// Build the k-cycle family instance for secrets of q = p^2 bits.
///
/// Each player holds 2p numbered ports; same-numbered ports of the two
/// players are joined, a cut of exactly 2p edges. Bit t of a player's
/// secret keeps (one) or deletes (zero) that player's port pair t; kept
/// pairs become paths of k/2 - 1 edges through private nodes. A spine of
/// heavily subdivided hops keeps every instance connected without creating
/// short cycles. The graph then contains a k-cycle precisely when some bit
/// is one in both secrets: the cycle crosses the cut twice and uses the two
/// players' copies of the same pair.
pub fn build_cycle_family(
    p: usize,
    k: usize,
    sp: &SecretPair,
) -> Result<PartitionedGraph, FamilyError> {
    if k % 2 != 0 || k < 4 {
        return Err(FamilyError::OddK(k));
    }
    if p < 1 {
        return Err(FamilyError::Infeasible("p must be >= 1".into()));
    }
    if sp.q() != p * p {
        return Err(FamilyError::WrongQ {
            p,
            want: p * p,
            got: sp.q(),
        });
    }
    let pairs = cycle_pair_map(p, k)?;
    let ports = 2 * p;
    let spine_hop = k + 1; // edges per spine hop; any cycle touching the spine exceeds k
    let path_len = k / 2 - 1;

    // Build one player's edge list, returning (edges, node_count).
    let build_side = |secret: &[bool]| -> (Vec<(usize, usize)>, usize) {
        let mut edges = Vec::new();
        let mut next = ports;
        // Spine over ports 0,1,...,2p-1.
        for s in 0..ports - 1 {
            let mut prev = s;
            for _ in 0..spine_hop - 1 {
                edges.push((prev, next));
                prev = next;
                next += 1;
            }
            edges.push((prev, s + 1));
        }
        for (t, &(a, b)) in pairs.iter().enumerate() {
            if !secret[t] {
                continue;
            }
            if path_len == 1 {
                edges.push((a, b));
            } else {
                let mut prev = a;
                for _ in 0..path_len - 1 {
                    edges.push((prev, next));
                    prev = next;
                    next += 1;
                }
                edges.push((prev, b));
            }
        }
        (edges, next)
    };

    let (a_edges, a_size) = build_side(&sp.s_a);
    let (b_edges, b_size) = build_side(&sp.s_b);
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    for (x, y) in a_edges {
        edges.push((x as NodeId, y as NodeId));
    }
    for (x, y) in b_edges {
        edges.push(((a_size + x) as NodeId, (a_size + y) as NodeId));
    }
    for t in 0..ports {
        edges.push((t as NodeId, (a_size + t) as NodeId));
    }
    let n = a_size + b_size;
    let graph = AttributedGraph::unattributed(n, &edges)?;
    Ok(PartitionedGraph::from_split(graph, a_size))
}

// ---------------------------------------------------------------------------
// Diameter family
// ---------------------------------------------------------------------------

/// Build the diameter family instance: diameter 5 when the secrets are
/// disjoint, 4 when they intersect.
///
/// Per player: a probe, a stem, a hub, and q row nodes. The hub is adjacent
/// to every row, the stem joins probe to hub, and bit i of the secret adds
/// the edge probe-row_i. Rows of equal index are joined across the cut and
/// the two hubs are joined. A common one-bit gives the probe-probe path
/// probe - row_m - row_m' - probe of length 3; without one the probes sit
/// at distance exactly 5 while every other pair stays within 4.
///
/// For q <= 8 the diameter property is re-verified against the BFS oracle
/// at construction time.
pub fn build_diameter_family(q: usize, sp: &SecretPair) -> Result<PartitionedGraph, FamilyError> {
    if sp.q() != q {
        return Err(FamilyError::LengthMismatch(sp.q(), q));
    }
    if q < 2 {
        return Err(FamilyError::Infeasible("diameter family needs q >= 2".into()));
    }
    let side = q + 3; // probe, stem, hub, rows...
    let probe = 0usize;
    let stem = 1usize;
    let hub = 2usize;
    let row = |i: usize| 3 + i;

    let build_side = |secret: &[bool], off: usize| -> Vec<(NodeId, NodeId)> {
        let mut e = vec![
            ((off + probe) as NodeId, (off + stem) as NodeId),
            ((off + stem) as NodeId, (off + hub) as NodeId),
        ];
        for i in 0..q {
            e.push(((off + hub) as NodeId, (off + row(i)) as NodeId));
            if secret[i] {
                e.push(((off + probe) as NodeId, (off + row(i)) as NodeId));
            }
        }
        e
    };

    let mut edges = build_side(&sp.s_a, 0);
    edges.extend(build_side(&sp.s_b, side));
    edges.push((hub as NodeId, (side + hub) as NodeId));
    for i in 0..q {
        edges.push((row(i) as NodeId, (side + row(i)) as NodeId));
    }
    let graph = AttributedGraph::unattributed(2 * side, &edges)?;
    let pg = PartitionedGraph::from_split(graph, side);
    if q <= 8 {
        let want = if disjoint(sp) { 5 } else { 4 };
        let got = pg.graph.diameter();
        if got != want {
            return Err(FamilyError::SelfCheck(format!(
                "diameter {got}, expected {want} for disjoint = {}",
                disjoint(sp)
            )));
        }
    }
    Ok(pg)
}

// ---------------------------------------------------------------------------
// Family verification sweeps
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Cycle { p: usize, k: usize },
    Diameter { q: usize },
}

/// Result of sweeping a family over secret pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyReport {
    pub family: Family,
    pub instances: usize,
    /// Observed property value on the disjoint class, when constant.
    pub disjoint_value: Option<bool>,
    /// Observed property value on the intersecting class, when constant.
    pub intersecting_value: Option<bool>,
    /// Secret pairs (a, b) whose property deviates from their class.
    pub counterexamples: Vec<(u64, u64)>,
    pub cut_sizes: Vec<usize>,
    pub node_counts: Vec<usize>,
}

impl FamilyReport {
    pub fn polarity_separates(&self) -> bool {
        matches!(
            (self.disjoint_value, self.intersecting_value),
            (Some(a), Some(b)) if a != b
        )
    }
}

fn family_property(family: Family, sp: &SecretPair) -> Result<(bool, usize, usize), FamilyError> {
    let (pg, value) = match family {
        Family::Cycle { p, k } => {
            let pg = build_cycle_family(p, k, sp)?;
            let v = contains_k_cycle(&pg.graph, k)?;
            (pg, v)
        }
        Family::Diameter { q } => {
            let pg = build_diameter_family(q, sp)?;
            let v = pg.graph.diameter() >= 5;
            (pg, v)
        }
    };
    Ok((value, pg.cut_edges.len(), pg.graph.n()))
}

/// Exhaustively sweep all 4^q secret pairs (q bounded by `exhaustive_limit`)
/// and report per-class property values, counterexamples, cut sizes, and
/// node counts. Counterexamples are report content, not errors.
pub fn verify_family(family: Family, exhaustive_limit: usize) -> Result<FamilyReport, FamilyError> {
    let q = match family {
        Family::Cycle { p, k } => {
            if k % 2 != 0 {
                return Err(FamilyError::OddK(k));
            }
            p * p
        }
        Family::Diameter { q } => q,
    };
    if q > exhaustive_limit || q >= 16 {
        return Err(FamilyError::Infeasible(format!(
            "exhaustive sweep of 4^{q} pairs exceeds the limit"
        )));
    }
    let total = 1u64 << q;
    let codes: Vec<u64> = (0..total * total).collect();
    let results: Vec<Result<(bool, bool, usize, usize), String>> =
        par::map_collect(&codes, |&code| {
            let (a, b) = (code / total, code % total);
            let sp = SecretPair::from_bits(q, a, b).map_err(|e| e.to_string())?;
            let dis = disjoint(&sp);
            family_property(family, &sp)
                .map(|(v, cut, n)| (dis, v, cut, n))
                .map_err(|e| e.to_string())
        });

    let mut report = FamilyReport {
        family,
        instances: 0,
        disjoint_value: None,
        intersecting_value: None,
        counterexamples: Vec::new(),
        cut_sizes: Vec::new(),
        node_counts: Vec::new(),
    };
    // First pass: majority class values; the class value is the first seen,
    // and deviation from it is recorded as a counterexample.
    for (code, r) in codes.iter().zip(&results) {
        let (dis, value, cut, n) = match r {
            Ok(v) => *v,
            Err(e) => return Err(FamilyError::Infeasible(e.clone())),
        };
        report.instances += 1;
        if !report.cut_sizes.contains(&cut) {
            report.cut_sizes.push(cut);
        }
        if !report.node_counts.contains(&n) {
            report.node_counts.push(n);
        }
        let slot = if dis {
            &mut report.disjoint_value
        } else {
            &mut report.intersecting_value
        };
        match slot {
            None => *slot = Some(value),
            Some(expect) if *expect != value => {
                report.counterexamples.push((code / total, code % total));
            }
            _ => {}
        }
    }
    report.cut_sizes.sort_unstable();
    report.node_counts.sort_unstable();
    Ok(report)
}

/// Randomized sweep of the diameter family at larger q: checks
/// `diameter >= 5 iff disjoint` on `samples` seeded random pairs and
/// returns the number of counterexamples (zero on success) plus the cut
/// size.
pub fn verify_diameter_random(
    q: usize,
    samples: usize,
    seed: u64,
) -> Result<(usize, usize), FamilyError> {
    let seeds: Vec<u64> = (0..samples as u64).collect();
    let failures: Vec<Option<()>> = par::map_collect(&seeds, |&s| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ s.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let s_a: Vec<bool> = (0..q).map(|_| rng.gen_bool(0.5)).collect();
        let s_b: Vec<bool> = (0..q).map(|_| rng.gen_bool(0.5)).collect();
        let sp = SecretPair::new(s_a, s_b).expect("equal lengths");
        let pg = build_diameter_family(q, &sp).expect("valid parameters");
        let want = disjoint(&sp);
        let got = pg.graph.diameter() >= 5;
        (want != got).then_some(())
    });
    let bad = failures.iter().flatten().count();
    let sp = SecretPair::from_bits(q, 0, 0)?;
    let cut = build_diameter_family(q, &sp)?.cut_edges.len();
    Ok((bad, cut))
}

// ---------------------------------------------------------------------------
// Balanced dataset sampling
// ---------------------------------------------------------------------------

/// Compact two-player gadget for training datasets: each player holds p
/// nodes joined index-wise across the cut; Alice additionally carries a
/// fixed star keeping every instance connected. Secret bits map to the
/// C(p,2) intra-player pairs, and a common pair yields a 4-cycle through
/// the two cut edges. Smaller and shallower than the verified lower-bound
/// family (n = 2p, diameter around 4), which is what training-scale
/// datasets need; labels always come from the cycle oracle.
fn build_dataset_gadget(p: usize, sp: &SecretPair) -> Result<AttributedGraph, FamilyError> {
    let pair_count = p * (p - 1) / 2;
    if sp.q() != pair_count {
        return Err(FamilyError::WrongQ {
            p,
            want: pair_count,
            got: sp.q(),
        });
    }
    let pairs: Vec<(usize, usize)> = (0..p)
        .flat_map(|i| (i + 1..p).map(move |j| (i, j)))
        .collect();
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    // Alice star anchored at her node 0, and the index-wise links.
    for t in 1..p {
        edges.push((0, t as NodeId));
    }
    for t in 0..p {
        edges.push((t as NodeId, (p + t) as NodeId));
    }
    for (bit, &(i, j)) in pairs.iter().enumerate() {
        if sp.s_a[bit] && i != 0 {
            edges.push((i as NodeId, j as NodeId));
        }
        if sp.s_b[bit] {
            edges.push(((p + i) as NodeId, (p + j) as NodeId));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    Ok(AttributedGraph::unattributed(2 * p, &edges)?)
}

/// Set `extra` additional one bits at uniformly random free indices,
/// avoiding every index marked in `forbid`.
fn fill_random_bits(
    bits: &mut [bool],
    extra: usize,
    forbid: Option<&[bool]>,
    rng: &mut ChaCha8Rng,
) {
    let free: Vec<usize> = (0..bits.len())
        .filter(|&i| !bits[i] && forbid.map_or(true, |f| !f[i]))
        .collect();
    let mut free = free;
    for _ in 0..extra.min(free.len()) {
        let k = rng.gen_range(0..free.len());
        bits[free.swap_remove(k)] = true;
    }
}

pub struct DatasetParams {
    pub p: usize,
    pub k: usize,
    pub count: usize,
    pub seed: u64,
    /// Per-bit keep probability when sampling secrets.
    pub density: f64,
    /// Rejection budget across the whole dataset.
    pub max_attempts: usize,
}

impl DatasetParams {
    pub fn new(p: usize, k: usize, count: usize, seed: u64) -> DatasetParams {
        DatasetParams {
            p,
            k,
            count,
            seed,
            density: (1.5 / (p.max(2) * (p.max(2) - 1) / 2) as f64).min(0.5),
            max_attempts: count.max(1) * 10_000,
        }
    }
}

/// Summary statistics recorded with a sampled dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetStats {
    pub n: usize,
    pub count: usize,
    pub positives: usize,
    pub mean_diameter: f64,
    pub attempts: usize,
}

/// Sample a label-balanced k-cycle dataset. Secret-pair disjointness steers
/// the sampling toward each class, but every label is assigned by the
/// brute-force oracle, and sampling retries until the oracle agrees.
pub fn sample_balanced_cycle_dataset(
    params: &DatasetParams,
) -> Result<(Dataset, DatasetStats), FamilyError> {
    if params.count % 2 != 0 {
        return Err(FamilyError::Infeasible("count must be even".into()));
    }
    if params.p < 3 {
        return Err(FamilyError::Infeasible("p must be >= 3".into()));
    }
    let q = params.p * (params.p - 1) / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut graphs = Vec::with_capacity(params.count);
    let mut labels = Vec::with_capacity(params.count);
    let mut attempts = 0usize;
    let mut diameters = 0usize;

    for idx in 0..params.count {
        let want_positive = idx % 2 == 0;
        loop {
            attempts += 1;
            if attempts > params.max_attempts {
                return Err(FamilyError::SamplingBudget {
                    attempts,
                    need: params.count - idx,
                    class: want_positive,
                });
            }
            // Both classes draw the same per-player bit-count distribution,
            // so edge counts carry no label information; only the overlap
            // structure differs. Disjointness steers, the oracle decides.
            let draw_count = |rng: &mut ChaCha8Rng| -> usize {
                1 + (0..q).filter(|_| rng.gen_bool(params.density)).count().min(q - 1)
            };
            let c_a = draw_count(&mut rng);
            let c_b = draw_count(&mut rng);
            let mut s_a = vec![false; q];
            let mut s_b = vec![false; q];
            if want_positive {
                let common = rng.gen_range(0..q);
                s_a[common] = true;
                s_b[common] = true;
                fill_random_bits(&mut s_a, c_a - 1, None, &mut rng);
                fill_random_bits(&mut s_b, c_b - 1, None, &mut rng);
            } else {
                fill_random_bits(&mut s_a, c_a, None, &mut rng);
                fill_random_bits(&mut s_b, c_b, Some(&s_a), &mut rng);
            }
            let sp = SecretPair::new(s_a, s_b)?;
            let g = build_dataset_gadget(params.p, &sp)?;
            let label = contains_k_cycle(&g, params.k)?;
            if label == want_positive {
                diameters += g.diameter();
                graphs.push(g);
                labels.push(label);
                break;
            }
        }
    }
    let stats = DatasetStats {
        n: 2 * params.p,
        count: params.count,
        positives: labels.iter().filter(|&&l| l).count(),
        mean_diameter: diameters as f64 / params.count as f64,
        attempts,
    };
    let names = (0..params.count).map(|i| format!("g{i:05}.graph")).collect();
    Ok((
        Dataset {
            graphs,
            labels,
            names,
        },
        stats,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disjoint_basic() {
        let sp = SecretPair::from_bits(4, 0b1010, 0b0101).unwrap();
        assert!(disjoint(&sp));
        let sp = SecretPair::from_bits(4, 0b1010, 0b0010).unwrap();
        assert!(!disjoint(&sp));
        let sp = SecretPair::from_bits(4, 0, 0b1111).unwrap();
        assert!(disjoint(&sp));
    }

    #[test]
    fn secret_pair_length_checked() {
        assert!(SecretPair::new(vec![true], vec![true, false]).is_err());
        assert!(SecretPair::new(vec![], vec![]).is_err());
    }

    #[test]
    fn cycle_family_cut_is_2p_and_connected() {
        for (p, k) in [(2usize, 4usize), (2, 6), (3, 6)] {
            let q = p * p;
            for (a, b) in [(0u64, 0u64), (1, 3), ((1 << q) - 1, 0), (5, 5)] {
                let sp = SecretPair::from_bits(q, a, b).unwrap();
                let pg = build_cycle_family(p, k, &sp).unwrap();
                assert_eq!(pg.cut_edges.len(), 2 * p, "p={p} k={k}");
                assert!(pg.graph.is_connected());
                assert_eq!(
                    pg.alice_nodes.len() + pg.bob_nodes.len(),
                    pg.graph.n()
                );
            }
        }
    }

    #[test]
    fn cycle_family_rejects_bad_parameters() {
        let sp = SecretPair::from_bits(4, 1, 1).unwrap();
        assert!(matches!(
            build_cycle_family(2, 3, &sp),
            Err(FamilyError::OddK(3))
        ));
        assert!(matches!(
            build_cycle_family(3, 6, &sp),
            Err(FamilyError::WrongQ { .. })
        ));
        let sp9 = SecretPair::from_bits(9, 1, 1).unwrap();
        assert!(matches!(
            build_cycle_family(3, 4, &sp9),
            Err(FamilyError::Infeasible(_))
        ));
    }

    #[test]
    fn cycle_family_common_bit_creates_k_cycle() {
        for (p, k) in [(2usize, 4usize), (2, 6), (3, 6)] {
            let q = p * p;
            let sp = SecretPair::from_bits(q, 0b1, 0b1).unwrap();
            let pg = build_cycle_family(p, k, &sp).unwrap();
            assert!(contains_k_cycle(&pg.graph, k).unwrap(), "p={p} k={k}");
            let sp = SecretPair::from_bits(q, 0b1, 0b10).unwrap();
            let pg = build_cycle_family(p, k, &sp).unwrap();
            assert!(!contains_k_cycle(&pg.graph, k).unwrap(), "p={p} k={k}");
        }
    }

    #[test]
    fn cycle_sweep_p2_k4_is_clean() {
        let report = verify_family(Family::Cycle { p: 2, k: 4 }, 4).unwrap();
        assert_eq!(report.instances, 256);
        assert!(report.counterexamples.is_empty());
        assert_eq!(report.disjoint_value, Some(false));
        assert_eq!(report.intersecting_value, Some(true));
        assert!(report.polarity_separates());
        assert_eq!(report.cut_sizes, vec![4]);
    }

    #[test]
    fn diameter_family_iff_at_q4() {
        let report = verify_family(Family::Diameter { q: 4 }, 4).unwrap();
        assert_eq!(report.instances, 256);
        assert!(report.counterexamples.is_empty());
        assert_eq!(report.disjoint_value, Some(true));
        assert_eq!(report.intersecting_value, Some(false));
    }

    #[test]
    fn diameter_family_intersecting_is_diameter_four() {
        let sp = SecretPair::from_bits(4, 0b0110, 0b0010).unwrap();
        assert!(!disjoint(&sp));
        let pg = build_diameter_family(4, &sp).unwrap();
        assert_eq!(pg.graph.diameter(), 4);
        let sp = SecretPair::from_bits(4, 0b0101, 0b1010).unwrap();
        let pg = build_diameter_family(4, &sp).unwrap();
        assert_eq!(pg.graph.diameter(), 5);
    }

    #[test]
    fn diameter_cut_grows_like_q_plus_one() {
        for q in [4usize, 8] {
            let sp = SecretPair::from_bits(q, 0, 0).unwrap();
            let pg = build_diameter_family(q, &sp).unwrap();
            assert_eq!(pg.cut_edges.len(), q + 1);
            assert_eq!(pg.graph.n(), 2 * (q + 3));
        }
    }

    #[test]
    fn dataset_balanced_and_oracle_labeled() {
        let params = DatasetParams::new(6, 4, 40, 42);
        let (ds, stats) = sample_balanced_cycle_dataset(&params).unwrap();
        assert_eq!(ds.len(), 40);
        assert_eq!(stats.positives, 20);
        assert_eq!(stats.n, 12);
        for (g, &label) in ds.graphs.iter().zip(&ds.labels) {
            assert_eq!(contains_k_cycle(g, 4).unwrap(), label);
            assert_eq!(g.n(), 12);
            assert!(g.is_connected());
        }
        // Reproducibility, bit-exact.
        let (ds2, _) = sample_balanced_cycle_dataset(&params).unwrap();
        assert_eq!(ds.graphs, ds2.graphs);
        assert_eq!(ds.labels, ds2.labels);
    }

    #[test]
    fn dataset_budget_error_when_exhausted() {
        let mut params = DatasetParams::new(6, 4, 40, 7);
        params.max_attempts = 0;
        assert!(matches!(
            sample_balanced_cycle_dataset(&params),
            Err(FamilyError::SamplingBudget { .. })
        ));
    }

    #[test]
    fn dataset_mean_diameter_near_four() {
        let params = DatasetParams::new(6, 4, 60, 11);
        let (_, stats) = sample_balanced_cycle_dataset(&params).unwrap();
        assert!(
            (stats.mean_diameter - 4.0).abs() <= 1.0,
            "mean diameter {}",
            stats.mean_diameter
        );
    }
}
