//! Command-line front end.
//!
//! Subcommands: `generate` (datasets and family instances), `verify`
//! (brute-force oracles), `verify-family` (exhaustive secret sweeps),
//! `simulate` (round-based execution with bit accounting), `gnn-run` (exact
//! engine forward), `train` (single training run), `grid` (grid search),
//! and `analyze` (critical capacity, phase plot, ablation).
//!
//! `--config` files are plain text, one `key=value` per line, `#` comments.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use gnncap_core::engine::{
    self, forward, gnn_from_local, local_from_gnn, AffineLayer, GnnLayer, GnnNetwork, LayerRule,
    Readout,
};
use gnncap_core::format::{parse as parse_graph, serialize, Dataset};
use gnncap_core::graph::{AttributedGraph, NodeId, SubgraphIndicator};
use gnncap_core::local::{
    cut_traffic, decide, run_congest, run_local, BandwidthBudget, DegreeAlgorithm, EchoAlgorithm,
    NodeAlgorithm, Transcript, UnionReconstruction,
};
use gnncap_core::lowerbound::{
    build_cycle_family, build_diameter_family, sample_balanced_cycle_dataset, verify_family,
    DatasetParams, Family, SecretPair,
};
use gnncap_core::oracles::{self, contains_k_cycle, SubgraphPredicate};
use gnncap_core::{Fixed, Precision};
use gnncap_train::experiments::{
    ablation, critical_capacity, emit_csv, emit_json, normalize_phase_plot, run_grid,
    ExperimentConfig, RunRecord,
};
use gnncap_train::gin::{features_of, forward_train, GinDims, GinNetwork as TrainNet};
use gnncap_train::train::{prepare, train as train_run, TrainConfig};
use gnncap_train::{AttributeScheme, SchemeKind};

#[derive(Parser)]
#[command(name = "gnncap", about = "Message-passing models, simulators, and experiments")]
struct Cli {
    /// Base random seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory for stores and emitted files.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Plain-text key=value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a balanced dataset or a single family instance.
    Generate {
        /// cycle | diameter
        #[arg(long)]
        family: String,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long)]
        q: Option<usize>,
        /// Dataset size; omit to emit a single instance from --secrets.
        #[arg(long)]
        count: Option<usize>,
        /// Two comma-separated bit strings, e.g. 1010,0110.
        #[arg(long)]
        secrets: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a brute-force oracle on a graph file and print JSON.
    Verify {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        subgraph: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        s: Option<NodeId>,
        #[arg(long)]
        t: Option<NodeId>,
    },
    /// Exhaustively sweep a family and print the JSON report.
    VerifyFamily {
        /// cycle | diameter
        #[arg(long)]
        family: String,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long)]
        q: Option<usize>,
        /// Exhaustive sweep bit budget.
        #[arg(long, default_value_t = 9)]
        limit: usize,
    },
    /// Run a node algorithm and write the transcript JSON.
    Simulate {
        #[arg(long)]
        graph: PathBuf,
        /// union | echo | degree
        #[arg(long)]
        alg: String,
        #[arg(long)]
        rounds: usize,
        #[arg(long)]
        bandwidth: Option<usize>,
        /// File listing the node ids of one partition side.
        #[arg(long)]
        cut: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Execute a network on the exact engine and write the trace JSON.
    GnnRun {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one network on a dataset directory.
    Train {
        #[arg(long)]
        dataset: PathBuf,
        /// Held-out dataset directory; defaults to --dataset.
        #[arg(long)]
        test_dataset: Option<PathBuf>,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        width: usize,
        #[arg(long, default_value = "unique_id")]
        scheme: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the depth-by-width grid over the configured distributions.
    Grid {
        /// Reduced grid: two distributions, two cells.
        #[arg(long)]
        smoke: bool,
    },
    /// Analyses over a completed run store.
    Analyze {
        /// critical | phase | ablation
        #[arg(long)]
        what: String,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        width: Option<usize>,
    },
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let kv = match &cli.config {
        Some(path) => read_config(path)?,
        None => BTreeMap::new(),
    };
    match cli.command {
        Command::Generate {
            family,
            p,
            k,
            q,
            count,
            secrets,
            out,
        } => cmd_generate(&family, p, k, q, count, secrets, &out, cli.seed, &kv),
        Command::Verify {
            problem,
            graph,
            subgraph,
            k,
            s,
            t,
        } => cmd_verify(&problem, &graph, subgraph.as_deref(), k, s, t),
        Command::VerifyFamily {
            family,
            p,
            k,
            q,
            limit,
        } => cmd_verify_family(&family, p, k, q, limit),
        Command::Simulate {
            graph,
            alg,
            rounds,
            bandwidth,
            cut,
            out,
        } => cmd_simulate(&graph, &alg, rounds, bandwidth, cut.as_deref(), &out),
        Command::GnnRun { graph, network, out } => cmd_gnn_run(&graph, &network, &out),
        Command::Train {
            dataset,
            test_dataset,
            depth,
            width,
            scheme,
            out,
        } => cmd_train(
            &dataset,
            test_dataset.as_deref(),
            depth,
            width,
            &scheme,
            &out,
            cli.seed,
            &kv,
        ),
        Command::Grid { smoke } => cmd_grid(smoke, &cli.out_dir, cli.seed, &kv),
        Command::Analyze {
            what,
            p,
            depth,
            width,
        } => cmd_analyze(&what, p, depth, width, &cli.out_dir, cli.seed, &kv),
    }
}

// ---------------------------------------------------------------------------
// Config files
// ---------------------------------------------------------------------------

fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let mut kv = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {}: expected key=value", lineno + 1))?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(kv)
}

fn kv_parse<T: std::str::FromStr>(kv: &BTreeMap<String, String>, key: &str, default: T) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    match kv.get(key) {
        Some(v) => v.parse().map_err(|e| anyhow!("config key {key}={v}: {e}")),
        None => Ok(default),
    }
}

fn kv_list(kv: &BTreeMap<String, String>, key: &str, default: Vec<usize>) -> Result<Vec<usize>> {
    match kv.get(key) {
        Some(v) => v
            .split(',')
            .map(|t| t.trim().parse().map_err(|e| anyhow!("config key {key}: {e}")))
            .collect(),
        None => Ok(default),
    }
}

fn train_config(kv: &BTreeMap<String, String>, seed: u64) -> Result<TrainConfig> {
    let mut cfg = TrainConfig {
        seed,
        ..TrainConfig::default()
    };
    cfg.epochs = kv_parse(kv, "epochs", cfg.epochs)?;
    cfg.lr = kv_parse(kv, "lr", cfg.lr)?;
    cfg.decay_factor = kv_parse(kv, "decay_factor", cfg.decay_factor)?;
    cfg.decay_every = kv_parse(kv, "decay_every", cfg.decay_every)?;
    cfg.batch_size = kv_parse(kv, "batch", cfg.batch_size)?;
    if let Some(v) = kv.get("early_stop") {
        cfg.early_stop_acc = Some(v.parse().map_err(|e| anyhow!("early_stop: {e}"))?);
    }
    if let Some(v) = kv.get("patience") {
        cfg.patience = Some(v.parse().map_err(|e| anyhow!("patience: {e}"))?);
    }
    Ok(cfg)
}

fn experiment_config(kv: &BTreeMap<String, String>, seed: u64) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig {
        seed,
        train: train_config(kv, seed)?,
        ..ExperimentConfig::default()
    };
    config.p_list = kv_list(kv, "p_list", config.p_list)?;
    config.widths = kv_list(kv, "widths", config.widths)?;
    config.depths = kv_list(kv, "depths", config.depths)?;
    config.k = kv_parse(kv, "k", config.k)?;
    config.train_size = kv_parse(kv, "train_size", config.train_size)?;
    config.test_size = kv_parse(kv, "test_size", config.test_size)?;
    config.restarts = kv_parse(kv, "restarts", config.restarts)?;
    config.threshold = kv_parse(kv, "threshold", config.threshold)?;
    if let Some(v) = kv.get("schemes") {
        config.schemes = v
            .split(',')
            .map(|s| SchemeKind::parse(s.trim()).ok_or_else(|| anyhow!("unknown scheme {s}")))
            .collect::<Result<_>>()?;
    }
    Ok(config)
}

// ---------------------------------------------------------------------------
// Secrets, partitions, subgraphs
// ---------------------------------------------------------------------------

fn parse_secrets(text: &str) -> Result<SecretPair> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| anyhow!("expected two comma-separated bit strings"))?;
    fn bits(s: &str) -> Result<Vec<bool>> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => bail!("bad bit {other}"),
            })
            .collect()
    }
    SecretPair::new(bits(a)?, bits(b)?).map_err(|e| anyhow!(e.to_string()))
}

fn read_partition(path: &Path) -> Result<Vec<NodeId>> {
    let text = std::fs::read_to_string(path)?;
    text.split_whitespace()
        .map(|t| t.parse().map_err(|e| anyhow!("partition id {t}: {e}")))
        .collect()
}

/// Subgraph files: `node <id>` and `edge <i> <j>` lines; listed items are
/// marked, edge endpoints are marked implicitly.
fn read_subgraph(path: &Path, g: &AttributedGraph) -> Result<SubgraphIndicator> {
    let text = std::fs::read_to_string(path)?;
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("node") => nodes.push(
                tok.next()
                    .ok_or_else(|| anyhow!("node line needs an id"))?
                    .parse::<NodeId>()?,
            ),
            Some("edge") => {
                let a = tok
                    .next()
                    .ok_or_else(|| anyhow!("edge needs endpoints"))?
                    .parse()?;
                let b = tok
                    .next()
                    .ok_or_else(|| anyhow!("edge needs endpoints"))?
                    .parse()?;
                edges.push((a, b));
            }
            other => bail!("unknown subgraph directive {other:?}"),
        }
    }
    let mut ind = SubgraphIndicator::from_edges(g, &edges);
    for v in nodes {
        if (v as usize) < g.n() {
            ind.node_member[v as usize] = true;
        }
    }
    Ok(ind)
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
fn cmd_generate(
    family: &str,
    p: Option<usize>,
    k: usize,
    q: Option<usize>,
    count: Option<usize>,
    secrets: Option<String>,
    out: &Path,
    seed: u64,
    kv: &BTreeMap<String, String>,
) -> Result<()> {
    match (family, count) {
        ("cycle", Some(count)) => {
            let p = p.ok_or_else(|| anyhow!("--p required for cycle datasets"))?;
            let mut params = DatasetParams::new(p, k, count, seed);
            params.density = kv_parse(kv, "density", params.density)?;
            let (ds, stats) = sample_balanced_cycle_dataset(&params)?;
            ds.write_dir(out)?;
            std::fs::write(out.join("stats.json"), serde_json::to_string_pretty(&stats)?)?;
            println!("{}", serde_json::to_string(&stats)?);
        }
        ("cycle", None) => {
            let p = p.ok_or_else(|| anyhow!("--p required"))?;
            let sp = parse_secrets(&secrets.ok_or_else(|| anyhow!("--secrets required"))?)?;
            let pg = build_cycle_family(p, k, &sp)?;
            std::fs::create_dir_all(out.parent().unwrap_or(Path::new(".")))?;
            std::fs::write(out, serialize(&pg.graph))?;
            println!(
                "{}",
                serde_json::json!({
                    "n": pg.graph.n(),
                    "cut": pg.cut_edges.len(),
                    "alice": pg.alice_nodes.len(),
                    "bob": pg.bob_nodes.len(),
                })
            );
        }
        ("diameter", _) => {
            let q = q.ok_or_else(|| anyhow!("--q required"))?;
            let sp = parse_secrets(&secrets.ok_or_else(|| anyhow!("--secrets required"))?)?;
            let pg = build_diameter_family(q, &sp)?;
            std::fs::create_dir_all(out.parent().unwrap_or(Path::new(".")))?;
            std::fs::write(out, serialize(&pg.graph))?;
            println!(
                "{}",
                serde_json::json!({
                    "n": pg.graph.n(),
                    "cut": pg.cut_edges.len(),
                    "diameter": pg.graph.diameter(),
                })
            );
        }
        (other, _) => bail!("unknown family {other}"),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// verify / verify-family
// ---------------------------------------------------------------------------

fn cmd_verify(
    problem: &str,
    graph: &Path,
    subgraph: Option<&Path>,
    k: Option<usize>,
    s: Option<NodeId>,
    t: Option<NodeId>,
) -> Result<()> {
    let g = parse_graph(&std::fs::read_to_string(graph)?)?;
    let sub = subgraph.map(|p| read_subgraph(p, &g)).transpose()?;
    let json = match problem {
        "k_cycle" => {
            let k = k.ok_or_else(|| anyhow!("--k required"))?;
            serde_json::json!({"problem": problem, "k": k, "value": contains_k_cycle(&g, k)?})
        }
        "diameter" => serde_json::json!({"problem": problem, "value": g.diameter()}),
        "girth" => serde_json::json!({"problem": problem, "value": g.girth()}),
        "shortest_path" => {
            let (s, t) = (
                s.ok_or_else(|| anyhow!("--s required"))?,
                t.ok_or_else(|| anyhow!("--t required"))?,
            );
            serde_json::json!({
                "problem": problem,
                "solution": oracles::shortest_path(&g, None, s, t)?,
            })
        }
        "min_cut" => serde_json::json!({"problem": problem, "solution": oracles::min_cut(&g, None)?}),
        "mst" => serde_json::json!({
            "problem": problem,
            "solution": oracles::min_spanning_tree(&g, None)?,
        }),
        "mis" => serde_json::json!({
            "problem": problem,
            "solution": oracles::max_independent_set(&g)?,
        }),
        "mvc" => serde_json::json!({"problem": problem, "solution": oracles::min_vertex_cover(&g)?}),
        "coloring" => serde_json::json!({
            "problem": problem,
            "solution": oracles::perfect_coloring(&g)?,
        }),
        pred @ ("connected" | "contains_cycle" | "spanning_tree" | "bipartite" | "cut"
        | "st_cut" | "hamiltonian_cycle" | "simple_path") => {
            let h = sub.ok_or_else(|| anyhow!("--subgraph required for {pred}"))?;
            let predicate = match pred {
                "connected" => SubgraphPredicate::Connected,
                "contains_cycle" => SubgraphPredicate::ContainsCycle,
                "spanning_tree" => SubgraphPredicate::SpanningTree,
                "bipartite" => SubgraphPredicate::Bipartite,
                "cut" => SubgraphPredicate::Cut,
                "st_cut" => SubgraphPredicate::StCut(
                    s.ok_or_else(|| anyhow!("--s required"))?,
                    t.ok_or_else(|| anyhow!("--t required"))?,
                ),
                "hamiltonian_cycle" => SubgraphPredicate::HamiltonianCycle,
                _ => SubgraphPredicate::SimplePath,
            };
            serde_json::json!({
                "problem": pred,
                "value": oracles::verify_subgraph(&g, &h, predicate)?,
            })
        }
        other => bail!("unknown problem {other}"),
    };
    println!("{}", serde_json::to_string_pretty(&json)?);
    Ok(())
}

fn cmd_verify_family(
    family: &str,
    p: Option<usize>,
    k: usize,
    q: Option<usize>,
    limit: usize,
) -> Result<()> {
    let fam = match family {
        "cycle" => Family::Cycle {
            p: p.ok_or_else(|| anyhow!("--p required"))?,
            k,
        },
        "diameter" => Family::Diameter {
            q: q.ok_or_else(|| anyhow!("--q required"))?,
        },
        other => bail!("unknown family {other}"),
    };
    let report = verify_family(fam, limit)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate / gnn-run
// ---------------------------------------------------------------------------

fn transcript_json(t: &Transcript) -> serde_json::Value {
    serde_json::json!({
        "rounds": t.rounds,
        "states": t
            .states
            .iter()
            .map(|round| round.iter().map(|s| s.to_bit_chars()).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "messages": t
            .messages
            .iter()
            .map(|round| {
                round
                    .iter()
                    .map(|(&(to, from), m)| {
                        serde_json::json!({
                            "to": to,
                            "from": from,
                            "bits": m.len(),
                            "data": m.to_bit_chars(),
                        })
                    })
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>(),
    })
}

fn make_algorithm(name: &str, rounds: usize) -> Result<Arc<dyn NodeAlgorithm>> {
    Ok(match name {
        "union" => Arc::new(UnionReconstruction { rounds }),
        "echo" => Arc::new(EchoAlgorithm),
        "degree" => Arc::new(DegreeAlgorithm),
        other => bail!("unknown algorithm {other} (expected union | echo | degree)"),
    })
}

fn cmd_simulate(
    graph: &Path,
    alg_name: &str,
    rounds: usize,
    bandwidth: Option<usize>,
    cut: Option<&Path>,
    out: &Path,
) -> Result<()> {
    let g = parse_graph(&std::fs::read_to_string(graph)?)?;
    let alg = make_algorithm(alg_name, rounds)?;
    let t = match bandwidth {
        Some(b) => run_congest(&g, alg.as_ref(), rounds, BandwidthBudget::bounded(b)?)?,
        None => run_local(&g, alg.as_ref(), rounds)?,
    };
    let mut json = transcript_json(&t);
    if let Some(cut_path) = cut {
        let side = read_partition(cut_path)?;
        let traffic = cut_traffic(&g, &t, &side)?;
        json["cut_traffic"] = serde_json::to_value(&traffic)?;
    }
    if let Ok(d) = decide(t.terminal_states()) {
        json["decision"] = serde_json::json!(format!("{d:?}"));
    }
    std::fs::create_dir_all(out.parent().unwrap_or(Path::new(".")))?;
    std::fs::write(out, serde_json::to_string_pretty(&json)?)?;
    println!("wrote {}", out.display());
    Ok(())
}

/// Network spec files: one directive per line.
///
/// ```text
/// net union rounds=3            # union | echo | degree bridges
/// net sum depth=2 dim=1         # identity-sum layers
/// net trained file=run.json     # parameters from a training run
/// precision bits=10 frac=0      # optional; default sized to the graph
/// readout sum                   # optional: sum | histogram | diameter
/// ```
fn cmd_gnn_run(graph: &Path, network: &Path, out: &Path) -> Result<()> {
    let g = parse_graph(&std::fs::read_to_string(graph)?)?;
    let text = std::fs::read_to_string(network)?;
    let mut net_line: Option<Vec<String>> = None;
    let mut precision: Option<Precision> = None;
    let mut read: Option<Readout> = None;
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<String> = line.split_whitespace().map(String::from).collect();
        match toks[0].as_str() {
            "net" => net_line = Some(toks[1..].to_vec()),
            "precision" => {
                let mut bits = 0u32;
                let mut frac = 0u32;
                for t in &toks[1..] {
                    if let Some(v) = t.strip_prefix("bits=") {
                        bits = v.parse()?;
                    } else if let Some(v) = t.strip_prefix("frac=") {
                        frac = v.parse()?;
                    }
                }
                precision = Some(Precision {
                    total_bits: bits,
                    frac_bits: frac,
                });
            }
            "readout" => {
                read = Some(match toks.get(1).map(String::as_str) {
                    Some("sum") => Readout::Sum,
                    Some("histogram") => Readout::Histogram,
                    Some("diameter") => Readout::ReconstructDiameter,
                    other => bail!("unknown readout {other:?}"),
                })
            }
            other => bail!("unknown network directive {other}"),
        }
    }
    let spec = net_line.ok_or_else(|| anyhow!("network file needs a net line"))?;
    let get = |key: &str| -> Option<String> {
        spec.iter()
            .find_map(|t| t.strip_prefix(&format!("{key}=")).map(String::from))
    };
    let prec = precision.unwrap_or_else(|| Precision::for_graph_size(g.n()));

    if spec.first().map(String::as_str) == Some("trained") {
        // Trained networks run in floating point; same trace file shape.
        let file = get("file").ok_or_else(|| anyhow!("trained net needs file="))?;
        let run: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(file)?)?;
        let dims: GinDims = serde_json::from_value(run["dims"].clone())?;
        let params: Vec<f64> = serde_json::from_value(run["params"].clone())?;
        let mut net = TrainNet::zeroed(dims);
        if net.params.len() != params.len() {
            bail!(
                "parameter count mismatch: run has {}, dims need {}",
                params.len(),
                net.params.len()
            );
        }
        net.params = params;
        let cache = forward_train(&net, &g, &features_of(&g));
        let json = serde_json::json!({
            "kind": "trained",
            "states": cache.states,
            "logits": cache.logits,
        });
        std::fs::create_dir_all(out.parent().unwrap_or(Path::new(".")))?;
        std::fs::write(out, serde_json::to_string_pretty(&json)?)?;
        println!("wrote {}", out.display());
        return Ok(());
    }

    let net = match spec.first().map(String::as_str) {
        Some(name @ ("union" | "echo" | "degree")) => {
            let rounds: usize = match get("rounds") {
                Some(v) => v.parse()?,
                None => g.diameter().max(1),
            };
            gnn_from_local(make_algorithm(name, rounds)?, rounds, prec)?
        }
        Some("sum") => {
            let depth: usize = match get("depth") {
                Some(v) => v.parse()?,
                None => 1,
            };
            let dim: usize = match get("dim") {
                Some(v) => v.parse()?,
                None => 1,
            };
            GnnNetwork::new(
                (0..depth)
                    .map(|_| GnnLayer {
                        rule: LayerRule::Affine(AffineLayer::sum(dim)),
                    })
                    .collect(),
                None,
                prec,
            )?
        }
        other => bail!("unknown network {other:?}"),
    };
    let net = GnnNetwork {
        readout: read,
        ..net
    };
    let trace = forward(&net, &g)?;
    let budget = engine::congest_budget(trace.width(), prec.total_bits, g.n());
    let mut json = serde_json::json!({
        "kind": "exact",
        "width": trace.width(),
        "precision": {"bits": prec.total_bits, "frac": prec.frac_bits},
        "congest_budget": budget,
        "states": trace
            .states
            .iter()
            .map(|layer| {
                layer
                    .iter()
                    .map(|x| x.iter().map(Fixed::to_decimal_string).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>(),
    });
    if let Some(r) = net.readout {
        let out_vec = engine::readout(&trace, r)?;
        json["readout"] = serde_json::json!(out_vec
            .iter()
            .map(Fixed::to_decimal_string)
            .collect::<Vec<_>>());
    }
    let _ = local_from_gnn(&net);
    std::fs::create_dir_all(out.parent().unwrap_or(Path::new(".")))?;
    std::fs::write(out, serde_json::to_string_pretty(&json)?)?;
    println!("wrote {}", out.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// train / grid / analyze
// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
fn cmd_train(
    dataset: &Path,
    test_dataset: Option<&Path>,
    depth: usize,
    width: usize,
    scheme: &str,
    out: &Path,
    seed: u64,
    kv: &BTreeMap<String, String>,
) -> Result<()> {
    let kind = SchemeKind::parse(scheme).ok_or_else(|| anyhow!("unknown scheme {scheme}"))?;
    let train_ds = Dataset::read_dir(dataset)?;
    let test_ds = match test_dataset {
        Some(p) => Dataset::read_dir(p)?,
        None => train_ds.clone(),
    };
    let max_n = train_ds.max_n().max(test_ds.max_n());
    let max_deg = train_ds.max_degree().max(test_ds.max_degree());
    let sch = AttributeScheme::sized_for(kind, max_n, max_deg);
    let train_prep = prepare(&train_ds, &sch, seed ^ 0xa11ce)?;
    let test_prep = prepare(&test_ds, &sch, seed ^ 0xb0b)?;
    let cfg = train_config(kv, seed)?;
    let dims = GinDims {
        input_dim: sch.dim,
        width,
        depth,
        residual: kv_parse(kv, "residual", 1usize)? != 0,
    };
    let result = train_run(dims, &train_prep, &test_prep, &cfg)?;
    let json = serde_json::json!({
        "config": cfg,
        "dims": dims,
        "scheme": kind.name(),
        "curves": result.curves,
        "best": {
            "epoch": result.best_epoch,
            "train_acc": result.best_train_acc,
            "test_acc": result.best_test_acc,
        },
        "final": {
            "train_acc": result.final_train_acc,
            "test_acc": result.final_test_acc,
            "epochs": result.epochs_run,
        },
        "failed": result.failed,
        "params": result.params,
    });
    std::fs::create_dir_all(out.parent().unwrap_or(Path::new(".")))?;
    std::fs::write(out, serde_json::to_string_pretty(&json)?)?;
    println!(
        "best train {:.3} test {:.3} at epoch {} ({} epochs run)",
        result.best_train_acc, result.best_test_acc, result.best_epoch, result.epochs_run
    );
    Ok(())
}

fn smoke_overrides(config: &mut ExperimentConfig) {
    config.p_list.truncate(2);
    config.widths = vec![2, 20];
    config.depths = vec![5];
    config.train.early_stop_acc = Some(1.0);
    config.train.patience = Some(60);
    config.train.epochs = config.train.epochs.min(400);
}

fn cmd_grid(smoke: bool, out_dir: &Path, seed: u64, kv: &BTreeMap<String, String>) -> Result<()> {
    let mut config = experiment_config(kv, seed)?;
    if smoke {
        smoke_overrides(&mut config);
    }
    let store = out_dir.join("runs");
    let records = run_grid(&config, Some(&store))?;
    std::fs::create_dir_all(out_dir)?;
    emit_csv(&records, &out_dir.join("results.csv"))?;
    emit_json(&records, &out_dir.join("results.json"))?;
    println!(
        "{} records -> {}",
        records.len(),
        out_dir.join("results.csv").display()
    );
    Ok(())
}

fn load_store(out_dir: &Path) -> Result<Vec<RunRecord>> {
    let store = out_dir.join("runs");
    let mut records = Vec::new();
    for entry in
        std::fs::read_dir(&store).with_context(|| format!("run store {}", store.display()))?
    {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) == Some("json") {
            let rec: RunRecord = serde_json::from_str(&std::fs::read_to_string(&path)?)?;
            records.push(rec);
        }
    }
    records.sort_by(|a, b| a.run_id.cmp(&b.run_id));
    Ok(records)
}

fn cmd_analyze(
    what: &str,
    p: Option<usize>,
    depth: Option<usize>,
    width: Option<usize>,
    out_dir: &Path,
    seed: u64,
    kv: &BTreeMap<String, String>,
) -> Result<()> {
    let config = experiment_config(kv, seed)?;
    match what {
        "critical" => {
            let records = load_store(out_dir)?;
            let ns: std::collections::BTreeSet<usize> = records.iter().map(|r| r.n).collect();
            let mut rows = Vec::new();
            for n in ns {
                rows.push(serde_json::json!({
                    "n": n,
                    "critical_capacity": critical_capacity(&records, n, config.threshold),
                }));
            }
            println!("{}", serde_json::to_string_pretty(&rows)?);
        }
        "phase" => {
            let records = load_store(out_dir)?;
            let ns: std::collections::BTreeSet<usize> = records.iter().map(|r| r.n).collect();
            let mut crit = BTreeMap::new();
            for n in ns {
                if let Some(c) = critical_capacity(&records, n, config.threshold) {
                    crit.insert(n, c);
                }
            }
            let only_known: Vec<RunRecord> = records
                .into_iter()
                .filter(|r| crit.contains_key(&r.n))
                .collect();
            let rows = normalize_phase_plot(&only_known, &crit)
                .map_err(|e| anyhow!(e.to_string()))?;
            let path = out_dir.join("phase.csv");
            let mut wtr = csv::Writer::from_path(&path)?;
            wtr.write_record(["n", "d", "w", "x", "y", "test_acc", "subcritical"])?;
            for r in &rows {
                wtr.write_record([
                    r.n.to_string(),
                    r.d.to_string(),
                    r.w.to_string(),
                    format!("{:.6}", r.x),
                    format!("{:.6}", r.y),
                    format!("{:.6}", r.test_acc),
                    r.subcritical.to_string(),
                ])?;
            }
            wtr.flush()?;
            println!("wrote {} ({} rows)", path.display(), rows.len());
        }
        "ablation" => {
            let mut config = config;
            if config.schemes.len() < 2 {
                config.schemes = vec![
                    SchemeKind::Anonymous,
                    SchemeKind::DegreeOneHot,
                    SchemeKind::UniqueIdOneHot,
                    SchemeKind::RandomUniqueId,
                ];
            }
            let p = p.unwrap_or(config.p_list[0]);
            let d = depth.unwrap_or(5);
            let w = width.unwrap_or(20);
            let (rows, _) = ablation(&config, p, d, w).map_err(|e| anyhow!(e.to_string()))?;
            println!("{}", serde_json::to_string_pretty(&rows)?);
        }
        other => bail!("unknown analysis {other} (expected critical | phase | ablation)"),
    }
    Ok(())
}
