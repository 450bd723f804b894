//! Experiment orchestration: dataset generation, grid search over depth and
//! width, capacity analysis, attribute ablations, and result emission.
//!
//! Runs are content-addressed: the run id hashes everything that determines
//! the outcome, finished runs are persisted as JSON, and re-running a grid
//! against the same store changes nothing.

use crate::attrs::{AttributeScheme, SchemeKind};
use crate::gin::GinDims;
use crate::train::{prepare, train, TrainConfig, TrainError, TrainResult};
use gnncap_core::format::Dataset;
use gnncap_core::lowerbound::{sample_balanced_cycle_dataset, DatasetParams, FamilyError};
use gnncap_core::par;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("dataset generation: {0}")]
    Family(#[from] FamilyError),
    #[error("training: {0}")]
    Train(#[from] TrainError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("store: {0}")]
    Store(String),
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error("missing critical capacity for n = {0}")]
    MissingCritical(usize),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Dataset family sizes, one distribution per entry.
    pub p_list: Vec<usize>,
    pub k: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub widths: Vec<usize>,
    pub depths: Vec<usize>,
    pub restarts: usize,
    pub schemes: Vec<SchemeKind>,
    pub seed: u64,
    /// "Solved" means test accuracy strictly above this.
    pub threshold: f64,
    pub train: TrainConfig,
}

impl Default for ExperimentConfig {
    fn default() -> ExperimentConfig {
        ExperimentConfig {
            p_list: vec![6, 8, 10, 12, 14],
            k: 4,
            train_size: 1000,
            test_size: 200,
            widths: vec![2, 10, 20],
            depths: vec![5, 10, 15, 20],
            restarts: 4,
            schemes: vec![SchemeKind::UniqueIdOneHot],
            seed: 0,
            threshold: 0.95,
            train: TrainConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.widths.is_empty() || self.depths.is_empty() || self.p_list.is_empty() {
            return Err(ExperimentError::BadConfig("empty grid".into()));
        }
        if !(self.threshold > 0.5 && self.threshold <= 1.0) {
            return Err(ExperimentError::BadConfig(format!(
                "threshold {} outside (0.5, 1]",
                self.threshold
            )));
        }
        if self.restarts == 0 {
            return Err(ExperimentError::BadConfig("restarts must be >= 1".into()));
        }
        Ok(())
    }
}

/// One training run's outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub n: usize,
    pub p: usize,
    pub d: usize,
    pub w: usize,
    pub scheme: String,
    pub seed: u64,
    pub restart: usize,
    pub train_acc: f64,
    pub test_acc: f64,
    pub final_train_acc: f64,
    pub final_test_acc: f64,
    pub epochs: usize,
    pub failed: bool,
}

/// FNV-1a over the run-determining fields; stable across runs and platforms.
fn run_id(p: usize, k: usize, d: usize, w: usize, scheme: SchemeKind, seed: u64, restart: usize,
          sizes: (usize, usize), train: &TrainConfig) -> String {
    let key = format!(
        "p={p};k={k};d={d};w={w};scheme={};seed={seed};restart={restart};train={};test={};epochs={};lr={};batch={};decay={}x{};early={:?};patience={:?}",
        scheme.name(), sizes.0, sizes.1, train.epochs, train.lr, train.batch_size,
        train.decay_factor, train.decay_every, train.early_stop_acc, train.patience,
    );
    let mut h: u64 = 0xcbf29ce484222325;
    for b in key.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

/// Generate (or regenerate, bit-identically) the train/test datasets for a
/// family size.
pub fn grid_datasets(
    config: &ExperimentConfig,
    p: usize,
) -> Result<(Dataset, Dataset), ExperimentError> {
    let train = sample_balanced_cycle_dataset(&DatasetParams::new(
        p,
        config.k,
        config.train_size,
        config.seed ^ (p as u64) << 32,
    ))?
    .0;
    let test = sample_balanced_cycle_dataset(&DatasetParams::new(
        p,
        config.k,
        config.test_size,
        config.seed ^ (p as u64) << 32 ^ 0xdead_beef,
    ))?
    .0;
    Ok((train, test))
}

fn store_path(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}.json"))
}

fn load_record(dir: &Path, id: &str) -> Option<RunRecord> {
    let path = store_path(dir, id);
    let text = std::fs::read_to_string(path).ok()?;
    serde_json::from_str(&text).ok()
}

fn save_record(dir: &Path, rec: &RunRecord) -> Result<(), ExperimentError> {
    std::fs::create_dir_all(dir)?;
    let text = serde_json::to_string_pretty(rec)
        .map_err(|e| ExperimentError::Store(e.to_string()))?;
    std::fs::write(store_path(dir, &rec.run_id), text)?;
    Ok(())
}

/// Execute the full grid: every (distribution, scheme, depth, width,
/// restart) cell. Completed runs found in `store` are reused; fresh results
/// are appended to it. Individual run failures (divergence) are recorded,
/// not fatal.
pub fn run_grid(
    config: &ExperimentConfig,
    store: Option<&Path>,
) -> Result<Vec<RunRecord>, ExperimentError> {
    config.validate()?;
    let mut records = Vec::new();
    for &p in &config.p_list {
        let (train_ds, test_ds) = grid_datasets(config, p)?;
        let n = train_ds.max_n().max(test_ds.max_n());
        let max_deg = train_ds.max_degree().max(test_ds.max_degree());
        for &scheme_kind in &config.schemes {
            let scheme = AttributeScheme::sized_for(scheme_kind, n, max_deg);
            let train_prep = prepare(&train_ds, &scheme, config.seed ^ 0xa11ce)?;
            let test_prep = prepare(&test_ds, &scheme, config.seed ^ 0xb0b)?;
            // All cells of this (p, scheme) pairing, in a fixed order.
            let mut cells = Vec::new();
            for &d in &config.depths {
                for &w in &config.widths {
                    for restart in 0..config.restarts {
                        cells.push((d, w, restart));
                    }
                }
            }
            let results: Vec<Result<RunRecord, String>> =
                par::map_collect(&cells, |&(d, w, restart)| {
                    let id = run_id(
                        p,
                        config.k,
                        d,
                        w,
                        scheme_kind,
                        config.seed,
                        restart,
                        (config.train_size, config.test_size),
                        &config.train,
                    );
                    if let Some(dir) = store {
                        if let Some(rec) = load_record(dir, &id) {
                            return Ok(rec);
                        }
                    }
                    let dims = GinDims {
                        input_dim: scheme.dim,
                        width: w,
                        depth: d,
                        residual: true,
                    };
                    let mut cfg = config.train.clone();
                    cfg.seed = config.seed
                        ^ (restart as u64) << 48
                        ^ (d as u64) << 32
                        ^ (w as u64) << 16
                        ^ p as u64;
                    let result = train(dims, &train_prep, &test_prep, &cfg)
                        .map_err(|e| e.to_string())?;
                    Ok(RunRecord {
                        run_id: id,
                        n,
                        p,
                        d,
                        w,
                        scheme: scheme_kind.name().to_string(),
                        seed: cfg.seed,
                        restart,
                        train_acc: result.best_train_acc,
                        test_acc: result.best_test_acc,
                        final_train_acc: result.final_train_acc,
                        final_test_acc: result.final_test_acc,
                        epochs: result.epochs_run,
                        failed: result.failed,
                    })
                });
            for r in results {
                let rec = r.map_err(ExperimentError::Store)?;
                if let Some(dir) = store {
                    if load_record(dir, &rec.run_id).is_none() {
                        save_record(dir, &rec)?;
                    }
                }
                records.push(rec);
            }
        }
    }
    Ok(records)
}

/// Minimum capacity (d * w) among records on `n` whose test accuracy
/// strictly exceeds the threshold.
pub fn critical_capacity(records: &[RunRecord], n: usize, threshold: f64) -> Option<usize> {
    records
        .iter()
        .filter(|r| r.n == n && !r.failed && r.test_acc > threshold)
        .map(|r| r.d * r.w)
        .min()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseRow {
    pub n: usize,
    pub d: usize,
    pub w: usize,
    pub x: f64,
    pub y: f64,
    pub test_acc: f64,
    pub subcritical: bool,
}

/// Depth and width normalized by the square root of the per-n critical
/// capacity; rows with x * y < 1 are flagged sub-critical.
pub fn normalize_phase_plot(
    records: &[RunRecord],
    critical: &BTreeMap<usize, usize>,
) -> Result<Vec<PhaseRow>, ExperimentError> {
    let mut rows = Vec::with_capacity(records.len());
    for r in records {
        let crit = *critical
            .get(&r.n)
            .ok_or(ExperimentError::MissingCritical(r.n))?;
        let root = (crit as f64).sqrt();
        rows.push(PhaseRow {
            n: r.n,
            d: r.d,
            w: r.w,
            x: r.d as f64 / root,
            y: r.w as f64 / root,
            test_acc: r.test_acc,
            subcritical: r.d * r.w < crit,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AblationRow {
    pub scheme: String,
    pub final_train_acc: f64,
    pub final_test_acc: f64,
    pub best_train_acc: f64,
    pub best_test_acc: f64,
    pub epochs: usize,
}

/// Train `config.restarts` networks per scheme on a fixed dataset and cell,
/// reporting each scheme's best performer by final train accuracy, in the
/// schemes' listed order.
pub fn ablation(
    config: &ExperimentConfig,
    p: usize,
    d: usize,
    w: usize,
) -> Result<(Vec<AblationRow>, Vec<TrainResult>), ExperimentError> {
    config.validate()?;
    let (train_ds, test_ds) = grid_datasets(config, p)?;
    let n = train_ds.max_n().max(test_ds.max_n());
    let max_deg = train_ds.max_degree().max(test_ds.max_degree());
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for &kind in &config.schemes {
        let scheme = AttributeScheme::sized_for(kind, n, max_deg);
        let train_prep = prepare(&train_ds, &scheme, config.seed ^ 0xa11ce)?;
        let test_prep = prepare(&test_ds, &scheme, config.seed ^ 0xb0b)?;
        let dims = GinDims {
            input_dim: scheme.dim,
            width: w,
            depth: d,
            residual: true,
        };
        let restart_ids: Vec<u64> = (0..config.restarts as u64).collect();
        let runs: Vec<Result<TrainResult, String>> = par::map_collect(&restart_ids, |&r| {
            let mut cfg = config.train.clone();
            cfg.seed = config.seed ^ 0xab1a ^ (kind.name().len() as u64) << 8 ^ r << 40;
            train(dims, &train_prep, &test_prep, &cfg).map_err(|e| e.to_string())
        });
        let mut best: Option<TrainResult> = None;
        for r in runs {
            let r = r.map_err(ExperimentError::Store)?;
            if best
                .as_ref()
                .map_or(true, |b| r.final_train_acc > b.final_train_acc)
            {
                best = Some(r);
            }
        }
        let result = best.expect("restarts >= 1");
        rows.push(AblationRow {
            scheme: kind.name().to_string(),
            final_train_acc: result.final_train_acc,
            final_test_acc: result.final_test_acc,
            best_train_acc: result.best_train_acc,
            best_test_acc: result.best_test_acc,
            epochs: result.epochs_run,
        });
        results.push(result);
    }
    Ok((rows, results))
}

/// Stable results schema shared by the CSV and JSON emitters.
pub const RESULTS_COLUMNS: [&str; 10] = [
    "n", "p", "d", "w", "scheme", "seed", "restart", "train_acc", "test_acc", "epochs",
];

/// Rows sorted by (n, p, d, w, scheme, restart).
fn sorted(records: &[RunRecord]) -> Vec<&RunRecord> {
    let mut rows: Vec<&RunRecord> = records.iter().collect();
    rows.sort_by(|a, b| {
        (a.n, a.p, a.d, a.w, &a.scheme, a.restart).cmp(&(b.n, b.p, b.d, b.w, &b.scheme, b.restart))
    });
    rows
}

pub fn emit_csv(records: &[RunRecord], path: &Path) -> Result<(), ExperimentError> {
    let mut wtr = csv::Writer::from_path(path).map_err(|e| ExperimentError::Store(e.to_string()))?;
    wtr.write_record(RESULTS_COLUMNS)
        .map_err(|e| ExperimentError::Store(e.to_string()))?;
    for r in sorted(records) {
        wtr.write_record([
            r.n.to_string(),
            r.p.to_string(),
            r.d.to_string(),
            r.w.to_string(),
            r.scheme.clone(),
            r.seed.to_string(),
            r.restart.to_string(),
            format!("{:.6}", r.train_acc),
            format!("{:.6}", r.test_acc),
            r.epochs.to_string(),
        ])
        .map_err(|e| ExperimentError::Store(e.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn emit_json(records: &[RunRecord], path: &Path) -> Result<(), ExperimentError> {
    let rows: Vec<serde_json::Value> = sorted(records)
        .into_iter()
        .map(|r| {
            serde_json::json!({
                "n": r.n, "p": r.p, "d": r.d, "w": r.w,
                "scheme": r.scheme, "seed": r.seed, "restart": r.restart,
                "train_acc": format!("{:.6}", r.train_acc),
                "test_acc": format!("{:.6}", r.test_acc),
                "epochs": r.epochs,
            })
        })
        .collect();
    std::fs::write(
        path,
        serde_json::to_string_pretty(&rows).map_err(|e| ExperimentError::Store(e.to_string()))?,
    )?;
    Ok(())
}
