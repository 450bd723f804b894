//! The training loop: seeded, deterministic, with per-epoch curves and a
//! best-epoch snapshot.

use crate::adam::Adam;
use crate::attrs::{assign_attributes, AttributeScheme};
use crate::gin::{backward, cross_entropy, features_of, forward_train, predict, GinDims, GinNetwork};
use gnncap_core::format::Dataset;
use gnncap_core::graph::AttributedGraph;
use gnncap_core::par;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("attribute scheme: {0}")]
    Attr(#[from] crate::attrs::AttrError),
    #[error("empty dataset")]
    EmptyDataset,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub lr: f64,
    pub decay_factor: f64,
    pub decay_every: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Stop once train and test accuracy both reach this value.
    pub early_stop_acc: Option<f64>,
    /// Stop when train accuracy has not improved for this many epochs.
    pub patience: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> TrainConfig {
        TrainConfig {
            epochs: 4000,
            lr: 1e-3,
            decay_factor: 0.5,
            decay_every: 1000,
            batch_size: 32,
            seed: 0,
            early_stop_acc: None,
            patience: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpochPoint {
    pub epoch: usize,
    pub loss: f64,
    pub train_acc: f64,
    pub test_acc: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainResult {
    pub curves: Vec<EpochPoint>,
    pub best_epoch: usize,
    pub best_train_acc: f64,
    pub best_test_acc: f64,
    /// Final train accuracy at the last epoch actually run.
    pub final_train_acc: f64,
    pub final_test_acc: f64,
    pub epochs_run: usize,
    /// Training diverged (non-finite loss); accuracies are from before the
    /// divergence.
    pub failed: bool,
    pub params: Vec<f64>,
}

/// A dataset with attributes already assigned for a given scheme.
pub struct Prepared {
    pub graphs: Vec<AttributedGraph>,
    pub features: Vec<Vec<Vec<f64>>>,
    pub labels: Vec<bool>,
}

/// Assign scheme attributes to every graph. Random-id permutations are
/// seeded per graph index, fixed for the whole run: consistent within a
/// graph, fresh across graphs.
pub fn prepare(
    ds: &Dataset,
    scheme: &AttributeScheme,
    seed: u64,
) -> Result<Prepared, TrainError> {
    if ds.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let mut graphs = Vec::with_capacity(ds.len());
    let mut features = Vec::with_capacity(ds.len());
    for (i, g) in ds.graphs.iter().enumerate() {
        let a = assign_attributes(g, scheme, seed ^ (i as u64).wrapping_mul(0x9e3779b97f4a7c15))?;
        features.push(features_of(&a));
        graphs.push(a);
    }
    Ok(Prepared {
        graphs,
        features,
        labels: ds.labels.clone(),
    })
}

pub fn accuracy(net: &GinNetwork, data: &Prepared) -> f64 {
    let idx: Vec<usize> = (0..data.graphs.len()).collect();
    let hits: Vec<bool> = par::map_collect(&idx, |&i| {
        let cache = forward_train(net, &data.graphs[i], &data.features[i]);
        predict(&cache.logits) == data.labels[i]
    });
    hits.iter().filter(|&&h| h).count() as f64 / hits.len() as f64
}

/// Train a network. Deterministic given the config: the parameter
/// initialization, batch order, and gradient summation order are all fixed
/// by the seed, and per-graph gradients are reduced in index order.
pub fn train(
    dims: GinDims,
    train_data: &Prepared,
    test_data: &Prepared,
    config: &TrainConfig,
) -> Result<TrainResult, TrainError> {
    if train_data.graphs.is_empty() || test_data.graphs.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let mut net = GinNetwork::new(dims, config.seed);
    let mut opt = Adam::new(
        config.lr,
        config.decay_factor,
        config.decay_every,
        net.param_count(),
    );
    let mut order: Vec<usize> = (0..train_data.graphs.len()).collect();
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed_5eed_5eed_5eed);

    let mut curves = Vec::new();
    let mut best = (0usize, 0.0f64, 0.0f64, net.params.clone()); // epoch, train, test, params
    let mut last_improve = 0usize;
    let mut best_train_seen = 0.0f64;
    let mut failed = false;

    let mut epochs_run = 0;
    for epoch in 0..config.epochs {
        epochs_run = epoch + 1;
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size.max(1)) {
            // Per-graph gradients in parallel, reduced in batch order.
            let parts: Vec<(f64, Vec<f64>)> = par::map_collect(batch, |&i| {
                let mut grads = vec![0.0; net.param_count()];
                let cache = forward_train(&net, &train_data.graphs[i], &train_data.features[i]);
                let (loss, dlogits) = cross_entropy(&cache.logits, train_data.labels[i]);
                backward(&net, &train_data.graphs[i], &cache, &dlogits, &mut grads);
                (loss, grads)
            });
            let scale = 1.0 / batch.len() as f64;
            let mut grads = vec![0.0; net.param_count()];
            for (loss, part) in &parts {
                epoch_loss += loss;
                for (acc, g) in grads.iter_mut().zip(part) {
                    *acc += g * scale;
                }
            }
            opt.step(&mut net.params, &grads, epoch);
        }
        epoch_loss /= train_data.graphs.len() as f64;
        if !epoch_loss.is_finite() {
            failed = true;
            break;
        }
        let train_acc = accuracy(&net, train_data);
        let test_acc = accuracy(&net, test_data);
        curves.push(EpochPoint {
            epoch,
            loss: epoch_loss,
            train_acc,
            test_acc,
        });
        if test_acc > best.2 || (test_acc == best.2 && train_acc > best.1) {
            best = (epoch, train_acc, test_acc, net.params.clone());
        }
        if train_acc > best_train_seen {
            best_train_seen = train_acc;
            last_improve = epoch;
        }
        if let Some(th) = config.early_stop_acc {
            if train_acc >= th && test_acc >= th {
                break;
            }
        }
        if let Some(p) = config.patience {
            if epoch - last_improve >= p {
                break;
            }
        }
    }
    let (final_train_acc, final_test_acc) = curves
        .last()
        .map(|c| (c.train_acc, c.test_acc))
        .unwrap_or((0.0, 0.0));
    Ok(TrainResult {
        best_epoch: best.0,
        best_train_acc: best.1,
        best_test_acc: best.2,
        final_train_acc,
        final_test_acc,
        epochs_run,
        failed,
        curves,
        params: best.3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attrs::{AttributeScheme, SchemeKind};
    use gnncap_core::AttributedGraph;

    fn tiny_dataset() -> Dataset {
        // Ten copies each of two structurally distinct graphs: C6 against
        // K4 padded to six nodes with a pendant path.
        let a = AttributedGraph::cycle(6);
        let b = AttributedGraph::unattributed(
            6,
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4), (4, 5)],
        )
        .unwrap();
        let mut graphs = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..10 {
            graphs.push(a.clone());
            labels.push(false);
            graphs.push(b.clone());
            labels.push(true);
        }
        let names = (0..20).map(|i| format!("g{i}.graph")).collect();
        Dataset {
            graphs,
            labels,
            names,
        }
    }

    #[test]
    fn separable_dataset_reaches_full_train_accuracy() {
        let ds = tiny_dataset();
        let scheme = AttributeScheme::sized_for(SchemeKind::UniqueIdOneHot, 6, 5);
        let prep = prepare(&ds, &scheme, 7).unwrap();
        let dims = GinDims {
            input_dim: scheme.dim,
            width: 8,
            depth: 3,
            residual: true,
        };
        let config = TrainConfig {
            epochs: 300,
            early_stop_acc: Some(1.0),
            seed: 3,
            ..TrainConfig::default()
        };
        let result = train(dims, &prep, &prep, &config).unwrap();
        assert!(!result.failed);
        assert_eq!(result.best_train_acc, 1.0, "curves: {:?}", result.curves.last());
    }

    #[test]
    fn identical_configs_give_identical_curves() {
        let ds = tiny_dataset();
        let scheme = AttributeScheme::sized_for(SchemeKind::DegreeOneHot, 6, 5);
        let prep = prepare(&ds, &scheme, 7).unwrap();
        let dims = GinDims {
            input_dim: scheme.dim,
            width: 4,
            depth: 2,
            residual: true,
        };
        let config = TrainConfig {
            epochs: 20,
            seed: 11,
            ..TrainConfig::default()
        };
        let a = train(dims, &prep, &prep, &config).unwrap();
        let b = train(dims, &prep, &prep, &config).unwrap();
        assert_eq!(a.curves.len(), b.curves.len());
        for (x, y) in a.curves.iter().zip(&b.curves) {
            assert_eq!(x.loss.to_bits(), y.loss.to_bits());
            assert_eq!(x.train_acc, y.train_acc);
        }
        assert_eq!(a.params, b.params);
    }
}
