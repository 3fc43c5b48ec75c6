use std::time::Instant;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{BeamsNet, ModelError};
use crate::nn::layers::{mse_loss, Mode};
use crate::nn::{NnError, RmsProp, Tensor};
use crate::seed::component_rng;
use crate::sim::{Dataset, SampleWindow};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum TrainError {
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("dataset has an empty {0} split")]
    EmptySplit(&'static str),
    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl From<NnError> for TrainError {
    fn from(e: NnError) -> Self {
        TrainError::Model(ModelError::Nn(e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub decay_factor: f64,
    pub decay_every_epochs: usize,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub rms_decay: f64,
    pub epsilon: f64,
    /// Visit training windows in a fresh seeded permutation every epoch
    /// instead of chronological order.
    #[serde(default = "enabled")]
    pub shuffle: bool,
    /// Standardize the sequence inputs with statistics of the train split
    /// before training; the fitted map travels with the network.
    #[serde(default = "enabled")]
    pub standardize_inputs: bool,
}

fn enabled() -> bool {
    true
}

impl TrainConfig {
    /// η = 0.01, 30 epochs (simulation setting).
    pub fn simulation(seed: u64) -> Self {
        Self {
            learning_rate: 0.01,
            decay_factor: 0.1,
            decay_every_epochs: 15,
            batch_size: 4,
            epochs: 30,
            seed,
            rms_decay: 0.9,
            epsilon: 1e-8,
            shuffle: true,
            standardize_inputs: true,
        }
    }

    /// η = 0.001, 50 epochs (recorded-data setting).
    pub fn recorded(seed: u64) -> Self {
        Self {
            learning_rate: 0.001,
            epochs: 50,
            ..Self::simulation(seed)
        }
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        if self.batch_size == 0 {
            return Err(TrainError::InvalidConfig("batch_size must be >= 1".into()));
        }
        if self.epochs == 0 {
            return Err(TrainError::InvalidConfig("epochs must be >= 1".into()));
        }
        self.optimizer()
            .map(|_| ())
            .map_err(|e| TrainError::InvalidConfig(e.to_string()))
    }

    pub fn optimizer(&self) -> Result<RmsProp, NnError> {
        let mut opt = RmsProp::with_schedule(self.learning_rate, self.decay_factor, self.decay_every_epochs)?;
        opt.rho = self.rms_decay;
        opt.epsilon = self.epsilon;
        opt.validate()?;
        Ok(opt)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    /// Mean mini-batch loss over the epoch (train mode).
    pub train_loss: f64,
    /// Eval-mode loss over the test split.
    pub test_loss: f64,
    pub learning_rate: f64,
    /// Not part of any reproducible artifact.
    #[serde(skip)]
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainLog {
    pub epochs: Vec<EpochLog>,
}

impl TrainLog {
    /// `epoch,train_loss,test_loss,learning_rate` table.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("epoch,train_loss,test_loss,learning_rate\n");
        for e in &self.epochs {
            s.push_str(&format!("{},{},{},{}\n", e.epoch, e.train_loss, e.test_loss, e.learning_rate));
        }
        s
    }
}

fn target(w: &SampleWindow) -> Tensor {
    Tensor::from_vec(w.gt_velocity.0.to_vec())
}

/// Mean per-window MSE in eval mode.
pub fn eval_loss(net: &BeamsNet, windows: &[SampleWindow]) -> Result<f64, ModelError> {
    let preds = net.predict_batch(windows)?;
    let mut total = 0.0;
    for (p, w) in preds.iter().zip(windows) {
        let (l, _) = mse_loss(&Tensor::from_vec(p.0.to_vec()), &target(w))?;
        total += l;
    }
    Ok(total / windows.len() as f64)
}

/// Mini-batch RMSprop over the train split. With `tc.shuffle` the windows
/// are visited in a new permutation every epoch, otherwise in chronological
/// order; the last short batch is kept. Dropout masks and permutations are
/// drawn from streams derived from `tc.seed`.
pub fn train(mut net: BeamsNet, ds: &Dataset, tc: &TrainConfig) -> Result<(BeamsNet, TrainLog), TrainError> {
    tc.validate()?;
    net.check_dataset(ds)?;
    let (train_set, test_set) = (ds.train(), ds.test());
    if train_set.is_empty() {
        return Err(TrainError::EmptySplit("train"));
    }
    if test_set.is_empty() {
        return Err(TrainError::EmptySplit("test"));
    }

    if tc.standardize_inputs {
        let s = net.fit_input_scaling(train_set);
        net.set_input_scaling(Some(s))?;
    }
    let mut opt = tc.optimizer()?;
    let mut dropout_rng = component_rng(tc.seed, "dropout", 0);
    let mut grads = net.model().zero_grads();
    let mut log = TrainLog::default();
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut shuffle_rng = component_rng(tc.seed, "shuffle", 0);

    for epoch in 0..tc.epochs {
        let started = Instant::now();
        let mut loss_sum = 0.0;
        let mut batches = 0usize;
        if tc.shuffle {
            order.shuffle(&mut shuffle_rng);
        }
        for (bi, batch) in order.chunks(tc.batch_size).enumerate() {
            grads.zero();
            let inv_b = 1.0 / batch.len() as f64;
            let mut batch_loss = 0.0;
            for w in batch.iter().map(|&i| &train_set[i]) {
                let x = net.inputs(w)?;
                let refs: Vec<&Tensor> = x.iter().collect();
                let tape = net.model().forward(&refs, Mode::Train, &mut dropout_rng)?;
                let (l, mut g) = mse_loss(tape.output().expect("recorded"), &target(w))?;
                g.data_mut().iter_mut().for_each(|v| *v *= inv_b);
                net.model().backward(&tape, &g, &mut grads)?;
                batch_loss += l * inv_b;
            }
            if !batch_loss.is_finite() || !grads.is_finite() {
                return Err(TrainError::NonFiniteLoss { epoch, batch: bi });
            }
            opt.step(net.model_mut().params_mut(), &grads, epoch)?;
            loss_sum += batch_loss;
            batches += 1;
        }
        let test_loss = eval_loss(&net, test_set)?;
        if !test_loss.is_finite() {
            return Err(TrainError::NonFiniteLoss { epoch, batch: batches });
        }
        let entry = EpochLog {
            epoch,
            train_loss: loss_sum / batches as f64,
            test_loss,
            learning_rate: opt.effective_lr(epoch),
            wall_time_s: started.elapsed().as_secs_f64(),
        };
        log::info!(
            "{} epoch {:>3}: train {:.6e} test {:.6e} lr {:.1e} ({:.1}s)",
            net.variant(),
            epoch,
            entry.train_loss,
            entry.test_loss,
            entry.learning_rate,
            entry.wall_time_s
        );
        log.epochs.push(entry);
    }
    Ok((net, log))
}
