use serde::{Deserialize, Serialize};

use super::graph::{Gradients, Param};
use super::NnError;

/// RMSprop with an epoch-indexed step-decay learning rate:
///
/// ```text
/// s ← ρ·s + (1 − ρ)·g²
/// θ ← θ − η_e·g / (√s + ε),   η_e = η·factor^⌊epoch / every⌋
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmsProp {
    pub learning_rate: f64,
    pub decay_factor: f64,
    pub decay_every_epochs: usize,
    pub rho: f64,
    pub epsilon: f64,
    #[serde(skip)]
    accumulators: Vec<Vec<f64>>,
}

impl RmsProp {
    pub fn new(learning_rate: f64) -> Result<Self, NnError> {
        Self::with_schedule(learning_rate, 0.1, 15)
    }

    pub fn with_schedule(learning_rate: f64, decay_factor: f64, decay_every_epochs: usize) -> Result<Self, NnError> {
        let opt = Self {
            learning_rate,
            decay_factor,
            decay_every_epochs,
            rho: 0.9,
            epsilon: 1e-8,
            accumulators: Vec::new(),
        };
        opt.validate()?;
        Ok(opt)
    }

    pub fn validate(&self) -> Result<(), NnError> {
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(NnError::InvalidConfig(format!("learning rate must be > 0, got {}", self.learning_rate)));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(NnError::InvalidConfig(format!("rho must be in (0, 1), got {}", self.rho)));
        }
        if self.decay_every_epochs == 0 {
            return Err(NnError::InvalidConfig("decay_every_epochs must be >= 1".into()));
        }
        if !(self.decay_factor > 0.0) || !(self.epsilon >= 0.0) {
            return Err(NnError::InvalidConfig("decay factor must be > 0 and epsilon >= 0".into()));
        }
        Ok(())
    }

    pub fn effective_lr(&self, epoch: usize) -> f64 {
        let k = (epoch / self.decay_every_epochs) as i32;
        self.learning_rate * self.decay_factor.powi(k)
    }

    pub fn accumulators(&self) -> &[Vec<f64>] {
        &self.accumulators
    }

    pub fn step(&mut self, params: &mut [Param], grads: &Gradients, epoch: usize) -> Result<(), NnError> {
        if grads.0.len() != params.len() {
            return Err(NnError::Graph("gradient count does not match parameters".into()));
        }
        if self.accumulators.is_empty() {
            self.accumulators = params.iter().map(|p| vec![0.0; p.value.len()]).collect();
        }
        let lr = self.effective_lr(epoch);
        let (rho, eps) = (self.rho, self.epsilon);
        for ((p, g), s) in params.iter_mut().zip(&grads.0).zip(&mut self.accumulators) {
            if p.value.shape() != g.shape() || s.len() != g.len() {
                return Err(NnError::Shape(format!("gradient shape mismatch for {}", p.name)));
            }
            for ((theta, &gi), si) in p.value.data_mut().iter_mut().zip(g.data()).zip(s.iter_mut()) {
                *si = rho * *si + (1.0 - rho) * gi * gi;
                // idle weights decay geometrically into subnormals, which are
                // orders of magnitude slower on most FPUs
                if *si < f64::MIN_POSITIVE {
                    *si = 0.0;
                }
                if gi != 0.0 {
                    *theta -= lr * gi / (si.sqrt() + eps);
                }
            }
        }
        Ok(())
    }
}
