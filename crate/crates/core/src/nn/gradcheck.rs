//! Central finite-difference verification of reverse-mode gradients.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::graph::Model;
use super::layers::{mse_loss, Mode};
use super::tensor::Tensor;
use super::NnError;
use crate::seed::{rng_from_seed, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamCheck {
    pub name: String,
    pub checked: usize,
    pub max_rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradCheckReport {
    pub params: Vec<ParamCheck>,
    /// Relative error of the input gradients, one entry per model input.
    pub inputs: Vec<f64>,
    pub threshold: f64,
}

impl GradCheckReport {
    pub fn max_rel_error(&self) -> f64 {
        self.params
            .iter()
            .map(|p| p.max_rel_error)
            .chain(self.inputs.iter().copied())
            .fold(0.0, f64::max)
    }

    pub fn worst(&self) -> Option<&ParamCheck> {
        self.params
            .iter()
            .max_by(|a, b| a.max_rel_error.total_cmp(&b.max_rel_error))
    }

    pub fn passed(&self) -> bool {
        self.max_rel_error() < self.threshold
    }
}

/// `|a − n| / max(|a|, |n|, 1e-12)`
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-12)
}

pub const DEFAULT_THRESHOLD: f64 = 1e-4;

fn loss_of(model: &Model, inputs: &[&Tensor], target: &Tensor) -> Result<f64, NnError> {
    let out = model.predict(inputs)?;
    Ok(mse_loss(&out, target)?.0)
}

/// Check every parameter element (and every input element) with step `h`.
pub fn grad_check(model: &Model, inputs: &[&Tensor], target: &Tensor, h: f64) -> Result<GradCheckReport, NnError> {
    grad_check_sampled(model, inputs, target, h, None, &mut rng_from_seed(0))
}

/// Like [`grad_check`] but checks at most `max_per_tensor` randomly chosen
/// elements of each parameter/input tensor. Dropout runs in eval mode.
pub fn grad_check_sampled(
    model: &Model,
    inputs: &[&Tensor],
    target: &Tensor,
    h: f64,
    max_per_tensor: Option<usize>,
    rng: &mut Rng,
) -> Result<GradCheckReport, NnError> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(NnError::InvalidConfig(format!("finite-difference step must be > 0, got {h}")));
    }
    let tape = model.forward(inputs, Mode::Eval, rng)?;
    let (_, gout) = mse_loss(tape.output().expect("recorded"), target)?;
    let mut grads = model.zero_grads();
    let input_grads = model.backward(&tape, &gout, &mut grads)?;

    let pick = |n: usize, rng: &mut Rng| -> Vec<usize> {
        match max_per_tensor {
            Some(m) if m < n => {
                let mut idx = sample(rng, n, m).into_vec();
                idx.sort_unstable();
                idx
            }
            _ => (0..n).collect(),
        }
    };

    let mut probe = model.clone();
    let mut params = Vec::new();
    for (pi, p) in model.params().iter().enumerate() {
        let mut worst: f64 = 0.0;
        let idx = pick(p.value.len(), rng);
        for &i in &idx {
            let orig = p.value.data()[i];
            probe.params_mut()[pi].value.data_mut()[i] = orig + h;
            let lp = loss_of(&probe, inputs, target)?;
            probe.params_mut()[pi].value.data_mut()[i] = orig - h;
            let lm = loss_of(&probe, inputs, target)?;
            probe.params_mut()[pi].value.data_mut()[i] = orig;
            let numeric = (lp - lm) / (2.0 * h);
            worst = worst.max(relative_error(grads.0[pi].data()[i], numeric));
        }
        params.push(ParamCheck {
            name: p.name.clone(),
            checked: idx.len(),
            max_rel_error: worst,
        });
    }

    let mut input_errs = Vec::new();
    for (k, x) in inputs.iter().enumerate() {
        let mut worst: f64 = 0.0;
        let mut perturbed: Vec<Tensor> = inputs.iter().map(|t| (*t).clone()).collect();
        for i in pick(x.len(), rng) {
            let orig = x.data()[i];
            perturbed[k].data_mut()[i] = orig + h;
            let lp = loss_of(model, &perturbed.iter().collect::<Vec<_>>(), target)?;
            perturbed[k].data_mut()[i] = orig - h;
            let lm = loss_of(model, &perturbed.iter().collect::<Vec<_>>(), target)?;
            perturbed[k].data_mut()[i] = orig;
            worst = worst.max(relative_error(input_grads[k].data()[i], (lp - lm) / (2.0 * h)));
        }
        input_errs.push(worst);
    }

    Ok(GradCheckReport {
        params,
        inputs: input_errs,
        threshold: DEFAULT_THRESHOLD,
    })
}
