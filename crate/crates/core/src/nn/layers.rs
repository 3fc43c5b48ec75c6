//! Layer kernels as free functions: forward maps and their reverse-mode
//! counterparts. Backward functions accumulate into parameter gradients.

use rand::Rng as _;

use super::tensor::{axpy, dot, Tensor};
use super::NnError;
use crate::seed::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

fn shape_err(msg: String) -> NnError {
    NnError::Shape(msg)
}

/// Affine map `z = W·a + b` for `W: [out, in]`. Accepts `[in]` or a batch
/// `[B, in]`.
pub fn dense_forward(weight: &Tensor, bias: &Tensor, input: &Tensor) -> Result<Tensor, NnError> {
    let (out_f, in_f) = match weight.shape() {
        [o, i] => (*o, *i),
        s => return Err(shape_err(format!("dense weight must be 2-D, got {s:?}"))),
    };
    if bias.shape() != [out_f] {
        return Err(shape_err(format!("dense bias {:?} != [{out_f}]", bias.shape())));
    }
    let batch = match input.shape() {
        [i] if *i == in_f => None,
        [b, i] if *i == in_f => Some(*b),
        s => return Err(shape_err(format!("dense expects [{in_f}] or [B, {in_f}], got {s:?}"))),
    };
    let rows = batch.unwrap_or(1);
    let mut out = vec![0.0; rows * out_f];
    let (w, b) = (weight.data(), bias.data());
    for (a, z) in input.data().chunks_exact(in_f).zip(out.chunks_exact_mut(out_f)) {
        for (o, zo) in z.iter_mut().enumerate() {
            *zo = dot(&w[o * in_f..(o + 1) * in_f], a) + b[o];
        }
    }
    let shape = match batch {
        Some(bs) => vec![bs, out_f],
        None => vec![out_f],
    };
    Tensor::new(shape, out)
}

/// Reverse of [`dense_forward`] for a single `[in]` input. Adds `∂L/∂W` and
/// `∂L/∂b` into `grad_w`/`grad_b`, returns `∂L/∂a`.
pub fn dense_backward(
    weight: &Tensor,
    input: &[f64],
    grad_out: &[f64],
    grad_w: &mut [f64],
    grad_b: &mut [f64],
) -> Vec<f64> {
    let in_f = input.len();
    let w = weight.data();
    let mut grad_in = vec![0.0; in_f];
    for (o, &g) in grad_out.iter().enumerate() {
        if g == 0.0 {
            continue;
        }
        grad_b[o] += g;
        axpy(g, input, &mut grad_w[o * in_f..(o + 1) * in_f]);
        axpy(g, &w[o * in_f..(o + 1) * in_f], &mut grad_in);
    }
    grad_in
}

/// Valid (unpadded, stride 1) cross-correlation along time.
///
/// `input: [L, C]`, `weight: [F, k, C]`, `bias: [F]`, output `[L − k + 1, F]`:
/// `out[t, f] = b[f] + Σ_a Σ_c w[f, a, c]·x[t + a, c]`.
pub fn conv1d_forward(weight: &Tensor, bias: &Tensor, input: &Tensor) -> Result<Tensor, NnError> {
    let (filters, k, ch) = match weight.shape() {
        [f, k, c] => (*f, *k, *c),
        s => return Err(shape_err(format!("conv1d weight must be 3-D, got {s:?}"))),
    };
    if bias.shape() != [filters] {
        return Err(shape_err(format!("conv1d bias {:?} != [{filters}]", bias.shape())));
    }
    let len = match input.shape() {
        [l, c] if *c == ch => *l,
        s => return Err(shape_err(format!("conv1d expects [L, {ch}], got {s:?}"))),
    };
    if len < k {
        return Err(NnError::SequenceTooShort { len, kernel: k });
    }
    let out_len = len - k + 1;
    let span = k * ch;
    let (x, w, b) = (input.data(), weight.data(), bias.data());
    let mut out = vec![0.0; out_len * filters];
    for t in 0..out_len {
        let window = &x[t * ch..t * ch + span];
        for f in 0..filters {
            out[t * filters + f] = dot(&w[f * span..(f + 1) * span], window) + b[f];
        }
    }
    Tensor::new(vec![out_len, filters], out)
}

/// Reverse of [`conv1d_forward`]; returns `∂L/∂x` with the input's layout.
pub fn conv1d_backward(
    weight: &Tensor,
    input: &Tensor,
    grad_out: &[f64],
    grad_w: &mut [f64],
    grad_b: &mut [f64],
) -> Vec<f64> {
    let (filters, k, ch) = (weight.shape()[0], weight.shape()[1], weight.shape()[2]);
    let len = input.shape()[0];
    let out_len = len - k + 1;
    let span = k * ch;
    let (x, w) = (input.data(), weight.data());
    let mut grad_in = vec![0.0; x.len()];
    for t in 0..out_len {
        for f in 0..filters {
            let g = grad_out[t * filters + f];
            if g == 0.0 {
                continue;
            }
            grad_b[f] += g;
            axpy(g, &x[t * ch..t * ch + span], &mut grad_w[f * span..(f + 1) * span]);
            axpy(g, &w[f * span..(f + 1) * span], &mut grad_in[t * ch..t * ch + span]);
        }
    }
    grad_in
}

pub fn relu(input: &Tensor) -> Tensor {
    let mut out = input.clone();
    out.data_mut().iter_mut().for_each(|x| *x = x.max(0.0));
    out
}

pub fn tanh(input: &Tensor) -> Tensor {
    let mut out = input.clone();
    out.data_mut().iter_mut().for_each(|x| *x = x.tanh());
    out
}

/// Gradient through ReLU given its forward output.
pub fn relu_backward(output: &[f64], grad_out: &[f64]) -> Vec<f64> {
    output
        .iter()
        .zip(grad_out)
        .map(|(&y, &g)| if y > 0.0 { g } else { 0.0 })
        .collect()
}

/// Gradient through tanh given its forward output.
pub fn tanh_backward(output: &[f64], grad_out: &[f64]) -> Vec<f64> {
    output.iter().zip(grad_out).map(|(&y, &g)| g * (1.0 - y * y)).collect()
}

/// Inverted dropout. In train mode each element is zeroed with probability
/// `p` and survivors are scaled by `1/(1−p)`; the returned mask holds the
/// per-element multiplier. Eval mode (or `p == 0`) is the identity and
/// draws nothing.
pub fn dropout_apply(
    p: f64,
    input: &Tensor,
    mode: Mode,
    rng: &mut Rng,
) -> Result<(Tensor, Option<Vec<f64>>), NnError> {
    if !(0.0..1.0).contains(&p) {
        return Err(NnError::InvalidConfig(format!("dropout p must be in [0, 1), got {p}")));
    }
    if mode == Mode::Eval || p == 0.0 {
        return Ok((input.clone(), None));
    }
    let keep_scale = 1.0 / (1.0 - p);
    let mask: Vec<f64> = (0..input.len())
        .map(|_| if rng.random::<f64>() < p { 0.0 } else { keep_scale })
        .collect();
    let mut out = input.clone();
    out.data_mut().iter_mut().zip(&mask).for_each(|(x, m)| *x *= m);
    Ok((out, Some(mask)))
}

/// Mean squared error over all elements and its gradient w.r.t. `pred`:
/// `(1/n)‖y − ŷ‖²`, `(2/n)(ŷ − y)`.
pub fn mse_loss(pred: &Tensor, target: &Tensor) -> Result<(f64, Tensor), NnError> {
    if pred.shape() != target.shape() {
        return Err(shape_err(format!(
            "mse: prediction {:?} vs target {:?}",
            pred.shape(),
            target.shape()
        )));
    }
    let n = pred.len() as f64;
    let mut grad = pred.clone();
    let mut loss = 0.0;
    for (g, t) in grad.data_mut().iter_mut().zip(target.data()) {
        let d = *g - t;
        loss += d * d;
        *g = 2.0 * d / n;
    }
    Ok((loss / n, grad))
}
