//! Fixed feed-forward graphs with named parameters and a recorded tape.
//!
//! A [`Model`] is an ordered list of nodes. Every node only reads nodes that
//! precede it, so evaluation order is the insertion order and the reverse
//! pass simply walks the tape backwards.

use serde::{Deserialize, Serialize};

use super::init::kaiming_uniform;
use super::layers::{self, Mode};
use super::tensor::Tensor;
use super::NnError;
use crate::seed::Rng;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LayerKind {
    Dense {
        weight: usize,
        bias: usize,
        in_features: usize,
        out_features: usize,
    },
    Conv1d {
        weight: usize,
        bias: usize,
        in_channels: usize,
        filters: usize,
        kernel: usize,
    },
    Dropout {
        p: f64,
    },
    Relu,
    Tanh,
    Flatten,
    Concat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NodeKind {
    Input { name: String },
    Layer(LayerKind),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub name: String,
    pub kind: NodeKind,
    pub inputs: Vec<NodeId>,
    pub shape: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub value: Tensor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    nodes: Vec<Node>,
    params: Vec<Param>,
    inputs: Vec<NodeId>,
    output: NodeId,
}

/// Activations (and dropout masks) recorded by a forward pass.
#[derive(Debug, Clone, Default)]
pub struct Tape {
    values: Vec<Tensor>,
    masks: Vec<Option<Vec<f64>>>,
    node_count: usize,
}

impl Tape {
    pub fn output(&self) -> Option<&Tensor> {
        self.values.last()
    }

    pub fn is_recorded(&self) -> bool {
        !self.values.is_empty()
    }

    pub fn value(&self, node: NodeId) -> Option<&Tensor> {
        self.values.get(node)
    }
}

/// One gradient tensor per model parameter, same order and shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients(pub Vec<Tensor>);

impl Gradients {
    pub fn scale(&mut self, s: f64) {
        for g in &mut self.0 {
            g.data_mut().iter_mut().for_each(|x| *x *= s);
        }
    }

    pub fn zero(&mut self) {
        for g in &mut self.0 {
            g.fill(0.0);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(Tensor::is_finite)
    }
}

pub struct GraphBuilder<'r> {
    nodes: Vec<Node>,
    params: Vec<Param>,
    inputs: Vec<NodeId>,
    rng: &'r mut Rng,
}

impl<'r> GraphBuilder<'r> {
    /// Weights drawn from `rng` (Kaiming uniform), biases zero.
    pub fn new(rng: &'r mut Rng) -> Self {
        Self {
            nodes: Vec::new(),
            params: Vec::new(),
            inputs: Vec::new(),
            rng,
        }
    }

    fn push(&mut self, name: String, kind: NodeKind, inputs: Vec<NodeId>, shape: Vec<usize>) -> NodeId {
        self.nodes.push(Node {
            name,
            kind,
            inputs,
            shape,
        });
        self.nodes.len() - 1
    }

    fn shape_of(&self, id: NodeId) -> Result<&[usize], NnError> {
        self.nodes
            .get(id)
            .map(|n| n.shape.as_slice())
            .ok_or_else(|| NnError::Graph(format!("unknown node {id}")))
    }

    pub fn input(&mut self, name: &str, shape: &[usize]) -> Result<NodeId, NnError> {
        if shape.is_empty() || shape.contains(&0) {
            return Err(NnError::Shape(format!("input {name}: invalid shape {shape:?}")));
        }
        let id = self.push(
            name.to_string(),
            NodeKind::Input { name: name.to_string() },
            vec![],
            shape.to_vec(),
        );
        self.inputs.push(id);
        Ok(id)
    }

    fn add_param(&mut self, name: String, value: Tensor) -> usize {
        self.params.push(Param { name, value });
        self.params.len() - 1
    }

    pub fn dense(&mut self, name: &str, x: NodeId, out_features: usize) -> Result<NodeId, NnError> {
        let in_features = match self.shape_of(x)? {
            [n] => *n,
            s => return Err(NnError::Shape(format!("dense {name}: expects 1-D input, got {s:?}"))),
        };
        if out_features == 0 {
            return Err(NnError::InvalidConfig(format!("dense {name}: zero outputs")));
        }
        let w = kaiming_uniform(&[out_features, in_features], in_features, self.rng)?;
        let weight = self.add_param(format!("{name}.weight"), w);
        let bias = self.add_param(format!("{name}.bias"), Tensor::zeros(&[out_features]));
        Ok(self.push(
            name.to_string(),
            NodeKind::Layer(LayerKind::Dense {
                weight,
                bias,
                in_features,
                out_features,
            }),
            vec![x],
            vec![out_features],
        ))
    }

    pub fn conv1d(&mut self, name: &str, x: NodeId, filters: usize, kernel: usize) -> Result<NodeId, NnError> {
        let (len, in_channels) = match self.shape_of(x)? {
            [l, c] => (*l, *c),
            s => return Err(NnError::Shape(format!("conv1d {name}: expects [L, C], got {s:?}"))),
        };
        if kernel == 0 || filters == 0 {
            return Err(NnError::InvalidConfig(format!("conv1d {name}: zero kernel or filters")));
        }
        if len < kernel {
            return Err(NnError::SequenceTooShort { len, kernel });
        }
        let fan_in = kernel * in_channels;
        let w = kaiming_uniform(&[filters, kernel, in_channels], fan_in, self.rng)?;
        let weight = self.add_param(format!("{name}.weight"), w);
        let bias = self.add_param(format!("{name}.bias"), Tensor::zeros(&[filters]));
        Ok(self.push(
            name.to_string(),
            NodeKind::Layer(LayerKind::Conv1d {
                weight,
                bias,
                in_channels,
                filters,
                kernel,
            }),
            vec![x],
            vec![len - kernel + 1, filters],
        ))
    }

    fn unary(&mut self, name: &str, x: NodeId, kind: LayerKind) -> Result<NodeId, NnError> {
        let shape = self.shape_of(x)?.to_vec();
        Ok(self.push(name.to_string(), NodeKind::Layer(kind), vec![x], shape))
    }

    pub fn relu(&mut self, name: &str, x: NodeId) -> Result<NodeId, NnError> {
        self.unary(name, x, LayerKind::Relu)
    }

    pub fn tanh(&mut self, name: &str, x: NodeId) -> Result<NodeId, NnError> {
        self.unary(name, x, LayerKind::Tanh)
    }

    pub fn dropout(&mut self, name: &str, x: NodeId, p: f64) -> Result<NodeId, NnError> {
        if !(0.0..1.0).contains(&p) {
            return Err(NnError::InvalidConfig(format!("dropout p must be in [0, 1), got {p}")));
        }
        self.unary(name, x, LayerKind::Dropout { p })
    }

    pub fn flatten(&mut self, name: &str, x: NodeId) -> Result<NodeId, NnError> {
        let n: usize = self.shape_of(x)?.iter().product();
        Ok(self.push(name.to_string(), NodeKind::Layer(LayerKind::Flatten), vec![x], vec![n]))
    }

    /// Concatenate 1-D nodes in the given order.
    pub fn concat(&mut self, name: &str, xs: &[NodeId]) -> Result<NodeId, NnError> {
        if xs.is_empty() {
            return Err(NnError::Graph(format!("concat {name}: no inputs")));
        }
        let mut total = 0;
        for &x in xs {
            match self.shape_of(x)? {
                [n] => total += n,
                s => return Err(NnError::Shape(format!("concat {name}: expects 1-D inputs, got {s:?}"))),
            }
        }
        Ok(self.push(name.to_string(), NodeKind::Layer(LayerKind::Concat), xs.to_vec(), vec![total]))
    }

    pub fn build(self, output: NodeId) -> Result<Model, NnError> {
        if output >= self.nodes.len() {
            return Err(NnError::Graph(format!("unknown output node {output}")));
        }
        if output != self.nodes.len() - 1 {
            return Err(NnError::Graph("output must be the last node".into()));
        }
        Ok(Model {
            nodes: self.nodes,
            params: self.params,
            inputs: self.inputs,
            output,
        })
    }
}

impl Model {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [Param] {
        &mut self.params
    }

    pub fn param(&self, name: &str) -> Option<&Tensor> {
        self.params.iter().find(|p| p.name == name).map(|p| &p.value)
    }

    pub fn param_count(&self) -> usize {
        self.params.iter().map(|p| p.value.len()).sum()
    }

    pub fn input_shapes(&self) -> Vec<&[usize]> {
        self.inputs.iter().map(|&i| self.nodes[i].shape.as_slice()).collect()
    }

    pub fn output_shape(&self) -> &[usize] {
        &self.nodes[self.output].shape
    }

    pub fn zero_grads(&self) -> Gradients {
        Gradients(self.params.iter().map(|p| Tensor::zeros(p.value.shape())).collect())
    }

    /// Replace a parameter's values; the shape must match.
    pub fn set_param(&mut self, name: &str, value: Tensor) -> Result<(), NnError> {
        let p = self
            .params
            .iter_mut()
            .find(|p| p.name == name)
            .ok_or_else(|| NnError::Graph(format!("no parameter named {name}")))?;
        if p.value.shape() != value.shape() {
            return Err(NnError::Shape(format!(
                "parameter {name}: shape {:?} vs {:?}",
                p.value.shape(),
                value.shape()
            )));
        }
        p.value = value;
        Ok(())
    }

    /// Run the graph, recording every activation.
    pub fn forward(&self, inputs: &[&Tensor], mode: Mode, rng: &mut Rng) -> Result<Tape, NnError> {
        if inputs.len() != self.inputs.len() {
            return Err(NnError::Graph(format!(
                "model takes {} inputs, got {}",
                self.inputs.len(),
                inputs.len()
            )));
        }
        let mut values: Vec<Tensor> = Vec::with_capacity(self.nodes.len());
        let mut masks = vec![None; self.nodes.len()];
        let mut next_input = 0;
        for (id, node) in self.nodes.iter().enumerate() {
            let value = match &node.kind {
                NodeKind::Input { name } => {
                    let x = inputs[next_input];
                    next_input += 1;
                    if x.shape() != node.shape.as_slice() {
                        return Err(NnError::Shape(format!(
                            "input {name}: expected {:?}, got {:?}",
                            node.shape,
                            x.shape()
                        )));
                    }
                    x.clone()
                }
                NodeKind::Layer(kind) => {
                    let x = &values[node.inputs[0]];
                    match kind {
                        LayerKind::Dense { weight, bias, .. } => {
                            layers::dense_forward(&self.params[*weight].value, &self.params[*bias].value, x)?
                        }
                        LayerKind::Conv1d { weight, bias, .. } => {
                            layers::conv1d_forward(&self.params[*weight].value, &self.params[*bias].value, x)?
                        }
                        LayerKind::Relu => layers::relu(x),
                        LayerKind::Tanh => layers::tanh(x),
                        LayerKind::Dropout { p } => {
                            let (y, m) = layers::dropout_apply(*p, x, mode, rng)?;
                            masks[id] = m;
                            y
                        }
                        LayerKind::Flatten => x.clone().reshape(&node.shape)?,
                        LayerKind::Concat => {
                            let mut data = Vec::with_capacity(node.shape[0]);
                            for &i in &node.inputs {
                                data.extend_from_slice(values[i].data());
                            }
                            Tensor::from_vec(data)
                        }
                    }
                }
            };
            if !value.is_finite() {
                return Err(NnError::NonFinite(node.name.clone()));
            }
            values.push(value);
        }
        Ok(Tape {
            values,
            masks,
            node_count: self.nodes.len(),
        })
    }

    /// Eval-mode forward pass returning only the output.
    pub fn predict(&self, inputs: &[&Tensor]) -> Result<Tensor, NnError> {
        // Eval mode never draws from the generator.
        let mut rng = crate::seed::rng_from_seed(0);
        let mut tape = self.forward(inputs, Mode::Eval, &mut rng)?;
        Ok(tape.values.pop().expect("non-empty graph"))
    }

    /// Reverse pass over a recorded tape. Parameter gradients are added into
    /// `grads`; the gradients w.r.t. each model input are returned.
    pub fn backward(&self, tape: &Tape, grad_output: &Tensor, grads: &mut Gradients) -> Result<Vec<Tensor>, NnError> {
        if !tape.is_recorded() {
            return Err(NnError::NoForwardPass);
        }
        if tape.node_count != self.nodes.len() {
            return Err(NnError::Graph("tape was recorded on a different graph".into()));
        }
        if grad_output.shape() != self.output_shape() {
            return Err(NnError::Shape(format!(
                "output gradient {:?} vs output {:?}",
                grad_output.shape(),
                self.output_shape()
            )));
        }
        if grads.0.len() != self.params.len() {
            return Err(NnError::Graph("gradient buffer does not match parameters".into()));
        }
        let mut node_grads: Vec<Option<Vec<f64>>> = vec![None; self.nodes.len()];
        node_grads[self.output] = Some(grad_output.data().to_vec());

        for id in (0..self.nodes.len()).rev() {
            let node = &self.nodes[id];
            let kind = match &node.kind {
                NodeKind::Input { .. } => continue,
                NodeKind::Layer(k) => k,
            };
            let Some(g) = node_grads[id].take() else { continue };
            let x = &tape.values[node.inputs[0]];
            let y = &tape.values[id];
            let gin = match kind {
                LayerKind::Dense { weight, bias, .. } => {
                    let (gw, gb) = two_mut(&mut grads.0, *weight, *bias);
                    layers::dense_backward(&self.params[*weight].value, x.data(), &g, gw.data_mut(), gb.data_mut())
                }
                LayerKind::Conv1d { weight, bias, .. } => {
                    let (gw, gb) = two_mut(&mut grads.0, *weight, *bias);
                    layers::conv1d_backward(&self.params[*weight].value, x, &g, gw.data_mut(), gb.data_mut())
                }
                LayerKind::Relu => layers::relu_backward(y.data(), &g),
                LayerKind::Tanh => layers::tanh_backward(y.data(), &g),
                LayerKind::Dropout { .. } => match &tape.masks[id] {
                    Some(m) => g.iter().zip(m).map(|(a, b)| a * b).collect(),
                    None => g,
                },
                LayerKind::Flatten => g,
                LayerKind::Concat => {
                    let mut offset = 0;
                    for &i in &node.inputs {
                        let n = tape.values[i].len();
                        accumulate(&mut node_grads[i], &g[offset..offset + n]);
                        offset += n;
                    }
                    continue;
                }
            };
            accumulate(&mut node_grads[node.inputs[0]], &gin);
        }

        Ok(self
            .inputs
            .iter()
            .map(|&i| {
                let shape = &self.nodes[i].shape;
                let data = node_grads[i].take().unwrap_or_else(|| vec![0.0; shape.iter().product()]);
                Tensor::new(shape.clone(), data).expect("gradient matches input shape")
            })
            .collect())
    }
}

fn accumulate(slot: &mut Option<Vec<f64>>, g: &[f64]) {
    match slot {
        Some(acc) => acc.iter_mut().zip(g).for_each(|(a, b)| *a += b),
        None => *slot = Some(g.to_vec()),
    }
}

fn two_mut(v: &mut [Tensor], a: usize, b: usize) -> (&mut Tensor, &mut Tensor) {
    assert!(a != b);
    if a < b {
        let (lo, hi) = v.split_at_mut(b);
        (&mut lo[a], &mut hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(a);
        (&mut hi[0], &mut lo[b])
    }
}
