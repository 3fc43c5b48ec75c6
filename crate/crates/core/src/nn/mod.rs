//! Minimal f64 neural-network engine.

pub mod gradcheck;
pub mod graph;
pub mod init;
pub mod layers;
pub mod optim;
pub mod tensor;

pub use gradcheck::{grad_check, grad_check_sampled, GradCheckReport};
pub use graph::{Gradients, GraphBuilder, LayerKind, Model, NodeId, Param, Tape};
pub use layers::Mode;
pub use optim::RmsProp;
pub use tensor::Tensor;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum NnError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("sequence of length {len} is shorter than kernel {kernel}")]
    SequenceTooShort { len: usize, kernel: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("graph error: {0}")]
    Graph(String),
    #[error("backward called without a recorded forward pass")]
    NoForwardPass,
    #[error("non-finite activation at node {0}")]
    NonFinite(String),
}
