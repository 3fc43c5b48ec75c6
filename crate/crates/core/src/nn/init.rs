use rand::distr::{Distribution, Uniform};

use super::tensor::Tensor;
use super::NnError;
use crate::seed::Rng;

/// Kaiming (He) uniform for rectifier layers: i.i.d. `U[−√(6/fan_in), √(6/fan_in)]`,
/// drawn in row-major order.
pub fn kaiming_uniform(shape: &[usize], fan_in: usize, rng: &mut Rng) -> Result<Tensor, NnError> {
    if fan_in == 0 {
        return Err(NnError::InvalidConfig("kaiming init needs fan_in > 0".into()));
    }
    let bound = kaiming_bound(fan_in);
    let dist = Uniform::new_inclusive(-bound, bound).expect("finite bound");
    let n: usize = shape.iter().product();
    let data = (0..n).map(|_| dist.sample(rng)).collect();
    Tensor::new(shape.to_vec(), data)
}

pub fn kaiming_bound(fan_in: usize) -> f64 {
    (6.0 / fan_in as f64).sqrt()
}
