//! Control-effort cost: trapezoidal quadrature of the weighted squared
//! control samples, J = dt/2 (u_0^2 + 2 u_1^2 + ... + 2 u_{N-1}^2 + u_N^2)
//! summed over channels with nonnegative weights.

use crate::error::{Error, Result};
use crate::sim::ControlProgram;

/// Effort cost of a sampled program. Channels with zero weight contribute
/// nothing; by default only the thrust channel is weighted.
pub fn effort_cost(program: &ControlProgram, weights: &[f64]) -> Result<f64> {
    if weights.len() != program.channels {
        return Err(Error::parameter(format!(
            "{} weights for {} control channels",
            weights.len(),
            program.channels
        )));
    }
    let n = program.sample_count();
    if n < 2 {
        return Err(Error::parameter(
            "effort cost needs at least two control samples",
        ));
    }
    let mut total = 0.0;
    for k in 0..n {
        let sample = program.sample(k);
        let trapezoid_weight = if k == 0 || k == n - 1 { 1.0 } else { 2.0 };
        for (value, weight) in sample.iter().zip(weights) {
            total += trapezoid_weight * weight * value * value;
        }
    }
    Ok(program.dt / 2.0 * total)
}
