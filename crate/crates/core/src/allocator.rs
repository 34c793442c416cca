//! Redundancy allocation from the analytical MLP.
//!
//! Pick the smallest redundancy whose MLP meets the target (or the best
//! achievable one), then widen it to the largest redundancy with the same
//! airtime, since LoRa frames grow in whole symbol blocks.

use serde::{Deserialize, Serialize};

use crate::analytic::{AnalyticError, AnalyticInputs, MlpModel};
use crate::error::ConfigError;
use crate::phy::frame_quarter_symbols;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllocationResult {
    pub r_star: u32,
    pub r_tilde: u32,
    pub mlp_at_r_star: f64,
    pub mlp_at_r_tilde: f64,
    pub met_target: bool,
}

/// Allocation over the MLP curve `mlp_by_r[r]` for `r = 0..=r_max`.
///
/// `airtime_key(r)` must be equal for two redundancies exactly when their
/// frames have the same duration.
pub fn allocate_from_curve(mlp_by_r: &[f64], p_target: f64, airtime_key: impl Fn(u32) -> u64) -> AllocationResult {
    assert!(!mlp_by_r.is_empty(), "MLP curve needs at least r = 0");
    let r_max = (mlp_by_r.len() - 1) as u32;
    let feasible = mlp_by_r.iter().position(|&p| p <= p_target);
    let r_star = match feasible {
        Some(r) => r as u32,
        // Ties resolve to the smallest r.
        None => mlp_by_r
            .iter()
            .enumerate()
            .fold(0, |best, (r, &p)| if p < mlp_by_r[best] { r } else { best }) as u32,
    };
    let key = airtime_key(r_star);
    let r_tilde = (r_star..=r_max)
        .rev()
        .find(|&r| airtime_key(r) == key)
        .unwrap_or(r_star);
    AllocationResult {
        r_star,
        r_tilde,
        mlp_at_r_star: mlp_by_r[r_star as usize],
        mlp_at_r_tilde: mlp_by_r[r_tilde as usize],
        met_target: feasible.is_some(),
    }
}

/// Runs the allocation for the deployment in `inputs`, evaluating the MLP
/// at every `r` in `0..=r_max`.
pub fn allocate(inputs: &AnalyticInputs, p_target: f64, r_max: u32) -> Result<AllocationResult, AnalyticError> {
    allocate_with_model(
        &MlpModel::new(inputs)?,
        inputs.n_sensors,
        inputs.n_relays,
        p_target,
        r_max,
    )
}

/// Same as [`allocate`] but reuses precomputed integrals.
pub fn allocate_with_model(
    model: &MlpModel,
    n_sensors: u32,
    n_relays: u32,
    p_target: f64,
    r_max: u32,
) -> Result<AllocationResult, AnalyticError> {
    if !(p_target > 0.0 && p_target <= 1.0) {
        return Err(ConfigError::invalid("p_target", "must lie in (0, 1]").into());
    }
    let curve = (0..=r_max)
        .map(|r| model.breakdown_at(n_sensors, n_relays, r).map(|b| b.mlp))
        .collect::<Result<Vec<_>, _>>()?;
    let inputs = model.inputs();
    Ok(allocate_from_curve(&curve, p_target, |r| {
        frame_quarter_symbols(inputs.traffic.sensor_payload_bytes(r), &inputs.sensor_radio)
    }))
}
