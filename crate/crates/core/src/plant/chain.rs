//! N-joint kinematic chain: angle commands apply directly, limits clamp.

use serde::{Deserialize, Serialize};

use super::{ArmState, PlantError};

/// Allowed angle range for one joint, radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointLimits {
    pub lower: f64,
    pub upper: f64,
}

impl JointLimits {
    pub fn symmetric(half_range: f64) -> Self {
        Self {
            lower: -half_range,
            upper: half_range,
        }
    }

    pub fn validate(&self) -> Result<(), PlantError> {
        if !(self.lower < self.upper) {
            return Err(PlantError::InvalidParam("joint limits must satisfy lower < upper"));
        }
        Ok(())
    }

    pub fn clamp(&self, angle: f64) -> f64 {
        angle.clamp(self.lower, self.upper)
    }
}

/// Apply per-joint angle increments, clamp to limits, and report the
/// realized velocity `(q' - q) / dt` so downstream consumers (velocity
/// encoders, metrics) see the motion that actually happened.
pub fn kinematic_step(
    state: &ArmState,
    deltas: &[f64],
    limits: &[JointLimits],
    dt_s: f64,
) -> Result<ArmState, PlantError> {
    let n = state.joints();
    if deltas.len() != n {
        return Err(PlantError::DimensionMismatch {
            expected: n,
            got: deltas.len(),
        });
    }
    if limits.len() != n {
        return Err(PlantError::DimensionMismatch {
            expected: n,
            got: limits.len(),
        });
    }
    let mut q = Vec::with_capacity(n);
    let mut qdot = Vec::with_capacity(n);
    for j in 0..n {
        let next = limits[j].clamp(state.q[j] + deltas[j]);
        qdot.push((next - state.q[j]) / dt_s);
        q.push(next);
    }
    Ok(ArmState { q, qdot })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn increments_apply_and_velocity_reflects_motion() {
        let limits = vec![JointLimits::symmetric(std::f64::consts::PI); 2];
        let state = ArmState::at_rest(vec![0.1, -0.2]);
        let next = kinematic_step(&state, &[0.0015, -0.003], &limits, 0.001).unwrap();
        assert!((next.q[0] - 0.1015).abs() < 1e-12);
        assert!((next.q[1] + 0.203).abs() < 1e-12);
        assert!((next.qdot[0] - 1.5).abs() < 1e-9);
        assert!((next.qdot[1] + 3.0).abs() < 1e-9);
    }

    #[test]
    fn limits_clamp_and_zero_realized_velocity_at_the_stop() {
        let limits = vec![JointLimits { lower: -0.5, upper: 0.5 }];
        let state = ArmState::at_rest(vec![0.5]);
        let next = kinematic_step(&state, &[0.01], &limits, 0.001).unwrap();
        assert_eq!(next.q[0], 0.5);
        assert_eq!(next.qdot[0], 0.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let limits = vec![JointLimits::symmetric(1.0); 2];
        let state = ArmState::at_rest(vec![0.0, 0.0]);
        assert!(kinematic_step(&state, &[0.0], &limits, 0.001).is_err());
        assert!(kinematic_step(&state, &[0.0, 0.0], &limits[..1], 0.001).is_err());
    }
}
