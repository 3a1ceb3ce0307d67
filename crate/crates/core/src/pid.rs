//! Joint-space PID baseline in velocity-feedback form.
//!
//! The derivative term acts on the measured joint velocity rather than the
//! differentiated error, so target steps do not kick the command.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidGains {
    pub kp: f64,
    /// Velocity feedback gain (damping).
    pub kv: f64,
    pub ki: f64,
    /// Symmetric clamp on the integral accumulator (anti-windup).
    pub windup_limit: f64,
}

impl Default for PidGains {
    fn default() -> Self {
        Self {
            kp: 20.0,
            kv: 30.0,
            ki: 0.001,
            windup_limit: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PidState {
    pub integral: f64,
    pub previous_error: f64,
}

impl PidState {
    /// One control step: returns `kp*e - kv*theta_dot + ki*integral` with
    /// the integral accumulated as `e*dt` under the windup clamp.
    pub fn step(
        &mut self,
        gains: &PidGains,
        theta: f64,
        theta_target: f64,
        theta_dot: f64,
        dt_s: f64,
    ) -> f64 {
        let error = theta_target - theta;
        self.integral = (self.integral + error * dt_s)
            .clamp(-gains.windup_limit, gains.windup_limit);
        self.previous_error = error;
        gains.kp * error - gains.kv * theta_dot + gains.ki * self.integral
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proportional_term_dominates_at_rest() {
        let gains = PidGains {
            kp: 10.0,
            kv: 5.0,
            ki: 0.0,
            windup_limit: 1.0,
        };
        let mut pid = PidState::default();
        let u = pid.step(&gains, 0.2, 1.2, 0.0, 0.001);
        assert!((u - 10.0).abs() < 1e-12);
        assert!((pid.previous_error - 1.0).abs() < 1e-12);
    }

    #[test]
    fn velocity_feedback_opposes_motion() {
        let gains = PidGains::default();
        let mut pid = PidState::default();
        let still = pid.step(&gains, 0.0, 1.0, 0.0, 0.001);
        let mut pid = PidState::default();
        let moving = pid.step(&gains, 0.0, 1.0, 2.0, 0.001);
        assert!(moving < still);
        assert!((still - moving - gains.kv * 2.0).abs() < 1e-12);
    }

    #[test]
    fn integral_accumulates_and_clamps() {
        let gains = PidGains {
            kp: 0.0,
            kv: 0.0,
            ki: 1.0,
            windup_limit: 0.01,
        };
        let mut pid = PidState::default();
        // 1 rad of error at 1 ms steps: integral grows 0.001/step and must
        // stop at the clamp.
        for _ in 0..5 {
            pid.step(&gains, 0.0, 1.0, 0.0, 0.001);
        }
        assert!((pid.integral - 0.005).abs() < 1e-12);
        for _ in 0..100 {
            pid.step(&gains, 0.0, 1.0, 0.0, 0.001);
        }
        assert_eq!(pid.integral, 0.01);
        // Negative error unwinds it symmetrically.
        for _ in 0..300 {
            pid.step(&gains, 1.0, 0.0, 0.0, 0.001);
        }
        assert_eq!(pid.integral, -0.01);
    }

    #[test]
    fn zero_error_zero_velocity_is_quiescent() {
        let gains = PidGains::default();
        let mut pid = PidState::default();
        for _ in 0..10 {
            assert_eq!(pid.step(&gains, 0.7, 0.7, 0.0, 0.001), 0.0);
        }
    }
}
