//! Arm plant models the controller closes its loop around.
//!
//! Two plants are provided: a torque-driven planar two-link arm with full
//! rigid-body coupling, and an N-joint kinematic chain that applies angle
//! commands directly. Both advance on the same fixed tick as the controller.

mod chain;
mod geometry;
mod two_link;

pub use chain::{kinematic_step, JointLimits};
pub use geometry::{forward_kinematics, ik_two_link, Elbow};
pub use two_link::{calibrate_torque_increment, two_link_step, TorqueCalibration, TwoLinkParams};

use thiserror::Error;

/// Joint-space state shared by both plants.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmState {
    pub q: Vec<f64>,
    pub qdot: Vec<f64>,
}

impl ArmState {
    /// All joints at the given angles with zero velocity.
    pub fn at_rest(q: Vec<f64>) -> Self {
        let qdot = vec![0.0; q.len()];
        Self { q, qdot }
    }

    pub fn joints(&self) -> usize {
        self.q.len()
    }

    pub fn is_finite(&self) -> bool {
        self.q.iter().chain(self.qdot.iter()).all(|v| v.is_finite())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PlantError {
    #[error("expected {expected} joints, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state became non-finite during integration")]
    NonFinite,
    #[error("target ({x:.4}, {y:.4}) is outside the reachable annulus")]
    Unreachable { x: f64, y: f64 },
    #[error("torque calibration failed: {0}")]
    CalibrationFailed(String),
    #[error("invalid plant parameter: {0}")]
    InvalidParam(&'static str),
}
