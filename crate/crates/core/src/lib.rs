//! Spiking neural network joint control for planar robot arms.
//!
//! The controller couples leaky integrate-and-fire neurons with two
//! short-term plasticity mechanisms: synaptic facilitation, which ramps a
//! movement up smoothly, and presynaptic inhibition, which caps the drive
//! under sustained error. One seven-neuron block controls one joint; blocks
//! compose into arms with delayed leading/subordinate coordination.
//!
//! Besides the network, the crate ships two plant models (a torque-driven
//! planar two-link arm and an N-joint kinematic chain), a PID baseline,
//! accuracy/smoothness metrics, and a TOML-configured experiment runner
//! that writes deterministic CSV traces.
//!
//! ```
//! use spikearm::joint::{JointBlockState, JointConfig};
//!
//! let cfg = JointConfig::reference(1.0);
//! let mut block = JointBlockState::new(&cfg);
//! let mut theta = 0.0;
//! for _ in 0..4000 {
//!     let cmd = block.step(&cfg, theta, 0.5, 0.0);
//!     theta += cmd.delta; // ideal kinematic joint
//! }
//! assert!((theta - 0.5).abs() < 0.03);
//! ```

pub mod arm;
pub mod experiment;
pub mod joint;
pub mod metrics;
pub mod neuron;
pub mod pid;
pub mod plant;
pub mod plasticity;
pub mod trace;

pub use arm::{ArmController, CoordinationEdge, CoordinationGraph, EdgeKind, SpikeSource};
pub use experiment::{run_experiment, ConfigFile, RunError};
pub use joint::{JointBlockState, JointCommand, JointConfig};
pub use metrics::{
    bell_shape_score, jerk_profile, motion_profile, speed_series, step_metrics, SignalSource,
    StepMetrics,
};
pub use neuron::{LifParams, LifState};
pub use pid::{PidGains, PidState};
pub use plant::{
    calibrate_torque_increment, forward_kinematics, ik_two_link, kinematic_step, two_link_step,
    ArmState, Elbow, JointLimits, TwoLinkParams,
};
pub use plasticity::{FacilitationParams, PlasticSynapse, PsiGainState, PsiParams};
pub use trace::TrialTrace;
