//! Single-joint spiking controller block.
//!
//! Seven LIF neurons per joint: two error encoders (ePPC-, ePPC+), two
//! velocity encoders (dPPC-, dPPC+), an extensor and flexor motor pair, and
//! a presynaptic-inhibition interneuron. Error currents drive the motor
//! neurons through facilitating, PSI-gated synapses; velocity currents
//! excite the antagonist motor neuron to damp fast motion.

use std::collections::VecDeque;

use crate::neuron::{InvalidParam, LifParams, LifState};
use crate::plasticity::{FacilitationParams, PlasticSynapse, PsiGainState, PsiParams};

/// Full parameter set for one joint block.
#[derive(Debug, Clone, PartialEq)]
pub struct JointConfig {
    /// Controller tick length in milliseconds.
    pub dt_ms: f64,
    /// Error-to-current gain for the ePPC pair (current per radian).
    pub error_gain: f64,
    /// Velocity-to-current gain for the dPPC pair (current per rad/s).
    pub derivative_gain: f64,
    /// Backward-difference window for velocity estimation, in ticks.
    pub derivative_window: usize,
    /// Angle moved per unopposed motor spike, radians.
    pub angle_increment: f64,
    pub eppc: LifParams,
    pub dppc: LifParams,
    /// Shared by the extensor and flexor (the pair is symmetric).
    pub motor: LifParams,
    pub psi: LifParams,
    /// ePPC- -> extensor and ePPC+ -> flexor weight (plastic path).
    pub eppc_to_motor_weight: f64,
    /// dPPC- -> extensor and dPPC+ -> flexor weight (static damping path).
    pub dppc_to_motor_weight: f64,
    /// ePPC pair -> PSI interneuron weight.
    pub eppc_to_psi_weight: f64,
    pub initial_facilitation: f64,
    pub facilitation: FacilitationParams,
    pub psi_gain: PsiParams,
    pub use_facilitation: bool,
    pub use_psi_gain: bool,
}

impl JointConfig {
    /// The tuned single-joint parameter set shipped with the crate.
    ///
    /// Sized for 1 kHz ticks and roughly 1 rad/s peak joint speed. Because
    /// a motor spike resets the voltage to zero, sustained firing rates are
    /// quantized to 1/k per tick; the weights put the fully-enabled
    /// controller at a 12-tick motor period so that disabling PSI (9 ticks)
    /// or facilitation (7 ticks) or both (6 ticks) lands on separated
    /// rates. The facilitation clamp sits below 1, so the clamp (not the
    /// spike-driven fixed point) is the ceiling an un-ablated run operates
    /// against, and the motor leak opens a dead zone wider than one angle
    /// increment, which is what lets a step finish without crossing the
    /// target.
    pub fn reference(dt_ms: f64) -> Self {
        Self {
            dt_ms,
            error_gain: 3.0,
            derivative_gain: 0.05,
            derivative_window: 50,
            angle_increment: 0.012,
            eppc: LifParams::new(0.0, 1.0, 1.0),
            dppc: LifParams::new(0.0, 0.95, 1.0),
            motor: LifParams::new(0.5, 0.9985, 1.0),
            psi: LifParams::new(0.0, 0.8, 1.0),
            eppc_to_motor_weight: 0.095,
            dppc_to_motor_weight: 0.1,
            eppc_to_psi_weight: 1.2,
            initial_facilitation: 0.15,
            facilitation: FacilitationParams {
                decay_tau_ms: 500.0,
                increment: 0.005,
                max_factor: 0.6,
            },
            psi_gain: PsiParams::default(),
            use_facilitation: true,
            use_psi_gain: true,
        }
    }

    /// Disable facilitation and/or PSI gating; the corresponding factor in
    /// the effective weight reads as 1.
    pub fn ablate(mut self, facilitation: bool, psi: bool) -> Self {
        if facilitation {
            self.use_facilitation = false;
        }
        if psi {
            self.use_psi_gain = false;
        }
        self
    }

    pub fn validate(&self) -> Result<(), InvalidParam> {
        if !(self.dt_ms > 0.0) {
            return Err(InvalidParam("dt_ms must be > 0"));
        }
        if !self.error_gain.is_finite() || !self.derivative_gain.is_finite() {
            return Err(InvalidParam("encoder gains must be finite"));
        }
        if self.derivative_window == 0 {
            return Err(InvalidParam("derivative_window must be >= 1"));
        }
        if !(self.angle_increment > 0.0) {
            return Err(InvalidParam("angle_increment must be > 0"));
        }
        if !self.eppc_to_motor_weight.is_finite()
            || !self.dppc_to_motor_weight.is_finite()
            || !self.eppc_to_psi_weight.is_finite()
        {
            return Err(InvalidParam("synapse weights must be finite"));
        }
        if !(0.0..=self.facilitation.max_factor).contains(&self.initial_facilitation) {
            return Err(InvalidParam(
                "initial_facilitation must be in [0, max_factor]",
            ));
        }
        self.eppc.validate()?;
        self.dppc.validate()?;
        self.motor.validate()?;
        self.psi.validate()?;
        self.facilitation.validate()?;
        self.psi_gain.validate()?;
        Ok(())
    }
}

/// Error encoding through four rectified comparison populations.
///
/// Target and actual angles are each split into positive and negative
/// half-wave channels; the signed combination recovers
/// `error_gain * (theta_target - theta)` as the ePPC- drive and its negation
/// as the ePPC+ drive, so exactly one encoder sees positive current for any
/// nonzero error.
pub fn encode_error_currents(theta: f64, theta_target: f64, error_gain: f64) -> (f64, f64) {
    let relu = |x: f64| x.max(0.0);
    let target_pos = relu(theta_target);
    let target_neg = relu(-theta_target);
    let actual_pos = relu(theta);
    let actual_neg = relu(-theta);
    let i_minus = error_gain * (target_pos - target_neg - actual_pos + actual_neg);
    let i_plus = error_gain * (actual_pos - actual_neg - target_pos + target_neg);
    (i_minus, i_plus)
}

/// Velocity encoding over a backward difference of `window` ticks.
///
/// Returns `(i_dppc_neg, i_dppc_pos)`; both are zero until the history
/// holds `window + 1` samples.
pub fn encode_derivative_currents(
    history: &VecDeque<f64>,
    window: usize,
    dt_ms: f64,
    derivative_gain: f64,
) -> (f64, f64) {
    if history.len() < window + 1 {
        return (0.0, 0.0);
    }
    let newest = *history.back().expect("non-empty history");
    let oldest = history[history.len() - 1 - window];
    let velocity = (newest - oldest) / (window as f64 * dt_ms / 1000.0);
    (-derivative_gain * velocity, derivative_gain * velocity)
}

/// Mutable per-joint state: the seven neurons, the two plastic synapses,
/// the PSI gain, and the angle history for velocity estimation.
#[derive(Debug, Clone)]
pub struct JointBlockState {
    pub eppc_minus: LifState,
    pub eppc_plus: LifState,
    pub dppc_neg: LifState,
    pub dppc_pos: LifState,
    pub psi: LifState,
    pub extensor: LifState,
    pub flexor: LifState,
    pub extensor_synapse: PlasticSynapse,
    pub flexor_synapse: PlasticSynapse,
    pub psi_gain: PsiGainState,
    angle_history: VecDeque<f64>,
}

/// One controller tick's output for a joint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointCommand {
    /// Signed angle command for this tick: `(E - F) * angle_increment`.
    pub delta: f64,
    pub extensor_spike: bool,
    pub flexor_spike: bool,
    pub diagnostics: JointDiagnostics,
}

impl JointCommand {
    /// A no-spike placeholder, used for the t=0 trace sample.
    pub fn quiescent(psi_gain: f64, facilitation: f64) -> Self {
        Self {
            delta: 0.0,
            extensor_spike: false,
            flexor_spike: false,
            diagnostics: JointDiagnostics {
                eppc_minus_spike: false,
                eppc_plus_spike: false,
                dppc_neg_spike: false,
                dppc_pos_spike: false,
                psi_spike: false,
                psi_gain,
                facilitation_extensor: facilitation,
                facilitation_flexor: facilitation,
            },
        }
    }
}

/// Spikes and analog traces of the non-motor neurons, for logging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDiagnostics {
    pub eppc_minus_spike: bool,
    pub eppc_plus_spike: bool,
    pub dppc_neg_spike: bool,
    pub dppc_pos_spike: bool,
    pub psi_spike: bool,
    pub psi_gain: f64,
    pub facilitation_extensor: f64,
    pub facilitation_flexor: f64,
}

fn spike(s: bool) -> f64 {
    if s {
        1.0
    } else {
        0.0
    }
}

impl JointBlockState {
    pub fn new(cfg: &JointConfig) -> Self {
        let mut extensor_synapse =
            PlasticSynapse::new(cfg.eppc_to_motor_weight, cfg.initial_facilitation);
        extensor_synapse.uses_facilitation = cfg.use_facilitation;
        extensor_synapse.uses_psi_gain = cfg.use_psi_gain;
        let flexor_synapse = extensor_synapse;
        Self {
            eppc_minus: LifState::default(),
            eppc_plus: LifState::default(),
            dppc_neg: LifState::default(),
            dppc_pos: LifState::default(),
            psi: LifState::default(),
            extensor: LifState::default(),
            flexor: LifState::default(),
            extensor_synapse,
            flexor_synapse,
            psi_gain: PsiGainState::new(&cfg.psi_gain),
            angle_history: VecDeque::with_capacity(cfg.derivative_window + 2),
        }
    }

    /// Advance the block one tick.
    ///
    /// Order within the tick: encode, step the encoder neurons, step the
    /// PSI interneuron on the same tick's ePPC spikes, update the plastic
    /// state, then step the motor pair against the updated weights.
    /// `coordination_input` is the summed drive from leading joints
    /// (previous-tick spikes), applied to both motor neurons.
    pub fn step(
        &mut self,
        cfg: &JointConfig,
        theta: f64,
        theta_target: f64,
        coordination_input: f64,
    ) -> JointCommand {
        self.angle_history.push_back(theta);
        while self.angle_history.len() > cfg.derivative_window + 1 {
            self.angle_history.pop_front();
        }

        let (i_eppc_minus, i_eppc_plus) = encode_error_currents(theta, theta_target, cfg.error_gain);
        let (i_dppc_neg, i_dppc_pos) = encode_derivative_currents(
            &self.angle_history,
            cfg.derivative_window,
            cfg.dt_ms,
            cfg.derivative_gain,
        );

        let s_eppc_minus = self.eppc_minus.step(&cfg.eppc, 0.0, i_eppc_minus);
        let s_eppc_plus = self.eppc_plus.step(&cfg.eppc, 0.0, i_eppc_plus);
        let s_dppc_neg = self.dppc_neg.step(&cfg.dppc, 0.0, i_dppc_neg);
        let s_dppc_pos = self.dppc_pos.step(&cfg.dppc, 0.0, i_dppc_pos);

        let psi_drive = cfg.eppc_to_psi_weight * (spike(s_eppc_minus) + spike(s_eppc_plus));
        let s_psi = self.psi.step(&cfg.psi, psi_drive, 0.0);

        self.extensor_synapse
            .facilitate(&cfg.facilitation, s_eppc_minus, cfg.dt_ms);
        self.flexor_synapse
            .facilitate(&cfg.facilitation, s_eppc_plus, cfg.dt_ms);
        self.psi_gain.step(&cfg.psi_gain, s_psi, cfg.dt_ms);

        let drive_extensor = self.extensor_synapse.effective_weight(&self.psi_gain)
            * spike(s_eppc_minus)
            + cfg.dppc_to_motor_weight * spike(s_dppc_neg)
            + coordination_input;
        let drive_flexor = self.flexor_synapse.effective_weight(&self.psi_gain)
            * spike(s_eppc_plus)
            + cfg.dppc_to_motor_weight * spike(s_dppc_pos)
            + coordination_input;

        let s_extensor = self.extensor.step(&cfg.motor, drive_extensor, 0.0);
        let s_flexor = self.flexor.step(&cfg.motor, drive_flexor, 0.0);

        JointCommand {
            delta: (spike(s_extensor) - spike(s_flexor)) * cfg.angle_increment,
            extensor_spike: s_extensor,
            flexor_spike: s_flexor,
            diagnostics: JointDiagnostics {
                eppc_minus_spike: s_eppc_minus,
                eppc_plus_spike: s_eppc_plus,
                dppc_neg_spike: s_dppc_neg,
                dppc_pos_spike: s_dppc_pos,
                psi_spike: s_psi,
                psi_gain: self.psi_gain.gain,
                facilitation_extensor: self.extensor_synapse.facilitation,
                facilitation_flexor: self.flexor_synapse.facilitation,
            },
        }
    }
}
