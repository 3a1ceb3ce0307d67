//! Short-term synaptic facilitation and presynaptic-inhibition gain control.
//!
//! Both mechanisms are exponential accumulators driven by spikes. The
//! facilitation factor rises with presynaptic activity and scales a synapse
//! up; the PSI accumulator rises with inhibitory-interneuron activity and
//! scales the downstream gain toward zero.

use serde::{Deserialize, Serialize};

use crate::neuron::InvalidParam;

/// Facilitation dynamics shared by all facilitating synapses of a block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FacilitationParams {
    /// Decay time constant in milliseconds.
    pub decay_tau_ms: f64,
    /// Additive bump applied on each presynaptic spike.
    pub increment: f64,
    /// Upper clamp on the facilitation factor.
    pub max_factor: f64,
}

impl Default for FacilitationParams {
    fn default() -> Self {
        Self {
            decay_tau_ms: 500.0,
            increment: 0.005,
            max_factor: 1.0,
        }
    }
}

impl FacilitationParams {
    pub fn validate(&self) -> Result<(), InvalidParam> {
        if !(self.decay_tau_ms > 0.0) {
            return Err(InvalidParam("facilitation decay_tau_ms must be > 0"));
        }
        if !(self.increment >= 0.0) {
            return Err(InvalidParam("facilitation increment must be >= 0"));
        }
        if !(self.max_factor > 0.0) {
            return Err(InvalidParam("facilitation max_factor must be > 0"));
        }
        Ok(())
    }

    /// One facilitation update: exponential decay over `dt_ms`, plus the
    /// spike bump, clamped at `max_factor`.
    pub fn step(&self, factor: f64, pre_spike: bool, dt_ms: f64) -> f64 {
        let decayed = factor * (-dt_ms / self.decay_tau_ms).exp();
        let bumped = decayed + if pre_spike { self.increment } else { 0.0 };
        bumped.min(self.max_factor)
    }
}

/// Presynaptic-inhibition gain dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiParams {
    /// Decay time constant of the inhibition accumulator, milliseconds.
    pub decay_tau_ms: f64,
    /// Additive bump applied on each PSI interneuron spike.
    pub increment: f64,
    /// Gain ceiling; the applied gain lives in [0, g_max].
    pub g_max: f64,
}

impl Default for PsiParams {
    fn default() -> Self {
        Self {
            decay_tau_ms: 50.0,
            increment: 0.005,
            g_max: 1.0,
        }
    }
}

impl PsiParams {
    pub fn validate(&self) -> Result<(), InvalidParam> {
        if !(self.decay_tau_ms > 0.0) {
            return Err(InvalidParam("psi decay_tau_ms must be > 0"));
        }
        if !(self.increment >= 0.0) {
            return Err(InvalidParam("psi increment must be >= 0"));
        }
        if !(self.g_max > 0.0) {
            return Err(InvalidParam("psi g_max must be > 0"));
        }
        Ok(())
    }
}

/// PSI accumulator plus the gain derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiGainState {
    pub accumulator: f64,
    pub gain: f64,
}

impl PsiGainState {
    pub fn new(params: &PsiParams) -> Self {
        Self {
            accumulator: 0.0,
            gain: params.g_max,
        }
    }

    /// Decay the accumulator over `dt_ms`, bump it on a PSI spike, and
    /// recompute the gain `clamp(g_max - accumulator, 0, g_max)`.
    pub fn step(&mut self, params: &PsiParams, psi_spike: bool, dt_ms: f64) {
        self.accumulator = self.accumulator * (-dt_ms / params.decay_tau_ms).exp()
            + if psi_spike { params.increment } else { 0.0 };
        self.gain = (params.g_max - self.accumulator).clamp(0.0, params.g_max);
    }
}

/// A synapse with a static weight plus optional facilitation and PSI gating.
///
/// The ablation flags make the corresponding factor read as 1 without
/// touching the underlying dynamics, so an ablated run is the same network
/// minus one multiplicative term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlasticSynapse {
    pub static_weight: f64,
    /// Current facilitation factor (state, not config).
    pub facilitation: f64,
    pub uses_facilitation: bool,
    pub uses_psi_gain: bool,
}

impl PlasticSynapse {
    pub fn new(static_weight: f64, initial_facilitation: f64) -> Self {
        Self {
            static_weight,
            facilitation: initial_facilitation,
            uses_facilitation: true,
            uses_psi_gain: true,
        }
    }

    /// Advance the facilitation trace for one step.
    pub fn facilitate(&mut self, params: &FacilitationParams, pre_spike: bool, dt_ms: f64) {
        self.facilitation = params.step(self.facilitation, pre_spike, dt_ms);
    }

    /// Effective weight for the current step: `W * f * g`, with either
    /// factor replaced by 1 when disabled.
    pub fn effective_weight(&self, gain: &PsiGainState) -> f64 {
        let f = if self.uses_facilitation {
            self.facilitation
        } else {
            1.0
        };
        let g = if self.uses_psi_gain { gain.gain } else { 1.0 };
        self.static_weight * f * g
    }
}
