//! Leaky integrate-and-fire neuron primitives.
//!
//! Discrete-time LIF dynamics: spike input and injected currents accumulate
//! into a decaying synaptic current, the current accumulates into a decaying
//! membrane voltage, and the neuron fires (resetting the voltage to zero)
//! when the voltage reaches threshold.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Parameter validation failure for neuron and synapse parameter sets.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid parameter: {0}")]
pub struct InvalidParam(pub &'static str);

/// Per-neuron LIF parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LifParams {
    /// Synaptic current decay factor per step, in [0, 1].
    pub current_decay: f64,
    /// Membrane voltage decay factor per step, in [0, 1].
    pub voltage_decay: f64,
    /// Firing threshold, > 0.
    pub threshold: f64,
    /// Constant drive added to the synaptic current every step.
    pub bias: f64,
    /// Lower clamp on the membrane voltage. Hyperpolarizing (negative)
    /// input shunts the neuron but cannot drive the voltage below this.
    pub voltage_floor: f64,
}

impl LifParams {
    pub fn new(current_decay: f64, voltage_decay: f64, threshold: f64) -> Self {
        Self {
            current_decay,
            voltage_decay,
            threshold,
            bias: 0.0,
            voltage_floor: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), InvalidParam> {
        if !(0.0..=1.0).contains(&self.current_decay) {
            return Err(InvalidParam("current_decay must be in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.voltage_decay) {
            return Err(InvalidParam("voltage_decay must be in [0, 1]"));
        }
        if !(self.threshold > 0.0) {
            return Err(InvalidParam("threshold must be > 0"));
        }
        if !self.bias.is_finite() || !self.voltage_floor.is_finite() {
            return Err(InvalidParam("bias and voltage_floor must be finite"));
        }
        Ok(())
    }
}

/// Instantaneous LIF state: synaptic current, membrane voltage, and whether
/// the neuron fired on the most recent step.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LifState {
    pub current: f64,
    pub voltage: f64,
    pub spiked: bool,
}

impl LifState {
    /// Advance one step.
    ///
    /// `weighted_spike_input` is the summed presynaptic drive
    /// (weight x spike) for the step; `injected_current` is the encoder
    /// drive. Both add to the decayed synaptic current, which then adds to
    /// the decayed voltage. Crossing threshold resets the voltage to zero
    /// and reports a spike; otherwise the voltage is clamped at the floor.
    pub fn step(
        &mut self,
        params: &LifParams,
        weighted_spike_input: f64,
        injected_current: f64,
    ) -> bool {
        self.current = self.current * params.current_decay
            + weighted_spike_input
            + injected_current
            + params.bias;
        let v = self.voltage * params.voltage_decay + self.current;
        if v >= params.threshold {
            self.voltage = 0.0;
            self.spiked = true;
        } else {
            self.voltage = v.max(params.voltage_floor);
            self.spiked = false;
        }
        self.spiked
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_input_is_a_fixed_point() {
        let params = LifParams::new(0.5, 0.8, 2.0);
        let mut state = LifState::default();
        for _ in 0..10 {
            let spike = state.step(&params, 0.0, 0.0);
            assert!(!spike);
            assert_eq!(state.current, 0.0);
            assert_eq!(state.voltage, 0.0);
        }
    }

    #[test]
    fn two_step_hand_evaluation() {
        // d_u=0.5, d_v=0.8, V_th=2, unit spike drive on both steps:
        // step 1: u=1, v=1, below threshold
        // step 2: u=1.5, v=0.8+1.5=2.3 >= 2 -> spike, reset
        let params = LifParams::new(0.5, 0.8, 2.0);
        let mut state = LifState::default();

        let spike = state.step(&params, 1.0, 0.0);
        assert!(!spike);
        assert!((state.current - 1.0).abs() < 1e-15);
        assert!((state.voltage - 1.0).abs() < 1e-15);

        let spike = state.step(&params, 1.0, 0.0);
        assert!(spike);
        assert!((state.current - 1.5).abs() < 1e-15);
        assert_eq!(state.voltage, 0.0);
    }

    #[test]
    fn non_leaky_first_spike_matches_closed_form() {
        // With d_u = d_v = 1 and constant injected current I, the voltage is
        // the cumulative sum of t*I, i.e. I*t*(t+1)/2. First spike at the
        // smallest t with that sum >= threshold.
        let current = 0.1;
        let threshold = 2.0;
        let params = LifParams::new(1.0, 1.0, threshold);
        let mut state = LifState::default();

        let mut expected_first = 0u32;
        for t in 1..100 {
            if current * (t * (t + 1)) as f64 / 2.0 >= threshold {
                expected_first = t;
                break;
            }
        }
        assert!(expected_first > 0);

        for t in 1..=expected_first {
            let spike = state.step(&params, 0.0, current);
            assert_eq!(spike, t == expected_first, "step {t}");
        }
    }

    #[test]
    fn voltage_resets_to_zero_on_every_spike() {
        let params = LifParams::new(0.7, 0.95, 1.0);
        let mut state = LifState::default();
        let mut spikes = 0;
        for i in 0..1000 {
            let drive = if i % 3 == 0 { 0.4 } else { 0.1 };
            if state.step(&params, drive, 0.0) {
                assert_eq!(state.voltage, 0.0);
                spikes += 1;
            }
            assert!(state.voltage < params.threshold);
        }
        assert!(spikes > 0);
    }

    #[test]
    fn negative_current_shunts_down_to_floor() {
        let mut params = LifParams::new(0.0, 1.0, 10.0);
        let mut state = LifState::default();
        state.step(&params, 0.0, 3.0);
        assert!((state.voltage - 3.0).abs() < 1e-15);
        state.step(&params, 0.0, -100.0);
        assert_eq!(state.voltage, 0.0); // default floor

        params.voltage_floor = -1.5;
        let mut state = LifState::default();
        state.step(&params, 0.0, -100.0);
        assert_eq!(state.voltage, -1.5);
    }

    #[test]
    fn bias_acts_as_standing_drive() {
        let mut params = LifParams::new(0.0, 1.0, 1.0);
        params.bias = 0.25;
        let mut state = LifState::default();
        // v accumulates 0.25/step: spike on step 4 (v = 1.0 >= 1.0).
        for t in 1..=4 {
            let spike = state.step(&params, 0.0, 0.0);
            assert_eq!(spike, t == 4, "step {t}");
        }
    }

    #[test]
    fn params_validation() {
        assert!(LifParams::new(0.5, 0.5, 1.0).validate().is_ok());
        assert!(LifParams::new(-0.1, 0.5, 1.0).validate().is_err());
        assert!(LifParams::new(0.5, 1.1, 1.0).validate().is_err());
        assert!(LifParams::new(0.5, 0.5, 0.0).validate().is_err());
    }
}
