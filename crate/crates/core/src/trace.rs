//! In-memory trial recording: one sample per controller tick plus the
//! initial state, with optional per-joint neuron diagnostics.

use crate::joint::JointCommand;

/// Per-joint diagnostic series aligned with the trace samples.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct JointDiagnosticsSeries {
    pub eppc_minus: Vec<bool>,
    pub eppc_plus: Vec<bool>,
    pub dppc_neg: Vec<bool>,
    pub dppc_pos: Vec<bool>,
    pub psi: Vec<bool>,
    pub extensor: Vec<bool>,
    pub flexor: Vec<bool>,
    pub psi_gain: Vec<f64>,
    pub facilitation_extensor: Vec<f64>,
    pub facilitation_flexor: Vec<f64>,
}

impl JointDiagnosticsSeries {
    fn push(&mut self, cmd: &JointCommand) {
        let d = &cmd.diagnostics;
        self.eppc_minus.push(d.eppc_minus_spike);
        self.eppc_plus.push(d.eppc_plus_spike);
        self.dppc_neg.push(d.dppc_neg_spike);
        self.dppc_pos.push(d.dppc_pos_spike);
        self.psi.push(d.psi_spike);
        self.extensor.push(cmd.extensor_spike);
        self.flexor.push(cmd.flexor_spike);
        self.psi_gain.push(d.psi_gain);
        self.facilitation_extensor.push(d.facilitation_extensor);
        self.facilitation_flexor.push(d.facilitation_flexor);
    }

    fn len(&self) -> usize {
        self.psi_gain.len()
    }
}

/// A complete trial trace sampled on the controller tick.
///
/// Sample 0 is the state before the first tick; sample k is the state after
/// tick k. Targets are recorded alongside so metrics never have to rerun
/// the schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialTrace {
    pub dt_ms: f64,
    pub time_ms: Vec<f64>,
    /// `q[joint][sample]`.
    pub q: Vec<Vec<f64>>,
    /// `targets[joint][sample]`.
    pub targets: Vec<Vec<f64>>,
    /// End-effector position per sample.
    pub ee: Vec<[f64; 2]>,
    /// Present only for spiking-controller trials.
    pub diagnostics: Option<Vec<JointDiagnosticsSeries>>,
}

impl TrialTrace {
    pub fn new(dt_ms: f64, joints: usize, record_diagnostics: bool) -> Self {
        Self {
            dt_ms,
            time_ms: Vec::new(),
            q: vec![Vec::new(); joints],
            targets: vec![Vec::new(); joints],
            ee: Vec::new(),
            diagnostics: record_diagnostics
                .then(|| vec![JointDiagnosticsSeries::default(); joints]),
        }
    }

    pub fn joints(&self) -> usize {
        self.q.len()
    }

    pub fn len(&self) -> usize {
        self.time_ms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time_ms.is_empty()
    }

    /// Append one sample. `commands` must be given iff the trace records
    /// diagnostics; the t=0 sample uses [`JointCommand::quiescent`].
    pub fn push_sample(
        &mut self,
        time_ms: f64,
        q: &[f64],
        targets: &[f64],
        ee: [f64; 2],
        commands: Option<&[JointCommand]>,
    ) {
        debug_assert_eq!(q.len(), self.joints());
        debug_assert_eq!(targets.len(), self.joints());
        self.time_ms.push(time_ms);
        for (series, &value) in self.q.iter_mut().zip(q) {
            series.push(value);
        }
        for (series, &value) in self.targets.iter_mut().zip(targets) {
            series.push(value);
        }
        self.ee.push(ee);
        if let Some(diag) = &mut self.diagnostics {
            let commands = commands.expect("diagnostic trace fed without commands");
            debug_assert_eq!(commands.len(), diag.len());
            for (series, cmd) in diag.iter_mut().zip(commands) {
                series.push(cmd);
            }
        }
    }

    /// Internal consistency: equal series lengths and uniform sampling.
    pub fn validate(&self) -> Result<(), &'static str> {
        let n = self.len();
        if n == 0 {
            return Err("trace is empty");
        }
        if self.q.iter().any(|s| s.len() != n)
            || self.targets.iter().any(|s| s.len() != n)
            || self.ee.len() != n
        {
            return Err("trace series lengths differ");
        }
        if self.targets.len() != self.joints() {
            return Err("target series count differs from joint count");
        }
        if let Some(diag) = &self.diagnostics {
            if diag.len() != self.joints() || diag.iter().any(|d| d.len() != n) {
                return Err("diagnostic series lengths differ");
            }
        }
        for pair in self.time_ms.windows(2) {
            if (pair[1] - pair[0] - self.dt_ms).abs() > 1e-9 {
                return Err("trace sampling is not uniform at dt_ms");
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joint::JointCommand;

    #[test]
    fn push_and_validate_without_diagnostics() {
        let mut trace = TrialTrace::new(1.0, 2, false);
        for k in 0..5 {
            trace.push_sample(k as f64, &[0.1 * k as f64, 0.0], &[1.0, 0.0], [0.5, 0.0], None);
        }
        assert_eq!(trace.len(), 5);
        assert!(trace.validate().is_ok());
        assert!((trace.q[0][4] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn diagnostics_track_commands() {
        let mut trace = TrialTrace::new(1.0, 1, true);
        let quiet = JointCommand::quiescent(1.0, 0.1);
        trace.push_sample(0.0, &[0.0], &[0.0], [0.0, 0.0], Some(&[quiet]));
        assert_eq!(trace.diagnostics.as_ref().unwrap()[0].psi_gain, vec![1.0]);
        assert!(trace.validate().is_ok());
    }

    #[test]
    fn validate_catches_non_uniform_sampling() {
        let mut trace = TrialTrace::new(1.0, 1, false);
        trace.push_sample(0.0, &[0.0], &[0.0], [0.0, 0.0], None);
        trace.push_sample(2.5, &[0.0], &[0.0], [0.0, 0.0], None);
        assert!(trace.validate().is_err());
    }
}
