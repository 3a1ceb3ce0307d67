//! TOML experiment configuration: schema types, parsing, and defaults.
//!
//! Unknown keys are rejected everywhere so a typo fails loudly instead of
//! silently running with defaults. Controller knobs default to the
//! reference parameter set; only overrides appear in config files.

use serde::Deserialize;
use thiserror::Error;

use crate::arm::{CoordinationEdge, CoordinationGraph, EdgeKind, SpikeSource};
use crate::joint::JointConfig;
use crate::pid::PidGains;
use crate::plant::Elbow;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("unsupported schema_version {found} (this build reads version {SCHEMA_VERSION})")]
    UnsupportedSchema { found: u32 },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("unknown sweep parameter `{0}`")]
    UnknownParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    StepResponse,
    ReachSequence,
    AblationSweep,
    PidCompare,
    ParamSweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    Snn,
    Pid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlantKind {
    Kinematic,
    TwoLinkTorque,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    Step,
    Explicit,
    RandomGoals,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElbowSpec {
    Up,
    Down,
}

impl From<ElbowSpec> for Elbow {
    fn from(spec: ElbowSpec) -> Self {
        match spec {
            ElbowSpec::Up => Elbow::Up,
            ElbowSpec::Down => Elbow::Down,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: u32,
    pub experiment: ExperimentSection,
    pub plant: PlantSection,
    #[serde(default)]
    pub controller: ControllerSection,
    pub schedule: ScheduleSection,
    #[serde(default)]
    pub coordination: CoordinationSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub kind: ExperimentKind,
    pub duration_ms: f64,
    #[serde(default = "default_dt_ms")]
    pub dt_ms: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_dt_ms() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSection {
    pub kind: PlantKind,
    pub joints: usize,
    #[serde(default)]
    pub initial_angles: Option<Vec<f64>>,
    #[serde(default)]
    pub link_lengths: Option<Vec<f64>>,
    /// Per-joint `[lower, upper]` in radians; defaults to +-pi.
    #[serde(default)]
    pub limits: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub link_masses: Option<[f64; 2]>,
    #[serde(default)]
    pub joint_damping: Option<[f64; 2]>,
    #[serde(default)]
    pub link_inertias: Option<[f64; 2]>,
    #[serde(default)]
    pub gravity: f64,
    #[serde(default)]
    pub calibration: CalibrationSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrationSection {
    /// Steps the calibration torque is held before the arm coasts out.
    pub period_steps: usize,
    /// Posture calibration runs from; defaults to the initial angles.
    pub posture: Option<Vec<f64>>,
}

impl Default for CalibrationSection {
    fn default() -> Self {
        Self {
            period_steps: 1,
            posture: None,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControllerSection {
    pub kind: Option<ControllerKind>,
    pub snn: SnnSection,
    pub pid: PidSection,
}

/// Optional overrides on top of [`JointConfig::reference`].
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SnnSection {
    pub error_gain: Option<f64>,
    pub derivative_gain: Option<f64>,
    pub derivative_window: Option<usize>,
    pub angle_increment: Option<f64>,
    pub eppc_to_motor_weight: Option<f64>,
    pub dppc_to_motor_weight: Option<f64>,
    pub eppc_to_psi_weight: Option<f64>,
    pub initial_facilitation: Option<f64>,
    pub facilitation_tau_ms: Option<f64>,
    pub facilitation_increment: Option<f64>,
    pub facilitation_max: Option<f64>,
    pub psi_tau_ms: Option<f64>,
    pub psi_increment: Option<f64>,
    pub psi_g_max: Option<f64>,
    pub motor_current_decay: Option<f64>,
    pub motor_voltage_decay: Option<f64>,
    pub disable_facilitation: bool,
    pub disable_psi: bool,
}

impl SnnSection {
    /// Reference config with this section's overrides and ablations applied.
    pub fn build(&self, dt_ms: f64) -> JointConfig {
        let mut cfg = JointConfig::reference(dt_ms);
        macro_rules! apply {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = self.$field { $target = v; })*
            };
        }
        apply! {
            error_gain => cfg.error_gain,
            derivative_gain => cfg.derivative_gain,
            derivative_window => cfg.derivative_window,
            angle_increment => cfg.angle_increment,
            eppc_to_motor_weight => cfg.eppc_to_motor_weight,
            dppc_to_motor_weight => cfg.dppc_to_motor_weight,
            eppc_to_psi_weight => cfg.eppc_to_psi_weight,
            initial_facilitation => cfg.initial_facilitation,
            facilitation_tau_ms => cfg.facilitation.decay_tau_ms,
            facilitation_increment => cfg.facilitation.increment,
            facilitation_max => cfg.facilitation.max_factor,
            psi_tau_ms => cfg.psi_gain.decay_tau_ms,
            psi_increment => cfg.psi_gain.increment,
            psi_g_max => cfg.psi_gain.g_max,
            motor_current_decay => cfg.motor.current_decay,
            motor_voltage_decay => cfg.motor.voltage_decay,
        }
        cfg.ablate(self.disable_facilitation, self.disable_psi)
    }

    /// Set a parameter by its config key (used by `param_sweep`).
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), ConfigError> {
        match name {
            "error_gain" => self.error_gain = Some(value),
            "derivative_gain" => self.derivative_gain = Some(value),
            "derivative_window" => self.derivative_window = Some(value.round() as usize),
            "angle_increment" => self.angle_increment = Some(value),
            "eppc_to_motor_weight" => self.eppc_to_motor_weight = Some(value),
            "dppc_to_motor_weight" => self.dppc_to_motor_weight = Some(value),
            "eppc_to_psi_weight" => self.eppc_to_psi_weight = Some(value),
            "initial_facilitation" => self.initial_facilitation = Some(value),
            "facilitation_tau_ms" => self.facilitation_tau_ms = Some(value),
            "facilitation_increment" => self.facilitation_increment = Some(value),
            "facilitation_max" => self.facilitation_max = Some(value),
            "psi_tau_ms" => self.psi_tau_ms = Some(value),
            "psi_increment" => self.psi_increment = Some(value),
            "psi_g_max" => self.psi_g_max = Some(value),
            "motor_current_decay" => self.motor_current_decay = Some(value),
            "motor_voltage_decay" => self.motor_voltage_decay = Some(value),
            other => return Err(ConfigError::UnknownParameter(other.to_string())),
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PidSection {
    pub kp: Option<f64>,
    pub kv: Option<f64>,
    pub ki: Option<f64>,
    pub windup_limit: Option<f64>,
}

impl PidSection {
    pub fn build(&self) -> PidGains {
        let mut gains = PidGains::default();
        if let Some(v) = self.kp {
            gains.kp = v;
        }
        if let Some(v) = self.kv {
            gains.kv = v;
        }
        if let Some(v) = self.ki {
            gains.ki = v;
        }
        if let Some(v) = self.windup_limit {
            gains.windup_limit = v;
        }
        gains
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    pub kind: ScheduleKind,
    /// `kind = "step"`: one target posture applied at t=0.
    #[serde(default)]
    pub step_targets: Option<Vec<f64>>,
    /// `kind = "explicit"`: timed target postures.
    #[serde(default)]
    pub targets: Vec<TargetEntry>,
    /// `kind = "random_goals"` fields.
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(default)]
    pub interval_ms: Option<f64>,
    #[serde(default)]
    pub radius_range: Option<[f64; 2]>,
    #[serde(default)]
    pub angle_range: Option<[f64; 2]>,
    #[serde(default = "default_elbow")]
    pub elbow: ElbowSpec,
}

fn default_elbow() -> ElbowSpec {
    ElbowSpec::Down
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetEntry {
    pub time_ms: f64,
    pub angles: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordinationPreset {
    None,
    Reacher2,
    Jaco6,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceSpec {
    Extensor,
    Flexor,
    Both,
}

impl From<SourceSpec> for SpikeSource {
    fn from(s: SourceSpec) -> Self {
        match s {
            SourceSpec::Extensor => SpikeSource::Extensor,
            SourceSpec::Flexor => SpikeSource::Flexor,
            SourceSpec::Both => SpikeSource::Both,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoordinationSection {
    pub preset: CoordinationPreset,
    pub weight: f64,
    pub inhibitory: bool,
    pub source: SourceSpec,
    /// `preset = "custom"`: explicit `[leading, subordinate]` pairs.
    pub edges: Vec<[usize; 2]>,
}

impl Default for CoordinationSection {
    fn default() -> Self {
        Self {
            preset: CoordinationPreset::None,
            weight: 0.4,
            inhibitory: true,
            source: SourceSpec::Both,
            edges: Vec::new(),
        }
    }
}

impl CoordinationSection {
    pub fn build(&self, joints: usize) -> Result<CoordinationGraph, ConfigError> {
        let kind = if self.inhibitory {
            EdgeKind::Inhibitory
        } else {
            EdgeKind::Excitatory
        };
        let source: SpikeSource = self.source.into();
        let expect_joints = |need: usize| {
            if joints == need {
                Ok(())
            } else {
                Err(ConfigError::Invalid(format!(
                    "coordination preset needs a {need}-joint arm, plant has {joints}"
                )))
            }
        };
        match self.preset {
            CoordinationPreset::None => Ok(CoordinationGraph::independent(joints)),
            CoordinationPreset::Reacher2 => {
                expect_joints(2)?;
                Ok(CoordinationGraph::reacher2(self.weight, kind, source))
            }
            CoordinationPreset::Jaco6 => {
                expect_joints(6)?;
                Ok(CoordinationGraph::jaco6(self.weight, kind, source))
            }
            CoordinationPreset::Custom => {
                let edges = self
                    .edges
                    .iter()
                    .map(|&[leading, subordinate]| CoordinationEdge {
                        leading,
                        subordinate,
                        weight: self.weight,
                        kind,
                        source,
                    })
                    .collect();
                CoordinationGraph::new(joints, edges)
                    .map_err(|e| ConfigError::Invalid(e.to_string()))
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub out_dir: std::path::PathBuf,
    pub trace_prefix: String,
    pub summary_name: String,
    pub write_traces: bool,
    /// Moving-average window applied to derivative chains in the summary
    /// metrics; 0 disables smoothing.
    pub smoothing_window: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            out_dir: "out".into(),
            trace_prefix: "trace".into(),
            summary_name: "summary.csv".into(),
            write_traces: true,
            smoothing_window: 0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: String,
    pub values: Vec<f64>,
}

impl ConfigFile {
    pub fn from_toml_str(text: &str, path: &str) -> Result<Self, ConfigError> {
        let cfg: ConfigFile = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_string(),
            // toml's message already carries line/column spans
            message: e.to_string(),
        })?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::UnsupportedSchema {
                found: cfg.schema_version,
            });
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text, &path.display().to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
schema_version = 1

[experiment]
kind = "step_response"
duration_ms = 4000.0

[plant]
kind = "kinematic"
joints = 2

[schedule]
kind = "step"
step_targets = [1.0, 0.0]
"#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = ConfigFile::from_toml_str(MINIMAL, "mini.toml").unwrap();
        assert_eq!(cfg.experiment.dt_ms, 1.0);
        assert_eq!(cfg.experiment.seed, 0);
        assert_eq!(cfg.output.out_dir, std::path::PathBuf::from("out"));
        assert!(cfg.output.write_traces);
        assert!(cfg.controller.kind.is_none());
        let snn = cfg.controller.snn.build(cfg.experiment.dt_ms);
        assert_eq!(snn, crate::joint::JointConfig::reference(1.0));
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let bad = MINIMAL.replace("duration_ms", "duration_msec");
        let err = ConfigFile::from_toml_str(&bad, "bad.toml").unwrap_err();
        let text = err.to_string();
        assert!(text.contains("bad.toml"), "{text}");
        assert!(text.contains("line"), "{text}");
        assert!(text.contains("duration_msec"), "{text}");
    }

    #[test]
    fn schema_version_is_enforced() {
        let bad = MINIMAL.replace("schema_version = 1", "schema_version = 9");
        assert!(matches!(
            ConfigFile::from_toml_str(&bad, "v9.toml"),
            Err(ConfigError::UnsupportedSchema { found: 9 })
        ));
    }

    #[test]
    fn snn_overrides_apply_on_top_of_reference() {
        let text = format!(
            "{MINIMAL}\n[controller.snn]\nangle_increment = 0.002\ndisable_psi = true\n"
        );
        let cfg = ConfigFile::from_toml_str(&text, "o.toml").unwrap();
        let built = cfg.controller.snn.build(1.0);
        assert_eq!(built.angle_increment, 0.002);
        assert!(!built.use_psi_gain);
        assert!(built.use_facilitation);
        // Untouched fields stay at reference values.
        assert_eq!(built.error_gain, 3.0);
    }

    #[test]
    fn sweep_parameter_setter_rejects_unknown_names() {
        let mut snn = SnnSection::default();
        assert!(snn.set("initial_facilitation", 0.2).is_ok());
        assert_eq!(snn.initial_facilitation, Some(0.2));
        assert!(matches!(
            snn.set("not_a_knob", 1.0),
            Err(ConfigError::UnknownParameter(_))
        ));
    }

    #[test]
    fn coordination_presets_check_joint_counts() {
        let section = CoordinationSection {
            preset: CoordinationPreset::Reacher2,
            ..CoordinationSection::default()
        };
        assert!(section.build(2).is_ok());
        assert!(section.build(3).is_err());

        let custom = CoordinationSection {
            preset: CoordinationPreset::Custom,
            edges: vec![[0, 1], [1, 0]],
            ..CoordinationSection::default()
        };
        let err = custom.build(2).unwrap_err();
        assert!(err.to_string().contains("cycle"));
    }
}
