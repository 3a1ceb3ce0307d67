//! Experiment resolution and closed-loop trial execution.

use std::path::PathBuf;

use thiserror::Error;

use super::config::{
    ConfigError, ConfigFile, ControllerKind, ExperimentKind, PlantKind, ScheduleKind,
};
use super::io;
use super::schedule::{random_goal_schedule, ScheduledTarget};
use crate::arm::{ArmController, ArmError, CoordinationGraph};
use crate::joint::{JointCommand, JointConfig};
use crate::metrics::{
    bell_shape_score, jerk_profile, speed_series, step_metrics, MetricsError, SignalSource,
};
use crate::pid::{PidGains, PidState};
use crate::plant::{
    calibrate_torque_increment, forward_kinematics, kinematic_step, two_link_step, ArmState,
    JointLimits, PlantError, TorqueCalibration, TwoLinkParams,
};
use crate::trace::TrialTrace;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Plant(#[from] PlantError),
    #[error("integration fault at step {step}: {source}")]
    Integration { step: usize, source: PlantError },
    #[error(transparent)]
    Arm(#[from] ArmError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("internal inconsistency: {0}")]
    Internal(&'static str),
}

/// Plant ready to step, with torque calibration already solved.
#[derive(Debug, Clone)]
pub enum ResolvedPlant {
    Kinematic {
        limits: Vec<JointLimits>,
    },
    TwoLinkTorque {
        params: TwoLinkParams,
        calibration: TorqueCalibration,
    },
}

/// A config file after validation: every derived quantity precomputed.
#[derive(Debug, Clone)]
pub struct ResolvedExperiment {
    pub kind: ExperimentKind,
    pub controller_kind: ControllerKind,
    pub dt_ms: f64,
    pub steps: usize,
    pub initial_angles: Vec<f64>,
    pub link_lengths: Vec<f64>,
    pub plant: ResolvedPlant,
    pub snn: JointConfig,
    pub pid: PidGains,
    pub graph: CoordinationGraph,
    pub schedule: Vec<ScheduledTarget>,
    pub smoothing_window: usize,
}

fn invalid(message: impl Into<String>) -> RunError {
    RunError::Config(ConfigError::Invalid(message.into()))
}

/// Validate the parsed config and precompute schedules, topology, and
/// torque calibration.
pub fn resolve(cfg: &ConfigFile) -> Result<ResolvedExperiment, RunError> {
    let dt_ms = cfg.experiment.dt_ms;
    if !(dt_ms > 0.0) {
        return Err(invalid("experiment.dt_ms must be > 0"));
    }
    if !(cfg.experiment.duration_ms > 0.0) {
        return Err(invalid("experiment.duration_ms must be > 0"));
    }
    let steps = (cfg.experiment.duration_ms / dt_ms).round() as usize;
    if steps == 0 {
        return Err(invalid("experiment shorter than one tick"));
    }

    let joints = cfg.plant.joints;
    if joints == 0 {
        return Err(invalid("plant.joints must be >= 1"));
    }
    let expect_len = |name: &str, len: usize| -> Result<(), RunError> {
        if len == joints {
            Ok(())
        } else {
            Err(invalid(format!(
                "plant.{name} has {len} entries for {joints} joints"
            )))
        }
    };

    let initial_angles = cfg
        .plant
        .initial_angles
        .clone()
        .unwrap_or_else(|| vec![0.0; joints]);
    expect_len("initial_angles", initial_angles.len())?;

    let link_lengths = cfg
        .plant
        .link_lengths
        .clone()
        .unwrap_or_else(|| vec![0.5; joints]);
    expect_len("link_lengths", link_lengths.len())?;

    let limits: Vec<JointLimits> = cfg
        .plant
        .limits
        .clone()
        .map(|ls| {
            ls.into_iter()
                .map(|[lower, upper]| JointLimits { lower, upper })
                .collect()
        })
        .unwrap_or_else(|| vec![JointLimits::symmetric(std::f64::consts::PI); joints]);
    expect_len("limits", limits.len())?;
    for (j, l) in limits.iter().enumerate() {
        l.validate()?;
        if initial_angles[j] < l.lower || initial_angles[j] > l.upper {
            return Err(invalid(format!("initial angle of joint {j} violates its limits")));
        }
    }

    let snn = cfg.controller.snn.build(dt_ms);
    snn.validate()
        .map_err(|e| invalid(format!("controller.snn: {e}")))?;
    let pid = cfg.controller.pid.build();

    let plant = match cfg.plant.kind {
        PlantKind::Kinematic => ResolvedPlant::Kinematic { limits },
        PlantKind::TwoLinkTorque => {
            if joints != 2 {
                return Err(invalid("two_link_torque plant requires exactly 2 joints"));
            }
            let desk = TwoLinkParams::desk();
            let lengths = [link_lengths[0], link_lengths[1]];
            let masses = cfg.plant.link_masses.unwrap_or(desk.link_masses);
            let damping = cfg.plant.joint_damping.unwrap_or(desk.joint_damping);
            let mut params = TwoLinkParams::uniform_rods(lengths, masses, damping, dt_ms / 1000.0);
            if let Some(inertias) = cfg.plant.link_inertias {
                params.link_inertias = inertias;
            }
            params.gravity = cfg.plant.gravity;
            params.validate()?;

            let posture_vec = cfg
                .plant
                .calibration
                .posture
                .clone()
                .unwrap_or_else(|| initial_angles.clone());
            expect_len("calibration.posture", posture_vec.len())?;
            let calibration = calibrate_torque_increment(
                &params,
                [posture_vec[0], posture_vec[1]],
                snn.angle_increment,
                cfg.plant.calibration.period_steps,
            )?;
            ResolvedPlant::TwoLinkTorque {
                params,
                calibration,
            }
        }
    };

    let graph = cfg.coordination.build(joints)?;

    let schedule = match cfg.schedule.kind {
        ScheduleKind::Step => {
            let targets = cfg
                .schedule
                .step_targets
                .clone()
                .ok_or_else(|| invalid("schedule.step_targets required for kind = \"step\""))?;
            expect_len("schedule.step_targets", targets.len())?;
            vec![ScheduledTarget {
                time_ms: 0.0,
                angles: targets,
            }]
        }
        ScheduleKind::Explicit => {
            if cfg.schedule.targets.is_empty() {
                return Err(invalid("schedule.targets required for kind = \"explicit\""));
            }
            let mut prev = f64::NEG_INFINITY;
            for entry in &cfg.schedule.targets {
                expect_len("schedule.targets.angles", entry.angles.len())?;
                if entry.time_ms <= prev {
                    return Err(invalid("schedule.targets times must be strictly increasing"));
                }
                prev = entry.time_ms;
            }
            cfg.schedule
                .targets
                .iter()
                .map(|e| ScheduledTarget {
                    time_ms: e.time_ms,
                    angles: e.angles.clone(),
                })
                .collect()
        }
        ScheduleKind::RandomGoals => {
            if joints != 2 {
                return Err(invalid("random_goals schedules require a 2-joint arm"));
            }
            let count = cfg
                .schedule
                .count
                .ok_or_else(|| invalid("schedule.count required for random_goals"))?;
            if count == 0 {
                return Err(invalid("schedule.count must be >= 1"));
            }
            let interval_ms = cfg
                .schedule
                .interval_ms
                .ok_or_else(|| invalid("schedule.interval_ms required for random_goals"))?;
            let radius_range = cfg
                .schedule
                .radius_range
                .ok_or_else(|| invalid("schedule.radius_range required for random_goals"))?;
            let angle_range = cfg
                .schedule
                .angle_range
                .unwrap_or([-std::f64::consts::PI, std::f64::consts::PI]);
            random_goal_schedule(
                cfg.experiment.seed,
                count,
                interval_ms,
                radius_range,
                angle_range,
                cfg.schedule.elbow.into(),
                [link_lengths[0], link_lengths[1]],
            )?
        }
    };

    let controller_kind = cfg.controller.kind.unwrap_or(ControllerKind::Snn);
    match cfg.experiment.kind {
        ExperimentKind::AblationSweep | ExperimentKind::ParamSweep
            if controller_kind == ControllerKind::Pid =>
        {
            return Err(invalid("this experiment kind sweeps the spiking controller; controller.kind cannot be \"pid\""));
        }
        ExperimentKind::ParamSweep if cfg.sweep.is_none() => {
            return Err(invalid("param_sweep requires a [sweep] section"));
        }
        kind if kind != ExperimentKind::ParamSweep && cfg.sweep.is_some() => {
            return Err(invalid("[sweep] section is only valid for param_sweep"));
        }
        _ => {}
    }

    Ok(ResolvedExperiment {
        kind: cfg.experiment.kind,
        controller_kind,
        dt_ms,
        steps,
        initial_angles,
        link_lengths,
        plant,
        snn,
        pid,
        graph,
        schedule,
        smoothing_window: cfg.output.smoothing_window,
    })
}

/// Controller variant a single trial runs with.
#[derive(Debug, Clone)]
pub enum TrialController {
    Snn(JointConfig),
    Pid(PidGains),
}

#[derive(Debug, Clone)]
pub struct TrialSpec {
    pub label: String,
    pub controller: TrialController,
}

/// Expand the experiment kind into its trial list.
pub fn build_trials(
    cfg: &ConfigFile,
    resolved: &ResolvedExperiment,
) -> Result<Vec<TrialSpec>, RunError> {
    let single = |label: &str| -> Vec<TrialSpec> {
        let controller = match resolved.controller_kind {
            ControllerKind::Snn => TrialController::Snn(resolved.snn.clone()),
            ControllerKind::Pid => TrialController::Pid(resolved.pid),
        };
        vec![TrialSpec {
            label: label.to_string(),
            controller,
        }]
    };

    Ok(match resolved.kind {
        ExperimentKind::StepResponse | ExperimentKind::ReachSequence => {
            let label = match resolved.controller_kind {
                ControllerKind::Snn => "snn",
                ControllerKind::Pid => "pid",
            };
            single(label)
        }
        ExperimentKind::AblationSweep => {
            let base = resolved.snn.clone();
            [
                ("full", false, false),
                ("no_fac", true, false),
                ("no_psi", false, true),
                ("neither", true, true),
            ]
            .into_iter()
            .map(|(label, fac, psi)| TrialSpec {
                label: label.to_string(),
                controller: TrialController::Snn(base.clone().ablate(fac, psi)),
            })
            .collect()
        }
        ExperimentKind::PidCompare => vec![
            TrialSpec {
                label: "snn".to_string(),
                controller: TrialController::Snn(resolved.snn.clone()),
            },
            TrialSpec {
                label: "pid".to_string(),
                controller: TrialController::Pid(resolved.pid),
            },
        ],
        ExperimentKind::ParamSweep => {
            let sweep = cfg
                .sweep
                .as_ref()
                .ok_or_else(|| invalid("param_sweep requires a [sweep] section"))?;
            if sweep.values.is_empty() {
                return Err(invalid("sweep.values must not be empty"));
            }
            let mut trials = Vec::with_capacity(sweep.values.len());
            for &value in &sweep.values {
                let mut snn = cfg.controller.snn.clone();
                snn.set(&sweep.parameter, value)?;
                let built = snn.build(resolved.dt_ms);
                built
                    .validate()
                    .map_err(|e| invalid(format!("sweep value {value}: {e}")))?;
                trials.push(TrialSpec {
                    label: format!("{}={}", sweep.parameter, value),
                    controller: TrialController::Snn(built),
                });
            }
            trials
        }
    })
}

/// Run one closed-loop trial and record its trace.
pub fn run_trial(
    resolved: &ResolvedExperiment,
    controller: &TrialController,
) -> Result<TrialTrace, RunError> {
    let n = resolved.initial_angles.len();
    let dt_s = resolved.dt_ms / 1000.0;

    let mut arm = match controller {
        TrialController::Snn(cfg) => Some(ArmController::uniform(
            cfg.clone(),
            n,
            resolved.graph.clone(),
        )?),
        TrialController::Pid(_) => None,
    };
    let mut pids = vec![PidState::default(); n];

    let record_diagnostics = arm.is_some();
    let mut trace = TrialTrace::new(resolved.dt_ms, n, record_diagnostics);
    let mut plant_state = ArmState::at_rest(resolved.initial_angles.clone());

    let mut schedule_idx = 0usize;
    let mut current_target = resolved.initial_angles.clone();
    let advance_schedule = |time_ms: f64, current: &mut Vec<f64>, idx: &mut usize| {
        while *idx < resolved.schedule.len() && resolved.schedule[*idx].time_ms <= time_ms + 1e-9 {
            current.clone_from(&resolved.schedule[*idx].angles);
            *idx += 1;
        }
    };

    advance_schedule(0.0, &mut current_target, &mut schedule_idx);
    let ee0 = forward_kinematics(&plant_state.q, &resolved.link_lengths)?;
    let initial_commands: Option<Vec<JointCommand>> = match controller {
        TrialController::Snn(cfg) => Some(vec![
            JointCommand::quiescent(
                cfg.psi_gain.g_max,
                cfg.initial_facilitation
            );
            n
        ]),
        TrialController::Pid(_) => None,
    };
    trace.push_sample(
        0.0,
        &plant_state.q,
        &current_target,
        ee0,
        initial_commands.as_deref(),
    );

    for step in 0..resolved.steps {
        let t_ms = step as f64 * resolved.dt_ms;
        advance_schedule(t_ms, &mut current_target, &mut schedule_idx);
        let fault = |source: PlantError| RunError::Integration { step, source };

        let commands: Option<Vec<JointCommand>>;
        match controller {
            TrialController::Snn(cfg) => {
                let out = arm
                    .as_mut()
                    .expect("snn trial has a controller")
                    .step(&plant_state.q, &current_target)?;
                plant_state = match &resolved.plant {
                    ResolvedPlant::Kinematic { limits } => {
                        kinematic_step(&plant_state, &out.deltas, limits, dt_s).map_err(fault)?
                    }
                    ResolvedPlant::TwoLinkTorque {
                        params,
                        calibration,
                    } => {
                        let ratio = |d: f64| d / cfg.angle_increment;
                        let torques = [
                            ratio(out.deltas[0]) * calibration.nominal_torques[0],
                            ratio(out.deltas[1]) * calibration.nominal_torques[1],
                        ];
                        two_link_step(&plant_state, torques, params).map_err(fault)?
                    }
                };
                commands = Some(out.commands);
            }
            TrialController::Pid(gains) => {
                let mut outputs = Vec::with_capacity(n);
                for j in 0..n {
                    outputs.push(pids[j].step(
                        gains,
                        plant_state.q[j],
                        current_target[j],
                        plant_state.qdot[j],
                        dt_s,
                    ));
                }
                plant_state = match &resolved.plant {
                    ResolvedPlant::Kinematic { limits } => {
                        // PID output is a joint velocity on this plant.
                        let deltas: Vec<f64> = outputs.iter().map(|u| u * dt_s).collect();
                        kinematic_step(&plant_state, &deltas, limits, dt_s).map_err(fault)?
                    }
                    ResolvedPlant::TwoLinkTorque { params, .. } => {
                        two_link_step(&plant_state, [outputs[0], outputs[1]], params).map_err(fault)?
                    }
                };
                commands = None;
            }
        }

        let ee = forward_kinematics(&plant_state.q, &resolved.link_lengths).map_err(fault)?;
        trace.push_sample(
            (step + 1) as f64 * resolved.dt_ms,
            &plant_state.q,
            &current_target,
            ee,
            commands.as_deref(),
        );
    }

    trace.validate().map_err(RunError::Internal)?;
    Ok(trace)
}

/// Run a batch sequentially. Always available; the parallel variant is the
/// default dispatch when the `parallel` feature is enabled.
pub fn run_trials_sequential(
    resolved: &ResolvedExperiment,
    specs: &[TrialSpec],
) -> Vec<Result<TrialTrace, RunError>> {
    specs
        .iter()
        .map(|s| run_trial(resolved, &s.controller))
        .collect()
}

/// Run a batch across threads, preserving input order.
#[cfg(feature = "parallel")]
pub fn run_trials_parallel(
    resolved: &ResolvedExperiment,
    specs: &[TrialSpec],
) -> Vec<Result<TrialTrace, RunError>> {
    use rayon::prelude::*;
    specs
        .par_iter()
        .map(|s| run_trial(resolved, &s.controller))
        .collect()
}

/// Batch entry point: parallel when built with the `parallel` feature,
/// sequential otherwise. Trial order and results are identical either way.
pub fn run_trials(
    resolved: &ResolvedExperiment,
    specs: &[TrialSpec],
) -> Vec<Result<TrialTrace, RunError>> {
    #[cfg(feature = "parallel")]
    {
        run_trials_parallel(resolved, specs)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_trials_sequential(resolved, specs)
    }
}

/// Per-signal metrics of one trial, one row per joint plus the end effector.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub label: String,
    /// Joint index as a string, or "ee".
    pub signal: String,
    pub theta_initial: Option<f64>,
    pub theta_target: Option<f64>,
    pub settled: Option<bool>,
    pub overshoot_pct: Option<f64>,
    pub rise_time_ms: Option<f64>,
    pub settling_time_ms: Option<f64>,
    pub final_error: Option<f64>,
    pub peak_speed: f64,
    pub max_abs_jerk: f64,
    pub mean_abs_jerk: f64,
    pub bell_peaks: usize,
    pub bell_symmetry: f64,
}

/// Summarize a trace into per-joint rows plus an end-effector row.
///
/// `link_lengths` (when known) lets the end-effector row report the final
/// Cartesian distance to the goal posture; traces loaded from disk do not
/// carry lengths, so callers without them pass `None`.
pub fn summarize_trial(
    label: &str,
    trace: &TrialTrace,
    smoothing_window: usize,
    link_lengths: Option<&[f64]>,
) -> Vec<SummaryRow> {
    let mut rows = Vec::with_capacity(trace.joints() + 1);
    for j in 0..trace.joints() {
        let q = &trace.q[j];
        let theta_0 = q[0];
        let theta_target = *trace.targets[j].last().expect("non-empty trace");
        let (settled, overshoot, rise, settling) =
            match step_metrics(trace, j, theta_0, theta_target) {
                Ok(m) => (
                    Some(true),
                    Some(m.overshoot_pct),
                    Some(m.rise_time_ms),
                    Some(m.settling_time_ms),
                ),
                Err(MetricsError::NotSettled) => (
                    Some(false),
                    overshoot_only(q, theta_0, theta_target),
                    None,
                    None,
                ),
                Err(_) => (None, None, None, None),
            };
        let speed = speed_series(trace, SignalSource::Joint(j), smoothing_window);
        let jerk = jerk_profile(trace, SignalSource::Joint(j), smoothing_window);
        let bell = bell_shape_score(&speed);
        rows.push(SummaryRow {
            label: label.to_string(),
            signal: j.to_string(),
            theta_initial: Some(theta_0),
            theta_target: Some(theta_target),
            settled,
            overshoot_pct: overshoot,
            rise_time_ms: rise,
            settling_time_ms: settling,
            final_error: Some((q.last().unwrap() - theta_target).abs()),
            peak_speed: speed.iter().fold(0.0f64, |m, &v| m.max(v)),
            max_abs_jerk: jerk.max_abs,
            mean_abs_jerk: jerk.mean_abs,
            bell_peaks: bell.peak_count,
            bell_symmetry: bell.symmetry_ratio,
        });
    }

    let speed = speed_series(trace, SignalSource::EndEffector, smoothing_window);
    let jerk = jerk_profile(trace, SignalSource::EndEffector, smoothing_window);
    let bell = bell_shape_score(&speed);
    let final_error = link_lengths.and_then(|lengths| {
        let final_target: Vec<f64> = trace
            .targets
            .iter()
            .map(|s| *s.last().expect("non-empty trace"))
            .collect();
        let goal = forward_kinematics(&final_target, lengths).ok()?;
        let ee = trace.ee.last()?;
        Some(((ee[0] - goal[0]).powi(2) + (ee[1] - goal[1]).powi(2)).sqrt())
    });
    rows.push(SummaryRow {
        label: label.to_string(),
        signal: "ee".to_string(),
        theta_initial: None,
        theta_target: None,
        settled: None,
        overshoot_pct: None,
        rise_time_ms: None,
        settling_time_ms: None,
        final_error,
        peak_speed: speed.iter().fold(0.0f64, |m, &v| m.max(v)),
        max_abs_jerk: jerk.max_abs,
        mean_abs_jerk: jerk.mean_abs,
        bell_peaks: bell.peak_count,
        bell_symmetry: bell.symmetry_ratio,
    });
    rows
}

fn overshoot_only(q: &[f64], theta_0: f64, theta_target: f64) -> Option<f64> {
    let step = theta_target - theta_0;
    if step == 0.0 {
        return None;
    }
    let sign = step.signum();
    let worst = q
        .iter()
        .map(|&x| sign * (x - theta_target))
        .fold(f64::NEG_INFINITY, f64::max);
    Some(worst.max(0.0) / step.abs() * 100.0)
}

/// Everything a finished run produced.
#[derive(Debug)]
pub struct RunOutput {
    pub out_dir: PathBuf,
    pub trace_paths: Vec<PathBuf>,
    pub summary_path: PathBuf,
    pub labels: Vec<String>,
    pub traces: Vec<TrialTrace>,
    pub summary: Vec<SummaryRow>,
}

fn sanitize_label(label: &str) -> String {
    label
        .chars()
        .map(|c| if c == '=' || c == '/' || c.is_whitespace() { '-' } else { c })
        .collect()
}

/// Resolve, run every trial, and write traces plus the summary CSV.
pub fn run_experiment(cfg: &ConfigFile) -> Result<RunOutput, RunError> {
    let resolved = resolve(cfg)?;
    let specs = build_trials(cfg, &resolved)?;
    let results = run_trials(&resolved, &specs);

    let mut traces = Vec::with_capacity(results.len());
    for result in results {
        traces.push(result?);
    }

    let out_dir = cfg.output.out_dir.clone();
    std::fs::create_dir_all(&out_dir)?;

    let mut trace_paths = Vec::new();
    if cfg.output.write_traces {
        for (spec, trace) in specs.iter().zip(&traces) {
            let name = format!(
                "{}_{}.csv",
                cfg.output.trace_prefix,
                sanitize_label(&spec.label)
            );
            let path = out_dir.join(name);
            io::write_trace_csv(&path, trace)?;
            trace_paths.push(path);
        }
    }

    let mut summary = Vec::new();
    for (spec, trace) in specs.iter().zip(&traces) {
        summary.extend(summarize_trial(
            &spec.label,
            trace,
            resolved.smoothing_window,
            Some(&resolved.link_lengths),
        ));
    }
    let summary_path = out_dir.join(&cfg.output.summary_name);
    io::write_summary_csv(&summary_path, &summary)?;

    Ok(RunOutput {
        out_dir,
        trace_paths,
        summary_path,
        labels: specs.into_iter().map(|s| s.label).collect(),
        traces,
        summary,
    })
}
