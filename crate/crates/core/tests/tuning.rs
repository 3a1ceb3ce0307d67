//! Exploratory harness for retuning the reference parameters.
//!
//! Ignored by default; run with
//! `cargo test -p spikearm --test tuning -- --ignored --nocapture`
//! and read the printed tables. Nothing here asserts behavior — the
//! acceptance suite does that against the frozen reference config.

use spikearm::experiment::{
    build_trials, resolve, run_trial, summarize_trial, ConfigFile, SummaryRow,
};
use spikearm::trace::TrialTrace;

fn run(toml: &str) -> Vec<(String, TrialTrace, Vec<SummaryRow>)> {
    let cfg = ConfigFile::from_toml_str(toml, "tuning.toml").unwrap();
    let resolved = resolve(&cfg).unwrap();
    let specs = build_trials(&cfg, &resolved).unwrap();
    specs
        .iter()
        .map(|s| {
            let trace = run_trial(&resolved, &s.controller).unwrap();
            let rows = summarize_trial(
                &s.label,
                &trace,
                resolved.smoothing_window,
                Some(&resolved.link_lengths),
            );
            (s.label.clone(), trace, rows)
        })
        .collect()
}

fn print_rows(rows: &[SummaryRow]) {
    for r in rows {
        println!(
            "{:>24} sig={:<3} settled={:?} over={:?} rise={:?} settle={:?} err={:?} vpk={:.4} jmax={:.3} peaks={} sym={:.3}",
            r.label,
            r.signal,
            r.settled,
            r.overshoot_pct,
            r.rise_time_ms,
            r.settling_time_ms,
            r.final_error,
            r.peak_speed,
            r.max_abs_jerk,
            r.bell_peaks,
            r.bell_symmetry,
        );
    }
}

#[test]
#[ignore = "tuning harness, run manually"]
fn step_response_kinematic() {
    let out = run(r#"
schema_version = 1
[experiment]
kind = "step_response"
duration_ms = 8000.0
[plant]
kind = "kinematic"
joints = 2
[schedule]
kind = "step"
step_targets = [1.0, 0.0]
[output]
smoothing_window = 101
"#);
    for (_, _, rows) in &out {
        print_rows(rows);
    }
}

#[test]
#[ignore = "tuning harness, run manually"]
fn ablation_kinematic() {
    let out = run(r#"
schema_version = 1
[experiment]
kind = "ablation_sweep"
duration_ms = 9000.0
[plant]
kind = "kinematic"
joints = 2
[schedule]
kind = "step"
step_targets = [1.0, 0.0]
[output]
smoothing_window = 101
"#);
    for (_, _, rows) in &out {
        print_rows(&rows[..1]);
    }
}

#[test]
#[ignore = "tuning harness, run manually"]
fn ablation_torque() {
    let out = run(r#"
schema_version = 1
[experiment]
kind = "ablation_sweep"
duration_ms = 9000.0
[plant]
kind = "two_link_torque"
joints = 2
[schedule]
kind = "step"
step_targets = [1.0, 0.0]
[output]
smoothing_window = 101
"#);
    for (_, _, rows) in &out {
        print_rows(rows);
    }
}

#[test]
#[ignore = "tuning harness, run manually"]
fn dppc_sweep_torque() {
    for b in [2.5, 3.0, 3.5, 4.0] {
        for k_d in [0.05, 0.1] {
            for w_d in [0.1, 0.25] {
                let out = run(&format!(
                    r#"
schema_version = 1
[experiment]
kind = "step_response"
duration_ms = 9000.0
[plant]
kind = "two_link_torque"
joints = 2
joint_damping = [{b}, {b}]
[schedule]
kind = "step"
step_targets = [1.0, 0.0]
[controller.snn]
derivative_gain = {k_d}
dppc_to_motor_weight = {w_d}
[output]
smoothing_window = 101
"#
                ));
                println!("b={b} k_d={k_d} w_d={w_d}");
                for (_, _, rows) in &out {
                    print_rows(&rows[..1]);
                    print_rows(&rows[2..3]);
                }
            }
        }
    }
}

#[test]
#[ignore = "tuning harness, run manually"]
fn bell_anatomy() {
    use spikearm::metrics::{speed_series, SignalSource};
    for (b, k_d) in [(3.0, 0.05), (3.0, 0.1), (4.0, 0.05), (2.5, 0.1)] {
        let out = run(&format!(
            r#"
schema_version = 1
[experiment]
kind = "step_response"
duration_ms = 9000.0
[plant]
kind = "two_link_torque"
joints = 2
joint_damping = [{b}, {b}]
[schedule]
kind = "step"
step_targets = [1.0, 0.0]
[controller.snn]
derivative_gain = {k_d}
[output]
smoothing_window = 101
"#
        ));
        let (_, trace, _) = &out[0];
        let speed = speed_series(trace, SignalSource::Joint(0), 101);
        let peak = speed.iter().cloned().fold(0.0f64, f64::max);
        let argmax = speed.iter().position(|&v| v == peak).unwrap();
        for frac in [0.05, 0.10] {
            let thr = frac * peak;
            let first = speed.iter().position(|&v| v >= thr).unwrap();
            let last = speed.iter().rposition(|&v| v >= thr).unwrap();
            println!(
                "b={b} k_d={k_d} frac={frac}: support {:.0}..{:.0} ms, peak {peak:.3} at {:.0} ms, sym={:.3}",
                trace.time_ms[first],
                trace.time_ms[last],
                trace.time_ms[argmax],
                (argmax - first) as f64 / (last - first) as f64,
            );
        }
        // Where does the tail sit? print speed at a few probe times.
        for t_ms in [1000, 1500, 2000, 2500, 3000, 4000, 5000] {
            let i = (t_ms as f64 / trace.dt_ms) as usize;
            if i < speed.len() {
                print!("  v({t_ms})={:.4}", speed[i]);
            }
        }
        println!();
    }
}

#[test]
#[ignore = "tuning harness, run manually"]
fn bell_kinematic_and_torque() {
    for plant in ["kinematic", "two_link_torque"] {
        println!("--- plant {plant} ---");
        let out = run(&format!(
            r#"
schema_version = 1
[experiment]
kind = "step_response"
duration_ms = 8000.0
[plant]
kind = "{plant}"
joints = 2
[schedule]
kind = "step"
step_targets = [1.0, 0.0]
[output]
smoothing_window = 51
"#
        ));
        for (_, _, rows) in &out {
            print_rows(rows);
        }
    }
}

#[test]
#[ignore = "tuning harness, run manually"]
fn pid_compare_torque() {
    for kp in [20.0, 35.0, 50.0, 65.0, 80.0] {
        println!("--- kp {kp} ---");
        let out = run(&format!(
            r#"
schema_version = 1
[experiment]
kind = "pid_compare"
duration_ms = 10000.0
[plant]
kind = "two_link_torque"
joints = 2
[schedule]
kind = "step"
step_targets = [1.0, 0.0]
[controller.pid]
kp = {kp}
[output]
smoothing_window = 101
"#
        ));
        for (_, _, rows) in &out {
            print_rows(&rows[..1]);
            print_rows(&rows[2..3]);
        }
    }
}

#[test]
#[ignore = "tuning harness, run manually"]
fn coordination_effects() {
    for preset in ["none", "reacher2"] {
        println!("--- coordination {preset} ---");
        let out = run(&format!(
            r#"
schema_version = 1
[experiment]
kind = "step_response"
duration_ms = 9000.0
[plant]
kind = "kinematic"
joints = 2
[schedule]
kind = "step"
step_targets = [1.0, 0.3]
[coordination]
preset = "{preset}"
"#
        ));
        for (_, trace, rows) in &out {
            print_rows(rows);
            // First extensor spike per joint, to see the coordination stagger.
            if let Some(diag) = &trace.diagnostics {
                for (j, series) in diag.iter().enumerate() {
                    let first = series
                        .extensor
                        .iter()
                        .position(|&s| s)
                        .map(|i| trace.time_ms[i]);
                    println!("  joint {j} first extensor spike at {first:?} ms");
                }
            }
        }
    }
}
