//! CSV serialization for traces and summaries.
//!
//! Output is deterministic: fixed column order, shortest round-trip float
//! formatting, LF line endings, no timestamps. Identical runs produce
//! byte-identical files.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use super::runner::SummaryRow;
use crate::trace::TrialTrace;

fn fmt_f64(value: f64) -> String {
    // `{}` prints the shortest string that parses back to the same f64.
    format!("{value}")
}

fn fmt_bool(value: bool) -> &'static str {
    if value {
        "1"
    } else {
        "0"
    }
}

/// Trace column layout: `time_ms, q{j}.., target{j}.., ee_x, ee_y`, then,
/// for spiking trials, ten diagnostic columns per joint.
pub fn trace_header(joints: usize, diagnostics: bool) -> String {
    let mut header = String::from("time_ms");
    for j in 0..joints {
        write!(header, ",q{j}").unwrap();
    }
    for j in 0..joints {
        write!(header, ",target{j}").unwrap();
    }
    header.push_str(",ee_x,ee_y");
    if diagnostics {
        for j in 0..joints {
            for name in [
                "eppc_minus",
                "eppc_plus",
                "dppc_neg",
                "dppc_pos",
                "psi",
                "extensor",
                "flexor",
                "psi_gain",
                "facilitation_e",
                "facilitation_f",
            ] {
                write!(header, ",j{j}_{name}").unwrap();
            }
        }
    }
    header
}

pub fn write_trace_csv(path: &Path, trace: &TrialTrace) -> io::Result<()> {
    let joints = trace.joints();
    let diag = trace.diagnostics.as_ref();
    let mut out = String::new();
    out.push_str(&trace_header(joints, diag.is_some()));
    out.push('\n');
    for k in 0..trace.len() {
        write!(out, "{}", fmt_f64(trace.time_ms[k])).unwrap();
        for j in 0..joints {
            write!(out, ",{}", fmt_f64(trace.q[j][k])).unwrap();
        }
        for j in 0..joints {
            write!(out, ",{}", fmt_f64(trace.targets[j][k])).unwrap();
        }
        write!(out, ",{},{}", fmt_f64(trace.ee[k][0]), fmt_f64(trace.ee[k][1])).unwrap();
        if let Some(diag) = diag {
            for series in diag {
                write!(
                    out,
                    ",{},{},{},{},{},{},{},{},{},{}",
                    fmt_bool(series.eppc_minus[k]),
                    fmt_bool(series.eppc_plus[k]),
                    fmt_bool(series.dppc_neg[k]),
                    fmt_bool(series.dppc_pos[k]),
                    fmt_bool(series.psi[k]),
                    fmt_bool(series.extensor[k]),
                    fmt_bool(series.flexor[k]),
                    fmt_f64(series.psi_gain[k]),
                    fmt_f64(series.facilitation_extensor[k]),
                    fmt_f64(series.facilitation_flexor[k]),
                )
                .unwrap();
            }
        }
        out.push('\n');
    }
    std::fs::write(path, out)
}

fn bad_data(message: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, message.into())
}

/// Read a trace CSV written by [`write_trace_csv`].
pub fn read_trace_csv(path: &Path) -> io::Result<TrialTrace> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad_data("empty trace file"))?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.first() != Some(&"time_ms") {
        return Err(bad_data("first column must be time_ms"));
    }
    let joints = columns.iter().filter(|c| c.starts_with('q')).count();
    if joints == 0 {
        return Err(bad_data("no q columns found"));
    }
    let targets = columns.iter().filter(|c| c.starts_with("target")).count();
    if targets != joints {
        return Err(bad_data("target column count differs from q columns"));
    }
    let base = 1 + 2 * joints + 2;
    let has_diag = columns.len() > base;
    if has_diag && columns.len() != base + 10 * joints {
        return Err(bad_data("unexpected diagnostic column count"));
    }

    let parse_f = |field: &str, line_no: usize| -> io::Result<f64> {
        field
            .parse::<f64>()
            .map_err(|_| bad_data(format!("line {line_no}: bad float `{field}`")))
    };
    let parse_b = |field: &str, line_no: usize| -> io::Result<bool> {
        match field {
            "0" => Ok(false),
            "1" => Ok(true),
            _ => Err(bad_data(format!("line {line_no}: bad spike flag `{field}`"))),
        }
    };

    // dt is recovered from the first two samples below.
    let mut trace = TrialTrace::new(1.0, joints, false);
    trace.diagnostics = has_diag.then(|| vec![Default::default(); joints]);

    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let line_no = idx + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(bad_data(format!(
                "line {line_no}: {} fields, header has {}",
                fields.len(),
                columns.len()
            )));
        }
        trace.time_ms.push(parse_f(fields[0], line_no)?);
        for j in 0..joints {
            trace.q[j].push(parse_f(fields[1 + j], line_no)?);
            trace.targets[j].push(parse_f(fields[1 + joints + j], line_no)?);
        }
        trace.ee.push([
            parse_f(fields[base - 2], line_no)?,
            parse_f(fields[base - 1], line_no)?,
        ]);
        if let Some(diag) = &mut trace.diagnostics {
            for (j, series) in diag.iter_mut().enumerate() {
                let at = base + 10 * j;
                series.eppc_minus.push(parse_b(fields[at], line_no)?);
                series.eppc_plus.push(parse_b(fields[at + 1], line_no)?);
                series.dppc_neg.push(parse_b(fields[at + 2], line_no)?);
                series.dppc_pos.push(parse_b(fields[at + 3], line_no)?);
                series.psi.push(parse_b(fields[at + 4], line_no)?);
                series.extensor.push(parse_b(fields[at + 5], line_no)?);
                series.flexor.push(parse_b(fields[at + 6], line_no)?);
                series.psi_gain.push(parse_f(fields[at + 7], line_no)?);
                series
                    .facilitation_extensor
                    .push(parse_f(fields[at + 8], line_no)?);
                series
                    .facilitation_flexor
                    .push(parse_f(fields[at + 9], line_no)?);
            }
        }
    }

    if trace.time_ms.len() >= 2 {
        trace.dt_ms = trace.time_ms[1] - trace.time_ms[0];
    }
    trace.validate().map_err(bad_data)?;
    Ok(trace)
}

pub const SUMMARY_HEADER: &str = "label,signal,theta_initial,theta_target,settled,overshoot_pct,\
rise_time_ms,settling_time_ms,final_error,peak_speed,max_abs_jerk,mean_abs_jerk,bell_peaks,\
bell_symmetry";

fn opt_f64(value: Option<f64>) -> String {
    value.map(fmt_f64).unwrap_or_default()
}

pub fn summary_row_line(row: &SummaryRow) -> String {
    let settled = match row.settled {
        Some(true) => "1",
        Some(false) => "0",
        None => "",
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        row.label,
        row.signal,
        opt_f64(row.theta_initial),
        opt_f64(row.theta_target),
        settled,
        opt_f64(row.overshoot_pct),
        opt_f64(row.rise_time_ms),
        opt_f64(row.settling_time_ms),
        opt_f64(row.final_error),
        fmt_f64(row.peak_speed),
        fmt_f64(row.max_abs_jerk),
        fmt_f64(row.mean_abs_jerk),
        row.bell_peaks,
        fmt_f64(row.bell_symmetry),
    )
}

pub fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> io::Result<()> {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&summary_row_line(row));
        out.push('\n');
    }
    std::fs::write(path, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joint::{JointCommand, JointConfig};

    fn synthetic_trace(diagnostics: bool) -> TrialTrace {
        let cfg = JointConfig::reference(1.0);
        let mut block = crate::joint::JointBlockState::new(&cfg);
        let mut trace = TrialTrace::new(1.0, 1, diagnostics);
        let mut theta = 0.0f64;
        let quiet = JointCommand::quiescent(1.0, cfg.initial_facilitation);
        trace.push_sample(
            0.0,
            &[theta],
            &[0.7],
            [theta.cos(), theta.sin()],
            diagnostics.then_some(&[quiet][..]),
        );
        for k in 0..400 {
            let cmd = block.step(&cfg, theta, 0.7, 0.0);
            theta += cmd.delta;
            trace.push_sample(
                (k + 1) as f64,
                &[theta],
                &[0.7],
                [theta.cos(), theta.sin()],
                diagnostics.then_some(&[cmd][..]),
            );
        }
        trace
    }

    #[test]
    fn trace_round_trips_through_csv() {
        for diagnostics in [false, true] {
            let trace = synthetic_trace(diagnostics);
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("trace.csv");
            write_trace_csv(&path, &trace).unwrap();
            let back = read_trace_csv(&path).unwrap();
            assert_eq!(trace, back, "diagnostics={diagnostics}");
        }
    }

    #[test]
    fn trace_writes_are_byte_identical() {
        let trace = synthetic_trace(true);
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        write_trace_csv(&a, &trace).unwrap();
        write_trace_csv(&b, &trace).unwrap();
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    }

    #[test]
    fn malformed_traces_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "time_ms,q0,target0,ee_x,ee_y\n0,0,0,0\n").unwrap();
        assert!(read_trace_csv(&path).is_err());
        std::fs::write(&path, "q0,target0,ee_x,ee_y\n").unwrap();
        assert!(read_trace_csv(&path).is_err());
    }

    #[test]
    fn summary_header_matches_row_fields() {
        assert_eq!(
            SUMMARY_HEADER.split(',').count(),
            summary_row_line(&SummaryRow {
                label: "x".into(),
                signal: "0".into(),
                theta_initial: Some(0.0),
                theta_target: Some(1.0),
                settled: Some(true),
                overshoot_pct: Some(0.0),
                rise_time_ms: Some(1.0),
                settling_time_ms: Some(2.0),
                final_error: Some(0.01),
                peak_speed: 1.0,
                max_abs_jerk: 2.0,
                mean_abs_jerk: 0.5,
                bell_peaks: 1,
                bell_symmetry: 0.5,
            })
            .split(',')
            .count()
        );
    }
}
