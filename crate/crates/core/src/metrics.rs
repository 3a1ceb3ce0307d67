//! Accuracy and smoothness metrics over trial traces.
//!
//! Derivatives are taken by central differences (one-sided at the ends),
//! with an optional moving-average smoothing pass after each
//! differentiation stage. Smoothing is off by default; comparisons between
//! controllers should apply the same window to every trace.

use thiserror::Error;

use crate::trace::TrialTrace;

/// Which signal a metric runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalSource {
    Joint(usize),
    EndEffector,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("trace never enters and stays inside the settling band")]
    NotSettled,
    #[error("target equals the initial angle; step metrics are undefined")]
    ZeroStep,
    #[error("trace is too short for this metric")]
    TooShort,
    #[error("joint index out of range")]
    BadJoint,
}

/// Step-response quality for one joint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMetrics {
    /// Worst excursion past the target, as a percentage of the step size
    /// (0 when the trajectory never crosses the target).
    pub overshoot_pct: f64,
    /// Time between the 10% and 90% crossings of the step.
    pub rise_time_ms: f64,
    /// Time from motion onset until the trace enters the +-20% band and
    /// never leaves it again.
    pub settling_time_ms: f64,
}

/// Step metrics for `trace.q[joint]`, treating `theta_0 -> theta_target`
/// as the commanded step.
///
/// Timing is onset-relative: the clock starts at the last sample still at
/// `theta_0` before the first deviation, so identical responses measure
/// identically regardless of how long the trace idles first.
pub fn step_metrics(
    trace: &TrialTrace,
    joint: usize,
    theta_0: f64,
    theta_target: f64,
) -> Result<StepMetrics, MetricsError> {
    let q = trace.q.get(joint).ok_or(MetricsError::BadJoint)?;
    let t = &trace.time_ms;
    if q.len() < 2 {
        return Err(MetricsError::TooShort);
    }
    let step = theta_target - theta_0;
    if step == 0.0 {
        return Err(MetricsError::ZeroStep);
    }
    let sign = step.signum();

    let onset_idx = match q.iter().position(|&x| x != theta_0) {
        Some(0) | None => 0,
        Some(first_dev) => first_dev - 1,
    };
    let onset_time = t[onset_idx];

    let worst = q
        .iter()
        .map(|&x| sign * (x - theta_target))
        .fold(f64::NEG_INFINITY, f64::max);
    let overshoot_pct = worst.max(0.0) / step.abs() * 100.0;

    let crossing = |fraction: f64| -> Option<f64> {
        let level = theta_0 + fraction * step;
        q.iter()
            .position(|&x| sign * (x - level) >= 0.0)
            .map(|i| t[i])
    };
    let t10 = crossing(0.1).ok_or(MetricsError::NotSettled)?;
    let t90 = crossing(0.9).ok_or(MetricsError::NotSettled)?;

    let band = 0.2 * step.abs();
    let settled_idx = match q.iter().rposition(|&x| (x - theta_target).abs() > band) {
        None => 0,
        Some(i) if i + 1 < q.len() => i + 1,
        Some(_) => return Err(MetricsError::NotSettled),
    };

    Ok(StepMetrics {
        overshoot_pct,
        rise_time_ms: t90 - t10,
        settling_time_ms: t[settled_idx] - onset_time,
    })
}

/// Centered moving average with edge-clamped windows. `window` of 0 or 1 is
/// the identity; even windows round up to the next odd width.
pub fn moving_average(series: &[f64], window: usize) -> Vec<f64> {
    if window <= 1 || series.is_empty() {
        return series.to_vec();
    }
    let half = window / 2; // odd width 2*half+1
    let n = series.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            series[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

/// Central-difference derivative, one-sided at the endpoints.
pub fn differentiate(series: &[f64], dt_s: f64) -> Vec<f64> {
    let n = series.len();
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|i| {
                if i == 0 {
                    (series[1] - series[0]) / dt_s
                } else if i == n - 1 {
                    (series[n - 1] - series[n - 2]) / dt_s
                } else {
                    (series[i + 1] - series[i - 1]) / (2.0 * dt_s)
                }
            })
            .collect(),
    }
}

/// Speed series for the chosen signal: |dq/dt| for a joint, Cartesian
/// speed for the end effector. `smoothing_window` = 0 disables smoothing.
pub fn speed_series(trace: &TrialTrace, source: SignalSource, smoothing_window: usize) -> Vec<f64> {
    let dt_s = trace.dt_ms / 1000.0;
    let speed = match source {
        SignalSource::Joint(j) => differentiate(&trace.q[j], dt_s)
            .into_iter()
            .map(f64::abs)
            .collect::<Vec<_>>(),
        SignalSource::EndEffector => {
            let xs: Vec<f64> = trace.ee.iter().map(|p| p[0]).collect();
            let ys: Vec<f64> = trace.ee.iter().map(|p| p[1]).collect();
            let vx = differentiate(&xs, dt_s);
            let vy = differentiate(&ys, dt_s);
            vx.iter().zip(&vy).map(|(x, y)| x.hypot(*y)).collect()
        }
    };
    moving_average(&speed, smoothing_window)
}

/// Speed, acceleration, and jerk of the chosen signal, each smoothed (when
/// a window is given) before the next differentiation.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionProfile {
    pub speed: Vec<f64>,
    pub acceleration: Vec<f64>,
    pub jerk: Vec<f64>,
}

pub fn motion_profile(
    trace: &TrialTrace,
    source: SignalSource,
    smoothing_window: usize,
) -> MotionProfile {
    let dt_s = trace.dt_ms / 1000.0;
    let speed = speed_series(trace, source, smoothing_window);
    let acceleration = moving_average(&differentiate(&speed, dt_s), smoothing_window);
    let jerk = moving_average(&differentiate(&acceleration, dt_s), smoothing_window);
    MotionProfile {
        speed,
        acceleration,
        jerk,
    }
}

/// Jerk summary statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct JerkProfile {
    pub series: Vec<f64>,
    pub max_abs: f64,
    pub mean_abs: f64,
}

pub fn jerk_profile(trace: &TrialTrace, source: SignalSource, smoothing_window: usize) -> JerkProfile {
    let jerk = motion_profile(trace, source, smoothing_window).jerk;
    let max_abs = jerk.iter().fold(0.0f64, |m, &j| m.max(j.abs()));
    let mean_abs = if jerk.is_empty() {
        0.0
    } else {
        jerk.iter().map(|j| j.abs()).sum::<f64>() / jerk.len() as f64
    };
    JerkProfile {
        series: jerk,
        max_abs,
        mean_abs,
    }
}

/// Shape summary of a speed profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellShape {
    /// Local maxima whose topographic prominence exceeds 10% of the peak.
    pub peak_count: usize,
    /// Position of the peak within the movement window: 0.5 is a perfectly
    /// centered bell, small values are front-loaded profiles. The window
    /// runs from the first to the last sample at or above 10% of peak
    /// speed, the usual onset/offset criterion for discrete movements.
    pub symmetry_ratio: f64,
}

const PEAK_PROMINENCE_FRACTION: f64 = 0.10;
const SUPPORT_FRACTION: f64 = 0.10;

pub fn bell_shape_score(speed: &[f64]) -> BellShape {
    let n = speed.len();
    let vmax = speed.iter().fold(0.0f64, |m, &v| m.max(v));
    if n < 3 || vmax <= 0.0 {
        return BellShape {
            peak_count: 0,
            symmetry_ratio: 0.5,
        };
    }

    // Candidate peaks: strictly above the left neighbor, at least as high
    // as the right one (so a flat plateau counts once, at its left edge).
    let mut peak_count = 0;
    for i in 1..n - 1 {
        if !(speed[i] > speed[i - 1] && speed[i] >= speed[i + 1]) {
            continue;
        }
        if prominence(speed, i) >= PEAK_PROMINENCE_FRACTION * vmax {
            peak_count += 1;
        }
    }

    let support_level = SUPPORT_FRACTION * vmax;
    let first = speed.iter().position(|&v| v >= support_level).unwrap_or(0);
    let last = speed.iter().rposition(|&v| v >= support_level).unwrap_or(n - 1);
    let peak_idx = speed
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite speeds"))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let symmetry_ratio = if last > first {
        (peak_idx.saturating_sub(first)) as f64 / (last - first) as f64
    } else {
        0.5
    };

    BellShape {
        peak_count,
        symmetry_ratio,
    }
}

/// Topographic prominence of the local maximum at `i`: height above the
/// higher of the two lowest saddles separating it from taller terrain (or
/// from the series edge when nothing taller exists on that side).
fn prominence(series: &[f64], i: usize) -> f64 {
    let peak = series[i];
    let mut left_min = peak;
    let mut j = i;
    while j > 0 {
        j -= 1;
        left_min = left_min.min(series[j]);
        if series[j] > peak {
            break;
        }
    }
    let mut right_min = peak;
    let mut j = i;
    while j + 1 < series.len() {
        j += 1;
        right_min = right_min.min(series[j]);
        if series[j] > peak {
            break;
        }
    }
    peak - left_min.max(right_min)
}
