//! Target schedules: timed joint-space goal postures.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::plant::{ik_two_link, Elbow, PlantError};

/// A goal posture that becomes active at `time_ms`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduledTarget {
    pub time_ms: f64,
    pub angles: Vec<f64>,
}

/// Seeded random reach schedule for a two-link arm.
///
/// Goals are drawn uniformly by area from the annulus sector given by
/// `radius_range` and `angle_range` (workspace coordinates), converted to
/// joint space with the chosen elbow branch, and spaced `interval_ms`
/// apart starting at t=0. The same seed always yields the same schedule.
pub fn random_goal_schedule(
    seed: u64,
    count: usize,
    interval_ms: f64,
    radius_range: [f64; 2],
    angle_range: [f64; 2],
    elbow: Elbow,
    link_lengths: [f64; 2],
) -> Result<Vec<ScheduledTarget>, PlantError> {
    let [r_lo, r_hi] = radius_range;
    let inner = (link_lengths[0] - link_lengths[1]).abs();
    let outer = link_lengths[0] + link_lengths[1];
    if !(r_lo <= r_hi) || r_lo < inner || r_hi > outer {
        return Err(PlantError::InvalidParam(
            "radius_range must lie inside the reachable annulus",
        ));
    }
    if !(angle_range[0] <= angle_range[1]) {
        return Err(PlantError::InvalidParam("angle_range must be ordered"));
    }
    if !(interval_ms > 0.0) {
        return Err(PlantError::InvalidParam("interval_ms must be > 0"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut schedule = Vec::with_capacity(count);
    for k in 0..count {
        // Uniform by area over the annulus: r = sqrt(u*(hi^2-lo^2)+lo^2).
        let u: f64 = rng.gen();
        let radius = (u * (r_hi * r_hi - r_lo * r_lo) + r_lo * r_lo).sqrt();
        let phi = if angle_range[1] > angle_range[0] {
            rng.gen_range(angle_range[0]..angle_range[1])
        } else {
            angle_range[0]
        };
        let target = [radius * phi.cos(), radius * phi.sin()];
        let angles = ik_two_link(target, link_lengths, elbow)?;
        schedule.push(ScheduledTarget {
            time_ms: k as f64 * interval_ms,
            angles: angles.to_vec(),
        });
    }
    Ok(schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::forward_kinematics;

    #[test]
    fn same_seed_same_schedule() {
        let make = |seed| {
            random_goal_schedule(
                seed,
                6,
                2500.0,
                [0.3, 0.9],
                [-1.2, 1.2],
                Elbow::Down,
                [0.5, 0.5],
            )
            .unwrap()
        };
        assert_eq!(make(42), make(42));
        assert_ne!(make(42), make(43));
    }

    #[test]
    fn goals_are_reachable_and_evenly_spaced() {
        let schedule = random_goal_schedule(
            7,
            10,
            1500.0,
            [0.25, 0.95],
            [-std::f64::consts::PI, std::f64::consts::PI],
            Elbow::Down,
            [0.5, 0.5],
        )
        .unwrap();
        for (k, goal) in schedule.iter().enumerate() {
            assert_eq!(goal.time_ms, k as f64 * 1500.0);
            let ee = forward_kinematics(&goal.angles, &[0.5, 0.5]).unwrap();
            let radius = ee[0].hypot(ee[1]);
            assert!((0.25..=0.95).contains(&radius), "radius {radius}");
            // Elbow-down branch keeps q2 non-negative.
            assert!(goal.angles[1] >= 0.0);
        }
    }

    #[test]
    fn radius_outside_the_annulus_is_rejected() {
        let err = random_goal_schedule(0, 1, 1000.0, [0.0, 1.2], [0.0, 1.0], Elbow::Down, [0.5, 0.5]);
        assert!(err.is_err());
        let err = random_goal_schedule(0, 1, 1000.0, [0.1, 0.9], [0.0, 1.0], Elbow::Down, [0.7, 0.3]);
        assert!(err.is_err(), "inner disk of unequal links");
    }
}
