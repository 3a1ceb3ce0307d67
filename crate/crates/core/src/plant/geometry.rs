//! Planar forward and inverse kinematics.

use super::PlantError;

/// Elbow branch for the two-link inverse kinematics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elbow {
    Up,
    Down,
}

/// End-effector position of a planar serial chain with the given joint
/// angles (each relative to the previous link) and link lengths.
pub fn forward_kinematics(q: &[f64], lengths: &[f64]) -> Result<[f64; 2], PlantError> {
    if q.len() != lengths.len() {
        return Err(PlantError::DimensionMismatch {
            expected: lengths.len(),
            got: q.len(),
        });
    }
    let mut angle = 0.0;
    let mut x = 0.0;
    let mut y = 0.0;
    for (theta, l) in q.iter().zip(lengths) {
        angle += theta;
        x += l * angle.cos();
        y += l * angle.sin();
    }
    Ok([x, y])
}

/// Closed-form two-link inverse kinematics via the law of cosines.
///
/// `Elbow::Down` takes the positive-`q2` branch. Targets outside the
/// reachable annulus `[|l1 - l2|, l1 + l2]` are an error; a 1e-9 slack
/// absorbs round-off at the boundary.
pub fn ik_two_link(target: [f64; 2], lengths: [f64; 2], elbow: Elbow) -> Result<[f64; 2], PlantError> {
    let [x, y] = target;
    let [l1, l2] = lengths;
    let d2 = x * x + y * y;
    let cos_q2 = (d2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
    if cos_q2.abs() > 1.0 + 1e-9 {
        return Err(PlantError::Unreachable { x, y });
    }
    let q2 = match elbow {
        Elbow::Down => cos_q2.clamp(-1.0, 1.0).acos(),
        Elbow::Up => -cos_q2.clamp(-1.0, 1.0).acos(),
    };
    let q1 = y.atan2(x) - (l2 * q2.sin()).atan2(l1 + l2 * q2.cos());
    Ok([q1, q2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn straight_and_folded_postures() {
        let ee = forward_kinematics(&[0.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((ee[0] - 1.0).abs() < 1e-12 && ee[1].abs() < 1e-12);

        let ee = forward_kinematics(&[PI / 2.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!(ee[0].abs() < 1e-12 && (ee[1] - 1.0).abs() < 1e-12);

        let ee = forward_kinematics(&[0.0, PI], &[0.5, 0.5]).unwrap();
        assert!(ee[0].abs() < 1e-12 && ee[1].abs() < 1e-12);
    }

    #[test]
    fn fk_handles_longer_chains() {
        // Four links of 0.25 m zig-zagging by +-90 degrees.
        let ee = forward_kinematics(&[0.0, PI / 2.0, -PI / 2.0, PI / 2.0], &[0.25; 4]).unwrap();
        assert!((ee[0] - 0.5).abs() < 1e-12);
        assert!((ee[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ik_elbow_down_reference_target() {
        let q = ik_two_link([1.0, 1.0], [1.0, 1.0], Elbow::Down).unwrap();
        assert!(q[0].abs() < 1e-12);
        assert!((q[1] - PI / 2.0).abs() < 1e-12);

        let up = ik_two_link([1.0, 1.0], [1.0, 1.0], Elbow::Up).unwrap();
        assert!((up[0] - PI / 2.0).abs() < 1e-12);
        assert!((up[1] + PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn unreachable_targets_error() {
        assert!(matches!(
            ik_two_link([2.1, 0.0], [1.0, 1.0], Elbow::Down),
            Err(PlantError::Unreachable { .. })
        ));
        // Inside the inner annulus boundary of unequal links.
        assert!(matches!(
            ik_two_link([0.1, 0.0], [1.0, 0.5], Elbow::Down),
            Err(PlantError::Unreachable { .. })
        ));
    }

    proptest! {
        #[test]
        fn ik_fk_round_trip(
            radius in 0.15..0.95f64,
            angle in -PI..PI,
            elbow_down in any::<bool>(),
        ) {
            let lengths = [0.5, 0.5];
            let target = [radius * angle.cos(), radius * angle.sin()];
            let elbow = if elbow_down { Elbow::Down } else { Elbow::Up };
            let q = ik_two_link(target, lengths, elbow).unwrap();
            let ee = forward_kinematics(&q, &lengths).unwrap();
            prop_assert!((ee[0] - target[0]).abs() < 1e-9);
            prop_assert!((ee[1] - target[1]).abs() < 1e-9);
        }
    }
}
