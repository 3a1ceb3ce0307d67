//! Torque-driven planar two-link dynamics.
//!
//! Standard manipulator form `M(q) qdd + C(q, qd) qd + G(q) + B qd = tau`
//! with the centers of mass at mid-link, integrated with semi-implicit
//! Euler (velocity first, then position), which keeps the undamped system
//! energy-bounded at the 1 kHz ticks used here.

use serde::{Deserialize, Serialize};

use super::{ArmState, PlantError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLinkParams {
    /// Link lengths in meters.
    pub link_lengths: [f64; 2],
    /// Link masses in kilograms.
    pub link_masses: [f64; 2],
    /// Rotational inertia of each link about its own joint axis.
    pub link_inertias: [f64; 2],
    /// Viscous friction per joint, N·m·s/rad.
    pub joint_damping: [f64; 2],
    /// Gravitational acceleration in the arm plane (0 for a tabletop arm).
    pub gravity: f64,
    /// Integration step in seconds.
    pub dt_s: f64,
}

impl TwoLinkParams {
    /// Uniform-rod links: inertia about the joint is m*l^2/3.
    pub fn uniform_rods(
        link_lengths: [f64; 2],
        link_masses: [f64; 2],
        joint_damping: [f64; 2],
        dt_s: f64,
    ) -> Self {
        let inertia = |m: f64, l: f64| m * l * l / 3.0;
        Self {
            link_lengths,
            link_masses,
            link_inertias: [
                inertia(link_masses[0], link_lengths[0]),
                inertia(link_masses[1], link_lengths[1]),
            ],
            joint_damping,
            gravity: 0.0,
            dt_s,
        }
    }

    /// Desk-scale default: 0.5 m / 1 kg uniform-rod links on a frictional
    /// tabletop (no gravity in the plane), 1 ms steps. The damping is
    /// geared-actuator heavy on purpose — it puts the velocity time
    /// constant near a quarter second so a one-radian reach neither
    /// plateaus nor coasts far past its target.
    pub fn desk() -> Self {
        Self::uniform_rods([0.5, 0.5], [1.0, 1.0], [3.0, 3.0], 0.001)
    }

    pub fn validate(&self) -> Result<(), PlantError> {
        for l in self.link_lengths {
            if !(l > 0.0) {
                return Err(PlantError::InvalidParam("link lengths must be > 0"));
            }
        }
        for m in self.link_masses {
            if !(m > 0.0) {
                return Err(PlantError::InvalidParam("link masses must be > 0"));
            }
        }
        for b in self.joint_damping {
            if !(b >= 0.0) {
                return Err(PlantError::InvalidParam("joint damping must be >= 0"));
            }
        }
        if !(self.dt_s > 0.0) {
            return Err(PlantError::InvalidParam("dt_s must be > 0"));
        }
        if !self.gravity.is_finite() {
            return Err(PlantError::InvalidParam("gravity must be finite"));
        }
        // Centers of mass sit at mid-link, so the inertia about the joint
        // can be no less than the point-mass bound m*(l/2)^2.
        for i in 0..2 {
            let r = self.link_lengths[i] / 2.0;
            if self.link_inertias[i] < self.link_masses[i] * r * r {
                return Err(PlantError::InvalidParam(
                    "link inertia below the mid-link point-mass bound",
                ));
            }
        }
        Ok(())
    }

    /// Joint-space accelerations for the given state and torques.
    pub fn accelerations(&self, q: [f64; 2], qdot: [f64; 2], tau: [f64; 2]) -> [f64; 2] {
        let [l1, l2] = self.link_lengths;
        let [m1, m2] = self.link_masses;
        let (r1, r2) = (l1 / 2.0, l2 / 2.0);
        // Inertias about each link's center of mass.
        let ic1 = self.link_inertias[0] - m1 * r1 * r1;
        let ic2 = self.link_inertias[1] - m2 * r2 * r2;

        let c2 = q[1].cos();
        let s2 = q[1].sin();

        let m11 = ic1 + m1 * r1 * r1 + ic2 + m2 * (l1 * l1 + r2 * r2 + 2.0 * l1 * r2 * c2);
        let m12 = ic2 + m2 * (r2 * r2 + l1 * r2 * c2);
        let m22 = ic2 + m2 * r2 * r2;

        let h = m2 * l1 * r2 * s2;
        let coriolis = [
            -h * qdot[1] * (2.0 * qdot[0] + qdot[1]),
            h * qdot[0] * qdot[0],
        ];

        let g = self.gravity;
        let gravity = [
            g * ((m1 * r1 + m2 * l1) * q[0].cos() + m2 * r2 * (q[0] + q[1]).cos()),
            g * (m2 * r2 * (q[0] + q[1]).cos()),
        ];

        let rhs = [
            tau[0] - coriolis[0] - gravity[0] - self.joint_damping[0] * qdot[0],
            tau[1] - coriolis[1] - gravity[1] - self.joint_damping[1] * qdot[1],
        ];

        let det = m11 * m22 - m12 * m12;
        [
            (m22 * rhs[0] - m12 * rhs[1]) / det,
            (m11 * rhs[1] - m12 * rhs[0]) / det,
        ]
    }

    /// Kinetic energy, for conservation checks.
    pub fn kinetic_energy(&self, q: [f64; 2], qdot: [f64; 2]) -> f64 {
        // Reuse the mass matrix via accelerations of unit torques? Cheaper
        // to just rebuild the three entries here.
        let [l1, l2] = self.link_lengths;
        let [m1, m2] = self.link_masses;
        let (r1, r2) = (l1 / 2.0, l2 / 2.0);
        let ic1 = self.link_inertias[0] - m1 * r1 * r1;
        let ic2 = self.link_inertias[1] - m2 * r2 * r2;
        let c2 = q[1].cos();
        let m11 = ic1 + m1 * r1 * r1 + ic2 + m2 * (l1 * l1 + r2 * r2 + 2.0 * l1 * r2 * c2);
        let m12 = ic2 + m2 * (r2 * r2 + l1 * r2 * c2);
        let m22 = ic2 + m2 * r2 * r2;
        0.5 * (m11 * qdot[0] * qdot[0] + 2.0 * m12 * qdot[0] * qdot[1] + m22 * qdot[1] * qdot[1])
    }
}

/// Advance the two-link arm one step under the given joint torques.
pub fn two_link_step(
    state: &ArmState,
    torques: [f64; 2],
    params: &TwoLinkParams,
) -> Result<ArmState, PlantError> {
    if state.joints() != 2 {
        return Err(PlantError::DimensionMismatch {
            expected: 2,
            got: state.joints(),
        });
    }
    let q = [state.q[0], state.q[1]];
    let qdot = [state.qdot[0], state.qdot[1]];
    let qdd = params.accelerations(q, qdot, torques);

    let dt = params.dt_s;
    let qdot_next = [qdot[0] + dt * qdd[0], qdot[1] + dt * qdd[1]];
    let q_next = [q[0] + dt * qdot_next[0], q[1] + dt * qdot_next[1]];

    let next = ArmState {
        q: q_next.to_vec(),
        qdot: qdot_next.to_vec(),
    };
    if !next.is_finite() {
        return Err(PlantError::NonFinite);
    }
    Ok(next)
}

/// Per-joint torque magnitudes matched to the controller's angle increment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorqueCalibration {
    /// Torque that displaces the joint by the calibrated increment when
    /// held for one actuation period from rest.
    pub nominal_torques: [f64; 2],
    pub delta_theta: f64,
    pub period_steps: usize,
}

/// Find, per joint, the torque that — applied for `period_steps` steps from
/// rest in `posture` and then released — displaces that joint by
/// `delta_theta` radians once the arm has coasted back to rest. Measuring
/// after the coast matters: the controller emits short torque pulses, and
/// most of a pulse's displacement happens on stored momentum after the
/// pulse ends. Solved by doubling to bracket, then bisecting (total
/// displacement is monotone in the applied torque).
pub fn calibrate_torque_increment(
    params: &TwoLinkParams,
    posture: [f64; 2],
    delta_theta: f64,
    period_steps: usize,
) -> Result<TorqueCalibration, PlantError> {
    params.validate()?;
    if !(delta_theta > 0.0) {
        return Err(PlantError::InvalidParam("delta_theta must be > 0"));
    }
    if period_steps == 0 {
        return Err(PlantError::InvalidParam("period_steps must be >= 1"));
    }
    if params.joint_damping.iter().any(|&b| b <= 0.0) {
        return Err(PlantError::CalibrationFailed(
            "calibration needs positive joint damping for the arm to coast to rest".to_string(),
        ));
    }

    let displacement = |joint: usize, tau: f64| -> Result<f64, PlantError> {
        let mut state = ArmState::at_rest(posture.to_vec());
        let mut torques = [0.0, 0.0];
        torques[joint] = tau;
        for _ in 0..period_steps {
            state = two_link_step(&state, torques, params)?;
        }
        let mut coasted = 0usize;
        while state.qdot.iter().any(|v| v.abs() > 1e-9) {
            state = two_link_step(&state, [0.0, 0.0], params)?;
            coasted += 1;
            if coasted > 2_000_000 {
                return Err(PlantError::CalibrationFailed(
                    "arm did not coast to rest within 2e6 steps".to_string(),
                ));
            }
        }
        Ok(state.q[joint] - posture[joint])
    };

    let mut nominal = [0.0, 0.0];
    for joint in 0..2 {
        let mut hi = 1e-9;
        let mut lo = 0.0;
        let mut found = false;
        for _ in 0..200 {
            let d = displacement(joint, hi)?;
            if d >= delta_theta {
                found = true;
                break;
            }
            lo = hi;
            hi *= 2.0;
        }
        if !found {
            return Err(PlantError::CalibrationFailed(format!(
                "joint {joint}: no torque up to {hi:.3e} reaches {delta_theta} rad in {period_steps} steps"
            )));
        }
        // Bisect to 0.1% of the target displacement.
        let mut mid = hi;
        for _ in 0..200 {
            mid = 0.5 * (lo + hi);
            let d = displacement(joint, mid)?;
            if (d - delta_theta).abs() <= 1e-3 * delta_theta {
                break;
            }
            if d < delta_theta {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let check = displacement(joint, mid)?;
        if (check - delta_theta).abs() > 1e-2 * delta_theta {
            return Err(PlantError::CalibrationFailed(format!(
                "joint {joint}: bisection stalled at {check:.3e} rad vs target {delta_theta:.3e}"
            )));
        }
        nominal[joint] = mid;
    }

    Ok(TorqueCalibration {
        nominal_torques: nominal,
        delta_theta,
        period_steps,
    })
}
