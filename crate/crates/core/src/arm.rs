//! Multi-joint composition and leading/subordinate coordination.
//!
//! Motor spikes of a leading joint are fanned out to the motor pair of each
//! subordinate joint with a one-tick delay. The default edge is inhibitory:
//! while a leading joint is actively moving, its subordinates are held back,
//! which staggers multi-joint reaches instead of letting every joint slew
//! at once.

use thiserror::Error;

use crate::joint::{JointBlockState, JointCommand, JointConfig};
use crate::neuron::InvalidParam;

/// Which motor spikes of the leading joint drive an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpikeSource {
    Extensor,
    Flexor,
    /// Either motor neuron contributes (the default).
    Both,
}

/// Edge polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Excitatory,
    Inhibitory,
}

impl EdgeKind {
    fn sign(self) -> f64 {
        match self {
            EdgeKind::Excitatory => 1.0,
            EdgeKind::Inhibitory => -1.0,
        }
    }
}

/// One leading -> subordinate coordination connection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordinationEdge {
    pub leading: usize,
    pub subordinate: usize,
    /// Magnitude of the drive delivered per leading motor spike.
    pub weight: f64,
    pub kind: EdgeKind,
    pub source: SpikeSource,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TopologyError {
    #[error("coordination edge references joint {index} but the arm has {joints} joints")]
    JointOutOfRange { index: usize, joints: usize },
    #[error("coordination edge {leading}->{subordinate} links a joint to itself")]
    SelfLoop { leading: usize, subordinate: usize },
    #[error("coordination graph contains a cycle")]
    Cycle,
}

/// Validated acyclic set of coordination edges over `joints` joints.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinationGraph {
    joints: usize,
    edges: Vec<CoordinationEdge>,
}

impl CoordinationGraph {
    /// No coordination: every joint runs independently.
    pub fn independent(joints: usize) -> Self {
        Self {
            joints,
            edges: Vec::new(),
        }
    }

    /// Build from explicit edges, rejecting out-of-range indices, self
    /// loops, and cycles (checked with Kahn's algorithm).
    pub fn new(joints: usize, edges: Vec<CoordinationEdge>) -> Result<Self, TopologyError> {
        for e in &edges {
            for index in [e.leading, e.subordinate] {
                if index >= joints {
                    return Err(TopologyError::JointOutOfRange { index, joints });
                }
            }
            if e.leading == e.subordinate {
                return Err(TopologyError::SelfLoop {
                    leading: e.leading,
                    subordinate: e.subordinate,
                });
            }
        }

        let mut indegree = vec![0usize; joints];
        for e in &edges {
            indegree[e.subordinate] += 1;
        }
        let mut ready: Vec<usize> = (0..joints).filter(|&j| indegree[j] == 0).collect();
        let mut visited = 0;
        while let Some(j) = ready.pop() {
            visited += 1;
            for e in edges.iter().filter(|e| e.leading == j) {
                indegree[e.subordinate] -= 1;
                if indegree[e.subordinate] == 0 {
                    ready.push(e.subordinate);
                }
            }
        }
        if visited != joints {
            return Err(TopologyError::Cycle);
        }

        Ok(Self { joints, edges })
    }

    /// Two-joint arm: shoulder leads the elbow.
    pub fn reacher2(weight: f64, kind: EdgeKind, source: SpikeSource) -> Self {
        let edges = vec![CoordinationEdge {
            leading: 0,
            subordinate: 1,
            weight,
            kind,
            source,
        }];
        Self::new(2, edges).expect("static topology is acyclic")
    }

    /// Six-joint arm: joints 0 and 1 lead, joints 2..=5 are subordinate to
    /// both, and joint 0 additionally leads joint 1.
    pub fn jaco6(weight: f64, kind: EdgeKind, source: SpikeSource) -> Self {
        let mut edges = Vec::new();
        for leading in [0usize, 1] {
            for subordinate in 2..6 {
                edges.push(CoordinationEdge {
                    leading,
                    subordinate,
                    weight,
                    kind,
                    source,
                });
            }
        }
        edges.push(CoordinationEdge {
            leading: 0,
            subordinate: 1,
            weight,
            kind,
            source,
        });
        Self::new(6, edges).expect("static topology is acyclic")
    }

    pub fn joints(&self) -> usize {
        self.joints
    }

    pub fn edges(&self) -> &[CoordinationEdge] {
        &self.edges
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArmError {
    #[error("expected {expected} joints, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("graph covers {graph} joints but {configs} joint configs were given")]
    GraphMismatch { graph: usize, configs: usize },
    #[error(transparent)]
    InvalidConfig(#[from] InvalidParam),
}

/// Output of one arm tick.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmStepOutput {
    /// Per-joint angle commands for this tick.
    pub deltas: Vec<f64>,
    pub commands: Vec<JointCommand>,
}

/// A bank of joint blocks plus the coordination graph between them.
#[derive(Debug, Clone)]
pub struct ArmController {
    configs: Vec<JointConfig>,
    states: Vec<JointBlockState>,
    graph: CoordinationGraph,
    /// Motor spikes from the previous tick, (extensor, flexor) per joint.
    last_motor_spikes: Vec<(bool, bool)>,
}

impl ArmController {
    pub fn new(configs: Vec<JointConfig>, graph: CoordinationGraph) -> Result<Self, ArmError> {
        if graph.joints() != configs.len() {
            return Err(ArmError::GraphMismatch {
                graph: graph.joints(),
                configs: configs.len(),
            });
        }
        for cfg in &configs {
            cfg.validate()?;
        }
        let states = configs.iter().map(JointBlockState::new).collect();
        let last_motor_spikes = vec![(false, false); configs.len()];
        Ok(Self {
            configs,
            states,
            graph,
            last_motor_spikes,
        })
    }

    /// Same config for every joint.
    pub fn uniform(
        cfg: JointConfig,
        joints: usize,
        graph: CoordinationGraph,
    ) -> Result<Self, ArmError> {
        Self::new(vec![cfg; joints], graph)
    }

    pub fn joints(&self) -> usize {
        self.configs.len()
    }

    pub fn configs(&self) -> &[JointConfig] {
        &self.configs
    }

    /// Advance every joint one tick against the measured angles and
    /// per-joint targets. Coordination drive seen this tick comes from the
    /// previous tick's leading-joint motor spikes.
    pub fn step(&mut self, thetas: &[f64], targets: &[f64]) -> Result<ArmStepOutput, ArmError> {
        let n = self.configs.len();
        if thetas.len() != n {
            return Err(ArmError::DimensionMismatch {
                expected: n,
                got: thetas.len(),
            });
        }
        if targets.len() != n {
            return Err(ArmError::DimensionMismatch {
                expected: n,
                got: targets.len(),
            });
        }

        let mut coordination = vec![0.0f64; n];
        for e in self.graph.edges() {
            let (ext, flex) = self.last_motor_spikes[e.leading];
            let count = match e.source {
                SpikeSource::Extensor => u32::from(ext),
                SpikeSource::Flexor => u32::from(flex),
                SpikeSource::Both => u32::from(ext) + u32::from(flex),
            };
            coordination[e.subordinate] += e.kind.sign() * e.weight * f64::from(count);
        }

        let mut deltas = Vec::with_capacity(n);
        let mut commands = Vec::with_capacity(n);
        for j in 0..n {
            let cmd = self.states[j].step(&self.configs[j], thetas[j], targets[j], coordination[j]);
            self.last_motor_spikes[j] = (cmd.extensor_spike, cmd.flexor_spike);
            deltas.push(cmd.delta);
            commands.push(cmd);
        }

        Ok(ArmStepOutput { deltas, commands })
    }
}
