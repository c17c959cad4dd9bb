//! Shared domain types: poses, actions, agents, observations and dataset tuples,
//! plus the capability predicate every layer of the roadmap relies on.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Position = [f64; 3];

pub fn distance(a: &Position, b: &Position) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// A relevant pose of an action. The role names what the pose is for within the
/// action ("pick", "place", "tool") and is what pose lists are matched on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub role: String,
    pub position: Position,
}

impl Pose {
    pub fn new(role: impl Into<String>, position: Position) -> Self {
        Pose {
            role: role.into(),
            position,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.role.is_empty() {
            return Err(Error::Invalid("pose role is empty".into()));
        }
        if self.position.iter().any(|c| !c.is_finite()) {
            return Err(Error::Invalid(format!(
                "pose {:?} has non-finite coordinates",
                self.role
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionSpec {
    pub label: String,
    pub skills: BTreeSet<String>,
    #[serde(default)]
    pub poses: Vec<Pose>,
    pub workload_class: String,
}

impl ActionSpec {
    pub fn new<S: Into<String>>(
        label: impl Into<String>,
        skills: impl IntoIterator<Item = S>,
        poses: Vec<Pose>,
        workload_class: impl Into<String>,
    ) -> Self {
        ActionSpec {
            label: label.into(),
            skills: skills.into_iter().map(Into::into).collect(),
            poses,
            workload_class: workload_class.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.label.is_empty() {
            return Err(Error::Invalid("action label is empty".into()));
        }
        for pose in &self.poses {
            pose.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub id: String,
    pub skills: BTreeSet<String>,
    pub base: Position,
    pub max_reach: f64,
    #[serde(default)]
    pub workloads: BTreeMap<String, f64>,
    #[serde(default = "default_workload")]
    pub default_workload: f64,
}

fn default_workload() -> f64 {
    1.0
}

impl AgentSpec {
    pub fn new<S: Into<String>>(
        id: impl Into<String>,
        skills: impl IntoIterator<Item = S>,
        base: Position,
        max_reach: f64,
        default_workload: f64,
    ) -> Self {
        AgentSpec {
            id: id.into(),
            skills: skills.into_iter().map(Into::into).collect(),
            base,
            max_reach,
            workloads: BTreeMap::new(),
            default_workload,
        }
    }

    /// Normalized workload for an action of the given class, falling back to the
    /// agent default when the class has no entry.
    pub fn workload(&self, class: &str) -> f64 {
        self.workloads
            .get(class)
            .copied()
            .unwrap_or(self.default_workload)
    }

    pub fn has_skills(&self, action: &ActionSpec) -> bool {
        action.skills.is_subset(&self.skills)
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::Invalid("agent id is empty".into()));
        }
        if !(self.max_reach > 0.0 && self.max_reach.is_finite()) {
            return Err(Error::Invalid(format!(
                "agent {}: max_reach must be positive, got {}",
                self.id, self.max_reach
            )));
        }
        if self.base.iter().any(|c| !c.is_finite()) {
            return Err(Error::Invalid(format!("agent {}: non-finite base", self.id)));
        }
        let in_unit = |w: f64| (0.0..=1.0).contains(&w);
        if !in_unit(self.default_workload) || !self.workloads.values().all(|w| in_unit(*w)) {
            return Err(Error::Invalid(format!(
                "agent {}: workloads must lie in [0, 1]",
                self.id
            )));
        }
        Ok(())
    }
}

/// Checks each agent and that ids are unique within the set.
pub fn validate_agents(agents: &[AgentSpec]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for agent in agents {
        agent.validate()?;
        if !seen.insert(agent.id.as_str()) {
            return Err(Error::Invalid(format!("duplicate agent id {:?}", agent.id)));
        }
    }
    Ok(())
}

/// Reads a JSON array of agents and validates it.
pub fn load_agents(path: impl AsRef<std::path::Path>) -> Result<Vec<AgentSpec>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let agents: Vec<AgentSpec> = serde_json::from_str(&text)?;
    validate_agents(&agents)?;
    Ok(agents)
}

/// A recorded observation: the task-relevant state payload, opaque to everything
/// but the owning domain, and task-irrelevant nuisance fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub state: Value,
    #[serde(default)]
    pub nuisance: BTreeMap<String, Value>,
}

impl Observation {
    pub fn new(state: Value) -> Self {
        Observation {
            state,
            nuisance: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionTuple {
    pub obs_a: Observation,
    pub obs_b: Observation,
    pub b: u8,
    pub action: Option<ActionSpec>,
}

impl TransitionTuple {
    pub fn with_action(obs_a: Observation, obs_b: Observation, action: ActionSpec) -> Self {
        TransitionTuple {
            obs_a,
            obs_b,
            b: 1,
            action: Some(action),
        }
    }

    pub fn no_action(obs_a: Observation, obs_b: Observation) -> Self {
        TransitionTuple {
            obs_a,
            obs_b,
            b: 0,
            action: None,
        }
    }

    pub fn is_action(&self) -> bool {
        self.b == 1
    }

    pub fn validate(&self) -> Result<()> {
        match (self.b, &self.action) {
            (0, None) => Ok(()),
            (0, Some(_)) => Err(Error::Invalid(
                "b = 0 but an action is present".into(),
            )),
            (1, Some(action)) => action.validate(),
            (1, None) => Err(Error::Invalid("b = 1 but no action is present".into())),
            (b, _) => Err(Error::Invalid(format!("b must be 0 or 1, got {b}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub mu: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        CostWeights {
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
            mu: 1.0,
        }
    }
}

impl CostWeights {
    pub fn validate(&self) -> Result<()> {
        let all = [self.alpha, self.beta, self.gamma, self.mu];
        if all.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Invalid(format!(
                "cost weights must be finite and nonnegative: {self:?}"
            )));
        }
        Ok(())
    }
}

impl std::str::FromStr for CostWeights {
    type Err = Error;

    /// Parses `alpha,beta,gamma,mu`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Invalid(format!("weight {p:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        let [alpha, beta, gamma, mu] = parts[..] else {
            return Err(Error::Invalid(format!(
                "expected four comma-separated weights, got {s:?}"
            )));
        };
        let weights = CostWeights {
            alpha,
            beta,
            gamma,
            mu,
        };
        weights.validate()?;
        Ok(weights)
    }
}

/// Scores how easily an agent operates at a pose: 1 is effortless, 0 is out of reach.
pub trait Reachability: Send + Sync {
    fn index(&self, agent: &AgentSpec, pose: &Pose) -> f64;
}

/// Linear falloff with Euclidean distance from the agent base, normalized by the
/// agent's maximum reach and clamped at zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct ProportionalReach;

impl Reachability for ProportionalReach {
    fn index(&self, agent: &AgentSpec, pose: &Pose) -> f64 {
        let d = distance(&pose.position, &agent.base);
        (1.0 - d / agent.max_reach).clamp(0.0, 1.0)
    }
}

pub fn reachability(agent: &AgentSpec, pose: &Pose) -> f64 {
    ProportionalReach.index(agent, pose)
}

pub fn is_capable(agent: &AgentSpec, action: &ActionSpec) -> bool {
    is_capable_with(&ProportionalReach, agent, action)
}

pub fn is_capable_with<R: Reachability + ?Sized>(
    reach: &R,
    agent: &AgentSpec,
    action: &ActionSpec,
) -> bool {
    agent.has_skills(action) && action.poses.iter().all(|x| reach.index(agent, x) > 0.0)
}
