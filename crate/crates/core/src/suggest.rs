//! Explains a failed plan: walks the shortest single-action path of the base
//! roadmap and reports which of its actions no team member can perform, and
//! what each agent would be missing.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::abstraction::{Depiction, StateAbstraction};
use crate::error::{Error, Result};
use crate::model::{ActionSpec, AgentSpec, Observation, Pose, ProportionalReach, Reachability};
use crate::planner::Planner;
use crate::roadmap::{NodeId, Roadmap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Diagnosis {
    /// The goal is reachable through observed transitions, but some of them
    /// need skills or reach the team lacks.
    MissingCapability,
    /// No sequence of observed transitions leads to the goal.
    RoadmapDisconnected,
}

/// Why one agent cannot perform one action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentGap {
    pub agent: String,
    pub missing_skills: Vec<String>,
    pub unreachable_poses: Vec<Pose>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockingAction {
    pub from: NodeId,
    pub to: NodeId,
    pub lsr_edge: usize,
    pub action: ActionSpec,
    pub gaps: Vec<AgentGap>,
    pub from_depiction: Depiction,
    pub to_depiction: Depiction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapabilityReport {
    pub diagnosis: Diagnosis,
    pub start: NodeId,
    /// `None` when the goal observation matches no roadmap node.
    pub goal: Option<NodeId>,
    /// Shortest single-action path, when one exists.
    pub lsr_path: Option<Vec<NodeId>>,
    /// Whether other shortest single-action paths exist besides `lsr_path`.
    pub alternatives: bool,
    pub blocking: Vec<BlockingAction>,
}

pub fn agent_gap<R: Reachability + ?Sized>(reach: &R, agent: &AgentSpec, action: &ActionSpec) -> AgentGap {
    AgentGap {
        agent: agent.id.clone(),
        missing_skills: action.skills.difference(&agent.skills).cloned().collect(),
        unreachable_poses: action
            .poses
            .iter()
            .filter(|p| reach.index(agent, p) <= 0.0)
            .cloned()
            .collect(),
    }
}

pub fn suggest(
    roadmap: &Roadmap,
    abstraction: &dyn StateAbstraction,
    start: &Observation,
    goal: &Observation,
) -> Result<CapabilityReport> {
    let planner = Planner::new(roadmap)?;
    let s = planner.locate(abstraction, start)?;
    match planner.locate(abstraction, goal) {
        Ok(g) => suggest_nodes(roadmap, abstraction, s, g),
        Err(Error::UnknownState(key)) => {
            log::info!("goal state {key} is not in the roadmap");
            Ok(CapabilityReport {
                diagnosis: Diagnosis::RoadmapDisconnected,
                start: s,
                goal: None,
                lsr_path: None,
                alternatives: false,
                blocking: Vec::new(),
            })
        }
        Err(e) => Err(e),
    }
}

/// Must only be called when the capability layer has no path from `start`
/// to `goal`.
pub fn suggest_nodes(
    roadmap: &Roadmap,
    abstraction: &dyn StateAbstraction,
    start: NodeId,
    goal: NodeId,
) -> Result<CapabilityReport> {
    let planner = Planner::new(roadmap)?;
    roadmap.node(start)?;
    roadmap.node(goal)?;
    if planner.connected(start, goal) {
        return Err(Error::Contract(format!(
            "the team can already plan from {start} to {goal}"
        )));
    }

    let Some((path, alternatives)) = lsr_shortest(roadmap, start, goal) else {
        return Ok(CapabilityReport {
            diagnosis: Diagnosis::RoadmapDisconnected,
            start,
            goal: Some(goal),
            lsr_path: None,
            alternatives: false,
            blocking: Vec::new(),
        });
    };

    let clsr = roadmap.clsr()?;
    let mut blocking = Vec::new();
    for w in path.windows(2) {
        let (a, b) = (w[0], w[1]);
        if clsr.iter().any(|e| e.from == a && e.to == b) {
            continue;
        }
        for (i, e) in roadmap.lsr_edges.iter().enumerate() {
            if e.from != a || e.to != b {
                continue;
            }
            blocking.push(BlockingAction {
                from: a,
                to: b,
                lsr_edge: i,
                action: e.action.clone(),
                gaps: roadmap
                    .agents
                    .iter()
                    .map(|ag| agent_gap(&ProportionalReach, ag, &e.action))
                    .collect(),
                from_depiction: roadmap.render(a, abstraction)?,
                to_depiction: roadmap.render(b, abstraction)?,
            });
        }
    }
    Ok(CapabilityReport {
        diagnosis: Diagnosis::MissingCapability,
        start,
        goal: Some(goal),
        lsr_path: Some(path),
        alternatives,
        blocking,
    })
}

/// Unit-weight shortest path over LSR edges. Neighbors are expanded in node
/// id order and the first discovery wins. Also reports whether the goal has
/// more than one shortest path.
fn lsr_shortest(roadmap: &Roadmap, start: NodeId, goal: NodeId) -> Option<(Vec<NodeId>, bool)> {
    let n = roadmap.nodes.len();
    let mut out = vec![Vec::new(); n];
    for e in &roadmap.lsr_edges {
        out[e.from.0].push(e.to.0);
    }
    for o in &mut out {
        o.sort_unstable();
        o.dedup();
    }
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut count = vec![0u8; n];
    dist[start.0] = 0;
    count[start.0] = 1;
    let mut queue = VecDeque::from([start.0]);
    while let Some(v) = queue.pop_front() {
        for &w in &out[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                parent[w] = v;
                count[w] = count[v];
                queue.push_back(w);
            } else if dist[w] == dist[v] + 1 {
                count[w] = count[w].saturating_add(count[v]).min(2);
            }
        }
    }
    if dist[goal.0] == usize::MAX {
        return None;
    }
    let mut path = vec![goal];
    let mut v = goal.0;
    while v != start.0 {
        v = parent[v];
        path.push(NodeId(v));
    }
    path.reverse();
    Some((path, count[goal.0] > 1))
}
