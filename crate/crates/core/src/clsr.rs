//! Team-specific capability layer: each edge of the parallel edge set that the
//! team can execute becomes a C-LSR edge with its optimal assignment and cost.

use serde::{Deserialize, Serialize};

use crate::assignment::{self, Infeasible};
use crate::error::{Error, Result};
use crate::model::{
    validate_agents, ActionSpec, AgentSpec, CostWeights, ProportionalReach, Reachability,
};
use crate::par;
use crate::roadmap::{CapabilityEdge, Couple, Roadmap};

/// Cost of agent `agent` executing `action`: weighted mean reach difficulty
/// over the action's poses plus weighted workload, or infinity when the agent
/// lacks a skill or cannot reach a pose.
pub fn compute_cost(agent: &AgentSpec, action: &ActionSpec, weights: &CostWeights) -> f64 {
    compute_cost_with(&ProportionalReach, agent, action, weights)
}

pub fn compute_cost_with<R: Reachability + ?Sized>(
    reach: &R,
    agent: &AgentSpec,
    action: &ActionSpec,
    weights: &CostWeights,
) -> f64 {
    if !agent.has_skills(action) {
        return f64::INFINITY;
    }
    let mut difficulty = 0.0;
    for pose in &action.poses {
        let r = reach.index(agent, pose);
        if r <= 0.0 {
            return f64::INFINITY;
        }
        difficulty += 1.0 - r;
    }
    if !action.poses.is_empty() {
        difficulty /= action.poses.len() as f64;
    }
    weights.alpha * difficulty + weights.beta * agent.workload(&action.workload_class)
}

/// `[action][agent]` cost matrix.
pub fn cost_matrix<R: Reachability + ?Sized>(
    reach: &R,
    actions: &[ActionSpec],
    agents: &[&AgentSpec],
    weights: &CostWeights,
) -> Vec<Vec<f64>> {
    actions
        .iter()
        .map(|u| {
            agents
                .iter()
                .map(|a| compute_cost_with(reach, a, u, weights))
                .collect()
        })
        .collect()
}

/// Edge cost from the optimal assignment total; the second term rewards
/// edges that run more actions at once.
pub fn edge_cost(assignment_cost: f64, n_actions: usize, weights: &CostWeights) -> f64 {
    weights.gamma * assignment_cost + weights.mu / n_actions as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClsrConfig {
    pub weights: CostWeights,
    pub parallel: bool,
}

impl Default for ClsrConfig {
    fn default() -> Self {
        ClsrConfig {
            weights: CostWeights::default(),
            parallel: par::AVAILABLE,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClsrReport {
    pub candidate_edges: usize,
    pub feasible_edges: usize,
    pub too_few_agents: usize,
    pub no_capable_assignment: usize,
}

/// Fills the C-LSR layer of `roadmap` for `agents`. Requires the P-LSR layer.
pub fn build_clsr(roadmap: &mut Roadmap, agents: &[AgentSpec], config: &ClsrConfig) -> Result<ClsrReport> {
    build_clsr_with(roadmap, agents, config, &ProportionalReach)
}

pub fn build_clsr_with<R: Reachability + ?Sized>(
    roadmap: &mut Roadmap,
    agents: &[AgentSpec],
    config: &ClsrConfig,
    reach: &R,
) -> Result<ClsrReport> {
    config.weights.validate()?;
    validate_agents(agents)?;
    if agents.is_empty() {
        log::warn!("empty agent set: the capability layer will have no edges");
    }
    let mut team: Vec<&AgentSpec> = agents.iter().collect();
    team.sort_by(|a, b| a.id.cmp(&b.id));

    let edges = roadmap.par_edges()?;
    let results = par::map(&edges, config.parallel, |e| {
        let costs = cost_matrix(reach, e.actions, &team, &config.weights);
        assignment::solve(&costs).map(|sol| CapabilityEdge {
            from: e.from,
            to: e.to,
            couples: sol
                .agent_of
                .iter()
                .enumerate()
                .map(|(i, &j)| Couple {
                    agent: team[j].id.clone(),
                    action: i,
                    label: e.actions[i].label.clone(),
                })
                .collect(),
            cost: edge_cost(sol.total_cost, e.actions.len(), &config.weights),
            assignment_cost: sol.total_cost,
            source: e.source,
        })
    });

    let mut report = ClsrReport {
        candidate_edges: edges.len(),
        ..ClsrReport::default()
    };
    let mut out = Vec::new();
    for r in results {
        match r {
            Ok(e) => out.push(e),
            Err(Infeasible::TooFewAgents { .. }) => report.too_few_agents += 1,
            Err(Infeasible::NoFiniteAssignment) => report.no_capable_assignment += 1,
        }
    }
    report.feasible_edges = out.len();
    log::info!(
        "c-lsr: {} of {} edges executable by {} agents",
        report.feasible_edges,
        report.candidate_edges,
        agents.len()
    );
    roadmap.clsr_edges = Some(out);
    roadmap.agents = team.into_iter().cloned().collect();
    roadmap.weights = Some(config.weights);
    Ok(report)
}

/// Each couple of `edge` paired with the action it assigns.
pub fn couple_actions<'a>(
    roadmap: &'a Roadmap,
    edge: &'a CapabilityEdge,
) -> Result<Vec<(&'a Couple, &'a ActionSpec)>> {
    let actions = roadmap.source_actions(edge.source)?;
    edge.couples
        .iter()
        .map(|c| {
            actions
                .get(c.action)
                .map(|a| (c, a))
                .ok_or_else(|| Error::Invalid(format!("edge {} has no action {}", edge.source, c.action)))
        })
        .collect()
}
