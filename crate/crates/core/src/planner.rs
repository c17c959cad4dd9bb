//! Minimum-cost planning over the capability layer.
//!
//! Edge costs are compared in fixed-point units of 1e-9 so plans that tie in
//! exact arithmetic tie here as well. Ties go to fewer steps, then to the
//! lexicographically smallest node sequence.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::abstraction::{euclidean, StateAbstraction};
use crate::error::{Error, Result};
use crate::model::{ActionSpec, Observation};
use crate::roadmap::{CapabilityEdge, Couple, EdgeSource, NodeId, Roadmap};

const COST_UNIT: f64 = 1e-9;

fn units(cost: f64) -> u64 {
    (cost / COST_UNIT).round() as u64
}

/// One step of a parallel plan: the couples that run concurrently between two
/// consecutive plan states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanStep {
    pub from: NodeId,
    pub to: NodeId,
    pub couples: Vec<Couple>,
    pub actions: Vec<ActionSpec>,
    pub cost: f64,
    pub source: EdgeSource,
}

/// A parallel visual action plan: `nodes.len() == steps.len() + 1` states and
/// one step between each consecutive pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelPlan {
    pub nodes: Vec<NodeId>,
    pub visual_plan: Vec<Observation>,
    pub steps: Vec<PlanStep>,
    pub total_cost: f64,
    /// Sum of each agent's workload over the actions assigned to it.
    pub per_agent_workload: BTreeMap<String, f64>,
    /// Number of actions assigned to each agent.
    pub per_agent_actions: BTreeMap<String, usize>,
}

impl ParallelPlan {
    /// Number of states in the plan, counting start and goal.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum PlanOutcome {
    Found(ParallelPlan),
    NoPath { start: NodeId, goal: NodeId },
}

impl PlanOutcome {
    pub fn plan(&self) -> Option<&ParallelPlan> {
        match self {
            PlanOutcome::Found(p) => Some(p),
            PlanOutcome::NoPath { .. } => None,
        }
    }
}

pub struct Planner<'a> {
    roadmap: &'a Roadmap,
    /// Per node, the cheapest capability edge to each successor.
    out: Vec<Vec<(usize, usize)>>,
    /// When set, observations without an exact node match snap to the nearest
    /// representative within this feature distance.
    pub epsilon: Option<f64>,
}

impl<'a> Planner<'a> {
    pub fn new(roadmap: &'a Roadmap) -> Result<Self> {
        let edges = roadmap.clsr()?;
        let mut best: HashMap<(NodeId, NodeId), usize> = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            best.entry((e.from, e.to))
                .and_modify(|j| {
                    if units(e.cost) < units(edges[*j].cost) {
                        *j = i;
                    }
                })
                .or_insert(i);
        }
        let mut out = vec![Vec::new(); roadmap.nodes.len()];
        for ((from, to), i) in best {
            out[from.0].push((to.0, i));
        }
        for o in &mut out {
            o.sort_unstable();
        }
        Ok(Planner {
            roadmap,
            out,
            epsilon: None,
        })
    }

    pub fn with_epsilon(mut self, epsilon: Option<f64>) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn roadmap(&self) -> &Roadmap {
        self.roadmap
    }

    /// Maps an observation to its roadmap node.
    pub fn locate(&self, abstraction: &dyn StateAbstraction, obs: &Observation) -> Result<NodeId> {
        let key = abstraction.encode(obs)?;
        if let Some(n) = self.roadmap.node_by_key(&key) {
            return Ok(n);
        }
        if let (Some(eps), Some(f)) = (self.epsilon, abstraction.features(obs)) {
            let nearest = self
                .roadmap
                .nodes
                .iter()
                .filter_map(|n| {
                    let g = abstraction.features(&n.representative)?;
                    (g.len() == f.len()).then(|| (euclidean(&f, &g), n.id))
                })
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            if let Some((d, n)) = nearest.filter(|(d, _)| *d <= eps) {
                log::debug!("snapped observation to {n} at distance {d}");
                return Ok(n);
            }
        }
        Err(Error::UnknownState(key.0))
    }

    pub fn plan(
        &self,
        abstraction: &dyn StateAbstraction,
        start: &Observation,
        goal: &Observation,
    ) -> Result<PlanOutcome> {
        let s = self.locate(abstraction, start)?;
        let g = self.locate(abstraction, goal)?;
        self.plan_nodes(s, g)
    }

    pub fn plan_nodes(&self, start: NodeId, goal: NodeId) -> Result<PlanOutcome> {
        self.roadmap.node(start)?;
        self.roadmap.node(goal)?;
        match self.shortest(start.0, goal.0) {
            None => Ok(PlanOutcome::NoPath { start, goal }),
            Some(path) => self.assemble(&path).map(PlanOutcome::Found),
        }
    }

    /// Whether any capability path joins the two nodes.
    pub fn connected(&self, start: NodeId, goal: NodeId) -> bool {
        self.shortest(start.0, goal.0).is_some()
    }

    fn shortest(&self, s: usize, g: usize) -> Option<Vec<usize>> {
        let edges = self.roadmap.clsr_edges.as_deref().unwrap_or_default();
        type Label = (u64, usize, Vec<usize>);
        let mut best: Vec<Option<Label>> = vec![None; self.out.len()];
        let mut heap = BinaryHeap::new();
        best[s] = Some((0, 0, vec![s]));
        heap.push(Reverse((0u64, 0usize, vec![s])));
        while let Some(Reverse(label)) = heap.pop() {
            let v = *label.2.last().expect("labels hold a path");
            if best[v].as_ref() != Some(&label) {
                continue;
            }
            if v == g {
                return Some(label.2);
            }
            let (cost, hops, path) = label;
            for &(w, e) in &self.out[v] {
                let mut p = path.clone();
                p.push(w);
                let next = (cost + units(edges[e].cost), hops + 1, p);
                if best[w].as_ref().is_none_or(|b| next < *b) {
                    best[w] = Some(next.clone());
                    heap.push(Reverse(next));
                }
            }
        }
        None
    }

    fn assemble(&self, path: &[usize]) -> Result<ParallelPlan> {
        let edges = self.roadmap.clsr()?;
        let mut steps = Vec::with_capacity(path.len().saturating_sub(1));
        let mut per_agent_workload: BTreeMap<String, f64> =
            self.roadmap.agents.iter().map(|a| (a.id.clone(), 0.0)).collect();
        let mut per_agent_actions: BTreeMap<String, usize> =
            self.roadmap.agents.iter().map(|a| (a.id.clone(), 0)).collect();
        for w in path.windows(2) {
            let &(_, e) = self.out[w[0]]
                .iter()
                .find(|(t, _)| *t == w[1])
                .expect("path follows planner edges");
            let edge: &CapabilityEdge = &edges[e];
            let actions = self.roadmap.source_actions(edge.source)?;
            for c in &edge.couples {
                let agent = self
                    .roadmap
                    .agent(&c.agent)
                    .ok_or_else(|| Error::UnknownAgent(c.agent.clone()))?;
                let class = &actions[c.action].workload_class;
                *per_agent_workload.entry(c.agent.clone()).or_default() += agent.workload(class);
                *per_agent_actions.entry(c.agent.clone()).or_default() += 1;
            }
            steps.push(PlanStep {
                from: edge.from,
                to: edge.to,
                couples: edge.couples.clone(),
                actions: actions.to_vec(),
                cost: edge.cost,
                source: edge.source,
            });
        }
        let nodes: Vec<NodeId> = path.iter().map(|&i| NodeId(i)).collect();
        let visual_plan = nodes
            .iter()
            .map(|&n| self.roadmap.node(n).map(|n| n.representative.clone()))
            .collect::<Result<_>>()?;
        Ok(ParallelPlan {
            nodes,
            visual_plan,
            total_cost: steps.iter().map(|s| s.cost).sum(),
            steps,
            per_agent_workload,
            per_agent_actions,
        })
    }
}
