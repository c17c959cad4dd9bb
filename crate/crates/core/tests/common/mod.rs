#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use itertools::Itertools;

use clsr_core::clsr::{build_clsr, ClsrConfig};
use clsr_core::dataset::{generate, Dataset};
use clsr_core::domains::{self, RuleDomain, SymbolicState};
use clsr_core::pipeline::{build_parallel, BuildConfig, BuildReport};
use clsr_core::{AgentSpec, NodeId, Roadmap};

pub const BURGER_TUPLES: usize = 5000;
pub const BURGER_FRACTION: f64 = 0.58;
pub const BOX_TUPLES: usize = 900;
pub const BOX_FRACTION: f64 = 0.54;
pub const SEED: u64 = 1;

pub fn burger_dataset() -> Dataset {
    generate(&domains::burger(), BURGER_TUPLES, BURGER_FRACTION, SEED).unwrap()
}

pub fn box_dataset() -> Dataset {
    generate(&domains::box_packing(), BOX_TUPLES, BOX_FRACTION, SEED).unwrap()
}

pub fn burger_roadmap() -> (RuleDomain, Roadmap, BuildReport) {
    let dom = domains::burger();
    let (r, rep) = build_parallel(&burger_dataset(), &dom, &BuildConfig::default()).unwrap();
    (dom, r, rep)
}

pub fn box_roadmap() -> (RuleDomain, Roadmap, BuildReport) {
    let dom = domains::box_packing();
    let (r, rep) = build_parallel(&box_dataset(), &dom, &BuildConfig::default()).unwrap();
    (dom, r, rep)
}

pub fn team(agents: &[AgentSpec], ids: &[&str]) -> Vec<AgentSpec> {
    ids.iter()
        .map(|id| agents.iter().find(|a| a.id == *id).unwrap().clone())
        .collect()
}

pub fn with_team(roadmap: &Roadmap, agents: &[AgentSpec]) -> Roadmap {
    let mut r = roadmap.clone();
    build_clsr(&mut r, agents, &ClsrConfig::default()).unwrap();
    r
}

pub fn state_of(dom: &RuleDomain, roadmap: &Roadmap, n: NodeId) -> SymbolicState {
    dom.parse_state(&roadmap.node(n).unwrap().representative.state).unwrap()
}

pub fn node_of(roadmap: &Roadmap, s: &SymbolicState) -> NodeId {
    roadmap.node_by_key(&s.key()).expect("state is in the roadmap")
}

/// Applies `labels` in every order. Returns the common final state when every
/// order is applicable and all orders agree.
pub fn replay_all_orders(dom: &RuleDomain, start: &SymbolicState, labels: &[&str]) -> Option<SymbolicState> {
    let mut common: Option<SymbolicState> = None;
    for order in labels.iter().permutations(labels.len()) {
        let mut s = start.clone();
        for l in order {
            s = dom.step(&s, l)?;
        }
        match &common {
            None => common = Some(s),
            Some(c) if *c != s => return None,
            Some(_) => {}
        }
    }
    common
}

/// Reachable states and (state, label, state) transitions by plain BFS over
/// the action catalog, written independently of the library's enumerator.
pub fn brute_force(dom: &RuleDomain) -> (BTreeSet<SymbolicState>, BTreeSet<(SymbolicState, String, SymbolicState)>) {
    let labels: Vec<String> = dom.catalog().map(|a| a.label.clone()).collect();
    let mut seen: BTreeSet<SymbolicState> = dom.initial_states.iter().cloned().collect();
    let mut edges = BTreeSet::new();
    let mut queue: VecDeque<SymbolicState> = seen.iter().cloned().collect();
    while let Some(s) = queue.pop_front() {
        for l in &labels {
            if let Some(t) = dom.step(&s, l) {
                if t != s {
                    edges.insert((s.clone(), l.clone(), t.clone()));
                }
                if seen.insert(t.clone()) {
                    queue.push_back(t);
                }
            }
        }
    }
    (seen, edges)
}
