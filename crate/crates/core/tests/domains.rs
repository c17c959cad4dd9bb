mod common;

use std::collections::BTreeSet;

use itertools::Itertools;

use clsr_core::abstraction::StateAbstraction;
use clsr_core::clsr::compute_cost;
use clsr_core::domains::{self, boxpack, burger};
use clsr_core::model::is_capable;
use clsr_core::plsr::actions_at_node;
use clsr_core::CostWeights;

use common::*;

// Regression constants, cross-checked against the brute-force enumeration below.
const BURGER_STATES: usize = 155;
const BURGER_TRANSITIONS: usize = 385;
const BOX_STATES: usize = 17;
const BOX_TRANSITIONS: usize = 33;

#[test]
fn reachable_counts_match_brute_force() {
    for (dom, states, transitions) in [
        (domains::burger(), BURGER_STATES, BURGER_TRANSITIONS),
        (domains::box_packing(), BOX_STATES, BOX_TRANSITIONS),
    ] {
        let (s, t) = brute_force(&dom);
        assert_eq!((s.len(), t.len()), (states, transitions), "{}", dom.name);
        let (ls, lt) = dom.transitions();
        assert_eq!(ls.len(), states);
        assert_eq!(lt.len(), transitions);
    }
}

#[test]
fn box_counts_by_hand() {
    // Every subset of the four items can be in the box, plus the closed box.
    // Each subset S has 4 - |S| insertions; closing adds one more edge.
    let subsets = 1 << 4;
    let insertions: usize = (0..=4usize).map(|k| (4 - k) * binomial(4, k)).sum();
    assert_eq!(subsets + 1, BOX_STATES);
    assert_eq!(insertions + 1, BOX_TRANSITIONS);
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn burger_rules() {
    let dom = domains::burger();
    let mut s = burger::initial_state();
    assert!(dom.step(&s, "grill-patty").is_none());
    s = dom.step(&s, "pp-patty-to-pan").unwrap();
    let grilled = dom.step(&s, "grill-patty").unwrap();
    assert_eq!(grilled.get("patty", "cooked"), Some("yes"));
    for l in 1..=4 {
        let top = format!("pp-bun_top-to-plate-l{l}");
        assert!(dom.step(&burger::initial_state(), &top).is_none());
    }
}

#[test]
fn full_burger_takes_eleven_actions() {
    let dom = domains::burger();
    let (states, transitions) = dom.transitions();
    let goal = burger::full_burger();
    let start = burger::initial_state();
    // BFS depth of the goal.
    let mut depth = std::collections::HashMap::from([(start.clone(), 0usize)]);
    let mut frontier = vec![start];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for s in frontier {
            let d = depth[&s];
            for t in transitions.iter().filter(|t| states[t.from] == s) {
                let to = states[t.to].clone();
                if !depth.contains_key(&to) {
                    depth.insert(to.clone(), d + 1);
                    next.push(to);
                }
            }
        }
        frontier = next;
    }
    assert_eq!(depth[&goal], 11);
}

#[test]
fn at_most_four_actions_commute_anywhere() {
    // Largest set of distinct feasible actions that pass the all-orders replay,
    // over every reachable burger state.
    let dom = domains::burger();
    let mut best = 0;
    for s in dom.reachable_states() {
        let labels: Vec<String> = dom
            .feasible_actions(&s)
            .iter()
            .map(|a| a.spec.label.clone())
            .collect();
        for k in (best + 1)..=labels.len().min(6) {
            let found = labels.iter().combinations(k).any(|c| {
                let c: Vec<&str> = c.iter().map(|l| l.as_str()).collect();
                replay_all_orders(&dom, &s, &c).is_some()
            });
            if found {
                best = k;
            } else {
                break;
            }
        }
    }
    assert_eq!(best, 4);
}

#[test]
fn start_node_actions_match_the_oracle() {
    let (dom, roadmap, _) = burger_roadmap();
    let start = burger::initial_state();
    let n = node_of(&roadmap, &start);
    let got: BTreeSet<String> = actions_at_node(&roadmap, n)
        .unwrap()
        .iter()
        .map(|a| a.label.clone())
        .collect();
    let want: BTreeSet<String> = dom
        .feasible_actions(&start)
        .iter()
        .map(|a| a.spec.label.clone())
        .collect();
    assert_eq!(got, want);
}

#[test]
fn every_state_renders_and_round_trips() {
    for dom in [domains::burger(), domains::box_packing()] {
        for s in dom.reachable_states() {
            let d = dom.render_state(&s);
            assert!(d.svg.as_deref().is_some_and(|svg| svg.starts_with("<svg")));
            let obs = clsr_core::Observation::new(d.state);
            assert_eq!(dom.encode(&obs).unwrap(), s.key());
        }
    }
}

#[test]
fn default_agents() {
    let agents = domains::default_agents(domains::BURGER).unwrap();
    let r1 = agents.iter().find(|a| a.id == "r1").unwrap();
    assert_eq!(r1.workload("anything"), 0.5);
    let r2 = agents.iter().find(|a| a.id == "r2").unwrap();
    assert_eq!(r2.workload("slice"), 0.3);
    for h in ["h1", "h2"] {
        let h = agents.iter().find(|a| a.id == h).unwrap();
        for skill in [burger::GRIPPING, burger::CUTTING, burger::GRILLING] {
            assert!(h.skills.contains(skill));
        }
        assert_eq!(h.workload("grill"), 1.0);
    }
    // Humans can do every burger action; robots everything but grilling.
    let dom = domains::burger();
    for a in dom.catalog() {
        for ag in &agents {
            let robot = ag.id.starts_with('r');
            let grill = a.skills.contains(burger::GRILLING);
            assert_eq!(is_capable(ag, a), !(robot && grill), "{} {}", ag.id, a.label);
        }
    }
}

#[test]
fn box_arms_reach_their_two_closest_items() {
    let dom = domains::box_packing();
    let agents = domains::default_agents(domains::BOX_PACKING).unwrap();
    let capable = |id: &str, label: &str| {
        let ag = agents.iter().find(|a| a.id == id).unwrap();
        is_capable(ag, &dom.action(label).unwrap().spec)
    };
    for (arm, items) in [("b1", ["mandarin", "granola"]), ("b2", ["chocolate", "juice"])] {
        for item in boxpack::ITEMS {
            assert_eq!(
                capable(arm, &format!("move-{item}-into-box")),
                items.contains(&item),
                "{arm} {item}"
            );
        }
        assert!(!capable(arm, "close-cover"));
    }
    for item in boxpack::ITEMS {
        assert!(!capable("h1", &format!("move-{item}-into-box")));
    }
    assert!(capable("h1", "close-cover"));
    let omni = boxpack::omnipotent_agent();
    assert!(dom.catalog().all(|a| is_capable(&omni, a)));
    let b1 = &agents[0];
    assert_eq!(b1.workload("any"), 0.5);
    assert!(compute_cost(b1, &dom.action("close-cover").unwrap().spec, &CostWeights::default()).is_infinite());
}

#[test]
fn omnipotent_box_plan_needs_five_actions() {
    let dom = domains::box_packing();
    let (_, edges) = brute_force(&dom);
    // Every path from the initial state to the closed box uses each insertion
    // once and the cover last.
    let goal = boxpack::packed_and_closed();
    let into_goal: Vec<_> = edges.iter().filter(|(_, _, t)| *t == goal).collect();
    assert_eq!(into_goal.len(), 1);
    assert_eq!(into_goal[0].1, "close-cover");
}
