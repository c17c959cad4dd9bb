mod common;

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use clsr_core::abstraction::{cluster, CanonicalJson, ClusterConfig, StateAbstraction};
use clsr_core::dataset::{generate, Dataset};
use clsr_core::domains::{self, RuleDomain};
use clsr_core::lsr::{build_lsr, Equivalence};
use clsr_core::pipeline::{build_parallel, BuildConfig};
use clsr_core::plsr::{build_plsr, PlsrConfig};
use clsr_core::{Error, Observation, TransitionTuple};

use common::*;

const TWO_OBJECTS: &str = r#"{
  "name": "two-objects",
  "initial_states": [{"a": {"at": "spot"}, "b": {"at": "spot"}}],
  "stations": {"a_spot": [-0.5, 0, 0], "b_spot": [0.5, 0, 0], "a_goal": [-0.2, 0.4, 0], "b_goal": [0.2, 0.4, 0]},
  "actions": [
    {"label": "move-a", "skills": ["grip"], "workload_class": "pp",
     "poses": [{"role": "pick", "position": [-0.5, 0, 0]}, {"role": "place", "position": [-0.2, 0.4, 0]}],
     "pre": [{"object": "a", "attr": "at", "eq": "spot"}],
     "effects": [{"object": "a", "attr": "at", "value": "goal"}]},
    {"label": "move-b", "skills": ["grip"], "workload_class": "pp",
     "poses": [{"role": "pick", "position": [0.5, 0, 0]}, {"role": "place", "position": [0.2, 0.4, 0]}],
     "pre": [{"object": "b", "attr": "at", "eq": "spot"}],
     "effects": [{"object": "b", "attr": "at", "value": "goal"}]}
  ]
}"#;

#[test]
fn two_object_diamond_yields_one_verified_parallel_edge() {
    let dom = RuleDomain::from_json(TWO_OBJECTS).unwrap();
    let d = generate(&dom, 200, 0.6, 3).unwrap();
    let (r, _) = build_parallel(&d, &dom, &BuildConfig::default()).unwrap();
    assert_eq!(r.nodes.len(), 4);
    assert_eq!(r.lsr_edges.len(), 4);
    let p = r.plsr().unwrap();
    assert_eq!(p.len(), 1);
    let from = state_of(&dom, &r, p[0].from);
    let to = state_of(&dom, &r, p[0].to);
    let labels: Vec<&str> = p[0].actions.iter().map(|a| a.label.as_str()).collect();
    assert_eq!(labels, ["move-a", "move-b"]);
    assert_eq!(replay_all_orders(&dom, &from, &labels), Some(to));
    assert_eq!(from, dom.initial_states[0]);
}

#[test]
fn single_tuple_datasets() {
    let obs = |v: i64| Observation::new(serde_json::json!({ "v": v }));
    let still = Dataset::new(vec![TransitionTuple::no_action(obs(1), obs(1))]);
    let c = cluster(&still, &CanonicalJson, &ClusterConfig::default()).unwrap();
    assert_eq!(c.len(), 1);
    assert_eq!(c.render(c.assignments[0].0, &CanonicalJson).unwrap().state, obs(1).state);
    let empty = Dataset::default();
    assert!(matches!(
        cluster(&empty, &CanonicalJson, &ClusterConfig::default()),
        Err(Error::EmptyDataset)
    ));
}

#[test]
fn clustering_is_sound_on_generated_datasets() {
    for (dom, d) in [(domains::burger(), burger_dataset()), (domains::box_packing(), box_dataset())] {
        let c = cluster(&d, &dom, &ClusterConfig::default()).unwrap();
        assert_eq!(c.report.violations(), 0);
        let (states, transitions) = brute_force(&dom);
        assert_eq!(c.len(), states.len(), "{}", dom.name);
        // Every action tuple crosses nodes.
        for (t, (a, b)) in d.tuples.iter().zip(&c.assignments) {
            assert_eq!(t.is_action(), a != b);
        }
        let lsr = build_lsr(&c, &d, &Equivalence::default()).unwrap();
        assert_eq!(lsr.lsr_edges.len(), transitions.len(), "{}", dom.name);
    }
}

#[test]
fn lsr_edges_are_the_domain_transitions() {
    let (dom, r, _) = burger_roadmap();
    let (_, transitions) = brute_force(&dom);
    let got: BTreeSet<_> = r
        .lsr_edges
        .iter()
        .map(|e| (state_of(&dom, &r, e.from), e.action.label.clone(), state_of(&dom, &r, e.to)))
        .collect();
    assert_eq!(got, transitions);
    for e in &r.lsr_edges {
        // Merged recordings stay close to the catalog pose.
        let catalog = &dom.action(&e.action.label).unwrap().spec;
        assert!(Equivalence::new(0.01).holds(&e.action, catalog));
        assert!(e.max_deviation < 0.05);
    }
}

#[test]
fn nuisance_does_not_change_keys() {
    let dom = domains::burger();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s = domains::burger::initial_state();
    let a = dom.observe(&s, &mut rng);
    let b = dom.observe(&s, &mut rng);
    assert_ne!(a.nuisance, b.nuisance);
    assert_eq!(dom.encode(&a).unwrap(), dom.encode(&b).unwrap());
    assert_eq!(CanonicalJson.encode(&a).unwrap(), dom.encode(&a).unwrap());
}

#[test]
fn parallel_edges_pass_the_all_orders_replay() {
    for (dom, r, _) in [burger_roadmap(), box_roadmap()] {
        let p = r.plsr().unwrap();
        assert!(!p.is_empty());
        for e in p {
            let labels: Vec<&str> = e.actions.iter().map(|a| a.label.as_str()).collect();
            let from = state_of(&dom, &r, e.from);
            let to = state_of(&dom, &r, e.to);
            assert_eq!(replay_all_orders(&dom, &from, &labels), Some(to), "{} {labels:?}", dom.name);
            assert!(e.actions.len() >= 2);
            for path in &e.provenance {
                assert_eq!(path.len(), e.actions.len() + 1);
                assert_eq!((path[0], *path.last().unwrap()), (e.from, e.to));
            }
        }
    }
}

#[test]
fn burger_parallelism_peaks_at_four() {
    let (_, r, rep) = burger_roadmap();
    assert_eq!(rep.max_parallel, 4);
    assert!(r.plsr().unwrap().iter().all(|e| e.actions.len() <= 4));
}

#[test]
fn plsr_ignores_lsr_edge_order() {
    let (_, base, _) = box_roadmap();
    let reference = base.plsr().unwrap().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..3 {
        let mut r = base.clone();
        r.lsr_edges.shuffle(&mut rng);
        build_plsr(&mut r, &PlsrConfig::default()).unwrap();
        assert_eq!(r.plsr().unwrap(), reference.as_slice());
    }
}

#[test]
fn parallel_and_sequential_builds_agree() {
    let dom = domains::burger();
    let d = burger_dataset();
    let par = BuildConfig::default();
    let seq = BuildConfig {
        parallel: false,
        ..par
    };
    let (a, _) = build_parallel(&d, &dom, &par).unwrap();
    let (b, _) = build_parallel(&d, &dom, &seq).unwrap();
    assert_eq!(a, b);
}

#[test]
fn roadmap_json_round_trips() {
    let (_, r, _) = box_roadmap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("roadmap.json");
    r.save(&path).unwrap();
    assert_eq!(clsr_core::Roadmap::load(&path).unwrap(), r);
}
