//! Base roadmap construction: one edge per observed (state, action, state)
//! transition, merging tuples whose actions are equivalent.

use std::collections::HashMap;

use crate::abstraction::ClusterMap;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::model::{distance, ActionSpec, Position};
use crate::roadmap::{LsrEdge, Node, NodeId, Roadmap};

pub const DEFAULT_TAU: f64 = 0.05;

/// Action equivalence: equal skill sets, and pose lists with the same role
/// sequence whose corresponding poses lie within `tau` of each other.
/// `strict_labels` additionally requires equal labels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equivalence {
    pub tau: f64,
    pub strict_labels: bool,
}

impl Equivalence {
    pub fn new(tau: f64) -> Self {
        Equivalence {
            tau,
            strict_labels: false,
        }
    }

    pub fn holds(&self, u: &ActionSpec, v: &ActionSpec) -> bool {
        if self.strict_labels && u.label != v.label {
            return false;
        }
        u.skills == v.skills
            && u.poses.len() == v.poses.len()
            && u.poses.iter().zip(&v.poses).all(|(p, q)| {
                p.role == q.role && distance(&p.position, &q.position) <= self.tau
            })
    }
}

impl Default for Equivalence {
    fn default() -> Self {
        Equivalence::new(DEFAULT_TAU)
    }
}

pub fn action_equivalent(u: &ActionSpec, v: &ActionSpec, tau: f64) -> bool {
    Equivalence::new(tau).holds(u, v)
}

struct Accumulator {
    from: NodeId,
    to: NodeId,
    first: ActionSpec,
    members: Vec<Vec<Position>>,
    centroid: Vec<Position>,
}

impl Accumulator {
    fn current(&self) -> ActionSpec {
        let mut a = self.first.clone();
        for (pose, c) in a.poses.iter_mut().zip(&self.centroid) {
            pose.position = *c;
        }
        a
    }

    fn push(&mut self, action: &ActionSpec) {
        let positions: Vec<Position> = action.poses.iter().map(|p| p.position).collect();
        self.members.push(positions);
        let n = self.members.len() as f64;
        for (k, c) in self.centroid.iter_mut().enumerate() {
            for d in 0..3 {
                c[d] = self.members.iter().map(|m| m[k][d]).sum::<f64>() / n;
            }
        }
    }

    fn finish(self) -> LsrEdge {
        let action = self.current();
        let max_deviation = self
            .members
            .iter()
            .flat_map(|m| m.iter().zip(&self.centroid).map(|(p, c)| distance(p, c)))
            .fold(0.0, f64::max);
        LsrEdge {
            from: self.from,
            to: self.to,
            action,
            support: self.members.len(),
            max_deviation,
        }
    }
}

/// Builds the LSR layer from a cluster map and the dataset it was computed on.
/// Tuples with the same endpoints and an action equivalent to an existing
/// edge's centroid action merge into that edge; otherwise a parallel edge is
/// created.
pub fn build_lsr(clusters: &ClusterMap, dataset: &Dataset, eq: &Equivalence) -> Result<Roadmap> {
    if eq.tau.is_nan() || eq.tau < 0.0 {
        return Err(Error::Invalid(format!("tau must be nonnegative, got {}", eq.tau)));
    }
    if clusters.assignments.len() != dataset.tuples.len() {
        return Err(Error::Contract(
            "cluster map was computed on a different dataset".into(),
        ));
    }
    let mut acc: Vec<Accumulator> = Vec::new();
    let mut by_pair: HashMap<(NodeId, NodeId), Vec<usize>> = HashMap::new();
    for (t, &(from, to)) in dataset.tuples.iter().zip(&clusters.assignments) {
        let Some(action) = t.action.as_ref().filter(|_| t.is_action()) else {
            continue;
        };
        let slot = by_pair.entry((from, to)).or_default();
        match slot.iter().copied().find(|&i| eq.holds(&acc[i].current(), action)) {
            Some(i) => acc[i].push(action),
            None => {
                slot.push(acc.len());
                let mut a = Accumulator {
                    from,
                    to,
                    first: action.clone(),
                    members: Vec::new(),
                    centroid: vec![[0.0; 3]; action.poses.len()],
                };
                a.push(action);
                acc.push(a);
            }
        }
    }

    let nodes = clusters
        .keys
        .iter()
        .zip(&clusters.representatives)
        .enumerate()
        .map(|(i, (key, rep))| Node {
            id: NodeId(i),
            key: key.clone(),
            representative: rep.clone(),
        })
        .collect();
    Ok(Roadmap {
        domain: None,
        tau: eq.tau,
        nodes,
        lsr_edges: acc.into_iter().map(Accumulator::finish).collect(),
        plsr_edges: None,
        clsr_edges: None,
        agents: Vec::new(),
        weights: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abstraction::{cluster, CanonicalJson, ClusterConfig};
    use crate::model::{Observation, Pose, TransitionTuple};
    use serde_json::json;

    fn mv(x: f64) -> ActionSpec {
        ActionSpec::new(
            "move",
            ["grip"],
            vec![Pose::new("pick", [x, 0.0, 0.0]), Pose::new("place", [1.0, 1.0, 0.0])],
            "pp",
        )
    }

    #[test]
    fn equivalence_clauses() {
        let tau = 0.05;
        let u = mv(0.0);
        assert!(action_equivalent(&u, &u, tau));
        assert!(!action_equivalent(&u, &mv(2.0 * tau), tau));
        let mut more_skills = u.clone();
        more_skills.skills.insert("cut".into());
        assert!(!action_equivalent(&u, &more_skills, tau));
        let mut relabelled = u.clone();
        relabelled.label = "other".into();
        assert!(action_equivalent(&u, &relabelled, tau));
        let strict = Equivalence {
            tau,
            strict_labels: true,
        };
        assert!(!strict.holds(&u, &relabelled));
        let mut swapped = u.clone();
        swapped.poses.reverse();
        assert!(!action_equivalent(&u, &swapped, 10.0));
    }

    fn obs(v: i64) -> Observation {
        Observation::new(json!({ "v": v }))
    }

    fn roadmap_of(tuples: Vec<TransitionTuple>) -> Roadmap {
        let d = Dataset::new(tuples);
        let c = cluster(&d, &CanonicalJson, &ClusterConfig::default()).unwrap();
        build_lsr(&c, &d, &Equivalence::default()).unwrap()
    }

    #[test]
    fn one_tuple_one_edge() {
        let r = roadmap_of(vec![TransitionTuple::with_action(obs(0), obs(1), mv(0.0))]);
        assert_eq!(r.nodes.len(), 2);
        assert_eq!(r.lsr_edges.len(), 1);
        assert_eq!(r.lsr_edges[0].support, 1);
    }

    #[test]
    fn jittered_tuples_merge_to_centroid() {
        let r = roadmap_of(vec![
            TransitionTuple::with_action(obs(0), obs(1), mv(0.0)),
            TransitionTuple::with_action(obs(0), obs(1), mv(0.02)),
        ]);
        assert_eq!(r.lsr_edges.len(), 1);
        let e = &r.lsr_edges[0];
        assert_eq!(e.support, 2);
        assert!((e.action.poses[0].position[0] - 0.01).abs() < 1e-12);
        assert!((e.max_deviation - 0.01).abs() < 1e-12);
    }

    #[test]
    fn distant_poses_spawn_parallel_edges() {
        let r = roadmap_of(vec![
            TransitionTuple::with_action(obs(0), obs(1), mv(0.0)),
            TransitionTuple::with_action(obs(0), obs(1), mv(0.5)),
        ]);
        assert_eq!(r.lsr_edges.len(), 2);
        assert_eq!((r.lsr_edges[1].from, r.lsr_edges[1].to), (NodeId(0), NodeId(1)));
    }
}
