//! Observation-to-state abstraction. An abstraction maps an observation to the
//! key of its underlying state, ignoring nuisance fields, and renders a node's
//! representative observation back into a depiction. Clustering groups dataset
//! observations by key (or by an epsilon ball over feature vectors) and checks
//! the contrastive structure of the tuples.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::model::Observation;
use crate::roadmap::NodeId;

/// Canonical digest of the task-relevant part of an observation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateKey(pub String);

impl StateKey {
    /// Hash of the compact JSON text of `value`. Object keys serialize sorted,
    /// so equal values always produce equal keys.
    pub fn of_value(value: &Value) -> Self {
        let text = serde_json::to_string(value).expect("json values always serialize");
        let digest = Sha256::digest(text.as_bytes());
        StateKey(digest[..16].iter().map(|b| format!("{b:02x}")).collect())
    }

    fn cluster(index: usize) -> Self {
        StateKey(format!("cluster-{index}"))
    }
}

impl fmt::Display for StateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A rendered node: the structured state always, an SVG drawing when the
/// domain knows how to draw itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Depiction {
    pub state: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
}

pub trait StateAbstraction: Send + Sync {
    fn encode(&self, obs: &Observation) -> Result<StateKey>;

    fn render(&self, obs: &Observation) -> Result<Depiction> {
        Ok(Depiction {
            state: obs.state.clone(),
            svg: None,
        })
    }

    /// Numeric feature vector for epsilon clustering. Abstractions with exact
    /// keys need not provide one.
    fn features(&self, _obs: &Observation) -> Option<Vec<f64>> {
        None
    }
}

/// Domain-agnostic exact abstraction: the key is the digest of the whole state
/// payload. Produces the same keys as the bundled domains.
#[derive(Debug, Clone, Copy, Default)]
pub struct CanonicalJson;

impl StateAbstraction for CanonicalJson {
    fn encode(&self, obs: &Observation) -> Result<StateKey> {
        if obs.state.is_null() {
            return Err(Error::UnknownPayload("state payload is null".into()));
        }
        Ok(StateKey::of_value(&obs.state))
    }
}

/// Treats the state payload as a JSON array of numbers.
#[derive(Debug, Clone, Copy, Default)]
pub struct VectorPayload;

impl StateAbstraction for VectorPayload {
    fn encode(&self, obs: &Observation) -> Result<StateKey> {
        self.features(obs)
            .map(|_| StateKey::of_value(&obs.state))
            .ok_or_else(|| Error::UnknownPayload("state payload is not a numeric array".into()))
    }

    fn features(&self, obs: &Observation) -> Option<Vec<f64>> {
        obs.state.as_array()?.iter().map(Value::as_f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ClusterMode {
    Exact,
    /// Single-link agglomeration of feature vectors closer than `epsilon`.
    Epsilon {
        epsilon: f64,
        representative_features: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterConfig {
    /// `Some(eps)` switches to epsilon clustering over abstraction features.
    pub epsilon: Option<f64>,
    /// Largest tolerated fraction of tuples violating the contrastive property.
    pub violation_tolerance: f64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            epsilon: None,
            violation_tolerance: 0.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ContrastiveReport {
    /// No-action tuples whose observations landed in different nodes.
    pub split_no_action: usize,
    /// Action tuples whose observations landed in the same node.
    pub merged_action: usize,
    pub checked: usize,
}

impl ContrastiveReport {
    pub fn violations(&self) -> usize {
        self.split_no_action + self.merged_action
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterMap {
    pub keys: Vec<StateKey>,
    pub representatives: Vec<Observation>,
    pub mode: ClusterMode,
    /// Node of `obs_a` and `obs_b` for every dataset tuple, in dataset order.
    pub assignments: Vec<(NodeId, NodeId)>,
    pub report: ContrastiveReport,
    index: HashMap<StateKey, NodeId>,
}

impl ClusterMap {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn node_of_key(&self, key: &StateKey) -> Option<NodeId> {
        self.index.get(key).copied()
    }

    pub fn render(&self, node: NodeId, abstraction: &dyn StateAbstraction) -> Result<Depiction> {
        let obs = self
            .representatives
            .get(node.0)
            .ok_or(Error::UnknownNode(node))?;
        abstraction.render(obs)
    }
}

/// Groups every observation of `dataset` into nodes. Node ids follow first
/// appearance (obs_a before obs_b, tuples in order) and the first observation
/// seen for a node is its representative.
pub fn cluster(
    dataset: &Dataset,
    abstraction: &dyn StateAbstraction,
    config: &ClusterConfig,
) -> Result<ClusterMap> {
    if dataset.tuples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut map = match config.epsilon {
        None => cluster_exact(dataset, abstraction)?,
        Some(eps) => cluster_epsilon(dataset, abstraction, eps)?,
    };

    let mut report = ContrastiveReport::default();
    for (t, &(a, b)) in dataset.tuples.iter().zip(&map.assignments) {
        report.checked += 1;
        match (t.is_action(), a == b) {
            (false, false) => report.split_no_action += 1,
            (true, true) => report.merged_action += 1,
            _ => {}
        }
    }
    let fraction = report.violations() as f64 / report.checked as f64;
    if fraction > config.violation_tolerance {
        return Err(Error::ContrastiveViolation {
            violations: report.violations(),
            checked: report.checked,
            tolerance: config.violation_tolerance,
        });
    }
    if report.violations() > 0 {
        log::warn!(
            "{} contrastive violations among {} tuples (within tolerance)",
            report.violations(),
            report.checked
        );
    }
    map.report = report;
    Ok(map)
}

fn cluster_exact(dataset: &Dataset, abstraction: &dyn StateAbstraction) -> Result<ClusterMap> {
    let mut keys = Vec::new();
    let mut representatives = Vec::new();
    let mut index: HashMap<StateKey, NodeId> = HashMap::new();
    let mut assignments = Vec::with_capacity(dataset.tuples.len());
    let mut node_for = |obs: &Observation| -> Result<NodeId> {
        let key = abstraction.encode(obs)?;
        Ok(*index.entry(key.clone()).or_insert_with(|| {
            keys.push(key);
            representatives.push(obs.clone());
            NodeId(keys.len() - 1)
        }))
    };
    for t in &dataset.tuples {
        let a = node_for(&t.obs_a)?;
        let b = node_for(&t.obs_b)?;
        assignments.push((a, b));
    }
    Ok(ClusterMap {
        keys,
        representatives,
        mode: ClusterMode::Exact,
        assignments,
        report: ContrastiveReport::default(),
        index,
    })
}

fn cluster_epsilon(
    dataset: &Dataset,
    abstraction: &dyn StateAbstraction,
    epsilon: f64,
) -> Result<ClusterMap> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::Invalid(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    let observations: Vec<&Observation> = dataset
        .tuples
        .iter()
        .flat_map(|t| [&t.obs_a, &t.obs_b])
        .collect();
    let features: Vec<Vec<f64>> = observations
        .iter()
        .map(|o| {
            abstraction
                .features(o)
                .ok_or_else(|| Error::UnknownPayload("abstraction provides no features".into()))
        })
        .collect::<Result<_>>()?;

    let mut dsu = DisjointSets::new(features.len());
    for i in 0..features.len() {
        for j in (i + 1)..features.len() {
            if euclidean(&features[i], &features[j]) <= epsilon {
                dsu.union(i, j);
            }
        }
    }

    let mut root_node: HashMap<usize, NodeId> = HashMap::new();
    let mut keys = Vec::new();
    let mut representatives = Vec::new();
    let mut rep_features = Vec::new();
    let mut nodes = Vec::with_capacity(features.len());
    for (i, obs) in observations.iter().enumerate() {
        let root = dsu.find(i);
        let node = *root_node.entry(root).or_insert_with(|| {
            keys.push(StateKey::cluster(keys.len()));
            representatives.push((*obs).clone());
            rep_features.push(features[i].clone());
            NodeId(keys.len() - 1)
        });
        nodes.push(node);
    }
    let assignments = nodes.chunks(2).map(|c| (c[0], c[1])).collect();
    let index = keys
        .iter()
        .enumerate()
        .map(|(i, k)| (k.clone(), NodeId(i)))
        .collect();
    Ok(ClusterMap {
        keys,
        representatives,
        mode: ClusterMode::Epsilon {
            epsilon,
            representative_features: rep_features,
        },
        assignments,
        report: ContrastiveReport::default(),
        index,
    })
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
