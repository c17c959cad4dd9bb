//! The layered roadmap. All layers share one node set; the LSR layer holds
//! single-action edges mined from the dataset, the P-LSR layer adds edges with
//! parallel action sets, and the C-LSR layer holds the team-specific edges with
//! assignment couples and costs.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::abstraction::{Depiction, StateAbstraction, StateKey};
use crate::error::{Error, Result};
use crate::model::{ActionSpec, AgentSpec, CostWeights, Observation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub key: StateKey,
    pub representative: Observation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsrEdge {
    pub from: NodeId,
    pub to: NodeId,
    /// Aggregated action: first-seen label and skills, centroid poses.
    pub action: ActionSpec,
    /// Number of dataset tuples merged into this edge.
    pub support: usize,
    /// Largest distance of a supporting pose from its centroid.
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelEdge {
    pub from: NodeId,
    pub to: NodeId,
    pub actions: Vec<ActionSpec>,
    /// Node sequences of the shortest LSR paths that induced this edge.
    pub provenance: Vec<Vec<NodeId>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Lsr,
    Plsr,
    Clsr,
}

impl Layer {
    pub fn name(self) -> &'static str {
        match self {
            Layer::Lsr => "lsr",
            Layer::Plsr => "plsr",
            Layer::Clsr => "clsr",
        }
    }
}

impl FromStr for Layer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lsr" => Ok(Layer::Lsr),
            "plsr" | "p-lsr" => Ok(Layer::Plsr),
            "clsr" | "c-lsr" => Ok(Layer::Clsr),
            other => Err(Error::Invalid(format!(
                "unknown layer {other:?} (expected lsr, plsr or clsr)"
            ))),
        }
    }
}

/// Identifies an edge of the parallel edge set: either a single-action LSR
/// edge or a multi-action P-LSR edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeSource {
    pub layer: Layer,
    pub index: usize,
}

impl fmt::Display for EdgeSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.layer.name(), self.index)
    }
}

/// Agent `agent` executes the `action`-th action of the source edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Couple {
    pub agent: String,
    pub action: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapabilityEdge {
    pub from: NodeId,
    pub to: NodeId,
    pub couples: Vec<Couple>,
    /// Edge cost: weighted assignment cost plus the parallelism term.
    pub cost: f64,
    /// Optimal assignment objective for this edge.
    pub assignment_cost: f64,
    pub source: EdgeSource,
}

/// A borrowed view of one edge of the parallel edge set.
#[derive(Debug, Clone, Copy)]
pub struct ParEdge<'a> {
    pub source: EdgeSource,
    pub from: NodeId,
    pub to: NodeId,
    pub actions: &'a [ActionSpec],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Roadmap {
    /// Domain name or definition path the roadmap was built for, if known.
    #[serde(default)]
    pub domain: Option<String>,
    pub tau: f64,
    pub nodes: Vec<Node>,
    pub lsr_edges: Vec<LsrEdge>,
    #[serde(default)]
    pub plsr_edges: Option<Vec<ParallelEdge>>,
    #[serde(default)]
    pub clsr_edges: Option<Vec<CapabilityEdge>>,
    /// Team the C-LSR layer was built for.
    #[serde(default)]
    pub agents: Vec<AgentSpec>,
    #[serde(default)]
    pub weights: Option<CostWeights>,
}

impl Roadmap {
    pub fn node(&self, id: NodeId) -> Result<&Node> {
        self.nodes.get(id.0).ok_or(Error::UnknownNode(id))
    }

    pub fn node_by_key(&self, key: &StateKey) -> Option<NodeId> {
        self.nodes.iter().find(|n| &n.key == key).map(|n| n.id)
    }

    pub fn render(&self, id: NodeId, abstraction: &dyn StateAbstraction) -> Result<Depiction> {
        abstraction.render(&self.node(id)?.representative)
    }

    pub fn plsr(&self) -> Result<&[ParallelEdge]> {
        self.plsr_edges
            .as_deref()
            .ok_or(Error::LayerMissing("plsr"))
    }

    pub fn clsr(&self) -> Result<&[CapabilityEdge]> {
        self.clsr_edges
            .as_deref()
            .ok_or(Error::LayerMissing("clsr"))
    }

    /// The full parallel edge set: every LSR edge followed by every P-LSR edge.
    pub fn par_edges(&self) -> Result<Vec<ParEdge<'_>>> {
        let lsr = self.lsr_edges.iter().enumerate().map(|(i, e)| ParEdge {
            source: EdgeSource {
                layer: Layer::Lsr,
                index: i,
            },
            from: e.from,
            to: e.to,
            actions: std::slice::from_ref(&e.action),
        });
        let plsr = self.plsr()?.iter().enumerate().map(|(i, e)| ParEdge {
            source: EdgeSource {
                layer: Layer::Plsr,
                index: i,
            },
            from: e.from,
            to: e.to,
            actions: &e.actions,
        });
        Ok(lsr.chain(plsr).collect())
    }

    pub fn source_actions(&self, source: EdgeSource) -> Result<&[ActionSpec]> {
        let missing = || Error::Invalid(format!("edge {source} does not exist"));
        match source.layer {
            Layer::Lsr => self
                .lsr_edges
                .get(source.index)
                .map(|e| std::slice::from_ref(&e.action))
                .ok_or_else(missing),
            Layer::Plsr => self
                .plsr()?
                .get(source.index)
                .map(|e| e.actions.as_slice())
                .ok_or_else(missing),
            Layer::Clsr => Err(missing()),
        }
    }

    pub fn agent(&self, id: &str) -> Option<&AgentSpec> {
        self.agents.iter().find(|a| a.id == id)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let roadmap: Roadmap = serde_json::from_str(&text)?;
        roadmap.check()?;
        Ok(roadmap)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    /// Structural checks: node ids are dense and every edge endpoint exists.
    pub fn check(&self) -> Result<()> {
        for (i, n) in self.nodes.iter().enumerate() {
            if n.id.0 != i {
                return Err(Error::Invalid(format!("node {} stored at position {i}", n.id)));
            }
        }
        let n = self.nodes.len();
        let ends = self
            .lsr_edges
            .iter()
            .map(|e| (e.from, e.to))
            .chain(self.plsr_edges.iter().flatten().map(|e| (e.from, e.to)))
            .chain(self.clsr_edges.iter().flatten().map(|e| (e.from, e.to)));
        for (a, b) in ends {
            if a.0 >= n || b.0 >= n {
                return Err(Error::Invalid(format!("edge {a} -> {b} has a missing endpoint")));
            }
        }
        Ok(())
    }
}
