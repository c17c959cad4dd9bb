//! End-to-end roadmap construction: clustering, LSR, P-LSR, C-LSR.

use serde::{Deserialize, Serialize};

use crate::abstraction::{cluster, ClusterConfig, ContrastiveReport, StateAbstraction};
use crate::clsr::{build_clsr, ClsrConfig, ClsrReport};
use crate::dataset::Dataset;
use crate::error::Result;
use crate::lsr::{build_lsr, Equivalence};
use crate::model::{AgentSpec, CostWeights};
use crate::par;
use crate::plsr::{build_plsr, PlsrConfig, DEFAULT_PATH_CAP};
use crate::roadmap::Roadmap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildConfig {
    pub cluster: ClusterConfig,
    pub equivalence: Equivalence,
    pub path_cap: usize,
    pub weights: CostWeights,
    pub parallel: bool,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            cluster: ClusterConfig::default(),
            equivalence: Equivalence::default(),
            path_cap: DEFAULT_PATH_CAP,
            weights: CostWeights::default(),
            parallel: par::AVAILABLE,
        }
    }
}

impl BuildConfig {
    pub fn plsr(&self) -> PlsrConfig {
        PlsrConfig {
            equivalence: self.equivalence,
            path_cap: self.path_cap,
            parallel: self.parallel,
        }
    }

    pub fn clsr(&self) -> ClsrConfig {
        ClsrConfig {
            weights: self.weights,
            parallel: self.parallel,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BuildReport {
    pub tuples: usize,
    pub action_tuples: usize,
    pub nodes: usize,
    pub lsr_edges: usize,
    pub plsr_edges: usize,
    pub max_parallel: usize,
    pub clsr: ClsrReport,
    pub contrastive: ContrastiveReport,
}

/// Clusters `dataset` and builds the LSR and P-LSR layers.
pub fn build_parallel(
    dataset: &Dataset,
    abstraction: &dyn StateAbstraction,
    config: &BuildConfig,
) -> Result<(Roadmap, BuildReport)> {
    let clusters = cluster(dataset, abstraction, &config.cluster)?;
    let mut roadmap = build_lsr(&clusters, dataset, &config.equivalence)?;
    build_plsr(&mut roadmap, &config.plsr())?;
    let report = BuildReport {
        tuples: dataset.len(),
        action_tuples: dataset.counts().0,
        nodes: roadmap.nodes.len(),
        lsr_edges: roadmap.lsr_edges.len(),
        plsr_edges: roadmap.plsr()?.len(),
        max_parallel: max_parallel(&roadmap),
        contrastive: clusters.report,
        ..BuildReport::default()
    };
    Ok((roadmap, report))
}

/// All layers for one team.
pub fn build_all(
    dataset: &Dataset,
    abstraction: &dyn StateAbstraction,
    agents: &[AgentSpec],
    config: &BuildConfig,
) -> Result<(Roadmap, BuildReport)> {
    let (mut roadmap, mut report) = build_parallel(dataset, abstraction, config)?;
    report.clsr = build_clsr(&mut roadmap, agents, &config.clsr())?;
    Ok((roadmap, report))
}

/// Largest action count on any P-LSR edge (1 when the layer is empty but LSR
/// edges exist).
pub fn max_parallel(roadmap: &Roadmap) -> usize {
    roadmap
        .plsr_edges
        .iter()
        .flatten()
        .map(|e| e.actions.len())
        .chain(roadmap.lsr_edges.first().map(|_| 1))
        .max()
        .unwrap_or(0)
}
