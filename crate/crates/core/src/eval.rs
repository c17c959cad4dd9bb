//! Batch planning over sampled start/goal pairs, as used by the benchmark
//! command.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::par;
use crate::planner::{PlanOutcome, Planner};
use crate::roadmap::{NodeId, Roadmap};

/// Every ordered pair `(s, g)`, `s != g`, with `g` reachable from `s` over
/// LSR edges.
pub fn reachable_pairs(roadmap: &Roadmap) -> Vec<(NodeId, NodeId)> {
    let n = roadmap.nodes.len();
    let mut out = vec![Vec::new(); n];
    for e in &roadmap.lsr_edges {
        out[e.from.0].push(e.to.0);
    }
    let mut pairs = Vec::new();
    for s in 0..n {
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &out[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        pairs.extend((0..n).filter(|&g| g != s && seen[g]).map(|g| (NodeId(s), NodeId(g))));
    }
    pairs
}

/// `n` pairs drawn from [`reachable_pairs`] without replacement, cycling
/// through fresh shuffles when `n` exceeds the number of pairs.
pub fn sample_pairs(roadmap: &Roadmap, n: usize, seed: u64) -> Vec<(NodeId, NodeId)> {
    let mut all = reachable_pairs(roadmap);
    let mut out = Vec::with_capacity(n);
    if all.is_empty() {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < n {
        all.shuffle(&mut rng);
        let take = (n - out.len()).min(all.len());
        out.extend_from_slice(&all[..take]);
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BatchStats {
    pub pairs: usize,
    /// Plan length `N` (states including start and goal) to count.
    pub histogram: BTreeMap<usize, usize>,
    pub no_path: usize,
    pub mean_n: Option<f64>,
    pub max_n: Option<usize>,
    /// Workload of each agent, summed over all found plans.
    pub workload: BTreeMap<String, f64>,
}

pub fn evaluate(roadmap: &Roadmap, pairs: &[(NodeId, NodeId)], parallel: bool) -> Result<BatchStats> {
    let planner = Planner::new(roadmap)?;
    let outcomes = par::map(pairs, parallel, |&(s, g)| planner.plan_nodes(s, g));
    let mut stats = BatchStats {
        pairs: pairs.len(),
        workload: roadmap.agents.iter().map(|a| (a.id.clone(), 0.0)).collect(),
        ..BatchStats::default()
    };
    let mut total = 0usize;
    for o in outcomes {
        match o? {
            PlanOutcome::Found(p) => {
                *stats.histogram.entry(p.len()).or_default() += 1;
                total += p.len();
                for (a, k) in p.per_agent_workload {
                    *stats.workload.entry(a).or_default() += k;
                }
            }
            PlanOutcome::NoPath { .. } => stats.no_path += 1,
        }
    }
    let found = pairs.len() - stats.no_path;
    if found > 0 {
        stats.mean_n = Some(total as f64 / found as f64);
    }
    stats.max_n = stats.histogram.keys().next_back().copied();
    Ok(stats)
}

/// Wide CSV: one column per named agent set, one row per metric.
pub fn to_csv(results: &[(String, BatchStats)]) -> String {
    let mut s = String::from("metric");
    for (name, _) in results {
        write!(s, ",{name}").unwrap();
    }
    s.push('\n');
    if results.iter().all(|(_, r)| r.pairs == 0) {
        return s;
    }
    let max_n = results.iter().filter_map(|(_, r)| r.max_n).max().unwrap_or(0);
    let mut row = |label: String, cell: &dyn Fn(&BatchStats) -> String| {
        s.push_str(&label);
        for (_, r) in results {
            write!(s, ",{}", cell(r)).unwrap();
        }
        s.push('\n');
    };
    row("pairs".into(), &|r| r.pairs.to_string());
    for n in 1..=max_n {
        row(format!("N={n}"), &|r| r.histogram.get(&n).copied().unwrap_or(0).to_string());
    }
    row("no_path".into(), &|r| r.no_path.to_string());
    row("mean_N".into(), &|r| r.mean_n.map(|m| format!("{m:.4}")).unwrap_or_default());
    row("max_N".into(), &|r| r.max_n.map(|m| m.to_string()).unwrap_or_default());
    let agents: std::collections::BTreeSet<&String> =
        results.iter().flat_map(|(_, r)| r.workload.keys()).collect();
    for a in agents {
        row(format!("workload_{a}"), &|r| {
            r.workload.get(a).map(|w| format!("{w:.4}")).unwrap_or_default()
        });
    }
    s
}
