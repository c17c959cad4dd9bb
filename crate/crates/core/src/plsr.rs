//! Parallel-edge inference over the LSR.
//!
//! For every ordered node pair `(n, t)` whose shortest LSR path has at least
//! two edges, every shortest path is examined. If all of the path's actions can
//! be matched one-to-one onto equivalent actions leaving `n`, the path's
//! actions can be started from `n` in any order, and a P-LSR edge `n -> t`
//! carrying the whole action multiset is added. Path queries only ever see the
//! original LSR edges.

use std::cmp::Ordering;
use std::collections::VecDeque;

use crate::error::Result;
use crate::lsr::Equivalence;
use crate::model::ActionSpec;
use crate::par;
use crate::roadmap::{NodeId, ParallelEdge, Roadmap};

pub const DEFAULT_PATH_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlsrConfig {
    pub equivalence: Equivalence,
    /// Maximum number of shortest paths examined per node pair.
    pub path_cap: usize,
    pub parallel: bool,
}

impl Default for PlsrConfig {
    fn default() -> Self {
        PlsrConfig {
            equivalence: Equivalence::default(),
            path_cap: DEFAULT_PATH_CAP,
            parallel: par::AVAILABLE,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlsrReport {
    /// Pairs with shortest path length >= 2 that were examined.
    pub pairs_examined: usize,
    pub paths_examined: usize,
    /// Paths whose actions were all executable from their first node.
    pub candidates: usize,
    pub edges_added: usize,
    /// Pairs whose shortest-path enumeration hit the cap.
    pub capped_pairs: Vec<(NodeId, NodeId)>,
}

/// Maximum bipartite matching (augmenting paths). `adj(i, j)` tells whether
/// left item `i` may be matched to right item `j`. Returns, for each left
/// item, its matched right item.
pub fn max_matching(
    left: usize,
    right: usize,
    adj: impl Fn(usize, usize) -> bool,
) -> Vec<Option<usize>> {
    fn augment(
        i: usize,
        right: usize,
        adj: &dyn Fn(usize, usize) -> bool,
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for j in 0..right {
            if seen[j] || !adj(i, j) {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none_or(|k| augment(k, right, adj, seen, owner)) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }

    let mut owner: Vec<Option<usize>> = vec![None; right];
    for i in 0..left {
        let mut seen = vec![false; right];
        augment(i, right, &adj, &mut seen, &mut owner);
    }
    let mut matched = vec![None; left];
    for (j, o) in owner.iter().enumerate() {
        if let Some(i) = o {
            matched[*i] = Some(j);
        }
    }
    matched
}

/// Actions of every LSR edge leaving `n`, in edge order.
pub fn actions_at_node(roadmap: &Roadmap, n: NodeId) -> Result<Vec<&ActionSpec>> {
    roadmap.node(n)?;
    Ok(roadmap
        .lsr_edges
        .iter()
        .filter(|e| e.from == n)
        .map(|e| &e.action)
        .collect())
}

/// The largest sub-multiset of `path_actions` that can be matched injectively
/// onto equivalent actions of `node_actions`, in `path_actions` order.
pub fn compute_intersection<'a>(
    node_actions: &[&ActionSpec],
    path_actions: &[&'a ActionSpec],
    eq: &Equivalence,
) -> Vec<&'a ActionSpec> {
    let m = max_matching(path_actions.len(), node_actions.len(), |i, j| {
        eq.holds(path_actions[i], node_actions[j])
    });
    path_actions
        .iter()
        .zip(m)
        .filter_map(|(a, j)| j.map(|_| *a))
        .collect()
}

/// Two action multisets are equivalent when they have equal size and admit a
/// perfect matching under action equivalence.
pub fn multiset_equivalent(a: &[ActionSpec], b: &[ActionSpec], eq: &Equivalence) -> bool {
    a.len() == b.len()
        && max_matching(a.len(), b.len(), |i, j| eq.holds(&a[i], &b[j]))
            .iter()
            .all(Option::is_some)
}

pub(crate) fn cmp_actions(a: &ActionSpec, b: &ActionSpec) -> Ordering {
    a.label
        .cmp(&b.label)
        .then_with(|| a.skills.cmp(&b.skills))
        .then_with(|| a.workload_class.cmp(&b.workload_class))
        .then_with(|| a.poses.len().cmp(&b.poses.len()))
        .then_with(|| {
            a.poses
                .iter()
                .zip(&b.poses)
                .map(|(p, q)| {
                    p.role.cmp(&q.role).then_with(|| {
                        p.position
                            .iter()
                            .zip(&q.position)
                            .map(|(x, y)| x.total_cmp(y))
                            .find(|o| o.is_ne())
                            .unwrap_or(Ordering::Equal)
                    })
                })
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
}

fn cmp_action_lists(a: &[ActionSpec], b: &[ActionSpec]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| cmp_actions(x, y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}

struct Candidate {
    from: NodeId,
    to: NodeId,
    actions: Vec<ActionSpec>,
    path: Vec<NodeId>,
}

#[derive(Default)]
struct SourceResult {
    candidates: Vec<Candidate>,
    pairs: usize,
    paths: usize,
    capped: Vec<(NodeId, NodeId)>,
}

/// Outgoing LSR edges per node as `(target, edge index)`, sorted.
fn adjacency(roadmap: &Roadmap) -> Vec<Vec<(usize, usize)>> {
    let mut out = vec![Vec::new(); roadmap.nodes.len()];
    for (i, e) in roadmap.lsr_edges.iter().enumerate() {
        out[e.from.0].push((e.to.0, i));
    }
    for o in &mut out {
        o.sort_unstable();
    }
    out
}

fn bfs(out: &[Vec<(usize, usize)>], n: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; out.len()];
    dist[n] = Some(0);
    let mut queue = VecDeque::from([n]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].expect("queued nodes have a distance");
        for &(w, _) in &out[v] {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

fn examine_source(
    roadmap: &Roadmap,
    out: &[Vec<(usize, usize)>],
    n: usize,
    config: &PlsrConfig,
) -> SourceResult {
    let mut result = SourceResult::default();
    let node_actions: Vec<&ActionSpec> = out[n].iter().map(|&(_, e)| &roadmap.lsr_edges[e].action).collect();
    // A path longer than the number of actions leaving n can never be fully
    // matched, so deeper targets are not enumerated.
    let max_depth = node_actions.len();
    if max_depth < 2 {
        return result;
    }
    let dist = bfs(out, n);
    result.pairs = dist
        .iter()
        .filter(|d| d.is_some_and(|d| (2..=max_depth).contains(&d)))
        .count();

    let mut per_target = vec![0usize; out.len()];
    let mut capped = vec![false; out.len()];
    let mut nodes = vec![n];
    let mut edges: Vec<usize> = Vec::new();

    // Depth-first walk over the BFS layering from n: every walk that only
    // steps from distance d to d + 1 is a shortest path to its endpoint.
    fn walk(
        ctx: &mut Walk<'_>,
        nodes: &mut Vec<usize>,
        edges: &mut Vec<usize>,
        result: &mut SourceResult,
    ) {
        let v = *nodes.last().expect("walk starts at the source");
        let d = edges.len();
        if d >= 2 {
            let t = v;
            if ctx.per_target[t] < ctx.config.path_cap {
                ctx.per_target[t] += 1;
                result.paths += 1;
                let path_actions: Vec<&ActionSpec> =
                    edges.iter().map(|&e| &ctx.roadmap.lsr_edges[e].action).collect();
                let matched = compute_intersection(
                    ctx.node_actions,
                    &path_actions,
                    &ctx.config.equivalence,
                );
                if matched.len() == path_actions.len() {
                    let mut actions: Vec<ActionSpec> = matched.into_iter().cloned().collect();
                    actions.sort_by(cmp_actions);
                    result.candidates.push(Candidate {
                        from: NodeId(ctx.source),
                        to: NodeId(t),
                        actions,
                        path: nodes.iter().map(|&i| NodeId(i)).collect(),
                    });
                }
            } else if !ctx.capped[t] {
                ctx.capped[t] = true;
                result.capped.push((NodeId(ctx.source), NodeId(t)));
            }
        }
        if d == ctx.max_depth {
            return;
        }
        for &(w, e) in &ctx.out[v] {
            if ctx.dist[w] == Some(d + 1) {
                nodes.push(w);
                edges.push(e);
                walk(ctx, nodes, edges, result);
                nodes.pop();
                edges.pop();
            }
        }
    }

    struct Walk<'a> {
        roadmap: &'a Roadmap,
        out: &'a [Vec<(usize, usize)>],
        dist: &'a [Option<usize>],
        node_actions: &'a [&'a ActionSpec],
        config: &'a PlsrConfig,
        source: usize,
        max_depth: usize,
        per_target: &'a mut [usize],
        capped: &'a mut [bool],
    }

    let mut ctx = Walk {
        roadmap,
        out,
        dist: &dist,
        node_actions: &node_actions,
        config,
        source: n,
        max_depth,
        per_target: &mut per_target,
        capped: &mut capped,
    };
    walk(&mut ctx, &mut nodes, &mut edges, &mut result);
    result
}

/// Fills the P-LSR layer of `roadmap` (and clears any C-LSR layer built on a
/// previous P-LSR).
pub fn build_plsr(roadmap: &mut Roadmap, config: &PlsrConfig) -> Result<PlsrReport> {
    let out = adjacency(roadmap);
    let per_source = par::map_range(roadmap.nodes.len(), config.parallel, |n| {
        examine_source(roadmap, &out, n, config)
    });

    let mut report = PlsrReport::default();
    let mut candidates = Vec::new();
    for r in per_source {
        report.pairs_examined += r.pairs;
        report.paths_examined += r.paths;
        report.capped_pairs.extend(r.capped);
        candidates.extend(r.candidates);
    }
    for (n, t) in &report.capped_pairs {
        log::warn!(
            "pair {n} -> {t}: more than {} shortest paths, the rest were not examined",
            config.path_cap
        );
    }
    report.candidates = candidates.len();
    candidates.sort_by(|a, b| {
        (a.from, a.to)
            .cmp(&(b.from, b.to))
            .then_with(|| cmp_action_lists(&a.actions, &b.actions))
            .then_with(|| a.path.cmp(&b.path))
    });

    let mut edges: Vec<ParallelEdge> = Vec::new();
    let mut group_start = 0;
    for c in candidates {
        if edges
            .last()
            .is_none_or(|e| (e.from, e.to) != (c.from, c.to))
        {
            group_start = edges.len();
        }
        let existing = edges[group_start..]
            .iter_mut()
            .find(|e| multiset_equivalent(&e.actions, &c.actions, &config.equivalence));
        match existing {
            Some(e) => e.provenance.push(c.path),
            None => edges.push(ParallelEdge {
                from: c.from,
                to: c.to,
                actions: c.actions,
                provenance: vec![c.path],
            }),
        }
    }
    for e in &mut edges {
        e.provenance.sort();
        e.provenance.dedup();
    }
    report.edges_added = edges.len();
    log::info!(
        "p-lsr: {} pairs, {} paths, {} parallel edges",
        report.pairs_examined,
        report.paths_examined,
        report.edges_added
    );
    roadmap.plsr_edges = Some(edges);
    roadmap.clsr_edges = None;
    roadmap.agents.clear();
    roadmap.weights = None;
    Ok(report)
}
