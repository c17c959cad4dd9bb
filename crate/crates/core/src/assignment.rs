//! Action-to-agent assignment for one edge: every action goes to exactly one
//! agent, every agent takes at most one action, total cost is minimal.
//!
//! Cost matrices are indexed `[action][agent]` with `f64::INFINITY` marking an
//! incapable couple.

use serde::{Deserialize, Serialize};
use thiserror::Error;

const TIE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    /// Agent column chosen for each action row.
    pub agent_of: Vec<usize>,
    pub total_cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum Infeasible {
    #[error("{actions} actions but only {agents} agents")]
    TooFewAgents { actions: usize, agents: usize },
    #[error("no assignment with finite cost")]
    NoFiniteAssignment,
}

fn check_shape(costs: &[Vec<f64>]) -> Result<usize, Infeasible> {
    let agents = costs.first().map_or(0, Vec::len);
    debug_assert!(costs.iter().all(|r| r.len() == agents), "ragged cost matrix");
    if costs.len() > agents {
        return Err(Infeasible::TooFewAgents {
            actions: costs.len(),
            agents,
        });
    }
    Ok(agents)
}

/// Exhaustive search over injective maps with pruning. Among optimal
/// assignments the one whose `agent_of` is lexicographically smallest wins,
/// so callers get a stable choice by ordering agent columns by id.
pub fn solve(costs: &[Vec<f64>]) -> Result<Assignment, Infeasible> {
    let agents = check_shape(costs)?;
    if costs.is_empty() {
        return Ok(Assignment {
            agent_of: Vec::new(),
            total_cost: 0.0,
        });
    }

    struct Search<'a> {
        costs: &'a [Vec<f64>],
        used: Vec<bool>,
        current: Vec<usize>,
        best: Option<Assignment>,
    }

    impl Search<'_> {
        fn bound(&self) -> f64 {
            self.best.as_ref().map_or(f64::INFINITY, |b| b.total_cost)
        }

        fn go(&mut self, row: usize, partial: f64) {
            if row == self.costs.len() {
                if partial + TIE < self.bound() {
                    self.best = Some(Assignment {
                        agent_of: self.current.clone(),
                        total_cost: partial,
                    });
                }
                return;
            }
            for j in 0..self.used.len() {
                let c = self.costs[row][j];
                // Costs are nonnegative, so a prefix that cannot beat the
                // incumbent strictly is dead.
                if self.used[j] || !c.is_finite() || partial + c + TIE >= self.bound() {
                    continue;
                }
                self.used[j] = true;
                self.current.push(j);
                self.go(row + 1, partial + c);
                self.current.pop();
                self.used[j] = false;
            }
        }
    }

    let mut s = Search {
        costs,
        used: vec![false; agents],
        current: Vec::with_capacity(costs.len()),
        best: None,
    };
    s.go(0, 0.0);
    s.best.ok_or(Infeasible::NoFiniteAssignment)
}

/// Hungarian algorithm on the rectangular matrix, with infinite entries
/// replaced by a large penalty. Optimal total cost matches [`solve`]; the
/// choice among ties may differ.
pub fn solve_hungarian(costs: &[Vec<f64>]) -> Result<Assignment, Infeasible> {
    let m = check_shape(costs)?;
    let n = costs.len();
    if n == 0 {
        return Ok(Assignment {
            agent_of: Vec::new(),
            total_cost: 0.0,
        });
    }
    let finite_sum: f64 = costs.iter().flatten().filter(|c| c.is_finite()).sum();
    let big = (finite_sum + 1.0) * 2.0;
    let a = |i: usize, j: usize| {
        let c = costs[i - 1][j - 1];
        if c.is_finite() {
            c
        } else {
            big
        }
    };

    // Potentials formulation, 1-based with a virtual column 0.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = a(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut agent_of = vec![0; n];
    for j in 1..=m {
        if p[j] != 0 {
            agent_of[p[j] - 1] = j - 1;
        }
    }
    let mut total_cost = 0.0;
    for (i, &j) in agent_of.iter().enumerate() {
        let c = costs[i][j];
        if !c.is_finite() {
            return Err(Infeasible::NoFiniteAssignment);
        }
        total_cost += c;
    }
    Ok(Assignment {
        agent_of,
        total_cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn two_by_two() {
        let a = solve(&[vec![1.0, 2.0], vec![3.0, 1.0]]).unwrap();
        assert_eq!(a.agent_of, vec![0, 1]);
        assert_eq!(a.total_cost, 2.0);
        assert_eq!(solve_hungarian(&[vec![1.0, 2.0], vec![3.0, 1.0]]).unwrap().total_cost, 2.0);
    }

    #[test]
    fn ties_pick_the_smallest_agent_sequence() {
        let a = solve(&[vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 1.0]]).unwrap();
        assert_eq!(a.agent_of, vec![0, 1]);
    }

    #[test]
    fn infeasible_cases() {
        assert_eq!(
            solve(&[vec![1.0], vec![1.0]]),
            Err(Infeasible::TooFewAgents {
                actions: 2,
                agents: 1
            })
        );
        assert_eq!(solve(&[vec![INF, INF]]), Err(Infeasible::NoFiniteAssignment));
        // Both actions can only go to agent 0.
        let m = [vec![1.0, INF], vec![2.0, INF]];
        assert_eq!(solve(&m), Err(Infeasible::NoFiniteAssignment));
        assert_eq!(solve_hungarian(&m), Err(Infeasible::NoFiniteAssignment));
    }

    #[test]
    fn infinity_forces_the_other_column() {
        let m = [vec![0.1, 5.0], vec![0.1, INF]];
        let a = solve(&m).unwrap();
        assert_eq!(a.agent_of, vec![1, 0]);
        assert!((a.total_cost - 5.1).abs() < 1e-12);
        assert!((solve_hungarian(&m).unwrap().total_cost - 5.1).abs() < 1e-12);
    }

    #[test]
    fn empty_edge_costs_nothing() {
        assert_eq!(solve(&[]).unwrap().total_cost, 0.0);
    }
}
