//! Graphviz export of one roadmap layer.

use std::fmt::Write;

use crate::error::Result;
use crate::roadmap::{Layer, Roadmap};

const PALETTE: [&str; 5] = ["black", "blue", "darkgreen", "orange", "red"];

fn color(n_actions: usize) -> &'static str {
    PALETTE[n_actions.saturating_sub(1).min(PALETTE.len() - 1)]
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// P-LSR edges are colored by the number of actions they carry; C-LSR edges
/// are labeled with their assignment and cost.
pub fn export_dot(roadmap: &Roadmap, layer: Layer) -> Result<String> {
    let mut s = String::new();
    let name = layer.name();
    writeln!(s, "digraph {name} {{").unwrap();
    writeln!(s, "  node [shape=circle];").unwrap();
    for n in &roadmap.nodes {
        writeln!(s, "  {} [tooltip=\"{}\"];", n.id, n.key).unwrap();
    }
    match layer {
        Layer::Lsr => {
            for e in &roadmap.lsr_edges {
                writeln!(
                    s,
                    "  {} -> {} [label=\"{}\"];",
                    e.from,
                    e.to,
                    escape(&e.action.label)
                )
                .unwrap();
            }
        }
        Layer::Plsr => {
            for e in roadmap.par_edges()? {
                let labels: Vec<&str> = e.actions.iter().map(|a| a.label.as_str()).collect();
                writeln!(
                    s,
                    "  {} -> {} [color={}, label=\"{}\"];",
                    e.from,
                    e.to,
                    color(e.actions.len()),
                    escape(&labels.join(" | "))
                )
                .unwrap();
            }
        }
        Layer::Clsr => {
            for e in roadmap.clsr()? {
                let couples: Vec<String> = e
                    .couples
                    .iter()
                    .map(|c| format!("{}:{}", c.agent, c.label))
                    .collect();
                writeln!(
                    s,
                    "  {} -> {} [color={}, label=\"{}\\n{:.3}\"];",
                    e.from,
                    e.to,
                    color(e.couples.len()),
                    escape(&couples.join(" | ")),
                    e.cost
                )
                .unwrap();
            }
        }
    }
    s.push_str("}\n");
    Ok(s)
}
