//! Box packing: four food items go into a box in the middle of the table, then
//! the cover is placed once all four are in.
//!
//! A two-armed robot stands behind the table (positive y). Arm bases and the
//! 0.8 m arm reach are set so that each arm reaches the box and exactly its two
//! closest items: the left arm `b1` gets mandarin and granola, the right arm
//! `b2` gets chocolate and juice. The human `h1` stands in front and only does
//! the dexterous cover placement.

use std::collections::BTreeMap;

use crate::model::{ActionSpec, AgentSpec, Pose, Position};

use super::{Effect, Guard, RuleAction, RuleDomain, SymbolicState};

pub const TABLE_Z: f64 = 0.8;
pub const ARM_REACH: f64 = 0.8;

pub const GRIPPING: &str = "gripping";
pub const DEXTEROUS: &str = "dexterous-manipulation";

pub const ITEMS: [&str; 4] = ["chocolate", "granola", "juice", "mandarin"];

fn stations() -> BTreeMap<String, Position> {
    [
        ("box", [0.0, 0.0, TABLE_Z]),
        ("mandarin_spot", [-0.35, -0.2, TABLE_Z]),
        ("granola_spot", [-0.55, 0.1, TABLE_Z]),
        ("chocolate_spot", [0.35, -0.2, TABLE_Z]),
        ("juice_spot", [0.55, 0.1, TABLE_Z]),
        ("cover_spot", [0.0, -0.45, TABLE_Z]),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

/// Slot inside the box for each item; items never share a slot.
fn slot(item: &str) -> Position {
    match item {
        "mandarin" => [-0.07, -0.05, TABLE_Z + 0.05],
        "granola" => [-0.07, 0.05, TABLE_Z + 0.05],
        "chocolate" => [0.07, -0.05, TABLE_Z + 0.05],
        "juice" => [0.07, 0.05, TABLE_Z + 0.05],
        _ => unreachable!("unknown box item {item}"),
    }
}

pub fn initial_state() -> SymbolicState {
    let mut s = SymbolicState::default();
    for item in ITEMS {
        s.set(item, "at", &format!("{item}_spot"));
    }
    s.set("cover", "at", "cover_spot");
    s
}

pub fn packed_and_closed() -> SymbolicState {
    let mut s = SymbolicState::default();
    for item in ITEMS {
        s.set(item, "at", "box");
    }
    s.set("cover", "at", "box");
    s
}

pub fn box_packing() -> RuleDomain {
    let st = stations();
    let mut actions: Vec<RuleAction> = ITEMS
        .iter()
        .map(|item| {
            let spot = format!("{item}_spot");
            RuleAction {
                spec: ActionSpec::new(
                    format!("move-{item}-into-box"),
                    [GRIPPING],
                    vec![Pose::new("pick", st[&spot]), Pose::new("place", slot(item))],
                    "pick-and-place",
                ),
                pre: vec![Guard::eq(item, "at", &spot)],
                effects: vec![Effect::set(item, "at", "box")],
            }
        })
        .collect();

    let mut pre: Vec<Guard> = ITEMS.iter().map(|i| Guard::eq(i, "at", "box")).collect();
    pre.push(Guard::eq("cover", "at", "cover_spot"));
    actions.push(RuleAction {
        spec: ActionSpec::new(
            "close-cover",
            [DEXTEROUS],
            vec![
                Pose::new("pick", st["cover_spot"]),
                Pose::new("place", [0.0, 0.0, TABLE_Z + 0.12]),
            ],
            "cover",
        ),
        pre,
        effects: vec![Effect::set("cover", "at", "box")],
    });

    let mut d = RuleDomain::new(super::BOX_PACKING, vec![initial_state()], st, actions)
        .expect("bundled box-packing domain is well formed");
    d.description = "Packing four items into a box and closing its cover".into();
    d
}

/// Left arm `b1`, right arm `b2` (gripping, workload 0.5) and human `h1`
/// (dexterous manipulation, workload 1).
pub fn box_packing_agents() -> Vec<AgentSpec> {
    vec![
        AgentSpec::new("b1", [GRIPPING], [-0.3, 0.5, 0.9], ARM_REACH, 0.5),
        AgentSpec::new("b2", [GRIPPING], [0.3, 0.5, 0.9], ARM_REACH, 0.5),
        AgentSpec::new("h1", [DEXTEROUS], [0.0, -0.9, 1.0], 5.0, 1.0),
    ]
}

/// A single agent able to do every action in the task.
pub fn omnipotent_agent() -> AgentSpec {
    AgentSpec::new("omni", [GRIPPING, DEXTEROUS], [0.0, -0.9, 1.0], 5.0, 1.0)
}
