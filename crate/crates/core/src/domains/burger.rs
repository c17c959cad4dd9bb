//! Burger cooking on a 1.4 m x 0.8 m table (surface at 0.9 m, pan at 1.2 m).
//!
//! Frame: origin on the floor below the table centre, x along the long side,
//! y towards the back where the robot bases are mounted, z up.
//!
//! Objects and their attributes:
//! - `bun_bottom.at`: `bun_bottom_spot | plate`
//! - `bun_top.at`: `bun_top_spot | plate`
//! - `patty.at`: `patty_spot | pan | plate`, `patty.cooked`: `no | yes`
//! - `cheese.at` / `lettuce.at`: `<item>_spot | <item>_board | plate`, `.sliced`: `no | yes`
//! - `plate.level`: number of layers stacked, `plate.closed`: top bun placed
//!
//! Assembly rules (a reconstruction, not measured data): the bottom bun goes
//! first on an empty plate; fillings (grilled patty, sliced cheese, sliced
//! lettuce) follow in any order; the top bun closes the burger and nothing is
//! stacked after it. Cheese and lettuce are sliced on their own boards, the
//! patty is grilled in the pan.
//!
//! The place pose on the plate rises by [`LAYER_PITCH`] per stacked layer, so
//! placing the same ingredient onto stacks of different heights are distinct,
//! non-equivalent actions. This is what keeps stacking steps sequential.

use std::collections::BTreeMap;

use crate::model::{ActionSpec, AgentSpec, Pose, Position};

use super::{Effect, Guard, RuleAction, RuleDomain, SymbolicState};

pub const TABLE_Z: f64 = 0.9;
pub const PAN_Z: f64 = 1.2;
pub const LAYER_PITCH: f64 = 0.07;

pub const GRIPPING: &str = "gripping";
pub const CUTTING: &str = "cutting";
pub const GRILLING: &str = "grilling";

const PICK_PLACE: &str = "pick-and-place";

fn stations() -> BTreeMap<String, Position> {
    [
        ("plate", [0.0, 0.0, TABLE_Z]),
        ("bun_bottom_spot", [-0.6, -0.3, TABLE_Z]),
        ("bun_top_spot", [-0.6, 0.3, TABLE_Z]),
        ("cheese_spot", [-0.35, 0.3, TABLE_Z]),
        ("cheese_board", [-0.3, -0.25, TABLE_Z]),
        ("lettuce_spot", [0.35, 0.3, TABLE_Z]),
        ("lettuce_board", [0.3, -0.25, TABLE_Z]),
        ("patty_spot", [0.6, -0.3, TABLE_Z]),
        ("pan", [0.6, 0.3, PAN_Z]),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

fn initial() -> SymbolicState {
    let mut s = SymbolicState::default();
    s.set("bun_bottom", "at", "bun_bottom_spot");
    s.set("bun_top", "at", "bun_top_spot");
    s.set("patty", "at", "patty_spot");
    s.set("patty", "cooked", "no");
    for item in ["cheese", "lettuce"] {
        s.set(item, "at", &format!("{item}_spot"));
        s.set(item, "sliced", "no");
    }
    s.set("plate", "level", "0");
    s.set("plate", "closed", "no");
    s
}

fn plate_pose(level: usize) -> Pose {
    Pose::new("place", [0.0, 0.0, TABLE_Z + level as f64 * LAYER_PITCH])
}

fn move_action(
    label: String,
    from: &Position,
    to: Pose,
    pre: Vec<Guard>,
    effects: Vec<Effect>,
) -> RuleAction {
    RuleAction {
        spec: ActionSpec::new(
            label,
            [GRIPPING],
            vec![Pose::new("pick", *from), to],
            PICK_PLACE,
        ),
        pre,
        effects,
    }
}

fn stack(object: &str, from: &str, level: usize, extra_pre: &[Guard], st: &BTreeMap<String, Position>) -> RuleAction {
    let mut pre = vec![
        Guard::eq(object, "at", from),
        Guard::eq("plate", "level", &level.to_string()),
        Guard::eq("plate", "closed", "no"),
    ];
    pre.extend_from_slice(extra_pre);
    move_action(
        format!("pp-{object}-to-plate-l{level}"),
        &st[from],
        plate_pose(level),
        pre,
        vec![
            Effect::set(object, "at", "plate"),
            Effect::set("plate", "level", &(level + 1).to_string()),
        ],
    )
}

pub fn burger() -> RuleDomain {
    let st = stations();
    let mut actions = Vec::new();

    actions.push(stack("bun_bottom", "bun_bottom_spot", 0, &[], &st));
    for level in 1..=4 {
        let mut a = stack("bun_top", "bun_top_spot", level, &[], &st);
        a.effects.push(Effect::set("plate", "closed", "yes"));
        actions.push(a);
    }

    actions.push(move_action(
        "pp-patty-to-pan".into(),
        &st["patty_spot"],
        Pose::new("place", st["pan"]),
        vec![Guard::eq("patty", "at", "patty_spot")],
        vec![Effect::set("patty", "at", "pan")],
    ));
    actions.push(RuleAction {
        spec: ActionSpec::new(
            "grill-patty",
            [GRILLING],
            vec![Pose::new("tool", st["pan"])],
            "grill",
        ),
        pre: vec![Guard::eq("patty", "at", "pan"), Guard::eq("patty", "cooked", "no")],
        effects: vec![Effect::set("patty", "cooked", "yes")],
    });
    for level in 1..=3 {
        actions.push(stack("patty", "pan", level, &[Guard::eq("patty", "cooked", "yes")], &st));
    }

    for item in ["cheese", "lettuce"] {
        let spot = format!("{item}_spot");
        let board = format!("{item}_board");
        actions.push(move_action(
            format!("pp-{item}-to-board"),
            &st[&spot],
            Pose::new("place", st[&board]),
            vec![Guard::eq(item, "at", &spot)],
            vec![Effect::set(item, "at", &board)],
        ));
        actions.push(RuleAction {
            spec: ActionSpec::new(
                format!("slice-{item}"),
                [CUTTING],
                vec![Pose::new("tool", st[&board])],
                "slice",
            ),
            pre: vec![Guard::eq(item, "at", &board), Guard::eq(item, "sliced", "no")],
            effects: vec![Effect::set(item, "sliced", "yes")],
        });
        for level in 1..=3 {
            actions.push(stack(item, &board, level, &[Guard::eq(item, "sliced", "yes")], &st));
        }
    }

    let mut d = RuleDomain::new(super::BURGER, vec![initial()], st, actions)
        .expect("bundled burger domain is well formed");
    d.description = "Burger assembly with gripping, cutting and grilling skills".into();
    d
}

/// The fully assembled burger: bun, grilled patty, sliced cheese and lettuce, top bun.
pub fn full_burger() -> SymbolicState {
    let mut s = initial();
    for object in ["bun_bottom", "bun_top", "patty", "cheese", "lettuce"] {
        s.set(object, "at", "plate");
    }
    s.set("patty", "cooked", "yes");
    s.set("cheese", "sliced", "yes");
    s.set("lettuce", "sliced", "yes");
    s.set("plate", "level", "5");
    s.set("plate", "closed", "yes");
    s
}

pub fn initial_state() -> SymbolicState {
    initial()
}

/// Two robots behind the table (gripping and cutting, 1.5 m reach) and two
/// humans in front of it (all skills, 5 m reach). Workloads are uniform per
/// agent: 0.5 for r1, 0.3 for r2, 1 for humans.
pub fn burger_agents() -> Vec<AgentSpec> {
    vec![
        AgentSpec::new("r1", [GRIPPING, CUTTING], [-0.35, 0.55, TABLE_Z], 1.5, 0.5),
        AgentSpec::new("r2", [GRIPPING, CUTTING], [0.35, 0.55, TABLE_Z], 1.5, 0.3),
        AgentSpec::new("h1", [GRIPPING, CUTTING, GRILLING], [-0.4, -0.9, 1.0], 5.0, 1.0),
        AgentSpec::new("h2", [GRIPPING, CUTTING, GRILLING], [0.4, -0.9, 1.0], 5.0, 1.0),
    ]
}
