//! Symbolic task domains. A domain is a set of guarded rewrite rules over states
//! that map object names to attribute maps; it serves as transition oracle,
//! dataset generator and renderer. The bundled burger and box-packing tasks are
//! built in code on the same engine that loads user domains from JSON.

pub mod boxpack;
pub mod burger;
mod svg;

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::abstraction::{Depiction, StateAbstraction, StateKey};
use crate::error::{Error, Result};
use crate::model::{ActionSpec, AgentSpec, Observation, Position};

pub use boxpack::{box_packing, box_packing_agents};
pub use burger::{burger, burger_agents};

pub const BURGER: &str = "burger";
pub const BOX_PACKING: &str = "box-packing";

/// Object name to attribute map. Serializes as a nested JSON object with sorted
/// keys, which is also its canonical form for hashing.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymbolicState(pub BTreeMap<String, BTreeMap<String, String>>);

impl SymbolicState {
    pub fn get(&self, object: &str, attr: &str) -> Option<&str> {
        self.0.get(object)?.get(attr).map(String::as_str)
    }

    pub fn set(&mut self, object: &str, attr: &str, value: &str) {
        self.0
            .entry(object.to_string())
            .or_default()
            .insert(attr.to_string(), value.to_string());
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("string maps always serialize")
    }

    pub fn key(&self) -> StateKey {
        StateKey::of_value(&self.to_value())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Test {
    Eq(String),
    Ne(String),
    In(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Guard {
    pub object: String,
    pub attr: String,
    #[serde(flatten)]
    pub test: Test,
}

impl Guard {
    pub fn eq(object: &str, attr: &str, value: &str) -> Self {
        Guard {
            object: object.into(),
            attr: attr.into(),
            test: Test::Eq(value.into()),
        }
    }

    pub fn ne(object: &str, attr: &str, value: &str) -> Self {
        Guard {
            object: object.into(),
            attr: attr.into(),
            test: Test::Ne(value.into()),
        }
    }

    fn holds(&self, state: &SymbolicState) -> bool {
        let v = state.get(&self.object, &self.attr);
        match &self.test {
            Test::Eq(x) => v == Some(x.as_str()),
            Test::Ne(x) => v != Some(x.as_str()),
            Test::In(xs) => v.is_some_and(|v| xs.iter().any(|x| x == v)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Effect {
    pub object: String,
    pub attr: String,
    pub value: String,
}

impl Effect {
    pub fn set(object: &str, attr: &str, value: &str) -> Self {
        Effect {
            object: object.into(),
            attr: attr.into(),
            value: value.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleAction {
    #[serde(flatten)]
    pub spec: ActionSpec,
    #[serde(default)]
    pub pre: Vec<Guard>,
    pub effects: Vec<Effect>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuisanceModel {
    /// Lighting scalar drawn uniformly from this interval.
    #[serde(default = "default_lighting")]
    pub lighting: [f64; 2],
    /// Per-object positional jitter half-width (m).
    #[serde(default = "default_object_jitter")]
    pub object_jitter: f64,
    /// Per-coordinate jitter half-width applied to recorded action poses (m).
    #[serde(default = "default_pose_jitter")]
    pub pose_jitter: f64,
}

fn default_lighting() -> [f64; 2] {
    [0.6, 1.4]
}
fn default_object_jitter() -> f64 {
    0.01
}
fn default_pose_jitter() -> f64 {
    0.004
}
fn default_max_depth() -> usize {
    20
}

impl Default for NuisanceModel {
    fn default() -> Self {
        NuisanceModel {
            lighting: default_lighting(),
            object_jitter: default_object_jitter(),
            pose_jitter: default_pose_jitter(),
        }
    }
}

/// A declarative domain: initial states, ground rewrite rules, station geometry
/// for rendering, and a nuisance model for synthetic observations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleDomain {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub initial_states: Vec<SymbolicState>,
    #[serde(default)]
    pub stations: BTreeMap<String, Position>,
    pub actions: Vec<RuleAction>,
    #[serde(default)]
    pub nuisance: NuisanceModel,
    /// Depth bound for reachable-state enumeration from the initial states.
    #[serde(default = "default_max_depth")]
    pub max_depth: usize,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

/// One reachable transition `from --action--> to`, as indices into
/// [`RuleDomain::reachable_states`] and [`RuleDomain::actions`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub from: usize,
    pub action: usize,
    pub to: usize,
}

impl RuleDomain {
    pub fn new(
        name: impl Into<String>,
        initial_states: Vec<SymbolicState>,
        stations: BTreeMap<String, Position>,
        actions: Vec<RuleAction>,
    ) -> Result<Self> {
        let mut domain = RuleDomain {
            name: name.into(),
            description: String::new(),
            initial_states,
            stations,
            actions,
            nuisance: NuisanceModel::default(),
            max_depth: default_max_depth(),
            index: HashMap::new(),
        };
        domain.finish()?;
        Ok(domain)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut domain: RuleDomain = serde_json::from_str(text)?;
        domain.finish()?;
        Ok(domain)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::io(&path, e))?;
        Self::from_json(&text)
    }

    fn finish(&mut self) -> Result<()> {
        let Some(first) = self.initial_states.first() else {
            return Err(Error::Invalid(format!("domain {}: no initial states", self.name)));
        };
        let schema = schema_of(first);
        for s in &self.initial_states {
            if schema_of(s) != schema {
                return Err(Error::Invalid(format!(
                    "domain {}: initial states disagree on objects/attributes",
                    self.name
                )));
            }
        }
        self.index.clear();
        for (i, a) in self.actions.iter().enumerate() {
            a.spec.validate()?;
            if self.index.insert(a.spec.label.clone(), i).is_some() {
                return Err(Error::Invalid(format!(
                    "domain {}: duplicate action label {:?}",
                    self.name, a.spec.label
                )));
            }
            let refs = a
                .pre
                .iter()
                .map(|g| (&g.object, &g.attr))
                .chain(a.effects.iter().map(|e| (&e.object, &e.attr)));
            for (object, attr) in refs {
                if !schema.contains(&(object.clone(), attr.clone())) {
                    return Err(Error::Invalid(format!(
                        "domain {}: action {:?} references unknown attribute {object}.{attr}",
                        self.name, a.spec.label
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn action(&self, label: &str) -> Option<&RuleAction> {
        self.index.get(label).map(|&i| &self.actions[i])
    }

    pub fn catalog(&self) -> impl Iterator<Item = &ActionSpec> {
        self.actions.iter().map(|a| &a.spec)
    }

    fn apply(&self, state: &SymbolicState, action: &RuleAction) -> Option<SymbolicState> {
        if !action.pre.iter().all(|g| g.holds(state)) {
            return None;
        }
        let mut next = state.clone();
        for e in &action.effects {
            next.set(&e.object, &e.attr, &e.value);
        }
        Some(next)
    }

    /// The transition oracle: the successor state, or `None` when the action is
    /// infeasible (including unknown labels).
    pub fn step(&self, state: &SymbolicState, label: &str) -> Option<SymbolicState> {
        self.apply(state, self.action(label)?)
    }

    pub fn feasible_actions(&self, state: &SymbolicState) -> Vec<&RuleAction> {
        self.actions
            .iter()
            .filter(|a| a.pre.iter().all(|g| g.holds(state)))
            .collect()
    }

    /// Breadth-first enumeration of states reachable from the initial states
    /// within `max_depth` actions, in discovery order.
    pub fn reachable_states(&self) -> Vec<SymbolicState> {
        self.explore().0
    }

    /// All transitions between reachable states whose source lies strictly
    /// inside the depth bound.
    pub fn transitions(&self) -> (Vec<SymbolicState>, Vec<Transition>) {
        self.explore()
    }

    fn explore(&self) -> (Vec<SymbolicState>, Vec<Transition>) {
        let mut states: Vec<SymbolicState> = Vec::new();
        let mut ids: HashMap<SymbolicState, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        for s in &self.initial_states {
            if !ids.contains_key(s) {
                ids.insert(s.clone(), states.len());
                queue.push_back((states.len(), 0usize));
                states.push(s.clone());
            }
        }
        let mut transitions = Vec::new();
        while let Some((from, depth)) = queue.pop_front() {
            if depth >= self.max_depth {
                continue;
            }
            for (ai, action) in self.actions.iter().enumerate() {
                let Some(next) = self.apply(&states[from], action) else {
                    continue;
                };
                let to = match ids.get(&next) {
                    Some(&i) => i,
                    None => {
                        let i = states.len();
                        ids.insert(next.clone(), i);
                        states.push(next);
                        queue.push_back((i, depth + 1));
                        i
                    }
                };
                transitions.push(Transition {
                    from,
                    action: ai,
                    to,
                });
            }
        }
        (states, transitions)
    }

    /// Parses an observation payload into a state of this domain, checking that
    /// it carries exactly the domain's objects and attributes.
    pub fn parse_state(&self, value: &Value) -> Result<SymbolicState> {
        let state: SymbolicState = serde_json::from_value(value.clone()).map_err(|e| {
            Error::UnknownPayload(format!("domain {}: {e}", self.name))
        })?;
        if schema_of(&state) != schema_of(&self.initial_states[0]) {
            return Err(Error::UnknownPayload(format!(
                "domain {}: payload objects/attributes do not match the domain schema",
                self.name
            )));
        }
        Ok(state)
    }

    pub fn sample_nuisance<R: Rng + ?Sized>(
        &self,
        state: &SymbolicState,
        rng: &mut R,
    ) -> BTreeMap<String, Value> {
        let [lo, hi] = self.nuisance.lighting;
        let lighting = if hi > lo { rng.gen_range(lo..hi) } else { lo };
        let j = self.nuisance.object_jitter;
        let jitter: BTreeMap<String, Value> = state
            .0
            .keys()
            .map(|obj| {
                let v: Vec<f64> = (0..3)
                    .map(|_| if j > 0.0 { rng.gen_range(-j..j) } else { 0.0 })
                    .collect();
                (obj.clone(), serde_json::json!(v))
            })
            .collect();
        BTreeMap::from([
            ("lighting".to_string(), serde_json::json!(lighting)),
            ("jitter".to_string(), serde_json::json!(jitter)),
        ])
    }

    /// A clean observation of `state` with no nuisance fields.
    pub fn observation(&self, state: &SymbolicState) -> Observation {
        Observation::new(state.to_value())
    }

    pub fn observe<R: Rng + ?Sized>(&self, state: &SymbolicState, rng: &mut R) -> Observation {
        Observation {
            state: state.to_value(),
            nuisance: self.sample_nuisance(state, rng),
        }
    }

    /// A recorded copy of a catalog action with pose measurement noise.
    pub fn jittered<R: Rng + ?Sized>(&self, spec: &ActionSpec, rng: &mut R) -> ActionSpec {
        let j = self.nuisance.pose_jitter;
        let mut out = spec.clone();
        if j > 0.0 {
            for pose in &mut out.poses {
                for c in &mut pose.position {
                    *c += rng.gen_range(-j..j);
                }
            }
        }
        out
    }

    pub fn render_state(&self, state: &SymbolicState) -> Depiction {
        Depiction {
            state: state.to_value(),
            svg: (!self.stations.is_empty()).then(|| svg::draw(self, state)),
        }
    }
}

fn schema_of(state: &SymbolicState) -> HashSet<(String, String)> {
    state
        .0
        .iter()
        .flat_map(|(o, attrs)| attrs.keys().map(move |a| (o.clone(), a.clone())))
        .collect()
}

impl StateAbstraction for RuleDomain {
    fn encode(&self, obs: &Observation) -> Result<StateKey> {
        Ok(self.parse_state(&obs.state)?.key())
    }

    fn render(&self, obs: &Observation) -> Result<Depiction> {
        Ok(self.render_state(&self.parse_state(&obs.state)?))
    }
}

pub fn by_name(name: &str) -> Result<RuleDomain> {
    match name {
        BURGER => Ok(burger()),
        BOX_PACKING | "box" => Ok(box_packing()),
        other => Err(Error::UnknownDomain(other.to_string())),
    }
}

/// Resolves a bundled domain name, or loads a declarative JSON definition.
pub fn resolve(name_or_path: &str) -> Result<RuleDomain> {
    match by_name(name_or_path) {
        Ok(d) => Ok(d),
        Err(Error::UnknownDomain(_)) if Path::new(name_or_path).is_file() => {
            RuleDomain::load(name_or_path)
        }
        Err(e) => Err(e),
    }
}

pub fn default_agents(domain: &str) -> Result<Vec<AgentSpec>> {
    match domain {
        BURGER => Ok(burger_agents()),
        BOX_PACKING | "box" => Ok(box_packing_agents()),
        other => Err(Error::UnknownDomain(other.to_string())),
    }
}
