//! Tuple datasets in line-delimited JSON, plus a seeded synthetic generator
//! driven by a domain's transition oracle.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domains::RuleDomain;
use crate::error::{Error, Result};
use crate::model::TransitionTuple;
use crate::par;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub tuples: Vec<TransitionTuple>,
    pub provenance: String,
}

impl Dataset {
    pub fn new(tuples: Vec<TransitionTuple>) -> Self {
        Dataset {
            tuples,
            provenance: String::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// `(action tuples, no-action tuples)`.
    pub fn counts(&self) -> (usize, usize) {
        let actions = self.tuples.iter().filter(|t| t.is_action()).count();
        (actions, self.tuples.len() - actions)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut dataset = Self::read(BufReader::new(file))?;
        dataset.provenance = path.display().to_string();
        Ok(dataset)
    }

    /// Parses one tuple per line. Blank lines are skipped; line numbers in
    /// errors are 1-based.
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let lines: Vec<(usize, String)> = reader
            .lines()
            .enumerate()
            .map(|(i, l)| l.map(|l| (i + 1, l)))
            .collect::<std::io::Result<_>>()
            .map_err(|e| Error::io("<dataset>", e))?;
        let parsed = par::map(&lines, par::AVAILABLE, |(line, text)| parse_line(*line, text));
        let tuples: Vec<TransitionTuple> = parsed
            .into_iter()
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        let dataset = Dataset::new(tuples);
        let (a, n) = dataset.counts();
        log::info!("loaded {} tuples ({a} action, {n} no-action)", dataset.len());
        Ok(dataset)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn write<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        for t in &self.tuples {
            serde_json::to_writer(&mut *w, t)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

fn parse_line(line: usize, text: &str) -> Result<Option<TransitionTuple>> {
    if text.trim().is_empty() {
        return Ok(None);
    }
    let tuple: TransitionTuple = serde_json::from_str(text).map_err(|e| Error::Parse {
        line,
        message: e.to_string(),
    })?;
    tuple.validate().map_err(|e| Error::Schema {
        line,
        message: e.to_string(),
    })?;
    Ok(Some(tuple))
}

/// Synthesizes `n_tuples` tuples, `round(n_tuples * action_fraction)` of them
/// action tuples, from `domain`'s reachable transition system.
///
/// Sampling sweeps the reachable transitions (and, for no-action tuples, the
/// reachable states) in seeded random order, reshuffling after every full
/// pass, so every transition is covered once the action budget allows it.
/// Action and no-action tuples are interleaved in random order.
pub fn generate(
    domain: &RuleDomain,
    n_tuples: usize,
    action_fraction: f64,
    seed: u64,
) -> Result<Dataset> {
    if !(0.0..=1.0).contains(&action_fraction) {
        return Err(Error::Invalid(format!(
            "action fraction must lie in [0, 1], got {action_fraction}"
        )));
    }
    let n_action = (n_tuples as f64 * action_fraction).round() as usize;
    let n_still = n_tuples - n_action;

    let (states, transitions) = domain.transitions();
    let sources: Vec<_> = transitions
        .iter()
        .filter(|t| t.from != t.to)
        .copied()
        .collect();
    if n_action > 0 && sources.is_empty() {
        return Err(Error::NoFeasibleAction {
            domain: domain.name.clone(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let action_order = sweep(&sources, n_action, &mut rng);
    let state_ids: Vec<usize> = (0..states.len()).collect();
    let still_order = sweep(&state_ids, n_still, &mut rng);
    let mut kinds: Vec<bool> = std::iter::repeat_n(true, n_action)
        .chain(std::iter::repeat_n(false, n_still))
        .collect();
    kinds.shuffle(&mut rng);

    let mut actions = action_order.into_iter();
    let mut stills = still_order.into_iter();
    let tuples = kinds
        .into_iter()
        .map(|is_action| {
            if is_action {
                let t = actions.next().expect("sized to n_action");
                let spec = &domain.actions[t.action].spec;
                let obs_a = domain.observe(&states[t.from], &mut rng);
                let obs_b = domain.observe(&states[t.to], &mut rng);
                let action = domain.jittered(spec, &mut rng);
                TransitionTuple::with_action(obs_a, obs_b, action)
            } else {
                let s = &states[stills.next().expect("sized to n_still")];
                let obs_a = domain.observe(s, &mut rng);
                let obs_b = domain.observe(s, &mut rng);
                TransitionTuple::no_action(obs_a, obs_b)
            }
        })
        .collect();

    Ok(Dataset {
        tuples,
        provenance: format!("generated:{}:n={n_tuples}:fraction={action_fraction}:seed={seed}", domain.name),
    })
}

fn sweep<T: Clone>(items: &[T], count: usize, rng: &mut ChaCha8Rng) -> Vec<T> {
    let mut out = Vec::with_capacity(count);
    if items.is_empty() {
        return out;
    }
    let mut pass = items.to_vec();
    while out.len() < count {
        pass.shuffle(rng);
        let take = (count - out.len()).min(pass.len());
        out.extend_from_slice(&pass[..take]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abstraction::StateAbstraction;
    use crate::domains;
    use crate::model::{ActionSpec, Observation};
    use serde_json::json;

    #[test]
    fn load_single_tuple() {
        let t = TransitionTuple::with_action(
            Observation::new(json!({"a": 1})),
            Observation::new(json!({"a": 2})),
            ActionSpec::new("u", ["grip"], vec![], "any"),
        );
        let line = serde_json::to_string(&t).unwrap();
        let d = Dataset::read(line.as_bytes()).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.counts(), (1, 0));
        assert_eq!(d.tuples[0], t);
    }

    #[test]
    fn schema_violation_names_the_line() {
        let ok = r#"{"obs_a":{"state":1},"obs_b":{"state":1},"b":0,"action":null}"#;
        let bad = r#"{"obs_a":{"state":1},"obs_b":{"state":1},"b":0,"action":{"label":"u","skills":[],"poses":[],"workload_class":"c"}}"#;
        let text = format!("{ok}\n{ok}\n{bad}\n");
        match Dataset::read(text.as_bytes()) {
            Err(Error::Schema { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected schema error, got {other:?}"),
        }
        match Dataset::read(format!("{ok}\nnot json\n").as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        let b2 = ok.replace("\"b\":0", "\"b\":2");
        assert!(matches!(Dataset::read(b2.as_bytes()), Err(Error::Schema { .. })));
    }

    #[test]
    fn empty_file_loads_empty() {
        let d = Dataset::read("".as_bytes()).unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn generated_split_matches_fraction() {
        let d = generate(&domains::burger(), 100, 0.58, 7).unwrap();
        assert_eq!(d.counts(), (58, 42));
        let none = generate(&domains::burger(), 30, 0.0, 7).unwrap();
        assert!(none.tuples.iter().all(|t| t.b == 0 && t.action.is_none()));
        assert!(generate(&domains::burger(), 10, 1.5, 7).is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let dom = domains::box_packing();
        let mut a = Vec::new();
        let mut b = Vec::new();
        generate(&dom, 200, 0.54, 11).unwrap().write(&mut a).unwrap();
        generate(&dom, 200, 0.54, 11).unwrap().write(&mut b).unwrap();
        assert_eq!(a, b);
        let mut c = Vec::new();
        generate(&dom, 200, 0.54, 12).unwrap().write(&mut c).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generated_actions_follow_the_oracle() {
        let dom = domains::burger();
        let d = generate(&dom, 600, 0.58, 3).unwrap();
        for t in d.tuples.iter().filter(|t| t.is_action()) {
            let a = dom.parse_state(&t.obs_a.state).unwrap();
            let b = dom.parse_state(&t.obs_b.state).unwrap();
            let label = &t.action.as_ref().unwrap().label;
            assert_eq!(dom.step(&a, label).unwrap(), b);
        }
        for t in d.tuples.iter().filter(|t| !t.is_action()) {
            assert_eq!(dom.encode(&t.obs_a).unwrap(), dom.encode(&t.obs_b).unwrap());
        }
    }

    #[test]
    fn save_then_load_round_trips() {
        let d = generate(&domains::box_packing(), 50, 0.5, 1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        d.save(&path).unwrap();
        let back = Dataset::load(&path).unwrap();
        assert_eq!(back.tuples, d.tuples);
    }
}
