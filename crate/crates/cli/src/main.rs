use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use clsr_core::abstraction::{CanonicalJson, StateAbstraction};
use clsr_core::clsr::build_clsr;
use clsr_core::dataset::{self, Dataset};
use clsr_core::domains;
use clsr_core::eval::{evaluate, sample_pairs, to_csv};
use clsr_core::lsr::Equivalence;
use clsr_core::model::{load_agents, validate_agents, AgentSpec, CostWeights, Observation};
use clsr_core::pipeline::{build_parallel, BuildConfig, BuildReport};
use clsr_core::plsr::DEFAULT_PATH_CAP;
use clsr_core::suggest::{suggest, CapabilityReport, Diagnosis};
use clsr_core::{Layer, PlanOutcome, Planner, Roadmap};

#[derive(Parser)]
#[command(name = "clsr", version, about = "Capability-aware latent space roadmaps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a transition-tuple dataset from a bundled or JSON domain.
    GenDataset {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        n: usize,
        /// Share of tuples that carry an action.
        #[arg(long, default_value_t = 0.5)]
        fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build all roadmap layers for a team.
    Build {
        #[arg(long)]
        dataset: PathBuf,
        /// Domain name or definition file. Without it states are keyed by
        /// their canonical JSON.
        #[arg(long)]
        domain: Option<String>,
        /// JSON array of agents. Defaults to the domain's bundled team.
        #[arg(long)]
        agents: Option<PathBuf>,
        #[arg(long, default_value_t = 0.05)]
        tau: f64,
        /// Cost weights as alpha,beta,gamma,mu.
        #[arg(long, value_parser = parse_weights, default_value = "1,1,1,1")]
        weights: CostWeights,
        #[arg(long, default_value_t = DEFAULT_PATH_CAP)]
        path_cap: usize,
        #[arg(long)]
        sequential: bool,
        /// Where parallel layers are cached between builds.
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        #[arg(long)]
        no_cache: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Plan between two observations.
    Plan {
        #[arg(long)]
        roadmap: PathBuf,
        #[arg(long)]
        start: PathBuf,
        #[arg(long)]
        goal: PathBuf,
        /// Overrides the domain recorded in the roadmap.
        #[arg(long)]
        domain: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Explain why no plan exists between two observations.
    Suggest {
        #[arg(long)]
        roadmap: PathBuf,
        #[arg(long)]
        start: PathBuf,
        #[arg(long)]
        goal: PathBuf,
        #[arg(long)]
        domain: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Plan-length statistics over random pairs for several agent sets.
    Bench {
        #[arg(long)]
        roadmap: PathBuf,
        #[arg(long)]
        agents: Option<PathBuf>,
        /// Comma-separated agent ids; repeat for each set.
        #[arg(long = "set", required = true)]
        sets: Vec<String>,
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        sequential: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Graphviz rendering of one layer.
    ExportDot {
        #[arg(long)]
        roadmap: PathBuf,
        #[arg(long, value_parser = parse_layer)]
        layer: Layer,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_weights(s: &str) -> Result<CostWeights, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let [alpha, beta, gamma, mu] = v[..] else {
        return Err(format!("expected four comma-separated weights, got {}", v.len()));
    };
    let w = CostWeights { alpha, beta, gamma, mu };
    w.validate().map_err(|e| e.to_string())?;
    Ok(w)
}

fn parse_layer(s: &str) -> Result<Layer, String> {
    s.parse::<Layer>().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CLSR_LOG", "warn")).init();
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::GenDataset {
            domain,
            n,
            fraction,
            seed,
            out,
        } => {
            if n == 0 {
                bail!("--n must be positive");
            }
            let dom = domains::resolve(&domain)?;
            let data = dataset::generate(&dom, n, fraction, seed)?;
            data.save(&out)?;
            let (actions, still) = data.counts();
            println!("wrote {} tuples ({actions} action, {still} no-action) to {}", data.len(), out.display());
            Ok(())
        }
        Command::Build {
            dataset,
            domain,
            agents,
            tau,
            weights,
            path_cap,
            sequential,
            cache_dir,
            no_cache,
            out,
        } => {
            let config = BuildConfig {
                equivalence: Equivalence::new(tau),
                path_cap,
                weights,
                parallel: !sequential,
                ..BuildConfig::default()
            };
            let cache = (!no_cache).then(|| cache_dir.unwrap_or_else(|| out.join("cache")));
            build(&dataset, domain.as_deref(), agents.as_deref(), &config, cache.as_deref(), &out)
        }
        Command::Plan {
            roadmap,
            start,
            goal,
            domain,
            out,
        } => plan(&roadmap, &start, &goal, domain.as_deref(), &out),
        Command::Suggest {
            roadmap,
            start,
            goal,
            domain,
            out,
        } => {
            let roadmap = Roadmap::load(&roadmap)?;
            let abs = abstraction(domain.as_deref().or(roadmap.domain.as_deref()))?;
            let report = suggest(&roadmap, abs.as_ref(), &read_obs(&start)?, &read_obs(&goal)?)?;
            write_suggestion(&out, &report)?;
            print!("{}", suggestion_text(&report));
            Ok(())
        }
        Command::Bench {
            roadmap,
            agents,
            sets,
            pairs,
            seed,
            sequential,
            out,
        } => {
            let roadmap = Roadmap::load(&roadmap)?;
            let pool = team_pool(agents.as_deref(), roadmap.domain.as_deref(), &roadmap)?;
            let sample = sample_pairs(&roadmap, pairs, seed);
            let mut results = Vec::new();
            for set in &sets {
                let team = select(&pool, set)?;
                let mut r = roadmap.clone();
                let config = clsr_core::clsr::ClsrConfig {
                    weights: roadmap.weights.unwrap_or_default(),
                    parallel: !sequential,
                };
                build_clsr(&mut r, &team, &config)?;
                let stats = evaluate(&r, &sample, !sequential)?;
                let name = team.iter().map(|a| a.id.as_str()).collect::<Vec<_>>().join("+");
                results.push((name, stats));
            }
            fs::write(&out, to_csv(&results)).with_context(|| format!("writing {}", out.display()))?;
            println!("evaluated {} pairs for {} agent sets", sample.len(), sets.len());
            Ok(())
        }
        Command::ExportDot { roadmap, layer, out } => {
            let roadmap = Roadmap::load(&roadmap)?;
            let dot = clsr_core::dot::export_dot(&roadmap, layer)?;
            fs::write(&out, dot).with_context(|| format!("writing {}", out.display()))?;
            Ok(())
        }
    }
}

fn abstraction(domain: Option<&str>) -> Result<Box<dyn StateAbstraction>> {
    Ok(match domain {
        Some(d) => Box::new(domains::resolve(d)?),
        None => Box::new(CanonicalJson),
    })
}

fn read_obs(path: &Path) -> Result<Observation> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Agents from a file, else the roadmap's own team, else the domain's bundled team.
fn team_pool(file: Option<&Path>, domain: Option<&str>, roadmap: &Roadmap) -> Result<Vec<AgentSpec>> {
    if let Some(f) = file {
        return Ok(load_agents(f)?);
    }
    if !roadmap.agents.is_empty() {
        return Ok(roadmap.agents.clone());
    }
    match domain {
        Some(d) => Ok(domains::default_agents(d)?),
        None => bail!("no agents given and the roadmap has no team or bundled domain"),
    }
}

fn select(pool: &[AgentSpec], ids: &str) -> Result<Vec<AgentSpec>> {
    let team = ids
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|id| {
            pool.iter()
                .find(|a| a.id == id)
                .cloned()
                .with_context(|| format!("unknown agent {id:?}"))
        })
        .collect::<Result<Vec<_>>>()?;
    validate_agents(&team)?;
    Ok(team)
}

/// Everything the parallel layers depend on.
fn cache_key(dataset: &[u8], domain: Option<&str>, config: &BuildConfig) -> String {
    let mut h = Sha256::new();
    h.update(dataset);
    h.update(config.equivalence.tau.to_le_bytes());
    h.update([config.equivalence.strict_labels as u8]);
    h.update((config.path_cap as u64).to_le_bytes());
    h.update(domain.unwrap_or("").as_bytes());
    h.finalize().iter().fold(String::new(), |mut s, b| {
        write!(s, "{b:02x}").unwrap();
        s
    })
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    roadmap: Roadmap,
    report: BuildReport,
}

#[derive(Serialize)]
struct CliBuildReport {
    #[serde(flatten)]
    report: BuildReport,
    /// "hit", "miss" or "disabled".
    cache: &'static str,
    dropped_edges: usize,
    agents: Vec<String>,
}

fn build(
    dataset: &Path,
    domain: Option<&str>,
    agents: Option<&Path>,
    config: &BuildConfig,
    cache: Option<&Path>,
    out: &Path,
) -> Result<()> {
    config.weights.validate()?;
    let bytes = fs::read(dataset).with_context(|| format!("reading {}", dataset.display()))?;
    let abs = abstraction(domain)?;
    let team = match (agents, domain) {
        (Some(f), _) => load_agents(f)?,
        (None, Some(d)) => domains::default_agents(d)
            .context("the domain has no bundled team; pass --agents")?,
        (None, None) => bail!("--agents is required without --domain"),
    };
    let key = cache_key(&bytes, domain, config);
    let cache_file = cache.map(|d| d.join(format!("plsr-{key}.json")));

    let cached = cache_file.as_deref().filter(|f| f.is_file()).and_then(|f| {
        let entry = fs::read_to_string(f)
            .ok()
            .and_then(|t| serde_json::from_str::<CacheEntry>(&t).ok());
        if entry.is_none() {
            log::warn!("ignoring unreadable cache file {}", f.display());
        }
        entry
    });
    let status = match (&cached, &cache_file) {
        (Some(_), _) => "hit",
        (None, Some(_)) => "miss",
        (None, None) => "disabled",
    };
    let (mut roadmap, mut report) = match cached {
        Some(entry) => (entry.roadmap, entry.report),
        None => {
            let data = Dataset::read(&bytes[..])?;
            let (mut roadmap, report) = build_parallel(&data, abs.as_ref(), config)?;
            roadmap.domain = domain.map(str::to_string);
            if let Some(f) = &cache_file {
                fs::create_dir_all(f.parent().unwrap())?;
                write_json(
                    f,
                    &CacheEntry {
                        roadmap: roadmap.clone(),
                        report: report.clone(),
                    },
                )?;
            }
            (roadmap, report)
        }
    };
    report.clsr = build_clsr(&mut roadmap, &team, &config.clsr())?;
    let dropped = report.clsr.candidate_edges - report.clsr.feasible_edges;

    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    roadmap.save(out.join("roadmap.json"))?;
    let cli_report = CliBuildReport {
        report,
        cache: status,
        dropped_edges: dropped,
        agents: roadmap.agents.iter().map(|a| a.id.clone()).collect(),
    };
    write_json(&out.join("build-report.json"), &cli_report)?;
    let r = &cli_report.report;
    println!(
        "{} nodes, {} lsr, {} plsr, {} clsr edges ({} dropped), cache {}",
        r.nodes, r.lsr_edges, r.plsr_edges, r.clsr.feasible_edges, dropped, status
    );
    Ok(())
}

fn plan(roadmap: &Path, start: &Path, goal: &Path, domain: Option<&str>, out: &Path) -> Result<()> {
    let roadmap = Roadmap::load(roadmap)?;
    let abs = abstraction(domain.or(roadmap.domain.as_deref()))?;
    let (start, goal) = (read_obs(start)?, read_obs(goal)?);
    let outcome = Planner::new(&roadmap)?.plan(abs.as_ref(), &start, &goal)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_json(&out.join("plan.json"), &outcome)?;
    match &outcome {
        PlanOutcome::Found(p) => {
            for (i, obs) in p.visual_plan.iter().enumerate() {
                let dep = abs.render(obs)?;
                write_json(&out.join(format!("state-{i:02}.json")), &dep.state)?;
                if let Some(svg) = &dep.svg {
                    fs::write(out.join(format!("state-{i:02}.svg")), svg)?;
                }
            }
            println!("plan with {} states, cost {:.4}", p.len(), p.total_cost);
            for (i, s) in p.steps.iter().enumerate() {
                let couples: Vec<String> = s.couples.iter().map(|c| format!("{}:{}", c.agent, c.label)).collect();
                println!("  {}: {}", i + 1, couples.join(", "));
            }
        }
        PlanOutcome::NoPath { .. } => {
            let report = suggest(&roadmap, abs.as_ref(), &start, &goal)?;
            write_suggestion(out, &report)?;
            println!("no plan for this team");
            print!("{}", suggestion_text(&report));
        }
    }
    Ok(())
}

fn write_suggestion(out: &Path, report: &CapabilityReport) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_json(&out.join("suggestion.json"), report)?;
    fs::write(out.join("suggestion.txt"), suggestion_text(report))?;
    Ok(())
}

fn suggestion_text(report: &CapabilityReport) -> String {
    let mut s = String::new();
    match report.diagnosis {
        Diagnosis::RoadmapDisconnected => {
            s.push_str("the goal is not reachable through any observed transition; more data is needed\n");
        }
        Diagnosis::MissingCapability => {
            let path = report.lsr_path.as_deref().unwrap_or_default();
            writeln!(s, "the goal is {} single actions away, but the team cannot perform:", path.len().saturating_sub(1)).unwrap();
            for b in &report.blocking {
                writeln!(s, "  {} ({} -> {})", b.action.label, b.from, b.to).unwrap();
                for g in &b.gaps {
                    let mut why = Vec::new();
                    if !g.missing_skills.is_empty() {
                        why.push(format!("lacks {}", g.missing_skills.join(", ")));
                    }
                    if !g.unreachable_poses.is_empty() {
                        let roles: Vec<&str> = g.unreachable_poses.iter().map(|p| p.role.as_str()).collect();
                        why.push(format!("cannot reach {}", roles.join(", ")));
                    }
                    writeln!(s, "    {}: {}", g.agent, why.join("; ")).unwrap();
                }
            }
            if report.alternatives {
                s.push_str("other shortest action sequences exist and may need different capabilities\n");
            }
        }
    }
    s
}
