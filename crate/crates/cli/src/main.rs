mod serve;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use rayon::prelude::*;

use intercept_core::agents::{AgentKind, HumanProxy, ProxyKind};
use intercept_core::engine::{replay, EpisodeLog, Player};
use intercept_core::experiment::{
    export_choices, load_sessions, make_schedule, run_session, SessionConfig, SessionPlan,
};
use intercept_core::metrics::{compute_row, write_csv, MetricsConfig};
use intercept_core::preference::{
    build_design, cross_validate, evidence_label, fit, read_choices_csv, write_choices_csv,
    write_summary_csv, binomial_bf, FeatureSet, FitConfig,
};
use intercept_core::runner::{run_episode, EpisodeSpec};

#[derive(Parser)]
#[command(name = "intercept", version, about = "Collaborative target-interception game: simulation and analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run headless rounds of an agent with a scripted human.
    Simulate {
        #[arg(long)]
        agent: AgentKind,
        #[arg(long, default_value = "greedy")]
        proxy: ProxyKind,
        #[arg(long, default_value_t = 5)]
        density: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        episodes: u64,
        #[arg(long, default_value_t = 180.0)]
        round_length: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute one metrics row per finished log found under a directory.
    Metrics {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        refractory: f64,
    },
    /// Write counterbalanced session plans for a list of participants.
    Plan {
        #[arg(long)]
        participants: usize,
        /// Two agents, or `all` to cycle through every pair.
        #[arg(long, default_value = "all")]
        agents: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run complete four-round sessions headlessly and archive them.
    Session {
        #[arg(long)]
        participants: usize,
        #[arg(long, default_value = "all")]
        agents: String,
        #[arg(long, default_value = "greedy")]
        proxy: ProxyKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 180.0)]
        round_length: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Turn session archives into a pairwise choice table.
    ExportChoices {
        #[arg(long)]
        sessions: PathBuf,
        #[arg(long, default_value = "objective")]
        features: FeatureSet,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the pairwise preference model and cross-validate it.
    FitPreference {
        #[arg(long)]
        choices: PathBuf,
        #[arg(long, default_value = "objective")]
        features: FeatureSet,
        /// 0 skips cross-validation.
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        prior_sd: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Bayes factor for k successes in n trials against a fair coin.
    BinomialBf {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n: u64,
    },
    /// Host live sessions over websockets.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// JSON array of session plans, as written by `plan`.
        #[arg(long)]
        sessions: PathBuf,
        #[arg(long, default_value = "archive")]
        archive: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 180.0)]
        round_length: f64,
    },
    /// Re-simulate a log and check it reproduces exactly.
    Replay {
        #[arg(long)]
        log: PathBuf,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Simulate {
            agent,
            proxy,
            density,
            seed,
            episodes,
            round_length,
            out,
        } => simulate(agent, proxy, density, seed, episodes, round_length, &out),
        Command::Metrics {
            input,
            out,
            refractory,
        } => metrics(&input, &out, MetricsConfig { refractory_s: refractory }),
        Command::Plan {
            participants,
            agents,
            out,
        } => {
            let plans = plans(participants, &agents)?;
            fs::write(&out, serde_json::to_string_pretty(&plans)? + "\n")?;
            println!("wrote {} plans to {}", plans.len(), out.display());
            Ok(())
        }
        Command::Session {
            participants,
            agents,
            proxy,
            seed,
            round_length,
            out,
        } => sessions(participants, &agents, proxy, seed, round_length, &out),
        Command::ExportChoices {
            sessions,
            features,
            out,
        } => export(&sessions, features, &out),
        Command::FitPreference {
            choices,
            features,
            folds,
            seed,
            prior_sd,
            out,
        } => fit_preference(&choices, features, folds, seed, prior_sd, &out),
        Command::BinomialBf { k, n } => {
            let bf = binomial_bf(k, n)?;
            println!("BF10 = {bf:.6} ({} evidence)", evidence_label(bf.max(1.0 / bf)));
            Ok(())
        }
        Command::Serve {
            port,
            sessions,
            archive,
            seed,
            round_length,
        } => {
            let plans: Vec<SessionPlan> = serde_json::from_str(
                &fs::read_to_string(&sessions)
                    .with_context(|| format!("reading {}", sessions.display()))?,
            )?;
            serve::run(serve::ServeConfig {
                port,
                plans,
                archive,
                seed,
                round_length_s: round_length,
            })
        }
        Command::Replay { log } => {
            let recorded = EpisodeLog::read(&log)?;
            let world = replay(&recorded)?;
            println!(
                "replay matches: {} events, human {} ai {}{}",
                recorded.events.len(),
                world.score(Player::Human),
                world.score(Player::Ai),
                if recorded.is_complete() { "" } else { " (round unfinished)" }
            );
            Ok(())
        }
    }
}

fn simulate(
    agent: AgentKind,
    proxy: ProxyKind,
    density: usize,
    seed: u64,
    episodes: u64,
    round_length: f64,
    out: &Path,
) -> Result<()> {
    fs::create_dir_all(out)?;
    (seed..seed + episodes).into_par_iter().try_for_each(|s| -> Result<()> {
        let spec = EpisodeSpec::new(agent, HumanProxy::new(proxy), density, s)
            .with_round_length(round_length);
        let log = run_episode(&spec)?.log;
        log.write(out.join(format!("{agent}_d{density}_s{s}.jsonl")))?;
        Ok(())
    })?;
    println!("wrote {episodes} logs to {}", out.display());
    Ok(())
}

fn find_logs(dir: &Path, out: &mut Vec<PathBuf>) -> io::Result<()> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)?.filter_map(|e| e.ok().map(|e| e.path())).collect();
    entries.sort();
    for p in entries {
        if p.is_dir() {
            find_logs(&p, out)?;
        } else if p.extension().is_some_and(|x| x == "jsonl") {
            out.push(p);
        }
    }
    Ok(())
}

fn metrics(input: &Path, out: &Path, config: MetricsConfig) -> Result<()> {
    let mut paths = Vec::new();
    find_logs(input, &mut paths).with_context(|| format!("scanning {}", input.display()))?;
    let mut rows = Vec::new();
    for p in &paths {
        let log = EpisodeLog::read(p).with_context(|| format!("reading {}", p.display()))?;
        if !log.is_complete() {
            log::warn!("skipping unfinished round {}", p.display());
            continue;
        }
        rows.push(compute_row(&log, &config).with_context(|| format!("metrics for {}", p.display()))?);
    }
    write_csv(&rows, fs::File::create(out)?)?;
    println!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

fn agent_pairs(spec: &str) -> Result<Vec<[AgentKind; 2]>> {
    if spec == "all" {
        let mut pairs = Vec::new();
        for (i, &a) in AgentKind::ALL.iter().enumerate() {
            for &b in &AgentKind::ALL[i + 1..] {
                pairs.push([a, b]);
            }
        }
        return Ok(pairs);
    }
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let [a, b] = parts[..] else {
        bail!("--agents takes `all` or two comma-separated agent kinds");
    };
    Ok(vec![[a.parse()?, b.parse()?]])
}

fn plans(participants: usize, agents: &str) -> Result<Vec<SessionPlan>> {
    let pairs = agent_pairs(agents)?;
    (0..participants)
        .map(|i| {
            let pair = pairs[(i / 4) % pairs.len()];
            Ok(make_schedule(&format!("p{i:04}"), pair, (i % 4) as u8)?)
        })
        .collect()
}

fn sessions(
    participants: usize,
    agents: &str,
    proxy: ProxyKind,
    seed: u64,
    round_length: f64,
    out: &Path,
) -> Result<()> {
    let config = SessionConfig {
        round_length_s: round_length,
        proxy: HumanProxy::new(proxy),
        ..SessionConfig::default()
    };
    let plans = plans(participants, agents)?;
    plans.par_iter().enumerate().try_for_each(|(i, plan)| -> Result<()> {
        run_session(plan, &config, seed + i as u64, out.join(&plan.participant_id))?;
        Ok(())
    })?;
    println!("archived {} sessions under {}", plans.len(), out.display());
    Ok(())
}

fn export(dir: &Path, features: FeatureSet, out: &Path) -> Result<()> {
    let (sessions, excluded) = load_sessions(dir)?;
    for (path, why) in &excluded {
        log::warn!("excluded {}: {why}", path.display());
    }
    let (records, report) = export_choices(&sessions, features, &MetricsConfig::default());
    for line in &report.skipped {
        log::warn!("skipped {line}");
    }
    write_choices_csv(&records, fs::File::create(out)?)?;
    println!(
        "wrote {} choice records from {} sessions ({} excluded) to {}",
        records.len(),
        sessions.len(),
        excluded.len(),
        out.display()
    );
    Ok(())
}

fn fit_preference(
    choices: &Path,
    features: FeatureSet,
    folds: usize,
    seed: u64,
    prior_sd: f64,
    out: &Path,
) -> Result<()> {
    let records = read_choices_csv(fs::File::open(choices)?)?;
    let config = FitConfig {
        prior_sd,
        ..FitConfig::default()
    }
    .with_seed(seed);
    let design = build_design(&records, features, true)?;
    let posterior = fit(&design, &config)?;
    write_summary_csv(&posterior.summary, fs::File::create(out)?)?;
    println!("{} records, {features} features", records.len());
    println!("{:<18} {:>10} {:>8} {:>8} {:>18}", "coefficient", "BF_incl", "mean", "sd", "95% CI");
    for c in &posterior.summary.coefficients {
        println!(
            "{:<18} {:>10.3} {:>8.3} {:>8.3}   [{:>6.3}, {:>6.3}]",
            c.coefficient, c.bf_inclusion, c.mean, c.sd, c.ci_lower, c.ci_upper
        );
    }
    if folds > 0 {
        let cv = cross_validate(&records, features, folds, seed, &config)?;
        println!("{folds}-fold cross-validation: accuracy {:.3}, AUC {:.3}", cv.accuracy, cv.auc);
    }
    Ok(())
}
