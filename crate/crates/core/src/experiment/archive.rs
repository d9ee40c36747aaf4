use std::fs;
use std::path::{Path, PathBuf};

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{
    BlockPlan, ChoiceEvent, SessionPlan, SurveyResponse, BLOCKS, ROUNDS_PER_BLOCK,
};
use crate::agents::HumanProxy;
use crate::engine::{EpisodeLog, SimRng, SESSION_STREAM};
use crate::error::ExperimentError;
use crate::metrics::{compute_row, MetricsConfig, MetricsRow};
use crate::preference::{sigmoid, ChoiceRecord, FeatureSet, OBJECTIVE_FEATURES, SUBJECTIVE_FEATURES};
use crate::runner::{run_episode, EpisodeSpec};

/// File layout of one participant's archive directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionPaths {
    pub dir: PathBuf,
}

impl SessionPaths {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn plan(&self) -> PathBuf {
        self.dir.join("plan.json")
    }

    /// `round` is 1-based.
    pub fn round(&self, round: usize) -> PathBuf {
        self.dir.join(format!("round_{round}.jsonl"))
    }

    /// `block` is 1-based.
    pub fn survey(&self, block: usize) -> PathBuf {
        self.dir.join(format!("survey_block{block}.json"))
    }

    pub fn choice(&self, block: usize) -> PathBuf {
        self.dir.join(format!("choice_block{block}.json"))
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ExperimentError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, ExperimentError> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn write_plan(paths: &SessionPaths, plan: &SessionPlan) -> Result<(), ExperimentError> {
    fs::create_dir_all(&paths.dir)?;
    write_json(&paths.plan(), plan)
}

pub(crate) fn write_survey(
    paths: &SessionPaths,
    block: usize,
    responses: &[SurveyResponse; 2],
) -> Result<(), ExperimentError> {
    write_json(&paths.survey(block), responses)
}

pub(crate) fn write_choice(paths: &SessionPaths, choice: &ChoiceEvent) -> Result<(), ExperimentError> {
    write_json(&paths.choice(choice.block), choice)
}

/// Weights of the scripted chooser used by headless sessions: the log-odds
/// of preferring the first-presented agent are `intercept + w . (x - y)`
/// over the objective features.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChooserWeights {
    pub intercept: f64,
    /// In the order of [`OBJECTIVE_FEATURES`].
    pub weights: [f64; 5],
}

impl Default for ChooserWeights {
    fn default() -> Self {
        Self {
            intercept: 0.0,
            weights: [0.05, 0.0, -0.02, -0.1, -0.1],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub round_length_s: f64,
    pub proxy: HumanProxy,
    pub alpha: f64,
    pub chooser: ChooserWeights,
    pub metrics: MetricsConfig,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            round_length_s: 180.0,
            proxy: HumanProxy::default(),
            alpha: 0.9,
            chooser: ChooserWeights::default(),
            metrics: MetricsConfig::default(),
        }
    }
}

/// A complete, loaded session archive.
#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    pub plan: SessionPlan,
    /// Indexed by round, 0-based.
    pub logs: Vec<EpisodeLog>,
    /// Indexed by block, 0-based.
    pub surveys: Vec<[SurveyResponse; 2]>,
    pub choices: Vec<ChoiceEvent>,
}

/// Round seeds of a session, drawn from the session stream.
pub(crate) fn round_seeds(seed: u64) -> [u64; BLOCKS * ROUNDS_PER_BLOCK] {
    let mut rng = SimRng::new(seed, SESSION_STREAM);
    [(); BLOCKS * ROUNDS_PER_BLOCK].map(|_| rng.next_u64())
}

fn objective_features(row: &MetricsRow) -> Vec<(String, f64)> {
    let values = [
        row.human_points as f64,
        row.ai_points as f64,
        row.score_inequality as f64,
        row.ai_steals as f64,
        row.intersections as f64,
    ];
    OBJECTIVE_FEATURES
        .iter()
        .map(|n| n.to_string())
        .zip(values)
        .collect()
}

/// Runs all four rounds against a scripted human and writes the archive to
/// `dir`. Questionnaires are placeholders; choices come from the chooser.
pub fn run_session(
    plan: &SessionPlan,
    config: &SessionConfig,
    seed: u64,
    dir: impl AsRef<Path>,
) -> Result<Session, ExperimentError> {
    let paths = SessionPaths::new(dir.as_ref());
    write_plan(&paths, plan)?;
    let seeds = round_seeds(seed);
    let mut chooser_rng = SimRng::new(seed ^ 0x9e37_79b9_7f4a_7c15, SESSION_STREAM);

    let mut logs = Vec::new();
    let mut surveys = Vec::new();
    let mut choices = Vec::new();
    for (b, block) in plan.blocks.iter().enumerate() {
        let mut rows = Vec::new();
        for r in &block.rounds {
            let mut spec = EpisodeSpec::new(r.agent, config.proxy, block.density, seeds[r.round - 1])
                .with_round_length(config.round_length_s);
            spec.alpha = config.alpha;
            let log = run_episode(&spec)?.log;
            log.write(paths.round(r.round))?;
            rows.push(compute_row(&log, &config.metrics)?);
            logs.push(log);
        }

        let responses = block
            .rounds
            .map(|r| SurveyResponse::stub(&plan.participant_id, b + 1, r.agent, r.identity));
        write_survey(&paths, b + 1, &responses)?;
        surveys.push(responses);

        let (fx, fy) = (objective_features(&rows[0]), objective_features(&rows[1]));
        let eta = config.chooser.intercept
            + config
                .chooser
                .weights
                .iter()
                .zip(fx.iter().zip(&fy))
                .map(|(w, ((_, x), (_, y)))| w * (x - y))
                .sum::<f64>();
        let chose_first = chooser_rng.uniform() < sigmoid(eta);
        let picked = &block.rounds[if chose_first { 0 } else { 1 }];
        let choice = ChoiceEvent {
            participant_id: plan.participant_id.clone(),
            block: b + 1,
            identity: picked.identity,
            agent: picked.agent,
            free_text: "scripted choice from a headless session".into(),
        };
        write_choice(&paths, &choice)?;
        choices.push(choice);
    }
    Ok(Session {
        plan: plan.clone(),
        logs,
        surveys,
        choices,
    })
}

/// Loads an archive, failing with [`ExperimentError::IncompleteSession`]
/// when any round, questionnaire or choice is missing or unfinished.
pub fn load_session(dir: impl AsRef<Path>) -> Result<Session, ExperimentError> {
    let paths = SessionPaths::new(dir.as_ref());
    let incomplete = |what: String| {
        ExperimentError::IncompleteSession(format!("{}: {what}", paths.dir.display()))
    };
    if !paths.plan().exists() {
        return Err(incomplete("no plan.json".into()));
    }
    let plan: SessionPlan = read_json(&paths.plan())?;
    let mut logs = Vec::new();
    for (_, r) in plan.rounds() {
        let path = paths.round(r.round);
        if !path.exists() {
            return Err(incomplete(format!("round {} was never played", r.round)));
        }
        let log = EpisodeLog::read(&path)?;
        if !log.is_complete() {
            return Err(incomplete(format!("round {} ended early", r.round)));
        }
        logs.push(log);
    }
    let mut surveys = Vec::new();
    let mut choices = Vec::new();
    for (b, block) in plan.blocks.iter().enumerate() {
        let k = b + 1;
        if !paths.survey(k).exists() {
            return Err(incomplete(format!("no questionnaire for block {k}")));
        }
        let responses: [SurveyResponse; 2] = read_json(&paths.survey(k))?;
        for s in &responses {
            s.validate()?;
        }
        if !paths.choice(k).exists() {
            return Err(incomplete(format!("no choice for block {k}")));
        }
        let choice: ChoiceEvent = read_json(&paths.choice(k))?;
        choice.validate(block)?;
        surveys.push(responses);
        choices.push(choice);
    }
    Ok(Session {
        plan,
        logs,
        surveys,
        choices,
    })
}

/// Loads every session directory directly under `root` (sorted by name),
/// separating complete sessions from excluded ones.
pub fn load_sessions(
    root: impl AsRef<Path>,
) -> Result<(Vec<Session>, Vec<(PathBuf, ExperimentError)>), ExperimentError> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(root)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    let mut ok = Vec::new();
    let mut excluded = Vec::new();
    for d in dirs {
        match load_session(&d) {
            Ok(s) => ok.push(s),
            Err(e) => excluded.push((d, e)),
        }
    }
    Ok((ok, excluded))
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExportReport {
    /// One line per skipped `(participant, block)`.
    pub skipped: Vec<String>,
}

fn block_record(
    session: &Session,
    b: usize,
    block: &BlockPlan,
    set: FeatureSet,
    config: &MetricsConfig,
) -> Result<ChoiceRecord, String> {
    let (fx, fy) = match set {
        FeatureSet::Objective => {
            let row = |k: usize| {
                let log = &session.logs[b * ROUNDS_PER_BLOCK + k];
                compute_row(log, config).map_err(|e| format!("metrics unavailable: {e}"))
            };
            (objective_features(&row(0)?), objective_features(&row(1)?))
        }
        FeatureSet::Subjective => {
            let [x, y] = &session.surveys[b];
            if x.is_stub() || y.is_stub() {
                return Err("questionnaire is a placeholder".into());
            }
            let named = |s: &SurveyResponse| -> Vec<(String, f64)> {
                SUBJECTIVE_FEATURES
                    .iter()
                    .map(|n| n.to_string())
                    .zip(s.items.iter().map(|&q| f64::from(q)))
                    .collect()
            };
            (named(x), named(y))
        }
    };
    Ok(ChoiceRecord {
        participant_id: session.plan.participant_id.clone(),
        density: block.density,
        agent_x: block.rounds[0].agent,
        agent_y: block.rounds[1].agent,
        chose_x: session.choices[b].identity == block.rounds[0].identity,
        features_x: fx,
        features_y: fy,
    })
}

/// One choice record per (participant, block); X is the agent played first
/// in the block.
pub fn export_choices(
    sessions: &[Session],
    set: FeatureSet,
    config: &MetricsConfig,
) -> (Vec<ChoiceRecord>, ExportReport) {
    let mut records = Vec::new();
    let mut report = ExportReport::default();
    for s in sessions {
        for (b, block) in s.plan.blocks.iter().enumerate() {
            match block_record(s, b, block, set, config) {
                Ok(r) => records.push(r),
                Err(why) => report
                    .skipped
                    .push(format!("{} block {}: {why}", s.plan.participant_id, b + 1)),
            }
        }
    }
    (records, report)
}
