use std::path::PathBuf;

use super::archive::{round_seeds, write_choice, write_plan, write_survey, SessionPaths};
use super::protocol::{ClientMessage, ServerMessage, PROTOCOL_VERSION, STATE_HZ};
use super::{
    check_free_text, ChoiceEvent, SessionPlan, SurveyResponse, BLOCKS, MIN_FREE_TEXT_CHARS,
    ROUNDS_PER_BLOCK, SURVEY_ITEMS,
};
use crate::engine::{ClickAction, EpisodeLog, WorldConfig};
use crate::error::{EngineError, ExperimentError};
use crate::runner::RoundDriver;

/// Where a live session currently is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// 0-based round index.
    Playing(usize),
    /// 0-based block index.
    Survey(usize),
    Choice(usize),
    Done,
    /// The client went away; the round in progress was archived unfinished.
    Disconnected,
}

/// Server side of one participant's live session, independent of transport.
///
/// Feed client frames to [`LiveSession::handle`] and call
/// [`LiveSession::tick`] once per engine timestep; both return the frames to
/// send back.
#[derive(Debug)]
pub struct LiveSession {
    plan: SessionPlan,
    session_id: String,
    seed: u64,
    round_length_s: f64,
    alpha: f64,
    archive: Option<SessionPaths>,
    phase: Phase,
    round: Option<RoundDriver>,
    pending: Option<ClickAction>,
    last_frame: u64,
    completed_logs: Vec<EpisodeLog>,
    surveys: Vec<[SurveyResponse; 2]>,
    choices: Vec<ChoiceEvent>,
}

impl LiveSession {
    pub fn new(
        plan: SessionPlan,
        session_id: impl Into<String>,
        seed: u64,
        archive: Option<PathBuf>,
    ) -> Result<Self, ExperimentError> {
        let archive = archive.map(SessionPaths::new);
        if let Some(paths) = &archive {
            write_plan(paths, &plan)?;
        }
        Ok(Self {
            plan,
            session_id: session_id.into(),
            seed,
            round_length_s: WorldConfig::default().round_length_s,
            alpha: 0.9,
            archive,
            phase: Phase::Playing(0),
            round: None,
            pending: None,
            last_frame: 0,
            completed_logs: Vec::new(),
            surveys: Vec::new(),
            choices: Vec::new(),
        })
    }

    /// Continues an archived session at its first unplayed round. Only
    /// sessions interrupted during play can be resumed.
    pub fn resume(
        plan: SessionPlan,
        session_id: impl Into<String>,
        seed: u64,
        archive: PathBuf,
    ) -> Result<Self, ExperimentError> {
        let paths = SessionPaths::new(&archive);
        let next = (1..=BLOCKS * ROUNDS_PER_BLOCK)
            .find(|&r| !paths.round(r).exists())
            .ok_or_else(|| ExperimentError::Protocol("every round has already been played".into()))?;
        let mut s = Self::new(plan, session_id, seed, Some(archive))?;
        s.phase = Phase::Playing(next - 1);
        Ok(s)
    }

    pub fn with_round_length(mut self, seconds: f64) -> Self {
        self.round_length_s = seconds;
        self
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn plan(&self) -> &SessionPlan {
        &self.plan
    }

    pub fn logs(&self) -> &[EpisodeLog] {
        &self.completed_logs
    }

    pub fn surveys(&self) -> &[[SurveyResponse; 2]] {
        &self.surveys
    }

    pub fn choices(&self) -> &[ChoiceEvent] {
        &self.choices
    }

    /// Frames to send when the client connects (or a new round starts).
    pub fn start(&mut self) -> Result<Vec<ServerMessage>, ExperimentError> {
        match self.phase {
            Phase::Playing(i) if self.round.is_none() => self.begin_round(i),
            Phase::Survey(b) => Ok(vec![self.survey_request(b)]),
            Phase::Choice(b) => Ok(vec![self.choice_request(b)]),
            _ => Ok(Vec::new()),
        }
    }

    fn begin_round(&mut self, index: usize) -> Result<Vec<ServerMessage>, ExperimentError> {
        let (_, block, r) = self.plan.round(index);
        let config = WorldConfig::default()
            .with_density(block.density)
            .with_seed(round_seeds(self.seed)[index])
            .with_round_length(self.round_length_s)
            .with_labels(r.agent.as_str(), "live");
        let hello = ServerMessage::Hello {
            protocol_version: PROTOCOL_VERSION,
            session_id: self.session_id.clone(),
            round: r.round,
            display_identity: r.identity,
            arena_radius: config.arena.radius,
            density: block.density,
            round_length_s: config.round_length_s,
        };
        let driver = RoundDriver::new(config, r.agent, self.alpha)?;
        let state = ServerMessage::state(&driver.world);
        self.round = Some(driver);
        self.pending = None;
        self.last_frame = 0;
        Ok(vec![hello, state])
    }

    fn survey_request(&self, b: usize) -> ServerMessage {
        ServerMessage::SurveyRequest {
            items: SURVEY_ITEMS.iter().map(|s| s.to_string()).collect(),
            identities: self.plan.blocks[b].identities(),
        }
    }

    fn choice_request(&self, b: usize) -> ServerMessage {
        ServerMessage::ChoiceRequest {
            identities: self.plan.blocks[b].identities(),
            min_free_text: MIN_FREE_TEXT_CHARS,
        }
    }

    /// Parses and applies one text frame; malformed frames produce an
    /// `error` frame and change nothing.
    pub fn handle_text(&mut self, text: &str) -> Vec<ServerMessage> {
        match ClientMessage::parse(text).and_then(|m| self.handle(m)) {
            Ok(out) => out,
            Err(e) => vec![ServerMessage::error(&e)],
        }
    }

    pub fn handle(&mut self, msg: ClientMessage) -> Result<Vec<ServerMessage>, ExperimentError> {
        match (self.phase, msg) {
            (Phase::Playing(_), ClientMessage::Click { target_id }) => {
                let world = &self.round.as_ref().expect("round in progress").world;
                if !world.target(target_id).is_some_and(|t| t.is_visible()) {
                    return Err(EngineError::InvalidTarget(target_id).into());
                }
                self.pending = Some(ClickAction::Target(target_id));
                Ok(Vec::new())
            }
            (Phase::Playing(_), ClientMessage::ClickCenter {}) => {
                self.pending = Some(ClickAction::Center);
                Ok(Vec::new())
            }
            (Phase::Survey(b), ClientMessage::SurveySubmit { responses }) => {
                let block = &self.plan.blocks[b];
                let ids = block.identities();
                let mut out = Vec::with_capacity(2);
                for id in ids {
                    let answer = responses.iter().find(|a| a.identity == id).ok_or_else(|| {
                        ExperimentError::InvalidSurvey(format!("no ratings for {id}"))
                    })?;
                    let response = SurveyResponse {
                        participant_id: self.plan.participant_id.clone(),
                        block: b + 1,
                        agent: block.agent_of(id).expect("identity of this block"),
                        identity: id,
                        items: answer.items(),
                    };
                    if response.is_stub() {
                        return Err(ExperimentError::InvalidSurvey(format!("no ratings for {id}")));
                    }
                    response.validate()?;
                    out.push(response);
                }
                if responses.len() != 2 {
                    return Err(ExperimentError::InvalidSurvey(
                        "expected ratings for exactly two agents".into(),
                    ));
                }
                let pair = [out[0].clone(), out[1].clone()];
                if let Some(paths) = &self.archive {
                    write_survey(paths, b + 1, &pair)?;
                }
                self.surveys.push(pair);
                self.phase = Phase::Choice(b);
                Ok(vec![self.choice_request(b)])
            }
            (Phase::Choice(b), ClientMessage::ChoiceSubmit { identity, free_text }) => {
                let block = &self.plan.blocks[b];
                let agent = block.agent_of(identity).ok_or_else(|| {
                    ExperimentError::InvalidChoice(format!("{identity} is not in this block"))
                })?;
                check_free_text(&free_text)?;
                let choice = ChoiceEvent {
                    participant_id: self.plan.participant_id.clone(),
                    block: b + 1,
                    identity,
                    agent,
                    free_text,
                };
                if let Some(paths) = &self.archive {
                    write_choice(paths, &choice)?;
                }
                self.choices.push(choice);
                if b + 1 < BLOCKS {
                    self.phase = Phase::Playing((b + 1) * ROUNDS_PER_BLOCK);
                    self.begin_round((b + 1) * ROUNDS_PER_BLOCK)
                } else {
                    self.phase = Phase::Done;
                    Ok(vec![ServerMessage::SessionComplete {}])
                }
            }
            (phase, msg) => Err(ExperimentError::Protocol(format!(
                "unexpected {} during {phase:?}",
                msg.kind_name()
            ))),
        }
    }

    /// Advances the running round by one engine step.
    pub fn tick(&mut self) -> Result<Vec<ServerMessage>, ExperimentError> {
        let Phase::Playing(index) = self.phase else {
            return Ok(Vec::new());
        };
        if self.round.is_none() {
            return self.begin_round(index);
        }
        let driver = self.round.as_mut().expect("round in progress");
        let mut out = Vec::new();
        let (clicked, _) = driver.advance(self.pending.take());
        if let Err(e) = clicked {
            out.push(ServerMessage::error(&e.into()));
        }
        let world = &driver.world;
        let frame = (world.clock() * STATE_HZ + 1e-9).floor() as u64;
        if frame > self.last_frame || world.is_finished() {
            self.last_frame = frame;
            out.push(ServerMessage::state(world));
        }
        if !world.is_finished() {
            return Ok(out);
        }

        let driver = self.round.take().expect("round in progress");
        out.push(ServerMessage::RoundEnd {
            scores: ServerMessage::scores(&driver.world),
        });
        let log = driver.world.into_log();
        let (b, _, r) = self.plan.round(index);
        if let Some(paths) = &self.archive {
            log.write(paths.round(r.round))?;
        }
        self.completed_logs.push(log);
        if (index + 1) % ROUNDS_PER_BLOCK == 0 {
            self.phase = Phase::Survey(b);
            out.push(self.survey_request(b));
        } else {
            self.phase = Phase::Playing(index + 1);
            out.extend(self.begin_round(index + 1)?);
        }
        Ok(out)
    }

    /// The client went away. A round in progress is archived without its
    /// `round_end` event, which marks it incomplete.
    pub fn disconnect(&mut self) -> Result<(), ExperimentError> {
        if let (Phase::Playing(index), Some(driver)) = (self.phase, self.round.take()) {
            let (_, _, r) = self.plan.round(index);
            if let Some(paths) = &self.archive {
                driver.world.into_log().write(paths.round(r.round))?;
            }
        }
        if self.phase != Phase::Done {
            self.phase = Phase::Disconnected;
        }
        Ok(())
    }
}

impl ClientMessage {
    fn kind_name(&self) -> &'static str {
        match self {
            ClientMessage::Click { .. } => "click",
            ClientMessage::ClickCenter {} => "click_center",
            ClientMessage::SurveySubmit { .. } => "survey_submit",
            ClientMessage::ChoiceSubmit { .. } => "choice_submit",
        }
    }
}
