//! Drives a round: AI agent and human (proxy or live input) around a [`World`].
//!
//! Per tick the order is fixed: human input, then the AI (if a replan is
//! due), then the engine step. The AI replans every 250 ms of simulated time
//! (rounded up to whole ticks) and immediately after any interception, exit,
//! or human click.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::agents::{
    proxy_decide, AgentAction, AgentKind, AgentState, Decision, HumanIntent, HumanProxy,
};
use crate::engine::{
    ClickAction, EpisodeLog, Event, EventKind, Player, SimRng, World, WorldConfig, PROXY_STREAM,
};
use crate::error::EngineError;

pub const REPLAN_INTERVAL_S: f64 = 0.25;
const PROXY_RETRY_S: f64 = 0.25;

fn to_click(action: AgentAction) -> Option<ClickAction> {
    match action {
        AgentAction::Click(id) => Some(ClickAction::Target(id)),
        AgentAction::ClickCenter => Some(ClickAction::Center),
        AgentAction::Wait => None,
    }
}

/// Owns the AI agent across a round and decides when it should replan.
#[derive(Debug, Clone)]
pub struct AiDriver {
    pub agent: AgentState,
    replan_ticks: u64,
    last_plan_tick: Option<u64>,
    triggered: bool,
    human_free_since: Option<f64>,
    human_rts: VecDeque<f64>,
}

impl AiDriver {
    pub fn new(kind: AgentKind, alpha: f64, dt: f64) -> Self {
        Self {
            agent: AgentState::new(kind, alpha),
            replan_ticks: ((REPLAN_INTERVAL_S / dt) - 1e-9).ceil().max(1.0) as u64,
            last_plan_tick: None,
            triggered: false,
            human_free_since: Some(0.0),
            human_rts: VecDeque::new(),
        }
    }

    /// Records a human click applied at `now` (response-time bookkeeping).
    pub fn on_human_click(&mut self, now: f64) {
        if let Some(since) = self.human_free_since.take() {
            let rt = (now - since).max(0.0);
            self.human_rts.push_back(rt);
            if self.human_rts.len() > 5 {
                self.human_rts.pop_front();
            }
            self.agent
                .observe_human_rt(rt)
                .expect("clamped response time is non-negative");
        }
        self.triggered = true;
    }

    pub fn is_due(&self, world: &World) -> bool {
        let now = world.clock();
        self.triggered
            || self.agent.delay_expired(now)
            || self
                .last_plan_tick
                .is_none_or(|last| world.tick_index() >= last + self.replan_ticks)
    }

    /// Replans if due and applies the resulting click. Returns the decision
    /// together with the intent it was based on.
    pub fn before_step(&mut self, world: &mut World) -> Option<(HumanIntent, Decision)> {
        if !self.is_due(world) {
            return None;
        }
        self.triggered = false;
        self.last_plan_tick = Some(world.tick_index());
        let intent = HumanIntent::observe(world).with_response_times(&self.human_rts);
        let decision = self.agent.decide(world, &intent);
        if let Some(click) = to_click(decision.action) {
            world
                .handle_click(Player::Ai, click)
                .expect("agent clicks only visible targets");
        }
        self.agent.commit(&decision);
        Some((intent, decision))
    }

    /// Digests the events of one engine step. `ai_mark` and `human_mark` are
    /// the marks held before the step.
    pub fn after_step(
        &mut self,
        world: &World,
        events: &[Event],
        ai_mark: Option<u64>,
        human_mark: Option<u64>,
    ) {
        let now = world.clock();
        for e in events {
            match e.kind {
                EventKind::Spawn { .. } => self.agent.discount.observe_spawn(e.t),
                EventKind::Intercept { target_id, .. } | EventKind::Exit { target_id, .. } => {
                    self.triggered = true;
                    if Some(target_id) == ai_mark {
                        self.agent.on_pursuit_ended(now);
                    }
                }
                _ => {}
            }
        }
        if human_mark.is_some() && world.avatar(Player::Human).mark.is_none() {
            self.human_free_since = Some(now);
        }
    }
}

/// Scripted human: waits a sampled reaction delay whenever it has no target,
/// then clicks by its policy.
#[derive(Debug, Clone)]
pub struct ProxyDriver {
    pub proxy: HumanProxy,
    rng: SimRng,
    next_at: Option<f64>,
}

impl ProxyDriver {
    pub fn new(proxy: HumanProxy, seed: u64) -> Self {
        Self {
            proxy,
            rng: SimRng::new(seed, PROXY_STREAM),
            next_at: None,
        }
    }

    pub fn action(&mut self, world: &World) -> Option<ClickAction> {
        let now = world.clock();
        if world.avatar(Player::Human).mark.is_some() {
            self.next_at = None;
            return None;
        }
        let at = *self
            .next_at
            .get_or_insert_with(|| now + self.proxy.sample_reaction(&mut self.rng));
        if now + 1e-9 < at {
            return None;
        }
        match to_click(proxy_decide(&self.proxy, world, &mut self.rng)) {
            Some(click) => {
                self.next_at = None;
                Some(click)
            }
            None => {
                self.next_at = Some(now + PROXY_RETRY_S);
                None
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSpec {
    pub world: WorldConfig,
    pub agent: AgentKind,
    pub proxy: HumanProxy,
    pub alpha: f64,
}

impl EpisodeSpec {
    pub fn new(agent: AgentKind, proxy: HumanProxy, density: usize, seed: u64) -> Self {
        Self {
            world: WorldConfig::default()
                .with_density(density)
                .with_seed(seed)
                .with_labels(agent.as_str(), proxy.kind.as_str()),
            agent,
            proxy,
            alpha: 0.9,
        }
    }

    pub fn with_round_length(mut self, seconds: f64) -> Self {
        self.world.round_length_s = seconds;
        self
    }
}

#[derive(Debug, Clone)]
pub struct EpisodeOutcome {
    pub log: EpisodeLog,
    pub decisions: Vec<Decision>,
}

/// Everything visible at the moment the AI decided, handed to observers.
pub struct DecisionPoint<'a> {
    pub world: &'a World,
    pub intent: &'a HumanIntent,
    /// Agent state before the decision was committed.
    pub agent: &'a AgentState,
    pub decision: &'a Decision,
}

pub fn run_episode(spec: &EpisodeSpec) -> Result<EpisodeOutcome, EngineError> {
    run_episode_observed(spec, |_| {})
}

/// One round in progress: the world plus the AI driving one avatar.
///
/// Each [`RoundDriver::advance`] applies the human's input, lets the AI act
/// if a replan is due, then steps the engine.
#[derive(Debug, Clone)]
pub struct RoundDriver {
    pub world: World,
    pub ai: AiDriver,
}

impl RoundDriver {
    pub fn new(config: WorldConfig, agent: AgentKind, alpha: f64) -> Result<Self, EngineError> {
        let dt = config.dt;
        Ok(Self {
            world: World::new(config)?,
            ai: AiDriver::new(agent, alpha, dt),
        })
    }

    /// Advances one tick. A rejected human click is reported in the first
    /// element and otherwise ignored; the tick still happens.
    pub fn advance(&mut self, human: Option<ClickAction>) -> (Result<(), EngineError>, Vec<Event>) {
        self.advance_observed(human, &mut |_| {})
    }

    pub fn advance_observed(
        &mut self,
        human: Option<ClickAction>,
        observe: &mut dyn FnMut(&DecisionPoint<'_>),
    ) -> (Result<(), EngineError>, Vec<Event>) {
        let mut click_result = Ok(());
        if let Some(click) = human {
            click_result = self.world.handle_click(Player::Human, click).map(|_| ());
            if click_result.is_ok() {
                self.ai.on_human_click(self.world.clock());
            }
        }

        if self.ai.is_due(&self.world) {
            let before = self.ai.agent.clone();
            let snapshot = self.world.snapshot();
            if let Some((intent, decision)) = self.ai.before_step(&mut self.world) {
                observe(&DecisionPoint {
                    world: &snapshot,
                    intent: &intent,
                    agent: &before,
                    decision: &decision,
                });
            }
        }

        let ai_mark = self.world.avatar(Player::Ai).mark;
        let human_mark = self.world.avatar(Player::Human).mark;
        let events = self.world.step();
        self.ai.after_step(&self.world, &events, ai_mark, human_mark);
        (click_result, events)
    }
}

/// Runs a headless round, calling `observe` at every AI decision (before its
/// click is applied) and checking engine invariants after every step.
pub fn run_episode_observed(
    spec: &EpisodeSpec,
    mut observe: impl FnMut(&DecisionPoint<'_>),
) -> Result<EpisodeOutcome, EngineError> {
    let mut round = RoundDriver::new(spec.world.clone(), spec.agent, spec.alpha)?;
    let mut human = ProxyDriver::new(spec.proxy, spec.world.seed);
    let mut decisions = Vec::new();

    while !round.world.is_finished() {
        let click = human.action(&round.world);
        let (clicked, _) = round.advance_observed(click, &mut |point| {
            observe(point);
            decisions.push(point.decision.clone());
        });
        clicked?;
        if let Err(violation) = round.world.check_invariants() {
            return Err(EngineError::Config(format!(
                "invariant violated at t={}: {violation}",
                round.world.clock()
            )));
        }
    }
    Ok(EpisodeOutcome {
        log: round.world.into_log(),
        decisions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::ProxyKind;
    use crate::engine::replay;

    #[test]
    fn short_episode_runs_and_replays() {
        for kind in AgentKind::ALL {
            let spec = EpisodeSpec::new(kind, HumanProxy::default(), 5, 17).with_round_length(30.0);
            let out = run_episode(&spec).unwrap();
            assert!(out.log.is_complete());
            assert!(!out.decisions.is_empty());
            replay(&out.log).unwrap();
        }
    }

    #[test]
    fn same_seed_same_log() {
        let spec = EpisodeSpec::new(AgentKind::Omit, HumanProxy::default(), 15, 3)
            .with_round_length(20.0);
        let a = run_episode(&spec).unwrap().log.to_jsonl();
        let b = run_episode(&spec).unwrap().log.to_jsonl();
        assert_eq!(a, b);
    }

    #[test]
    fn idle_proxy_never_clicks() {
        let spec = EpisodeSpec::new(AgentKind::Ignorant, HumanProxy::new(ProxyKind::Idle), 5, 9)
            .with_round_length(20.0);
        let out = run_episode(&spec).unwrap();
        assert!(!out.log.events.iter().any(|e| matches!(
            e.kind,
            EventKind::Click { player: Player::Human, .. }
        )));
    }

    #[test]
    fn replans_on_cadence() {
        let ai = AiDriver::new(AgentKind::Omit, 0.9, 0.02);
        assert_eq!(ai.replan_ticks, 13);
    }
}
