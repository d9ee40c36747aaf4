//! Collaborative AI policies and scripted human stand-ins.
//!
//! All five agents share the planner in [`crate::planner`]; they differ only
//! in which targets they may plan over, how they value them, and when they
//! are allowed to act:
//!
//! | kind            | consideration set                         | values   | timing            |
//! |-----------------|-------------------------------------------|----------|-------------------|
//! | `ignorant`      | every visible target                      | as shown | immediate         |
//! | `omit`          | visible minus the human's mark and path   | as shown | immediate         |
//! | `divide`        | omit set, intercepts on the far half      | as shown | immediate         |
//! | `delay`         | omit set                                  | as shown | waits `ema_rt`    |
//! | `bottom_feeder` | omit set                                  | `15 - v` | immediate         |

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::engine::{Player, SimRng, World, MAX_VALUE};
use crate::error::AgentError;
use crate::geometry::{closest_approach, solve_interception, Vec2, EPS};
use crate::planner::{
    best_plan, enumerate_plans, evaluate_sequence, should_switch, DiscountModel, Plan,
    SearchContext,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Ignorant,
    Omit,
    Divide,
    Delay,
    BottomFeeder,
}

impl AgentKind {
    pub const ALL: [AgentKind; 5] = [
        AgentKind::Ignorant,
        AgentKind::Omit,
        AgentKind::Divide,
        AgentKind::Delay,
        AgentKind::BottomFeeder,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AgentKind::Ignorant => "ignorant",
            AgentKind::Omit => "omit",
            AgentKind::Divide => "divide",
            AgentKind::Delay => "delay",
            AgentKind::BottomFeeder => "bottom_feeder",
        }
    }

    /// Whether the agent is told what the human is doing.
    pub fn uses_intent(self) -> bool {
        self != AgentKind::Ignorant
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AgentKind {
    type Err = AgentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AgentKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| AgentError::UnknownAgent(s.to_string()))
    }
}

/// What the AI is told about the human player.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HumanIntent {
    pub marked_target: Option<u64>,
    /// Targets the human will sweep up on the way to its destination.
    pub path_targets: BTreeSet<u64>,
    pub human_pos: Vec2,
    pub last_response_times: VecDeque<f64>,
}

impl HumanIntent {
    const RT_HISTORY: usize = 5;

    /// Reads the human's mark and sweeps its current straight-line path
    /// against every visible target's motion.
    pub fn observe(world: &World) -> Self {
        let human = world.avatar(Player::Human);
        let radius = world.config().collision_radius;
        let mut path_targets = BTreeSet::new();
        if let Some(dest) = human.nav_dest {
            let offset = dest - human.pos;
            let dist = offset.norm();
            if dist > EPS {
                let horizon = dist / human.speed;
                let vel = offset * (human.speed / dist);
                for t in world.visible_targets() {
                    if Some(t.id) == human.mark {
                        continue;
                    }
                    let (gap, _) = closest_approach(human.pos, vel, t.pos, t.vel, horizon);
                    if gap <= radius {
                        path_targets.insert(t.id);
                    }
                }
            }
        }
        Self {
            marked_target: human.mark,
            path_targets,
            human_pos: human.pos,
            last_response_times: VecDeque::new(),
        }
    }

    pub fn with_response_times(mut self, rts: &VecDeque<f64>) -> Self {
        self.last_response_times = rts.iter().rev().take(Self::RT_HISTORY).rev().copied().collect();
        self
    }

    /// Targets an intent-aware agent must leave alone.
    pub fn claimed(&self) -> BTreeSet<u64> {
        let mut out = self.path_targets.clone();
        out.extend(self.marked_target);
        out
    }
}

/// Line through the arena centre, orthogonal to the human-to-centre
/// direction. `normal` points toward the human's side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivideLine {
    pub normal: Vec2,
}

impl DivideLine {
    /// Used before the human has ever left the exact centre.
    pub const FALLBACK: DivideLine = DivideLine {
        normal: Vec2::new(1.0, 0.0),
    };

    /// Line for the human at `human_pos`; keeps `previous` when the
    /// direction is undefined.
    pub fn through(human_pos: Vec2, previous: Option<DivideLine>) -> DivideLine {
        let r = human_pos.norm();
        if r > EPS {
            DivideLine {
                normal: human_pos * (1.0 / r),
            }
        } else {
            previous.unwrap_or(Self::FALLBACK)
        }
    }

    /// Strictly on the side away from the human.
    pub fn on_far_side(&self, p: Vec2) -> bool {
        p.dot(self.normal) < -EPS
    }
}

pub fn consideration_set(
    kind: AgentKind,
    world: &World,
    intent: &HumanIntent,
    divide: DivideLine,
) -> BTreeSet<u64> {
    let visible = world.visible_targets().map(|t| t.id);
    if !kind.uses_intent() {
        return visible.collect();
    }
    let claimed = intent.claimed();
    let mut set: BTreeSet<u64> = visible.filter(|id| !claimed.contains(id)).collect();
    if kind == AgentKind::Divide {
        let ai = world.avatar(Player::Ai);
        set.retain(|&id| {
            let t = world.target(id).expect("visible target");
            solve_interception(ai.pos, ai.speed, t.pos, t.vel, world.arena())
                .is_ok_and(|s| divide.on_far_side(s.point))
        });
    }
    set
}

/// Values the agent's planner sees for each visible target.
pub fn agent_values(kind: AgentKind, visible: &BTreeMap<u64, u32>) -> BTreeMap<u64, f64> {
    visible
        .iter()
        .map(|(&id, &v)| {
            let seen = match kind {
                AgentKind::BottomFeeder => MAX_VALUE - v.min(MAX_VALUE),
                _ => v,
            };
            (id, f64::from(seen))
        })
        .collect()
}

pub fn visible_values(world: &World) -> BTreeMap<u64, u32> {
    world.visible_targets().map(|t| (t.id, t.value)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayState {
    pub ema_rt: f64,
    pub pending_until: Option<f64>,
}

impl Default for DelayState {
    fn default() -> Self {
        Self {
            ema_rt: Self::INITIAL_RT,
            pending_until: None,
        }
    }
}

impl DelayState {
    pub const INITIAL_RT: f64 = 1.0;
    /// Span-5 smoothing, `2 / (5 + 1)`.
    pub const LAMBDA: f64 = 1.0 / 3.0;

    pub fn is_waiting(&self, now: f64) -> bool {
        self.pending_until.is_some_and(|until| now < until - 1e-9)
    }
}

pub fn update_delay(state: DelayState, observed_rt: f64) -> Result<DelayState, AgentError> {
    if !(observed_rt >= 0.0) {
        return Err(AgentError::NegativeResponseTime(observed_rt));
    }
    let l = DelayState::LAMBDA;
    Ok(DelayState {
        ema_rt: l * observed_rt + (1.0 - l) * state.ema_rt,
        ..state
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", content = "target_id", rename_all = "snake_case")]
pub enum AgentAction {
    Click(u64),
    ClickCenter,
    Wait,
}

/// Result of one planning round: the action plus what was seen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub t: f64,
    pub action: AgentAction,
    /// Plan the agent commits to after this decision.
    pub plan: Option<Plan>,
    pub consideration: BTreeSet<u64>,
    pub values: BTreeMap<u64, f64>,
    pub human_mark: Option<u64>,
    pub divide: Option<DivideLine>,
    pub ema_rt: f64,
    /// True when the delay rule suppressed planning.
    pub throttled: bool,
}

/// Per-round memory of one AI agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub kind: AgentKind,
    pub active_plan: Option<Vec<u64>>,
    pub delay: DelayState,
    pub divide: Option<DivideLine>,
    pub discount: DiscountModel,
}

impl AgentState {
    pub fn new(kind: AgentKind, alpha: f64) -> Self {
        let mut delay = DelayState::default();
        if kind == AgentKind::Delay {
            // the first selection of the round is delayed too
            delay.pending_until = Some(delay.ema_rt);
        }
        Self {
            kind,
            active_plan: None,
            delay,
            divide: None,
            discount: DiscountModel::new(alpha),
        }
    }

    /// Pure: plans on `world` without touching `self`.
    pub fn decide(&self, world: &World, intent: &HumanIntent) -> Decision {
        let values = agent_values(self.kind, &visible_values(world));
        self.decide_with_values(world, intent, values)
    }

    /// [`AgentState::decide`] with an explicit value map in place of the
    /// kind's own valuation.
    pub fn decide_with_values(
        &self,
        world: &World,
        intent: &HumanIntent,
        values: BTreeMap<u64, f64>,
    ) -> Decision {
        let now = world.clock();
        let ai = world.avatar(Player::Ai);
        let divide = (self.kind == AgentKind::Divide)
            .then(|| DivideLine::through(intent.human_pos, self.divide));
        let mut decision = Decision {
            t: now,
            action: AgentAction::Wait,
            plan: None,
            consideration: BTreeSet::new(),
            values: BTreeMap::new(),
            human_mark: intent.marked_target,
            divide,
            ema_rt: self.delay.ema_rt,
            throttled: false,
        };
        if self.kind == AgentKind::Delay && self.delay.is_waiting(now) {
            decision.throttled = true;
            decision.plan = self.active_plan.as_ref().and_then(|ids| {
                let all = world.visible_targets().map(|t| t.id).collect();
                evaluate_sequence(&self.search_context(world), ids, &all, &values)
            });
            return decision;
        }

        let consideration =
            consideration_set(self.kind, world, intent, divide.unwrap_or(DivideLine::FALLBACK));
        let ctx = self.search_context(world);
        let best = best_plan(&enumerate_plans(&ctx, &consideration, &values));
        let current = self
            .active_plan
            .as_ref()
            .filter(|ids| ai.mark == ids.first().copied())
            .and_then(|ids| evaluate_sequence(&ctx, ids, &consideration, &values));

        decision.action = match best {
            None => {
                decision.plan = None;
                let heading_home = ai.mark.is_none() && ai.nav_dest == Some(Vec2::ZERO);
                if heading_home {
                    AgentAction::Wait
                } else {
                    AgentAction::ClickCenter
                }
            }
            Some(best) => {
                if should_switch(current.as_ref().map(|p| p.discounted_value), best.discounted_value) {
                    let first = best.steps[0].target_id;
                    decision.plan = Some(best);
                    if ai.mark == Some(first) {
                        AgentAction::Wait
                    } else {
                        AgentAction::Click(first)
                    }
                } else {
                    decision.plan = current;
                    AgentAction::Wait
                }
            }
        };
        decision.consideration = consideration;
        decision.values = values;
        decision
    }

    /// Commits a decision produced by [`AgentState::decide`].
    pub fn commit(&mut self, decision: &Decision) {
        if decision.divide.is_some() {
            self.divide = decision.divide;
        }
        if decision.throttled {
            return;
        }
        self.active_plan = decision.plan.as_ref().map(Plan::ids);
        if decision.action != AgentAction::Wait {
            self.delay.pending_until = None;
        }
    }

    /// The target the agent was pursuing has been intercepted or has left.
    pub fn on_pursuit_ended(&mut self, clock: f64) {
        self.active_plan = None;
        if self.kind == AgentKind::Delay {
            self.delay.pending_until = Some(clock + self.delay.ema_rt);
        }
    }

    pub fn observe_human_rt(&mut self, rt: f64) -> Result<(), AgentError> {
        self.delay = update_delay(self.delay, rt)?;
        Ok(())
    }

    /// True when a delay has just expired and the agent should replan now.
    pub fn delay_expired(&self, now: f64) -> bool {
        self.kind == AgentKind::Delay
            && self.delay.pending_until.is_some()
            && !self.delay.is_waiting(now)
    }

    fn search_context<'w>(&'w self, world: &'w World) -> SearchContext<'w> {
        let ai = world.avatar(Player::Ai);
        SearchContext {
            targets: world.targets(),
            agent_pos: ai.pos,
            agent_speed: ai.speed,
            arena: world.arena(),
            discount: &self.discount,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProxyKind {
    Greedy,
    Random,
    Idle,
}

impl ProxyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProxyKind::Greedy => "greedy",
            ProxyKind::Random => "random",
            ProxyKind::Idle => "idle",
        }
    }
}

impl fmt::Display for ProxyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProxyKind {
    type Err = AgentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greedy" => Ok(ProxyKind::Greedy),
            "random" => Ok(ProxyKind::Random),
            "idle" => Ok(ProxyKind::Idle),
            other => Err(AgentError::UnknownProxy(other.to_string())),
        }
    }
}

/// Scripted stand-in for a participant in headless runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HumanProxy {
    pub kind: ProxyKind,
    /// Median reaction delay in seconds (lognormal).
    pub reaction_median: f64,
    pub reaction_sigma_log: f64,
    pub value_exponent: f64,
}

impl HumanProxy {
    pub fn new(kind: ProxyKind) -> Self {
        Self {
            kind,
            reaction_median: 0.8,
            reaction_sigma_log: 0.4,
            value_exponent: 1.0,
        }
    }

    pub fn sample_reaction(&self, rng: &mut SimRng) -> f64 {
        if self.reaction_sigma_log <= 0.0 {
            return self.reaction_median.max(0.0);
        }
        LogNormal::new(self.reaction_median.ln(), self.reaction_sigma_log)
            .expect("valid lognormal parameters")
            .sample(rng)
    }
}

impl Default for HumanProxy {
    fn default() -> Self {
        Self::new(ProxyKind::Greedy)
    }
}

pub fn proxy_decide(proxy: &HumanProxy, world: &World, rng: &mut SimRng) -> AgentAction {
    match proxy.kind {
        ProxyKind::Idle => AgentAction::Wait,
        ProxyKind::Random => {
            let ids: Vec<u64> = world.visible_targets().map(|t| t.id).collect();
            if ids.is_empty() {
                AgentAction::Wait
            } else {
                AgentAction::Click(ids[rng.index(ids.len())])
            }
        }
        ProxyKind::Greedy => {
            let human = world.avatar(Player::Human);
            let mut best: Option<(f64, u64)> = None;
            for t in world.visible_targets() {
                let Ok(sol) = solve_interception(human.pos, human.speed, t.pos, t.vel, world.arena())
                else {
                    continue;
                };
                if !sol.reachable {
                    continue;
                }
                let gain = f64::from(t.value).powf(proxy.value_exponent);
                let rate = if sol.time > 0.0 { gain / sol.time } else { f64::INFINITY };
                // visible targets come in id order, so strict > keeps the lowest id
                if best.is_none_or(|(r, _)| rate > r) {
                    best = Some((rate, t.id));
                }
            }
            best.map_or(AgentAction::Wait, |(_, id)| AgentAction::Click(id))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{ClickAction, TargetState, WorldConfig};

    fn world() -> World {
        World::new(WorldConfig::default().with_density(5).with_seed(21)).unwrap()
    }

    #[test]
    fn kind_names_round_trip() {
        for k in AgentKind::ALL {
            assert_eq!(k.as_str().parse::<AgentKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{k}\""));
        }
        assert!("nice".parse::<AgentKind>().is_err());
        assert_eq!("idle".parse::<ProxyKind>().unwrap(), ProxyKind::Idle);
    }

    #[test]
    fn ignorant_keeps_human_target() {
        let mut w = world();
        w.handle_click(Player::Human, ClickAction::Target(3)).unwrap();
        let intent = HumanIntent::observe(&w);
        let set = consideration_set(AgentKind::Ignorant, &w, &intent, DivideLine::FALLBACK);
        assert!(set.contains(&3));
        assert_eq!(set.len(), 5);
    }

    #[test]
    fn omit_excludes_mark_and_path_then_readmits() {
        let w = world();
        let mut intent = HumanIntent {
            marked_target: Some(3),
            path_targets: BTreeSet::from([1]),
            ..HumanIntent::default()
        };
        let set = consideration_set(AgentKind::Omit, &w, &intent, DivideLine::FALLBACK);
        assert!(!set.contains(&3) && !set.contains(&1));
        intent.marked_target = Some(4);
        intent.path_targets.clear();
        let set = consideration_set(AgentKind::Omit, &w, &intent, DivideLine::FALLBACK);
        assert!(set.contains(&3) && set.contains(&1) && !set.contains(&4));
    }

    #[test]
    fn path_sweep_finds_target_on_route() {
        let mut w = World::from_scenario(
            WorldConfig::default(),
            vec![
                still(0, -50.0, 5.0, 2),
                still(1, -50.0, 40.0, 2),
                still(2, 50.0, 0.0, 9),
            ],
            Vec2::new(-100.0, 0.0),
            Vec2::new(0.0, 200.0),
        )
        .unwrap();
        w.handle_click(Player::Human, ClickAction::Target(2)).unwrap();
        let intent = HumanIntent::observe(&w);
        assert_eq!(intent.marked_target, Some(2));
        assert_eq!(intent.path_targets, BTreeSet::from([0]));
        assert_eq!(intent.claimed(), BTreeSet::from([0, 2]));
    }

    #[test]
    fn divide_half_plane() {
        let line = DivideLine::through(Vec2::new(100.0, 0.0), None);
        assert!(line.on_far_side(Vec2::new(-50.0, 10.0)));
        assert!(!line.on_far_side(Vec2::new(50.0, 10.0)));
        assert!(!line.on_far_side(Vec2::new(0.0, 10.0)));
        let kept = DivideLine::through(Vec2::ZERO, Some(line));
        assert_eq!(kept, line);
        assert_eq!(DivideLine::through(Vec2::ZERO, None), DivideLine::FALLBACK);
    }

    #[test]
    fn bottom_feeder_inverts() {
        let vis = BTreeMap::from([(1, 0), (2, 15), (3, 7)]);
        let bf = agent_values(AgentKind::BottomFeeder, &vis);
        assert_eq!(bf[&1], 15.0);
        assert_eq!(bf[&2], 0.0);
        assert_eq!(bf[&3], 8.0);
        assert_eq!(agent_values(AgentKind::Omit, &vis)[&3], 7.0);
    }

    #[test]
    fn delay_ema() {
        let s = DelayState::default();
        assert_eq!(s.ema_rt, 1.0);
        let s1 = update_delay(s, 0.9).unwrap();
        assert!((s1.ema_rt - 0.966_666_666_666_666_7).abs() < 1e-12);
        let mut s5 = s;
        for _ in 0..5 {
            s5 = update_delay(s5, 0.5).unwrap();
        }
        let closed = 0.5 + 0.5 * (2.0f64 / 3.0).powi(5);
        assert!((s5.ema_rt - closed).abs() < 1e-12);
        assert!((s5.ema_rt - 0.5658).abs() < 1e-4);
        assert!(update_delay(s, -0.1).is_err());
    }

    #[test]
    fn delay_agent_waits_after_interception() {
        let mut agent = AgentState::new(AgentKind::Delay, 0.9);
        agent.on_pursuit_ended(10.0);
        assert!(agent.delay.is_waiting(10.5));
        assert!(agent.delay.is_waiting(10.99));
        assert!(!agent.delay.is_waiting(11.0));
    }

    #[test]
    fn empty_set_clicks_center() {
        let mut w = world();
        for id in 0..5 {
            let t = w.target(id).unwrap().clone();
            assert_eq!(t.state, TargetState::Visible);
        }
        // Divide with every interception point on the human's side: clear the set
        // by claiming every target instead.
        let intent = HumanIntent {
            marked_target: None,
            path_targets: (0..5).collect(),
            human_pos: Vec2::new(-100.0, 0.0),
            ..HumanIntent::default()
        };
        let agent = AgentState::new(AgentKind::Omit, 0.9);
        let d = agent.decide(&w, &intent);
        assert_eq!(d.action, AgentAction::ClickCenter);
        w.handle_click(Player::Ai, ClickAction::Center).unwrap();
        assert_eq!(agent.decide(&w, &intent).action, AgentAction::Wait);
    }

    #[test]
    fn decide_clicks_best_then_holds() {
        let mut w = world();
        let mut agent = AgentState::new(AgentKind::Ignorant, 0.9);
        let intent = HumanIntent::observe(&w);
        let d = agent.decide(&w, &intent);
        let AgentAction::Click(first) = d.action else {
            panic!("expected a click, got {:?}", d.action)
        };
        assert_eq!(d.plan.as_ref().unwrap().steps[0].target_id, first);
        agent.commit(&d);
        w.handle_click(Player::Ai, ClickAction::Target(first)).unwrap();
        let again = agent.decide(&w, &HumanIntent::observe(&w));
        assert_eq!(again.action, AgentAction::Wait);
    }

    fn still(id: u64, x: f64, y: f64, value: u32) -> crate::engine::Target {
        crate::engine::Target {
            id,
            pos: Vec2::new(x, y),
            vel: Vec2::ZERO,
            value,
            state: TargetState::Visible,
            spawn_time: 0.0,
        }
    }

    #[test]
    fn greedy_prefers_rate() {
        // Avatar speed 100: target 0 is 500 px away (5 s), target 1 is 100 px away (1 s).
        let mut cfg = WorldConfig::default();
        cfg.avatar_speed = 100.0;
        let w = World::from_scenario(
            cfg,
            vec![still(0, 400.0, 0.0, 10), still(1, -100.0, 100.0, 4)],
            Vec2::new(-100.0, 0.0),
            Vec2::new(100.0, 0.0),
        )
        .unwrap();
        let mut rng = SimRng::new(0, 1);
        let greedy = HumanProxy::new(ProxyKind::Greedy);
        assert_eq!(proxy_decide(&greedy, &w, &mut rng), AgentAction::Click(1));
        let idle = HumanProxy::new(ProxyKind::Idle);
        assert_eq!(proxy_decide(&idle, &w, &mut rng), AgentAction::Wait);
    }

    #[test]
    fn greedy_ties_go_to_lowest_id() {
        let w = World::from_scenario(
            WorldConfig::default(),
            vec![still(4, -100.0, 100.0, 6), still(9, -100.0, -100.0, 6)],
            Vec2::new(-100.0, 0.0),
            Vec2::new(100.0, 0.0),
        )
        .unwrap();
        let mut rng = SimRng::new(0, 1);
        assert_eq!(
            proxy_decide(&HumanProxy::default(), &w, &mut rng),
            AgentAction::Click(4)
        );
    }

    #[test]
    fn divide_excludes_human_side_interceptions() {
        // Human on +x: targets intercepted at x < 0 stay, x > 0 go.
        let w = World::from_scenario(
            WorldConfig::default(),
            vec![still(0, -50.0, 10.0, 3), still(1, 50.0, 10.0, 3)],
            Vec2::new(100.0, 0.0),
            Vec2::new(0.0, -200.0),
        )
        .unwrap();
        let intent = HumanIntent::observe(&w);
        let line = DivideLine::through(intent.human_pos, None);
        let set = consideration_set(AgentKind::Divide, &w, &intent, line);
        assert_eq!(set, BTreeSet::from([0]));
    }

    #[test]
    fn random_proxy_is_reproducible() {
        let w = world();
        let p = HumanProxy::new(ProxyKind::Random);
        let seq = |seed| {
            let mut rng = SimRng::new(seed, 1);
            (0..20).map(|_| proxy_decide(&p, &w, &mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(seq(4), seq(4));
    }
}
