//! Fixed-timestep simulation of the interception game.
//!
//! A [`World`] owns every target, both avatars, the scores and the spawn RNG.
//! It advances in 20 ms ticks; clicks are applied between ticks. Every state
//! change is appended to an [`EpisodeLog`], which is enough to replay the
//! round bit-for-bit from its header seed and recorded clicks.
//!
//! Spawning draws only from its own RNG stream and is triggered only by
//! targets crossing the perimeter. Intercepted targets keep moving as
//! invisible ghosts until they exit, so the spawn sequence does not depend on
//! how well anyone plays.

mod log;
mod rng;

pub use self::log::{EpisodeLog, Event, EventKind, LogHeader, Player, FORMAT_VERSION};
pub use self::rng::{SimRng, PROXY_STREAM, SESSION_STREAM, SPAWN_STREAM};

use serde::{Deserialize, Serialize};

use crate::error::EngineError;
use crate::geometry::{clamp_to_arena, solve_interception, Arena, Vec2, EPS};

/// Number of discrete point values (0..=15).
pub const VALUE_LEVELS: u32 = 16;
pub const MAX_VALUE: u32 = VALUE_LEVELS - 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldConfig {
    pub density: usize,
    pub seed: u64,
    pub round_length_s: f64,
    pub avatar_speed: f64,
    pub arena: Arena,
    pub dt: f64,
    /// Avatar half-width plus target radius.
    pub collision_radius: f64,
    /// Half-angle of the spawn heading cone around the inward normal.
    pub spawn_cone_deg: f64,
    /// Target speed range as fractions of the avatar speed.
    pub target_speed_frac: (f64, f64),
    pub snapshot_interval_ticks: u64,
    pub human_start: Vec2,
    pub ai_start: Vec2,
    pub agent_label: String,
    pub human_label: String,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self {
            density: 5,
            seed: 0,
            round_length_s: 180.0,
            avatar_speed: 200.0,
            arena: Arena::default(),
            dt: 0.02,
            collision_radius: 14.0,
            spawn_cone_deg: 60.0,
            target_speed_frac: (0.50, 0.99),
            snapshot_interval_ticks: 10,
            human_start: Vec2::new(-100.0, 0.0),
            ai_start: Vec2::new(100.0, 0.0),
            agent_label: "none".into(),
            human_label: "none".into(),
        }
    }
}

impl WorldConfig {
    pub fn with_density(mut self, density: usize) -> Self {
        self.density = density;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_round_length(mut self, seconds: f64) -> Self {
        self.round_length_s = seconds;
        self
    }

    pub fn with_labels(mut self, agent: impl Into<String>, human: impl Into<String>) -> Self {
        self.agent_label = agent.into();
        self.human_label = human.into();
        self
    }

    pub fn round_ticks(&self) -> u64 {
        (self.round_length_s / self.dt).round() as u64
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |m: &str| Err(EngineError::Config(m.to_string()));
        if self.density == 0 {
            return bad("density must be positive");
        }
        if !(self.round_length_s > 0.0) || !self.round_length_s.is_finite() {
            return bad("round length must be positive");
        }
        if !(self.dt > 0.0) {
            return bad("timestep must be positive");
        }
        if !(self.avatar_speed > 0.0) {
            return bad("avatar speed must be positive");
        }
        if !(self.arena.radius > 0.0) {
            return bad("arena radius must be positive");
        }
        let (lo, hi) = self.target_speed_frac;
        if !(0.0 < lo && lo <= hi && hi < 1.0) {
            return bad("target speed fractions must satisfy 0 < lo <= hi < 1");
        }
        if !(0.0..=90.0).contains(&self.spawn_cone_deg) {
            return bad("spawn cone half-angle must be within [0, 90) degrees");
        }
        if self.snapshot_interval_ticks == 0 {
            return bad("snapshot interval must be positive");
        }
        if !self.arena.contains(self.human_start) || !self.arena.contains(self.ai_start) {
            return bad("start posts must lie inside the arena");
        }
        Ok(())
    }

    pub fn header(&self) -> LogHeader {
        LogHeader {
            format_version: FORMAT_VERSION,
            seed: self.seed,
            density: self.density,
            agent: self.agent_label.clone(),
            human: self.human_label.clone(),
            round_length_s: self.round_length_s,
            dt: self.dt,
            avatar_speed: self.avatar_speed,
            arena_radius: self.arena.radius,
            collision_radius: self.collision_radius,
            spawn_cone_deg: self.spawn_cone_deg,
            snapshot_interval_ticks: self.snapshot_interval_ticks,
            human_start: self.human_start,
            ai_start: self.ai_start,
        }
    }

    pub fn from_header(h: &LogHeader) -> Result<Self, EngineError> {
        if h.format_version != FORMAT_VERSION {
            return Err(EngineError::UnsupportedVersion(h.format_version));
        }
        let cfg = Self {
            density: h.density,
            seed: h.seed,
            round_length_s: h.round_length_s,
            avatar_speed: h.avatar_speed,
            arena: Arena { radius: h.arena_radius },
            dt: h.dt,
            collision_radius: h.collision_radius,
            spawn_cone_deg: h.spawn_cone_deg,
            snapshot_interval_ticks: h.snapshot_interval_ticks,
            human_start: h.human_start,
            ai_start: h.ai_start,
            agent_label: h.agent.clone(),
            human_label: h.human.clone(),
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetState {
    Visible,
    /// Intercepted; still moving, invisible, until it reaches the perimeter.
    Ghost,
    Exited,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub id: u64,
    pub pos: Vec2,
    pub vel: Vec2,
    pub value: u32,
    pub state: TargetState,
    pub spawn_time: f64,
}

impl Target {
    pub fn is_visible(&self) -> bool {
        self.state == TargetState::Visible
    }

    pub fn position_after(&self, seconds: f64) -> Vec2 {
        self.pos + self.vel * seconds
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Avatar {
    pub owner: Player,
    pub pos: Vec2,
    pub speed: f64,
    pub mark: Option<u64>,
    pub nav_dest: Option<Vec2>,
}

impl Avatar {
    /// True once the avatar has reached its navigation destination (or has none).
    pub fn is_idle(&self) -> bool {
        match self.nav_dest {
            None => true,
            Some(d) => d.distance(self.pos) <= EPS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClickAction {
    Target(u64),
    Center,
}

/// Draws a point value from Beta(1, 2) discretised into 16 equal bins.
pub fn sample_target_value(rng: &mut SimRng) -> u32 {
    let u = rng.uniform();
    let x = 1.0 - (1.0 - u).sqrt();
    ((x * VALUE_LEVELS as f64).floor() as u32).min(MAX_VALUE)
}

/// Exact probability mass of each value under [`sample_target_value`]:
/// the integral of `2(1 - x)` over `[v/16, (v+1)/16)`.
pub fn target_value_masses() -> [f64; VALUE_LEVELS as usize] {
    let cdf = |x: f64| 2.0 * x - x * x;
    let n = VALUE_LEVELS as f64;
    std::array::from_fn(|v| cdf((v as f64 + 1.0) / n) - cdf(v as f64 / n))
}

#[derive(Debug, Clone)]
pub struct World {
    config: WorldConfig,
    tick: u64,
    targets: Vec<Target>,
    avatars: [Avatar; 2],
    scores: [u32; 2],
    total_spawned_value: u64,
    exited_visible_value: u64,
    next_id: u64,
    rng: SimRng,
    events: Vec<Event>,
}

impl World {
    /// Builds the world at clock 0 with `density` freshly spawned targets.
    pub fn new(config: WorldConfig) -> Result<Self, EngineError> {
        config.validate()?;
        let avatar = |owner, pos| Avatar {
            owner,
            pos,
            speed: config.avatar_speed,
            mark: None,
            nav_dest: None,
        };
        let mut world = Self {
            avatars: [
                avatar(Player::Human, config.human_start),
                avatar(Player::Ai, config.ai_start),
            ],
            rng: SimRng::new(config.seed, SPAWN_STREAM),
            config,
            tick: 0,
            targets: Vec::new(),
            scores: [0, 0],
            total_spawned_value: 0,
            exited_visible_value: 0,
            next_id: 0,
            events: Vec::new(),
        };
        for _ in 0..world.config.density {
            world.spawn_target();
        }
        world.push_snapshot();
        Ok(world)
    }

    /// Hand-built scene: the given targets replace the initial fill. Later
    /// respawns still come from the seeded stream.
    pub fn from_scenario(
        config: WorldConfig,
        targets: Vec<Target>,
        human_pos: Vec2,
        ai_pos: Vec2,
    ) -> Result<Self, EngineError> {
        let mut config = config;
        config.density = targets.len().max(1);
        config.human_start = human_pos;
        config.ai_start = ai_pos;
        let mut world = Self::new(config)?;
        world.events.clear();
        world.targets = targets;
        world.targets.sort_by_key(|t| t.id);
        world.next_id = world.targets.last().map_or(0, |t| t.id + 1);
        world.total_spawned_value = world.targets.iter().map(|t| u64::from(t.value)).sum();
        Ok(world)
    }

    /// Copy of the current state without the event history.
    pub fn snapshot(&self) -> World {
        World {
            config: self.config.clone(),
            tick: self.tick,
            targets: self.targets.clone(),
            avatars: self.avatars.clone(),
            scores: self.scores,
            total_spawned_value: self.total_spawned_value,
            exited_visible_value: self.exited_visible_value,
            next_id: self.next_id,
            rng: self.rng.clone(),
            events: Vec::new(),
        }
    }

    pub fn config(&self) -> &WorldConfig {
        &self.config
    }

    pub fn arena(&self) -> Arena {
        self.config.arena
    }

    pub fn tick_index(&self) -> u64 {
        self.tick
    }

    pub fn clock(&self) -> f64 {
        self.tick as f64 * self.config.dt
    }

    pub fn is_finished(&self) -> bool {
        self.tick >= self.config.round_ticks()
    }

    pub fn targets(&self) -> &[Target] {
        &self.targets
    }

    pub fn target(&self, id: u64) -> Option<&Target> {
        self.targets
            .binary_search_by_key(&id, |t| t.id)
            .ok()
            .map(|i| &self.targets[i])
    }

    pub fn visible_targets(&self) -> impl Iterator<Item = &Target> {
        self.targets.iter().filter(|t| t.is_visible())
    }

    pub fn count_visible(&self) -> usize {
        self.visible_targets().count()
    }

    pub fn count_ghosts(&self) -> usize {
        self.targets
            .iter()
            .filter(|t| t.state == TargetState::Ghost)
            .count()
    }

    pub fn avatar(&self, player: Player) -> &Avatar {
        &self.avatars[player.index()]
    }

    pub fn score(&self, player: Player) -> u32 {
        self.scores[player.index()]
    }

    pub fn total_spawned_value(&self) -> u64 {
        self.total_spawned_value
    }

    /// Value of targets that left the arena without being intercepted.
    pub fn exited_visible_value(&self) -> u64 {
        self.exited_visible_value
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn header(&self) -> LogHeader {
        self.config.header()
    }

    pub fn to_log(&self) -> EpisodeLog {
        EpisodeLog {
            header: self.header(),
            events: self.events.clone(),
        }
    }

    pub fn into_log(self) -> EpisodeLog {
        EpisodeLog {
            header: self.config.header(),
            events: self.events,
        }
    }

    fn push(&mut self, kind: EventKind) {
        let t = self.clock();
        self.events.push(Event { t, kind });
    }

    fn push_snapshot(&mut self) {
        self.push(EventKind::Snapshot {
            human_pos: self.avatars[0].pos,
            ai_pos: self.avatars[1].pos,
        });
    }

    /// Spawns one target on the perimeter, heading inward within the cone.
    pub fn spawn_target(&mut self) -> Target {
        let cfg = &self.config;
        let r = cfg.arena.radius;
        let phi = self.rng.uniform_range(0.0, std::f64::consts::TAU);
        let half = cfg.spawn_cone_deg.to_radians();
        let dev = self.rng.uniform_range(-half, half);
        let (lo, hi) = cfg.target_speed_frac;
        let speed = cfg.avatar_speed * self.rng.uniform_range(lo, hi);
        let value = sample_target_value(&mut self.rng);

        let outward = Vec2::from_angle(phi);
        let target = Target {
            id: self.next_id,
            pos: outward * r,
            vel: (-outward).rotate(dev) * speed,
            value,
            state: TargetState::Visible,
            spawn_time: self.clock(),
        };
        self.next_id += 1;
        self.total_spawned_value += u64::from(value);
        self.targets.push(target.clone());
        self.push(EventKind::Spawn {
            target_id: target.id,
            pos: target.pos,
            vel: target.vel,
            value,
        });
        target
    }

    /// Applies a click for `player`. Rejected clicks leave the world untouched.
    pub fn handle_click(
        &mut self,
        player: Player,
        action: ClickAction,
    ) -> Result<Vec<Event>, EngineError> {
        let start = self.events.len();
        let arena = self.config.arena;
        let idx = player.index();
        match action {
            ClickAction::Center => {
                self.push(EventKind::CenterClick { player });
                self.avatars[idx].mark = None;
                self.avatars[idx].nav_dest = Some(Vec2::ZERO);
                self.push(EventKind::MarkSet {
                    player,
                    target_id: None,
                    dest: Vec2::ZERO,
                    reachable: true,
                });
            }
            ClickAction::Target(id) => {
                let target = self
                    .target(id)
                    .filter(|t| t.is_visible())
                    .ok_or(EngineError::InvalidTarget(id))?;
                let avatar = &self.avatars[idx];
                let sol =
                    solve_interception(avatar.pos, avatar.speed, target.pos, target.vel, arena)?;
                let dest = if sol.reachable {
                    sol.point
                } else {
                    clamp_to_arena(sol.point, arena)
                };
                self.push(EventKind::Click {
                    player,
                    target_id: id,
                });
                self.avatars[idx].mark = Some(id);
                self.avatars[idx].nav_dest = Some(dest);
                self.push(EventKind::MarkSet {
                    player,
                    target_id: Some(id),
                    dest,
                    reachable: sol.reachable,
                });
            }
        }
        Ok(self.events[start..].to_vec())
    }

    /// Advances by `dt`, which must be zero (no-op) or the configured timestep.
    pub fn tick(&mut self, dt: f64) -> Result<Vec<Event>, EngineError> {
        if dt == 0.0 {
            return Ok(Vec::new());
        }
        if dt != self.config.dt {
            return Err(EngineError::Config(format!(
                "timestep is fixed at {} s, got {dt}",
                self.config.dt
            )));
        }
        Ok(self.step())
    }

    /// Advances one fixed timestep and returns the events it produced.
    pub fn step(&mut self) -> Vec<Event> {
        if self.is_finished() {
            return Vec::new();
        }
        let start = self.events.len();
        let dt = self.config.dt;
        self.tick += 1;

        for t in &mut self.targets {
            t.pos += t.vel * dt;
        }
        for a in &mut self.avatars {
            if let Some(dest) = a.nav_dest {
                let delta = dest - a.pos;
                let dist = delta.norm();
                let reach = a.speed * dt;
                if dist <= reach {
                    a.pos = dest;
                } else {
                    a.pos += delta * (reach / dist);
                }
            }
        }

        self.resolve_interceptions();
        self.resolve_exits();

        if self.tick % self.config.snapshot_interval_ticks == 0 {
            self.push_snapshot();
        }
        if self.is_finished() {
            self.push(EventKind::RoundEnd {
                human_score: self.scores[0],
                ai_score: self.scores[1],
            });
        }
        self.events[start..].to_vec()
    }

    fn clear_marks_on(&mut self, id: u64) {
        for a in &mut self.avatars {
            if a.mark == Some(id) {
                a.mark = None;
            }
        }
    }

    fn resolve_interceptions(&mut self) {
        let radius = self.config.collision_radius;
        let [human, ai] = [self.avatars[0].pos, self.avatars[1].pos];
        let mut caught = Vec::new();
        for t in self.targets.iter_mut().filter(|t| t.is_visible()) {
            let dh = t.pos.distance(human);
            let da = t.pos.distance(ai);
            let winner = match (dh <= radius, da <= radius) {
                (false, false) => continue,
                (true, false) => Player::Human,
                (false, true) => Player::Ai,
                // Closer avatar wins; exact ties go to the human.
                (true, true) => {
                    if da < dh {
                        Player::Ai
                    } else {
                        Player::Human
                    }
                }
            };
            t.state = TargetState::Ghost;
            caught.push((winner, t.id, t.value));
        }
        for (player, id, value) in caught {
            self.scores[player.index()] += value;
            self.clear_marks_on(id);
            self.push(EventKind::Intercept {
                player,
                target_id: id,
                value,
            });
        }
    }

    fn resolve_exits(&mut self) {
        let r = self.config.arena.radius;
        let exited: Vec<(u64, bool, u32)> = self
            .targets
            .iter()
            .filter(|t| t.pos.norm() > r)
            .map(|t| (t.id, t.state == TargetState::Ghost, t.value))
            .collect();
        if exited.is_empty() {
            return;
        }
        for &(id, intercepted, value) in &exited {
            if !intercepted {
                self.exited_visible_value += u64::from(value);
            }
            self.clear_marks_on(id);
            self.push(EventKind::Exit {
                target_id: id,
                intercepted,
            });
        }
        self.targets.retain(|t| t.pos.norm() <= r);
        for _ in 0..exited.len() {
            self.spawn_target();
        }
    }

    /// Checks the structural invariants, returning a description of the first
    /// violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        let visible = self.count_visible() as u64;
        let ghosts = self.count_ghosts() as u64;
        let density = self.config.density as u64;
        if visible > density {
            return Err(format!("{visible} visible targets exceed density {density}"));
        }
        if visible + ghosts != density {
            return Err(format!(
                "visible {visible} + ghost {ghosts} != density {density}"
            ));
        }
        let live: u64 = self
            .visible_targets()
            .map(|t| u64::from(t.value))
            .sum();
        let accounted = u64::from(self.scores[0])
            + u64::from(self.scores[1])
            + self.exited_visible_value
            + live;
        if accounted != self.total_spawned_value {
            return Err(format!(
                "score conservation: {accounted} accounted vs {} spawned",
                self.total_spawned_value
            ));
        }
        for a in &self.avatars {
            if a.pos.norm() > self.config.arena.radius + 1e-6 {
                return Err(format!("{:?} avatar left the arena", a.owner));
            }
            if let Some(m) = a.mark {
                if !self.target(m).is_some_and(|t| t.is_visible()) {
                    return Err(format!("{:?} marks non-visible target {m}", a.owner));
                }
            }
        }
        Ok(())
    }
}

/// Re-simulates a log from its header seed and recorded clicks, failing at the
/// first event that differs from the recording.
pub fn replay(log: &EpisodeLog) -> Result<World, EngineError> {
    let config = WorldConfig::from_header(&log.header)?;
    let dt = config.dt;
    let tick_of = |t: f64| (t / dt).round() as u64;
    let last_tick = if log.is_complete() {
        config.round_ticks()
    } else {
        log.events.last().map(|e| tick_of(e.t)).unwrap_or(0)
    };

    let mut clicks = log
        .events
        .iter()
        .filter(|e| e.is_input())
        .map(|e| {
            let (player, action) = match e.kind {
                EventKind::Click { player, target_id } => (player, ClickAction::Target(target_id)),
                EventKind::CenterClick { player } => (player, ClickAction::Center),
                _ => unreachable!("filtered to inputs"),
            };
            (tick_of(e.t), player, action)
        })
        .peekable();

    let mut world = World::new(config)?;
    loop {
        while let Some(&(tick, player, action)) = clicks.peek() {
            if tick != world.tick_index() {
                break;
            }
            clicks.next();
            // A click the engine rejects shows up as a divergence below.
            let _ = world.handle_click(player, action);
        }
        if world.tick_index() >= last_tick {
            break;
        }
        world.step();
    }

    let expected = log.event_lines();
    let actual = world.to_log().event_lines();
    for (index, pair) in expected.iter().zip(actual.iter()).enumerate() {
        if pair.0 != pair.1 {
            return Err(EngineError::ReplayDivergence {
                index,
                expected: pair.0.clone(),
                actual: pair.1.clone(),
            });
        }
    }
    if expected.len() != actual.len() {
        let index = expected.len().min(actual.len());
        return Err(EngineError::ReplayDivergence {
            index,
            expected: expected.get(index).cloned().unwrap_or_else(|| "<end>".into()),
            actual: actual.get(index).cloned().unwrap_or_else(|| "<end>".into()),
        });
    }
    Ok(world)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn world(density: usize, seed: u64) -> World {
        World::new(WorldConfig::default().with_density(density).with_seed(seed)).unwrap()
    }

    #[test]
    fn initial_fill() {
        let w = world(5, 1);
        assert_eq!(w.count_visible(), 5);
        assert_eq!(w.count_ghosts(), 0);
        let w = world(15, 1);
        assert_eq!(w.count_visible(), 15);
        assert_eq!(w.clock(), 0.0);
        assert_eq!(w.score(Player::Human), 0);
        assert_eq!(w.avatar(Player::Human).pos, Vec2::new(-100.0, 0.0));
        assert_eq!(w.avatar(Player::Ai).pos, Vec2::new(100.0, 0.0));
    }

    #[test]
    fn same_seed_same_targets() {
        assert_eq!(world(5, 99).targets(), world(5, 99).targets());
        assert_ne!(world(5, 99).targets(), world(5, 100).targets());
    }

    #[test]
    fn bad_config_is_rejected() {
        assert!(World::new(WorldConfig::default().with_density(0)).is_err());
        assert!(World::new(WorldConfig::default().with_round_length(0.0)).is_err());
        assert!(World::new(WorldConfig::default().with_round_length(-3.0)).is_err());
    }

    #[test]
    fn spawns_on_edge_inside_cone() {
        let mut w = world(5, 3);
        for _ in 0..500 {
            let t = w.spawn_target();
            assert!((t.pos.norm() - 400.0).abs() < 1e-9);
            let inward = -t.pos * (1.0 / t.pos.norm());
            let cos = inward.dot(t.vel) / t.vel.norm();
            assert!(cos >= 60f64.to_radians().cos() - 1e-12);
            let frac = t.vel.norm() / 200.0;
            assert!((0.50 - 1e-12..=0.99 + 1e-12).contains(&frac));
            assert!(t.value <= 15);
        }
    }

    #[test]
    fn value_masses_match_closed_forms() {
        let m = target_value_masses();
        assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((m[0] - 31.0 / 256.0).abs() < 1e-15);
        assert!((m[15] - 1.0 / 256.0).abs() < 1e-15);
        assert!(m.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn speed_histogram_is_uniform() {
        let mut w = world(1, 11);
        let n = 100_000;
        let mut bins = [0u32; 10];
        for _ in 0..n {
            let t = w.spawn_target();
            let frac = (t.vel.norm() / 200.0 - 0.50) / 0.49;
            bins[((frac * 10.0) as usize).min(9)] += 1;
        }
        let expected = n as f64 / 10.0;
        let sigma = (n as f64 * 0.1 * 0.9).sqrt();
        let chi2: f64 = bins
            .iter()
            .map(|&b| (b as f64 - expected).powi(2) / expected)
            .sum();
        for b in bins {
            assert!((b as f64 - expected).abs() < 3.0 * sigma, "bin {b}");
        }
        // chi-square with 9 dof; 99.9th percentile is 27.88
        assert!(chi2 < 27.88, "chi2 {chi2}");
    }

    #[test]
    fn center_click_clears_mark() {
        let mut w = world(5, 2);
        w.handle_click(Player::Human, ClickAction::Target(0)).unwrap();
        assert_eq!(w.avatar(Player::Human).mark, Some(0));
        w.handle_click(Player::Human, ClickAction::Center).unwrap();
        assert_eq!(w.avatar(Player::Human).mark, None);
        assert_eq!(w.avatar(Player::Human).nav_dest, Some(Vec2::ZERO));
    }

    #[test]
    fn target_click_sets_interception_destination() {
        let mut w = world(5, 2);
        let t = w.target(1).unwrap().clone();
        let a = w.avatar(Player::Ai).clone();
        let sol = solve_interception(a.pos, a.speed, t.pos, t.vel, w.arena()).unwrap();
        let events = w.handle_click(Player::Ai, ClickAction::Target(1)).unwrap();
        assert_eq!(events.len(), 2);
        let expected = if sol.reachable {
            sol.point
        } else {
            clamp_to_arena(sol.point, w.arena())
        };
        assert_eq!(w.avatar(Player::Ai).nav_dest, Some(expected));
        assert_eq!(w.avatar(Player::Ai).mark, Some(1));
    }

    #[test]
    fn reclick_replaces_mark() {
        let mut w = world(5, 2);
        w.handle_click(Player::Human, ClickAction::Target(0)).unwrap();
        w.handle_click(Player::Human, ClickAction::Target(3)).unwrap();
        assert_eq!(w.avatar(Player::Human).mark, Some(3));
    }

    #[test]
    fn invalid_click_changes_nothing() {
        let mut w = world(5, 2);
        let before = w.events().len();
        let err = w.handle_click(Player::Human, ClickAction::Target(77)).unwrap_err();
        assert!(matches!(err, EngineError::InvalidTarget(77)));
        assert_eq!(w.events().len(), before);
        assert_eq!(w.avatar(Player::Human).mark, None);
    }

    #[test]
    fn ghost_click_is_rejected() {
        let mut w = world(5, 2);
        w.targets[0].state = TargetState::Ghost;
        assert!(w.handle_click(Player::Human, ClickAction::Target(0)).is_err());
    }

    #[test]
    fn zero_dt_is_a_no_op() {
        let mut w = world(5, 2);
        let before = w.targets().to_vec();
        assert!(w.tick(0.0).unwrap().is_empty());
        assert_eq!(w.targets(), &before[..]);
        assert_eq!(w.tick_index(), 0);
        assert!(w.tick(0.013).is_err());
    }

    #[test]
    fn avatar_moves_speed_times_dt() {
        let mut cfg = WorldConfig::default();
        cfg.human_start = Vec2::ZERO;
        let mut w = World::new(cfg).unwrap();
        w.avatars[0].nav_dest = Some(Vec2::new(1000.0, 0.0));
        w.step();
        let p = w.avatar(Player::Human).pos;
        assert!((p.x - 4.0).abs() < 1e-12 && p.y == 0.0);
    }

    #[test]
    fn ghost_exit_respawns_same_tick() {
        let mut w = world(5, 8);
        // Intercept by teleporting a target onto the human.
        let hp = w.avatar(Player::Human).pos;
        w.targets[0].pos = hp;
        w.targets[0].vel = Vec2::new(-150.0, 0.0);
        w.step();
        assert_eq!(w.count_ghosts(), 1);
        loop {
            let ev = w.step();
            w.check_invariants().unwrap();
            if ev.iter().any(|e| matches!(e.kind, EventKind::Exit { target_id: 0, .. })) {
                assert!(ev.iter().any(|e| matches!(e.kind, EventKind::Spawn { .. })));
                break;
            }
        }
        assert_eq!(w.count_visible() + w.count_ghosts(), 5);
    }

    #[test]
    fn simultaneous_contact_goes_to_closer_then_human() {
        let mut w = world(5, 4);
        w.avatars[0].pos = Vec2::new(0.0, 0.0);
        w.avatars[1].pos = Vec2::new(20.0, 0.0);
        w.targets[0].pos = Vec2::new(12.0, 0.0);
        w.targets[0].vel = Vec2::ZERO;
        w.targets[1].pos = Vec2::new(10.0, 0.0);
        w.targets[1].vel = Vec2::ZERO;
        w.step();
        let caught: Vec<_> = w
            .events()
            .iter()
            .filter_map(|e| match e.kind {
                EventKind::Intercept { player, target_id, .. } => Some((target_id, player)),
                _ => None,
            })
            .collect();
        assert!(caught.contains(&(0, Player::Ai)));
        assert!(caught.contains(&(1, Player::Human)));
    }

    #[test]
    fn unreachable_click_parks_at_edge() {
        let mut w = world(5, 4);
        w.targets[0].pos = Vec2::new(390.0, 0.0);
        w.targets[0].vel = Vec2::new(190.0, 0.0);
        w.handle_click(Player::Human, ClickAction::Target(0)).unwrap();
        let dest = w.avatar(Player::Human).nav_dest.unwrap();
        assert!((dest.norm() - 400.0).abs() < 1e-9);
    }

    #[test]
    fn empty_round_replays() {
        let mut w = World::new(WorldConfig::default().with_seed(5).with_round_length(20.0)).unwrap();
        while !w.is_finished() {
            w.step();
        }
        let log = w.into_log();
        assert!(log.is_complete());
        let text = log.to_jsonl();
        let parsed = EpisodeLog::from_jsonl(&text).unwrap();
        let replayed = replay(&parsed).unwrap();
        assert_eq!(replayed.to_log().to_jsonl(), text);
    }

    #[test]
    fn tampered_log_diverges() {
        let mut w = World::new(WorldConfig::default().with_seed(5).with_round_length(30.0)).unwrap();
        let mut n = 0;
        while !w.is_finished() {
            if w.tick_index() % 40 == 0 {
                let id = w.visible_targets().next().unwrap().id;
                w.handle_click(Player::Human, ClickAction::Target(id)).unwrap();
                n += 1;
            }
            w.step();
        }
        assert!(n > 10);
        let mut log = w.into_log();
        replay(&log).unwrap();
        let idx = log
            .events
            .iter()
            .position(|e| matches!(e.kind, EventKind::Intercept { .. }))
            .expect("some interception happened");
        if let EventKind::Intercept { value, .. } = &mut log.events[idx].kind {
            *value += 1;
        }
        match replay(&log) {
            Err(EngineError::ReplayDivergence { index, .. }) => assert_eq!(index, idx),
            other => panic!("expected divergence, got {other:?}"),
        }
    }
}
