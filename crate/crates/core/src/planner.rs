//! Exhaustive interception-sequence search.
//!
//! Every ordered sequence of up to three distinct targets is simulated from
//! the agent's position: each step solves the interception against the
//! target's position propagated to the time the previous step finishes.
//! Step `j` is worth `value * alpha^K_j`, where `K_j` estimates how many new
//! targets will have spawned by the time it completes. Sequences stop at the
//! first target that cannot be reached inside the arena.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::engine::Target;
use crate::geometry::{solve_interception, Arena, Vec2};

/// Longest sequence the search considers.
pub const MAX_DEPTH: usize = 3;

/// A candidate plan must beat the active plan's remaining value by this
/// factor before the agent switches.
pub const SWITCH_FACTOR: f64 = 1.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanStep {
    pub target_id: u64,
    pub point: Vec2,
    /// Seconds after the snapshot at which this step completes.
    pub arrival_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
    pub discounted_value: f64,
    pub total_time: f64,
}

impl Plan {
    pub fn ids(&self) -> Vec<u64> {
        self.steps.iter().map(|s| s.target_id).collect()
    }

    pub fn first(&self) -> Option<&PlanStep> {
        self.steps.first()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Spawn-rate model behind the `alpha^K` discount.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscountModel {
    pub alpha: f64,
    /// Smoothed interval between spawns, in seconds.
    pub spawn_interval_ema: f64,
    pub ema_lambda: f64,
    last_spawn: f64,
}

impl Default for DiscountModel {
    fn default() -> Self {
        Self::new(0.9)
    }
}

impl DiscountModel {
    pub const INITIAL_INTERVAL: f64 = 5.0;
    pub const EMA_LAMBDA: f64 = 0.2;
    const MIN_INTERVAL: f64 = 1e-6;

    pub fn new(alpha: f64) -> Self {
        assert!(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
        Self {
            alpha,
            spawn_interval_ema: Self::INITIAL_INTERVAL,
            ema_lambda: Self::EMA_LAMBDA,
            last_spawn: 0.0,
        }
    }

    /// Model with a fixed spawn interval (no further learning needed).
    pub fn with_interval(alpha: f64, interval: f64) -> Self {
        assert!(interval > 0.0);
        Self {
            spawn_interval_ema: interval,
            ..Self::new(alpha)
        }
    }

    /// Records a spawn at `clock`. Spawns that fill the arena at round start
    /// should not be reported.
    pub fn observe_spawn(&mut self, clock: f64) {
        let interval = (clock - self.last_spawn).max(0.0);
        self.last_spawn = clock;
        let l = self.ema_lambda;
        self.spawn_interval_ema =
            (l * interval + (1.0 - l) * self.spawn_interval_ema).max(Self::MIN_INTERVAL);
    }

    /// Estimated number of spawns within `elapsed` seconds.
    pub fn estimate_k(&self, elapsed: f64) -> u32 {
        (elapsed.max(0.0) / self.spawn_interval_ema).round() as u32
    }

    pub fn factor(&self, elapsed: f64) -> f64 {
        self.alpha.powi(self.estimate_k(elapsed) as i32)
    }
}

/// Everything the search needs about the agent and the scene.
#[derive(Debug, Clone, Copy)]
pub struct SearchContext<'a> {
    pub targets: &'a [Target],
    pub agent_pos: Vec2,
    pub agent_speed: f64,
    pub arena: Arena,
    pub discount: &'a DiscountModel,
}

impl<'a> SearchContext<'a> {
    fn lookup(&self, id: u64) -> Option<&'a Target> {
        self.targets.iter().find(|t| t.id == id && t.is_visible())
    }

    /// Solves one step from `pos` at `elapsed` seconds after the snapshot.
    fn step(&self, target: &Target, pos: Vec2, elapsed: f64) -> Option<(Vec2, f64)> {
        let here = target.position_after(elapsed);
        let sol = solve_interception(pos, self.agent_speed, here, target.vel, self.arena).ok()?;
        sol.reachable.then_some((sol.point, elapsed + sol.time))
    }
}

/// All reachable ordered sequences of 1..=3 distinct considered targets.
pub fn enumerate_plans(
    ctx: &SearchContext<'_>,
    consideration: &BTreeSet<u64>,
    values: &BTreeMap<u64, f64>,
) -> Vec<Plan> {
    let pool: Vec<(&Target, f64)> = consideration
        .iter()
        .filter_map(|id| Some((ctx.lookup(*id)?, *values.get(id)?)))
        .collect();
    let mut out = Vec::new();
    let mut used = vec![false; pool.len()];
    let mut steps = Vec::with_capacity(MAX_DEPTH);
    extend(ctx, &pool, &mut used, &mut steps, ctx.agent_pos, 0.0, 0.0, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn extend(
    ctx: &SearchContext<'_>,
    pool: &[(&Target, f64)],
    used: &mut [bool],
    steps: &mut Vec<PlanStep>,
    pos: Vec2,
    elapsed: f64,
    value: f64,
    out: &mut Vec<Plan>,
) {
    if steps.len() == MAX_DEPTH {
        return;
    }
    for i in 0..pool.len() {
        if used[i] {
            continue;
        }
        let (target, v) = pool[i];
        let Some((point, arrival)) = ctx.step(target, pos, elapsed) else {
            continue;
        };
        let total = value + v * ctx.discount.factor(arrival);
        steps.push(PlanStep {
            target_id: target.id,
            point,
            arrival_time: arrival,
        });
        out.push(Plan {
            steps: steps.clone(),
            discounted_value: total,
            total_time: arrival,
        });
        used[i] = true;
        extend(ctx, pool, used, steps, point, arrival, total, out);
        used[i] = false;
        steps.pop();
    }
}

/// Prices a fixed sequence on the current snapshot, truncating at the first
/// step that is no longer visible, considered or reachable. `None` when not
/// even the first step survives.
pub fn evaluate_sequence(
    ctx: &SearchContext<'_>,
    ids: &[u64],
    consideration: &BTreeSet<u64>,
    values: &BTreeMap<u64, f64>,
) -> Option<Plan> {
    let mut steps = Vec::new();
    let mut pos = ctx.agent_pos;
    let mut elapsed = 0.0;
    let mut total = 0.0;
    for id in ids.iter().take(MAX_DEPTH) {
        if !consideration.contains(id) {
            break;
        }
        let (Some(target), Some(v)) = (ctx.lookup(*id), values.get(id)) else {
            break;
        };
        let Some((point, arrival)) = ctx.step(target, pos, elapsed) else {
            break;
        };
        total += v * ctx.discount.factor(arrival);
        steps.push(PlanStep {
            target_id: *id,
            point,
            arrival_time: arrival,
        });
        pos = point;
        elapsed = arrival;
    }
    (!steps.is_empty()).then_some(Plan {
        steps,
        discounted_value: total,
        total_time: elapsed,
    })
}

/// Ordering used to rank plans: higher value first, then shorter, then the
/// lexicographically smaller id sequence.
pub fn compare_plans(a: &Plan, b: &Plan) -> Ordering {
    b.discounted_value
        .total_cmp(&a.discounted_value)
        .then(a.total_time.total_cmp(&b.total_time))
        .then_with(|| a.ids().cmp(&b.ids()))
}

pub fn best_plan(plans: &[Plan]) -> Option<Plan> {
    plans.iter().min_by(|a, b| compare_plans(a, b)).cloned()
}

/// Stability rule. `current` is the re-priced remaining value of the active
/// plan, or `None` when there is no valid active plan.
pub fn should_switch(current: Option<f64>, candidate: f64) -> bool {
    match current {
        None => true,
        // candidate >= 1.2 * current, kept in exact integer ratios
        Some(cur) => candidate * 5.0 >= cur * 6.0,
    }
}
