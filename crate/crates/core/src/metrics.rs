//! Objective interaction metrics computed from finished episode logs.
//!
//! Every function is a pure fold over an [`EpisodeLog`]; nothing here needs
//! the engine to be re-run.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::{EpisodeLog, EventKind, Player};
use crate::error::MetricsError;
use crate::geometry::{segments_intersect, Vec2};

/// Knobs for the trajectory-based metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsConfig {
    /// Minimum time between two counted path crossings.
    pub refractory_s: f64,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self { refractory_s: 0.5 }
    }
}

/// One CSV row per episode. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub human_rel_score: f64,
    pub ai_rel_score: f64,
    pub team_rel_score: f64,
    pub human_points: u64,
    pub ai_points: u64,
    pub score_inequality: u64,
    pub ai_steals: u64,
    pub human_steals: u64,
    pub intersections: u64,
    pub mean_distance: f64,
    pub density: usize,
    pub agent: String,
    pub seed: u64,
}

impl MetricsRow {
    pub const COLUMNS: [&'static str; 13] = [
        "human_rel_score",
        "ai_rel_score",
        "team_rel_score",
        "human_points",
        "ai_points",
        "score_inequality",
        "ai_steals",
        "human_steals",
        "intersections",
        "mean_distance",
        "density",
        "agent",
        "seed",
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Points {
    pub human: u64,
    pub ai: u64,
    /// Sum of the values of every target spawned during the round.
    pub available: u64,
}

pub fn points(log: &EpisodeLog) -> Points {
    let mut p = Points::default();
    for e in &log.events {
        match e.kind {
            EventKind::Spawn { value, .. } => p.available += u64::from(value),
            EventKind::Intercept {
                player: Player::Human,
                value,
                ..
            } => p.human += u64::from(value),
            EventKind::Intercept {
                player: Player::Ai,
                value,
                ..
            } => p.ai += u64::from(value),
            _ => {}
        }
    }
    p
}

/// `(human, ai, team)` points as fractions of the value that was available.
pub fn relative_scores(log: &EpisodeLog) -> Result<(f64, f64, f64), MetricsError> {
    let p = points(log);
    if p.available == 0 {
        return Err(MetricsError::EmptyRound);
    }
    let total = p.available as f64;
    let human = p.human as f64 / total;
    let ai = p.ai as f64 / total;
    Ok((human, ai, human + ai))
}

/// Interceptions by `thief` of targets the other player was pursuing.
///
/// A target counts when the victim's mark on it is active at the moment of
/// interception, or was active when the thief first marked it.
pub fn count_steals(log: &EpisodeLog, thief: Player) -> u64 {
    let victim = thief.other();
    let mut marks: [Option<u64>; 2] = [None, None];
    // Targets the thief marked while the victim was already on them.
    let mut contested: BTreeMap<u64, bool> = BTreeMap::new();
    let slot = |p: Player| match p {
        Player::Human => 0,
        Player::Ai => 1,
    };
    let mut steals = 0;
    for e in &log.events {
        match e.kind {
            EventKind::MarkSet {
                player, target_id, ..
            } => {
                marks[slot(player)] = target_id;
                if let (true, Some(g)) = (player == thief, target_id) {
                    let victim_on_it = marks[slot(victim)] == Some(g);
                    contested.entry(g).or_insert(victim_on_it);
                }
            }
            EventKind::Intercept {
                player, target_id, ..
            } => {
                if player == thief
                    && (marks[slot(victim)] == Some(target_id)
                        || contested.get(&target_id).copied().unwrap_or(false))
                {
                    steals += 1;
                }
                clear(&mut marks, target_id);
            }
            EventKind::Exit { target_id, .. } => clear(&mut marks, target_id),
            _ => {}
        }
    }
    steals
}

fn clear(marks: &mut [Option<u64>; 2], id: u64) {
    for m in marks.iter_mut() {
        if *m == Some(id) {
            *m = None;
        }
    }
}

/// `(t, human_pos, ai_pos)` for every snapshot in the log.
pub fn trajectory(log: &EpisodeLog) -> Vec<(f64, Vec2, Vec2)> {
    log.events
        .iter()
        .filter_map(|e| match e.kind {
            EventKind::Snapshot { human_pos, ai_pos } => Some((e.t, human_pos, ai_pos)),
            _ => None,
        })
        .collect()
}

/// Crossings of the two avatars' snapshot-to-snapshot motion segments.
pub fn count_intersections(log: &EpisodeLog, config: &MetricsConfig) -> Result<u64, MetricsError> {
    let snaps = trajectory(log);
    if snaps.is_empty() {
        return Err(MetricsError::MissingSnapshots);
    }
    let mut count = 0;
    let mut last: Option<f64> = None;
    for w in snaps.windows(2) {
        let (_, h1, a1) = w[0];
        let (t, h2, a2) = w[1];
        if !segments_intersect(h1, h2, a1, a2) {
            continue;
        }
        if last.is_some_and(|prev| t - prev < config.refractory_s - 1e-9) {
            continue;
        }
        count += 1;
        last = Some(t);
    }
    Ok(count)
}

pub fn mean_distance(log: &EpisodeLog) -> Result<f64, MetricsError> {
    let snaps = trajectory(log);
    if snaps.is_empty() {
        return Err(MetricsError::MissingSnapshots);
    }
    let sum: f64 = snaps.iter().map(|(_, h, a)| h.distance(*a)).sum();
    Ok(sum / snaps.len() as f64)
}

pub fn compute_row(log: &EpisodeLog, config: &MetricsConfig) -> Result<MetricsRow, MetricsError> {
    let p = points(log);
    let (human_rel_score, ai_rel_score, team_rel_score) = relative_scores(log)?;
    Ok(MetricsRow {
        human_rel_score,
        ai_rel_score,
        team_rel_score,
        human_points: p.human,
        ai_points: p.ai,
        score_inequality: p.human.abs_diff(p.ai),
        ai_steals: count_steals(log, Player::Ai),
        human_steals: count_steals(log, Player::Human),
        intersections: count_intersections(log, config)?,
        mean_distance: mean_distance(log)?,
        density: log.header.density,
        agent: log.header.agent.clone(),
        seed: log.header.seed,
    })
}

pub fn write_csv<W: io::Write>(rows: &[MetricsRow], out: W) -> Result<(), MetricsError> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(MetricsRow::COLUMNS)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<MetricsRow>, MetricsError> {
    let mut r = csv::Reader::from_reader(input);
    let rows = r.deserialize().collect::<Result<Vec<MetricsRow>, _>>()?;
    Ok(rows)
}

/// Every `*.jsonl` log in `dir`, sorted by file name.
pub fn load_logs(dir: impl AsRef<Path>) -> Result<Vec<(String, EpisodeLog)>, crate::error::EngineError> {
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_name().unwrap_or_default().to_string_lossy().into_owned();
            EpisodeLog::read(&p).map(|log| (name, log))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{Event, WorldConfig};

    fn log(events: Vec<(f64, EventKind)>) -> EpisodeLog {
        EpisodeLog {
            header: WorldConfig::default().header(),
            events: events.into_iter().map(|(t, kind)| Event { t, kind }).collect(),
        }
    }

    fn mark(player: Player, id: Option<u64>) -> EventKind {
        EventKind::MarkSet {
            player,
            target_id: id,
            dest: Vec2::ZERO,
            reachable: true,
        }
    }

    fn spawn(id: u64, value: u32) -> EventKind {
        EventKind::Spawn {
            target_id: id,
            pos: Vec2::ZERO,
            vel: Vec2::ZERO,
            value,
        }
    }

    fn catch(player: Player, id: u64, value: u32) -> EventKind {
        EventKind::Intercept {
            player,
            target_id: id,
            value,
        }
    }

    fn snap(t: f64, h: (f64, f64), a: (f64, f64)) -> (f64, EventKind) {
        (
            t,
            EventKind::Snapshot {
                human_pos: Vec2::new(h.0, h.1),
                ai_pos: Vec2::new(a.0, a.1),
            },
        )
    }

    #[test]
    fn relative_score_ratio() {
        let l = log(vec![
            (0.0, spawn(1, 30)),
            (0.0, spawn(2, 70)),
            (1.0, catch(Player::Human, 1, 30)),
        ]);
        let (h, a, team) = relative_scores(&l).unwrap();
        assert_eq!((h, a, team), (0.3, 0.0, 0.3));
    }

    #[test]
    fn no_value_is_an_error() {
        let l = log(vec![(0.0, spawn(1, 0))]);
        assert!(matches!(relative_scores(&l), Err(MetricsError::EmptyRound)));
    }

    #[test]
    fn steal_after_human_marked_first() {
        let l = log(vec![
            (1.0, mark(Player::Human, Some(3))),
            (2.0, mark(Player::Ai, Some(3))),
            (3.0, mark(Player::Human, Some(4))),
            (4.0, catch(Player::Ai, 3, 5)),
        ]);
        assert_eq!(count_steals(&l, Player::Ai), 1);
        assert_eq!(count_steals(&l, Player::Human), 0);
    }

    #[test]
    fn pass_through_steal_counts() {
        let l = log(vec![
            (1.0, mark(Player::Human, Some(3))),
            (2.0, mark(Player::Ai, Some(9))),
            (2.5, catch(Player::Ai, 3, 5)),
        ]);
        assert_eq!(count_steals(&l, Player::Ai), 1);
    }

    #[test]
    fn abandoned_mark_is_not_stolen() {
        let l = log(vec![
            (1.0, mark(Player::Human, Some(3))),
            (1.5, mark(Player::Human, None)),
            (2.0, mark(Player::Ai, Some(3))),
            (4.0, catch(Player::Ai, 3, 5)),
        ]);
        assert_eq!(count_steals(&l, Player::Ai), 0);
    }

    #[test]
    fn perpendicular_crossing_once() {
        let l = log(vec![
            snap(0.0, (-50.0, 0.0), (0.0, -50.0)),
            snap(0.2, (50.0, 0.0), (0.0, 50.0)),
            snap(0.4, (150.0, 0.0), (0.0, 150.0)),
        ]);
        assert_eq!(count_intersections(&l, &MetricsConfig::default()).unwrap(), 1);
    }

    #[test]
    fn refractory_suppresses_rapid_recrossing() {
        // Crossings at t=0.2 and t=0.4: second is inside the refractory window.
        let l = log(vec![
            snap(0.0, (-10.0, 0.0), (0.0, -10.0)),
            snap(0.2, (10.0, 0.0), (0.0, 10.0)),
            snap(0.4, (-10.0, 0.0), (0.0, -10.0)),
        ]);
        assert_eq!(count_intersections(&l, &MetricsConfig::default()).unwrap(), 1);
        let loose = MetricsConfig { refractory_s: 0.1 };
        assert_eq!(count_intersections(&l, &loose).unwrap(), 2);
    }

    #[test]
    fn opposite_semicircles_never_cross() {
        let mut events = Vec::new();
        for i in 0..50 {
            let th = std::f64::consts::PI * f64::from(i) / 49.0;
            let (s, c) = th.sin_cos();
            events.push(snap(0.2 * f64::from(i), (200.0 * c, 200.0 * s), (200.0 * c, -200.0 * s - 1.0)));
        }
        assert_eq!(count_intersections(&log(events), &MetricsConfig::default()).unwrap(), 0);
    }

    #[test]
    fn mean_of_three_distances() {
        let l = log(vec![
            snap(0.0, (0.0, 0.0), (100.0, 0.0)),
            snap(0.2, (0.0, 0.0), (200.0, 0.0)),
            snap(0.4, (0.0, 0.0), (0.0, 300.0)),
        ]);
        assert_eq!(mean_distance(&l).unwrap(), 200.0);
    }

    #[test]
    fn missing_snapshots() {
        let l = log(vec![(0.0, spawn(1, 3))]);
        assert!(matches!(mean_distance(&l), Err(MetricsError::MissingSnapshots)));
        assert!(matches!(
            count_intersections(&l, &MetricsConfig::default()),
            Err(MetricsError::MissingSnapshots)
        ));
    }

    #[test]
    fn csv_header_and_round_trip() {
        let row = MetricsRow {
            human_rel_score: 0.25,
            ai_rel_score: 0.5,
            team_rel_score: 0.75,
            human_points: 10,
            ai_points: 20,
            score_inequality: 10,
            ai_steals: 1,
            human_steals: 0,
            intersections: 2,
            mean_distance: 123.5,
            density: 5,
            agent: "omit".into(),
            seed: 7,
        };
        let mut buf = Vec::new();
        write_csv(std::slice::from_ref(&row), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), MetricsRow::COLUMNS.join(","));
        assert_eq!(read_csv(text.as_bytes()).unwrap(), vec![row]);
    }
}
