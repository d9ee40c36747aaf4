use intercept_core::engine::{EpisodeLog, Event, EventKind, Player, WorldConfig};
use intercept_core::geometry::Vec2;
use intercept_core::metrics::{compute_row, count_intersections, count_steals, MetricsConfig};

fn log(events: Vec<Event>) -> EpisodeLog {
    EpisodeLog {
        header: WorldConfig::default().header(),
        events,
    }
}

fn at(t: f64, kind: EventKind) -> Event {
    Event { t, kind }
}

fn snapshot(t: f64, human: Vec2, ai: Vec2) -> Event {
    at(t, EventKind::Snapshot { human_pos: human, ai_pos: ai })
}

fn mark(t: f64, player: Player, id: Option<u64>) -> Event {
    at(
        t,
        EventKind::MarkSet {
            player,
            target_id: id,
            dest: Vec2::ZERO,
            reachable: true,
        },
    )
}

fn spawn(id: u64, value: u32) -> Event {
    at(
        0.0,
        EventKind::Spawn {
            target_id: id,
            pos: Vec2::new(0.0, -400.0),
            vel: Vec2::new(0.0, 150.0),
            value,
        },
    )
}

#[test]
fn zig_zag_crosses_three_times() {
    // human walks the x axis; the AI flips sides at snapshots 3, 6 and 9
    let events: Vec<Event> = (0..11)
        .map(|k| {
            let x = -100.0 + 20.0 * k as f64;
            let y = if (k / 3) % 2 == 0 { 10.0 } else { -10.0 };
            snapshot(0.2 * k as f64, Vec2::new(x, 0.0), Vec2::new(x, y))
        })
        .collect();
    let l = log(events);
    assert_eq!(count_intersections(&l, &MetricsConfig::default()).unwrap(), 3);
    let loose = MetricsConfig { refractory_s: 0.0 };
    assert_eq!(count_intersections(&l, &loose).unwrap(), 3);
    let strict = MetricsConfig { refractory_s: 0.7 };
    assert_eq!(count_intersections(&l, &strict).unwrap(), 2);
}

#[test]
fn steals_in_both_directions() {
    let l = log(vec![
        spawn(0, 5),
        spawn(1, 7),
        spawn(2, 3),
        snapshot(0.0, Vec2::new(-100.0, 0.0), Vec2::new(100.0, 0.0)),
        mark(0.1, Player::Human, Some(0)),
        mark(0.2, Player::Ai, Some(0)),
        at(1.0, EventKind::Intercept { player: Player::Ai, target_id: 0, value: 5 }),
        mark(1.1, Player::Ai, Some(1)),
        mark(1.2, Player::Human, Some(1)),
        at(2.0, EventKind::Intercept { player: Player::Human, target_id: 1, value: 7 }),
        mark(2.1, Player::Ai, Some(2)),
        at(2.5, EventKind::Intercept { player: Player::Ai, target_id: 2, value: 3 }),
        snapshot(3.0, Vec2::new(-100.0, 0.0), Vec2::new(100.0, 0.0)),
        at(3.0, EventKind::RoundEnd { human_score: 7, ai_score: 8 }),
    ]);
    assert_eq!(count_steals(&l, Player::Ai), 1);
    assert_eq!(count_steals(&l, Player::Human), 1);
    let row = compute_row(&l, &MetricsConfig::default()).unwrap();
    assert_eq!((row.human_points, row.ai_points, row.score_inequality), (7, 8, 1));
    assert_eq!(row.ai_rel_score, 8.0 / 15.0);
    assert_eq!(row.mean_distance, 200.0);
}
