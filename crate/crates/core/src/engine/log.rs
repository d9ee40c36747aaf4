//! Episode logs in JSON-lines form.
//!
//! Line 1 is the [`LogHeader`]; every following line is one [`Event`]:
//! `{"t": <seconds>, "kind": "<kind>", ...payload}`.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::EngineError;
use crate::geometry::Vec2;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    Human,
    Ai,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::Human => Player::Ai,
            Player::Ai => Player::Human,
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            Player::Human => 0,
            Player::Ai => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub format_version: u32,
    pub seed: u64,
    pub density: usize,
    /// Agent kind identifier of the AI player.
    pub agent: String,
    /// Who drove the human avatar (`greedy`, `random`, `idle`, `live`, ...).
    pub human: String,
    pub round_length_s: f64,
    pub dt: f64,
    pub avatar_speed: f64,
    pub arena_radius: f64,
    pub collision_radius: f64,
    pub spawn_cone_deg: f64,
    pub snapshot_interval_ticks: u64,
    pub human_start: Vec2,
    pub ai_start: Vec2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    Spawn {
        target_id: u64,
        pos: Vec2,
        vel: Vec2,
        value: u32,
    },
    Click {
        player: Player,
        target_id: u64,
    },
    CenterClick {
        player: Player,
    },
    MarkSet {
        player: Player,
        target_id: Option<u64>,
        dest: Vec2,
        reachable: bool,
    },
    Intercept {
        player: Player,
        target_id: u64,
        value: u32,
    },
    Exit {
        target_id: u64,
        intercepted: bool,
    },
    Snapshot {
        human_pos: Vec2,
        ai_pos: Vec2,
    },
    RoundEnd {
        human_score: u32,
        ai_score: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    #[serde(flatten)]
    pub kind: EventKind,
}

impl Event {
    pub fn is_input(&self) -> bool {
        matches!(self.kind, EventKind::Click { .. } | EventKind::CenterClick { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeLog {
    pub header: LogHeader,
    pub events: Vec<Event>,
}

impl EpisodeLog {
    pub fn is_complete(&self) -> bool {
        matches!(
            self.events.last().map(|e| &e.kind),
            Some(EventKind::RoundEnd { .. })
        )
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        out.push_str(&serde_json::to_string(&self.header).expect("header serializes"));
        out.push('\n');
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("event serializes"));
            out.push('\n');
        }
        out
    }

    pub fn event_lines(&self) -> Vec<String> {
        self.events
            .iter()
            .map(|e| serde_json::to_string(e).expect("event serializes"))
            .collect()
    }

    pub fn from_jsonl(text: &str) -> Result<Self, EngineError> {
        Self::from_reader(text.as_bytes())
    }

    pub fn from_reader<R: std::io::Read>(reader: R) -> Result<Self, EngineError> {
        let mut lines = BufReader::new(reader).lines();
        let header_line = lines
            .next()
            .ok_or_else(|| EngineError::MalformedLog("empty log".into()))??;
        let header: LogHeader = serde_json::from_str(&header_line)?;
        if header.format_version != FORMAT_VERSION {
            return Err(EngineError::UnsupportedVersion(header.format_version));
        }
        let mut events = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            events.push(serde_json::from_str(&line)?);
        }
        Ok(Self { header, events })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, EngineError> {
        Self::from_reader(fs::File::open(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), EngineError> {
        let mut f = fs::File::create(path)?;
        f.write_all(self.to_jsonl().as_bytes())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn event_wire_shape() {
        let e = Event {
            t: 0.5,
            kind: EventKind::Intercept {
                player: Player::Ai,
                target_id: 3,
                value: 7,
            },
        };
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(
            s,
            r#"{"t":0.5,"kind":"intercept","player":"ai","target_id":3,"value":7}"#
        );
        let back: Event = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn floats_round_trip_exactly() {
        let e = Event {
            t: 0.1 + 0.2,
            kind: EventKind::Snapshot {
                human_pos: Vec2::new(1.0 / 3.0, -2.0f64.sqrt()),
                ai_pos: Vec2::new(123.456789012345678, 1e-300),
            },
        };
        let s = serde_json::to_string(&e).unwrap();
        let back: Event = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }

    #[test]
    fn rejects_other_versions() {
        let text = r#"{"format_version":99,"seed":1,"density":5,"agent":"omit","human":"idle","round_length_s":1.0,"dt":0.02,"avatar_speed":200.0,"arena_radius":400.0,"collision_radius":14.0,"spawn_cone_deg":60.0,"snapshot_interval_ticks":10,"human_start":{"x":-100.0,"y":0.0},"ai_start":{"x":100.0,"y":0.0}}"#;
        assert!(matches!(
            EpisodeLog::from_jsonl(text),
            Err(EngineError::UnsupportedVersion(99))
        ));
    }
}
