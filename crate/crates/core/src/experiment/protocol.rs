//! JSON text frames exchanged with the browser client.
//!
//! Every frame is an object with a `type` field naming the message. The
//! server is authoritative: the client only renders `state` frames and
//! reports clicks and form submissions. No server frame ever names an agent
//! kind; agents appear only under their [`Identity`].

use serde::{Deserialize, Serialize};

use super::Identity;
use crate::engine::{Player, World};
use crate::error::ExperimentError;

pub const PROTOCOL_VERSION: u32 = 1;
/// Rate of `state` frames during play.
pub const STATE_HZ: f64 = 15.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetView {
    pub id: u64,
    pub x: f64,
    pub y: f64,
    pub value: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvatarView {
    pub x: f64,
    pub y: f64,
    pub mark: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scores {
    pub human: u32,
    pub ai: u32,
    pub team: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Hello {
        protocol_version: u32,
        session_id: String,
        /// 1-based round number within the session.
        round: usize,
        display_identity: Identity,
        arena_radius: f64,
        density: usize,
        round_length_s: f64,
    },
    State {
        t: f64,
        targets: Vec<TargetView>,
        human: AvatarView,
        ai: AvatarView,
        scores: Scores,
    },
    RoundEnd {
        scores: Scores,
    },
    SurveyRequest {
        items: Vec<String>,
        identities: [Identity; 2],
    },
    ChoiceRequest {
        identities: [Identity; 2],
        min_free_text: usize,
    },
    SessionComplete {},
    Error {
        message: String,
    },
}

/// One agent's eight ratings inside a `survey_submit` frame.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurveyAnswer {
    pub identity: Identity,
    pub q1: u8,
    pub q2: u8,
    pub q3: u8,
    pub q4: u8,
    pub q5: u8,
    pub q6: u8,
    pub q7: u8,
    pub q8: u8,
}

impl SurveyAnswer {
    pub fn new(identity: Identity, items: [u8; 8]) -> Self {
        let [q1, q2, q3, q4, q5, q6, q7, q8] = items;
        Self {
            identity,
            q1,
            q2,
            q3,
            q4,
            q5,
            q6,
            q7,
            q8,
        }
    }

    pub fn items(&self) -> [u8; 8] {
        [
            self.q1, self.q2, self.q3, self.q4, self.q5, self.q6, self.q7, self.q8,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientMessage {
    Click { target_id: u64 },
    ClickCenter {},
    SurveySubmit { responses: Vec<SurveyAnswer> },
    ChoiceSubmit { identity: Identity, free_text: String },
}

impl ClientMessage {
    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        serde_json::from_str(text).map_err(|e| ExperimentError::Protocol(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        serde_json::to_string(self).expect("client message serializes")
    }
}

impl ServerMessage {
    pub fn to_text(&self) -> String {
        serde_json::to_string(self).expect("server message serializes")
    }

    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        serde_json::from_str(text).map_err(|e| ExperimentError::Protocol(e.to_string()))
    }

    pub fn error(err: &ExperimentError) -> Self {
        ServerMessage::Error {
            message: err.to_string(),
        }
    }

    pub fn scores(world: &World) -> Scores {
        let human = world.score(Player::Human);
        let ai = world.score(Player::Ai);
        Scores {
            human,
            ai,
            team: human + ai,
        }
    }

    pub fn state(world: &World) -> Self {
        let avatar = |p: Player| {
            let a = world.avatar(p);
            AvatarView {
                x: a.pos.x,
                y: a.pos.y,
                mark: a.mark,
            }
        };
        ServerMessage::State {
            t: world.clock(),
            targets: world
                .visible_targets()
                .map(|t| TargetView {
                    id: t.id,
                    x: t.pos.x,
                    y: t.pos.y,
                    value: t.value,
                })
                .collect(),
            human: avatar(Player::Human),
            ai: avatar(Player::Ai),
            scores: Self::scores(world),
        }
    }
}
