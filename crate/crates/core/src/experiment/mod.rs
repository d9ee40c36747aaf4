//! Study sessions: counterbalanced schedules, questionnaires, forced
//! choices, archives and the live wire protocol.
//!
//! A session is two blocks. Each block fixes a target density and plays one
//! round with each agent of the participant's pair, then collects one
//! questionnaire per agent and a forced choice between them. Agents are only
//! ever shown to participants under a colour identity.

mod archive;
mod live;
pub mod protocol;

pub use self::archive::{
    export_choices, load_session, load_sessions, run_session, write_plan, ChooserWeights,
    ExportReport, Session, SessionConfig, SessionPaths,
};
pub use self::live::{LiveSession, Phase};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::agents::AgentKind;
use crate::error::ExperimentError;

pub const ROUNDS_PER_BLOCK: usize = 2;
pub const BLOCKS: usize = 2;
pub const MIN_FREE_TEXT_CHARS: usize = 10;

pub const SURVEY_ITEMS: [&str; 8] = [
    "The bot and I were a team.",
    "The bot was competent.",
    "I understood the bot's intentions.",
    "The bot understood my intentions.",
    "I contributed more to the team's performance.",
    "The bot was easy to play with.",
    "The bot was fun to play with.",
    "The bot and I had a similar playing style.",
];

/// The persona an agent is presented under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    Green,
    Purple,
    Copper,
    Blue,
}

impl Identity {
    /// `(first played, second played)` identities of a block (0-based).
    pub fn for_block(block: usize) -> [Identity; 2] {
        if block == 0 {
            [Identity::Green, Identity::Purple]
        } else {
            [Identity::Copper, Identity::Blue]
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Identity::Green => "green",
            Identity::Purple => "purple",
            Identity::Copper => "copper",
            Identity::Blue => "blue",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundPlan {
    /// 1-based position in the session.
    pub round: usize,
    pub agent: AgentKind,
    pub identity: Identity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPlan {
    pub density: usize,
    pub rounds: [RoundPlan; ROUNDS_PER_BLOCK],
}

impl BlockPlan {
    pub fn identities(&self) -> [Identity; 2] {
        [self.rounds[0].identity, self.rounds[1].identity]
    }

    pub fn agent_of(&self, identity: Identity) -> Option<AgentKind> {
        self.rounds.iter().find(|r| r.identity == identity).map(|r| r.agent)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionPlan {
    pub participant_id: String,
    pub agents: [AgentKind; 2],
    pub counterbalance: u8,
    pub blocks: [BlockPlan; BLOCKS],
}

impl SessionPlan {
    pub fn rounds(&self) -> impl Iterator<Item = (usize, &RoundPlan)> {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(b, block)| block.rounds.iter().map(move |r| (b, r)))
    }

    pub fn round(&self, index: usize) -> (usize, &BlockPlan, &RoundPlan) {
        let b = index / ROUNDS_PER_BLOCK;
        let block = &self.blocks[b];
        (b, block, &block.rounds[index % ROUNDS_PER_BLOCK])
    }
}

/// Bit 0 of `index` swaps the density order, bit 1 the agent order.
pub fn make_schedule(
    participant_id: &str,
    agents: [AgentKind; 2],
    index: u8,
) -> Result<SessionPlan, ExperimentError> {
    if agents[0] == agents[1] {
        return Err(ExperimentError::IdenticalAgents);
    }
    if index > 3 {
        return Err(ExperimentError::CounterbalanceIndex(index));
    }
    let densities = if index & 1 == 0 { [5, 15] } else { [15, 5] };
    let order = if index & 2 == 0 {
        agents
    } else {
        [agents[1], agents[0]]
    };
    let block = |b: usize| {
        let ids = Identity::for_block(b);
        BlockPlan {
            density: densities[b],
            rounds: [0, 1].map(|k| RoundPlan {
                round: b * ROUNDS_PER_BLOCK + k + 1,
                agent: order[k],
                identity: ids[k],
            }),
        }
    };
    Ok(SessionPlan {
        participant_id: participant_id.to_string(),
        agents,
        counterbalance: index,
        blocks: [block(0), block(1)],
    })
}

/// Eight Likert ratings of one agent. Headless placeholder responses use
/// 0 for every item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyResponse {
    pub participant_id: String,
    /// 1-based.
    pub block: usize,
    pub agent: AgentKind,
    pub identity: Identity,
    pub items: [u8; 8],
}

impl SurveyResponse {
    pub const STUB_VALUE: u8 = 0;

    pub fn stub(participant_id: &str, block: usize, agent: AgentKind, identity: Identity) -> Self {
        Self {
            participant_id: participant_id.to_string(),
            block,
            agent,
            identity,
            items: [Self::STUB_VALUE; 8],
        }
    }

    pub fn is_stub(&self) -> bool {
        self.items.iter().all(|&q| q == Self::STUB_VALUE)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.is_stub() {
            return Ok(());
        }
        match self.items.iter().position(|q| !(1..=7).contains(q)) {
            Some(i) => Err(ExperimentError::InvalidSurvey(format!(
                "q{} = {} is outside 1-7",
                i + 1,
                self.items[i]
            ))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoiceEvent {
    pub participant_id: String,
    /// 1-based.
    pub block: usize,
    pub identity: Identity,
    pub agent: AgentKind,
    pub free_text: String,
}

impl ChoiceEvent {
    pub fn validate(&self, block: &BlockPlan) -> Result<(), ExperimentError> {
        match block.agent_of(self.identity) {
            Some(a) if a == self.agent => {}
            _ => {
                return Err(ExperimentError::InvalidChoice(format!(
                    "{} is not an agent of block {}",
                    self.identity, self.block
                )))
            }
        }
        check_free_text(&self.free_text)
    }
}

pub fn check_free_text(text: &str) -> Result<(), ExperimentError> {
    let n = text.trim().chars().count();
    if n < MIN_FREE_TEXT_CHARS {
        return Err(ExperimentError::InvalidChoice(format!(
            "explanation needs at least {MIN_FREE_TEXT_CHARS} characters, got {n}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: AgentKind = AgentKind::Omit;
    const B: AgentKind = AgentKind::Ignorant;

    #[test]
    fn schedule_base_case() {
        let p = make_schedule("p1", [A, B], 0).unwrap();
        assert_eq!([p.blocks[0].density, p.blocks[1].density], [5, 15]);
        for block in &p.blocks {
            assert_eq!([block.rounds[0].agent, block.rounds[1].agent], [A, B]);
        }
        assert_eq!(p.blocks[0].identities(), [Identity::Green, Identity::Purple]);
        assert_eq!(p.blocks[1].identities(), [Identity::Copper, Identity::Blue]);
        let rounds: Vec<usize> = p.rounds().map(|(_, r)| r.round).collect();
        assert_eq!(rounds, vec![1, 2, 3, 4]);
    }

    #[test]
    fn schedule_index_three() {
        let p = make_schedule("p1", [A, B], 3).unwrap();
        assert_eq!([p.blocks[0].density, p.blocks[1].density], [15, 5]);
        assert_eq!([p.blocks[0].rounds[0].agent, p.blocks[0].rounds[1].agent], [B, A]);
        assert_eq!(p.blocks[1].agent_of(Identity::Copper), Some(B));
    }

    #[test]
    fn schedule_is_balanced() {
        let plans: Vec<_> = (0..4).map(|i| make_schedule("p", [A, B], i).unwrap()).collect();
        let low_first = plans.iter().filter(|p| p.blocks[0].density == 5).count();
        let a_first = plans.iter().filter(|p| p.blocks[0].rounds[0].agent == A).count();
        assert_eq!((low_first, a_first), (2, 2));
    }

    #[test]
    fn schedule_errors() {
        assert!(matches!(make_schedule("p", [A, A], 0), Err(ExperimentError::IdenticalAgents)));
        assert!(matches!(
            make_schedule("p", [A, B], 4),
            Err(ExperimentError::CounterbalanceIndex(4))
        ));
    }

    #[test]
    fn survey_validation() {
        let mut s = SurveyResponse::stub("p", 1, A, Identity::Green);
        assert!(s.is_stub() && s.validate().is_ok());
        s.items = [4; 8];
        assert!(s.validate().is_ok());
        s.items[7] = 8;
        assert!(s.validate().is_err());
        s.items[7] = 0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn choice_validation() {
        let plan = make_schedule("p", [A, B], 0).unwrap();
        let mut c = ChoiceEvent {
            participant_id: "p".into(),
            block: 1,
            identity: Identity::Green,
            agent: A,
            free_text: "it stayed out of my way".into(),
        };
        assert!(c.validate(&plan.blocks[0]).is_ok());
        c.free_text = "too short".into();
        assert!(c.validate(&plan.blocks[0]).is_err());
        c.free_text = "long enough now".into();
        c.identity = Identity::Copper;
        assert!(c.validate(&plan.blocks[0]).is_err());
    }
}
