use intercept_core::agents::AgentKind;
use intercept_core::engine::SimRng;
use intercept_core::experiment::protocol::{ClientMessage, ServerMessage, SurveyAnswer};
use intercept_core::experiment::{make_schedule, LiveSession, Phase};

#[test]
fn random_clicks_only_produce_schema_valid_frames() {
    let plan = make_schedule("p9", [AgentKind::BottomFeeder, AgentKind::Divide], 3).unwrap();
    let mut live = LiveSession::new(plan, "fuzz", 5, None)
        .unwrap()
        .with_round_length(120.0);
    let mut frames = live.start().unwrap();
    let mut rng = SimRng::new(1, 0);
    let mut errors = 0;
    for click in 0..1000 {
        let text = match rng.index(4) {
            0 => ClientMessage::ClickCenter {}.to_text(),
            1 => format!(r#"{{"type":"click","target_id":{}}}"#, rng.index(40)),
            2 => format!(r#"{{"type":"click","target_id":"{}"}}"#, rng.index(40)),
            _ => format!(r#"{{"type":"click","x":{click}}}"#),
        };
        frames.extend(live.handle_text(&text));
        for _ in 0..3 {
            frames.extend(live.tick().unwrap());
        }
    }
    assert!(matches!(live.phase(), Phase::Playing(_)));
    for f in &frames {
        let text = f.to_text();
        assert_eq!(&ServerMessage::parse(&text).unwrap(), f);
        for kind in AgentKind::ALL {
            assert!(!text.contains(kind.as_str()), "{text}");
        }
        if matches!(f, ServerMessage::Error { .. }) {
            errors += 1;
        }
    }
    assert!(errors > 400, "{errors} error frames");
}

#[test]
fn survey_needs_both_agents_and_every_item() {
    let plan = make_schedule("p1", [AgentKind::Omit, AgentKind::Ignorant], 0).unwrap();
    let ids = plan.blocks[0].identities();
    let mut live = LiveSession::new(plan, "s", 1, None).unwrap().with_round_length(0.1);
    live.start().unwrap();
    while live.phase() != Phase::Survey(0) {
        live.tick().unwrap();
    }
    let one = ClientMessage::SurveySubmit {
        responses: vec![SurveyAnswer::new(ids[0], [4; 8])],
    };
    assert!(matches!(live.handle_text(&one.to_text())[..], [ServerMessage::Error { .. }]));
    let missing_item = format!(
        r#"{{"type":"survey_submit","responses":[{},{{"identity":"{}","q1":1}}]}}"#,
        serde_json::to_string(&SurveyAnswer::new(ids[0], [4; 8])).unwrap(),
        ids[1]
    );
    assert!(matches!(live.handle_text(&missing_item)[..], [ServerMessage::Error { .. }]));
    let both = ClientMessage::SurveySubmit {
        responses: vec![SurveyAnswer::new(ids[0], [4; 8]), SurveyAnswer::new(ids[1], [2; 8])],
    };
    assert!(matches!(live.handle_text(&both.to_text())[..], [ServerMessage::ChoiceRequest { .. }]));
    let short = ClientMessage::ChoiceSubmit {
        identity: ids[1],
        free_text: "ok".into(),
    };
    assert!(matches!(live.handle_text(&short.to_text())[..], [ServerMessage::Error { .. }]));
    assert_eq!(live.phase(), Phase::Choice(0));
}
