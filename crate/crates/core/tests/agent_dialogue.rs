use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scholarbot::agent::{Agent, AgentConfig};
use scholarbot::augment::{instantiate_templates, SlotVocab};
use scholarbot::dm::{MemoryStack, RouteKind};
use scholarbot::eval::{run_transcript, transcript_inputs};
use scholarbot::kb::load_snapshot;
use scholarbot::schema::IntentConfig;
use scholarbot::skills::{builtin_skills, SkillContext};
use scholarbot::state::validate_state;
use scholarbot::template::render_template;
use scholarbot::text::Utterance;
use scholarbot::DialogueState;

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data");

fn config() -> AgentConfig {
    AgentConfig::load(format!("{DATA}/agent.toml")).unwrap()
}

fn trained() -> &'static Agent {
    static AGENT: OnceLock<Agent> = OnceLock::new();
    AGENT.get_or_init(|| Agent::load(config()).unwrap())
}

fn rules_only() -> Agent {
    let cfg = config();
    let (kb, _) = load_snapshot(&cfg.snapshot_dir).unwrap();
    Agent::assemble(cfg, None, kb).unwrap()
}

fn vocab() -> SlotVocab {
    toml::from_str(&std::fs::read_to_string(format!("{DATA}/slot_vocab.toml")).unwrap()).unwrap()
}

#[test]
fn golden_context_transcript() {
    let golden = std::fs::read_to_string(format!("{DATA}/golden/context_transcript.txt")).unwrap();
    let inputs = transcript_inputs(&golden);
    assert_eq!(inputs.len(), 6);
    assert_eq!(run_transcript(trained(), "golden", &inputs), golden);
}

#[test]
fn pronoun_follow_up_uses_memory() {
    let agent = rules_only();
    agent.process_turn("p", "who wrote attention is all you need");
    let r = agent.process_turn("p", "when was it published");
    assert_eq!(r.input_state.slot("PAPER_TITLE"), Some("Attention Is All You Need"));
    assert!(r.reply.contains("2017"), "{}", r.reply);

    let fresh = agent.process_turn("q", "when was it published");
    assert_eq!(fresh.route, RouteKind::OneShot);
    assert!(fresh.reply.contains("paper title"), "{}", fresh.reply);
}

#[test]
fn unknown_entities_get_no_result() {
    let agent = rules_only();
    for (i, q) in [
        "when is the deadline for eacl 2021",
        "who wrote a grammar of klingon verbs",
        "what is the h-index of ada lovelace",
        "where is icml 1999 held",
    ]
    .iter()
    .enumerate()
    {
        let r = agent.process_turn(&format!("u{i}"), q);
        assert_eq!(r.responses[0].intent, "no-result", "{q}");
        assert!(r.reply.starts_with("Sorry, I could not find"), "{q}: {}", r.reply);
    }
}

#[test]
fn empty_message_asks_for_input() {
    let agent = rules_only();
    for text in ["", "   ", "\t\n"] {
        let r = agent.process_turn("e", text);
        assert_eq!(r.nlu_source, None);
        assert_eq!(r.reply, "Please type a question.");
    }
}

#[test]
fn replies_rederive_from_template_and_state() {
    let agent = trained();
    for q in [
        "when is the deadline for acl 2020",
        "who wrote attention is all you need",
        "what is the latest nlp news",
        "bye",
        "hello",
        "which tutorials are at naacl 2019",
    ] {
        let r = agent.process_turn("rederive", q);
        assert_eq!(r.responses.len(), r.replies.len());
        for ((state, id), reply) in r.responses.iter().zip(&r.template_ids).zip(&r.replies) {
            let t = agent.nlg().get(id).unwrap_or_else(|| panic!("unknown template {id}"));
            assert_eq!(t.intent, state.intent);
            assert_eq!(&render_template(t, state).unwrap(), reply);
        }
    }
}

/// Inputs for every NLU template with fixture values, routed through the
/// tree; each skill answers with valid states whose slots the response
/// templates can use, and answers the same way twice.
#[test]
fn skills_are_pure_and_answer_within_schema() {
    let agent = rules_only();
    let tree = agent.tree();
    let registry = tree.registry();
    let kb = agent.snapshot();
    let skills = builtin_skills();
    let memory = MemoryStack::new(10);
    let ctx = SkillContext {
        kb: &kb,
        memory: &memory,
        registry,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let instances = instantiate_templates(agent.nlu().rules(), &vocab(), 2, &mut rng).unwrap();
    assert!(instances.len() > 300);
    for inst in &instances {
        let input = agent
            .nlu()
            .parse(&Utterance::from_tokens(inst.tokens.clone()), registry)
            .state;
        let route = tree.route(None, &input);
        let Some(skill) = tree.node(route.target).handler.as_deref().and_then(|h| skills.get(h)) else {
            continue;
        };
        let first = skill.handle(&input, &ctx);
        assert_eq!(first, skill.handle(&input, &ctx), "{}", inst.text());
        assert!(!first.is_empty(), "{}", inst.text());
        for r in &first {
            assert!(validate_state(r, registry).is_empty(), "{}: {:?}", inst.text(), validate_state(r, registry));
            let usable: BTreeSet<&str> = agent
                .nlg()
                .candidates(&r.intent)
                .iter()
                .flat_map(|t| t.placeholders())
                .collect();
            for slot in r.slots.keys() {
                assert!(usable.contains(slot.as_str()), "{}: {} carries {slot}", inst.text(), r.intent);
            }
        }
    }
}

#[test]
fn registered_skill_is_routable_next_turn() {
    let mut agent = rules_only();
    let before = agent.process_turn("w", "which workshops are at acl 2020");
    assert_eq!(before.input_state.intent, "fallback");

    let workshops = |input: &DialogueState, ctx: &SkillContext| {
        let mut out = ctx.respond(input, "list-workshops");
        out.set_slot("CONF_NAME", input.slot("CONF_NAME").unwrap_or_default().to_uppercase());
        out.set_slot("EVENT_LIST", "Workshop on NLP for Science");
        vec![out]
    };
    agent
        .register_skill(
            "Task.Conference.Events",
            "Workshops",
            "workshops",
            Arc::new(workshops),
            vec![IntentConfig::new("list-workshops").required(&["CONF_NAME"]).answers(&["EVENT_LIST"])],
            "nlu\tTask.Conference.Events.Workshops\tlist-workshops\twhich workshops are at {CONF_NAME}\n",
            "nlg\tTask.Conference.Events.Workshops\tlist-workshops\tWorkshops at {CONF_NAME}: {EVENT_LIST}\n",
        )
        .unwrap();
    let after = agent.process_turn("w", "which workshops are at acl 2020");
    assert_eq!(after.skill, "Task.Conference.Events.Workshops");
    assert_eq!(after.active_path.as_deref(), Some("Master.Task.Conference.Events.Workshops"));
    assert_eq!(after.reply, "Workshops at ACL 2020: Workshop on NLP for Science");
}

#[test]
fn interleaved_sessions_match_serial_runs() {
    let script = [
        "when is the deadline for acl 2020",
        "and where is it held",
        "who wrote attention is all you need",
        "show its abstract",
        "hello",
        "what is the latest nlp news",
    ];
    let serial = rules_only();
    let expected: Vec<Vec<String>> = (0..4)
        .map(|s| script.iter().map(|q| serial.process_turn(&format!("s{s}"), q).reply).collect())
        .collect();

    let shared = Arc::new(rules_only());
    let handles: Vec<_> = (0..4)
        .map(|s| {
            let agent = Arc::clone(&shared);
            std::thread::spawn(move || {
                script
                    .iter()
                    .map(|q| agent.process_turn(&format!("s{s}"), q).reply)
                    .collect::<Vec<_>>()
            })
        })
        .collect();
    let got: Vec<Vec<String>> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    assert_eq!(got, expected);
}
