use chrono::{DateTime, Utc};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ActivePath, MemoryStack};
use crate::schema::SchemaRegistry;
use crate::state::{merge_slots, DialogueState, UnresolvedSlots};

/// Per-conversation state. Callers serialize access to one session.
#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    pub memory: MemoryStack,
    pub active: Option<ActivePath>,
    pub created: DateTime<Utc>,
    pub last_active: DateTime<Utc>,
    pub turns: usize,
    /// NLG choice stream, seeded from the agent seed and the session id.
    pub rng: ChaCha8Rng,
    pub last_template: Option<String>,
}

/// FNV-1a over the seed bytes followed by the id bytes.
pub fn session_seed(seed: u64, id: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in seed.to_le_bytes().iter().chain(id.as_bytes()) {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

impl Session {
    pub fn new(id: impl Into<String>, seed: u64, capacity: usize, now: DateTime<Utc>) -> Self {
        let id = id.into();
        Session {
            rng: ChaCha8Rng::seed_from_u64(session_seed(seed, &id)),
            id,
            memory: MemoryStack::new(capacity),
            active: None,
            created: now,
            last_active: now,
            turns: 0,
            last_template: None,
        }
    }

    pub fn touch(&mut self, now: DateTime<Utc>) {
        self.last_active = self.last_active.max(now);
    }

    /// Fills missing required slots of `input` from this session's memory.
    pub fn resolve_followup(
        &self,
        input: &DialogueState,
        registry: &SchemaRegistry,
    ) -> Result<DialogueState, UnresolvedSlots> {
        let memory: Vec<DialogueState> = self.memory.recent().cloned().collect();
        merge_slots(input, &memory, registry)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::SchemaConfig;
    use crate::state::StateKind;

    fn registry() -> SchemaRegistry {
        SchemaRegistry::from_config(
            &SchemaConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/schema.toml")).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn seeds_differ_by_id_and_are_stable() {
        assert_eq!(session_seed(1, "a"), session_seed(1, "a"));
        assert_ne!(session_seed(1, "a"), session_seed(1, "b"));
        assert_ne!(session_seed(1, "a"), session_seed(2, "a"));
    }

    #[test]
    fn follow_up_takes_newest_value() {
        let reg = registry();
        let now = Utc::now();
        let mut s = Session::new("s", 0, 50, now);
        let old = DialogueState::for_intent(&reg, StateKind::Response, "give-title")
            .with_slot("PAPER_TITLE", "Old");
        let new = DialogueState::for_intent(&reg, StateKind::Response, "give-title")
            .with_slot("PAPER_TITLE", "New")
            .at_turn(1);
        s.memory.push(old).unwrap();
        s.memory.push(new).unwrap();
        let q = DialogueState::for_intent(&reg, StateKind::Input, "give-abstract").at_turn(2);
        assert_eq!(s.resolve_followup(&q, &reg).unwrap().slot("PAPER_TITLE"), Some("New"));

        let conf = DialogueState::for_intent(&reg, StateKind::Input, "give-deadlines").at_turn(2);
        let err = s.resolve_followup(&conf, &reg).unwrap_err();
        assert_eq!(err.missing, ["CONF_NAME"]);
        s.touch(now - chrono::Duration::seconds(5));
        assert!(s.last_active >= s.created);
    }
}
