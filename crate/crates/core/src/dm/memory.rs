use std::collections::VecDeque;

use serde::Serialize;

use super::DmError;
use crate::state::DialogueState;

pub const DEFAULT_CAPACITY: usize = 50;

/// Bounded stack of past input and response states, newest on top.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemoryStack {
    states: VecDeque<DialogueState>,
    capacity: usize,
}

impl Default for MemoryStack {
    fn default() -> Self {
        Self::new(DEFAULT_CAPACITY)
    }
}

impl MemoryStack {
    pub fn new(capacity: usize) -> Self {
        MemoryStack {
            states: VecDeque::new(),
            capacity: capacity.max(1),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Pushes one state, evicting the oldest at capacity.
    pub fn push(&mut self, state: DialogueState) -> Result<(), DmError> {
        if let Some(top) = self.states.back() {
            if state.turn_index < top.turn_index {
                return Err(DmError::OutOfOrder {
                    top: top.turn_index,
                    pushed: state.turn_index,
                });
            }
        }
        if self.states.len() == self.capacity {
            self.states.pop_front();
        }
        self.states.push_back(state);
        Ok(())
    }

    /// Pushes the input state of a turn, then its responses in order.
    pub fn push_turn(&mut self, input: DialogueState, responses: &[DialogueState]) -> Result<(), DmError> {
        self.push(input)?;
        for r in responses {
            self.push(r.clone())?;
        }
        Ok(())
    }

    /// Newest first.
    pub fn recent(&self) -> impl Iterator<Item = &DialogueState> {
        self.states.iter().rev()
    }

    /// Oldest first.
    pub fn states(&self) -> impl Iterator<Item = &DialogueState> {
        self.states.iter()
    }
}
