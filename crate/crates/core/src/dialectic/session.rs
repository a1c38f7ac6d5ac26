use chrono::{DateTime, Utc};

use super::{
    replay, Actor, DialecticError, DialecticEvent, DialecticalState, EventKind, ReplayError,
    SessionDocument,
};

/// An event log together with the state it folds to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session {
    name: String,
    events: Vec<DialecticEvent>,
    state: DialecticalState,
}

impl Session {
    pub fn new(name: impl Into<String>) -> Self {
        Session {
            name: name.into(),
            events: Vec::new(),
            state: DialecticalState::new(),
        }
    }

    pub fn from_document(doc: SessionDocument) -> Result<Self, ReplayError> {
        let state = replay(&doc.events)?;
        Ok(Session {
            name: doc.session,
            events: doc.events,
            state,
        })
    }

    pub fn to_document(&self) -> SessionDocument {
        SessionDocument {
            session: self.name.clone(),
            events: self.events.clone(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn events(&self) -> &[DialecticEvent] {
        &self.events
    }

    pub fn state(&self) -> &DialecticalState {
        &self.state
    }

    pub fn next_seq(&self) -> u64 {
        self.state.next_seq()
    }

    /// Assigns the next sequence number and applies the move. The log is
    /// only extended when the move is legal.
    pub fn append(
        &mut self,
        actor: Actor,
        kind: EventKind,
    ) -> Result<&DialecticEvent, DialecticError> {
        self.append_at(actor, kind, None)
    }

    pub fn append_at(
        &mut self,
        actor: Actor,
        kind: EventKind,
        timestamp: Option<DateTime<Utc>>,
    ) -> Result<&DialecticEvent, DialecticError> {
        let event = DialecticEvent {
            seq: self.next_seq(),
            timestamp,
            actor,
            kind,
        };
        self.state.apply(&event)?;
        self.events.push(event);
        Ok(self.events.last().unwrap())
    }

    /// Replays a prefix of the log, up to and including `seq`.
    pub fn state_at(&self, seq: u64) -> DialecticalState {
        let n = self.events.partition_point(|e| e.seq <= seq);
        replay(&self.events[..n]).expect("prefix of a valid log")
    }
}
