use std::collections::BTreeSet;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::base::AtomicImplication;
use crate::formula::AtomId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Actor {
    Respondent,
    Opponent,
}

/// Which side of the bilateral position a proposition sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stance {
    Commitment,
    Denial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropositionStatus {
    Active,
    Retracted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropositionRecord {
    pub id: AtomId,
    pub text: String,
    pub status: PropositionStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewProposition {
    pub id: AtomId,
    pub text: String,
    pub side: Stance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResolutionKind {
    Retract,
    Refine,
}

/// How the respondent closed an accepted tension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub kind: ResolutionKind,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub retracted: BTreeSet<AtomId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub added: Option<NewProposition>,
    /// The sequent entered into I, when it differs from the tension's own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endorsed: Option<AtomicImplication>,
}

impl Resolution {
    pub fn retract(atoms: impl IntoIterator<Item = AtomId>) -> Self {
        Resolution {
            kind: ResolutionKind::Retract,
            retracted: atoms.into_iter().collect(),
            added: None,
            endorsed: None,
        }
    }

    pub fn refine(added: NewProposition, endorsed: Option<AtomicImplication>) -> Self {
        Resolution {
            kind: ResolutionKind::Refine,
            retracted: BTreeSet::new(),
            added: Some(added),
            endorsed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TensionStatus {
    Open,
    Accepted,
    Contested,
    /// Removed because a retraction left it with no legal shape.
    Dropped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tension {
    pub id: String,
    pub lhs: BTreeSet<AtomId>,
    pub rhs: BTreeSet<AtomId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rationale: Option<String>,
    pub status: TensionStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<Resolution>,
}

impl Tension {
    pub fn as_implication(&self) -> AtomicImplication {
        AtomicImplication {
            lhs: self.lhs.clone(),
            rhs: self.rhs.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChallengeStatus {
    Open,
    Resolved,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Challenge {
    pub id: String,
    pub question: String,
    pub targets: BTreeSet<AtomId>,
    pub status: ChallengeStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    Commit {
        id: AtomId,
        text: String,
    },
    Deny {
        id: AtomId,
        text: String,
    },
    Retract {
        id: AtomId,
    },
    ProposeTension {
        tension: String,
        lhs: BTreeSet<AtomId>,
        rhs: BTreeSet<AtomId>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rationale: Option<String>,
    },
    AcceptTension {
        tension: String,
        resolution: Resolution,
    },
    ContestTension {
        tension: String,
    },
    RaiseChallenge {
        challenge: String,
        question: String,
        #[serde(default)]
        targets: BTreeSet<AtomId>,
    },
    ResolveChallenge {
        challenge: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        note: Option<String>,
    },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::Commit { .. } => "commit",
            EventKind::Deny { .. } => "deny",
            EventKind::Retract { .. } => "retract",
            EventKind::ProposeTension { .. } => "propose_tension",
            EventKind::AcceptTension { .. } => "accept_tension",
            EventKind::ContestTension { .. } => "contest_tension",
            EventKind::RaiseChallenge { .. } => "raise_challenge",
            EventKind::ResolveChallenge { .. } => "resolve_challenge",
        }
    }

    /// The only actor allowed to make this move.
    pub fn actor(&self) -> Actor {
        match self {
            EventKind::ProposeTension { .. } | EventKind::RaiseChallenge { .. } => Actor::Opponent,
            _ => Actor::Respondent,
        }
    }
}

/// One protocol move in the append-only log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DialecticEvent {
    pub seq: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<DateTime<Utc>>,
    pub actor: Actor,
    #[serde(flatten)]
    pub kind: EventKind,
}

/// An event as submitted, before the log assigns its sequence number.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewEvent {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<DateTime<Utc>>,
    pub actor: Actor,
    #[serde(flatten)]
    pub kind: EventKind,
}

/// On-disk session file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionDocument {
    pub session: String,
    pub events: Vec<DialecticEvent>,
}

impl SessionDocument {
    pub fn from_json(bytes: &[u8]) -> Result<Self, serde_json::Error> {
        serde_json::from_slice(bytes)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("session serializes");
        s.push('\n');
        s
    }
}
