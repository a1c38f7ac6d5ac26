use elenchus_core::opponent::{AppliedProposal, ValidatedProposal};
use serde::Serialize;

#[derive(Debug, Clone, Default, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum OracleStatus {
    #[default]
    Idle,
    Pending,
    Ready {
        proposal: ValidatedProposal,
        applied: AppliedProposal,
    },
    Failed {
        error: &'static str,
        message: String,
    },
}

/// At most one oracle call per session. Bumping `generation` orphans the
/// call in flight, whose result is then dropped.
#[derive(Debug, Default)]
pub struct OracleSlot {
    pub generation: u64,
    pub status: OracleStatus,
}
