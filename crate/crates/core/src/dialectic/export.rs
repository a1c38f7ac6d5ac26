//! One-way dump of a session as issue-tracker records.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{
    Challenge, ChallengeStatus, DialecticEvent, DialecticalState, EventKind, PropositionStatus,
    ResolutionKind, Stance, TensionStatus,
};
use crate::formula::AtomId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IssueRecord {
    pub title: String,
    pub labels: Vec<String>,
    pub body: String,
    pub closed: bool,
}

fn atoms(set: &std::collections::BTreeSet<AtomId>) -> String {
    set.iter()
        .map(AtomId::as_str)
        .collect::<Vec<_>>()
        .join(", ")
}

/// One record per proposition, tension and challenge, in log order.
pub fn export_issues(events: &[DialecticEvent], state: &DialecticalState) -> Vec<IssueRecord> {
    let mut out = Vec::new();
    let mut introduced_at: BTreeMap<&AtomId, u64> = BTreeMap::new();
    for e in events {
        match &e.kind {
            EventKind::Commit { id, .. } | EventKind::Deny { id, .. } => {
                introduced_at.entry(id).or_insert(e.seq);
            }
            EventKind::AcceptTension { resolution, .. } => {
                if let Some(added) = &resolution.added {
                    introduced_at.entry(&added.id).or_insert(e.seq);
                }
            }
            _ => {}
        }
    }

    for e in events {
        match &e.kind {
            EventKind::Commit { id, .. } | EventKind::Deny { id, .. } => {
                if introduced_at.get(id) == Some(&e.seq) {
                    let side = match e.kind {
                        EventKind::Deny { .. } => Stance::Denial,
                        _ => Stance::Commitment,
                    };
                    out.push(proposition_issue(state, id, side, e.seq));
                }
            }
            EventKind::AcceptTension { resolution, .. } => {
                if let Some(added) = &resolution.added {
                    out.push(proposition_issue(state, &added.id, added.side, e.seq));
                }
            }
            EventKind::ProposeTension { tension, .. } => {
                if let Some(t) = state.tension(tension) {
                    let status = format!("{:?}", t.status).to_lowercase();
                    let mut body = format!("{} |- {}\n", atoms(&t.lhs), atoms(&t.rhs));
                    if let Some(r) = &t.rationale {
                        body.push_str(&format!("\n{r}\n"));
                    }
                    if let Some(res) = &t.resolution {
                        let kind = match res.kind {
                            ResolutionKind::Retract => "retract",
                            ResolutionKind::Refine => "refine",
                        };
                        body.push_str(&format!("\nResolved by {kind}"));
                        if !res.retracted.is_empty() {
                            body.push_str(&format!(", retracting {}", atoms(&res.retracted)));
                        }
                        if let Some(added) = &res.added {
                            body.push_str(&format!(", adding {}", added.id));
                        }
                        body.push_str(".\n");
                    }
                    out.push(IssueRecord {
                        title: format!("{}: {} |- {}", t.id, atoms(&t.lhs), atoms(&t.rhs)),
                        labels: vec!["tension".into(), status],
                        body,
                        closed: t.status != TensionStatus::Open,
                    });
                }
            }
            EventKind::RaiseChallenge { challenge, .. } => {
                if let Some(c) = state.challenges().find(|c| &c.id == challenge) {
                    out.push(challenge_issue(c));
                }
            }
            _ => {}
        }
    }
    out
}

fn proposition_issue(state: &DialecticalState, id: &AtomId, side: Stance, seq: u64) -> IssueRecord {
    let rec = state.proposition(id).expect("logged proposition is known");
    let side = match side {
        Stance::Commitment => "commitment",
        Stance::Denial => "denial",
    };
    let mut labels = vec![side.to_string()];
    if rec.status == PropositionStatus::Retracted {
        labels.push("retracted".into());
    }
    IssueRecord {
        title: format!("{id}: {}", rec.text),
        labels,
        body: format!("Introduced at event {seq}.\n"),
        closed: rec.status == PropositionStatus::Retracted,
    }
}

fn challenge_issue(c: &Challenge) -> IssueRecord {
    let mut body = format!("{}\n\nTargets: {}\n", c.question, atoms(&c.targets));
    if let Some(n) = &c.note {
        body.push_str(&format!("\n{n}\n"));
    }
    IssueRecord {
        title: format!("{}: {}", c.id, c.question),
        labels: vec!["challenge".into()],
        body,
        closed: c.status == ChallengeStatus::Resolved,
    }
}
