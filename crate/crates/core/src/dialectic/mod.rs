//! The dialectical protocol as an event-sourced state machine.
//!
//! State is a left fold of [`DialecticalState::apply`] over the event log.
//! The fold enforces bilateral consistency (`C ∩ D = ∅`), the tension
//! shapes, and the rule that only respondent acceptances put sequents
//! into I.

mod event;
mod export;
mod session;

pub use event::{
    Actor, Challenge, ChallengeStatus, DialecticEvent, EventKind, NewEvent, NewProposition,
    PropositionRecord, PropositionStatus, Resolution, ResolutionKind, SessionDocument, Stance,
    Tension, TensionStatus,
};
pub use export::{export_issues, IssueRecord};
pub use session::Session;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::base::{AtomicImplication, MaterialBase};
use crate::formula::AtomId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DialecticError {
    #[error("`{0}` is on the other side of the position")]
    BilateralViolation(AtomId),
    #[error("unknown tension `{0}`")]
    UnknownTension(String),
    #[error("`{0}` has already been resolved")]
    DoubleResolution(String),
    #[error("tension `{0}` references retracted propositions")]
    StaleTension(String),
    #[error("proposition id `{0}` is already in use")]
    DuplicateAtomId(AtomId),
    #[error("tension id `{0}` is already in use")]
    DuplicateTensionId(String),
    #[error("challenge id `{0}` is already in use")]
    DuplicateChallengeId(String),
    #[error("unknown proposition `{0}`")]
    UnknownAtom(AtomId),
    #[error("proposition `{0}` is not active")]
    NotActive(AtomId),
    #[error("unknown challenge `{0}`")]
    UnknownChallenge(String),
    #[error("tension `{0}` does not fit the position")]
    IllegalTension(String),
    #[error("invalid resolution for `{tension}`: {reason}")]
    InvalidResolution { tension: String, reason: String },
    #[error("{kind} must be made by the {expected:?}")]
    WrongActor { kind: &'static str, expected: Actor },
    #[error("expected sequence number {expected}, got {found}")]
    SequenceGap { expected: u64, found: u64 },
    #[error("empty proposition or question text")]
    EmptyText,
}

impl DialecticError {
    /// Stable machine-readable name.
    pub fn code(&self) -> &'static str {
        match self {
            DialecticError::BilateralViolation(_) => "BilateralViolation",
            DialecticError::UnknownTension(_) => "UnknownTension",
            DialecticError::DoubleResolution(_) => "DoubleResolution",
            DialecticError::StaleTension(_) => "StaleTension",
            DialecticError::DuplicateAtomId(_) => "DuplicateAtomId",
            DialecticError::DuplicateTensionId(_) => "DuplicateTensionId",
            DialecticError::DuplicateChallengeId(_) => "DuplicateChallengeId",
            DialecticError::UnknownAtom(_) => "UnknownAtom",
            DialecticError::NotActive(_) => "NotActive",
            DialecticError::UnknownChallenge(_) => "UnknownChallenge",
            DialecticError::IllegalTension(_) => "IllegalTension",
            DialecticError::InvalidResolution { .. } => "InvalidResolution",
            DialecticError::WrongActor { .. } => "WrongActor",
            DialecticError::SequenceGap { .. } => "SequenceGap",
            DialecticError::EmptyText => "EmptyText",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("event {seq} (#{index} in log): {error}")]
pub struct ReplayError {
    /// 1-based position in the log.
    pub index: usize,
    pub seq: u64,
    pub error: DialecticError,
}

/// The bilateral position `[C : D]`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Position {
    pub commitments: BTreeSet<AtomId>,
    pub denials: BTreeSet<AtomId>,
}

impl Position {
    pub fn contains(&self, a: &AtomId) -> bool {
        self.commitments.contains(a) || self.denials.contains(a)
    }

    pub fn side_of(&self, a: &AtomId) -> Option<Stance> {
        if self.commitments.contains(a) {
            Some(Stance::Commitment)
        } else if self.denials.contains(a) {
            Some(Stance::Denial)
        } else {
            None
        }
    }

    /// Whether `lhs ⊢ rhs` is a legal tension shape here: `lhs ⊆ C`,
    /// `rhs ⊆ D`, not both empty; or the self-tension `{a} ⊢ {a}` for an
    /// atom in the position.
    pub fn admits_tension(&self, lhs: &BTreeSet<AtomId>, rhs: &BTreeSet<AtomId>) -> bool {
        if lhs.is_empty() && rhs.is_empty() {
            return false;
        }
        if lhs.len() == 1 && lhs == rhs {
            return self.contains(lhs.first().unwrap());
        }
        lhs.is_subset(&self.commitments) && rhs.is_subset(&self.denials)
    }
}

/// Where an implication in I came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImplicationRecord {
    pub tension: String,
    /// Sequence number of the accepting event.
    pub accepted_at: u64,
}

/// An implication removed from I because a retraction touched it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrunedImplication {
    pub implication: AtomicImplication,
    pub tension: String,
    pub retracted: AtomId,
    pub at: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DialecticalState {
    propositions: BTreeMap<AtomId, PropositionRecord>,
    position: Position,
    tensions: BTreeMap<String, Tension>,
    implications: BTreeMap<AtomicImplication, ImplicationRecord>,
    challenges: BTreeMap<String, Challenge>,
    pruned: Vec<PrunedImplication>,
    last_seq: u64,
}

impl DialecticalState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn position(&self) -> &Position {
        &self.position
    }

    pub fn propositions(&self) -> &BTreeMap<AtomId, PropositionRecord> {
        &self.propositions
    }

    pub fn proposition(&self, id: &AtomId) -> Option<&PropositionRecord> {
        self.propositions.get(id)
    }

    pub fn is_active(&self, id: &AtomId) -> bool {
        self.propositions
            .get(id)
            .is_some_and(|p| p.status == PropositionStatus::Active)
    }

    pub fn tension(&self, id: &str) -> Option<&Tension> {
        self.tensions.get(id)
    }

    /// Every tension ever proposed, with its current status.
    pub fn tensions(&self) -> impl Iterator<Item = &Tension> {
        self.tensions.values()
    }

    pub fn open_tensions(&self) -> impl Iterator<Item = &Tension> {
        self.tensions
            .values()
            .filter(|t| t.status == TensionStatus::Open)
    }

    pub fn implications(&self) -> &BTreeMap<AtomicImplication, ImplicationRecord> {
        &self.implications
    }

    pub fn challenges(&self) -> impl Iterator<Item = &Challenge> {
        self.challenges.values()
    }

    pub fn open_challenges(&self) -> impl Iterator<Item = &Challenge> {
        self.challenges
            .values()
            .filter(|c| c.status == ChallengeStatus::Open)
    }

    pub fn pruned(&self) -> &[PrunedImplication] {
        &self.pruned
    }

    pub fn last_seq(&self) -> u64 {
        self.last_seq
    }

    pub fn next_seq(&self) -> u64 {
        self.last_seq + 1
    }

    /// Applies one event, leaving `self` untouched on error.
    pub fn apply(&mut self, event: &DialecticEvent) -> Result<(), DialecticError> {
        let mut next = self.clone();
        next.apply_in_place(event)?;
        *self = next;
        Ok(())
    }

    /// Functional form of [`apply`](Self::apply).
    pub fn apply_event(&self, event: &DialecticEvent) -> Result<Self, DialecticError> {
        let mut next = self.clone();
        next.apply_in_place(event)?;
        Ok(next)
    }

    fn apply_in_place(&mut self, event: &DialecticEvent) -> Result<(), DialecticError> {
        if event.seq != self.next_seq() {
            return Err(DialecticError::SequenceGap {
                expected: self.next_seq(),
                found: event.seq,
            });
        }
        let expected = event.kind.actor();
        if event.actor != expected {
            return Err(DialecticError::WrongActor {
                kind: event.kind.name(),
                expected,
            });
        }
        let seq = event.seq;
        match &event.kind {
            EventKind::Commit { id, text } => self.introduce(id, text, Stance::Commitment)?,
            EventKind::Deny { id, text } => self.introduce(id, text, Stance::Denial)?,
            EventKind::Retract { id } => {
                if !self.propositions.contains_key(id) {
                    return Err(DialecticError::UnknownAtom(id.clone()));
                }
                if !self.is_active(id) {
                    return Err(DialecticError::NotActive(id.clone()));
                }
                self.retract(id, seq);
            }
            EventKind::ProposeTension {
                tension,
                lhs,
                rhs,
                rationale,
            } => {
                if self.tensions.contains_key(tension) {
                    return Err(DialecticError::DuplicateTensionId(tension.clone()));
                }
                self.require_active(lhs.iter().chain(rhs))?;
                if !self.position.admits_tension(lhs, rhs) {
                    return Err(DialecticError::IllegalTension(tension.clone()));
                }
                self.tensions.insert(
                    tension.clone(),
                    Tension {
                        id: tension.clone(),
                        lhs: lhs.clone(),
                        rhs: rhs.clone(),
                        rationale: rationale.clone(),
                        status: TensionStatus::Open,
                        resolution: None,
                    },
                );
            }
            EventKind::AcceptTension {
                tension,
                resolution,
            } => self.accept(tension, resolution, seq)?,
            EventKind::ContestTension { tension } => {
                self.open_tension(tension)?;
                self.tensions.get_mut(tension).unwrap().status = TensionStatus::Contested;
            }
            EventKind::RaiseChallenge {
                challenge,
                question,
                targets,
            } => {
                if self.challenges.contains_key(challenge) {
                    return Err(DialecticError::DuplicateChallengeId(challenge.clone()));
                }
                if question.trim().is_empty() {
                    return Err(DialecticError::EmptyText);
                }
                self.require_active(targets.iter())?;
                self.challenges.insert(
                    challenge.clone(),
                    Challenge {
                        id: challenge.clone(),
                        question: question.clone(),
                        targets: targets.clone(),
                        status: ChallengeStatus::Open,
                        note: None,
                    },
                );
            }
            EventKind::ResolveChallenge { challenge, note } => {
                let c = self
                    .challenges
                    .get_mut(challenge)
                    .ok_or_else(|| DialecticError::UnknownChallenge(challenge.clone()))?;
                if c.status == ChallengeStatus::Resolved {
                    return Err(DialecticError::DoubleResolution(challenge.clone()));
                }
                c.status = ChallengeStatus::Resolved;
                c.note = note.clone();
            }
        }
        self.last_seq = seq;
        Ok(())
    }

    fn introduce(&mut self, id: &AtomId, text: &str, side: Stance) -> Result<(), DialecticError> {
        if text.trim().is_empty() {
            return Err(DialecticError::EmptyText);
        }
        if let Some(existing) = self.position.side_of(id) {
            if existing != side {
                return Err(DialecticError::BilateralViolation(id.clone()));
            }
        }
        if self.propositions.contains_key(id) {
            return Err(DialecticError::DuplicateAtomId(id.clone()));
        }
        self.propositions.insert(
            id.clone(),
            PropositionRecord {
                id: id.clone(),
                text: text.to_string(),
                status: PropositionStatus::Active,
            },
        );
        match side {
            Stance::Commitment => self.position.commitments.insert(id.clone()),
            Stance::Denial => self.position.denials.insert(id.clone()),
        };
        Ok(())
    }

    fn require_active<'a>(
        &self,
        mut atoms: impl Iterator<Item = &'a AtomId>,
    ) -> Result<(), DialecticError> {
        match atoms.find(|a| !self.is_active(a)) {
            None => Ok(()),
            Some(a) if self.propositions.contains_key(a) => {
                Err(DialecticError::NotActive(a.clone()))
            }
            Some(a) => Err(DialecticError::UnknownAtom(a.clone())),
        }
    }

    fn retract(&mut self, id: &AtomId, seq: u64) {
        if let Some(p) = self.propositions.get_mut(id) {
            p.status = PropositionStatus::Retracted;
        }
        self.position.commitments.remove(id);
        self.position.denials.remove(id);

        for t in self.tensions.values_mut() {
            if t.status != TensionStatus::Open {
                continue;
            }
            let touched = t.lhs.remove(id) | t.rhs.remove(id);
            if touched && !self.position.admits_tension(&t.lhs, &t.rhs) {
                t.status = TensionStatus::Dropped;
            }
        }

        let (gone, kept): (BTreeMap<_, _>, BTreeMap<_, _>) = std::mem::take(&mut self.implications)
            .into_iter()
            .partition(|(imp, _)| imp.mentions(id));
        self.implications = kept;
        self.pruned.extend(
            gone.into_iter()
                .map(|(implication, rec)| PrunedImplication {
                    implication,
                    tension: rec.tension,
                    retracted: id.clone(),
                    at: seq,
                }),
        );
    }

    fn open_tension(&self, id: &str) -> Result<&Tension, DialecticError> {
        let t = self
            .tensions
            .get(id)
            .ok_or_else(|| DialecticError::UnknownTension(id.to_string()))?;
        match t.status {
            TensionStatus::Open => Ok(t),
            TensionStatus::Dropped => Err(DialecticError::StaleTension(id.to_string())),
            TensionStatus::Accepted | TensionStatus::Contested => {
                Err(DialecticError::DoubleResolution(id.to_string()))
            }
        }
    }

    fn accept(
        &mut self,
        id: &str,
        resolution: &Resolution,
        seq: u64,
    ) -> Result<(), DialecticError> {
        let tension = self.open_tension(id)?.clone();
        let invalid = |reason: &str| DialecticError::InvalidResolution {
            tension: id.to_string(),
            reason: reason.to_string(),
        };
        if tension
            .lhs
            .iter()
            .chain(&tension.rhs)
            .any(|a| !self.is_active(a))
        {
            return Err(DialecticError::StaleTension(id.to_string()));
        }
        match resolution.kind {
            ResolutionKind::Retract if resolution.retracted.is_empty() => {
                return Err(invalid("retraction names no proposition"))
            }
            ResolutionKind::Retract if resolution.added.is_some() => {
                return Err(invalid("retraction cannot add a proposition"))
            }
            ResolutionKind::Refine if resolution.added.is_none() => {
                return Err(invalid("refinement must add a proposition"))
            }
            _ => {}
        }
        if let Some(a) = resolution
            .retracted
            .iter()
            .find(|a| !tension.lhs.contains(*a) && !tension.rhs.contains(*a))
        {
            return Err(invalid(&format!("`{a}` is not part of the tension")));
        }

        // The tension's own sequent is inserted before its retractions run,
        // so a pure retraction leaves it pruned along with the atom.
        let implication = match &resolution.endorsed {
            Some(e) => {
                if e.lhs.is_empty() && e.rhs.is_empty() {
                    return Err(invalid("endorsed sequent is empty"));
                }
                None
            }
            None => Some(tension.as_implication()),
        };
        if let Some(imp) = implication {
            self.implications.entry(imp).or_insert(ImplicationRecord {
                tension: id.to_string(),
                accepted_at: seq,
            });
        }
        for a in &resolution.retracted {
            self.retract(a, seq);
        }
        if let Some(added) = &resolution.added {
            self.introduce(&added.id, &added.text, added.side)?;
        }
        if let Some(e) = &resolution.endorsed {
            if e.atoms().any(|a| !self.is_active(a)) {
                return Err(DialecticError::StaleTension(id.to_string()));
            }
            self.implications
                .entry(e.clone())
                .or_insert(ImplicationRecord {
                    tension: id.to_string(),
                    accepted_at: seq,
                });
        }
        let t = self.tensions.get_mut(id).unwrap();
        t.status = TensionStatus::Accepted;
        t.resolution = Some(resolution.clone());
        Ok(())
    }

    /// Checks the structural invariants every reachable state satisfies.
    pub fn check_invariants(&self) -> Result<(), String> {
        if let Some(a) = self
            .position
            .commitments
            .intersection(&self.position.denials)
            .next()
        {
            return Err(format!("bilateral violation on `{a}`"));
        }
        for a in self
            .position
            .commitments
            .iter()
            .chain(&self.position.denials)
        {
            if !self.is_active(a) {
                return Err(format!("position holds inactive `{a}`"));
            }
        }
        for (p, rec) in &self.propositions {
            if rec.status == PropositionStatus::Active && !self.position.contains(p) {
                return Err(format!("active `{p}` missing from position"));
            }
        }
        for (imp, rec) in &self.implications {
            if let Some(a) = imp.atoms().find(|a| !self.is_active(a)) {
                return Err(format!("implication `{imp}` mentions inactive `{a}`"));
            }
            match self.tensions.get(&rec.tension) {
                Some(t) if t.status == TensionStatus::Accepted => {}
                _ => return Err(format!("implication `{imp}` lacks an accepted tension")),
            }
        }
        for t in self.open_tensions() {
            if !self.position.admits_tension(&t.lhs, &t.rhs) {
                return Err(format!("open tension `{}` has an illegal shape", t.id));
            }
        }
        Ok(())
    }
}

/// Left fold of [`DialecticalState::apply`] from the empty state.
pub fn replay(log: &[DialecticEvent]) -> Result<DialecticalState, ReplayError> {
    let mut state = DialecticalState::new();
    for (i, e) in log.iter().enumerate() {
        state.apply(e).map_err(|error| ReplayError {
            index: i + 1,
            seq: e.seq,
            error,
        })?;
    }
    Ok(state)
}

/// `L = C ∪ D`, relation `I` (Containment stays implicit). Open tensions
/// are not part of the base.
pub fn extract_base(state: &DialecticalState) -> MaterialBase {
    let atoms = state
        .position
        .commitments
        .iter()
        .chain(&state.position.denials)
        .cloned();
    MaterialBase::from_parts(
        atoms,
        state
            .implications
            .iter()
            .map(|(imp, rec)| (imp.clone(), Some(rec.tension.clone()))),
    )
    .expect("implications only mention active propositions")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(n: &str) -> AtomId {
        AtomId::new(n).unwrap()
    }

    fn ids(names: &[&str]) -> BTreeSet<AtomId> {
        names.iter().map(|n| id(n)).collect()
    }

    struct Log(Vec<DialecticEvent>);

    impl Log {
        fn new() -> Self {
            Log(vec![])
        }
        fn push(&mut self, actor: Actor, kind: EventKind) -> &mut Self {
            let seq = self.0.len() as u64 + 1;
            self.0.push(DialecticEvent {
                seq,
                timestamp: None,
                actor,
                kind,
            });
            self
        }
        fn commit(&mut self, n: &str) -> &mut Self {
            self.push(
                Actor::Respondent,
                EventKind::Commit {
                    id: id(n),
                    text: format!("{n} text"),
                },
            )
        }
        fn deny(&mut self, n: &str) -> &mut Self {
            self.push(
                Actor::Respondent,
                EventKind::Deny {
                    id: id(n),
                    text: format!("{n} text"),
                },
            )
        }
        fn propose(&mut self, t: &str, lhs: &[&str], rhs: &[&str]) -> &mut Self {
            self.push(
                Actor::Opponent,
                EventKind::ProposeTension {
                    tension: t.into(),
                    lhs: ids(lhs),
                    rhs: ids(rhs),
                    rationale: None,
                },
            )
        }
        fn accept(&mut self, t: &str, r: Resolution) -> &mut Self {
            self.push(
                Actor::Respondent,
                EventKind::AcceptTension {
                    tension: t.into(),
                    resolution: r,
                },
            )
        }
    }

    fn refine_to(new: &str, lhs: &[&str], rhs: &[&str]) -> Resolution {
        Resolution::refine(
            NewProposition {
                id: id(new),
                text: format!("{new} text"),
                side: Stance::Commitment,
            },
            Some(AtomicImplication::new(ids(lhs), ids(rhs))),
        )
    }

    #[test]
    fn refinement_enters_endorsed_sequent() {
        let mut log = Log::new();
        log.commit("p2")
            .propose("t11", &["p2"], &[])
            .accept("t11", refine_to("p18", &["p2"], &["p18"]));
        let s = replay(&log.0).unwrap();
        assert_eq!(
            s.implications().keys().cloned().collect::<Vec<_>>(),
            vec![AtomicImplication::from_names(&["p2"], &["p18"])]
        );
        assert!(s.position().commitments.is_superset(&ids(&["p2", "p18"])));
        assert_eq!(s.implications().values().next().unwrap().tension, "t11");
        s.check_invariants().unwrap();
    }

    #[test]
    fn contest_leaves_i_unchanged() {
        let mut log = Log::new();
        log.commit("a").deny("b").propose("t", &["a"], &["b"]);
        log.push(
            Actor::Respondent,
            EventKind::ContestTension {
                tension: "t".into(),
            },
        );
        let s = replay(&log.0).unwrap();
        assert!(s.implications().is_empty());
        assert_eq!(s.open_tensions().count(), 0);
        assert_eq!(s.tension("t").unwrap().status, TensionStatus::Contested);
    }

    #[test]
    fn retraction_prunes_i() {
        let mut log = Log::new();
        log.commit("p7")
            .commit("p20")
            .propose("t1", &["p20"], &[])
            .accept("t1", refine_to("p18", &["p20"], &["p18"]));
        log.push(Actor::Respondent, EventKind::Retract { id: id("p20") });
        let s = replay(&log.0).unwrap();
        assert!(!s.position().commitments.contains(&id("p20")));
        assert!(s.implications().keys().all(|i| !i.mentions(&id("p20"))));
        assert_eq!(s.pruned().len(), 1);
        assert_eq!(s.pruned()[0].tension, "t1");
        let base = extract_base(&s);
        assert!(!base.atoms().contains(&id("p20")));
        assert!(base.is_empty());
    }

    #[test]
    fn retraction_trims_and_drops_open_tensions() {
        let mut log = Log::new();
        log.commit("a")
            .commit("b")
            .deny("c")
            .propose("t1", &["a", "b"], &["c"])
            .propose("t2", &["a"], &[]);
        log.push(Actor::Respondent, EventKind::Retract { id: id("a") });
        let s = replay(&log.0).unwrap();
        let t1 = s.tension("t1").unwrap();
        assert_eq!(
            (t1.status, t1.lhs.clone()),
            (TensionStatus::Open, ids(&["b"]))
        );
        assert_eq!(s.tension("t2").unwrap().status, TensionStatus::Dropped);
        let mut more = log.0.clone();
        more.push(DialecticEvent {
            seq: 7,
            timestamp: None,
            actor: Actor::Respondent,
            kind: EventKind::AcceptTension {
                tension: "t2".into(),
                resolution: refine_to("d", &[], &["d"]),
            },
        });
        assert_eq!(
            replay(&more).unwrap_err().error,
            DialecticError::StaleTension("t2".into())
        );
    }

    #[test]
    fn pure_retraction_leaves_no_residue() {
        let mut log = Log::new();
        log.commit("a").commit("b").propose("t", &["a", "b"], &[]);
        log.accept("t", Resolution::retract([id("a")]));
        let s = replay(&log.0).unwrap();
        assert!(s.implications().is_empty());
        assert_eq!(s.pruned().len(), 1);
        assert_eq!(s.tension("t").unwrap().status, TensionStatus::Accepted);
        s.check_invariants().unwrap();
    }

    #[test]
    fn bilateral_violation_reported_at_index() {
        let mut log = Log::new();
        log.commit("a").deny("a");
        let err = replay(&log.0).unwrap_err();
        assert_eq!(err.index, 2);
        assert_eq!(err.error, DialecticError::BilateralViolation(id("a")));
        assert_eq!(err.error.code(), "BilateralViolation");
    }

    #[test]
    fn empty_log() {
        let s = replay(&[]).unwrap();
        assert_eq!(s, DialecticalState::new());
        assert!(extract_base(&s).atoms().is_empty());
    }

    #[test]
    fn open_tension_excluded_from_base() {
        let mut log = Log::new();
        log.commit("a").deny("b").propose("t", &["a"], &["b"]);
        let base = extract_base(&replay(&log.0).unwrap());
        assert_eq!(base.atoms().len(), 2);
        assert!(base.is_empty());
    }

    #[test]
    fn protocol_errors() {
        let cases: Vec<(Log, DialecticError)> = vec![
            (
                {
                    let mut l = Log::new();
                    l.commit("a").commit("a");
                    l
                },
                DialecticError::DuplicateAtomId(id("a")),
            ),
            (
                {
                    let mut l = Log::new();
                    l.commit("a")
                        .propose("t", &["a"], &[])
                        .propose("t", &["a"], &[]);
                    l
                },
                DialecticError::DuplicateTensionId("t".into()),
            ),
            (
                {
                    let mut l = Log::new();
                    l.commit("a").accept("t", Resolution::retract([id("a")]));
                    l
                },
                DialecticError::UnknownTension("t".into()),
            ),
            (
                {
                    let mut l = Log::new();
                    l.commit("a")
                        .commit("b")
                        .propose("t", &["a", "b"], &[])
                        .accept("t", Resolution::retract([id("a")]))
                        .accept("t", Resolution::retract([id("b")]));
                    l
                },
                DialecticError::DoubleResolution("t".into()),
            ),
            (
                {
                    let mut l = Log::new();
                    l.commit("a").propose("t", &[], &["a"]);
                    l
                },
                DialecticError::IllegalTension("t".into()),
            ),
            (
                {
                    let mut l = Log::new();
                    l.commit("a").propose("t", &[], &[]);
                    l
                },
                DialecticError::IllegalTension("t".into()),
            ),
            (
                {
                    let mut l = Log::new();
                    l.commit("a").propose("t", &["z"], &[]);
                    l
                },
                DialecticError::UnknownAtom(id("z")),
            ),
            (
                {
                    let mut l = Log::new();
                    l.commit("a")
                        .commit("b")
                        .propose("t", &["a"], &[])
                        .accept("t", Resolution::retract([id("b")]));
                    l
                },
                DialecticError::InvalidResolution {
                    tension: "t".into(),
                    reason: "`b` is not part of the tension".into(),
                },
            ),
            (
                {
                    let mut l = Log::new();
                    l.commit("a")
                        .propose("t", &["a"], &[])
                        .accept("t", refine_to("a", &["a"], &["a"]));
                    l
                },
                DialecticError::DuplicateAtomId(id("a")),
            ),
        ];
        for (log, expected) in cases {
            assert_eq!(replay(&log.0).unwrap_err().error, expected);
        }
    }

    #[test]
    fn actors_and_sequence_enforced() {
        let mut log = Log::new();
        log.push(
            Actor::Opponent,
            EventKind::Commit {
                id: id("a"),
                text: "x".into(),
            },
        );
        assert!(matches!(
            replay(&log.0).unwrap_err().error,
            DialecticError::WrongActor {
                expected: Actor::Respondent,
                ..
            }
        ));
        let mut log = Log::new();
        log.commit("a").propose("t", &["a"], &[]);
        log.push(
            Actor::Opponent,
            EventKind::AcceptTension {
                tension: "t".into(),
                resolution: Resolution::retract([id("a")]),
            },
        );
        assert!(matches!(
            replay(&log.0).unwrap_err().error,
            DialecticError::WrongActor { .. }
        ));

        let mut log = Log::new();
        log.commit("a");
        log.0[0].seq = 2;
        assert_eq!(
            replay(&log.0).unwrap_err().error,
            DialecticError::SequenceGap {
                expected: 1,
                found: 2
            }
        );
    }

    #[test]
    fn self_tension_shape() {
        let mut log = Log::new();
        log.commit("a").propose("t", &["a"], &["a"]);
        let s = replay(&log.0).unwrap();
        assert_eq!(s.open_tensions().count(), 1);
    }

    #[test]
    fn failed_event_leaves_state_unchanged() {
        let mut log = Log::new();
        log.commit("a").propose("t", &["a"], &[]);
        let mut s = replay(&log.0).unwrap();
        let before = s.clone();
        let bad = DialecticEvent {
            seq: 3,
            timestamp: None,
            actor: Actor::Respondent,
            kind: EventKind::AcceptTension {
                tension: "t".into(),
                resolution: refine_to("a", &["a"], &["a"]),
            },
        };
        assert!(s.apply(&bad).is_err());
        assert_eq!(s, before);
    }

    #[test]
    fn challenges() {
        let mut log = Log::new();
        log.commit("a").push(
            Actor::Opponent,
            EventKind::RaiseChallenge {
                challenge: "c".into(),
                question: "why?".into(),
                targets: ids(&["a"]),
            },
        );
        log.push(
            Actor::Respondent,
            EventKind::ResolveChallenge {
                challenge: "c".into(),
                note: None,
            },
        );
        let s = replay(&log.0).unwrap();
        assert_eq!(s.open_challenges().count(), 0);
        log.push(
            Actor::Respondent,
            EventKind::ResolveChallenge {
                challenge: "c".into(),
                note: None,
            },
        );
        assert_eq!(
            replay(&log.0).unwrap_err().error,
            DialecticError::DoubleResolution("c".into())
        );
    }
}
