//! Random protocol moves and oracle proposals for fuzzing the dialectic.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use elenchus_core::base::AtomicImplication;
use elenchus_core::dialectic::{
    extract_base, replay, Actor, EventKind, NewProposition, PropositionStatus, Resolution, Session,
    Stance,
};
use elenchus_core::formula::AtomId;
use elenchus_core::opponent::{
    apply_proposal, check_human_authority, validate_proposal, OpponentProposal, ProposedChallenge,
    ProposedProposition, ProposedTension,
};

const POOL: [&str; 8] = ["p0", "p1", "p2", "p3", "p4", "p5", "p6", "p7"];

fn id(s: &str) -> AtomId {
    AtomId::new(s).unwrap()
}

fn pick_set(rng: &mut ChaCha8Rng, from: &[AtomId], max: usize) -> BTreeSet<AtomId> {
    if from.is_empty() {
        return BTreeSet::new();
    }
    (0..rng.random_range(0..=max))
        .map(|_| from.choose(rng).unwrap().clone())
        .collect()
}

fn mostly<'a>(rng: &mut ChaCha8Rng, usual: &'a [AtomId], other: &'a [AtomId]) -> &'a [AtomId] {
    if rng.random_bool(0.9) {
        usual
    } else {
        other
    }
}

fn raw_ids(rng: &mut ChaCha8Rng) -> Vec<String> {
    (0..rng.random_range(0..3))
        .map(|_| match rng.random_range(0..10) {
            0 => "not an id".to_string(),
            1 => String::new(),
            2 => format!("x{}", rng.random_range(0..3)),
            _ => POOL.choose(rng).unwrap().to_string(),
        })
        .collect()
}

pub fn random_proposal(rng: &mut ChaCha8Rng) -> OpponentProposal {
    OpponentProposal {
        tensions: (0..rng.random_range(0..3))
            .map(|_| ProposedTension {
                id: rng
                    .random_bool(0.3)
                    .then(|| format!("t{}", rng.random_range(0..4))),
                lhs: raw_ids(rng),
                rhs: raw_ids(rng),
                rationale: Some("r".into()),
            })
            .collect(),
        challenges: (0..rng.random_range(0..2))
            .map(|_| ProposedChallenge {
                id: rng
                    .random_bool(0.3)
                    .then(|| format!("c{}", rng.random_range(0..3))),
                question: if rng.random_bool(0.9) {
                    "why?".into()
                } else {
                    " ".into()
                },
                targets: raw_ids(rng),
            })
            .collect(),
        new_propositions: (0..rng.random_range(0..2))
            .map(|_| ProposedProposition {
                id: format!("x{}", rng.random_range(0..3)),
                text: "suggested".into(),
                suggested_side: if rng.random_bool(0.5) {
                    Stance::Commitment
                } else {
                    Stance::Denial
                },
            })
            .collect(),
    }
}

pub fn random_move(rng: &mut ChaCha8Rng, session: &Session) -> (Actor, EventKind) {
    let state = session.state();
    let pool: Vec<AtomId> = POOL.iter().map(|s| id(s)).collect();
    let active: Vec<AtomId> = state
        .propositions()
        .values()
        .filter(|p| p.status == PropositionStatus::Active)
        .map(|p| p.id.clone())
        .collect();
    let tensions: Vec<String> = state.tensions().map(|t| t.id.clone()).collect();
    let open: Vec<String> = state.open_tensions().map(|t| t.id.clone()).collect();
    let challenges: Vec<String> = state.challenges().map(|c| c.id.clone()).collect();
    let commits: Vec<AtomId> = state.position().commitments.iter().cloned().collect();
    let denials: Vec<AtomId> = state.position().denials.iter().cloned().collect();
    let some_tension = |rng: &mut ChaCha8Rng| {
        let from = if rng.random_bool(0.9) && !open.is_empty() {
            &open
        } else {
            &tensions
        };
        from.choose(rng).cloned().unwrap_or_else(|| "t-none".into())
    };

    let (actor, kind) = match rng.random_range(0..15) {
        0 => (
            Actor::Respondent,
            EventKind::Commit {
                id: pool.choose(rng).unwrap().clone(),
                text: "c".into(),
            },
        ),
        1 => (
            Actor::Respondent,
            EventKind::Deny {
                id: pool.choose(rng).unwrap().clone(),
                text: "d".into(),
            },
        ),
        2 => (
            Actor::Respondent,
            EventKind::Retract {
                id: active
                    .choose(rng)
                    .cloned()
                    .unwrap_or_else(|| pool[0].clone()),
            },
        ),
        3 | 12..=14 => (
            Actor::Opponent,
            EventKind::ProposeTension {
                tension: format!("t{}", rng.random_range(0..6)),
                lhs: {
                    let from = mostly(rng, &commits, &pool);
                    pick_set(rng, from, 2)
                },
                rhs: {
                    let from = mostly(rng, &denials, &pool);
                    pick_set(rng, from, 2)
                },
                rationale: None,
            },
        ),
        4 | 9..=11 => {
            let tension = some_tension(rng);
            let t = state.tension(&tension);
            let members: Vec<AtomId> = t
                .map(|t| t.lhs.iter().chain(&t.rhs).cloned().collect())
                .unwrap_or_default();
            let resolution = if rng.random_bool(0.5) {
                {
                    let from = mostly(rng, &members, &pool);
                    Resolution::retract(pick_set(rng, from, 2))
                }
            } else {
                let fresh: Vec<AtomId> = (0..12)
                    .map(|i| id(&format!("q{i}")))
                    .filter(|a| state.proposition(a).is_none())
                    .collect();
                let new = mostly(rng, &fresh, &pool)
                    .choose(rng)
                    .unwrap_or(&pool[0])
                    .clone();
                let mut lhs = pick_set(rng, &active, 2);
                if rng.random_bool(0.8) {
                    lhs.extend(members.first().cloned());
                }
                let endorsed = rng
                    .random_bool(0.8)
                    .then(|| AtomicImplication::new(lhs, [new.clone()]));
                Resolution::refine(
                    NewProposition {
                        id: new,
                        text: "refined".into(),
                        side: if rng.random_bool(0.8) {
                            Stance::Commitment
                        } else {
                            Stance::Denial
                        },
                    },
                    endorsed,
                )
            };
            (
                Actor::Respondent,
                EventKind::AcceptTension {
                    tension,
                    resolution,
                },
            )
        }
        5 => (
            Actor::Respondent,
            EventKind::ContestTension {
                tension: some_tension(rng),
            },
        ),
        6 => (
            Actor::Opponent,
            EventKind::RaiseChallenge {
                challenge: format!("c{}", rng.random_range(0..4)),
                question: "why?".into(),
                targets: pick_set(rng, &active, 2),
            },
        ),
        7 => (
            Actor::Respondent,
            EventKind::ResolveChallenge {
                challenge: challenges
                    .choose(rng)
                    .cloned()
                    .unwrap_or_else(|| "c-none".into()),
                note: None,
            },
        ),
        _ => (
            Actor::Respondent,
            EventKind::Retract {
                id: pool.choose(rng).unwrap().clone(),
            },
        ),
    };
    // Occasionally attribute the move to the wrong party.
    let actor = if rng.random_bool(0.03) {
        match actor {
            Actor::Respondent => Actor::Opponent,
            Actor::Opponent => Actor::Respondent,
        }
    } else {
        actor
    };
    (actor, kind)
}

pub fn assert_invariants(session: &Session) {
    let state = session.state();
    state.check_invariants().unwrap();
    check_human_authority(session.events(), state).unwrap();
    let pos = state.position();
    assert!(pos.commitments.is_disjoint(&pos.denials));

    let retracted: Vec<&AtomId> = state
        .propositions()
        .values()
        .filter(|p| p.status == PropositionStatus::Retracted)
        .map(|p| &p.id)
        .collect();
    for imp in state.implications().keys() {
        assert!(
            retracted.iter().all(|a| !imp.mentions(a)),
            "residue in {imp}"
        );
    }

    // Each member of I cites its own respondent acceptance.
    let mut cited = BTreeSet::new();
    for rec in state.implications().values() {
        let e = &session.events()[rec.accepted_at as usize - 1];
        assert_eq!(e.actor, Actor::Respondent);
        assert!(
            matches!(&e.kind, EventKind::AcceptTension { tension, .. } if *tension == rec.tension)
        );
        assert!(
            cited.insert(rec.accepted_at),
            "two implications from one acceptance"
        );
    }

    let base = extract_base(state);
    for (imp, rec) in state.implications() {
        assert_eq!(base.provenance(imp), Some(rec.tension.as_str()));
    }
    assert_eq!(base.len(), state.implications().len());
}

#[derive(Debug, Default, Clone, Copy)]
pub struct FuzzSummary {
    pub sessions: usize,
    pub applied: usize,
    pub rejected: usize,
    pub insertions: usize,
}

/// Runs `sessions` random sessions, checking every invariant after every
/// step. Panics on the first violation.
pub fn fuzz_sessions(seed: u64, sessions: usize) -> FuzzSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut applied = 0usize;
    let mut rejected = 0usize;
    let mut inserted = 0usize;
    for _ in 0..sessions {
        let mut session = Session::new("fuzz");
        for _ in 0..rng.random_range(5..40) {
            if rng.random_bool(0.15) {
                let validated = validate_proposal(session.state(), &random_proposal(&mut rng));
                apply_proposal(&mut session, &validated).expect("validated proposals always apply");
            } else {
                let before = session.state().clone();
                let (actor, kind) = random_move(&mut rng, &session);
                match session.append(actor, kind) {
                    Ok(_) => {
                        applied += 1;
                        if session.state().implications().len() > before.implications().len() {
                            inserted += 1;
                        }
                    }
                    Err(_) => {
                        rejected += 1;
                        assert_eq!(session.state(), &before);
                    }
                }
            }
            assert_invariants(&session);
        }
        assert_eq!(&replay(session.events()).unwrap(), session.state());
    }
    FuzzSummary {
        sessions,
        applied,
        rejected,
        insertions: inserted,
    }
}
