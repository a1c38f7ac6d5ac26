//! The PROV-O case study, embedded so it can be checked without any files
//! on disk.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::base::{load_base, save_base, MaterialBase};
use crate::dialectic::{extract_base, replay, SessionDocument};
use crate::formula::{parse_sequent, AtomId};
use crate::opponent::ScriptedOracle;
use crate::par::{self, Execution};
use crate::prover::{containment_audit, independence_matrix, ProverConfig};

pub const PROVO_BASE: &str = include_str!("../fixtures/provo_base.json");
pub const PROVO_SESSION: &str = include_str!("../fixtures/provo_session.json");
pub const PROVO_SCRIPT: &str = include_str!("../fixtures/provo_oracle_script.json");
pub const PROVO_GROUPS: &str = include_str!("../fixtures/provo_groups.json");
pub const PROVO_PROSE: &str = include_str!("../fixtures/provo_prose.txt");

pub fn provo_base() -> MaterialBase {
    load_base(PROVO_BASE.as_bytes()).expect("embedded base is valid")
}

pub fn provo_session() -> SessionDocument {
    SessionDocument::from_json(PROVO_SESSION.as_bytes()).expect("embedded session is valid")
}

pub fn provo_oracle() -> ScriptedOracle {
    ScriptedOracle::from_json(PROVO_SCRIPT.as_bytes()).expect("embedded script is valid")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub name: String,
    pub atoms: BTreeSet<AtomId>,
}

pub fn load_groups(bytes: &[u8]) -> Result<Vec<(String, BTreeSet<AtomId>)>, serde_json::Error> {
    let groups: Vec<Group> = serde_json::from_slice(bytes)?;
    Ok(groups.into_iter().map(|g| (g.name, g.atoms)).collect())
}

/// The seven inference chains of the final base.
pub fn provo_groups() -> Vec<(String, BTreeSet<AtomId>)> {
    load_groups(PROVO_GROUPS.as_bytes()).expect("embedded groups are valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Check {
    pub label: &'static str,
    pub sequent: &'static str,
    pub expected: bool,
}

const fn check(label: &'static str, sequent: &'static str, expected: bool) -> Check {
    Check {
        label,
        sequent,
        expected,
    }
}

/// Structural-property queries.
pub const STRUCTURAL: &[Check] = &[
    check("base", "p2 |- p18", true),
    check("base", "p3 |- p27", true),
    check("base", "p4 |- p29", true),
    check("base", "p6 |- p30", true),
    check("base", "p7 |- p28", true),
    check("base", "p9 |- p25", true),
    check("base", "p9 |- p26", true),
    check("base", "p10 |- p24", true),
    check("base", "p18 |- p23", true),
    check("nontransitivity", "p2 |- p23", false),
    check("nonmonotonicity", "p2, p23 |- p18", false),
    check("nonmonotonicity", "p9, p26 |- p25", false),
    check("explicitation", "|- p2 -> p18", true),
    check("explicitation", "|- p3 -> p27", true),
    check("explicitation", "|- p4 -> p29", true),
    check("explicitation", "|- p6 -> p30", true),
    check("explicitation", "|- p7 -> p28", true),
    check("explicitation", "|- p9 -> p25", true),
    check("explicitation", "|- p9 -> p26", true),
    check("explicitation", "|- p10 -> p24", true),
    check("explicitation", "|- p18 -> p23", true),
    check("explicitation", "|- p2 -> p23", false),
    check("supraclassicality", "|- p2 | ~p2", true),
    check("supraclassicality", "p2 & ~p2 |-", true),
];

/// Design-rationale queries.
pub const RATIONALE: &[Check] = &[
    check("EZ3", "|- (p2 -> p18) & (p18 -> p23) -> (p2 -> p23)", true),
    check("EZ3", "p2 |- p23", false),
    check("EZ3", "|- p2 -> p23", false),
    check("VI5", "p7 |- p28", true),
    check("VI5", "p28 |- p7", false),
    check("VI1", "p2 |- p27", false),
    check("VI1", "p2 |- p29", false),
    check("VI1", "p3 |- p18", false),
    check("VI1", "p3 |- p29", false),
    check("VI1", "p4 |- p18", false),
    check("VI1", "p4 |- p27", false),
    check("VI1", "p7 |- p30", false),
    check("VI1", "p6 |- p28", false),
    check("EZ1", "p7 |- p28", true),
    check("EZ1", "p7, p24 |- p28", false),
    check("XG11", "p9 |- p25", true),
    check("XG11", "p9 |- p26", true),
    check("XG11", "p9, p25 |- p26", false),
    check("EV1", "p3 |- p27", true),
    check("EV1", "p3 |- p18", false),
    check("EV1", "p3 |- p25", false),
    check("GE3", "p7 |- p18", false),
    check("GE3", "p7 |- p23", false),
    check("GE3", "p18 |- p23", true),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub group: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Runs a query table against `base`.
pub fn run_checks(group: &str, base: &MaterialBase, checks: &[Check]) -> Vec<Outcome> {
    let queries: Vec<_> = checks
        .iter()
        .map(|c| parse_sequent(c.sequent).expect("embedded query parses"))
        .collect();
    par::map_with_prover(
        base,
        ProverConfig::default(),
        Execution::default(),
        &queries,
        |p, q| p.derivable(q),
    )
    .into_iter()
    .zip(checks)
    .map(|(r, c)| {
        let (passed, got) = match r {
            Ok(r) => (r.derivable == c.expected, r.derivable.to_string()),
            Err(e) => (false, e.to_string()),
        };
        Outcome {
            group: group.to_string(),
            name: format!("{} {}", c.label, c.sequent),
            passed,
            detail: format!("expected {}, got {got}", c.expected),
        }
    })
    .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub outcomes: Vec<Outcome>,
    #[serde(with = "millis")]
    pub elapsed: Duration,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }
}

mod millis {
    use std::time::Duration;

    pub fn serialize<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64() * 1000.0)
    }
}

/// Every check of the case study: both query tables, chain independence,
/// the containment audit and the session replay.
pub fn verify_provo() -> Verification {
    let start = Instant::now();
    let base = provo_base();
    let mut outcomes = run_checks("structural", &base, STRUCTURAL);
    outcomes.extend(run_checks("rationale", &base, RATIONALE));

    let report = independence_matrix(&base, &provo_groups()).expect("embedded groups fit the base");
    outcomes.push(Outcome {
        group: "independence".into(),
        name: "cross-chain pairs".into(),
        passed: report.pairs == 34 && report.derivable == 0,
        detail: format!("{} pairs, {} derivable", report.pairs, report.derivable),
    });

    let audit = containment_audit(&base);
    let holding = audit.values().filter(|h| **h).count();
    outcomes.push(Outcome {
        group: "containment".into(),
        name: "p |- p for every atom".into(),
        passed: holding == audit.len() && audit.len() == 19,
        detail: format!("{holding}/{} atoms", audit.len()),
    });

    let (passed, detail) = match replay(&provo_session().events) {
        Err(e) => (false, e.to_string()),
        Ok(state) => {
            let pos = state.position();
            let extracted = save_base(&extract_base(&state));
            let same = extracted == PROVO_BASE.as_bytes();
            let open = state.open_tensions().count();
            (
                pos.commitments.len() == 19
                    && pos.denials.is_empty()
                    && open == 0
                    && state.implications().len() == 9
                    && same,
                format!(
                    "{} commitments, {} denials, {open} open tensions, {} implications, base {}",
                    pos.commitments.len(),
                    pos.denials.len(),
                    state.implications().len(),
                    if same { "identical" } else { "differs" }
                ),
            )
        }
    };
    outcomes.push(Outcome {
        group: "replay".into(),
        name: "session log".into(),
        passed,
        detail,
    });

    Verification {
        outcomes,
        elapsed: start.elapsed(),
    }
}
