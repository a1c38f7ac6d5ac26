//! The opponent: a defeasible derivability oracle that proposes tensions
//! and challenges. Its output is advisory. Everything it says passes
//! through [`validate_proposal`] before it reaches the log, and nothing it
//! says can enter I without a respondent acceptance.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::dialectic::{
    Actor, DialecticError, DialecticEvent, DialecticalState, EventKind, NewProposition,
    PropositionRecord, PropositionStatus, Session, Stance, TensionStatus,
};
use crate::formula::AtomId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle unavailable: {0}")]
    Unavailable(String),
    #[error("malformed oracle response: {0}")]
    MalformedResponse(String),
    #[error("empty source document")]
    EmptyDocument,
}

impl OracleError {
    pub fn code(&self) -> &'static str {
        match self {
            OracleError::Unavailable(_) => "OracleUnavailable",
            OracleError::MalformedResponse(_) => "MalformedResponse",
            OracleError::EmptyDocument => "EmptyDocument",
        }
    }
}

/// Ids are plain strings here because the oracle is untrusted; they are
/// checked in [`validate_proposal`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProposedTension {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default)]
    pub lhs: Vec<String>,
    #[serde(default)]
    pub rhs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rationale: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProposedChallenge {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub question: String,
    #[serde(default)]
    pub targets: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProposedProposition {
    pub id: String,
    pub text: String,
    pub suggested_side: Stance,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OpponentProposal {
    #[serde(default)]
    pub tensions: Vec<ProposedTension>,
    #[serde(default)]
    pub challenges: Vec<ProposedChallenge>,
    #[serde(default)]
    pub new_propositions: Vec<ProposedProposition>,
}

impl OpponentProposal {
    pub fn is_empty(&self) -> bool {
        self.tensions.is_empty() && self.challenges.is_empty() && self.new_propositions.is_empty()
    }
}

pub trait Oracle: Send + Sync {
    fn propose(
        &self,
        state: &DialecticalState,
        transcript: &[DialecticEvent],
    ) -> Result<OpponentProposal, OracleError>;

    /// Candidate propositions for the respondent to confirm. Nothing is
    /// committed by this call.
    fn extract_commitments(&self, source: &str) -> Result<Vec<PropositionRecord>, OracleError>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptedCommitment {
    pub id: AtomId,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptStep {
    /// Sequence number the next event will receive when this step fires.
    pub at: u64,
    pub proposal: OpponentProposal,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Script {
    #[serde(default)]
    pub commitments: Vec<ScriptedCommitment>,
    #[serde(default)]
    pub steps: Vec<ScriptStep>,
}

/// Deterministic oracle driven by a script keyed on the log position.
#[derive(Debug, Clone, Default)]
pub struct ScriptedOracle {
    script: Script,
    by_seq: BTreeMap<u64, usize>,
}

impl ScriptedOracle {
    pub fn new(script: Script) -> Self {
        let by_seq = script
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| (s.at, i))
            .collect();
        ScriptedOracle { script, by_seq }
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, serde_json::Error> {
        Ok(Self::new(serde_json::from_slice(bytes)?))
    }

    pub fn script(&self) -> &Script {
        &self.script
    }
}

impl Oracle for ScriptedOracle {
    fn propose(
        &self,
        state: &DialecticalState,
        _transcript: &[DialecticEvent],
    ) -> Result<OpponentProposal, OracleError> {
        Ok(self
            .by_seq
            .get(&state.next_seq())
            .map(|&i| self.script.steps[i].proposal.clone())
            .unwrap_or_default())
    }

    fn extract_commitments(&self, source: &str) -> Result<Vec<PropositionRecord>, OracleError> {
        if source.trim().is_empty() {
            return Err(OracleError::EmptyDocument);
        }
        Ok(self
            .script
            .commitments
            .iter()
            .map(|c| PropositionRecord {
                id: c.id.clone(),
                text: c.text.clone(),
                status: PropositionStatus::Active,
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct OracleConfig {
    pub endpoint: String,
    /// Name of the environment variable holding the credential. The
    /// credential itself is read at call time and never stored here.
    pub credential_env: Option<String>,
    pub timeout_secs: u64,
    pub retries: u32,
    pub model: String,
    pub transcript_window: usize,
    pub auth_header: String,
    /// `{key}` is replaced by the credential.
    pub auth_template: String,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            endpoint: String::new(),
            credential_env: None,
            timeout_secs: 60,
            retries: 2,
            model: String::new(),
            transcript_window: 20,
            auth_header: "Authorization".into(),
            auth_template: "Bearer {key}".into(),
        }
    }
}

const PREAMBLE: &str = "You are the opponent in a Socratic dialogue. The respondent holds the \
bilateral position below (commitments and denials, by id). Propose tensions: subsets lhs of the \
commitments and rhs of the denials that cannot coherently be held together. You may also raise \
challenges (questions about specific ids) and suggest new propositions. Answer with one JSON \
object with keys tensions [{lhs, rhs, rationale}], challenges [{question, targets}] and \
newPropositions [{id, text, suggestedSide}], and nothing else.";

const EXTRACT_PREAMBLE: &str = "Extract the atomic claims of the document below as candidate \
commitments. Answer with one JSON object {\"propositions\": [{\"id\", \"text\"}]} and nothing else. \
Ids must match [A-Za-z_][A-Za-z0-9_]*.";

/// Provider-agnostic JSON-over-HTTP oracle.
///
/// The blocking client is built per call, so the oracle can be created and
/// dropped on an async runtime and only used from blocking threads.
#[derive(Debug, Clone)]
pub struct HttpOracle {
    config: OracleConfig,
}

enum Attempt {
    Transport(String),
    Body(Vec<u8>),
}

impl HttpOracle {
    pub fn new(config: OracleConfig) -> Result<Self, OracleError> {
        if config.endpoint.is_empty() {
            return Err(OracleError::Unavailable("no endpoint configured".into()));
        }
        Ok(HttpOracle { config })
    }

    fn client(&self) -> Result<reqwest::blocking::Client, OracleError> {
        reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(self.config.timeout_secs.max(1)))
            .build()
            .map_err(|e| OracleError::Unavailable(e.without_url().to_string()))
    }

    pub fn config(&self) -> &OracleConfig {
        &self.config
    }

    fn post_once(&self, client: &reqwest::blocking::Client, body: &Value) -> Attempt {
        let mut req = client.post(&self.config.endpoint).json(body);
        if let Some(var) = &self.config.credential_env {
            if let Ok(key) = std::env::var(var) {
                req = req.header(
                    self.config.auth_header.as_str(),
                    self.config.auth_template.replace("{key}", &key),
                );
            }
        }
        match req.send() {
            Err(e) => Attempt::Transport(e.without_url().to_string()),
            Ok(resp) if resp.status().is_server_error() => {
                Attempt::Transport(format!("server returned {}", resp.status()))
            }
            Ok(resp) if !resp.status().is_success() => {
                Attempt::Body(format!("status {}", resp.status()).into_bytes())
            }
            Ok(mut resp) => {
                let mut buf = Vec::new();
                match resp.read_to_end(&mut buf) {
                    Ok(_) => Attempt::Body(buf),
                    Err(e) => Attempt::Transport(e.to_string()),
                }
            }
        }
    }

    /// Transport failures are retried `retries` times; a response that does
    /// not parse gets one reformat retry.
    fn call<T: for<'de> Deserialize<'de>>(&self, mut body: Value) -> Result<T, OracleError> {
        let client = self.client()?;
        let mut reformat_used = false;
        let mut transport_failures = 0;
        loop {
            match self.post_once(&client, &body) {
                Attempt::Transport(msg) => {
                    transport_failures += 1;
                    if transport_failures > self.config.retries {
                        return Err(OracleError::Unavailable(msg));
                    }
                }
                Attempt::Body(bytes) => match serde_json::from_slice::<T>(&bytes) {
                    Ok(v) => return Ok(v),
                    Err(e) if !reformat_used => {
                        reformat_used = true;
                        body["reformat"] = json!(format!(
                            "Your previous answer was not a valid JSON object of the requested shape ({e}). \
                             Answer again with the JSON object only."
                        ));
                    }
                    Err(e) => return Err(OracleError::MalformedResponse(e.to_string())),
                },
            }
        }
    }

    fn request_body(&self, state: &DialecticalState, transcript: &[DialecticEvent]) -> Value {
        let side = |ids: &BTreeSet<AtomId>| -> Vec<Value> {
            ids.iter()
                .map(|id| json!({"id": id, "text": state.proposition(id).map(|p| p.text.as_str())}))
                .collect()
        };
        let start = transcript
            .len()
            .saturating_sub(self.config.transcript_window);
        json!({
            "model": self.config.model,
            "instruction": PREAMBLE,
            "position": {
                "commitments": side(&state.position().commitments),
                "denials": side(&state.position().denials),
            },
            "openTensions": state.open_tensions().collect::<Vec<_>>(),
            "transcript": &transcript[start..],
        })
    }
}

#[derive(Deserialize)]
struct Extracted {
    propositions: Vec<ScriptedCommitment>,
}

impl Oracle for HttpOracle {
    fn propose(
        &self,
        state: &DialecticalState,
        transcript: &[DialecticEvent],
    ) -> Result<OpponentProposal, OracleError> {
        self.call(self.request_body(state, transcript))
    }

    fn extract_commitments(&self, source: &str) -> Result<Vec<PropositionRecord>, OracleError> {
        if source.trim().is_empty() {
            return Err(OracleError::EmptyDocument);
        }
        let out: Extracted = self.call(json!({
            "model": self.config.model,
            "instruction": EXTRACT_PREAMBLE,
            "document": source,
        }))?;
        Ok(out
            .propositions
            .into_iter()
            .map(|c| PropositionRecord {
                id: c.id,
                text: c.text,
                status: PropositionStatus::Active,
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidTension {
    pub id: Option<String>,
    pub lhs: BTreeSet<AtomId>,
    pub rhs: BTreeSet<AtomId>,
    pub rationale: Option<String>,
    /// Suggested propositions this tension mentions. It can only be put on
    /// the log once the respondent has taken them up.
    pub needs: BTreeSet<AtomId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidChallenge {
    pub id: Option<String>,
    pub question: String,
    pub targets: BTreeSet<AtomId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discarded {
    pub item: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidatedProposal {
    pub tensions: Vec<ValidTension>,
    pub challenges: Vec<ValidChallenge>,
    pub new_propositions: Vec<NewProposition>,
    pub discarded: Vec<Discarded>,
}

fn parse_ids(raw: &[String]) -> Result<BTreeSet<AtomId>, String> {
    raw.iter()
        .map(|s| AtomId::new(s.as_str()).map_err(|_| format!("`{s}` is not an atom id")))
        .collect()
}

/// Filters a proposal down to what the protocol would accept now, or after
/// the respondent takes up the suggested propositions. Whatever is dropped
/// is listed in `discarded` with a reason.
pub fn validate_proposal(
    state: &DialecticalState,
    proposal: &OpponentProposal,
) -> ValidatedProposal {
    let mut out = ValidatedProposal::default();
    let mut hypothetical = state.position().clone();
    let mut fresh: BTreeSet<AtomId> = BTreeSet::new();

    for p in &proposal.new_propositions {
        let item = format!("newProposition {}", p.id);
        let reason = match AtomId::new(p.id.as_str()) {
            Err(_) => Some("not an atom id".to_string()),
            Ok(_) if p.text.trim().is_empty() => Some("empty text".into()),
            Ok(id) if state.proposition(&id).is_some() || fresh.contains(&id) => {
                Some("id already in use".into())
            }
            Ok(id) => {
                match p.suggested_side {
                    Stance::Commitment => hypothetical.commitments.insert(id.clone()),
                    Stance::Denial => hypothetical.denials.insert(id.clone()),
                };
                fresh.insert(id.clone());
                out.new_propositions.push(NewProposition {
                    id,
                    text: p.text.clone(),
                    side: p.suggested_side,
                });
                None
            }
        };
        if let Some(reason) = reason {
            out.discarded.push(Discarded { item, reason });
        }
    }

    let mut seen_tension_ids = BTreeSet::new();
    for (i, t) in proposal.tensions.iter().enumerate() {
        let item = format!(
            "tension {}",
            t.id.clone().unwrap_or_else(|| format!("#{i}"))
        );
        let checked = (|| {
            let lhs = parse_ids(&t.lhs)?;
            let rhs = parse_ids(&t.rhs)?;
            if let Some(a) = lhs
                .iter()
                .chain(&rhs)
                .find(|a| !fresh.contains(*a) && !state.is_active(a))
            {
                return Err(format!("`{a}` is not an active proposition"));
            }
            if !hypothetical.admits_tension(&lhs, &rhs) {
                return Err("lhs must lie in the commitments and rhs in the denials".into());
            }
            if let Some(id) = &t.id {
                if id.trim().is_empty()
                    || state.tension(id).is_some()
                    || !seen_tension_ids.insert(id.clone())
                {
                    return Err("tension id already in use".into());
                }
            }
            let needs = lhs
                .iter()
                .chain(&rhs)
                .filter(|a| fresh.contains(*a))
                .cloned()
                .collect();
            Ok(ValidTension {
                id: t.id.clone(),
                lhs,
                rhs,
                rationale: t.rationale.clone(),
                needs,
            })
        })();
        match checked {
            Ok(v) => out.tensions.push(v),
            Err(reason) => out.discarded.push(Discarded { item, reason }),
        }
    }

    let mut seen_challenge_ids = BTreeSet::new();
    for (i, c) in proposal.challenges.iter().enumerate() {
        let item = format!(
            "challenge {}",
            c.id.clone().unwrap_or_else(|| format!("#{i}"))
        );
        let checked = (|| {
            if c.question.trim().is_empty() {
                return Err("empty question".to_string());
            }
            let targets = parse_ids(&c.targets)?;
            if let Some(a) = targets.iter().find(|a| !state.is_active(a)) {
                return Err(format!("`{a}` is not an active proposition"));
            }
            if let Some(id) = &c.id {
                if id.trim().is_empty()
                    || state.challenges().any(|x| &x.id == id)
                    || !seen_challenge_ids.insert(id.clone())
                {
                    return Err("challenge id already in use".into());
                }
            }
            Ok(ValidChallenge {
                id: c.id.clone(),
                question: c.question.clone(),
                targets,
            })
        })();
        match checked {
            Ok(v) => out.challenges.push(v),
            Err(reason) => out.discarded.push(Discarded { item, reason }),
        }
    }
    out
}

/// What [`apply_proposal`] put on the log.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AppliedProposal {
    pub events: Vec<u64>,
    /// Tensions waiting on suggested propositions the respondent has not
    /// taken up yet.
    pub deferred: Vec<ValidTension>,
}

fn unused_id(prefix: &str, seq: u64, taken: impl Fn(&str) -> bool) -> String {
    let base = format!("{prefix}-{seq}");
    if !taken(&base) {
        return base;
    }
    (1..)
        .map(|n| format!("{base}-{n}"))
        .find(|id| !taken(id))
        .unwrap()
}

/// Puts the opponent's moves on the log: challenges first, then every
/// tension whose atoms are all active. Suggested propositions are never
/// committed here.
pub fn apply_proposal(
    session: &mut Session,
    proposal: &ValidatedProposal,
) -> Result<AppliedProposal, DialecticError> {
    let mut applied = AppliedProposal::default();
    for c in &proposal.challenges {
        let seq = session.next_seq();
        let id = c.id.clone().unwrap_or_else(|| {
            unused_id("challenge", seq, |id| {
                session.state().challenges().any(|x| x.id == id)
            })
        });
        session.append(
            Actor::Opponent,
            EventKind::RaiseChallenge {
                challenge: id,
                question: c.question.clone(),
                targets: c.targets.clone(),
            },
        )?;
        applied.events.push(seq);
    }
    for t in &proposal.tensions {
        let ready = t
            .lhs
            .iter()
            .chain(&t.rhs)
            .all(|a| session.state().is_active(a));
        if !ready {
            applied.deferred.push(t.clone());
            continue;
        }
        let seq = session.next_seq();
        let id = t.id.clone().unwrap_or_else(|| {
            unused_id("tension", seq, |id| session.state().tension(id).is_some())
        });
        session.append(
            Actor::Opponent,
            EventKind::ProposeTension {
                tension: id,
                lhs: t.lhs.clone(),
                rhs: t.rhs.clone(),
                rationale: t.rationale.clone(),
            },
        )?;
        applied.events.push(seq);
    }
    Ok(applied)
}

/// Every implication in I traces to an accepted tension whose acceptance
/// was logged by the respondent.
pub fn check_human_authority(
    events: &[DialecticEvent],
    state: &DialecticalState,
) -> Result<(), String> {
    for (imp, rec) in state.implications() {
        let accepted = events.iter().any(|e| {
            e.seq == rec.accepted_at
                && e.actor == Actor::Respondent
                && matches!(&e.kind, EventKind::AcceptTension { tension, .. } if *tension == rec.tension)
        });
        if !accepted {
            return Err(format!("`{imp}` has no respondent acceptance"));
        }
        if state.tension(&rec.tension).map(|t| t.status) != Some(TensionStatus::Accepted) {
            return Err(format!(
                "`{imp}` cites tension `{}` which is not accepted",
                rec.tension
            ));
        }
    }
    Ok(())
}
