use std::fmt::{self, Write as _};
use std::sync::Arc;

use serde::{Serialize, Serializer};
use serde_json::{json, Value};
use thiserror::Error;

use super::decompose;
use crate::base::{AxiomKind, ContainmentMode, MaterialBase};
use crate::formula::{Formula, Sequent, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    AxiomContainment,
    AxiomBase,
    LAnd,
    RAnd,
    LOr,
    ROr,
    LImp,
    RImp,
    LNeg,
    RNeg,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::AxiomContainment => "AxiomContainment",
            Rule::AxiomBase => "AxiomBase",
            Rule::LAnd => "L∧",
            Rule::RAnd => "R∧",
            Rule::LOr => "L∨",
            Rule::ROr => "R∨",
            Rule::LImp => "L→",
            Rule::RImp => "R→",
            Rule::LNeg => "L¬",
            Rule::RNeg => "R¬",
        }
    }

    pub fn is_axiom(self) -> bool {
        matches!(self, Rule::AxiomContainment | Rule::AxiomBase)
    }

    fn side(self) -> Option<Side> {
        match self {
            Rule::LAnd | Rule::LOr | Rule::LImp | Rule::LNeg => Some(Side::Antecedent),
            Rule::RAnd | Rule::ROr | Rule::RImp | Rule::RNeg => Some(Side::Succedent),
            _ => None,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Rule {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProofNode {
    pub conclusion: Sequent,
    pub rule: Rule,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub principal: Option<Formula>,
    pub premises: Vec<Arc<ProofNode>>,
}

impl ProofNode {
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(|p| p.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.premises.iter().map(|p| p.depth()).max().unwrap_or(0)
    }

    pub fn leaves(&self) -> Vec<&ProofNode> {
        if self.premises.is_empty() {
            return vec![self];
        }
        self.premises.iter().flat_map(|p| p.leaves()).collect()
    }

    /// `{"sequent": "...", "rule": "...", "premises": [...]}`
    pub fn to_json(&self) -> Value {
        json!({
            "sequent": self.conclusion.canonical(),
            "rule": self.rule.name(),
            "premises": self.premises.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
        })
    }

    /// One line per node, premises indented two spaces under their
    /// conclusion.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(&mut out, 0);
        out
    }

    fn write_text(&self, out: &mut String, depth: usize) {
        let _ = write!(
            out,
            "{:indent$}{}  [{}",
            "",
            self.conclusion,
            self.rule,
            indent = depth * 2
        );
        if let Some(p) = &self.principal {
            let _ = write!(out, " on {p}");
        }
        out.push_str("]\n");
        for p in &self.premises {
            p.write_text(out, depth + 1);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("`{0}` is not an axiom")]
    NotAnAxiom(Sequent),
    #[error("axiom `{0}` labelled {1} but closes differently")]
    WrongAxiom(Sequent, Rule),
    #[error("rule {rule} at `{conclusion}` has no principal formula")]
    MissingPrincipal { conclusion: Sequent, rule: Rule },
    #[error("rule {rule} does not apply to `{principal}` in `{conclusion}`")]
    InapplicableRule {
        conclusion: Sequent,
        rule: Rule,
        principal: Formula,
    },
    #[error("premises of `{0}` do not match the rule")]
    PremiseMismatch(Sequent),
}

/// Re-checks a proof tree node by node against the rule table and the
/// axiom predicate of `base`.
pub fn validate_proof(
    base: &MaterialBase,
    node: &ProofNode,
    mode: ContainmentMode,
) -> Result<(), ProofError> {
    let s = &node.conclusion;
    if node.rule.is_axiom() {
        if !node.premises.is_empty() {
            return Err(ProofError::PremiseMismatch(s.clone()));
        }
        return match base.axiom_kind(s, mode) {
            None => Err(ProofError::NotAnAxiom(s.clone())),
            Some(AxiomKind::Containment) if node.rule == Rule::AxiomContainment => Ok(()),
            Some(AxiomKind::Base) if node.rule == Rule::AxiomBase => Ok(()),
            Some(_) => Err(ProofError::WrongAxiom(s.clone(), node.rule)),
        };
    }
    let Some(principal) = &node.principal else {
        return Err(ProofError::MissingPrincipal {
            conclusion: s.clone(),
            rule: node.rule,
        });
    };
    let side = node.rule.side().expect("logical rule has a side");
    if principal.is_atom() || !s.side(side).contains(principal) {
        return Err(ProofError::InapplicableRule {
            conclusion: s.clone(),
            rule: node.rule,
            principal: principal.clone(),
        });
    }
    let (rule, expected) = decompose(s, side, principal);
    if rule != node.rule {
        return Err(ProofError::InapplicableRule {
            conclusion: s.clone(),
            rule: node.rule,
            principal: principal.clone(),
        });
    }
    let actual: Vec<&Sequent> = node.premises.iter().map(|p| &p.conclusion).collect();
    if actual != expected.iter().collect::<Vec<_>>() {
        return Err(ProofError::PremiseMismatch(s.clone()));
    }
    node.premises
        .iter()
        .try_for_each(|p| validate_proof(base, p, mode))
}
