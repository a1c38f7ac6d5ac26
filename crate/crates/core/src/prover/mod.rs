//! Root-first backward proof search for the NMMS sequent calculus over a
//! material base.
//!
//! Rules, read from conclusion to premises (context-sharing, set-based,
//! no weakening, no cut; the principal formula leaves its side):
//!
//! ```text
//! L∧  Γ, A∧B ⊢ Δ   ⟸  Γ, A, B ⊢ Δ
//! R∧  Γ ⊢ A∧B, Δ   ⟸  Γ ⊢ A, Δ    and  Γ ⊢ B, Δ
//! L∨  Γ, A∨B ⊢ Δ   ⟸  Γ, A ⊢ Δ    and  Γ, B ⊢ Δ
//! R∨  Γ ⊢ A∨B, Δ   ⟸  Γ ⊢ A, B, Δ
//! L→  Γ, A→B ⊢ Δ   ⟸  Γ ⊢ A, Δ    and  Γ, B ⊢ Δ
//! R→  Γ ⊢ A→B, Δ   ⟸  Γ, A ⊢ B, Δ
//! L¬  Γ, ¬A ⊢ Δ    ⟸  Γ ⊢ A, Δ
//! R¬  Γ ⊢ ¬A, Δ    ⟸  Γ, A ⊢ Δ
//! ```
//!
//! Leaves are members of `I ∪ Cont`. Every backward step strictly lowers
//! the connective count, so search terminates without loop checking.

mod analysis;
mod proof;

pub use analysis::{
    containment_audit, ddt_check, independence_matrix, monotonicity_defeats, transitivity_gaps,
    AnalysisError, DdtReport, GroupPairCell, IndependenceReport, MonotonicityDefeat,
    TransitivityGap,
};
pub use proof::{validate_proof, ProofError, ProofNode, Rule};

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::base::{AxiomKind, BaseError, ContainmentMode, MaterialBase};
use crate::formula::{render, AtomId, Formula, Sequent, Side};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProverError {
    #[error("unknown atom `{0}`")]
    UnknownAtom(AtomId),
    #[error("search exceeded node budget of {0}")]
    ResourceLimit(u64),
}

impl From<BaseError> for ProverError {
    fn from(e: BaseError) -> Self {
        match e {
            BaseError::UnknownAtom(a) => ProverError::UnknownAtom(a),
            // Only the atom check reaches the prover.
            BaseError::Format(msg) => unreachable!("format error in prover: {msg}"),
        }
    }
}

/// Principal-formula selection.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Try every compound formula as principal until one succeeds.
    #[default]
    Backtracking,
    /// Commit to the first compound formula in canonical order. Relies on
    /// rule invertibility; checked against `Backtracking` in tests.
    Focused,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProverConfig {
    pub memoize: bool,
    pub containment: ContainmentMode,
    pub strategy: Strategy,
    pub node_budget: u64,
}

impl Default for ProverConfig {
    fn default() -> Self {
        ProverConfig {
            memoize: true,
            containment: ContainmentMode::FormulaLevel,
            strategy: Strategy::Backtracking,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub memo_hits: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryResult {
    pub derivable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proof: Option<Arc<ProofNode>>,
    pub stats: SearchStats,
}

/// A search engine bound to one base. The memo table persists across
/// queries on the same `Prover`.
pub struct Prover<'b> {
    base: &'b MaterialBase,
    config: ProverConfig,
    memo: HashMap<String, Option<Arc<ProofNode>>>,
    stats: SearchStats,
}

impl<'b> Prover<'b> {
    pub fn new(base: &'b MaterialBase, config: ProverConfig) -> Self {
        Prover {
            base,
            config,
            memo: HashMap::new(),
            stats: SearchStats::default(),
        }
    }

    pub fn base(&self) -> &MaterialBase {
        self.base
    }

    pub fn config(&self) -> &ProverConfig {
        &self.config
    }

    pub fn derivable(&mut self, s: &Sequent) -> Result<QueryResult, ProverError> {
        self.base.check_atoms(s)?;
        self.stats = SearchStats::default();
        let proof = self.search(s)?;
        Ok(QueryResult {
            derivable: proof.is_some(),
            proof,
            stats: self.stats,
        })
    }

    /// Boolean-only convenience.
    pub fn holds(&mut self, s: &Sequent) -> Result<bool, ProverError> {
        Ok(self.derivable(s)?.derivable)
    }

    fn search(&mut self, s: &Sequent) -> Result<Option<Arc<ProofNode>>, ProverError> {
        let key = self.config.memoize.then(|| s.canonical());
        if let Some(hit) = key.as_ref().and_then(|k| self.memo.get(k)) {
            self.stats.memo_hits += 1;
            return Ok(hit.clone());
        }
        self.stats.nodes += 1;
        if self.stats.nodes > self.config.node_budget {
            return Err(ProverError::ResourceLimit(self.config.node_budget));
        }

        let result = match self.base.axiom_kind(s, self.config.containment) {
            Some(kind) => Some(Arc::new(ProofNode::axiom(s.clone(), kind))),
            None => self.expand(s)?,
        };
        if let Some(k) = key {
            self.memo.insert(k, result.clone());
        }
        Ok(result)
    }

    fn expand(&mut self, s: &Sequent) -> Result<Option<Arc<ProofNode>>, ProverError> {
        let candidates = principal_candidates(s);
        let tries = match self.config.strategy {
            Strategy::Backtracking => candidates.len(),
            Strategy::Focused => candidates.len().min(1),
        };
        'principal: for (side, f) in candidates.into_iter().take(tries) {
            let (rule, premises) = decompose(s, side, f);
            let mut proved = Vec::with_capacity(premises.len());
            for p in &premises {
                match self.search(p)? {
                    Some(node) => proved.push(node),
                    None => continue 'principal,
                }
            }
            return Ok(Some(Arc::new(ProofNode {
                conclusion: s.clone(),
                rule,
                principal: Some(f.clone()),
                premises: proved,
            })));
        }
        Ok(None)
    }
}

/// Compound formulas in selection order: antecedent first, each side
/// sorted by rendered text.
pub fn principal_candidates(s: &Sequent) -> Vec<(Side, &Formula)> {
    let sorted = |side: Side| {
        let mut v: Vec<(String, &Formula)> = s
            .side(side)
            .iter()
            .filter(|f| !f.is_atom())
            .map(|f| (render(f), f))
            .collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v.into_iter().map(move |(_, f)| (side, f))
    };
    sorted(Side::Antecedent)
        .chain(sorted(Side::Succedent))
        .collect()
}

/// Applies the rule for `f` on `side` backward. `f` must be compound and
/// a member of that side.
pub fn decompose(s: &Sequent, side: Side, f: &Formula) -> (Rule, Vec<Sequent>) {
    let mut rest = s.clone();
    match side {
        Side::Antecedent => rest.antecedent.remove(f),
        Side::Succedent => rest.succedent.remove(f),
    };
    let with = |lhs: &[&Formula], rhs: &[&Formula]| {
        let mut p = rest.clone();
        p.antecedent.extend(lhs.iter().map(|x| (*x).clone()));
        p.succedent.extend(rhs.iter().map(|x| (*x).clone()));
        p
    };
    match (side, f) {
        (Side::Antecedent, Formula::And(a, b)) => (Rule::LAnd, vec![with(&[a, b], &[])]),
        (Side::Succedent, Formula::And(a, b)) => {
            (Rule::RAnd, vec![with(&[], &[a]), with(&[], &[b])])
        }
        (Side::Antecedent, Formula::Or(a, b)) => {
            (Rule::LOr, vec![with(&[a], &[]), with(&[b], &[])])
        }
        (Side::Succedent, Formula::Or(a, b)) => (Rule::ROr, vec![with(&[], &[a, b])]),
        (Side::Antecedent, Formula::Imp(a, b)) => {
            (Rule::LImp, vec![with(&[], &[a]), with(&[b], &[])])
        }
        (Side::Succedent, Formula::Imp(a, b)) => (Rule::RImp, vec![with(&[a], &[b])]),
        (Side::Antecedent, Formula::Neg(a)) => (Rule::LNeg, vec![with(&[], &[a])]),
        (Side::Succedent, Formula::Neg(a)) => (Rule::RNeg, vec![with(&[a], &[])]),
        (_, Formula::Atom(_)) => panic!("atoms have no logical rule"),
    }
}

pub fn derivable(base: &MaterialBase, s: &Sequent) -> Result<QueryResult, ProverError> {
    Prover::new(base, ProverConfig::default()).derivable(s)
}

pub fn derivable_with(
    base: &MaterialBase,
    s: &Sequent,
    config: ProverConfig,
) -> Result<QueryResult, ProverError> {
    Prover::new(base, config).derivable(s)
}

/// Element-wise [`derivable`]; parallel when the `parallel` feature is on.
pub fn derivable_batch(
    base: &MaterialBase,
    queries: &[Sequent],
) -> Result<Vec<QueryResult>, ProverError> {
    derivable_batch_with(
        base,
        queries,
        ProverConfig::default(),
        crate::par::Execution::default(),
    )
}

pub fn derivable_batch_with(
    base: &MaterialBase,
    queries: &[Sequent],
    config: ProverConfig,
    exec: crate::par::Execution,
) -> Result<Vec<QueryResult>, ProverError> {
    crate::par::map_with_prover(base, config, exec, queries, |p, q| p.derivable(q))
        .into_iter()
        .collect()
}

impl ProofNode {
    fn axiom(conclusion: Sequent, kind: AxiomKind) -> Self {
        ProofNode {
            conclusion,
            rule: match kind {
                AxiomKind::Containment => Rule::AxiomContainment,
                AxiomKind::Base => Rule::AxiomBase,
            },
            principal: None,
            premises: vec![],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::AtomicImplication;
    use crate::formula::parse_sequent;

    fn chain() -> MaterialBase {
        let atoms = ["a", "b", "c"].map(|n| AtomId::new(n).unwrap());
        MaterialBase::from_parts(
            atoms,
            [
                (AtomicImplication::from_names(&["a"], &["b"]), None),
                (AtomicImplication::from_names(&["b"], &["c"]), None),
            ],
        )
        .unwrap()
    }

    fn holds(b: &MaterialBase, s: &str) -> bool {
        derivable(b, &parse_sequent(s).unwrap()).unwrap().derivable
    }

    #[test]
    fn base_level() {
        let b = chain();
        assert!(holds(&b, "a |- b"));
        assert!(holds(&b, "b |- c"));
        assert!(!holds(&b, "a |- c"));
        assert!(!holds(&b, "a, c |- b"));
        assert!(holds(&b, "c |- c"));
    }

    #[test]
    fn connectives() {
        let b = chain();
        assert!(holds(&b, "|- a -> b"));
        assert!(!holds(&b, "|- a -> c"));
        assert!(holds(&b, "|- a | ~a"));
        assert!(holds(&b, "a & ~a |-"));
        assert!(holds(&b, "|- (a -> b) & (b -> c) -> (a -> c)"));
        assert!(holds(&b, "a -> b, a |- b"));
        assert!(holds(&b, "a |- b & ~~b"));
        assert!(!holds(&b, "a & c |- b"));
    }

    #[test]
    fn empty_sequent_not_derivable() {
        assert!(!holds(&chain(), "|-"));
    }

    #[test]
    fn proof_shape() {
        let b = chain();
        let r = derivable(&b, &parse_sequent("|- a -> b").unwrap()).unwrap();
        let p = r.proof.unwrap();
        assert_eq!(p.rule, Rule::RImp);
        assert_eq!(p.premises.len(), 1);
        assert_eq!(p.premises[0].rule, Rule::AxiomBase);
        validate_proof(&b, &p, ContainmentMode::FormulaLevel).unwrap();
    }

    #[test]
    fn unknown_atom() {
        let err = derivable(&chain(), &parse_sequent("a |- z").unwrap()).unwrap_err();
        assert_eq!(err, ProverError::UnknownAtom(AtomId::new("z").unwrap()));
    }

    #[test]
    fn budget_exhaustion() {
        let b = chain();
        let cfg = ProverConfig {
            node_budget: 2,
            ..ProverConfig::default()
        };
        let s = parse_sequent("|- (a -> b) & (b -> c) -> (a -> c)").unwrap();
        assert_eq!(
            derivable_with(&b, &s, cfg),
            Err(ProverError::ResourceLimit(2))
        );
    }

    #[test]
    fn candidates_sorted_antecedent_first() {
        let s = parse_sequent("~b, a & c, a |- c | a, ~a").unwrap();
        let order: Vec<String> = principal_candidates(&s)
            .into_iter()
            .map(|(side, f)| format!("{side:?}:{f}"))
            .collect();
        assert_eq!(
            order,
            [
                "Antecedent:a & c",
                "Antecedent:~b",
                "Succedent:c | a",
                "Succedent:~a"
            ]
        );
    }

    #[test]
    fn memo_hits_recorded() {
        let b = chain();
        let mut p = Prover::new(&b, ProverConfig::default());
        let s = parse_sequent("|- a -> b").unwrap();
        p.derivable(&s).unwrap();
        let second = p.derivable(&s).unwrap();
        assert_eq!(second.stats.nodes, 0);
        assert_eq!(second.stats.memo_hits, 1);
    }
}
