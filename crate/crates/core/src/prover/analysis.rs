//! Structural-property reports over a material base.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use super::{Prover, ProverConfig, ProverError};
use crate::base::{AtomicImplication, MaterialBase};
use crate::formula::{AtomId, Formula, Sequent};
use crate::par::{self, Execution};

fn single(a: &AtomId) -> Sequent {
    Sequent::atomic([a], [a])
}

fn atomic_holds(p: &mut Prover<'_>, s: &Sequent) -> bool {
    // Atomic sequents over declared atoms are decided by the axiom check.
    p.holds(s).expect("atomic query over declared atoms")
}

/// `a ⊢ a` for every atom.
pub fn containment_audit(base: &MaterialBase) -> BTreeMap<AtomId, bool> {
    let atoms: Vec<AtomId> = base.atoms().iter().cloned().collect();
    let results = par::map_with_prover(
        base,
        ProverConfig::default(),
        Execution::default(),
        &atoms,
        |p, a| atomic_holds(p, &single(a)),
    );
    atoms.into_iter().zip(results).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TransitivityGap {
    pub a: AtomId,
    pub b: AtomId,
    pub c: AtomId,
}

/// Chains `{a}⊢{b}`, `{b}⊢{c}` in I whose composite `a ⊢ c` is not derivable.
pub fn transitivity_gaps(base: &MaterialBase) -> Vec<TransitivityGap> {
    let singles: Vec<(&AtomId, &AtomId)> = base
        .implications()
        .filter(|i| i.lhs.len() == 1 && i.rhs.len() == 1)
        .map(|i| (i.lhs.first().unwrap(), i.rhs.first().unwrap()))
        .collect();
    let candidates: BTreeSet<TransitivityGap> = singles
        .iter()
        .flat_map(|(a, b)| {
            singles
                .iter()
                .filter(move |(b2, _)| b2 == b)
                .map(move |(_, c)| TransitivityGap {
                    a: (*a).clone(),
                    b: (*b).clone(),
                    c: (*c).clone(),
                })
        })
        .collect();
    let candidates: Vec<TransitivityGap> = candidates.into_iter().collect();
    let holds = par::map_with_prover(
        base,
        ProverConfig::default(),
        Execution::default(),
        &candidates,
        |p, g| atomic_holds(p, &Sequent::atomic([&g.a], [&g.c])),
    );
    candidates
        .into_iter()
        .zip(holds)
        .filter_map(|(g, h)| (!h).then_some(g))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct MonotonicityDefeat {
    pub implication: AtomicImplication,
    pub extra: AtomId,
}

/// Implications in I that fail once one more atom joins the antecedent.
pub fn monotonicity_defeats(base: &MaterialBase) -> Vec<MonotonicityDefeat> {
    let candidates: Vec<MonotonicityDefeat> = base
        .implications()
        .flat_map(|imp| {
            base.atoms()
                .iter()
                .filter(|x| !imp.mentions(x))
                .map(|x| MonotonicityDefeat {
                    implication: imp.clone(),
                    extra: x.clone(),
                })
        })
        .collect();
    let holds = par::map_with_prover(
        base,
        ProverConfig::default(),
        Execution::default(),
        &candidates,
        |p, d| {
            let lhs = d.implication.lhs.iter().chain([&d.extra]);
            atomic_holds(p, &Sequent::atomic(lhs, &d.implication.rhs))
        },
    );
    candidates
        .into_iter()
        .zip(holds)
        .filter_map(|(d, h)| (!h).then_some(d))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("atom `{0}` appears in more than one group")]
    OverlappingGroups(AtomId),
    #[error("unknown atom `{0}`")]
    UnknownAtom(AtomId),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupPairCell {
    pub from: String,
    pub to: String,
    pub queries: usize,
    pub derivable: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndependenceReport {
    pub groups: Vec<String>,
    /// Unordered cross-group atom pairs.
    pub pairs: usize,
    /// Directed queries `x ⊢ y` that were derivable, summed over all cells.
    pub derivable: usize,
    /// One cell per ordered group pair `from ≠ to`.
    pub cells: Vec<GroupPairCell>,
}

impl IndependenceReport {
    pub fn is_independent(&self) -> bool {
        self.derivable == 0
    }

    /// Derivable counts as a square matrix indexed like `groups`.
    pub fn matrix(&self) -> Vec<Vec<usize>> {
        let idx: BTreeMap<&str, usize> = self
            .groups
            .iter()
            .enumerate()
            .map(|(i, g)| (g.as_str(), i))
            .collect();
        let mut m = vec![vec![0; self.groups.len()]; self.groups.len()];
        for c in &self.cells {
            m[idx[c.from.as_str()]][idx[c.to.as_str()]] = c.derivable;
        }
        m
    }
}

/// Tests `x ⊢ y` and `y ⊢ x` for every pair of atoms drawn from two
/// different groups.
pub fn independence_matrix(
    base: &MaterialBase,
    groups: &[(String, BTreeSet<AtomId>)],
) -> Result<IndependenceReport, AnalysisError> {
    let mut owner: BTreeMap<&AtomId, usize> = BTreeMap::new();
    for (gi, (_, atoms)) in groups.iter().enumerate() {
        for a in atoms {
            if !base.atoms().contains(a) {
                return Err(AnalysisError::UnknownAtom(a.clone()));
            }
            if owner.insert(a, gi).is_some() {
                return Err(AnalysisError::OverlappingGroups(a.clone()));
            }
        }
    }

    let mut queries: Vec<(usize, usize, &AtomId, &AtomId)> = Vec::new();
    let mut pairs = 0;
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            for x in &groups[i].1 {
                for y in &groups[j].1 {
                    pairs += 1;
                    queries.push((i, j, x, y));
                    queries.push((j, i, y, x));
                }
            }
        }
    }
    let holds = par::map_with_prover(
        base,
        ProverConfig::default(),
        Execution::default(),
        &queries,
        |p, (_, _, x, y)| atomic_holds(p, &Sequent::atomic([*x], [*y])),
    );

    let n = groups.len();
    let mut counts = vec![vec![(0usize, 0usize); n]; n];
    for ((i, j, _, _), h) in queries.iter().zip(&holds) {
        counts[*i][*j].0 += 1;
        counts[*i][*j].1 += usize::from(*h);
    }
    let mut cells = Vec::new();
    for (i, row) in counts.iter().enumerate() {
        for (j, &(q, d)) in row.iter().enumerate() {
            if i != j {
                cells.push(GroupPairCell {
                    from: groups[i].0.clone(),
                    to: groups[j].0.clone(),
                    queries: q,
                    derivable: d,
                });
            }
        }
    }
    Ok(IndependenceReport {
        groups: groups.iter().map(|(g, _)| g.clone()).collect(),
        pairs,
        derivable: holds.iter().filter(|h| **h).count(),
        cells,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DdtReport {
    pub left: bool,
    pub right: bool,
    pub agree: bool,
}

/// Compares `Γ ⊢ A→B, Δ` with `Γ, A ⊢ B, Δ`.
pub fn ddt_check(
    base: &MaterialBase,
    gamma: &BTreeSet<Formula>,
    a: &Formula,
    b: &Formula,
    delta: &BTreeSet<Formula>,
) -> Result<DdtReport, ProverError> {
    let mut p = Prover::new(base, ProverConfig::default());
    let mut conditional = Sequent::new(gamma.iter().cloned(), delta.iter().cloned());
    conditional
        .succedent
        .insert(Formula::imp(a.clone(), b.clone()));
    let mut detached = Sequent::new(gamma.iter().cloned(), delta.iter().cloned());
    detached.antecedent.insert(a.clone());
    detached.succedent.insert(b.clone());
    let left = p.holds(&conditional)?;
    let right = p.holds(&detached)?;
    Ok(DdtReport {
        left,
        right,
        agree: left == right,
    })
}
