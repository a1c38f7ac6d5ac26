//! Material bases: an atomic language plus a finite set of atomic
//! implications. Containment is never materialized; it is checked lazily
//! as "the sides share a member".

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{AtomId, Sequent};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaseError {
    #[error("malformed base document: {0}")]
    Format(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(AtomId),
}

/// An endorsed sequent between finite atom sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AtomicImplication {
    pub lhs: BTreeSet<AtomId>,
    pub rhs: BTreeSet<AtomId>,
}

impl AtomicImplication {
    pub fn new(
        lhs: impl IntoIterator<Item = AtomId>,
        rhs: impl IntoIterator<Item = AtomId>,
    ) -> Self {
        AtomicImplication {
            lhs: lhs.into_iter().collect(),
            rhs: rhs.into_iter().collect(),
        }
    }

    /// Convenience constructor from names; panics on invalid names.
    pub fn from_names(lhs: &[&str], rhs: &[&str]) -> Self {
        let ids = |names: &[&str]| -> Vec<AtomId> {
            names
                .iter()
                .map(|n| AtomId::new(*n).expect("invalid atom"))
                .collect()
        };
        AtomicImplication::new(ids(lhs), ids(rhs))
    }

    /// Overlapping sides are already covered by Containment.
    pub fn is_redundant(&self) -> bool {
        !self.lhs.is_disjoint(&self.rhs)
    }

    pub fn mentions(&self, atom: &AtomId) -> bool {
        self.lhs.contains(atom) || self.rhs.contains(atom)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &AtomId> {
        self.lhs.iter().chain(&self.rhs)
    }

    pub fn to_sequent(&self) -> Sequent {
        Sequent::atomic(&self.lhs, &self.rhs)
    }
}

impl fmt::Display for AtomicImplication {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_sequent().fmt(f)
    }
}

/// How the Containment axiom is checked.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContainmentMode {
    /// Any shared formula, atomic or compound, closes the sequent.
    #[default]
    FormulaLevel,
    /// Only a shared atom closes the sequent.
    AtomicOnly,
}

/// Which axiom closes a sequent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomKind {
    Containment,
    Base,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MaterialBase {
    atoms: BTreeSet<AtomId>,
    implications: BTreeMap<AtomicImplication, Option<String>>,
}

impl MaterialBase {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a base, rejecting implications over undeclared atoms.
    pub fn from_parts(
        atoms: impl IntoIterator<Item = AtomId>,
        implications: impl IntoIterator<Item = (AtomicImplication, Option<String>)>,
    ) -> Result<Self, BaseError> {
        let mut base = MaterialBase {
            atoms: atoms.into_iter().collect(),
            implications: BTreeMap::new(),
        };
        for (imp, provenance) in implications {
            base.insert(imp, provenance)?;
        }
        Ok(base)
    }

    pub fn declare(&mut self, atom: AtomId) {
        self.atoms.insert(atom);
    }

    /// Adds an implication; a duplicate keeps its first provenance.
    pub fn insert(
        &mut self,
        imp: AtomicImplication,
        provenance: Option<String>,
    ) -> Result<(), BaseError> {
        if let Some(a) = imp.atoms().find(|a| !self.atoms.contains(*a)) {
            return Err(BaseError::UnknownAtom(a.clone()));
        }
        self.implications.entry(imp).or_insert(provenance);
        Ok(())
    }

    pub fn atoms(&self) -> &BTreeSet<AtomId> {
        &self.atoms
    }

    pub fn implications(&self) -> impl Iterator<Item = &AtomicImplication> {
        self.implications.keys()
    }

    pub fn provenance(&self, imp: &AtomicImplication) -> Option<&str> {
        self.implications.get(imp).and_then(|p| p.as_deref())
    }

    pub fn len(&self) -> usize {
        self.implications.len()
    }

    pub fn is_empty(&self) -> bool {
        self.implications.is_empty()
    }

    pub fn contains(&self, imp: &AtomicImplication) -> bool {
        self.implications.contains_key(imp)
    }

    /// Implications stored with overlapping sides.
    pub fn redundant(&self) -> Vec<&AtomicImplication> {
        self.implications().filter(|i| i.is_redundant()).collect()
    }

    pub fn check_atoms(&self, s: &Sequent) -> Result<(), BaseError> {
        match s.atoms().into_iter().find(|a| !self.atoms.contains(a)) {
            Some(a) => Err(BaseError::UnknownAtom(a)),
            None => Ok(()),
        }
    }

    /// Membership in `I ∪ Cont`, with Containment at formula level.
    pub fn is_axiom(&self, s: &Sequent) -> Result<bool, BaseError> {
        self.check_atoms(s)?;
        Ok(self.axiom_kind(s, ContainmentMode::FormulaLevel).is_some())
    }

    /// Axiom test without the declared-atom check.
    pub fn axiom_kind(&self, s: &Sequent, mode: ContainmentMode) -> Option<AxiomKind> {
        let shared = match mode {
            ContainmentMode::FormulaLevel => !s.antecedent.is_disjoint(&s.succedent),
            ContainmentMode::AtomicOnly => s
                .antecedent
                .iter()
                .any(|f| f.is_atom() && s.succedent.contains(f)),
        };
        if shared {
            return Some(AxiomKind::Containment);
        }
        if !s.is_atomic() {
            return None;
        }
        let side = |set: &BTreeSet<crate::Formula>| -> BTreeSet<AtomId> {
            set.iter().filter_map(|f| f.as_atom().cloned()).collect()
        };
        let key = AtomicImplication {
            lhs: side(&s.antecedent),
            rhs: side(&s.succedent),
        };
        self.implications
            .contains_key(&key)
            .then_some(AxiomKind::Base)
    }

    /// Canonical JSON document: atoms sorted, implications in canonical
    /// order, two-space indentation, trailing newline.
    pub fn to_json(&self) -> String {
        let doc = BaseDocument {
            atoms: self.atoms.iter().cloned().collect(),
            implications: self
                .implications
                .iter()
                .map(|(imp, provenance)| ImplicationDocument {
                    lhs: imp.lhs.iter().cloned().collect(),
                    rhs: imp.rhs.iter().cloned().collect(),
                    provenance: provenance.clone(),
                })
                .collect(),
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("base serializes");
        out.push('\n');
        out
    }

    pub fn to_document(&self) -> serde_json::Value {
        serde_json::from_str(&self.to_json()).expect("base serializes")
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BaseDocument {
    atoms: Vec<AtomId>,
    implications: Vec<ImplicationDocument>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ImplicationDocument {
    lhs: Vec<AtomId>,
    rhs: Vec<AtomId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<String>,
}

pub fn load_base(document: &[u8]) -> Result<MaterialBase, BaseError> {
    let doc: BaseDocument =
        serde_json::from_slice(document).map_err(|e| BaseError::Format(e.to_string()))?;
    MaterialBase::from_parts(
        doc.atoms,
        doc.implications
            .into_iter()
            .map(|i| (AtomicImplication::new(i.lhs, i.rhs), i.provenance)),
    )
}

pub fn load_base_value(value: serde_json::Value) -> Result<MaterialBase, BaseError> {
    let bytes = serde_json::to_vec(&value).map_err(|e| BaseError::Format(e.to_string()))?;
    load_base(&bytes)
}

pub fn save_base(base: &MaterialBase) -> Vec<u8> {
    base.to_json().into_bytes()
}
