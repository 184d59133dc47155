use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::calculus::{replay_check, Derivation, Judgment, TheoremLookup};

/// A previously synthesized judgment kept for reuse, together with the
/// derivation that proves it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Theorem {
    pub name: String,
    pub judgment: Judgment,
    pub derivation: Derivation,
}

/// Ordered collection of proven theorems. Lookup walks insertion order,
/// so theorems stored earlier are preferred during search.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TheoremStore {
    theorems: Vec<Theorem>,
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("theorem '{name}' fails replay: {reason}")]
    ReplayFailed { name: String, reason: String },
    #[error("a theorem named '{name}' already exists")]
    DuplicateName { name: String },
    #[error("store io: {0}")]
    Io(#[from] io::Error),
    #[error("store format: {0}")]
    Format(#[from] serde_json::Error),
}

impl TheoremStore {
    pub fn new() -> TheoremStore {
        TheoremStore::default()
    }

    pub fn len(&self) -> usize {
        self.theorems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theorems.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Theorem> {
        self.theorems.iter()
    }

    pub fn get(&self, name: &str) -> Option<&Theorem> {
        self.theorems.iter().find(|t| t.name == name)
    }

    /// Inserts a theorem after checking that its derivation replays to
    /// its goal. The derivation may reference theorems already stored.
    pub fn insert(&mut self, theorem: Theorem) -> Result<(), StoreError> {
        if self.get(&theorem.name).is_some() {
            return Err(StoreError::DuplicateName {
                name: theorem.name.clone(),
            });
        }
        let report = replay_check(&theorem.derivation, self);
        if !report.ok {
            return Err(StoreError::ReplayFailed {
                name: theorem.name.clone(),
                reason: report.reason.unwrap_or_default(),
            });
        }
        self.theorems.push(theorem);
        Ok(())
    }

    pub fn load(path: &Path) -> Result<TheoremStore, StoreError> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), StoreError> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(path, text)?;
        Ok(())
    }
}

impl TheoremLookup for TheoremStore {
    fn theorem(&self, name: &str) -> Option<Judgment> {
        self.get(name).map(|t| t.judgment.clone())
    }
}
