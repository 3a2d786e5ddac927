//! Named variables.

use std::fmt;

use crate::error::{Error, Result};

/// A variable in a scenario-scoped table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId {
    pub index: usize,
    pub name: String,
}

impl VarId {
    pub fn new(index: usize, name: impl Into<String>) -> Self {
        VarId {
            index,
            name: name.into(),
        }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Builds a variable list with indices `0..names.len()`.
pub fn vars(names: &[&str]) -> Vec<VarId> {
    names
        .iter()
        .enumerate()
        .map(|(i, n)| VarId::new(i, *n))
        .collect()
}

/// Rejects empty names and repeated indices or names.
pub fn check_unique(vs: &[VarId]) -> Result<()> {
    for (i, v) in vs.iter().enumerate() {
        if v.name.is_empty() {
            return Err(Error::InvalidDist("empty variable name".into()));
        }
        if vs[..i]
            .iter()
            .any(|w| w.index == v.index || w.name == v.name)
        {
            return Err(Error::DuplicateVar(v.name.clone()));
        }
    }
    Ok(())
}

/// Position of `v` in `vs`.
pub fn position(vs: &[VarId], v: &VarId) -> Result<usize> {
    vs.iter()
        .position(|w| w == v)
        .ok_or_else(|| Error::UnknownVar(v.name.clone()))
}

/// Positions of every element of `sel` in `vs`.
pub fn positions(vs: &[VarId], sel: &[VarId]) -> Result<Vec<usize>> {
    sel.iter().map(|v| position(vs, v)).collect()
}
