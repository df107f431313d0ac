//! Top-level definitions.

use crate::nbe::RcValue;
use crate::syntax::Term;

#[derive(Clone, Debug)]
pub struct GlobalEntry {
    pub name: String,
    pub ty: Term,
    pub body: Term,
    pub ty_value: RcValue,
    pub value: RcValue,
}

/// Checked definitions, in declaration order. A definition is frozen once added.
#[derive(Clone, Debug, Default)]
pub struct Globals {
    entries: Vec<GlobalEntry>,
}

impl Globals {
    pub fn new() -> Globals {
        Globals::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: usize) -> Option<&GlobalEntry> {
        self.entries.get(id)
    }

    /// The most recent definition with this name.
    pub fn lookup(&self, name: &str) -> Option<(usize, &GlobalEntry)> {
        self.entries
            .iter()
            .enumerate()
            .rev()
            .find(|(_, e)| e.name == name)
    }

    pub(crate) fn push(&mut self, entry: GlobalEntry) -> usize {
        self.entries.push(entry);
        self.entries.len() - 1
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &GlobalEntry)> {
        self.entries.iter().enumerate()
    }
}
