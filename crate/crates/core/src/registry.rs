//! Name-keyed registries for interchangeable strategies.
//!
//! Every pluggable family in the crate (cut-off rules, encoder
//! architectures, text-generation clients, path integrators) exposes a
//! `builtin()` constructor returning a [`Registry`] pre-populated with its
//! shipped variants. Callers select a variant by name at runtime, usually
//! straight from a config file or a CLI flag.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegistryError {
    #[error("unknown {kind} '{name}' (available: {})", available.join(", "))]
    Unknown {
        kind: &'static str,
        name: String,
        available: Vec<String>,
    },
    #[error("{kind} '{name}' is already registered")]
    Duplicate { kind: &'static str, name: String },
}

pub struct Registry<V> {
    kind: &'static str,
    entries: BTreeMap<String, V>,
    aliases: BTreeMap<String, String>,
}

impl<V> Registry<V> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: BTreeMap::new(),
            aliases: BTreeMap::new(),
        }
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }

    pub fn register(&mut self, name: impl Into<String>, value: V) -> Result<(), RegistryError> {
        let name = name.into();
        if self.entries.contains_key(&name) || self.aliases.contains_key(&name) {
            return Err(RegistryError::Duplicate {
                kind: self.kind,
                name,
            });
        }
        self.entries.insert(name, value);
        Ok(())
    }

    /// Adds an alternative spelling for an already registered entry.
    pub fn alias(&mut self, alias: impl Into<String>, target: &str) -> Result<(), RegistryError> {
        let alias = alias.into();
        if !self.entries.contains_key(target) {
            return Err(self.unknown(target));
        }
        if self.entries.contains_key(&alias) || self.aliases.contains_key(&alias) {
            return Err(RegistryError::Duplicate {
                kind: self.kind,
                name: alias,
            });
        }
        self.aliases.insert(alias, target.to_string());
        Ok(())
    }

    /// Resolves a name or alias to the canonical registered name.
    pub fn canonical<'a>(&'a self, name: &'a str) -> Result<&'a str, RegistryError> {
        if let Some((key, _)) = self.entries.get_key_value(name) {
            return Ok(key.as_str());
        }
        self.aliases
            .get(name)
            .map(String::as_str)
            .ok_or_else(|| self.unknown(name))
    }

    pub fn get(&self, name: &str) -> Result<&V, RegistryError> {
        let key = self.canonical(name)?;
        Ok(&self.entries[key])
    }

    pub fn contains(&self, name: &str) -> bool {
        self.canonical(name).is_ok()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &V)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn unknown(&self, name: &str) -> RegistryError {
        RegistryError::Unknown {
            kind: self.kind,
            name: name.to_string(),
            available: self.entries.keys().cloned().collect(),
        }
    }
}

impl<V> fmt::Debug for Registry<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("kind", &self.kind)
            .field("entries", &self.entries.keys().collect::<Vec<_>>())
            .field("aliases", &self.aliases)
            .finish()
    }
}
