//! Semi-partitioned type lattice. Types hang in trees under disjoint
//! partition roots; two types are compatible iff they share a root.

use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("unknown type '{0}'")]
    UnknownType(String),
    #[error("type '{0}' is already declared")]
    Duplicate(String),
    #[error("declaring '{child}' < '{parent}' would create a cycle")]
    Cycle { child: String, parent: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeLattice {
    partitions: Vec<String>,
    parent: BTreeMap<String, String>,
}

impl TypeLattice {
    pub fn new() -> Self {
        Self::default()
    }

    /// Physical, temporal, abstract_set and information partitions, with
    /// `human` under physical.
    pub fn builtin() -> Self {
        let mut l = TypeLattice::new();
        for p in ["physical", "temporal", "abstract_set", "information"] {
            l.add_partition(p).expect("fresh lattice");
        }
        l.add_subtype("human", "physical").expect("fresh lattice");
        l
    }

    pub fn add_partition(&mut self, name: &str) -> Result<(), LatticeError> {
        if self.contains(name) {
            return Err(LatticeError::Duplicate(name.to_string()));
        }
        self.partitions.push(name.to_string());
        Ok(())
    }

    pub fn add_subtype(&mut self, child: &str, parent: &str) -> Result<(), LatticeError> {
        if !self.contains(parent) {
            return Err(LatticeError::UnknownType(parent.to_string()));
        }
        if child == parent || self.ancestors(parent).any(|a| a == child) {
            return Err(LatticeError::Cycle { child: child.to_string(), parent: parent.to_string() });
        }
        if self.contains(child) {
            return Err(LatticeError::Duplicate(child.to_string()));
        }
        self.parent.insert(child.to_string(), parent.to_string());
        Ok(())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.partitions.iter().any(|p| p == name) || self.parent.contains_key(name)
    }

    pub fn partitions(&self) -> &[String] {
        &self.partitions
    }

    /// `(child, parent)` edges in name order.
    pub fn subtypes(&self) -> impl Iterator<Item = (&str, &str)> {
        self.parent.iter().map(|(c, p)| (c.as_str(), p.as_str()))
    }

    fn ancestors<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        let mut cur = Some(name);
        std::iter::from_fn(move || {
            let here = cur?;
            cur = self.parent.get(here).map(String::as_str);
            Some(here)
        })
    }

    /// The partition a type belongs to.
    pub fn root<'a>(&'a self, name: &'a str) -> Result<&'a str, LatticeError> {
        if !self.contains(name) {
            return Err(LatticeError::UnknownType(name.to_string()));
        }
        Ok(self.ancestors(name).last().expect("non-empty chain"))
    }

    /// `t1 ∼ t2`.
    pub fn compatible(&self, t1: &str, t2: &str) -> Result<bool, LatticeError> {
        Ok(self.root(t1)? == self.root(t2)?)
    }

    pub fn all_types(&self) -> Vec<&str> {
        self.partitions.iter().map(String::as_str).chain(self.parent.keys().map(String::as_str)).collect()
    }
}
