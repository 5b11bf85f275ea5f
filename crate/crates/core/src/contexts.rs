//! Symbol, variable and metavariable contexts, and symbol renamings.
//!
//! Contexts keep their bindings in insertion order (for printing) but compare
//! as finite maps: two contexts are equal when they bind the same names to the
//! same classifiers, in any order. All judgments only ever consult membership,
//! so exchange holds on the nose.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::name::{Name, Sort};
use crate::signature::Valence;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContextError {
    #[error("`{0}` is already bound")]
    Duplicate(Name),
    #[error("`{0}` is not bound")]
    NotFound(Name),
    #[error("renaming sends both `{0}` and `{1}` to the same symbol")]
    NotInjective(Name, Name),
    #[error("renaming changes the sort of `{0}`")]
    SortViolation(Name),
    #[error("renaming does not say where `{0}` goes")]
    IncompleteMap(Name),
    #[error("renaming mentions `{0}`, which is not in its domain")]
    NotInDomain(Name),
    #[error("renaming targets `{0}`, which is not in its codomain")]
    NotInCodomain(Name),
    #[error("renamings are not composable: codomain and domain differ")]
    ContextMismatch,
}

/// An ordered list of distinct bindings.
#[derive(Clone)]
pub struct Ctx<T> {
    bindings: Vec<(Name, T)>,
}

/// Symbols with their sorts: an object of the category of symbol contexts.
pub type SymbolCtx = Ctx<Sort>;
/// Variables with their sorts.
pub type VarCtx = Ctx<Sort>;
/// Metavariables with their valences.
pub type MetaCtx = Ctx<Valence>;

impl<T> Ctx<T> {
    pub const EMPTY: Ctx<T> = Ctx { bindings: Vec::new() };
}

impl<T> Default for Ctx<T> {
    fn default() -> Self {
        Ctx { bindings: Vec::new() }
    }
}

impl<T: Clone> Ctx<T> {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_bindings<N: Into<Name>>(
        bindings: impl IntoIterator<Item = (N, T)>,
    ) -> Result<Self, ContextError> {
        let mut ctx = Self::empty();
        for (name, value) in bindings {
            ctx.push(name, value)?;
        }
        Ok(ctx)
    }

    /// `Γ, x : τ`, failing if `x` is already bound.
    pub fn extend(&self, name: impl Into<Name>, value: T) -> Result<Self, ContextError> {
        let mut ctx = self.clone();
        ctx.push(name, value)?;
        Ok(ctx)
    }

    pub fn push(&mut self, name: impl Into<Name>, value: T) -> Result<(), ContextError> {
        let name = name.into();
        if self.contains(name.as_str()) {
            return Err(ContextError::Duplicate(name));
        }
        self.bindings.push((name, value));
        Ok(())
    }

    /// Binds `name`, dropping any earlier binding of the same name.
    ///
    /// Going under a binder whose name is already in scope is the same as
    /// renaming the binder apart and extending, as far as lookups are concerned.
    pub fn shadow(&self, name: impl Into<Name>, value: T) -> Self {
        let name = name.into();
        let mut bindings: Vec<_> = self
            .bindings
            .iter()
            .filter(|(n, _)| *n != name)
            .cloned()
            .collect();
        bindings.push((name, value));
        Ctx { bindings }
    }

    /// `Υ \ {u}`; the remaining bindings keep their order.
    pub fn remove(&self, name: &str) -> Result<Self, ContextError> {
        if !self.contains(name) {
            return Err(ContextError::NotFound(Name::new(name)));
        }
        Ok(Ctx {
            bindings: self.bindings.iter().filter(|(n, _)| n.as_str() != name).cloned().collect(),
        })
    }

    /// Concatenates, with bindings from `other` shadowing ours.
    pub fn shadow_all(&self, other: &Ctx<T>) -> Self {
        other.iter().fold(self.clone(), |acc, (n, v)| acc.shadow(n.clone(), v.clone()))
    }
}

impl<T> Ctx<T> {
    pub fn lookup(&self, name: &str) -> Result<&T, ContextError> {
        self.get(name).ok_or_else(|| ContextError::NotFound(Name::new(name)))
    }

    pub fn get(&self, name: &str) -> Option<&T> {
        self.bindings.iter().find(|(n, _)| n.as_str() == name).map(|(_, v)| v)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.bindings.iter().any(|(n, _)| n.as_str() == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &T)> {
        self.bindings.iter().map(|(n, v)| (n, v))
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.bindings.iter().map(|(n, _)| n)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

impl<T: PartialEq> PartialEq for Ctx<T> {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().all(|(n, v)| other.get(n.as_str()) == Some(v))
    }
}

impl<T: Eq> Eq for Ctx<T> {}

impl<T: fmt::Display> fmt::Display for Ctx<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str(".");
        }
        for (i, (n, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}:{v}")?;
        }
        Ok(())
    }
}

impl<T: fmt::Display> fmt::Debug for Ctx<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An injective, sort-preserving map between symbol contexts.
#[derive(Clone, PartialEq, Eq)]
pub struct Renaming {
    dom: SymbolCtx,
    cod: SymbolCtx,
    map: BTreeMap<Name, Name>,
}

impl Renaming {
    /// Validates `pairs` as a renaming `dom ↪ cod`.
    pub fn new<A: Into<Name>, B: Into<Name>>(
        dom: SymbolCtx,
        cod: SymbolCtx,
        pairs: impl IntoIterator<Item = (A, B)>,
    ) -> Result<Renaming, ContextError> {
        let mut map = BTreeMap::new();
        for (from, to) in pairs {
            let (from, to): (Name, Name) = (from.into(), to.into());
            let from_sort = dom.get(from.as_str()).ok_or_else(|| ContextError::NotInDomain(from.clone()))?;
            let to_sort = cod.get(to.as_str()).ok_or_else(|| ContextError::NotInCodomain(to.clone()))?;
            if from_sort != to_sort {
                return Err(ContextError::SortViolation(from));
            }
            if map.insert(from.clone(), to).is_some() {
                return Err(ContextError::Duplicate(from));
            }
        }
        // report collisions in domain order
        let mut seen: BTreeMap<&Name, &Name> = BTreeMap::new();
        for u in dom.names() {
            let Some(target) = map.get(u) else {
                return Err(ContextError::IncompleteMap(u.clone()));
            };
            if let Some(prev) = seen.insert(target, u) {
                return Err(ContextError::NotInjective(prev.clone(), u.clone()));
            }
        }
        Ok(Renaming { dom, cod, map })
    }

    pub fn identity(ctx: &SymbolCtx) -> Renaming {
        Renaming {
            dom: ctx.clone(),
            cod: ctx.clone(),
            map: ctx.names().map(|n| (n.clone(), n.clone())).collect(),
        }
    }

    pub fn dom(&self) -> &SymbolCtx {
        &self.dom
    }

    pub fn cod(&self) -> &SymbolCtx {
        &self.cod
    }

    pub fn apply(&self, u: &str) -> Option<&Name> {
        self.map.get(u)
    }

    pub fn map(&self) -> &BTreeMap<Name, Name> {
        &self.map
    }

    /// `self ∘ first`: rename by `first`, then by `self`.
    pub fn after(&self, first: &Renaming) -> Result<Renaming, ContextError> {
        compose_renamings(self, first)
    }

    /// The inverse of a bijective renaming.
    pub fn inverse(&self) -> Option<Renaming> {
        if self.dom.len() != self.cod.len() {
            return None;
        }
        Renaming::new(self.cod.clone(), self.dom.clone(), self.map.iter().map(|(a, b)| (b.clone(), a.clone()))).ok()
    }
}

/// `r2 ∘ r1`, defined when `r1`'s codomain is `r2`'s domain.
pub fn compose_renamings(r2: &Renaming, r1: &Renaming) -> Result<Renaming, ContextError> {
    if r1.cod != r2.dom {
        return Err(ContextError::ContextMismatch);
    }
    let map = r1
        .map
        .iter()
        .map(|(u, v)| (u.clone(), r2.map[v].clone()))
        .collect();
    Ok(Renaming { dom: r1.dom.clone(), cod: r2.cod.clone(), map })
}

impl fmt::Display for Renaming {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} [", self.dom, self.cod)?;
        for (i, u) in self.dom.names().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{u}={}", self.map[u])?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for Renaming {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
