//! Identifiers for sorts, symbols, variables, metavariables and operators.

use std::borrow::Borrow;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// An interned, case-sensitive identifier. Cloning is a reference-count bump.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: impl AsRef<str>) -> Name {
        Name(Arc::from(s.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Name {
        Name::new(s)
    }
}

impl From<String> for Name {
    fn from(s: String) -> Name {
        Name(Arc::from(s))
    }
}

impl From<&Name> for Name {
    fn from(n: &Name) -> Name {
        n.clone()
    }
}

impl Borrow<str> for Name {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for Name {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A syntactic category. Equality is name equality.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sort(Name);

impl Sort {
    pub fn new(s: impl AsRef<str>) -> Sort {
        Sort(Name::new(s))
    }

    pub fn name(&self) -> &Name {
        &self.0
    }

    pub fn as_str(&self) -> &str {
        self.0.as_str()
    }
}

impl From<&str> for Sort {
    fn from(s: &str) -> Sort {
        Sort::new(s)
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0.as_str())
    }
}

impl fmt::Debug for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0.as_str())
    }
}

/// Picks a name not rejected by `blocked`: the base of `name` (trailing digits
/// stripped) followed by the smallest positive numeric suffix that is free.
///
/// The result depends only on `name` and the blocked set.
pub fn fresh_name(name: &Name, blocked: impl Fn(&str) -> bool) -> Name {
    let base = name.as_str().trim_end_matches(|c: char| c.is_ascii_digit());
    let base = if base.is_empty() { "_" } else { base };
    let mut i = 1u64;
    loop {
        let candidate = format!("{base}{i}");
        if !blocked(&candidate) {
            return Name::from(candidate);
        }
        i += 1;
    }
}

/// [`fresh_name`] against an explicit set.
pub fn fresh_avoiding(name: &Name, blocked: &BTreeSet<Name>) -> Name {
    fresh_name(name, |s| blocked.contains(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_uses_smallest_free_suffix() {
        let blocked: BTreeSet<Name> = ["x", "x1", "x3"].into_iter().map(Name::from).collect();
        assert_eq!(fresh_avoiding(&Name::from("x"), &blocked).as_str(), "x2");
        assert_eq!(fresh_avoiding(&Name::from("x12"), &blocked).as_str(), "x2");
        assert_eq!(fresh_avoiding(&Name::from("y"), &blocked).as_str(), "y1");
    }
}
