//! Sorts, valences, arities and symbol-indexed operator families.
//!
//! An operator family is presented by a declaration with a list of
//! symbol-parameter slots: `get {exp} : () exp` stands for one operator
//! `get[u]` for every symbol `u : exp` in scope. A declaration with no slots
//! (`lam`, `ap`) is a single constant operator.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::contexts::{Renaming, SymbolCtx};
use crate::name::{Name, Sort};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("sort `{0}` is declared twice")]
    DuplicateSort(Sort),
    #[error("operator `{0}` is declared twice")]
    DuplicateOperator(Name),
    #[error("unknown sort `{sort}` in `{within}`")]
    UnknownSort { sort: Sort, within: Name },
    #[error("empty identifier")]
    EmptyName,
    #[error("operator `{0}` is not part of the signature")]
    UnknownOperator(Name),
    #[error("symbol `{0}` is not bound")]
    UnboundSymbol(Name),
    #[error("symbol `{symbol}` has sort {found}, but {expected} was expected")]
    SortMismatch { symbol: Name, expected: Sort, found: Sort },
    #[error("operator `{op}` takes {expected} symbol parameter(s), found {found}")]
    ParamCount { op: Name, expected: usize, found: usize },
    #[error("symbol `{0}` is not in the renaming's domain")]
    SymbolNotInDomain(Name),
}

/// `{σ⃗}[τ⃗].τ`: an argument of sort `τ` binding symbols of sorts `σ⃗` and
/// variables of sorts `τ⃗`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Valence {
    pub symbols: Vec<Sort>,
    pub vars: Vec<Sort>,
    pub target: Sort,
}

impl Valence {
    pub fn new(symbols: Vec<Sort>, vars: Vec<Sort>, target: Sort) -> Valence {
        Valence { symbols, vars, target }
    }

    /// `.τ`, an argument that binds nothing.
    pub fn plain(target: Sort) -> Valence {
        Valence::new(Vec::new(), Vec::new(), target)
    }

    pub fn binds_nothing(&self) -> bool {
        self.symbols.is_empty() && self.vars.is_empty()
    }

    fn sorts(&self) -> impl Iterator<Item = &Sort> {
        self.symbols.iter().chain(&self.vars).chain(std::iter::once(&self.target))
    }
}

/// `(v⃗)τ`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arity {
    pub valences: Vec<Valence>,
    pub target: Sort,
}

impl Arity {
    pub fn new(valences: Vec<Valence>, target: Sort) -> Arity {
        Arity { valences, target }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OperatorDecl {
    pub name: Name,
    /// Sorts of the symbol-parameter slots.
    pub params: Vec<Sort>,
    pub arity: Arity,
}

impl OperatorDecl {
    pub fn new(name: impl Into<Name>, params: Vec<Sort>, arity: Arity) -> OperatorDecl {
        OperatorDecl { name: name.into(), params, arity }
    }
}

/// A family of declarations indexed by sort vectors, instantiated on demand.
pub trait OperatorSchema: Send + Sync {
    /// The name used at occurrence sites, before the bracketed sort vector.
    fn head(&self) -> &str;
    fn instantiate(&self, sorts: &[Sort]) -> Arc<OperatorDecl>;
    /// Whether `decl` is one of this schema's instances.
    fn owns(&self, decl: &OperatorDecl) -> bool;
}

/// An operator applied to its symbol parameters: `ϑ = get[u]`.
#[derive(Clone)]
pub struct OperatorInst {
    pub decl: Arc<OperatorDecl>,
    pub params: Vec<Name>,
}

impl OperatorInst {
    pub fn new(decl: Arc<OperatorDecl>, params: Vec<Name>) -> OperatorInst {
        OperatorInst { decl, params }
    }

    pub fn name(&self) -> &Name {
        &self.decl.name
    }

    pub fn arity(&self) -> &Arity {
        &self.decl.arity
    }

    /// Maps each parameter through `f`; `None` leaves the parameter alone.
    pub(crate) fn map_params(&self, f: impl Fn(&Name) -> Option<Name>) -> OperatorInst {
        OperatorInst {
            decl: self.decl.clone(),
            params: self.params.iter().map(|u| f(u).unwrap_or_else(|| u.clone())).collect(),
        }
    }
}

impl PartialEq for OperatorInst {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.decl, &other.decl) || self.decl == other.decl) && self.params == other.params
    }
}

impl Eq for OperatorInst {}

/// `Σ = ⟨S, O⟩`. Immutable once declared.
#[derive(Clone, Default)]
pub struct Signature {
    sorts: Vec<Sort>,
    ops: BTreeMap<Name, Arc<OperatorDecl>>,
    op_order: Vec<Name>,
    schemas: BTreeMap<Name, Arc<dyn OperatorSchema>>,
}

/// Validates sort and operator declarations into a signature.
pub fn declare_signature(sorts: Vec<Sort>, ops: Vec<OperatorDecl>) -> Result<Signature, SignatureError> {
    Signature::default().extend(sorts, ops)
}

impl Signature {
    pub const EMPTY: Signature =
        Signature { sorts: Vec::new(), ops: BTreeMap::new(), op_order: Vec::new(), schemas: BTreeMap::new() };

    pub fn empty() -> Signature {
        Signature::default()
    }

    /// A new signature with additional sorts and operators.
    pub fn extend(&self, sorts: Vec<Sort>, ops: Vec<OperatorDecl>) -> Result<Signature, SignatureError> {
        let mut sig = self.clone();
        for sort in sorts {
            if sort.as_str().is_empty() {
                return Err(SignatureError::EmptyName);
            }
            if sig.sorts.contains(&sort) {
                return Err(SignatureError::DuplicateSort(sort));
            }
            sig.sorts.push(sort);
        }
        for op in ops {
            if op.name.as_str().is_empty() {
                return Err(SignatureError::EmptyName);
            }
            if sig.ops.contains_key(&op.name) || sig.schemas.contains_key(&op.name) {
                return Err(SignatureError::DuplicateOperator(op.name));
            }
            let valence_sorts = op.arity.valences.iter().flat_map(Valence::sorts);
            for sort in op.params.iter().chain(valence_sorts).chain(std::iter::once(&op.arity.target)) {
                if !sig.has_sort(sort) {
                    return Err(SignatureError::UnknownSort { sort: sort.clone(), within: op.name.clone() });
                }
            }
            sig.op_order.push(op.name.clone());
            sig.ops.insert(op.name.clone(), Arc::new(op));
        }
        Ok(sig)
    }

    /// Registers an operator schema, reachable at occurrence sites as `head[σ⃗]`.
    pub fn with_schema(mut self, schema: Arc<dyn OperatorSchema>) -> Result<Signature, SignatureError> {
        let head = Name::new(schema.head());
        if self.ops.contains_key(&head) || self.schemas.contains_key(&head) {
            return Err(SignatureError::DuplicateOperator(head));
        }
        self.schemas.insert(head, schema);
        Ok(self)
    }

    pub fn sorts(&self) -> &[Sort] {
        &self.sorts
    }

    pub fn has_sort(&self, sort: &Sort) -> bool {
        self.sorts.contains(sort)
    }

    pub fn operator(&self, name: &str) -> Option<&Arc<OperatorDecl>> {
        self.ops.get(name)
    }

    /// Operators in declaration order.
    pub fn operators(&self) -> impl Iterator<Item = &Arc<OperatorDecl>> {
        self.op_order.iter().map(|n| &self.ops[n])
    }

    pub fn schema(&self, head: &str) -> Option<&Arc<dyn OperatorSchema>> {
        self.schemas.get(head)
    }

    pub fn instantiate(&self, head: &str, sorts: &[Sort]) -> Result<Arc<OperatorDecl>, SignatureError> {
        let schema = self.schema(head).ok_or_else(|| SignatureError::UnknownOperator(Name::new(head)))?;
        if let Some(bad) = sorts.iter().find(|s| !self.has_sort(s)) {
            return Err(SignatureError::UnknownSort { sort: bad.clone(), within: Name::new(head) });
        }
        Ok(schema.instantiate(sorts))
    }

    /// Whether `decl` is declared here or is an instance of one of our schemas.
    pub fn owns(&self, decl: &OperatorDecl) -> bool {
        match self.ops.get(&decl.name) {
            Some(d) => **d == *decl,
            None => self.schemas.values().any(|s| s.owns(decl)),
        }
    }
}

/// Decides `Υ ⊩ ϑ : a`, returning `a`.
///
/// Only membership in `ctx` is consulted, so the judgment is stable under
/// weakening and exchange.
pub fn check_operator<'a>(
    sig: &Signature,
    ctx: &SymbolCtx,
    inst: &'a OperatorInst,
) -> Result<&'a Arity, SignatureError> {
    let decl = &inst.decl;
    if !sig.owns(decl) {
        return Err(SignatureError::UnknownOperator(decl.name.clone()));
    }
    if decl.params.len() != inst.params.len() {
        return Err(SignatureError::ParamCount {
            op: decl.name.clone(),
            expected: decl.params.len(),
            found: inst.params.len(),
        });
    }
    for (u, expected) in inst.params.iter().zip(&decl.params) {
        let found = ctx.get(u.as_str()).ok_or_else(|| SignatureError::UnboundSymbol(u.clone()))?;
        if found != expected {
            return Err(SignatureError::SortMismatch {
                symbol: u.clone(),
                expected: expected.clone(),
                found: found.clone(),
            });
        }
    }
    Ok(&decl.arity)
}

/// `ϑ·ρ`: renames the parameters pointwise.
pub fn rename_operator(inst: &OperatorInst, rho: &Renaming) -> Result<OperatorInst, SignatureError> {
    if let Some(u) = inst.params.iter().find(|u| rho.apply(u.as_str()).is_none()) {
        return Err(SignatureError::SymbolNotInDomain(u.clone()));
    }
    Ok(inst.map_params(|u| rho.apply(u.as_str()).cloned()))
}

/// The least support of an operator instance: its parameters with their sorts.
pub fn operator_support(inst: &OperatorInst) -> BTreeSet<(Name, Sort)> {
    inst.params.iter().cloned().zip(inst.decl.params.iter().cloned()).collect()
}

fn comma_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

impl fmt::Display for Valence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.symbols.is_empty() {
            f.write_str("{")?;
            comma_list(f, &self.symbols)?;
            f.write_str("}")?;
        }
        if !self.vars.is_empty() {
            f.write_str("[")?;
            comma_list(f, &self.vars)?;
            f.write_str("]")?;
        }
        write!(f, ".{}", self.target)
    }
}

impl fmt::Debug for Valence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.valences.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ") {}", self.target)
    }
}

impl fmt::Debug for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for OperatorDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if !self.params.is_empty() {
            f.write_str(" {")?;
            comma_list(f, &self.params)?;
            f.write_str("}")?;
        }
        write!(f, " : {}", self.arity)
    }
}

impl fmt::Debug for OperatorDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for OperatorInst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.decl.name)?;
        if !self.params.is_empty() {
            f.write_str("[")?;
            comma_list(f, &self.params)?;
            f.write_str("]")?;
        }
        Ok(())
    }
}

impl fmt::Debug for OperatorInst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Prints in the signature file format.
impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for sort in &self.sorts {
            writeln!(f, "sort {sort}")?;
        }
        for op in self.operators() {
            writeln!(f, "op {op}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The untyped λ-calculus over a single sort `exp`: `lam`, `fix` and `ap`.
pub fn lambda_signature() -> Signature {
    let exp = Sort::new("exp");
    let body = Valence::new(vec![], vec![exp.clone()], exp.clone());
    declare_signature(
        vec![exp.clone()],
        vec![
            OperatorDecl::new("lam", vec![], Arity::new(vec![body.clone()], exp.clone())),
            OperatorDecl::new("fix", vec![], Arity::new(vec![body], exp.clone())),
            OperatorDecl::new(
                "ap",
                vec![],
                Arity::new(vec![Valence::plain(exp.clone()), Valence::plain(exp.clone())], exp),
            ),
        ],
    )
    .expect("λ-calculus signature is well formed")
}

/// The λ-calculus extended with assignables: `decl`, `get[u]` and `set[u]`.
pub fn assignables_signature() -> Signature {
    let exp = Sort::new("exp");
    lambda_signature()
        .extend(
            vec![],
            vec![
                OperatorDecl::new(
                    "decl",
                    vec![],
                    Arity::new(
                        vec![Valence::plain(exp.clone()), Valence::new(vec![exp.clone()], vec![], exp.clone())],
                        exp.clone(),
                    ),
                ),
                OperatorDecl::new("get", vec![exp.clone()], Arity::new(vec![], exp.clone())),
                OperatorDecl::new("set", vec![exp.clone()], Arity::new(vec![Valence::plain(exp.clone())], exp)),
            ],
        )
        .expect("assignables signature is well formed")
}
