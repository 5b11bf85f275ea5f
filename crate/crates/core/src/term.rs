//! Abstract binding trees, their sorting judgments and α-equivalence.
//!
//! Terms carry explicit names. Binders record the sorts they bind, so an
//! abstraction can be checked against a valence without consulting the
//! operator it sits under.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::contexts::{MetaCtx, SymbolCtx, VarCtx};
use crate::name::{Name, Sort};
use crate::signature::{check_operator, OperatorDecl, OperatorInst, Signature, SignatureError, Valence};

#[derive(Clone, PartialEq, Eq)]
pub enum Term {
    Var(Name),
    /// `m{u⃗}(M⃗)`.
    Meta { name: Name, params: Vec<Name>, args: Vec<Term> },
    /// `ϑ(E⃗)`.
    Op { inst: OperatorInst, args: Vec<Abstraction> },
}

/// `ℵ{u⃗}[x⃗].M`.
#[derive(Clone, PartialEq, Eq)]
pub struct Abstraction {
    pub symbols: Vec<(Name, Sort)>,
    pub vars: Vec<(Name, Sort)>,
    pub body: Term,
}

impl Term {
    pub fn var(x: impl Into<Name>) -> Term {
        Term::Var(x.into())
    }

    pub fn meta(name: impl Into<Name>, params: Vec<Name>, args: Vec<Term>) -> Term {
        Term::Meta { name: name.into(), params, args }
    }

    pub fn op(inst: OperatorInst, args: Vec<Abstraction>) -> Term {
        Term::Op { inst, args }
    }

    /// Number of nodes, abstractions included.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Meta { args, .. } => 1 + args.iter().map(Term::size).sum::<usize>(),
            Term::Op { args, .. } => 1 + args.iter().map(|e| 1 + e.body.size()).sum::<usize>(),
        }
    }

    /// The subterm reached by following `path`, if any.
    pub fn at(&self, path: &Path) -> Option<&Term> {
        let mut t = self;
        for step in &path.0 {
            t = match t {
                Term::Var(_) => return None,
                Term::Meta { args, .. } => args.get(step.index)?,
                Term::Op { args, .. } => &args.get(step.index)?.body,
            };
        }
        Some(t)
    }
}

impl Abstraction {
    pub fn new(symbols: Vec<(Name, Sort)>, vars: Vec<(Name, Sort)>, body: Term) -> Abstraction {
        Abstraction { symbols, vars, body }
    }

    /// `.M`, binding nothing.
    pub fn bare(body: Term) -> Abstraction {
        Abstraction { symbols: Vec::new(), vars: Vec::new(), body }
    }

    pub fn binds_nothing(&self) -> bool {
        self.symbols.is_empty() && self.vars.is_empty()
    }

    /// The valence this abstraction would have if its body had sort `target`.
    pub fn valence(&self, target: Sort) -> Valence {
        Valence::new(
            self.symbols.iter().map(|(_, s)| s.clone()).collect(),
            self.vars.iter().map(|(_, s)| s.clone()).collect(),
            target,
        )
    }
}

/// One step into a term: argument `index` of the node headed by `head`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub head: Name,
    pub index: usize,
}

/// A trail of steps from the root to a subterm, printed `ap.0/lam.0`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(pub Vec<Step>);

impl Path {
    pub fn root() -> Path {
        Path(Vec::new())
    }

    pub fn child(&self, head: &Name, index: usize) -> Path {
        let mut steps = self.0.clone();
        steps.push(Step { head: head.clone(), index });
        Path(steps)
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("<root>");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            write!(f, "{}.{}", s.head, s.index)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("unbound variable `{name}` at {path}")]
    UnboundVariable { name: Name, path: Path },
    #[error("unbound metavariable `{name}` at {path}")]
    UnboundMetavariable { name: Name, path: Path },
    #[error("unbound symbol `{name}` at {path}")]
    UnboundSymbol { name: Name, path: Path },
    #[error("expected sort {expected}, found {found} at {path}")]
    SortMismatch { expected: Sort, found: Sort, path: Path },
    #[error("expected {expected} {what}, found {found} at {path}")]
    ArityMismatch { what: &'static str, expected: usize, found: usize, path: Path },
    #[error("binder `{name}` occurs twice in one abstraction at {path}")]
    DuplicateBinder { name: Name, path: Path },
    #[error("expected an abstraction of valence {expected}, found one of valence {found} at {path}")]
    ValenceMismatch { expected: Box<Valence>, found: Box<Valence>, path: Path },
    #[error("{error} at {path}")]
    Operator { error: SignatureError, path: Path },
}

impl CheckError {
    pub fn path(&self) -> &Path {
        match self {
            CheckError::UnboundVariable { path, .. }
            | CheckError::UnboundMetavariable { path, .. }
            | CheckError::UnboundSymbol { path, .. }
            | CheckError::SortMismatch { path, .. }
            | CheckError::ArityMismatch { path, .. }
            | CheckError::DuplicateBinder { path, .. }
            | CheckError::ValenceMismatch { path, .. }
            | CheckError::Operator { path, .. } => path,
        }
    }
}

/// `Θ ▷ Υ ‖ Γ ⊢ M : τ`, returning `τ`.
pub fn check(sig: &Signature, theta: &MetaCtx, syms: &SymbolCtx, vars: &VarCtx, m: &Term) -> Result<Sort, CheckError> {
    Checker { sig, theta }.term(syms, vars, m, &Path::root())
}

/// `Θ ▷ Υ ‖ Γ ⊢ E : v`, returning `v`.
pub fn check_abs(
    sig: &Signature,
    theta: &MetaCtx,
    syms: &SymbolCtx,
    vars: &VarCtx,
    e: &Abstraction,
) -> Result<Valence, CheckError> {
    Checker { sig, theta }.abs(syms, vars, e, &Path::root())
}

/// Checks `M` against an expected sort.
pub fn check_against(
    sig: &Signature,
    theta: &MetaCtx,
    syms: &SymbolCtx,
    vars: &VarCtx,
    m: &Term,
    sort: &Sort,
) -> Result<(), CheckError> {
    let found = check(sig, theta, syms, vars, m)?;
    if &found != sort {
        return Err(CheckError::SortMismatch { expected: sort.clone(), found, path: Path::root() });
    }
    Ok(())
}

struct Checker<'a> {
    sig: &'a Signature,
    theta: &'a MetaCtx,
}

impl Checker<'_> {
    fn term(&self, syms: &SymbolCtx, vars: &VarCtx, m: &Term, path: &Path) -> Result<Sort, CheckError> {
        match m {
            Term::Var(x) => vars
                .get(x.as_str())
                .cloned()
                .ok_or_else(|| CheckError::UnboundVariable { name: x.clone(), path: path.clone() }),
            Term::Meta { name, params, args } => {
                let valence = self
                    .theta
                    .get(name.as_str())
                    .ok_or_else(|| CheckError::UnboundMetavariable { name: name.clone(), path: path.clone() })?;
                if params.len() != valence.symbols.len() {
                    return Err(CheckError::ArityMismatch {
                        what: "symbol parameter(s)",
                        expected: valence.symbols.len(),
                        found: params.len(),
                        path: path.clone(),
                    });
                }
                for (u, sigma) in params.iter().zip(&valence.symbols) {
                    let found = syms
                        .get(u.as_str())
                        .ok_or_else(|| CheckError::UnboundSymbol { name: u.clone(), path: path.clone() })?;
                    if found != sigma {
                        return Err(CheckError::SortMismatch {
                            expected: sigma.clone(),
                            found: found.clone(),
                            path: path.clone(),
                        });
                    }
                }
                if args.len() != valence.vars.len() {
                    return Err(CheckError::ArityMismatch {
                        what: "argument(s)",
                        expected: valence.vars.len(),
                        found: args.len(),
                        path: path.clone(),
                    });
                }
                for (i, (arg, tau)) in args.iter().zip(&valence.vars).enumerate() {
                    let sub = path.child(name, i);
                    let found = self.term(syms, vars, arg, &sub)?;
                    if &found != tau {
                        return Err(CheckError::SortMismatch { expected: tau.clone(), found, path: sub });
                    }
                }
                Ok(valence.target.clone())
            }
            Term::Op { inst, args } => {
                let arity = check_operator(self.sig, syms, inst).map_err(|error| match error {
                    SignatureError::UnboundSymbol(name) => CheckError::UnboundSymbol { name, path: path.clone() },
                    error => CheckError::Operator { error, path: path.clone() },
                })?;
                if args.len() != arity.valences.len() {
                    return Err(CheckError::ArityMismatch {
                        what: "argument(s)",
                        expected: arity.valences.len(),
                        found: args.len(),
                        path: path.clone(),
                    });
                }
                for (i, (arg, expected)) in args.iter().zip(&arity.valences).enumerate() {
                    let sub = path.child(inst.name(), i);
                    let found = self.abs(syms, vars, arg, &sub)?;
                    if &found != expected {
                        if found.symbols == expected.symbols && found.vars == expected.vars {
                            return Err(CheckError::SortMismatch {
                                expected: expected.target.clone(),
                                found: found.target,
                                path: sub,
                            });
                        }
                        return Err(CheckError::ValenceMismatch { expected: Box::new(expected.clone()), found: Box::new(found), path: sub });
                    }
                }
                Ok(arity.target.clone())
            }
        }
    }

    fn abs(&self, syms: &SymbolCtx, vars: &VarCtx, e: &Abstraction, path: &Path) -> Result<Valence, CheckError> {
        let (syms, vars) = extend_for_binder(syms, vars, e, path)?;
        let target = self.term(&syms, &vars, &e.body, path)?;
        Ok(e.valence(target))
    }
}

/// The contexts under `e`'s binders. A binder that collides with an outer
/// binding shadows it, which is the same as renaming the binder apart.
pub(crate) fn extend_for_binder(
    syms: &SymbolCtx,
    vars: &VarCtx,
    e: &Abstraction,
    path: &Path,
) -> Result<(SymbolCtx, VarCtx), CheckError> {
    let mut syms = syms.clone();
    for (i, (u, sigma)) in e.symbols.iter().enumerate() {
        if e.symbols[..i].iter().any(|(w, _)| w == u) {
            return Err(CheckError::DuplicateBinder { name: u.clone(), path: path.clone() });
        }
        syms = syms.shadow(u.clone(), sigma.clone());
    }
    let mut vars = vars.clone();
    for (i, (x, tau)) in e.vars.iter().enumerate() {
        if e.vars[..i].iter().any(|(y, _)| y == x) {
            return Err(CheckError::DuplicateBinder { name: x.clone(), path: path.clone() });
        }
        vars = vars.shadow(x.clone(), tau.clone());
    }
    Ok((syms, vars))
}

/// A term together with the contexts and sort of a derivation for it.
#[derive(Clone, PartialEq, Eq)]
pub struct SortedTerm {
    meta: MetaCtx,
    syms: SymbolCtx,
    vars: VarCtx,
    term: Term,
    sort: Sort,
}

impl SortedTerm {
    pub fn new(sig: &Signature, meta: MetaCtx, syms: SymbolCtx, vars: VarCtx, term: Term) -> Result<Self, CheckError> {
        let sort = check(sig, &meta, &syms, &vars, &term)?;
        Ok(SortedTerm { meta, syms, vars, term, sort })
    }

    pub fn meta(&self) -> &MetaCtx {
        &self.meta
    }

    pub fn syms(&self) -> &SymbolCtx {
        &self.syms
    }

    pub fn vars(&self) -> &VarCtx {
        &self.vars
    }

    pub fn term(&self) -> &Term {
        &self.term
    }

    pub fn sort(&self) -> &Sort {
        &self.sort
    }

    pub fn into_term(self) -> Term {
        self.term
    }
}

impl fmt::Debug for SortedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ▷ {} ‖ {} ⊢ {:?} : {}", self.meta, self.syms, self.vars, self.term, self.sort)
    }
}

/// A bound occurrence: `depth` abstractions outward, binder `slot` there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub depth: usize,
    pub slot: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CanonName {
    Free(Name),
    Bound(Coord),
}

/// A term with bound names replaced by binder coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CanonicalTerm {
    Var(CanonName),
    Meta { name: Name, params: Vec<CanonName>, args: Vec<CanonicalTerm> },
    Op { decl: Arc<OperatorDecl>, params: Vec<CanonName>, args: Vec<CanonicalAbs> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalAbs {
    pub symbols: Vec<Sort>,
    pub vars: Vec<Sort>,
    pub body: CanonicalTerm,
}

/// Replaces every bound symbol and variable by its binder's coordinates.
/// Every abstraction counts towards depth, including ones that bind nothing.
pub fn canonicalize(m: &Term) -> CanonicalTerm {
    canon_term(m, &mut Vec::new())
}

type Scope<'a> = (&'a [(Name, Sort)], &'a [(Name, Sort)]);

fn lookup(scopes: &[Scope<'_>], name: &Name, symbol: bool) -> CanonName {
    for (depth, (syms, vars)) in scopes.iter().rev().enumerate() {
        let group = if symbol { syms } else { vars };
        // the last binder of a repeated name wins, as with shadowing
        if let Some(slot) = group.iter().rposition(|(n, _)| n == name) {
            return CanonName::Bound(Coord { depth, slot });
        }
    }
    CanonName::Free(name.clone())
}

fn canon_term<'a>(m: &'a Term, scopes: &mut Vec<Scope<'a>>) -> CanonicalTerm {
    match m {
        Term::Var(x) => CanonicalTerm::Var(lookup(scopes, x, false)),
        Term::Meta { name, params, args } => CanonicalTerm::Meta {
            name: name.clone(),
            params: params.iter().map(|u| lookup(scopes, u, true)).collect(),
            args: args.iter().map(|a| canon_term(a, scopes)).collect(),
        },
        Term::Op { inst, args } => CanonicalTerm::Op {
            decl: inst.decl.clone(),
            params: inst.params.iter().map(|u| lookup(scopes, u, true)).collect(),
            args: args
                .iter()
                .map(|e| {
                    scopes.push((&e.symbols, &e.vars));
                    let body = canon_term(&e.body, scopes);
                    scopes.pop();
                    CanonicalAbs {
                        symbols: e.symbols.iter().map(|(_, s)| s.clone()).collect(),
                        vars: e.vars.iter().map(|(_, s)| s.clone()).collect(),
                        body,
                    }
                })
                .collect(),
        },
    }
}

/// Whether `m` and `n` differ only in the names of bound symbols and
/// variables.
pub fn alpha_eq(m: &Term, n: &Term) -> bool {
    canonicalize(m) == canonicalize(n)
}

/// [`alpha_eq`] on abstractions.
pub fn alpha_eq_abs(e: &Abstraction, f: &Abstraction) -> bool {
    let wrap = |e: &Abstraction| {
        let decl = Arc::new(OperatorDecl::new(
            "",
            vec![],
            crate::signature::Arity::new(vec![e.valence(Sort::new(""))], Sort::new("")),
        ));
        Term::op(OperatorInst::new(decl, vec![]), vec![e.clone()])
    };
    alpha_eq(&wrap(e), &wrap(f))
}

impl fmt::Display for CanonName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CanonName::Free(n) => write!(f, "{n}"),
            CanonName::Bound(c) => write!(f, "⟨{},{}⟩", c.depth, c.slot),
        }
    }
}

fn list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, open: &str, items: &[T], close: &str) -> fmt::Result {
    f.write_str(open)?;
    for (i, t) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{t}")?;
    }
    f.write_str(close)
}

/// Prints `lam([•].⟨0,0⟩)`: binders as `•`, bound names as coordinates.
impl fmt::Display for CanonicalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CanonicalTerm::Var(x) => write!(f, "{x}"),
            CanonicalTerm::Meta { name, params, args } => {
                write!(f, "{name}")?;
                if !params.is_empty() {
                    list(f, "{", params, "}")?;
                }
                if !args.is_empty() {
                    list(f, "(", args, ")")?;
                }
                Ok(())
            }
            CanonicalTerm::Op { decl, params, args } => {
                write!(f, "{}", decl.name)?;
                if !params.is_empty() {
                    list(f, "[", params, "]")?;
                }
                if !args.is_empty() {
                    list(f, "(", args, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for CanonicalAbs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dots = |n: usize| vec!["•"; n];
        if !self.symbols.is_empty() {
            list(f, "{", &dots(self.symbols.len()), "}")?;
        }
        if !self.vars.is_empty() {
            list(f, "[", &dots(self.vars.len()), "]")?;
        }
        if !self.symbols.is_empty() || !self.vars.is_empty() {
            f.write_str(".")?;
        }
        write!(f, "{}", self.body)
    }
}
