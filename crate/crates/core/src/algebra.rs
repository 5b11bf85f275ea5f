//! Free names, renaming, substitution and interpretation.
//!
//! Every operation returns a representative of an α-class. Binders are
//! renamed apart only when they would capture something, using
//! [`fresh_avoiding`], so results are deterministic.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::contexts::{MetaCtx, Renaming, SymbolCtx, VarCtx};
use crate::name::{fresh_avoiding, Name};
use crate::signature::{Signature, Valence};
use crate::term::{check_abs, Abstraction, CheckError, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("symbol `{0}` is not in the renaming's domain")]
    SymbolNotInDomain(Name),
    #[error("variable `{0}` is substituted twice")]
    DuplicateTarget(Name),
    #[error("expected an abstraction of valence {expected}, found {found}")]
    ValenceMismatch { expected: String, found: String },
    #[error("metavariable `{0}` is not bound")]
    UnboundMetavariable(Name),
    #[error("the environment has no entry for `{0}`")]
    IncompleteEnvironment(Name),
    #[error("the symbol part of the environment is not a renaming: {0}")]
    NotARenaming(String),
    #[error(transparent)]
    Check(#[from] CheckError),
}

/// `FV(M)`.
pub fn free_vars(m: &Term) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    collect_fv(m, &mut Vec::new(), &mut out);
    out
}

fn collect_fv<'a>(m: &'a Term, bound: &mut Vec<&'a Name>, out: &mut BTreeSet<Name>) {
    match m {
        Term::Var(x) => {
            if !bound.contains(&x) {
                out.insert(x.clone());
            }
        }
        Term::Meta { args, .. } => args.iter().for_each(|a| collect_fv(a, bound, out)),
        Term::Op { args, .. } => {
            for e in args {
                let mark = bound.len();
                bound.extend(e.vars.iter().map(|(x, _)| x));
                collect_fv(&e.body, bound, out);
                bound.truncate(mark);
            }
        }
    }
}

/// `FS(M)`: metavariable parameters and operator supports, minus bound
/// symbols.
pub fn free_syms(m: &Term) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    collect_fs(m, &mut Vec::new(), &mut out);
    out
}

fn collect_fs<'a>(m: &'a Term, bound: &mut Vec<&'a Name>, out: &mut BTreeSet<Name>) {
    let mut add = |u: &'a Name, bound: &Vec<&'a Name>| {
        if !bound.contains(&u) {
            out.insert(u.clone());
        }
    };
    match m {
        Term::Var(_) => {}
        Term::Meta { params, args, .. } => {
            params.iter().for_each(|u| add(u, bound));
            args.iter().for_each(|a| collect_fs(a, bound, out));
        }
        Term::Op { inst, args } => {
            inst.params.iter().for_each(|u| add(u, bound));
            for e in args {
                let mark = bound.len();
                bound.extend(e.symbols.iter().map(|(u, _)| u));
                collect_fs(&e.body, bound, out);
                bound.truncate(mark);
            }
        }
    }
}

/// `FV(E)`.
pub fn free_vars_abs(e: &Abstraction) -> BTreeSet<Name> {
    let mut fv = free_vars(&e.body);
    for (x, _) in &e.vars {
        fv.remove(x);
    }
    fv
}

/// `FS(E)`.
pub fn free_syms_abs(e: &Abstraction) -> BTreeSet<Name> {
    let mut fs = free_syms(&e.body);
    for (u, _) in &e.symbols {
        fs.remove(u);
    }
    fs
}

/// Metavariables occurring in `M`.
pub fn metavariables(m: &Term) -> BTreeSet<Name> {
    fn go(m: &Term, out: &mut BTreeSet<Name>) {
        match m {
            Term::Var(_) => {}
            Term::Meta { name, args, .. } => {
                out.insert(name.clone());
                args.iter().for_each(|a| go(a, out));
            }
            Term::Op { args, .. } => args.iter().for_each(|e| go(&e.body, out)),
        }
    }
    let mut out = BTreeSet::new();
    go(m, &mut out);
    out
}

/// `M·ρ`: renames the free symbols of `M` along `ρ`.
pub fn rename(m: &Term, rho: &Renaming) -> Result<Term, AlgebraError> {
    if let Some(u) = free_syms(m).into_iter().find(|u| rho.apply(u.as_str()).is_none()) {
        return Err(AlgebraError::SymbolNotInDomain(u));
    }
    Ok(rename_symbols(m, rho.map()))
}

/// [`rename`] on an abstraction.
pub fn rename_abs(e: &Abstraction, rho: &Renaming) -> Result<Abstraction, AlgebraError> {
    if let Some(u) = free_syms_abs(e).into_iter().find(|u| rho.apply(u.as_str()).is_none()) {
        return Err(AlgebraError::SymbolNotInDomain(u));
    }
    Ok(rename_symbols_abs(e, rho.map()))
}

/// Renames free symbols along a finite map, leaving symbols outside its
/// domain fixed. The map need not be injective. Binders that would capture
/// an image are renamed apart first.
pub fn rename_symbols(m: &Term, map: &BTreeMap<Name, Name>) -> Term {
    if map.is_empty() {
        return m.clone();
    }
    match m {
        Term::Var(_) => m.clone(),
        Term::Meta { name, params, args } => Term::Meta {
            name: name.clone(),
            params: params.iter().map(|u| map.get(u).unwrap_or(u).clone()).collect(),
            args: args.iter().map(|a| rename_symbols(a, map)).collect(),
        },
        Term::Op { inst, args } => Term::Op {
            inst: inst.map_params(|u| map.get(u).cloned()),
            args: args.iter().map(|e| rename_symbols_abs(e, map)).collect(),
        },
    }
}

pub fn rename_symbols_abs(e: &Abstraction, map: &BTreeMap<Name, Name>) -> Abstraction {
    if e.symbols.is_empty() {
        return Abstraction { symbols: Vec::new(), vars: e.vars.clone(), body: rename_symbols(&e.body, map) };
    }
    // ρ \ u⃗
    let mut inner: BTreeMap<Name, Name> =
        map.iter().filter(|(k, _)| !e.symbols.iter().any(|(u, _)| u == *k)).map(|(k, v)| (k.clone(), v.clone())).collect();
    let image: BTreeSet<Name> = inner.values().cloned().collect();
    let mut blocked: BTreeSet<Name> = image.iter().chain(inner.keys()).cloned().collect();
    blocked.extend(free_syms(&e.body));
    blocked.extend(e.symbols.iter().map(|(u, _)| u.clone()));
    let mut symbols = Vec::with_capacity(e.symbols.len());
    for (u, sigma) in &e.symbols {
        if image.contains(u) {
            let fresh = fresh_avoiding(u, &blocked);
            blocked.insert(fresh.clone());
            inner.insert(u.clone(), fresh.clone());
            symbols.push((fresh, sigma.clone()));
        } else {
            symbols.push((u.clone(), sigma.clone()));
        }
    }
    Abstraction { symbols, vars: e.vars.clone(), body: rename_symbols(&e.body, &inner) }
}

/// `[N/x]M`.
pub fn subst(n: &Term, x: &Name, m: &Term) -> Term {
    let fv_n = free_vars(n);
    let fs_n = free_syms(n);
    Unary { n, x, fv_n: &fv_n, fs_n: &fs_n }.term(m)
}

struct Unary<'a> {
    n: &'a Term,
    x: &'a Name,
    fv_n: &'a BTreeSet<Name>,
    fs_n: &'a BTreeSet<Name>,
}

impl Unary<'_> {
    fn term(&self, m: &Term) -> Term {
        match m {
            // /var₁, /var₂
            Term::Var(y) if y == self.x => self.n.clone(),
            Term::Var(_) => m.clone(),
            // /mvar
            Term::Meta { name, params, args } => Term::Meta {
                name: name.clone(),
                params: params.clone(),
                args: args.iter().map(|a| self.term(a)).collect(),
            },
            // /app
            Term::Op { inst, args } => Term::Op { inst: inst.clone(), args: args.iter().map(|e| self.abs(e)).collect() },
        }
    }

    fn abs(&self, e: &Abstraction) -> Abstraction {
        // /abs₂
        if e.vars.iter().any(|(y, _)| y == self.x) {
            return e.clone();
        }
        // /abs₁, after renaming binders apart from N
        let e = freshen_binders(e, self.fs_n, self.fv_n, &[self.x]);
        Abstraction { body: self.term(&e.body), ..e }
    }
}

/// Renames the binders of `e` that occur in `syms` or `vars`.
/// `extra_vars` are kept clear of the fresh variable names as well.
fn freshen_binders(e: &Abstraction, syms: &BTreeSet<Name>, vars: &BTreeSet<Name>, extra_vars: &[&Name]) -> Abstraction {
    let sym_clash = e.symbols.iter().any(|(u, _)| syms.contains(u));
    let var_clash = e.vars.iter().any(|(y, _)| vars.contains(y));
    if !sym_clash && !var_clash {
        return e.clone();
    }
    let mut body = e.body.clone();
    let mut symbols = e.symbols.clone();
    if sym_clash {
        let mut blocked: BTreeSet<Name> = syms.clone();
        blocked.extend(free_syms(&e.body));
        blocked.extend(e.symbols.iter().map(|(u, _)| u.clone()));
        let mut map = BTreeMap::new();
        for (u, _) in symbols.iter_mut() {
            if syms.contains(u) {
                let fresh = fresh_avoiding(u, &blocked);
                blocked.insert(fresh.clone());
                map.insert(u.clone(), fresh.clone());
                *u = fresh;
            }
        }
        body = rename_symbols(&body, &map);
    }
    let mut var_list = e.vars.clone();
    if var_clash {
        let mut blocked: BTreeSet<Name> = vars.clone();
        blocked.extend(free_vars(&e.body));
        blocked.extend(e.vars.iter().map(|(y, _)| y.clone()));
        blocked.extend(extra_vars.iter().map(|x| (*x).clone()));
        let mut pairs = Vec::new();
        for (y, _) in var_list.iter_mut() {
            if vars.contains(y) {
                let fresh = fresh_avoiding(y, &blocked);
                blocked.insert(fresh.clone());
                pairs.push((y.clone(), Term::Var(fresh.clone())));
                *y = fresh;
            }
        }
        body = simultaneous(&pairs.into_iter().collect(), &body);
    }
    Abstraction { symbols, vars: var_list, body }
}

/// `[N⃗/x⃗]M`. Replacement terms are not scanned again.
pub fn subst_simultaneous(pairs: &[(Name, Term)], m: &Term) -> Result<Term, AlgebraError> {
    let mut map = BTreeMap::new();
    for (x, n) in pairs {
        if map.insert(x.clone(), n.clone()).is_some() {
            return Err(AlgebraError::DuplicateTarget(x.clone()));
        }
    }
    Ok(simultaneous(&map, m))
}

fn simultaneous(map: &BTreeMap<Name, Term>, m: &Term) -> Term {
    if map.is_empty() {
        return m.clone();
    }
    match m {
        Term::Var(y) => map.get(y).cloned().unwrap_or_else(|| m.clone()),
        Term::Meta { name, params, args } => Term::Meta {
            name: name.clone(),
            params: params.clone(),
            args: args.iter().map(|a| simultaneous(map, a)).collect(),
        },
        Term::Op { inst, args } => Term::Op {
            inst: inst.clone(),
            args: args
                .iter()
                .map(|e| {
                    let inner: BTreeMap<Name, Term> = map
                        .iter()
                        .filter(|(x, _)| !e.vars.iter().any(|(y, _)| y == *x))
                        .map(|(x, n)| (x.clone(), n.clone()))
                        .collect();
                    if inner.is_empty() {
                        return e.clone();
                    }
                    let fv: BTreeSet<Name> = inner.values().flat_map(free_vars).collect();
                    let fs: BTreeSet<Name> = inner.values().flat_map(free_syms).collect();
                    let targets: Vec<&Name> = inner.keys().collect();
                    let e = freshen_binders(e, &fs, &fv, &targets);
                    Abstraction { body: simultaneous(&inner, &e.body), ..e }
                })
                .collect(),
        },
    }
}

/// `[E/m]M`, instantiating `E` hereditarily at each occurrence of `m`.
///
/// At an occurrence `m{v⃗}(M⃗)` with `E = ℵ{u⃗}[x⃗].N`, the arguments are
/// substituted into first, then `N` is renamed along `u⃗ ↦ v⃗`, then the
/// results replace `x⃗` simultaneously.
pub fn msubst(e: &Abstraction, m: &Name, term: &Term) -> Result<Term, AlgebraError> {
    let fs_e = free_syms_abs(e);
    let fv_e = free_vars_abs(e);
    Meta { e, m, fs_e: &fs_e, fv_e: &fv_e }.term(term)
}

/// [`msubst`] after checking that `E` has the valence `Θ(m)` in the ambient
/// contexts.
pub fn msubst_checked(
    sig: &Signature,
    theta: &MetaCtx,
    syms: &SymbolCtx,
    vars: &VarCtx,
    e: &Abstraction,
    m: &Name,
    term: &Term,
) -> Result<Term, AlgebraError> {
    let expected = theta.get(m.as_str()).ok_or_else(|| AlgebraError::UnboundMetavariable(m.clone()))?;
    let found = check_abs(sig, theta, syms, vars, e)?;
    if &found != expected {
        return Err(valence_mismatch(expected, &found));
    }
    msubst(e, m, term)
}

fn valence_mismatch(expected: &Valence, found: &Valence) -> AlgebraError {
    AlgebraError::ValenceMismatch { expected: expected.to_string(), found: found.to_string() }
}

struct Meta<'a> {
    e: &'a Abstraction,
    m: &'a Name,
    fs_e: &'a BTreeSet<Name>,
    fv_e: &'a BTreeSet<Name>,
}

impl Meta<'_> {
    fn term(&self, t: &Term) -> Result<Term, AlgebraError> {
        match t {
            // /m_var
            Term::Var(_) => Ok(t.clone()),
            // /m_mvar₁
            Term::Meta { name, params, args } if name == self.m => {
                let args = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
                instantiate(self.e, params, args)
            }
            // /m_mvar₂
            Term::Meta { name, params, args } => Ok(Term::Meta {
                name: name.clone(),
                params: params.clone(),
                args: args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?,
            }),
            // /m_app, /m_abs
            Term::Op { inst, args } => Ok(Term::Op {
                inst: inst.clone(),
                args: args
                    .iter()
                    .map(|a| {
                        let a = freshen_binders(a, self.fs_e, self.fv_e, &[]);
                        Ok(Abstraction { body: self.term(&a.body)?, ..a })
                    })
                    .collect::<Result<_, AlgebraError>>()?,
            }),
        }
    }
}

/// `E` applied to symbol parameters and argument terms.
pub fn instantiate(e: &Abstraction, params: &[Name], args: Vec<Term>) -> Result<Term, AlgebraError> {
    if params.len() != e.symbols.len() || args.len() != e.vars.len() {
        return Err(AlgebraError::ValenceMismatch {
            expected: format!("{} symbol(s) and {} variable(s)", params.len(), args.len()),
            found: format!("{} symbol(s) and {} variable(s)", e.symbols.len(), e.vars.len()),
        });
    }
    let map: BTreeMap<Name, Name> = e.symbols.iter().map(|(u, _)| u.clone()).zip(params.iter().cloned()).collect();
    let body = rename_symbols(&e.body, &map);
    let pairs: Vec<(Name, Term)> = e.vars.iter().map(|(x, _)| x.clone()).zip(args).collect();
    subst_simultaneous(&pairs, &body)
}

/// Values for the metavariables, symbols and variables of a term.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Environment {
    pub meta: BTreeMap<Name, Abstraction>,
    pub syms: BTreeMap<Name, Name>,
    pub vars: BTreeMap<Name, Term>,
}

impl Environment {
    /// Sends every name of the given contexts to itself.
    pub fn identity(theta: &MetaCtx, syms: &SymbolCtx, vars: &VarCtx) -> Environment {
        let meta = theta
            .iter()
            .map(|(m, v)| {
                let symbols: Vec<(Name, _)> =
                    v.symbols.iter().enumerate().map(|(i, s)| (Name::from(format!("u{i}")), s.clone())).collect();
                let xs: Vec<(Name, _)> =
                    v.vars.iter().enumerate().map(|(i, s)| (Name::from(format!("x{i}")), s.clone())).collect();
                let body = Term::meta(
                    m.clone(),
                    symbols.iter().map(|(u, _)| u.clone()).collect(),
                    xs.iter().map(|(x, _)| Term::Var(x.clone())).collect(),
                );
                (m.clone(), Abstraction::new(symbols, xs, body))
            })
            .collect();
        Environment {
            meta,
            syms: syms.names().map(|u| (u.clone(), u.clone())).collect(),
            vars: vars.names().map(|x| (x.clone(), Term::Var(x.clone()))).collect(),
        }
    }
}

/// Interprets `M` in the term model: metavariables are instantiated with
/// their abstractions, free symbols renamed and free variables replaced, all
/// in one pass.
///
/// The environment's terms and abstractions live in the target contexts;
/// `Θ`, `Υ` and `Γ` list the names that must have entries.
pub fn interpret(
    theta: &MetaCtx,
    syms: &SymbolCtx,
    vars: &VarCtx,
    m: &Term,
    env: &Environment,
) -> Result<Term, AlgebraError> {
    for name in theta.names() {
        if !env.meta.contains_key(name) {
            return Err(AlgebraError::IncompleteEnvironment(name.clone()));
        }
    }
    for name in syms.names() {
        if !env.syms.contains_key(name) {
            return Err(AlgebraError::IncompleteEnvironment(name.clone()));
        }
    }
    for name in vars.names() {
        if !env.vars.contains_key(name) {
            return Err(AlgebraError::IncompleteEnvironment(name.clone()));
        }
    }
    let images: BTreeSet<&Name> = syms.names().filter_map(|u| env.syms.get(u)).collect();
    if images.len() != syms.len() {
        return Err(AlgebraError::NotARenaming("two symbols share an image".into()));
    }
    let mut blocked_syms: BTreeSet<Name> = env.syms.values().cloned().collect();
    let mut blocked_vars: BTreeSet<Name> = BTreeSet::new();
    for t in env.vars.values() {
        blocked_syms.extend(free_syms(t));
        blocked_vars.extend(free_vars(t));
    }
    for e in env.meta.values() {
        blocked_syms.extend(free_syms_abs(e));
        blocked_vars.extend(free_vars_abs(e));
    }
    let mut interp = Interp { env, blocked_syms, blocked_vars, syms: env.syms.clone(), vars: env.vars.clone() };
    interp.term(m)
}

struct Interp<'a> {
    env: &'a Environment,
    blocked_syms: BTreeSet<Name>,
    blocked_vars: BTreeSet<Name>,
    syms: BTreeMap<Name, Name>,
    vars: BTreeMap<Name, Term>,
}

impl Interp<'_> {
    fn sym(&self, u: &Name) -> Result<Name, AlgebraError> {
        self.syms.get(u).cloned().ok_or_else(|| AlgebraError::IncompleteEnvironment(u.clone()))
    }

    fn term(&mut self, m: &Term) -> Result<Term, AlgebraError> {
        match m {
            Term::Var(x) => self.vars.get(x).cloned().ok_or_else(|| AlgebraError::IncompleteEnvironment(x.clone())),
            Term::Meta { name, params, args } => {
                let e = self.env.meta.get(name).ok_or_else(|| AlgebraError::IncompleteEnvironment(name.clone()))?;
                let params = params.iter().map(|u| self.sym(u)).collect::<Result<Vec<_>, _>>()?;
                let args = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
                instantiate(e, &params, args)
            }
            Term::Op { inst, args } => {
                let params = inst.params.iter().map(|u| self.sym(u)).collect::<Result<Vec<_>, _>>()?;
                let args = args.iter().map(|e| self.abs(e)).collect::<Result<Vec<_>, _>>()?;
                let mut inst = inst.clone();
                inst.params = params;
                Ok(Term::Op { inst, args })
            }
        }
    }

    fn abs(&mut self, e: &Abstraction) -> Result<Abstraction, AlgebraError> {
        let saved = (self.syms.clone(), self.vars.clone(), self.blocked_syms.clone(), self.blocked_vars.clone());
        let mut symbols = Vec::with_capacity(e.symbols.len());
        for (u, sigma) in &e.symbols {
            let target = if self.blocked_syms.contains(u) { fresh_avoiding(u, &self.blocked_syms) } else { u.clone() };
            self.blocked_syms.insert(target.clone());
            self.syms.insert(u.clone(), target.clone());
            symbols.push((target, sigma.clone()));
        }
        let mut vars = Vec::with_capacity(e.vars.len());
        for (x, tau) in &e.vars {
            let target = if self.blocked_vars.contains(x) { fresh_avoiding(x, &self.blocked_vars) } else { x.clone() };
            self.blocked_vars.insert(target.clone());
            self.vars.insert(x.clone(), Term::Var(target.clone()));
            vars.push((target, tau.clone()));
        }
        let body = self.term(&e.body);
        (self.syms, self.vars, self.blocked_syms, self.blocked_vars) = saved;
        Ok(Abstraction::new(symbols, vars, body?))
    }
}
