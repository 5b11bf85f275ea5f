//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use nominal_abt::algebra::{free_syms, free_vars, rename_symbols, subst};
use nominal_abt::contexts::{MetaCtx, Renaming, SymbolCtx, VarCtx};
use nominal_abt::name::{Name, Sort};
use nominal_abt::signature::{declare_signature, Arity, OperatorDecl, OperatorInst, Signature, Valence};
use nominal_abt::term::{Abstraction, Term};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub mod golden;
pub mod laws;
pub mod oracle;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const VAR_POOL: &[&str] = &["x", "y", "z", "w"];
pub const SYM_POOL: &[&str] = &["u", "v", "w", "a"];
pub const META_POOL: &[&str] = &["m", "n"];

pub fn sorts() -> [Sort; 2] {
    [Sort::new("s"), Sort::new("t")]
}

fn pick_sort(rng: &mut ChaCha8Rng) -> Sort {
    sorts()[rng.gen_range(0..2)].clone()
}

fn sort_list(rng: &mut ChaCha8Rng, max: usize) -> Vec<Sort> {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| pick_sort(rng)).collect()
}

pub fn random_valence(rng: &mut ChaCha8Rng) -> Valence {
    Valence::new(sort_list(rng, 2), sort_list(rng, 2), pick_sort(rng))
}

/// Two sorts `s, t`. Every sort gets a constant, a symbol-indexed leaf and a
/// binder; a handful of random operators with symbol parameters follow.
pub fn random_signature(rng: &mut ChaCha8Rng) -> Signature {
    let mut ops = Vec::new();
    for s in sorts() {
        let name = s.as_str().to_string();
        ops.push(OperatorDecl::new(format!("c{name}"), vec![], Arity::new(vec![], s.clone())));
        ops.push(OperatorDecl::new(format!("at{name}"), vec![s.clone()], Arity::new(vec![], s.clone())));
        let body = Valence::new(vec![pick_sort(rng)], vec![pick_sort(rng)], s.clone());
        ops.push(OperatorDecl::new(format!("bind{name}"), vec![], Arity::new(vec![body], s.clone())));
    }
    let extra = rng.gen_range(2..=5);
    for i in 0..extra {
        let params = sort_list(rng, 2);
        let n_args = rng.gen_range(1..=3);
        let valences = (0..n_args).map(|_| random_valence(rng)).collect();
        ops.push(OperatorDecl::new(format!("op{i}"), params, Arity::new(valences, pick_sort(rng))));
    }
    declare_signature(sorts().to_vec(), ops).expect("generated signature is valid")
}

pub fn random_ctx(rng: &mut ChaCha8Rng, pool: &[&str], max: usize) -> SymbolCtx {
    let mut names: Vec<&str> = pool.to_vec();
    names.shuffle(rng);
    let n = rng.gen_range(0..=max.min(names.len()));
    SymbolCtx::from_bindings(names[..n].iter().map(|u| (*u, pick_sort(rng)))).unwrap()
}

pub fn random_meta_ctx(rng: &mut ChaCha8Rng, max: usize) -> MetaCtx {
    let n = rng.gen_range(0..=max);
    MetaCtx::from_bindings(META_POOL[..n].iter().map(|m| (*m, random_valence(rng)))).unwrap()
}

/// Contexts and a signature to generate in.
#[derive(Clone)]
pub struct Scope {
    pub sig: Signature,
    pub theta: MetaCtx,
    pub syms: SymbolCtx,
    pub vars: VarCtx,
}

impl Scope {
    pub fn random(rng: &mut ChaCha8Rng) -> Scope {
        Scope {
            sig: random_signature(rng),
            theta: random_meta_ctx(rng, 2),
            syms: random_ctx(rng, SYM_POOL, 3),
            vars: random_ctx(rng, VAR_POOL, 3),
        }
    }
}

fn names_of_sort<'a>(ctx: &'a SymbolCtx, sort: &Sort) -> Vec<&'a Name> {
    ctx.iter().filter(|(_, s)| *s == sort).map(|(n, _)| n).collect()
}

fn fill_params(rng: &mut ChaCha8Rng, syms: &SymbolCtx, sorts: &[Sort]) -> Option<Vec<Name>> {
    sorts
        .iter()
        .map(|s| names_of_sort(syms, s).choose(rng).map(|n| (*n).clone()))
        .collect()
}

fn binders(rng: &mut ChaCha8Rng, pool: &[&str], sorts: &[Sort]) -> Vec<(Name, Sort)> {
    let mut names: Vec<&str> = pool.to_vec();
    names.shuffle(rng);
    sorts.iter().zip(names).map(|(s, n)| (Name::from(n), s.clone())).collect()
}

/// A term of sort `sort` that checks in `scope`, of depth at most `depth`.
pub fn gen_term(rng: &mut ChaCha8Rng, scope: &Scope, sort: &Sort, depth: usize) -> Term {
    gen_in(rng, &scope.sig, &scope.theta, &scope.syms, &scope.vars, sort, depth)
}

fn gen_in(
    rng: &mut ChaCha8Rng,
    sig: &Signature,
    theta: &MetaCtx,
    syms: &SymbolCtx,
    vars: &VarCtx,
    sort: &Sort,
    depth: usize,
) -> Term {
    let vs = names_of_sort(vars, sort);
    if depth == 0 || rng.gen_bool(0.2) {
        if !vs.is_empty() && rng.gen_bool(0.6) {
            return Term::Var((*vs.choose(rng).unwrap()).clone());
        }
        let leaf = format!("at{}", sort.as_str());
        if let Some(params) = fill_params(rng, syms, std::slice::from_ref(sort)) {
            if rng.gen_bool(0.5) {
                return Term::op(OperatorInst::new(sig.operator(&leaf).unwrap().clone(), params), vec![]);
            }
        }
        let c = format!("c{}", sort.as_str());
        return Term::op(OperatorInst::new(sig.operator(&c).unwrap().clone(), vec![]), vec![]);
    }
    // metavariable occurrence
    let metas: Vec<(&Name, &Valence)> = theta.iter().filter(|(_, v)| &v.target == sort).collect();
    if !metas.is_empty() && rng.gen_bool(0.25) {
        let (m, v) = *metas.choose(rng).unwrap();
        if let Some(params) = fill_params(rng, syms, &v.symbols) {
            let args = v.vars.iter().map(|s| gen_in(rng, sig, theta, syms, vars, s, depth - 1)).collect();
            return Term::meta(m.clone(), params, args);
        }
    }
    let candidates: Vec<_> = sig
        .operators()
        .filter(|d| &d.arity.target == sort && !d.arity.valences.is_empty())
        .filter(|d| fill_params(rng, syms, &d.params).is_some())
        .cloned()
        .collect();
    let decl = candidates.choose(rng).expect("every sort has a binder").clone();
    let params = fill_params(rng, syms, &decl.params).unwrap();
    let args = decl.arity.valences.iter().map(|v| gen_abs_in(rng, sig, theta, syms, vars, v, depth - 1)).collect();
    Term::op(OperatorInst::new(decl, params), args)
}

/// An abstraction of valence `v`; binder names are drawn from the pools and
/// may shadow outer bindings.
pub fn gen_abs(rng: &mut ChaCha8Rng, scope: &Scope, v: &Valence, depth: usize) -> Abstraction {
    gen_abs_in(rng, &scope.sig, &scope.theta, &scope.syms, &scope.vars, v, depth)
}

fn gen_abs_in(
    rng: &mut ChaCha8Rng,
    sig: &Signature,
    theta: &MetaCtx,
    syms: &SymbolCtx,
    vars: &VarCtx,
    v: &Valence,
    depth: usize,
) -> Abstraction {
    let bs = binders(rng, SYM_POOL, &v.symbols);
    let bx = binders(rng, VAR_POOL, &v.vars);
    let mut inner_syms = syms.clone();
    for (u, s) in &bs {
        inner_syms = inner_syms.shadow(u.clone(), s.clone());
    }
    let mut inner_vars = vars.clone();
    for (x, s) in &bx {
        inner_vars = inner_vars.shadow(x.clone(), s.clone());
    }
    let body = gen_in(rng, sig, theta, &inner_syms, &inner_vars, &v.target, depth);
    Abstraction::new(bs, bx, body)
}

/// A random injective sort-preserving renaming out of `dom`, into a context
/// drawn from a slightly larger pool so images often collide with binders.
pub fn random_renaming(rng: &mut ChaCha8Rng, dom: &SymbolCtx) -> Renaming {
    let mut pool: Vec<&str> = SYM_POOL.iter().copied().chain(["b", "c"]).collect();
    pool.shuffle(rng);
    let pairs: Vec<(Name, Name)> = dom.names().cloned().zip(pool.iter().map(|s| Name::from(*s))).collect();
    let mut cod = SymbolCtx::empty();
    for ((_, sigma), (_, target)) in dom.iter().zip(&pairs) {
        cod = cod.shadow(target.clone(), sigma.clone());
    }
    // a few extra unused codomain names
    for extra in pool.iter().skip(dom.len()).take(rng.gen_range(0..=2)) {
        cod = cod.shadow(Name::from(*extra), pick_sort(rng));
    }
    Renaming::new(dom.clone(), cod, pairs).unwrap()
}

/// Renames bound names at random, keeping the α-class.
pub fn alpha_variant(rng: &mut ChaCha8Rng, m: &Term) -> Term {
    match m {
        Term::Var(_) => m.clone(),
        Term::Meta { name, params, args } => Term::Meta {
            name: name.clone(),
            params: params.clone(),
            args: args.iter().map(|a| alpha_variant(rng, a)).collect(),
        },
        Term::Op { inst, args } => {
            Term::Op { inst: inst.clone(), args: args.iter().map(|e| alpha_variant_abs(rng, e)).collect() }
        }
    }
}

pub fn alpha_variant_abs(rng: &mut ChaCha8Rng, e: &Abstraction) -> Abstraction {
    let mut body = alpha_variant(rng, &e.body);
    let mut symbols = e.symbols.clone();
    let pool: Vec<&str> = SYM_POOL.iter().chain(VAR_POOL).copied().chain(["p", "q"]).collect();
    for i in 0..symbols.len() {
        let old = symbols[i].0.clone();
        let fs = free_syms(&body);
        let taken = |n: &str| symbols.iter().any(|(s, _)| s.as_str() == n) || (fs.contains(n) && n != old.as_str());
        let options: Vec<&str> = pool.iter().copied().filter(|n| !taken(n)).collect();
        if let Some(new) = options.choose(rng) {
            let map: BTreeMap<Name, Name> = [(old.clone(), Name::from(*new))].into();
            body = rename_symbols(&body, &map);
            symbols[i].0 = Name::from(*new);
        }
    }
    let mut vars = e.vars.clone();
    for i in 0..vars.len() {
        let old = vars[i].0.clone();
        let fv = free_vars(&body);
        let taken = |n: &str| vars.iter().any(|(s, _)| s.as_str() == n) || (fv.contains(n) && n != old.as_str());
        let options: Vec<&str> = pool.iter().copied().filter(|n| !taken(n)).collect();
        if let Some(new) = options.choose(rng) {
            body = subst(&Term::var(*new), &old, &body);
            vars[i].0 = Name::from(*new);
        }
    }
    Abstraction::new(symbols, vars, body)
}
