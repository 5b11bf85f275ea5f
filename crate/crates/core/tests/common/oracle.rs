//! Brute-force α-equivalence: search every assignment of names to binder
//! slots and accept when one reproduces the other term letter for letter
//! without changing which binder any occurrence refers to.

use std::collections::BTreeMap;

use nominal_abt::contexts::MetaCtx;
use nominal_abt::name::{Name, Sort};
use nominal_abt::signature::{OperatorInst, Signature};
use nominal_abt::syntax::{parse_meta_ctx, parse_signature};
use nominal_abt::term::{Abstraction, Term};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const POOL: &[&str] = &["a", "b", "c", "d"];

/// Assignables plus a three-slot mixed binder and a metavariable.
pub fn corpus_signature() -> (Signature, MetaCtx) {
    let sig = parse_signature(
        "sort exp
         op lam : ([exp].exp) exp
         op fix : ([exp].exp) exp
         op ap : (.exp, .exp) exp
         op decl : (.exp, {exp}.exp) exp
         op get {exp} : () exp
         op set {exp} : (.exp) exp
         op bind : ({exp}[exp, exp].exp) exp",
    )
    .unwrap();
    let theta = parse_meta_ctx("m : {exp}[exp].exp").unwrap();
    (sig, theta)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Link {
    Bound(usize),
    Free(Name),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Sym,
    Var,
}

/// Binder slots in preorder.
fn slots(m: &Term, out: &mut Vec<Kind>) {
    match m {
        Term::Var(_) => {}
        Term::Meta { args, .. } => args.iter().for_each(|a| slots(a, out)),
        Term::Op { args, .. } => {
            for e in args {
                out.extend(e.symbols.iter().map(|_| Kind::Sym));
                out.extend(e.vars.iter().map(|_| Kind::Var));
                slots(&e.body, out);
            }
        }
    }
}

pub fn binder_count(m: &Term) -> usize {
    let mut v = Vec::new();
    slots(m, &mut v);
    v.len()
}

#[derive(Default, Clone)]
struct Scope {
    syms: BTreeMap<Name, usize>,
    vars: BTreeMap<Name, usize>,
}

impl Scope {
    fn sym(&self, u: &Name) -> Link {
        self.syms.get(u).map_or(Link::Free(u.clone()), |i| Link::Bound(*i))
    }
    fn var(&self, x: &Name) -> Link {
        self.vars.get(x).map_or(Link::Free(x.clone()), |i| Link::Bound(*i))
    }
}

/// Every name occurrence, in preorder, resolved to a binder slot or left free.
fn links(m: &Term) -> Vec<Link> {
    fn go(m: &Term, scope: &Scope, next: &mut usize, out: &mut Vec<Link>) {
        match m {
            Term::Var(x) => out.push(scope.var(x)),
            Term::Meta { params, args, .. } => {
                out.extend(params.iter().map(|u| scope.sym(u)));
                args.iter().for_each(|a| go(a, scope, next, out));
            }
            Term::Op { inst, args } => {
                out.extend(inst.params.iter().map(|u| scope.sym(u)));
                for e in args {
                    let mut inner = scope.clone();
                    for (u, _) in &e.symbols {
                        inner.syms.insert(u.clone(), *next);
                        *next += 1;
                    }
                    for (x, _) in &e.vars {
                        inner.vars.insert(x.clone(), *next);
                        *next += 1;
                    }
                    go(&e.body, &inner, next, out);
                }
            }
        }
    }
    let mut out = Vec::new();
    go(m, &Scope::default(), &mut 0, &mut out);
    out
}

/// Gives slot `i` the name `names[i]` and rewrites the occurrences it binds.
/// Capture is not prevented; `links` detects it afterwards.
fn relabel(m: &Term, names: &[Name]) -> Term {
    fn go(m: &Term, names: &[Name], syms: &BTreeMap<Name, Name>, vars: &BTreeMap<Name, Name>, next: &mut usize) -> Term {
        let sym = |u: &Name| syms.get(u).cloned().unwrap_or_else(|| u.clone());
        match m {
            Term::Var(x) => Term::Var(vars.get(x).cloned().unwrap_or_else(|| x.clone())),
            Term::Meta { name, params, args } => Term::Meta {
                name: name.clone(),
                params: params.iter().map(sym).collect(),
                args: args.iter().map(|a| go(a, names, syms, vars, next)).collect(),
            },
            Term::Op { inst, args } => {
                let inst = OperatorInst::new(inst.decl.clone(), inst.params.iter().map(sym).collect());
                let args = args
                    .iter()
                    .map(|e| {
                        let (mut s, mut v) = (syms.clone(), vars.clone());
                        let mut symbols = Vec::new();
                        for (u, sort) in &e.symbols {
                            s.insert(u.clone(), names[*next].clone());
                            symbols.push((names[*next].clone(), sort.clone()));
                            *next += 1;
                        }
                        let mut bound = Vec::new();
                        for (x, sort) in &e.vars {
                            v.insert(x.clone(), names[*next].clone());
                            bound.push((names[*next].clone(), sort.clone()));
                            *next += 1;
                        }
                        Abstraction::new(symbols, bound, go(&e.body, names, &s, &v, next))
                    })
                    .collect();
                Term::Op { inst, args }
            }
        }
    }
    go(m, names, &BTreeMap::new(), &BTreeMap::new(), &mut 0)
}

/// No abstraction binds the same name twice.
pub fn distinct_within_nodes(m: &Term) -> bool {
    match m {
        Term::Var(_) => true,
        Term::Meta { args, .. } => args.iter().all(distinct_within_nodes),
        Term::Op { args, .. } => args.iter().all(|e| {
            let unique = |xs: &[(Name, Sort)]| {
                let mut names: Vec<&Name> = xs.iter().map(|(n, _)| n).collect();
                names.sort();
                names.windows(2).all(|w| w[0] != w[1])
            };
            unique(&e.symbols) && unique(&e.vars) && distinct_within_nodes(&e.body)
        }),
    }
}

/// Renames binder `i` to `names[i]` if doing so keeps every occurrence
/// pointing at the binder it pointed at before.
pub fn scoped_relabel(m: &Term, names: &[Name]) -> Option<Term> {
    let out = relabel(m, names);
    (distinct_within_nodes(&out) && links(&out) == links(m)).then_some(out)
}

fn all_names(m: &Term, out: &mut Vec<Name>) {
    match m {
        Term::Var(x) => out.push(x.clone()),
        Term::Meta { params, args, .. } => {
            out.extend(params.iter().cloned());
            args.iter().for_each(|a| all_names(a, out));
        }
        Term::Op { inst, args } => {
            out.extend(inst.params.iter().cloned());
            for e in args {
                out.extend(e.symbols.iter().chain(&e.vars).map(|(n, _)| n.clone()));
                all_names(&e.body, out);
            }
        }
    }
}

/// True iff some scoping-preserving choice of bound names turns `m` into `n`.
pub fn oracle_alpha_eq(m: &Term, n: &Term) -> bool {
    let mut kinds = Vec::new();
    slots(m, &mut kinds);
    let mut candidates: Vec<Name> = POOL.iter().map(|s| Name::from(*s)).collect();
    all_names(m, &mut candidates);
    all_names(n, &mut candidates);
    candidates.sort();
    candidates.dedup();
    let mut names = vec![Name::from("a"); kinds.len()];
    search(m, n, &candidates, &mut names, 0)
}

fn search(m: &Term, n: &Term, candidates: &[Name], names: &mut Vec<Name>, i: usize) -> bool {
    if i == names.len() {
        return scoped_relabel(m, names).is_some_and(|t| &t == n);
    }
    for c in candidates {
        names[i] = c.clone();
        if search(m, n, candidates, names, i + 1) {
            return true;
        }
    }
    false
}

/// A random term with at most `max_binders` binder slots, every name drawn
/// from `POOL`.
pub fn gen_small(rng: &mut ChaCha8Rng, sig: &Signature, max_binders: usize, depth: usize) -> Term {
    loop {
        let t = gen(rng, sig, depth);
        if binder_count(&t) <= max_binders {
            return t;
        }
    }
}

fn pick(rng: &mut ChaCha8Rng) -> Name {
    Name::from(*POOL.choose(rng).unwrap())
}

fn gen(rng: &mut ChaCha8Rng, sig: &Signature, depth: usize) -> Term {
    let op = |name: &str, params: Vec<Name>, args: Vec<Abstraction>| {
        Term::op(OperatorInst::new(sig.operator(name).unwrap().clone(), params), args)
    };
    let exp = || Sort::new("exp");
    if depth == 0 {
        return match rng.gen_range(0..3) {
            0 => op("get", vec![pick(rng)], vec![]),
            _ => Term::Var(pick(rng)),
        };
    }
    let sub = |rng: &mut ChaCha8Rng| {
        let d = rng.gen_range(0..depth);
        gen(rng, sig, d)
    };
    match rng.gen_range(0..9) {
        0 => Term::Var(pick(rng)),
        1 => op("get", vec![pick(rng)], vec![]),
        2 => {
            let x = pick(rng);
            op("lam", vec![], vec![Abstraction::new(vec![], vec![(x, exp())], sub(rng))])
        }
        3 => {
            let x = pick(rng);
            op("fix", vec![], vec![Abstraction::new(vec![], vec![(x, exp())], sub(rng))])
        }
        4 => op("ap", vec![], vec![Abstraction::bare(sub(rng)), Abstraction::bare(sub(rng))]),
        5 => {
            let u = pick(rng);
            let init = sub(rng);
            op("decl", vec![], vec![Abstraction::bare(init), Abstraction::new(vec![(u, exp())], vec![], sub(rng))])
        }
        6 => {
            let u = pick(rng);
            op("set", vec![u], vec![Abstraction::bare(sub(rng))])
        }
        7 => {
            let u = pick(rng);
            let mut xs: Vec<&str> = POOL.to_vec();
            xs.shuffle(rng);
            let vars = vec![(Name::from(xs[0]), exp()), (Name::from(xs[1]), exp())];
            op("bind", vec![], vec![Abstraction::new(vec![(u, exp())], vars, sub(rng))])
        }
        _ => {
            let u = pick(rng);
            Term::meta("m", vec![u], vec![sub(rng)])
        }
    }
}

/// Names for every binder slot of `m`, drawn at random from `POOL`.
pub fn random_names(rng: &mut ChaCha8Rng, m: &Term) -> Vec<Name> {
    (0..binder_count(m)).map(|_| pick(rng)).collect()
}

/// `m` with one name occurrence or binder changed at random.
pub fn mutate(rng: &mut ChaCha8Rng, m: &Term) -> Term {
    let mut names = Vec::new();
    all_names(m, &mut names);
    if names.is_empty() {
        return m.clone();
    }
    let target = rng.gen_range(0..names.len());
    let replacement = pick(rng);
    let mut counter = 0;
    replace_nth(m, target, &replacement, &mut counter)
}

fn replace_nth(m: &Term, target: usize, new: &Name, k: &mut usize) -> Term {
    match m {
        Term::Var(x) => Term::Var(swap_at(x, target, new, k)),
        Term::Meta { name, params, args } => {
            let params = params.iter().map(|u| swap_at(u, target, new, k)).collect();
            Term::Meta { name: name.clone(), params, args: args.iter().map(|a| replace_nth(a, target, new, k)).collect() }
        }
        Term::Op { inst, args } => {
            let params = inst.params.iter().map(|u| swap_at(u, target, new, k)).collect();
            let inst = OperatorInst::new(inst.decl.clone(), params);
            let args = args
                .iter()
                .map(|e| {
                    let symbols = e.symbols.iter().map(|(n, s)| (swap_at(n, target, new, k), s.clone())).collect();
                    let vars = e.vars.iter().map(|(n, s)| (swap_at(n, target, new, k), s.clone())).collect();
                    Abstraction::new(symbols, vars, replace_nth(&e.body, target, new, k))
                })
                .collect();
            Term::Op { inst, args }
        }
    }
}

fn swap_at(n: &Name, target: usize, new: &Name, k: &mut usize) -> Name {
    let out = if *k == target { new.clone() } else { n.clone() };
    *k += 1;
    out
}

/// Shape of `m` with every name erased; α-equal terms share it.
pub fn shape(m: &Term) -> String {
    match m {
        Term::Var(_) => "v".into(),
        Term::Meta { args, .. } => format!("m({})", args.iter().map(shape).collect::<Vec<_>>().join(",")),
        Term::Op { inst, args } => format!(
            "{}({})",
            inst.name(),
            args.iter()
                .map(|e| format!("{}.{}", e.valence(Sort::new("exp")), shape(&e.body)))
                .collect::<Vec<_>>()
                .join(",")
        ),
    }
}
