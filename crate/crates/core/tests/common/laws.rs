//! The algebraic laws, one function per law over a seed. Shared by the
//! proptest suite and the acceptance run.

use std::collections::BTreeSet;

use nominal_abt::algebra::*;
use nominal_abt::contexts::{MetaCtx, Renaming, SymbolCtx, VarCtx};
use nominal_abt::name::{Name, Sort};
use nominal_abt::syntax::{parse_term, print_term, print_term_with, PrintOptions};
use nominal_abt::term::{alpha_eq, alpha_eq_abs, check, check_abs, Term};
use rand::seq::SliceRandom;
use rand::Rng;

use super::*;

pub type Law = fn(u64) -> Result<(), String>;

macro_rules! ensure {
    ($c:expr) => {
        if !$c {
            return Err(format!("failed: {}", stringify!($c)));
        }
    };
    ($c:expr, $($fmt:tt)+) => {
        if !$c {
            return Err(format!($($fmt)+));
        }
    };
}

macro_rules! ensure_eq {
    ($a:expr, $b:expr) => {{
        let (a, b) = ($a, $b);
        if a != b {
            return Err(format!("{} != {}: {:?} vs {:?}", stringify!($a), stringify!($b), a, b));
        }
    }};
}

/// A random scope, a sort and a term of that sort in the scope.
pub fn case(seed: u64) -> (Scope, Sort, Term) {
    let mut r = rng(seed);
    let scope = Scope::random(&mut r);
    let sort = sorts()[r.gen_range(0..2)].clone();
    let m = gen_term(&mut r, &scope, &sort, 6);
    (scope, sort, m)
}

fn sort_in(scope: &Scope, m: &Term) -> Option<Sort> {
    check(&scope.sig, &scope.theta, &scope.syms, &scope.vars, m).ok()
}

pub fn generated_terms_check(seed: u64) -> Result<(), String> {
    let (scope, sort, m) = case(seed);
    ensure_eq!(sort_in(&scope, &m), Some(sort));
    Ok(())
}

pub fn subst_preserves_sort(seed: u64) -> Result<(), String> {
    let (mut scope, sort, _) = case(seed);
    let mut r = rng(seed ^ 1);
    let x = Name::from(*VAR_POOL.choose(&mut r).unwrap());
    let sigma = sorts()[r.gen_range(0..2)].clone();
    scope.vars = scope.vars.remove(x.as_str()).unwrap_or(scope.vars.clone());
    let n = gen_term(&mut r, &scope, &sigma, 3);
    let outer = scope.clone();
    scope.vars = scope.vars.shadow(x.clone(), sigma);
    let m = gen_term(&mut r, &scope, &sort, 6);
    let out = subst(&n, &x, &m);
    ensure_eq!(sort_in(&outer, &out), Some(sort));
    Ok(())
}

pub fn rename_preserves_sort(seed: u64) -> Result<(), String> {
    let (scope, sort, m) = case(seed);
    let rho = random_renaming(&mut rng(seed ^ 2), &scope.syms);
    let out = rename(&m, &rho).unwrap();
    ensure_eq!(check(&scope.sig, &scope.theta, rho.cod(), &scope.vars, &out).ok(), Some(sort));
    Ok(())
}

pub fn msubst_preserves_sort(seed: u64) -> Result<(), String> {
    let (scope, sort, m) = case(seed);
    let Some((mv, v)) = scope.theta.iter().next().map(|(a, b)| (a.clone(), b.clone())) else { return Ok(()) };
    let mut r = rng(seed ^ 3);
    let rest = Scope { theta: scope.theta.remove(mv.as_str()).unwrap(), ..scope.clone() };
    let e = gen_abs(&mut r, &rest, &v, 3);
    ensure_eq!(check_abs(&rest.sig, &rest.theta, &rest.syms, &rest.vars, &e).ok(), Some(v));
    let out = msubst(&e, &mv, &m).unwrap();
    ensure!(!metavariables(&out).contains(&mv));
    ensure_eq!(sort_in(&rest, &out), Some(sort));
    Ok(())
}

pub fn rename_is_functorial(seed: u64) -> Result<(), String> {
    let (scope, _, m) = case(seed);
    ensure!(alpha_eq(&rename(&m, &Renaming::identity(&scope.syms)).unwrap(), &m));
    let mut r = rng(seed ^ 4);
    let rho = random_renaming(&mut r, &scope.syms);
    let rho2 = random_renaming(&mut r, rho.cod());
    let composite = rho2.after(&rho).unwrap();
    let once = rename(&m, &composite).unwrap();
    let twice = rename(&rename(&m, &rho).unwrap(), &rho2).unwrap();
    ensure!(alpha_eq(&once, &twice), "{} vs {}", once, twice);
    Ok(())
}

pub fn rename_depends_only_on_support(seed: u64) -> Result<(), String> {
    let (scope, _, m) = case(seed);
    let fs = free_syms(&m);
    let mut r = rng(seed ^ 5);
    let rho1 = random_renaming(&mut r, &scope.syms);
    // agree on FS(M), send everything else to fresh names
    let pairs: Vec<(Name, Name)> = scope.syms.names().map(|u| {
        let image = if fs.contains(u) { rho1.apply(u.as_str()).unwrap().clone() } else { Name::from(format!("{u}_fresh")) };
        (u.clone(), image)
    }).collect();
    let mut cod = SymbolCtx::empty();
    for ((_, sigma), (_, image)) in scope.syms.iter().zip(&pairs) {
        cod = cod.shadow(image.clone(), sigma.clone());
    }
    let rho2 = Renaming::new(scope.syms.clone(), cod, pairs).unwrap();
    ensure!(alpha_eq(&rename(&m, &rho1).unwrap(), &rename(&m, &rho2).unwrap()));
    Ok(())
}

pub fn free_variables_of_substitution(seed: u64) -> Result<(), String> {
    let (mut scope, sort, _) = case(seed);
    let mut r = rng(seed ^ 6);
    let x = Name::from(*VAR_POOL.choose(&mut r).unwrap());
    let sigma = sorts()[r.gen_range(0..2)].clone();
    let n = gen_term(&mut r, &scope, &sigma, 3);
    scope.vars = scope.vars.shadow(x.clone(), sigma);
    let m = gen_term(&mut r, &scope, &sort, 6);
    let out = free_vars(&subst(&n, &x, &m));
    let mut bound: BTreeSet<Name> = free_vars(&m);
    let had_x = bound.remove(&x);
    bound.extend(free_vars(&n));
    ensure!(out.is_subset(&bound));
    if had_x {
        ensure_eq!(out, bound);
    }
    Ok(())
}

pub fn vacuous_operations(seed: u64) -> Result<(), String> {
    let (scope, _, m) = case(seed);
    let fv = free_vars(&m);
    let mut r = rng(seed ^ 7);
    if let Some(x) = VAR_POOL.iter().map(|x| Name::from(*x)).find(|x| !fv.contains(x)) {
        let n = Term::var(*VAR_POOL.choose(&mut r).unwrap());
        ensure!(alpha_eq(&subst(&n, &x, &m), &m));
    }
    if free_syms(&m).is_empty() {
        let rho = random_renaming(&mut r, &scope.syms);
        ensure!(alpha_eq(&rename(&m, &rho).unwrap(), &m));
    }
    Ok(())
}

pub fn operations_respect_alpha(seed: u64) -> Result<(), String> {
    let (scope, sort, m) = case(seed);
    let mut r = rng(seed ^ 8);
    let m2 = alpha_variant(&mut r, &m);
    ensure!(alpha_eq(&m, &m2));
    ensure_eq!(free_vars(&m), free_vars(&m2));
    ensure_eq!(free_syms(&m), free_syms(&m2));

    let rho = random_renaming(&mut r, &scope.syms);
    ensure!(alpha_eq(&rename(&m, &rho).unwrap(), &rename(&m2, &rho).unwrap()));

    let x = Name::from(*VAR_POOL.choose(&mut r).unwrap());
    let n = gen_term(&mut r, &scope, &sort, 3);
    let n2 = alpha_variant(&mut r, &n);
    ensure!(alpha_eq(&subst(&n, &x, &m), &subst(&n2, &x, &m2)));

    let y = Name::from(*VAR_POOL.iter().find(|v| **v != x.as_str()).unwrap());
    let pairs = [(x.clone(), n.clone()), (y.clone(), Term::Var(x.clone()))];
    let pairs2 = [(x.clone(), n2), (y, Term::Var(x))];
    ensure!(alpha_eq(&subst_simultaneous(&pairs, &m).unwrap(), &subst_simultaneous(&pairs2, &m2).unwrap()));

    let first = scope.theta.iter().next().map(|(a, b)| (a.clone(), b.clone()));
    if let Some((mv, v)) = first {
        let e = gen_abs(&mut r, &scope, &v, 3);
        let e2 = alpha_variant_abs(&mut r, &e);
        ensure!(alpha_eq_abs(&e, &e2));
        ensure!(alpha_eq(&msubst(&e, &mv, &m).unwrap(), &msubst(&e2, &mv, &m2).unwrap()));
    }
    Ok(())
}

pub fn simultaneous_swap_is_not_iterated(seed: u64) -> Result<(), String> {
    let (mut scope, sort, _) = case(seed);
    let (x, y) = (Name::from("x"), Name::from("y"));
    let sigma = sorts()[seed as usize % 2].clone();
    scope.vars = scope.vars.shadow(x.clone(), sigma.clone()).shadow(y.clone(), sigma);
    let mut r = rng(seed ^ 9);
    let m = gen_term(&mut r, &scope, &sort, 6);
    let swap = [(x.clone(), Term::Var(y.clone())), (y.clone(), Term::Var(x.clone()))];
    let simultaneous = subst_simultaneous(&swap, &m).unwrap();
    let iterated = subst(&Term::Var(x.clone()), &y, &subst(&Term::Var(y.clone()), &x, &m));
    ensure!(alpha_eq(&subst_simultaneous(&swap, &simultaneous).unwrap(), &m));
    ensure!(!free_vars(&iterated).contains(&y));
    if free_vars(&m).contains(&x) {
        ensure!(free_vars(&simultaneous).contains(&y));
        ensure!(!alpha_eq(&simultaneous, &iterated));
    }
    let single = subst_simultaneous(&[(x.clone(), Term::Var(y.clone()))], &m).unwrap();
    ensure!(alpha_eq(&single, &subst(&Term::Var(y), &x, &m)));
    Ok(())
}

pub fn substitutions_compose(seed: u64) -> Result<(), String> {
    let (mut scope, sort, _) = case(seed);
    let mut r = rng(seed ^ 10);
    let (x, y) = (Name::from("x"), Name::from("y"));
    let (sx, sy) = (sorts()[r.gen_range(0..2)].clone(), sorts()[r.gen_range(0..2)].clone());
    for v in ["x", "y"] {
        scope.vars = scope.vars.remove(v).unwrap_or(scope.vars.clone());
    }
    let p = gen_term(&mut r, &scope, &sy, 3);
    scope.vars = scope.vars.shadow(y.clone(), sy);
    let n = gen_term(&mut r, &scope, &sx, 3);
    scope.vars = scope.vars.shadow(x.clone(), sx);
    let m = gen_term(&mut r, &scope, &sort, 6);
    let left = subst(&p, &y, &subst(&n, &x, &m));
    let right = subst(&subst(&p, &y, &n), &x, &subst(&p, &y, &m));
    ensure!(alpha_eq(&left, &right), "{} vs {}", left, right);
    Ok(())
}

pub fn parse_print_round_trip(seed: u64) -> Result<(), String> {
    let (scope, _, m) = case(seed);
    let unicode = PrintOptions { unicode: true, sugar: false };
    for text in [print_term(&m), print_term_with(&m, unicode)] {
        let back = parse_term(&text, &scope.sig, &scope.theta).unwrap();
        ensure!(alpha_eq(&back, &m), "{}", text);
    }
    Ok(())
}

pub const LAWS: &[(&str, Law)] = &[
    ("generated_terms_check", generated_terms_check),
    ("subst_preserves_sort", subst_preserves_sort),
    ("rename_preserves_sort", rename_preserves_sort),
    ("msubst_preserves_sort", msubst_preserves_sort),
    ("rename_is_functorial", rename_is_functorial),
    ("rename_depends_only_on_support", rename_depends_only_on_support),
    ("free_variables_of_substitution", free_variables_of_substitution),
    ("vacuous_operations", vacuous_operations),
    ("operations_respect_alpha", operations_respect_alpha),
    ("simultaneous_swap_is_not_iterated", simultaneous_swap_is_not_iterated),
    ("substitutions_compose", substitutions_compose),
    ("parse_print_round_trip", parse_print_round_trip),
];

/// A random environment from `scope` into fresh target contexts, the
/// renaming it carries and the target scope. Closed metavariable values bind
/// every name they use; open ones may mention the target contexts.
pub fn random_environment(seed: u64, scope: &Scope, open: bool) -> (Environment, Renaming, Scope) {
    let mut r = rng(seed);
    let rho = random_renaming(&mut r, &scope.syms);
    let target = Scope { theta: MetaCtx::empty(), syms: rho.cod().clone(), vars: random_ctx(&mut r, VAR_POOL, 3), ..scope.clone() };
    let closed = Scope { syms: SymbolCtx::empty(), vars: VarCtx::empty(), ..target.clone() };
    let meta = scope
        .theta
        .iter()
        .map(|(m, v)| (m.clone(), gen_abs(&mut r, if open { &target } else { &closed }, v, 3)))
        .collect();
    let vars = scope.vars.iter().map(|(x, sigma)| (x.clone(), gen_term(&mut r, &target, sigma, 3))).collect();
    let env = Environment { meta, syms: rho.map().clone(), vars };
    (env, rho, target)
}

fn rename_then_subst(rho: &Renaming, env: &Environment, m: &Term) -> Result<Term, String> {
    let renamed = rename(m, rho).map_err(|e| e.to_string())?;
    let pairs: Vec<(Name, Term)> = env.vars.iter().map(|(x, n)| (x.clone(), n.clone())).collect();
    subst_simultaneous(&pairs, &renamed).map_err(|e| e.to_string())
}

fn msubst_all(env: &Environment, m: &Term) -> Result<Term, String> {
    env.meta.iter().try_fold(m.clone(), |t, (mv, e)| msubst(e, mv, &t).map_err(|e| e.to_string()))
}

/// `interpret` agrees with the staged pipeline and preserves the sort. With
/// closed metavariable values the stages run in the order msubst, rename,
/// subst; open values already live in the target, so they go last.
pub fn interpret_matches_composition(seed: u64) -> Result<(), String> {
    let (scope, sort, m) = case(seed);
    for open in [false, true] {
        let (env, rho, target) = random_environment(seed ^ 11, &scope, open);
        let out = interpret(&scope.theta, &scope.syms, &scope.vars, &m, &env).map_err(|e| e.to_string())?;
        ensure_eq!(sort_in(&target, &out), Some(sort.clone()));
        let staged = if open {
            msubst_all(&env, &rename_then_subst(&rho, &env, &m)?)?
        } else {
            rename_then_subst(&rho, &env, &msubst_all(&env, &m)?)?
        };
        ensure!(alpha_eq(&out, &staged), "open={open}: {out} vs {staged}");
    }
    Ok(())
}
