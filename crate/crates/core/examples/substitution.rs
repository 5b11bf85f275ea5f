//! Free names, capture-avoiding substitution and symbol renaming.

use std::collections::BTreeMap;

use nominal_abt::algebra::{free_syms, free_vars, rename, subst, subst_simultaneous};
use nominal_abt::contexts::{MetaCtx, Renaming};
use nominal_abt::name::Name;
use nominal_abt::signature::assignables_signature;
use nominal_abt::syntax::{parse_symbol_ctx, parse_term};
use nominal_abt::term::Term;

fn main() {
    let sig = assignables_signature();
    let theta = MetaCtx::empty();
    let parse = |s: &str| parse_term(s, &sig, &theta).unwrap();

    let m = parse("lam([y].ap(x, set[u](y)))");
    println!("M = {m}");
    println!("FV(M) = {:?}", free_vars(&m));
    println!("FS(M) = {:?}", free_syms(&m));

    // y is bound in M and free in N, so the binder moves out of the way
    let n = parse("get[v]");
    let out = subst(&Term::var("y"), &Name::from("x"), &m);
    println!("[y/x]M = {out}");
    println!("[{n}/x]M = {}", subst(&n, &Name::from("x"), &m));

    let swap = [(Name::from("x"), Term::var("y")), (Name::from("y"), Term::var("x"))];
    let p = parse("ap(x, y)");
    println!("[y,x/x,y]{p} = {}", subst_simultaneous(&swap, &p).unwrap());

    // renamings are injective maps between symbol contexts
    let dom = parse_symbol_ctx("u:exp").unwrap();
    let cod = parse_symbol_ctx("w:exp").unwrap();
    let rho = Renaming::new(dom, cod, [("u", "w")]).unwrap();
    let q = parse("decl(get[u], \\{w}.set[w](get[u]))");
    println!("{q} {rho} = {}", rename(&q, &rho).unwrap());

    let clash: BTreeMap<Name, Name> = [(Name::from("u"), Name::from("w"))].into();
    println!("partial map {clash:?}: {}", nominal_abt::algebra::rename_symbols(&q, &clash));
}
