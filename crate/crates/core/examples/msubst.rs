//! Hereditary substitution of abstractions for metavariables.

use nominal_abt::algebra::{msubst, msubst_checked};
use nominal_abt::contexts::VarCtx;
use nominal_abt::name::Name;
use nominal_abt::signature::assignables_signature;
use nominal_abt::syntax::{parse_abstraction, parse_meta_ctx, parse_symbol_ctx, parse_term};

fn main() {
    let sig = assignables_signature();
    let theta = parse_meta_ctx("m : {exp}[exp].exp").unwrap();
    let syms = parse_symbol_ctx("v:exp").unwrap();
    let vars = VarCtx::empty();

    let m = parse_term("decl(get[v], \\{w}.m{w}(m{v}(lam([x].x))))", &sig, &theta).unwrap();
    let v = theta.get("m").unwrap().clone();
    let e = parse_abstraction("\\{u}[y].set[u](ap(y, get[u]))", &sig, &theta, Some(&v)).unwrap();
    println!("M = {m}");
    println!("E = {e}");
    println!("[E/m]M = {}", msubst(&e, &Name::from("m"), &m).unwrap());

    // the checked form also verifies valence and sorts
    let bad = parse_abstraction("\\[y:exp].y", &sig, &theta, None).unwrap();
    match msubst_checked(&sig, &theta, &syms, &vars, &bad, &Name::from("m"), &m) {
        Ok(t) => println!("unexpected: {t}"),
        Err(err) => println!("rejected {bad}: {err}"),
    }
}
