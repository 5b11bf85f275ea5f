//! Interpreting a term in an environment of the term model: metavariables
//! instantiated, symbols renamed and variables replaced in one pass.

use nominal_abt::algebra::{interpret, Environment};
use nominal_abt::contexts::MetaCtx;
use nominal_abt::name::Name;
use nominal_abt::signature::assignables_signature;
use nominal_abt::syntax::{parse_abstraction, parse_meta_ctx, parse_symbol_ctx, parse_term, parse_var_ctx};
use nominal_abt::term::check;

fn main() {
    let sig = assignables_signature();
    let theta = parse_meta_ctx("k : [exp].exp").unwrap();
    let syms = parse_symbol_ctx("u:exp").unwrap();
    let vars = parse_var_ctx("x:exp, y:exp").unwrap();
    let m = parse_term("set[u](ap(k(x), y))", &sig, &theta).unwrap();

    let target_syms = parse_symbol_ctx("a:exp").unwrap();
    let target_vars = parse_var_ctx("z:exp").unwrap();
    let none = MetaCtx::empty();
    let mut env = Environment::default();
    env.syms.insert(Name::from("u"), Name::from("a"));
    env.vars.insert(Name::from("x"), parse_term("get[a]", &sig, &none).unwrap());
    env.vars.insert(Name::from("y"), parse_term("z", &sig, &none).unwrap());
    let k = theta.get("k").unwrap();
    env.meta.insert(Name::from("k"), parse_abstraction("\\[w].lam([z].ap(w, z))", &sig, &none, Some(k)).unwrap());

    let out = interpret(&theta, &syms, &vars, &m, &env).unwrap();
    println!("{m}  ==>  {out}");
    println!("sort: {}", check(&sig, &none, &target_syms, &target_vars, &out).unwrap());

    env.vars.remove(&Name::from("y"));
    println!("{}", interpret(&theta, &syms, &vars, &m, &env).unwrap_err());
}
