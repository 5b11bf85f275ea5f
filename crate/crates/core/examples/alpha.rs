//! α-equivalence through canonical coordinates.

use nominal_abt::contexts::MetaCtx;
use nominal_abt::signature::assignables_signature;
use nominal_abt::syntax::parse_term;
use nominal_abt::term::{alpha_eq, canonicalize};

fn main() {
    let sig = assignables_signature();
    let theta = MetaCtx::empty();
    let pairs = [
        ("lam([x].x)", "lam([y].y)"),
        ("lam([x].y)", "lam([x].z)"),
        ("decl(get[u], \\{v}.set[v](get[v]))", "decl(get[u], \\{w}.set[w](get[w]))"),
        ("fix([f].lam([x].ap(f, x)))", "fix([g].lam([f].ap(g, f)))"),
        ("lam([x].lam([y].x))", "lam([y].lam([y].y))"),
    ];
    for (a, b) in pairs {
        let m = parse_term(a, &sig, &theta).unwrap();
        let n = parse_term(b, &sig, &theta).unwrap();
        println!("{a}  ~  {b}: {}", alpha_eq(&m, &n));
        println!("    {}", canonicalize(&m));
        println!("    {}", canonicalize(&n));
    }
}
