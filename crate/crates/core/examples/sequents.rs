//! Telescopes and sequents: surface notation and the wellformedness check.

use nominal_abt::contexts::{SymbolCtx, VarCtx};
use nominal_abt::name::Sort;
use nominal_abt::sequents::{check_wf, desugar, resugar, sequent_signature};
use nominal_abt::syntax::print_term;

fn main() {
    let sig = sequent_signature();
    let jdg = Sort::new("jdg");
    for text in [
        "∇[exp,exp](ℵ{u,v}. ⋄, u:P, v:pred('u) ≫ pred('u))",
        "nabla[exp](\\{u}. <>, u:P, u:P >> P)",
        "∇[exp](ℵ{u}. ⋄, u:pred('u) ≫ P)",
    ] {
        let m = desugar(text).unwrap();
        println!("{}", print_term(&m));
        println!("  {}", resugar(&m, false));
        match check_wf(&sig, &SymbolCtx::empty(), &VarCtx::empty(), &m, &jdg) {
            Ok(()) => println!("  wellformed"),
            Err(e) => println!("  {e}"),
        }
    }
}
