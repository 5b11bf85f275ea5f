//! Declares a signature from text, prints it back and derives operator
//! judgments in a couple of symbol contexts.

use nominal_abt::name::Name;
use nominal_abt::signature::{check_operator, OperatorInst};
use nominal_abt::syntax::{parse_signature, parse_symbol_ctx};

const SOURCE: &str = "
sort exp
op lam : ([exp].exp) exp
op ap : (.exp, .exp) exp
op decl : (.exp, {exp}.exp) exp
op get {exp} : () exp
op set {exp} : (.exp) exp
";

fn main() {
    let sig = parse_signature(SOURCE).expect("valid signature");
    println!("{sig}");

    for ctx in ["", "u:exp"] {
        let syms = parse_symbol_ctx(ctx).unwrap();
        let get = OperatorInst::new(sig.operator("get").unwrap().clone(), vec![Name::from("u")]);
        match check_operator(&sig, &syms, &get) {
            Ok(arity) => println!("[{ctx}] {get} : {arity}"),
            Err(e) => println!("[{ctx}] {get} rejected: {e}"),
        }
    }

    // declaration errors carry a span into the source
    let err = parse_signature("sort exp\nop bad : (.nat) exp").unwrap_err();
    println!("error: {err}");
}
