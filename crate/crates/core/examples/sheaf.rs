//! Supports and the sheaf condition on a truncated site of symbol contexts.

use std::sync::Arc;

use nominal_abt::name::Sort;
use nominal_abt::sheafcheck::{pullback_agreement, Budget, FinitePresheaf, TruncatedSite};
use nominal_abt::syntax::parse_symbol_ctx;

fn main() {
    let exp = Sort::new("exp");
    let site = Arc::new(TruncatedSite::new(vec![exp.clone()], 2));
    println!("{} objects, {} arrows", site.object_count(), site.arrow_count());

    let s = FinitePresheaf::symbols(site.clone(), &exp);
    let pair = s.product(&s).unwrap();
    let ctx = parse_symbol_ctx("a:exp, b:exp").unwrap();
    let o = site.find_object(&ctx).unwrap();
    for m in 0..pair.fiber(o) {
        println!("  {} has least support {}", pair.label(o, m), pair.least_support(&ctx, m).unwrap());
    }
    println!("S_exp x S_exp is a sheaf: {}", pair.is_sheaf());

    // every small presheaf: the sheaf condition and pullback preservation agree
    let report = pullback_agreement(&[exp], 2, &Budget { samples: 50, ..Budget::default() });
    println!(
        "{} presheaves, {} sheaves, {} disagreements",
        report.checked(),
        report.sheaves,
        report.disagreements
    );
    if let Some(r) = report.records.iter().find(|r| !r.is_sheaf) {
        println!("first non-sheaf: {}", r.sheaf_failure.as_ref().unwrap());
    }
}
