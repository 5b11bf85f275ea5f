//! Drives the command-line interface in-process, text and JSON.

use nominal_abt::cli;

fn main() {
    let sig = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/lambda.sig");
    let runs: [&[&str]; 3] = [
        &["nabt", "--sig", sig, "--vars", "y:exp", "--term", "ap(lam([x].x),y)", "check"],
        &["nabt", "--sig", sig, "--vars", "x:exp, y:exp", "--term", "lam([y].ap(x,y))", "subst", "--for", "x", "--with", "y", "--json"],
        &["nabt", "--sig", sig, "--term", "ap(x, y)", "check", "--json"],
    ];
    for argv in runs {
        let out = cli::run(argv.iter().copied(), &mut || Ok(String::new()));
        println!("$ {}", argv[1..].join(" "));
        print!("{}{}", out.stdout, out.stderr);
        println!("exit {}", out.code);
    }
}
