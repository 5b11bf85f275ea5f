//! Golden command lines: `NAME.cmd` holds one argument per line (`#` lines
//! are comments, a line `""` is the empty argument), `NAME.stdin` is optional standard input and `NAME.out`
//! the expected exit code and both streams. Set `NABT_BLESS=1` to rewrite
//! the expectations.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use nominal_abt::cli;

pub fn dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn cases() -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = fs::read_dir(dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "cmd"))
        .collect();
    out.sort();
    out
}

pub fn render(cmd: &Path) -> String {
    let args: Vec<String> = fs::read_to_string(cmd)
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| if l == "\"\"" { String::new() } else { l.to_string() })
        .collect();
    let stdin_file = cmd.with_extension("stdin");
    let mut stdin = || -> io::Result<String> {
        if stdin_file.exists() {
            fs::read_to_string(&stdin_file)
        } else {
            Ok(String::new())
        }
    };
    let out = cli::run(std::iter::once("nabt".to_string()).chain(args), &mut stdin);
    format!("exit {}\n--- stdout\n{}--- stderr\n{}", out.code, out.stdout, out.stderr)
}

/// Names of the cases whose output differs from the checked-in file.
pub fn mismatches() -> Vec<String> {
    let bless = std::env::var_os("NABT_BLESS").is_some();
    let mut bad = Vec::new();
    for cmd in cases() {
        let got = render(&cmd);
        let expected = cmd.with_extension("out");
        if bless {
            fs::write(&expected, &got).unwrap();
        } else if fs::read_to_string(&expected).ok().as_deref() != Some(got.as_str()) {
            bad.push(cmd.file_stem().unwrap().to_string_lossy().into_owned());
        }
    }
    bad
}
