use std::io::{self, Read, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let mut stdin = || {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text).map(|_| text)
    };
    let out = nominal_abt::cli::run(std::env::args_os(), &mut stdin);
    let _ = io::stdout().write_all(out.stdout.as_bytes());
    let _ = io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
