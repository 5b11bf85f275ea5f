//! The `nabt` command line.
//!
//! [`run`] executes one command line in-process and returns the exit code
//! and both output streams, so the binary is a thin wrapper and the golden
//! tests need no subprocess.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{self, AlgebraError, Environment};
use crate::contexts::{MetaCtx, Renaming, SymbolCtx, VarCtx};
use crate::name::{Name, Sort};
use crate::sequents::{check_wf, sequent_signature};
use crate::sheafcheck::{pullback_agreement, Budget};
use crate::signature::Signature;
use crate::syntax::{
    parse_abstraction_in, parse_meta_ctx, parse_signature, parse_symbol_ctx, parse_term_in, parse_var_ctx,
    print_term_with, PrintOptions, Span, SpanMap, SyntaxError,
};
use crate::term::{check, check_abs, CheckError, Path, Term};

/// Exit code for success.
pub const EXIT_OK: i32 = 0;
/// Exit code when a checker rejects the input.
pub const EXIT_FAILURE: i32 = 1;
/// Exit code for usage and parse errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "nabt", version, about = "Check and manipulate nominal abstract binding trees")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Signature file.
    #[arg(long, global = true, value_name = "FILE")]
    sig: Option<String>,
    /// Use the built-in telescope and sequent signature.
    #[arg(long, global = true, conflicts_with = "sig")]
    sequents: bool,
    /// Metavariable context, e.g. `m:{exp}[exp].exp`.
    #[arg(long, global = true, value_name = "CTX", default_value = "")]
    meta: String,
    /// Symbol context, e.g. `u:exp, v:exp`.
    #[arg(long, global = true, value_name = "CTX", default_value = "")]
    syms: String,
    /// Variable context, e.g. `x:exp`.
    #[arg(long, global = true, value_name = "CTX", default_value = "")]
    vars: String,
    /// The term; read from stdin when absent.
    #[arg(long, global = true, value_name = "TERM")]
    term: Option<String>,
    /// Print one JSON object `{ok, result, diagnostics}`.
    #[arg(long, global = true)]
    json: bool,
    /// Print `ℵ`, `∇`, `⋄` and `≫`.
    #[arg(long, global = true)]
    unicode: bool,
    /// Print telescopes and sequents in surface notation.
    #[arg(long, global = true)]
    sugar: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Infer the sort of a term.
    Check,
    /// Free variables, sorted.
    Fv,
    /// Free symbols, sorted.
    Fs,
    /// Rename free symbols.
    Rename {
        /// Pairs `u=v,...`; unlisted symbols map to themselves.
        #[arg(long, value_name = "PAIRS", default_value = "")]
        map: String,
        /// Codomain context; by default the images with the domain's sorts.
        #[arg(long, value_name = "CTX")]
        target_syms: Option<String>,
    },
    /// Substitute a term for a variable.
    Subst {
        #[arg(long = "for", value_name = "VAR")]
        target: String,
        #[arg(long, value_name = "TERM")]
        with: String,
    },
    /// Substitute an abstraction for a metavariable.
    Msubst {
        #[arg(long = "for", value_name = "META")]
        target: String,
        #[arg(long, value_name = "ABS")]
        with: String,
    },
    /// Interpret a term in an environment.
    Interpret {
        /// Lines `sym u = v`, `var x = M`, `meta m = E`; `#` starts a comment.
        #[arg(long, value_name = "FILE")]
        env: String,
        #[arg(long, value_name = "CTX", default_value = "")]
        target_meta: String,
        #[arg(long, value_name = "CTX")]
        target_syms: Option<String>,
        #[arg(long, value_name = "CTX")]
        target_vars: Option<String>,
    },
    /// Decide sequent wellformedness at a sort.
    Wf {
        #[arg(long, value_name = "SORT")]
        sort: String,
    },
    /// Compare the sheaf and pullback conditions on small presheaves.
    SheafReport {
        /// Comma-separated sort names.
        #[arg(long, value_name = "SORTS", default_value = "exp")]
        sorts: String,
        #[arg(long, default_value_t = 2)]
        max_size: usize,
        /// Fiber bound for exhaustive enumeration.
        #[arg(long, default_value_t = 2)]
        fiber: usize,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        /// Fiber bound for random samples.
        #[arg(long, default_value_t = 3)]
        random_fiber: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print every presheaf's record as one JSON line.
        #[arg(long, conflicts_with = "json")]
        jsonl: bool,
    },
}

/// The result of one command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// A location in one of the command's inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub file: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<SourceSpan>,
    /// Subterm trail such as `ap.0/lam.0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

impl Diagnostic {
    fn error(message: impl Into<String>) -> Diagnostic {
        Diagnostic { severity: "error", message: message.into(), span: None, path: None }
    }

    fn at(mut self, file: &str, span: Span) -> Diagnostic {
        self.span = Some(SourceSpan { file: file.to_string(), start: span.start, end: span.end });
        self
    }

    fn render(&self) -> String {
        let mut out = format!("{}: {}\n", self.severity, self.message);
        if let Some(s) = &self.span {
            out.push_str(&format!("  --> {}:{}..{}\n", s.file, s.start, s.end));
        }
        if let Some(p) = &self.path {
            out.push_str(&format!("  at {p}\n"));
        }
        out
    }
}

struct Failure {
    code: i32,
    diagnostics: Vec<Diagnostic>,
}

impl Failure {
    fn usage(d: Diagnostic) -> Failure {
        Failure { code: EXIT_USAGE, diagnostics: vec![d] }
    }

    fn check(d: Diagnostic) -> Failure {
        Failure { code: EXIT_FAILURE, diagnostics: vec![d] }
    }
}

fn syntax(file: &str, e: SyntaxError) -> Failure {
    Failure::usage(Diagnostic::error(e.to_string()).at(file, e.span()))
}

/// A command's successful result: text for humans, JSON for scripts.
struct Success {
    text: String,
    json: Value,
}

/// Source text of one input, with the name diagnostics refer to it by.
struct Source {
    file: String,
    text: String,
}

/// A parsed term together with where its subterms came from.
struct Located {
    source: Source,
    term: Term,
    spans: SpanMap,
}

impl Located {
    fn diagnostic(&self, message: String, path: &Path) -> Diagnostic {
        let mut d = Diagnostic::error(message);
        if let Some(span) = self.spans.get(path) {
            d = d.at(&self.source.file, *span);
        }
        d.path = Some(path.to_string());
        d
    }

    fn check_error(&self, e: &CheckError) -> Failure {
        Failure::check(self.diagnostic(e.to_string(), e.path()))
    }
}

struct Env {
    sig: Signature,
    theta: MetaCtx,
    syms: SymbolCtx,
    vars: VarCtx,
    print: PrintOptions,
}

impl Env {
    fn show(&self, m: &Term) -> String {
        print_term_with(m, self.print)
    }

    fn parse(&self, source: Source, theta: &MetaCtx) -> Result<Located, Failure> {
        let (term, spans) =
            parse_term_in(&source.text, 0, source.text.len(), &self.sig, theta).map_err(|e| syntax(&source.file, e))?;
        Ok(Located { source, term, spans })
    }

    fn check(&self, m: &Located) -> Result<Sort, Failure> {
        check(&self.sig, &self.theta, &self.syms, &self.vars, &m.term).map_err(|e| m.check_error(&e))
    }
}

/// Runs one command line; `argv[0]` is the program name.
pub fn run<I, T>(argv: I, stdin: &mut dyn FnMut() -> io::Result<String>) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                Output { code: EXIT_USAGE, stdout: String::new(), stderr: rendered }
            } else {
                Output { code: EXIT_OK, stdout: rendered, stderr: String::new() }
            };
        }
    };
    let json = cli.common.json;
    let outcome = execute(cli, stdin);
    match (outcome, json) {
        (Ok(s), false) => Output { code: EXIT_OK, stdout: s.text, stderr: String::new() },
        (Ok(s), true) => Output {
            code: EXIT_OK,
            stdout: json_line(&json!({ "ok": true, "result": s.json, "diagnostics": [] })),
            stderr: String::new(),
        },
        (Err(f), false) => Output {
            code: f.code,
            stdout: String::new(),
            stderr: f.diagnostics.iter().map(Diagnostic::render).collect(),
        },
        (Err(f), true) => Output {
            code: f.code,
            stdout: json_line(&json!({ "ok": false, "result": null, "diagnostics": f.diagnostics })),
            stderr: String::new(),
        },
    }
}

fn json_line(v: &Value) -> String {
    format!("{}\n", serde_json::to_string(v).expect("JSON values serialize"))
}

fn read_file(path: &str) -> Result<Source, Failure> {
    fs::read_to_string(path)
        .map(|text| Source { file: path.to_string(), text })
        .map_err(|e| Failure::usage(Diagnostic::error(format!("cannot read `{path}`: {e}"))))
}

fn option_source(name: &str, text: &str) -> Source {
    Source { file: format!("<{name}>"), text: text.to_string() }
}

fn execute(cli: Cli, stdin: &mut dyn FnMut() -> io::Result<String>) -> Result<Success, Failure> {
    let c = &cli.common;
    if let Command::SheafReport { sorts, max_size, fiber, samples, random_fiber, seed, jsonl } = &cli.command {
        return sheaf_report(sorts, *max_size, *fiber, *samples, *random_fiber, *seed, *jsonl);
    }
    let sig = match (&c.sig, c.sequents) {
        (_, true) => sequent_signature(),
        (Some(path), false) => {
            let src = read_file(path)?;
            parse_signature(&src.text).map_err(|e| syntax(&src.file, e))?
        }
        (None, false) => Signature::empty(),
    };
    let theta = parse_meta_ctx(&c.meta).map_err(|e| syntax("<meta>", e))?;
    let syms = parse_symbol_ctx(&c.syms).map_err(|e| syntax("<syms>", e))?;
    let vars = parse_var_ctx(&c.vars).map_err(|e| syntax("<vars>", e))?;
    let env = Env { sig, theta, syms, vars, print: PrintOptions { unicode: c.unicode, sugar: c.sugar } };
    let source = match &c.term {
        Some(t) => option_source("term", t),
        None => {
            let text = stdin().map_err(|e| Failure::usage(Diagnostic::error(format!("cannot read stdin: {e}"))))?;
            Source { file: "<stdin>".into(), text }
        }
    };
    let m = env.parse(source, &env.theta)?;

    match &cli.command {
        Command::Check => {
            let sort = env.check(&m)?;
            Ok(Success { text: format!("{sort}\n"), json: json!(sort.as_str()) })
        }
        Command::Fv => Ok(name_list(algebra::free_vars(&m.term))),
        Command::Fs => Ok(name_list(algebra::free_syms(&m.term))),
        Command::Rename { map, target_syms } => rename(&env, &m, map, target_syms.as_deref()),
        Command::Subst { target, with } => subst(&env, &m, target, with),
        Command::Msubst { target, with } => msubst(&env, &m, target, with),
        Command::Interpret { env: path, target_meta, target_syms, target_vars } => {
            interpret(&env, &m, path, target_meta, target_syms.as_deref(), target_vars.as_deref())
        }
        Command::Wf { sort } => {
            let sort = Sort::new(sort);
            match check_wf(&env.sig, &env.syms, &env.vars, &m.term, &sort) {
                Ok(()) => Ok(Success { text: format!("wellformed at {sort}\n"), json: json!("wellformed") }),
                Err(e) => Err(Failure::check(m.diagnostic(e.to_string(), e.path()))),
            }
        }
        Command::SheafReport { .. } => unreachable!("handled before the term is read"),
    }
}

fn name_list(names: BTreeSet<Name>) -> Success {
    let list: Vec<&str> = names.iter().map(Name::as_str).collect();
    Success { text: format!("{}\n", list.join(" ")), json: json!(list) }
}

fn term_result(env: &Env, m: &Term) -> Success {
    let printed = env.show(m);
    Success { text: format!("{printed}\n"), json: json!(printed) }
}

fn algebra_failure(m: &Located, e: AlgebraError) -> Failure {
    match &e {
        AlgebraError::Check(c) => m.check_error(c),
        _ => Failure::check(Diagnostic::error(e.to_string())),
    }
}

fn parse_pairs(text: &str) -> Result<Vec<(Name, Name)>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|pair| match pair.split_once('=') {
            Some((u, v)) if !u.trim().is_empty() && !v.trim().is_empty() => {
                Ok((Name::new(u.trim()), Name::new(v.trim())))
            }
            _ => Err(Failure::usage(Diagnostic::error(format!("expected `u=v`, found `{pair}`")))),
        })
        .collect()
}

fn rename(env: &Env, m: &Located, map: &str, target: Option<&str>) -> Result<Success, Failure> {
    let sort = env.check(m)?;
    let mut pairs: BTreeMap<Name, Name> = env.syms.names().map(|u| (u.clone(), u.clone())).collect();
    for (u, v) in parse_pairs(map)? {
        if !env.syms.contains(u.as_str()) {
            return Err(Failure::check(Diagnostic::error(format!("symbol `{u}` is not in the renaming's domain"))));
        }
        pairs.insert(u, v);
    }
    let cod = match target {
        Some(text) => parse_symbol_ctx(text).map_err(|e| syntax("<target-syms>", e))?,
        None => {
            let mut cod = SymbolCtx::empty();
            for (u, sigma) in env.syms.iter() {
                let image = pairs[u].clone();
                if cod.get(image.as_str()).is_some_and(|s| s != sigma) {
                    return Err(Failure::check(Diagnostic::error(format!("`{image}` receives two sorts"))));
                }
                cod = cod.shadow(image, sigma.clone());
            }
            cod
        }
    };
    let rho = Renaming::new(env.syms.clone(), cod.clone(), pairs)
        .map_err(|e| Failure::check(Diagnostic::error(e.to_string())))?;
    let out = algebra::rename(&m.term, &rho).map_err(|e| algebra_failure(m, e))?;
    let out_sort = check(&env.sig, &env.theta, &cod, &env.vars, &out)
        .map_err(|e| Failure::check(Diagnostic::error(format!("renamed term does not check: {e}"))))?;
    debug_assert_eq!(out_sort, sort);
    Ok(term_result(env, &out))
}

fn subst(env: &Env, m: &Located, target: &str, with: &str) -> Result<Success, Failure> {
    let x = Name::new(target);
    let expected = env
        .vars
        .get(target)
        .cloned()
        .ok_or_else(|| Failure::check(Diagnostic::error(format!("variable `{x}` is not in the variable context"))))?;
    env.check(m)?;
    let n = env.parse(option_source("with", with), &env.theta)?;
    let found = env.check(&n)?;
    if found != expected {
        return Err(Failure::check(
            n.diagnostic(format!("replacement has sort {found}, but `{x}` has sort {expected}"), &Path::root()),
        ));
    }
    Ok(term_result(env, &algebra::subst(&n.term, &x, &m.term)))
}

fn msubst(env: &Env, m: &Located, target: &str, with: &str) -> Result<Success, Failure> {
    let mv = Name::new(target);
    let valence = env.theta.get(target).cloned().ok_or_else(|| {
        Failure::check(Diagnostic::error(format!("metavariable `{mv}` is not in the metavariable context")))
    })?;
    env.check(m)?;
    let rest = env.theta.remove(target).expect("just looked up");
    let src = option_source("with", with);
    let e = parse_abstraction_in(&src.text, 0, src.text.len(), &env.sig, &rest, Some(&valence))
        .map_err(|e| syntax(&src.file, e))?;
    let found = check_abs(&env.sig, &rest, &env.syms, &env.vars, &e).map_err(|c| {
        Failure::check(Diagnostic::error(c.to_string()).at(&src.file, Span::new(0, src.text.len())))
    })?;
    if found != valence {
        return Err(Failure::check(
            Diagnostic::error(format!("expected an abstraction of valence {valence}, found {found}"))
                .at(&src.file, Span::new(0, src.text.len())),
        ));
    }
    let out = algebra::msubst(&e, &mv, &m.term).map_err(|e| algebra_failure(m, e))?;
    Ok(term_result(env, &out))
}

fn interpret(
    env: &Env,
    m: &Located,
    path: &str,
    target_meta: &str,
    target_syms: Option<&str>,
    target_vars: Option<&str>,
) -> Result<Success, Failure> {
    let sort = env.check(m)?;
    let target_theta = parse_meta_ctx(target_meta).map_err(|e| syntax("<target-meta>", e))?;
    let src = read_file(path)?;
    let environment = parse_environment(env, &src, &target_theta)?;
    let out = algebra::interpret(&env.theta, &env.syms, &env.vars, &m.term, &environment)
        .map_err(|e| algebra_failure(m, e))?;
    if let (Some(ts), Some(tv)) = (target_syms, target_vars) {
        let ts = parse_symbol_ctx(ts).map_err(|e| syntax("<target-syms>", e))?;
        let tv = parse_var_ctx(tv).map_err(|e| syntax("<target-vars>", e))?;
        let found = check(&env.sig, &target_theta, &ts, &tv, &out)
            .map_err(|e| Failure::check(Diagnostic::error(format!("result does not check in the target: {e}"))))?;
        if found != sort {
            return Err(Failure::check(Diagnostic::error(format!("result has sort {found}, expected {sort}"))));
        }
    }
    Ok(term_result(env, &out))
}

fn parse_environment(env: &Env, src: &Source, target_theta: &MetaCtx) -> Result<Environment, Failure> {
    let mut out = Environment::default();
    let mut offset = 0;
    for line in src.text.split_inclusive('\n') {
        let start = offset;
        offset += line.len();
        let content = line.split('#').next().unwrap_or("").trim_end();
        let trimmed = content.trim_start();
        if trimmed.is_empty() {
            continue;
        }
        let lead = start + (content.len() - trimmed.len());
        let bad = |msg: &str| Failure::usage(Diagnostic::error(msg).at(&src.file, Span::new(lead, lead + trimmed.len())));
        let (kind, rest) = trimmed.split_once(char::is_whitespace).ok_or_else(|| bad("expected `KIND NAME = VALUE`"))?;
        let (name, value) = rest.split_once('=').ok_or_else(|| bad("expected `=`"))?;
        let name = Name::new(name.trim());
        let value_start = lead + (trimmed.len() - value.len());
        let value_end = lead + trimmed.len();
        match kind {
            "sym" => {
                out.syms.insert(name, Name::new(value.trim()));
            }
            "var" => {
                let (t, _) = parse_term_in(&src.text, value_start, value_end, &env.sig, target_theta)
                    .map_err(|e| syntax(&src.file, e))?;
                out.vars.insert(name, t);
            }
            "meta" => {
                let valence = env.theta.get(name.as_str()).ok_or_else(|| bad("metavariable is not in the context"))?;
                let e = parse_abstraction_in(&src.text, value_start, value_end, &env.sig, target_theta, Some(valence))
                    .map_err(|e| syntax(&src.file, e))?;
                out.meta.insert(name, e);
            }
            _ => return Err(bad("expected `sym`, `var` or `meta`")),
        }
    }
    Ok(out)
}

fn sheaf_report(
    sorts: &str,
    max_size: usize,
    fiber: usize,
    samples: usize,
    random_fiber: usize,
    seed: u64,
    jsonl: bool,
) -> Result<Success, Failure> {
    let sorts: Vec<Sort> = sorts.split(',').map(str::trim).filter(|s| !s.is_empty()).map(Sort::new).collect();
    if sorts.is_empty() {
        return Err(Failure::usage(Diagnostic::error("at least one sort is required")));
    }
    let budget = Budget { exhaustive_fiber: fiber, samples, random_fiber, seed };
    let report = pullback_agreement(&sorts, max_size, &budget);
    let json = serde_json::to_value(&report).expect("reports serialize");
    if report.disagreements > 0 {
        let first = report.first_disagreement().expect("counted above");
        let d = Diagnostic::error(format!(
            "{} of {} presheaves disagree; first: {} #{}",
            report.disagreements,
            report.checked(),
            first.source,
            first.index
        ));
        return Err(Failure::check(d));
    }
    let text = if jsonl {
        report
            .records
            .iter()
            .map(|r| json_line(&serde_json::to_value(r).expect("records serialize")))
            .collect()
    } else {
        format!(
            "site: sorts {}, contexts up to size {}, pool {}\n\
             objects {}, arrows {}, pullback squares {}\n\
             presheaves: {} exhaustive (fibers <= {}), {} random (fibers <= {}, seed {})\n\
             sheaves {}, disagreements {}\n",
            report.sorts.join(","),
            report.max_size,
            report.pool,
            report.objects,
            report.arrows,
            report.pullback_squares,
            report.exhaustive,
            fiber,
            report.sampled,
            random_fiber,
            seed,
            report.sheaves,
            report.disagreements,
        )
    };
    Ok(Success { text, json })
}
