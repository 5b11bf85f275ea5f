use std::fmt::{self, Write};

use crate::name::Name;
use crate::term::{Abstraction, Term};

/// Rendering switches for [`print_term_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PrintOptions {
    /// `ℵ`, `∇`, `⋄` and `≫` instead of `\`, `nabla`, `<>` and `>>`.
    pub unicode: bool,
    /// Telescope and sequent notation for `nil`, `snoc`, `sequent`, `hyp`.
    pub sugar: bool,
}

/// ASCII rendering, the inverse of parsing up to α.
pub fn print_term(m: &Term) -> String {
    print_term_with(m, PrintOptions::default())
}

pub fn print_term_with(m: &Term, opts: PrintOptions) -> String {
    let mut out = String::new();
    Printer { opts, out: &mut out }.term(m, Level::Full).expect("writing to a string");
    out
}

pub fn print_abstraction(e: &Abstraction) -> String {
    print_abstraction_with(e, PrintOptions::default())
}

pub fn print_abstraction_with(e: &Abstraction, opts: PrintOptions) -> String {
    let mut out = String::new();
    Printer { opts, out: &mut out }.abs(e).expect("writing to a string");
    out
}

/// Sequent notation binds loosest, then telescope extension.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Full,
    Chain,
    Primary,
}

enum Sugar<'a> {
    Nil,
    Snoc(&'a Name, &'a Term, &'a Term),
    Sequent(&'a Term, &'a Term),
    Hyp(&'a Name),
}

fn sugar(m: &Term) -> Option<Sugar<'_>> {
    let Term::Op { inst, args } = m else { return None };
    if !args.iter().all(Abstraction::binds_nothing) {
        return None;
    }
    match (inst.name().as_str(), inst.params.as_slice(), args.as_slice()) {
        ("nil", [], []) => Some(Sugar::Nil),
        ("snoc", [u], [h, a]) => Some(Sugar::Snoc(u, &h.body, &a.body)),
        ("sequent", [], [h, a]) => Some(Sugar::Sequent(&h.body, &a.body)),
        ("hyp", [u], []) => Some(Sugar::Hyp(u)),
        _ => None,
    }
}

struct Printer<'a> {
    opts: PrintOptions,
    out: &'a mut String,
}

impl Printer<'_> {
    fn names(&mut self, open: &str, names: impl IntoIterator<Item = impl fmt::Display>, close: &str) -> fmt::Result {
        self.out.push_str(open);
        for (i, n) in names.into_iter().enumerate() {
            if i > 0 {
                self.out.push(',');
            }
            write!(self.out, "{n}")?;
        }
        self.out.push_str(close);
        Ok(())
    }

    fn term(&mut self, m: &Term, level: Level) -> fmt::Result {
        if self.opts.sugar {
            if let Some(s) = sugar(m) {
                return self.sugared(s, level);
            }
        }
        match m {
            Term::Var(x) => write!(self.out, "{x}"),
            Term::Meta { name, params, args } => {
                write!(self.out, "{name}")?;
                if !params.is_empty() {
                    self.names("{", params, "}")?;
                }
                if !args.is_empty() {
                    self.out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            self.out.push_str(", ");
                        }
                        self.term(a, Level::Full)?;
                    }
                    self.out.push(')');
                }
                Ok(())
            }
            Term::Op { inst, args } => {
                let name = inst.name().as_str();
                match name.strip_prefix("nabla") {
                    Some(rest) if self.opts.unicode && rest.starts_with('[') => write!(self.out, "∇{rest}")?,
                    _ => self.out.push_str(name),
                }
                if !inst.params.is_empty() {
                    self.names("[", &inst.params, "]")?;
                }
                if !args.is_empty() {
                    self.out.push('(');
                    for (i, e) in args.iter().enumerate() {
                        if i > 0 {
                            self.out.push_str(", ");
                        }
                        self.abs(e)?;
                    }
                    self.out.push(')');
                }
                Ok(())
            }
        }
    }

    fn abs(&mut self, e: &Abstraction) -> fmt::Result {
        if !e.binds_nothing() {
            self.out.push_str(if self.opts.unicode { "ℵ" } else { "\\" });
            if !e.symbols.is_empty() {
                self.names("{", e.symbols.iter().map(|(u, _)| u), "}")?;
            }
            if !e.vars.is_empty() {
                self.names("[", e.vars.iter().map(|(x, _)| x), "]")?;
            }
            self.out.push('.');
        }
        self.term(&e.body, Level::Full)
    }

    fn sugared(&mut self, s: Sugar<'_>, level: Level) -> fmt::Result {
        let parens = match s {
            Sugar::Sequent(..) => level > Level::Full,
            Sugar::Snoc(..) => level > Level::Chain,
            _ => false,
        };
        if parens {
            self.out.push('(');
        }
        match s {
            Sugar::Nil => self.out.push_str(if self.opts.unicode { "⋄" } else { "<>" }),
            Sugar::Hyp(u) => write!(self.out, "'{u}")?,
            Sugar::Snoc(u, h, a) => {
                self.term(h, Level::Chain)?;
                write!(self.out, ", {u}:")?;
                self.term(a, Level::Primary)?;
            }
            Sugar::Sequent(h, a) => {
                self.term(h, Level::Chain)?;
                self.out.push_str(if self.opts.unicode { " ≫ " } else { " >> " });
                self.term(a, Level::Primary)?;
            }
        }
        if parens {
            self.out.push(')');
        }
        Ok(())
    }
}
