use std::collections::HashMap;
use std::str::FromStr;

use super::lex::{lex, Tok};
use super::{Span, SyntaxError};
use crate::contexts::{Ctx, MetaCtx, SymbolCtx, VarCtx};
use crate::name::{Name, Sort};
use crate::signature::{Arity, OperatorDecl, OperatorInst, Signature, Valence};
use crate::term::{Abstraction, Path, Term};

/// Source spans of the subterms of a parsed term, keyed by path.
pub type SpanMap = HashMap<Path, Span>;

struct Parser<'a> {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    sig: &'a Signature,
    theta: &'a MetaCtx,
    spans: SpanMap,
}

const EMPTY_SIG: &Signature = &Signature::EMPTY;
const EMPTY_META: &MetaCtx = &MetaCtx::EMPTY;

impl<'a> Parser<'a> {
    fn new(src: &str, from: usize, to: usize, sig: &'a Signature, theta: &'a MetaCtx) -> Result<Self, SyntaxError> {
        Ok(Parser { toks: lex(src, from, to)?, pos: 0, sig, theta, spans: SpanMap::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            self.toks[0].1.start
        } else {
            self.toks[self.pos - 1].1.end
        }
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError::Parse { message: message.into(), span: self.span() })
    }

    fn expect(&mut self, tok: &Tok) -> Result<Span, SyntaxError> {
        if self.peek() == tok {
            Ok(self.bump().1)
        } else {
            self.error(format!("expected {}, found {}", tok.describe(), self.peek().describe()))
        }
    }

    fn ident(&mut self) -> Result<(Name, Span), SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let span = self.bump().1;
                Ok((Name::from(s), span))
            }
            other => self.error(format!("expected an identifier, found {}", other.describe())),
        }
    }

    fn finish(&mut self) -> Result<(), SyntaxError> {
        if *self.peek() != Tok::Eof {
            return self.error(format!("unexpected {} after the end", self.peek().describe()));
        }
        Ok(())
    }

    /// `item (, item)*` up to `close`, which is consumed.
    fn list<T>(&mut self, close: &Tok, mut item: impl FnMut(&mut Self, usize) -> Result<T, SyntaxError>) -> Result<Vec<T>, SyntaxError> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(item(self, out.len())?);
            if self.eat(close) {
                return Ok(out);
            }
            self.expect(&Tok::Comma)?;
        }
    }

    fn sort(&mut self) -> Result<Sort, SyntaxError> {
        let (n, _) = self.ident()?;
        Ok(Sort::new(n.as_str()))
    }

    fn sort_list(&mut self, close: &Tok) -> Result<Vec<Sort>, SyntaxError> {
        self.list(close, |p, _| p.sort())
    }

    /// `{σ⃗}[τ⃗].τ`, with empty groups omissible and a bare `τ` allowed.
    fn valence(&mut self) -> Result<Valence, SyntaxError> {
        let symbols = if self.eat(&Tok::LBrace) { self.sort_list(&Tok::RBrace)? } else { Vec::new() };
        let vars = if self.eat(&Tok::LBrack) { self.sort_list(&Tok::RBrack)? } else { Vec::new() };
        if !symbols.is_empty() || !vars.is_empty() || *self.peek() == Tok::Dot {
            self.expect(&Tok::Dot)?;
        }
        Ok(Valence::new(symbols, vars, self.sort()?))
    }

    fn arity(&mut self) -> Result<Arity, SyntaxError> {
        self.expect(&Tok::LParen)?;
        let valences = self.list(&Tok::RParen, |p, _| p.valence())?;
        Ok(Arity::new(valences, self.sort()?))
    }

    fn ctx<T: Clone>(&mut self, mut value: impl FnMut(&mut Self) -> Result<T, SyntaxError>) -> Result<Ctx<T>, SyntaxError> {
        let mut ctx = Ctx::empty();
        if *self.peek() == Tok::Eof {
            return Ok(ctx);
        }
        if *self.peek() == Tok::Dot && *self.peek_at(1) == Tok::Eof {
            self.bump();
            return Ok(ctx);
        }
        loop {
            let (name, span) = self.ident()?;
            self.expect(&Tok::Colon)?;
            let v = value(self)?;
            ctx.push(name, v).map_err(|e| SyntaxError::Context { error: e, span })?;
            if *self.peek() == Tok::Eof {
                return Ok(ctx);
            }
            self.expect(&Tok::Comma)?;
        }
    }

    /// A term, with the sequent notation:
    /// `primary (, u:primary)* (>> primary)?`.
    fn term(&mut self, path: &Path) -> Result<Term, SyntaxError> {
        let start = self.span().start;
        let mut t = self.primary(path)?;
        while *self.peek() == Tok::Comma && matches!(self.peek_at(1), Tok::Ident(_)) && *self.peek_at(2) == Tok::Colon {
            let comma = self.bump().1;
            let (u, _) = self.ident()?;
            self.bump();
            let snoc = self.sugar_op("snoc", comma)?;
            // the chain so far is the first argument of the new node
            let h = self.relocate(t, path, &path.child(snoc.name(), 0));
            let a = self.primary(&path.child(snoc.name(), 1))?;
            t = Term::op(OperatorInst::new(snoc.decl, vec![u]), vec![Abstraction::bare(h), Abstraction::bare(a)]);
            self.spans.insert(path.clone(), Span::new(start, self.prev_end()));
        }
        if *self.peek() == Tok::Turnstile {
            let at = self.bump().1;
            let seq = self.sugar_op("sequent", at)?;
            let h = self.relocate(t, path, &path.child(seq.name(), 0));
            let a = self.primary(&path.child(seq.name(), 1))?;
            t = Term::op(seq, vec![Abstraction::bare(h), Abstraction::bare(a)]);
            self.spans.insert(path.clone(), Span::new(start, self.prev_end()));
        }
        Ok(t)
    }

    /// Moves the recorded spans of a subterm parsed at `from` to `to`.
    fn relocate(&mut self, t: Term, from: &Path, to: &Path) -> Term {
        let moved: Vec<(Path, Span)> = self
            .spans
            .iter()
            .filter(|(p, _)| p.0.starts_with(&from.0))
            .map(|(p, s)| (p.clone(), *s))
            .collect();
        for (p, _) in &moved {
            self.spans.remove(p);
        }
        for (p, s) in moved {
            let mut steps = to.0.clone();
            steps.extend_from_slice(&p.0[from.0.len()..]);
            self.spans.insert(Path(steps), s);
        }
        t
    }

    fn sugar_op(&self, name: &str, at: Span) -> Result<OperatorInst, SyntaxError> {
        match self.sig.operator(name) {
            Some(decl) => Ok(OperatorInst::new(decl.clone(), Vec::new())),
            None => Err(SyntaxError::Parse {
                message: format!("sequent notation needs an operator `{name}` in the signature"),
                span: at,
            }),
        }
    }

    fn primary(&mut self, path: &Path) -> Result<Term, SyntaxError> {
        let start = self.span().start;
        let t = match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let t = self.term(path)?;
                self.expect(&Tok::RParen)?;
                t
            }
            Tok::Diamond => {
                let at = self.bump().1;
                Term::op(self.sugar_op("nil", at)?, Vec::new())
            }
            Tok::Quote => {
                let at = self.bump().1;
                let (u, _) = self.ident()?;
                let mut hyp = self.sugar_op("hyp", at)?;
                hyp.params.push(u);
                Term::op(hyp, Vec::new())
            }
            Tok::Nabla => {
                let at = self.bump().1;
                self.schema_app("nabla", at, path)?
            }
            Tok::Ident(_) => self.headed(path)?,
            other => return self.error(format!("expected a term, found {}", other.describe())),
        };
        self.spans.insert(path.clone(), Span::new(start, self.prev_end()));
        Ok(t)
    }

    fn headed(&mut self, path: &Path) -> Result<Term, SyntaxError> {
        let (name, span) = self.ident()?;
        if let Some(decl) = self.sig.operator(name.as_str()) {
            let decl = decl.clone();
            let params = if self.eat(&Tok::LBrack) { self.list(&Tok::RBrack, |p, _| Ok(p.ident()?.0))? } else { Vec::new() };
            return self.op_args(OperatorInst::new(decl, params), path);
        }
        if self.sig.schema(name.as_str()).is_some() {
            return self.schema_app(name.as_str(), span, path);
        }
        if self.theta.contains(name.as_str()) {
            let params = if self.eat(&Tok::LBrace) { self.list(&Tok::RBrace, |p, _| Ok(p.ident()?.0))? } else { Vec::new() };
            let args = if self.eat(&Tok::LParen) {
                self.list(&Tok::RParen, |p, i| p.term(&path.child(&name, i)))?
            } else {
                Vec::new()
            };
            return Ok(Term::meta(name, params, args));
        }
        if matches!(self.peek(), Tok::LParen | Tok::LBrace | Tok::LBrack) {
            return Err(SyntaxError::UnknownOperator { name, span });
        }
        Ok(Term::Var(name))
    }

    fn schema_app(&mut self, head: &str, at: Span, path: &Path) -> Result<Term, SyntaxError> {
        self.expect(&Tok::LBrack)?;
        let sorts = self.sort_list(&Tok::RBrack)?;
        let decl = self
            .sig
            .instantiate(head, &sorts)
            .map_err(|error| SyntaxError::Signature { error, span: Span::new(at.start, self.prev_end()) })?;
        self.op_args(OperatorInst::new(decl, Vec::new()), path)
    }

    fn op_args(&mut self, inst: OperatorInst, path: &Path) -> Result<Term, SyntaxError> {
        let args = if self.eat(&Tok::LParen) {
            let decl = inst.decl.clone();
            self.list(&Tok::RParen, |p, i| p.abstraction(decl.arity.valences.get(i), &path.child(&decl.name, i)))?
        } else {
            Vec::new()
        };
        Ok(Term::op(inst, args))
    }

    /// Binder names, optionally annotated `u:sort`; unannotated binders take
    /// their sort from `expected` by position.
    fn binders(&mut self, close: &Tok, expected: Option<&[Sort]>) -> Result<Vec<(Name, Sort)>, SyntaxError> {
        self.list(close, |p, i| {
            let (name, span) = p.ident()?;
            if p.eat(&Tok::Colon) {
                return Ok((name, p.sort()?));
            }
            match expected.and_then(|e| e.get(i)) {
                Some(s) => Ok((name, s.clone())),
                None => Err(SyntaxError::Parse {
                    message: format!("cannot tell the sort of binder `{name}`; annotate it as `{name}:sort`"),
                    span,
                }),
            }
        })
    }

    fn abstraction(&mut self, expected: Option<&Valence>, path: &Path) -> Result<Abstraction, SyntaxError> {
        let explicit = self.eat(&Tok::Abs);
        let grouped = matches!(self.peek(), Tok::LBrace | Tok::LBrack | Tok::Dot);
        if !explicit && !grouped {
            return Ok(Abstraction::bare(self.term(path)?));
        }
        let symbols = if self.eat(&Tok::LBrace) {
            self.binders(&Tok::RBrace, expected.map(|v| v.symbols.as_slice()))?
        } else {
            Vec::new()
        };
        let vars = if self.eat(&Tok::LBrack) {
            self.binders(&Tok::RBrack, expected.map(|v| v.vars.as_slice()))?
        } else {
            Vec::new()
        };
        self.expect(&Tok::Dot)?;
        let body = self.term(path)?;
        Ok(Abstraction::new(symbols, vars, body))
    }
}

/// Parses a signature file: `sort s` and `op name {σ⃗} : (v⃗) τ` lines, `#`
/// comments. Sorts may be declared in any order relative to operators.
pub fn parse_signature(text: &str) -> Result<Signature, SyntaxError> {
    let mut sorts = Vec::new();
    let mut ops = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let content_end = offset + line.find('#').unwrap_or(line.len());
        let mut p = Parser::new(text, offset, content_end, EMPTY_SIG, EMPTY_META)?;
        offset += line.len();
        if *p.peek() == Tok::Eof {
            continue;
        }
        let (kw, kw_span) = p.ident()?;
        match kw.as_str() {
            "sort" => {
                let (name, span) = p.ident()?;
                sorts.push((Sort::new(name.as_str()), span));
            }
            "op" => {
                let (name, span) = p.ident()?;
                let params = if p.eat(&Tok::LBrace) { p.sort_list(&Tok::RBrace)? } else { Vec::new() };
                p.expect(&Tok::Colon)?;
                let arity = p.arity()?;
                ops.push((OperatorDecl::new(name, params, arity), Span::new(span.start, p.prev_end())));
            }
            other => {
                return Err(SyntaxError::Parse {
                    message: format!("expected `sort` or `op`, found `{other}`"),
                    span: kw_span,
                })
            }
        }
        p.finish()?;
    }
    let mut sig = Signature::empty();
    for (sort, span) in sorts {
        sig = sig.extend(vec![sort], vec![]).map_err(|error| SyntaxError::Signature { error, span })?;
    }
    for (op, span) in ops {
        sig = sig.extend(vec![], vec![op]).map_err(|error| SyntaxError::Signature { error, span })?;
    }
    Ok(sig)
}

/// `u:exp, v:exp`; `.` or the empty string for the empty context.
pub fn parse_symbol_ctx(text: &str) -> Result<SymbolCtx, SyntaxError> {
    let mut p = Parser::new(text, 0, text.len(), EMPTY_SIG, EMPTY_META)?;
    let ctx = p.ctx(|p| p.sort())?;
    p.finish()?;
    Ok(ctx)
}

/// Same format as [`parse_symbol_ctx`].
pub fn parse_var_ctx(text: &str) -> Result<VarCtx, SyntaxError> {
    parse_symbol_ctx(text)
}

/// `m:{exp}[exp].exp, n:exp`.
pub fn parse_meta_ctx(text: &str) -> Result<MetaCtx, SyntaxError> {
    let mut p = Parser::new(text, 0, text.len(), EMPTY_SIG, EMPTY_META)?;
    let ctx = p.ctx(|p| p.valence())?;
    p.finish()?;
    Ok(ctx)
}

/// Parses a term, resolving head identifiers against the signature first,
/// then the metavariable context; other identifiers are variables.
pub fn parse_term(text: &str, sig: &Signature, theta: &MetaCtx) -> Result<Term, SyntaxError> {
    Ok(parse_term_spanned(text, sig, theta)?.0)
}

/// [`parse_term`], also returning the span of every subterm.
pub fn parse_term_spanned(text: &str, sig: &Signature, theta: &MetaCtx) -> Result<(Term, SpanMap), SyntaxError> {
    parse_term_in(text, 0, text.len(), sig, theta)
}

/// Parses `text[from..to]`; spans stay relative to `text`.
pub fn parse_term_in(
    text: &str,
    from: usize,
    to: usize,
    sig: &Signature,
    theta: &MetaCtx,
) -> Result<(Term, SpanMap), SyntaxError> {
    let mut p = Parser::new(text, from, to, sig, theta)?;
    let t = p.term(&Path::root())?;
    p.finish()?;
    Ok((t, p.spans))
}

/// Parses an abstraction `\{u⃗}[x⃗].M`. Binder sorts come from annotations
/// (`u:exp`) or else from `expected`.
pub fn parse_abstraction(
    text: &str,
    sig: &Signature,
    theta: &MetaCtx,
    expected: Option<&Valence>,
) -> Result<Abstraction, SyntaxError> {
    parse_abstraction_in(text, 0, text.len(), sig, theta, expected)
}

pub fn parse_abstraction_in(
    text: &str,
    from: usize,
    to: usize,
    sig: &Signature,
    theta: &MetaCtx,
    expected: Option<&Valence>,
) -> Result<Abstraction, SyntaxError> {
    let mut p = Parser::new(text, from, to, sig, theta)?;
    let e = p.abstraction(expected, &Path::root())?;
    p.finish()?;
    Ok(e)
}

impl FromStr for Valence {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Valence, SyntaxError> {
        let mut p = Parser::new(s, 0, s.len(), EMPTY_SIG, EMPTY_META)?;
        let v = p.valence()?;
        p.finish()?;
        Ok(v)
    }
}

impl FromStr for Arity {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Arity, SyntaxError> {
        let mut p = Parser::new(s, 0, s.len(), EMPTY_SIG, EMPTY_META)?;
        let a = p.arity()?;
        p.finish()?;
        Ok(a)
    }
}
