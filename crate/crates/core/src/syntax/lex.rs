use super::{Span, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBrack,
    RBrack,
    Comma,
    Dot,
    Colon,
    Eq,
    /// `\` or `ℵ`.
    Abs,
    /// `'`, the hypothesis sugar.
    Quote,
    /// `>>` or `≫`.
    Turnstile,
    /// `<>` or `⋄`.
    Diamond,
    /// `∇`.
    Nabla,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Abs => "`\\`".into(),
            Tok::Quote => "`'`".into(),
            Tok::Turnstile => "`>>`".into(),
            Tok::Diamond => "`<>`".into(),
            Tok::Nabla => "`∇`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

pub(crate) fn is_ident_start(c: char) -> bool {
    (c.is_alphabetic() && c != 'ℵ') || c == '_'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    is_ident_start(c) || c.is_alphanumeric() && c != 'ℵ' || c == '′'
}

/// Splits `src[from..to]` into tokens; spans are offsets into `src`.
pub(crate) fn lex(src: &str, from: usize, to: usize) -> Result<Vec<(Tok, Span)>, SyntaxError> {
    let text = &src[..to];
    let mut out = Vec::new();
    let mut chars = text[from..].char_indices().map(|(i, c)| (i + from, c)).peekable();
    while let Some((i, c)) = chars.next() {
        let single = |t: Tok| (t, Span::new(i, i + c.len_utf8()));
        let tok = match c {
            c if c.is_whitespace() => continue,
            '(' => single(Tok::LParen),
            ')' => single(Tok::RParen),
            '{' => single(Tok::LBrace),
            '}' => single(Tok::RBrace),
            '[' => single(Tok::LBrack),
            ']' => single(Tok::RBrack),
            ',' => single(Tok::Comma),
            '.' => single(Tok::Dot),
            ':' => single(Tok::Colon),
            '=' => single(Tok::Eq),
            '\\' | 'ℵ' => single(Tok::Abs),
            '\'' => single(Tok::Quote),
            '≫' => single(Tok::Turnstile),
            '⋄' => single(Tok::Diamond),
            '∇' => single(Tok::Nabla),
            '>' if matches!(chars.peek(), Some((_, '>'))) => {
                chars.next();
                (Tok::Turnstile, Span::new(i, i + 2))
            }
            '<' if matches!(chars.peek(), Some((_, '>'))) => {
                chars.next();
                (Tok::Diamond, Span::new(i, i + 2))
            }
            c if is_ident_start(c) || c.is_ascii_digit() => {
                let mut end = i + c.len_utf8();
                while let Some(&(j, d)) = chars.peek() {
                    if !is_ident_char(d) {
                        break;
                    }
                    end = j + d.len_utf8();
                    chars.next();
                }
                (Tok::Ident(text[i..end].to_string()), Span::new(i, end))
            }
            c => {
                return Err(SyntaxError::Parse {
                    message: format!("unexpected character `{c}`"),
                    span: Span::new(i, i + c.len_utf8()),
                })
            }
        };
        out.push(tok);
    }
    out.push((Tok::Eof, Span::new(to, to)));
    Ok(out)
}
