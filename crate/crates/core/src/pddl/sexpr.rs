use std::collections::BTreeMap;

use super::{PddlError, Span};

#[derive(Clone, Debug)]
pub(crate) enum SExpr {
    Atom(String, Span),
    List(Vec<SExpr>, Span, Span),
}

impl SExpr {
    pub fn span(&self) -> Span {
        match self {
            SExpr::Atom(_, s) | SExpr::List(_, s, _) => *s,
        }
    }

    /// Span of the closing parenthesis for lists, the token itself otherwise.
    pub fn end_span(&self) -> Span {
        match self {
            SExpr::Atom(_, s) | SExpr::List(_, _, s) => *s,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(a, _) => Some(a),
            SExpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _, _) => Some(items),
            SExpr::Atom(..) => None,
        }
    }
}

/// Parsed source: top-level expressions plus `;` comments keyed by line.
pub(crate) struct Source {
    pub exprs: Vec<SExpr>,
    pub comments: BTreeMap<usize, String>,
}

enum Tok {
    Open(Span),
    Close(Span),
    Word(String, Span),
}

fn lex(text: &str) -> (Vec<Tok>, BTreeMap<usize, String>) {
    let mut toks = Vec::new();
    let mut comments = BTreeMap::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let span = Span { line, column: col };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '(' => {
                chars.next();
                col += 1;
                toks.push(Tok::Open(span));
            }
            ')' => {
                chars.next();
                col += 1;
                toks.push(Tok::Close(span));
            }
            ';' => {
                let mut body = String::new();
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    body.push(c);
                    chars.next();
                    col += 1;
                }
                let body = body.trim_start_matches(';').trim().to_string();
                comments.insert(line, body);
            }
            _ => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    word.push(c);
                    chars.next();
                    col += 1;
                }
                toks.push(Tok::Word(word, span));
            }
        }
    }
    (toks, comments)
}

pub(crate) fn parse_source(text: &str) -> Result<Source, PddlError> {
    let (toks, comments) = lex(text);
    let mut stack: Vec<(Vec<SExpr>, Span)> = Vec::new();
    let mut top = Vec::new();
    for tok in toks {
        match tok {
            Tok::Open(span) => stack.push((Vec::new(), span)),
            Tok::Close(span) => {
                let (items, open) = stack
                    .pop()
                    .ok_or_else(|| PddlError::syntax(span, "unexpected `)`"))?;
                let list = SExpr::List(items, open, span);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(list),
                    None => top.push(list),
                }
            }
            Tok::Word(w, span) => {
                let atom = SExpr::Atom(w, span);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(atom),
                    None => top.push(atom),
                }
            }
        }
    }
    if let Some((_, open)) = stack.last() {
        return Err(PddlError::syntax(*open, "unclosed `(`"));
    }
    Ok(Source {
        exprs: top,
        comments,
    })
}
