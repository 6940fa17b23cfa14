//! Line-level s-expression reader with source positions.

use super::{ParseError, ParseErrorKind, SourceSpan};

#[derive(Debug, Clone, PartialEq)]
pub enum SexpKind {
    Symbol(String),
    List(Vec<Sexp>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sexp {
    pub kind: SexpKind,
    pub span: SourceSpan,
}

impl Sexp {
    pub fn symbol(&self) -> Option<&str> {
        match &self.kind {
            SexpKind::Symbol(s) => Some(s),
            SexpKind::List(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open,
    Close,
    Symbol(String),
}

fn tokenize(line: &str, line_no: usize) -> Vec<(Token, SourceSpan)> {
    let mut out = Vec::new();
    let mut chars = line.chars().enumerate().peekable();
    while let Some((i, c)) = chars.next() {
        let span = SourceSpan { line: line_no, column: i + 1 };
        match c {
            '#' => break,
            '(' => out.push((Token::Open, span)),
            ')' => out.push((Token::Close, span)),
            c if c.is_whitespace() => {}
            c => {
                let mut s = String::from(c);
                while let Some(&(_, n)) = chars.peek() {
                    if n.is_whitespace() || n == '(' || n == ')' || n == '#' {
                        break;
                    }
                    s.push(n);
                    chars.next();
                }
                out.push((Token::Symbol(s), span));
            }
        }
    }
    out
}

/// Reads every top-level item on one line. Comments start at `#`.
pub fn read_line(line: &str, line_no: usize) -> Result<Vec<Sexp>, ParseError> {
    let tokens = tokenize(line, line_no);
    let mut stack: Vec<(SourceSpan, Vec<Sexp>)> = Vec::new();
    let mut top = Vec::new();
    for (tok, span) in tokens {
        match tok {
            Token::Open => stack.push((span, Vec::new())),
            Token::Close => {
                let (open_span, items) = stack.pop().ok_or_else(|| ParseError {
                    span,
                    kind: ParseErrorKind::Syntax("unbalanced `)`".into()),
                })?;
                let node = Sexp { kind: SexpKind::List(items), span: open_span };
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(node),
                    None => top.push(node),
                }
            }
            Token::Symbol(s) => {
                let node = Sexp { kind: SexpKind::Symbol(s), span };
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(node),
                    None => top.push(node),
                }
            }
        }
    }
    if let Some((span, _)) = stack.pop() {
        return Err(ParseError { span, kind: ParseErrorKind::Syntax("unclosed `(`".into()) });
    }
    Ok(top)
}
