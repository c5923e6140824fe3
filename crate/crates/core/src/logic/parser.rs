use thiserror::Error;

use super::{BinOp, Cardinal, Formula, Quantifier, Span, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub message: String,
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(u64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Semi,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Arrow,
    Equals,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::End => "end of input".into(),
            other => format!("`{}`", match other {
                Tok::LParen => "(",
                Tok::RParen => ")",
                Tok::LBracket => "[",
                Tok::RBracket => "]",
                Tok::Comma => ",",
                Tok::Dot => ".",
                Tok::Semi => ";",
                Tok::Not => "~",
                Tok::And => "&",
                Tok::Or => "|",
                Tok::Implies => "=>",
                Tok::Iff => "<=>",
                Tok::Arrow => "->",
                Tok::Equals => "=",
                _ => unreachable!(),
            }),
        }
    }
}

const KEYWORDS: &[&str] = &["E", "A", "Einf", "Ecard", "Emod", "H", "In", "true", "false"];

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

fn lex(src: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let two = |s: &str| src[i..].starts_with(s);
        let tok = if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), Span::new(start, i)));
            continue;
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = src[start..i]
                .parse()
                .map_err(|_| error(src, start, "number too large"))?;
            out.push((Tok::Num(n), Span::new(start, i)));
            continue;
        } else if two("<=>") {
            i += 3;
            Tok::Iff
        } else if two("=>") {
            i += 2;
            Tok::Implies
        } else if two("->") {
            i += 2;
            Tok::Arrow
        } else {
            i += 1;
            match c {
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'[' => Tok::LBracket,
                b']' => Tok::RBracket,
                b',' => Tok::Comma,
                b'.' => Tok::Dot,
                b';' => Tok::Semi,
                b'~' => Tok::Not,
                b'&' => Tok::And,
                b'|' => Tok::Or,
                b'=' => Tok::Equals,
                _ => {
                    let ch = src[start..].chars().next().unwrap_or('?');
                    return Err(error(src, start, &format!("unexpected character `{ch}`")));
                }
            }
        };
        out.push((tok, Span::new(start, i)));
    }
    out.push((Tok::End, Span::new(src.len(), src.len())));
    Ok(out)
}

fn error(src: &str, offset: usize, message: &str) -> ParseError {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    ParseError {
        message: message.to_string(),
        offset,
        line,
        column,
    }
}

/// Parses a formula; no scoping or fragment checks.
pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        src,
        toks: lex(src)?,
        pos: 0,
    };
    let f = p.formula()?;
    p.expect(Tok::End)?;
    Ok(f)
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn prev_end(&self) -> usize {
        self.toks[self.pos.saturating_sub(1)].1.end
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, message: String) -> Result<T, ParseError> {
        Err(error(self.src, self.span().start, &message))
    }

    fn expect(&mut self, t: Tok) -> Result<Span, ParseError> {
        if *self.peek() == t {
            Ok(self.bump().1)
        } else {
            self.fail(format!("expected {}, found {}", t.describe(), self.peek().describe()))
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let start = self.span().start;
        let mut left = self.implies()?;
        while self.eat(&Tok::Iff) {
            let right = self.implies()?;
            left = Formula::Binary(BinOp::Iff, Box::new(left), Box::new(right), Span::new(start, self.prev_end()));
        }
        Ok(left)
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let start = self.span().start;
        let left = self.or()?;
        if self.eat(&Tok::Implies) {
            let right = self.implies()?;
            return Ok(Formula::Binary(
                BinOp::Implies,
                Box::new(left),
                Box::new(right),
                Span::new(start, self.prev_end()),
            ));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let start = self.span().start;
        let mut left = self.and()?;
        while self.eat(&Tok::Or) {
            let right = self.and()?;
            left = Formula::Binary(BinOp::Or, Box::new(left), Box::new(right), Span::new(start, self.prev_end()));
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let start = self.span().start;
        let mut left = self.unary()?;
        while self.eat(&Tok::And) {
            let right = self.unary()?;
            left = Formula::Binary(BinOp::And, Box::new(left), Box::new(right), Span::new(start, self.prev_end()));
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let start = self.span().start;
        if self.eat(&Tok::Not) {
            let f = self.unary()?;
            return Ok(Formula::Not(Box::new(f), Span::new(start, self.prev_end())));
        }
        let Tok::Ident(word) = self.peek().clone() else {
            return self.atom();
        };
        let q = match word.as_str() {
            "E" => Quantifier::Exists,
            "A" => Quantifier::Forall,
            "Einf" => Quantifier::ExistsInf,
            "Ecard" => {
                self.bump();
                self.expect(Tok::LBracket)?;
                let c = match self.bump() {
                    (Tok::Num(n), _) => Cardinal::Finite(n),
                    (Tok::Ident(s), _) if s == "aleph0" => Cardinal::Aleph0,
                    (Tok::Ident(s), _) if s == "continuum" => Cardinal::Continuum,
                    (t, s) => {
                        return Err(error(
                            self.src,
                            s.start,
                            &format!("expected a cardinal (n, aleph0 or continuum), found {}", t.describe()),
                        ))
                    }
                };
                self.expect(Tok::RBracket)?;
                return self.quantified(Quantifier::ExistsCard(c), start);
            }
            "Emod" => {
                self.bump();
                self.expect(Tok::LBracket)?;
                let t = self.number()?;
                self.expect(Tok::Comma)?;
                let k = self.number()?;
                self.expect(Tok::RBracket)?;
                return self.quantified(Quantifier::ExistsMod { t, k }, start);
            }
            "H" => {
                self.bump();
                let vs = self.binder()?;
                self.expect(Tok::Dot)?;
                self.expect(Tok::LParen)?;
                let a = self.formula()?;
                self.expect(Tok::Semi)?;
                let b = self.formula()?;
                self.expect(Tok::RParen)?;
                return Ok(Formula::Haertig(vs, Box::new(a), Box::new(b), Span::new(start, self.prev_end())));
            }
            _ => return self.atom(),
        };
        self.bump();
        self.quantified(q, start)
    }

    fn quantified(&mut self, q: Quantifier, start: usize) -> Result<Formula, ParseError> {
        let vs = self.binder()?;
        self.expect(Tok::Dot)?;
        let body = self.formula()?;
        Ok(Formula::Quant(q, vs, Box::new(body), Span::new(start, self.prev_end())))
    }

    fn number(&mut self) -> Result<u64, ParseError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(n)
            }
            t => self.fail(format!("expected a number, found {}", t.describe())),
        }
    }

    fn var(&mut self) -> Result<Var, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                let (_, span) = self.bump();
                Ok(Var { name, span })
            }
            t => self.fail(format!("expected a variable, found {}", t.describe())),
        }
    }

    fn binder(&mut self) -> Result<Vec<Var>, ParseError> {
        if self.eat(&Tok::LParen) {
            let mut vs = vec![self.var()?];
            while self.eat(&Tok::Comma) {
                vs.push(self.var()?);
            }
            self.expect(Tok::RParen)?;
            Ok(vs)
        } else {
            Ok(vec![self.var()?])
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let start = self.span().start;
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(w) if w == "true" || w == "false" => {
                let (_, span) = self.bump();
                Ok(Formula::Const(w == "true", span))
            }
            Tok::Ident(w) if w == "In" => {
                self.bump();
                self.expect(Tok::LBracket)?;
                let name = match self.bump() {
                    (Tok::Ident(n), _) => n,
                    (t, s) => {
                        return Err(error(self.src, s.start, &format!("expected a predicate name, found {}", t.describe())))
                    }
                };
                self.expect(Tok::RBracket)?;
                self.expect(Tok::LParen)?;
                let x = self.var()?;
                self.expect(Tok::RParen)?;
                Ok(Formula::Pred(name, x, Span::new(start, self.prev_end())))
            }
            Tok::Ident(_) => {
                let x = self.var()?;
                if self.eat(&Tok::Arrow) {
                    Ok(Formula::Rel(x, self.var()?))
                } else if self.eat(&Tok::Equals) {
                    Ok(Formula::Eq(x, self.var()?))
                } else {
                    self.fail(format!("expected `->` or `=`, found {}", self.peek().describe()))
                }
            }
            t => self.fail(format!("expected a formula, found {}", t.describe())),
        }
    }
}
