//! Angle expressions: numbers, `pi`, `+ - * /`, `sqrt`, `acos` and
//! parentheses. A function may take a bare operand (`sqrt3`, `acos 0.5`),
//! and a number followed by `pi`, a function or `(` multiplies (`5pi/18`).

use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("bad expression {input:?}: {reason}")]
pub struct ExprError {
    pub input: String,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    Num(f64),
    Pi,
    Sqrt,
    Acos,
    Plus,
    Minus,
    Star,
    Slash,
    Open,
    Close,
}

fn tokenize(s: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' | '-' | '*' | '/' | '(' | ')' => {
                out.push(match c {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    '(' => Tok::Open,
                    _ => Tok::Close,
                });
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                // exponent, only when followed by digits
                if i < chars.len() && matches!(chars[i], 'e' | 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && matches!(chars[j], '+' | '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                out.push(Tok::Num(
                    text.parse().map_err(|_| format!("bad number {text:?}"))?,
                ));
            }
            c if c.is_ascii_alphabetic() || c == 'π' => {
                if c == 'π' {
                    out.push(Tok::Pi);
                    i += 1;
                    continue;
                }
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphabetic() {
                    i += 1;
                }
                let word: String = chars[start..i]
                    .iter()
                    .collect::<String>()
                    .to_ascii_lowercase();
                out.push(match word.as_str() {
                    "pi" => Tok::Pi,
                    "sqrt" => Tok::Sqrt,
                    "acos" | "arccos" => Tok::Acos,
                    _ => return Err(format!("unknown name {word:?}")),
                });
            }
            _ => return Err(format!("unexpected character {c:?}")),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.peek();
        self.pos += 1;
        t
    }

    // expr := term (('+' | '-') term)*
    fn expr(&mut self) -> Result<f64, String> {
        let mut v = self.term()?;
        while let Some(t @ (Tok::Plus | Tok::Minus)) = self.peek() {
            self.pos += 1;
            let r = self.term()?;
            v = if t == Tok::Plus { v + r } else { v - r };
        }
        Ok(v)
    }

    // term := unary (('*' | '/') unary | implicit-product)*
    fn term(&mut self) -> Result<f64, String> {
        let mut v = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    v *= self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    v /= self.unary()?;
                }
                Some(Tok::Pi | Tok::Sqrt | Tok::Acos | Tok::Open) => v *= self.unary()?,
                _ => return Ok(v),
            }
        }
    }

    fn unary(&mut self) -> Result<f64, String> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<f64, String> {
        match self.next() {
            Some(Tok::Num(x)) => Ok(x),
            Some(Tok::Pi) => Ok(PI),
            Some(Tok::Open) => {
                let v = self.expr()?;
                match self.next() {
                    Some(Tok::Close) => Ok(v),
                    _ => Err("missing ')'".into()),
                }
            }
            Some(Tok::Sqrt) => {
                let x = self.unary()?;
                if x < 0.0 {
                    return Err(format!("sqrt of negative {x}"));
                }
                Ok(x.sqrt())
            }
            Some(Tok::Acos) => {
                let x = self.unary()?;
                if !(-1.0..=1.0).contains(&x) {
                    return Err(format!("acos argument {x} outside [-1, 1]"));
                }
                Ok(x.acos())
            }
            Some(t) => Err(format!("unexpected {t:?}")),
            None => Err("unexpected end".into()),
        }
    }
}

/// Evaluates an angle expression.
pub fn eval(input: &str) -> Result<f64, ExprError> {
    let fail = |reason: String| ExprError {
        input: input.to_string(),
        reason,
    };
    let toks = tokenize(input).map_err(fail)?;
    if toks.is_empty() {
        return Err(fail("empty".into()));
    }
    let mut p = Parser { toks, pos: 0 };
    let v = p.expr().map_err(fail)?;
    if p.pos != p.toks.len() {
        return Err(fail(format!("trailing input at token {}", p.pos + 1)));
    }
    if !v.is_finite() {
        return Err(fail(format!("value {v} is not finite")));
    }
    Ok(v)
}
