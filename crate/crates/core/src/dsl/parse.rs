//! Recursive-descent parser for ladder-operator polynomials.
//!
//! ```text
//! expr    := sign? term (('+' | '-') term)*
//! term    := factor ('*'? factor)*
//! factor  := NUMBER | 'i' | 'a' | 'ad' | 'b' | 'bd'
//!          | 'cis' '(' angle ')'
//!          | '(' sign? NUMBER ',' sign? NUMBER ')'      complex pair
//!          | '(' expr ')'
//! angle   := sign? (NUMBER '*'? 'theta' | NUMBER | 'theta')
//! ```
//!
//! `cis(x)` is `e^{ix}`. The Unicode minus `−` is accepted as `-`.

use num_complex::Complex64;
use thiserror::Error;

use super::expr::{Letter, OperatorExpr, MAX_DEGREE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol {name:?} at position {pos}")]
    UnknownSymbol { pos: usize, name: String },
    #[error("symbol 'theta' used at position {pos} but no value was bound")]
    UnboundTheta { pos: usize },
    #[error("word of degree {degree} exceeds the cap of {cap}")]
    DegreeCap { degree: usize, cap: usize },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Comma,
    LParen,
    RParen,
    End,
}

struct Lexed {
    tok: Tok,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<Lexed>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let pos = i;
        match ch {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '+' => out.push(Lexed { tok: Tok::Plus, pos }),
            '-' | '\u{2212}' => out.push(Lexed { tok: Tok::Minus, pos }),
            '*' => out.push(Lexed { tok: Tok::Star, pos }),
            ',' => out.push(Lexed { tok: Tok::Comma, pos }),
            '(' => out.push(Lexed { tok: Tok::LParen, pos }),
            ')' => out.push(Lexed { tok: Tok::RParen, pos }),
            c if c.is_ascii_digit() || c == '.' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                    j += 1;
                }
                // exponent only when followed by a digit (optionally signed)
                if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                    let mut k = j + 1;
                    if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].is_ascii_digit() {
                        while k < chars.len() && chars[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let s: String = chars[i..j].iter().collect();
                let v: f64 = s.parse().map_err(|_| ParseError::Syntax {
                    pos,
                    msg: format!("malformed number {s:?}"),
                })?;
                out.push(Lexed { tok: Tok::Num(v), pos });
                i = j;
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                out.push(Lexed { tok: Tok::Ident(s), pos });
                i = j;
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    pos,
                    msg: format!("unexpected character {other:?}"),
                })
            }
        }
        i += 1;
    }
    out.push(Lexed {
        tok: Tok::End,
        pos: chars.len(),
    });
    Ok(out)
}

struct Parser<'t> {
    toks: &'t [Lexed],
    at: usize,
    theta: Option<f64>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.at + offset).min(self.toks.len() - 1);
        &self.toks[idx].tok
    }

    fn pos(&self) -> usize {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> &Tok {
        let t = &self.toks[self.at].tok;
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.syntax(format!("expected {what}")))
        }
    }

    fn syntax(&self, msg: String) -> ParseError {
        ParseError::Syntax {
            pos: self.pos(),
            msg,
        }
    }

    fn expr(&mut self) -> Result<OperatorExpr, ParseError> {
        let mut negate = false;
        match self.peek() {
            Tok::Plus => {
                self.bump();
            }
            Tok::Minus => {
                self.bump();
                negate = true;
            }
            _ => {}
        }
        let first = self.term()?;
        let mut acc = if negate { -&first } else { first };
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Tok::Num(_) | Tok::Ident(_) | Tok::LParen)
    }

    fn term(&mut self) -> Result<OperatorExpr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if *self.peek() == Tok::Star {
                self.bump();
                acc = &acc * &self.factor()?;
            } else if self.starts_factor() {
                acc = &acc * &self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<OperatorExpr, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(OperatorExpr::scalar(Complex64::new(v, 0.0)))
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "i" => Ok(OperatorExpr::scalar(Complex64::i())),
                    "a" => Ok(OperatorExpr::letter(Letter::A)),
                    "ad" => Ok(OperatorExpr::letter(Letter::Ad)),
                    "b" => Ok(OperatorExpr::letter(Letter::B)),
                    "bd" => Ok(OperatorExpr::letter(Letter::Bd)),
                    "cis" => {
                        self.expect(Tok::LParen, "'(' after cis")?;
                        let x = self.angle()?;
                        self.expect(Tok::RParen, "')' closing cis")?;
                        Ok(OperatorExpr::scalar(Complex64::from_polar(1.0, x)))
                    }
                    "theta" => Err(self.syntax("'theta' is only allowed inside cis(...)".into())),
                    _ => Err(ParseError::UnknownSymbol { pos, name }),
                }
            }
            Tok::LParen => {
                if let Some(z) = self.try_complex_pair() {
                    return Ok(OperatorExpr::scalar(z));
                }
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::End => Err(self.syntax("unexpected end of input".into())),
            other => Err(self.syntax(format!("unexpected token {other:?}"))),
        }
    }

    /// `( sign? NUM , sign? NUM )`, consumed only on a full match.
    fn try_complex_pair(&mut self) -> Option<Complex64> {
        let mut k = 1;
        let read = |k: &mut usize| -> Option<f64> {
            let sign = match self.peek_at(*k) {
                Tok::Minus => {
                    *k += 1;
                    -1.0
                }
                Tok::Plus => {
                    *k += 1;
                    1.0
                }
                _ => 1.0,
            };
            match self.peek_at(*k) {
                Tok::Num(v) => {
                    *k += 1;
                    Some(sign * v)
                }
                _ => None,
            }
        };
        let re = read(&mut k)?;
        if *self.peek_at(k) != Tok::Comma {
            return None;
        }
        k += 1;
        let im = read(&mut k)?;
        if *self.peek_at(k) != Tok::RParen {
            return None;
        }
        k += 1;
        for _ in 0..k {
            self.bump();
        }
        Some(Complex64::new(re, im))
    }

    fn angle(&mut self) -> Result<f64, ParseError> {
        let sign = match self.peek() {
            Tok::Minus => {
                self.bump();
                -1.0
            }
            Tok::Plus => {
                self.bump();
                1.0
            }
            _ => 1.0,
        };
        let mut factor = 1.0;
        let mut saw_number = false;
        if let Tok::Num(v) = *self.peek() {
            self.bump();
            factor = v;
            saw_number = true;
            if *self.peek() == Tok::Star {
                self.bump();
            } else if !matches!(self.peek(), Tok::Ident(_)) {
                return Ok(sign * factor);
            }
        }
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(name) if name == "theta" => {
                self.bump();
                let theta = self.theta.ok_or(ParseError::UnboundTheta { pos })?;
                Ok(sign * factor * theta)
            }
            Tok::Ident(name) => Err(ParseError::UnknownSymbol { pos, name }),
            _ if saw_number => Err(self.syntax("expected 'theta' after '*'".into())),
            _ => Err(self.syntax("expected a number or 'theta'".into())),
        }
    }
}

fn run(text: &str, theta: Option<f64>) -> Result<OperatorExpr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks: &toks,
        at: 0,
        theta,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.syntax(format!("unexpected trailing token {:?}", p.peek())));
    }
    let degree = e.degree();
    if degree > MAX_DEGREE {
        return Err(ParseError::DegreeCap {
            degree,
            cap: MAX_DEGREE,
        });
    }
    Ok(e)
}

/// Parse an expression that does not mention `theta`.
pub fn parse(text: &str) -> Result<OperatorExpr, ParseError> {
    run(text, None)
}

/// Parse an expression with `theta` bound to a value.
pub fn parse_with_theta(text: &str, theta: f64) -> Result<OperatorExpr, ParseError> {
    run(text, Some(theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::order::reorder;
    use Letter::*;

    #[test]
    fn homodyne_text_matches_builder() {
        for theta in [0.0, 0.4, -2.1] {
            let e = parse_with_theta("cis(theta)*ad*b + cis(-theta)*a*bd", theta).unwrap();
            assert_eq!(e, OperatorExpr::homodyne(theta));
        }
    }

    #[test]
    fn zero_times_anything_is_empty() {
        assert!(parse("0*a").unwrap().is_zero());
    }

    #[test]
    fn commutator_text() {
        let e = parse("a*ad − ad*a").unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(reorder(&e), OperatorExpr::one());
    }

    #[test]
    fn juxtaposition_and_literals() {
        let e = parse("2i a ad + (0.5, -1) b").unwrap();
        assert_eq!(e.coeff(&[A, Ad]), Complex64::new(0.0, 2.0));
        assert_eq!(e.coeff(&[B]), Complex64::new(0.5, -1.0));
        let e = parse("1e-3*bd + 2.5E2").unwrap();
        assert_eq!(e.coeff(&[Bd]), Complex64::new(1e-3, 0.0));
        assert_eq!(e.constant(), Complex64::new(250.0, 0.0));
    }

    #[test]
    fn parentheses_distribute_in_order() {
        let e = parse("(a + b)*(ad - bd)").unwrap();
        assert_eq!(e.coeff(&[A, Ad]), Complex64::new(1.0, 0.0));
        assert_eq!(e.coeff(&[A, Bd]), Complex64::new(-1.0, 0.0));
        assert_eq!(e.coeff(&[Ad, B]), Complex64::new(1.0, 0.0));
        assert_eq!(e.coeff(&[B, Bd]), Complex64::new(-1.0, 0.0));
        assert_eq!(e.coeff(&[Ad, A]), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn cis_forms() {
        let e = parse_with_theta("cis(2*theta) + cis(0.5) + cis(-3 theta)", 0.1).unwrap();
        let want = Complex64::from_polar(1.0, 0.2)
            + Complex64::from_polar(1.0, 0.5)
            + Complex64::from_polar(1.0, -0.3);
        assert!((e.constant() - want).norm() < 1e-15);
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse("a + q"),
            Err(ParseError::UnknownSymbol {
                pos: 4,
                name: "q".into()
            })
        );
        assert!(matches!(parse("a + "), Err(ParseError::Syntax { pos: 4, .. })));
        assert!(matches!(parse("a $ b"), Err(ParseError::Syntax { pos: 2, .. })));
        assert!(matches!(parse("(a + b"), Err(ParseError::Syntax { pos: 6, .. })));
        assert_eq!(parse("cis(theta)"), Err(ParseError::UnboundTheta { pos: 4 }));
        assert!(matches!(parse("a)"), Err(ParseError::Syntax { pos: 1, .. })));
    }

    #[test]
    fn degree_cap() {
        assert!(parse("a a a a ad ad ad ad").is_ok());
        assert_eq!(
            parse("a a a a ad ad ad ad b"),
            Err(ParseError::DegreeCap { degree: 9, cap: 8 })
        );
    }

    #[test]
    fn canonical_print_round_trip() {
        let e = parse_with_theta("cis(theta)*ad*b*b + 0.1*(a - i bd)*(ad + 3) - 7", 0.9).unwrap();
        let printed = e.to_string();
        assert_eq!(parse(&printed).unwrap(), e);
    }
}
