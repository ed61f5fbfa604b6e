//! Text syntax for scalar expressions: infix `+ - * / ^`, `sin`/`cos`/`exp`
//! application, rational literals, coordinate identifiers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::ScalarExpr;
use crate::error::{Error, Result};

const MAX_DEPTH: usize = 256;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(input: &str) -> Result<Vec<Tok>> {
    let mut toks = Vec::new();
    let bytes = input.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                toks.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                toks.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                toks.push(Tok::Star);
                i += 1;
            }
            '/' => {
                toks.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                toks.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                toks.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                toks.push(Tok::RParen);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let mut value = BigRational::from_integer(
                    input[start..i].parse::<BigInt>().expect("digit run"),
                );
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    let fstart = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    if fstart == i {
                        return Err(Error::Parse(format!(
                            "expected digits after decimal point at byte {i}"
                        )));
                    }
                    let frac: BigInt = input[fstart..i].parse().expect("digit run");
                    let scale = BigInt::from(10u32).pow((i - fstart) as u32);
                    value += BigRational::new(frac, scale);
                }
                toks.push(Tok::Num(value));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push(Tok::Ident(input[start..i].to_string()));
            }
            _ => {
                return Err(Error::Parse(format!(
                    "unexpected character `{c}` at byte {i}"
                )))
            }
        }
    }
    toks.push(Tok::End);
    Ok(toks)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<()> {
        if self.peek() == t {
            self.next();
            Ok(())
        } else {
            Err(Error::Parse(format!(
                "expected {what}, found {:?}",
                self.peek()
            )))
        }
    }

    fn expr(&mut self, depth: usize) -> Result<ScalarExpr> {
        if depth > MAX_DEPTH {
            return Err(Error::Parse("expression too deeply nested".into()));
        }
        let mut lhs = self.term(depth + 1)?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.next();
                    lhs = lhs + self.term(depth + 1)?;
                }
                Tok::Minus => {
                    self.next();
                    lhs = lhs - self.term(depth + 1)?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self, depth: usize) -> Result<ScalarExpr> {
        if depth > MAX_DEPTH {
            return Err(Error::Parse("expression too deeply nested".into()));
        }
        let mut lhs = self.unary(depth + 1)?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.next();
                    lhs = lhs * self.unary(depth + 1)?;
                }
                Tok::Slash => {
                    self.next();
                    let rhs = self.unary(depth + 1)?;
                    lhs = lhs * rhs.pow(-1);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self, depth: usize) -> Result<ScalarExpr> {
        if depth > MAX_DEPTH {
            return Err(Error::Parse("expression too deeply nested".into()));
        }
        if self.peek() == &Tok::Minus {
            self.next();
            return Ok(-self.unary(depth + 1)?);
        }
        self.power(depth + 1)
    }

    fn power(&mut self, depth: usize) -> Result<ScalarExpr> {
        if depth > MAX_DEPTH {
            return Err(Error::Parse("expression too deeply nested".into()));
        }
        let base = self.primary(depth + 1)?;
        if self.peek() == &Tok::Caret {
            self.next();
            let exp_expr = self.unary(depth + 1)?;
            let k = integer_exponent(&exp_expr)?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn primary(&mut self, depth: usize) -> Result<ScalarExpr> {
        if depth > MAX_DEPTH {
            return Err(Error::Parse("expression too deeply nested".into()));
        }
        match self.next() {
            Tok::Num(c) => Ok(ScalarExpr::Rational(c)),
            Tok::Ident(name) => {
                if self.peek() == &Tok::LParen {
                    let func = match name.as_str() {
                        "sin" | "cos" | "exp" => name,
                        _ => {
                            return Err(Error::Parse(format!(
                                "unknown function `{name}` (expected sin, cos or exp)"
                            )))
                        }
                    };
                    self.next();
                    let arg = self.expr(depth + 1)?;
                    self.expect(&Tok::RParen, "`)`")?;
                    Ok(match func.as_str() {
                        "sin" => arg.sin(),
                        "cos" => arg.cos(),
                        _ => arg.exp(),
                    })
                } else {
                    Ok(ScalarExpr::Coord(name))
                }
            }
            Tok::LParen => {
                let e = self.expr(depth + 1)?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(e)
            }
            other => Err(Error::Parse(format!(
                "expected a number, coordinate or `(`, found {other:?}"
            ))),
        }
    }
}

/// The exponent of `^` must normalize to an integer constant.
pub(crate) fn integer_exponent(e: &ScalarExpr) -> Result<i32> {
    let c = e
        .as_rational()
        .ok_or_else(|| Error::Parse(format!("exponent `{e}` is not a constant")))?;
    if !c.denom().is_one() {
        return Err(Error::Parse(format!("exponent `{e}` is not an integer")));
    }
    if c.numer().is_zero() {
        return Ok(0);
    }
    c.numer()
        .to_i32()
        .ok_or_else(|| Error::Parse(format!("exponent `{e}` out of range")))
}

/// Parse the shared expression text syntax into an (unnormalized) tree.
pub fn parse_scalar(input: &str) -> Result<ScalarExpr> {
    let toks = lex(input)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr(0)?;
    if p.peek() != &Tok::End {
        return Err(Error::Parse(format!(
            "trailing input after expression: {:?}",
            p.peek()
        )));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals_and_precedence() {
        let e = parse_scalar("1/2*x + x^2*t - 3").unwrap();
        let expected = ScalarExpr::rational(1, 2) * ScalarExpr::coord("x")
            + ScalarExpr::coord("x").pow(2) * ScalarExpr::coord("t")
            - ScalarExpr::int(3);
        assert!(e.equivalent(&expected));
    }

    #[test]
    fn power_binds_tighter_than_unary_minus() {
        let e = parse_scalar("-x^2").unwrap();
        assert!(e.equivalent(&-ScalarExpr::coord("x").pow(2)));
    }

    #[test]
    fn division_desugars_to_inverse() {
        let e = parse_scalar("x^2/x").unwrap();
        assert!(e.equivalent(&ScalarExpr::coord("x")));
    }

    #[test]
    fn functions_parse() {
        let e = parse_scalar("sin(x*t) + exp(0)").unwrap();
        let expected = (ScalarExpr::coord("x") * ScalarExpr::coord("t")).sin() + ScalarExpr::one();
        assert!(e.equivalent(&expected));
    }

    #[test]
    fn decimal_literals_are_exact() {
        let e = parse_scalar("0.5").unwrap();
        assert!(e.equivalent(&ScalarExpr::rational(1, 2)));
    }

    #[test]
    fn errors_are_reported() {
        assert!(parse_scalar("x +").is_err());
        assert!(parse_scalar("foo(x)").is_err());
        assert!(parse_scalar("x ^ t").is_err());
        assert!(parse_scalar("x $ y").is_err());
    }
}
