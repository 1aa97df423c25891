//! Polynomial expression grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' exponent)?
//! atom   := integer | identifier | 'rt' | '(' expr ')'
//! ```
//!
//! `rt` is `√D` for the problem's field. Division is only allowed by nonzero
//! constants, which is how rational literals such as `4/3` are written.

use thiserror::Error;

use crate::exactalg::{AlgebraError, Context, Polynomial, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("negative exponent at {pos}")]
    NegativeExponent { pos: usize },
    #[error("at {pos}: {source}")]
    Algebra { pos: usize, source: AlgebraError },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(String),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

fn lex(s: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].1.is_ascii_digit() {
                j += 1;
            }
            out.push((Tok::Int(chars[i..j].iter().map(|x| x.1).collect()), pos));
            i = j;
        } else if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].1.is_alphanumeric() || chars[j].1 == '_') {
                j += 1;
            }
            out.push((Tok::Ident(chars[i..j].iter().map(|x| x.1).collect()), pos));
            i = j;
        } else {
            let t = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => {
                    return Err(ParseError::Syntax { pos, msg: format!("unexpected character `{c}`") })
                }
            };
            out.push((t, pos));
            i += 1;
        }
    }
    out.push((Tok::End, s.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    ctx: &'a Context,
    d: u32,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn alg<T>(&self, pos: usize, r: Result<T, AlgebraError>) -> Result<T, ParseError> {
        r.map_err(|source| ParseError::Algebra { pos, source })
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    let pos = self.bump().1;
                    let rhs = self.term()?;
                    acc = self.alg(pos, acc.checked_add(&rhs))?;
                }
                Tok::Op('-') => {
                    let pos = self.bump().1;
                    let rhs = self.term()?;
                    acc = self.alg(pos, acc.checked_sub(&rhs))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    let pos = self.bump().1;
                    let rhs = self.unary()?;
                    acc = self.alg(pos, acc.checked_mul(&rhs))?;
                }
                Tok::Op('/') => {
                    let pos = self.bump().1;
                    let rhs = self.unary()?;
                    let c = rhs.constant_value().ok_or_else(|| ParseError::Syntax {
                        pos,
                        msg: "division by a non-constant expression".into(),
                    })?;
                    let inv = self.alg(pos, c.inv())?;
                    acc = acc.scale(&inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial, ParseError> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(-&self.unary()?)
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.atom()?;
        if self.peek() != &Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        match self.bump().0 {
            Tok::Int(s) => {
                let e: u32 = s.parse().map_err(|_| ParseError::Syntax {
                    pos,
                    msg: "exponent too large".into(),
                })?;
                Ok(base.pow(e))
            }
            Tok::Op('-') => Err(ParseError::NegativeExponent { pos }),
            _ => Err(ParseError::Syntax { pos, msg: "expected integer exponent".into() }),
        }
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Int(s) => {
                let n: num_bigint::BigInt = s.parse().expect("digits");
                Ok(Polynomial::constant(
                    self.ctx,
                    Scalar::from_rational(num_rational::BigRational::from_integer(n)),
                ))
            }
            Tok::Ident(name) => {
                if let Some(i) = self.ctx.index_of(&name) {
                    Ok(Polynomial::var(self.ctx, i))
                } else if name == "rt" && self.d != 0 {
                    let r = self.alg(pos, Scalar::sqrt_of(self.d))?;
                    Ok(Polynomial::constant(self.ctx, r))
                } else {
                    Err(ParseError::UnknownIdentifier { name, pos })
                }
            }
            Tok::LParen => {
                let inner = self.expr()?;
                match self.bump() {
                    (Tok::RParen, _) => Ok(inner),
                    (_, p) => Err(ParseError::Syntax { pos: p, msg: "expected `)`".into() }),
                }
            }
            Tok::End => Err(ParseError::Syntax { pos, msg: "unexpected end of input".into() }),
            t => Err(ParseError::Syntax { pos, msg: format!("unexpected token {t:?}") }),
        }
    }
}

/// Parses an expression into a polynomial over `Q(√d)` in context `ctx`.
pub fn parse_poly(expr: &str, ctx: &Context, d: u32) -> Result<Polynomial, ParseError> {
    crate::exactalg::check_field(d).map_err(|source| ParseError::Algebra { pos: 0, source })?;
    let toks = lex(expr)?;
    let mut p = Parser { toks, at: 0, ctx, d };
    let out = p.expr()?;
    match p.peek() {
        Tok::End => Ok(out),
        _ => Err(ParseError::Syntax { pos: p.pos(), msg: "trailing input".into() }),
    }
}

/// Parses a constant expression such as `1/2`, `-rt/2` or `(1 + rt)`.
pub fn parse_scalar(expr: &str, d: u32) -> Result<Scalar, ParseError> {
    let p = parse_poly(expr, &Context::empty(), d)?;
    Ok(p.constant_value().expect("empty context yields constants"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx8() -> Context {
        let names: Vec<String> = (1..=8).map(|i| format!("x{i}")).collect();
        Context::new(&names)
    }

    #[test]
    fn simple_sum() {
        let c = ctx8();
        let p = parse_poly("x1^2 + x2^2", &c, 3).unwrap();
        assert_eq!(p.num_terms(), 2);
    }

    #[test]
    fn cubic_invariant_has_eight_terms() {
        let c = ctx8();
        let p = parse_poly(
            "-2*rt*x1^3 + 6*rt*x1*x2^2 - 3*rt*x1*x3^2 - 9*x2*x3^2 - 3*rt*x1*x4^2 + 9*x2*x4^2 + 18*x3*x4*x5 + 6*rt*x1*x5^2",
            &c,
            3,
        )
        .unwrap();
        assert_eq!(p.num_terms(), 8);
        assert!(p.is_homogeneous_of(3));
    }

    #[test]
    fn errors() {
        let c = ctx8();
        assert_eq!(
            parse_poly("x1 +", &c, 3),
            Err(ParseError::Syntax { pos: 4, msg: "unexpected end of input".into() })
        );
        assert_eq!(
            parse_poly("x1 + y", &c, 3),
            Err(ParseError::UnknownIdentifier { name: "y".into(), pos: 5 })
        );
        assert_eq!(parse_poly("x1^-2", &c, 3), Err(ParseError::NegativeExponent { pos: 3 }));
        assert!(matches!(parse_poly("rt*x1", &c, 0), Err(ParseError::UnknownIdentifier { .. })));
        assert!(matches!(parse_poly("x1/x2", &c, 0), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_poly("x1 x2", &c, 0), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_poly("1/0", &c, 0), Err(ParseError::Algebra { .. })));
    }

    #[test]
    fn precedence() {
        let c = Context::new(&["x"]);
        assert_eq!(parse_poly("-x^2", &c, 0).unwrap(), -&parse_poly("x^2", &c, 0).unwrap());
        assert_eq!(parse_poly("2*3^2", &c, 0).unwrap(), parse_poly("18", &c, 0).unwrap());
        assert_eq!(parse_poly("1 - 2 - 3", &c, 0).unwrap(), parse_poly("-4", &c, 0).unwrap());
        assert_eq!(parse_poly("4/3/2", &c, 0).unwrap(), parse_poly("2/3", &c, 0).unwrap());
        assert_eq!(parse_poly(" ( x+1 ) ^2", &c, 0).unwrap(), parse_poly("x^2+2*x+1", &c, 0).unwrap());
    }

    #[test]
    fn scalars() {
        assert_eq!(parse_scalar("1/rt", 3).unwrap().to_string(), "1/3*rt");
        assert_eq!(parse_scalar("-rt/2", 3).unwrap().to_string(), "-1/2*rt");
    }
}
