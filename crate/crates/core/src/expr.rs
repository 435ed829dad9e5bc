//! Canonical text syntax for scalars and algebra elements.
//!
//! Grammar: sums and differences of products and quotients of powers.
//! Atoms are decimal literals, identifiers and parenthesised expressions.
//! The identifiers `i`, `s` and `q` denote the imaginary unit, the square
//! root of the deformation parameter and `q = s^2`; any other identifier is
//! resolved by the caller (usually as an algebra generator).

use crate::error::{Error, Result};
use crate::scalar::Field;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(String),
    Ident(String, usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(String),
    Ident(String),
    Sym(char),
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let (pos, ch) = chars[k];
        if ch.is_whitespace() {
            k += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = k;
            while k < chars.len() && (chars[k].1.is_ascii_digit() || chars[k].1 == '.') {
                k += 1;
            }
            let lit: String = chars[start..k].iter().map(|c| c.1).collect();
            out.push((Token::Num(lit), pos));
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = k;
            while k < chars.len() && (chars[k].1.is_ascii_alphanumeric() || chars[k].1 == '_') {
                k += 1;
            }
            let name: String = chars[start..k].iter().map(|c| c.1).collect();
            out.push((Token::Ident(name), pos));
        } else if "+-*/^()".contains(ch) {
            out.push((Token::Sym(ch), pos));
            k += 1;
        } else {
            return Err(Error::Parse {
                offset: pos,
                message: format!("unexpected character `{ch}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|t| &t.0)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn error<T>(&self, message: &str) -> Result<T> {
        Err(Error::Parse {
            offset: self.offset(),
            message: message.to_string(),
        })
    }

    fn eat(&mut self, sym: char) -> bool {
        if self.peek() == Some(&Token::Sym(sym)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut acc = self.product()?;
        loop {
            if self.eat('+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.product()?));
            } else if self.eat('-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.product()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = Expr::Mul(Box::new(acc), Box::new(self.unary()?));
            } else if self.eat('/') {
                acc = Expr::Div(Box::new(acc), Box::new(self.unary()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let paren = self.eat('(');
        let negative = self.eat('-');
        let exponent = match self.peek() {
            Some(Token::Num(n)) => match n.parse::<i64>() {
                Ok(v) => v,
                Err(_) => return self.error("exponent must be an integer"),
            },
            _ => return self.error("expected integer exponent"),
        };
        self.pos += 1;
        if paren && !self.eat(')') {
            return self.error("expected `)`");
        }
        Ok(Expr::Pow(
            Box::new(base),
            if negative { -exponent } else { exponent },
        ))
    }

    fn atom(&mut self) -> Result<Expr> {
        let offset = self.offset();
        match self.peek().cloned() {
            Some(Token::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(n))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                Ok(Expr::Ident(name, offset))
            }
            Some(Token::Sym('(')) => {
                self.pos += 1;
                let inner = self.sum()?;
                if !self.eat(')') {
                    return self.error("expected `)`");
                }
                Ok(inner)
            }
            _ => self.error("expected a number, identifier or `(`"),
        }
    }
}

/// Parse text into an expression tree.
pub fn parse(text: &str) -> Result<Expr> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        end: text.len(),
    };
    if parser.tokens.is_empty() {
        return parser.error("empty expression");
    }
    let expr = parser.sum()?;
    if parser.pos != parser.tokens.len() {
        return parser.error("unexpected trailing input");
    }
    Ok(expr)
}

/// Interpretation of expression trees in some ring.
pub trait Evaluator {
    type Value;
    fn scalar(&self, c: ScalarAtom) -> Result<Self::Value>;
    fn ident(&self, name: &str, offset: usize) -> Result<Self::Value>;
    fn add(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn neg(&self, a: Self::Value) -> Self::Value;
    fn mul(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value>;
    fn div(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value>;
    fn pow(&self, a: Self::Value, n: i64) -> Result<Self::Value>;

    fn eval(&self, expr: &Expr) -> Result<Self::Value> {
        Ok(match expr {
            Expr::Num(text) => self.scalar(ScalarAtom::Literal(text))?,
            Expr::Ident(name, offset) => match name.as_str() {
                "i" => self.scalar(ScalarAtom::I)?,
                "s" => self.scalar(ScalarAtom::S)?,
                "q" => self.pow(self.scalar(ScalarAtom::S)?, 2)?,
                _ => self.ident(name, *offset)?,
            },
            Expr::Add(a, b) => self.add(self.eval(a)?, self.eval(b)?),
            Expr::Sub(a, b) => self.add(self.eval(a)?, self.neg(self.eval(b)?)),
            Expr::Mul(a, b) => self.mul(self.eval(a)?, self.eval(b)?)?,
            Expr::Div(a, b) => self.div(self.eval(a)?, self.eval(b)?)?,
            Expr::Neg(a) => self.neg(self.eval(a)?),
            Expr::Pow(a, n) => self.pow(self.eval(a)?, *n)?,
        })
    }
}

/// Scalar leaves of the syntax.
pub enum ScalarAtom<'a> {
    Literal(&'a str),
    I,
    S,
}

impl ScalarAtom<'_> {
    pub fn value<F: Field>(&self) -> Result<F> {
        let missing = |what: &str| Error::Parse {
            offset: 0,
            message: format!("`{what}` is not available in the {} field", F::KIND),
        };
        match self {
            Self::Literal(text) => F::from_literal(text),
            Self::I => F::imag_unit().ok_or_else(|| missing("i")),
            Self::S => F::param_s().ok_or_else(|| missing("s")),
        }
    }
}

struct ScalarEvaluator<F>(std::marker::PhantomData<F>);

impl<F: Field> Evaluator for ScalarEvaluator<F> {
    type Value = F;
    fn scalar(&self, c: ScalarAtom) -> Result<F> {
        c.value()
    }
    fn ident(&self, name: &str, offset: usize) -> Result<F> {
        Err(Error::Parse {
            offset,
            message: format!("unknown symbol `{name}`"),
        })
    }
    fn add(&self, a: F, b: F) -> F {
        a.add_ref(&b)
    }
    fn neg(&self, a: F) -> F {
        a.neg_ref()
    }
    fn mul(&self, a: F, b: F) -> Result<F> {
        Ok(a.mul_ref(&b))
    }
    fn div(&self, a: F, b: F) -> Result<F> {
        a.div_ref(&b)
    }
    fn pow(&self, a: F, n: i64) -> Result<F> {
        a.pow_i(n)
    }
}

/// Parse a scalar of field `F`.
pub fn parse_scalar<F: Field>(text: &str) -> Result<F> {
    ScalarEvaluator(std::marker::PhantomData).eval(&parse(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{GaussianRational, RatFunc};

    #[test]
    fn precedence() {
        let x: RatFunc = parse_scalar("2*s^2/(s-1) - 3").unwrap();
        let y: RatFunc = parse_scalar("(2*q - 3*s + 3)/(s-1)").unwrap();
        assert_eq!(x, y);
        let z: GaussianRational = parse_scalar("-(1+i)^2").unwrap();
        assert_eq!(z, GaussianRational::from_ints(0, -2));
    }

    #[test]
    fn negative_exponents() {
        let x: RatFunc = parse_scalar("q^-1 + s^(-2)").unwrap();
        let y: RatFunc = parse_scalar("2/q").unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn errors_carry_offsets() {
        match parse("1 + $") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        assert!(parse("(1+2").is_err());
        assert!(parse("").is_err());
        assert!(parse_scalar::<RatFunc>("x").is_err());
    }
}
