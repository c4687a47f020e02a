//! Parser for the polynomial expressions accepted by `bdk apply`.
//!
//! ```text
//! expr   := ['+' | '-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := rational | 'x' index ['^' exponent]
//! ```
//!
//! For example `1/2*x1^2*x2 - 3*x2 + 1`. Positions in errors are byte offsets.

use bdk_core::error::{BdkError, Result};
use bdk_core::rational::parse_rational;
use bdk_core::{CartesianPolynomial, Rational};
use num_traits::One;

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    dim: usize,
}

fn err<T>(position: usize, message: impl Into<String>) -> Result<T> {
    Err(BdkError::Parse {
        position,
        message: message.into(),
    })
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn digits(&mut self) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        let at = self.pos;
        let s = self.digits();
        if s.is_empty() {
            return err(at, format!("expected {what}"));
        }
        s.parse().or_else(|_| err(at, format!("{what} out of range")))
    }

    fn expr(&mut self) -> Result<CartesianPolynomial> {
        let mut total = CartesianPolynomial::zero(self.dim);
        self.skip_ws();
        let mut sign = Rational::one();
        match self.peek() {
            Some(b'-') => {
                sign = -sign;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        loop {
            let t = self.term()?;
            total = &total + &t.scale(&sign);
            self.skip_ws();
            match self.peek() {
                None => return Ok(total),
                Some(b'+') => sign = Rational::one(),
                Some(b'-') => sign = -Rational::one(),
                Some(c) => return err(self.pos, format!("unexpected character {:?}", c as char)),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<CartesianPolynomial> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.peek() != Some(b'*') {
                return Ok(acc);
            }
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
    }

    fn factor(&mut self) -> Result<CartesianPolynomial> {
        self.skip_ws();
        let at = self.pos;
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                let var_at = self.pos;
                let i = self.number("variable index")? as usize;
                if i == 0 || i > self.dim {
                    return err(var_at, format!("variable x{i} outside dimension {}", self.dim));
                }
                let mut k = 1;
                self.skip_ws();
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.skip_ws();
                    k = self.number("exponent")?;
                }
                Ok(CartesianPolynomial::variable(self.dim, i).pow(k))
            }
            Some(b) if b.is_ascii_digit() => {
                self.digits();
                self.skip_ws();
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    let den_at = self.pos;
                    if self.digits().is_empty() {
                        return err(den_at, "expected denominator");
                    }
                }
                let text = &self.src[at..self.pos];
                let c = parse_rational(text).or_else(|e| err(at, e.to_string()))?;
                Ok(CartesianPolynomial::constant(self.dim, c))
            }
            Some(c) => err(at, format!("expected a number or variable, found {:?}", c as char)),
            None => err(at, "unexpected end of input"),
        }
    }
}

pub fn parse_polynomial(src: &str, dim: usize) -> Result<CartesianPolynomial> {
    if dim == 0 {
        return Err(BdkError::InvalidArgument("dimension must be >= 1".into()));
    }
    Parser { src, pos: 0, dim }.expr()
}
