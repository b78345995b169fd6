//! A small polynomial-expression parser shared by every text format.
//!
//! Accepts sums of products of rational literals and named symbols with
//! nonnegative integer powers, parentheses, and implicit multiplication
//! (`2pi^3`, `X_0*Y_1 - 7X_1^2`). Interpretation of the symbols (`pi`,
//! `varpi`, `t`, variable names) is left to the caller.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{bail, Result};

pub type Monomial = BTreeMap<String, u32>;

/// A polynomial over `Q` in named symbols.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SymPoly {
    pub terms: BTreeMap<Monomial, BigRational>,
}

impl SymPoly {
    fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::new(), c);
        }
        SymPoly { terms }
    }

    fn symbol(name: &str) -> Self {
        let mut m = Monomial::new();
        m.insert(name.to_string(), 1);
        let mut terms = BTreeMap::new();
        terms.insert(m, BigRational::one());
        SymPoly { terms }
    }

    fn add(&self, other: &Self, sign: i32) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let e = terms.entry(m.clone()).or_insert_with(BigRational::zero);
            if sign > 0 {
                *e += c;
            } else {
                *e -= c;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        SymPoly { terms }
    }

    fn mul(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m = m1.clone();
                for (k, e) in m2 {
                    *m.entry(k.clone()).or_insert(0) += e;
                }
                *terms.entry(m).or_insert_with(BigRational::zero) += c1 * c2;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        SymPoly { terms }
    }

    fn pow(&self, e: u32) -> Self {
        let mut r = SymPoly::constant(BigRational::one());
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    text: &'a str,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        bail!(Parse, "{msg} at column {} in `{}`", self.pos + 1, self.text)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<SymPoly> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                SymPoly::default().add(&self.term()?, -1)
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?, 1);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?, -1);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<SymPoly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.power()?);
                }
                Some(c) if c == b'(' || c.is_ascii_alphanumeric() => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<SymPoly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let n = self.integer()?;
            let Ok(e) = u32::try_from(n) else { return self.err("exponent out of range") };
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        Ok(self.text[start..self.pos].parse().expect("digits"))
    }

    fn atom(&mut self) -> Result<SymPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let save = self.pos;
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    if self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                        let den = self.integer()?;
                        if den.is_zero() {
                            return self.err("zero denominator");
                        }
                        return Ok(SymPoly::constant(BigRational::new(num, den)));
                    }
                    self.pos = save;
                    return self.err("expected denominator");
                }
                Ok(SymPoly::constant(BigRational::from_integer(num)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                Ok(SymPoly::symbol(&self.text[start..self.pos]))
            }
            Some(_) => self.err("unexpected character"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses an expression such as `X*Y - 2pi^3 + (1+t)*X^2`.
pub fn parse_expr(text: &str) -> Result<SymPoly> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, text };
    let out = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_products_and_powers() {
        let p = parse_expr("(X + Y)^2 - 2X*Y").unwrap();
        assert_eq!(p.terms.len(), 2);
        let q = parse_expr("2pi^3 - 1/2").unwrap();
        assert_eq!(q.terms.len(), 2);
        assert!(parse_expr("X +").is_err());
        assert!(parse_expr("1/0").is_err());
    }
}
