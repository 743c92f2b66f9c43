//! Dense univariate polynomials over the exact rationals.
//!
//! Invariants:
//! - the highest stored coefficient is nonzero unless the polynomial is zero
//!   (the zero polynomial stores an empty coefficient vector);
//! - `degree()` is the index of the highest nonzero coefficient, `None` for
//!   the zero polynomial.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rat::{parse_rat, rat_to_string, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniPoly {
    pub var: String,
    /// Coefficient of `var^i` at index `i`; trailing zeros trimmed.
    pub coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn new(var: &str, mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { var: var.to_string(), coeffs }
    }

    pub fn zero(var: &str) -> Self {
        UniPoly { var: var.to_string(), coeffs: vec![] }
    }

    pub fn constant(var: &str, c: Rat) -> Self {
        Self::new(var, vec![c])
    }

    pub fn one(var: &str) -> Self {
        Self::constant(var, Rat::one())
    }

    /// `c * var^k`.
    pub fn monomial(var: &str, c: Rat, k: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = c;
        Self::new(var, coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() { None } else { Some(self.coeffs.len() - 1) }
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn leading_coeff(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        Self::new(&self.var, out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        UniPoly {
            var: self.var.clone(),
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.var);
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Self::new(&self.var, out)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(&self.var, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one(&self.var);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + crate::rat::rat_to_f64(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let mut out = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            out.push(c * Rat::from_integer(i.into()));
        }
        Self::new(&self.var, out)
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Self {
        let mut out = vec![Rat::zero()];
        for (i, c) in self.coeffs.iter().enumerate() {
            out.push(c / Rat::from_integer((i + 1).into()));
        }
        Self::new(&self.var, out)
    }

    /// Substitutes `inner` for the variable.
    pub fn compose(&self, inner: &Self) -> Self {
        let mut acc = Self::zero(&self.var);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&Self::constant(&self.var, c.clone()));
        }
        UniPoly { var: inner.var.clone(), coeffs: acc.coeffs }
    }

    /// `p(x + c)`.
    pub fn shift(&self, c: &Rat) -> Self {
        let x_plus_c = Self::new(&self.var, vec![c.clone(), Rat::one()]);
        self.compose(&x_plus_c)
    }

    /// All rational roots, found by the rational-root theorem on the
    /// integer-scaled polynomial. Multiplicities are not repeated.
    pub fn rational_roots(&self) -> Vec<Rat> {
        if self.is_zero() {
            return vec![];
        }
        // Clear denominators.
        let mut den = num_bigint::BigInt::one();
        for c in &self.coeffs {
            den = num_integer::lcm(den, c.denom().clone());
        }
        let ints: Vec<num_bigint::BigInt> =
            self.coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        // Strip powers of x: zero is a root when the valuation is positive.
        let val = ints.iter().position(|c| !c.is_zero()).unwrap();
        let mut roots = Vec::new();
        if val > 0 {
            roots.push(Rat::zero());
        }
        let trimmed = &ints[val..];
        if trimmed.len() < 2 {
            return roots;
        }
        let a0 = trimmed[0].abs();
        let an = trimmed.last().unwrap().abs();
        for p in divisors(&a0) {
            for q in divisors(&an) {
                for sign in [1i32, -1] {
                    let cand = Rat::new(p.clone() * sign, q.clone());
                    if self.eval(&cand).is_zero() && !roots.contains(&cand) {
                        roots.push(cand.clone());
                    }
                }
            }
        }
        roots
    }
}

fn divisors(n: &num_bigint::BigInt) -> Vec<num_bigint::BigInt> {
    use num_bigint::BigInt;
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            out.push(d.clone());
            let q = n / &d;
            if q != d {
                out.push(q);
            }
        }
        d += 1;
    }
    out
}

impl UniPoly {
    /// Canonical JSON view: exponent → coefficient, both as strings, zero
    /// coefficients omitted. `BTreeMap` keys make the encoding
    /// deterministic.
    pub fn to_json_map(&self) -> std::collections::BTreeMap<String, String> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i.to_string(), rat_to_string(c)))
            .collect()
    }

    pub fn from_json_map(
        map: &std::collections::BTreeMap<String, String>,
        var: &str,
    ) -> Result<Self, String> {
        let mut coeffs = Vec::new();
        for (k, v) in map {
            let e: usize = k.parse().map_err(|_| format!("bad exponent {k:?}"))?;
            if coeffs.len() <= e {
                coeffs.resize(e + 1, Rat::zero());
            }
            coeffs[e] = parse_rat(v)?;
        }
        Ok(UniPoly::new(var, coeffs))
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = rat_to_string(&c.abs());
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if i == 0 {
                write!(f, "{cs}")?;
            } else {
                if !c.abs().is_one() {
                    write!(f, "{cs}*")?;
                }
                if i == 1 {
                    write!(f, "{}", self.var)?;
                } else {
                    write!(f, "{}^{}", self.var, i)?;
                }
            }
        }
        Ok(())
    }
}

/// Parses polynomial expressions over one variable: rationals, the variable
/// name, `+ - * ^` and parentheses, with explicit multiplication.
pub fn parse_expr(src: &str, var: &str) -> Result<UniPoly, String> {
    let tokens = lex(src)?;
    let mut p = Parser { tokens, pos: 0, var: var.to_string() };
    let poly = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(format!("trailing input at token {}", p.pos));
    }
    Ok(poly)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rat),
    Var,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => { out.push(Tok::Plus); i += 1; }
            '-' => { out.push(Tok::Minus); i += 1; }
            '*' => { out.push(Tok::Star); i += 1; }
            '^' => { out.push(Tok::Caret); i += 1; }
            '(' => { out.push(Tok::LParen); i += 1; }
            ')' => { out.push(Tok::RParen); i += 1; }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == '/') {
                    i += 1;
                }
                let text: String = bytes[start..i].iter().collect();
                out.push(Tok::Num(parse_rat(&text)?));
            }
            c if c.is_alphabetic() => {
                let start = i;
                while i < bytes.len() && bytes[i].is_alphanumeric() {
                    i += 1;
                }
                let name: String = bytes[start..i].iter().collect();
                out.push(Tok::Var);
                // The variable name is validated by the parser context.
                let _ = name;
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
    var: String,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn expr(&mut self) -> Result<UniPoly, String> {
        let mut acc = self.term()?;
        while let Some(tok) = self.peek() {
            match tok {
                Tok::Plus => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<UniPoly, String> {
        let mut acc = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<UniPoly, String> {
        let base = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                return Ok(self.factor()?.neg());
            }
            Some(Tok::Num(r)) => {
                let p = UniPoly::constant(&self.var, r.clone());
                self.pos += 1;
                p
            }
            Some(Tok::Var) => {
                let p = UniPoly::monomial(&self.var, Rat::one(), 1);
                self.pos += 1;
                p
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => self.pos += 1,
                    _ => return Err("missing closing parenthesis".into()),
                }
                inner
            }
            other => return Err(format!("unexpected token {other:?}")),
        };
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            match self.peek() {
                Some(Tok::Num(r)) if r.is_integer() && !r.is_negative() => {
                    let e = r.to_integer().try_into().map_err(|_| "exponent too large")?;
                    self.pos += 1;
                    return Ok(base.pow(e));
                }
                other => return Err(format!("bad exponent {other:?}")),
            }
        }
        Ok(base)
    }
}
