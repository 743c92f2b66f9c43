//! Sparse multivariate polynomials over the exact rationals.
//!
//! Terms are keyed by exponent tuples aligned with an ordered variable
//! list. Zero coefficients are never stored.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rat::{rat_to_string, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiPoly {
    pub vars: Vec<String>,
    pub terms: BTreeMap<Vec<u32>, Rat>,
}

impl MultiPoly {
    pub fn zero(vars: &[&str]) -> Self {
        MultiPoly {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &[&str], c: Rat) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; p.vars.len()], c);
        p
    }

    /// Single variable raised to the first power.
    pub fn var(vars: &[&str], name: &str) -> Self {
        let mut p = Self::zero(vars);
        let idx = p.index_of(name);
        let mut exps = vec![0; p.vars.len()];
        exps[idx] = 1;
        p.add_term(exps, Rat::one());
        p
    }

    pub fn monomial(vars: &[&str], exps: Vec<u32>, c: Rat) -> Self {
        let mut p = Self::zero(vars);
        assert_eq!(exps.len(), p.vars.len());
        p.add_term(exps, c);
        p
    }

    pub fn index_of(&self, name: &str) -> usize {
        self.vars
            .iter()
            .position(|v| v == name)
            .unwrap_or_else(|| panic!("unknown variable {name}"))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.vars, other.vars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, k: &Rat) -> Self {
        if k.is_zero() {
            return MultiPoly { vars: self.vars.clone(), terms: BTreeMap::new() };
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.vars, other.vars);
        let mut out = Self { vars: self.vars.clone(), terms: BTreeMap::new() };
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(exps, ca * cb);
            }
        }
        out
    }

    /// Total degree of the highest term, `None` when zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Partial derivative with respect to a named variable.
    pub fn derivative(&self, name: &str) -> Self {
        let idx = self.index_of(name);
        let mut out = Self { vars: self.vars.clone(), terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            if e[idx] == 0 {
                continue;
            }
            let mut exps = e.clone();
            exps[idx] -= 1;
            out.add_term(exps, c * Rat::from_integer((e[idx] as i64).into()));
        }
        out
    }

    /// Substitutes `value` for the named variable, keeping the variable list.
    pub fn substitute(&self, name: &str, value: &MultiPoly) -> Self {
        let idx = self.index_of(name);
        let mut out = Self { vars: self.vars.clone(), terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            let mut base = e.clone();
            let power = base[idx];
            base[idx] = 0;
            let mut term = Self::monomial(
                &self.vars.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
                base,
                c.clone(),
            );
            for _ in 0..power {
                term = term.mul(value);
            }
            out = out.add(&term);
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
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
            let abs = c.abs();
            let is_const = e.iter().all(|&x| x == 0);
            if !abs.is_one() || is_const {
                write!(f, "{}", rat_to_string(&abs))?;
                if !is_const {
                    write!(f, "*")?;
                }
            }
            let mut sep = "";
            for (v, &p) in self.vars.iter().zip(e) {
                if p == 0 {
                    continue;
                }
                write!(f, "{sep}{v}")?;
                if p > 1 {
                    write!(f, "^{p}")?;
                }
                sep = "*";
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_int;

    #[test]
    fn ring_ops() {
        let vars = ["x", "y"];
        let x = MultiPoly::var(&vars, "x");
        let y = MultiPoly::var(&vars, "y");
        // (x + y)^2 = x^2 + 2xy + y^2
        let s = x.add(&y);
        let sq = s.mul(&s);
        assert_eq!(sq.terms.len(), 3);
        assert_eq!(sq.terms[&vec![1, 1]], rat_int(2));
        assert!(sq.sub(&sq).is_zero());
        assert_eq!(sq.total_degree(), Some(2));
    }

    #[test]
    fn derivative_and_substitute() {
        let vars = ["x", "y"];
        let x = MultiPoly::var(&vars, "x");
        let y = MultiPoly::var(&vars, "y");
        let p = x.mul(&x).mul(&y); // x^2 y
        assert_eq!(p.derivative("x"), x.mul(&y).scale(&rat_int(2)));
        // x -> y: y^3
        let q = p.substitute("x", &y);
        assert_eq!(q.terms[&vec![0, 3]], rat_int(1));
    }
}
