//! Truncated ramified power series with exact rational coefficients.
//!
//! A `PuiseuxSeries` stores coefficients on the lattice `(base + i)/ram`
//! for `i = 0..len`, together with a truncation order: exponents at or
//! above `trunc/ram` are unknown, not zero. Arithmetic propagates the
//! truncation as the minimum over operands, shifted by valuations.
//!
//! Irrational content is factored out of the coefficients into a
//! [`Prefactor`] tag so that every stored coefficient stays rational. The
//! prefactor multiplies the coefficients sitting at *non-integer*
//! exponents; integer-exponent coefficients are plain rationals. For a
//! series supported entirely on fractional exponents this is simply an
//! overall factor. Mixed series arise as transform outputs where the
//! fractional and integer parts carry different (one irrational, one
//! rational) normalisations; splitting such a series with
//! [`split_singular_regular`] hands the prefactor to the singular part.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rat::{rat_to_f64, rat_to_string, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PuiseuxError {
    #[error("exponential of a series with nonpositive valuation")]
    NonpositiveValuation,
    #[error("operands carry incompatible prefactors")]
    IncompatiblePrefactor,
    #[error("logarithm requires constant term 1")]
    BadLogArgument,
}

/// Symbolic scalar `Γ(1/2)^gamma_half · sqrt(radicand) · Π Γ(arg)^k · Π base^exp`.
///
/// The first two components cover every ramification-one case; the extra
/// factor lists only appear for higher ramifications (kernel exponents with
/// denominator three and up). A negative radicand denotes `i·sqrt(|r|)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prefactor {
    pub gamma_half: i64,
    pub radicand: Rat,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gammas: Vec<(Rat, i64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub powers: Vec<(Rat, Rat)>,
}

impl Prefactor {
    pub fn one() -> Self {
        Prefactor { gamma_half: 0, radicand: Rat::one(), gammas: vec![], powers: vec![] }
    }

    pub fn sqrt(radicand: Rat) -> Self {
        Prefactor { gamma_half: 0, radicand, gammas: vec![], powers: vec![] }
    }

    pub fn is_one(&self) -> bool {
        self.gamma_half == 0
            && self.radicand.is_one()
            && self.gammas.is_empty()
            && self.powers.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut gammas = self.gammas.clone();
        for g in &other.gammas {
            push_gamma(&mut gammas, g.0.clone(), g.1);
        }
        let mut powers = self.powers.clone();
        for p in &other.powers {
            push_power(&mut powers, p.0.clone(), p.1.clone());
        }
        Prefactor {
            gamma_half: self.gamma_half + other.gamma_half,
            radicand: &self.radicand * &other.radicand,
            gammas,
            powers,
        }
    }

    /// Numeric value; requires a nonnegative radicand and positive power bases.
    pub fn eval_f64(&self) -> Result<f64, &'static str> {
        let r = rat_to_f64(&self.radicand);
        if r < 0.0 {
            return Err("imaginary prefactor (negative radicand)");
        }
        let mut acc = gamma_f64(0.5).powi(self.gamma_half as i32) * r.sqrt();
        for (arg, k) in &self.gammas {
            acc *= gamma_f64(rat_to_f64(arg)).powi(*k as i32);
        }
        for (base, exp) in &self.powers {
            let b = rat_to_f64(base);
            if b <= 0.0 {
                return Err("nonpositive base in rational power");
            }
            acc *= b.powf(rat_to_f64(exp));
        }
        Ok(acc)
    }
}

fn push_gamma(list: &mut Vec<(Rat, i64)>, arg: Rat, k: i64) {
    if k == 0 {
        return;
    }
    if let Some(entry) = list.iter_mut().find(|(a, _)| *a == arg) {
        entry.1 += k;
        if entry.1 == 0 {
            list.retain(|(_, p)| *p != 0);
        }
        return;
    }
    list.push((arg, k));
}

fn push_power(list: &mut Vec<(Rat, Rat)>, base: Rat, exp: Rat) {
    if exp.is_zero() {
        return;
    }
    if let Some(entry) = list.iter_mut().find(|(b, _)| *b == base) {
        entry.1 += exp;
        if entry.1.is_zero() {
            let b = base.clone();
            list.retain(|(bb, _)| *bb != b);
        }
        return;
    }
    list.push((base, exp));
}

/// Γ for positive real arguments (Lanczos, g = 7), with the reflection
/// formula for the negative half-line.
pub fn gamma_f64(x: f64) -> f64 {
    const G: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        return std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma_f64(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = G[0];
    let t = x + 7.5;
    for (i, &g) in G.iter().enumerate().skip(1) {
        a += g / (x + i as f64);
    }
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PuiseuxSeries {
    pub var: String,
    /// Ramification: exponents live on the lattice `Z / ram`.
    pub ram: i64,
    /// Exponent of `coeffs[0]`, in lattice units (true exponent `base/ram`).
    pub base: i64,
    pub coeffs: Vec<Rat>,
    /// Exponents at or above `trunc/ram` are unknown; `len = trunc - base`.
    pub trunc: i64,
    pub prefactor: Prefactor,
}

impl PuiseuxSeries {
    pub fn new(var: &str, ram: i64, base: i64, coeffs: Vec<Rat>) -> Self {
        assert!(ram >= 1);
        let trunc = base + coeffs.len() as i64;
        PuiseuxSeries { var: var.into(), ram, base, coeffs, trunc, prefactor: Prefactor::one() }
    }

    pub fn zero(var: &str, ram: i64, trunc: i64) -> Self {
        assert!(ram >= 1);
        PuiseuxSeries {
            var: var.into(),
            ram,
            base: trunc,
            coeffs: vec![],
            trunc,
            prefactor: Prefactor::one(),
        }
    }

    pub fn one(var: &str, trunc: i64) -> Self {
        let mut s = Self::zero(var, 1, trunc);
        s.base = 0;
        s.coeffs = vec![Rat::zero(); trunc.max(0) as usize];
        if trunc > 0 {
            s.coeffs[0] = Rat::one();
        }
        s
    }

    /// `c * var^(num/ram)` known up to `trunc/ram`.
    pub fn monomial(var: &str, ram: i64, num: i64, c: Rat, trunc: i64) -> Self {
        assert!(trunc > num);
        let mut coeffs = vec![Rat::zero(); (trunc - num) as usize];
        coeffs[0] = c;
        PuiseuxSeries { var: var.into(), ram, base: num, coeffs, trunc, prefactor: Prefactor::one() }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Coefficient at lattice exponent `num` (true exponent `num/ram`).
    pub fn coeff_at(&self, num: i64) -> Rat {
        if num < self.base || num >= self.trunc {
            return Rat::zero();
        }
        self.coeffs[(num - self.base) as usize].clone()
    }

    /// Lattice exponent of the first nonzero coefficient; `trunc` when the
    /// known part is identically zero.
    pub fn valuation(&self) -> i64 {
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                return self.base + i as i64;
            }
        }
        self.trunc
    }

    /// Drops leading zero coefficients (raises `base`; keeps truncation).
    pub fn normalized(mut self) -> Self {
        let val = self.valuation();
        if val > self.base {
            self.coeffs.drain(..(val - self.base).min(self.coeffs.len() as i64) as usize);
            self.base = val;
        }
        self
    }

    /// True when every nonzero coefficient sits at an integer exponent.
    pub fn is_integer_supported(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| c.is_zero() || (self.base + i as i64).rem_euclid(self.ram) == 0)
    }

    /// Re-expresses the series on a finer lattice `ram * k`.
    pub fn refine(&self, k: i64) -> Self {
        assert!(k >= 1);
        if k == 1 {
            return self.clone();
        }
        let mut coeffs = vec![Rat::zero(); (self.coeffs.len() as i64 * k) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k as usize] = c.clone();
        }
        PuiseuxSeries {
            var: self.var.clone(),
            ram: self.ram * k,
            base: self.base * k,
            coeffs,
            trunc: self.trunc * k,
            prefactor: self.prefactor.clone(),
        }
    }

    fn common_lattice(&self, other: &Self) -> (Self, Self) {
        let l = self.ram.lcm(&other.ram);
        (self.refine(l / self.ram), other.refine(l / other.ram))
    }

    fn prefactor_for_join(&self, other: &Self) -> Result<Prefactor, PuiseuxError> {
        let self_frac = !self.is_integer_supported();
        let other_frac = !other.is_integer_supported();
        match (self_frac, other_frac) {
            (false, false) => Ok(if self.prefactor.is_one() {
                other.prefactor.clone()
            } else {
                self.prefactor.clone()
            }),
            (true, false) => Ok(self.prefactor.clone()),
            (false, true) => Ok(other.prefactor.clone()),
            (true, true) => {
                if self.prefactor == other.prefactor {
                    Ok(self.prefactor.clone())
                } else {
                    Err(PuiseuxError::IncompatiblePrefactor)
                }
            }
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, PuiseuxError> {
        assert_eq!(self.var, other.var, "variable mismatch");
        let prefactor = self.prefactor_for_join(other)?;
        let (a, b) = self.common_lattice(other);
        let base = a.base.min(b.base);
        let trunc = a.trunc.min(b.trunc);
        let mut coeffs = vec![Rat::zero(); (trunc - base).max(0) as usize];
        for (i, c) in coeffs.iter_mut().enumerate() {
            let e = base + i as i64;
            *c = a.coeff_at(e) + b.coeff_at(e);
        }
        Ok(PuiseuxSeries { var: a.var, ram: a.ram, base, coeffs, trunc, prefactor })
    }

    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("incompatible prefactors in add")
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rat) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c = &*c * k;
        }
        out
    }

    /// Product, truncated at `min(a.trunc + val(b), b.trunc + val(a))`.
    ///
    /// At least one operand must carry no prefactor and be supported on
    /// integer exponents, unless both prefactors are trivial; otherwise the
    /// class bookkeeping of the result would be ill-defined.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.var, other.var, "variable mismatch");
        let prefactor = if self.prefactor.is_one() && other.prefactor.is_one() {
            Prefactor::one()
        } else if self.prefactor.is_one() && self.is_integer_supported() {
            other.prefactor.clone()
        } else if other.prefactor.is_one() && other.is_integer_supported() {
            self.prefactor.clone()
        } else {
            panic!("unsupported prefactor combination in mul");
        };
        let (a, b) = self.common_lattice(other);
        let (va, vb) = (a.valuation(), b.valuation());
        let trunc = (a.trunc + vb).min(b.trunc + va);
        let base = va + vb;
        let mut coeffs = vec![Rat::zero(); (trunc - base).max(0) as usize];
        for (i, ca) in a.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            let ea = a.base + i as i64;
            for (j, cb) in b.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let e = ea + b.base + j as i64;
                if e >= base && e < trunc {
                    coeffs[(e - base) as usize] += ca * cb;
                }
            }
        }
        PuiseuxSeries { var: a.var, ram: a.ram, base, coeffs, trunc, prefactor }
    }

    /// Termwise derivative: `c ν^m -> c m ν^{m-1}`.
    pub fn derivative(&self) -> Self {
        let mut out = self.clone();
        out.base -= self.ram;
        out.trunc -= self.ram;
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let m = Rat::new((self.base + i as i64).into(), self.ram.into());
            *c = &*c * m;
        }
        out
    }

    /// Keeps only exponents strictly below `new_trunc` lattice units.
    pub fn truncated(&self, new_trunc: i64) -> Self {
        let mut out = self.clone();
        if new_trunc < out.trunc {
            out.trunc = new_trunc;
            let keep = (new_trunc - out.base).max(0) as usize;
            out.coeffs.truncate(keep);
            if new_trunc < out.base {
                out.base = new_trunc;
            }
        }
        out
    }

    /// Splits into (fractional-exponent part, integer-exponent part).
    /// The fractional part keeps the prefactor; concatenation restores the
    /// series.
    pub fn split_singular_regular(&self) -> (Self, Self) {
        let mut sing = self.clone();
        let mut reg = self.clone();
        reg.prefactor = Prefactor::one();
        for i in 0..self.coeffs.len() {
            let e = self.base + i as i64;
            if e.rem_euclid(self.ram) == 0 {
                sing.coeffs[i] = Rat::zero();
            } else {
                reg.coeffs[i] = Rat::zero();
            }
        }
        (sing.normalized(), reg.normalized())
    }

    /// Exponents as exact fractions `(num, den)` for every stored
    /// coefficient, nonzero ones only.
    pub fn support(&self) -> Vec<(i64, i64)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| reduce_frac(self.base + i as i64, self.ram))
            .collect()
    }

    /// Evaluates the known part at a numeric point, prefactor included.
    pub fn eval_f64(&self, x: f64) -> Result<f64, &'static str> {
        let pf = self.prefactor.eval_f64()?;
        let mut acc = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.base + i as i64;
            let term = rat_to_f64(c) * x.powf(e as f64 / self.ram as f64);
            acc += if e.rem_euclid(self.ram) == 0 { term } else { pf * term };
        }
        Ok(acc)
    }
}

fn reduce_frac(num: i64, den: i64) -> (i64, i64) {
    let g = num.gcd(&den);
    if g == 0 { (0, 1) } else { (num / g, den / g) }
}

pub enum ExpMode {
    Full,
    SharpLower,
    SharpUpper,
}

pub enum ExpResult {
    Series(PuiseuxSeries),
    /// `exp^#`: kernel term kept inside the exponential, series factor
    /// expanded.
    WithKernel {
        kernel_coeff: Rat,
        /// Exponent of the kernel term as `(num, den)`.
        kernel_exp: (i64, i64),
        series: PuiseuxSeries,
    },
}

/// Exponential of a truncated series.
///
/// `Full` expands `exp(φ)` and needs a strictly positive valuation.
/// The sharp modes split off the leading (lowest-exponent) term `λ`:
/// `SharpLower` returns the expansion of `exp(φ - λ)`, `SharpUpper`
/// additionally reports `λ` as a symbolic kernel factor.
pub fn series_exp(s: &PuiseuxSeries, mode: ExpMode) -> Result<ExpResult, PuiseuxError> {
    assert!(s.prefactor.is_one(), "exp of a prefactored series");
    match mode {
        ExpMode::Full => Ok(ExpResult::Series(exp_positive_val(s)?)),
        ExpMode::SharpLower | ExpMode::SharpUpper => {
            let val = s.valuation();
            let mut rest = s.clone();
            let kernel_coeff = if val < s.trunc {
                let c = rest.coeffs[(val - rest.base) as usize].clone();
                rest.coeffs[(val - rest.base) as usize] = Rat::zero();
                c
            } else {
                Rat::zero()
            };
            let series = exp_positive_val(&rest.normalized())?;
            match mode {
                ExpMode::SharpLower => Ok(ExpResult::Series(series)),
                _ => Ok(ExpResult::WithKernel {
                    kernel_coeff,
                    kernel_exp: reduce_frac(val, s.ram),
                    series,
                }),
            }
        }
    }
}

fn exp_positive_val(s: &PuiseuxSeries) -> Result<PuiseuxSeries, PuiseuxError> {
    if s.valuation() <= 0 && !s.is_zero() {
        return Err(PuiseuxError::NonpositiveValuation);
    }
    let trunc = s.trunc.max(1);
    let n = trunc.max(0) as usize;
    let mut e = vec![Rat::zero(); n];
    if n > 0 {
        e[0] = Rat::one();
    }
    // theta(E) = theta(phi) E with theta the Euler operator on the lattice.
    for m in 1..n {
        let mut acc = Rat::zero();
        for k in 1..=m {
            let phi_k = s.coeff_at(k as i64);
            if !phi_k.is_zero() && !e[m - k].is_zero() {
                acc += Rat::from_integer((k as i64).into()) * phi_k * &e[m - k];
            }
        }
        if !acc.is_zero() {
            e[m] = acc / Rat::from_integer((m as i64).into());
        }
    }
    Ok(PuiseuxSeries {
        var: s.var.clone(),
        ram: s.ram,
        base: 0,
        coeffs: e,
        trunc,
        prefactor: Prefactor::one(),
    })
}

/// Formal logarithm of a series with constant term 1, to the truncation.
pub fn series_log(s: &PuiseuxSeries) -> Result<PuiseuxSeries, PuiseuxError> {
    assert!(s.prefactor.is_one(), "log of a prefactored series");
    if s.coeff_at(0) != Rat::one() || s.valuation() < 0 {
        return Err(PuiseuxError::BadLogArgument);
    }
    let n = s.trunc.max(0) as usize;
    let mut l = vec![Rat::zero(); n];
    for m in 1..n {
        let mut acc = Rat::from_integer((m as i64).into()) * s.coeff_at(m as i64);
        for k in 1..m {
            if !l[k].is_zero() {
                let a = s.coeff_at((m - k) as i64);
                if !a.is_zero() {
                    acc -= Rat::from_integer((k as i64).into()) * &l[k] * a;
                }
            }
        }
        if !acc.is_zero() {
            l[m] = acc / Rat::from_integer((m as i64).into());
        }
    }
    Ok(PuiseuxSeries {
        var: s.var.clone(),
        ram: s.ram,
        base: 0,
        coeffs: l,
        trunc: s.trunc,
        prefactor: Prefactor::one(),
    })
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.prefactor.is_one() {
            write!(f, "[Γ(1/2)^{}·√({})", self.prefactor.gamma_half, rat_to_string(&self.prefactor.radicand))?;
            for (a, k) in &self.prefactor.gammas {
                write!(f, "·Γ({})^{}", rat_to_string(a), k)?;
            }
            for (b, e) in &self.prefactor.powers {
                write!(f, "·({})^({})", rat_to_string(b), rat_to_string(e))?;
            }
            write!(f, "]·")?;
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.base + i as i64;
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
            let (n, d) = reduce_frac(e, self.ram);
            let cs = rat_to_string(&c.abs());
            if n == 0 {
                write!(f, "{cs}")?;
            } else {
                if !c.abs().is_one() {
                    write!(f, "{cs}*")?;
                }
                if d == 1 {
                    if n == 1 {
                        write!(f, "{}", self.var)?;
                    } else {
                        write!(f, "{}^{}", self.var, n)?;
                    }
                } else {
                    write!(f, "{}^({}/{})", self.var, n, d)?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O({}^({}/{}))", self.var, self.trunc, self.ram)
    }
}

/// JSON view used by the transform reports: exponents as reduced fraction
/// strings, coefficients as canonical rational strings.
#[derive(Serialize, Deserialize)]
pub struct SeriesJson {
    pub var: String,
    pub exponents: Vec<String>,
    pub coeffs: Vec<String>,
    pub prefactor: PrefactorJson,
    pub truncation: String,
}

#[derive(Serialize, Deserialize)]
pub struct PrefactorJson {
    pub gamma_half: i64,
    pub sqrt: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gammas: Vec<(String, i64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub powers: Vec<(String, String)>,
}

impl PuiseuxSeries {
    pub fn to_json(&self) -> SeriesJson {
        let mut exponents = Vec::new();
        let mut coeffs = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (n, d) = reduce_frac(self.base + i as i64, self.ram);
            exponents.push(if d == 1 { n.to_string() } else { format!("{n}/{d}") });
            coeffs.push(rat_to_string(c));
        }
        let (tn, td) = reduce_frac(self.trunc, self.ram);
        SeriesJson {
            var: self.var.clone(),
            exponents,
            coeffs,
            prefactor: PrefactorJson {
                gamma_half: self.prefactor.gamma_half,
                sqrt: rat_to_string(&self.prefactor.radicand),
                gammas: self
                    .prefactor
                    .gammas
                    .iter()
                    .map(|(a, k)| (rat_to_string(a), *k))
                    .collect(),
                powers: self
                    .prefactor
                    .powers
                    .iter()
                    .map(|(b, e)| (rat_to_string(b), rat_to_string(e)))
                    .collect(),
            },
            truncation: if td == 1 { tn.to_string() } else { format!("{tn}/{td}") },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn geom(n: i64) -> PuiseuxSeries {
        // 1/(1-x) to n terms
        PuiseuxSeries::new("x", 1, 0, vec![rat_int(1); n as usize])
    }

    #[test]
    fn add_aligns_lattices_and_truncations() {
        let a = PuiseuxSeries::new("x", 2, -1, vec![rat_int(1), rat_int(0), rat_int(1)]); // x^-1/2 + x^1/2, trunc 2/2
        let b = PuiseuxSeries::one("x", 3);
        let s = a.add(&b);
        assert_eq!(s.ram, 2);
        assert_eq!(s.coeff_at(-1), rat_int(1));
        assert_eq!(s.coeff_at(0), rat_int(1));
        assert_eq!(s.trunc, 2); // min(2, 6)
    }

    #[test]
    fn mul_shifts_truncation_by_valuation() {
        let a = PuiseuxSeries::monomial("x", 1, 2, rat_int(3), 10); // 3x^2 known to x^10
        let b = geom(5); // trunc 5
        let p = a.mul(&b);
        // trunc = min(10 + 0, 5 + 2) = 7
        assert_eq!(p.trunc, 7);
        assert_eq!(p.coeff_at(2), rat_int(3));
        assert_eq!(p.coeff_at(6), rat_int(3));
        assert_eq!(p.coeff_at(7), rat_int(0)); // beyond truncation reads zero
    }

    #[test]
    fn derivative_on_fractional_exponents() {
        // d/dx x^{-1/2} = -1/2 x^{-3/2}
        let s = PuiseuxSeries::monomial("x", 2, -1, rat_int(1), 5);
        let d = s.derivative();
        assert_eq!(d.coeff_at(-3), rat(-1, 2));
    }

    #[test]
    fn exp_and_log_round_trip() {
        let phi = PuiseuxSeries::new("x", 1, 1, vec![rat_int(1), rat(1, 2), rat(-1, 3)]);
        let mut padded = phi.clone();
        padded.base = 0;
        padded.coeffs.insert(0, rat_int(0));
        let e = match series_exp(&padded, ExpMode::Full).unwrap() {
            ExpResult::Series(s) => s,
            _ => unreachable!(),
        };
        assert_eq!(e.coeff_at(0), rat_int(1));
        let l = series_log(&e).unwrap();
        for k in 0..padded.trunc {
            assert_eq!(l.coeff_at(k), padded.coeff_at(k), "exponent {k}");
        }
    }

    #[test]
    fn exp_of_nu_matches_factorials() {
        let nu = PuiseuxSeries::monomial("x", 1, 1, rat_int(1), 4);
        let e = match series_exp(&nu, ExpMode::Full).unwrap() {
            ExpResult::Series(s) => s,
            _ => unreachable!(),
        };
        assert_eq!(e.coeff_at(0), rat_int(1));
        assert_eq!(e.coeff_at(1), rat_int(1));
        assert_eq!(e.coeff_at(2), rat(1, 2));
        assert_eq!(e.coeff_at(3), rat(1, 6));
    }

    #[test]
    fn exp_rejects_nonpositive_valuation() {
        let s = PuiseuxSeries::new("x", 1, 0, vec![rat_int(1), rat_int(1)]);
        assert!(matches!(
            series_exp(&s, ExpMode::Full),
            Err(PuiseuxError::NonpositiveValuation)
        ));
    }

    #[test]
    fn sharp_exp_splits_leading_kernel() {
        // a t^2 + b t^3 with a=2, b=5: kernel 2t^2, series 1 + 5t^3 + 25/2 t^6 ...
        let mut s = PuiseuxSeries::zero("t", 1, 8);
        s.base = 0;
        s.coeffs = vec![Rat::zero(); 8];
        s.coeffs[2] = rat_int(2);
        s.coeffs[3] = rat_int(5);
        match series_exp(&s, ExpMode::SharpUpper).unwrap() {
            ExpResult::WithKernel { kernel_coeff, kernel_exp, series } => {
                assert_eq!(kernel_coeff, rat_int(2));
                assert_eq!(kernel_exp, (2, 1));
                assert_eq!(series.coeff_at(0), rat_int(1));
                assert_eq!(series.coeff_at(3), rat_int(5));
                assert_eq!(series.coeff_at(6), rat(25, 2));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn split_restores_series() {
        let mut s = PuiseuxSeries::new(
            "v",
            2,
            -1,
            vec![rat_int(1), rat_int(2), rat_int(3), rat_int(4)],
        ); // v^-1/2 + 2 + 3v^1/2 + 4v
        s.prefactor = Prefactor::sqrt(rat(1, 2));
        let (sing, reg) = s.split_singular_regular();
        assert_eq!(sing.support(), vec![(-1, 2), (1, 2)]);
        assert_eq!(reg.support(), vec![(0, 1), (1, 1)]);
        assert!(reg.prefactor.is_one());
        assert_eq!(sing.prefactor, s.prefactor);
        let joined = sing.add(&reg);
        for e in -1..4 {
            assert_eq!(joined.coeff_at(e), s.coeff_at(e));
        }
    }

    #[test]
    fn pure_integer_series_split_is_trivial() {
        let s = geom(4);
        let (sing, reg) = s.split_singular_regular();
        assert!(sing.is_zero());
        assert_eq!(reg.coeff_at(3), rat_int(1));
    }

    #[test]
    fn gamma_f64_spot_values() {
        assert!((gamma_f64(0.5) - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert!((gamma_f64(5.0) - 24.0).abs() < 1e-9);
        assert!((gamma_f64(1.0 / 3.0) - 2.678938534707747633).abs() < 1e-10);
    }
}
