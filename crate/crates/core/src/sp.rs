//! Driving functions and exact sum-product Taylor coefficients.
//!
//! `J(n) = Σ_{ε≤m≤n} Π_{ε≤k≤m} F(k/n)` with `ε = 1` exactly when
//! `F(0) ∈ {0, ∞}`, else `ε = 0`; `j(ζ) = Σ J(n) ζ^n`. The additive and
//! multiplicative driving functions are tied by `F = exp(-f)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use num_traits::{One, Zero};

use crate::puiseux::{series_log, PuiseuxSeries};
use crate::rat::{rat_to_string, Rat};
use crate::unipoly::UniPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpError {
    #[error("driving function has a pole at grid point {0}")]
    PoleOnGrid(String),
    #[error("exact sum-product values need a rational driving function")]
    NonRationalDriving,
    #[error("driving function is degenerate (f = 0 or F without content)")]
    Degenerate,
    #[error("log-series of F requires F(0) = 1, got {0}")]
    NonUnitBase(String),
}

/// Driving function in additive (`f`, polynomial with `f(0) = 0`) or
/// multiplicative (`F = num/den`, rational) form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum DrivingFunction {
    /// `f(x) = Σ_{k>=1} f_k x^k`; `coeffs[i]` is `f_{i+1}`.
    PolyF { coeffs: Vec<Rat> },
    /// `F(x) = num(x)/den(x)`.
    RationalF { num: UniPoly, den: UniPoly },
}

impl DrivingFunction {
    pub fn poly_f(coeffs: Vec<Rat>) -> Result<Self, SpError> {
        if coeffs.iter().all(|c| c.is_zero()) {
            return Err(SpError::Degenerate);
        }
        Ok(DrivingFunction::PolyF { coeffs })
    }

    pub fn rational_f(num: UniPoly, den: UniPoly) -> Result<Self, SpError> {
        if num.is_zero() || den.is_zero() {
            return Err(SpError::Degenerate);
        }
        Ok(DrivingFunction::RationalF { num, den })
    }

    /// Constant `F ≡ c`.
    pub fn constant_f(c: Rat) -> Result<Self, SpError> {
        Self::rational_f(UniPoly::constant("x", c), UniPoly::one("x"))
    }

    /// Start index of the SP sums: 1 when `F(0) ∈ {0, ∞}`, else 0.
    pub fn epsilon(&self) -> u8 {
        match self {
            // F = exp(-f) with f(0) = 0 gives F(0) = 1.
            DrivingFunction::PolyF { .. } => 0,
            DrivingFunction::RationalF { num, den } => {
                let vn = num.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0);
                let vd = den.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0);
                if vn != vd {
                    1
                } else {
                    0
                }
            }
        }
    }

    /// Valuation κ of the additive driving function `f = -log F`.
    pub fn kappa(&self) -> Result<usize, SpError> {
        match self {
            DrivingFunction::PolyF { coeffs } => coeffs
                .iter()
                .position(|c| !c.is_zero())
                .map(|i| i + 1)
                .ok_or(SpError::Degenerate),
            DrivingFunction::RationalF { num, den } => {
                let probe = (num.coeffs.len() + den.coeffs.len() + 4).max(8);
                let f = self.f_coefficients(probe)?;
                if let Some(i) = f.iter().position(|c| !c.is_zero()) {
                    return Ok(i + 1);
                }
                // -log F vanishes to high order only for F ≡ 1.
                if num == den {
                    Err(SpError::Degenerate)
                } else {
                    let f = self.f_coefficients(4 * probe)?;
                    f.iter().position(|c| !c.is_zero()).map(|i| i + 1).ok_or(SpError::Degenerate)
                }
            }
        }
    }

    /// First `len` coefficients `f_1..f_len` of `f = -log F`.
    ///
    /// Exact for polynomial input; for rational `F` this is the formal log
    /// series, which needs `F(0) = 1`.
    pub fn f_coefficients(&self, len: usize) -> Result<Vec<Rat>, SpError> {
        match self {
            DrivingFunction::PolyF { coeffs } => {
                let mut out = coeffs.clone();
                out.resize(len, Rat::zero());
                Ok(out)
            }
            DrivingFunction::RationalF { num, den } => {
                let n0 = num.coeff(0);
                let d0 = den.coeff(0);
                if n0.is_zero() || d0.is_zero() || n0 != d0 {
                    let shown = if d0.is_zero() {
                        "a pole at 0".to_string()
                    } else if n0.is_zero() {
                        "0".to_string()
                    } else {
                        rat_to_string(&(n0.clone() / d0.clone()))
                    };
                    return Err(SpError::NonUnitBase(shown));
                }
                // f = log den - log num, both normalised to constant term 1.
                let trunc = len as i64 + 1;
                let log_of = |p: &UniPoly, c0: &Rat| -> Result<PuiseuxSeries, SpError> {
                    let mut coeffs: Vec<Rat> = p.coeffs.iter().map(|c| c / c0).collect();
                    coeffs.resize(trunc.max(1) as usize, Rat::zero());
                    coeffs.truncate(trunc as usize);
                    let s = PuiseuxSeries::new("x", 1, 0, coeffs);
                    series_log(&s).map_err(|_| SpError::Degenerate)
                };
                let ld = log_of(den, &d0)?;
                let ln = log_of(num, &n0)?;
                let f = ld.sub(&ln);
                Ok((1..=len as i64).map(|k| f.coeff_at(k)).collect())
            }
        }
    }

    /// `F` at an exact point; poles surface as errors.
    pub fn eval_big_f(&self, x: &Rat) -> Result<Rat, SpError> {
        match self {
            DrivingFunction::PolyF { .. } => Err(SpError::NonRationalDriving),
            DrivingFunction::RationalF { num, den } => {
                let d = den.eval(x);
                if d.is_zero() {
                    return Err(SpError::PoleOnGrid(rat_to_string(x)));
                }
                Ok(num.eval(x) / d)
            }
        }
    }

    /// Canonical description used for hashes and cache keys.
    pub fn describe(&self) -> String {
        match self {
            DrivingFunction::PolyF { coeffs } => {
                let parts: Vec<String> = coeffs.iter().map(rat_to_string).collect();
                format!("f:[{}]", parts.join(","))
            }
            DrivingFunction::RationalF { num, den } => format!("F:({})/({})", num, den),
        }
    }
}

/// Exact `J(n)`, the double sum-product at a single index.
pub fn sp_coefficient(f: &DrivingFunction, n: u64) -> Result<Rat, SpError> {
    let eps = f.epsilon() as u64;
    if n == 0 {
        // Degenerate index: empty m-range for ε = 1; the single empty-product
        // m = 0 term otherwise.
        return Ok(if eps == 1 { Rat::zero() } else { Rat::one() });
    }
    let nq = Rat::from_integer(n.into());
    let mut total = Rat::zero();
    let mut product = Rat::one();
    for m in eps..=n {
        let node = Rat::from_integer(m.into()) / &nq;
        product *= f.eval_big_f(&node)?;
        total += &product;
        if product.is_zero() {
            break;
        }
    }
    Ok(total)
}

/// `j(ζ)` to order `N`: coefficients `J(0)..J(N)` exactly.
pub fn sp_series(f: &DrivingFunction, n_max: u64) -> Result<PuiseuxSeries, SpError> {
    let mut coeffs = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        coeffs.push(sp_coefficient(f, n)?);
    }
    Ok(PuiseuxSeries::new("z", 1, 0, coeffs))
}
