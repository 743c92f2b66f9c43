//! The ring `Z[x]/(x^p + 1) ⊗ Q` and square matrices over it.
//!
//! With `x = exp(iπ/p)` the ring contains every `ε^{k/p}` at `ε = -1`
//! (`ε^{k/p} = x^k`), which is all the crossing-matrix entries need. It is
//! a ring, not a field: `x^p + 1` factors for most `p`, so characteristic
//! polynomials are computed division-free (Faddeev–LeVerrier, which only
//! divides by integers) rather than by elimination, and the reduction of
//! every charpoly coefficient to a plain rational is asserted, not assumed.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rat::{rat_to_string, Rat};
use crate::unipoly::UniPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("charpoly coefficient does not reduce to a rational: {0}")]
    NonRationalCharPoly(String),
    #[error("matrix dimension mismatch")]
    DimensionMismatch,
}

/// Element of `Z[x]/(x^p+1) ⊗ Q`, stored as `p` rational components.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycloElem {
    pub p: usize,
    pub coeffs: Vec<Rat>,
}

impl CycloElem {
    pub fn zero(p: usize) -> Self {
        assert!(p >= 1);
        CycloElem { p, coeffs: vec![Rat::zero(); p] }
    }

    pub fn from_rat(p: usize, r: Rat) -> Self {
        let mut e = Self::zero(p);
        e.coeffs[0] = r;
        e
    }

    pub fn one(p: usize) -> Self {
        Self::from_rat(p, Rat::one())
    }

    /// `x^k = ε^{k/p}` for any integer `k` (sign-folded by `x^p = -1`).
    pub fn root_power(p: usize, k: i64) -> Self {
        let mut e = Self::zero(p);
        let m = k.rem_euclid(2 * p as i64) as usize;
        if m < p {
            e.coeffs[m] = Rat::one();
        } else {
            e.coeffs[m - p] = -Rat::one();
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The rational component when all of `x^1..x^{p-1}` vanish.
    pub fn as_rational(&self) -> Option<Rat> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p);
        CycloElem {
            p: self.p,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        CycloElem { p: self.p, coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rat) -> Self {
        CycloElem { p: self.p, coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    /// Negacyclic convolution: `x^a · x^b = x^{a+b}` with `x^p = -1`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p);
        let p = self.p;
        let mut out = vec![Rat::zero(); p];
        for (a, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in other.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let k = a + b;
                if k < p {
                    out[k] += ca * cb;
                } else {
                    out[k - p] -= ca * cb;
                }
            }
        }
        CycloElem { p, coeffs: out }
    }
}

impl fmt::Display for CycloElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if k == 0 {
                write!(f, "{}", rat_to_string(c))?;
            } else {
                write!(f, "{}·ε^({}/{})", rat_to_string(c), k, self.p)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Square matrix over [`CycloElem`], row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycloMatrix {
    pub p: usize,
    pub n: usize,
    pub elems: Vec<CycloElem>,
}

impl CycloMatrix {
    pub fn identity(p: usize, n: usize) -> Self {
        let mut elems = vec![CycloElem::zero(p); n * n];
        for i in 0..n {
            elems[i * n + i] = CycloElem::one(p);
        }
        CycloMatrix { p, n, elems }
    }

    pub fn at(&self, i: usize, j: usize) -> &CycloElem {
        &self.elems[i * self.n + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut CycloElem {
        &mut self.elems[i * self.n + j]
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.p, self.n), (other.p, other.n));
        CycloMatrix {
            p: self.p,
            n: self.n,
            elems: self.elems.iter().zip(&other.elems).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        CycloMatrix {
            p: self.p,
            n: self.n,
            elems: self.elems.iter().zip(&other.elems).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!((self.p, self.n), (other.p, other.n));
        let n = self.n;
        let mut elems = vec![CycloElem::zero(self.p); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    elems[i * n + j] = elems[i * n + j].add(&a.mul(b));
                }
            }
        }
        CycloMatrix { p: self.p, n, elems }
    }

    pub fn scale(&self, k: &Rat) -> Self {
        CycloMatrix {
            p: self.p,
            n: self.n,
            elems: self.elems.iter().map(|e| e.scale(k)).collect(),
        }
    }

    pub fn trace(&self) -> CycloElem {
        let mut acc = CycloElem::zero(self.p);
        for i in 0..self.n {
            acc = acc.add(self.at(i, i));
        }
        acc
    }

    pub fn transpose(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                out.elems[j * self.n + i] = self.at(i, j).clone();
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.elems.iter().all(|e| e.is_zero())
    }

    /// `(M - I)^n = 0`?
    pub fn is_unipotent(&self) -> bool {
        let nil = self.sub(&Self::identity(self.p, self.n));
        let mut acc = nil.clone();
        for _ in 1..self.n {
            if acc.is_zero() {
                return true;
            }
            acc = acc.mul(&nil);
        }
        acc.is_zero()
    }
}

/// `det(tI - M)` by Faddeev–LeVerrier; every coefficient must reduce to a
/// plain rational, otherwise the crossing schedule that produced `M` is
/// inconsistent and [`CycloError::NonRationalCharPoly`] is returned.
pub fn cyclo_charpoly(m: &CycloMatrix) -> Result<UniPoly, CycloError> {
    let n = m.n;
    let mut coeffs_rev: Vec<Rat> = Vec::with_capacity(n + 1);
    coeffs_rev.push(Rat::one()); // t^n
    let mut mk = m.clone();
    let mut cs: Vec<CycloElem> = Vec::with_capacity(n);
    for k in 1..=n {
        let tr = mk.trace();
        let ck = tr.scale(&(-Rat::one() / Rat::from_integer((k as i64).into())));
        cs.push(ck.clone());
        if k < n {
            // M_{k+1} = M (M_k + c_k I)
            let mut shifted = mk.clone();
            for i in 0..n {
                *shifted.at_mut(i, i) = shifted.at(i, i).add(&ck);
            }
            mk = m.mul(&shifted);
        }
    }
    for (k, ck) in cs.iter().enumerate() {
        match ck.as_rational() {
            Some(r) => coeffs_rev.push(r),
            None => {
                return Err(CycloError::NonRationalCharPoly(format!(
                    "coefficient of t^{} is {}",
                    n - k - 1,
                    ck
                )))
            }
        }
    }
    // coeffs_rev[k] is the coefficient of t^{n-k}.
    let mut coeffs = vec![Rat::zero(); n + 1];
    for (k, c) in coeffs_rev.into_iter().enumerate() {
        coeffs[n - k] = c;
    }
    Ok(UniPoly::new("t", coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_int;

    #[test]
    fn root_powers_fold_signs() {
        let p = 5;
        for k in 0..p as i64 {
            let a = CycloElem::root_power(p, k);
            let b = CycloElem::root_power(p, p as i64 - k);
            // x^k · x^{p-k} = x^p = -1
            assert_eq!(a.mul(&b).as_rational(), Some(rat_int(-1)), "k={k}");
        }
        assert_eq!(CycloElem::root_power(3, 4), CycloElem::root_power(3, 1).neg());
        assert_eq!(CycloElem::root_power(3, 7), CycloElem::root_power(3, 1));
    }

    #[test]
    fn ring_is_commutative_and_associative() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let p = 6;
        for _ in 0..50 {
            let mut rand_elem = || {
                let mut e = CycloElem::zero(p);
                for c in &mut e.coeffs {
                    *c = rat_int(rng.gen_range(-5..=5));
                }
                e
            };
            let (a, b, c) = (rand_elem(), rand_elem(), rand_elem());
            assert_eq!(a.mul(&b), b.mul(&a));
            assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }
    }

    #[test]
    fn charpoly_of_identity() {
        let m = CycloMatrix::identity(3, 3);
        let cp = cyclo_charpoly(&m).unwrap();
        // (t-1)^3 = t^3 - 3t^2 + 3t - 1
        assert_eq!(
            cp,
            UniPoly::new("t", vec![rat_int(-1), rat_int(3), rat_int(-3), rat_int(1)])
        );
    }

    #[test]
    fn charpoly_of_unipotent_update() {
        // I + 3 x^2 E_{2,1} at p = 3 (indices 1-based in the math, 0-based here)
        let p = 3;
        let mut m = CycloMatrix::identity(p, 3);
        *m.at_mut(1, 0) = CycloElem::root_power(p, 2).scale(&rat_int(3));
        assert!(m.is_unipotent());
        let cp = cyclo_charpoly(&m).unwrap();
        assert_eq!(
            cp,
            UniPoly::new("t", vec![rat_int(-1), rat_int(3), rat_int(-3), rat_int(1)])
        );
    }

    #[test]
    fn charpoly_detects_irrational_content() {
        let p = 3;
        let mut m = CycloMatrix::identity(p, 2);
        *m.at_mut(0, 0) = CycloElem::root_power(p, 1); // trace picks up x
        assert!(matches!(
            cyclo_charpoly(&m),
            Err(CycloError::NonRationalCharPoly(_))
        ));
    }

    #[test]
    fn charpoly_matches_direct_two_by_two_determinant() {
        // M = [[2, 3], [5, 7]] over the rational subring.
        let p = 4;
        let mut m = CycloMatrix::identity(p, 2);
        *m.at_mut(0, 0) = CycloElem::from_rat(p, rat_int(2));
        *m.at_mut(0, 1) = CycloElem::from_rat(p, rat_int(3));
        *m.at_mut(1, 0) = CycloElem::from_rat(p, rat_int(5));
        *m.at_mut(1, 1) = CycloElem::from_rat(p, rat_int(7));
        let cp = cyclo_charpoly(&m).unwrap();
        // t^2 - 9t - 1
        assert_eq!(cp, UniPoly::new("t", vec![rat_int(-1), rat_int(-9), rat_int(1)]));
    }
}
