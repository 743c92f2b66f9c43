//! Coefficient-field abstraction.
//!
//! The series pipelines and the annihilator linear algebra are generic over
//! a field so the same code runs exactly over `Q` and over large prime
//! fields. A full-column-rank certificate modulo a prime implies full
//! column rank over `Q` (specialisation can only lower rank), which is what
//! the non-existence scans lean on; rational nullspaces are only computed
//! where operators are actually extracted.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::rat::Rat;

pub trait Field: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// `None` for zero.
    fn inv(&self) -> Option<Self>;
    fn from_i64(k: i64) -> Self;

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.mul(&i))
    }
}

impl Field for Rat {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn inv(&self) -> Option<Self> {
        if num_traits::Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_i64(k: i64) -> Self {
        Rat::from_integer(k.into())
    }
}

/// The Mersenne prime `2^61 - 1`.
pub const PRIME_A: u64 = 2_305_843_009_213_693_951;
/// `2^62 - 57`, also prime.
pub const PRIME_B: u64 = 4_611_686_018_427_387_847;

/// Element of `Z/p` for a fixed odd prime `p < 2^63`. The modulus travels
/// with the value; bare literals from `from_i64` carry modulus 0 and adopt
/// the partner's modulus on first arithmetic contact.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Fp64 {
    pub value: u64,
    pub modulus: u64,
}

impl Fp64 {
    pub fn new(value: u64, modulus: u64) -> Self {
        Fp64 { value: value % modulus, modulus }
    }

    fn modmul(a: u64, b: u64, m: u64) -> u64 {
        ((a as u128 * b as u128) % m as u128) as u64
    }

    fn modpow(mut base: u64, mut e: u64, m: u64) -> u64 {
        let mut acc = 1u64;
        base %= m;
        while e > 0 {
            if e & 1 == 1 {
                acc = Self::modmul(acc, base, m);
            }
            base = Self::modmul(base, base, m);
            e >>= 1;
        }
        acc
    }

    pub fn from_bigint(n: &BigInt, modulus: u64) -> Self {
        let m = BigInt::from(modulus);
        let mut r = n % &m;
        if r.is_negative() {
            r += &m;
        }
        Fp64 { value: r.to_u64().unwrap(), modulus }
    }
}

impl Field for Fp64 {
    fn zero() -> Self {
        Fp64 { value: 0, modulus: 0 }
    }
    fn one() -> Self {
        Fp64 { value: 1, modulus: 0 }
    }
    fn is_zero(&self) -> bool {
        self.value == 0
    }
    fn add(&self, other: &Self) -> Self {
        let m = unify(self.modulus, other.modulus);
        if m == 0 {
            return Fp64 { value: self.value + other.value, modulus: 0 };
        }
        let mut v = self.value % m + other.value % m;
        if v >= m {
            v -= m;
        }
        Fp64 { value: v, modulus: m }
    }
    fn sub(&self, other: &Self) -> Self {
        let m = unify(self.modulus, other.modulus);
        assert!(m != 0, "subtraction needs a modulus");
        let a = self.value % m;
        let b = other.value % m;
        Fp64 { value: if a >= b { a - b } else { a + m - b }, modulus: m }
    }
    fn neg(&self) -> Self {
        if self.value == 0 {
            *self
        } else {
            assert!(self.modulus != 0, "negation needs a modulus");
            Fp64 { value: self.modulus - self.value % self.modulus, modulus: self.modulus }
        }
    }
    fn mul(&self, other: &Self) -> Self {
        let m = unify(self.modulus, other.modulus);
        if m == 0 {
            return Fp64 { value: self.value.wrapping_mul(other.value), modulus: 0 };
        }
        Fp64 { value: Self::modmul(self.value % m, other.value % m, m), modulus: m }
    }
    fn inv(&self) -> Option<Self> {
        if self.modulus == 0 {
            // A modulus-less literal can only be inverted when it is
            // trivially self-inverse.
            return match self.value {
                0 => None,
                1 => Some(*self),
                _ => panic!("inversion of a bare literal needs a modulus"),
            };
        }
        if self.value % self.modulus == 0 {
            return None;
        }
        Some(Fp64 {
            value: Self::modpow(self.value, self.modulus - 2, self.modulus),
            modulus: self.modulus,
        })
    }
    fn from_i64(k: i64) -> Self {
        assert!(k >= 0, "negative literal needs fp_from_rat with a modulus");
        Fp64 { value: k as u64, modulus: 0 }
    }
}

fn unify(a: u64, b: u64) -> u64 {
    match (a, b) {
        (0, m) | (m, 0) => m,
        (m1, m2) => {
            assert_eq!(m1, m2, "mixed moduli");
            m1
        }
    }
}

/// Image of a rational modulo `p`; `None` when the denominator is divisible
/// by `p`.
pub fn fp_from_rat(r: &Rat, modulus: u64) -> Option<Fp64> {
    let num = Fp64::from_bigint(r.numer(), modulus);
    let den = Fp64::from_bigint(r.denom(), modulus);
    den.inv().map(|d| num.mul(&d))
}
