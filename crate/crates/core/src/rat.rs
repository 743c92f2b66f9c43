//! Exact rational scalars.
//!
//! `Rat` is the coefficient field for the whole crate. Values are always
//! stored reduced (gcd of numerator and denominator is one, denominator
//! positive); `num_rational::BigRational` maintains that invariant on every
//! operation. The canonical text form is `p/q`, with `/q` omitted when the
//! denominator is one; [`parse_rat`] and the `Display` impl round-trip.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

/// `p/q` as an exact rational. Panics on `q = 0`.
pub fn rat(p: i64, q: i64) -> Rat {
    assert!(q != 0, "zero denominator");
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Integer as an exact rational.
pub fn rat_int(p: i64) -> Rat {
    Rat::from_integer(BigInt::from(p))
}

/// Parses the canonical form `p` or `p/q`. Whitespace is not accepted.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let parse_int = |t: &str| -> Result<BigInt, String> {
        t.parse::<BigInt>().map_err(|e| format!("bad integer {t:?}: {e}"))
    };
    match s.split_once('/') {
        None => Ok(Rat::from_integer(parse_int(s)?)),
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(Rat::new(parse_int(p)?, den))
        }
    }
}

/// Canonical text form, `p/q` with `/q` omitted when the denominator is one.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest f64; rationals of astronomical height are converted through
/// a scaled quotient so intermediate numerator/denominator overflow cannot
/// produce NaN.
pub fn rat_to_f64(r: &Rat) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back on a bit-length balanced quotient.
    let nbits = r.numer().bits() as i64;
    let dbits = r.denom().bits() as i64;
    let shift = (nbits.max(dbits) - 900).max(0) as u64;
    let n = r.numer() >> shift;
    let d = r.denom() >> shift;
    let nf = n.to_f64().unwrap_or(if r.numer().is_negative() { f64::NEG_INFINITY } else { f64::INFINITY });
    let df = d.to_f64().unwrap_or(f64::INFINITY);
    nf / df
}

/// `binomial(n, k)` as a `BigInt`; zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `k!` as a `BigInt`.
pub fn factorial(k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=k {
        acc *= BigInt::from(i);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_print_round_trip() {
        for s in ["0", "1", "-7", "3/4", "-22/7", "123456789123456789/2"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(rat_to_string(&r), s);
        }
        // Non-canonical input normalises.
        assert_eq!(rat_to_string(&parse_rat("4/8").unwrap()), "1/2");
        assert_eq!(rat_to_string(&parse_rat("3/-6").unwrap()), "-1/2");
        assert_eq!(rat_to_string(&parse_rat("5/1").unwrap()), "5");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("a").is_err());
    }

    #[test]
    fn arithmetic_reduces() {
        let a = rat(1, 6) + rat(1, 3);
        assert_eq!(a, rat(1, 2));
        assert!(a.denom() > &BigInt::zero());
    }

    #[test]
    fn binomials_and_factorials() {
        assert_eq!(binomial(8, 3), BigInt::from(56));
        assert_eq!(binomial(5, 0), BigInt::one());
        assert_eq!(binomial(4, 7), BigInt::zero());
        assert_eq!(factorial(6), BigInt::from(720));
    }

    #[test]
    fn f64_conversion_survives_huge_height() {
        let big = BigInt::from(7u32).pow(3000);
        let r = Rat::new(big.clone() * 3, big);
        assert!((rat_to_f64(&r) - 3.0).abs() < 1e-12);
    }
}
