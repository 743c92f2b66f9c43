//! Fixed-precision binary floating point on `BigInt` mantissas, plus a
//! one-sided Jacobi SVD over it.
//!
//! This backs the float backend of the annihilator scans, which asks for
//! working precisions (30 digits and up) beyond f64. Only what the rank
//! decision needs is implemented: field ops, square root, comparison.

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::rat::{rat_to_f64, Rat};

/// `mant * 2^exp` with `|mant|` capped at `prec` bits.
#[derive(Clone, Debug)]
pub struct MpFloat {
    pub mant: BigInt,
    pub exp: i64,
    pub prec: u32,
}

impl MpFloat {
    pub fn zero(prec: u32) -> Self {
        MpFloat { mant: BigInt::zero(), exp: 0, prec }
    }

    pub fn from_rat(r: &Rat, prec: u32) -> Self {
        if num_traits::Zero::is_zero(r) {
            return Self::zero(prec);
        }
        let shift = prec as i64 + 2;
        let mant = (r.numer() << shift) / r.denom();
        MpFloat { mant, exp: -shift, prec }.normalized()
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        MpFloat { mant: BigInt::from(v), exp: 0, prec }.normalized()
    }

    fn normalized(mut self) -> Self {
        if self.mant.is_zero() {
            self.exp = 0;
            return self;
        }
        let bits = self.mant.bits() as i64;
        let excess = bits - self.prec as i64;
        if excess > 0 {
            // Truncate with a half-ulp nudge toward nearest.
            let half = BigInt::from(1) << (excess - 1) as u64;
            let adj = if self.mant.is_negative() { -&half } else { half };
            self.mant = (self.mant + adj) >> excess as u64;
            self.exp += excess;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn neg(&self) -> Self {
        MpFloat { mant: -&self.mant, exp: self.exp, prec: self.prec }
    }

    pub fn abs(&self) -> Self {
        MpFloat { mant: self.mant.abs(), exp: self.exp, prec: self.prec }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let prec = self.prec.max(other.prec);
        let (hi, lo) = if self.exp >= other.exp { (self, other) } else { (other, self) };
        let gap = hi.exp - lo.exp;
        if gap > prec as i64 + 4 {
            return hi.clone();
        }
        let mant = (&hi.mant << gap as u64) + &lo.mant;
        MpFloat { mant, exp: lo.exp, prec }.normalized()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        MpFloat {
            mant: &self.mant * &other.mant,
            exp: self.exp + other.exp,
            prec: self.prec.max(other.prec),
        }
        .normalized()
    }

    pub fn div(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "division by zero");
        if self.is_zero() {
            return self.clone();
        }
        let prec = self.prec.max(other.prec);
        let shift = prec as i64 + other.mant.bits() as i64 - self.mant.bits() as i64 + 4;
        let shift = shift.max(0);
        let mant = (&self.mant << shift as u64) / &other.mant;
        MpFloat { mant, exp: self.exp - other.exp - shift, prec }.normalized()
    }

    /// Nonnegative square root.
    pub fn sqrt(&self) -> Self {
        assert!(!self.mant.is_negative(), "sqrt of a negative value");
        if self.is_zero() {
            return self.clone();
        }
        // Shift to an even exponent with ~2*prec mantissa bits.
        let mut shift = (2 * self.prec as i64 + 2 - self.mant.bits() as i64).max(0);
        if (self.exp - shift) % 2 != 0 {
            shift += 1;
        }
        let scaled = &self.mant << shift as u64;
        let root = scaled.sqrt();
        MpFloat { mant: root, exp: (self.exp - shift) / 2, prec: self.prec }.normalized()
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let drop = (bits - 64).max(0);
        let head = (&self.mant >> drop as u64).to_f64().unwrap_or(0.0);
        head * 2f64.powi((self.exp + drop) as i32)
    }

    /// Compare by value.
    pub fn cmp_value(&self, other: &Self) -> std::cmp::Ordering {
        let d = self.sub(other);
        if d.mant.is_zero() {
            std::cmp::Ordering::Equal
        } else if d.mant.is_negative() {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    }
}

/// Singular values (descending) of an `m x n` matrix, `m >= n` not required;
/// the matrix is transposed internally when wider than tall.
///
/// One-sided Jacobi: orthogonalises column pairs until every pair's inner
/// product is negligible against the column norms; the singular values are
/// the final column norms.
pub fn jacobi_singular_values(matrix: &[Vec<Rat>], digits: u32) -> Vec<MpFloat> {
    let prec = (digits as f64 * 3.33).ceil() as u32 + 16;
    let rows = matrix.len();
    if rows == 0 {
        return vec![];
    }
    let cols = matrix[0].len();
    // Work on columns; ensure tall orientation.
    let (m, n, transposed) = if rows >= cols { (rows, cols, false) } else { (cols, rows, true) };
    let mut col: Vec<Vec<MpFloat>> = (0..n)
        .map(|j| {
            (0..m)
                .map(|i| {
                    let v = if transposed { &matrix[j][i] } else { &matrix[i][j] };
                    MpFloat::from_rat(v, prec)
                })
                .collect()
        })
        .collect();
    let dot = |a: &[MpFloat], b: &[MpFloat]| -> MpFloat {
        let mut acc = MpFloat::zero(prec);
        for (x, y) in a.iter().zip(b) {
            acc = acc.add(&x.mul(y));
        }
        acc
    };
    // Convergence threshold relative to column norms.
    let tol = MpFloat { mant: BigInt::from(1), exp: -(prec as i64) + 6, prec };
    let max_sweeps = 40;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let aii = dot(&col[i], &col[i]);
                let ajj = dot(&col[j], &col[j]);
                let aij = dot(&col[i], &col[j]);
                if aij.is_zero() || aii.is_zero() || ajj.is_zero() {
                    continue;
                }
                // |aij|^2 <= tol^2 * aii * ajj means converged for this pair.
                let lhs = aij.mul(&aij);
                let rhs = tol.mul(&tol).mul(&aii).mul(&ajj);
                if lhs.cmp_value(&rhs) != std::cmp::Ordering::Greater {
                    continue;
                }
                rotated = true;
                let two = MpFloat::from_i64(2, prec);
                let tau = ajj.sub(&aii).div(&two.mul(&aij));
                let one = MpFloat::from_i64(1, prec);
                let t_abs = one.div(&tau.abs().add(&one.add(&tau.mul(&tau)).sqrt()));
                let t = if tau.mant.is_negative() { t_abs.neg() } else { t_abs };
                let c = one.div(&one.add(&t.mul(&t)).sqrt());
                let s = c.mul(&t);
                for r in 0..m {
                    let vi = col[i][r].clone();
                    let vj = col[j][r].clone();
                    col[i][r] = c.mul(&vi).sub(&s.mul(&vj));
                    col[j][r] = s.mul(&vi).add(&c.mul(&vj));
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<MpFloat> = (0..n).map(|j| dot(&col[j], &col[j]).sqrt()).collect();
    sv.sort_by(|a, b| b.cmp_value(a));
    sv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    #[test]
    fn arithmetic_round_trips_through_f64() {
        let a = MpFloat::from_rat(&rat(1, 3), 120);
        let b = MpFloat::from_rat(&rat(3, 1), 120);
        assert!((a.mul(&b).to_f64() - 1.0).abs() < 1e-30);
        let s = MpFloat::from_i64(2, 120).sqrt();
        assert!((s.to_f64() - std::f64::consts::SQRT_2).abs() < 1e-15);
        let q = MpFloat::from_i64(7, 120).div(&MpFloat::from_i64(8, 120));
        assert!((q.to_f64() - 0.875).abs() < 1e-15);
    }

    #[test]
    fn sqrt_is_precise_beyond_f64() {
        // sqrt(2) to 120 bits, squared, should recover 2 to ~118 bits.
        let two = MpFloat::from_i64(2, 120);
        let r = two.sqrt();
        let err = r.mul(&r).sub(&two).abs();
        let bound = MpFloat { mant: BigInt::from(1), exp: -110, prec: 120 };
        assert_eq!(err.cmp_value(&bound), std::cmp::Ordering::Less);
    }

    #[test]
    fn singular_values_of_diagonal() {
        let m = vec![
            vec![rat_int(3), rat_int(0)],
            vec![rat_int(0), rat_int(4)],
            vec![rat_int(0), rat_int(0)],
        ];
        let sv = jacobi_singular_values(&m, 30);
        assert!((sv[0].to_f64() - 4.0).abs() < 1e-12);
        assert!((sv[1].to_f64() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn singular_values_detect_rank_deficiency() {
        // Rank-1 matrix: second singular value vanishes to working precision.
        let m = vec![
            vec![rat_int(1), rat_int(2)],
            vec![rat_int(2), rat_int(4)],
            vec![rat_int(3), rat_int(6)],
        ];
        let sv = jacobi_singular_values(&m, 30);
        let ratio = sv[1].to_f64() / sv[0].to_f64();
        assert!(ratio < 1e-28, "ratio {ratio}");
    }

    #[test]
    fn known_two_by_two() {
        // [[1, 1], [0, 1]]: singular values sqrt((3±sqrt(5))/2)
        let m = vec![vec![rat_int(1), rat_int(1)], vec![rat_int(0), rat_int(1)]];
        let sv = jacobi_singular_values(&m, 40);
        let hi = ((3.0 + 5f64.sqrt()) / 2.0).sqrt();
        let lo = ((3.0 - 5f64.sqrt()) / 2.0).sqrt();
        assert!((sv[0].to_f64() - hi).abs() < 1e-12);
        assert!((sv[1].to_f64() - lo).abs() < 1e-12);
    }
}
