//! Dense exact linear algebra over any [`Field`].
//!
//! Everything here is plain Gauss–Jordan elimination; matrices are small
//! (hundreds of rows) and coefficients are exact, so pivoting strategy is
//! chosen for determinism, not conditioning: the first nonzero entry wins.

use crate::field::Field;

/// Reduced row echelon form in place; returns the pivot column indices in
/// order.
pub fn rref<F: Field>(mat: &mut Vec<Vec<F>>) -> Vec<usize> {
    let rows = mat.len();
    if rows == 0 {
        return vec![];
    }
    let cols = mat[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !mat[i][c].is_zero()) else {
            continue;
        };
        mat.swap(r, pr);
        let inv = mat[r][c].inv().expect("nonzero pivot");
        for x in &mut mat[r] {
            *x = x.mul(&inv);
        }
        for i in 0..rows {
            if i != r && !mat[i][c].is_zero() {
                let f = mat[i][c].clone();
                for j in 0..cols {
                    if !mat[r][j].is_zero() {
                        let t = mat[r][j].mul(&f);
                        mat[i][j] = mat[i][j].sub(&t);
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: Field>(mat: &[Vec<F>]) -> usize {
    let mut m = mat.to_vec();
    rref(&mut m).len()
}

/// Canonical basis of the right nullspace `{x : A x = 0}`, one vector per
/// free column of the reduced echelon form. Deterministic: free variables
/// in increasing column order, each set to one.
pub fn nullspace<F: Field>(mat: &[Vec<F>]) -> Vec<Vec<F>> {
    if mat.is_empty() {
        return vec![];
    }
    let cols = mat[0].len();
    let mut m = mat.to_vec();
    let pivots = rref(&mut m);
    let mut basis = Vec::new();
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; cols];
        for &c in &pivots {
            v[c] = true;
        }
        v
    };
    for free in 0..cols {
        if is_pivot[free] {
            continue;
        }
        let mut vec_out = vec![F::zero(); cols];
        vec_out[free] = F::one();
        for (r, &pc) in pivots.iter().enumerate() {
            vec_out[pc] = m[r][free].neg();
        }
        basis.push(vec_out);
    }
    basis
}

/// Gauss–Jordan inverse; `None` for singular input.
pub fn invert<F: Field>(mat: &[Vec<F>]) -> Option<Vec<Vec<F>>> {
    let n = mat.len();
    let mut aug: Vec<Vec<F>> = mat
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "inverse of a non-square matrix");
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j { F::one() } else { F::zero() });
            }
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn mat_mul<F: Field>(a: &[Vec<F>], b: &[Vec<F>]) -> Vec<Vec<F>> {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![F::zero(); m]; n];
    for i in 0..n {
        assert_eq!(a[i].len(), k, "inner dimension mismatch");
        for (l, bl) in b.iter().enumerate() {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                if !bl[j].is_zero() {
                    let t = a[i][l].mul(&bl[j]);
                    out[i][j] = out[i][j].add(&t);
                }
            }
        }
    }
    out
}

/// Row-reduced canonical form of the span of `vectors`; two sets of vectors
/// span the same subspace iff their canonical forms are equal.
pub fn canonical_span<F: Field>(vectors: &[Vec<F>]) -> Vec<Vec<F>> {
    let mut m = vectors.to_vec();
    let pivots = rref(&mut m);
    m.truncate(pivots.len());
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int, Rat};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rat>> {
        rows.iter().map(|r| r.iter().map(|&x| rat_int(x)).collect()).collect()
    }

    #[test]
    fn rank_and_nullspace() {
        // x + y + z = 0, x + 2y + 3z = 0 -> nullspace spanned by (1, -2, 1)
        let a = m(&[&[1, 1, 1], &[1, 2, 3]]);
        assert_eq!(rank(&a), 2);
        let ns = nullspace(&a);
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        let scaled: Vec<Rat> = v.iter().map(|x| x / &v[2]).collect();
        assert_eq!(scaled, vec![rat_int(1), rat_int(-2), rat_int(1)]);
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&[&[2, 1, 0], &[1, 1, 1], &[0, 3, 1]]);
        let inv = invert(&a).unwrap();
        let prod = mat_mul(&a, &inv);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(prod[i][j], if i == j { rat_int(1) } else { rat_int(0) });
            }
        }
        // Singular matrix has no inverse.
        assert!(invert(&m(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn canonical_span_identifies_equal_subspaces() {
        let a = vec![vec![rat_int(1), rat_int(2)], vec![rat_int(0), rat_int(1)]];
        let b = vec![vec![rat_int(3), rat_int(1)], vec![rat(1, 2), rat_int(7)]];
        assert_eq!(canonical_span(&a), canonical_span(&b));
        let c = vec![vec![rat_int(1), rat_int(2)]];
        assert_ne!(canonical_span(&a), canonical_span(&c));
    }

    #[test]
    fn modular_rank_matches_rational_rank() {
        use crate::field::{fp_from_rat, Fp64, PRIME_A};
        let a = m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        let afp: Vec<Vec<Fp64>> = a
            .iter()
            .map(|row| row.iter().map(|x| fp_from_rat(x, PRIME_A).unwrap()).collect())
            .collect();
        assert_eq!(rank(&a), 2);
        assert_eq!(rank(&afp), 2);
    }
}
