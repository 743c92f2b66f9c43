//! Bernoulli polynomials and the shift-operator images `beta*_k`.
//!
//! The convention throughout is `B_1(x) = x - 1/2`, which makes the
//! standard choice `beta*_k = B_{k+1}(tau + 1/2) / (k+1)` come out with the
//! half-shift built in.

use num_traits::{One, Zero};

use crate::rat::{binomial, Rat};
use crate::unipoly::UniPoly;

/// Bernoulli numbers `B_0..B_k` with `B_1 = -1/2`.
fn bernoulli_numbers(k: usize) -> Vec<Rat> {
    let mut b: Vec<Rat> = Vec::with_capacity(k + 1);
    for m in 0..=k {
        if m == 0 {
            b.push(Rat::one());
            continue;
        }
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = Rat::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += Rat::from_integer(binomial(m as i64 + 1, j as i64)) * bj;
        }
        b.push(-acc / Rat::from_integer((m as i64 + 1).into()));
    }
    b
}

/// The k-th Bernoulli polynomial `B_k(x) = sum_j C(k,j) B_j x^{k-j}`.
pub fn bernoulli_poly(k: usize) -> UniPoly {
    let nums = bernoulli_numbers(k);
    let mut coeffs = vec![Rat::zero(); k + 1];
    for j in 0..=k {
        coeffs[k - j] = Rat::from_integer(binomial(k as i64, j as i64)) * &nums[j];
    }
    UniPoly::new("x", coeffs)
}

/// Shift-operator choice `beta(tau)`. All four start with the antiderivative
/// term `tau^{-1}`; the tail coefficients distinguish them.
#[derive(Clone, Debug, PartialEq)]
pub enum BetaChoice {
    /// `beta(tau) = tau^{-1}`
    Trivial,
    /// `beta(tau) = (exp(tau/2) - exp(-tau/2))^{-1}`
    Standard,
    /// `beta(tau) = tau^{-1} + sum_s beta_{2s+1} tau^{2s+1}`, odd tail
    Odd(Vec<Rat>),
    /// `beta(tau) = tau^{-1} + sum_{s>=0} beta_s tau^s`, arbitrary tail
    General(Vec<Rat>),
}

impl BetaChoice {
    pub fn name(&self) -> &'static str {
        match self {
            BetaChoice::Trivial => "trivial",
            BetaChoice::Standard => "standard",
            BetaChoice::Odd(_) => "odd",
            BetaChoice::General(_) => "general",
        }
    }
}

/// `beta*_k(tau) = beta(d_tau) . tau^k`, a polynomial of degree `k+1` with
/// leading term `tau^{k+1}/(k+1)`.
///
/// For the standard choice this is `B_{k+1}(tau + 1/2)/(k+1)`.
pub fn beta_star(k: usize, choice: &BetaChoice) -> UniPoly {
    assert!(k >= 1, "beta* is defined for k >= 1");
    let kr = Rat::from_integer((k as i64 + 1).into());
    match choice {
        BetaChoice::Trivial => UniPoly::monomial("t", Rat::one() / kr, k + 1),
        BetaChoice::Standard => {
            let b = bernoulli_poly(k + 1);
            let shifted = b.shift(&crate::rat::rat(1, 2));
            UniPoly { var: "t".into(), coeffs: shifted.scale(&(Rat::one() / kr)).coeffs }
        }
        BetaChoice::Odd(tail) => {
            let mut acc = UniPoly::monomial("t", Rat::one() / kr, k + 1);
            for (s, beta_c) in tail.iter().enumerate() {
                let order = 2 * s + 1;
                acc = acc.add(&monomial_derivative(k, order).scale(beta_c));
            }
            acc
        }
        BetaChoice::General(tail) => {
            let mut acc = UniPoly::monomial("t", Rat::one() / kr, k + 1);
            for (s, beta_c) in tail.iter().enumerate() {
                acc = acc.add(&monomial_derivative(k, s).scale(beta_c));
            }
            acc
        }
    }
}

/// `d_tau^order . tau^k`
fn monomial_derivative(k: usize, order: usize) -> UniPoly {
    if order > k {
        return UniPoly::zero("t");
    }
    let mut c = Rat::one();
    for i in 0..order {
        c *= Rat::from_integer(((k - i) as i64).into());
    }
    UniPoly::monomial("t", c, k - order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    #[test]
    fn bernoulli_polys_match_recursion_oracle() {
        assert_eq!(bernoulli_poly(0), UniPoly::one("x"));
        assert_eq!(
            bernoulli_poly(1),
            UniPoly::new("x", vec![rat(-1, 2), rat_int(1)])
        );
        // B_2 = x^2 - x + 1/6
        assert_eq!(
            bernoulli_poly(2),
            UniPoly::new("x", vec![rat(1, 6), rat_int(-1), rat_int(1)])
        );
        // B_4 = x^4 - 2x^3 + x^2 - 1/30
        assert_eq!(
            bernoulli_poly(4),
            UniPoly::new(
                "x",
                vec![rat(-1, 30), rat_int(0), rat_int(1), rat_int(-2), rat_int(1)]
            )
        );
    }

    #[test]
    fn beta_star_trivial_and_standard() {
        // (1, trivial) -> t^2/2
        assert_eq!(beta_star(1, &BetaChoice::Trivial), UniPoly::monomial("t", rat(1, 2), 2));
        // (1, standard) -> t^2/2 - 1/24
        assert_eq!(
            beta_star(1, &BetaChoice::Standard),
            UniPoly::new("t", vec![rat(-1, 24), rat_int(0), rat(1, 2)])
        );
        // (3, standard) -> B_4(t+1/2)/4, cross-checked against the recursion.
        let b4 = bernoulli_poly(4).shift(&rat(1, 2)).scale(&rat(1, 4));
        let got = beta_star(3, &BetaChoice::Standard);
        assert_eq!(got.coeffs, b4.coeffs);
        // Expanded: (t^4 - t^2/2 + 7/240)/4
        assert_eq!(
            got,
            UniPoly::new("t", vec![rat(7, 960), rat_int(0), rat(-1, 8), rat_int(0), rat(1, 4)])
        );
    }

    #[test]
    fn beta_star_half_shift_kills_subleading_term() {
        // B_{k+1}(t+1/2) has no t^k term, for every k.
        for k in 1..10 {
            let p = beta_star(k, &BetaChoice::Standard);
            assert_eq!(p.degree(), Some(k + 1));
            assert!(p.coeff(k).is_zero(), "t^{k} term should vanish");
        }
    }

    #[test]
    fn beta_star_odd_and_general_tails() {
        // odd with beta_1 = 1: beta*_3 = t^4/4 + 3 t^2... d^1(t^3) = 3t^2
        let p = beta_star(3, &BetaChoice::Odd(vec![rat_int(1)]));
        assert_eq!(
            p,
            UniPoly::new("t", vec![rat_int(0), rat_int(0), rat_int(3), rat_int(0), rat(1, 4)])
        );
        // general with beta_0 = 2: beta*_2 = t^3/3 + 2 t^2
        let q = beta_star(2, &BetaChoice::General(vec![rat_int(2)]));
        assert_eq!(
            q,
            UniPoly::new("t", vec![rat_int(0), rat_int(0), rat_int(2), rat(1, 3)])
        );
    }

    #[test]
    fn standard_choice_matches_series_inverse_of_central_difference() {
        // (exp(T/2) - exp(-T/2))^{-1} = T^{-1} - T/24 + 7 T^3/5760 - ...
        // Applying it to tau^4 must equal beta*_4.
        let k = 4usize;
        let tail = vec![rat_int(0), rat(-1, 24), rat_int(0), rat(7, 5760)];
        let via_series = beta_star(k, &BetaChoice::General(tail));
        let via_bernoulli = beta_star(k, &BetaChoice::Standard);
        assert_eq!(via_series, via_bernoulli);
    }
}
