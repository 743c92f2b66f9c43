//! The formal transform `f → (hh(n), h(ν), h'(ν))`.
//!
//! Pipeline, for `f(x) = Σ_{k≥κ} f_k x^k` with `f(0) = 0`:
//!
//! 1. `φ(n,τ) = -Σ_k f_k n^{-k} β*_k(τ)`, an exact polynomial in
//!    `(n^{-1}, τ)` whose distinguished leading term is
//!    `-f_κ n^{-κ} τ^{κ+1}/(κ+1)` ([`phi_expand`]).
//! 2. Substituting `τ = n^{κ/(κ+1)} u` turns the non-leading part into
//!    `Σ_{t≥1} x^t P_t(u)` with `x = n^{-1/(κ+1)}`; its exponential is
//!    expanded slice by slice in `x` (weight-graded, so the expansion is
//!    exact and minimal).
//! 3. Termwise ramified Laplace integration against the kernel
//!    `exp(-f_κ u^{κ+1}/(κ+1))` via
//!    `∫_0^∞ u^a e^{-λ u^{κ+1}} du = Γ(s_a) λ^{-s_a}/(κ+1)`,
//!    `s_a = (a+1)/(κ+1)`, reduces within each residue class of `s_a`
//!    mod 1 to a rational multiple of one class irrational; coefficients
//!    stay in the ground field and the irrational moves to the series
//!    prefactor. More than one fractional class would need independent
//!    irrationals and is refused.
//! 4. The formal Borel step divides the coefficient at `n^{-m}` by
//!    `Γ(m+1)` (the `dn/n` normalisation) to produce `h(ν) = Σ h_m ν^m`;
//!    `h'` is the termwise derivative.
//!
//! Everything is generic over the coefficient [`Field`], so the identical
//! pipeline yields exact rational series and fast modular images for the
//! annihilator scans.

use num_traits::Signed;
use serde::Serialize;
use thiserror::Error;

use crate::bernoulli::BetaChoice;
use crate::field::Field;
use crate::puiseux::{Prefactor, PuiseuxSeries};
use crate::rat::{rat_to_f64, Rat};
use crate::sp::{DrivingFunction, SpError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NirError {
    #[error("coefficients span {0} independent irrational classes; at most one is representable")]
    UnsupportedRamification(usize),
    #[error("driving function is degenerate for the transform (f = 0)")]
    Degenerate,
    #[error("coefficient does not embed into the working field (bad prime)")]
    BadPrime,
    #[error(transparent)]
    Sp(#[from] SpError),
    #[error("numeric evaluation did not converge: estimate {0}")]
    NonConvergent(f64),
}

// ---------------------------------------------------------------------------
// φ expansion.
// ---------------------------------------------------------------------------

/// Exact bivariate expansion of `φ(n,τ) = -Σ_k f_k n^{-k} β*_k(τ)`.
#[derive(Clone, Debug, Serialize)]
pub struct PhiExpansion {
    pub kappa: usize,
    /// `(j, s) → coefficient of n^{-j} τ^s` (the leading term included).
    pub terms: std::collections::BTreeMap<(usize, usize), Rat>,
    /// The distinguished term `-f_κ n^{-κ} τ^{κ+1}/(κ+1)`.
    pub leading: ((usize, usize), Rat),
}

impl PhiExpansion {
    /// Non-leading part `-f^{↑β*}`: every term except the distinguished one.
    pub fn nonleading(&self) -> impl Iterator<Item = (&(usize, usize), &Rat)> {
        let lead = self.leading.0;
        self.terms.iter().filter(move |(k, _)| **k != lead)
    }

    pub fn eval_f64(&self, n: f64, tau: f64) -> f64 {
        let mut acc = 0.0;
        for (&(j, s), c) in &self.terms {
            acc += rat_to_f64(c) * n.powi(-(j as i32)) * tau.powi(s as i32);
        }
        acc
    }
}

/// β*-coefficient table over a generic field: `rows[k-1][j]` is the
/// coefficient of `τ^j` in `β*_k`, for `k = 1..=kmax`.
fn beta_star_rows<F: Field>(
    beta: &BetaChoice,
    kmax: usize,
    rat_to_f: &dyn Fn(&Rat) -> Option<F>,
) -> Result<Vec<Vec<F>>, NirError> {
    let inv_int = |v: i64| -> Result<F, NirError> {
        rat_to_f(&Rat::new(1.into(), v.into())).ok_or(NirError::BadPrime)
    };
    let mut rows = Vec::with_capacity(kmax);
    match beta {
        BetaChoice::Trivial => {
            for k in 1..=kmax {
                let mut row = vec![F::zero(); k + 2];
                row[k + 1] = inv_int(k as i64 + 1)?;
                rows.push(row);
            }
        }
        BetaChoice::Standard => {
            // B_m(τ + 1/2) = Σ_i C(m,i) B_i(1/2) τ^{m-i} with the central
            // values B_i(1/2) = (2^{1-i} - 1) B_i.
            let m_max = kmax + 1;
            let mut bern: Vec<F> = Vec::with_capacity(m_max + 1);
            let mut pascal: Vec<F> = vec![F::one()];
            for m in 0..=m_max {
                // pascal holds C(m, ·); build C(m+1, ·) for the recursion.
                let mut next = vec![F::one(); m + 2];
                for j in 1..=m {
                    next[j] = pascal[j - 1].add(&pascal[j]);
                }
                if m == 0 {
                    bern.push(F::one());
                } else {
                    let mut acc = F::zero();
                    for (j, b) in bern.iter().enumerate() {
                        acc = acc.add(&next[j].mul(b));
                    }
                    let minus_inv = inv_int(m as i64 + 1)?.neg();
                    bern.push(acc.mul(&minus_inv));
                }
                pascal = next;
            }
            let half = inv_int(2)?;
            let mut central: Vec<F> = Vec::with_capacity(m_max + 1);
            let mut pow = rat_to_f(&Rat::from_integer(2.into())).ok_or(NirError::BadPrime)?; // 2^{1-i} from i = 0
            for (i, b) in bern.iter().enumerate() {
                if i > 0 {
                    pow = pow.mul(&half);
                }
                central.push(pow.sub(&F::one()).mul(b));
            }
            let mut binrow: Vec<F> = vec![F::one()];
            for m in 1..=m_max {
                let mut next = vec![F::one(); m + 1];
                for j in 1..m {
                    next[j] = binrow[j - 1].add(&binrow[j]);
                }
                binrow = next;
                if m >= 2 {
                    // k = m - 1: coefficients of B_m(τ+1/2)/m.
                    let inv_m = inv_int(m as i64)?;
                    let mut row = vec![F::zero(); m + 1];
                    for i in 0..=m {
                        row[m - i] = binrow[i].mul(&central[i]).mul(&inv_m);
                    }
                    rows.push(row);
                }
            }
            rows.truncate(kmax);
        }
        BetaChoice::Odd(tail) | BetaChoice::General(tail) => {
            let odd = matches!(beta, BetaChoice::Odd(_));
            for k in 1..=kmax {
                let mut row = vec![F::zero(); k + 2];
                row[k + 1] = inv_int(k as i64 + 1)?;
                for (s, c) in tail.iter().enumerate() {
                    let order = if odd { 2 * s + 1 } else { s };
                    if order > k {
                        break;
                    }
                    let mut fall = F::one();
                    for d in 0..order {
                        fall = fall.mul(&F::from_i64((k - d) as i64));
                    }
                    let cf = rat_to_f(c).ok_or(NirError::BadPrime)?;
                    row[k - order] = row[k - order].add(&cf.mul(&fall));
                }
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

/// `φ(n,τ)` for polynomial `f` (coefficients `f_1..`), exact, with τ-order
/// capped at `tau_order`.
pub fn phi_expand(f_coeffs: &[Rat], beta: &BetaChoice, tau_order: usize) -> PhiExpansion {
    let kappa = f_coeffs
        .iter()
        .position(|c| !c.is_zero())
        .map(|i| i + 1)
        .expect("f must not vanish identically");
    let rows =
        beta_star_rows::<Rat>(beta, f_coeffs.len(), &|r| Some(r.clone())).expect("exact field");
    let mut terms = std::collections::BTreeMap::new();
    for (k1, fk) in f_coeffs.iter().enumerate() {
        if fk.is_zero() {
            continue;
        }
        let k = k1 + 1;
        for (j, b) in rows[k1].iter().enumerate() {
            if b.is_zero() || j > tau_order {
                continue;
            }
            let entry = terms.entry((k, j)).or_insert_with(Rat::zero);
            *entry -= fk * b;
            if entry.is_zero() {
                terms.remove(&(k, j));
            }
        }
    }
    let lead_key = (kappa, kappa + 1);
    let lead_coeff = terms.get(&lead_key).cloned().unwrap_or_else(Rat::zero);
    PhiExpansion { kappa, terms, leading: (lead_key, lead_coeff) }
}

// ---------------------------------------------------------------------------
// Slice engine.
// ---------------------------------------------------------------------------

/// One residue class of the transform output on the exponent lattice
/// `m = (i - κ)/(κ+1)`: `class = i mod (κ+1)`, coefficients at
/// `m = m0 + l` for `l = 0..len`.
#[derive(Clone, Debug)]
pub struct ClassSeries<F> {
    pub class: usize,
    /// `m0 = (class - κ)/(κ+1)` as an exact fraction `(num, den)`.
    pub base_exponent: (i64, i64),
    /// Borel-side coefficients (class irrational stripped).
    pub h: Vec<F>,
    /// Laplace-side coefficients (class irrational stripped).
    pub hh: Vec<F>,
}

pub struct SliceOutput<F> {
    pub kappa: usize,
    pub classes: Vec<ClassSeries<F>>,
}

/// Runs the slice pipeline over any field. `f[k-1] = f_k`; pass
/// [`needed_f_length`] coefficients for complete slices.
pub fn nir_slices<F: Field>(
    f: &[F],
    beta: &BetaChoice,
    n_slices: usize,
    rat_to_f: &dyn Fn(&Rat) -> Option<F>,
) -> Result<SliceOutput<F>, NirError> {
    let kappa =
        f.iter().position(|c| !c.is_zero()).map(|i| i + 1).ok_or(NirError::Degenerate)?;
    let kp1 = kappa + 1;
    let rows = beta_star_rows::<F>(beta, f.len(), rat_to_f)?;
    // Weight-graded slices of the non-leading part: the monomial
    // f_k b_{k,j} u^j carries weight t = (κ+1)k - κj ≥ 1.
    let mut p_slices: Vec<Vec<(usize, F)>> = vec![Vec::new(); n_slices.max(1)];
    for (k1, fk) in f.iter().enumerate() {
        if fk.is_zero() {
            continue;
        }
        let k = k1 + 1;
        for (j, b) in rows[k1].iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            let w = (kp1 * k) as i64 - (kappa * j) as i64;
            if w == 0 {
                continue; // the kernel term
            }
            debug_assert!(w >= 1);
            if (w as usize) < n_slices {
                let c = fk.mul(b).neg();
                p_slices[w as usize].push((j, c));
            }
        }
    }
    // Q = exp(Σ_t x^t P_t) slice by slice: Q_i = (1/i) Σ_t t · P_t · Q_{i-t}.
    let mut q: Vec<Vec<F>> = Vec::with_capacity(n_slices);
    q.push(vec![F::one()]);
    for i in 1..n_slices {
        let mut acc: Vec<F> = Vec::new();
        for t in 1..=i {
            if p_slices[t].is_empty() {
                continue;
            }
            let tf = F::from_i64(t as i64);
            for &(j, ref c) in &p_slices[t] {
                let tc = c.mul(&tf);
                for (d, qc) in q[i - t].iter().enumerate() {
                    if qc.is_zero() {
                        continue;
                    }
                    let deg = d + j;
                    if acc.len() <= deg {
                        acc.resize(deg + 1, F::zero());
                    }
                    let add = tc.mul(qc);
                    acc[deg] = acc[deg].add(&add);
                }
            }
        }
        let inv_i =
            rat_to_f(&Rat::new(1.into(), (i as i64).into())).ok_or(NirError::BadPrime)?;
        for c in &mut acc {
            if !c.is_zero() {
                *c = c.mul(&inv_i);
            }
        }
        q.push(acc);
    }
    // Class-stripped Laplace moments: r_a = g_a / g_{a mod (κ+1)} with
    // g_{a+κ+1}/g_a = s_a/ρ, s_a = (a+1)/(κ+1), ρ = f_κ/(κ+1).
    let kp1_inv =
        rat_to_f(&Rat::new(1.into(), (kp1 as i64).into())).ok_or(NirError::BadPrime)?;
    let rho = f[kappa - 1].mul(&kp1_inv);
    let rho_inv = rho.inv().ok_or(NirError::BadPrime)?;
    let max_deg = q.iter().map(|s| s.len()).max().unwrap_or(1);
    let mut moment_ratio: Vec<F> = Vec::with_capacity(max_deg + kp1);
    for a in 0..(max_deg + kp1) {
        if a < kp1 {
            moment_ratio.push(F::one());
        } else {
            let prev = a - kp1;
            let s_prev = F::from_i64(prev as i64 + 1).mul(&kp1_inv);
            let v = moment_ratio[prev].mul(&s_prev).mul(&rho_inv);
            moment_ratio.push(v);
        }
    }
    let mut classes: Vec<ClassSeries<F>> = (0..kp1)
        .map(|class| ClassSeries {
            class,
            base_exponent: reduced(class as i64 - kappa as i64, kp1 as i64),
            h: Vec::new(),
            hh: Vec::new(),
        })
        .collect();
    for (i, slice) in q.iter().enumerate() {
        let class = i % kp1;
        let mut c = F::zero();
        for (a, qa) in slice.iter().enumerate() {
            if qa.is_zero() {
                continue;
            }
            debug_assert_eq!(a % kp1, class);
            c = c.add(&qa.mul(&moment_ratio[a]));
        }
        // hh normalisation: the integer class absorbs its rational base
        // moment g_κ = 1/f_κ; fractional classes absorb 1/(κ+1) for κ ≥ 2
        // (at κ = 1 that factor lives inside the prefactor radical).
        let hh_c = if class == kappa {
            c.mul(&rho_inv).mul(&kp1_inv)
        } else if kappa == 1 {
            c.clone()
        } else {
            c.mul(&kp1_inv)
        };
        // Borel step: divide by the within-class reduction of Γ(m+1),
        // the rising factorial (s0)_l with s0 = (class+1)/(κ+1).
        let l = (i / kp1) as i64;
        let s0 = F::from_i64(class as i64 + 1).mul(&kp1_inv);
        let mut rising = F::one();
        for d in 0..l {
            rising = rising.mul(&s0.add(&F::from_i64(d)));
        }
        let mut h_c = match rising.inv() {
            Some(inv) => hh_c.mul(&inv),
            None => return Err(NirError::BadPrime),
        };
        if class != kappa && kappa == 1 {
            // P_hh = Γ(1/2)√(1/(2f_1)) vs P_h = √(2/f_1): the ratio beyond
            // Γ(1/2) is the rational 2.
            h_c = h_c.mul(&kp1_inv);
        }
        let entry = &mut classes[class];
        entry.hh.push(hh_c);
        entry.h.push(h_c);
    }
    Ok(SliceOutput { kappa, classes })
}

fn reduced(num: i64, den: i64) -> (i64, i64) {
    let g = num_integer::Integer::gcd(&num, &den);
    if g == 0 {
        (0, 1)
    } else {
        (num / g, den / g)
    }
}

/// f-series length needed so every lattice slice below `n_slices` is
/// complete: a factor `f_k` contributes weight at least `k - κ`.
pub fn needed_f_length(kappa: usize, n_slices: usize) -> usize {
    n_slices + kappa
}

// ---------------------------------------------------------------------------
// Exact transform with prefactor assembly.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct NirMeta {
    pub driving: String,
    pub beta: String,
    pub kappa: usize,
    pub n_slices: usize,
    /// Set when `f_κ < 0`: the Laplace ray needs rotating for decay, which
    /// shows up as a negative radicand (an imaginary overall factor) in
    /// the prefactor; the stored rational coefficients are unaffected.
    pub ray_rotated: bool,
}

#[derive(Clone, Debug)]
pub struct NirOutput {
    /// `hh` as a series in `w = 1/n`: the coefficient at `w^m` is `hh_m`
    /// in `hh(n) = Σ hh_m n^{-m}`.
    pub hh: PuiseuxSeries,
    pub h: PuiseuxSeries,
    pub h_prime: PuiseuxSeries,
    pub meta: NirMeta,
}

/// Exact transform of a polynomial (or truncated) driving series
/// `f_1..f_len`, producing `n_slices` lattice coefficients.
pub fn nir_transform(
    f_coeffs: &[Rat],
    beta: &BetaChoice,
    n_slices: usize,
) -> Result<NirOutput, NirError> {
    let out = nir_slices::<Rat>(f_coeffs, beta, n_slices, &|r| Some(r.clone()))?;
    let kappa = out.kappa;
    let kp1 = (kappa + 1) as i64;
    let fractional_present: Vec<&ClassSeries<Rat>> = out
        .classes
        .iter()
        .filter(|c| c.class != kappa && c.h.iter().any(|x| !x.is_zero()))
        .collect();
    if fractional_present.len() > 1 {
        return Err(NirError::UnsupportedRamification(fractional_present.len()));
    }
    let rho = f_coeffs[kappa - 1].clone() / Rat::from_integer(kp1.into());
    let ray_rotated = rho.is_negative();
    let (hh_prefactor, h_prefactor) = match fractional_present.first() {
        None => (Prefactor::one(), Prefactor::one()),
        Some(cs) => {
            if kappa == 1 {
                // Γ(1/2)·√(1/(2 f_1)); the Borel image divides by Γ(1/2)
                // and a rational 2, leaving √(2/f_1).
                let rad = Rat::one() / (Rat::from_integer(2.into()) * &f_coeffs[0]);
                (
                    Prefactor { gamma_half: 1, radicand: rad, gammas: vec![], powers: vec![] },
                    Prefactor::sqrt(Rat::from_integer(2.into()) / &f_coeffs[0]),
                )
            } else {
                // Γ(s0)·ρ^{-s0} and ρ^{-s0}; the rational 1/(κ+1) lives in
                // the stored coefficients.
                let s0 = Rat::new((cs.class as i64 + 1).into(), kp1.into());
                (
                    Prefactor {
                        gamma_half: 0,
                        radicand: Rat::one(),
                        gammas: vec![(s0.clone(), 1)],
                        powers: vec![(rho.clone(), -s0.clone())],
                    },
                    Prefactor {
                        gamma_half: 0,
                        radicand: Rat::one(),
                        gammas: vec![],
                        powers: vec![(rho.clone(), -s0)],
                    },
                )
            }
        }
    };
    // Assemble the lattice series: index i ↦ exponent (i-κ)/(κ+1).
    let assemble = |pick_hh: bool, var: &str, prefactor: Prefactor| -> PuiseuxSeries {
        let mut coeffs = vec![Rat::zero(); n_slices];
        for cs in &out.classes {
            let src = if pick_hh { &cs.hh } else { &cs.h };
            for (l, v) in src.iter().enumerate() {
                let i = cs.class + l * (kappa + 1);
                if i < n_slices {
                    coeffs[i] = v.clone();
                }
            }
        }
        PuiseuxSeries {
            var: var.into(),
            ram: kp1,
            base: -(kappa as i64),
            coeffs,
            trunc: n_slices as i64 - kappa as i64,
            prefactor,
        }
    };
    let hh = assemble(true, "ninv", hh_prefactor);
    let h = assemble(false, "nu", h_prefactor);
    let h_prime = h.derivative();
    Ok(NirOutput {
        hh,
        h,
        h_prime,
        meta: NirMeta {
            driving: format!(
                "f:[{}]",
                f_coeffs.iter().map(crate::rat::rat_to_string).collect::<Vec<_>>().join(",")
            ),
            beta: beta.name().to_string(),
            kappa,
            n_slices,
            ray_rotated,
        },
    })
}

/// Transform of a driving function, resolving the f-series length needed
/// for `n_slices` exact lattice coefficients.
pub fn nir_transform_driving(
    driving: &DrivingFunction,
    beta: &BetaChoice,
    n_slices: usize,
) -> Result<NirOutput, NirError> {
    let kappa = driving.kappa()?;
    let f = driving.f_coefficients(needed_f_length(kappa, n_slices))?;
    let mut out = nir_transform(&f, beta, n_slices)?;
    out.meta.driving = driving.describe();
    Ok(out)
}

/// `(singular, regular)` split: fractional-exponent part (with prefactor)
/// and integer-exponent part.
pub fn split_singular_regular(s: &PuiseuxSeries) -> (PuiseuxSeries, PuiseuxSeries) {
    s.split_singular_regular()
}

// ---------------------------------------------------------------------------
// Numeric oracle: adaptive quadrature of the defining integral.
// ---------------------------------------------------------------------------

/// `∫_0^∞ exp(φ(n,τ)) dτ` by adaptive Simpson quadrature at a numeric `n`.
///
/// The integration window is sized from the kernel decay scale
/// `τ* = ((κ+1) n^κ / f_κ)^{1/(κ+1)}`.
pub fn quadrature_hh(phi: &PhiExpansion, n: f64, rel_tol: f64) -> f64 {
    let kappa = phi.kappa as f64;
    let fk = rat_to_f64(&phi.leading.1).abs() * (kappa + 1.0);
    let scale = ((kappa + 1.0) * n.powf(kappa) / fk).powf(1.0 / (kappa + 1.0));
    let upper = scale * (60f64).powf(1.0 / (kappa + 1.0)) * 1.5;
    let f = |tau: f64| phi.eval_f64(n, tau).exp();
    adaptive_simpson(&f, 0.0, upper, rel_tol, 24)
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fa = f(a);
        let fm = f(m);
        let fb = f(b);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), fa, fm, fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        whole: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, left, fa, flm, fm, tol / 2.0, depth - 1)
                + rec(f, m, b, right, fm, frm, fb, tol / 2.0, depth - 1)
        }
    }
    let (whole, fa, fm, fb) = simpson(f, a, b);
    let scale = whole.abs().max(1e-300);
    rec(f, a, b, whole, fa, fm, fb, tol * scale, depth)
}

/// Evaluates the truncated `hh` series at a numeric `n`, prefactors
/// included.
pub fn eval_hh(output: &NirOutput, n: f64) -> Result<f64, &'static str> {
    output.hh.eval_f64(1.0 / n)
}

// ---------------------------------------------------------------------------
// Discretised numeric evaluator.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct NurReport {
    pub nu: Vec<f64>,
    /// `h(ν)` samples as (re, im).
    pub values: Vec<(f64, f64)>,
    /// Difference between the M and M/2 truncations, sup over the contour.
    pub m_estimate: f64,
}

/// Numeric evaluation of the discretised transform: the τ-integral is
/// replaced by the sum over `m ∈ 1/2 + N` (truncated at `m_cutoff` terms),
/// followed by a vertical-line inverse transform sampled at the given ν.
pub fn nur_numeric(
    f_coeffs: &[Rat],
    beta: &BetaChoice,
    m_cutoff: usize,
    contour: (f64, f64, usize),
    nu_samples: &[f64],
    tolerance: f64,
) -> Result<NurReport, NirError> {
    use num_complex::Complex64;
    if f_coeffs.iter().all(|c| c.is_zero()) {
        return Err(NirError::Degenerate);
    }
    let phi = phi_expand(f_coeffs, beta, f_coeffs.len() + 2);
    let (c, height, steps) = contour;
    assert!(c > 0.0 && height > 0.0 && steps >= 2);
    let terms: Vec<((usize, usize), f64)> =
        phi.terms.iter().map(|(&k, v)| (k, rat_to_f64(v))).collect();
    let phi_at = |n: Complex64, m: f64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &((j, s), coeff) in &terms {
            acc += coeff * m.powi(s as i32) * n.powf(-(j as f64));
        }
        acc
    };
    let partial_sum = |n: Complex64, cutoff: usize| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for half in 0..cutoff {
            let m = half as f64 + 0.5;
            acc += phi_at(n, m).exp();
        }
        acc
    };
    let dt = 2.0 * height / (steps as f64 - 1.0);
    let nodes: Vec<Complex64> =
        (0..steps).map(|i| Complex64::new(c, -height + dt * i as f64)).collect();
    let s_full: Vec<Complex64> = nodes.iter().map(|&n| partial_sum(n, m_cutoff)).collect();
    let s_half: Vec<Complex64> = nodes.iter().map(|&n| partial_sum(n, m_cutoff / 2)).collect();
    let m_estimate =
        s_full.iter().zip(&s_half).map(|(a, b)| (a - b).norm()).fold(0.0f64, f64::max);
    if m_estimate > tolerance {
        return Err(NirError::NonConvergent(m_estimate));
    }
    let mut values = Vec::with_capacity(nu_samples.len());
    for &nu in nu_samples {
        // (1/2πi) ∫ e^{nν} S(n) dn/n, trapezoid in t, dn = i dt.
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, (&n, s)) in nodes.iter().zip(&s_full).enumerate() {
            let w = if i == 0 || i == steps - 1 { 0.5 } else { 1.0 };
            acc += w * (n * nu).exp() * s / n;
        }
        acc *= Complex64::new(0.0, dt) / Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        values.push((acc.re, acc.im));
    }
    Ok(NurReport { nu: nu_samples.to_vec(), values, m_estimate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    #[test]
    fn phi_for_linear_driving() {
        // f(x) = x, standard: φ = -n^{-1}(τ²/2 - 1/24)
        let phi = phi_expand(&[rat_int(1)], &BetaChoice::Standard, 8);
        assert_eq!(phi.kappa, 1);
        assert_eq!(phi.terms.get(&(1, 2)), Some(&rat(-1, 2)));
        assert_eq!(phi.terms.get(&(1, 0)), Some(&rat(1, 24)));
        assert_eq!(phi.leading, ((1, 2), rat(-1, 2)));
        // trivial: φ = -n^{-1} τ²/2 only
        let phi = phi_expand(&[rat_int(1)], &BetaChoice::Trivial, 8);
        assert_eq!(phi.terms.len(), 1);
        // f(x) = x², standard: φ = -n^{-2}(τ³ - τ/4)/3
        let phi = phi_expand(&[rat_int(0), rat_int(1)], &BetaChoice::Standard, 8);
        assert_eq!(phi.terms.get(&(2, 3)), Some(&rat(-1, 3)));
        assert_eq!(phi.terms.get(&(2, 1)), Some(&rat(1, 12)));
    }

    #[test]
    fn phi_is_linear_in_f() {
        let a = phi_expand(&[rat_int(1), rat(1, 2)], &BetaChoice::Standard, 10);
        let b = phi_expand(&[rat_int(0), rat(1, 3), rat_int(2)], &BetaChoice::Standard, 10);
        let sum = phi_expand(&[rat_int(1), rat(5, 6), rat_int(2)], &BetaChoice::Standard, 10);
        let mut merged = a.terms.clone();
        for (k, v) in &b.terms {
            let e = merged.entry(*k).or_insert_with(Rat::zero);
            *e += v;
            if e.is_zero() {
                merged.remove(k);
            }
        }
        assert_eq!(merged, sum.terms);
    }

    #[test]
    fn gaussian_one_term_output() {
        // f(x) = x, trivial: hh = Γ(1/2)·√(1/2)·n^{1/2}, one term.
        let out = nir_transform(&[rat_int(1)], &BetaChoice::Trivial, 12).unwrap();
        assert_eq!(out.hh.prefactor.gamma_half, 1);
        assert_eq!(out.hh.prefactor.radicand, rat(1, 2));
        assert_eq!(out.hh.support(), vec![(-1, 2)]); // w^{-1/2} = n^{1/2}
        assert_eq!(out.hh.coeff_at(-1), rat_int(1));
        // Numeric check against the Gaussian integral at n = 40.
        let v = eval_hh(&out, 40.0).unwrap();
        let want = (std::f64::consts::PI * 40.0 / 2.0).sqrt();
        assert!((v - want).abs() / want < 1e-12);
        // h: single term in ν^{-1/2}, coefficient 1/2 against √2.
        assert_eq!(out.h.support(), vec![(-1, 2)]);
        assert_eq!(out.h.prefactor.gamma_half, 0);
        assert_eq!(out.h.prefactor.radicand, rat(2, 1));
        assert_eq!(out.h.coeff_at(-1), rat(1, 2));
        assert!(!out.meta.ray_rotated);
    }

    #[test]
    fn standard_linear_driving_series() {
        // f(x) = x, standard: hh = e^{1/(24n)} Γ(1/2)(n/2)^{1/2}:
        // coefficients 1, 1/24, 1/1152 on n^{1/2 - j}.
        let out = nir_transform(&[rat_int(1)], &BetaChoice::Standard, 8).unwrap();
        assert_eq!(out.hh.coeff_at(-1), rat_int(1));
        assert_eq!(out.hh.coeff_at(1), rat(1, 24));
        assert_eq!(out.hh.coeff_at(3), rat(1, 1152));
        // Kernel parity keeps everything in the half-integer class.
        let (sing, reg) = out.hh.split_singular_regular();
        assert!(reg.is_zero());
        assert!(!sing.is_zero());
    }

    #[test]
    fn exponent_lattice_assertion() {
        // Exponents of h lie in -κ/(1+κ) + N/(1+κ).
        let out =
            nir_transform(&[rat_int(1), rat(1, 2), rat(1, 3)], &BetaChoice::Trivial, 16).unwrap();
        for (num, den) in out.h.support() {
            assert!(den <= 2);
            assert!(num * 2 >= -den, "exponent {num}/{den} below the lattice floor");
        }
    }

    #[test]
    fn mixed_parity_driving_has_both_parts() {
        // f = x + x²: the expansion populates the half-integer class and
        // the integer class.
        let out = nir_transform(&[rat_int(1), rat_int(1)], &BetaChoice::Trivial, 14).unwrap();
        let (sing, reg) = out.hh.split_singular_regular();
        assert!(!sing.is_zero());
        assert!(!reg.is_zero());
        // Frozen values from the independent expansion
        // hh = Σ_j (-1/3)^j/j! · 2^{(3j-1)/2} Γ((3j+1)/2) · n^{(1-j)/2}:
        // fractional class stored against Γ(1/2)·√(1/2), integer class
        // plain.
        assert_eq!(out.hh.coeff_at(-1), rat_int(1)); // n^{1/2}
        assert_eq!(out.hh.coeff_at(0), rat(-2, 3)); // n^0
        assert_eq!(out.hh.coeff_at(1), rat(5, 6)); // n^{-1/2}
        assert_eq!(out.hh.coeff_at(2), rat(-64, 27)); // n^{-1}
        // The truncated series meets quadrature deep in the asymptotic
        // regime.
        let phi = phi_expand(&[rat_int(1), rat_int(1)], &BetaChoice::Trivial, 40);
        let quad = quadrature_hh(&phi, 1000.0, 1e-13);
        let series = eval_hh(&out, 1000.0).unwrap();
        assert!((quad - series).abs() / quad < 1e-9, "{quad} vs {series}");
    }

    #[test]
    fn hh_h_duality_within_classes() {
        // hh_m = h_m·Γ(m+1) reduced in-class: fractional κ=1 class:
        // hh_i = h_i · 2 · (1/2)_l; integer class: hh_i = h_i · l!.
        let out =
            nir_transform(&[rat_int(1), rat(1, 2), rat(-1, 3)], &BetaChoice::Standard, 14)
                .unwrap();
        for (i, c) in out.hh.coeffs.iter().enumerate() {
            let lattice = out.hh.base + i as i64; // 2m for κ = 1
            let h_c = out.h.coeff_at(lattice);
            if c.is_zero() {
                assert!(h_c.is_zero());
                continue;
            }
            if lattice.rem_euclid(2) == 0 {
                let l = (lattice / 2) as u64;
                let fact = Rat::from_integer(crate::rat::factorial(l));
                assert_eq!(c.clone(), h_c * fact, "integer class at m={}", lattice / 2);
            } else {
                let l = (lattice + 1) / 2;
                let mut rising = Rat::one();
                for d in 0..l {
                    rising *= rat(1, 2) + Rat::from_integer(d.into());
                }
                assert_eq!(c.clone(), h_c * rising * rat_int(2), "fractional class l={l}");
            }
        }
    }

    #[test]
    fn kappa_two_monomial_and_ramification_refusal() {
        // f = x² (trivial): single-term Γ(1/3)-class series.
        let out = nir_transform(&[rat_int(0), rat_int(1)], &BetaChoice::Trivial, 9).unwrap();
        assert_eq!(out.hh.support(), vec![(-2, 3)]);
        assert_eq!(out.hh.prefactor.gammas, vec![(rat(1, 3), 1)]);
        assert_eq!(out.hh.prefactor.powers, vec![(rat(1, 3), rat(-1, 3))]);
        assert_eq!(out.hh.coeff_at(-2), rat(1, 3));
        // Numeric value at n = 10: Γ(4/3)(3n²)^{1/3}.
        let v = eval_hh(&out, 10.0).unwrap();
        let want = crate::puiseux::gamma_f64(4.0 / 3.0) * (300f64).powf(1.0 / 3.0);
        assert!((v - want).abs() / want < 1e-12, "{v} vs {want}");
        // f = x² + x³ hits two fractional classes.
        assert!(matches!(
            nir_transform(&[rat_int(0), rat_int(1), rat_int(1)], &BetaChoice::Trivial, 24),
            Err(NirError::UnsupportedRamification(2))
        ));
    }

    #[test]
    fn quadrature_matches_gaussian() {
        // ∫_0^∞ e^{-τ²/(2n)} dτ = √(πn/2)
        let phi = phi_expand(&[rat_int(1)], &BetaChoice::Trivial, 4);
        let n = 50.0;
        let got = quadrature_hh(&phi, n, 1e-12);
        let want = (std::f64::consts::PI * n / 2.0).sqrt();
        assert!((got - want).abs() / want < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn negative_leading_coefficient_flags_rotation() {
        let out = nir_transform(&[rat_int(-1)], &BetaChoice::Trivial, 6).unwrap();
        assert!(out.meta.ray_rotated);
        assert!(out.hh.prefactor.radicand.is_negative());
        // Numeric evaluation refuses the imaginary prefactor.
        assert!(eval_hh(&out, 10.0).is_err());
    }

    #[test]
    fn modular_slices_agree_with_exact_slices() {
        use crate::field::{fp_from_rat, Fp64, PRIME_A};
        let f = vec![rat_int(1), rat(1, 2), rat(1, 3), rat(1, 4)];
        let exact =
            nir_slices::<Rat>(&f, &BetaChoice::Standard, 20, &|r| Some(r.clone())).unwrap();
        let ffp: Vec<Fp64> = f.iter().map(|c| fp_from_rat(c, PRIME_A).unwrap()).collect();
        let modular =
            nir_slices::<Fp64>(&ffp, &BetaChoice::Standard, 20, &|r| fp_from_rat(r, PRIME_A))
                .unwrap();
        for (ce, cm) in exact.classes.iter().zip(&modular.classes) {
            assert_eq!(ce.h.len(), cm.h.len());
            for (e, m) in ce.h.iter().zip(&cm.h) {
                assert_eq!(fp_from_rat(e, PRIME_A).unwrap(), *m);
            }
        }
    }

    #[test]
    fn nur_converges_and_truncation_estimate_shrinks() {
        // Tail terms behave like exp(-m² c / (2(c² + H²))), so the cutoff
        // must dominate sqrt((c² + H²)/c).
        let f = vec![rat_int(1)];
        let nu: Vec<f64> = vec![0.3, 0.5, 0.8];
        let report =
            nur_numeric(&f, &BetaChoice::Trivial, 80, (1.0, 5.0, 2001), &nu, 1e-9).unwrap();
        assert!(report.m_estimate < 1e-9);
        // Doubling the cutoff shrinks the estimate by far more than 4x.
        let coarse =
            nur_numeric(&f, &BetaChoice::Trivial, 16, (1.0, 5.0, 2001), &nu, 1e9).unwrap();
        let fine =
            nur_numeric(&f, &BetaChoice::Trivial, 32, (1.0, 5.0, 2001), &nu, 1e9).unwrap();
        assert!(coarse.m_estimate > 4.0 * fine.m_estimate || fine.m_estimate < 1e-14);
    }

    #[test]
    fn nur_with_zero_cutoff_is_zero() {
        let f = vec![rat_int(1)];
        let report =
            nur_numeric(&f, &BetaChoice::Trivial, 0, (1.0, 10.0, 501), &[0.5], 1e9).unwrap();
        assert_eq!(report.values[0], (0.0, 0.0));
    }
}
