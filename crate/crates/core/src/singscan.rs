//! Dominant-singularity location from Taylor coefficient asymptotics.
//!
//! Staged ratio analysis: the modulus of the closest singularity comes from
//! Richardson-extrapolated coefficient ratios, the argument from the sign
//! pattern, and the local exponent σ (in `c_n ~ C n^{-σ-1} ζ0^{-n}`) from a
//! second extrapolation. Equimodular singularity pairs defeat plain ratio
//! extrapolation by design; they surface as `Inconclusive` with candidate
//! arguments.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScanError {
    #[error("need at least {0} coefficients")]
    TooFewCoefficients(usize),
    #[error("coefficients are eventually zero; no singularity at finite distance")]
    EventuallyZero,
    #[error("ratio extrapolants fail to stabilise; candidate arguments {candidate_args:?}")]
    Inconclusive { candidate_args: Vec<f64> },
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    /// Neville extrapolation depth.
    pub levels: usize,
    /// How many trailing ratios feed the extrapolation.
    pub window: usize,
    /// Relative stabilisation demanded of successive extrapolants.
    pub stabilise_tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { levels: 6, window: 60, stabilise_tol: 1e-3 }
    }
}

#[derive(Clone, Debug)]
pub struct ScanResult {
    pub location: (f64, f64),
    pub exponent: f64,
    pub confidence: f64,
}

const MIN_COEFFS: usize = 30;

/// Locates the closest singularity of `Σ c_n ζ^n` from its coefficients.
pub fn locate_closest_singularity(
    coeffs: &[f64],
    opts: &ScanOptions,
) -> Result<ScanResult, ScanError> {
    if coeffs.len() < MIN_COEFFS {
        return Err(ScanError::TooFewCoefficients(MIN_COEFFS));
    }
    let tail_start = coeffs.len() / 3;
    if coeffs[tail_start..].iter().all(|&c| c == 0.0) {
        return Err(ScanError::EventuallyZero);
    }
    // Support gap: singularity stars like 1/(1-ζ^g) populate only every
    // g-th coefficient, which makes the argument g-fold ambiguous.
    let support: Vec<usize> = (tail_start..coeffs.len()).filter(|&i| coeffs[i] != 0.0).collect();
    let gap = support.windows(2).map(|w| w[1] - w[0]).fold(0, gcd);
    if gap > 1 {
        let root = std::f64::consts::TAU / gap as f64;
        return Err(ScanError::Inconclusive {
            candidate_args: (0..gap).map(|j| j as f64 * root).collect(),
        });
    }

    // Sign pattern over the tail: constant -> positive real axis,
    // alternating -> negative real axis, anything else -> complex pair.
    let signs: Vec<i8> = support.iter().map(|&i| if coeffs[i] > 0.0 { 1 } else { -1 }).collect();
    let constant = signs.windows(2).all(|w| w[0] == w[1]);
    let alternating = signs.windows(2).all(|w| w[0] != w[1]);
    if !constant && !alternating {
        // Oscillation period estimates the argument of the conjugate pair.
        let changes = signs.windows(2).filter(|w| w[0] != w[1]).count().max(1);
        let theta = std::f64::consts::PI * changes as f64 / signs.len() as f64;
        return Err(ScanError::Inconclusive { candidate_args: vec![theta, -theta] });
    }
    let sign = if constant { 1.0 } else { -1.0 };

    // Geometrically spaced sample points keep the extrapolation to n = ∞
    // well conditioned in f64.
    let usable = |n: usize| n + 1 < coeffs.len() && coeffs[n] != 0.0 && coeffs[n + 1] != 0.0;
    let mut sample_at = Vec::new();
    let mut n = coeffs.len() - 2;
    loop {
        let mut probe = n;
        while probe > 4 && !usable(probe) {
            probe -= 1;
        }
        if probe <= 4 || !usable(probe) {
            break;
        }
        sample_at.push(probe);
        if probe < 10 {
            break;
        }
        n = probe / 2;
    }
    if sample_at.len() < 3 {
        return Err(ScanError::TooFewCoefficients(MIN_COEFFS));
    }
    let depth = opts.levels.min(sample_at.len() - 1);

    // Folded ratios ρ_n = sign · c_{n+1}/c_n -> 1/|ζ0|.
    let nodes: Vec<f64> = sample_at.iter().rev().map(|&n| n as f64).collect();
    let ratios: Vec<f64> =
        sample_at.iter().rev().map(|&n| sign * coeffs[n + 1] / coeffs[n]).collect();
    let (rho, rho_prev) = neville_limit(&nodes, &ratios, depth);
    let rel = ((rho - rho_prev) / rho).abs();
    if !(rho.is_finite() && rho != 0.0) || rel > opts.stabilise_tol {
        return Err(ScanError::Inconclusive {
            candidate_args: vec![if sign > 0.0 { 0.0 } else { std::f64::consts::PI }],
        });
    }
    let modulus = 1.0 / rho;

    // Exponent: n (c_n ζ0^n / (c_{n+1} ζ0^{n+1}) - 1) -> σ + 1 on the
    // folded axis.
    let evals: Vec<f64> = sample_at
        .iter()
        .rev()
        .map(|&n| {
            let folded = sign * coeffs[n + 1] / coeffs[n];
            n as f64 * (1.0 / (folded * modulus) - 1.0)
        })
        .collect();
    let (sigma_plus_one, sp_prev) = neville_limit(&nodes, &evals, depth);
    let conf_src =
        rel.max(((sigma_plus_one - sp_prev) / sigma_plus_one.abs().max(1.0)).abs());
    let confidence = (-(conf_src + 1e-17).log10() / 16.0).clamp(0.0, 1.0);

    Ok(ScanResult {
        location: (sign * modulus, 0.0),
        exponent: sigma_plus_one - 1.0,
        confidence,
    })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Neville extrapolation of a sequence `v(n)` with a `1/n` asymptotic
/// expansion to `n = ∞`; returns the deepest and second-deepest column
/// values for a stabilisation estimate.
fn neville_limit(nodes: &[f64], values: &[f64], levels: usize) -> (f64, f64) {
    let mut table: Vec<f64> = values.to_vec();
    let x: Vec<f64> = nodes.iter().map(|&n| 1.0 / n).collect();
    let m = table.len();
    let depth = levels.min(m - 1);
    let mut prev = table[m - 1];
    let mut last = table[m - 1];
    for k in 1..=depth {
        for i in (k..m).rev() {
            // Interpolate to x = 0.
            let xi = x[i];
            let xik = x[i - k];
            table[i] = (xik * table[i] - xi * table[i - 1]) / (xik - xi);
        }
        prev = last;
        last = table[m - 1];
    }
    (last, prev)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series_pole() {
        // 1/(1-ζ): c_n = 1
        let coeffs = vec![1.0; 80];
        let r = locate_closest_singularity(&coeffs, &ScanOptions::default()).unwrap();
        assert!((r.location.0 - 1.0).abs() < 1e-9);
        // c_n ~ n^{-σ-1} with c_n constant: σ = -1 for the simple pole.
        assert!((r.exponent + 1.0).abs() < 1e-6);
        assert!(r.confidence > 0.4);
    }

    #[test]
    fn shifted_pole_with_alternating_signs() {
        // 1/(2+ζ) = (1/2) Σ (-1/2)^n ζ^n: singularity at -2.
        let coeffs: Vec<f64> = (0..90).map(|n| 0.5 * (-0.5f64).powi(n)).collect();
        let r = locate_closest_singularity(&coeffs, &ScanOptions::default()).unwrap();
        assert!((r.location.0 + 2.0).abs() < 1e-6);
    }

    #[test]
    fn square_root_branch_point() {
        // (1-ζ)^{-1/2}: c_n = C(2n, n) 4^{-n}; σ = -1/2.
        let mut coeffs = vec![1.0f64];
        for n in 0..200 {
            let c = coeffs[n] * (2 * n + 1) as f64 / (2 * n + 2) as f64;
            coeffs.push(c);
        }
        let r = locate_closest_singularity(&coeffs, &ScanOptions::default()).unwrap();
        assert!((r.location.0 - 1.0).abs() < 1e-6, "location {}", r.location.0);
        assert!((r.exponent + 0.5).abs() < 1e-3, "exponent {}", r.exponent);
    }

    #[test]
    fn equimodular_pair_is_inconclusive_with_candidates() {
        // 1/(1+ζ^2): singularities at ±i, support gap 2.
        let mut coeffs = vec![0.0; 81];
        for n in (0..=80).step_by(2) {
            coeffs[n] = if n % 4 == 0 { 1.0 } else { -1.0 };
        }
        match locate_closest_singularity(&coeffs, &ScanOptions::default()) {
            Err(ScanError::Inconclusive { candidate_args }) => {
                assert_eq!(candidate_args.len(), 2);
            }
            other => panic!("expected Inconclusive, got {other:?}"),
        }
        // Dense oscillating case: cos(n·π/3)-weighted geometric series.
        let coeffs: Vec<f64> =
            (0..90).map(|n| (n as f64 * 1.0472).cos() * 0.7f64.powi(n)).collect();
        match locate_closest_singularity(&coeffs, &ScanOptions::default()) {
            Err(ScanError::Inconclusive { candidate_args }) => {
                assert!((candidate_args[0].abs() - 1.0472).abs() < 0.35);
            }
            other => panic!("expected Inconclusive, got {other:?}"),
        }
    }

    #[test]
    fn rejects_short_and_polynomial_input() {
        assert!(matches!(
            locate_closest_singularity(&[1.0; 10], &ScanOptions::default()),
            Err(ScanError::TooFewCoefficients(_))
        ));
        let mut poly = vec![1.0, 2.0, 3.0];
        poly.extend(vec![0.0; 60]);
        assert!(matches!(
            locate_closest_singularity(&poly, &ScanOptions::default()),
            Err(ScanError::EventuallyZero)
        ));
    }
}
