//! Exact-arithmetic toolkit for sum-product (SP) series and their inner
//! generators.
//!
//! The crate is organised around eight subsystems:
//!
//! - [`rat`], [`unipoly`], [`multipoly`], [`puiseux`], [`cyclo`]: exact
//!   scalars, polynomials, truncated ramified series and the negacyclic
//!   ring `Z[x]/(x^p+1) ⊗ Q` underpinning everything else.
//! - [`bernoulli`]: Bernoulli polynomials and the shift-operator images
//!   `beta*_k` used by the coefficient pipeline.
//! - [`sp`]: driving functions, exact SP Taylor coefficients `J(n)` and
//!   the series `j(ζ)`.
//! - [`singscan`]: numeric location of the dominant singularity from
//!   coefficient asymptotics.
//! - [`nir`]: the formal transform `f → (hh(n), h(ν), h'(ν))` by termwise
//!   ramified Laplace integration in `τ` followed by termwise Borel
//!   integration in `n`, plus the discretised numeric evaluator.
//! - [`ode`]: differential operators in the two parametrisations
//!   `(ν, ∂_ν)` / `(n, −∂_n)`, exact and empirical annihilator discovery,
//!   dimension grids and the non-existence scans.
//! - [`covariance`]: the shift derivation on `Q[f_0..f_r, ν]`, invariants,
//!   the leading covariant polynomial `Λ(ν)` and canonical covariants.
//! - [`monodromy`]: crossing matrices for stars of p-th-root singularities,
//!   turn compositions and their characteristic polynomials.
//! - [`reftables`]: embedded exact reference tables of T- and γ-polynomials
//!   with structural verification.

pub mod rat;
pub mod unipoly;
pub mod multipoly;
pub mod bernoulli;
pub mod puiseux;
pub mod cyclo;
pub mod field;
pub mod linalg;
pub mod mpfloat;
pub mod sp;
pub mod singscan;
pub mod nir;
pub mod ode;
pub mod covariance;
pub mod monodromy;
pub mod reftables;

pub use rat::Rat;
pub use unipoly::UniPoly;
pub use multipoly::MultiPoly;
pub use puiseux::{Prefactor, PuiseuxSeries};
pub use cyclo::{CycloElem, CycloMatrix};


