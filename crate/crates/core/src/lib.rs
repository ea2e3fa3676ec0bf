//! Multiplication-table complexity of Gauss-period normal bases.
//!
//! For a prime `r = nk + 1` and a prime power `q` of characteristic `p`, the
//! Gauss period of type `(n, k)` generates a normal basis of `F_{q^n}` over
//! `F_q` when `gcd(nk / e, n) = 1`, `e` being the order of `q` modulo `r`.
//! The number of nonzero entries in its multiplication table, `C(n, k; q)`,
//! depends on `q` only through `p` and is determined by the cyclotomic-number
//! distributions `a(τ)` and `a_*(τ)` computed in [`cyclostats`].
//!
//! ```
//! use gauss_core::{complexity, CharSpec, GaussParams};
//!
//! let params = GaussParams::new(6, 3).unwrap();
//! let c = complexity(&params, &CharSpec::new(3).unwrap()).unwrap();
//! assert_eq!(c.value, 7);
//! ```

pub mod complexity;
pub mod cyclostats;
pub mod error;
pub mod exceptional;
pub mod intpoly;
pub mod ntheory;

pub use complexity::{
    check_eligibility, closed_form_complexity, complexity, complexity_from_distribution,
    complexity_profile, complexity_via, direct_complexity, two_coset_distribution, CharClass,
    CharSpec, ComplexityPath, ComplexityResult, EligibilityReport, ProfileEntry, ProfileValue,
};
pub use cyclostats::{
    brute_force_matrix, build_tally, is_s_injective, tau_distribution, GaussParams,
    SparseCosetMatrix, TauDistribution,
};
pub use error::{Error, Result};
pub use exceptional::{
    direct_exceptional_sweep, exceptional_primes, CollisionPair, ExceptionalEntry,
    ExceptionalRecord,
};
pub use intpoly::{cyclotomic, resultant, IntPolynomial};
pub use ntheory::Modulus;
