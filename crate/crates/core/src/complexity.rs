//! Normal basis complexity `C(n, k; q)`.
//!
//! [`complexity`] always goes through the value distribution of the
//! cyclotomic numbers. The closed forms ([`closed_form_complexity`],
//! [`two_coset_distribution`]) are exposed separately so they can be checked
//! against it.

use std::fmt;

use num_integer::Integer;

use crate::cyclostats::{is_s_injective, tau_distribution, GaussParams, SparseCosetMatrix, TauDistribution};
use crate::error::{Error, Result};
use crate::ntheory::{is_prime, is_prime_power, multiplicative_order};

/// A field size `q = p^s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CharSpec {
    q: u64,
    p: u64,
    s: u32,
}

impl CharSpec {
    pub fn new(q: u64) -> Result<Self> {
        match is_prime_power(q)? {
            Some((p, s)) => Ok(CharSpec { q, p, s }),
            None => Err(Error::NotPrimePower(q)),
        }
    }

    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(CharSpec { q: p, p, s: 1 })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> u32 {
        self.s
    }
}

/// Whether the Gauss periods of type `(n, k)` form a normal basis over `F_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EligibilityReport {
    /// Order of `q` modulo `r`.
    pub e: u64,
    /// `nk / e`.
    pub quotient: u64,
    /// `gcd(nk / e, n)`.
    pub gcd_value: u64,
    pub eligible: bool,
}

/// `⟨q, K⟩ = Z_r^*` iff `gcd(nk/e, n) = 1`.
///
/// When this fails for `q = p` it fails for every power of `p` as well:
/// `e(p^s)` divides `e(p)`, so `nk/e(p)` divides `nk/e(p^s)`.
pub fn check_eligibility(params: &GaussParams, char_spec: &CharSpec) -> Result<EligibilityReport> {
    if char_spec.p == params.r() {
        return Err(Error::CharacteristicIsModulus { p: char_spec.p, r: params.r() });
    }
    let e = multiplicative_order(char_spec.q, params.modulus())?;
    let nk = params.n() * params.k();
    let quotient = nk / e;
    let gcd_value = quotient.gcd(&params.n());
    Ok(EligibilityReport { e, quotient, gcd_value, eligible: gcd_value == 1 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComplexityPath {
    /// Value distribution from the S-map tally.
    Generic,
    /// Closed form valid when every `t_ij <= 2`.
    ClosedForm,
    /// Closed-form distribution for `n = 2`.
    TwoCoset,
}

impl ComplexityPath {
    pub fn as_str(&self) -> &'static str {
        match self {
            ComplexityPath::Generic => "generic",
            ComplexityPath::ClosedForm => "closed-form",
            ComplexityPath::TwoCoset => "n2-closed-form",
        }
    }
}

impl fmt::Display for ComplexityPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityResult {
    pub params: GaussParams,
    pub char_spec: CharSpec,
    pub value: u64,
    pub path: ComplexityPath,
    pub eligibility: EligibilityReport,
}

/// `n² - Σ_{τ ≡ 0 (p)} (a(τ) - a_*(τ)) - Σ_{τ ≡ k (p)} a_*(τ)` over `0 <= τ <= k`.
pub fn complexity_from_distribution(dist: &TauDistribution, p: u64) -> u64 {
    let k = dist.params().k();
    let n = dist.params().n();
    let mut value = n * n;
    for (tau, (&a, &s)) in dist.a().iter().zip(dist.a_star()).enumerate() {
        let tau = tau as u64;
        if tau % p == 0 {
            value -= a - s;
        }
        if tau % p == k % p {
            value -= s;
        }
    }
    value
}

/// Number of `(i, j)` with `t_ij - k·δ_i ≢ 0 (mod p)`, read off the coset matrix.
pub fn direct_complexity(matrix: &SparseCosetMatrix, p: u64) -> u64 {
    let params = matrix.params();
    let (k, n) = (params.k(), params.n());
    let star = params.star_row() as u32;
    let mut count = 0;
    let mut stored_in_star = 0;
    for (&(i, _), &t) in matrix.entries() {
        let shifted = if i == star {
            stored_in_star += 1;
            (t as i128 - k as i128).rem_euclid(p as i128)
        } else {
            (t % p) as i128
        };
        if shifted != 0 {
            count += 1;
        }
    }
    // unstored star-row entries are 0 - k
    if k % p != 0 {
        count += n - stored_in_star;
    }
    count
}

fn check_bounds(params: &GaussParams, value: u64) -> Result<()> {
    let n = params.n();
    if value < 2 * n - 1 || value > n * n {
        return Err(Error::Invariant(format!(
            "complexity {value} outside [2n - 1, n²] for k = {}, n = {n}",
            params.k()
        )));
    }
    Ok(())
}

/// `C(n, k; q)` through the value distribution of the cyclotomic numbers.
pub fn complexity(params: &GaussParams, char_spec: &CharSpec) -> Result<ComplexityResult> {
    complexity_via(params, char_spec, ComplexityPath::Generic)
}

/// `C(n, k; q)` along an explicit path. The closed-form paths refuse inputs
/// outside their hypotheses.
pub fn complexity_via(
    params: &GaussParams,
    char_spec: &CharSpec,
    path: ComplexityPath,
) -> Result<ComplexityResult> {
    let eligibility = check_eligibility(params, char_spec)?;
    if !eligibility.eligible {
        return Err(Error::NotEligible { q: char_spec.q, report: eligibility });
    }
    let p = char_spec.p;
    let value = match path {
        ComplexityPath::Generic => complexity_from_distribution(&tau_distribution(params)?, p),
        ComplexityPath::ClosedForm => {
            if !is_s_injective(params)? {
                return Err(Error::ClosedFormUnavailable(format!(
                    "r = {} is exceptional for k = {}",
                    params.r(),
                    params.k()
                )));
            }
            let c = closed_form_complexity(params.k(), params.n(), p);
            u64::try_from(c).map_err(|_| Error::Invariant(format!("closed form gave {c}")))?
        }
        ComplexityPath::TwoCoset => {
            if params.n() != 2 {
                return Err(Error::ClosedFormUnavailable(format!("n = {} is not 2", params.n())));
            }
            complexity_from_distribution(&two_coset_distribution(params.k())?, p)
        }
    };
    check_bounds(params, value)?;
    Ok(ComplexityResult { params: *params, char_spec: *char_spec, value, path, eligibility })
}

/// Closed form for `C(n, k; q)` when every cyclotomic number is at most 2.
///
/// The caller is responsible for that hypothesis; for exceptional `r` the
/// value is generally wrong.
pub fn closed_form_complexity(k: u64, n: u64, p: u64) -> i64 {
    let (k, n) = (k as i64, n as i64);
    let km = if p > 2 { Some(k % p as i64) } else { None };
    // twice the value, to keep the half-integers exact
    let twice = if k % 2 == 0 {
        match km {
            None => 2 * (n * k - k * k + 3 * k - 3),
            Some(0) => 2 * n * k - k * k + 3 * k - 4,
            Some(1) => 2 * n * (k + 1) - k * k + 2 * k - 6,
            Some(2) => 2 * n * (k + 1) - k * k + k - 2,
            Some(_) => 2 * n * (k + 1) - k * k + 2 * k - 4,
        }
    } else {
        match km {
            None => 2 * (n * (k + 1) - k * k + k - 1),
            Some(0) => 2 * n * k - k * k + 3 * k - 4,
            Some(1) => 2 * n * (k + 1) - k * k - k,
            Some(_) => 2 * n * (k + 1) - k * k + k - 2,
        }
    };
    debug_assert!(twice % 2 == 0);
    twice / 2
}

/// Closed-form `a(τ)`, `a_*(τ)` for `n = 2`, i.e. `r = 2k + 1` prime.
pub fn two_coset_distribution(k: u64) -> Result<TauDistribution> {
    let params = GaussParams::new(k, 2)?;
    let len = k as usize + 1;
    let mut a = vec![0u64; len];
    let mut a_star = vec![0u64; len];
    let h = (k / 2) as usize;
    if k % 2 == 0 {
        a[h - 1] = 1;
        a[h] = 3;
        a_star[h - 1] = 1;
        a_star[h] = 1;
    } else {
        a[h] = 3;
        a[h + 1] = 1;
        a_star[h] = 2;
    }
    TauDistribution::from_parts(params, a, a_star)
}

/// A characteristic class in a complexity profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CharClass {
    Prime(u64),
    /// Every prime strictly above the bound.
    Above(u64),
}

impl fmt::Display for CharClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharClass::Prime(p) => write!(f, "p={p}"),
            CharClass::Above(b) => write!(f, "p>{b}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileValue {
    Complexity(u64),
    Ineligible(EligibilityReport),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProfileEntry {
    pub class: CharClass,
    pub value: ProfileValue,
}

/// `C` for every prime `p <= k` and for the class of primes above `k`.
///
/// For `p > k` the only `τ ≡ 0` is `τ = 0` and the only `τ ≡ k` is `τ = k`,
/// so the value is constant on that class. It is labelled by the largest
/// prime `<= k`. Eligibility within that class depends on the particular
/// `q` and is not reported.
pub fn complexity_profile(params: &GaussParams) -> Result<Vec<ProfileEntry>> {
    let dist = tau_distribution(params)?;
    let k = params.k();
    let mut out = Vec::new();
    for p in (2..=k).filter(|&p| is_prime(p)) {
        let report = check_eligibility(params, &CharSpec::prime(p)?)?;
        let value = if report.eligible {
            let c = complexity_from_distribution(&dist, p);
            check_bounds(params, c)?;
            ProfileValue::Complexity(c)
        } else {
            ProfileValue::Ineligible(report)
        };
        out.push(ProfileEntry { class: CharClass::Prime(p), value });
    }
    let bound = (2..=k).rev().find(|&p| is_prime(p)).unwrap_or(1);
    let above = params.n() * params.n() - (dist.a()[0] - dist.a_star()[0]) - dist.a_star()[k as usize];
    out.push(ProfileEntry { class: CharClass::Above(bound), value: ProfileValue::Complexity(above) });
    Ok(out)
}
