//! Exceptional primes: primes `r ≡ 1 (mod k)`, `r > k + 1`, for which the
//! S-map is not injective.
//!
//! Every such `r` divides `Res(f, Φ_k)` for some collision polynomial `f`, and
//! conversely. Resultants are taken pair by pair over the reduced pair set and
//! factored; every candidate prime is then confirmed directly. The absolute
//! value of each resultant is at most `6^φ(k)` because a collision polynomial
//! has six `±1` terms; this bound is a property of the construction used here.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};
use rayon::prelude::*;

use crate::cyclostats::{admissible_pairs, is_s_injective, GaussParams};
use crate::error::{Error, Result};
use crate::intpoly::{collision_poly, cyclotomic, resultant_monic, IntPolynomial};
use crate::ntheory::{euler_phi, factorize, is_prime, Factorization};

/// Two admissible exponent pairs `((u, v), (u', v'))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CollisionPair {
    pub first: (u64, u64),
    pub second: (u64, u64),
}

impl CollisionPair {
    pub fn polynomial(&self, k: u64) -> Result<IntPolynomial> {
        collision_poly(k, self.first, self.second)
    }
}

/// Pairs with `v > u`, `u' > u`, `v' >= u` and `v != v'`.
///
/// Up to sign, every collision polynomial with `u = u'` or `v = v'` excluded
/// has a resultant with no prime divisor above `k`, and the remaining ones are
/// reached from this set by the symmetries `f_{a,b} = -f_{b,a}` and
/// `f_{(u,v),(u',v')} = -f_{(v,u),(v',u')}`.
pub fn reduced_pairs(k: u64) -> Vec<CollisionPair> {
    let mut out = Vec::new();
    for (u, v) in admissible_pairs(k) {
        if v <= u {
            continue;
        }
        for (u2, v2) in admissible_pairs(k) {
            if u2 > u && v2 >= u && v != v2 {
                out.push(CollisionPair { first: (u, v), second: (u2, v2) });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionalEntry {
    pub n: u64,
    pub r: u64,
    /// First reduced pair whose resultant `r` divides.
    pub witness: CollisionPair,
    pub resultant: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionalRecord {
    pub k: u64,
    /// Sorted by `n`.
    pub entries: Vec<ExceptionalEntry>,
    pub pairs_examined: usize,
    pub distinct_resultants: usize,
}

impl ExceptionalRecord {
    pub fn ns(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.n).collect()
    }

    pub fn primes(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.r).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `P_k` from the prime divisors of the reduced-pair resultants.
///
/// Collision polynomials are reduced modulo `Φ_k` first; pairs that reduce to
/// the same polynomial share one resultant and one factorization. The
/// per-polynomial work runs on the rayon pool.
pub fn exceptional_primes(k: u64) -> Result<ExceptionalRecord> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let phi = cyclotomic(k);
    let pairs = reduced_pairs(k);

    let mut index: HashMap<IntPolynomial, usize> = HashMap::new();
    let mut unique: Vec<(IntPolynomial, CollisionPair)> = Vec::new();
    for pair in &pairs {
        let reduced = pair.polynomial(k)?.rem_monic(&phi)?;
        if reduced.is_zero() {
            return Err(Error::Invariant(format!(
                "collision polynomial of {pair:?} vanishes modulo Φ_{k}"
            )));
        }
        index.entry(reduced.clone()).or_insert_with(|| {
            unique.push((reduced, *pair));
            unique.len() - 1
        });
    }

    let factored: Vec<(BigInt, Factorization)> = unique
        .par_iter()
        .map(|(g, pair)| {
            let res = resultant_monic(g, &phi)?;
            if res.is_zero() {
                return Err(Error::Invariant(format!("zero resultant for {pair:?}, k = {k}")));
            }
            let f = factorize(&res)?;
            Ok((res, f))
        })
        .collect::<Result<_>>()?;

    let mut candidates: BTreeMap<u64, (CollisionPair, BigInt)> = BTreeMap::new();
    for ((_, pair), (res, fact)) in unique.iter().zip(&factored) {
        for r in fact.primes() {
            if r > k + 1 && r % k == 1 {
                candidates.entry(r).or_insert_with(|| (*pair, res.clone()));
            }
        }
    }

    let mut entries = Vec::with_capacity(candidates.len());
    for (r, (witness, resultant)) in candidates {
        let params = GaussParams::from_prime(k, r)?;
        if is_s_injective(&params)? {
            return Err(Error::Invariant(format!(
                "resultant candidate r = {r} has an injective S-map for k = {k}"
            )));
        }
        entries.push(ExceptionalEntry { n: params.n(), r, witness, resultant });
    }
    Ok(ExceptionalRecord {
        k,
        entries,
        pairs_examined: pairs.len(),
        distinct_resultants: unique.len(),
    })
}

/// `(n, r)` with `r = nk + 1 <= r_max` prime and a non-injective S-map,
/// found by testing every candidate directly.
pub fn direct_exceptional_sweep(k: u64, r_max: u64) -> Result<Vec<(u64, u64)>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let n_max = r_max.saturating_sub(1) / k;
    let found: Vec<Option<(u64, u64)>> = (2..=n_max)
        .into_par_iter()
        .map(|n| {
            let r = n * k + 1;
            if !is_prime(r) {
                return Ok(None);
            }
            let params = GaussParams::new(k, n)?;
            Ok((!is_s_injective(&params)?).then_some((n, r)))
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

fn cyclotomic_at_one(m: u64) -> BigInt {
    cyclotomic(m).eval(&BigInt::one())
}

/// `|Π_{l ∈ Z_k^×} (ζ^{al} - 1)| = Φ_m(1)^{φ(k)/φ(m)}` with `m = k / gcd(k, a)`.
fn unit_orbit_norm(k: u64, a: i64) -> BigInt {
    let g = (a.rem_euclid(k as i64) as u64).gcd(&k);
    let m = k / g;
    let exp = euler_phi(k) / euler_phi(m);
    Pow::pow(cyclotomic_at_one(m).abs(), exp as u32)
}

/// Checks the pairs dropped from the reduced set: every distinct pair with
/// `u = u'` or `v = v'` has a nonzero resultant with `Φ_k` whose prime
/// divisors are all at most `k`, and whose magnitude factors as a product
/// of two unit-orbit norms.
pub fn degenerate_pair_check(k: u64) -> Result<bool> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!("k = {k} has no admissible pairs")));
    }
    let phi = cyclotomic(k);
    let pairs: Vec<(u64, u64)> = admissible_pairs(k).collect();
    for &(u, v) in &pairs {
        for &(u2, v2) in &pairs {
            if (u, v) == (u2, v2) || (u != u2 && v != v2) {
                continue;
            }
            let f = collision_poly(k, (u, v), (u2, v2))?;
            let res = resultant_monic(&f, &phi)?;
            if res.is_zero() {
                return Ok(false);
            }
            // v = v': f = -X^u (X^{u'-u} - 1)(X^v - 1); u = u' is the mirror image
            let expected = if v == v2 {
                unit_orbit_norm(k, u2 as i64 - u as i64) * unit_orbit_norm(k, v as i64)
            } else {
                unit_orbit_norm(k, v2 as i64 - v as i64) * unit_orbit_norm(k, u as i64)
            };
            if res.abs() != expected {
                return Ok(false);
            }
            if factorize(&res)?.primes().any(|p| p > k) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
