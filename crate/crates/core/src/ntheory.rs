//! Word-sized modular arithmetic, primality, orders and integer factorization.
//!
//! All moduli fit in a `u64`; products are widened to `u128` before reduction.
//! Arbitrary precision only shows up in [`factorize`], whose inputs are
//! resultants.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Trial division bound used by [`factorize`] before falling back to Pollard rho.
pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

/// A modulus `r >= 2` together with a certified primality flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Modulus {
    r: u64,
    prime: bool,
}

impl Modulus {
    /// Any modulus `r >= 2`; the prime flag is set by a deterministic test.
    pub fn new(r: u64) -> Result<Self> {
        if r < 2 {
            return Err(Error::InvalidArgument(format!("modulus must be at least 2, got {r}")));
        }
        Ok(Modulus { r, prime: is_prime(r) })
    }

    /// A prime modulus; errors if `r` is not prime.
    pub fn prime(r: u64) -> Result<Self> {
        if !is_prime(r) {
            return Err(Error::NotPrime(r));
        }
        Ok(Modulus { r, prime: true })
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.r
    }

    #[inline]
    pub fn is_prime(&self) -> bool {
        self.prime
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        x % self.r
    }

    #[inline]
    pub fn reduce_signed(&self, x: i64) -> u64 {
        x.rem_euclid(self.r as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.r as u128) as u64
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let (a, b) = (a % self.r, b % self.r);
        if a >= b {
            a - b
        } else {
            self.r - (b - a)
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        self.sub(0, a)
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.r)
    }

    pub fn pow(&self, base: u64, exp: u64) -> u64 {
        pow_mod(base, exp, self.r)
    }

    /// Inverse by the extended Euclidean algorithm.
    pub fn inv(&self, x: u64) -> Result<u64> {
        let x = x % self.r;
        let (g, s, _) = ext_gcd(x as i128, self.r as i128);
        if g != 1 {
            return Err(Error::NotInvertible { x, r: self.r });
        }
        Ok(s.rem_euclid(self.r as i128) as u64)
    }
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    acc
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    (old_r, old_s, old_t)
}

/// `base^exp mod r`.
pub fn mod_pow(base: u64, exp: u64, m: &Modulus) -> u64 {
    m.pow(base, exp)
}

/// Deterministic Miller–Rabin; the first twelve prime bases are exact below 3.3·10^24.
pub fn is_prime(m: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if m < 2 {
        return false;
    }
    for &p in &BASES {
        if m % p == 0 {
            return m == p;
        }
    }
    let s = (m - 1).trailing_zeros();
    let d = (m - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, m);
        if x == 1 || x == m - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, m);
            if x == m - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes up to [`TRIAL_DIVISION_BOUND`], sieved once.
pub fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_DIVISION_BOUND as usize;
        let mut composite = vec![false; n + 1];
        let mut primes = Vec::new();
        for i in 2..=n {
            if !composite[i] {
                primes.push(i as u64);
                let mut j = i * i;
                while j <= n {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        primes
    })
}

/// Splits an odd composite `n` with Brent's variant of Pollard rho.
fn rho_split_u64(n: u64) -> u64 {
    debug_assert!(n > 3 && !is_prime(n));
    if n % 2 == 0 {
        return 2;
    }
    const BATCH: u64 = 128;
    for c in 1u64.. {
        let step = |x: u64| ((x as u128 * x as u128 + c as u128) % n as u128) as u64;
        let (mut y, mut r, mut q, mut g) = (2u64, 1u64, 1u64, 1u64);
        let (mut x, mut ys) = (0u64, 0u64);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = step(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = step(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = step(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("rho exhausted all increments")
}

fn push_factor(out: &mut BTreeMap<u64, u32>, p: u64, e: u32) {
    *out.entry(p).or_insert(0) += e;
}

/// Factors a cofactor with no prime divisor below the trial bound, or a prime.
fn rho_factor_u64(n: u64, out: &mut BTreeMap<u64, u32>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        push_factor(out, n, 1);
        return;
    }
    let d = rho_split_u64(n);
    rho_factor_u64(d, out);
    rho_factor_u64(n / d, out);
}

fn factor_u64_into(n: u64, out: &mut BTreeMap<u64, u32>) {
    let mut m = n;
    if m > 1 && is_prime(m) {
        push_factor(out, m, 1);
        return;
    }
    for &p in small_primes() {
        if m == 1 || p * p > m {
            break;
        }
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            push_factor(out, p, e);
            if m > 1 && is_prime(m) {
                push_factor(out, m, 1);
                return;
            }
        }
    }
    rho_factor_u64(m, out);
}

/// Full factorization of a word-sized integer `n >= 1`, primes ascending.
pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    let mut out = BTreeMap::new();
    if n > 1 {
        factor_u64_into(n, &mut out);
    }
    out.into_iter().collect()
}

/// Signed factorization of a nonzero integer into word-sized primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub value: BigInt,
    pub sign: i8,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// `sign · Π p^e`.
    pub fn reconstruct(&self) -> BigInt {
        let mut acc = BigInt::from(self.sign);
        for &(p, e) in &self.factors {
            acc *= BigInt::from(p).pow(e);
        }
        acc
    }
}

// Bases for the multi-word Miller-Rabin screen. Only used to decide whether a
// cofactor above 2^64 is worth splitting further; a prime that large is an
// error either way.
fn probable_prime_big(n: &BigUint) -> bool {
    const BASES: [u32; 20] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71];
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    'witness: for &a in &BASES {
        let a = BigUint::from(a);
        if &a >= n {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn rho_split_big(n: &BigUint) -> BigUint {
    let two = BigUint::from(2u32);
    if (n % &two).is_zero() {
        return two;
    }
    let mut c = BigUint::one();
    loop {
        let step = |x: &BigUint| (x * x + &c) % n;
        let mut x = two.clone();
        let mut y = two.clone();
        let mut g = BigUint::one();
        while g.is_one() {
            x = step(&x);
            y = step(&step(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            g = diff.gcd(n);
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

fn factor_big_into(n: BigUint, out: &mut BTreeMap<u64, u32>) -> Result<()> {
    if let Some(small) = n.to_u64() {
        factor_u64_into(small, out);
        return Ok(());
    }
    if probable_prime_big(&n) {
        return Err(Error::FactorTooLarge(n.to_string()));
    }
    let d = rho_split_big(&n);
    let rest = &n / &d;
    factor_big_into(d, out)?;
    factor_big_into(rest, out)
}

/// Complete factorization of a nonzero integer.
///
/// Small primes are stripped by trial division up to [`TRIAL_DIVISION_BOUND`];
/// the remaining cofactor is split by Pollard rho and every prime is
/// certified by [`is_prime`]. Prime factors above `u64::MAX` are reported as
/// [`Error::FactorTooLarge`].
pub fn factorize(v: &BigInt) -> Result<Factorization> {
    if v.is_zero() {
        return Err(Error::FactorZero);
    }
    let sign = if v.sign() == Sign::Minus { -1 } else { 1 };
    let mut m = v.magnitude().clone();
    let mut out = BTreeMap::new();
    if m.to_u64().is_none() {
        for &p in small_primes() {
            if m.to_u64().is_some() {
                break;
            }
            let mut e = 0;
            loop {
                let (q, rem) = m.div_rem(&BigUint::from(p));
                if !rem.is_zero() {
                    break;
                }
                m = q;
                e += 1;
            }
            if e > 0 {
                push_factor(&mut out, p, e);
            }
        }
    }
    factor_big_into(m, &mut out)?;
    let factors: Vec<(u64, u32)> = out.into_iter().collect();
    debug_assert!(factors.iter().all(|&(p, _)| is_prime(p)));
    Ok(Factorization { value: v.clone(), sign, factors })
}

/// Order of `x` in `Z_r^*` for prime `r`, found by stripping prime factors of `r - 1`.
pub fn multiplicative_order(x: u64, m: &Modulus) -> Result<u64> {
    if !m.is_prime() {
        return Err(Error::NotPrime(m.value()));
    }
    let x = m.reduce(x);
    if x == 0 {
        return Err(Error::NotInvertible { x, r: m.value() });
    }
    let mut order = m.value() - 1;
    for (p, e) in factor_u64(order) {
        for _ in 0..e {
            if m.pow(x, order / p) == 1 {
                order /= p;
            } else {
                break;
            }
        }
    }
    Ok(order)
}

/// Smallest primitive root of a prime modulus.
pub fn primitive_root(m: &Modulus) -> Result<u64> {
    if !m.is_prime() {
        return Err(Error::NotPrime(m.value()));
    }
    let r = m.value();
    if r == 2 {
        return Ok(1);
    }
    let primes: Vec<u64> = factor_u64(r - 1).into_iter().map(|(p, _)| p).collect();
    (2..r)
        .find(|&g| primes.iter().all(|&p| m.pow(g, (r - 1) / p) != 1))
        .ok_or_else(|| Error::Invariant(format!("no primitive root modulo {r}")))
}

/// The smallest residue of multiplicative order exactly `k` (`1` when `k = 1`).
///
/// Every element of order `k` lies in the order-`k` subgroup, so only its
/// generators `h^j`, `gcd(j, k) = 1`, are examined.
pub fn element_of_order(k: u64, m: &Modulus) -> Result<u64> {
    if !m.is_prime() {
        return Err(Error::NotPrime(m.value()));
    }
    let r = m.value();
    if k == 0 || (r - 1) % k != 0 {
        return Err(Error::OrderDoesNotDivide { k, r });
    }
    if k == 1 {
        return Ok(1);
    }
    let g = primitive_root(m)?;
    let h = m.pow(g, (r - 1) / k);
    let mut best = u64::MAX;
    let mut x = 1u64;
    for j in 0..k {
        if j.gcd(&k) == 1 {
            best = best.min(x);
        }
        x = m.mul(x, h);
    }
    Ok(best)
}

/// `Some((p, s))` when `q = p^s` for a prime `p`.
pub fn is_prime_power(q: u64) -> Result<Option<(u64, u32)>> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("prime power must be at least 2, got {q}")));
    }
    let f = factor_u64(q);
    Ok(match f.as_slice() {
        [(p, s)] => Some((*p, *s)),
        _ => None,
    })
}

/// Positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factor_u64(n) {
        let len = divs.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    factor_u64(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trial_is_prime(m: u64) -> bool {
        m >= 2 && (2..).take_while(|d| d * d <= m).all(|d| m % d != 0)
    }

    #[test]
    fn is_prime_examples() {
        assert!(is_prime(19));
        assert!(is_prime(23321));
        assert!(!is_prime(1));
        assert!(!is_prime(0));
        assert!(is_prime(174763));
        // strong pseudoprime to bases 2..=11
        assert!(!is_prime(2152302898747));
        assert!(is_prime(18446744073709551557));
    }

    #[test]
    fn is_prime_matches_trial_division_to_one_million() {
        let sieve = small_primes();
        let mut next = 0;
        for m in 0..=TRIAL_DIVISION_BOUND {
            let expected = next < sieve.len() && sieve[next] == m;
            if expected {
                next += 1;
            }
            assert_eq!(is_prime(m), expected, "m = {m}");
        }
        // the sieve itself against naive trial division on a prefix
        for m in 0..20_000 {
            assert_eq!(is_prime(m), trial_is_prime(m));
        }
    }

    #[test]
    fn mod_pow_examples() {
        let m43 = Modulus::prime(43).unwrap();
        assert_eq!(mod_pow(2, 14, &m43), 1);
        let m11 = Modulus::prime(11).unwrap();
        assert_eq!(mod_pow(3, 5, &m11), 1);
        for x in 1..11 {
            assert_eq!(mod_pow(x, 0, &m11), 1);
        }
    }

    #[test]
    fn order_examples() {
        let m43 = Modulus::prime(43).unwrap();
        assert_eq!(multiplicative_order(2, &m43).unwrap(), 14);
        assert_eq!(multiplicative_order(1, &m43).unwrap(), 1);
        assert_eq!(multiplicative_order(42, &m43).unwrap(), 2);
        assert!(matches!(multiplicative_order(43, &m43), Err(Error::NotInvertible { .. })));
        let m31 = Modulus::prime(31).unwrap();
        assert_eq!(multiplicative_order(7, &m31).unwrap(), 15);
    }

    #[test]
    fn element_of_order_examples() {
        let m19 = Modulus::prime(19).unwrap();
        assert_eq!(element_of_order(6, &m19).unwrap(), 8);
        assert_eq!(element_of_order(1, &m19).unwrap(), 1);
        assert!(matches!(element_of_order(5, &m19), Err(Error::OrderDoesNotDivide { .. })));
        let m11 = Modulus::prime(11).unwrap();
        assert_eq!(element_of_order(5, &m11).unwrap(), 3);
    }

    #[test]
    fn factorize_examples() {
        let f = factorize(&BigInt::from(4)).unwrap();
        assert_eq!(f.factors, vec![(2, 2)]);
        assert_eq!(f.sign, 1);
        let f = factorize(&BigInt::from(-19)).unwrap();
        assert_eq!((f.sign, f.factors.clone()), (-1, vec![(19, 1)]));
        let f = factorize(&BigInt::from(6u64.pow(8))).unwrap();
        assert_eq!(f.factors, vec![(2, 8), (3, 8)]);
        assert_eq!(factorize(&BigInt::zero()), Err(Error::FactorZero));
        let f = factorize(&BigInt::one()).unwrap();
        assert!(f.factors.is_empty());
    }

    #[test]
    fn factorize_needs_rho() {
        // two primes above the trial bound
        let (p, q) = (1_000_003u64, 999_999_000_001u64);
        assert!(is_prime(p) && is_prime(q));
        let v = BigInt::from(p) * BigInt::from(q);
        let f = factorize(&v).unwrap();
        assert_eq!(f.factors, vec![(p, 1), (q, 1)]);
        // beyond u64: 2^64 + 1 = 274177 * 67280421310721
        let v = (BigInt::one() << 64) + 1;
        let f = factorize(&v).unwrap();
        assert_eq!(f.factors, vec![(274177, 1), (67280421310721, 1)]);
        // composite above 2^64 with a 30-bit factor
        let m61 = (1u64 << 61) - 1;
        let big = BigInt::from(1_000_000_007u64) * BigInt::from(m61);
        let f = factorize(&big).unwrap();
        assert_eq!(f.factors, vec![(1_000_000_007, 1), (m61, 1)]);
    }

    #[test]
    fn factor_too_large() {
        // 2^89 - 1 is a Mersenne prime
        let v = (BigInt::one() << 89) - 1;
        assert!(matches!(factorize(&v), Err(Error::FactorTooLarge(_))));
    }

    #[test]
    fn prime_power_examples() {
        assert_eq!(is_prime_power(8).unwrap(), Some((2, 3)));
        assert_eq!(is_prime_power(49).unwrap(), Some((7, 2)));
        assert_eq!(is_prime_power(12).unwrap(), None);
        assert_eq!(is_prime_power(2).unwrap(), Some((2, 1)));
        assert!(is_prime_power(1).is_err());
    }

    #[test]
    fn divisors_and_phi() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(euler_phi(20), 8);
        assert_eq!(euler_phi(19), 18);
        assert_eq!(euler_phi(1), 1);
    }

    #[test]
    fn inverse() {
        let m = Modulus::prime(11).unwrap();
        for x in 1..11 {
            assert_eq!(m.mul(x, m.inv(x).unwrap()), 1);
        }
        assert!(m.inv(0).is_err());
        assert!(Modulus::new(1).is_err());
        assert!(Modulus::prime(25).is_err());
    }

    fn primes_below(limit: u64) -> Vec<u64> {
        (2..limit).filter(|&m| is_prime(m)).collect()
    }

    #[test]
    fn orders_are_minimal_for_small_primes() {
        for r in primes_below(2_000) {
            let m = Modulus::prime(r).unwrap();
            for x in 1..r {
                let e = multiplicative_order(x, &m).unwrap();
                assert_eq!(m.pow(x, e), 1);
                for d in divisors(e) {
                    if d < e {
                        assert_ne!(m.pow(x, d), 1, "x = {x}, r = {r}");
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn order_invariant_up_to_ten_thousand(idx in 0usize..1229, x_seed in any::<u64>()) {
            let primes = primes_below(10_000);
            let r = primes[idx % primes.len()];
            let m = Modulus::prime(r).unwrap();
            let x = 1 + x_seed % (r - 1);
            let e = multiplicative_order(x, &m).unwrap();
            prop_assert_eq!(m.pow(x, e), 1);
            for d in divisors(e).into_iter().filter(|&d| d < e) {
                prop_assert_ne!(m.pow(x, d), 1);
            }
        }

        #[test]
        fn element_of_order_is_smallest_witness(idx in 0usize..1229, k_seed in any::<u64>()) {
            let primes = primes_below(10_000);
            let r = primes[idx % primes.len()];
            let m = Modulus::prime(r).unwrap();
            let ks = divisors(r - 1);
            let k = ks[(k_seed % ks.len() as u64) as usize];
            let w = element_of_order(k, &m).unwrap();
            prop_assert_eq!(multiplicative_order(w, &m).unwrap(), k);
            if k > 1 {
                let scan = (2..r).find(|&x| multiplicative_order(x, &m).unwrap() == k).unwrap();
                prop_assert_eq!(w, scan);
            }
        }

        #[test]
        fn factorize_reconstructs(v in any::<i64>().prop_filter("nonzero", |v| *v != 0), shift in 0u32..40) {
            let big = BigInt::from(v) << shift;
            let f = factorize(&big).unwrap();
            prop_assert_eq!(f.reconstruct(), big);
            let mut last = 0;
            for &(p, e) in &f.factors {
                prop_assert!(is_prime(p));
                prop_assert!(p > last && e > 0);
                last = p;
            }
        }

        #[test]
        fn factorize_products_of_large_primes(a in 1u64..1_000_000_000, b in 1u64..1_000_000_000) {
            let big = BigInt::from(a) * BigInt::from(b) * BigInt::from(u64::MAX - 58);
            let f = factorize(&big).unwrap();
            prop_assert_eq!(f.reconstruct(), big);
            prop_assert!(f.primes().all(is_prime));
        }
    }
}
