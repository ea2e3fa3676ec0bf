//! Cyclotomic numbers of Gauss periods of type `(n, k)`.
//!
//! Two independent routes produce the value distributions `a(τ)`, `a_*(τ)`:
//!
//! * the S-map tally ([`build_tally`], [`tau_distribution`]), which only
//!   touches the `(k-1)(k-2)` admissible exponent pairs, and
//! * the coset sweep ([`brute_force_matrix`], [`distribution_from_matrix`]),
//!   which counts `t_ij = |(1 + K_i) ∩ K_j|` directly in `O(r)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ntheory::{element_of_order, primitive_root, Modulus};

/// The triple `(k, n, r = nk + 1)` with `r` prime and `n >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GaussParams {
    k: u64,
    n: u64,
    modulus: Modulus,
}

impl GaussParams {
    pub fn new(k: u64, n: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be positive".into()));
        }
        if n < 2 {
            return Err(Error::TrivialDegree(n));
        }
        let r = n
            .checked_mul(k)
            .and_then(|nk| nk.checked_add(1))
            .filter(|&r| r < 1 << 63)
            .ok_or_else(|| Error::InvalidArgument(format!("n * k + 1 overflows for k = {k}, n = {n}")))?;
        Ok(GaussParams { k, n, modulus: Modulus::prime(r)? })
    }

    /// Parameters for a prime `r ≡ 1 (mod k)`.
    pub fn from_prime(k: u64, r: u64) -> Result<Self> {
        if k == 0 || r < 2 || (r - 1) % k != 0 {
            return Err(Error::OrderDoesNotDivide { k, r });
        }
        Self::new(k, (r - 1) / k)
    }

    #[inline]
    pub fn k(&self) -> u64 {
        self.k
    }

    #[inline]
    pub fn n(&self) -> u64 {
        self.n
    }

    #[inline]
    pub fn r(&self) -> u64 {
        self.modulus.value()
    }

    #[inline]
    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    /// Index of the coset containing `-1`: `0` for even `k`, `n/2` for odd `k`.
    pub fn star_row(&self) -> u64 {
        if self.k % 2 == 0 {
            0
        } else {
            self.n / 2
        }
    }

    /// `1` on the star row, `0` elsewhere.
    pub fn delta(&self, i: u64) -> u64 {
        u64::from(i == self.star_row())
    }

    /// `|S_k| = (k-1)(k-2)`.
    pub fn pair_count(&self) -> u64 {
        if self.k < 3 {
            0
        } else {
            (self.k - 1) * (self.k - 2)
        }
    }
}

/// `a(τ)` and `a_*(τ)` for `0 <= τ <= k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TauDistribution {
    params: GaussParams,
    a: Vec<u64>,
    a_star: Vec<u64>,
}

impl TauDistribution {
    /// Builds a distribution from dense arrays and checks every invariant.
    pub fn from_parts(params: GaussParams, a: Vec<u64>, a_star: Vec<u64>) -> Result<Self> {
        let len = params.k as usize + 1;
        if a.len() != len || a_star.len() != len {
            return Err(Error::InvalidArgument(format!(
                "distribution arrays must have length k + 1 = {len}"
            )));
        }
        let dist = TauDistribution { params, a, a_star };
        dist.check_invariants()?;
        Ok(dist)
    }

    /// From sparse `τ -> count` maps; missing entries are zero.
    pub fn from_sparse(
        params: GaussParams,
        a: &BTreeMap<u64, u64>,
        a_star: &BTreeMap<u64, u64>,
    ) -> Result<Self> {
        let len = params.k as usize + 1;
        let dense = |m: &BTreeMap<u64, u64>| -> Result<Vec<u64>> {
            let mut v = vec![0; len];
            for (&t, &c) in m {
                let slot = v.get_mut(t as usize).ok_or_else(|| {
                    Error::InvalidArgument(format!("τ = {t} exceeds k = {}", params.k))
                })?;
                *slot = c;
            }
            Ok(v)
        };
        Self::from_parts(params, dense(a)?, dense(a_star)?)
    }

    pub fn params(&self) -> &GaussParams {
        &self.params
    }

    pub fn a(&self) -> &[u64] {
        &self.a
    }

    pub fn a_star(&self) -> &[u64] {
        &self.a_star
    }

    pub fn nonzero_a(&self) -> BTreeMap<u64, u64> {
        sparse(&self.a)
    }

    pub fn nonzero_a_star(&self) -> BTreeMap<u64, u64> {
        sparse(&self.a_star)
    }

    /// Largest `τ` with `a(τ) > 0`.
    pub fn max_tau(&self) -> u64 {
        self.a.iter().rposition(|&c| c > 0).unwrap_or(0) as u64
    }

    /// The four counting identities and `a_*(τ) <= a(τ)`.
    pub fn check_invariants(&self) -> Result<()> {
        let (k, n) = (self.params.k, self.params.n);
        let weighted = |v: &[u64]| v.iter().enumerate().map(|(t, &c)| t as u64 * c).sum::<u64>();
        let checks = [
            (self.a.iter().sum::<u64>() == n * n, "Σ a(τ) = n²"),
            (weighted(&self.a) == n * k - 1, "Σ τ·a(τ) = nk - 1"),
            (self.a_star.iter().sum::<u64>() == n, "Σ a*(τ) = n"),
            (weighted(&self.a_star) == k - 1, "Σ τ·a*(τ) = k - 1"),
            (self.a_star.iter().zip(&self.a).all(|(s, a)| s <= a), "a*(τ) <= a(τ)"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            None => Ok(()),
            Some((_, what)) => Err(Error::Invariant(format!(
                "{what} fails for k = {k}, n = {n}"
            ))),
        }
    }
}

fn sparse(v: &[u64]) -> BTreeMap<u64, u64> {
    v.iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(t, &c)| (t as u64, c))
        .collect()
}

/// `S(u, v) = -(1 - ω^v) / (ω^u - ω^v)` with precomputed powers of `ω`.
#[derive(Debug, Clone)]
pub struct SMap {
    k: u64,
    modulus: Modulus,
    powers: Vec<u64>,
}

impl SMap {
    pub fn new(k: u64, omega: u64, modulus: Modulus) -> Self {
        let mut powers = Vec::with_capacity(k as usize);
        let mut x = 1;
        for _ in 0..k {
            powers.push(x);
            x = modulus.mul(x, omega);
        }
        SMap { k, modulus, powers }
    }

    pub fn omega_power(&self, e: u64) -> u64 {
        self.powers[(e % self.k) as usize]
    }

    pub fn eval(&self, u: u64, v: u64) -> Result<u64> {
        let (u, v) = (u % self.k, v % self.k);
        if u == 0 || v == 0 || u == v {
            return Err(Error::NotAdmissiblePair { k: self.k, u, v });
        }
        let m = &self.modulus;
        let (wu, wv) = (self.powers[u as usize], self.powers[v as usize]);
        let num = m.sub(1, wv);
        let den = m.inv(m.sub(wu, wv))?;
        Ok(m.neg(m.mul(num, den)))
    }
}

/// One evaluation of the S-map; `omega` must have order `k` modulo `r`.
pub fn s_map(k: u64, u: u64, v: u64, omega: u64, m: &Modulus) -> Result<u64> {
    if k < 3 {
        return Err(Error::NotAdmissiblePair { k, u, v });
    }
    SMap::new(k, omega, *m).eval(u, v)
}

/// Iterator over `S_k = {(u, v) : u, v ∈ 1..k, u != v}`.
pub fn admissible_pairs(k: u64) -> impl Iterator<Item = (u64, u64)> {
    (1..k).flat_map(move |u| (1..k).filter(move |&v| v != u).map(move |v| (u, v)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TallyEntry {
    pub multiplicity: u64,
    /// Whether the value lies in `(-1)^k ⟨ω⟩`, the coset of `-1`.
    pub star: bool,
}

/// Multiplicities of the values of the S-map over `S_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tally {
    params: GaussParams,
    omega: u64,
    entries: BTreeMap<u64, TallyEntry>,
}

impl Tally {
    pub fn params(&self) -> &GaussParams {
        &self.params
    }

    pub fn omega(&self) -> u64 {
        self.omega
    }

    pub fn entries(&self) -> &BTreeMap<u64, TallyEntry> {
        &self.entries
    }

    pub fn total(&self) -> u64 {
        self.entries.values().map(|e| e.multiplicity).sum()
    }

    pub fn max_multiplicity(&self) -> u64 {
        self.entries.values().map(|e| e.multiplicity).max().unwrap_or(0)
    }

    /// `a(τ) = #{x : mult(x) = τ - 1} / τ` for `τ >= 2`, then the
    /// counting identities fill in `τ = 1` and `τ = 0`.
    pub fn distribution(&self) -> Result<TauDistribution> {
        let (k, n) = (self.params.k, self.params.n);
        let len = k as usize + 1;
        let mut by_mult = vec![0u64; len];
        let mut by_mult_star = vec![0u64; len];
        for (&x, e) in &self.entries {
            let slot = e.multiplicity as usize;
            if slot >= len - 1 {
                return Err(Error::Invariant(format!(
                    "value {x} has multiplicity {} >= k = {k}",
                    e.multiplicity
                )));
            }
            by_mult[slot] += 1;
            if e.star {
                by_mult_star[slot] += 1;
            }
        }
        let mut a = vec![0u64; len];
        let mut a_star = vec![0u64; len];
        for tau in 2..len {
            for (src, dst) in [(&by_mult, &mut a), (&by_mult_star, &mut a_star)] {
                let count = src[tau - 1];
                if count % tau as u64 != 0 {
                    return Err(Error::Invariant(format!(
                        "{count} values of multiplicity {} not divisible by τ = {tau}",
                        tau - 1
                    )));
                }
                dst[tau] = count / tau as u64;
            }
        }
        let fill = |v: &mut [u64], total: u64, weight: u64| -> Result<()> {
            let heavy: u64 = v.iter().enumerate().skip(2).map(|(t, &c)| t as u64 * c).sum();
            v[1] = weight.checked_sub(heavy).ok_or_else(|| {
                Error::Invariant(format!("Σ τ·a(τ) exceeds {weight} for k = {k}, n = {n}"))
            })?;
            let count: u64 = v.iter().skip(1).sum();
            v[0] = total.checked_sub(count).ok_or_else(|| {
                Error::Invariant(format!("Σ a(τ) exceeds {total} for k = {k}, n = {n}"))
            })?;
            Ok(())
        };
        fill(&mut a, n * n, n * k - 1)?;
        fill(&mut a_star, n, k - 1)?;
        TauDistribution::from_parts(self.params, a, a_star)
    }
}

/// Tally of the S-map with `ω` the smallest element of order `k`.
pub fn build_tally(params: &GaussParams) -> Result<Tally> {
    let omega = element_of_order(params.k, &params.modulus)?;
    build_tally_with_omega(params, omega)
}

/// Tally for an arbitrary `ω` of order `k`.
pub fn build_tally_with_omega(params: &GaussParams, omega: u64) -> Result<Tally> {
    let (k, m) = (params.k, params.modulus);
    if m.pow(omega, k) != 1 {
        return Err(Error::InvalidArgument(format!("{omega}^{k} != 1 mod {}", m.value())));
    }
    let smap = SMap::new(k, omega, m);
    let mut star_set: Vec<u64> = (0..k)
        .map(|e| {
            let w = smap.omega_power(e);
            if k % 2 == 0 {
                w
            } else {
                m.neg(w)
            }
        })
        .collect();
    star_set.sort_unstable();

    let mut entries: BTreeMap<u64, TallyEntry> = BTreeMap::new();
    for (u, v) in admissible_pairs(k) {
        let x = smap.eval(u, v)?;
        entries
            .entry(x)
            .or_insert_with(|| TallyEntry { multiplicity: 0, star: star_set.binary_search(&x).is_ok() })
            .multiplicity += 1;
    }
    if entries.contains_key(&(m.value() - 1)) {
        return Err(Error::Invariant(format!(
            "S-map hit -1 for k = {k}, r = {}",
            m.value()
        )));
    }
    Ok(Tally { params: *params, omega, entries })
}

/// `a(τ)`, `a_*(τ)` through the S-map tally.
pub fn tau_distribution(params: &GaussParams) -> Result<TauDistribution> {
    build_tally(params)?.distribution()
}

/// The S-map is injective iff every cyclotomic number is at most 2.
pub fn is_s_injective(params: &GaussParams) -> Result<bool> {
    Ok(build_tally(params)?.max_multiplicity() <= 1)
}

/// Coset labels: `g^j K` gets index `j mod n` for a fixed primitive root `g`.
#[derive(Debug, Clone)]
pub struct CosetTable {
    n: u64,
    index: Vec<u32>,
}

impl CosetTable {
    /// Index of the coset of a nonzero residue.
    #[inline]
    pub fn coset_of(&self, x: u64) -> u32 {
        let idx = self.index[x as usize];
        debug_assert!(idx != u32::MAX, "0 has no coset");
        idx
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn modulus_value(&self) -> u64 {
        self.index.len() as u64
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.index.iter().enumerate().skip(1).map(|(x, &i)| (x as u64, i))
    }
}

/// One discrete-log sweep over powers of the smallest primitive root.
pub fn coset_index_table(params: &GaussParams) -> Result<CosetTable> {
    let m = params.modulus;
    let r = m.value();
    let n = params.n;
    let index_width = u32::try_from(n).map_err(|_| {
        Error::InvalidArgument(format!("n = {n} too large for a coset table"))
    })?;
    let g = primitive_root(&m)?;
    let mut index = vec![u32::MAX; r as usize];
    let mut x = 1u64;
    let mut label = 0u32;
    for _ in 0..r - 1 {
        index[x as usize] = label;
        label += 1;
        if label == index_width {
            label = 0;
        }
        x = m.mul(x, g);
    }
    Ok(CosetTable { n, index })
}

/// Nonzero cyclotomic numbers `t_ij`, keyed by `(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseCosetMatrix {
    params: GaussParams,
    entries: BTreeMap<(u32, u32), u64>,
}

impl SparseCosetMatrix {
    pub fn params(&self) -> &GaussParams {
        &self.params
    }

    pub fn entries(&self) -> &BTreeMap<(u32, u32), u64> {
        &self.entries
    }

    pub fn get(&self, i: u32, j: u32) -> u64 {
        self.entries.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn max_entry(&self) -> u64 {
        self.entries.values().copied().max().unwrap_or(0)
    }

    pub fn row_sums(&self) -> Vec<u64> {
        let mut sums = vec![0; self.params.n as usize];
        for (&(i, _), &t) in &self.entries {
            sums[i as usize] += t;
        }
        sums
    }

    /// Row sums equal `k - δ_i` and at most `r - 2` entries are stored.
    pub fn check_invariants(&self) -> Result<()> {
        let p = &self.params;
        for (i, s) in self.row_sums().into_iter().enumerate() {
            if s != p.k - p.delta(i as u64) {
                return Err(Error::Invariant(format!("row {i} sums to {s}")));
            }
        }
        if self.entries.len() as u64 > p.r() - 2 {
            return Err(Error::Invariant("too many stored cyclotomic numbers".into()));
        }
        Ok(())
    }
}

/// `t_ij` by sweeping `x ∈ Z_r^* \ {-1}` and counting `(coset(x), coset(1 + x))`.
pub fn brute_force_matrix(params: &GaussParams) -> Result<SparseCosetMatrix> {
    let table = coset_index_table(params)?;
    Ok(matrix_from_table(params, &table))
}

pub fn matrix_from_table(params: &GaussParams, table: &CosetTable) -> SparseCosetMatrix {
    let r = params.r();
    let mut entries = BTreeMap::new();
    for x in 1..r - 1 {
        *entries.entry((table.coset_of(x), table.coset_of(x + 1))).or_insert(0) += 1;
    }
    SparseCosetMatrix { params: *params, entries }
}

/// `a(τ)` counts matrix entries equal to `τ`; `a_*` reads the star row.
pub fn distribution_from_matrix(matrix: &SparseCosetMatrix) -> Result<TauDistribution> {
    let p = matrix.params;
    if p.k % 2 == 1 && p.n % 2 == 1 {
        return Err(Error::Invariant("odd k with odd n has no row n/2".into()));
    }
    let len = p.k as usize + 1;
    let star = p.star_row() as u32;
    let mut a = vec![0u64; len];
    let mut a_star = vec![0u64; len];
    for (&(i, _), &t) in &matrix.entries {
        let slot = a.get_mut(t as usize).ok_or_else(|| {
            Error::Invariant(format!("cyclotomic number {t} exceeds k = {}", p.k))
        })?;
        *slot += 1;
        if i == star {
            a_star[t as usize] += 1;
        }
    }
    a[0] = p.n * p.n - matrix.entries.len() as u64;
    a_star[0] = p.n - a_star.iter().skip(1).sum::<u64>();
    TauDistribution::from_parts(p, a, a_star)
}
