//! Dense univariate polynomials over the integers.
//!
//! Two resultant routes are provided: [`resultant`] evaluates the Sylvester
//! determinant for arbitrary inputs, while [`resultant_monic`] computes the
//! norm of `f` modulo a monic polynomial as the determinant of the
//! multiplication-by-`f` matrix. The exceptional prime search uses the second;
//! the first checks it.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ntheory::{divisors, Modulus};

/// Integer polynomial; `coeffs[i]` is the coefficient of `X^i`.
///
/// Normalized so the last coefficient is nonzero; the zero polynomial has no
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    /// `c · X^d`.
    pub fn monomial(c: i64, d: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); d + 1];
        coeffs[d] = BigInt::from(c);
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    /// Value at an integer point.
    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Division with remainder by a monic divisor; exact over the integers.
    pub fn div_rem_monic(&self, divisor: &IntPolynomial) -> Result<(IntPolynomial, IntPolynomial)> {
        if divisor.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if !divisor.is_monic() {
            return Err(Error::InvalidArgument("divisor must be monic".into()));
        }
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((IntPolynomial::zero(), self.clone()));
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = std::mem::take(&mut rem[i]);
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs[..dd].iter().enumerate() {
                rem[i - dd + j] -= &c * dc;
            }
            quot[i - dd] = c;
        }
        rem.truncate(dd);
        Ok((IntPolynomial::new(quot), IntPolynomial::new(rem)))
    }

    /// `self / divisor` when the division leaves no remainder.
    pub fn exact_div_monic(&self, divisor: &IntPolynomial) -> Result<IntPolynomial> {
        let (q, r) = self.div_rem_monic(divisor)?;
        if !r.is_zero() {
            return Err(Error::InvalidArgument(format!("{divisor} does not divide {self}")));
        }
        Ok(q)
    }

    pub fn rem_monic(&self, divisor: &IntPolynomial) -> Result<IntPolynomial> {
        Ok(self.div_rem_monic(divisor)?.1)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let abs = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            match (i, abs.is_one()) {
                (0, _) => write!(f, "{abs}")?,
                (1, true) => write!(f, "X")?,
                (1, false) => write!(f, "{abs}X")?,
                (_, true) => write!(f, "X^{i}")?,
                (_, false) => write!(f, "{abs}X^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;

    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).cloned().unwrap_or_default();
                match rhs.coeffs.get(i) {
                    Some(b) => a + b,
                    None => a,
                }
            })
            .collect();
        IntPolynomial::new(coeffs)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;

    fn neg(self) -> IntPolynomial {
        IntPolynomial { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;

    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        self + &(-rhs)
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;

    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        IntPolynomial::new(coeffs)
    }
}

fn x_pow_minus_one(k: usize) -> IntPolynomial {
    let mut coeffs = vec![BigInt::zero(); k + 1];
    coeffs[0] = BigInt::from(-1);
    coeffs[k] = BigInt::one();
    IntPolynomial::new(coeffs)
}

/// The `k`-th cyclotomic polynomial, `(X^k - 1) / Π_{d | k, d < k} Φ_d`.
///
/// Results are cached per process.
pub fn cyclotomic(k: u64) -> IntPolynomial {
    assert!(k >= 1, "cyclotomic polynomial index must be positive");
    static CACHE: OnceLock<Mutex<HashMap<u64, IntPolynomial>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().unwrap().get(&k) {
        return p.clone();
    }
    let mut acc = x_pow_minus_one(k as usize);
    for d in divisors(k) {
        if d < k {
            acc = acc
                .exact_div_monic(&cyclotomic(d))
                .expect("cyclotomic factors divide X^k - 1");
        }
    }
    cache.lock().unwrap().insert(k, acc.clone());
    acc
}

fn check_pair(k: u64, (u, v): (u64, u64)) -> Result<()> {
    if u == 0 || v == 0 || u >= k || v >= k || u == v {
        return Err(Error::NotAdmissiblePair { k, u, v });
    }
    Ok(())
}

/// `(1 - X^u)(1 - X^v2) - (1 - X^u2)(1 - X^v)` with exponents in `1..k`.
///
/// Its reduction mod `r` vanishes at `ω` exactly when the S-map values of
/// `(u, v)` and `(u2, v2)` coincide.
pub fn collision_poly(k: u64, first: (u64, u64), second: (u64, u64)) -> Result<IntPolynomial> {
    check_pair(k, first)?;
    check_pair(k, second)?;
    let ((u, v), (u2, v2)) = (first, second);
    let one_minus = |e: u64| &IntPolynomial::one() - &IntPolynomial::monomial(1, e as usize);
    Ok(&(&one_minus(u) * &one_minus(v2)) - &(&one_minus(u2) * &one_minus(v)))
}

/// Determinant by Bareiss fraction-free elimination.
pub fn determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = !sign;
        }
        let (pivot_rows, rest) = m.split_at_mut(k + 1);
        let pivot_row = &pivot_rows[k];
        for row in rest.iter_mut() {
            for j in k + 1..n {
                let v = &pivot_row[k] * &row[j] - &row[k] * &pivot_row[j];
                row[j] = v.div_floor(&prev);
            }
            row[k] = BigInt::zero();
        }
        prev = pivot_row[k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign {
        -det
    } else {
        det
    }
}

/// Exact resultant as the Sylvester determinant.
///
/// Convention: `Res(f, g) = lc(f)^deg g · Π g(α)` over the roots `α` of `f`,
/// so `Res(X - a, X - b) = a - b`.
pub fn resultant(f: &IntPolynomial, g: &IntPolynomial) -> Result<BigInt> {
    let (Some(m), Some(n)) = (f.degree(), g.degree()) else {
        return Err(Error::ZeroPolynomial);
    };
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for shift in 0..n {
        let mut row = vec![BigInt::zero(); size];
        for (i, c) in f.coeffs.iter().rev().enumerate() {
            row[shift + i] = c.clone();
        }
        rows.push(row);
    }
    for shift in 0..m {
        let mut row = vec![BigInt::zero(); size];
        for (i, c) in g.coeffs.iter().rev().enumerate() {
            row[shift + i] = c.clone();
        }
        rows.push(row);
    }
    Ok(determinant(rows))
}

/// `Res(modulus, f) = Π f(α)` over the roots of a monic `modulus`.
///
/// Computed as the determinant of multiplication by `f` on `Z[X]/(modulus)`,
/// a `deg(modulus)`-square matrix. Equals `resultant(modulus, f)`.
pub fn resultant_monic(f: &IntPolynomial, modulus: &IntPolynomial) -> Result<BigInt> {
    if f.is_zero() || modulus.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !modulus.is_monic() {
        return Err(Error::InvalidArgument("modulus must be monic".into()));
    }
    let d = modulus.coeffs.len() - 1;
    let mut column = f.rem_monic(modulus)?;
    let x = IntPolynomial::monomial(1, 1);
    // row j = X^j · f mod modulus; the transpose has the same determinant
    let mut matrix = Vec::with_capacity(d);
    for j in 0..d {
        let mut row = column.coeffs.clone();
        row.resize(d, BigInt::zero());
        matrix.push(row);
        if j + 1 < d {
            column = (&column * &x).rem_monic(modulus)?;
        }
    }
    Ok(determinant(matrix))
}

/// `f(x) mod r` by Horner's rule on reduced coefficients.
pub fn eval_mod(f: &IntPolynomial, x: u64, m: &Modulus) -> u64 {
    let r = BigInt::from(m.value());
    let x = m.reduce(x);
    f.coeffs.iter().rev().fold(0u64, |acc, c| {
        let c = c.mod_floor(&r).to_u64().expect("reduced coefficient fits");
        m.add(m.mul(acc, x), c)
    })
}
