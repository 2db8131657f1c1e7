//! Quadratic Hilbert symbols over `Q`, local invariants of quaternion classes,
//! and local solvability of the multinorm equation
//! `(x₁² − a x₂²)(y₁² − b y₂²)(z₁² − ab z₂²) = c`.
//!
//! Cubic residue symbols are out of scope; only quadratic classes are handled.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest magnitude accepted where a full factorization is required.
pub const FACTOR_CAP: u128 = 1_000_000_000_000;

/// A place of `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PlaceOfQ {
    Real,
    Prime(u64),
}

impl PlaceOfQ {
    /// Checked constructor for a finite place.
    pub fn prime(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(PlaceOfQ::Prime(p))
        } else {
            Err(Error::Invalid(format!("{p} is not prime")))
        }
    }
}

impl fmt::Display for PlaceOfQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceOfQ::Real => write!(f, "inf"),
            PlaceOfQ::Prime(p) => write!(f, "{p}"),
        }
    }
}

/// The quaternion class `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuaternionClass {
    pub a: Rational64,
    pub b: Rational64,
}

impl QuaternionClass {
    pub fn new(a: Rational64, b: Rational64) -> Result<Self> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::ZeroArgument);
        }
        Ok(QuaternionClass { a, b })
    }
}

/// An element of `½Z/Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocalInvariant {
    pub half: bool,
}

impl LocalInvariant {
    pub const ZERO: LocalInvariant = LocalInvariant { half: false };
    pub const HALF: LocalInvariant = LocalInvariant { half: true };
}

impl fmt::Display for LocalInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.half { "1/2" } else { "0" })
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Prime factors (with exponents) of `|n|`, for `0 < |n| ≤ 10¹²`.
pub fn factorize(n: i128) -> Result<Vec<(u64, u32)>> {
    if n == 0 {
        return Err(Error::ZeroArgument);
    }
    let m = n.unsigned_abs();
    if m > FACTOR_CAP {
        return Err(Error::UnsupportedMagnitude(format!("|{n}| exceeds {FACTOR_CAP}")));
    }
    let mut m = m as u64;
    let mut out = Vec::new();
    let mut p = 2u64;
    while p <= 1_000_000 && p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        if !is_prime(m) {
            return Err(Error::UnsupportedMagnitude(format!("cofactor {m} left unfactored")));
        }
        out.push((m, 1));
    }
    Ok(out)
}

/// `(−1)^k`-style sign encoded as ±1.
fn legendre(u: i128, p: u64) -> i8 {
    let r = u.rem_euclid(p as i128) as u64;
    match pow_mod(r, (p - 1) / 2, p) {
        1 => 1,
        0 => 0,
        _ => -1,
    }
}

/// `n = p^v · u` with `p ∤ u`.
fn split_valuation(mut n: i128, p: u64) -> (u32, i128) {
    let mut v = 0;
    let p = p as i128;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    (v, n)
}

/// A rational `r` replaced by the integer `num·den`, in the same square class.
fn square_class_int(r: Rational64) -> Result<i128> {
    if r.is_zero() {
        return Err(Error::ZeroArgument);
    }
    Ok(*r.numer() as i128 * *r.denom() as i128)
}

fn symbol_int(a: i128, b: i128, v: PlaceOfQ) -> i8 {
    match v {
        PlaceOfQ::Real => {
            if a < 0 && b < 0 {
                -1
            } else {
                1
            }
        }
        PlaceOfQ::Prime(2) => {
            let (alpha, u) = split_valuation(a, 2);
            let (beta, w) = split_valuation(b, 2);
            let eps = |x: i128| ((x.rem_euclid(4) - 1) / 2) as u32 & 1;
            let omega = |x: i128| {
                let r = x.rem_euclid(8);
                ((r * r - 1) / 8) as u32 & 1
            };
            let e = eps(u) * eps(w) + alpha * omega(w) + beta * omega(u);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        PlaceOfQ::Prime(p) => {
            let (alpha, u) = split_valuation(a, p);
            let (beta, w) = split_valuation(b, p);
            let mut s: i8 = 1;
            if (alpha * beta) % 2 == 1 && p % 4 == 3 {
                s = -s;
            }
            if beta % 2 == 1 {
                s *= legendre(u, p);
            }
            if alpha % 2 == 1 {
                s *= legendre(w, p);
            }
            s
        }
    }
}

/// Hilbert symbol `(a, b)_v ∈ {+1, −1}`.
pub fn hilbert_symbol(a: Rational64, b: Rational64, v: PlaceOfQ) -> Result<i8> {
    if let PlaceOfQ::Prime(p) = v {
        if !is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
    }
    Ok(symbol_int(square_class_int(a)?, square_class_int(b)?, v))
}

/// `inv_v(a, b)`: 0 when the symbol is +1, ½ otherwise.
pub fn local_invariant(q: &QuaternionClass, v: PlaceOfQ) -> Result<LocalInvariant> {
    Ok(LocalInvariant { half: hilbert_symbol(q.a, q.b, v)? == -1 })
}

/// Places where `(a, b)` can ramify: ∞, 2, and the primes dividing `a` or `b`.
fn support(values: &[i128]) -> Result<BTreeSet<PlaceOfQ>> {
    let mut out = BTreeSet::new();
    out.insert(PlaceOfQ::Real);
    out.insert(PlaceOfQ::Prime(2));
    for &x in values {
        for (p, _) in factorize(x)? {
            out.insert(PlaceOfQ::Prime(p));
        }
    }
    Ok(out)
}

/// Local invariants at every place where the class can be nonzero; the sum is
/// checked to vanish.
pub fn invariant_profile(q: &QuaternionClass) -> Result<BTreeMap<PlaceOfQ, LocalInvariant>> {
    let a = square_class_int(q.a)?;
    let b = square_class_int(q.b)?;
    let places = support(&[a, b])?;
    let profile: BTreeMap<PlaceOfQ, LocalInvariant> = places
        .into_iter()
        .map(|v| (v, LocalInvariant { half: symbol_int(a, b, v) == -1 }))
        .collect();
    let halves = profile.values().filter(|x| x.half).count();
    if halves % 2 != 0 {
        return Err(Error::ReciprocityViolation(format!(
            "({}, {}) has an odd number of ramified places",
            q.a, q.b
        )));
    }
    Ok(profile)
}

/// Square class of a nonzero integer at `v`, as a bit vector (product = xor).
fn square_class_bits(x: i128, v: PlaceOfQ) -> u8 {
    match v {
        PlaceOfQ::Real => (x < 0) as u8,
        PlaceOfQ::Prime(2) => {
            let (alpha, u) = split_valuation(x, 2);
            let r = u.rem_euclid(8);
            let e1 = (r % 4 == 3) as u8;
            let e2 = (r == 3 || r == 5) as u8;
            (alpha % 2) as u8 | e1 << 1 | e2 << 2
        }
        PlaceOfQ::Prime(p) => {
            let (alpha, u) = split_valuation(x, p);
            (alpha % 2) as u8 | ((legendre(u, p) == -1) as u8) << 1
        }
    }
}

/// Representatives of `Q_v^* / (Q_v^*)²`.
pub fn square_class_reps(v: PlaceOfQ) -> Vec<i128> {
    match v {
        PlaceOfQ::Real => vec![1, -1],
        PlaceOfQ::Prime(2) => vec![1, -1, 2, -2, 5, -5, 10, -10],
        PlaceOfQ::Prime(p) => {
            let u = (2..p as i128).find(|&u| legendre(u, p) == -1).unwrap_or(2);
            vec![1, u, p as i128, u * p as i128]
        }
    }
}

/// Whether `c` is a local value of the multinorm form at `v`: its square class
/// must lie in `N_a · N_b · N_ab`, with `N_x = {r : (x, r)_v = 1}`.
pub fn multinorm_local_solvable(a: Rational64, b: Rational64, c: Rational64, v: PlaceOfQ) -> Result<bool> {
    let a = square_class_int(a)?;
    let b = square_class_int(b)?;
    let c = square_class_int(c)?;
    if let PlaceOfQ::Prime(p) = v {
        if !is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
    }
    let reps = square_class_reps(v);
    let norms = |x: i128| -> BTreeSet<u8> {
        reps.iter()
            .filter(|&&r| symbol_int(x, r, v) == 1)
            .map(|&r| square_class_bits(r, v))
            .collect()
    };
    let (na, nb, nab) = (norms(a), norms(b), norms(a * b));
    let target = square_class_bits(c, v);
    Ok(na.iter().any(|&x| nb.iter().any(|&y| nab.contains(&(x ^ y ^ target)))))
}

/// Whether `x` is a square in `Q_v`.
pub fn is_local_square(x: Rational64, v: PlaceOfQ) -> Result<bool> {
    Ok(square_class_bits(square_class_int(x)?, v) == 0)
}

/// One fiber `t = λ` of the scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberReport {
    pub lambda: Rational64,
    /// `P(λ)`, or `None` when `λ` is a root and the fiber was skipped.
    pub value: Option<Rational64>,
    pub places: Vec<(PlaceOfQ, bool)>,
    pub everywhere_locally_solvable: bool,
    /// Invariant profile of `(p_i(λ), b)` for each factor with `p_i(λ) ≠ 0`.
    pub profiles: Vec<BTreeMap<PlaceOfQ, LocalInvariant>>,
}

fn eval_poly(coeffs: &[i64], x: Rational64) -> BigRational {
    // coefficients in increasing degree
    let x = BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()));
    let mut acc = BigRational::zero();
    for &c in coeffs.iter().rev() {
        acc = acc * &x + BigRational::from_integer(BigInt::from(c));
    }
    acc
}

fn to_small(r: &BigRational) -> Result<Rational64> {
    let n = r.numer().to_i64();
    let d = r.denom().to_i64();
    match (n, d) {
        (Some(n), Some(d)) if (n as i128 * d as i128).unsigned_abs() <= FACTOR_CAP => Ok(Rational64::new(n, d)),
        _ => Err(Error::UnsupportedMagnitude(format!("{r} is too large to factor"))),
    }
}

/// Local solvability of every fiber `t = λ` of the multinorm equation with
/// `P = ∏ p_i^{e_i}` (coefficients in increasing degree).
pub fn fiber_scan(
    a: Rational64,
    b: Rational64,
    factors: &[(Vec<i64>, u32)],
    lambdas: &[Rational64],
) -> Result<Vec<FiberReport>> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroArgument);
    }
    lambdas
        .par_iter()
        .map(|&lambda| {
            let vals: Vec<BigRational> = factors.iter().map(|(p, _)| eval_poly(p, lambda)).collect();
            if vals.iter().any(|v| v.is_zero()) {
                return Ok(FiberReport {
                    lambda,
                    value: None,
                    places: vec![],
                    everywhere_locally_solvable: false,
                    profiles: vec![],
                });
            }
            let mut total = BigRational::from_integer(BigInt::from(1));
            for (v, (_, e)) in vals.iter().zip(factors) {
                for _ in 0..*e {
                    total *= v;
                }
            }
            let c = to_small(&total)?;
            let places = support(&[square_class_int(a)?, square_class_int(b)?, square_class_int(c)?])?;
            let places: Vec<(PlaceOfQ, bool)> = places
                .into_iter()
                .map(|v| multinorm_local_solvable(a, b, c, v).map(|ok| (v, ok)))
                .collect::<Result<_>>()?;
            let ok = places.iter().all(|(_, s)| *s);
            let profiles = vals
                .iter()
                .map(|v| invariant_profile(&QuaternionClass::new(to_small(v)?, b)?))
                .collect::<Result<_>>()?;
            Ok(FiberReport { lambda, value: Some(c), places, everywhere_locally_solvable: ok, profiles })
        })
        .collect()
}

/// Exact `|x|` for reports.
pub fn abs_rational(x: Rational64) -> Rational64 {
    x.abs()
}
