//! Exact base-field scalars and truncated-polynomial Artin coefficient rings.
//!
//! The coefficient ring is always a chain ring `k[t]/(t^n)` over an exact
//! field (rationals or a prime field). `n = 1` recovers the field itself.
//! The generator `t` carries a grading weight so that deformed relations
//! such as `s*x -> x*s + t*x` can be weight-homogeneous.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use std::fmt;

use crate::error::{NcError, Result};

/// An exact base field: the rationals or a prime field `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Field {
    Rationals,
    Prime(u64),
}

impl Field {
    pub fn validate(&self) -> Result<()> {
        match self {
            Field::Rationals => Ok(()),
            Field::Prime(p) => {
                if *p < 2 || !is_prime(*p) {
                    Err(NcError::Input(format!("{p} is not prime")))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rat(BigRational::zero()),
            Field::Prime(p) => Scalar::Fp { val: 0, p: *p },
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rat(BigRational::one()),
            Field::Prime(p) => Scalar::Fp { val: 1 % p, p: *p },
        }
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rat(BigRational::from_integer(BigInt::from(v))),
            Field::Prime(p) => {
                let m = v.rem_euclid(*p as i64) as u64;
                Scalar::Fp { val: m, p: *p }
            }
        }
    }

    /// Parses a scalar literal: an integer or a fraction `a/b`.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        let bad = || NcError::Input(format!("bad scalar literal `{s}`"));
        if let Some((num, den)) = s.split_once('/') {
            let n: i128 = num.trim().parse().map_err(|_| bad())?;
            let d: i128 = den.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(NcError::Input(format!("zero denominator in `{s}`")));
            }
            match self {
                Field::Rationals => Ok(Scalar::Rat(BigRational::new(
                    BigInt::from(n),
                    BigInt::from(d),
                ))),
                Field::Prime(_) => {
                    let a = self.from_i64(n as i64);
                    let b = self.from_i64(d as i64);
                    a.div(&b)
                }
            }
        } else {
            let n: i64 = s.parse().map_err(|_| bad())?;
            Ok(self.from_i64(n))
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of a base field. Arithmetic is exact; the prime is carried
/// inside `Fp` values so they are self-contained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scalar {
    Rat(BigRational),
    Fp { val: u64, p: u64 },
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Fp { val, .. } => *val == 0,
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Fp { val: a, p }, Scalar::Fp { val: b, .. }) => Scalar::Fp {
                val: (a + b) % p,
                p: *p,
            },
            _ => panic!("mixed field scalars"),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Fp { val, p } => Scalar::Fp {
                val: (p - val) % p,
                p: *p,
            },
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Fp { val: a, p }, Scalar::Fp { val: b, .. }) => Scalar::Fp {
                val: mulmod(*a, *b, *p),
                p: *p,
            },
            _ => panic!("mixed field scalars"),
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(NcError::Input("division by zero".into()));
        }
        match self {
            Scalar::Rat(a) => Ok(Scalar::Rat(a.recip())),
            Scalar::Fp { val, p } => Ok(Scalar::Fp {
                val: powmod(*val, p - 2, *p),
                p: *p,
            }),
        }
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        Ok(self.mul(&other.inv()?))
    }
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    acc
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Fp { val, .. } => write!(f, "{val}"),
        }
    }
}

/// The chain Artin local ring `R = k[t]/(t^n)`. Elements are polynomials
/// in `t` of degree below `order`; `t` carries the grading weight
/// `t_weight`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ArtinRing {
    pub base: Field,
    pub order: u32,
    pub t_weight: i64,
}

impl ArtinRing {
    pub fn new(base: Field, order: u32, t_weight: i64) -> Result<Self> {
        if order == 0 {
            return Err(NcError::Input("Artin ring order must be positive".into()));
        }
        if t_weight < 0 {
            return Err(NcError::Input("weight of t must be nonnegative".into()));
        }
        base.validate()?;
        Ok(ArtinRing {
            base,
            order,
            t_weight,
        })
    }

    /// The level-`m` truncation of the same tower, `k[t]/(t^m)`.
    pub fn truncated(&self, order: u32) -> ArtinRing {
        ArtinRing {
            base: self.base,
            order,
            t_weight: self.t_weight,
        }
    }

    pub fn zero(&self) -> ArtinElem {
        ArtinElem {
            ring: *self,
            coeffs: vec![self.base.zero(); self.order as usize],
        }
    }

    pub fn one(&self) -> ArtinElem {
        let mut e = self.zero();
        e.coeffs[0] = self.base.one();
        e
    }

    pub fn from_scalar(&self, s: Scalar) -> ArtinElem {
        let mut e = self.zero();
        e.coeffs[0] = s;
        e
    }

    /// `c * t^j`, zero when `j >= order`.
    pub fn t_term(&self, c: Scalar, j: u32) -> ArtinElem {
        let mut e = self.zero();
        if j < self.order {
            e.coeffs[j as usize] = c;
        }
        e
    }
}

/// An element of `k[t]/(t^n)`: coefficient `coeffs[j]` multiplies `t^j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArtinElem {
    pub ring: ArtinRing,
    pub coeffs: Vec<Scalar>,
}

impl ArtinElem {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &ArtinElem) -> ArtinElem {
        assert_eq!(self.ring, other.ring, "coefficient ring mismatch");
        ArtinElem {
            ring: self.ring,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> ArtinElem {
        ArtinElem {
            ring: self.ring,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &ArtinElem) -> ArtinElem {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ArtinElem) -> ArtinElem {
        assert_eq!(self.ring, other.ring, "coefficient ring mismatch");
        let n = self.ring.order as usize;
        let mut out = self.ring.zero();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= n || b.is_zero() {
                    continue;
                }
                out.coeffs[i + j] = out.coeffs[i + j].add(&a.mul(b));
            }
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> ArtinElem {
        ArtinElem {
            ring: self.ring,
            coeffs: self.coeffs.iter().map(|c| c.mul(s)).collect(),
        }
    }

    /// Multiplication by `t^j`.
    pub fn mul_t_pow(&self, j: u32) -> ArtinElem {
        let n = self.ring.order as usize;
        let mut out = self.ring.zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i + (j as usize) < n {
                out.coeffs[i + j as usize] = c.clone();
            }
        }
        out
    }
}

/// Truncation `R' -> R` along a chain of Artin rings: coefficients of
/// `t^j` for `j >= target.order` are dropped. A ring homomorphism.
pub fn reduce_scalar(x: &ArtinElem, target: &ArtinRing) -> Result<ArtinElem> {
    if target.order > x.ring.order {
        return Err(NcError::Input(format!(
            "cannot reduce from order {} to larger order {}",
            x.ring.order, target.order
        )));
    }
    if target.base != x.ring.base || target.t_weight != x.ring.t_weight {
        return Err(NcError::Input("incompatible Artin towers".into()));
    }
    Ok(ArtinElem {
        ring: *target,
        coeffs: x.coeffs[..target.order as usize].to_vec(),
    })
}

/// The coefficient-preserving section of the truncation `R' -> R`.
/// `reduce_scalar(canonical_lift(x)) = x` always holds.
pub fn canonical_lift(x: &ArtinElem, target: &ArtinRing) -> Result<ArtinElem> {
    if target.order < x.ring.order {
        return Err(NcError::Input(format!(
            "cannot lift from order {} to smaller order {}",
            x.ring.order, target.order
        )));
    }
    if target.base != x.ring.base || target.t_weight != x.ring.t_weight {
        return Err(NcError::Input("incompatible Artin towers".into()));
    }
    let mut coeffs = x.coeffs.clone();
    coeffs.resize(target.order as usize, target.base.zero());
    Ok(ArtinElem {
        ring: *target,
        coeffs,
    })
}

/// Decides whether a nilpotent `t`-action on a finite-dimensional `k`-space
/// makes it a free `k[t]/(t^n)`-module, and reports its rank when so.
///
/// Freeness over the chain ring is equivalent to the kernel-dimension
/// pattern `dim ker(t^j) = j * (dim / n)` for `1 <= j <= n`.
pub fn flat_rank_pattern(action: &crate::linalg::Mat, n: u32) -> Result<(bool, Option<usize>)> {
    let dim = action.rows();
    if action.cols() != dim {
        return Err(NcError::Input("t-action matrix must be square".into()));
    }
    // nilpotency of order <= n
    let mut pw = action.clone();
    for _ in 1..n {
        pw = pw.mul(action);
    }
    if !pw.is_zero() {
        return Err(NcError::Input(
            "t-action is not nilpotent of the declared order; corrupted module data".into(),
        ));
    }
    if dim % (n as usize) != 0 {
        return Ok((false, None));
    }
    let rank = dim / n as usize;
    let mut pw = crate::linalg::Mat::identity(action.field(), dim);
    for j in 1..=n {
        pw = pw.mul(action);
        let ker = dim - pw.rank();
        if ker != (j as usize) * rank {
            return Ok((false, None));
        }
    }
    Ok((true, Some(rank)))
}

impl fmt::Display for ArtinElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let p = match j {
                0 => format!("{c}"),
                1 => format!("{c}*t"),
                _ => format!("{c}*t^{j}"),
            };
            parts.push(p);
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}
