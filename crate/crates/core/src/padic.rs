//! Fixed-precision p-adic numbers with honest precision tracking.
//!
//! A nonzero value is `p^v * u` with `u` a unit known modulo `p^K` (relative
//! precision `K`, absolute precision `v + K`). A value indistinguishable from
//! zero is kept as "zero to absolute precision A", i.e. known to be
//! `≡ 0 mod p^A`.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::Rational;
use crate::error::{Error, Result};

/// An odd prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p == 2 {
            return Err(Error::Domain("p = 2 is not supported; p must be an odd prime".into()));
        }
        if p < 3 || p.is_multiple_of(2) || (3..).step_by(2).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(Error::Domain(format!("{p} is not an odd prime")));
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn pow(self, e: u32) -> BigUint {
        num_traits::pow(BigUint::from(self.0), e as usize)
    }

    /// `v_p(n)` for nonzero `n`.
    pub fn valuation_of(self, n: &BigUint) -> Option<u32> {
        if n.is_zero() {
            return None;
        }
        let p = BigUint::from(self.0);
        let mut v = 0;
        let mut m = n.clone();
        loop {
            let (q, r) = m.div_rem(&p);
            if !r.is_zero() {
                return Some(v);
            }
            m = q;
            v += 1;
        }
    }

    /// Splits nonzero `n` into `(v_p(n), n / p^v)`.
    fn split(self, n: &BigUint) -> (u32, BigUint) {
        let v = self.valuation_of(n).expect("nonzero");
        (v, n / self.pow(v))
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub(crate) fn mod_inverse(a: &BigUint, modulus: &BigUint) -> Option<BigUint> {
    let a = BigInt::from_biguint(Sign::Plus, a % modulus);
    let m = BigInt::from_biguint(Sign::Plus, modulus.clone());
    let eg = a.extended_gcd(&m);
    if !eg.gcd.is_one() {
        return None;
    }
    eg.x.mod_floor(&m).to_biguint()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Zero { abs_precision: i64 },
    Unit { valuation: i64, unit: BigUint, precision: u32 },
}

/// A p-adic number known to finite precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicApprox {
    prime: Prime,
    repr: Repr,
}

/// Valuation of a difference, capped by what the operands actually know.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PadicDistance {
    /// The difference is known to be nonzero with this valuation.
    Known(i64),
    /// Indistinguishable at the available precision: the difference is
    /// `≡ 0 mod p^a` and nothing more is known (`+∞` capped at `a`).
    AtLeast(i64),
}

impl PadicDistance {
    /// Whether the two values provably agree to `k` absolute digits.
    pub fn reaches(self, k: i64) -> bool {
        match self {
            PadicDistance::Known(v) | PadicDistance::AtLeast(v) => v >= k,
        }
    }

    pub fn digits(self) -> i64 {
        match self {
            PadicDistance::Known(v) | PadicDistance::AtLeast(v) => v,
        }
    }
}

impl fmt::Display for PadicDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PadicDistance::Known(v) => write!(f, "{v}"),
            PadicDistance::AtLeast(a) => write!(f, "inf(>={a})"),
        }
    }
}

impl PadicApprox {
    pub fn zero(prime: Prime, abs_precision: i64) -> Self {
        PadicApprox {
            prime,
            repr: Repr::Zero { abs_precision },
        }
    }

    pub fn one(prime: Prime, precision: u32) -> Self {
        assert!(precision >= 1, "relative precision must be at least 1");
        PadicApprox {
            prime,
            repr: Repr::Unit {
                valuation: 0,
                unit: BigUint::one(),
                precision,
            },
        }
    }

    fn unit_value(prime: Prime, valuation: i64, unit: BigUint, precision: u32) -> Self {
        debug_assert!(precision >= 1);
        debug_assert!(!(&unit % prime.get()).is_zero());
        PadicApprox {
            prime,
            repr: Repr::Unit {
                valuation,
                unit,
                precision,
            },
        }
    }

    /// Embeds `r` with relative precision `precision`.
    pub fn from_rational(r: &Rational, prime: Prime, precision: u32) -> Result<Self> {
        if precision == 0 {
            return Err(Error::PrecisionExhausted("relative precision 0 requested".into()));
        }
        if r.is_zero() {
            return Ok(PadicApprox::zero(prime, precision as i64));
        }
        let (vn, un) = prime.split(&r.numer().abs().to_biguint().expect("abs"));
        let (vd, ud) = prime.split(&r.denom().to_biguint().expect("positive"));
        let modulus = prime.pow(precision);
        let inv = mod_inverse(&ud, &modulus).expect("p-free denominator is invertible");
        let mut unit = (un * inv) % &modulus;
        if r.is_negative() {
            unit = &modulus - unit;
        }
        Ok(PadicApprox::unit_value(prime, vn as i64 - vd as i64, unit, precision))
    }

    /// Embeds `r` so that it is known modulo `p^abs_precision`.
    pub fn from_rational_abs(r: &Rational, prime: Prime, abs_precision: i64) -> Result<Self> {
        if r.is_zero() {
            return Ok(PadicApprox::zero(prime, abs_precision));
        }
        let v = rational_valuation(r, prime);
        if v >= abs_precision {
            return Ok(PadicApprox::zero(prime, abs_precision));
        }
        PadicApprox::from_rational(r, prime, (abs_precision - v) as u32)
    }

    /// The value `p^shift * residue` where `residue` is an integer known modulo `p^modulus_exp`.
    pub fn from_residue(prime: Prime, residue: &BigUint, modulus_exp: u32, shift: i64) -> Self {
        let modulus = prime.pow(modulus_exp);
        let r = residue % &modulus;
        if r.is_zero() {
            return PadicApprox::zero(prime, modulus_exp as i64 + shift);
        }
        let (v, u) = prime.split(&r);
        PadicApprox::unit_value(prime, v as i64 + shift, u, modulus_exp - v)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    /// True when the value is indistinguishable from zero.
    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Unit { valuation, .. } => Some(*valuation),
        }
    }

    pub fn unit(&self) -> Option<&BigUint> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Unit { unit, .. } => Some(unit),
        }
    }

    /// Relative precision; `None` for a zero-to-precision value.
    pub fn precision(&self) -> Option<u32> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Unit { precision, .. } => Some(*precision),
        }
    }

    /// The value is known modulo `p^abs_precision()`.
    pub fn abs_precision(&self) -> i64 {
        match &self.repr {
            Repr::Zero { abs_precision } => *abs_precision,
            Repr::Unit {
                valuation,
                precision,
                ..
            } => valuation + *precision as i64,
        }
    }

    /// Drops digits beyond absolute precision `abs`. Never adds digits.
    pub fn truncate_abs(&self, abs: i64) -> Self {
        if abs >= self.abs_precision() {
            return self.clone();
        }
        match &self.repr {
            Repr::Zero { .. } => PadicApprox::zero(self.prime, abs),
            Repr::Unit { valuation, unit, .. } => {
                if *valuation >= abs {
                    PadicApprox::zero(self.prime, abs)
                } else {
                    let rel = (abs - valuation) as u32;
                    let u = unit % self.prime.pow(rel);
                    PadicApprox::unit_value(self.prime, *valuation, u, rel)
                }
            }
        }
    }

    /// Canonical rational representative `p^v * u` (0 for zero).
    pub fn lift(&self) -> Rational {
        match &self.repr {
            Repr::Zero { .. } => Rational::zero(),
            Repr::Unit { valuation, unit, .. } => {
                let u = BigInt::from_biguint(Sign::Plus, unit.clone());
                let pv = BigInt::from_biguint(Sign::Plus, self.prime.pow(valuation.unsigned_abs() as u32));
                if *valuation >= 0 {
                    Rational::from(u * pv)
                } else {
                    Rational::new(u, pv).expect("nonzero")
                }
            }
        }
    }

    fn same_prime(&self, other: &PadicApprox) {
        assert_eq!(
            self.prime, other.prime,
            "p-adic operands over different primes"
        );
    }

    pub fn add(&self, other: &PadicApprox) -> PadicApprox {
        self.same_prime(other);
        let p = self.prime;
        let abs = self.abs_precision().min(other.abs_precision());
        match (&self.repr, &other.repr) {
            (Repr::Zero { .. }, Repr::Zero { .. }) => PadicApprox::zero(p, abs),
            (Repr::Zero { .. }, _) => other.truncate_abs(abs),
            (_, Repr::Zero { .. }) => self.truncate_abs(abs),
            (
                Repr::Unit {
                    valuation: va,
                    unit: ua,
                    ..
                },
                Repr::Unit {
                    valuation: vb,
                    unit: ub,
                    ..
                },
            ) => {
                let v = (*va).min(*vb);
                let width = (abs - v) as u32;
                let modulus = p.pow(width);
                let sa = ua * p.pow((va - v) as u32);
                let sb = ub * p.pow((vb - v) as u32);
                let s = (sa + sb) % &modulus;
                PadicApprox::from_residue(p, &s, width, v)
            }
        }
    }

    pub fn neg(&self) -> PadicApprox {
        match &self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::Unit {
                valuation,
                unit,
                precision,
            } => {
                let modulus = self.prime.pow(*precision);
                PadicApprox::unit_value(self.prime, *valuation, &modulus - unit, *precision)
            }
        }
    }

    pub fn sub(&self, other: &PadicApprox) -> PadicApprox {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PadicApprox) -> PadicApprox {
        self.same_prime(other);
        let p = self.prime;
        match (&self.repr, &other.repr) {
            (Repr::Zero { abs_precision: a }, Repr::Zero { abs_precision: b }) => {
                PadicApprox::zero(p, a + b)
            }
            (Repr::Zero { abs_precision: a }, Repr::Unit { valuation, .. })
            | (Repr::Unit { valuation, .. }, Repr::Zero { abs_precision: a }) => {
                PadicApprox::zero(p, a + valuation)
            }
            (
                Repr::Unit {
                    valuation: va,
                    unit: ua,
                    precision: ka,
                },
                Repr::Unit {
                    valuation: vb,
                    unit: ub,
                    precision: kb,
                },
            ) => {
                let k = (*ka).min(*kb);
                let u = (ua * ub) % p.pow(k);
                PadicApprox::unit_value(p, va + vb, u, k)
            }
        }
    }

    pub fn try_div(&self, other: &PadicApprox) -> Result<PadicApprox> {
        self.same_prime(other);
        let p = self.prime;
        match (&self.repr, &other.repr) {
            (_, Repr::Zero { .. }) => Err(Error::DivisionByZero),
            (Repr::Zero { abs_precision }, Repr::Unit { valuation, .. }) => {
                Ok(PadicApprox::zero(p, abs_precision - valuation))
            }
            (
                Repr::Unit {
                    valuation: va,
                    unit: ua,
                    precision: ka,
                },
                Repr::Unit {
                    valuation: vb,
                    unit: ub,
                    precision: kb,
                },
            ) => {
                let k = (*ka).min(*kb);
                let modulus = p.pow(k);
                let inv = mod_inverse(ub, &modulus).expect("units are invertible");
                Ok(PadicApprox::unit_value(p, va - vb, (ua * inv) % modulus, k))
            }
        }
    }

    /// Square-and-multiply; `x^0 = 1`.
    pub fn pow(&self, e: u32) -> PadicApprox {
        if e == 0 {
            let k = match &self.repr {
                Repr::Zero { abs_precision } => (*abs_precision).max(1) as u32,
                Repr::Unit { precision, .. } => *precision,
            };
            return PadicApprox::one(self.prime, k);
        }
        let mut result: Option<PadicApprox> = None;
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.mul(&base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result.expect("e > 0")
    }

    /// `v_p(self - other)`, capped by the joint precision.
    pub fn distance(&self, other: &PadicApprox) -> PadicDistance {
        let d = self.sub(other);
        match d.repr {
            Repr::Zero { abs_precision } => PadicDistance::AtLeast(abs_precision),
            Repr::Unit { valuation, .. } => PadicDistance::Known(valuation),
        }
    }

    /// `|x|_p` as a float, for display only.
    pub fn abs_value(&self) -> f64 {
        match self.valuation() {
            None => 0.0,
            Some(v) => (self.prime.get() as f64).powi(-(v as i32)),
        }
    }
}

/// `v_p(r)` for nonzero `r`.
pub fn rational_valuation(r: &Rational, prime: Prime) -> i64 {
    let vn = prime
        .valuation_of(&r.numer().abs().to_biguint().expect("abs"))
        .expect("nonzero");
    let vd = prime
        .valuation_of(&r.denom().to_biguint().expect("positive"))
        .expect("nonzero");
    vn as i64 - vd as i64
}

impl fmt::Display for PadicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Zero { abs_precision } => {
                write!(f, "0 + O({}^{})", self.prime, abs_precision)
            }
            Repr::Unit {
                valuation,
                unit,
                precision,
            } => write!(
                f,
                "{}^{} * {} + O({}^{})",
                self.prime,
                valuation,
                unit,
                self.prime,
                valuation + *precision as i64
            ),
        }
    }
}

impl PadicApprox {
    /// Reduced residue of a p-integral value modulo `p^k` (requires `k ≤ abs_precision`).
    pub fn residue_mod(&self, k: u32) -> Result<BigUint> {
        if (k as i64) > self.abs_precision() {
            return Err(Error::PrecisionExhausted(format!(
                "{k} digits requested, {} known",
                self.abs_precision()
            )));
        }
        match &self.repr {
            Repr::Zero { .. } => Ok(BigUint::zero()),
            Repr::Unit { valuation, unit, .. } => {
                if *valuation < 0 {
                    return Err(Error::Domain("value is not p-integral".into()));
                }
                let m = self.prime.pow(k);
                Ok((unit * self.prime.pow(*valuation as u32)) % m)
            }
        }
    }

    pub fn unit_u64(&self) -> Option<u64> {
        self.unit().and_then(|u| u.to_u64())
    }
}
