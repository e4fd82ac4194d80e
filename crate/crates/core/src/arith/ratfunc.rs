use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::poly::poly_gcd;
use super::{PolyQ, Rational};
use crate::error::{Error, Result};

/// Element of the rational function field `Q(q)` in canonical form.
///
/// The denominator is monic and coprime to the numerator; zero is `0/1`.
/// Canonical form makes equality structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFuncQ {
    num: PolyQ,
    den: PolyQ,
}

impl RatFuncQ {
    pub fn new(num: PolyQ, den: PolyQ) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: PolyQ, den: PolyQ) -> Self {
        if num.is_zero() {
            return RatFuncQ::zero();
        }
        let g = poly_gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.exact_div(&g).expect("gcd divides numerator"),
                den.exact_div(&g).expect("gcd divides denominator"),
            )
        };
        Self::make_monic(num, den)
    }

    fn make_monic(num: PolyQ, den: PolyQ) -> Self {
        let lc = den.leading().expect("nonzero denominator").clone();
        if lc.is_one() {
            return RatFuncQ { num, den };
        }
        let inv = lc.recip().expect("nonzero leading coefficient");
        RatFuncQ {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn zero() -> Self {
        RatFuncQ {
            num: PolyQ::zero(),
            den: PolyQ::one(),
        }
    }

    pub fn one() -> Self {
        RatFuncQ::from_poly(PolyQ::one())
    }

    pub fn q() -> Self {
        RatFuncQ::from_poly(PolyQ::q())
    }

    pub fn from_poly(p: PolyQ) -> Self {
        RatFuncQ {
            num: p,
            den: PolyQ::one(),
        }
    }

    pub fn from_rational(r: Rational) -> Self {
        RatFuncQ::from_poly(PolyQ::constant(r))
    }

    pub fn from_i64(n: i64) -> Self {
        RatFuncQ::from_rational(Rational::from(n))
    }

    pub fn num(&self) -> &PolyQ {
        &self.num
    }

    pub fn den(&self) -> &PolyQ {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// Idempotent re-normalization of an already canonical value.
    pub fn renormalized(&self) -> Self {
        Self::normalize(self.num.clone(), self.den.clone())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::make_monic(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, rhs: &RatFuncQ) -> Result<Self> {
        Ok(self * &rhs.recip()?)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return RatFuncQ::zero();
        }
        RatFuncQ {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        RatFuncQ {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// Exact evaluation at a rational `q0`.
    pub fn eval(&self, q0: &Rational) -> Result<Rational> {
        let d = self.den.eval(q0);
        if d.is_zero() {
            return Err(Error::Pole { at: q0.to_string() });
        }
        self.num.eval(q0).checked_div(&d)
    }
}

impl Add<&RatFuncQ> for &RatFuncQ {
    type Output = RatFuncQ;
    fn add(self, rhs: &RatFuncQ) -> RatFuncQ {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            let num = &self.num + &rhs.num;
            return RatFuncQ::normalize(num, self.den.clone());
        }
        // gcd(a*d' + c*b', b'*d'*g) = gcd(a*d' + c*b', g) for reduced inputs
        let g = poly_gcd(&self.den, &rhs.den);
        if g.is_one() {
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            let den = &self.den * &rhs.den;
            return RatFuncQ { num, den };
        }
        let b1 = self.den.exact_div(&g).expect("g divides den");
        let d1 = rhs.den.exact_div(&g).expect("g divides den");
        let num = &(&self.num * &d1) + &(&rhs.num * &b1);
        if num.is_zero() {
            return RatFuncQ::zero();
        }
        let g2 = poly_gcd(&num, &g);
        let num = num.exact_div(&g2).expect("g2 divides num");
        let den = &(&b1 * &d1) * &g.exact_div(&g2).expect("g2 divides g");
        RatFuncQ::make_monic(num, den)
    }
}

impl Neg for &RatFuncQ {
    type Output = RatFuncQ;
    fn neg(self) -> RatFuncQ {
        RatFuncQ {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Sub<&RatFuncQ> for &RatFuncQ {
    type Output = RatFuncQ;
    fn sub(self, rhs: &RatFuncQ) -> RatFuncQ {
        self + &(-rhs)
    }
}

impl Mul<&RatFuncQ> for &RatFuncQ {
    type Output = RatFuncQ;
    fn mul(self, rhs: &RatFuncQ) -> RatFuncQ {
        if self.is_zero() || rhs.is_zero() {
            return RatFuncQ::zero();
        }
        let g1 = poly_gcd(&self.num, &rhs.den);
        let g2 = poly_gcd(&rhs.num, &self.den);
        let a = self.num.exact_div(&g1).expect("g1 | a");
        let d = rhs.den.exact_div(&g1).expect("g1 | d");
        let c = rhs.num.exact_div(&g2).expect("g2 | c");
        let b = self.den.exact_div(&g2).expect("g2 | b");
        RatFuncQ::make_monic(&a * &c, &b * &d)
    }
}

macro_rules! owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for RatFuncQ {
            type Output = RatFuncQ;
            fn $method(self, rhs: RatFuncQ) -> RatFuncQ {
                $tr::$method(&self, &rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for RatFuncQ {
    type Output = RatFuncQ;
    fn neg(self) -> RatFuncQ {
        -&self
    }
}

impl fmt::Display for RatFuncQ {
    /// Canonical string form, e.g. `(-q)/(1 + q)`; polynomials print bare.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}
