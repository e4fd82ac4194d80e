use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{RatFuncQ, Rational};

/// Polynomial in `x` with coefficients in `Q(q)`; `coeffs[i]` multiplies `x^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct XPolyQ {
    coeffs: Vec<RatFuncQ>,
}

impl XPolyQ {
    pub fn new(mut coeffs: Vec<RatFuncQ>) -> Self {
        while coeffs.last().is_some_and(RatFuncQ::is_zero) {
            coeffs.pop();
        }
        XPolyQ { coeffs }
    }

    pub fn zero() -> Self {
        XPolyQ { coeffs: Vec::new() }
    }

    pub fn constant(c: RatFuncQ) -> Self {
        XPolyQ::new(vec![c])
    }

    /// `x - root`.
    pub fn linear(root: &Rational) -> Self {
        XPolyQ::new(vec![RatFuncQ::from_rational(-root), RatFuncQ::one()])
    }

    pub fn x_pow(n: usize) -> Self {
        let mut coeffs = vec![RatFuncQ::zero(); n + 1];
        coeffs[n] = RatFuncQ::one();
        XPolyQ { coeffs }
    }

    pub fn coeffs(&self) -> &[RatFuncQ] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> RatFuncQ {
        self.coeffs.get(i).cloned().unwrap_or_else(RatFuncQ::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn scale(&self, c: &RatFuncQ) -> Self {
        if c.is_zero() {
            return XPolyQ::zero();
        }
        XPolyQ::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(XPolyQ::constant(RatFuncQ::one()), |acc, _| &acc * self)
    }

    /// d/dx, applied coefficient-wise.
    pub fn differentiate(&self) -> Self {
        XPolyQ::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.scale(&Rational::from(i as i64)))
                .collect(),
        )
    }

    /// `∫_0^1 f(x) dx = Σ c_i / (i + 1)`.
    pub fn integrate_0_to_1(&self) -> RatFuncQ {
        self.coeffs
            .iter()
            .enumerate()
            .fold(RatFuncQ::zero(), |acc, (i, c)| {
                let w = Rational::new(1, i as i64 + 1).expect("nonzero");
                &acc + &c.scale(&w)
            })
    }

    pub fn eval_at(&self, x0: &Rational) -> RatFuncQ {
        self.coeffs
            .iter()
            .rev()
            .fold(RatFuncQ::zero(), |acc, c| &acc.scale(x0) + c)
    }

    /// `f(x + shift)` by Horner's scheme in the shifted variable.
    pub fn shift_compose(&self, shift: &Rational) -> Self {
        let lin = XPolyQ::new(vec![
            RatFuncQ::from_rational(shift.clone()),
            RatFuncQ::one(),
        ]);
        self.coeffs.iter().rev().fold(XPolyQ::zero(), |acc, c| {
            &(&acc * &lin) + &XPolyQ::constant(c.clone())
        })
    }
}

impl Add<&XPolyQ> for &XPolyQ {
    type Output = XPolyQ;
    fn add(self, rhs: &XPolyQ) -> XPolyQ {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        XPolyQ::new((0..n).map(|i| &self.coeff(i) + &rhs.coeff(i)).collect())
    }
}

impl Sub<&XPolyQ> for &XPolyQ {
    type Output = XPolyQ;
    fn sub(self, rhs: &XPolyQ) -> XPolyQ {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        XPolyQ::new((0..n).map(|i| &self.coeff(i) - &rhs.coeff(i)).collect())
    }
}

impl Mul<&XPolyQ> for &XPolyQ {
    type Output = XPolyQ;
    fn mul(self, rhs: &XPolyQ) -> XPolyQ {
        if self.is_zero() || rhs.is_zero() {
            return XPolyQ::zero();
        }
        let mut out = vec![RatFuncQ::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        XPolyQ::new(out)
    }
}

impl Neg for &XPolyQ {
    type Output = XPolyQ;
    fn neg(self) -> XPolyQ {
        XPolyQ {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for XPolyQ {
    /// Ascending powers of `x`, each coefficient parenthesized unless it is 1.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let power = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            match (i, c == &RatFuncQ::one()) {
                (0, _) => write!(f, "({c})")?,
                (_, true) => f.write_str(&power)?,
                _ => write!(f, "({c})*{power}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PolyQ;

    fn e1() -> RatFuncQ {
        RatFuncQ::new(PolyQ::from_i64s(&[0, -1]), PolyQ::from_i64s(&[1, 1])).unwrap()
    }

    #[test]
    fn differentiate_second_euler_polynomial() {
        // x^2 - 2q/(1+q) x + q(q-1)/(1+q)^2
        let e2 = RatFuncQ::new(PolyQ::from_i64s(&[0, -1, 1]), PolyQ::from_i64s(&[1, 2, 1])).unwrap();
        let f = XPolyQ::new(vec![e2, e1().scale(&Rational::from(2)), RatFuncQ::one()]);
        let expect = XPolyQ::new(vec![e1().scale(&Rational::from(2)), RatFuncQ::from_i64(2)]);
        assert_eq!(f.differentiate(), expect);
    }

    #[test]
    fn integrate_constant_one() {
        assert_eq!(XPolyQ::constant(RatFuncQ::one()).integrate_0_to_1(), RatFuncQ::one());
        assert_eq!(XPolyQ::zero().integrate_0_to_1(), RatFuncQ::zero());
    }

    #[test]
    fn eval_at_zero_extracts_constant() {
        let f = XPolyQ::new(vec![e1(), RatFuncQ::one()]);
        assert_eq!(f.eval_at(&Rational::zero()), e1());
    }

    #[test]
    fn shift_compose_matches_evaluation() {
        let f = &XPolyQ::linear(&Rational::from(1)).pow(3) + &XPolyQ::constant(e1());
        let s = Rational::new(2, 3).unwrap();
        let g = f.shift_compose(&s);
        for x0 in [-2i64, 0, 1, 5] {
            let x0 = Rational::from(x0);
            assert_eq!(g.eval_at(&x0), f.eval_at(&(&x0 + &s)));
        }
    }
}
