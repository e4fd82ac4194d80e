//! Left and right sides of every checkable identity.
//!
//! Sums run over every index with a nonzero binomial coefficient
//! (`C(n, r) = 0` outside `0 ≤ r ≤ n`); finite bounds as typeset are only
//! reproduced by the printed variants.

use crate::arith::{PolyQ, RatFuncQ, Rational, XPolyQ};
use crate::error::Result;
use crate::qintegral::Measure;
use crate::qspecial::{binomial_q, q_bracket, two_q, EulerTable, QBase};

use super::eval::{Evaluator, Scalar};

/// Which reading of an identity with suspected typesetting errors to encode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Exactly as typeset.
    Printed,
    /// Re-derived from the earlier identities.
    Corrected,
}

fn c(n: i64, r: i64) -> Rational {
    binomial_q(n, r)
}

fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn constant(r: Rational) -> RatFuncQ {
    RatFuncQ::from_rational(r)
}

fn q_minus_one() -> RatFuncQ {
    RatFuncQ::from_poly(PolyQ::from_i64s(&[-1, 1]))
}

/// `q C(k,j) + (-1)^j C(m,j)`.
fn weight(k: i64, m: i64, j: i64) -> RatFuncQ {
    RatFuncQ::from_poly(PolyQ::new(vec![
        &Rational::from(sign(j)) * &c(m, j),
        c(k, j),
    ]))
}

fn frac(n: i64, d: i64) -> Rational {
    Rational::new(n, d).expect("nonzero denominator")
}

/// A linear combination `Σ c_i Ẽ_{n_i,q}(·)` of q-Euler polynomials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EulerCombination {
    terms: Vec<(RatFuncQ, usize)>,
}

impl EulerCombination {
    fn push(&mut self, coeff: RatFuncQ, n: i64) {
        if !coeff.is_zero() {
            assert!(n >= 0, "negative Euler index {n} with nonzero coefficient");
            self.terms.push((coeff, n as usize));
        }
    }

    pub fn terms(&self) -> &[(RatFuncQ, usize)] {
        &self.terms
    }

    pub fn extend(&mut self, other: &EulerCombination, scale: &RatFuncQ) {
        for (coeff, n) in &other.terms {
            self.push(coeff * scale, *n as i64);
        }
    }

    /// `Σ c_i Ẽ_{n_i,q}(x)`.
    pub fn polynomial(&self, table: &EulerTable) -> XPolyQ {
        self.terms
            .iter()
            .fold(XPolyQ::zero(), |acc, (coeff, n)| &acc + &table.poly(*n).scale(coeff))
    }

    /// `Σ c_i Ẽ_{n_i,q}`.
    pub fn at_zero<E: Evaluator>(&self, ev: &E) -> Result<E::Value> {
        let mut acc = ev.zero()?;
        for (coeff, n) in &self.terms {
            acc = acc.add(&ev.coefficient(coeff)?.mul(&ev.euler(*n)?));
        }
        Ok(acc)
    }

    /// `∫ Σ c_i Ẽ_{n_i,q}(x) dμ(x) = Σ c_i Σ_l C(n_i,l) Ẽ_{n_i-l,q} μ_l`.
    pub fn integrate<E: Evaluator>(&self, ev: &E, measure: Measure) -> Result<E::Value> {
        let mut acc = ev.zero()?;
        for (coeff, n) in &self.terms {
            let n = *n as i64;
            let mut inner = ev.zero()?;
            for l in 0..=n {
                let b = ev.coefficient(&constant(c(n, l)))?;
                let term = b
                    .mul(&ev.euler((n - l) as usize)?)
                    .mul(&ev.moment(measure, l as usize)?);
                inner = inner.add(&term);
            }
            acc = acc.add(&ev.coefficient(coeff)?.mul(&inner));
        }
        Ok(acc)
    }
}

/// Σ_j [q C(k,j) + (-1)^j C(m,j)] Ẽ_{k+m-j,q}(x)
pub fn eq6_combination(k: i64, m: i64) -> EulerCombination {
    let mut comb = EulerCombination::default();
    for j in 0..=(k + m) {
        comb.push(weight(k, m, j), k + m - j);
    }
    comb
}

/// x^k (x-1)^m
fn power_product(k: usize, m: usize) -> XPolyQ {
    &XPolyQ::x_pow(k) * &XPolyQ::linear(&Rational::one()).pow(m as u32)
}

/// [2]_q x^k (x-1)^m
pub fn eq6_right(k: usize, m: usize) -> XPolyQ {
    power_product(k, m).scale(&two_q())
}

pub fn sides_eq6(table: &EulerTable, k: usize, m: usize) -> (XPolyQ, XPolyQ) {
    (
        eq6_combination(k as i64, m as i64).polynomial(table),
        eq6_right(k, m),
    )
}

/// [2]_q Σ_j C(k,2j) Ẽ_{2k-2j,q}(x) + (q-1) Σ_j C(k,2j+1) Ẽ_{2k-2j-1,q}(x)
pub fn eq103_combination(k: i64) -> EulerCombination {
    let mut comb = EulerCombination::default();
    for j in 0..=k / 2 {
        comb.push(two_q().scale(&c(k, 2 * j)), 2 * k - 2 * j);
    }
    for j in 0..=k / 2 {
        comb.push(q_minus_one().scale(&c(k, 2 * j + 1)), 2 * k - 2 * j - 1);
    }
    comb
}

pub fn sides_eq103(table: &EulerTable, k: usize) -> (XPolyQ, XPolyQ) {
    (
        eq103_combination(k as i64).polynomial(table),
        eq6_right(k, k),
    )
}

/// Left side of the odd-degree identity built from the m = k+1 master
/// identity plus the even/odd split divided by [2]_q.
pub fn thm3_combination(k: i64, variant: Variant) -> EulerCombination {
    let mut comb = EulerCombination::default();
    let half = k / 2;
    let (first, second, third) = match variant {
        Variant::Printed => (0..=half, 1..=half, 0..=half),
        Variant::Corrected => (0..=k, 1..=k, 0..=k),
    };
    for j in first {
        comb.push(two_q().scale(&c(k, 2 * j)), 2 * k + 1 - 2 * j);
    }
    for j in second {
        comb.push(constant(c(k, 2 * j - 1)), 2 * k + 1 - 2 * j);
    }
    let over_two_q = two_q().recip().expect("nonzero");
    for j in third {
        let b = c(k, 2 * j + 1);
        if b.is_zero() {
            continue;
        }
        let tail_index = match variant {
            Variant::Printed => 2 * k - 2 * j + 1,
            Variant::Corrected => 2 * k - 2 * j - 1,
        };
        comb.push(q_minus_one().scale(&b), 2 * k - 2 * j);
        comb.push((&q_minus_one() * &over_two_q).scale(&b), tail_index);
    }
    comb
}

/// x^k (x-1)^k ([2]_q x - q)
pub fn thm3_right(k: usize) -> XPolyQ {
    let lin = XPolyQ::new(vec![-RatFuncQ::q(), two_q()]);
    &power_product(k, k) * &lin
}

pub fn sides_thm3(table: &EulerTable, k: usize, variant: Variant) -> (XPolyQ, XPolyQ) {
    (
        thm3_combination(k as i64, variant).polynomial(table),
        thm3_right(k),
    )
}

fn euler_sum<E: Evaluator>(ev: &E, terms: &[(RatFuncQ, usize)]) -> Result<E::Value> {
    let mut acc = ev.zero()?;
    for (coeff, n) in terms {
        acc = acc.add(&ev.coefficient(coeff)?.mul(&ev.euler(*n)?));
    }
    Ok(acc)
}

/// Σ_{j≥1} [qC(k,j)+(-1)^jC(m,j)] Ẽ_{k+m-j+1,q}/(k+m-j+1)
///   = q(-1)^{m+1}/((k+m+1)C(k+m,k)) - [2]_q Ẽ_{k+m+1,q}/(k+m+1)
pub fn sides_thm1<E: Evaluator>(ev: &E, k: i64, m: i64) -> Result<(E::Value, E::Value)> {
    let mut left = Vec::new();
    for j in 1..=(k + m) {
        let n = k + m - j + 1;
        left.push((weight(k, m, j).scale(&frac(1, n)), n as usize));
    }
    let top = k + m + 1;
    let constant_term = RatFuncQ::q().scale(&frac(sign(m + 1), 1).checked_div(&(&Rational::from(top) * &c(k + m, k)))?);
    let right = vec![(two_q().scale(&frac(-1, top)), top as usize)];
    Ok((
        euler_sum(ev, &left)?,
        ev.coefficient(&constant_term)?.add(&euler_sum(ev, &right)?),
    ))
}

/// The m = k+1 specialization, with the binomials as typeset.
pub fn sides_thm1_cor<E: Evaluator>(ev: &E, k: i64) -> Result<(E::Value, E::Value)> {
    let mut left = Vec::new();
    for j in 1..=(k + 1) {
        let n = 2 * k + 2 - j;
        left.push((weight(k, k + 1, j).scale(&frac(1, n)), n as usize));
    }
    let constant_term = RatFuncQ::q().scale(
        &frac(sign(k), 1).checked_div(&(&Rational::from(2 * k + 2) * &c(2 * k + 1, k)))?,
    );
    let right = vec![(two_q().scale(&frac(-1, 2 * k + 2)), (2 * k + 2) as usize)];
    Ok((
        euler_sum(ev, &left)?,
        ev.coefficient(&constant_term)?.add(&euler_sum(ev, &right)?),
    ))
}

/// [2]_q Σ C(k,2j) Ẽ_{2k-2j+1}/(2k-2j+1) + (q-1) Σ C(k,2j+1) Ẽ_{2k-2j}/(2k-2j)
///   = q(-1)^{k+1}/((2k+1)C(2k,k))
pub fn sides_thm2<E: Evaluator>(ev: &E, k: i64) -> Result<(E::Value, E::Value)> {
    let mut left = Vec::new();
    for j in 0..=k / 2 {
        let n = 2 * k - 2 * j + 1;
        let b = c(k, 2 * j);
        if !b.is_zero() {
            left.push((two_q().scale(&b.checked_div(&Rational::from(n))?), n as usize));
        }
    }
    for j in 0..=k / 2 {
        let n = 2 * k - 2 * j;
        let b = c(k, 2 * j + 1);
        if !b.is_zero() {
            left.push((q_minus_one().scale(&b.checked_div(&Rational::from(n))?), n as usize));
        }
    }
    let right = RatFuncQ::q().scale(
        &frac(sign(k + 1), 1).checked_div(&(&Rational::from(2 * k + 1) * &c(2 * k, k)))?,
    );
    Ok((euler_sum(ev, &left)?, ev.coefficient(&right)?))
}

/// [2]_q Σ_l C(m,l)(-1)^{m-l} μ_{l+k}
fn binomial_moment_sum<E: Evaluator>(ev: &E, measure: Measure, k: i64, m: i64) -> Result<E::Value> {
    let mut acc = ev.zero()?;
    for l in 0..=m {
        let b = ev.coefficient(&constant(&c(m, l) * &Rational::from(sign(m - l))))?;
        acc = acc.add(&b.mul(&ev.moment(measure, (l + k) as usize)?));
    }
    Ok(ev.coefficient(&two_q())?.mul(&acc))
}

/// Σ_l C(k,l)(-1)^{k-l} [[2]_q μ_{k+l+1} - q μ_{k+l}]
fn odd_moment_sum<E: Evaluator>(ev: &E, measure: Measure, k: i64) -> Result<E::Value> {
    let two = ev.coefficient(&two_q())?;
    let q = ev.coefficient(&RatFuncQ::q())?;
    let mut acc = ev.zero()?;
    for l in 0..=k {
        let b = ev.coefficient(&constant(&c(k, l) * &Rational::from(sign(k - l))))?;
        let inner = two
            .mul(&ev.moment(measure, (k + l + 1) as usize)?)
            .sub(&q.mul(&ev.moment(measure, (k + l) as usize)?));
        acc = acc.add(&b.mul(&inner));
    }
    Ok(acc)
}

/// Fermionic integral of the master identity:
/// Σ_j [..] Σ_l C(k+m-j,l) Ẽ_{k+m-j-l} Ẽ_l = [2]_q Σ_l C(m,l)(-1)^{m-l} Ẽ_{l+k}
pub fn sides_thm4<E: Evaluator>(ev: &E, k: i64, m: i64) -> Result<(E::Value, E::Value)> {
    Ok((
        eq6_combination(k, m).integrate(ev, Measure::Fermionic)?,
        binomial_moment_sum(ev, Measure::Fermionic, k, m)?,
    ))
}

/// Fermionic integral of the odd-degree identity.
pub fn sides_thm5<E: Evaluator>(ev: &E, k: i64, variant: Variant) -> Result<(E::Value, E::Value)> {
    Ok((
        odd_moment_sum(ev, Measure::Fermionic, k)?,
        thm3_combination(k, variant).integrate(ev, Measure::Fermionic)?,
    ))
}

/// Bosonic integral of the master identity:
/// [2]_q Σ_l C(m,l)(-1)^{m-l} B̃_{l+k} = Σ_j [..] Σ_l C(k+m-j,l) Ẽ_{k+m-j-l} B̃_l
pub fn sides_thm6<E: Evaluator>(ev: &E, k: i64, m: i64) -> Result<(E::Value, E::Value)> {
    Ok((
        binomial_moment_sum(ev, Measure::Bosonic, k, m)?,
        eq6_combination(k, m).integrate(ev, Measure::Bosonic)?,
    ))
}

/// Bosonic integral of the odd-degree identity.
pub fn sides_cor7<E: Evaluator>(ev: &E, k: i64, variant: Variant) -> Result<(E::Value, E::Value)> {
    Ok((
        odd_moment_sum(ev, Measure::Bosonic, k)?,
        thm3_combination(k, variant).integrate(ev, Measure::Bosonic)?,
    ))
}

/// (d/dx Ẽ_{n,q}(x), n Ẽ_{n-1,q}(x))
pub fn sides_eq7(table: &EulerTable, n: usize) -> (XPolyQ, XPolyQ) {
    (
        table.poly(n).differentiate(),
        table.poly(n - 1).scale(&constant(Rational::from(n as i64))),
    )
}

/// (termwise ∫_0^1 Ẽ_{n,q}(x) dx, -[2]_{q^{-1}} Ẽ_{n+1,q}/(n+1))
pub fn sides_eq8(table: &EulerTable, n: usize) -> (RatFuncQ, RatFuncQ) {
    (
        table.poly(n).integrate_0_to_1(),
        table.poly_integral01_closed(n),
    )
}

/// Integrating both sides of the master identity over [0,1], dividing by
/// `-[2]_{q^{-1}}` and moving the `j = 0` term across gives both sides of
/// the unit-interval identity by a route that never touches its closed form.
pub fn thm1_via_unit_interval(table: &EulerTable, k: usize, m: usize) -> Result<(RatFuncQ, RatFuncQ)> {
    let (left, right) = sides_eq6(table, k, m);
    let divisor = -q_bracket(2, QBase::Reciprocal);
    let top = k + m + 1;
    let moved = (&two_q() * &table.number(top)).scale(&frac(1, top as i64));
    let adjust = |side: &XPolyQ| -> Result<RatFuncQ> {
        Ok(&side.integrate_0_to_1().checked_div(&divisor)? - &moved)
    };
    Ok((adjust(&left)?, adjust(&right)?))
}

/// Integrating the even/odd split over [0,1] and dividing by `-[2]_{q^{-1}}`.
pub fn thm2_via_unit_interval(table: &EulerTable, k: usize) -> Result<(RatFuncQ, RatFuncQ)> {
    let (left, right) = sides_eq103(table, k);
    let divisor = -q_bracket(2, QBase::Reciprocal);
    Ok((
        left.integrate_0_to_1().checked_div(&divisor)?,
        right.integrate_0_to_1().checked_div(&divisor)?,
    ))
}

/// The polynomial integrand whose integral one side of a moment identity equals:
/// `[2]_q x^k (x-1)^m` for the master identity.
pub fn master_integrand(k: usize, m: usize) -> XPolyQ {
    eq6_right(k, m)
}

/// `x^k (x-1)^k ([2]_q x - q)` for the odd-degree identity.
pub fn odd_integrand(k: usize) -> XPolyQ {
    thm3_right(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identities::eval::ExactEvaluator;
    use std::sync::Arc;

    fn ev() -> ExactEvaluator {
        ExactEvaluator::new(Arc::new(EulerTable::new()))
    }

    fn rf(num: &[i64], den: &[i64]) -> RatFuncQ {
        RatFuncQ::new(PolyQ::from_i64s(num), PolyQ::from_i64s(den)).unwrap()
    }

    #[test]
    fn eq6_trivial_cells() {
        let t = EulerTable::new();
        let (l, r) = sides_eq6(&t, 0, 0);
        assert_eq!(l, XPolyQ::constant(two_q()));
        assert_eq!(r, l);
        let (l, r) = sides_eq6(&t, 1, 0);
        // (1+q) x
        let expect = XPolyQ::new(vec![RatFuncQ::zero(), two_q()]);
        assert_eq!(l, expect);
        assert_eq!(r, expect);
        // left is (1+q) Ẽ_1(x) + q
        let by_hand = &t.poly(1).scale(&two_q()) + &XPolyQ::constant(RatFuncQ::q());
        assert_eq!(l, by_hand);
    }

    #[test]
    fn eq6_one_two_by_coefficients() {
        // Brute-force expansion of Σ_j w_j Ẽ_{3-j}(x) coefficient by coefficient.
        let t = EulerTable::new();
        let (l, r) = sides_eq6(&t, 1, 2);
        let e: Vec<RatFuncQ> = t.numbers_up_to(3);
        let w = |j: i64| weight(1, 2, j);
        let mut manual = vec![RatFuncQ::zero(); 4];
        for j in 0..=3i64 {
            let n = (3 - j) as usize;
            for i in 0..=n {
                let term = (&w(j) * &e[n - i]).scale(&c(n as i64, i as i64));
                manual[i] = &manual[i] + &term;
            }
        }
        assert_eq!(l, XPolyQ::new(manual));
        assert_eq!(l, r);
    }

    #[test]
    fn eq103_k1_by_hand() {
        let t = EulerTable::new();
        let (l, r) = sides_eq103(&t, 1);
        // (1+q) x (x-1)
        let expect = XPolyQ::new(vec![RatFuncQ::zero(), -two_q(), two_q()]);
        assert_eq!(r, expect);
        assert_eq!(l, expect);
    }

    #[test]
    fn thm3_corrected_k1_by_hand() {
        let t = EulerTable::new();
        let (l, r) = sides_thm3(&t, 1, Variant::Corrected);
        let expect = XPolyQ::new(vec![
            RatFuncQ::zero(),
            RatFuncQ::q(),
            rf(&[-1, -2], &[1]),
            two_q(),
        ]);
        assert_eq!(r, expect);
        assert_eq!(l, expect);
    }

    #[test]
    fn thm3_printed_k1_differs() {
        let t = EulerTable::new();
        let (l, r) = sides_thm3(&t, 1, Variant::Printed);
        assert!(!(&l - &r).is_zero());
    }

    #[test]
    fn thm4_anchor() {
        let (l, r) = sides_thm4(&ev(), 1, 1).unwrap();
        let expect = rf(&[0, 0, 2], &[1, 1]);
        assert_eq!(l, expect);
        assert_eq!(r, expect);
    }

    #[test]
    fn thm1_thm2_small() {
        let e = ev();
        let (l, r) = sides_thm1(&e, 1, 1).unwrap();
        assert_eq!(l, r);
        for k in 1..=2 {
            let (l, r) = sides_thm2(&e, k).unwrap();
            assert_eq!(l, r);
        }
        // Right side of the k = 1 even/odd identity: q/6
        let (_, r) = sides_thm2(&e, 1).unwrap();
        assert_eq!(r, RatFuncQ::q().scale(&frac(1, 6)));
    }

    #[test]
    fn bosonic_needs_padic_context() {
        assert!(sides_thm6(&ev(), 1, 1).is_err());
    }

    #[test]
    fn bosonic_identities_collapse_to_fermionic_ones() {
        let table = Arc::new(EulerTable::new());
        let degenerate = ExactEvaluator::with_bernoulli_as_euler(table.clone());
        let exact = ExactEvaluator::new(table);
        for k in 1..=3 {
            for m in 1..=3 {
                let (l6, r6) = sides_thm6(&degenerate, k, m).unwrap();
                let (l4, r4) = sides_thm4(&exact, k, m).unwrap();
                assert_eq!((l6, r6), (r4, l4));
            }
            let (l7, r7) = sides_cor7(&degenerate, k, Variant::Corrected).unwrap();
            let (l5, r5) = sides_thm5(&exact, k, Variant::Corrected).unwrap();
            assert_eq!((&l7, &r7), (&l5, &r5));
            assert_eq!(l7, r7);
        }
    }
}
