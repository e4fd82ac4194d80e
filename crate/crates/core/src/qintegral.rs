//! Bosonic (q-Volkenborn) and fermionic p-adic q-integrals of polynomial
//! integrands, evaluated through their Riemann sums
//!
//! ```text
//! bosonic:   (1/[p^N]_q)  Σ_{ξ<p^N} f(ξ) q^ξ
//! fermionic: (1/[p^N]_{-q}) Σ_{ξ<p^N} f(ξ) (-q)^ξ
//! ```
//!
//! with adaptive depth `N`. Every level is an exact computation modulo a
//! working power of `p`; the bosonic bracket has valuation `N`, so bosonic
//! levels carry `N` extra digits.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::padic::{mod_inverse, PadicApprox, PadicDistance, Prime};
use crate::qspecial::binomial_q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    /// `dμ_q`
    Bosonic,
    /// `dμ_{-q}`
    Fermionic,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Bosonic => "bosonic",
            Measure::Fermionic => "fermionic",
        }
    }
}

/// A polynomial integrand `f(ξ) = Σ c_i ξ^i` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Integrand {
    coeffs: Vec<Rational>,
}

impl Integrand {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        Integrand { coeffs }
    }

    /// `(x0 + ξ)^n`.
    pub fn shifted_monomial(n: usize, x0: &Rational) -> Self {
        let coeffs = (0..=n)
            .map(|i| &binomial_q(n as i64, i as i64) * &x0.pow((n - i) as u32))
            .collect();
        Integrand::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Integrand::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn add(&self, other: &Integrand) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[Rational], i: usize| v.get(i).cloned().unwrap_or_else(Rational::zero);
        Integrand::new(
            (0..n)
                .map(|i| &get(&self.coeffs, i) + &get(&other.coeffs, i))
                .collect(),
        )
    }
}

/// Knobs shared by every integral evaluated in one p-adic setting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralSettings {
    pub prime: Prime,
    /// `q` as an exact rational with `v_p(q - 1) ≥ 1`.
    pub q: Rational,
    /// Guard digits carried beyond the target; at least 2.
    pub guard: u32,
    pub max_level: u32,
    /// Largest admissible number of Riemann-sum terms `p^N`.
    pub term_limit: u64,
    /// Carry `N` extra digits at bosonic level `N`. Turning this off
    /// under-budgets the modulus; results then report reduced precision.
    pub level_surcharge: bool,
}

impl IntegralSettings {
    pub fn new(prime: Prime, q: Rational) -> Result<Self> {
        check_q(prime, &q)?;
        Ok(IntegralSettings {
            prime,
            q,
            guard: 4,
            max_level: 12,
            term_limit: 1_000_000,
            level_surcharge: true,
        })
    }

    /// The default `q = 1 + p`.
    pub fn with_default_q(prime: Prime) -> Self {
        IntegralSettings::new(prime, Rational::from(prime.get() as i64 + 1)).expect("1 + p is admissible")
    }

    /// Working modulus exponent for level `level` when `target` absolute digits are requested.
    pub fn working_exponent(&self, measure: Measure, target: i64, level: u32) -> u32 {
        let base = target.max(1) as u32 + self.guard.max(2);
        match measure {
            Measure::Fermionic => base,
            Measure::Bosonic if self.level_surcharge => base + level,
            Measure::Bosonic => base,
        }
    }
}

/// Requires `q` to be p-integral with `v_p(q - 1) ≥ 1`.
pub fn check_q(prime: Prime, q: &Rational) -> Result<()> {
    let p = BigInt::from(prime.get());
    let d = q - &Rational::one();
    let ok = !(q.denom() % &p).is_zero() && (d.is_zero() || (d.numer() % &p).is_zero());
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(format!("q = {q} does not satisfy |q - 1|_{prime} < 1")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralRequest {
    pub measure: Measure,
    pub integrand: Integrand,
    /// Requested absolute precision `K`.
    pub target: i64,
    pub settings: IntegralSettings,
}

impl IntegralRequest {
    /// The integrand `(x0 + ξ)^n`.
    pub fn monomial(
        measure: Measure,
        n: usize,
        x0: &Rational,
        target: i64,
        settings: IntegralSettings,
    ) -> Self {
        IntegralRequest {
            measure,
            integrand: Integrand::shifted_monomial(n, x0),
            target,
            settings,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelRecord {
    pub level: u32,
    pub value: PadicApprox,
    /// Distance to the previous level; `None` at the first level.
    pub distance: Option<PadicDistance>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralResult {
    pub value: PadicApprox,
    /// Absolute digits vouched for, never more than requested.
    pub achieved_precision: i64,
    pub levels_used: u32,
    pub trace: Vec<LevelRecord>,
    pub converged: bool,
}

impl IntegralResult {
    /// Fails with `ConvergenceNotReached` unless the adaptive stop fired.
    pub fn into_converged(self, requested: i64) -> Result<IntegralResult> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::ConvergenceNotReached {
                levels: self.levels_used,
                achieved: self.achieved_precision,
                requested,
            })
        }
    }
}

/// How the `p^N` terms of one level are summed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopMode {
    Sequential,
    /// Split into this many chunks summed in parallel; bit-identical to sequential.
    Chunked(usize),
}

enum Modulus {
    Small(u64),
    Big(BigUint),
}

struct Prepared {
    /// `p^s f` with p-integral coefficients, reduced mod the working modulus.
    coeffs: Vec<BigUint>,
    /// `s`
    shift: u32,
    /// `±q` mod the working modulus.
    ratio: BigUint,
    modulus_exp: u32,
    modulus: BigUint,
}

fn reduce_rational(r: &Rational, modulus: &BigUint) -> BigUint {
    let m = BigInt::from_biguint(Sign::Plus, modulus.clone());
    let num = r.numer().mod_floor(&m).to_biguint().expect("non-negative");
    let den = r.denom().mod_floor(&m).to_biguint().expect("non-negative");
    let inv = mod_inverse(&den, modulus).expect("denominator is a p-adic unit");
    (num * inv) % modulus
}

fn prepare(req: &IntegralRequest, level: u32) -> Result<Prepared> {
    let prime = req.settings.prime;
    check_q(prime, &req.settings.q)?;
    let shift = req
        .integrand
        .coeffs
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| {
            prime
                .valuation_of(&c.denom().to_biguint().expect("positive"))
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0);
    let modulus_exp = req
        .settings
        .working_exponent(req.measure, req.target, level)
        + shift;
    let modulus = prime.pow(modulus_exp);
    let scale = Rational::from(BigInt::from_biguint(Sign::Plus, prime.pow(shift)));
    let coeffs = req
        .integrand
        .coeffs
        .iter()
        .map(|c| reduce_rational(&(c * &scale), &modulus))
        .collect();
    let q = match req.measure {
        Measure::Bosonic => req.settings.q.clone(),
        Measure::Fermionic => -&req.settings.q,
    };
    Ok(Prepared {
        coeffs,
        shift,
        ratio: reduce_rational(&q, &modulus),
        modulus_exp,
        modulus,
    })
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod_small(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        e >>= 1;
    }
    acc
}

/// `(Σ f(ξ) r^ξ, Σ r^ξ)` over `start ≤ ξ < end`.
fn partial_sums(prep: &Prepared, modulus: &Modulus, start: u64, end: u64) -> (BigUint, BigUint) {
    match modulus {
        Modulus::Small(m) => {
            let m = *m;
            let coeffs: Vec<u64> = prep.coeffs.iter().map(|c| c.to_u64().expect("< m")).collect();
            let ratio = prep.ratio.to_u64().expect("< m");
            let mut pw = powmod_small(ratio, start, m);
            let (mut s, mut b) = (0u64, 0u64);
            for xi in start..end {
                let x = xi % m;
                let f = coeffs.iter().rev().fold(0u64, |acc, &c| (mulmod(acc, x, m) + c) % m);
                s = (s + mulmod(f, pw, m)) % m;
                b = (b + pw) % m;
                pw = mulmod(pw, ratio, m);
            }
            (BigUint::from(s), BigUint::from(b))
        }
        Modulus::Big(m) => {
            let mut pw = prep.ratio.modpow(&BigUint::from(start), m);
            let (mut s, mut b) = (BigUint::zero(), BigUint::zero());
            for xi in start..end {
                let x = BigUint::from(xi) % m;
                let f = prep
                    .coeffs
                    .iter()
                    .rev()
                    .fold(BigUint::zero(), |acc, c| (acc * &x + c) % m);
                s = (s + f * &pw) % m;
                b = (b + &pw) % m;
                pw = (pw * &prep.ratio) % m;
            }
            (s, b)
        }
    }
}

/// One Riemann sum at depth `level`.
pub fn riemann_level(req: &IntegralRequest, level: u32) -> Result<PadicApprox> {
    riemann_level_with(req, level, LoopMode::Sequential)
}

pub fn riemann_level_with(req: &IntegralRequest, level: u32, mode: LoopMode) -> Result<PadicApprox> {
    if level == 0 {
        return Err(Error::Domain("Riemann level must be at least 1".into()));
    }
    let prime = req.settings.prime;
    let terms = (prime.get() as u128).checked_pow(level).unwrap_or(u128::MAX);
    if terms > req.settings.term_limit as u128 {
        return Err(Error::CostCapExceeded {
            terms,
            limit: req.settings.term_limit,
        });
    }
    let terms = terms as u64;
    let prep = prepare(req, level)?;
    let modulus = match prep.modulus.to_u64() {
        Some(m) if m < (1u64 << 63) => Modulus::Small(m),
        _ => Modulus::Big(prep.modulus.clone()),
    };
    let (s, b) = match mode {
        LoopMode::Sequential | LoopMode::Chunked(0) | LoopMode::Chunked(1) => {
            partial_sums(&prep, &modulus, 0, terms)
        }
        LoopMode::Chunked(chunks) => {
            let chunks = chunks as u64;
            let width = terms.div_ceil(chunks);
            let parts: Vec<(BigUint, BigUint)> = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let lo = (c * width).min(terms);
                    let hi = ((c + 1) * width).min(terms);
                    partial_sums(&prep, &modulus, lo, hi)
                })
                .collect();
            parts.into_iter().fold(
                (BigUint::zero(), BigUint::zero()),
                |(s, b), (ps, pb)| ((s + ps) % &prep.modulus, (b + pb) % &prep.modulus),
            )
        }
    };
    let sum = PadicApprox::from_residue(prime, &s, prep.modulus_exp, 0);
    let bracket = PadicApprox::from_residue(prime, &b, prep.modulus_exp, 0);
    if bracket.is_zero() {
        return Err(Error::PrecisionExhausted(format!(
            "[p^{level}] vanishes modulo p^{}",
            prep.modulus_exp
        )));
    }
    let value = sum.try_div(&bracket)?;
    let unshift = PadicApprox::from_residue(prime, &BigUint::from(1u32), prep.modulus_exp, prep.shift as i64);
    value.try_div(&unshift)
}

/// Adaptive evaluation: levels `N = 1, 2, …` until two consecutive level
/// distances both reach the target.
pub fn integrate(req: &IntegralRequest) -> Result<IntegralResult> {
    let k = req.target;
    let mut trace: Vec<LevelRecord> = Vec::new();
    let mut stable_run = 0;
    for level in 1..=req.settings.max_level {
        let value = match riemann_level(req, level) {
            Ok(v) => v,
            Err(Error::CostCapExceeded { .. }) if !trace.is_empty() => break,
            // Without the bosonic surcharge the modulus runs out; keep what we have.
            Err(Error::PrecisionExhausted(_)) if !trace.is_empty() => break,
            Err(e) => return Err(e),
        };
        let distance = trace.last().map(|prev| value.distance(&prev.value));
        trace.push(LevelRecord {
            level,
            value,
            distance,
        });
        match distance {
            Some(d) if d.reaches(k) => stable_run += 1,
            Some(_) => stable_run = 0,
            None => {}
        }
        if stable_run >= 2 {
            break;
        }
    }
    let converged = stable_run >= 2;
    let tail: Vec<i64> = trace
        .iter()
        .rev()
        .take(2)
        .filter_map(|r| r.distance.map(PadicDistance::digits))
        .collect();
    let observed = tail.iter().copied().min().unwrap_or(i64::MIN);
    let last = trace.last().expect("at least one level");
    let achieved = observed.min(k).min(last.value.abs_precision());
    Ok(IntegralResult {
        value: last.value.truncate_abs(achieved),
        achieved_precision: achieved,
        levels_used: last.level,
        converged,
        trace,
    })
}

/// `B̃_{n,q} = ∫ y^n dμ_q(y)` to `k` absolute digits.
pub fn bernoulli_number_padic(n: usize, settings: &IntegralSettings, k: i64) -> Result<PadicApprox> {
    let req = IntegralRequest::monomial(Measure::Bosonic, n, &Rational::zero(), k, settings.clone());
    Ok(integrate(&req)?.into_converged(k)?.value)
}

/// `Ẽ_{n,q} = ∫ y^n dμ_{-q}(y)` to `k` absolute digits.
pub fn euler_number_padic(n: usize, settings: &IntegralSettings, k: i64) -> Result<PadicApprox> {
    let req = IntegralRequest::monomial(Measure::Fermionic, n, &Rational::zero(), k, settings.clone());
    Ok(integrate(&req)?.into_converged(k)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qspecial::EulerTable;

    fn settings(p: u64) -> IntegralSettings {
        IntegralSettings::with_default_q(Prime::new(p).unwrap())
    }

    fn embed(r: &Rational, p: u64, abs: i64) -> PadicApprox {
        PadicApprox::from_rational_abs(r, Prime::new(p).unwrap(), abs).unwrap()
    }

    #[test]
    fn q_admissibility() {
        let p3 = Prime::new(3).unwrap();
        assert!(check_q(p3, &Rational::from(4)).is_ok());
        assert!(check_q(p3, &Rational::from(1)).is_ok());
        assert!(check_q(p3, &Rational::new(7, 2).unwrap()).is_err()); // 7/2 - 1 = 5/2
        assert!(check_q(p3, &Rational::from(2)).is_err());
        assert!(check_q(p3, &Rational::new(1, 3).unwrap()).is_err());
        assert!(IntegralSettings::new(p3, Rational::from(-2)).is_ok());
    }

    #[test]
    fn normalization_at_every_level() {
        for measure in [Measure::Bosonic, Measure::Fermionic] {
            let req = IntegralRequest::monomial(measure, 0, &Rational::zero(), 6, settings(3));
            for level in 1..=5 {
                let v = riemann_level(&req, level).unwrap();
                assert_eq!(v.lift(), Rational::one(), "{measure:?} level {level}");
            }
        }
    }

    #[test]
    fn fermionic_nine_term_sum_matches_direct_rational_sum() {
        // (1/[9]_{-q}) Σ_{ξ<9} ξ (-q)^ξ at q = 4, computed over Q then embedded
        let q = Rational::from(-4);
        let mut s = Rational::zero();
        let mut b = Rational::zero();
        for xi in 0..9i64 {
            s = &s + &(&Rational::from(xi) * &q.pow(xi as u32));
            b = &b + &q.pow(xi as u32);
        }
        let direct = s.checked_div(&b).unwrap();
        let req = IntegralRequest::monomial(Measure::Fermionic, 1, &Rational::zero(), 6, settings(3));
        let level = riemann_level(&req, 2).unwrap();
        assert!(level.distance(&embed(&direct, 3, 10)).reaches(10));
    }

    #[test]
    fn fermionic_matches_exact_euler_numbers() {
        let table = EulerTable::new();
        let s = settings(3);
        for n in 0..=5 {
            let exact = table.number(n).eval(&s.q).unwrap();
            let v = euler_number_padic(n, &s, 6).unwrap();
            assert!(v.distance(&embed(&exact, 3, 12)).reaches(6), "n = {n}");
        }
        // Ẽ_1 at q = 4 is -4/5, Ẽ_3 is -4/125
        let e1 = euler_number_padic(1, &s, 6).unwrap();
        assert!(e1.distance(&embed(&Rational::new(-4, 5).unwrap(), 3, 12)).reaches(6));
        let e3 = euler_number_padic(3, &s, 6).unwrap();
        assert!(e3.distance(&embed(&Rational::new(-4, 125).unwrap(), 3, 12)).reaches(6));
    }

    #[test]
    fn shifted_fermionic_matches_polynomial_at_one() {
        let table = EulerTable::new();
        let s = settings(3);
        let exact = table.poly(2).eval_at(&Rational::one()).eval(&s.q).unwrap();
        let req = IntegralRequest::monomial(Measure::Fermionic, 2, &Rational::one(), 6, s);
        let r = integrate(&req).unwrap();
        assert!(r.converged);
        assert!(r.value.distance(&embed(&exact, 3, 12)).reaches(6));
    }

    #[test]
    fn bosonic_stabilizes() {
        let req = IntegralRequest::monomial(Measure::Bosonic, 1, &Rational::zero(), 4, settings(3));
        let r = integrate(&req).unwrap();
        assert!(r.converged);
        assert_eq!(r.achieved_precision, 4);
        let tail: Vec<_> = r.trace.iter().rev().take(2).map(|t| t.distance.unwrap()).collect();
        assert!(tail.iter().all(|d| d.reaches(4)));
    }

    #[test]
    fn chunked_is_bit_identical() {
        for measure in [Measure::Bosonic, Measure::Fermionic] {
            let req = IntegralRequest::monomial(measure, 3, &Rational::new(1, 2).unwrap(), 5, settings(3));
            let seq = riemann_level(&req, 6).unwrap();
            for chunks in [2, 3, 7, 64] {
                assert_eq!(riemann_level_with(&req, 6, LoopMode::Chunked(chunks)).unwrap(), seq);
            }
        }
    }

    #[test]
    fn cost_cap() {
        let mut s = settings(3);
        s.term_limit = 100;
        let req = IntegralRequest::monomial(Measure::Bosonic, 1, &Rational::zero(), 4, s);
        assert!(matches!(riemann_level(&req, 5), Err(Error::CostCapExceeded { .. })));
        assert!(riemann_level(&req, 4).is_ok());
    }

    #[test]
    fn starved_level_budget_reports_nonconvergence() {
        let mut s = settings(3);
        s.max_level = 4;
        let req = IntegralRequest::monomial(Measure::Fermionic, 5, &Rational::zero(), 8, s);
        let r = integrate(&req).unwrap();
        assert!(!r.converged);
        assert!(r.achieved_precision < 8);
        assert!(r.clone().into_converged(8).is_err());
    }

    #[test]
    fn exhausted_modulus_stops_early() {
        let mut s = settings(3);
        s.level_surcharge = false;
        s.guard = 2;
        let req = IntegralRequest::monomial(Measure::Bosonic, 1, &Rational::zero(), 4, s);
        // W = 6, so [3^6]_q vanishes at level 6.
        assert!(matches!(riemann_level(&req, 6), Err(Error::PrecisionExhausted(_))));
        let r = integrate(&req).unwrap();
        assert_eq!(r.levels_used, 5);
        assert!(!r.converged && r.achieved_precision < 4);
    }

    #[test]
    fn p_in_shift_denominator() {
        // (1/3 + ξ)^2 has a 3 in its coefficient denominators
        let s = settings(3);
        let x0 = Rational::new(1, 3).unwrap();
        let table = EulerTable::new();
        let exact = table.poly(2).eval_at(&x0).eval(&s.q).unwrap();
        let req = IntegralRequest::monomial(Measure::Fermionic, 2, &x0, 6, s);
        let r = integrate(&req).unwrap();
        assert!(r.converged);
        assert!(r.value.distance(&embed(&exact, 3, 12)).reaches(6));
    }
}
