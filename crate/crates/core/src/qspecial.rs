//! q-brackets, weight-0 q-Euler numbers and polynomials, exact beta values
//! and the classical (q = 1) Euler oracle.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{PolyQ, RatFuncQ, Rational, XPolyQ};
use crate::error::{Error, Result};

static PASCAL: OnceLock<Mutex<Vec<Vec<BigInt>>>> = OnceLock::new();

/// Binomial coefficient with `C(n, r) = 0` whenever `r < 0`, `r > n` or `n < 0`.
pub fn binomial(n: i64, r: i64) -> BigInt {
    if n < 0 || r < 0 || r > n {
        return BigInt::zero();
    }
    let (n, r) = (n as usize, r as usize);
    let table = PASCAL.get_or_init(|| Mutex::new(vec![vec![BigInt::one()]]));
    let mut rows = table.lock().expect("pascal table poisoned");
    while rows.len() <= n {
        let prev = rows.last().expect("row 0 present");
        let mut next = Vec::with_capacity(prev.len() + 1);
        next.push(BigInt::one());
        for w in prev.windows(2) {
            next.push(&w[0] + &w[1]);
        }
        next.push(BigInt::one());
        rows.push(next);
    }
    rows[n][r].clone()
}

pub fn binomial_q(n: i64, r: i64) -> Rational {
    Rational::from(binomial(n, r))
}

/// Which base the q-bracket is taken in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QBase {
    /// `[n]_q`
    Direct,
    /// `[n]_{q^{-1}}`
    Reciprocal,
    /// `[n]_{-q}`
    Negated,
}

/// `[n]_q = (1 - q^n)/(1 - q)` as an element of `Q(q)`, for any integer `n`.
pub fn q_bracket(n: i64, base: QBase) -> RatFuncQ {
    let geometric = |m: usize, sign: i64| -> PolyQ {
        // 1 + s q + (s q)^2 + ... + (s q)^{m-1}
        let coeffs = (0..m)
            .map(|i| Rational::from(if i % 2 == 1 { sign } else { 1 }))
            .collect();
        PolyQ::new(coeffs)
    };
    let direct = |n: i64, sign: i64| -> RatFuncQ {
        if n >= 0 {
            RatFuncQ::from_poly(geometric(n as usize, sign))
        } else {
            // [-m] = -(s q)^{-m} [m]
            let m = n.unsigned_abs() as usize;
            let sq_m = PolyQ::monomial(Rational::from(if m % 2 == 1 { sign } else { 1 }), m);
            RatFuncQ::new(-&geometric(m, sign), sq_m).expect("nonzero monomial")
        }
    };
    match base {
        QBase::Direct => direct(n, 1),
        QBase::Negated => direct(n, -1),
        // [n]_{1/q} = [n]_q / q^{n-1}
        QBase::Reciprocal => {
            let b = direct(n, 1);
            let shift = n - 1;
            let qp = RatFuncQ::from_poly(PolyQ::monomial(Rational::one(), shift.unsigned_abs() as usize));
            if shift >= 0 {
                b.checked_div(&qp).expect("q^k is nonzero")
            } else {
                &b * &qp
            }
        }
    }
}

/// `[2]_q = 1 + q`.
pub fn two_q() -> RatFuncQ {
    q_bracket(2, QBase::Direct)
}

/// Memoized table of weight-0 q-Euler numbers.
///
/// Numerators are generated over the integers from
/// `P_n = -q Σ_{l<n} C(n,l) P_l (1+q)^{n-1-l}` with `Ẽ_n = P_n/(1+q)^n`,
/// which is the umbral recurrence `q(Ẽ+1)^n + Ẽ_n = [2]_q δ_{n,0}` with the
/// common denominator cleared.
#[derive(Debug, Default)]
pub struct EulerTable {
    numbers: Mutex<NumberTable>,
    polys: Mutex<Vec<XPolyQ>>,
}

#[derive(Debug, Default)]
struct NumberTable {
    numerators: Vec<PolyQ>,
    values: Vec<RatFuncQ>,
}

static GLOBAL_TABLE: OnceLock<EulerTable> = OnceLock::new();

impl EulerTable {
    pub fn new() -> Self {
        EulerTable::default()
    }

    /// Process-wide shared table.
    pub fn global() -> &'static EulerTable {
        GLOBAL_TABLE.get_or_init(EulerTable::new)
    }

    /// A table pre-filled with known values (e.g. loaded from a cache file).
    /// Entries are re-derived numerators `Ẽ_n (1+q)^n`; a value whose
    /// denominator does not divide `(1+q)^n` is rejected.
    pub fn from_values(values: Vec<RatFuncQ>) -> Result<Self> {
        let one_plus_q = PolyQ::from_i64s(&[1, 1]);
        let mut numerators = Vec::with_capacity(values.len());
        for (n, v) in values.iter().enumerate() {
            let cleared = v * &RatFuncQ::from_poly(one_plus_q.pow(n as u32));
            if !cleared.is_polynomial() {
                return Err(Error::InternalInconsistency(format!(
                    "cached Euler number {n} has denominator {}",
                    v.den()
                )));
            }
            numerators.push(cleared.num().clone());
        }
        Ok(EulerTable {
            numbers: Mutex::new(NumberTable { numerators, values }),
            polys: Mutex::new(Vec::new()),
        })
    }

    pub fn computed_up_to(&self) -> usize {
        self.numbers.lock().expect("euler table poisoned").values.len()
    }

    /// `Ẽ_{n,q}`.
    pub fn number(&self, n: usize) -> RatFuncQ {
        let mut t = self.numbers.lock().expect("euler table poisoned");
        let one_plus_q = PolyQ::from_i64s(&[1, 1]);
        let minus_q = PolyQ::from_i64s(&[0, -1]);
        while t.values.len() <= n {
            let m = t.values.len();
            let num = if m == 0 {
                PolyQ::one()
            } else {
                let mut acc = PolyQ::zero();
                let mut pow = PolyQ::one(); // (1+q)^{m-1-l}, built from l = m-1 downward
                for l in (0..m).rev() {
                    let term = t.numerators[l].scale(&binomial_q(m as i64, l as i64));
                    acc = &acc + &(&term * &pow);
                    pow = &pow * &one_plus_q;
                }
                &minus_q * &acc
            };
            let value = RatFuncQ::new(num.clone(), one_plus_q.pow(m as u32))
                .expect("nonzero denominator");
            t.numerators.push(num);
            t.values.push(value);
        }
        t.values[n].clone()
    }

    /// `Ẽ_{0,q}, ..., Ẽ_{n,q}`.
    pub fn numbers_up_to(&self, n: usize) -> Vec<RatFuncQ> {
        self.number(n);
        self.numbers.lock().expect("euler table poisoned").values[..=n].to_vec()
    }

    /// `Ẽ_{n,q}(x) = Σ_l C(n,l) x^l Ẽ_{n-l,q}`.
    pub fn poly(&self, n: usize) -> XPolyQ {
        {
            let polys = self.polys.lock().expect("euler poly table poisoned");
            if let Some(p) = polys.get(n) {
                return p.clone();
            }
        }
        let numbers = self.numbers_up_to(n);
        let mut polys = self.polys.lock().expect("euler poly table poisoned");
        while polys.len() <= n {
            let m = polys.len();
            let coeffs = (0..=m)
                .map(|l| numbers[m - l].scale(&binomial_q(m as i64, l as i64)))
                .collect();
            polys.push(XPolyQ::new(coeffs));
        }
        polys[n].clone()
    }

    /// `∫_0^1 Ẽ_{n,q}(x) dx`, computed termwise and by the closed form
    /// `-[2]_{q^{-1}} Ẽ_{n+1,q}/(n+1)`; the two must agree.
    pub fn poly_integral01(&self, n: usize) -> Result<RatFuncQ> {
        let termwise = self.poly(n).integrate_0_to_1();
        let closed = self.poly_integral01_closed(n);
        if termwise != closed {
            return Err(Error::InternalInconsistency(format!(
                "unit-interval integral of the Euler polynomial {n}: termwise {termwise} vs closed form {closed}"
            )));
        }
        Ok(termwise)
    }

    /// The closed form alone: `-[2]_{q^{-1}} Ẽ_{n+1,q}/(n+1)`.
    pub fn poly_integral01_closed(&self, n: usize) -> RatFuncQ {
        let w = Rational::new(-1, n as i64 + 1).expect("nonzero");
        (&q_bracket(2, QBase::Reciprocal) * &self.number(n + 1)).scale(&w)
    }
}

/// `Ẽ_{n,q}` from the shared table.
pub fn euler_number(n: usize) -> RatFuncQ {
    EulerTable::global().number(n)
}

/// `Ẽ_{n,q}(x)` from the shared table.
pub fn euler_poly(n: usize) -> XPolyQ {
    EulerTable::global().poly(n)
}

pub fn euler_poly_integral01(n: usize) -> Result<RatFuncQ> {
    EulerTable::global().poly_integral01(n)
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// `B(a, b) = (a-1)!(b-1)!/(a+b-1)!` for positive integers.
pub fn beta_exact(a: i64, b: i64) -> Result<Rational> {
    if a < 1 || b < 1 {
        return Err(Error::Domain(format!("beta({a}, {b}) needs positive arguments")));
    }
    let (a, b) = (a as u64, b as u64);
    Rational::new(factorial(a - 1) * factorial(b - 1), factorial(a + b - 1))
}

/// Classical Euler numbers `E_n(0)` from `2/(e^t+1)`:
/// `E_0 = 1`, `Σ_{l=0}^n C(n,l) E_l + E_n = 0` for `n ≥ 1`.
pub fn classical_euler_oracle(n: usize) -> Rational {
    let mut e: Vec<Rational> = vec![Rational::one()];
    for m in 1..=n {
        let s = (0..m).fold(Rational::zero(), |acc, l| {
            &acc + &(&binomial_q(m as i64, l as i64) * &e[l])
        });
        e.push((-s).checked_div(&Rational::from(2)).expect("nonzero"));
    }
    e.swap_remove(n)
}
