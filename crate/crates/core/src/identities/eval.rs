use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use crate::arith::{RatFuncQ, Rational};
use crate::error::{Error, Result};
use crate::padic::PadicApprox;
use crate::qintegral::{bernoulli_number_padic, IntegralSettings, Measure};
use crate::qspecial::EulerTable;

/// Field operations shared by exact and p-adic values.
pub trait Scalar: Clone {
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn try_div(&self, other: &Self) -> Result<Self>;
}

impl Scalar for RatFuncQ {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn try_div(&self, other: &Self) -> Result<Self> {
        self.checked_div(other)
    }
}

impl Scalar for PadicApprox {
    fn add(&self, other: &Self) -> Self {
        PadicApprox::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        PadicApprox::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        PadicApprox::mul(self, other)
    }
    fn try_div(&self, other: &Self) -> Result<Self> {
        PadicApprox::try_div(self, other)
    }
}

/// Supplies the constants and sequences an identity side is built from.
pub trait Evaluator {
    type Value: Scalar;

    /// Maps a symbolic coefficient into the value domain.
    fn coefficient(&self, c: &RatFuncQ) -> Result<Self::Value>;

    /// `Ẽ_{n,q}`.
    fn euler(&self, n: usize) -> Result<Self::Value>;

    /// `∫ y^n dμ(y)` for the given measure: `Ẽ_{n,q}` (fermionic) or `B̃_{n,q}` (bosonic).
    fn moment(&self, measure: Measure, n: usize) -> Result<Self::Value>;

    fn zero(&self) -> Result<Self::Value> {
        self.coefficient(&RatFuncQ::zero())
    }
}

/// Exact evaluation in `Q(q)`.
#[derive(Clone)]
pub struct ExactEvaluator {
    table: Arc<EulerTable>,
    bernoulli_as_euler: bool,
}

impl ExactEvaluator {
    pub fn new(table: Arc<EulerTable>) -> Self {
        ExactEvaluator {
            table,
            bernoulli_as_euler: false,
        }
    }

    /// Replaces every bosonic moment by the matching fermionic one. The
    /// bosonic identities then collapse to their fermionic counterparts,
    /// which are checkable exactly.
    pub fn with_bernoulli_as_euler(table: Arc<EulerTable>) -> Self {
        ExactEvaluator {
            table,
            bernoulli_as_euler: true,
        }
    }

    pub fn table(&self) -> &EulerTable {
        &self.table
    }
}

impl Evaluator for ExactEvaluator {
    type Value = RatFuncQ;

    fn coefficient(&self, c: &RatFuncQ) -> Result<RatFuncQ> {
        Ok(c.clone())
    }

    fn euler(&self, n: usize) -> Result<RatFuncQ> {
        Ok(self.table.number(n))
    }

    fn moment(&self, measure: Measure, n: usize) -> Result<RatFuncQ> {
        match measure {
            Measure::Fermionic => self.euler(n),
            Measure::Bosonic if self.bernoulli_as_euler => self.euler(n),
            Measure::Bosonic => Err(Error::NotExact(
                "the q-Bernoulli number (no closed form in Q(q))".into(),
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BernoulliKey {
    pub n: usize,
    pub p: u64,
    pub q: String,
    pub k: i64,
}

/// Shared store of computed `B̃_{n,q}` values. Concurrent fills of the same
/// key compute the same deterministic value, so races are harmless.
#[derive(Debug, Default)]
pub struct BernoulliStore {
    map: Mutex<BTreeMap<BernoulliKey, PadicApprox>>,
}

impl BernoulliStore {
    pub fn new() -> Self {
        BernoulliStore::default()
    }

    pub fn key(n: usize, settings: &IntegralSettings, k: i64) -> BernoulliKey {
        BernoulliKey {
            n,
            p: settings.prime.get(),
            q: settings.q.to_string(),
            k,
        }
    }

    pub fn insert(&self, key: BernoulliKey, value: PadicApprox) {
        self.map.lock().expect("bernoulli store poisoned").insert(key, value);
    }

    pub fn get(&self, key: &BernoulliKey) -> Option<PadicApprox> {
        self.map.lock().expect("bernoulli store poisoned").get(key).cloned()
    }

    pub fn entries(&self) -> Vec<(BernoulliKey, PadicApprox)> {
        self.map
            .lock()
            .expect("bernoulli store poisoned")
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }

    pub fn get_or_compute(&self, n: usize, settings: &IntegralSettings, k: i64) -> Result<PadicApprox> {
        let key = Self::key(n, settings, k);
        if let Some(v) = self.get(&key) {
            return Ok(v);
        }
        let v = bernoulli_number_padic(n, settings, k)?;
        self.insert(key, v.clone());
        Ok(v)
    }
}

/// Evaluation at an embedded rational `q`, to a working absolute precision.
pub struct PadicEvaluator {
    table: Arc<EulerTable>,
    settings: IntegralSettings,
    work: i64,
    bernoulli: Arc<BernoulliStore>,
}

/// Extra digits used when embedding exact values, which cost nothing.
const EMBED_SLACK: i64 = 8;

impl PadicEvaluator {
    pub fn new(
        table: Arc<EulerTable>,
        settings: IntegralSettings,
        work: i64,
        bernoulli: Arc<BernoulliStore>,
    ) -> Self {
        PadicEvaluator {
            table,
            settings,
            work,
            bernoulli,
        }
    }

    pub fn settings(&self) -> &IntegralSettings {
        &self.settings
    }

    pub fn work(&self) -> i64 {
        self.work
    }

    fn embed(&self, r: &Rational) -> Result<PadicApprox> {
        PadicApprox::from_rational_abs(r, self.settings.prime, self.work + EMBED_SLACK)
    }
}

impl Evaluator for PadicEvaluator {
    type Value = PadicApprox;

    fn coefficient(&self, c: &RatFuncQ) -> Result<PadicApprox> {
        self.embed(&c.eval(&self.settings.q)?)
    }

    fn euler(&self, n: usize) -> Result<PadicApprox> {
        self.embed(&self.table.number(n).eval(&self.settings.q)?)
    }

    fn moment(&self, measure: Measure, n: usize) -> Result<PadicApprox> {
        match measure {
            Measure::Fermionic => self.euler(n),
            Measure::Bosonic => self.bernoulli.get_or_compute(n, &self.settings, self.work),
        }
    }
}
