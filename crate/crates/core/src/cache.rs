//! On-disk cache of Euler tables and q-Bernoulli values.
//!
//! Entries are keyed by `(kind, n, p, q, K)`. Loaded values rebuild into the
//! same canonical objects recomputation would produce, so a warm run and a
//! cold run give identical reports.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::arith::{PolyQ, RatFuncQ, Rational};
use crate::error::{Error, Result};
use crate::identities::{BernoulliKey, BernoulliStore};
use crate::padic::{PadicApprox, Prime};
use crate::qspecial::EulerTable;

pub const CACHE_SCHEMA: &str = "qeuler-cache/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub kind: String,
    pub n: usize,
    pub p: Option<u64>,
    pub q: String,
    #[serde(rename = "K")]
    pub k: Option<i64>,
    pub value: CachedValue,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CachedValue {
    /// Coefficients of numerator and denominator, ascending in `q`.
    RatFunc { num: Vec<String>, den: Vec<String> },
    PadicZero { abs_precision: i64 },
    Padic { valuation: i64, unit: String, precision: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheFile {
    pub schema: String,
    pub entries: Vec<CacheEntry>,
}

impl Default for CacheFile {
    fn default() -> Self {
        CacheFile {
            schema: CACHE_SCHEMA.to_string(),
            entries: Vec::new(),
        }
    }
}

fn poly_strings(p: &PolyQ) -> Vec<String> {
    p.coeffs().iter().map(ToString::to_string).collect()
}

fn poly_parse(v: &[String]) -> Result<PolyQ> {
    Ok(PolyQ::new(v.iter().map(|s| Rational::from_str(s)).collect::<Result<_>>()?))
}

fn encode_ratfunc(r: &RatFuncQ) -> CachedValue {
    CachedValue::RatFunc {
        num: poly_strings(r.num()),
        den: poly_strings(r.den()),
    }
}

fn encode_padic(a: &PadicApprox) -> CachedValue {
    match (a.valuation(), a.unit(), a.precision()) {
        (Some(valuation), Some(unit), Some(precision)) => CachedValue::Padic {
            valuation,
            unit: unit.to_string(),
            precision,
        },
        _ => CachedValue::PadicZero {
            abs_precision: a.abs_precision(),
        },
    }
}

fn decode_padic(v: &CachedValue, prime: Prime) -> Result<PadicApprox> {
    match v {
        CachedValue::PadicZero { abs_precision } => Ok(PadicApprox::zero(prime, *abs_precision)),
        CachedValue::Padic {
            valuation,
            unit,
            precision,
        } => {
            let u = BigUint::from_str(unit).map_err(|e| Error::Parse(format!("cached unit {unit:?}: {e}")))?;
            if *precision == 0 || (&u % prime.get()) == BigUint::default() {
                return Err(Error::Parse(format!("cached p-adic unit {unit} is not a unit")));
            }
            Ok(PadicApprox::from_residue(prime, &u, *precision, *valuation))
        }
        CachedValue::RatFunc { .. } => Err(Error::Parse("expected a p-adic cache value".into())),
    }
}

impl CacheFile {
    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Ok(CacheFile::default());
        }
        let text = fs::read_to_string(path)?;
        let file: CacheFile =
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("cache {}: {e}", path.display())))?;
        if file.schema != CACHE_SCHEMA {
            return Err(Error::Parse(format!("cache schema {:?} is not {CACHE_SCHEMA}", file.schema)));
        }
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }

    /// The symbolic Euler table, if the cache holds a gap-free prefix.
    pub fn euler_table(&self) -> Result<Option<EulerTable>> {
        let mut values: Vec<(usize, RatFuncQ)> = Vec::new();
        for e in self.entries.iter().filter(|e| e.kind == "euler") {
            if let CachedValue::RatFunc { num, den } = &e.value {
                values.push((e.n, RatFuncQ::new(poly_parse(num)?, poly_parse(den)?)?));
            }
        }
        values.sort_by_key(|(n, _)| *n);
        let prefix: Vec<RatFuncQ> = values
            .into_iter()
            .enumerate()
            .take_while(|(i, (n, _))| i == n)
            .map(|(_, (_, v))| v)
            .collect();
        if prefix.is_empty() {
            return Ok(None);
        }
        Ok(Some(EulerTable::from_values(prefix)?))
    }

    pub fn fill_bernoulli(&self, store: &BernoulliStore) -> Result<()> {
        for e in self.entries.iter().filter(|e| e.kind == "bernoulli") {
            let (Some(p), Some(k)) = (e.p, e.k) else {
                return Err(Error::Parse(format!("bernoulli cache entry {} lacks p or K", e.n)));
            };
            let prime = Prime::new(p)?;
            let key = BernoulliKey {
                n: e.n,
                p,
                q: e.q.clone(),
                k,
            };
            store.insert(key, decode_padic(&e.value, prime)?);
        }
        Ok(())
    }

    /// Replaces the cache contents with the given table and store, sorted by key.
    pub fn absorb(&mut self, table: &EulerTable, store: &BernoulliStore) {
        let mut entries: Vec<CacheEntry> = Vec::new();
        let upto = table.computed_up_to();
        if upto > 0 {
            for (n, v) in table.numbers_up_to(upto - 1).iter().enumerate() {
                entries.push(CacheEntry {
                    kind: "euler".into(),
                    n,
                    p: None,
                    q: "symbolic".into(),
                    k: None,
                    value: encode_ratfunc(v),
                });
            }
        }
        for (key, v) in store.entries() {
            entries.push(CacheEntry {
                kind: "bernoulli".into(),
                n: key.n,
                p: Some(key.p),
                q: key.q,
                k: Some(key.k),
                value: encode_padic(&v),
            });
        }
        self.entries = entries;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qintegral::{bernoulli_number_padic, IntegralSettings};

    #[test]
    fn euler_round_trip_is_exact() {
        let t = EulerTable::new();
        t.number(9);
        let mut c = CacheFile::default();
        c.absorb(&t, &BernoulliStore::new());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.json");
        c.save(&path).unwrap();
        let loaded = CacheFile::load(&path).unwrap();
        assert_eq!(loaded, c);
        let back = loaded.euler_table().unwrap().unwrap();
        assert_eq!(back.computed_up_to(), 10);
        for n in 0..=12 {
            assert_eq!(back.number(n), t.number(n), "n = {n}");
        }
    }

    #[test]
    fn bernoulli_round_trip_is_exact() {
        let p = Prime::new(3).unwrap();
        let s = IntegralSettings::with_default_q(p);
        let store = BernoulliStore::new();
        for n in 0..=3 {
            store.get_or_compute(n, &s, 4).unwrap();
        }
        let mut c = CacheFile::default();
        c.absorb(&EulerTable::new(), &store);
        let fresh = BernoulliStore::new();
        c.fill_bernoulli(&fresh).unwrap();
        for n in 0..=3 {
            let key = BernoulliStore::key(n, &s, 4);
            assert_eq!(fresh.get(&key).unwrap(), bernoulli_number_padic(n, &s, 4).unwrap());
        }
    }

    #[test]
    fn missing_file_is_empty() {
        let dir = tempfile::tempdir().unwrap();
        let c = CacheFile::load(&dir.path().join("nope.json")).unwrap();
        assert!(c.entries.is_empty());
        assert!(c.euler_table().unwrap().is_none());
    }

    #[test]
    fn bad_schema_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"schema":"other","entries":[]}"#).unwrap();
        assert!(CacheFile::load(&path).is_err());
    }
}
