//! Registry of the checkable identities and their verification.

pub mod eval;
pub mod sides;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::arith::{RatFuncQ, XPolyQ};
use crate::error::{Error, Result};
use crate::padic::PadicApprox;
use crate::qintegral::{integrate, Integrand, IntegralRequest, IntegralSettings, Measure};
use crate::qspecial::{beta_exact, q_bracket, two_q, EulerTable, QBase};

pub use eval::{BernoulliKey, BernoulliStore, Evaluator, ExactEvaluator, PadicEvaluator, Scalar};
pub use sides::Variant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[allow(non_camel_case_types)]
pub enum IdentityId {
    EQ6,
    THM1,
    THM1_COR,
    EQ103,
    THM2,
    THM3_PRINTED,
    THM3_CORRECTED,
    THM4,
    THM5_PRINTED,
    THM5_CORRECTED,
    THM6,
    COR7_PRINTED,
    COR7_CORRECTED,
    EQ7,
    EQ8,
}

/// Shape of the parameters an identity takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Signature {
    KM,
    K,
    N,
}

/// How an identity is checked when no p-adic run is requested.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    ExactPolynomial,
    ExactScalar,
    Padic,
}

impl IdentityId {
    pub const ALL: [IdentityId; 15] = [
        IdentityId::EQ6,
        IdentityId::THM1,
        IdentityId::THM1_COR,
        IdentityId::EQ103,
        IdentityId::THM2,
        IdentityId::THM3_PRINTED,
        IdentityId::THM3_CORRECTED,
        IdentityId::THM4,
        IdentityId::THM5_PRINTED,
        IdentityId::THM5_CORRECTED,
        IdentityId::THM6,
        IdentityId::COR7_PRINTED,
        IdentityId::COR7_CORRECTED,
        IdentityId::EQ7,
        IdentityId::EQ8,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityId::EQ6 => "EQ6",
            IdentityId::THM1 => "THM1",
            IdentityId::THM1_COR => "THM1_COR",
            IdentityId::EQ103 => "EQ103",
            IdentityId::THM2 => "THM2",
            IdentityId::THM3_PRINTED => "THM3_PRINTED",
            IdentityId::THM3_CORRECTED => "THM3_CORRECTED",
            IdentityId::THM4 => "THM4",
            IdentityId::THM5_PRINTED => "THM5_PRINTED",
            IdentityId::THM5_CORRECTED => "THM5_CORRECTED",
            IdentityId::THM6 => "THM6",
            IdentityId::COR7_PRINTED => "COR7_PRINTED",
            IdentityId::COR7_CORRECTED => "COR7_CORRECTED",
            IdentityId::EQ7 => "EQ7",
            IdentityId::EQ8 => "EQ8",
        }
    }

    pub fn signature(self) -> Signature {
        use IdentityId::*;
        match self {
            EQ6 | THM1 | THM4 | THM6 => Signature::KM,
            EQ7 | EQ8 => Signature::N,
            _ => Signature::K,
        }
    }

    pub fn check_kind(self) -> CheckKind {
        use IdentityId::*;
        match self {
            EQ6 | EQ103 | THM3_PRINTED | THM3_CORRECTED | EQ7 => CheckKind::ExactPolynomial,
            THM6 | COR7_PRINTED | COR7_CORRECTED => CheckKind::Padic,
            _ => CheckKind::ExactScalar,
        }
    }

    /// Typeset readings kept only to document that they differ.
    pub fn is_printed(self) -> bool {
        matches!(
            self,
            IdentityId::THM3_PRINTED | IdentityId::THM5_PRINTED | IdentityId::COR7_PRINTED
        )
    }

    /// Smallest admissible value of each parameter.
    fn lower_bound(self) -> i64 {
        use IdentityId::*;
        match self {
            EQ6 | EQ8 => 0,
            _ => 1,
        }
    }

    /// Parameter box used by `verify all`.
    pub fn default_ranges(self) -> ParamRanges {
        use IdentityId::*;
        let r = IndexRange::new;
        match self {
            EQ6 => ParamRanges::km(r(0, 8), r(0, 8)),
            THM1 => ParamRanges::km(r(1, 8), r(1, 8)),
            THM4 => ParamRanges::km(r(1, 6), r(1, 6)),
            THM6 => ParamRanges::km(r(1, 3), r(1, 3)),
            THM1_COR => ParamRanges::k(r(1, 6)),
            EQ103 => ParamRanges::k(r(1, 8)),
            THM2 => ParamRanges::k(r(1, 10)),
            THM3_PRINTED | THM3_CORRECTED | THM5_PRINTED | THM5_CORRECTED => ParamRanges::k(r(1, 6)),
            COR7_PRINTED | COR7_CORRECTED => ParamRanges::k(r(1, 3)),
            EQ7 => ParamRanges::n(r(1, 12)),
            EQ8 => ParamRanges::n(r(0, 12)),
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        IdentityId::ALL
            .into_iter()
            .find(|id| id.as_str() == upper)
            .ok_or_else(|| Error::Parse(format!("unknown identity {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Params {
    KM { k: i64, m: i64 },
    K { k: i64 },
    N { n: i64 },
}

impl Params {
    pub fn signature(self) -> Signature {
        match self {
            Params::KM { .. } => Signature::KM,
            Params::K { .. } => Signature::K,
            Params::N { .. } => Signature::N,
        }
    }

    fn values(self) -> Vec<i64> {
        match self {
            Params::KM { k, m } => vec![k, m],
            Params::K { k } => vec![k],
            Params::N { n } => vec![n],
        }
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Params::KM { k, m } => write!(f, "k={k},m={m}"),
            Params::K { k } => write!(f, "k={k}"),
            Params::N { n } => write!(f, "n={n}"),
        }
    }
}

/// Inclusive integer range `start..=end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexRange {
    pub start: i64,
    pub end: i64,
}

impl IndexRange {
    pub fn new(start: i64, end: i64) -> Self {
        IndexRange { start, end }
    }

    pub fn single(v: i64) -> Self {
        IndexRange { start: v, end: v }
    }

    pub fn is_empty(&self) -> bool {
        self.start > self.end
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.start..=self.end
    }

    /// Intersection with `[lo, ∞)`.
    pub fn clip_below(&self, lo: i64) -> Self {
        IndexRange::new(self.start.max(lo), self.end)
    }
}

impl fmt::Display for IndexRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

impl FromStr for IndexRange {
    type Err = Error;

    /// `"a..b"` (inclusive) or a single integer.
    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad range bound {t:?} in {s:?}")))
        };
        let r = match s.split_once("..") {
            Some((a, b)) => {
                let b = b.strip_prefix('=').unwrap_or(b);
                IndexRange::new(parse(a)?, parse(b)?)
            }
            None => IndexRange::single(parse(s)?),
        };
        if r.is_empty() {
            return Err(Error::Parse(format!("empty range {s:?}")));
        }
        Ok(r)
    }
}

/// The rectangle of parameters a grid run covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamRanges {
    KM { k: IndexRange, m: IndexRange },
    K { k: IndexRange },
    N { n: IndexRange },
}

impl ParamRanges {
    pub fn km(k: IndexRange, m: IndexRange) -> Self {
        ParamRanges::KM { k, m }
    }

    pub fn k(k: IndexRange) -> Self {
        ParamRanges::K { k }
    }

    pub fn n(n: IndexRange) -> Self {
        ParamRanges::N { n }
    }

    pub fn cells(&self) -> Vec<Params> {
        match self {
            ParamRanges::KM { k, m } => k
                .iter()
                .flat_map(|k| m.iter().map(move |m| Params::KM { k, m }))
                .collect(),
            ParamRanges::K { k } => k.iter().map(|k| Params::K { k }).collect(),
            ParamRanges::N { n } => n.iter().map(|n| Params::N { n }).collect(),
        }
    }

    fn signature(&self) -> Signature {
        match self {
            ParamRanges::KM { .. } => Signature::KM,
            ParamRanges::K { .. } => Signature::K,
            ParamRanges::N { .. } => Signature::N,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Padic { p: u64, q: String, precision: i64 },
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Padic { p, q, precision } => write!(f, "padic(p={p},q={q},K={precision})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Holds,
    Fails,
    HoldsToPrecision,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::HoldsToPrecision => "holds-to-precision",
        }
    }

    pub fn is_success(self) -> bool {
        !matches!(self, Verdict::Fails)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `left - right`, kept in full.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    RatFunc(RatFuncQ),
    XPoly(XPolyQ),
    Padic(PadicApprox),
}

impl Certificate {
    pub fn is_exact_zero(&self) -> bool {
        match self {
            Certificate::RatFunc(r) => r.is_zero(),
            Certificate::XPoly(x) => x.is_zero(),
            Certificate::Padic(_) => false,
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::RatFunc(r) => write!(f, "{r}"),
            Certificate::XPoly(x) => write!(f, "{x}"),
            Certificate::Padic(a) => write!(f, "{a}"),
        }
    }
}

/// An independent cross-check run alongside the main comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationResult {
    pub id: IdentityId,
    pub params: Params,
    pub mode: Mode,
    pub verdict: Verdict,
    pub certificate: Certificate,
    pub oracles: Vec<OracleCheck>,
    pub elapsed: Duration,
}

impl VerificationResult {
    pub fn oracles_pass(&self) -> bool {
        self.oracles.iter().all(|o| o.passed)
    }

    /// Whether this result should count against a run's success.
    pub fn is_failure(&self) -> bool {
        !self.id.is_printed() && (!self.verdict.is_success() || !self.oracles_pass())
    }
}

/// The p-adic setting used for p-adic verdicts and numeric cross-checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicSetup {
    pub settings: IntegralSettings,
    /// Requested absolute precision `K`.
    pub precision: i64,
}

impl PadicSetup {
    pub fn new(settings: IntegralSettings, precision: i64) -> Result<Self> {
        if precision < 1 {
            return Err(Error::Domain(format!("precision K = {precision} must be at least 1")));
        }
        Ok(PadicSetup { settings, precision })
    }

    pub fn mode(&self) -> Mode {
        Mode::Padic {
            p: self.settings.prime.get(),
            q: self.settings.q.to_string(),
            precision: self.precision,
        }
    }
}

/// Extra working digits tried in turn before a p-adic check gives up.
pub const ESCALATION: [i64; 3] = [2, 4, 7];

#[derive(Clone)]
pub struct VerifyContext {
    pub table: Arc<EulerTable>,
    pub padic: PadicSetup,
    /// Run exact-scalar identities p-adically as well.
    pub prefer_padic: bool,
    /// Run the independent cross-checks.
    pub oracles: bool,
    pub bernoulli: Arc<BernoulliStore>,
}

impl VerifyContext {
    pub fn new(padic: PadicSetup) -> Self {
        VerifyContext {
            table: Arc::new(EulerTable::new()),
            padic,
            prefer_padic: false,
            oracles: true,
            bernoulli: Arc::new(BernoulliStore::new()),
        }
    }

    pub fn with_table(mut self, table: Arc<EulerTable>) -> Self {
        self.table = table;
        self
    }

    pub fn with_bernoulli(mut self, store: Arc<BernoulliStore>) -> Self {
        self.bernoulli = store;
        self
    }

    fn exact(&self) -> ExactEvaluator {
        ExactEvaluator::new(self.table.clone())
    }

    fn padic_evaluator(&self, work: i64) -> PadicEvaluator {
        PadicEvaluator::new(
            self.table.clone(),
            self.padic.settings.clone(),
            work,
            self.bernoulli.clone(),
        )
    }

    pub fn mode_for(&self, id: IdentityId) -> Mode {
        match id.check_kind() {
            CheckKind::Padic => self.padic.mode(),
            CheckKind::ExactScalar if self.prefer_padic && id != IdentityId::EQ8 => self.padic.mode(),
            _ => Mode::Exact,
        }
    }
}

fn check_params(id: IdentityId, params: Params) -> Result<()> {
    if params.signature() != id.signature() {
        return Err(Error::Domain(format!("{id} does not take parameters {params}")));
    }
    let lo = id.lower_bound();
    if params.values().iter().any(|&v| v < lo) {
        return Err(Error::Domain(format!("{id} needs every parameter >= {lo}, got {params}")));
    }
    Ok(())
}

fn exact_verdict(zero: bool) -> Verdict {
    if zero {
        Verdict::Holds
    } else {
        Verdict::Fails
    }
}

/// Classifies a p-adic difference; `None` means the available digits cannot decide.
fn padic_verdict(diff: &PadicApprox, k: i64) -> Option<Verdict> {
    match diff.valuation() {
        Some(v) if v >= k => Some(Verdict::HoldsToPrecision),
        Some(_) => Some(Verdict::Fails),
        None if diff.abs_precision() >= k => Some(Verdict::HoldsToPrecision),
        None => None,
    }
}

fn oracle(name: &'static str, passed: bool, detail: String) -> OracleCheck {
    OracleCheck { name, passed, detail }
}

fn exact_pair_oracle(name: &'static str, got: &(RatFuncQ, RatFuncQ), want: &(RatFuncQ, RatFuncQ)) -> OracleCheck {
    let dl = &got.0 - &want.0;
    let dr = &got.1 - &want.1;
    oracle(name, dl.is_zero() && dr.is_zero(), format!("left diff {dl}; right diff {dr}"))
}

fn k_of(params: Params) -> i64 {
    match params {
        Params::KM { k, .. } | Params::K { k } | Params::N { n: k } => k,
    }
}

fn km_of(params: Params) -> (i64, i64) {
    match params {
        Params::KM { k, m } => (k, m),
        _ => unreachable!("checked signature"),
    }
}

fn variant_of(id: IdentityId) -> Variant {
    if id.is_printed() {
        Variant::Printed
    } else {
        Variant::Corrected
    }
}

/// Sides of a scalar identity under any evaluator.
fn scalar_sides<E: Evaluator>(id: IdentityId, params: Params, ev: &E) -> Result<(E::Value, E::Value)> {
    use IdentityId::*;
    match id {
        THM1 => {
            let (k, m) = km_of(params);
            sides::sides_thm1(ev, k, m)
        }
        THM1_COR => sides::sides_thm1_cor(ev, k_of(params)),
        THM2 => sides::sides_thm2(ev, k_of(params)),
        THM4 => {
            let (k, m) = km_of(params);
            sides::sides_thm4(ev, k, m)
        }
        THM5_PRINTED | THM5_CORRECTED => sides::sides_thm5(ev, k_of(params), variant_of(id)),
        THM6 => {
            let (k, m) = km_of(params);
            sides::sides_thm6(ev, k, m)
        }
        COR7_PRINTED | COR7_CORRECTED => sides::sides_cor7(ev, k_of(params), variant_of(id)),
        other => Err(Error::InternalInconsistency(format!("{other} is not a scalar identity"))),
    }
}

fn polynomial_sides(id: IdentityId, params: Params, table: &EulerTable) -> (XPolyQ, XPolyQ) {
    use IdentityId::*;
    match (id, params) {
        (EQ6, Params::KM { k, m }) => sides::sides_eq6(table, k as usize, m as usize),
        (EQ103, Params::K { k }) => sides::sides_eq103(table, k as usize),
        (THM3_PRINTED | THM3_CORRECTED, Params::K { k }) => sides::sides_thm3(table, k as usize, variant_of(id)),
        (EQ7, Params::N { n }) => sides::sides_eq7(table, n as usize),
        _ => unreachable!("checked signature"),
    }
}

/// Runs the p-adic comparison, raising working precision until the verdict is decided.
fn padic_compare(id: IdentityId, params: Params, ctx: &VerifyContext) -> Result<(Verdict, PadicApprox, i64)> {
    let k = ctx.padic.precision;
    let mut last = None;
    for extra in ESCALATION {
        let work = k + extra;
        let ev = ctx.padic_evaluator(work);
        let (l, r) = scalar_sides(id, params, &ev)?;
        let diff = l.sub(&r);
        if let Some(verdict) = padic_verdict(&diff, k) {
            return Ok((verdict, diff, work));
        }
        last = Some(diff);
    }
    Err(Error::PrecisionExhausted(format!(
        "{id} at {params}: difference {} still undecided to {k} digits",
        last.expect("at least one attempt")
    )))
}

/// The polynomial whose integral one side of a moment identity equals, and which side.
fn moment_integrand(id: IdentityId, params: Params) -> Option<(XPolyQ, Measure, Side)> {
    use IdentityId::*;
    match id {
        THM4 => {
            let (k, m) = km_of(params);
            Some((sides::master_integrand(k as usize, m as usize), Measure::Fermionic, Side::Right))
        }
        THM6 => {
            let (k, m) = km_of(params);
            Some((sides::master_integrand(k as usize, m as usize), Measure::Bosonic, Side::Left))
        }
        THM5_PRINTED | THM5_CORRECTED => {
            Some((sides::odd_integrand(k_of(params) as usize), Measure::Fermionic, Side::Left))
        }
        COR7_PRINTED | COR7_CORRECTED => {
            Some((sides::odd_integrand(k_of(params) as usize), Measure::Bosonic, Side::Left))
        }
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

/// Direct Riemann-sum integral of an x-polynomial at the embedded `q`.
pub fn numeric_integral(poly: &XPolyQ, measure: Measure, setup: &PadicSetup) -> Result<PadicApprox> {
    let q = &setup.settings.q;
    let coeffs = poly
        .coeffs()
        .iter()
        .map(|c| c.eval(q))
        .collect::<Result<Vec<_>>>()?;
    let req = IntegralRequest {
        measure,
        integrand: Integrand::new(coeffs),
        target: setup.precision,
        settings: setup.settings.clone(),
    };
    Ok(integrate(&req)?.into_converged(setup.precision)?.value)
}

fn integral_oracle(
    id: IdentityId,
    params: Params,
    ctx: &VerifyContext,
    sides_at: impl FnOnce(&PadicEvaluator) -> Result<(PadicApprox, PadicApprox)>,
) -> Result<Option<OracleCheck>> {
    let Some((poly, measure, side)) = moment_integrand(id, params) else {
        return Ok(None);
    };
    let k = ctx.padic.precision;
    let direct = numeric_integral(&poly, measure, &ctx.padic)?;
    let ev = ctx.padic_evaluator(k + ESCALATION[0]);
    let (l, r) = sides_at(&ev)?;
    let value = match side {
        Side::Left => l,
        Side::Right => r,
    };
    let d = value.distance(&direct);
    let name = match measure {
        Measure::Fermionic => "fermionic-riemann-sum",
        Measure::Bosonic => "bosonic-riemann-sum",
    };
    Ok(Some(oracle(
        name,
        d.reaches(k),
        format!("side {value}; direct {direct}; distance {d}"),
    )))
}

fn exact_oracles(id: IdentityId, params: Params, ctx: &VerifyContext) -> Result<Vec<OracleCheck>> {
    use IdentityId::*;
    let table = &*ctx.table;
    let ev = ctx.exact();
    let mut out = Vec::new();
    match id {
        THM1 => {
            let (k, m) = km_of(params);
            let via = sides::thm1_via_unit_interval(table, k as usize, m as usize)?;
            out.push(exact_pair_oracle("unit-interval-route", &sides::sides_thm1(&ev, k, m)?, &via));
        }
        THM1_COR => {
            let k = k_of(params);
            out.push(exact_pair_oracle(
                "general-case-at-m=k+1",
                &sides::sides_thm1_cor(&ev, k)?,
                &sides::sides_thm1(&ev, k, k + 1)?,
            ));
        }
        THM2 => {
            let k = k_of(params);
            let got = sides::sides_thm2(&ev, k)?;
            let via = sides::thm2_via_unit_interval(table, k as usize)?;
            out.push(exact_pair_oracle("unit-interval-route", &got, &via));
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let beta = RatFuncQ::from_rational(beta_exact(k + 1, k + 1)?);
            let from_beta = (&two_q() * &beta)
                .scale(&sign.into())
                .checked_div(&-q_bracket(2, QBase::Reciprocal))?;
            let d = &got.1 - &from_beta;
            out.push(oracle("beta-function", d.is_zero(), format!("diff {d}")));
        }
        EQ103 => {
            let k = k_of(params);
            let l103 = sides::eq103_combination(k).polynomial(table);
            let l6 = sides::eq6_combination(k, k).polynomial(table);
            let d = &l103 - &l6;
            out.push(oracle("regrouping", d.is_zero(), format!("diff {d}")));
        }
        THM3_PRINTED | THM3_CORRECTED => {
            let k = k_of(params);
            let built = &sides::eq6_combination(k, k + 1).polynomial(table)
                + &sides::eq103_combination(k)
                    .polynomial(table)
                    .scale(&two_q().recip()?);
            let d = &sides::thm3_combination(k, variant_of(id)).polynomial(table) - &built;
            out.push(oracle("construction", d.is_zero(), format!("diff {d}")));
        }
        EQ8 => {
            let n = k_of(params) as usize;
            let ok = table.poly_integral01(n).is_ok();
            out.push(oracle("both-routes", ok, String::new()));
        }
        _ => {}
    }
    if matches!(id, THM4 | THM5_PRINTED | THM5_CORRECTED) {
        if let Some(check) = integral_oracle(id, params, ctx, |pev| scalar_sides(id, params, pev))? {
            out.push(check);
        }
    }
    Ok(out)
}

/// Verifies one identity at one parameter point.
pub fn verify(id: IdentityId, params: Params, ctx: &VerifyContext) -> Result<VerificationResult> {
    check_params(id, params)?;
    let start = Instant::now();
    let mode = ctx.mode_for(id);
    let (verdict, certificate) = match (&mode, id.check_kind()) {
        (Mode::Exact, CheckKind::ExactPolynomial) => {
            let (l, r) = polynomial_sides(id, params, &ctx.table);
            let d = &l - &r;
            (exact_verdict(d.is_zero()), Certificate::XPoly(d))
        }
        (Mode::Exact, _) if id == IdentityId::EQ8 => {
            let (l, r) = sides::sides_eq8(&ctx.table, k_of(params) as usize);
            let d = &l - &r;
            (exact_verdict(d.is_zero()), Certificate::RatFunc(d))
        }
        (Mode::Exact, _) => {
            let (l, r) = scalar_sides(id, params, &ctx.exact())?;
            let d = &l - &r;
            (exact_verdict(d.is_zero()), Certificate::RatFunc(d))
        }
        (Mode::Padic { .. }, _) => {
            let (v, d, _) = padic_compare(id, params, ctx)?;
            (v, Certificate::Padic(d))
        }
    };
    let oracles = if !ctx.oracles {
        Vec::new()
    } else if id.check_kind() == CheckKind::Padic {
        integral_oracle(id, params, ctx, |pev| scalar_sides(id, params, pev))?
            .into_iter()
            .collect()
    } else {
        exact_oracles(id, params, ctx)?
    };
    Ok(VerificationResult {
        id,
        params,
        mode,
        verdict,
        certificate,
        oracles,
        elapsed: start.elapsed(),
    })
}

/// One cell of a grid run; errors are kept per cell.
#[derive(Debug)]
pub struct GridEntry {
    pub id: IdentityId,
    pub params: Params,
    pub outcome: Result<VerificationResult>,
}

impl GridEntry {
    pub fn is_failure(&self) -> bool {
        match &self.outcome {
            Ok(r) => r.is_failure(),
            Err(_) => !self.id.is_printed(),
        }
    }
}

/// Verifies every cell of a parameter rectangle, in parallel; entries come back sorted by parameters.
pub fn verify_grid(id: IdentityId, ranges: &ParamRanges, ctx: &VerifyContext) -> Result<Vec<GridEntry>> {
    if ranges.signature() != id.signature() {
        return Err(Error::Domain(format!("{id} does not take a {:?} parameter range", ranges.signature())));
    }
    let mut entries: Vec<GridEntry> = ranges
        .cells()
        .into_par_iter()
        .map(|params| GridEntry {
            id,
            params,
            outcome: verify(id, params, ctx),
        })
        .collect();
    entries.sort_by_key(|e| (e.id, e.params));
    Ok(entries)
}

/// Restricts user ranges to an identity's admissible parameters.
pub fn clip_ranges(id: IdentityId, ranges: ParamRanges) -> Option<ParamRanges> {
    let lo = id.lower_bound();
    let clipped = match ranges {
        ParamRanges::KM { k, m } => ParamRanges::km(k.clip_below(lo), m.clip_below(lo)),
        ParamRanges::K { k } => ParamRanges::k(k.clip_below(lo)),
        ParamRanges::N { n } => ParamRanges::n(n.clip_below(lo)),
    };
    let empty = match clipped {
        ParamRanges::KM { k, m } => k.is_empty() || m.is_empty(),
        ParamRanges::K { k } => k.is_empty(),
        ParamRanges::N { n } => n.is_empty(),
    };
    (!empty).then_some(clipped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Prime;

    fn ctx(p: u64, k: i64) -> VerifyContext {
        let settings = IntegralSettings::with_default_q(Prime::new(p).unwrap());
        VerifyContext::new(PadicSetup::new(settings, k).unwrap())
    }

    #[test]
    fn ids_round_trip() {
        for id in IdentityId::ALL {
            assert_eq!(id.as_str().parse::<IdentityId>().unwrap(), id);
        }
        assert!("THM9".parse::<IdentityId>().is_err());
        assert_eq!("thm1_cor".parse::<IdentityId>().unwrap(), IdentityId::THM1_COR);
    }

    #[test]
    fn ranges_parse() {
        assert_eq!("0..8".parse::<IndexRange>().unwrap(), IndexRange::new(0, 8));
        assert_eq!("3".parse::<IndexRange>().unwrap(), IndexRange::single(3));
        assert!("5..2".parse::<IndexRange>().is_err());
        assert!("a..2".parse::<IndexRange>().is_err());
    }

    #[test]
    fn eq6_cell() {
        let r = verify(IdentityId::EQ6, Params::KM { k: 3, m: 2 }, &ctx(3, 4)).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.certificate.is_exact_zero());
    }

    #[test]
    fn eq7_at_twelve() {
        let r = verify(IdentityId::EQ7, Params::N { n: 12 }, &ctx(3, 4)).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn signature_mismatch_rejected() {
        let c = ctx(3, 4);
        assert!(verify(IdentityId::EQ6, Params::K { k: 1 }, &c).is_err());
        assert!(verify(IdentityId::THM1, Params::KM { k: 0, m: 1 }, &c).is_err());
        assert!(verify_grid(IdentityId::EQ7, &ParamRanges::k(IndexRange::new(1, 2)), &c).is_err());
    }

    #[test]
    fn printed_odd_identity_is_flagged() {
        let r = verify(IdentityId::THM3_PRINTED, Params::K { k: 1 }, &ctx(3, 4)).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!(!r.is_failure());
        let c = verify(IdentityId::THM3_CORRECTED, Params::K { k: 1 }, &ctx(3, 4)).unwrap();
        assert_eq!(c.verdict, Verdict::Holds);
        assert!(c.oracles_pass());
    }

    #[test]
    fn thm4_with_numeric_route() {
        let r = verify(IdentityId::THM4, Params::KM { k: 2, m: 1 }, &ctx(3, 5)).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.oracles_pass(), "{:?}", r.oracles);
    }

    #[test]
    fn thm5_padic_second_witness() {
        let mut c = ctx(3, 5);
        c.prefer_padic = true;
        let r = verify(IdentityId::THM5_CORRECTED, Params::K { k: 2 }, &c).unwrap();
        assert_eq!(r.verdict, Verdict::HoldsToPrecision);
        assert!(r.oracles_pass(), "{:?}", r.oracles);
    }

    #[test]
    fn thm6_small_cell() {
        let r = verify(IdentityId::THM6, Params::KM { k: 1, m: 1 }, &ctx(3, 4)).unwrap();
        assert_eq!(r.verdict, Verdict::HoldsToPrecision, "{}", r.certificate);
        assert!(r.oracles_pass(), "{:?}", r.oracles);
    }

    #[test]
    fn grid_is_sorted_and_complete() {
        let ranges = ParamRanges::km(IndexRange::new(1, 3), IndexRange::new(1, 2));
        let g = verify_grid(IdentityId::THM1, &ranges, &ctx(3, 4)).unwrap();
        assert_eq!(g.len(), 6);
        let params: Vec<Params> = g.iter().map(|e| e.params).collect();
        let mut sorted = params.clone();
        sorted.sort();
        assert_eq!(params, sorted);
        assert!(g.iter().all(|e| !e.is_failure()));
    }

    #[test]
    fn clipping() {
        let r = clip_ranges(IdentityId::THM1, ParamRanges::km(IndexRange::new(0, 2), IndexRange::new(0, 0)));
        assert!(r.is_none());
        let r = clip_ranges(IdentityId::THM2, ParamRanges::k(IndexRange::new(0, 2))).unwrap();
        assert_eq!(r, ParamRanges::k(IndexRange::new(1, 2)));
    }
}
