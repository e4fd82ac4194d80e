//! Command-line front end.
//!
//! Exit codes: 0 on success (printed-variant failures are informational),
//! 1 when a corrected or exact identity fails or a computation errors, 2 on
//! usage or configuration errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::arith::{PolyQ, Rational};
use crate::cache::CacheFile;
use crate::error::{Error, Result};
use crate::identities::{
    clip_ranges, verify_grid, BernoulliStore, GridEntry, IdentityId, IndexRange, PadicSetup, ParamRanges,
    Signature, VerifyContext,
};
use crate::padic::{PadicDistance, Prime};
use crate::qintegral::{integrate, IntegralRequest, IntegralSettings, Measure};
use crate::qspecial::EulerTable;
use crate::report::{Format, Report, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "qeuler", version, about = "q-Euler numbers, p-adic q-integrals and identity checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Odd prime for p-adic work.
    #[arg(long, global = true)]
    pub p: Option<u64>,
    /// q as "1+p", an integer, or "a/b".
    #[arg(long, global = true)]
    pub q: Option<String>,
    /// Requested p-adic digits.
    #[arg(long = "K", global = true)]
    pub precision: Option<i64>,
    #[arg(long, global = true, default_value_t = 4)]
    pub guard: u32,
    /// Largest Riemann-sum level.
    #[arg(long = "n-max", global = true, default_value_t = 12)]
    pub n_max: u32,
    #[arg(long, global = true, default_value = "pretty")]
    pub format: String,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Cache file for Euler tables and q-Bernoulli values.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    #[arg(long = "no-cache", global = true)]
    pub no_cache: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Table of q-Euler or q-Bernoulli numbers.
    Numbers {
        #[arg(value_enum)]
        kind: NumberKind,
        #[arg(long, default_value = "0..10")]
        n: String,
        /// Evaluate at this rational q instead of printing rational functions.
        #[arg(long = "at-q")]
        at_q: Option<String>,
    },
    /// Table of q-Euler polynomials.
    Poly {
        #[arg(long, default_value = "0..5")]
        n: String,
        #[arg(long = "at-q")]
        at_q: Option<String>,
    },
    /// Verify one identity, or "all", over a parameter grid.
    Verify {
        identity: String,
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        n: Option<String>,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        /// Skip the independent cross-checks.
        #[arg(long = "no-oracles")]
        no_oracles: bool,
    },
    /// Adaptive p-adic q-integral of (x0 + y)^n.
    Integrate {
        #[arg(value_enum)]
        kind: MeasureArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "0")]
        x0: String,
    },
    /// Re-render a saved JSON report after checking its hash.
    Report { input: PathBuf },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum NumberKind {
    Euler,
    Bernoulli,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    /// Symbolic where possible; q-Bernoulli identities stay p-adic.
    Exact,
    /// Scalar identities are also evaluated p-adically.
    Padic,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureArg {
    Bosonic,
    Fermionic,
}

impl From<MeasureArg> for Measure {
    fn from(m: MeasureArg) -> Measure {
        match m {
            MeasureArg::Bosonic => Measure::Bosonic,
            MeasureArg::Fermionic => Measure::Fermionic,
        }
    }
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn usage(e: Error) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: e.to_string(),
    }
}

fn runtime(e: Error) -> Failure {
    Failure {
        code: EXIT_FAILURE,
        message: e.to_string(),
    }
}

/// Parses `q`: `"1+p"`, an integer, or `"a/b"`.
pub fn parse_q(s: &str, p: Option<u64>) -> Result<Rational> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact == "1+p" || compact == "p+1" {
        let p = p.ok_or_else(|| Error::Parse("q = 1+p needs --p".into()))?;
        return Ok(Rational::from(p as i64 + 1));
    }
    compact.parse::<Rational>()
}

struct Padic {
    settings: IntegralSettings,
    precision: i64,
}

impl Common {
    fn format(&self) -> Result<Format> {
        self.format.parse()
    }

    /// The p-adic setting; `p` defaults to 3 unless `required`.
    fn padic(&self, required: bool) -> Result<Padic> {
        let p = match (self.p, required) {
            (Some(p), _) => p,
            (None, false) => 3,
            (None, true) => return Err(Error::Parse("this command needs --p".into())),
        };
        let prime = Prime::new(p)?;
        let q = parse_q(self.q.as_deref().unwrap_or("1+p"), Some(p))?;
        let mut settings = IntegralSettings::new(prime, q)?;
        settings.guard = self.guard.max(2);
        settings.max_level = self.n_max;
        let precision = self.precision.unwrap_or(4);
        if precision < 1 {
            return Err(Error::Parse(format!("--K must be at least 1, got {precision}")));
        }
        if self.n_max < 1 {
            return Err(Error::Parse("--n-max must be at least 1".into()));
        }
        Ok(Padic { settings, precision })
    }

    fn echo_padic(&self, pa: &Padic, config: &mut BTreeMap<String, String>) {
        config.insert("p".into(), pa.settings.prime.to_string());
        config.insert("q".into(), pa.settings.q.to_string());
        config.insert("K".into(), pa.precision.to_string());
        config.insert("guard".into(), pa.settings.guard.to_string());
        config.insert("n_max".into(), pa.settings.max_level.to_string());
    }
}

fn range_arg(s: &str, name: &str) -> Result<IndexRange> {
    s.parse::<IndexRange>()
        .map_err(|e| Error::Parse(format!("--{name}: {e}")))
}

/// Cache state for one run.
struct Cached {
    path: Option<PathBuf>,
    file: CacheFile,
    table: Arc<EulerTable>,
    bernoulli: Arc<BernoulliStore>,
}

impl Cached {
    fn open(common: &Common) -> Result<Self> {
        let path = if common.no_cache { None } else { common.cache.clone() };
        let file = match &path {
            Some(p) => CacheFile::load(p)?,
            None => CacheFile::default(),
        };
        let table = Arc::new(file.euler_table()?.unwrap_or_default());
        let bernoulli = Arc::new(BernoulliStore::new());
        file.fill_bernoulli(&bernoulli)?;
        Ok(Cached {
            path,
            file,
            table,
            bernoulli,
        })
    }

    fn save(mut self) -> Result<()> {
        if let Some(path) = self.path.take() {
            self.file.absorb(&self.table, &self.bernoulli);
            self.file.save(&path)?;
        }
        Ok(())
    }
}

fn numbers_report(
    common: &Common,
    kind: NumberKind,
    n: &str,
    at_q: Option<&str>,
    cached: &Cached,
) -> std::result::Result<Report, Failure> {
    let range = range_arg(n, "n").map_err(usage)?;
    if range.start < 0 {
        return Err(usage(Error::Parse("--n must be non-negative".into())));
    }
    let mut config = BTreeMap::new();
    config.insert("kind".into(), format!("{kind:?}").to_lowercase());
    config.insert("n".into(), range.to_string());
    match kind {
        NumberKind::Euler => {
            let q0 = at_q.map(|s| parse_q(s, common.p)).transpose().map_err(usage)?;
            if let Some(q0) = &q0 {
                config.insert("at_q".into(), q0.to_string());
            }
            let mut rows = Vec::new();
            for i in range.iter() {
                let v = cached.table.number(i as usize);
                let cell = match &q0 {
                    Some(q0) => v.eval(q0).map_err(runtime)?.to_string(),
                    None => v.to_string(),
                };
                rows.push(vec![i.to_string(), cell]);
            }
            Ok(Report::new("numbers", config).with_table(Table {
                columns: vec!["n".into(), "value".into()],
                rows,
            }))
        }
        NumberKind::Bernoulli => {
            if at_q.is_some() {
                return Err(usage(Error::Parse("--at-q applies to euler numbers only".into())));
            }
            let pa = common.padic(true).map_err(usage)?;
            common.echo_padic(&pa, &mut config);
            let mut rows = Vec::new();
            let mut warnings = Vec::new();
            for i in range.iter() {
                let n = i as usize;
                let key = BernoulliStore::key(n, &pa.settings, pa.precision);
                let (value, achieved) = match cached.bernoulli.get(&key) {
                    Some(v) => (v, pa.precision),
                    None => {
                        let req = IntegralRequest::monomial(
                            Measure::Bosonic,
                            n,
                            &Rational::zero(),
                            pa.precision,
                            pa.settings.clone(),
                        );
                        let res = integrate(&req).map_err(runtime)?;
                        if res.converged {
                            cached.bernoulli.insert(key, res.value.clone());
                        } else {
                            warnings.push(format!(
                                "n={n}: not converged after {} levels, {} of {} digits",
                                res.levels_used, res.achieved_precision, pa.precision
                            ));
                        }
                        (res.value, res.achieved_precision)
                    }
                };
                let note = if n == 0 { "exact at every level" } else { "" };
                rows.push(vec![
                    n.to_string(),
                    value.valuation().map_or("inf".into(), |v| v.to_string()),
                    value.unit().map_or("0".into(), |u| u.to_string()),
                    achieved.to_string(),
                    value.to_string(),
                    note.to_string(),
                ]);
            }
            let mut report = Report::new("numbers", config).with_table(Table {
                columns: ["n", "valuation", "unit", "precision", "value", "note"]
                    .map(String::from)
                    .to_vec(),
                rows,
            });
            report.warnings = warnings;
            Ok(report)
        }
    }
}

fn poly_report(common: &Common, n: &str, at_q: Option<&str>, cached: &Cached) -> std::result::Result<Report, Failure> {
    let range = range_arg(n, "n").map_err(usage)?;
    if range.start < 0 {
        return Err(usage(Error::Parse("--n must be non-negative".into())));
    }
    let q0 = at_q.map(|s| parse_q(s, common.p)).transpose().map_err(usage)?;
    let mut config = BTreeMap::new();
    config.insert("n".into(), range.to_string());
    if let Some(q0) = &q0 {
        config.insert("at_q".into(), q0.to_string());
    }
    let mut rows = Vec::new();
    for i in range.iter() {
        let poly = cached.table.poly(i as usize);
        let cell = match &q0 {
            Some(q0) => {
                let coeffs = poly
                    .coeffs()
                    .iter()
                    .map(|c| c.eval(q0))
                    .collect::<Result<Vec<_>>>()
                    .map_err(runtime)?;
                PolyQ::new(coeffs).fmt_with("x")
            }
            None => poly.to_string(),
        };
        rows.push(vec![i.to_string(), cell]);
    }
    Ok(Report::new("poly", config).with_table(Table {
        columns: vec!["n".into(), "polynomial".into()],
        rows,
    }))
}

/// Grid parameters for one identity from the optional user ranges.
fn ranges_for(
    id: IdentityId,
    k: Option<IndexRange>,
    m: Option<IndexRange>,
    n: Option<IndexRange>,
    strict: bool,
) -> Result<Option<ParamRanges>> {
    let defaults = id.default_ranges();
    let given = match (id.signature(), defaults) {
        (Signature::KM, ParamRanges::KM { k: dk, m: dm }) => {
            if strict && n.is_some() {
                return Err(Error::Parse(format!("{id} takes --k and --m, not --n")));
            }
            ParamRanges::km(k.unwrap_or(dk), m.unwrap_or(dm))
        }
        (Signature::K, ParamRanges::K { k: dk }) => {
            if strict && (m.is_some() || n.is_some()) {
                return Err(Error::Parse(format!("{id} takes --k only")));
            }
            ParamRanges::k(k.unwrap_or(dk))
        }
        (Signature::N, ParamRanges::N { n: dn }) => {
            if strict && (k.is_some() || m.is_some()) {
                return Err(Error::Parse(format!("{id} takes --n only")));
            }
            ParamRanges::n(n.unwrap_or(dn))
        }
        _ => unreachable!("default ranges match the signature"),
    };
    if strict {
        let clipped = clip_ranges(id, given);
        if clipped != Some(given) {
            return Err(Error::Parse(format!("parameters out of range for {id}")));
        }
        return Ok(clipped);
    }
    Ok(clip_ranges(id, given))
}

fn verify_report(
    common: &Common,
    identity: &str,
    ranges: [Option<&str>; 3],
    mode: ModeArg,
    no_oracles: bool,
    cached: &Cached,
) -> std::result::Result<Report, Failure> {
    let parse = |s: Option<&str>, name| s.map(|s| range_arg(s, name)).transpose();
    let k = parse(ranges[0], "k").map_err(usage)?;
    let m = parse(ranges[1], "m").map_err(usage)?;
    let n = parse(ranges[2], "n").map_err(usage)?;
    let all = identity.eq_ignore_ascii_case("all");
    let ids: Vec<IdentityId> = if all {
        IdentityId::ALL.to_vec()
    } else {
        vec![identity.parse().map_err(usage)?]
    };
    let mut plan = Vec::new();
    for id in ids {
        if let Some(r) = ranges_for(id, k, m, n, !all).map_err(usage)? {
            plan.push((id, r));
        }
    }
    let pa = common.padic(false).map_err(usage)?;
    let setup = PadicSetup::new(pa.settings.clone(), pa.precision).map_err(usage)?;
    let mut ctx = VerifyContext::new(setup)
        .with_table(cached.table.clone())
        .with_bernoulli(cached.bernoulli.clone());
    ctx.prefer_padic = mode == ModeArg::Padic;
    ctx.oracles = !no_oracles;

    let mut config = BTreeMap::new();
    config.insert("identity".into(), if all { "all".into() } else { identity.to_ascii_uppercase() });
    config.insert("mode".into(), format!("{mode:?}").to_lowercase());
    config.insert("oracles".into(), (!no_oracles).to_string());
    for (name, r) in [("k", k), ("m", m), ("n", n)] {
        if let Some(r) = r {
            config.insert(name.into(), r.to_string());
        }
    }
    common.echo_padic(&pa, &mut config);

    let mut entries: Vec<GridEntry> = Vec::new();
    for (id, r) in &plan {
        entries.extend(verify_grid(*id, r, &ctx).map_err(usage)?);
    }
    Ok(Report::new("verify", config).with_entries(&entries))
}

fn integrate_report(common: &Common, kind: MeasureArg, n: usize, x0: &str) -> std::result::Result<Report, Failure> {
    let pa = common.padic(true).map_err(usage)?;
    let x0: Rational = x0.parse().map_err(usage)?;
    let mut config = BTreeMap::new();
    config.insert("measure".into(), Measure::from(kind).name().to_string());
    config.insert("n".into(), n.to_string());
    config.insert("x0".into(), x0.to_string());
    common.echo_padic(&pa, &mut config);
    let req = IntegralRequest::monomial(kind.into(), n, &x0, pa.precision, pa.settings.clone());
    let res = integrate(&req).map_err(runtime)?;
    let mut rows: Vec<Vec<String>> = res
        .trace
        .iter()
        .map(|r| {
            vec![
                r.level.to_string(),
                r.value.to_string(),
                r.distance.map_or("-".into(), |d: PadicDistance| d.to_string()),
            ]
        })
        .collect();
    rows.push(vec![
        "result".into(),
        res.value.to_string(),
        format!("achieved={}", res.achieved_precision),
    ]);
    let mut report = Report::new("integrate", config).with_table(Table {
        columns: vec!["level".into(), "value".into(), "distance".into()],
        rows,
    });
    if !res.converged {
        report.warnings.push(format!(
            "not converged after {} levels: {} of {} digits vouched for",
            res.levels_used, res.achieved_precision, pa.precision
        ));
    }
    Ok(report)
}

fn replay_report(path: &Path) -> std::result::Result<Report, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(e.into()))?;
    let report = Report::from_json(&text).map_err(usage)?;
    if !report.hash_is_valid() {
        return Err(runtime(Error::InternalInconsistency(format!(
            "{}: body hash does not match its contents",
            path.display()
        ))));
    }
    Ok(report)
}

fn execute(cli: &Cli) -> std::result::Result<(String, i32), Failure> {
    let common = &cli.common;
    let format = common.format().map_err(usage)?;
    let cached = Cached::open(common).map_err(usage)?;
    let start = Instant::now();
    let report = match &cli.command {
        Command::Numbers { kind, n, at_q } => numbers_report(common, *kind, n, at_q.as_deref(), &cached)?,
        Command::Poly { n, at_q } => poly_report(common, n, at_q.as_deref(), &cached)?,
        Command::Verify {
            identity,
            k,
            m,
            n,
            mode,
            no_oracles,
        } => verify_report(
            common,
            identity,
            [k.as_deref(), m.as_deref(), n.as_deref()],
            *mode,
            *no_oracles,
            &cached,
        )?,
        Command::Integrate { kind, n, x0 } => integrate_report(common, *kind, *n, x0)?,
        Command::Report { input } => replay_report(input)?,
    };
    let report = if matches!(cli.command, Command::Report { .. }) {
        report
    } else {
        let mut r = report.seal();
        r.timing.total_micros = start.elapsed().as_micros() as u64;
        r
    };
    cached.save().map_err(runtime)?;
    let code = if report.blocking_failures() > 0 {
        EXIT_FAILURE
    } else {
        EXIT_OK
    };
    Ok((report.render(format).map_err(runtime)?, code))
}

/// Runs the CLI on `args`, writing the report to `--out` or `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 {
                write!(stdout, "{e}")
            } else {
                write!(stderr, "{e}")
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok((text, code)) => {
            let written = match &cli.common.out {
                Some(path) => std::fs::write(path, &text).map_err(Error::from),
                None => stdout.write_all(text.as_bytes()).map_err(Error::from),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_FAILURE;
            }
            code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
