//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use qeuler::arith::{RatFuncQ, Rational, PolyQ};
use qeuler::identities::sides::{sides_thm1, sides_thm2, sides_thm4, thm1_via_unit_interval, thm3_combination, eq103_combination, eq6_combination, Variant};
use qeuler::identities::{
    verify_grid, Certificate, ExactEvaluator, GridEntry, IdentityId, IndexRange, PadicSetup, ParamRanges, Verdict,
    VerifyContext,
};
use qeuler::padic::{PadicApprox, Prime};
use qeuler::qintegral::{integrate, IntegralRequest, IntegralSettings, Measure};
use qeuler::qspecial::{beta_exact, classical_euler_oracle, q_bracket, two_q, EulerTable, QBase};
use qeuler::report::Report;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn ctx(p: u64, k: i64) -> VerifyContext {
    let settings = IntegralSettings::with_default_q(Prime::new(p).unwrap());
    VerifyContext::new(PadicSetup::new(settings, k).unwrap())
}

fn km(a: (i64, i64), b: (i64, i64)) -> ParamRanges {
    ParamRanges::km(IndexRange::new(a.0, a.1), IndexRange::new(b.0, b.1))
}

fn k_only(a: i64, b: i64) -> ParamRanges {
    ParamRanges::k(IndexRange::new(a, b))
}

fn count(entries: &[GridEntry], verdict: Verdict) -> usize {
    entries
        .iter()
        .filter(|e| e.outcome.as_ref().is_ok_and(|r| r.verdict == verdict))
        .count()
}

fn all_hold(entries: &[GridEntry], verdict: Verdict) -> bool {
    !entries.is_empty() && count(entries, verdict) == entries.len() && entries.iter().all(|e| !e.is_failure())
}

fn classical_limit() -> Outcome {
    let start = Instant::now();
    let t = EulerTable::new();
    let one = Rational::one();
    let bad: Vec<usize> = (0..=20)
        .filter(|&n| t.number(n).eval(&one).ok() != Some(classical_euler_oracle(n)))
        .collect();
    let elapsed = start.elapsed();
    outcome(
        bad.is_empty() && elapsed < Duration::from_secs(1),
        format!("n = 0..=20, mismatches {bad:?}, {elapsed:.2?}"),
    )
}

fn master_identity_grid() -> Outcome {
    let start = Instant::now();
    let g = verify_grid(IdentityId::EQ6, &km((0, 8), (0, 8)), &ctx(3, 4)).unwrap();
    let zero = g.iter().all(|e| {
        e.outcome
            .as_ref()
            .is_ok_and(|r| matches!(&r.certificate, Certificate::XPoly(x) if x.is_zero()))
    });
    let elapsed = start.elapsed();
    let holds = count(&g, Verdict::Holds);
    outcome(
        holds == 81 && zero && elapsed < Duration::from_secs(10),
        format!("{holds}/81 hold, zero certificates {zero}, {elapsed:.2?}"),
    )
}

fn unit_interval_grid() -> Outcome {
    let g = verify_grid(IdentityId::THM1, &km((1, 8), (1, 8)), &ctx(3, 4)).unwrap();
    let holds = count(&g, Verdict::Holds);
    let table = EulerTable::new();
    let ev = ExactEvaluator::new(Arc::new(EulerTable::new()));
    let mut route_ok = 0;
    for k in 1..=5 {
        for m in 1..=5 {
            let direct = sides_thm1(&ev, k, m).unwrap();
            let via = thm1_via_unit_interval(&table, k as usize, m as usize).unwrap();
            if direct == via {
                route_ok += 1;
            }
        }
    }
    outcome(
        holds == 64 && route_ok == 25,
        format!("{holds}/64 hold; integration route matches {route_ok}/25"),
    )
}

fn even_odd_grid() -> Outcome {
    let g = verify_grid(IdentityId::THM2, &k_only(1, 10), &ctx(3, 4)).unwrap();
    let holds = count(&g, Verdict::Holds);
    let ev = ExactEvaluator::new(Arc::new(EulerTable::new()));
    let mut beta_ok = 0;
    for k in 1..=10i64 {
        let (_, right) = sides_thm2(&ev, k).unwrap();
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let beta = RatFuncQ::from_rational(&beta_exact(k + 1, k + 1).unwrap() * &Rational::from(sign));
        let expect = (&two_q() * &beta)
            .checked_div(&-q_bracket(2, QBase::Reciprocal))
            .unwrap();
        if right == expect {
            beta_ok += 1;
        }
    }
    outcome(
        holds == 10 && beta_ok == 10,
        format!("{holds}/10 hold; beta form matches {beta_ok}/10"),
    )
}

fn odd_degree_grid() -> Outcome {
    let c = ctx(3, 4);
    let g = verify_grid(IdentityId::THM3_CORRECTED, &k_only(1, 6), &c).unwrap();
    let holds = count(&g, Verdict::Holds);
    let table = EulerTable::new();
    let inv = two_q().recip().unwrap();
    let construction = (1..=6i64)
        .filter(|&k| {
            let built = &eq6_combination(k, k + 1).polynomial(&table)
                + &eq103_combination(k).polynomial(&table).scale(&inv);
            (&thm3_combination(k, Variant::Corrected).polynomial(&table) - &built).is_zero()
        })
        .count();
    let printed = verify_grid(IdentityId::THM3_PRINTED, &k_only(1, 6), &c).unwrap();
    let printed_k1_nonzero = printed[0]
        .outcome
        .as_ref()
        .is_ok_and(|r| r.verdict == Verdict::Fails && !r.certificate.is_exact_zero());
    let printed_fails = count(&printed, Verdict::Fails);
    outcome(
        holds == 6 && construction == 6 && printed_k1_nonzero,
        format!(
            "corrected {holds}/6 hold; construction zero {construction}/6; printed reading fails {printed_fails}/6 (k = 1 nonzero: {printed_k1_nonzero})"
        ),
    )
}

fn fermionic_moment_grid() -> Outcome {
    let g = verify_grid(IdentityId::THM4, &km((1, 6), (1, 6)), &ctx(3, 5)).unwrap();
    let holds = count(&g, Verdict::Holds);
    let ev = ExactEvaluator::new(Arc::new(EulerTable::new()));
    let (l, r) = sides_thm4(&ev, 1, 1).unwrap();
    let anchor = RatFuncQ::new(PolyQ::from_i64s(&[0, 0, 2]), PolyQ::from_i64s(&[1, 1])).unwrap();
    let numeric = g
        .iter()
        .filter(|e| matches!(e.params, qeuler::identities::Params::KM { k, m } if k <= 3 && m <= 3))
        .all(|e| e.outcome.as_ref().is_ok_and(|r| !r.oracles.is_empty() && r.oracles_pass()));
    outcome(
        holds == 36 && l == anchor && r == anchor && numeric,
        format!("{holds}/36 hold; (1,1) sides {l} and {r}; Riemann sums agree to K = 5 for k, m <= 3: {numeric}"),
    )
}

fn calculus() -> Outcome {
    let g = verify_grid(IdentityId::EQ7, &ParamRanges::n(IndexRange::new(1, 12)), &ctx(3, 4)).unwrap();
    let holds = count(&g, Verdict::Holds);
    let table = EulerTable::new();
    let routes = (0..=12).filter(|&n| table.poly_integral01(n).is_ok()).count();
    outcome(
        holds == 12 && routes == 13,
        format!("derivative {holds}/12 hold; integral routes agree {routes}/13"),
    )
}

fn fermionic_convergence() -> Outcome {
    let start = Instant::now();
    let table = EulerTable::new();
    let mut failures = Vec::new();
    let mut worst = (i64::MAX, 0u32);
    for p in [3u64, 5] {
        let prime = Prime::new(p).unwrap();
        let mut settings = IntegralSettings::with_default_q(prime);
        settings.max_level = 10;
        for n in 0..=8usize {
            for x0 in [0i64, 1] {
                let x0 = Rational::from(x0);
                let req = IntegralRequest::monomial(Measure::Fermionic, n, &x0, 6, settings.clone());
                let res = integrate(&req).unwrap();
                let exact = table.poly(n).eval_at(&x0).eval(&settings.q).unwrap();
                let embedded = PadicApprox::from_rational_abs(&exact, prime, 20).unwrap();
                let agree = res.value.distance(&embedded).digits().min(res.achieved_precision);
                worst = (worst.0.min(agree), worst.1.max(res.levels_used));
                if !(res.converged && agree >= 6 && res.levels_used <= 10) {
                    failures.push(format!("p={p} n={n} x0={x0}"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures.is_empty() && elapsed < Duration::from_secs(60),
        format!(
            "36 integrals; min agreement {} digits, max level {}; failures {failures:?}; {elapsed:.2?}",
            worst.0, worst.1
        ),
    )
}

fn bosonic_precision_law() -> Outcome {
    let prime = Prime::new(3).unwrap();
    let k = 6;
    let budgeted = IntegralSettings::with_default_q(prime);
    let mut reference_settings = budgeted.clone();
    reference_settings.max_level = 14;
    let mut starved = budgeted.clone();
    starved.level_surcharge = false;
    starved.guard = 2;

    let mut lines = Vec::new();
    let mut pass = true;
    for n in [1usize, 2, 3] {
        let reference = integrate(&IntegralRequest::monomial(
            Measure::Bosonic,
            n,
            &Rational::zero(),
            k + 3,
            reference_settings.clone(),
        ))
        .unwrap();
        let good = integrate(&IntegralRequest::monomial(Measure::Bosonic, n, &Rational::zero(), k, budgeted.clone())).unwrap();
        let bad = integrate(&IntegralRequest::monomial(Measure::Bosonic, n, &Rational::zero(), k, starved.clone())).unwrap();

        // The division by [p^N]_q costs exactly N digits at level N, plus the
        // denominator of the value itself when it is not p-integral.
        let loss_law = |res: &qeuler::qintegral::IntegralResult, s: &IntegralSettings| {
            res.trace.iter().all(|rec| {
                let w = s.working_exponent(Measure::Bosonic, k, rec.level) as i64;
                let v = rec.value.valuation().unwrap_or(0);
                rec.value.abs_precision() == w - rec.level as i64 + v.min(0)
            })
        };
        let good_ok = good.converged
            && good.achieved_precision == k
            && good.value.distance(&reference.value).reaches(k)
            && loss_law(&good, &budgeted);
        let bad_honest = bad.achieved_precision < k
            && !bad.converged
            && bad.value.distance(&reference.value).reaches(bad.achieved_precision)
            && loss_law(&bad, &starved);
        pass &= good_ok && bad_honest;
        lines.push(format!(
            "n={n}: budgeted {} digits ({}), under-budgeted reports {} digits (honest {bad_honest})",
            good.achieved_precision,
            if good_ok { "ok" } else { "BAD" },
            bad.achieved_precision,
        ));
    }
    outcome(pass, lines.join("; "))
}

fn bosonic_identity_grid() -> Outcome {
    let start = Instant::now();
    let c = ctx(3, 4);
    let thm6 = verify_grid(IdentityId::THM6, &km((1, 3), (1, 3)), &c).unwrap();
    let cor7 = verify_grid(IdentityId::COR7_CORRECTED, &k_only(1, 3), &c).unwrap();
    let oracles = |g: &[GridEntry]| {
        g.iter()
            .all(|e| e.outcome.as_ref().is_ok_and(|r| !r.oracles.is_empty() && r.oracles_pass()))
    };
    let elapsed = start.elapsed();
    let pass = all_hold(&thm6, Verdict::HoldsToPrecision)
        && all_hold(&cor7, Verdict::HoldsToPrecision)
        && oracles(&thm6)
        && oracles(&cor7)
        && elapsed < Duration::from_secs(120);
    outcome(
        pass,
        format!(
            "master {}/9 and odd-degree {}/3 hold to 4 digits at p = 3, q = 4; Riemann-sum routes agree {}; {elapsed:.2?}",
            count(&thm6, Verdict::HoldsToPrecision),
            count(&cor7, Verdict::HoldsToPrecision),
            oracles(&thm6) && oracles(&cor7)
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let run = |name: &str, cache_args: Vec<String>| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_qeuler"))
            .args(["verify", "all", "--format", "json", "--out"])
            .arg(&out)
            .args(cache_args)
            .status()
            .unwrap();
        let text = std::fs::read_to_string(&out).unwrap();
        (status.code(), Report::from_json(&text).unwrap())
    };
    let with_cache = || vec!["--cache".to_string(), cache.display().to_string()];
    let runs = [
        run("a.json", vec!["--no-cache".into()]),
        run("b.json", vec!["--no-cache".into()]),
        run("cold.json", with_cache()),
        run("warm.json", with_cache()),
    ];
    let body = runs[0].1.canonical_body();
    let same = runs.iter().all(|(_, r)| r.canonical_body() == body && r.hash_is_valid());
    let codes: Vec<_> = runs.iter().map(|(c, _)| *c).collect();
    let items = runs[0].1.items.len();
    outcome(
        same && codes.iter().all(|c| *c == Some(0)),
        format!("4 runs of {items} cells (2 uncached, cold and warm cache): identical bodies {same}, exit codes {codes:?}"),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("classical limit q -> 1", classical_limit),
        ("master identity, exact, 0 <= k,m <= 8", master_identity_grid),
        ("unit-interval identity, exact, with integration route", unit_interval_grid),
        ("even/odd identity and beta form", even_odd_grid),
        ("odd-degree identity, re-derived reading", odd_degree_grid),
        ("fermionic moment identity, exact, with anchor", fermionic_moment_grid),
        ("derivative and unit-interval integral", calculus),
        ("fermionic integral convergence", fermionic_convergence),
        ("bosonic precision law", bosonic_precision_law),
        ("bosonic identities to precision", bosonic_identity_grid),
        ("report determinism with and without cache", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!(
            "[{}] {:>2}. {name}: {} ({:.2?})",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            start.elapsed()
        );
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
