//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use poisson_gft::suite::{identity_rows, ParamSampler};
use poisson_gft::{
    coeffs_f, coeffs_g, crosscheck, evaluate, grid_check, solve_m_star, t4_lhs, t5_lhs,
    witness_search, Class, ClassCondition, Grid, Policy, PredicateId, Verdict,
};

const SEED: u64 = 20_240_917;
const W1: f64 = 0.567_143_290_409_783_8;

struct Outcome {
    ok: bool,
    detail: String,
    elapsed: Duration,
    limit: Option<Duration>,
}

fn timed(limit: Option<f64>, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (ok, detail) = f();
    Outcome {
        ok,
        detail,
        elapsed: start.elapsed(),
        limit: limit.map(Duration::from_secs_f64),
    }
}

fn identities() -> (bool, String) {
    let mut s = ParamSampler::new(SEED);
    let policy = Policy::default();
    let (mut bad, mut worst_ratio) = (0, 0.0f64);
    for _ in 0..200 {
        for row in identity_rows(s.m(10.0), &policy).unwrap() {
            let tol = 1e-10f64.max(1e-12 * row.closed.abs());
            let err = (row.closed - row.partial).abs();
            worst_ratio = worst_ratio.max(err / tol);
            bad += usize::from(err > tol);
        }
    }
    (
        bad == 0,
        format!("{bad}/1000 mismatches, worst err/tol {worst_ratio:.3e}"),
    )
}

fn crosschecks() -> (bool, String) {
    let mut s = ParamSampler::new(SEED + 1);
    let policy = Policy::default();
    let (mut bad, mut worst) = (0, 0.0f64);
    for _ in 0..200 {
        let (p, c, r) = (s.m(10.0), s.class(), s.r());
        for pid in [
            PredicateId::T1_F_in_S,
            PredicateId::T2_F_in_C,
            PredicateId::T4_G_in_S,
            PredicateId::T5_I_in_S,
            PredicateId::T6_I_in_C,
        ] {
            let res = crosscheck(pid, p, &c, Some(&r), &policy).unwrap();
            worst = worst.max(res);
            bad += usize::from(res.is_nan() || res >= 1e-9);
        }
    }
    (
        bad == 0,
        format!("{bad}/1000 over 1e-9, worst residual {worst:.3e}"),
    )
}

fn equivalences() -> (bool, String) {
    let mut s = ParamSampler::new(SEED + 2);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let (p, c, r) = (s.m(10.0), s.class(), s.r());
        let r = Some(&r);
        let verdict = |pid, c: &Class| evaluate(pid, p, c, r).unwrap().verdict;
        mismatches +=
            usize::from(verdict(PredicateId::T3_G_in_C, &c) != verdict(PredicateId::T1_F_in_S, &c));
        let c0 = Class::new(c.k(), 0.0).unwrap();
        for pid in PredicateId::ALL.into_iter().filter(|p| p.is_corollary()) {
            mismatches += usize::from(verdict(pid, &c) != verdict(pid.parent(), &c0));
        }
    }
    (
        mismatches == 0,
        format!("{mismatches} mismatches over 1000 draws"),
    )
}

fn inclusions() -> (bool, String) {
    let mut s = ParamSampler::new(SEED + 3);
    let admits = |v: Verdict| matches!(v, Verdict::Holds | Verdict::Marginal);
    let (mut violations, mut strong) = (0, 0);
    for _ in 0..10_000 {
        let (p, c, r) = (s.m(10.0), s.class(), s.r());
        let r = Some(&r);
        let verdict = |pid| evaluate(pid, p, &c, r).unwrap().verdict;
        for (hi, lo) in [
            (PredicateId::T2_F_in_C, PredicateId::T1_F_in_S),
            (PredicateId::T6_I_in_C, PredicateId::T5_I_in_S),
        ] {
            if verdict(hi) == Verdict::Holds {
                strong += 1;
                violations += usize::from(!admits(verdict(lo)));
            }
        }
    }
    (
        violations == 0,
        format!("{violations} violations ({strong} premises held)"),
    )
}

/// Plain bisection on `m e^m − 1` over `[0, 1]`.
fn w1_oracle() -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid * mid.exp() < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn threshold() -> (bool, String) {
    let oracle = w1_oracle();
    let c = Class::new(1.0, 0.0).unwrap();
    let res = solve_m_star(PredicateId::T1_F_in_S, &c, None, 1e-10, 50.0).unwrap();
    let m = res.m_star().unwrap_or(f64::NAN);
    let err = (m - W1).abs();
    (
        err <= 1e-9 && (oracle - W1).abs() < 1e-15,
        format!("m* = {m:.16}, |m* - W(1)| = {err:.3e}, oracle {oracle:.16}"),
    )
}

fn bracket_identity() -> (bool, String) {
    let mut s = ParamSampler::new(SEED + 4);
    let (mut bad, mut worst) = (0, 0.0f64);
    for _ in 0..1000 {
        let (p, c, r) = (s.m(10.0), s.class(), s.r());
        let lhs = t5_lhs(p, &c, &r);
        let rhs = r.scale() * t4_lhs(p, &c);
        let rel = (lhs - rhs).abs() / lhs.abs();
        worst = worst.max(rel);
        bad += usize::from(rel.is_nan() || rel > 1e-14);
    }
    (
        bad == 0,
        format!("{bad}/1000 over 1e-14, worst rel {worst:.3e}"),
    )
}

fn draw(
    s: &mut ParamSampler,
    pid: PredicateId,
    m_hi: f64,
    accept: impl Fn(f64, f64) -> bool,
) -> (poisson_gft::Poisson, Class) {
    loop {
        let (p, c) = (s.m(m_hi), s.class());
        let rep = evaluate(pid, p, &c, None).unwrap();
        if accept(rep.margin, rep.rhs) {
            return (p, c);
        }
    }
}

fn sufficiency() -> (bool, String) {
    let mut s = ParamSampler::new(SEED + 5);
    let policy = Policy::default();
    let grid = Grid::default();
    let room = |margin: f64, rhs: f64| margin >= 0.01 * rhs;
    let mut violating = [0usize; 3];
    for _ in 0..20 {
        let (p, c) = draw(&mut s, PredicateId::T1_F_in_S, 1.0, room);
        let rep = grid_check(&coeffs_f(p, &policy).unwrap(), &ClassCondition::S(c), &grid);
        violating[0] += usize::from(rep.violations > 0);
    }
    for _ in 0..20 {
        let (p, c) = draw(&mut s, PredicateId::T4_G_in_S, 10.0, room);
        let rep = grid_check(&coeffs_g(p, &policy).unwrap(), &ClassCondition::S(c), &grid);
        violating[1] += usize::from(rep.violations > 0);
    }
    let tight = Policy::with_eps(1e-14).unwrap();
    for _ in 0..10 {
        let (p, c) = draw(&mut s, PredicateId::T1_F_in_S, 3.0, |margin, rhs| {
            margin <= -0.1 * rhs
        });
        let rep = witness_search(&coeffs_f(p, &tight).unwrap(), &ClassCondition::S(c), &grid);
        violating[2] += usize::from(rep.max_value.is_nan() || rep.max_value <= c.k());
    }
    (
        violating == [0, 0, 0],
        format!(
            "F/S draws with violations {}/20, G/S {}/20, failing draws without witness {}/10",
            violating[0], violating[1], violating[2]
        ),
    )
}

fn determinism() -> (bool, String) {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_gft"))
            .arg("suite")
            .env("GFT_SEED", "4242")
            .output()
            .expect("gft runs")
    };
    let (a, b) = (run(), run());
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    (
        same && a.status.code() == Some(0),
        format!(
            "{} bytes, identical: {same}, exit {:?}",
            a.stdout.len(),
            a.status.code()
        ),
    )
}

type Criterion = (&'static str, Option<f64>, fn() -> (bool, String));

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("identity suite", Some(1.0), identities),
        ("theorem cross-checks", Some(5.0), crosschecks),
        ("predicate equivalences", None, equivalences),
        ("inclusion properties", None, inclusions),
        ("threshold fixture", Some(0.1), threshold),
        ("bracket identity", None, bracket_identity),
        ("sufficiency sampling", Some(30.0), sufficiency),
        ("determinism", None, determinism),
    ];
    let mut all = true;
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let out = timed(limit, check);
        let in_time = out.limit.is_none_or(|l| out.elapsed < l);
        let ok = out.ok && in_time;
        all &= ok;
        let budget = out.limit.map_or(String::new(), |l| {
            format!(" (limit {:.1}s)", l.as_secs_f64())
        });
        println!(
            "{} {}. {name}: {} [{:.3}s{budget}]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            out.elapsed.as_secs_f64(),
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
