//! Seeded randomized property suite over the whole library.
//!
//! Output depends only on the seed and the truncation policy, so two runs
//! with the same inputs serialize to identical canonical JSON.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analytic::{grid_check, witness_search, ClassCondition, GridSpec};
use crate::criteria::{ClassParams, RParams, Verdict};
use crate::error::Result;
use crate::series::{
    choose_truncation, coeffs_f, coeffs_g, partial_exp_sum, shifted_exp_sum, PoissonParams,
    SumKind, TruncationPolicy, WeightGrowth,
};
use crate::theorems::{crosscheck, evaluate, t4_lhs, t5_lhs, PredicateId};
use crate::threshold::{solve_m_star, DEFAULT_SCAN_LIMIT};

/// Root of `m e^m = 1`, the `F ∈ S(1)` threshold.
pub const W1: f64 = 0.567_143_290_409_783_8;

pub const IDENTITY_ABS_TOL: f64 = 1e-10;
pub const IDENTITY_REL_TOL: f64 = 1e-12;
pub const CROSSCHECK_TOL: f64 = 1e-9;
pub const BRACKET_REL_TOL: f64 = 1e-14;
pub const THRESHOLD_TOL: f64 = 1e-9;

/// Draws parameters from the domains the criteria are stated on.
pub struct ParamSampler {
    rng: ChaCha8Rng,
}

impl ParamSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform on `(0, hi]`.
    pub fn m(&mut self, hi: f64) -> PoissonParams<f64> {
        let u: f64 = self.rng.gen();
        PoissonParams::new(hi * (1.0 - u)).expect("positive")
    }

    pub fn class(&mut self) -> ClassParams<f64> {
        let k = 1.0 - self.rng.gen::<f64>();
        let lambda = self.rng.gen::<f64>();
        ClassParams::new(k, lambda).expect("in domain")
    }

    /// `−1 ≤ B < A ≤ 1`, `|τ| ∈ (0, 2]`, uniform phase.
    pub fn r(&mut self) -> RParams<f64> {
        loop {
            let x = self.rng.gen_range(-1.0..=1.0);
            let y = self.rng.gen_range(-1.0..=1.0);
            let (b, a) = if x < y { (x, y) } else { (y, x) };
            let modulus = 2.0 * (1.0 - self.rng.gen::<f64>());
            let phase = self.rng.gen_range(0.0..std::f64::consts::TAU);
            if let Ok(r) = RParams::new(a, b, Complex::from_polar(modulus, phase)) {
                return r;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteCheck {
    pub name: &'static str,
    pub trials: usize,
    pub failures: usize,
    /// Largest error or smallest margin seen, depending on the check.
    pub worst: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub eps: f64,
    pub checks: Vec<SuiteCheck>,
    pub passed: bool,
}

struct Tally {
    name: &'static str,
    trials: usize,
    failures: usize,
    worst: f64,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            trials: 0,
            failures: 0,
            worst: 0.0,
        }
    }

    fn record(&mut self, ok: bool, metric: f64) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
        }
        if metric > self.worst || metric.is_nan() {
            self.worst = metric;
        }
    }

    fn finish(self) -> SuiteCheck {
        SuiteCheck {
            name: self.name,
            trials: self.trials,
            failures: self.failures,
            worst: self.worst,
            passed: self.failures == 0 && self.trials > 0,
        }
    }
}

/// One closed form against its partial sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityRow {
    pub kind: SumKind,
    pub closed: f64,
    pub partial: f64,
    pub order: usize,
    pub error: f64,
    pub tolerance: f64,
}

impl IdentityRow {
    pub fn passed(&self) -> bool {
        self.error <= self.tolerance
    }
}

/// Closed form vs. termwise partial sum for every kind at one `m`.
pub fn identity_rows(
    p: PoissonParams<f64>,
    policy: &TruncationPolicy<f64>,
) -> Result<Vec<IdentityRow>> {
    let order = choose_truncation(p, policy, WeightGrowth::Quadratic)?;
    Ok(SumKind::ALL
        .iter()
        .map(|&kind| {
            let closed = shifted_exp_sum(p, kind);
            let partial = partial_exp_sum(p, kind, order);
            IdentityRow {
                kind,
                closed,
                partial,
                order,
                error: (closed - partial).abs(),
                tolerance: IDENTITY_ABS_TOL.max(IDENTITY_REL_TOL * closed.abs()),
            }
        })
        .collect())
}

fn check_identities(s: &mut ParamSampler, policy: &TruncationPolicy<f64>) -> Result<SuiteCheck> {
    let mut t = Tally::new("identities");
    for _ in 0..200 {
        for row in identity_rows(s.m(10.0), policy)? {
            t.record(row.passed(), row.error);
        }
    }
    Ok(t.finish())
}

fn check_crosscheck(s: &mut ParamSampler, policy: &TruncationPolicy<f64>) -> Result<SuiteCheck> {
    let mut t = Tally::new("crosscheck");
    for _ in 0..200 {
        let (p, c, r) = (s.m(10.0), s.class(), s.r());
        for pid in [
            PredicateId::T1_F_in_S,
            PredicateId::T2_F_in_C,
            PredicateId::T4_G_in_S,
            PredicateId::T5_I_in_S,
            PredicateId::T6_I_in_C,
        ] {
            let res = crosscheck(pid, p, &c, Some(&r), policy)?;
            t.record(res < CROSSCHECK_TOL, res);
        }
    }
    Ok(t.finish())
}

fn check_equivalences(s: &mut ParamSampler) -> Result<SuiteCheck> {
    let mut t = Tally::new("equivalences");
    for _ in 0..1000 {
        let (p, c, r) = (s.m(10.0), s.class(), s.r());
        let r = Some(&r);
        let t1 = evaluate(PredicateId::T1_F_in_S, p, &c, r)?.verdict;
        let t3 = evaluate(PredicateId::T3_G_in_C, p, &c, r)?.verdict;
        let mut ok = t1 == t3;
        let c0 = c.with_lambda_zero();
        for pid in PredicateId::ALL.iter().filter(|p| p.is_corollary()) {
            let cor = evaluate(*pid, p, &c, r)?.verdict;
            let parent = evaluate(pid.parent(), p, &c0, r)?.verdict;
            ok &= cor == parent;
        }
        t.record(ok, if ok { 0.0 } else { 1.0 });
    }
    Ok(t.finish())
}

fn check_inclusions(s: &mut ParamSampler) -> Result<SuiteCheck> {
    let mut t = Tally::new("inclusions");
    for _ in 0..10_000 {
        let (p, c, r) = (s.m(10.0), s.class(), s.r());
        let r = Some(&r);
        let chain = |strong: PredicateId, weak: PredicateId| -> Result<bool> {
            let strong = evaluate(strong, p, &c, r)?.verdict;
            Ok(strong != Verdict::Holds || evaluate(weak, p, &c, r)?.verdict.admits())
        };
        let ok = chain(PredicateId::T2_F_in_C, PredicateId::T1_F_in_S)?
            && chain(PredicateId::T6_I_in_C, PredicateId::T5_I_in_S)?;
        t.record(ok, if ok { 0.0 } else { 1.0 });
    }
    Ok(t.finish())
}

fn check_threshold() -> Result<SuiteCheck> {
    let mut t = Tally::new("threshold_w1");
    let c = ClassParams::new(1.0, 0.0)?;
    let res = solve_m_star(PredicateId::T1_F_in_S, &c, None, 1e-10, DEFAULT_SCAN_LIMIT)?;
    let err = res.m_star().map_or(f64::INFINITY, |m| (m - W1).abs());
    t.record(err < THRESHOLD_TOL, err);
    Ok(t.finish())
}

fn check_bracket_identity(s: &mut ParamSampler) -> Result<SuiteCheck> {
    let mut t = Tally::new("bracket_identity");
    for _ in 0..1000 {
        let (p, c, r) = (s.m(10.0), s.class(), s.r());
        let t5 = t5_lhs(p, &c, &r);
        let scaled = r.scale() * t4_lhs(p, &c);
        let rel = (t5 - scaled).abs() / t5.abs().max(f64::MIN_POSITIVE);
        t.record(rel <= BRACKET_REL_TOL, rel);
    }
    Ok(t.finish())
}

/// Draws `(m, c)` with `accept(margin, 2k)`, `m` uniform on `(0, m_hi]`.
fn draw_where(
    s: &mut ParamSampler,
    pid: PredicateId,
    m_hi: f64,
    accept: impl Fn(f64, f64) -> bool,
) -> Result<(PoissonParams<f64>, ClassParams<f64>)> {
    loop {
        let (p, c) = (s.m(m_hi), s.class());
        let rep = evaluate(pid, p, &c, None)?;
        if accept(rep.margin, rep.rhs) {
            return Ok((p, c));
        }
    }
}

fn check_sufficiency(
    s: &mut ParamSampler,
    policy: &TruncationPolicy<f64>,
) -> Result<Vec<SuiteCheck>> {
    let grid = GridSpec::default();
    let holds_with_room = |margin: f64, rhs: f64| margin >= 0.01 * rhs;

    let mut f_in_s = Tally::new("sufficiency_F_S");
    for _ in 0..20 {
        let (p, c) = draw_where(s, PredicateId::T1_F_in_S, 1.0, holds_with_room)?;
        let rep = grid_check(&coeffs_f(p, policy)?, &ClassCondition::S(c), &grid);
        f_in_s.record(rep.violations == 0, rep.max_value / c.k());
    }

    let mut f_in_c = Tally::new("sufficiency_F_C");
    for _ in 0..20 {
        let (p, c) = draw_where(s, PredicateId::T2_F_in_C, 0.5, holds_with_room)?;
        let rep = grid_check(&coeffs_f(p, policy)?, &ClassCondition::C(c), &grid);
        f_in_c.record(rep.violations == 0, rep.max_value / c.k());
    }

    let mut g_in_s = Tally::new("sufficiency_G_S");
    for _ in 0..20 {
        let (p, c) = draw_where(s, PredicateId::T4_G_in_S, 10.0, holds_with_room)?;
        let rep = grid_check(&coeffs_g(p, policy)?, &ClassCondition::S(c), &grid);
        g_in_s.record(rep.violations == 0, rep.max_value / c.k());
    }

    // necessity side: tighter truncation, radius 0.999
    let tight = TruncationPolicy::new(1e-14, policy.n_min(), policy.n_max())?;
    let mut witness = Tally::new("failure_witness_F_S");
    for _ in 0..10 {
        let (p, c) = draw_where(s, PredicateId::T1_F_in_S, 3.0, |margin, rhs| {
            margin <= -0.1 * rhs
        })?;
        let rep = witness_search(&coeffs_f(p, &tight)?, &ClassCondition::S(c), &grid);
        // metric: how far below k the best witness stays (0 when found)
        let shortfall = (c.k() - rep.max_value).max(0.0) / c.k();
        witness.record(rep.max_value > c.k(), shortfall);
    }
    Ok(vec![
        f_in_s.finish(),
        f_in_c.finish(),
        g_in_s.finish(),
        witness.finish(),
    ])
}

/// Runs every check with the given seed.
pub fn run_suite(seed: u64, policy: &TruncationPolicy<f64>) -> Result<SuiteReport> {
    let mut s = ParamSampler::new(seed);
    let mut checks = vec![
        check_identities(&mut s, policy)?,
        check_crosscheck(&mut s, policy)?,
        check_equivalences(&mut s)?,
        check_inclusions(&mut s)?,
        check_threshold()?,
        check_bracket_identity(&mut s)?,
    ];
    checks.extend(check_sufficiency(&mut s, policy)?);
    let passed = checks.iter().all(|c| c.passed);
    Ok(SuiteReport {
        seed,
        eps: policy.eps(),
        checks,
        passed,
    })
}
