//! Closed-form membership conditions for `F(m,z)`, `G(m,z)` and
//! `I(m,z)f`, each paired with an independent series route.
//!
//! Every condition reads `lhs ≤ 2k`. For `F ∈ S`, `F ∈ C` and `G ∈ C` the
//! closed form carries a factor `e^m` relative to the weighted coefficient
//! sum `L` of the criteria: `lhs − 2k = e^m (L − 2k)`. The remaining
//! conditions are already stated in terms of `L`. Cross-checks compare in
//! the `L` scale, where both sides are O(1) and a fixed absolute tolerance
//! is meaningful.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::criteria::{
    lemma_sum, worst_case_r_coeffs, ClassParams, Criterion, LemmaClass, MembershipReport, RParams,
    Verdict, BOUNDARY_TOL,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{
    apply_operator_i, choose_truncation, coeffs_f, coeffs_g, exp_minus_1_minus_m, PoissonParams,
    TruncationPolicy, WeightGrowth,
};

/// Above this `m` the conditions carrying `e^m` short-circuit to `+∞`.
pub const OVERFLOW_M: f64 = 700.0;

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PredicateId {
    T1_F_in_S,
    T2_F_in_C,
    T3_G_in_C,
    T4_G_in_S,
    T5_I_in_S,
    T6_I_in_C,
    C1_F_in_Sk,
    C2_F_in_Ck,
    C3_I_in_Sk,
    C4_I_in_Ck,
    C5_G_in_Ck,
    C6_G_in_Sk,
}

/// The six distinct conditions; corollaries reuse them at `λ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    FInS,
    FInC,
    GInC,
    GInS,
    IInS,
    IInC,
}

impl PredicateId {
    pub const ALL: [PredicateId; 12] = [
        PredicateId::T1_F_in_S,
        PredicateId::T2_F_in_C,
        PredicateId::T3_G_in_C,
        PredicateId::T4_G_in_S,
        PredicateId::T5_I_in_S,
        PredicateId::T6_I_in_C,
        PredicateId::C1_F_in_Sk,
        PredicateId::C2_F_in_Ck,
        PredicateId::C3_I_in_Sk,
        PredicateId::C4_I_in_Ck,
        PredicateId::C5_G_in_Ck,
        PredicateId::C6_G_in_Sk,
    ];

    pub fn as_str(self) -> &'static str {
        use PredicateId::*;
        match self {
            T1_F_in_S => "T1_F_in_S",
            T2_F_in_C => "T2_F_in_C",
            T3_G_in_C => "T3_G_in_C",
            T4_G_in_S => "T4_G_in_S",
            T5_I_in_S => "T5_I_in_S",
            T6_I_in_C => "T6_I_in_C",
            C1_F_in_Sk => "C1_F_in_Sk",
            C2_F_in_Ck => "C2_F_in_Ck",
            C3_I_in_Sk => "C3_I_in_Sk",
            C4_I_in_Ck => "C4_I_in_Ck",
            C5_G_in_Ck => "C5_G_in_Ck",
            C6_G_in_Sk => "C6_G_in_Sk",
        }
    }

    pub fn condition(self) -> Condition {
        use PredicateId::*;
        match self {
            T1_F_in_S | C1_F_in_Sk => Condition::FInS,
            T2_F_in_C | C2_F_in_Ck => Condition::FInC,
            T3_G_in_C | C5_G_in_Ck => Condition::GInC,
            T4_G_in_S | C6_G_in_Sk => Condition::GInS,
            T5_I_in_S | C3_I_in_Sk => Condition::IInS,
            T6_I_in_C | C4_I_in_Ck => Condition::IInC,
        }
    }

    pub fn is_corollary(self) -> bool {
        self.as_str().starts_with('C')
    }

    /// The theorem a corollary specializes (identity on theorems).
    pub fn parent(self) -> PredicateId {
        match self.condition() {
            Condition::FInS => PredicateId::T1_F_in_S,
            Condition::FInC => PredicateId::T2_F_in_C,
            Condition::GInC => PredicateId::T3_G_in_C,
            Condition::GInS => PredicateId::T4_G_in_S,
            Condition::IInS => PredicateId::T5_I_in_S,
            Condition::IInC => PredicateId::T6_I_in_C,
        }
    }

    pub fn needs_r_params(self) -> bool {
        matches!(self.condition(), Condition::IInS | Condition::IInC)
    }

    /// Whether the closed-form lhs is strictly increasing in `m`.
    pub fn is_monotone_in_m(self) -> bool {
        !matches!(self.condition(), Condition::GInS | Condition::IInS)
    }

    /// Class parameters the predicate is evaluated at (`λ` forced to 0 for
    /// corollaries).
    pub fn effective_params<T: Scalar>(self, c: &ClassParams<T>) -> ClassParams<T> {
        if self.is_corollary() {
            c.with_lambda_zero()
        } else {
            *c
        }
    }
}

impl fmt::Display for PredicateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PredicateId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        PredicateId::ALL
            .iter()
            .copied()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = PredicateId::ALL.iter().map(|p| p.as_str()).collect();
                format!(
                    "unknown predicate {s:?}; expected one of {}",
                    names.join(", ")
                )
            })
    }
}

impl Serialize for PredicateId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

fn exp_guarded<T: Scalar>(m: T) -> Option<T> {
    let e = m.exp();
    (m <= T::lit(OVERFLOW_M) && e.is_finite()).then_some(e)
}

/// `1 − e^{−m}`.
fn one_minus_exp_neg<T: Scalar>(m: T) -> T {
    -(-m).exp_m1()
}

/// `F(m,z) ∈ S(k,λ)`: `((1−λ)+k(1+λ)) m e^m`.
pub fn t1_lhs<T: Scalar>(p: PoissonParams<T>, c: &ClassParams<T>) -> T {
    let m = p.m();
    match exp_guarded(m) {
        Some(e) => c.slope() * m * e,
        None => T::infinity(),
    }
}

/// `2(1+2k+kλ−λ)`, the linear coefficient in the `F ∈ C` condition.
pub fn t2_linear_coeff<T: Scalar>(c: &ClassParams<T>) -> T {
    let (k, l) = (c.k(), c.lambda());
    T::lit(2.0) * (T::one() + k + k + k * l - l)
}

/// `F(m,z) ∈ C(k,λ)`: `((1−λ)+k(1+λ)) m² e^m + 2(1+2k+kλ−λ) m e^m`.
pub fn t2_lhs<T: Scalar>(p: PoissonParams<T>, c: &ClassParams<T>) -> T {
    let m = p.m();
    match exp_guarded(m) {
        Some(e) => c.slope() * m * m * e + t2_linear_coeff(c) * m * e,
        None => T::infinity(),
    }
}

/// `G(m,z) ∈ C(k,λ)`: the same condition as `F ∈ S`.
pub fn t3_lhs<T: Scalar>(p: PoissonParams<T>, c: &ClassParams<T>) -> T {
    t1_lhs(p, c)
}

/// `(1 − e^{−m} − m e^{−m})/m`, written as in the `G ∈ S` condition.
fn g_in_s_tail_factor<T: Scalar>(m: T) -> T {
    if m < T::lit(0.5) {
        (-m).exp() * exp_minus_1_minus_m(m) / m
    } else {
        (one_minus_exp_neg(m) - m * (-m).exp()) / m
    }
}

/// `(1 − e^{−m}(1+m))/m`, written as in the `I ∈ S` condition.
fn i_in_s_tail_factor<T: Scalar>(m: T) -> T {
    if m < T::lit(0.5) {
        (-m).exp() * exp_minus_1_minus_m(m) / m
    } else {
        (T::one() - (-m).exp() * (T::one() + m)) / m
    }
}

/// `G(m,z) ∈ S(k,λ)`:
/// `((1−λ)+k(1+λ))(1−e^{−m}) + ((1−λ)(k−1)/m)(1−e^{−m}−m e^{−m})`.
pub fn t4_lhs<T: Scalar>(p: PoissonParams<T>, c: &ClassParams<T>) -> T {
    let m = p.m();
    c.slope() * one_minus_exp_neg(m) - c.offset() * g_in_s_tail_factor(m)
}

/// `I(m,z)f ∈ S(k,λ)` for `f ∈ R^τ(A,B)`:
/// `(A−B)|τ| [((1−λ)+k(1+λ))(1−e^{−m}) + ((1−λ)(k−1)/m)(1−e^{−m}(1+m))]`.
pub fn t5_lhs<T: Scalar>(p: PoissonParams<T>, c: &ClassParams<T>, r: &RParams<T>) -> T {
    let m = p.m();
    r.scale() * (c.slope() * one_minus_exp_neg(m) - c.offset() * i_in_s_tail_factor(m))
}

/// `I(m,z)f ∈ C(k,λ)` for `f ∈ R^τ(A,B)`:
/// `(A−B)|τ| [((1−λ)+k(1+λ)) m + 2k(1−e^{−m})]`.
///
/// The printed statement names `F(m,z)f`; the derivation works with the
/// coefficients of `I(m,z)f`, which is what this evaluates.
pub fn t6_lhs<T: Scalar>(p: PoissonParams<T>, c: &ClassParams<T>, r: &RParams<T>) -> T {
    let m = p.m();
    r.scale() * (c.slope() * m + c.rhs() * one_minus_exp_neg(m))
}

fn require_r<T: Scalar>(pid: PredicateId, r: Option<&RParams<T>>) -> Result<RParams<T>> {
    r.copied().ok_or(Error::MissingRParams(pid.as_str()))
}

/// Closed-form lhs of `pid` (corollaries at `λ = 0`).
pub fn closed_form_lhs<T: Scalar>(
    pid: PredicateId,
    p: PoissonParams<T>,
    c: &ClassParams<T>,
    r: Option<&RParams<T>>,
) -> Result<T> {
    let c = pid.effective_params(c);
    Ok(match pid.condition() {
        Condition::FInS => t1_lhs(p, &c),
        Condition::FInC => t2_lhs(p, &c),
        Condition::GInC => t3_lhs(p, &c),
        Condition::GInS => t4_lhs(p, &c),
        Condition::IInS => t5_lhs(p, &c, &require_r(pid, r)?),
        Condition::IInC => t6_lhs(p, &c, &require_r(pid, r)?),
    })
}

/// `2k − lhs` for `pid`.
///
/// For `G ∈ S` the difference is rearranged to
/// `slope·e^{−m} − (1−λ)(1−k)(1 − (1−e^{−m}−m e^{−m})/m)`, which keeps its
/// sign when `lhs` approaches `2k` from below as `m → ∞` (e.g. `k = 1`).
pub fn closed_form_margin<T: Scalar>(
    pid: PredicateId,
    p: PoissonParams<T>,
    c: &ClassParams<T>,
    r: Option<&RParams<T>>,
) -> Result<T> {
    let ce = pid.effective_params(c);
    if pid.condition() == Condition::GInS {
        let m = p.m();
        return Ok(ce.slope() * (-m).exp() - ce.offset() * (T::one() - g_in_s_tail_factor(m)));
    }
    Ok(ce.rhs() - closed_form_lhs(pid, p, c, r)?)
}

/// Membership report for `pid` from its closed form.
pub fn evaluate<T: Scalar>(
    pid: PredicateId,
    p: PoissonParams<T>,
    c: &ClassParams<T>,
    r: Option<&RParams<T>>,
) -> Result<MembershipReport<T>> {
    let lhs = closed_form_lhs(pid, p, c, r)?;
    let rhs = pid.effective_params(c).rhs();
    let margin = closed_form_margin(pid, p, c, r)?;
    Ok(MembershipReport {
        predicate: Criterion::Theorem(pid),
        verdict: Verdict::classify(margin, T::lit(BOUNDARY_TOL)),
        lhs,
        rhs,
        margin,
        crosscheck_residual: None,
        truncation_order: None,
    })
}

/// Both sides of a cross-check, on the weighted-coefficient-sum scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crosscheck<T> {
    /// Closed form mapped to the coefficient-sum scale.
    pub closed_form: T,
    /// Truncated weighted coefficient sum.
    pub series: T,
    pub residual: T,
    pub truncation_order: usize,
}

/// Maps a closed-form lhs onto the coefficient-sum scale `L`.
pub fn to_coefficient_scale<T: Scalar>(pid: PredicateId, p: PoissonParams<T>, rhs: T, lhs: T) -> T {
    match pid.condition() {
        Condition::FInS | Condition::FInC | Condition::GInC => {
            if lhs.is_infinite() {
                lhs
            } else {
                rhs + (-p.m()).exp() * (lhs - rhs)
            }
        }
        Condition::GInS | Condition::IInS | Condition::IInC => lhs,
    }
}

/// Recomputes the condition by truncated weighted summation over the
/// coefficient sequence it is about, and compares with the closed form.
///
/// `F ∈ S/C` sum the `S`/`C` weights over `F`'s coefficients; `G ∈ C/S`
/// over `G`'s; `I ∈ S/C` over the Hadamard product of `K(m,z)` with the
/// sequence saturating `|a_n| ≤ (A−B)|τ|/n`.
pub fn crosscheck_detail<T: Scalar>(
    pid: PredicateId,
    p: PoissonParams<T>,
    c: &ClassParams<T>,
    r: Option<&RParams<T>>,
    policy: &TruncationPolicy<T>,
) -> Result<Crosscheck<T>> {
    let lhs = closed_form_lhs(pid, p, c, r)?;
    let c = pid.effective_params(c);
    let closed_form = to_coefficient_scale(pid, p, c.rhs(), lhs);
    let (seq, which) = match pid.condition() {
        Condition::FInS => (coeffs_f(p, policy)?, LemmaClass::S),
        Condition::FInC => (coeffs_f(p, policy)?, LemmaClass::C),
        Condition::GInC => (coeffs_g(p, policy)?, LemmaClass::C),
        Condition::GInS => (coeffs_g(p, policy)?, LemmaClass::S),
        cond @ (Condition::IInS | Condition::IInC) => {
            let r = require_r(pid, r)?;
            let n = choose_truncation(p, policy, WeightGrowth::Quadratic)?;
            let worst = worst_case_r_coeffs(&r, n);
            let which = if cond == Condition::IInS {
                LemmaClass::S
            } else {
                LemmaClass::C
            };
            (apply_operator_i(&worst, p).magnitudes(), which)
        }
    };
    let (series, _) = lemma_sum(&seq, &c, which)?;
    Ok(Crosscheck {
        closed_form,
        series,
        residual: (closed_form - series).abs(),
        truncation_order: seq.order(),
    })
}

/// `|closed form − series|` on the coefficient-sum scale.
pub fn crosscheck<T: Scalar>(
    pid: PredicateId,
    p: PoissonParams<T>,
    c: &ClassParams<T>,
    r: Option<&RParams<T>>,
    policy: &TruncationPolicy<T>,
) -> Result<T> {
    crosscheck_detail(pid, p, c, r, policy).map(|x| x.residual)
}

/// [`evaluate`] with the cross-check residual and truncation order filled in.
pub fn evaluate_with_crosscheck<T: Scalar>(
    pid: PredicateId,
    p: PoissonParams<T>,
    c: &ClassParams<T>,
    r: Option<&RParams<T>>,
    policy: &TruncationPolicy<T>,
) -> Result<MembershipReport<T>> {
    let mut report = evaluate(pid, p, c, r)?;
    let x = crosscheck_detail(pid, p, c, r, policy)?;
    report.crosscheck_residual = Some(x.residual);
    report.truncation_order = Some(x.truncation_order);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;
    use std::f64::consts::E;

    fn pp(m: f64) -> PoissonParams<f64> {
        PoissonParams::new(m).unwrap()
    }
    fn cp(k: f64, l: f64) -> ClassParams<f64> {
        ClassParams::new(k, l).unwrap()
    }
    fn rp(a: f64, b: f64, re: f64, im: f64) -> RParams<f64> {
        RParams::new(a, b, Complex::new(re, im)).unwrap()
    }

    #[test]
    fn predicate_names_round_trip() {
        for pid in PredicateId::ALL {
            assert_eq!(pid.as_str().parse::<PredicateId>().unwrap(), pid);
        }
        assert!("T7".parse::<PredicateId>().is_err());
        assert_eq!(PredicateId::C5_G_in_Ck.parent(), PredicateId::T3_G_in_C);
        assert!(PredicateId::C4_I_in_Ck.needs_r_params());
        assert!(!PredicateId::T4_G_in_S.is_corollary());
    }

    #[test]
    fn t1_examples() {
        let c = cp(1.0, 0.0);
        assert!((t1_lhs(pp(1.0), &c) - 2.0 * E).abs() < 1e-15);
        let rep = evaluate(PredicateId::T1_F_in_S, pp(1.0), &c, None).unwrap();
        assert_eq!(rep.verdict, Verdict::Fails);
        let rep = evaluate(PredicateId::T1_F_in_S, pp(1e-12), &c, None).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        assert!((rep.margin - 2.0).abs() < 1e-11);
        let w1 = 0.567_143_290_409_783_8;
        let rep = evaluate(PredicateId::T1_F_in_S, pp(w1), &c, None).unwrap();
        assert_eq!(rep.verdict, Verdict::Marginal);
    }

    #[test]
    fn overflow_guard() {
        let c = cp(1.0, 0.0);
        assert!(t1_lhs(pp(701.0), &c).is_infinite());
        assert!(t2_lhs(pp(1e6), &c).is_infinite());
        let rep = evaluate(PredicateId::T2_F_in_C, pp(800.0), &c, None).unwrap();
        assert_eq!(rep.verdict, Verdict::Fails);
        // conditions without e^m stay finite
        assert!(t4_lhs(pp(1e6), &c).is_finite());
    }

    #[test]
    fn t2_examples() {
        let c = cp(1.0, 0.0);
        assert!((t2_lhs(pp(1.0), &c) - 8.0 * E).abs() < 1e-14);
        assert!(t2_lhs(pp(1e-14), &c) < 1e-12);
        for (k, l) in [(0.1, 0.0), (0.5, 0.5), (1.0, 0.99), (0.73, 0.21)] {
            let c = cp(k, l);
            let lhs = 3.0 * c.slope() + (1.0 - l) * (k - 1.0);
            assert!((lhs - t2_linear_coeff(&c)).abs() < 1e-14);
        }
    }

    #[test]
    fn t4_examples() {
        for l in [0.0, 0.4, 0.9] {
            for m in [1e-9, 0.3, 2.0, 30.0, 60.0] {
                let v = t4_lhs(pp(m), &cp(1.0, l));
                assert!((v - 2.0 * (-(-m).exp_m1())).abs() < 1e-15);
                assert!(v <= 2.0);
                let margin =
                    closed_form_margin(PredicateId::T4_G_in_S, pp(m), &cp(1.0, l), None).unwrap();
                assert!(margin > 0.0);
                assert!((margin - 2.0 * (-m).exp()).abs() <= 1e-15 * margin);
            }
        }
        assert!(t4_lhs(pp(1e-10), &cp(0.5, 0.0)) < 1e-9);
        assert!((t4_lhs(pp(1.0), &cp(0.5, 0.0)) - 0.816_060_279_414_278_8).abs() < 1e-15);
    }

    #[test]
    fn t5_t6_examples() {
        let r = rp(1.0, -1.0, 1.0, 0.0);
        let c = cp(1.0, 0.0);
        let v = t5_lhs(pp(1.0), &c, &r);
        assert!((v - 2.528_482_235_314_230_7).abs() < 1e-15);
        assert_eq!(
            evaluate(PredicateId::T5_I_in_S, pp(1.0), &c, Some(&r))
                .unwrap()
                .verdict,
            Verdict::Fails
        );
        let v = t6_lhs(pp(0.1), &c, &r);
        assert!((v - 0.780_650_327_856_161_7).abs() < 1e-15);
        assert!(t6_lhs(pp(1e-15), &c, &r) < 1e-14);
    }

    #[test]
    fn stable_margin_agrees_with_difference() {
        for (k, l) in [(0.2, 0.0), (0.5, 0.7), (0.99, 0.1)] {
            for m in [1e-6, 0.1, 0.49, 0.51, 3.0, 12.0] {
                let c = cp(k, l);
                let direct = c.rhs() - t4_lhs(pp(m), &c);
                let stable = closed_form_margin(PredicateId::T4_G_in_S, pp(m), &c, None).unwrap();
                assert!((direct - stable).abs() < 1e-14, "k={k} l={l} m={m}");
            }
        }
    }

    #[test]
    fn missing_r_params() {
        let c = cp(1.0, 0.0);
        for pid in [PredicateId::T5_I_in_S, PredicateId::C4_I_in_Ck] {
            assert!(matches!(
                evaluate(pid, pp(1.0), &c, None),
                Err(Error::MissingRParams(_))
            ));
        }
    }

    #[test]
    fn crosscheck_examples() {
        let policy = TruncationPolicy::default();
        let r = crosscheck(
            PredicateId::T1_F_in_S,
            pp(1.0),
            &cp(1.0, 0.0),
            None,
            &policy,
        )
        .unwrap();
        assert!(r < 1e-10);
        let r = crosscheck(
            PredicateId::T2_F_in_C,
            pp(2.0),
            &cp(0.3, 0.7),
            None,
            &policy,
        )
        .unwrap();
        assert!(r < 1e-10);
        let rr = rp(1.0, 0.0, 1.0, 1.0);
        let r = crosscheck(
            PredicateId::T5_I_in_S,
            pp(1.0),
            &cp(0.5, 0.25),
            Some(&rr),
            &policy,
        )
        .unwrap();
        assert!(r < 1e-10);
    }

    #[test]
    fn crosscheck_fills_report() {
        let rep = evaluate_with_crosscheck(
            PredicateId::T4_G_in_S,
            pp(1.0),
            &cp(0.5, 0.0),
            None,
            &TruncationPolicy::default(),
        )
        .unwrap();
        assert!(rep.crosscheck_residual.unwrap() < 1e-12);
        assert!(rep.truncation_order.unwrap() >= 12);
        assert_eq!(rep.verdict, Verdict::Holds);
    }

    #[test]
    fn t6_matches_proof_expression() {
        // e^{-m} (a m e^m + 2k (e^m − 1)) with a = slope, times (A−B)|τ|
        let c = cp(0.6, 0.3);
        let r = rp(0.7, -0.2, 0.3, -1.1);
        for m in [0.01f64, 0.5, 3.0, 9.0] {
            let e: f64 = m.exp();
            let oracle = r.scale() * (-m).exp() * (c.slope() * m * e + c.rhs() * (e - 1.0));
            assert!((t6_lhs(pp(m), &c, &r) - oracle).abs() < 1e-13 * oracle.max(1.0));
        }
    }
}
