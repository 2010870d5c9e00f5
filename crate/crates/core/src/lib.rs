//! Membership criteria for the Poisson distribution series
//! `F(m,z) = z − Σ e^{−m} m^{n−1}/(n−1)! zⁿ`, the integral operator
//! `G(m,z) = ∫₀^z F(m,t)/t dt` and the Hadamard operator `I(m,z)f` in the
//! classes `S(k,λ)`, `C(k,λ)` and `R^τ(A,B)`.
//!
//! Every closed-form condition is paired with an independent route: a
//! truncated weighted coefficient sum with a certified tail, and sampling
//! of the analytic class definitions inside the unit disk.
//!
//! The math is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix `f64`, which the default tolerances assume.
//!
//! ```
//! use poisson_gft::{evaluate, ClassParams, PoissonParams, PredicateId, Verdict};
//!
//! let p = PoissonParams::new(0.5).unwrap();
//! let c = ClassParams::new(1.0, 0.0).unwrap();
//! let report = evaluate(PredicateId::T1_F_in_S, p, &c, None).unwrap();
//! assert_eq!(report.verdict, Verdict::Holds);
//! ```

// `!(x > 0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod criteria;
pub mod error;
pub mod json;
pub mod scalar;
pub mod series;
pub mod suite;
pub mod theorems;
pub mod threshold;

pub use analytic::{
    c_condition_value, eval_deriv, eval_series, grid_check, r_condition_value, s_condition_value,
    witness_search, ClassCondition, ConditionId, ConditionValue, GridReport, GridSpec,
};
pub use criteria::{
    dixit_pal_bound, lemma_sum, weight_c, weight_s, worst_case_r_coeffs, ClassParams, Criterion,
    LemmaClass, MembershipReport, RParams, Verdict, BOUNDARY_TOL,
};
pub use error::{Error, Result};
pub use scalar::Scalar;
pub use series::{
    apply_operator_i, choose_truncation, coeffs_f, coeffs_g, partial_exp_sum, poisson_coeff,
    shifted_exp_sum, CoefficientSeq, Convention, PoissonParams, PoissonTerms, SumKind,
    TruncationPolicy, WeightGrowth,
};
pub use theorems::{
    closed_form_lhs, closed_form_margin, crosscheck, crosscheck_detail, evaluate,
    evaluate_with_crosscheck, t1_lhs, t2_lhs, t3_lhs, t4_lhs, t5_lhs, t6_lhs, Crosscheck,
    PredicateId,
};
pub use threshold::{solve_m_star, Outcome, ThresholdResult};

pub type Complex64 = num_complex::Complex<f64>;
pub type Poisson = PoissonParams<f64>;
pub type Series = CoefficientSeq<f64>;
pub type Policy = TruncationPolicy<f64>;
pub type Class = ClassParams<f64>;
pub type RClass = RParams<f64>;
pub type Report = MembershipReport<f64>;
pub type Grid = GridSpec<f64>;
pub type GridResult = GridReport<f64>;
pub type Threshold = ThresholdResult<f64>;
