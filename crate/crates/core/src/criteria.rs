//! Coefficient criteria for `S(k,λ)`, `C(k,λ)` and the coefficient bound
//! for `R^τ(A,B)`.

use std::fmt;

use num_complex::Complex;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::CoefficientSeq;
use crate::theorems::PredicateId;

/// Half-width of the band around `lhs = 2k` reported as [`Verdict::Marginal`].
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Parameters `(k, λ)` of `S(k,λ)` and `C(k,λ)`, with `0 < k ≤ 1`, `0 ≤ λ < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassParams<T> {
    k: T,
    lambda: T,
}

impl<T: Scalar> ClassParams<T> {
    pub fn new(k: T, lambda: T) -> Result<Self> {
        if !(k > T::zero() && k <= T::one()) {
            return Err(Error::param("k", "(0,1]", k.as_f64()));
        }
        if !(lambda >= T::zero() && lambda < T::one()) {
            return Err(Error::param("lambda", "[0,1)", lambda.as_f64()));
        }
        Ok(Self { k, lambda })
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    /// Same `k` with `λ = 0`, i.e. the classes `S(k)` and `C(k)`.
    pub fn with_lambda_zero(self) -> Self {
        Self {
            k: self.k,
            lambda: T::zero(),
        }
    }

    /// `(1−λ) + k(1+λ)`, the slope of the `S` weight in `n`.
    pub fn slope(&self) -> T {
        let one = T::one();
        (one - self.lambda) + self.k * (one + self.lambda)
    }

    /// `(1−λ)(1−k)`, the offset subtracted in the `S` weight.
    pub fn offset(&self) -> T {
        let one = T::one();
        (one - self.lambda) * (one - self.k)
    }

    /// Right-hand side `2k` of every criterion.
    pub fn rhs(&self) -> T {
        self.k + self.k
    }
}

/// Parameters `(A, B, τ)` of `R^τ(A,B)`: `−1 ≤ B < A ≤ 1`, `τ ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RParams<T> {
    a: T,
    b: T,
    tau: Complex<T>,
}

impl<T: Scalar> RParams<T> {
    pub fn new(a: T, b: T, tau: Complex<T>) -> Result<Self> {
        if !(a <= T::one() && a > -T::one()) {
            return Err(Error::param("A", "(-1,1]", a.as_f64()));
        }
        if !(b >= -T::one() && b < a) {
            return Err(Error::param("B", "[-1,A)", b.as_f64()));
        }
        let norm = tau.norm();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::param("tau", "C \\ {0}", norm.as_f64()));
        }
        Ok(Self { a, b, tau })
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn b(&self) -> T {
        self.b
    }

    pub fn tau(&self) -> Complex<T> {
        self.tau
    }

    /// `(A−B)|τ|`.
    pub fn scale(&self) -> T {
        (self.a - self.b) * self.tau.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Marginal,
}

impl Verdict {
    /// Classifies `margin = rhs − lhs` with the symmetric band `±tol`.
    pub fn classify<T: Scalar>(margin: T, tol: T) -> Self {
        Self::classify_band(margin, tol, tol)
    }

    /// `Holds` above `+upper`, `Fails` below `−lower`, `Marginal` in between.
    pub fn classify_band<T: Scalar>(margin: T, lower: T, upper: T) -> Self {
        if margin > upper {
            Verdict::Holds
        } else if margin < -lower {
            Verdict::Fails
        } else {
            Verdict::Marginal
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Marginal => "marginal",
        }
    }

    /// `Holds` or `Marginal`.
    pub fn admits(self) -> bool {
        !matches!(self, Verdict::Fails)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which coefficient criterion: `S(k,λ)` (weights `w_S`) or `C(k,λ)`
/// (weights `n·w_S`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LemmaClass {
    S,
    C,
}

/// What a [`MembershipReport`] is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    Lemma(LemmaClass),
    Theorem(PredicateId),
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Criterion::Lemma(LemmaClass::S) => f.write_str("LEMMA_S"),
            Criterion::Lemma(LemmaClass::C) => f.write_str("LEMMA_C"),
            Criterion::Theorem(pid) => f.write_str(pid.as_str()),
        }
    }
}

impl Serialize for Criterion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Verdict of one criterion at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport<T> {
    pub predicate: Criterion,
    pub verdict: Verdict,
    pub lhs: T,
    pub rhs: T,
    /// `rhs − lhs`; nonnegative means membership.
    pub margin: T,
    #[serde(rename = "residual")]
    pub crosscheck_residual: Option<T>,
    #[serde(rename = "N")]
    pub truncation_order: Option<usize>,
}

/// `n((1−λ)+k(1+λ)) − (1−λ)(1−k)`.
pub fn weight_s<T: Scalar>(n: usize, c: &ClassParams<T>) -> T {
    T::from_index(n) * c.slope() - c.offset()
}

/// `n · weight_s(n)`.
pub fn weight_c<T: Scalar>(n: usize, c: &ClassParams<T>) -> T {
    T::from_index(n) * weight_s(n, c)
}

pub fn lemma_weight<T: Scalar>(which: LemmaClass, n: usize, c: &ClassParams<T>) -> T {
    match which {
        LemmaClass::S => weight_s(n, c),
        LemmaClass::C => weight_c(n, c),
    }
}

/// Weighted coefficient sum `Σ w(n) b_n` of a negative-tail function,
/// compared against `2k`.
///
/// The truncated sum undershoots the full one; the shortfall is estimated
/// by `w(N+1) · tail_bound` and widens the `Marginal` band on the `Holds`
/// side only, so a `Holds` verdict stays conservative. General-tail inputs
/// are rejected.
pub fn lemma_sum<T: Scalar>(
    f: &CoefficientSeq<T>,
    c: &ClassParams<T>,
    which: LemmaClass,
) -> Result<(T, MembershipReport<T>)> {
    let b = f.negative_coeffs().ok_or(Error::WrongConvention {
        expected: "negative-tail",
    })?;
    let lhs = b.iter().enumerate().fold(T::zero(), |acc, (i, v)| {
        acc + lemma_weight(which, i + 2, c) * *v
    });
    let n = f.order();
    let tail_allowance = lemma_weight(which, n + 1, c) * f.tail_bound();
    let rhs = c.rhs();
    let margin = rhs - lhs;
    let tol = T::lit(BOUNDARY_TOL);
    let report = MembershipReport {
        predicate: Criterion::Lemma(which),
        verdict: Verdict::classify_band(margin, tol, tol + tail_allowance),
        lhs,
        rhs,
        margin,
        crosscheck_residual: None,
        truncation_order: Some(n),
    };
    Ok((lhs, report))
}

/// `(A−B)|τ|/n`, the sharp bound on `|a_n|` over `R^τ(A,B)`.
pub fn dixit_pal_bound<T: Scalar>(n: usize, r: &RParams<T>) -> T {
    r.scale() / T::from_index(n)
}

/// The polynomial `z + Σ_{n=2}^{N} (A−B)|τ|/n · zⁿ` saturating the bound at
/// every index up to `N`.
///
/// The full worst-case sequence is not summable, so the result stands for
/// the degree-`N` polynomial itself and carries a zero tail bound.
///
/// Panics if `order < 2`.
pub fn worst_case_r_coeffs<T: Scalar>(r: &RParams<T>, order: usize) -> CoefficientSeq<T> {
    assert!(order >= 2, "worst-case sequence needs N >= 2");
    let a = (2..=order)
        .map(|n| Complex::new(dixit_pal_bound(n, r), T::zero()))
        .collect();
    CoefficientSeq::general(a, T::zero()).expect("bounds are finite")
}
