//! Poisson-weighted coefficient sequences and certified truncation.
//!
//! Every sequence here represents a normalized function
//! `f(z) = z ± Σ_{n≥2} a_n z^n` truncated at some order `N`, together with
//! an upper bound on the absolute mass of the discarded tail.

use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Poisson parameter `m > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonParams<T> {
    m: T,
}

impl<T: Scalar> PoissonParams<T> {
    pub fn new(m: T) -> Result<Self> {
        if !(m > T::zero()) || !m.is_finite() {
            return Err(Error::param("m", "(0, inf)", m.as_f64()));
        }
        Ok(Self { m })
    }

    #[inline]
    pub fn m(&self) -> T {
        self.m
    }
}

/// Sign convention of the tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Convention {
    /// `f(z) = z − Σ b_n z^n` with `b_n = |a_n| ≥ 0` stored.
    #[serde(rename = "negative")]
    NegativeTail,
    /// `f(z) = z + Σ a_n z^n` with complex `a_n`.
    #[serde(rename = "general")]
    GeneralTail,
}

#[derive(Debug, Clone, PartialEq)]
enum Coefficients<T> {
    Negative(Vec<T>),
    General(Vec<Complex<T>>),
}

/// A truncated normalized power series. Coefficients are stored for
/// `n = 2..=N`; `a_1 = 1` is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSeq<T> {
    coeffs: Coefficients<T>,
    m: Option<T>,
    tail_bound: T,
}

fn check_tail<T: Scalar>(tail_bound: T) -> Result<()> {
    if tail_bound >= T::zero() && tail_bound.is_finite() {
        Ok(())
    } else {
        Err(Error::MalformedSeries(format!(
            "tail_bound must be finite and >= 0 (got {tail_bound})"
        )))
    }
}

impl<T: Scalar> CoefficientSeq<T> {
    /// `z − Σ_{n=2}^{N} b_n z^n`, where `b[0]` is `b_2`.
    pub fn negative(b: Vec<T>, tail_bound: T) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::MalformedSeries("need at least b_2 (N >= 2)".into()));
        }
        if let Some((i, v)) = b
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v >= T::zero()) || !v.is_finite())
        {
            return Err(Error::MalformedSeries(format!(
                "negative-tail magnitude b_{} = {v} must be finite and >= 0",
                i + 2
            )));
        }
        check_tail(tail_bound)?;
        Ok(Self {
            coeffs: Coefficients::Negative(b),
            m: None,
            tail_bound,
        })
    }

    /// `z + Σ_{n=2}^{N} a_n z^n`, where `a[0]` is `a_2`.
    pub fn general(a: Vec<Complex<T>>, tail_bound: T) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::MalformedSeries("need at least a_2 (N >= 2)".into()));
        }
        if a.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::MalformedSeries("coefficients must be finite".into()));
        }
        check_tail(tail_bound)?;
        Ok(Self {
            coeffs: Coefficients::General(a),
            m: None,
            tail_bound,
        })
    }

    /// The identity `f(z) = z`, stored as `z − 0·z²`.
    pub fn identity() -> Self {
        Self {
            coeffs: Coefficients::Negative(vec![T::zero()]),
            m: None,
            tail_bound: T::zero(),
        }
    }

    /// Tags the sequence with the Poisson parameter it was generated from.
    pub fn with_m(mut self, m: Option<T>) -> Self {
        self.m = m;
        self
    }

    pub fn convention(&self) -> Convention {
        match self.coeffs {
            Coefficients::Negative(_) => Convention::NegativeTail,
            Coefficients::General(_) => Convention::GeneralTail,
        }
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        match &self.coeffs {
            Coefficients::Negative(b) => b.len() + 1,
            Coefficients::General(a) => a.len() + 1,
        }
    }

    pub fn m(&self) -> Option<T> {
        self.m
    }

    pub fn tail_bound(&self) -> T {
        self.tail_bound
    }

    /// Magnitudes `b_2..b_N` for a negative-tail sequence.
    pub fn negative_coeffs(&self) -> Option<&[T]> {
        match &self.coeffs {
            Coefficients::Negative(b) => Some(b),
            Coefficients::General(_) => None,
        }
    }

    pub fn general_coeffs(&self) -> Option<&[Complex<T>]> {
        match &self.coeffs {
            Coefficients::General(a) => Some(a),
            Coefficients::Negative(_) => None,
        }
    }

    /// Signed coefficient `a_n` of `z^n` for `2 ≤ n ≤ N`; zero past `N`.
    pub fn coefficient(&self, n: usize) -> Complex<T> {
        assert!(n >= 2, "coefficient index starts at 2");
        match &self.coeffs {
            Coefficients::Negative(b) => b
                .get(n - 2)
                .map_or(Complex::new(T::zero(), T::zero()), |v| {
                    Complex::new(-*v, T::zero())
                }),
            Coefficients::General(a) => a
                .get(n - 2)
                .copied()
                .unwrap_or(Complex::new(T::zero(), T::zero())),
        }
    }

    /// Signed coefficients `a_2..a_N`.
    pub fn signed_coefficients(&self) -> Vec<Complex<T>> {
        (2..=self.order()).map(|n| self.coefficient(n)).collect()
    }

    /// The negative-tail function `z − Σ|a_n| z^n` with the same magnitudes.
    pub fn magnitudes(&self) -> Self {
        let b = match &self.coeffs {
            Coefficients::Negative(b) => b.clone(),
            Coefficients::General(a) => a.iter().map(|c| c.norm()).collect(),
        };
        Self {
            coeffs: Coefficients::Negative(b),
            m: self.m,
            tail_bound: self.tail_bound,
        }
    }

    /// The series of `z f'(z)`: `a_n ↦ n a_n`.
    ///
    /// The tail bound becomes `2 (N+1) · tail_bound`, which holds whenever the
    /// discarded magnitudes decay at least geometrically with ratio 1/2 (true
    /// for every Poisson sequence produced by this module).
    pub fn z_derivative(&self) -> Self {
        let coeffs = match &self.coeffs {
            Coefficients::Negative(b) => Coefficients::Negative(
                b.iter()
                    .enumerate()
                    .map(|(i, v)| *v * T::from_index(i + 2))
                    .collect(),
            ),
            Coefficients::General(a) => Coefficients::General(
                a.iter()
                    .enumerate()
                    .map(|(i, v)| *v * T::from_index(i + 2))
                    .collect(),
            ),
        };
        let n1 = T::from_index(self.order() + 1);
        Self {
            coeffs,
            m: self.m,
            tail_bound: T::lit(2.0) * n1 * self.tail_bound,
        }
    }
}

/// Target tail error and order limits for truncating an entire series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy<T> {
    eps: T,
    n_min: usize,
    n_max: usize,
}

impl<T: Scalar> TruncationPolicy<T> {
    pub fn new(eps: T, n_min: usize, n_max: usize) -> Result<Self> {
        if !(eps > T::zero()) || !eps.is_finite() {
            return Err(Error::param("eps", "(0, inf)", eps.as_f64()));
        }
        if n_min < 2 {
            return Err(Error::param("n_min", "[2, n_max]", n_min as f64));
        }
        if n_max < n_min {
            return Err(Error::param("n_max", "[n_min, inf)", n_max as f64));
        }
        Ok(Self { eps, n_min, n_max })
    }

    pub fn with_eps(eps: T) -> Result<Self> {
        Self::new(eps, 2, DEFAULT_N_MAX)
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn n_min(&self) -> usize {
        self.n_min
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }
}

pub const DEFAULT_EPS: f64 = 1e-12;
pub const DEFAULT_N_MAX: usize = 100_000;

impl<T: Scalar> Default for TruncationPolicy<T> {
    fn default() -> Self {
        Self {
            eps: T::lit(DEFAULT_EPS),
            n_min: 2,
            n_max: DEFAULT_N_MAX,
        }
    }
}

/// Polynomial growth of the weight multiplying the Poisson terms in a sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightGrowth {
    Constant,
    Linear,
    Quadratic,
}

impl WeightGrowth {
    pub fn weight<T: Scalar>(self, n: usize) -> T {
        let n = T::from_index(n);
        match self {
            WeightGrowth::Constant => T::one(),
            WeightGrowth::Linear => n,
            WeightGrowth::Quadratic => n * n,
        }
    }
}

/// Iterator over `(n, e^{−m} m^{n−1}/(n−1)!)` for `n = 2, 3, …`.
///
/// Uses the multiplicative recurrence `c_{n+1} = c_n · m/n`. When `e^{−m}`
/// would underflow the recurrence runs on logarithms instead.
#[derive(Debug, Clone)]
pub struct PoissonTerms<T> {
    m: T,
    n: usize,
    state: TermState<T>,
}

#[derive(Debug, Clone, Copy)]
enum TermState<T> {
    Direct(T),
    Log(T),
}

impl<T: Scalar> PoissonTerms<T> {
    pub fn new(p: PoissonParams<T>) -> Self {
        let m = p.m();
        let decay = (-m).exp();
        let state = if decay > T::min_positive_value() / T::epsilon() {
            TermState::Direct(m * decay)
        } else {
            TermState::Log(m.ln() - m)
        };
        Self { m, n: 2, state }
    }
}

impl<T: Scalar> Iterator for PoissonTerms<T> {
    type Item = (usize, T);

    fn next(&mut self) -> Option<Self::Item> {
        let n = self.n;
        let nf = T::from_index(n);
        let value = match &mut self.state {
            TermState::Direct(c) => {
                let v = *c;
                *c = v * self.m / nf;
                v
            }
            TermState::Log(l) => {
                let v = l.exp();
                *l = *l + self.m.ln() - nf.ln();
                v
            }
        };
        self.n += 1;
        Some((n, value))
    }
}

/// `P(X = n−1) = e^{−m} m^{n−1}/(n−1)!`, the coefficient of `z^n` in `K(m,z)`.
///
/// Panics if `n < 2`.
pub fn poisson_coeff<T: Scalar>(p: PoissonParams<T>, n: usize) -> T {
    assert!(n >= 2, "poisson_coeff is defined for n >= 2");
    PoissonTerms::new(p)
        .nth(n - 2)
        .map(|(_, c)| c)
        .expect("unbounded iterator")
}

fn truncation_floor<T: Scalar>(p: PoissonParams<T>, policy: &TruncationPolicy<T>) -> usize {
    let ceil_m = p.m().ceil().to_usize().unwrap_or(usize::MAX / 4);
    policy
        .n_min
        .max(ceil_m.saturating_mul(2).saturating_add(10))
}

/// Smallest order `N` at which a Poisson-weighted sum may be cut.
///
/// `N ≥ max(n_min, 2⌈m⌉+10)` and `2·w(N)·c_N < eps`. Past the floor the
/// weighted term ratio is at most 1/2, so `Σ_{n>N} w(n) c_n ≤ w(N) c_N < eps/2`.
pub fn choose_truncation<T: Scalar>(
    p: PoissonParams<T>,
    policy: &TruncationPolicy<T>,
    growth: WeightGrowth,
) -> Result<usize> {
    let floor = truncation_floor(p, policy);
    let not_reached = || Error::TruncationNotReached {
        eps: policy.eps.as_f64(),
        n_max: policy.n_max,
    };
    if floor > policy.n_max {
        return Err(not_reached());
    }
    let two = T::lit(2.0);
    for (n, c) in PoissonTerms::new(p) {
        if n > policy.n_max {
            break;
        }
        if n >= floor && two * growth.weight::<T>(n) * c < policy.eps {
            return Ok(n);
        }
    }
    Err(not_reached())
}

/// Coefficients of `F(m,z) = 2z − K(m,z) = z − Σ e^{−m} m^{n−1}/(n−1)! zⁿ`.
///
/// The order is chosen for quadratic weights so the sequence can feed both
/// coefficient criteria.
pub fn coeffs_f<T: Scalar>(
    p: PoissonParams<T>,
    policy: &TruncationPolicy<T>,
) -> Result<CoefficientSeq<T>> {
    let n = choose_truncation(p, policy, WeightGrowth::Quadratic)?;
    let mut terms = PoissonTerms::new(p);
    let b: Vec<T> = terms.by_ref().take(n - 1).map(|(_, c)| c).collect();
    let (_, next) = terms.next().expect("unbounded iterator");
    Ok(CoefficientSeq {
        coeffs: Coefficients::Negative(b),
        m: Some(p.m()),
        tail_bound: T::lit(2.0) * next,
    })
}

/// Coefficients of `G(m,z) = ∫₀^z F(m,t)/t dt = z − Σ e^{−m} m^{n−1}/n! zⁿ`.
pub fn coeffs_g<T: Scalar>(
    p: PoissonParams<T>,
    policy: &TruncationPolicy<T>,
) -> Result<CoefficientSeq<T>> {
    let n = choose_truncation(p, policy, WeightGrowth::Quadratic)?;
    let mut terms = PoissonTerms::new(p).map(|(n, c)| c / T::from_index(n));
    let b: Vec<T> = terms.by_ref().take(n - 1).collect();
    let next = terms.next().expect("unbounded iterator");
    Ok(CoefficientSeq {
        coeffs: Coefficients::Negative(b),
        m: Some(p.m()),
        tail_bound: T::lit(2.0) * next,
    })
}

/// Hadamard product `K(m,z) ∗ f(z)`: `a_n ↦ e^{−m} m^{n−1}/(n−1)! · a_n`.
///
/// Keeps the order and sign convention of `f`. Since every Poisson weight is
/// a probability, the result's tail is bounded by `f`'s tail times the
/// largest weight past `N`.
pub fn apply_operator_i<T: Scalar>(
    f: &CoefficientSeq<T>,
    p: PoissonParams<T>,
) -> CoefficientSeq<T> {
    let n_order = f.order();
    let mut terms = PoissonTerms::new(p);
    let weights: Vec<T> = terms.by_ref().take(n_order - 1).map(|(_, c)| c).collect();
    let (_, next) = terms.next().expect("unbounded iterator");
    // c_n is decreasing once n − 1 ≥ m
    let tail_weight = if T::from_index(n_order) >= p.m() {
        next
    } else {
        T::one()
    };
    let coeffs = match &f.coeffs {
        Coefficients::Negative(b) => {
            Coefficients::Negative(b.iter().zip(&weights).map(|(v, w)| *v * *w).collect())
        }
        Coefficients::General(a) => {
            Coefficients::General(a.iter().zip(&weights).map(|(v, w)| *v * *w).collect())
        }
    };
    CoefficientSeq {
        coeffs,
        m: Some(p.m()),
        tail_bound: f.tail_bound * tail_weight,
    }
}

/// Shifted exponential sums appearing when the coefficient criteria are
/// evaluated on Poisson sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SumKind {
    /// `Σ_{n≥2} m^{n−1}/(n−1)! = e^m − 1`
    Shift1,
    /// `Σ_{n≥2} m^{n−1}/(n−2)! = m e^m`
    Shift2,
    /// `Σ_{n≥3} m^{n−1}/(n−3)! = m² e^m`
    Shift3,
    /// `Σ_{n≥2} m^{n−1}/n! = (e^m − 1 − m)/m`
    OverNFact,
    /// `Σ_{n≥2} mⁿ/n! = e^m − 1 − m`
    PowNOverNFact,
}

impl SumKind {
    pub const ALL: [SumKind; 5] = [
        SumKind::Shift1,
        SumKind::Shift2,
        SumKind::Shift3,
        SumKind::OverNFact,
        SumKind::PowNOverNFact,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SumKind::Shift1 => "Shift1",
            SumKind::Shift2 => "Shift2",
            SumKind::Shift3 => "Shift3",
            SumKind::OverNFact => "OverNFact",
            SumKind::PowNOverNFact => "PowNOverNFact",
        }
    }
}

/// `Σ_{j≥start} mʲ/j!` for small `m`, summed until terms stop contributing.
fn exp_series_from<T: Scalar>(m: T, start: usize) -> T {
    let mut term = T::one();
    for j in 1..=start {
        term = term * m / T::from_index(j);
    }
    let mut sum = T::zero();
    let mut j = start;
    while term > sum * T::epsilon() * T::lit(0.25) && j < start + 200 {
        sum = sum + term;
        j += 1;
        term = term * m / T::from_index(j);
    }
    sum
}

const SMALL_M: f64 = 0.5;

/// `e^m − 1 − m`, accurate for small `m`.
pub(crate) fn exp_minus_1_minus_m<T: Scalar>(m: T) -> T {
    if m < T::lit(SMALL_M) {
        exp_series_from(m, 2)
    } else {
        m.exp_m1() - m
    }
}

/// Closed form of the requested shifted exponential sum.
pub fn shifted_exp_sum<T: Scalar>(p: PoissonParams<T>, kind: SumKind) -> T {
    let m = p.m();
    match kind {
        SumKind::Shift1 => m.exp_m1(),
        SumKind::Shift2 => m * m.exp(),
        SumKind::Shift3 => m * m * m.exp(),
        SumKind::OverNFact => exp_minus_1_minus_m(m) / m,
        SumKind::PowNOverNFact => exp_minus_1_minus_m(m),
    }
}

/// Direct termwise partial sum of `kind` over `n ≤ order`.
///
/// This is the summation route the closed forms are checked against; it
/// never touches `exp`.
pub fn partial_exp_sum<T: Scalar>(p: PoissonParams<T>, kind: SumKind, order: usize) -> T {
    let m = p.m();
    // (first index, first term, ratio term_{n+1}/term_n as a function of n)
    let (first, first_term): (usize, T) = match kind {
        SumKind::Shift1 | SumKind::Shift2 => (2, m),
        SumKind::Shift3 => (3, m * m),
        SumKind::OverNFact => (2, m / T::lit(2.0)),
        SumKind::PowNOverNFact => (2, m * m / T::lit(2.0)),
    };
    let denom = |n: usize| -> T {
        match kind {
            SumKind::Shift1 => T::from_index(n),
            SumKind::Shift2 => T::from_index(n - 1),
            SumKind::Shift3 => T::from_index(n - 2),
            SumKind::OverNFact | SumKind::PowNOverNFact => T::from_index(n + 1),
        }
    };
    let mut sum = T::zero();
    let mut term = first_term;
    for n in first..=order {
        sum = sum + term;
        term = term * m / denom(n);
    }
    sum
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawCoeff<T> {
    Real(T),
    Complex([T; 2]),
}

#[derive(Serialize, Deserialize)]
struct RawSeq<T> {
    convention: Convention,
    m: Option<T>,
    #[serde(rename = "N")]
    n: usize,
    coefficients: Vec<RawCoeff<T>>,
    tail_bound: T,
}

impl<T: Scalar + Serialize> Serialize for CoefficientSeq<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let coefficients = match &self.coeffs {
            Coefficients::Negative(b) => b.iter().map(|v| RawCoeff::Real(*v)).collect(),
            Coefficients::General(a) => a.iter().map(|c| RawCoeff::Complex([c.re, c.im])).collect(),
        };
        RawSeq {
            convention: self.convention(),
            m: self.m,
            n: self.order(),
            coefficients,
            tail_bound: self.tail_bound,
        }
        .serialize(serializer)
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for CoefficientSeq<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawSeq::<T>::deserialize(deserializer)?;
        if raw.n != raw.coefficients.len() + 1 {
            return Err(D::Error::custom(format!(
                "N = {} but {} coefficients given",
                raw.n,
                raw.coefficients.len()
            )));
        }
        let seq = match raw.convention {
            Convention::NegativeTail => {
                let b = raw
                    .coefficients
                    .into_iter()
                    .map(|c| match c {
                        RawCoeff::Real(v) => Ok(v),
                        RawCoeff::Complex(_) => Err(D::Error::custom(
                            "negative convention takes real magnitudes",
                        )),
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                CoefficientSeq::negative(b, raw.tail_bound)
            }
            Convention::GeneralTail => {
                let a = raw
                    .coefficients
                    .into_iter()
                    .map(|c| match c {
                        RawCoeff::Real(v) => Complex::new(v, T::zero()),
                        RawCoeff::Complex([re, im]) => Complex::new(re, im),
                    })
                    .collect();
                CoefficientSeq::general(a, raw.tail_bound)
            }
        };
        if let Some(m) = raw.m {
            if !(m > T::zero()) {
                return Err(D::Error::custom("m must be positive or null"));
            }
        }
        seq.map(|s| s.with_m(raw.m)).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn pp(m: f64) -> PoissonParams<f64> {
        PoissonParams::new(m).unwrap()
    }

    #[test]
    fn rejects_nonpositive_m() {
        assert!(PoissonParams::new(0.0).is_err());
        assert!(PoissonParams::new(-1.0).is_err());
        assert!(PoissonParams::new(f64::NAN).is_err());
        assert!(PoissonParams::new(f64::INFINITY).is_err());
    }

    #[test]
    fn poisson_coeff_examples() {
        assert!((poisson_coeff(pp(1.0), 2) - (-1.0f64).exp()).abs() < 1e-16);
        for m in [0.1, 0.7, 3.0, 9.5] {
            assert!((poisson_coeff(pp(m), 2) - m * (-m).exp()).abs() < 1e-16);
        }
        // e^{-2} * 8/6
        let expected = 0.180_447_044_315_483_59;
        assert!((poisson_coeff(pp(2.0), 4) - expected).abs() < 1e-16);
    }

    #[test]
    fn poisson_coeff_survives_huge_m() {
        // e^{-800} underflows; the log recurrence still finds the mode.
        let p = pp(800.0);
        let peak = poisson_coeff(p, 801);
        // Stirling: 1/sqrt(2πm)
        let approx = 1.0 / (2.0 * std::f64::consts::PI * 800.0).sqrt();
        assert!((peak - approx).abs() / approx < 1e-3);
        assert!(coeffs_f(p, &TruncationPolicy::default()).is_ok());
    }

    #[test]
    fn policy_validation() {
        assert!(TruncationPolicy::new(0.0, 2, 10).is_err());
        assert!(TruncationPolicy::new(1e-12, 1, 10).is_err());
        assert!(TruncationPolicy::new(1e-12, 20, 10).is_err());
        assert!(TruncationPolicy::new(1e-12, 2, 2).is_ok());
    }

    #[test]
    fn choose_truncation_small_m() {
        let n = choose_truncation(
            pp(1.0),
            &TruncationPolicy::default(),
            WeightGrowth::Constant,
        )
        .unwrap();
        assert!(n <= 25);
        let mut fact = 1.0;
        for j in 2..n {
            fact *= j as f64;
        }
        assert!((-1.0f64).exp() / fact * 2.0 < 1e-12);
    }

    #[test]
    fn choose_truncation_floor_rule() {
        let policy = TruncationPolicy::with_eps(1e-10).unwrap();
        for g in [
            WeightGrowth::Constant,
            WeightGrowth::Linear,
            WeightGrowth::Quadratic,
        ] {
            assert!(choose_truncation(pp(10.0), &policy, g).unwrap() >= 30);
        }
        // fractional m rounds up
        assert!(choose_truncation(pp(0.01), &policy, WeightGrowth::Constant).unwrap() >= 12);
    }

    #[test]
    fn choose_truncation_not_reached() {
        let policy = TruncationPolicy::new(1e-12, 2, 20).unwrap();
        assert!(matches!(
            choose_truncation(pp(10.0), &policy, WeightGrowth::Constant),
            Err(Error::TruncationNotReached { n_max: 20, .. })
        ));
        assert!(matches!(
            coeffs_f(pp(10.0), &policy),
            Err(Error::TruncationNotReached { .. })
        ));
    }

    #[test]
    fn shift1_tail_guarantee_at_m3() {
        let p = pp(3.0);
        let policy = TruncationPolicy::default();
        let n = choose_truncation(p, &policy, WeightGrowth::Constant).unwrap();
        let scaled: f64 = PoissonTerms::new(p).take(n - 1).map(|(_, c)| c).sum();
        let closed = (3.0f64.exp() - 1.0) * (-3.0f64).exp();
        assert!((scaled - closed).abs() < 1e-12);
    }

    #[test]
    fn coeffs_f_examples() {
        let f = coeffs_f(pp(1.0), &TruncationPolicy::default()).unwrap();
        assert_eq!(f.convention(), Convention::NegativeTail);
        assert!((f.negative_coeffs().unwrap()[0] - 1.0 / E).abs() < 1e-16);
        assert_eq!(f.m(), Some(1.0));

        let f = coeffs_f(pp(0.5), &TruncationPolicy::with_eps(1e-12).unwrap()).unwrap();
        let b = f.negative_coeffs().unwrap();
        assert!(b.iter().all(|v| *v >= 0.0));
        for (i, w) in b.windows(2).enumerate() {
            let n = i + 2;
            if (n - 1) as f64 > 0.5 {
                assert!(w[1] < w[0]);
            }
        }
    }

    #[test]
    fn coeffs_f_partial_sum_within_tail_of_limit() {
        for m in [0.05, 0.5, 1.0, 4.0, 9.0] {
            let p = pp(m);
            let f = coeffs_f(p, &TruncationPolicy::default()).unwrap();
            let partial: f64 = f.negative_coeffs().unwrap().iter().sum();
            // oracle: plain summation of the pmf to N=200
            let mut oracle = 0.0;
            let mut c = m * (-m).exp();
            for n in 2..=200 {
                oracle += c;
                c *= m / n as f64;
            }
            let limit = -(-m).exp_m1();
            assert!((oracle - limit).abs() < 1e-15);
            assert!((partial - limit).abs() <= f.tail_bound() + 1e-15);
        }
    }

    #[test]
    fn coeffs_g_examples() {
        let policy = TruncationPolicy::default();
        let g = coeffs_g(pp(1.0), &policy).unwrap();
        let f = coeffs_f(pp(1.0), &policy).unwrap();
        let gb = g.negative_coeffs().unwrap();
        assert!((gb[0] - 0.5 / E).abs() < 1e-16);
        for (i, (gv, fv)) in gb.iter().zip(f.negative_coeffs().unwrap()).enumerate() {
            assert!((gv - fv / (i + 2) as f64).abs() <= 1e-17);
        }
        let sum: f64 = gb.iter().sum();
        assert!((sum - 0.264_241_117_657_115_4).abs() < 1e-12);
    }

    #[test]
    fn operator_i_examples() {
        let p = pp(1.0);
        let id = CoefficientSeq::<f64>::general(vec![Complex::new(0.0, 0.0); 5], 0.0).unwrap();
        let out = apply_operator_i(&id, p);
        assert_eq!(out.order(), 6);
        assert!(out.signed_coefficients().iter().all(|c| c.norm() == 0.0));
        assert_eq!(out.tail_bound(), 0.0);

        let f = CoefficientSeq::general(vec![Complex::new(1.0, 0.0)], 0.0).unwrap();
        let out = apply_operator_i(&f, p);
        assert!((out.coefficient(2).re - 1.0 / E).abs() < 1e-16);
        assert_eq!(out.convention(), Convention::GeneralTail);
    }

    #[test]
    fn closed_forms_small_m() {
        let p = pp(1e-8);
        assert!((shifted_exp_sum(p, SumKind::Shift2) - 1e-8).abs() < 1e-15);
        for kind in SumKind::ALL {
            assert!(shifted_exp_sum(p, kind).abs() < 1e-7);
        }
        // (e^m − 1 − m)/m → m/2
        assert!((shifted_exp_sum(p, SumKind::OverNFact) - 0.5e-8).abs() < 1e-16);
    }

    #[test]
    fn closed_forms_at_one() {
        let p = pp(1.0);
        // oracle: partial summation to N = 60
        let s1 = partial_exp_sum(p, SumKind::Shift1, 60);
        let s3 = partial_exp_sum(p, SumKind::Shift3, 60);
        assert!((s1 - (E - 1.0)).abs() < 1e-15);
        assert!((s3 - E).abs() < 1e-15);
        assert!((shifted_exp_sum(p, SumKind::Shift1) - s1).abs() < 1e-15);
        assert!((shifted_exp_sum(p, SumKind::Shift3) - s3).abs() < 1e-15);
    }

    #[test]
    fn series_constructors_validate() {
        assert!(CoefficientSeq::<f64>::negative(vec![], 0.0).is_err());
        assert!(CoefficientSeq::negative(vec![-0.1], 0.0).is_err());
        assert!(CoefficientSeq::negative(vec![0.1], -1.0).is_err());
        assert!(CoefficientSeq::negative(vec![0.1], f64::INFINITY).is_err());
        assert!(CoefficientSeq::<f64>::general(vec![Complex::new(f64::NAN, 0.0)], 0.0).is_err());
    }

    #[test]
    fn z_derivative_map() {
        let f = CoefficientSeq::negative(vec![0.3, 0.1], 0.0).unwrap();
        let g = f.z_derivative();
        assert_eq!(g.negative_coeffs().unwrap(), &[0.6, 0.30000000000000004]);
    }

    #[test]
    fn json_schema() {
        let f = CoefficientSeq::negative(vec![0.25, 0.125], 0.0)
            .unwrap()
            .with_m(Some(1.0));
        let v = serde_json::to_value(&f).unwrap();
        assert_eq!(
            v,
            serde_json::json!({
                "convention": "negative", "m": 1.0, "N": 3,
                "coefficients": [0.25, 0.125], "tail_bound": 0.0
            })
        );
        let g = CoefficientSeq::general(vec![Complex::new(1.0, -2.0)], 0.5).unwrap();
        let v = serde_json::to_value(&g).unwrap();
        assert_eq!(v["coefficients"], serde_json::json!([[1.0, -2.0]]));
        assert_eq!(v["m"], serde_json::Value::Null);

        let bad = r#"{"convention":"negative","m":null,"N":4,"coefficients":[0.1],"tail_bound":0}"#;
        assert!(serde_json::from_str::<CoefficientSeq<f64>>(bad).is_err());
        let bad =
            r#"{"convention":"negative","m":null,"N":2,"coefficients":[-0.1],"tail_bound":0}"#;
        assert!(serde_json::from_str::<CoefficientSeq<f64>>(bad).is_err());
    }

    #[test]
    fn works_in_f32() {
        let p = PoissonParams::new(1.0f32).unwrap();
        let f = coeffs_f(p, &TruncationPolicy::with_eps(1e-6).unwrap()).unwrap();
        let sum: f32 = f.negative_coeffs().unwrap().iter().sum();
        assert!((sum - (1.0 - (-1.0f32).exp())).abs() < 1e-6);
    }
}
