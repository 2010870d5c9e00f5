//! Sampling the analytic class conditions inside the unit disk.

use num_complex::Complex;
use serde::Serialize;

use crate::criteria::{ClassParams, RParams};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::CoefficientSeq;

fn check_disk<T: Scalar>(z: Complex<T>) -> Result<()> {
    let r = z.norm();
    if r < T::one() {
        Ok(())
    } else {
        Err(Error::DomainError(r.as_f64()))
    }
}

/// `f(z)` by Horner's rule.
pub fn eval_series<T: Scalar>(f: &CoefficientSeq<T>, z: Complex<T>) -> Result<Complex<T>> {
    check_disk(z)?;
    Ok(horner(f, z))
}

/// `f'(z)` by Horner's rule.
pub fn eval_deriv<T: Scalar>(f: &CoefficientSeq<T>, z: Complex<T>) -> Result<Complex<T>> {
    check_disk(z)?;
    Ok(horner_deriv(f, z))
}

fn horner<T: Scalar>(f: &CoefficientSeq<T>, z: Complex<T>) -> Complex<T> {
    // z (1 + a_2 z + … + a_N z^{N−1})
    let one = Complex::new(T::one(), T::zero());
    let inner = (2..=f.order())
        .rev()
        .fold(Complex::new(T::zero(), T::zero()), |acc, n| {
            acc * z + f.coefficient(n)
        });
    z * (one + inner * z)
}

fn horner_deriv<T: Scalar>(f: &CoefficientSeq<T>, z: Complex<T>) -> Complex<T> {
    // 1 + Σ n a_n z^{n−1}
    let one = Complex::new(T::one(), T::zero());
    let inner = (2..=f.order())
        .rev()
        .fold(Complex::new(T::zero(), T::zero()), |acc, n| {
            acc * z + f.coefficient(n) * T::from_index(n)
        });
    one + inner * z
}

/// Value of a class condition at one point. `valid` is false when a
/// denominator fell below the floor and the point was skipped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionValue<T> {
    pub value: T,
    pub valid: bool,
}

impl<T: Scalar> ConditionValue<T> {
    fn ok(value: T) -> Self {
        Self { value, valid: true }
    }

    fn skipped() -> Self {
        Self {
            value: T::nan(),
            valid: false,
        }
    }
}

pub const DEFAULT_DENOMINATOR_FLOOR: f64 = 1e-12;

fn s_value_from<T: Scalar>(
    fz: Complex<T>,
    dfz: Complex<T>,
    z: Complex<T>,
    c: &ClassParams<T>,
    floor: T,
) -> ConditionValue<T> {
    let one = T::one();
    let zdf = z * dfz;
    let denom = fz * (one - c.lambda()) + zdf * c.lambda();
    if denom.norm() < floor {
        return ConditionValue::skipped();
    }
    let w = zdf / denom;
    let plus = w + one;
    if plus.norm() < floor {
        return ConditionValue::skipped();
    }
    ConditionValue::ok((w - one).norm() / plus.norm())
}

/// `|(w−1)/(w+1)|` with `w = z f'(z) / ((1−λ) f(z) + λ z f'(z))`; `f ∈ S(k,λ)`
/// when this stays below `k` on the disk. At `z = 0` the limit `0` is returned.
pub fn s_condition_value<T: Scalar>(
    f: &CoefficientSeq<T>,
    z: Complex<T>,
    c: &ClassParams<T>,
    floor: T,
) -> Result<ConditionValue<T>> {
    check_disk(z)?;
    if z.norm() == T::zero() {
        return Ok(ConditionValue::ok(T::zero()));
    }
    Ok(s_value_from(horner(f, z), horner_deriv(f, z), z, c, floor))
}

/// The `S` condition applied to `g = z f'`, i.e. the `C(k,λ)` condition.
pub fn c_condition_value<T: Scalar>(
    f: &CoefficientSeq<T>,
    z: Complex<T>,
    c: &ClassParams<T>,
    floor: T,
) -> Result<ConditionValue<T>> {
    s_condition_value(&f.z_derivative(), z, c, floor)
}

/// `|(f'(z)−1) / ((A−B)τ − B(f'(z)−1))|`; `f ∈ R^τ(A,B)` when this stays
/// below `1` on the disk.
pub fn r_condition_value<T: Scalar>(
    f: &CoefficientSeq<T>,
    z: Complex<T>,
    r: &RParams<T>,
    floor: T,
) -> Result<ConditionValue<T>> {
    check_disk(z)?;
    Ok(r_value_from(horner_deriv(f, z), r, floor))
}

fn r_value_from<T: Scalar>(dfz: Complex<T>, r: &RParams<T>, floor: T) -> ConditionValue<T> {
    let num = dfz - T::one();
    let denom = r.tau() * (r.a() - r.b()) - num * r.b();
    if denom.norm() < floor {
        return ConditionValue::skipped();
    }
    ConditionValue::ok(num.norm() / denom.norm())
}

/// Which analytic condition to sample, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassCondition<T> {
    S(ClassParams<T>),
    C(ClassParams<T>),
    R(RParams<T>),
}

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ConditionId {
    S_cond,
    C_cond,
    R_cond,
}

impl ConditionId {
    pub fn as_str(self) -> &'static str {
        match self {
            ConditionId::S_cond => "S_cond",
            ConditionId::C_cond => "C_cond",
            ConditionId::R_cond => "R_cond",
        }
    }
}

impl<T: Scalar> ClassCondition<T> {
    pub fn id(&self) -> ConditionId {
        match self {
            ClassCondition::S(_) => ConditionId::S_cond,
            ClassCondition::C(_) => ConditionId::C_cond,
            ClassCondition::R(_) => ConditionId::R_cond,
        }
    }

    /// `k` for `S`/`C`, `1` for `R`.
    pub fn threshold(&self) -> T {
        match self {
            ClassCondition::S(c) | ClassCondition::C(c) => c.k(),
            ClassCondition::R(_) => T::one(),
        }
    }
}

/// Polar sampling grid inside the unit disk.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec<T> {
    radii: Vec<T>,
    points_per_circle: usize,
    denominator_floor: T,
}

impl<T: Scalar> GridSpec<T> {
    pub fn new(radii: Vec<T>, points_per_circle: usize, denominator_floor: T) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::param("radii", "non-empty subset of (0,1)", f64::NAN));
        }
        if let Some(r) = radii.iter().find(|r| !(**r > T::zero() && **r < T::one())) {
            return Err(Error::param("radii", "(0,1)", r.as_f64()));
        }
        if points_per_circle < 8 {
            return Err(Error::param("points", "[8, inf)", points_per_circle as f64));
        }
        if !(denominator_floor > T::zero()) {
            return Err(Error::param(
                "denominator_floor",
                "(0, inf)",
                denominator_floor.as_f64(),
            ));
        }
        Ok(Self {
            radii,
            points_per_circle,
            denominator_floor,
        })
    }

    /// The default grid plus radius 0.999, for probing near the boundary.
    pub fn extended() -> Self {
        let mut g = Self::default();
        g.radii.push(T::lit(0.999));
        g
    }

    pub fn radii(&self) -> &[T] {
        &self.radii
    }

    pub fn points_per_circle(&self) -> usize {
        self.points_per_circle
    }

    pub fn denominator_floor(&self) -> T {
        self.denominator_floor
    }

    /// Point `(radius index, angle index)`.
    pub fn point(&self, ri: usize, ai: usize) -> Complex<T> {
        let theta = T::TAU() * T::from_index(ai) / T::from_index(self.points_per_circle);
        Complex::from_polar(self.radii[ri], theta)
    }
}

impl<T: Scalar> Default for GridSpec<T> {
    fn default() -> Self {
        Self {
            radii: [0.25, 0.5, 0.75, 0.9].into_iter().map(T::lit).collect(),
            points_per_circle: 256,
            denominator_floor: T::lit(DEFAULT_DENOMINATOR_FLOOR),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridReport<T> {
    #[serde(rename = "condition")]
    pub condition_id: ConditionId,
    #[serde(rename = "max")]
    pub max_value: T,
    #[serde(rename = "argmax")]
    pub argmax_z: Complex<T>,
    /// Valid points with value `≥` the threshold.
    pub violations: usize,
    /// Points skipped for a near-singular denominator.
    pub skipped: usize,
}

struct MaxTracker<T> {
    report: GridReport<T>,
    threshold: T,
    seen_valid: bool,
}

impl<T: Scalar> MaxTracker<T> {
    fn new(condition: &ClassCondition<T>) -> Self {
        Self {
            report: GridReport {
                condition_id: condition.id(),
                max_value: T::zero(),
                argmax_z: Complex::new(T::zero(), T::zero()),
                violations: 0,
                skipped: 0,
            },
            threshold: condition.threshold(),
            seen_valid: false,
        }
    }

    fn push(&mut self, z: Complex<T>, v: ConditionValue<T>) {
        if !v.valid {
            self.report.skipped += 1;
            return;
        }
        if v.value >= self.threshold {
            self.report.violations += 1;
        }
        if !self.seen_valid || v.value > self.report.max_value {
            self.report.max_value = v.value;
            self.report.argmax_z = z;
            self.seen_valid = true;
        }
    }
}

/// Evaluates one condition at many points, building `z f'` once for `C`.
struct PointEvaluator<'a, T> {
    f: &'a CoefficientSeq<T>,
    zdf: Option<CoefficientSeq<T>>,
    condition: &'a ClassCondition<T>,
    floor: T,
}

impl<'a, T: Scalar> PointEvaluator<'a, T> {
    fn new(f: &'a CoefficientSeq<T>, condition: &'a ClassCondition<T>, floor: T) -> Self {
        let zdf = matches!(condition, ClassCondition::C(_)).then(|| f.z_derivative());
        Self {
            f,
            zdf,
            condition,
            floor,
        }
    }

    fn at(&self, z: Complex<T>) -> ConditionValue<T> {
        let (f, floor) = (self.f, self.floor);
        match self.condition {
            ClassCondition::S(c) => s_value_from(horner(f, z), horner_deriv(f, z), z, c, floor),
            ClassCondition::C(c) => {
                let g = self.zdf.as_ref().expect("built for C");
                s_value_from(horner(g, z), horner_deriv(g, z), z, c, floor)
            }
            ClassCondition::R(r) => r_value_from(horner_deriv(f, z), r, floor),
        }
    }
}

/// Evaluates `condition` at every grid point.
///
/// The maximum runs over non-skipped points; ties go to the lowest radius
/// index, then the lowest angle index. With no valid point the maximum is 0.
pub fn grid_check<T: Scalar>(
    f: &CoefficientSeq<T>,
    condition: &ClassCondition<T>,
    grid: &GridSpec<T>,
) -> GridReport<T> {
    let eval = PointEvaluator::new(f, condition, grid.denominator_floor);
    let mut tracker = MaxTracker::new(condition);
    for ri in 0..grid.radii.len() {
        for ai in 0..grid.points_per_circle {
            let z = grid.point(ri, ai);
            tracker.push(z, eval.at(z));
        }
    }
    tracker.report
}

/// Outermost radius probed by [`witness_search`].
pub const WITNESS_RADIUS: f64 = 0.999;
/// Points on the positive real segment `(0, WITNESS_RADIUS]` in [`witness_search`].
pub const RADIAL_STEPS: usize = 4000;

/// Looks for a point where a negative-coefficient function breaks the
/// condition: the extended grid (`grid` plus radius 0.999), followed by a
/// dense scan of the real segment `(0, 0.999]`.
///
/// For `f(z) = z − Σ b_n zⁿ` the extremal direction is the positive real
/// axis. When the coefficient sum exceeds `2k` the condition value either
/// exceeds `k` as `z → 1⁻`, or `w + 1` vanishes at some interior real point
/// and the value is unbounded there; the radial scan catches both.
pub fn witness_search<T: Scalar>(
    f: &CoefficientSeq<T>,
    condition: &ClassCondition<T>,
    grid: &GridSpec<T>,
) -> GridReport<T> {
    let mut extended = grid.clone();
    let edge = T::lit(WITNESS_RADIUS);
    if !extended.radii.contains(&edge) {
        extended.radii.push(edge);
    }
    let eval = PointEvaluator::new(f, condition, grid.denominator_floor);
    let mut tracker = MaxTracker::new(condition);
    for ri in 0..extended.radii.len() {
        for ai in 0..extended.points_per_circle {
            let z = extended.point(ri, ai);
            tracker.push(z, eval.at(z));
        }
    }
    let steps = T::from_index(RADIAL_STEPS);
    for i in 1..=RADIAL_STEPS {
        let z = Complex::new(edge * T::from_index(i) / steps, T::zero());
        tracker.push(z, eval.at(z));
    }
    tracker.report
}
