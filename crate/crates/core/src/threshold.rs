//! Boundary Poisson parameter `m*` of a membership condition.

use serde::{Serialize, Serializer};

use crate::criteria::{ClassParams, RParams};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::PoissonParams;
use crate::theorems::{closed_form_margin, PredicateId};

pub const DEFAULT_SCAN_LIMIT: f64 = 50.0;
pub const DEFAULT_TOL: f64 = 1e-10;
const SCAN_START: f64 = 1e-3;
const MAX_BISECTIONS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome<T> {
    /// Margin changes sign inside `m_star ± bracket_width/2`.
    Finite { m_star: T, bracket_width: T },
    /// No sign change on `(0, scan_limit]`.
    AlwaysHolds { scan_limit: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdResult<T> {
    pub predicate_id: PredicateId,
    pub outcome: Outcome<T>,
    pub evaluations: usize,
}

impl<T: Scalar> ThresholdResult<T> {
    pub fn m_star(&self) -> Option<T> {
        match self.outcome {
            Outcome::Finite { m_star, .. } => Some(m_star),
            Outcome::AlwaysHolds { .. } => None,
        }
    }
}

#[derive(Serialize)]
struct RawThreshold<T> {
    predicate: PredicateId,
    outcome: &'static str,
    m_star: Option<T>,
    bracket: Option<T>,
    evals: usize,
}

impl<T: Scalar + Serialize> Serialize for ThresholdResult<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let (outcome, m_star, bracket) = match self.outcome {
            Outcome::Finite {
                m_star,
                bracket_width,
            } => ("finite", Some(m_star), Some(bracket_width)),
            Outcome::AlwaysHolds { .. } => ("always_holds", None, None),
        };
        RawThreshold {
            predicate: self.predicate_id,
            outcome,
            m_star,
            bracket,
            evals: self.evaluations,
        }
        .serialize(serializer)
    }
}

/// Finds where `2k − lhs(m)` first turns negative.
///
/// The margin is `2k > 0` as `m → 0⁺` for every condition. Scans
/// `m = 2^j · 10⁻³` up to `scan_limit` (the limit itself is the last point)
/// and bisects the first bracket with a sign change until it is narrower
/// than `tol`. For conditions increasing in `m` this root is unique; for
/// `G ∈ S` and `I ∈ S` it is the first crossing, and re-entry beyond it is
/// not searched.
pub fn solve_m_star<T: Scalar>(
    pid: PredicateId,
    c: &ClassParams<T>,
    r: Option<&RParams<T>>,
    tol: T,
    scan_limit: T,
) -> Result<ThresholdResult<T>> {
    if !(tol > T::zero()) || !tol.is_finite() {
        return Err(Error::InvalidTolerance(tol.as_f64()));
    }
    if !(scan_limit > T::zero()) || !scan_limit.is_finite() {
        return Err(Error::param("scan_limit", "(0, inf)", scan_limit.as_f64()));
    }
    if pid.needs_r_params() && r.is_none() {
        return Err(Error::MissingRParams(pid.as_str()));
    }
    let mut evaluations = 0usize;
    let mut margin = |m: T| -> Result<T> {
        evaluations += 1;
        closed_form_margin(pid, PoissonParams::new(m)?, c, r)
    };

    // bracket [lo, hi] with margin(lo) > 0 ≥ margin(hi); margin(0⁺) = 2k
    let mut lo = T::zero();
    let mut hi = None;
    let mut m = T::lit(SCAN_START).min(scan_limit);
    loop {
        if margin(m)? <= T::zero() {
            hi = Some(m);
            break;
        }
        if m >= scan_limit {
            break;
        }
        lo = m;
        m = (m + m).min(scan_limit);
    }
    let Some(mut hi) = hi else {
        return Ok(ThresholdResult {
            predicate_id: pid,
            outcome: Outcome::AlwaysHolds { scan_limit },
            evaluations,
        });
    };

    let half = T::lit(0.5);
    for _ in 0..MAX_BISECTIONS {
        if hi - lo < tol {
            break;
        }
        let mid = lo + (hi - lo) * half;
        if mid <= lo || mid >= hi {
            break;
        }
        if margin(mid)? > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ThresholdResult {
        predicate_id: pid,
        outcome: Outcome::Finite {
            m_star: lo + (hi - lo) * half,
            bracket_width: hi - lo,
        },
        evaluations,
    })
}
