//! The utility-based acceptability index `α(X) = sup{γ > 0 : μ_γ(X) ≤ 0}`.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::certainty::certainty_equivalent;
use crate::error::{Error, Result};
use crate::numeric::extended;
use crate::sample::EmpiricalDistribution;
use crate::utility::{RiskAversion, UtilityFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexKind {
    Zero,
    Finite,
    Infinite,
}

/// How an index value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagnostic {
    /// `E[X] ≤ 0` with a loss of positive probability: nothing is acceptable.
    ExpectationNegative,
    /// `X ≥ 0` almost surely: every `γ` is acceptable.
    NonnegPosition,
    /// Finite root located by bisection.
    RootFound,
    /// Still acceptable at the cap; reported as infinite.
    CapExceeded,
}

/// An element of `[0, ∞]` with solver diagnostics.
///
/// `value` is `0` for [`IndexKind::Zero`] and `+∞` for
/// [`IndexKind::Infinite`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndexValue {
    pub kind: IndexKind,
    #[serde(serialize_with = "extended::f64")]
    pub value: f64,
    #[serde(serialize_with = "extended::pair")]
    pub bracket: (f64, f64),
    pub evaluations: u64,
    pub diagnostic: Diagnostic,
}

impl IndexValue {
    fn zero(diagnostic: Diagnostic, evaluations: u64) -> Self {
        Self { kind: IndexKind::Zero, value: 0.0, bracket: (0.0, 0.0), evaluations, diagnostic }
    }

    fn infinite(diagnostic: Diagnostic, bracket: (f64, f64), evaluations: u64) -> Self {
        Self { kind: IndexKind::Infinite, value: f64::INFINITY, bracket, evaluations, diagnostic }
    }

    pub fn is_zero(&self) -> bool {
        self.kind == IndexKind::Zero
    }

    pub fn is_infinite(&self) -> bool {
        self.kind == IndexKind::Infinite
    }

    pub fn finite_value(&self) -> Option<f64> {
        (self.kind == IndexKind::Finite).then_some(self.value)
    }

    /// Total order `zero < finite(v) < infinite`, finite values by size.
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        let class = |v: &Self| match v.kind {
            IndexKind::Zero => 0,
            IndexKind::Finite => 1,
            IndexKind::Infinite => 2,
        };
        class(self).cmp(&class(other)).then_with(|| match self.kind {
            IndexKind::Finite => self.value.total_cmp(&other.value),
            _ => Ordering::Equal,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndexOptions {
    pub gamma_min: f64,
    pub gamma_cap: f64,
    pub tol_rel: f64,
}

impl Default for IndexOptions {
    fn default() -> Self {
        Self { gamma_min: 1e-8, gamma_cap: 1e8, tol_rel: 1e-8 }
    }
}

impl IndexOptions {
    fn validate(&self) -> Result<()> {
        if !(self.gamma_min > 0.0 && self.gamma_cap.is_finite() && self.gamma_cap > self.gamma_min) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < gamma_min < gamma_cap < inf, got {} and {}",
                self.gamma_min, self.gamma_cap
            )));
        }
        if !(self.tol_rel > 0.0 && self.tol_rel < 1.0) {
            return Err(Error::InvalidParameter(format!("tol_rel must lie in (0, 1), got {}", self.tol_rel)));
        }
        Ok(())
    }
}

fn check_family(family: &UtilityFamily) -> Result<()> {
    if !family.is_bounded_above() {
        return Err(Error::Unsupported(format!("{family} is unbounded above; the index requires a bounded utility")));
    }
    if !family.is_scale_aversion_regular() {
        return Err(Error::Unsupported(format!("{family} is not scale-aversion regular")));
    }
    Ok(())
}

/// Computes `α(X)`.
///
/// Exact special cases come first: a non-negative position is infinite and
/// a position with `E[X] ≤ 0` (and some loss) is zero. Otherwise the root of
/// the non-decreasing map `γ ↦ μ_γ(X)` is bracketed by ×10 expansion from
/// `gamma_min` and bisected until `hi − lo ≤ tol_rel·hi`; the bisection keeps
/// `lo` acceptable so ties resolve to the supremum. A position still
/// acceptable at `gamma_cap` is reported as infinite with
/// [`Diagnostic::CapExceeded`].
pub fn acceptability_index(
    family: &UtilityFamily,
    dist: &EmpiricalDistribution,
    opts: &IndexOptions,
) -> Result<IndexValue> {
    check_family(family)?;
    opts.validate()?;
    if dist.ess_inf() >= 0.0 {
        return Ok(IndexValue::infinite(Diagnostic::NonnegPosition, (f64::INFINITY, f64::INFINITY), 0));
    }
    if dist.mean() <= 0.0 {
        return Ok(IndexValue::zero(Diagnostic::ExpectationNegative, 0));
    }
    let mut evaluations = 0u64;
    let mut acceptable = |gamma: f64| -> Result<bool> {
        evaluations += 1;
        Ok(certainty_equivalent(family, RiskAversion::new(gamma)?, dist)?.value <= 0.0)
    };
    if acceptable(opts.gamma_cap)? {
        return Ok(IndexValue::infinite(
            Diagnostic::CapExceeded,
            (opts.gamma_cap, f64::INFINITY),
            evaluations,
        ));
    }
    let (mut lo, mut hi) = (0.0, opts.gamma_min);
    while acceptable(hi)? {
        lo = hi;
        hi = (hi * 10.0).min(opts.gamma_cap);
    }
    while hi - lo > opts.tol_rel * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if acceptable(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(IndexValue {
        kind: IndexKind::Finite,
        value: 0.5 * (lo + hi),
        bracket: (lo, hi),
        evaluations,
        diagnostic: Diagnostic::RootFound,
    })
}

/// Grid-scan oracle: the largest grid `γ` with `μ_γ(X) ≤ 0`.
///
/// Every grid point is evaluated, so the result does not rely on
/// monotonicity in `γ`. No acceptable point gives zero; all points
/// acceptable gives infinite (nonneg position when `X ≥ 0`, cap exceeded
/// otherwise).
pub fn index_grid_oracle(family: &UtilityFamily, dist: &EmpiricalDistribution, gamma_grid: &[f64]) -> Result<IndexValue> {
    if gamma_grid.is_empty() {
        return Err(Error::Empty("gamma grid"));
    }
    if gamma_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("gamma grid must be strictly ascending".into()));
    }
    let flags = gamma_grid
        .par_iter()
        .map(|&gamma| Ok(certainty_equivalent(family, RiskAversion::new(gamma)?, dist)?.value <= 0.0))
        .collect::<Result<Vec<bool>>>()?;
    let n = flags.len() as u64;
    if flags.iter().all(|&ok| ok) {
        let diagnostic = if dist.ess_inf() >= 0.0 { Diagnostic::NonnegPosition } else { Diagnostic::CapExceeded };
        let last = *gamma_grid.last().unwrap();
        return Ok(IndexValue::infinite(diagnostic, (last, f64::INFINITY), n));
    }
    match flags.iter().rposition(|&ok| ok) {
        None => Ok(IndexValue::zero(Diagnostic::ExpectationNegative, n)),
        Some(i) => Ok(IndexValue {
            kind: IndexKind::Finite,
            value: gamma_grid[i],
            bracket: (gamma_grid[i], gamma_grid[i + 1]),
            evaluations: n,
            diagnostic: Diagnostic::RootFound,
        }),
    }
}
