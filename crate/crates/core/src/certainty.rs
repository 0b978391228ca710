//! Scaled certainty equivalents `μ_γ`, their closed forms and relatives.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{extended, bisect_predicate, golden_section_max, log_weighted_sum_exp, CompensatedSum};
use crate::sample::EmpiricalDistribution;
use crate::utility::{RiskAversion, UtilityFamily};

/// Value of `μ_γ` in `(−∞, +∞]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CeValue {
    #[serde(serialize_with = "extended::f64")]
    pub value: f64,
    pub finite: bool,
}

impl CeValue {
    pub fn finite(value: f64) -> Self {
        debug_assert!(value.is_finite());
        Self { value, finite: true }
    }

    pub fn infinite() -> Self {
        Self { value: f64::INFINITY, finite: false }
    }

    pub fn get(self) -> f64 {
        self.value
    }
}

/// `μ_γ(X) = −(1/γ)·U⁻¹(E[U(γX)])`.
///
/// For bounded families the expectation is accumulated as
/// `sup U − E[U(γX)] = Σ pᵢ·exp(gᵢ)` with `gᵢ = ln(sup U − U(γxᵢ))`, which
/// stays representable for `γ·|x|` far beyond the range of `exp`. Families
/// unbounded above (the linear reference) give `−E[X]`.
pub fn certainty_equivalent(
    family: &UtilityFamily,
    gamma: RiskAversion,
    dist: &EmpiricalDistribution,
) -> Result<CeValue> {
    if !family.is_bounded_above() {
        return Ok(CeValue::finite(-dist.mean()));
    }
    let mut support = dist.support();
    if let (Some((c, _)), None) = (support.next(), support.next()) {
        // U⁻¹(U(γc)) = γc; skip the round trip so constants map to −c exactly
        return Ok(CeValue::finite(-c));
    }
    let g = gamma.get();
    let log_gap = expected_log_gap(family, g, dist, 0.0)?;
    let x = family.invert_log_gap(log_gap);
    let mu = -x / g;
    if mu.is_finite() {
        Ok(CeValue::finite(mu))
    } else {
        Err(Error::Evaluation(format!("certainty equivalent not representable at gamma={g}")))
    }
}

/// `ln(sup U − E[U(γ(X − c))])` over the support of `dist`.
fn expected_log_gap(family: &UtilityFamily, g: f64, dist: &EmpiricalDistribution, c: f64) -> Result<f64> {
    let terms: Vec<(f64, f64)> = dist.support().map(|(x, p)| (p, family.log_gap(g * (x - c)))).collect();
    let l = log_weighted_sum_exp(terms.iter().copied());
    if l.is_nan() || l == f64::INFINITY {
        return Err(Error::Evaluation(format!(
            "expected utility of {family} overflows at gamma={g}"
        )));
    }
    Ok(l)
}

/// Entropic risk measure `(1/γ)·ln E[e^{−γX}]`, evaluated independently of
/// the generic route by factoring out the essential infimum:
/// `ln E[e^{−γ(X−m)}]/γ − m` with every exponent non-positive.
pub fn entropic_closed_form(gamma: RiskAversion, dist: &EmpiricalDistribution) -> CeValue {
    let g = gamma.get();
    let m = dist.ess_inf();
    let s: CompensatedSum = dist.support().map(|(x, p)| p * (-g * (x - m)).exp()).collect();
    CeValue::finite(s.total().ln() / g - m)
}

/// `μ_γ` of a Gaussian `N(m, σ²)` under exponential utility: `−m + γσ²/2`.
pub fn gaussian_entropic(gamma: RiskAversion, m: f64, sigma: f64) -> Result<f64> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::InvalidParameter(format!("sigma must be >= 0, got {sigma}")));
    }
    if !m.is_finite() {
        return Err(Error::InvalidParameter(format!("mean must be finite, got {m}")));
    }
    Ok(-m + gamma.get() * sigma * sigma / 2.0)
}

/// Optimized certainty equivalent `sup_c { c + E[U(γ(X − c))]/γ }`.
///
/// Maximised by golden-section search over `bounds` (default
/// `[min − 10/γ, max + 10/γ]`) to `1e−10` in `c`. A maximiser at a bound,
/// or an objective that is flat up to a bound, is reported as
/// [`Error::NonCoercive`].
pub fn oce(
    family: &UtilityFamily,
    gamma: RiskAversion,
    dist: &EmpiricalDistribution,
    bounds: Option<(f64, f64)>,
) -> Result<f64> {
    const TOL: f64 = 1e-10;
    let g = gamma.get();
    let (lo, hi) = bounds.unwrap_or((dist.ess_inf() - 10.0 / g, dist.ess_sup() + 10.0 / g));
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParameter(format!("invalid search interval [{lo}, {hi}]")));
    }
    let objective = |c: f64| -> f64 {
        if family.is_bounded_above() {
            match expected_log_gap(family, g, dist, c) {
                Ok(l) => c + (family.supremum() - l.exp()) / g,
                Err(_) => f64::NEG_INFINITY,
            }
        } else {
            // U affine: E[U(γ(X−c))] = a·γ(E[X]−c) + b
            let u = family.eval(g * (dist.mean() - c)).unwrap_or(f64::NEG_INFINITY);
            c + u / g
        }
    };
    let (c_star, best) = golden_section_max(objective, lo, hi, TOL);
    if !best.is_finite() {
        return Err(Error::Evaluation("OCE objective is not finite at the maximiser".into()));
    }
    if c_star - lo <= 10.0 * TOL || hi - c_star <= 10.0 * TOL {
        return Err(Error::NonCoercive { at: c_star });
    }
    let edge = objective(lo).max(objective(hi));
    if best - edge <= 1e-12 * (1.0 + best.abs()) {
        return Err(Error::NonCoercive { at: c_star });
    }
    Ok(best)
}

/// Cash-additive hull `inf{m : μ_γ(X + m) ≤ 0}`: the smallest cash add-on
/// that makes the position acceptable.
pub fn cash_additive_hull(family: &UtilityFamily, gamma: RiskAversion, dist: &EmpiricalDistribution) -> Result<f64> {
    if !family.is_bounded_above() {
        return Ok(-dist.mean());
    }
    let acceptable = |m: f64| -> Result<bool> {
        let shifted = dist.shift(m)?;
        Ok(certainty_equivalent(family, gamma, &shifted)?.value <= 0.0)
    };
    // X + (−ess inf) ≥ 0 is acceptable; X + (−ess sup − 1) ≤ −1 is not
    let hi = -dist.ess_inf();
    let mut lo = -dist.ess_sup() - 1.0;
    if !acceptable(hi)? {
        return Err(Error::Bracket(format!("shift {hi} does not make the position acceptable")));
    }
    let mut expansions = 0;
    while acceptable(lo)? {
        lo -= (hi - lo).max(1.0);
        expansions += 1;
        if expansions > 60 {
            return Err(Error::Bracket("no unacceptable cash shift found".into()));
        }
    }
    let mut failure = None;
    let (_, m) = bisect_predicate(
        |m| match acceptable(m) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                true
            }
        },
        lo,
        hi,
        1e-14,
        1e-13,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(m),
    }
}

/// Mean-variance approximation `−E[X] + (γ/2)·Var[X]`, exact for Gaussian
/// laws under exponential utility.
pub fn mv_approx(gamma: RiskAversion, dist: &EmpiricalDistribution) -> f64 {
    -dist.mean() + gamma.get() / 2.0 * dist.variance()
}
