//! Benchmarked portfolio performance: finite-horizon indices, selection over
//! candidate strategies, long-run trajectories and the risk-sensitive dual.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::certainty::entropic_closed_form;
use crate::error::{Error, Result};
use crate::index::{acceptability_index, Diagnostic, IndexKind, IndexOptions, IndexValue};
use crate::numeric::{extended, log_grid, CompensatedSum};
use crate::paths::{cumulative_variance, simulate_batch, NormalStream, PathModelSpec};
use crate::sample::EmpiricalDistribution;
use crate::utility::{RiskAversion, UtilityFamily};

/// A strategy represented by the law of its terminal log-value `ln V_T`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyCandidate {
    pub label: String,
    pub terminal_log_growth: EmpiricalDistribution,
}

impl StrategyCandidate {
    pub fn new(label: impl Into<String>, terminal_log_growth: EmpiricalDistribution) -> Self {
        Self { label: label.into(), terminal_log_growth }
    }
}

/// `α(ln V_T − ln G_T)` for a deterministic benchmark `ln G_T`.
pub fn finite_horizon_index(
    family: &UtilityFamily,
    candidate: &StrategyCandidate,
    benchmark_log: f64,
) -> Result<IndexValue> {
    if !benchmark_log.is_finite() {
        return Err(Error::InvalidParameter(format!("benchmark must be finite, got {benchmark_log}")));
    }
    let excess = candidate.terminal_log_growth.shift(-benchmark_log)?;
    acceptability_index(family, &excess, &IndexOptions::default())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedCandidate {
    pub label: String,
    pub index: IndexValue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Selection {
    pub best: String,
    pub ranking: Vec<RankedCandidate>,
}

/// Ranks candidates by index, best first, under `zero < finite(v) <
/// infinite`; ties go to the lexicographically smaller label.
pub fn maximize_over_strategies(
    family: &UtilityFamily,
    candidates: &[StrategyCandidate],
    benchmark_log: f64,
) -> Result<Selection> {
    if candidates.is_empty() {
        return Err(Error::Empty("candidate strategies"));
    }
    let mut seen = BTreeSet::new();
    for c in candidates {
        if !seen.insert(c.label.as_str()) {
            return Err(Error::InvalidParameter(format!("duplicate candidate label '{}'", c.label)));
        }
    }
    let indices = candidates
        .par_iter()
        .map(|c| finite_horizon_index(family, c, benchmark_log))
        .collect::<Result<Vec<_>>>()?;
    let mut ranking: Vec<RankedCandidate> = candidates
        .iter()
        .zip(indices)
        .map(|(c, index)| RankedCandidate { label: c.label.clone(), index })
        .collect();
    ranking.sort_by(|a, b| b.index.rank_cmp(&a.index).then_with(|| a.label.cmp(&b.label)));
    Ok(Selection { best: ranking[0].label.clone(), ranking })
}

/// `2(m − λ)T / σ_T²`, the index of a Gaussian `S_T` under exponential
/// utility; `0` when `m ≤ λ`.
pub fn closed_form_gaussian_alpha(m: f64, lambda_rate: f64, sigma_t_sq: f64, horizon: usize) -> Result<f64> {
    if !(sigma_t_sq.is_finite() && sigma_t_sq > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma_T^2 must be > 0, got {sigma_t_sq}")));
    }
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be >= 1".into()));
    }
    if m <= lambda_rate {
        return Ok(0.0);
    }
    Ok(2.0 * (m - lambda_rate) * horizon as f64 / sigma_t_sq)
}

/// Risk-sensitive growth rate `−μ_γ(ln V_T)/T` from samples of `ln V_T`.
/// Defined for the exponential family only.
pub fn risk_sensitive_rate(
    family: &UtilityFamily,
    gamma: RiskAversion,
    terminal_log_values: &[f64],
    horizon: usize,
) -> Result<f64> {
    if !family.is_exponential() {
        return Err(Error::Unsupported(format!("risk-sensitive rate requires exponential utility, got {family}")));
    }
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be >= 1".into()));
    }
    let law = EmpiricalDistribution::from_samples(terminal_log_values)?;
    Ok(-entropic_closed_form(gamma, &law).value / horizon as f64)
}

/// How the law of `S_T` is formed along the horizon grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LawMode {
    /// `GaussianFit` for the stationary Gaussian models.
    Auto,
    /// Uniform law over the simulated `S_T` values.
    Empirical,
    /// Gaussian with the Monte Carlo mean and variance of `S_T`.
    GaussianFit,
    /// Gaussian with the model mean and exact cumulative variance.
    ExactGaussian,
}

impl std::str::FromStr for LawMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "empirical" => Ok(Self::Empirical),
            "gaussian-fit" => Ok(Self::GaussianFit),
            "exact" => Ok(Self::ExactGaussian),
            other => Err(Error::InvalidParameter(format!(
                "unknown law mode '{other}' (auto, empirical, gaussian-fit, exact)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Divergent,
    Vanishing,
    FinitePositive,
    Undetermined,
}

/// Least-squares slope of `ln α` against `ln T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    /// `None` with fewer than three points.
    pub std_error: Option<f64>,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LongRunReport {
    pub t_grid: Vec<usize>,
    pub alpha_values: Vec<IndexValue>,
    pub regime: Regime,
    #[serde(serialize_with = "extended::f64")]
    pub liminf_estimate: f64,
    pub fit: Option<SlopeFit>,
    pub law: LawMode,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LongRunConfig {
    pub lambda_rate: f64,
    pub t_grid: Vec<usize>,
    pub seed: u64,
    pub n_paths: usize,
    pub law: LawMode,
}

/// Largest horizon accepted by [`longrun_trajectory`].
pub const MAX_HORIZON: usize = 1 << 14;

/// Slope magnitude separating the regimes.
pub const REGIME_SLOPE: f64 = 0.2;

/// Evaluates `α(S_T)` with `S_T = ln V_T − λT` along `t_grid` and calls the
/// long-run regime from the last half of the grid.
///
/// Monte Carlo laws use common random numbers: every `S_T` is a partial
/// sum of the same simulated paths.
pub fn longrun_trajectory(family: &UtilityFamily, spec: &PathModelSpec, cfg: &LongRunConfig) -> Result<LongRunReport> {
    validate_grid(&cfg.t_grid)?;
    if !cfg.lambda_rate.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda must be finite, got {}", cfg.lambda_rate)));
    }
    if !spec.is_stationary_gaussian() {
        return Err(Error::Unsupported(
            "long-run trajectories need a return model; OU levels enter through strategy laws".into(),
        ));
    }
    let law = match cfg.law {
        LawMode::Auto => LawMode::GaussianFit,
        other => other,
    };
    let moments: Vec<(f64, f64)>;
    let mut empirical: Vec<EmpiricalDistribution> = Vec::new();
    match law {
        LawMode::ExactGaussian => {
            let m = spec.step_mean()?;
            moments = cfg
                .t_grid
                .iter()
                .map(|&t| Ok(((m - cfg.lambda_rate) * t as f64, cumulative_variance(spec, t)?)))
                .collect::<Result<_>>()?;
        }
        _ => {
            if cfg.n_paths < 2 {
                return Err(Error::InvalidParameter("Monte Carlo laws need n_paths >= 2".into()));
            }
            let samples = terminal_samples(spec, cfg)?;
            moments = samples.iter().map(|s| mean_and_variance(s)).collect();
            if law == LawMode::Empirical {
                empirical = samples
                    .iter()
                    .map(|s| EmpiricalDistribution::from_samples(s))
                    .collect::<Result<_>>()?;
            }
        }
    }
    let alpha_values = (0..cfg.t_grid.len())
        .into_par_iter()
        .map(|i| match law {
            LawMode::Empirical => acceptability_index(family, &empirical[i], &IndexOptions::default()),
            _ => gaussian_index(family, moments[i].0, moments[i].1),
        })
        .collect::<Result<Vec<_>>>()?;
    let (regime, liminf_estimate, fit) = classify(&cfg.t_grid, &alpha_values);
    Ok(LongRunReport { t_grid: cfg.t_grid.clone(), alpha_values, regime, liminf_estimate, fit, law })
}

fn validate_grid(t_grid: &[usize]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::Empty("horizon grid"));
    }
    if t_grid[0] == 0 || t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("horizon grid must be positive and strictly ascending".into()));
    }
    if *t_grid.last().unwrap() > MAX_HORIZON {
        return Err(Error::InvalidParameter(format!("horizons are limited to {MAX_HORIZON}")));
    }
    Ok(())
}

/// `S_T` samples per grid horizon, one row per `T`.
fn terminal_samples(spec: &PathModelSpec, cfg: &LongRunConfig) -> Result<Vec<Vec<f64>>> {
    let t_max = *cfg.t_grid.last().unwrap();
    let paths = simulate_batch(spec, t_max, cfg.seed, cfg.n_paths)?;
    let per_path: Vec<Vec<f64>> = paths
        .par_iter()
        .map(|path| {
            let mut acc = CompensatedSum::new();
            let mut out = Vec::with_capacity(cfg.t_grid.len());
            let mut next = 0;
            for (t, r) in path.iter().enumerate() {
                acc.add(*r);
                if t + 1 == cfg.t_grid[next] {
                    out.push(acc.total() - cfg.lambda_rate * (t + 1) as f64);
                    next += 1;
                    if next == cfg.t_grid.len() {
                        break;
                    }
                }
            }
            out
        })
        .collect();
    Ok((0..cfg.t_grid.len()).map(|i| per_path.iter().map(|row| row[i]).collect()).collect())
}

/// Sample mean and unbiased variance.
fn mean_and_variance(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().copied().collect::<CompensatedSum>().total() / n;
    let ss = values.iter().map(|v| (v - mean) * (v - mean)).collect::<CompensatedSum>().total();
    (mean, ss / (n - 1.0))
}

/// `α` of `N(mean, variance)`: closed form for the exponential family,
/// otherwise the index of a discretised Gaussian law.
fn gaussian_index(family: &UtilityFamily, mean: f64, variance: f64) -> Result<IndexValue> {
    if variance <= 0.0 {
        let point = EmpiricalDistribution::point_mass(mean)?;
        return acceptability_index(family, &point, &IndexOptions::default());
    }
    if family.is_exponential() {
        if !family.is_bounded_above() {
            return Err(Error::Unsupported(format!("{family} is unbounded above")));
        }
        if mean <= 0.0 {
            return Ok(IndexValue {
                kind: IndexKind::Zero,
                value: 0.0,
                bracket: (0.0, 0.0),
                evaluations: 0,
                diagnostic: Diagnostic::ExpectationNegative,
            });
        }
        let v = 2.0 * mean / variance;
        return Ok(IndexValue { kind: IndexKind::Finite, value: v, bracket: (v, v), evaluations: 0, diagnostic: Diagnostic::RootFound });
    }
    acceptability_index(family, &discretised_gaussian(mean, variance.sqrt())?, &IndexOptions::default())
}

/// `N(mean, sd²)` on the lattice `mean + sd·z`, `z ∈ {−12, −11.99, …, 12}`,
/// each node carrying the mass of its cell; the tails are lumped into the
/// end nodes.
pub fn discretised_gaussian(mean: f64, sd: f64) -> Result<EmpiricalDistribution> {
    const STEPS: i32 = 1200;
    const H: f64 = 0.01;
    let normal = Normal::standard();
    // masses for z ≤ 0, mirrored; lower-tail CDF differences keep relative accuracy
    let half: Vec<f64> = (0..=STEPS)
        .map(|k| {
            let z = -(STEPS - k) as f64 * H;
            let upper = normal.cdf(z + H / 2.0);
            if k == 0 {
                upper
            } else if k == STEPS {
                0.5 - normal.cdf(z - H / 2.0)
            } else {
                upper - normal.cdf(z - H / 2.0)
            }
        })
        .collect();
    let mut outcomes = Vec::with_capacity(2 * STEPS as usize + 1);
    let mut weights = Vec::with_capacity(2 * STEPS as usize + 1);
    for k in -STEPS..=STEPS {
        let z = k as f64 * H;
        outcomes.push(mean + sd * z);
        let idx = (STEPS - k.abs()) as usize;
        weights.push(if k == 0 { 2.0 * half[idx] } else { half[idx] });
    }
    EmpiricalDistribution::from_weights(outcomes, weights)
}

/// Regime call from the last half of the grid.
fn classify(t_grid: &[usize], alphas: &[IndexValue]) -> (Regime, f64, Option<SlopeFit>) {
    let start = t_grid.len() / 2;
    let tail = &alphas[start..];
    let ts = &t_grid[start..];
    let finite: Vec<(f64, f64)> = ts
        .iter()
        .zip(tail)
        .filter_map(|(t, a)| a.finite_value().map(|v| ((*t as f64).ln(), v.ln())))
        .collect();
    let fit = (finite.len() >= 2).then(|| ols_slope(&finite));
    if tail.iter().all(IndexValue::is_infinite) {
        return (Regime::Divergent, f64::INFINITY, fit);
    }
    if tail.iter().all(IndexValue::is_zero) {
        return (Regime::Vanishing, 0.0, fit);
    }
    if finite.len() == tail.len() {
        let slope = fit.map(|f| f.slope).unwrap_or(0.0);
        let mean = tail.iter().map(|a| a.value).sum::<f64>() / tail.len() as f64;
        let regime = if slope > REGIME_SLOPE {
            Regime::Divergent
        } else if slope < -REGIME_SLOPE {
            Regime::Vanishing
        } else {
            Regime::FinitePositive
        };
        let estimate = match regime {
            Regime::Divergent => f64::INFINITY,
            Regime::Vanishing => 0.0,
            _ => mean,
        };
        return (regime, estimate, fit);
    }
    let rising = tail.windows(2).all(|w| w[0].rank_cmp(&w[1]) != Ordering::Greater);
    let falling = tail.windows(2).all(|w| w[0].rank_cmp(&w[1]) != Ordering::Less);
    let last = tail.last().unwrap();
    if rising && last.is_infinite() {
        (Regime::Divergent, f64::INFINITY, fit)
    } else if falling && last.is_zero() {
        (Regime::Vanishing, 0.0, fit)
    } else {
        let min = tail.iter().map(|a| a.value).fold(f64::INFINITY, f64::min);
        (Regime::Undetermined, min, fit)
    }
}

fn ols_slope(points: &[(f64, f64)]) -> SlopeFit {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let std_error = (points.len() >= 3).then(|| {
        let intercept = my - slope * mx;
        let rss: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        (rss / (n - 2.0) / sxx).sqrt()
    });
    SlopeFit { slope, std_error, points: points.len() }
}

/// Multinomial bootstrap weights: counts of `n` uniform draws over `n` items.
pub fn bootstrap_counts(n: usize, stream: &mut NormalStream) -> Vec<f64> {
    let mut counts = vec![0.0; n];
    for _ in 0..n {
        let i = ((stream.next_uniform() * n as f64) as usize).min(n - 1);
        counts[i] += 1.0;
    }
    counts
}

/// Bootstrap standard error of `statistic` over resamples of `samples`.
pub fn bootstrap_std_error<F>(samples: &[f64], replicates: usize, seed: u64, statistic: F) -> Result<f64>
where
    F: Fn(&EmpiricalDistribution) -> Result<f64> + Sync,
{
    if replicates < 2 {
        return Err(Error::InvalidParameter("bootstrap needs at least 2 replicates".into()));
    }
    let values = (0..replicates as u64)
        .into_par_iter()
        .map(|b| {
            let mut stream = NormalStream::new(seed, b);
            let counts = bootstrap_counts(samples.len(), &mut stream);
            statistic(&EmpiricalDistribution::from_weights(samples.to_vec(), counts)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(mean_and_variance(&values).1.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityReport {
    /// Long-run index estimate.
    pub lhs: f64,
    /// `sup{γ : −μ_γ(ln V_T)/T ≥ λ}` on the γ grid.
    pub rhs: f64,
    pub lhs_std_error: f64,
    pub rhs_std_error: f64,
    /// `max(0.05·rhs, 3·√(lhs_se² + rhs_se²))`.
    pub tolerance: f64,
    #[serde(serialize_with = "extended::f64")]
    pub closed_form: f64,
    pub horizon: usize,
    pub n_paths: usize,
    pub seed: u64,
}

impl DualityReport {
    pub fn agrees(&self) -> bool {
        (self.lhs - self.rhs).abs() <= self.tolerance
    }
}

const DUALITY_BOOTSTRAP: usize = 20;

/// Compares the long-run index with the risk-sensitive dual
/// `sup{γ > 0 : −μ_γ(ln V_T)/T ≥ λ}` for an i.i.d. Gaussian return model.
///
/// The left side is the long-run estimate over the dyadic horizons below
/// `horizon` and `horizon` itself; the right side scans a 10⁴-point log grid of `γ ∈ [1e−3,
/// 1e3]` on the Monte Carlo law of `ln V_T`. Both Monte Carlo errors are
/// bootstrapped over paths.
pub fn duality_check(spec: &PathModelSpec, lambda_rate: f64, seed: u64, n_paths: usize, horizon: usize) -> Result<DualityReport> {
    let (m, sigma) = match spec {
        PathModelSpec::IidGaussian { mean, sigma } => (*mean, *sigma),
        _ => return Err(Error::Unsupported("the duality check is defined for i.i.d. Gaussian returns".into())),
    };
    if horizon == 0 || horizon > MAX_HORIZON {
        return Err(Error::InvalidParameter(format!("horizon must lie in 1..={MAX_HORIZON}")));
    }
    if n_paths < 2 {
        return Err(Error::InvalidParameter("n_paths must be >= 2".into()));
    }
    let mut report = DualityReport {
        lhs: 0.0,
        rhs: 0.0,
        lhs_std_error: 0.0,
        rhs_std_error: 0.0,
        tolerance: 0.0,
        closed_form: 0.0,
        horizon,
        n_paths,
        seed,
    };
    if m <= lambda_rate {
        return Ok(report);
    }
    report.closed_form = if sigma > 0.0 { 2.0 * (m - lambda_rate) / (sigma * sigma) } else { f64::INFINITY };

    let mut t_grid: Vec<usize> = std::iter::successors(Some(1usize), |t| Some(t * 2)).take_while(|t| *t < horizon).collect();
    t_grid.push(horizon);
    let cfg = LongRunConfig { lambda_rate, t_grid: t_grid.clone(), seed, n_paths, law: LawMode::GaussianFit };
    let samples = terminal_samples(spec, &cfg)?;
    let lhs_from = |rows: &[Vec<f64>], weights: Option<&[f64]>| -> Result<f64> {
        let alphas = rows
            .iter()
            .map(|row| {
                let (mean, var) = weighted_moments(row, weights);
                gaussian_index(&UtilityFamily::Exponential, mean, var)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(classify(&t_grid, &alphas).1)
    };
    report.lhs = lhs_from(&samples, None)?;

    let t_last = horizon;
    let log_values: Vec<f64> = samples.last().unwrap().iter().map(|s| s + lambda_rate * t_last as f64).collect();
    let gammas = log_grid(1e-3, 1e3, 10_000);
    let rhs_from = |law: &EmpiricalDistribution| -> Result<f64> { Ok(dual_sup(law, &gammas, lambda_rate, t_last)) };
    report.rhs = rhs_from(&EmpiricalDistribution::from_samples(&log_values)?)?;

    let replicate = |b: u64| -> Result<(f64, f64)> {
        let mut stream = NormalStream::new(seed ^ 0x5eed_b007, b);
        let counts = bootstrap_counts(n_paths, &mut stream);
        let lhs = lhs_from(&samples, Some(&counts))?;
        let rhs = rhs_from(&EmpiricalDistribution::from_weights(log_values.clone(), counts)?)?;
        Ok((lhs, rhs))
    };
    let reps = (0..DUALITY_BOOTSTRAP as u64).into_par_iter().map(replicate).collect::<Result<Vec<_>>>()?;
    let lhs_reps: Vec<f64> = reps.iter().map(|r| r.0).collect();
    let rhs_reps: Vec<f64> = reps.iter().map(|r| r.1).collect();
    report.lhs_std_error = mean_and_variance(&lhs_reps).1.sqrt();
    report.rhs_std_error = mean_and_variance(&rhs_reps).1.sqrt();
    let combined = report.lhs_std_error.hypot(report.rhs_std_error);
    report.tolerance = (0.05 * report.rhs).max(3.0 * combined);
    Ok(report)
}

/// Largest grid `γ` with `−μ_γ(ln V_T)/T ≥ λ`, by binary search on the
/// decreasing rate; `0` if none qualifies.
fn dual_sup(law: &EmpiricalDistribution, gammas: &[f64], lambda_rate: f64, horizon: usize) -> f64 {
    let ok = |g: f64| {
        let gamma = RiskAversion::new(g).expect("grid is positive");
        -entropic_closed_form(gamma, law).value / horizon as f64 >= lambda_rate
    };
    if !ok(gammas[0]) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0usize, gammas.len());
    // invariant: ok(gammas[lo]), and every index >= hi fails
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ok(gammas[mid]) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    gammas[lo]
}

fn weighted_moments(values: &[f64], weights: Option<&[f64]>) -> (f64, f64) {
    match weights {
        None => mean_and_variance(values),
        Some(w) => {
            let total: f64 = w.iter().sum();
            let mean = values.iter().zip(w).map(|(v, w)| v * w).collect::<CompensatedSum>().total() / total;
            let ss = values.iter().zip(w).map(|(v, w)| w * (v - mean) * (v - mean)).collect::<CompensatedSum>().total();
            (mean, ss / (total - 1.0))
        }
    }
}

/// One horizon of a reduced-form growth-target trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthTargetPoint {
    pub horizon: usize,
    pub target: f64,
    pub best: String,
    pub ranking: Vec<RankedCandidate>,
}

/// Evaluates `max_φ α(V_T(φ) − g(T))` for user-supplied candidate laws at
/// each horizon, reporting the best candidate and full ranking per `T`.
pub fn growth_target_trajectory<G>(
    family: &UtilityFamily,
    per_horizon: &[(usize, Vec<StrategyCandidate>)],
    target: G,
) -> Result<Vec<GrowthTargetPoint>>
where
    G: Fn(usize) -> f64,
{
    if per_horizon.is_empty() {
        return Err(Error::Empty("horizons"));
    }
    per_horizon
        .iter()
        .map(|(t, candidates)| {
            let g = target(*t);
            let selection = maximize_over_strategies(family, candidates, g)?;
            Ok(GrowthTargetPoint { horizon: *t, target: g, best: selection.best, ranking: selection.ranking })
        })
        .collect()
}
