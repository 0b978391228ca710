//! Seeded simulators for i.i.d. Gaussian, ARMA, fractional Gaussian noise
//! and Ornstein–Uhlenbeck series.
//!
//! Randomness comes from ChaCha8 seeded with `seed` and switched to stream
//! `path_id`, so every path of a batch is an independent, reproducible
//! substream. Uniforms use the top 53 bits of each 64-bit word, offset by
//! half an ulp so they lie strictly inside `(0, 1)`; Gaussians are their
//! images under the standard normal quantile function.

use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::sample::ReturnSeries;

/// Generating model for a return (or level) series.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum PathModelSpec {
    IidGaussian { mean: f64, sigma: f64 },
    /// `r_t = mean + y_t`, `y_t = Σ φᵢ y_{t−i} + e_t + Σ θⱼ e_{t−j}`,
    /// `e_t ~ N(0, sigma²)`.
    Arma { phi: Vec<f64>, theta: Vec<f64>, mean: f64, sigma: f64 },
    Fgn { hurst: f64, sigma: f64, mean: f64 },
    /// Level process `dX = κ(θ − X)dt + σ dW`, sampled every `dt`.
    Ou { kappa: f64, theta: f64, sigma: f64, x0: f64, dt: f64 },
}

fn require(ok: bool, message: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(message()))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    require(v.is_finite(), || format!("{name} must be finite, got {v}"))
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    require(v.is_finite() && v >= 0.0, || format!("{name} must be finite and >= 0, got {v}"))
}

/// Stationarity of `1 − φ₁z − … − φ_p z^p` via the step-down recursion:
/// all roots lie outside the unit circle iff every partial autocorrelation
/// has modulus below one.
fn ar_is_stationary(phi: &[f64]) -> bool {
    let mut a = phi.to_vec();
    for k in (1..=a.len()).rev() {
        let kappa = a[k - 1];
        if !(kappa.abs() < 1.0) {
            return false;
        }
        let denom = 1.0 - kappa * kappa;
        let prev: Vec<f64> = (0..k - 1).map(|j| (a[j] + kappa * a[k - 2 - j]) / denom).collect();
        a = prev;
    }
    true
}

impl PathModelSpec {
    pub fn iid_gaussian(mean: f64, sigma: f64) -> Result<Self> {
        let spec = Self::IidGaussian { mean, sigma };
        spec.validate()?;
        Ok(spec)
    }

    pub fn arma(phi: Vec<f64>, theta: Vec<f64>, mean: f64, sigma: f64) -> Result<Self> {
        let spec = Self::Arma { phi, theta, mean, sigma };
        spec.validate()?;
        Ok(spec)
    }

    pub fn fgn(hurst: f64, sigma: f64, mean: f64) -> Result<Self> {
        let spec = Self::Fgn { hurst, sigma, mean };
        spec.validate()?;
        Ok(spec)
    }

    pub fn ou(kappa: f64, theta: f64, sigma: f64, x0: f64, dt: f64) -> Result<Self> {
        let spec = Self::Ou { kappa, theta, sigma, x0, dt };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::IidGaussian { mean, sigma } => {
                finite("mean", *mean)?;
                nonneg("sigma", *sigma)
            }
            Self::Arma { phi, theta, mean, sigma } => {
                finite("mean", *mean)?;
                nonneg("sigma", *sigma)?;
                for v in phi.iter().chain(theta) {
                    finite("ARMA coefficient", *v)?;
                }
                require(ar_is_stationary(phi), || format!("AR coefficients {phi:?} are not stationary"))
            }
            Self::Fgn { hurst, sigma, mean } => {
                finite("mean", *mean)?;
                nonneg("sigma", *sigma)?;
                require(*hurst > 0.0 && *hurst < 1.0, || format!("hurst must lie in (0, 1), got {hurst}"))
            }
            Self::Ou { kappa, theta, sigma, x0, dt } => {
                require(kappa.is_finite() && *kappa > 0.0, || format!("kappa must be > 0, got {kappa}"))?;
                require(dt.is_finite() && *dt > 0.0, || format!("dt must be > 0, got {dt}"))?;
                finite("theta", *theta)?;
                finite("x0", *x0)?;
                nonneg("sigma", *sigma)
            }
        }
    }

    /// True for the stationary Gaussian return models.
    pub fn is_stationary_gaussian(&self) -> bool {
        !matches!(self, Self::Ou { .. })
    }

    /// Mean of one step; unsupported for the OU level process.
    pub fn step_mean(&self) -> Result<f64> {
        match self {
            Self::IidGaussian { mean, .. } | Self::Arma { mean, .. } | Self::Fgn { mean, .. } => Ok(*mean),
            Self::Ou { .. } => Err(Error::Unsupported("OU is a level model, not a stationary return model".into())),
        }
    }

    /// Model autocovariance at `lag`; unsupported for OU.
    pub fn autocovariance(&self, lag: usize) -> Result<f64> {
        match self {
            Self::IidGaussian { sigma, .. } => Ok(if lag == 0 { sigma * sigma } else { 0.0 }),
            Self::Arma { phi, theta, sigma, .. } => {
                let psi = psi_weights(phi, theta, lag);
                let s: f64 = psi.iter().zip(&psi[lag..]).map(|(a, b)| a * b).sum();
                Ok(sigma * sigma * s)
            }
            Self::Fgn { hurst, sigma, .. } => Ok(fgn_autocovariance(*hurst, *sigma, lag)),
            Self::Ou { .. } => Err(Error::Unsupported("OU is a level model, not a stationary return model".into())),
        }
    }
}

impl fmt::Display for PathModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("/");
        match self {
            Self::IidGaussian { mean, sigma } => write!(f, "iid:mean={mean},sigma={sigma}"),
            Self::Arma { phi, theta, mean, sigma } => {
                write!(f, "arma:phi={},theta={},mean={mean},sigma={sigma}", join(phi), join(theta))
            }
            Self::Fgn { hurst, sigma, mean } => write!(f, "fgn:hurst={hurst},sigma={sigma},mean={mean}"),
            Self::Ou { kappa, theta, sigma, x0, dt } => {
                write!(f, "ou:kappa={kappa},theta={theta},sigma={sigma},x0={x0},dt={dt}")
            }
        }
    }
}

/// Parses `kind:key=value,...`; ARMA coefficient lists are `/`-separated
/// and may be empty (`phi=`).
impl FromStr for PathModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params = std::collections::BTreeMap::new();
        for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got '{part}'")))?;
            if params.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate parameter '{k}'")));
            }
        }
        let mut take = |key: &str, default: Option<f64>| -> Result<f64> {
            match params.remove(key) {
                Some(v) => v
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("parameter {key}='{v}' is not a number"))),
                None => default.ok_or_else(|| Error::InvalidParameter(format!("missing parameter '{key}'"))),
            }
        };
        let spec = match kind.trim() {
            "iid" => {
                let mean = take("mean", None)?;
                let sigma = take("sigma", None)?;
                Self::iid_gaussian(mean, sigma)?
            }
            "fgn" => {
                let hurst = take("hurst", None)?;
                let sigma = take("sigma", None)?;
                let mean = take("mean", Some(0.0))?;
                Self::fgn(hurst, sigma, mean)?
            }
            "ou" => {
                let kappa = take("kappa", None)?;
                let theta = take("theta", None)?;
                let sigma = take("sigma", None)?;
                let x0 = take("x0", None)?;
                let dt = take("dt", Some(1.0))?;
                Self::ou(kappa, theta, sigma, x0, dt)?
            }
            "arma" => {
                let mean = take("mean", Some(0.0))?;
                let sigma = take("sigma", None)?;
                let phi = parse_coefficients(params.remove("phi").as_deref().unwrap_or(""))?;
                let theta = parse_coefficients(params.remove("theta").as_deref().unwrap_or(""))?;
                Self::arma(phi, theta, mean, sigma)?
            }
            other => return Err(Error::InvalidParameter(format!("unknown model '{other}'"))),
        };
        if let Some(key) = params.keys().next() {
            return Err(Error::InvalidParameter(format!("unknown parameter '{key}' for model {kind}")));
        }
        Ok(spec)
    }
}

/// Parses a `/`-separated coefficient list.
pub fn parse_coefficients(s: &str) -> Result<Vec<f64>> {
    s.split('/')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>().map_err(|_| Error::InvalidParameter(format!("coefficient '{p}' is not a number"))))
        .collect()
}

/// Stream of standard normal variates for one `(seed, stream)` pair.
pub struct NormalStream {
    rng: ChaCha8Rng,
    normal: Normal,
}

impl NormalStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng, normal: Normal::standard() }
    }

    /// Uniform in the open interval `(0, 1)`.
    pub fn next_uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_normal(&mut self) -> f64 {
        let u = self.next_uniform();
        self.normal.inverse_cdf(u)
    }
}

/// Autocovariance of fractional Gaussian noise,
/// `(σ²/2)(|k+1|^{2H} − 2|k|^{2H} + |k−1|^{2H})`.
pub fn fgn_autocovariance(hurst: f64, sigma: f64, lag: usize) -> f64 {
    let var = sigma * sigma;
    if lag == 0 {
        return var;
    }
    let h2 = 2.0 * hurst;
    let k = lag as f64;
    var / 2.0 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).powf(h2))
}

/// MA(∞) weights `ψ₀ = 1`, `ψⱼ = θⱼ + Σᵢ φᵢ ψ_{j−i}`, computed at least
/// `min_len` terms deep and until the tail is negligible.
fn psi_weights(phi: &[f64], theta: &[f64], min_len: usize) -> Vec<f64> {
    const MAX_LEN: usize = 5_000_000;
    let mut psi = vec![1.0];
    let mut quiet = 0;
    let horizon = theta.len().max(phi.len());
    let mut j = 1;
    loop {
        let mut v = theta.get(j - 1).copied().unwrap_or(0.0);
        for (i, p) in phi.iter().enumerate() {
            if let Some(prev) = j.checked_sub(i + 1) {
                v += p * psi[prev];
            }
        }
        psi.push(v);
        quiet = if v.abs() < 1e-17 { quiet + 1 } else { 0 };
        if j > horizon && j > min_len && (quiet > 2 * horizon + 10 || psi.len() >= MAX_LEN) {
            break;
        }
        j += 1;
    }
    psi
}

/// `Var(r_1 + … + r_T)` from the model autocovariances; `σ²T^{2H}` for fGn.
pub fn cumulative_variance(spec: &PathModelSpec, horizon: usize) -> Result<f64> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be >= 1".into()));
    }
    let t = horizon as f64;
    match spec {
        PathModelSpec::IidGaussian { sigma, .. } => Ok(sigma * sigma * t),
        PathModelSpec::Fgn { hurst, sigma, .. } => Ok(sigma * sigma * t.powf(2.0 * hurst)),
        PathModelSpec::Arma { phi, theta, sigma, .. } => {
            // S_T = Σ_u c_u e_u with c_u the partial sums of ψ; innovations
            // inside the window contribute C_{T−u}, earlier ones C_{T+v} − C_v
            let psi = psi_weights(phi, theta, horizon);
            let mut cum = Vec::with_capacity(psi.len());
            let mut acc = 0.0;
            for p in &psi {
                acc += p;
                cum.push(acc);
            }
            let at = |i: usize| if i < cum.len() { cum[i] } else { acc };
            let mut total = crate::numeric::CompensatedSum::new();
            for i in 0..horizon {
                total.add(at(i) * at(i));
            }
            for v in 0..cum.len() {
                let d = at(horizon + v) - at(v);
                total.add(d * d);
            }
            Ok(sigma * sigma * total.total())
        }
        PathModelSpec::Ou { .. } => {
            Err(Error::Unsupported("cumulative variance is defined for stationary return models only".into()))
        }
    }
}

/// Durbin–Levinson coefficients of the unit-variance fGn, row `t` holding
/// `φ_{t,1..t}` and the innovation standard deviation.
struct HoskingPlan {
    /// Row `t` holds `φ_{t,t..1}` (oldest lag first) at offset `t(t−1)/2`.
    coeffs: Vec<f64>,
    scales: Vec<f64>,
}

impl HoskingPlan {
    fn new(hurst: f64, n: usize) -> Self {
        let mut coeffs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        let mut scales = Vec::with_capacity(n);
        let mut step = HoskingStep::new(hurst, n);
        for _ in 0..n {
            let (row, scale) = step.advance();
            coeffs.extend(row.iter().rev());
            scales.push(scale);
        }
        Self { coeffs, scales }
    }

    fn generate(&self, stream: &mut NormalStream, out: &mut [f64]) {
        for t in 0..out.len() {
            let start = t * t.saturating_sub(1) / 2;
            let noise = self.scales[t] * stream.next_normal();
            out[t] = noise + dot(&self.coeffs[start..start + t], &out[..t]);
        }
    }
}

/// Dot product with four interleaved accumulators, in a fixed order.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    let tail: f64 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Incremental Durbin–Levinson recursion for the unit-variance fGn.
struct HoskingStep {
    rho: Vec<f64>,
    phi: Vec<f64>,
    scratch: Vec<f64>,
    v: f64,
    t: usize,
}

impl HoskingStep {
    fn new(hurst: f64, n: usize) -> Self {
        let rho = (0..n.max(1)).map(|k| fgn_autocovariance(hurst, 1.0, k)).collect();
        Self { rho, phi: Vec::with_capacity(n), scratch: Vec::with_capacity(n), v: 1.0, t: 0 }
    }

    /// Returns `φ_{t,1..t}` (newest lag first) and `√v_t` for the next step.
    fn advance(&mut self) -> (&[f64], f64) {
        if self.t > 0 {
            let t = self.t;
            let mut num = self.rho[t];
            for (j, c) in self.phi.iter().enumerate() {
                num -= c * self.rho[t - 1 - j];
            }
            let kappa = num / self.v;
            self.scratch.clear();
            for j in 0..self.phi.len() {
                self.scratch.push(self.phi[j] - kappa * self.phi[t - 2 - j]);
            }
            self.scratch.push(kappa);
            std::mem::swap(&mut self.phi, &mut self.scratch);
            self.v *= 1.0 - kappa * kappa;
        }
        self.t += 1;
        (&self.phi, self.v.max(0.0).sqrt())
    }
}

/// Per-batch precomputation shared by all paths.
enum Prepared {
    Plain,
    Hosking(HoskingPlan),
}

/// Coefficient tables are cached up to this length; longer paths rerun the
/// recursion per path to keep memory linear.
const HOSKING_TABLE_MAX: usize = 4096;

fn prepare(spec: &PathModelSpec, n: usize) -> Prepared {
    match spec {
        PathModelSpec::Fgn { hurst, sigma, .. } if *sigma > 0.0 && n <= HOSKING_TABLE_MAX => {
            Prepared::Hosking(HoskingPlan::new(*hurst, n))
        }
        _ => Prepared::Plain,
    }
}

fn simulate_prepared(spec: &PathModelSpec, prepared: &Prepared, n: usize, seed: u64, stream: u64) -> Vec<f64> {
    let mut rng = NormalStream::new(seed, stream);
    match spec {
        PathModelSpec::IidGaussian { mean, sigma } => (0..n).map(|_| mean + sigma * rng.next_normal()).collect(),
        PathModelSpec::Arma { phi, theta, mean, sigma } => {
            let burn = 10 * (phi.len() + theta.len()) + 100;
            let total = burn + n;
            let mut y = vec![0.0; total];
            let mut e = vec![0.0; total];
            for t in 0..total {
                e[t] = sigma * rng.next_normal();
                let mut v = e[t];
                for (i, p) in phi.iter().enumerate() {
                    if let Some(s) = t.checked_sub(i + 1) {
                        v += p * y[s];
                    }
                }
                for (j, q) in theta.iter().enumerate() {
                    if let Some(s) = t.checked_sub(j + 1) {
                        v += q * e[s];
                    }
                }
                y[t] = v;
            }
            y[burn..].iter().map(|v| mean + v).collect()
        }
        PathModelSpec::Fgn { hurst, sigma, mean } => {
            if *sigma == 0.0 {
                return vec![*mean; n];
            }
            let mut x = vec![0.0; n];
            match prepared {
                Prepared::Hosking(plan) => plan.generate(&mut rng, &mut x),
                Prepared::Plain => {
                    let mut step = HoskingStep::new(*hurst, n);
                    let mut reversed = Vec::with_capacity(n);
                    for t in 0..n {
                        let (row, scale) = step.advance();
                        reversed.clear();
                        reversed.extend(row.iter().rev());
                        let noise = scale * rng.next_normal();
                        x[t] = noise + dot(&reversed, &x[..t]);
                    }
                }
            }
            x.iter().map(|v| mean + sigma * v).collect()
        }
        PathModelSpec::Ou { kappa, theta, sigma, x0, dt } => {
            let decay = (-kappa * dt).exp();
            let noise = sigma * (-(-2.0 * kappa * dt).exp_m1() / (2.0 * kappa)).sqrt();
            let mut level = *x0;
            (0..n)
                .map(|_| {
                    level = theta + (level - theta) * decay + noise * rng.next_normal();
                    level
                })
                .collect()
        }
    }
}

/// One series of length `n_steps` drawn from stream 0 of `seed`.
pub fn simulate(spec: &PathModelSpec, n_steps: usize, seed: u64) -> Result<ReturnSeries> {
    spec.validate()?;
    if n_steps == 0 {
        return Err(Error::InvalidParameter("n_steps must be >= 1".into()));
    }
    let values = simulate_prepared(spec, &prepare(spec, n_steps), n_steps, seed, 0);
    ReturnSeries::new(values, "1", None)
}

/// `n_paths` independent series; path `p` uses stream `p`, so path 0
/// coincides with [`simulate`]. Paths are generated in parallel and
/// returned in stream order.
pub fn simulate_batch(spec: &PathModelSpec, n_steps: usize, seed: u64, n_paths: usize) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    if n_steps == 0 || n_paths == 0 {
        return Err(Error::InvalidParameter("n_steps and n_paths must be >= 1".into()));
    }
    let prepared = prepare(spec, n_steps);
    Ok((0..n_paths as u64)
        .into_par_iter()
        .map(|p| simulate_prepared(spec, &prepared, n_steps, seed, p))
        .collect())
}
