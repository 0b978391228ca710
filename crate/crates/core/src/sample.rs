//! Finite laws, return series and their transforms.

use std::io::Read;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

const PROBABILITY_SUM_TOL: f64 = 1e-12;

/// A finite discrete law: sorted, distinct outcomes with their probabilities.
///
/// Duplicate outcomes are merged on construction, so two laws that agree as
/// distributions have identical representations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalDistribution {
    outcomes: Vec<f64>,
    probabilities: Vec<f64>,
}

/// `(mean, population variance, minimum positive-probability outcome)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub min: f64,
}

impl EmpiricalDistribution {
    /// Builds a law from outcome/probability pairs. Probabilities must be
    /// non-negative and sum to one within `1e−12`.
    pub fn new(outcomes: Vec<f64>, probabilities: Vec<f64>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::Empty("distribution outcomes"));
        }
        if outcomes.len() != probabilities.len() {
            return Err(Error::InvalidParameter(format!(
                "{} outcomes but {} probabilities",
                outcomes.len(),
                probabilities.len()
            )));
        }
        if let Some(x) = outcomes.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!("outcome {x} is not finite")));
        }
        if let Some(p) = probabilities.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidParameter(format!("probability {p} is not in [0, 1]")));
        }
        let total: CompensatedSum = probabilities.iter().copied().collect();
        if (total.total() - 1.0).abs() > PROBABILITY_SUM_TOL {
            return Err(Error::InvalidParameter(format!(
                "probabilities sum to {}, not 1",
                total.total()
            )));
        }
        Ok(Self::canonical(outcomes, probabilities))
    }

    /// Builds a law from non-negative weights, normalising them to sum to one.
    pub fn from_weights(outcomes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter("weights must be finite and >= 0".into()));
        }
        let total = weights.iter().copied().collect::<CompensatedSum>().total();
        if !(total > 0.0) {
            return Err(Error::InvalidParameter("weights must have a positive sum".into()));
        }
        let probabilities = weights.into_iter().map(|w| w / total).collect();
        if outcomes.is_empty() {
            return Err(Error::Empty("distribution outcomes"));
        }
        if let Some(x) = outcomes.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!("outcome {x} is not finite")));
        }
        Ok(Self::canonical(outcomes, probabilities))
    }

    /// Uniform law over the multiset of `values`.
    pub fn from_samples(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("samples"));
        }
        if let Some(x) = values.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!("sample {x} is not finite")));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len() as f64;
        let mut outcomes = Vec::new();
        let mut probabilities = Vec::new();
        let mut i = 0;
        while i < sorted.len() {
            let mut j = i + 1;
            while j < sorted.len() && sorted[j] == sorted[i] {
                j += 1;
            }
            outcomes.push(sorted[i]);
            probabilities.push((j - i) as f64 / n);
            i = j;
        }
        Ok(Self { outcomes, probabilities })
    }

    pub fn point_mass(c: f64) -> Result<Self> {
        Self::new(vec![c], vec![1.0])
    }

    fn canonical(outcomes: Vec<f64>, probabilities: Vec<f64>) -> Self {
        let mut pairs: Vec<(f64, f64)> = outcomes.into_iter().zip(probabilities).collect();
        // ties ordered by probability so merged sums ignore input order
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut out: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut probs: Vec<f64> = Vec::with_capacity(pairs.len());
        for (x, p) in pairs {
            // -0.0 and 0.0 are the same outcome
            match out.last() {
                Some(&last) if last == x => *probs.last_mut().unwrap() += p,
                _ => {
                    out.push(if x == 0.0 { 0.0 } else { x });
                    probs.push(p);
                }
            }
        }
        Self { outcomes: out, probabilities: probs }
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// `(outcome, probability)` pairs in ascending outcome order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + Clone + '_ {
        self.outcomes.iter().copied().zip(self.probabilities.iter().copied())
    }

    /// Pairs with strictly positive probability.
    pub fn support(&self) -> impl Iterator<Item = (f64, f64)> + Clone + '_ {
        self.iter().filter(|(_, p)| *p > 0.0)
    }

    /// `E[f(X)]` as a compensated weighted sum.
    pub fn expectation<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.support().map(|(x, p)| p * f(x)).collect::<CompensatedSum>().total()
    }

    pub fn mean(&self) -> f64 {
        self.expectation(|x| x)
    }

    /// Population variance.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.expectation(|x| (x - m) * (x - m))
    }

    /// Essential infimum: smallest outcome with positive probability.
    pub fn ess_inf(&self) -> f64 {
        self.support().map(|(x, _)| x).next().expect("probabilities sum to one")
    }

    /// Essential supremum: largest outcome with positive probability.
    pub fn ess_sup(&self) -> f64 {
        self.support().map(|(x, _)| x).last().expect("probabilities sum to one")
    }

    pub fn moments(&self) -> Moments {
        Moments { mean: self.mean(), variance: self.variance(), min: self.ess_inf() }
    }

    /// The law of `λ·X` for `λ > 0`.
    pub fn scale(&self, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("scale factor must be > 0, got {lambda}")));
        }
        let outcomes: Vec<f64> = self.outcomes.iter().map(|x| x * lambda).collect();
        if outcomes.iter().any(|x| !x.is_finite()) {
            return Err(Error::Evaluation("scaled outcome overflows".into()));
        }
        // scaling by λ > 0 preserves order, but may merge outcomes by rounding
        Ok(Self::canonical(outcomes, self.probabilities.clone()))
    }

    /// The law of `X + c`.
    pub fn shift(&self, c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::InvalidParameter(format!("shift must be finite, got {c}")));
        }
        let outcomes: Vec<f64> = self.outcomes.iter().map(|x| x + c).collect();
        if outcomes.iter().any(|x| !x.is_finite()) {
            return Err(Error::Evaluation("shifted outcome overflows".into()));
        }
        Ok(Self::canonical(outcomes, self.probabilities.clone()))
    }

    /// Integrated CDF `∫_{−∞}^t F(s) ds = E[(t − X)⁺]`.
    pub fn integrated_cdf(&self, t: f64) -> f64 {
        self.expectation(|x| (t - x).max(0.0))
    }
}

/// Second-order stochastic dominance: true iff `E[(t − A)⁺] ≤ E[(t − B)⁺]`
/// (within `1e−12`) at every grid point.
///
/// The grid must cover the union of both supports. The support points are
/// checked as well, since both integrated CDFs are piecewise linear with
/// kinks only there.
pub fn ssd_dominates(a: &EmpiricalDistribution, b: &EmpiricalDistribution, grid: &[f64]) -> Result<bool> {
    if grid.is_empty() {
        return Err(Error::Empty("SSD grid"));
    }
    let lo = grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let support_lo = a.ess_inf().min(b.ess_inf());
    let support_hi = a.ess_sup().max(b.ess_sup());
    if lo > support_lo || hi < support_hi {
        return Err(Error::Domain(format!(
            "grid [{lo}, {hi}] does not cover supports [{support_lo}, {support_hi}]"
        )));
    }
    let points = grid
        .iter()
        .copied()
        .chain(a.support().map(|(x, _)| x))
        .chain(b.support().map(|(x, _)| x));
    for t in points {
        if a.integrated_cdf(t) > b.integrated_cdf(t) + 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Realized one-step log-returns `r_t = ln V_t / V_{t−1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReturnSeries {
    values: Vec<f64>,
    step: String,
    origin: Option<String>,
}

impl ReturnSeries {
    pub fn new(values: Vec<f64>, step: impl Into<String>, origin: Option<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("return series"));
        }
        if let Some((i, x)) = values.iter().enumerate().find(|(_, x)| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!("return {x} at index {i} is not finite")));
        }
        Ok(Self { values, step: step.into(), origin })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn step(&self) -> &str {
        &self.step
    }

    pub fn origin(&self) -> Option<&str> {
        self.origin.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Uniform law over the observed values.
    pub fn to_distribution(&self) -> Result<EmpiricalDistribution> {
        EmpiricalDistribution::from_samples(&self.values)
    }

    /// Reads one return per line, or `timestamp,return` rows. A first row
    /// whose value column does not parse as a number is taken as a header;
    /// lines starting with `#` and blank lines are skipped.
    pub fn read_csv<R: Read>(reader: R, step: impl Into<String>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut values = Vec::new();
        let mut origin = None;
        let mut columns: Option<usize> = None;
        let mut first = true;
        for record in rdr.records() {
            let record = record.map_err(|e| Error::Parse {
                line: e.position().map(|p| p.line()).unwrap_or(0),
                message: e.to_string(),
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            if record.iter().all(|f| f.is_empty()) {
                continue;
            }
            let width = record.len();
            if width > 2 {
                return Err(Error::Parse { line, message: format!("expected 1 or 2 columns, got {width}") });
            }
            let value_field = &record[width - 1];
            let parsed = parse_decimal(value_field);
            if first {
                first = false;
                if parsed.is_none() {
                    columns = Some(width);
                    continue;
                }
            }
            match columns {
                Some(c) if c != width => {
                    return Err(Error::Parse { line, message: format!("expected {c} columns, got {width}") })
                }
                None => columns = Some(width),
                _ => {}
            }
            let value = parsed.ok_or_else(|| Error::Parse {
                line,
                message: format!("'{value_field}' is not a decimal number"),
            })?;
            if width == 2 && origin.is_none() {
                origin = Some(record[0].to_string());
            }
            values.push(value);
        }
        if values.is_empty() {
            return Err(Error::Empty("CSV contains no returns"));
        }
        Self::new(values, step, origin)
    }

    pub fn from_csv_path(path: &Path, step: impl Into<String>) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::read_csv(std::io::BufReader::new(file), step)
    }

    /// Writes `t,return` rows with a header, readable by [`Self::read_csv`].
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["t", "return"]).map_err(io)?;
        for (t, v) in self.values.iter().enumerate() {
            w.write_record([(t + 1).to_string(), format_g17(*v)]).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Strict decimal literal: optional sign, digits with an optional `.`, and
/// an optional exponent. Rejects `inf`, `nan` and comma decimals.
fn parse_decimal(field: &str) -> Option<f64> {
    let s = field.trim();
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    if body.is_empty() || !body.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        return None;
    }
    if !body.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-')) {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// `S_t = Σ_{s≤t} (r_s − λ)` for `t = 1..T`.
pub fn benchmarked_growth(series: &ReturnSeries, lambda_rate: f64) -> Vec<f64> {
    let mut acc = CompensatedSum::new();
    series
        .values()
        .iter()
        .map(|r| {
            acc.add(r - lambda_rate);
            acc.total()
        })
        .collect()
}

/// `%.17g`-style formatting: 17 significant digits, trailing zeros trimmed,
/// exponent notation outside `[1e−5, 1e17)`.
pub fn format_g17(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let fixed = format!("{v:.decimals$}");
        trim_zeros(&fixed)
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}
