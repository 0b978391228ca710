//! Small numerical kernels shared across modules.

/// Neumaier-compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// `ln Σ pᵢ·exp(lᵢ)` for non-negative weights, with max-subtraction.
///
/// Terms with zero weight are ignored. Any `lᵢ = +∞` with positive weight
/// makes the result `+∞`; an all-zero weight vector yields `−∞`.
pub fn log_weighted_sum_exp<I>(terms: I) -> f64
where
    I: Iterator<Item = (f64, f64)> + Clone,
{
    let mut max = f64::NEG_INFINITY;
    for (w, l) in terms.clone() {
        if w > 0.0 && l > max {
            max = l;
        }
    }
    if max == f64::INFINITY || max == f64::NEG_INFINITY {
        return max;
    }
    let sum: CompensatedSum = terms
        .filter(|(w, _)| *w > 0.0)
        .map(|(w, l)| w * (l - max).exp())
        .collect();
    max + sum.total().ln()
}

/// Golden-section search for the maximizer of a unimodal function on
/// `[lo, hi]`. Returns `(argmax, max)`.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (b - a) > tol && iterations < 500 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    (x, fx)
}

/// Bisection on a monotone predicate: `pred(lo)` must be false and
/// `pred(hi)` true. Returns the final `(lo, hi)` bracket of the switch
/// point once `hi − lo ≤ abs_tol + rel_tol·|hi|`.
pub fn bisect_predicate<F>(mut pred: F, mut lo: f64, mut hi: f64, abs_tol: f64, rel_tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> bool,
{
    for _ in 0..2000 {
        if hi - lo <= abs_tol + rel_tol * hi.abs() {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// `ln(1 + eˣ)` without overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 36.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `ln(eˣ − 1)` for `x > 0`, without overflow.
pub fn log_expm1(x: f64) -> f64 {
    if x > 36.0 {
        x + (-(-x).exp()).ln_1p()
    } else {
        x.exp_m1().ln()
    }
}

/// Log-spaced grid of `n` points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let step = (b - a) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { (a + step * i as f64).exp() })
                .collect()
        }
    }
}

/// Evenly spaced grid of `n` points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// Serde helpers writing non-finite floats as the strings `"inf"`,
/// `"-inf"` and `"nan"`, since JSON has no literal for them.
pub mod extended {
    use serde::ser::{SerializeTuple, Serializer};

    pub fn f64<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn pair<S: Serializer>(v: &(f64, f64), s: S) -> Result<S::Ok, S::Error> {
        struct Ext(f64);
        impl serde::Serialize for Ext {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                f64(&self.0, s)
            }
        }
        let mut t = s.serialize_tuple(2)?;
        t.serialize_element(&Ext(v.0))?;
        t.serialize_element(&Ext(v.1))?;
        t.end()
    }
}
