//! Small statistical toolkit: means with standard errors, Kolmogorov–Smirnov
//! tests and histogram distances.

use alloc::vec::Vec;

use crate::math;

/// Sample mean and standard error of the mean.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, f64::INFINITY);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, math::sqrt(var / n as f64))
}

/// Streaming accumulator for mean and variance (Welford).
#[derive(Debug, Clone, Copy, Default)]
pub struct Running {
    pub n: u64,
    mean: f64,
    m2: f64,
}

impl Running {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Combines two accumulators (order-independent up to rounding; callers
    /// merge in a fixed order).
    pub fn merge(&mut self, other: &Running) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * (self.n as f64) * (other.n as f64) / n as f64;
        self.n = n;
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            f64::INFINITY
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn se(&self) -> f64 {
        math::sqrt(self.variance() / self.n as f64)
    }
}

/// Asymptotic Kolmogorov distribution tail `P(K > λ)`.
pub fn kolmogorov_tail(lam: f64) -> f64 {
    if lam <= 0.0 {
        return 1.0;
    }
    if lam < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = math::exp(-2.0 * jf * jf * lam * lam);
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Two-sample Kolmogorov–Smirnov test. Returns `(D, p-value)` using the
/// asymptotic distribution with the usual small-sample correction.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    if a.is_empty() || b.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    let sq = math::sqrt(ne);
    (d, kolmogorov_tail((sq + 0.12 + 0.11 / sq) * d))
}

/// One-sample Kolmogorov–Smirnov test against a continuous distribution
/// function.
pub fn ks_one_sample<F: Fn(f64) -> f64>(xs: &[f64], cdf: F) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let v = sorted(xs);
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (k, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - k as f64 / n).max((k + 1) as f64 / n - f);
    }
    let sq = math::sqrt(n);
    (d, kolmogorov_tail((sq + 0.12 + 0.11 / sq) * d))
}

/// Counts of `xs` in bins with the given sorted edges; values outside are
/// dropped.
pub fn histogram(xs: &[f64], edges: &[f64]) -> Vec<f64> {
    let mut h = alloc::vec![0.0; edges.len().saturating_sub(1)];
    for &x in xs {
        if x < edges[0] || x >= edges[edges.len() - 1] {
            continue;
        }
        let k = edges.partition_point(|e| *e <= x) - 1;
        h[k] += 1.0;
    }
    h
}

/// Total-variation distance `½ Σ |p_k − q_k|` between two nonnegative
/// vectors, relative to the mass of `q`.
pub fn relative_tv(p: &[f64], q: &[f64]) -> f64 {
    let mass: f64 = q.iter().sum();
    if mass == 0.0 {
        return if p.iter().sum::<f64>() == 0.0 { 0.0 } else { f64::INFINITY };
    }
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>() / mass
}
