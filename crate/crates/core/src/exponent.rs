//! Laplace exponent `ρ` of the right inverse and its characteristics,
//! entrance laws of the excursion measure `n^Z`, and the checks comparing
//! them with simulation.

use alloc::vec::Vec;

use crate::check::CheckReport;
use crate::error::{Error, Result};
use crate::fluctuation::{height_potential, LadderChar, LadderData, LadderMeasure};
use crate::inverse::{TraceVisitor, ZExcursion};
use crate::math::{self, Complex};
use crate::model::LevyModel;
use crate::resolvent;
use crate::stats;

/// Significance level of every statistical check.
pub const ALPHA: f64 = 0.01;

/// `y ↦ E(e^{−qT_{−y}}; T_{−y} < ∞)` tabulated on a log grid and
/// interpolated linearly. Below the first grid point the value there is
/// used: for bounded-variation models the limit as `y ↓ 0` is
/// `u^q(0−)/u^q(0+) < 1`.
#[derive(Debug, Clone)]
pub struct HitTable {
    pub q: f64,
    ys: Vec<f64>,
    vals: Vec<f64>,
}

impl HitTable {
    pub const Y_MIN: f64 = 1e-4;

    pub fn new(model: &LevyModel, q: f64, y_max: f64, points: usize) -> Result<Self> {
        let points = points.max(2);
        let ratio = math::ln(y_max / Self::Y_MIN) / (points - 1) as f64;
        let ys: Vec<f64> = (0..points).map(|i| Self::Y_MIN * math::exp(ratio * i as f64)).collect();
        let neg: Vec<f64> = ys.iter().map(|y| -y).collect();
        let vals = if q > 0.0 {
            resolvent::hitting_transforms(model, q, &neg)?
        } else {
            neg.iter().map(|&x| resolvent::hit_probability(model, x)).collect::<Result<_>>()?
        };
        Ok(HitTable { q, ys, vals })
    }

    pub fn get(&self, y: f64) -> f64 {
        let n = self.ys.len();
        if y <= self.ys[0] {
            return self.vals[0];
        }
        if y >= self.ys[n - 1] {
            return self.vals[n - 1];
        }
        let i = self.ys.partition_point(|v| *v <= y) - 1;
        let w = (y - self.ys[i]) / (self.ys[i + 1] - self.ys[i]);
        self.vals[i] * (1.0 - w) + self.vals[i + 1] * w
    }
}

fn largest_height(lc: &LadderChar) -> f64 {
    match &lc.measure {
        LadderMeasure::Empirical(m) => m.points.iter().map(|p| p.1).fold(0.0, f64::max),
        _ => 0.0,
    }
}

/// `ρ(q) = κ + ηq + ∫(1 − e^{−qs}u^q(−y)/u^q(0+)) Λ(ds, dy)`.
pub fn analytic_rho(model: &LevyModel, lc: &LadderChar, q: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::Precondition("q must be positive"));
    }
    let ymax = largest_height(lc);
    let integral = if ymax > 0.0 {
        let table = HitTable::new(model, q, ymax * 1.01, 400)?;
        lc.functional(q, |y| Ok(table.get(y)))?
    } else {
        lc.functional(q, |_| Ok(1.0))?
    };
    Ok(lc.kappa + lc.eta * q + integral)
}

/// Characteristics `(κ_K, η_K, Λ_K)` of the right inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct SubordinatorChar {
    pub kappa_k: f64,
    pub eta_k: f64,
    /// Atoms of `Λ_K` (`t`, mass); empty when not sampled.
    pub lambda_k: Vec<(f64, f64)>,
}

impl SubordinatorChar {
    /// `κ_K + η_K q + ∫(1 − e^{−qt}) Λ_K(dt)`.
    pub fn laplace_exponent(&self, q: f64) -> f64 {
        self.kappa_k
            + self.eta_k * q
            + self.lambda_k.iter().map(|&(t, m)| m * (1.0 - math::exp(-q * t))).sum::<f64>()
    }

    /// `∫(1 ∧ t) Λ_K(dt)`.
    pub fn small_moment(&self) -> f64 {
        self.lambda_k.iter().map(|&(t, m)| m * t.min(1.0)).sum()
    }
}

/// `κ_K = κ + ∫P(T_{−y} = ∞)Λ`, `η_K = η` and, when `sample_hit` is given,
/// `Λ_K` as the image of `Λ` under `(s, y) ↦ s + T_{−y}` with one sampled
/// `T_{−y}` (`+∞` if not hit) per atom of an empirical `Λ`.
pub fn k_characteristics<F: FnMut(f64) -> f64>(
    model: &LevyModel,
    lc: &LadderChar,
    sample_hit: Option<F>,
) -> Result<SubordinatorChar> {
    let escape = match &lc.measure {
        LadderMeasure::Empirical(m) if m.points.iter().any(|p| p.1 > 0.0) => {
            let table = HitTable::new(model, 0.0, largest_height(lc) * 1.01, 200)?;
            m.points
                .iter()
                .filter(|p| p.1 > 0.0)
                .map(|p| 1.0 - table.get(p.1))
                .sum::<f64>()
                * m.weight
        }
        _ => 0.0,
    };
    let mut lambda_k = Vec::new();
    if let (Some(mut f), LadderMeasure::Empirical(m)) = (sample_hit, &lc.measure) {
        for &(s, y) in &m.points {
            let t = if y > 0.0 { f(y) } else { 0.0 };
            if t.is_finite() {
                lambda_k.push((s + t, m.weight));
            }
        }
    }
    Ok(SubordinatorChar {
        kappa_k: lc.kappa + escape,
        eta_k: lc.eta,
        lambda_k,
    })
}

/// Right-hand side of the Fourier–Laplace entrance-law identity,
/// `(ρ(q) − iλ)/(q + ψ(λ)) − η_K`.
pub fn entrance_law_rhs(model: &LevyModel, rho: f64, eta_k: f64, q: f64, lam: f64) -> Complex {
    let num = Complex::new(rho, -lam);
    num / (Complex::new(q, 0.0) + model.char_exponent(lam)) - Complex::new(eta_k, 0.0)
}

/// `∫_0^h e^{cu} du`.
fn int_exp(c: Complex, h: f64) -> Complex {
    let z = c * h;
    if z.norm() < 1e-4 {
        Complex::new(h, 0.0) * (Complex::new(1.0, 0.0) + z / 2.0 + z * z / 6.0)
    } else {
        (z.exp() - Complex::new(1.0, 0.0)) / c
    }
}

/// Accumulates `Σ_excursions ∫ e^{−qr} e^{iλ e(r)} dr` over excursions of
/// `Z`, for a list of `(q, λ)`.
#[derive(Debug, Clone)]
pub struct EntranceAccumulator {
    pub points: Vec<(f64, f64)>,
    pub sums: Vec<Complex>,
    pub local_time: f64,
    pub excursions: usize,
}

impl EntranceAccumulator {
    pub fn new(points: Vec<(f64, f64)>) -> Self {
        let n = points.len();
        EntranceAccumulator {
            points,
            sums: alloc::vec![Complex::new(0.0, 0.0); n],
            local_time: 0.0,
            excursions: 0,
        }
    }

    pub fn merge(&mut self, other: &EntranceAccumulator) {
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            *a += b;
        }
        self.local_time += other.local_time;
        self.excursions += other.excursions;
    }

    /// MC estimates per unit local time.
    pub fn estimates(&self) -> Vec<Complex> {
        self.sums.iter().map(|s| s / self.local_time).collect()
    }
}

impl TraceVisitor for EntranceAccumulator {
    fn piece(&mut self, start: f64, level: f64, ta: f64, xa: f64, tb: f64, xb: f64) {
        let h = tb - ta;
        if !(h > 0.0) {
            return;
        }
        let (za, slope) = (xa - level, (xb - xa) / h);
        for (k, &(q, lam)) in self.points.iter().enumerate() {
            let pre = Complex::new(-q * (ta - start), lam * za).exp();
            self.sums[k] += pre * int_exp(Complex::new(-q, lam * slope), h);
        }
    }

    fn excursion(&mut self, _e: &ZExcursion) {
        self.excursions += 1;
    }
}

/// Compares MC entrance-law transforms with the formula; the statistic is
/// the largest modulus deviation relative to the formula's modulus.
pub fn entrance_law_check(
    model: &LevyModel,
    acc: &EntranceAccumulator,
    rho: &[f64],
    eta_k: f64,
    tolerance: f64,
    seed: u64,
    n_paths: u64,
) -> Result<CheckReport> {
    if acc.excursions == 0 && !(acc.local_time > 0.0) {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let est = acc.estimates();
    let (mut lhs, mut rhs) = (Vec::new(), Vec::new());
    let mut stat: f64 = 0.0;
    for ((&(q, lam), e), &r) in acc.points.iter().zip(&est).zip(rho) {
        let f = entrance_law_rhs(model, r, eta_k, q, lam);
        lhs.extend([e.re, e.im]);
        rhs.extend([f.re, f.im]);
        let d = (e - f).norm();
        stat = stat.max(if f.norm() > 0.0 { d / f.norm() } else { d });
    }
    Ok(CheckReport::deviation("entrance_law_transform", lhs, rhs, stat, tolerance, seed, n_paths))
}

/// Records `Z` at fixed ages within excursions.
#[derive(Debug, Clone)]
pub struct AgeValues {
    pub ages: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl AgeValues {
    pub fn new(ages: Vec<f64>) -> Self {
        let n = ages.len();
        AgeValues {
            ages,
            values: alloc::vec![Vec::new(); n],
        }
    }

    pub fn merge(&mut self, other: &AgeValues) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            a.extend_from_slice(b);
        }
    }
}

impl TraceVisitor for AgeValues {
    fn piece(&mut self, start: f64, level: f64, ta: f64, xa: f64, tb: f64, xb: f64) {
        for (k, &age) in self.ages.iter().enumerate() {
            let t = start + age;
            if t >= ta && t < tb {
                let w = (t - ta) / (tb - ta);
                self.values[k].push(xa + w * (xb - xa) - level);
            }
        }
    }
}

/// Binned comparison of `n^Z_t(dz)` with `ñ^R_t(dz) + ∫P^†_{t−s}(y,dz)Λ(ds,dy)`.
/// Each side gives, per age, the values observed and the local time they
/// are normalised by; the statistic is the largest relative total
/// variation over ages.
pub fn entrance_law_decomposition(
    lhs: &[Vec<f64>],
    lhs_local_time: f64,
    rhs: &[Vec<f64>],
    rhs_local_time: f64,
    edges: &[f64],
    tolerance: f64,
    seed: u64,
) -> Result<CheckReport> {
    let (mut l_all, mut r_all) = (Vec::new(), Vec::new());
    let mut stat: f64 = 0.0;
    let mut n = 0u64;
    for (a, b) in lhs.iter().zip(rhs) {
        let ha: Vec<f64> = stats::histogram(a, edges).iter().map(|c| c / lhs_local_time).collect();
        let hb: Vec<f64> = stats::histogram(b, edges).iter().map(|c| c / rhs_local_time).collect();
        stat = stat.max(stats::relative_tv(&ha, &hb));
        n += a.len() as u64;
        l_all.extend(ha);
        r_all.extend(hb);
    }
    if n == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    Ok(CheckReport::deviation(
        "entrance_law_decomposition",
        l_all,
        r_all,
        stat,
        tolerance,
        seed,
        n,
    ))
}

/// Minimum number of passing-positive excursions for the concatenation
/// check.
pub const MIN_PASSING: usize = 100;

/// Two-sample KS test of post-`ζ⁺` durations of `Z`-excursions against
/// durations under `P^†_y` at the matched heights, both capped at `cap`.
pub fn theorem1_concat_check(post: &[f64], fresh: &[f64], cap: f64, seed: u64) -> Result<CheckReport> {
    if post.len() < MIN_PASSING || fresh.len() < MIN_PASSING {
        return Err(Error::InsufficientData {
            needed: MIN_PASSING,
            got: post.len().min(fresh.len()),
        });
    }
    let a: Vec<f64> = post.iter().map(|d| d.min(cap)).collect();
    let b: Vec<f64> = fresh.iter().map(|d| d.min(cap)).collect();
    let (d, p) = stats::ks_two_sample(&a, &b);
    Ok(CheckReport::p_value(
        "concatenation_post_passage_duration",
        alloc::vec![d],
        alloc::vec![],
        p,
        ALPHA,
        seed,
        a.len() as u64,
    ))
}

fn bin2(s_edges: &[f64], y_edges: &[f64], s: f64, y: f64) -> Option<usize> {
    let find = |e: &[f64], v: f64| -> Option<usize> {
        if v < e[0] || v >= e[e.len() - 1] {
            None
        } else {
            Some(e.partition_point(|x| *x <= v) - 1)
        }
    };
    Some(find(s_edges, s)? * (y_edges.len() - 1) + find(y_edges, y)?)
}

/// `(ζ⁺, ω(ζ⁺))` of passing-positive excursions per unit local time
/// against `Λ(ds, dy)` on `y > 0`, binned; relative total variation.
pub fn theorem1_marginal_check(
    split: &[(f64, f64)],
    local_time: f64,
    lc: &LadderChar,
    s_edges: &[f64],
    y_edges: &[f64],
    tolerance: f64,
    seed: u64,
) -> Result<CheckReport> {
    let LadderMeasure::Empirical(m) = &lc.measure else {
        return Err(Error::NoClosedForm);
    };
    let cells = (s_edges.len() - 1) * (y_edges.len() - 1);
    let mut lhs = alloc::vec![0.0; cells];
    let mut rhs = alloc::vec![0.0; cells];
    for &(s, y) in split {
        if let Some(i) = bin2(s_edges, y_edges, s, y) {
            lhs[i] += 1.0 / local_time;
        }
    }
    for &(s, y) in m.points.iter().filter(|p| p.1 > 0.0) {
        if let Some(i) = bin2(s_edges, y_edges, s, y) {
            rhs[i] += m.weight;
        }
    }
    let stat = stats::relative_tv(&lhs, &rhs);
    Ok(CheckReport::deviation(
        "concatenation_first_positive_marginal",
        lhs,
        rhs,
        stat,
        tolerance,
        seed,
        split.len() as u64,
    ))
}

/// Excursions of `X` away from zero on `[0, window]`, with occupation-
/// density local time at zero from a band of half-width `eps`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ZeroExcursions {
    /// Durations (observed part if still open at the path end) of the
    /// excursions starting negative, with a completion flag and the depth.
    pub negative: Vec<(f64, bool, f64)>,
    pub local_time: f64,
}

impl ZeroExcursions {
    pub fn merge(&mut self, other: &ZeroExcursions) {
        self.negative.extend_from_slice(&other.negative);
        self.local_time += other.local_time;
    }
}

/// Time a linear piece from `a` to `b` of length `h` spends in `(−eps, eps)`.
fn band_time(a: f64, b: f64, h: f64, eps: f64) -> f64 {
    if a == b {
        return if a.abs() < eps { h } else { 0.0 };
    }
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let overlap = (hi.min(eps) - lo.max(-eps)).max(0.0);
    h * overlap / (hi - lo)
}

/// Scans the nodes of a path up to `window` (excursions are counted if they
/// start before `window`; their durations are followed to the end of the
/// path).
pub fn zero_excursions(path: &crate::sim::SamplePath, window: f64, eps: f64) -> ZeroExcursions {
    let nodes = path.nodes();
    let mut out = ZeroExcursions::default();
    // (start time, depth)
    let mut open: Option<(f64, f64)> = None;
    for w in nodes.windows(2) {
        let (n0, n1) = (w[0], w[1]);
        let (ta, a, tb, b) = (n0.t, n0.right, n1.t, n1.left);
        if ta < window {
            let tcut = tb.min(window);
            let bcut = a + (b - a) * (tcut - ta) / (tb - ta);
            out.local_time += band_time(a, bcut, tcut - ta, eps) / (2.0 * eps);
        }
        if let Some((_, depth)) = open.as_mut() {
            *depth = depth.min(a.min(b));
        }
        if (a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0) || (a == 0.0 && b != 0.0) {
            let tc = if a == b { ta } else { ta + (tb - ta) * (0.0 - a) / (b - a) };
            if let Some((s, depth)) = open.take() {
                out.negative.push((tc - s, true, depth));
            }
            if b < 0.0 && tc < window {
                open = Some((tc, b));
            }
        }
    }
    if let Some((s, depth)) = open {
        out.negative.push((path.end_time() - s, false, depth));
    }
    out
}

/// Ratio `n^Z(ζ > t)/n^X(ζ > t; starts negative)` from counts per unit
/// local time.
pub fn sigpos_rate_ratio(z_count: usize, z_local: f64, x_count: usize, x_local: f64) -> f64 {
    (z_count as f64 / z_local) / (x_count as f64 / x_local)
}

/// Paired-run check of the `2/σ²` scaling: `(R₁/R₂)` against
/// `σ₂²/σ₁²`, relative deviation.
pub fn sigpos_check(
    model: &LevyModel,
    ratio_1: f64,
    model_2: &LevyModel,
    ratio_2: f64,
    tolerance: f64,
    seed: u64,
    n: u64,
) -> Result<CheckReport> {
    if !(model.sigma2 > 0.0) || !(model_2.sigma2 > 0.0) {
        return Err(Error::Precondition("a Gaussian part is required"));
    }
    let observed = ratio_1 / ratio_2;
    let predicted = model_2.sigma2 / model.sigma2;
    Ok(CheckReport::deviation(
        "sigpos_rate_scaling",
        alloc::vec![ratio_1, ratio_2, observed],
        alloc::vec![2.0 / model.sigma2, 2.0 / model_2.sigma2, predicted],
        (observed / predicted - 1.0).abs(),
        tolerance,
        seed,
        n,
    ))
}

/// Two-sample KS on excursion shapes (capped durations).
pub fn sigpos_shape_check(z: &[f64], x: &[f64], name: &str, seed: u64) -> Result<CheckReport> {
    if z.len() < MIN_PASSING || x.len() < MIN_PASSING {
        return Err(Error::InsufficientData {
            needed: MIN_PASSING,
            got: z.len().min(x.len()),
        });
    }
    let (d, p) = stats::ks_two_sample(z, x);
    Ok(CheckReport::p_value(name, alloc::vec![d], alloc::vec![], p, ALPHA, seed, (z.len() + x.len()) as u64))
}

/// Rate of excursions with `ω(0) > 0` per unit local time against
/// `Π((0, ∞))/b`.
pub fn bv_jumpstart_check(model: &LevyModel, count: usize, local_time: f64, tolerance: f64, seed: u64) -> Result<CheckReport> {
    let b = model.bv_drift()?;
    if !(b > 0.0) {
        return Err(Error::Precondition("bounded-variation drift must be positive"));
    }
    let predicted = model.jumps.rate_up() / b;
    let observed = count as f64 / local_time;
    Ok(CheckReport::deviation(
        "jump_start_rate",
        alloc::vec![observed],
        alloc::vec![predicted],
        (observed / predicted - 1.0).abs(),
        tolerance,
        seed,
        count as u64,
    ))
}

/// `η_K q + β + ∫(1 − e^{−qt−βz}) Λ̃_n(dt, dz)` with `Λ̃_n` assembled from
/// the ladder measure: jumps with `ΔH ≤ 2^{-n}` are kept, larger ones are
/// mapped to `(Δτ + T_{−ΔH}, 0)`.
pub fn thinned_exponent(
    lc: &LadderChar,
    table: &HitTable,
    eta: f64,
    n: u32,
    q: f64,
    beta: f64,
) -> Result<f64> {
    if (table.q - q).abs() > 0.0 {
        return Err(Error::Precondition("hit table built for a different q"));
    }
    let thr = math::powf(2.0, -(n as f64));
    let integral = lc.functional_raw(q, |y| if y <= thr { math::exp(-beta * y) } else { table.get(y) })?;
    Ok(lc.kappa + eta * q + beta + integral)
}

/// `−ln E(e^{−qK̃_s − βX_{K̃_s}})/s` from samples `(K̃_s, X_{K̃_s})`
/// (`K̃_s = ∞` for killed paths), with a delta-method standard error.
pub fn empirical_bivariate_exponent(samples: &[(f64, f64)], s: f64, q: f64, beta: f64) -> (f64, f64) {
    let mut r = stats::Running::default();
    for &(k, x) in samples {
        r.push(if k.is_finite() { math::exp(-q * k - beta * x) } else { 0.0 });
    }
    let m = r.mean();
    (-math::ln(m) / s, r.se() / (m * s))
}

/// `P(O_x > w; T_x^+ < ∞) = ∫_{[0,x]} 𝒰_H(x − dy) Λ_H((w + y, ∞))` with the
/// height potential from creeping pieces and `Λ_H` the height marginal of
/// an empirical ladder measure. `cells` sets the `y`-discretization.
pub fn overshoot_tail_rhs(ladders: &[LadderData], lc: &LadderChar, x: f64, w: f64, cells: usize) -> Result<f64> {
    let LadderMeasure::Empirical(m) = &lc.measure else {
        return Ok(0.0);
    };
    let mut heights: Vec<f64> = m.points.iter().map(|p| p.1).filter(|&h| h > 0.0).collect();
    heights.sort_by(|a, b| a.total_cmp(b));
    let tail = |v: f64| (heights.len() - heights.partition_point(|h| *h <= v)) as f64 * m.weight;
    let h = x / cells as f64;
    let mut total = 0.0;
    for j in 0..cells {
        // potential of heights in [x − (j+1)h, x − jh)
        let lo = x - (j + 1) as f64 * h;
        let mass = height_potential(ladders, lo + h) - height_potential(ladders, lo);
        total += mass * tail(w + (j as f64 + 0.5) * h);
    }
    Ok(total)
}

/// Nondecreasing and concave on the grid, up to `tol`.
pub fn rho_shape_ok(qs: &[f64], rho: &[f64], tol: f64) -> bool {
    let inc = rho.windows(2).all(|w| w[1] >= w[0] - tol);
    let concave = (1..qs.len().saturating_sub(1)).all(|i| {
        let s1 = (rho[i] - rho[i - 1]) / (qs[i] - qs[i - 1]);
        let s2 = (rho[i + 1] - rho[i]) / (qs[i + 1] - qs[i]);
        s2 <= s1 + tol
    });
    inc && concave
}

/// `η_K` from `ρ(q)/q` at large `q` by a two-point linear extrapolation
/// in `1/√q`.
pub fn eta_from_rho(q1: f64, r1: f64, q2: f64, r2: f64) -> f64 {
    let (x1, x2) = (1.0 / math::sqrt(q1), 1.0 / math::sqrt(q2));
    let (y1, y2) = (r1 / q1, r2 / q2);
    y1 - x1 * (y2 - y1) / (x2 - x1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::JumpLaw;

    #[test]
    fn analytic_rho_closed_forms() {
        let bm = LevyModel::brownian(0.0, 1.0).unwrap();
        let lc = LadderChar::closed_form(&bm).unwrap();
        assert!((analytic_rho(&bm, &lc, 2.0).unwrap() - 2.0).abs() < 1e-3);
        let d = LevyModel::pure_drift(1.0).unwrap();
        let lc = LadderChar::closed_form(&d).unwrap();
        assert!((analytic_rho(&d, &lc, 3.0).unwrap() - 3.0).abs() < 1e-12);
        let sn = LevyModel::bounded_variation(2.0, 1.0, JumpLaw::ExponentialNegative { rate: 1.0 }).unwrap();
        let lc = LadderChar::closed_form(&sn).unwrap();
        let phi = sn.closed_form_rho(1.0).unwrap().unwrap();
        assert!((analytic_rho(&sn, &lc, 1.0).unwrap() - phi).abs() < 1e-3);
    }

    #[test]
    fn kappa_k_closed_forms() {
        for (mu, want) in [(0.0, 0.0), (1.0, 0.0), (-1.0, 2.0)] {
            let m = LevyModel::brownian(mu, 1.0).unwrap();
            let lc = LadderChar::closed_form(&m).unwrap();
            let k = k_characteristics(&m, &lc, None::<fn(f64) -> f64>).unwrap();
            assert!((k.kappa_k - want).abs() < 1e-9, "{mu}");
        }
    }

    #[test]
    fn entrance_rhs_at_zero() {
        let bm = LevyModel::brownian(0.0, 1.0).unwrap();
        let r = entrance_law_rhs(&bm, core::f64::consts::SQRT_2, 0.0, 1.0, 0.0);
        assert!((r.re - core::f64::consts::SQRT_2).abs() < 1e-15 && r.im == 0.0);
        let d = LevyModel::pure_drift(1.0).unwrap();
        assert!(entrance_law_rhs(&d, 2.0, 1.0, 2.0, 0.0).norm() < 1e-15);
    }

    #[test]
    fn piece_integral() {
        let c = Complex::new(-1.0, 2.0);
        let exact = (c * 0.5).exp() - 1.0;
        assert!((int_exp(c, 0.5) * c - exact).norm() < 1e-14);
        assert!((int_exp(Complex::new(1e-9, 0.0), 2.0).re - 2.0).abs() < 1e-8);
    }

    #[test]
    fn band_time_pieces() {
        assert!((band_time(-1.0, 1.0, 2.0, 0.5) - 1.0).abs() < 1e-15);
        assert_eq!(band_time(2.0, 3.0, 1.0, 0.5), 0.0);
        assert_eq!(band_time(0.1, 0.1, 1.0, 0.5), 1.0);
    }

    #[test]
    fn shape_helpers() {
        let qs = [0.5, 1.0, 2.0];
        let rho: alloc::vec::Vec<f64> = qs.iter().map(|q: &f64| math::sqrt(2.0 * q)).collect();
        assert!(rho_shape_ok(&qs, &rho, 1e-12));
        assert!(!rho_shape_ok(&qs, &[1.0, 0.5, 2.0], 1e-12));
        // ρ(q) = q + √q: η = 1
        let r = |q: f64| q + math::sqrt(q);
        assert!((eta_from_rho(100.0, r(100.0), 400.0, r(400.0)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sigpos_rejects_pure_drift() {
        let d = LevyModel::pure_drift(1.0).unwrap();
        assert!(matches!(
            sigpos_check(&d, 1.0, &d, 1.0, 0.15, 0, 0),
            Err(Error::Precondition(_))
        ));
    }
}
