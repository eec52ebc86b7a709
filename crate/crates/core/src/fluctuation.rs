//! Ascending ladder processes, excursions away from the supremum, and
//! estimates of the ladder characteristics `(κ, η, Λ)`.
//!
//! Local time at the supremum is the cumulative *continuous* increase of the
//! running supremum, so the ladder height is `H_x = x + Σ ΔH` (unit drift).
//! On the piecewise-linear path every excursion below the supremum is a jump
//! `Δτ` of the ladder time; an upward path jump over the supremum is a jump
//! `ΔH` (together with the time `Δτ` since the supremum was last attained).

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::measure::{refine_until_stable, EmpiricalMeasure};
use crate::model::{JumpSpec, LevyModel, LongRun};
use crate::sim::{Cursor, SamplePath};

/// Minimum number of ladder jumps for an empirical estimate.
pub const MIN_LADDER_JUMPS: usize = 1000;

/// One jump of the ladder process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderJump {
    /// Local time at which the jump occurs.
    pub x: f64,
    /// `τ_{x−}`, the last time at the supremum before the jump.
    pub start: f64,
    pub dtau: f64,
    pub dh: f64,
    /// Supremum before the jump, `H_{x−}`.
    pub sup: f64,
}

/// Ladder process of one path (or of a shifted piece of a path).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LadderData {
    pub start_time: f64,
    pub start_level: f64,
    pub jumps: Vec<LadderJump>,
    /// Total local time observed.
    pub local_time: f64,
    /// Time spent creeping (supremum increasing continuously).
    pub creep_time: f64,
    /// Time at which observation ended.
    pub end_time: f64,
    pub end_sup: f64,
    /// Observation ended at the horizon (rather than at a requested stop).
    pub censored: bool,
    /// Excursion below the supremum still running at the end of the path.
    pub open: Option<LadderJump>,
    /// Set by the estimator for paths of models drifting to `−∞`: the last
    /// supremum is taken as final.
    pub killed: bool,
    pub kill_local_time: Option<f64>,
    /// Creeping pieces `(t0, h0, t1, h1)` when requested.
    pub creep_pieces: Vec<(f64, f64, f64, f64)>,
}

impl LadderData {
    /// `(x, τ_x, H_x)` immediately after each ladder jump, with the jump.
    pub fn records(&self) -> Vec<(f64, f64, f64, LadderJump)> {
        let mut out = Vec::with_capacity(self.jumps.len());
        let mut hsum = 0.0;
        for j in &self.jumps {
            hsum += j.dh;
            out.push((j.x, j.start + j.dtau, self.start_level + j.x + hsum, *j));
        }
        out
    }

    pub fn total_height_jumps(&self) -> f64 {
        self.jumps.iter().map(|j| j.dh).sum()
    }
}

/// Why a ladder walk stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WalkEnd {
    Exhausted,
    LevelReached,
    LocalTimeReached,
    /// A ladder-height jump larger than the threshold; the cursor is just
    /// after the jump.
    BigJump(LadderJump, Cursor),
}

/// Incremental ladder extraction from a cursor.
#[derive(Debug, Clone)]
pub(crate) struct Walker {
    pub cur: Cursor,
    pub sup: f64,
    /// Last time at the supremum.
    pub g: f64,
    pub local: f64,
    pub creep: f64,
    pub jumps: Vec<LadderJump>,
    pub keep_pieces: bool,
    pub pieces: Vec<(f64, f64, f64, f64)>,
    /// Sorted level targets; `level_times[k]` is the first time the
    /// supremum reaches `levels[k]` (by creeping or by a jump).
    pub levels: Vec<f64>,
    pub level_times: Vec<f64>,
    /// Sorted local-time targets with the time and supremum there.
    pub local_targets: Vec<f64>,
    pub local_hits: Vec<(f64, f64)>,
    /// Local time at time `t_cut` once the walk has passed it.
    pub t_cut: f64,
    pub local_at_cut: Option<f64>,
}

impl Walker {
    pub fn new(cur: Cursor) -> Self {
        Walker {
            cur,
            sup: cur.x,
            g: cur.t,
            local: 0.0,
            creep: 0.0,
            jumps: Vec::new(),
            keep_pieces: false,
            pieces: Vec::new(),
            levels: Vec::new(),
            level_times: Vec::new(),
            local_targets: Vec::new(),
            local_hits: Vec::new(),
            t_cut: f64::INFINITY,
            local_at_cut: None,
        }
    }

    /// Restarts from `cur` keeping accumulated local time and records.
    pub fn restart(&mut self, cur: Cursor) {
        self.cur = cur;
        self.sup = cur.x;
        self.g = cur.t;
    }

    fn mark_levels_jump(&mut self, upto: f64, t: f64) {
        while self.level_times.len() < self.levels.len() && self.levels[self.level_times.len()] <= upto {
            self.level_times.push(t);
        }
    }

    /// Walks until the path ends, the supremum reaches `stop_level`, the
    /// local time reaches `stop_local`, or a height jump exceeds `big`.
    pub fn run(&mut self, path: &mut SamplePath, stop_level: f64, stop_local: f64, big: f64) -> WalkEnd {
        loop {
            let Some((t0, x0, t1, x1)) = path.segment(self.cur.seg) else {
                return WalkEnd::Exhausted;
            };
            let (ta, a) = if self.cur.t == t0 { (t0, x0) } else { (self.cur.t, self.cur.x) };
            if x1 > self.sup && t1 > ta {
                let tc = if a < self.sup {
                    ta + (t1 - ta) * (self.sup - a) / (x1 - a)
                } else {
                    ta
                };
                if tc > self.g {
                    self.jumps.push(LadderJump {
                        x: self.local,
                        start: self.g,
                        dtau: tc - self.g,
                        dh: 0.0,
                        sup: self.sup,
                    });
                }
                let slope = (x1 - self.sup) / (t1 - tc);
                if self.local_at_cut.is_none() && self.t_cut < t1 {
                    self.local_at_cut = Some(self.local + (self.t_cut - tc).max(0.0) * slope);
                }
                let time_at = |h: f64, sup: f64| tc + (h - sup) / slope;
                while self.level_times.len() < self.levels.len() {
                    let l = self.levels[self.level_times.len()];
                    if l > x1 {
                        break;
                    }
                    self.level_times.push(time_at(l.max(self.sup), self.sup));
                }
                while self.local_hits.len() < self.local_targets.len() {
                    let s = self.local_targets[self.local_hits.len()];
                    let h = self.sup + (s - self.local);
                    if h > x1 {
                        break;
                    }
                    self.local_hits.push((time_at(h, self.sup), h));
                }
                let lim_level = stop_level.min(self.sup + (stop_local - self.local));
                if lim_level <= x1 {
                    let h = lim_level.max(self.sup);
                    let th = time_at(h, self.sup);
                    if self.keep_pieces {
                        self.pieces.push((tc, self.sup, th, h));
                    }
                    self.local += h - self.sup;
                    self.creep += th - tc;
                    self.sup = h;
                    self.g = th;
                    self.cur = Cursor { seg: self.cur.seg, t: th, x: h };
                    return if h >= stop_level {
                        WalkEnd::LevelReached
                    } else {
                        WalkEnd::LocalTimeReached
                    };
                }
                if self.keep_pieces {
                    self.pieces.push((tc, self.sup, t1, x1));
                }
                self.local += x1 - self.sup;
                self.creep += t1 - tc;
                self.sup = x1;
                self.g = t1;
            } else if self.local_at_cut.is_none() && self.t_cut < t1 {
                self.local_at_cut = Some(self.local);
            }
            let seg = self.cur.seg + 1;
            let n = path.node(seg);
            self.cur = Cursor { seg, t: n.t, x: n.right };
            if n.right > self.sup {
                let jump = LadderJump {
                    x: self.local,
                    start: self.g,
                    dtau: n.t - self.g,
                    dh: n.right - self.sup,
                    sup: self.sup,
                };
                if jump.dh > big {
                    return WalkEnd::BigJump(jump, self.cur);
                }
                self.jumps.push(jump);
                self.mark_levels_jump(n.right, n.t);
                self.sup = n.right;
                self.g = n.t;
                if self.sup >= stop_level {
                    return WalkEnd::LevelReached;
                }
            }
        }
    }
}

/// Ladder process of a whole path (up to its horizon).
pub fn extract_ladder(path: &mut SamplePath) -> LadderData {
    extract_ladder_until(path, f64::INFINITY, false)
}

/// Ladder process up to the time the supremum reaches `stop_level`.
pub fn extract_ladder_until(path: &mut SamplePath, stop_level: f64, keep_pieces: bool) -> LadderData {
    extract_ladder_window(path, stop_level, f64::INFINITY, keep_pieces)
}

/// Ladder process up to `stop_level`, keeping only excursions that start
/// before time `t_cut` and the local time accumulated by then.
///
/// Counting the excursions started before a fixed time, with the local time
/// at that time, is unbiased for `Λ` (the local time at a fixed time is a
/// stopping time for the excursion process). An excursion still running at
/// the end of the path is kept in `open` with its observed length.
pub fn extract_ladder_window(path: &mut SamplePath, stop_level: f64, t_cut: f64, keep_pieces: bool) -> LadderData {
    let mut w = Walker::new(path.origin());
    w.keep_pieces = keep_pieces;
    w.t_cut = t_cut;
    let end = w.run(path, stop_level, f64::INFINITY, f64::INFINITY);
    let censored = matches!(end, WalkEnd::Exhausted);
    let end_time = if censored { path.end_time() } else { w.cur.t };
    let local = w.local_at_cut.unwrap_or(w.local).min(w.local);
    let creep = if w.local > 0.0 { w.creep * local / w.local } else { 0.0 };
    let open = (censored && w.g < t_cut && end_time > w.g).then_some(LadderJump {
        x: w.local,
        start: w.g,
        dtau: end_time - w.g,
        dh: 0.0,
        sup: w.sup,
    });
    let mut jumps = w.jumps;
    jumps.retain(|j| j.start < t_cut);
    LadderData {
        start_time: 0.0,
        start_level: 0.0,
        jumps,
        local_time: local,
        creep_time: creep,
        end_time,
        end_sup: w.sup,
        censored,
        open,
        killed: false,
        kill_local_time: None,
        creep_pieces: w.pieces,
    }
}

/// Where the Lévy measure `Λ` of the ladder process comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum LadderMeasure {
    Zero,
    /// No upward jumps: `Λ` lives on `{y = 0}` and
    /// `∫(1 − e^{−qs}) Λ(ds, {0}) = Φ(q) − κ − ηq`.
    SpectrallyNegative(LevyModel),
    Empirical(EmpiricalMeasure),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Provenance {
    ClosedForm,
    Empirical,
}

/// Characteristics `(κ, η, Λ)` of the ladder process.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderChar {
    pub kappa: f64,
    pub eta: f64,
    pub measure: LadderMeasure,
    pub provenance: Provenance,
    /// Total local time behind an empirical estimate.
    pub local_time: f64,
    pub n_jumps: usize,
    /// Fraction of ladders ending at the horizon.
    pub censored_fraction: f64,
    /// Creeping time per unit local time as measured on the discretized
    /// paths (nonzero for Gaussian models only through discretization).
    pub creep_rate: f64,
}

/// Bins per decade used first when integrating an empirical `Λ`.
pub const START_BINS_PER_DECADE: usize = 8;

impl LadderChar {
    /// Closed-form characteristics for Brownian motion with drift, pure
    /// drift and spectrally negative compound-Poisson models.
    pub fn closed_form(model: &LevyModel) -> Result<Self> {
        if model.is_experimental() || model.has_positive_jumps() {
            return Err(Error::NoClosedForm);
        }
        let bv = model.is_bounded_variation();
        let eta = if bv {
            let b = model.bv_drift()?;
            if b <= 0.0 {
                return Err(Error::NoClosedForm);
            }
            1.0 / b
        } else {
            0.0
        };
        let kappa = if model.mean() >= 0.0 {
            0.0
        } else if matches!(model.jumps, JumpSpec::None) {
            2.0 * model.a.abs() / model.sigma2
        } else {
            let lo = 1e-9 / (1.0 + model.mean().abs());
            math::root_increasing(|b| model.laplace_exponent(b), lo, 1e-14)?
        };
        let measure = if matches!(model.jumps, JumpSpec::None) && model.sigma2 == 0.0 {
            LadderMeasure::Zero
        } else {
            LadderMeasure::SpectrallyNegative(model.clone())
        };
        Ok(LadderChar {
            kappa,
            eta,
            measure,
            provenance: Provenance::ClosedForm,
            local_time: f64::INFINITY,
            n_jumps: 0,
            censored_fraction: 0.0,
            creep_rate: eta,
        })
    }

    /// `∫ (1 − e^{−qs} h(y)) Λ(ds, dy)`, where `h(0) = 1`.
    ///
    /// Empirical measures are binned (log bins, atom cells at 0) and the
    /// midpoint rule is refined until two successive values agree to
    /// `1e−3` relative.
    pub fn functional<H: FnMut(f64) -> Result<f64>>(&self, q: f64, mut h: H) -> Result<f64> {
        match &self.measure {
            LadderMeasure::Zero => Ok(0.0),
            LadderMeasure::SpectrallyNegative(model) => {
                let phi = model.closed_form_rho(q)?.ok_or(Error::NoClosedForm)?;
                Ok(phi - self.kappa - self.eta * q)
            }
            LadderMeasure::Empirical(m) => {
                if m.points.is_empty() {
                    return Ok(0.0);
                }
                let mut cache: Vec<(f64, f64)> = Vec::new();
                let mut hv = |y: f64| -> Result<f64> {
                    if y == 0.0 {
                        return Ok(1.0);
                    }
                    if let Some(&(_, v)) = cache.iter().find(|(k, _)| *k == y) {
                        return Ok(v);
                    }
                    let v = h(y)?;
                    cache.push((y, v));
                    Ok(v)
                };
                let mass_s = m.integrate(|s, _| 1.0 - math::exp(-q * s));
                let scale = mass_s.max(1e-12);
                let (v, _) = refine_until_stable(
                    |d| {
                        let b = m.binned(d);
                        let time_part = b.integrate(|s, _| 1.0 - math::exp(-q * s));
                        // ∫ e^{−qs}(1 − h(y)) Λ
                        let cross = b.integrate_separable(|s| math::exp(-q * s), |y| Ok(1.0 - hv(y)?))?;
                        Ok(time_part + cross)
                    },
                    START_BINS_PER_DECADE,
                    1e-3,
                    scale,
                    4,
                )?;
                Ok(v)
            }
        }
    }

    /// Same functional evaluated directly on the jump sample (no binning).
    pub fn functional_raw<H: FnMut(f64) -> f64>(&self, q: f64, mut h: H) -> Result<f64> {
        match &self.measure {
            LadderMeasure::Empirical(m) => {
                Ok(m.points.iter().map(|&(s, y)| 1.0 - math::exp(-q * s) * h(y)).sum::<f64>() * m.weight)
            }
            _ => self.functional(q, |y| Ok(h(y))),
        }
    }

    /// `k(α, β) = κ + ηα + β + ∫(1 − e^{−αs−βy}) Λ(ds, dy)`.
    pub fn exponent(&self, alpha: f64, beta: f64) -> Result<f64> {
        let integral = self.functional(alpha, |y| Ok(math::exp(-beta * y)))?;
        Ok(self.kappa + self.eta * alpha + beta + integral)
    }
}

/// Empirical `(κ, η, Λ)` from ladders of independent paths.
///
/// `Λ` puts mass `1/(total local time)` on every observed `(Δτ, ΔH)`. For
/// models drifting to `−∞` each ladder is taken as killed at its final local
/// time and `κ` is the number of ladders per unit local time; otherwise
/// `κ = 0`, excursions still open at the horizon enter with their observed
/// length, and the censoring is reported in `censored_fraction`.
/// `η` is the creeping time per unit local time for bounded-variation paths
/// and `0` otherwise.
pub fn estimate_ladder_char(ladders: &[LadderData], long_run: LongRun, bounded_variation: bool) -> Result<LadderChar> {
    let total_local: f64 = ladders.iter().map(|l| l.local_time).sum();
    let n_jumps: usize = ladders.iter().map(|l| l.jumps.len()).sum();
    if n_jumps > 0 && n_jumps < MIN_LADDER_JUMPS {
        return Err(Error::InsufficientData {
            needed: MIN_LADDER_JUMPS,
            got: n_jumps,
        });
    }
    if !(total_local > 0.0) {
        return Err(Error::InsufficientData {
            needed: MIN_LADDER_JUMPS,
            got: 0,
        });
    }
    let creep: f64 = ladders.iter().map(|l| l.creep_time).sum();
    let creep_rate = creep / total_local;
    let censored = ladders.iter().filter(|l| l.censored).count();
    let kappa = match long_run {
        LongRun::DriftsDown => ladders.len() as f64 / total_local,
        _ => 0.0,
    };
    let mut points = Vec::with_capacity(n_jumps);
    for l in ladders {
        points.extend(l.jumps.iter().map(|j| (j.dtau, j.dh)));
        if long_run != LongRun::DriftsDown {
            // observed length: a lower bound for the excursion length
            points.extend(l.open.iter().map(|j| (j.dtau, 0.0)));
        }
    }
    let measure = if points.is_empty() {
        LadderMeasure::Zero
    } else {
        LadderMeasure::Empirical(EmpiricalMeasure::new(points, 1.0 / total_local))
    };
    Ok(LadderChar {
        kappa,
        eta: if bounded_variation { creep_rate } else { 0.0 },
        measure,
        provenance: Provenance::Empirical,
        local_time: total_local,
        n_jumps,
        censored_fraction: censored as f64 / ladders.len().max(1) as f64,
        creep_rate,
    })
}

/// Marks ladders as killed at their final local time.
pub fn mark_killed(ladders: &mut [LadderData]) {
    for l in ladders {
        l.killed = true;
        l.kill_local_time = Some(l.local_time);
    }
}

/// An excursion of `R = X − X̄` away from zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupExcursion {
    pub start_local_time: f64,
    pub start_time: f64,
    pub duration: f64,
    /// Supremum level during the excursion.
    pub level: f64,
    /// `ΔH` at the end: positive when the excursion ends by an upward jump.
    pub terminal_height: f64,
    pub passes_positive: bool,
    /// Time to the first positive value (equal to the duration).
    pub zeta_plus: Option<f64>,
    pub first_positive_height: Option<f64>,
}

impl SupExcursion {
    /// `(r, R(start + r))` at the path nodes within the excursion.
    pub fn samples(&self, path: &SamplePath) -> Vec<(f64, f64)> {
        let end = self.start_time + self.duration;
        let mut out = alloc::vec![(0.0, 0.0)];
        for n in path.nodes() {
            if n.t > self.start_time && n.t < end {
                out.push((n.t - self.start_time, n.right - self.level));
            }
        }
        out
    }
}

/// One excursion per ladder-time jump (`Δτ > 0`).
pub fn extract_sup_excursions(ladder: &LadderData) -> Vec<SupExcursion> {
    ladder
        .jumps
        .iter()
        .filter(|j| j.dtau > 0.0)
        .map(|j| SupExcursion {
            start_local_time: j.x,
            start_time: j.start,
            duration: j.dtau,
            level: j.sup,
            terminal_height: j.dh,
            passes_positive: j.dh > 0.0,
            zeta_plus: (j.dh > 0.0).then_some(j.dtau),
            first_positive_height: (j.dh > 0.0).then_some(j.dh),
        })
        .collect()
}

/// First-passage functionals at level `x`:
/// `(T_x^+ − Ḡ, Ḡ, O_x, x − X̄_{T_x^+−})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassageSample {
    pub since_sup: f64,
    pub last_sup_time: f64,
    pub overshoot: f64,
    pub undershoot: f64,
}

/// Passage functionals on a set of paths; paths not passing within the
/// horizon are omitted (their count is the second value).
pub fn quintuple_marginal(paths: &mut [SamplePath], x: f64) -> (Vec<PassageSample>, usize) {
    let mut out = Vec::with_capacity(paths.len());
    let mut missing = 0;
    for p in paths.iter_mut() {
        let r = p.first_passage(x);
        if r.is_finite() {
            out.push(PassageSample {
                since_sup: r.time - r.last_sup_time,
                last_sup_time: r.last_sup_time,
                overshoot: r.overshoot,
                undershoot: r.pre_passage_sup_gap,
            });
        } else {
            missing += 1;
        }
    }
    (out, missing)
}

/// Binned potential measure `𝒰(ds, dy) = ∫ P(τ_x ∈ ds, H_x ∈ dy) dx`,
/// from creeping pieces recorded in the ladders (each piece contributes its
/// local time at its midpoint), normalised by the number of ladders.
pub fn potential_measure(ladders: &[LadderData], s_edges: &[f64], y_edges: &[f64]) -> Result<Vec<f64>> {
    if ladders.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let (ns, ny) = (s_edges.len() - 1, y_edges.len() - 1);
    let mut mass = alloc::vec![0.0; ns * ny];
    let find = |e: &[f64], v: f64| -> Option<usize> {
        if v < e[0] || v >= e[e.len() - 1] {
            None
        } else {
            Some(e.partition_point(|x| *x <= v) - 1)
        }
    };
    for l in ladders {
        for &(t0, h0, t1, h1) in &l.creep_pieces {
            let (sm, ym) = (0.5 * (t0 + t1), 0.5 * (h0 + h1));
            if let (Some(i), Some(j)) = (find(s_edges, sm), find(y_edges, ym)) {
                mass[i * ny + j] += h1 - h0;
            }
        }
    }
    let n = ladders.len() as f64;
    Ok(mass.into_iter().map(|m| m / n).collect())
}

/// `𝒰_H([0, z))`: expected Lebesgue measure of the heights below `z`
/// crossed by creeping, per ladder.
pub fn height_potential(ladders: &[LadderData], z: f64) -> f64 {
    let mut total = 0.0;
    for l in ladders {
        for &(_, h0, _, h1) in &l.creep_pieces {
            if h0 < z {
                total += h1.min(z) - h0;
            }
        }
    }
    total / ladders.len().max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::JumpLaw;
    use crate::sim::{Node, SimConfig};
    use alloc::vec;

    #[test]
    fn pure_drift_ladder() {
        let m = LevyModel::pure_drift(1.0).unwrap();
        let mut p = SamplePath::simulate(&m, &SimConfig::new(0.1, 2.0, 1, 0)).unwrap();
        let l = extract_ladder(&mut p);
        assert!(l.jumps.is_empty());
        assert!((l.local_time - 2.0).abs() < 1e-12);
        assert!((l.creep_time - 2.0).abs() < 1e-12);
    }

    #[test]
    fn brownian_ladder_has_no_height_jumps() {
        let m = LevyModel::brownian(0.0, 1.0).unwrap();
        let mut p = SamplePath::simulate(&m, &SimConfig::new(0.001, 5.0, 3, 0)).unwrap();
        let l = extract_ladder(&mut p);
        assert!(!l.jumps.is_empty());
        assert!(l.jumps.iter().all(|j| j.dh == 0.0 && j.dtau > 0.0));
        // bookkeeping: local time + height jumps = supremum increase
        let sup = *p.running_supremum().last().unwrap();
        assert!((l.local_time + l.total_height_jumps() - sup).abs() < 1e-9);
        for (x, _, h, _) in l.records() {
            assert!(h >= x - 1e-12);
        }
    }

    #[test]
    fn constructed_three_jump_path() {
        // drift 1 with jumps +0.5 at 0.2, −1 at 0.5, +2 at 1.2
        let nodes = vec![
            Node::grid(0.0, 0.0),
            Node { t: 0.2, left: 0.2, right: 0.7 },
            Node { t: 0.5, left: 1.0, right: 0.0 },
            Node { t: 1.2, left: 0.7, right: 2.7 },
            Node::grid(2.0, 3.5),
        ];
        let mut p = SamplePath::from_nodes(nodes, 0.1).unwrap();
        let l = extract_ladder(&mut p);
        let dh: Vec<f64> = l.jumps.iter().map(|j| j.dh).collect();
        // +0.5 over sup 0.2; −1 gives an excursion ending by the +2 jump
        // from 0.7 to 2.7 over sup 1.0: overshoot 1.7
        assert_eq!(dh.len(), 2);
        assert!((dh[0] - 0.5).abs() < 1e-15);
        assert!((dh[1] - 1.7).abs() < 1e-12);
        assert_eq!(l.jumps[0].dtau, 0.0);
        assert!((l.jumps[1].dtau - 0.7).abs() < 1e-12);
        assert!((l.local_time + l.total_height_jumps() - 3.5).abs() < 1e-12);
        let ex = extract_sup_excursions(&l);
        assert_eq!(ex.len(), 1);
        assert!(ex[0].passes_positive);
    }

    #[test]
    fn one_dip_excursion() {
        let nodes = vec![
            Node::grid(0.0, 0.0),
            Node::grid(1.0, 1.0),
            Node::grid(2.0, 0.0),
            Node::grid(4.0, 2.0),
        ];
        let mut p = SamplePath::from_nodes(nodes, 1.0).unwrap();
        let l = extract_ladder(&mut p);
        let ex = extract_sup_excursions(&l);
        assert_eq!(ex.len(), 1);
        assert!((ex[0].duration - 2.0).abs() < 1e-15);
        assert!((ex[0].start_local_time - 1.0).abs() < 1e-15);
        assert!(!ex[0].passes_positive);
    }

    #[test]
    fn closed_form_chars() {
        let bm = LadderChar::closed_form(&LevyModel::brownian(0.0, 1.0).unwrap()).unwrap();
        assert_eq!(bm.kappa, 0.0);
        assert!((bm.exponent(2.0, 0.0).unwrap() - 2.0).abs() < 1e-12);
        let down = LadderChar::closed_form(&LevyModel::brownian(-1.0, 1.0).unwrap()).unwrap();
        assert!((down.kappa - 2.0).abs() < 1e-15);
        let drift = LadderChar::closed_form(&LevyModel::pure_drift(1.0).unwrap()).unwrap();
        assert_eq!((drift.kappa, drift.eta), (0.0, 1.0));
        let sn = LevyModel::bounded_variation(2.0, 1.0, JumpLaw::ExponentialNegative { rate: 1.0 }).unwrap();
        let c = LadderChar::closed_form(&sn).unwrap();
        assert_eq!(c.eta, 0.5);
        assert!((c.exponent(1.0, 0.0).unwrap() - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn insufficient_data() {
        let l = LadderData {
            jumps: vec![
                LadderJump { x: 0.0, start: 0.0, dtau: 1.0, dh: 0.0, sup: 0.0 };
                10
            ],
            local_time: 1.0,
            ..Default::default()
        };
        assert!(matches!(
            estimate_ladder_char(&[l], LongRun::Oscillates, false),
            Err(Error::InsufficientData { .. })
        ));
    }
}
