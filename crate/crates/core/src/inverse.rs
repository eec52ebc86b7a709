//! The minimal (partial) right inverse `K` of a path: Evans' dyadic hitting
//! scheme, the thinned-ladder scheme, and an exact level trace of the
//! piecewise-linear path, together with local time `L`, the reflected path
//! `Z = X − L` and excursions of `Z` away from zero.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fluctuation::{WalkEnd, Walker};
use crate::math;
use crate::sim::{Cursor, SamplePath};
use crate::stats::Running;

/// Finest dyadic depth accepted for level grids (levels below `2^{-40}`
/// are at the rounding scale of unit-order path values).
pub const MAX_DEPTH: u32 = 40;

/// Minimum number of samples for an empirical `ρ`.
pub const MIN_RHO_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    /// Dyadic hitting chain at `depth + refinement`, reported at `depth`.
    Evans { depth: u32, refinement: u32 },
    ThinnedLadder { level: u32 },
    /// Exact right inverse of the interpolated path.
    LevelTrace,
}

/// `K` on the grid `x_k = k·2^{-grid_depth}`, `k = 0, 1, …`.
#[derive(Debug, Clone, PartialEq)]
pub struct RightInverseResult {
    pub method: Method,
    pub grid_depth: u32,
    /// `K_{x_k}` for the completed levels.
    pub k: Vec<f64>,
    pub x_max: f64,
    /// First grid level not completed within the horizon (`∞` if all
    /// levels up to `x_max` were completed).
    pub xi_k: f64,
    /// Local time reached when the construction stopped.
    pub final_level: f64,
    /// Thinned construction: `(S_m, ΔK̃_{S_m})` in local time.
    pub marks: Vec<(f64, f64)>,
    /// Thinned construction: `(s, K̃_s, X_{K̃_s})` at requested local times.
    pub local_samples: Vec<(f64, f64, f64)>,
    pub horizon: f64,
}

impl RightInverseResult {
    pub fn spacing(&self) -> f64 {
        math::powf(2.0, -(self.grid_depth as f64))
    }

    pub fn levels(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = self.spacing();
        self.k.iter().enumerate().map(move |(i, &t)| (i as f64 * h, t))
    }

    /// Step-function value `K_x` (`+∞` past the completed levels).
    pub fn k_at(&self, x: f64) -> f64 {
        let i = math::floor(x / self.spacing() + 1e-9);
        if i < 0.0 {
            return 0.0;
        }
        self.k.get(i as usize).copied().unwrap_or(f64::INFINITY)
    }

    pub fn completed(&self, x: f64) -> bool {
        self.k_at(x).is_finite()
    }

    /// `L_t = inf{x : K_x > t}` on the grid.
    pub fn local_time_at(&self, t: f64) -> f64 {
        let n = self.k.partition_point(|&k| k <= t);
        if n == 0 {
            0.0
        } else if n == self.k.len() && self.xi_k.is_finite() {
            self.xi_k
        } else {
            (n - 1) as f64 * self.spacing()
        }
    }

    pub fn is_censored(&self) -> bool {
        self.xi_k.is_finite()
    }
}

fn check_depth(depth: u32) -> Result<()> {
    if depth > MAX_DEPTH {
        return Err(Error::DepthTooFine {
            depth,
            floor: math::powf(2.0, -(MAX_DEPTH as f64)),
        });
    }
    Ok(())
}

fn grid_count(x_max: f64, depth: u32) -> Result<usize> {
    if !(x_max > 0.0) || !x_max.is_finite() {
        return Err(Error::Precondition("x_max must be positive and finite"));
    }
    Ok(math::floor(x_max * math::powf(2.0, depth as f64) + 1e-9) as usize)
}

/// Evans' construction. The hitting chain
/// `T_{j+1} = inf{t ≥ T_j : X_t = (j+1)2^{-(n+r)}}` is run at depth
/// `n + r` and `K` is reported on the `2^{-n}` grid; the refinement `r`
/// realizes the supremum over depths, which removes hits of levels just
/// above a pre-jump supremum made while the path descends after an upward
/// jump.
pub fn evans_construct(path: &mut SamplePath, depth: u32, refinement: u32, x_max: f64) -> Result<RightInverseResult> {
    check_depth(depth + refinement)?;
    let fine = depth + refinement;
    let levels = grid_count(x_max, depth);
    let levels = levels?;
    let step = math::powf(2.0, -(fine as f64));
    let every = 1usize << refinement;
    let mut k = Vec::with_capacity((levels + 1).min(1 << 16));
    k.push(0.0);
    let mut cur: Cursor = path.origin();
    let mut xi_k = f64::INFINITY;
    for j in 1..=levels * every {
        match path.hit_from(cur, j as f64 * step) {
            Some(c) => {
                cur = c;
                if j % every == 0 {
                    k.push(c.t);
                }
            }
            None => {
                xi_k = (j - 1) as f64 * step;
                break;
            }
        }
    }
    Ok(RightInverseResult {
        method: Method::Evans { depth, refinement },
        grid_depth: depth,
        k,
        x_max,
        xi_k,
        final_level: if xi_k.is_finite() { xi_k } else { x_max },
        marks: Vec::new(),
        local_samples: Vec::new(),
        horizon: path.end_time(),
    })
}

fn thinned(
    path: &mut SamplePath,
    level: u32,
    grid_depth: u32,
    x_max: f64,
    local_targets: &[f64],
) -> Result<RightInverseResult> {
    check_depth(level.max(grid_depth))?;
    let big = math::powf(2.0, -(level as f64));
    let h = math::powf(2.0, -(grid_depth as f64));
    let mut w = Walker::new(path.origin());
    if x_max.is_finite() {
        let n = grid_count(x_max, grid_depth)?;
        w.levels = (1..=n).map(|i| i as f64 * h).collect();
    }
    w.local_targets = local_targets.to_vec();
    let stop_local = local_targets.last().copied().unwrap_or(f64::INFINITY);
    let mut marks = Vec::new();
    let mut censored = false;
    loop {
        match w.run(path, x_max, stop_local, big) {
            WalkEnd::Exhausted => {
                censored = true;
                break;
            }
            WalkEnd::LevelReached | WalkEnd::LocalTimeReached => break,
            WalkEnd::BigJump(j, after) => match path.hit_from(after, j.sup) {
                Some(c) => {
                    marks.push((j.x, c.t - j.start));
                    w.restart(c);
                }
                None => {
                    censored = true;
                    break;
                }
            },
        }
    }
    let mut k = Vec::with_capacity(w.level_times.len() + 1);
    k.push(0.0);
    k.extend_from_slice(&w.level_times);
    let xi_k = if censored && x_max.is_finite() && k.len() < w.levels.len() + 1 {
        (k.len() - 1) as f64 * h
    } else {
        f64::INFINITY
    };
    let local_samples = w
        .local_hits
        .iter()
        .zip(local_targets)
        .map(|(&(t, x), &s)| (s, t, x))
        .collect();
    Ok(RightInverseResult {
        method: Method::ThinnedLadder { level },
        grid_depth,
        k,
        x_max,
        xi_k,
        final_level: w.local,
        marks,
        local_samples,
        horizon: path.end_time(),
    })
}

/// Thinned-ladder construction `K̃(n)`: follow the ladder while height
/// jumps are at most `2^{-n}`; at a larger one, jump to the return time to
/// the pre-jump supremum and restart the ladder there. `K̃` is reported on
/// the `2^{-grid_depth}` grid as the first time `X_{K̃}` reaches each level.
pub fn thinned_ladder_construct(path: &mut SamplePath, level: u32, grid_depth: u32, x_max: f64) -> Result<RightInverseResult> {
    thinned(path, level, grid_depth, x_max, &[])
}

/// `(s, K̃_s(n), X_{K̃_s(n)})` at the given increasing local times.
pub fn thinned_at_local_times(path: &mut SamplePath, level: u32, local_times: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    if local_times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Precondition("local times must be increasing"));
    }
    Ok(thinned(path, level, 0, f64::INFINITY, local_times)?.local_samples)
}

/// An excursion of `Z` away from zero, `e^Z_x(r) = Z_{K_{x−}+r}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZExcursion {
    pub start_local_time: f64,
    pub start_time: f64,
    /// `ΔK_x`; for a censored excursion, the observed part.
    pub duration: f64,
    /// `ω(0)`: nonzero when the excursion starts with a jump.
    pub start_value: f64,
    pub passes_positive: bool,
    /// Time to the first positive value.
    pub zeta_plus: Option<f64>,
    /// `ω(ζ⁺)`.
    pub first_positive_height: Option<f64>,
    /// Duration after `ζ⁺`.
    pub post_duration: Option<f64>,
    pub min: f64,
    pub max: f64,
    pub censored: bool,
}

/// Callbacks from [`level_trace`].
pub trait TraceVisitor {
    /// A linear piece of an excursion started at `start` from level `level`,
    /// from `(ta, xa)` to `(tb, xb)` in path coordinates.
    fn piece(&mut self, _start: f64, _level: f64, _ta: f64, _xa: f64, _tb: f64, _xb: f64) {}
    fn excursion(&mut self, _e: &ZExcursion) {}
}

impl TraceVisitor for () {}

/// Collects excursions.
#[derive(Debug, Default, Clone)]
pub struct Collect(pub Vec<ZExcursion>);

impl TraceVisitor for Collect {
    fn excursion(&mut self, e: &ZExcursion) {
        self.0.push(*e);
    }
}

struct Open {
    start: f64,
    level: f64,
    start_value: f64,
    zeta_plus: Option<f64>,
    first_pos: Option<f64>,
    min: f64,
    max: f64,
}

impl Open {
    fn new(start: f64, level: f64, value: f64) -> Self {
        let z = value - level;
        let mut o = Open {
            start,
            level,
            start_value: z,
            zeta_plus: None,
            first_pos: None,
            min: z.min(0.0),
            max: z.max(0.0),
        };
        if z > 0.0 {
            o.zeta_plus = Some(0.0);
            o.first_pos = Some(z);
        }
        o
    }

    fn see(&mut self, t: f64, x: f64) {
        let z = x - self.level;
        self.min = self.min.min(z);
        self.max = self.max.max(z);
        if z > 0.0 && self.first_pos.is_none() {
            self.zeta_plus = Some(t - self.start);
            self.first_pos = Some(z);
        }
    }

    fn close(&self, end: f64, censored: bool) -> ZExcursion {
        ZExcursion {
            start_local_time: self.level,
            start_time: self.start,
            duration: end - self.start,
            start_value: self.start_value,
            passes_positive: self.first_pos.is_some(),
            zeta_plus: self.zeta_plus,
            first_positive_height: self.first_pos,
            post_duration: self.zeta_plus.map(|z| end - self.start - z),
            min: self.min,
            max: self.max,
            censored,
        }
    }
}

/// Exact minimal right inverse of the interpolated path up to level
/// `x_max`: the level `L` increases only while `X = L` and `X` moves up
/// continuously; every other stretch is an excursion of `Z = X − L`, ended
/// by the first return of `X` to `L`. Excursions whose start level is below
/// `x_max` are complete when the trace stops, unless the horizon is
/// reached first (then the open excursion is reported as censored).
pub fn level_trace<V: TraceVisitor>(
    path: &mut SamplePath,
    grid_depth: u32,
    x_max: f64,
    visitor: &mut V,
) -> Result<RightInverseResult> {
    check_depth(grid_depth)?;
    let n = grid_count(x_max, grid_depth)?;
    let h = math::powf(2.0, -(grid_depth as f64));
    let mut k = Vec::with_capacity((n + 1).min(1 << 16));
    k.push(0.0);
    let mut cur = path.origin();
    let mut level = cur.x;
    let mut open: Option<Open> = None;
    let mut done = false;
    // creep from `level` at `tc` to `x1` at `t1`; returns true at x_max
    let creep = |k: &mut Vec<f64>, level: f64, tc: f64, x1: f64, t1: f64| -> bool {
        let slope = (t1 - tc) / (x1 - level);
        while k.len() <= n {
            let l = k.len() as f64 * h;
            if l > x1 {
                break;
            }
            k.push(tc + (l - level) * slope);
        }
        x1 >= x_max
    };
    loop {
        let Some((t0, x0, t1, x1)) = path.segment(cur.seg) else {
            break;
        };
        let (ta, a) = if cur.t == t0 { (t0, x0) } else { (cur.t, cur.x) };
        match open.take() {
            None => {
                if x1 > level {
                    if creep(&mut k, level, ta, x1, t1) {
                        done = true;
                        break;
                    }
                    level = x1;
                } else if x1 < level {
                    let mut o = Open::new(ta, level, a);
                    visitor.piece(ta, level, ta, a, t1, x1);
                    o.see(t1, x1);
                    open = Some(o);
                }
            }
            Some(mut o) => {
                let crosses = (a < level && x1 >= level) || (a > level && x1 <= level);
                if crosses {
                    let tc = ta + (t1 - ta) * (level - a) / (x1 - a);
                    visitor.piece(o.start, level, ta, a, tc, level);
                    visitor.excursion(&o.close(tc, false));
                    if x1 > level {
                        if creep(&mut k, level, tc, x1, t1) {
                            done = true;
                            break;
                        }
                        level = x1;
                    } else if x1 < level {
                        let mut o = Open::new(tc, level, level);
                        visitor.piece(tc, level, tc, level, t1, x1);
                        o.see(t1, x1);
                        open = Some(o);
                    }
                } else {
                    visitor.piece(o.start, level, ta, a, t1, x1);
                    o.see(t1, x1);
                    open = Some(o);
                }
            }
        }
        let seg = cur.seg + 1;
        let node = path.node(seg);
        cur = Cursor { seg, t: node.t, x: node.right };
        if node.right != node.left {
            match open.as_mut() {
                None => {
                    if node.right != level {
                        open = Some(Open::new(node.t, level, node.right));
                    }
                }
                Some(o) => {
                    if node.right == level {
                        visitor.excursion(&o.close(node.t, false));
                        open = None;
                    } else {
                        o.see(node.t, node.right);
                    }
                }
            }
        }
    }
    let end = path.end_time();
    if !done {
        if let Some(o) = open {
            visitor.excursion(&o.close(end, true));
        }
    }
    let xi_k = if done { f64::INFINITY } else { (k.len() - 1) as f64 * h };
    Ok(RightInverseResult {
        method: Method::LevelTrace,
        grid_depth,
        k,
        x_max,
        xi_k,
        final_level: if done { x_max } else { level },
        marks: Vec::new(),
        local_samples: Vec::new(),
        horizon: end,
    })
}

/// Excursions of `Z` up to local time `x_max` (exact level trace).
pub fn extract_z_excursions(path: &mut SamplePath, x_max: f64) -> Result<(RightInverseResult, Vec<ZExcursion>)> {
    let mut c = Collect::default();
    let r = level_trace(path, 12, x_max, &mut c)?;
    Ok((r, c.0))
}

/// `(t, L_t, Z_t)` at the path nodes (right limits) up to the last
/// completed level of `k`.
pub fn reflect(path: &SamplePath, k: &RightInverseResult) -> Vec<(f64, f64, f64)> {
    let end = k.k.last().copied().unwrap_or(0.0);
    path.nodes()
        .iter()
        .take_while(|n| n.t <= end)
        .map(|n| {
            let l = k.local_time_at(n.t);
            (n.t, l, n.right - l)
        })
        .collect()
}

/// Empirical `ρ(q) = −ln E(e^{−qK_x}; ξ_K > x)` with a delta-method
/// standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoEstimate {
    pub q: f64,
    pub value: f64,
    pub se: f64,
    pub n: usize,
    pub censored: usize,
}

/// `samples` are `K_x` values with `+∞` for levels not completed.
pub fn empirical_rho(samples: &[f64], q: f64, x: f64) -> Result<RhoEstimate> {
    if samples.len() < MIN_RHO_SAMPLES {
        return Err(Error::InsufficientData {
            needed: MIN_RHO_SAMPLES,
            got: samples.len(),
        });
    }
    let mut r = Running::default();
    let mut censored = 0;
    for &k in samples {
        if k.is_finite() {
            r.push(math::exp(-q * k));
        } else {
            censored += 1;
            r.push(0.0);
        }
    }
    let m = r.mean();
    let value = -math::ln(m) / x;
    let se = r.se() / (m * x);
    Ok(RhoEstimate {
        q,
        value,
        se,
        n: samples.len(),
        censored,
    })
}

/// `z_n = 2^n E(1 − e^{−qT_{2^{-n}}})` split into the part with positive
/// overshoot `ẑ_n` and the rest `z̃_n = z_n − ẑ_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZSplit {
    pub n: u32,
    pub z: f64,
    pub z_hat: f64,
    pub z_tilde: f64,
    pub se: f64,
}

pub fn z_split(paths: &mut [SamplePath], q: f64, n: u32) -> Result<ZSplit> {
    if paths.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let x = math::powf(2.0, -(n as f64));
    let scale = math::powf(2.0, n as f64);
    let (mut all, mut hat) = (Running::default(), Running::default());
    for p in paths.iter_mut() {
        let t = p.first_hitting(x).time;
        let v = 1.0 - if t.is_finite() { math::exp(-q * t) } else { 0.0 };
        let pass = p.first_passage(x);
        all.push(scale * v);
        hat.push(if pass.is_finite() && pass.overshoot > 0.0 { scale * v } else { 0.0 });
    }
    let (z, z_hat) = (all.mean(), hat.mean());
    Ok(ZSplit {
        n,
        z,
        z_hat,
        z_tilde: z - z_hat,
        se: all.se(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{JumpLaw, LevyModel};
    use crate::sim::{Node, SimConfig};
    use alloc::vec;

    #[test]
    fn pure_drift_k_is_identity() {
        let m = LevyModel::pure_drift(1.0).unwrap();
        let mut p = SamplePath::lazy(&m, &SimConfig::new(0.01, 4.0, 1, 0)).unwrap();
        for r in [
            evans_construct(&mut p, 6, 2, 1.0).unwrap(),
            thinned_ladder_construct(&mut p, 6, 6, 1.0).unwrap(),
            level_trace(&mut p, 6, 1.0, &mut ()).unwrap(),
        ] {
            assert_eq!(r.k.len(), 65);
            for (x, k) in r.levels() {
                assert!((k - x).abs() < 1e-12, "{x} {k}");
            }
        }
        let (_, ex) = extract_z_excursions(&mut p, 1.0).unwrap();
        assert!(ex.is_empty());
    }

    #[test]
    fn evans_monotone_in_depth() {
        let m = LevyModel::jump_diffusion(
            0.0,
            1.0,
            1.0,
            JumpLaw::TwoSidedExponential {
                p_up: 0.5,
                rate_up: 2.0,
                rate_down: 2.0,
            },
        )
        .unwrap();
        for seed in 0..20 {
            let mut p = SamplePath::lazy(&m, &SimConfig::new(1e-3, 50.0, seed, 0)).unwrap();
            let coarse = evans_construct(&mut p, 3, 0, 1.0).unwrap();
            let fine = evans_construct(&mut p, 3, 3, 1.0).unwrap();
            for (a, b) in coarse.k.iter().zip(&fine.k) {
                assert!(*b >= a - 1e-12, "{a} {b}");
            }
        }
    }

    #[test]
    fn jump_over_level_is_not_a_hit() {
        // drift 1, jump +1 at t = 0.25 (from 0.25 to 1.25), then −1.5 at 0.5
        let nodes = vec![
            Node::grid(0.0, 0.0),
            Node { t: 0.25, left: 0.25, right: 1.25 },
            Node { t: 0.5, left: 1.5, right: 0.0 },
            Node::grid(2.0, 1.5),
        ];
        let mut p = SamplePath::from_nodes(nodes, 0.25).unwrap();
        let e = evans_construct(&mut p, 1, 3, 1.0).unwrap();
        // levels above 0.25 are hit only after the return at 0.75
        assert!((e.k[1] - 1.0).abs() < 1e-12);
        assert!((e.k[2] - 1.5).abs() < 1e-12);
        let t = level_trace(&mut p, 1, 1.0, &mut ()).unwrap();
        assert_eq!(t.k, e.k);
        let th = thinned_ladder_construct(&mut p, 1, 1, 1.0).unwrap();
        assert_eq!(th.k, e.k);
        assert_eq!(th.marks.len(), 1);
        // threshold 1 keeps the jump of height 1 in the ladder
        let kept = thinned_ladder_construct(&mut p, 0, 1, 1.0).unwrap();
        assert!(kept.marks.is_empty());
        assert!((kept.k[1] - 0.25).abs() < 1e-12);
        let mut c = Collect::default();
        level_trace(&mut p, 1, 1.0, &mut c).unwrap();
        assert_eq!(c.0.len(), 1);
        let ex = c.0[0];
        assert!((ex.start_value - 1.0).abs() < 1e-12);
        assert_eq!(ex.zeta_plus, Some(0.0));
        assert!((ex.duration - 0.5).abs() < 1e-12);
    }

    #[test]
    fn two_dip_path_reflection() {
        let nodes = vec![
            Node::grid(0.0, 0.0),
            Node::grid(1.0, 1.0),
            Node::grid(2.0, 0.5),
            Node::grid(3.0, 1.5),
            Node::grid(4.0, 1.0),
            Node::grid(5.0, 2.0),
        ];
        let mut p = SamplePath::from_nodes(nodes, 1.0).unwrap();
        let mut c = Collect::default();
        let r = level_trace(&mut p, 2, 1.75, &mut c).unwrap();
        assert_eq!(c.0.len(), 2);
        assert!((c.0[0].duration - 1.5).abs() < 1e-12);
        assert!((c.0[0].min + 0.5).abs() < 1e-12);
        assert!((c.0[1].duration - 1.5).abs() < 1e-12);
        // Z = X − X̄ for a path without jumps
        for (t, l, z) in reflect(&p, &r) {
            let sup = p.nodes().iter().filter(|n| n.t <= t).map(|n| n.right).fold(0.0, f64::max);
            let x = p.value_at(t);
            assert!((z - (x - sup)).abs() < 0.25 + 1e-12, "{t} {l} {z}");
            assert!(z <= 1e-12);
        }
    }

    #[test]
    fn brownian_excursions_stay_nonpositive() {
        let m = LevyModel::brownian(0.0, 1.0).unwrap();
        let mut p = SamplePath::lazy(&m, &SimConfig::new(1e-3, 20.0, 9, 0)).unwrap();
        let (r, ex) = extract_z_excursions(&mut p, 1.0).unwrap();
        assert!(!ex.is_empty());
        assert!(ex.iter().all(|e| e.start_value == 0.0 && e.max <= 0.0 && !e.passes_positive));
        let e = evans_construct(&mut p, 8, 4, 1.0).unwrap();
        let th = thinned_ladder_construct(&mut p, 10, 8, 1.0).unwrap();
        if !r.is_censored() {
            let t8 = r.k.len() - 1;
            assert!((e.k[256] - r.k[t8]).abs() < 1e-9);
            assert!((th.k[256] - r.k[t8]).abs() < 1e-9);
        }
    }

    #[test]
    fn rho_requires_samples() {
        assert!(matches!(
            empirical_rho(&[1.0; 10], 1.0, 1.0),
            Err(Error::InsufficientData { .. })
        ));
        let est = empirical_rho(&[1.0; 2000], 3.0, 1.0).unwrap();
        assert!((est.value - 3.0).abs() < 1e-12 && est.se == 0.0);
    }

    #[test]
    fn depth_floor() {
        let m = LevyModel::pure_drift(1.0).unwrap();
        let mut p = SamplePath::lazy(&m, &SimConfig::new(0.1, 2.0, 1, 0)).unwrap();
        assert!(matches!(
            evans_construct(&mut p, 38, 4, 1.0),
            Err(Error::DepthTooFine { .. })
        ));
    }
}
