//! Path simulation on a uniform grid with exact jump placement, and
//! hitting / passage detection on the simulated path.
//!
//! A path is stored as a sequence of nodes `(t, X(t−), X(t))`: one per grid
//! point and one per jump. Between consecutive nodes the path is the straight
//! line joining `X(t_i)` to `X(t_{i+1}−)`. The Gaussian increment of a cell
//! containing jumps is split at the jump times, so the values at all nodes
//! have the exact joint law of the process.
//!
//! With `bridge_correction`, a hitting or passage search over a whole segment
//! of a path with Gaussian part also consults a Brownian-bridge maximum
//! (minimum) sampled from a uniform that is a hash of `(seed, stream, node)`.
//! The bridge value is a property of the path, so repeated searches agree.
//!
//! Paths may be generated lazily: [`SamplePath::lazy`] starts with the origin
//! only and searches extend the path cell by cell up to the horizon. The
//! random stream is consumed in the same order either way, so a lazily built
//! path is a prefix of the eagerly built one.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::model::{JumpSpec, LevyModel};
use crate::rng::{self, PathRng};

/// Simulation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimConfig {
    pub dt: f64,
    pub horizon: f64,
    pub seed: u64,
    pub stream_id: u64,
    pub bridge_correction: bool,
}

impl SimConfig {
    pub fn new(dt: f64, horizon: f64, seed: u64, stream_id: u64) -> Self {
        SimConfig {
            dt,
            horizon,
            seed,
            stream_id,
            bridge_correction: false,
        }
    }

    pub fn with_stream(self, stream_id: u64) -> Self {
        SimConfig { stream_id, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(alloc::format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon > self.dt && self.horizon.is_finite()) {
            return Err(Error::Config(alloc::format!(
                "horizon {} must exceed dt {}",
                self.horizon,
                self.dt
            )));
        }
        Ok(())
    }

    fn cells(&self) -> usize {
        math::round(self.horizon / self.dt).max(1.0) as usize
    }
}

/// One node of a path: left limit and value at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub t: f64,
    pub left: f64,
    pub right: f64,
}

impl Node {
    pub fn grid(t: f64, x: f64) -> Self {
        Node { t, left: x, right: x }
    }

    pub fn is_jump(&self) -> bool {
        self.left != self.right
    }
}

/// A recorded jump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub time: f64,
    pub size: f64,
    /// `X(time−)`.
    pub pre: f64,
}

/// A point on the path: segment index (the node the segment starts from),
/// time, and value there (right limit when `t` is a node time).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cursor {
    pub seg: usize,
    pub t: f64,
    pub x: f64,
}

/// Outcome of a hitting or passage search. A search that fails within the
/// horizon returns `time = +∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HittingResult {
    pub time: f64,
    /// `X(T) − level`; zero for hitting and creeping passage.
    pub overshoot: f64,
    /// `level − sup_{s<T} X_s`.
    pub pre_passage_sup_gap: f64,
    /// Time of the last visit to the supremum before `T`.
    pub last_sup_time: f64,
    pub horizon: f64,
}

impl HittingResult {
    pub fn is_finite(&self) -> bool {
        self.time.is_finite()
    }
}

#[derive(Debug, Clone)]
struct Generator {
    drift: f64,
    sigma: f64,
    jumps: JumpSpec,
    rate: f64,
    rng: PathRng,
    next_jump: f64,
    /// Accumulated noise and jumps; `X(t) = drift·t + acc`.
    acc: f64,
    cells_done: usize,
    cells: usize,
}

impl Generator {
    fn new(model: &LevyModel, cfg: &SimConfig) -> Self {
        let mut rng = rng::stream(cfg.seed, cfg.stream_id);
        let rate = model.jumps.rate();
        let next_jump = if rate > 0.0 {
            rng::exp1(&mut rng) / rate
        } else {
            f64::INFINITY
        };
        Generator {
            drift: model.simulated_drift(),
            sigma: math::sqrt(model.simulated_sigma2()),
            jumps: model.jumps.clone(),
            rate,
            rng,
            next_jump,
            acc: 0.0,
            cells_done: 0,
            cells: cfg.cells(),
        }
    }

    fn noise(&mut self, h: f64) -> f64 {
        if self.sigma > 0.0 && h > 0.0 {
            self.sigma * math::sqrt(h) * rng::normal(&mut self.rng)
        } else {
            0.0
        }
    }

    fn cell(&mut self, dt: f64, nodes: &mut Vec<Node>) {
        let k = self.cells_done;
        let t0 = k as f64 * dt;
        let t1 = (k + 1) as f64 * dt;
        let mut s = t0;
        while self.next_jump < t1 {
            let tj = self.next_jump;
            self.acc += self.noise(tj - s);
            let pre = self.drift * tj + self.acc;
            let size = self.jumps.sample_size(&mut self.rng);
            self.acc += size;
            nodes.push(Node {
                t: tj,
                left: pre,
                right: pre + size,
            });
            s = tj;
            self.next_jump += rng::exp1(&mut self.rng) / self.rate;
        }
        self.acc += self.noise(t1 - s);
        nodes.push(Node::grid(t1, self.drift * t1 + self.acc));
        self.cells_done += 1;
    }
}

/// One simulated (or constructed) trajectory.
#[derive(Debug, Clone)]
pub struct SamplePath {
    pub dt: f64,
    pub horizon: f64,
    /// Gaussian coefficient used for the bridge correction.
    pub sigma2: f64,
    pub seed: u64,
    pub stream_id: u64,
    pub bridge_correction: bool,
    nodes: Vec<Node>,
    gen: Option<Generator>,
}

impl SamplePath {
    /// Simulates a full path up to the horizon.
    pub fn simulate(model: &LevyModel, cfg: &SimConfig) -> Result<Self> {
        let mut p = Self::lazy(model, cfg)?;
        p.extend_to(f64::INFINITY);
        Ok(p)
    }

    /// A path whose cells are generated on demand.
    pub fn lazy(model: &LevyModel, cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let gen = Generator::new(model, cfg);
        let mut nodes = Vec::with_capacity(1024);
        nodes.push(Node::grid(0.0, 0.0));
        Ok(SamplePath {
            dt: cfg.dt,
            horizon: gen.cells as f64 * cfg.dt,
            sigma2: model.simulated_sigma2(),
            seed: cfg.seed,
            stream_id: cfg.stream_id,
            bridge_correction: cfg.bridge_correction && model.simulated_sigma2() > 0.0,
            nodes,
            gen: Some(gen),
        })
    }

    /// A fixed path from explicit nodes (used for hand-constructed paths).
    pub fn from_nodes(nodes: Vec<Node>, dt: f64) -> Result<Self> {
        if nodes.is_empty() || nodes[0].t != 0.0 || nodes[0].left != 0.0 {
            return Err(Error::Config("a path starts at (0, 0)".into()));
        }
        if nodes.windows(2).any(|w| !(w[1].t >= w[0].t)) {
            return Err(Error::Config("node times must be nondecreasing".into()));
        }
        let horizon = nodes[nodes.len() - 1].t;
        Ok(SamplePath {
            dt,
            horizon,
            sigma2: 0.0,
            seed: 0,
            stream_id: 0,
            bridge_correction: false,
            nodes,
            gen: None,
        })
    }

    /// A fixed path from grid values and jumps; the pre-jump values are
    /// placed on the line through the surrounding grid values shifted by the
    /// jumps already taken within the cell.
    pub fn from_grid(dt: f64, values: &[f64], jumps: &[(f64, f64)]) -> Result<Self> {
        let mut nodes = Vec::with_capacity(values.len() + jumps.len());
        let mut js = jumps.to_vec();
        js.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut ji = 0;
        nodes.push(Node::grid(0.0, values.first().copied().unwrap_or(0.0)));
        for k in 1..values.len() {
            let (t0, t1) = ((k - 1) as f64 * dt, k as f64 * dt);
            let (a, b) = (values[k - 1], values[k]);
            let in_cell: Vec<(f64, f64)> = js[ji..]
                .iter()
                .take_while(|j| j.0 < t1 || (k == values.len() - 1 && j.0 <= t1))
                .copied()
                .collect();
            ji += in_cell.len();
            let total: f64 = in_cell.iter().map(|j| j.1).sum();
            // continuous part moves linearly from a to b − total
            let mut taken = 0.0;
            for (tj, size) in in_cell {
                let frac = (tj - t0) / (t1 - t0);
                let pre = a + frac * (b - total - a) + taken;
                nodes.push(Node {
                    t: tj,
                    left: pre,
                    right: pre + size,
                });
                taken += size;
            }
            if nodes.last().map(|n| n.t) != Some(t1) {
                nodes.push(Node::grid(t1, b));
            }
        }
        Self::from_nodes(nodes, dt)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn end_time(&self) -> f64 {
        self.nodes[self.nodes.len() - 1].t
    }

    pub fn is_complete(&self) -> bool {
        self.gen.as_ref().map_or(true, |g| g.cells_done >= g.cells)
    }

    /// Generates cells until the path covers `t` (or the horizon).
    /// Returns whether any new node was added.
    pub fn extend_to(&mut self, t: f64) -> bool {
        let dt = self.dt;
        let Some(gen) = self.gen.as_mut() else {
            return false;
        };
        let before = self.nodes.len();
        while gen.cells_done < gen.cells && (gen.cells_done as f64) * dt < t {
            gen.cell(dt, &mut self.nodes);
        }
        self.nodes.len() > before
    }

    /// Extends by roughly doubling the covered time.
    pub fn grow(&mut self) -> bool {
        let target = (2.0 * self.end_time()).max(256.0 * self.dt);
        self.extend_to(target)
    }

    pub fn grid_times(&self) -> Vec<f64> {
        self.grid_nodes().map(|n| n.t).collect()
    }

    /// `X(t_k)` on the grid.
    pub fn grid_values(&self) -> Vec<f64> {
        self.grid_nodes().map(|n| n.right).collect()
    }

    fn grid_nodes(&self) -> impl Iterator<Item = &Node> + '_ {
        let dt = self.dt;
        self.nodes.iter().filter(move |n| {
            let k = math::round(n.t / dt);
            (n.t - k * dt).abs() <= 1e-9 * dt.max(n.t.abs() * 1e-6)
        })
    }

    pub fn jumps(&self) -> impl Iterator<Item = Jump> + '_ {
        self.nodes.iter().filter(|n| n.is_jump()).map(|n| Jump {
            time: n.t,
            size: n.right - n.left,
            pre: n.left,
        })
    }

    /// `X(t)`, right-continuous. Requires `t ≤ end_time()`.
    pub fn value_at(&self, t: f64) -> f64 {
        let i = self.nodes.partition_point(|n| n.t <= t);
        if i == 0 {
            return self.nodes[0].right;
        }
        let a = &self.nodes[i - 1];
        if i == self.nodes.len() || a.t == t {
            return a.right;
        }
        let b = &self.nodes[i];
        a.right + (b.left - a.right) * (t - a.t) / (b.t - a.t)
    }

    /// Cursor at time `t` (extending the path if needed).
    pub fn cursor_at(&mut self, t: f64) -> Option<Cursor> {
        while self.end_time() < t {
            if !self.grow() {
                return None;
            }
        }
        let i = self.nodes.partition_point(|n| n.t <= t).max(1) - 1;
        // prefer the last node with time ≤ t (right limit semantics)
        Some(Cursor {
            seg: i,
            t,
            x: self.value_at(t),
        })
    }

    pub fn origin(&self) -> Cursor {
        Cursor {
            seg: 0,
            t: 0.0,
            x: self.nodes[0].right,
        }
    }

    /// Segment `i` as `(t0, x0, t1, x1−)`; extends the path if needed.
    pub(crate) fn segment(&mut self, i: usize) -> Option<(f64, f64, f64, f64)> {
        while i + 1 >= self.nodes.len() {
            if !self.grow() {
                return None;
            }
        }
        let (a, b) = (&self.nodes[i], &self.nodes[i + 1]);
        Some((a.t, a.right, b.t, b.left))
    }

    pub(crate) fn node(&self, i: usize) -> Node {
        self.nodes[i]
    }

    fn bridge_uniform(&self, seg: usize, tag: u64) -> f64 {
        let h = rng::substream(
            rng::substream(self.seed, self.stream_id),
            ((seg as u64) << 1) | tag,
        );
        ((h >> 11) as f64 + 0.5) / (1u64 << 53) as f64
    }

    /// Sampled Brownian-bridge maximum over a full segment.
    fn bridge_max(&self, seg: usize, a: f64, b: f64, h: f64) -> f64 {
        let u = self.bridge_uniform(seg, 0);
        let d = a - b;
        0.5 * (a + b + math::sqrt(d * d - 2.0 * self.sigma2 * h * math::ln(u)))
    }

    fn bridge_min(&self, seg: usize, a: f64, b: f64, h: f64) -> f64 {
        let u = self.bridge_uniform(seg, 1);
        let d = a - b;
        0.5 * (a + b - math::sqrt(d * d - 2.0 * self.sigma2 * h * math::ln(u)))
    }

    /// Intra-segment crossing of `level` missed by the straight line but
    /// detected by the bridge extreme. Only for whole segments.
    fn bridge_crossing(&self, seg: usize, t0: f64, a: f64, t1: f64, b: f64, level: f64) -> Option<f64> {
        if !self.bridge_correction || t1 <= t0 {
            return None;
        }
        let h = t1 - t0;
        let hit = if level > a.max(b) {
            self.bridge_max(seg, a, b, h) >= level
        } else if level < a.min(b) {
            self.bridge_min(seg, a, b, h) <= level
        } else {
            false
        };
        if hit {
            let (da, db) = ((level - a).abs(), (level - b).abs());
            Some(t0 + h * da / (da + db))
        } else {
            None
        }
    }

    /// First time `≥ from.t` at which the path equals `level`. Jumps across
    /// the level do not count.
    pub fn hit_from(&mut self, from: Cursor, level: f64) -> Option<Cursor> {
        if from.x == level {
            return Some(from);
        }
        let mut seg = from.seg;
        let mut t = from.t;
        let mut x = from.x;
        loop {
            let (t0, x0, t1, x1) = self.segment(seg)?;
            let whole = t == t0;
            let start = if whole { x0 } else { x };
            if (start - level) * (x1 - level) <= 0.0 && start != x1 {
                let th = if x1 == start {
                    t
                } else {
                    t + (t1 - t) * (level - start) / (x1 - start)
                };
                return Some(Cursor {
                    seg,
                    t: th.clamp(t, t1),
                    x: level,
                });
            }
            if whole {
                if let Some(th) = self.bridge_crossing(seg, t0, x0, t1, x1, level) {
                    return Some(Cursor { seg, t: th, x: level });
                }
            }
            seg += 1;
            let n = self.node(seg);
            t = n.t;
            x = n.right;
            if x == level {
                return Some(Cursor { seg, t, x });
            }
        }
    }

    /// First hitting time of `level`.
    pub fn first_hitting(&mut self, level: f64) -> HittingResult {
        match self.hit_from(self.origin(), level) {
            Some(c) => {
                let (s, st) = self.sup_before(c.t);
                HittingResult {
                    time: c.t,
                    overshoot: 0.0,
                    pre_passage_sup_gap: (level - s).max(0.0),
                    last_sup_time: st,
                    horizon: self.horizon,
                }
            }
            None => {
                let (s, st) = self.sup_before(f64::INFINITY);
                HittingResult {
                    time: f64::INFINITY,
                    overshoot: 0.0,
                    pre_passage_sup_gap: (level - s).max(0.0),
                    last_sup_time: st,
                    horizon: self.horizon,
                }
            }
        }
    }

    /// Supremum of the path strictly before `t`, with the time it was last
    /// attained (linear interpolation only).
    fn sup_before(&self, t: f64) -> (f64, f64) {
        let mut sup = self.nodes[0].right;
        let mut at = 0.0;
        for n in self.nodes.iter().skip(1) {
            if n.t > t {
                break;
            }
            if n.left >= sup {
                sup = n.left;
                at = n.t;
            }
            if n.t < t && n.right >= sup {
                sup = n.right;
                at = n.t;
            }
        }
        (sup, at)
    }

    /// First passage strictly above `level > 0`, with overshoot, pre-passage
    /// supremum gap and last supremum time.
    pub fn first_passage(&mut self, level: f64) -> HittingResult {
        let mut sup = self.nodes[0].right;
        let mut sup_t = 0.0;
        let mut seg = 0;
        loop {
            let Some((t0, x0, t1, x1)) = self.segment(seg) else {
                return HittingResult {
                    time: f64::INFINITY,
                    overshoot: 0.0,
                    pre_passage_sup_gap: (level - sup).max(0.0),
                    last_sup_time: sup_t,
                    horizon: self.horizon,
                };
            };
            if x1 > level && x0 <= level {
                let th = t0 + (t1 - t0) * (level - x0) / (x1 - x0);
                return HittingResult {
                    time: th,
                    overshoot: 0.0,
                    pre_passage_sup_gap: 0.0,
                    last_sup_time: th,
                    horizon: self.horizon,
                };
            }
            if x0 <= level {
                if let Some(th) = self.bridge_crossing(seg, t0, x0, t1, x1, level) {
                    return HittingResult {
                        time: th,
                        overshoot: 0.0,
                        pre_passage_sup_gap: 0.0,
                        last_sup_time: th,
                        horizon: self.horizon,
                    };
                }
            }
            if x1 >= sup {
                sup = x1;
                sup_t = t1;
            }
            seg += 1;
            let n = self.node(seg);
            if n.right > level {
                return HittingResult {
                    time: n.t,
                    overshoot: n.right - level,
                    pre_passage_sup_gap: (level - sup).max(0.0),
                    last_sup_time: sup_t,
                    horizon: self.horizon,
                };
            }
            if n.right >= sup {
                sup = n.right;
                sup_t = n.t;
            }
        }
    }

    /// Running supremum `X̄(t_k)` on the grid, including jump endpoints.
    pub fn running_supremum(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut sup = f64::NEG_INFINITY;
        let dt = self.dt;
        for n in &self.nodes {
            sup = sup.max(n.left).max(n.right);
            let k = math::round(n.t / dt);
            if (n.t - k * dt).abs() <= 1e-9 * dt.max(n.t.abs() * 1e-6) {
                out.push(sup);
            }
        }
        out
    }
}

/// Simulates a path of `model` up to the horizon of `cfg`.
pub fn simulate_path(model: &LevyModel, cfg: &SimConfig) -> Result<SamplePath> {
    SamplePath::simulate(model, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{JumpLaw, LevyModel};
    use alloc::vec;

    fn drift_path(dt: f64, horizon: f64) -> SamplePath {
        let m = LevyModel::pure_drift(1.0).unwrap();
        SamplePath::simulate(&m, &SimConfig::new(dt, horizon, 1, 0)).unwrap()
    }

    #[test]
    fn pure_drift_grid() {
        let p = drift_path(0.1, 1.0);
        let v = p.grid_values();
        assert_eq!(v.len(), 11);
        for (k, x) in v.iter().enumerate() {
            assert!((x - 0.1 * k as f64).abs() < 1e-15);
        }
        assert_eq!(p.jumps().count(), 0);
    }

    #[test]
    fn pure_drift_hitting_and_passage() {
        let mut p = drift_path(0.1, 1.0);
        assert_eq!(p.first_hitting(0.0).time, 0.0);
        assert!((p.first_hitting(0.5).time - 0.5).abs() < 1e-14);
        let r = p.first_passage(0.5);
        assert!((r.time - 0.5).abs() < 1e-14);
        assert_eq!(r.overshoot, 0.0);
        assert!(!p.first_hitting(2.0).is_finite());
    }

    #[test]
    fn constructed_jump_passage() {
        // drift 1, jump +1 at t = 0.3 from level 0.3
        let nodes = vec![
            Node::grid(0.0, 0.0),
            Node { t: 0.3, left: 0.3, right: 1.3 },
            Node::grid(1.0, 2.0),
        ];
        let mut p = SamplePath::from_nodes(nodes, 0.1).unwrap();
        let r = p.first_passage(0.5);
        assert_eq!(r.time, 0.3);
        assert!((r.overshoot - 0.8).abs() < 1e-15);
        assert!((r.pre_passage_sup_gap - 0.2).abs() < 1e-15);
        assert_eq!(r.last_sup_time, 0.3);
        // hitting ignores the jump across 0.5; the level is never attained
        assert!(!p.first_hitting(0.5).is_finite());
    }

    #[test]
    fn from_grid_places_jump() {
        let p = SamplePath::from_grid(0.5, &[0.0, 1.5], &[(0.25, 1.0)]).unwrap();
        let j: Vec<Jump> = p.jumps().collect();
        assert_eq!(j.len(), 1);
        assert!((j[0].pre - 0.25).abs() < 1e-15);
        assert_eq!(p.grid_values(), vec![0.0, 1.5]);
    }

    #[test]
    fn lazy_is_prefix_of_eager() {
        let m = LevyModel::jump_diffusion(
            0.0,
            1.0,
            2.0,
            JumpLaw::TwoSidedExponential {
                p_up: 0.5,
                rate_up: 2.0,
                rate_down: 2.0,
            },
        )
        .unwrap();
        let cfg = SimConfig::new(0.01, 5.0, 11, 3);
        let eager = SamplePath::simulate(&m, &cfg).unwrap();
        let mut lazy = SamplePath::lazy(&m, &cfg).unwrap();
        lazy.extend_to(1.234);
        let n = lazy.nodes().len();
        assert_eq!(&eager.nodes()[..n], lazy.nodes());
        lazy.extend_to(f64::INFINITY);
        assert_eq!(eager.nodes(), lazy.nodes());
        assert!((eager.end_time() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn jump_nodes_are_discontinuities() {
        let m = LevyModel::bounded_variation(1.0, 3.0, JumpLaw::atoms(vec![(0.5, 0.5), (-1.0, 0.5)]))
            .unwrap();
        let p = SamplePath::simulate(&m, &SimConfig::new(0.1, 20.0, 5, 0)).unwrap();
        let mut count = 0;
        for j in p.jumps() {
            assert!(j.size == 0.5 || j.size == -1.0);
            count += 1;
        }
        assert!(count > 20);
        // σ = 0: the path between nodes is the drift line exactly
        for w in p.nodes().windows(2) {
            let slope = (w[1].left - w[0].right) / (w[1].t - w[0].t);
            assert!((slope - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn running_supremum_dominates() {
        let m = LevyModel::brownian(0.0, 1.0).unwrap();
        let p = SamplePath::simulate(&m, &SimConfig::new(0.01, 2.0, 9, 0)).unwrap();
        let s = p.running_supremum();
        let v = p.grid_values();
        assert_eq!(s.len(), v.len());
        for k in 0..s.len() {
            assert!(s[k] >= v[k]);
            if k > 0 {
                assert!(s[k] >= s[k - 1]);
            }
        }
    }

    #[test]
    fn bridge_hits_no_later_than_linear() {
        let m = LevyModel::brownian(0.0, 1.0).unwrap();
        for s in 0..50 {
            let mut cfg = SimConfig::new(0.01, 4.0, 21, s);
            let mut lin = SamplePath::simulate(&m, &cfg).unwrap();
            cfg.bridge_correction = true;
            let mut br = SamplePath::simulate(&m, &cfg).unwrap();
            let a = lin.first_hitting(0.7).time;
            let b = br.first_hitting(0.7).time;
            assert!(b <= a + 1e-12, "{b} > {a}");
        }
    }
}
