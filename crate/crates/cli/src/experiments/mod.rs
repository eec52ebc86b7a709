//! The experiment catalog.

use std::fmt;
use std::str::FromStr;

use levy_rinv_core::fluctuation::{estimate_ladder_char, extract_ladder_window, LadderChar, LadderData};
use levy_rinv_core::{CheckReport, LevyModel, LongRun, SamplePath, SimConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

mod bv_jumpstart;
pub(crate) mod entrance;
mod quintuple;
mod rho_routes;
mod sigpos;
mod theorem1;
mod thinned;
mod wiener_hopf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    RhoRoutes,
    ThinnedVsEvans,
    EntranceLaws,
    Theorem1,
    Quintuple,
    WienerHopf,
    Sigpos,
    BvJumpstart,
}

/// Catalog entry: name, description, anchor.
pub struct Entry {
    pub name: ExperimentName,
    pub description: &'static str,
    pub anchor: &'static str,
}

pub const CATALOG: [Entry; 8] = [
    Entry {
        name: ExperimentName::RhoRoutes,
        description: "rho(q) from simulated K_1, from the ladder/resolvent formula, and in closed form",
        anchor: "Prop. 1, Eq. (P1E1); Eq. (E20)",
    },
    Entry {
        name: ExperimentName::ThinnedVsEvans,
        description: "thinned-ladder right inverse against the dyadic hitting construction",
        anchor: "Eq. (RI); Lemma 7; Lemma 9",
    },
    Entry {
        name: ExperimentName::EntranceLaws,
        description: "Fourier-Laplace transform and decomposition of the entrance laws of n^Z",
        anchor: "Eq. (fourlapl); Eq. (T1E1)",
    },
    Entry {
        name: ExperimentName::Theorem1,
        description: "excursions of Z split at the first positive value against fresh killed paths",
        anchor: "Theorem 1, Eq. (genexc)",
    },
    Entry {
        name: ExperimentName::Quintuple,
        description: "first-passage functionals against the ladder measure and potential",
        anchor: "Eq. (quintuple)",
    },
    Entry {
        name: ExperimentName::WienerHopf,
        description: "Wiener-Hopf residuals and monotonicity of exp(-rho x) u(-x)",
        anchor: "Wiener-Hopf identity (4.3.4), (4.3.7); Corollary 2",
    },
    Entry {
        name: ExperimentName::Sigpos,
        description: "excursions of Z against negative excursions of X from zero, paired sigma^2 runs",
        anchor: "Eq. (sigpos)",
    },
    Entry {
        name: ExperimentName::BvJumpstart,
        description: "rate and law of excursions of Z starting with an upward jump",
        anchor: "Eq. (bvexc)",
    },
];

impl ExperimentName {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentName::RhoRoutes => "rho-routes",
            ExperimentName::ThinnedVsEvans => "thinned-vs-evans",
            ExperimentName::EntranceLaws => "entrance-laws",
            ExperimentName::Theorem1 => "theorem1",
            ExperimentName::Quintuple => "quintuple",
            ExperimentName::WienerHopf => "wiener-hopf",
            ExperimentName::Sigpos => "sigpos",
            ExperimentName::BvJumpstart => "bv-jumpstart",
        }
    }

    pub fn entry(&self) -> &'static Entry {
        CATALOG.iter().find(|e| e.name == *self).expect("catalog is complete")
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownExperiment(pub String);

impl fmt::Display for UnknownExperiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = CATALOG.iter().map(|e| e.name.as_str()).collect();
        write!(f, "unknown experiment {:?} (expected one of: {})", self.0, names.join(", "))
    }
}

impl std::error::Error for UnknownExperiment {}

impl FromStr for ExperimentName {
    type Err = UnknownExperiment;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CATALOG
            .iter()
            .map(|e| e.name)
            .find(|n| n.as_str() == s)
            .ok_or_else(|| UnknownExperiment(s.to_string()))
    }
}

/// A plot-ready table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub checks: Vec<CheckReport>,
    pub tables: Vec<Table>,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Checks whose name starts with `prefix`.
    pub fn checks_with(&self, prefix: &str) -> Vec<&CheckReport> {
        self.checks.iter().filter(|c| c.name.starts_with(prefix)).collect()
    }
}

/// Stream-id namespaces, so that independent path families never share
/// random numbers.
pub(crate) mod streams {
    pub const MAIN: u64 = 0;
    pub const LADDER: u64 = 1 << 40;
    pub const FRESH: u64 = 2 << 40;
    pub const PAIR: u64 = 3 << 40;
}

pub(crate) struct Ctx<'a> {
    pub cfg: &'a ExperimentConfig,
    pub model: LevyModel,
    pool: &'a rayon::ThreadPool,
}

impl<'a> Ctx<'a> {
    pub fn sim(&self, stream: u64) -> SimConfig {
        SimConfig {
            dt: self.cfg.sim.dt,
            horizon: self.cfg.sim.horizon,
            seed: self.cfg.seed,
            stream_id: stream,
            bridge_correction: self.cfg.sim.bridge_correction,
        }
    }

    pub fn path(&self, model: &LevyModel, stream: u64) -> anyhow::Result<SamplePath> {
        Ok(SamplePath::lazy(model, &self.sim(stream))?)
    }

    /// `f(0), …, f(n−1)` on the worker pool, in index order.
    pub fn par_map<T: Send, F: Fn(usize) -> T + Sync + Send>(&self, n: usize, f: F) -> Vec<T> {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }

    /// Windowed ladders of `n` paths from the given stream namespace, up to
    /// `stop_level` (paths of models drifting to `−∞` run to the horizon).
    pub fn ladders(&self, model: &LevyModel, base: u64, n: usize, stop_level: f64, pieces: bool) -> anyhow::Result<Vec<LadderData>> {
        let stop = if model.long_run() == LongRun::DriftsDown { f64::INFINITY } else { stop_level };
        let t_cut = self.cfg.t_cut();
        self.par_map(n, |i| -> anyhow::Result<LadderData> {
            let mut p = self.path(model, base + i as u64)?;
            Ok(extract_ladder_window(&mut p, stop, t_cut, pieces))
        })
        .into_iter()
        .collect()
    }

    pub fn ladder_char(&self, model: &LevyModel, ladders: &[LadderData]) -> anyhow::Result<LadderChar> {
        Ok(estimate_ladder_char(ladders, model.long_run(), model.is_bounded_variation())?)
    }
}

/// Runs one experiment on a pool of `workers` threads (0 = available
/// parallelism).
pub fn run(cfg: &ExperimentConfig, workers: usize) -> anyhow::Result<Outcome> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    let ctx = Ctx {
        cfg,
        model: cfg.model(),
        pool: &pool,
    };
    match cfg.experiment {
        ExperimentName::RhoRoutes => rho_routes::run(&ctx),
        ExperimentName::ThinnedVsEvans => thinned::run(&ctx),
        ExperimentName::EntranceLaws => entrance::run(&ctx),
        ExperimentName::Theorem1 => theorem1::run(&ctx),
        ExperimentName::Quintuple => quintuple::run(&ctx),
        ExperimentName::WienerHopf => wiener_hopf::run(&ctx),
        ExperimentName::Sigpos => sigpos::run(&ctx),
        ExperimentName::BvJumpstart => bv_jumpstart::run(&ctx),
    }
}

/// `|a − b| ≤ max(3·se, rel·|b|)`, reported as the ratio of the deviation to
/// that bound (pass iff ≤ 1).
pub(crate) fn route_check(name: String, a: f64, b: f64, se: f64, rel: f64, seed: u64, n: u64) -> CheckReport {
    let bound = (3.0 * se).max(rel * b.abs());
    let stat = if bound > 0.0 {
        (a - b).abs() / bound
    } else if a == b {
        0.0
    } else {
        f64::INFINITY
    };
    CheckReport::deviation(name, vec![a], vec![b], stat, 1.0, seed, n)
}
