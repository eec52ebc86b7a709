//! Excursions of `Z` that pass above zero: after the first positive value
//! they run as fresh paths killed at zero, and the pair `(ζ⁺, ω(ζ⁺))` has
//! the law of the upward ladder jumps.

use levy_rinv_core::exponent::{theorem1_concat_check, theorem1_marginal_check};
use levy_rinv_core::inverse::{level_trace, Collect};
use levy_rinv_core::{SamplePath, SimConfig};

use super::entrance::Windowed;
use super::{streams, Ctx, Outcome, Table};

const MARGINAL_TOL: f64 = 0.10;
const TRACE_DEPTH: u32 = 12;
/// Upper bound on the number of batches of `n_paths` paths.
const MAX_BATCHES: usize = 64;

struct Batch {
    /// `(post-ζ⁺ duration, ω(ζ⁺))` with `start + ζ⁺ < t_cut`.
    post: Vec<(f64, f64)>,
    /// `(ζ⁺, ω(ζ⁺))` of excursions starting before `t_cut`.
    split: Vec<(f64, f64)>,
    local_time: f64,
}

pub(super) fn run(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let cfg = ctx.cfg;
    let model = &ctx.model;
    let x = cfg.params.x_max;
    let t_cut = cfg.t_cut();
    let cap = cfg.params.cap;
    anyhow::ensure!(
        cfg.params.tail_window >= cap,
        "params.tail_window must be at least params.cap"
    );
    let target = cfg.params.n_target;

    let mut post = Vec::new();
    let mut split = Vec::new();
    let mut local_time = 0.0;
    let mut used = 0usize;
    while post.len() < target && used < MAX_BATCHES * cfg.n_paths {
        let base = used;
        let batch = ctx
            .par_map(cfg.n_paths, |i| -> anyhow::Result<Batch> {
                let mut p = ctx.path(model, streams::MAIN + (base + i) as u64)?;
                let mut c = Collect::default();
                let k = level_trace(&mut p, TRACE_DEPTH, x, &mut Windowed { t_cut, inner: &mut c })?;
                let mut b = Batch {
                    post: Vec::new(),
                    split: Vec::new(),
                    local_time: k.local_time_at(t_cut).min(k.final_level),
                };
                for e in c.0 {
                    let (Some(z), Some(y)) = (e.zeta_plus, e.first_positive_height) else {
                        continue;
                    };
                    b.split.push((z, y));
                    if e.start_time + z < t_cut {
                        b.post.push((e.post_duration.expect("passes positive"), y));
                    }
                }
                Ok(b)
            })
            .into_iter()
            .collect::<anyhow::Result<Vec<_>>>()?;
        for b in batch {
            post.extend(b.post);
            split.extend(b.split);
            local_time += b.local_time;
        }
        used += cfg.n_paths;
    }
    post.truncate(target);

    // fresh killed paths from the matched heights
    let fresh_sim = SimConfig {
        horizon: cap + 2.0 * cfg.sim.dt,
        ..ctx.sim(0)
    };
    let fresh = ctx
        .par_map(post.len(), |j| -> anyhow::Result<f64> {
            let mut f = SamplePath::lazy(model, &fresh_sim.with_stream(streams::FRESH + j as u64))?;
            let origin = f.origin();
            Ok(f.hit_from(origin, -post[j].1).map_or(f64::INFINITY, |c| c.t))
        })
        .into_iter()
        .collect::<anyhow::Result<Vec<_>>>()?;
    let durations: Vec<f64> = post.iter().map(|p| p.0).collect();

    let ladders = ctx.ladders(model, streams::LADDER, used, x, false)?;
    let lc = ctx.ladder_char(model, &ladders)?;
    drop(ladders);

    let seed = cfg.seed;
    let mut out = Outcome::default();
    out.checks.push(theorem1_concat_check(&durations, &fresh, cap, seed)?);
    let s_edges = [0.0, 0.05, 0.2, 0.5, 1.0, 2.0, cap];
    let y_edges = [0.0, 0.25, 0.5, 1.0, 2.0];
    let marginal = theorem1_marginal_check(&split, local_time, &lc, &s_edges, &y_edges, MARGINAL_TOL, seed)?;

    let mut mt = Table::new("first_positive_marginal", &["s_lo", "s_hi", "y_lo", "y_hi", "excursions", "ladder"]);
    let ny = y_edges.len() - 1;
    for (c, (l, r)) in marginal.lhs.iter().zip(&marginal.rhs).enumerate() {
        let (i, j) = (c / ny, c % ny);
        mt.push(vec![s_edges[i], s_edges[i + 1], y_edges[j], y_edges[j + 1], *l, *r]);
    }
    out.checks.push(marginal);
    out.tables.push(mt);

    let mut dt = Table::new("post_passage_durations", &["excursion", "fresh"]);
    for (a, b) in durations.iter().zip(&fresh) {
        dt.push(vec![a.min(cap), b.min(cap)]);
    }
    out.tables.push(dt);
    out.notes.push(format!(
        "{} passing-positive excursions from {} paths (local time {:.3})",
        durations.len(),
        used,
        local_time
    ));
    Ok(out)
}
