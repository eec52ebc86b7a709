//! Bounded-variation models: excursions of `Z` that start with an upward
//! jump, their rate per unit local time and the law of `ω(0)`.

use levy_rinv_core::exponent::bv_jumpstart_check;
use levy_rinv_core::inverse::{level_trace, TraceVisitor, ZExcursion};
use levy_rinv_core::model::JumpSpec;
use levy_rinv_core::rng;
use levy_rinv_core::stats::ks_two_sample;
use levy_rinv_core::{CheckReport, JumpLaw};

use super::entrance::Windowed;
use super::{streams, Ctx, Outcome, Table};

const RATE_TOL: f64 = 0.10;
const TRACE_DEPTH: u32 = 12;

#[derive(Default)]
struct StartValues(Vec<f64>);

impl TraceVisitor for StartValues {
    fn excursion(&mut self, e: &ZExcursion) {
        if e.start_value > 0.0 {
            self.0.push(e.start_value);
        }
    }
}

/// `n` draws from the positive part of `law`.
fn positive_sizes(law: &JumpLaw, n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng::stream(seed, streams::FRESH);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let y = law.sample(&mut r);
        if y > 0.0 {
            out.push(y);
        }
    }
    out
}

pub(super) fn run(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let cfg = ctx.cfg;
    let model = &ctx.model;
    anyhow::ensure!(model.is_bounded_variation(), "bv-jumpstart needs a bounded-variation model");
    let JumpSpec::CompoundPoisson { law, .. } = &model.jumps else {
        anyhow::bail!("bv-jumpstart needs compound-Poisson jumps");
    };
    let t_cut = cfg.t_cut();
    let x = cfg.params.x_max;

    let parts = ctx
        .par_map(cfg.n_paths, |i| -> anyhow::Result<(Vec<f64>, f64)> {
            let mut p = ctx.path(model, streams::MAIN + i as u64)?;
            let mut v = StartValues::default();
            let k = level_trace(&mut p, TRACE_DEPTH, x, &mut Windowed { t_cut, inner: &mut v })?;
            Ok((v.0, k.local_time_at(t_cut).min(k.final_level)))
        })
        .into_iter()
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut starts = Vec::new();
    let mut local_time = 0.0;
    for (v, l) in parts {
        starts.extend(v);
        local_time += l;
    }

    let seed = cfg.seed;
    let mut out = Outcome::default();
    out.checks.push(bv_jumpstart_check(model, starts.len(), local_time, RATE_TOL, seed)?);
    let reference = positive_sizes(law, starts.len().max(1), seed);
    let (d, p) = ks_two_sample(&starts, &reference);
    out.checks.push(CheckReport::p_value(
        "jump_start_value_law",
        vec![d],
        vec![],
        p,
        levy_rinv_core::exponent::ALPHA,
        seed,
        starts.len() as u64,
    ));
    let mut t = Table::new("jump_start", &["count", "local_time", "rate", "predicted"]);
    let b = model.bv_drift()?;
    t.push(vec![
        starts.len() as f64,
        local_time,
        starts.len() as f64 / local_time,
        model.jumps.rate_up() / b,
    ]);
    out.tables.push(t);
    Ok(out)
}
