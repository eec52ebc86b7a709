//! Excursions of `Z` against negative excursions of `X` from zero, in two
//! runs that differ only in `σ²`.

use levy_rinv_core::exponent::{sigpos_check, sigpos_rate_ratio, sigpos_shape_check, zero_excursions, ZeroExcursions};
use levy_rinv_core::inverse::{level_trace, Collect, ZExcursion};
use levy_rinv_core::LevyModel;

use super::entrance::Windowed;
use super::{streams, Ctx, Outcome, Table};

const RATE_TOL: f64 = 0.15;
const TRACE_DEPTH: u32 = 12;
/// Local time level the trace never reaches within the horizon.
const UNREACHED: f64 = 1e3;

struct Run {
    z: Vec<ZExcursion>,
    z_local: f64,
    x: ZeroExcursions,
}

fn simulate(ctx: &Ctx, model: &LevyModel, base: u64) -> anyhow::Result<Run> {
    let cfg = ctx.cfg;
    let t_cut = cfg.t_cut();
    let parts = ctx
        .par_map(cfg.n_paths, |i| -> anyhow::Result<Run> {
            let mut p = ctx.path(model, base + i as u64)?;
            let mut c = Collect::default();
            let k = level_trace(&mut p, TRACE_DEPTH, UNREACHED, &mut Windowed { t_cut, inner: &mut c })?;
            p.extend_to(cfg.sim.horizon);
            Ok(Run {
                z: c.0,
                z_local: k.local_time_at(t_cut).min(k.final_level),
                x: zero_excursions(&p, t_cut, cfg.params.eps),
            })
        })
        .into_iter()
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut all = Run {
        z: Vec::new(),
        z_local: 0.0,
        x: ZeroExcursions::default(),
    };
    for r in parts {
        all.z.extend(r.z);
        all.z_local += r.z_local;
        all.x.merge(&r.x);
    }
    Ok(all)
}

/// Long excursions: counts, capped durations, and depths of those shorter
/// than `cap` (always completed, whatever their start time).
struct Long {
    count: usize,
    durations: Vec<f64>,
    depths: Vec<f64>,
}

fn long_z(run: &Run, t_min: f64, cap: f64) -> Long {
    let long: Vec<&ZExcursion> = run.z.iter().filter(|e| e.duration > t_min).collect();
    Long {
        count: long.len(),
        durations: long.iter().map(|e| e.duration.min(cap)).collect(),
        depths: long.iter().filter(|e| !e.censored && e.duration <= cap).map(|e| e.min).collect(),
    }
}

fn long_x(run: &Run, t_min: f64, cap: f64) -> Long {
    let long: Vec<&(f64, bool, f64)> = run.x.negative.iter().filter(|e| e.0 > t_min).collect();
    Long {
        count: long.len(),
        durations: long.iter().map(|e| e.0.min(cap)).collect(),
        depths: long.iter().filter(|e| e.1 && e.0 <= cap).map(|e| e.2).collect(),
    }
}

pub(super) fn run(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let cfg = ctx.cfg;
    let (t_min, cap) = (cfg.params.t_min, cfg.params.cap);
    anyhow::ensure!(
        cfg.params.tail_window >= cap,
        "params.tail_window must be at least params.cap"
    );
    let pair_spec = cfg
        .model
        .with_sigma2(cfg.params.sigma2_pair)
        .ok_or_else(|| anyhow::anyhow!("sigpos needs a model with a Gaussian part"))?;
    let model_2 = pair_spec.build()?;
    let seed = cfg.seed;
    let mut out = Outcome::default();
    let mut table = Table::new(
        "rates",
        &["sigma2", "z_count", "z_local_time", "x_count", "x_local_time", "ratio", "predicted"],
    );
    let mut ratios = Vec::new();
    let mut n = 0u64;
    for (idx, (model, base)) in [(&ctx.model, streams::MAIN), (&model_2, streams::PAIR)].into_iter().enumerate() {
        let run = simulate(ctx, model, base)?;
        let (z, x) = (long_z(&run, t_min, cap), long_x(&run, t_min, cap));
        let ratio = sigpos_rate_ratio(z.count, run.z_local, x.count, run.x.local_time);
        table.push(vec![
            model.sigma2,
            z.count as f64,
            run.z_local,
            x.count as f64,
            run.x.local_time,
            ratio,
            2.0 / model.sigma2,
        ]);
        ratios.push(ratio);
        n += (z.count + x.count) as u64;
        let mut d = sigpos_shape_check(&z.durations, &x.durations, "sigpos_shape_duration", seed)?;
        d.name = format!("{}_run{}", d.name, idx + 1);
        let mut m = sigpos_shape_check(&z.depths, &x.depths, "sigpos_shape_depth", seed)?;
        m.name = format!("{}_run{}", m.name, idx + 1);
        out.checks.push(d);
        out.checks.push(m);
    }
    out.checks.insert(0, sigpos_check(&ctx.model, ratios[0], &model_2, ratios[1], RATE_TOL, seed, n)?);
    out.tables.push(table);
    Ok(out)
}
