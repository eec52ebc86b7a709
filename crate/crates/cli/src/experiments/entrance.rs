//! Entrance laws of `n^Z`: the Fourier–Laplace identity and the split into
//! the excursion from the supremum and a killed path after the first
//! upward jump.

use levy_rinv_core::exponent::{analytic_rho, entrance_law_check, entrance_law_decomposition, AgeValues, EntranceAccumulator};
use levy_rinv_core::fluctuation::{extract_ladder_window, LadderChar, LadderData};
use levy_rinv_core::inverse::{level_trace, TraceVisitor, ZExcursion};
use levy_rinv_core::{LevyModel, LongRun, SamplePath, SimConfig};

use super::{streams, Ctx, Outcome, Table};

const TRANSFORM_TOL: f64 = 0.05;
const DECOMPOSITION_TOL: f64 = 0.10;
/// Grid depth of the level trace (only the local time at the cut is read
/// from it).
const TRACE_DEPTH: u32 = 12;

/// Forwards excursions starting before `t_cut`.
pub(crate) struct Windowed<'a, V> {
    pub t_cut: f64,
    pub inner: &'a mut V,
}

impl<V: TraceVisitor> TraceVisitor for Windowed<'_, V> {
    fn piece(&mut self, start: f64, level: f64, ta: f64, xa: f64, tb: f64, xb: f64) {
        if start < self.t_cut {
            self.inner.piece(start, level, ta, xa, tb, xb);
        }
    }

    fn excursion(&mut self, e: &ZExcursion) {
        if e.start_time < self.t_cut {
            self.inner.excursion(e);
        }
    }
}

struct Both {
    acc: EntranceAccumulator,
    ages: AgeValues,
}

impl TraceVisitor for Both {
    fn piece(&mut self, start: f64, level: f64, ta: f64, xa: f64, tb: f64, xb: f64) {
        self.acc.piece(start, level, ta, xa, tb, xb);
        self.ages.piece(start, level, ta, xa, tb, xb);
    }

    fn excursion(&mut self, e: &ZExcursion) {
        self.acc.excursion(e);
    }
}

/// Values at the ages of the excursions below the supremum, continued by a
/// fresh path killed at zero after an upward jump across the supremum.
fn split_side(
    ctx: &Ctx,
    model: &LevyModel,
    i: usize,
    ages: &[f64],
) -> anyhow::Result<(Vec<Vec<f64>>, LadderData)> {
    let cfg = ctx.cfg;
    let stop = if model.long_run() == LongRun::DriftsDown { f64::INFINITY } else { cfg.params.x_max };
    let mut p = ctx.path(model, streams::LADDER + i as u64)?;
    let l = extract_ladder_window(&mut p, stop, cfg.t_cut(), false);
    let a_max = ages.iter().copied().fold(0.0, f64::max);
    let mut vals = vec![Vec::new(); ages.len()];
    let mut see = |j: &levy_rinv_core::fluctuation::LadderJump, idx: usize, open: bool| -> anyhow::Result<()> {
        let mut fresh: Option<SamplePath> = None;
        for (k, &a) in ages.iter().enumerate() {
            if a < j.dtau {
                vals[k].push(p.value_at(j.start + a) - j.sup);
            } else if !open && j.dh > 0.0 {
                if fresh.is_none() {
                    let sim = SimConfig {
                        horizon: a_max + 2.0 * cfg.sim.dt,
                        stream_id: streams::FRESH + ((i as u64) << 24) + idx as u64,
                        ..ctx.sim(0)
                    };
                    fresh = Some(SamplePath::lazy(model, &sim)?);
                }
                let f = fresh.as_mut().expect("set above");
                let r = a - j.dtau;
                let origin = f.origin();
                let alive = f.hit_from(origin, -j.dh).map_or(true, |c| c.t > r);
                if alive {
                    f.cursor_at(r);
                    vals[k].push(j.dh + f.value_at(r));
                }
            }
        }
        Ok(())
    };
    for (idx, j) in l.jumps.iter().enumerate() {
        if j.dtau > 0.0 {
            see(j, idx, false)?;
        }
    }
    if let Some(j) = &l.open {
        see(j, usize::MAX >> 8, true)?;
    }
    Ok((vals, l))
}

pub(super) fn run(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let cfg = ctx.cfg;
    let model = &ctx.model;
    let x = cfg.params.x_max;
    let t_cut = cfg.t_cut();
    let ages = cfg.params.ages.clone();
    let points: Vec<(f64, f64)> = cfg
        .q_grid
        .iter()
        .flat_map(|&q| cfg.lambda_grid.iter().map(move |&l| (q, l)))
        .collect();

    let traced = ctx
        .par_map(cfg.n_paths, |i| -> anyhow::Result<Both> {
            let mut p = ctx.path(model, streams::MAIN + i as u64)?;
            let mut both = Both {
                acc: EntranceAccumulator::new(points.clone()),
                ages: AgeValues::new(ages.clone()),
            };
            let k = level_trace(&mut p, TRACE_DEPTH, x, &mut Windowed { t_cut, inner: &mut both })?;
            both.acc.local_time = k.local_time_at(t_cut).min(k.final_level);
            Ok(both)
        })
        .into_iter()
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut acc = EntranceAccumulator::new(points.clone());
    let mut lhs_ages = AgeValues::new(ages.clone());
    for b in &traced {
        acc.merge(&b.acc);
        lhs_ages.merge(&b.ages);
    }
    drop(traced);

    let split = ctx
        .par_map(cfg.n_paths, |i| split_side(ctx, model, i, &ages))
        .into_iter()
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut rhs_ages = vec![Vec::new(); ages.len()];
    let mut ladders = Vec::with_capacity(split.len());
    for (v, l) in split {
        for (a, b) in rhs_ages.iter_mut().zip(v) {
            a.extend(b);
        }
        ladders.push(l);
    }
    let lc = ctx.ladder_char(model, &ladders)?;
    drop(ladders);

    // ρ and η_K: closed forms where available, otherwise the ladder formula
    let closed = LadderChar::closed_form(model).ok();
    let eta_k = closed.as_ref().map_or(lc.eta, |c| c.eta);
    let mut rho = Vec::with_capacity(points.len());
    for &(q, _) in &points {
        let r = match model.closed_form_rho(q)? {
            Some(r) => r,
            None => analytic_rho(model, &lc, q)?,
        };
        rho.push(r);
    }

    let seed = cfg.seed;
    let n = cfg.n_paths as u64;
    let mut out = Outcome::default();
    let mut table = Table::new("fourier_laplace", &["q", "lambda", "mc_re", "mc_im", "formula_re", "formula_im"]);
    for (lam_idx, &lam) in cfg.lambda_grid.iter().enumerate() {
        // one check per λ
        let idx: Vec<usize> = (0..points.len()).filter(|k| k % cfg.lambda_grid.len() == lam_idx).collect();
        let mut sub = EntranceAccumulator::new(idx.iter().map(|&k| points[k]).collect());
        sub.sums = idx.iter().map(|&k| acc.sums[k]).collect();
        sub.local_time = acc.local_time;
        sub.excursions = acc.excursions;
        let sub_rho: Vec<f64> = idx.iter().map(|&k| rho[k]).collect();
        let mut c = entrance_law_check(model, &sub, &sub_rho, eta_k, TRANSFORM_TOL, seed, n)?;
        c.name = format!("{}_lambda{lam}", c.name);
        out.checks.push(c);
    }
    for ((&(q, lam), e), &r) in points.iter().zip(acc.estimates()).zip(&rho) {
        let f = levy_rinv_core::exponent::entrance_law_rhs(model, r, eta_k, q, lam);
        table.push(vec![q, lam, e.re, e.im, f.re, f.im]);
    }
    out.tables.push(table);

    let edges: Vec<f64> = (0..=40).map(|k| -2.0 + 0.1 * k as f64).collect();
    out.checks.push(entrance_law_decomposition(
        &lhs_ages.values,
        acc.local_time,
        &rhs_ages,
        lc.local_time,
        &edges,
        DECOMPOSITION_TOL,
        seed,
    )?);
    let mut ht = Table::new("entrance_law_density", &["age", "z_lo", "z_hi", "lhs", "rhs"]);
    for (k, &a) in ages.iter().enumerate() {
        let hl = levy_rinv_core::stats::histogram(&lhs_ages.values[k], &edges);
        let hr = levy_rinv_core::stats::histogram(&rhs_ages[k], &edges);
        for c in 0..edges.len() - 1 {
            ht.push(vec![a, edges[c], edges[c + 1], hl[c] / acc.local_time, hr[c] / lc.local_time]);
        }
    }
    out.tables.push(ht);
    out.notes.push(format!(
        "{} excursions of Z over local time {:.3}; ladder local time {:.3}",
        acc.excursions, acc.local_time, lc.local_time
    ));
    Ok(out)
}
