//! Thinned-ladder right inverse against the dyadic hitting construction,
//! and the bivariate exponent of `(K̃_s, X_{K̃_s})` against `Λ̃_n`.

use levy_rinv_core::exponent::{empirical_bivariate_exponent, thinned_exponent, HitTable};
use levy_rinv_core::inverse::{evans_construct, thinned_at_local_times, thinned_ladder_construct};
use levy_rinv_core::CheckReport;

use super::{streams, Ctx, Outcome, Table};

/// Share of paths on which the two constructions must agree.
const AGREE_FRACTION: f64 = 0.9;
/// Agreement radius in units of `dt`.
const AGREE_STEPS: f64 = 10.0;
const BIVARIATE_TOL: f64 = 0.05;
const BETAS: [f64; 2] = [0.0, 1.0];

pub(super) fn run(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let cfg = ctx.cfg;
    let model = &ctx.model;
    let n = cfg.depth;
    let x = cfg.params.x_max;
    let s = cfg.params.local_time;
    let radius = AGREE_STEPS * cfg.sim.dt;

    // (sup |K̃ − K|, K̃_s, X_{K̃_s})
    let per_path = ctx
        .par_map(cfg.n_paths, |i| -> anyhow::Result<(f64, f64, f64)> {
            let mut p = ctx.path(model, streams::MAIN + i as u64)?;
            let k = evans_construct(&mut p, n, cfg.refinement, x)?;
            let kt = thinned_ladder_construct(&mut p, n, n, x)?;
            let mut dev: f64 = 0.0;
            for j in 0..k.k.len().max(kt.k.len()) {
                let a = k.k.get(j).copied().unwrap_or(f64::INFINITY);
                let b = kt.k.get(j).copied().unwrap_or(f64::INFINITY);
                let d = if a.is_infinite() && b.is_infinite() { 0.0 } else { (a - b).abs() };
                dev = dev.max(d);
            }
            let mut q = ctx.path(model, streams::FRESH + i as u64)?;
            let sample = thinned_at_local_times(&mut q, n, &[s])?;
            let (ks, xs) = sample.first().map(|&(_, k, v)| (k, v)).unwrap_or((f64::INFINITY, f64::NAN));
            Ok((dev, ks, xs))
        })
        .into_iter()
        .collect::<anyhow::Result<Vec<_>>>()?;

    let seed = cfg.seed;
    let n_paths = cfg.n_paths as u64;
    let mut out = Outcome::default();

    let devs: Vec<f64> = per_path.iter().map(|r| r.0).collect();
    let agree = devs.iter().filter(|d| **d <= radius).count() as f64 / devs.len() as f64;
    out.checks.push(CheckReport::deviation(
        "thinned_vs_evans_agreement",
        vec![agree],
        vec![AGREE_FRACTION],
        1.0 - agree,
        1.0 - AGREE_FRACTION,
        seed,
        n_paths,
    ));
    let mut dt = Table::new("sup_deviation", &["path", "sup_abs_diff", "within"]);
    for (i, d) in devs.iter().enumerate() {
        dt.push(vec![i as f64, *d, f64::from(u8::from(*d <= radius))]);
    }
    out.tables.push(dt);

    let ladders = ctx.ladders(model, streams::LADDER, cfg.n_paths, x, false)?;
    let lc = ctx.ladder_char(model, &ladders)?;
    drop(ladders);
    let samples: Vec<(f64, f64)> = per_path.iter().map(|r| (r.1, r.2)).collect();
    let y_max = match &lc.measure {
        levy_rinv_core::fluctuation::LadderMeasure::Empirical(m) => m.points.iter().map(|p| p.1).fold(1.0, f64::max),
        _ => 1.0,
    };
    let mut bt = Table::new("bivariate_exponent", &["q", "beta", "empirical", "se", "lambda_tilde"]);
    for &q in &cfg.q_grid {
        let table = HitTable::new(model, q, y_max * 1.01, 400)?;
        for beta in BETAS {
            let (emp, se) = empirical_bivariate_exponent(&samples, s, q, beta);
            let pred = thinned_exponent(&lc, &table, lc.creep_rate, n, q, beta)?;
            bt.push(vec![q, beta, emp, se, pred]);
            out.checks.push(CheckReport::deviation(
                format!("bivariate_exponent_q{q}_beta{beta}"),
                vec![emp, se],
                vec![pred],
                (emp / pred - 1.0).abs(),
                BIVARIATE_TOL,
                seed,
                n_paths,
            ));
        }
    }
    out.tables.push(bt);
    Ok(out)
}
