//! Three routes to `ρ(q)`: Monte Carlo `K_x` from the dyadic hitting
//! construction, the ladder/resolvent formula, and closed forms.

use levy_rinv_core::exponent::{analytic_rho, k_characteristics, rho_shape_ok};
use levy_rinv_core::fluctuation::{extract_ladder_window, LadderChar, LadderData};
use levy_rinv_core::inverse::{empirical_rho, evans_construct};
use levy_rinv_core::stats::Running;
use levy_rinv_core::{CheckReport, LongRun};

use super::{route_check, streams, Ctx, Outcome, Table};

struct PathOut {
    k_x: f64,
    overshoot: f64,
    /// Largest `|K_{x_k} − x_k|` (pure drift only).
    identity_dev: f64,
    ladder: LadderData,
    z: f64,
    z_hat: f64,
}

pub(super) fn run(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let cfg = ctx.cfg;
    let model = &ctx.model;
    let x = cfg.params.x_max;
    let pure_drift = model.sigma2 == 0.0 && model.jumps.rate() == 0.0;
    let stop = if model.long_run() == LongRun::DriftsDown { f64::INFINITY } else { x };
    let t_cut = cfg.t_cut();
    let zq = cfg.q_grid[0];
    let zx = (0.5f64).powi(cfg.depth as i32);

    let outs = ctx
        .par_map(cfg.n_paths, |i| -> anyhow::Result<PathOut> {
            let mut p = ctx.path(model, streams::MAIN + i as u64)?;
            let k = evans_construct(&mut p, cfg.depth, cfg.refinement, x)?;
            let identity_dev = if pure_drift {
                k.levels().map(|(lvl, t)| (t - lvl).abs()).fold(0.0, f64::max)
            } else {
                0.0
            };
            let pass = p.first_passage(x);
            let overshoot = if pass.is_finite() { pass.overshoot } else { 0.0 };
            let hit = p.first_hitting(zx).time;
            let z = 1.0 - if hit.is_finite() { (-zq * hit).exp() } else { 0.0 };
            let small = p.first_passage(zx);
            let z_hat = if small.is_finite() && small.overshoot > 0.0 { z } else { 0.0 };
            let ladder = extract_ladder_window(&mut p, stop, t_cut, false);
            Ok(PathOut {
                k_x: k.k_at(x),
                overshoot,
                identity_dev,
                ladder,
                z,
                z_hat,
            })
        })
        .into_iter()
        .collect::<anyhow::Result<Vec<_>>>()?;

    let samples: Vec<f64> = outs.iter().map(|o| o.k_x).collect();
    let (mut zs, mut zh) = (Running::default(), Running::default());
    for o in &outs {
        zs.push(o.z / zx);
        zh.push(o.z_hat / zx);
    }
    let max_overshoot = outs.iter().map(|o| o.overshoot).fold(0.0, f64::max);
    let identity_dev = outs.iter().map(|o| o.identity_dev).fold(0.0, f64::max);
    let ladders: Vec<LadderData> = outs.into_iter().map(|o| o.ladder).collect();
    let lc = ctx.ladder_char(model, &ladders)?;
    drop(ladders);
    let closed = LadderChar::closed_form(model).ok();

    let seed = cfg.seed;
    let n = cfg.n_paths as u64;
    let rel = cfg.params.rel_tol;
    let mut out = Outcome::default();
    let mut table = Table::new(
        "rho",
        &["q", "empirical", "se", "analytic", "closed_form", "diff_emp_analytic", "diff_emp_closed"],
    );
    let mut analytic_vals = Vec::new();
    for &q in &cfg.q_grid {
        let emp = empirical_rho(&samples, q, x)?;
        let ana = analytic_rho(model, &lc, q)?;
        let cf = model.closed_form_rho(q)?;
        analytic_vals.push(ana);
        out.checks.push(route_check(format!("rho_empirical_vs_analytic_q{q}"), emp.value, ana, emp.se, rel, seed, n));
        if let Some(c) = cf {
            out.checks.push(route_check(format!("rho_empirical_vs_closed_q{q}"), emp.value, c, emp.se, rel, seed, n));
            out.checks.push(route_check(format!("rho_analytic_vs_closed_q{q}"), ana, c, 0.0, rel, seed, n));
        }
        let c = cf.unwrap_or(f64::NAN);
        table.push(vec![q, emp.value, emp.se, ana, c, emp.value - ana, emp.value - c]);
        if pure_drift {
            out.checks.push(CheckReport::deviation(
                format!("rho_pure_drift_exact_q{q}"),
                vec![emp.value, emp.se],
                vec![q, 0.0],
                (emp.value - q).abs().max(emp.se),
                1e-12,
                seed,
                n,
            ));
        }
    }
    out.tables.push(table);

    if pure_drift {
        out.checks.push(CheckReport::deviation(
            "k_equals_level",
            vec![identity_dev],
            vec![0.0],
            identity_dev,
            1e-12,
            seed,
            n,
        ));
    }
    if !model.has_positive_jumps() {
        out.checks.push(CheckReport::deviation(
            "overshoot_zero",
            vec![max_overshoot],
            vec![0.0],
            max_overshoot,
            0.0,
            seed,
            n,
        ));
    }
    if cfg.q_grid.len() >= 2 {
        let ok = rho_shape_ok(&cfg.q_grid, &analytic_vals, 1e-9);
        out.checks.push(CheckReport::deviation(
            "rho_increasing_concave",
            analytic_vals.clone(),
            vec![],
            if ok { 0.0 } else { 1.0 },
            0.0,
            seed,
            n,
        ));
    }

    // κ_K against the closed-form killing rate (no positive jumps: κ_K = κ)
    let kc = k_characteristics(model, &lc, None::<fn(f64) -> f64>)?;
    if let Some(c) = &closed {
        let oracle = c.kappa;
        let (stat, tol) = if oracle == 0.0 {
            (kc.kappa_k, 1e-3)
        } else {
            ((kc.kappa_k / oracle - 1.0).abs(), 0.10)
        };
        out.checks.push(CheckReport::deviation("kappa_k", vec![kc.kappa_k], vec![oracle], stat, tol, seed, n));
    }

    let mut zt = Table::new("z_split", &["n", "q", "z", "z_hat", "z_tilde", "se"]);
    zt.push(vec![cfg.depth as f64, zq, zs.mean(), zh.mean(), zs.mean() - zh.mean(), zs.se()]);
    out.tables.push(zt);
    let mut lt = Table::new(
        "ladder",
        &["kappa", "eta", "creep_rate", "local_time", "n_jumps", "censored_fraction", "kappa_k", "eta_k"],
    );
    lt.push(vec![
        lc.kappa,
        lc.eta,
        lc.creep_rate,
        lc.local_time,
        lc.n_jumps as f64,
        lc.censored_fraction,
        kc.kappa_k,
        kc.eta_k,
    ]);
    out.tables.push(lt);
    Ok(out)
}
