//! First passage above `x`: overshoot tails against the ladder potential
//! and ladder measure, and the creeping probability.

use levy_rinv_core::exponent::overshoot_tail_rhs;
use levy_rinv_core::fluctuation::PassageSample;
use levy_rinv_core::stats::Running;

use super::{route_check, streams, Ctx, Outcome, Table};

const OVERSHOOTS: [f64; 4] = [0.0, 0.1, 0.25, 0.5];
const CELLS: usize = 200;
/// Rows of the raw passage table.
const SAMPLE_ROWS: usize = 2000;

pub(super) fn run(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let cfg = ctx.cfg;
    let model = &ctx.model;
    let x = cfg.params.x_max;

    let passages = ctx
        .par_map(cfg.n_paths, |i| -> anyhow::Result<Option<PassageSample>> {
            let mut p = ctx.path(model, streams::MAIN + i as u64)?;
            let r = p.first_passage(x);
            Ok(r.is_finite().then(|| PassageSample {
                since_sup: r.time - r.last_sup_time,
                last_sup_time: r.last_sup_time,
                overshoot: r.overshoot,
                undershoot: r.pre_passage_sup_gap,
            }))
        })
        .into_iter()
        .collect::<anyhow::Result<Vec<_>>>()?;
    let missing = passages.iter().filter(|p| p.is_none()).count();

    let ladders = ctx.ladders(model, streams::LADDER, cfg.n_paths, x, true)?;
    let lc = ctx.ladder_char(model, &ladders)?;

    let seed = cfg.seed;
    let n = cfg.n_paths as u64;
    let rel = cfg.params.rel_tol;
    let mut out = Outcome::default();
    let mut tt = Table::new("overshoot_tail", &["w", "mc", "se", "ladder_formula"]);
    for w in OVERSHOOTS {
        let mut r = Running::default();
        for p in &passages {
            r.push(f64::from(u8::from(p.is_some_and(|s| s.overshoot > w))));
        }
        let rhs = overshoot_tail_rhs(&ladders, &lc, x, w, CELLS)?;
        tt.push(vec![w, r.mean(), r.se(), rhs]);
        out.checks.push(route_check(format!("overshoot_tail_w{w}"), r.mean(), rhs, r.se(), rel.max(0.05), seed, n));
        if w == 0.0 {
            // creeping: passage with zero overshoot
            let mut c = Running::default();
            for p in &passages {
                c.push(f64::from(u8::from(p.is_some_and(|s| s.overshoot == 0.0))));
            }
            let predicted = (1.0 - missing as f64 / passages.len() as f64) - rhs;
            out.checks.push(route_check("creeping_probability".into(), c.mean(), predicted, c.se(), rel.max(0.05), seed, n));
        }
    }
    out.tables.push(tt);

    let mut pt = Table::new("passage", &["since_sup", "last_sup_time", "overshoot", "undershoot"]);
    for s in passages.iter().flatten().take(SAMPLE_ROWS) {
        pt.push(vec![s.since_sup, s.last_sup_time, s.overshoot, s.undershoot]);
    }
    out.tables.push(pt);
    out.notes.push(format!("{missing} of {} paths did not pass {x} within the horizon", cfg.n_paths));
    Ok(out)
}
