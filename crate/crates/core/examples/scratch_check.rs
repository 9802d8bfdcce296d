//! Dev scratch: print scenario diagnostics (deleted before release).
use measure_change::scenarios::{all_cases, emit_row, mixed_count_by_quadrature, scenario_base};
use measure_change::strategies::reweight;

fn main() {
    let n = 10_000;
    let t0 = std::time::Instant::now();
    for sc in all_cases() {
        let nq = mixed_count_by_quadrature(&sc, n).unwrap();
        let base = scenario_base(&sc, n, 1);
        let (_, rep) = reweight(&base, &sc.p, &sc.q).unwrap();
        let e = rep.ess.map(|e| format!("{e:.0}")).unwrap_or("-".into());
        println!(
            "{}: mixed_quad={} ess_seed1={} feas={} ({:?})",
            sc.id, nq, e, rep.feasible, t0.elapsed()
        );
    }
    let t1 = std::time::Instant::now();
    for sc in all_cases() {
        let row = emit_row(&sc, n, 7).unwrap();
        println!(
            "{} row: ess={} aug={}/{} filt={}/{} mixed={}/{}",
            sc.id,
            row.is_ess.render(),
            row.augment_n_a.render(),
            row.augment_n_star.render(),
            row.filter_n_reject.render(),
            row.filter_n_star.render(),
            row.mixed_n_a_plus.render(),
            row.mixed_n_star.render()
        );
    }
    println!("emit_rows took {:?}", t1.elapsed());

    // ESS over 20 seeds for the statistical criteria
    for id in ["t1c1", "t1c2", "t1c3", "t1c4", "t1c5", "t2c1", "t2c2", "t2c5"] {
        let sc = measure_change::scenarios::by_id(id).unwrap();
        let mut vals = vec![];
        for seed in 0..20u64 {
            let base = scenario_base(&sc, n, seed);
            let (_, rep) = reweight(&base, &sc.p, &sc.q).unwrap();
            vals.push(rep.ess.unwrap_or(f64::NAN));
        }
        let m = vals.iter().sum::<f64>() / vals.len() as f64;
        println!("{id}: mean ESS over 20 seeds = {m:.0}");
    }
}
