//! `update`: apply one strategy (or the automatic policy) to one density pair.

use clap::{Args, ValueEnum};
use std::path::{Path, PathBuf};

use measure_change::density::Density;
use measure_change::sample_set::SampleSet;
use measure_change::scenarios;
use measure_change::strategies::{self, CMode, StrategyKind, UpdateReport};

use super::{require_out, require_seed, write_json};
use crate::errors::CmdError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    /// Reweight when feasible with ESS above the threshold, else mixed.
    Auto,
    Reweight,
    Augment,
    Filter,
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CModeArg {
    Analytic,
    Empirical,
}

#[derive(Args)]
pub struct UpdateArgs {
    /// Built-in scenario id (t1c1..t1c5, t2c1..t2c6); alternative to --p/--q.
    #[arg(long, conflicts_with_all = ["p", "q"])]
    scenario: Option<String>,

    /// Original density as JSON, e.g. '{"family":"Normal","params":[10,1],"support":["-inf","inf"]}'.
    #[arg(long, requires = "q")]
    p: Option<String>,

    /// Updated density as JSON.
    #[arg(long, requires = "p")]
    q: Option<String>,

    /// Sample count for a fresh draw (ignored when --input is given).
    #[arg(long, default_value_t = 10_000)]
    n: usize,

    /// Existing sample CSV (value,weight,provenance) drawn from the original
    /// density; drawn fresh when absent.
    #[arg(long)]
    input: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
    strategy: StrategyArg,

    /// Majorizer-constant mode for pure filtering.
    #[arg(long, value_enum, default_value_t = CModeArg::Analytic)]
    c_mode: CModeArg,

    /// ESS fraction below which the automatic policy abandons reweighting.
    #[arg(long, default_value_t = 0.9)]
    ess_threshold: f64,
}

fn parse_density(text: &str) -> Result<Density, CmdError> {
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CmdError::Other(format!("density JSON: {e}")))?;
    Ok(Density::from_json(&v)?)
}

pub fn run(args: &UpdateArgs, seed: Option<u64>, out: Option<&Path>) -> Result<(), CmdError> {
    let seed = require_seed(seed)?;
    let out = require_out(out)?;

    let (p, q) = match (&args.scenario, &args.p, &args.q) {
        (Some(id), _, _) => {
            let sc = scenarios::by_id(id)
                .ok_or_else(|| CmdError::Other(format!("unknown scenario {id:?}")))?;
            (sc.p, sc.q)
        }
        (None, Some(pj), Some(qj)) => (parse_density(pj)?, parse_density(qj)?),
        _ => {
            return Err(CmdError::Other(
                "provide either --scenario or both --p and --q".into(),
            ))
        }
    };

    let base = match &args.input {
        Some(path) => SampleSet::read_csv(path, p.clone(), seed)?,
        None => SampleSet::draw(&p, args.n, seed),
    };

    let strategy = match args.strategy {
        StrategyArg::Auto => {
            match strategies::choose_strategy(&base, &p, &q, args.ess_threshold)? {
                StrategyKind::Reweight => StrategyArg::Reweight,
                _ => StrategyArg::Mixed,
            }
        }
        other => other,
    };

    let (updated, report): (SampleSet, UpdateReport) = match strategy {
        StrategyArg::Reweight => strategies::reweight(&base, &p, &q)?,
        StrategyArg::Augment => strategies::augment(&base, &p, &q, seed)?,
        StrategyArg::Filter => {
            let mode = match args.c_mode {
                CModeArg::Analytic => CMode::AnalyticScan,
                CModeArg::Empirical => CMode::SampleEmpirical,
            };
            strategies::filter(&base, &p, &q, seed, mode)?
        }
        StrategyArg::Mixed => strategies::mixed_update(&base, &p, &q, seed)?,
        StrategyArg::Auto => unreachable!("resolved above"),
    };

    updated.write_csv(out.join("samples.csv"))?;
    write_json(&out.join("report.json"), &serde_json::to_value(&report)?)?;
    write_json(&out.join("overlay.json"), &overlay(&updated, &p, &q)?)?;

    if !report.feasible {
        return Err(CmdError::Infeasible(
            report.reason.unwrap_or_else(|| "unspecified".into()),
        ));
    }
    println!(
        "{:?}: n {} -> {} (added {}, rejected {}, d1 {:.4}{})",
        report.strategy,
        report.n_before,
        report.n_after,
        report.n_added,
        report.n_rejected,
        report.d1,
        report
            .ess
            .map(|e| format!(", ess {e:.1}"))
            .unwrap_or_default()
    );
    Ok(())
}

/// Histogram of the updated set plus both pdfs on a grid: the data needed to
/// regenerate overlay-style plots.
fn overlay(set: &SampleSet, p: &Density, q: &Density) -> Result<serde_json::Value, CmdError> {
    let (plo, phi) = p.effective_support();
    let (qlo, qhi) = q.effective_support();
    let (lo, hi) = (plo.min(qlo), phi.max(qhi));

    const BINS: usize = 60;
    let mut counts = vec![0.0f64; BINS];
    let width = (hi - lo) / BINS as f64;
    for (&x, &w) in set.values().iter().zip(set.weights()) {
        let idx = (((x - lo) / width) as usize).min(BINS - 1);
        counts[idx] += w;
    }
    let edges: Vec<f64> = (0..=BINS).map(|i| lo + width * i as f64).collect();

    const GRID: usize = 512;
    let xs: Vec<f64> = (0..GRID)
        .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / GRID as f64)
        .collect();
    let pv: Vec<f64> = xs.iter().map(|&x| p.pdf(x)).collect::<Result<_, _>>()?;
    let qv: Vec<f64> = xs.iter().map(|&x| q.pdf(x)).collect::<Result<_, _>>()?;

    Ok(serde_json::json!({
        "bins": { "edges": edges, "weighted_counts": counts },
        "grid": { "x": xs, "p": pv, "q": qv },
        "p": p.to_json(),
        "q": q.to_json(),
    }))
}
