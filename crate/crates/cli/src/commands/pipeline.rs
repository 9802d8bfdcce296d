//! `pipeline`: sequential refit over nested datasets with per-stage
//! artifacts, buckling CDFs, and a savings summary.

use clap::Args;
use serde::Deserialize;
use std::io::Write;
use std::path::{Path, PathBuf};

use measure_change::bayes::{sequential_pipeline, StageOutcome};
use measure_change::buckling::{propagate, PlateSpec, PropagationMode};
use measure_change::dataset::read_observations;

use super::{require_out, write_json};
use crate::errors::CmdError;

#[derive(Args)]
pub struct PipelineArgs {
    /// Run configuration JSON: {"stages": [paths], "N": int,
    /// "ess_threshold": real, "N_k": int, "seed": int}. Stage paths are
    /// resolved relative to the config file's directory.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Deserialize)]
struct RunConfig {
    stages: Vec<PathBuf>,
    #[serde(rename = "N")]
    n: usize,
    ess_threshold: f64,
    #[serde(rename = "N_k")]
    n_k: usize,
    seed: u64,
}

pub fn run(args: &PipelineArgs, seed: Option<u64>, out: Option<&Path>) -> Result<(), CmdError> {
    let out = require_out(out)?;
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CmdError::Io(format!("{}: {e}", args.config.display())))?;
    let config: RunConfig =
        serde_json::from_str(&text).map_err(|e| CmdError::Other(format!("config: {e}")))?;
    let seed = seed.unwrap_or(config.seed);
    let base_dir = args.config.parent().unwrap_or_else(|| Path::new("."));

    let mut stages = Vec::with_capacity(config.stages.len());
    for rel in &config.stages {
        let path = base_dir.join(rel);
        stages.push(read_observations(&path)?);
    }

    let outcomes = sequential_pipeline(&stages, config.n, config.ess_threshold, config.n_k, seed)
        .map_err(|e| match e {
            measure_change::Error::Fit { family, message } => {
                CmdError::Fit(format!("{family}: {message}"))
            }
            other => CmdError::from(other),
        })?;

    let nominal = PlateSpec::nominal();
    for o in &outcomes {
        let k = o.stage;
        write_json(&out.join(format!("stage{k}_fit.json")), &fit_json(o)?)?;
        if let Some(rep) = &o.update {
            write_json(&out.join(format!("stage{k}_report.json")), &serde_json::to_value(rep)?)?;
        }
        o.samples.write_csv(out.join(format!("stage{k}_samples.csv")))?;
        let (_, cdf) = propagate(&o.samples, &nominal, PropagationMode::Means)?;
        cdf.write_csv(out.join(format!("stage{k}_strength_cdf.csv")))?;
    }

    let total_added: usize = outcomes
        .iter()
        .filter_map(|o| o.update.as_ref())
        .map(|r| r.n_added)
        .sum();
    let rerun_cost = (outcomes.len() - 1) * config.n;
    let savings = if rerun_cost > 0 {
        1.0 - total_added as f64 / rerun_cost as f64
    } else {
        1.0
    };

    // Summary table mirroring the stage columns.
    let mut w = std::io::BufWriter::new(std::fs::File::create(out.join("summary.csv"))?);
    writeln!(
        w,
        "stage,dataset_size,family,map_params,strategy,candidate_ess,d1_change,d1_applied,n_added,n_rejected,n_total"
    )?;
    for o in &outcomes {
        let params = o
            .fit
            .map_params
            .iter()
            .map(|p| format!("{p:.6}"))
            .collect::<Vec<_>>()
            .join(" ");
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            o.stage,
            o.dataset_size,
            o.fit.selected.name(),
            params,
            o.strategy.map(|s| format!("{s:?}")).unwrap_or_else(|| "draw".into()),
            o.candidate_ess.map(|e| format!("{e:.1}")).unwrap_or_default(),
            format_args!("{:.6}", o.d1_change),
            o.update.as_ref().map(|r| format!("{:.6}", r.d1)).unwrap_or_default(),
            o.update.as_ref().map(|r| r.n_added).unwrap_or(0),
            o.update.as_ref().map(|r| r.n_rejected).unwrap_or(0),
            o.samples.len()
        )?;
    }
    writeln!(
        w,
        "# total_added={total_added} rerun_cost={rerun_cost} savings={:.1}%",
        100.0 * savings
    )?;
    w.flush()?;

    let summary = serde_json::json!({
        "stages": outcomes.iter().map(|o| stage_json(o)).collect::<Vec<_>>(),
        "total_added": total_added,
        "rerun_cost": rerun_cost,
        "savings_fraction": savings,
        "seed": seed,
    });
    write_json(&out.join("summary.json"), &summary)?;
    println!(
        "{} stages, total added {total_added} vs rerun cost {rerun_cost} ({:.1}% savings)",
        outcomes.len(),
        100.0 * savings
    );
    Ok(())
}

fn fit_json(o: &StageOutcome) -> Result<serde_json::Value, CmdError> {
    Ok(serde_json::to_value(&o.fit)?)
}

fn stage_json(o: &StageOutcome) -> serde_json::Value {
    serde_json::json!({
        "stage": o.stage,
        "dataset_size": o.dataset_size,
        "family": o.fit.selected.name(),
        "map_params": o.fit.map_params,
        "strategy": o.strategy.map(|s| format!("{s:?}")),
        "candidate_ess": o.candidate_ess,
        "d1_change": o.d1_change,
        "d1_applied": o.update.as_ref().map(|r| r.d1),
        "n_added": o.update.as_ref().map(|r| r.n_added).unwrap_or(0),
        "n_rejected": o.update.as_ref().map(|r| r.n_rejected).unwrap_or(0),
        "n_total": o.samples.len(),
    })
}
