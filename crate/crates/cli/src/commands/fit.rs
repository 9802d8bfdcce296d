//! `fit`: two-stage model selection on a dataset.

use clap::Args;
use std::path::{Path, PathBuf};

use measure_change::bayes::{fit_model, FitFamily, ModelCatalog};
use measure_change::dataset::read_observations;

use super::{require_out, require_seed, write_json};
use crate::errors::CmdError;

#[derive(Args)]
pub struct FitArgs {
    /// Single-column CSV of observations (optional header).
    #[arg(long)]
    data: PathBuf,

    /// Monte Carlo draws for each evidence estimate.
    #[arg(long, default_value_t = 100_000)]
    n_k: usize,

    /// Comma-separated family subset (default: all seven).
    #[arg(long, value_delimiter = ',')]
    families: Option<Vec<String>>,
}

pub fn run(args: &FitArgs, seed: Option<u64>, out: Option<&Path>) -> Result<(), CmdError> {
    let seed = require_seed(seed)?;
    let out = require_out(out)?;
    let data = read_observations(&args.data)?;

    let catalog = match &args.families {
        Some(names) => {
            let fams: Vec<FitFamily> = names
                .iter()
                .map(|n| FitFamily::parse(n))
                .collect::<Result<_, _>>()
                .map_err(CmdError::from)?;
            ModelCatalog::moment_informed_with(&data, &fams, 5.0)
        }
        None => ModelCatalog::moment_informed(&data),
    }
    .map_err(CmdError::from)?;

    let fit = fit_model(&data, &catalog, args.n_k, seed).map_err(CmdError::from)?;
    write_json(&out.join("fit.json"), &serde_json::to_value(&fit)?)?;
    let top = fit
        .posterior_probs
        .iter()
        .map(|(f, p)| format!("{}={p:.3}", f.name()))
        .collect::<Vec<_>>()
        .join(" ");
    println!(
        "selected {} {:?} from {} points (posteriors: {top})",
        fit.selected.name(),
        fit.map_params,
        fit.dataset_size
    );
    Ok(())
}
