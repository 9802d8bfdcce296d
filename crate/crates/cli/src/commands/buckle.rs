//! `buckle`: strength CDF from a yield-stress sample CSV.

use clap::{Args, ValueEnum};
use serde::Deserialize;
use std::path::{Path, PathBuf};

use measure_change::buckling::{propagate, slenderness, strength_carlsen, PlateSpec, PropagationMode};
use measure_change::dataset::read_weighted_values;
use measure_change::density::Density;
use measure_change::sample_set::{Provenance, SampleSet};

use super::{require_out, require_seed, write_json};
use crate::errors::CmdError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Non-stochastic inputs at their mean values (default).
    Means,
    /// Non-stochastic inputs at the nominal values.
    Nominal,
    /// All inputs drawn jointly (exploratory).
    Joint,
}

#[derive(Args)]
pub struct BuckleArgs {
    /// Sample CSV: either value,weight,provenance or a single column.
    #[arg(long)]
    samples: PathBuf,

    /// Optional JSON overriding plate parameters (fields b, t, sigma0, E,
    /// delta0, eta; missing fields keep their nominal values).
    #[arg(long)]
    spec: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = ModeArg::Means)]
    mode: ModeArg,
}

#[derive(Deserialize, Default)]
struct SpecOverride {
    b: Option<f64>,
    t: Option<f64>,
    sigma0: Option<f64>,
    #[serde(rename = "E")]
    elastic_modulus: Option<f64>,
    delta0: Option<f64>,
    eta: Option<f64>,
}

pub fn run(args: &BuckleArgs, seed: Option<u64>, out: Option<&Path>) -> Result<(), CmdError> {
    let out = require_out(out)?;
    let (values, weights) = read_weighted_values(&args.samples)?;

    let mut spec = PlateSpec::nominal();
    if let Some(path) = &args.spec {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CmdError::Io(format!("{}: {e}", path.display())))?;
        let ov: SpecOverride =
            serde_json::from_str(&text).map_err(|e| CmdError::Other(format!("spec JSON: {e}")))?;
        if let Some(v) = ov.b {
            spec.b = v;
        }
        if let Some(v) = ov.t {
            spec.t = v;
        }
        if let Some(v) = ov.sigma0 {
            spec.sigma0 = v;
        }
        if let Some(v) = ov.elastic_modulus {
            spec.elastic_modulus = v;
        }
        if let Some(v) = ov.delta0 {
            spec.delta0 = v;
        }
        if let Some(v) = ov.eta {
            spec.eta = v;
        }
        spec.validate().map_err(CmdError::from)?;
    }

    let mode = match args.mode {
        ModeArg::Means => PropagationMode::Means,
        ModeArg::Nominal => PropagationMode::Nominal,
        ModeArg::Joint => PropagationMode::Joint { seed: require_seed(seed)? },
    };

    // The carrier density is irrelevant to propagation; a wide positive
    // placeholder admits any positive yield-stress sample.
    let carrier = Density::gamma(1.0, 1_000.0).map_err(CmdError::from)?;
    let n = values.len();
    let set = SampleSet::from_parts(
        values,
        weights,
        vec![Provenance::Original; n],
        carrier,
        seed.unwrap_or(0),
        vec![format!("read({})", args.samples.display())],
    )
    .map_err(CmdError::from)?;

    let (_, cdf) = propagate(&set, &spec, mode).map_err(CmdError::from)?;
    cdf.write_csv(out.join("strength_cdf.csv")).map_err(CmdError::from)?;
    write_json(
        &out.join("buckle_meta.json"),
        &serde_json::json!({
            "spec": spec,
            "mode": format!("{:?}", args.mode),
            "lambda_at_spec_sigma0": slenderness(&spec),
            "psi_at_spec_sigma0": strength_carlsen(&spec).map_err(CmdError::from)?,
            "n_samples": n,
        }),
    )?;
    println!("wrote strength CDF for {n} samples to {}", out.display());
    Ok(())
}
