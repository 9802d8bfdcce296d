//! Updating Monte Carlo sample sets under a change of probability measure.
//!
//! When Bayesian re-inference on new data replaces an input density `p` with
//! an updated density `q`, an existing set of Monte Carlo samples drawn from
//! `p` can be converted instead of thrown away. This crate implements four
//! conversion strategies and the machinery around them:
//!
//! * importance-sampling **reweighting** with effective-sample-size
//!   diagnostics ([`strategies::reweight`], [`strategies::ess`]);
//! * sample **augmenting** from a correction density ([`strategies::augment`]);
//! * acceptance/rejection **filtering** ([`strategies::filter`]);
//! * the **mixed** augmenting-filtering update, which splits the support into
//!   the region where `q >= p` (augment) and `q < p` (filter), adds a number
//!   of samples proportional to half the total variation distance, and works
//!   under any support relationship ([`strategies::mixed_update`]).
//!
//! Supporting modules: parametric [`density`] families with exact samplers,
//! adaptive [`quad`]rature, support [`partition`]ing with a built-in
//! total-variation self-check, two-stage Bayesian model selection and MAP
//! fitting plus a sequential dataset-extension pipeline ([`bayes`]), a plate
//! [`buckling`] strength application, and the benchmark [`scenarios`]
//! registry.
//!
//! # Determinism and parallelism
//!
//! Everything randomized takes an explicit 64-bit seed; per-sample work uses
//! index-keyed ChaCha substreams ([`rng`]), so results are bit-identical
//! across runs *and* across thread counts. The `parallel` feature (default)
//! runs the hot loops on rayon; disable it for a fully sequential build:
//!
//! ```text
//! cargo build --no-default-features
//! ```

pub mod bayes;
pub mod buckling;
pub mod dataset;
pub mod density;
pub mod error;
pub mod exec;
pub mod optim;
pub mod partition;
pub mod quad;
pub mod rng;
pub mod sample_set;
pub mod scenarios;
pub mod stats;
pub mod strategies;
pub mod support;

pub use bayes::{
    evidence, fit_model, map_fit, model_posteriors, sequential_pipeline, CatalogEntry, FitFamily,
    ModelCatalog, ModelFit, ParamBox, StageOutcome,
};
pub use buckling::{
    propagate, slenderness, strength_carlsen, strength_pristine, PlateSpec, PropagationMode,
};
pub use density::Density;
pub use error::{Error, Result};
pub use partition::{
    find_crossings, max_ratio, partition, PartitionSummary, RatioBound, RatioMode,
};
pub use sample_set::{Provenance, SampleSet};
pub use strategies::{
    augment, choose_strategy, ess, filter, mc_estimate, mixed_update, reweight, CMode,
    StrategyKind, UpdateReport,
};
pub use support::{SupportInterval, SupportKind};
