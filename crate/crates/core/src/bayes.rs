//! Two-stage Bayesian inference over a catalog of parametric families, and
//! the sequential dataset-extension pipeline.
//!
//! Stage one scores each candidate family by its evidence (marginal
//! likelihood), estimated with a Monte Carlo average of the likelihood over
//! parameter draws from the prior. Stage two fits the winning family by MAP
//! optimization; with the default uniform prior boxes the MAP point is the
//! maximum likelihood estimate.

use serde::{Deserialize, Serialize};

use crate::density::Density;
use crate::error::{Error, Result};
use crate::exec::indexed_map;
use crate::optim::nelder_mead;
use crate::partition;
use crate::rng::{derive_seed, substream, Domain};
use crate::sample_set::SampleSet;
use crate::strategies::{self, StrategyKind, UpdateReport};
use crate::support::SupportInterval;
use rand::Rng;

/// The candidate parametric families (all two-parameter).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitFamily {
    Normal,
    Lognormal,
    Gamma,
    Logistic,
    Weibull,
    Loglogistic,
    Nakagami,
}

impl FitFamily {
    pub const ALL: [FitFamily; 7] = [
        FitFamily::Normal,
        FitFamily::Lognormal,
        FitFamily::Gamma,
        FitFamily::Logistic,
        FitFamily::Weibull,
        FitFamily::Loglogistic,
        FitFamily::Nakagami,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FitFamily::Normal => "Normal",
            FitFamily::Lognormal => "Lognormal",
            FitFamily::Gamma => "Gamma",
            FitFamily::Logistic => "Logistic",
            FitFamily::Weibull => "Weibull",
            FitFamily::Loglogistic => "Loglogistic",
            FitFamily::Nakagami => "Nakagami",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidCatalog(format!("unknown family {s:?}")))
    }

    pub fn support(&self) -> SupportInterval {
        match self {
            FitFamily::Normal | FitFamily::Logistic => SupportInterval::real_line(),
            _ => SupportInterval::positive_half_line(),
        }
    }

    /// Parameter names in storage order.
    pub fn param_names(&self) -> [&'static str; 2] {
        match self {
            FitFamily::Normal => ["mean", "sd"],
            FitFamily::Lognormal => ["log_mean", "log_sd"],
            FitFamily::Gamma => ["shape", "scale"],
            FitFamily::Logistic => ["location", "scale"],
            FitFamily::Weibull => ["shape", "scale"],
            FitFamily::Loglogistic => ["shape", "scale"],
            FitFamily::Nakagami => ["shape", "spread"],
        }
    }

    /// Whether the first parameter is a location (may be zero or negative).
    fn first_param_is_location(&self) -> bool {
        matches!(self, FitFamily::Normal | FitFamily::Logistic | FitFamily::Lognormal)
    }

    pub fn make_density(&self, params: &[f64]) -> Result<Density> {
        if params.len() != 2 {
            return Err(Error::InvalidCatalog(format!(
                "{} takes 2 parameters, got {}",
                self.name(),
                params.len()
            )));
        }
        let (a, b) = (params[0], params[1]);
        match self {
            FitFamily::Normal => Density::normal(a, b),
            FitFamily::Lognormal => Density::lognormal(a, b),
            FitFamily::Gamma => Density::gamma(a, b),
            FitFamily::Logistic => Density::logistic(a, b),
            FitFamily::Weibull => Density::weibull(a, b),
            FitFamily::Loglogistic => Density::loglogistic(a, b),
            FitFamily::Nakagami => Density::nakagami(a, b),
        }
    }

    /// Moment-matched parameter estimates (population moments).
    pub fn moment_start(&self, data: &[f64]) -> Result<Vec<f64>> {
        if data.is_empty() {
            return Err(Error::EmptySampleSet);
        }
        let sup = self.support();
        if data.iter().any(|&x| !sup.contains(x) || (sup.lower == 0.0 && x == 0.0)) {
            return Err(Error::DataOutsideSupport { family: self.name().into() });
        }
        let n = data.len() as f64;
        let mean = data.iter().sum::<f64>() / n;
        let var = data.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        let sd = var.sqrt().max(1e-9);
        Ok(match self {
            FitFamily::Normal => vec![mean, sd],
            FitFamily::Logistic => vec![mean, sd * 3f64.sqrt() / std::f64::consts::PI],
            FitFamily::Lognormal => {
                let logs: Vec<f64> = data.iter().map(|x| x.ln()).collect();
                let lm = logs.iter().sum::<f64>() / n;
                let lv = logs.iter().map(|l| (l - lm) * (l - lm)).sum::<f64>() / n;
                vec![lm, lv.sqrt().max(1e-9)]
            }
            FitFamily::Gamma => {
                let shape = (mean / sd) * (mean / sd);
                vec![shape.max(1e-9), (var / mean).max(1e-9)]
            }
            FitFamily::Weibull => {
                let k = (sd / mean).powf(-1.086).clamp(0.1, 500.0);
                let lam = mean / statrs::function::gamma::gamma(1.0 + 1.0 / k);
                vec![k, lam.max(1e-9)]
            }
            FitFamily::Loglogistic => {
                let logs: Vec<f64> = data.iter().map(|x| x.ln()).collect();
                let lm = logs.iter().sum::<f64>() / n;
                let lv = logs.iter().map(|l| (l - lm) * (l - lm)).sum::<f64>() / n;
                let lsd = lv.sqrt().max(1e-9);
                let beta = (std::f64::consts::PI / (lsd * 3f64.sqrt())).clamp(0.1, 500.0);
                vec![beta, lm.exp()]
            }
            FitFamily::Nakagami => {
                let m2 = data.iter().map(|x| x * x).sum::<f64>() / n;
                let v2 = data.iter().map(|x| (x * x - m2) * (x * x - m2)).sum::<f64>() / n;
                let shape = (m2 * m2 / v2.max(1e-12)).clamp(0.5, 1e6);
                vec![shape, m2]
            }
        })
    }

    fn param_floor(&self, idx: usize) -> f64 {
        match (self, idx) {
            (FitFamily::Nakagami, 0) => 0.5,
            _ => 1e-12,
        }
    }

    /// Log-likelihood of `data` under this family at `params`.
    /// Parameters that fail validation get `-inf` (zero prior support).
    pub fn ln_likelihood(&self, params: &[f64], data: &[f64]) -> f64 {
        match self.make_density(params) {
            Ok(d) => {
                let mut total = 0.0;
                for &x in data {
                    let l = d.ln_density_at(x);
                    if l == f64::NEG_INFINITY {
                        return f64::NEG_INFINITY;
                    }
                    total += l;
                }
                total
            }
            Err(_) => f64::NEG_INFINITY,
        }
    }
}

/// Independent uniform prior box, one `[lo, hi]` per parameter.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParamBox {
    pub bounds: Vec<(f64, f64)>,
}

impl ParamBox {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() || bounds.iter().any(|(lo, hi)| !(hi > lo) || !lo.is_finite() || !hi.is_finite()) {
            return Err(Error::InvalidCatalog("prior box must have finite positive volume".into()));
        }
        Ok(Self { bounds })
    }

    pub fn volume(&self) -> f64 {
        self.bounds.iter().map(|(lo, hi)| hi - lo).product()
    }
}

/// One candidate model: family, uniform parameter prior, prior probability.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub family: FitFamily,
    pub prior: ParamBox,
    pub prior_prob: f64,
}

/// A collection of candidate models with prior probabilities summing to 1.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelCatalog {
    pub entries: Vec<CatalogEntry>,
}

/// Half-width factor of the default moment-informed prior boxes.
pub const DEFAULT_BOX_FACTOR: f64 = 5.0;

impl ModelCatalog {
    pub fn new(entries: Vec<CatalogEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidCatalog("catalog is empty".into()));
        }
        let total: f64 = entries.iter().map(|e| e.prior_prob).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidCatalog(format!(
                "prior model probabilities must sum to 1 within 1e-12, got {total}"
            )));
        }
        for e in &entries {
            if e.prior.volume() <= 0.0 {
                return Err(Error::InvalidCatalog(format!("{}: empty prior volume", e.family.name())));
            }
        }
        Ok(Self { entries })
    }

    /// Default catalog: the seven families filtered by support compatibility
    /// with the data, uniform prior model probabilities, moment-informed
    /// parameter boxes.
    ///
    /// Scale-like parameters get a multiplicative box `[m/factor, factor*m]`
    /// around the moment estimate `m`; location-like parameters (which may be
    /// zero or negative) get an additive box `m +- factor*scale`.
    pub fn moment_informed(data: &[f64]) -> Result<Self> {
        Self::moment_informed_with(data, &FitFamily::ALL, DEFAULT_BOX_FACTOR)
    }

    pub fn moment_informed_with(
        data: &[f64],
        families: &[FitFamily],
        factor: f64,
    ) -> Result<Self> {
        let mut entries = Vec::new();
        for &family in families {
            let start = match family.moment_start(data) {
                Ok(s) => s,
                Err(Error::DataOutsideSupport { .. }) => continue,
                Err(e) => return Err(e),
            };
            let mut bounds = Vec::with_capacity(2);
            for (i, &m) in start.iter().enumerate() {
                let floor = family.param_floor(i);
                let b = if i == 0 && family.first_param_is_location() {
                    let scale = start[1].max(1e-9);
                    (m - factor * scale, m + factor * scale)
                } else {
                    let m = m.max(1e-9);
                    ((m / factor).max(floor), factor * m)
                };
                bounds.push(b);
            }
            entries.push(CatalogEntry {
                family,
                prior: ParamBox::new(bounds)?,
                prior_prob: 0.0,
            });
        }
        if entries.is_empty() {
            return Err(Error::InvalidCatalog(
                "no family in the catalog supports the data range".into(),
            ));
        }
        let p = 1.0 / entries.len() as f64;
        for e in &mut entries {
            e.prior_prob = p;
        }
        Self::new(entries)
    }
}

/// Monte Carlo evidence estimate for one catalog entry.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EvidenceEstimate {
    pub estimate: f64,
    pub std_error: f64,
    /// `ln` of the estimate (`-inf` when every draw underflowed).
    pub log_estimate: f64,
    /// All likelihood draws underflowed to log-zero.
    pub underflowed: bool,
}

/// Monte Carlo evidence: mean likelihood over `n_k` prior draws, computed in
/// log space with max-shift stabilization.
pub fn evidence(
    data: &[f64],
    entry: &CatalogEntry,
    n_k: usize,
    seed: u64,
) -> Result<EvidenceEstimate> {
    if data.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    if n_k < 100 {
        return Err(Error::InvalidCatalog(format!("n_k must be at least 100, got {n_k}")));
    }
    if entry.prior.volume() <= 0.0 {
        return Err(Error::InvalidCatalog("empty prior volume".into()));
    }
    let bounds = &entry.prior.bounds;
    let lls: Vec<f64> = indexed_map(n_k, |k| {
        let mut rng = substream(seed, Domain::Evidence, k as u64);
        let params: Vec<f64> = bounds
            .iter()
            .map(|&(lo, hi)| {
                let u: f64 = rng.random();
                lo + u * (hi - lo)
            })
            .collect();
        entry.family.ln_likelihood(&params, data)
    });
    let m = lls.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return Ok(EvidenceEstimate {
            estimate: 0.0,
            std_error: 0.0,
            log_estimate: f64::NEG_INFINITY,
            underflowed: true,
        });
    }
    let shifted: Vec<f64> = lls.iter().map(|l| (l - m).exp()).collect();
    let mean = shifted.iter().sum::<f64>() / n_k as f64;
    let var = shifted.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n_k as f64;
    let se = (var / n_k as f64).sqrt();
    Ok(EvidenceEstimate {
        estimate: m.exp() * mean,
        std_error: m.exp() * se,
        log_estimate: m + mean.ln(),
        underflowed: false,
    })
}

/// Posterior model probabilities plus the per-entry evidence estimates.
#[derive(Clone, Debug)]
pub struct ModelPosteriors {
    pub probabilities: Vec<f64>,
    pub evidences: Vec<EvidenceEstimate>,
    /// Every entry underflowed; probabilities fell back to the priors.
    pub all_zero: bool,
}

/// Substream salt derived from the entry itself, so identical candidate
/// models see identical parameter draws (two copies of one model then get
/// exactly equal evidence and posterior 1/2 each).
fn entry_salt(e: &CatalogEntry) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |byte: u8| {
        h ^= byte as u64;
        h = h.wrapping_mul(0x1000_0000_01b3);
    };
    for b in e.family.name().bytes() {
        eat(b);
    }
    for (lo, hi) in &e.prior.bounds {
        for b in lo.to_bits().to_le_bytes().into_iter().chain(hi.to_bits().to_le_bytes()) {
            eat(b);
        }
    }
    h
}

/// Posterior model probabilities `ev_j * prior_j / sum`, via log-sum-exp.
pub fn model_posteriors(
    data: &[f64],
    catalog: &ModelCatalog,
    n_k: usize,
    seed: u64,
) -> Result<ModelPosteriors> {
    let evidences: Vec<EvidenceEstimate> = catalog
        .entries
        .iter()
        .map(|e| evidence(data, e, n_k, derive_seed(seed, entry_salt(e))))
        .collect::<Result<_>>()?;
    let logs: Vec<f64> = evidences
        .iter()
        .zip(&catalog.entries)
        .map(|(ev, e)| ev.log_estimate + e.prior_prob.ln())
        .collect();
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        // Degenerate: no model explains the data at any prior draw.
        let probs = catalog.entries.iter().map(|e| e.prior_prob).collect();
        return Ok(ModelPosteriors { probabilities: probs, evidences, all_zero: true });
    }
    let unnorm: Vec<f64> = logs.iter().map(|l| (l - m).exp()).collect();
    let z: f64 = unnorm.iter().sum();
    Ok(ModelPosteriors {
        probabilities: unnorm.iter().map(|u| u / z).collect(),
        evidences,
        all_zero: false,
    })
}

/// Internal seed for the deterministic Latin-hypercube fit starts.
const FIT_START_SEED: u64 = 0x4d41_5046_4954;

/// MAP parameter estimate: maximize log-likelihood plus log-prior over the
/// prior box (with a uniform box prior this is maximum likelihood). Uses 16
/// starts: the moment-matched estimate plus 15 Latin-hypercube points.
pub fn map_fit(data: &[f64], family: FitFamily, prior: &ParamBox) -> Result<Vec<f64>> {
    let start = family.moment_start(data)?;
    let bounds = &prior.bounds;
    let clamp_into = |v: &Vec<f64>| -> Vec<f64> {
        v.iter()
            .zip(bounds)
            .map(|(&x, &(lo, hi))| x.clamp(lo, hi))
            .collect()
    };

    let dim = bounds.len();
    const LHS_STARTS: usize = 15;
    let mut starts: Vec<Vec<f64>> = vec![clamp_into(&start)];
    // Latin hypercube: one stratum per start and dimension, deterministic.
    let mut strata: Vec<Vec<usize>> = Vec::with_capacity(dim);
    for d in 0..dim {
        let mut order: Vec<usize> = (0..LHS_STARTS).collect();
        let mut rng = substream(FIT_START_SEED, Domain::FitStart, d as u64);
        for i in (1..order.len()).rev() {
            let j = rng.random_range(0..=i);
            order.swap(i, j);
        }
        strata.push(order);
    }
    for s in 0..LHS_STARTS {
        let mut rng = substream(FIT_START_SEED, Domain::FitStart, 1000 + s as u64);
        let point: Vec<f64> = (0..dim)
            .map(|d| {
                let (lo, hi) = bounds[d];
                let u: f64 = rng.random();
                lo + (hi - lo) * (strata[d][s] as f64 + u) / LHS_STARTS as f64
            })
            .collect();
        starts.push(point);
    }

    let objective = |params: &[f64]| -family.ln_likelihood(params, data);
    let results = indexed_map(starts.len(), |i| {
        let (x1, f1) = nelder_mead(&objective, &starts[i], bounds, 600);
        // Re-polish from the clamped optimum.
        let (x2, f2) = nelder_mead(&objective, &x1, bounds, 400);
        if f2 <= f1 {
            (x2, f2)
        } else {
            (x1, f1)
        }
    });
    let best = results
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one start");
    if !best.1.is_finite() {
        return Err(Error::Fit {
            family: family.name().into(),
            message: "likelihood is zero everywhere in the prior box".into(),
        });
    }
    Ok(best.0)
}

/// Result of the two-stage inference.
#[derive(Clone, Debug, Serialize)]
pub struct ModelFit {
    pub selected: FitFamily,
    pub map_params: Vec<f64>,
    pub posterior_probs: Vec<(FitFamily, f64)>,
    pub evidences: Vec<(FitFamily, EvidenceEstimate)>,
    pub n_k: usize,
    pub dataset_size: usize,
    pub all_evidence_zero: bool,
}

impl ModelFit {
    pub fn density(&self) -> Density {
        self.selected
            .make_density(&self.map_params)
            .expect("MAP parameters were validated by the fit")
    }
}

/// Full two-stage inference: posterior model probabilities, MAP family
/// selection (ties broken by fewest parameters then lexicographic name),
/// then MAP parameter estimation within the winner's prior box.
pub fn fit_model(
    data: &[f64],
    catalog: &ModelCatalog,
    n_k: usize,
    seed: u64,
) -> Result<ModelFit> {
    let post = model_posteriors(data, catalog, n_k, seed)?;
    let mut best = 0usize;
    for j in 1..catalog.entries.len() {
        let (pb, pj) = (post.probabilities[best], post.probabilities[j]);
        if pj > pb + 1e-12 {
            best = j;
        } else if (pj - pb).abs() <= 1e-12 {
            // All families here have two parameters; fall to name order.
            if catalog.entries[j].family.name() < catalog.entries[best].family.name() {
                best = j;
            }
        }
    }
    let entry = &catalog.entries[best];
    let map_params = map_fit(data, entry.family, &entry.prior)?;
    Ok(ModelFit {
        selected: entry.family,
        map_params,
        posterior_probs: catalog
            .entries
            .iter()
            .map(|e| e.family)
            .zip(post.probabilities.iter().copied())
            .map(|(f, p)| (f, p))
            .collect(),
        evidences: catalog
            .entries
            .iter()
            .map(|e| e.family)
            .zip(post.evidences.iter().copied())
            .collect(),
        n_k,
        dataset_size: data.len(),
        all_evidence_zero: post.all_zero,
    })
}

/// One stage of the sequential pipeline.
#[derive(Clone, Debug)]
pub struct StageOutcome {
    pub stage: usize,
    pub dataset_size: usize,
    pub fit: ModelFit,
    pub samples: SampleSet,
    /// `None` for the initial draw stage.
    pub strategy: Option<StrategyKind>,
    pub update: Option<UpdateReport>,
    /// Effective sample size of the reweighting candidate for this stage
    /// (reported even when the mixed strategy is chosen).
    pub candidate_ess: Option<f64>,
    /// Total variation distance between the previous and current fits.
    pub d1_change: f64,
}

/// Sequential dataset-extension pipeline.
///
/// Stage 0 fits the first dataset and draws `n` fresh samples from the MAP
/// density. Each later stage refits, evaluates the reweighting candidate
/// against the density the samples were last materialized from, and applies
/// reweighting when it is feasible with ESS at least `ess_threshold * n`,
/// otherwise the mixed update (which discards candidate weights, transforms
/// the materialized values exactly, and rematerializes).
pub fn sequential_pipeline(
    stages: &[Vec<f64>],
    n: usize,
    ess_threshold: f64,
    n_k: usize,
    seed: u64,
) -> Result<Vec<StageOutcome>> {
    if stages.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    if n == 0 {
        return Err(Error::InvalidSampleSet("pipeline needs n >= 1".into()));
    }
    for (k, w) in stages.windows(2).enumerate() {
        if !is_sub_multiset(&w[0], &w[1]) {
            return Err(Error::InvalidCatalog(format!(
                "stage {} dataset does not contain stage {} (stages must be cumulative)",
                k + 1,
                k
            )));
        }
    }

    let stage_err = |k: usize, e: Error| Error::Fit {
        family: format!("stage {k}"),
        message: e.to_string(),
    };

    let mut outcomes: Vec<StageOutcome> = Vec::with_capacity(stages.len());

    let stage_seed = derive_seed(seed, 0);
    let catalog = ModelCatalog::moment_informed(&stages[0]).map_err(|e| stage_err(0, e))?;
    let fit0 = fit_model(&stages[0], &catalog, n_k, derive_seed(seed, data_salt(&stages[0])))
        .map_err(|e| stage_err(0, e))?;
    let p0 = fit0.density();
    let base0 = SampleSet::draw(&p0, n, derive_seed(stage_seed, 1));
    outcomes.push(StageOutcome {
        stage: 0,
        dataset_size: stages[0].len(),
        fit: fit0,
        samples: base0.clone(),
        strategy: None,
        update: None,
        candidate_ess: Some(n as f64),
        d1_change: 0.0,
    });

    // `base` always holds unweighted values following `materialized`.
    let mut base = base0;
    let mut materialized = p0.clone();
    let mut current = p0;

    for (k, data) in stages.iter().enumerate().skip(1) {
        let stage_seed = derive_seed(seed, k as u64);
        let catalog = ModelCatalog::moment_informed(data).map_err(|e| stage_err(k, e))?;
        let fit = fit_model(data, &catalog, n_k, derive_seed(seed, data_salt(data)))
            .map_err(|e| stage_err(k, e))?;
        let q = fit.density();
        let d1_change = partition::partition(&current, &q)?.d1;

        let (candidate, report) = strategies::reweight(&base, &materialized, &q)?;
        let candidate_ess = report.ess.or_else(|| raw_candidate_ess(&base, &materialized, &q));
        let take_reweight = report.feasible
            && report.ess.is_some_and(|e| e >= ess_threshold * n as f64);

        if take_reweight {
            outcomes.push(StageOutcome {
                stage: k,
                dataset_size: data.len(),
                fit,
                samples: candidate,
                strategy: Some(StrategyKind::Reweight),
                update: Some(report),
                candidate_ess,
                d1_change,
            });
        } else {
            let (updated, mreport) =
                strategies::mixed_update(&base, &materialized, &q, derive_seed(stage_seed, 2))?;
            base = updated.clone();
            materialized = q.clone();
            outcomes.push(StageOutcome {
                stage: k,
                dataset_size: data.len(),
                fit,
                samples: updated,
                strategy: Some(StrategyKind::Mixed),
                update: Some(mreport),
                candidate_ess,
                d1_change,
            });
        }
        current = q;
    }
    Ok(outcomes)
}

/// Salt derived from the dataset so identical stage datasets produce
/// identical fits (and identical-stage pipelines reweight with ESS = N).
fn data_salt(data: &[f64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &x in data {
        for b in x.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x1000_0000_01b3);
        }
    }
    h
}

fn raw_candidate_ess(base: &SampleSet, m: &Density, q: &Density) -> Option<f64> {
    let weights: Vec<f64> = base
        .values()
        .iter()
        .map(|&x| {
            let px = m.density_at(x);
            if px > 0.0 {
                q.density_at(x) / px
            } else {
                0.0
            }
        })
        .collect();
    strategies::ess(&weights).ok()
}

fn is_sub_multiset(small: &[f64], big: &[f64]) -> bool {
    let mut a = small.to_vec();
    let mut b = big.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let mut j = 0usize;
    for &x in &a {
        loop {
            if j >= b.len() {
                return false;
            }
            if b[j] == x {
                j += 1;
                break;
            }
            if b[j] > x {
                return false;
            }
            j += 1;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog_normal(mu: (f64, f64), sigma: (f64, f64)) -> ModelCatalog {
        ModelCatalog::new(vec![CatalogEntry {
            family: FitFamily::Normal,
            prior: ParamBox::new(vec![mu, sigma]).unwrap(),
            prior_prob: 1.0,
        }])
        .unwrap()
    }

    #[test]
    fn evidence_single_datum_matches_tensor_quadrature() {
        // Oracle: 400x400 midpoint tensor quadrature of the Normal likelihood
        // of a single observation x = 0 over mu in [-1,1], sigma in [0.5,2],
        // divided by the box volume.
        let (nm, ns) = (400usize, 400usize);
        let (mu_lo, mu_hi, s_lo, s_hi) = (-1.0, 1.0, 0.5, 2.0);
        let mut acc = 0.0;
        for i in 0..nm {
            let mu = mu_lo + (mu_hi - mu_lo) * (i as f64 + 0.5) / nm as f64;
            for j in 0..ns {
                let s = s_lo + (s_hi - s_lo) * (j as f64 + 0.5) / ns as f64;
                acc += (-0.5 * (mu / s) * (mu / s)).exp()
                    / (s * (2.0 * std::f64::consts::PI).sqrt());
            }
        }
        let oracle = acc * ((mu_hi - mu_lo) / nm as f64) * ((s_hi - s_lo) / ns as f64)
            / ((mu_hi - mu_lo) * (s_hi - s_lo));

        let cat = catalog_normal((mu_lo, mu_hi), (s_lo, s_hi));
        let ev = evidence(&[0.0], &cat.entries[0], 200_000, 7).unwrap();
        assert!(ev.estimate > 0.0 && ev.estimate.is_finite());
        assert!(!ev.underflowed);
        let gap = (ev.estimate - oracle).abs();
        assert!(
            gap <= 4.0 * ev.std_error + 1e-4,
            "MC {} vs quadrature {} (se {})",
            ev.estimate,
            oracle,
            ev.std_error
        );
    }

    #[test]
    fn evidence_rejects_small_nk_and_empty_box() {
        let cat = catalog_normal((-1.0, 1.0), (0.5, 2.0));
        assert!(evidence(&[0.0], &cat.entries[0], 50, 1).is_err());
        assert!(ParamBox::new(vec![(1.0, 1.0)]).is_err());
    }

    #[test]
    fn evidence_error_shrinks_with_nk() {
        let cat = catalog_normal((-1.0, 1.0), (0.5, 2.0));
        let data = vec![5.0, 5.0, 5.0];
        let e3 = evidence(&data, &cat.entries[0], 1_000, 1).unwrap();
        let e5 = evidence(&data, &cat.entries[0], 100_000, 1).unwrap();
        // 1/sqrt(n_k) scaling within a generous factor
        let expected = e3.std_error / 10.0;
        assert!(
            e5.std_error < expected * 3.0 && e5.std_error > expected / 3.0,
            "{} vs {}",
            e5.std_error,
            expected
        );
    }

    #[test]
    fn posteriors_normalize_and_handle_symmetry() {
        let e = CatalogEntry {
            family: FitFamily::Normal,
            prior: ParamBox::new(vec![(-1.0, 1.0), (0.5, 2.0)]).unwrap(),
            prior_prob: 0.5,
        };
        let cat = ModelCatalog::new(vec![e.clone(), e]).unwrap();
        let post = model_posteriors(&[0.1, -0.2, 0.3], &cat, 2_000, 3).unwrap();
        assert!((post.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!((post.probabilities[0] - 0.5).abs() < 1e-10);

        let single = ModelCatalog::new(vec![CatalogEntry {
            family: FitFamily::Normal,
            prior: ParamBox::new(vec![(-1.0, 1.0), (0.5, 2.0)]).unwrap(),
            prior_prob: 1.0,
        }])
        .unwrap();
        let post = model_posteriors(&[0.0], &single, 1_000, 1).unwrap();
        assert_eq!(post.probabilities, vec![1.0]);
    }

    #[test]
    fn posteriors_prefer_the_generating_family() {
        let d = Density::normal(0.0, 1.0).unwrap();
        let data = d.sample_n(10_000, 5);
        let cat = ModelCatalog::moment_informed_with(
            &data,
            &[FitFamily::Normal, FitFamily::Logistic],
            5.0,
        )
        .unwrap();
        let post = model_posteriors(&data, &cat, 20_000, 11).unwrap();
        assert!(post.probabilities[0] > 0.99, "normal posterior {}", post.probabilities[0]);
    }

    #[test]
    fn map_fit_matches_closed_form_ml_for_normal() {
        let data = vec![1.0, 2.0, 3.0];
        let cat = ModelCatalog::moment_informed_with(&data, &[FitFamily::Normal], 5.0).unwrap();
        let fit = map_fit(&data, FitFamily::Normal, &cat.entries[0].prior).unwrap();
        assert!((fit[0] - 2.0).abs() < 1e-6);
        assert!((fit[1] - (2.0f64 / 3.0).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn map_fit_degenerate_lognormal_hits_lower_box_bound() {
        let e = std::f64::consts::E;
        let data = vec![e, e, e];
        let cat = ModelCatalog::moment_informed_with(&data, &[FitFamily::Lognormal], 5.0).unwrap();
        let prior = &cat.entries[0].prior;
        let fit = map_fit(&data, FitFamily::Lognormal, prior).unwrap();
        assert!((fit[0] - 1.0).abs() < 1e-6, "log-mean {}", fit[0]);
        assert!(
            (fit[1] - prior.bounds[1].0).abs() <= prior.bounds[1].0 * 1e-6 + 1e-12,
            "log-sd {} should sit at the lower box bound {}",
            fit[1],
            prior.bounds[1].0
        );
    }

    #[test]
    fn map_fit_rejects_data_outside_support() {
        let data = vec![-1.0, 2.0];
        let err = FitFamily::Lognormal.moment_start(&data).unwrap_err();
        assert!(matches!(err, Error::DataOutsideSupport { .. }));
    }

    #[test]
    fn pipeline_identical_stages_all_reweight() {
        let d = Density::normal(10.0, 1.0).unwrap();
        let data = d.sample_n(60, 17);
        let stages = vec![data.clone(), data.clone(), data];
        let out = sequential_pipeline(&stages, 2_000, 0.9, 2_000, 23).unwrap();
        assert_eq!(out.len(), 3);
        for o in &out[1..] {
            assert_eq!(o.strategy, Some(StrategyKind::Reweight));
            let rep = o.update.as_ref().unwrap();
            assert_eq!(rep.n_added, 0);
            assert!(o.candidate_ess.unwrap() > 1_999.0);
            assert!(o.d1_change.abs() < 1e-9);
        }
    }

    #[test]
    fn pipeline_rejects_non_nested_stages() {
        let stages = vec![vec![1.0, 2.0], vec![1.0, 3.0, 4.0]];
        assert!(sequential_pipeline(&stages, 100, 0.9, 1_000, 1).is_err());
    }

    #[test]
    fn sub_multiset_checks() {
        assert!(is_sub_multiset(&[1.0, 2.0], &[2.0, 1.0, 3.0]));
        assert!(!is_sub_multiset(&[1.0, 1.0], &[1.0, 2.0]));
        assert!(is_sub_multiset(&[], &[1.0]));
    }
}
