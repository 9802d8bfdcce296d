//! The four measure-change strategies.
//!
//! Given a sample set drawn from an original density `p` and an updated
//! density `q`, each strategy produces a set that follows `q` plus an
//! [`UpdateReport`]:
//!
//! * [`reweight`] - importance-sampling weights `w = q/p`, no new draws;
//! * [`augment`] - append draws from the correction density
//!   `q_c = (A q - p)/(A - 1)` with `A = sup p/q`, so the combined set
//!   follows `q`;
//! * [`filter`] - acceptance/rejection thinning with majorizer `c p`,
//!   `c = sup q/p`;
//! * [`mixed_update`] - augment where `q >= p`, filter where `q < p`; the
//!   added count scales with half the total variation distance and the
//!   expected rejected count equals it, so the set size is stable and no
//!   support restriction applies.
//!
//! Infeasibility (support violation, unbounded ratio, count blow-up) is a
//! report outcome rather than an error, so strategy selection and the CLI can
//! fall through to the mixed strategy.

use serde::{Deserialize, Serialize};

use crate::density::Density;
use crate::error::{Error, Result};
use crate::exec::indexed_map;
use crate::partition::{self, in_augment_region, max_ratio, RatioBound, RatioMode};
use crate::rng::{substream, Domain};
use crate::sample_set::{Provenance, SampleSet};
use rand::Rng;

/// Which update strategy a report describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    Reweight,
    Augment,
    Filter,
    Mixed,
}

/// How pure filtering chooses its majorizer constant `c = sup q/p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CMode {
    /// Scan-based supremum with tail analysis (default; grid-insensitive).
    AnalyticScan,
    /// Maximum of `q/p` over the realized input samples.
    SampleEmpirical,
}

/// Outcome record for one strategy application.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UpdateReport {
    pub strategy: StrategyKind,
    pub n_before: usize,
    pub n_after: usize,
    /// Effective sample size of the output weights (reweighting only).
    pub ess: Option<f64>,
    pub n_added: usize,
    pub n_rejected: usize,
    /// For an infeasible augment whose required count exceeded the cap.
    pub n_required: Option<u64>,
    /// Total variation distance between `p` and `q`.
    pub d1: f64,
    pub feasible: bool,
    pub reason: Option<String>,
    pub seed: u64,
}

impl UpdateReport {
    fn infeasible(strategy: StrategyKind, n: usize, d1: f64, seed: u64, reason: String) -> Self {
        Self {
            strategy,
            n_before: n,
            n_after: n,
            ess: None,
            n_added: 0,
            n_rejected: 0,
            n_required: None,
            d1,
            feasible: false,
            reason: Some(reason),
            seed,
        }
    }
}

/// Mass tolerance for support feasibility: the offending density may carry at
/// most this much probability outside the other support. Separates negligible
/// boundary leakage (e.g. a near-positive normal with ~1e-4 mass below zero)
/// from genuine support growth (percent-level mass), which importance
/// sampling cannot represent.
pub const SUPPORT_MASS_TOL: f64 = 1e-3;

/// Cap on the augmenting count as a multiple of the input size.
pub const AUGMENT_CAP_FACTOR: f64 = 100.0;

fn mass_outside(d: &Density, container: &Density) -> f64 {
    let s = container.support();
    let below = if s.lower.is_finite() { d.cdf(s.lower) } else { 0.0 };
    let above = if s.upper.is_finite() { 1.0 - d.cdf(s.upper) } else { 0.0 };
    below + above
}

/// Weighted Monte Carlo estimate of `E_q[g(X)]` with its standard error.
pub fn mc_estimate<F: Fn(f64) -> f64>(s: &SampleSet, g: F) -> Result<(f64, f64)> {
    if s.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let mean: f64 = s
        .values()
        .iter()
        .zip(s.weights())
        .map(|(&x, &w)| w * g(x))
        .sum();
    let var: f64 = s
        .values()
        .iter()
        .zip(s.weights())
        .map(|(&x, &w)| {
            let dev = g(x) - mean;
            w * w * dev * dev
        })
        .sum();
    Ok((mean, var.sqrt()))
}

/// Effective sample size `(sum w)^2 / sum w^2`.
///
/// Scale-invariant; equals the count exactly when all weights are equal and
/// is at least 1 otherwise.
pub fn ess(weights: &[f64]) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidSampleSet("weights must be finite and nonnegative".into()));
    }
    let max = weights.iter().copied().fold(0.0f64, f64::max);
    if max == 0.0 {
        return Err(Error::AllZeroWeights);
    }
    // Normalizing by the max makes the all-equal case exact (sums of 1.0).
    let s: f64 = weights.iter().map(|w| w / max).sum();
    let s2: f64 = weights.iter().map(|w| (w / max) * (w / max)).sum();
    Ok(s * s / s2)
}

/// Importance-sampling reweighting: keep the values, set weights `w = q/p`.
///
/// Requires (up to [`SUPPORT_MASS_TOL`]) that `q` carries no mass outside the
/// support of `p`; otherwise the weighted set cannot represent `q` and an
/// infeasible report is returned. Existing weights are multiplied through,
/// so chained reweights compose.
pub fn reweight(s: &SampleSet, p: &Density, q: &Density) -> Result<(SampleSet, UpdateReport)> {
    if s.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let d1 = partition::partition(p, q)?.d1;
    let n = s.len();
    let seed = s.seed();

    let outside = mass_outside(q, p);
    if outside > SUPPORT_MASS_TOL {
        let report = UpdateReport::infeasible(
            StrategyKind::Reweight,
            n,
            d1,
            seed,
            format!("support: q carries mass {outside:.3e} outside S_p"),
        );
        return Ok((s.clone(), report));
    }

    let mut zero_p_positive_q = false;
    let mut weights = Vec::with_capacity(n);
    for (&x, &w_old) in s.values().iter().zip(s.weights()) {
        let px = p.density_at(x);
        let qx = q.density_at(x);
        if px <= 0.0 {
            if qx > 0.0 {
                zero_p_positive_q = true;
                break;
            }
            weights.push(0.0);
        } else {
            // Grouped so that p == q gives a ratio of exactly 1 and the
            // all-weights-equal ESS identity holds in floating point.
            weights.push(w_old * (qx / px));
        }
    }
    if zero_p_positive_q {
        let report = UpdateReport::infeasible(
            StrategyKind::Reweight,
            n,
            d1,
            seed,
            "support: sample with p(x) = 0 but q(x) > 0".into(),
        );
        return Ok((s.clone(), report));
    }
    if weights.iter().all(|w| *w == 0.0) {
        let report = UpdateReport::infeasible(
            StrategyKind::Reweight,
            n,
            d1,
            seed,
            "all importance weights are zero".into(),
        );
        return Ok((s.clone(), report));
    }

    let e = ess(&weights)?;
    let mut out = SampleSet::from_parts(
        s.values().to_vec(),
        weights,
        s.provenance().to_vec(),
        q.clone(),
        seed,
        s.lineage().to_vec(),
    )?;
    out.push_lineage(format!("reweight({p} -> {q})"));

    let report = UpdateReport {
        strategy: StrategyKind::Reweight,
        n_before: n,
        n_after: n,
        ess: Some(e),
        n_added: 0,
        n_rejected: 0,
        n_required: None,
        d1,
        feasible: true,
        reason: None,
        seed,
    };
    Ok((out, report))
}

/// Sample augmenting: append `round((A - 1) N)` draws from the correction
/// density `q_c(x) = (A q(x) - p(x)) / (A - 1)`, `A = sup p/q`, so the
/// combined set follows `q`.
///
/// `q_c` is sampled by acceptance/rejection with proposal `q` and acceptance
/// probability `1 - p(x)/(A q(x))`; the envelope constant is exactly `A/(A-1)`
/// so no tuning is involved. Requires `S_p` inside `S_q` and finite `A`.
pub fn augment(
    s: &SampleSet,
    p: &Density,
    q: &Density,
    seed: u64,
) -> Result<(SampleSet, UpdateReport)> {
    if s.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let d1 = partition::partition(p, q)?.d1;
    let n = s.len();

    let outside = mass_outside(p, q);
    if outside > SUPPORT_MASS_TOL {
        let report = UpdateReport::infeasible(
            StrategyKind::Augment,
            n,
            d1,
            seed,
            format!("support: p carries mass {outside:.3e} outside S_q"),
        );
        return Ok((s.clone(), report));
    }
    let a = match max_ratio(p, q, RatioMode::AnalyticScan) {
        RatioBound::Finite(a) => a.max(1.0),
        RatioBound::Unbounded => {
            let report = UpdateReport::infeasible(
                StrategyKind::Augment,
                n,
                d1,
                seed,
                "unbounded ratio p/q".into(),
            );
            return Ok((s.clone(), report));
        }
    };

    let required = ((a - 1.0) * n as f64).round_ties_even();
    if required > AUGMENT_CAP_FACTOR * n as f64 {
        let mut report = UpdateReport::infeasible(
            StrategyKind::Augment,
            n,
            d1,
            seed,
            format!(
                "required N_a = {required:.0} exceeds cap {}",
                (AUGMENT_CAP_FACTOR * n as f64) as u64
            ),
        );
        report.n_required = Some(required as u64);
        return Ok((s.clone(), report));
    }
    let n_add = required as usize;

    let added = indexed_map(n_add, |j| {
        let mut rng = substream(seed, Domain::AugmentDraw, j as u64);
        for _ in 0..1_000_000 {
            let x = q.sample(&mut rng);
            let qx = q.density_at(x);
            if qx <= 0.0 {
                continue;
            }
            let accept = 1.0 - p.density_at(x) / (a * qx);
            let u: f64 = rng.random();
            if u < accept {
                return x;
            }
        }
        panic!("augment A/R failed to accept after 1e6 proposals (A barely above 1?)");
    });

    let mut values = s.values().to_vec();
    values.extend_from_slice(&added);
    let total = values.len();
    let mut provenance = s.provenance().to_vec();
    provenance.extend(std::iter::repeat_n(Provenance::Augmented, n_add));

    let mut out = SampleSet::assembled(
        values,
        vec![1.0 / total as f64; total],
        provenance,
        q.clone(),
        seed,
        s.lineage().to_vec(),
    );
    out.push_lineage(format!("augment({p} -> {q}, n_added={n_add}, seed={seed})"));

    let report = UpdateReport {
        strategy: StrategyKind::Augment,
        n_before: n,
        n_after: total,
        ess: None,
        n_added: n_add,
        n_rejected: 0,
        n_required: None,
        d1,
        feasible: true,
        reason: None,
        seed,
    };
    Ok((out, report))
}

/// Sample filtering: keep each sample independently with probability
/// `q(x)/(c p(x))`, `c = sup q/p`, so the retained set follows `q`.
///
/// Expected retention is `N/c`. Requires `S_q` inside `S_p` and finite `c`.
pub fn filter(
    s: &SampleSet,
    p: &Density,
    q: &Density,
    seed: u64,
    c_mode: CMode,
) -> Result<(SampleSet, UpdateReport)> {
    if s.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let d1 = partition::partition(p, q)?.d1;
    let n = s.len();

    let outside = mass_outside(q, p);
    if outside > SUPPORT_MASS_TOL {
        let report = UpdateReport::infeasible(
            StrategyKind::Filter,
            n,
            d1,
            seed,
            format!("support: q carries mass {outside:.3e} outside S_p"),
        );
        return Ok((s.clone(), report));
    }
    let mode = match c_mode {
        CMode::AnalyticScan => RatioMode::AnalyticScan,
        CMode::SampleEmpirical => RatioMode::SampleEmpirical(s.values()),
    };
    let c = match max_ratio(q, p, mode) {
        RatioBound::Finite(c) if c > 0.0 => c,
        RatioBound::Finite(_) => {
            let report = UpdateReport::infeasible(
                StrategyKind::Filter,
                n,
                d1,
                seed,
                "ratio q/p vanishes on every sample".into(),
            );
            return Ok((s.clone(), report));
        }
        RatioBound::Unbounded => {
            let report = UpdateReport::infeasible(
                StrategyKind::Filter,
                n,
                d1,
                seed,
                "unbounded ratio q/p".into(),
            );
            return Ok((s.clone(), report));
        }
    };

    let values = s.values();
    let keep = indexed_map(n, |i| {
        let x = values[i];
        let px = p.density_at(x);
        let accept = if px > 0.0 {
            (q.density_at(x) / (c * px)).min(1.0)
        } else {
            0.0
        };
        let mut rng = substream(seed, Domain::FilterAccept, i as u64);
        let u: f64 = rng.random();
        u < accept
    });

    let kept: Vec<f64> = values
        .iter()
        .zip(&keep)
        .filter_map(|(&x, &k)| k.then_some(x))
        .collect();
    let n_after = kept.len();
    let n_rejected = n - n_after;

    let mut out = SampleSet::assembled(
        kept,
        vec![1.0 / n_after.max(1) as f64; n_after],
        vec![Provenance::Retained; n_after],
        q.clone(),
        seed,
        s.lineage().to_vec(),
    );
    out.push_lineage(format!("filter({p} -> {q}, c={c:.6}, seed={seed})"));

    let report = UpdateReport {
        strategy: StrategyKind::Filter,
        n_before: n,
        n_after,
        ess: None,
        n_added: 0,
        n_rejected,
        n_required: None,
        d1,
        feasible: true,
        reason: None,
        seed,
    };
    Ok((out, report))
}

/// Mixed augmenting-filtering update.
///
/// Samples in the augmenting region `S+ = {q >= p}` are kept unconditionally;
/// samples in `S- = {q < p}` are kept with probability `q(x)/p(x)` (the
/// acceptance ratio against the majorizer `(pi_p-/pi_q-) p_-`); and
/// `round((pi_q+ - pi_p+) N)` new draws from the correction density
/// `q_c(x) ~ q(x) - p(x)` on `S+` are appended, sampled by A/R with proposal
/// `q` restricted to `S+` and acceptance `1 - p(x)/q(x)`.
///
/// The added count is deterministic (rounded expectation) so reports are
/// reproducible; rejections stay per-sample Bernoulli, which is what the A/R
/// correctness argument needs. In expectation the two balance, the set size
/// can never more than double, and no support restriction applies.
pub fn mixed_update(
    s: &SampleSet,
    p: &Density,
    q: &Density,
    seed: u64,
) -> Result<(SampleSet, UpdateReport)> {
    let part = partition::partition(p, q)?;
    let n = s.len();
    let n_add = ((part.pi_q_plus - part.pi_p_plus).max(0.0) * n as f64).round_ties_even() as usize;

    // Filtering pass over S-.
    let values = s.values();
    let keep = indexed_map(n, |i| {
        let x = values[i];
        if in_augment_region(p, q, x) {
            return (true, true); // (keep, was in S+)
        }
        let px = p.density_at(x);
        let accept = if px > 0.0 { (q.density_at(x) / px).min(1.0) } else { 0.0 };
        debug_assert!(
            px <= 0.0 || q.density_at(x) / px <= 1.0 + 1e-9,
            "acceptance ratio above 1 inside S-"
        );
        let mut rng = substream(seed, Domain::MixedFilter, i as u64);
        let u: f64 = rng.random();
        (u < accept, false)
    });

    // Augmenting pass: draws from q_c on S+ via A/R. The proposal is q
    // restricted to S+ by draw-and-discard, which is exact.
    let added = indexed_map(n_add, |j| {
        let mut rng = substream(seed, Domain::MixedAugment, j as u64);
        for _ in 0..10_000_000 {
            let x = q.sample(&mut rng);
            if !in_augment_region(p, q, x) {
                continue;
            }
            let qx = q.density_at(x);
            if qx <= 0.0 {
                continue;
            }
            let accept = 1.0 - p.density_at(x) / qx;
            let u: f64 = rng.random();
            if u < accept {
                return x;
            }
        }
        panic!("mixed A/R failed to accept after 1e7 proposals (d1 vanishingly small?)");
    });

    let mut out_values = Vec::with_capacity(n + n_add);
    let mut provenance = Vec::with_capacity(n + n_add);
    let mut n_rejected = 0usize;
    for (i, (&x, &(kept, in_plus))) in values.iter().zip(&keep).enumerate() {
        let _ = i;
        if kept {
            out_values.push(x);
            provenance.push(if in_plus {
                s.provenance()[i]
            } else {
                Provenance::Retained
            });
        } else {
            n_rejected += 1;
        }
    }
    out_values.extend_from_slice(&added);
    provenance.extend(std::iter::repeat_n(Provenance::Augmented, n_add));

    let total = out_values.len();
    let mut out = SampleSet::assembled(
        out_values,
        vec![1.0 / total.max(1) as f64; total],
        provenance,
        q.clone(),
        seed,
        s.lineage().to_vec(),
    );
    out.push_lineage(format!("mixed({p} -> {q}, n_added={n_add}, seed={seed})"));

    let report = UpdateReport {
        strategy: StrategyKind::Mixed,
        n_before: n,
        n_after: total,
        ess: None,
        n_added: n_add,
        n_rejected,
        n_required: None,
        d1: part.d1,
        feasible: true,
        reason: None,
        seed,
    };
    Ok((out, report))
}

/// The selection policy: reweight when it is feasible and keeps the
/// effective sample size above `threshold * N`, otherwise use the mixed
/// strategy. Pure augmenting and pure filtering are never auto-selected
/// (inefficient by construction) but remain directly callable.
pub fn choose_strategy(
    s: &SampleSet,
    p: &Density,
    q: &Density,
    ess_fraction_threshold: f64,
) -> Result<StrategyKind> {
    if !(ess_fraction_threshold > 0.0 && ess_fraction_threshold <= 1.0) {
        return Err(Error::InvalidSampleSet(format!(
            "ess threshold must lie in (0, 1], got {ess_fraction_threshold}"
        )));
    }
    let (_, report) = reweight(s, p, q)?;
    let ok = report.feasible
        && report.ess.is_some_and(|e| e >= ess_fraction_threshold * s.len() as f64);
    Ok(if ok { StrategyKind::Reweight } else { StrategyKind::Mixed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn normal(m: f64, s: f64) -> Density {
        Density::normal(m, s).unwrap()
    }

    #[test]
    fn mc_estimate_basics() {
        let d = normal(0.0, 1.0);
        let s = SampleSet::from_parts(
            vec![1.0, 2.0, 3.0],
            vec![1.0, 1.0, 1.0],
            vec![Provenance::Original; 3],
            d.clone(),
            0,
            vec![],
        )
        .unwrap();
        let (m, _) = mc_estimate(&s, |x| x).unwrap();
        assert!((m - 2.0).abs() < 1e-12);

        let s = SampleSet::from_parts(
            vec![5.0, 9.0, 9.0],
            vec![1.0, 0.0, 0.0],
            vec![Provenance::Original; 3],
            d,
            0,
            vec![],
        )
        .unwrap();
        let (m, se) = mc_estimate(&s, |x| x).unwrap();
        assert!((m - 5.0).abs() < 1e-12);
        assert!(se.abs() < 1e-12);
    }

    #[test]
    fn mc_estimate_recovers_known_mean() {
        let d = normal(10.0, 1.0);
        let s = SampleSet::draw(&d, 10_000, 3);
        let (m, se) = mc_estimate(&s, |x| x).unwrap();
        assert!((m - 10.0).abs() < 0.03, "mean {m} (se {se})");
    }

    #[test]
    fn ess_identities() {
        assert!((ess(&[1.0; 4]).unwrap() - 4.0).abs() == 0.0);
        assert!((ess(&[1.0, 0.0, 0.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((ess(&[2.0, 1.0, 1.0]).unwrap() - 16.0 / 6.0).abs() < 1e-12);
        assert!(ess(&[0.0, 0.0]).is_err());
        assert!(ess(&[]).is_err());
    }

    #[test]
    fn reweight_identity_gives_full_ess() {
        let p = normal(10.0, 1.0);
        let s = SampleSet::draw(&p, 5_000, 1);
        let (out, report) = reweight(&s, &p, &p).unwrap();
        assert!(report.feasible);
        assert_eq!(report.ess.unwrap(), 5_000.0);
        assert!(!out.is_weighted());
    }

    #[test]
    fn reweight_support_violation_is_infeasible_not_error() {
        let p = Density::beta(4.0, 2.0).unwrap();
        let q = Density::lognormal(-0.44, 0.2627).unwrap();
        let s = SampleSet::draw(&p, 100, 1);
        let (_, report) = reweight(&s, &p, &q).unwrap();
        assert!(!report.feasible);
        assert!(report.reason.as_deref().unwrap().contains("support"));
    }

    #[test]
    fn augment_identity_is_noop() {
        let p = normal(10.0, 1.0);
        let s = SampleSet::draw(&p, 1_000, 1);
        let (out, report) = augment(&s, &p, &p, 2).unwrap();
        assert!(report.feasible);
        assert_eq!(report.n_added, 0);
        assert_eq!(out.len(), 1_000);
    }

    #[test]
    fn augment_unbounded_ratio_is_infeasible() {
        let p = Density::beta(4.0, 2.0).unwrap();
        let q = Density::lognormal(-0.44, 0.2627).unwrap();
        let s = SampleSet::draw(&p, 500, 1);
        let (_, report) = augment(&s, &p, &q, 3).unwrap();
        assert!(!report.feasible);
        assert!(report.reason.as_deref().unwrap().contains("unbounded"));
    }

    #[test]
    fn filter_identity_keeps_everything() {
        let p = normal(10.0, 1.0);
        let s = SampleSet::draw(&p, 2_000, 1);
        let (out, report) = filter(&s, &p, &p, 4, CMode::AnalyticScan).unwrap();
        assert!(report.feasible);
        assert_eq!(report.n_rejected, 0);
        assert_eq!(out.len(), 2_000);
    }

    #[test]
    fn filter_narrower_target_halves_the_set() {
        let p = normal(10.0, 1.0);
        let q = normal(10.0, 0.5);
        let s = SampleSet::draw(&p, 10_000, 11);
        let (out, report) = filter(&s, &p, &q, 11, CMode::AnalyticScan).unwrap();
        assert!(report.feasible);
        assert!(
            (out.len() as f64 - 5_000.0).abs() < 250.0,
            "retained {} of 10000 (c = 2)",
            out.len()
        );
        assert!(out.provenance().iter().all(|t| *t == Provenance::Retained));
    }

    #[test]
    fn mixed_identity_is_noop() {
        let p = normal(10.0, 1.0);
        let s = SampleSet::draw(&p, 3_000, 1);
        let (out, report) = mixed_update(&s, &p, &p, 5).unwrap();
        assert_eq!(report.n_added, 0);
        assert_eq!(report.n_rejected, 0);
        assert_eq!(out.len(), 3_000);
    }

    #[test]
    fn mixed_count_law_is_deterministic() {
        let p = normal(10.0, 1.0);
        let q = normal(11.0, 1.0);
        let s = SampleSet::draw(&p, 10_000, 21);
        let (out, report) = mixed_update(&s, &p, &q, 22).unwrap();
        // n_added = round(d1 N / 2) exactly, and never more than doubles.
        let law = (report.d1 * 10_000.0 / 2.0).round_ties_even() as usize;
        assert_eq!(report.n_added, law);
        assert!(report.n_added <= 10_000);
        assert_eq!(report.n_after, report.n_before + report.n_added - report.n_rejected);
        // closed form: 10^4 (2 Phi(1/2) - 1) = 3829
        assert!((report.n_added as isize - 3829).abs() <= 1, "n_added {}", report.n_added);
        // rejected count is binomial around the same number
        assert!(
            (report.n_rejected as f64 - 3829.0).abs() < 250.0,
            "rejected {}",
            report.n_rejected
        );
        // provenance conservation: original and retained values came from input
        let inputs: std::collections::BTreeSet<u64> =
            s.values().iter().map(|v| v.to_bits()).collect();
        for (v, tag) in out.values().iter().zip(out.provenance()) {
            if *tag != Provenance::Augmented {
                assert!(inputs.contains(&v.to_bits()));
            }
        }
    }

    #[test]
    fn mixed_handles_support_change_both_ways() {
        let beta = Density::beta(4.0, 2.0).unwrap();
        let ln = Density::lognormal(-0.44, 0.2627).unwrap();
        let s = SampleSet::draw(&ln, 10_000, 31);
        let (out, report) = mixed_update(&s, &ln, &beta, 32).unwrap();
        assert!(report.feasible);
        assert!(out.values().iter().all(|&x| (0.0..=1.0).contains(&x)));
        let s2 = SampleSet::draw(&beta, 10_000, 33);
        let (out2, report2) = mixed_update(&s2, &beta, &ln, 34).unwrap();
        assert!(report2.feasible);
        assert!(out2.len() > 9_000);
    }

    #[test]
    fn strategy_selection_follows_the_ess_policy() {
        let p = normal(10.0, 1.0);
        let s = SampleSet::draw(&p, 10_000, 41);
        // small shift: ESS ~ 9608 > 9000
        let q1 = normal(10.2, 1.0);
        assert_eq!(choose_strategy(&s, &p, &q1, 0.9).unwrap(), StrategyKind::Reweight);
        // large shift: ESS ~ 3700 < 9000
        let q2 = normal(11.0, 1.0);
        assert_eq!(choose_strategy(&s, &p, &q2, 0.9).unwrap(), StrategyKind::Mixed);
        // identity: ESS = N
        assert_eq!(choose_strategy(&s, &p, &p, 0.9).unwrap(), StrategyKind::Reweight);
        // infeasible reweight falls through to mixed
        let beta = Density::beta(4.0, 2.0).unwrap();
        let sb = SampleSet::draw(&beta, 1_000, 42);
        let qn = normal(0.667, 0.0317f64.sqrt());
        assert_eq!(choose_strategy(&sb, &beta, &qn, 0.9).unwrap(), StrategyKind::Mixed);
        assert!(choose_strategy(&s, &p, &q1, 1.5).is_err());
    }

    #[test]
    fn reports_serialize_with_all_fields() {
        let p = normal(10.0, 1.0);
        let s = SampleSet::draw(&p, 100, 1);
        let (_, report) = reweight(&s, &p, &p).unwrap();
        let js = serde_json::to_value(&report).unwrap();
        for key in [
            "strategy", "n_before", "n_after", "ess", "n_added", "n_rejected", "d1", "feasible",
            "reason", "seed",
        ] {
            assert!(js.get(key).is_some(), "missing {key}");
        }
        assert_eq!(js["strategy"], "reweight");
    }
}
