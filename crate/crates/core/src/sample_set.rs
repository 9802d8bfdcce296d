//! Weighted sample sets with provenance tags and CSV persistence.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::density::Density;
use crate::error::{Error, Result};

/// Where a sample in an updated set came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Present in the input set and kept unconditionally.
    Original,
    /// Drawn from a correction density by an updating strategy.
    Augmented,
    /// Survived an acceptance/rejection filtering pass.
    Retained,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Original => "original",
            Provenance::Augmented => "augmented",
            Provenance::Retained => "retained",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(Provenance::Original),
            "augmented" => Ok(Provenance::Augmented),
            "retained" => Ok(Provenance::Retained),
            other => Err(Error::Csv(format!("unknown provenance tag {other:?}"))),
        }
    }
}

/// Values plus normalized weights plus per-sample provenance, together with
/// the density the set is asserted to follow (in the weighted sense) and its
/// seed lineage.
///
/// Invariants enforced at construction: equal lengths, nonnegative finite
/// weights normalized to sum 1 (within 1e-12), and every value carrying
/// positive weight lies inside the source support. Zero-weight values may sit
/// outside the support; reweighting onto a shrunken support produces exactly
/// that.
#[derive(Clone, Debug)]
pub struct SampleSet {
    values: Vec<f64>,
    weights: Vec<f64>,
    provenance: Vec<Provenance>,
    source: Density,
    seed: u64,
    lineage: Vec<String>,
}

impl SampleSet {
    /// Draw `n` fresh samples from `d`. Deterministic given `seed`.
    pub fn draw(d: &Density, n: usize, seed: u64) -> Self {
        let values = d.sample_n(n, seed);
        let w = if n == 0 { 0.0 } else { 1.0 / n as f64 };
        Self {
            values,
            weights: vec![w; n],
            provenance: vec![Provenance::Original; n],
            source: d.clone(),
            seed,
            lineage: vec![format!("draw(n={n}, seed={seed})")],
        }
    }

    /// Assemble a set from parts; weights are normalized to sum 1.
    pub fn from_parts(
        values: Vec<f64>,
        weights: Vec<f64>,
        provenance: Vec<Provenance>,
        source: Density,
        seed: u64,
        lineage: Vec<String>,
    ) -> Result<Self> {
        if values.len() != weights.len() || values.len() != provenance.len() {
            return Err(Error::InvalidSampleSet(format!(
                "length mismatch: {} values, {} weights, {} tags",
                values.len(),
                weights.len(),
                provenance.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidSampleSet("weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if !values.is_empty() && total <= 0.0 {
            return Err(Error::AllZeroWeights);
        }
        let sup = source.support();
        for (&x, &w) in values.iter().zip(&weights) {
            if !x.is_finite() {
                return Err(Error::InvalidSampleSet(format!("non-finite value {x}")));
            }
            if w > 0.0 && !sup.contains(x) {
                return Err(Error::InvalidSampleSet(format!(
                    "value {x} with positive weight lies outside the source support"
                )));
            }
        }
        // Already-normalized input is kept bit-identical so CSV round-trips
        // are exact.
        let weights = if values.is_empty() || (total - 1.0).abs() <= 1e-12 {
            weights
        } else {
            weights.iter().map(|w| w / total).collect()
        };
        Ok(Self { values, weights, provenance, source, seed, lineage })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Normalized weights (sum to 1).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    /// The density this set is asserted to follow, in the weighted sense.
    pub fn source(&self) -> &Density {
        &self.source
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn lineage(&self) -> &[String] {
        &self.lineage
    }

    /// Whether any weight deviates from uniform.
    pub fn is_weighted(&self) -> bool {
        if self.values.is_empty() {
            return false;
        }
        let u = 1.0 / self.values.len() as f64;
        self.weights.iter().any(|w| (w - u).abs() > 1e-12 * u)
    }

    /// Effective sample size of the current weights.
    pub fn ess(&self) -> Result<f64> {
        crate::strategies::ess(&self.weights)
    }

    /// Write `value,weight,provenance` CSV (header mandatory).
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = BufWriter::new(file);
        writeln!(w, "value,weight,provenance")?;
        for i in 0..self.values.len() {
            writeln!(w, "{},{},{}", self.values[i], self.weights[i], self.provenance[i].as_str())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Read a `value,weight,provenance` CSV written by [`Self::write_csv`].
    /// The caller supplies the density the stored set follows.
    pub fn read_csv(path: impl AsRef<Path>, source: Density, seed: u64) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)?;
        let reader = BufReader::new(file);
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Csv("empty sample CSV".into()))??;
        if header.trim() != "value,weight,provenance" {
            return Err(Error::Csv(format!(
                "expected header 'value,weight,provenance', got {header:?}"
            )));
        }
        let mut values = Vec::new();
        let mut weights = Vec::new();
        let mut tags = Vec::new();
        for (idx, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.splitn(3, ',');
            let err = |what: &str| Error::Csv(format!("line {}: {what}", idx + 2));
            let v: f64 = parts
                .next()
                .ok_or_else(|| err("missing value"))?
                .trim()
                .parse()
                .map_err(|_| err("bad value"))?;
            let w: f64 = parts
                .next()
                .ok_or_else(|| err("missing weight"))?
                .trim()
                .parse()
                .map_err(|_| err("bad weight"))?;
            let tag = Provenance::parse(parts.next().ok_or_else(|| err("missing provenance"))?.trim())?;
            values.push(v);
            weights.push(w);
            tags.push(tag);
        }
        let lineage = vec![format!("read_csv({})", path.display())];
        Self::from_parts(values, weights, tags, source, seed, lineage)
    }

    /// Internal constructor for strategy outputs; callers guarantee the
    /// invariants (weights already normalized or uniform).
    pub(crate) fn assembled(
        values: Vec<f64>,
        weights: Vec<f64>,
        provenance: Vec<Provenance>,
        source: Density,
        seed: u64,
        lineage: Vec<String>,
    ) -> Self {
        debug_assert_eq!(values.len(), weights.len());
        debug_assert_eq!(values.len(), provenance.len());
        Self { values, weights, provenance, source, seed, lineage }
    }

    pub(crate) fn push_lineage(&mut self, entry: String) {
        self.lineage.push(entry);
    }
}
