//! Observation dataset ingestion: single-column CSV, optional header.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Read a single-column CSV of real observations. A non-numeric first line is
/// treated as a header and skipped; blank lines are ignored.
pub fn read_observations(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        match t.parse::<f64>() {
            Ok(v) if v.is_finite() => out.push(v),
            Ok(v) => return Err(Error::Csv(format!("{}: non-finite value {v} on line {}", path.display(), i + 1))),
            Err(_) if i == 0 => continue, // header
            Err(_) => {
                return Err(Error::Csv(format!(
                    "{}: cannot parse line {}: {t:?}",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Csv(format!("{}: no observations", path.display())));
    }
    Ok(out)
}

/// Write observations as a single-column CSV with a header.
pub fn write_observations(path: impl AsRef<Path>, header: &str, values: &[f64]) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "{header}")?;
    for v in values {
        writeln!(w, "{v}")?;
    }
    w.flush()?;
    Ok(())
}

/// Read `value,weight,...` rows from a sample-set CSV when only the weighted
/// values are needed (e.g. strength propagation input).
pub fn read_weighted_values(path: impl AsRef<Path>) -> Result<(Vec<f64>, Vec<f64>)> {
    let path = path.as_ref();
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut values = Vec::new();
    let mut weights = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || (i == 0 && t.starts_with("value")) {
            continue;
        }
        let mut parts = t.split(',');
        let v: f64 = parts
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Csv(format!("{}: bad value on line {}", path.display(), i + 1)))?;
        let w: f64 = match parts.next() {
            Some(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::Csv(format!("{}: bad weight on line {}", path.display(), i + 1)))?,
            None => 1.0,
        };
        values.push(v);
        weights.push(w);
    }
    if values.is_empty() {
        return Err(Error::Csv(format!("{}: no rows", path.display())));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::AllZeroWeights);
    }
    for w in &mut weights {
        *w /= total;
    }
    Ok((values, weights))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_with_and_without_header() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        std::fs::write(&a, "sigma0\n34.1\n35.2\n").unwrap();
        assert_eq!(read_observations(&a).unwrap(), vec![34.1, 35.2]);
        let b = dir.path().join("b.csv");
        std::fs::write(&b, "34.1\n35.2\n").unwrap();
        assert_eq!(read_observations(&b).unwrap(), vec![34.1, 35.2]);
    }

    #[test]
    fn rejects_garbage_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        std::fs::write(&p, "x\n1.0\noops\n").unwrap();
        assert!(read_observations(&p).is_err());
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("rt.csv");
        let vals = vec![1.25, 2.5e-3, 34.782];
        write_observations(&p, "sigma0", &vals).unwrap();
        assert_eq!(read_observations(&p).unwrap(), vals);
    }
}
