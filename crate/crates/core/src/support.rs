//! Support intervals with possibly infinite endpoints.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupportKind {
    Infinite,
    SemiInfinite,
    Bounded,
}

/// Interval on which a density is positive. Endpoints may be `-inf`/`inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupportInterval {
    pub lower: f64,
    pub upper: f64,
}

impl SupportInterval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || lower >= upper {
            return Err(Error::InvalidDensity(format!(
                "support requires lower < upper, got [{lower}, {upper}]"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub const fn real_line() -> Self {
        Self { lower: f64::NEG_INFINITY, upper: f64::INFINITY }
    }

    pub const fn positive_half_line() -> Self {
        Self { lower: 0.0, upper: f64::INFINITY }
    }

    pub const fn unit() -> Self {
        Self { lower: 0.0, upper: 1.0 }
    }

    pub fn kind(&self) -> SupportKind {
        match (self.lower.is_finite(), self.upper.is_finite()) {
            (true, true) => SupportKind::Bounded,
            (false, false) => SupportKind::Infinite,
            _ => SupportKind::SemiInfinite,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }

    /// Smallest interval covering both supports.
    pub fn hull(&self, other: &SupportInterval) -> SupportInterval {
        SupportInterval {
            lower: self.lower.min(other.lower),
            upper: self.upper.max(other.upper),
        }
    }

    /// Whether this interval is contained in `other` (as sets of reals).
    pub fn subset_of(&self, other: &SupportInterval) -> bool {
        self.lower >= other.lower && self.upper <= other.upper
    }
}
