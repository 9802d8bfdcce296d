//! Parametric one-dimensional densities.
//!
//! Every family exposes a pdf/log-pdf pair, a closed-form or
//! special-function CDF, an exact quantile-based sampler, and its declared
//! support. Finite mixtures are sampled by the composition method (pick a
//! component with its mixture weight, then draw from it).
//!
//! Parameter conventions:
//!
//! | family       | params                                   |
//! |--------------|------------------------------------------|
//! | Normal       | mean, standard deviation                 |
//! | Lognormal    | mean of ln X, standard deviation of ln X |
//! | Gamma        | shape k, scale theta (mean = k*theta)    |
//! | Beta         | alpha, beta on [0, 1]                    |
//! | Weibull      | shape k, scale lambda                    |
//! | Logistic     | location, scale                          |
//! | Loglogistic  | shape beta, scale alpha                  |
//! | Nakagami     | shape m >= 1/2, spread Omega = E[X^2]    |

use rand::Rng;
use statrs::distribution::ContinuousCDF;
use statrs::function::beta::{beta_reg, ln_beta};
use statrs::function::erf::{erfc, erfc_inv};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::error::{Error, Result};
use crate::exec::indexed_map;
use crate::rng::{substream, Domain};
use crate::support::SupportInterval;

const LN_2PI: f64 = 1.8378770664093453; // ln(2*pi)

/// A mixture component: nonnegative weight plus child density.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub weight: f64,
    pub density: Density,
}

/// A parametric 1-D probability density. Immutable after construction and
/// safe to share across threads.
#[derive(Clone, Debug, PartialEq)]
pub enum Density {
    Normal { mean: f64, sd: f64 },
    Lognormal { log_mean: f64, log_sd: f64 },
    Gamma { shape: f64, scale: f64 },
    Beta { alpha: f64, beta: f64 },
    Weibull { shape: f64, scale: f64 },
    Logistic { location: f64, scale: f64 },
    Loglogistic { shape: f64, scale: f64 },
    Nakagami { shape: f64, spread: f64 },
    Mixture(Vec<Component>),
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidDensity(msg()))
    }
}

impl Density {
    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        require(mean.is_finite() && sd.is_finite() && sd > 0.0, || {
            format!("Normal requires finite mean and sd > 0, got ({mean}, {sd})")
        })?;
        Ok(Self::Normal { mean, sd })
    }

    pub fn lognormal(log_mean: f64, log_sd: f64) -> Result<Self> {
        require(log_mean.is_finite() && log_sd.is_finite() && log_sd > 0.0, || {
            format!("Lognormal requires finite log-mean and log-sd > 0, got ({log_mean}, {log_sd})")
        })?;
        Ok(Self::Lognormal { log_mean, log_sd })
    }

    pub fn gamma(shape: f64, scale: f64) -> Result<Self> {
        require(shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite(), || {
            format!("Gamma requires shape > 0 and scale > 0, got ({shape}, {scale})")
        })?;
        Ok(Self::Gamma { shape, scale })
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        require(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite(), || {
            format!("Beta requires alpha > 0 and beta > 0, got ({alpha}, {beta})")
        })?;
        Ok(Self::Beta { alpha, beta })
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        require(shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite(), || {
            format!("Weibull requires shape > 0 and scale > 0, got ({shape}, {scale})")
        })?;
        Ok(Self::Weibull { shape, scale })
    }

    pub fn logistic(location: f64, scale: f64) -> Result<Self> {
        require(location.is_finite() && scale.is_finite() && scale > 0.0, || {
            format!("Logistic requires finite location and scale > 0, got ({location}, {scale})")
        })?;
        Ok(Self::Logistic { location, scale })
    }

    pub fn loglogistic(shape: f64, scale: f64) -> Result<Self> {
        require(shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite(), || {
            format!("Loglogistic requires shape > 0 and scale > 0, got ({shape}, {scale})")
        })?;
        Ok(Self::Loglogistic { shape, scale })
    }

    pub fn nakagami(shape: f64, spread: f64) -> Result<Self> {
        require(shape >= 0.5 && spread > 0.0 && shape.is_finite() && spread.is_finite(), || {
            format!("Nakagami requires shape >= 0.5 and spread > 0, got ({shape}, {spread})")
        })?;
        Ok(Self::Nakagami { shape, spread })
    }

    /// Finite mixture from `(weight, density)` pairs. Weights must be
    /// nonnegative and sum to 1 within 1e-12.
    pub fn mixture(components: Vec<(f64, Density)>) -> Result<Self> {
        require(!components.is_empty(), || "mixture needs at least one component".into())?;
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        require(
            components.iter().all(|(w, _)| *w >= 0.0 && w.is_finite()),
            || "mixture weights must be nonnegative".into(),
        )?;
        require((total - 1.0).abs() <= 1e-12, || {
            format!("mixture weights must sum to 1 within 1e-12, got {total}")
        })?;
        Ok(Self::Mixture(
            components
                .into_iter()
                .map(|(weight, density)| Component { weight, density })
                .collect(),
        ))
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Self::Normal { .. } => "Normal",
            Self::Lognormal { .. } => "Lognormal",
            Self::Gamma { .. } => "Gamma",
            Self::Beta { .. } => "Beta",
            Self::Weibull { .. } => "Weibull",
            Self::Logistic { .. } => "Logistic",
            Self::Loglogistic { .. } => "Loglogistic",
            Self::Nakagami { .. } => "Nakagami",
            Self::Mixture(_) => "FiniteMixture",
        }
    }

    pub fn support(&self) -> SupportInterval {
        match self {
            Self::Normal { .. } | Self::Logistic { .. } => SupportInterval::real_line(),
            Self::Lognormal { .. }
            | Self::Gamma { .. }
            | Self::Weibull { .. }
            | Self::Loglogistic { .. }
            | Self::Nakagami { .. } => SupportInterval::positive_half_line(),
            Self::Beta { .. } => SupportInterval::unit(),
            Self::Mixture(cs) => {
                let mut hull = cs[0].density.support();
                for c in &cs[1..] {
                    hull = hull.hull(&c.density.support());
                }
                hull
            }
        }
    }

    /// Density value at `x`. Errors on non-finite `x`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::NonFinite("pdf"));
        }
        Ok(self.density_at(x))
    }

    /// Natural log of the density at `x`. Errors on non-finite `x`.
    pub fn ln_pdf(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::NonFinite("ln_pdf"));
        }
        Ok(self.ln_density_at(x))
    }

    /// Total pdf evaluation: 0 outside the support, no input validation.
    pub(crate) fn density_at(&self, x: f64) -> f64 {
        match self {
            Self::Mixture(cs) => cs.iter().map(|c| c.weight * c.density.density_at(x)).sum(),
            _ => {
                let l = self.ln_density_at(x);
                if l == f64::NEG_INFINITY {
                    0.0
                } else {
                    l.exp()
                }
            }
        }
    }

    /// Total log-pdf evaluation: `-inf` outside the support.
    pub(crate) fn ln_density_at(&self, x: f64) -> f64 {
        match *self {
            Self::Normal { mean, sd } => {
                let z = (x - mean) / sd;
                -0.5 * z * z - sd.ln() - 0.5 * LN_2PI
            }
            Self::Lognormal { log_mean, log_sd } => {
                if x <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                let lx = x.ln();
                let z = (lx - log_mean) / log_sd;
                -0.5 * z * z - lx - log_sd.ln() - 0.5 * LN_2PI
            }
            Self::Gamma { shape, scale } => {
                if x < 0.0 {
                    return f64::NEG_INFINITY;
                }
                if x == 0.0 {
                    return match shape {
                        k if k > 1.0 => f64::NEG_INFINITY,
                        k if k == 1.0 => -scale.ln(),
                        _ => f64::INFINITY,
                    };
                }
                (shape - 1.0) * x.ln() - x / scale - ln_gamma(shape) - shape * scale.ln()
            }
            Self::Beta { alpha, beta } => {
                if !(0.0..=1.0).contains(&x) {
                    return f64::NEG_INFINITY;
                }
                if x == 0.0 {
                    return match alpha {
                        a if a > 1.0 => f64::NEG_INFINITY,
                        a if a == 1.0 => -ln_beta(alpha, beta),
                        _ => f64::INFINITY,
                    };
                }
                if x == 1.0 {
                    return match beta {
                        b if b > 1.0 => f64::NEG_INFINITY,
                        b if b == 1.0 => -ln_beta(alpha, beta),
                        _ => f64::INFINITY,
                    };
                }
                (alpha - 1.0) * x.ln() + (beta - 1.0) * (-x).ln_1p() - ln_beta(alpha, beta)
            }
            Self::Weibull { shape, scale } => {
                if x < 0.0 {
                    return f64::NEG_INFINITY;
                }
                if x == 0.0 {
                    return match shape {
                        k if k > 1.0 => f64::NEG_INFINITY,
                        k if k == 1.0 => -scale.ln(),
                        _ => f64::INFINITY,
                    };
                }
                let t = x / scale;
                shape.ln() - scale.ln() + (shape - 1.0) * t.ln() - t.powf(shape)
            }
            Self::Logistic { location, scale } => {
                let z = ((x - location) / scale).abs();
                -z - scale.ln() - 2.0 * (-z).exp().ln_1p()
            }
            Self::Loglogistic { shape, scale } => {
                if x <= 0.0 {
                    return if x < 0.0 {
                        f64::NEG_INFINITY
                    } else {
                        match shape {
                            b if b > 1.0 => f64::NEG_INFINITY,
                            b if b == 1.0 => -scale.ln(),
                            _ => f64::INFINITY,
                        }
                    };
                }
                let t = shape * (x.ln() - scale.ln());
                // ln pdf = ln(b/a) + (b-1) ln(x/a) - 2 ln(1 + (x/a)^b), stable in t
                let soft = if t > 0.0 { t + (-t).exp().ln_1p() } else { t.exp().ln_1p() };
                shape.ln() - scale.ln() + (1.0 - 1.0 / shape) * t - 2.0 * soft
            }
            Self::Nakagami { shape, spread } => {
                if x < 0.0 {
                    return f64::NEG_INFINITY;
                }
                if x == 0.0 {
                    // order 2m-1 >= 0; zero density unless m = 1/2
                    return if shape > 0.5 {
                        f64::NEG_INFINITY
                    } else {
                        (2.0f64).ln() + 0.5 * (0.5f64).ln() - ln_gamma(0.5) - 0.5 * spread.ln()
                    };
                }
                (2.0f64).ln() + shape * shape.ln() - ln_gamma(shape) - shape * spread.ln()
                    + (2.0 * shape - 1.0) * x.ln()
                    - shape * x * x / spread
            }
            Self::Mixture(_) => {
                let p = self.density_at(x);
                if p > 0.0 {
                    p.ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    /// Cumulative distribution function, clamped to [0, 1].
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        let s = self.support();
        if x <= s.lower {
            return 0.0;
        }
        if x >= s.upper {
            return 1.0;
        }
        let v = match *self {
            Self::Normal { mean, sd } => 0.5 * erfc(-(x - mean) / (sd * std::f64::consts::SQRT_2)),
            Self::Lognormal { log_mean, log_sd } => {
                0.5 * erfc(-(x.ln() - log_mean) / (log_sd * std::f64::consts::SQRT_2))
            }
            Self::Gamma { shape, scale } => gamma_lr(shape, x / scale),
            Self::Beta { alpha, beta } => beta_reg(alpha, beta, x),
            Self::Weibull { shape, scale } => -(-(x / scale).powf(shape)).exp_m1(),
            Self::Logistic { location, scale } => {
                let z = (x - location) / scale;
                1.0 / (1.0 + (-z).exp())
            }
            Self::Loglogistic { shape, scale } => {
                let t = shape * (x.ln() - scale.ln());
                1.0 / (1.0 + (-t).exp())
            }
            Self::Nakagami { shape, spread } => gamma_lr(shape, shape * x * x / spread),
            Self::Mixture(ref cs) => cs.iter().map(|c| c.weight * c.density.cdf(x)).sum(),
        };
        v.clamp(0.0, 1.0)
    }

    /// Inverse CDF for `u` in (0, 1).
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::NonFinite("quantile argument must lie in (0,1)"));
        }
        Ok(match *self {
            Self::Normal { mean, sd } => mean + sd * std_normal_quantile(u),
            Self::Lognormal { log_mean, log_sd } => (log_mean + log_sd * std_normal_quantile(u)).exp(),
            Self::Gamma { shape, scale } => statrs_gamma(shape, scale).inverse_cdf(u),
            Self::Beta { alpha, beta } => {
                statrs::distribution::Beta::new(alpha, beta)
                    .expect("validated at construction")
                    .inverse_cdf(u)
            }
            Self::Weibull { shape, scale } => scale * (-(-u).ln_1p()).powf(1.0 / shape),
            Self::Logistic { location, scale } => location + scale * (u / (1.0 - u)).ln(),
            Self::Loglogistic { shape, scale } => scale * (u / (1.0 - u)).powf(1.0 / shape),
            Self::Nakagami { shape, spread } => {
                statrs_gamma(shape, spread / shape).inverse_cdf(u).sqrt()
            }
            Self::Mixture(_) => self.quantile_bisect(u),
        })
    }

    /// Mixture quantile via bisection on the CDF.
    fn quantile_bisect(&self, u: f64) -> f64 {
        let (mut lo, mut hi) = self.effective_support();
        if self.cdf(lo) > u {
            return lo;
        }
        if self.cdf(hi) < u {
            return hi;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// One draw using an explicit generator. Exactly one uniform per draw for
    /// simple families (inverse CDF); mixtures use one extra uniform for the
    /// component pick (composition method).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Mixture(cs) => {
                let pick: f64 = rng.sample(rand::distr::Open01);
                let mut acc = 0.0;
                for c in cs {
                    acc += c.weight;
                    if pick <= acc {
                        return c.density.sample(rng);
                    }
                }
                cs.last().expect("nonempty").density.sample(rng)
            }
            _ => {
                let u: f64 = rng.sample(rand::distr::Open01);
                self.quantile(u).expect("u in (0,1)")
            }
        }
    }

    /// `n` i.i.d. draws, deterministic given `seed` and independent of the
    /// worker count (each index owns a derived substream).
    pub fn sample_n(&self, n: usize, seed: u64) -> Vec<f64> {
        indexed_map(n, |i| {
            let mut rng = substream(seed, Domain::Draw, i as u64);
            self.sample(&mut rng)
        })
    }

    /// Central interval holding all but ~2e-13 of the mass, intersected with
    /// the support. Scans and quadrature hulls are built from this.
    pub fn effective_support(&self) -> (f64, f64) {
        let s = self.support();
        match self {
            Self::Mixture(cs) => {
                let parts: Vec<(f64, f64)> =
                    cs.iter().map(|c| c.density.effective_support()).collect();
                (
                    parts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
                    parts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max),
                )
            }
            _ => {
                const EPS: f64 = 1e-13;
                let lo = if s.lower.is_finite() { s.lower } else { self.quantile(EPS).unwrap() };
                let hi = if s.upper.is_finite() { s.upper } else { self.quantile(1.0 - EPS).unwrap() };
                (lo, hi)
            }
        }
    }

    /// Tail decay class at one end of the support (see [`Tail`]).
    pub(crate) fn tail(&self, side: Side) -> Tail {
        match (*self).clone() {
            Self::Normal { mean, sd } => {
                let coef = 1.0 / (2.0 * sd * sd);
                let lin = match side {
                    Side::Upper => mean / (sd * sd),
                    Side::Lower => -mean / (sd * sd),
                };
                Tail::Exp { alpha: 2.0, coef, lin, power: 0.0 }
            }
            Self::Logistic { scale, .. } => {
                Tail::Exp { alpha: 1.0, coef: 1.0 / scale, lin: 0.0, power: 0.0 }
            }
            Self::Lognormal { log_mean, log_sd } => {
                let coef = 1.0 / (2.0 * log_sd * log_sd);
                match side {
                    Side::Lower => Tail::EssentialZero { coef, log_loc: log_mean },
                    Side::Upper => Tail::LogSquared { coef, log_loc: log_mean },
                }
            }
            Self::Gamma { shape, scale } => match side {
                Side::Lower => Tail::Power { order: shape - 1.0 },
                Side::Upper => Tail::Exp { alpha: 1.0, coef: 1.0 / scale, lin: 0.0, power: shape - 1.0 },
            },
            Self::Beta { alpha, beta } => match side {
                Side::Lower => Tail::Power { order: alpha - 1.0 },
                Side::Upper => Tail::Power { order: beta - 1.0 },
            },
            Self::Weibull { shape, scale } => match side {
                Side::Lower => Tail::Power { order: shape - 1.0 },
                Side::Upper => Tail::Exp {
                    alpha: shape,
                    coef: scale.powf(-shape),
                    lin: 0.0,
                    power: shape - 1.0,
                },
            },
            Self::Loglogistic { shape, .. } => match side {
                Side::Lower => Tail::Power { order: shape - 1.0 },
                Side::Upper => Tail::PowerInf { decay: shape + 1.0 },
            },
            Self::Nakagami { shape, spread } => match side {
                Side::Lower => Tail::Power { order: 2.0 * shape - 1.0 },
                Side::Upper => Tail::Exp {
                    alpha: 2.0,
                    coef: shape / spread,
                    lin: 0.0,
                    power: 2.0 * shape - 1.0,
                },
            },
            Self::Mixture(cs) => {
                let hull = self.support();
                let end = match side {
                    Side::Lower => hull.lower,
                    Side::Upper => hull.upper,
                };
                // Heaviest tail among components whose support reaches the end.
                let mut best: Option<Tail> = None;
                for c in &cs {
                    let cs_sup = c.density.support();
                    let reaches = match side {
                        Side::Lower => cs_sup.lower == end,
                        Side::Upper => cs_sup.upper == end,
                    };
                    if !reaches || c.weight == 0.0 {
                        continue;
                    }
                    let t = c.density.tail(side);
                    best = Some(match best {
                        None => t,
                        Some(b) => {
                            if ratio_diverges(&t, &b) == Some(true) {
                                t
                            } else {
                                b
                            }
                        }
                    });
                }
                best.expect("mixture has a component reaching its hull end")
            }
        }
    }
}

fn statrs_gamma(shape: f64, scale: f64) -> statrs::distribution::Gamma {
    statrs::distribution::Gamma::new(shape, 1.0 / scale).expect("validated at construction")
}

/// Standard normal quantile via the complementary inverse error function.
pub(crate) fn std_normal_quantile(u: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * u)
}

/// Which end of the support a tail describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Side {
    Lower,
    Upper,
}

/// Asymptotic decay class of a pdf at one end of its support.
///
/// Heaviness order (slower decay first):
///   at a finite endpoint:  `Power(small order)` > `Power(large)` > `EssentialZero`
///   toward infinity:       `PowerInf` > `LogSquared` > `Exp(alpha asc, coef asc)`
///
/// `Exp` stands for `x^power * exp(lin*x - coef*x^alpha)`; lower-end tails of
/// unbounded-below families are pre-reflected so the same ordering applies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Tail {
    /// `c * (x - a)^order` near a finite endpoint.
    Power { order: f64 },
    /// Faster than any power at a finite endpoint (lognormal at 0+).
    EssentialZero { coef: f64, log_loc: f64 },
    /// `x^power * exp(lin*x - coef*x^alpha)` toward infinity.
    Exp { alpha: f64, coef: f64, lin: f64, power: f64 },
    /// `exp(-(ln x - log_loc)^2 * coef) / x` toward infinity.
    LogSquared { coef: f64, log_loc: f64 },
    /// `x^-decay` toward infinity.
    PowerInf { decay: f64 },
}

fn nearly_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Does `num(x)/den(x)` diverge approaching the shared end these tails
/// describe? `None` means the table cannot decide (fall back to scan + cap).
pub(crate) fn ratio_diverges(num: &Tail, den: &Tail) -> Option<bool> {
    use Tail::*;
    let rank = |t: &Tail| match t {
        Power { .. } | EssentialZero { .. } => 0u8, // finite-end kinds
        Exp { .. } => 1,
        LogSquared { .. } => 2,
        PowerInf { .. } => 3,
    };
    match (num, den) {
        (Power { order: a }, Power { order: b }) => {
            if nearly_eq(*a, *b) {
                Some(false)
            } else {
                Some(a < b)
            }
        }
        (Power { .. }, EssentialZero { .. }) => Some(true),
        (EssentialZero { .. }, Power { .. }) => Some(false),
        (EssentialZero { coef: c1, log_loc: m1 }, EssentialZero { coef: c2, log_loc: m2 }) => {
            if !nearly_eq(*c1, *c2) {
                Some(c1 < c2)
            } else if !nearly_eq(*m1, *m2) {
                Some(m1 < m2)
            } else {
                Some(false)
            }
        }
        (a, b) if rank(a) > 0 && rank(b) > 0 => {
            if rank(a) != rank(b) {
                return Some(rank(a) > rank(b));
            }
            match (a, b) {
                (PowerInf { decay: d1 }, PowerInf { decay: d2 }) => {
                    if nearly_eq(*d1, *d2) {
                        Some(false)
                    } else {
                        Some(d1 < d2)
                    }
                }
                (
                    LogSquared { coef: c1, log_loc: m1 },
                    LogSquared { coef: c2, log_loc: m2 },
                ) => {
                    if !nearly_eq(*c1, *c2) {
                        Some(c1 < c2)
                    } else if !nearly_eq(*m1, *m2) {
                        Some(m1 > m2)
                    } else {
                        Some(false)
                    }
                }
                (
                    Exp { alpha: a1, coef: c1, lin: l1, power: p1 },
                    Exp { alpha: a2, coef: c2, lin: l2, power: p2 },
                ) => {
                    if !nearly_eq(*a1, *a2) {
                        Some(a1 < a2)
                    } else if !nearly_eq(*c1, *c2) {
                        Some(c1 < c2)
                    } else if !nearly_eq(*l1, *l2) {
                        Some(l1 > l2)
                    } else if !nearly_eq(*p1, *p2) {
                        Some(p1 > p2)
                    } else {
                        Some(false)
                    }
                }
                _ => None,
            }
        }
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// JSON serialization: {"family": string, "params": [...], "support": [lo, hi]}
// with "-inf"/"inf" string sentinels; mixtures add a "components" array.
// ---------------------------------------------------------------------------

fn bound_to_json(v: f64) -> serde_json::Value {
    if v == f64::NEG_INFINITY {
        serde_json::Value::String("-inf".into())
    } else if v == f64::INFINITY {
        serde_json::Value::String("inf".into())
    } else {
        serde_json::json!(v)
    }
}

fn bound_from_json(v: &serde_json::Value) -> Result<f64> {
    match v {
        serde_json::Value::String(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
        serde_json::Value::String(s) if s == "inf" => Ok(f64::INFINITY),
        serde_json::Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::InvalidDensity("support bound not representable".into())),
        other => Err(Error::InvalidDensity(format!("bad support bound {other}"))),
    }
}

impl Density {
    fn params(&self) -> Vec<f64> {
        match *self {
            Self::Normal { mean, sd } => vec![mean, sd],
            Self::Lognormal { log_mean, log_sd } => vec![log_mean, log_sd],
            Self::Gamma { shape, scale } => vec![shape, scale],
            Self::Beta { alpha, beta } => vec![alpha, beta],
            Self::Weibull { shape, scale } => vec![shape, scale],
            Self::Logistic { location, scale } => vec![location, scale],
            Self::Loglogistic { shape, scale } => vec![shape, scale],
            Self::Nakagami { shape, spread } => vec![shape, spread],
            Self::Mixture(ref cs) => cs.iter().map(|c| c.weight).collect(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let s = self.support();
        let mut obj = serde_json::json!({
            "family": self.family_name(),
            "params": self.params(),
            "support": [bound_to_json(s.lower), bound_to_json(s.upper)],
        });
        if let Self::Mixture(cs) = self {
            obj["components"] = serde_json::Value::Array(
                cs.iter().map(|c| c.density.to_json()).collect(),
            );
        }
        obj
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let family = v["family"]
            .as_str()
            .ok_or_else(|| Error::InvalidDensity("missing family".into()))?;
        let params: Vec<f64> = v["params"]
            .as_array()
            .ok_or_else(|| Error::InvalidDensity("missing params".into()))?
            .iter()
            .map(|p| p.as_f64().ok_or_else(|| Error::InvalidDensity("bad param".into())))
            .collect::<Result<_>>()?;
        let two = |name: &str| -> Result<(f64, f64)> {
            if params.len() != 2 {
                return Err(Error::InvalidDensity(format!(
                    "{name} takes 2 params, got {}",
                    params.len()
                )));
            }
            Ok((params[0], params[1]))
        };
        let d = match family {
            "Normal" => {
                let (a, b) = two("Normal")?;
                Self::normal(a, b)?
            }
            "Lognormal" => {
                let (a, b) = two("Lognormal")?;
                Self::lognormal(a, b)?
            }
            "Gamma" => {
                let (a, b) = two("Gamma")?;
                Self::gamma(a, b)?
            }
            "Beta" => {
                let (a, b) = two("Beta")?;
                Self::beta(a, b)?
            }
            "Weibull" => {
                let (a, b) = two("Weibull")?;
                Self::weibull(a, b)?
            }
            "Logistic" => {
                let (a, b) = two("Logistic")?;
                Self::logistic(a, b)?
            }
            "Loglogistic" => {
                let (a, b) = two("Loglogistic")?;
                Self::loglogistic(a, b)?
            }
            "Nakagami" => {
                let (a, b) = two("Nakagami")?;
                Self::nakagami(a, b)?
            }
            "FiniteMixture" => {
                let comps = v["components"]
                    .as_array()
                    .ok_or_else(|| Error::InvalidDensity("mixture needs components".into()))?;
                if comps.len() != params.len() {
                    return Err(Error::InvalidDensity(
                        "mixture params (weights) and components length mismatch".into(),
                    ));
                }
                let children: Vec<(f64, Density)> = params
                    .iter()
                    .zip(comps)
                    .map(|(w, c)| Ok((*w, Self::from_json(c)?)))
                    .collect::<Result<_>>()?;
                Self::mixture(children)?
            }
            other => return Err(Error::InvalidDensity(format!("unknown family {other}"))),
        };
        // Declared support must be consistent with the family.
        if let Some(sup) = v.get("support").and_then(|s| s.as_array()) {
            if sup.len() != 2 {
                return Err(Error::InvalidDensity("support must be [lo, hi]".into()));
            }
            let lo = bound_from_json(&sup[0])?;
            let hi = bound_from_json(&sup[1])?;
            let s = d.support();
            let same = |a: f64, b: f64| a == b || (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0);
            if !(same(lo, s.lower) && same(hi, s.upper)) {
                return Err(Error::InvalidDensity(format!(
                    "declared support [{lo}, {hi}] does not match {} support [{}, {}]",
                    d.family_name(),
                    s.lower,
                    s.upper
                )));
            }
        }
        Ok(d)
    }
}

impl std::fmt::Display for Density {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Mixture(cs) => {
                let parts: Vec<String> = cs
                    .iter()
                    .map(|c| format!("{}*{}", c.weight, c.density))
                    .collect();
                write!(f, "Mix({})", parts.join(" + "))
            }
            _ => {
                let p = self.params();
                write!(f, "{}({}, {})", self.family_name(), p[0], p[1])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;

    fn families() -> Vec<Density> {
        vec![
            Density::normal(10.0, 1.0).unwrap(),
            Density::lognormal(-0.44, 0.2627).unwrap(),
            Density::gamma(224.6, 0.1565).unwrap(),
            Density::beta(4.0, 2.0).unwrap(),
            Density::weibull(2.5, 3.0).unwrap(),
            Density::logistic(1.0, 0.7).unwrap(),
            Density::loglogistic(6.0, 2.0).unwrap(),
            Density::nakagami(30.6, 1271.3).unwrap(),
            Density::mixture(vec![
                (0.4, Density::normal(9.0, 0.5).unwrap()),
                (0.6, Density::normal(11.0, 0.5).unwrap()),
            ])
            .unwrap(),
        ]
    }

    #[test]
    fn standard_normal_mode_height() {
        let d = Density::normal(10.0, 1.0).unwrap();
        let expect = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((d.pdf(10.0).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn beta_boundary_is_zero() {
        let d = Density::beta(4.0, 2.0).unwrap();
        assert_eq!(d.pdf(0.0).unwrap(), 0.0);
        assert_eq!(d.pdf(1.0).unwrap(), 0.0);
        assert_eq!(d.pdf(-0.5).unwrap(), 0.0);
        assert_eq!(d.pdf(2.0).unwrap(), 0.0);
    }

    #[test]
    fn gamma_pdf_matches_direct_formula_evaluation() {
        // Independent oracle: direct evaluation of the Gamma pdf formula with
        // a locally computed Stirling-series log-gamma.
        fn ln_gamma_oracle(z: f64) -> f64 {
            // Stirling series with argument shift for accuracy.
            let mut z = z;
            let mut shift = 0.0;
            while z < 20.0 {
                shift -= z.ln();
                z += 1.0;
            }
            let z2 = 1.0 / (z * z);
            0.5 * (2.0 * std::f64::consts::PI).ln() + (z - 0.5) * z.ln() - z
                + (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - z2 / 1680.0) * z2) * z2) / z
                + shift
        }
        let (k, th, x): (f64, f64, f64) = (224.6, 0.1565, 35.15);
        let oracle = ((k - 1.0) * x.ln() - x / th - ln_gamma_oracle(k) - k * th.ln()).exp();
        // Frozen from the oracle (also cross-checked against scipy):
        assert!((oracle - 0.170031143619).abs() < 1e-9, "oracle drifted: {oracle}");
        let d = Density::gamma(k, th).unwrap();
        assert!((d.pdf(x).unwrap() - oracle).abs() < 1e-9 * oracle);
    }

    #[test]
    fn logpdf_consistent_with_pdf() {
        for d in families() {
            let (lo, hi) = d.effective_support();
            for i in 1..40 {
                let x = lo + (hi - lo) * (i as f64) / 40.0;
                let p = d.pdf(x).unwrap();
                if p > 1e-300 {
                    let rel = (d.ln_pdf(x).unwrap().exp() - p).abs() / p;
                    assert!(rel < 1e-12, "{d}: pdf/ln_pdf mismatch at {x}");
                }
            }
        }
    }

    #[test]
    fn non_finite_input_is_an_error() {
        let d = Density::normal(0.0, 1.0).unwrap();
        assert!(d.pdf(f64::NAN).is_err());
        assert!(d.pdf(f64::INFINITY).is_err());
        assert!(d.ln_pdf(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn every_family_normalizes() {
        for d in families() {
            let (lo, hi) = d.effective_support();
            let mass = quad::integrate_finite(&|x| d.density_at(x), lo, hi, 1e-10).unwrap();
            assert!((mass - 1.0).abs() < 1e-8, "{d} integrates to {mass}");
        }
    }

    #[test]
    fn cdf_matches_pdf_quadrature() {
        for d in families() {
            let (lo, hi) = d.effective_support();
            let mid = 0.3 * lo + 0.7 * hi;
            let part = quad::integrate_finite(&|x| d.density_at(x), lo, mid, 1e-11).unwrap();
            let cdf = d.cdf(mid) - d.cdf(lo);
            assert!((part - cdf).abs() < 1e-8, "{d}: quad {part} vs cdf {cdf}");
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        for d in families() {
            for u in [1e-6, 0.01, 0.3, 0.5, 0.9, 0.999, 1.0 - 1e-9] {
                let x = d.quantile(u).unwrap();
                assert!((d.cdf(x) - u).abs() < 1e-7, "{d}: cdf(q({u})) = {}", d.cdf(x));
            }
        }
    }

    #[test]
    fn draws_are_deterministic_and_in_support() {
        for d in families() {
            let a = d.sample_n(128, 99);
            let b = d.sample_n(128, 99);
            assert_eq!(a, b);
            let s = d.support();
            assert!(a.iter().all(|&x| s.contains(x)));
        }
        assert!(Density::normal(0.0, 1.0).unwrap().sample_n(0, 1).is_empty());
    }

    #[test]
    fn draw_sample_means_match_expectations() {
        let n = 100_000;
        let d = Density::normal(10.0, 1.0).unwrap();
        let m = d.sample_n(n, 7).iter().sum::<f64>() / n as f64;
        assert!((m - 10.0).abs() < 0.02, "normal mean {m}");

        let d = Density::beta(4.0, 2.0).unwrap();
        let m = d.sample_n(n, 7).iter().sum::<f64>() / n as f64;
        assert!((m - 4.0 / 6.0).abs() < 0.004, "beta mean {m}");
    }

    #[test]
    fn json_round_trip() {
        for d in families() {
            let v = d.to_json();
            let back = Density::from_json(&v).unwrap();
            assert_eq!(d, back, "round trip failed for {d}");
        }
        // sentinels render as strings
        let v = Density::normal(0.0, 1.0).unwrap().to_json();
        assert_eq!(v["support"][0], serde_json::json!("-inf"));
        assert_eq!(v["support"][1], serde_json::json!("inf"));
    }

    #[test]
    fn json_rejects_inconsistent_support() {
        let v = serde_json::json!({
            "family": "Beta", "params": [4.0, 2.0], "support": [0.0, 2.0]
        });
        assert!(Density::from_json(&v).is_err());
    }

    #[test]
    fn tail_table_spot_checks() {
        use super::ratio_diverges;
        let p = Density::normal(10.0, 1.0).unwrap();
        let q_narrow = Density::normal(10.0, 0.5).unwrap();
        // p has the heavier upper tail than a narrower normal
        assert_eq!(
            ratio_diverges(&p.tail(Side::Upper), &q_narrow.tail(Side::Upper)),
            Some(true)
        );
        // shifted equal-variance normals diverge in one direction
        let q_shift = Density::normal(10.2, 1.0).unwrap();
        assert_eq!(
            ratio_diverges(&q_shift.tail(Side::Upper), &p.tail(Side::Upper)),
            Some(true)
        );
        assert_eq!(
            ratio_diverges(&q_shift.tail(Side::Lower), &p.tail(Side::Lower)),
            Some(false)
        );
        // beta's polynomial zero beats lognormal's essential zero at 0+
        let b = Density::beta(4.0, 2.0).unwrap();
        let ln = Density::lognormal(-0.44, 0.2627).unwrap();
        assert_eq!(ratio_diverges(&b.tail(Side::Lower), &ln.tail(Side::Lower)), Some(true));
        // lognormal upper tail is heavier than any normal's
        assert_eq!(ratio_diverges(&ln.tail(Side::Upper), &p.tail(Side::Upper)), Some(true));
        // identical tails are bounded
        assert_eq!(ratio_diverges(&p.tail(Side::Upper), &p.tail(Side::Upper)), Some(false));
    }
}
