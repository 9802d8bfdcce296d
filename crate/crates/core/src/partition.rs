//! Support partitioning for a pair of densities.
//!
//! For original density `p` and updated density `q` the total support splits
//! into the augmenting region `S+ = {q >= p}` and the filtering region
//! `S- = {q < p}`. The partition masses drive the mixed update strategy, and
//! twice their gap equals the total variation distance, which doubles as a
//! built-in self-check on the crossing detection.

use crate::density::{ratio_diverges, Density, Side};
use crate::error::{Error, Result};
use crate::quad;

/// Number of scan intervals used by crossing detection and ratio scans.
/// Multiple crossings (multimodal updates) need a dense scan; 4096 resolves
/// every case in the built-in scenario registry with margin.
pub const SCAN_POINTS: usize = 4096;

/// Numeric cap above which a scanned density ratio is reported unbounded.
pub const DEFAULT_RATIO_CAP: f64 = 1e6;

/// Agreement required between the two total-variation routes.
pub const TV_CHECK_TOL: f64 = 1e-6;

/// Result of a supremum search for a density ratio.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RatioBound {
    Finite(f64),
    Unbounded,
}

impl RatioBound {
    pub fn finite(&self) -> Option<f64> {
        match self {
            RatioBound::Finite(v) => Some(*v),
            RatioBound::Unbounded => None,
        }
    }
}

/// How to search for the ratio supremum.
#[derive(Clone, Copy, Debug)]
pub enum RatioMode<'a> {
    /// Dense grid over the denominator's effective support with local
    /// golden-section refinement, guarded by the tail-decay table and the
    /// numeric cap.
    AnalyticScan,
    /// Maximum over an explicit sample (grid- and tail-insensitive; what a
    /// realized-sample implementation of pure filtering uses).
    SampleEmpirical(&'a [f64]),
}

/// Crossings, region intervals, and region masses for a `(p, q)` pair.
#[derive(Clone, Debug)]
pub struct PartitionSummary {
    /// Points where `q - p` changes sign, ascending.
    pub crossings: Vec<f64>,
    /// Disjoint intervals where `q >= p`.
    pub s_plus: Vec<(f64, f64)>,
    /// Disjoint intervals where `q < p`.
    pub s_minus: Vec<(f64, f64)>,
    pub pi_p_plus: f64,
    pub pi_q_plus: f64,
    pub pi_p_minus: f64,
    pub pi_q_minus: f64,
    /// Total variation distance, computed as `2 (pi_q+ - pi_p+)`.
    pub d1: f64,
    /// Independent route: adaptive quadrature of `|p - q|` over the hull.
    pub d1_quadrature: f64,
}

/// Pointwise region test: `x` lies in the augmenting region `S+`.
pub fn in_augment_region(p: &Density, q: &Density, x: f64) -> bool {
    q.density_at(x) >= p.density_at(x)
}

/// Effective hull of two densities: union of their effective supports plus
/// any finite support endpoint lying strictly inside (partition boundaries).
fn scan_anchors(p: &Density, q: &Density) -> (f64, f64, Vec<f64>) {
    let (plo, phi) = p.effective_support();
    let (qlo, qhi) = q.effective_support();
    let lo = plo.min(qlo);
    let hi = phi.max(qhi);
    let mut anchors = Vec::new();
    for d in [p, q] {
        let s = d.support();
        for b in [s.lower, s.upper] {
            if b.is_finite() && b > lo && b < hi {
                anchors.push(b);
            }
        }
    }
    anchors.sort_by(f64::total_cmp);
    anchors.dedup();
    (lo, hi, anchors)
}

/// All sign changes of `q(x) - p(x)`, refined by bisection to 1e-10.
///
/// Support boundary points where one density drops to zero are part of the
/// scan grid, so discontinuous sign flips land exactly on the boundary.
/// Tangential touch points do not change the sign and are not reported;
/// identical densities yield an empty list.
pub fn find_crossings(p: &Density, q: &Density) -> Vec<f64> {
    let (lo, hi, anchors) = scan_anchors(p, q);
    let mut grid: Vec<f64> = (0..=SCAN_POINTS)
        .map(|i| lo + (hi - lo) * (i as f64) / (SCAN_POINTS as f64))
        .collect();
    grid.extend_from_slice(&anchors);
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let sign = |x: f64| q.density_at(x) >= p.density_at(x);
    let f = |x: f64| q.density_at(x) - p.density_at(x);

    let mut crossings = Vec::new();
    let mut prev = grid[0];
    let mut prev_sign = sign(prev);
    for &x in &grid[1..] {
        let s = sign(x);
        if s != prev_sign {
            // Bisection converges to the sign flip, including jumps at
            // support boundaries.
            let (mut a, mut b) = (prev, x);
            let target_sign = s;
            for _ in 0..200 {
                if b - a <= 1e-10 {
                    break;
                }
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if sign(mid) == target_sign {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            let root = 0.5 * (a + b);
            let _ = f(root);
            crossings.push(root);
        }
        prev = x;
        prev_sign = s;
    }
    crossings
}

/// Full partition with masses and the total-variation self-check.
///
/// Region masses come from adaptive quadrature over each interval; `d1` is
/// also computed independently as the quadrature of `|p - q|`, and the two
/// routes must agree within [`TV_CHECK_TOL`] (missed crossings break the
/// agreement and surface as an error).
pub fn partition(p: &Density, q: &Density) -> Result<PartitionSummary> {
    let (lo, hi, anchors) = scan_anchors(p, q);
    let crossings = find_crossings(p, q);

    let mut bounds = vec![lo];
    bounds.extend_from_slice(&crossings);
    // Support endpoints are quadrature piece boundaries even when the sign
    // does not flip there (integrands are discontinuous across them).
    bounds.extend_from_slice(&anchors);
    bounds.push(hi);
    bounds.sort_by(f64::total_cmp);
    bounds.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));

    let mut pi_p_plus = 0.0;
    let mut pi_q_plus = 0.0;
    let mut pi_p_minus = 0.0;
    let mut pi_q_minus = 0.0;
    let mut plus_pieces: Vec<(f64, f64)> = Vec::new();
    let mut minus_pieces: Vec<(f64, f64)> = Vec::new();

    for w in bounds.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a <= 0.0 {
            continue;
        }
        let mid = 0.5 * (a + b);
        let plus = in_augment_region(p, q, mid);
        let mp = quad::integrate_finite(&|x| p.density_at(x), a, b, 1e-10)?;
        let mq = quad::integrate_finite(&|x| q.density_at(x), a, b, 1e-10)?;
        if plus {
            pi_p_plus += mp;
            pi_q_plus += mq;
            plus_pieces.push((a, b));
        } else {
            pi_p_minus += mp;
            pi_q_minus += mq;
            minus_pieces.push((a, b));
        }
    }

    // Report intervals with true support endpoints at the hull edges.
    let union_lo = p.support().lower.min(q.support().lower);
    let union_hi = p.support().upper.max(q.support().upper);
    let widen = |pieces: &mut Vec<(f64, f64)>| {
        for piece in pieces.iter_mut() {
            if piece.0 == lo {
                piece.0 = union_lo;
            }
            if piece.1 == hi {
                piece.1 = union_hi;
            }
        }
    };
    let mut s_plus = merge_adjacent(plus_pieces);
    let mut s_minus = merge_adjacent(minus_pieces);
    widen(&mut s_plus);
    widen(&mut s_minus);

    let d1 = 2.0 * (pi_q_plus - pi_p_plus);
    let d1_quadrature =
        quad::integrate_finite(&|x| (p.density_at(x) - q.density_at(x)).abs(), lo, hi, 5e-8)?;
    let gap = (d1_quadrature - d1).abs();
    if gap > TV_CHECK_TOL {
        return Err(Error::PartitionCheck { gap, tol: TV_CHECK_TOL });
    }

    Ok(PartitionSummary {
        crossings,
        s_plus,
        s_minus,
        pi_p_plus,
        pi_q_plus,
        pi_p_minus,
        pi_q_minus,
        d1,
        d1_quadrature,
    })
}

fn merge_adjacent(pieces: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
    for (a, b) in pieces {
        match out.last_mut() {
            Some(last) if last.1 == a => last.1 = b,
            _ => out.push((a, b)),
        }
    }
    out
}

/// Supremum of `num(x) / den(x)`.
///
/// In analytic-scan mode the supremum is declared [`RatioBound::Unbounded`]
/// when the support of `num` exceeds the support of `den`, when the
/// tail-decay table proves divergence at a shared support end, or when the
/// refined scan maximum exceeds `cap`.
pub fn max_ratio(num: &Density, den: &Density, mode: RatioMode<'_>) -> RatioBound {
    max_ratio_with_cap(num, den, mode, DEFAULT_RATIO_CAP)
}

pub fn max_ratio_with_cap(
    num: &Density,
    den: &Density,
    mode: RatioMode<'_>,
    cap: f64,
) -> RatioBound {
    match mode {
        RatioMode::SampleEmpirical(samples) => {
            let mut best = 0.0f64;
            for &x in samples {
                let n = num.density_at(x);
                if n <= 0.0 {
                    continue;
                }
                let d = den.density_at(x);
                if d <= 0.0 {
                    return RatioBound::Unbounded;
                }
                best = best.max(n / d);
            }
            RatioBound::Finite(best)
        }
        RatioMode::AnalyticScan => {
            let ns = num.support();
            let ds = den.support();
            if ns.lower < ds.lower || ns.upper > ds.upper {
                return RatioBound::Unbounded;
            }
            // Shared support ends: consult the tail-decay table.
            if ns.lower == ds.lower {
                match ratio_diverges(&num.tail(Side::Lower), &den.tail(Side::Lower)) {
                    Some(true) => return RatioBound::Unbounded,
                    Some(false) | None => {}
                }
            }
            if ns.upper == ds.upper {
                match ratio_diverges(&num.tail(Side::Upper), &den.tail(Side::Upper)) {
                    Some(true) => return RatioBound::Unbounded,
                    Some(false) | None => {}
                }
            }

            let (dlo, dhi) = den.effective_support();
            let lo = dlo.max(ns.lower);
            let hi = dhi.min(ns.upper);
            if hi <= lo {
                return RatioBound::Finite(0.0);
            }
            let ratio = |x: f64| {
                let n = num.density_at(x);
                if n <= 0.0 {
                    return 0.0;
                }
                let d = den.density_at(x);
                if d <= 0.0 {
                    return f64::INFINITY;
                }
                n / d
            };
            let xs: Vec<f64> = (0..=SCAN_POINTS)
                .map(|i| lo + (hi - lo) * (i as f64) / (SCAN_POINTS as f64))
                .collect();
            let rs: Vec<f64> = xs.iter().map(|&x| ratio(x)).collect();
            if rs.iter().any(|r| !r.is_finite()) {
                return RatioBound::Unbounded;
            }
            let mut best = 0.0f64;
            for i in 0..rs.len() {
                let is_local_max = (i == 0 || rs[i] >= rs[i - 1])
                    && (i + 1 == rs.len() || rs[i] >= rs[i + 1]);
                if !is_local_max {
                    continue;
                }
                let a = if i == 0 { xs[0] } else { xs[i - 1] };
                let b = if i + 1 == xs.len() { xs[i] } else { xs[i + 1] };
                best = best.max(golden_max(&ratio, a, b));
            }
            if best > cap {
                RatioBound::Unbounded
            } else {
                RatioBound::Finite(best)
            }
        }
    }
}

/// Golden-section maximization on `[a, b]`.
fn golden_max<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (a, b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if b - a < 1e-13 * b.abs().max(1.0) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd).max(f(a)).max(f(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(m: f64, s: f64) -> Density {
        Density::normal(m, s).unwrap()
    }

    #[test]
    fn shifted_normals_cross_at_midpoint() {
        let c = find_crossings(&n(10.0, 1.0), &n(10.2, 1.0));
        assert_eq!(c.len(), 1);
        assert!((c[0] - 10.1).abs() < 1e-9, "got {}", c[0]);
    }

    #[test]
    fn widened_normal_crossings_match_quadratic_oracle() {
        // Oracle: solve ln p = ln q for N(10,1) vs N(10,s):
        // t^2 = 2 s^2 ln(s) / (s^2 - 1), crossings at 10 +- t.
        let s = 1.5f64;
        let t = (2.0 * s * s * s.ln() / (s * s - 1.0)).sqrt();
        let c = find_crossings(&n(10.0, 1.0), &n(10.0, s));
        assert_eq!(c.len(), 2);
        assert!((c[0] - (10.0 - t)).abs() < 1e-8, "got {} want {}", c[0], 10.0 - t);
        assert!((c[1] - (10.0 + t)).abs() < 1e-8);
    }

    #[test]
    fn identical_densities_have_no_crossings() {
        let d = n(10.0, 1.0);
        assert!(find_crossings(&d, &d).is_empty());
        let part = partition(&d, &d).unwrap();
        assert_eq!(part.d1, 0.0);
        assert!(part.s_minus.is_empty());
    }

    #[test]
    fn partition_masses_for_small_shift() {
        // Closed-form oracle for equal-variance normals shifted by delta:
        // pi_q+ - pi_p+ = 2 Phi(delta/2) - 1.
        let part = partition(&n(10.0, 1.0), &n(10.2, 1.0)).unwrap();
        let phi = |x: f64| 0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2);
        let oracle = 2.0 * phi(0.1) - 1.0;
        assert!((part.pi_q_plus - part.pi_p_plus - oracle).abs() < 1e-7);
        assert!((part.d1 - 2.0 * oracle).abs() < 1e-6);
        assert!((part.pi_p_plus + part.pi_p_minus - 1.0).abs() < 1e-8);
        assert!((part.pi_q_plus + part.pi_q_minus - 1.0).abs() < 1e-8);
    }

    #[test]
    fn tv_between_yield_stress_fits() {
        // Gamma fit against a same-scale Nakagami fit; frozen quadrature 0.3157.
        let g = Density::gamma(224.6, 0.1565).unwrap();
        let nak = Density::nakagami(30.6, 1271.3).unwrap();
        let part = partition(&g, &nak).unwrap();
        assert!((part.d1 - 0.314).abs() < 5e-3, "d1 = {}", part.d1);
    }

    #[test]
    fn abs_quadrature_route_agrees() {
        let part = partition(&n(10.0, 1.0), &n(10.2, 1.0)).unwrap();
        assert!((part.d1_quadrature - part.d1).abs() <= TV_CHECK_TOL);
    }

    #[test]
    fn narrower_normal_ratio_is_sigma_quotient() {
        // Oracle: ratio of mode heights sigma_p / sigma_q at the common mean.
        let r = max_ratio(&n(10.0, 0.5), &n(10.0, 1.0), RatioMode::AnalyticScan);
        match r {
            RatioBound::Finite(v) => assert!((v - 2.0).abs() < 1e-9, "got {v}"),
            RatioBound::Unbounded => panic!("expected finite"),
        }
    }

    #[test]
    fn wider_numerator_is_unbounded() {
        assert_eq!(
            max_ratio(&n(10.0, 1.0), &n(10.0, 0.5), RatioMode::AnalyticScan),
            RatioBound::Unbounded
        );
    }

    #[test]
    fn beta_over_matched_normal_is_finite() {
        // Oracle (frozen from a 1e-6-resolution grid scan on [0,1]): 1.7986.
        let b = Density::beta(4.0, 2.0).unwrap();
        let q = Density::normal(0.667, 0.0317f64.sqrt()).unwrap();
        match max_ratio(&b, &q, RatioMode::AnalyticScan) {
            RatioBound::Finite(v) => {
                assert!((v - 1.7986).abs() < 2e-3, "got {v}");
            }
            RatioBound::Unbounded => panic!("expected finite"),
        }
    }

    #[test]
    fn beta_over_lognormal_is_unbounded_at_origin() {
        let b = Density::beta(4.0, 2.0).unwrap();
        let ln = Density::lognormal(-0.44, 0.2627).unwrap();
        assert_eq!(max_ratio(&b, &ln, RatioMode::AnalyticScan), RatioBound::Unbounded);
    }

    #[test]
    fn empirical_mode_takes_sample_max() {
        let p = n(10.0, 1.0);
        let q = n(10.2, 1.0);
        let xs = [9.0, 10.0, 11.0, 12.5];
        let expect = xs
            .iter()
            .map(|&x| q.density_at(x) / p.density_at(x))
            .fold(0.0f64, f64::max);
        match max_ratio(&q, &p, RatioMode::SampleEmpirical(&xs)) {
            RatioBound::Finite(v) => assert!((v - expect).abs() < 1e-12),
            RatioBound::Unbounded => panic!(),
        }
        // A sample point where the denominator vanishes forces Unbounded.
        let beta = Density::beta(4.0, 2.0).unwrap();
        assert_eq!(
            max_ratio(&q, &beta, RatioMode::SampleEmpirical(&[0.5, 1.5])),
            RatioBound::Unbounded
        );
    }
}
