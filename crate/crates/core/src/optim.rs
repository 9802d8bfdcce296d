//! Box-constrained Nelder-Mead minimization.
//!
//! Small, dependency-free simplex search used by the MAP fitter. Evaluated
//! points are clamped into the box, which keeps the simplex feasible without
//! penalty terms.

/// Minimize `f` starting at `x0` inside `bounds` (per-coordinate `[lo, hi]`).
/// Returns `(argmin, min)`.
pub fn nelder_mead<F>(f: F, x0: &[f64], bounds: &[(f64, f64)], max_iter: usize) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let dim = x0.len();
    assert_eq!(bounds.len(), dim);
    let clamp = |x: &mut Vec<f64>| {
        for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
            *v = v.clamp(lo, hi);
        }
    };
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    // Initial simplex: x0 plus per-axis steps scaled to the box.
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let mut x = x0.to_vec();
    clamp(&mut x);
    let fx = eval(&x);
    simplex.push((x.clone(), fx));
    for i in 0..dim {
        let mut xi = x.clone();
        let span = bounds[i].1 - bounds[i].0;
        let step = if span.is_finite() { 0.05 * span } else { 0.1 * xi[i].abs().max(1.0) };
        xi[i] = if xi[i] + step <= bounds[i].1 { xi[i] + step } else { xi[i] - step };
        clamp(&mut xi);
        let fxi = eval(&xi);
        simplex.push((xi, fxi));
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        if (worst - best).abs() <= 1e-12 * best.abs().max(1.0) {
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|(x, _)| x[j]).sum::<f64>() / dim as f64)
            .collect();

        let point = |coef: f64| -> (Vec<f64>, f64) {
            let mut p: Vec<f64> = centroid
                .iter()
                .zip(&simplex[dim].0)
                .map(|(&c, &w)| c + coef * (c - w))
                .collect();
            clamp(&mut p);
            let fp = eval(&p);
            (p, fp)
        };

        let (xr, fr) = point(alpha);
        if fr < simplex[0].1 {
            let (xe, fe) = point(gamma);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
        } else {
            let (xc, fc) = point(-rho);
            if fc < simplex[dim].1 {
                simplex[dim] = (xc, fc);
            } else {
                let best_x = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let mut shrunk: Vec<f64> = entry
                        .0
                        .iter()
                        .zip(&best_x)
                        .map(|(&v, &b)| b + sigma * (v - b))
                        .collect();
                    clamp(&mut shrunk);
                    entry.1 = eval(&shrunk);
                    entry.0 = shrunk;
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_quadratic_bowl() {
        let f = |x: &[f64]| (x[0] - 3.0).powi(2) + 2.0 * (x[1] + 1.0).powi(2);
        let (x, v) = nelder_mead(f, &[0.0, 0.0], &[(-10.0, 10.0), (-10.0, 10.0)], 500);
        assert!(v < 1e-10);
        assert!((x[0] - 3.0).abs() < 1e-4 && (x[1] + 1.0).abs() < 1e-4);
    }

    #[test]
    fn respects_bounds() {
        let f = |x: &[f64]| (x[0] - 5.0).powi(2);
        let (x, _) = nelder_mead(f, &[0.5, 0.0], &[(0.0, 1.0), (-1.0, 1.0)], 300);
        assert!((x[0] - 1.0).abs() < 1e-6, "clamped optimum at the box edge, got {}", x[0]);
    }
}
