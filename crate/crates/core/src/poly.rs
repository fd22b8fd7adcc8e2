//! Dense complex polynomials, coefficients stored from the constant term up.

use crate::{Error, Result, C64};

const MAX_ITERS: usize = 200;
const CLUSTER_TOL: f64 = 1e-6;
const RESIDUAL_TOL: f64 = 1e-10;

pub fn eval(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Value and first derivative by Horner's scheme.
pub fn eval_with_derivative(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

pub fn derivative(coeffs: &[C64]) -> Vec<C64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * k as f64)
        .collect()
}

/// `leading * prod_k (z - roots[k])`.
pub fn from_roots(roots: &[C64], leading: C64) -> Vec<C64> {
    let mut out = vec![leading];
    for &r in roots {
        let mut next = vec![C64::new(0.0, 0.0); out.len() + 1];
        for (k, &c) in out.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * r;
        }
        out = next;
    }
    out
}

pub fn scale(coeffs: &[C64]) -> f64 {
    coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Residual bound used to accept a root: `1e-10 * scale * (1 + |z|)^deg`.
pub fn residual_bound(coeffs: &[C64], z: C64) -> f64 {
    let deg = coeffs.len().saturating_sub(1) as i32;
    RESIDUAL_TOL * scale(coeffs) * (1.0 + z.norm()).powi(deg)
}

/// All roots of the polynomial, repeated according to multiplicity.
///
/// Aberth-Ehrlich simultaneous iteration started from a perturbed circle.
/// Roots closer than `1e-6` are merged into their mean, so a numerically
/// split multiple root comes back as identical copies.
pub fn roots_polynomial(coeffs: &[C64]) -> Result<Vec<C64>> {
    if coeffs.is_empty() {
        return Err(Error::InvalidParameter("empty polynomial".into()));
    }
    if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::InvalidParameter("non-finite coefficient".into()));
    }
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    if lead.norm() == 0.0 {
        return Err(Error::InvalidParameter("leading coefficient is zero".into()));
    }
    if deg == 0 {
        return Ok(Vec::new());
    }
    // monic copy keeps the iteration scale-free
    let monic: Vec<C64> = coeffs.iter().map(|&c| c / lead).collect();
    // exact zero roots factor out cleanly
    let n_zero = monic.iter().take_while(|c| c.norm() == 0.0).count();
    let reduced = &monic[n_zero..];
    let m = reduced.len() - 1;
    let mut roots = vec![C64::new(0.0, 0.0); n_zero];
    if m == 0 {
        return Ok(roots);
    }
    if m == 1 {
        roots.push(-reduced[0]);
        return finish(coeffs, roots, 0);
    }

    let dp = derivative(reduced);
    let radius = initial_radius(reduced);
    let mut z: Vec<C64> = (0..m)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / m as f64 + 0.4;
            C64::from_polar(radius * (1.0 + 0.01 * k as f64 / m as f64), theta)
        })
        .collect();

    let mut converged = vec![false; m];
    let mut iterations = 0;
    for it in 0..MAX_ITERS {
        iterations = it + 1;
        let mut all = true;
        for k in 0..m {
            if converged[k] {
                continue;
            }
            let p = eval(reduced, z[k]);
            if p.norm() == 0.0 {
                converged[k] = true;
                continue;
            }
            let ratio = p / eval(&dp, z[k]);
            let mut sum = C64::new(0.0, 0.0);
            for j in 0..m {
                if j != k {
                    sum += 1.0 / (z[k] - z[j]);
                }
            }
            let step = ratio / (1.0 - ratio * sum);
            if !(step.re.is_finite() && step.im.is_finite()) {
                // coincident iterates; nudge apart
                let bump = C64::new(1e-8, 1e-8) * (1.0 + z[k].norm());
                z[k] += bump;
                all = false;
                continue;
            }
            z[k] -= step;
            if step.norm() <= 1e-15 * (1.0 + z[k].norm()) {
                converged[k] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
    // a few Newton sweeps on the original polynomial tighten the result
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let (p, d) = eval_with_derivative(reduced, *zk);
            if d.norm() == 0.0 || p.norm() == 0.0 {
                break;
            }
            let step = p / d;
            if !(step.re.is_finite() && step.im.is_finite()) || step.norm() > 1e-6 * (1.0 + zk.norm()) {
                break;
            }
            *zk -= step;
        }
    }
    roots.extend(z);
    finish(coeffs, roots, iterations)
}

fn finish(coeffs: &[C64], roots: Vec<C64>, iterations: usize) -> Result<Vec<C64>> {
    let roots = cluster(roots, CLUSTER_TOL);
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for &r in &roots {
        let res = eval(coeffs, r).norm();
        let bound = residual_bound(coeffs, r);
        worst = worst.max(res);
        if !(res <= bound) {
            ok = false;
        }
    }
    if ok {
        Ok(roots)
    } else {
        Err(Error::NoConvergence {
            iterations,
            residual: worst,
            roots,
        })
    }
}

/// Geometric mean of the root moduli, `|c_0|^{1/n}` for a monic polynomial.
fn initial_radius(monic: &[C64]) -> f64 {
    let m = monic.len() - 1;
    let c0 = monic[0].norm();
    // Fujiwara bound as a cap
    let fujiwara = (1..=m)
        .map(|k| monic[m - k].norm().powf(1.0 / k as f64))
        .fold(0.0, f64::max)
        * 2.0;
    let r = c0.powf(1.0 / m as f64);
    if r.is_finite() && r > 0.0 {
        r.min(fujiwara.max(f64::MIN_POSITIVE))
    } else {
        fujiwara.max(1.0)
    }
}

/// Merge groups of points that are transitively within `tol` of each other,
/// replacing every member by the group mean.
pub fn cluster(points: Vec<C64>, tol: f64) -> Vec<C64> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut j = i;
        while parent[j] != r {
            let next = parent[j];
            parent[j] = r;
            j = next;
        }
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (points[i] - points[j]).norm() < tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b] = a;
                }
            }
        }
    }
    let mut sums = vec![(C64::new(0.0, 0.0), 0usize); n];
    for (i, &p) in points.iter().enumerate() {
        let r = find(&mut parent, i);
        sums[r].0 += p;
        sums[r].1 += 1;
    }
    (0..n)
        .map(|i| {
            let r = find(&mut parent, i);
            if sums[r].1 > 1 {
                sums[r].0 / sums[r].1 as f64
            } else {
                points[i]
            }
        })
        .collect()
}
