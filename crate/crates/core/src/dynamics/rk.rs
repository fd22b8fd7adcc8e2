//! Dormand-Prince 5(4) integration of complex systems.

use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
    pub min_step: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            min_step: 1e-13,
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Integrate `y' = f(t, y)` from `t = 0` and return the state at each of
/// `times` (nondecreasing, `times[0] >= 0`).
///
/// An error from `f` at an accepted state is returned as is; an error at a
/// trial stage shrinks the step.
pub fn integrate<F>(mut f: F, y0: &[C64], times: &[f64], tol: &Tolerance) -> Result<Vec<Vec<C64>>>
where
    F: FnMut(f64, &[C64]) -> Result<Vec<C64>>,
{
    if times.windows(2).any(|w| !(w[1] >= w[0])) || times.first().is_some_and(|&t| !(t >= 0.0)) {
        return Err(Error::InvalidParameter("time grid must be nondecreasing from 0".into()));
    }
    let n = y0.len();
    let mut out = Vec::with_capacity(times.len());
    let mut t = 0.0;
    let mut y = y0.to_vec();
    let span = times.last().copied().unwrap_or(0.0);
    let mut h = (1e-2f64).min(span.max(tol.min_step));
    let mut k1 = f(t, &y)?;
    let mut k = vec![vec![C64::new(0.0, 0.0); n]; 7];
    let mut ytmp = vec![C64::new(0.0, 0.0); n];

    for &target in times {
        while target - t > 0.0 {
            let last = h >= target - t;
            let step = if last { target - t } else { h };
            k[0].clone_from(&k1);
            let mut failed = false;
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = C64::new(0.0, 0.0);
                    for j in 0..s {
                        acc += k[j][i] * A[s][j];
                    }
                    ytmp[i] = y[i] + acc * step;
                }
                match f(t + C[s] * step, &ytmp) {
                    Ok(v) => k[s] = v,
                    Err(_) => {
                        failed = true;
                        break;
                    }
                }
            }
            if failed {
                h = step * 0.25;
                if h < tol.min_step {
                    return Err(Error::StepFailure { time: t, step: h });
                }
                continue;
            }
            // ytmp holds the fifth-order solution (stage 7 uses the b weights)
            let mut err: f64 = 0.0;
            for i in 0..n {
                let mut e = C64::new(0.0, 0.0);
                for s in 0..7 {
                    e += k[s][i] * E[s];
                }
                let sc = tol.atol + tol.rtol * y[i].norm().max(ytmp[i].norm());
                err = err.max((e * step).norm() / sc);
            }
            if !err.is_finite() {
                err = 1e10;
            }
            if err <= 1.0 {
                t = if last { target } else { t + step };
                y.clone_from(&ytmp);
                k1.clone_from(&k[6]);
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last || step * grow > h {
                    h = step * grow;
                }
            } else {
                h = step * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
                if h < tol.min_step {
                    return Err(Error::StepFailure { time: t, step: h });
                }
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_is_exact_to_tolerance() {
        let times: Vec<f64> = (0..=8).map(|k| k as f64).collect();
        let out = integrate(
            |_, y| Ok(vec![C64::new(0.0, -1.0) * y[0]]),
            &[C64::new(1.0, 0.0)],
            &times,
            &Tolerance::default(),
        )
        .unwrap();
        for (t, y) in times.iter().zip(&out) {
            assert!((y[0] - C64::from_polar(1.0, -t)).norm() < 1e-9);
        }
    }

    #[test]
    fn persistent_stage_failure_underflows_step() {
        let r = integrate(
            |t, y| {
                if t > 0.5 {
                    Err(Error::ZeroCollision { time: t, gap: 0.0 })
                } else {
                    Ok(vec![y[0]])
                }
            },
            &[C64::new(1.0, 0.0)],
            &[1.0],
            &Tolerance::default(),
        );
        assert!(matches!(r, Err(Error::StepFailure { time, .. }) if (time - 0.5).abs() < 1e-9));
    }
}
