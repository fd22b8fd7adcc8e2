//! Entire extensions of a Fock vector: the position wavefunction through its
//! Hermite series, and the stellar (Bargmann) function.

use crate::state::{energy_moment, FockVector, Verdict};
use crate::{Error, Result, C64};

/// Relative error accepted by [`eval_entire`].
pub const PRECISION_TOL: f64 = 1e-8;

/// Tolerance on the extrapolated tail when checking the energy precondition.
const ENERGY_TOL: f64 = 1e-8;

/// Value of the truncated Hermite series together with a rounding-error estimate.
#[derive(Clone, Copy, Debug)]
pub struct SeriesValue {
    pub value: C64,
    pub error: f64,
}

/// `pi^{-1/4} e^{-z^2/2} sum_n psi_n h_n(z)` with `h_n` the normalized Hermite
/// polynomials, `h_{n+1} = sqrt(2/(n+1)) z h_n - sqrt(n/(n+1)) h_{n-1}`.
///
/// The recurrence is rescaled whenever `|h_n|` exceeds `1e150`. The error
/// estimate is `eps sqrt(N+1) sum_n |psi_n h_n|` times the Gaussian prefactor,
/// treating the rounding errors of the terms as independent.
pub fn hermite_series(v: &FockVector, z: C64) -> SeriesValue {
    const BIG: f64 = 1e150;
    let psi = v.coeffs();
    let mut h_prev = C64::new(0.0, 0.0);
    let mut h = C64::new(1.0, 0.0);
    let mut sum = psi[0];
    let mut abs_sum = psi[0].norm();
    // all of h, h_prev, sum, abs_sum carry a common factor e^{-log_scale}
    let mut log_scale = 0.0;
    for n in 0..psi.len() - 1 {
        let nf = n as f64;
        let h_next = (2.0 / (nf + 1.0)).sqrt() * z * h - (nf / (nf + 1.0)).sqrt() * h_prev;
        h_prev = h;
        h = h_next;
        let term = psi[n + 1] * h;
        sum += term;
        abs_sum += term.norm();
        if h.norm() > BIG {
            h /= BIG;
            h_prev /= BIG;
            sum /= BIG;
            abs_sum /= BIG;
            log_scale += BIG.ln();
        }
    }
    let log_pre = -0.25 * std::f64::consts::PI.ln() + log_scale;
    let pre = (-z * z / 2.0 + log_pre).exp();
    let eps = f64::EPSILON * (psi.len() as f64).sqrt();
    SeriesValue {
        value: sum * pre,
        error: eps * abs_sum * pre.norm(),
    }
}

/// Position wavefunction at complex `z`, failing with `PrecisionLoss` when
/// the rounding estimate exceeds `1e-8 |value|`.
pub fn eval_entire(v: &FockVector, z: C64) -> Result<C64> {
    let s = hermite_series(v, z);
    check(s, z, PRECISION_TOL)
}

pub(crate) fn check(s: SeriesValue, z: C64, tol: f64) -> Result<C64> {
    if !(s.value.re.is_finite() && s.value.im.is_finite()) || s.error > tol * s.value.norm() {
        return Err(Error::PrecisionLoss {
            z,
            estimate: s.error,
            value: s.value.norm(),
        });
    }
    Ok(s.value)
}

/// Truncated stellar function `sum_n psi_n z^n / sqrt(n!)`.
pub fn stellar_eval(v: &FockVector, z: C64) -> C64 {
    let mut term = C64::new(1.0, 0.0);
    let mut sum = C64::new(0.0, 0.0);
    for (n, &c) in v.coeffs().iter().enumerate() {
        if n > 0 {
            term *= z / (n as f64).sqrt();
        }
        sum += c * term;
    }
    sum
}

#[derive(Clone, Debug)]
pub struct GrowthBound {
    pub k_bound: f64,
    pub l_bound: f64,
    pub s_used: f64,
    pub alpha_used: f64,
}

impl GrowthBound {
    pub fn holds_at(&self, v: &FockVector, z: C64) -> Result<bool> {
        let psi = hermite_series(v, z).value;
        Ok(psi.norm_sqr() <= self.k_bound * (self.l_bound * z.norm_sqr()).exp())
    }
}

/// Constants with `|psi(z)|^2 <= K exp(L |z|^2)`.
///
/// `t = s^alpha`, `C = max(1, max_p t^p sqrt(2p+1) / s^{(2p+1)/4})` over
/// `p <= N`, `K = C^2 sqrt(s) / ((sqrt(s) - 1) sqrt(pi)) <s^n>` and
/// `L = 1 + 2/e + 8/(t - 1)`. `alpha = 0` makes `L` infinite and is rejected.
pub fn growth_bound(v: &FockVector, s: f64, alpha: f64) -> Result<GrowthBound> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::InvalidParameter(format!("growth bound needs s > 1, got {s}")));
    }
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "growth bound needs 0 < alpha < 1/2, got {alpha}"
        )));
    }
    let report = energy_moment(v, s, ENERGY_TOL)?;
    if report.verdict != Verdict::Converged {
        return Err(Error::InvalidParameter(format!(
            "energy moment at s = {s} is {:?}",
            report.verdict
        )));
    }
    let t = s.powf(alpha);
    let c = (0..=v.cutoff())
        .map(|p| {
            let p = p as f64;
            (p * t.ln() + (2.0 * p + 1.0).sqrt().ln() - (2.0 * p + 1.0) / 4.0 * s.ln()).exp()
        })
        .fold(1.0, f64::max);
    let k_bound = c * c * s.sqrt() / ((s.sqrt() - 1.0) * std::f64::consts::PI.sqrt()) * report.partial_sum;
    let l_bound = 1.0 + 2.0 / std::f64::consts::E + 8.0 / (t - 1.0);
    Ok(GrowthBound {
        k_bound,
        l_bound,
        s_used: s,
        alpha_used: alpha,
    })
}
