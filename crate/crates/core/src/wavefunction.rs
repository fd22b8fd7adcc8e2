//! Closed polynomial x Gaussian form of finite-rank wavefunctions.
//!
//! A wavefunction is stored as `leading * prod_k (z - zeros[k]) * exp(g2 z^2 + g1 z + g0)`.
//! `Re g2 < 0` keeps it square-integrable on the real line.

use crate::contour::{count_zeros_box, Rect};
use crate::poly;
use crate::quadrature;
use crate::state::StellarState;
use crate::{Error, Result, C64};

/// Samples per edge used by the Hudson test.
const HUDSON_SAMPLES: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct WavefunctionForm {
    g2: C64,
    g1: C64,
    g0: C64,
    zeros: Vec<C64>,
    leading: C64,
}

impl WavefunctionForm {
    pub fn new(g2: C64, g1: C64, g0: C64, zeros: Vec<C64>, leading: C64) -> Result<Self> {
        let finite = |c: &C64| c.re.is_finite() && c.im.is_finite();
        if !(g2.re < 0.0) {
            return Err(Error::InvalidParameter(format!("Re g2 must be negative, got {g2}")));
        }
        if !finite(&g1) || !finite(&g0) || !finite(&leading) || !zeros.iter().all(finite) {
            return Err(Error::InvalidParameter("non-finite form parameter".into()));
        }
        if leading.norm() == 0.0 {
            return Err(Error::DegenerateLeadingCoefficient { magnitude: 0.0 });
        }
        Ok(Self {
            g2,
            g1,
            g0,
            zeros,
            leading,
        })
    }

    /// Unit-norm form with the given Gaussian exponent and zeros; `leading`
    /// is taken real and positive.
    pub fn from_zeros(g2: C64, g1: C64, zeros: Vec<C64>) -> Result<Self> {
        Self::new(g2, g1, C64::new(0.0, 0.0), zeros, C64::new(1.0, 0.0))?.normalized()
    }

    pub fn g2(&self) -> C64 {
        self.g2
    }

    pub fn g1(&self) -> C64 {
        self.g1
    }

    pub fn g0(&self) -> C64 {
        self.g0
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn leading(&self) -> C64 {
        self.leading
    }

    pub fn rank(&self) -> usize {
        self.zeros.len()
    }

    /// Coefficients of `P`, constant term first.
    pub fn polynomial(&self) -> Vec<C64> {
        poly::from_roots(&self.zeros, self.leading)
    }

    pub fn eval(&self, z: C64) -> C64 {
        let p = self.zeros.iter().fold(self.leading, |acc, &l| acc * (z - l));
        p * (self.g2 * z * z + self.g1 * z + self.g0).exp()
    }

    /// `ln int |psi(x)|^2 dx`, by Gauss-Hermite quadrature after completing
    /// the square in the Gaussian envelope.
    pub fn log_norm_sqr(&self) -> f64 {
        let kappa = -2.0 * self.g2.re;
        let mu = self.g1.re / kappa;
        let sk = kappa.sqrt();
        let rule = quadrature::standard();
        let s = rule.integrate(|y| {
            let x = mu + y / sk;
            self.zeros.iter().map(|l| (C64::new(x, 0.0) - l).norm_sqr()).product()
        });
        s.ln() + self.leading.norm_sqr().ln() + kappa * mu * mu + 2.0 * self.g0.re - 0.5 * kappa.ln()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.log_norm_sqr().exp()
    }

    /// Same zeros and phase, `g0` shifted so the real-line norm is one.
    pub fn normalized(&self) -> Result<Self> {
        let ln = self.log_norm_sqr();
        if !ln.is_finite() {
            return Err(Error::ZeroVector);
        }
        let mut out = self.clone();
        out.g0 -= C64::new(0.5 * ln, 0.0);
        Ok(out)
    }

    /// Multiply by a global phase `e^{i theta}`.
    pub fn with_phase(&self, theta: f64) -> Self {
        let mut out = self.clone();
        out.g0 += C64::new(0.0, theta);
        out
    }

    /// `sum_k coeffs[k] (a†)^k psi` with `a† = (x - d/dx)/sqrt(2)`, unnormalized.
    pub fn apply_creation_polynomial(&self, coeffs: &[C64]) -> Result<Self> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ladder = Ladder {
            u: C64::new(s, 0.0),
            v: C64::new(-s, 0.0),
            w: C64::new(0.0, 0.0),
        };
        let base = self.polynomial();
        let q = ladder.horner(coeffs, &base, self.g2, self.g1);
        self.with_polynomial(q)
    }

    fn with_polynomial(&self, q: Vec<C64>) -> Result<Self> {
        let q = trim(q)?;
        let leading = *q.last().unwrap();
        let zeros = poly::roots_polynomial(&q)?;
        Self::new(self.g2, self.g1, self.g0, zeros, leading)
    }
}

/// A first-order operator `u x + v d/dx + w` acting on `Q(x) e^{g2 x^2 + g1 x}`,
/// which maps the polynomial part `Q` to `(u + 2 v g2) x Q + v Q' + (w + v g1) Q`.
struct Ladder {
    u: C64,
    v: C64,
    w: C64,
}

impl Ladder {
    fn apply(&self, q: &[C64], g2: C64, g1: C64) -> Vec<C64> {
        let lin = self.u + 2.0 * self.v * g2;
        let cst = self.w + self.v * g1;
        let mut out = vec![C64::new(0.0, 0.0); q.len() + 1];
        for (k, &c) in q.iter().enumerate() {
            out[k + 1] += lin * c;
            out[k] += cst * c;
            if k > 0 {
                out[k - 1] += self.v * c * k as f64;
            }
        }
        out
    }

    /// `sum_n d[n] O^n base` by Horner's scheme.
    fn horner(&self, d: &[C64], base: &[C64], g2: C64, g1: C64) -> Vec<C64> {
        let scaled = |k: C64| base.iter().map(|&b| b * k).collect::<Vec<_>>();
        let mut q = scaled(d[d.len() - 1]);
        for &dn in d.iter().rev().skip(1) {
            q = self.apply(&q, g2, g1);
            for (qk, bk) in q.iter_mut().zip(scaled(dn)) {
                *qk += bk;
            }
        }
        q
    }
}

/// Drop exactly-zero top coefficients; reject a numerically vanished leading term.
fn trim(mut q: Vec<C64>) -> Result<Vec<C64>> {
    let scale = poly::scale(&q);
    while q.len() > 1 && q.last().unwrap().norm() == 0.0 {
        q.pop();
    }
    let lead = q.last().unwrap().norm();
    if scale == 0.0 || lead < 1e-12 * scale {
        return Err(Error::DegenerateLeadingCoefficient { magnitude: lead });
    }
    Ok(q)
}

/// Normalized wavefunction of `D(alpha) S(chi) |0>`.
///
/// With `chi = r e^{i phi}`, `c = cosh r`, `s = e^{i phi} sinh r`,
/// `q0 = sqrt(2) Re alpha`, `p0 = sqrt(2) Im alpha`:
/// `g2 = -(c + s) / (2 (c - s))`, `g1 = -2 g2 q0 + i p0`,
/// `g0 = ln(pi^{-1/4} / sqrt(c - s)) - i q0 p0 / 2 + g2 q0^2`.
pub fn gaussian_packet_params(alpha: C64, chi: C64) -> WavefunctionForm {
    let r = chi.norm();
    let c = C64::new(r.cosh(), 0.0);
    let s = C64::from_polar(r.sinh(), chi.arg());
    let q0 = std::f64::consts::SQRT_2 * alpha.re;
    let p0 = std::f64::consts::SQRT_2 * alpha.im;
    let g2 = -(c + s) / (2.0 * (c - s));
    let g1 = -2.0 * g2 * q0 + C64::new(0.0, p0);
    let g0 = (C64::new(std::f64::consts::PI.powf(-0.25), 0.0) / (c - s).sqrt()).ln()
        - C64::new(0.0, q0 * p0 / 2.0)
        + g2 * q0 * q0;
    WavefunctionForm {
        g2,
        g1,
        g0,
        zeros: Vec::new(),
        leading: C64::new(1.0, 0.0),
    }
}

/// Closed form of `D(alpha) S(chi) sum_n c_n |n>`.
///
/// Writing the state as `T P(a†) |0>` with `T = D S`, each `a†` becomes
/// `T a† T^dagger = u x + v d/dx + w` acting on the packet `T|0>`, so the
/// polynomial is built by Horner's scheme in that operator. The result is
/// normalized because `T` is unitary.
pub fn build_wavefunction(st: &StellarState) -> Result<WavefunctionForm> {
    let packet = gaussian_packet_params(st.alpha(), st.chi());
    let r = st.chi().norm();
    let c = r.cosh();
    let s = C64::from_polar(r.sinh(), -st.chi().arg());
    let alpha = st.alpha();
    let k = std::f64::consts::FRAC_1_SQRT_2;
    let ladder = Ladder {
        u: (c + s) * k,
        v: (s - c) * k,
        w: -(alpha.conj() * c + s * alpha),
    };
    let mut fact = 1.0;
    let d: Vec<C64> = st
        .core()
        .iter()
        .enumerate()
        .map(|(n, &cn)| {
            if n > 0 {
                fact *= n as f64;
            }
            cn / fact.sqrt()
        })
        .collect();
    let q = ladder.horner(&d, &[C64::new(1.0, 0.0)], packet.g2, packet.g1);
    let q = trim(q)?;
    if q.len() != st.rank() + 1 {
        return Err(Error::DegenerateLeadingCoefficient { magnitude: 0.0 });
    }
    packet.with_polynomial(q)
}

pub fn eval_form(wf: &WavefunctionForm, z: C64) -> C64 {
    wf.eval(z)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HudsonVerdict {
    Gaussian,
    NonGaussianWithZeros(usize),
}

/// Argument-principle zero count of the closed form over `[-h, h]^2`.
pub fn hudson_test(st: &StellarState, box_halfwidth: f64) -> Result<HudsonVerdict> {
    let wf = build_wavefunction(st)?;
    hudson_test_form(&wf, box_halfwidth)
}

pub fn hudson_test_form(wf: &WavefunctionForm, box_halfwidth: f64) -> Result<HudsonVerdict> {
    let h = box_halfwidth;
    if wf.zeros.iter().any(|z| !(z.re.abs() < h && z.im.abs() < h)) {
        return Err(Error::BoxTooSmall { halfwidth: h });
    }
    let count = count_zeros_box(|z| Ok(wf.eval(z)), &Rect::square(h), HUDSON_SAMPLES)?;
    Ok(verdict(count))
}

fn verdict(count: usize) -> HudsonVerdict {
    if count == 0 {
        HudsonVerdict::Gaussian
    } else {
        HudsonVerdict::NonGaussianWithZeros(count)
    }
}
