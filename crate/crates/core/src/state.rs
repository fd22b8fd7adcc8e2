//! Fock vectors, the stellar parametrization `D(alpha) S(chi) sum_n c_n |n>`,
//! and energy-moment diagnostics.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{annihilation, apply_unitary_generator, creation};
use crate::{Error, Result, C64};

/// Discarded norm accepted when truncating to a cutoff.
pub const DISCARD_TOL: f64 = 1e-10;

/// Truncated amplitudes `psi_0..psi_N` in the number basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    coeffs: Vec<C64>,
}

impl FockVector {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("empty amplitude list".into()));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        Ok(Self { coeffs })
    }

    /// Number state `|n>` in a basis of size `cutoff + 1`.
    pub fn basis(n: usize, cutoff: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); cutoff.max(n) + 1];
        coeffs[n] = C64::new(1.0, 0.0);
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn cutoff(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Norm of the amplitudes with index `>= from`.
    pub fn tail_norm(&self, from: usize) -> f64 {
        self.coeffs
            .iter()
            .skip(from)
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Norm carried by the top quarter of the basis.
    pub fn top_quarter_norm(&self) -> f64 {
        let dim = self.coeffs.len();
        self.tail_norm(dim - dim / 4)
    }

    /// Zero-pad or truncate to a new cutoff.
    pub fn with_cutoff(&self, cutoff: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(cutoff + 1, C64::new(0.0, 0.0));
        Self { coeffs }
    }

    pub fn scaled(&self, k: C64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&c| c * k).collect(),
        }
    }

    /// Unnormalized photon addition `psi_n -> sqrt(n) psi_{n-1}`; the cutoff grows by one.
    pub fn create(&self) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0)];
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(n, &c)| c * ((n + 1) as f64).sqrt()),
        );
        Self { coeffs }
    }

    pub fn to_dvector(&self) -> DVector<C64> {
        DVector::from_column_slice(&self.coeffs)
    }
}

pub fn normalize(v: &FockVector) -> Result<FockVector> {
    let n = v.norm();
    if !(n >= 1e-300) {
        return Err(Error::ZeroVector);
    }
    Ok(v.scaled(C64::new(1.0 / n, 0.0)))
}

/// `psi_n -> e^{-i theta n} psi_n`.
pub fn phase_shift(v: &FockVector, theta: f64) -> FockVector {
    FockVector {
        coeffs: v
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, &c)| c * C64::from_polar(1.0, -theta * n as f64))
            .collect(),
    }
}

/// `D(alpha) S(chi) sum_{n<=r} c_n |n>`, with `S(chi) = exp((chi* a^2 - chi a†^2)/2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StellarState {
    core: Vec<C64>,
    alpha: C64,
    chi: C64,
}

impl StellarState {
    pub fn new(core: Vec<C64>, alpha: C64, chi: C64) -> Result<Self> {
        if core.is_empty() {
            return Err(Error::InvalidState("empty core".into()));
        }
        let finite = |c: &C64| c.re.is_finite() && c.im.is_finite();
        if !core.iter().all(finite) || !finite(&alpha) || !finite(&chi) {
            return Err(Error::InvalidState("non-finite parameter".into()));
        }
        let norm2: f64 = core.iter().map(|c| c.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("core squared norm {norm2} != 1")));
        }
        if core.last().unwrap().norm() <= 1e-12 {
            return Err(Error::InvalidState("top core coefficient vanishes".into()));
        }
        Ok(Self { core, alpha, chi })
    }

    /// As [`StellarState::new`] after normalizing the core.
    pub fn from_unnormalized(core: Vec<C64>, alpha: C64, chi: C64) -> Result<Self> {
        let n = core.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(n >= 1e-300) {
            return Err(Error::ZeroVector);
        }
        Self::new(core.into_iter().map(|c| c / n).collect(), alpha, chi)
    }

    /// Number state `|n>`.
    pub fn fock(n: usize) -> Self {
        let mut core = vec![C64::new(0.0, 0.0); n + 1];
        core[n] = C64::new(1.0, 0.0);
        Self {
            core,
            alpha: C64::new(0.0, 0.0),
            chi: C64::new(0.0, 0.0),
        }
    }

    pub fn rank(&self) -> usize {
        self.core.len() - 1
    }

    pub fn core(&self) -> &[C64] {
        &self.core
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn chi(&self) -> C64 {
        self.chi
    }

    /// `max(60, ceil(8 (r + |alpha|^2 + sinh^2 |chi|)))`.
    pub fn default_cutoff(&self) -> usize {
        let mean = self.rank() as f64 + self.alpha.norm_sqr() + self.chi.norm().sinh().powi(2);
        60usize.max((8.0 * mean).ceil() as usize)
    }
}

/// Fock amplitudes of `st` truncated at `cutoff`.
///
/// Squeezing and displacement are applied through their normal-ordered
/// factorizations
///
/// ```text
/// S(chi)   = exp(-e^{i phi} tanh r a†^2 / 2) (cosh r)^{-(n + 1/2)} exp(e^{-i phi} tanh r a^2 / 2)
/// D(alpha) = e^{-|alpha|^2/2} exp(alpha a†) exp(-alpha* a)
/// ```
///
/// in a working space larger than `cutoff`. Each factor is a short series of
/// ladder shifts, so small amplitudes come out with small relative error
/// rather than the absolute `1e-16` floor of a dense exponential. The norm
/// discarded above `cutoff` must be below [`DISCARD_TOL`].
pub fn stellar_to_fock(st: &StellarState, cutoff: usize) -> Result<FockVector> {
    if st.rank() > cutoff {
        return Err(Error::CutoffTooSmall {
            cutoff,
            discarded: 1.0,
        });
    }
    let dim = working_dim(cutoff);
    let mut v = vec![C64::new(0.0, 0.0); dim];
    v[..st.core.len()].copy_from_slice(&st.core);
    let v = displace_in_place(squeeze_in_place(v, st.chi), st.alpha);
    truncate_checked(v, cutoff)
}

/// Same state as [`stellar_to_fock`], built with dense matrix exponentials
/// of the truncated generators. Amplitudes carry an absolute error near
/// machine epsilon.
pub fn stellar_to_fock_expm(st: &StellarState, cutoff: usize) -> Result<FockVector> {
    if st.rank() > cutoff {
        return Err(Error::CutoffTooSmall {
            cutoff,
            discarded: 1.0,
        });
    }
    let dim = working_dim(cutoff);
    let mut v = DVector::from_element(dim, C64::new(0.0, 0.0));
    for (n, &c) in st.core.iter().enumerate() {
        v[n] = c;
    }
    let a = annihilation(dim);
    let ad = creation(dim);
    if st.chi.norm() > 0.0 {
        let g = (&a * &a * st.chi.conj() - &ad * &ad * st.chi) * C64::new(0.5, 0.0);
        v = apply_unitary_generator(&g, &v);
    }
    if st.alpha.norm() > 0.0 {
        let g = &ad * st.alpha - &a * st.alpha.conj();
        v = apply_unitary_generator(&g, &v);
    }
    truncate_checked(v.iter().copied().collect(), cutoff)
}

fn working_dim(cutoff: usize) -> usize {
    cutoff + (cutoff / 2).max(40) + 1
}

fn truncate_checked(v: Vec<C64>, cutoff: usize) -> Result<FockVector> {
    let full = FockVector::new(v)?;
    let discarded = full.tail_norm(cutoff + 1);
    if !(discarded < DISCARD_TOL) {
        return Err(Error::CutoffTooSmall { cutoff, discarded });
    }
    Ok(full.with_cutoff(cutoff))
}

/// `sum_k op^k v / k!` for a ladder shift `op`; the terms vanish once the
/// shift has moved the support past the end of the array.
fn shift_series(v: &[C64], op: impl Fn(&[C64], usize) -> Vec<C64>) -> Vec<C64> {
    let mut out = v.to_vec();
    let mut term = v.to_vec();
    for k in 1..=v.len() {
        term = op(&term, k);
        if term.iter().all(|c| c.norm() == 0.0) {
            break;
        }
        for (o, t) in out.iter_mut().zip(&term) {
            *o += t;
        }
    }
    out
}

/// `(c/k) a^p v` for `p = 1, 2`, keeping the length.
fn lower(v: &[C64], p: usize, c: C64) -> Vec<C64> {
    let n = v.len();
    (0..n)
        .map(|m| {
            if m + p >= n {
                return C64::new(0.0, 0.0);
            }
            let f: f64 = (1..=p).map(|j| ((m + j) as f64).sqrt()).product();
            v[m + p] * c * f
        })
        .collect()
}

/// `(c/k) a†^p v` for `p = 1, 2`, dropping what moves past the end.
fn raise(v: &[C64], p: usize, c: C64) -> Vec<C64> {
    (0..v.len())
        .map(|m| {
            if m < p {
                return C64::new(0.0, 0.0);
            }
            let f: f64 = (0..p).map(|j| ((m - j) as f64).sqrt()).product();
            v[m - p] * c * f
        })
        .collect()
}

fn squeeze_in_place(v: Vec<C64>, chi: C64) -> Vec<C64> {
    let r = chi.norm();
    if r == 0.0 {
        return v;
    }
    let t = r.tanh();
    let right = C64::from_polar(0.5 * t, -chi.arg());
    let left = -C64::from_polar(0.5 * t, chi.arg());
    let mut w = shift_series(&v, |x, k| lower(x, 2, right / k as f64));
    let ln_c = r.cosh().ln();
    for (n, x) in w.iter_mut().enumerate() {
        *x *= (-(n as f64 + 0.5) * ln_c).exp();
    }
    shift_series(&w, |x, k| raise(x, 2, left / k as f64))
}

fn displace_in_place(v: Vec<C64>, alpha: C64) -> Vec<C64> {
    if alpha.norm() == 0.0 {
        return v;
    }
    let w = shift_series(&v, |x, k| lower(x, 1, -alpha.conj() / k as f64));
    let mut u = shift_series(&w, |x, k| raise(x, 1, alpha / k as f64));
    let g = (-0.5 * alpha.norm_sqr()).exp();
    u.iter_mut().for_each(|x| *x *= g);
    u
}

/// [`stellar_to_fock`] starting at the default cutoff and doubling until the
/// discarded norm is acceptable.
pub fn stellar_to_fock_auto(st: &StellarState) -> Result<FockVector> {
    let mut cutoff = st.default_cutoff();
    loop {
        match stellar_to_fock(st, cutoff) {
            Err(Error::CutoffTooSmall { .. }) if cutoff < 1024 => cutoff *= 2,
            other => return other,
        }
    }
}

/// Displace an arbitrary Fock vector, `D(alpha) v`, keeping its cutoff.
pub fn displace(v: &FockVector, alpha: C64) -> Result<FockVector> {
    let cutoff = v.cutoff();
    let w = v.with_cutoff(working_dim(cutoff) - 1);
    truncate_checked(displace_in_place(w.coeffs, alpha), cutoff)
}

/// `S(chi)|0>` truncated at `cutoff`, not renormalized.
///
/// `psi_{2n} = (-e^{i phi} tanh r)^n sqrt((2n)!) / (2^n n!) / sqrt(cosh r)`,
/// generated by the ratio `psi_{2n+2}/psi_{2n} = -e^{i phi} tanh r sqrt((2n+1)/(2n+2))`.
pub fn squeezed_vacuum_fock(chi: C64, cutoff: usize) -> FockVector {
    let r = chi.norm();
    let q = -C64::from_polar(r.tanh(), chi.arg());
    let mut coeffs = vec![C64::new(0.0, 0.0); cutoff + 1];
    coeffs[0] = C64::new(1.0 / r.cosh().sqrt(), 0.0);
    let mut n = 0;
    while 2 * n + 2 <= cutoff {
        let ratio = ((2 * n + 1) as f64 / (2 * n + 2) as f64).sqrt();
        coeffs[2 * n + 2] = coeffs[2 * n] * q * ratio;
        n += 1;
    }
    FockVector { coeffs }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Converged,
    Diverged,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct EnergyMomentReport {
    pub s: f64,
    pub partial_sum: f64,
    pub tail_estimate: f64,
    pub verdict: Verdict,
}

/// Amplitudes below this fraction of the largest `|psi_n|^2` are treated as
/// rounding noise and ignored by the ratio fit.
const NOISE_FLOOR: f64 = 1e-28;

/// Truncated `<s^n>` with a geometric-ratio verdict on the discarded tail.
///
/// The ratio is fitted by least squares to `ln(s^n |psi_n|^2)` over the last
/// ten significant terms. A ratio below `1 - 1e-3` gives `Converged` when the
/// extrapolated tail beyond the cutoff is below `tol`; above `1 + 1e-3` gives
/// `Diverged`.
pub fn energy_moment(v: &FockVector, s: f64, tol: f64) -> Result<EnergyMomentReport> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::InvalidParameter(format!("energy moment needs s > 1, got {s}")));
    }
    let p: Vec<f64> = v.coeffs.iter().map(|c| c.norm_sqr()).collect();
    let partial_sum: f64 = p.iter().enumerate().map(|(n, &x)| s.powi(n as i32) * x).sum();
    let pmax = p.iter().copied().fold(0.0, f64::max);
    let significant: Vec<usize> = (0..p.len())
        .filter(|&n| p[n] > 0.0 && p[n] > NOISE_FLOOR * pmax)
        .collect();
    let report = |tail_estimate: f64, verdict| EnergyMomentReport {
        s,
        partial_sum,
        tail_estimate,
        verdict,
    };
    if significant.len() < 2 {
        return Ok(report(0.0, Verdict::Converged));
    }
    let fit: Vec<usize> = significant.iter().rev().take(10).rev().copied().collect();
    let xs: Vec<f64> = fit.iter().map(|&n| n as f64).collect();
    let ys: Vec<f64> = fit.iter().map(|&n| n as f64 * s.ln() + p[n].ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let ratio = (sxy / sxx).exp();

    let last = *fit.last().unwrap();
    let t_last = (ys[ys.len() - 1]).exp();
    if ratio < 1.0 - 1e-3 {
        // geometric continuation from the last significant term past the cutoff
        let gap = (v.cutoff() + 1 - last) as i32;
        let tail = t_last * ratio.powi(gap) / (1.0 - ratio);
        let verdict = if tail < tol {
            Verdict::Converged
        } else {
            Verdict::Inconclusive
        };
        Ok(report(tail, verdict))
    } else if ratio > 1.0 + 1e-3 {
        Ok(report(f64::INFINITY, Verdict::Diverged))
    } else {
        Ok(report(f64::INFINITY, Verdict::Inconclusive))
    }
}

/// Seeded fixture: i.i.d. complex normal core, `|alpha|, |chi| <= scale`
/// drawn uniformly from the disc.
pub fn random_stellar_state(rank: usize, seed: u64, scale: f64) -> StellarState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    };
    let mut core: Vec<C64> = (0..=rank).map(|_| normal()).collect();
    let norm = core.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    core.iter_mut().for_each(|c| *c /= norm);
    while core[rank].norm() <= 1e-6 {
        core = (0..=rank).map(|_| normal()).collect();
        let norm = core.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        core.iter_mut().for_each(|c| *c /= norm);
    }
    let mut disc = || {
        let u: f64 = rng.random();
        let phi: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        C64::from_polar(scale * u.sqrt(), phi)
    };
    let alpha = disc();
    let chi = disc();
    StellarState { core, alpha, chi }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn fv(v: &[f64]) -> FockVector {
        FockVector::new(v.iter().map(|&x| c(x, 0.0)).collect()).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&fv(&[1.0, 0.0, 0.0])).unwrap(), fv(&[1.0, 0.0, 0.0]));
        assert_eq!(normalize(&fv(&[2.0, 0.0])).unwrap(), fv(&[1.0, 0.0]));
        let h = normalize(&fv(&[1.0, 1.0])).unwrap();
        for a in h.coeffs() {
            assert!((a.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        }
        assert!(matches!(normalize(&fv(&[0.0, 0.0])), Err(Error::ZeroVector)));
    }

    #[test]
    fn phase_shift_examples() {
        let v = fv(&[0.0, 1.0]);
        assert_eq!(phase_shift(&v, 0.0), v);
        let q = phase_shift(&v, std::f64::consts::FRAC_PI_2);
        assert!((q.coeffs()[1] - c(0.0, -1.0)).norm() < 1e-15);
        let w = normalize(&fv(&[0.3, -0.2, 0.9, 0.1])).unwrap();
        let full = phase_shift(&w, std::f64::consts::TAU);
        for (a, b) in full.coeffs().iter().zip(w.coeffs()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn energy_moment_finite_vectors() {
        let vac = FockVector::basis(0, 20);
        let r = energy_moment(&vac, 2.0, 1e-8).unwrap();
        assert_eq!(r.partial_sum, 1.0);
        assert_eq!(r.verdict, Verdict::Converged);
        let one = FockVector::basis(1, 20);
        let r = energy_moment(&one, 3.0, 1e-8).unwrap();
        assert_eq!(r.partial_sum, 3.0);
        assert_eq!(r.verdict, Verdict::Converged);
        assert!(energy_moment(&one, 1.0, 1e-8).is_err());
    }

    #[test]
    fn squeezed_vacuum_verdict_flips_at_inverse_tanh() {
        // tanh r = 0.5, critical s = 2
        let r = 0.5f64.atanh();
        let v = squeezed_vacuum_fock(c(r, 0.0), 2000);
        assert_eq!(energy_moment(&v, 1.8, 1e-6).unwrap().verdict, Verdict::Converged);
        assert_eq!(energy_moment(&v, 2.2, 1e-6).unwrap().verdict, Verdict::Diverged);
    }

    #[test]
    fn squeezed_vacuum_formula() {
        let v = squeezed_vacuum_fock(c(0.0, 0.0), 6);
        assert_eq!(v.coeffs()[0], c(1.0, 0.0));
        assert!(v.coeffs()[1..].iter().all(|a| a.norm() == 0.0));

        let r = 0.4;
        let v = squeezed_vacuum_fock(c(r, 0.0), 60);
        assert!(v.coeffs().iter().skip(1).step_by(2).all(|a| a.norm() == 0.0));
        let ratio = v.coeffs()[2] / v.coeffs()[0];
        assert!((ratio - c(-r.tanh() / 2f64.sqrt(), 0.0)).norm() < 1e-15);
        // closed product against the direct factorial formula at n = 3
        let n = 3;
        let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
        let direct = (-r.tanh()).powi(n) * fact(2 * n as u32).sqrt()
            / (2f64.powi(n) * fact(n as u32))
            / r.cosh().sqrt();
        assert!((v.coeffs()[6].re - direct).abs() < 1e-15);
    }

    #[test]
    fn stellar_to_fock_trivial_states() {
        let vac = stellar_to_fock(&StellarState::fock(0), 60).unwrap();
        assert_eq!(vac, FockVector::basis(0, 60));
        let one = stellar_to_fock(&StellarState::fock(1), 60).unwrap();
        assert_eq!(one, FockVector::basis(1, 60));
    }

    #[test]
    fn cutoff_too_small_is_reported() {
        let st = StellarState::new(vec![c(1.0, 0.0)], c(4.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!(matches!(
            stellar_to_fock(&st, 10),
            Err(Error::CutoffTooSmall { .. })
        ));
        assert!(stellar_to_fock_auto(&st).is_ok());
    }

    #[test]
    fn random_state_postconditions() {
        let a = random_stellar_state(0, 7, 1.0);
        assert!((a.core()[0].norm() - 1.0).abs() < 1e-12);
        assert_eq!(a, random_stellar_state(0, 7, 1.0));
        let b = random_stellar_state(3, 1, 1.0);
        assert!(b.core()[3].norm() > 1e-6);
        assert!(b.alpha().norm() <= 1.0 && b.chi().norm() <= 1.0);
        assert!(StellarState::new(b.core().to_vec(), b.alpha(), b.chi()).is_ok());
    }

    #[test]
    fn state_validation() {
        assert!(StellarState::new(vec![c(1.0, 0.0), c(0.0, 0.0)], c(0.0, 0.0), c(0.0, 0.0)).is_err());
        assert!(StellarState::new(vec![c(0.5, 0.0)], c(0.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn photon_addition_shifts_amplitudes() {
        let v = fv(&[0.6, 0.8]);
        let w = v.create();
        assert_eq!(w.coeffs()[0], c(0.0, 0.0));
        assert_eq!(w.coeffs()[1], c(0.6, 0.0));
        assert!((w.coeffs()[2].re - 0.8 * 2f64.sqrt()).abs() < 1e-15);
    }
}
