//! Zero dynamics under quadratic Hamiltonians.
//!
//! With `psi(z, t) = e^{a z^2 + b z + c} prod_k (z - lambda_k)` the Schrödinger
//! equation closes on `(a, b, lambda_k)`:
//!
//! ```text
//! a' = 4iB a^2 - 2C a - iA
//! b' = 4iB a b - C b - 2E a - iD
//! lambda_k' = lambda_k (C - 4iB a) - 2iB b + E - 2iB sum_{m != k} 1/(lambda_k - lambda_m)
//! ```
//!
//! The zeros also follow a Calogero-Moser flow solved exactly by the
//! eigenvalues of `X(t) = Lambda e^{-i w t} + L sin(w t)/w` in scaled and
//! shifted coordinates (see [`LaxData`]).

pub mod eig;
pub mod rk;
pub mod tracking;

use nalgebra::DMatrix;

use crate::wavefunction::WavefunctionForm;
use crate::{Error, Result, C64, I};

pub use rk::Tolerance;

/// Minimum pairwise gap tolerated by the first-order system.
pub const COLLISION_GAP: f64 = 1e-9;
/// Minimum initial gap required before integrating or building the Lax matrix.
pub const INITIAL_GAP: f64 = 1e-6;

/// `A x^2 + B p^2 + C (xp + px)/2 + D x + E p + F`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticHamiltonian {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl QuadraticHamiltonian {
    pub fn new(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Result<Self> {
        let h = Self { a, b, c, d, e, f };
        if h.coefficients().iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite Hamiltonian coefficient".into()));
        }
        Ok(h)
    }

    /// `n + 1/2 = (x^2 + p^2)/2`.
    pub fn phase_shift() -> Self {
        Self { a: 0.5, b: 0.5, c: 0.0, d: 0.0, e: 0.0, f: 0.0 }
    }

    pub fn constant(f: f64) -> Self {
        Self { a: 0.0, b: 0.0, c: 0.0, d: 0.0, e: 0.0, f }
    }

    pub fn coefficients(&self) -> [f64; 6] {
        [self.a, self.b, self.c, self.d, self.e, self.f]
    }

    /// `4AB - C^2`.
    pub fn omega2(&self) -> f64 {
        4.0 * self.a * self.b - self.c * self.c
    }

    /// All coefficients negated; evolving with it undoes evolution with `self`.
    pub fn reversed(&self) -> Self {
        Self {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
            e: -self.e,
            f: -self.f,
        }
    }
}

fn min_gap(zeros: &[C64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..zeros.len() {
        for j in (i + 1)..zeros.len() {
            gap = gap.min((zeros[i] - zeros[j]).norm());
        }
    }
    gap
}

/// Right-hand side of the first-order system at `(g2, g1, zeros)`.
pub fn ode_rhs(
    g2: C64,
    g1: C64,
    zeros: &[C64],
    h: &QuadraticHamiltonian,
) -> Result<(C64, C64, Vec<C64>)> {
    let gap = min_gap(zeros);
    if gap <= COLLISION_GAP {
        return Err(Error::ZeroCollision { time: 0.0, gap });
    }
    let (a, b) = (g2, g1);
    let da = 4.0 * I * h.b * a * a - 2.0 * h.c * a - I * h.a;
    let db = 4.0 * I * h.b * a * b - h.c * b - 2.0 * h.e * a - I * h.d;
    let drift = h.c - 4.0 * I * h.b * a;
    let offset = -2.0 * I * h.b * b + h.e;
    let dz = zeros
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            let pair: C64 = zeros
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != k)
                .map(|(_, &lm)| 1.0 / (l - lm))
                .sum();
            l * drift + offset - 2.0 * I * h.b * pair
        })
        .collect();
    Ok((da, db, dz))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Ode,
    ClosedForm,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Ode => "ode",
            Method::ClosedForm => "closed",
        }
    }
}

/// Initial data a trajectory was computed from.
#[derive(Clone, Debug)]
pub struct Origin {
    pub form: WavefunctionForm,
    pub hamiltonian: QuadraticHamiltonian,
}

/// Zeros sampled on a time grid, `paths[k][i]` being zero `k` at `times[i]`.
#[derive(Clone, Debug)]
pub struct ZeroTrajectory {
    pub times: Vec<f64>,
    pub paths: Vec<Vec<C64>>,
    pub gauss_path: Vec<(C64, C64)>,
    pub method: Method,
    pub origin: Option<Origin>,
}

impl ZeroTrajectory {
    pub fn rank(&self) -> usize {
        self.paths.len()
    }

    pub fn zeros_at(&self, i: usize) -> Vec<C64> {
        self.paths.iter().map(|p| p[i]).collect()
    }

    /// Unit-norm form at sample `i`; the global phase is not tracked.
    pub fn form_at(&self, i: usize) -> Result<WavefunctionForm> {
        let (g2, g1) = self.gauss_path[i];
        let leading = self
            .origin
            .as_ref()
            .map_or(C64::new(1.0, 0.0), |o| o.form.leading());
        WavefunctionForm::new(g2, g1, C64::new(0.0, 0.0), self.zeros_at(i), leading)?.normalized()
    }
}

fn check_times(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() || !(t_grid[0] >= 0.0) || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("time grid must increase from t >= 0".into()));
    }
    Ok(())
}

/// Adaptive Dormand-Prince integration of the first-order system.
pub fn integrate(
    wf: &WavefunctionForm,
    h: &QuadraticHamiltonian,
    t_grid: &[f64],
) -> Result<ZeroTrajectory> {
    integrate_with(wf, h, t_grid, &Tolerance::default())
}

pub fn integrate_with(
    wf: &WavefunctionForm,
    h: &QuadraticHamiltonian,
    t_grid: &[f64],
    tol: &Tolerance,
) -> Result<ZeroTrajectory> {
    check_times(t_grid)?;
    let gap = min_gap(wf.zeros());
    if gap <= INITIAL_GAP {
        return Err(Error::DegenerateInitialZeros { gap });
    }
    let r = wf.rank();
    let mut y0 = vec![wf.g2(), wf.g1()];
    y0.extend_from_slice(wf.zeros());
    let rhs = |t: f64, y: &[C64]| -> Result<Vec<C64>> {
        let (da, db, dz) = ode_rhs(y[0], y[1], &y[2..], h).map_err(|e| match e {
            Error::ZeroCollision { gap, .. } => Error::ZeroCollision { time: t, gap },
            other => other,
        })?;
        let mut out = Vec::with_capacity(y.len());
        out.push(da);
        out.push(db);
        out.extend(dz);
        Ok(out)
    };
    let samples = rk::integrate(rhs, &y0, t_grid, tol)?;
    if samples.iter().any(|y| !y.iter().all(|c| c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::StepFailure { time: f64::NAN, step: 0.0 });
    }
    Ok(ZeroTrajectory {
        times: t_grid.to_vec(),
        paths: (0..r).map(|k| samples.iter().map(|y| y[2 + k]).collect()).collect(),
        gauss_path: samples.iter().map(|y| (y[0], y[1])).collect(),
        method: Method::Ode,
        origin: Some(Origin {
            form: wf.clone(),
            hamiltonian: *h,
        }),
    })
}

/// `(g2, g1)` at each time from the Riccati and linear equations alone.
pub fn gaussian_path(g2: C64, g1: C64, h: &QuadraticHamiltonian, t_grid: &[f64]) -> Result<Vec<(C64, C64)>> {
    check_times(t_grid)?;
    let rhs = |_: f64, y: &[C64]| -> Result<Vec<C64>> {
        let (da, db, _) = ode_rhs(y[0], y[1], &[], h)?;
        Ok(vec![da, db])
    };
    let samples = rk::integrate(rhs, &[g2, g1], t_grid, &Tolerance::default())?;
    Ok(samples.into_iter().map(|y| (y[0], y[1])).collect())
}

/// Which exponential multiplies the initial zeros in the matrix solution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RotationSign {
    /// `Lambda e^{-i w t}`, consistent with the first-order system.
    #[default]
    Corrected,
    /// `Lambda e^{+i w t}`; kept only to show that it disagrees with the ODE.
    Literal,
}

/// Data of the exact matrix solution in scaled coordinates
/// `mu = (lambda - shift) / scale`, `scale = (4B^2)^{1/4}`,
/// `shift = (CE - 2BD) / w^2`.
#[derive(Clone, Debug)]
pub struct LaxData {
    /// Initial scaled zeros (the diagonal of `Lambda`).
    pub lambda0: Vec<C64>,
    pub lmat: DMatrix<C64>,
    pub omega: C64,
    pub shift: C64,
    pub scale: C64,
}

impl LaxData {
    pub fn new(wf: &WavefunctionForm, h: &QuadraticHamiltonian) -> Result<Self> {
        if h.b.abs() <= 1e-12 {
            return Err(Error::UnsupportedHamiltonian("B = 0".into()));
        }
        let w2 = h.omega2();
        if w2.abs() <= 1e-12 {
            return Err(Error::UnsupportedHamiltonian("omega^2 = 0".into()));
        }
        let gap = min_gap(wf.zeros());
        if gap <= INITIAL_GAP {
            return Err(Error::DegenerateInitialZeros { gap });
        }
        let omega = C64::new(w2, 0.0).sqrt();
        let shift = C64::new((h.c * h.e - 2.0 * h.b * h.d) / w2, 0.0);
        let scale = C64::new(4.0 * h.b * h.b, 0.0).powf(0.25);
        let (_, _, dz) = ode_rhs(wf.g2(), wf.g1(), wf.zeros(), h)?;
        let mu: Vec<C64> = wf.zeros().iter().map(|&l| (l - shift) / scale).collect();
        let r = mu.len();
        let lmat = DMatrix::from_fn(r, r, |j, k| {
            if j == k {
                dz[j] / scale + I * omega * mu[j]
            } else {
                I / (mu[j] - mu[k])
            }
        });
        Ok(Self {
            lambda0: mu,
            lmat,
            omega,
            shift,
            scale,
        })
    }

    /// `X(t)` in scaled coordinates.
    pub fn matrix(&self, t: f64, sign: RotationSign) -> DMatrix<C64> {
        let wt = self.omega * t;
        let rot = match sign {
            RotationSign::Corrected => (-I * wt).exp(),
            RotationSign::Literal => (I * wt).exp(),
        };
        let sinc = wt.sin() / self.omega;
        let mut x = &self.lmat * sinc;
        for (j, &m) in self.lambda0.iter().enumerate() {
            x[(j, j)] += m * rot;
        }
        x
    }

    /// Zeros at time `t` in the original coordinates.
    pub fn zeros(&self, t: f64, sign: RotationSign) -> Result<Vec<C64>> {
        if self.lambda0.is_empty() {
            return Ok(Vec::new());
        }
        let ev = eig::eigenvalues(&self.matrix(t, sign))?;
        Ok(ev.into_iter().map(|m| m * self.scale + self.shift).collect())
    }
}

/// Zeros at time `t` from the exact matrix solution.
pub fn closed_form(wf: &WavefunctionForm, h: &QuadraticHamiltonian, t: f64) -> Result<Vec<C64>> {
    closed_form_with(wf, h, t, RotationSign::Corrected)
}

pub fn closed_form_with(
    wf: &WavefunctionForm,
    h: &QuadraticHamiltonian,
    t: f64,
    sign: RotationSign,
) -> Result<Vec<C64>> {
    if t == 0.0 {
        // X(0) is diagonal; skip the eigen-solve so the initial zeros come back exactly
        LaxData::new(wf, h)?;
        return Ok(wf.zeros().to_vec());
    }
    LaxData::new(wf, h)?.zeros(t, sign)
}

/// Maximum subdivision depth when a tracking step looks unsafe.
const MAX_TRACK_DEPTH: usize = 12;

/// Continuity-matched closed-form trajectory.
///
/// Consecutive eigenvalue sets are matched by optimal assignment. A step is
/// refined by bisection when some matched displacement exceeds ten times the
/// median displacement, unless every displacement is below a quarter of the
/// smallest gap between the previous zeros (where the matching cannot be
/// ambiguous).
pub fn closed_form_trajectory(
    wf: &WavefunctionForm,
    h: &QuadraticHamiltonian,
    t_grid: &[f64],
) -> Result<ZeroTrajectory> {
    closed_form_trajectory_with(wf, h, t_grid, RotationSign::Corrected)
}

pub fn closed_form_trajectory_with(
    wf: &WavefunctionForm,
    h: &QuadraticHamiltonian,
    t_grid: &[f64],
    sign: RotationSign,
) -> Result<ZeroTrajectory> {
    check_times(t_grid)?;
    let lax = LaxData::new(wf, h)?;
    let gauss_path = gaussian_path(wf.g2(), wf.g1(), h, t_grid)?;
    let mut prev_t = 0.0;
    let mut prev = wf.zeros().to_vec();
    let mut samples = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        prev = track(&lax, sign, prev_t, &prev, t, 0)?;
        prev_t = t;
        samples.push(prev.clone());
    }
    let r = wf.rank();
    Ok(ZeroTrajectory {
        times: t_grid.to_vec(),
        paths: (0..r).map(|k| samples.iter().map(|z| z[k]).collect()).collect(),
        gauss_path,
        method: Method::ClosedForm,
        origin: Some(Origin {
            form: wf.clone(),
            hamiltonian: *h,
        }),
    })
}

fn track(lax: &LaxData, sign: RotationSign, t0: f64, prev: &[C64], t1: f64, depth: usize) -> Result<Vec<C64>> {
    if t1 == t0 || prev.is_empty() {
        return Ok(prev.to_vec());
    }
    let next = tracking::align(prev, &lax.zeros(t1, sign)?);
    if depth >= MAX_TRACK_DEPTH || step_is_safe(prev, &next) {
        return Ok(next);
    }
    let mid = 0.5 * (t0 + t1);
    let at_mid = track(lax, sign, t0, prev, mid, depth + 1)?;
    track(lax, sign, mid, &at_mid, t1, depth + 1)
}

fn step_is_safe(prev: &[C64], next: &[C64]) -> bool {
    let mut d: Vec<f64> = prev.iter().zip(next).map(|(a, b)| (a - b).norm()).collect();
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let max = *d.last().unwrap();
    let median = if d.len() % 2 == 1 {
        d[d.len() / 2]
    } else {
        0.5 * (d[d.len() / 2 - 1] + d[d.len() / 2])
    };
    let scale = prev.iter().map(|z| z.norm()).fold(1.0, f64::max);
    max <= 10.0 * median + 1e-12 * scale || max < 0.25 * min_gap(prev)
}

/// Full form at time `t`: zeros from the matrix solution (or the ODE when
/// the closed form does not apply), `(g2, g1)` from their own equations, and
/// `g0` from normalization. The global phase is carried over from `wf` and is
/// otherwise arbitrary; use [`align_phase`] to fix it against a reference value.
pub fn evolve_form(wf: &WavefunctionForm, h: &QuadraticHamiltonian, t: f64) -> Result<WavefunctionForm> {
    if t == 0.0 {
        return Ok(wf.clone());
    }
    let zeros = match closed_form(wf, h, t) {
        Ok(z) => z,
        Err(Error::UnsupportedHamiltonian(_)) => {
            let traj = integrate(wf, h, &[t.abs()])?;
            traj.zeros_at(0)
        }
        Err(e) => return Err(e),
    };
    let (g2, g1) = gaussian_path(wf.g2(), wf.g1(), h, &[t])?[0];
    let raw = WavefunctionForm::new(g2, g1, C64::new(0.0, wf.g0().im), zeros, wf.leading())?;
    raw.normalized()
}

/// Rotate the global phase so that `arg psi(z_ref) = arg value`.
pub fn align_phase(wf: &WavefunctionForm, z_ref: C64, value: C64) -> WavefunctionForm {
    let here = wf.eval(z_ref);
    if here.norm() == 0.0 || value.norm() == 0.0 {
        return wf.clone();
    }
    wf.with_phase((value / here).arg())
}
