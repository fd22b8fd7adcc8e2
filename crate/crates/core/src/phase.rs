//! Zeros under the phase-shift flow `H = n + 1/2`: real-axis crossings,
//! Gershgorin control, zero imbalance and the half-period antipodal map.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;

use crate::dynamics::tracking::{align, match_distance};
use crate::dynamics::{closed_form_trajectory, eig, QuadraticHamiltonian, ZeroTrajectory, INITIAL_GAP};
use crate::state::StellarState;
use crate::wavefunction::{build_wavefunction, WavefunctionForm};
use crate::{Error, Result, C64, I};

/// Bisection stops once the bracket is this narrow.
pub const REFINEMENT_WIDTH: f64 = 1e-10;
/// `|Im|` below which a sample counts as real.
pub const REAL_BAND: f64 = 1e-12;
/// Events closer than this in `t` are the same event.
pub const DEDUP_WINDOW: f64 = 1e-6;
/// Minimum samples per period for crossing detection.
pub const MIN_SAMPLES: usize = 256;

/// Samples per period used by the audit.
const AUDIT_SAMPLES: usize = 512;

/// `X(t)` whose eigenvalues are the zeros after a phase shift by `t`:
///
/// ```text
/// X_jj = lambda_j (cos t - 2i g2 sin t) - i g1 sin t - i sin t sum_{m != j} 1/(lambda_j - lambda_m)
/// X_jk = i sin t / (lambda_j - lambda_k)
/// ```
pub fn phase_shift_matrix(zeros0: &[C64], g2: C64, g1: C64, t: f64) -> Result<DMatrix<C64>> {
    let r = zeros0.len();
    for i in 0..r {
        for j in (i + 1)..r {
            let gap = (zeros0[i] - zeros0[j]).norm();
            if gap <= INITIAL_GAP {
                return Err(Error::DegenerateInitialZeros { gap });
            }
        }
    }
    let (s, c) = t.sin_cos();
    let diag = c - 2.0 * I * g2 * s;
    Ok(DMatrix::from_fn(r, r, |j, k| {
        if j == k {
            let pair: C64 = (0..r)
                .filter(|&m| m != j)
                .map(|m| 1.0 / (zeros0[j] - zeros0[m]))
                .sum();
            zeros0[j] * diag - I * g1 * s - I * s * pair
        } else {
            I * s / (zeros0[j] - zeros0[k])
        }
    }))
}

fn phase_zeros(zeros0: &[C64], g2: C64, g1: C64, t: f64) -> Result<Vec<C64>> {
    if zeros0.is_empty() {
        return Ok(Vec::new());
    }
    eig::eigenvalues(&phase_shift_matrix(zeros0, g2, g1, t)?)
}

/// Closed-form trajectory over one period, `samples` points in `[0, 2 pi)`.
pub fn phase_trajectory(wf: &WavefunctionForm, samples: usize) -> Result<ZeroTrajectory> {
    let grid: Vec<f64> = (0..samples).map(|i| TAU * i as f64 / samples as f64).collect();
    closed_form_trajectory(wf, &QuadraticHamiltonian::phase_shift(), &grid)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossingFlag {
    Crossing,
    /// The zero touches the axis without changing half-plane; reported as
    /// two coincident events so that per-zero counts keep their parity.
    Tangent,
    AlwaysReal,
}

impl CrossingFlag {
    pub fn label(&self) -> &'static str {
        match self {
            CrossingFlag::Crossing => "crossing",
            CrossingFlag::Tangent => "tangent",
            CrossingFlag::AlwaysReal => "always_real",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossingEvent {
    pub zero_index: usize,
    pub t_star: f64,
    pub x_star: f64,
    pub refinement_width: f64,
    pub flag: CrossingFlag,
}

/// Real-axis events of a phase-shift trajectory.
///
/// Each sign change of `Im lambda_k` between samples is refined by bisection
/// on the eigenvalues of the phase-shift matrix, following the tracked zero
/// by nearest eigenvalue to the linear interpolation of the bracket ends.
/// A sample inside the real band whose nearest off-band neighbours lie in
/// the same half-plane is a tangential touch. Zeros that stay real over the
/// whole period are reported once as `AlwaysReal`.
pub fn detect_crossings(traj: &ZeroTrajectory) -> Result<Vec<CrossingEvent>> {
    let origin = traj
        .origin
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("trajectory carries no initial data".into()))?;
    if origin.hamiltonian != QuadraticHamiltonian::phase_shift() {
        return Err(Error::InvalidParameter("crossings need the phase-shift flow".into()));
    }
    if traj.times.len() < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_SAMPLES} samples, got {}",
            traj.times.len()
        )));
    }
    let (z0, g2, g1) = (origin.form.zeros(), origin.form.g2(), origin.form.g1());

    // close the period so the last interval is examined too
    let mut times = traj.times.clone();
    let mut paths = traj.paths.clone();
    if *times.last().unwrap() < TAU {
        let last: Vec<C64> = paths.iter().map(|p| *p.last().unwrap()).collect();
        let end = align(&last, &phase_zeros(z0, g2, g1, TAU)?);
        times.push(TAU);
        for (p, z) in paths.iter_mut().zip(end) {
            p.push(z);
        }
    }

    let mut events = Vec::new();
    for (k, path) in paths.iter().enumerate() {
        if path.iter().all(|z| z.im.abs() < REAL_BAND) {
            events.push(CrossingEvent {
                zero_index: k,
                t_star: times[0],
                x_star: path[0].re,
                refinement_width: 0.0,
                flag: CrossingFlag::AlwaysReal,
            });
            continue;
        }
        let mut mine: Vec<CrossingEvent> = Vec::new();
        let mut push = |ev: CrossingEvent, copies: usize| {
            if ev.t_star < TAU && !mine.iter().any(|e| (e.t_star - ev.t_star).abs() < DEDUP_WINDOW) {
                mine.extend(std::iter::repeat_n(ev, copies));
            }
        };
        // the closing sample repeats the first, so the period wraps at len - 1
        let period = &path[..path.len() - 1];
        for i in 0..times.len() - 1 {
            let (a, b) = (path[i], path[i + 1]);
            if a.im.abs() < REAL_BAND {
                let off_band = |z: &&C64| z.im.abs() >= REAL_BAND;
                let before = period[..i].iter().rev().chain(period[i..].iter().rev()).find(off_band);
                let after = period[i + 1..].iter().chain(&period[..=i]).find(off_band);
                let tangent = matches!((before, after), (Some(p), Some(q)) if p.im.signum() == q.im.signum());
                let flag = if tangent { CrossingFlag::Tangent } else { CrossingFlag::Crossing };
                let ev = CrossingEvent {
                    zero_index: k,
                    t_star: times[i],
                    x_star: a.re,
                    refinement_width: 0.0,
                    flag,
                };
                push(ev, if tangent { 2 } else { 1 });
            } else if b.im.abs() >= REAL_BAND && a.im.signum() != b.im.signum() {
                push(bisect(z0, g2, g1, k, times[i], a, times[i + 1], b)?, 1);
            }
        }
        mine.sort_by(|x, y| x.t_star.partial_cmp(&y.t_star).unwrap());
        events.extend(mine);
    }
    Ok(events)
}

#[allow(clippy::too_many_arguments)]
fn bisect(z0: &[C64], g2: C64, g1: C64, k: usize, mut ta: f64, mut za: C64, mut tb: f64, mut zb: C64) -> Result<CrossingEvent> {
    while tb - ta > REFINEMENT_WIDTH {
        let tm = 0.5 * (ta + tb);
        let guess = 0.5 * (za + zb);
        let ev = phase_zeros(z0, g2, g1, tm)?;
        let mut d: Vec<(f64, C64)> = ev.iter().map(|&z| ((z - guess).norm(), z)).collect();
        d.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        if d.len() > 1 && (d[1].0 - d[0].0).abs() < 1e-12 && (d[1].1 - d[0].1).norm() > 1e-12 {
            return Err(Error::TrackingAmbiguity { time: tm });
        }
        let zm = d[0].1;
        if zm.im.abs() < REAL_BAND {
            ta = tm;
            za = zm;
            tb = tm;
            zb = zm;
            break;
        }
        if zm.im.signum() == za.im.signum() {
            ta = tm;
            za = zm;
        } else {
            tb = tm;
            zb = zm;
        }
    }
    let (t_star, z_star) = if za.im.abs() <= zb.im.abs() { (ta, za) } else { (tb, zb) };
    Ok(CrossingEvent {
        zero_index: k,
        t_star,
        x_star: z_star.re,
        refinement_width: tb - ta,
        flag: CrossingFlag::Crossing,
    })
}

#[derive(Clone, Debug)]
pub struct GershgorinReport {
    pub times: Vec<f64>,
    /// `radii[i][j]` is the off-diagonal row sum of row `i` at `times[j]`.
    pub radii: Vec<Vec<f64>>,
    pub min_separation: f64,
    pub threshold: f64,
    /// `min_separation >= threshold` with `Im g2 = 0`.
    pub hypothesis_holds: bool,
    pub discs_disjoint_all_t: bool,
    /// Smallest `|X_ii - X_jj| - R_i - R_j` over pairs and samples.
    pub min_margin: f64,
}

/// Gershgorin discs of the phase-shift matrix over one period.
///
/// The threshold is `sqrt((r - 1) / |Re g2|)`.
pub fn gershgorin_check(zeros0: &[C64], g2: C64, g1: C64, t_samples: usize) -> Result<GershgorinReport> {
    let r = zeros0.len();
    let times: Vec<f64> = (0..t_samples.max(1)).map(|i| TAU * i as f64 / t_samples.max(1) as f64).collect();
    let mut min_separation = f64::INFINITY;
    for i in 0..r {
        for j in (i + 1)..r {
            min_separation = min_separation.min((zeros0[i] - zeros0[j]).norm());
        }
    }
    let threshold = if r == 0 { 0.0 } else { ((r as f64 - 1.0) / g2.re.abs()).sqrt() };
    let mut radii = vec![Vec::with_capacity(times.len()); r];
    let mut min_margin = f64::INFINITY;
    for &t in &times {
        let x = phase_shift_matrix(zeros0, g2, g1, t)?;
        let rad: Vec<f64> = (0..r)
            .map(|i| (0..r).filter(|&j| j != i).map(|j| x[(i, j)].norm()).sum())
            .collect();
        for i in 0..r {
            for j in (i + 1)..r {
                min_margin = min_margin.min((x[(i, i)] - x[(j, j)]).norm() - rad[i] - rad[j]);
            }
        }
        for (i, v) in rad.into_iter().enumerate() {
            radii[i].push(v);
        }
    }
    Ok(GershgorinReport {
        times,
        radii,
        min_separation,
        threshold,
        hypothesis_holds: g2.im.abs() < 1e-14 && min_separation >= threshold,
        discs_disjoint_all_t: min_margin > 0.0,
        min_margin,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AuditVerdict {
    GuaranteedAndObserved(usize),
    GuaranteedButMissed(usize),
    NotGuaranteedObserved(usize),
    NotGuaranteedNone,
}

impl AuditVerdict {
    pub fn events(&self) -> usize {
        match *self {
            AuditVerdict::GuaranteedAndObserved(n)
            | AuditVerdict::GuaranteedButMissed(n)
            | AuditVerdict::NotGuaranteedObserved(n) => n,
            AuditVerdict::NotGuaranteedNone => 0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AuditVerdict::GuaranteedAndObserved(_) => "GuaranteedAndObserved",
            AuditVerdict::GuaranteedButMissed(_) => "GuaranteedButMissed",
            AuditVerdict::NotGuaranteedObserved(_) => "NotGuaranteedObserved",
            AuditVerdict::NotGuaranteedNone => "NotGuaranteedNone",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Audit {
    pub verdict: AuditVerdict,
    pub gershgorin: GershgorinReport,
    pub events: Vec<CrossingEvent>,
}

pub fn crossing_guarantee_audit(st: &StellarState) -> Result<Audit> {
    audit_form(&build_wavefunction(st)?)
}

/// Compare observed crossings against the separation guarantee of `2r`
/// events per period.
pub fn audit_form(wf: &WavefunctionForm) -> Result<Audit> {
    let gershgorin = gershgorin_check(wf.zeros(), wf.g2(), wf.g1(), AUDIT_SAMPLES)?;
    let events = if wf.rank() == 0 {
        Vec::new()
    } else {
        detect_crossings(&phase_trajectory(wf, AUDIT_SAMPLES)?)?
    };
    let n = events.iter().filter(|e| e.flag == CrossingFlag::Crossing).count();
    let verdict = if wf.rank() == 0 {
        AuditVerdict::NotGuaranteedNone
    } else if gershgorin.hypothesis_holds {
        if n >= 2 * wf.rank() {
            AuditVerdict::GuaranteedAndObserved(n)
        } else {
            AuditVerdict::GuaranteedButMissed(n)
        }
    } else if n > 0 {
        AuditVerdict::NotGuaranteedObserved(n)
    } else {
        AuditVerdict::NotGuaranteedNone
    };
    Ok(Audit {
        verdict,
        gershgorin,
        events,
    })
}

/// Zeros strictly above and strictly below the real band `|Im| <= 1e-12`.
pub fn imbalance(zeros: &[C64]) -> (usize, usize) {
    let up = zeros.iter().filter(|z| z.im > REAL_BAND).count();
    let down = zeros.iter().filter(|z| z.im < -REAL_BAND).count();
    (up, down)
}

/// Assignment distance between the zeros at `t` and the negated zeros at
/// `t + pi`.
///
/// Uses the exact matrix solution when the trajectory carries its initial data
/// for the phase-shift flow, otherwise requires both times on the sample grid.
pub fn antipodal_check(traj: &ZeroTrajectory, t: f64) -> Result<f64> {
    if traj.rank() == 0 {
        return Ok(0.0);
    }
    let (a, b) = match &traj.origin {
        Some(o) if o.hamiltonian == QuadraticHamiltonian::phase_shift() => {
            let f = &o.form;
            (
                phase_zeros(f.zeros(), f.g2(), f.g1(), t)?,
                phase_zeros(f.zeros(), f.g2(), f.g1(), t + PI)?,
            )
        }
        _ => {
            let find = |s: f64| {
                traj.times
                    .iter()
                    .position(|&x| (x - s).abs() < 1e-9)
                    .ok_or(Error::TimeNotCovered { time: s })
            };
            (traj.zeros_at(find(t)?), traj.zeros_at(find(t + PI)?))
        }
    };
    let neg: Vec<C64> = b.iter().map(|z| -z).collect();
    Ok(match_distance(&a, &neg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::closed_form;
    use crate::state::random_stellar_state;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rank_one() -> WavefunctionForm {
        WavefunctionForm::from_zeros(c(-0.5, 0.0), c(0.0, 0.0), vec![c(0.0, 1.0)]).unwrap()
    }

    #[test]
    fn matrix_at_zero_and_pi() {
        let z = vec![c(0.3, 1.0), c(-1.0, 0.2), c(0.5, -0.7)];
        let (g2, g1) = (c(-0.6, 0.1), c(0.2, -0.3));
        let x0 = phase_shift_matrix(&z, g2, g1, 0.0).unwrap();
        let xpi = phase_shift_matrix(&z, g2, g1, PI).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let d = if i == j { z[i] } else { c(0.0, 0.0) };
                assert!((x0[(i, j)] - d).norm() < 1e-15);
                assert!((xpi[(i, j)] + d).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn rank_one_ellipse_is_counterclockwise() {
        for t in [0.3, 1.2, 4.0] {
            let x = phase_shift_matrix(&[c(0.0, 1.0)], c(-0.5, 0.0), c(0.0, 0.0), t).unwrap();
            assert!((x[(0, 0)] - I * C64::from_polar(1.0, t)).norm() < 1e-15);
        }
    }

    #[test]
    fn matches_general_closed_form() {
        let wf = build_wavefunction(&random_stellar_state(4, 8, 0.5)).unwrap();
        let h = QuadraticHamiltonian::phase_shift();
        for k in 0..16 {
            let t = 0.37 * k as f64;
            let a = phase_zeros(wf.zeros(), wf.g2(), wf.g1(), t).unwrap();
            let b = closed_form(&wf, &h, t).unwrap();
            assert!(match_distance(&a, &b) < 1e-10);
        }
    }

    #[test]
    fn rank_one_crossings() {
        let traj = phase_trajectory(&rank_one(), 256).unwrap();
        let ev = detect_crossings(&traj).unwrap();
        assert_eq!(ev.len(), 2);
        assert!((ev[0].t_star - FRAC_PI_2).abs() < 1e-9);
        assert!((ev[0].x_star + 1.0).abs() < 1e-9);
        assert!((ev[1].t_star - 3.0 * FRAC_PI_2).abs() < 1e-9);
        assert!((ev[1].x_star - 1.0).abs() < 1e-9);
        assert!(ev.iter().all(|e| e.refinement_width <= REFINEMENT_WIDTH));
    }

    #[test]
    fn fock_one_is_always_real() {
        let wf = build_wavefunction(&StellarState::fock(1)).unwrap();
        let ev = detect_crossings(&phase_trajectory(&wf, 256).unwrap()).unwrap();
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].flag, CrossingFlag::AlwaysReal);
    }

    #[test]
    fn tangential_touch_is_a_flagged_pair() {
        // synthetic path that grazes the axis at t = 0 and stays above it
        let n = 256;
        let times: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        let path: Vec<C64> = times.iter().map(|&t| c(t.cos(), 0.5 * (1.0 - t.cos()))).collect();
        let traj = ZeroTrajectory {
            gauss_path: vec![(c(-0.5, 0.0), c(0.0, 0.0)); n],
            times,
            paths: vec![path],
            method: crate::dynamics::Method::ClosedForm,
            origin: Some(crate::dynamics::Origin {
                form: rank_one(),
                hamiltonian: QuadraticHamiltonian::phase_shift(),
            }),
        };
        let ev = detect_crossings(&traj).unwrap();
        assert_eq!(ev.len(), 2);
        assert!(ev.iter().all(|e| e.flag == CrossingFlag::Tangent && e.t_star == 0.0 && e.x_star == 1.0));
    }

    #[test]
    fn symmetric_pair_crossings_are_antipodal() {
        let wf = WavefunctionForm::from_zeros(c(-0.5, 0.0), c(0.0, 0.0), vec![c(0.0, 0.3), c(0.0, -0.3)]).unwrap();
        let ev = detect_crossings(&phase_trajectory(&wf, 256).unwrap()).unwrap();
        assert!(!ev.is_empty());
        for e in &ev {
            let partner = ev.iter().any(|f| {
                ((f.t_star - e.t_star).rem_euclid(TAU) - PI).abs() < 1e-8 && (f.x_star + e.x_star).abs() < 1e-8
            });
            assert!(partner, "{e:?}");
        }
    }

    #[test]
    fn gershgorin_examples() {
        let r1 = gershgorin_check(&[c(0.0, 1.0)], c(-0.5, 0.0), c(0.0, 0.0), 64).unwrap();
        assert_eq!(r1.threshold, 0.0);
        assert!(r1.discs_disjoint_all_t && r1.hypothesis_holds);

        let r2 = gershgorin_check(&[c(2.0, 0.0), c(-2.0, 0.0)], c(-0.5, 0.0), c(0.0, 0.0), 256).unwrap();
        assert_eq!(r2.min_separation, 4.0);
        assert!((r2.threshold - 2f64.sqrt()).abs() < 1e-15);
        assert!(r2.hypothesis_holds && r2.discs_disjoint_all_t);
        // R_i(t) = |sin t| / 4
        for (j, &t) in r2.times.iter().enumerate() {
            assert!((r2.radii[0][j] - t.sin().abs() / 4.0).abs() < 1e-15);
        }

        let r3 = gershgorin_check(&[c(0.1, 0.0), c(-0.1, 0.0)], c(-0.5, 0.0), c(0.0, 0.0), 64).unwrap();
        assert!(!r3.hypothesis_holds);
    }

    #[test]
    fn audit_examples() {
        let a = audit_form(&rank_one()).unwrap();
        assert_eq!(a.verdict, AuditVerdict::GuaranteedAndObserved(2));
        let sep = WavefunctionForm::from_zeros(c(-0.5, 0.0), c(0.0, 0.0), vec![c(2.0, 0.5), c(-2.0, -0.5)]).unwrap();
        assert!(audit_form(&sep).unwrap().verdict.events() >= 4);
        let vac = crossing_guarantee_audit(&random_stellar_state(0, 1, 0.5)).unwrap();
        assert_eq!(vac.verdict, AuditVerdict::NotGuaranteedNone);
    }

    #[test]
    fn imbalance_examples() {
        assert_eq!(imbalance(&[c(0.0, 1.0), c(0.0, -1.0)]), (1, 1));
        assert_eq!(imbalance(&[c(0.0, 1.0), c(0.0, 2.0), c(0.0, -1.0)]), (2, 1));
        assert_eq!(imbalance(&[c(0.5, 0.0)]), (0, 0));
    }

    #[test]
    fn antipodal_examples() {
        let traj = phase_trajectory(&rank_one(), 256).unwrap();
        assert!(antipodal_check(&traj, 0.0).unwrap() < 1e-8);
        assert!(antipodal_check(&traj, FRAC_PI_2).unwrap() < 1e-8);
        let z = phase_zeros(&[c(0.0, 1.0)], c(-0.5, 0.0), c(0.0, 0.0), FRAC_PI_2).unwrap();
        let w = phase_zeros(&[c(0.0, 1.0)], c(-0.5, 0.0), c(0.0, 0.0), 3.0 * FRAC_PI_2).unwrap();
        assert!((z[0] + w[0]).norm() < 1e-14);
        let empty = phase_trajectory(&crate::wavefunction::gaussian_packet_params(c(0.0, 0.0), c(0.0, 0.0)), 256).unwrap();
        assert_eq!(antipodal_check(&empty, 1.0).unwrap(), 0.0);
    }
}
