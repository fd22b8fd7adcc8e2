//! Truncated Fock-basis evolution, used as ground truth for the zero dynamics.

use nalgebra::DMatrix;

use crate::contour::{count_zeros_box, Rect};
use crate::dynamics::QuadraticHamiltonian;
use crate::entire::{check, hermite_series};
use crate::linalg::{annihilation, creation, HermitianPropagator};
use crate::state::FockVector;
use crate::{Error, Result, C64};

/// Top-quarter norm accepted on input.
pub const SUPPORT_TOL: f64 = 1e-10;
/// Top-quarter norm accepted after evolution.
pub const LEAKAGE_TOL: f64 = 1e-8;

/// Cells narrower than this are handed to Newton polishing.
const CELL_WIDTH: f64 = 1e-3;
/// Relative rounding error tolerated on contour samples; only the phase matters there.
const CONTOUR_PRECISION: f64 = 1e-3;
const CONTOUR_SAMPLES: usize = 32;
const JITTER: f64 = 1e-4;
const MAX_RETRIES: usize = 5;
const NEWTON_STEP: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct TruncatedOperator {
    pub dim: usize,
    pub entries: DMatrix<C64>,
    /// Largest entry of `|M - M^dagger|`.
    pub hermitian_defect: f64,
}

impl TruncatedOperator {
    /// Hermitian defect ignoring the last `edge` rows and columns.
    pub fn interior_defect(&self, edge: usize) -> f64 {
        let n = self.dim.saturating_sub(edge);
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

/// `A x^2 + B p^2 + C (xp + px)/2 + D x + E p + F` with `x = (a + a†)/sqrt 2`,
/// `p = (a - a†)/(i sqrt 2)` built from truncated ladder matrices.
pub fn hamiltonian_matrix(h: &QuadraticHamiltonian, cutoff: usize) -> TruncatedOperator {
    let dim = cutoff + 1;
    let a = annihilation(dim);
    let ad = creation(dim);
    let k = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let x = (&a + &ad) * k;
    let p = (&a - &ad) * (k / C64::new(0.0, 1.0));
    let xp = &x * &p;
    let px = &p * &x;
    let re = |v: f64| C64::new(v, 0.0);
    let mut m = &x * &x * re(h.a) + &p * &p * re(h.b) + (xp + px) * re(h.c / 2.0) + &x * re(h.d) + &p * re(h.e);
    for i in 0..dim {
        m[(i, i)] += re(h.f);
    }
    let defect = (&m - m.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
    TruncatedOperator {
        dim,
        entries: m,
        hermitian_defect: defect,
    }
}

/// `exp(-i t M)` for a fixed truncated Hamiltonian, reusable across times.
#[derive(Clone, Debug)]
pub struct FockPropagator {
    cutoff: usize,
    inner: HermitianPropagator,
}

impl FockPropagator {
    pub fn new(h: &QuadraticHamiltonian, cutoff: usize) -> Self {
        let m = hamiltonian_matrix(h, cutoff);
        Self {
            cutoff,
            inner: HermitianPropagator::new(&m.entries),
        }
    }

    pub fn evolve(&self, v: &FockVector, t: f64) -> Result<FockVector> {
        if v.cutoff() > self.cutoff && v.tail_norm(self.cutoff + 1) > SUPPORT_TOL {
            return Err(Error::CutoffTooSmall {
                cutoff: self.cutoff,
                discarded: v.tail_norm(self.cutoff + 1),
            });
        }
        let v = v.with_cutoff(self.cutoff);
        let support = v.top_quarter_norm();
        if support >= SUPPORT_TOL {
            return Err(Error::TruncationLeakage { norm: support });
        }
        let w = FockVector::new(self.inner.apply(&v.to_dvector(), t).iter().copied().collect())?;
        let leak = w.top_quarter_norm();
        if leak > LEAKAGE_TOL {
            return Err(Error::TruncationLeakage { norm: leak });
        }
        Ok(w)
    }
}

pub fn evolve_fock(v: &FockVector, h: &QuadraticHamiltonian, t: f64, cutoff: usize) -> Result<FockVector> {
    FockPropagator::new(h, cutoff).evolve(v, t)
}

/// Zeros of the position wavefunction of `v` inside `[-h, h]^2`.
///
/// The box is split into quadrants recursively, keeping cells with a nonzero
/// argument-principle count, down to cells of width `1e-3`; each surviving
/// cell is polished by Newton's method with central differences. A cell
/// holding several zeros reports its centre with that multiplicity.
pub fn zeros_from_fock(v: &FockVector, expected_rank: usize, box_halfwidth: f64) -> Result<Vec<C64>> {
    let f = |z: C64| check(hermite_series(v, z), z, CONTOUR_PRECISION);
    let root = Rect::square(box_halfwidth);
    let (root, total) = count_jittered(&f, root)?;
    if total != expected_rank {
        return Err(Error::CountMismatch {
            found: total,
            expected: expected_rank,
        });
    }
    let mut cells = Vec::new();
    subdivide(&f, root, total, &mut cells)?;
    let mut out = Vec::with_capacity(total);
    for (cell, count) in cells {
        if count == 1 {
            out.push(newton(v, cell));
        } else {
            out.extend(std::iter::repeat_n(cell.center(), count));
        }
    }
    Ok(out)
}

fn count_jittered<F: Fn(C64) -> Result<C64>>(f: &F, rect: Rect) -> Result<(Rect, usize)> {
    let shifts = [
        C64::new(0.0, 0.0),
        C64::new(JITTER, 0.0),
        C64::new(0.0, JITTER),
        C64::new(-JITTER, 0.0),
        C64::new(0.0, -JITTER),
        C64::new(JITTER, JITTER),
    ];
    let mut last = None;
    for dz in shifts.iter().take(MAX_RETRIES + 1) {
        let r = rect.translated(*dz);
        match count_zeros_box(f, &r, CONTOUR_SAMPLES) {
            Ok(n) => return Ok((r, n)),
            Err(e @ Error::ZeroOnContour { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

fn subdivide<F: Fn(C64) -> Result<C64>>(f: &F, rect: Rect, count: usize, out: &mut Vec<(Rect, usize)>) -> Result<()> {
    if count == 0 {
        return Ok(());
    }
    if rect.width().max(rect.height()) <= CELL_WIDTH {
        out.push((rect, count));
        return Ok(());
    }
    let mut last = None;
    for attempt in 0..=MAX_RETRIES {
        // move the split point off any zero sitting on the cross
        let nudge = JITTER * attempt as f64 * rect.width().min(1.0);
        let split = rect.center() + C64::new(nudge, 0.7 * nudge);
        let quads = rect.quadrants(split);
        let counts: Result<Vec<usize>> = quads.iter().map(|q| count_zeros_box(f, q, CONTOUR_SAMPLES)).collect();
        match counts {
            Ok(c) if c.iter().sum::<usize>() == count => {
                for (q, n) in quads.into_iter().zip(c) {
                    subdivide(f, q, n, out)?;
                }
                return Ok(());
            }
            Ok(c) => {
                last = Some(Error::CountMismatch {
                    found: c.iter().sum(),
                    expected: count,
                })
            }
            Err(e @ Error::ZeroOnContour { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

fn newton(v: &FockVector, cell: Rect) -> C64 {
    let f = |z: C64| hermite_series(v, z).value;
    let start = cell.center();
    let mut z = start;
    for _ in 0..50 {
        let h = NEWTON_STEP * (1.0 + z.norm());
        let fz = f(z);
        let df = (f(z + h) - f(z - h)) / (2.0 * h);
        if df.norm() == 0.0 {
            break;
        }
        let step = fz / df;
        z -= step;
        if step.norm() <= 1e-13 * (1.0 + z.norm()) {
            break;
        }
    }
    // Newton leaving the cell means it locked onto a different zero
    let slack = 10.0 * CELL_WIDTH;
    if (z - start).norm() > slack || !(z.re.is_finite() && z.im.is_finite()) {
        return start;
    }
    z
}
