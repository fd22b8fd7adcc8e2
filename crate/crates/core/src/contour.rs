//! Zero counting by the argument principle on axis-aligned rectangles.

use std::f64::consts::{FRAC_PI_2, TAU};

use crate::{Error, Result, C64};

/// Smallest edge segment, relative to the box size, before a near-zero on the
/// contour is reported.
const MIN_SEGMENT: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        if !(re_min < re_max && im_min < im_max) {
            return Err(Error::InvalidParameter("empty rectangle".into()));
        }
        Ok(Self {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    /// `[-h, h] x [-h, h]`.
    pub fn square(h: f64) -> Self {
        Self {
            re_min: -h,
            re_max: h,
            im_min: -h,
            im_max: h,
        }
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn center(&self) -> C64 {
        C64::new(
            0.5 * (self.re_min + self.re_max),
            0.5 * (self.im_min + self.im_max),
        )
    }

    pub fn contains(&self, z: C64) -> bool {
        z.re > self.re_min && z.re < self.re_max && z.im > self.im_min && z.im < self.im_max
    }

    /// Counter-clockwise corners starting at the lower left.
    pub fn corners(&self) -> [C64; 4] {
        [
            C64::new(self.re_min, self.im_min),
            C64::new(self.re_max, self.im_min),
            C64::new(self.re_max, self.im_max),
            C64::new(self.re_min, self.im_max),
        ]
    }

    /// Split at `split`, which must lie inside the rectangle.
    pub fn quadrants(&self, split: C64) -> [Rect; 4] {
        let (x, y) = (split.re, split.im);
        [
            Rect { re_max: x, im_max: y, ..*self },
            Rect { re_min: x, im_max: y, ..*self },
            Rect { re_min: x, im_min: y, ..*self },
            Rect { re_max: x, im_min: y, ..*self },
        ]
    }

    pub fn translated(&self, dz: C64) -> Rect {
        Rect {
            re_min: self.re_min + dz.re,
            re_max: self.re_max + dz.re,
            im_min: self.im_min + dz.im,
            im_max: self.im_max + dz.im,
        }
    }
}

/// Number of zeros of an entire function inside `rect`.
///
/// Each edge starts from `samples_per_edge` uniform samples; a segment is
/// accepted when its phase increment and those of both halves are all below
/// `pi/2`, otherwise it is bisected. A vanishing or non-finite sample, or a
/// segment shorter than `1e-7` of the box size, signals a zero on the
/// contour.
pub fn count_zeros_box<F>(f: F, rect: &Rect, samples_per_edge: usize) -> Result<usize>
where
    F: Fn(C64) -> Result<C64>,
{
    let m = samples_per_edge.max(1);
    let min_len = MIN_SEGMENT * rect.width().max(rect.height());
    let corners = rect.corners();
    let mut total = 0.0;
    for e in 0..4 {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        let mut zp = a;
        let mut fp = sample(&f, a)?;
        for j in 1..=m {
            let zq = a + (b - a) * (j as f64 / m as f64);
            let fq = sample(&f, zq)?;
            total += segment(&f, zp, fp, zq, fq, min_len)?;
            zp = zq;
            fp = fq;
        }
    }
    let winding = total / TAU;
    let count = winding.round();
    if (winding - count).abs() > 1e-6 || count < 0.0 {
        return Err(Error::ZeroOnContour { z: rect.center() });
    }
    Ok(count as usize)
}

fn sample<F: Fn(C64) -> Result<C64>>(f: &F, z: C64) -> Result<C64> {
    let v = f(z)?;
    if v.norm() == 0.0 || !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::ZeroOnContour { z });
    }
    Ok(v)
}

fn segment<F>(f: &F, za: C64, fa: C64, zb: C64, fb: C64, min_len: f64) -> Result<f64>
where
    F: Fn(C64) -> Result<C64>,
{
    let zm = 0.5 * (za + zb);
    let fm = sample(f, zm)?;
    let d = (fb / fa).arg();
    let d1 = (fm / fa).arg();
    let d2 = (fb / fm).arg();
    if d.abs() < FRAC_PI_2 && d1.abs() < FRAC_PI_2 && d2.abs() < FRAC_PI_2 {
        return Ok(d1 + d2);
    }
    if (zb - za).norm() < min_len {
        return Err(Error::ZeroOnContour { z: zm });
    }
    Ok(segment(f, za, fa, zm, fm, min_len)? + segment(f, zm, fm, zb, fb, min_len)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::StellarState;
    use crate::wavefunction::{build_wavefunction, gaussian_packet_params};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn vacuum_has_no_zeros() {
        let wf = gaussian_packet_params(c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!(count_zeros_box(|z| Ok(wf.eval(z)), &Rect::square(4.0), 32).unwrap(), 0);
    }

    #[test]
    fn fock_two_counts() {
        let wf = build_wavefunction(&StellarState::fock(2)).unwrap();
        assert_eq!(count_zeros_box(|z| Ok(wf.eval(z)), &Rect::square(4.0), 32).unwrap(), 2);
        let side = Rect::new(1.0, 4.0, -1.0, 1.0).unwrap();
        assert_eq!(count_zeros_box(|z| Ok(wf.eval(z)), &side, 32).unwrap(), 0);
    }

    #[test]
    fn polynomial_counts_with_multiplicity() {
        let p = |z: C64| Ok((z - c(0.5, 0.5)).powi(3) * (z + c(2.0, 0.0)));
        assert_eq!(count_zeros_box(p, &Rect::square(1.0), 8).unwrap(), 3);
        assert_eq!(count_zeros_box(p, &Rect::square(3.0), 8).unwrap(), 4);
    }

    #[test]
    fn zero_on_edge_is_rejected() {
        let p = |z: C64| Ok(z - c(1.0, 0.3));
        assert!(matches!(
            count_zeros_box(p, &Rect::square(1.0), 16),
            Err(Error::ZeroOnContour { .. })
        ));
    }

    #[test]
    fn quadrants_tile_the_box() {
        let r = Rect::square(2.0);
        let q = r.quadrants(c(0.5, -0.25));
        let area: f64 = q.iter().map(|b| b.width() * b.height()).sum();
        assert!((area - 16.0).abs() < 1e-12);
    }
}
