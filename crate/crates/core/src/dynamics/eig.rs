//! Eigenvalues of small dense complex matrices through the characteristic
//! polynomial.

use nalgebra::DMatrix;

use crate::poly::roots_polynomial;
use crate::{Error, Result, C64};

/// Largest dimension handled by [`eigenvalues`].
pub const MAX_DIM: usize = 20;

/// Coefficients of `det(z I - m)`, constant term first (Faddeev-LeVerrier).
pub fn characteristic_polynomial(m: &DMatrix<C64>) -> Vec<C64> {
    let n = m.nrows();
    let mut c = vec![C64::new(0.0, 0.0); n + 1];
    c[n] = C64::new(1.0, 0.0);
    let mut mk = DMatrix::<C64>::zeros(n, n);
    for k in 1..=n {
        mk = m * &mk;
        for i in 0..n {
            mk[(i, i)] += c[n - k + 1];
        }
        let amk = m * &mk;
        c[n - k] = -amk.trace() / k as f64;
    }
    c
}

pub fn eigenvalues(m: &DMatrix<C64>) -> Result<Vec<C64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidParameter("matrix is not square".into()));
    }
    if m.nrows() > MAX_DIM {
        return Err(Error::InvalidParameter(format!(
            "dimension {} exceeds {MAX_DIM}",
            m.nrows()
        )));
    }
    roots_polynomial(&characteristic_polynomial(m))
}
