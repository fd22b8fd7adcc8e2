//! Small dense helpers shared by the Fock-basis code.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::C64;

/// Truncated annihilation operator on `dim` basis states: `a|n> = sqrt(n)|n-1>`.
pub fn annihilation(dim: usize) -> DMatrix<C64> {
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

pub fn creation(dim: usize) -> DMatrix<C64> {
    annihilation(dim).adjoint()
}

/// Spectral decomposition of a Hermitian matrix, used to apply `exp(-i t H)`.
#[derive(Clone, Debug)]
pub struct HermitianPropagator {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<C64>,
}

impl HermitianPropagator {
    /// `h` is symmetrized as `(h + h^dagger)/2` before the decomposition.
    pub fn new(h: &DMatrix<C64>) -> Self {
        let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(sym);
        Self {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// `exp(-i t H) v`.
    pub fn apply(&self, v: &DVector<C64>, t: f64) -> DVector<C64> {
        let mut w = self.eigenvectors.ad_mul(v);
        for (k, wk) in w.iter_mut().enumerate() {
            *wk *= C64::from_polar(1.0, -t * self.eigenvalues[k]);
        }
        &self.eigenvectors * w
    }
}

/// `exp(G) v` for an anti-Hermitian generator `G`.
pub fn apply_unitary_generator(g: &DMatrix<C64>, v: &DVector<C64>) -> DVector<C64> {
    // exp(G) = exp(-i H) with H = i G Hermitian
    let h = g * C64::new(0.0, 1.0);
    HermitianPropagator::new(&h).apply(v, 1.0)
}
