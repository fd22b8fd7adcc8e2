//! Gauss-Hermite quadrature for `int e^{-y^2} f(y) dy`.

use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};

/// Node count used for normalizing wavefunctions.
pub const NODES: usize = 257;

#[derive(Clone, Debug)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix with
    /// off-diagonal `sqrt(k/2)`, weights `sqrt(pi) v_0^2`.
    pub fn new(n: usize) -> Self {
        let jacobi = DMatrix::from_fn(n, n, |i, j| {
            if i + 1 == j || j + 1 == i {
                (i.max(j) as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(jacobi);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let v0 = eig.eigenvectors[(0, k)];
                (eig.eigenvalues[k], std::f64::consts::PI.sqrt() * v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Shared 257-node rule.
pub fn standard() -> &'static GaussHermite {
    static RULE: OnceLock<GaussHermite> = OnceLock::new();
    RULE.get_or_init(|| GaussHermite::new(NODES))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_moments() {
        let q = GaussHermite::new(20);
        let pi = std::f64::consts::PI;
        assert!((q.integrate(|_| 1.0) - pi.sqrt()).abs() < 1e-13);
        assert!((q.integrate(|x| x * x) - pi.sqrt() / 2.0).abs() < 1e-13);
        assert!((q.integrate(|x| x.powi(4)) - 3.0 * pi.sqrt() / 4.0).abs() < 1e-13);
        assert!(q.integrate(|x| x.powi(3)).abs() < 1e-13);
    }

    #[test]
    fn standard_rule_is_symmetric() {
        let q = standard();
        assert_eq!(q.nodes.len(), NODES);
        assert!(q.nodes[NODES / 2].abs() < 1e-10);
        assert!((q.integrate(|_| 1.0) - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }
}
