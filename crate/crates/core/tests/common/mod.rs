#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stellar_zeros::dynamics::QuadraticHamiltonian;
use stellar_zeros::C64;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Oscillating quadratic Hamiltonian, `4AB - C^2 > 0` with margin.
pub fn stable_hamiltonian(seed: u64) -> QuadraticHamiltonian {
    let mut r = rng(seed ^ 0x5a5a);
    let a = uniform(&mut r, 0.3, 0.9);
    let b = uniform(&mut r, 0.3, 0.9);
    let cc = uniform(&mut r, -0.3, 0.3);
    let d = uniform(&mut r, -0.5, 0.5);
    let e = uniform(&mut r, -0.5, 0.5);
    let f = uniform(&mut r, -1.0, 1.0);
    QuadraticHamiltonian::new(a, b, cc, d, e, f).unwrap()
}

/// Mildly unstable quadratic Hamiltonian, `4AB - C^2 < 0`, `B != 0`.
pub fn unstable_hamiltonian(seed: u64) -> QuadraticHamiltonian {
    let mut r = rng(seed ^ 0xa5a5);
    let a = uniform(&mut r, -0.4, -0.1);
    let b = uniform(&mut r, 0.2, 0.5);
    let cc = uniform(&mut r, -0.2, 0.2);
    let d = uniform(&mut r, -0.3, 0.3);
    let e = uniform(&mut r, -0.3, 0.3);
    QuadraticHamiltonian::new(a, b, cc, d, e, 0.0).unwrap()
}

pub fn linspace(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect()
}

pub fn sorted(mut v: Vec<C64>) -> Vec<C64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

/// Grid `{x + iy : |x|, |y| <= 3, step 0.5}`.
pub fn standard_grid() -> Vec<C64> {
    let ticks: Vec<f64> = (-6..=6).map(|k| 0.5 * k as f64).collect();
    ticks.iter().flat_map(|&x| ticks.iter().map(move |&y| c(x, y))).collect()
}

/// Gentle oscillator with `A, B` near 1/2, so the squeezing it induces
/// stays small enough for a cutoff-80 Fock basis.
pub fn gentle_hamiltonian(seed: u64) -> QuadraticHamiltonian {
    let mut r = rng(seed ^ 0x3c3c);
    let a = uniform(&mut r, 0.4, 0.6);
    let b = uniform(&mut r, 0.4, 0.6);
    let cc = uniform(&mut r, -0.1, 0.1);
    let d = uniform(&mut r, -0.3, 0.3);
    let e = uniform(&mut r, -0.3, 0.3);
    let f = uniform(&mut r, -1.0, 1.0);
    QuadraticHamiltonian::new(a, b, cc, d, e, f).unwrap()
}
