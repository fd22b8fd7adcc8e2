//! Optimal assignment between unordered point sets.

use crate::C64;

/// Minimum-cost perfect matching of a square cost matrix; `result[row] = col`.
///
/// Shortest augmenting path with potentials, `O(n^3)`.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    // 1-based arrays; column 0 is the virtual source
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![0; n];
    for j in 1..=n {
        out[p[j] - 1] = j - 1;
    }
    out
}

/// Reorder `next` so that `next[k]` continues `prev[k]` (minimum total distance).
pub fn align(prev: &[C64], next: &[C64]) -> Vec<C64> {
    let cost: Vec<Vec<f64>> = prev
        .iter()
        .map(|a| next.iter().map(|b| (a - b).norm()).collect())
        .collect();
    hungarian(&cost).into_iter().map(|j| next[j]).collect()
}

/// Largest pair distance under the optimal assignment; `0` for empty sets.
pub fn match_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len(), "point sets differ in size");
    align(a, b)
        .iter()
        .zip(a)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
