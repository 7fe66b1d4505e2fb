#![allow(dead_code)]

#[allow(unused_imports)]
pub use tubings::sample::*;

/// c_n = (n-1) Σ_{k=1}^{n-1} c_k c_{n-k}, c_1 = 1.
pub fn connected_counts(max: usize) -> Vec<u64> {
    let mut c = vec![0u64, 1];
    for n in 2..=max {
        let s: u64 = (1..n).map(|k| c[k] * c[n - k]).sum();
        c.push((n as u64 - 1) * s);
    }
    c
}

pub fn double_factorial_odd(n: usize) -> u64 {
    (1..=n).filter(|k| k % 2 == 1).map(|k| k as u64).product()
}

/// (2n-3)!!, equal to 1 for n = 1.
pub fn decreasing_plane_trees(n: usize) -> u64 {
    double_factorial_odd((2 * n).saturating_sub(3))
}

pub fn catalan(n: usize) -> u64 {
    let mut c = 1u64;
    for k in 0..n as u64 {
        c = c * 2 * (2 * k + 1) / (k + 2);
    }
    c
}
