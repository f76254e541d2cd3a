//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the library's arithmetic: points are generated from their defining
//! formulas with plain integer loops and sums use `cos`/`sin` directly.
#![allow(dead_code)]

use num_complex::Complex64;

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&m| (2..m).take_while(|k| k * k <= m).all(|k| m % k != 0)).collect()
}

fn pow_mod(b: u64, e: u32, m: u64) -> u64 {
    (0..e).fold(1 % m, |acc, _| acc * b % m)
}

/// Numerators of point `j`: coordinate `i` is `Σ_{h<i} ε_h a_h j^h + a_i j^i mod modulus`.
pub fn pset_point(modulus: u64, a: &[u64], eps: &[u8], j: u64) -> Vec<u64> {
    (0..a.len())
        .map(|i| {
            let mut v = a[i] * pow_mod(j, i as u32 + 1, modulus) % modulus;
            for h in 0..i {
                v += eps[h] as u64 * a[h] * pow_mod(j, h as u32 + 1, modulus) % modulus;
            }
            v % modulus
        })
        .collect()
}

/// Distinct points of `𝒫^{a,ε}_{d,p}` encoded as base-`p` integers, sorted.
pub fn pset_codes(p: u64, a: &[u64], eps: &[u8]) -> Vec<u64> {
    let mut v: Vec<u64> = (0..p)
        .map(|j| pset_point(p, a, eps, j).iter().rev().fold(0, |acc, &x| acc * p + x))
        .collect();
    v.sort_unstable();
    v.dedup();
    v
}

pub fn sorted_intersection_len(x: &[u64], y: &[u64]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// `Σ_x exp(2πi k·x)` for points given as (numerators, denominator).
pub fn naive_sum(points: &[(Vec<u64>, u64)], k: &[i64]) -> Complex64 {
    points
        .iter()
        .map(|(num, den)| {
            let r = num.iter().zip(k).map(|(&n, &ki)| n as i128 * ki as i128).sum::<i128>();
            let t = r.rem_euclid(*den as i128) as f64 / *den as f64;
            Complex64::from_polar(1.0, std::f64::consts::TAU * t)
        })
        .sum()
}

/// Odometer over `[−w, w]^d` in lexicographic order.
pub fn for_each_in_box(d: usize, w: i64, mut f: impl FnMut(&[i64])) {
    let mut k = vec![-w; d];
    loop {
        f(&k);
        let mut i = d;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if k[i] < w {
                k[i] += 1;
                break;
            }
            k[i] = -w;
        }
    }
}
