//! Word-size modular arithmetic, deterministic primality and Goldbach pairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest even number accepted by [`goldbach_pairs`].
pub const GOLDBACH_LIMIT: u64 = 1_000_000_000;

/// Witness bases for which the strong pseudoprime test is exact on all of `u64`.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// A prime below 2^63.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Prime(u64);

impl Prime {
    pub fn new(value: u64) -> Result<Self> {
        if value >= 1 << 63 {
            return Err(Error::OutOfRange(value, "primes must be below 2^63"));
        }
        if is_prime(value) {
            Ok(Prime(value))
        } else {
            Err(Error::NotPrime(value))
        }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }
}

impl<'de> Deserialize<'de> for Prime {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let v = u64::deserialize(de)?;
        Prime::new(v).map_err(serde::de::Error::custom)
    }
}

impl std::fmt::Display for Prime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldbachPair {
    pub p: Prime,
    pub q: Prime,
    pub m: u64,
}

#[inline]
pub fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `a^e mod m` by square-and-multiply. `a^0 = 1` (reduced, so `1 mod 1 = 0`).
pub fn mod_pow(a: u64, mut e: u64, m: u64) -> u64 {
    let mut base = a % m;
    let mut acc = 1 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mod_mul(acc, base, m);
        }
        base = mod_mul(base, base, m);
        e >>= 1;
    }
    acc
}

/// Inverse of `a` modulo the prime `p`, in `1..p`.
pub fn mod_inv(a: u64, p: Prime) -> Result<u64> {
    let p = p.get();
    let a = a % p;
    if a == 0 {
        return Err(Error::ZeroInverse(a, p));
    }
    Ok(mod_pow(a, p - 2, p))
}

/// Deterministic primality test for `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &b in &MR_BASES {
        if n == b {
            return true;
        }
        if n.is_multiple_of(b) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mod_mul(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> Prime {
    let mut c = n + 1;
    while !is_prime(c) {
        c += 1;
    }
    Prime(c)
}

/// All decompositions `m = p + q` with `p <= q` prime, ascending in `p`.
pub fn goldbach_pairs(m: u64) -> Result<Vec<GoldbachPair>> {
    if m % 2 == 1 {
        return Err(Error::OutOfRange(m, "m must be even"));
    }
    if !(4..=GOLDBACH_LIMIT).contains(&m) {
        return Err(Error::OutOfRange(m, "m must lie in [4, 10^9]"));
    }
    let mut out = Vec::new();
    for p in 2..=m / 2 {
        if is_prime(p) && is_prime(m - p) {
            out.push(GoldbachPair {
                p: Prime(p),
                q: Prime(m - p),
                m,
            });
        }
    }
    Ok(out)
}
