//! Rank certificates modulo a prime.
//!
//! For a prime `p ≡ 1 (mod k)` and a primitive `k`-th root of unity `r` in
//! F_p, sending ζ_k ↦ r is a ring homomorphism from the `p`-integral part of
//! ℚ(ζ_k) onto F_p. Minors map to minors, so a matrix whose image has full
//! column rank over F_p has full column rank over ℚ(ζ_k). The converse can
//! fail, so a rank deficit mod `p` proves nothing and callers fall back to
//! exact elimination.

use num::{BigInt, Integer, ToPrimitive};

use super::Matrix;
use crate::field::CycloNum;

/// A prime `p ≡ 1 (mod k)` together with a primitive `k`-th root of unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModPrime {
    pub p: u64,
    pub root: u64,
}

const PRIME_CEILING: u64 = 1 << 62;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(p)) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for 64-bit integers.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn prime_factors(mut k: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= k {
        if k.is_multiple_of(q) {
            out.push(q);
            while k.is_multiple_of(q) {
                k /= q;
            }
        }
        q += 1;
    }
    if k > 1 {
        out.push(k);
    }
    out
}

impl ModPrime {
    /// The `skip`-th largest prime below 2^62 that is `1 mod conductor`,
    /// with a primitive root of unity of order `conductor`.
    pub fn for_conductor(conductor: u32, skip: usize) -> Self {
        let k = u64::from(conductor);
        let mut t = (PRIME_CEILING - 1) / k;
        let mut remaining = skip;
        loop {
            let p = k * t + 1;
            if is_prime(p) {
                if remaining == 0 {
                    return Self {
                        p,
                        root: primitive_root_of_order(k, p),
                    };
                }
                remaining -= 1;
            }
            t -= 1;
        }
    }

    fn reduce_int(&self, n: &BigInt) -> u64 {
        let r = n.mod_floor(&BigInt::from(self.p));
        r.to_u64().expect("residue fits in u64")
    }

    /// Image of `x` in F_p, or `None` when a denominator vanishes mod `p`.
    pub fn reduce(&self, x: &CycloNum) -> Option<u64> {
        let mut acc = 0u64;
        let mut rpow = 1u64;
        for c in x.coords() {
            if *c.numer() != BigInt::from(0) {
                let den = self.reduce_int(c.denom());
                if den == 0 {
                    return None;
                }
                let num = self.reduce_int(c.numer());
                let term = mul_mod(num, pow_mod(den, self.p - 2, self.p), self.p);
                acc = (acc + mul_mod(term, rpow, self.p)) % self.p;
            }
            rpow = mul_mod(rpow, self.root, self.p);
        }
        Some(acc)
    }

    /// Rank of the reduced matrix over F_p.
    pub fn rank(&self, m: &Matrix) -> Option<usize> {
        let (rows, cols) = (m.rows(), m.cols());
        let mut a = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for e in m.row(i) {
                a.push(self.reduce(e)?);
            }
        }
        let p = self.p;
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(piv) = (rank..rows).find(|&r| a[r * cols + col] != 0) else {
                continue;
            };
            if piv != rank {
                for j in 0..cols {
                    a.swap(piv * cols + j, rank * cols + j);
                }
            }
            let inv = pow_mod(a[rank * cols + col], p - 2, p);
            for r in rank + 1..rows {
                let f = a[r * cols + col];
                if f == 0 {
                    continue;
                }
                let f = mul_mod(f, inv, p);
                for j in col..cols {
                    let s = a[rank * cols + j];
                    if s != 0 {
                        let v = &mut a[r * cols + j];
                        *v = (*v + p - mul_mod(f, s, p)) % p;
                    }
                }
            }
            rank += 1;
        }
        Some(rank)
    }
}

fn primitive_root_of_order(k: u64, p: u64) -> u64 {
    let factors = prime_factors(k);
    (2..p)
        .map(|g| pow_mod(g, (p - 1) / k, p))
        .find(|&r| factors.iter().all(|&q| pow_mod(r, k / q, p) != 1))
        .expect("p ≡ 1 mod k has a primitive k-th root of unity")
}

/// Returns `true` only when full column rank is certified modulo some prime;
/// `false` means "not certified", not "rank deficient".
pub fn certifies_full_column_rank(m: &Matrix) -> bool {
    if m.cols() > m.rows() {
        return false;
    }
    (0..2)
        .any(|skip| ModPrime::for_conductor(m.field().conductor(), skip).rank(m) == Some(m.cols()))
}
