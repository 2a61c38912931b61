//! Arithmetic modulo word-sized primes, used to certify rank and to recover
//! exact nullspaces by Chinese remaindering and rational reconstruction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
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

/// Primes just below `2^62`, descending.
pub(crate) fn primes() -> impl Iterator<Item = u64> {
    (0..).map(|i| (1u64 << 62) - 1 - 2 * i).filter(|&n| is_prime(n))
}

/// Reduced row echelon form of a dense residue matrix, in place; returns the pivot columns.
pub(crate) fn rref_mod(a: &mut [Vec<u64>], cols: usize, p: u64) -> Vec<usize> {
    let mut pivots = Vec::new();
    for col in 0..cols {
        let r = pivots.len();
        let Some(piv) = (r..a.len()).find(|&i| a[i][col] != 0) else { continue };
        a.swap(r, piv);
        let inv = pow_mod(a[r][col], p - 2, p);
        for x in a[r][col..].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            let f = row[col];
            if i == r || f == 0 {
                continue;
            }
            for (x, &y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x = (*x + p - mul_mod(f, y, p)) % p;
            }
        }
        pivots.push(col);
    }
    pivots
}

/// Residues of a row-major rational matrix, or `None` if `p` divides a denominator.
pub(crate) fn reduce_rows<'a>(rows: impl Iterator<Item = &'a [Rational]>, p: u64) -> Option<Vec<Vec<u64>>> {
    rows.map(|row| row.iter().map(|c| c.residue(p)).collect()).collect()
}

/// The rational `n/d` with `|n|, d ≤ sqrt(m/2)` congruent to `a` modulo `m`, if any.
pub(crate) fn reconstruct(a: &BigInt, m: &BigInt) -> Option<Rational> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let s2 = &s0 - &q * &s1;
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if s1.is_zero() || s1.abs() > bound || !r1.gcd(&s1).is_one() {
        return None;
    }
    Some(Rational::from_bigint(r1) / Rational::from_bigint(s1))
}

/// Extends `x ≡ acc (mod m)` by `x ≡ r (mod p)`.
pub(crate) fn crt_step(acc: &BigInt, m: &BigInt, r: u64, p: u64) -> BigInt {
    let acc_p = acc.mod_floor(&BigInt::from(p));
    let acc_p = u64::try_from(acc_p).expect("below p");
    let m_p = u64::try_from(m.mod_floor(&BigInt::from(p))).expect("below p");
    let t = mul_mod((r + p - acc_p) % p, pow_mod(m_p, p - 2, p), p);
    acc + m * BigInt::from(t)
}
