//! Elementary integer helpers: primes, factorization, gcd/lcm, squarefree parts.

use rug::ops::Pow;
use rug::Integer;

use crate::error::{Error, Result};

/// Trial-division bound used when extracting squarefree parts of big integers.
pub const TRIAL_DIVISION_LIMIT: u64 = 20_000_000;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Least common multiple; `None` on overflow.
pub fn lcm(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / gcd(a, b)).checked_mul(b)
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
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

/// Sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &p)| p)
        .map(|(i, _)| i as u64)
        .collect()
}

/// Prime factorization by trial division, sorted by prime.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Multiplies two factorizations given as sorted (prime, exponent) lists.
pub fn merge_factors(a: &[(u64, u32)], b: &[(u64, u32)]) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x.0 == y.0 => {
                i += 1;
                j += 1;
                (x.0, x.1 + y.1)
            }
            (Some(&x), Some(&y)) if x.0 < y.0 => {
                i += 1;
                x
            }
            (Some(_), Some(&y)) => {
                j += 1;
                y
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        out.push(next);
    }
    out
}

/// Returns `(p, e)` when `n = p^e` with `p` prime.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    match factor(n).as_slice() {
        [(p, e)] => Some((*p, *e)),
        _ => None,
    }
}

pub fn largest_prime_factor(n: u64) -> u64 {
    factor(n).last().map(|&(p, _)| p).unwrap_or(1)
}

pub fn is_squarefree(n: u64) -> bool {
    factor(n).iter().all(|&(_, e)| e == 1)
}

/// Writes `n = f^2 * d` with `d` squarefree, for `n > 0`.
///
/// Trial division runs up to the cube root of what remains; a cofactor with
/// no prime factor below its cube root has at most two prime factors, so it
/// is either a perfect square or squarefree.
pub fn squarefree_decompose(n: &Integer) -> Result<(Integer, Integer)> {
    if *n <= 0 {
        return Err(Error::InvalidArgument(format!(
            "squarefree part of non-positive {n}"
        )));
    }
    let mut rest = n.clone();
    let mut d = Integer::from(1);
    let mut f = Integer::from(1);
    let mut p = 2u64;
    loop {
        let cube = Integer::from(p).pow(3);
        if cube > rest {
            break;
        }
        if p > TRIAL_DIVISION_LIMIT {
            return Err(Error::FactorLimit(n.to_string()));
        }
        let mut e = 0u32;
        while rest.is_divisible_u(p as u32) {
            rest /= p as u32;
            e += 1;
        }
        if e > 0 {
            f *= Integer::from(p).pow(e / 2);
            if e % 2 == 1 {
                d *= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest.is_perfect_square() {
        f *= rest.sqrt();
    } else {
        d *= rest;
    }
    Ok((d, f))
}

/// Squarefree kernel of a positive integer.
pub fn squarefree_part(n: &Integer) -> Result<Integer> {
    squarefree_decompose(n).map(|(d, _)| d)
}

/// `|SL(2, Z/mZ)| = m^3 * prod_{p | m} (1 - p^-2)`, together with its factorization.
pub fn sl2_order(m: u64) -> (Integer, Vec<(u64, u32)>) {
    let mut order = Integer::from(1);
    let mut fac: Vec<(u64, u32)> = Vec::new();
    for (p, e) in factor(m) {
        order *= Integer::from(p).pow(3 * e - 2) * (Integer::from(p) * p - 1u32);
        fac = merge_factors(&fac, &[(p, 3 * e - 2)]);
        fac = merge_factors(&fac, &factor(p - 1));
        fac = merge_factors(&fac, &factor(p + 1));
    }
    (order, fac)
}

/// `|SL(3, Z/p^kZ)| = p^{8(k-1)} p^3 (p^2 - 1)(p^3 - 1)` as a factorization.
pub fn sl3_order_factors(p: u64, k: u32) -> Vec<(u64, u32)> {
    let mut fac = vec![(p, 8 * (k - 1) + 3)];
    fac = merge_factors(&fac, &factor(p - 1));
    fac = merge_factors(&fac, &factor(p + 1));
    fac = merge_factors(&fac, &factor(p - 1));
    fac = merge_factors(&fac, &factor(p * p + p + 1));
    fac
}

pub fn factors_product(f: &[(u64, u32)]) -> Integer {
    let mut out = Integer::from(1);
    for &(p, e) in f {
        out *= Integer::from(p).pow(e);
    }
    out
}

/// All divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factor(n) {
        let len = out.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_factors() {
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(factor(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
        assert_eq!(prime_power(32), Some((2, 5)));
        assert_eq!(prime_power(12), None);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn squarefree_parts() {
        let cases = [(45u64, 5u64, 3u64), (32, 2, 4), (5, 5, 1), (12, 3, 2), (49, 1, 7)];
        for (n, d, f) in cases {
            let (dd, ff) = squarefree_decompose(&Integer::from(n)).unwrap();
            assert_eq!((dd, ff), (Integer::from(d), Integer::from(f)), "n = {n}");
        }
        // two large primes above the cube root
        let n = Integer::from(1_000_003u64) * 1_000_033u64;
        assert_eq!(squarefree_part(&n).unwrap(), n);
        let sq = Integer::from(1_000_003u64) * 1_000_003u64 * 7u32;
        assert_eq!(squarefree_part(&sq).unwrap(), 7);
    }

    #[test]
    fn group_orders() {
        // |SL(2,F_p)| = p(p^2-1)
        assert_eq!(sl2_order(5).0, 120);
        assert_eq!(sl2_order(6).0, 6 * 24);
        let (o, f) = sl2_order(12);
        assert_eq!(o, factors_product(&f));
    }
}
