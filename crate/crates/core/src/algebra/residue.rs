//! Square matrices over Z/mZ with a machine-word modulus.

use rug::ops::RemRounding;
use rug::Integer;

use super::mat::Mat;
use crate::error::{Error, Result};

/// Moduli below this bound let three products accumulate in a `u64`.
const SMALL_MODULUS: u64 = 1 << 20;

/// An n×n matrix (n = 2 or 3) with entries in `[0, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ResidueMat {
    n: usize,
    modulus: u64,
    entries: [u64; 9],
}

impl ResidueMat {
    pub fn identity(n: usize, modulus: u64) -> Result<Self> {
        check_modulus(modulus)?;
        let mut entries = [0u64; 9];
        for i in 0..n {
            entries[i * n + i] = 1 % modulus;
        }
        Ok(ResidueMat { n, modulus, entries })
    }

    /// Reduces an exact matrix modulo `m`.
    pub fn reduce(g: &Mat, modulus: u64) -> Result<Self> {
        check_modulus(modulus)?;
        let n = g.dim();
        let mut entries = [0u64; 9];
        let m = Integer::from(modulus);
        for i in 0..n {
            for j in 0..n {
                let r = Integer::from(g.get(i, j).rem_euc(&m));
                entries[i * n + j] = r.to_u64().expect("residue fits modulus");
            }
        }
        Ok(ResidueMat { n, modulus, entries })
    }

    /// Builds from residues given row-major; entries are reduced first.
    pub fn from_entries(n: usize, modulus: u64, values: &[i128]) -> Result<Self> {
        check_modulus(modulus)?;
        if values.len() != n * n {
            return Err(Error::DimensionMismatch(values.len(), n * n));
        }
        let mut entries = [0u64; 9];
        for (slot, &v) in entries.iter_mut().zip(values) {
            *slot = v.rem_euclid(modulus as i128) as u64;
        }
        Ok(ResidueMat { n, modulus, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> Vec<u64> {
        self.entries[..self.n * self.n].to_vec()
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| self.get(i, j) == if i == j { 1 % self.modulus } else { 0 })
        })
    }

    pub fn det(&self) -> u64 {
        let m = self.modulus;
        let e = |i, j| self.get(i, j);
        match self.n {
            2 => sub_mod(mul_mod(e(0, 0), e(1, 1), m), mul_mod(e(0, 1), e(1, 0), m), m),
            _ => {
                let minor = |a: usize, b: usize, c: usize, d: usize| {
                    sub_mod(mul_mod(e(1, a), e(2, b), m), mul_mod(e(1, c), e(2, d), m), m)
                };
                let t0 = mul_mod(e(0, 0), minor(1, 2, 2, 1), m);
                let t1 = mul_mod(e(0, 1), minor(0, 2, 2, 0), m);
                let t2 = mul_mod(e(0, 2), minor(0, 1, 1, 0), m);
                (sub_mod(t0, t1, m) + t2) % m
            }
        }
    }

    pub fn mul(&self, other: &ResidueMat) -> ResidueMat {
        debug_assert_eq!(self.n, other.n);
        debug_assert_eq!(self.modulus, other.modulus);
        let n = self.n;
        let m = self.modulus;
        let mut entries = [0u64; 9];
        if m < SMALL_MODULUS {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0u64;
                    for l in 0..n {
                        acc += self.entries[i * n + l] * other.entries[l * n + j];
                    }
                    entries[i * n + j] = acc % m;
                }
            }
        } else {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0u128;
                    for l in 0..n {
                        acc += mul_mod(self.entries[i * n + l], other.entries[l * n + j], m) as u128;
                    }
                    entries[i * n + j] = (acc % m as u128) as u64;
                }
            }
        }
        ResidueMat { n, modulus: m, entries }
    }

    pub fn pow_u64(&self, mut j: u64) -> ResidueMat {
        let mut acc = ResidueMat::identity(self.n, self.modulus).expect("modulus already checked");
        let mut base = *self;
        while j > 0 {
            if j & 1 == 1 {
                acc = acc.mul(&base);
            }
            j >>= 1;
            if j > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Square-and-multiply for an arbitrary-precision exponent.
    pub fn pow(&self, j: &Integer) -> ResidueMat {
        if let Some(small) = j.to_u64() {
            return self.pow_u64(small);
        }
        let mut acc = ResidueMat::identity(self.n, self.modulus).expect("modulus already checked");
        for bit in (0..j.significant_bits()).rev() {
            acc = acc.mul(&acc);
            if j.get_bit(bit) {
                acc = acc.mul(self);
            }
        }
        acc
    }
}

fn check_modulus(m: u64) -> Result<()> {
    if m < 2 {
        Err(Error::InvalidArgument(format!("modulus must be >= 2, got {m}")))
    } else {
        Ok(())
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

/// `g^j mod m`, by square-and-multiply in the residue ring.
pub fn mat_pow_mod(g: &Mat, j: &Integer, modulus: u64) -> Result<ResidueMat> {
    if *j < 0 {
        return Err(Error::InvalidArgument("negative exponent".into()));
    }
    Ok(ResidueMat::reduce(g, modulus)?.pow(j))
}

/// Converts an arbitrary-precision modulus to the machine-word engine.
pub fn modulus_u64(m: &Integer) -> Result<u64> {
    m.to_u64().ok_or_else(|| Error::ModulusTooLarge(m.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib() -> Mat {
        Mat::sl2(2, 1, 1, 1).unwrap()
    }

    #[test]
    fn reduces_exact_powers() {
        let r = mat_pow_mod(&fib(), &Integer::from(3), 2).unwrap();
        assert_eq!(r.entries(), vec![1, 0, 0, 1]);
        let r = mat_pow_mod(&fib(), &Integer::from(2), 3).unwrap();
        assert_eq!(r.entries(), vec![2, 0, 0, 2]);
        let r = mat_pow_mod(&fib(), &Integer::from(0), 7).unwrap();
        assert!(r.is_identity());
    }

    #[test]
    fn rejects_small_modulus() {
        assert!(mat_pow_mod(&fib(), &Integer::from(3), 1).is_err());
        assert!(mat_pow_mod(&fib(), &Integer::from(3), 0).is_err());
    }

    #[test]
    fn large_modulus_path_agrees_with_exact() {
        let m = (1u64 << 61) - 1;
        let exact = fib().pow(90);
        let r = mat_pow_mod(&fib(), &Integer::from(90), m).unwrap();
        assert_eq!(r, ResidueMat::reduce(&exact, m).unwrap());
        let huge = Integer::from(1u64 << 62) * 12345u32;
        let a = mat_pow_mod(&fib(), &huge, 1_000_003).unwrap();
        assert_eq!(a.det(), 1);
    }
}
