//! Orders for SL(2, O_K) with K one of the five Euclidean imaginary quadratic fields.

use std::fmt;

use rug::Integer;

use super::descend;
use crate::algebra::arith::{factor, factors_product, merge_factors};
use crate::algebra::units::basis_minpoly;
use crate::algebra::QuadInt;
use crate::error::{Error, Result};

pub const EUCLIDEAN_D: [i64; 5] = [-1, -2, -3, -7, -11];

/// Traces of finite-order elements; the same set for all five rings.
pub const TORSION_TRACES: [i64; 5] = [-2, -1, 0, 1, 2];

/// A 2×2 matrix over the ring of integers of Q(√d), determinant 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BianchiMat {
    d: i64,
    entries: [QuadInt; 4],
}

impl BianchiMat {
    pub fn new(d: i64, entries: [QuadInt; 4]) -> Result<Self> {
        if !EUCLIDEAN_D.contains(&d) {
            return Err(Error::InvalidArgument(format!("d = {d} is not one of {EUCLIDEAN_D:?}")));
        }
        if entries.iter().any(|e| e.d() != d) {
            return Err(Error::InvalidArgument("entries from different fields".into()));
        }
        let m = BianchiMat { d, entries };
        let det = m.det();
        if !det.is_one() {
            return Err(Error::BadDeterminant(det.to_string()));
        }
        Ok(m)
    }

    /// Entries given as `(u, v)` coordinates in the basis `{1, ω}`.
    pub fn from_basis(d: i64, coords: [(i64, i64); 4]) -> Result<Self> {
        let e = coords.map(|(u, v)| QuadInt::from_basis(d, &Integer::from(u), &Integer::from(v)));
        BianchiMat::new(d, e)
    }

    /// Parses four `u:v` basis pairs (a bare integer means `v = 0`).
    pub fn parse(d: i64, s: &str) -> Result<Self> {
        let coords: Vec<(i64, i64)> = s
            .split(',')
            .map(|t| {
                let bad = || Error::InvalidArgument(format!("bad entry {t:?}, expected u:v"));
                let mut it = t.trim().split(':');
                let u = it.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
                let v = match it.next() {
                    Some(v) => v.trim().parse().map_err(|_| bad())?,
                    None => 0,
                };
                Ok((u, v))
            })
            .collect::<Result<_>>()?;
        let arr: [(i64, i64); 4] = coords
            .try_into()
            .map_err(|_| Error::InvalidArgument("expected four entries".into()))?;
        BianchiMat::from_basis(d, arr)
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn entry(&self, i: usize, j: usize) -> &QuadInt {
        &self.entries[2 * i + j]
    }

    pub fn det(&self) -> QuadInt {
        let e = &self.entries;
        let ad = e[0].mul(&e[3]).expect("same field");
        let bc = e[1].mul(&e[2]).expect("same field");
        ad.sub(&bc).expect("same field")
    }

    pub fn trace(&self) -> QuadInt {
        self.entries[0].add(&self.entries[3]).expect("same field")
    }

    pub fn mul(&self, other: &BianchiMat) -> BianchiMat {
        let a = &self.entries;
        let b = &other.entries;
        let dot = |x: &QuadInt, y: &QuadInt, z: &QuadInt, w: &QuadInt| {
            x.mul(y).expect("same field").add(&z.mul(w).expect("same field")).expect("same field")
        };
        BianchiMat {
            d: self.d,
            entries: [
                dot(&a[0], &b[0], &a[1], &b[2]),
                dot(&a[0], &b[1], &a[1], &b[3]),
                dot(&a[2], &b[0], &a[3], &b[2]),
                dot(&a[2], &b[1], &a[3], &b[3]),
            ],
        }
    }

    pub fn pow(&self, mut j: u64) -> BianchiMat {
        let one = QuadInt::one(self.d);
        let zero = QuadInt::from_int(self.d, 0);
        let mut acc = BianchiMat { d: self.d, entries: [one.clone(), zero.clone(), zero, one] };
        let mut base = self.clone();
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
}

impl fmt::Display for BianchiMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = &self.entries;
        write!(f, "[[{}, {}], [{}, {}]]", e[0], e[1], e[2], e[3])
    }
}

/// `O_K / αO_K` for a rational integer `α`, elements as basis coordinates.
#[derive(Clone, Copy)]
struct Ring {
    m: u128,
    t: u128,
    n: u128,
}

type Elt = (u128, u128);

impl Ring {
    fn new(d: i64, alpha: u64) -> Self {
        let (t, n) = basis_minpoly(d);
        let m = alpha as u128;
        let red = |x: i64| (x as i128).rem_euclid(m as i128) as u128;
        Ring { m, t: red(t), n: red(n) }
    }

    fn reduce(&self, x: &QuadInt) -> Elt {
        let (u, v) = x.basis_coords();
        let m = Integer::from(self.m);
        let red = |z: Integer| z.rem_euc(&m).to_u128().expect("reduced");
        (red(u), red(v))
    }

    fn add(&self, a: Elt, b: Elt) -> Elt {
        ((a.0 + b.0) % self.m, (a.1 + b.1) % self.m)
    }

    fn mul(&self, a: Elt, b: Elt) -> Elt {
        let m = self.m;
        // ω² = tω − n
        let vv = a.1 * b.1 % m;
        let u = (a.0 * b.0 % m + m - self.n * vv % m) % m;
        let v = (a.0 * b.1 % m + a.1 * b.0 % m + self.t * vv % m) % m;
        (u, v)
    }

    fn mat_mul(&self, a: &[Elt; 4], b: &[Elt; 4]) -> [Elt; 4] {
        let dot = |x, y, z, w| self.add(self.mul(x, y), self.mul(z, w));
        [
            dot(a[0], b[0], a[1], b[2]),
            dot(a[0], b[1], a[1], b[3]),
            dot(a[2], b[0], a[3], b[2]),
            dot(a[2], b[1], a[3], b[3]),
        ]
    }

    fn mat_pow(&self, g: &[Elt; 4], j: &Integer) -> [Elt; 4] {
        let mut acc = [(1 % self.m, 0), (0, 0), (0, 0), (1 % self.m, 0)];
        for bit in (0..j.significant_bits()).rev() {
            acc = self.mat_mul(&acc, &acc);
            if j.get_bit(bit) {
                acc = self.mat_mul(&acc, g);
            }
        }
        acc
    }
}

use rug::ops::RemRounding;

/// A multiple of the exponent of SL(2, O_K/α) for every splitting type:
/// `∏ p^{6k}(p²−1)(p⁴−1)` over `p^k ∥ α`.
fn group_order_multiple(alpha: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for (p, k) in factor(alpha) {
        out = merge_factors(&out, &[(p, 6 * k)]);
        for f in [p - 1, p + 1, p - 1, p + 1, p * p + 1] {
            out = merge_factors(&out, &factor(f));
        }
    }
    out
}

fn require_loxodromic(g: &BianchiMat) -> Result<()> {
    let tr = g.trace();
    if tr.y2() == &0 {
        let t = Integer::from(tr.x2() / 2u32);
        if let Some(t) = t.to_i64() {
            if t.abs() == 2 {
                return Err(Error::NotHyperbolic(t.to_string()));
            }
            if TORSION_TRACES.contains(&t) {
                return Err(Error::Torsion);
            }
        }
    }
    Ok(())
}

/// Least `j ≥ 1` with `α | b_j` in `O_K`, for a rational integer `α ≥ 1`.
pub fn order_p_bianchi(gamma: &BianchiMat, alpha: u64) -> Result<u64> {
    if alpha == 0 {
        return Err(Error::InvalidArgument("alpha = 0".into()));
    }
    require_loxodromic(gamma)?;
    if alpha == 1 {
        return Ok(1);
    }
    let ring = Ring::new(gamma.d, alpha);
    let g = gamma.entries.clone().map(|e| ring.reduce(&e));
    let factors = group_order_multiple(alpha);
    let j = descend(factors_product(&factors), &factors, |j| Ok(ring.mat_pow(&g, j)[1] == (0, 0)))?;
    j.to_u64().ok_or_else(|| Error::CapExceeded(format!("order {j}")))
}
