//! Parabolic orders for SL(3, Z).

use std::fmt;
use std::str::FromStr;

use rug::Integer;
use serde::Serialize;

use super::descend;
use crate::algebra::arith::{is_prime, sl3_order_factors, factors_product};
use crate::algebra::{Mat, ResidueMat};
use crate::error::{Error, Result};

/// One of the six maximal parabolic shapes in SL(3): `P_j` or its primed
/// (transposed) partner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ParabolicSpec {
    pub index: u8,
    pub primed: bool,
}

impl ParabolicSpec {
    pub fn new(index: u8, primed: bool) -> Result<Self> {
        if !(1..=3).contains(&index) {
            return Err(Error::InvalidArgument(format!("parabolic index {index} not in 1..3")));
        }
        Ok(ParabolicSpec { index, primed })
    }

    pub fn all() -> Vec<ParabolicSpec> {
        (1..=3)
            .flat_map(|i| [false, true].map(|p| ParabolicSpec { index: i, primed: p }))
            .collect()
    }

    /// Zero positions (0-based row, column) that define membership mod `p^k`.
    pub fn mask(&self) -> [(usize, usize); 2] {
        let j = (self.index - 1) as usize;
        let others: Vec<usize> = (0..3).filter(|&i| i != j).collect();
        if self.primed {
            [(j, others[0]), (j, others[1])]
        } else {
            [(others[0], j), (others[1], j)]
        }
    }

    pub fn contains(&self, g: &ResidueMat) -> bool {
        self.mask().iter().all(|&(r, c)| g.get(r, c) == 0)
    }
}

impl fmt::Display for ParabolicSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}{}", self.index, if self.primed { "'" } else { "" })
    }
}

impl FromStr for ParabolicSpec {
    type Err = Error;

    /// Accepts `1`, `2'`, `P3`, `P1'`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches(['P', 'p']);
        let (digits, primed) = match t.strip_suffix('\'') {
            Some(d) => (d, true),
            None => (t, false),
        };
        let index = digits
            .parse::<u8>()
            .map_err(|_| Error::InvalidArgument(format!("bad parabolic spec {s:?}")))?;
        ParabolicSpec::new(index, primed)
    }
}

/// Companion matrix of the monic cubic `x³ + c2·x² + c1·x + c0`, negated
/// when its determinant is -1 so that it lies in SL(3, Z).
pub fn companion(c2: i64, c1: i64, c0: i64) -> Result<Mat> {
    if c0 != 1 && c0 != -1 {
        return Err(Error::BadDeterminant(format!("constant term {c0} is not a unit")));
    }
    let sign = if -c0 == 1 { 1 } else { -1 };
    Mat::from_i64(3, &[0, 0, -c0 * sign, sign, 0, -c1 * sign, 0, sign, -c2 * sign])
}

/// Parses `1,c2,c1,c0` (leading coefficient first) into a companion matrix.
pub fn companion_from_poly(coeffs: &[i64]) -> Result<Mat> {
    match coeffs {
        [1, c2, c1, c0] => companion(*c2, *c1, *c0),
        _ => Err(Error::InvalidArgument(format!(
            "expected a monic cubic as 1,c2,c1,c0, got {coeffs:?}"
        ))),
    }
}

/// Rejects elements whose characteristic polynomial has the root 1 or -1.
fn require_irreducible(g: &Mat) -> Result<()> {
    if g.dim() != 3 {
        return Err(Error::DimensionMismatch(g.dim(), 3));
    }
    let t = g.trace();
    let e = |i, j| g.get(i, j);
    let mut s = Integer::new();
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        s += Integer::from(e(a, a) * e(b, b)) - Integer::from(e(a, b) * e(b, a));
    }
    // χ(x) = x³ − t x² + s x − 1
    let at_one = Integer::from(&s - &t);
    let at_minus_one = Integer::from(&s + &t) + 2u32;
    if at_one == 0 || at_minus_one == 0 {
        return Err(Error::Reducible);
    }
    Ok(())
}

fn prime_power(p: u64, k: u32) -> Result<u64> {
    if !is_prime(p) || k == 0 {
        return Err(Error::InvalidArgument(format!("need a prime power, got {p}^{k}")));
    }
    p.checked_pow(k).ok_or_else(|| Error::ModulusTooLarge(format!("{p}^{k}")))
}

/// Least `j ≥ 1` with the masked entries of `γ^j` divisible by `p^k`.
pub fn order_p_parabolic(gamma: &Mat, spec: ParabolicSpec, p: u64, k: u32) -> Result<u64> {
    require_irreducible(gamma)?;
    let m = prime_power(p, k)?;
    let g = ResidueMat::reduce(gamma, m)?;
    let factors = sl3_order_factors(p, k);
    let j = descend(factors_product(&factors), &factors, |j| Ok(spec.contains(&g.pow(j))))?;
    j.to_u64().ok_or_else(|| Error::CapExceeded(format!("order {j}")))
}

/// Order of `γ` in SL(3, Z/p^k).
pub fn image_order(gamma: &Mat, p: u64, k: u32) -> Result<u64> {
    if gamma.dim() != 3 {
        return Err(Error::DimensionMismatch(gamma.dim(), 3));
    }
    let m = prime_power(p, k)?;
    let g = ResidueMat::reduce(gamma, m)?;
    let factors = sl3_order_factors(p, k);
    let j = descend(factors_product(&factors), &factors, |j| Ok(g.pow(j).is_identity()))?;
    j.to_u64().ok_or_else(|| Error::CapExceeded(format!("order {j}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(g: &Mat, spec: ParabolicSpec, m: u64) -> u64 {
        let r = ResidueMat::reduce(g, m).unwrap();
        let mut acc = r;
        for j in 1.. {
            if spec.contains(&acc) {
                return j;
            }
            acc = acc.mul(&r);
        }
        unreachable!()
    }

    #[test]
    fn masks() {
        let p1 = ParabolicSpec::new(1, false).unwrap();
        assert_eq!(p1.mask(), [(1, 0), (2, 0)]);
        assert_eq!(ParabolicSpec::new(3, true).unwrap().mask(), [(2, 0), (2, 1)]);
        assert_eq!("P2'".parse::<ParabolicSpec>().unwrap(), ParabolicSpec::new(2, true).unwrap());
        assert!(ParabolicSpec::new(4, false).is_err());
    }

    #[test]
    fn companion_orders() {
        let g = companion_from_poly(&[1, -1, -2, 1]).unwrap();
        assert_eq!(g.det(), 1);
        for spec in ParabolicSpec::all() {
            for (p, k) in [(2u64, 1u32), (3, 1), (2, 3), (5, 2)] {
                let m = p.pow(k);
                let got = order_p_parabolic(&g, spec, p, k).unwrap();
                assert_eq!(got, naive(&g, spec, m), "{spec} mod {m}");
                assert_eq!(image_order(&g, p, k).unwrap() % got, 0);
            }
        }
    }

    #[test]
    fn rejects_reducible() {
        let u = Mat::from_i64(3, &[1, 1, 0, 0, 1, 1, 0, 0, 1]).unwrap();
        assert_eq!(order_p_parabolic(&u, ParabolicSpec::new(1, false).unwrap(), 2, 1), Err(Error::Reducible));
        assert!(companion(0, 0, 2).is_err());
    }
}
