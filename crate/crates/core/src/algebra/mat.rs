//! Exact integer matrices of determinant one, stored as sign-normalized
//! representatives of their projective class.

use std::fmt;

use rug::Integer;

use crate::error::{Error, Result};

/// An n×n integer matrix (n = 2 or 3) with determinant 1.
///
/// For n = 2 the representative of ±g is chosen with positive trace, or when
/// the trace vanishes, with the first nonzero entry of the first row
/// positive. For n = 3 there is nothing to normalize since -I has
/// determinant -1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat {
    n: usize,
    entries: Vec<Integer>,
}

impl Mat {
    /// Validates dimension and determinant, then normalizes.
    pub fn new(n: usize, entries: Vec<Integer>) -> Result<Self> {
        if n != 2 && n != 3 {
            return Err(Error::InvalidArgument(format!("unsupported dimension {n}")));
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(entries.len(), n * n));
        }
        let m = Mat { n, entries };
        let det = m.det();
        if det != 1 {
            return Err(Error::BadDeterminant(det.to_string()));
        }
        Ok(m.normalized())
    }

    pub fn from_i64(n: usize, entries: &[i64]) -> Result<Self> {
        Mat::new(n, entries.iter().map(|&v| Integer::from(v)).collect())
    }

    pub fn sl2(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Mat::from_i64(2, &[a, b, c, d])
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![Integer::new(); n * n];
        for i in 0..n {
            entries[i * n + i] = Integer::from(1);
        }
        Mat { n, entries }
    }

    /// Construction without the determinant check, used where det = 1 holds
    /// by construction.
    pub(crate) fn from_parts_unchecked(n: usize, entries: Vec<Integer>) -> Self {
        Mat { n, entries }.normalized()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Integer {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Integer] {
        &self.entries
    }

    /// Upper-right entry of a 2×2 matrix.
    pub fn b(&self) -> &Integer {
        self.get(0, 1)
    }

    pub fn c(&self) -> &Integer {
        self.get(1, 0)
    }

    pub fn trace(&self) -> Integer {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn det(&self) -> Integer {
        let e = |i, j| self.get(i, j);
        match self.n {
            2 => Integer::from(e(0, 0) * e(1, 1)) - Integer::from(e(0, 1) * e(1, 0)),
            _ => {
                let m = |a: usize, b: usize, c: usize, d: usize| {
                    Integer::from(e(1, a) * e(2, b)) - Integer::from(e(1, c) * e(2, d))
                };
                Integer::from(e(0, 0) * m(1, 2, 2, 1)) - Integer::from(e(0, 1) * m(0, 2, 2, 0))
                    + Integer::from(e(0, 2) * m(0, 1, 1, 0))
            }
        }
    }

    fn normalized(mut self) -> Self {
        if self.n != 2 {
            return self;
        }
        let flip = match self.trace().cmp0() {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => self.entries[..2]
                .iter()
                .find(|v| v.cmp0() != std::cmp::Ordering::Equal)
                .map(|v| v.cmp0() == std::cmp::Ordering::Less)
                .unwrap_or(false),
        };
        if flip {
            for v in &mut self.entries {
                *v = -std::mem::take(v);
            }
        }
        self
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(self.mul_raw(other).normalized())
    }

    fn mul_raw(&self, other: &Mat) -> Mat {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Integer::new();
                for l in 0..n {
                    acc += self.get(i, l) * other.get(l, j);
                }
                entries.push(acc);
            }
        }
        Mat { n, entries }
    }

    /// Exact `g^j` by repeated squaring.
    pub fn pow(&self, mut j: u64) -> Mat {
        let mut acc = Mat::identity(self.n);
        let mut base = self.clone();
        while j > 0 {
            if j & 1 == 1 {
                acc = acc.mul_raw(&base);
            }
            j >>= 1;
            if j > 0 {
                base = base.mul_raw(&base);
            }
        }
        acc.normalized()
    }

    /// Inverse via the adjugate (determinant is 1).
    pub fn inverse(&self) -> Mat {
        let e = |i, j| self.get(i, j).clone();
        match self.n {
            2 => Mat::from_parts_unchecked(2, vec![e(1, 1), -e(0, 1), -e(1, 0), e(0, 0)]),
            _ => {
                let mut adj = Vec::with_capacity(9);
                for i in 0..3 {
                    for j in 0..3 {
                        // cofactor of (j, i)
                        let rows: Vec<usize> = (0..3).filter(|&r| r != j).collect();
                        let cols: Vec<usize> = (0..3).filter(|&c| c != i).collect();
                        let minor = Integer::from(self.get(rows[0], cols[0]) * self.get(rows[1], cols[1]))
                            - Integer::from(self.get(rows[0], cols[1]) * self.get(rows[1], cols[0]));
                        adj.push(if (i + j) % 2 == 0 { minor } else { -minor });
                    }
                }
                Mat::from_parts_unchecked(3, adj)
            }
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat::identity(self.n)
    }

    /// `η_m g η_m⁻¹` with `η_m = diag(1, m)`: `[[a, b/m], [m c, d]]`.
    pub fn conjugate_by_diag(&self, m: &Integer) -> Result<Mat> {
        if self.n != 2 {
            return Err(Error::DimensionMismatch(self.n, 2));
        }
        if *m <= 0 {
            return Err(Error::InvalidArgument(format!("conjugator modulus {m}")));
        }
        if !self.b().is_divisible(m) {
            return Err(Error::NotIntegral(format!("{m} does not divide b = {}", self.b())));
        }
        let entries = vec![
            self.get(0, 0).clone(),
            Integer::from(self.b() / m),
            Integer::from(self.c() * m),
            self.get(1, 1).clone(),
        ];
        Ok(Mat::from_parts_unchecked(2, entries))
    }

    /// Parses comma-separated row-major integers (4 or 9 of them).
    pub fn parse(s: &str) -> Result<Mat> {
        let entries: Vec<Integer> = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<Integer>()
                    .map_err(|_| Error::InvalidArgument(format!("bad matrix entry {t:?}")))
            })
            .collect::<Result<_>>()?;
        let n = match entries.len() {
            4 => 2,
            9 => 3,
            k => return Err(Error::InvalidArgument(format!("expected 4 or 9 entries, got {k}"))),
        };
        Mat::new(n, entries)
    }

    /// Row-major decimal strings, the wire format for witnesses.
    pub fn to_strings(&self) -> Vec<String> {
        self.entries.iter().map(|v| v.to_string()).collect()
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// `a · b`, re-sign-normalized.
pub fn mat_mul(a: &Mat, b: &Mat) -> Result<Mat> {
    a.mul(b)
}

pub fn mat_pow(g: &Mat, j: u64) -> Mat {
    g.pow(j)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(a: i64, b: i64, c: i64, d: i64) -> Mat {
        Mat::sl2(a, b, c, d).unwrap()
    }

    #[test]
    fn products() {
        let i = Mat::identity(2);
        assert_eq!(mat_mul(&i, &i).unwrap(), i);
        assert_eq!(mat_mul(&m(2, 1, 1, 1), &m(2, 1, 1, 1)).unwrap(), m(5, 3, 3, 2));
        assert_eq!(mat_mul(&m(2, 1, 1, 1), &m(1, -1, -1, 2)).unwrap(), i);
        let three = Mat::identity(3);
        assert_eq!(mat_mul(&i, &three), Err(Error::DimensionMismatch(2, 3)));
    }

    #[test]
    fn powers() {
        let g = m(2, 1, 1, 1);
        assert_eq!(mat_pow(&g, 3), m(13, 8, 8, 5));
        assert_eq!(mat_pow(&g, 6), m(233, 144, 144, 89));
        assert!(mat_pow(&g, 0).is_identity());
        assert!(mat_pow(&m(0, -1, 1, 0), 0).is_identity());
    }

    #[test]
    fn sign_normalization() {
        assert_eq!(m(-2, -1, -1, -1), m(2, 1, 1, 1));
        let s = m(0, -1, 1, 0);
        assert_eq!(s.entries()[1], 1);
        // S^2 = -I is projectively trivial
        assert!(mat_pow(&s, 2).is_identity());
        assert!(Mat::sl2(2, 0, 0, 1).is_err());
    }

    #[test]
    fn inverse_and_conjugation() {
        let g = m(2, 1, 1, 1);
        assert!(g.mul(&g.inverse()).unwrap().is_identity());
        let c = Mat::from_i64(3, &[0, 0, 1, -1, 0, -2, 0, -1, -1]).unwrap();
        assert!(c.mul(&c.inverse()).unwrap().is_identity());
        let theta = mat_pow(&g, 6).conjugate_by_diag(&Integer::from(6)).unwrap();
        assert_eq!(theta, m(233, 24, 864, 89));
        assert!(mat_pow(&g, 6).conjugate_by_diag(&Integer::from(7)).is_err());
    }

    #[test]
    fn parsing() {
        assert_eq!(Mat::parse("2,1,1,1").unwrap(), m(2, 1, 1, 1));
        assert!(Mat::parse("2,1,1").is_err());
        assert!(Mat::parse("2,1,x,1").is_err());
    }
}
