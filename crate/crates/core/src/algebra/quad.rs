//! Integers of a quadratic field Q(√d), stored with a common denominator 2.

use std::cmp::Ordering;
use std::fmt;

use rug::{Float, Integer};

use crate::error::{Error, Result};

/// `(x2 + y2·√d) / 2`, an element of the ring of integers of Q(√d).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadInt {
    d: i64,
    x2: Integer,
    y2: Integer,
}

fn check_integral(d: i64, x2: &Integer, y2: &Integer) -> bool {
    if d.rem_euclid(4) == 1 {
        x2.is_even() == y2.is_even()
    } else {
        x2.is_even() && y2.is_even()
    }
}

impl QuadInt {
    /// Builds from doubled coordinates, rejecting non-integral elements.
    pub fn from_doubled(d: i64, x2: Integer, y2: Integer) -> Result<Self> {
        if d == 0 || d == 1 {
            return Err(Error::InvalidArgument(format!("d = {d} does not define a quadratic field")));
        }
        if !check_integral(d, &x2, &y2) {
            return Err(Error::NotIntegral(format!("({x2} + {y2}√{d})/2")));
        }
        Ok(QuadInt { d, x2, y2 })
    }

    /// `x + y√d` with integer coordinates.
    pub fn new(d: i64, x: impl Into<Integer>, y: impl Into<Integer>) -> Result<Self> {
        QuadInt::from_doubled(d, x.into() * 2u32, y.into() * 2u32)
    }

    pub fn from_int(d: i64, x: impl Into<Integer>) -> Self {
        QuadInt { d, x2: x.into() * 2u32, y2: Integer::new() }
    }

    /// `u + v·ω` in the integral basis `{1, ω}`.
    pub fn from_basis(d: i64, u: &Integer, v: &Integer) -> Self {
        if d.rem_euclid(4) == 1 {
            QuadInt { d, x2: Integer::from(u * 2u32) + v, y2: v.clone() }
        } else {
            QuadInt { d, x2: Integer::from(u * 2u32), y2: Integer::from(v * 2u32) }
        }
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn x2(&self) -> &Integer {
        &self.x2
    }

    pub fn y2(&self) -> &Integer {
        &self.y2
    }

    /// Coordinates `(u, v)` in the integral basis `{1, ω}`.
    pub fn basis_coords(&self) -> (Integer, Integer) {
        if self.d.rem_euclid(4) == 1 {
            (Integer::from(&self.x2 - &self.y2) / 2u32, self.y2.clone())
        } else {
            (Integer::from(&self.x2 / 2u32), Integer::from(&self.y2 / 2u32))
        }
    }

    /// Field trace `λ + λ'`.
    pub fn trace(&self) -> &Integer {
        &self.x2
    }

    /// `(x2² − d·y2²) / 4`, always an integer for integral elements.
    pub fn norm(&self) -> Integer {
        let n = Integer::from(self.x2.square_ref()) - Integer::from(self.y2.square_ref()) * self.d;
        n / 4u32
    }

    pub fn conj(&self) -> QuadInt {
        QuadInt { d: self.d, x2: self.x2.clone(), y2: Integer::from(-&self.y2) }
    }

    pub fn neg(&self) -> QuadInt {
        QuadInt { d: self.d, x2: Integer::from(-&self.x2), y2: Integer::from(-&self.y2) }
    }

    pub fn is_one(&self) -> bool {
        self.x2 == 2 && self.y2 == 0
    }

    pub fn one(d: i64) -> QuadInt {
        QuadInt::from_int(d, 1)
    }

    fn same_field(&self, other: &QuadInt) -> Result<()> {
        if self.d != other.d {
            return Err(Error::InvalidArgument(format!("fields differ: d = {} vs {}", self.d, other.d)));
        }
        Ok(())
    }

    pub fn mul(&self, other: &QuadInt) -> Result<QuadInt> {
        self.same_field(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &QuadInt) -> QuadInt {
        // (a + b√d)(c + e√d)/4 = (ac + d·be + (ae + bc)√d)/4
        let x = Integer::from(&self.x2 * &other.x2) + Integer::from(&self.y2 * &other.y2) * self.d;
        let y = Integer::from(&self.x2 * &other.y2) + Integer::from(&self.y2 * &other.x2);
        QuadInt { d: self.d, x2: x / 2u32, y2: y / 2u32 }
    }

    pub fn add(&self, other: &QuadInt) -> Result<QuadInt> {
        self.same_field(other)?;
        Ok(QuadInt {
            d: self.d,
            x2: Integer::from(&self.x2 + &other.x2),
            y2: Integer::from(&self.y2 + &other.y2),
        })
    }

    pub fn sub(&self, other: &QuadInt) -> Result<QuadInt> {
        self.add(&other.neg())
    }

    pub fn pow(&self, mut e: u64) -> QuadInt {
        let mut acc = QuadInt::one(self.d);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// Inverse of a unit: `λ⁻¹ = N(λ)·λ'`.
    pub fn unit_inverse(&self) -> Result<QuadInt> {
        let n = self.norm();
        if n == 1 {
            Ok(self.conj())
        } else if n == -1 {
            Ok(self.conj().neg())
        } else {
            Err(Error::InvalidArgument(format!("{self} is not a unit")))
        }
    }

    /// Whether `α` divides this element in the ring of integers.
    pub fn is_divisible_by(&self, alpha: &Integer) -> bool {
        let (u, v) = self.basis_coords();
        u.is_divisible(alpha) && v.is_divisible(alpha)
    }

    /// Sign of the real embedding with `√d > 0` (real fields only).
    pub fn signum_real(&self) -> Ordering {
        debug_assert!(self.d > 1);
        sign_of_sum(&self.x2, &self.y2, self.d)
    }

    /// Compares the real embeddings of two elements of the same real field.
    pub fn cmp_real(&self, other: &QuadInt) -> Ordering {
        let dx = Integer::from(&self.x2 - &other.x2);
        let dy = Integer::from(&self.y2 - &other.y2);
        sign_of_sum(&dx, &dy, self.d)
    }

    /// Value under the real embedding at the given precision in bits.
    pub fn to_float(&self, prec: u32) -> Float {
        let root = Float::with_val(prec, self.d).sqrt();
        (Float::with_val(prec, &self.x2) + root * &self.y2) / 2u32
    }
}

/// Sign of `a + b·√d` for `d > 1` squarefree, in exact arithmetic.
fn sign_of_sum(a: &Integer, b: &Integer, d: i64) -> Ordering {
    let sa = a.cmp0();
    let sb = b.cmp0();
    if sa == sb || sb == Ordering::Equal {
        return sa;
    }
    if sa == Ordering::Equal {
        return sb;
    }
    let a2 = Integer::from(a.square_ref());
    let b2d = Integer::from(b.square_ref()) * d;
    // opposite signs: the term with the larger square wins
    match a2.cmp(&b2d) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => Ordering::Equal,
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.x2.is_even() && self.y2.is_even() {
            let x = Integer::from(&self.x2 / 2u32);
            let y = Integer::from(&self.y2 / 2u32);
            if y.cmp0() == Ordering::Less {
                write!(f, "{x} - {}√{}", Integer::from(-y), self.d)
            } else {
                write!(f, "{x} + {y}√{}", self.d)
            }
        } else if self.y2.cmp0() == Ordering::Less {
            write!(f, "({} - {}√{})/2", self.x2, Integer::from(-&self.y2), self.d)
        } else {
            write!(f, "({} + {}√{})/2", self.x2, self.y2, self.d)
        }
    }
}

/// A unit of a real quadratic ring of integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadUnit {
    value: QuadInt,
    is_norm_one: bool,
}

impl QuadUnit {
    pub fn new(value: QuadInt) -> Result<Self> {
        let n = value.norm();
        if n != 1 && n != -1 {
            return Err(Error::InvalidArgument(format!("{value} has norm {n}, not ±1")));
        }
        Ok(QuadUnit { is_norm_one: n == 1, value })
    }

    pub fn value(&self) -> &QuadInt {
        &self.value
    }

    pub fn is_norm_one(&self) -> bool {
        self.is_norm_one
    }

    pub fn norm(&self) -> i32 {
        if self.is_norm_one {
            1
        } else {
            -1
        }
    }

    pub fn pow(&self, e: u64) -> QuadUnit {
        QuadUnit {
            value: self.value.pow(e),
            is_norm_one: self.is_norm_one || e % 2 == 0,
        }
    }
}

impl fmt::Display for QuadUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}
