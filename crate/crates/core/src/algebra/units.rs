//! Fundamental units of real quadratic fields and their matrix embedding.

use std::cmp::Ordering;

use rug::Integer;

use super::arith::is_squarefree;
use super::mat::Mat;
use super::quad::{QuadInt, QuadUnit};
use crate::error::{Error, Result};

fn check_d(d: i64) -> Result<()> {
    if d <= 1 {
        return Err(Error::InvalidArgument(format!("d = {d} must exceed 1")));
    }
    if !is_squarefree(d as u64) {
        return Err(Error::NotSquarefree(d.to_string()));
    }
    Ok(())
}

/// `t` and `n` with `ω² = tω − n` for the integral basis `{1, ω}`.
pub fn basis_minpoly(d: i64) -> (i64, i64) {
    if d.rem_euclid(4) == 1 {
        (1, (1 - d) / 4)
    } else {
        (0, -d)
    }
}

/// Fundamental unit `> 1` of the ring of integers of Q(√d).
///
/// Runs the PQa continued-fraction expansion of `(P0 + √d)/Q0` with
/// `(P0, Q0) = (1, 2)` when `d ≡ 1 mod 4` and `(0, 1)` otherwise; the first
/// return of `Q` to `Q0` yields `(G + B√d)/Q0` of norm ±1.
pub fn fundamental_unit(d: i64) -> Result<QuadUnit> {
    check_d(d)?;
    let (p0, q0): (i128, i128) = if d.rem_euclid(4) == 1 { (1, 2) } else { (0, 1) };
    let dd = d as i128;
    let s = (d as u64).isqrt() as i128;
    let (mut p, mut q) = (p0, q0);
    let (mut g2, mut g1) = (Integer::from(-p0), Integer::from(q0));
    let (mut b2, mut b1) = (Integer::from(1), Integer::new());
    loop {
        let a = (p + s) / q;
        let g = Integer::from(&g1 * a) + &g2;
        let b = Integer::from(&b1 * a) + &b2;
        p = a * q - p;
        q = (dd - p * p) / q;
        g2 = std::mem::replace(&mut g1, g);
        b2 = std::mem::replace(&mut b1, b);
        if q == q0 {
            break;
        }
    }
    let value = if q0 == 2 {
        QuadInt::from_doubled(d, g1, b1)?
    } else {
        QuadInt::new(d, g1, b1)?
    };
    let unit = QuadUnit::new(value)?;
    debug_assert_eq!(unit.value().cmp_real(&QuadInt::one(d)), Ordering::Greater);
    Ok(unit)
}

/// Generator `> 1` of the norm-one units: the fundamental unit or its square.
pub fn norm_one_fundamental_unit(d: i64) -> Result<QuadUnit> {
    let u = fundamental_unit(d)?;
    Ok(if u.is_norm_one() { u } else { u.pow(2) })
}

/// Matrix of multiplication by `μ = u + vω` in the basis `{1, ω}`:
/// `[[u, −n·v], [v, u + t·v]]`.
pub fn unit_matrix(mu: &QuadInt) -> Mat {
    let (t, n) = basis_minpoly(mu.d());
    let (u, v) = mu.basis_coords();
    let entries = vec![
        u.clone(),
        Integer::from(&v * -n),
        v.clone(),
        u + Integer::from(&v * t),
    ];
    Mat::from_parts_unchecked(2, entries)
}

/// The norm-one fundamental unit of Q(√d) as an element of SL(2, Z).
pub fn embed_unit_as_matrix(d: i64) -> Result<Mat> {
    let mu = norm_one_fundamental_unit(d)?;
    Ok(unit_matrix(mu.value()))
}

/// Returns `(t, sign)` with `λ = sign·μ^t` or `λ⁻¹ = sign·μ^t`.
pub fn unit_exponent(lambda: &QuadUnit, d: i64) -> Result<(u64, i8)> {
    if lambda.value().d() != d {
        return Err(Error::InvalidArgument(format!(
            "unit lives in Q(√{}), not Q(√{d})",
            lambda.value().d()
        )));
    }
    if !lambda.is_norm_one() {
        return Err(Error::InvalidArgument(format!("{lambda} has norm -1")));
    }
    let mu = norm_one_fundamental_unit(d)?;
    let mut x = lambda.value().clone();
    let sign = if x.signum_real() == Ordering::Less {
        x = x.neg();
        -1
    } else {
        1
    };
    let one = QuadInt::one(d);
    match x.cmp_real(&one) {
        Ordering::Equal => return Err(Error::Torsion),
        Ordering::Less => x = x.unit_inverse()?,
        Ordering::Greater => {}
    }
    let mut power = mu.value().clone();
    let mut t = 1u64;
    loop {
        match power.cmp_real(&x) {
            Ordering::Equal => return Ok((t, sign)),
            Ordering::Greater => {
                return Err(Error::InvalidArgument(format!("{lambda} is not a power of {mu}")))
            }
            Ordering::Less => {
                power = power.mul(mu.value())?;
                t += 1;
            }
        }
    }
}
