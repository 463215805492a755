//! Traces, lengths and primitivity on the modular surface.

use std::io::Write;

use rayon::prelude::*;
use rug::{Float, Integer};
use serde::Serialize;

use crate::algebra::arith::squarefree_decompose;
use crate::algebra::{mat_pow_mod, Mat, QuadInt, QuadUnit};
use crate::algebra::units::unit_exponent;
use crate::error::{Error, Result};

/// Working precision for lengths, in bits (about 38 decimal digits).
pub const PRECISION_BITS: u32 = 128;

/// Significant digits printed for lengths.
pub const OUTPUT_DIGITS: usize = 25;

/// Bits needed to carry `digits` significant decimal digits plus guard bits.
pub fn bits_for_digits(digits: usize) -> u32 {
    ((digits as f64) * std::f64::consts::LOG2_10).ceil() as u32 + 16
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

pub fn classify(g: &Mat) -> Result<Kind> {
    if g.dim() != 2 {
        return Err(Error::DimensionMismatch(g.dim(), 2));
    }
    let t = g.trace().abs();
    Ok(match t.cmp(&Integer::from(2)) {
        std::cmp::Ordering::Less => Kind::Elliptic,
        std::cmp::Ordering::Equal => Kind::Parabolic,
        std::cmp::Ordering::Greater => Kind::Hyperbolic,
    })
}

/// `2·arccosh(m/2)` at the given precision.
pub fn trace_to_length_prec(m: &Integer, prec: u32) -> Result<Float> {
    if *m < 3 {
        return Err(Error::NotHyperbolic(m.to_string()));
    }
    let half = Float::with_val(prec, m) / 2u32;
    Ok(half.acosh() * 2u32)
}

pub fn trace_to_length(m: &Integer) -> Result<Float> {
    trace_to_length_prec(m, PRECISION_BITS)
}

/// Formats a positive float in plain decimal with `digits` significant digits.
pub fn format_sig(x: &Float, digits: usize) -> String {
    let (neg, mantissa, exp) = x.to_sign_string_exp(10, Some(digits));
    let sign = if neg { "-" } else { "" };
    let Some(exp) = exp else {
        return format!("{sign}{mantissa}");
    };
    let mantissa = mantissa.trim_start_matches('0');
    if exp <= 0 {
        format!("{sign}0.{}{}", "0".repeat((-exp) as usize), mantissa)
    } else if exp as usize >= mantissa.len() {
        format!("{sign}{}{}", mantissa, "0".repeat(exp as usize - mantissa.len()))
    } else {
        let (int, frac) = mantissa.split_at(exp as usize);
        format!("{sign}{int}.{frac}")
    }
}

/// A hyperbolic conjugacy class with its exact and real invariants.
#[derive(Clone, Debug)]
pub struct GeodesicClass {
    pub gamma: Mat,
    pub trace: Integer,
    pub d: i64,
    pub lambda: QuadUnit,
    pub unit_exp: u64,
    pub length: Float,
}

/// Eigenvalue `(|Tr| + f√d)/2 > 1` and the squarefree `d` with `Tr² − 4 = f²d`.
pub fn eigenvalue(trace: &Integer) -> Result<(i64, QuadUnit)> {
    let t = trace.clone().abs();
    if t <= 2 {
        return Err(Error::NotHyperbolic(t.to_string()));
    }
    let disc = Integer::from(t.square_ref()) - 4u32;
    let (d, f) = squarefree_decompose(&disc)?;
    assert!(d != 1, "Tr^2 - 4 is never a square for |Tr| >= 3");
    let d = d
        .to_i64()
        .ok_or_else(|| Error::FactorLimit(format!("squarefree part {d} exceeds 64 bits")))?;
    let lambda = QuadUnit::new(QuadInt::from_doubled(d, t, f)?)?;
    Ok((d, lambda))
}

pub fn analyze(g: &Mat) -> Result<GeodesicClass> {
    if classify(g)? != Kind::Hyperbolic {
        return Err(Error::NotHyperbolic(g.trace().abs().to_string()));
    }
    let trace = g.trace().abs();
    let (d, lambda) = eigenvalue(&trace)?;
    let (unit_exp, _) = unit_exponent(&lambda, d)?;
    let length = trace_to_length(&trace)?;
    Ok(GeodesicClass { gamma: g.clone(), trace, d, lambda, unit_exp, length })
}

pub fn is_absolutely_primitive(g: &Mat) -> Result<bool> {
    Ok(analyze(g)?.unit_exp == 1)
}

/// Whether `m | b_j` for `γ^j = [[a_j, b_j], [c_j, d_j]]`.
pub fn divides_b(gamma: &Mat, j: u64, m: &Integer) -> Result<bool> {
    if *m == 1 {
        return Ok(true);
    }
    match m.to_u64() {
        Some(mm) => Ok(mat_pow_mod(gamma, &Integer::from(j), mm)?.get(0, 1) == 0),
        None => Ok(gamma.pow(j).b().is_divisible(m)),
    }
}

/// Checks that `j` is the least exponent with `m | b_j`: for every prime
/// `q | j`, `m ∤ b_{j/q}`. Errors if `m ∤ b_j` or `γ` is not absolutely primitive.
pub fn primitivity_certificate(gamma: &Mat, m: &Integer, j: u64) -> Result<bool> {
    if j == 0 || *m < 1 {
        return Err(Error::InvalidArgument(format!("need j >= 1 and m >= 1, got j = {j}, m = {m}")));
    }
    if !is_absolutely_primitive(gamma)? {
        return Err(Error::NotAbsolutelyPrimitive(analyze(gamma)?.unit_exp));
    }
    if !divides_b(gamma, j, m)? {
        return Err(Error::NotIntegral(format!("{m} does not divide b_{j}")));
    }
    for (q, _) in crate::algebra::arith::factor(j) {
        if divides_b(gamma, j / q, m)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Distinct lengths `2·arccosh(m/2)` for traces `3 ≤ m ≤ max_trace`.
#[derive(Clone, Debug)]
pub struct LengthSet {
    pub max_trace: u64,
    pub entries: Vec<(u64, Float)>,
}

pub fn enumerate_length_set(max_trace: u64) -> Result<LengthSet> {
    enumerate_length_set_prec(max_trace, PRECISION_BITS)
}

pub fn enumerate_length_set_prec(max_trace: u64, prec: u32) -> Result<LengthSet> {
    if max_trace < 3 {
        return Err(Error::InvalidArgument(format!("max trace {max_trace} < 3")));
    }
    let entries = (3..=max_trace)
        .into_par_iter()
        .map(|m| (m, trace_to_length_prec(&Integer::from(m), prec).expect("m >= 3")))
        .collect();
    Ok(LengthSet { max_trace, entries })
}

impl LengthSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        self.write_csv_digits(out, OUTPUT_DIGITS)
    }

    pub fn write_csv_digits<W: Write>(&self, out: W, digits: usize) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["trace", "length"])?;
        for (m, len) in &self.entries {
            w.write_record([m.to_string(), format_sig(len, digits)])?;
        }
        w.flush()?;
        Ok(())
    }
}
