//! Arithmetic progressions of primitive lengths and their certificates.
//!
//! For an absolutely primitive `γ` and `C = lcm{P(γ, p) : p ≤ k}`, each
//! multiple `C·r` is realized as `P(γ, m_r)` for a suitable modulus, and
//! `θ_r = η γ^{C r} η⁻¹` with `η = diag(1, m_r)` is a primitive integral
//! matrix of length `C·r·ℓ(γ)`.

use rayon::prelude::*;
use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::algebra::arith::{lcm, primes_up_to};
use crate::algebra::units::{embed_unit_as_matrix, unit_exponent};
use crate::algebra::{Mat, QuadInt};
use crate::error::{Error, Result};
use crate::geodesics::{
    analyze, eigenvalue, format_sig, primitivity_certificate, GeodesicClass, OUTPUT_DIGITS,
};
use crate::orders::{find_modulus_with_p, order_p, ModulusSearch};

pub const WITNESS_VERSION: u32 = 1;

/// Decimal-string (de)serialization for big integers.
pub mod bigstr {
    use rug::Integer;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(x: &Integer, s: S) -> Result<S::Ok, S::Error> {
        x.to_string().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Integer, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(x: &[Integer], s: S) -> Result<S::Ok, S::Error> {
            x.iter().map(|v| v.to_string()).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Integer>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|s| s.parse().map_err(serde::de::Error::custom))
                .collect()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApItem {
    pub r: u64,
    #[serde(with = "bigstr")]
    pub modulus: Integer,
    pub exponent: u64,
    #[serde(with = "bigstr::vec")]
    pub theta: Vec<Integer>,
    #[serde(with = "bigstr")]
    pub trace: Integer,
    pub length_multiplier: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApFailure {
    pub r: u64,
    pub reason: String,
}

/// A certificate for a progression `{C·r·ℓ(γ)}` of primitive lengths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApWitness {
    pub v: u32,
    #[serde(with = "bigstr::vec")]
    pub gamma: Vec<Integer>,
    #[serde(with = "bigstr")]
    pub trace: Integer,
    pub d: i64,
    pub k: u64,
    #[serde(rename = "C")]
    pub c: u64,
    /// `C` is the lcm of `P(γ, p)` over primes `p` up to this bound.
    pub prime_bound: u64,
    pub base_length: String,
    pub items: Vec<ApItem>,
    pub failures: Vec<ApFailure>,
    pub verified: bool,
}

impl ApWitness {
    pub fn is_complete(&self) -> bool {
        self.failures.is_empty() && self.items.len() as u64 == self.k
    }

    pub fn multipliers(&self) -> Vec<u64> {
        self.items.iter().map(|i| i.length_multiplier).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn require_primitive(gamma: &Mat) -> Result<GeodesicClass> {
    let class = analyze(gamma)?;
    if class.unit_exp != 1 {
        return Err(Error::NotAbsolutelyPrimitive(class.unit_exp));
    }
    Ok(class)
}

fn lcm_orders(gamma: &Mat, prime_bound: u64) -> Result<u64> {
    primes_up_to(prime_bound).into_iter().try_fold(1u64, |acc, p| {
        lcm(acc, order_p(gamma, p)?).ok_or_else(|| Error::CapExceeded("lcm overflow".into()))
    })
}

/// `C_{γ,k} = lcm{P(γ, p) : p ≤ k prime}`.
pub fn constant_c(gamma: &Mat, k: u64) -> Result<u64> {
    require_primitive(gamma)?;
    lcm_orders(gamma, k)
}

fn build_item(gamma: &Mat, c: u64, r: u64, budget: u32, prime_floor: u64) -> Result<std::result::Result<ApItem, ApFailure>> {
    let j = c
        .checked_mul(r)
        .ok_or_else(|| Error::CapExceeded(format!("exponent {c}*{r}")))?;
    let m = match find_modulus_with_p(gamma, j, budget, prime_floor)? {
        ModulusSearch::Found(m) => Integer::from(m),
        ModulusSearch::NotFound(progress) => {
            let deepest: Vec<String> = progress
                .iter()
                .filter(|p| !p.levels.is_empty())
                .map(|p| format!("{}^{}", p.p, p.levels.len()))
                .collect();
            return Ok(Err(ApFailure {
                r,
                reason: format!("no modulus with P = {j}; tower levels reached: {}", deepest.join(" ")),
            }));
        }
    };
    let theta = gamma.pow(j).conjugate_by_diag(&m)?;
    if !primitivity_certificate(gamma, &m, j)? {
        return Err(Error::Certificate(format!("exponent {j} is not minimal for modulus {m}")));
    }
    Ok(Ok(ApItem {
        r,
        modulus: m,
        exponent: j,
        trace: theta.trace(),
        theta: theta.entries().to_vec(),
        length_multiplier: j,
    }))
}

fn assemble(gamma: &Mat, class: &GeodesicClass, k: u64, c: u64, prime_bound: u64, rs: &[u64], budget: u32) -> Result<ApWitness> {
    let built: Vec<_> = rs
        .par_iter()
        .map(|&r| build_item(gamma, c, r, budget, prime_bound))
        .collect::<Result<_>>()?;
    let mut items = Vec::new();
    let mut failures = Vec::new();
    for b in built {
        match b {
            Ok(item) => items.push(item),
            Err(f) => failures.push(f),
        }
    }
    let mut w = ApWitness {
        v: WITNESS_VERSION,
        gamma: gamma.entries().to_vec(),
        trace: class.trace.clone(),
        d: class.d,
        k,
        c,
        prime_bound,
        base_length: format_sig(&class.length, OUTPUT_DIGITS),
        items,
        failures,
        verified: false,
    };
    let report = verify_witness(&w);
    if w.failures.is_empty() && !report.ok {
        return Err(Error::Certificate(report.reasons.join("; ")));
    }
    w.verified = report.ok;
    Ok(w)
}

/// Builds the `k`-term progression `{C·r·ℓ(γ)}_{r=1..k}`.
///
/// When no modulus is found for some `r` within `budget` tower levels, the
/// remaining items are still returned and the gap is listed in `failures`.
pub fn build_ap_witness(gamma: &Mat, k: u64, budget: u32) -> Result<ApWitness> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k = {k} < 2")));
    }
    let class = require_primitive(gamma)?;
    let c = lcm_orders(gamma, k)?;
    let rs: Vec<u64> = (1..=k).collect();
    assemble(gamma, &class, k, c, k, &rs, budget)
}

/// The absolutely primitive element over the field of a trace, with `λ_m = μ^D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitiveCompanion {
    pub trace: Integer,
    pub companion: Mat,
    pub d: i64,
    pub exponent: u64,
}

pub fn primitive_companion(trace: &Integer) -> Result<PrimitiveCompanion> {
    let (d, lambda) = eigenvalue(trace)?;
    let (exponent, _) = unit_exponent(&lambda, d)?;
    let companion = embed_unit_as_matrix(d)?;
    debug_assert_eq!(companion.pow(exponent).trace(), trace.clone().abs());
    Ok(PrimitiveCompanion { trace: trace.clone().abs(), companion, d, exponent })
}

/// A progression `{C'·n·ℓ_m}` inside the primitive spectrum, certified over
/// the companion of `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccursRecord {
    #[serde(with = "bigstr")]
    pub trace: Integer,
    pub d: i64,
    #[serde(rename = "D")]
    pub exponent: u64,
    /// `C'` with multipliers `C'·n` relative to `ℓ_m`.
    pub c_prime: u64,
    pub multipliers: Vec<u64>,
    pub witness: ApWitness,
}

/// Runs the construction for the companion over `r ∈ {D, 2D, …, kD}`, so
/// every companion multiplier is divisible by `D` and the lengths are
/// integral multiples of `ℓ_m`.
pub fn occurs_in_ap(trace: &Integer, k: u64, budget: u32) -> Result<OccursRecord> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k = {k} < 2")));
    }
    let pc = primitive_companion(trace)?;
    let gamma = &pc.companion;
    let class = require_primitive(gamma)?;
    let bound = k
        .checked_mul(pc.exponent)
        .ok_or_else(|| Error::CapExceeded("k*D overflow".into()))?;
    let c = lcm_orders(gamma, bound)?;
    let rs: Vec<u64> = (1..=k).map(|n| n * pc.exponent).collect();
    let witness = assemble(gamma, &class, k, c, bound, &rs, budget)?;
    let mut multipliers = Vec::new();
    for item in &witness.items {
        if item.length_multiplier % pc.exponent != 0 {
            return Err(Error::Certificate(format!(
                "multiplier {} not divisible by D = {}",
                item.length_multiplier, pc.exponent
            )));
        }
        multipliers.push(item.length_multiplier / pc.exponent);
    }
    Ok(OccursRecord {
        trace: pc.trace,
        d: pc.d,
        exponent: pc.exponent,
        c_prime: c,
        multipliers,
        witness,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub ok: bool,
    pub reasons: Vec<String>,
}

/// Re-derives every claim of a witness from its serialized content.
pub fn verify_witness(w: &ApWitness) -> Verification {
    let mut reasons = Vec::new();
    if let Err(e) = verify_into(w, &mut reasons) {
        reasons.push(e.to_string());
    }
    Verification { ok: reasons.is_empty(), reasons }
}

fn verify_into(w: &ApWitness, reasons: &mut Vec<String>) -> Result<()> {
    if w.v != WITNESS_VERSION {
        reasons.push(format!("unknown version {}", w.v));
    }
    let gamma = Mat::new(2, w.gamma.clone())?;
    let class = analyze(&gamma)?;
    if class.unit_exp != 1 {
        reasons.push(format!("gamma is not absolutely primitive (exponent {})", class.unit_exp));
        return Ok(());
    }
    if class.trace != w.trace {
        reasons.push(format!("gamma trace {} != recorded {}", class.trace, w.trace));
    }
    if class.d != w.d {
        reasons.push(format!("field d = {} != recorded {}", class.d, w.d));
    }
    let c = lcm_orders(&gamma, w.prime_bound)?;
    if c != w.c {
        reasons.push(format!("C = {c} != recorded {}", w.c));
    }
    for f in &w.failures {
        reasons.push(format!("incomplete: r = {}: {}", f.r, f.reason));
    }
    if w.items.len() as u64 != w.k {
        reasons.push(format!("{} items for k = {}", w.items.len(), w.k));
    }
    let lambda = class.lambda.value().clone();
    for item in &w.items {
        verify_item(&gamma, &lambda, w.c, item, reasons)?;
    }
    let rs: Vec<u64> = w.items.iter().map(|i| i.r).collect();
    if rs.len() >= 2 {
        let step = rs[1].checked_sub(rs[0]).unwrap_or(0);
        if step == 0 || rs.windows(2).any(|p| p[1] != p[0] + step) {
            reasons.push(format!("indices {rs:?} do not form a progression"));
        }
        let mults = w.multipliers();
        let diff = mults[1].wrapping_sub(mults[0]);
        if mults.windows(2).any(|p| p[1].wrapping_sub(p[0]) != diff) || mults[1] <= mults[0] {
            reasons.push(format!("multipliers {mults:?} are not an increasing progression"));
        }
    }
    Ok(())
}

fn verify_item(gamma: &Mat, lambda: &QuadInt, c: u64, item: &ApItem, reasons: &mut Vec<String>) -> Result<()> {
    let r = item.r;
    if Some(item.exponent) != c.checked_mul(r) {
        reasons.push(format!("r = {r}: exponent {} != C*r", item.exponent));
    }
    if item.length_multiplier != item.exponent {
        reasons.push(format!("r = {r}: multiplier {} != exponent", item.length_multiplier));
    }
    if item.theta.len() != 4 {
        reasons.push(format!("r = {r}: theta has {} entries", item.theta.len()));
        return Ok(());
    }
    let t = &item.theta;
    let det = Integer::from(&t[0] * &t[3]) - Integer::from(&t[1] * &t[2]);
    if det != 1 {
        reasons.push(format!("r = {r}: det theta = {det}"));
    }
    if item.modulus < 1 {
        reasons.push(format!("r = {r}: modulus {}", item.modulus));
        return Ok(());
    }
    let power = gamma.pow(item.exponent);
    let expected = power.conjugate_by_diag(&item.modulus);
    match expected {
        Ok(e) if e.entries() == item.theta.as_slice() => {}
        Ok(_) => reasons.push(format!("r = {r}: theta is not the conjugate of gamma^{}", item.exponent)),
        Err(e) => reasons.push(format!("r = {r}: {e}")),
    }
    let tr_theta = Integer::from(&t[0] + &t[3]);
    let tr_lambda = lambda.pow(item.exponent).trace().clone();
    if tr_theta != item.trace || tr_lambda != item.trace {
        reasons.push(format!(
            "r = {r}: trace mismatch (recorded {}, theta {}, unit {})",
            item.trace, tr_theta, tr_lambda
        ));
    }
    match primitivity_certificate(gamma, &item.modulus, item.exponent) {
        Ok(true) => {}
        Ok(false) => reasons.push(format!("r = {r}: exponent {} is not minimal", item.exponent)),
        Err(e) => reasons.push(format!("r = {r}: certificate: {e}")),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orders::DEFAULT_BUDGET;

    fn fib() -> Mat {
        Mat::sl2(2, 1, 1, 1).unwrap()
    }

    #[test]
    fn constants() {
        assert_eq!(constant_c(&fib(), 4).unwrap(), 6);
        assert_eq!(constant_c(&fib(), 1).unwrap(), 1);
        assert_eq!(constant_c(&fib(), 5).unwrap(), 30);
        assert!(constant_c(&Mat::sl2(5, 3, 3, 2).unwrap(), 3).is_err());
    }

    #[test]
    fn two_term_witness() {
        let w = build_ap_witness(&fib(), 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(w.c, 3);
        assert!(w.verified);
        let strs = |v: &[Integer]| v.iter().map(|x| x.to_i64().unwrap()).collect::<Vec<_>>();
        assert_eq!(w.items[0].modulus, 2);
        assert_eq!(strs(&w.items[0].theta), vec![13, 4, 16, 5]);
        assert_eq!(w.items[0].trace, 18);
        assert_eq!(w.items[1].modulus, 6);
        assert_eq!(strs(&w.items[1].theta), vec![233, 24, 864, 89]);
        assert_eq!(w.items[1].trace, 322);
    }

    #[test]
    fn three_term_witness() {
        let w = build_ap_witness(&fib(), 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(w.c, 6);
        assert_eq!(w.multipliers(), vec![6, 12, 18]);
        assert_eq!(w.items[1].modulus, 32);
        assert!(verify_witness(&w).ok);
        let starved = build_ap_witness(&fib(), 3, 1).unwrap();
        assert!(!starved.is_complete());
        assert!(!starved.verified);
        assert_eq!(starved.failures[0].r, 2);
    }

    #[test]
    fn tampering_detected() {
        let w = build_ap_witness(&fib(), 3, DEFAULT_BUDGET).unwrap();
        let mut bad = w.clone();
        bad.items[0].trace += 1;
        let v = verify_witness(&bad);
        assert!(!v.ok);
        assert!(v.reasons.iter().any(|r| r.contains("trace mismatch")));
        let back = ApWitness::from_json(&w.to_json().unwrap()).unwrap();
        assert_eq!(back, w);
        assert!(verify_witness(&back).ok);
    }

    #[test]
    fn companions() {
        let c = primitive_companion(&Integer::from(7)).unwrap();
        assert_eq!((c.companion.trace(), c.d, c.exponent), (Integer::from(3), 5, 2));
        let c = primitive_companion(&Integer::from(6)).unwrap();
        assert_eq!((c.companion.trace(), c.exponent), (Integer::from(6), 1));
        let c = primitive_companion(&Integer::from(3)).unwrap();
        assert_eq!(c.exponent, 1);
    }

    #[test]
    fn occurrences() {
        let o = occurs_in_ap(&Integer::from(7), 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(o.exponent, 2);
        assert!(o.witness.verified);
        let m = &o.multipliers;
        assert_eq!(m[1] - m[0], m[2] - m[1]);
        assert!(o.witness.multipliers().iter().all(|x| x % 2 == 0));
        let o = occurs_in_ap(&Integer::from(6), 4, DEFAULT_BUDGET).unwrap();
        assert_eq!(o.c_prime, constant_c(&Mat::sl2(3, 4, 2, 3).unwrap(), 4).unwrap());
    }
}
