//! The order function `P(γ, m) = min{j ≥ 1 : m | b_j}` and its prime-power towers.
//!
//! For fixed `γ` the admissible exponents `{j : m | b_j}` are the preimage of
//! the lower-triangular subgroup of SL(2, Z/m), hence a subgroup `P·Z`. Every
//! computation here descends from a known multiple (a group order) to that
//! generator, one prime at a time.

pub mod bianchi;
pub mod sl3;

use std::collections::BTreeMap;

use rug::Integer;
use serde::Serialize;

use crate::algebra::arith::{
    gcd, is_prime, largest_prime_factor, lcm, primes_up_to, sl2_order,
};
use crate::algebra::{Mat, ResidueMat};
use crate::error::{Error, Result};
use crate::geodesics::{classify, Kind};

/// Default tower depth explored by [`find_modulus_with_p`].
pub const DEFAULT_BUDGET: u32 = 40;

/// Reduces `start` (which must satisfy `pred`) to the least positive element
/// of the subgroup `{j : pred(j)}`, given the factorization of `start`.
pub(crate) fn descend(
    start: Integer,
    factors: &[(u64, u32)],
    mut pred: impl FnMut(&Integer) -> Result<bool>,
) -> Result<Integer> {
    if !pred(&start)? {
        return Err(Error::CapExceeded(format!(
            "exponent {start} (a multiple of the group order) is not admissible"
        )));
    }
    let mut j = start;
    for &(p, e) in factors {
        for _ in 0..e {
            let pz = Integer::from(p);
            if !j.is_divisible(&pz) {
                break;
            }
            let cand = Integer::from(&j / &pz);
            if !pred(&cand)? {
                break;
            }
            j = cand;
        }
    }
    Ok(j)
}

fn to_u64(j: Integer) -> Result<u64> {
    j.to_u64().ok_or_else(|| Error::CapExceeded(format!("order {j} exceeds 64 bits")))
}

fn require_hyperbolic(gamma: &Mat) -> Result<()> {
    if classify(gamma)? != Kind::Hyperbolic {
        return Err(Error::NotHyperbolic(gamma.trace().abs().to_string()));
    }
    Ok(())
}

/// `P(γ, m)` for a residue matrix already reduced mod `m ≥ 2`.
pub fn order_p_residue(g: &ResidueMat) -> Result<u64> {
    let (order, factors) = sl2_order(g.modulus());
    let j = descend(order, &factors, |j| Ok(g.pow(j).get(0, 1) == 0))?;
    to_u64(j)
}

/// `P(γ, m)`, the least `j ≥ 1` with `m | b_j`.
pub fn order_p(gamma: &Mat, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::InvalidArgument("modulus 0".into()));
    }
    require_hyperbolic(gamma)?;
    if m == 1 {
        return Ok(1);
    }
    order_p_residue(&ResidueMat::reduce(gamma, m)?)
}

/// `[P(γ, p^k)]` for `k = 1..depth`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerProfile {
    #[serde(serialize_with = "ser_mat")]
    pub gamma: Mat,
    pub p: u64,
    pub values: Vec<u64>,
}

pub(crate) fn ser_mat<S: serde::Serializer>(g: &Mat, s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&g.to_strings(), s)
}

impl TowerProfile {
    /// Consecutive quotients `values[k] / values[k-1]`.
    pub fn ratios(&self) -> Vec<u64> {
        self.values.windows(2).map(|w| w[1] / w[0]).collect()
    }

    /// Whether every consecutive quotient is 1 or p.
    pub fn ratio_invariant_holds(&self) -> bool {
        self.ratios().iter().all(|&r| r == 1 || r == self.p)
    }
}

/// Computes the tower level by level: with `τ = γ^{P_{k-1}}`, the next value
/// is `r·P_{k-1}` for the least `r` with `p^k | b(τ^r)`.
pub fn prime_tower(gamma: &Mat, p: u64, depth: u32) -> Result<TowerProfile> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be >= 1".into()));
    }
    require_hyperbolic(gamma)?;
    let mut values = vec![order_p(gamma, p)?];
    let mut pk = p;
    for k in 2..=depth {
        pk = pk
            .checked_mul(p)
            .ok_or_else(|| Error::ModulusTooLarge(format!("{p}^{k}")))?;
        let prev = *values.last().expect("nonempty");
        let tau = ResidueMat::reduce(gamma, pk)?.pow_u64(prev);
        let (order, factors) = sl2_order(pk);
        let r = to_u64(descend(order, &factors, |r| Ok(tau.pow(r).get(0, 1) == 0))?)?;
        let next = prev
            .checked_mul(r)
            .ok_or_else(|| Error::CapExceeded(format!("tower value at {p}^{k}")))?;
        values.push(next);
    }
    Ok(TowerProfile { gamma: gamma.clone(), p, values })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrtCheck {
    pub lhs: u64,
    pub rhs: u64,
    pub equal: bool,
}

/// Compares `P(γ, mn)` with `lcm(P(γ, m), P(γ, n))` for coprime `m, n`.
pub fn crt_check(gamma: &Mat, m: u64, n: u64) -> Result<CrtCheck> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("modulus 0".into()));
    }
    if gcd(m, n) != 1 {
        return Err(Error::NotCoprime(m, n));
    }
    let mn = m
        .checked_mul(n)
        .ok_or_else(|| Error::ModulusTooLarge(format!("{m}*{n}")))?;
    let lhs = order_p(gamma, mn)?;
    let rhs = lcm(order_p(gamma, m)?, order_p(gamma, n)?)
        .ok_or_else(|| Error::CapExceeded("lcm overflow".into()))?;
    Ok(CrtCheck { lhs, rhs, equal: lhs == rhs })
}

/// Deepest level examined for one prime during a modulus search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeProgress {
    pub p: u64,
    /// `(p^k, P(γ, p^k))` for every level with `p^k | b_target`.
    pub levels: Vec<(u64, u64)>,
    pub stop: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ModulusSearch {
    Found(u64),
    NotFound(Vec<PrimeProgress>),
}

/// Searches for `m` with `P(γ, m) = target`.
///
/// Since `m | b_target` exactly when `P(γ, m) | target`, candidate moduli are
/// products of prime powers dividing `b_target`. Primes up to
/// `max(largest prime of target, prime_floor)` are climbed to at most
/// `budget` levels; the coprime combination with the right lcm and the
/// smallest product wins.
pub fn find_modulus_with_p(
    gamma: &Mat,
    target: u64,
    budget: u32,
    prime_floor: u64,
) -> Result<ModulusSearch> {
    if target == 0 {
        return Err(Error::InvalidArgument("target 0".into()));
    }
    require_hyperbolic(gamma)?;
    if target == 1 {
        return Ok(ModulusSearch::Found(1));
    }
    let bound = largest_prime_factor(target).max(prime_floor);
    let mut progress = Vec::new();
    for q in primes_up_to(bound) {
        let g = ResidueMat::reduce(gamma, q)?;
        let mut levels = Vec::new();
        let mut qk = q;
        let mut k = 1;
        let stop = loop {
            if k > budget {
                break format!("budget {budget} reached");
            }
            let gq = if k == 1 { g } else { ResidueMat::reduce(gamma, qk)? };
            if gq.pow_u64(target).get(0, 1) != 0 {
                break format!("{q}^{k} does not divide b_{target}");
            }
            levels.push((qk, order_p_residue(&gq)?));
            match qk.checked_mul(q) {
                Some(next) => qk = next,
                None => break format!("{q}^{} exceeds 64 bits", k + 1),
            }
            k += 1;
        };
        progress.push(PrimeProgress { p: q, levels, stop });
    }

    // lcm-state -> smallest modulus realizing it
    let mut best: BTreeMap<u64, u64> = BTreeMap::from([(1, 1)]);
    for pp in &progress {
        let mut next = best.clone();
        for (&state, &modulus) in &best {
            for &(qk, pq) in &pp.levels {
                let Some(s) = lcm(state, pq) else { continue };
                let Some(m) = modulus.checked_mul(qk) else { continue };
                let slot = next.entry(s).or_insert(u64::MAX);
                if m < *slot {
                    *slot = m;
                }
            }
        }
        best = next;
    }
    Ok(match best.get(&target) {
        Some(&m) => ModulusSearch::Found(m),
        None => ModulusSearch::NotFound(progress),
    })
}

/// Finite-depth proxy for unboundedness of the tower: every window of
/// `max(depth/2, 1)` consecutive ratios contains a strict increase.
pub fn residual_borel_probe(gamma: &Mat, p: u64, depth: u32) -> Result<bool> {
    let tower = prime_tower(gamma, p, depth)?;
    let ratios = tower.ratios();
    let w = ((depth / 2) as usize).max(1);
    if ratios.len() < w {
        return Ok(ratios.iter().any(|&r| r > 1));
    }
    Ok(ratios.windows(w).all(|win| win.iter().any(|&r| r > 1)))
}
