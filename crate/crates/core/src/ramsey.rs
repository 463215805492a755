//! Van der Waerden colorings and the lift/project transfer of progressions
//! through finite covers.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::algebra::arith::divisors;
use crate::ap::bigstr;
use crate::error::{Error, Result};

/// Colors of `1..=n`, stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub colors: Vec<u32>,
    pub num_colors: u32,
}

impl Coloring {
    pub fn new(colors: Vec<u32>, num_colors: u32) -> Result<Self> {
        if let Some(c) = colors.iter().find(|&&c| c >= num_colors) {
            return Err(Error::InvalidArgument(format!("color {c} >= {num_colors}")));
        }
        Ok(Coloring { colors, num_colors })
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// Color of the 1-based position `i`.
    pub fn color(&self, i: u64) -> u32 {
        self.colors[(i - 1) as usize]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoAp {
    pub start: u64,
    pub diff: u64,
    pub color: u32,
}

impl MonoAp {
    pub fn terms(&self, k: usize) -> Vec<u64> {
        (0..k as u64).map(|t| self.start + t * self.diff).collect()
    }
}

/// First monochromatic `k`-term progression in `(start, diff)` order.
pub fn mono_ap(c: &Coloring, k: usize) -> Option<MonoAp> {
    let n = c.len() as u64;
    if k < 2 {
        return None;
    }
    let span = (k - 1) as u64;
    for start in 1..=n {
        let color = c.color(start);
        let mut diff = 1;
        while start + span * diff <= n {
            if (1..=span).all(|t| c.color(start + t * diff) == color) {
                return Some(MonoAp { start, diff, color });
            }
            diff += 1;
        }
    }
    None
}

/// Whether giving 0-based position `p` color `col` closes a monochromatic
/// `k`-term progression ending at `p`.
fn closes_ap(colors: &[u32], p: usize, col: u32, k: usize) -> bool {
    let span = k - 1;
    let mut diff = 1;
    while diff * span <= p {
        if (1..=span).all(|t| colors[p - t * diff] == col) {
            return true;
        }
        diff += 1;
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum VdwOutcome {
    /// `W(d, k) = n`, with a progression-free coloring of `1..n-1`.
    Exact { n: u64, witness: Coloring },
    Unknown { reason: String, longest_free: u64 },
}

/// Exhaustive depth-first search over progression-free colorings, with
/// colors introduced in order of first use.
pub fn vdw_number(d: u32, k: usize, n_max: u64, budget: Option<Duration>) -> Result<VdwOutcome> {
    if d < 2 || k < 3 {
        return Err(Error::InvalidArgument(format!("need d >= 2 and k >= 3, got d = {d}, k = {k}")));
    }
    let deadline = budget.map(|b| Instant::now() + b);
    let mut colors: Vec<u32> = Vec::new();
    let mut best: Vec<u32> = Vec::new();
    // next color to try at each depth
    let mut next: Vec<u32> = vec![0];
    let mut nodes: u64 = 0;
    loop {
        let depth = colors.len();
        let used = colors.iter().copied().max().map_or(0, |m| m + 1);
        let limit = (used + 1).min(d);
        let cand = next[depth];
        if cand >= limit {
            next.pop();
            match colors.pop() {
                Some(_) => {
                    let top = next.len() - 1;
                    next[top] += 1;
                    continue;
                }
                None => break,
            }
        }
        nodes += 1;
        if nodes & 0xffff == 0 {
            if let Some(dl) = deadline {
                if Instant::now() > dl {
                    return Ok(VdwOutcome::Unknown {
                        reason: "wall-clock budget exhausted".into(),
                        longest_free: best.len() as u64,
                    });
                }
            }
        }
        if closes_ap(&colors, depth, cand, k) {
            next[depth] += 1;
            continue;
        }
        colors.push(cand);
        if colors.len() > best.len() {
            best = colors.clone();
            if best.len() as u64 >= n_max {
                return Ok(VdwOutcome::Unknown {
                    reason: format!("a progression-free coloring of 1..{n_max} exists"),
                    longest_free: best.len() as u64,
                });
            }
        }
        next.push(0);
    }
    let n = best.len() as u64 + 1;
    Ok(VdwOutcome::Exact { n, witness: Coloring::new(best, d)? })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Lift,
    Project,
}

/// Divisor colors `ℓ(lift)/ℓ(base)` (or projection degrees) of a degree-`d` cover.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverSpec {
    pub degree: u64,
    pub lift_divisor: Vec<u64>,
    pub direction: Direction,
}

impl CoverSpec {
    pub fn new(degree: u64, lift_divisor: Vec<u64>, direction: Direction) -> Result<Self> {
        let c = CoverSpec { degree, lift_divisor, direction };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree == 0 {
            return Err(Error::InvalidArgument("cover degree 0".into()));
        }
        if let Some(x) = self.lift_divisor.iter().find(|&&x| x == 0 || self.degree % x != 0) {
            return Err(Error::InvalidArgument(format!("{x} does not divide degree {}", self.degree)));
        }
        Ok(())
    }

    /// The divisor coloring with `τ(degree)` colors.
    pub fn coloring(&self) -> Coloring {
        let divs = divisors(self.degree);
        let colors = self
            .lift_divisor
            .iter()
            .map(|x| divs.iter().position(|d| d == x).expect("validated") as u32)
            .collect();
        Coloring { colors, num_colors: divs.len() as u32 }
    }
}

fn is_exact_ap(v: &[Rational]) -> bool {
    if v.len() < 2 {
        return true;
    }
    let diff = Rational::from(&v[1] - &v[0]);
    diff != 0 && v.windows(2).all(|w| Rational::from(&w[1] - &w[0]) == diff)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transfer {
    pub progression: MonoAp,
    pub divisor: u64,
    pub indices: Vec<u64>,
    pub values: Vec<String>,
    #[serde(skip)]
    pub exact: Vec<Rational>,
}

/// Colors each index by its divisor and extracts a monochromatic `k`-term
/// sub-progression; lifted values are multiplied by the divisor, projected
/// values divided by it.
pub fn transfer_ap(values: &[Rational], cover: &CoverSpec, k: usize) -> Result<Transfer> {
    cover.validate()?;
    if k < 3 {
        return Err(Error::InvalidArgument(format!("k = {k} < 3")));
    }
    if cover.lift_divisor.len() != values.len() {
        return Err(Error::DimensionMismatch(cover.lift_divisor.len(), values.len()));
    }
    if !is_exact_ap(values) {
        return Err(Error::InvalidArgument("input values are not an exact progression".into()));
    }
    let coloring = cover.coloring();
    let ap = mono_ap(&coloring, k).ok_or_else(|| {
        Error::Insufficient(format!("no monochromatic {k}-term progression among {} indices", values.len()))
    })?;
    let indices = ap.terms(k);
    let divisor = cover.lift_divisor[(ap.start - 1) as usize];
    let exact: Vec<Rational> = indices
        .iter()
        .map(|&i| {
            let v = &values[(i - 1) as usize];
            match cover.direction {
                Direction::Lift => Rational::from(v * divisor),
                Direction::Project => Rational::from(v / divisor),
            }
        })
        .collect();
    if !is_exact_ap(&exact) {
        return Err(Error::Certificate("transferred values are not an exact progression".into()));
    }
    let values = exact.iter().map(|r| r.to_string()).collect();
    Ok(Transfer { progression: ap, divisor, indices, values, exact })
}

/// `D = (∏_{d ≤ d_M} d)(∏_{d ≤ d_X} d)`.
pub fn factorial_constant(d_m: u64, d_x: u64) -> Integer {
    Integer::from(Integer::factorial(d_m as u32)) * Integer::from(Integer::factorial(d_x as u32))
}

/// Base progression `{C·D·n}_{n=1..N2}` (multiples of `ℓ'`).
pub fn proof_base_values(c: u64, d_m: u64, d_x: u64, n2: u64) -> Vec<Integer> {
    let cd = factorial_constant(d_m, d_x) * c;
    (1..=n2).map(|n| Integer::from(&cd * n)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DoubleTransfer {
    pub stage1: MonoAp,
    pub stage2: MonoAp,
    /// Lift divisor `i_0` of stage 1 and projection divisor `j_0` of stage 2.
    pub i0: u64,
    pub j0: u64,
    #[serde(with = "bigstr")]
    pub a: Integer,
    #[serde(with = "bigstr")]
    pub b: Integer,
    /// `a + b·s` for `s = 1..k`, as multiples of `ℓ`.
    #[serde(with = "bigstr::vec")]
    pub multipliers: Vec<Integer>,
}

/// Lifts an exact progression `v_n` of multiples of `ℓ' = (j/i)ℓ` to the
/// common cover `Y` and projects it to `M`.
///
/// Stage 1 colors `n ∈ 1..N2` by the lift divisor `i_n` (from `cover_up`)
/// and extracts an `N1`-term progression `a' + b'r`, where `N1` is the
/// length of `cover_down`; stage 2 colors `r` by the projection degree `j_r`
/// and extracts `a'' + b''s`. The resulting lengths are
/// `(i_0 j / (j_0 i)) · v_{a' + b'(a'' + b'' s)} · ℓ = (a + b s) ℓ`.
pub fn double_transfer(
    values: &[Integer],
    cover_up: &CoverSpec,
    cover_down: &CoverSpec,
    k: usize,
    j: u64,
    i: u64,
) -> Result<DoubleTransfer> {
    cover_up.validate()?;
    cover_down.validate()?;
    if k < 3 {
        return Err(Error::InvalidArgument(format!("k = {k} < 3")));
    }
    if j == 0 || i == 0 {
        return Err(Error::InvalidArgument("base divisors must be positive".into()));
    }
    if cover_up.lift_divisor.len() != values.len() {
        return Err(Error::DimensionMismatch(cover_up.lift_divisor.len(), values.len()));
    }
    let rat: Vec<Rational> = values.iter().map(|v| Rational::from(v)).collect();
    if values.len() < 2 || !is_exact_ap(&rat) {
        return Err(Error::InvalidArgument("input values are not an exact progression".into()));
    }
    let n1 = cover_down.lift_divisor.len();
    let s1 = mono_ap(&cover_up.coloring(), n1).ok_or_else(|| {
        Error::Insufficient(format!(
            "stage 1: no monochromatic {n1}-term progression among {} indices",
            values.len()
        ))
    })?;
    let s2 = mono_ap(&cover_down.coloring(), k).ok_or_else(|| {
        Error::Insufficient(format!("stage 2: no monochromatic {k}-term progression among {n1} indices"))
    })?;
    let i0 = cover_up.lift_divisor[(s1.start - 1) as usize];
    let j0 = cover_down.lift_divisor[(s2.start - 1) as usize];
    // a' + b' r and a'' + b'' s
    let (a1, b1) = (s1.start as i64 - s1.diff as i64, s1.diff);
    let (a2, b2) = (s2.start as i64 - s2.diff as i64, s2.diff);
    let v0 = Integer::from(&values[0] - &values[1]) + &values[0];
    let c = Integer::from(&values[1] - &values[0]);
    let f = Rational::from((Integer::from(i0) * j, Integer::from(j0) * i));
    let inner_a = Integer::from(a1) + Integer::from(b1) * a2;
    let a = Rational::from(&f * Rational::from(v0 + Integer::from(&c * &inner_a)));
    let b = Rational::from(&f * Rational::from(c * b1 * b2));
    if *a.denom() != 1 || *b.denom() != 1 {
        return Err(Error::NotIntegral(format!("a = {a}, b = {b}")));
    }
    let (a, b) = (a.numer().clone(), b.numer().clone());
    let mut multipliers = Vec::with_capacity(k);
    for s in 1..=k as u64 {
        // direct recomputation from the two extractions
        let r = s2.start + (s - 1) * s2.diff;
        let n = s1.start + (r - 1) * s1.diff;
        if cover_down.lift_divisor[(r - 1) as usize] != j0 || cover_up.lift_divisor[(n - 1) as usize] != i0 {
            return Err(Error::Certificate(format!("index {s} left its color class")));
        }
        let direct = Rational::from(&f * Rational::from(&values[(n - 1) as usize]));
        let affine = Integer::from(&b * s) + &a;
        if direct != affine {
            return Err(Error::Certificate(format!("term {s}: {direct} != a + b s = {affine}")));
        }
        multipliers.push(affine);
    }
    Ok(DoubleTransfer { stage1: s1, stage2: s2, i0, j0, a, b, multipliers })
}

/// Greedy adversary: each index takes the divisor that closes the fewest
/// monochromatic `k`-term progressions so far, ties broken at random.
pub fn adversarial_divisors(degree: u64, n: usize, k: usize, seed: u64) -> Vec<u64> {
    let divs = divisors(degree);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut colors: Vec<u32> = Vec::with_capacity(n);
    for p in 0..n {
        let mut best: Vec<u32> = Vec::new();
        let mut best_score = usize::MAX;
        for col in 0..divs.len() as u32 {
            let score = count_closing(&colors, p, col, k);
            if score < best_score {
                best_score = score;
                best = vec![col];
            } else if score == best_score {
                best.push(col);
            }
        }
        colors.push(best[rng.gen_range(0..best.len())]);
    }
    colors.into_iter().map(|c| divs[c as usize]).collect()
}

fn count_closing(colors: &[u32], p: usize, col: u32, k: usize) -> usize {
    let span = k.saturating_sub(1).max(1);
    (1..=p / span)
        .filter(|&diff| (1..=span).all(|t| colors[p - t * diff] == col))
        .count()
}

/// Uniformly random divisor coloring.
pub fn random_divisors(degree: u64, n: usize, seed: u64) -> Vec<u64> {
    let divs = divisors(degree);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| divs[rng.gen_range(0..divs.len())]).collect()
}
