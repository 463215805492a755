//! Arithmetic and ε-almost arithmetic progressions in finite real multisets.

use std::collections::HashMap;
use std::io::Read;

use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geodesics::{eigenvalue, format_sig, trace_to_length, OUTPUT_DIGITS, PRECISION_BITS};
use crate::algebra::units::unit_exponent;

/// Exact description of a value as `coord · base(class)`, with bases of
/// different classes linearly independent over Q.
///
/// Lengths of trace `m` use `class = d` (the field) and `coord = t` with
/// `λ_m = μ_d^t`; plain multiples of one length use class 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactTag {
    pub class: i64,
    pub coord: Integer,
}

/// A sorted multiset of non-negative reals, optionally with exact tags.
#[derive(Clone, Debug, Default)]
pub struct RealMultiset {
    values: Vec<Float>,
    tags: Option<Vec<ExactTag>>,
}

pub fn float(x: f64) -> Float {
    Float::with_val(PRECISION_BITS, x)
}

impl RealMultiset {
    pub fn from_values(mut values: Vec<Float>) -> Result<Self> {
        if values.iter().any(|v| v.is_nan() || *v < 0 || v.is_infinite()) {
            return Err(Error::InvalidArgument("values must be finite non-negative reals".into()));
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("not NaN"));
        Ok(RealMultiset { values, tags: None })
    }

    pub fn from_f64(values: &[f64]) -> Result<Self> {
        RealMultiset::from_values(values.iter().map(|&v| float(v)).collect())
    }

    pub fn from_tagged(pairs: Vec<(Float, ExactTag)>) -> Result<Self> {
        let mut pairs = pairs;
        if pairs.iter().any(|(v, _)| v.is_nan() || *v < 0 || v.is_infinite()) {
            return Err(Error::InvalidArgument("values must be finite non-negative reals".into()));
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("not NaN").then(a.1.cmp(&b.1)));
        let (values, tags) = pairs.into_iter().unzip();
        Ok(RealMultiset { values, tags: Some(tags) })
    }

    /// `{c · base : c ∈ coords}` tagged as class 0.
    pub fn multiples(base: &Float, coords: &[u64]) -> Result<Self> {
        RealMultiset::from_tagged(
            coords
                .iter()
                .map(|&c| {
                    (Float::with_val(PRECISION_BITS, base * c), ExactTag { class: 0, coord: Integer::from(c) })
                })
                .collect(),
        )
    }

    /// Lengths of the given traces, tagged by field and unit exponent.
    pub fn from_traces(traces: &[Integer]) -> Result<Self> {
        let pairs = traces
            .iter()
            .map(|m| {
                let (d, lambda) = eigenvalue(m)?;
                let (t, _) = unit_exponent(&lambda, d)?;
                Ok((trace_to_length(m)?, ExactTag { class: d, coord: Integer::from(t) }))
            })
            .collect::<Result<_>>()?;
        RealMultiset::from_tagged(pairs)
    }

    /// Reads CSV with a `value` (or `length`) column and an optional `trace`
    /// column; traces switch on exact tags. A headerless single column of
    /// numbers is also accepted.
    pub fn load_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(input);
        let mut rows = rdr.records();
        let Some(first) = rows.next().transpose()? else {
            return RealMultiset::from_values(Vec::new());
        };
        let header: Vec<String> = first.iter().map(|s| s.to_ascii_lowercase()).collect();
        let value_col = header.iter().position(|h| h == "value" || h == "length");
        let trace_col = header.iter().position(|h| h == "trace");
        let parse_f = |s: &str| -> Result<Float> {
            Float::parse(s)
                .map(|p| Float::with_val(PRECISION_BITS, p))
                .map_err(|_| Error::InvalidArgument(format!("bad number {s:?}")))
        };
        if value_col.is_none() && trace_col.is_none() {
            let mut values = vec![parse_f(&first[0])?];
            for row in rows {
                values.push(parse_f(&row?[0])?);
            }
            return RealMultiset::from_values(values);
        }
        let mut values = Vec::new();
        let mut traces = Vec::new();
        for row in rows {
            let row = row?;
            if let Some(c) = trace_col {
                let m: Integer = row[c]
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad trace {:?}", &row[c])))?;
                traces.push(m);
            } else if let Some(c) = value_col {
                values.push(parse_f(&row[c])?);
            }
        }
        if trace_col.is_some() {
            RealMultiset::from_traces(&traces)
        } else {
            RealMultiset::from_values(values)
        }
    }

    pub fn values(&self) -> &[Float] {
        &self.values
    }

    pub fn tags(&self) -> Option<&[ExactTag]> {
        self.tags.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `S(x) = |{v : v ≤ x}|`.
    pub fn count_le(&self, x: &Float) -> usize {
        self.values.partition_point(|v| v <= x)
    }

    pub fn scaled(&self, c: &Float) -> Result<Self> {
        let values = self.values.iter().map(|v| Float::with_val(PRECISION_BITS, v * c)).collect();
        Ok(RealMultiset { values, tags: self.tags.clone() })
    }
}

/// Indices (into the sorted multiset) and values of a progression.
#[derive(Clone, Debug, PartialEq)]
pub struct ApHit {
    pub indices: Vec<usize>,
    pub values: Vec<Float>,
}

fn hit(s: &RealMultiset, indices: Vec<usize>) -> ApHit {
    let values = indices.iter().map(|&i| s.values[i].clone()).collect();
    ApHit { indices, values }
}

/// Per-class map from coordinate to the first index carrying it.
fn tag_index(tags: &[ExactTag]) -> HashMap<&ExactTag, usize> {
    let mut idx = HashMap::new();
    for (i, t) in tags.iter().enumerate() {
        idx.entry(t).or_insert(i);
    }
    idx
}

/// First `k`-term progression in lexicographic order of its first two indices.
///
/// With exact tags the comparison is exact whatever `tol` is; without tags
/// `tol` is an absolute tolerance and must be positive.
pub fn find_k_ap(s: &RealMultiset, k: usize, tol: f64) -> Result<Option<ApHit>> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!("k = {k} < 3")));
    }
    if let Some(tags) = s.tags() {
        let idx = tag_index(tags);
        for i in 0..tags.len() {
            for j in i + 1..tags.len() {
                if tags[j].class != tags[i].class || tags[j].coord <= tags[i].coord {
                    continue;
                }
                let step = Integer::from(&tags[j].coord - &tags[i].coord);
                let mut chain = vec![i, j];
                let mut next = tags[j].clone();
                while chain.len() < k {
                    next.coord += &step;
                    match idx.get(&next) {
                        Some(&l) => chain.push(l),
                        None => break,
                    }
                }
                if chain.len() == k {
                    return Ok(Some(hit(s, chain)));
                }
            }
        }
        return Ok(None);
    }
    if tol <= 0.0 {
        return Err(Error::InvalidArgument("tol = 0 requires exact tags".into()));
    }
    let v = &s.values;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[j] <= v[i] {
                continue;
            }
            let step = Float::with_val(PRECISION_BITS, &v[j] - &v[i]);
            let mut chain = vec![i, j];
            while chain.len() < k {
                let target = Float::with_val(PRECISION_BITS, &step * (chain.len() as u32)) + &v[i];
                let lo = Float::with_val(PRECISION_BITS, &target - tol);
                let l = v.partition_point(|x| *x < lo);
                let last = *chain.last().expect("nonempty");
                if l < v.len() && Float::with_val(PRECISION_BITS, &v[l] - &target).abs() <= tol && v[l] > v[last] {
                    chain.push(l);
                } else {
                    break;
                }
            }
            if chain.len() == k {
                return Ok(Some(hit(s, chain)));
            }
        }
    }
    Ok(None)
}

/// A 3-term progression with distinct terms, or `None`.
pub fn has_3term_ap(s: &RealMultiset, tol: f64) -> Result<Option<ApHit>> {
    find_k_ap(s, 3, tol)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsCheck {
    pub ok: bool,
    pub deviation: Float,
}

/// Evaluates `max_{i,j} |Δ_i/Δ_j − 1| < ε` over all pairs of gaps.
pub fn is_eps_almost_ap(seq: &[Float], eps: &Rational) -> Result<EpsCheck> {
    if seq.len() < 2 {
        return Err(Error::InvalidArgument("need at least two terms".into()));
    }
    if seq.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("sequence is not strictly increasing".into()));
    }
    let gaps: Vec<Float> = seq.windows(2).map(|w| Float::with_val(PRECISION_BITS, &w[1] - &w[0])).collect();
    let mut deviation = Float::with_val(PRECISION_BITS, 0);
    for gi in &gaps {
        for gj in &gaps {
            let dev = (Float::with_val(PRECISION_BITS, gi / gj) - 1u32).abs();
            if dev > deviation {
                deviation = dev;
            }
        }
    }
    Ok(EpsCheck { ok: deviation < *eps, deviation })
}

/// Parses a decimal or fraction (`0.1`, `1/10`) as an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidArgument(format!("bad number {s:?}"));
    let s = s.trim();
    if s.contains('/') {
        return s.parse::<Rational>().map_err(|_| bad());
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: Integer = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let den = Integer::from(10u32).pow(frac.len() as u32);
    let r = Rational::from((digits, den));
    Ok(if neg { -r } else { r })
}

use rug::ops::Pow;

/// Smallest integer strictly greater than `1 + 2/ε`.
pub fn bucket_spacing(eps: &Rational) -> Result<u64> {
    if *eps <= 0 {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let bound = Rational::from(2u32) / eps.clone() + 1u32;
    let m = bound.floor() + 1u32;
    m.numer().to_u64().ok_or_else(|| Error::InvalidArgument("eps too small".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlmostApResult {
    pub eps: String,
    pub k: u64,
    pub t: String,
    pub m: u64,
    /// Bucket indices `m, 2m, …, km` the terms were drawn from.
    pub buckets: Vec<u64>,
    pub values: Vec<String>,
    pub deviation: String,
    /// Smallest bucket from which every bucket up to the data's end is
    /// nonempty (diagnostic only).
    pub tail_start: u64,
    #[serde(skip)]
    pub exact_values: Vec<Float>,
    #[serde(skip)]
    pub exact_deviation: Float,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum AlmostApOutcome {
    Found(AlmostApResult),
    Sparse { first_empty_bucket: u64, last_bucket: u64, m: u64 },
}

/// Bucket index `n` with `x ∈ ((n−1)t, nt]`.
fn bucket_of(x: &Float, t: &Rational) -> u64 {
    let q = Float::with_val(PRECISION_BITS, x * t.denom()) / t.numer();
    q.ceil().to_integer().and_then(|z| z.to_u64()).unwrap_or(u64::MAX)
}

/// Index of the smallest value in bucket `n`, if any.
fn first_in_bucket(values: &[Float], n: u64, t: &Rational) -> Option<usize> {
    let lo = Rational::from(t * (n - 1));
    let hi = Rational::from(t * n);
    let i = values.partition_point(|v| *v <= lo);
    (i < values.len() && values[i] <= hi).then_some(i)
}

/// Buckets of width `t`: picks the smallest element of buckets `m, 2m, …, km`
/// for the least admissible `m > 1 + 2/ε`.
pub fn find_almost_ap(s: &RealMultiset, eps: &Rational, k: u64, t: &Rational) -> Result<AlmostApOutcome> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k = {k} < 2")));
    }
    if *t <= 0 {
        return Err(Error::InvalidArgument("t must be positive".into()));
    }
    let m0 = bucket_spacing(eps)?;
    let last_bucket = s.values.last().map_or(0, |v| bucket_of(v, t));
    let mut m = m0;
    while m.saturating_mul(k) <= last_bucket {
        let firsts: Option<Vec<usize>> = (1..=k).map(|j| first_in_bucket(&s.values, j * m, t)).collect();
        if let Some(firsts) = firsts {
            let buckets: Vec<u64> = (1..=k).map(|j| j * m).collect();
            let exact_values: Vec<Float> = firsts.iter().map(|&i| s.values[i].clone()).collect();
            let check = is_eps_almost_ap(&exact_values, eps)?;
            if !check.ok {
                return Err(Error::Certificate(format!(
                    "bucket choice with m = {m} has deviation {}",
                    check.deviation
                )));
            }
            let mut tail_start = last_bucket;
            while tail_start > 1 && first_in_bucket(&s.values, tail_start - 1, t).is_some() {
                tail_start -= 1;
            }
            return Ok(AlmostApOutcome::Found(AlmostApResult {
                eps: eps.to_string(),
                k,
                t: t.to_string(),
                m,
                buckets,
                values: exact_values.iter().map(|v| format_sig(v, OUTPUT_DIGITS)).collect(),
                deviation: format_sig(&check.deviation, OUTPUT_DIGITS),
                tail_start,
                exact_values,
                exact_deviation: check.deviation,
            }));
        }
        m += 1;
    }
    let first_empty_bucket = (1..=k)
        .map(|j| j * m0)
        .find(|&b| first_in_bucket(&s.values, b, t).is_none())
        .unwrap_or(m0 * k);
    Ok(AlmostApOutcome::Sparse { first_empty_bucket, last_bucket, m: m0 })
}

/// Tries bucket widths `t = base/(base + i)` for `i = 0..steps` and returns
/// the first success.
pub fn find_almost_ap_scan(
    s: &RealMultiset,
    eps: &Rational,
    k: u64,
    base: u64,
    steps: u64,
) -> Result<AlmostApOutcome> {
    let mut last = None;
    for i in 0..steps {
        let t = Rational::from((base, base + i));
        match find_almost_ap(s, eps, k, &t)? {
            found @ AlmostApOutcome::Found(_) => return Ok(found),
            sparse => last = Some(sparse),
        }
    }
    last.ok_or_else(|| Error::InvalidArgument("empty scan".into()))
}

/// `S(x − t) / S(x)`.
pub fn growth_ratio(s: &RealMultiset, t: &Float, x: &Float) -> Result<Float> {
    let denom = s.count_le(x);
    if denom == 0 {
        return Err(Error::InvalidArgument(format!("S({x}) = 0")));
    }
    let num = s.count_le(&Float::with_val(PRECISION_BITS, x - t));
    Ok(Float::with_val(PRECISION_BITS, num) / denom as u64)
}

/// `S(x) ~ e^{hx}/(hx)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthModel {
    pub h: Float,
}

impl GrowthModel {
    pub fn new(h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidArgument(format!("entropy {h} must be positive")));
        }
        Ok(GrowthModel { h: float(h) })
    }

    pub fn count(&self, x: &Float) -> Float {
        let hx = Float::with_val(PRECISION_BITS, &self.h * x);
        Float::with_val(PRECISION_BITS, hx.exp_ref()) / hx
    }

    /// Limit of `S(x − t)/S(x)`, namely `e^{−ht}`.
    pub fn limiting_ratio(&self, t: &Float) -> Float {
        Float::with_val(PRECISION_BITS, -(Float::with_val(PRECISION_BITS, &self.h * t))).exp()
    }
}
