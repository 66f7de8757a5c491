//! Brute-force enumeration over `(ℤ/M)²`.
//!
//! Everything is driven by the value histogram `v ↦ #{(x, y) : f(x, y) ≡ v}`:
//! the normalized count is `counts[0] / M²` and the exponential sum is
//! `M⁻² Σ_v counts[v] e^{2πiv/M}`, so only `M` complex exponentials are
//! evaluated. Rows `y ↦ f(x, y)` are produced from per-`x` coefficients and a
//! table of powers of `y`, and the `x` range is split into contiguous chunks
//! processed in parallel with private accumulators.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::ops::Range;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::check_budget;
use crate::numeric::{mod_pow, pow_u64, serde_rational};
use crate::padic::PrimeContext;
use crate::poly::BivariatePoly;
use crate::quasi::QuasiStructure;
use crate::{Error, Result};

/// Above this modulus the histogram is kept sparse.
pub const DENSE_LIMIT: u64 = 1 << 24;

pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// Enumeration limits shared by every brute-force routine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximal number of points `(x, y)` to visit.
    pub budget: u128,
    pub workers: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl Limits {
    pub fn with_budget(budget: u128) -> Self {
        Self { budget, ..Self::default() }
    }

    pub fn with_workers(self, workers: usize) -> Self {
        Self { workers: workers.max(1), ..self }
    }
}

/// Evaluates rows of `f` modulo a fixed modulus.
pub(crate) struct RowEvaluator {
    modulus: u64,
    /// Distinct `y` exponents with their `(x exponent, coefficient)` lists.
    by_k: Vec<(u32, Vec<(u32, u64)>)>,
    /// `ypow[i][y] = y^{by_k[i].0} mod M`.
    ypow: Vec<Vec<u64>>,
    /// Whether all products can be summed before a single reduction.
    lazy: bool,
}

impl RowEvaluator {
    pub(crate) fn new(f: &BivariatePoly, modulus: u64) -> Result<Self> {
        if modulus < 2 || modulus > u32::MAX as u64 {
            return Err(Error::InvalidArgument(format!("modulus {modulus} outside [2, 2^32)")));
        }
        let mut by_k: Vec<(u32, Vec<(u32, u64)>)> = Vec::new();
        for (j, k, c) in f.reduced_terms(modulus) {
            match by_k.iter_mut().find(|(kk, _)| *kk == k) {
                Some((_, list)) => list.push((j, c)),
                None => by_k.push((k, vec![(j, c)])),
            }
        }
        let ypow = by_k
            .iter()
            .map(|(k, _)| (0..modulus).map(|y| mod_pow(y, *k as u64, modulus)).collect())
            .collect();
        let bound = (modulus as u128 - 1).pow(2) * by_k.len().max(1) as u128;
        Ok(Self {
            modulus,
            by_k,
            ypow,
            lazy: bound < u64::MAX as u128,
        })
    }

    /// Writes `f(x, y) mod M` for every `y` into `out`.
    pub(crate) fn row(&self, x: u64, coeffs: &mut Vec<u64>, out: &mut [u64]) {
        let m = self.modulus;
        coeffs.clear();
        for (_, list) in &self.by_k {
            let mut g = 0u64;
            for &(j, c) in list {
                g = (g + (c as u128 * mod_pow(x, j as u64, m) as u128 % m as u128) as u64) % m;
            }
            coeffs.push(g);
        }
        if self.lazy {
            for (y, slot) in out.iter_mut().enumerate() {
                let mut acc = 0u64;
                for (g, pw) in coeffs.iter().zip(&self.ypow) {
                    acc += g * pw[y];
                }
                *slot = acc % m;
            }
        } else {
            for (y, slot) in out.iter_mut().enumerate() {
                let mut acc = 0u64;
                for (g, pw) in coeffs.iter().zip(&self.ypow) {
                    acc = (acc + g * pw[y] % m) % m;
                }
                *slot = acc;
            }
        }
    }
}

/// Splits `0..n` into contiguous chunks and folds each in parallel on a pool
/// of `workers` threads. Results come back in chunk order.
pub(crate) fn par_chunks<A, F>(n: u64, workers: usize, chunks: usize, work: F) -> Vec<A>
where
    A: Send,
    F: Fn(Range<u64>) -> A + Sync + Send,
{
    let chunks = (chunks.max(1) as u64).min(n.max(1));
    let ranges: Vec<Range<u64>> = (0..chunks)
        .map(|i| (n * i / chunks)..(n * (i + 1) / chunks))
        .collect();
    if workers <= 1 {
        return ranges.into_iter().map(work).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    pool.install(|| ranges.into_par_iter().map(&work).collect())
}

fn chunk_count(workers: usize, modulus: u64) -> usize {
    if modulus > (1 << 20) {
        workers.max(1)
    } else {
        workers.max(1) * 4
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HistogramStorage {
    Dense(Vec<u64>),
    /// Sorted `(value, count)` pairs with nonzero counts.
    Sparse(Vec<(u64, u64)>),
}

/// Counts of each residue value of `f` over `(ℤ/M)²`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueHistogram {
    pub modulus: u64,
    /// `(p, s)` when the modulus is a prime power.
    pub prime_power: Option<(u64, u32)>,
    pub storage: HistogramStorage,
}

impl ValueHistogram {
    pub fn count(&self, v: u64) -> u64 {
        match &self.storage {
            HistogramStorage::Dense(c) => c.get(v as usize).copied().unwrap_or(0),
            HistogramStorage::Sparse(pairs) => pairs
                .binary_search_by_key(&v, |e| e.0)
                .map_or(0, |i| pairs[i].1),
        }
    }

    /// Nonzero `(value, count)` pairs in increasing value order.
    pub fn nonzero(&self) -> Vec<(u64, u64)> {
        match &self.storage {
            HistogramStorage::Dense(c) => c
                .iter()
                .enumerate()
                .filter(|(_, n)| **n > 0)
                .map(|(v, n)| (v as u64, *n))
                .collect(),
            HistogramStorage::Sparse(pairs) => pairs.clone(),
        }
    }

    pub fn total(&self) -> u128 {
        self.nonzero().iter().map(|(_, n)| *n as u128).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,count\n");
        for (v, n) in self.nonzero() {
            out.push_str(&format!("{v},{n}\n"));
        }
        out
    }
}

/// Histogram of `f` over `(ℤ/M)²` for an arbitrary modulus `M ≥ 2`.
pub fn histogram_mod(f: &BivariatePoly, modulus: u64, limits: &Limits) -> Result<ValueHistogram> {
    check_budget(modulus, 2, limits.budget)?;
    let eval = RowEvaluator::new(f, modulus)?;
    let chunks = chunk_count(limits.workers, modulus);
    let storage = if modulus <= DENSE_LIMIT {
        let parts = par_chunks(modulus, limits.workers, chunks, |range| {
            let mut counts = vec![0u64; modulus as usize];
            let mut row = vec![0u64; modulus as usize];
            let mut coeffs = Vec::new();
            for x in range {
                eval.row(x, &mut coeffs, &mut row);
                for &v in &row {
                    counts[v as usize] += 1;
                }
            }
            counts
        });
        let mut total = vec![0u64; modulus as usize];
        for part in parts {
            for (t, c) in total.iter_mut().zip(part) {
                *t += c;
            }
        }
        HistogramStorage::Dense(total)
    } else {
        let parts = par_chunks(modulus, limits.workers, chunks, |range| {
            let mut counts: HashMap<u64, u64> = HashMap::new();
            let mut row = vec![0u64; modulus as usize];
            let mut coeffs = Vec::new();
            for x in range {
                eval.row(x, &mut coeffs, &mut row);
                for &v in &row {
                    *counts.entry(v).or_insert(0) += 1;
                }
            }
            counts
        });
        let mut total: HashMap<u64, u64> = HashMap::new();
        for part in parts {
            for (v, c) in part {
                *total.entry(v).or_insert(0) += c;
            }
        }
        let mut pairs: Vec<(u64, u64)> = total.into_iter().collect();
        pairs.sort_unstable();
        HistogramStorage::Sparse(pairs)
    };
    Ok(ValueHistogram {
        modulus,
        prime_power: None,
        storage,
    })
}

/// Histogram of `f` over `(ℤ/p^s)²`.
pub fn value_histogram(f: &BivariatePoly, ctx: PrimeContext, s: u32, limits: &Limits) -> Result<ValueHistogram> {
    if s == 0 {
        return Err(Error::InvalidArgument("s must be positive".into()));
    }
    check_budget(ctx.p(), 2 * s, limits.budget)?;
    let modulus = pow_u64(ctx.p(), s);
    let mut hist = histogram_mod(f, modulus, limits)?;
    hist.prime_power = Some((ctx.p(), s));
    Ok(hist)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumEstimate {
    pub real: f64,
    pub imag: f64,
    pub magnitude: f64,
    /// Number of zeros of `f` before normalization.
    pub exact_count_zero: u64,
    pub modulus: u64,
    /// The sum is exactly zero (decided on the histogram, not the floats).
    #[serde(default)]
    pub exact_zero: bool,
}

/// Cosine and sine of `2πv/M` for every residue `v`.
pub(crate) fn unit_roots(modulus: u64) -> (Vec<f64>, Vec<f64>) {
    (0..modulus)
        .map(|v| {
            let angle = TAU * (v as f64) / (modulus as f64);
            (angle.cos(), angle.sin())
        })
        .unzip()
}

/// For `M = p^s`, `Σ_v c_v ζ_M^v = 0` exactly when `c` is constant on every
/// class `v mod p^{s-1}`.
fn vanishes_exactly(hist: &ValueHistogram) -> bool {
    let Some((p, s)) = hist.prime_power else { return false };
    let m = hist.modulus;
    let step = pow_u64(p, s - 1);
    hist.nonzero().iter().all(|&(v, n)| hist.count((v + step) % m) == n)
}

pub fn char_sum(hist: &ValueHistogram) -> SumEstimate {
    let m = hist.modulus;
    if vanishes_exactly(hist) {
        return SumEstimate {
            real: 0.0,
            imag: 0.0,
            magnitude: 0.0,
            exact_count_zero: hist.count(0),
            modulus: m,
            exact_zero: true,
        };
    }
    let norm = (m as f64) * (m as f64);
    let (mut re, mut im) = (0.0f64, 0.0f64);
    for (v, n) in hist.nonzero() {
        let angle = TAU * (v as f64) / (m as f64);
        re += n as f64 * angle.cos();
        im += n as f64 * angle.sin();
    }
    let (real, imag) = (re / norm, im / norm);
    SumEstimate {
        real,
        imag,
        magnitude: real.hypot(imag),
        exact_count_zero: hist.count(0),
        modulus: m,
        exact_zero: false,
    }
}

/// `counts[0] / M²`.
pub fn count_congruence(hist: &ValueHistogram) -> BigRational {
    let m = BigInt::from(hist.modulus);
    BigRational::new(BigInt::from(hist.count(0)), &m * &m)
}

/// `N(f; n)` for an arbitrary modulus, by direct enumeration.
pub fn count_mod(f: &BivariatePoly, n: u64, limits: &Limits) -> Result<BigRational> {
    Ok(count_congruence(&histogram_mod(f, n, limits)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Region {
    I,
    II,
    III,
}

/// Region of the valuation class `(k1, k2)` in canonical coordinates.
pub fn region(t: u32, r: u32, k1: u32, k2: u32) -> Region {
    let (lhs, rhs) = (t as u64 * k2 as u64, r as u64 * k1 as u64);
    match lhs.cmp(&rhs) {
        std::cmp::Ordering::Equal => Region::I,
        std::cmp::Ordering::Less => Region::II,
        std::cmp::Ordering::Greater => Region::III,
    }
}

/// Normalized contribution of one part: exact zero-count share and the
/// complex character sum share.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartValue {
    #[serde(with = "serde_rational")]
    pub count: BigRational,
    pub re: f64,
    pub im: f64,
}

impl PartValue {
    fn zero() -> Self {
        Self {
            count: BigRational::zero(),
            re: 0.0,
            im: 0.0,
        }
    }

    fn add(&mut self, other: &PartValue) {
        self.count += &other.count;
        self.re += other.re;
        self.im += other.im;
    }
}

/// One valuation class `{val x = k1, val y = k2}` (valuations clamped at `s`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassCell {
    pub k1: u32,
    pub k2: u32,
    pub region: Region,
    pub points: u64,
    pub zero_count: u64,
    pub value: PartValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub p: u64,
    pub s: u32,
    pub t: u32,
    pub r: u32,
    /// `tα + rβ + rtn`; `f` vanishes to order `mN` on the class `(mt, mr)`.
    pub n_weight: u64,
    pub part_i: PartValue,
    pub part_ii: PartValue,
    pub part_iii: PartValue,
    pub total: PartValue,
    /// Region-I classes with `mN ≥ s`, summed from the enumeration.
    pub part_i1: PartValue,
    /// Truncated closed form of the same quantity.
    #[serde(with = "serde_rational")]
    pub part_i1_closed_form: BigRational,
    pub cells: Vec<ClassCell>,
}

fn valuation_table(p: u64, s: u32) -> Vec<u8> {
    let m = pow_u64(p, s);
    (0..m)
        .map(|x| {
            if x == 0 {
                return s as u8;
            }
            let mut v = 0u8;
            let mut y = x;
            while y % p == 0 {
                y /= p;
                v += 1;
            }
            v
        })
        .collect()
}

fn q_pow(q: u64, e: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(q).pow(e as u32))
}

/// Exact measure of `{f ≡ 0}` restricted to the region-I classes with
/// `mN ≥ s`, at depth `s`: classes `(mt, mr)` with `mr < s` have measure
/// `(1-q⁻¹)² q^{-(t+r)m}`; when `r | s` the clamped class `(ts/r, s)`
/// contributes `(1-q⁻¹) q^{-(t+r)s/r}` (or `q^{-2s}` when `t = r = 1`).
pub fn i1_closed_form(q: u64, s: u32, t: u32, r: u32, n_weight: u64) -> BigRational {
    let one = BigRational::from_integer(1.into());
    let unit = &one - &one / q_pow(q, 1);
    let (s, t, r) = (s as u64, t as u64, r as u64);
    let mut total = BigRational::zero();
    let first = s.div_ceil(n_weight).max(1);
    let mut m = first;
    while m * r < s {
        total += &unit * &unit / q_pow(q, (t + r) * m);
        m += 1;
    }
    if s % r == 0 && (s / r) * n_weight >= s {
        let m = s / r;
        total += if t == r {
            one / q_pow(q, 2 * s)
        } else {
            &unit / q_pow(q, (t + r) * m)
        };
    }
    total
}

/// Splits the enumeration over `(ℤ/p^s)²` into valuation classes and the
/// three regions `tk₂ = rk₁`, `tk₂ < rk₁`, `tk₂ > rk₁` (canonical
/// coordinates), reporting both the count and the character-sum view.
pub fn decompose(
    f: &BivariatePoly,
    ctx: PrimeContext,
    s: u32,
    qs: &QuasiStructure,
    limits: &Limits,
) -> Result<DecompositionReport> {
    if qs.is_monomial() {
        return Err(Error::Monomial);
    }
    if s == 0 {
        return Err(Error::InvalidArgument("s must be positive".into()));
    }
    check_budget(ctx.p(), 2 * s, limits.budget)?;
    let p = ctx.p();
    let m = pow_u64(p, s);
    let side = s as usize + 1;
    let classes = side * side;
    if (classes as u128) * (m as u128) > (1u128 << 28) {
        return Err(Error::InvalidArgument("per-class histograms would not fit in memory".into()));
    }
    let vals = valuation_table(p, s);
    let eval = RowEvaluator::new(f, m)?;
    let parts = par_chunks(m, limits.workers, limits.workers.max(1), |range| {
        let mut hist = vec![0u64; classes * m as usize];
        let mut row = vec![0u64; m as usize];
        let mut coeffs = Vec::new();
        for x in range {
            eval.row(x, &mut coeffs, &mut row);
            let vx = vals[x as usize] as usize;
            for (y, &v) in row.iter().enumerate() {
                let vy = vals[y] as usize;
                // Class index in the input coordinates (x-valuation major).
                let c = vx * side + vy;
                hist[c * m as usize + v as usize] += 1;
            }
        }
        hist
    });
    let mut hist = vec![0u64; classes * m as usize];
    for part in parts {
        for (t, c) in hist.iter_mut().zip(part) {
            *t += c;
        }
    }

    let (cosv, sinv) = unit_roots(m);
    let norm = (m as f64) * (m as f64);
    let norm_big = BigInt::from(m) * BigInt::from(m);
    let (t, r) = (qs.weights.t, qs.weights.r);
    let n_weight = (t * qs.alpha + r * qs.beta + r * t * qs.n_total) as u64;
    let mut cells = Vec::new();
    let (mut part_i, mut part_ii, mut part_iii, mut total, mut part_i1) =
        (PartValue::zero(), PartValue::zero(), PartValue::zero(), PartValue::zero(), PartValue::zero());
    for a in 0..side {
        for b in 0..side {
            let slice = &hist[(a * side + b) * m as usize..(a * side + b + 1) * m as usize];
            let points: u64 = slice.iter().sum();
            if points == 0 {
                continue;
            }
            let (mut re, mut im) = (0.0, 0.0);
            for (v, &n) in slice.iter().enumerate() {
                if n > 0 {
                    re += n as f64 * cosv[v];
                    im += n as f64 * sinv[v];
                }
            }
            // Canonical coordinates exchange the roles of x and y when swapped.
            let (k1, k2) = if qs.swapped { (b as u32, a as u32) } else { (a as u32, b as u32) };
            let reg = region(t, r, k1, k2);
            let value = PartValue {
                count: BigRational::new(BigInt::from(slice[0]), norm_big.clone()),
                re: re / norm,
                im: im / norm,
            };
            match reg {
                Region::I => {
                    part_i.add(&value);
                    let mm = k1 / t;
                    if mm as u64 * n_weight >= s as u64 {
                        part_i1.add(&value);
                    }
                }
                Region::II => part_ii.add(&value),
                Region::III => part_iii.add(&value),
            }
            total.add(&value);
            cells.push(ClassCell {
                k1,
                k2,
                region: reg,
                points,
                zero_count: slice[0],
                value,
            });
        }
    }
    cells.sort_by_key(|c| (c.k1, c.k2));
    Ok(DecompositionReport {
        p,
        s,
        t,
        r,
        n_weight,
        part_i,
        part_ii,
        part_iii,
        total,
        part_i1,
        part_i1_closed_form: i1_closed_form(p, s, t, r, n_weight),
        cells,
    })
}
