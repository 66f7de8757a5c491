//! Checks of the decay bounds on enumerated data: upper-bound constant scans,
//! lower bounds along the admissible subsequence, and closed-form regressions.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exhaustive::{char_sum, count_congruence, value_histogram, Limits, SumEstimate};
use crate::numeric::{fmt_rational, parse_rational, pow_u64, rat_to_f64, serde_rational};
use crate::padic::{exceptional_primes, local_exponents, ExceptionalPrimes, PrimeContext};
use crate::poly::BivariatePoly;
use crate::quasi::{canonical_form, exponents, Classification, ExponentReport, QuasiStructure};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Sum,
    Count,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Sum => "sum",
            Target::Count => "count",
        })
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(Target::Sum),
            "count" => Ok(Target::Count),
            _ => Err(Error::InvalidArgument(format!("unknown target {s:?}"))),
        }
    }
}

/// Tolerances for the scans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    /// Largest accepted normalized value.
    pub ceiling: f64,
    /// Largest accepted least-squares slope of `log_q(normalized)` in `s`.
    pub slope_tol: f64,
    /// Smallest accepted normalized value in lower-bound checks.
    pub floor: f64,
    pub limits: Limits,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { ceiling: 10.0, slope_tol: 0.02, floor: 0.25, limits: Limits::default() }
    }
}

/// Everything the checks need about `f`.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub poly: BivariatePoly,
    pub structure: QuasiStructure,
    pub report: ExponentReport,
    pub excluded: ExceptionalPrimes,
}

impl Analysis {
    pub fn new(poly: &BivariatePoly) -> Result<Self> {
        let structure = canonical_form(poly)?;
        let report = exponents(&structure);
        let excluded = exceptional_primes(&structure, &report);
        Ok(Self { poly: poly.clone(), structure, report, excluded })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(&BivariatePoly::parse(text)?)
    }

    /// `(i, ν)` at `p`, using the local values for exceptional classes.
    pub fn exponents_at(&self, ctx: PrimeContext) -> Result<(u8, u8)> {
        if self.report.p_dependent {
            local_exponents(&self.report, &self.structure, ctx)
        } else {
            Ok((self.report.i, self.report.nu))
        }
    }

    pub fn s_power(&self, target: Target, ctx: PrimeContext) -> Result<u8> {
        let (i, nu) = self.exponents_at(ctx)?;
        Ok(match target {
            Target::Sum => i,
            Target::Count => nu,
        })
    }

    /// Modulus of the subsequence of `s` on which the lower bounds hold.
    /// For `E_m` this is `m` when the conjugate roots lie in `ℚ_p` and `N`
    /// otherwise.
    pub fn subsequence_modulus(&self, ctx: PrimeContext) -> Result<u64> {
        if let Classification::Exceptional(m) = self.report.classification {
            let (_, nu) = local_exponents(&self.report, &self.structure, ctx)?;
            return Ok(if nu == 1 { m as u64 } else { self.report.subseq_n });
        }
        Ok(self.report.subseq_modulus())
    }

    /// `s^k q^{-s/h}`.
    pub fn scale(&self, power: u8, q: u64, s: u32) -> f64 {
        let h = rat_to_f64(&self.report.h);
        (s as f64).powi(power as i32) * (q as f64).powf(-(s as f64) / h)
    }
}

/// Exact count and character sum at one `(p, s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub p: u64,
    pub s: u32,
    #[serde(with = "serde_rational")]
    pub count: BigRational,
    pub sum: SumEstimate,
}

impl Evaluation {
    pub fn value(&self, target: Target) -> f64 {
        match target {
            Target::Sum => self.sum.magnitude,
            Target::Count => rat_to_f64(&self.count),
        }
    }
}

pub fn evaluate(f: &BivariatePoly, ctx: PrimeContext, s: u32, limits: &Limits) -> Result<Evaluation> {
    let hist = value_histogram(f, ctx, s, limits)?;
    Ok(Evaluation { p: ctx.p(), s, count: count_congruence(&hist), sum: char_sum(&hist) })
}

/// Largest `s` with `p^{2s} ≤ budget`.
pub fn max_depth(p: u64, budget: u128) -> u32 {
    let mut s = 0u32;
    let mut size: u128 = 1;
    while let Some(next) = size.checked_mul((p as u128) * (p as u128)) {
        if next > budget {
            break;
        }
        size = next;
        s += 1;
    }
    s
}

/// Grid of `(p, s)` with `p` prime in `[pmin, pmax]` outside the excluded set
/// and `1 ≤ s ≤ smax` with `p^{2s} ≤ budget`.
pub fn build_grid(a: &Analysis, pmin: u64, pmax: u64, smax: Option<u32>, budget: u128) -> Vec<(u64, u32)> {
    let mut grid = Vec::new();
    for p in crate::numeric::primes_up_to(pmax) {
        if p < pmin || a.excluded.contains(p) {
            continue;
        }
        let top = max_depth(p, budget).min(smax.unwrap_or(u32::MAX));
        grid.extend((1..=top).map(|s| (p, s)));
    }
    grid
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub p: u64,
    pub s: u32,
    pub value: f64,
    /// Exponent of `s` used at this prime.
    pub s_power: u8,
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimeTrend {
    pub p: u64,
    /// `None` with fewer than two nonzero values.
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundScan {
    pub poly: String,
    pub target: Target,
    pub grid: Vec<(u64, u32)>,
    pub points: Vec<ScanPoint>,
    pub c_max: f64,
    /// Minimum over grid points on the admissible subsequence.
    pub c_min_on_subsequence: Option<f64>,
    pub trends: Vec<PrimeTrend>,
    pub max_slope: f64,
    pub ceiling: f64,
    pub slope_tol: f64,
    pub pass: bool,
    pub failures: Vec<String>,
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn evaluate_grid(a: &Analysis, grid: &[(u64, u32)], limits: &Limits) -> Result<Vec<Evaluation>> {
    grid.iter()
        .map(|&(p, s)| evaluate(&a.poly, PrimeContext::new(p)?, s, limits))
        .collect()
}

/// Builds the scan for one target from already evaluated grid points.
pub fn scan_from_evaluations(a: &Analysis, target: Target, evals: &[Evaluation], cfg: &ScanConfig) -> Result<BoundScan> {
    if evals.is_empty() {
        return Err(Error::InvalidArgument("empty grid after exclusions".into()));
    }
    let mut points = Vec::with_capacity(evals.len());
    let mut c_min_sub: Option<f64> = None;
    for e in evals {
        let ctx = PrimeContext::new(e.p)?;
        let k = a.s_power(target, ctx)?;
        let value = e.value(target);
        let normalized = value / a.scale(k, ctx.q(), e.s);
        if (e.s as u64).is_multiple_of(a.subsequence_modulus(ctx)?) {
            c_min_sub = Some(c_min_sub.map_or(normalized, |c| c.min(normalized)));
        }
        points.push(ScanPoint { p: e.p, s: e.s, value, s_power: k, normalized });
    }
    let c_max = points.iter().map(|pt| pt.normalized).fold(0.0, f64::max);
    let mut primes: Vec<u64> = points.iter().map(|pt| pt.p).collect();
    primes.dedup();
    let trends: Vec<PrimeTrend> = primes
        .iter()
        .map(|&p| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = points
                .iter()
                .filter(|pt| pt.p == p && pt.value > ZERO_TOL && pt.normalized.is_finite())
                .map(|pt| (pt.s as f64, pt.normalized.ln() / (p as f64).ln()))
                .unzip();
            PrimeTrend { p, slope: least_squares_slope(&xs, &ys) }
        })
        .collect();
    let max_slope = trends.iter().filter_map(|t| t.slope).fold(f64::NEG_INFINITY, f64::max);
    let max_slope = if max_slope.is_finite() { max_slope } else { 0.0 };
    let mut failures = Vec::new();
    if c_max > cfg.ceiling {
        failures.push(format!("constant ceiling exceeded: c_max = {c_max:.4} > {}", cfg.ceiling));
    }
    for t in &trends {
        if let Some(sl) = t.slope.filter(|&sl| sl > cfg.slope_tol) {
            failures.push(format!("p = {}: normalized values rise in s (slope {sl:.4} > {})", t.p, cfg.slope_tol));
        }
    }
    Ok(BoundScan {
        poly: a.poly.render(),
        target,
        grid: evals.iter().map(|e| (e.p, e.s)).collect(),
        points,
        c_max,
        c_min_on_subsequence: c_min_sub,
        trends,
        max_slope,
        ceiling: cfg.ceiling,
        slope_tol: cfg.slope_tol,
        pass: failures.is_empty(),
        failures,
    })
}

/// Upper-bound scan `value ≤ C s^k q^{-s/h}` over the grid.
pub fn scan_upper(a: &Analysis, target: Target, grid: &[(u64, u32)], cfg: &ScanConfig) -> Result<BoundScan> {
    let evals = evaluate_grid(a, grid, &cfg.limits)?;
    scan_from_evaluations(a, target, &evals, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundPoint {
    pub s: u32,
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerReport {
    pub poly: String,
    pub target: Target,
    pub p: u64,
    pub floor: f64,
    /// `s` must be a multiple of this.
    pub subsequence_modulus: u64,
    /// `c' s^k q^{-s/h} ≤ value` on admissible `s`; empty when none fit.
    pub subsequence: Vec<BoundPoint>,
    pub note: Option<String>,
    /// `c s^ν q^{-s/h} q^{-2} ≤ N` for every `s` within budget.
    pub count_bound: Vec<BoundPoint>,
    /// The same with `q^{-1}` in place of `q^{-2}`, checked when `m_ℚ ≥ d`.
    pub strengthened: Option<Vec<BoundPoint>>,
    pub pass: bool,
}

/// Lower bounds at a single prime.
pub fn check_lower_subsequence(
    a: &Analysis,
    target: Target,
    ctx: PrimeContext,
    cfg: &ScanConfig,
    smax: Option<u32>,
) -> Result<LowerReport> {
    if target == Target::Sum && a.report.classification == Classification::Linear {
        return Err(Error::Precondition("linear polynomials have vanishing sums; no lower bound".into()));
    }
    if a.excluded.contains(ctx.p()) {
        return Err(Error::ExceptionalPrime { p: ctx.p(), reason: "p lies in the excluded set".into() });
    }
    let top = max_depth(ctx.p(), cfg.limits.budget).min(smax.unwrap_or(u32::MAX));
    let evals = (1..=top)
        .map(|s| evaluate(&a.poly, ctx, s, &cfg.limits))
        .collect::<Result<Vec<_>>>()?;
    lower_from_evaluations(a, target, ctx, &evals, cfg)
}

/// Lower bounds from already evaluated depths at one prime.
pub fn lower_from_evaluations(
    a: &Analysis,
    target: Target,
    ctx: PrimeContext,
    evals: &[Evaluation],
    cfg: &ScanConfig,
) -> Result<LowerReport> {
    if target == Target::Sum && a.report.classification == Classification::Linear {
        return Err(Error::Precondition("linear polynomials have vanishing sums; no lower bound".into()));
    }
    let modulus = a.subsequence_modulus(ctx)?;
    let k = a.s_power(target, ctx)?;
    let nu = a.s_power(Target::Count, ctx)?;
    let q = ctx.q() as f64;
    let strengthen = a.report.classification != Classification::Linear
        && !a.report.p_dependent
        && BigRational::from_integer(a.report.m_q.into()) >= a.report.d;
    let tol = 1.0 - 1e-12;
    let mut subsequence = Vec::new();
    let mut count_bound = Vec::new();
    let mut strengthened = Vec::new();
    for e in evals.iter().filter(|e| e.p == ctx.p()) {
        let s = e.s;
        let n = e.value(Target::Count);
        if (s as u64).is_multiple_of(modulus) {
            let value = e.value(target);
            let bound = cfg.floor * a.scale(k, ctx.q(), s);
            subsequence.push(BoundPoint { s, value, bound, holds: value >= bound * tol });
        }
        let bound = cfg.floor * a.scale(nu, ctx.q(), s) / (q * q);
        count_bound.push(BoundPoint { s, value: n, bound, holds: n >= bound * tol });
        if strengthen {
            let bound = cfg.floor * a.scale(nu, ctx.q(), s) / q;
            strengthened.push(BoundPoint { s, value: n, bound, holds: n >= bound * tol });
        }
    }
    let top = count_bound.iter().map(|b| b.s).max().unwrap_or(0);
    let note = subsequence.is_empty().then(|| {
        format!("no admissible s: s must be a multiple of {modulus}, budget allows s ≤ {top}")
    });
    let all = |v: &[BoundPoint]| v.iter().all(|b| b.holds);
    let pass = all(&subsequence) && all(&count_bound) && all(&strengthened);
    Ok(LowerReport {
        poly: a.poly.render(),
        target,
        p: ctx.p(),
        floor: cfg.floor,
        subsequence_modulus: modulus,
        subsequence,
        note,
        count_bound,
        strengthened: strengthen.then_some(strengthened),
        pass,
    })
}

// Regression corpus.

/// `coef · s^s_pow · q^{q_s·s + q_c}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    #[serde(with = "serde_rational")]
    pub coef: BigRational,
    #[serde(default)]
    pub s_pow: u32,
    #[serde(with = "serde_rational")]
    pub q_s: BigRational,
    #[serde(with = "serde_rational", default = "BigRational::zero")]
    pub q_c: BigRational,
}

/// Formula valid for `s ≡ residue (mod modulus)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case {
    #[serde(default = "one_u32")]
    pub modulus: u32,
    #[serde(default)]
    pub residue: u32,
    pub terms: Vec<Term>,
    /// Multiply by `|S(f; p)|`.
    #[serde(default)]
    pub times_base_sum: bool,
}

fn one_u32() -> u32 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Eq,
    Le,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeFilter {
    pub modulus: u64,
    pub residues: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegressionVector {
    pub name: String,
    pub poly: String,
    pub target: Target,
    pub primes: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime_filter: Option<PrimeFilter>,
    #[serde(default = "one_u32")]
    pub s_min: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_max: Option<u32>,
    /// Only these `s` classes are checked; others are skipped.
    pub cases: Vec<Case>,
    pub relation: Relation,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub vectors: Vec<RegressionVector>,
}

pub const BUILTIN_CORPUS: &str = include_str!("../data/regressions.json");

impl Corpus {
    pub fn builtin() -> Self {
        Self::from_json(BUILTIN_CORPUS).expect("built-in corpus parses")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("corpus: {e}")))
    }
}

enum Expected {
    Exact(BigRational),
    Float(f64),
}

fn q_power_exact(q: u64, e: &BigRational) -> Option<BigRational> {
    if !e.is_integer() {
        return None;
    }
    let e = e.to_integer();
    let base = BigRational::from_integer(BigInt::from(q));
    let k: i32 = e.clone().try_into().ok()?;
    Some(if k >= 0 { num_traits::pow(base, k as usize) } else { num_traits::pow(base.recip(), (-k) as usize) })
}

fn expected_value(case: &Case, q: u64, s: u32) -> Expected {
    let sq = BigRational::from_integer(BigInt::from(s));
    let mut exact = Some(BigRational::zero());
    let mut float = 0.0;
    for t in &case.terms {
        let e = &t.q_s * &sq + &t.q_c;
        let sp = num_traits::pow(sq.clone(), t.s_pow as usize);
        float += rat_to_f64(&t.coef) * rat_to_f64(&sp) * (q as f64).powf(rat_to_f64(&e));
        exact = match (exact, q_power_exact(q, &e)) {
            (Some(acc), Some(qp)) => Some(acc + &t.coef * sp * qp),
            _ => None,
        };
    }
    match exact {
        Some(x) if !case.times_base_sum => Expected::Exact(x),
        _ => Expected::Float(float),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionPoint {
    pub p: u64,
    pub s: u32,
    pub computed: String,
    pub expected: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub name: String,
    pub poly: String,
    pub target: Target,
    pub source: String,
    pub points: Vec<RegressionPoint>,
    /// Primes skipped because they lie in the excluded set or fail the filter.
    pub skipped_primes: Vec<u64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

const REL_TOL: f64 = 1e-9;
/// Magnitudes below this are floating-point images of an exact zero.
const ZERO_TOL: f64 = 1e-12;

fn run_vector(v: &RegressionVector, limits: &Limits) -> Result<RegressionResult> {
    let a = Analysis::parse(&v.poly)?;
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for &p in &v.primes {
        let filtered = v.prime_filter.as_ref().is_some_and(|pf| !pf.residues.contains(&(p % pf.modulus)));
        if filtered || a.excluded.contains(p) {
            skipped.push(p);
            continue;
        }
        let ctx = PrimeContext::new(p)?;
        let top = max_depth(p, limits.budget).min(v.s_max.unwrap_or(u32::MAX));
        let mut base_sum: Option<f64> = None;
        for s in v.s_min..=top {
            let Some(case) = v.cases.iter().find(|c| s % c.modulus == c.residue % c.modulus) else {
                continue;
            };
            let e = evaluate(&a.poly, ctx, s, limits)?;
            let mut expected = expected_value(case, ctx.q(), s);
            if case.times_base_sum {
                let b = match base_sum {
                    Some(b) => b,
                    None => evaluate(&a.poly, ctx, 1, limits)?.sum.magnitude,
                };
                base_sum = Some(b);
                if let Expected::Float(x) = &mut expected {
                    *x *= b;
                }
            }
            let (computed, expected_text, pass) = match (v.target, &expected) {
                (Target::Count, Expected::Exact(x)) => {
                    let pass = match v.relation {
                        Relation::Eq => e.count == *x,
                        Relation::Le => e.count <= *x,
                    };
                    (fmt_rational(&e.count), fmt_rational(x), pass)
                }
                (target, _) => {
                    let x = match &expected {
                        Expected::Exact(x) => rat_to_f64(x),
                        Expected::Float(x) => *x,
                    };
                    let got = e.value(target);
                    let scale = x.abs().max(f64::MIN_POSITIVE);
                    let pass = match v.relation {
                        Relation::Eq if x.abs() < ZERO_TOL => got.abs() < ZERO_TOL,
                        Relation::Eq => (got - x).abs() <= REL_TOL * scale,
                        Relation::Le => got <= x * (1.0 + REL_TOL),
                    };
                    (format!("{got:.15e}"), format!("{x:.15e}"), pass)
                }
            };
            points.push(RegressionPoint { p, s, computed, expected: expected_text, pass });
        }
    }
    let pass = !points.is_empty() && points.iter().all(|pt| pt.pass);
    Ok(RegressionResult {
        name: v.name.clone(),
        poly: v.poly.clone(),
        target: v.target,
        source: v.source.clone(),
        points,
        skipped_primes: skipped,
        pass,
        error: None,
    })
}

/// Runs every vector; failures and errors are reported, not raised.
pub fn run_regressions(corpus: &Corpus, limits: &Limits) -> Vec<RegressionResult> {
    corpus
        .vectors
        .iter()
        .map(|v| {
            run_vector(v, limits).unwrap_or_else(|e| RegressionResult {
                name: v.name.clone(),
                poly: v.poly.clone(),
                target: v.target,
                source: v.source.clone(),
                points: Vec::new(),
                skipped_primes: Vec::new(),
                pass: false,
                error: Some(e.to_string()),
            })
        })
        .collect()
}

/// `expected` for a single point, as text; used by the CLI and tests.
pub fn expected_text(case: &Case, q: u64, s: u32) -> String {
    match expected_value(case, q, s) {
        Expected::Exact(x) => fmt_rational(&x),
        Expected::Float(x) => format!("{x:.15e}"),
    }
}

/// `q^{-s}` as a rational, a common closed form.
pub fn q_neg_pow(q: u64, s: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(pow_u64(q, s)))
}

/// Parses a rational written as `"a/b"` or `"a"`.
pub fn rational(text: &str) -> Result<BigRational> {
    parse_rational(text).ok_or_else(|| Error::InvalidArgument(format!("bad rational {text:?}")))
}
