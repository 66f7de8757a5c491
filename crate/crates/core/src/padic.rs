//! p-adic valuations, local square tests, prime-dependent exponents of the
//! exceptional classes, and the finite set of primes excluded from the bounds.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::numeric::{is_prime, mod_pow, prime_divisors_bounded, primes_up_to, reduce_mod};
use crate::quasi::{Classification, ExponentReport, QuasiStructure};
use crate::upoly::UPoly;
use crate::{Error, Result};

/// Trial division stops here; larger prime factors are kept as cofactors.
const FACTOR_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeContext {
    p: u64,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Self { p })
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Residue field size; equal to `p` over ℤ.
    pub fn q(&self) -> u64 {
        self.p
    }
}

impl TryFrom<u64> for PrimeContext {
    type Error = Error;

    fn try_from(p: u64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<PrimeContext> for u64 {
    fn from(c: PrimeContext) -> u64 {
        c.p
    }
}

fn ord_int(n: &BigInt, p: u64) -> i64 {
    let bp = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    while (&m % &bp).is_zero() {
        m /= &bp;
        v += 1;
    }
    v
}

/// `ord_p(x)`, with `None` standing for `+∞` at zero.
pub fn val_p(x: &BigRational, ctx: PrimeContext) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    Some(ord_int(x.numer(), ctx.p) - ord_int(x.denom(), ctx.p))
}

pub fn val_p_int(x: &BigInt, ctx: PrimeContext) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        Some(ord_int(x, ctx.p))
    }
}

/// Whether `x` (a p-unit modulo p) is a nonzero square mod p, p odd.
fn is_qr(x: &BigInt, p: u64) -> bool {
    let r = reduce_mod(x, p);
    r != 0 && mod_pow(r, (p - 1) / 2, p) == 1
}

/// Whether `D` is a square in ℚ_p for odd `p`.
pub fn sqrt_in_qp(d: &BigRational, ctx: PrimeContext) -> Result<bool> {
    if ctx.p == 2 {
        return Err(Error::ExceptionalPrime {
            p: 2,
            reason: "square classes at 2 are not handled".into(),
        });
    }
    if d.is_zero() {
        return Err(Error::Precondition("zero has no square class".into()));
    }
    let v = val_p(d, ctx).expect("nonzero");
    if v % 2 != 0 {
        return Ok(false);
    }
    let bp = BigInt::from(ctx.p);
    let strip = |n: &BigInt| {
        let mut m = n.clone();
        while (&m % &bp).is_zero() {
            m /= &bp;
        }
        m
    };
    let num = strip(d.numer());
    let den = strip(d.denom());
    Ok(is_qr(&num, ctx.p) == is_qr(&den, ctx.p))
}

/// Prime-dependent `(i_p, ν_p)` of an exceptional class: both are 1 exactly
/// when the conjugate roots lie in ℚ_p. For `E_1` the height is 1 and `i_p`
/// is forced to 0, so only `ν_p` varies with `p`.
pub fn local_exponents(report: &ExponentReport, qs: &QuasiStructure, ctx: PrimeContext) -> Result<(u8, u8)> {
    let Classification::Exceptional(_) = report.classification else {
        return Err(Error::WrongClassification(format!(
            "{} is not an exceptional class",
            report.classification
        )));
    };
    let g = &qs.irrational_part[0];
    let disc = UPoly::from_bigints(&g.poly).discriminant();
    let bad = ctx.p == 2
        || val_p(&disc, ctx) != Some(0)
        || g.poly.iter().any(|c| !c.is_zero() && val_p_int(c, ctx) != Some(0));
    if bad {
        return Err(Error::ExceptionalPrime {
            p: ctx.p,
            reason: "p divides 2, the discriminant or a coefficient of the quadratic".into(),
        });
    }
    let nu = u8::from(sqrt_in_qp(&disc, ctx)?);
    let i = if report.h >= BigRational::from_integer(2.into()) { nu } else { 0 };
    Ok((i, nu))
}

/// Primes at which the unit normalizations may fail. Large prime factors
/// that trial division could not split are kept in `cofactors`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalPrimes {
    pub primes: Vec<u64>,
    pub c_f_threshold: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty", with = "crate::numeric::serde_bigint_vec")]
    pub cofactors: Vec<BigInt>,
}

impl ExceptionalPrimes {
    pub fn contains(&self, p: u64) -> bool {
        p <= self.c_f_threshold
            || self.primes.binary_search(&p).is_ok()
            || self.cofactors.iter().any(|c| (c % BigInt::from(p)).is_zero())
    }
}

/// Default size threshold: primes up to the total degree are excluded.
pub fn default_threshold(qs: &QuasiStructure) -> u64 {
    qs.total_degree.max(2) as u64
}

pub fn exceptional_primes(qs: &QuasiStructure, report: &ExponentReport) -> ExceptionalPrimes {
    exceptional_primes_with_threshold(qs, report, default_threshold(qs))
}

pub fn exceptional_primes_with_threshold(
    qs: &QuasiStructure,
    _report: &ExponentReport,
    threshold: u64,
) -> ExceptionalPrimes {
    let mut gens: Vec<BigInt> = vec![qs.a.clone(), BigInt::from(2), BigInt::from(qs.weights.t)];
    let push_rat = |gens: &mut Vec<BigInt>, x: &BigRational| {
        if !x.is_zero() {
            gens.push(x.numer().clone());
            gens.push(x.denom().clone());
        }
    };
    let roots: Vec<&BigRational> = qs.rational_roots.iter().map(|z| &z.value).collect();
    for (i, z) in roots.iter().enumerate() {
        push_rat(&mut gens, z);
        for w in &roots[i + 1..] {
            push_rat(&mut gens, &(*z - *w));
        }
    }
    let factors: Vec<UPoly> = qs.irrational_part.iter().map(|g| g.monic()).collect();
    for (i, g) in factors.iter().enumerate() {
        for c in g.coeffs() {
            push_rat(&mut gens, c);
        }
        push_rat(&mut gens, &g.discriminant());
        for z in &roots {
            push_rat(&mut gens, &g.eval(z));
        }
        for h in &factors[i + 1..] {
            push_rat(&mut gens, &g.resultant(h));
        }
    }
    let mut primes: BTreeSet<u64> = primes_up_to(threshold).into_iter().collect();
    let mut cofactors: Vec<BigInt> = Vec::new();
    for g in gens {
        if g.is_zero() {
            continue;
        }
        let (ps, rest) = prime_divisors_bounded(&g, FACTOR_LIMIT);
        primes.extend(ps);
        if !rest.is_one() && !cofactors.contains(&rest) {
            cofactors.push(rest);
        }
    }
    ExceptionalPrimes {
        primes: primes.into_iter().collect(),
        c_f_threshold: threshold,
        cofactors,
    }
}

/// Legendre symbol `(a/p)` for odd `p`, as -1, 0 or 1.
pub fn legendre(a: i64, p: u64) -> i32 {
    let r = reduce_mod(&BigInt::from(a), p);
    match mod_pow(r, (p - 1) / 2, p) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// Integer square root test used by callers that need exact squares.
pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}
