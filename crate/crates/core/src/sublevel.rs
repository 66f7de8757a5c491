//! Sublevel sets `{x : |P(x)|_p ≤ p^{-ℓ}}` of one-variable polynomials and
//! their description as a union of balls around the rational roots.
//!
//! For a root `ξ_j` the ball radius is `p^{-ρ_j}` with
//! `ρ_j = max_C (ℓ - val(a ∏_{k∉C} (ξ_j - ξ_k)^{e_k})) / S(C)`, the maximum
//! running over root clusters `C ∋ ξ_j` of total multiplicity `S(C)`. Balls
//! only exist at integer depths, so membership is `val(x - ξ_j) ≥ ⌈ρ_j⌉`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::check_budget;
use crate::numeric::{fmt_rational, pow_u64, reduce_mod, serde_rational};
use crate::padic::{val_p, PrimeContext};
use crate::poly::{parse_terms, ParseError};
use crate::upoly::UPoly;
use crate::{Error, Result};

/// `a ∏ (x - ξ_j)^{e_j} · R(x)` with distinct rational `ξ_j` and an optional
/// monic residual `R` without rational roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredPoly1D {
    pub leading: BigInt,
    pub roots: Vec<(BigRational, u32)>,
    pub residual: Option<UPoly>,
}

fn shift_err(e: ParseError, offset: usize) -> ParseError {
    match e {
        ParseError::Syntax { pos, msg } => ParseError::Syntax { pos: pos + offset, msg },
        ParseError::UnknownVariable { pos, var } => ParseError::UnknownVariable { pos: pos + offset, var },
        ParseError::NegativeExponent { pos } => ParseError::NegativeExponent { pos: pos + offset },
        ParseError::Parenthesized { pos } => ParseError::Parenthesized { pos: pos + offset },
    }
}

fn parse_univariate(text: &str, offset: usize) -> Result<UPoly> {
    let terms = parse_terms(text, &['x']).map_err(|e| shift_err(e, offset))?;
    let deg = terms.keys().map(|e| e[0] as usize).max().unwrap_or(0);
    let mut coeffs = vec![BigInt::zero(); deg + 1];
    for (e, c) in terms {
        coeffs[e[0] as usize] = c;
    }
    Ok(UPoly::from_bigints(&coeffs))
}

impl FactoredPoly1D {
    pub fn new(leading: BigInt, roots: Vec<(BigRational, u32)>) -> Result<Self> {
        if leading.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        for (i, (xi, e)) in roots.iter().enumerate() {
            if *e == 0 {
                return Err(Error::InvalidArgument("root multiplicity must be positive".into()));
            }
            if roots[..i].iter().any(|(other, _)| other == xi) {
                return Err(Error::InvalidArgument(format!("repeated root {}", fmt_rational(xi))));
            }
        }
        Ok(Self { leading, roots, residual: None })
    }

    /// Factors an integer polynomial over ℚ into rational roots and a residual.
    pub fn from_upoly(p: &UPoly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let lead = p.lead();
        if !lead.is_integer() {
            return Err(Error::InvalidArgument("leading coefficient must be an integer".into()));
        }
        let mut roots = Vec::new();
        let mut residual = UPoly::one();
        for (layer, mult) in p.squarefree() {
            let mut rest = layer;
            for root in rest.rational_roots() {
                rest = rest.div_rem(&UPoly::linear(&root)).0;
                roots.push((root, mult));
            }
            residual = residual.mul(&rest.monic().pow(mult));
        }
        roots.sort();
        Ok(Self {
            leading: lead.to_integer(),
            roots,
            residual: (residual.degree() != Some(0)).then_some(residual),
        })
    }

    /// Parses products such as `x^2*(x-1)`, `3(2x-1)^2(x+4)` or a plain
    /// polynomial such as `x^2 - 2`. Factors have integer coefficients.
    pub fn parse(text: &str) -> Result<Self> {
        let chars: Vec<char> = text.chars().collect();
        if !chars.contains(&'(') {
            return Self::from_upoly(&parse_univariate(text, 0)?);
        }
        let mut product = UPoly::one();
        let mut i = 0;
        let read_exp = |i: &mut usize| -> Result<u32> {
            let mut j = *i;
            while j < chars.len() && chars[j].is_whitespace() {
                j += 1;
            }
            if j < chars.len() && chars[j] == '^' {
                j += 1;
                while j < chars.len() && chars[j].is_whitespace() {
                    j += 1;
                }
                let start = j;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let digits: String = chars[start..j].iter().collect();
                *i = j;
                return digits.parse().map_err(|_| {
                    Error::Parse(ParseError::Syntax { pos: start, msg: "expected exponent".into() })
                });
            }
            Ok(1)
        };
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() || c == '*' {
                i += 1;
                continue;
            }
            if c == '(' {
                let close = chars[i + 1..]
                    .iter()
                    .position(|&d| d == ')' || d == '(')
                    .map(|k| k + i + 1)
                    .filter(|&k| chars[k] == ')')
                    .ok_or(Error::Parse(ParseError::Syntax { pos: i, msg: "unbalanced parenthesis".into() }))?;
                let inner: String = chars[i + 1..close].iter().collect();
                let factor = parse_univariate(&inner, i + 1)?;
                i = close + 1;
                let e = read_exp(&mut i)?;
                product = product.mul(&factor.pow(e));
                continue;
            }
            if c == ')' {
                return Err(Error::Parse(ParseError::Syntax { pos: i, msg: "unbalanced parenthesis".into() }));
            }
            let start = i;
            while i < chars.len() && chars[i] != '(' && chars[i] != ')' {
                i += 1;
            }
            let run: String = chars[start..i].iter().collect();
            let run = run.trim().trim_end_matches('*').trim();
            if let Some(k) = run.find(['+', '-']) {
                return Err(Error::Parse(ParseError::Syntax {
                    pos: start + k,
                    msg: "sums must be parenthesized inside a product".into(),
                }));
            }
            if !run.is_empty() {
                product = product.mul(&parse_univariate(run, start)?);
            }
        }
        Self::from_upoly(&product)
    }

    pub fn expanded(&self) -> UPoly {
        let mut acc = UPoly::constant(BigRational::from_integer(self.leading.clone()));
        for (xi, e) in &self.roots {
            acc = acc.mul(&UPoly::linear(xi).pow(*e));
        }
        if let Some(r) = &self.residual {
            acc = acc.mul(r);
        }
        acc
    }

    /// `ρ` for every root cluster containing root `j`, as `(cluster mask, ρ)`.
    fn cluster_exponents(&self, j: usize, ell: u32, ctx: PrimeContext) -> Vec<(u32, BigRational)> {
        let m = self.roots.len();
        let others: Vec<usize> = (0..m).filter(|&k| k != j).collect();
        let base = val_p(&BigRational::from_integer(self.leading.clone()), ctx).expect("nonzero");
        let diffs: Vec<i64> = others
            .iter()
            .map(|&k| val_p(&(&self.roots[j].0 - &self.roots[k].0), ctx).expect("distinct roots"))
            .collect();
        let mut out = Vec::with_capacity(1 << others.len());
        for mask in 0u32..(1 << others.len()) {
            let mut size = self.roots[j].1 as i64;
            let mut outside = base;
            let mut cluster = 1u32 << j;
            for (bit, &k) in others.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    size += self.roots[k].1 as i64;
                    cluster |= 1 << k;
                } else {
                    outside += self.roots[k].1 as i64 * diffs[bit];
                }
            }
            out.push((cluster, BigRational::new(BigInt::from(ell as i64 - outside), BigInt::from(size))));
        }
        out
    }
}

/// The ball `{x : val(x - center) ≥ depth}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterBall {
    #[serde(with = "serde_rational")]
    pub center: BigRational,
    /// Exact exponent `ρ` of the radius `p^{-ρ}`.
    #[serde(with = "serde_rational")]
    pub radius_exp: BigRational,
    /// `max(⌈ρ⌉, 0)`.
    pub depth: u32,
    /// Whether the singleton cluster attains the maximum (so `depth = ⌈ℓ/e⌉`
    /// when all roots and differences are units).
    pub singleton: bool,
}

impl ClusterBall {
    pub fn contains(&self, x: &BigRational, ctx: PrimeContext) -> bool {
        match val_p(&(x - &self.center), ctx) {
            None => true,
            Some(v) => v >= self.depth as i64,
        }
    }
}

fn ceil_nonneg(x: &BigRational) -> u32 {
    let c = x.ceil().to_integer();
    if c.is_negative() {
        0
    } else {
        c.to_u32().expect("depth fits u32")
    }
}

/// Ball around root `j` at level `ℓ`.
pub fn cluster_radius(p: &FactoredPoly1D, j: usize, ell: u32, ctx: PrimeContext) -> Result<ClusterBall> {
    if (&p.leading % BigInt::from(ctx.p())).is_zero() {
        return Err(Error::Precondition(format!("p = {} divides the leading coefficient", ctx.p())));
    }
    if j >= p.roots.len() {
        return Err(Error::InvalidArgument(format!("root index {j} out of range")));
    }
    let exps = p.cluster_exponents(j, ell, ctx);
    let (_, best) = exps.iter().max_by(|a, b| a.1.cmp(&b.1)).expect("at least the singleton");
    let singleton_rho = &exps[0].1;
    Ok(ClusterBall {
        center: p.roots[j].0.clone(),
        radius_exp: best.clone(),
        depth: ceil_nonneg(best),
        singleton: singleton_rho == best,
    })
}

/// `⌈ℓ/e_j⌉`: the depth when the leading coefficient, the roots and all
/// root differences are p-adic units.
pub fn unit_depth(p: &FactoredPoly1D, j: usize, ell: u32) -> u32 {
    ell.div_ceil(p.roots[j].1)
}

/// Evaluates `val_p(P(x))` (clamped at `s`) for every residue `0..p^s`.
fn valuations(p: &FactoredPoly1D, ctx: PrimeContext, s: u32) -> Vec<u32> {
    let pp = ctx.p();
    let modulus = pow_u64(pp, s);
    let poly = p.expanded();
    let den = poly
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let clamp = |v: Option<i64>| v.map_or(s, |v| v.clamp(0, s as i64) as u32);
    if !(&den % BigInt::from(pp)).is_zero() {
        // p-integral: work modulo p^s with denominators cleared.
        let ints: Vec<u64> = poly
            .coeffs()
            .iter()
            .map(|c| reduce_mod(&(c * BigRational::from_integer(den.clone())).to_integer(), modulus))
            .collect();
        (0..modulus)
            .map(|x| {
                let mut acc = 0u128;
                for c in ints.iter().rev() {
                    acc = (acc * x as u128 + *c as u128) % modulus as u128;
                }
                let mut v = 0u32;
                let mut a = acc as u64;
                if a == 0 {
                    return s;
                }
                while a.is_multiple_of(pp) {
                    a /= pp;
                    v += 1;
                }
                v
            })
            .collect()
    } else {
        (0..modulus)
            .map(|x| clamp(val_p(&poly.eval(&BigRational::from_integer(x.into())), ctx)))
            .collect()
    }
}

/// Residues `x mod p^s` with `val_p(P(x)) ≥ ℓ`.
pub fn sublevel_set(p: &FactoredPoly1D, ctx: PrimeContext, s: u32, ell: u32, budget: u128) -> Result<Vec<u64>> {
    if ell > s {
        return Err(Error::InvalidArgument(format!("level {ell} exceeds depth {s}")));
    }
    check_budget(ctx.p(), s, budget)?;
    Ok(valuations(p, ctx, s)
        .into_iter()
        .enumerate()
        .filter(|(_, v)| *v >= ell)
        .map(|(x, _)| x as u64)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallReport {
    #[serde(with = "serde_rational")]
    pub center: BigRational,
    /// Center reduced modulo `p^depth` when it is p-integral.
    pub center_mod: Option<u64>,
    pub depth: u32,
    #[serde(with = "serde_rational")]
    pub radius_exp: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub p: u64,
    pub s: u32,
    pub ell: u32,
    pub matches: bool,
    pub sublevel_size: usize,
    pub balls: Vec<BallReport>,
    /// Residues in the sublevel set but in no ball.
    pub missing: Vec<u64>,
    /// Residues in some ball but not in the sublevel set.
    pub extra: Vec<u64>,
}

fn check_residual_unit(p: &FactoredPoly1D, ctx: PrimeContext) -> Result<()> {
    let Some(r) = &p.residual else { return Ok(()) };
    let pp = BigInt::from(ctx.p());
    if r.coeffs().iter().any(|c| (c.denom() % &pp).is_zero()) {
        return Err(Error::Precondition("residual factor is not p-integral".into()));
    }
    let has_root = (0..ctx.p()).any(|x| {
        let v = r.eval(&BigRational::from_integer(x.into()));
        (v.numer() % &pp).is_zero()
    });
    if has_root {
        return Err(Error::Precondition(
            "residual factor without rational roots vanishes mod p; its roots give no balls".into(),
        ));
    }
    Ok(())
}

fn balls_for(p: &FactoredPoly1D, ctx: PrimeContext, s: u32, ell: u32) -> Result<Vec<(ClusterBall, BallReport)>> {
    (0..p.roots.len())
        .map(|j| {
            let ball = cluster_radius(p, j, ell, ctx)?;
            let den_ok = !(ball.center.denom() % BigInt::from(ctx.p())).is_zero();
            let center_mod = den_ok.then(|| {
                let m = pow_u64(ctx.p(), ball.depth.min(s));
                let inv = crate::numeric::mod_inverse(ball.center.denom(), m).unwrap_or(0);
                let num = reduce_mod(ball.center.numer(), m);
                ((num as u128 * inv as u128) % m as u128) as u64
            });
            let rep = BallReport {
                center: ball.center.clone(),
                center_mod,
                depth: ball.depth,
                radius_exp: ball.radius_exp.clone(),
            };
            Ok((ball, rep))
        })
        .collect()
}

/// Compares the enumerated sublevel set with the union of cluster balls.
pub fn verify_cluster_decomposition(
    p: &FactoredPoly1D,
    ctx: PrimeContext,
    s: u32,
    ell: u32,
    budget: u128,
) -> Result<ClusterReport> {
    check_residual_unit(p, ctx)?;
    let set = sublevel_set(p, ctx, s, ell, budget)?;
    let balls = balls_for(p, ctx, s, ell)?;
    let modulus = pow_u64(ctx.p(), s);
    let in_set: Vec<bool> = {
        let mut v = vec![false; modulus as usize];
        for &x in &set {
            v[x as usize] = true;
        }
        v
    };
    let mut missing = Vec::new();
    let mut extra = Vec::new();
    for x in 0..modulus {
        let xr = BigRational::from_integer(x.into());
        let covered = balls.iter().any(|(b, _)| b.contains(&xr, ctx));
        match (in_set[x as usize], covered) {
            (true, false) => missing.push(x),
            (false, true) => extra.push(x),
            _ => {}
        }
    }
    Ok(ClusterReport {
        p: ctx.p(),
        s,
        ell,
        matches: missing.is_empty() && extra.is_empty(),
        sublevel_size: set.len(),
        balls: balls.into_iter().map(|(_, r)| r).collect(),
        missing,
        extra,
    })
}

/// Checks, for unit roots with unit differences and `1 ≤ ℓ < s`, that the
/// units `z` with `val P(z) = ℓ` are exactly the disjoint union over roots
/// with `e_j | ℓ` of `{val(z - ξ_j) = ℓ/e_j}`. Returns the offending residues.
pub fn level_set_identity(p: &FactoredPoly1D, ctx: PrimeContext, s: u32, ell: u32) -> Result<Vec<u64>> {
    if ell == 0 || ell >= s {
        return Err(Error::InvalidArgument("need 1 ≤ ℓ < s".into()));
    }
    if p.residual.is_some() {
        return Err(Error::Precondition("only products of rational linear factors".into()));
    }
    let unit = |x: &BigRational| val_p(x, ctx) == Some(0);
    let lead_unit = unit(&BigRational::from_integer(p.leading.clone()));
    let roots_unit = p.roots.iter().all(|(xi, _)| unit(xi));
    let diffs_unit = p
        .roots
        .iter()
        .enumerate()
        .all(|(i, (a, _))| p.roots[i + 1..].iter().all(|(b, _)| unit(&(a - b))));
    if !(lead_unit && roots_unit && diffs_unit) {
        return Err(Error::Precondition("roots, differences and leading coefficient must be units".into()));
    }
    let vals = valuations(p, ctx, s);
    let pp = ctx.p();
    let mut bad = Vec::new();
    for (x, v) in vals.iter().enumerate() {
        if (x as u64).is_multiple_of(pp) {
            continue;
        }
        let xr = BigRational::from_integer((x as u64).into());
        let hits = p
            .roots
            .iter()
            .filter(|(xi, e)| {
                ell.is_multiple_of(*e)
                    && val_p(&(&xr - xi), ctx).is_some_and(|w| w == (ell / e) as i64)
            })
            .count();
        let lhs = *v == ell;
        if lhs != (hits == 1) || hits > 1 {
            bad.push(x as u64);
        }
    }
    Ok(bad)
}

/// Root multiplicities as a map, for reporting.
pub fn multiplicities(p: &FactoredPoly1D) -> BTreeMap<String, u32> {
    p.roots.iter().map(|(xi, e)| (fmt_rational(xi), *e)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    #[test]
    fn parses_factored_text() {
        let p = FactoredPoly1D::parse("x^2*(x-1)").unwrap();
        assert_eq!(p.leading, BigInt::from(1));
        assert_eq!(p.roots, vec![(rat(0, 1), 2), (rat(1, 1), 1)]);
        let p = FactoredPoly1D::parse("3(2x-1)^2(x+4)").unwrap();
        assert_eq!(p.leading, BigInt::from(12));
        assert_eq!(p.roots, vec![(rat(-4, 1), 1), (rat(1, 2), 2)]);
        let p = FactoredPoly1D::parse("x^2 - 2").unwrap();
        assert!(p.roots.is_empty() && p.residual.is_some());
        assert!(FactoredPoly1D::parse("x^2 - 2*(x-1)").is_err());
        assert!(FactoredPoly1D::parse("(x-1").is_err());
    }

    #[test]
    fn radius_examples() {
        let p = FactoredPoly1D::parse("x^2*(x-1)").unwrap();
        assert_eq!(cluster_radius(&p, 0, 2, ctx(5)).unwrap().depth, 1);
        assert_eq!(cluster_radius(&p, 1, 2, ctx(5)).unwrap().depth, 2);
        let p = FactoredPoly1D::parse("x(x-5)").unwrap();
        let b = cluster_radius(&p, 0, 3, ctx(5)).unwrap();
        assert_eq!((b.radius_exp.clone(), b.depth, b.singleton), (rat(2, 1), 2, true));
        let p = FactoredPoly1D::new(BigInt::from(5), vec![(rat(0, 1), 1)]).unwrap();
        assert!(matches!(cluster_radius(&p, 0, 1, ctx(5)), Err(Error::Precondition(_))));
    }

    #[test]
    fn sublevel_examples() {
        let p = FactoredPoly1D::parse("x^2*(x-1)").unwrap();
        assert_eq!(sublevel_set(&p, ctx(5), 2, 2, 1 << 20).unwrap(), vec![0, 1, 5, 10, 15, 20]);
        assert_eq!(sublevel_set(&p, ctx(5), 2, 0, 1 << 20).unwrap().len(), 25);
        let p = FactoredPoly1D::parse("x").unwrap();
        assert_eq!(sublevel_set(&p, ctx(3), 3, 2, 1 << 20).unwrap(), vec![0, 9, 18]);
    }

    #[test]
    fn decomposition_examples() {
        let p = FactoredPoly1D::parse("x^2*(x-1)").unwrap();
        let rep = verify_cluster_decomposition(&p, ctx(5), 2, 2, 1 << 20).unwrap();
        assert!(rep.matches);
        assert_eq!((rep.sublevel_size, rep.balls.len()), (6, 2));
        let p = FactoredPoly1D::parse("(x-1)(x-2)(x-3)").unwrap();
        let rep = verify_cluster_decomposition(&p, ctx(7), 3, 3, 1 << 20).unwrap();
        assert!(rep.matches);
        assert!(rep.balls.iter().all(|b| b.depth == 3));
        let p = FactoredPoly1D::parse("x^2-2").unwrap();
        let rep = verify_cluster_decomposition(&p, ctx(5), 2, 1, 1 << 20).unwrap();
        assert!(rep.matches && rep.sublevel_size == 0 && rep.balls.is_empty());
        assert!(verify_cluster_decomposition(&p, ctx(7), 2, 1, 1 << 20).is_err());
    }

    #[test]
    fn level_sets() {
        let p = FactoredPoly1D::parse("(x-1)^2(x-2)(x+3)^3").unwrap();
        for ell in 1..4 {
            assert!(level_set_identity(&p, ctx(7), 4, ell).unwrap().is_empty());
        }
    }
}
