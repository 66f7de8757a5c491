//! Quasi-homogeneous structure of a bivariate polynomial.
//!
//! A non-monomial quasi-homogeneous `f` is brought into the form
//! `x^α y^β Q(x^r, y^t)` with `Q` homogeneous of degree `n`, where the
//! dilation weights are `κ₁ = t/m` (for `x`) and `κ₂ = r/m` (for `y`) and
//! `r ≥ t`. When the input has `κ₁ > κ₂` the variables are swapped first and
//! the swap is recorded. `Q(1, w)` is factored over ℚ into rational roots and
//! squarefree residual layers; from that the distance `d`, height `h` and the
//! 0/1 exponents `ν`, `i` follow.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::numeric::{fmt_rational, serde_bigint, serde_bigint_vec, serde_rational};
use crate::poly::BivariatePoly;
use crate::upoly::UPoly;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightVector {
    #[serde(with = "serde_rational")]
    pub kappa1: BigRational,
    #[serde(with = "serde_rational")]
    pub kappa2: BigRational,
    pub t: u32,
    pub r: u32,
    pub m: u32,
    /// Monomials admit many weights; this one is a fixed convention.
    pub monomial: bool,
}

impl WeightVector {
    fn from_kappas(kappa1: BigRational, kappa2: BigRational, point: (u32, u32), monomial: bool) -> Result<Self> {
        let ratio = &kappa1 / &kappa2;
        let t = ratio.numer().to_u32().ok_or_else(|| Error::Internal("weight ratio overflow".into()))?;
        let r = ratio.denom().to_u32().ok_or_else(|| Error::Internal("weight ratio overflow".into()))?;
        let m = t * point.0 + r * point.1;
        if kappa1 != BigRational::new(t.into(), m.into()) {
            return Err(Error::Internal(format!("weights {kappa1}, {kappa2} are not of the form t/m, r/m")));
        }
        Ok(Self { kappa1, kappa2, t, r, m, monomial })
    }

    fn swap(&self) -> Self {
        Self {
            kappa1: self.kappa2.clone(),
            kappa2: self.kappa1.clone(),
            t: self.r,
            r: self.t,
            m: self.m,
            monomial: self.monomial,
        }
    }
}

/// Solves `κ₁ j + κ₂ k = 1` over the support of `f`.
pub fn detect_weights(f: &BivariatePoly) -> Result<WeightVector> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let pts = f.support().points;
    if pts.contains(&(0, 0)) {
        return Err(Error::NotQuasiHomogeneous("nonzero constant term".into()));
    }
    if pts.len() == 1 {
        let (a, b) = pts[0];
        let (k1, k2) = match (a, b) {
            (0, b) => (BigRational::new(1.into(), b.into()), BigRational::new(1.into(), b.into())),
            (a, 0) => (BigRational::new(1.into(), a.into()), BigRational::new(1.into(), a.into())),
            (a, b) => (
                BigRational::new(1.into(), (2 * a).into()),
                BigRational::new(1.into(), (2 * b).into()),
            ),
        };
        return WeightVector::from_kappas(k1, k2, (a, b), true);
    }
    let p0 = pts[0];
    let det = |a: (u32, u32), b: (u32, u32)| a.0 as i64 * b.1 as i64 - b.0 as i64 * a.1 as i64;
    let Some(&p1) = pts.iter().find(|&&p| det(p0, p) != 0) else {
        return Err(Error::NotQuasiHomogeneous("support lies on a line through the origin".into()));
    };
    let dt = BigInt::from(det(p0, p1));
    let kappa1 = BigRational::new(BigInt::from(p1.1 as i64 - p0.1 as i64), dt.clone());
    let kappa2 = BigRational::new(BigInt::from(p0.0 as i64 - p1.0 as i64), dt);
    if !kappa1.is_positive() || !kappa2.is_positive() {
        return Err(Error::NotQuasiHomogeneous("weights are not positive".into()));
    }
    for &(j, k) in &pts {
        let lhs = &kappa1 * BigInt::from(j) + &kappa2 * BigInt::from(k);
        if !lhs.is_one() {
            return Err(Error::NotQuasiHomogeneous(format!(
                "monomial x^{j} y^{k} has weighted degree {} instead of 1",
                fmt_rational(&lhs)
            )));
        }
    }
    WeightVector::from_kappas(kappa1, kappa2, p0, false)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalRoot {
    #[serde(with = "serde_rational")]
    pub value: BigRational,
    pub multiplicity: u32,
}

/// A squarefree factor of `Q(1, w)` without rational roots, as a primitive
/// integer polynomial (low degree first). Factors of degree 2 are irreducible;
/// higher degree residuals are left unsplit and may be reducible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrrationalFactor {
    #[serde(with = "serde_bigint_vec")]
    pub poly: Vec<BigInt>,
    pub multiplicity: u32,
}

impl IrrationalFactor {
    pub fn degree(&self) -> usize {
        self.poly.len() - 1
    }

    pub fn monic(&self) -> UPoly {
        UPoly::from_bigints(&self.poly).monic()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiStructure {
    /// Leading coefficient of `Q(1, w)` (the coefficient of `y^{tn}` after
    /// dividing out `x^α y^β`).
    #[serde(with = "serde_bigint")]
    pub a: BigInt,
    pub alpha: u32,
    pub beta: u32,
    pub weights: WeightVector,
    pub swapped: bool,
    /// Coefficients of `Q(1, w)`, low degree first.
    #[serde(with = "serde_bigint_vec")]
    pub q_poly: Vec<BigInt>,
    pub rational_roots: Vec<RationalRoot>,
    pub irrational_part: Vec<IrrationalFactor>,
    pub n_total: u32,
    pub total_degree: u32,
}

impl QuasiStructure {
    pub fn is_monomial(&self) -> bool {
        self.weights.monomial
    }

    /// Multiplicities of all roots of `Q` with multiplicity (irrational
    /// layers contribute one entry per root).
    pub fn root_multiplicities(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self.rational_roots.iter().map(|r| r.multiplicity).collect();
        for f in &self.irrational_part {
            out.extend(std::iter::repeat_n(f.multiplicity, f.degree()));
        }
        out
    }

    /// `a ∏ (w - ζ)^{n} ∏ g^{e}` with monic `g`.
    pub fn factored_q(&self) -> UPoly {
        let mut acc = UPoly::constant(BigRational::from_integer(self.a.clone()));
        for root in &self.rational_roots {
            acc = acc.mul(&UPoly::linear(&root.value).pow(root.multiplicity));
        }
        for f in &self.irrational_part {
            acc = acc.mul(&f.monic().pow(f.multiplicity));
        }
        acc
    }

    /// Rebuilds `x^α y^β Q(x^r, y^t)` from the factored form, in the
    /// coordinates of the original input.
    pub fn reconstruct(&self) -> Result<BivariatePoly> {
        let q = self.factored_q();
        let (t, r, n) = (self.weights.t, self.weights.r, self.n_total);
        let mut terms = Vec::new();
        for (v, c) in q.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !c.is_integer() {
                return Err(Error::Internal(format!("non-integral coefficient {c} in reconstruction")));
            }
            let v = v as u32;
            terms.push((self.alpha + r * (n - v), self.beta + t * v, c.to_integer()));
        }
        let f = BivariatePoly::from_terms(terms);
        Ok(if self.swapped { f.swapped() } else { f })
    }
}

/// Recovers `x^α y^β Q(x^r, y^t)` and factors `Q(1, w)` over ℚ.
pub fn canonical_form(f: &BivariatePoly) -> Result<QuasiStructure> {
    let mut weights = detect_weights(f)?;
    let mut g = f.clone();
    let mut swapped = false;
    if weights.t > weights.r {
        g = g.swapped();
        weights = weights.swap();
        swapped = true;
    }
    let pts = g.support().points;
    let alpha = pts.iter().map(|p| p.0).min().expect("nonzero");
    let beta = pts.iter().map(|p| p.1).min().expect("nonzero");
    let (t, r) = (weights.t, weights.r);

    let (n_total, q_poly) = if weights.monomial {
        (0, vec![g.terms().next().expect("nonzero").1.clone()])
    } else {
        let weighted = weights.m - t * alpha - r * beta;
        if weighted % (t * r) != 0 {
            return Err(Error::Internal("reduced support is not on the expected lattice".into()));
        }
        let n = weighted / (t * r);
        let mut coeffs = vec![BigInt::zero(); n as usize + 1];
        for ((j, k), c) in g.terms() {
            let (jj, kk) = (j - alpha, k - beta);
            if jj % r != 0 || kk % t != 0 {
                return Err(Error::Internal(format!("monomial x^{j} y^{k} off the (r, t) lattice")));
            }
            coeffs[(kk / t) as usize] = c.clone();
        }
        (n, coeffs)
    };
    let a = q_poly.last().cloned().expect("nonempty");
    if q_poly[0].is_zero() || a.is_zero() {
        return Err(Error::Internal("Q(1, w) has a vanishing extreme coefficient".into()));
    }

    let mut rational_roots = Vec::new();
    let mut irrational_part = Vec::new();
    let q = UPoly::from_bigints(&q_poly);
    for (layer, mult) in q.squarefree() {
        let mut residual = layer;
        for root in residual.rational_roots() {
            rational_roots.push(RationalRoot { value: root.clone(), multiplicity: mult });
            residual = residual.div_rem(&UPoly::linear(&root)).0;
        }
        if residual.degree().unwrap_or(0) > 0 {
            irrational_part.push(IrrationalFactor {
                poly: residual.primitive_part().1,
                multiplicity: mult,
            });
        }
    }
    rational_roots.sort_by(|x, y| x.value.cmp(&y.value));

    let qs = QuasiStructure {
        a,
        alpha,
        beta,
        weights,
        swapped,
        q_poly,
        rational_roots,
        irrational_part,
        n_total,
        total_degree: f.total_degree(),
    };
    let back = qs.reconstruct()?;
    if &back != f {
        return Err(Error::Internal(format!("reconstruction mismatch: {back} != {f}")));
    }
    Ok(qs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Classification {
    Linear,
    Monomial(u32, u32),
    Regular,
    Exceptional(u32),
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Linear => f.write_str("Linear"),
            Self::Monomial(a, b) => write!(f, "Monomial({a},{b})"),
            Self::Regular => f.write_str("Regular"),
            Self::Exceptional(m) => write!(f, "Exceptional({m})"),
        }
    }
}

impl FromStr for Classification {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let args = |inner: &str| -> std::result::Result<Vec<u32>, String> {
            inner
                .split(',')
                .map(|x| x.trim().parse::<u32>().map_err(|e| e.to_string()))
                .collect()
        };
        match s {
            "Linear" => Ok(Self::Linear),
            "Regular" => Ok(Self::Regular),
            _ => {
                let (head, rest) = s.split_once('(').ok_or_else(|| format!("unknown classification {s:?}"))?;
                let inner = rest.strip_suffix(')').ok_or_else(|| format!("unknown classification {s:?}"))?;
                match (head, args(inner)?.as_slice()) {
                    ("Monomial", [a, b]) => Ok(Self::Monomial(*a, *b)),
                    ("Exceptional", [m]) => Ok(Self::Exceptional(*m)),
                    _ => Err(format!("unknown classification {s:?}")),
                }
            }
        }
    }
}

impl From<Classification> for String {
    fn from(c: Classification) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for Classification {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentReport {
    #[serde(with = "serde_rational")]
    pub d: BigRational,
    pub m_q: u32,
    #[serde(with = "serde_rational")]
    pub h: BigRational,
    pub nu: u8,
    pub i: u8,
    pub subseq_n: u64,
    pub subseq_m1: u64,
    pub subseq_m2: u64,
    pub subseq_p: u64,
    pub classification: Classification,
    /// Set for exceptional classes: `nu`/`i` above are the prime-independent
    /// defaults and must be replaced per prime.
    pub p_dependent: bool,
}

impl ExponentReport {
    pub fn subseq_modulus(&self) -> u64 {
        self.subseq_n * self.subseq_m1 * self.subseq_m2 * self.subseq_p
    }
}

fn gcd_conv(a: u64, b: u64) -> u64 {
    match (a, b) {
        (0, 0) => 1,
        _ => a.gcd(&b),
    }
}

/// Exceptional class `E_m`: `Q(1, w) = c·g(w)^m` with `g` an irreducible
/// quadratic, `α = β = 0` and `t = r = 1`.
pub fn exceptional_order(qs: &QuasiStructure) -> Option<u32> {
    let w = &qs.weights;
    if qs.alpha != 0 || qs.beta != 0 || w.t != 1 || w.r != 1 || !qs.rational_roots.is_empty() {
        return None;
    }
    match qs.irrational_part.as_slice() {
        [g] if g.degree() == 2 => Some(g.multiplicity),
        _ => None,
    }
}

pub fn exponents(qs: &QuasiStructure) -> ExponentReport {
    let (alpha, beta) = (qs.alpha, qs.beta);
    let linear = qs.total_degree == 1;
    if qs.is_monomial() {
        let top = alpha.max(beta);
        let nu = u8::from(alpha == beta);
        let i = u8::from(alpha == beta && alpha >= 2);
        return ExponentReport {
            d: BigRational::from_integer(top.into()),
            m_q: top,
            h: BigRational::from_integer(top.into()),
            nu,
            i,
            subseq_n: top as u64,
            subseq_m1: 1,
            subseq_m2: 1,
            subseq_p: 1,
            classification: if linear { Classification::Linear } else { Classification::Monomial(alpha, beta) },
            p_dependent: false,
        };
    }
    let (t, r, n) = (qs.weights.t as u64, qs.weights.r as u64, qs.n_total as u64);
    let (a64, b64) = (alpha as u64, beta as u64);
    let numer = t * a64 + r * b64 + t * r * n;
    let d = BigRational::new(numer.into(), (t + r).into());
    let m_q = qs
        .rational_roots
        .iter()
        .map(|z| z.multiplicity)
        .chain([alpha, beta])
        .max()
        .unwrap_or(0);
    let mq = BigRational::from_integer(m_q.into());
    let h = if mq > d { mq.clone() } else { d.clone() };
    let nu = u8::from(mq == d);
    // At the boundary h = 2 the general rule i = ν applies.
    let two = BigRational::from_integer(2.into());
    let i = if h >= two { nu } else { 0 };
    let subseq_p = qs.root_multiplicities().iter().map(|&e| e as u64).product();
    let exceptional = exceptional_order(qs);
    let classification = match exceptional {
        _ if linear => Classification::Linear,
        Some(m) => Classification::Exceptional(m),
        None => Classification::Regular,
    };
    ExponentReport {
        d,
        m_q,
        h,
        nu,
        i,
        subseq_n: numer,
        subseq_m1: gcd_conv(b64, a64 + r * n),
        subseq_m2: gcd_conv(a64, b64 + t * n),
        subseq_p,
        classification,
        p_dependent: exceptional.is_some(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Executable form of the structural facts relating root multiplicities to
/// the homogeneous distance. Every item must pass for a correct analysis.
pub fn lemma_im2_audit(qs: &QuasiStructure) -> Result<Vec<AuditItem>> {
    if qs.is_monomial() {
        return Err(Error::Monomial);
    }
    let rep = exponents(qs);
    let d = &rep.d;
    let big = |x: u32| BigRational::from_integer(x.into());
    let mut all: Vec<(String, u32)> = vec![("alpha".into(), qs.alpha), ("beta".into(), qs.beta)];
    for z in &qs.rational_roots {
        all.push((format!("root {}", fmt_rational(&z.value)), z.multiplicity));
    }
    for g in &qs.irrational_part {
        for _ in 0..g.degree() {
            all.push((format!("root of {}", UPoly::from_bigints(&g.poly)), g.multiplicity));
        }
    }
    let mut out = Vec::new();

    let above: Vec<&(String, u32)> = all.iter().filter(|(_, e)| big(*e) > *d).collect();
    let (passed, detail) = match above.as_slice() {
        [] => (true, "no multiplicity exceeds d".to_string()),
        [(name, e)] => {
            let rest_ok = all
                .iter()
                .filter(|(nm, _)| nm != name)
                .all(|(_, x)| big(*x) < *d);
            // Duplicate names (conjugate roots) are counted by the filter above as well.
            let dup = all.iter().filter(|(nm, _)| nm == name).count() > 1;
            (rest_ok && !dup, format!("{name} has multiplicity {e} > d; others below d: {rest_ok}"))
        }
        _ => (false, format!("{} multiplicities exceed d", above.len())),
    };
    out.push(AuditItem { name: "unique-dominant-multiplicity".into(), passed, detail });

    let t = qs.weights.t;
    let (passed, detail) = if t >= 2 {
        (big(qs.n_total) < *d, format!("t = {t}, n = {}, d = {}", qs.n_total, fmt_rational(d)))
    } else {
        (true, "t = 1, not applicable".into())
    };
    out.push(AuditItem { name: "root-count-below-distance".into(), passed, detail });

    let irr_max = qs.irrational_part.iter().map(|g| g.multiplicity).max();
    let passed = irr_max.is_none_or(|e| big(e) <= *d);
    out.push(AuditItem {
        name: "irrational-multiplicity-bounded".into(),
        passed,
        detail: format!("max irrational multiplicity {irr_max:?}, d = {}", fmt_rational(d)),
    });

    let equal = qs.irrational_part.iter().any(|g| big(g.multiplicity) == *d);
    let passed = !equal || matches!(rep.classification, Classification::Exceptional(_));
    out.push(AuditItem {
        name: "equality-forces-exceptional".into(),
        passed,
        detail: format!("irrational multiplicity equals d: {equal}; classification {}", rep.classification),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn p(s: &str) -> BivariatePoly {
        BivariatePoly::parse(s).unwrap()
    }

    #[test]
    fn weights_of_examples() {
        let w = detect_weights(&p("y^4 - 2*x^6")).unwrap();
        assert_eq!((w.kappa1.clone(), w.kappa2.clone()), (rat(1, 6), rat(1, 4)));
        assert_eq!((w.t, w.r, w.m), (2, 3, 12));
        let w = detect_weights(&p("y^2 - x^3")).unwrap();
        assert_eq!((w.t, w.r, w.m), (2, 3, 6));
        assert!(matches!(detect_weights(&p("x^2 + y^3 + 1")), Err(Error::NotQuasiHomogeneous(_))));
        assert!(matches!(detect_weights(&p("x^2 + y^3 + x*y")), Err(Error::NotQuasiHomogeneous(_))));
        assert!(matches!(detect_weights(&p("x*y + x^2*y^2")), Err(Error::NotQuasiHomogeneous(_))));
        let w = detect_weights(&p("x^2*y^3")).unwrap();
        assert!(w.monomial);
        assert_eq!((w.kappa1, w.kappa2), (rat(1, 4), rat(1, 6)));
    }

    #[test]
    fn canonical_forms() {
        let qs = canonical_form(&p("y^4 - 2*x^6")).unwrap();
        assert_eq!((qs.alpha, qs.beta, qs.n_total), (0, 0, 2));
        assert!(qs.rational_roots.is_empty());
        assert_eq!(qs.irrational_part.len(), 1);
        assert_eq!(qs.irrational_part[0].poly, vec![BigInt::from(-2), BigInt::from(0), BigInt::from(1)]);

        let qs = canonical_form(&p("y^2*x - 2*x^2*y + x^3")).unwrap();
        assert_eq!((qs.alpha, qs.beta), (1, 0));
        assert_eq!((qs.weights.t, qs.weights.r), (1, 1));
        assert_eq!(qs.rational_roots, vec![RationalRoot { value: rat(1, 1), multiplicity: 2 }]);

        let qs = canonical_form(&p("y^4 - 4*x^2*y^2 + 4*x^4")).unwrap();
        assert_eq!(qs.irrational_part[0].multiplicity, 2);
        assert_eq!(exponents(&qs).classification, Classification::Exceptional(2));
    }

    #[test]
    fn swap_is_recorded() {
        // x^4 - 2y^6: x carries the larger weight, so the variables are exchanged.
        let qs = canonical_form(&p("x^4 - 2*y^6")).unwrap();
        assert!(qs.swapped);
        assert_eq!((qs.weights.t, qs.weights.r), (2, 3));
        assert_eq!(exponents(&qs).d, rat(12, 5));
    }

    #[test]
    fn exponent_examples() {
        let e = exponents(&canonical_form(&p("y^4 - 2*x^6")).unwrap());
        assert_eq!((e.d.clone(), e.m_q, e.h.clone(), e.nu, e.i), (rat(12, 5), 0, rat(12, 5), 0, 0));
        assert_eq!(e.classification, Classification::Regular);

        let e = exponents(&canonical_form(&p("x*y")).unwrap());
        assert_eq!(e.classification, Classification::Monomial(1, 1));
        assert_eq!((e.h.clone(), e.nu, e.i), (rat(1, 1), 1, 0));

        let e = exponents(&canonical_form(&p("x^2*y^2")).unwrap());
        assert_eq!((e.nu, e.i), (1, 1));

        let e = exponents(&canonical_form(&p("y^4 - 4*x^2*y^2 + 4*x^4")).unwrap());
        assert_eq!((e.d.clone(), e.h.clone(), e.m_q), (rat(2, 1), rat(2, 1), 0));
        assert!(e.p_dependent);

        for lin in ["x", "3*y", "x + 2*y"] {
            let e = exponents(&canonical_form(&p(lin)).unwrap());
            assert_eq!(e.classification, Classification::Linear, "{lin}");
            assert_eq!((e.h.clone(), e.nu, e.i), (rat(1, 1), 0, 0), "{lin}");
        }

        // y^2 - x^3: N = 6, M1 = gcd(0, 3) = 3, M2 = gcd(0, 2) = 2.
        let e = exponents(&canonical_form(&p("y^2 - x^3")).unwrap());
        assert_eq!((e.subseq_n, e.subseq_m1, e.subseq_m2, e.subseq_p), (6, 3, 2, 1));
        assert_eq!(e.d, rat(6, 5));

        // (y - x)^3: rational root of multiplicity 3 dominates d = 3/2.
        let e = exponents(&canonical_form(&p("y^3 - 3*x*y^2 + 3*x^2*y - x^3")).unwrap());
        assert_eq!((e.m_q, e.h.clone(), e.nu, e.i, e.subseq_p), (3, rat(3, 1), 0, 0, 3));
    }

    #[test]
    fn classification_text_roundtrip() {
        for c in [
            Classification::Linear,
            Classification::Regular,
            Classification::Monomial(2, 3),
            Classification::Exceptional(4),
        ] {
            assert_eq!(c.to_string().parse::<Classification>().unwrap(), c);
        }
        let e = exponents(&canonical_form(&p("y^4 - 2*x^6")).unwrap());
        let json = serde_json::to_value(&e).unwrap();
        assert_eq!(json["h"], "12/5");
        assert_eq!(json["nu"], 0);
        assert_eq!(serde_json::from_value::<ExponentReport>(json).unwrap(), e);
    }

    #[test]
    fn audit_examples() {
        for s in ["y^4 - 2*x^6", "y^4 - 4*x^2*y^2 + 4*x^4", "y^2*x - 2*x^2*y + x^3"] {
            let items = lemma_im2_audit(&canonical_form(&p(s)).unwrap()).unwrap();
            assert!(items.iter().all(|i| i.passed), "{s}: {items:?}");
        }
        assert_eq!(lemma_im2_audit(&canonical_form(&p("x*y")).unwrap()), Err(Error::Monomial));
    }
}
