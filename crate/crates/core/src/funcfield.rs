//! Counts and additive character sums over `𝔽_p[T]/(π^s)`.
//!
//! Residues are polynomials of degree `< fdeg·s` over `𝔽_p`, indexed by
//! `Σ a_i p^i`. The polynomial `f` has integer coefficients read in `𝔽_p`.

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::check_budget;
use crate::exhaustive::{par_chunks, Limits, SumEstimate};
use crate::numeric::{is_prime, pow_u64};
use crate::poly::{parse_terms, BivariatePoly};
use crate::{Error, Result};

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

/// Remainder of `a` modulo a monic `b`.
fn fp_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    while r.len() > db {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        for (l, bl) in b.iter().enumerate() {
            r[shift + l] = (r[shift + l] + (p - c) * bl) % p;
        }
        r = trim(r);
    }
    r
}

fn is_irreducible(pi: &[u64], p: u64) -> bool {
    let deg = pi.len() - 1;
    for d in 1..=deg / 2 {
        // Monic divisors of degree d: lower coefficients run over 𝔽_p^d.
        for idx in 0..pow_u64(p, d as u32) {
            let mut g: Vec<u64> = (0..d).map(|i| idx / pow_u64(p, i as u32) % p).collect();
            g.push(1);
            if fp_rem(pi, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// The residue ring `𝔽_p[T]/(π^s)` with `π` monic irreducible of degree `fdeg`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FFModulus {
    pub p: u64,
    /// Coefficients of `π`, lowest degree first.
    pub pi: Vec<u64>,
    pub s: u32,
    pub fdeg: u32,
    /// Residue field size `p^fdeg`.
    pub q: u64,
    /// Coefficients of `π^s`, lowest degree first.
    #[serde(skip)]
    pi_s: Vec<u64>,
}

impl FFModulus {
    pub fn new(p: u64, pi: &[u64], s: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if s == 0 {
            return Err(Error::InvalidArgument("s must be positive".into()));
        }
        let pi = trim(pi.iter().map(|c| c % p).collect());
        if pi.len() < 2 {
            return Err(Error::InvalidArgument("π must have positive degree".into()));
        }
        if *pi.last().unwrap() != 1 {
            return Err(Error::InvalidArgument("π must be monic".into()));
        }
        if !is_irreducible(&pi, p) {
            return Err(Error::InvalidArgument(format!("π is reducible over F_{p}")));
        }
        let fdeg = (pi.len() - 1) as u32;
        let mut pi_s = vec![1u64];
        for _ in 0..s {
            pi_s = fp_mul(&pi_s, &pi, p);
        }
        Ok(Self { p, q: pow_u64(p, fdeg), pi, s, fdeg, pi_s })
    }

    /// Parses `π` from text in `T` (`"T^2+1"`) or from a comma-separated
    /// coefficient list, lowest degree first (`"1,0,1"`).
    pub fn parse_pi(text: &str, p: u64) -> Result<Vec<u64>> {
        if text.contains(',') || text.trim().chars().all(|c| c.is_ascii_digit()) {
            return text
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<i64>()
                        .map(|v| v.rem_euclid(p as i64) as u64)
                        .map_err(|_| Error::InvalidArgument(format!("bad coefficient {c:?}")))
                })
                .collect();
        }
        let terms = parse_terms(text, &['T'])?;
        let deg = terms.keys().map(|e| e[0] as usize).max().unwrap_or(0);
        let mut out = vec![0u64; deg + 1];
        for (e, c) in terms {
            out[e[0] as usize] = crate::numeric::reduce_mod(&c, p);
        }
        Ok(out)
    }

    /// Length of the coefficient vector of a residue.
    pub fn width(&self) -> usize {
        (self.fdeg * self.s) as usize
    }

    /// Number of residues `q^s`.
    pub fn size(&self) -> u64 {
        pow_u64(self.p, self.fdeg * self.s)
    }

    fn decode(&self, mut idx: u64) -> Vec<u64> {
        (0..self.width())
            .map(|_| {
                let d = idx % self.p;
                idx /= self.p;
                d
            })
            .collect()
    }

    fn encode(&self, a: &[u64]) -> u64 {
        a.iter().rev().fold(0, |acc, d| acc * self.p + d)
    }

    /// Reduces a raw convolution (entries already `< p`) modulo `π^s`.
    fn reduce(&self, acc: &mut Vec<u64>) {
        let w = self.width();
        let p = self.p;
        for i in (w..acc.len()).rev() {
            let c = acc[i] % p;
            acc[i] = 0;
            if c == 0 {
                continue;
            }
            for l in 0..w {
                acc[i - w + l] = (acc[i - w + l] + (p - c) * self.pi_s[l]) % p;
            }
        }
        acc.truncate(w);
        for a in acc.iter_mut() {
            *a %= p;
        }
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut acc = vec![0u64; 2 * self.width() - 1];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                acc[i + j] = (acc[i + j] + x * y) % self.p;
            }
        }
        self.reduce(&mut acc);
        acc
    }
}

/// `χ(g) = exp(2πi·g_c/p)` where `g_c` is the coefficient of `T^c` in `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FFCharacter {
    pub functional_index: u32,
}

impl FFCharacter {
    /// Accepts `c` only if `χ` is nontrivial on `π^{s-1}·𝔬/π^s`.
    pub fn new(functional_index: u32, m: &FFModulus) -> Result<Self> {
        let c = functional_index as usize;
        if c >= m.width() {
            return Err(Error::InvalidArgument(format!("functional index {c} ≥ {}", m.width())));
        }
        let mut lower = vec![1u64];
        for _ in 1..m.s {
            lower = fp_mul(&lower, &m.pi, m.p);
        }
        let primitive = (1..m.q).any(|u| {
            let unit: Vec<u64> = (0..m.fdeg).map(|i| u / pow_u64(m.p, i) % m.p).collect();
            fp_mul(&lower, &trim(unit), m.p).get(c).is_some_and(|&v| v != 0)
        });
        if !primitive {
            return Err(Error::InvalidArgument(format!("character at index {c} is not primitive")));
        }
        Ok(Self { functional_index })
    }

    pub fn all_primitive(m: &FFModulus) -> Vec<Self> {
        (0..m.width() as u32).filter_map(|c| Self::new(c, m).ok()).collect()
    }
}

/// Value counts of `f` over all pairs of residues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FFHistogram {
    pub modulus: FFModulus,
    /// `counts[v]` for residue index `v`.
    pub counts: Vec<u64>,
}

pub fn ff_histogram(f: &BivariatePoly, m: &FFModulus, limits: &Limits) -> Result<FFHistogram> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let deg = f.total_degree() as u64;
    if m.p <= deg {
        return Err(Error::Precondition(format!(
            "characteristic {} must exceed deg f = {deg}",
            m.p
        )));
    }
    let size = m.size();
    check_budget(m.p, 2 * m.width() as u32, limits.budget)?;
    let terms = f.reduced_terms(m.p);
    if terms.is_empty() {
        return Err(Error::InvalidArgument("f vanishes modulo p".into()));
    }
    let dx = terms.iter().map(|t| t.0).max().unwrap_or(0) as usize;
    let dy = terms.iter().map(|t| t.1).max().unwrap_or(0) as usize;
    let one = {
        let mut e = vec![0u64; m.width()];
        e[0] = 1;
        e
    };
    let powers = |idx: u64, top: usize| -> Vec<Vec<u64>> {
        let base = m.decode(idx);
        let mut out = vec![one.clone()];
        for _ in 0..top {
            let next = m.mul(out.last().unwrap(), &base);
            out.push(next);
        }
        out
    };
    let ypow: Vec<Vec<Vec<u64>>> = (0..size).map(|y| powers(y, dy)).collect();
    let w = m.width();
    let parts = par_chunks(size, limits.workers, limits.workers.max(1) * 4, |range| {
        let mut hist = vec![0u64; size as usize];
        let mut acc = vec![0u64; 2 * w - 1];
        for x in range {
            let xp = powers(x, dx);
            // Coefficient of y^k as a residue: Σ_j c_jk x^j.
            let mut by_k = vec![vec![0u64; w]; dy + 1];
            for &(j, k, c) in &terms {
                for (slot, v) in by_k[k as usize].iter_mut().zip(&xp[j as usize]) {
                    *slot = (*slot + c * v) % m.p;
                }
            }
            for yp in &ypow {
                acc.iter_mut().for_each(|a| *a = 0);
                for (g, yk) in by_k.iter().zip(yp) {
                    for (i, gi) in g.iter().enumerate() {
                        if *gi == 0 {
                            continue;
                        }
                        for (j, yj) in yk.iter().enumerate() {
                            acc[i + j] = (acc[i + j] + gi * yj) % m.p;
                        }
                    }
                }
                let mut v = acc.clone();
                m.reduce(&mut v);
                hist[m.encode(&v) as usize] += 1;
            }
        }
        hist
    });
    let mut counts = vec![0u64; size as usize];
    for part in parts {
        for (c, v) in counts.iter_mut().zip(part) {
            *c += v;
        }
    }
    Ok(FFHistogram { modulus: m.clone(), counts })
}

/// `N(f; π^s) = q^{-2s} #{f ≡ 0}`.
pub fn ff_count(f: &BivariatePoly, m: &FFModulus, limits: &Limits) -> Result<BigRational> {
    let h = ff_histogram(f, m, limits)?;
    let total = BigInt::from(m.size()) * BigInt::from(m.size());
    Ok(BigRational::new(BigInt::from(h.counts[0]), total))
}

pub fn ff_sum_from_histogram(h: &FFHistogram, chi: &FFCharacter) -> SumEstimate {
    let m = &h.modulus;
    let c = chi.functional_index as usize;
    let mut by_coef = vec![0u64; m.p as usize];
    for (v, n) in h.counts.iter().enumerate() {
        by_coef[m.decode(v as u64)[c] as usize] += n;
    }
    // Σ_a n_a ω^a over a primitive p-th root ω vanishes iff all n_a agree.
    let exact_zero = by_coef.iter().all(|&n| n == by_coef[0]);
    let norm = (m.size() as f64).powi(2);
    let (mut re, mut im) = (0.0, 0.0);
    for (a, n) in by_coef.iter().enumerate() {
        let angle = TAU * a as f64 / m.p as f64;
        re += *n as f64 * angle.cos();
        im += *n as f64 * angle.sin();
    }
    let (real, imag) = if exact_zero { (0.0, 0.0) } else { (re / norm, im / norm) };
    SumEstimate {
        real,
        imag,
        magnitude: real.hypot(imag),
        exact_count_zero: h.counts[0],
        modulus: m.size(),
        exact_zero,
    }
}

/// `S_χ(f; π^s) = q^{-2s} Σ χ(f(x, y))`.
pub fn ff_char_sum(f: &BivariatePoly, m: &FFModulus, chi: &FFCharacter, limits: &Limits) -> Result<SumEstimate> {
    Ok(ff_sum_from_histogram(&ff_histogram(f, m, limits)?, chi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn poly(s: &str) -> BivariatePoly {
        BivariatePoly::parse(s).unwrap()
    }

    fn top(m: &FFModulus) -> FFCharacter {
        FFCharacter::new(m.width() as u32 - 1, m).unwrap()
    }

    #[test]
    fn modulus_checks() {
        assert!(FFModulus::new(3, &[1, 0, 1], 1).is_ok());
        assert!(FFModulus::new(5, &[1, 0, 1], 1).is_err());
        assert!(FFModulus::new(3, &[0, 2], 1).is_err());
        assert!(FFModulus::new(4, &[0, 1], 1).is_err());
        assert_eq!(FFModulus::parse_pi("T^2+1", 3).unwrap(), vec![1, 0, 1]);
        assert_eq!(FFModulus::parse_pi("1,0,1", 3).unwrap(), vec![1, 0, 1]);
        assert_eq!(FFModulus::parse_pi("T", 3).unwrap(), vec![0, 1]);
    }

    #[test]
    fn ring_arithmetic() {
        let m = FFModulus::new(3, &[1, 0, 1], 2).unwrap();
        // T^2 ≡ -1 mod π, so (T^2+1)·(T^2+1) ≡ 0 mod π^2.
        let a = m.decode(m.encode(&[1, 0, 1, 0]));
        assert!(m.mul(&a, &a).iter().all(|&c| c == 0));
    }

    #[test]
    fn primitivity() {
        let m = FFModulus::new(3, &[0, 1], 2).unwrap();
        assert!(FFCharacter::new(0, &m).is_err());
        assert!(FFCharacter::new(1, &m).is_ok());
        let m = FFModulus::new(3, &[1, 0, 1], 2).unwrap();
        let all = FFCharacter::all_primitive(&m);
        assert_eq!(all.iter().map(|c| c.functional_index).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn closed_forms() {
        let lim = Limits::default();
        let m = FFModulus::new(3, &[0, 1], 1).unwrap();
        assert_eq!(ff_count(&poly("x*y"), &m, &lim).unwrap(), rat(5, 9));
        let m5 = FFModulus::new(5, &[0, 1], 2).unwrap();
        assert_eq!(ff_count(&poly("x"), &m5, &lim).unwrap(), rat(1, 25));
        let m = FFModulus::new(3, &[0, 1], 2).unwrap();
        assert!((ff_char_sum(&poly("x*y"), &m, &top(&m), &lim).unwrap().magnitude - 1.0 / 9.0).abs() < 1e-12);
        let m = FFModulus::new(3, &[0, 1], 1).unwrap();
        assert!(ff_char_sum(&poly("x"), &m, &top(&m), &lim).unwrap().magnitude < 1e-12);
        let f = poly("y^3 - 3*x^2*y + 2*x^3");
        assert!((ff_char_sum(&f, &m5, &top(&m5), &lim).unwrap().magnitude - 0.2).abs() < 1e-12);
        let bad = FFModulus::new(3, &[0, 1], 1).unwrap();
        assert!(matches!(ff_count(&poly("x^3"), &bad, &lim), Err(Error::Precondition(_))));
    }

    #[test]
    fn residual_degree_two() {
        let lim = Limits::default();
        let m = FFModulus::new(3, &[1, 0, 1], 2).unwrap();
        let q = 9.0f64;
        let h = ff_histogram(&poly("x*y"), &m, &lim).unwrap();
        for chi in FFCharacter::all_primitive(&m) {
            assert!((ff_sum_from_histogram(&h, &chi).magnitude - q.powi(-2)).abs() < 1e-12);
        }
        // (1 - 1/q)·s·q^{-s} + q^{-s} at q = 9, s = 2.
        assert_eq!(ff_count(&poly("x*y"), &m, &lim).unwrap(), rat(8 * 2 + 9, 729));
    }
}
