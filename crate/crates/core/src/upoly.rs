//! Dense univariate polynomials over ℚ with the handful of algorithms the
//! structure analysis needs: Yun's squarefree decomposition, rational root
//! extraction, resultants and discriminants.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::numeric::divisors;

/// Coefficients stored low degree first; no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct UPoly {
    coeffs: Vec<BigRational>,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl UPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints<I: IntoIterator<Item = i64>>(coeffs: I) -> Self {
        Self::new(coeffs.into_iter().map(q).collect())
    }

    pub fn from_bigints(coeffs: &[BigInt]) -> Self {
        Self::new(coeffs.iter().cloned().map(BigRational::from_integer).collect())
    }

    /// `w - root`.
    pub fn linear(root: &BigRational) -> Self {
        Self::new(vec![-root.clone(), BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * q(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead = divisor.lead();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] / &lead;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] -= &c * d;
                }
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let l = self.lead();
        self.scale(&(BigRational::one() / l))
    }

    /// Monic gcd (zero when both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Splits into `content * primitive` with the primitive part having
    /// coprime integer coefficients and a positive leading coefficient.
    pub fn primitive_part(&self) -> (BigRational, Vec<BigInt>) {
        if self.is_zero() {
            return (BigRational::zero(), Vec::new());
        }
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        let mut g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if ints.last().expect("nonzero").is_negative() {
            g = -g;
        }
        let prim: Vec<BigInt> = ints.iter().map(|c| c / &g).collect();
        (BigRational::new(g, den), prim)
    }

    /// Squarefree decomposition (Yun): returns monic, pairwise coprime,
    /// squarefree factors `g_i` with multiplicities so that
    /// `self = lead * ∏ g_i^{m_i}`. Constant factors are omitted.
    pub fn squarefree(&self) -> Vec<(UPoly, u32)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let g = f.gcd(&df);
        let mut b = f.div_rem(&g).0;
        let mut c = df.div_rem(&g).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1u32;
        loop {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_rem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// Distinct rational roots, ascending.
    pub fn rational_roots(&self) -> Vec<BigRational> {
        let mut roots = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return roots;
        }
        let (_, prim) = self.primitive_part();
        // Strip factors of w so the constant term is nonzero.
        let shift = prim.iter().take_while(|c| c.is_zero()).count();
        if shift > 0 {
            roots.push(BigRational::zero());
        }
        let prim = &prim[shift..];
        if prim.len() > 1 {
            let p = UPoly::from_bigints(prim);
            for num in divisors(&prim[0]) {
                for den in divisors(prim.last().expect("nonempty")) {
                    for sign in [1i64, -1] {
                        let cand = BigRational::new(&num * sign, den.clone());
                        if p.eval(&cand).is_zero() && !roots.contains(&cand) {
                            roots.push(cand);
                        }
                    }
                }
            }
        }
        roots.sort();
        roots
    }

    /// Resultant via the Sylvester determinant.
    pub fn resultant(&self, other: &Self) -> BigRational {
        let (Some(m), Some(n)) = (self.degree(), other.degree()) else {
            return BigRational::zero();
        };
        if m == 0 && n == 0 {
            return BigRational::one();
        }
        let size = m + n;
        let mut mat = vec![vec![BigRational::zero(); size]; size];
        for row in 0..n {
            for (i, c) in self.coeffs.iter().rev().enumerate() {
                mat[row][row + i] = c.clone();
            }
        }
        for row in 0..m {
            for (i, c) in other.coeffs.iter().rev().enumerate() {
                mat[n + row][row + i] = c.clone();
            }
        }
        determinant(mat)
    }

    pub fn discriminant(&self) -> BigRational {
        let n = self.degree().expect("nonzero polynomial");
        if n == 0 {
            return BigRational::one();
        }
        let res = self.resultant(&self.derivative());
        let sign = if (n * (n - 1) / 2).is_multiple_of(2) { q(1) } else { q(-1) };
        sign * res / self.lead()
    }
}

fn determinant(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let pv = m[col][col].clone();
        det *= &pv;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &pv;
            let (top, bottom) = m.split_at_mut(r);
            for (dst, src) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *dst -= &factor * src;
            }
        }
    }
    det
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let mag = c.abs();
            let mag_s = crate::numeric::fmt_rational(&mag);
            match (i, mag.is_one()) {
                (0, _) => f.write_str(&mag_s)?,
                (1, true) => f.write_str("w")?,
                (1, false) => write!(f, "{mag_s}*w")?,
                (_, true) => write!(f, "w^{i}")?,
                (_, false) => write!(f, "{mag_s}*w^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    #[test]
    fn division_and_gcd() {
        let f = UPoly::from_ints([-1, 0, 1]); // w^2 - 1
        let g = UPoly::from_ints([1, 1]); // w + 1
        let (qq, r) = f.div_rem(&g);
        assert_eq!(qq, UPoly::from_ints([-1, 1]));
        assert!(r.is_zero());
        assert_eq!(f.gcd(&UPoly::from_ints([1, 2, 1])), g);
    }

    #[test]
    fn yun_recovers_multiplicities() {
        // (w - 1)^3 (w^2 - 2)^2 (w + 3)
        let f = UPoly::from_ints([-1, 1])
            .pow(3)
            .mul(&UPoly::from_ints([-2, 0, 1]).pow(2))
            .mul(&UPoly::from_ints([3, 1]))
            .scale(&rat(5, 1));
        let sf = f.squarefree();
        assert_eq!(sf.len(), 3);
        assert_eq!(sf[0], (UPoly::from_ints([3, 1]), 1));
        assert_eq!(sf[1], (UPoly::from_ints([-2, 0, 1]), 2));
        assert_eq!(sf[2], (UPoly::from_ints([-1, 1]), 3));
    }

    #[test]
    fn rational_roots_found() {
        let f = UPoly::from_ints([6, -5, -2, 1]).mul(&UPoly::from_ints([1, -3])); // (w-1)(w+2)(w-3)(1-3w)
        assert_eq!(f.rational_roots(), vec![rat(-2, 1), rat(1, 3), rat(1, 1), rat(3, 1)]);
        assert!(UPoly::from_ints([-2, 0, 1]).rational_roots().is_empty());
        assert_eq!(UPoly::from_ints([0, 0, 1]).rational_roots(), vec![rat(0, 1)]);
    }

    #[test]
    fn discriminants() {
        assert_eq!(UPoly::from_ints([-2, 0, 1]).discriminant(), rat(8, 1));
        assert_eq!(UPoly::from_ints([1, 1, 1]).discriminant(), rat(-3, 1));
        // w^3 - 2: disc = -27 * 4 = -108
        assert_eq!(UPoly::from_ints([-2, 0, 0, 1]).discriminant(), rat(-108, 1));
        // res(w - a, g) = g(a)
        let g = UPoly::from_ints([-2, 0, 1]);
        assert_eq!(UPoly::linear(&rat(3, 1)).resultant(&g), rat(7, 1));
    }

    #[test]
    fn primitive_part_normalizes_sign() {
        let f = UPoly::new(vec![rat(1, 2), rat(-3, 4)]);
        let (c, p) = f.primitive_part();
        assert_eq!(p, vec![BigInt::from(-2), BigInt::from(3)]);
        assert_eq!(c, rat(-1, 4));
    }
}
