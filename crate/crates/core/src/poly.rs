//! Sparse bivariate integer polynomials: parsing, canonical rendering,
//! modular evaluation and Newton-polyhedron data.
//!
//! The accepted grammar is a sum of signed monomials in `x` and `y`, e.g.
//! `y^4 - 2*x^6` or `3xy^2 + x`. Multiplication signs are optional and
//! whitespace is ignored. Parenthesized products are rejected; callers
//! must supply expanded input.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::numeric::{mod_pow, reduce_mod};

/// Exponent pair `(j, k)` of the monomial `x^j y^k`.
pub type Exponent = (u32, u32);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable '{var}' at position {pos}")]
    UnknownVariable { pos: usize, var: char },
    #[error("negative exponent at position {pos}")]
    NegativeExponent { pos: usize },
    #[error("parenthesized products are not supported (position {pos}); expand the input")]
    Parenthesized { pos: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Int(BigInt),
    Var(char),
    Caret,
    Star,
    Plus,
    Minus,
}

fn tokenize(text: &str, vars: &[char]) -> Result<Vec<(usize, Token)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '0'..='9' => {
                let start = i;
                let mut digits = String::new();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    digits.push(chars[i]);
                    i += 1;
                }
                let value: BigInt = digits.parse().expect("digit run parses");
                out.push((start, Token::Int(value)));
            }
            '^' => {
                out.push((i, Token::Caret));
                i += 1;
            }
            '*' => {
                out.push((i, Token::Star));
                i += 1;
            }
            '+' => {
                out.push((i, Token::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Token::Minus));
                i += 1;
            }
            '(' | ')' => return Err(ParseError::Parenthesized { pos: i }),
            c if c.is_alphabetic() => {
                if !vars.contains(&c) {
                    return Err(ParseError::UnknownVariable { pos: i, var: c });
                }
                out.push((i, Token::Var(c)));
                i += 1;
            }
            other => {
                return Err(ParseError::Syntax {
                    pos: i,
                    msg: format!("unexpected character '{other}'"),
                })
            }
        }
    }
    Ok(out)
}

/// Parses a sum of monomials over the given variables into a sparse map from
/// exponent vectors to coefficients. Zero coefficients are dropped.
pub(crate) fn parse_terms(
    text: &str,
    vars: &[char],
) -> Result<BTreeMap<Vec<u32>, BigInt>, ParseError> {
    let toks = tokenize(text, vars)?;
    let end = text.chars().count();
    let mut terms: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
    let mut idx = 0;
    if toks.is_empty() {
        return Err(ParseError::Syntax {
            pos: 0,
            msg: "empty input".into(),
        });
    }
    let mut first = true;
    while idx < toks.len() {
        let mut sign = BigInt::one();
        match &toks[idx].1 {
            Token::Plus => idx += 1,
            Token::Minus => {
                sign = -sign;
                idx += 1;
            }
            _ if first => {}
            _ => {
                return Err(ParseError::Syntax {
                    pos: toks[idx].0,
                    msg: "expected '+' or '-'".into(),
                })
            }
        }
        first = false;
        let mut coeff = sign;
        let mut exps = vec![0u32; vars.len()];
        let mut factors = 0;
        while let Some((pos, tok)) = toks.get(idx) {
            match tok {
                Token::Int(v) => {
                    coeff *= v;
                    idx += 1;
                }
                Token::Var(c) => {
                    let slot = vars.iter().position(|v| v == c).expect("tokenizer checked");
                    idx += 1;
                    let mut power = 1u32;
                    if let Some((cpos, Token::Caret)) = toks.get(idx) {
                        idx += 1;
                        match toks.get(idx) {
                            Some((_, Token::Int(e))) => {
                                power = u32::try_from(e.clone()).map_err(|_| ParseError::Syntax {
                                    pos: *cpos,
                                    msg: "exponent too large".into(),
                                })?;
                                idx += 1;
                            }
                            Some((mpos, Token::Minus)) => {
                                return Err(ParseError::NegativeExponent { pos: *mpos })
                            }
                            Some((p, _)) => {
                                return Err(ParseError::Syntax {
                                    pos: *p,
                                    msg: "expected exponent after '^'".into(),
                                })
                            }
                            None => {
                                return Err(ParseError::Syntax {
                                    pos: end,
                                    msg: "expected exponent after '^'".into(),
                                })
                            }
                        }
                    }
                    exps[slot] += power;
                }
                Token::Caret => {
                    return Err(ParseError::Syntax {
                        pos: *pos,
                        msg: "'^' must follow a variable".into(),
                    })
                }
                Token::Star => {
                    if factors == 0 {
                        return Err(ParseError::Syntax {
                            pos: *pos,
                            msg: "'*' without left operand".into(),
                        });
                    }
                    idx += 1;
                    match toks.get(idx) {
                        Some((_, Token::Int(_))) | Some((_, Token::Var(_))) => {}
                        Some((p, _)) => {
                            return Err(ParseError::Syntax {
                                pos: *p,
                                msg: "expected factor after '*'".into(),
                            })
                        }
                        None => {
                            return Err(ParseError::Syntax {
                                pos: end,
                                msg: "expected factor after '*'".into(),
                            })
                        }
                    }
                    continue;
                }
                Token::Plus | Token::Minus => break,
            }
            factors += 1;
        }
        if factors == 0 {
            let pos = toks.get(idx).map(|t| t.0).unwrap_or(end);
            return Err(ParseError::Syntax {
                pos,
                msg: "expected a term".into(),
            });
        }
        *terms.entry(exps).or_insert_with(BigInt::zero) += coeff;
    }
    terms.retain(|_, c| !c.is_zero());
    Ok(terms)
}

/// A sparse polynomial in `ℤ[x, y]`. Stored coefficients are never zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BivariatePoly {
    terms: BTreeMap<Exponent, BigInt>,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let raw = parse_terms(text, &['x', 'y'])?;
        Ok(Self {
            terms: raw.into_iter().map(|(e, c)| ((e[0], e[1]), c)).collect(),
        })
    }

    /// Builds a polynomial from `(j, k, coefficient)` triples, combining like terms.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32, C)>,
        C: Into<BigInt>,
    {
        let mut out = Self::zero();
        for (j, k, c) in terms {
            out.add_term((j, k), c.into());
        }
        out
    }

    pub(crate) fn add_term(&mut self, exp: Exponent, coeff: BigInt) {
        let slot = self.terms.entry(exp).or_insert_with(BigInt::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn coeff(&self, j: u32, k: u32) -> BigInt {
        self.terms.get(&(j, k)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exponent, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn support(&self) -> Support {
        Support {
            points: self.terms.keys().copied().collect(),
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|(j, k)| j + k).max().unwrap_or(0)
    }

    pub fn degree_x(&self) -> u32 {
        self.terms.keys().map(|e| e.0).max().unwrap_or(0)
    }

    pub fn degree_y(&self) -> u32 {
        self.terms.keys().map(|e| e.1).max().unwrap_or(0)
    }

    /// `f(y, x)`.
    pub fn swapped(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&(j, k), c)| ((k, j), c.clone())).collect(),
        }
    }

    pub fn scaled(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(j1, k1), c1) in &self.terms {
            for (&(j2, k2), c2) in &other.terms {
                out.add_term((j1 + j2, k1 + k2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::from_terms([(0, 0, 1)]);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        self.terms
            .iter()
            .map(|(&(j, k), c)| c * x.pow(j) * y.pow(k))
            .sum()
    }

    /// `f(x, y)` reduced into `[0, modulus)`.
    pub fn eval_mod(&self, x: u64, y: u64, modulus: u64) -> u64 {
        assert!(modulus >= 1, "modulus must be positive");
        let m = modulus as u128;
        let mut acc: u128 = 0;
        for (&(j, k), c) in &self.terms {
            let c = reduce_mod(c, modulus) as u128;
            let xp = mod_pow(x, j as u64, modulus) as u128;
            let yp = mod_pow(y, k as u64, modulus) as u128;
            acc = (acc + c * xp % m * yp) % m;
        }
        acc as u64
    }

    /// Coefficients reduced into `[0, modulus)`, zero residues dropped.
    pub fn reduced_terms(&self, modulus: u64) -> Vec<(u32, u32, u64)> {
        self.terms
            .iter()
            .map(|(&(j, k), c)| (j, k, reduce_mod(c, modulus)))
            .filter(|t| t.2 != 0)
            .collect()
    }

    /// Canonical text: terms ordered by (total degree, j) descending.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut order: Vec<(&Exponent, &BigInt)> = self.terms.iter().collect();
        order.sort_by(|a, b| {
            let (ja, ka) = *a.0;
            let (jb, kb) = *b.0;
            (jb + kb, jb).cmp(&(ja + ka, ja))
        });
        let mut out = String::new();
        for (i, (&(j, k), c)) in order.into_iter().enumerate() {
            let negative = c.is_negative();
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mag = c.abs();
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || (j == 0 && k == 0) {
                factors.push(mag.to_string());
            }
            for (var, e) in [('x', j), ('y', k)] {
                match e {
                    0 => {}
                    1 => factors.push(var.to_string()),
                    e => factors.push(format!("{var}^{e}")),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }

    /// Newton distance of the polynomial in the given coordinates.
    pub fn newton_distance(&self) -> Result<NewtonData, crate::Error> {
        if self.is_zero() {
            return Err(crate::Error::ZeroPolynomial);
        }
        Ok(NewtonData::from_support(&self.support()))
    }
}

impl fmt::Display for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl std::str::FromStr for BivariatePoly {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

/// The set of exponent pairs carrying nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Support {
    pub points: Vec<Exponent>,
}

/// Vertices of the Newton polygon together with the Newton distance `d*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonData {
    /// Vertices ordered by increasing `j` (and strictly decreasing `k`).
    pub vertices: Vec<Exponent>,
    pub distance: BigRational,
}

fn cross(o: Exponent, a: Exponent, b: Exponent) -> i64 {
    let (ox, oy) = (o.0 as i64, o.1 as i64);
    (a.0 as i64 - ox) * (b.1 as i64 - oy) - (a.1 as i64 - oy) * (b.0 as i64 - ox)
}

impl NewtonData {
    pub fn from_support(support: &Support) -> Self {
        assert!(!support.points.is_empty(), "empty support");
        // For each j keep only the lowest k; then the lower-left convex chain.
        let mut best: BTreeMap<u32, u32> = BTreeMap::new();
        for &(j, k) in &support.points {
            best.entry(j).and_modify(|v| *v = (*v).min(k)).or_insert(k);
        }
        let mut hull: Vec<Exponent> = Vec::new();
        for (j, k) in best {
            // Points not below the current last vertex are dominated.
            if let Some(&(_, lk)) = hull.last() {
                if k >= lk {
                    continue;
                }
            }
            while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], (j, k)) <= 0 {
                hull.pop();
            }
            hull.push((j, k));
        }
        let distance = bisectrix_hit(&hull);
        NewtonData {
            vertices: hull,
            distance,
        }
    }
}

fn bisectrix_hit(vertices: &[Exponent]) -> BigRational {
    let int = |v: u32| BigRational::from_integer(BigInt::from(v));
    let (j0, k0) = vertices[0];
    if j0 >= k0 {
        return int(j0);
    }
    let (jl, kl) = *vertices.last().expect("nonempty");
    if kl >= jl {
        return int(kl);
    }
    for w in vertices.windows(2) {
        let (j1, k1) = w[0];
        let (j2, k2) = w[1];
        if j1 < k1 && j2 >= k2 {
            let dj = j2 as i64 - j1 as i64;
            let dk = k2 as i64 - k1 as i64;
            let tau = BigRational::new(BigInt::from(k1 as i64 - j1 as i64), BigInt::from(dj - dk));
            return int(j1) + tau * BigRational::from_integer(BigInt::from(dj));
        }
    }
    unreachable!("bisectrix must cross the Newton boundary")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn p(s: &str) -> BivariatePoly {
        BivariatePoly::parse(s).unwrap()
    }

    #[test]
    fn parses_basic_examples() {
        let f = p("y^4 - 2*x^6");
        assert_eq!(f, BivariatePoly::from_terms([(0, 4, 1), (6, 0, -2)]));
        assert!(p("x*y - x*y").is_zero());
        assert_eq!(p("2x^6"), p("2 * x ^ 6"));
        assert_eq!(p("xy"), p("x*y"));
        assert_eq!(p("-x + 3"), BivariatePoly::from_terms([(1, 0, -1), (0, 0, 3)]));
        assert_eq!(p("x*x*y"), p("x^2y"));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            BivariatePoly::parse("(y - x)^2*(y + 2x)"),
            Err(ParseError::Parenthesized { pos: 0 })
        );
        assert_eq!(
            BivariatePoly::parse("x + z"),
            Err(ParseError::UnknownVariable { pos: 4, var: 'z' })
        );
        assert_eq!(
            BivariatePoly::parse("x^-2"),
            Err(ParseError::NegativeExponent { pos: 2 })
        );
        assert!(matches!(
            BivariatePoly::parse("x +"),
            Err(ParseError::Syntax { pos: 3, .. })
        ));
        assert!(matches!(BivariatePoly::parse(""), Err(ParseError::Syntax { .. })));
        assert!(matches!(BivariatePoly::parse("x ^"), Err(ParseError::Syntax { .. })));
        assert!(matches!(BivariatePoly::parse("* x"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn renders_canonically() {
        assert_eq!(p("y^4 - 2*x^6").render(), "-2*x^6 + y^4");
        assert_eq!(p("3 - x*y + x").render(), "-x*y + x + 3");
        assert_eq!(BivariatePoly::zero().render(), "0");
        assert_eq!(p("y^3 - 3*x*y^2 + 3*x^2*y - x^3").render(), "-x^3 + 3*x^2*y - 3*x*y^2 + y^3");
    }

    #[test]
    fn eval_mod_examples() {
        assert_eq!(p("y^4 - 2*x^6").eval_mod(0, 0, 25), 0);
        assert_eq!(p("x*y").eval_mod(2, 3, 9), 6);
        assert_eq!(p("y^2 - 2*x^2").eval_mod(1, 3, 7), 0);
    }

    #[test]
    fn newton_distance_examples() {
        assert_eq!(p("x^3*y^5").newton_distance().unwrap().distance, rat(5, 1));
        assert_eq!(p("x^4*y").newton_distance().unwrap().distance, rat(4, 1));
        assert_eq!(p("y^4 - 2*x^6").newton_distance().unwrap().distance, rat(12, 5));
        assert_eq!(p("x*y").newton_distance().unwrap().distance, rat(1, 1));
        assert_eq!(p("y^2 - x^3").newton_distance().unwrap().distance, rat(6, 5));
        assert!(BivariatePoly::zero().newton_distance().is_err());
    }

    #[test]
    fn newton_hull_drops_interior_points() {
        let nd = p("y^4 + x*y + x*y^3 + x^4 + x^3*y^3").newton_distance().unwrap();
        assert_eq!(nd.vertices, vec![(0, 4), (1, 1), (4, 0)]);
        assert_eq!(nd.distance, rat(1, 1));
        // (2,2) lies on the segment from (0,4) to (4,0) and is not a vertex.
        let nd = p("y^4 + x^2*y^2 + x^4").newton_distance().unwrap();
        assert_eq!(nd.vertices, vec![(0, 4), (4, 0)]);
        assert_eq!(nd.distance, rat(2, 1));
    }
}
