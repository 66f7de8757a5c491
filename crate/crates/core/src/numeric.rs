//! Small exact-arithmetic helpers shared across modules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Renders a rational as `"num/den"`, or `"num"` when the denominator is one.
pub fn fmt_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"num/den"` or `"num"`.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => text.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_to_f64(x: &BigRational) -> f64 {
    let n = x.numer().to_f64().unwrap_or(f64::NAN);
    let d = x.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() {
        return n / d;
    }
    // Very large operands: scale down by the common bit length first.
    let shift = x.numer().bits().max(x.denom().bits()).saturating_sub(900);
    let n = (x.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (x.denom() >> shift).to_f64().unwrap_or(1.0);
    n / d
}

/// Serde adapter storing a `BigRational` as a `"num/den"` string.
pub mod serde_rational {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).ok_or_else(|| de::Error::custom(format!("bad rational {text:?}")))
    }
}

/// Serde adapter storing a `BigInt` as a decimal string.
pub mod serde_bigint {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let text = String::deserialize(d)?;
        text.trim()
            .parse()
            .map_err(|_| de::Error::custom(format!("bad integer {text:?}")))
    }
}

/// Serde adapter for a list of `BigInt`s as decimal strings.
pub mod serde_bigint_vec {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| t.trim().parse().map_err(|_| de::Error::custom(format!("bad integer {t:?}"))))
            .collect()
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&k| is_prime(k)).collect()
}

/// Distinct prime divisors of |n| below `limit` by trial division, plus the
/// remaining cofactor (1 when fully factored). A cofactor below `limit²` is
/// prime and is reported as a divisor. Zero has no divisors.
pub fn prime_divisors_bounded(n: &BigInt, limit: u64) -> (Vec<u64>, BigInt) {
    let mut m = n.abs();
    let mut out = Vec::new();
    if m.is_zero() {
        return (out, BigInt::one());
    }
    let mut d = 2u64;
    while d <= limit && BigInt::from(d) * BigInt::from(d) <= m {
        let bd = BigInt::from(d);
        if (&m % &bd).is_zero() {
            out.push(d);
            while (&m % &bd).is_zero() {
                m /= &bd;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > BigInt::one() && (d > limit || BigInt::from(d) * BigInt::from(d) > m) {
        if let Some(v) = m.to_u64().filter(|_| BigInt::from(d) * BigInt::from(d) > m) {
            out.push(v);
            out.sort_unstable();
            return (out, BigInt::one());
        }
        return (out, m);
    }
    (out, BigInt::one())
}

/// Distinct prime divisors of |n| (complete factorization by trial division).
pub fn prime_divisors(n: &BigInt) -> Vec<u64> {
    prime_divisors_bounded(n, u64::MAX).0
}

/// Positive divisors of a nonzero integer (trial division).
pub fn divisors(n: &BigInt) -> Vec<BigInt> {
    let m = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= m {
        if (&m % &d).is_zero() {
            let other = &m / &d;
            if other != d {
                large.push(other);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// gcd with the convention gcd(0, a) = a.
pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn pow_u64(base: u64, exp: u32) -> u64 {
    base.checked_pow(exp).expect("power overflows u64")
}

pub fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut acc = 1u128;
    let mut b = (base % modulus) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Reduces a big integer into `[0, modulus)`.
pub fn reduce_mod(x: &BigInt, modulus: u64) -> u64 {
    let m = BigInt::from(modulus);
    let r = x.mod_floor(&m);
    r.to_u64().expect("residue fits u64")
}

/// Inverse of `a` modulo `m` when it exists.
pub fn mod_inverse(a: &BigInt, m: u64) -> Option<u64> {
    let mb = BigInt::from(m);
    let a = a.mod_floor(&mb);
    let ext = a.extended_gcd(&mb);
    if !ext.gcd.is_one() {
        return None;
    }
    Some(reduce_mod(&ext.x, m))
}

pub fn lcm_big(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}
