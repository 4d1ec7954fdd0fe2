//! Exact rational scalars and their `"num/den"` string encoding.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

/// Arbitrary precision rational. `BigRational` keeps the denominator positive
/// and the fraction reduced after every operation.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

/// Canonical `"num/den"` form. The denominator is always written, even when it is 1.
pub fn to_string(q: &Scalar) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseScalarError(pub String);

/// Accepts `"n/d"`, `"n"` and finite decimal literals such as `"-1.25"`.
pub fn parse(s: &str) -> Result<Scalar, ParseScalarError> {
    let t = s.trim();
    let err = || ParseScalarError(s.to_string());
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Scalar::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        if fp.is_empty() || !fp.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let neg = ip.starts_with('-');
        let ip_digits = ip.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if ip_digits.is_empty() { "0" } else { ip_digits }, fp);
        let n = BigInt::from_str(&digits).map_err(|_| err())?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let q = Scalar::new(n, d);
        return Ok(if neg { -q } else { q });
    }
    BigInt::from_str(t).map(Scalar::from_integer).map_err(|_| err())
}

/// Exact dyadic value of a finite double.
pub fn from_f64(x: f64) -> Option<Scalar> {
    Scalar::from_float(x)
}

pub fn to_f64(q: &Scalar) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Both parts overflow f64: shift them down together.
            let nb = q.numer().bits() as i64;
            let db = q.denom().bits() as i64;
            let shift_n = (nb - 900).max(0) as usize;
            let shift_d = (db - 900).max(0) as usize;
            let n = (q.numer() >> shift_n).to_f64().unwrap_or(f64::NAN);
            let d = (q.denom() >> shift_d).to_f64().unwrap_or(f64::NAN);
            let e = shift_n as i64 - shift_d as i64;
            n / d * 2f64.powi(e.clamp(-2000, 2000) as i32)
        }
    }
}

/// Sign as -1, 0, 1.
pub fn sign(q: &Scalar) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

/// Total size of the fraction in bits; used for cost estimates.
pub fn bit_size(q: &Scalar) -> u64 {
    q.numer().bits() + q.denom().bits()
}

pub mod serde_str {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Scalar, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_string(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(D::Error::custom)
    }
}

pub mod serde_pair {
    use super::*;
    use serde::ser::SerializeTuple;

    pub fn serialize<S: Serializer>(p: &[Scalar; 2], s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(2)?;
        t.serialize_element(&to_string(&p[0]))?;
        t.serialize_element(&to_string(&p[1]))?;
        t.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Scalar; 2], D::Error> {
        let [a, b] = <[String; 2]>::deserialize(d)?;
        Ok([parse(&a).map_err(D::Error::custom)?, parse(&b).map_err(D::Error::custom)?])
    }
}

fn de_endpoint<'de, D: Deserializer<'de>>(d: D, inf: &str) -> Result<Option<Scalar>, D::Error> {
    let s = String::deserialize(d)?;
    if s == inf || s == "inf" {
        return Ok(None);
    }
    parse(&s).map(Some).map_err(D::Error::custom)
}

/// Lower interval endpoint; `None` is written `"-inf"`.
pub mod serde_lower {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Option<Scalar>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.as_ref().map_or_else(|| "-inf".to_string(), to_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Scalar>, D::Error> {
        de_endpoint(d, "-inf")
    }
}

/// Upper interval endpoint; `None` is written `"+inf"`.
pub mod serde_upper {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Option<Scalar>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.as_ref().map_or_else(|| "+inf".to_string(), to_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Scalar>, D::Error> {
        de_endpoint(d, "+inf")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("6/4").unwrap(), ratio(3, 2));
        assert_eq!(parse("-7").unwrap(), int(-7));
        assert_eq!(parse("-1.25").unwrap(), ratio(-5, 4));
        assert_eq!(parse("0.5").unwrap(), ratio(1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
    }

    #[test]
    fn canonical_string() {
        assert_eq!(to_string(&ratio(-6, 4)), "-3/2");
        assert_eq!(to_string(&int(5)), "5/1");
    }

    #[test]
    fn huge_to_f64() {
        let big = Scalar::new(num_traits::pow(BigInt::from(3), 1000) + 1, num_traits::pow(BigInt::from(3), 999));
        assert!((to_f64(&big) - 3.0).abs() < 1e-12);
    }
}
