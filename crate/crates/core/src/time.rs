//! Exact rational time values.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A point in time or a duration, stored as an exact rational.
///
/// Discrete snapshot indices are represented as integral values.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Time(Rational64);

impl Time {
    pub const ZERO: Time = Time(Rational64::new_raw(0, 1));
    pub const ONE: Time = Time(Rational64::new_raw(1, 1));

    pub fn new(numer: i64, denom: i64) -> Time {
        Time(Rational64::new(numer, denom))
    }

    pub fn int(v: i64) -> Time {
        Time(Rational64::from_integer(v))
    }

    pub fn ratio(&self) -> Rational64 {
        self.0
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// The integral value, if this time is integral.
    pub fn as_int(&self) -> Option<i64> {
        self.0.is_integer().then(|| *self.0.numer())
    }

    pub fn floor(&self) -> i64 {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> i64 {
        self.0.ceil().to_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn div_int(&self, k: i64) -> Time {
        Time(self.0 / Rational64::from_integer(k))
    }
}

impl Default for Time {
    fn default() -> Self {
        Time::ZERO
    }
}

impl From<i64> for Time {
    fn from(v: i64) -> Self {
        Time::int(v)
    }
}

impl From<Rational64> for Time {
    fn from(r: Rational64) -> Self {
        Time(r)
    }
}

impl Add for Time {
    type Output = Time;
    fn add(self, rhs: Time) -> Time {
        Time(self.0 + rhs.0)
    }
}

impl Sub for Time {
    type Output = Time;
    fn sub(self, rhs: Time) -> Time {
        Time(self.0 - rhs.0)
    }
}

impl Neg for Time {
    type Output = Time;
    fn neg(self) -> Time {
        Time(-self.0)
    }
}

impl Mul<i64> for Time {
    type Output = Time;
    fn mul(self, rhs: i64) -> Time {
        Time(self.0 * Rational64::from_integer(rhs))
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_decimal(s: &str) -> Option<Rational64> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((a, b)) => (a, b),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut numer: i64 = all.trim_start_matches('0').parse().unwrap_or(0);
    if !all.trim_start_matches('0').is_empty() && numer == 0 {
        return None;
    }
    let scale = exp - frac_part.len() as i32;
    let mut denom: i64 = 1;
    if scale >= 0 {
        numer = numer.checked_mul(10i64.checked_pow(scale as u32)?)?;
    } else {
        denom = 10i64.checked_pow((-scale) as u32)?;
    }
    if neg {
        numer = -numer;
    }
    Some(Rational64::new(numer, denom))
}

impl FromStr for Time {
    type Err = Error;

    /// Accepts integers, decimals (with optional exponent) and `p/q` fractions.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || Error::input(format!("invalid time value `{s}`"));
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            return Ok(Time::new(p, q));
        }
        parse_decimal(s).map(Time).ok_or_else(bad)
    }
}

impl Serialize for Time {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            serializer.serialize_i64(*self.0.numer())
        } else {
            serializer.serialize_str(&self.to_string())
        }
    }
}

struct TimeVisitor;

impl<'de> Visitor<'de> for TimeVisitor {
    type Value = Time;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a number or a \"p/q\" string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Time, E> {
        Ok(Time::int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Time, E> {
        i64::try_from(v)
            .map(Time::int)
            .map_err(|_| E::custom("time out of range"))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Time, E> {
        if !v.is_finite() {
            return Err(E::custom("time must be finite"));
        }
        // shortest round-trip representation, then exact decimal
        format!("{v}").parse().map_err(E::custom)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Time, E> {
        v.parse().map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Time {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(TimeVisitor)
    }
}

/// Parses a time literal, panicking on malformed input. Intended for fixtures.
pub fn t(s: &str) -> Time {
    s.parse().expect("valid time literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(t("0.01"), Time::new(1, 100));
        assert_eq!(t("5.01"), Time::new(501, 100));
        assert_eq!(t("-2.5"), Time::new(-5, 2));
        assert_eq!(t("1e-2"), Time::new(1, 100));
        assert_eq!(t("3/6"), Time::new(1, 2));
        assert_eq!(t("7"), Time::int(7));
        assert!("abc".parse::<Time>().is_err());
        assert!("1/0".parse::<Time>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let v: Vec<Time> = serde_json::from_str(r#"[1, 0.1, "2/3", 2.0]"#).unwrap();
        assert_eq!(v, vec![Time::int(1), Time::new(1, 10), Time::new(2, 3), Time::int(2)]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"[1,"1/10","2/3",2]"#);
    }
}
