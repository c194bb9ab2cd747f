//! Exact exponents for `ℓ_p`-type gauges.
//!
//! Exponents are kept as reduced rationals (or `∞`) so that chains such as
//! conjugation, convexification and pointwise products resolve to the exact
//! exponent instead of a rounded float.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type Ratio = Rational64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Exponent {
    Finite(Ratio),
    Infinite,
}

impl Exponent {
    pub const ONE: Exponent = Exponent::Finite(Ratio::new_raw(1, 1));
    pub const TWO: Exponent = Exponent::Finite(Ratio::new_raw(2, 1));

    pub fn int(p: i64) -> Self {
        Exponent::Finite(Ratio::from_integer(p))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Exponent::Finite(Ratio::new(num, den))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn recip(&self) -> Ratio {
        match self {
            Exponent::Finite(p) => p.recip(),
            Exponent::Infinite => Ratio::zero(),
        }
    }

    /// Inverse of [`Exponent::recip`]: `0 ↦ ∞`.
    pub fn from_recip(r: Ratio) -> Result<Self> {
        if r.is_zero() {
            Ok(Exponent::Infinite)
        } else if r.is_negative() {
            Err(Error::domain(format!("negative reciprocal exponent {r}")))
        } else {
            Ok(Exponent::Finite(r.recip()))
        }
    }

    /// Hölder conjugate `p' = p/(p-1)`.
    pub fn conjugate(&self) -> Self {
        // 1/p + 1/p' = 1
        let r = Ratio::one() - self.recip();
        Exponent::from_recip(r).expect("conjugate of an exponent >= 1")
    }

    pub fn mul(&self, r: Ratio) -> Self {
        match self {
            Exponent::Finite(p) => Exponent::Finite(p * r),
            Exponent::Infinite => Exponent::Infinite,
        }
    }

    pub fn div(&self, r: Ratio) -> Self {
        match self {
            Exponent::Finite(p) => Exponent::Finite(p / r),
            Exponent::Infinite => Exponent::Infinite,
        }
    }

    /// Checks `p ∈ [1, ∞]`.
    pub fn validate(&self) -> Result<()> {
        match self {
            Exponent::Finite(p) if *p < Ratio::one() => {
                Err(Error::domain(format!("exponent {p} outside [1, inf]")))
            }
            _ => Ok(()),
        }
    }

    pub fn to_real<T: Real>(&self) -> T {
        match self {
            Exponent::Finite(p) => T::lit(*p.numer() as f64 / *p.denom() as f64),
            Exponent::Infinite => T::lit(f64::INFINITY),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_real::<f64>()
    }

    pub fn is_one(&self) -> bool {
        *self == Self::ONE
    }

    pub fn is_two(&self) -> bool {
        *self == Self::TWO
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        // larger p ⇔ smaller 1/p
        other.recip().cmp(&self.recip())
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Infinite => write!(f, "inf"),
            Exponent::Finite(p) => fmt_ratio(p, f),
        }
    }
}

pub(crate) fn fmt_ratio(p: &Ratio, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if p.is_integer() {
        write!(f, "{}", p.numer())
    } else {
        write!(f, "{}/{}", p.numer(), p.denom())
    }
}

/// Parses `"3"`, `"3/2"`, `"1.25"` exactly.
pub fn parse_ratio(s: &str) -> Result<Ratio> {
    let s = s.trim();
    let bad = || Error::parse(format!("invalid number `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.len() > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let ip: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().map_err(|_| bad())? };
        let den = 10i64.pow(frac.len() as u32);
        let fp: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let mag = ip.abs().checked_mul(den).and_then(|v| v.checked_add(fp)).ok_or_else(bad)?;
        return Ok(Ratio::new(if neg { -mag } else { mag }, den));
    }
    let n: i64 = s.parse().map_err(|_| bad())?;
    Ok(Ratio::from_integer(n))
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "∞" | "infinity" => Ok(Exponent::Infinite),
            other => Ok(Exponent::Finite(parse_ratio(other)?)),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugates() {
        assert_eq!(Exponent::int(3).conjugate(), Exponent::ratio(3, 2));
        assert_eq!(Exponent::int(1).conjugate(), Exponent::Infinite);
        assert_eq!(Exponent::Infinite.conjugate(), Exponent::int(1));
        assert_eq!(Exponent::int(2).conjugate(), Exponent::int(2));
        assert_eq!(Exponent::ratio(4, 3).conjugate(), Exponent::int(4));
    }

    #[test]
    fn ordering_puts_infinity_last() {
        let mut v = vec![Exponent::Infinite, Exponent::int(2), Exponent::ratio(3, 2), Exponent::int(1)];
        v.sort();
        assert_eq!(v, vec![Exponent::int(1), Exponent::ratio(3, 2), Exponent::int(2), Exponent::Infinite]);
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!("1.5".parse::<Exponent>().unwrap(), Exponent::ratio(3, 2));
        assert_eq!("4/3".parse::<Exponent>().unwrap(), Exponent::ratio(4, 3));
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinite);
        assert!("x".parse::<Exponent>().is_err());
        assert!("1/0".parse::<Exponent>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for e in [Exponent::int(4), Exponent::ratio(4, 3), Exponent::Infinite] {
            assert_eq!(e.to_string().parse::<Exponent>().unwrap(), e);
        }
    }

    #[test]
    fn validation_rejects_sub_one() {
        assert!(Exponent::ratio(1, 2).validate().is_err());
        assert!(Exponent::int(1).validate().is_ok());
        assert!(Exponent::Infinite.validate().is_ok());
    }
}
