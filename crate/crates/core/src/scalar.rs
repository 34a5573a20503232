//! Scalar abstraction shared by the exact and floating-point code paths.
//!
//! Every probability in a graph is stored exactly (as a [`BigRational`]) and
//! converted into the working scalar on demand. Exact enumeration runs in
//! `BigRational`, Monte Carlo summaries in `f64`.

use std::fmt::{self, Debug, Display};
use std::iter::Sum;
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational numbers, the scalar of every exact computation.
pub type Exact = BigRational;

/// Numeric type a distribution or kernel can be evaluated in.
pub trait Scalar:
    Num + Clone + Debug + Display + PartialOrd + Neg<Output = Self> + Sum + Send + Sync + 'static
{
    /// `true` when arithmetic is exact, so comparisons against zero need no slack.
    const EXACT: bool;

    fn from_exact(q: &BigRational) -> Self;

    fn to_f64(&self) -> f64;

    fn from_count(n: u64) -> Self;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_exact(q: &BigRational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_count(n: u64) -> Self {
        n as f64
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_exact(q: &BigRational) -> Self {
        q.to_f32().unwrap_or(f32::NAN)
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }

    fn from_count(n: u64) -> Self {
        n as f32
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_exact(q: &BigRational) -> Self {
        q.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_count(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
}

/// Error produced when a numeric literal cannot be read as an exact rational.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse `{0}` as an exact number (expected `a/b` or a decimal)")]
pub struct ParseExactError(pub String);

/// Parses `"3/10"`, `"0.3"`, `"2"` or `"1e-2"` into an exact rational.
///
/// Decimals become fractions with a power-of-ten denominator.
pub fn parse_exact(text: &str) -> Result<BigRational, ParseExactError> {
    let s = text.trim();
    let err = || ParseExactError(text.to_string());
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| err())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str(&all_digits).map_err(|_| err())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if negative { -value } else { value })
}

/// An exact edge probability in `[0, 1]` with a cached `f64` copy for sampling.
#[derive(Clone)]
pub struct Prob {
    exact: BigRational,
    approx: f64,
}

/// Returned when a value outside `[0, 1]` is used as a probability.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("probability {0} lies outside [0, 1]")]
pub struct ProbRangeError(pub String);

impl Prob {
    pub fn new(exact: BigRational) -> Result<Self, ProbRangeError> {
        if exact.is_negative() || exact > BigRational::one() {
            return Err(ProbRangeError(exact.to_string()));
        }
        let approx = Scalar::to_f64(&exact);
        Ok(Self { exact, approx })
    }

    pub fn ratio(num: i64, den: i64) -> Result<Self, ProbRangeError> {
        Self::new(BigRational::new(num.into(), den.into()))
    }

    pub fn zero() -> Self {
        Self { exact: BigRational::zero(), approx: 0.0 }
    }

    pub fn one() -> Self {
        Self { exact: BigRational::one(), approx: 1.0 }
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }

    pub fn as_f64(&self) -> f64 {
        self.approx
    }

    /// The probability in the working scalar type.
    pub fn get<S: Scalar>(&self) -> S {
        S::from_exact(&self.exact)
    }

    pub fn complement(&self) -> Self {
        Self::new(BigRational::one() - &self.exact).expect("complement of a probability")
    }

    /// `true` for `0` and `1`, the values that make an edge deterministic.
    pub fn is_degenerate(&self) -> bool {
        self.exact.is_zero() || self.exact.is_one()
    }
}

impl PartialEq for Prob {
    fn eq(&self, other: &Self) -> bool {
        self.exact == other.exact
    }
}

impl Eq for Prob {}

impl std::hash::Hash for Prob {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.exact.hash(state);
    }
}

impl Debug for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Prob({})", self.exact)
    }
}

impl Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display::fmt(&self.exact, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProbParseError {
    #[error(transparent)]
    Syntax(#[from] ParseExactError),
    #[error(transparent)]
    Range(#[from] ProbRangeError),
}

impl FromStr for Prob {
    type Err = ProbParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Prob::new(parse_exact(s)?)?)
    }
}

impl Serialize for Prob {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.exact.to_string())
    }
}

impl<'de> Deserialize<'de> for Prob {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
            Float(f64),
        }
        let text = match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s,
            Raw::Int(i) => i.to_string(),
            // Shortest round-trip decimal, so 0.3 stays 3/10.
            Raw::Float(x) => format!("{x}"),
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_exact("1/2").unwrap(), q(1, 2));
        assert_eq!(parse_exact("0.3").unwrap(), q(3, 10));
        assert_eq!(parse_exact("2").unwrap(), q(2, 1));
        assert_eq!(parse_exact("1.05").unwrap(), q(21, 20));
        assert_eq!(parse_exact("-.5").unwrap(), q(-1, 2));
        assert_eq!(parse_exact("25e-2").unwrap(), q(1, 4));
        assert!(parse_exact("1/0").is_err());
        assert!(parse_exact("abc").is_err());
        assert!(parse_exact(".").is_err());
    }

    #[test]
    fn prob_range_is_enforced() {
        assert!("1.5".parse::<Prob>().is_err());
        assert!("-0.1".parse::<Prob>().is_err());
        let p: Prob = "3/4".parse().unwrap();
        assert_eq!(p.complement().exact(), &q(1, 4));
        assert!(Prob::one().is_degenerate());
        assert!(!p.is_degenerate());
    }

    #[test]
    fn prob_reads_toml_numbers_exactly() {
        #[derive(Deserialize)]
        struct W {
            p: Prob,
        }
        let w: W = toml::from_str("p = 0.3").unwrap();
        assert_eq!(w.p.exact(), &q(3, 10));
        let w: W = toml::from_str("p = \"1/3\"").unwrap();
        assert_eq!(w.p.exact(), &q(1, 3));
        let w: W = toml::from_str("p = 1").unwrap();
        assert!(w.p.exact().is_one());
    }
}
