//! The weight `ν ∈ [0, 1]` of the weighted means, optionally carried as an
//! exact fraction so that dyadic weights can be recognized without any
//! floating-point proximity test.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest numerator/denominator accepted for an exact fraction; keeps the
/// conversion to `f64` correctly rounded.
const MAX_EXACT: u64 = 1 << 53;

/// A reduced fraction `num / den` with `0 <= num <= den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fraction {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Fraction {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::domain("fraction with zero denominator"));
        }
        if num > den {
            return Err(Error::domain(format!("weight {num}/{den} exceeds 1")));
        }
        if den > MAX_EXACT {
            return Err(Error::domain(format!("denominator {den} exceeds 2^53")));
        }
        let g = gcd(num, den).max(1);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    /// `Some(t)` when the reduced denominator is `2^t`.
    pub fn dyadic_exponent(&self) -> Option<u32> {
        self.den.is_power_of_two().then(|| self.den.trailing_zeros())
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Weight `ν` of the weighted arithmetic/geometric means.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Weight {
    nu: f64,
    exact: Option<Fraction>,
}

impl Weight {
    /// A weight given as a decimal. Never classified as dyadic.
    pub fn new(nu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&nu) {
            return Err(Error::domain(format!("weight {nu} outside [0, 1]")));
        }
        Ok(Self { nu, exact: None })
    }

    pub fn from_fraction(num: u64, den: u64) -> Result<Self> {
        let frac = Fraction::new(num, den)?;
        Ok(Self {
            nu: frac.to_f64(),
            exact: Some(frac),
        })
    }

    /// The weight `p / 2^t`, reduced.
    pub fn dyadic(p: u64, t: u32) -> Result<Self> {
        if t > 53 {
            return Err(Error::domain(format!("dyadic exponent {t} exceeds 53")));
        }
        Self::from_fraction(p, 1u64 << t)
    }

    #[inline]
    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn exact(&self) -> Option<Fraction> {
        self.exact
    }

    /// `Some(t)` when the weight was given exactly and equals `p / 2^t`
    /// in lowest terms.
    pub fn dyadic_exponent(&self) -> Option<u32> {
        self.exact.and_then(|f| f.dyadic_exponent())
    }

    /// `1 - ν`, exact when the weight is exact.
    pub fn complement(&self) -> Self {
        match self.exact {
            Some(f) => Self::from_fraction(f.den - f.num, f.den).expect("complement of a valid fraction"),
            None => Self {
                nu: 1.0 - self.nu,
                exact: None,
            },
        }
    }

    /// `r_0 = min(ν, 1 − ν)`.
    #[inline]
    pub fn r0(&self) -> f64 {
        self.nu.min(1.0 - self.nu)
    }

    /// `ν ∈ {0, 1}`: every chain collapses to a trivial statement.
    pub fn is_endpoint(&self) -> bool {
        self.nu == 0.0 || self.nu == 1.0
    }
}

impl FromStr for Weight {
    type Err = Error;

    /// Accepts `"p/q"` (exact) or a decimal literal.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let num = p
                .trim()
                .parse::<u64>()
                .map_err(|e| Error::domain(format!("bad numerator in {s:?}: {e}")))?;
            let den = q
                .trim()
                .parse::<u64>()
                .map_err(|e| Error::domain(format!("bad denominator in {s:?}: {e}")))?;
            return Self::from_fraction(num, den);
        }
        let nu = s
            .parse::<f64>()
            .map_err(|e| Error::domain(format!("bad weight {s:?}: {e}")))?;
        Self::new(nu)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact {
            Some(frac) => write!(f, "{frac}"),
            None => write!(f, "{}", self.nu),
        }
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.nu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_reduces() {
        let w = Weight::from_fraction(2, 8).unwrap();
        assert_eq!(w.exact().unwrap(), Fraction::new(1, 4).unwrap());
        assert_eq!(w.dyadic_exponent(), Some(2));
        assert_eq!(w.nu(), 0.25);
    }

    #[test]
    fn decimal_is_never_dyadic() {
        let w: Weight = "0.25".parse().unwrap();
        assert_eq!(w.nu(), 0.25);
        assert_eq!(w.dyadic_exponent(), None);
        let w: Weight = "1/4".parse().unwrap();
        assert_eq!(w.dyadic_exponent(), Some(2));
    }

    #[test]
    fn non_dyadic_fraction() {
        let w: Weight = "1/3".parse().unwrap();
        assert_eq!(w.dyadic_exponent(), None);
        assert!((w.nu() - 1.0 / 3.0).abs() == 0.0);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(Weight::new(-0.1).is_err());
        assert!(Weight::new(1.5).is_err());
        assert!(Weight::new(f64::NAN).is_err());
        assert!("5/4".parse::<Weight>().is_err());
        assert!("1/0".parse::<Weight>().is_err());
        assert!("x".parse::<Weight>().is_err());
    }

    #[test]
    fn complement_keeps_exactness() {
        let w = Weight::dyadic(3, 3).unwrap().complement();
        assert_eq!(w.exact().unwrap(), Fraction::new(5, 8).unwrap());
        assert_eq!(Weight::new(0.3).unwrap().complement().nu(), 0.7);
    }
}
