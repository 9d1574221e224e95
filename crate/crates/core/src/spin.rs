use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Total angular momentum quantum number, stored as `2J` so half-integers are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Spin {
    twice: u32,
}

impl Spin {
    pub const fn integer(j: u32) -> Self {
        Spin { twice: 2 * j }
    }

    pub const fn from_twice(twice: u32) -> Self {
        Spin { twice }
    }

    pub const fn twice(self) -> u32 {
        self.twice
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// The integer value of `J`, or an error for half-integers.
    pub fn as_integer(self) -> Result<u32> {
        if self.is_integer() {
            Ok(self.twice / 2)
        } else {
            Err(Error::HalfIntegerSpin(self.to_string()))
        }
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    /// Dimension `2J + 1` of the irreducible representation.
    pub fn dim(self) -> usize {
        self.twice as usize + 1
    }
}

impl From<u32> for Spin {
    fn from(j: u32) -> Self {
        Spin::integer(j)
    }
}

impl TryFrom<f64> for Spin {
    type Error = Error;

    fn try_from(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !j.is_finite() || j < 0.0 || twice.fract() != 0.0 || twice > f64::from(u32::MAX) {
            return Err(Error::InvalidSpin(j.to_string()));
        }
        Ok(Spin::from_twice(twice as u32))
    }
}

impl FromStr for Spin {
    type Err = Error;

    /// Accepts `"7"`, `"3.5"` or `"7/2"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidSpin(s.to_string());
        if let Some((num, den)) = s.split_once('/') {
            let num: u32 = num.trim().parse().map_err(|_| bad())?;
            match den.trim() {
                "2" => Ok(Spin::from_twice(num)),
                "1" => num.checked_mul(2).map(Spin::from_twice).ok_or_else(bad),
                _ => Err(bad()),
            }
        } else if let Ok(j) = s.parse::<u32>() {
            j.checked_mul(2).map(Spin::from_twice).ok_or_else(bad)
        } else {
            let j: f64 = s.parse().map_err(|_| bad())?;
            Spin::try_from(j).map_err(|_| bad())
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}
