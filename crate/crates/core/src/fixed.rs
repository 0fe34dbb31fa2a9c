//! Fixed-point vote values with five decimal places.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Sub, SubAssign};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Number of fractional decimal digits carried by a [`FixedVote`].
pub const DECIMALS: u32 = 5;
/// Units per whole vote.
pub const SCALE: u64 = 100_000;

/// A non-negative vote value stored as an integer count of 10⁻⁵ vote units.
///
/// Addition and subtraction are exact. Scaling by a ratio truncates toward
/// zero at the fifth decimal, so a scaled value never exceeds the exact
/// product.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FixedVote(u64);

impl FixedVote {
    pub const ZERO: FixedVote = FixedVote(0);

    pub const fn from_units(units: u64) -> Self {
        FixedVote(units)
    }

    pub const fn from_votes(votes: u64) -> Self {
        FixedVote(votes * SCALE)
    }

    pub const fn units(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Whole-vote part, discarding the fraction.
    pub fn floor_votes(self) -> u64 {
        self.0 / SCALE
    }

    /// `self × numerator / denominator`, truncated to five decimals.
    ///
    /// Panics if `denominator` is zero.
    pub fn mul_ratio_trunc(self, numerator: FixedVote, denominator: FixedVote) -> FixedVote {
        assert!(!denominator.is_zero(), "ratio with zero denominator");
        let scaled = self.0 as u128 * numerator.0 as u128 / denominator.0 as u128;
        FixedVote(u64::try_from(scaled).expect("scaled vote value overflows u64"))
    }

    /// `self × other`, truncated to five decimals.
    pub fn mul_trunc(self, other: FixedVote) -> FixedVote {
        let scaled = self.0 as u128 * other.0 as u128 / SCALE as u128;
        FixedVote(u64::try_from(scaled).expect("vote product overflows u64"))
    }

    pub fn checked_sub(self, other: FixedVote) -> Option<FixedVote> {
        self.0.checked_sub(other.0).map(FixedVote)
    }

    pub fn saturating_sub(self, other: FixedVote) -> FixedVote {
        FixedVote(self.0.saturating_sub(other.0))
    }

    /// Renders with `places` decimals, rounding half away from zero.
    pub fn display_rounded(self, places: u32) -> String {
        assert!(places <= DECIMALS);
        let drop = 10u64.pow(DECIMALS - places);
        let rounded = (self.0 + drop / 2) / drop;
        if places == 0 {
            return rounded.to_string();
        }
        let div = 10u64.pow(places);
        format!("{}.{:0width$}", rounded / div, rounded % div, width = places as usize)
    }
}

impl fmt::Display for FixedVote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:05}", self.0 / SCALE, self.0 % SCALE)
    }
}

impl fmt::Debug for FixedVote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid vote value {0:?}")]
pub struct ParseFixedVoteError(String);

impl FromStr for FixedVote {
    type Err = ParseFixedVoteError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseFixedVoteError(s.to_string());
        let (whole, frac) = match s.split_once('.') {
            Some((w, f)) => (w, f),
            None => (s, ""),
        };
        if whole.is_empty()
            || frac.len() > DECIMALS as usize
            || !whole.bytes().all(|b| b.is_ascii_digit())
            || !frac.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(err());
        }
        let whole: u64 = whole.parse().map_err(|_| err())?;
        let mut frac_units: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| err())?
        };
        frac_units *= 10u64.pow(DECIMALS - frac.len() as u32);
        whole
            .checked_mul(SCALE)
            .and_then(|w| w.checked_add(frac_units))
            .map(FixedVote)
            .ok_or_else(err)
    }
}

impl Serialize for FixedVote {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FixedVote {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Add for FixedVote {
    type Output = FixedVote;
    fn add(self, rhs: Self) -> Self::Output {
        FixedVote(self.0.checked_add(rhs.0).expect("vote sum overflows u64"))
    }
}

impl AddAssign for FixedVote {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for FixedVote {
    type Output = FixedVote;
    fn sub(self, rhs: Self) -> Self::Output {
        FixedVote(self.0.checked_sub(rhs.0).expect("negative vote value"))
    }
}

impl SubAssign for FixedVote {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl Sum for FixedVote {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(FixedVote::ZERO, |a, b| a + b)
    }
}

impl<'a> Sum<&'a FixedVote> for FixedVote {
    fn sum<I: Iterator<Item = &'a Self>>(iter: I) -> Self {
        iter.copied().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn display_and_parse() {
        let v: FixedVote = "162.5".parse().unwrap();
        assert_eq!(v.units(), 16_250_000);
        assert_eq!(v.to_string(), "162.50000");
        assert_eq!("7".parse::<FixedVote>().unwrap(), FixedVote::from_votes(7));
        assert!("1.123456".parse::<FixedVote>().is_err());
        assert!("-1".parse::<FixedVote>().is_err());
        assert!(".5".parse::<FixedVote>().is_err());
    }

    #[test]
    fn rounding_for_display() {
        let v = FixedVote::from_units(17_148_513);
        assert_eq!(v.display_rounded(2), "171.49");
        assert_eq!(FixedVote::from_units(15_158_415).display_rounded(2), "151.58");
        assert_eq!(FixedVote::from_units(16_337_500).display_rounded(3), "163.375");
        assert_eq!(FixedVote::from_units(99_999).display_rounded(0), "1");
    }

    #[test]
    fn ratio_truncates() {
        // 60 × 24 / 192 = 7.5 exactly
        let got = FixedVote::from_votes(60).mul_ratio_trunc(FixedVote::from_votes(24), FixedVote::from_votes(192));
        assert_eq!(got, "7.5".parse().unwrap());
        // 92 × 34 / 202 = 15.485148...
        let got = FixedVote::from_votes(92).mul_ratio_trunc(FixedVote::from_votes(34), FixedVote::from_votes(202));
        assert_eq!(got.units(), 1_548_514);
    }

    proptest! {
        #[test]
        fn truncation_never_rounds_up(a in 0u64..10_000_000_000, b in 0u64..10_000_000) {
            let x = FixedVote::from_units(a);
            let y = FixedVote::from_units(b);
            let exact = a as u128 * b as u128;
            let got = x.mul_trunc(y).units() as u128 * SCALE as u128;
            prop_assert!(got <= exact);
            prop_assert!(exact - got < SCALE as u128);
        }

        #[test]
        fn add_is_exact(a in 0u64..1u64 << 40, b in 0u64..1u64 << 40) {
            let s = FixedVote::from_units(a) + FixedVote::from_units(b);
            prop_assert_eq!(s.units(), a + b);
            prop_assert_eq!(s - FixedVote::from_units(b), FixedVote::from_units(a));
        }

        #[test]
        fn text_round_trip(a in 0u64..1u64 << 50) {
            let v = FixedVote::from_units(a);
            prop_assert_eq!(v.to_string().parse::<FixedVote>().unwrap(), v);
        }
    }
}
