//! Fixed-point time/cost scalar.
//!
//! Costs and times share one unit. Internally every value is an integer
//! count of milli-units so that additions and comparisons are exact, which
//! the dominance test relies on.

use std::fmt;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Number of fixed-point steps per whole time unit.
pub const MILLIS_PER_UNIT: u64 = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CostError {
    #[error("cost {0} is negative")]
    Negative(f64),
    #[error("cost {0} is not a finite number")]
    NotFinite(f64),
    #[error("cost {0} exceeds the representable range")]
    OutOfRange(f64),
}

/// A non-negative time or cost value in milli-units.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cost(u64);

impl Cost {
    pub const ZERO: Cost = Cost(0);
    pub const MAX: Cost = Cost(u64::MAX);

    pub const fn from_millis(millis: u64) -> Self {
        Cost(millis)
    }

    /// Whole units. Panics on overflow, so only use it for literals.
    pub const fn units(units: u64) -> Self {
        match units.checked_mul(MILLIS_PER_UNIT) {
            Some(m) => Cost(m),
            None => panic!("cost literal overflows"),
        }
    }

    /// Converts a (possibly fractional) unit value, rounding to the nearest milli-unit.
    pub fn try_from_units(value: f64) -> Result<Self, CostError> {
        if !value.is_finite() {
            return Err(CostError::NotFinite(value));
        }
        if value < 0.0 {
            return Err(CostError::Negative(value));
        }
        let millis = (value * MILLIS_PER_UNIT as f64).round();
        if millis >= u64::MAX as f64 {
            return Err(CostError::OutOfRange(value));
        }
        Ok(Cost(millis as u64))
    }

    pub const fn millis(self) -> u64 {
        self.0
    }

    pub fn as_units(self) -> f64 {
        self.0 as f64 / MILLIS_PER_UNIT as f64
    }

    pub fn is_whole(self) -> bool {
        self.0.is_multiple_of(MILLIS_PER_UNIT)
    }

    pub fn checked_add(self, rhs: Cost) -> Option<Cost> {
        self.0.checked_add(rhs.0).map(Cost)
    }

    pub fn checked_sub(self, rhs: Cost) -> Option<Cost> {
        self.0.checked_sub(rhs.0).map(Cost)
    }

    /// `max(0, self - rhs)`.
    pub fn saturating_sub(self, rhs: Cost) -> Cost {
        Cost(self.0.saturating_sub(rhs.0))
    }
}

impl fmt::Debug for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cost({self})")
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let whole = self.0 / MILLIS_PER_UNIT;
        let frac = self.0 % MILLIS_PER_UNIT;
        if frac == 0 {
            write!(f, "{whole}")
        } else {
            let digits = format!("{frac:03}");
            write!(f, "{whole}.{}", digits.trim_end_matches('0'))
        }
    }
}

impl Serialize for Cost {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.is_whole() {
            serializer.serialize_u64(self.0 / MILLIS_PER_UNIT)
        } else {
            serializer.serialize_f64(self.as_units())
        }
    }
}

impl<'de> Deserialize<'de> for Cost {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = f64::deserialize(deserializer)?;
        Cost::try_from_units(value).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_trims_fraction() {
        assert_eq!(Cost::units(26).to_string(), "26");
        assert_eq!(Cost::from_millis(1500).to_string(), "1.5");
        assert_eq!(Cost::from_millis(1005).to_string(), "1.005");
    }

    #[test]
    fn conversion_rejects_bad_values() {
        assert_eq!(Cost::try_from_units(-1.0), Err(CostError::Negative(-1.0)));
        assert!(matches!(Cost::try_from_units(f64::NAN), Err(CostError::NotFinite(_))));
        assert!(matches!(Cost::try_from_units(1e30), Err(CostError::OutOfRange(_))));
        assert_eq!(Cost::try_from_units(2.5).unwrap(), Cost::from_millis(2500));
    }

    #[test]
    fn overflow_is_reported() {
        assert_eq!(Cost::MAX.checked_add(Cost::from_millis(1)), None);
        assert_eq!(Cost::units(3).saturating_sub(Cost::units(7)), Cost::ZERO);
    }

    #[test]
    fn serde_prefers_integers() {
        assert_eq!(serde_json::to_string(&Cost::units(40)).unwrap(), "40");
        assert_eq!(serde_json::to_string(&Cost::from_millis(250)).unwrap(), "0.25");
        let back: Cost = serde_json::from_str("0.25").unwrap();
        assert_eq!(back, Cost::from_millis(250));
        assert!(serde_json::from_str::<Cost>("-3").is_err());
    }
}
