use core::fmt;
use core::ops::{Add, AddAssign, Sub};

use serde::{Deserialize, Serialize};

/// Travel time stored as an integer count of thousandths of a minute.
///
/// Path costs are compared for exact equality when reasonable paths are
/// selected, so times are kept in fixed point instead of `f64`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Minutes(i64);

impl Minutes {
    pub const ZERO: Minutes = Minutes(0);
    pub const TICKS_PER_MINUTE: i64 = 1000;

    pub const fn from_ticks(ticks: i64) -> Self {
        Minutes(ticks)
    }

    pub const fn whole(minutes: i64) -> Self {
        Minutes(minutes * Self::TICKS_PER_MINUTE)
    }

    /// Rounds to the nearest thousandth of a minute. Returns `None` for
    /// non-finite input.
    pub fn from_f64(minutes: f64) -> Option<Self> {
        if !minutes.is_finite() {
            return None;
        }
        let ticks = libm::round(minutes * Self::TICKS_PER_MINUTE as f64);
        if ticks.abs() > (i64::MAX / 4) as f64 {
            return None;
        }
        Some(Minutes(ticks as i64))
    }

    pub const fn ticks(self) -> i64 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / Self::TICKS_PER_MINUTE as f64
    }

    pub const fn is_positive(self) -> bool {
        self.0 > 0
    }
}

impl Add for Minutes {
    type Output = Minutes;
    fn add(self, rhs: Minutes) -> Minutes {
        Minutes(self.0 + rhs.0)
    }
}

impl AddAssign for Minutes {
    fn add_assign(&mut self, rhs: Minutes) {
        self.0 += rhs.0;
    }
}

impl Sub for Minutes {
    type Output = Minutes;
    fn sub(self, rhs: Minutes) -> Minutes {
        Minutes(self.0 - rhs.0)
    }
}

impl fmt::Display for Minutes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let whole = self.0 / Self::TICKS_PER_MINUTE;
        let frac = (self.0 % Self::TICKS_PER_MINUTE).abs();
        if frac == 0 {
            write!(f, "{whole}")
        } else {
            let sign = if self.0 < 0 && whole == 0 { "-" } else { "" };
            let mut digits = alloc::format!("{frac:03}");
            while digits.ends_with('0') {
                digits.pop();
            }
            write!(f, "{sign}{whole}.{digits}")
        }
    }
}

/// Wall-clock instant in seconds since the Unix epoch, timezone-naive.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Timestamp(pub i64);

impl Timestamp {
    pub const fn seconds(self) -> i64 {
        self.0
    }

    pub const fn plus_minutes(self, minutes: i64) -> Timestamp {
        Timestamp(self.0 + minutes * 60)
    }

    pub const fn plus_seconds(self, seconds: i64) -> Timestamp {
        Timestamp(self.0 + seconds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn minutes_round_trip_and_display() {
        assert_eq!(Minutes::from_f64(2.5).unwrap().ticks(), 2500);
        assert_eq!(Minutes::from_f64(0.0004).unwrap(), Minutes::ZERO);
        assert!(Minutes::from_f64(f64::NAN).is_none());
        assert_eq!(Minutes::whole(12).to_string(), "12");
        assert_eq!(Minutes::from_ticks(2250).to_string(), "2.25");
        assert_eq!(Minutes::from_ticks(-500).to_string(), "-0.5");
        assert_eq!((Minutes::whole(7) + Minutes::whole(5)).as_f64(), 12.0);
    }
}
