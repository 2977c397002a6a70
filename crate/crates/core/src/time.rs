//! Calendar days and the extended time line.
//!
//! A [`Day`] is a proleptic-Gregorian date stored as an ordinal counted from
//! 0001-01-01 (ordinal 0). Day arithmetic is plain ordinal arithmetic, which
//! is what "n days later than d" means once the day is the unit of time.
//! [`TimePoint`] adds the two extremes used for open-ended ranges.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::TimeError;

/// Offset between chrono's "days from CE" (0001-01-01 = 1) and our ordinal.
const CE_OFFSET: i32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Day(i32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Weekday {
    Mon,
    Tue,
    Wed,
    Thu,
    Fri,
    Sat,
    Sun,
}

impl Weekday {
    pub const ALL: [Weekday; 7] = [
        Weekday::Mon,
        Weekday::Tue,
        Weekday::Wed,
        Weekday::Thu,
        Weekday::Fri,
        Weekday::Sat,
        Weekday::Sun,
    ];

    /// Monday = 0 .. Sunday = 6.
    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn from_index(i: u8) -> Option<Self> {
        Self::ALL.get(i as usize).copied()
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Weekday::Mon => "Mon",
            Weekday::Tue => "Tue",
            Weekday::Wed => "Wed",
            Weekday::Thu => "Thu",
            Weekday::Fri => "Fri",
            Weekday::Sat => "Sat",
            Weekday::Sun => "Sun",
        }
    }

    pub fn long_name(self) -> &'static str {
        match self {
            Weekday::Mon => "Monday",
            Weekday::Tue => "Tuesday",
            Weekday::Wed => "Wednesday",
            Weekday::Thu => "Thursday",
            Weekday::Fri => "Friday",
            Weekday::Sat => "Saturday",
            Weekday::Sun => "Sunday",
        }
    }

    /// Accepts both short ("Mon") and long ("Monday") names, case-insensitively.
    pub fn parse_name(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|w| {
            s.eq_ignore_ascii_case(w.short_name()) || s.eq_ignore_ascii_case(w.long_name())
        })
    }
}

impl fmt::Display for Weekday {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl Serialize for Weekday {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.short_name())
    }
}

impl<'de> Deserialize<'de> for Weekday {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Weekday::parse_name(&s)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown weekday {s:?}")))
    }
}

impl Day {
    /// Builds a day from calendar fields, rejecting impossible dates.
    pub fn from_ymd(year: i32, month: u32, day_of_month: u32) -> Result<Self, TimeError> {
        let date = NaiveDate::from_ymd_opt(year, month, day_of_month).ok_or(
            TimeError::InvalidDate {
                year,
                month,
                day: day_of_month,
            },
        )?;
        Ok(Day(date.num_days_from_ce() - CE_OFFSET))
    }

    pub fn from_ordinal(ordinal: i64) -> Result<Self, TimeError> {
        let ord = i32::try_from(ordinal).map_err(|_| TimeError::OutOfRange { ordinal })?;
        // reject ordinals chrono cannot represent so that `fields` is total
        NaiveDate::from_num_days_from_ce_opt(ord.checked_add(CE_OFFSET).ok_or(
            TimeError::OutOfRange { ordinal },
        )?)
        .ok_or(TimeError::OutOfRange { ordinal })?;
        Ok(Day(ord))
    }

    pub fn ordinal(self) -> i64 {
        self.0 as i64
    }

    fn naive(self) -> NaiveDate {
        // every constructed Day is representable
        NaiveDate::from_num_days_from_ce_opt(self.0 + CE_OFFSET).expect("day in chrono range")
    }

    pub fn year(self) -> i32 {
        self.naive().year()
    }

    pub fn month(self) -> u32 {
        self.naive().month()
    }

    pub fn day_of_month(self) -> u32 {
        self.naive().day()
    }

    pub fn fields(self) -> (i32, u32, u32) {
        let n = self.naive();
        (n.year(), n.month(), n.day())
    }

    /// 0001-01-01 was a Monday in the proleptic Gregorian calendar.
    pub fn weekday(self) -> Weekday {
        Weekday::from_index(self.0.rem_euclid(7) as u8).expect("index < 7")
    }

    /// `self ⊕ n`: the day `n` days later (earlier for negative `n`).
    pub fn add_days(self, n: i64) -> Result<Day, TimeError> {
        let target = self.ordinal().checked_add(n).ok_or(TimeError::OutOfRange {
            ordinal: i64::MAX,
        })?;
        Day::from_ordinal(target)
    }

    pub fn succ(self) -> Result<Day, TimeError> {
        self.add_days(1)
    }

    pub fn pred(self) -> Result<Day, TimeError> {
        self.add_days(-1)
    }

    /// `self − other` in days.
    pub fn diff_days(self, other: Day) -> i64 {
        self.ordinal() - other.ordinal()
    }

    /// Number of days in this day's month.
    pub fn days_in_month(self) -> u32 {
        days_in_month(self.year(), self.month())
    }

    /// Iterates `from..=to`; empty when `to < from`.
    pub fn range_inclusive(from: Day, to: Day) -> DayRange {
        DayRange {
            next: from.0,
            last: to.0,
        }
    }
}

pub fn is_leap_year(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

pub fn days_in_month(year: i32, month: u32) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap_year(year) => 29,
        2 => 28,
        _ => 0,
    }
}

/// Ascending inclusive iterator over days.
#[derive(Debug, Clone)]
pub struct DayRange {
    next: i32,
    last: i32,
}

impl Iterator for DayRange {
    type Item = Day;

    fn next(&mut self) -> Option<Day> {
        if self.next > self.last {
            return None;
        }
        let d = Day(self.next);
        self.next += 1;
        Some(d)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.last as i64 - self.next as i64 + 1).max(0) as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for DayRange {}

impl fmt::Display for Day {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (y, m, d) = self.fields();
        if (0..=9999).contains(&y) {
            write!(f, "{y:04}-{m:02}-{d:02}")
        } else {
            write!(f, "{y:+}-{m:02}-{d:02}")
        }
    }
}

impl FromStr for Day {
    type Err = TimeError;

    /// Strict `YYYY-MM-DD`.
    fn from_str(s: &str) -> Result<Self, TimeError> {
        let bad = || TimeError::BadDateLiteral(s.to_string());
        let b = s.as_bytes();
        if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
            return Err(bad());
        }
        let digits = |r: std::ops::Range<usize>| -> Result<u32, TimeError> {
            let part = &s[r];
            if !part.bytes().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            part.parse().map_err(|_| bad())
        };
        let year = digits(0..4)? as i32;
        let month = digits(5..7)?;
        let day = digits(8..10)?;
        Day::from_ymd(year, month, day)
    }
}

impl Serialize for Day {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Day {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A point on the extended day line: a finite day or one of the two extremes.
///
/// The derived ordering puts `NegInfinity` below every finite day and
/// `PosInfinity` above.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TimePoint {
    NegInfinity,
    Finite(Day),
    PosInfinity,
}

impl TimePoint {
    pub fn is_extreme(self) -> bool {
        !matches!(self, TimePoint::Finite(_))
    }

    pub fn finite(self) -> Result<Day, TimeError> {
        match self {
            TimePoint::Finite(d) => Ok(d),
            other => Err(TimeError::ExtremeArithmetic(other.to_string())),
        }
    }

    pub fn as_day(self) -> Option<Day> {
        match self {
            TimePoint::Finite(d) => Some(d),
            _ => None,
        }
    }

    pub fn add_days(self, n: i64) -> Result<TimePoint, TimeError> {
        Ok(TimePoint::Finite(self.finite()?.add_days(n)?))
    }

    pub fn diff_days(self, other: TimePoint) -> Result<i64, TimeError> {
        Ok(self.finite()?.diff_days(other.finite()?))
    }
}

impl From<Day> for TimePoint {
    fn from(d: Day) -> Self {
        TimePoint::Finite(d)
    }
}

impl PartialEq<Day> for TimePoint {
    fn eq(&self, other: &Day) -> bool {
        *self == TimePoint::Finite(*other)
    }
}

impl PartialOrd<Day> for TimePoint {
    fn partial_cmp(&self, other: &Day) -> Option<std::cmp::Ordering> {
        self.partial_cmp(&TimePoint::Finite(*other))
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimePoint::NegInfinity => f.write_str("-inf"),
            TimePoint::Finite(d) => d.fmt(f),
            TimePoint::PosInfinity => f.write_str("+inf"),
        }
    }
}

impl FromStr for TimePoint {
    type Err = TimeError;

    fn from_str(s: &str) -> Result<Self, TimeError> {
        match s {
            "-inf" => Ok(TimePoint::NegInfinity),
            "+inf" | "inf" => Ok(TimePoint::PosInfinity),
            other => other.parse().map(TimePoint::Finite),
        }
    }
}

impl Serialize for TimePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TimePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn day(s: &str) -> Day {
        s.parse().unwrap()
    }

    // Zeller's congruence, Gregorian: 0 = Saturday .. 6 = Friday.
    fn zeller(year: i32, month: u32, dom: u32) -> Weekday {
        let (y, m) = if month < 3 {
            (year - 1, month as i32 + 12)
        } else {
            (year, month as i32)
        };
        let k = y.rem_euclid(100);
        let j = y.div_euclid(100);
        let h = (dom as i32 + (13 * (m + 1)) / 5 + k + k / 4 + j / 4 + 5 * j).rem_euclid(7);
        // map Saturday-based index onto Monday-based
        Weekday::from_index(((h + 5) % 7) as u8).unwrap()
    }

    #[test]
    fn make_day_weekday_matches_zeller() {
        let d = Day::from_ymd(2018, 6, 1).unwrap();
        assert_eq!(zeller(2018, 6, 1), Weekday::Fri);
        assert_eq!(d.weekday(), Weekday::Fri);
        for (y, m, dd) in [(1, 1, 1), (1900, 3, 1), (2000, 2, 29), (2024, 12, 31), (1752, 9, 14)] {
            assert_eq!(
                Day::from_ymd(y, m, dd).unwrap().weekday(),
                zeller(y, m, dd),
                "{y}-{m}-{dd}"
            );
        }
    }

    #[test]
    fn leap_rules() {
        assert!(Day::from_ymd(2000, 2, 29).is_ok());
        assert!(matches!(
            Day::from_ymd(2018, 2, 29),
            Err(TimeError::InvalidDate { .. })
        ));
        assert!(Day::from_ymd(1900, 2, 29).is_err());
        assert!(Day::from_ymd(2018, 2, 30).is_err());
        assert!(Day::from_ymd(2018, 13, 1).is_err());
        assert!(Day::from_ymd(2018, 0, 1).is_err());
    }

    #[test]
    fn epoch_is_ordinal_zero() {
        assert_eq!(Day::from_ymd(1, 1, 1).unwrap().ordinal(), 0);
        assert_eq!(Day::from_ymd(1, 1, 2).unwrap().ordinal(), 1);
    }

    #[test]
    fn add_and_diff() {
        assert_eq!(day("2018-06-01").add_days(3).unwrap(), day("2018-06-04"));
        assert_eq!(day("2018-06-01").add_days(-1).unwrap(), day("2018-05-31"));
        assert_eq!(day("2018-12-30").add_days(5).unwrap(), day("2019-01-04"));
        assert_eq!(day("2018-06-04").diff_days(day("2018-06-01")), 3);
        assert_eq!(day("2019-01-01").diff_days(day("2018-01-01")), 365);
        let d = day("2018-06-01");
        assert_eq!(d.diff_days(d), 0);
        assert_eq!(d.add_days(0).unwrap(), d);
    }

    #[test]
    fn extremes_reject_arithmetic() {
        assert!(matches!(
            TimePoint::NegInfinity.add_days(1),
            Err(TimeError::ExtremeArithmetic(_))
        ));
        assert!(TimePoint::PosInfinity
            .diff_days(TimePoint::Finite(day("2018-01-01")))
            .is_err());
        let d = TimePoint::Finite(day("2018-01-01"));
        assert!(TimePoint::NegInfinity < d && d < TimePoint::PosInfinity);
    }

    #[test]
    fn strict_literal_parsing() {
        assert!("2018-6-01".parse::<Day>().is_err());
        assert!("2018-06-01x".parse::<Day>().is_err());
        assert!("+018-06-01".parse::<Day>().is_err());
        assert!("2018-06-31".parse::<Day>().is_err());
        assert_eq!(day("2018-06-01").to_string(), "2018-06-01");
        assert_eq!("-inf".parse::<TimePoint>().unwrap(), TimePoint::NegInfinity);
    }

    #[test]
    fn far_ordinals_are_range_errors() {
        assert!(matches!(
            Day::from_ordinal(i64::MAX),
            Err(TimeError::OutOfRange { .. })
        ));
        assert!(day("2018-01-01").add_days(i64::MAX).is_err());
    }
}
