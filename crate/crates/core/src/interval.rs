//! Continuous time intervals with exclusive endpoints.
//!
//! `(start, end)` contains `t` iff `start < t < end`, so an interval whose
//! endpoints coincide is empty and still has well-defined endpoints.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::time::TimePoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "RawInterval")]
pub struct ContinuousInterval {
    start: TimePoint,
    end: TimePoint,
}

#[derive(Deserialize)]
struct RawInterval {
    start: TimePoint,
    end: TimePoint,
}

impl From<RawInterval> for ContinuousInterval {
    fn from(raw: RawInterval) -> Self {
        ContinuousInterval::new(raw.start, raw.end)
    }
}

/// Where a time point sits relative to an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IntervalPosition {
    pub contains: bool,
    pub before_start: bool,
    pub after_end: bool,
}

impl ContinuousInterval {
    /// `end < start` normalizes to the empty interval `(start, start)`.
    pub fn new(start: impl Into<TimePoint>, end: impl Into<TimePoint>) -> Self {
        let (start, end) = (start.into(), end.into());
        let end = if end < start { start } else { end };
        ContinuousInterval { start, end }
    }

    pub fn empty_at(t: impl Into<TimePoint>) -> Self {
        let t = t.into();
        ContinuousInterval { start: t, end: t }
    }

    pub fn unbounded() -> Self {
        ContinuousInterval {
            start: TimePoint::NegInfinity,
            end: TimePoint::PosInfinity,
        }
    }

    pub fn start(&self) -> TimePoint {
        self.start
    }

    pub fn end(&self) -> TimePoint {
        self.end
    }

    /// No time point lies strictly between the endpoints.
    ///
    /// On the day line this also covers `(d, d+1)`, which contains no day.
    pub fn is_empty(&self) -> bool {
        match (self.start, self.end) {
            (TimePoint::Finite(s), TimePoint::Finite(e)) => e.diff_days(s) <= 1,
            (s, e) => s >= e,
        }
    }

    pub fn contains(&self, t: impl Into<TimePoint>) -> bool {
        let t = t.into();
        self.start < t && t < self.end
    }

    pub fn position(&self, t: impl Into<TimePoint>) -> IntervalPosition {
        let t = t.into();
        let before_start = t <= self.start;
        let after_end = t >= self.end;
        IntervalPosition {
            contains: !before_start && !after_end,
            before_start,
            after_end,
        }
    }

    pub fn is_before_start(&self, t: impl Into<TimePoint>) -> bool {
        t.into() <= self.start
    }

    pub fn is_after_end(&self, t: impl Into<TimePoint>) -> bool {
        t.into() >= self.end
    }

    pub fn intersect(&self, other: &ContinuousInterval) -> ContinuousInterval {
        ContinuousInterval::new(self.start.max(other.start), self.end.min(other.end))
    }

    /// Same set of contained time points.
    pub fn same_extent(&self, other: &ContinuousInterval) -> bool {
        (self.is_empty() && other.is_empty()) || self == other
    }
}

impl fmt::Display for ContinuousInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.start, self.end)
    }
}

/// A union of pairwise non-overlapping, non-empty intervals sorted by start.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IntervalAggregate {
    parts: Vec<ContinuousInterval>,
}

impl IntervalAggregate {
    /// Drops empty inputs and merges overlapping ones.
    ///
    /// Intervals that only share an endpoint are kept apart: the shared point
    /// is excluded from both, so merging would add it.
    pub fn new(intervals: impl IntoIterator<Item = ContinuousInterval>) -> Self {
        let mut items: Vec<ContinuousInterval> =
            intervals.into_iter().filter(|i| !i.is_empty()).collect();
        items.sort_by_key(|i| (i.start, i.end));
        let mut parts: Vec<ContinuousInterval> = Vec::with_capacity(items.len());
        for i in items {
            match parts.last_mut() {
                Some(last) if overlaps(last, &i) => {
                    last.end = last.end.max(i.end);
                }
                _ => parts.push(i),
            }
        }
        IntervalAggregate { parts }
    }

    pub fn parts(&self) -> &[ContinuousInterval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, t: impl Into<TimePoint>) -> bool {
        let t = t.into();
        // parts are sorted and disjoint: find the last part starting before t
        let idx = self.parts.partition_point(|p| p.start < t);
        idx > 0 && self.parts[idx - 1].contains(t)
    }
}

fn overlaps(earlier: &ContinuousInterval, later: &ContinuousInterval) -> bool {
    later.start < earlier.end
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::Day;

    fn day(s: &str) -> Day {
        s.parse().unwrap()
    }

    fn iv(a: &str, b: &str) -> ContinuousInterval {
        ContinuousInterval::new(day(a), day(b))
    }

    #[test]
    fn construction_and_membership() {
        let year = iv("2018-01-01", "2018-12-31");
        assert!(!year.is_empty());
        assert!(year.contains(day("2018-06-15")));
        let e = iv("2018-06-01", "2018-06-01");
        assert!(e.is_empty());
        assert!(!e.contains(day("2018-06-01")));
        assert_eq!(e.start(), TimePoint::Finite(day("2018-06-01")));
        let past = ContinuousInterval::new(TimePoint::NegInfinity, day("2018-01-01"));
        assert!(past.contains(day("2017-12-31")));
        assert!(past.contains(day("0001-01-01")));
        assert!(!past.contains(day("2018-01-01")));
    }

    #[test]
    fn reversed_endpoints_normalize_to_empty() {
        let r = iv("2018-06-10", "2018-06-01");
        assert!(r.is_empty());
        assert_eq!(r.start(), r.end());
        assert_eq!(r.start(), TimePoint::Finite(day("2018-06-10")));
    }

    #[test]
    fn positions_are_exclusive() {
        let i = iv("2018-01-01", "2018-12-31");
        let p = i.position(day("2018-01-01"));
        assert!(p.before_start && !p.contains && !p.after_end);
        let p = i.position(day("2018-06-15"));
        assert!(p.contains && !p.before_start && !p.after_end);
        assert!(i.position(day("2018-12-31")).after_end);
        assert!(!iv("2018-01-01", "2018-01-01").position(day("2018-01-01")).contains);
    }

    #[test]
    fn intersections() {
        let a = iv("2018-01-01", "2018-06-30");
        let b = iv("2018-04-01", "2018-12-31");
        assert_eq!(a.intersect(&b), iv("2018-04-01", "2018-06-30"));
        assert!(iv("2018-01-01", "2018-02-01")
            .intersect(&iv("2018-03-01", "2018-04-01"))
            .is_empty());
        assert_eq!(a.intersect(&a), a);
    }

    #[test]
    fn aggregate_merges_overlaps_only() {
        let agg = IntervalAggregate::new([iv("2018-01-01", "2018-03-31"), iv("2018-06-01", "2018-09-30")]);
        assert_eq!(agg.parts().len(), 2);
        let merged = IntervalAggregate::new([iv("2018-01-01", "2018-06-30"), iv("2018-04-01", "2018-09-30")]);
        assert_eq!(merged.parts(), &[iv("2018-01-01", "2018-09-30")]);
        let touching = IntervalAggregate::new([iv("2018-01-01", "2018-01-03"), iv("2018-01-03", "2018-01-05")]);
        assert_eq!(touching.parts().len(), 2);
        assert!(!touching.contains(day("2018-01-03")));
        assert!(IntervalAggregate::new([]).is_empty());
        assert!(!IntervalAggregate::new([]).contains(day("2018-01-01")));
    }
}
