use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::EvalError;
use crate::ru::formula::Atom;
use crate::time::{Day, DayRange, TimePoint};

/// `SPAN(begin, end)`: the days from the start of `begin` to the end of `end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Span {
    begin: TimePoint,
    end: TimePoint,
}

impl Span {
    pub fn new(begin: impl Into<TimePoint>, end: impl Into<TimePoint>) -> Self {
        Span {
            begin: begin.into(),
            end: end.into(),
        }
    }

    /// `BEG`.
    pub fn begin(&self) -> TimePoint {
        self.begin
    }

    /// `END` (inclusive).
    pub fn end(&self) -> TimePoint {
        self.end
    }

    pub fn is_empty(&self) -> bool {
        self.end < self.begin
    }

    pub fn contains(&self, d: Day) -> bool {
        self.begin <= d && TimePoint::Finite(d) <= self.end
    }

    /// Days of a finite span; `None` when either end is an extreme.
    pub fn days(&self) -> Option<DayRange> {
        match (self.begin, self.end) {
            (TimePoint::Finite(b), TimePoint::Finite(e)) => Some(Day::range_inclusive(b, e)),
            _ if self.is_empty() => Some(Day::range_inclusive(
                Day::from_ordinal(1).expect("valid"),
                Day::from_ordinal(0).expect("valid"),
            )),
            _ => None,
        }
    }

    pub fn len(&self) -> Option<u64> {
        self.days().map(|d| d.len() as u64)
    }

    /// Is every day of `self` inside `other`?
    pub fn is_within(&self, other: &Span) -> bool {
        self.is_empty() || (other.begin <= self.begin && self.end <= other.end)
    }
}

/// Which atoms are realized on which days, within a finite horizon.
///
/// Outside the recorded facts an atom is not realized (closed world), but only
/// inside the horizon; asking about other days is an error.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trace {
    begin: Day,
    end: Day,
    facts: BTreeMap<Atom, BTreeSet<Day>>,
}

impl Trace {
    pub fn new(begin: Day, end: Day) -> Result<Self, EvalError> {
        if end < begin {
            return Err(EvalError::BadHorizon);
        }
        Ok(Trace {
            begin,
            end,
            facts: BTreeMap::new(),
        })
    }

    pub fn horizon(&self) -> Span {
        Span::new(self.begin, self.end)
    }

    pub fn horizon_begin(&self) -> Day {
        self.begin
    }

    pub fn horizon_end(&self) -> Day {
        self.end
    }

    pub fn in_horizon(&self, d: Day) -> bool {
        self.begin <= d && d <= self.end
    }

    pub fn check_day(&self, d: Day) -> Result<(), EvalError> {
        if self.in_horizon(d) {
            Ok(())
        } else {
            Err(self.out_of_horizon(d))
        }
    }

    pub(crate) fn out_of_horizon(&self, d: impl std::fmt::Display) -> EvalError {
        EvalError::OutOfHorizon {
            day: d.to_string(),
            begin: self.begin,
            end: self.end,
        }
    }

    pub fn record(&mut self, atom: Atom, day: Day) -> Result<(), EvalError> {
        self.check_day(day)?;
        self.facts.entry(atom).or_default().insert(day);
        Ok(())
    }

    pub fn with(mut self, atom: Atom, days: impl IntoIterator<Item = Day>) -> Result<Self, EvalError> {
        for d in days {
            self.record(atom.clone(), d)?;
        }
        Ok(self)
    }

    pub fn realized(&self, atom: &Atom, day: Day) -> bool {
        self.facts.get(atom).is_some_and(|s| s.contains(&day))
    }

    pub fn days_of(&self, atom: &Atom) -> impl Iterator<Item = Day> + '_ {
        self.facts.get(atom).into_iter().flat_map(|s| s.iter().copied())
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.facts.keys()
    }

    /// Copy of the trace with the horizon unchanged and facts after `day` dropped.
    pub fn truncated_after(&self, day: Day) -> Trace {
        let facts = self
            .facts
            .iter()
            .filter_map(|(a, s)| {
                let kept: BTreeSet<Day> = s.range(..=day).copied().collect();
                (!kept.is_empty()).then(|| (a.clone(), kept))
            })
            .collect();
        Trace {
            begin: self.begin,
            end: self.end,
            facts,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn day(s: &str) -> Day {
        s.parse().unwrap()
    }

    #[test]
    fn span_day_counts() {
        assert_eq!(Span::new(day("2018-06-01"), day("2018-06-05")).len(), Some(5));
        assert_eq!(Span::new(day("2018-06-01"), day("2018-06-01")).len(), Some(1));
        let e = Span::new(day("2018-06-05"), day("2018-06-01"));
        assert!(e.is_empty());
        assert_eq!(e.len(), Some(0));
        assert_eq!(e.begin(), TimePoint::Finite(day("2018-06-05")));
        assert_eq!(Span::new(TimePoint::NegInfinity, day("2018-06-01")).len(), None);
    }

    #[test]
    fn recording_respects_horizon() {
        let mut tr = Trace::new(day("2018-06-01"), day("2018-06-30")).unwrap();
        assert!(tr.record(Atom::nullary("p"), day("2018-06-03")).is_ok());
        assert!(matches!(
            tr.record(Atom::nullary("p"), day("2018-07-01")),
            Err(EvalError::OutOfHorizon { .. })
        ));
        assert!(tr.realized(&Atom::nullary("p"), day("2018-06-03")));
        assert!(!tr.realized(&Atom::nullary("q"), day("2018-06-03")));
        assert!(Trace::new(day("2018-06-02"), day("2018-06-01")).is_err());
    }
}
