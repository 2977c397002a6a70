//! Ordered, duplicate-free sets of days with declared bounds.

use std::collections::BTreeSet;
use std::ops::Bound;

use serde::{Deserialize, Serialize};

use crate::calendar::{PropertyCalendar, Rule};
use crate::error::SetError;
use crate::time::{Day, TimePoint};

/// Largest number of days a generator may be asked to scan.
pub const MAX_SET_SPAN: i64 = 366 * 200;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DateSet {
    start: Day,
    end: Day,
    members: BTreeSet<Day>,
}

/// A generator literal: a rule evaluated over declared bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DateSetSpec {
    pub start: TimePoint,
    pub end: TimePoint,
    /// Absent means every day in the bounds.
    #[serde(default)]
    pub rule: Option<Rule>,
}

impl DateSetSpec {
    pub fn build(&self, cal: Option<&PropertyCalendar>) -> Result<DateSet, SetError> {
        match &self.rule {
            Some(rule) => DateSet::from_rule(rule, self.start, self.end, cal),
            None => DateSet::range(self.start.finite()?, self.end.finite()?),
        }
    }
}

impl DateSet {
    /// The empty set anchored at `at`.
    pub fn empty_at(at: Day) -> Self {
        DateSet {
            start: at,
            end: at,
            members: BTreeSet::new(),
        }
    }

    /// Every day in `start..=end`.
    pub fn range(start: Day, end: Day) -> Result<Self, SetError> {
        if end < start {
            return Ok(Self::empty_at(start));
        }
        check_span(start, end)?;
        Ok(DateSet {
            start,
            end,
            members: Day::range_inclusive(start, end).collect(),
        })
    }

    /// Bounds are the smallest and largest member.
    pub fn from_days(days: impl IntoIterator<Item = Day>) -> Option<Self> {
        let members: BTreeSet<Day> = days.into_iter().collect();
        let (start, end) = (*members.first()?, *members.last()?);
        Some(DateSet { start, end, members })
    }

    /// Members of `rule` within the declared bounds.
    ///
    /// Extreme bounds are accepted only for rules that are finite on their own;
    /// the set's bounds are then clipped to the rule's extent.
    pub fn from_rule(
        rule: &Rule,
        start: TimePoint,
        end: TimePoint,
        cal: Option<&PropertyCalendar>,
    ) -> Result<Self, SetError> {
        rule.validate()?;
        let (lo, hi) = match (start, end) {
            (TimePoint::Finite(s), TimePoint::Finite(e)) => (s, e),
            _ => {
                let (rlo, rhi) = rule.finite_extent().ok_or_else(|| {
                    SetError::UnboundedGenerator(format!(
                        "rule has no finite bound within {start}..{end}"
                    ))
                })?;
                let lo = start.as_day().map_or(rlo, |s| s.max(rlo));
                let hi = end.as_day().map_or(rhi, |e| e.min(rhi));
                if end == TimePoint::NegInfinity || start == TimePoint::PosInfinity {
                    return Ok(Self::empty_at(rlo));
                }
                (lo, hi)
            }
        };
        if hi < lo {
            return Ok(Self::empty_at(lo));
        }
        if !rule.is_finite() {
            check_span(lo, hi)?;
        }
        let members = rule.members_between(lo, hi, cal)?.into_iter().collect();
        Ok(DateSet {
            start: lo,
            end: hi,
            members,
        })
    }

    pub fn start(&self) -> Day {
        self.start
    }

    pub fn end(&self) -> Day {
        self.end
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, d: Day) -> bool {
        self.members.contains(&d)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = Day> + '_ {
        self.members.iter().copied()
    }

    pub fn first(&self) -> Option<Day> {
        self.members.first().copied()
    }

    pub fn last(&self) -> Option<Day> {
        self.members.last().copied()
    }

    pub fn union(&self, other: &DateSet) -> DateSet {
        let members: BTreeSet<Day> = self.members.union(&other.members).copied().collect();
        Self::tight(members, self.start.min(other.start))
    }

    pub fn intersect(&self, other: &DateSet) -> DateSet {
        let members: BTreeSet<Day> = self
            .members
            .intersection(&other.members)
            .copied()
            .collect();
        Self::tight(members, self.start.max(other.start))
    }

    /// Identical member enumeration.
    pub fn same_members(&self, other: &DateSet) -> bool {
        self.members == other.members
    }

    /// Keeps members passing `pred`; bounds are unchanged.
    pub fn filter(&self, mut pred: impl FnMut(Day) -> bool) -> DateSet {
        DateSet {
            start: self.start,
            end: self.end,
            members: self.members.iter().copied().filter(|d| pred(*d)).collect(),
        }
    }

    /// Fallible filter, for predicates that consult a calendar.
    pub fn try_filter<E>(
        &self,
        mut pred: impl FnMut(Day) -> Result<bool, E>,
    ) -> Result<DateSet, E> {
        let mut members = BTreeSet::new();
        for d in &self.members {
            if pred(*d)? {
                members.insert(*d);
            }
        }
        Ok(DateSet {
            start: self.start,
            end: self.end,
            members,
        })
    }

    /// Smallest member strictly after `current`.
    pub fn next_succeeding(&self, current: Day) -> Result<Day, SetError> {
        self.members
            .range((Bound::Excluded(current), Bound::Unbounded))
            .next()
            .copied()
            .ok_or(SetError::NoSucceedingDate(current))
    }

    fn tight(members: BTreeSet<Day>, empty_anchor: Day) -> DateSet {
        match (members.first().copied(), members.last().copied()) {
            (Some(start), Some(end)) => DateSet {
                start,
                end,
                members,
            },
            _ => Self::empty_at(empty_anchor),
        }
    }
}

fn check_span(lo: Day, hi: Day) -> Result<(), SetError> {
    let span = hi.diff_days(lo) + 1;
    if span > MAX_SET_SPAN {
        return Err(SetError::UnboundedGenerator(format!(
            "range of {span} days exceeds the {MAX_SET_SPAN}-day limit"
        )));
    }
    Ok(())
}
