//! Day properties and the rules that decide them.
//!
//! A [`PropertyCalendar`] maps property names such as `GeneralBusinessDay`
//! onto membership [`Rule`]s. The same rule vocabulary is used to generate
//! the members of a [`crate::dateset::DateSet`], so a calendar file and a
//! generator literal share one JSON shape:
//!
//! ```json
//! {"GeneralBusinessDay": {"kind": "weekdays",
//!                         "days": ["Mon","Tue","Wed","Thu","Fri"],
//!                         "holidays": ["2018-12-25"]}}
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Bound;

use serde::{Deserialize, Serialize};

use crate::error::TimeError;
use crate::time::{days_in_month, Day, Weekday};

/// Default search horizon for property lookups, in days.
pub const DEFAULT_HORIZON: u32 = 3660;

/// A membership rule over days.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Rule {
    /// An explicit, finite list of days.
    Explicit { days: BTreeSet<Day> },
    /// Listed weekdays, minus explicit holidays.
    Weekdays {
        days: BTreeSet<Weekday>,
        #[serde(default)]
        holidays: BTreeSet<Day>,
    },
    /// The `n`th given weekday of every month; `n = -1` selects the last one.
    NthWeekdayOfMonth { n: i8, weekday: Weekday },
    /// An arbitrary test over day fields.
    Predicate { expr: DayPredicate },
    /// Days `anchor + lo ..= anchor + hi`.
    Window { anchor: Day, lo: i64, hi: i64 },
}

/// Boolean tests over the fields of a day.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum DayPredicate {
    Always,
    Never,
    WeekdayIn { days: BTreeSet<Weekday> },
    DayOfMonthIn { days: BTreeSet<u32> },
    MonthIn { months: BTreeSet<u32> },
    LastDayOfMonth,
    Is { day: Day },
    Between { from: Day, to: Day },
    /// Membership in another calendar property. Not allowed inside calendar rules.
    HasProperty { name: String },
    Not { expr: Box<DayPredicate> },
    All { exprs: Vec<DayPredicate> },
    Any { exprs: Vec<DayPredicate> },
}

impl DayPredicate {
    pub fn test(&self, d: Day, cal: Option<&PropertyCalendar>) -> Result<bool, TimeError> {
        Ok(match self {
            DayPredicate::Always => true,
            DayPredicate::Never => false,
            DayPredicate::WeekdayIn { days } => days.contains(&d.weekday()),
            DayPredicate::DayOfMonthIn { days } => days.contains(&d.day_of_month()),
            DayPredicate::MonthIn { months } => months.contains(&d.month()),
            DayPredicate::LastDayOfMonth => d.day_of_month() == d.days_in_month(),
            DayPredicate::Is { day } => d == *day,
            DayPredicate::Between { from, to } => *from <= d && d <= *to,
            DayPredicate::HasProperty { name } => match cal {
                Some(cal) => cal.has_property(d, name)?,
                None => return Err(TimeError::UnknownProperty(name.clone())),
            },
            DayPredicate::Not { expr } => !expr.test(d, cal)?,
            DayPredicate::All { exprs } => {
                for e in exprs {
                    if !e.test(d, cal)? {
                        return Ok(false);
                    }
                }
                true
            }
            DayPredicate::Any { exprs } => {
                for e in exprs {
                    if e.test(d, cal)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }

    fn references_property(&self) -> bool {
        match self {
            DayPredicate::HasProperty { .. } => true,
            DayPredicate::Not { expr } => expr.references_property(),
            DayPredicate::All { exprs } | DayPredicate::Any { exprs } => {
                exprs.iter().any(DayPredicate::references_property)
            }
            _ => false,
        }
    }
}

/// The `n`th `weekday` of the given month, if it exists.
pub fn nth_weekday_of_month(year: i32, month: u32, n: i8, weekday: Weekday) -> Option<Day> {
    let first = Day::from_ymd(year, month, 1).ok()?;
    let dim = days_in_month(year, month);
    let wd = weekday.index() as i64;
    if n == -1 {
        let last = Day::from_ymd(year, month, dim).ok()?;
        let back = (last.weekday().index() as i64 - wd).rem_euclid(7);
        return last.add_days(-back).ok();
    }
    if !(1..=5).contains(&n) {
        return None;
    }
    let offset = (wd - first.weekday().index() as i64).rem_euclid(7) + 7 * (n as i64 - 1);
    if offset >= dim as i64 {
        return None;
    }
    first.add_days(offset).ok()
}

fn next_month(year: i32, month: u32) -> (i32, u32) {
    if month == 12 {
        (year + 1, 1)
    } else {
        (year, month + 1)
    }
}

impl Rule {
    pub fn validate(&self) -> Result<(), TimeError> {
        match self {
            Rule::NthWeekdayOfMonth { n, .. } if !(*n == -1 || (1..=5).contains(n)) => Err(
                TimeError::InvalidCalendar(format!("nth weekday index {n} not in 1..=5 or -1")),
            ),
            Rule::Window { lo, hi, .. } if lo > hi => Err(TimeError::InvalidCalendar(format!(
                "window lower offset {lo} exceeds upper offset {hi}"
            ))),
            _ => Ok(()),
        }
    }

    /// Whether the rule only ever admits finitely many days.
    pub fn is_finite(&self) -> bool {
        matches!(self, Rule::Explicit { .. } | Rule::Window { .. })
    }

    /// The smallest and largest days a finite rule admits.
    pub fn finite_extent(&self) -> Option<(Day, Day)> {
        match self {
            Rule::Explicit { days } => Some((*days.first()?, *days.last()?)),
            Rule::Window { anchor, lo, hi } => {
                Some((anchor.add_days(*lo).ok()?, anchor.add_days(*hi).ok()?))
            }
            _ => None,
        }
    }

    pub fn contains(&self, d: Day, cal: Option<&PropertyCalendar>) -> Result<bool, TimeError> {
        Ok(match self {
            Rule::Explicit { days } => days.contains(&d),
            Rule::Weekdays { days, holidays } => {
                days.contains(&d.weekday()) && !holidays.contains(&d)
            }
            Rule::NthWeekdayOfMonth { n, weekday } => {
                nth_weekday_of_month(d.year(), d.month(), *n, *weekday) == Some(d)
            }
            Rule::Predicate { expr } => expr.test(d, cal)?,
            Rule::Window { anchor, lo, hi } => {
                let off = d.diff_days(*anchor);
                *lo <= off && off <= *hi
            }
        })
    }

    /// Members in `from..=to`, ascending.
    pub fn members_between(
        &self,
        from: Day,
        to: Day,
        cal: Option<&PropertyCalendar>,
    ) -> Result<Vec<Day>, TimeError> {
        if to < from {
            return Ok(Vec::new());
        }
        match self {
            Rule::Explicit { days } => Ok(days.range(from..=to).copied().collect()),
            Rule::NthWeekdayOfMonth { n, weekday } => {
                let mut out = Vec::new();
                let (mut y, mut m) = (from.year(), from.month());
                let (ty, tm) = (to.year(), to.month());
                while (y, m) <= (ty, tm) {
                    if let Some(d) = nth_weekday_of_month(y, m, *n, *weekday) {
                        if from <= d && d <= to {
                            out.push(d);
                        }
                    }
                    (y, m) = next_month(y, m);
                }
                Ok(out)
            }
            Rule::Window { anchor, lo, hi } => {
                let lo_d = anchor.add_days(*lo)?.max(from);
                let hi_d = anchor.add_days(*hi)?.min(to);
                Ok(Day::range_inclusive(lo_d, hi_d).collect())
            }
            _ => {
                let mut out = Vec::new();
                for d in Day::range_inclusive(from, to) {
                    if self.contains(d, cal)? {
                        out.push(d);
                    }
                }
                Ok(out)
            }
        }
    }

    fn count_between(&self, from: Day, to: Day) -> Result<u64, TimeError> {
        if to < from {
            return Ok(0);
        }
        match self {
            Rule::Explicit { days } => Ok(days.range(from..=to).count() as u64),
            Rule::Weekdays { days, holidays } => {
                let total = to.diff_days(from) + 1;
                let full_weeks = total / 7;
                let mut count = full_weeks as u64 * days.len() as u64;
                // the leftover partial week starts on from's weekday
                let start = from.weekday().index() as i64;
                for k in 0..total % 7 {
                    let wd = Weekday::from_index(((start + k) % 7) as u8).expect("index < 7");
                    if days.contains(&wd) {
                        count += 1;
                    }
                }
                let excluded = holidays
                    .range(from..=to)
                    .filter(|h| days.contains(&h.weekday()))
                    .count() as u64;
                Ok(count - excluded)
            }
            Rule::Window { anchor, lo, hi } => {
                let lo_d = anchor.add_days(*lo)?.max(from);
                let hi_d = anchor.add_days(*hi)?.min(to);
                Ok((hi_d.diff_days(lo_d) + 1).max(0) as u64)
            }
            _ => Ok(self.members_between(from, to, None)?.len() as u64),
        }
    }

    /// Earliest member strictly after `d` and no later than `limit`.
    fn next_after(&self, d: Day, limit: Day) -> Result<Option<Day>, TimeError> {
        if limit <= d {
            return Ok(None);
        }
        let start = d.succ()?;
        match self {
            Rule::Explicit { days } => Ok(days
                .range((Bound::Excluded(d), Bound::Included(limit)))
                .next()
                .copied()),
            Rule::NthWeekdayOfMonth { n, weekday } => {
                let (mut y, mut m) = (start.year(), start.month());
                let (ly, lm) = (limit.year(), limit.month());
                while (y, m) <= (ly, lm) {
                    if let Some(c) = nth_weekday_of_month(y, m, *n, *weekday) {
                        if c > d && c <= limit {
                            return Ok(Some(c));
                        }
                    }
                    (y, m) = next_month(y, m);
                }
                Ok(None)
            }
            Rule::Window { anchor, lo, hi } => {
                let candidate = anchor.add_days(*lo)?.max(start);
                let last = anchor.add_days(*hi)?;
                Ok((candidate <= last && candidate <= limit).then_some(candidate))
            }
            _ => {
                for c in Day::range_inclusive(start, limit) {
                    if self.contains(c, None)? {
                        return Ok(Some(c));
                    }
                }
                Ok(None)
            }
        }
    }
}

/// Named day properties and their membership rules.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, Rule>", into = "BTreeMap<String, Rule>")]
pub struct PropertyCalendar {
    rules: BTreeMap<String, Rule>,
}

impl TryFrom<BTreeMap<String, Rule>> for PropertyCalendar {
    type Error = TimeError;

    fn try_from(rules: BTreeMap<String, Rule>) -> Result<Self, TimeError> {
        let mut cal = PropertyCalendar::default();
        for (name, rule) in rules {
            cal = cal.with_rule(name, rule)?;
        }
        Ok(cal)
    }
}

impl From<PropertyCalendar> for BTreeMap<String, Rule> {
    fn from(cal: PropertyCalendar) -> Self {
        cal.rules
    }
}

impl PropertyCalendar {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_json(text: &str) -> Result<Self, TimeError> {
        serde_json::from_str(text).map_err(|e| TimeError::InvalidCalendar(e.to_string()))
    }

    /// Adds (or replaces) a property. Rules may not reference other properties.
    pub fn with_rule(mut self, name: impl Into<String>, rule: Rule) -> Result<Self, TimeError> {
        let name = name.into();
        rule.validate()?;
        if let Rule::Predicate { expr } = &rule {
            if expr.references_property() {
                return Err(TimeError::InvalidCalendar(format!(
                    "rule for {name:?} refers to another property"
                )));
            }
        }
        self.rules.insert(name, rule);
        Ok(self)
    }

    pub fn rule(&self, name: &str) -> Result<&Rule, TimeError> {
        self.rules
            .get(name)
            .ok_or_else(|| TimeError::UnknownProperty(name.to_string()))
    }

    pub fn properties(&self) -> impl Iterator<Item = &str> {
        self.rules.keys().map(String::as_str)
    }

    pub fn has_property(&self, d: Day, name: &str) -> Result<bool, TimeError> {
        self.rule(name)?.contains(d, None)
    }

    /// Number of days in `from..=to` carrying the property; zero when `to < from`.
    pub fn count_days_with_property(
        &self,
        from: Day,
        to: Day,
        name: &str,
    ) -> Result<u64, TimeError> {
        self.rule(name)?.count_between(from, to)
    }

    /// Earliest day strictly after `d` with the property, at most `horizon` days out.
    pub fn first_with_property_after(
        &self,
        d: Day,
        name: &str,
        horizon: u32,
    ) -> Result<Day, TimeError> {
        let rule = self.rule(name)?;
        let limit = d.add_days(horizon as i64)?;
        rule.next_after(d, limit)?
            .ok_or_else(|| TimeError::NoSuchDayWithinHorizon {
                property: name.to_string(),
                after: d,
                horizon,
            })
    }

    /// Latest day strictly before `d` with the property, at most `horizon` days back.
    pub fn last_with_property_before(
        &self,
        d: Day,
        name: &str,
        horizon: u32,
    ) -> Result<Day, TimeError> {
        let rule = self.rule(name)?;
        let mut c = d;
        for _ in 0..horizon {
            c = c.pred()?;
            if rule.contains(c, None)? {
                return Ok(c);
            }
        }
        Err(TimeError::NoSuchDayWithinHorizon {
            property: name.to_string(),
            after: d,
            horizon,
        })
    }

    /// `n` property-days after (positive) or before (negative) `d`.
    pub fn offset_by_property(
        &self,
        d: Day,
        name: &str,
        n: i64,
        horizon: u32,
    ) -> Result<Day, TimeError> {
        let mut cur = d;
        for _ in 0..n.unsigned_abs() {
            cur = if n > 0 {
                self.first_with_property_after(cur, name, horizon)?
            } else {
                self.last_with_property_before(cur, name, horizon)?
            };
        }
        Ok(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn day(s: &str) -> Day {
        s.parse().unwrap()
    }

    fn mon_fri() -> BTreeSet<Weekday> {
        [Weekday::Mon, Weekday::Tue, Weekday::Wed, Weekday::Thu, Weekday::Fri].into()
    }

    fn cal() -> PropertyCalendar {
        PropertyCalendar::new()
            .with_rule(
                "GeneralBusinessDay",
                Rule::Weekdays {
                    days: mon_fri(),
                    holidays: BTreeSet::new(),
                },
            )
            .unwrap()
            .with_rule("Nothing", Rule::Explicit { days: BTreeSet::new() })
            .unwrap()
            .with_rule(
                "FirstMonday",
                Rule::NthWeekdayOfMonth {
                    n: 1,
                    weekday: Weekday::Mon,
                },
            )
            .unwrap()
            .with_rule(
                "Everyday",
                Rule::Predicate {
                    expr: DayPredicate::Always,
                },
            )
            .unwrap()
    }

    fn scan_count(cal: &PropertyCalendar, from: Day, to: Day, p: &str) -> u64 {
        Day::range_inclusive(from, to)
            .filter(|d| cal.has_property(*d, p).unwrap())
            .count() as u64
    }

    #[test]
    fn business_week_counts() {
        let c = cal();
        let n = c
            .count_days_with_property(day("2018-06-04"), day("2018-06-08"), "GeneralBusinessDay")
            .unwrap();
        assert_eq!(n, scan_count(&c, day("2018-06-04"), day("2018-06-08"), "GeneralBusinessDay"));
        assert_eq!(n, 5);
        assert_eq!(
            c.count_days_with_property(day("2018-06-02"), day("2018-06-03"), "GeneralBusinessDay")
                .unwrap(),
            0
        );
        assert_eq!(
            c.count_days_with_property(day("2018-01-01"), day("2018-12-31"), "Nothing")
                .unwrap(),
            0
        );
    }

    #[test]
    fn first_business_day_after_friday() {
        let c = cal();
        assert_eq!(
            c.first_with_property_after(day("2018-06-01"), "GeneralBusinessDay", DEFAULT_HORIZON)
                .unwrap(),
            day("2018-06-04")
        );
        assert_eq!(
            c.first_with_property_after(day("2018-06-03"), "Everyday", DEFAULT_HORIZON)
                .unwrap(),
            day("2018-06-04")
        );
        assert!(matches!(
            c.first_with_property_after(day("2018-06-03"), "Nothing", DEFAULT_HORIZON),
            Err(TimeError::NoSuchDayWithinHorizon { .. })
        ));
    }

    #[test]
    fn explicit_set_all_before_is_empty_future() {
        let c = PropertyCalendar::new()
            .with_rule(
                "Past",
                Rule::Explicit {
                    days: [day("2018-01-01"), day("2018-02-01")].into(),
                },
            )
            .unwrap();
        assert!(c
            .first_with_property_after(day("2018-03-01"), "Past", 10)
            .is_err());
    }

    #[test]
    fn has_property_cases() {
        let c = cal();
        assert!(!c.has_property(day("2018-06-02"), "GeneralBusinessDay").unwrap());
        assert!(c.has_property(day("2018-06-04"), "FirstMonday").unwrap());
        // linear scan of June 2018: only the 4th is a first Monday
        let firsts: Vec<Day> = Day::range_inclusive(day("2018-06-01"), day("2018-06-30"))
            .filter(|d| d.weekday() == Weekday::Mon && d.day_of_month() <= 7)
            .collect();
        assert_eq!(firsts, vec![day("2018-06-04")]);
        let single = PropertyCalendar::new()
            .with_rule("One", Rule::Explicit { days: [day("2018-06-04")].into() })
            .unwrap();
        assert!(single.has_property(day("2018-06-04"), "One").unwrap());
        assert!(matches!(
            c.has_property(day("2018-06-04"), "Missing"),
            Err(TimeError::UnknownProperty(_))
        ));
    }

    #[test]
    fn holidays_override_weekday_match() {
        let c = PropertyCalendar::from_json(
            r#"{"GeneralBusinessDay": {"kind":"weekdays","days":["Mon","Tue","Wed","Thu","Fri"],"holidays":["2018-12-25"]}}"#,
        )
        .unwrap();
        assert!(!c.has_property(day("2018-12-25"), "GeneralBusinessDay").unwrap());
        assert!(c.has_property(day("2018-12-24"), "GeneralBusinessDay").unwrap());
        assert_eq!(
            c.first_with_property_after(day("2018-12-24"), "GeneralBusinessDay", 10)
                .unwrap(),
            day("2018-12-26")
        );
    }

    #[test]
    fn last_weekday_of_month() {
        assert_eq!(
            nth_weekday_of_month(2018, 6, -1, Weekday::Fri),
            Some(day("2018-06-29"))
        );
        assert_eq!(nth_weekday_of_month(2018, 6, 5, Weekday::Mon), None);
        assert_eq!(
            nth_weekday_of_month(2018, 4, 5, Weekday::Mon),
            Some(day("2018-04-30"))
        );
    }

    #[test]
    fn calendar_rejects_property_references_and_bad_rules() {
        let err = PropertyCalendar::new().with_rule(
            "Loop",
            Rule::Predicate {
                expr: DayPredicate::HasProperty { name: "Loop".into() },
            },
        );
        assert!(matches!(err, Err(TimeError::InvalidCalendar(_))));
        assert!(PropertyCalendar::from_json(r#"{"X":{"kind":"nth_weekday_of_month","n":0,"weekday":"Mon"}}"#).is_err());
        assert!(PropertyCalendar::from_json(r#"{"X":{"kind":"bogus"}}"#).is_err());
    }

    #[test]
    fn offset_by_business_days() {
        let c = cal();
        assert_eq!(
            c.offset_by_property(day("2018-06-01"), "GeneralBusinessDay", 2, 100)
                .unwrap(),
            day("2018-06-05")
        );
        assert_eq!(
            c.offset_by_property(day("2018-06-04"), "GeneralBusinessDay", -1, 100)
                .unwrap(),
            day("2018-06-01")
        );
    }
}
