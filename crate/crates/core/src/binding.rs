//! Named dates and their binding histories.
//!
//! Every binding is appended; nothing is overwritten. The current value of a
//! name is its latest record, and earlier designations stay queryable.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bag::DateBag;
use crate::error::TimeError;
use crate::time::Day;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BindingSource {
    /// Fixed by the contract text.
    Text,
    /// Designated while the contract is performed.
    Performance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BindingValue {
    Day(Day),
    Bag(DateBag),
}

impl fmt::Display for BindingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BindingValue::Day(d) => d.fmt(f),
            BindingValue::Bag(b) => b.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BindingRecord {
    pub value: BindingValue,
    pub bound_at: Day,
    pub bound_by: String,
    #[serde(default)]
    pub reason: String,
    pub source: BindingSource,
    #[serde(default)]
    pub properties: BTreeSet<String>,
}

/// What is known about a name: where it was set and its history.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Designation {
    pub is_specified: bool,
    pub has_been_designated: bool,
    pub current: Option<BindingValue>,
    pub history: Vec<BindingRecord>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BindingRegistry {
    entries: BTreeMap<String, Vec<BindingRecord>>,
}

impl BindingRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns a registry with `record` appended to `name`'s history.
    pub fn bind(&self, name: &str, record: BindingRecord) -> Result<BindingRegistry, TimeError> {
        if let Some(prev) = self.entries.get(name).and_then(|h| h.last()) {
            if record.bound_at < prev.bound_at {
                return Err(TimeError::NonMonotonicBinding {
                    name: name.to_string(),
                    bound_at: record.bound_at,
                    previous: prev.bound_at,
                });
            }
        }
        let mut next = self.clone();
        next.entries
            .entry(name.to_string())
            .or_default()
            .push(record);
        Ok(next)
    }

    pub fn history(&self, name: &str) -> &[BindingRecord] {
        self.entries.get(name).map_or(&[], Vec::as_slice)
    }

    pub fn current(&self, name: &str) -> Option<&BindingValue> {
        self.history(name).last().map(|r| &r.value)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn designation(&self, name: &str) -> Designation {
        let history = self.history(name).to_vec();
        Designation {
            is_specified: history.iter().any(|r| r.source == BindingSource::Text),
            has_been_designated: history
                .iter()
                .any(|r| r.source == BindingSource::Performance),
            current: history.last().map(|r| r.value.clone()),
            history,
        }
    }

    /// The same registry restricted to records bound on or before `day`.
    pub fn as_of(&self, day: Day) -> BindingRegistry {
        let entries = self
            .entries
            .iter()
            .filter_map(|(k, h)| {
                let kept: Vec<BindingRecord> =
                    h.iter().filter(|r| r.bound_at <= day).cloned().collect();
                (!kept.is_empty()).then(|| (k.clone(), kept))
            })
            .collect();
        BindingRegistry { entries }
    }

    /// Replaces the value of the latest record, keeping the record itself.
    ///
    /// Only used to attach a resolution to a bag that is already bound; the
    /// previous record is kept in the history as well.
    pub fn resolve_bag(
        &self,
        name: &str,
        resolved: DateBag,
        at: Day,
        by: &str,
        reason: &str,
    ) -> Result<BindingRegistry, TimeError> {
        self.bind(
            name,
            BindingRecord {
                value: BindingValue::Bag(resolved),
                bound_at: at,
                bound_by: by.to_string(),
                reason: reason.to_string(),
                source: BindingSource::Performance,
                properties: BTreeSet::new(),
            },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn day(s: &str) -> Day {
        s.parse().unwrap()
    }

    fn rec(value: &str, at: &str, source: BindingSource) -> BindingRecord {
        BindingRecord {
            value: BindingValue::Day(day(value)),
            bound_at: day(at),
            bound_by: "PartyA".into(),
            reason: "test".into(),
            source,
            properties: BTreeSet::new(),
        }
    }

    #[test]
    fn append_only_histories() {
        let r = BindingRegistry::new();
        let r1 = r
            .bind("EarlyTerminationDate", rec("2018-07-01", "2018-06-01", BindingSource::Text))
            .unwrap();
        assert_eq!(r1.history("EarlyTerminationDate").len(), 1);
        assert!(r.history("EarlyTerminationDate").is_empty());
        let r2 = r1
            .bind("EarlyTerminationDate", rec("2018-07-02", "2018-06-01", BindingSource::Text))
            .unwrap();
        assert_eq!(r2.history("EarlyTerminationDate").len(), 2);
        assert_eq!(
            r2.history("EarlyTerminationDate")[0].value,
            BindingValue::Day(day("2018-07-01"))
        );
        assert!(matches!(
            r2.bind("EarlyTerminationDate", rec("2018-07-03", "2018-05-01", BindingSource::Text)),
            Err(TimeError::NonMonotonicBinding { .. })
        ));
    }

    #[test]
    fn designation_flags() {
        let r = BindingRegistry::new();
        let d = r.designation("Nope");
        assert!(!d.is_specified && !d.has_been_designated && d.current.is_none());
        assert!(d.history.is_empty());

        let r = r
            .bind("EarlyTerminationDate", rec("2018-07-01", "2018-06-01", BindingSource::Text))
            .unwrap();
        let d = r.designation("EarlyTerminationDate");
        assert!(d.is_specified && !d.has_been_designated);
        assert_eq!(d.history.len(), 1);

        let r = r
            .bind(
                "EarlyTerminationDate",
                rec("2018-06-20", "2018-06-10", BindingSource::Performance),
            )
            .unwrap();
        let d = r.designation("EarlyTerminationDate");
        assert!(d.is_specified && d.has_been_designated);
        assert_eq!(d.current, Some(BindingValue::Day(day("2018-06-20"))));
        // the earlier value is still there
        assert_eq!(d.history[0].value, BindingValue::Day(day("2018-07-01")));
    }

    #[test]
    fn as_of_replays_prefix() {
        let r = BindingRegistry::new()
            .bind("X", rec("2018-07-01", "2018-06-01", BindingSource::Text))
            .unwrap()
            .bind("X", rec("2018-06-20", "2018-06-10", BindingSource::Performance))
            .unwrap();
        assert_eq!(r.as_of(day("2018-06-05")).history("X").len(), 1);
        assert_eq!(r.as_of(day("2018-05-01")).current("X"), None);
    }
}
