//! Bags of alternative days.
//!
//! A [`DateBag`] denotes one date whose value is only fixed during
//! performance. Until then, comparisons against it are three-valued.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::SetError;
use crate::time::Day;

/// Kleene three-valued truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tri {
    True,
    False,
    Indeterminate,
}

impl Tri {
    pub fn known(self) -> Option<bool> {
        match self {
            Tri::True => Some(true),
            Tri::False => Some(false),
            Tri::Indeterminate => None,
        }
    }

    /// `Tri` for a test that holds on `yes` of `total` cases.
    pub fn from_counts(yes: usize, total: usize) -> Tri {
        if total == 0 {
            Tri::Indeterminate
        } else if yes == total {
            Tri::True
        } else if yes == 0 {
            Tri::False
        } else {
            Tri::Indeterminate
        }
    }

    pub fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::False, _) | (_, Tri::False) => Tri::False,
            (Tri::True, Tri::True) => Tri::True,
            _ => Tri::Indeterminate,
        }
    }

    pub fn or(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::True, _) | (_, Tri::True) => Tri::True,
            (Tri::False, Tri::False) => Tri::False,
            _ => Tri::Indeterminate,
        }
    }

    /// Consistent with a definite value: `Indeterminate` is consistent with both.
    pub fn admits(self, value: bool) -> bool {
        self.known().is_none_or(|k| k == value)
    }
}

impl std::ops::Not for Tri {
    type Output = Tri;

    fn not(self) -> Tri {
        match self {
            Tri::True => Tri::False,
            Tri::False => Tri::True,
            Tri::Indeterminate => Tri::Indeterminate,
        }
    }
}

impl From<bool> for Tri {
    fn from(b: bool) -> Self {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tri::True => "true",
            Tri::False => "false",
            Tri::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Before,
    After,
    Same,
}

impl Relation {
    pub fn holds(self, a: Day, b: Day) -> bool {
        match self {
            Relation::Before => a < b,
            Relation::After => a > b,
            Relation::Same => a == b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub chosen: Day,
    pub resolved_at: Day,
    pub reason: String,
}

/// A multiset of alternative days, optionally resolved to one of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateBag {
    alternatives: Vec<Day>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    resolution: Option<Resolution>,
}

impl DateBag {
    pub fn new(alternatives: impl IntoIterator<Item = Day>) -> Self {
        let mut alternatives: Vec<Day> = alternatives.into_iter().collect();
        alternatives.sort();
        DateBag {
            alternatives,
            resolution: None,
        }
    }

    /// Sorted alternatives, duplicates kept.
    pub fn alternatives(&self) -> &[Day] {
        &self.alternatives
    }

    pub fn distinct(&self) -> Vec<Day> {
        let mut v = self.alternatives.clone();
        v.dedup();
        v
    }

    pub fn multiplicities(&self) -> BTreeMap<Day, usize> {
        let mut m = BTreeMap::new();
        for d in &self.alternatives {
            *m.entry(*d).or_insert(0) += 1;
        }
        m
    }

    pub fn len(&self) -> usize {
        self.alternatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alternatives.is_empty()
    }

    pub fn contains(&self, d: Day) -> bool {
        self.alternatives.binary_search(&d).is_ok()
    }

    pub fn start(&self) -> Option<Day> {
        self.alternatives.first().copied()
    }

    pub fn end(&self) -> Option<Day> {
        self.alternatives.last().copied()
    }

    pub fn resolution(&self) -> Option<&Resolution> {
        self.resolution.as_ref()
    }

    pub fn chosen(&self) -> Option<Day> {
        self.resolution.as_ref().map(|r| r.chosen)
    }

    pub fn is_resolved(&self) -> bool {
        self.resolution.is_some()
    }

    /// Fixes the bag to one of its alternatives. Resolution happens once.
    pub fn resolve(
        &self,
        chosen: Day,
        resolved_at: Day,
        reason: impl Into<String>,
    ) -> Result<DateBag, SetError> {
        if let Some(r) = &self.resolution {
            return Err(SetError::AlreadyResolved(r.chosen));
        }
        if !self.contains(chosen) {
            return Err(SetError::NotAnAlternative(chosen));
        }
        Ok(DateBag {
            alternatives: self.alternatives.clone(),
            resolution: Some(Resolution {
                chosen,
                resolved_at,
                reason: reason.into(),
            }),
        })
    }

    /// `bag <relation> t`. Unresolved bags answer only when every alternative agrees.
    pub fn compare(&self, t: Day, relation: Relation) -> Tri {
        if let Some(c) = self.chosen() {
            return relation.holds(c, t).into();
        }
        let yes = self
            .alternatives
            .iter()
            .filter(|a| relation.holds(**a, t))
            .count();
        Tri::from_counts(yes, self.alternatives.len())
    }

    /// Multiset sum. The result is unresolved.
    pub fn union(&self, other: &DateBag) -> DateBag {
        DateBag::new(
            self.alternatives
                .iter()
                .chain(other.alternatives.iter())
                .copied(),
        )
    }

    /// Multiset intersection (minimum multiplicity). The result is unresolved.
    pub fn intersect(&self, other: &DateBag) -> DateBag {
        let theirs = other.multiplicities();
        let mut out = Vec::new();
        for (d, n) in self.multiplicities() {
            let k = n.min(theirs.get(&d).copied().unwrap_or(0));
            out.extend(std::iter::repeat_n(d, k));
        }
        DateBag::new(out)
    }

    /// Equal multiplicities of every day, ignoring resolution.
    pub fn same_alternatives(&self, other: &DateBag) -> bool {
        self.alternatives == other.alternatives
    }

    /// Keeps alternatives passing `pred`. A resolution survives only if its
    /// chosen day passes.
    pub fn filter(&self, mut pred: impl FnMut(Day) -> bool) -> DateBag {
        let alternatives: Vec<Day> = self.alternatives.iter().copied().filter(|d| pred(*d)).collect();
        let resolution = self
            .resolution
            .clone()
            .filter(|r| alternatives.contains(&r.chosen));
        DateBag {
            alternatives,
            resolution,
        }
    }

    /// Shifts every alternative (and any resolution) by `n` days.
    pub fn shift(&self, n: i64) -> Result<DateBag, SetError> {
        let alternatives = self
            .alternatives
            .iter()
            .map(|d| d.add_days(n))
            .collect::<Result<Vec<_>, _>>()?;
        let resolution = match &self.resolution {
            Some(r) => Some(Resolution {
                chosen: r.chosen.add_days(n)?,
                resolved_at: r.resolved_at,
                reason: r.reason.clone(),
            }),
            None => None,
        };
        Ok(DateBag {
            alternatives,
            resolution,
        })
    }
}

impl fmt::Display for DateBag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{|")?;
        for (i, d) in self.alternatives.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str("|}")?;
        if let Some(c) = self.chosen() {
            write!(f, " = {c}")?;
        }
        Ok(())
    }
}
