use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dateset::DateSetSpec;
use crate::deontic::Right;
use crate::error::ScenarioError;
use crate::interval::ContinuousInterval;
use crate::ru::Span;
use crate::time::Day;

/// Longest horizon a scenario may declare, in days.
pub const MAX_HORIZON_DAYS: i64 = 366 * 20;

/// A "what if" performance of a contract: declarations plus dated steps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    #[serde(default)]
    pub description: String,
    pub horizon: Horizon,
    /// Calendar file, resolved next to the scenario or on the calendar path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calendar: Option<String>,
    /// Contract term; defaults to the whole horizon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub term: Option<ContinuousInterval>,
    #[serde(default)]
    pub bindings: Vec<InitialBinding>,
    #[serde(default)]
    pub events: Vec<EventDecl>,
    #[serde(default)]
    pub rights: Vec<Right>,
    #[serde(default)]
    pub repetitions: Vec<RepetitionDecl>,
    #[serde(default)]
    pub prohibitions: Vec<ProhibitionDecl>,
    #[serde(default)]
    pub steps: Vec<Step>,
}

/// Inclusive range of evaluation days.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Horizon {
    pub begin: Day,
    pub end: Day,
}

impl Horizon {
    pub fn span(&self) -> Span {
        Span::new(self.begin, self.end)
    }

    pub fn contains(&self, d: Day) -> bool {
        self.begin <= d && d <= self.end
    }

    pub fn days(&self) -> crate::time::DayRange {
        Day::range_inclusive(self.begin, self.end)
    }
}

/// A literal day, a literal bag of alternatives, or a phrase to compile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DateSource {
    Day(Day),
    Bag(Vec<Day>),
    Phrase(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialBinding {
    pub name: String,
    pub value: DateSource,
    #[serde(default)]
    pub properties: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventDecl {
    pub id: String,
    #[serde(default)]
    pub properties: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheduled: Option<DateSource>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetSource {
    Spec(DateSetSpec),
    Phrase(String),
}

/// "at least `min` times but no more than `max` times" within a window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepetitionDecl {
    pub id: String,
    /// An atom such as `give_notice(PartyA)`.
    pub action: String,
    #[serde(default)]
    pub min: Option<u64>,
    #[serde(default)]
    pub max: Option<u64>,
    pub window: SetSource,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScopeSource {
    Interval(ContinuousInterval),
    Phrase(String),
}

/// A condition that must not be realized on any day of its scope.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProhibitionDecl {
    pub id: String,
    pub condition: String,
    pub during: ScopeSource,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObligationDecl {
    pub id: String,
    #[serde(default)]
    pub class: String,
    #[serde(default)]
    pub obligor: String,
    #[serde(default)]
    pub obligee: String,
    pub due: DateSource,
    #[serde(default)]
    pub end_date: Option<Day>,
    #[serde(default)]
    pub survives: bool,
    #[serde(default)]
    pub inferred: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub day: Day,
    #[serde(flatten)]
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    DesignateDate {
        name: String,
        value: DateSource,
        #[serde(default)]
        party: String,
        #[serde(default)]
        reason: String,
    },
    EventStart {
        id: String,
    },
    EventEnd {
        id: String,
    },
    IncurObligation(ObligationDecl),
    Defer {
        id: String,
        new_due: Day,
        #[serde(default)]
        reason: String,
    },
    Accelerate {
        id: String,
        new_due: Day,
        #[serde(default)]
        reason: String,
    },
    Discharge {
        id: String,
    },
    ActivateRight {
        id: String,
        trigger: String,
    },
    ExerciseRight {
        id: String,
        #[serde(default)]
        activation: usize,
    },
    RealizeAtom {
        atom: String,
    },
    /// Fixes a bound bag, or an obligation's bag of due dates.
    ResolveBag {
        name: String,
        chosen: Day,
        #[serde(default)]
        reason: String,
    },
    Query {
        formula: String,
        /// Day the formula is evaluated at; defaults to the step's day.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        at: Option<Day>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expected: Option<bool>,
    },
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario, ScenarioError> {
        let sc: Scenario = serde_json::from_str(text).map_err(|e| ScenarioError::Malformed(e.to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    /// Structural checks that need no calendar: horizon shape, step order,
    /// and step days inside the horizon.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let h = self.horizon;
        if h.end < h.begin {
            return Err(ScenarioError::Invalid(format!("horizon ends at {} before it begins at {}", h.end, h.begin)));
        }
        if h.end.diff_days(h.begin) >= MAX_HORIZON_DAYS {
            return Err(ScenarioError::Invalid(format!("horizon is longer than {MAX_HORIZON_DAYS} days")));
        }
        let mut prev = h.begin;
        for (index, step) in self.steps.iter().enumerate() {
            let fail = |message: String| ScenarioError::Step {
                index,
                day: step.day,
                message,
            };
            if !h.contains(step.day) {
                return Err(fail(format!("day is outside the horizon {}..{}", h.begin, h.end)));
            }
            if step.day < prev {
                return Err(fail(format!("steps must be ordered by day, but a step on {prev} comes first")));
            }
            prev = step.day;
        }
        let mut seen = BTreeSet::new();
        for id in self.prohibitions.iter().map(|p| &p.id).chain(self.repetitions.iter().map(|r| &r.id)) {
            if !seen.insert(id) {
                return Err(ScenarioError::Invalid(format!("constraint id {id:?} is declared twice")));
            }
        }
        Ok(())
    }

    /// The same scenario with only its first `k` steps.
    pub fn truncated(&self, k: usize) -> Scenario {
        let mut sc = self.clone();
        sc.steps.truncate(k);
        sc
    }
}
