use std::collections::BTreeSet;

use serde::Serialize;

use crate::bag::{DateBag, Tri};
use crate::dateset::DateSet;
use crate::error::DeonticError;
use crate::time::Day;

/// Where an event was expected to start before it actually did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum ScheduledStart {
    Day(Day),
    Set(DateSet),
    Bag(DateBag),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Event {
    pub id: String,
    pub properties: BTreeSet<String>,
    pub scheduled_start: Option<ScheduledStart>,
    /// The schedule that an actual start replaced.
    pub superseded_schedule: Option<ScheduledStart>,
    pub actual_start: Option<Day>,
    pub actual_end: Option<Day>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventPhase {
    NotOccurred,
    Occurring,
    Ceased,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PhaseReport {
    pub phase: EventPhase,
    pub has_occurred: bool,
    pub is_continuing: bool,
    pub has_ceased: bool,
}

impl PhaseReport {
    /// "has occurred and is continuing".
    pub fn occurred_and_continuing(&self) -> bool {
        self.has_occurred && self.is_continuing
    }
}

impl Event {
    pub fn new(id: impl Into<String>) -> Self {
        Event {
            id: id.into(),
            properties: BTreeSet::new(),
            scheduled_start: None,
            superseded_schedule: None,
            actual_start: None,
            actual_end: None,
        }
    }

    pub fn with_property(mut self, p: impl Into<String>) -> Self {
        self.properties.insert(p.into());
        self
    }

    pub fn scheduled(mut self, s: ScheduledStart) -> Self {
        self.scheduled_start = Some(s);
        self
    }

    pub fn phase(&self, at: Day) -> PhaseReport {
        let has_occurred = self.actual_start.is_some_and(|s| s <= at);
        let has_ceased = self.actual_end.is_some_and(|e| e <= at);
        let is_continuing = has_occurred && !has_ceased;
        let phase = if has_ceased {
            EventPhase::Ceased
        } else if has_occurred {
            EventPhase::Occurring
        } else {
            EventPhase::NotOccurred
        };
        PhaseReport {
            phase,
            has_occurred,
            is_continuing,
            has_ceased,
        }
    }

    pub(crate) fn start(&self, at: Day) -> Result<Event, DeonticError> {
        if self.actual_start.is_some() {
            return Err(DeonticError::AlreadyStarted(self.id.clone()));
        }
        let mut next = self.clone();
        next.actual_start = Some(at);
        next.superseded_schedule = next.scheduled_start.take();
        Ok(next)
    }

    pub(crate) fn end(&self, at: Day) -> Result<Event, DeonticError> {
        let start = self
            .actual_start
            .ok_or_else(|| DeonticError::NotStarted(self.id.clone()))?;
        if self.actual_end.is_some() {
            return Err(DeonticError::AlreadyEnded(self.id.clone()));
        }
        if at < start {
            return Err(DeonticError::EndBeforeStart {
                id: self.id.clone(),
                start,
                end: at,
            });
        }
        let mut next = self.clone();
        next.actual_end = Some(at);
        Ok(next)
    }
}

/// Pairwise ordering facts about two events.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EventOrderings {
    pub a_occurs_prior_to_b: Tri,
    pub immediately_before_a: Option<Day>,
    pub immediately_after_a: Option<DateSet>,
}

/// The end of `a` is prior to the start of `b`.
pub fn occurs_prior_to(a: &Event, b: &Event) -> Tri {
    match (a.actual_start, a.actual_end, b.actual_start) {
        (_, Some(ae), Some(bs)) => (ae < bs).into(),
        // a ends no earlier than it starts, so it cannot end before b starts
        (Some(as_), None, Some(bs)) if bs <= as_ => Tri::False,
        _ => Tri::Indeterminate,
    }
}

/// The day before the start of `a`.
pub fn immediately_before(a: &Event) -> Result<Day, DeonticError> {
    let s = a.actual_start.ok_or_else(|| DeonticError::MissingDate {
        id: a.id.clone(),
        which: "start",
    })?;
    Ok(s.pred()?)
}

/// The same day as, or the next day following, the end of `a`.
pub fn immediately_after(a: &Event) -> Result<DateSet, DeonticError> {
    let e = a.actual_end.ok_or_else(|| DeonticError::MissingDate {
        id: a.id.clone(),
        which: "end",
    })?;
    Ok(DateSet::range(e, e.succ()?)?)
}

pub fn event_orderings(a: &Event, b: &Event) -> EventOrderings {
    EventOrderings {
        a_occurs_prior_to_b: occurs_prior_to(a, b),
        immediately_before_a: immediately_before(a).ok(),
        immediately_after_a: immediately_after(a).ok(),
    }
}
