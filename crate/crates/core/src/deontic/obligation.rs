use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bag::DateBag;
use crate::error::DeonticError;
use crate::time::Day;

/// A due date fixed in the text, or a bag of alternatives fixed later.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Due {
    Day(Day),
    Bag(DateBag),
}

impl fmt::Display for Due {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Due::Day(d) => d.fmt(f),
            Due::Bag(b) => b.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RevisionKind {
    Deferral,
    Acceleration,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DueRevision {
    pub new_due: Day,
    pub set_at: Day,
    pub kind: RevisionKind,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObligationStatus {
    Pending,
    Due,
    Overdue,
    DischargedOnTime,
    DischargedLate,
    AutoDischarged,
}

impl ObligationStatus {
    /// Position in the lifecycle; statuses never move to a lower rank.
    pub fn rank(self) -> u8 {
        match self {
            ObligationStatus::Pending => 0,
            ObligationStatus::Due => 1,
            ObligationStatus::Overdue => 2,
            _ => 3,
        }
    }

    pub fn is_discharged(self) -> bool {
        self.rank() == 3
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ObligationStatus::Pending => "pending",
            ObligationStatus::Due => "due",
            ObligationStatus::Overdue => "overdue",
            ObligationStatus::DischargedOnTime => "discharged_on_time",
            ObligationStatus::DischargedLate => "discharged_late",
            ObligationStatus::AutoDischarged => "auto_discharged",
        }
    }
}

impl fmt::Display for ObligationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What is needed to incur an obligation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObligationSpec {
    pub id: String,
    /// Groups obligations such as payments for "the last payment date".
    #[serde(default)]
    pub class: String,
    #[serde(default)]
    pub obligor: String,
    #[serde(default)]
    pub obligee: String,
    pub due: Due,
    #[serde(default)]
    pub end_date: Option<Day>,
    #[serde(default)]
    pub survives: bool,
    /// Owed to an outside body and only implied by the text.
    #[serde(default)]
    pub inferred: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Obligation {
    pub id: String,
    pub class: String,
    pub obligor: String,
    pub obligee: String,
    pub incurred_at: Day,
    pub due: Due,
    pub revisions: Vec<DueRevision>,
    pub end_date: Option<Day>,
    pub discharged_at: Option<Day>,
    pub survives: bool,
    pub inferred: bool,
}

impl Obligation {
    pub fn incur(spec: ObligationSpec, at: Day) -> Result<Obligation, DeonticError> {
        let ob = Obligation {
            id: spec.id,
            class: spec.class,
            obligor: spec.obligor,
            obligee: spec.obligee,
            incurred_at: at,
            due: spec.due,
            revisions: Vec::new(),
            end_date: spec.end_date,
            discharged_at: None,
            survives: spec.survives,
            inferred: spec.inferred,
        };
        if let Due::Bag(b) = &ob.due {
            if b.is_empty() {
                return Err(DeonticError::EmptyDue(ob.id));
            }
        }
        let due = ob.effective_due();
        if due < at {
            return Err(DeonticError::DueBeforeIncurred {
                id: ob.id,
                due,
                incurred: at,
            });
        }
        if let Some(end) = ob.end_date {
            if end <= at {
                return Err(DeonticError::Backdated {
                    action: "end date",
                    at: end,
                    what: "incurrence",
                    earlier: at,
                });
            }
        }
        Ok(ob)
    }

    /// The due date from the text: the chosen alternative of a resolved bag,
    /// else the latest alternative.
    pub fn original_due(&self) -> Day {
        match &self.due {
            Due::Day(d) => *d,
            Due::Bag(b) => b
                .chosen()
                .or_else(|| b.end())
                .expect("due bags are non-empty"),
        }
    }

    /// Last revision wins; otherwise the original due date.
    pub fn effective_due(&self) -> Day {
        self.revisions
            .last()
            .map_or_else(|| self.original_due(), |r| r.new_due)
    }

    /// The effective due date as it stood at the end of `day`.
    pub fn effective_due_as_of(&self, day: Day) -> Day {
        self.revisions
            .iter()
            .rev()
            .find(|r| r.set_at <= day)
            .map_or_else(|| self.original_due(), |r| r.new_due)
    }

    pub(crate) fn revise(
        &self,
        new_due: Day,
        at: Day,
        kind: RevisionKind,
        reason: &str,
    ) -> Result<Obligation, DeonticError> {
        if self.discharged_at.is_some() || self.end_date.is_some_and(|e| at >= e) {
            return Err(DeonticError::AlreadyDischarged(self.id.clone()));
        }
        let earliest = self.revisions.last().map_or(self.incurred_at, |r| r.set_at);
        if at < earliest {
            return Err(DeonticError::Backdated {
                action: "due-date revision",
                at,
                what: "the previous lifecycle record",
                earlier: earliest,
            });
        }
        if new_due < self.incurred_at {
            return Err(DeonticError::DueBeforeIncurred {
                id: self.id.clone(),
                due: new_due,
                incurred: self.incurred_at,
            });
        }
        let current = self.effective_due();
        let wrong_way = match kind {
            RevisionKind::Deferral => new_due < current,
            RevisionKind::Acceleration => new_due > current,
        };
        if wrong_way {
            return Err(DeonticError::InvalidRevision {
                id: self.id.clone(),
                detail: format!("{kind:?} from {current} to {new_due} moves the wrong way")
                    .to_lowercase(),
            });
        }
        let mut next = self.clone();
        next.revisions.push(DueRevision {
            new_due,
            set_at: at,
            kind,
            reason: reason.to_string(),
        });
        Ok(next)
    }

    pub(crate) fn discharge(&self, at: Day) -> Result<Obligation, DeonticError> {
        if self.discharged_at.is_some() || self.end_date.is_some_and(|e| at >= e) {
            return Err(DeonticError::AlreadyDischarged(self.id.clone()));
        }
        if at < self.incurred_at {
            return Err(DeonticError::Backdated {
                action: "discharge",
                at,
                what: "incurrence",
                earlier: self.incurred_at,
            });
        }
        let mut next = self.clone();
        next.discharged_at = Some(at);
        Ok(next)
    }

    pub(crate) fn resolve_due(&self, chosen: Day, at: Day, reason: &str) -> Result<Obligation, DeonticError> {
        let Due::Bag(b) = &self.due else {
            return Err(DeonticError::InvalidRevision {
                id: self.id.clone(),
                detail: "due date is not a bag of alternatives".into(),
            });
        };
        let resolved = b.resolve(chosen, at, reason)?;
        if chosen < self.incurred_at {
            return Err(DeonticError::DueBeforeIncurred {
                id: self.id.clone(),
                due: chosen,
                incurred: self.incurred_at,
            });
        }
        let mut next = self.clone();
        next.due = Due::Bag(resolved);
        Ok(next)
    }

    /// Status on day `at` given the recorded history.
    ///
    /// Days before incurrence report `Pending`.
    pub fn status(&self, at: Day) -> ObligationStatus {
        let due = self.effective_due();
        if let Some(d) = self.discharged_at.filter(|d| *d <= at) {
            return if d <= due {
                ObligationStatus::DischargedOnTime
            } else {
                ObligationStatus::DischargedLate
            };
        }
        if self.end_date.is_some_and(|e| at >= e) {
            return ObligationStatus::AutoDischarged;
        }
        match at.cmp(&due) {
            std::cmp::Ordering::Less => ObligationStatus::Pending,
            std::cmp::Ordering::Equal => ObligationStatus::Due,
            std::cmp::Ordering::Greater => ObligationStatus::Overdue,
        }
    }

    /// Discharged on or before `at`.
    pub fn has_satisfied(&self, at: Day) -> bool {
        self.discharged_at.is_some_and(|d| d <= at)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn june(d: u32) -> Day {
        Day::from_ymd(2018, 6, d).unwrap()
    }

    fn ob(due: u32) -> Obligation {
        Obligation::incur(
            ObligationSpec {
                id: "Pay".into(),
                class: "payment".into(),
                obligor: "A".into(),
                obligee: "B".into(),
                due: Due::Day(june(due)),
                end_date: None,
                survives: false,
                inferred: false,
            },
            june(1),
        )
        .unwrap()
    }

    #[test]
    fn revisions_are_appended() {
        let o = ob(10)
            .revise(june(20), june(2), RevisionKind::Deferral, "agreed")
            .unwrap();
        assert_eq!(o.effective_due(), june(20));
        assert_eq!(o.revisions.len(), 1);
        let o = o
            .revise(june(15), june(3), RevisionKind::Acceleration, "default")
            .unwrap();
        assert_eq!(o.effective_due(), june(15));
        assert_eq!(o.revisions.len(), 2);
        assert_eq!(o.effective_due_as_of(june(1)), june(10));
        assert_eq!(o.effective_due_as_of(june(2)), june(20));
        assert!(matches!(
            o.revise(june(25), june(3), RevisionKind::Acceleration, "x"),
            Err(DeonticError::InvalidRevision { .. })
        ));
    }

    #[test]
    fn discharge_once() {
        let o = ob(10).discharge(june(5)).unwrap();
        assert!(matches!(o.discharge(june(6)), Err(DeonticError::AlreadyDischarged(_))));
        assert!(matches!(
            o.revise(june(20), june(6), RevisionKind::Deferral, ""),
            Err(DeonticError::AlreadyDischarged(_))
        ));
    }

    #[test]
    fn statuses() {
        assert_eq!(ob(10).discharge(june(9)).unwrap().status(june(11)), ObligationStatus::DischargedOnTime);
        let late = ob(10).discharge(june(12)).unwrap();
        assert_eq!(late.status(june(11)), ObligationStatus::Overdue);
        assert_eq!(late.status(june(12)), ObligationStatus::DischargedLate);
        let mut auto = ob(10);
        auto.end_date = Some(june(30));
        assert_eq!(auto.status(june(10)), ObligationStatus::Due);
        assert_eq!(auto.status(june(29)), ObligationStatus::Overdue);
        assert_eq!(auto.status(Day::from_ymd(2018, 7, 1).unwrap()), ObligationStatus::AutoDischarged);
        assert!(matches!(auto.discharge(june(30)), Err(DeonticError::AlreadyDischarged(_))));
    }

    #[test]
    fn satisfaction_counts_the_discharge_day() {
        let o = ob(10).discharge(june(3)).unwrap();
        assert!(o.has_satisfied(june(3)));
        assert!(o.has_satisfied(june(5)));
        assert!(!o.has_satisfied(june(2)));
        assert!(!ob(10).has_satisfied(june(30)));
        assert_eq!(o.status(june(3)), ObligationStatus::DischargedOnTime);
    }

    #[test]
    fn due_must_not_precede_incurrence() {
        let spec = ObligationSpec {
            id: "Pay".into(),
            class: String::new(),
            obligor: String::new(),
            obligee: String::new(),
            due: Due::Day(june(1)),
            end_date: None,
            survives: false,
            inferred: false,
        };
        assert!(matches!(
            Obligation::incur(spec.clone(), june(2)),
            Err(DeonticError::DueBeforeIncurred { .. })
        ));
        let o = Obligation::incur(spec, june(1)).unwrap();
        assert_eq!(o.status(june(1)), ObligationStatus::Due);
    }

    #[test]
    fn bag_due_uses_latest_alternative_until_resolved() {
        let spec = ObligationSpec {
            id: "Notice".into(),
            class: String::new(),
            obligor: String::new(),
            obligee: String::new(),
            due: Due::Bag(DateBag::new([june(2), june(3), june(4)])),
            end_date: None,
            survives: false,
            inferred: false,
        };
        let o = Obligation::incur(spec, june(1)).unwrap();
        assert_eq!(o.effective_due(), june(4));
        let r = o.resolve_due(june(2), june(1), "notified").unwrap();
        assert_eq!(r.effective_due(), june(2));
        assert_eq!(r.status(june(3)), ObligationStatus::Overdue);
    }
}
