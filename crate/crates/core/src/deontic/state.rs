use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::binding::{BindingRecord, BindingRegistry, BindingSource};
use crate::deontic::event::{Event, PhaseReport};
use crate::deontic::obligation::{Obligation, ObligationSpec, RevisionKind};
use crate::deontic::right::{Right, RightState};
use crate::error::{DeonticError, EvalError};
use crate::interval::ContinuousInterval;
use crate::ru::{Atom, Trace};
use crate::time::Day;

/// Property carried by the event materialized for each incurred obligation.
pub const INCURRED_PROPERTY: &str = "ObligationIncurred";

/// Which reading of "the last payment date" is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PaymentReading {
    MostRecentDischarged,
    LatestDue,
}

/// A property tag replaced on an event, e.g. a potential event of default
/// becoming an event of default.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Promotion {
    pub event: String,
    pub from: String,
    pub to: String,
    pub at: Day,
}

/// Snapshot of everything known about a contract's performance.
///
/// Transitions take `&self` and return a new state; a state is never
/// modified in place. Applying a transition dated after `as_of` moves
/// `as_of` forward to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContractState {
    as_of: Day,
    term: ContinuousInterval,
    registry: BindingRegistry,
    events: BTreeMap<String, Event>,
    obligations: BTreeMap<String, Obligation>,
    rights: BTreeMap<String, Right>,
    promotions: Vec<Promotion>,
    realized: BTreeSet<(Atom, Day)>,
}

impl ContractState {
    pub fn new(as_of: Day, term: ContinuousInterval) -> Self {
        ContractState {
            as_of,
            term,
            registry: BindingRegistry::new(),
            events: BTreeMap::new(),
            obligations: BTreeMap::new(),
            rights: BTreeMap::new(),
            promotions: Vec::new(),
            realized: BTreeSet::new(),
        }
    }

    pub fn with_registry(mut self, registry: BindingRegistry) -> Self {
        self.registry = registry;
        self
    }

    pub fn as_of(&self) -> Day {
        self.as_of
    }

    pub fn term(&self) -> &ContinuousInterval {
        &self.term
    }

    pub fn registry(&self) -> &BindingRegistry {
        &self.registry
    }

    pub fn events(&self) -> &BTreeMap<String, Event> {
        &self.events
    }

    pub fn obligations(&self) -> &BTreeMap<String, Obligation> {
        &self.obligations
    }

    pub fn rights(&self) -> &BTreeMap<String, Right> {
        &self.rights
    }

    pub fn promotions(&self) -> &[Promotion] {
        &self.promotions
    }

    pub fn event(&self, id: &str) -> Result<&Event, DeonticError> {
        self.events
            .get(id)
            .ok_or_else(|| DeonticError::UnknownEvent(id.to_string()))
    }

    pub fn obligation(&self, id: &str) -> Result<&Obligation, DeonticError> {
        self.obligations
            .get(id)
            .ok_or_else(|| DeonticError::UnknownObligation(id.to_string()))
    }

    pub fn right(&self, id: &str) -> Result<&Right, DeonticError> {
        self.rights
            .get(id)
            .ok_or_else(|| DeonticError::UnknownRight(id.to_string()))
    }

    fn at(&self, day: Day) -> ContractState {
        let mut next = self.clone();
        next.as_of = next.as_of.max(day);
        next
    }

    /// Moves the current day forward. Moving backwards is an error.
    pub fn advance_to(&self, day: Day) -> Result<ContractState, DeonticError> {
        if day < self.as_of {
            return Err(DeonticError::Backdated {
                action: "advance",
                at: day,
                what: "the current day",
                earlier: self.as_of,
            });
        }
        Ok(self.at(day))
    }

    pub fn bind(&self, name: &str, record: BindingRecord) -> Result<ContractState, DeonticError> {
        let mut next = self.at(record.bound_at);
        next.registry = self.registry.bind(name, record)?;
        Ok(next)
    }

    pub fn declare_event(&self, event: Event) -> Result<ContractState, DeonticError> {
        if self.events.contains_key(&event.id) {
            return Err(DeonticError::DuplicateId {
                kind: "event",
                id: event.id,
            });
        }
        let mut next = self.clone();
        next.events.insert(event.id.clone(), event);
        Ok(next)
    }

    pub fn start_event(&self, id: &str, at: Day) -> Result<ContractState, DeonticError> {
        let e = self.event(id)?.start(at)?;
        let mut next = self.at(at);
        next.events.insert(id.to_string(), e);
        Ok(next)
    }

    pub fn end_event(&self, id: &str, at: Day) -> Result<ContractState, DeonticError> {
        let e = self.event(id)?.end(at)?;
        let mut next = self.at(at);
        next.events.insert(id.to_string(), e);
        Ok(next)
    }

    /// Replaces tag `from` with `to` on the event from day `at` onwards.
    pub fn promote_event(&self, id: &str, from: &str, to: &str, at: Day) -> Result<ContractState, DeonticError> {
        let e = self.event(id)?;
        if !e.properties.contains(from) {
            return Err(DeonticError::MissingProperty {
                id: id.to_string(),
                property: from.to_string(),
            });
        }
        let mut e = e.clone();
        e.properties.remove(from);
        e.properties.insert(to.to_string());
        let mut next = self.at(at);
        next.events.insert(id.to_string(), e);
        next.promotions.push(Promotion {
            event: id.to_string(),
            from: from.to_string(),
            to: to.to_string(),
            at,
        });
        Ok(next)
    }

    /// Id of the event materialized when obligation `id` is incurred.
    pub fn incurred_event_id(id: &str) -> String {
        format!("{id}.incurred")
    }

    /// Incurs an obligation and starts its incurrence event on the same day.
    pub fn incur_obligation(&self, spec: ObligationSpec, at: Day) -> Result<(ContractState, String), DeonticError> {
        let id = spec.id.clone();
        if self.obligations.contains_key(&id) {
            return Err(DeonticError::DuplicateId { kind: "obligation", id });
        }
        let ob = Obligation::incur(spec, at)?;
        let event = Event::new(Self::incurred_event_id(&id)).with_property(INCURRED_PROPERTY);
        let mut next = self.declare_event(event)?.at(at);
        next.obligations.insert(id.clone(), ob);
        let next = next.start_event(&Self::incurred_event_id(&id), at)?;
        Ok((next, id))
    }

    pub fn revise_due(
        &self,
        id: &str,
        new_due: Day,
        at: Day,
        kind: RevisionKind,
        reason: &str,
    ) -> Result<ContractState, DeonticError> {
        let ob = self.obligation(id)?.revise(new_due, at, kind, reason)?;
        let mut next = self.at(at);
        next.obligations.insert(id.to_string(), ob);
        Ok(next)
    }

    pub fn defer(&self, id: &str, new_due: Day, at: Day, reason: &str) -> Result<ContractState, DeonticError> {
        self.revise_due(id, new_due, at, RevisionKind::Deferral, reason)
    }

    pub fn accelerate(&self, id: &str, new_due: Day, at: Day, reason: &str) -> Result<ContractState, DeonticError> {
        self.revise_due(id, new_due, at, RevisionKind::Acceleration, reason)
    }

    /// Discharges the obligation and ends its incurrence event.
    pub fn discharge(&self, id: &str, at: Day) -> Result<ContractState, DeonticError> {
        let ob = self.obligation(id)?.discharge(at)?;
        let mut next = self.at(at);
        next.obligations.insert(id.to_string(), ob);
        let ev = Self::incurred_event_id(id);
        if next.events.get(&ev).is_some_and(|e| e.actual_end.is_none()) {
            next = next.end_event(&ev, at)?;
        }
        Ok(next)
    }

    pub fn resolve_due(&self, id: &str, chosen: Day, at: Day, reason: &str) -> Result<ContractState, DeonticError> {
        let ob = self.obligation(id)?.resolve_due(chosen, at, reason)?;
        let mut next = self.at(at);
        next.obligations.insert(id.to_string(), ob);
        Ok(next)
    }

    pub fn declare_right(&self, right: Right) -> Result<ContractState, DeonticError> {
        if self.rights.contains_key(&right.id) {
            return Err(DeonticError::DuplicateId {
                kind: "right",
                id: right.id,
            });
        }
        let mut next = self.clone();
        next.rights.insert(right.id.clone(), right);
        Ok(next)
    }

    pub fn activate_right(&self, id: &str, trigger: &str, at: Day) -> Result<ContractState, DeonticError> {
        let r = self.right(id)?.activate(trigger, at)?;
        let mut next = self.at(at);
        next.rights.insert(id.to_string(), r);
        Ok(next)
    }

    pub fn exercise_right(&self, id: &str, activation: usize, at: Day) -> Result<ContractState, DeonticError> {
        let r = self.right(id)?.exercise(activation, at)?;
        let mut next = self.at(at);
        next.rights.insert(id.to_string(), r);
        Ok(next)
    }

    /// Records that an atom held on `at`.
    pub fn realize(&self, atom: Atom, at: Day) -> ContractState {
        let mut next = self.at(at);
        next.realized.insert((atom, at));
        next
    }

    fn check_not_future(&self, at: Day) -> Result<(), DeonticError> {
        if at > self.as_of {
            return Err(DeonticError::FutureQuery { at, as_of: self.as_of });
        }
        Ok(())
    }

    pub fn event_phase(&self, id: &str, at: Day) -> Result<PhaseReport, DeonticError> {
        let e = self.event(id)?;
        self.check_not_future(at)?;
        Ok(e.phase(at))
    }

    pub fn has_satisfied(&self, id: &str, at: Day) -> Result<bool, DeonticError> {
        Ok(self.obligation(id)?.has_satisfied(at))
    }

    pub fn right_state(&self, id: &str, at: Day) -> Result<RightState, DeonticError> {
        Ok(self.right(id)?.state(at))
    }

    pub fn last_payment_date(&self, class: &str, reading: PaymentReading) -> Result<Day, DeonticError> {
        let of_class = self.obligations.values().filter(|o| o.class == class);
        let best = match reading {
            PaymentReading::MostRecentDischarged => of_class
                .filter_map(|o| o.discharged_at)
                .filter(|d| *d <= self.as_of)
                .max(),
            PaymentReading::LatestDue => of_class.map(|o| o.effective_due()).max(),
        };
        best.ok_or_else(|| DeonticError::NoQualifyingObligation(class.to_string()))
    }

    /// The realization trace implied by this state over `begin..=end`.
    ///
    /// Only days up to `as_of` carry facts; later days are unknown.
    pub fn materialize(&self, begin: Day, end: Day) -> Result<Trace, EvalError> {
        let mut tr = Trace::new(begin, end)?;
        let last = end.min(self.as_of);
        if last < begin {
            return Ok(tr);
        }
        let days = || Day::range_inclusive(begin, last);
        fn put(tr: &mut Trace, name: &str, arg: &str, d: Day) -> Result<(), EvalError> {
            tr.record(Atom::unary(name, arg), d)
        }

        for (id, e) in &self.events {
            for d in days() {
                let p = e.phase(d);
                if p.has_occurred {
                    put(&mut tr, "has_occurred", id, d)?;
                }
                if p.is_continuing {
                    put(&mut tr, "is_continuing", id, d)?;
                }
                if p.has_ceased {
                    put(&mut tr, "has_ceased", id, d)?;
                }
            }
            for (name, day) in [("starts", e.actual_start), ("ends", e.actual_end)] {
                if let Some(d) = day.filter(|d| *d >= begin && *d <= last) {
                    put(&mut tr, name, id, d)?;
                }
            }
            for prop in &e.properties {
                let from = self
                    .promotions
                    .iter()
                    .filter(|p| &p.event == id && &p.to == prop)
                    .map(|p| p.at)
                    .min();
                for d in days().filter(|d| from.is_none_or(|f| *d >= f)) {
                    tr.record(Atom::new("has_property", [id.as_str(), prop.as_str()]), d)?;
                }
            }
            for p in self.promotions.iter().filter(|p| &p.event == id) {
                if e.properties.contains(&p.from) {
                    continue;
                }
                for d in days().filter(|d| *d < p.at) {
                    tr.record(Atom::new("has_property", [id.as_str(), p.from.as_str()]), d)?;
                }
            }
        }

        for (id, o) in &self.obligations {
            let due = o.effective_due();
            for d in days().filter(|d| *d >= o.incurred_at) {
                put(&mut tr, "incurred", id, d)?;
                let status = o.status(d);
                put(&mut tr, status.as_str(), id, d)?;
                if status.is_discharged() {
                    put(&mut tr, "discharged", id, d)?;
                }
                if o.has_satisfied(d) {
                    put(&mut tr, "has_satisfied", id, d)?;
                }
                if d == due {
                    put(&mut tr, "is_due_date", id, d)?;
                }
            }
        }

        for (id, r) in &self.rights {
            for d in days() {
                if r.is_active(d) {
                    put(&mut tr, "active", id, d)?;
                }
            }
            for a in &r.activations {
                if a.activated_at >= begin && a.activated_at <= last {
                    put(&mut tr, "activated", id, a.activated_at)?;
                }
                for x in a.exercises.iter().filter(|x| **x >= begin && **x <= last) {
                    put(&mut tr, "exercised", id, *x)?;
                }
            }
        }

        for name in self.registry.names() {
            let h = self.registry.history(name);
            let first = |src: BindingSource| h.iter().filter(|r| r.source == src).map(|r| r.bound_at).min();
            for (atom, from) in [
                ("specified", first(BindingSource::Text)),
                ("designated", first(BindingSource::Performance)),
            ] {
                if let Some(f) = from {
                    for d in days().filter(|d| *d >= f) {
                        put(&mut tr, atom, name, d)?;
                    }
                }
            }
        }

        for (atom, d) in &self.realized {
            if *d >= begin && *d <= last {
                tr.record(atom.clone(), *d)?;
            }
        }
        Ok(tr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deontic::obligation::{Due, ObligationStatus};
    use crate::deontic::right::RightMode;
    use crate::ru::{eval, Formula};

    fn june(d: u32) -> Day {
        Day::from_ymd(2018, 6, d).unwrap()
    }

    fn state() -> ContractState {
        ContractState::new(june(1), ContinuousInterval::new(june(1), Day::from_ymd(2018, 12, 31).unwrap()))
    }

    fn payment(id: &str, due: u32) -> ObligationSpec {
        ObligationSpec {
            id: id.into(),
            class: "payment".into(),
            obligor: "A".into(),
            obligee: "B".into(),
            due: Due::Day(june(due)),
            end_date: None,
            survives: false,
            inferred: false,
        }
    }

    #[test]
    fn transitions_are_pure() {
        let s0 = state().declare_event(Event::new("EoD")).unwrap();
        let s1 = s0.start_event("EoD", june(3)).unwrap();
        assert!(s0.event("EoD").unwrap().actual_start.is_none());
        assert_eq!(s1.as_of(), june(3));
        assert!(s1.event_phase("EoD", june(3)).unwrap().occurred_and_continuing());
        assert!(matches!(
            s1.event_phase("EoD", june(4)),
            Err(DeonticError::FutureQuery { .. })
        ));
        assert!(matches!(s1.event_phase("Nope", june(1)), Err(DeonticError::UnknownEvent(_))));
        assert!(s1.advance_to(june(2)).is_err());
    }

    #[test]
    fn incurring_emits_an_event() {
        let (s, id) = state().incur_obligation(payment("Pay1", 10), june(2)).unwrap();
        let ev = ContractState::incurred_event_id(&id);
        assert_eq!(s.event(&ev).unwrap().actual_start, Some(june(2)));
        let s = s.discharge(&id, june(9)).unwrap();
        assert_eq!(s.event(&ev).unwrap().actual_end, Some(june(9)));
        assert_eq!(s.obligation(&id).unwrap().status(june(9)), ObligationStatus::DischargedOnTime);
        assert!(matches!(s.discharge(&id, june(10)), Err(DeonticError::AlreadyDischarged(_))));
        assert!(matches!(s.discharge("Nope", june(10)), Err(DeonticError::UnknownObligation(_))));
    }

    #[test]
    fn last_payment_date_readings() {
        let (s, _) = state().incur_obligation(payment("P1", 1), june(1)).unwrap();
        let (s, _) = s.incur_obligation(payment("P2", 8), june(1)).unwrap();
        assert!(matches!(
            s.last_payment_date("payment", PaymentReading::MostRecentDischarged),
            Err(DeonticError::NoQualifyingObligation(_))
        ));
        let s = s.discharge("P1", june(1)).unwrap().discharge("P2", june(8)).unwrap();
        let s = s.advance_to(june(10)).unwrap();
        assert_eq!(s.last_payment_date("payment", PaymentReading::MostRecentDischarged).unwrap(), june(8));
        let mut later = payment("P3", 1);
        later.due = Due::Day(Day::from_ymd(2018, 9, 1).unwrap());
        let (s, _) = s.incur_obligation(later, june(10)).unwrap();
        assert_eq!(
            s.last_payment_date("payment", PaymentReading::LatestDue).unwrap(),
            Day::from_ymd(2018, 9, 1).unwrap()
        );
    }

    #[test]
    fn promotion_changes_tag_from_its_day() {
        let s = state()
            .declare_event(Event::new("E1").with_property("PotentialEventOfDefault"))
            .unwrap()
            .start_event("E1", june(2))
            .unwrap()
            .promote_event("E1", "PotentialEventOfDefault", "EventOfDefault", june(5))
            .unwrap();
        let tr = s.materialize(june(1), june(10)).unwrap();
        let eod = Atom::new("has_property", ["E1", "EventOfDefault"]);
        let pot = Atom::new("has_property", ["E1", "PotentialEventOfDefault"]);
        assert!(!tr.realized(&eod, june(4)) && tr.realized(&eod, june(5)));
        assert!(tr.realized(&pot, june(4)) && !tr.realized(&pot, june(5)));
        assert!(s.promote_event("E1", "Missing", "X", june(5)).is_err());
    }

    #[test]
    fn materialized_trace_answers_phase_queries() {
        let s = state()
            .declare_event(Event::new("EoD"))
            .unwrap()
            .start_event("EoD", june(3))
            .unwrap()
            .advance_to(june(8))
            .unwrap();
        let tr = s.materialize(june(1), june(30)).unwrap();
        let f = Formula::and(
            Formula::Atom(Atom::unary("has_occurred", "EoD")),
            Formula::Atom(Atom::unary("is_continuing", "EoD")),
        );
        assert!(eval::realized_at(&tr, &f, june(4)).unwrap());
        assert!(!eval::realized_at(&tr, &f, june(2)).unwrap());
        // nothing is known after the current day
        assert!(!eval::realized_at(&tr, &f, june(9)).unwrap());
    }

    #[test]
    fn rights_through_state() {
        let r = Right::new("Terminate", "A", RightMode::Triggered { trigger: "EoD".into() });
        let s = state()
            .declare_right(r)
            .unwrap()
            .activate_right("Terminate", "EoD", june(1))
            .unwrap()
            .exercise_right("Terminate", 0, june(6))
            .unwrap();
        assert_eq!(s.right_state("Terminate", june(6)).unwrap().delays, vec![Some(5)]);
        assert!(matches!(
            s.exercise_right("Terminate", 3, june(7)),
            Err(DeonticError::NotActivated { .. })
        ));
    }
}
