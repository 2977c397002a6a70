use std::collections::{BTreeMap, BTreeSet};

use crate::bag::{DateBag, Tri};
use crate::binding::{BindingRecord, BindingSource, BindingValue};
use crate::calendar::PropertyCalendar;
use crate::dateset::DateSet;
use crate::deontic::{
    ContractState, Due, Event, ObligationSpec, ObligationStatus, RepetitionConstraint, ScheduledStart,
};
use crate::dsl::{compile, compile_formula, parse, CompileEnv, CompiledValue, Node, ReasonablenessConfig};
use crate::engine::query::query;
use crate::engine::report::{
    BindingSummary, EventSummary, FinalState, ObligationSummary, QueryRecord, Report, RightSummary, Violation,
    ViolationKind,
};
use crate::engine::scenario::{Action, DateSource, ObligationDecl, Scenario, ScopeSource, SetSource};
use crate::error::{CompileError, ParseErrorKind, QueryError, ScenarioError};
use crate::interval::ContinuousInterval;
use crate::ru::{Atom, Evaluator};
use crate::time::Day;

/// Replays a scenario day by day and reports every violation.
///
/// Each day the day's steps are applied in order, then obligations,
/// prohibitions and repetition constraints are checked against the state
/// reached. A violation is reported on the first day its condition holds
/// and again only after the condition has lapsed and recurred.
pub fn replay(sc: &Scenario, cal: &PropertyCalendar, cfg: &ReasonablenessConfig) -> Result<Report, ScenarioError> {
    sc.validate()?;
    let mut r = Replayer::new(sc, cal, cfg)?;
    let mut next = 0;
    for day in sc.horizon.days() {
        r.state = r.state.advance_to(day).map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        while next < sc.steps.len() && sc.steps[next].day == day {
            r.apply(next).map_err(|message| ScenarioError::Step { index: next, day, message })?;
            next += 1;
        }
        r.check_day(day).map_err(|e| ScenarioError::Invalid(format!("checking {day}: {e}")))?;
    }
    Ok(r.finish())
}

enum Scope {
    Interval(ContinuousInterval),
    Set(DateSet),
}

impl Scope {
    fn contains(&self, d: Day) -> bool {
        match self {
            Scope::Interval(i) => i.contains(d),
            Scope::Set(s) => s.contains(d),
        }
    }
}

struct Prohibition {
    id: String,
    condition: Node,
    scope: Scope,
    in_breach: bool,
}

struct Repetition {
    constraint: RepetitionConstraint,
    over: bool,
}

struct Replayer<'a> {
    sc: &'a Scenario,
    cal: &'a PropertyCalendar,
    cfg: &'a ReasonablenessConfig,
    state: ContractState,
    violations: Vec<Violation>,
    queries: Vec<QueryRecord>,
    statuses: BTreeMap<String, ObligationStatus>,
    prohibitions: Vec<Prohibition>,
    repetitions: Vec<Repetition>,
}

/// A phrase failure: either it needs a human, or it is an error.
enum PhraseError {
    Human(String),
    Fatal(String),
}

impl From<String> for PhraseError {
    fn from(s: String) -> Self {
        PhraseError::Fatal(s)
    }
}

fn parse_phrase(text: &str) -> Result<Node, PhraseError> {
    parse(text).map_err(|e| match e.kind {
        ParseErrorKind::HumanInputRequired => PhraseError::Human(e.message),
        _ => PhraseError::Fatal(format!("{text:?}: {e}")),
    })
}

fn parse_atom(text: &str) -> Result<Atom, String> {
    match parse(text).map_err(|e| format!("{text:?}: {e}"))? {
        Node::Atom { name, args } => Ok(Atom::new(name, args)),
        _ => Err(format!("{text:?} is not an atom such as name(arg)")),
    }
}

impl<'a> Replayer<'a> {
    fn new(sc: &'a Scenario, cal: &'a PropertyCalendar, cfg: &'a ReasonablenessConfig) -> Result<Self, ScenarioError> {
        let h = sc.horizon;
        let invalid = |what: String| move |e: String| ScenarioError::Invalid(format!("{what}: {e}"));
        let term = match sc.term {
            Some(t) => t,
            None => {
                let (b, e) = (h.begin.pred(), h.end.succ());
                let bad = |e: crate::error::TimeError| ScenarioError::Invalid(e.to_string());
                ContinuousInterval::new(b.map_err(bad)?, e.map_err(bad)?)
            }
        };
        let mut r = Replayer {
            sc,
            cal,
            cfg,
            state: ContractState::new(h.begin, term),
            violations: Vec::new(),
            queries: Vec::new(),
            statuses: BTreeMap::new(),
            prohibitions: Vec::new(),
            repetitions: Vec::new(),
        };

        for b in &sc.bindings {
            let Some(value) = r.date_value(&b.value, h.begin, &b.name).map_err(invalid(format!("binding {:?}", b.name)))? else {
                continue;
            };
            let record = BindingRecord {
                value,
                bound_at: h.begin,
                bound_by: "text".into(),
                reason: String::new(),
                source: BindingSource::Text,
                properties: b.properties.clone(),
            };
            r.state = r.state.bind(&b.name, record).map_err(|e| invalid(format!("binding {:?}", b.name))(e.to_string()))?;
        }

        for e in &sc.events {
            let mut event = Event::new(&e.id);
            for p in &e.properties {
                event = event.with_property(p);
            }
            if let Some(s) = &e.scheduled {
                match r.date_value(s, h.begin, &e.id).map_err(invalid(format!("event {:?}", e.id)))? {
                    Some(BindingValue::Day(d)) => event = event.scheduled(ScheduledStart::Day(d)),
                    Some(BindingValue::Bag(b)) => event = event.scheduled(ScheduledStart::Bag(b)),
                    None => {}
                }
            }
            r.state = r.state.declare_event(event).map_err(|x| ScenarioError::Invalid(x.to_string()))?;
        }

        for right in &sc.rights {
            r.state = r.state.declare_right(right.clone()).map_err(|x| ScenarioError::Invalid(x.to_string()))?;
        }

        for d in &sc.repetitions {
            let fail = invalid(format!("repetition {:?}", d.id));
            let action = parse_atom(&d.action).map_err(&fail)?;
            let window = match &d.window {
                SetSource::Spec(spec) => spec.build(Some(cal)).map_err(|e| fail(e.to_string()))?,
                SetSource::Phrase(text) => match r.compile_phrase(text, h.begin, &d.id).map_err(&fail)? {
                    Some(CompiledValue::Set(s)) => s,
                    Some(other) => return Err(fail(format!("window denotes a {}, not a set of days", other.kind()))),
                    None => continue,
                },
            };
            if !window.is_empty() && !(h.contains(window.start()) && h.contains(window.end())) {
                return Err(fail(format!("window {}..{} is outside the horizon", window.start(), window.end())));
            }
            let constraint = RepetitionConstraint::new(&d.id, action, d.min, d.max, window).map_err(|e| fail(e.to_string()))?;
            r.repetitions.push(Repetition { constraint, over: false });
        }

        for p in &sc.prohibitions {
            let fail = invalid(format!("prohibition {:?}", p.id));
            let condition = match parse_phrase(&p.condition) {
                Ok(n) => n,
                Err(PhraseError::Human(m)) => {
                    r.flag(h.begin, ViolationKind::HumanInputRequired, &p.id, m);
                    continue;
                }
                Err(PhraseError::Fatal(m)) => return Err(fail(m)),
            };
            let scope = match &p.during {
                ScopeSource::Interval(i) => Scope::Interval(*i),
                ScopeSource::Phrase(text) => match r.compile_phrase(text, h.begin, &p.id).map_err(&fail)? {
                    Some(CompiledValue::Interval(i)) => Scope::Interval(i),
                    Some(CompiledValue::Set(s)) => Scope::Set(s),
                    Some(other) => return Err(fail(format!("scope denotes a {}, not a period", other.kind()))),
                    None => continue,
                },
            };
            r.prohibitions.push(Prohibition {
                id: p.id.clone(),
                condition,
                scope,
                in_breach: false,
            });
        }
        Ok(r)
    }

    fn flag(&mut self, day: Day, kind: ViolationKind, subject: &str, detail: String) {
        self.violations.push(Violation {
            day,
            kind,
            subject: subject.to_string(),
            detail,
        });
    }

    fn env(&self, day: Day) -> CompileEnv<'_> {
        CompileEnv::new(self.state.registry(), self.cal, self.cfg, *self.state.term())
            .today(day)
            .state(&self.state)
    }

    /// Compiles a phrase on `day`. `None` means it needs human input, which
    /// has been reported against `subject`.
    fn compile_phrase(&mut self, text: &str, day: Day, subject: &str) -> Result<Option<CompiledValue>, String> {
        let node = match parse_phrase(text) {
            Ok(n) => n,
            Err(PhraseError::Human(m)) => {
                self.flag(day, ViolationKind::HumanInputRequired, subject, m);
                return Ok(None);
            }
            Err(PhraseError::Fatal(m)) => return Err(m),
        };
        compile(&node, &self.env(day)).map(Some).map_err(|e| format!("{text:?}: {e}"))
    }

    fn date_value(&mut self, src: &DateSource, day: Day, subject: &str) -> Result<Option<BindingValue>, String> {
        match src {
            DateSource::Day(d) => Ok(Some(BindingValue::Day(*d))),
            DateSource::Bag(days) if days.is_empty() => Err("a bag needs at least one alternative".into()),
            DateSource::Bag(days) => Ok(Some(BindingValue::Bag(DateBag::new(days.iter().copied())))),
            DateSource::Phrase(text) => match self.compile_phrase(text, day, subject)? {
                None => Ok(None),
                Some(CompiledValue::Day(d)) => Ok(Some(BindingValue::Day(d))),
                Some(CompiledValue::Bag(b)) => Ok(Some(BindingValue::Bag(b))),
                Some(other) => Err(format!("{text:?} denotes a {}, not a date", other.kind())),
            },
        }
    }

    fn apply(&mut self, index: usize) -> Result<(), String> {
        let step = &self.sc.steps[index];
        let day = step.day;
        let st = &self.state;
        let next = match &step.action {
            Action::DesignateDate {
                name,
                value,
                party,
                reason,
            } => {
                let Some(value) = self.date_value(value, day, name)? else {
                    return Ok(());
                };
                let record = BindingRecord {
                    value,
                    bound_at: day,
                    bound_by: party.clone(),
                    reason: reason.clone(),
                    source: BindingSource::Performance,
                    properties: BTreeSet::new(),
                };
                self.state.bind(name, record)
            }
            Action::EventStart { id } => st.start_event(id, day),
            Action::EventEnd { id } => st.end_event(id, day),
            Action::IncurObligation(decl) => return self.incur(decl, day),
            Action::Defer { id, new_due, reason } => st.defer(id, *new_due, day, reason),
            Action::Accelerate { id, new_due, reason } => st.accelerate(id, *new_due, day, reason),
            Action::Discharge { id } => st.discharge(id, day),
            Action::ActivateRight { id, trigger } => st.activate_right(id, trigger, day),
            Action::ExerciseRight { id, activation } => st.exercise_right(id, *activation, day),
            Action::RealizeAtom { atom } => Ok(st.realize(parse_atom(atom)?, day)),
            Action::ResolveBag { name, chosen, reason } => match st.registry().current(name) {
                Some(BindingValue::Bag(b)) => {
                    let resolved = b.resolve(*chosen, day, reason.as_str()).map_err(|e| e.to_string())?;
                    let record = BindingRecord {
                        value: BindingValue::Bag(resolved),
                        bound_at: day,
                        bound_by: "resolution".into(),
                        reason: reason.clone(),
                        source: BindingSource::Performance,
                        properties: BTreeSet::new(),
                    };
                    st.bind(name, record)
                }
                Some(BindingValue::Day(_)) => return Err(format!("{name:?} is bound to a single day, not a bag")),
                None => st.resolve_due(name, *chosen, day, reason),
            },
            Action::Query { formula, at, expected } => {
                let at = at.unwrap_or(day);
                return self.run_query(index, day, at, formula, *expected);
            }
        };
        self.state = next.map_err(|e| e.to_string())?;
        Ok(())
    }

    fn incur(&mut self, decl: &ObligationDecl, day: Day) -> Result<(), String> {
        let Some(due) = self.date_value(&decl.due, day, &decl.id)? else {
            return Ok(());
        };
        let due = match due {
            BindingValue::Day(d) => Due::Day(d),
            BindingValue::Bag(b) => Due::Bag(b),
        };
        let spec = ObligationSpec {
            id: decl.id.clone(),
            class: decl.class.clone(),
            obligor: decl.obligor.clone(),
            obligee: decl.obligee.clone(),
            due,
            end_date: decl.end_date,
            survives: decl.survives,
            inferred: decl.inferred,
        };
        let (next, _) = self.state.incur_obligation(spec, day).map_err(|e| e.to_string())?;
        self.state = next;
        Ok(())
    }

    fn run_query(&mut self, step: usize, day: Day, at: Day, text: &str, expected: Option<bool>) -> Result<(), String> {
        let q = match query(&self.state, self.sc.horizon, at, text, self.cal, self.cfg) {
            Ok(q) => q,
            Err(QueryError::Parse(e)) if e.kind == ParseErrorKind::HumanInputRequired => {
                self.flag(day, ViolationKind::HumanInputRequired, &format!("step {step}"), e.message);
                return Ok(());
            }
            Err(e) => return Err(format!("query {text:?}: {e}")),
        };
        let record = QueryRecord {
            step,
            day,
            at,
            formula: q.formula,
            result: q.result,
            expected,
            transcript: q.transcript,
        };
        if !record.matches() {
            let detail = format!(
                "{} was {:?}, expected {}",
                record.formula,
                record.result,
                expected.unwrap_or_default()
            );
            self.flag(day, ViolationKind::QueryMismatch, &format!("step {step}"), detail);
        }
        self.queries.push(record);
        Ok(())
    }

    fn check_day(&mut self, day: Day) -> Result<(), String> {
        let mut found = Vec::new();
        for (id, o) in self.state.obligations() {
            let status = o.status(day);
            let prev = self.statuses.insert(id.clone(), status);
            if prev == Some(status) {
                continue;
            }
            match status {
                ObligationStatus::Overdue => found.push((
                    ViolationKind::Overdue,
                    id.clone(),
                    format!("due {} and not discharged", o.effective_due()),
                )),
                ObligationStatus::DischargedLate => found.push((
                    ViolationKind::SanctionLate,
                    id.clone(),
                    format!(
                        "discharged {} after the due date {}",
                        o.discharged_at.map_or("-".into(), |d| d.to_string()),
                        o.effective_due()
                    ),
                )),
                _ => {}
            }
        }
        for (kind, id, detail) in found {
            self.flag(day, kind, &id, detail);
        }

        if self.prohibitions.iter().all(|p| !p.scope.contains(day)) && self.repetitions.is_empty() {
            return Ok(());
        }
        let h = self.sc.horizon;
        let trace = self.state.materialize(h.begin, h.end).map_err(|e| e.to_string())?;

        let mut breaches = Vec::new();
        for (i, p) in self.prohibitions.iter().enumerate() {
            if !p.scope.contains(day) {
                continue;
            }
            let f = match compile_formula(&p.condition, &self.env(day)) {
                Ok(f) => f,
                // a name the condition mentions is not bound yet
                Err(CompileError::UnknownName(_)) => continue,
                Err(e) => return Err(format!("prohibition {:?}: {e}", p.id)),
            };
            let v = Evaluator::new(&trace).supervaluate(&f, day, &[]).map_err(|e| e.to_string())?;
            breaches.push((i, v));
        }
        for (i, v) in breaches {
            let p = &mut self.prohibitions[i];
            match v {
                Tri::True if !p.in_breach => {
                    p.in_breach = true;
                    let (id, detail) = (p.id.clone(), format!("{} holds", p.condition.print()));
                    self.flag(day, ViolationKind::ProhibitionBreach, &id, detail);
                }
                Tri::True | Tri::Indeterminate => {}
                Tri::False => p.in_breach = false,
            }
        }

        let mut found = Vec::new();
        for r in &mut self.repetitions {
            let c = &r.constraint;
            if c.window.is_empty() || day < c.window.start() || day > c.window.end() {
                continue;
            }
            let count = c.window.iter().filter(|d| *d <= day && trace.realized(&c.action, *d)).count() as u64;
            let judged = c.judge(count);
            if judged.above_max && !r.over {
                r.over = true;
                found.push((c.id.clone(), format!("{} realized {count} times, at most {} allowed", c.action, c.max.unwrap_or(0))));
            }
            if day == c.window.end() && judged.below_min {
                found.push((c.id.clone(), format!("{} realized {count} times, at least {} required", c.action, c.min.unwrap_or(0))));
            }
        }
        for (id, detail) in found {
            self.flag(day, ViolationKind::RepetitionBreach, &id, detail);
        }
        Ok(())
    }

    fn finish(self) -> Report {
        let st = &self.state;
        let at = st.as_of();
        let final_state = FinalState {
            as_of: at,
            events: st
                .events()
                .values()
                .map(|e| EventSummary {
                    id: e.id.clone(),
                    phase: e.phase(at).phase,
                    start: e.actual_start,
                    end: e.actual_end,
                })
                .collect(),
            obligations: st
                .obligations()
                .values()
                .map(|o| ObligationSummary {
                    id: o.id.clone(),
                    status: o.status(at),
                    due: o.due.clone(),
                    effective_due: o.effective_due(),
                    discharged_at: o.discharged_at,
                    revisions: o.revisions.len(),
                })
                .collect(),
            rights: st
                .rights()
                .values()
                .map(|r| RightSummary {
                    id: r.id.clone(),
                    active: r.is_active(at),
                    activations: r.activations.len(),
                    exercises: r.activations.iter().map(|a| a.exercises.len()).sum(),
                })
                .collect(),
            bindings: st
                .registry()
                .names()
                .filter_map(|n| {
                    let h = st.registry().history(n);
                    h.last().map(|last| BindingSummary {
                        name: n.to_string(),
                        value: last.value.clone(),
                        source: last.source,
                        records: h.len(),
                    })
                })
                .collect(),
        };
        Report {
            scenario: self.sc.id.clone(),
            horizon: self.sc.horizon,
            violations: self.violations,
            queries: self.queries,
            final_state,
        }
    }
}
