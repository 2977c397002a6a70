//! Turns a parsed phrase into a date, interval, set, bag, count or formula.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::bag::DateBag;
use crate::binding::{BindingRegistry, BindingValue};
use crate::calendar::{PropertyCalendar, Rule, DEFAULT_HORIZON};
use crate::dateset::DateSet;
use crate::deontic::{self, ContractState};
use crate::dsl::ast::*;
use crate::dsl::config::ReasonablenessConfig;
use crate::error::{CompileError, DeonticError, EvalError, SetError, TimeError};
use crate::interval::ContinuousInterval;
use crate::ru::{Atom, Formula, SpanExpr, TimeExpr};
use crate::time::{Day, TimePoint};

/// Everything a phrase may refer to besides its own text.
#[derive(Debug, Clone)]
pub struct CompileEnv<'a> {
    pub registry: &'a BindingRegistry,
    pub calendar: &'a PropertyCalendar,
    pub reasonableness: &'a ReasonablenessConfig,
    pub term: ContinuousInterval,
    pub today: Option<Day>,
    pub state: Option<&'a ContractState>,
    /// Return [`CompiledValue::Deferred`] for unbound names instead of failing.
    pub allow_deferred: bool,
    /// Search limit, in days, for calendar property lookups.
    pub horizon: u32,
}

impl<'a> CompileEnv<'a> {
    pub fn new(
        registry: &'a BindingRegistry,
        calendar: &'a PropertyCalendar,
        reasonableness: &'a ReasonablenessConfig,
        term: ContinuousInterval,
    ) -> Self {
        CompileEnv {
            registry,
            calendar,
            reasonableness,
            term,
            today: None,
            state: None,
            allow_deferred: false,
            horizon: DEFAULT_HORIZON,
        }
    }

    pub fn today(mut self, day: Day) -> Self {
        self.today = Some(day);
        self
    }

    pub fn state(mut self, state: &'a ContractState) -> Self {
        self.state = Some(state);
        self
    }

    pub fn deferring(mut self, allow: bool) -> Self {
        self.allow_deferred = allow;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum CompiledValue {
    Day(Day),
    Point(TimePoint),
    Interval(ContinuousInterval),
    Set(DateSet),
    Bag(DateBag),
    #[serde(serialize_with = "formula_text")]
    Formula(Formula),
    Count(i64),
    /// Bounds on a number of occurrences.
    Bounds { min: Option<u32>, max: Option<u32> },
    /// Bounds on a number of days.
    DayBounds { min: Option<u32>, max: Option<u32> },
    /// Depends on a name not bound yet.
    Deferred(String),
}

fn formula_text<S: serde::Serializer>(f: &Formula, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(f)
}

impl fmt::Display for CompiledValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompiledValue::Day(d) => write!(f, "{d}"),
            CompiledValue::Point(p) => write!(f, "{p}"),
            CompiledValue::Interval(i) => write!(f, "{i}"),
            CompiledValue::Set(s) => {
                let days: Vec<String> = s.iter().map(|d| d.to_string()).collect();
                write!(f, "{{{}}} within {}..{}", days.join(", "), s.start(), s.end())
            }
            CompiledValue::Bag(b) => write!(f, "{b}"),
            CompiledValue::Formula(x) => write!(f, "{x}"),
            CompiledValue::Count(n) => write!(f, "{n}"),
            CompiledValue::Bounds { min, max } => {
                let show = |b: &Option<u32>| b.map_or("-".to_string(), |n| n.to_string());
                write!(f, "between {} and {} times", show(min), show(max))
            }
            CompiledValue::DayBounds { min, max } => {
                let show = |b: &Option<u32>| b.map_or("-".to_string(), |n| n.to_string());
                write!(f, "between {} and {} days", show(min), show(max))
            }
            CompiledValue::Deferred(n) => write!(f, "deferred until {n} is bound"),
        }
    }
}

impl CompiledValue {
    pub fn kind(&self) -> &'static str {
        match self {
            CompiledValue::Day(_) => "day",
            CompiledValue::Point(_) => "time point",
            CompiledValue::Interval(_) => "interval",
            CompiledValue::Set(_) => "set",
            CompiledValue::Bag(_) => "bag",
            CompiledValue::Formula(_) => "formula",
            CompiledValue::Count(_) => "count",
            CompiledValue::Bounds { .. } => "bounds",
            CompiledValue::DayBounds { .. } => "day bounds",
            CompiledValue::Deferred(_) => "deferred value",
        }
    }
}

/// Compilation stops either on an error or on an unbound name.
enum Halt {
    Deferred(String),
    Error(CompileError),
}

macro_rules! halt_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Halt {
            fn from(e: $t) -> Self {
                Halt::Error(e.into())
            }
        }
    )*};
}
halt_from!(CompileError, TimeError, SetError, DeonticError, EvalError);

type CResult<T> = Result<T, Halt>;

fn kind_error<T>(msg: impl Into<String>) -> CResult<T> {
    Err(Halt::Error(CompileError::Kind(msg.into())))
}

/// Compiles `node`. The kind of result follows from the root production.
pub fn compile(node: &Node, env: &CompileEnv<'_>) -> Result<CompiledValue, CompileError> {
    let c = Compiler { env };
    match c.value(node) {
        Ok(v) => Ok(v),
        Err(Halt::Deferred(name)) if env.allow_deferred => Ok(CompiledValue::Deferred(name)),
        Err(Halt::Deferred(name)) => Err(CompileError::UnknownName(name)),
        Err(Halt::Error(e)) => Err(e),
    }
}

/// Compiles a condition phrase into a formula.
pub fn compile_formula(node: &Node, env: &CompileEnv<'_>) -> Result<Formula, CompileError> {
    match compile(node, env)? {
        CompiledValue::Formula(f) => Ok(f),
        CompiledValue::Deferred(n) => Err(CompileError::UnknownName(n)),
        other => Err(CompileError::Kind(format!("expected a condition, found a {}", other.kind()))),
    }
}

struct Compiler<'e, 'a> {
    env: &'e CompileEnv<'a>,
}

/// A resolved anchor: a single day or a bag of them.
enum Anchor {
    Day(Day),
    Bag(DateBag),
}

impl Compiler<'_, '_> {
    fn state(&self) -> CResult<&ContractState> {
        self.env.state.ok_or(Halt::Error(CompileError::NoState))
    }

    fn today(&self) -> CResult<Day> {
        self.env.today.ok_or(Halt::Error(CompileError::NoCurrentDate))
    }

    fn name(&self, name: &str) -> CResult<CompiledValue> {
        match self.env.registry.current(name) {
            Some(BindingValue::Day(d)) => Ok(CompiledValue::Day(*d)),
            Some(BindingValue::Bag(b)) => Ok(match b.chosen() {
                Some(d) => CompiledValue::Day(d),
                None => CompiledValue::Bag(b.clone()),
            }),
            None => Err(Halt::Deferred(name.to_string())),
        }
    }

    fn anchor(&self, node: &Node) -> CResult<Anchor> {
        match self.value(node)? {
            CompiledValue::Day(d) => Ok(Anchor::Day(d)),
            CompiledValue::Point(TimePoint::Finite(d)) => Ok(Anchor::Day(d)),
            CompiledValue::Bag(b) => Ok(Anchor::Bag(b)),
            other => kind_error(format!("{node} is a {}, not a date", other.kind())),
        }
    }

    fn day(&self, node: &Node) -> CResult<Day> {
        match self.anchor(node)? {
            Anchor::Day(d) => Ok(d),
            Anchor::Bag(b) => kind_error(format!("{node} is an unresolved bag {b}, not a single date")),
        }
    }

    fn point(&self, node: &Node) -> CResult<TimePoint> {
        match node {
            Node::Extreme(p) => Ok(*p),
            _ => Ok(TimePoint::Finite(self.day(node)?)),
        }
    }

    fn window_bag(&self, anchor: Day, w: u32) -> CResult<DateBag> {
        let days = (0..=w as i64).map(|k| anchor.add_days(k)).collect::<Result<Vec<_>, _>>()?;
        Ok(DateBag::new(days))
    }

    fn event(&self, id: &str) -> CResult<&deontic::Event> {
        Ok(self.state()?.event(id)?)
    }

    /// End of the named event if it has one, else the named date.
    fn end_or_date(&self, name: &str) -> CResult<Day> {
        if let Some(e) = self.env.state.and_then(|s| s.events().get(name)) {
            return e.actual_end.ok_or_else(|| {
                Halt::Error(
                    DeonticError::MissingDate {
                        id: name.to_string(),
                        which: "end",
                    }
                    .into(),
                )
            });
        }
        self.day(&Node::NamedDate(name.to_string()))
    }

    fn start_or_date(&self, name: &str) -> CResult<Day> {
        if let Some(e) = self.env.state.and_then(|s| s.events().get(name)) {
            return e.actual_start.ok_or_else(|| {
                Halt::Error(
                    DeonticError::MissingDate {
                        id: name.to_string(),
                        which: "start",
                    }
                    .into(),
                )
            });
        }
        self.day(&Node::NamedDate(name.to_string()))
    }

    fn set(&self, node: &Node) -> CResult<DateSet> {
        match self.value(node)? {
            CompiledValue::Set(s) => Ok(s),
            other => kind_error(format!("{node} is a {}, not a set of days", other.kind())),
        }
    }

    fn value(&self, node: &Node) -> CResult<CompiledValue> {
        use CompiledValue as V;
        let env = self.env;
        Ok(match node {
            Node::DateLiteral(d) => V::Day(*d),
            Node::Extreme(p) => V::Point(*p),
            Node::NamedDate(n) => self.name(n)?,
            Node::Context(c) => self.name(&c.binding_name())?,
            Node::Var(v) => return kind_error(format!("day variable {v} is not bound here")),
            Node::Today => V::Day(self.today()?),
            Node::Offset {
                n,
                direction,
                anchor,
                property,
            } => {
                let k = match direction {
                    Direction::After => *n as i64,
                    Direction::Before => -(*n as i64),
                };
                match (self.anchor(anchor)?, property) {
                    (Anchor::Day(d), None) => V::Day(d.add_days(k)?),
                    (Anchor::Day(d), Some(p)) => V::Day(env.calendar.offset_by_property(d, p, k, env.horizon)?),
                    (Anchor::Bag(b), None) => V::Bag(b.shift(k)?),
                    (Anchor::Bag(b), Some(_)) => {
                        return kind_error(format!("cannot count calendar days from the unresolved bag {b}"))
                    }
                }
            }
            Node::AtLeastOffset { n, anchor } => {
                let a = self.day(anchor)?;
                V::Interval(ContinuousInterval::new(a.add_days(*n as i64 - 1)?, TimePoint::PosInfinity))
            }
            Node::AtMostOffset { n, anchor } => {
                let a = self.day(anchor)?;
                V::Set(DateSet::range(a.succ()?, a.add_days(*n as i64)?)?)
            }
            Node::FirstWithPropertyAfter { property, anchor } => {
                let a = self.day(anchor)?;
                V::Day(env.calendar.first_with_property_after(a, property, env.horizon)?)
            }
            Node::NextSucceeding { property, after } => {
                let a = match after {
                    Some(a) => self.day(a)?,
                    None => self.today()?,
                };
                V::Day(env.calendar.first_with_property_after(a, property, env.horizon)?)
            }
            Node::ImmediatelyBefore(e) => V::Day(deontic::immediately_before(self.event(e)?)?),
            Node::Immediately(e) => V::Set(deontic::immediately_after(self.event(e)?)?),
            Node::EventBoundary { event, boundary } => {
                let e = self.event(event)?;
                let (d, which) = match boundary {
                    Boundary::Start => (e.actual_start, "start"),
                    Boundary::End => (e.actual_end, "end"),
                };
                V::Day(d.ok_or_else(|| {
                    Halt::Error(
                        DeonticError::MissingDate {
                            id: event.clone(),
                            which,
                        }
                        .into(),
                    )
                })?)
            }
            Node::DueDate(o) => V::Day(self.state()?.obligation(o)?.effective_due()),
            Node::LastPaymentDate { class, reading } => V::Day(self.state()?.last_payment_date(class, *reading)?),
            Node::DeferredTo { date, .. } => V::Day(self.day(date)?),
            Node::Alternatives(alts) => {
                let days = alts.iter().map(|a| self.day(a)).collect::<CResult<Vec<_>>>()?;
                V::Bag(DateBag::new(days))
            }
            Node::OnOrAsSoonAsPracticable { anchor, reasonably } => {
                let adverb = if *reasonably {
                    Adverb::AsSoonAsReasonablyPracticable
                } else {
                    Adverb::AsSoonAsPracticable
                };
                V::Bag(self.window_bag(self.day(anchor)?, env.reasonableness.window(adverb))?)
            }
            Node::Reasonableness { adverb, anchor } => {
                let a = match anchor {
                    Some(a) => self.day(a)?,
                    None => self.today()?,
                };
                V::Bag(self.window_bag(a, env.reasonableness.window(*adverb))?)
            }
            Node::NoticeWindow { n, event } => {
                let end = self.end_or_date(event)?;
                V::Set(DateSet::range(end, end.add_days(*n as i64)?)?)
            }
            Node::Window { anchor, lo, hi } => {
                let a = self.day(anchor)?;
                if lo > hi {
                    V::Set(DateSet::empty_at(a))
                } else {
                    V::Set(DateSet::range(a.add_days(*lo as i64)?, a.add_days(*hi as i64)?)?)
                }
            }
            Node::AllDaysBetween { from, to } => {
                let a = self.end_or_date(from)?;
                let b = self.start_or_date(to)?;
                V::Set(DateSet::range(a.succ()?, b.pred()?)?)
            }
            Node::EveryNthWeekday { nth, weekday, from, to } => {
                let rule = match nth {
                    Some(n) => Rule::NthWeekdayOfMonth {
                        n: n.index(),
                        weekday: *weekday,
                    },
                    None => Rule::Weekdays {
                        days: BTreeSet::from([*weekday]),
                        holidays: BTreeSet::new(),
                    },
                };
                V::Set(DateSet::from_rule(&rule, self.point(from)?, self.point(to)?, Some(env.calendar))?)
            }
            Node::AnyDay {
                property,
                from,
                to,
                except,
            } => {
                let mut excluded = BTreeSet::new();
                for x in except {
                    match self.value(x)? {
                        V::Day(d) | V::Point(TimePoint::Finite(d)) => {
                            excluded.insert(d);
                        }
                        V::Set(s) => excluded.extend(s.iter()),
                        V::Bag(b) => excluded.extend(b.distinct()),
                        other => return kind_error(format!("cannot exclude a {} from a set of days", other.kind())),
                    }
                }
                let range = DateSet::range(self.day(from)?, self.day(to)?)?;
                let filtered = match property {
                    Some(p) => range.try_filter(|d| env.calendar.has_property(d, p))?,
                    None => range,
                };
                V::Set(filtered.filter(|d| !excluded.contains(&d)))
            }
            Node::Period { from, to, .. } => V::Set(DateSet::range(self.day(from)?, self.day(to)?)?),
            Node::WithEffectFrom { anchor, mode, until } => {
                let x = self.day(anchor)?;
                match mode {
                    EffectMode::Continuous => {
                        let end = match until {
                            Some(u) => self.point(u)?,
                            None => env.term.end(),
                        };
                        V::Interval(ContinuousInterval::new(x.pred()?, end))
                    }
                    EffectMode::Discrete => {
                        let end = match until {
                            Some(u) => self.point(u)?,
                            None => env.term.end(),
                        };
                        match end {
                            TimePoint::Finite(e) => V::Set(DateSet::range(x, e.pred()?)?),
                            TimePoint::NegInfinity => V::Set(DateSet::empty_at(x)),
                            TimePoint::PosInfinity => {
                                return Err(SetError::UnboundedGenerator(format!(
                                    "every day from {x} onwards has no end"
                                ))
                                .into())
                            }
                        }
                    }
                }
            }
            Node::AtAllTimesUntil(x) => V::Interval(ContinuousInterval::new(env.term.start(), self.point(x)?)),
            Node::AtAnyTime | Node::FullForceAndEffect(_) => V::Interval(env.term),
            Node::SoLongAs(e) => {
                let ev = self.event(e)?;
                match ev.actual_start {
                    Some(s) => V::Interval(ContinuousInterval::new(
                        s.pred()?,
                        ev.actual_end.map_or(TimePoint::PosInfinity, TimePoint::Finite),
                    )),
                    None => V::Interval(ContinuousInterval::empty_at(env.term.start())),
                }
            }
            Node::InTheFuture(end) => {
                let end = match end {
                    FutureEnd::AgreementEnd => env.term.end(),
                    FutureEnd::NoEnd => TimePoint::PosInfinity,
                };
                V::Interval(ContinuousInterval::new(self.today()?, end))
            }
            Node::Survives { until } => {
                let end = match until {
                    Some(u) => self.point(u)?,
                    None => TimePoint::PosInfinity,
                };
                V::Interval(ContinuousInterval::new(env.term.start(), end))
            }
            Node::DaysBetween { from, to, property } => {
                let a = self.day(from)?;
                let b = self.day(to)?;
                match property {
                    None => V::Count(b.diff_days(a)),
                    Some(p) if a <= b => V::Count(env.calendar.count_days_with_property(a.succ()?, b, p)? as i64),
                    Some(p) => V::Count(-(env.calendar.count_days_with_property(b.succ()?, a, p)? as i64)),
                }
            }
            Node::Days(n) => V::Count(*n as i64),
            Node::Times { min, max } => V::Bounds { min: *min, max: *max },
            Node::DaysBounded { min, max } => V::DayBounds { min: *min, max: *max },
            _ => V::Formula(self.formula(node)?),
        })
    }

    fn time(&self, node: &Node) -> CResult<TimeExpr> {
        Ok(match node {
            Node::Var(v) => TimeExpr::Var(v.clone()),
            Node::Today => TimeExpr::Now,
            Node::Offset {
                n,
                direction,
                anchor,
                property: None,
            } if matches!(**anchor, Node::Var(_) | Node::Today) => {
                let k = match direction {
                    Direction::After => *n as i64,
                    Direction::Before => -(*n as i64),
                };
                self.time(anchor)?.offset(k)
            }
            _ => match self.value(node)? {
                CompiledValue::Day(d) => TimeExpr::from(d),
                CompiledValue::Point(p) => TimeExpr::Point(p),
                CompiledValue::Bag(b) => TimeExpr::Bag(b),
                other => return kind_error(format!("{node} is a {}, not a date", other.kind())),
            },
        })
    }

    fn event_atom(name: &str, e: &str) -> Formula {
        Formula::atom(Atom::unary(name, e))
    }

    fn formula(&self, node: &Node) -> CResult<Formula> {
        let now = || TimeExpr::Now;
        Ok(match node {
            Node::Truth(b) => Formula::Truth(*b),
            Node::Not(x) => Formula::not(self.formula(x)?),
            Node::And(a, b) => Formula::and(self.formula(a)?, self.formula(b)?),
            Node::Or(a, b) => Formula::or(self.formula(a)?, self.formula(b)?),
            Node::Atom { name, args } => Formula::atom(Atom::new(name.clone(), args.clone())),
            Node::PhaseCondition { subject, phase } => {
                let name = match &**subject {
                    Node::NamedDate(n) => n.clone(),
                    other => {
                        // a date "has occurred" once it is no later than today
                        let t = self.time(other)?;
                        return Ok(match phase {
                            Phase::HasOccurred => Formula::not(Formula::precedes(now(), t)),
                            _ => return kind_error(format!("{other} is a date, not an event")),
                        });
                    }
                };
                if self.env.registry.current(&name).is_some() {
                    let t = self.time(subject)?;
                    return match phase {
                        Phase::HasOccurred => Ok(Formula::not(Formula::precedes(now(), t))),
                        _ => kind_error(format!("{name} is a date, not an event")),
                    };
                }
                match phase {
                    Phase::HasOccurred => Self::event_atom("has_occurred", &name),
                    Phase::IsContinuing => Self::event_atom("is_continuing", &name),
                    Phase::HasCeased => Self::event_atom("has_ceased", &name),
                    Phase::OccurredAndContinuing => Formula::and(
                        Self::event_atom("has_occurred", &name),
                        Self::event_atom("is_continuing", &name),
                    ),
                }
            }
            Node::OccursPriorTo(a, b) => Formula::rd(
                SpanExpr::new(TimePoint::NegInfinity, now()),
                Formula::and(
                    Self::event_atom("starts", b),
                    Formula::rb(now(), Self::event_atom("ends", a)),
                ),
            ),
            Node::HasTakenAction(e) => Formula::rb(now(), Self::event_atom("ends", e)),
            Node::ThereIs(e) => Formula::and(
                Self::event_atom("has_occurred", e),
                Self::event_atom("is_continuing", e),
            ),
            Node::Designated(n) => Self::event_atom("designated", n),
            Node::EarlierDesignated(n) => Formula::rb(now(), Self::event_atom("designated", n)),
            Node::Specified { name, negated, .. } => {
                let f = Self::event_atom("specified", name);
                if *negated {
                    Formula::not(f)
                } else {
                    f
                }
            }
            Node::HasSatisfied(o) => Self::event_atom("has_satisfied", o),
            Node::Compare { subject, op, operand } => {
                let s = match subject {
                    Some(s) => self.time(s)?,
                    None => now(),
                };
                let o = self.time(operand)?;
                match op {
                    CompareOp::PriorTo => Formula::precedes(s, o),
                    CompareOp::After => Formula::precedes(o, s),
                    CompareOp::SameDay => Formula::same_day(s, o),
                    CompareOp::OnOrBefore => Formula::not(Formula::precedes(o, s)),
                    CompareOp::OnOrAfter => Formula::not(Formula::precedes(s, o)),
                }
            }
            Node::RealizedAt { at, body } => Formula::realized_at(self.time(at)?, self.formula(body)?),
            Node::Span { op, begin, end, body } => {
                let span = SpanExpr::new(self.time(begin)?, self.time(end)?);
                match op {
                    SpanOp::Rd => Formula::rd(span, self.formula(body)?),
                    SpanOp::Rt => Formula::rt(span, self.formula(body)?),
                }
            }
            Node::Before { at, body } => Formula::rb(self.time(at)?, self.formula(body)?),
            Node::Quantified {
                quantifier,
                var,
                domain,
                body,
            } => {
                let domain = self.set(domain)?;
                let body = Box::new(self.formula(body)?);
                match quantifier {
                    Quantifier::ForAll => Formula::ForAllDays {
                        var: var.clone(),
                        domain,
                        body,
                    },
                    Quantifier::Exists => Formula::ExistsDay {
                        var: var.clone(),
                        domain,
                        body,
                    },
                }
            }
            other => return kind_error(format!("{other} is a value, not a condition")),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binding::{BindingRecord, BindingSource};
    use crate::dsl::parse;
    use crate::time::Weekday;

    fn day(s: &str) -> Day {
        s.parse().unwrap()
    }

    fn mon_fri() -> PropertyCalendar {
        PropertyCalendar::new()
            .with_rule(
                "GeneralBusinessDay",
                Rule::Weekdays {
                    days: [Weekday::Mon, Weekday::Tue, Weekday::Wed, Weekday::Thu, Weekday::Fri].into(),
                    holidays: BTreeSet::new(),
                },
            )
            .unwrap()
    }

    fn term() -> ContinuousInterval {
        ContinuousInterval::new(day("2017-12-31"), day("2019-01-01"))
    }

    fn run(text: &str, reg: &BindingRegistry) -> Result<CompiledValue, CompileError> {
        let cal = mon_fri();
        let cfg = ReasonablenessConfig::default();
        let env = CompileEnv::new(reg, &cal, &cfg, term()).today(day("2018-06-01"));
        compile(&parse(text).unwrap(), &env)
    }

    fn bound(reg: BindingRegistry, name: &str, value: BindingValue) -> BindingRegistry {
        reg.bind(
            name,
            BindingRecord {
                value,
                bound_at: day("2018-01-01"),
                bound_by: "text".into(),
                reason: String::new(),
                source: BindingSource::Text,
                properties: BTreeSet::new(),
            },
        )
        .unwrap()
    }

    #[test]
    fn first_business_day_matches_linear_scan() {
        let got = run("the first GeneralBusinessDay after 2018-06-01", &BindingRegistry::new()).unwrap();
        let mut oracle = day("2018-06-02");
        while matches!(oracle.weekday(), Weekday::Sat | Weekday::Sun) {
            oracle = oracle.succ().unwrap();
        }
        assert_eq!(got, CompiledValue::Day(oracle));
        assert_eq!(oracle, day("2018-06-04"));
    }

    #[test]
    fn practicable_bag_has_window_plus_one_days() {
        let got = run("on or as soon as reasonably practicable following 2018-06-01", &BindingRegistry::new()).unwrap();
        let CompiledValue::Bag(b) = got else { panic!("expected a bag") };
        assert_eq!(b.alternatives(), &[day("2018-06-01"), day("2018-06-02"), day("2018-06-03")]);
    }

    #[test]
    fn with_effect_from_interval() {
        let got = run("with effect from 2018-06-01 at all times until 2018-12-31", &BindingRegistry::new()).unwrap();
        let CompiledValue::Interval(i) = got else { panic!("expected an interval") };
        assert!(i.is_before_start(day("2018-05-31")));
        assert!(i.contains(day("2018-06-01")));
        assert!(i.contains(day("2018-12-30")));
        assert!(i.is_after_end(day("2018-12-31")));
        let CompiledValue::Set(s) = run("with effect from 2018-06-01 [discrete] until 2018-06-05", &BindingRegistry::new()).unwrap() else {
            panic!("expected a set")
        };
        assert_eq!(s.len(), 4);
    }

    #[test]
    fn every_first_monday() {
        let CompiledValue::Set(s) = run("every first Monday of every month from 2018-01-01 to 2018-12-31", &BindingRegistry::new()).unwrap() else {
            panic!("expected a set")
        };
        let oracle: Vec<Day> = Day::range_inclusive(day("2018-01-01"), day("2018-12-31"))
            .filter(|d| d.weekday() == Weekday::Mon && d.day_of_month() <= 7)
            .collect();
        assert_eq!(s.iter().collect::<Vec<_>>(), oracle);
        assert_eq!(oracle.len(), 12);
    }

    #[test]
    fn named_dates_defer_or_fail() {
        let reg = BindingRegistry::new();
        let cal = mon_fri();
        let cfg = ReasonablenessConfig::default();
        let ast = parse("at least 5 days after EffectiveDate").unwrap();
        let env = CompileEnv::new(&reg, &cal, &cfg, term());
        assert_eq!(compile(&ast, &env), Err(CompileError::UnknownName("EffectiveDate".into())));
        let env = env.deferring(true);
        assert_eq!(compile(&ast, &env), Ok(CompiledValue::Deferred("EffectiveDate".into())));
        let reg = bound(reg, "EffectiveDate", BindingValue::Day(day("2018-06-01")));
        let env = CompileEnv::new(&reg, &cal, &cfg, term());
        let CompiledValue::Interval(i) = compile(&ast, &env).unwrap() else { panic!() };
        assert!(!i.contains(day("2018-06-05")));
        assert!(i.contains(day("2018-06-06")));
    }

    #[test]
    fn unknown_property() {
        let err = run("the first Holiday after 2018-06-01", &BindingRegistry::new()).unwrap_err();
        assert!(matches!(err, CompileError::Time(TimeError::UnknownProperty(_))));
    }

    #[test]
    fn offsets_and_counts() {
        let reg = bound(BindingRegistry::new(), "X", BindingValue::Day(day("2018-06-01")));
        let reg = bound(reg, "Y", BindingValue::Day(day("2018-06-11")));
        assert_eq!(run("3 days before X", &reg).unwrap(), CompiledValue::Day(day("2018-05-29")));
        assert_eq!(run("2 GeneralBusinessDays after X", &reg).unwrap(), CompiledValue::Day(day("2018-06-05")));
        assert_eq!(run("the number of days between X and Y", &reg).unwrap(), CompiledValue::Count(10));
        // business days in (Jun 1, Jun 11]: 4..8 and 11
        assert_eq!(
            run("the number of GeneralBusinessDays between X and Y", &reg).unwrap(),
            CompiledValue::Count(6)
        );
        let CompiledValue::Set(s) = run("no more than 3 days after X", &reg).unwrap() else { panic!() };
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![day("2018-06-02"), day("2018-06-03"), day("2018-06-04")]);
        let CompiledValue::Set(s) = run("on any GeneralBusinessDay from X to Y other than 2018-06-05", &reg).unwrap() else {
            panic!()
        };
        assert_eq!(s.len(), 6);
        assert!(!s.contains(day("2018-06-05")));
    }

    #[test]
    fn bag_anchors_shift() {
        let reg = bound(
            BindingRegistry::new(),
            "X",
            BindingValue::Bag(DateBag::new([day("2018-06-01"), day("2018-06-03")])),
        );
        let CompiledValue::Bag(b) = run("2 days after X", &reg).unwrap() else { panic!() };
        assert_eq!(b.alternatives(), &[day("2018-06-03"), day("2018-06-05")]);
        assert!(matches!(run("at least 2 days after X", &reg), Err(CompileError::Kind(_))));
    }

    #[test]
    fn conditions_compile_to_formulas() {
        let reg = bound(BindingRegistry::new(), "X", BindingValue::Day(day("2018-06-01")));
        let f = run("EventOfDefault has occurred and is continuing", &reg).unwrap();
        assert_eq!(
            f,
            CompiledValue::Formula(Formula::and(
                Formula::atom(Atom::unary("has_occurred", "EventOfDefault")),
                Formula::atom(Atom::unary("is_continuing", "EventOfDefault")),
            ))
        );
        let f = run("X has occurred", &reg).unwrap();
        assert_eq!(
            f,
            CompiledValue::Formula(Formula::not(Formula::precedes(TimeExpr::Now, day("2018-06-01"))))
        );
        let f = run("prior to (2018-06-01 or 2018-06-03)", &reg).unwrap();
        let CompiledValue::Formula(Formula::Precedes(TimeExpr::Now, TimeExpr::Bag(b))) = f else {
            panic!("{f:?}")
        };
        assert_eq!(b.len(), 2);
    }

    #[test]
    fn state_dependent_phrases_need_state() {
        assert_eq!(run("immediately before E", &BindingRegistry::new()), Err(CompileError::NoState));
        let reg = BindingRegistry::new();
        let cal = mon_fri();
        let cfg = ReasonablenessConfig::default();
        let env = CompileEnv::new(&reg, &cal, &cfg, term());
        assert_eq!(compile(&parse("promptly").unwrap(), &env), Err(CompileError::NoCurrentDate));
    }
}
