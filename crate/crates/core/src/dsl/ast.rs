use std::fmt;

use serde::Serialize;

use crate::deontic::PaymentReading;
use crate::time::{Day, TimePoint, Weekday};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    After,
    Before,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Nth {
    First,
    Second,
    Third,
    Fourth,
    Fifth,
    Last,
}

impl Nth {
    pub const ALL: [Nth; 6] = [Nth::First, Nth::Second, Nth::Third, Nth::Fourth, Nth::Fifth, Nth::Last];

    pub fn index(self) -> i8 {
        match self {
            Nth::First => 1,
            Nth::Second => 2,
            Nth::Third => 3,
            Nth::Fourth => 4,
            Nth::Fifth => 5,
            Nth::Last => -1,
        }
    }

    pub fn word(self) -> &'static str {
        match self {
            Nth::First => "first",
            Nth::Second => "second",
            Nth::Third => "third",
            Nth::Fourth => "fourth",
            Nth::Fifth => "fifth",
            Nth::Last => "last",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectMode {
    Continuous,
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FutureEnd {
    AgreementEnd,
    NoEnd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Start,
    End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PeriodKind {
    NoticeRequirement,
    GracePeriod,
    WaitingPeriod,
}

impl PeriodKind {
    pub fn phrase(self) -> &'static str {
        match self {
            PeriodKind::NoticeRequirement => "the notice requirement",
            PeriodKind::GracePeriod => "the applicable grace period",
            PeriodKind::WaitingPeriod => "the applicable waiting period",
        }
    }
}

/// A date referred to by context rather than by name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContextRef {
    ThatDate,
    SuchDate,
    ThatDay,
    DateSoDesignated,
    DateSpecified,
    TimeSpecified,
    TimesSpecified,
    DeterminedUnderClause(String),
}

impl ContextRef {
    /// The registry name the reference resolves through.
    pub fn binding_name(&self) -> String {
        match self {
            ContextRef::ThatDate => "ThatDate".into(),
            ContextRef::SuchDate => "SuchDate".into(),
            ContextRef::ThatDay => "ThatDay".into(),
            ContextRef::DateSoDesignated => "DateSoDesignated".into(),
            ContextRef::DateSpecified => "DateSpecified".into(),
            ContextRef::TimeSpecified => "TimeSpecified".into(),
            ContextRef::TimesSpecified => "TimesSpecified".into(),
            ContextRef::DeterminedUnderClause(c) => format!("Clause{c}Date"),
        }
    }
}

impl fmt::Display for ContextRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContextRef::ThatDate => f.write_str("that date"),
            ContextRef::SuchDate => f.write_str("such date"),
            ContextRef::ThatDay => f.write_str("that day"),
            ContextRef::DateSoDesignated => f.write_str("the date so designated"),
            ContextRef::DateSpecified => f.write_str("the date specified"),
            ContextRef::TimeSpecified => f.write_str("the time specified"),
            ContextRef::TimesSpecified => f.write_str("the time or times specified"),
            ContextRef::DeterminedUnderClause(c) => write!(f, "the date determined under Clause {c}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Adverb {
    Promptly,
    Timely,
    AsSoonAsReasonablyPracticable,
    AsSoonAsPracticable,
}

impl Adverb {
    pub const ALL: [Adverb; 4] = [
        Adverb::Promptly,
        Adverb::Timely,
        Adverb::AsSoonAsReasonablyPracticable,
        Adverb::AsSoonAsPracticable,
    ];

    pub fn phrase(self) -> &'static str {
        match self {
            Adverb::Promptly => "promptly",
            Adverb::Timely => "timely",
            Adverb::AsSoonAsReasonablyPracticable => "as soon as reasonably practicable",
            Adverb::AsSoonAsPracticable => "as soon as practicable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CompareOp {
    PriorTo,
    After,
    SameDay,
    OnOrBefore,
    OnOrAfter,
}

impl CompareOp {
    pub fn phrase(self) -> &'static str {
        match self {
            CompareOp::PriorTo => "prior to",
            CompareOp::After => "after",
            CompareOp::SameDay => "the same day as",
            CompareOp::OnOrBefore => "on or before",
            CompareOp::OnOrAfter => "on or after",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    HasOccurred,
    OccurredAndContinuing,
    IsContinuing,
    HasCeased,
}

impl Phase {
    pub fn phrase(self) -> &'static str {
        match self {
            Phase::HasOccurred => "has occurred",
            Phase::OccurredAndContinuing => "has occurred and is continuing",
            Phase::IsContinuing => "is continuing",
            Phase::HasCeased => "has ceased",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanOp {
    Rd,
    Rt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantifier {
    ForAll,
    Exists,
}

/// A parsed phrase. Value productions come first, then conditions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    DateLiteral(Day),
    Extreme(TimePoint),
    NamedDate(String),
    /// A day variable bound by an enclosing quantifier.
    Var(String),
    Today,
    Offset {
        n: u32,
        direction: Direction,
        anchor: Box<Node>,
        /// Count only days with this calendar property.
        property: Option<String>,
    },
    AtLeastOffset {
        n: u32,
        anchor: Box<Node>,
    },
    AtMostOffset {
        n: u32,
        anchor: Box<Node>,
    },
    FirstWithPropertyAfter {
        property: String,
        anchor: Box<Node>,
    },
    NextSucceeding {
        property: String,
        after: Option<Box<Node>>,
    },
    ImmediatelyBefore(String),
    Immediately(String),
    EventBoundary {
        event: String,
        boundary: Boundary,
    },
    DueDate(String),
    LastPaymentDate {
        class: String,
        reading: PaymentReading,
    },
    Context(ContextRef),
    Alternatives(Vec<Node>),
    OnOrAsSoonAsPracticable {
        anchor: Box<Node>,
        reasonably: bool,
    },
    Reasonableness {
        adverb: Adverb,
        anchor: Option<Box<Node>>,
    },
    NoticeWindow {
        n: u32,
        event: String,
    },
    Window {
        anchor: Box<Node>,
        lo: u32,
        hi: u32,
    },
    AllDaysBetween {
        from: String,
        to: String,
    },
    EveryNthWeekday {
        nth: Option<Nth>,
        weekday: Weekday,
        from: Box<Node>,
        to: Box<Node>,
    },
    AnyDay {
        property: Option<String>,
        from: Box<Node>,
        to: Box<Node>,
        except: Vec<Node>,
    },
    Period {
        kind: PeriodKind,
        from: Box<Node>,
        to: Box<Node>,
    },
    WithEffectFrom {
        anchor: Box<Node>,
        mode: EffectMode,
        until: Option<Box<Node>>,
    },
    AtAllTimesUntil(Box<Node>),
    AtAnyTime,
    SoLongAs(String),
    InTheFuture(FutureEnd),
    Survives {
        until: Option<Box<Node>>,
    },
    FullForceAndEffect(Option<String>),
    DaysBetween {
        from: Box<Node>,
        to: Box<Node>,
        property: Option<String>,
    },
    Days(u32),
    Times {
        min: Option<u32>,
        max: Option<u32>,
    },
    /// A bounded number of days, e.g. "no more than 7 days".
    DaysBounded {
        min: Option<u32>,
        max: Option<u32>,
    },
    DeferredTo {
        obligation: String,
        date: Box<Node>,
    },

    Truth(bool),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Atom {
        name: String,
        args: Vec<String>,
    },
    PhaseCondition {
        subject: Box<Node>,
        phase: Phase,
    },
    OccursPriorTo(String, String),
    HasTakenAction(String),
    Designated(String),
    EarlierDesignated(String),
    Specified {
        name: String,
        negated: bool,
        source: Option<String>,
    },
    HasSatisfied(String),
    ThereIs(String),
    Compare {
        subject: Option<Box<Node>>,
        op: CompareOp,
        operand: Box<Node>,
    },
    RealizedAt {
        at: Box<Node>,
        body: Box<Node>,
    },
    Span {
        op: SpanOp,
        begin: Box<Node>,
        end: Box<Node>,
        body: Box<Node>,
    },
    Before {
        at: Box<Node>,
        body: Box<Node>,
    },
    Quantified {
        quantifier: Quantifier,
        var: String,
        domain: Box<Node>,
        body: Box<Node>,
    },
}

/// What a production denotes once compiled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sort {
    Day,
    Interval,
    Set,
    Bag,
    Count,
    Formula,
    /// A bound name whose value is only known from the registry.
    Named,
}

impl Node {
    pub fn sort(&self) -> Sort {
        use Node::*;
        match self {
            DateLiteral(_) | Extreme(_) | Var(_) | Today | Offset { .. } | FirstWithPropertyAfter { .. }
            | NextSucceeding { .. } | ImmediatelyBefore(_) | EventBoundary { .. } | DueDate(_)
            | LastPaymentDate { .. } | DeferredTo { .. } => Sort::Day,
            NamedDate(_) | Context(_) => Sort::Named,
            Alternatives(_) | OnOrAsSoonAsPracticable { .. } | Reasonableness { .. } => Sort::Bag,
            AtLeastOffset { .. } | WithEffectFrom { mode: EffectMode::Continuous, .. } | AtAllTimesUntil(_)
            | AtAnyTime | SoLongAs(_) | InTheFuture(_) | Survives { .. } | FullForceAndEffect(_) => {
                Sort::Interval
            }
            AtMostOffset { .. } | Immediately(_) | NoticeWindow { .. } | Window { .. } | AllDaysBetween { .. }
            | EveryNthWeekday { .. } | AnyDay { .. } | Period { .. } | WithEffectFrom { .. } => Sort::Set,
            DaysBetween { .. } | Days(_) | Times { .. } | DaysBounded { .. } => Sort::Count,
            _ => Sort::Formula,
        }
    }

    /// Can this node denote a bag of alternatives?
    pub fn is_bag(&self) -> bool {
        self.sort() == Sort::Bag
    }

    /// Does this condition compare against a bag of alternatives?
    pub fn has_bag_comparison(&self) -> bool {
        match self {
            Node::Compare { subject, operand, .. } => {
                operand.is_bag() || subject.as_ref().is_some_and(|s| s.is_bag())
            }
            Node::Not(x) => x.has_bag_comparison(),
            Node::And(a, b) | Node::Or(a, b) => a.has_bag_comparison() || b.has_bag_comparison(),
            _ => false,
        }
    }

    /// Normalized source text; parsing it yields this node again.
    pub fn print(&self) -> String {
        self.to_string()
    }

    /// A plain-English gloss, one clause per node in source order.
    pub fn explain(&self) -> String {
        use Node::*;
        let e = |n: &Node| n.explain();
        match self {
            DateLiteral(d) => d.to_string(),
            Extreme(TimePoint::NegInfinity) => "the infinite past".into(),
            Extreme(_) => "the infinite future".into(),
            NamedDate(n) => n.clone(),
            Var(v) => format!("day {v}"),
            Today => "the current date".into(),
            Offset { n, direction, anchor, property } => {
                let dir = match direction {
                    Direction::After => "after",
                    Direction::Before => "before",
                };
                match property {
                    None => format!("the date {} {dir} {}", plural(*n, "day"), e(anchor)),
                    Some(p) => format!("the date reached by counting {n} {p} days {dir} {}", e(anchor)),
                }
            }
            AtLeastOffset { n, anchor } => format!("a date no earlier than {} after {}", plural(*n, "day"), e(anchor)),
            AtMostOffset { n, anchor } => {
                format!("any date after {} and no more than {} after it", e(anchor), plural(*n, "day"))
            }
            FirstWithPropertyAfter { property, anchor } => {
                format!("the earliest date after {} that is a {property}", e(anchor))
            }
            NextSucceeding { property, after } => match after {
                Some(a) => format!("the {property} immediately following {}", e(a)),
                None => format!("the {property} immediately following the current date"),
            },
            ImmediatelyBefore(ev) => format!("the day before event {ev} starts"),
            Immediately(ev) => format!("the day event {ev} ends or the next day"),
            EventBoundary { event, boundary: Boundary::Start } => format!("the start date of event {event}"),
            EventBoundary { event, boundary: Boundary::End } => format!("the end date of event {event}"),
            DueDate(o) => format!("the current due date of obligation {o}"),
            LastPaymentDate { class, reading: PaymentReading::MostRecentDischarged } => {
                format!("the most recent date on which a {class} obligation was discharged")
            }
            LastPaymentDate { class, reading: PaymentReading::LatestDue } => {
                format!("the latest due date among the {class} obligations")
            }
            Context(c) => format!("the date referred to as \"{c}\""),
            Alternatives(alts) => {
                let parts: Vec<String> = alts.iter().map(e).collect();
                format!("one date, to be chosen from: {}", parts.join("; "))
            }
            OnOrAsSoonAsPracticable { anchor, reasonably } => format!(
                "one date, to be chosen from {} and the days within the configured \"{}\" window after it",
                e(anchor),
                if *reasonably { "as soon as reasonably practicable" } else { "as soon as practicable" }
            ),
            Reasonableness { adverb, anchor } => format!(
                "one date, to be chosen from {} and the days within the configured \"{}\" window after it",
                anchor.as_ref().map_or("the current date".to_string(), |a| e(a)),
                adverb.phrase()
            ),
            NoticeWindow { n, event } => {
                format!("the days from the end of event {event} until {} later", plural(*n, "day"))
            }
            Window { lo, hi, .. } if lo > hi => "an empty set of days".into(),
            Window { anchor, lo, hi } => {
                format!("every day from {} to {} after {}", plural(*lo, "day"), plural(*hi, "day"), e(anchor))
            }
            AllDaysBetween { from, to } => format!("every day after {from} and before {to}"),
            EveryNthWeekday { nth, weekday, from, to } => match nth {
                Some(n) => format!(
                    "the {} {} of each month, from {} to {}",
                    n.word(),
                    weekday.long_name(),
                    e(from),
                    e(to)
                ),
                None => format!("every {} from {} to {}", weekday.long_name(), e(from), e(to)),
            },
            AnyDay { property, from, to, except } => {
                let what = property.as_deref().unwrap_or("day");
                let mut s = format!("each {what} from {} to {}", e(from), e(to));
                if !except.is_empty() {
                    let ex: Vec<String> = except.iter().map(e).collect();
                    s.push_str(&format!(", excluding {}", ex.join(" and ")));
                }
                s
            }
            Period { kind, from, to } => format!("{}: every day from {} to {}", kind.phrase(), e(from), e(to)),
            WithEffectFrom { anchor, mode, until } => {
                let kind = match mode {
                    EffectMode::Continuous => "a continuous period",
                    EffectMode::Discrete => "the days",
                };
                match until {
                    Some(u) => format!("{kind} starting on {} and ending before {}", e(anchor), e(u)),
                    None => format!("{kind} starting on {} until the end of the agreement", e(anchor)),
                }
            }
            AtAllTimesUntil(a) => format!("a continuous period from the start of the agreement until {}", e(a)),
            AtAnyTime => "the whole term of the agreement".into(),
            SoLongAs(ev) => format!("a continuous period lasting as long as event {ev} continues"),
            InTheFuture(FutureEnd::AgreementEnd) => {
                "a continuous period after the current date until the end of the agreement".into()
            }
            InTheFuture(FutureEnd::NoEnd) => "a continuous period after the current date without end".into(),
            Survives { until: None } => "a continuous period from the start of the agreement without end".into(),
            Survives { until: Some(u) } => {
                format!("a continuous period from the start of the agreement until {}", e(u))
            }
            FullForceAndEffect(w) => match w {
                Some(w) => format!("{w} maintained throughout the term of the agreement"),
                None => "throughout the term of the agreement".into(),
            },
            DaysBetween { from, to, property } => format!(
                "the number of {} from {} to {}",
                property.as_ref().map_or("days".to_string(), |p| format!("{p} days")),
                e(from),
                e(to)
            ),
            Days(n) => plural(*n, "day"),
            Times { min, max } => match (min, max) {
                (Some(a), Some(b)) => format!("between {a} and {b} occurrences"),
                (Some(a), None) => format!("at least {a} occurrences"),
                (None, Some(b)) => format!("at most {b} occurrences"),
                (None, None) => "any number of occurrences".into(),
            },
            DaysBounded { min, max } => match (min, max) {
                (Some(a), Some(b)) => format!("a number of days from {a} to {b}"),
                (Some(a), None) => format!("a number of days no smaller than {a}"),
                (None, Some(b)) => format!("a number of days no greater than {b}"),
                (None, None) => "any number of days".into(),
            },
            DeferredTo { obligation, date } => format!("obligation {obligation} now due on {}", e(date)),
            Truth(b) => if *b { "always true".into() } else { "never true".into() },
            Not(x) => format!("it is not the case that {}", e(x)),
            And(a, b) => format!("{} and {}", e(a), e(b)),
            Or(a, b) => format!("either {} or {}", e(a), e(b)),
            Atom { name, args } => format!("{name} holds for {}", if args.is_empty() { "the contract".to_string() } else { args.join(", ") }),
            PhaseCondition { subject, phase } => format!("{} {}", e(subject), phase.phrase()),
            OccursPriorTo(a, b) => format!("event {a} ends before event {b} starts"),
            HasTakenAction(a) => format!("action {a} has been completed before the current date"),
            Designated(n) => format!("{n} has been designated during performance"),
            EarlierDesignated(n) => format!("{n} has been designated more than once"),
            Specified { name, negated, source } => format!(
                "{name} is {}set in the text{}",
                if *negated { "not " } else { "" },
                source.as_ref().map_or(String::new(), |s| format!(" ({s})"))
            ),
            HasSatisfied(o) => format!("obligation {o} has been discharged"),
            ThereIs(ev) => format!("event {ev} is occurring on the current date"),
            Compare { subject, op, operand } => format!(
                "{} is {} {}",
                subject.as_ref().map_or("the current date".to_string(), |s| e(s)),
                op.phrase(),
                e(operand)
            ),
            RealizedAt { at, body } => format!("on {}, {}", e(at), e(body)),
            Span { op: SpanOp::Rd, begin, end, body } => {
                format!("on at least one day from {} to {}, {}", e(begin), e(end), e(body))
            }
            Span { op: SpanOp::Rt, begin, end, body } => {
                format!("on every day from {} to {}, {}", e(begin), e(end), e(body))
            }
            Before { at, body } => format!("on some day before {}, {}", e(at), e(body)),
            Quantified { quantifier, var, domain, body } => format!(
                "for {} day {var} in {}, {}",
                match quantifier {
                    Quantifier::ForAll => "every",
                    Quantifier::Exists => "some",
                },
                e(domain),
                e(body)
            ),
        }
    }
}

fn plural(n: u32, unit: &str) -> String {
    if n == 1 {
        format!("1 {unit}")
    } else {
        format!("{n} {unit}s")
    }
}

fn unit(n: u32, property: &Option<String>) -> String {
    let base = property.as_deref().unwrap_or("day");
    if n == 1 {
        base.to_string()
    } else {
        format!("{base}s")
    }
}

fn is_binary(n: &Node) -> bool {
    matches!(n, Node::And(..) | Node::Or(..))
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Node::*;
        match self {
            DateLiteral(d) => d.fmt(f),
            Extreme(p) => p.fmt(f),
            NamedDate(n) | Var(n) => f.write_str(n),
            Today => f.write_str("today"),
            Offset { n, direction, anchor, property } => {
                let dir = match direction {
                    Direction::After => "after",
                    Direction::Before => "before",
                };
                write!(f, "{n} {} {dir} {anchor}", unit(*n, property))
            }
            AtLeastOffset { n, anchor } => write!(f, "at least {n} {} after {anchor}", unit(*n, &None)),
            AtMostOffset { n, anchor } => write!(f, "no more than {n} {} after {anchor}", unit(*n, &None)),
            FirstWithPropertyAfter { property, anchor } => write!(f, "the first {property} after {anchor}"),
            NextSucceeding { property, after } => {
                write!(f, "the next succeeding {property}")?;
                if let Some(a) = after {
                    write!(f, " after {a}")?;
                }
                Ok(())
            }
            ImmediatelyBefore(e) => write!(f, "immediately before {e}"),
            Immediately(e) => write!(f, "immediately after {e}"),
            EventBoundary { event, boundary: Boundary::Start } => write!(f, "the start of {event}"),
            EventBoundary { event, boundary: Boundary::End } => write!(f, "the end of {event}"),
            DueDate(o) => write!(f, "the due date of {o}"),
            LastPaymentDate { class, reading } => write!(
                f,
                "the last {class} date [{}]",
                match reading {
                    PaymentReading::MostRecentDischarged => "most recent",
                    PaymentReading::LatestDue => "latest due",
                }
            ),
            Context(c) => c.fmt(f),
            Alternatives(alts) => {
                f.write_str("(")?;
                for (i, a) in alts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" or ")?;
                    }
                    a.fmt(f)?;
                }
                f.write_str(")")
            }
            OnOrAsSoonAsPracticable { anchor, reasonably } => write!(
                f,
                "on or as soon as {}practicable after {anchor}",
                if *reasonably { "reasonably " } else { "" }
            ),
            Reasonableness { adverb, anchor } => {
                f.write_str(adverb.phrase())?;
                if let Some(a) = anchor {
                    write!(f, " after {a}")?;
                }
                Ok(())
            }
            NoticeWindow { n, event } => write!(f, "no more than {n} {} notice after {event}", unit(*n, &None)),
            Window { anchor, lo: 1, hi } => write!(f, "all days within {hi} {} after {anchor}", unit(*hi, &None)),
            Window { anchor, lo, hi } => write!(f, "all days from {lo} to {hi} {} after {anchor}", unit(*hi, &None)),
            AllDaysBetween { from, to } => write!(f, "all days after {from} and before {to}"),
            EveryNthWeekday { nth, weekday, from, to } => {
                f.write_str("every ")?;
                if let Some(n) = nth {
                    write!(f, "{} ", n.word())?;
                }
                f.write_str(weekday.long_name())?;
                if nth.is_some() {
                    f.write_str(" of every month")?;
                }
                write!(f, " from {from} to {to}")
            }
            AnyDay { property, from, to, except } => {
                write!(f, "on any {} from {from} to {to}", property.as_deref().unwrap_or("day"))?;
                for (i, x) in except.iter().enumerate() {
                    f.write_str(if i == 0 { " other than " } else { ", " })?;
                    x.fmt(f)?;
                }
                Ok(())
            }
            Period { kind, from, to } => write!(f, "{} from {from} to {to}", kind.phrase()),
            WithEffectFrom { anchor, mode, until } => match (mode, until) {
                (EffectMode::Continuous, Some(u)) => write!(f, "with effect from {anchor} at all times until {u}"),
                (EffectMode::Continuous, None) => write!(f, "with effect from {anchor} [continuous]"),
                (EffectMode::Discrete, Some(u)) => write!(f, "with effect from {anchor} [discrete] until {u}"),
                (EffectMode::Discrete, None) => write!(f, "with effect from {anchor} [discrete]"),
            },
            AtAllTimesUntil(a) => write!(f, "at all times until {a}"),
            AtAnyTime => f.write_str("at any time"),
            SoLongAs(e) => write!(f, "for so long as {e}"),
            InTheFuture(FutureEnd::AgreementEnd) => f.write_str("in the future [until agreement end]"),
            InTheFuture(FutureEnd::NoEnd) => f.write_str("in the future [without end]"),
            Survives { until } => {
                f.write_str("will survive")?;
                if let Some(u) = until {
                    write!(f, " until {u}")?;
                }
                Ok(())
            }
            FullForceAndEffect(w) => {
                f.write_str("in full force and effect")?;
                if let Some(w) = w {
                    write!(f, " all {w}")?;
                }
                Ok(())
            }
            DaysBetween { from, to, property } => write!(
                f,
                "the number of {} between {from} and {to}",
                property.as_ref().map_or("days".to_string(), |p| format!("{p}s"))
            ),
            Days(n) => write!(f, "{n} {}", unit(*n, &None)),
            Times { min, max } => match (min, max) {
                (Some(a), Some(b)) => write!(f, "at least {a} times but no more than {b} times"),
                (Some(a), None) => write!(f, "at least {a} times"),
                (None, Some(b)) => write!(f, "no more than {b} times"),
                (None, None) => f.write_str("any number of times"),
            },
            DaysBounded { min, max } => match (min, max) {
                (Some(a), Some(b)) => write!(f, "at least {} but no more than {}", plural(*a, "day"), plural(*b, "day")),
                (Some(a), None) => write!(f, "at least {}", plural(*a, "day")),
                (None, Some(b)) => write!(f, "no more than {}", plural(*b, "day")),
                (None, None) => f.write_str("any number of days"),
            },
            DeferredTo { obligation, date } => write!(f, "{obligation} will be deferred to {date}"),
            Truth(b) => write!(f, "{b}"),
            Not(x) => {
                if is_binary(x) {
                    write!(f, "not ({x})")
                } else {
                    write!(f, "not {x}")
                }
            }
            And(a, b) | Or(a, b) => {
                let word = if matches!(self, And(..)) { "and" } else { "or" };
                let same = |n: &Node| std::mem::discriminant(n) == std::mem::discriminant(self);
                if is_binary(a) && !same(a) {
                    write!(f, "({a})")?;
                } else {
                    a.fmt(f)?;
                }
                write!(f, " {word} ")?;
                if is_binary(b) {
                    write!(f, "({b})")
                } else {
                    b.fmt(f)
                }
            }
            Atom { name, args } => write!(f, "{name}({})", args.join(", ")),
            PhaseCondition { subject, phase } => write!(f, "{subject} {}", phase.phrase()),
            OccursPriorTo(a, b) => write!(f, "{a} occurs prior to {b}"),
            HasTakenAction(a) => write!(f, "has taken action {a}"),
            Designated(n) => write!(f, "{n} has been designated"),
            EarlierDesignated(n) => write!(f, "an earlier {n} has been designated"),
            Specified { name, negated, source } => {
                write!(f, "{name} is {}specified", if *negated { "not " } else { "" })?;
                if let Some(s) = source {
                    write!(f, " in {s}")?;
                }
                Ok(())
            }
            HasSatisfied(o) => write!(f, "has satisfied {o}"),
            ThereIs(e) => write!(f, "there is [temporal] {e}"),
            Compare { subject, op, operand } => match subject {
                Some(s) => write!(f, "{s} is {} {operand}", op.phrase()),
                None => write!(f, "{} {operand}", op.phrase()),
            },
            RealizedAt { at, body } => write!(f, "at {at} ({body})"),
            Span { op, begin, end, body } => write!(
                f,
                "{}[{begin}, {end}] ({body})",
                match op {
                    SpanOp::Rd => "RD",
                    SpanOp::Rt => "RT",
                }
            ),
            Before { at, body } => write!(f, "RB[{at}] ({body})"),
            Quantified { quantifier, var, domain, body } => write!(
                f,
                "{} {var} in {domain} ({body})",
                match quantifier {
                    Quantifier::ForAll => "forall",
                    Quantifier::Exists => "exists",
                }
            ),
        }
    }
}
