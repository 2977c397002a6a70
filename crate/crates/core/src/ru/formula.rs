use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bag::DateBag;
use crate::dateset::DateSet;
use crate::time::TimePoint;

/// A ground atomic proposition such as `has_occurred(EventOfDefault)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub name: String,
    #[serde(default)]
    pub args: Vec<String>,
}

impl Atom {
    pub fn new(name: impl Into<String>, args: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Atom {
            name: name.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }

    pub fn nullary(name: impl Into<String>) -> Self {
        Atom {
            name: name.into(),
            args: Vec::new(),
        }
    }

    pub fn unary(name: impl Into<String>, arg: impl Into<String>) -> Self {
        Atom {
            name: name.into(),
            args: vec![arg.into()],
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name, self.args.join(", "))
    }
}

/// A time term: a fixed point, the evaluation day, a bound variable, an
/// offset from another term, or a bag of alternatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TimeExpr {
    Point(TimePoint),
    Now,
    Var(String),
    Offset(Box<TimeExpr>, i64),
    Bag(DateBag),
}

impl TimeExpr {
    pub fn offset(self, n: i64) -> TimeExpr {
        TimeExpr::Offset(Box::new(self), n)
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            TimeExpr::Var(v) => out.push(v),
            TimeExpr::Offset(inner, _) => inner.collect_vars(out),
            _ => {}
        }
    }
}

impl From<TimePoint> for TimeExpr {
    fn from(t: TimePoint) -> Self {
        TimeExpr::Point(t)
    }
}

impl From<crate::time::Day> for TimeExpr {
    fn from(d: crate::time::Day) -> Self {
        TimeExpr::Point(TimePoint::Finite(d))
    }
}

impl fmt::Display for TimeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeExpr::Point(p) => p.fmt(f),
            TimeExpr::Now => f.write_str("today"),
            TimeExpr::Var(v) => f.write_str(v),
            TimeExpr::Offset(inner, n) if *n >= 0 => write!(f, "{inner}+{n}"),
            TimeExpr::Offset(inner, n) => write!(f, "{inner}{n}"),
            TimeExpr::Bag(b) => b.fmt(f),
        }
    }
}

/// `SPAN(begin, end)` over time terms, both ends inclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanExpr {
    pub begin: TimeExpr,
    pub end: TimeExpr,
}

impl SpanExpr {
    pub fn new(begin: impl Into<TimeExpr>, end: impl Into<TimeExpr>) -> Self {
        SpanExpr {
            begin: begin.into(),
            end: end.into(),
        }
    }
}

/// Formulas of the RU calculus with Lee's interval operators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Truth(bool),
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    ForAllDays {
        var: String,
        domain: DateSet,
        body: Box<Formula>,
    },
    ExistsDay {
        var: String,
        domain: DateSet,
        body: Box<Formula>,
    },
    /// `R_t Φ` for an explicit time term `t`.
    RealizedAt(TimeExpr, Box<Formula>),
    /// Realized at least once during the span.
    Rd(SpanExpr, Box<Formula>),
    /// Realized throughout the span.
    Rt(SpanExpr, Box<Formula>),
    /// Realized strictly before the given day.
    Rb(TimeExpr, Box<Formula>),
    /// The relation `U`: the first term precedes the second.
    Precedes(TimeExpr, TimeExpr),
}

impl Formula {
    pub fn atom(a: Atom) -> Formula {
        Formula::Atom(a)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn rd(span: SpanExpr, f: Formula) -> Formula {
        Formula::Rd(span, Box::new(f))
    }

    pub fn rt(span: SpanExpr, f: Formula) -> Formula {
        Formula::Rt(span, Box::new(f))
    }

    pub fn rb(day: impl Into<TimeExpr>, f: Formula) -> Formula {
        Formula::Rb(day.into(), Box::new(f))
    }

    pub fn realized_at(t: impl Into<TimeExpr>, f: Formula) -> Formula {
        Formula::RealizedAt(t.into(), Box::new(f))
    }

    pub fn precedes(a: impl Into<TimeExpr>, b: impl Into<TimeExpr>) -> Formula {
        Formula::Precedes(a.into(), b.into())
    }

    /// `a` and `b` denote the same day: neither precedes the other.
    pub fn same_day(a: TimeExpr, b: TimeExpr) -> Formula {
        Formula::and(
            Formula::not(Formula::Precedes(a.clone(), b.clone())),
            Formula::not(Formula::Precedes(b, a)),
        )
    }

    /// Time variables used but not bound by an enclosing quantifier.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.free_vars_in(&mut Vec::new(), &mut out);
        out.sort();
        out.dedup();
        out
    }

    fn free_vars_in(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        let check = |t: &TimeExpr, bound: &Vec<String>, out: &mut Vec<String>| {
            let mut vs = Vec::new();
            t.collect_vars(&mut vs);
            for v in vs {
                if !bound.iter().any(|b| b == v) {
                    out.push(v.to_string());
                }
            }
        };
        match self {
            Formula::Truth(_) | Formula::Atom(_) => {}
            Formula::Not(f) => f.free_vars_in(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.free_vars_in(bound, out);
                b.free_vars_in(bound, out);
            }
            Formula::ForAllDays { var, body, .. } | Formula::ExistsDay { var, body, .. } => {
                bound.push(var.clone());
                body.free_vars_in(bound, out);
                bound.pop();
            }
            Formula::RealizedAt(t, f) | Formula::Rb(t, f) => {
                check(t, bound, out);
                f.free_vars_in(bound, out);
            }
            Formula::Rd(s, f) | Formula::Rt(s, f) => {
                check(&s.begin, bound, out);
                check(&s.end, bound, out);
                f.free_vars_in(bound, out);
            }
            Formula::Precedes(a, b) => {
                check(a, bound, out);
                check(b, bound, out);
            }
        }
    }

    /// Every unresolved bag appearing in a time term, in traversal order.
    pub fn unresolved_bags(&self) -> Vec<&DateBag> {
        let mut out = Vec::new();
        self.visit_times(&mut |t| {
            if let TimeExpr::Bag(b) = t {
                if !b.is_resolved() {
                    out.push(b);
                }
            }
        });
        out
    }

    fn visit_times<'a>(&'a self, f: &mut impl FnMut(&'a TimeExpr)) {
        fn walk<'a>(t: &'a TimeExpr, f: &mut impl FnMut(&'a TimeExpr)) {
            f(t);
            if let TimeExpr::Offset(inner, _) = t {
                walk(inner, f);
            }
        }
        match self {
            Formula::Truth(_) | Formula::Atom(_) => {}
            Formula::Not(g) => g.visit_times(f),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.visit_times(f);
                b.visit_times(f);
            }
            Formula::ForAllDays { body, .. } | Formula::ExistsDay { body, .. } => {
                body.visit_times(f)
            }
            Formula::RealizedAt(t, g) | Formula::Rb(t, g) => {
                walk(t, f);
                g.visit_times(f);
            }
            Formula::Rd(s, g) | Formula::Rt(s, g) => {
                walk(&s.begin, f);
                walk(&s.end, f);
                g.visit_times(f);
            }
            Formula::Precedes(a, b) => {
                walk(a, f);
                walk(b, f);
            }
        }
    }

    /// Rewrites time terms bottom-up.
    pub fn map_times(&self, f: &impl Fn(&TimeExpr) -> TimeExpr) -> Formula {
        fn map_t(t: &TimeExpr, f: &impl Fn(&TimeExpr) -> TimeExpr) -> TimeExpr {
            match t {
                TimeExpr::Offset(inner, n) => f(&TimeExpr::Offset(Box::new(map_t(inner, f)), *n)),
                other => f(other),
            }
        }
        let bx = |g: &Formula| Box::new(g.map_times(f));
        match self {
            Formula::Truth(b) => Formula::Truth(*b),
            Formula::Atom(a) => Formula::Atom(a.clone()),
            Formula::Not(g) => Formula::Not(bx(g)),
            Formula::And(a, b) => Formula::And(bx(a), bx(b)),
            Formula::Or(a, b) => Formula::Or(bx(a), bx(b)),
            Formula::ForAllDays { var, domain, body } => Formula::ForAllDays {
                var: var.clone(),
                domain: domain.clone(),
                body: bx(body),
            },
            Formula::ExistsDay { var, domain, body } => Formula::ExistsDay {
                var: var.clone(),
                domain: domain.clone(),
                body: bx(body),
            },
            Formula::RealizedAt(t, g) => Formula::RealizedAt(map_t(t, f), bx(g)),
            Formula::Rb(t, g) => Formula::Rb(map_t(t, f), bx(g)),
            Formula::Rd(s, g) => Formula::Rd(
                SpanExpr {
                    begin: map_t(&s.begin, f),
                    end: map_t(&s.end, f),
                },
                bx(g),
            ),
            Formula::Rt(s, g) => Formula::Rt(
                SpanExpr {
                    begin: map_t(&s.begin, f),
                    end: map_t(&s.end, f),
                },
                bx(g),
            ),
            Formula::Precedes(a, b) => Formula::Precedes(map_t(a, f), map_t(b, f)),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Truth(b) => write!(f, "{b}"),
            Formula::Atom(a) => a.fmt(f),
            Formula::Not(g) => write!(f, "not {g}"),
            Formula::And(a, b) => write!(f, "({a} and {b})"),
            Formula::Or(a, b) => write!(f, "({a} or {b})"),
            Formula::ForAllDays { var, domain, body } => write!(
                f,
                "forall {var} in [{}..{}; {} days] ({body})",
                domain.start(),
                domain.end(),
                domain.len()
            ),
            Formula::ExistsDay { var, domain, body } => write!(
                f,
                "exists {var} in [{}..{}; {} days] ({body})",
                domain.start(),
                domain.end(),
                domain.len()
            ),
            Formula::RealizedAt(t, g) => write!(f, "at {t} ({g})"),
            Formula::Rd(s, g) => write!(f, "RD[{}, {}] ({g})", s.begin, s.end),
            Formula::Rt(s, g) => write!(f, "RT[{}, {}] ({g})", s.begin, s.end),
            Formula::Rb(t, g) => write!(f, "RB[{t}] ({g})"),
            Formula::Precedes(a, b) => write!(f, "{a} precedes {b}"),
        }
    }
}
