//! Evaluation of formulas against a realization trace.
//!
//! `R_t` distributes over the connectives exactly as the RU axioms state:
//! negation and conjunction are evaluated pointwise at `t`, and bounded
//! quantifiers bind a day variable without moving the evaluation day.

use std::cell::RefCell;

use serde::Serialize;

use crate::bag::{DateBag, Tri};
use crate::error::EvalError;
use crate::ru::formula::{Atom, Formula, SpanExpr, TimeExpr};
use crate::ru::trace::{Span, Trace};
use crate::time::{Day, TimePoint};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalOptions {
    /// Clip spans reaching outside the horizon instead of failing.
    pub clamp_spans: bool,
}

/// One atom lookup made while evaluating.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lookup {
    pub atom: Atom,
    pub day: Day,
    pub realized: bool,
}

pub struct Evaluator<'a> {
    trace: &'a Trace,
    options: EvalOptions,
    log: Option<&'a RefCell<Vec<Lookup>>>,
}

type Scope = Vec<(String, Day)>;

impl<'a> Evaluator<'a> {
    pub fn new(trace: &'a Trace) -> Self {
        Evaluator {
            trace,
            options: EvalOptions::default(),
            log: None,
        }
    }

    pub fn with_options(mut self, options: EvalOptions) -> Self {
        self.options = options;
        self
    }

    /// Records every atom lookup into `log`.
    pub fn with_log(mut self, log: &'a RefCell<Vec<Lookup>>) -> Self {
        self.log = Some(log);
        self
    }

    /// `R_t f` under the given variable bindings.
    pub fn realized_at(&self, f: &Formula, t: Day, env: &[(String, Day)]) -> Result<bool, EvalError> {
        self.trace.check_day(t)?;
        let mut scope: Scope = env.to_vec();
        self.eval(f, t, &mut scope)
    }

    /// `RD_span f`: realized on at least one day of the span.
    pub fn rd(&self, f: &Formula, span: Span) -> Result<bool, EvalError> {
        let mut scope = Scope::new();
        self.rd_in(f, span, &mut scope)
    }

    /// `RT_span f`: realized on every day of the span.
    pub fn rt(&self, f: &Formula, span: Span) -> Result<bool, EvalError> {
        let mut scope = Scope::new();
        self.rt_in(f, span, &mut scope)
    }

    /// `RB_D f = RD_SPAN(⊥, D) f`, with `⊥` the horizon start and `D` excluded.
    pub fn rb(&self, f: &Formula, d: TimePoint) -> Result<bool, EvalError> {
        let mut scope = Scope::new();
        self.rb_in(f, d, &mut scope)
    }

    fn rd_in(&self, f: &Formula, span: Span, scope: &mut Scope) -> Result<bool, EvalError> {
        for t in self.span_days(span)? {
            if self.eval(f, t, scope)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn rt_in(&self, f: &Formula, span: Span, scope: &mut Scope) -> Result<bool, EvalError> {
        for t in self.span_days(span)? {
            if !self.eval(f, t, scope)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn rb_in(&self, f: &Formula, d: TimePoint, scope: &mut Scope) -> Result<bool, EvalError> {
        let end = match d {
            TimePoint::Finite(day) => {
                if day <= self.trace.horizon_begin() {
                    return Ok(false);
                }
                TimePoint::Finite(day.pred()?)
            }
            extreme => extreme,
        };
        self.rd_in(f, Span::new(TimePoint::NegInfinity, end), scope)
    }

    /// The days a span denotes on this trace.
    ///
    /// Extremes clamp to the horizon. Finite ends outside the horizon are an
    /// error unless clamping is enabled; empty spans never fail.
    pub fn span_days(&self, span: Span) -> Result<crate::time::DayRange, EvalError> {
        let (hb, he) = (self.trace.horizon_begin(), self.trace.horizon_end());
        let begin = match span.begin() {
            TimePoint::NegInfinity => hb,
            TimePoint::PosInfinity => he.succ()?,
            TimePoint::Finite(d) => d,
        };
        let end = match span.end() {
            TimePoint::NegInfinity => hb.pred()?,
            TimePoint::PosInfinity => he,
            TimePoint::Finite(d) => d,
        };
        if end < begin {
            return Ok(Day::range_inclusive(begin, end));
        }
        if self.options.clamp_spans {
            return Ok(Day::range_inclusive(begin.max(hb), end.min(he)));
        }
        if begin < hb {
            return Err(self.trace.out_of_horizon(begin));
        }
        if end > he {
            return Err(self.trace.out_of_horizon(end));
        }
        Ok(Day::range_inclusive(begin, end))
    }

    fn eval(&self, f: &Formula, t: Day, scope: &mut Scope) -> Result<bool, EvalError> {
        match f {
            Formula::Truth(b) => Ok(*b),
            Formula::Atom(a) => {
                let realized = self.trace.realized(a, t);
                if let Some(log) = self.log {
                    log.borrow_mut().push(Lookup {
                        atom: a.clone(),
                        day: t,
                        realized,
                    });
                }
                Ok(realized)
            }
            Formula::Not(g) => Ok(!self.eval(g, t, scope)?),
            Formula::And(a, b) => Ok(self.eval(a, t, scope)? && self.eval(b, t, scope)?),
            Formula::Or(a, b) => Ok(self.eval(a, t, scope)? || self.eval(b, t, scope)?),
            Formula::ForAllDays { var, domain, body } => {
                for d in domain.iter() {
                    scope.push((var.clone(), d));
                    let r = self.eval(body, t, scope);
                    scope.pop();
                    if !r? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::ExistsDay { var, domain, body } => {
                for d in domain.iter() {
                    scope.push((var.clone(), d));
                    let r = self.eval(body, t, scope);
                    scope.pop();
                    if r? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::RealizedAt(te, g) => {
                let at = self.time(te, t, scope)?.finite()?;
                self.trace.check_day(at)?;
                self.eval(g, at, scope)
            }
            Formula::Rd(s, g) => {
                let span = self.span(s, t, scope)?;
                self.rd_in(g, span, scope)
            }
            Formula::Rt(s, g) => {
                let span = self.span(s, t, scope)?;
                self.rt_in(g, span, scope)
            }
            Formula::Rb(te, g) => {
                let d = self.time(te, t, scope)?;
                self.rb_in(g, d, scope)
            }
            Formula::Precedes(a, b) => Ok(self.time(a, t, scope)? < self.time(b, t, scope)?),
        }
    }

    fn span(&self, s: &SpanExpr, t: Day, scope: &Scope) -> Result<Span, EvalError> {
        Ok(Span::new(self.time(&s.begin, t, scope)?, self.time(&s.end, t, scope)?))
    }

    fn time(&self, te: &TimeExpr, t: Day, scope: &Scope) -> Result<TimePoint, EvalError> {
        match te {
            TimeExpr::Point(p) => Ok(*p),
            TimeExpr::Now => Ok(TimePoint::Finite(t)),
            TimeExpr::Var(v) => scope
                .iter()
                .rev()
                .find(|(name, _)| name == v)
                .map(|(_, d)| TimePoint::Finite(*d))
                .ok_or_else(|| EvalError::UnboundVariable(v.clone())),
            TimeExpr::Offset(inner, n) => Ok(self.time(inner, t, scope)?.add_days(*n)?),
            TimeExpr::Bag(b) => b
                .chosen()
                .map(TimePoint::Finite)
                .ok_or(EvalError::IndeterminateBag),
        }
    }
}

/// Largest number of bag resolutions [`Evaluator::supervaluate`] enumerates.
pub const MAX_RESOLUTIONS: u128 = 1 << 16;

impl Evaluator<'_> {
    /// `R_t f` where `f` may compare against unresolved bags.
    ///
    /// Every combination of alternatives is evaluated. The answer is known
    /// only when all combinations agree; an empty bag is never known.
    pub fn supervaluate(&self, f: &Formula, t: Day, env: &[(String, Day)]) -> Result<Tri, EvalError> {
        let mut bags: Vec<DateBag> = Vec::new();
        for b in f.unresolved_bags() {
            if !bags.contains(b) {
                bags.push(b.clone());
            }
        }
        if bags.is_empty() {
            return Ok(self.realized_at(f, t, env)?.into());
        }
        let options: Vec<Vec<Day>> = bags.iter().map(DateBag::distinct).collect();
        if options.iter().any(Vec::is_empty) {
            return Ok(Tri::Indeterminate);
        }
        let total = options.iter().map(|o| o.len() as u128).product::<u128>();
        if total > MAX_RESOLUTIONS {
            return Err(EvalError::TooManyResolutions(total));
        }
        let mut idx = vec![0usize; options.len()];
        let (mut yes, mut seen) = (0usize, 0usize);
        loop {
            let g = f.map_times(&|te| match te {
                TimeExpr::Bag(b) if !b.is_resolved() => {
                    let k = bags.iter().position(|x| x == b).expect("collected above");
                    TimeExpr::Point(TimePoint::Finite(options[k][idx[k]]))
                }
                other => other.clone(),
            });
            seen += 1;
            if self.realized_at(&g, t, env)? {
                yes += 1;
            }
            if yes != 0 && yes != seen {
                return Ok(Tri::Indeterminate);
            }
            let mut k = 0;
            loop {
                if k == idx.len() {
                    return Ok(Tri::from_counts(yes, seen));
                }
                idx[k] += 1;
                if idx[k] < options[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}

/// `R_t f` on a trace with default options and no free variables bound.
pub fn realized_at(tr: &Trace, f: &Formula, t: Day) -> Result<bool, EvalError> {
    Evaluator::new(tr).realized_at(f, t, &[])
}

pub fn rd(tr: &Trace, f: &Formula, span: Span) -> Result<bool, EvalError> {
    Evaluator::new(tr).rd(f, span)
}

pub fn rt(tr: &Trace, f: &Formula, span: Span) -> Result<bool, EvalError> {
    Evaluator::new(tr).rt(f, span)
}

pub fn rb(tr: &Trace, f: &Formula, d: impl Into<TimePoint>) -> Result<bool, EvalError> {
    Evaluator::new(tr).rb(f, d.into())
}
