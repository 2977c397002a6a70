use std::cell::RefCell;

use serde::Serialize;

use crate::bag::Tri;
use crate::calendar::PropertyCalendar;
use crate::deontic::ContractState;
use crate::dsl::{compile_formula, parse, CompileEnv, ReasonablenessConfig};
use crate::engine::scenario::Horizon;
use crate::error::QueryError;
use crate::ru::{Evaluator, Lookup};
use crate::time::Day;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryOutcome {
    /// The condition as normalized by the parser.
    pub formula: String,
    pub result: Tri,
    /// Atom lookups that decided the result, by day.
    pub transcript: Vec<Lookup>,
}

/// Evaluates a condition phrase at day `at` against the facts known in `state`.
///
/// Unresolved bags are evaluated under every resolution; disagreement gives
/// `Tri::Indeterminate`.
pub fn query(
    state: &ContractState,
    horizon: Horizon,
    at: Day,
    text: &str,
    cal: &PropertyCalendar,
    cfg: &ReasonablenessConfig,
) -> Result<QueryOutcome, QueryError> {
    let trace = state.materialize(horizon.begin, horizon.end)?;
    trace.check_day(at)?;
    let node = parse(text)?;
    let registry = state.registry().as_of(at);
    let env = CompileEnv::new(&registry, cal, cfg, *state.term()).today(at).state(state);
    let formula = compile_formula(&node, &env)?;
    let log = RefCell::new(Vec::new());
    let result = Evaluator::new(&trace).with_log(&log).supervaluate(&formula, at, &[])?;
    let mut transcript = log.into_inner();
    transcript.sort_by(|a, b| (a.day, &a.atom).cmp(&(b.day, &b.atom)));
    transcript.dedup();
    Ok(QueryOutcome {
        formula: node.print(),
        result,
        transcript,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bag::DateBag;
    use crate::binding::{BindingRecord, BindingSource, BindingValue};
    use crate::deontic::Event;
    use crate::error::{EvalError, ParseErrorKind};
    use crate::interval::ContinuousInterval;

    fn day(s: &str) -> Day {
        s.parse().unwrap()
    }

    fn setup() -> (ContractState, Horizon) {
        let h = Horizon {
            begin: day("2018-01-01"),
            end: day("2018-01-31"),
        };
        let st = ContractState::new(h.begin, ContinuousInterval::new(day("2017-12-31"), day("2018-02-01")))
            .declare_event(Event::new("EventOfDefault"))
            .unwrap()
            .start_event("EventOfDefault", day("2018-01-05"))
            .unwrap()
            .advance_to(day("2018-01-10"))
            .unwrap();
        (st, h)
    }

    #[test]
    fn occurred_and_continuing_with_transcript() {
        let (st, h) = setup();
        let cal = PropertyCalendar::new();
        let cfg = ReasonablenessConfig::default();
        let text = "has_occurred(EventOfDefault) and is_continuing(EventOfDefault)";
        let q = query(&st, h, day("2018-01-10"), text, &cal, &cfg).unwrap();
        assert_eq!(q.result, Tri::True);
        assert_eq!(q.transcript.len(), 2);
        assert!(q.transcript.iter().all(|l| l.realized && l.day == day("2018-01-10")));
        let q = query(&st, h, day("2018-01-03"), text, &cal, &cfg).unwrap();
        assert_eq!(q.result, Tri::False);
    }

    #[test]
    fn errors_carry_positions_and_horizon() {
        let (st, h) = setup();
        let cal = PropertyCalendar::new();
        let cfg = ReasonablenessConfig::default();
        let e = query(&st, h, day("2018-03-01"), "has_occurred(E)", &cal, &cfg).unwrap_err();
        assert!(matches!(e, QueryError::Eval(EvalError::OutOfHorizon { .. })));
        match query(&st, h, day("2018-01-10"), "has_occurred(E) and and", &cal, &cfg).unwrap_err() {
            QueryError::Parse(p) => assert_eq!(p.kind, ParseErrorKind::Syntax),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unresolved_bag_is_indeterminate() {
        let (st, h) = setup();
        let bag = DateBag::new([day("2018-01-09"), day("2018-01-10"), day("2018-01-11")]);
        let st = st
            .bind(
                "Payment",
                BindingRecord {
                    value: BindingValue::Bag(bag),
                    bound_at: day("2018-01-02"),
                    bound_by: "test".into(),
                    reason: String::new(),
                    source: BindingSource::Text,
                    properties: Default::default(),
                },
            )
            .unwrap();
        let cal = PropertyCalendar::new();
        let cfg = ReasonablenessConfig::default();
        let q = query(&st, h, day("2018-01-10"), "today is prior to Payment", &cal, &cfg).unwrap();
        assert_eq!(q.result, Tri::Indeterminate);
        let q = query(&st, h, day("2018-01-05"), "today is prior to Payment", &cal, &cfg).unwrap();
        assert_eq!(q.result, Tri::True);
    }
}
