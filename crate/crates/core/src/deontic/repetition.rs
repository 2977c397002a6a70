use serde::Serialize;

use crate::dateset::DateSet;
use crate::error::{DeonticError, EvalError};
use crate::interval::ContinuousInterval;
use crate::ru::{Atom, Trace};
use crate::time::TimePoint;

/// "at least X times but no more than Y times" within a window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepetitionConstraint {
    pub id: String,
    pub action: Atom,
    pub min: Option<u64>,
    pub max: Option<u64>,
    pub window: DateSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RepetitionCheck {
    pub count: u64,
    pub satisfied: bool,
    pub below_min: bool,
    pub above_max: bool,
}

impl RepetitionConstraint {
    pub fn new(
        id: impl Into<String>,
        action: Atom,
        min: Option<u64>,
        max: Option<u64>,
        window: DateSet,
    ) -> Result<Self, DeonticError> {
        if let (Some(min), Some(max)) = (min, max) {
            if min > max {
                return Err(DeonticError::InvalidRepetition { min, max });
            }
        }
        Ok(RepetitionConstraint {
            id: id.into(),
            action,
            min,
            max,
            window,
        })
    }

    pub fn judge(&self, count: u64) -> RepetitionCheck {
        let below_min = self.min.is_some_and(|m| count < m);
        let above_max = self.max.is_some_and(|m| count > m);
        RepetitionCheck {
            count,
            satisfied: !below_min && !above_max,
            below_min,
            above_max,
        }
    }
}

/// Counts window days on which the action is realized; each day counts once.
pub fn check_repetition(tr: &Trace, c: &RepetitionConstraint) -> Result<RepetitionCheck, EvalError> {
    if !c.window.is_empty() {
        tr.check_day(c.window.start())?;
        tr.check_day(c.window.end())?;
    }
    let count = c.window.iter().filter(|d| tr.realized(&c.action, *d)).count() as u64;
    Ok(c.judge(count))
}

/// The period during which a surviving obligation or right still applies.
///
/// A surviving item runs from the start of the term to `post_bound`, or
/// without end; otherwise it is confined to the term.
pub fn survival_scope(
    survives: bool,
    term: &ContinuousInterval,
    post_bound: Option<TimePoint>,
) -> ContinuousInterval {
    if survives {
        ContinuousInterval::new(term.start(), post_bound.unwrap_or(TimePoint::PosInfinity))
    } else {
        *term
    }
}
