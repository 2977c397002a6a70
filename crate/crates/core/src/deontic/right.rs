use serde::{Deserialize, Serialize};

use crate::error::DeonticError;
use crate::interval::ContinuousInterval;
use crate::time::Day;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RightMode {
    /// Active throughout the interval.
    Continuous { interval: ContinuousInterval },
    /// Active from each activation by the named trigger.
    Triggered { trigger: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Activation {
    pub trigger: String,
    pub activated_at: Day,
    pub exercises: Vec<Day>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Right {
    pub id: String,
    #[serde(default)]
    pub holder: String,
    pub mode: RightMode,
    #[serde(default, skip_deserializing)]
    pub activations: Vec<Activation>,
    #[serde(default)]
    pub survives: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RightState {
    pub active: bool,
    pub activations: Vec<Activation>,
    /// Days from each activation to its first exercise, if exercised.
    pub delays: Vec<Option<i64>>,
}

impl Right {
    pub fn new(id: impl Into<String>, holder: impl Into<String>, mode: RightMode) -> Self {
        Right {
            id: id.into(),
            holder: holder.into(),
            mode,
            activations: Vec::new(),
            survives: false,
        }
    }

    pub(crate) fn activate(&self, trigger: &str, at: Day) -> Result<Right, DeonticError> {
        if let Some(last) = self.activations.last() {
            if at < last.activated_at {
                return Err(DeonticError::Backdated {
                    action: "activation",
                    at,
                    what: "the previous activation",
                    earlier: last.activated_at,
                });
            }
        }
        let mut next = self.clone();
        next.activations.push(Activation {
            trigger: trigger.to_string(),
            activated_at: at,
            exercises: Vec::new(),
        });
        Ok(next)
    }

    pub(crate) fn exercise(&self, index: usize, at: Day) -> Result<Right, DeonticError> {
        let not_activated = || DeonticError::NotActivated {
            right: self.id.clone(),
            index,
            at,
        };
        let act = self.activations.get(index).ok_or_else(not_activated)?;
        if act.activated_at > at {
            return Err(not_activated());
        }
        if let Some(last) = act.exercises.last() {
            if at < *last {
                return Err(DeonticError::Backdated {
                    action: "exercise",
                    at,
                    what: "the previous exercise",
                    earlier: *last,
                });
            }
        }
        let mut next = self.clone();
        next.activations[index].exercises.push(at);
        Ok(next)
    }

    pub fn is_active(&self, at: Day) -> bool {
        let by_mode = match &self.mode {
            RightMode::Continuous { interval } => interval.contains(at),
            RightMode::Triggered { .. } => false,
        };
        by_mode || self.activations.iter().any(|a| a.activated_at <= at)
    }

    /// Activations and exercises recorded on or before `at`.
    pub fn state(&self, at: Day) -> RightState {
        let activations: Vec<Activation> = self
            .activations
            .iter()
            .filter(|a| a.activated_at <= at)
            .map(|a| Activation {
                trigger: a.trigger.clone(),
                activated_at: a.activated_at,
                exercises: a.exercises.iter().copied().filter(|e| *e <= at).collect(),
            })
            .collect();
        let delays = activations
            .iter()
            .map(|a| a.exercises.first().map(|e| e.diff_days(a.activated_at)))
            .collect();
        RightState {
            active: self.is_active(at),
            activations,
            delays,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn june(d: u32) -> Day {
        Day::from_ymd(2018, 6, d).unwrap()
    }

    fn triggered() -> Right {
        Right::new(
            "Terminate",
            "A",
            RightMode::Triggered {
                trigger: "EventOfDefault".into(),
            },
        )
    }

    #[test]
    fn delay_is_days_to_first_exercise() {
        let r = triggered()
            .activate("EventOfDefault", june(1))
            .unwrap()
            .exercise(0, june(6))
            .unwrap();
        assert_eq!(r.state(june(10)).delays, vec![Some(5)]);
        assert_eq!(r.state(june(3)).delays, vec![None]);
    }

    #[test]
    fn each_trigger_gets_its_own_record() {
        let r = triggered()
            .activate("EventOfDefault", june(1))
            .unwrap()
            .activate("EventOfDefault", june(8))
            .unwrap()
            .exercise(1, june(9))
            .unwrap()
            .exercise(0, june(10))
            .unwrap();
        let s = r.state(june(12));
        assert_eq!(s.activations.len(), 2);
        assert_eq!(s.activations[0].exercises, vec![june(10)]);
        assert_eq!(s.activations[1].exercises, vec![june(9)]);
        assert_eq!(s.delays, vec![Some(9), Some(1)]);
    }

    #[test]
    fn exercise_requires_prior_activation() {
        assert!(matches!(
            triggered().exercise(0, june(1)),
            Err(DeonticError::NotActivated { .. })
        ));
        let r = triggered().activate("EventOfDefault", june(5)).unwrap();
        assert!(matches!(r.exercise(0, june(4)), Err(DeonticError::NotActivated { .. })));
        assert!(!r.is_active(june(4)));
        assert!(r.is_active(june(5)));
    }

    #[test]
    fn continuous_rights_follow_their_interval() {
        let r = Right::new(
            "Inspect",
            "B",
            RightMode::Continuous {
                interval: ContinuousInterval::new(june(1), june(10)),
            },
        );
        assert!(!r.is_active(june(1)));
        assert!(r.is_active(june(2)));
        assert!(r.is_active(june(9)));
        assert!(!r.is_active(june(10)));
    }
}
