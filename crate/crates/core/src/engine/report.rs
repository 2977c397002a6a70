use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::bag::Tri;
use crate::binding::{BindingSource, BindingValue};
use crate::deontic::{Due, EventPhase, ObligationStatus};
use crate::engine::scenario::Horizon;
use crate::ru::Lookup;
use crate::time::Day;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Overdue,
    SanctionLate,
    ProhibitionBreach,
    RepetitionBreach,
    QueryMismatch,
    HumanInputRequired,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::Overdue => "overdue",
            ViolationKind::SanctionLate => "sanction_late",
            ViolationKind::ProhibitionBreach => "prohibition_breach",
            ViolationKind::RepetitionBreach => "repetition_breach",
            ViolationKind::QueryMismatch => "query_mismatch",
            ViolationKind::HumanInputRequired => "human_input_required",
        }
    }
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub day: Day,
    pub kind: ViolationKind,
    pub subject: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryRecord {
    pub step: usize,
    pub day: Day,
    pub at: Day,
    pub formula: String,
    pub result: Tri,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<bool>,
    pub transcript: Vec<Lookup>,
}

impl QueryRecord {
    pub fn matches(&self) -> bool {
        self.expected.is_none_or(|e| self.result.known() == Some(e))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EventSummary {
    pub id: String,
    pub phase: EventPhase,
    pub start: Option<Day>,
    pub end: Option<Day>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObligationSummary {
    pub id: String,
    pub status: ObligationStatus,
    pub due: Due,
    pub effective_due: Day,
    pub discharged_at: Option<Day>,
    pub revisions: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RightSummary {
    pub id: String,
    pub active: bool,
    pub activations: usize,
    pub exercises: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BindingSummary {
    pub name: String,
    pub value: BindingValue,
    pub source: BindingSource,
    pub records: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FinalState {
    pub as_of: Day,
    pub events: Vec<EventSummary>,
    pub obligations: Vec<ObligationSummary>,
    pub rights: Vec<RightSummary>,
    pub bindings: Vec<BindingSummary>,
}

/// Outcome of replaying a scenario. Identical inputs give identical reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub scenario: String,
    pub horizon: Horizon,
    pub violations: Vec<Violation>,
    pub queries: Vec<QueryRecord>,
    pub final_state: FinalState,
}

impl Report {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let h = self.horizon;
        let _ = writeln!(out, "scenario {} ({}..{})", self.scenario, h.begin, h.end);
        if self.violations.is_empty() {
            out.push_str("no violations\n");
        } else {
            let _ = writeln!(out, "{} violation(s):", self.violations.len());
            for v in &self.violations {
                let _ = writeln!(out, "  {} {} {}: {}", v.day, v.kind, v.subject, v.detail);
            }
        }
        if !self.queries.is_empty() {
            out.push_str("queries:\n");
            for q in &self.queries {
                let result = match q.result {
                    Tri::True => "true",
                    Tri::False => "false",
                    Tri::Indeterminate => "indeterminate",
                };
                let expected = q.expected.map(|e| format!(" (expected {e})")).unwrap_or_default();
                let _ = writeln!(out, "  {} at {}: {} => {result}{expected}", q.day, q.at, q.formula);
            }
        }
        let s = &self.final_state;
        let _ = writeln!(out, "final state as of {}:", s.as_of);
        for e in &s.events {
            let show = |d: Option<Day>| d.map_or("-".to_string(), |d| d.to_string());
            let _ = writeln!(out, "  event {} {:?} (start {}, end {})", e.id, e.phase, show(e.start), show(e.end));
        }
        for o in &s.obligations {
            let _ = write!(out, "  obligation {} {} (due {}", o.id, o.status, o.due);
            if let Some(d) = o.discharged_at {
                let _ = write!(out, ", discharged {d}");
            }
            out.push_str(")\n");
        }
        for r in &s.rights {
            let state = if r.active { "active" } else { "inactive" };
            let _ = writeln!(out, "  right {} {state}, {} activation(s), {} exercise(s)", r.id, r.activations, r.exercises);
        }
        for b in &s.bindings {
            let _ = writeln!(out, "  name {} = {}", b.name, b.value);
        }
        out
    }
}
