use serde::Serialize;
use thiserror::Error;

use crate::time::Day;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimeError {
    #[error("invalid date {year:04}-{month:02}-{day:02}")]
    InvalidDate { year: i32, month: u32, day: u32 },
    #[error("malformed date literal {0:?}, expected YYYY-MM-DD")]
    BadDateLiteral(String),
    #[error("ordinal {ordinal} is outside the supported calendar range")]
    OutOfRange { ordinal: i64 },
    #[error("day arithmetic on extreme time point {0}")]
    ExtremeArithmetic(String),
    #[error("unknown day property {0:?}")]
    UnknownProperty(String),
    #[error("no day with property {property:?} within {horizon} days after {after}")]
    NoSuchDayWithinHorizon {
        property: String,
        after: Day,
        horizon: u32,
    },
    #[error("binding for {name:?} at {bound_at} precedes the previous binding at {previous}")]
    NonMonotonicBinding {
        name: String,
        bound_at: Day,
        previous: Day,
    },
    #[error("invalid calendar: {0}")]
    InvalidCalendar(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("generator is unbounded: {0}")]
    UnboundedGenerator(String),
    #[error("no member after {0}")]
    NoSucceedingDate(Day),
    #[error("{0} is not one of the bag's alternatives")]
    NotAnAlternative(Day),
    #[error("bag already resolved to {0}")]
    AlreadyResolved(Day),
    #[error(transparent)]
    Time(#[from] TimeError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("day {day} is outside the trace horizon {begin}..{end}")]
    OutOfHorizon { day: String, begin: Day, end: Day },
    #[error("unbound time variable {0:?}")]
    UnboundVariable(String),
    #[error("comparison against an unresolved bag of alternatives")]
    IndeterminateBag,
    #[error("trace horizon must be a finite non-empty span")]
    BadHorizon,
    #[error("{0} combinations of bag alternatives exceed the enumeration limit")]
    TooManyResolutions(u128),
    #[error(transparent)]
    Time(#[from] TimeError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeonticError {
    #[error("unknown event {0:?}")]
    UnknownEvent(String),
    #[error("unknown obligation {0:?}")]
    UnknownObligation(String),
    #[error("unknown right {0:?}")]
    UnknownRight(String),
    #[error("{kind} {id:?} is already declared")]
    DuplicateId { kind: &'static str, id: String },
    #[error("query at {at} is after the current day {as_of}")]
    FutureQuery { at: Day, as_of: Day },
    #[error("event {0:?} has already started")]
    AlreadyStarted(String),
    #[error("event {0:?} has already ended")]
    AlreadyEnded(String),
    #[error("event {0:?} has not started")]
    NotStarted(String),
    #[error("event {id:?} cannot end at {end}, before its start at {start}")]
    EndBeforeStart { id: String, start: Day, end: Day },
    #[error("obligation {0:?} is already discharged")]
    AlreadyDischarged(String),
    #[error("obligation {id:?}: due date {due} precedes incurrence at {incurred}")]
    DueBeforeIncurred { id: String, due: Day, incurred: Day },
    #[error("obligation {id:?}: {detail}")]
    InvalidRevision { id: String, detail: String },
    #[error("obligation {0:?} has an empty set of due dates")]
    EmptyDue(String),
    #[error("{action} at {at} precedes {what} at {earlier}")]
    Backdated {
        action: &'static str,
        at: Day,
        what: &'static str,
        earlier: Day,
    },
    #[error("right {right:?} has no activation {index} on or before {at}")]
    NotActivated { right: String, index: usize, at: Day },
    #[error("no obligation of class {0:?} qualifies")]
    NoQualifyingObligation(String),
    #[error("event {id:?} has no {which} date")]
    MissingDate { id: String, which: &'static str },
    #[error("event {id:?} does not carry property {property:?}")]
    MissingProperty { id: String, property: String },
    #[error("invalid repetition bounds: minimum {min} exceeds maximum {max}")]
    InvalidRepetition { min: u64, max: u64 },
    #[error(transparent)]
    Time(#[from] TimeError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseErrorKind {
    Syntax,
    /// A bag of alternatives used where a single date or a single
    /// bag comparison is required.
    NestedAlternative,
    /// The phrase needs a human decision, e.g. a counterfactual.
    HumanInputRequired,
    /// The phrase is recognized but has no supported reading.
    Unsupported,
    /// Refers to the document's own structure, not to time.
    DraftingAnnotation,
    /// The phrase is ambiguous without an explicit `[...]` annotation.
    MissingAnnotation,
}

impl ParseErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ParseErrorKind::Syntax => "syntax",
            ParseErrorKind::NestedAlternative => "nested_alternative",
            ParseErrorKind::HumanInputRequired => "human_input_required",
            ParseErrorKind::Unsupported => "unsupported",
            ParseErrorKind::DraftingAnnotation => "drafting_annotation",
            ParseErrorKind::MissingAnnotation => "missing_annotation",
        }
    }
}

impl std::fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at byte {offset}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
    pub expected: Vec<String>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("unknown name {0:?}")]
    UnknownName(String),
    #[error("{0} produced no value")]
    EmptyResult(String),
    #[error("{0}")]
    Kind(String),
    #[error("phrase refers to the current date but none was given")]
    NoCurrentDate,
    #[error("phrase refers to contract state but none was given")]
    NoState,
    #[error(transparent)]
    Time(#[from] TimeError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Deontic(#[from] DeonticError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("parse error {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("malformed scenario: {0}")]
    Malformed(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("step {index} on {day}: {message}")]
    Step { index: usize, day: Day, message: String },
}
