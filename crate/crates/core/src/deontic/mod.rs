//! Lifecycles of events, obligations and rights.

pub mod event;
pub mod obligation;
pub mod repetition;
pub mod right;
pub mod state;

pub use event::{
    event_orderings, immediately_after, immediately_before, occurs_prior_to, Event,
    EventOrderings, EventPhase, PhaseReport, ScheduledStart,
};
pub use obligation::{Due, DueRevision, Obligation, ObligationSpec, ObligationStatus, RevisionKind};
pub use repetition::{check_repetition, survival_scope, RepetitionCheck, RepetitionConstraint};
pub use right::{Activation, Right, RightMode, RightState};
pub use state::{ContractState, PaymentReading, Promotion, INCURRED_PROPERTY};
