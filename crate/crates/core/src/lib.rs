//! Temporal semantics for standardized OTC-derivatives legal documentation.
//!
//! The crate is organized bottom-up:
//!
//! - [`time`], [`calendar`], [`binding`]: calendar days, day properties and
//!   named-date histories.
//! - [`interval`], [`dateset`], [`bag`]: continuous intervals, ordered date
//!   sets and bags of alternative dates.
//! - [`ru`]: formulas of the Rescher–Urquhart calculus with Lee's interval
//!   operators, evaluated over a per-day realization trace.
//! - [`deontic`]: lifecycles of events, obligations and rights.
//! - [`dsl`]: a controlled-English phrase language compiled to the above.
//! - [`engine`]: scenario replay, violation checking and queries.

pub mod bag;
pub mod binding;
pub mod calendar;
pub mod dateset;
pub mod deontic;
pub mod dsl;
pub mod engine;
pub mod error;
pub mod interval;
pub mod ru;
pub mod time;

pub use bag::{DateBag, Relation, Tri};
pub use binding::{BindingRecord, BindingRegistry, BindingSource, BindingValue, Designation};
pub use calendar::{DayPredicate, PropertyCalendar, Rule, DEFAULT_HORIZON};
pub use dateset::{DateSet, DateSetSpec};
pub use error::{DeonticError, EvalError, SetError, TimeError};
pub use interval::{ContinuousInterval, IntervalAggregate};
pub use time::{Day, TimePoint, Weekday};
