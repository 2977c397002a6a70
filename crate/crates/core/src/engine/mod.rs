//! Scenario replay, violation checking and queries.

pub mod query;
pub mod replay;
pub mod report;
pub mod scenario;

use std::path::{Path, PathBuf};

pub use query::{query, QueryOutcome};
pub use replay::replay;
pub use report::{QueryRecord, Report, Violation, ViolationKind};
pub use scenario::{Action, DateSource, Horizon, Scenario, Step};

/// Environment variable naming a directory searched for calendar files.
pub const CALENDAR_DIR_VAR: &str = "CTE_CALENDAR_DIR";

/// Finds a calendar file referenced by a scenario.
///
/// Absolute paths are used as given. Relative paths are tried next to the
/// scenario, then in `search_dir`.
pub fn resolve_calendar(reference: &str, scenario_dir: Option<&Path>, search_dir: Option<&Path>) -> Option<PathBuf> {
    let p = Path::new(reference);
    if p.is_absolute() {
        return p.exists().then(|| p.to_path_buf());
    }
    scenario_dir
        .into_iter()
        .chain(search_dir)
        .map(|d| d.join(p))
        .find(|c| c.exists())
}
