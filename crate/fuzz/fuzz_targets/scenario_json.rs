#![no_main]

use cte_core::dsl::ReasonablenessConfig;
use cte_core::engine::{replay, Scenario};
use cte_core::PropertyCalendar;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(sc) = Scenario::from_json(text) else { return };
    // keep runs short
    if sc.horizon.end.diff_days(sc.horizon.begin) > 400 {
        return;
    }
    let cal = PropertyCalendar::new();
    let cfg = ReasonablenessConfig::default();
    if let Ok(a) = replay(&sc, &cal, &cfg) {
        let b = replay(&sc, &cal, &cfg).expect("second replay");
        assert_eq!(a.to_json(), b.to_json());
    }
});
