#![no_main]

use cte_core::{Day, PropertyCalendar};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cal) = PropertyCalendar::from_json(text) else { return };
    let from = Day::from_ymd(2018, 1, 1).unwrap();
    let to = Day::from_ymd(2018, 12, 31).unwrap();
    for name in cal.properties() {
        let n = cal.count_days_with_property(from, to, name).unwrap_or(0);
        assert!(n <= 365);
        if let Ok(d) = cal.first_with_property_after(from, name, 400) {
            assert!(d > from);
        }
    }
});
