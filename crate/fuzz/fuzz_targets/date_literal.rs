#![no_main]

use cte_core::{Day, TimePoint};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(d) = text.parse::<Day>() {
        assert_eq!(d.to_string().parse::<Day>().unwrap(), d);
    }
    if let Ok(p) = text.parse::<TimePoint>() {
        assert_eq!(p.to_string().parse::<TimePoint>().unwrap(), p);
    }
});
