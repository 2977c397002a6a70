#![no_main]

use cte_core::dsl::parse;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    match parse(text) {
        Ok(node) => {
            let printed = node.print();
            let again = parse(&printed).unwrap_or_else(|e| panic!("normal form {printed:?} does not parse: {e}"));
            assert_eq!(again, node, "normal form {printed:?} changes the tree");
            let _ = node.explain();
        }
        Err(e) => assert!(e.offset <= text.len(), "offset {} past end of input", e.offset),
    }
});
