#![no_main]

use blockmark::sim::{run, Scenario};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(s) = Scenario::from_json(text) else {
        return;
    };
    // Keep runs short; larger data only adds hashing time.
    if s.data_bits().is_ok_and(|b| b <= 1 << 14) {
        let _ = run(&s);
    }
});
