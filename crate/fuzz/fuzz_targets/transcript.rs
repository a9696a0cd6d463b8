#![no_main]

use blockmark::sim::Transcript;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(t) = Transcript::parse_jsonl(text) {
        let _ = t.replay();
    }
});
