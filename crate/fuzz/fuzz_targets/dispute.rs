#![no_main]

use blockmark::contract::DisputeSubmission;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = DisputeSubmission::decode(data) {
        assert_eq!(s.encode(), data);
        assert_eq!(s.content_bits() + s.framing_bytes() as u64 * 8, data.len() as u64 * 8);
    }
});
