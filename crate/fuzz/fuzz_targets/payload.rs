#![no_main]

use blockmark::OffchainPayload;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(p) = OffchainPayload::decode(data) {
        assert_eq!(p.encode(), data);
    }
});
