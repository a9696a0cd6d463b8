#![no_main]

use blockmark::merkle::MerkleProof;
use libfuzzer_sys::fuzz_target;

// First byte picks the digest width; the rest is the proof.
fuzz_target!(|data: &[u8]| {
    let Some((&width, bytes)) = data.split_first() else {
        return;
    };
    let width = width as usize % 65;
    if let Ok(p) = MerkleProof::decode(bytes, width) {
        assert_eq!(p.encode(), bytes);
        assert_eq!(p.encoded_len(width), bytes.len());
    }
});
