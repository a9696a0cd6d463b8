//! Writes seed inputs for the fuzz targets into `fuzz/corpus/<target>/`
//! (or the directory given as the first argument).

use std::fs;
use std::path::{Path, PathBuf};

use blockmark::chunk::{make_payload, split, OffchainPayload, Variant};
use blockmark::contract::DisputeSubmission;
use blockmark::crypto::{Scheme, SymmetricKey};
use blockmark::merkle::MerkleTree;
use blockmark::sim::{run, DataSource, Scenario, SchemeParams, SellerBehavior};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn put(root: &Path, target: &str, name: &str, bytes: &[u8]) {
    let dir = root.join(target);
    fs::create_dir_all(&dir).expect("create corpus dir");
    fs::write(dir.join(name), bytes).expect("write seed");
}

fn small(variant: Variant) -> Scenario {
    let mut s = Scenario::example(variant);
    s.data = DataSource::Random { size_bits: 256 };
    s.chunk_bits = 64;
    s.scheme = SchemeParams {
        hash_bits: 64,
        alpha: "1".parse().unwrap(),
        sig_bytes: 16,
    };
    s
}

fn main() {
    let root: PathBuf = std::env::args().nth(1).map(Into::into).unwrap_or_else(|| "fuzz/corpus".into());
    let mut rng = ChaCha20Rng::seed_from_u64(1);

    for (scheme, tag) in [(Scheme::default(), "sha256"), (Scheme::test(), "test")] {
        let key = SymmetricKey::generate(&mut rng);
        let kp = scheme.generate_keypair(&mut rng);
        let data: Vec<u8> = (0u8..40).collect();
        let chunked = split(&data, 64).unwrap();
        for m in [1usize, 3, 5] {
            let leaves = (0..m).map(|i| vec![i as u8; 8]).collect();
            let proof = MerkleTree::build(&scheme, leaves).unwrap().prove(m - 1).unwrap();
            let mut bytes = vec![scheme.digest_bytes() as u8];
            bytes.extend(proof.encode());
            put(&root, "merkle_proof", &format!("{tag}-m{m}"), &bytes);
        }
        for v in Variant::ALL {
            let payload = make_payload(v, &scheme, &chunked, &key, Some(&kp.secret)).unwrap();
            put(&root, "payload", &format!("{tag}-{v}"), &payload.encode());
        }
        let log = make_payload(Variant::Logarithmic, &scheme, &chunked, &key, None).unwrap();
        let tree = log.data_tree(&scheme).unwrap();
        let signed = make_payload(Variant::Constant, &scheme, &chunked, &key, Some(&kp.secret)).unwrap();
        let OffchainPayload::Constant { elements } = signed else { unreachable!() };
        let subs = [
            DisputeSubmission::Linear {
                ciphertext: scheme.encrypt(&key, 0, &data).bytes,
            },
            DisputeSubmission::Logarithmic {
                chunk: log.hashed_chunk(2).unwrap().clone(),
                proof: tree.prove(2).unwrap(),
            },
            DisputeSubmission::Constant {
                index: 2,
                chunk: elements[2].chunk.clone(),
                signature: elements[2].signature.clone(),
            },
        ];
        for s in subs {
            put(&root, "dispute", &format!("{tag}-{}", s.variant()), &s.encode());
        }
    }

    for v in Variant::ALL {
        let s = small(v);
        put(&root, "scenario", &format!("{v}-honest.json"), serde_json::to_string_pretty(&s).unwrap().as_bytes());
        let mut bad = s.clone();
        bad.seller = SellerBehavior::CorruptChunk(1);
        put(&root, "scenario", &format!("{v}-corrupt.json"), serde_json::to_string(&bad).unwrap().as_bytes());
        for (name, s) in [("honest", s), ("corrupt", bad)] {
            let t = run(&s).unwrap().transcript.unwrap();
            put(&root, "transcript", &format!("{v}-{name}.jsonl"), t.to_jsonl().as_bytes());
        }
    }
}
