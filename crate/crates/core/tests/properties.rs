use blockmark::chunk::{make_payload, split, HashedChunk, OffchainPayload, Variant};
use blockmark::contract::DisputeSubmission;
use blockmark::crypto::{Alpha, Digest, Scheme, SymmetricKey};
use blockmark::merkle::{depth_for, verify, MerkleProof, MerkleTree, Side};
use blockmark::sim::chaos;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::Linear), Just(Variant::Logarithmic), Just(Variant::Constant)]
}

fn scheme() -> impl Strategy<Value = Scheme> {
    (prop_oneof![Just(64u32), Just(128), Just(256)], 1u64..4, 1u64..4, prop_oneof![Just(16u32), Just(65)])
        .prop_filter_map("alpha below one", |(h, n, d, s)| {
            let a = Alpha::new(n, d).ok()?;
            Scheme::new(h, a, s).ok()
        })
}

fn key(seed: u64) -> SymmetricKey {
    SymmetricKey::generate(&mut ChaCha20Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_then_join_restores_data(data in prop::collection::vec(any::<u8>(), 1..300), bytes in 1u32..40) {
        let c = split(&data, bytes * 8).unwrap();
        prop_assert_eq!(c.chunk_count(), data.len().div_ceil(bytes as usize));
        prop_assert!(c.chunks().iter().all(|ch| ch.len() == bytes as usize));
        prop_assert_eq!(c.join(), data);
    }

    #[test]
    fn encryption_round_trips(s in scheme(), seed: u64, index: u64, pt in prop::collection::vec(any::<u8>(), 0..200)) {
        let k = key(seed);
        let ct = s.encrypt(&k, index, &pt);
        prop_assert_eq!(ct.bytes.len(), s.ciphertext_len(pt.len()));
        prop_assert_eq!(s.decrypt(&k, index, &ct).unwrap(), pt.clone());
        prop_assert_eq!(s.decrypt_bytes(&k, index, &ct.bytes).unwrap(), pt);
    }

    #[test]
    fn every_leaf_has_a_verifying_proof(leaves in prop::collection::vec(prop::collection::vec(any::<u8>(), 0..20), 1..40)) {
        let s = Scheme::test();
        let t = MerkleTree::build(&s, leaves.clone()).unwrap();
        prop_assert_eq!(t.depth(), depth_for(leaves.len() as u64));
        for (i, leaf) in leaves.iter().enumerate() {
            let p = t.prove(i).unwrap();
            prop_assert_eq!(p.siblings.len() as u32, t.depth());
            prop_assert!(verify(&s, t.root(), leaf, &p));
            let bytes = p.encode();
            prop_assert_eq!(bytes.len(), p.encoded_len(s.digest_bytes()));
            prop_assert_eq!(MerkleProof::decode(&bytes, s.digest_bytes()).unwrap(), p);
        }
    }

    #[test]
    fn payloads_round_trip(v in variant(), s in scheme(), data in prop::collection::vec(any::<u8>(), 1..200), seed: u64) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let kp = s.generate_keypair(&mut rng);
        let c = split(&data, 64).unwrap();
        let p = make_payload(v, &s, &c, &key(seed), Some(&kp.secret)).unwrap();
        prop_assert_eq!(OffchainPayload::decode(&p.encode()).unwrap(), p);
    }

    #[test]
    fn disputes_round_trip(s in scheme(), m in 1usize..20, idx in 0usize..20, seed: u64) {
        let idx = idx % m;
        let data: Vec<u8> = (0..m * 8).map(|i| i as u8).collect();
        let c = split(&data, 64).unwrap();
        let k = key(seed);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let kp = s.generate_keypair(&mut rng);
        let pl = make_payload(Variant::Logarithmic, &s, &c, &k, None).unwrap();
        let tree = pl.data_tree(&s).unwrap();
        let chunk: HashedChunk = pl.hashed_chunk(idx).unwrap().clone();
        let pc = make_payload(Variant::Constant, &s, &c, &k, Some(&kp.secret)).unwrap();
        let OffchainPayload::Constant { elements } = &pc else { unreachable!() };
        let subs = [
            DisputeSubmission::Linear { ciphertext: s.encrypt(&k, 0, &data).bytes },
            DisputeSubmission::Logarithmic { chunk: chunk.clone(), proof: tree.prove(idx).unwrap() },
            DisputeSubmission::Constant { index: idx as u32, chunk: elements[idx].chunk.clone(), signature: elements[idx].signature.clone() },
        ];
        for sub in subs {
            let bytes = sub.encode();
            prop_assert_eq!(bytes.len() as u64 * 8, sub.content_bits() + sub.framing_bytes() as u64 * 8);
            prop_assert_eq!(DisputeSubmission::decode(&bytes).unwrap(), sub);
        }
    }

    #[test]
    fn random_action_sequences_conserve_coins(v in variant(), seed: u64) {
        let r = chaos(v, Scheme::test(), seed, 20, 30).unwrap();
        prop_assert!(r.violations.is_empty(), "{:?}", r.violations);
    }
}

/// Every single-bit change to a leaf, a sibling digest, a side or the index
/// must break verification, for every tree of up to eight 8-byte leaves.
#[test]
fn merkle_proofs_reject_every_single_bit_mutation() {
    let s = Scheme::test();
    for m in 1..=8usize {
        let leaves: Vec<Vec<u8>> = (0..m).map(|i| (i as u64 * 0x0101_0101 + 7).to_be_bytes().to_vec()).collect();
        let t = MerkleTree::build(&s, leaves.clone()).unwrap();
        for (i, leaf) in leaves.iter().enumerate() {
            let p = t.prove(i).unwrap();
            for bit in 0..leaf.len() * 8 {
                let mut l = leaf.clone();
                l[bit / 8] ^= 1 << (bit % 8);
                assert!(!verify(&s, t.root(), &l, &p), "m={m} leaf {i} bit {bit}");
            }
            for (j, sib) in p.siblings.iter().enumerate() {
                for bit in 0..s.digest_bytes() * 8 {
                    let mut q = p.clone();
                    let mut b = sib.digest.as_bytes().to_vec();
                    b[bit / 8] ^= 1 << (bit % 8);
                    q.siblings[j].digest = Digest::from_bytes(&b).unwrap();
                    assert!(!verify(&s, t.root(), leaf, &q));
                }
                let mut q = p.clone();
                q.siblings[j].side = match sib.side {
                    Side::Left => Side::Right,
                    Side::Right => Side::Left,
                };
                assert!(!verify(&s, t.root(), leaf, &q));
            }
            for bit in 0..32 {
                let mut q = p.clone();
                q.leaf_index ^= 1 << bit;
                assert!(!verify(&s, t.root(), leaf, &q), "m={m} leaf {i} index bit {bit}");
            }
            // Other leaves never verify under this leaf's proof.
            for (k, other) in leaves.iter().enumerate() {
                if k != i {
                    assert!(!verify(&s, t.root(), other, &p));
                }
            }
        }
    }
}
