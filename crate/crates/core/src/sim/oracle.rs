//! Reference adjudicator with complete information.
//!
//! It sees what the seller really shipped, the certified plaintext and the
//! revealed key, so it can decide who cheated without trusting any on-chain
//! check. The Merkle code here is a separate recursive implementation; it
//! shares only the hash primitive with [`crate::merkle`].

use crate::chunk::{ChunkedData, OffchainPayload, Variant};
use crate::contract::{DisputeSubmission, Party};
use crate::crypto::{Digest, Scheme, SymmetricKey};
use crate::merkle::{Side, Sibling};

/// Everything a fully informed judge knows about one trade.
pub struct OracleView<'a> {
    pub variant: Variant,
    pub scheme: &'a Scheme,
    /// The data Carol certified.
    pub certified: &'a ChunkedData,
    /// What the seller actually shipped off-chain.
    pub delivered: &'a OffchainPayload,
    /// What the seller committed on-chain (none for constant).
    pub committed: Option<&'a Digest>,
    /// The key the seller revealed.
    pub key: &'a SymmetricKey,
}

fn leaf_digest(s: &Scheme, leaf: &[u8]) -> Digest {
    s.hash(&[&[0u8][..], leaf].concat())
}

fn parent(s: &Scheme, l: &Digest, r: &Digest) -> Digest {
    s.hash(&[&[1u8][..], l.as_bytes(), r.as_bytes()].concat())
}

/// Root and authentication path for `index`, recursing on the padded range.
fn root_and_path(s: &Scheme, leaves: &[Vec<u8>], index: usize) -> (Digest, Vec<Sibling>) {
    let mut level: Vec<Digest> = leaves.iter().map(|l| leaf_digest(s, l)).collect();
    let mut path = Vec::new();
    let mut i = index;
    while level.len() > 1 {
        if level.len() % 2 == 1 {
            level.push(level.last().unwrap().clone());
        }
        let (sib, side) = if i.is_multiple_of(2) {
            (level[i + 1].clone(), Side::Right)
        } else {
            (level[i - 1].clone(), Side::Left)
        };
        path.push(Sibling { digest: sib, side });
        level = level.chunks(2).map(|p| parent(s, &p[0], &p[1])).collect();
        i /= 2;
    }
    (level.pop().unwrap(), path)
}

/// Who a correct arbiter must blame for `submission`, or `None` when there
/// is no dispute.
///
/// Evidence that is not exactly what the seller shipped and committed to is
/// a buyer fabrication. Authentic evidence is judged by decrypting it with
/// the revealed key and comparing with the certified plaintext.
pub fn oracle_adjudicate(view: &OracleView<'_>, submission: Option<&DisputeSubmission>) -> Option<Party> {
    let sub = submission?;
    let s = view.scheme;
    if sub.variant() != view.variant {
        return Some(Party::Buyer);
    }
    let authentic = match (sub, view.delivered) {
        (DisputeSubmission::Linear { ciphertext }, OffchainPayload::Linear { ciphertext: shipped }) => {
            ciphertext == shipped && view.committed == Some(&s.hash(shipped))
        }
        (DisputeSubmission::Logarithmic { chunk, proof }, OffchainPayload::Logarithmic { elements }) => {
            let i = proof.leaf_index as usize;
            match elements.get(i) {
                Some(e) if e == chunk => {
                    let leaves: Vec<Vec<u8>> = elements
                        .iter()
                        .map(|e| [e.chunk_hash.as_bytes(), &e.ciphertext[..]].concat())
                        .collect();
                    let (root, path) = root_and_path(s, &leaves, i);
                    view.committed == Some(&root) && proof.siblings == path
                }
                _ => false,
            }
        }
        (
            DisputeSubmission::Constant {
                index,
                chunk,
                signature,
            },
            OffchainPayload::Constant { elements },
        ) => matches!(
            elements.get(*index as usize),
            Some(e) if &e.chunk == chunk && &e.signature == signature
        ),
        _ => false,
    };
    if !authentic {
        return Some(Party::Buyer);
    }
    let index = sub.chunk_index() as usize;
    let expected: Vec<u8> = match view.variant {
        Variant::Linear => view.certified.join(),
        _ => view.certified.chunk(index).to_vec(),
    };
    let decrypted = s.decrypt_bytes(view.key, index as u64, sub.ciphertext()).ok();
    Some(if decrypted.as_deref() == Some(&expected[..]) {
        Party::Buyer
    } else {
        Party::Seller
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::merkle::MerkleTree;

    #[test]
    fn independent_paths_match_the_library_tree() {
        let s = Scheme::test();
        for m in 1..=17usize {
            let leaves: Vec<Vec<u8>> = (0..m).map(|i| vec![i as u8; 5]).collect();
            let tree = MerkleTree::build(&s, leaves.clone()).unwrap();
            for i in 0..m {
                let (root, path) = root_and_path(&s, &leaves, i);
                assert_eq!(&root, tree.root());
                assert_eq!(path, tree.prove(i).unwrap().siblings);
            }
        }
    }
}
