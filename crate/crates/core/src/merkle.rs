//! Binary Merkle trees with tagged leaf/node hashing.
//!
//! * leaf digest: `hash(0x00 ‖ leaf)`
//! * node digest: `hash(0x01 ‖ left ‖ right)`
//! * a level with an odd number of nodes duplicates its last node
//!
//! With this padding a tree over `M` leaves has exactly `ceil(log2 M)` levels
//! above the leaves, which is the length of every inclusion proof.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{DecodeError, Reader, Writer};
use crate::crypto::{Digest, Scheme};

pub const LEAF_TAG: u8 = 0x00;
pub const NODE_TAG: u8 = 0x01;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MerkleError {
    #[error("cannot build a Merkle tree over zero leaves")]
    Empty,
    #[error("leaf index {index} out of range for {count} leaves")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("too many leaves: {0}")]
    TooManyLeaves(usize),
}

pub fn leaf_hash(scheme: &Scheme, leaf: &[u8]) -> Digest {
    scheme.hash_parts(&[&[LEAF_TAG], leaf])
}

pub fn node_hash(scheme: &Scheme, left: &Digest, right: &Digest) -> Digest {
    scheme.hash_parts(&[&[NODE_TAG], left.as_bytes(), right.as_bytes()])
}

/// Number of proof steps for a tree with `leaf_count` leaves.
pub fn depth_for(leaf_count: u64) -> u32 {
    if leaf_count <= 1 {
        0
    } else {
        64 - (leaf_count - 1).leading_zeros()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MerkleTree {
    leaves: Vec<Vec<u8>>,
    /// `levels[0]` holds leaf digests, the last level holds the root.
    levels: Vec<Vec<Digest>>,
}

impl MerkleTree {
    pub fn build(scheme: &Scheme, leaves: Vec<Vec<u8>>) -> Result<Self, MerkleError> {
        if leaves.is_empty() {
            return Err(MerkleError::Empty);
        }
        if leaves.len() > u32::MAX as usize {
            return Err(MerkleError::TooManyLeaves(leaves.len()));
        }
        let mut levels = vec![leaves.iter().map(|l| leaf_hash(scheme, l)).collect::<Vec<_>>()];
        while levels.last().map_or(0, Vec::len) > 1 {
            let prev = levels.last().expect("nonempty");
            let next = prev
                .chunks(2)
                .map(|pair| match pair {
                    [l, r] => node_hash(scheme, l, r),
                    [l] => node_hash(scheme, l, l),
                    _ => unreachable!(),
                })
                .collect();
            levels.push(next);
        }
        Ok(Self { leaves, levels })
    }

    pub fn root(&self) -> &Digest {
        &self.levels.last().expect("at least one level")[0]
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn leaves(&self) -> &[Vec<u8>] {
        &self.leaves
    }

    pub fn depth(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    pub fn prove(&self, index: usize) -> Result<MerkleProof, MerkleError> {
        if index >= self.leaf_count() {
            return Err(MerkleError::IndexOutOfRange {
                index,
                count: self.leaf_count(),
            });
        }
        let mut siblings = Vec::with_capacity(self.depth() as usize);
        let mut pos = index;
        for level in &self.levels[..self.levels.len() - 1] {
            let (sib, side) = if pos % 2 == 1 {
                (pos - 1, Side::Left)
            } else {
                // Odd-length level: the last node is paired with itself.
                (if pos + 1 < level.len() { pos + 1 } else { pos }, Side::Right)
            };
            siblings.push(Sibling {
                digest: level[sib].clone(),
                side,
            });
            pos /= 2;
        }
        Ok(MerkleProof {
            leaf_index: index as u32,
            siblings,
        })
    }
}

/// Which side of the running hash a sibling digest sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn to_byte(self) -> u8 {
        match self {
            Side::Left => 0,
            Side::Right => 1,
        }
    }

    fn from_byte(b: u8) -> Result<Self, DecodeError> {
        match b {
            0 => Ok(Side::Left),
            1 => Ok(Side::Right),
            v => Err(DecodeError::Invalid {
                field: "merkle sibling side",
                value: v as u64,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sibling {
    pub digest: Digest,
    pub side: Side,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MerkleProof {
    pub leaf_index: u32,
    pub siblings: Vec<Sibling>,
}

/// Work done while checking a proof.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FoldStats {
    pub hashes: u64,
    pub fold_steps: u64,
}

impl MerkleProof {
    /// Wire format: `leaf_index (u32 BE) ‖ count (u8) ‖ (side ‖ digest)*`.
    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.write(&mut w);
        w.finish()
    }

    pub fn encoded_len(&self, digest_bytes: usize) -> usize {
        5 + self.siblings.len() * (1 + digest_bytes)
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.u32(self.leaf_index).u8(self.siblings.len() as u8);
        for s in &self.siblings {
            w.u8(s.side.to_byte()).raw(s.digest.as_bytes());
        }
    }

    pub fn decode(bytes: &[u8], digest_bytes: usize) -> Result<Self, DecodeError> {
        let mut r = Reader::new(bytes);
        let proof = Self::read(&mut r, digest_bytes)?;
        r.finish()?;
        Ok(proof)
    }

    pub(crate) fn read(r: &mut Reader<'_>, digest_bytes: usize) -> Result<Self, DecodeError> {
        let leaf_index = r.u32()?;
        let count = r.u8()? as usize;
        let mut siblings = Vec::with_capacity(count);
        for _ in 0..count {
            let side = Side::from_byte(r.u8()?)?;
            let digest = Digest::from_bytes(r.bytes(digest_bytes)?).map_err(|_| DecodeError::Invalid {
                field: "digest length",
                value: digest_bytes as u64,
            })?;
            siblings.push(Sibling { digest, side });
        }
        Ok(Self { leaf_index, siblings })
    }
}

pub fn verify(scheme: &Scheme, root: &Digest, leaf: &[u8], proof: &MerkleProof) -> bool {
    verify_with_stats(scheme, root, leaf, proof).0
}

/// Folds `leaf` up through the proof and compares against `root`.
///
/// Side flags must agree with the bits of `leaf_index` (a left sibling means
/// the running node is a right child), and `leaf_index` must fit in the proof
/// depth, so a proof authenticates exactly one position.
pub fn verify_with_stats(scheme: &Scheme, root: &Digest, leaf: &[u8], proof: &MerkleProof) -> (bool, FoldStats) {
    let mut stats = FoldStats::default();
    let depth = proof.siblings.len();
    if depth < 32 && (proof.leaf_index as u64) >> depth != 0 {
        return (false, stats);
    }
    for (level, sib) in proof.siblings.iter().enumerate() {
        let bit = level < 32 && (proof.leaf_index >> level) & 1 == 1;
        if bit != (sib.side == Side::Left) {
            return (false, stats);
        }
    }
    let mut acc = leaf_hash(scheme, leaf);
    stats.hashes += 1;
    for sib in &proof.siblings {
        acc = match sib.side {
            Side::Left => node_hash(scheme, &sib.digest, &acc),
            Side::Right => node_hash(scheme, &acc, &sib.digest),
        };
        stats.hashes += 1;
        stats.fold_steps += 1;
    }
    (&acc == root, stats)
}
