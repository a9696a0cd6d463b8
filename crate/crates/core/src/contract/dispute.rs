use serde::{Deserialize, Serialize};

use crate::chunk::{HashedChunk, Variant};
use crate::codec::{DecodeError, Reader, Writer};
use crate::crypto::{Digest, Signature};
use crate::merkle::MerkleProof;

/// Evidence the buyer uploads to open a dispute.
///
/// Wire format (all integers big-endian):
///
/// | variant     | layout                                                                 | framing bytes |
/// |-------------|------------------------------------------------------------------------|---------------|
/// | linear      | `0x00 ‖ u32 len ‖ ciphertext`                                           | 5             |
/// | logarithmic | `0x01 ‖ u8 len ‖ hash ‖ u32 len ‖ ciphertext ‖ proof`                   | 11 + depth    |
/// | constant    | `0x02 ‖ u32 index ‖ u8 len ‖ hash ‖ u32 len ‖ ciphertext ‖ u8 len ‖ sig` | 11            |
///
/// The proof is encoded as in [`MerkleProof::encode`]; its framing is the
/// 4-byte index, the count byte and one side byte per level. Proof sibling
/// digests share the width of the claimed hash.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisputeSubmission {
    Linear {
        #[serde(with = "hex")]
        ciphertext: Vec<u8>,
    },
    Logarithmic {
        chunk: HashedChunk,
        proof: MerkleProof,
    },
    Constant {
        index: u32,
        chunk: HashedChunk,
        signature: Signature,
    },
}

impl DisputeSubmission {
    pub fn variant(&self) -> Variant {
        match self {
            DisputeSubmission::Linear { .. } => Variant::Linear,
            DisputeSubmission::Logarithmic { .. } => Variant::Logarithmic,
            DisputeSubmission::Constant { .. } => Variant::Constant,
        }
    }

    /// Chunk ordinal the evidence refers to (0 for the linear variant).
    pub fn chunk_index(&self) -> u32 {
        match self {
            DisputeSubmission::Linear { .. } => 0,
            DisputeSubmission::Logarithmic { proof, .. } => proof.leaf_index,
            DisputeSubmission::Constant { index, .. } => *index,
        }
    }

    pub fn ciphertext(&self) -> &[u8] {
        match self {
            DisputeSubmission::Linear { ciphertext } => ciphertext,
            DisputeSubmission::Logarithmic { chunk, .. } | DisputeSubmission::Constant { chunk, .. } => {
                &chunk.ciphertext
            }
        }
    }

    pub fn claimed_hash(&self) -> Option<&Digest> {
        match self {
            DisputeSubmission::Linear { .. } => None,
            DisputeSubmission::Logarithmic { chunk, .. } | DisputeSubmission::Constant { chunk, .. } => {
                Some(&chunk.chunk_hash)
            }
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.u8(self.variant().tag());
        match self {
            DisputeSubmission::Linear { ciphertext } => {
                w.long(ciphertext);
            }
            DisputeSubmission::Logarithmic { chunk, proof } => {
                w.short(chunk.chunk_hash.as_bytes()).long(&chunk.ciphertext);
                proof.write(&mut w);
            }
            DisputeSubmission::Constant { index, chunk, signature } => {
                w.u32(*index)
                    .short(chunk.chunk_hash.as_bytes())
                    .long(&chunk.ciphertext)
                    .short(&signature.0);
            }
        }
        w.finish()
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader::new(bytes);
        let variant = Variant::from_tag(r.u8()?)?;
        let digest = |b: &[u8]| {
            Digest::from_bytes(b).map_err(|_| DecodeError::Invalid {
                field: "digest length",
                value: b.len() as u64,
            })
        };
        let out = match variant {
            Variant::Linear => DisputeSubmission::Linear {
                ciphertext: r.long()?.to_vec(),
            },
            Variant::Logarithmic => {
                let chunk_hash = digest(r.short()?)?;
                let ciphertext = r.long()?.to_vec();
                let proof = MerkleProof::read(&mut r, chunk_hash.as_bytes().len())?;
                DisputeSubmission::Logarithmic {
                    chunk: HashedChunk { chunk_hash, ciphertext },
                    proof,
                }
            }
            Variant::Constant => {
                let index = r.u32()?;
                let chunk_hash = digest(r.short()?)?;
                let ciphertext = r.long()?.to_vec();
                let signature = Signature(r.short()?.to_vec());
                DisputeSubmission::Constant {
                    index,
                    chunk: HashedChunk { chunk_hash, ciphertext },
                    signature,
                }
            }
        };
        r.finish()?;
        Ok(out)
    }

    /// Bytes of [`encode`](Self::encode) that are tags, indices, counts,
    /// side flags or length prefixes.
    pub fn framing_bytes(&self) -> usize {
        match self {
            DisputeSubmission::Linear { .. } => 5,
            DisputeSubmission::Logarithmic { proof, .. } => 11 + proof.siblings.len(),
            DisputeSubmission::Constant { .. } => 11,
        }
    }

    /// Hashes, ciphertext and signature bits: the quantity the closed-form
    /// dispute cost counts.
    pub fn content_bits(&self) -> u64 {
        match self {
            DisputeSubmission::Linear { ciphertext } => ciphertext.len() as u64 * 8,
            DisputeSubmission::Logarithmic { chunk, proof } => {
                let h = chunk.chunk_hash.as_bytes().len() as u64;
                let path: u64 = proof.siblings.iter().map(|s| s.digest.as_bytes().len() as u64).sum();
                (h + chunk.ciphertext.len() as u64 + path) * 8
            }
            DisputeSubmission::Constant { chunk, signature, .. } => {
                (chunk.chunk_hash.as_bytes().len() + chunk.ciphertext.len() + signature.0.len()) as u64 * 8
            }
        }
    }
}
