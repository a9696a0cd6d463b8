//! Chunking, off-chain payload assembly, certificates and the closed-form
//! cost model.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{DecodeError, Reader, Writer};
use crate::crypto::{Alpha, Digest, PublicKey, Scheme, SecretKey, Signature, SignatureKeyPair, SymmetricKey};
use crate::merkle::{self, MerkleTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChunkError {
    #[error("chunk size must be a positive multiple of 8 bits, got {0}")]
    ChunkBits(u32),
    #[error("cannot chunk empty data")]
    EmptyData,
    #[error("the constant-size variant needs the seller's signing key")]
    MissingSigningKey,
    #[error("too many chunks: {0}")]
    TooManyChunks(u64),
}

/// Protocol variant, named by its worst-case on-chain dispute size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    /// Whole-ciphertext dispute.
    #[serde(rename = "on")]
    Linear,
    /// Merkle-proof dispute over one chunk.
    #[serde(rename = "ologn")]
    Logarithmic,
    /// Seller-signed single-chunk dispute.
    #[serde(rename = "o1")]
    Constant,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Linear, Variant::Logarithmic, Variant::Constant];

    pub fn tag(self) -> u8 {
        match self {
            Variant::Linear => 0,
            Variant::Logarithmic => 1,
            Variant::Constant => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self, DecodeError> {
        match tag {
            0 => Ok(Variant::Linear),
            1 => Ok(Variant::Logarithmic),
            2 => Ok(Variant::Constant),
            v => Err(DecodeError::Invalid {
                field: "variant tag",
                value: v as u64,
            }),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Linear => "on",
            Variant::Logarithmic => "ologn",
            Variant::Constant => "o1",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "on" | "o(n)" | "linear" => Ok(Variant::Linear),
            "ologn" | "o(logn)" | "logarithmic" => Ok(Variant::Logarithmic),
            "o1" | "o(1)" | "constant" => Ok(Variant::Constant),
            other => Err(format!("unknown variant {other:?} (expected on, ologn or o1)")),
        }
    }
}

/// Data split into equal chunks; the last chunk is zero-padded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkedData {
    chunks: Vec<Vec<u8>>,
    original_len: usize,
    chunk_bits: u32,
}

pub fn split(data: &[u8], chunk_bits: u32) -> Result<ChunkedData, ChunkError> {
    if chunk_bits == 0 || !chunk_bits.is_multiple_of(8) {
        return Err(ChunkError::ChunkBits(chunk_bits));
    }
    if data.is_empty() {
        return Err(ChunkError::EmptyData);
    }
    let size = chunk_bits as usize / 8;
    let count = data.len().div_ceil(size);
    if count > u32::MAX as usize {
        return Err(ChunkError::TooManyChunks(count as u64));
    }
    let chunks = data
        .chunks(size)
        .map(|c| {
            let mut v = c.to_vec();
            v.resize(size, 0);
            v
        })
        .collect();
    Ok(ChunkedData {
        chunks,
        original_len: data.len(),
        chunk_bits,
    })
}

impl ChunkedData {
    pub fn chunks(&self) -> &[Vec<u8>] {
        &self.chunks
    }

    pub fn chunk(&self, index: usize) -> &[u8] {
        &self.chunks[index]
    }

    pub fn chunk_count(&self) -> usize {
        self.chunks.len()
    }

    pub fn chunk_bits(&self) -> u32 {
        self.chunk_bits
    }

    pub fn chunk_bytes(&self) -> usize {
        self.chunk_bits as usize / 8
    }

    pub fn original_len(&self) -> usize {
        self.original_len
    }

    pub fn params(&self) -> ChunkParams {
        ChunkParams {
            chunk_bits: self.chunk_bits,
            chunk_count: self.chunks.len() as u32,
            original_len: self.original_len as u64,
        }
    }

    /// Concatenation truncated to the original length.
    pub fn join(&self) -> Vec<u8> {
        let mut out = self.chunks.concat();
        out.truncate(self.original_len);
        out
    }

    /// Replaces chunk contents, keeping the padding layout. Used to model a
    /// seller who ships different data than was certified.
    pub fn with_chunk(&self, index: usize, contents: Vec<u8>) -> ChunkedData {
        assert_eq!(contents.len(), self.chunk_bytes());
        let mut out = self.clone();
        out.chunks[index] = contents;
        out
    }

    pub fn chunk_hashes(&self, scheme: &Scheme) -> Vec<Digest> {
        self.chunks.iter().map(|c| scheme.hash(c)).collect()
    }
}

/// `(hash(chunk), Enc_k(chunk))`, one leaf of the off-chain data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashedChunk {
    pub chunk_hash: Digest,
    #[serde(with = "hex")]
    pub ciphertext: Vec<u8>,
}

impl HashedChunk {
    /// Encrypts `plaintext` at `index` and attaches the claimed hash.
    pub fn seal(scheme: &Scheme, key: &SymmetricKey, index: u32, claimed_hash: Digest, plaintext: &[u8]) -> Self {
        Self {
            chunk_hash: claimed_hash,
            ciphertext: scheme.encrypt(key, index as u64, plaintext).bytes,
        }
    }

    /// Merkle leaf bytes: `hash ‖ ciphertext`.
    pub fn leaf_bytes(&self) -> Vec<u8> {
        [self.chunk_hash.as_bytes(), &self.ciphertext].concat()
    }
}

/// A [`HashedChunk`] carrying the seller's signature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedChunk {
    pub chunk: HashedChunk,
    pub signature: Signature,
}

/// The digest the seller signs for chunk `index`:
/// `hash(index_be32 ‖ hash(chunk) ‖ ciphertext)`.
///
/// The ordinal is bound because the cipher nonce is the ordinal; without it a
/// buyer could replay a genuine chunk under a different position and have it
/// decrypt to garbage.
pub fn signing_digest(scheme: &Scheme, index: u32, chunk: &HashedChunk) -> Digest {
    scheme.hash_parts(&[&index.to_be_bytes(), chunk.chunk_hash.as_bytes(), &chunk.ciphertext])
}

impl SignedChunk {
    pub fn sign(scheme: &Scheme, secret: &SecretKey, index: u32, chunk: HashedChunk) -> Self {
        let digest = signing_digest(scheme, index, &chunk);
        Self {
            signature: scheme.sign(secret, digest.as_bytes()),
            chunk,
        }
    }

    pub fn verify(&self, scheme: &Scheme, public: &PublicKey, index: u32) -> bool {
        let digest = signing_digest(scheme, index, &self.chunk);
        scheme.verify(public, digest.as_bytes(), &self.signature)
    }
}

/// What the seller ships the buyer over the off-chain channel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OffchainPayload {
    Linear {
        #[serde(with = "hex")]
        ciphertext: Vec<u8>,
    },
    Logarithmic {
        elements: Vec<HashedChunk>,
    },
    Constant {
        elements: Vec<SignedChunk>,
    },
}

impl OffchainPayload {
    pub fn variant(&self) -> Variant {
        match self {
            OffchainPayload::Linear { .. } => Variant::Linear,
            OffchainPayload::Logarithmic { .. } => Variant::Logarithmic,
            OffchainPayload::Constant { .. } => Variant::Constant,
        }
    }

    pub fn element_count(&self) -> usize {
        match self {
            OffchainPayload::Linear { .. } => 1,
            OffchainPayload::Logarithmic { elements } => elements.len(),
            OffchainPayload::Constant { elements } => elements.len(),
        }
    }

    /// The `(hash, ciphertext)` pair at `index`, for the chunked variants.
    pub fn hashed_chunk(&self, index: usize) -> Option<&HashedChunk> {
        match self {
            OffchainPayload::Linear { .. } => None,
            OffchainPayload::Logarithmic { elements } => elements.get(index),
            OffchainPayload::Constant { elements } => elements.get(index).map(|e| &e.chunk),
        }
    }

    pub fn hashed_chunks(&self) -> Vec<&HashedChunk> {
        match self {
            OffchainPayload::Linear { .. } => vec![],
            OffchainPayload::Logarithmic { elements } => elements.iter().collect(),
            OffchainPayload::Constant { elements } => elements.iter().map(|e| &e.chunk).collect(),
        }
    }

    /// Merkle tree over `hash ‖ ciphertext` leaves (chunked variants only).
    pub fn data_tree(&self, scheme: &Scheme) -> Option<MerkleTree> {
        let leaves: Vec<Vec<u8>> = self.hashed_chunks().iter().map(|c| c.leaf_bytes()).collect();
        MerkleTree::build(scheme, leaves).ok()
    }

    /// Wire format: `variant (u8) ‖ M (u32 BE) ‖ element*`, every element
    /// field prefixed with its u32 BE length. Fields per element: ciphertext
    /// (linear); hash, ciphertext (logarithmic); hash, ciphertext, signature
    /// (constant).
    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.u8(self.variant().tag()).u32(self.element_count() as u32);
        match self {
            OffchainPayload::Linear { ciphertext } => {
                w.long(ciphertext);
            }
            OffchainPayload::Logarithmic { elements } => {
                for e in elements {
                    w.long(e.chunk_hash.as_bytes()).long(&e.ciphertext);
                }
            }
            OffchainPayload::Constant { elements } => {
                for e in elements {
                    w.long(e.chunk.chunk_hash.as_bytes())
                        .long(&e.chunk.ciphertext)
                        .long(&e.signature.0);
                }
            }
        }
        w.finish()
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader::new(bytes);
        let variant = Variant::from_tag(r.u8()?)?;
        let count = r.u32()? as usize;
        let digest = |b: &[u8]| {
            Digest::from_bytes(b).map_err(|_| DecodeError::Invalid {
                field: "digest length",
                value: b.len() as u64,
            })
        };
        // Each element needs at least one 4-byte length prefix.
        let cap = count.min(r.remaining() / 4);
        let payload = match variant {
            Variant::Linear => {
                if count != 1 {
                    return Err(DecodeError::Invalid {
                        field: "linear element count",
                        value: count as u64,
                    });
                }
                OffchainPayload::Linear {
                    ciphertext: r.long()?.to_vec(),
                }
            }
            Variant::Logarithmic => {
                let mut elements = Vec::with_capacity(cap);
                for _ in 0..count {
                    let chunk_hash = digest(r.long()?)?;
                    let ciphertext = r.long()?.to_vec();
                    elements.push(HashedChunk { chunk_hash, ciphertext });
                }
                OffchainPayload::Logarithmic { elements }
            }
            Variant::Constant => {
                let mut elements = Vec::with_capacity(cap);
                for _ in 0..count {
                    let chunk_hash = digest(r.long()?)?;
                    let ciphertext = r.long()?.to_vec();
                    let signature = Signature(r.long()?.to_vec());
                    elements.push(SignedChunk {
                        chunk: HashedChunk { chunk_hash, ciphertext },
                        signature,
                    });
                }
                OffchainPayload::Constant { elements }
            }
        };
        r.finish()?;
        Ok(payload)
    }
}

/// Serialized payload size computed from sizes alone; equals
/// `payload.encode().len()` for any payload the honest seller produces.
pub fn payload_encoded_len(variant: Variant, scheme: &Scheme, params: &ChunkParams) -> u64 {
    let ct_chunk = scheme.ciphertext_len(params.chunk_bits as usize / 8) as u64;
    let h = scheme.digest_bytes() as u64;
    let m = params.chunk_count as u64;
    5 + match variant {
        Variant::Linear => 4 + scheme.ciphertext_len(params.original_len as usize) as u64,
        Variant::Logarithmic => m * (4 + h + 4 + ct_chunk),
        Variant::Constant => m * (4 + h + 4 + ct_chunk + 4 + scheme.sig_bytes() as u64),
    }
}

/// Framing bytes in [`OffchainPayload::encode`] beyond hashes, ciphertexts
/// and signatures: 5 header bytes plus 4 per field.
pub fn payload_framing_bytes(variant: Variant, chunk_count: u64) -> u64 {
    5 + match variant {
        Variant::Linear => 4,
        Variant::Logarithmic => 8 * chunk_count,
        Variant::Constant => 12 * chunk_count,
    }
}

/// Builds the honest seller's off-chain payload.
pub fn make_payload(
    variant: Variant,
    scheme: &Scheme,
    chunked: &ChunkedData,
    key: &SymmetricKey,
    signing_key: Option<&SecretKey>,
) -> Result<OffchainPayload, ChunkError> {
    Ok(match variant {
        Variant::Linear => OffchainPayload::Linear {
            ciphertext: scheme.encrypt(key, 0, &chunked.join()).bytes,
        },
        Variant::Logarithmic => OffchainPayload::Logarithmic {
            elements: chunked
                .chunks()
                .iter()
                .enumerate()
                .map(|(i, c)| HashedChunk::seal(scheme, key, i as u32, scheme.hash(c), c))
                .collect(),
        },
        Variant::Constant => {
            let sk = signing_key.ok_or(ChunkError::MissingSigningKey)?;
            OffchainPayload::Constant {
                elements: chunked
                    .chunks()
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let hc = HashedChunk::seal(scheme, key, i as u32, scheme.hash(c), c);
                        SignedChunk::sign(scheme, sk, i as u32, hc)
                    })
                    .collect(),
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkParams {
    pub chunk_bits: u32,
    pub chunk_count: u32,
    pub original_len: u64,
}

impl ChunkParams {
    pub fn chunk_bytes(&self) -> usize {
        self.chunk_bits as usize / 8
    }
}

/// The certifier's signed anchor for the traded data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub root: Digest,
    pub carol_signature: Signature,
    pub params: ChunkParams,
    pub carol_public_key: PublicKey,
}

/// The anchor the certifier signs: `hash(D)` for the linear variant, the
/// Merkle root over chunk hashes otherwise.
pub fn certified_root(scheme: &Scheme, variant: Variant, chunked: &ChunkedData) -> Digest {
    match variant {
        Variant::Linear => scheme.hash(&chunked.join()),
        _ => chunk_hash_root(scheme, &chunked.chunk_hashes(scheme)),
    }
}

/// Merkle root over a sequence of chunk hashes.
pub fn chunk_hash_root(scheme: &Scheme, hashes: &[Digest]) -> Digest {
    let leaves = hashes.iter().map(|h| h.as_bytes().to_vec()).collect();
    MerkleTree::build(scheme, leaves)
        .expect("chunked data is never empty")
        .root()
        .clone()
}

impl Certificate {
    pub fn issue(scheme: &Scheme, variant: Variant, chunked: &ChunkedData, carol: &SignatureKeyPair) -> Self {
        let root = certified_root(scheme, variant, chunked);
        Self {
            carol_signature: scheme.sign(&carol.secret, root.as_bytes()),
            root,
            params: chunked.params(),
            carol_public_key: carol.public.clone(),
        }
    }

    pub fn verify(&self, scheme: &Scheme) -> bool {
        scheme.verify(&self.carol_public_key, self.root.as_bytes(), &self.carol_signature)
    }
}

// -- cost model ------------------------------------------------------------

/// Real-valued chunk size minimizing `(log2(N/L) + 1)·h + α·L`:
/// `L* = h / (α ln 2)`.
pub fn optimal_chunk_bits(hash_bits: u32, alpha: Alpha) -> f64 {
    hash_bits as f64 / (alpha.as_f64() * std::f64::consts::LN_2)
}

/// The continuous dispute-upload cost `(log2(N/L) + 1)·h + α·L` in bits.
pub fn continuous_dispute_cost(n_bits: f64, chunk_bits: f64, hash_bits: u32, alpha: Alpha) -> f64 {
    ((n_bits / chunk_bits).log2() + 1.0) * hash_bits as f64 + alpha.as_f64() * chunk_bits
}

/// The byte-aligned chunk size (multiple of 8 bits) next to `L*` with the
/// lower continuous cost.
pub fn byte_aligned_optimum(hash_bits: u32, alpha: Alpha, n_bits: f64) -> u32 {
    let opt = optimal_chunk_bits(hash_bits, alpha);
    let lo = ((opt / 8.0).floor() as u32).max(1) * 8;
    let hi = lo + 8;
    let cost = |l: u32| continuous_dispute_cost(n_bits, l as f64, hash_bits, alpha);
    if cost(lo) <= cost(hi) {
        lo
    } else {
        hi
    }
}

/// `M = ceil(N / L)`.
pub fn chunk_count(n_bits: u64, chunk_bits: u32) -> u64 {
    n_bits.div_ceil(chunk_bits as u64)
}

/// Closed-form dispute upload size in bits, excluding wire framing.
///
/// * linear: `α·N`
/// * logarithmic: `(ceil(log2 M) + 1)·h + α·L`
/// * constant: `h + α·L + sig`
///
/// Fractional `α·x` products are rounded up to whole bits.
pub fn dispute_payload_bits(
    variant: Variant,
    n_bits: u64,
    chunk_bits: u32,
    hash_bits: u32,
    alpha: Alpha,
    sig_bits: u32,
) -> u64 {
    let h = hash_bits as u64;
    match variant {
        Variant::Linear => alpha.ceil_mul(n_bits),
        Variant::Logarithmic => {
            let depth = merkle::depth_for(chunk_count(n_bits, chunk_bits)) as u64;
            (depth + 1) * h + alpha.ceil_mul(chunk_bits as u64)
        }
        Variant::Constant => h + alpha.ceil_mul(chunk_bits as u64) + sig_bits as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngCore, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn split_whole_data_is_one_chunk() {
        let d = vec![7u8; 40];
        let c = split(&d, 320).unwrap();
        assert_eq!(c.chunk_count(), 1);
        assert_eq!(c.chunk(0), &d[..]);
    }

    #[test]
    fn split_1000_bytes_into_256_bit_chunks() {
        // ceil(8000 / 256) = 32 chunks; 32 * 32 - 1000 = 24 padding bytes.
        let d: Vec<u8> = (0..1000u32).map(|i| (i % 251 + 1) as u8).collect();
        let c = split(&d, 256).unwrap();
        assert_eq!(c.chunk_count(), 32);
        let last = c.chunk(31);
        assert_eq!(&last[8..], &[0u8; 24]);
        assert!(last[..8].iter().all(|&b| b != 0));
        assert_eq!(c.join(), d);
    }

    #[test]
    fn split_errors() {
        assert_eq!(split(b"abc", 0), Err(ChunkError::ChunkBits(0)));
        assert_eq!(split(b"abc", 369), Err(ChunkError::ChunkBits(369)));
        assert_eq!(split(b"", 256), Err(ChunkError::EmptyData));
    }

    #[test]
    fn constant_payload_needs_signing_key() {
        let s = Scheme::test();
        let c = split(&[1u8; 64], 128).unwrap();
        let k = SymmetricKey::from_bytes([3; 32]);
        assert_eq!(
            make_payload(Variant::Constant, &s, &c, &k, None),
            Err(ChunkError::MissingSigningKey)
        );
    }

    #[test]
    fn constant_payload_signatures_bind_index_hash_and_ciphertext() {
        let s = Scheme::default();
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let kp = s.generate_keypair(&mut rng);
        let k = SymmetricKey::generate(&mut rng);
        let mut data = vec![0u8; 100];
        rng.fill_bytes(&mut data);
        let c = split(&data, 256).unwrap();
        let p = make_payload(Variant::Constant, &s, &c, &k, Some(&kp.secret)).unwrap();
        let OffchainPayload::Constant { elements } = &p else { panic!() };
        assert_eq!(elements.len(), 4);
        for (i, e) in elements.iter().enumerate() {
            assert_eq!(e.chunk.chunk_hash, s.hash(c.chunk(i)));
            let msg = s.hash(&[&(i as u32).to_be_bytes()[..], e.chunk.chunk_hash.as_bytes(), &e.chunk.ciphertext].concat());
            assert!(s.verify(&kp.public, msg.as_bytes(), &e.signature));
            assert!(e.verify(&s, &kp.public, i as u32));
            assert!(!e.verify(&s, &kp.public, i as u32 + 1));
        }
    }

    #[test]
    fn payload_sizes_follow_closed_form() {
        let s = Scheme::default();
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let kp = s.generate_keypair(&mut rng);
        let k = SymmetricKey::generate(&mut rng);
        for (len, bits) in [(1000usize, 256u32), (37, 64), (4096, 368)] {
            let mut data = vec![0u8; len];
            rng.fill_bytes(&mut data);
            let c = split(&data, bits).unwrap();
            let m = c.chunk_count() as u64;
            let l = bits as u64;
            for v in Variant::ALL {
                let p = make_payload(v, &s, &c, &k, Some(&kp.secret)).unwrap();
                let enc = p.encode();
                let content_bits = match v {
                    Variant::Linear => len as u64 * 8,
                    Variant::Logarithmic => m * (256 + l),
                    Variant::Constant => m * (256 + l + 520),
                };
                assert_eq!(enc.len() as u64, content_bits / 8 + payload_framing_bytes(v, m), "{v} {len} {bits}");
                assert_eq!(enc.len() as u64, payload_encoded_len(v, &s, &c.params()));
                assert_eq!(OffchainPayload::decode(&enc).unwrap(), p);
            }
        }
    }

    #[test]
    fn payload_decode_rejects_garbage() {
        assert!(OffchainPayload::decode(&[]).is_err());
        assert!(OffchainPayload::decode(&[9, 0, 0, 0, 1]).is_err());
        assert!(OffchainPayload::decode(&[0, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0]).is_err());
        assert!(OffchainPayload::decode(&[1, 0xff, 0xff, 0xff, 0xff]).is_err());
        // empty digest
        assert!(OffchainPayload::decode(&[1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0]).is_err());
    }

    #[test]
    fn certificate_verifies_and_anchors_root() {
        let s = Scheme::default();
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        let carol = s.generate_keypair(&mut rng);
        let c = split(&[5u8; 96], 256).unwrap();
        let cert = Certificate::issue(&s, Variant::Logarithmic, &c, &carol);
        assert!(cert.verify(&s));
        assert_eq!(cert.params, ChunkParams { chunk_bits: 256, chunk_count: 3, original_len: 96 });
        let lin = Certificate::issue(&s, Variant::Linear, &c, &carol);
        assert_eq!(lin.root, s.hash(&[5u8; 96]));
        let mut bad = cert.clone();
        bad.root = lin.root.clone();
        assert!(!bad.verify(&s));
    }

    #[test]
    fn optimal_chunk_size_369_bits() {
        let l = optimal_chunk_bits(256, Alpha::ONE);
        assert!((l - 369.329_8).abs() < 1e-3, "{l}");
        assert_eq!(l.round() as u32, 369);
        let half = optimal_chunk_bits(256, Alpha::new(2, 1).unwrap());
        assert!((half - l / 2.0).abs() < 1e-9);
    }

    #[test]
    fn integer_scan_finds_the_stationary_point() {
        // Brute-force oracle: scan every integer L for N = 2^20.
        let n = (1u64 << 20) as f64;
        let best = (1..=8192u32)
            .min_by(|&a, &b| {
                continuous_dispute_cost(n, a as f64, 256, Alpha::ONE)
                    .total_cmp(&continuous_dispute_cost(n, b as f64, 256, Alpha::ONE))
            })
            .unwrap();
        assert_eq!(best, 369);
        // Independent of N.
        let best_small = (1..=4096u32)
            .min_by(|&a, &b| {
                continuous_dispute_cost(1e5, a as f64, 256, Alpha::ONE)
                    .total_cmp(&continuous_dispute_cost(1e5, b as f64, 256, Alpha::ONE))
            })
            .unwrap();
        assert_eq!(best_small, 369);
        assert_eq!(byte_aligned_optimum(256, Alpha::ONE, n), 368);
    }

    #[test]
    fn constant_dispute_is_1032_bits() {
        for k in 10..=24 {
            assert_eq!(dispute_payload_bits(Variant::Constant, 1 << k, 256, 256, Alpha::ONE, 520), 1032);
        }
    }

    #[test]
    fn logarithmic_formula_cases() {
        // Single chunk: empty path plus the leaf.
        assert_eq!(dispute_payload_bits(Variant::Logarithmic, 256, 256, 256, Alpha::ONE, 520), 256 + 256);
        // N = 2^20, L = 369: M = ceil(1048576 / 369) = 2842, ceil(log2 2842) = 12.
        assert_eq!(chunk_count(1 << 20, 369), 2842);
        assert_eq!(dispute_payload_bits(Variant::Logarithmic, 1 << 20, 369, 256, Alpha::ONE, 520), 13 * 256 + 369);
        // Doubling N at fixed L adds one level.
        for k in 9..24 {
            let a = dispute_payload_bits(Variant::Logarithmic, 1 << k, 368, 256, Alpha::ONE, 520);
            let b = dispute_payload_bits(Variant::Logarithmic, 1 << (k + 1), 368, 256, Alpha::ONE, 520);
            assert_eq!(b - a, 256, "k={k}");
        }
        assert_eq!(dispute_payload_bits(Variant::Linear, 8000, 256, 256, Alpha::new(3, 2).unwrap(), 520), 12000);
    }

    #[test]
    fn variant_names() {
        for v in Variant::ALL {
            assert_eq!(v.as_str().parse::<Variant>().unwrap(), v);
            assert_eq!(Variant::from_tag(v.tag()).unwrap(), v);
            assert_eq!(serde_json::to_string(&v).unwrap(), format!("\"{v}\""));
        }
        assert!("o2".parse::<Variant>().is_err());
    }
}
