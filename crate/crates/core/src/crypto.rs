//! Hash, symmetric cipher and signature primitives.
//!
//! All three sit behind [`Scheme`], a value type fully described by three
//! size parameters (hash width `h`, ciphertext expansion `α`, signature
//! length). The cost meter reads sizes from the scheme rather than from
//! constants, so a different descriptor re-prices every report.
//!
//! Algorithm selection is derived from the sizes:
//!
//! | parameter        | value | algorithm                                   |
//! |------------------|-------|---------------------------------------------|
//! | `hash_bits`      | 256   | SHA-256                                     |
//! | `hash_bits`      | other | BLAKE2b with `hash_bits / 8` output bytes    |
//! | `sig_bytes`      | 65    | secp256k1 ECDSA, recoverable `r ‖ s ‖ v`    |
//! | `sig_bytes`      | other | keyed-hash test signature (not secure)      |
//!
//! The cipher is always ChaCha20 with the chunk ordinal as nonce; for
//! `α > 1` the ciphertext is extended with further keystream bytes.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use blake2::digest::{Update, VariableOutput};
use blake2::Blake2bVar;
use chacha20::cipher::{KeyIvInit, StreamCipher};
use chacha20::ChaCha20;
use rand::RngCore;
use secp256k1::ecdsa::{RecoverableSignature, RecoveryId};
use secp256k1::{All, Message, Secp256k1};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest as _, Sha256};
use thiserror::Error;

pub const SYMMETRIC_KEY_BYTES: usize = 32;
const SECP_SIG_BYTES: u32 = 65;
const MAX_DIGEST_BYTES: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CryptoError {
    #[error("hash width must be a multiple of 8 in 8..=512 bits, got {0}")]
    HashBits(u32),
    #[error("signature length must be in 1..=255 bytes, got {0}")]
    SigBytes(u32),
    #[error("expansion factor must be a ratio >= 1 with nonzero denominator, got {0}/{1}")]
    Alpha(u64, u64),
    #[error("cannot parse expansion factor {0:?}")]
    AlphaSyntax(String),
    #[error("ciphertext of {len} bytes cannot come from any plaintext under expansion {alpha}")]
    CiphertextLength { len: usize, alpha: Alpha },
    #[error("ciphertext was produced under expansion {found}, scheme uses {expected}")]
    AlphaMismatch { expected: Alpha, found: Alpha },
    #[error("digest must be 1..=64 bytes, got {0}")]
    DigestLength(usize),
    #[error("descriptor name {found:?} does not match parameters (expected {expected:?})")]
    DescriptorName { expected: String, found: String },
}

/// Fixed-width hash output.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Digest(Vec<u8>);

impl Digest {
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        if bytes.is_empty() || bytes.len() > MAX_DIGEST_BYTES as usize {
            return Err(CryptoError::DigestLength(bytes.len()));
        }
        Ok(Self(bytes.to_vec()))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn bits(&self) -> u32 {
        self.0.len() as u32 * 8
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }
}

impl AsRef<[u8]> for Digest {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for Digest {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Digest {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let bytes = hex::decode(s).map_err(serde::de::Error::custom)?;
        Digest::from_bytes(&bytes).map_err(serde::de::Error::custom)
    }
}

/// Symmetric trade key `k`.
#[derive(Clone, PartialEq, Eq)]
pub struct SymmetricKey {
    bytes: [u8; SYMMETRIC_KEY_BYTES],
}

impl SymmetricKey {
    pub fn from_bytes(bytes: [u8; SYMMETRIC_KEY_BYTES]) -> Self {
        Self { bytes }
    }

    pub fn from_slice(bytes: &[u8]) -> Option<Self> {
        let arr: [u8; SYMMETRIC_KEY_BYTES] = bytes.try_into().ok()?;
        Some(Self { bytes: arr })
    }

    pub fn generate<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut bytes = [0u8; SYMMETRIC_KEY_BYTES];
        rng.fill_bytes(&mut bytes);
        Self { bytes }
    }

    pub fn as_bytes(&self) -> &[u8; SYMMETRIC_KEY_BYTES] {
        &self.bytes
    }

    /// Short label safe to print in transcripts; does not reveal the key.
    pub fn key_id(&self) -> String {
        let mut h = Sha256::new();
        sha2::Digest::update(&mut h, b"blockmark/key-id");
        sha2::Digest::update(&mut h, self.bytes);
        hex::encode(&h.finalize()[..6])
    }
}

impl fmt::Debug for SymmetricKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymmetricKey(id={})", self.key_id())
    }
}

/// Serialized as hex; the key becomes public once revealed on-chain.
impl Serialize for SymmetricKey {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(self.bytes))
    }
}

impl<'de> Deserialize<'de> for SymmetricKey {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let bytes = hex::decode(s).map_err(serde::de::Error::custom)?;
        SymmetricKey::from_slice(&bytes).ok_or_else(|| serde::de::Error::custom("symmetric key must be 32 bytes"))
    }
}

/// Exact rational ciphertext expansion factor `α = |Enc(X)| / |X|`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alpha {
    num: u64,
    den: u64,
}

impl Alpha {
    pub const ONE: Alpha = Alpha { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self, CryptoError> {
        if den == 0 || num < den {
            return Err(CryptoError::Alpha(num, den));
        }
        let g = gcd(num, den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn numer(self) -> u64 {
        self.num
    }

    pub fn denom(self) -> u64 {
        self.den
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_one(self) -> bool {
        self.num == self.den
    }

    /// `ceil(α · n)`.
    pub fn ceil_mul(self, n: u64) -> u64 {
        let p = n as u128 * self.num as u128;
        p.div_ceil(self.den as u128) as u64
    }

    /// The unique `n` with `ceil(α · n) == len`, if one exists.
    ///
    /// `n ↦ ceil(α n)` is strictly increasing for `α ≥ 1`, so the preimage is
    /// unique when it exists.
    pub fn invert_ceil(self, len: u64) -> Option<u64> {
        let n = (len as u128 * self.den as u128 / self.num as u128) as u64;
        (self.ceil_mul(n) == len).then_some(n)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl fmt::Debug for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Alpha {
    type Err = CryptoError;

    /// Accepts `"2"`, `"3/2"` and finite decimals such as `"1.25"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CryptoError::AlphaSyntax(s.to_string());
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n = n.trim().parse().map_err(|_| bad())?;
            let d = d.trim().parse().map_err(|_| bad())?;
            return Alpha::new(n, d);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || frac.len() > 12 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let den = 10u64.pow(frac.len() as u32);
            let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
            let frac: u64 = frac.parse().map_err(|_| bad())?;
            let num = int.checked_mul(den).and_then(|v| v.checked_add(frac)).ok_or_else(bad)?;
            return Alpha::new(num, den);
        }
        Alpha::new(s.parse().map_err(|_| bad())?, 1)
    }
}

impl Serialize for Alpha {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Alpha {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(u64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(n) => Alpha::new(n, 1),
            Repr::Text(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Output of [`Scheme::encrypt`]; remembers the expansion it was made under.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Ciphertext {
    pub bytes: Vec<u8>,
    pub alpha: Alpha,
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PublicKey(#[serde(with = "hex")] pub Vec<u8>);

#[derive(Clone, PartialEq, Eq)]
pub struct SecretKey(pub Vec<u8>);

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature(#[serde(with = "hex")] pub Vec<u8>);

impl fmt::Debug for PublicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PublicKey({})", hex::encode(&self.0))
    }
}

impl fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SecretKey(..)")
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Signature({})", hex::encode(&self.0))
    }
}

#[derive(Clone, Debug)]
pub struct SignatureKeyPair {
    pub public: PublicKey,
    pub secret: SecretKey,
}

/// Serialized, self-describing form of a [`Scheme`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeDescriptor {
    pub name: String,
    pub hash_bits: u32,
    pub alpha: Alpha,
    pub sig_bytes: u32,
}

/// The primitive suite used by every party and by the arbiter.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(into = "SchemeDescriptor", try_from = "SchemeDescriptor")]
pub struct Scheme {
    hash_bits: u32,
    alpha: Alpha,
    sig_bytes: u32,
}

impl Default for Scheme {
    fn default() -> Self {
        Self {
            hash_bits: 256,
            alpha: Alpha::ONE,
            sig_bytes: SECP_SIG_BYTES,
        }
    }
}

impl Scheme {
    pub fn new(hash_bits: u32, alpha: Alpha, sig_bytes: u32) -> Result<Self, CryptoError> {
        if hash_bits == 0 || !hash_bits.is_multiple_of(8) || hash_bits > MAX_DIGEST_BYTES * 8 {
            return Err(CryptoError::HashBits(hash_bits));
        }
        if sig_bytes == 0 || sig_bytes > u8::MAX as u32 {
            return Err(CryptoError::SigBytes(sig_bytes));
        }
        Ok(Self {
            hash_bits,
            alpha,
            sig_bytes,
        })
    }

    /// Small, fast suite for oracle tests: 64-bit BLAKE2b digests and a
    /// 16-byte keyed-hash signature.
    pub fn test() -> Self {
        Self {
            hash_bits: 64,
            alpha: Alpha::ONE,
            sig_bytes: 16,
        }
    }

    pub fn hash_bits(&self) -> u32 {
        self.hash_bits
    }

    pub fn digest_bytes(&self) -> usize {
        self.hash_bits as usize / 8
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn sig_bytes(&self) -> u32 {
        self.sig_bytes
    }

    pub fn sig_bits(&self) -> u32 {
        self.sig_bytes * 8
    }

    fn uses_secp256k1(&self) -> bool {
        self.sig_bytes == SECP_SIG_BYTES
    }

    pub fn name(&self) -> String {
        let hash = if self.hash_bits == 256 {
            "sha256".to_string()
        } else {
            format!("blake2b-{}", self.hash_bits)
        };
        let cipher = if self.alpha.is_one() {
            "chacha20".to_string()
        } else {
            format!("chacha20x{}", self.alpha)
        };
        let sig = if self.uses_secp256k1() {
            "secp256k1-recoverable".to_string()
        } else {
            format!("keyed-test-{}", self.sig_bytes)
        };
        format!("{hash}+{cipher}+{sig}")
    }

    pub fn descriptor(&self) -> SchemeDescriptor {
        SchemeDescriptor {
            name: self.name(),
            hash_bits: self.hash_bits,
            alpha: self.alpha,
            sig_bytes: self.sig_bytes,
        }
    }

    // -- hash ------------------------------------------------------------

    pub fn hash(&self, data: &[u8]) -> Digest {
        self.hash_parts(&[data])
    }

    /// Hash of the concatenation of `parts`, without materializing it.
    pub fn hash_parts(&self, parts: &[&[u8]]) -> Digest {
        if self.hash_bits == 256 {
            let mut h = Sha256::new();
            for p in parts {
                sha2::Digest::update(&mut h, p);
            }
            Digest(h.finalize().to_vec())
        } else {
            let mut h = Blake2bVar::new(self.digest_bytes()).expect("width validated in Scheme::new");
            for p in parts {
                h.update(p);
            }
            let mut out = vec![0u8; self.digest_bytes()];
            h.finalize_variable(&mut out).expect("buffer sized to output");
            Digest(out)
        }
    }

    // -- cipher ----------------------------------------------------------

    pub fn ciphertext_len(&self, plaintext_len: usize) -> usize {
        self.alpha.ceil_mul(plaintext_len as u64) as usize
    }

    pub fn encrypt(&self, key: &SymmetricKey, index: u64, plaintext: &[u8]) -> Ciphertext {
        let mut bytes = vec![0u8; self.ciphertext_len(plaintext.len())];
        bytes[..plaintext.len()].copy_from_slice(plaintext);
        // Expansion bytes are keystream continuation (XOR over zeros).
        keystream(key, index).apply_keystream(&mut bytes);
        Ciphertext {
            bytes,
            alpha: self.alpha,
        }
    }

    pub fn decrypt(&self, key: &SymmetricKey, index: u64, ct: &Ciphertext) -> Result<Vec<u8>, CryptoError> {
        if ct.alpha != self.alpha {
            return Err(CryptoError::AlphaMismatch {
                expected: self.alpha,
                found: ct.alpha,
            });
        }
        self.decrypt_bytes(key, index, &ct.bytes)
    }

    /// Decrypts a raw ciphertext body, as the arbiter receives it.
    pub fn decrypt_bytes(&self, key: &SymmetricKey, index: u64, ct: &[u8]) -> Result<Vec<u8>, CryptoError> {
        let pt_len = self
            .alpha
            .invert_ceil(ct.len() as u64)
            .ok_or(CryptoError::CiphertextLength {
                len: ct.len(),
                alpha: self.alpha,
            })? as usize;
        let mut out = ct[..pt_len].to_vec();
        keystream(key, index).apply_keystream(&mut out);
        Ok(out)
    }

    // -- signatures ------------------------------------------------------

    pub fn generate_keypair<R: RngCore + ?Sized>(&self, rng: &mut R) -> SignatureKeyPair {
        if self.uses_secp256k1() {
            loop {
                let mut seed = [0u8; 32];
                rng.fill_bytes(&mut seed);
                if let Ok(sk) = secp256k1::SecretKey::from_slice(&seed) {
                    let pk = secp256k1::PublicKey::from_secret_key(secp(), &sk);
                    return SignatureKeyPair {
                        public: PublicKey(pk.serialize().to_vec()),
                        secret: SecretKey(seed.to_vec()),
                    };
                }
            }
        }
        let mut secret = vec![0u8; 32];
        rng.fill_bytes(&mut secret);
        SignatureKeyPair {
            public: PublicKey(secret.clone()),
            secret: SecretKey(secret),
        }
    }

    pub fn sign(&self, secret: &SecretKey, message: &[u8]) -> Signature {
        if self.uses_secp256k1() {
            let sk = secp256k1::SecretKey::from_slice(&secret.0).expect("secret produced by generate_keypair");
            let sig = secp().sign_ecdsa_recoverable(&secp_message(message), &sk);
            let (recid, compact) = sig.serialize_compact();
            let mut out = compact.to_vec();
            out.push(recid.to_i32() as u8);
            Signature(out)
        } else {
            Signature(keyed_tag(&secret.0, message, self.sig_bytes as usize))
        }
    }

    /// Never panics; malformed keys or signatures simply fail verification.
    pub fn verify(&self, public: &PublicKey, message: &[u8], sig: &Signature) -> bool {
        if sig.0.len() != self.sig_bytes as usize {
            return false;
        }
        if self.uses_secp256k1() {
            verify_secp(public, message, &sig.0)
        } else {
            keyed_tag(&public.0, message, self.sig_bytes as usize) == sig.0
        }
    }
}

impl From<Scheme> for SchemeDescriptor {
    fn from(s: Scheme) -> Self {
        s.descriptor()
    }
}

impl TryFrom<SchemeDescriptor> for Scheme {
    type Error = CryptoError;

    fn try_from(d: SchemeDescriptor) -> Result<Self, Self::Error> {
        let scheme = Scheme::new(d.hash_bits, d.alpha, d.sig_bytes)?;
        if scheme.name() != d.name {
            return Err(CryptoError::DescriptorName {
                expected: scheme.name(),
                found: d.name,
            });
        }
        Ok(scheme)
    }
}

fn keystream(key: &SymmetricKey, index: u64) -> ChaCha20 {
    let mut nonce = [0u8; 12];
    nonce[4..].copy_from_slice(&index.to_be_bytes());
    ChaCha20::new(key.as_bytes().into(), &nonce.into())
}

fn secp() -> &'static Secp256k1<All> {
    static CTX: OnceLock<Secp256k1<All>> = OnceLock::new();
    CTX.get_or_init(Secp256k1::new)
}

/// 32-byte messages are signed as prehashed digests; any other length is
/// SHA-256 prehashed first.
fn secp_message(message: &[u8]) -> Message {
    let digest: [u8; 32] = match message.try_into() {
        Ok(arr) => arr,
        Err(_) => Sha256::digest(message).into(),
    };
    Message::from_digest(digest)
}

fn verify_secp(public: &PublicKey, message: &[u8], sig: &[u8]) -> bool {
    let Ok(recid) = RecoveryId::from_i32(sig[64] as i32) else {
        return false;
    };
    let Ok(rsig) = RecoverableSignature::from_compact(&sig[..64], recid) else {
        return false;
    };
    // Reject the high-s twin so every message has a single valid encoding.
    let standard = rsig.to_standard();
    let mut normalized = standard;
    normalized.normalize_s();
    if normalized != standard {
        return false;
    }
    match secp().recover_ecdsa(&secp_message(message), &rsig) {
        Ok(pk) => pk.serialize().as_slice() == public.0.as_slice(),
        Err(_) => false,
    }
}

/// Insecure keyed-hash "signature" for the test scheme: the public key is the
/// secret itself.
fn keyed_tag(secret: &[u8], message: &[u8], len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(len + 32);
    let mut counter = 0u32;
    while out.len() < len {
        let mut h = Sha256::new();
        sha2::Digest::update(&mut h, b"blockmark/keyed-test");
        sha2::Digest::update(&mut h, counter.to_be_bytes());
        sha2::Digest::update(&mut h, (secret.len() as u32).to_be_bytes());
        sha2::Digest::update(&mut h, secret);
        sha2::Digest::update(&mut h, message);
        out.extend_from_slice(&h.finalize());
        counter += 1;
    }
    out.truncate(len);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::collections::HashSet;

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    #[test]
    fn default_digest_is_32_bytes() {
        let s = Scheme::default();
        assert_eq!(s.hash(b"").as_bytes().len(), 32);
        assert_eq!(s.hash(b"abc"), s.hash(b"abc"));
        // Known SHA-256 vector.
        assert_eq!(
            s.hash(b"abc").to_hex(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn hash_parts_matches_concatenation() {
        for s in [Scheme::default(), Scheme::test()] {
            assert_eq!(s.hash_parts(&[b"ab", b"", b"cd"]), s.hash(b"abcd"));
        }
    }

    #[test]
    fn no_collisions_over_random_corpus() {
        let s = Scheme::default();
        let mut r = rng(1);
        let mut inputs = HashSet::new();
        let mut digests = HashSet::new();
        while inputs.len() < 10_000 {
            let len = (r.next_u32() % 64) as usize;
            let mut buf = vec![0u8; len];
            r.fill_bytes(&mut buf);
            if inputs.insert(buf.clone()) {
                assert!(digests.insert(s.hash(&buf)), "collision on {}", hex::encode(&buf));
            }
        }
    }

    #[test]
    fn encrypt_roundtrip_and_length() {
        let s = Scheme::default();
        let k = SymmetricKey::generate(&mut rng(2));
        for len in [0usize, 1, 31, 32, 33, 1000] {
            let pt: Vec<u8> = (0..len).map(|i| i as u8).collect();
            let ct = s.encrypt(&k, 7, &pt);
            assert_eq!(ct.bytes.len(), len);
            assert_eq!(s.decrypt(&k, 7, &ct).unwrap(), pt);
        }
    }

    #[test]
    fn wrong_key_never_recovers_plaintext() {
        let s = Scheme::default();
        let mut r = rng(3);
        for _ in 0..1000 {
            let k = SymmetricKey::generate(&mut r);
            let k2 = SymmetricKey::generate(&mut r);
            assert_ne!(k, k2);
            let mut pt = vec![0u8; 32];
            r.fill_bytes(&mut pt);
            let ct = s.encrypt(&k, 0, &pt);
            assert_ne!(s.decrypt(&k2, 0, &ct).unwrap(), pt);
        }
    }

    #[test]
    fn chunk_ordinal_separates_keystreams() {
        let s = Scheme::default();
        let k = SymmetricKey::generate(&mut rng(4));
        let pt = [0x42u8; 16];
        let cts: HashSet<Vec<u8>> = (0..64).map(|i| s.encrypt(&k, i, &pt).bytes).collect();
        assert_eq!(cts.len(), 64);
    }

    #[test]
    fn expansion_factor_lengths() {
        let alpha: Alpha = "3/2".parse().unwrap();
        let s = Scheme::new(256, alpha, 65).unwrap();
        let k = SymmetricKey::generate(&mut rng(5));
        let ct = s.encrypt(&k, 1, &[9u8; 5]);
        assert_eq!(ct.bytes.len(), 8); // ceil(7.5)
        assert_eq!(s.decrypt(&k, 1, &ct).unwrap(), vec![9u8; 5]);
        // ceil(1.5 n) takes the values 2, 3, 5, 6, 8, ...; 7 is unreachable.
        assert!(s.decrypt_bytes(&k, 1, &[0u8; 2]).is_ok());
        assert!(matches!(
            s.decrypt_bytes(&k, 1, &[0u8; 7]),
            Err(CryptoError::CiphertextLength { len: 7, .. })
        ));
        let other = Ciphertext {
            bytes: ct.bytes.clone(),
            alpha: Alpha::ONE,
        };
        assert!(matches!(s.decrypt(&k, 1, &other), Err(CryptoError::AlphaMismatch { .. })));
    }

    #[test]
    fn alpha_parsing() {
        assert_eq!("1".parse::<Alpha>().unwrap(), Alpha::ONE);
        assert_eq!("2/2".parse::<Alpha>().unwrap(), Alpha::ONE);
        assert_eq!("1.25".parse::<Alpha>().unwrap(), Alpha::new(5, 4).unwrap());
        assert!("0.5".parse::<Alpha>().is_err());
        assert!("1/0".parse::<Alpha>().is_err());
        assert!("x".parse::<Alpha>().is_err());
        assert_eq!(Alpha::new(3, 2).unwrap().to_string(), "3/2");
    }

    #[test]
    fn secp_signature_is_65_bytes_and_verifies() {
        let s = Scheme::default();
        let kp = s.generate_keypair(&mut rng(6));
        let sig = s.sign(&kp.secret, b"message");
        assert_eq!(sig.0.len(), 65);
        assert!(s.verify(&kp.public, b"message", &sig));
        assert!(!s.verify(&kp.public, b"messagf", &sig));
        let other = s.generate_keypair(&mut rng(7));
        assert!(!s.verify(&other.public, b"message", &sig));
        // Deterministic (RFC 6979).
        assert_eq!(sig, s.sign(&kp.secret, b"message"));
    }

    fn assert_bit_flips_fail(s: &Scheme) {
        let kp = s.generate_keypair(&mut rng(8));
        for len in 0..=8usize {
            let msg: Vec<u8> = (0..len as u8).map(|b| b.wrapping_mul(37)).collect();
            let sig = s.sign(&kp.secret, &msg);
            assert!(s.verify(&kp.public, &msg, &sig));
            for bit in 0..len * 8 {
                let mut m = msg.clone();
                m[bit / 8] ^= 1 << (bit % 8);
                assert!(!s.verify(&kp.public, &m, &sig), "message flip {bit} len {len}");
            }
            for bit in 0..sig.0.len() * 8 {
                let mut t = sig.clone();
                t.0[bit / 8] ^= 1 << (bit % 8);
                assert!(!s.verify(&kp.public, &msg, &t), "signature flip {bit} len {len}");
            }
        }
    }

    #[test]
    fn single_bit_flips_falsify_secp() {
        assert_bit_flips_fail(&Scheme::default());
    }

    #[test]
    fn single_bit_flips_falsify_test_scheme() {
        assert_bit_flips_fail(&Scheme::test());
    }

    #[test]
    fn verify_rejects_wrong_length_and_garbage_keys() {
        let s = Scheme::default();
        let kp = s.generate_keypair(&mut rng(9));
        let sig = s.sign(&kp.secret, b"m");
        assert!(!s.verify(&kp.public, b"m", &Signature(sig.0[..64].to_vec())));
        assert!(!s.verify(&PublicKey(vec![1, 2, 3]), b"m", &sig));
        assert!(!s.verify(&kp.public, b"m", &Signature(vec![0xff; 65])));
    }

    #[test]
    fn descriptor_roundtrip_and_name_check() {
        let s = Scheme::new(128, Alpha::new(5, 4).unwrap(), 40).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(
            json,
            r#"{"name":"blake2b-128+chacha20x5/4+keyed-test-40","hash_bits":128,"alpha":"5/4","sig_bytes":40}"#
        );
        assert_eq!(serde_json::from_str::<Scheme>(&json).unwrap(), s);
        let tampered = json.replace("blake2b-128", "sha256");
        assert!(serde_json::from_str::<Scheme>(&tampered).is_err());
        assert_eq!(Scheme::default().name(), "sha256+chacha20+secp256k1-recoverable");
    }

    #[test]
    fn scheme_parameter_validation() {
        assert!(Scheme::new(0, Alpha::ONE, 65).is_err());
        assert!(Scheme::new(100, Alpha::ONE, 65).is_err());
        assert!(Scheme::new(520, Alpha::ONE, 65).is_err());
        assert!(Scheme::new(256, Alpha::ONE, 0).is_err());
        assert!(Scheme::new(256, Alpha::ONE, 256).is_err());
        assert!(Scheme::new(512, Alpha::ONE, 65).is_ok());
    }
}
