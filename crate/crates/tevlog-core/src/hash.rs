//! Leaf and internal-node hashing.
//!
//! Both supported algorithms emit exactly 32 bytes. The default mode hashes
//! pre-images with no framing or prefix; an optional domain-separated mode
//! prefixes `0x00` to leaf pre-images and `0x01` to internal pre-images.

use alloc::string::String;

use blake2::digest::consts::U32;
use blake2::Blake2b;
use sha2::{Digest as _, Sha256};

use crate::proof::ProofDecodeError;

const LEAF_PREFIX: u8 = 0x00;
const INTERNAL_PREFIX: u8 = 0x01;

/// Selects the hash function used for all tree operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HashAlgorithm {
    Sha256,
    Blake2b256,
}

impl HashAlgorithm {
    pub const ALL: [HashAlgorithm; 2] = [HashAlgorithm::Sha256, HashAlgorithm::Blake2b256];

    pub fn name(&self) -> &'static str {
        match self {
            HashAlgorithm::Sha256 => "sha256",
            HashAlgorithm::Blake2b256 => "blake2b",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "sha256" => Some(HashAlgorithm::Sha256),
            "blake2b" => Some(HashAlgorithm::Blake2b256),
            _ => None,
        }
    }

    fn digest_parts(&self, parts: &[&[u8]]) -> Digest {
        match self {
            HashAlgorithm::Sha256 => {
                let mut h = Sha256::new();
                for p in parts {
                    h.update(p);
                }
                Digest(h.finalize().into())
            }
            HashAlgorithm::Blake2b256 => {
                let mut h = Blake2b::<U32>::new();
                for p in parts {
                    h.update(p);
                }
                Digest(h.finalize().into())
            }
        }
    }
}

impl core::fmt::Display for HashAlgorithm {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// A 256-bit hash value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Digest([u8; 32]);

impl Digest {
    pub const LEN: usize = 32;

    pub const fn from_bytes(bytes: [u8; 32]) -> Self {
        Digest(bytes)
    }

    pub fn from_slice(bytes: &[u8]) -> Option<Self> {
        let arr: [u8; 32] = bytes.try_into().ok()?;
        Some(Digest(arr))
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    /// Lowercase hex, 64 characters.
    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, ProofDecodeError> {
        let bytes = hex::decode(s).map_err(|_| ProofDecodeError::BadDigest)?;
        Self::from_slice(&bytes).ok_or(ProofDecodeError::BadDigest)
    }
}

impl AsRef<[u8]> for Digest {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl core::fmt::Debug for Digest {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

impl core::fmt::Display for Digest {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Hash algorithm plus framing mode. The default is the unframed construction
/// (no prefix bytes); `domain_separated` switches to CT-style prefixes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HashScheme {
    pub algorithm: HashAlgorithm,
    pub domain_separation: bool,
}

impl HashScheme {
    pub const fn plain(algorithm: HashAlgorithm) -> Self {
        HashScheme {
            algorithm,
            domain_separation: false,
        }
    }

    pub const fn domain_separated(algorithm: HashAlgorithm) -> Self {
        HashScheme {
            algorithm,
            domain_separation: true,
        }
    }

    pub fn leaf(&self, data: &[u8]) -> Digest {
        if self.domain_separation {
            self.algorithm.digest_parts(&[&[LEAF_PREFIX], data])
        } else {
            self.algorithm.digest_parts(&[data])
        }
    }

    pub fn internal(&self, left: &Digest, right: &Digest) -> Digest {
        if self.domain_separation {
            self.algorithm
                .digest_parts(&[&[INTERNAL_PREFIX], left.as_ref(), right.as_ref()])
        } else {
            self.algorithm.digest_parts(&[left.as_ref(), right.as_ref()])
        }
    }
}

/// Digest of a single entry's bytes, unframed.
pub fn hash_leaf(data: &[u8], algo: HashAlgorithm) -> Digest {
    HashScheme::plain(algo).leaf(data)
}

/// Digest of the 64-byte concatenation `left || right`, unframed.
pub fn hash_internal(left: &Digest, right: &Digest, algo: HashAlgorithm) -> Digest {
    HashScheme::plain(algo).internal(left, right)
}
