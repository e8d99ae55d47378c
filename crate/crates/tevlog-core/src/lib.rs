//! Core primitives for tamper-evident log commitment.
//!
//! This crate is `no_std` (alloc required) and holds the pure algorithmic
//! pieces: leaf/internal hashing over SHA-256 or BLAKE2b-256, Merkle tree
//! construction with the unpaired-node promotion rule, inclusion proof
//! generation and root recomputation, resource-aware chunk sizing, and
//! set-based tamper-detection metrics. IO, file formats, and the CLI live
//! in the companion `tevlog` crate.

#![no_std]

extern crate alloc;

pub mod chunking;
pub mod hash;
pub mod merkle;
pub mod metrics;
pub mod proof;

pub use chunking::{
    adjustment_factor, base_chunk_size, pressure, ChunkConfig, ChunkerState, FixedProbe,
    MemoryProbe, MemorySnapshot, ProfileEnd, ScriptedProbe,
};
pub use hash::{hash_internal, hash_leaf, Digest, HashAlgorithm, HashScheme};
pub use merkle::{recompute_root, MerkleError, MerkleTree};
pub use metrics::DetectionReport;
pub use proof::{deserialize_proof, serialize_proof, InclusionProof, ProofDecodeError, Side};
