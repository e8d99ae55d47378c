//! Inclusion proofs and their text encoding.
//!
//! One serialized record:
//!
//! ```text
//! v1 <algo> <tree_size> <leaf_index> <k>
//! <L|R> <64 lowercase hex chars>
//! ...           (k sibling lines, bottom-up path order)
//! ```

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::hash::{Digest, HashAlgorithm};

/// Which side of the concatenation a sibling occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn letter(&self) -> char {
        match self {
            Side::Left => 'L',
            Side::Right => 'R',
        }
    }
}

/// Ordered sibling digests along the path from a leaf to the root.
///
/// Levels where the path node is promoted (unpaired) contribute no sibling,
/// so `siblings.len()` can be below `ceil(log2(tree_size))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InclusionProof {
    pub leaf_index: u64,
    pub tree_size: u64,
    pub siblings: Vec<(Digest, Side)>,
    pub algorithm: HashAlgorithm,
}

/// Decode failure for the proof text format; names the offending field.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProofDecodeError {
    #[error("missing or malformed header line")]
    BadHeader,
    #[error("unsupported version tag")]
    BadVersion,
    #[error("unknown algorithm name")]
    BadAlgorithm,
    #[error("tree_size is not a positive integer")]
    BadTreeSize,
    #[error("leaf_index is not a valid integer")]
    BadLeafIndex,
    #[error("sibling count field is not a valid integer")]
    BadSiblingCount,
    #[error("sibling line {0} is malformed")]
    BadSiblingLine(usize),
    #[error("sibling side marker must be L or R")]
    BadSide,
    #[error("digest must be 64 lowercase hex characters")]
    BadDigest,
    #[error("leaf_index {index} out of range for tree_size {tree_size}")]
    IndexOutOfRange { index: u64, tree_size: u64 },
}

/// Canonical text encoding of a proof.
pub fn serialize_proof(proof: &InclusionProof) -> Vec<u8> {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "v1 {} {} {} {}",
        proof.algorithm.name(),
        proof.tree_size,
        proof.leaf_index,
        proof.siblings.len()
    );
    for (digest, side) in &proof.siblings {
        let _ = writeln!(out, "{} {}", side.letter(), digest.to_hex());
    }
    out.into_bytes()
}

/// Parse the canonical text encoding.
pub fn deserialize_proof(bytes: &[u8]) -> Result<InclusionProof, ProofDecodeError> {
    let text = core::str::from_utf8(bytes).map_err(|_| ProofDecodeError::BadHeader)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or(ProofDecodeError::BadHeader)?;
    let mut fields = header.split(' ');
    let version = fields.next().ok_or(ProofDecodeError::BadHeader)?;
    if version != "v1" {
        return Err(ProofDecodeError::BadVersion);
    }
    let algorithm = fields
        .next()
        .and_then(HashAlgorithm::from_name)
        .ok_or(ProofDecodeError::BadAlgorithm)?;
    let tree_size: u64 = fields
        .next()
        .and_then(|s| s.parse().ok())
        .filter(|&n| n > 0)
        .ok_or(ProofDecodeError::BadTreeSize)?;
    let leaf_index: u64 = fields
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or(ProofDecodeError::BadLeafIndex)?;
    let count: usize = fields
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or(ProofDecodeError::BadSiblingCount)?;
    if fields.next().is_some() {
        return Err(ProofDecodeError::BadHeader);
    }
    if leaf_index >= tree_size {
        return Err(ProofDecodeError::IndexOutOfRange {
            index: leaf_index,
            tree_size,
        });
    }

    let mut siblings = Vec::with_capacity(count);
    for i in 0..count {
        let line = lines.next().ok_or(ProofDecodeError::BadSiblingLine(i))?;
        let (side, hex_part) = line
            .split_once(' ')
            .ok_or(ProofDecodeError::BadSiblingLine(i))?;
        let side = match side {
            "L" => Side::Left,
            "R" => Side::Right,
            _ => return Err(ProofDecodeError::BadSide),
        };
        if hex_part.len() != 64 || !hex_part.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit()) {
            return Err(ProofDecodeError::BadDigest);
        }
        siblings.push((Digest::from_hex(hex_part)?, side));
    }
    if lines.next().is_some_and(|l| !l.is_empty()) {
        return Err(ProofDecodeError::BadSiblingLine(count));
    }

    Ok(InclusionProof {
        leaf_index,
        tree_size,
        siblings,
        algorithm,
    })
}
