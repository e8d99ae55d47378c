//! Merkle tree construction with the unpaired-node promotion rule.
//!
//! Each internal node hashes the concatenation of its two children. When a
//! level has odd width, the last node is carried to the next level
//! byte-identical, without hashing. Proof generation appends a sibling only
//! at levels where the path node is paired, so proofs can be shorter than
//! `ceil(log2(n))` when the path crosses promoted nodes.

use alloc::vec::Vec;

use crate::hash::{Digest, HashScheme};
use crate::proof::{InclusionProof, Side};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MerkleError {
    #[error("empty tree has no root")]
    EmptyTree,
    #[error("leaf index {index} out of range, valid range is 0..{leaf_count}")]
    IndexOutOfRange { index: u64, leaf_count: u64 },
}

/// Level-indexed digest arrays; level 0 holds the leaves, the top level holds
/// the root. Immutable once built except through [`MerkleTree::append_leaves`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MerkleTree {
    levels: Vec<Vec<Digest>>,
    scheme: HashScheme,
}

impl MerkleTree {
    /// Builds the full tree over `leaves`. An empty input yields a rootless
    /// empty tree.
    pub fn build(leaves: Vec<Digest>, scheme: HashScheme) -> Self {
        let mut tree = MerkleTree {
            levels: alloc::vec![Vec::new()],
            scheme,
        };
        tree.append_leaves(&leaves);
        tree
    }

    /// Appends leaves and brings every level back in sync, reusing nodes
    /// whose leaf range lies entirely within the previous tree. The result
    /// is byte-identical to a from-scratch [`MerkleTree::build`] over the
    /// combined leaf list. Returns the number of hash evaluations performed.
    pub fn append_leaves(&mut self, new_leaves: &[Digest]) -> u64 {
        if new_leaves.is_empty() {
            return 0;
        }
        let old_n = self.levels[0].len();
        self.levels[0].extend_from_slice(new_leaves);
        let mut hashes = 0u64;
        let mut level = 1usize;
        while self.levels[level - 1].len() > 1 {
            // Node j at level k covers leaves [j*2^k, (j+1)*2^k); it is
            // unchanged by an append iff that range was already full.
            let stable = if level < usize::BITS as usize {
                old_n >> level
            } else {
                0
            };
            if self.levels.len() == level {
                self.levels.push(Vec::new());
            }
            let (below, above) = self.levels.split_at_mut(level);
            let prev = &below[level - 1];
            let cur = &mut above[0];
            let width = prev.len();
            let new_width = width.div_ceil(2);
            cur.truncate(stable.min(new_width));
            for j in cur.len()..new_width {
                if 2 * j + 1 < width {
                    cur.push(self.scheme.internal(&prev[2 * j], &prev[2 * j + 1]));
                    hashes += 1;
                } else {
                    // promotion: unpaired node carried up without hashing
                    cur.push(prev[2 * j]);
                }
            }
            level += 1;
        }
        self.levels.truncate(level.max(1));
        hashes
    }

    pub fn leaf_count(&self) -> u64 {
        self.levels[0].len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.levels[0].is_empty()
    }

    /// Number of node levels, `ceil(log2(n)) + 1` for n >= 2.
    pub fn level_count(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.levels.len()
        }
    }

    pub fn levels(&self) -> &[Vec<Digest>] {
        &self.levels
    }

    pub fn leaves(&self) -> &[Digest] {
        &self.levels[0]
    }

    pub fn scheme(&self) -> HashScheme {
        self.scheme
    }

    pub fn root(&self) -> Result<Digest, MerkleError> {
        if self.is_empty() {
            return Err(MerkleError::EmptyTree);
        }
        let top = self.levels.last().expect("non-empty tree has levels");
        debug_assert_eq!(top.len(), 1);
        Ok(top[0])
    }

    /// Bottom-up sibling path for the leaf at `index`.
    pub fn generate_proof(&self, index: u64) -> Result<InclusionProof, MerkleError> {
        if index >= self.leaf_count() {
            return Err(MerkleError::IndexOutOfRange {
                index,
                leaf_count: self.leaf_count(),
            });
        }
        let mut siblings = Vec::new();
        let mut node = index as usize;
        for level in &self.levels {
            if level.len() == 1 {
                break;
            }
            if node % 2 == 0 {
                if node + 1 < level.len() {
                    siblings.push((level[node + 1], Side::Right));
                }
                // else: promoted node, no sibling at this level
            } else {
                siblings.push((level[node - 1], Side::Left));
            }
            node /= 2;
        }
        Ok(InclusionProof {
            leaf_index: index,
            tree_size: self.leaf_count(),
            siblings,
            algorithm: self.scheme.algorithm,
        })
    }
}

/// Folds the sibling path over `leaf_digest` and returns the candidate root.
///
/// Any byte-valid proof folds to some digest; mismatch against the trusted
/// root is detected by the caller's comparison.
pub fn recompute_root(leaf_digest: &Digest, proof: &InclusionProof) -> Digest {
    recompute_root_with_scheme(leaf_digest, proof, HashScheme::plain(proof.algorithm))
}

pub fn recompute_root_with_scheme(
    leaf_digest: &Digest,
    proof: &InclusionProof,
    scheme: HashScheme,
) -> Digest {
    let mut current = *leaf_digest;
    for (sibling, side) in &proof.siblings {
        current = match side {
            Side::Left => scheme.internal(sibling, &current),
            Side::Right => scheme.internal(&current, sibling),
        };
    }
    current
}
