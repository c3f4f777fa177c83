//! Merkle tree over WOTS+ public keys.

use crate::hash::hash_n;
use crate::sig::params::XmssParams;
use crate::sig::wots::Wots;

const DOMAIN_NODE: &[u8] = b"\x05pqpki xmss node";
const DOMAIN_PRF: &[u8] = b"\x06pqpki xmss prf";
const DOMAIN_MSG: &[u8] = b"\x07pqpki xmss msg";

/// All tree levels, leaves first. Each level is a flat run of `n`-byte nodes.
#[derive(Debug)]
pub(crate) struct MerkleTree {
    n: usize,
    levels: Vec<Vec<u8>>,
}

impl MerkleTree {
    pub fn build(params: &XmssParams, sk_seed: &[u8], pub_seed: &[u8]) -> Self {
        let n = params.wots.n;
        let wots = Wots::new(params.wots);
        let leaves = params.capacity() as u32;
        let mut level = Vec::with_capacity(leaves as usize * n);
        for leaf in 0..leaves {
            level.extend(leaf_hash(&wots, pub_seed, leaf, &wots.public_ends(sk_seed, pub_seed, leaf)));
        }
        let mut levels = vec![level];
        for height in 1..=params.h as u32 {
            let below = levels.last().expect("non-empty");
            let mut next = Vec::with_capacity(below.len() / 2);
            for (index, pair) in below.chunks_exact(2 * n).enumerate() {
                next.extend(node_hash(n, pub_seed, height, index as u32, &pair[..n], &pair[n..]));
            }
            levels.push(next);
        }
        Self { n, levels }
    }

    pub fn root(&self) -> &[u8] {
        self.levels.last().expect("non-empty")
    }

    pub fn auth_path(&self, leaf: u32) -> Vec<u8> {
        let n = self.n;
        let mut path = Vec::with_capacity((self.levels.len() - 1) * n);
        let mut index = leaf as usize;
        for level in &self.levels[..self.levels.len() - 1] {
            let sibling = index ^ 1;
            path.extend_from_slice(&level[sibling * n..(sibling + 1) * n]);
            index >>= 1;
        }
        path
    }
}

pub(crate) fn leaf_hash(wots: &Wots, pub_seed: &[u8], leaf: u32, ends: &[u8]) -> Vec<u8> {
    wots.compress(pub_seed, leaf, ends)
}

fn node_hash(n: usize, pub_seed: &[u8], height: u32, index: u32, left: &[u8], right: &[u8]) -> Vec<u8> {
    hash_n(n, &[DOMAIN_NODE, pub_seed, &height.to_be_bytes(), &index.to_be_bytes(), left, right])
}

pub(crate) fn root_from_path(n: usize, pub_seed: &[u8], leaf: u32, leaf_node: Vec<u8>, path: &[u8]) -> Vec<u8> {
    let mut node = leaf_node;
    let mut index = leaf;
    for (i, sibling) in path.chunks_exact(n).enumerate() {
        let height = i as u32 + 1;
        node = if index & 1 == 0 {
            node_hash(n, pub_seed, height, index >> 1, &node, sibling)
        } else {
            node_hash(n, pub_seed, height, index >> 1, sibling, &node)
        };
        index >>= 1;
    }
    node
}

pub(crate) fn randomizer(n: usize, sk_prf: &[u8], leaf: u32) -> Vec<u8> {
    hash_n(n, &[DOMAIN_PRF, sk_prf, &leaf.to_be_bytes()])
}

pub(crate) fn message_digest(n: usize, randomizer: &[u8], root: &[u8], leaf: u32, message: &[u8]) -> Vec<u8> {
    hash_n(n, &[DOMAIN_MSG, randomizer, root, &leaf.to_be_bytes(), message])
}
