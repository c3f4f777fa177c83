//! SHA-256 helpers shared by the signature schemes and the protocol layers.

use sha2::{Digest, Sha256};

pub type Digest32 = [u8; 32];

pub fn sha256(data: &[u8]) -> Digest32 {
    Sha256::digest(data).into()
}

/// Hashes the concatenation of `parts` without allocating.
pub fn sha256_parts(parts: &[&[u8]]) -> Digest32 {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update(part);
    }
    hasher.finalize().into()
}

/// SHA-256 over `parts`, truncated to `n` bytes (`n <= 32`).
pub fn hash_n(n: usize, parts: &[&[u8]]) -> Vec<u8> {
    debug_assert!(n <= 32);
    sha256_parts(parts)[..n].to_vec()
}

/// Counter-mode expansion of a key into `len` bytes of keystream.
pub fn expand(key: &[u8], label: &[u8], len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(len + 32);
    let mut counter = 0u32;
    while out.len() < len {
        out.extend_from_slice(&sha256_parts(&[label, key, &counter.to_be_bytes()]));
        counter += 1;
    }
    out.truncate(len);
    out
}

pub fn xor_in_place(data: &mut [u8], pad: &[u8]) {
    for (byte, mask) in data.iter_mut().zip(pad) {
        *byte ^= mask;
    }
}
