//! WOTS+ hash chains.
//!
//! Each chain step computes `F(key_j, x XOR mask_j)` where the key and the
//! bitmask are derived from the public seed and the full chain address
//! (leaf, chain, step). Distinct addresses never share a key or mask, which
//! is what keeps multi-target attacks at the single-target bound.

use crate::hash::{hash_n, sha256_parts};
use crate::sig::params::WotsParams;

const DOMAIN_SECRET: &[u8] = b"\x00pqpki wots sk";
const DOMAIN_KEY: &[u8] = b"\x01pqpki wots key";
const DOMAIN_MASK: &[u8] = b"\x02pqpki wots mask";
const DOMAIN_F: &[u8] = b"\x03pqpki wots f";
const DOMAIN_COMPRESS: &[u8] = b"\x04pqpki wots pk";

#[derive(Debug, Clone, Copy)]
pub(crate) struct Wots {
    pub n: usize,
    w: u16,
    log_w: u32,
    len1: usize,
    len2: usize,
    pub len: usize,
}

impl Wots {
    pub fn new(params: WotsParams) -> Self {
        let (len1, len2, len) = params.chain_lengths();
        Self { n: params.n, w: params.w, log_w: params.log_w(), len1, len2, len }
    }

    fn address(leaf: u32, chain: u32, step: u32) -> [u8; 12] {
        let mut a = [0u8; 12];
        a[..4].copy_from_slice(&leaf.to_be_bytes());
        a[4..8].copy_from_slice(&chain.to_be_bytes());
        a[8..].copy_from_slice(&step.to_be_bytes());
        a
    }

    fn secret(&self, sk_seed: &[u8], leaf: u32, chain: u32) -> Vec<u8> {
        hash_n(self.n, &[DOMAIN_SECRET, sk_seed, &Self::address(leaf, chain, 0)])
    }

    fn chain(&self, pub_seed: &[u8], leaf: u32, chain: u32, x: &[u8], start: u32, steps: u32) -> Vec<u8> {
        let mut value = x.to_vec();
        for step in start..start + steps {
            let addr = Self::address(leaf, chain, step);
            let key = sha256_parts(&[DOMAIN_KEY, pub_seed, &addr]);
            let mask = sha256_parts(&[DOMAIN_MASK, pub_seed, &addr]);
            for (v, m) in value.iter_mut().zip(mask.iter()) {
                *v ^= m;
            }
            value = hash_n(self.n, &[DOMAIN_F, &key[..self.n], &value]);
        }
        value
    }

    /// Message digits in base w followed by the checksum digits.
    pub fn digits(&self, digest: &[u8]) -> Vec<u32> {
        debug_assert_eq!(digest.len(), self.n);
        let mut digits = base_w(digest, self.log_w, self.len1);
        let max = self.w as u32 - 1;
        let checksum: u32 = digits.iter().map(|d| max - d).sum();
        // Left-align the checksum in whole bytes before splitting into digits.
        let checksum_bits = self.len2 as u32 * self.log_w;
        let checksum_bytes = checksum_bits.div_ceil(8);
        let shifted = (checksum as u64) << (checksum_bytes * 8 - checksum_bits);
        let bytes = shifted.to_be_bytes();
        digits.extend(base_w(&bytes[8 - checksum_bytes as usize..], self.log_w, self.len2));
        digits
    }

    /// Concatenated chain ends (the uncompressed public key).
    pub fn public_ends(&self, sk_seed: &[u8], pub_seed: &[u8], leaf: u32) -> Vec<u8> {
        let top = self.w as u32 - 1;
        let mut out = Vec::with_capacity(self.len * self.n);
        for i in 0..self.len as u32 {
            let sk = self.secret(sk_seed, leaf, i);
            out.extend(self.chain(pub_seed, leaf, i, &sk, 0, top));
        }
        out
    }

    pub fn sign(&self, sk_seed: &[u8], pub_seed: &[u8], leaf: u32, digest: &[u8]) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len * self.n);
        for (i, d) in self.digits(digest).into_iter().enumerate() {
            let sk = self.secret(sk_seed, leaf, i as u32);
            out.extend(self.chain(pub_seed, leaf, i as u32, &sk, 0, d));
        }
        out
    }

    /// Completes every chain from the signature; equals `public_ends` for a
    /// valid signature.
    pub fn ends_from_signature(&self, pub_seed: &[u8], leaf: u32, digest: &[u8], sig: &[u8]) -> Vec<u8> {
        let top = self.w as u32 - 1;
        let mut out = Vec::with_capacity(self.len * self.n);
        for (i, (d, block)) in self.digits(digest).into_iter().zip(sig.chunks_exact(self.n)).enumerate() {
            out.extend(self.chain(pub_seed, leaf, i as u32, block, d, top - d));
        }
        out
    }

    pub fn compress(&self, pub_seed: &[u8], leaf: u32, ends: &[u8]) -> Vec<u8> {
        hash_n(self.n, &[DOMAIN_COMPRESS, pub_seed, &leaf.to_be_bytes(), ends])
    }
}

fn base_w(bytes: &[u8], log_w: u32, count: usize) -> Vec<u32> {
    let mask = (1u32 << log_w) - 1;
    let mut out = Vec::with_capacity(count);
    let mut acc = 0u32;
    let mut bits = 0u32;
    let mut iter = bytes.iter();
    while out.len() < count {
        if bits < log_w {
            acc = (acc << 8) | *iter.next().unwrap_or(&0) as u32;
            bits += 8;
        }
        bits -= log_w;
        out.push((acc >> bits) & mask);
        acc &= (1u32 << bits) - 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_w_splits_nibbles() {
        assert_eq!(base_w(&[0x12, 0x34], 4, 4), vec![1, 2, 3, 4]);
        assert_eq!(base_w(&[0b1110_0100], 2, 4), vec![3, 2, 1, 0]);
        assert_eq!(base_w(&[7, 9], 8, 2), vec![7, 9]);
    }

    #[test]
    fn checksum_digits_cover_worst_case() {
        for w in [4u16, 16, 256] {
            let wots = Wots::new(WotsParams::new(32, w).unwrap());
            let zeros = vec![0u8; 32];
            let digits = wots.digits(&zeros);
            assert_eq!(digits.len(), wots.len);
            // All-zero message digits maximise the checksum; it must round-trip.
            let max = (w as u32 - 1) * wots.len1 as u32;
            let value = digits[wots.len1..].iter().fold(0u64, |acc, d| (acc << wots.log_w) | *d as u64);
            assert_eq!(value, max as u64);
            assert!(digits.iter().all(|d| *d < w as u32));
        }
    }

    #[test]
    fn chains_compose() {
        let wots = Wots::new(WotsParams::new(16, 16).unwrap());
        let seed = [3u8; 16];
        let x = [9u8; 16];
        let two_then_three = wots.chain(&seed, 0, 5, &wots.chain(&seed, 0, 5, &x, 0, 2), 2, 3);
        assert_eq!(two_then_three, wots.chain(&seed, 0, 5, &x, 0, 5));
    }

    #[test]
    fn signature_completes_to_public_ends() {
        let wots = Wots::new(WotsParams::new(16, 4).unwrap());
        let (sk, ps) = ([1u8; 16], [2u8; 16]);
        let digest = [0xa5u8; 16];
        let sig = wots.sign(&sk, &ps, 3, &digest);
        assert_eq!(sig.len(), wots.len * 16);
        assert_eq!(wots.ends_from_signature(&ps, 3, &digest, &sig), wots.public_ends(&sk, &ps, 3));
    }
}
