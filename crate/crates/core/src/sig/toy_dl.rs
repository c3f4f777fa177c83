//! Schnorr signatures over a prime-order subgroup of `Z_p^*` with 64-bit `p`.
//!
//! This is a desk-scale stand-in for the quantum-vulnerable legacy algorithms
//! (RSA, ECDSA) that real PKIs use today: the group is small enough that the
//! breakable preset falls to exhaustive search in well under a second, which
//! is what the store-now-decrypt-later demonstration relies on.

use crate::error::{Error, Result};
use crate::hash::sha256_parts;
use crate::rng::SeedSource;

/// `e || s`, 8 bytes each.
pub const SIGNATURE_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DlGroup {
    pub p: u64,
    pub q: u64,
    pub g: u64,
}

impl DlGroup {
    /// Safe-prime group: `p = 2q + 1`, 63-bit `q`.
    pub const fn standard() -> Self {
        Self { p: 0xffff_ffff_ffff_fa43, q: 0x7fff_ffff_ffff_fd21, g: 4 }
    }

    /// 64-bit `p` with a 21-bit subgroup order; recoverable by brute force.
    pub const fn breakable() -> Self {
        Self { p: 0x8000_0000_139f_f7a3, q: 0x1f_fff7, g: 0x6d6e_906a_6d2c_4051 }
    }

    /// 64-bit `p` with a 40-bit subgroup order.
    pub const fn medium() -> Self {
        Self { p: 0x8000_09ff_d47f_fc9b, q: 0xff_ffff_ffa9, g: 0x7236_e158_5ade_c563 }
    }

    /// Deterministic parameter search: the largest prime `q < 2^q_bits` for
    /// which some even `k` gives a 64-bit prime `p = kq + 1`, then the first
    /// `h = 2, 3, ...` with `g = h^((p-1)/q) != 1`.
    pub fn search(q_bits: u32) -> Result<Self> {
        if !(8..=63).contains(&q_bits) {
            return Err(Error::param(format!("subgroup order of {q_bits} bits unsupported")));
        }
        let mut q = prev_prime(1u64 << q_bits);
        loop {
            let mut k = (1u64 << 63).div_ceil(q);
            k += k % 2;
            for _ in 0..4000 {
                let Some(p) = k.checked_mul(q).and_then(|v| v.checked_add(1)) else { break };
                if is_prime(p) {
                    let cofactor = (p - 1) / q;
                    let g = (2..).map(|h| pow_mod(h, cofactor, p)).find(|&g| g != 1).expect("generator");
                    return Ok(Self { p, q, g });
                }
                k += 2;
            }
            q = prev_prime(q);
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 5 || self.q < 2 || self.g < 2 {
            return Err(Error::param("group parameters must be positive and non-trivial"));
        }
        if !is_prime(self.p) || !is_prime(self.q) {
            return Err(Error::param("p and q must be prime"));
        }
        if !(self.p - 1).is_multiple_of(self.q) {
            return Err(Error::param("q must divide p - 1"));
        }
        if self.g >= self.p || pow_mod(self.g, self.q, self.p) != 1 {
            return Err(Error::param("g must have order q"));
        }
        Ok(())
    }

    pub fn pow(&self, base: u64, exp: u64) -> u64 {
        pow_mod(base, exp, self.p)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.p)
    }

    /// Element of the order-`q` subgroup (excludes the identity check).
    pub fn contains(&self, y: u64) -> bool {
        y != 0 && y < self.p && self.pow(y, self.q) == 1
    }

    fn reduce(&self, digest: &[u8; 32]) -> u64 {
        let wide = u128::from_be_bytes(digest[..16].try_into().expect("16 bytes"));
        (wide % self.q as u128) as u64
    }

    pub fn random_exponent(&self, rng: &mut SeedSource) -> u64 {
        loop {
            let x = self.reduce(&rng.bytes::<32>());
            if x != 0 {
                return x;
            }
        }
    }

    /// Keystream-ready encoding of a group element.
    pub fn element_bytes(y: u64) -> [u8; 8] {
        y.to_be_bytes()
    }
}

pub(crate) fn keygen(group: &DlGroup, rng: &mut SeedSource) -> (Vec<u8>, Vec<u8>) {
    let x = group.random_exponent(rng);
    let y = group.pow(group.g, x);
    (y.to_be_bytes().to_vec(), x.to_be_bytes().to_vec())
}

pub(crate) fn parse_element(bytes: &[u8], what: &str) -> Result<u64> {
    let arr: [u8; 8] =
        bytes.try_into().map_err(|_| Error::decode(format!("{what}: expected 8 bytes, got {}", bytes.len())))?;
    Ok(u64::from_be_bytes(arr))
}

fn challenge(group: &DlGroup, r: u64, y: u64, message: &[u8]) -> u64 {
    group.reduce(&sha256_parts(&[b"pqpki toy-dl challenge", &r.to_be_bytes(), &y.to_be_bytes(), message]))
}

pub(crate) fn sign(group: &DlGroup, private_key: &[u8], message: &[u8]) -> Result<Vec<u8>> {
    let x = parse_element(private_key, "toy-dl private key")?;
    let y = group.pow(group.g, x);
    // Deterministic nonce bound to the key and message.
    let mut k = group.reduce(&sha256_parts(&[b"pqpki toy-dl nonce", private_key, message]));
    if k == 0 {
        k = 1;
    }
    let r = group.pow(group.g, k);
    let e = challenge(group, r, y, message);
    let s = ((k as u128 + mul_mod(x, e, group.q) as u128) % group.q as u128) as u64;
    let mut out = Vec::with_capacity(SIGNATURE_LEN);
    out.extend_from_slice(&e.to_be_bytes());
    out.extend_from_slice(&s.to_be_bytes());
    Ok(out)
}

pub(crate) fn verify(group: &DlGroup, public_key: &[u8], message: &[u8], payload: &[u8]) -> Result<bool> {
    if payload.len() != SIGNATURE_LEN {
        return Err(Error::decode(format!("toy-dl signature must be {SIGNATURE_LEN} bytes")));
    }
    let y = parse_element(public_key, "toy-dl public key")?;
    let e = u64::from_be_bytes(payload[..8].try_into().expect("8 bytes"));
    let s = u64::from_be_bytes(payload[8..].try_into().expect("8 bytes"));
    if !group.contains(y) || e >= group.q || s >= group.q {
        return Ok(false);
    }
    // r = g^s * y^(-e)
    let r = group.mul(group.pow(group.g, s), group.pow(y, group.q - e));
    Ok(challenge(group, r, y, message) == e)
}

/// Exhaustive search for `x` with `g^x = y`, spending at most `budget` group
/// multiplications.
pub fn brute_force(group: &DlGroup, y: u64, budget: u64) -> Result<u64> {
    if !group.contains(y) {
        return Err(Error::param("public value is not in the order-q subgroup"));
    }
    let mut current = 1u64;
    // One multiplication per candidate, so `x` doubles as the spend.
    for x in 0..group.q {
        if current == y {
            if group.pow(group.g, x) != y {
                return Err(Error::Infeasible { budget });
            }
            return Ok(x);
        }
        if x == budget {
            return Err(Error::Infeasible { budget });
        }
        current = group.mul(current, group.g);
    }
    Err(Error::Infeasible { budget })
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; these bases are exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn prev_prime(mut n: u64) -> u64 {
    loop {
        n -= 1;
        if is_prime(n) {
            return n;
        }
    }
}
