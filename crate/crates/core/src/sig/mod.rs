//! Pluggable signature schemes.
//!
//! Four scheme families sit behind one descriptor-driven interface:
//!
//! * `TOY_DL`: Schnorr over a 64-bit prime field, the quantum-vulnerable
//!   legacy algorithm.
//! * `WOTS_PLUS`: Winternitz one-time signatures. A key signs exactly once.
//! * `XMSS_MT`: a Merkle tree of `2^h` WOTS+ keys. The next-leaf counter is
//!   advanced atomically *before* a signature is produced, so no two released
//!   signatures can ever share a leaf.
//! * `HYBRID`: a legacy and a post-quantum key used together; verification
//!   requires both component signatures.
//!
//! Hashing is SHA-256 truncated to `n` bytes.

mod params;
pub mod toy_dl;
mod wots;
mod xmss;

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

pub use params::{
    SchemeDescriptor, SchemeId, SchemeParams, WotsParams, XmssParams, MAX_TREE_HEIGHT, SUPPORTED_N, SUPPORTED_W,
};
pub use toy_dl::DlGroup;

use crate::encoding::{tags, TlvReader, TlvWriter};
use crate::error::{Error, Result};
use crate::hash::hash_n;
use crate::rng::SeedSource;
use wots::Wots;
use xmss::MerkleTree;

const DOMAIN_WOTS_MSG: &[u8] = b"\x08pqpki wots msg";

/// `(len1, len2, len)` for WOTS+ with hash length `n` bytes and Winternitz
/// parameter `w`.
pub fn wots_chain_lengths(n: usize, w: u16) -> Result<(usize, usize, usize)> {
    Ok(WotsParams::new(n, w)?.chain_lengths())
}

/// A key pair for any supported scheme.
///
/// Stateful keys are deliberately not `Clone`: a copied key would carry a
/// forked leaf counter. Share a key through `Arc<KeyPair>` instead.
pub struct KeyPair {
    descriptor: SchemeDescriptor,
    public_key: Vec<u8>,
    private_key: Vec<u8>,
    used: AtomicU64,
    inner: Option<Box<[KeyPair; 2]>>,
    tree: OnceLock<MerkleTree>,
}

impl fmt::Debug for KeyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KeyPair")
            .field("descriptor", &self.descriptor.display_name)
            .field("public_key", &hex::encode(&self.public_key))
            .field("signer_state", &self.signer_state())
            .finish_non_exhaustive()
    }
}

impl KeyPair {
    pub fn descriptor(&self) -> &SchemeDescriptor {
        &self.descriptor
    }

    pub fn public_key(&self) -> &[u8] {
        &self.public_key
    }

    pub fn private_key(&self) -> &[u8] {
        &self.private_key
    }

    /// Legacy and post-quantum component keys of a hybrid pair.
    pub fn components(&self) -> Option<&[KeyPair; 2]> {
        self.inner.as_deref()
    }

    /// Number of signatures this key can ever produce; `None` if unbounded.
    pub fn capacity(&self) -> Option<u64> {
        match &self.descriptor.params {
            SchemeParams::ToyDl(_) => None,
            SchemeParams::WotsPlus(_) => Some(1),
            SchemeParams::Xmss(p) => Some(p.capacity()),
            SchemeParams::Hybrid(_) => self.inner.as_ref().and_then(|i| i[1].capacity()),
        }
    }

    /// Next unused index for stateful keys (`2^h` once exhausted; for WOTS+,
    /// `1` once consumed).
    pub fn signer_state(&self) -> Option<u64> {
        match &self.descriptor.params {
            SchemeParams::ToyDl(_) => None,
            SchemeParams::WotsPlus(_) | SchemeParams::Xmss(_) => Some(self.used.load(Ordering::SeqCst)),
            SchemeParams::Hybrid(_) => self.inner.as_ref().and_then(|i| i[1].signer_state()),
        }
    }

    pub fn remaining(&self) -> Option<u64> {
        Some(self.capacity()? - self.signer_state()?)
    }

    pub fn verifying_key(&self) -> VerifyingKey {
        VerifyingKey { descriptor: self.descriptor.clone(), key_bytes: self.public_key.clone() }
    }

    /// Atomically claims the next signing index.
    fn reserve(&self) -> Result<u64> {
        let Some(capacity) = self.capacity() else { return Ok(0) };
        self.used
            .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |used| (used < capacity).then_some(used + 1))
            .map_err(|_| match self.descriptor.id() {
                SchemeId::WotsPlus => Error::OneTimeKeyReuse,
                _ => Error::StateExhausted { capacity },
            })
    }

    fn xmss_tree(&self, params: &XmssParams) -> &MerkleTree {
        let n = params.wots.n;
        self.tree.get_or_init(|| MerkleTree::build(params, &self.private_key[..n], &self.private_key[2 * n..3 * n]))
    }

    pub fn sign(&self, message: &[u8]) -> Result<SignatureValue> {
        sign(self, message)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = TlvWriter::new();
        self.encode_into(&mut w);
        w.into_bytes()
    }

    fn encode_into(&self, w: &mut TlvWriter) {
        w.nested(tags::KEY_PAIR, |k| {
            self.descriptor.encode_into(k);
            k.bytes(tags::PUBLIC_KEY, &self.public_key);
            if self.inner.is_none() {
                k.bytes(tags::PRIVATE_KEY, &self.private_key);
            }
            if matches!(self.descriptor.params, SchemeParams::WotsPlus(_) | SchemeParams::Xmss(_)) {
                k.u64(tags::SIGNER_STATE, self.used.load(Ordering::SeqCst));
            }
            if let Some(inner) = &self.inner {
                k.nested(tags::INNER_KEYS, |i| {
                    inner[0].encode_into(i);
                    inner[1].encode_into(i);
                });
            }
        });
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = TlvReader::new(bytes);
        let key = Self::decode_from(&mut r)?;
        r.finish()?;
        Ok(key)
    }

    fn decode_from(r: &mut TlvReader<'_>) -> Result<Self> {
        let mut k = r.nested(tags::KEY_PAIR)?;
        let descriptor = SchemeDescriptor::decode_from(&mut k)?;
        let public_key = k.read(tags::PUBLIC_KEY)?.to_vec();
        let private_key = k.optional(tags::PRIVATE_KEY)?.map(<[u8]>::to_vec);
        let used = k.opt_u64(tags::SIGNER_STATE)?;
        let inner = match k.optional(tags::INNER_KEYS)? {
            Some(bytes) => {
                let mut i = TlvReader::new(bytes);
                let legacy = Self::decode_from(&mut i)?;
                let pq = Self::decode_from(&mut i)?;
                i.finish()?;
                Some(Box::new([legacy, pq]))
            }
            None => None,
        };
        k.finish()?;

        let key = KeyPair {
            private_key: private_key.unwrap_or_default(),
            used: AtomicU64::new(used.unwrap_or(0)),
            descriptor,
            public_key,
            inner,
            tree: OnceLock::new(),
        };
        key.check_structure(used.is_some())?;
        Ok(key)
    }

    fn check_structure(&self, has_state: bool) -> Result<()> {
        let bad = |what: &str| Err(Error::decode(format!("{}: {what}", self.descriptor.id())));
        match &self.descriptor.params {
            SchemeParams::ToyDl(group) => {
                if self.inner.is_some() || has_state {
                    return bad("unexpected fields");
                }
                let x = toy_dl::parse_element(&self.private_key, "private key")?;
                let y = toy_dl::parse_element(&self.public_key, "public key")?;
                if x == 0 || x >= group.q || group.pow(group.g, x) != y {
                    return bad("public key does not match private key");
                }
            }
            SchemeParams::WotsPlus(p) => {
                if self.inner.is_some()
                    || !has_state
                    || self.private_key.len() != 2 * p.n
                    || self.public_key.len() != 2 * p.n
                {
                    return bad("wrong key layout");
                }
                if self.used.load(Ordering::SeqCst) > 1 {
                    return bad("signer state out of range");
                }
            }
            SchemeParams::Xmss(p) => {
                let n = p.wots.n;
                if self.inner.is_some()
                    || !has_state
                    || self.private_key.len() != 4 * n
                    || self.public_key.len() != 2 * n
                {
                    return bad("wrong key layout");
                }
                if self.private_key[3 * n..] != self.public_key[..n]
                    || self.private_key[2 * n..3 * n] != self.public_key[n..]
                {
                    return bad("public key does not match private key");
                }
                if self.used.load(Ordering::SeqCst) > p.capacity() {
                    return bad("signer state out of range");
                }
            }
            SchemeParams::Hybrid(descs) => {
                let Some(inner) = &self.inner else { return bad("missing component keys") };
                if has_state || !self.private_key.is_empty() {
                    return bad("unexpected fields");
                }
                if inner[0].descriptor != descs[0] || inner[1].descriptor != descs[1] {
                    return bad("component keys do not match descriptor");
                }
                if self.public_key != hybrid_public_key(&inner[0].public_key, &inner[1].public_key) {
                    return bad("public key does not match components");
                }
            }
        }
        Ok(())
    }
}

fn hybrid_public_key(legacy: &[u8], pq: &[u8]) -> Vec<u8> {
    let mut w = TlvWriter::new();
    w.bytes(tags::PUBLIC_KEY, legacy).bytes(tags::PUBLIC_KEY, pq);
    w.into_bytes()
}

fn split_hybrid_public_key(bytes: &[u8]) -> Result<(&[u8], &[u8])> {
    let mut r = TlvReader::new(bytes);
    let legacy = r.read(tags::PUBLIC_KEY)?;
    let pq = r.read(tags::PUBLIC_KEY)?;
    r.finish()?;
    Ok((legacy, pq))
}

/// Public half of a key pair, as distributed on its own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyingKey {
    pub descriptor: SchemeDescriptor,
    pub key_bytes: Vec<u8>,
}

impl VerifyingKey {
    pub fn verify(&self, message: &[u8], sig: &SignatureValue) -> Result<bool> {
        verify(&self.key_bytes, &self.descriptor, message, sig)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = TlvWriter::new();
        w.nested(tags::PUBLIC_KEY_FILE, |k| {
            self.descriptor.encode_into(k);
            k.bytes(tags::PUBLIC_KEY, &self.key_bytes);
        });
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = TlvReader::new(bytes);
        let mut k = r.nested(tags::PUBLIC_KEY_FILE)?;
        let descriptor = SchemeDescriptor::decode_from(&mut k)?;
        let key_bytes = k.read(tags::PUBLIC_KEY)?.to_vec();
        k.finish()?;
        r.finish()?;
        Ok(Self { descriptor, key_bytes })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureValue {
    pub scheme_id: SchemeId,
    pub payload: Vec<u8>,
    pub leaf_index: Option<u32>,
    /// Hybrid only: legacy component first, post-quantum second.
    pub components: Option<Vec<SignatureValue>>,
}

impl SignatureValue {
    fn simple(scheme_id: SchemeId, payload: Vec<u8>) -> Self {
        Self { scheme_id, payload, leaf_index: None, components: None }
    }

    /// Payload bytes, summed over components for hybrids.
    pub fn size(&self) -> usize {
        self.payload.len() + self.components.iter().flatten().map(SignatureValue::size).sum::<usize>()
    }

    pub(crate) fn encode_into(&self, w: &mut TlvWriter) {
        w.nested(tags::SIGNATURE, |s| {
            s.u8(tags::SCHEME_ID, self.scheme_id.code());
            s.bytes(tags::PAYLOAD, &self.payload);
            if let Some(i) = self.leaf_index {
                s.u32(tags::LEAF_INDEX, i);
            }
            if let Some(components) = &self.components {
                s.nested(tags::COMPONENTS, |c| components.iter().for_each(|sig| sig.encode_into(c)));
            }
        });
    }

    pub(crate) fn decode_from(r: &mut TlvReader<'_>) -> Result<Self> {
        let mut s = r.nested(tags::SIGNATURE)?;
        let scheme_id = SchemeId::from_code(s.u8(tags::SCHEME_ID)?)?;
        let payload = s.read(tags::PAYLOAD)?.to_vec();
        let leaf_index = s.opt_u32(tags::LEAF_INDEX)?;
        let components = match s.optional(tags::COMPONENTS)? {
            Some(bytes) => {
                let mut c = TlvReader::new(bytes);
                let mut list = Vec::new();
                while !c.is_empty() {
                    list.push(Self::decode_from(&mut c)?);
                }
                Some(list)
            }
            None => None,
        };
        s.finish()?;
        Ok(Self { scheme_id, payload, leaf_index, components })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = TlvWriter::new();
        self.encode_into(&mut w);
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = TlvReader::new(bytes);
        let s = Self::decode_from(&mut r)?;
        r.finish()?;
        Ok(s)
    }
}

/// Deterministic key generation from `rng`.
pub fn keygen(descriptor: &SchemeDescriptor, rng: &mut SeedSource) -> Result<KeyPair> {
    descriptor.validate()?;
    let mut key = KeyPair {
        descriptor: descriptor.clone(),
        public_key: Vec::new(),
        private_key: Vec::new(),
        used: AtomicU64::new(0),
        inner: None,
        tree: OnceLock::new(),
    };
    match &descriptor.params {
        SchemeParams::ToyDl(group) => {
            let (public, private) = toy_dl::keygen(group, rng);
            key.public_key = public;
            key.private_key = private;
        }
        SchemeParams::WotsPlus(p) => {
            let wots = Wots::new(*p);
            let sk_seed = rng.vec(p.n);
            let pub_seed = rng.vec(p.n);
            let compressed = wots.compress(&pub_seed, 0, &wots.public_ends(&sk_seed, &pub_seed, 0));
            key.private_key = [sk_seed, pub_seed.clone()].concat();
            key.public_key = [pub_seed, compressed].concat();
        }
        SchemeParams::Xmss(p) => {
            let n = p.wots.n;
            let sk_seed = rng.vec(n);
            let sk_prf = rng.vec(n);
            let pub_seed = rng.vec(n);
            let tree = MerkleTree::build(p, &sk_seed, &pub_seed);
            let root = tree.root().to_vec();
            key.private_key = [sk_seed, sk_prf, pub_seed.clone(), root.clone()].concat();
            key.public_key = [root, pub_seed].concat();
            let _ = key.tree.set(tree);
            debug_assert_eq!(key.private_key.len(), 4 * n);
        }
        SchemeParams::Hybrid(descs) => {
            let legacy = keygen(&descs[0], rng)?;
            let pq = keygen(&descs[1], rng)?;
            key.public_key = hybrid_public_key(&legacy.public_key, &pq.public_key);
            key.inner = Some(Box::new([legacy, pq]));
        }
    }
    Ok(key)
}

/// Signs `message`. Stateful keys advance their state before the signature
/// is computed; a key with no state left refuses.
pub fn sign(key: &KeyPair, message: &[u8]) -> Result<SignatureValue> {
    match &key.descriptor.params {
        SchemeParams::ToyDl(group) => {
            Ok(SignatureValue::simple(SchemeId::ToyDl, toy_dl::sign(group, &key.private_key, message)?))
        }
        SchemeParams::WotsPlus(p) => {
            key.reserve()?;
            let n = p.n;
            let wots = Wots::new(*p);
            let (sk_seed, pub_seed) = key.private_key.split_at(n);
            let digest = hash_n(n, &[DOMAIN_WOTS_MSG, &key.public_key, message]);
            Ok(SignatureValue::simple(SchemeId::WotsPlus, wots.sign(sk_seed, pub_seed, 0, &digest)))
        }
        SchemeParams::Xmss(p) => {
            let leaf = key.reserve()? as u32;
            let n = p.wots.n;
            let wots = Wots::new(p.wots);
            let tree = key.xmss_tree(p);
            let sk = &key.private_key;
            let (sk_seed, sk_prf, pub_seed, root) = (&sk[..n], &sk[n..2 * n], &sk[2 * n..3 * n], &sk[3 * n..]);
            let r = xmss::randomizer(n, sk_prf, leaf);
            let digest = xmss::message_digest(n, &r, root, leaf, message);
            let mut payload = Vec::with_capacity(p.signature_len());
            payload.extend_from_slice(&leaf.to_be_bytes());
            payload.extend_from_slice(&r);
            payload.extend(wots.sign(sk_seed, pub_seed, leaf, &digest));
            payload.extend(tree.auth_path(leaf));
            Ok(SignatureValue { scheme_id: SchemeId::XmssMt, payload, leaf_index: Some(leaf), components: None })
        }
        SchemeParams::Hybrid(_) => {
            let inner = key.inner.as_ref().ok_or_else(|| Error::param("hybrid key without components"))?;
            // The post-quantum half is the stateful one; claim it first so an
            // exhausted key releases nothing.
            let pq = sign(&inner[1], message)?;
            let legacy = sign(&inner[0], message)?;
            Ok(SignatureValue {
                scheme_id: SchemeId::Hybrid,
                payload: Vec::new(),
                leaf_index: None,
                components: Some(vec![legacy, pq]),
            })
        }
    }
}

/// Verifies `sig` over `message`. Pure: never touches signer state.
///
/// Returns `Ok(false)` for a well-formed signature that does not verify and
/// `Err(Error::Decode)` when the signature cannot be parsed for this scheme.
/// Hybrid signatures verify only if both components do.
pub fn verify(public_key: &[u8], descriptor: &SchemeDescriptor, message: &[u8], sig: &SignatureValue) -> Result<bool> {
    if sig.scheme_id != descriptor.id() {
        return Err(Error::param(format!("{} signature presented for a {} key", sig.scheme_id, descriptor.id())));
    }
    let expect_len = |len: usize| {
        if sig.payload.len() != len {
            Err(Error::decode(format!("{} payload must be {len} bytes, got {}", sig.scheme_id, sig.payload.len())))
        } else if sig.components.is_some() {
            Err(Error::decode("components on a non-hybrid signature"))
        } else {
            Ok(())
        }
    };
    match &descriptor.params {
        SchemeParams::ToyDl(group) => {
            expect_len(toy_dl::SIGNATURE_LEN)?;
            if sig.leaf_index.is_some() {
                return Err(Error::decode("leaf index on a TOY_DL signature"));
            }
            toy_dl::verify(group, public_key, message, &sig.payload)
        }
        SchemeParams::WotsPlus(p) => {
            expect_len(p.signature_len())?;
            if public_key.len() != 2 * p.n {
                return Err(Error::decode("WOTS+ public key has wrong length"));
            }
            if sig.leaf_index.is_some() {
                return Err(Error::decode("leaf index on a WOTS+ signature"));
            }
            let wots = Wots::new(*p);
            let (pub_seed, compressed) = public_key.split_at(p.n);
            let digest = hash_n(p.n, &[DOMAIN_WOTS_MSG, public_key, message]);
            let ends = wots.ends_from_signature(pub_seed, 0, &digest, &sig.payload);
            Ok(wots.compress(pub_seed, 0, &ends) == compressed)
        }
        SchemeParams::Xmss(p) => {
            expect_len(p.signature_len())?;
            let n = p.wots.n;
            if public_key.len() != 2 * n {
                return Err(Error::decode("XMSS public key has wrong length"));
            }
            let Some(claimed) = sig.leaf_index else {
                return Err(Error::decode("XMSS signature without leaf index"));
            };
            let wots = Wots::new(p.wots);
            let (root, pub_seed) = public_key.split_at(n);
            let payload = &sig.payload;
            let leaf = u32::from_be_bytes(payload[..4].try_into().expect("4 bytes"));
            if leaf != claimed || leaf as u64 >= p.capacity() {
                return Ok(false);
            }
            let r = &payload[4..4 + n];
            let chains_end = 4 + n + p.wots.signature_len();
            let digest = xmss::message_digest(n, r, root, leaf, message);
            let ends = wots.ends_from_signature(pub_seed, leaf, &digest, &payload[4 + n..chains_end]);
            let leaf_node = xmss::leaf_hash(&wots, pub_seed, leaf, &ends);
            Ok(xmss::root_from_path(n, pub_seed, leaf, leaf_node, &payload[chains_end..]) == root)
        }
        SchemeParams::Hybrid(descs) => {
            let components = match &sig.components {
                Some(c) if c.len() == 2 && sig.payload.is_empty() && sig.leaf_index.is_none() => c,
                _ => return Err(Error::decode("hybrid signature must carry exactly two components")),
            };
            if components[0].scheme_id != descs[0].id() || components[1].scheme_id != descs[1].id() {
                return Err(Error::decode("hybrid components out of order"));
            }
            let (legacy_pk, pq_pk) = split_hybrid_public_key(public_key)?;
            let legacy_ok = verify(legacy_pk, &descs[0], message, &components[0])?;
            let pq_ok = verify(pq_pk, &descs[1], message, &components[1])?;
            Ok(legacy_ok && pq_ok)
        }
    }
}

/// Checks that `bytes` is a well-formed public key for `descriptor`.
pub fn check_public_key(descriptor: &SchemeDescriptor, bytes: &[u8]) -> Result<()> {
    match &descriptor.params {
        SchemeParams::ToyDl(group) => {
            let y = toy_dl::parse_element(bytes, "public key")?;
            if !group.contains(y) {
                return Err(Error::decode("TOY_DL public key outside the subgroup"));
            }
        }
        SchemeParams::WotsPlus(WotsParams { n, .. })
        | SchemeParams::Xmss(XmssParams { wots: WotsParams { n, .. }, .. }) => {
            if bytes.len() != 2 * n {
                return Err(Error::decode(format!("{} public key must be {} bytes", descriptor.id(), 2 * n)));
            }
        }
        SchemeParams::Hybrid(descs) => {
            let (legacy, pq) = split_hybrid_public_key(bytes)?;
            check_public_key(&descs[0], legacy)?;
            check_public_key(&descs[1], pq)?;
        }
    }
    Ok(())
}

/// Splits a hybrid public key into its legacy and post-quantum parts.
pub fn hybrid_public_key_parts(public_key: &[u8]) -> Result<(Vec<u8>, Vec<u8>)> {
    split_hybrid_public_key(public_key).map(|(a, b)| (a.to_vec(), b.to_vec()))
}

/// Exhaustive discrete-log search standing in for a quantum adversary.
pub fn brute_force_dlog(public_key: &[u8], params: &SchemeParams, budget: u64) -> Result<u64> {
    let SchemeParams::ToyDl(group) = params else {
        return Err(Error::param("brute-force search only applies to TOY_DL keys"));
    };
    let y = toy_dl::parse_element(public_key, "public key")?;
    toy_dl::brute_force(group, y, budget)
}

/// Bits subtracted from `8n` for hash-based schemes. Per-address keys and
/// bitmasks in every chain step leave no multi-target loss to account for.
pub const MULTI_TARGET_LOSS_BITS: u32 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SecurityProfile {
    pub classical_bits: u32,
    pub quantum_bits: u32,
    pub quantum_vulnerable: bool,
}

/// Grover search halves brute-force security.
pub fn grover_bits(classical_bits: u32) -> u32 {
    classical_bits / 2
}

pub fn security_profile(descriptor: &SchemeDescriptor) -> SecurityProfile {
    match &descriptor.params {
        SchemeParams::ToyDl(group) => SecurityProfile {
            // Generic-group square-root bound.
            classical_bits: group.q.ilog2() / 2,
            quantum_bits: 0,
            quantum_vulnerable: true,
        },
        SchemeParams::WotsPlus(WotsParams { n, .. })
        | SchemeParams::Xmss(XmssParams { wots: WotsParams { n, .. }, .. }) => {
            let classical = 8 * *n as u32 - MULTI_TARGET_LOSS_BITS;
            SecurityProfile {
                classical_bits: classical,
                quantum_bits: grover_bits(classical),
                quantum_vulnerable: false,
            }
        }
        SchemeParams::Hybrid(descs) => {
            let profiles = descs.iter().map(security_profile).collect::<Vec<_>>();
            let quantum = profiles.iter().filter(|p| !p.quantum_vulnerable).map(|p| p.quantum_bits).min();
            SecurityProfile {
                classical_bits: profiles.iter().map(|p| p.classical_bits).max().unwrap_or(0),
                quantum_bits: quantum.unwrap_or(0),
                quantum_vulnerable: quantum.is_none(),
            }
        }
    }
}
