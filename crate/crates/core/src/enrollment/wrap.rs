//! Simulation-grade key wrapping for the TEE: an ephemeral toy-DL agreement
//! keys a SHA-256 stream, and a truncated hash over the plaintext detects a
//! wrong recipient.

use crate::encoding::{tags, TlvReader, TlvWriter};
use crate::error::{Error, Result};
use crate::hash::{expand, sha256_parts, xor_in_place, Digest32};
use crate::rng::SeedSource;
use crate::sig::DlGroup;

const CHECK_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TeePublicKey {
    pub group: DlGroup,
    pub value: u64,
}

/// Encryption-capable TEE key. The secret exponent never leaves the TEE.
#[derive(Clone, PartialEq, Eq)]
pub struct TeeEncryptionKey {
    group: DlGroup,
    secret: u64,
    public: u64,
}

impl std::fmt::Debug for TeeEncryptionKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TeeEncryptionKey").field("public", &self.public).finish_non_exhaustive()
    }
}

impl TeeEncryptionKey {
    pub fn generate(group: DlGroup, rng: &mut SeedSource) -> Self {
        let secret = group.random_exponent(rng);
        Self { group, secret, public: group.pow(group.g, secret) }
    }

    pub fn public(&self) -> TeePublicKey {
        TeePublicKey { group: self.group, value: self.public }
    }
}

fn kdf(shared: u64, ephemeral: u64, recipient: u64) -> Digest32 {
    sha256_parts(&[
        b"pqpki wrap",
        &DlGroup::element_bytes(shared),
        &DlGroup::element_bytes(ephemeral),
        &DlGroup::element_bytes(recipient),
    ])
}

fn check_tag(kdf: &Digest32, key: &[u8]) -> [u8; CHECK_LEN] {
    sha256_parts(&[kdf, b"check", key])[..CHECK_LEN].try_into().expect("16 bytes")
}

/// Every call draws a fresh ephemeral, so repeated wraps of one key share no
/// ciphertext bytes except by chance.
pub fn wrap_key(key: &[u8], recipient: &TeePublicKey, rng: &mut SeedSource) -> Result<Vec<u8>> {
    let group = recipient.group;
    if !group.contains(recipient.value) || recipient.value == 1 {
        return Err(Error::param("recipient key is not a subgroup element"));
    }
    let e = group.random_exponent(rng);
    let ephemeral = group.pow(group.g, e);
    let k = kdf(group.pow(recipient.value, e), ephemeral, recipient.value);
    let mut ciphertext = key.to_vec();
    xor_in_place(&mut ciphertext, &expand(&k, b"wrap pad", key.len()));
    let mut w = TlvWriter::new();
    w.nested(tags::WRAPPED_KEY, |b| {
        b.u64(tags::EPHEMERAL, ephemeral)
            .bytes(tags::CIPHERTEXT, &ciphertext)
            .bytes(tags::CHECK_TAG, &check_tag(&k, key));
    });
    Ok(w.into_bytes())
}

/// Fails with `UnwrapFailed` for a wrong key or any malformed blob.
pub fn unwrap_key(blob: &[u8], recipient: &TeeEncryptionKey) -> Result<Vec<u8>> {
    let parse = || -> Result<(u64, Vec<u8>, [u8; CHECK_LEN])> {
        let mut r = TlvReader::new(blob);
        let mut b = r.nested(tags::WRAPPED_KEY)?;
        let parts = (b.u64(tags::EPHEMERAL)?, b.read(tags::CIPHERTEXT)?.to_vec(), b.array(tags::CHECK_TAG)?);
        b.finish()?;
        r.finish()?;
        Ok(parts)
    };
    let (ephemeral, ciphertext, tag) = parse().map_err(|_| Error::UnwrapFailed)?;
    let group = recipient.group;
    if !group.contains(ephemeral) {
        return Err(Error::UnwrapFailed);
    }
    let k = kdf(group.pow(ephemeral, recipient.secret), ephemeral, recipient.public);
    let pad = expand(&k, b"wrap pad", ciphertext.len());
    let mut key = ciphertext;
    xor_in_place(&mut key, &pad);
    if check_tag(&k, &key) != tag {
        return Err(Error::UnwrapFailed);
    }
    Ok(key)
}
