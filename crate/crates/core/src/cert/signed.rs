use crate::cert::{KeyUsage, PublicKeyEntry};
use crate::error::Result;
use crate::sig::{verify, KeyPair, SignatureValue};

/// Outcome of checking an issuer's signatures over a signed body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SignatureCheck {
    Valid,
    /// The legacy signatures hold but the post-quantum one is missing or
    /// broken while hybrid protection was demanded.
    Downgrade(String),
    Invalid(String),
}

impl SignatureCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, SignatureCheck::Valid)
    }
}

/// Signs `body` with `key`, splitting a hybrid signature into one entry per
/// component so the list lines up with [`PublicKeyEntry::from_key`].
pub(crate) fn sign_flat(key: &KeyPair, body: &[u8]) -> Result<Vec<SignatureValue>> {
    let sig = key.sign(body)?;
    Ok(match sig.components {
        Some(parts) => parts,
        None => vec![sig],
    })
}

pub(crate) fn has_post_quantum_signer(keys: &[PublicKeyEntry]) -> bool {
    keys.iter().any(|k| k.usage == KeyUsage::SignCerts && !k.quantum_vulnerable())
}

/// Matches each signature to a certificate-signing key of the same scheme.
///
/// With `require_hybrid`, every signing key must be matched by a valid
/// signature and at least one of them must be post-quantum. Without it, one
/// valid signature suffices provided no presented signature is invalid.
/// Unmatched signatures always fail.
pub fn check_signatures(
    body: &[u8],
    signatures: &[SignatureValue],
    signer_keys: &[PublicKeyEntry],
    require_hybrid: bool,
) -> SignatureCheck {
    check_signatures_for(KeyUsage::SignCerts, body, signatures, signer_keys, require_hybrid)
}

/// [`check_signatures`] against the keys carrying `usage`.
pub fn check_signatures_for(
    usage: KeyUsage,
    body: &[u8],
    signatures: &[SignatureValue],
    signer_keys: &[PublicKeyEntry],
    require_hybrid: bool,
) -> SignatureCheck {
    let signers: Vec<_> = signer_keys.iter().filter(|k| k.usage == usage).collect();
    if signers.is_empty() {
        return SignatureCheck::Invalid(format!("signer has no {} key", usage.name()));
    }
    let mut used = vec![false; signatures.len()];
    let (mut legacy_ok, mut pq_ok, mut all_ok, mut any_bad) = (false, false, true, false);
    for key in &signers {
        let slot = (0..signatures.len()).find(|&i| !used[i] && signatures[i].scheme_id == key.descriptor.id());
        let Some(i) = slot else {
            all_ok = false;
            continue;
        };
        used[i] = true;
        if let Ok(true) = verify(&key.key_bytes, &key.descriptor, body, &signatures[i]) {
            if key.quantum_vulnerable() {
                legacy_ok = true;
            } else {
                pq_ok = true;
            }
        } else {
            any_bad = true;
            all_ok = false;
        }
    }
    if used.iter().any(|u| !u) {
        return SignatureCheck::Invalid("signature without a matching issuer key".into());
    }
    if require_hybrid {
        if all_ok && pq_ok {
            SignatureCheck::Valid
        } else if legacy_ok && !pq_ok {
            SignatureCheck::Downgrade("post-quantum signature missing or invalid".into())
        } else {
            SignatureCheck::Invalid("signature does not verify".into())
        }
    } else if !any_bad && (legacy_ok || pq_ok) {
        SignatureCheck::Valid
    } else {
        SignatureCheck::Invalid("signature does not verify".into())
    }
}
