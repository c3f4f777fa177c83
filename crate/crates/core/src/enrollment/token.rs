//! Simulated USB hardware token that co-signs 2nd-level certificate
//! requests.

use crate::cert::{
    check_signatures_for, sign_flat, CertificateSigningRequest, KeyUsage, PublicKeyEntry, SignatureCheck,
};
use crate::encoding::{tags, TlvReader, TlvWriter};
use crate::error::Result;
use crate::hash::{sha256, Digest32};
use crate::sig::{KeyPair, SignatureValue};

#[derive(Debug)]
pub struct HardwareToken {
    keys: KeyPair,
}

impl HardwareToken {
    pub fn new(keys: KeyPair) -> Self {
        Self { keys }
    }

    pub fn public_keys(&self) -> Vec<PublicKeyEntry> {
        PublicKeyEntry::from_key(&self.keys, KeyUsage::SignData)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenApproval {
    pub request_digest: Digest32,
    pub signatures: Vec<SignatureValue>,
}

impl TokenApproval {
    /// True only for the digest the token actually approved.
    pub fn verify(&self, request_digest: &Digest32, token_keys: &[PublicKeyEntry]) -> bool {
        if &self.request_digest != request_digest {
            return false;
        }
        check_signatures_for(KeyUsage::SignData, &self.request_digest, &self.signatures, token_keys, true)
            == SignatureCheck::Valid
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut w = TlvWriter::new();
        w.nested(tags::TOKEN_APPROVAL, |a| {
            a.bytes(tags::REQUEST_DIGEST, &self.request_digest);
            self.signatures.iter().for_each(|s| s.encode_into(a));
        });
        w.into_bytes()
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = TlvReader::new(bytes);
        let mut a = r.nested(tags::TOKEN_APPROVAL)?;
        let request_digest = a.array(tags::REQUEST_DIGEST)?;
        let mut signatures = Vec::new();
        while !a.is_empty() {
            signatures.push(SignatureValue::decode_from(&mut a)?);
        }
        r.finish()?;
        Ok(Self { request_digest, signatures })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenDecision {
    Approved(TokenApproval),
    TokenRequired,
}

pub fn request_digest(request: &CertificateSigningRequest) -> Result<Digest32> {
    Ok(sha256(&request.encode()?))
}

/// Without the token plugged in nothing is signed and no state is spent.
pub fn hardware_token_confirm(
    token: &HardwareToken,
    request: &CertificateSigningRequest,
    token_present: bool,
) -> Result<TokenDecision> {
    if !token_present {
        return Ok(TokenDecision::TokenRequired);
    }
    let digest = request_digest(request)?;
    let signatures = sign_flat(&token.keys, &digest)?;
    Ok(TokenDecision::Approved(TokenApproval { request_digest: digest, signatures }))
}
