use crate::cert::signed::sign_flat;
use crate::cert::{KeyUsage, PublicKeyEntry, SubjectInfo};
use crate::encoding::{armor, dearmor, tags, ArmorKind, TlvReader, TlvWriter};
use crate::error::{Error, Result};
use crate::hash::{sha256, Digest32};
use crate::sig::{verify, KeyPair, SignatureValue};

/// Device self-attestation, signed inside the simulated TEE with the
/// manufacturer key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttestationEvidence {
    pub hardware_ids: Vec<String>,
    pub peripheral_ids: Vec<String>,
    pub nonce: [u8; 32],
    pub tee_signature: SignatureValue,
}

impl AttestationEvidence {
    /// Bytes covered by `tee_signature`.
    pub fn signed_body(hardware_ids: &[String], peripheral_ids: &[String], nonce: &[u8; 32]) -> Vec<u8> {
        let mut w = TlvWriter::new();
        w.nested(tags::ATTESTATION, |a| Self::encode_fields(a, hardware_ids, peripheral_ids, nonce));
        w.into_bytes()
    }

    fn encode_fields(a: &mut TlvWriter, hardware_ids: &[String], peripheral_ids: &[String], nonce: &[u8; 32]) {
        a.nested(tags::HARDWARE_IDS, |l| {
            hardware_ids.iter().for_each(|id| {
                l.text(tags::ID_ITEM, id);
            })
        });
        a.nested(tags::PERIPHERAL_IDS, |l| {
            peripheral_ids.iter().for_each(|id| {
                l.text(tags::ID_ITEM, id);
            })
        });
        a.bytes(tags::NONCE, nonce);
    }

    pub fn body(&self) -> Vec<u8> {
        Self::signed_body(&self.hardware_ids, &self.peripheral_ids, &self.nonce)
    }

    /// Digest of the full evidence, recorded in the issued certificate.
    pub fn digest(&self) -> Digest32 {
        let mut w = TlvWriter::new();
        self.encode_into(&mut w);
        sha256(&w.into_bytes())
    }

    pub(crate) fn encode_into(&self, w: &mut TlvWriter) {
        w.nested(tags::ATTESTATION, |a| {
            Self::encode_fields(a, &self.hardware_ids, &self.peripheral_ids, &self.nonce);
            a.nested(tags::TEE_SIGNATURE, |s| self.tee_signature.encode_into(s));
        });
    }

    pub(crate) fn decode_from(r: &mut TlvReader<'_>) -> Result<Self> {
        let mut a = r.nested(tags::ATTESTATION)?;
        let ids = |a: &mut TlvReader<'_>, tag| -> Result<Vec<String>> {
            let mut l = a.nested(tag)?;
            let mut out = Vec::new();
            while !l.is_empty() {
                out.push(l.text(tags::ID_ITEM)?);
            }
            Ok(out)
        };
        let hardware_ids = ids(&mut a, tags::HARDWARE_IDS)?;
        let peripheral_ids = ids(&mut a, tags::PERIPHERAL_IDS)?;
        let nonce = a.array(tags::NONCE)?;
        let mut s = a.nested(tags::TEE_SIGNATURE)?;
        let tee_signature = SignatureValue::decode_from(&mut s)?;
        s.finish()?;
        a.finish()?;
        Ok(Self { hardware_ids, peripheral_ids, nonce, tee_signature })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsrBody {
    pub subject: SubjectInfo,
    pub public_keys: Vec<PublicKeyEntry>,
    pub attestation: Option<AttestationEvidence>,
}

impl CsrBody {
    pub fn canonical_encode(&self) -> Result<Vec<u8>> {
        self.subject.validate().map_err(|e| Error::Encode(e.to_string()))?;
        if self.public_keys.is_empty() {
            return Err(Error::Encode("CSR carries no public key".into()));
        }
        let mut w = TlvWriter::new();
        w.nested(tags::CSR_BODY, |b| {
            self.subject.encode_into(b, tags::SUBJECT);
            PublicKeyEntry::encode_list(&self.public_keys, b);
            if let Some(a) = &self.attestation {
                a.encode_into(b);
            }
        });
        Ok(w.into_bytes())
    }

    fn decode_from(r: &mut TlvReader<'_>) -> Result<Self> {
        let mut b = r.nested(tags::CSR_BODY)?;
        let subject = SubjectInfo::decode_from(&mut b, tags::SUBJECT)?;
        let public_keys = PublicKeyEntry::decode_list(&mut b)?;
        let attestation = if b.peek_tag() == Some(tags::ATTESTATION) {
            Some(AttestationEvidence::decode_from(&mut b)?)
        } else {
            None
        };
        b.finish()?;
        if public_keys.is_empty() {
            return Err(Error::decode("CSR carries no public key"));
        }
        Ok(Self { subject, public_keys, attestation })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateSigningRequest {
    pub body: CsrBody,
    /// `proofs[i]` is a signature over the body under `public_keys[i]`.
    pub proofs: Vec<SignatureValue>,
}

impl CertificateSigningRequest {
    /// Builds and signs a CSR. Each key proves possession over the body.
    pub fn create(
        subject: SubjectInfo,
        keys: &[&KeyPair],
        usage: KeyUsage,
        attestation: Option<AttestationEvidence>,
    ) -> Result<Self> {
        let public_keys = keys.iter().flat_map(|k| PublicKeyEntry::from_key(k, usage)).collect();
        let body = CsrBody { subject, public_keys, attestation };
        let bytes = body.canonical_encode()?;
        let mut proofs = Vec::new();
        for key in keys {
            proofs.extend(sign_flat(key, &bytes)?);
        }
        Ok(Self { body, proofs })
    }

    pub fn verify_proofs(&self) -> Result<()> {
        let bytes = self.body.canonical_encode()?;
        if self.proofs.len() != self.body.public_keys.len() {
            return Err(Error::CsrInvalid(format!(
                "{} proofs of possession for {} keys",
                self.proofs.len(),
                self.body.public_keys.len()
            )));
        }
        for (i, (entry, proof)) in self.body.public_keys.iter().zip(&self.proofs).enumerate() {
            match verify(&entry.key_bytes, &entry.descriptor, &bytes, proof) {
                Ok(true) => {}
                Ok(false) => return Err(Error::CsrInvalid(format!("proof of possession {i} does not verify"))),
                Err(e) => return Err(Error::CsrInvalid(format!("proof of possession {i}: {e}"))),
            }
        }
        Ok(())
    }

    pub fn encode(&self) -> Result<Vec<u8>> {
        let body = self.body.canonical_encode()?;
        let mut w = TlvWriter::new();
        w.nested(tags::CSR, |c| {
            c.raw(&body);
            c.nested(tags::PROOFS, |p| self.proofs.iter().for_each(|s| s.encode_into(p)));
        });
        Ok(w.into_bytes())
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = TlvReader::new(bytes);
        let mut c = r.nested(tags::CSR)?;
        let body = CsrBody::decode_from(&mut c)?;
        let mut p = c.nested(tags::PROOFS)?;
        let mut proofs = Vec::new();
        while !p.is_empty() {
            proofs.push(SignatureValue::decode_from(&mut p)?);
        }
        c.finish()?;
        r.finish()?;
        Ok(Self { body, proofs })
    }

    pub fn to_armor(&self) -> Result<String> {
        Ok(armor(ArmorKind::Csr, &self.encode()?))
    }

    pub fn from_armor(text: &str) -> Result<Self> {
        Self::decode(&dearmor(ArmorKind::Csr, text)?)
    }
}
