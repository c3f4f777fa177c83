use std::fmt::Write as _;

use crate::cert::{Extensions, KeyUsage, PublicKeyEntry, SubjectInfo};
use crate::encoding::{armor, dearmor, tags, ArmorKind, TlvReader, TlvWriter};
use crate::error::{Error, Result};
use crate::hash::{sha256, Digest32};
use crate::sig::SignatureValue;

pub const CERT_VERSION: u32 = 1;

/// Everything a certificate's signatures cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateBody {
    pub version: u32,
    pub serial: [u8; 16],
    pub issuer: SubjectInfo,
    pub subject: SubjectInfo,
    pub not_before: u64,
    pub not_after: u64,
    pub public_keys: Vec<PublicKeyEntry>,
    pub extensions: Extensions,
}

impl CertificateBody {
    fn check(&self) -> Result<()> {
        self.issuer.validate()?;
        self.subject.validate()?;
        if self.not_before >= self.not_after {
            return Err(Error::param("notBefore must precede notAfter"));
        }
        if self.public_keys.is_empty() {
            return Err(Error::param("certificate carries no public key"));
        }
        if self.extensions.hybrid_required() && self.public_keys.iter().all(PublicKeyEntry::quantum_vulnerable) {
            return Err(Error::param("hybrid-required certificate without a post-quantum key"));
        }
        Ok(())
    }

    /// Deterministic encoding of the signed portion.
    pub fn canonical_encode(&self) -> Result<Vec<u8>> {
        self.check().map_err(|e| Error::Encode(e.to_string()))?;
        let mut w = TlvWriter::new();
        self.encode_into(&mut w);
        Ok(w.into_bytes())
    }

    fn encode_into(&self, w: &mut TlvWriter) {
        w.nested(tags::CERT_BODY, |b| {
            b.u32(tags::VERSION, self.version).bytes(tags::SERIAL, &self.serial);
            self.issuer.encode_into(b, tags::ISSUER);
            self.subject.encode_into(b, tags::SUBJECT);
            b.u64(tags::NOT_BEFORE, self.not_before).u64(tags::NOT_AFTER, self.not_after);
            PublicKeyEntry::encode_list(&self.public_keys, b);
            self.extensions.encode_into(b);
        });
    }

    fn decode_from(r: &mut TlvReader<'_>) -> Result<Self> {
        let mut b = r.nested(tags::CERT_BODY)?;
        let body = Self {
            version: b.u32(tags::VERSION)?,
            serial: b.array(tags::SERIAL)?,
            issuer: SubjectInfo::decode_from(&mut b, tags::ISSUER)?,
            subject: SubjectInfo::decode_from(&mut b, tags::SUBJECT)?,
            not_before: b.u64(tags::NOT_BEFORE)?,
            not_after: b.u64(tags::NOT_AFTER)?,
            public_keys: PublicKeyEntry::decode_list(&mut b)?,
            extensions: Extensions::decode_from(&mut b)?,
        };
        b.finish()?;
        if body.version != CERT_VERSION {
            return Err(Error::decode(format!("unsupported certificate version {}", body.version)));
        }
        body.check().map_err(|e| Error::decode(e.to_string()))?;
        Ok(body)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub body: CertificateBody,
    /// One entry per issuer certificate-signing key; hybrid issuers
    /// contribute their legacy and post-quantum signatures separately.
    pub signatures: Vec<SignatureValue>,
}

impl Certificate {
    pub fn serial(&self) -> &[u8; 16] {
        &self.body.serial
    }

    pub fn subject(&self) -> &SubjectInfo {
        &self.body.subject
    }

    pub fn issuer(&self) -> &SubjectInfo {
        &self.body.issuer
    }

    pub fn path_len(&self) -> u8 {
        self.body.extensions.path_len()
    }

    pub fn is_self_issued(&self) -> bool {
        self.body.issuer == self.body.subject
    }

    pub fn can_sign_certs(&self) -> bool {
        self.body.public_keys.iter().any(|k| k.usage == KeyUsage::SignCerts)
    }

    pub fn keys_with_usage(&self, usage: KeyUsage) -> impl Iterator<Item = &PublicKeyEntry> {
        self.body.public_keys.iter().filter(move |k| k.usage == usage)
    }

    pub fn encode(&self) -> Result<Vec<u8>> {
        let body = self.body.canonical_encode()?;
        let mut w = TlvWriter::new();
        w.nested(tags::CERTIFICATE, |c| {
            c.raw(&body);
            c.nested(tags::SIGNATURE_LIST, |s| self.signatures.iter().for_each(|sig| sig.encode_into(s)));
        });
        Ok(w.into_bytes())
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = TlvReader::new(bytes);
        let mut c = r.nested(tags::CERTIFICATE)?;
        let body = CertificateBody::decode_from(&mut c)?;
        let mut list = c.nested(tags::SIGNATURE_LIST)?;
        let mut signatures = Vec::new();
        while !list.is_empty() {
            signatures.push(SignatureValue::decode_from(&mut list)?);
        }
        c.finish()?;
        r.finish()?;
        Ok(Self { body, signatures })
    }

    pub fn to_armor(&self) -> Result<String> {
        Ok(armor(ArmorKind::Certificate, &self.encode()?))
    }

    pub fn from_armor(text: &str) -> Result<Self> {
        Self::decode(&dearmor(ArmorKind::Certificate, text)?)
    }

    /// Field-by-field listing with the corresponding X.509 notions.
    pub fn describe(&self) -> String {
        let b = &self.body;
        let mut out = String::new();
        let _ = writeln!(out, "version           {:<40} [X.509 Version]", b.version);
        let _ = writeln!(out, "certSerial        {:<40} [X.509 serialNumber]", hex::encode(b.serial));
        let _ = writeln!(out, "issuer            {:<40} [X.509 issuer Name]", b.issuer.to_string());
        let _ = writeln!(out, "subject           {:<40} [X.509 subject Name]", b.subject.to_string());
        let _ = writeln!(out, "notBefore         {:<40} [X.509 Validity, UTC seconds]", b.not_before);
        let _ = writeln!(out, "notAfter          {:<40} [X.509 Validity, UTC seconds]", b.not_after);
        for (i, k) in b.public_keys.iter().enumerate() {
            let x509 = if i == 0 { "subjectPublicKeyInfo" } else { "alternative public key extension" };
            let text = format!("{} {}", k.descriptor.display_name, k.usage.name());
            let _ = writeln!(out, "publicKeys[{i}]     {text:<40} [X.509 {x509}]");
        }
        let _ = writeln!(
            out,
            "pathLen           {:<40} [X.509 BasicConstraints pathLenConstraint]",
            b.extensions.path_len()
        );
        let _ = writeln!(out, "hybridRequired    {:<40} [critical private extension]", b.extensions.hybrid_required());
        if let Some(d) = b.extensions.attestation_digest() {
            let _ = writeln!(out, "attestationDigest {:<40} [private extension]", hex::encode(d));
        }
        if let Some(s) = b.extensions.service_zone_state() {
            let _ = writeln!(out, "serviceZoneState  {s:<40} [private extension]");
        }
        if let Some(d) = b.extensions.device_binding() {
            let _ = writeln!(out, "deviceBinding     {:<40} [private extension]", hex::encode(d));
        }
        for (i, s) in self.signatures.iter().enumerate() {
            let x509 = if i == 0 { "signatureValue" } else { "alternative signature extension" };
            let text = format!("{} ({} bytes)", s.scheme_id, s.size());
            let _ = writeln!(out, "signatures[{i}]     {text:<40} [X.509 {x509}]");
        }
        out
    }
}

/// SHA-256 over the full encoding, signatures included.
pub fn pin_digest(cert: &Certificate) -> Result<Digest32> {
    Ok(sha256(&cert.encode()?))
}
