use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use crate::cert::signed::{has_post_quantum_signer, sign_flat};
use crate::cert::{
    pin_digest, Certificate, CertificateBody, CertificateSigningRequest, Extension, Extensions, KeyUsage,
    PublicKeyEntry, Role, SubjectInfo, CERT_VERSION,
};
use crate::encoding::{read_records, tags, write_record, TlvReader, TlvWriter};
use crate::error::{Error, Result};
use crate::hash::sha256_parts;
use crate::sig::KeyPair;

/// Root CA depth: root, production line, device.
pub const ROOT_PATH_LEN: u8 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IssueProfile {
    pub ttl_seconds: u64,
    pub hybrid_required: bool,
    /// Usage stamped on every subject key.
    pub usage: KeyUsage,
    pub service_zone_state: Option<String>,
}

impl IssueProfile {
    pub fn end_entity(ttl_seconds: u64) -> Self {
        Self { ttl_seconds, hybrid_required: false, usage: KeyUsage::SignData, service_zone_state: None }
    }

    pub fn sub_ca(ttl_seconds: u64) -> Self {
        Self { ttl_seconds, hybrid_required: true, usage: KeyUsage::SignCerts, service_zone_state: None }
    }

    pub fn hybrid_required(mut self, on: bool) -> Self {
        self.hybrid_required = on;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JournalRecord {
    pub serial: [u8; 16],
    pub subject: SubjectInfo,
    pub not_after: u64,
}

impl JournalRecord {
    pub fn encode(&self) -> Vec<u8> {
        let mut w = TlvWriter::new();
        w.nested(tags::JOURNAL_RECORD, |r| {
            r.bytes(tags::SERIAL, &self.serial);
            self.subject.encode_into(r, tags::SUBJECT);
            r.u64(tags::NOT_AFTER, self.not_after);
        });
        w.into_bytes()
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut outer = TlvReader::new(bytes);
        let mut r = outer.nested(tags::JOURNAL_RECORD)?;
        let rec = Self {
            serial: r.array(tags::SERIAL)?,
            subject: SubjectInfo::decode_from(&mut r, tags::SUBJECT)?,
            not_after: r.u64(tags::NOT_AFTER)?,
        };
        r.finish()?;
        outer.finish()?;
        Ok(rec)
    }
}

#[derive(Debug, Default)]
struct JournalState {
    records: Vec<JournalRecord>,
    path: Option<PathBuf>,
}

/// Append-only record of everything an issuer has signed.
///
/// The record count doubles as the serial counter; both change only under
/// the lock, so serials stay unique under concurrent issuance.
#[derive(Debug, Default)]
pub struct IssuanceJournal {
    state: Mutex<JournalState>,
}

impl IssuanceJournal {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens (or creates) a journal file and replays its records.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let records = match std::fs::read_to_string(&path) {
            Ok(text) => read_records(&text)?.iter().map(|r| JournalRecord::decode(r)).collect::<Result<_>>()?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(e.into()),
        };
        Ok(Self { state: Mutex::new(JournalState { records, path: Some(path) }) })
    }

    pub fn records(&self) -> Vec<JournalRecord> {
        self.lock().records.clone()
    }

    pub fn len(&self) -> usize {
        self.lock().records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, JournalState> {
        self.state.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
    }

    /// Runs `issue` with the next counter value and records its result.
    fn append(&self, issue: impl FnOnce(u64) -> Result<Certificate>) -> Result<Certificate> {
        let mut state = self.lock();
        let cert = issue(state.records.len() as u64)?;
        let record =
            JournalRecord { serial: *cert.serial(), subject: cert.subject().clone(), not_after: cert.body.not_after };
        if let Some(path) = &state.path {
            let mut file = OpenOptions::new().create(true).append(true).open(path)?;
            file.write_all(write_record(&record.encode()).as_bytes())?;
        }
        state.records.push(record);
        Ok(cert)
    }
}

fn derive_serial(issuer_pin: &[u8], counter: u64) -> [u8; 16] {
    let d = sha256_parts(&[b"pqpki serial", issuer_pin, &counter.to_be_bytes()]);
    d[..16].try_into().expect("16 bytes")
}

fn sign_body(body: CertificateBody, key: &KeyPair) -> Result<Certificate> {
    let bytes = body.canonical_encode()?;
    let signatures = sign_flat(key, &bytes)?;
    Ok(Certificate { body, signatures })
}

fn check_ca(ca_keys: &KeyPair, ca_cert: &Certificate, profile: &IssueProfile, now: u64) -> Result<()> {
    let signer_entries: Vec<_> = ca_cert.keys_with_usage(KeyUsage::SignCerts).cloned().collect();
    if signer_entries.is_empty() {
        return Err(Error::CaIneligible("certificate lacks SIGN_CERTS usage".into()));
    }
    if PublicKeyEntry::from_key(ca_keys, KeyUsage::SignCerts) != signer_entries {
        return Err(Error::CaIneligible("signing key does not match the CA certificate".into()));
    }
    if ca_cert.path_len() == 0 {
        return Err(Error::CaIneligible("pathLen 0 forbids issuing certificates".into()));
    }
    if profile.usage == KeyUsage::SignCerts && ca_cert.path_len() < 2 {
        return Err(Error::CaIneligible("pathLen too small to issue a CA certificate".into()));
    }
    if now < ca_cert.body.not_before || now > ca_cert.body.not_after {
        return Err(Error::CaIneligible("CA certificate is outside its validity window".into()));
    }
    if profile.hybrid_required && !has_post_quantum_signer(&signer_entries) {
        return Err(Error::CaIneligible("hybrid-required issuance needs a post-quantum CA key".into()));
    }
    Ok(())
}

/// Issues a certificate for `csr` under `ca_cert`, valid from `now` for
/// `profile.ttl_seconds`.
pub fn issue_certificate(
    ca_keys: &KeyPair,
    ca_cert: &Certificate,
    journal: &IssuanceJournal,
    csr: &CertificateSigningRequest,
    profile: &IssueProfile,
    now: u64,
) -> Result<Certificate> {
    csr.verify_proofs()?;
    check_ca(ca_keys, ca_cert, profile, now)?;
    if profile.ttl_seconds == 0 {
        return Err(Error::param("ttl must be positive"));
    }
    let not_after = now.checked_add(profile.ttl_seconds).ok_or_else(|| Error::param("ttl overflows"))?;
    if profile.hybrid_required && csr.body.public_keys.iter().all(PublicKeyEntry::quantum_vulnerable) {
        return Err(Error::CsrInvalid("hybrid-required profile needs a post-quantum subject key".into()));
    }

    let mut extensions = Extensions::new();
    let path_len = if profile.usage == KeyUsage::SignCerts { ca_cert.path_len() - 1 } else { 0 };
    extensions.insert(Extension::PathLen(path_len));
    if profile.hybrid_required {
        extensions.insert(Extension::HybridRequired(true));
    }
    if let Some(a) = &csr.body.attestation {
        extensions.insert(Extension::AttestationDigest(a.digest()));
    }
    if let Some(s) = &profile.service_zone_state {
        extensions.insert(Extension::ServiceZoneState(s.clone()));
    }
    let public_keys =
        csr.body.public_keys.iter().map(|k| PublicKeyEntry { usage: profile.usage, ..k.clone() }).collect();
    let issuer_pin = pin_digest(ca_cert)?;

    journal.append(|counter| {
        let body = CertificateBody {
            version: CERT_VERSION,
            serial: derive_serial(&issuer_pin, counter),
            issuer: ca_cert.subject().clone(),
            subject: csr.body.subject.clone(),
            not_before: now,
            not_after,
            public_keys,
            extensions,
        };
        sign_body(body, ca_keys)
    })
}

/// Self-signed maintainer root with `pathLen` 2.
pub fn self_sign_root(keys: &KeyPair, subject: SubjectInfo, ttl_seconds: u64, now: u64) -> Result<Certificate> {
    if subject.role != Role::Maintainer {
        return Err(Error::param(format!("root subject must be MAINTAINER, got {}", subject.role)));
    }
    if ttl_seconds == 0 {
        return Err(Error::param("ttl must be positive"));
    }
    let public_keys = PublicKeyEntry::from_key(keys, KeyUsage::SignCerts);
    let mut extensions = Extensions::new();
    extensions.insert(Extension::PathLen(ROOT_PATH_LEN));
    if public_keys.len() > 1 && has_post_quantum_signer(&public_keys) {
        extensions.insert(Extension::HybridRequired(true));
    }
    let body = CertificateBody {
        version: CERT_VERSION,
        serial: derive_serial(keys.public_key(), now),
        issuer: subject.clone(),
        subject,
        not_before: now,
        not_after: now.checked_add(ttl_seconds).ok_or_else(|| Error::param("ttl overflows"))?,
        public_keys,
        extensions,
    };
    sign_body(body, keys)
}

/// A signing key, its certificate and its journal.
#[derive(Debug)]
pub struct CertificateAuthority {
    pub keys: Arc<KeyPair>,
    pub cert: Certificate,
    pub journal: IssuanceJournal,
}

impl CertificateAuthority {
    pub fn new(keys: Arc<KeyPair>, cert: Certificate) -> Self {
        Self { keys, cert, journal: IssuanceJournal::in_memory() }
    }

    pub fn issue(&self, csr: &CertificateSigningRequest, profile: &IssueProfile, now: u64) -> Result<Certificate> {
        issue_certificate(&self.keys, &self.cert, &self.journal, csr, profile, now)
    }
}
