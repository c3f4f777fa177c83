use std::fmt;
use std::sync::Mutex;

use crate::cert::{
    check_signatures, has_post_quantum_signer, sign_flat, Certificate, Role, SignatureCheck, SubjectInfo,
};
use crate::encoding::{armor, dearmor, tags, ArmorKind, TlvReader, TlvWriter};
use crate::error::{Error, Result};
use crate::revocation::{AccessControlList, Permission};
use crate::sig::{KeyPair, SignatureValue};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scope {
    Serial([u8; 16]),
    DeviceModel(String),
    /// Every certificate issued by this CA subject.
    Ca(SubjectInfo),
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Serial(s) => write!(f, "SERIAL({})", hex::encode(s)),
            Scope::DeviceModel(m) => write!(f, "DEVICE_MODEL({m})"),
            Scope::Ca(s) => write!(f, "CA({s})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reason {
    Compromise,
    ExpiryPolicy,
    Superseded,
}

impl Reason {
    pub fn code(self) -> u8 {
        match self {
            Reason::Compromise => 1,
            Reason::ExpiryPolicy => 2,
            Reason::Superseded => 3,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            1 => Ok(Reason::Compromise),
            2 => Ok(Reason::ExpiryPolicy),
            3 => Ok(Reason::Superseded),
            _ => Err(Error::decode(format!("unknown revocation reason {code}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Reason::Compromise => "COMPROMISE",
            Reason::ExpiryPolicy => "EXPIRY_POLICY",
            Reason::Superseded => "SUPERSEDED",
        }
    }
}

impl std::str::FromStr for Reason {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Reason::Compromise, Reason::ExpiryPolicy, Reason::Superseded]
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::param(format!("unknown revocation reason {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevocationEntry {
    pub scope: Scope,
    pub reason: Reason,
    pub revoked_at: u64,
}

impl RevocationEntry {
    pub fn matches(&self, cert: &Certificate) -> bool {
        match &self.scope {
            Scope::Serial(s) => cert.serial() == s,
            Scope::DeviceModel(m) => cert.subject().device_model.as_deref() == Some(m.as_str()),
            Scope::Ca(subject) => cert.issuer() == subject,
        }
    }

    fn encode_into(&self, w: &mut TlvWriter) {
        w.nested(tags::RL_ENTRY, |e| {
            match &self.scope {
                Scope::Serial(s) => {
                    e.bytes(tags::SCOPE_SERIAL, s);
                }
                Scope::DeviceModel(m) => {
                    e.text(tags::SCOPE_DEVICE_MODEL, m);
                }
                Scope::Ca(subject) => subject.encode_into(e, tags::SCOPE_CA),
            }
            e.u8(tags::REASON, self.reason.code()).u64(tags::REVOKED_AT, self.revoked_at);
        });
    }

    fn decode(bytes: &[u8]) -> Result<Self> {
        let mut e = TlvReader::new(bytes);
        let scope = match e.peek_tag() {
            Some(tags::SCOPE_SERIAL) => Scope::Serial(e.array(tags::SCOPE_SERIAL)?),
            Some(tags::SCOPE_DEVICE_MODEL) => Scope::DeviceModel(e.text(tags::SCOPE_DEVICE_MODEL)?),
            Some(tags::SCOPE_CA) => Scope::Ca(SubjectInfo::decode_from(&mut e, tags::SCOPE_CA)?),
            _ => return Err(Error::decode("revocation entry without a scope")),
        };
        let entry =
            Self { scope, reason: Reason::from_code(e.u8(tags::REASON)?)?, revoked_at: e.u64(tags::REVOKED_AT)? };
        e.finish()?;
        Ok(entry)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevocationListBody {
    pub version: u64,
    pub issuer: SubjectInfo,
    pub issued_at: u64,
    pub entries: Vec<RevocationEntry>,
}

impl RevocationListBody {
    pub fn canonical_encode(&self) -> Vec<u8> {
        let mut w = TlvWriter::new();
        w.nested(tags::RL_BODY, |b| {
            b.u64(tags::VERSION, self.version);
            self.issuer.encode_into(b, tags::ISSUER);
            b.u64(tags::ISSUED_AT, self.issued_at);
            b.nested(tags::RL_ENTRIES, |l| self.entries.iter().for_each(|e| e.encode_into(l)));
        });
        w.into_bytes()
    }

    fn decode_from(r: &mut TlvReader<'_>) -> Result<Self> {
        let mut b = r.nested(tags::RL_BODY)?;
        let version = b.u64(tags::VERSION)?;
        let issuer = SubjectInfo::decode_from(&mut b, tags::ISSUER)?;
        let issued_at = b.u64(tags::ISSUED_AT)?;
        let mut l = b.nested(tags::RL_ENTRIES)?;
        let entries = l.repeated(tags::RL_ENTRY)?.into_iter().map(RevocationEntry::decode).collect::<Result<_>>()?;
        l.finish()?;
        b.finish()?;
        Ok(Self { version, issuer, issued_at, entries })
    }
}

/// Root-signed, full-replacement revocation list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevocationList {
    pub body: RevocationListBody,
    /// One signature per root signing key (legacy and post-quantum for a
    /// hybrid root).
    pub signatures: Vec<SignatureValue>,
}

impl RevocationList {
    pub fn version(&self) -> u64 {
        self.body.version
    }

    /// Checks the list against `root`, which must be a self-issued maintainer
    /// certificate. A hybrid root must have signed with every key.
    pub fn verify(&self, root: &Certificate) -> SignatureCheck {
        if !root.is_self_issued() || root.subject().role != Role::Maintainer {
            return SignatureCheck::Invalid("revocation lists must be signed by the maintainer root".into());
        }
        if root.subject() != &self.body.issuer {
            return SignatureCheck::Invalid("issuer does not name the root".into());
        }
        let keys = &root.body.public_keys;
        check_signatures(&self.body.canonical_encode(), &self.signatures, keys, has_post_quantum_signer(keys))
    }

    pub fn matching_entry(&self, cert: &Certificate) -> Option<&RevocationEntry> {
        self.body.entries.iter().find(|e| e.matches(cert))
    }

    /// Scope match only; the caller is responsible for having verified the
    /// list.
    pub fn is_revoked(&self, cert: &Certificate) -> bool {
        self.matching_entry(cert).is_some()
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut w = TlvWriter::new();
        self.encode_into(&mut w);
        w.into_bytes()
    }

    pub(crate) fn encode_into(&self, w: &mut TlvWriter) {
        let body = self.body.canonical_encode();
        w.nested(tags::REVOCATION_LIST, |r| {
            r.raw(&body);
            r.nested(tags::RL_SIGNATURES, |s| self.signatures.iter().for_each(|sig| sig.encode_into(s)));
        });
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = TlvReader::new(bytes);
        let rl = Self::decode_from(&mut r)?;
        r.finish()?;
        Ok(rl)
    }

    pub(crate) fn decode_from(r: &mut TlvReader<'_>) -> Result<Self> {
        let mut c = r.nested(tags::REVOCATION_LIST)?;
        let body = RevocationListBody::decode_from(&mut c)?;
        let mut s = c.nested(tags::RL_SIGNATURES)?;
        let mut signatures = Vec::new();
        while !s.is_empty() {
            signatures.push(SignatureValue::decode_from(&mut s)?);
        }
        c.finish()?;
        Ok(Self { body, signatures })
    }

    pub fn to_armor(&self) -> String {
        armor(ArmorKind::RevocationList, &self.encode())
    }

    pub fn from_armor(text: &str) -> Result<Self> {
        Self::decode(&dearmor(ArmorKind::RevocationList, text)?)
    }
}

/// Signs a new list at `prior_version + 1`. The signer's certificate role
/// must hold `ISSUE_RL`.
pub fn issue_revocation_list(
    signer_keys: &KeyPair,
    signer_cert: &Certificate,
    acl: &AccessControlList,
    prior_version: u64,
    entries: Vec<RevocationEntry>,
    now: u64,
) -> Result<RevocationList> {
    acl.require(signer_cert.subject().role, Permission::IssueRl)?;
    let version = prior_version.checked_add(1).ok_or_else(|| Error::param("version overflow"))?;
    let body = RevocationListBody { version, issuer: signer_cert.subject().clone(), issued_at: now, entries };
    let signatures = sign_flat(signer_keys, &body.canonical_encode())?;
    Ok(RevocationList { body, signatures })
}

/// Full-replacement merge: `incoming` wins only with a valid root
/// signature and a strictly greater version.
pub fn merge_revocation_lists(
    current: &RevocationList,
    incoming: &RevocationList,
    root: &Certificate,
) -> Result<RevocationList> {
    if let SignatureCheck::Invalid(d) | SignatureCheck::Downgrade(d) = incoming.verify(root) {
        return Err(Error::SignatureInvalid(format!("incoming revocation list: {d}")));
    }
    if incoming.version() <= current.version() {
        return Err(Error::RollbackRejected { current: current.version(), incoming: incoming.version() });
    }
    Ok(incoming.clone())
}

/// A consumer's stored list. Offers are serialized, so the stored version
/// never decreases.
#[derive(Debug)]
pub struct RevocationSlot {
    root: Certificate,
    current: Mutex<Option<RevocationList>>,
}

impl RevocationSlot {
    pub fn new(root: Certificate) -> Self {
        Self { root, current: Mutex::new(None) }
    }

    pub fn root(&self) -> &Certificate {
        &self.root
    }

    pub fn current(&self) -> Option<RevocationList> {
        self.lock().clone()
    }

    /// Stored version; 0 before the first list is adopted.
    pub fn version(&self) -> u64 {
        self.lock().as_ref().map_or(0, RevocationList::version)
    }

    /// Adopts `incoming` if it is root-signed and newer. Returns the new
    /// version.
    pub fn offer(&self, incoming: &RevocationList) -> Result<u64> {
        let mut current = self.lock();
        let adopted = match current.as_ref() {
            Some(cur) => merge_revocation_lists(cur, incoming, &self.root)?,
            None => {
                if let SignatureCheck::Invalid(d) | SignatureCheck::Downgrade(d) = incoming.verify(&self.root) {
                    return Err(Error::SignatureInvalid(format!("incoming revocation list: {d}")));
                }
                if incoming.version() == 0 {
                    return Err(Error::RollbackRejected { current: 0, incoming: 0 });
                }
                incoming.clone()
            }
        };
        let version = adopted.version();
        *current = Some(adopted);
        Ok(version)
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Option<RevocationList>> {
        self.current.lock().unwrap_or_else(|p| p.into_inner())
    }
}
