//! Symmetric key server: salted password-hash authentication and the
//! injection-report registry the frontend consults during operator
//! enrollment.
//!
//! Password storage is a single salted SHA-256, which is simulation grade
//! and not suitable for real credentials. The server bounds the number of
//! requests in flight and refuses beyond it with `Overloaded`.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Mutex, MutexGuard};

use subtle::ConstantTimeEq;

use crate::cert::Role;
use crate::encoding::{read_records, tags, write_record, TlvReader, TlvWriter};
use crate::error::{Error, Result};
use crate::hash::{sha256_parts, Digest32};
use crate::revocation::{AccessControlList, Permission};
use crate::rng::SeedSource;

pub const DEFAULT_MAX_PENDING: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CredentialRecord {
    pub role: Role,
    pub salt: [u8; 16],
    pub password_hash: Digest32,
}

fn password_hash(salt: &[u8; 16], password: &str) -> Digest32 {
    sha256_parts(&[salt, password.as_bytes()])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionToken {
    pub party_id: String,
    pub issued_at: u64,
    pub expires_at: u64,
    pub token_bytes: [u8; 32],
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct TokenRecord {
    party_id: String,
    expires_at: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InjectionReport {
    pub reporter: String,
    pub device_serial: String,
    pub cert_serial: [u8; 16],
    pub reported_at: u64,
}

#[derive(Debug, Default)]
struct State {
    credentials: BTreeMap<String, CredentialRecord>,
    /// Keyed by SHA-256 of the token; raw tokens are never stored.
    tokens: HashMap<Digest32, TokenRecord>,
    reports: Vec<InjectionReport>,
}

#[derive(Debug)]
pub struct KeyServer {
    state: Mutex<State>,
    rng: Mutex<SeedSource>,
    acl: AccessControlList,
    max_pending: usize,
    pending: AtomicUsize,
}

struct Admission<'a>(&'a AtomicUsize);

impl Drop for Admission<'_> {
    fn drop(&mut self) {
        self.0.fetch_sub(1, Ordering::SeqCst);
    }
}

impl KeyServer {
    pub fn new(rng: SeedSource) -> Self {
        Self {
            state: Mutex::new(State::default()),
            rng: Mutex::new(rng),
            acl: AccessControlList::standard(),
            max_pending: DEFAULT_MAX_PENDING,
            pending: AtomicUsize::new(0),
        }
    }

    pub fn with_max_pending(mut self, limit: usize) -> Self {
        self.max_pending = limit;
        self
    }

    pub fn with_acl(mut self, acl: AccessControlList) -> Self {
        self.acl = acl;
        self
    }

    fn admit(&self) -> Result<Admission<'_>> {
        let pending = self.pending.fetch_add(1, Ordering::SeqCst) + 1;
        let admission = Admission(&self.pending);
        if pending > self.max_pending {
            return Err(Error::Overloaded { pending, limit: self.max_pending });
        }
        Ok(admission)
    }

    fn lock(&self) -> MutexGuard<'_, State> {
        self.state.lock().unwrap_or_else(|p| p.into_inner())
    }

    fn random<const N: usize>(&self) -> [u8; N] {
        self.rng.lock().unwrap_or_else(|p| p.into_inner()).bytes()
    }

    pub fn register_party(&self, party_id: &str, password: &str, role: Role) -> Result<()> {
        let _admission = self.admit()?;
        let salt = self.random::<16>();
        let mut state = self.lock();
        if state.credentials.contains_key(party_id) {
            return Err(Error::DuplicateParty(party_id.to_string()));
        }
        let record = CredentialRecord { role, salt, password_hash: password_hash(&salt, password) };
        state.credentials.insert(party_id.to_string(), record);
        Ok(())
    }

    /// Unknown parties and wrong passwords take the same path and fail the
    /// same way.
    pub fn authenticate(&self, party_id: &str, password: &str, ttl_seconds: u64, now: u64) -> Result<SessionToken> {
        let _admission = self.admit()?;
        if ttl_seconds == 0 {
            return Err(Error::param("token ttl must be positive"));
        }
        let mut state = self.lock();
        let dummy = CredentialRecord { role: Role::Device, salt: [0; 16], password_hash: [0xff; 32] };
        let (record, known) = match state.credentials.get(party_id) {
            Some(r) => (r.clone(), true),
            None => (dummy, false),
        };
        let computed = password_hash(&record.salt, password);
        let matches: bool = computed.ct_eq(&record.password_hash).into();
        if !(matches && known) {
            return Err(Error::AuthFailed);
        }
        let expires_at = now.checked_add(ttl_seconds).ok_or_else(|| Error::param("ttl overflows"))?;
        let token_bytes = loop {
            let candidate = self.random::<32>();
            if !state.tokens.contains_key(&sha256_parts(&[&candidate])) {
                break candidate;
            }
        };
        state.tokens.insert(sha256_parts(&[&token_bytes]), TokenRecord { party_id: party_id.to_string(), expires_at });
        Ok(SessionToken { party_id: party_id.to_string(), issued_at: now, expires_at, token_bytes })
    }

    fn check_token(state: &State, token: &[u8; 32], now: u64) -> Result<(String, Role)> {
        let record = state.tokens.get(&sha256_parts(&[token])).ok_or(Error::AuthFailed)?;
        if now >= record.expires_at {
            return Err(Error::AuthFailed);
        }
        let cred = state.credentials.get(&record.party_id).ok_or(Error::AuthFailed)?;
        Ok((record.party_id.clone(), cred.role))
    }

    /// Appends a report from the token's holder.
    pub fn report_injection(
        &self,
        token: &[u8; 32],
        device_serial: &str,
        cert_serial: [u8; 16],
        now: u64,
    ) -> Result<InjectionReport> {
        let _admission = self.admit()?;
        let mut state = self.lock();
        let (reporter, role) = Self::check_token(&state, token, now)?;
        self.acl.require(role, Permission::ReportInjection)?;
        let report =
            InjectionReport { reporter, device_serial: device_serial.to_string(), cert_serial, reported_at: now };
        state.reports.push(report.clone());
        Ok(report)
    }

    /// All reports for `device_serial` in submission order. Maintainer only.
    pub fn query_injections(&self, token: &[u8; 32], device_serial: &str, now: u64) -> Result<Vec<InjectionReport>> {
        let _admission = self.admit()?;
        let state = self.lock();
        let (_, role) = Self::check_token(&state, token, now)?;
        if role != Role::Maintainer {
            return Err(Error::AclDenied(format!("{role} may not query injection reports")));
        }
        Ok(state.reports.iter().filter(|r| r.device_serial == device_serial).cloned().collect())
    }

    pub fn credential(&self, party_id: &str) -> Option<CredentialRecord> {
        self.lock().credentials.get(party_id).cloned()
    }

    pub fn report_count(&self) -> usize {
        self.lock().reports.len()
    }

    /// Serializes credentials (hashes only), live token digests and reports.
    pub fn export(&self) -> String {
        let state = self.lock();
        let mut out = String::new();
        for (id, c) in &state.credentials {
            let mut w = TlvWriter::new();
            w.nested(tags::CREDENTIAL, |r| {
                r.u8(tags::ROLE, c.role.code())
                    .text(tags::PARTY_ID, id)
                    .bytes(tags::SALT, &c.salt)
                    .bytes(tags::PASSWORD_HASH, &c.password_hash);
            });
            out.push_str(&write_record(&w.into_bytes()));
        }
        let mut tokens: Vec<_> = state.tokens.iter().collect();
        tokens.sort_by_key(|(hash, _)| **hash);
        for (hash, t) in tokens {
            let mut w = TlvWriter::new();
            w.nested(tags::TOKEN, |r| {
                r.text(tags::PARTY_ID, &t.party_id).bytes(tags::TOKEN_HASH, hash).u64(tags::EXPIRES_AT, t.expires_at);
            });
            out.push_str(&write_record(&w.into_bytes()));
        }
        for rep in &state.reports {
            let mut w = TlvWriter::new();
            w.nested(tags::INJECTION_REPORT, |r| {
                r.bytes(tags::SERIAL, &rep.cert_serial)
                    .text(tags::REPORTER, &rep.reporter)
                    .text(tags::DEVICE_SERIAL, &rep.device_serial)
                    .u64(tags::REPORTED_AT, rep.reported_at);
            });
            out.push_str(&write_record(&w.into_bytes()));
        }
        out
    }

    pub fn import(text: &str, rng: SeedSource) -> Result<Self> {
        let server = Self::new(rng);
        {
            let mut state = server.lock();
            for record in read_records(text)? {
                let mut outer = TlvReader::new(&record);
                match outer.peek_tag() {
                    Some(tags::CREDENTIAL) => {
                        let mut r = outer.nested(tags::CREDENTIAL)?;
                        let role = Role::from_code(r.u8(tags::ROLE)?)?;
                        let id = r.text(tags::PARTY_ID)?;
                        let cred = CredentialRecord {
                            role,
                            salt: r.array(tags::SALT)?,
                            password_hash: r.array(tags::PASSWORD_HASH)?,
                        };
                        r.finish()?;
                        state.credentials.insert(id, cred);
                    }
                    Some(tags::TOKEN) => {
                        let mut r = outer.nested(tags::TOKEN)?;
                        let party_id = r.text(tags::PARTY_ID)?;
                        let hash = r.array(tags::TOKEN_HASH)?;
                        let expires_at = r.u64(tags::EXPIRES_AT)?;
                        r.finish()?;
                        state.tokens.insert(hash, TokenRecord { party_id, expires_at });
                    }
                    Some(tags::INJECTION_REPORT) => {
                        let mut r = outer.nested(tags::INJECTION_REPORT)?;
                        let report = InjectionReport {
                            cert_serial: r.array(tags::SERIAL)?,
                            reporter: r.text(tags::REPORTER)?,
                            device_serial: r.text(tags::DEVICE_SERIAL)?,
                            reported_at: r.u64(tags::REPORTED_AT)?,
                        };
                        r.finish()?;
                        state.reports.push(report);
                    }
                    _ => return Err(Error::decode("unknown key server record")),
                }
                outer.finish()?;
            }
        }
        Ok(server)
    }

    pub fn load(path: impl AsRef<Path>, rng: SeedSource) -> Result<Self> {
        match std::fs::read_to_string(path) {
            Ok(text) => Self::import(&text, rng),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::new(rng)),
            Err(e) => Err(e.into()),
        }
    }

    /// Rewrites the store file atomically.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, self.export())?;
        std::fs::rename(tmp, path)?;
        Ok(())
    }
}
