use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::encoding::{tags, TlvReader, TlvWriter};
use crate::error::{Error, Result};
use crate::sig::{check_public_key, KeyPair, SchemeDescriptor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Maintainer,
    Manufacturer,
    Operator,
    Device,
    ProductionLine,
}

impl Role {
    pub const ALL: [Role; 5] =
        [Role::Maintainer, Role::Manufacturer, Role::Operator, Role::Device, Role::ProductionLine];

    pub fn code(self) -> u8 {
        match self {
            Role::Maintainer => 1,
            Role::Manufacturer => 2,
            Role::Operator => 3,
            Role::Device => 4,
            Role::ProductionLine => 5,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        Role::ALL
            .into_iter()
            .find(|r| r.code() == code)
            .ok_or_else(|| Error::decode(format!("unknown role code {code}")))
    }

    pub fn name(self) -> &'static str {
        match self {
            Role::Maintainer => "MAINTAINER",
            Role::Manufacturer => "MANUFACTURER",
            Role::Operator => "OPERATOR",
            Role::Device => "DEVICE",
            Role::ProductionLine => "PRODUCTION_LINE",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Role::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::param(format!("unknown role {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubjectInfo {
    pub common_name: String,
    pub role: Role,
    pub device_model: Option<String>,
    pub serial_number: Option<String>,
}

impl SubjectInfo {
    pub fn new(common_name: impl Into<String>, role: Role) -> Self {
        Self { common_name: common_name.into(), role, device_model: None, serial_number: None }
    }

    pub fn device(common_name: impl Into<String>, model: impl Into<String>, serial: impl Into<String>) -> Self {
        Self {
            common_name: common_name.into(),
            role: Role::Device,
            device_model: Some(model.into()),
            serial_number: Some(serial.into()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.role == Role::Device && (self.device_model.is_none() || self.serial_number.is_none()) {
            return Err(Error::param("DEVICE subjects need a device model and a serial number"));
        }
        Ok(())
    }

    pub(crate) fn encode_into(&self, w: &mut TlvWriter, tag: u8) {
        w.nested(tag, |s| {
            s.text(tags::COMMON_NAME, &self.common_name)
                .u8(tags::ROLE, self.role.code())
                .opt_text(tags::DEVICE_MODEL, self.device_model.as_deref())
                .opt_text(tags::SERIAL_NUMBER, self.serial_number.as_deref());
        });
    }

    pub(crate) fn decode_from(r: &mut TlvReader<'_>, tag: u8) -> Result<Self> {
        let mut s = r.nested(tag)?;
        let subject = Self {
            common_name: s.text(tags::COMMON_NAME)?,
            role: Role::from_code(s.u8(tags::ROLE)?)?,
            device_model: s.opt_text(tags::DEVICE_MODEL)?,
            serial_number: s.opt_text(tags::SERIAL_NUMBER)?,
        };
        s.finish()?;
        subject.validate().map_err(|e| Error::decode(e.to_string()))?;
        Ok(subject)
    }
}

impl fmt::Display for SubjectInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CN={}, role={}", self.common_name, self.role)?;
        if let Some(m) = &self.device_model {
            write!(f, ", model={m}")?;
        }
        if let Some(s) = &self.serial_number {
            write!(f, ", serial={s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KeyUsage {
    SignCerts,
    SignData,
    Attest,
}

impl KeyUsage {
    pub fn code(self) -> u8 {
        match self {
            KeyUsage::SignCerts => 1,
            KeyUsage::SignData => 2,
            KeyUsage::Attest => 3,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            1 => Ok(KeyUsage::SignCerts),
            2 => Ok(KeyUsage::SignData),
            3 => Ok(KeyUsage::Attest),
            _ => Err(Error::decode(format!("unknown key usage {code}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KeyUsage::SignCerts => "SIGN_CERTS",
            KeyUsage::SignData => "SIGN_DATA",
            KeyUsage::Attest => "ATTEST",
        }
    }
}

impl FromStr for KeyUsage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [KeyUsage::SignCerts, KeyUsage::SignData, KeyUsage::Attest]
            .into_iter()
            .find(|u| u.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::param(format!("unknown key usage {s:?}")))
    }
}

/// One public key carried by a certificate or CSR.
///
/// Hybrid key pairs are stored as two entries, legacy first, so each
/// component carries its own signature and can be checked on its own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicKeyEntry {
    pub descriptor: SchemeDescriptor,
    pub key_bytes: Vec<u8>,
    pub usage: KeyUsage,
}

impl PublicKeyEntry {
    /// Entries for `key`: two for a hybrid pair, one otherwise.
    pub fn from_key(key: &KeyPair, usage: KeyUsage) -> Vec<Self> {
        match key.components() {
            Some(parts) => parts.iter().flat_map(|k| Self::from_key(k, usage)).collect(),
            None => vec![Self { descriptor: key.descriptor().clone(), key_bytes: key.public_key().to_vec(), usage }],
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.descriptor.validate()?;
        check_public_key(&self.descriptor, &self.key_bytes)
    }

    pub fn quantum_vulnerable(&self) -> bool {
        self.descriptor.quantum_vulnerable()
    }

    pub(crate) fn encode_list(entries: &[Self], w: &mut TlvWriter) {
        w.nested(tags::PUBLIC_KEYS, |list| {
            for e in entries {
                list.nested(tags::PUBLIC_KEY_ENTRY, |k| {
                    e.descriptor.encode_into(k);
                    k.bytes(tags::KEY_BYTES, &e.key_bytes).u8(tags::KEY_USAGE, e.usage.code());
                });
            }
        });
    }

    pub(crate) fn decode_list(r: &mut TlvReader<'_>) -> Result<Vec<Self>> {
        let mut list = r.nested(tags::PUBLIC_KEYS)?;
        let mut out = Vec::new();
        for raw in list.repeated(tags::PUBLIC_KEY_ENTRY)? {
            let mut k = TlvReader::new(raw);
            let entry = Self {
                descriptor: SchemeDescriptor::decode_from(&mut k)?,
                key_bytes: k.read(tags::KEY_BYTES)?.to_vec(),
                usage: KeyUsage::from_code(k.u8(tags::KEY_USAGE)?)?,
            };
            k.finish()?;
            entry.validate().map_err(|e| Error::decode(e.to_string()))?;
            out.push(entry);
        }
        list.finish()?;
        Ok(out)
    }
}

/// A single certificate extension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extension {
    HybridRequired(bool),
    AttestationDigest([u8; 32]),
    /// Opaque description of the service zone the device was provisioned in.
    ServiceZoneState(String),
    DeviceBinding(Vec<u8>),
    PathLen(u8),
}

impl Extension {
    fn tag(&self) -> u8 {
        match self {
            Extension::HybridRequired(_) => tags::EXT_HYBRID_REQUIRED,
            Extension::AttestationDigest(_) => tags::EXT_ATTESTATION_DIGEST,
            Extension::ServiceZoneState(_) => tags::EXT_SERVICE_ZONE_STATE,
            Extension::DeviceBinding(_) => tags::EXT_DEVICE_BINDING,
            Extension::PathLen(_) => tags::EXT_PATH_LEN,
        }
    }
}

/// Extension map keyed by tag, so encoding order never depends on insertion
/// order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Extensions {
    map: BTreeMap<u8, Extension>,
}

impl Extensions {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts or replaces the extension of the same kind.
    pub fn insert(&mut self, ext: Extension) -> &mut Self {
        self.map.insert(ext.tag(), ext);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = &Extension> {
        self.map.values()
    }

    pub fn hybrid_required(&self) -> bool {
        matches!(self.map.get(&tags::EXT_HYBRID_REQUIRED), Some(Extension::HybridRequired(true)))
    }

    pub fn attestation_digest(&self) -> Option<&[u8; 32]> {
        match self.map.get(&tags::EXT_ATTESTATION_DIGEST) {
            Some(Extension::AttestationDigest(d)) => Some(d),
            _ => None,
        }
    }

    pub fn service_zone_state(&self) -> Option<&str> {
        match self.map.get(&tags::EXT_SERVICE_ZONE_STATE) {
            Some(Extension::ServiceZoneState(s)) => Some(s),
            _ => None,
        }
    }

    pub fn device_binding(&self) -> Option<&[u8]> {
        match self.map.get(&tags::EXT_DEVICE_BINDING) {
            Some(Extension::DeviceBinding(b)) => Some(b),
            _ => None,
        }
    }

    /// Remaining CA depth below this certificate; absent means 0.
    pub fn path_len(&self) -> u8 {
        match self.map.get(&tags::EXT_PATH_LEN) {
            Some(Extension::PathLen(n)) => *n,
            _ => 0,
        }
    }

    pub(crate) fn encode_into(&self, w: &mut TlvWriter) {
        w.nested(tags::EXTENSIONS, |e| {
            for ext in self.map.values() {
                match ext {
                    Extension::HybridRequired(b) => e.bool(ext.tag(), *b),
                    Extension::AttestationDigest(d) => e.bytes(ext.tag(), d),
                    Extension::ServiceZoneState(s) => e.text(ext.tag(), s),
                    Extension::DeviceBinding(b) => e.bytes(ext.tag(), b),
                    Extension::PathLen(n) => e.u8(ext.tag(), *n),
                };
            }
        });
    }

    pub(crate) fn decode_from(r: &mut TlvReader<'_>) -> Result<Self> {
        let mut e = r.nested(tags::EXTENSIONS)?;
        let mut out = Self::new();
        if let Some(b) = e.opt_bool(tags::EXT_HYBRID_REQUIRED)? {
            out.insert(Extension::HybridRequired(b));
        }
        if let Some(d) = e.optional(tags::EXT_ATTESTATION_DIGEST)? {
            let d: [u8; 32] = d.try_into().map_err(|_| Error::decode("attestation digest must be 32 bytes"))?;
            out.insert(Extension::AttestationDigest(d));
        }
        if let Some(s) = e.opt_text(tags::EXT_SERVICE_ZONE_STATE)? {
            out.insert(Extension::ServiceZoneState(s));
        }
        if let Some(b) = e.optional(tags::EXT_DEVICE_BINDING)? {
            out.insert(Extension::DeviceBinding(b.to_vec()));
        }
        if let Some(n) = e.opt_u8(tags::EXT_PATH_LEN)? {
            out.insert(Extension::PathLen(n));
        }
        e.finish()?;
        Ok(out)
    }
}
