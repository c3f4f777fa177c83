use std::fmt;

use crate::cert::Role;
use crate::encoding::{tags, TlvReader, TlvWriter};
use crate::error::{Error, Result};
use crate::hash::Digest32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChannelKind {
    Control,
    CertMaterial,
}

impl ChannelKind {
    pub fn code(self) -> u8 {
        match self {
            ChannelKind::Control => 1,
            ChannelKind::CertMaterial => 2,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            1 => Ok(ChannelKind::Control),
            2 => Ok(ChannelKind::CertMaterial),
            _ => Err(Error::decode(format!("unknown channel kind {code}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Control => "CONTROL",
            ChannelKind::CertMaterial => "CERT_MATERIAL",
        }
    }

    /// Payload types are partitioned by channel: `0xc_` control, `0xd_`
    /// certificate material.
    pub fn admits(self, payload_type: u8) -> bool {
        match self {
            ChannelKind::Control => (0xc0..=0xcf).contains(&payload_type),
            ChannelKind::CertMaterial => (0xd0..=0xdf).contains(&payload_type),
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [ChannelKind::Control, ChannelKind::CertMaterial]
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::param(format!("unknown channel kind {s:?}")))
    }
}

/// One hop on a simulated channel. The payload is a single TLV whose tag is
/// the payload type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelMessage {
    pub channel_kind: ChannelKind,
    pub sender: Role,
    pub receiver: Role,
    pub sequence: u64,
    pub payload: Vec<u8>,
    pub integrity_tag: Digest32,
}

impl ChannelMessage {
    pub fn payload_type(&self) -> Option<u8> {
        self.payload.first().copied()
    }

    pub fn is_separated(&self) -> bool {
        self.payload_type().is_some_and(|t| self.channel_kind.admits(t))
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut w = TlvWriter::new();
        w.nested(tags::CHANNEL_MESSAGE, |m| {
            m.u8(tags::CHANNEL_KIND, self.channel_kind.code())
                .u8(tags::SENDER, self.sender.code())
                .u8(tags::RECEIVER, self.receiver.code())
                .u64(tags::SEQUENCE, self.sequence)
                .bytes(tags::MESSAGE_PAYLOAD, &self.payload)
                .bytes(tags::INTEGRITY_TAG, &self.integrity_tag);
        });
        w.into_bytes()
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = TlvReader::new(bytes);
        let mut m = r.nested(tags::CHANNEL_MESSAGE)?;
        let msg = Self {
            channel_kind: ChannelKind::from_code(m.u8(tags::CHANNEL_KIND)?)?,
            sender: Role::from_code(m.u8(tags::SENDER)?)?,
            receiver: Role::from_code(m.u8(tags::RECEIVER)?)?,
            sequence: m.u64(tags::SEQUENCE)?,
            payload: m.read(tags::MESSAGE_PAYLOAD)?.to_vec(),
            integrity_tag: m.array(tags::INTEGRITY_TAG)?,
        };
        m.finish()?;
        r.finish()?;
        Ok(msg)
    }
}
