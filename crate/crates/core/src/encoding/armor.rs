use base64::engine::general_purpose::STANDARD;
use base64::Engine;

use crate::error::{Error, Result};

/// Object kinds that have an armored text form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArmorKind {
    Certificate,
    Csr,
    Key,
    PublicKey,
    Signature,
    RevocationList,
    FirmwareBundle,
}

impl ArmorKind {
    pub fn label(self) -> &'static str {
        match self {
            ArmorKind::Certificate => "CERTIFICATE",
            ArmorKind::Csr => "CSR",
            ArmorKind::Key => "KEY",
            ArmorKind::PublicKey => "PUBLIC KEY",
            ArmorKind::Signature => "SIGNATURE",
            ArmorKind::RevocationList => "REVOCATION LIST",
            ArmorKind::FirmwareBundle => "FIRMWARE BUNDLE",
        }
    }
}

const LINE_WIDTH: usize = 64;

pub fn armor(kind: ArmorKind, der: &[u8]) -> String {
    let body = STANDARD.encode(der);
    let mut out = format!("-----BEGIN PQPKI {}-----\n", kind.label());
    for chunk in body.as_bytes().chunks(LINE_WIDTH) {
        out.push_str(std::str::from_utf8(chunk).expect("base64 is ASCII"));
        out.push('\n');
    }
    out.push_str(&format!("-----END PQPKI {}-----\n", kind.label()));
    out
}

/// Extracts the first armored block of the requested kind.
pub fn dearmor(kind: ArmorKind, text: &str) -> Result<Vec<u8>> {
    let begin = format!("-----BEGIN PQPKI {}-----", kind.label());
    let end = format!("-----END PQPKI {}-----", kind.label());
    let mut lines = text.lines().map(str::trim);
    lines.by_ref().find(|l| *l == begin).ok_or_else(|| Error::decode(format!("no {begin} line")))?;
    let mut body = String::new();
    for line in lines {
        if line == end {
            return STANDARD.decode(body.as_bytes()).map_err(|e| Error::decode(format!("armor body: {e}")));
        }
        body.push_str(line);
    }
    Err(Error::decode(format!("no {end} line")))
}

/// One newline-delimited base64 record, as used by journals, stores and
/// transcripts.
pub fn write_record(tlv: &[u8]) -> String {
    let mut line = STANDARD.encode(tlv);
    line.push('\n');
    line
}

/// Decodes every non-empty line that does not start with `#`.
pub fn read_records(text: &str) -> Result<Vec<Vec<u8>>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| STANDARD.decode(l).map_err(|e| Error::decode(format!("record: {e}"))))
        .collect()
}
