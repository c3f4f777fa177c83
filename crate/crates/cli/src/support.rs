use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use pqpki_core::encoding::{armor, dearmor, ArmorKind};
use pqpki_core::{KeyPair, SeedSource, VerifyingKey};
use serde_json::Value;

/// A failed invocation: a stable code on stderr and exit status 1.
#[derive(Debug)]
pub struct CliError {
    pub code: String,
    pub message: String,
}

impl CliError {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Self { code: code.to_string(), message: message.into() }
    }

    pub fn param(message: impl Into<String>) -> Self {
        Self::new("PARAMETER_ERROR", message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl From<pqpki_core::Error> for CliError {
    fn from(e: pqpki_core::Error) -> Self {
        Self::new(e.code(), e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// What a command produced. A `negative` code still prints the document
/// but exits 1, for verdicts such as an invalid signature.
pub struct Report {
    pub text: String,
    pub json: Value,
    pub negative: Option<&'static str>,
}

impl Report {
    pub fn new(text: impl Into<String>, json: Value) -> Self {
        Self { text: text.into(), json, negative: None }
    }

    pub fn negative(mut self, code: &'static str) -> Self {
        self.negative = Some(code);
        self
    }
}

/// Settings shared by every verb after flags and the config file are merged.
pub struct Context {
    pub seed: Option<u64>,
    pub now: u64,
    /// `now` as given by flag or config, before the clock fallback.
    pub explicit_now: Option<u64>,
}

impl Context {
    pub fn rng(&self) -> SeedSource {
        match self.seed {
            Some(s) => SeedSource::from_u64(s),
            None => SeedSource::from_entropy(),
        }
    }
}

pub fn system_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::new("IO_ERROR", format!("{}: {e}", path.display()))
}

pub fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| io_error(path, e))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| io_error(path, e))
}

/// Writes through a sibling temp file so a crash never leaves a torn file.
pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> CliResult<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents).map_err(|e| io_error(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| io_error(path, e))
}

pub fn load_key(path: &Path) -> CliResult<KeyPair> {
    Ok(KeyPair::from_bytes(&dearmor(ArmorKind::Key, &read_text(path)?)?)?)
}

pub fn save_key(path: &Path, key: &KeyPair) -> CliResult<()> {
    write_file(path, armor(ArmorKind::Key, &key.to_bytes()))
}

/// Runs `f` with the key at `path`, then persists the signer state before
/// anything `f` produced leaves the process.
pub fn with_key<T>(path: &Path, f: impl FnOnce(&KeyPair) -> CliResult<T>) -> CliResult<T> {
    let key = load_key(path)?;
    let before = key.signer_state();
    let out = f(&key);
    if key.signer_state() != before {
        save_key(path, &key)?;
    }
    out
}

/// Accepts either a public key file or a full key file.
pub fn load_verifying_key(path: &Path) -> CliResult<VerifyingKey> {
    let text = read_text(path)?;
    match dearmor(ArmorKind::PublicKey, &text) {
        Ok(bytes) => Ok(VerifyingKey::from_bytes(&bytes)?),
        Err(_) => Ok(KeyPair::from_bytes(&dearmor(ArmorKind::Key, &text)?)?.verifying_key()),
    }
}

pub fn parse_hex<const N: usize>(what: &str, text: &str) -> CliResult<[u8; N]> {
    hex::decode(text.trim())
        .ok()
        .and_then(|v| v.try_into().ok())
        .ok_or_else(|| CliError::param(format!("{what} must be {N} hex-encoded bytes")))
}

/// `key=value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> CliResult<Vec<(String, String)>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| CliError::param(format!("config line without '=': {l:?}")))
        })
        .collect()
}
