use thiserror::Error;

/// Errors raised by the toolkit.
///
/// A failed signature verification is never an error: `verify` returns
/// `Ok(false)`. Errors are reserved for inputs that cannot be processed at
/// all or for operations that refuse to proceed.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("malformed input: {0}")]
    Decode(String),
    #[error("cannot encode: {0}")]
    Encode(String),
    #[error("signer state exhausted after {capacity} signatures")]
    StateExhausted { capacity: u64 },
    #[error("one-time key has already produced a signature")]
    OneTimeKeyReuse,
    #[error("discrete logarithm not found within {budget} group operations")]
    Infeasible { budget: u64 },
    #[error("certificate signing request rejected: {0}")]
    CsrInvalid(String),
    #[error("issuing authority is not eligible: {0}")]
    CaIneligible(String),
    #[error("attestation evidence unavailable")]
    AttestationUnavailable,
    #[error("key unwrap failed")]
    UnwrapFailed,
    #[error("adversary recorded nothing")]
    NothingRecorded,
    #[error("access denied: {0}")]
    AclDenied(String),
    #[error("rollback rejected: incoming version {incoming} does not exceed {current}")]
    RollbackRejected { current: u64, incoming: u64 },
    #[error("signature on signed object does not verify: {0}")]
    SignatureInvalid(String),
    #[error("firmware bundle rejected: {0}")]
    BundleInvalid(String),
    #[error("evidence certificate rejected: {0}")]
    EvidenceRejected(String),
    #[error("party {0} already registered")]
    DuplicateParty(String),
    #[error("authentication failed")]
    AuthFailed,
    #[error("server busy: {pending} requests pending (limit {limit})")]
    Overloaded { pending: usize, limit: usize },
    #[error("scheme unavailable: {0}")]
    SchemeUnavailable(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable code, used by the command-line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parameter(_) => "PARAMETER_ERROR",
            Error::Decode(_) => "DECODE_ERROR",
            Error::Encode(_) => "ENCODE_ERROR",
            Error::StateExhausted { .. } => "STATE_EXHAUSTED",
            Error::OneTimeKeyReuse => "ONE_TIME_KEY_REUSE",
            Error::Infeasible { .. } => "INFEASIBLE",
            Error::CsrInvalid(_) => "CSR_INVALID",
            Error::CaIneligible(_) => "CA_INELIGIBLE",
            Error::AttestationUnavailable => "ATTESTATION_UNAVAILABLE",
            Error::UnwrapFailed => "UNWRAP_FAILED",
            Error::NothingRecorded => "NOTHING_RECORDED",
            Error::AclDenied(_) => "ACL_DENIED",
            Error::RollbackRejected { .. } => "ROLLBACK_REJECTED",
            Error::SignatureInvalid(_) => "SIGNATURE_INVALID",
            Error::BundleInvalid(_) => "BUNDLE_INVALID",
            Error::EvidenceRejected(_) => "EVIDENCE_REJECTED",
            Error::DuplicateParty(_) => "DUPLICATE_PARTY",
            Error::AuthFailed => "AUTH_FAILED",
            Error::Overloaded { .. } => "OVERLOADED",
            Error::SchemeUnavailable(_) => "SCHEME_UNAVAILABLE",
            Error::Io(_) => "IO_ERROR",
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn decode(msg: impl Into<String>) -> Self {
        Error::Decode(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
