//! Post-quantum PKI toolkit for embedded-device provisioning.
//!
//! The crate covers pluggable signature schemes ([`sig`]), certificates and
//! chain validation ([`cert`]), device enrollment over simulated channels
//! ([`enrollment`]), revocation and firmware update ([`revocation`]) and the
//! credential server ([`keyserver`]).

pub mod cert;
pub mod encoding;
pub mod enrollment;
pub mod error;
pub mod hash;
pub mod keyserver;
pub mod revocation;
pub mod rng;
pub mod sig;

pub use error::{Error, Result};
pub use rng::SeedSource;
pub use sig::{
    keygen, security_profile, sign, verify, KeyPair, SchemeDescriptor, SchemeId, SchemeParams, SecurityProfile,
    SignatureValue, VerifyingKey,
};
