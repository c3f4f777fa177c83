//! Executable model of the enrollment topology: a maintainer root, a
//! production-line mirror frontend, a manufacturer, an operator and devices
//! with a simulated TEE, talking over simulated channels that an optional
//! adversary can observe, corrupt, replay or record.
//!
//! The confidentiality layer is a toy (hash-keyed stream over a toy-DL
//! agreement). It exists so that store-now-decrypt-later can be shown, not
//! to protect anything.

mod adversary;
mod channel;
mod party;
mod protocol;
mod scenario;
mod sndl;
mod token;
mod wrap;

pub use adversary::AdversaryConfig;
pub use channel::{ChannelKind, ChannelMessage};
pub use party::{
    device_generate_csr, provision_device, provision_mirror_frontend, setup_hierarchy, setup_hierarchy_at,
    simulation_scheme, verify_attestation, FrontendProvisioning, Hierarchy, Party, TeeState, DEFAULT_EPOCH,
};
pub use protocol::{
    run_enrollment, EnrollmentOptions, EnrollmentOutcome, EnrollmentTranscript, InjectionPath, SessionProtection,
};
pub use scenario::{run_scenario, ScenarioConfig, ScenarioRun};
pub use sndl::{simulate_store_now_decrypt_later, AttackOutcome, AttackReport, DEFAULT_QUANTUM_BUDGET};
pub use token::{hardware_token_confirm, request_digest, HardwareToken, TokenApproval, TokenDecision};
pub use wrap::{unwrap_key, wrap_key, TeeEncryptionKey, TeePublicKey};

#[cfg(test)]
mod tests;
