//! Scoped revocation, offline delivery and certificate collapse.
//!
//! Lists are signed by the maintainer root only, replace each other
//! wholesale and are accepted only with a strictly greater version. Entries
//! address a single serial, a device model or everything one CA issued.

mod acl;
mod bundle;
mod list;

pub use acl::{AccessControlList, Permission};
pub use bundle::{apply_offline_update, pack_firmware_bundle, FirmwareBundle};
pub use list::{
    issue_revocation_list, merge_revocation_lists, Reason, RevocationEntry, RevocationList, RevocationListBody,
    RevocationSlot, Scope,
};

use crate::cert::Certificate;
use crate::cert::{
    validate_chain, CertificateAuthority, CertificateSigningRequest, IssueProfile, KeyUsage, PublicKeyEntry, Role,
    ValidationPolicy,
};
use crate::error::{Error, Result};
use crate::sig::KeyPair;

/// Re-issues a device certificate directly under the root, using an
/// existing certificate of that device as evidence. The result has chain
/// length 2 and is recorded in the root's journal.
pub fn collapse_certificate(
    root: &CertificateAuthority,
    acl: &AccessControlList,
    device_keys: &KeyPair,
    evidence_chain: &[Certificate],
    revocation_list: Option<&RevocationList>,
    ttl_seconds: u64,
    now: u64,
) -> Result<Certificate> {
    acl.require(root.cert.subject().role, Permission::CollapseCert)?;
    let evidence = evidence_chain.first().ok_or_else(|| Error::EvidenceRejected("no evidence certificate".into()))?;
    if evidence.subject().role != Role::Device {
        return Err(Error::EvidenceRejected("evidence does not describe a device".into()));
    }
    let mut policy = ValidationPolicy::new(root.cert.clone(), now);
    policy.revocation_list = revocation_list.cloned();
    let report = validate_chain(evidence_chain, &policy).map_err(|e| Error::EvidenceRejected(e.to_string()))?;
    if !report.is_ok() {
        let reasons: Vec<_> = report.failures().into_iter().map(|f| f.name()).collect();
        return Err(Error::EvidenceRejected(reasons.join(", ")));
    }
    let csr = CertificateSigningRequest::create(evidence.subject().clone(), &[device_keys], KeyUsage::SignData, None)?;
    let hybrid = csr.body.public_keys.iter().any(|k| !PublicKeyEntry::quantum_vulnerable(k));
    root.issue(&csr, &IssueProfile::end_entity(ttl_seconds).hybrid_required(hybrid), now)
}

#[cfg(test)]
mod tests;
