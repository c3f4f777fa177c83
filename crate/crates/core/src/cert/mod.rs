//! Multi-key certificates, signing requests and chain validation.
//!
//! A certificate body is an X.509-inspired TLV structure rather than DER.
//! Each body may carry several public keys. A hybrid key pair appears as a
//! legacy entry followed by a post-quantum entry, and the issuer signs with
//! every certificate-signing key it holds. When hybrid protection is
//! demanded, by the certificate's own extension or by the validator, every
//! issuer signature must verify: a valid legacy signature alone is reported
//! as a downgrade. [`Certificate::describe`] lists each field next to the
//! X.509 notion it stands in for.
//!
//! Times are integer UTC seconds. Chains are supplied leaf first and end
//! with a trust anchor; no path discovery is attempted.

mod certificate;
mod csr;
mod issue;
mod signed;
mod subject;
mod validate;

pub use certificate::{pin_digest, Certificate, CertificateBody, CERT_VERSION};
pub use csr::{AttestationEvidence, CertificateSigningRequest, CsrBody};
pub use issue::{
    issue_certificate, self_sign_root, CertificateAuthority, IssuanceJournal, IssueProfile, JournalRecord,
    ROOT_PATH_LEN,
};
pub use signed::{check_signatures, check_signatures_for, SignatureCheck};
pub(crate) use signed::{has_post_quantum_signer, sign_flat};
pub use subject::{Extension, Extensions, KeyUsage, PublicKeyEntry, Role, SubjectInfo};
pub use validate::{validate_chain, Check, CheckResult, Failure, Outcome, ValidationPolicy, ValidationReport};
