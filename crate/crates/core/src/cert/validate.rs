use std::collections::BTreeSet;
use std::fmt;

use crate::cert::signed::{check_signatures, SignatureCheck};
use crate::cert::{pin_digest, Certificate};
use crate::error::{Error, Result};
use crate::hash::Digest32;
use crate::revocation::{Reason, RevocationList};

#[derive(Debug, Clone)]
pub struct ValidationPolicy {
    pub evaluation_time: u64,
    pub require_hybrid: bool,
    pub trust_anchors: Vec<Certificate>,
    pub revocation_list: Option<RevocationList>,
    /// When non-empty, some certificate in the chain must match a pin.
    pub pinned_digests: BTreeSet<Digest32>,
    pub max_chain_length: usize,
}

impl ValidationPolicy {
    pub fn new(anchor: Certificate, evaluation_time: u64) -> Self {
        Self {
            evaluation_time,
            require_hybrid: false,
            trust_anchors: vec![anchor],
            revocation_list: None,
            pinned_digests: BTreeSet::new(),
            max_chain_length: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    ChainLength,
    Signature,
    Validity,
    Anchor,
    Revocation,
    PathLen,
    Pinning,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::ChainLength => "chain-length",
            Check::Signature => "signature",
            Check::Validity => "validity",
            Check::Anchor => "anchor",
            Check::Revocation => "revocation",
            Check::PathLen => "path-len",
            Check::Pinning => "pinning",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Failure {
    ChainTooLong,
    BadSignature,
    Downgrade,
    IssuerMismatch,
    Expired,
    NotYetValid,
    UntrustedAnchor,
    Revoked,
    RevocationListInvalid,
    PathLen,
    PinningMismatch,
}

impl Failure {
    pub fn name(self) -> &'static str {
        match self {
            Failure::ChainTooLong => "chain-too-long",
            Failure::BadSignature => "bad-signature",
            Failure::Downgrade => "downgrade",
            Failure::IssuerMismatch => "issuer-mismatch",
            Failure::Expired => "expired",
            Failure::NotYetValid => "not-yet-valid",
            Failure::UntrustedAnchor => "untrusted-anchor",
            Failure::Revoked => "revoked",
            Failure::RevocationListInvalid => "revocation-list-invalid",
            Failure::PathLen => "path-len",
            Failure::PinningMismatch => "pinning-mismatch",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(Failure),
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub check: Check,
    /// Position in the chain, leaf first; `None` for chain-wide checks.
    pub index: Option<usize>,
    pub outcome: Outcome,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub results: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.results.iter().all(|r| !matches!(r.outcome, Outcome::Fail(_)))
    }

    pub fn failures(&self) -> BTreeSet<Failure> {
        self.results
            .iter()
            .filter_map(|r| match r.outcome {
                Outcome::Fail(f) => Some(f),
                _ => None,
            })
            .collect()
    }

    pub fn has_failure(&self, failure: Failure) -> bool {
        self.failures().contains(&failure)
    }

    fn push(&mut self, check: Check, index: Option<usize>, outcome: Outcome, detail: impl Into<String>) {
        self.results.push(CheckResult { check, index, outcome, detail: detail.into() });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            let at = r.index.map(|i| format!("[{i}]")).unwrap_or_default();
            let outcome = match r.outcome {
                Outcome::Pass => "OK".to_string(),
                Outcome::Fail(fail) => format!("FAIL({})", fail.name()),
                Outcome::Skipped => "SKIPPED".to_string(),
            };
            write!(f, "{}{at}: {outcome}", r.check.name())?;
            if !r.detail.is_empty() {
                write!(f, " ({})", r.detail)?;
            }
            writeln!(f)?;
        }
        write!(f, "overall: {}", if self.is_ok() { "OK" } else { "FAIL" })
    }
}

/// Validates a leaf-first chain whose last element must be a trust anchor.
///
/// Policy violations are recorded in the report; only unusable inputs
/// (empty chain, unencodable certificates, malformed policy) are errors.
pub fn validate_chain(chain: &[Certificate], policy: &ValidationPolicy) -> Result<ValidationReport> {
    if chain.is_empty() {
        return Err(Error::param("chain is empty"));
    }
    if policy.trust_anchors.is_empty() || policy.max_chain_length == 0 {
        return Err(Error::param("policy needs a trust anchor and a positive maximum chain length"));
    }
    let pins = chain.iter().map(pin_digest).collect::<Result<Vec<_>>>().map_err(|e| Error::decode(e.to_string()))?;
    let bodies = chain
        .iter()
        .map(|c| c.body.canonical_encode())
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::decode(e.to_string()))?;
    let anchor_pins = policy.trust_anchors.iter().map(pin_digest).collect::<Result<BTreeSet<_>>>()?;

    let mut report = ValidationReport::default();
    let t = policy.evaluation_time;

    if chain.len() > policy.max_chain_length {
        report.push(
            Check::ChainLength,
            None,
            Outcome::Fail(Failure::ChainTooLong),
            format!("{} > {}", chain.len(), policy.max_chain_length),
        );
    } else {
        report.push(Check::ChainLength, None, Outcome::Pass, "");
    }

    for (i, cert) in chain.iter().enumerate() {
        let issuer = chain.get(i + 1).unwrap_or(cert);
        let require_hybrid = policy.require_hybrid || cert.body.extensions.hybrid_required();
        let outcome = if cert.issuer() != issuer.subject() {
            (Outcome::Fail(Failure::IssuerMismatch), "issuer name does not match the next certificate".into())
        } else {
            match check_signatures(&bodies[i], &cert.signatures, &issuer.body.public_keys, require_hybrid) {
                SignatureCheck::Valid => (Outcome::Pass, String::new()),
                SignatureCheck::Downgrade(d) => (Outcome::Fail(Failure::Downgrade), d),
                SignatureCheck::Invalid(d) => (Outcome::Fail(Failure::BadSignature), d),
            }
        };
        report.push(Check::Signature, Some(i), outcome.0, outcome.1);

        let validity = if t < cert.body.not_before {
            Outcome::Fail(Failure::NotYetValid)
        } else if t > cert.body.not_after {
            Outcome::Fail(Failure::Expired)
        } else {
            Outcome::Pass
        };
        report.push(Check::Validity, Some(i), validity, format!("{}..{}", cert.body.not_before, cert.body.not_after));

        if i > 0 {
            let below = &chain[i - 1];
            let ok = cert.can_sign_certs() && cert.path_len() >= 1 && cert.path_len() > below.path_len();
            let outcome = if ok { Outcome::Pass } else { Outcome::Fail(Failure::PathLen) };
            report.push(Check::PathLen, Some(i), outcome, format!("pathLen {}", cert.path_len()));
        }
    }

    let top = chain.len() - 1;
    if anchor_pins.contains(&pins[top]) {
        report.push(Check::Anchor, Some(top), Outcome::Pass, "");
    } else {
        report.push(
            Check::Anchor,
            Some(top),
            Outcome::Fail(Failure::UntrustedAnchor),
            "top certificate is not a trust anchor",
        );
    }

    match &policy.revocation_list {
        None => report.push(Check::Revocation, None, Outcome::Skipped, "no revocation list"),
        Some(rl) => {
            let signer = policy.trust_anchors.iter().find(|a| a.subject() == &rl.body.issuer);
            let valid = signer.is_some_and(|root| rl.verify(root).is_valid());
            if !valid {
                report.push(
                    Check::Revocation,
                    None,
                    Outcome::Fail(Failure::RevocationListInvalid),
                    "list is not signed by a trust anchor",
                );
            } else {
                for (i, cert) in chain.iter().enumerate() {
                    let (outcome, detail) = match rl.matching_entry(cert) {
                        None => (Outcome::Pass, String::new()),
                        // Policy expiry is reported exactly like an elapsed validity window.
                        Some(e) if e.reason == Reason::ExpiryPolicy => {
                            (Outcome::Fail(Failure::Expired), format!("expired by policy: {}", e.scope))
                        }
                        Some(e) => (Outcome::Fail(Failure::Revoked), format!("{} ({})", e.scope, e.reason.name())),
                    };
                    report.push(Check::Revocation, Some(i), outcome, detail);
                }
            }
        }
    }

    if policy.pinned_digests.is_empty() {
        report.push(Check::Pinning, None, Outcome::Skipped, "no pins configured");
    } else if pins.iter().any(|p| policy.pinned_digests.contains(p)) {
        report.push(Check::Pinning, None, Outcome::Pass, "");
    } else {
        report.push(Check::Pinning, None, Outcome::Fail(Failure::PinningMismatch), "no certificate matches a pin");
    }

    Ok(report)
}
