use std::path::{Path, PathBuf};

use pqpki_core::cert::SignatureCheck;
use pqpki_core::cert::{
    issue_certificate, pin_digest, self_sign_root, validate_chain, Certificate, CertificateSigningRequest,
    IssuanceJournal, IssueProfile, KeyUsage, Outcome, Role, SubjectInfo, ValidationPolicy,
};
use pqpki_core::revocation::{
    issue_revocation_list, merge_revocation_lists, pack_firmware_bundle, AccessControlList, FirmwareBundle, Reason,
    RevocationEntry, RevocationList, RevocationSlot, Scope,
};
use serde_json::json;

use crate::args::{BundleCommand, CertCommand, CsrCommand, RevokeCommand};
use crate::support::{
    load_key, parse_hex, read_bytes, read_text, with_key, write_file, CliError, CliResult, Context, Report,
};

fn load_cert(path: &Path) -> CliResult<Certificate> {
    Ok(Certificate::from_armor(&read_text(path)?)?)
}

fn load_rl(path: &Path) -> CliResult<RevocationList> {
    Ok(RevocationList::from_armor(&read_text(path)?)?)
}

fn cert_summary(c: &Certificate) -> CliResult<serde_json::Value> {
    Ok(json!({
        "serial": hex::encode(c.serial()),
        "subject": c.subject().to_string(),
        "issuer": c.issuer().to_string(),
        "not_before": c.body.not_before,
        "not_after": c.body.not_after,
        "path_len": c.path_len(),
        "hybrid_required": c.body.extensions.hybrid_required(),
        "pin": hex::encode(pin_digest(c)?),
    }))
}

fn wrote(what: &str, c: &Certificate, out: &Path) -> CliResult<Report> {
    let text = format!("{what} {} serial {} -> {}\n", c.subject(), hex::encode(c.serial()), out.display());
    Ok(Report::new(text, cert_summary(c)?))
}

pub fn cert(c: CertCommand, ctx: &Context) -> CliResult<Report> {
    match c {
        CertCommand::SelfSign { key, cn, ttl, out } => {
            let cert =
                with_key(&key, |k| Ok(self_sign_root(k, SubjectInfo::new(cn, Role::Maintainer), ttl, ctx.now)?))?;
            write_file(&out, cert.to_armor()?)?;
            wrote("root", &cert, &out)
        }
        CertCommand::Issue { ca_key, ca_cert, csr, ttl, sub_ca, hybrid_required, service_zone_state, journal, out } => {
            let ca = load_cert(&ca_cert)?;
            let request = CertificateSigningRequest::from_armor(&read_text(&csr)?)?;
            let mut profile = if sub_ca { IssueProfile::sub_ca(ttl) } else { IssueProfile::end_entity(ttl) };
            if let Some(h) = hybrid_required {
                profile = profile.hybrid_required(h);
            }
            profile.service_zone_state = service_zone_state;
            let journal_path = journal.unwrap_or_else(|| {
                let mut p = ca_cert.clone().into_os_string();
                p.push(".journal");
                PathBuf::from(p)
            });
            let journal = IssuanceJournal::open(&journal_path)?;
            let cert = with_key(&ca_key, |k| Ok(issue_certificate(k, &ca, &journal, &request, &profile, ctx.now)?))?;
            write_file(&out, cert.to_armor()?)?;
            wrote("issued", &cert, &out)
        }
        CertCommand::Validate { chain, anchor, rl, require_hybrid, pin, max_chain } => {
            let chain = chain.iter().map(|p| load_cert(p)).collect::<CliResult<Vec<_>>>()?;
            let mut policy = ValidationPolicy::new(load_cert(&anchor)?, ctx.now);
            policy.require_hybrid = require_hybrid;
            policy.max_chain_length = max_chain;
            policy.revocation_list = rl.as_deref().map(load_rl).transpose()?;
            for p in &pin {
                policy.pinned_digests.insert(parse_hex::<32>("pin", p)?);
            }
            let report = validate_chain(&chain, &policy)?;
            let mut text = String::new();
            let mut results = Vec::new();
            for r in &report.results {
                let outcome = match r.outcome {
                    Outcome::Pass => "PASS".to_string(),
                    Outcome::Skipped => "SKIPPED".to_string(),
                    Outcome::Fail(f) => format!("FAIL {}", f.name()),
                };
                let at = r.index.map_or("chain".to_string(), |i| format!("cert {i}"));
                text.push_str(&format!("{:<12} {:<8} {outcome} {}\n", r.check.name(), at, r.detail));
                results
                    .push(json!({ "check": r.check.name(), "index": r.index, "outcome": outcome, "detail": r.detail }));
            }
            let failures: Vec<_> = report.failures().into_iter().map(|f| f.name()).collect();
            let verdict = if report.is_ok() { "VALID" } else { "INVALID" };
            text.push_str(verdict);
            if !failures.is_empty() {
                text.push_str(&format!(": {}", failures.join(", ")));
            }
            text.push('\n');
            let out = Report::new(text, json!({ "verdict": verdict, "failures": failures, "results": results }));
            Ok(if report.is_ok() { out } else { out.negative("CHAIN_INVALID") })
        }
        CertCommand::Show { cert } => {
            let c = load_cert(&cert)?;
            Ok(Report::new(c.describe(), cert_summary(&c)?))
        }
        CertCommand::Pin { cert } => {
            let digest = hex::encode(pin_digest(&load_cert(&cert)?)?);
            Ok(Report::new(format!("{digest}\n"), json!({ "pin": digest })))
        }
    }
}

pub fn csr(c: CsrCommand) -> CliResult<Report> {
    let CsrCommand::Create { key, cn, role, model, serial, usage, out } = c;
    let role: Role = role.parse()?;
    let usage: KeyUsage = usage.parse()?;
    let subject = SubjectInfo { common_name: cn, role, device_model: model, serial_number: serial };
    subject.validate()?;
    let keys = key.iter().map(|p| load_key(p)).collect::<CliResult<Vec<_>>>()?;
    let before: Vec<_> = keys.iter().map(|k| k.signer_state()).collect();
    let refs: Vec<_> = keys.iter().collect();
    let request = CertificateSigningRequest::create(subject, &refs, usage, None);
    // Proofs consume stateful leaves even if a later key fails.
    for ((path, k), b) in key.iter().zip(&keys).zip(before) {
        if k.signer_state() != b {
            crate::support::save_key(path, k)?;
        }
    }
    let request = request?;
    write_file(&out, request.to_armor()?)?;
    let text = format!(
        "CSR for {} with {} key entries -> {}\n",
        request.body.subject,
        request.body.public_keys.len(),
        out.display()
    );
    Ok(Report::new(
        text,
        json!({ "subject": request.body.subject.to_string(), "keys": request.body.public_keys.len() }),
    ))
}

fn rl_summary(rl: &RevocationList) -> serde_json::Value {
    let entries: Vec<_> = rl
        .body
        .entries
        .iter()
        .map(|e| json!({ "scope": e.scope.to_string(), "reason": e.reason.name(), "revoked_at": e.revoked_at }))
        .collect();
    json!({ "version": rl.version(), "issuer": rl.body.issuer.to_string(), "entries": entries })
}

fn check_root_signed(rl: &RevocationList, root: &Certificate) -> CliResult<()> {
    match rl.verify(root) {
        SignatureCheck::Valid => Ok(()),
        SignatureCheck::Invalid(d) | SignatureCheck::Downgrade(d) => {
            Err(CliError::new("SIGNATURE_INVALID", format!("revocation list: {d}")))
        }
    }
}

pub fn revoke(c: RevokeCommand, ctx: &Context) -> CliResult<Report> {
    match c {
        RevokeCommand::Issue { key, cert, acl, prior_version, serial, model, ca, reason, out } => {
            let signer = load_cert(&cert)?;
            let acl = match acl {
                Some(p) => AccessControlList::parse(&read_text(&p)?)?,
                None => AccessControlList::standard(),
            };
            let reason: Reason = reason.parse()?;
            let mut scopes = Vec::new();
            for s in &serial {
                scopes.push(Scope::Serial(parse_hex::<16>("serial", s)?));
            }
            scopes.extend(model.into_iter().map(Scope::DeviceModel));
            for p in &ca {
                scopes.push(Scope::Ca(load_cert(p)?.subject().clone()));
            }
            let entries =
                scopes.into_iter().map(|scope| RevocationEntry { scope, reason, revoked_at: ctx.now }).collect();
            let rl = with_key(&key, |k| Ok(issue_revocation_list(k, &signer, &acl, prior_version, entries, ctx.now)?))?;
            write_file(&out, rl.to_armor())?;
            let text = format!(
                "revocation list v{} with {} entries -> {}\n",
                rl.version(),
                rl.body.entries.len(),
                out.display()
            );
            Ok(Report::new(text, rl_summary(&rl)))
        }
        RevokeCommand::Check { rl, root, cert } => {
            let rl = load_rl(&rl)?;
            check_root_signed(&rl, &load_cert(&root)?)?;
            let cert = load_cert(&cert)?;
            let serial = hex::encode(cert.serial());
            match rl.matching_entry(&cert) {
                Some(e) => {
                    let text = format!("REVOKED {serial}: {} ({})\n", e.scope, e.reason.name());
                    let doc = json!({ "verdict": "REVOKED", "serial": serial, "scope": e.scope.to_string(), "reason": e.reason.name() });
                    Ok(Report::new(text, doc).negative("REVOKED"))
                }
                None => Ok(Report::new(
                    format!("NOT_REVOKED {serial}\n"),
                    json!({ "verdict": "NOT_REVOKED", "serial": serial }),
                )),
            }
        }
        RevokeCommand::Merge { current, incoming, root, out } => {
            let merged = merge_revocation_lists(&load_rl(&current)?, &load_rl(&incoming)?, &load_cert(&root)?)?;
            write_file(&out, merged.to_armor())?;
            Ok(Report::new(format!("adopted version {}\n", merged.version()), rl_summary(&merged)))
        }
    }
}

pub fn bundle(c: BundleCommand, ctx: &Context) -> CliResult<Report> {
    match c {
        BundleCommand::Pack { firmware, rl, key, chain, out } => {
            let blob = read_bytes(&firmware)?;
            let rl = load_rl(&rl)?;
            let chain = chain.iter().map(|p| load_cert(p)).collect::<CliResult<Vec<_>>>()?;
            let bundle = with_key(&key, |k| Ok(pack_firmware_bundle(blob, rl, k, chain)?))?;
            write_file(&out, bundle.to_armor()?)?;
            let text = format!(
                "bundle: {} firmware bytes, list v{} -> {}\n",
                bundle.firmware_blob.len(),
                bundle.revocation_list.version(),
                out.display()
            );
            Ok(Report::new(
                text,
                json!({ "firmware_bytes": bundle.firmware_blob.len(), "rl_version": bundle.revocation_list.version() }),
            ))
        }
        BundleCommand::Apply { bundle, root, current_rl, firmware_out, rl_out } => {
            let bundle = FirmwareBundle::from_armor(&read_text(&bundle)?)?;
            let root = load_cert(&root)?;
            bundle.verify(std::slice::from_ref(&root), ctx.now)?;
            // Same steps a device takes: the stored list gates the incoming one.
            let slot = RevocationSlot::new(root);
            if let Some(p) = &current_rl {
                slot.offer(&load_rl(p)?)?;
            }
            let version = slot.offer(&bundle.revocation_list)?;
            write_file(&firmware_out, &bundle.firmware_blob)?;
            write_file(&rl_out, bundle.revocation_list.to_armor())?;
            let text = format!("installed firmware ({} bytes), list version {version}\n", bundle.firmware_blob.len());
            Ok(Report::new(text, json!({ "firmware_bytes": bundle.firmware_blob.len(), "rl_version": version })))
        }
    }
}
