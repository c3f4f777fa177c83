use std::sync::Arc;

use super::*;
use crate::cert::{
    self_sign_root, validate_chain, Certificate, CertificateAuthority, CertificateSigningRequest, Failure,
    IssueProfile, KeyUsage, Role, SubjectInfo, ValidationPolicy,
};
use crate::enrollment::Party;
use crate::error::Error;
use crate::rng::SeedSource;
use crate::sig::{keygen, DlGroup, KeyPair, SchemeDescriptor};

const NOW: u64 = 1_700_000_000;
const DAY: u64 = 86_400;

fn hybrid(h: u8, rng: &mut SeedSource) -> KeyPair {
    let d = SchemeDescriptor::hybrid(
        SchemeDescriptor::toy_dl(DlGroup::standard()),
        SchemeDescriptor::xmss(16, 4, h).unwrap(),
    )
    .unwrap();
    keygen(&d, rng).unwrap()
}

fn legacy(rng: &mut SeedSource) -> KeyPair {
    keygen(&SchemeDescriptor::toy_dl(DlGroup::standard()), rng).unwrap()
}

struct Pki {
    root: CertificateAuthority,
    pl: CertificateAuthority,
    acl: AccessControlList,
}

fn pki(seed: u64) -> Pki {
    let mut rng = SeedSource::from_u64(seed);
    let keys = Arc::new(hybrid(6, &mut rng));
    let cert = self_sign_root(&keys, SubjectInfo::new("Root", Role::Maintainer), 365 * DAY, NOW).unwrap();
    let root = CertificateAuthority::new(keys, cert);
    // The production line signs with a legacy key only, keeping large corpora cheap.
    let pl_keys = Arc::new(legacy(&mut rng));
    let csr = CertificateSigningRequest::create(
        SubjectInfo::new("PL", Role::ProductionLine),
        &[&pl_keys],
        KeyUsage::SignCerts,
        None,
    )
    .unwrap();
    let pl_cert = root.issue(&csr, &IssueProfile::sub_ca(180 * DAY).hybrid_required(false), NOW).unwrap();
    Pki { root, pl: CertificateAuthority::new(pl_keys, pl_cert), acl: AccessControlList::standard() }
}

fn device_cert(ca: &CertificateAuthority, model: &str, serial: &str, rng: &mut SeedSource) -> (Certificate, KeyPair) {
    let keys = legacy(rng);
    let csr = CertificateSigningRequest::create(
        SubjectInfo::device("dev", model, serial),
        &[&keys],
        KeyUsage::SignData,
        None,
    )
    .unwrap();
    (ca.issue(&csr, &IssueProfile::end_entity(30 * DAY), NOW).unwrap(), keys)
}

fn entry(scope: Scope) -> RevocationEntry {
    RevocationEntry { scope, reason: Reason::Compromise, revoked_at: NOW }
}

fn issue(p: &Pki, prior: u64, entries: Vec<RevocationEntry>) -> RevocationList {
    issue_revocation_list(&p.root.keys, &p.root.cert, &p.acl, prior, entries, NOW).unwrap()
}

#[test]
fn issuing_lists() {
    let p = pki(1);
    let rl = issue(&p, 0, Vec::new());
    assert_eq!(rl.version(), 1);
    assert!(rl.verify(&p.root.cert).is_valid());
    assert_eq!(rl.signatures.len(), 2);
    let mut rng = SeedSource::from_u64(2);
    let (c, _) = device_cert(&p.pl, "M1", "S1", &mut rng);
    assert!(!rl.is_revoked(&c));
    assert_eq!(issue(&p, 4, Vec::new()).version(), 5);

    let err = issue_revocation_list(&p.pl.keys, &p.pl.cert, &p.acl, 0, Vec::new(), NOW).unwrap_err();
    assert!(matches!(err, Error::AclDenied(_)));
    let mut operator_acl = AccessControlList::standard();
    assert!(operator_acl.grant(Role::Operator, Permission::IssueRl).is_err());

    let text = rl.to_armor();
    assert!(text.starts_with("-----BEGIN PQPKI REVOCATION LIST-----"));
    assert_eq!(RevocationList::from_armor(&text).unwrap(), rl);
}

#[test]
fn scope_matching() {
    let p = pki(3);
    let mut rng = SeedSource::from_u64(4);
    let corpus: Vec<Certificate> = (0..100)
        .map(|i| device_cert(&p.pl, if i % 2 == 0 { "M1" } else { "M2" }, &format!("S{i}"), &mut rng).0)
        .collect();

    let model = issue(&p, 0, vec![entry(Scope::DeviceModel("M1".into()))]);
    for c in &corpus {
        assert_eq!(model.is_revoked(c), c.subject().device_model.as_deref() == Some("M1"));
    }

    let target = corpus[37].serial();
    let serial = issue(&p, 0, vec![entry(Scope::Serial(*target))]);
    let hits: Vec<_> = corpus.iter().filter(|c| serial.is_revoked(c)).collect();
    let oracle: Vec<_> = corpus.iter().filter(|c| c.serial() == target).collect();
    assert_eq!(hits, oracle);
    assert_eq!(hits.len(), 1);

    let ca = issue(&p, 0, vec![entry(Scope::Ca(p.pl.cert.subject().clone()))]);
    assert!(corpus.iter().all(|c| ca.is_revoked(c)));
    assert!(!ca.is_revoked(&p.pl.cert), "the CA's own certificate was issued by the root");
}

#[test]
fn merging_is_monotone_and_fail_closed() {
    let p = pki(5);
    let v3 = issue(&p, 2, Vec::new());
    let v4 = issue(&p, 3, Vec::new());
    assert_eq!(merge_revocation_lists(&v3, &v4, &p.root.cert).unwrap().version(), 4);
    assert_eq!(
        merge_revocation_lists(&v4, &v3, &p.root.cert).unwrap_err(),
        Error::RollbackRejected { current: 4, incoming: 3 }
    );
    assert!(matches!(merge_revocation_lists(&v4, &v4, &p.root.cert), Err(Error::RollbackRejected { .. })));

    // Signature errors take precedence over the version check.
    let mut forged = v3.clone();
    forged.body.entries.push(entry(Scope::DeviceModel("M9".into())));
    assert!(matches!(merge_revocation_lists(&v4, &forged, &p.root.cert), Err(Error::SignatureInvalid(_))));

    let mut downgraded = issue(&p, 9, Vec::new());
    downgraded.signatures.truncate(1);
    assert!(matches!(merge_revocation_lists(&v4, &downgraded, &p.root.cert), Err(Error::SignatureInvalid(_))));
}

#[test]
fn only_root_signed_lists_are_adopted() {
    let p = pki(6);
    // A production-line key claiming the root's name.
    let mut rogue_acl = AccessControlList::standard();
    rogue_acl.grant(Role::Maintainer, Permission::IssueRl).unwrap();
    let mut body_cert = p.pl.cert.clone();
    body_cert.body.subject = p.root.cert.subject().clone();
    let rogue = issue_revocation_list(&p.pl.keys, &body_cert, &rogue_acl, 10, Vec::new(), NOW).unwrap();
    assert!(!rogue.verify(&p.root.cert).is_valid());
    // Checking against a non-root certificate is refused outright.
    assert!(!issue(&p, 0, Vec::new()).verify(&p.pl.cert).is_valid());

    let slot = RevocationSlot::new(p.root.cert.clone());
    assert!(matches!(slot.offer(&rogue), Err(Error::SignatureInvalid(_))));
    assert_eq!(slot.version(), 0);
    assert_eq!(slot.offer(&issue(&p, 0, Vec::new())).unwrap(), 1);
}

#[test]
fn slot_never_goes_backwards_under_contention() {
    let p = pki(7);
    let lists: Vec<RevocationList> = (0..12).map(|v| issue(&p, v, Vec::new())).collect();
    let slot = RevocationSlot::new(p.root.cert.clone());
    std::thread::scope(|s| {
        for t in 0..4 {
            let (slot, lists) = (&slot, &lists);
            s.spawn(move || {
                let mut seen = 0;
                for i in 0..lists.len() {
                    let rl = &lists[(i * 5 + t * 3) % lists.len()];
                    let _ = slot.offer(rl);
                    let v = slot.version();
                    assert!(v >= seen);
                    seen = v;
                }
            });
        }
    });
    assert_eq!(slot.version(), 12);
}

#[test]
fn expiry_policy_behaves_like_elapsed_validity() {
    let p = pki(8);
    let mut rng = SeedSource::from_u64(9);
    let (leaf, _) = device_cert(&p.pl, "M1", "S1", &mut rng);
    let chain = [leaf.clone(), p.pl.cert.clone(), p.root.cert.clone()];
    let rl = issue(
        &p,
        0,
        vec![RevocationEntry { scope: Scope::Serial(*leaf.serial()), reason: Reason::ExpiryPolicy, revoked_at: NOW }],
    );
    let mut with_rl = ValidationPolicy::new(p.root.cert.clone(), NOW);
    with_rl.revocation_list = Some(rl);
    let by_policy = validate_chain(&chain, &with_rl).unwrap();
    let by_time = validate_chain(&chain, &ValidationPolicy::new(p.root.cert.clone(), leaf.body.not_after + 1)).unwrap();
    assert_eq!(by_policy.failures(), by_time.failures());
    assert_eq!(by_policy.failures(), [Failure::Expired].into());

    let compromised = issue(&p, 0, vec![entry(Scope::Serial(*leaf.serial()))]);
    with_rl.revocation_list = Some(compromised);
    assert_eq!(validate_chain(&chain, &with_rl).unwrap().failures(), [Failure::Revoked].into());
}

#[test]
fn unsigned_list_in_policy_fails() {
    let p = pki(10);
    let mut rng = SeedSource::from_u64(11);
    let (leaf, _) = device_cert(&p.pl, "M1", "S1", &mut rng);
    let mut rl = issue(&p, 0, Vec::new());
    rl.body.version = 7;
    let mut policy = ValidationPolicy::new(p.root.cert.clone(), NOW);
    policy.revocation_list = Some(rl);
    let r = validate_chain(&[leaf, p.pl.cert.clone(), p.root.cert.clone()], &policy).unwrap();
    assert_eq!(r.failures(), [Failure::RevocationListInvalid].into());
}

fn offline_device(p: &Pki, rng: &mut SeedSource) -> Party {
    // Revocation handling needs no TEE, so an operator stands in for the device.
    let keys = Arc::new(legacy(rng));
    let mut party = Party::new(SubjectInfo::new("Field unit", Role::Operator), keys, None).unwrap();
    party.trust_store = vec![p.root.cert.clone()];
    party.revocation = Some(RevocationSlot::new(p.root.cert.clone()));
    party
}

#[test]
fn firmware_bundles() {
    let p = pki(12);
    let mut rng = SeedSource::from_u64(13);
    let mut device = offline_device(&p, &mut rng);
    let signer_chain = vec![p.pl.cert.clone(), p.root.cert.clone()];

    let v2 = issue(&p, 1, Vec::new());
    let bundle = pack_firmware_bundle(b"image-2".to_vec(), v2, &p.pl.keys, signer_chain.clone()).unwrap();
    assert_eq!(FirmwareBundle::decode(&bundle.encode().unwrap()).unwrap(), bundle);
    assert_eq!(FirmwareBundle::from_armor(&bundle.to_armor().unwrap()).unwrap(), bundle);
    assert_eq!(apply_offline_update(&mut device, &bundle, NOW).unwrap(), 2);
    assert_eq!(device.firmware.as_deref(), Some(&b"image-2"[..]));

    let v3 = issue(&p, 2, Vec::new());
    let mut tampered = pack_firmware_bundle(b"image-3".to_vec(), v3.clone(), &p.pl.keys, signer_chain.clone()).unwrap();
    tampered.firmware_blob[0] ^= 1;
    assert!(matches!(apply_offline_update(&mut device, &tampered, NOW), Err(Error::BundleInvalid(_))));
    assert_eq!(device.firmware.as_deref(), Some(&b"image-2"[..]));

    let v1 = issue(&p, 0, Vec::new());
    let stale = pack_firmware_bundle(b"image-old".to_vec(), v1, &p.pl.keys, signer_chain.clone()).unwrap();
    assert!(matches!(
        apply_offline_update(&mut device, &stale, NOW),
        Err(Error::RollbackRejected { current: 2, incoming: 1 })
    ));
    assert_eq!(device.firmware.as_deref(), Some(&b"image-2"[..]));
    assert_eq!(device.revocation.as_ref().unwrap().version(), 2);

    // A signer chain that does not reach the device's anchor is refused.
    let other = pki(14);
    let foreign = pack_firmware_bundle(
        b"x".to_vec(),
        v3.clone(),
        &other.pl.keys,
        vec![other.pl.cert.clone(), other.root.cert.clone()],
    );
    assert!(matches!(apply_offline_update(&mut device, &foreign.unwrap(), NOW), Err(Error::BundleInvalid(_))));

    let good = pack_firmware_bundle(b"image-3".to_vec(), v3, &p.pl.keys, signer_chain).unwrap();
    assert_eq!(apply_offline_update(&mut device, &good, NOW).unwrap(), 3);
}

#[test]
fn collapse_reissues_under_the_root() {
    let p = pki(15);
    let mut rng = SeedSource::from_u64(16);
    let (leaf, keys) = device_cert(&p.pl, "M1", "S1", &mut rng);
    let evidence = vec![leaf.clone(), p.pl.cert.clone(), p.root.cert.clone()];
    let before = p.root.journal.len();
    let collapsed = collapse_certificate(&p.root, &p.acl, &keys, &evidence, None, DAY, NOW).unwrap();
    assert_eq!(collapsed.issuer(), p.root.cert.subject());
    assert_eq!(collapsed.subject(), leaf.subject());
    assert_eq!(collapsed.body.not_after - collapsed.body.not_before, DAY);
    let chain = [collapsed.clone(), p.root.cert.clone()];
    assert!(validate_chain(&chain, &ValidationPolicy::new(p.root.cert.clone(), NOW)).unwrap().is_ok());

    let again = collapse_certificate(&p.root, &p.acl, &keys, &chain, None, DAY, NOW).unwrap();
    assert_ne!(again.serial(), collapsed.serial());
    let serials: std::collections::BTreeSet<_> = p.root.journal.records().iter().map(|r| r.serial).collect();
    assert_eq!(serials.len(), p.root.journal.len());
    assert_eq!(p.root.journal.len(), before + 2);

    let revoked = issue(&p, 0, vec![entry(Scope::DeviceModel("M1".into()))]);
    let err = collapse_certificate(&p.root, &p.acl, &keys, &evidence, Some(&revoked), DAY, NOW).unwrap_err();
    assert!(matches!(err, Error::EvidenceRejected(_)));
    let late = leaf.body.not_after + 1;
    assert!(matches!(
        collapse_certificate(&p.root, &p.acl, &keys, &evidence, None, DAY, late),
        Err(Error::EvidenceRejected(_))
    ));
    let not_a_device = [p.pl.cert.clone(), p.root.cert.clone()];
    assert!(matches!(
        collapse_certificate(&p.root, &p.acl, &keys, &not_a_device, None, DAY, NOW),
        Err(Error::EvidenceRejected(_))
    ));
    assert!(matches!(collapse_certificate(&p.pl, &p.acl, &keys, &evidence, None, DAY, NOW), Err(Error::AclDenied(_))));
}
