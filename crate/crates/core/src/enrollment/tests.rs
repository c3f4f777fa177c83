use std::sync::OnceLock;

use super::*;
use crate::cert::{validate_chain, CertificateSigningRequest, KeyUsage, Role, ValidationPolicy};
use crate::rng::SeedSource;
use crate::Error;

fn shared() -> &'static Hierarchy {
    static H: OnceLock<Hierarchy> = OnceLock::new();
    H.get_or_init(|| setup_hierarchy(11).unwrap())
}

fn device(h: &Hierarchy, serial: &str, seed: u64) -> Party {
    provision_device(h, "SENSOR-X1", serial, &mut SeedSource::from_u64(seed)).unwrap()
}

fn enroll(
    h: &Hierarchy,
    dev: &mut Party,
    adversary: &mut AdversaryConfig,
    options: &EnrollmentOptions,
) -> EnrollmentTranscript {
    run_enrollment(h, dev, adversary, options).unwrap()
}

#[test]
fn hierarchy_shape() {
    let h = shared();
    let chain = h.production_line.chain();
    assert_eq!(chain.len(), 2);
    let report = validate_chain(&chain, &ValidationPolicy::new(h.root_certificate().clone(), h.now)).unwrap();
    assert!(report.is_ok(), "{report}");
    assert_eq!(chain[0].path_len(), 1);
    assert!(chain[0].can_sign_certs());
    for p in [&h.manufacturer, &h.operator] {
        let c = p.chain();
        assert_eq!(c.len(), 3);
        assert_eq!(c[0].path_len(), 0);
        assert!(validate_chain(&c, &ValidationPolicy::new(h.root_certificate().clone(), h.now)).unwrap().is_ok());
    }
    for p in [&h.maintainer, &h.production_line, &h.manufacturer, &h.operator] {
        assert!(p.pinned_digests.contains(&h.frontend_pin()));
    }
}

#[test]
fn csr_generation() {
    let h = shared();
    let dev = device(h, "SN-CSR", 1);
    let mut rng = SeedSource::from_u64(2);
    let nonce = [7u8; 32];
    let (a, ka) = device_generate_csr(&dev, &nonce, &mut rng).unwrap();
    let (b, kb) = device_generate_csr(&dev, &[8u8; 32], &mut rng).unwrap();
    let ev = a.body.attestation.as_ref().unwrap();
    assert_eq!(ev.nonce, nonce);
    assert_ne!(ka.public_key(), kb.public_key());
    assert_eq!(ev.hardware_ids, b.body.attestation.as_ref().unwrap().hardware_ids);
    let manufacturer_pk = h.manufacturer.keys.public_key();
    assert!(a.body.public_keys.iter().all(|k| k.key_bytes != manufacturer_pk));
    assert!(matches!(device_generate_csr(&h.operator, &nonce, &mut rng), Err(Error::AttestationUnavailable)));
}

#[test]
fn attestation_checks() {
    let h = shared();
    let dev = device(h, "SN-ATT", 3);
    let hw = dev.tee_state.as_ref().unwrap().hardware_ids.clone();
    let mk = h.manufacturer_verifying_key();
    let nonce = [1u8; 32];
    let (csr, _) = device_generate_csr(&dev, &nonce, &mut SeedSource::from_u64(4)).unwrap();
    assert!(verify_attestation(&csr, &hw, &mk, &nonce).unwrap());
    assert!(!verify_attestation(&csr, &hw, &mk, &[2u8; 32]).unwrap());

    // Altering any hardware id byte breaks the TEE signature even when the
    // verifier expects the altered value.
    for i in 0..hw[0].len() {
        let mut altered = csr.clone();
        let ev = altered.body.attestation.as_mut().unwrap();
        let mut bytes = ev.hardware_ids[0].clone().into_bytes();
        bytes[i] = if bytes[i] == b'x' { b'y' } else { b'x' };
        ev.hardware_ids[0] = String::from_utf8(bytes).unwrap();
        let expected = ev.hardware_ids.clone();
        assert!(!verify_attestation(&altered, &expected, &mk, &nonce).unwrap());
    }

    let bare = CertificateSigningRequest::create(dev.subject.clone(), &[&dev.keys], KeyUsage::SignData, None).unwrap();
    assert_eq!(verify_attestation(&bare, &hw, &mk, &nonce), Err(Error::AttestationUnavailable));
}

#[test]
fn happy_path_on_both_injection_paths() {
    let h = shared();
    let paths = [InjectionPath::Frontend, InjectionPath::DeviceApi { via: Role::Manufacturer }];
    for (i, path) in paths.into_iter().enumerate() {
        let serial = format!("SN-HAPPY-{i}");
        let mut dev = device(h, &serial, 10 + i as u64);
        let options = EnrollmentOptions { path, seed: 5, ..Default::default() };
        let t = enroll(h, &mut dev, &mut AdversaryConfig::default(), &options);
        assert_eq!(t.outcome, EnrollmentOutcome::Success, "{path}: {}", t.detail);
        let cert = t.issued_certificate.clone().unwrap();
        assert_eq!(Some(&cert), t.frontend_issued.as_ref());
        assert_eq!(cert.issuer(), &h.production_line.subject);
        let chain = dev.chain();
        assert_eq!(chain.len(), 3);
        assert!(validate_chain(&chain, &ValidationPolicy::new(h.root_certificate().clone(), h.now)).unwrap().is_ok());
        assert!(dev.tee_state.as_ref().unwrap().config_secret.is_some());
        assert!(t.ordered_messages.iter().all(ChannelMessage::is_separated));
    }
    assert!(h.injection_reported("SN-HAPPY-1").unwrap());
    assert!(!h.injection_reported("SN-HAPPY-0").unwrap());
}

#[test]
fn relayed_path_sequences_increase_per_link() {
    let h = shared();
    let mut dev = device(h, "SN-SEQ", 20);
    let options =
        EnrollmentOptions { path: InjectionPath::DeviceApi { via: Role::Manufacturer }, ..Default::default() };
    let t = enroll(h, &mut dev, &mut AdversaryConfig::default(), &options);
    assert_eq!(t.outcome, EnrollmentOutcome::Success);
    let mut last = std::collections::BTreeMap::new();
    for m in &t.ordered_messages {
        let prev = last.insert((m.sender, m.receiver, m.channel_kind), m.sequence).unwrap_or(0);
        assert!(m.sequence > prev);
    }
    assert!(t.ordered_messages.iter().all(|m| m.sender != Role::ProductionLine || m.receiver != Role::Device));
}

#[test]
fn operator_needs_a_manufacturer_report() {
    let h = shared();
    let via_operator =
        EnrollmentOptions { path: InjectionPath::DeviceApi { via: Role::Operator }, ..Default::default() };
    let mut dev = device(h, "SN-OP-1", 30);
    let t = enroll(h, &mut dev, &mut AdversaryConfig::default(), &via_operator);
    assert_eq!(t.outcome, EnrollmentOutcome::Refused);
    assert!(t.issued_certificate.is_none());

    let mut dev = device(h, "SN-OP-2", 31);
    h.report_injection(Role::Manufacturer, "SN-OP-2", [0; 16]).unwrap();
    let t = enroll(h, &mut dev, &mut AdversaryConfig::default(), &via_operator);
    assert_eq!(t.outcome, EnrollmentOutcome::Success, "{}", t.detail);
}

#[test]
fn misconfiguration_is_an_error() {
    let h = shared();
    let mut dev = device(h, "SN-BAD", 40);
    let options = EnrollmentOptions { path: InjectionPath::DeviceApi { via: Role::Maintainer }, ..Default::default() };
    assert!(matches!(run_enrollment(h, &mut dev, &mut AdversaryConfig::default(), &options), Err(Error::Parameter(_))));
}

#[test]
fn substituted_frontend_is_a_pinning_mismatch() {
    let h = shared();
    let mut dev = device(h, "SN-SUB", 50);
    let mut adv = AdversaryConfig { substitute_frontend: true, random_seed: 9, ..Default::default() };
    let t = enroll(h, &mut dev, &mut adv, &EnrollmentOptions::default());
    assert_eq!(t.outcome, EnrollmentOutcome::PinningMismatch);
    assert!(dev.certificate.is_none());
}

#[test]
fn replay_is_detected() {
    let h = shared();
    let mut dev = device(h, "SN-REPLAY", 60);
    let mut adv = AdversaryConfig { replay: true, ..Default::default() };
    let t = enroll(h, &mut dev, &mut adv, &EnrollmentOptions::default());
    assert_eq!(t.outcome, EnrollmentOutcome::DetectedTampering);
}

#[test]
fn passive_adversary_changes_nothing() {
    // Fresh hierarchies: stateful signers advance with every run.
    let (h1, h2) = (setup_hierarchy(21).unwrap(), setup_hierarchy(21).unwrap());
    let options = EnrollmentOptions { seed: 77, ..Default::default() };
    let mut a = device(&h1, "SN-DET", 70);
    let mut b = device(&h2, "SN-DET", 70);
    let quiet = enroll(&h1, &mut a, &mut AdversaryConfig::default(), &options);
    let mut watcher = AdversaryConfig { eavesdrop: true, record_for_later: true, random_seed: 5, ..Default::default() };
    let watched = enroll(&h2, &mut b, &mut watcher, &options);
    assert_eq!(quiet.outcome, EnrollmentOutcome::Success);
    assert_eq!(quiet.ordered_messages, watched.ordered_messages);
    assert_eq!(quiet.delivered, watched.delivered);
    assert_eq!(quiet.issued_certificate, watched.issued_certificate);
    assert_eq!(watcher.observed, quiet.delivered.len());
    assert_eq!(watcher.recorded_log, quiet.delivered);
}

#[test]
fn manufacturer_key_never_on_the_wire() {
    let h = shared();
    let secret = h.manufacturer.keys.components().unwrap()[1].private_key().to_vec();
    let legacy = h.manufacturer.keys.components().unwrap()[0].private_key().to_vec();
    let mut dev = device(h, "SN-LEAK", 80);
    let t = enroll(h, &mut dev, &mut AdversaryConfig::default(), &EnrollmentOptions::default());
    for m in &t.ordered_messages {
        let bytes = m.encode();
        assert!(!bytes.windows(secret.len()).any(|w| w == secret));
        assert!(!bytes.windows(legacy.len()).any(|w| w == legacy));
    }
}

#[test]
fn token_confirmation() {
    let h = shared();
    let csr =
        CertificateSigningRequest::create(h.operator.subject.clone(), &[&h.operator.keys], KeyUsage::SignCerts, None);
    let csr = csr.unwrap();
    assert_eq!(hardware_token_confirm(&h.token, &csr, false).unwrap(), TokenDecision::TokenRequired);
    let TokenDecision::Approved(approval) = hardware_token_confirm(&h.token, &csr, true).unwrap() else {
        panic!("token present");
    };
    let digest = request_digest(&csr).unwrap();
    assert!(approval.verify(&digest, &h.token.public_keys()));
    let mut other = digest;
    other[0] ^= 1;
    assert!(!approval.verify(&other, &h.token.public_keys()));
    let mut forged = approval.clone();
    forged.request_digest = other;
    assert!(!forged.verify(&other, &h.token.public_keys()));
    assert_eq!(TokenApproval::decode(&approval.encode()).unwrap(), approval);
}

#[test]
fn mirror_frontend_without_token() {
    let h = shared();
    let mut rng = SeedSource::from_u64(1);
    let d = provision_mirror_frontend(&h.root_ca, &h.acl, &h.token, false, &mut rng, h.now).unwrap();
    assert!(matches!(d, FrontendProvisioning::TokenRequired));
}

#[test]
fn store_now_decrypt_later() {
    let h = shared();
    let classical = EnrollmentOptions { protection: SessionProtection::Classical, seed: 3, ..Default::default() };
    let mut dev = device(h, "SN-SNDL-1", 90);
    let mut adv = AdversaryConfig { record_for_later: true, ..Default::default() };
    let t = enroll(h, &mut dev, &mut adv, &classical);
    assert_eq!(t.outcome, EnrollmentOutcome::Success);
    let report = simulate_store_now_decrypt_later(&t, &adv, DEFAULT_QUANTUM_BUDGET).unwrap();
    assert_eq!(report.outcome, AttackOutcome::Recovered, "{}", report.detail);
    assert_eq!(report.recovered_certificate, t.issued_certificate);
    // The wrapped secret is readable, the secret itself is not.
    let wrapped = report.recovered_wrapped_secret.unwrap();
    let secret = dev.tee_state.as_ref().unwrap().config_secret.clone().unwrap();
    assert!(!wrapped.windows(secret.len()).any(|w| w == secret));

    let mut dev = device(h, "SN-SNDL-2", 91);
    let mut adv = AdversaryConfig { record_for_later: true, ..Default::default() };
    let t = enroll(h, &mut dev, &mut adv, &EnrollmentOptions::default());
    let report = simulate_store_now_decrypt_later(&t, &adv, DEFAULT_QUANTUM_BUDGET).unwrap();
    assert_eq!(report.outcome, AttackOutcome::Infeasible);
    assert!(report.recovered_certificate.is_none());

    assert_eq!(
        simulate_store_now_decrypt_later(&t, &AdversaryConfig::default(), DEFAULT_QUANTUM_BUDGET).unwrap_err(),
        Error::NothingRecorded
    );
}

#[test]
fn transcript_export_round_trip() {
    let h = shared();
    let mut dev = device(h, "SN-EXPORT", 95);
    let t = enroll(h, &mut dev, &mut AdversaryConfig::default(), &EnrollmentOptions::default());
    let digest = [3u8; 32];
    let text = t.export(&digest).unwrap();
    assert!(text.starts_with("PQPKI-TRANSCRIPT outcome=SUCCESS seed=0 "));
    let (back, d) = EnrollmentTranscript::import(&text).unwrap();
    assert_eq!(d, digest);
    assert_eq!(back.ordered_messages, t.ordered_messages);
    assert_eq!(back.issued_certificate, t.issued_certificate);
    assert_eq!(back.export(&digest).unwrap(), text);
}

#[test]
fn scenario_text_round_trip() {
    let text =
        "seed=4\npath=DEVICE_API:OPERATOR\nprotection=classical\nmodify_probability=0.5\nmodify_channel=CONTROL\n";
    let c = ScenarioConfig::parse(text).unwrap();
    assert_eq!(c.path, InjectionPath::DeviceApi { via: Role::Operator });
    assert_eq!(c.adversary.modify_channel, Some(ChannelKind::Control));
    assert_eq!(ScenarioConfig::parse(&c.to_text()).unwrap(), c);
    assert!(ScenarioConfig::parse("colour=blue").is_err());
    assert!(ScenarioConfig::parse("modify_probability=2").is_err());
}
