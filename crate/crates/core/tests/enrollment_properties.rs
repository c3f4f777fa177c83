use std::collections::BTreeMap;

use pqpki_core::cert::{validate_chain, Role, ValidationPolicy};
use pqpki_core::enrollment::{
    device_generate_csr, provision_device, run_enrollment, run_scenario, setup_hierarchy, verify_attestation,
    AdversaryConfig, ChannelKind, ChannelMessage, EnrollmentOptions, EnrollmentOutcome, EnrollmentTranscript,
    Hierarchy, InjectionPath, ScenarioConfig, SessionProtection,
};
use pqpki_core::SeedSource;
use proptest::prelude::*;

fn check_separation(t: &EnrollmentTranscript) {
    let mut last = BTreeMap::new();
    for m in &t.ordered_messages {
        assert!(m.is_separated(), "payload type {:#x} on {}", m.payload_type().unwrap_or(0), m.channel_kind);
        let prev = last.insert((m.sender, m.receiver, m.channel_kind), m.sequence).unwrap_or(0);
        assert!(m.sequence > prev);
    }
}

/// SUCCESS must mean the device holds exactly what the frontend signed and
/// that it validates against the maintainer root.
fn check_safety(h: &Hierarchy, t: &EnrollmentTranscript) {
    match t.outcome {
        EnrollmentOutcome::Success => {
            let cert = t.issued_certificate.as_ref().expect("success carries a certificate");
            assert_eq!(Some(cert), t.frontend_issued.as_ref());
            let chain = [cert.clone(), h.production_line.certificate.clone().unwrap(), h.root_certificate().clone()];
            let mut policy = ValidationPolicy::new(h.root_certificate().clone(), h.now);
            policy.require_hybrid = true;
            assert!(validate_chain(&chain, &policy).unwrap().is_ok());
        }
        _ => assert!(t.issued_certificate.is_none()),
    }
}

/// 1000 adversarial runs across three modification rates. A hierarchy is
/// reused for a batch of runs to stay within its signing capacity.
#[test]
fn tampering_never_yields_a_bad_success() {
    let mut tally = BTreeMap::new();
    for batch in 0..10u64 {
        let h = setup_hierarchy(1000 + batch).unwrap();
        for i in 0..100u64 {
            let run = batch * 100 + i;
            let p = [0.1, 0.5, 1.0][(run % 3) as usize];
            let path = if run % 2 == 0 {
                InjectionPath::Frontend
            } else {
                InjectionPath::DeviceApi { via: Role::Manufacturer }
            };
            let serial = format!("SN-{run}");
            let mut device = provision_device(&h, "M1", &serial, &mut SeedSource::from_u64(run)).unwrap();
            let mut adversary = AdversaryConfig { modify_probability: p, random_seed: run, ..Default::default() };
            let options = EnrollmentOptions { path, seed: run, ..Default::default() };
            let t = run_enrollment(&h, &mut device, &mut adversary, &options).unwrap();
            check_separation(&t);
            check_safety(&h, &t);
            *tally.entry((p.to_string(), t.outcome.name())).or_insert(0) += 1;
        }
    }
    let success_at_one = tally.get(&("1".to_string(), "SUCCESS")).copied().unwrap_or(0);
    assert_eq!(success_at_one, 0, "{tally:?}");
}

#[test]
fn certificate_channel_corruption_always_aborts() {
    let h = setup_hierarchy(77).unwrap();
    for run in 0..100u64 {
        let mut device = provision_device(&h, "M1", &format!("SN-C{run}"), &mut SeedSource::from_u64(run)).unwrap();
        let mut adversary = AdversaryConfig {
            modify_probability: 1.0,
            modify_channel: Some(ChannelKind::CertMaterial),
            random_seed: run,
            ..Default::default()
        };
        let t = run_enrollment(&h, &mut device, &mut adversary, &EnrollmentOptions { seed: run, ..Default::default() })
            .unwrap();
        assert_ne!(t.outcome, EnrollmentOutcome::Success);
        assert!(device.certificate.is_none());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn identical_config_gives_identical_transcript(seed in 0u64..1_000_000, classical: bool, via_api: bool) {
        let config = ScenarioConfig {
            seed,
            protection: if classical { SessionProtection::Classical } else { SessionProtection::Hybrid },
            path: if via_api { InjectionPath::DeviceApi { via: Role::Manufacturer } } else { InjectionPath::Frontend },
            ..Default::default()
        };
        let a = run_scenario(&config).unwrap();
        let b = run_scenario(&config).unwrap();
        prop_assert_eq!(a.transcript.outcome, EnrollmentOutcome::Success);
        let digest = config.digest();
        prop_assert_eq!(a.transcript.export(&digest).unwrap(), b.transcript.export(&digest).unwrap());

        // Passive observation changes nothing.
        let watched = ScenarioConfig {
            adversary: AdversaryConfig { eavesdrop: true, random_seed: seed ^ 1, ..Default::default() },
            ..config.clone()
        };
        let c = run_scenario(&watched).unwrap();
        prop_assert_eq!(&c.transcript.ordered_messages, &a.transcript.ordered_messages);
        prop_assert_eq!(&c.transcript.delivered, &a.transcript.delivered);
    }

    #[test]
    fn manufacturer_key_stays_in_the_tee(seed in 0u64..1_000_000, p in 0.0f64..0.3) {
        let config = ScenarioConfig {
            seed,
            adversary: AdversaryConfig { modify_probability: p, random_seed: seed, ..Default::default() },
            ..Default::default()
        };
        let h = setup_hierarchy(seed).unwrap();
        let secrets: Vec<Vec<u8>> =
            h.manufacturer.keys.components().unwrap().iter().map(|k| k.private_key().to_vec()).collect();
        let run = run_scenario(&config).unwrap();
        for m in &run.transcript.ordered_messages {
            let bytes = m.encode();
            for s in &secrets {
                prop_assert!(!bytes.windows(s.len()).any(|w| w == s.as_slice()));
            }
            prop_assert_eq!(ChannelMessage::decode(&bytes).unwrap(), m.clone());
        }
        check_separation(&run.transcript);
    }
}

#[test]
fn replayed_csr_fails_a_new_challenge() {
    let h = setup_hierarchy(5).unwrap();
    let device = provision_device(&h, "M1", "SN-R", &mut SeedSource::from_u64(1)).unwrap();
    let hw = device.tee_state.as_ref().unwrap().hardware_ids.clone();
    let mk = h.manufacturer_verifying_key();
    let mut rng = SeedSource::from_u64(2);
    let mut old = Vec::new();
    for round in 0..8u8 {
        let nonce = [round; 32];
        let (csr, _) = device_generate_csr(&device, &nonce, &mut rng).unwrap();
        assert!(verify_attestation(&csr, &hw, &mk, &nonce).unwrap());
        for prior in &old {
            assert!(!verify_attestation(prior, &hw, &mk, &nonce).unwrap());
        }
        old.push(csr);
    }
}

#[test]
fn channel_kind_admits_only_its_payloads() {
    for ty in 0u8..=255 {
        let control = ChannelKind::Control.admits(ty);
        let cert = ChannelKind::CertMaterial.admits(ty);
        assert!(!(control && cert), "{ty:#x} admitted on both channels");
    }
}
