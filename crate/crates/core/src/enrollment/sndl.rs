//! Store-now-decrypt-later: replays a recorded session against an attacker
//! who can later solve discrete logarithms up to a fixed operation budget.

use std::fmt;
use std::time::{Duration, Instant};

use crate::cert::Certificate;
use crate::encoding::{tags, TlvReader};
use crate::enrollment::adversary::AdversaryConfig;
use crate::enrollment::channel::ChannelMessage;
use crate::enrollment::protocol::{
    parse_chain, EnrollmentTranscript, KeyShare, Session, SessionProtection, TO_DEVICE, TO_FRONTEND,
};
use crate::error::{Error, Result};
use crate::hash::xor_in_place;
use crate::sig::toy_dl::brute_force;

/// Group operations the future attacker may spend per session; far above
/// the breakable subgroup order and far below the standard one.
pub const DEFAULT_QUANTUM_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackOutcome {
    Recovered,
    Infeasible,
}

impl fmt::Display for AttackOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackOutcome::Recovered => "RECOVERED",
            AttackOutcome::Infeasible => "INFEASIBLE",
        })
    }
}

#[derive(Debug, Clone)]
pub struct AttackReport {
    pub seed: u64,
    pub outcome: AttackOutcome,
    pub budget: u64,
    pub recovered_exponent: Option<u64>,
    /// Decrypted sealed payloads as `(payload type, plaintext)`.
    pub recovered_payloads: Vec<(u8, Vec<u8>)>,
    /// Device certificate read out of the provisioning message.
    pub recovered_certificate: Option<Certificate>,
    /// Wrapped configuration secret read out of the provisioning message.
    pub recovered_wrapped_secret: Option<Vec<u8>>,
    pub elapsed: Duration,
    pub detail: String,
}

impl AttackReport {
    fn infeasible(seed: u64, budget: u64, started: Instant, detail: impl Into<String>) -> Self {
        Self {
            seed,
            outcome: AttackOutcome::Infeasible,
            budget,
            recovered_exponent: None,
            recovered_payloads: Vec::new(),
            recovered_certificate: None,
            recovered_wrapped_secret: None,
            elapsed: started.elapsed(),
            detail: detail.into(),
        }
    }
}

/// Works only from `adversary.recorded_log`; the transcript contributes its
/// seed to the report.
pub fn simulate_store_now_decrypt_later(
    transcript: &EnrollmentTranscript,
    adversary: &AdversaryConfig,
    budget: u64,
) -> Result<AttackReport> {
    if adversary.recorded_log.is_empty() {
        return Err(Error::NothingRecorded);
    }
    let started = Instant::now();
    let seed = transcript.seed;

    // Relayed payloads appear once per hop; keep the first copy.
    let mut payloads: Vec<Vec<u8>> = Vec::new();
    for bytes in &adversary.recorded_log {
        if let Ok(m) = ChannelMessage::decode(bytes) {
            if !payloads.contains(&m.payload) {
                payloads.push(m.payload);
            }
        }
    }
    let chain = payloads.iter().find(|p| p.first() == Some(&tags::MSG_FRONTEND_CHAIN));
    let mut offer = None;
    let mut answer = None;
    for p in payloads.iter().filter(|p| p.first() == Some(&tags::MSG_KEY_SHARE)) {
        if let Ok((share, sigs)) = KeyShare::parse(p) {
            if sigs.is_empty() {
                answer.get_or_insert((share, p));
            } else {
                offer.get_or_insert((share, p));
            }
        }
    }
    let (Some(m1), Some((offer, m2)), Some((answer, m3))) = (chain, offer, answer) else {
        return Ok(AttackReport::infeasible(seed, budget, started, "handshake not captured"));
    };

    let a = match brute_force(&offer.group, offer.share, budget) {
        Ok(a) => a,
        Err(Error::Infeasible { .. }) => {
            return Ok(AttackReport::infeasible(
                seed,
                budget,
                started,
                format!(
                    "no discrete log within {budget} operations (q has {} bits)",
                    64 - offer.group.q.leading_zeros()
                ),
            ))
        }
        Err(e) => return Ok(AttackReport::infeasible(seed, budget, started, e.to_string())),
    };
    if offer.protection == SessionProtection::Hybrid {
        let mut report = AttackReport::infeasible(seed, budget, started, "session key also depends on a TEE secret");
        report.recovered_exponent = Some(a);
        return Ok(report);
    }

    let key = Session::derive(offer.group.pow(answer.share, a), &[m1, m2, m3], None);
    let (mut to_device, mut to_frontend) = (0u64, 0u64);
    let mut recovered_payloads = Vec::new();
    let mut recovered_certificate = None;
    let mut recovered_wrapped_secret = None;
    for p in &payloads {
        let Some(&ty) = p.first() else { continue };
        let (direction, counter) = match ty {
            tags::MSG_CHALLENGE | tags::MSG_PROVISION => (TO_DEVICE, &mut to_device),
            tags::MSG_CSR => (TO_FRONTEND, &mut to_frontend),
            _ => continue,
        };
        let mut r = TlvReader::new(p);
        let Ok(ct) = r.read(ty) else { continue };
        let mut pt = ct.to_vec();
        let pad = Session::keystream(&key, direction, *counter, pt.len());
        xor_in_place(&mut pt, &pad);
        *counter += 1;
        if ty == tags::MSG_PROVISION {
            if let Ok((chain, secret)) = parse_chain(&mut TlvReader::new(&pt)) {
                recovered_certificate = chain.into_iter().next();
                recovered_wrapped_secret = secret;
            }
        }
        recovered_payloads.push((ty, pt));
    }
    Ok(AttackReport {
        seed,
        outcome: AttackOutcome::Recovered,
        budget,
        recovered_exponent: Some(a),
        recovered_payloads,
        recovered_certificate,
        recovered_wrapped_secret,
        elapsed: started.elapsed(),
        detail: "classical key agreement solved".into(),
    })
}
