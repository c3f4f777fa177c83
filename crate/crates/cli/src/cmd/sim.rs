use pqpki_core::enrollment::{
    run_scenario, simulate_store_now_decrypt_later, AttackReport, EnrollmentTranscript, ScenarioConfig,
    DEFAULT_QUANTUM_BUDGET,
};
use serde_json::json;

use crate::args::{EnrollArgs, EnrollCommand, SndlCommand};
use crate::support::{read_text, write_file, CliResult, Context, Report};

/// Scenario text with flag overrides appended; later keys win.
fn scenario_text(a: &EnrollArgs, ctx: &Context) -> CliResult<String> {
    let mut text = match &a.scenario {
        Some(p) => read_text(p)?,
        None => String::new(),
    };
    if a.path.is_some() {
        // `injector` would otherwise re-route a path given on the command line.
        text = text.lines().filter(|l| !l.trim_start().starts_with("injector")).collect::<Vec<_>>().join("\n");
    }
    text.push('\n');
    let mut set = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            text.push_str(&format!("{k}={v}\n"));
        }
    };
    set("seed", ctx.seed.map(|s| s.to_string()));
    set("now", ctx.explicit_now.map(|s| s.to_string()));
    set("path", a.path.clone());
    set("protection", a.protection.clone());
    set("device_model", a.device_model.clone());
    set("device_serial", a.device_serial.clone());
    set("manufacturer_report", a.manufacturer_report.map(|b| b.to_string()));
    set("token_present", a.token_present.map(|b| b.to_string()));
    set("modify_probability", a.modify_probability.map(|p| p.to_string()));
    set("modify_channel", a.modify_channel.clone());
    set("eavesdrop", a.eavesdrop.map(|b| b.to_string()));
    set("replay", a.replay.map(|b| b.to_string()));
    set("record_for_later", a.record_for_later.map(|b| b.to_string()));
    set("substitute_frontend", a.substitute_frontend.map(|b| b.to_string()));
    set("adversary_seed", a.adversary_seed.map(|s| s.to_string()));
    set("quantum_budget", a.quantum_budget.map(|s| s.to_string()));
    Ok(text)
}

fn attack_json(r: &AttackReport) -> serde_json::Value {
    json!({
        "outcome": r.outcome.to_string(),
        "budget": r.budget,
        "recovered_exponent": r.recovered_exponent,
        "recovered_payloads": r.recovered_payloads.len(),
        "recovered_certificate": r.recovered_certificate.is_some(),
        "elapsed_ms": r.elapsed.as_secs_f64() * 1e3,
        "detail": r.detail,
    })
}

fn attack_text(r: &AttackReport) -> String {
    format!(
        "store-now-decrypt-later: {} in {:.1} ms (budget {}){}\n",
        r.outcome,
        r.elapsed.as_secs_f64() * 1e3,
        r.budget,
        if r.detail.is_empty() { String::new() } else { format!(": {}", r.detail) }
    )
}

pub fn enroll(c: EnrollCommand, ctx: &Context) -> CliResult<Report> {
    let EnrollCommand::Run(a) = c;
    let config = ScenarioConfig::parse(&scenario_text(&a, ctx)?)?;
    let run = run_scenario(&config)?;
    let t = &run.transcript;
    if let Some(p) = &a.transcript_out {
        write_file(p, t.export(&config.digest())?)?;
    }
    if let (Some(p), Some(cert)) = (&a.cert_out, &t.issued_certificate) {
        write_file(p, cert.to_armor()?)?;
    }
    let mut text = format!("{}\n", t.outcome);
    if !t.detail.is_empty() {
        text.push_str(&format!("detail: {}\n", t.detail));
    }
    text.push_str(&format!("messages: {}\n", t.ordered_messages.len()));
    if let Some(cert) = &t.issued_certificate {
        text.push_str(&format!("certificate: {} serial {}\n", cert.subject(), hex::encode(cert.serial())));
    }
    if let Some(r) = &run.attack {
        text.push_str(&attack_text(r));
    }
    let doc = json!({
        "outcome": t.outcome.to_string(),
        "detail": t.detail,
        "messages": t.ordered_messages.len(),
        "certificate_serial": t.issued_certificate.as_ref().map(|c| hex::encode(c.serial())),
        "config_digest": hex::encode(config.digest()),
        "attack": run.attack.as_ref().map(attack_json),
    });
    Ok(Report::new(text, doc))
}

pub fn sndl(c: SndlCommand) -> CliResult<Report> {
    let SndlCommand::Replay { transcript, budget } = c;
    let (t, _) = EnrollmentTranscript::import(&read_text(&transcript)?)?;
    let report = simulate_store_now_decrypt_later(&t, &t.as_recording(), budget.unwrap_or(DEFAULT_QUANTUM_BUDGET))?;
    Ok(Report::new(attack_text(&report), attack_json(&report)))
}
