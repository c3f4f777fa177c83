use pqpki_core::cert::Role;
use pqpki_core::keyserver::KeyServer;
use serde_json::json;

use crate::args::KeyserverCommand;
use crate::support::{parse_hex, CliResult, Context, Report};

pub fn run(c: KeyserverCommand, ctx: &Context) -> CliResult<Report> {
    match c {
        KeyserverCommand::Register { store, party, password, role } => {
            let role: Role = role.parse()?;
            let ks = KeyServer::load(&store, ctx.rng())?;
            ks.register_party(&party, &password, role)?;
            ks.save(&store)?;
            Ok(Report::new(format!("registered {party} as {role}\n"), json!({ "party": party, "role": role.name() })))
        }
        KeyserverCommand::Auth { store, party, password, ttl } => {
            let ks = KeyServer::load(&store, ctx.rng())?;
            let token = ks.authenticate(&party, &password, ttl, ctx.now)?;
            ks.save(&store)?;
            let hex_token = hex::encode(token.token_bytes);
            Ok(Report::new(
                format!("{hex_token}\nexpires at {}\n", token.expires_at),
                json!({ "token": hex_token, "expires_at": token.expires_at }),
            ))
        }
        KeyserverCommand::Report { store, token, device_serial, cert_serial } => {
            let token = parse_hex::<32>("token", &token)?;
            let cert_serial = parse_hex::<16>("cert serial", &cert_serial)?;
            let ks = KeyServer::load(&store, ctx.rng())?;
            let r = ks.report_injection(&token, &device_serial, cert_serial, ctx.now)?;
            ks.save(&store)?;
            Ok(Report::new(
                format!("recorded injection of {} by {}\n", r.device_serial, r.reporter),
                json!({ "device_serial": r.device_serial, "reporter": r.reporter, "reported_at": r.reported_at }),
            ))
        }
        KeyserverCommand::Query { store, token, device_serial } => {
            let token = parse_hex::<32>("token", &token)?;
            let ks = KeyServer::load(&store, ctx.rng())?;
            let reports = ks.query_injections(&token, &device_serial, ctx.now)?;
            let mut text = String::new();
            let mut rows = Vec::new();
            for r in &reports {
                text.push_str(&format!(
                    "{} {} {} {}\n",
                    r.reported_at,
                    r.reporter,
                    r.device_serial,
                    hex::encode(r.cert_serial)
                ));
                rows.push(json!({
                    "reported_at": r.reported_at,
                    "reporter": r.reporter,
                    "device_serial": r.device_serial,
                    "cert_serial": hex::encode(r.cert_serial),
                }));
            }
            if reports.is_empty() {
                text.push_str("no reports\n");
            }
            Ok(Report::new(text, json!({ "reports": rows })))
        }
    }
}
