//! `pqpki`: key, certificate, revocation and enrollment tooling plus the
//! benchmark harness and threat calculators.
//!
//! Exit status is 0 on success, 1 on a domain error or negative verdict
//! (with a stable code on stderr) and 2 on a usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod args;
mod cmd;
mod support;

use args::*;
use support::{parse_config, read_text, system_now, CliError, CliResult, Context, Report};

#[derive(Parser)]
#[command(name = "pqpki", version, about = "Post-quantum PKI toolkit")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Emit one JSON document on stdout instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every random choice; fresh entropy when absent.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Evaluation time in UNIX seconds; the system clock when absent.
    #[arg(long, global = true)]
    now: Option<u64>,
    /// `key=value` file supplying defaults for seed, now and json.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair.
    Keygen(KeygenArgs),
    /// Sign a file, advancing the key's signer state on disk first.
    Sign(SignArgs),
    /// Verify a detached signature; INVALID exits 1.
    Verify(VerifyArgs),
    /// Certificates: self-sign, issue, validate, show, pin.
    #[command(subcommand)]
    Cert(CertCommand),
    /// Certificate signing requests.
    #[command(subcommand)]
    Csr(CsrCommand),
    /// Simulated device enrollment.
    #[command(subcommand)]
    Enroll(EnrollCommand),
    /// Store-now-decrypt-later attack on a recorded session.
    #[command(subcommand)]
    Sndl(SndlCommand),
    /// Revocation lists: issue, check, merge.
    #[command(subcommand)]
    Revoke(RevokeCommand),
    /// Offline firmware and revocation-list bundles.
    #[command(subcommand)]
    Bundle(BundleCommand),
    /// Scheme benchmarks and the reference table.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Check whether data outlives the migration window.
    Mosca(MoscaArgs),
    /// Grover-adjusted security bits.
    Grover(GroverArgs),
    /// Logical resources for factoring an RSA modulus.
    ShorEstimate(ShorArgs),
    /// Party authentication and injection reports.
    #[command(subcommand)]
    Keyserver(KeyserverCommand),
}

/// Flags beat the config file, which beats the defaults.
fn context(g: &Global) -> CliResult<(Context, bool)> {
    let mut seed = None;
    let mut now = None;
    let mut json = false;
    if let Some(path) = &g.config {
        for (k, v) in parse_config(&read_text(path)?)? {
            let bad = || CliError::param(format!("config {k}: cannot parse {v:?}"));
            match k.as_str() {
                "seed" => seed = Some(v.parse().map_err(|_| bad())?),
                "now" => now = Some(v.parse().map_err(|_| bad())?),
                "json" => json = v.parse().map_err(|_| bad())?,
                _ => return Err(CliError::param(format!("unknown config key {k:?}"))),
            }
        }
    }
    let explicit_now = g.now.or(now);
    let ctx = Context { seed: g.seed.or(seed), now: explicit_now.unwrap_or_else(system_now), explicit_now };
    Ok((ctx, g.json || json))
}

fn dispatch(command: Command, ctx: &Context) -> CliResult<Report> {
    match command {
        Command::Keygen(a) => cmd::keys::keygen(a, ctx),
        Command::Sign(a) => cmd::keys::sign(a),
        Command::Verify(a) => cmd::keys::verify(a),
        Command::Cert(c) => cmd::pki::cert(c, ctx),
        Command::Csr(c) => cmd::pki::csr(c),
        Command::Enroll(c) => cmd::sim::enroll(c, ctx),
        Command::Sndl(c) => cmd::sim::sndl(c),
        Command::Revoke(c) => cmd::pki::revoke(c, ctx),
        Command::Bundle(c) => cmd::pki::bundle(c, ctx),
        Command::Bench(c) => cmd::calc::bench(c),
        Command::Mosca(a) => cmd::calc::mosca(a),
        Command::Grover(a) => cmd::calc::grover(a),
        Command::ShorEstimate(a) => cmd::calc::shor(a),
        Command::Keyserver(c) => cmd::keyserver::run(c, ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = context(&cli.global).and_then(|(ctx, json)| Ok((dispatch(cli.command, &ctx)?, json)));
    let json = cli.global.json;
    match result {
        Ok((report, json)) => {
            if json {
                println!("{}", report.json);
            } else {
                print!("{}", report.text);
            }
            match report.negative {
                Some(code) => {
                    eprintln!("{code}");
                    ExitCode::from(1)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            if json {
                println!("{}", serde_json::json!({ "error": e.code, "message": e.message }));
            }
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
