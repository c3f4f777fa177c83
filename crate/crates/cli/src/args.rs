use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeKind {
    ToyDl,
    Wots,
    Xmss,
    Hybrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupKind {
    Standard,
    Medium,
    Breakable,
}

/// Scheme selection shared by `keygen` and `bench run`. A hybrid pairs a
/// TOY_DL key from `--group` with an XMSS key from `--n/--w/--h`.
#[derive(Args, Debug, Clone)]
pub struct SchemeArgs {
    #[arg(long, default_value_t = 32)]
    pub n: usize,
    #[arg(long, default_value_t = 16)]
    pub w: u16,
    #[arg(long, default_value_t = 10)]
    pub h: u8,
    #[arg(long, value_enum, default_value = "standard")]
    pub group: GroupKind,
}

#[derive(Args)]
pub struct KeygenArgs {
    #[arg(long, value_enum)]
    pub scheme: SchemeKind,
    #[command(flatten)]
    pub params: SchemeArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the public half.
    #[arg(long)]
    pub pub_out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SignArgs {
    #[arg(long)]
    pub key: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Public key file or full key file.
    #[arg(long = "pub")]
    pub public: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub sig: PathBuf,
}

#[derive(Subcommand)]
pub enum CertCommand {
    /// Self-sign a maintainer root.
    SelfSign {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        cn: String,
        #[arg(long, default_value_t = 10 * 365 * 86400)]
        ttl: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Issue a certificate for a CSR.
    Issue {
        #[arg(long)]
        ca_key: PathBuf,
        #[arg(long)]
        ca_cert: PathBuf,
        #[arg(long)]
        csr: PathBuf,
        #[arg(long, default_value_t = 86400)]
        ttl: u64,
        /// Issue a CA certificate (SIGN_CERTS keys, hybrid required).
        #[arg(long)]
        sub_ca: bool,
        /// Override the profile's hybrid requirement.
        #[arg(long)]
        hybrid_required: Option<bool>,
        #[arg(long)]
        service_zone_state: Option<String>,
        /// Issuance journal; defaults to the CA certificate path plus `.journal`.
        #[arg(long)]
        journal: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate a chain given leaf first.
    Validate {
        #[arg(required = true)]
        chain: Vec<PathBuf>,
        #[arg(long)]
        anchor: PathBuf,
        #[arg(long)]
        rl: Option<PathBuf>,
        #[arg(long)]
        require_hybrid: bool,
        /// Hex pin digest; repeatable.
        #[arg(long)]
        pin: Vec<String>,
        #[arg(long, default_value_t = 4)]
        max_chain: usize,
    },
    /// Print a certificate's fields.
    Show {
        cert: PathBuf,
    },
    /// Print the pin digest.
    Pin {
        cert: PathBuf,
    },
}

#[derive(Subcommand)]
pub enum CsrCommand {
    /// Create a CSR signed by every given key.
    Create {
        #[arg(long, required = true)]
        key: Vec<PathBuf>,
        #[arg(long)]
        cn: String,
        #[arg(long, default_value = "DEVICE")]
        role: String,
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        serial: Option<String>,
        #[arg(long, default_value = "SIGN_DATA")]
        usage: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
pub enum EnrollCommand {
    /// Run one simulated enrollment. Flags override the scenario file.
    Run(EnrollArgs),
}

#[derive(Args)]
pub struct EnrollArgs {
    /// Scenario file of `key=value` lines.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// FRONTEND, DEVICE_API:MANUFACTURER or DEVICE_API:OPERATOR.
    #[arg(long)]
    pub path: Option<String>,
    /// CLASSICAL or HYBRID.
    #[arg(long)]
    pub protection: Option<String>,
    #[arg(long)]
    pub device_model: Option<String>,
    #[arg(long)]
    pub device_serial: Option<String>,
    #[arg(long)]
    pub manufacturer_report: Option<bool>,
    #[arg(long)]
    pub token_present: Option<bool>,
    #[arg(long)]
    pub modify_probability: Option<f64>,
    /// CONTROL, CERT_MATERIAL or ANY.
    #[arg(long)]
    pub modify_channel: Option<String>,
    #[arg(long)]
    pub eavesdrop: Option<bool>,
    #[arg(long)]
    pub replay: Option<bool>,
    #[arg(long)]
    pub record_for_later: Option<bool>,
    #[arg(long)]
    pub substitute_frontend: Option<bool>,
    #[arg(long)]
    pub adversary_seed: Option<u64>,
    #[arg(long)]
    pub quantum_budget: Option<u64>,
    #[arg(long)]
    pub transcript_out: Option<PathBuf>,
    #[arg(long)]
    pub cert_out: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum SndlCommand {
    /// Attack a recorded transcript with a bounded discrete-log search.
    Replay {
        #[arg(long)]
        transcript: PathBuf,
        #[arg(long)]
        budget: Option<u64>,
    },
}

#[derive(Subcommand)]
pub enum RevokeCommand {
    /// Sign a new list at the prior version plus one.
    Issue {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        cert: PathBuf,
        /// ACL file of `ROLE=PERM,...` lines; the standard ACL when absent.
        #[arg(long)]
        acl: Option<PathBuf>,
        /// Version of the list being replaced.
        #[arg(long, default_value_t = 0)]
        prior_version: u64,
        /// Revoke a certificate serial (32 hex digits); repeatable.
        #[arg(long)]
        serial: Vec<String>,
        /// Revoke a device model; repeatable.
        #[arg(long)]
        model: Vec<String>,
        /// Revoke everything a CA issued, given its certificate; repeatable.
        #[arg(long)]
        ca: Vec<PathBuf>,
        #[arg(long, default_value = "COMPROMISE")]
        reason: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a certificate against a root-verified list; REVOKED exits 1.
    Check {
        #[arg(long)]
        rl: PathBuf,
        #[arg(long)]
        root: PathBuf,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Adopt `incoming` over `current` if it is root-signed and newer.
    Merge {
        #[arg(long)]
        current: PathBuf,
        #[arg(long)]
        incoming: PathBuf,
        #[arg(long)]
        root: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
pub enum BundleCommand {
    /// Sign firmware and a revocation list together.
    Pack {
        #[arg(long)]
        firmware: PathBuf,
        #[arg(long)]
        rl: PathBuf,
        #[arg(long)]
        key: PathBuf,
        /// Signer certificate first, ending at the root; repeatable.
        #[arg(long, required = true)]
        chain: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify a bundle as an offline device would and install its contents.
    Apply {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        root: PathBuf,
        /// The device's stored list, if any.
        #[arg(long)]
        current_rl: Option<PathBuf>,
        #[arg(long)]
        firmware_out: PathBuf,
        #[arg(long)]
        rl_out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatKind {
    Csv,
    Markdown,
}

#[derive(Subcommand)]
pub enum BenchCommand {
    /// Benchmark native schemes; other names go to the adapter registry.
    Run {
        /// toy-dl, wots, xmss, hybrid or an adapter name; repeatable.
        #[arg(long, required = true)]
        scheme: Vec<String>,
        #[command(flatten)]
        params: SchemeArgs,
        #[arg(long, default_value_t = 5)]
        iterations: usize,
        #[arg(long, default_value_t = 64)]
        message_bytes: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the embedded reference table as CSV.
    Reference {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
pub struct MoscaArgs {
    /// Years the data must stay secret.
    #[arg(long)]
    pub x: f64,
    /// Years the migration takes.
    #[arg(long)]
    pub y: f64,
    /// Years until a quantum break.
    #[arg(long)]
    pub z: f64,
}

#[derive(Args)]
pub struct GroverArgs {
    /// Classical security bits to adjust.
    #[arg(long, required_unless_present = "target")]
    pub bits: Option<u32>,
    /// Quantum security target; prints the symmetric key length needed.
    #[arg(long, conflicts_with = "bits")]
    pub target: Option<u32>,
}

#[derive(Args)]
pub struct ShorArgs {
    /// RSA modulus size in bits.
    #[arg(long, default_value_t = 2048)]
    pub bits: u64,
}

#[derive(Subcommand)]
pub enum KeyserverCommand {
    /// Add a party with a password and role.
    Register {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        party: String,
        #[arg(long)]
        password: String,
        #[arg(long)]
        role: String,
    },
    /// Print a fresh session token.
    Auth {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        party: String,
        #[arg(long)]
        password: String,
        #[arg(long, default_value_t = 300)]
        ttl: u64,
    },
    /// Record that a certificate was injected into a device.
    Report {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        token: String,
        #[arg(long)]
        device_serial: String,
        /// Certificate serial, 32 hex digits.
        #[arg(long)]
        cert_serial: String,
    },
    /// List injection reports for a device (maintainers only).
    Query {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        token: String,
        #[arg(long)]
        device_serial: String,
    },
}
