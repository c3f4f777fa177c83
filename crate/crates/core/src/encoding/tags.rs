//! Registered TLV tags.
//!
//! | range       | owner                                        |
//! |-------------|----------------------------------------------|
//! | `0x01-0x0f` | shared certificate / list body fields        |
//! | `0x10-0x2f` | scheme descriptors, keys, signatures         |
//! | `0x30-0x3f` | public key entries                           |
//! | `0x40-0x4f` | certificates, issuance journal               |
//! | `0x50-0x5f` | subject information                          |
//! | `0x60-0x6f` | certificate extensions                       |
//! | `0x70-0x7f` | certificate signing requests, attestation    |
//! | `0x80-0x9f` | revocation lists, firmware bundles           |
//! | `0xa0-0xaf` | key server records                           |
//! | `0xb0-0xbf` | channel messages                             |
//! | `0xc0-0xcf` | control-channel payload types                |
//! | `0xd0-0xdf` | certificate-material payload types           |
//! | `0xe0-0xef` | wrapped keys, token approvals, session data  |

pub const VERSION: u8 = 0x01;
pub const SERIAL: u8 = 0x02;
pub const ISSUER: u8 = 0x03;
pub const SUBJECT: u8 = 0x04;
pub const NOT_BEFORE: u8 = 0x05;
pub const NOT_AFTER: u8 = 0x06;
pub const PUBLIC_KEYS: u8 = 0x07;
pub const EXTENSIONS: u8 = 0x08;

pub const DESCRIPTOR: u8 = 0x10;
pub const SCHEME_ID: u8 = 0x11;
pub const PARAM_N: u8 = 0x12;
pub const PARAM_W: u8 = 0x13;
pub const PARAM_H: u8 = 0x14;
pub const PARAM_P: u8 = 0x15;
pub const PARAM_Q: u8 = 0x16;
pub const PARAM_G: u8 = 0x17;
pub const INNER_DESCRIPTORS: u8 = 0x18;
pub const DISPLAY_NAME: u8 = 0x19;
pub const PARAMS: u8 = 0x1a;

pub const KEY_PAIR: u8 = 0x20;
pub const PUBLIC_KEY: u8 = 0x21;
pub const PRIVATE_KEY: u8 = 0x22;
pub const SIGNER_STATE: u8 = 0x23;
pub const INNER_KEYS: u8 = 0x24;
pub const PUBLIC_KEY_FILE: u8 = 0x25;

pub const SIGNATURE: u8 = 0x28;
pub const PAYLOAD: u8 = 0x29;
pub const LEAF_INDEX: u8 = 0x2a;
pub const COMPONENTS: u8 = 0x2b;

pub const PUBLIC_KEY_ENTRY: u8 = 0x31;
pub const KEY_BYTES: u8 = 0x32;
pub const KEY_USAGE: u8 = 0x33;

pub const CERTIFICATE: u8 = 0x40;
pub const CERT_BODY: u8 = 0x41;
pub const SIGNATURE_LIST: u8 = 0x42;
pub const JOURNAL_RECORD: u8 = 0x43;

pub const COMMON_NAME: u8 = 0x50;
pub const ROLE: u8 = 0x51;
pub const DEVICE_MODEL: u8 = 0x52;
pub const SERIAL_NUMBER: u8 = 0x53;

pub const EXT_HYBRID_REQUIRED: u8 = 0x60;
pub const EXT_ATTESTATION_DIGEST: u8 = 0x61;
pub const EXT_SERVICE_ZONE_STATE: u8 = 0x62;
pub const EXT_DEVICE_BINDING: u8 = 0x63;
pub const EXT_PATH_LEN: u8 = 0x64;

pub const CSR: u8 = 0x70;
pub const CSR_BODY: u8 = 0x71;
pub const ATTESTATION: u8 = 0x72;
pub const PROOFS: u8 = 0x73;
pub const HARDWARE_IDS: u8 = 0x74;
pub const PERIPHERAL_IDS: u8 = 0x75;
pub const ID_ITEM: u8 = 0x76;
pub const NONCE: u8 = 0x77;
pub const TEE_SIGNATURE: u8 = 0x78;

pub const REVOCATION_LIST: u8 = 0x80;
pub const RL_BODY: u8 = 0x81;
pub const ISSUED_AT: u8 = 0x82;
pub const RL_ENTRIES: u8 = 0x83;
pub const RL_ENTRY: u8 = 0x84;
pub const RL_SIGNATURES: u8 = 0x85;
pub const SCOPE_SERIAL: u8 = 0x86;
pub const SCOPE_DEVICE_MODEL: u8 = 0x87;
pub const SCOPE_CA: u8 = 0x88;
pub const REASON: u8 = 0x89;
pub const REVOKED_AT: u8 = 0x8a;

pub const FIRMWARE_BUNDLE: u8 = 0x90;
pub const FIRMWARE_BLOB: u8 = 0x91;
pub const BUNDLE_SIGNATURES: u8 = 0x92;
pub const SIGNER_CERT: u8 = 0x93;

pub const CREDENTIAL: u8 = 0xa0;
pub const PARTY_ID: u8 = 0xa1;
pub const SALT: u8 = 0xa2;
pub const PASSWORD_HASH: u8 = 0xa3;
pub const TOKEN: u8 = 0xa4;
pub const TOKEN_HASH: u8 = 0xa5;
pub const EXPIRES_AT: u8 = 0xa6;
pub const INJECTION_REPORT: u8 = 0xa8;
pub const REPORTER: u8 = 0xa9;
pub const DEVICE_SERIAL: u8 = 0xaa;
pub const REPORTED_AT: u8 = 0xab;

pub const CHANNEL_MESSAGE: u8 = 0xb0;
pub const CHANNEL_KIND: u8 = 0xb1;
pub const SENDER: u8 = 0xb2;
pub const RECEIVER: u8 = 0xb3;
pub const SEQUENCE: u8 = 0xb4;
pub const MESSAGE_PAYLOAD: u8 = 0xb5;
pub const INTEGRITY_TAG: u8 = 0xb6;

pub const MSG_KEY_SHARE: u8 = 0xc0;
pub const MSG_CHALLENGE: u8 = 0xc1;
pub const MSG_INJECT_REQUEST: u8 = 0xc2;
pub const MSG_STATUS: u8 = 0xc3;

pub const MSG_FRONTEND_CHAIN: u8 = 0xd0;
pub const MSG_CSR: u8 = 0xd1;
pub const MSG_PROVISION: u8 = 0xd2;

pub const WRAPPED_KEY: u8 = 0xe0;
pub const EPHEMERAL: u8 = 0xe1;
pub const CIPHERTEXT: u8 = 0xe2;
pub const CHECK_TAG: u8 = 0xe3;
pub const TOKEN_APPROVAL: u8 = 0xe4;
pub const REQUEST_DIGEST: u8 = 0xe5;
pub const GROUP_P: u8 = 0xe6;
pub const GROUP_Q: u8 = 0xe7;
pub const GROUP_G: u8 = 0xe8;
pub const SHARE: u8 = 0xe9;
pub const PROTECTION: u8 = 0xea;
pub const CONFIG_SECRET: u8 = 0xeb;
pub const CHAIN: u8 = 0xec;
