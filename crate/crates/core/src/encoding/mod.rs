//! Length-prefixed TLV serialization and the armored text form.
//!
//! Every object is a sequence of `tag (1 byte) | length (4 bytes, big-endian)
//! | value` records. Inside a container, records appear in ascending tag order;
//! a tag repeats only for sequence elements. Integers are fixed-width
//! big-endian. Decoding is strict (unknown tags, wrong widths, reordering
//! and trailing bytes are all rejected), so a decoded value re-encodes to the
//! exact input bytes.

mod armor;
pub mod tags;
mod tlv;

pub use armor::{armor, dearmor, read_records, write_record, ArmorKind};
pub use tlv::{TlvReader, TlvWriter};
