pub mod calc;
pub mod keys;
pub mod keyserver;
pub mod pki;
pub mod sim;

use pqpki_core::sig::DlGroup;
use pqpki_core::SchemeDescriptor;

use crate::args::{GroupKind, SchemeArgs, SchemeKind};
use crate::support::CliResult;

pub fn group(kind: GroupKind) -> DlGroup {
    match kind {
        GroupKind::Standard => DlGroup::standard(),
        GroupKind::Medium => DlGroup::medium(),
        GroupKind::Breakable => DlGroup::breakable(),
    }
}

pub fn descriptor(kind: SchemeKind, p: &SchemeArgs) -> CliResult<SchemeDescriptor> {
    Ok(match kind {
        SchemeKind::ToyDl => SchemeDescriptor::toy_dl(group(p.group)),
        SchemeKind::Wots => SchemeDescriptor::wots(p.n, p.w)?,
        SchemeKind::Xmss => SchemeDescriptor::xmss(p.n, p.w, p.h)?,
        SchemeKind::Hybrid => {
            SchemeDescriptor::hybrid(SchemeDescriptor::toy_dl(group(p.group)), SchemeDescriptor::xmss(p.n, p.w, p.h)?)?
        }
    })
}
