use std::fmt;

use crate::encoding::{tags, TlvReader, TlvWriter};
use crate::error::{Error, Result};
use crate::sig::toy_dl::DlGroup;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeId {
    ToyDl,
    WotsPlus,
    XmssMt,
    Hybrid,
}

impl SchemeId {
    pub fn code(self) -> u8 {
        match self {
            SchemeId::ToyDl => 1,
            SchemeId::WotsPlus => 2,
            SchemeId::XmssMt => 3,
            SchemeId::Hybrid => 4,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        Ok(match code {
            1 => SchemeId::ToyDl,
            2 => SchemeId::WotsPlus,
            3 => SchemeId::XmssMt,
            4 => SchemeId::Hybrid,
            other => return Err(Error::decode(format!("unknown scheme id {other}"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::ToyDl => "TOY_DL",
            SchemeId::WotsPlus => "WOTS_PLUS",
            SchemeId::XmssMt => "XMSS_MT",
            SchemeId::Hybrid => "HYBRID",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Winternitz parameters: hash output length `n` in bytes and the
/// Winternitz parameter `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WotsParams {
    pub n: usize,
    pub w: u16,
}

pub const SUPPORTED_N: [usize; 3] = [16, 24, 32];
pub const SUPPORTED_W: [u16; 3] = [4, 16, 256];
pub const MAX_TREE_HEIGHT: u8 = 20;

impl WotsParams {
    pub fn new(n: usize, w: u16) -> Result<Self> {
        let p = Self { n, w };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !SUPPORTED_N.contains(&self.n) {
            return Err(Error::param(format!("n = {} not in {{16, 24, 32}}", self.n)));
        }
        if !SUPPORTED_W.contains(&self.w) {
            return Err(Error::param(format!("w = {} not in {{4, 16, 256}}", self.w)));
        }
        Ok(())
    }

    pub fn log_w(&self) -> u32 {
        self.w.trailing_zeros()
    }

    /// `(len1, len2, len)` for these parameters.
    pub fn chain_lengths(&self) -> (usize, usize, usize) {
        let log_w = self.log_w() as usize;
        let len1 = (8 * self.n).div_ceil(log_w);
        // floor(log2(x) / log_w) == floor(floor(log2 x) / log_w) for integer log_w.
        let max_checksum = len1 * (self.w as usize - 1);
        let len2 = (max_checksum.ilog2() as usize) / log_w + 1;
        (len1, len2, len1 + len2)
    }

    pub fn signature_len(&self) -> usize {
        self.chain_lengths().2 * self.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct XmssParams {
    pub wots: WotsParams,
    pub h: u8,
}

impl XmssParams {
    pub fn new(n: usize, w: u16, h: u8) -> Result<Self> {
        let p = Self { wots: WotsParams { n, w }, h };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.wots.validate()?;
        if !(1..=MAX_TREE_HEIGHT).contains(&self.h) {
            return Err(Error::param(format!("h = {} not in 1..=20", self.h)));
        }
        Ok(())
    }

    pub fn capacity(&self) -> u64 {
        1u64 << self.h
    }

    /// index || randomizer || WOTS+ chains || authentication path
    pub fn signature_len(&self) -> usize {
        let n = self.wots.n;
        4 + n + self.wots.signature_len() + self.h as usize * n
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeParams {
    ToyDl(DlGroup),
    WotsPlus(WotsParams),
    Xmss(XmssParams),
    /// Legacy (quantum-vulnerable) component first, post-quantum second.
    Hybrid(Box<[SchemeDescriptor; 2]>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeDescriptor {
    pub params: SchemeParams,
    pub display_name: String,
}

impl SchemeDescriptor {
    pub fn toy_dl(group: DlGroup) -> Self {
        let name = format!("TOY-DL q={} bits", 64 - group.q.leading_zeros());
        Self { params: SchemeParams::ToyDl(group), display_name: name }
    }

    pub fn wots(n: usize, w: u16) -> Result<Self> {
        let p = WotsParams::new(n, w)?;
        Ok(Self { params: SchemeParams::WotsPlus(p), display_name: format!("WOTS+ n={n} w={w}") })
    }

    pub fn xmss(n: usize, w: u16, h: u8) -> Result<Self> {
        let p = XmssParams::new(n, w, h)?;
        Ok(Self { params: SchemeParams::Xmss(p), display_name: format!("XMSS h={h} n={n} w={w}") })
    }

    pub fn hybrid(legacy: SchemeDescriptor, post_quantum: SchemeDescriptor) -> Result<Self> {
        let name = format!("HYBRID({} + {})", legacy.display_name, post_quantum.display_name);
        let d = Self { params: SchemeParams::Hybrid(Box::new([legacy, post_quantum])), display_name: name };
        d.validate()?;
        Ok(d)
    }

    pub fn id(&self) -> SchemeId {
        match self.params {
            SchemeParams::ToyDl(_) => SchemeId::ToyDl,
            SchemeParams::WotsPlus(_) => SchemeId::WotsPlus,
            SchemeParams::Xmss(_) => SchemeId::XmssMt,
            SchemeParams::Hybrid(_) => SchemeId::Hybrid,
        }
    }

    /// True for schemes broken by Shor's algorithm.
    pub fn quantum_vulnerable(&self) -> bool {
        match &self.params {
            SchemeParams::ToyDl(_) => true,
            SchemeParams::WotsPlus(_) | SchemeParams::Xmss(_) => false,
            SchemeParams::Hybrid(inner) => inner.iter().all(|d| d.quantum_vulnerable()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.params {
            SchemeParams::ToyDl(g) => g.validate(),
            SchemeParams::WotsPlus(p) => p.validate(),
            SchemeParams::Xmss(p) => p.validate(),
            SchemeParams::Hybrid(inner) => {
                let [legacy, pq] = inner.as_ref();
                if legacy.id() == SchemeId::Hybrid || pq.id() == SchemeId::Hybrid {
                    return Err(Error::param("hybrid components cannot themselves be hybrid"));
                }
                if !legacy.quantum_vulnerable() || pq.quantum_vulnerable() {
                    return Err(Error::param(
                        "hybrid needs a quantum-vulnerable first component and a quantum-resistant second",
                    ));
                }
                legacy.validate()?;
                pq.validate()
            }
        }
    }

    /// Closed-form signature payload length; `None` for hybrid, whose
    /// signature is a pair of component signatures.
    pub fn signature_len(&self) -> Option<usize> {
        match &self.params {
            SchemeParams::ToyDl(_) => Some(crate::sig::toy_dl::SIGNATURE_LEN),
            SchemeParams::WotsPlus(p) => Some(p.signature_len()),
            SchemeParams::Xmss(p) => Some(p.signature_len()),
            SchemeParams::Hybrid(_) => None,
        }
    }

    pub fn hybrid_components(&self) -> Option<&[SchemeDescriptor; 2]> {
        match &self.params {
            SchemeParams::Hybrid(inner) => Some(inner),
            _ => None,
        }
    }

    pub(crate) fn encode_into(&self, w: &mut TlvWriter) {
        w.nested(tags::DESCRIPTOR, |d| {
            d.u8(tags::SCHEME_ID, self.id().code());
            d.text(tags::DISPLAY_NAME, &self.display_name);
            d.nested(tags::PARAMS, |p| match &self.params {
                SchemeParams::ToyDl(g) => {
                    p.u64(tags::PARAM_P, g.p).u64(tags::PARAM_Q, g.q).u64(tags::PARAM_G, g.g);
                }
                SchemeParams::WotsPlus(wp) => {
                    p.u8(tags::PARAM_N, wp.n as u8).u16(tags::PARAM_W, wp.w);
                }
                SchemeParams::Xmss(xp) => {
                    p.u8(tags::PARAM_N, xp.wots.n as u8).u16(tags::PARAM_W, xp.wots.w).u8(tags::PARAM_H, xp.h);
                }
                SchemeParams::Hybrid(inner) => {
                    p.nested(tags::INNER_DESCRIPTORS, |i| {
                        inner[0].encode_into(i);
                        inner[1].encode_into(i);
                    });
                }
            });
        });
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = TlvWriter::new();
        self.encode_into(&mut w);
        w.into_bytes()
    }

    pub(crate) fn decode_from(r: &mut TlvReader<'_>) -> Result<Self> {
        let mut d = r.nested(tags::DESCRIPTOR)?;
        let id = SchemeId::from_code(d.u8(tags::SCHEME_ID)?)?;
        let display_name = d.text(tags::DISPLAY_NAME)?;
        let mut p = d.nested(tags::PARAMS)?;
        d.finish()?;
        let params = match id {
            SchemeId::ToyDl => SchemeParams::ToyDl(DlGroup {
                p: p.u64(tags::PARAM_P)?,
                q: p.u64(tags::PARAM_Q)?,
                g: p.u64(tags::PARAM_G)?,
            }),
            SchemeId::WotsPlus => {
                SchemeParams::WotsPlus(WotsParams { n: p.u8(tags::PARAM_N)? as usize, w: p.u16(tags::PARAM_W)? })
            }
            SchemeId::XmssMt => {
                let n = p.u8(tags::PARAM_N)? as usize;
                let w = p.u16(tags::PARAM_W)?;
                SchemeParams::Xmss(XmssParams { wots: WotsParams { n, w }, h: p.u8(tags::PARAM_H)? })
            }
            SchemeId::Hybrid => {
                let mut i = p.nested(tags::INNER_DESCRIPTORS)?;
                let legacy = Self::decode_from(&mut i)?;
                let pq = Self::decode_from(&mut i)?;
                i.finish()?;
                SchemeParams::Hybrid(Box::new([legacy, pq]))
            }
        };
        p.finish()?;
        let desc = Self { params, display_name };
        desc.validate().map_err(|e| Error::decode(format!("descriptor: {e}")))?;
        Ok(desc)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = TlvReader::new(bytes);
        let d = Self::decode_from(&mut r)?;
        r.finish()?;
        Ok(d)
    }
}

impl fmt::Display for SchemeDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_name)
    }
}
