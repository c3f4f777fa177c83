use crate::error::{Error, Result};

#[derive(Debug, Default, Clone)]
pub struct TlvWriter {
    buf: Vec<u8>,
}

impl TlvWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bytes(&mut self, tag: u8, value: &[u8]) -> &mut Self {
        let len = u32::try_from(value.len()).expect("TLV value exceeds 4 GiB");
        self.buf.push(tag);
        self.buf.extend_from_slice(&len.to_be_bytes());
        self.buf.extend_from_slice(value);
        self
    }

    pub fn opt_bytes(&mut self, tag: u8, value: Option<&[u8]>) -> &mut Self {
        if let Some(v) = value {
            self.bytes(tag, v);
        }
        self
    }

    pub fn text(&mut self, tag: u8, value: &str) -> &mut Self {
        self.bytes(tag, value.as_bytes())
    }

    pub fn opt_text(&mut self, tag: u8, value: Option<&str>) -> &mut Self {
        self.opt_bytes(tag, value.map(str::as_bytes))
    }

    pub fn u8(&mut self, tag: u8, value: u8) -> &mut Self {
        self.bytes(tag, &[value])
    }

    pub fn u16(&mut self, tag: u8, value: u16) -> &mut Self {
        self.bytes(tag, &value.to_be_bytes())
    }

    pub fn u32(&mut self, tag: u8, value: u32) -> &mut Self {
        self.bytes(tag, &value.to_be_bytes())
    }

    pub fn u64(&mut self, tag: u8, value: u64) -> &mut Self {
        self.bytes(tag, &value.to_be_bytes())
    }

    pub fn bool(&mut self, tag: u8, value: bool) -> &mut Self {
        self.u8(tag, value as u8)
    }

    pub fn nested(&mut self, tag: u8, build: impl FnOnce(&mut TlvWriter)) -> &mut Self {
        let mut inner = TlvWriter::new();
        build(&mut inner);
        self.bytes(tag, &inner.buf)
    }

    /// Appends already-encoded TLV records verbatim.
    pub fn raw(&mut self, encoded: &[u8]) -> &mut Self {
        self.buf.extend_from_slice(encoded);
        self
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
}

/// Strict, in-order reader over a TLV container.
#[derive(Debug, Clone)]
pub struct TlvReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> TlvReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    pub fn peek_tag(&self) -> Option<u8> {
        self.data.get(self.pos).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.pos >= self.data.len()
    }

    fn next_record(&mut self) -> Result<(u8, &'a [u8])> {
        let rest = &self.data[self.pos..];
        if rest.len() < 5 {
            return Err(Error::decode("truncated TLV header"));
        }
        let tag = rest[0];
        let len = u32::from_be_bytes([rest[1], rest[2], rest[3], rest[4]]) as usize;
        if rest.len() - 5 < len {
            return Err(Error::decode(format!("TLV 0x{tag:02x} value truncated")));
        }
        self.pos += 5 + len;
        Ok((tag, &rest[5..5 + len]))
    }

    pub fn read(&mut self, tag: u8) -> Result<&'a [u8]> {
        match self.peek_tag() {
            Some(t) if t == tag => Ok(self.next_record()?.1),
            Some(t) => Err(Error::decode(format!("expected tag 0x{tag:02x}, found 0x{t:02x}"))),
            None => Err(Error::decode(format!("missing tag 0x{tag:02x}"))),
        }
    }

    pub fn optional(&mut self, tag: u8) -> Result<Option<&'a [u8]>> {
        if self.peek_tag() == Some(tag) {
            self.read(tag).map(Some)
        } else {
            Ok(None)
        }
    }

    /// Reads every consecutive record carrying `tag`.
    pub fn repeated(&mut self, tag: u8) -> Result<Vec<&'a [u8]>> {
        let mut items = Vec::new();
        while self.peek_tag() == Some(tag) {
            items.push(self.read(tag)?);
        }
        Ok(items)
    }

    pub fn nested(&mut self, tag: u8) -> Result<TlvReader<'a>> {
        self.read(tag).map(TlvReader::new)
    }

    pub fn text(&mut self, tag: u8) -> Result<String> {
        bytes_to_text(self.read(tag)?)
    }

    pub fn opt_text(&mut self, tag: u8) -> Result<Option<String>> {
        self.optional(tag)?.map(bytes_to_text).transpose()
    }

    pub fn array<const N: usize>(&mut self, tag: u8) -> Result<[u8; N]> {
        let v = self.read(tag)?;
        v.try_into().map_err(|_| Error::decode(format!("tag 0x{tag:02x}: expected {N} bytes, got {}", v.len())))
    }

    pub fn u8(&mut self, tag: u8) -> Result<u8> {
        Ok(self.array::<1>(tag)?[0])
    }

    pub fn u16(&mut self, tag: u8) -> Result<u16> {
        Ok(u16::from_be_bytes(self.array(tag)?))
    }

    pub fn u32(&mut self, tag: u8) -> Result<u32> {
        Ok(u32::from_be_bytes(self.array(tag)?))
    }

    pub fn u64(&mut self, tag: u8) -> Result<u64> {
        Ok(u64::from_be_bytes(self.array(tag)?))
    }

    pub fn opt_u8(&mut self, tag: u8) -> Result<Option<u8>> {
        if self.peek_tag() == Some(tag) {
            self.u8(tag).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn opt_u16(&mut self, tag: u8) -> Result<Option<u16>> {
        if self.peek_tag() == Some(tag) {
            self.u16(tag).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn opt_u32(&mut self, tag: u8) -> Result<Option<u32>> {
        if self.peek_tag() == Some(tag) {
            self.u32(tag).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn opt_u64(&mut self, tag: u8) -> Result<Option<u64>> {
        if self.peek_tag() == Some(tag) {
            self.u64(tag).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn bool(&mut self, tag: u8) -> Result<bool> {
        match self.u8(tag)? {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(Error::decode(format!("boolean tag 0x{tag:02x} holds {other}"))),
        }
    }

    pub fn opt_bool(&mut self, tag: u8) -> Result<Option<bool>> {
        if self.peek_tag() == Some(tag) {
            self.bool(tag).map(Some)
        } else {
            Ok(None)
        }
    }

    /// Fails if any bytes remain unread.
    pub fn finish(self) -> Result<()> {
        match self.peek_tag() {
            None => Ok(()),
            Some(t) => Err(Error::decode(format!("unexpected trailing tag 0x{t:02x}"))),
        }
    }
}

fn bytes_to_text(bytes: &[u8]) -> Result<String> {
    String::from_utf8(bytes.to_vec()).map_err(|_| Error::decode("text field is not UTF-8"))
}
