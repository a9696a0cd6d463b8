//! Big-endian byte framing shared by every wire format in the crate.
//!
//! Everything the arbiter bills as on-chain upload, and everything the
//! off-chain meter counts, goes through [`Writer`]; the matching decoders use
//! [`Reader`], which never allocates more than the remaining input.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("unexpected end of input: needed {needed} bytes at offset {offset}, {remaining} left")]
    Truncated {
        offset: usize,
        needed: usize,
        remaining: usize,
    },
    #[error("{0} trailing bytes after message")]
    Trailing(usize),
    #[error("invalid {field}: {value}")]
    Invalid { field: &'static str, value: u64 },
}

#[derive(Debug, Default, Clone)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn u8(&mut self, v: u8) -> &mut Self {
        self.buf.push(v);
        self
    }

    pub fn u32(&mut self, v: u32) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn u64(&mut self, v: u64) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn raw(&mut self, bytes: &[u8]) -> &mut Self {
        self.buf.extend_from_slice(bytes);
        self
    }

    /// One-byte length prefix. Callers guarantee `bytes.len() <= 255`.
    pub fn short(&mut self, bytes: &[u8]) -> &mut Self {
        debug_assert!(bytes.len() <= u8::MAX as usize);
        self.u8(bytes.len() as u8).raw(bytes)
    }

    /// Four-byte length prefix.
    pub fn long(&mut self, bytes: &[u8]) -> &mut Self {
        self.u32(bytes.len() as u32).raw(bytes)
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

#[derive(Debug, Clone)]
pub struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn bytes(&mut self, n: usize) -> Result<&'a [u8], DecodeError> {
        if n > self.remaining() {
            return Err(DecodeError::Truncated {
                offset: self.pos,
                needed: n,
                remaining: self.remaining(),
            });
        }
        let out = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub fn u8(&mut self) -> Result<u8, DecodeError> {
        Ok(self.bytes(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32, DecodeError> {
        let b = self.bytes(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub fn u64(&mut self) -> Result<u64, DecodeError> {
        let b = self.bytes(8)?;
        let mut arr = [0u8; 8];
        arr.copy_from_slice(b);
        Ok(u64::from_be_bytes(arr))
    }

    pub fn short(&mut self) -> Result<&'a [u8], DecodeError> {
        let n = self.u8()? as usize;
        self.bytes(n)
    }

    pub fn long(&mut self) -> Result<&'a [u8], DecodeError> {
        let n = self.u32()? as usize;
        self.bytes(n)
    }

    pub fn finish(self) -> Result<(), DecodeError> {
        match self.remaining() {
            0 => Ok(()),
            n => Err(DecodeError::Trailing(n)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn framing_is_big_endian() {
        let mut w = Writer::new();
        w.u32(0x0102_0304).short(b"ab").long(b"c");
        assert_eq!(w.finish(), vec![1, 2, 3, 4, 2, b'a', b'b', 0, 0, 0, 1, b'c']);
    }

    #[test]
    fn reader_rejects_overlong_length_without_allocating() {
        let mut r = Reader::new(&[0xff, 0xff, 0xff, 0xff, 1]);
        assert!(matches!(r.long(), Err(DecodeError::Truncated { .. })));
    }

    #[test]
    fn reader_reports_trailing_bytes() {
        let mut r = Reader::new(&[7, 8]);
        assert_eq!(r.u8().unwrap(), 7);
        assert_eq!(r.finish(), Err(DecodeError::Trailing(1)));
    }
}
