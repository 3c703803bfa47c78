//! Bit-packed canonical encoding shared by every label type.
//!
//! Field widths depend only on `n`, which travels in the archive header, so
//! a record never carries its own width table.

use crate::graph::Vertex;
use crate::tree::{Anc, ExtendedId, Pos};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("record truncated at bit {0}")]
    Truncated(usize),
    #[error("field value {value} exceeds limit {limit}")]
    OutOfRange { value: u64, limit: u64 },
    #[error("{0} trailing bits after record")]
    Trailing(usize),
    #[error("bad magic or version")]
    BadHeader,
    #[error("invalid field: {0}")]
    Invalid(&'static str),
}

/// Number of bits needed to store values `0..=max`.
pub fn bits_for(max: u64) -> u32 {
    (u64::BITS - max.leading_zeros()).max(1)
}

/// Field widths for an `n`-vertex instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Widths {
    pub n: usize,
    /// Vertex IDs and DFS times, `0..=n`.
    pub vid: u32,
    /// Light-depth counters and similar `O(log n)` quantities.
    pub small: u32,
    /// Sequence lengths.
    pub len: u32,
}

impl Widths {
    pub fn new(n: usize) -> Self {
        let vid = bits_for(n as u64);
        Widths { n, vid, small: bits_for(vid as u64), len: vid + 1 }
    }
}

#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    bytes: Vec<u8>,
    bits: usize,
    counting: bool,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// A writer that only tracks the length.
    pub fn counting() -> Self {
        BitWriter { counting: true, ..Self::default() }
    }

    pub fn put(&mut self, value: u64, width: u32) {
        debug_assert!(width == 64 || value >> width == 0, "{value} does not fit {width} bits");
        if self.counting {
            self.bits += width as usize;
            return;
        }
        let mut rem = width;
        while rem > 0 {
            let off = (self.bits % 8) as u32;
            if off == 0 {
                self.bytes.push(0);
            }
            let take = (8 - off).min(rem);
            let chunk = (value >> (rem - take)) & ((1u64 << take) - 1);
            *self.bytes.last_mut().unwrap() |= (chunk as u8) << (8 - off - take);
            self.bits += take as usize;
            rem -= take;
        }
    }

    pub fn bit(&mut self, b: bool) {
        self.put(b as u64, 1);
    }

    pub fn is_counting(&self) -> bool {
        self.counting
    }

    /// Advances a counting writer without producing bits.
    pub fn skip(&mut self, width: usize) {
        debug_assert!(self.counting);
        self.bits += width;
    }

    pub fn len_bits(&self) -> usize {
        self.bits
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }
}

pub struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
    limit: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        BitReader { data, pos: 0, limit: data.len() * 8 }
    }

    pub fn bit(&mut self) -> Result<bool, FormatError> {
        Ok(self.get(1)? == 1)
    }

    pub fn get(&mut self, width: u32) -> Result<u64, FormatError> {
        if self.pos + width as usize > self.limit {
            return Err(FormatError::Truncated(self.pos));
        }
        let mut v = 0u64;
        let mut rem = width;
        while rem > 0 {
            let off = (self.pos % 8) as u32;
            let take = (8 - off).min(rem);
            let byte = self.data[self.pos / 8] as u64;
            v = v << take | (byte >> (8 - off - take)) & ((1u64 << take) - 1);
            self.pos += take as usize;
            rem -= take;
        }
        Ok(v)
    }

    pub fn get_max(&mut self, width: u32, max: u64) -> Result<u64, FormatError> {
        let v = self.get(width)?;
        if v > max {
            return Err(FormatError::OutOfRange { value: v, limit: max });
        }
        Ok(v)
    }

    /// Accepts only zero padding up to the next byte boundary.
    pub fn finish(self) -> Result<(), FormatError> {
        let rest = self.limit - self.pos;
        if rest >= 8 {
            return Err(FormatError::Trailing(rest));
        }
        Ok(())
    }
}

/// Canonical bit encoding under fixed widths.
pub trait Codec: Sized {
    fn write(&self, w: &mut BitWriter, c: &Widths);
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError>;

    fn to_bytes(&self, c: &Widths) -> Vec<u8> {
        let mut w = BitWriter::new();
        self.write(&mut w, c);
        w.into_bytes()
    }

    fn bit_len(&self, c: &Widths) -> usize {
        let mut w = BitWriter::counting();
        self.write(&mut w, c);
        w.len_bits()
    }

    fn from_bytes(data: &[u8], c: &Widths) -> Result<Self, FormatError> {
        let mut r = BitReader::new(data);
        let v = Self::read(&mut r, c)?;
        r.finish()?;
        Ok(v)
    }
}

pub fn put_vertex(w: &mut BitWriter, v: Vertex, c: &Widths) {
    w.put(v as u64, c.vid);
}

pub fn get_vertex(r: &mut BitReader<'_>, c: &Widths) -> Result<Vertex, FormatError> {
    Ok(r.get_max(c.vid, c.n.saturating_sub(1) as u64)? as Vertex)
}

pub fn put_len(w: &mut BitWriter, len: usize, c: &Widths) {
    w.put(len as u64, c.len);
}

pub fn get_len(r: &mut BitReader<'_>, c: &Widths) -> Result<usize, FormatError> {
    Ok(r.get(c.len)? as usize)
}

impl Codec for bool {
    fn write(&self, w: &mut BitWriter, _: &Widths) {
        w.bit(*self);
    }
    fn read(r: &mut BitReader<'_>, _: &Widths) -> Result<Self, FormatError> {
        r.bit()
    }
}

/// A vertex ID in `vid` bits.
impl Codec for Vertex {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        put_vertex(w, *self, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        get_vertex(r, c)
    }
}

impl<T: Codec> Codec for Option<T> {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        w.bit(self.is_some());
        if let Some(x) = self {
            x.write(w, c);
        }
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(if r.bit()? { Some(T::read(r, c)?) } else { None })
    }
}

impl<T: Codec> Codec for Vec<T> {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        put_len(w, self.len(), c);
        for x in self {
            x.write(w, c);
        }
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        let len = get_len(r, c)?;
        (0..len).map(|_| T::read(r, c)).collect()
    }
}

impl<A: Codec, B: Codec> Codec for (A, B) {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.0.write(w, c);
        self.1.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok((A::read(r, c)?, B::read(r, c)?))
    }
}

impl Codec for Anc {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        w.put(self.tin as u64, c.vid);
        w.put(self.tout as u64, c.vid);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        let tin = r.get_max(c.vid, c.n as u64)? as u32;
        let tout = r.get_max(c.vid, c.n as u64)? as u32;
        Ok(Anc { tin, tout })
    }
}

impl Codec for Pos {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.id.write(w, c);
        self.anc.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(Pos { id: Vertex::read(r, c)?, anc: Anc::read(r, c)? })
    }
}

impl Codec for ExtendedId {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.id.write(w, c);
        self.root.write(w, c);
        self.anc.write(w, c);
        self.heavy.write(w, c);
        w.put(self.nl as u64, c.small);
        self.path.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(ExtendedId {
            id: Vertex::read(r, c)?,
            root: Vertex::read(r, c)?,
            anc: Anc::read(r, c)?,
            heavy: Option::read(r, c)?,
            nl: r.get(c.small)? as u32,
            path: Vertex::read(r, c)?,
        })
    }
}

impl<T: Codec> Codec for std::sync::Arc<T> {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        (**self).write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(std::sync::Arc::new(T::read(r, c)?))
    }
}

/// Writes a fixed 64-bit word.
impl Codec for u64 {
    fn write(&self, w: &mut BitWriter, _: &Widths) {
        w.put(*self, 64);
    }
    fn read(r: &mut BitReader<'_>, _: &Widths) -> Result<Self, FormatError> {
        r.get(64)
    }
}
