//! Label archives: a fixed header, sketch scheme headers, an offset table and
//! one length-prefixed record per vertex. A query reads the header and only
//! the records it names. The byte layout is described in `docs/format.md`.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, Read, Seek, SeekFrom, Write};
use std::rc::Rc;
use std::str::FromStr;

use crate::bits::{Codec, FormatError, Widths};
use crate::graph::{sparse_certificate, Graph, Vertex};
use crate::instance::DecodeError;
use crate::sketch::{self, EftEdgeLabel, EftLabels, EftVertexLabel, SchemeParams};
use crate::ss::{self, LabelSs2};
use crate::vft1::{self, Label1Vft};
use crate::vft2::{self, Coverage, Label2Vft};
use crate::vftf::{self, FvftConfig, FvftEncoding, FvftTrace, LabelFvft, VftfError};

pub const MAGIC: [u8; 4] = *b"FTLB";
pub const VERSION: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Vft1,
    Ss2,
    Vft2,
    Eft,
    Fvft,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [Scheme::Vft1, Scheme::Ss2, Scheme::Vft2, Scheme::Eft, Scheme::Fvft];

    pub fn tag(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_tag(t: u8) -> Option<Self> {
        Self::ALL.get((t as usize).wrapping_sub(1)).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Vft1 => "1vft",
            Scheme::Ss2 => "ss2vft",
            Scheme::Vft2 => "2vft",
            Scheme::Eft => "eft",
            Scheme::Fvft => "fvft",
        }
    }

    /// Largest fault set the decoder accepts; `None` for edge faults.
    pub fn budget(self, f: u32) -> Option<usize> {
        match self {
            Scheme::Vft1 => Some(1),
            Scheme::Ss2 | Scheme::Vft2 => Some(2),
            Scheme::Eft => None,
            Scheme::Fvft => Some(f as usize),
        }
    }

    pub fn randomized(self) -> bool {
        matches!(self, Scheme::Eft | Scheme::Fvft)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| format!("unknown scheme {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildConfig {
    pub scheme: Scheme,
    pub f: Option<u32>,
    pub seed: Option<u64>,
    pub certificate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("scheme {0} is randomized and needs a seed")]
    MissingSeed(Scheme),
    #[error("--f is required for fvft and only valid there")]
    FaultBudget,
    #[error("the certificate option applies to vertex-fault schemes only")]
    Certificate,
    #[error(transparent)]
    Fvft(#[from] VftfError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Labels {
    Vft1(Vec<Label1Vft>),
    Ss2(Vec<LabelSs2>),
    Vft2(Vec<Label2Vft>),
    Eft(EftLabels),
    Fvft { f: u32, enc: FvftEncoding },
}

pub fn build(g: &Graph, cfg: &BuildConfig) -> Result<Labels, BuildError> {
    let s = cfg.scheme;
    if (s == Scheme::Fvft) != cfg.f.is_some() {
        return Err(BuildError::FaultBudget);
    }
    if s == Scheme::Eft && cfg.certificate {
        return Err(BuildError::Certificate);
    }
    let seed = if s.randomized() { Some(cfg.seed.ok_or(BuildError::MissingSeed(s))?) } else { None };
    let cert;
    let g = match s.budget(cfg.f.unwrap_or(0)) {
        Some(k) if cfg.certificate && s != Scheme::Fvft => {
            cert = sparse_certificate(g, k + 1);
            &cert
        }
        _ => g,
    };
    Ok(match s {
        Scheme::Vft1 => Labels::Vft1(vft1::encode_1vft(g)),
        Scheme::Ss2 => Labels::Ss2(ss::encode_ss2(g)),
        Scheme::Vft2 => Labels::Vft2(vft2::encode_2vft(g)),
        Scheme::Eft => Labels::Eft(sketch::encode_eft(g, seed.unwrap())),
        Scheme::Fvft => {
            let f = cfg.f.unwrap();
            Labels::Fvft { f, enc: vftf::encode_fvft(g, &FvftConfig::new(f, seed.unwrap()))? }
        }
    })
}

/// One vertex's record. Readers hold records behind `Rc`.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Record {
    Vft1(Label1Vft),
    Ss2(LabelSs2),
    Vft2(Label2Vft),
    Eft(EftVertexLabel, Vec<EftEdgeLabel>),
    Fvft(LabelFvft),
}

impl Record {
    fn write_bytes(&self, c: &Widths) -> Vec<u8> {
        match self {
            Record::Vft1(l) => l.to_bytes(c),
            Record::Ss2(l) => l.to_bytes(c),
            Record::Vft2(l) => l.to_bytes(c),
            Record::Eft(l, e) => {
                let mut w = crate::bits::BitWriter::new();
                l.write(&mut w, c);
                e.write(&mut w, c);
                w.into_bytes()
            }
            Record::Fvft(l) => l.to_bytes(c),
        }
    }

    fn parse(scheme: Scheme, data: &[u8], c: &Widths) -> Result<Self, FormatError> {
        Ok(match scheme {
            Scheme::Vft1 => Record::Vft1(Label1Vft::from_bytes(data, c)?),
            Scheme::Ss2 => Record::Ss2(LabelSs2::from_bytes(data, c)?),
            Scheme::Vft2 => Record::Vft2(Label2Vft::from_bytes(data, c)?),
            Scheme::Eft => {
                let mut r = crate::bits::BitReader::new(data);
                let l = EftVertexLabel::read(&mut r, c)?;
                let e = Vec::read(&mut r, c)?;
                r.finish()?;
                Record::Eft(l, e)
            }
            Scheme::Fvft => Record::Fvft(LabelFvft::from_bytes(data, c)?),
        })
    }
}

impl Labels {
    pub fn scheme(&self) -> Scheme {
        match self {
            Labels::Vft1(_) => Scheme::Vft1,
            Labels::Ss2(_) => Scheme::Ss2,
            Labels::Vft2(_) => Scheme::Vft2,
            Labels::Eft(_) => Scheme::Eft,
            Labels::Fvft { .. } => Scheme::Fvft,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Labels::Vft1(l) => l.len(),
            Labels::Ss2(l) => l.len(),
            Labels::Vft2(l) => l.len(),
            Labels::Eft(l) => l.vertices.len(),
            Labels::Fvft { enc, .. } => enc.labels.len(),
        }
    }

    pub fn f(&self) -> u32 {
        match self {
            Labels::Fvft { f, .. } => *f,
            _ => 0,
        }
    }

    /// Identifies the labelled instance: the instance hash, or the sketch
    /// digest for edge-fault labels.
    pub fn instance(&self) -> u64 {
        match self {
            Labels::Vft1(l) => l.first().map_or(0, |x| x.instance.0),
            Labels::Ss2(l) => l.first().map_or(0, |x| x.instance.0),
            Labels::Vft2(l) => l.first().map_or(0, |x| x.instance.0),
            Labels::Eft(l) => l.params.digest(),
            Labels::Fvft { enc, .. } => match enc.labels.first() {
                Some(LabelFvft::Base(x)) => x.instance.0,
                Some(LabelFvft::Level(x)) => x.instance.0,
                None => 0,
            },
        }
    }

    /// Sketch scheme headers, sorted by digest.
    pub fn sketch_headers(&self) -> Vec<SchemeParams> {
        let mut out: Vec<SchemeParams> = match self {
            Labels::Eft(l) => vec![l.params.clone()],
            Labels::Fvft { enc, .. } => enc.headers.values().cloned().collect(),
            _ => vec![],
        };
        out.sort_by_key(|p| p.digest());
        out
    }

    pub fn record(&self, v: Vertex) -> Record {
        let i = v as usize;
        match self {
            Labels::Vft1(l) => Record::Vft1(l[i].clone()),
            Labels::Ss2(l) => Record::Ss2(l[i].clone()),
            Labels::Vft2(l) => Record::Vft2(l[i].clone()),
            Labels::Eft(l) => Record::Eft(l.vertices[i].clone(), l.incident[i].clone()),
            Labels::Fvft { enc, .. } => Record::Fvft(enc.labels[i].clone()),
        }
    }

    /// Size of the vertex label in bits. Edge-fault records count only the
    /// vertex part; [`Labels::edge_label_bits`] reports the rest.
    pub fn label_bits(&self, v: Vertex) -> usize {
        let c = Widths::new(self.n());
        let i = v as usize;
        match self {
            Labels::Vft1(l) => l[i].bit_len(&c),
            Labels::Ss2(l) => l[i].bit_len(&c),
            Labels::Vft2(l) => l[i].bit_len(&c),
            Labels::Eft(l) => l.vertices[i].bit_len(&c),
            Labels::Fvft { enc, .. } => enc.labels[i].bit_len(&c),
        }
    }

    pub fn edge_label_bits(&self) -> Option<usize> {
        let Labels::Eft(l) = self else { return None };
        let c = Widths::new(self.n());
        l.incident.iter().flatten().map(|e| e.bit_len(&c)).max()
    }

    pub fn header(&self, certificate: bool) -> Header {
        Header {
            version: VERSION,
            scheme: self.scheme(),
            f: self.f(),
            certificate,
            n: self.n(),
            instance: self.instance(),
            sketches: self.sketch_headers(),
        }
    }

    pub fn write_archive<W: Write>(&self, certificate: bool, out: &mut W) -> io::Result<()> {
        let header = self.header(certificate);
        let c = Widths::new(self.n());
        let records: Vec<Vec<u8>> = (0..self.n() as Vertex).map(|v| self.record(v).write_bytes(&c)).collect();
        header.write(out)?;
        let mut off = 0u64;
        for r in &records {
            out.write_all(&off.to_le_bytes())?;
            off += 4 + r.len() as u64;
        }
        for r in &records {
            out.write_all(&(r.len() as u32).to_le_bytes())?;
            out.write_all(r)?;
        }
        Ok(())
    }

    pub fn to_archive_bytes(&self, certificate: bool) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_archive(certificate, &mut out).expect("writing to memory");
        out
    }

    /// Reassembles all labels from an archive.
    pub fn from_archive<R: Read + Seek>(reader: &mut ArchiveReader<R>) -> Result<Self, ArchiveError> {
        let h = reader.header.clone();
        let recs: Vec<Rc<Record>> = (0..h.n as Vertex).map(|v| reader.get(v)).collect::<Result<_, _>>()?;
        let bad = || ArchiveError::Format(FormatError::Invalid("record kind does not match scheme"));
        macro_rules! collect {
            ($var:ident) => {
                recs.iter().map(|r| if let Record::$var(l) = &**r { Ok(l.clone()) } else { Err(bad()) }).collect::<Result<Vec<_>, _>>()?
            };
        }
        Ok(match h.scheme {
            Scheme::Vft1 => Labels::Vft1(collect!(Vft1)),
            Scheme::Ss2 => Labels::Ss2(collect!(Ss2)),
            Scheme::Vft2 => Labels::Vft2(collect!(Vft2)),
            Scheme::Fvft => {
                let labels = collect!(Fvft);
                let headers = h.sketches.iter().map(|p| (p.digest(), p.clone())).collect();
                Labels::Fvft { f: h.f, enc: FvftEncoding { labels, headers } }
            }
            Scheme::Eft => {
                let params = h.sketches.first().cloned().ok_or_else(bad)?;
                let (mut vertices, mut incident) = (Vec::new(), Vec::new());
                for r in &recs {
                    let Record::Eft(l, e) = &**r else { return Err(bad()) };
                    vertices.push(l.clone());
                    incident.push(e.clone());
                }
                Labels::Eft(EftLabels { params, vertices, incident })
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub version: u16,
    pub scheme: Scheme,
    pub f: u32,
    pub certificate: bool,
    pub n: usize,
    pub instance: u64,
    pub sketches: Vec<SchemeParams>,
}

#[derive(Debug, thiserror::Error)]
pub enum ArchiveError {
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("not a label archive")]
    Magic,
    #[error("unsupported archive version {0}")]
    Version(u16),
    #[error("unknown scheme tag {0}")]
    Scheme(u8),
    #[error("vertex {0} outside the archive")]
    Vertex(u64),
    #[error("record format: {0}")]
    Format(#[from] FormatError),
}

fn read_array<const K: usize, R: Read>(r: &mut R) -> io::Result<[u8; K]> {
    let mut b = [0u8; K];
    r.read_exact(&mut b)?;
    Ok(b)
}

impl Header {
    fn write<W: Write>(&self, out: &mut W) -> io::Result<()> {
        out.write_all(&MAGIC)?;
        out.write_all(&self.version.to_le_bytes())?;
        out.write_all(&[self.scheme.tag(), self.f as u8, self.certificate as u8])?;
        out.write_all(&(self.n as u32).to_le_bytes())?;
        out.write_all(&self.instance.to_le_bytes())?;
        out.write_all(&(self.sketches.len() as u32).to_le_bytes())?;
        for p in &self.sketches {
            let bytes = p.to_bytes(&Widths::new(p.n));
            out.write_all(&p.digest().to_le_bytes())?;
            out.write_all(&(p.n as u32).to_le_bytes())?;
            out.write_all(&(bytes.len() as u32).to_le_bytes())?;
            out.write_all(&bytes)?;
        }
        Ok(())
    }

    fn read<R: Read>(r: &mut R) -> Result<Self, ArchiveError> {
        if read_array::<4, _>(r)? != MAGIC {
            return Err(ArchiveError::Magic);
        }
        let version = u16::from_le_bytes(read_array(r)?);
        if version != VERSION {
            return Err(ArchiveError::Version(version));
        }
        let [tag, f, cert] = read_array(r)?;
        let scheme = Scheme::from_tag(tag).ok_or(ArchiveError::Scheme(tag))?;
        let n = u32::from_le_bytes(read_array(r)?) as usize;
        let instance = u64::from_le_bytes(read_array(r)?);
        let count = u32::from_le_bytes(read_array(r)?);
        let mut sketches = Vec::new();
        for _ in 0..count {
            let digest = u64::from_le_bytes(read_array(r)?);
            let pn = u32::from_le_bytes(read_array(r)?) as usize;
            let len = u32::from_le_bytes(read_array(r)?) as usize;
            let mut bytes = vec![0u8; len];
            r.read_exact(&mut bytes)?;
            let p = SchemeParams::from_bytes(&bytes, &Widths::new(pn))?;
            if p.digest() != digest {
                return Err(FormatError::Invalid("sketch header digest").into());
            }
            sketches.push(p);
        }
        Ok(Header { version, scheme, f: f as u32, certificate: cert != 0, n, instance, sketches })
    }

    pub fn sketch_map(&self) -> HashMap<u64, SchemeParams> {
        self.sketches.iter().map(|p| (p.digest(), p.clone())).collect()
    }
}

/// Reads records on demand; each record is parsed at most once.
pub struct ArchiveReader<R> {
    inner: R,
    pub header: Header,
    offsets: Vec<u64>,
    base: u64,
    cache: HashMap<Vertex, Rc<Record>>,
    widths: Widths,
    /// Records fetched from the underlying stream.
    pub reads: usize,
}

impl<R: Read + Seek> ArchiveReader<R> {
    pub fn open(mut inner: R) -> Result<Self, ArchiveError> {
        let header = Header::read(&mut inner)?;
        let mut offsets = Vec::with_capacity(header.n);
        for _ in 0..header.n {
            offsets.push(u64::from_le_bytes(read_array(&mut inner)?));
        }
        let base = inner.stream_position()?;
        let widths = Widths::new(header.n);
        Ok(ArchiveReader { inner, header, offsets, base, cache: HashMap::new(), widths, reads: 0 })
    }

    /// Absolute byte offset of the record's length prefix, and the payload length.
    pub fn record_span(mut self, v: Vertex) -> Result<(u64, usize), ArchiveError> {
        let off = *self.offsets.get(v as usize).ok_or(ArchiveError::Vertex(v as u64))?;
        let len = self.raw(v)?.len();
        Ok((self.base + off, len))
    }

    pub fn raw(&mut self, v: Vertex) -> Result<Vec<u8>, ArchiveError> {
        let off = *self.offsets.get(v as usize).ok_or(ArchiveError::Vertex(v as u64))?;
        self.inner.seek(SeekFrom::Start(self.base + off))?;
        let len = u32::from_le_bytes(read_array(&mut self.inner)?) as usize;
        let mut bytes = vec![0u8; len];
        self.inner.read_exact(&mut bytes)?;
        self.reads += 1;
        Ok(bytes)
    }

    pub fn get(&mut self, v: Vertex) -> Result<Rc<Record>, ArchiveError> {
        if let Some(r) = self.cache.get(&v) {
            return Ok(r.clone());
        }
        let bytes = self.raw(v)?;
        let rec = Rc::new(Record::parse(self.header.scheme, &bytes, &self.widths)?);
        self.cache.insert(v, rec.clone());
        Ok(rec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fault {
    Vertex(Vertex),
    Edge(Vertex, Vertex),
}

impl FromStr for Fault {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<Vertex>().map_err(|_| format!("bad vertex {t:?}"));
        match s.split_once('-') {
            Some((a, b)) => Ok(Fault::Edge(num(a)?, num(b)?)),
            None => Ok(Fault::Vertex(num(s)?)),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum QueryError {
    #[error("too many faults: {got} > {budget}")]
    Budget { got: usize, budget: usize },
    #[error("query not supported by scheme {0}: {1}")]
    Unsupported(Scheme, &'static str),
    #[error("labels do not belong together")]
    Mismatch,
    #[error(transparent)]
    Archive(#[from] ArchiveError),
    #[error("decode: {0}")]
    Decode(DecodeError),
}

impl From<DecodeError> for QueryError {
    fn from(e: DecodeError) -> Self {
        match e {
            DecodeError::InstanceMismatch => QueryError::Mismatch,
            DecodeError::Budget { got, budget } => QueryError::Budget { got, budget },
            e => QueryError::Decode(e),
        }
    }
}

/// Branch counters collected by [`query_traced`].
#[derive(Debug, Clone, Default)]
pub struct QueryTrace {
    pub vft2: Coverage,
    pub fvft: FvftTrace,
    /// f-VFT queries that reached the sketch decoder.
    pub fvft_eft: u64,
    pub fvft_exact: u64,
}

pub fn query<R: Read + Seek>(
    ar: &mut ArchiveReader<R>,
    u: Vertex,
    v: Vertex,
    faults: &[Fault],
) -> Result<bool, QueryError> {
    query_traced(ar, u, v, faults, &mut QueryTrace::default())
}

pub fn query_traced<R: Read + Seek>(
    ar: &mut ArchiveReader<R>,
    u: Vertex,
    v: Vertex,
    faults: &[Fault],
    trace: &mut QueryTrace,
) -> Result<bool, QueryError> {
    let h = ar.header.clone();
    let scheme = h.scheme;
    for &w in [u, v].iter().chain(faults.iter().flat_map(|f| match f {
        Fault::Vertex(x) => vec![*x],
        Fault::Edge(a, b) => vec![*a, *b],
    }).collect::<Vec<_>>().iter())
    {
        if w as usize >= h.n {
            return Err(ArchiveError::Vertex(w as u64).into());
        }
    }
    let mut fv: Vec<Vertex> = Vec::new();
    let mut fe: Vec<(Vertex, Vertex)> = Vec::new();
    for f in faults {
        match *f {
            Fault::Vertex(x) => fv.push(x),
            Fault::Edge(a, b) => fe.push((a.min(b), a.max(b))),
        }
    }
    fv.sort_unstable();
    fv.dedup();
    fe.sort_unstable();
    fe.dedup();
    match scheme.budget(h.f) {
        Some(budget) => {
            if !fe.is_empty() {
                return Err(QueryError::Unsupported(scheme, "edge faults"));
            }
            if fv.len() > budget {
                return Err(QueryError::Budget { got: fv.len(), budget });
            }
        }
        None if !fv.is_empty() => return Err(QueryError::Unsupported(scheme, "vertex faults")),
        None => {}
    }
    let (ru, rv) = (ar.get(u)?, ar.get(v)?);
    if fv.contains(&u) || fv.contains(&v) {
        return Ok(false);
    }
    let rf: Vec<Rc<Record>> = fv.iter().map(|&x| ar.get(x)).collect::<Result<_, _>>()?;
    let ok = match (&*ru, &*rv) {
        (Record::Vft1(a), Record::Vft1(b)) => {
            let xs = pick(&rf, |r| if let Record::Vft1(l) = r { Some(l) } else { None })?;
            match xs[..] {
                [] => {
                    same_instance([a.instance, b.instance].into_iter())?;
                    a.body.base == b.body.base
                }
                [x] => vft1::decode_1vft(a, b, x)?,
                _ => unreachable!(),
            }
        }
        (Record::Ss2(a), Record::Ss2(b)) => {
            let xs = pick(&rf, |r| if let Record::Ss2(l) = r { Some(l) } else { None })?;
            same_instance([a.instance, b.instance].into_iter().chain(xs.iter().map(|x| x.instance)))?;
            let (ea, eb) = (a.body.owner(), b.body.owner());
            if ea.id == eb.id {
                true
            } else if ea.root != eb.root {
                false
            } else {
                let (t, s) = if eb.id == eb.root {
                    (a, eb.id)
                } else if ea.id == ea.root {
                    (b, ea.id)
                } else {
                    return Err(QueryError::Unsupported(scheme, "one endpoint must be the source of its tree"));
                };
                let _ = s;
                match xs[..] {
                    [] => true,
                    [x] => ss::decode_ss2(t, x, x)?,
                    [x, y] => ss::decode_ss2(t, x, y)?,
                    _ => unreachable!(),
                }
            }
        }
        (Record::Vft2(a), Record::Vft2(b)) => {
            let xs = pick(&rf, |r| if let Record::Vft2(l) = r { Some(l) } else { None })?;
            match xs[..] {
                [x, y] => {
                    same_instance([a, b, x, y].iter().map(|l| l.instance))?;
                    vft2::decode_bodies_traced(&a.body, &b.body, &x.body, &y.body, &mut trace.vft2)?
                }
                _ => vft2::decode_2vft_faults(a, b, &xs)?,
            }
        }
        (Record::Eft(a, _), Record::Eft(b, _)) => {
            let mut edges = Vec::new();
            let mut holders = Vec::new();
            for &(x, y) in &fe {
                holders.push((ar.get(x)?, y));
            }
            for (r, y) in &holders {
                let Record::Eft(l, inc) = &**r else { return Err(QueryError::Mismatch) };
                let e = inc
                    .iter()
                    .find(|e| e.eid.a == l.id.min(*y) && e.eid.b == l.id.max(*y))
                    .ok_or(QueryError::Unsupported(scheme, "failed edge is not in the graph"))?;
                edges.push(e);
            }
            let params = h.sketches.iter().find(|p| p.digest() == a.digest).ok_or(QueryError::Mismatch)?;
            sketch::decode_eft(a, b, &edges, params)?
        }
        (Record::Fvft(a), Record::Fvft(b)) => {
            let xs = pick(&rf, |r| if let Record::Fvft(l) = r { Some(l) } else { None })?;
            let mut t = FvftTrace::default();
            let ok = vftf::decode_fvft_traced(a, b, &xs, &h.sketch_map(), &mut t)?;
            if t.eft_used {
                trace.fvft_eft += 1;
            } else {
                trace.fvft_exact += 1;
            }
            trace.fvft.recursions += t.recursions;
            trace.fvft.eft_used |= t.eft_used;
            ok
        }
        _ => return Err(QueryError::Mismatch),
    };
    Ok(ok)
}

fn pick<'a, T>(rs: &'a [Rc<Record>], f: impl Fn(&'a Record) -> Option<&'a T>) -> Result<Vec<&'a T>, QueryError> {
    rs.iter().map(|r| f(r).ok_or(QueryError::Mismatch)).collect()
}

fn same_instance(mut ids: impl Iterator<Item = crate::instance::InstanceId>) -> Result<(), QueryError> {
    let first = ids.next();
    if ids.all(|i| Some(i) == first) {
        Ok(())
    } else {
        Err(QueryError::Mismatch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::graph::oracle_connected;
    use std::io::Cursor;

    fn cfg(scheme: Scheme) -> BuildConfig {
        let f = (scheme == Scheme::Fvft).then_some(3);
        BuildConfig { scheme, f, seed: Some(7), certificate: false }
    }

    #[test]
    fn roundtrip_every_scheme() {
        let g = gen::wheel(9);
        for s in Scheme::ALL {
            let labels = build(&g, &cfg(s)).unwrap();
            let bytes = labels.to_archive_bytes(false);
            let mut ar = ArchiveReader::open(Cursor::new(&bytes)).unwrap();
            assert_eq!(ar.header, labels.header(false));
            let back = Labels::from_archive(&mut ar).unwrap();
            assert_eq!(back, labels, "{s}");
            assert_eq!(back.to_archive_bytes(false), bytes);
        }
    }

    #[test]
    fn sequential_matches_parallel() {
        let g = gen::wheel(10);
        for s in Scheme::ALL {
            let c = cfg(s);
            assert_eq!(build(&g, &c), crate::instance::sequential(|| build(&g, &c)), "{s}");
        }
    }

    #[test]
    fn deterministic_bytes() {
        let g = gen::grid(3, 4);
        for s in Scheme::ALL {
            let a = build(&g, &cfg(s)).unwrap().to_archive_bytes(false);
            let b = build(&g, &cfg(s)).unwrap().to_archive_bytes(false);
            assert_eq!(a, b, "{s}");
        }
    }

    #[test]
    fn queries_read_only_named_records() {
        let g = gen::cycle(5);
        let bytes = build(&g, &cfg(Scheme::Vft2)).unwrap().to_archive_bytes(false);
        let mut ar = ArchiveReader::open(Cursor::new(bytes)).unwrap();
        assert!(query(&mut ar, 0, 3, &[Fault::Vertex(1), Fault::Vertex(2)]).unwrap());
        assert_eq!(ar.reads, 4);
        assert!(!query(&mut ar, 0, 2, &[Fault::Vertex(1), Fault::Vertex(3)]).unwrap());
        assert!(query(&mut ar, 4, 4, &[]).unwrap());
    }

    #[test]
    fn query_matches_oracle_per_scheme() {
        let g = gen::theta(&[2, 3, 4]);
        let n = g.n() as Vertex;
        for s in [Scheme::Vft1, Scheme::Vft2, Scheme::Fvft] {
            let bytes = build(&g, &cfg(s)).unwrap().to_archive_bytes(false);
            let mut ar = ArchiveReader::open(Cursor::new(bytes)).unwrap();
            for u in 0..n {
                for v in 0..n {
                    for x in 0..n {
                        let got = query(&mut ar, u, v, &[Fault::Vertex(x)]).unwrap();
                        assert_eq!(got, oracle_connected(&g, u, v, &[x]).unwrap(), "{s} {u} {v} {x}");
                    }
                }
            }
        }
    }

    #[test]
    fn ss2_needs_source_endpoint() {
        let g = gen::path(5);
        let labels = build(&g, &cfg(Scheme::Ss2)).unwrap();
        let Labels::Ss2(l) = &labels else { unreachable!() };
        let s = l[0].body.owner().root;
        let other = (0..5).find(|&w| w != s && l[w as usize].body.owner().id != s).unwrap();
        let third = (0..5).find(|&w| w != s && w != other).unwrap();
        let mut ar = ArchiveReader::open(Cursor::new(labels.to_archive_bytes(false))).unwrap();
        for t in 0..5 {
            for x in 0..5 {
                let want = oracle_connected(&g, s, t, &[x]).unwrap();
                assert_eq!(query(&mut ar, t, s, &[Fault::Vertex(x)]).unwrap(), want);
            }
        }
        assert!(matches!(query(&mut ar, other, third, &[]), Err(QueryError::Unsupported(..))));
    }

    #[test]
    fn eft_edge_faults() {
        let g = gen::cycle(6);
        let bytes = build(&g, &cfg(Scheme::Eft)).unwrap().to_archive_bytes(false);
        let mut ar = ArchiveReader::open(Cursor::new(bytes)).unwrap();
        assert!(query(&mut ar, 0, 3, &[Fault::Edge(0, 1)]).unwrap());
        assert!(!query(&mut ar, 0, 3, &[Fault::Edge(1, 0), Fault::Edge(4, 3)]).unwrap());
        assert!(matches!(query(&mut ar, 0, 3, &[Fault::Vertex(1)]), Err(QueryError::Unsupported(..))));
        assert!(matches!(query(&mut ar, 0, 3, &[Fault::Edge(0, 3)]), Err(QueryError::Unsupported(..))));
    }

    #[test]
    fn budget_and_flags() {
        let g = gen::cycle(5);
        let bytes = build(&g, &cfg(Scheme::Vft2)).unwrap().to_archive_bytes(false);
        let mut ar = ArchiveReader::open(Cursor::new(bytes)).unwrap();
        let f: Vec<Fault> = (1..4).map(Fault::Vertex).collect();
        assert!(matches!(query(&mut ar, 0, 4, &f), Err(QueryError::Budget { got: 3, budget: 2 })));
        let no_seed = BuildConfig { seed: None, ..cfg(Scheme::Fvft) };
        assert_eq!(build(&g, &no_seed), Err(BuildError::MissingSeed(Scheme::Fvft)));
        let stray_f = BuildConfig { f: Some(3), ..cfg(Scheme::Vft1) };
        assert_eq!(build(&g, &stray_f), Err(BuildError::FaultBudget));
    }

    #[test]
    fn rejects_foreign_bytes() {
        assert!(matches!(ArchiveReader::open(Cursor::new(b"NOPE".to_vec())), Err(ArchiveError::Magic)));
        let g = gen::cycle(5);
        let mut bytes = build(&g, &cfg(Scheme::Vft1)).unwrap().to_archive_bytes(false);
        bytes[4] = 9;
        assert!(matches!(ArchiveReader::open(Cursor::new(bytes)), Err(ArchiveError::Version(9))));
    }
}
