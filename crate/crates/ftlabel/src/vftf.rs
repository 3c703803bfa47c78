//! Labels for `f ≥ 3` vertex faults by recursion on high-degree faults.
//!
//! The graph is first replaced by a sparse `(f+1)`-connectivity certificate.
//! Vertices of certificate degree at least `Δ(f, n)` are high. Every label
//! stores the owner's EFT label, one `(f−1)`-level label in `G′ ∖ {x}` per high
//! `x`, and, for low owners, the EFT labels of all incident edges. A query with
//! a high fault recurses into that fault's nested instance; otherwise the
//! failed vertices' incident edges go to the EFT decoder.

use std::collections::HashMap;

use crate::bits::{BitReader, BitWriter, Codec, FormatError, Widths};
use crate::graph::{mask_of, sparse_certificate, Graph, Vertex};
use crate::instance::{par_map, DecodeError, InstanceId, Substrate};
use crate::sketch::{self, EftEdgeLabel, EftVertexLabel, SchemeParams};
use crate::vft2::{self, Label2Vft};

pub const DEFAULT_MAX_F: u32 = 5;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VftfError {
    #[error("fault budget {0} below 3 has no degree threshold")]
    BudgetTooSmall(u32),
    #[error("fault budget {f} exceeds the cap {cap}")]
    BudgetTooLarge { f: u32, cap: u32 },
}

/// `⌈2f · n^{1 − 1/2^{f−2}}⌉`.
pub fn degree_threshold(f: u32, n: usize) -> Result<usize, VftfError> {
    if f < 3 {
        return Err(VftfError::BudgetTooSmall(f));
    }
    let e = 1.0 - 1.0 / 2f64.powi(f as i32 - 2);
    Ok((2.0 * f as f64 * (n as f64).powf(e)).ceil() as usize)
}

/// `2^{f−2} · f · n^{1 − 1/2^{f−2}} · c · log₂³ n`.
pub fn predicted_size_bound(f: u32, n: usize, c: f64) -> f64 {
    let g = f as i32 - 2;
    let e = 1.0 - 1.0 / 2f64.powi(g);
    2f64.powi(g) * f as f64 * (n as f64).powf(e) * c * (n as f64).log2().powi(3)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FvftConfig {
    pub f: u32,
    pub seed: u64,
    /// Replaces `Δ(f, n)` at every level when set.
    pub delta: Option<usize>,
    pub c1: u32,
    pub max_f: u32,
}

impl FvftConfig {
    pub fn new(f: u32, seed: u64) -> Self {
        FvftConfig { f, seed, delta: None, c1: sketch::DEFAULT_C1, max_f: DEFAULT_MAX_F }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelLabel {
    pub f: u32,
    pub instance: InstanceId,
    pub id: Vertex,
    pub high: bool,
    pub eft: EftVertexLabel,
    /// `(x, label of the owner in G′ ∖ {x})` for every high `x ≠ owner`.
    pub nested: Vec<(Vertex, LabelFvft)>,
    /// Low owners: EFT labels of all incident certificate edges.
    pub low_edges: Option<Vec<EftEdgeLabel>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelFvft {
    Base(Box<Label2Vft>),
    Level(Box<LevelLabel>),
}

impl LabelFvft {
    pub fn id(&self) -> Vertex {
        match self {
            LabelFvft::Base(l) => l.body.vft1.owner.id,
            LabelFvft::Level(l) => l.id,
        }
    }

    pub fn budget(&self) -> u32 {
        match self {
            LabelFvft::Base(_) => 2,
            LabelFvft::Level(l) => l.f,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FvftEncoding {
    pub labels: Vec<LabelFvft>,
    /// Sketch scheme headers of every level, keyed by digest.
    pub headers: HashMap<u64, SchemeParams>,
}

fn level_seed(seed: u64, x: Vertex) -> u64 {
    let mut z = seed ^ (x as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn encode_fvft(g: &Graph, cfg: &FvftConfig) -> Result<FvftEncoding, VftfError> {
    if cfg.f < 2 {
        return Err(VftfError::BudgetTooSmall(cfg.f));
    }
    if cfg.f > cfg.max_f {
        return Err(VftfError::BudgetTooLarge { f: cfg.f, cap: cfg.max_f });
    }
    let mut headers = HashMap::new();
    let labels = encode_level(g, cfg.f, cfg.seed, cfg, &mut headers);
    Ok(FvftEncoding { labels, headers })
}

fn encode_level(g: &Graph, f: u32, seed: u64, cfg: &FvftConfig, headers: &mut HashMap<u64, SchemeParams>) -> Vec<LabelFvft> {
    if f == 2 {
        return vft2::encode_2vft(g).into_iter().map(|l| LabelFvft::Base(Box::new(l))).collect();
    }
    let n = g.n();
    let gc = sparse_certificate(g, f as usize + 1);
    let delta = cfg.delta.unwrap_or_else(|| degree_threshold(f, n).expect("f ≥ 3"));
    let high: Vec<Vertex> = (0..n as Vertex).filter(|&v| gc.degree(v) >= delta).collect();
    let params = sketch::make_params_with(n, gc.m(), seed, cfg.c1);
    headers.insert(params.digest(), params.clone());
    let eft = sketch::encode_eft_with(&gc, params);
    let instance = Substrate::full(&gc).instance(&format!("fvft{f}"));

    let subs: Vec<(Vertex, Graph)> = high.iter().map(|&x| (x, gc.without_mask(&mask_of(n, &[x])))).collect();
    let nested: Vec<(Vec<LabelFvft>, HashMap<u64, SchemeParams>)> = par_map(&subs, |(x, sub)| {
        let mut h = HashMap::new();
        let labels = encode_level(sub, f - 1, level_seed(seed, *x), cfg, &mut h);
        (labels, h)
    });
    let mut per_vertex: Vec<Vec<(Vertex, LabelFvft)>> = vec![Vec::new(); n];
    for (&x, (labels, h)) in high.iter().zip(nested) {
        headers.extend(h);
        for (v, l) in labels.into_iter().enumerate() {
            if v as Vertex != x {
                per_vertex[v].push((x, l));
            }
        }
    }
    let is_high = mask_of(n, &high);
    let sketch::EftLabels { vertices, incident, .. } = eft;
    vertices
        .into_iter()
        .zip(incident)
        .zip(per_vertex)
        .enumerate()
        .map(|(v, ((eft, inc), nested))| {
            let high = is_high[v];
            LabelFvft::Level(Box::new(LevelLabel {
                f,
                instance,
                id: v as Vertex,
                high,
                eft,
                nested,
                low_edges: (!high).then_some(inc),
            }))
        })
        .collect()
}

/// Largest top-level EFT label (vertex or edge) in units of `log₂³ n` bits.
pub fn eft_constant(enc: &FvftEncoding, n: usize) -> f64 {
    let c = Widths::new(n);
    let mut best = 0;
    for l in &enc.labels {
        if let LabelFvft::Level(l) = l {
            best = best.max(l.eft.bit_len(&c));
            for e in l.low_edges.iter().flatten() {
                best = best.max(e.bit_len(&c));
            }
        }
    }
    best as f64 / (n as f64).log2().powi(3)
}

/// Bits of one label split by part.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SizeBreakdown {
    pub eft: usize,
    pub edges: usize,
    pub nested: usize,
    /// Base-level labels.
    pub base: usize,
}

pub fn size_breakdown(l: &LabelFvft, c: &Widths) -> SizeBreakdown {
    match l {
        LabelFvft::Base(b) => SizeBreakdown { base: b.bit_len(c), ..Default::default() },
        LabelFvft::Level(l) => SizeBreakdown {
            eft: l.eft.bit_len(c),
            edges: l.low_edges.as_ref().map_or(0, |e| e.bit_len(c)),
            nested: l.nested.iter().map(|(_, x)| x.bit_len(c)).sum(),
            base: 0,
        },
    }
}

/// What a decode touched.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FvftTrace {
    pub eft_used: bool,
    /// Number of high-fault recursions taken.
    pub recursions: u32,
}

pub fn decode_fvft(
    lu: &LabelFvft,
    lv: &LabelFvft,
    faults: &[&LabelFvft],
    headers: &HashMap<u64, SchemeParams>,
) -> Result<bool, DecodeError> {
    decode_fvft_traced(lu, lv, faults, headers, &mut FvftTrace::default())
}

pub fn decode_fvft_traced(
    lu: &LabelFvft,
    lv: &LabelFvft,
    faults: &[&LabelFvft],
    headers: &HashMap<u64, SchemeParams>,
    trace: &mut FvftTrace,
) -> Result<bool, DecodeError> {
    let mut fs: Vec<&LabelFvft> = faults.to_vec();
    fs.sort_by_key(|l| l.id());
    fs.dedup_by_key(|l| l.id());
    let budget = lu.budget();
    if fs.len() > budget as usize {
        return Err(DecodeError::Budget { got: fs.len(), budget: budget as usize });
    }
    if fs.iter().any(|x| x.id() == lu.id() || x.id() == lv.id()) {
        return Ok(false);
    }
    if lu.id() == lv.id() {
        return Ok(true);
    }
    fn level(l: &LabelFvft, budget: u32) -> Result<&LevelLabel, DecodeError> {
        match l {
            LabelFvft::Level(x) if x.f == budget => Ok(x),
            _ => Err(DecodeError::InstanceMismatch),
        }
    }
    fn inner(w: &LevelLabel, x: Vertex) -> Result<&LabelFvft, DecodeError> {
        w.nested.iter().find(|(k, _)| *k == x).map(|(_, l)| l).ok_or(DecodeError::Inconsistent("missing nested label"))
    }
    let (u, v) = match (lu, lv) {
        (LabelFvft::Base(u), LabelFvft::Base(v)) => {
            let base: Vec<&Label2Vft> = fs
                .iter()
                .map(|l| match l {
                    LabelFvft::Base(x) => Ok(&**x),
                    _ => Err(DecodeError::InstanceMismatch),
                })
                .collect::<Result<_, _>>()?;
            return vft2::decode_2vft_faults(u, v, &base);
        }
        _ => (level(lu, budget)?, level(lv, budget)?),
    };
    let fl: Vec<&LevelLabel> = fs.iter().map(|l| level(l, budget)).collect::<Result<_, _>>()?;
    if fl.iter().chain([&v]).any(|l| l.instance != u.instance) {
        return Err(DecodeError::InstanceMismatch);
    }
    if let Some(x) = fl.iter().find(|l| l.high) {
        trace.recursions += 1;
        let rest: Vec<&LabelFvft> = fl.iter().filter(|l| l.id != x.id).map(|l| inner(l, x.id)).collect::<Result<_, _>>()?;
        return decode_fvft_traced(inner(u, x.id)?, inner(v, x.id)?, &rest, headers, trace);
    }
    trace.eft_used = true;
    let params = headers.get(&u.eft.digest).ok_or(DecodeError::InstanceMismatch)?;
    let mut edges = Vec::new();
    for x in &fl {
        edges.extend(x.low_edges.as_ref().ok_or(DecodeError::Inconsistent("low fault without edge labels"))?);
    }
    sketch::decode_eft(&u.eft, &v.eft, &edges, params)
}

// Serialization.

impl Codec for LevelLabel {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        w.put(self.f as u64, 8);
        self.instance.0.write(w, c);
        self.id.write(w, c);
        w.bit(self.high);
        self.eft.write(w, c);
        self.nested.write(w, c);
        self.low_edges.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(LevelLabel {
            f: r.get(8)? as u32,
            instance: InstanceId(u64::read(r, c)?),
            id: Vertex::read(r, c)?,
            high: r.bit()?,
            eft: EftVertexLabel::read(r, c)?,
            nested: Vec::read(r, c)?,
            low_edges: Option::read(r, c)?,
        })
    }
}

impl Codec for LabelFvft {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        match self {
            LabelFvft::Base(l) => {
                w.bit(false);
                l.write(w, c);
            }
            LabelFvft::Level(l) => {
                w.bit(true);
                l.write(w, c);
            }
        }
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(if r.bit()? {
            LabelFvft::Level(Box::new(LevelLabel::read(r, c)?))
        } else {
            LabelFvft::Base(Box::new(Label2Vft::read(r, c)?))
        })
    }
}
