//! Randomized edge-fault-tolerant labels from XOR graph sketches.
//!
//! Every edge gets an extended ID: a pseudorandom UID plus both endpoints and
//! their DFS entry times. A sketch unit holds, per sampling scale `j`, the XOR
//! of the extended IDs of incident edges whose hash falls below `2^{logm−j}`.
//! XOR over a vertex set cancels its internal edges, so a cell holding exactly
//! one cut edge is recognised by recomputing that edge's UID.
//!
//! Vertex labels carry the sketch of the vertex's subtree; labels of tree edges
//! carry the subtree sketch of the lower endpoint. Decoding cuts the tree at
//! the failed tree edges, cancels every failed edge, and merges the pieces
//! Borůvka-style with one fresh sketch unit per phase.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::bits::{bits_for, BitReader, BitWriter, Codec, FormatError, Widths};
use crate::graph::{Graph, Vertex};
use crate::instance::{par_vertices, DecodeError};
use crate::tree::{Anc, Hld};

/// Mersenne prime `2^61 − 1`, the modulus of the pairwise-independent hashes.
pub const PRIME: u64 = (1 << 61) - 1;
pub const DEFAULT_C1: u32 = 16;

/// `⌈log₂ x⌉`, at least 1.
fn ceil_log2(x: usize) -> u32 {
    bits_for(x.max(2) as u64 - 1)
}

/// UID width: `4⌈log₂ n⌉` bits, capped at 64.
pub fn uid_bits(n: usize) -> u32 {
    (4 * ceil_log2(n)).min(64)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeParams {
    pub n: usize,
    pub m: usize,
    pub units: usize,
    pub scales: usize,
    pub c1: u32,
    pub uid_seed: [u8; 16],
    /// `(a_i, b_i)` of `h_i(x) = (a_i x + b_i) mod p`.
    pub hash_seeds: Vec<(u64, u64)>,
}

pub fn make_params(n: usize, m: usize, seed: u64) -> SchemeParams {
    make_params_with(n, m, seed, DEFAULT_C1)
}

pub fn make_params_with(n: usize, m: usize, seed: u64, c1: u32) -> SchemeParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let units = (c1 as f64 * (n.max(2) as f64).log2()).ceil() as usize;
    let scales = m.max(1).ilog2() as usize + 1;
    let uid_seed: [u8; 16] = rng.gen();
    let hash_seeds = (0..units).map(|_| (rng.gen_range(1..PRIME), rng.gen_range(0..PRIME))).collect();
    SchemeParams { n, m, units, scales, c1, uid_seed, hash_seeds }
}

impl SchemeParams {
    pub fn digest(&self) -> u64 {
        let mut d = Sha256::new();
        for x in [self.n as u64, self.m as u64, self.units as u64, self.scales as u64, self.c1 as u64] {
            d.update(x.to_le_bytes());
        }
        d.update(self.uid_seed);
        for &(a, b) in &self.hash_seeds {
            d.update(a.to_le_bytes());
            d.update(b.to_le_bytes());
        }
        u64::from_le_bytes(d.finalize()[..8].try_into().unwrap())
    }

    /// Keyed pseudorandom UID of the edge `{a, b}`.
    pub fn uid(&self, a: Vertex, b: Vertex) -> u64 {
        let (lo, hi) = (a.min(b), a.max(b));
        let mut d = Sha256::new();
        d.update(self.uid_seed);
        d.update(lo.to_le_bytes());
        d.update(hi.to_le_bytes());
        let x = u64::from_le_bytes(d.finalize()[..8].try_into().unwrap());
        let w = uid_bits(self.n);
        if w == 64 {
            x
        } else {
            x & ((1 << w) - 1)
        }
    }

    /// Number of scales of unit `i` that sample the edge `{a, b}` (scales
    /// `0..k` do).
    pub fn depth(&self, i: usize, a: Vertex, b: Vertex) -> usize {
        let (lo, hi) = (a.min(b) as u64, a.max(b) as u64);
        let key = lo * self.n as u64 + hi;
        let (ca, cb) = self.hash_seeds[i];
        let h = ((ca as u128 * key as u128 + cb as u128) % PRIME as u128) as u64;
        let logm = self.scales as u32 - 1;
        let h = h & ((1u64 << logm) - 1);
        // Scale j keeps the edge iff h < 2^{logm − j}.
        (0..self.scales).take_while(|&j| h >> (logm - j as u32) == 0).count()
    }
}

/// Extended edge ID with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Eid {
    pub uid: u64,
    pub a: Vertex,
    pub b: Vertex,
    pub tin_a: u32,
    pub tin_b: u32,
}

type Cell = [u64; 3];

impl Eid {
    pub fn new(params: &SchemeParams, h: &Hld, u: Vertex, v: Vertex) -> Self {
        let (a, b) = (u.min(v), u.max(v));
        Eid { uid: params.uid(a, b), a, b, tin_a: h.tin[a as usize], tin_b: h.tin[b as usize] }
    }

    fn cell(&self) -> Cell {
        [self.uid, self.a as u64 | (self.b as u64) << 32, self.tin_a as u64 | (self.tin_b as u64) << 32]
    }

    fn from_cell(c: &Cell) -> Self {
        Eid { uid: c[0], a: c[1] as u32, b: (c[1] >> 32) as u32, tin_a: c[2] as u32, tin_b: (c[2] >> 32) as u32 }
    }

    /// UID check plus range checks on the claimed endpoints.
    pub fn is_valid(&self, params: &SchemeParams) -> bool {
        let n = params.n as u64;
        (self.a as u64) < n
            && self.a < self.b
            && (self.b as u64) < n
            && (self.tin_a as u64) < n
            && (self.tin_b as u64) < n
            && self.uid == params.uid(self.a, self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sketch {
    pub units: usize,
    pub scales: usize,
    cells: Vec<Cell>,
}

impl Sketch {
    pub fn zero(params: &SchemeParams) -> Self {
        Sketch { units: params.units, scales: params.scales, cells: vec![[0; 3]; params.units * params.scales] }
    }

    pub fn add_edge(&mut self, params: &SchemeParams, e: &Eid) {
        let c = e.cell();
        for i in 0..self.units {
            let k = params.depth(i, e.a, e.b);
            for cell in &mut self.cells[i * self.scales..i * self.scales + k] {
                for w in 0..3 {
                    cell[w] ^= c[w];
                }
            }
        }
    }

    pub fn xor_assign(&mut self, other: &Sketch) {
        for (x, y) in self.cells.iter_mut().zip(&other.cells) {
            for w in 0..3 {
                x[w] ^= y[w];
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cells.iter().all(|c| *c == [0; 3])
    }

    pub fn row(&self, i: usize) -> SketchRow<'_> {
        SketchRow(&self.cells[i * self.scales..(i + 1) * self.scales])
    }

    /// Cell content at unit `i`, scale `j`, if nonzero.
    pub fn cell(&self, i: usize, j: usize) -> Option<Eid> {
        let c = &self.cells[i * self.scales + j];
        (*c != [0; 3]).then(|| Eid::from_cell(c))
    }
}

/// One sketch unit: cells by increasing sampling depth.
#[derive(Debug, Clone, Copy)]
pub struct SketchRow<'a>(&'a [Cell]);

/// XOR of the same unit over several sketches.
fn combined_row(parts: &[&Sketch], i: usize) -> Vec<Cell> {
    let mut out = parts[0].row(i).0.to_vec();
    for p in &parts[1..] {
        for (x, y) in out.iter_mut().zip(p.row(i).0) {
            for w in 0..3 {
                x[w] ^= y[w];
            }
        }
    }
    out
}

fn recover_in(cells: &[Cell], params: &SchemeParams, mut accept: impl FnMut(&Eid) -> bool) -> Option<Eid> {
    cells.iter().filter(|c| **c != [0; 3]).map(Eid::from_cell).find(|e| e.is_valid(params) && accept(e))
}

/// First cell of the unit that holds a single valid extended ID.
pub fn recover_edge(row: SketchRow<'_>, params: &SchemeParams) -> Option<Eid> {
    recover_in(row.0, params, |_| true)
}

/// Sketch of the edges of `g` incident to `v`.
pub fn vertex_sketch(params: &SchemeParams, g: &Graph, h: &Hld, v: Vertex) -> Sketch {
    let mut s = Sketch::zero(params);
    for &w in g.neighbors(v) {
        s.add_edge(params, &Eid::new(params, h, v, w));
    }
    s
}

/// XOR of vertex sketches over a vertex set.
pub fn set_sketch(params: &SchemeParams, g: &Graph, h: &Hld, set: &[Vertex]) -> Sketch {
    let mut s = Sketch::zero(params);
    for &v in set {
        s.xor_assign(&vertex_sketch(params, g, h, v));
    }
    s
}

// Labels.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EftVertexLabel {
    pub digest: u64,
    pub id: Vertex,
    pub root: Vertex,
    pub anc: Anc,
    /// Interval of the root of the vertex's tree.
    pub tree: Anc,
    pub subtree: Arc<Sketch>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EftEdgeLabel {
    pub digest: u64,
    pub eid: Eid,
    /// Tree edges: interval and subtree sketch of the lower endpoint.
    pub lower: Option<(Anc, Arc<Sketch>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EftLabels {
    pub params: SchemeParams,
    pub vertices: Vec<EftVertexLabel>,
    /// Per vertex, labels of its incident edges in adjacency order.
    pub incident: Vec<Vec<EftEdgeLabel>>,
}

impl EftLabels {
    pub fn edge(&self, u: Vertex, v: Vertex) -> Option<&EftEdgeLabel> {
        self.incident[u as usize].iter().find(|e| e.eid.a == u.min(v) && e.eid.b == u.max(v))
    }
}

pub fn encode_eft(g: &Graph, seed: u64) -> EftLabels {
    encode_eft_with(g, make_params(g.n(), g.m(), seed))
}

pub fn encode_eft_with(g: &Graph, params: SchemeParams) -> EftLabels {
    let h = Hld::build(g);
    let digest = params.digest();
    let mut sub: Vec<Sketch> = par_vertices(g.n(), |v| vertex_sketch(&params, g, &h, v));
    for &v in h.preorder.iter().rev() {
        if let Some(p) = h.parent_of(v) {
            let (lo, hi) = sub.split_at_mut(v.max(p) as usize);
            let (child, parent) = if v > p { (&hi[0], &mut lo[p as usize]) } else { (&lo[v as usize], &mut hi[0]) };
            parent.xor_assign(child);
        }
    }
    let sub: Vec<Arc<Sketch>> = sub.into_iter().map(Arc::new).collect();
    let vertices = (0..g.n() as Vertex)
        .map(|v| EftVertexLabel {
            digest,
            id: v,
            root: h.root[v as usize],
            anc: h.anc(v),
            tree: h.anc(h.root[v as usize]),
            subtree: sub[v as usize].clone(),
        })
        .collect();
    let incident = (0..g.n() as Vertex)
        .map(|v| {
            g.neighbors(v)
                .iter()
                .map(|&w| {
                    let lower = if h.parent_of(w) == Some(v) {
                        Some(w)
                    } else if h.parent_of(v) == Some(w) {
                        Some(v)
                    } else {
                        None
                    };
                    EftEdgeLabel {
                        digest,
                        eid: Eid::new(&params, &h, v, w),
                        lower: lower.map(|c| (h.anc(c), sub[c as usize].clone())),
                    }
                })
                .collect()
        })
        .collect();
    EftLabels { params, vertices, incident }
}

/// `conn(u, v, G ∖ F)` for an edge set `F`, w.h.p.
pub fn decode_eft(
    lu: &EftVertexLabel,
    lv: &EftVertexLabel,
    faults: &[&EftEdgeLabel],
    params: &SchemeParams,
) -> Result<bool, DecodeError> {
    let digest = params.digest();
    if lu.digest != digest || lv.digest != digest || faults.iter().any(|e| e.digest != digest) {
        return Err(DecodeError::InstanceMismatch);
    }
    if lu.id == lv.id {
        return Ok(true);
    }
    if lu.root != lv.root {
        return Ok(false);
    }
    let tree = lu.tree;
    let in_tree = |tin: u32| tree.tin <= tin && tin < tree.tout;
    let mut edges: Vec<&EftEdgeLabel> = faults.iter().copied().filter(|e| in_tree(e.eid.tin_a)).collect();
    edges.sort_by_key(|e| (e.eid.a, e.eid.b));
    edges.dedup_by_key(|e| (e.eid.a, e.eid.b));

    // Part 0 is the piece holding the root; part k+1 hangs below cut k.
    let cuts: Vec<(Anc, &Sketch)> = edges.iter().filter_map(|e| e.lower.as_ref().map(|(a, s)| (*a, &**s))).collect();
    let part_of = |tin: u32, skip: Option<usize>| -> usize {
        cuts.iter()
            .enumerate()
            .filter(|&(k, (a, _))| Some(k) != skip && a.tin <= tin && tin < a.tout)
            .max_by_key(|(_, (a, _))| a.tin)
            .map_or(0, |(k, _)| k + 1)
    };
    let mut parts: Vec<Sketch> = vec![Sketch::zero(params); cuts.len() + 1];
    for (k, (a, s)) in cuts.iter().enumerate() {
        parts[k + 1].xor_assign(s);
        parts[part_of(a.tin, Some(k))].xor_assign(s);
    }
    for e in &edges {
        let (pa, pb) = (part_of(e.eid.tin_a, None), part_of(e.eid.tin_b, None));
        if pa != pb {
            parts[pa].add_edge(params, &e.eid);
            parts[pb].add_edge(params, &e.eid);
        }
    }

    let mut uf: Vec<usize> = (0..parts.len()).collect();
    fn find(uf: &mut [usize], mut x: usize) -> usize {
        while uf[x] != x {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        x
    }
    let (pu, pv) = (part_of(lu.anc.tin, None), part_of(lv.anc.tin, None));
    for i in 0..params.units {
        if find(&mut uf, pu) == find(&mut uf, pv) {
            return Ok(true);
        }
        let roots: Vec<usize> = (0..parts.len()).map(|p| find(&mut uf, p)).collect();
        let mut merges = Vec::new();
        for r in 0..parts.len() {
            if roots[r] != r {
                continue;
            }
            let members: Vec<&Sketch> = (0..parts.len()).filter(|&p| roots[p] == r).map(|p| &parts[p]).collect();
            let row = combined_row(&members, i);
            let side = |tin: u32| roots[part_of(tin, None)] == r;
            if let Some(e) = recover_in(&row, params, |e| side(e.tin_a) != side(e.tin_b)) {
                let other = if side(e.tin_a) { e.tin_b } else { e.tin_a };
                merges.push((r, roots[part_of(other, None)]));
            }
        }
        for (a, b) in merges {
            let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
            uf[ra] = rb;
        }
    }
    Ok(find(&mut uf, pu) == find(&mut uf, pv))
}

// Serialization.

impl Codec for SchemeParams {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        (self.n as u64).write(w, c);
        (self.m as u64).write(w, c);
        (self.units as u64).write(w, c);
        (self.scales as u64).write(w, c);
        (self.c1 as u64).write(w, c);
        for b in self.uid_seed {
            w.put(b as u64, 8);
        }
        for &(a, b) in &self.hash_seeds {
            w.put(a, 61);
            w.put(b, 61);
        }
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        let n = u64::read(r, c)? as usize;
        let m = u64::read(r, c)? as usize;
        let units = u64::read(r, c)? as usize;
        let scales = u64::read(r, c)? as usize;
        let c1 = u64::read(r, c)? as u32;
        if units > 1 << 20 || !(1..=64).contains(&scales) {
            return Err(FormatError::BadHeader);
        }
        let mut uid_seed = [0u8; 16];
        for b in &mut uid_seed {
            *b = r.get(8)? as u8;
        }
        let hash_seeds = (0..units).map(|_| Ok((r.get(61)?, r.get(61)?))).collect::<Result<_, FormatError>>()?;
        Ok(SchemeParams { n, m, units, scales, c1, uid_seed, hash_seeds })
    }
}

fn eid_bits(c: &Widths) -> usize {
    uid_bits(c.n) as usize + 4 * c.vid as usize
}

impl Codec for Eid {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        w.put(self.uid, uid_bits(c.n));
        for x in [self.a, self.b, self.tin_a, self.tin_b] {
            w.put(x as u64, c.vid);
        }
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        let uid = r.get(uid_bits(c.n))?;
        let mut f = [0u32; 4];
        for x in &mut f {
            *x = r.get(c.vid)? as u32;
        }
        Ok(Eid { uid, a: f[0], b: f[1], tin_a: f[2], tin_b: f[3] })
    }
}

impl Codec for Sketch {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        w.put(self.units as u64, 20);
        w.put(self.scales as u64, 7);
        if w.is_counting() {
            w.skip(self.cells.len() * eid_bits(c));
            return;
        }
        for cell in &self.cells {
            Eid::from_cell(cell).write(w, c);
        }
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        let units = r.get(20)? as usize;
        let scales = r.get(7)? as usize;
        let cells = (0..units * scales).map(|_| Ok(Eid::read(r, c)?.cell())).collect::<Result<_, FormatError>>()?;
        Ok(Sketch { units, scales, cells })
    }
}

impl Codec for EftVertexLabel {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.digest.write(w, c);
        self.id.write(w, c);
        self.root.write(w, c);
        self.anc.write(w, c);
        self.tree.write(w, c);
        self.subtree.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(EftVertexLabel {
            digest: u64::read(r, c)?,
            id: Vertex::read(r, c)?,
            root: Vertex::read(r, c)?,
            anc: Anc::read(r, c)?,
            tree: Anc::read(r, c)?,
            subtree: Arc::read(r, c)?,
        })
    }
}

impl Codec for EftEdgeLabel {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.digest.write(w, c);
        self.eid.write(w, c);
        self.lower.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(EftEdgeLabel { digest: u64::read(r, c)?, eid: Eid::read(r, c)?, lower: Option::read(r, c)? })
    }
}
