//! Single-source labels: one fault in `O(log n)` bits and two faults in
//! `O(log² n)` bits. The source of every vertex is the root of its tree.
//!
//! A two-fault query `⟨t, x, y⟩` is normalised so that `x` is the lowest
//! fault on `T[s, t]`, and `x′` is the child of `x` towards `t`. Everything
//! about `x′` lives in the entry stored for it at `x` (when `x′ = h(x)`) or at
//! `t` (when `x′` is light). The answer then splits on where `y` sits:
//! below `x′`, above `x`, elsewhere under `x`, or off the path entirely.

use crate::bits::{BitReader, BitWriter, Codec, FormatError, Widths};
use crate::graph::{mask_of, Graph, Vertex};
use crate::instance::{par_vertices, DecodeError, InstanceId, Substrate};
use crate::paths::{self, PathTree};
use crate::tree::{ExtendedId, Hld, Pos};

pub const TAG_SS1: &str = "ss1f";
pub const TAG_SS2: &str = "ss2";

/// Single-source single-fault label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ss1fBody {
    pub owner: ExtendedId,
    /// `conn(s, b′, G′ ∖ {par(b′)})` for the light `b′` on `T[s, owner]`, top down.
    pub bits: Vec<bool>,
    /// `conn(s, h(owner), G′ ∖ {owner})`.
    pub heavy_bit: Option<bool>,
}

impl Ss1fBody {
    pub fn encode(sub: &Substrate, a: Vertex) -> Self {
        let h = &sub.hld;
        let mut bits = Vec::new();
        let mut x = a;
        while let Some(p) = h.parent_of(x) {
            if h.is_light(x) {
                bits.push(sub.source_conn(x, p));
            }
            x = p;
        }
        bits.reverse();
        Ss1fBody {
            owner: h.extended_id(a),
            bits,
            heavy_bit: h.heavy_of(a).map(|c| sub.source_conn(c, a)),
        }
    }
}

/// `conn(s, t, G′ ∖ {x})` where `s` is the root of `t`'s tree.
pub fn decode_ss1f(t: &Ss1fBody, x: &Ss1fBody) -> Result<bool, DecodeError> {
    let (te, xe) = (&t.owner, &x.owner);
    if te.id == xe.id || te.root == xe.id {
        return Ok(false);
    }
    if !xe.is_strict_ancestor_of(te) {
        return Ok(true);
    }
    if xe.heavy_contains(te) {
        return x.heavy_bit.ok_or(DecodeError::Inconsistent("heavy bit missing"));
    }
    bit_at(&t.bits, xe)
}

fn bit_at(bits: &[bool], w: &ExtendedId) -> Result<bool, DecodeError> {
    bits.get(w.nl as usize).copied().ok_or(DecodeError::Inconsistent("bitstring too short"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSs1f {
    pub instance: InstanceId,
    pub body: Ss1fBody,
}

pub fn encode_ss1f(g: &Graph) -> Vec<LabelSs1f> {
    let sub = Substrate::full(g);
    let instance = sub.instance(TAG_SS1);
    par_vertices(g.n(), |v| LabelSs1f { instance, body: Ss1fBody::encode(&sub, v) })
}

pub fn decode_ss1f_labels(t: &LabelSs1f, x: &LabelSs1f) -> Result<bool, DecodeError> {
    if t.instance != x.instance {
        return Err(DecodeError::InstanceMismatch);
    }
    decode_ss1f(&t.body, &x.body)
}

/// Down-case data of a child `c` with parent `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DownPart {
    pub alpha: Option<Pos>,
    pub beta: Option<Pos>,
    /// `conn(s, c, G ∖ {v, w})` over `w ∈ I↑(α_c)`.
    pub bits: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpPart {
    pub a: Option<Pos>,
    /// `conn(s, c, G ∖ {v, a_c})`.
    pub a_bit: bool,
    /// `conn(s, c, G ∖ {v, w})` over `w ∈ I↑(c)`.
    pub bits: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SidePart {
    pub g: Option<Pos>,
    /// `conn(s, c, G ∖ {v, g_c})`.
    pub g_bit: bool,
    /// `conn(s, g_c, G ∖ {v, w})` over `w ∈ I↑(g_c)`.
    pub g_bits: Vec<bool>,
    /// Single-fault label of `c` in `G ∖ {v}`.
    pub child_ss1: Ss1fBody,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndPart {
    pub ell: Option<Pos>,
    /// `conn(s, c, G ∖ {v, w})` over `w ∈ I↑(ℓ_c)`.
    pub bits: Vec<bool>,
}

/// Everything stored for one member `c ∈ I(owner)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ss2Entry {
    pub v: Vertex,
    pub child: Pos,
    pub down: DownPart,
    pub up: UpPart,
    pub side: SidePart,
    pub ind: IndPart,
    /// Single-fault label of the owner in `G ∖ {v}`; absent for `c = h(owner)`.
    pub owner_ss1: Option<Ss1fBody>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BPath {
    pub path: Vertex,
    pub b: Option<Pos>,
    /// `conn(s, h(owner), G ∖ {owner, b})`.
    pub bit: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpExtra {
    pub c: Option<Pos>,
    /// `q_{h(owner)}`.
    pub q: Option<Pos>,
    /// `b_{owner,Q}` for heavy paths `Q` meeting `T[owner, q]`.
    pub paths: Vec<BPath>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DPath {
    pub path: Vertex,
    pub d: Option<Pos>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ss2Body {
    pub ss1: Ss1fBody,
    pub entries: Vec<Ss2Entry>,
    pub up: UpExtra,
    /// `d_{owner,Q}` for heavy paths `Q` meeting `T[s, ℓ_{h(owner)}]`.
    pub ind_paths: Vec<DPath>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSs2 {
    pub instance: InstanceId,
    pub body: Ss2Body,
}

/// Restricted down-case label: only the entry for `h(owner)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelDPrime {
    pub owner: ExtendedId,
    pub heavy: Option<DownPart>,
}

/// Restricted up-case label: the entry for `h(owner)` plus the owner's extras.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelUPrime {
    pub owner: ExtendedId,
    pub heavy: Option<UpPart>,
    pub extra: UpExtra,
}

impl Ss2Body {
    pub fn owner(&self) -> &ExtendedId {
        &self.ss1.owner
    }

    fn heavy_entry(&self) -> Option<&Ss2Entry> {
        let h = self.owner().heavy_id()?;
        self.entries.iter().find(|e| e.child.id == h)
    }

    fn entry_below(&self, v: Vertex) -> Option<&Ss2Entry> {
        self.entries.iter().find(|e| e.v == v)
    }

    pub fn dprime(&self) -> LabelDPrime {
        LabelDPrime { owner: *self.owner(), heavy: self.heavy_entry().map(|e| e.down.clone()) }
    }

    pub fn uprime(&self) -> LabelUPrime {
        LabelUPrime { owner: *self.owner(), heavy: self.heavy_entry().map(|e| e.up.clone()), extra: self.up.clone() }
    }
}

// Encoding.

/// Per-parent encoding context: `G ∖ {v}` and the shortest-path tree from
/// the source in it.
pub(crate) struct ParentCtx<'g> {
    pub g: &'g Graph,
    pub h: &'g Hld,
    pub v: Vertex,
    pub s: Vertex,
    pub sub: Substrate<'g>,
    /// Absent when `v` is the source.
    pub pt: Option<PathTree>,
}

impl<'g> ParentCtx<'g> {
    /// `None` for leaves.
    pub fn new(g: &'g Graph, h: &'g Hld, v: Vertex) -> Option<Self> {
        if h.children(v).is_empty() {
            return None;
        }
        let s = h.root[v as usize];
        let sub = Substrate::new(g, mask_of(g.n(), &[v]));
        let pt = (v != s).then(|| PathTree::new(g, h, s, &sub.removed, None));
        Some(ParentCtx { g, h, v, s, sub, pt })
    }

    /// `conn(s, a, G ∖ {v, w})`.
    pub fn conn(&self, a: Vertex, w: Vertex) -> bool {
        self.sub.cut.connected(self.s, a, w)
    }

    /// `P_{s,c,v}` for a child `c`.
    pub fn path_to(&self, c: Vertex) -> Option<Vec<Vertex>> {
        self.pt.as_ref()?.path_to(c)
    }
}

pub(crate) struct SsParentOut {
    children: Vec<(Vertex, Ss2Entry)>,
    /// `(u, v′, SS1F(u, G ∖ {v}))` for `u` under a light child `v′`.
    owner_ss1: Vec<(Vertex, Vertex, Ss1fBody)>,
    extra: UpExtra,
    ind_paths: Vec<DPath>,
}

fn upper_bits(h: &Hld, target: Vertex, mut f: impl FnMut(Vertex) -> bool) -> Vec<bool> {
    h.upper_interesting(target).into_iter().map(&mut f).collect()
}

pub(crate) fn ss_parent(ctx: Option<&ParentCtx>) -> SsParentOut {
    let mut out = SsParentOut {
        children: Vec::new(),
        owner_ss1: Vec::new(),
        extra: UpExtra { c: None, q: None, paths: Vec::new() },
        ind_paths: Vec::new(),
    };
    let Some(ctx) = ctx.filter(|c| c.v != c.s) else { return out };
    let (g, h, v, sub) = (ctx.g, ctx.h, ctx.v, &ctx.sub);
    let conn = |a: Vertex, w: Vertex| ctx.conn(a, w);
    let pos = |x: Vertex| h.pos(x);
    for &c in h.children(v) {
        let path = ctx.path_to(c);
        let on_path = |f: fn(&Hld, &[Vertex], Vertex) -> Option<Vertex>, arg: Vertex| {
            path.as_deref().and_then(|p| f(h, p, arg))
        };
        let ell = on_path(paths::ell_on_path, v);
        let q = on_path(paths::q_on_path, c);
        let gv = on_path(paths::g_on_path, v);
        let alpha = paths::alpha(g, h, c).1;
        let exits = paths::exits_above(g, h, c);
        let (a, beta) = (exits.first().copied(), exits.last().copied());
        let entry = Ss2Entry {
            v,
            child: pos(c),
            down: DownPart {
                alpha: alpha.map(pos),
                beta: beta.map(pos),
                bits: alpha.map_or_else(Vec::new, |al| upper_bits(h, al, |w| conn(c, w))),
            },
            up: UpPart { a: a.map(pos), a_bit: a.is_some_and(|a| conn(c, a)), bits: upper_bits(h, c, |w| conn(c, w)) },
            side: SidePart {
                g: gv.map(pos),
                g_bit: gv.is_some_and(|x| conn(c, x)),
                g_bits: gv.map_or_else(Vec::new, |x| upper_bits(h, x, |w| conn(x, w))),
                child_ss1: Ss1fBody::encode(sub, c),
            },
            ind: IndPart { ell: ell.map(pos), bits: ell.map_or_else(Vec::new, |l| upper_bits(h, l, |w| conn(c, w))) },
            owner_ss1: None,
        };
        if h.is_light(c) {
            for &u in h.subtree(c) {
                out.owner_ss1.push((u, c, Ss1fBody::encode(sub, u)));
            }
        }
        if Some(c) == h.heavy_of(v) {
            out.extra.q = q.map(pos);
            if let Some(qv) = q {
                for top in h.paths_above(qv) {
                    let b = paths::vertex_b(g, h, v, top);
                    out.extra.paths.push(BPath { path: top, b: b.map(pos), bit: b.is_some_and(|b| conn(c, b)) });
                    if h.is_ancestor(top, v) {
                        break;
                    }
                }
            }
            if let Some(l) = ell {
                out.ind_paths = h
                    .paths_above(l)
                    .into_iter()
                    .map(|top| DPath { path: top, d: paths::vertex_d(g, h, v, top).map(pos) })
                    .collect();
            }
        }
        out.children.push((c, entry));
    }
    out.extra.c = paths::vertex_c(g, h, v).map(pos);
    out
}

pub(crate) fn assemble_ss2(g: &Graph, h: &Hld, outs: Vec<SsParentOut>) -> Vec<Ss2Body> {
    let n = g.n();
    let full = Substrate::full(g);
    let mut child_entry: Vec<Option<Ss2Entry>> = vec![None; n];
    let mut owner_ss1: Vec<Vec<(Vertex, Ss1fBody)>> = vec![Vec::new(); n];
    let mut extras = Vec::with_capacity(n);
    for out in outs {
        for (c, e) in out.children {
            child_entry[c as usize] = Some(e);
        }
        for (u, c, b) in out.owner_ss1 {
            owner_ss1[u as usize].push((c, b));
        }
        extras.push((out.extra, out.ind_paths));
    }
    extras
        .into_iter()
        .enumerate()
        .map(|(u, (up, ind_paths))| {
            let u = u as Vertex;
            let entries = h
                .interesting(u)
                .into_iter()
                .filter_map(|c| {
                    let mut e = child_entry[c as usize].clone()?;
                    if Some(c) != h.heavy_of(u) {
                        e.owner_ss1 = owner_ss1[u as usize].iter().find(|(k, _)| *k == c).map(|(_, b)| b.clone());
                    }
                    Some(e)
                })
                .collect();
            Ss2Body { ss1: Ss1fBody::encode(&full, u), entries, up, ind_paths }
        })
        .collect()
}

pub fn encode_ss2_bodies(g: &Graph, h: &Hld) -> Vec<Ss2Body> {
    let outs = par_vertices(g.n(), |v| ss_parent(ParentCtx::new(g, h, v).as_ref()));
    assemble_ss2(g, h, outs)
}

pub fn encode_ss2(g: &Graph) -> Vec<LabelSs2> {
    let sub = Substrate::full(g);
    let instance = sub.instance(TAG_SS2);
    encode_ss2_bodies(g, &sub.hld).into_iter().map(|body| LabelSs2 { instance, body }).collect()
}

// Decoding.

fn missing(what: &'static str) -> DecodeError {
    DecodeError::Inconsistent(what)
}

fn bits_at(bits: &[bool], w: &ExtendedId) -> Result<bool, DecodeError> {
    bit_at(bits, w)
}

/// Down case: `y ∈ T_{x′}`. `e` is the down data of `x′`; `y` supplies
/// `β_{h(y)}` when needed.
fn down(e: &DownPart, x: &ExtendedId, y: &ExtendedId, y_heavy: Option<&DownPart>) -> Result<bool, DecodeError> {
    let Some(alpha) = e.alpha else { return Ok(false) };
    if !y.above(alpha) {
        return Ok(true);
    }
    if y.in_upper_set_of_pos(alpha) {
        return bits_at(&e.bits, y);
    }
    let yh = y_heavy.ok_or(missing("down data of h(y)"))?;
    Ok(yh.beta.is_some_and(|b| x.strictly_above(b)))
}

/// Up case: `y ∈ T[s, x)`. `e` is the up data of `x′`.
fn up(e: &UpPart, x: &ExtendedId, x_extra: &UpExtra, y: &ExtendedId, y_extra: &UpExtra) -> Result<bool, DecodeError> {
    if y.id != x.id && y.in_upper_set_of_pos(x.pos()) {
        return bits_at(&e.bits, y);
    }
    let Some(a) = e.a else { return Ok(false) };
    if a.anc.contains(y.anc) && a.id != y.id {
        return Ok(true);
    }
    if a.id == y.id {
        return Ok(e.a_bit);
    }
    let Some(q) = y_extra.q else { return Ok(false) };
    if !x.above(q) {
        return Ok(true);
    }
    let bp = y_extra.paths.iter().find(|p| p.path == x.path).ok_or(missing("b entry for Q_x"))?;
    let Some(b) = bp.b else { return Ok(false) };
    if b.id == x.id {
        return Ok(bp.bit);
    }
    if y.strictly_above(b) && b.anc.contains(x.anc) {
        return Ok(true);
    }
    Ok(x_extra.c.is_some_and(|c| y.strictly_above(c)))
}

pub fn decode_dprime(t: Pos, x: &LabelDPrime, y: &LabelDPrime) -> Result<bool, DecodeError> {
    let _ = t;
    let e = x.heavy.as_ref().ok_or(missing("h(x) entry"))?;
    down(e, &x.owner, &y.owner, y.heavy.as_ref())
}

pub fn decode_uprime(t: Pos, x: &LabelUPrime, y: &LabelUPrime) -> Result<bool, DecodeError> {
    let _ = t;
    let e = x.heavy.as_ref().ok_or(missing("h(x) entry"))?;
    up(e, &x.owner, &x.extra, &y.owner, &y.extra)
}

fn side(t_src: Vertex, e: &Ss2Entry, x: &Ss2Body, y: &Ss2Body) -> Result<bool, DecodeError> {
    let (xe, ye) = (x.owner(), y.owner());
    if !xe.heavy_contains(ye) {
        let ys = y.entry_below(xe.id).and_then(|e| e.owner_ss1.as_ref()).ok_or(missing("SS1F(y, G∖x)"))?;
        let cs = &e.side.child_ss1;
        return Ok(cs.owner.root == t_src && decode_ss1f(cs, ys)?);
    }
    let Some(g) = e.side.g else { return Ok(true) };
    if g.id == ye.id {
        return Ok(e.side.g_bit);
    }
    if !ye.above(g) {
        return decode_dprime(g, &x.dprime(), &y.dprime());
    }
    if ye.in_upper_set_of_pos(g) {
        return bits_at(&e.side.g_bits, ye);
    }
    decode_uprime(g, &y.uprime(), &x.uprime())
}

fn independent(e: &IndPart, x: &Ss2Body, y: &Ss2Body) -> Result<bool, DecodeError> {
    let (xe, ye) = (x.owner(), y.owner());
    let Some(l) = e.ell else { return Ok(false) };
    if !ye.above(l) {
        return Ok(true);
    }
    if ye.in_upper_set_of_pos(l) {
        return bits_at(&e.bits, ye);
    }
    let hy = y.heavy_entry().ok_or(missing("h(y) entry"))?;
    let Some(ly) = hy.ind.ell else { return Ok(false) };
    if !xe.above(ly) {
        return Ok(true);
    }
    if xe.in_upper_set_of_pos(ly) {
        return bits_at(&hy.ind.bits, xe);
    }
    let hx = x.heavy_entry().ok_or(missing("h(x) entry"))?;
    let Some(lx) = hx.ind.ell else { return Ok(false) };
    if !ye.above(lx) {
        return Ok(true);
    }
    if ye.in_upper_set_of_pos(lx) {
        return bits_at(&hx.ind.bits, ye);
    }
    let dx = x.ind_paths.iter().find(|p| p.path == ye.path).ok_or(missing("d_{x,Q_y}"))?;
    let dy = y.ind_paths.iter().find(|p| p.path == xe.path).ok_or(missing("d_{y,Q_x}"))?;
    Ok(dx.d.is_some_and(|d| ye.strictly_above(d)) || dy.d.is_some_and(|d| xe.strictly_above(d)))
}

/// Where the second fault lies once the query is normalised.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ss2Case {
    Down,
    Up,
    Side,
    Independent,
}

pub fn classify(t: &ExtendedId, x: &ExtendedId, x_child: Pos, y: &ExtendedId) -> Ss2Case {
    let _ = t;
    if x_child.anc.contains(y.anc) {
        Ss2Case::Down
    } else if y.is_strict_ancestor_of(x) {
        Ss2Case::Up
    } else if x.is_strict_ancestor_of(y) {
        Ss2Case::Side
    } else {
        Ss2Case::Independent
    }
}

/// `conn(s, t, G ∖ {x, y})` with `s` the root of `t`'s tree.
pub fn decode_ss2_bodies(t: &Ss2Body, x: &Ss2Body, y: &Ss2Body) -> Result<bool, DecodeError> {
    let (te, xe, ye) = (t.owner(), x.owner(), y.owner());
    let s = te.root;
    if te.id == xe.id || te.id == ye.id || xe.id == s || ye.id == s {
        return Ok(false);
    }
    let (xin, yin) = (xe.root == s, ye.root == s);
    match (xin, yin) {
        (false, false) => return Ok(true),
        (true, false) => return decode_ss1f(&t.ss1, &x.ss1),
        (false, true) => return decode_ss1f(&t.ss1, &y.ss1),
        (true, true) => {}
    }
    if xe.id == ye.id {
        return decode_ss1f(&t.ss1, &x.ss1);
    }
    if !decode_ss1f(&t.ss1, &x.ss1)? || !decode_ss1f(&t.ss1, &y.ss1)? {
        return Ok(false);
    }
    let (xa, ya) = (xe.is_strict_ancestor_of(te), ye.is_strict_ancestor_of(te));
    let (x, y) = match (xa, ya) {
        (false, false) => return Ok(true),
        (true, true) if xe.is_ancestor_of(ye) => (y, x),
        (true, _) => (x, y),
        (false, true) => (y, x),
    };
    let (xe, ye) = (x.owner(), y.owner());
    let e = if xe.heavy_contains(te) { x.heavy_entry() } else { t.entry_below(xe.id) }.ok_or(missing("x′ entry"))?;
    match classify(te, xe, e.child, ye) {
        Ss2Case::Down => down(&e.down, xe, ye, y.heavy_entry().map(|e| &e.down)),
        Ss2Case::Up => up(&e.up, xe, &x.up, ye, &y.up),
        Ss2Case::Side => side(s, e, x, y),
        Ss2Case::Independent => independent(&e.ind, x, y),
    }
}

pub fn decode_ss2(t: &LabelSs2, x: &LabelSs2, y: &LabelSs2) -> Result<bool, DecodeError> {
    if t.instance != x.instance || t.instance != y.instance {
        return Err(DecodeError::InstanceMismatch);
    }
    decode_ss2_bodies(&t.body, &x.body, &y.body)
}

// Serialization.

impl Codec for Ss1fBody {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.owner.write(w, c);
        self.bits.write(w, c);
        self.heavy_bit.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(Ss1fBody { owner: ExtendedId::read(r, c)?, bits: Vec::read(r, c)?, heavy_bit: Option::read(r, c)? })
    }
}

impl Codec for LabelSs1f {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.instance.0.write(w, c);
        self.body.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(LabelSs1f { instance: InstanceId(u64::read(r, c)?), body: Ss1fBody::read(r, c)? })
    }
}

impl Codec for DownPart {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.alpha.write(w, c);
        self.beta.write(w, c);
        self.bits.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(DownPart { alpha: Option::read(r, c)?, beta: Option::read(r, c)?, bits: Vec::read(r, c)? })
    }
}

impl Codec for UpPart {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.a.write(w, c);
        w.bit(self.a_bit);
        self.bits.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(UpPart { a: Option::read(r, c)?, a_bit: r.bit()?, bits: Vec::read(r, c)? })
    }
}

impl Codec for SidePart {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.g.write(w, c);
        w.bit(self.g_bit);
        self.g_bits.write(w, c);
        self.child_ss1.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(SidePart {
            g: Option::read(r, c)?,
            g_bit: r.bit()?,
            g_bits: Vec::read(r, c)?,
            child_ss1: Ss1fBody::read(r, c)?,
        })
    }
}

impl Codec for IndPart {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.ell.write(w, c);
        self.bits.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(IndPart { ell: Option::read(r, c)?, bits: Vec::read(r, c)? })
    }
}

impl Codec for Ss2Entry {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.v.write(w, c);
        self.child.write(w, c);
        self.down.write(w, c);
        self.up.write(w, c);
        self.side.write(w, c);
        self.ind.write(w, c);
        self.owner_ss1.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(Ss2Entry {
            v: Vertex::read(r, c)?,
            child: Pos::read(r, c)?,
            down: DownPart::read(r, c)?,
            up: UpPart::read(r, c)?,
            side: SidePart::read(r, c)?,
            ind: IndPart::read(r, c)?,
            owner_ss1: Option::read(r, c)?,
        })
    }
}

impl Codec for BPath {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.path.write(w, c);
        self.b.write(w, c);
        w.bit(self.bit);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(BPath { path: Vertex::read(r, c)?, b: Option::read(r, c)?, bit: r.bit()? })
    }
}

impl Codec for UpExtra {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.c.write(w, c);
        self.q.write(w, c);
        self.paths.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(UpExtra { c: Option::read(r, c)?, q: Option::read(r, c)?, paths: Vec::read(r, c)? })
    }
}

impl Codec for DPath {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.path.write(w, c);
        self.d.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(DPath { path: Vertex::read(r, c)?, d: Option::read(r, c)? })
    }
}

impl Codec for Ss2Body {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.ss1.write(w, c);
        self.entries.write(w, c);
        self.up.write(w, c);
        self.ind_paths.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(Ss2Body {
            ss1: Ss1fBody::read(r, c)?,
            entries: Vec::read(r, c)?,
            up: UpExtra::read(r, c)?,
            ind_paths: Vec::read(r, c)?,
        })
    }
}

impl Codec for LabelSs2 {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.instance.0.write(w, c);
        self.body.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(LabelSs2 { instance: InstanceId(u64::read(r, c)?), body: Ss2Body::read(r, c)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::graph::oracle_connected;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn source(h: &Hld, t: Vertex) -> Vertex {
        h.root[t as usize]
    }

    fn check_ss1(g: &Graph) {
        let labels = encode_ss1f(g);
        let h = Hld::build(g);
        for t in 0..g.n() as Vertex {
            for x in 0..g.n() as Vertex {
                let want = oracle_connected(g, source(&h, t), t, &[x]).unwrap();
                assert_eq!(decode_ss1f_labels(&labels[t as usize], &labels[x as usize]).unwrap(), want, "t={t} x={x}");
            }
        }
    }

    fn check_ss2(g: &Graph) {
        let labels = encode_ss2(g);
        let h = Hld::build(g);
        let n = g.n() as Vertex;
        for t in 0..n {
            let s = source(&h, t);
            for x in 0..n {
                for y in x..n {
                    let want = oracle_connected(g, s, t, &[x, y]).unwrap();
                    let got = decode_ss2(&labels[t as usize], &labels[x as usize], &labels[y as usize]).unwrap();
                    assert_eq!(got, want, "{g:?} t={t} x={x} y={y}");
                    let got = decode_ss2(&labels[t as usize], &labels[y as usize], &labels[x as usize]).unwrap();
                    assert_eq!(got, want, "{g:?} t={t} x={y} y={x}");
                }
            }
        }
    }

    #[test]
    fn ss1_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for i in 0..40 {
            check_ss1(&gen::gnp(5 + i % 18, [0.1, 0.2, 0.4][i % 3], &mut rng));
        }
        for (_, g) in gen::structured(14) {
            check_ss1(&g);
        }
    }

    #[test]
    fn ss1_path_has_no_light_bits() {
        let g = gen::path(6);
        for l in encode_ss1f(&g) {
            assert!(l.body.bits.is_empty());
            assert_eq!(l.body.heavy_bit.is_some(), l.body.owner.id != 5);
        }
    }

    #[test]
    fn bitstring_index_is_light_depth() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = gen::gnp(60, 0.06, &mut rng);
        let h = Hld::build(&g);
        for v in 0..60 {
            for (i, w) in h.upper_interesting(v).into_iter().enumerate() {
                assert_eq!(h.nl[w as usize] as usize, i);
                assert!(h.extended_id(w).in_upper_set_of_pos(h.pos(v)));
            }
        }
    }

    #[test]
    fn ss2_cycle6() {
        check_ss2(&gen::cycle(6));
    }

    #[test]
    fn ss2_exhaustive_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for i in 0..60 {
            check_ss2(&gen::gnp(5 + i % 14, [0.15, 0.25, 0.4][i % 3], &mut rng));
        }
    }

    #[test]
    fn ss2_structured() {
        for (_, g) in gen::structured(13) {
            check_ss2(&g);
        }
        check_ss2(&gen::theta(&[2, 3, 4]));
        check_ss2(&gen::complete(5));
    }

    #[test]
    fn restricted_labels_under_promise() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut seen = (0, 0);
        for i in 0..80 {
            let g = gen::gnp(8 + i % 8, 0.3, &mut rng);
            let h = Hld::build(&g);
            let bodies = encode_ss2_bodies(&g, &h);
            let n = g.n() as Vertex;
            for x in 0..n {
                let Some(hx) = h.heavy_of(x) else { continue };
                let s = h.root[x as usize];
                if x == s {
                    continue;
                }
                for t in h.subtree(hx).iter().copied() {
                    for y in 0..n {
                        if y == t || y == x || y == s {
                            continue;
                        }
                        let want = oracle_connected(&g, s, hx, &[x, y]).unwrap();
                        let (bx, by) = (&bodies[x as usize], &bodies[y as usize]);
                        if h.is_ancestor(hx, y) && !h.is_ancestor(y, t) {
                            assert_eq!(decode_dprime(h.pos(t), &bx.dprime(), &by.dprime()).unwrap(), want);
                            seen.0 += 1;
                        }
                        if h.heavy_of(y).is_some_and(|hy| h.is_ancestor(hy, x)) {
                            assert_eq!(decode_uprime(h.pos(t), &bx.uprime(), &by.uprime()).unwrap(), want);
                            seen.1 += 1;
                        }
                    }
                }
            }
        }
        assert!(seen.0 > 100 && seen.1 > 100, "{seen:?}");
    }

    #[test]
    fn codec_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = gen::gnp(30, 0.15, &mut rng);
        let c = Widths::new(g.n());
        for l in encode_ss2(&g) {
            assert_eq!(LabelSs2::from_bytes(&l.to_bytes(&c), &c).unwrap(), l);
        }
    }
}
