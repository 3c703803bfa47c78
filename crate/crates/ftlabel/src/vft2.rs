//! Dual-fault all-pairs labels.
//!
//! A label bundles the owner's single-fault label, the root's single-fault
//! label, the single-source two-fault label and three tables indexed by
//! `b′ ∈ I(owner)` with `b = par(b′)`:
//!
//! * `P`: the last exit `ℓ_{b′}` of the replacement path from the root and,
//!   for every `c ∈ I↑(ℓ_{b′})`, the component of `b′` in `G ∖ {b, c}` and
//!   whether it still reaches `h(b)` and `h(c)`.
//! * `AH`: the first vertex `f_{b′}` where the replacement path back to the
//!   root meets `T[s, b)`, and the component of `b′` in `G ∖ T[s, b]`.
//! * `Dep`: single-fault labels in `G ∖ {b}`, analog vertices in `T_{h(b)}`
//!   and the component of the owner in `G ∖ T⁺_{h(b)}`.

use std::collections::HashMap;

use crate::bits::{BitReader, BitWriter, Codec, FormatError, Widths};
use crate::graph::{component_ids, mask_of, sparse_certificate, Graph, Vertex};
use crate::instance::{par_vertices, DecodeError, InstanceId, Substrate};
use crate::paths;
use crate::ss::{self, ParentCtx, Ss2Body};
use crate::tree::{ExtendedId, Hld, Pos};
use crate::vft1::{self, Vft1Body};

pub const TAG: &str = "2vft";

/// Per `c ∈ I↑(ℓ_{b′})`, in top-down order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PSub {
    /// `CID(b′, G ∖ {b, c})`.
    pub cid: Vertex,
    /// `conn(b′, h(b), G ∖ {b, c})`.
    pub to_hb: bool,
    /// `conn(b′, h(c), G ∖ {b, c})`.
    pub to_hc: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PEntry {
    pub b: Vertex,
    pub child: Vertex,
    pub ell: Option<Pos>,
    pub subs: Vec<PSub>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AhEntry {
    pub b: Vertex,
    pub child: Vertex,
    pub f: Option<Vertex>,
    /// `conn(b′, par(b), G ∖ {b, f})`.
    pub bit: bool,
    /// `CID(b′, G ∖ T[s, b])`.
    pub cid: Vertex,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AhBody {
    pub owner: ExtendedId,
    pub entries: Vec<AhEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepEntry {
    pub b: Vertex,
    pub child: Vertex,
    /// Light `b′`: single-fault label of the owner in `G ∖ {b}`.
    pub own: Option<Vft1Body>,
    /// `b′ = h(owner)`: single-fault label of `b′` in `G ∖ {b}`.
    pub heavy: Option<Vft1Body>,
    /// Light `b′`: `AH` labels of `AnSet(owner, b)`.
    pub analogs: Vec<AhBody>,
    /// Light `b′`: `CID(owner, G ∖ T⁺_{h(b)})`.
    pub cid_out: Option<Vertex>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vft2Body {
    pub vft1: Vft1Body,
    pub root_vft1: Vft1Body,
    pub ss2: Ss2Body,
    pub p: Vec<PEntry>,
    pub ah: AhBody,
    pub dep: Vec<DepEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Label2Vft {
    pub instance: InstanceId,
    pub body: Vft2Body,
}

// Encoding.

/// `(1F(u, G ∖ {v}), AnSet(u, v), CID(u, G ∖ T⁺_{h(v)}))` for an owner `u`.
type OwnerData = (Vft1Body, Vec<Vertex>, Option<Vertex>);

#[derive(Default)]
struct ParentOut {
    p: Vec<(Vertex, PEntry)>,
    ah: Vec<(Vertex, AhEntry)>,
    heavy_1f: Option<(Vertex, Vft1Body)>,
    /// `(u, child, data)`.
    owners: Vec<(Vertex, Vertex, OwnerData)>,
}

/// Two lowest-ID vertices of `T_{h(v)}` adjacent to each component of
/// `G ∖ T⁺_{h(v)}`, keyed by component ID.
fn analogs_by_component(g: &Graph, h: &Hld, hv: Vertex, cid: &[Option<Vertex>]) -> HashMap<Vertex, Vec<Vertex>> {
    let mut inside: Vec<Vertex> = h.subtree(hv).to_vec();
    inside.sort_unstable();
    let mut out: HashMap<Vertex, Vec<Vertex>> = HashMap::new();
    for c in inside {
        for &y in g.neighbors(c) {
            let Some(k) = cid[y as usize] else { continue };
            let list = out.entry(k).or_default();
            if list.len() < 2 && list.last() != Some(&c) {
                list.push(c);
            }
        }
    }
    out
}

fn vft2_parent(ctx: Option<&ParentCtx>) -> ParentOut {
    let mut out = ParentOut::default();
    let Some(ctx) = ctx else { return out };
    let (g, h, v, s, sub) = (ctx.g, ctx.h, ctx.v, ctx.s, &ctx.sub);
    let hv = h.heavy_of(v);
    if v != s {
        let outside = component_ids(g, &mask_of(g.n(), &h.root_path(v)));
        let pv = h.parent_of(v).expect("non-root");
        for &c in h.children(v) {
            let path = ctx.path_to(c);
            let ell = path.as_deref().and_then(|p| paths::ell_on_path(h, p, v));
            let subs = ell.map_or_else(Vec::new, |l| {
                h.upper_interesting(l)
                    .into_iter()
                    .map(|w| PSub {
                        cid: sub.cut.cid(c, w).expect("b′ survives"),
                        to_hb: hv.is_some_and(|x| sub.cut.connected(c, x, w)),
                        to_hc: h.heavy_of(w).is_some_and(|x| sub.cut.connected(c, x, w)),
                    })
                    .collect()
            });
            out.p.push((c, PEntry { b: v, child: c, ell: ell.map(|l| h.pos(l)), subs }));
            let back: Option<Vec<Vertex>> = path.map(|p| p.into_iter().rev().collect());
            let f = back.as_deref().and_then(|p| paths::f_on_path(h, p, v));
            let ah = AhEntry {
                b: v,
                child: c,
                f,
                bit: f.is_some_and(|f| sub.cut.connected(c, pv, f)),
                cid: outside[c as usize].expect("below the removed path"),
            };
            out.ah.push((c, ah));
        }
    }
    let Some(hv) = hv else { return out };
    out.heavy_1f = Some((hv, Vft1Body::encode(sub, hv)));
    let mut mask = vec![false; g.n()];
    mask[v as usize] = true;
    for &w in h.subtree(hv) {
        mask[w as usize] = true;
    }
    let cid = component_ids(g, &mask);
    let analogs = analogs_by_component(g, h, hv, &cid);
    for &c in h.children(v) {
        if c == hv {
            continue;
        }
        for &u in h.subtree(c) {
            let k = cid[u as usize];
            let an = k.and_then(|k| analogs.get(&k)).cloned().unwrap_or_default();
            out.owners.push((u, c, (Vft1Body::encode(sub, u), an, k)));
        }
    }
    out
}

fn find_by_child<T>(items: &[(Vertex, T)], c: Vertex) -> Option<&T> {
    items.iter().find(|(k, _)| *k == c).map(|(_, t)| t)
}

/// Label bodies for every vertex of `g`.
pub fn encode_bodies(g: &Graph) -> Vec<Vft2Body> {
    let n = g.n();
    let full = Substrate::full(g);
    let h = &full.hld;
    let outs = par_vertices(n, |v| {
        let ctx = ParentCtx::new(g, h, v);
        (ss::ss_parent(ctx.as_ref()), vft2_parent(ctx.as_ref()))
    });
    let (ss_outs, outs): (Vec<_>, Vec<_>) = outs.into_iter().unzip();
    let ss2 = ss::assemble_ss2(g, h, ss_outs);
    let vft1 = vft1::encode_bodies(&full);

    let mut p_of: Vec<Option<PEntry>> = vec![None; n];
    let mut ah_of: Vec<Option<AhEntry>> = vec![None; n];
    let mut heavy_1f: Vec<Option<Vft1Body>> = vec![None; n];
    let mut owners: Vec<Vec<(Vertex, OwnerData)>> = vec![Vec::new(); n];
    for out in outs {
        for (c, e) in out.p {
            p_of[c as usize] = Some(e);
        }
        for (c, e) in out.ah {
            ah_of[c as usize] = Some(e);
        }
        if let Some((c, b)) = out.heavy_1f {
            heavy_1f[c as usize] = Some(b);
        }
        for (u, c, (b, an, k)) in out.owners {
            owners[u as usize].push((c, (b, an, k)));
        }
    }
    let ah: Vec<AhBody> = (0..n as Vertex)
        .map(|u| AhBody {
            owner: h.extended_id(u),
            entries: h.interesting(u).into_iter().filter_map(|c| ah_of[c as usize]).collect(),
        })
        .collect();
    let vft1: Vec<Vft1Body> = vft1.into_iter().map(|b| b.expect("full substrate")).collect();
    let mut ss2 = ss2.into_iter();
    (0..n as Vertex)
        .map(|u| {
            let iu = h.interesting(u);
            let p = iu.iter().filter_map(|&c| p_of[c as usize].clone()).collect();
            let dep = iu
                .iter()
                .map(|&c| {
                    let b = h.parent[c as usize];
                    let mut e = DepEntry { b, child: c, own: None, heavy: None, analogs: Vec::new(), cid_out: None };
                    if Some(c) == h.heavy_of(u) {
                        e.heavy = heavy_1f[c as usize].clone();
                    } else if let Some((own, an, k)) = find_by_child(&owners[u as usize], c) {
                        e.own = Some(own.clone());
                        e.analogs = an.iter().map(|&a| ah[a as usize].clone()).collect();
                        e.cid_out = *k;
                    }
                    e
                })
                .collect();
            Vft2Body {
                vft1: vft1[u as usize].clone(),
                root_vft1: vft1[h.root[u as usize] as usize].clone(),
                ss2: ss2.next().expect("one body per vertex"),
                p,
                ah: ah[u as usize].clone(),
                dep,
            }
        })
        .collect()
}

pub fn encode_2vft(g: &Graph) -> Vec<Label2Vft> {
    let instance = Substrate::full(g).instance(TAG);
    encode_bodies(g).into_iter().map(|body| Label2Vft { instance, body }).collect()
}

/// Labels built on a sparse 3-connectivity certificate of `g`. Queries with at
/// most two faults have the same answers as on `g`.
pub fn encode_2vft_certified(g: &Graph) -> Vec<Label2Vft> {
    encode_2vft(&sparse_certificate(g, 3))
}

// Decoding.

/// Decoder branches, counted by [`Coverage`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Trivial,
    OneFault,
    C1,
    C2,
    C3,
    PDirect,
    PRerunHit,
    PRerunMiss,
    LightAncestor,
    Analog,
    C4Heavy,
    C4Cid,
    AhNeither,
    AhOne,
    AhBits,
    AhCid,
}

impl Branch {
    pub const ALL: [Branch; 16] = [
        Branch::Trivial,
        Branch::OneFault,
        Branch::C1,
        Branch::C2,
        Branch::C3,
        Branch::PDirect,
        Branch::PRerunHit,
        Branch::PRerunMiss,
        Branch::LightAncestor,
        Branch::Analog,
        Branch::C4Heavy,
        Branch::C4Cid,
        Branch::AhNeither,
        Branch::AhOne,
        Branch::AhBits,
        Branch::AhCid,
    ];
}

/// Hit counts per decoder branch.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Coverage {
    counts: [u64; Branch::ALL.len()],
}

impl Coverage {
    fn hit(&mut self, b: Branch) {
        self.counts[b as usize] += 1;
    }

    pub fn get(&self, b: Branch) -> u64 {
        self.counts[b as usize]
    }

    pub fn missing(&self) -> Vec<Branch> {
        Branch::ALL.into_iter().filter(|&b| self.get(b) == 0).collect()
    }
}

fn missing(what: &'static str) -> DecodeError {
    DecodeError::Inconsistent(what)
}

impl Vft2Body {
    pub fn owner(&self) -> &ExtendedId {
        &self.vft1.owner
    }

    fn p_entry(&self, b: Vertex) -> Option<&PEntry> {
        self.p.iter().find(|e| e.b == b)
    }

    fn dep_entry(&self, b: Vertex) -> Option<&DepEntry> {
        self.dep.iter().find(|e| e.b == b)
    }
}

impl AhBody {
    fn entry(&self, b: Vertex) -> Option<&AhEntry> {
        self.entries.iter().find(|e| e.b == b)
    }
}

/// What property `P` reveals about `w` in `G ∖ {x, y}`.
#[derive(Debug, Clone, Copy)]
struct PInfo {
    /// Exact component, with exact reachability of `h(x)` and `h(y)`. When
    /// absent, `w` reaches both.
    cid: Option<Vertex>,
    to_hx: bool,
    to_hy: bool,
}

fn prop_p(w: &Vft2Body, x: &Vft2Body, y: &Vft2Body, cov: &mut Coverage) -> Result<PInfo, DecodeError> {
    let we = w.owner();
    let (a, b, swapped) = if x.owner().is_strict_ancestor_of(we) {
        (x, y, false)
    } else if y.owner().is_strict_ancestor_of(we) {
        (y, x, true)
    } else {
        return Err(missing("no fault above w"));
    };
    let (ae, be) = (a.owner(), b.owner());
    let e = if ae.heavy_contains(we) { a.p_entry(ae.id) } else { w.p_entry(ae.id) }.ok_or(missing("P entry of a′"))?;
    let l = e.ell.ok_or(missing("ℓ of a′"))?;
    // (cid, reaches h(a), reaches h(b))
    let (cid, ha, hb) = if be.in_upper_set_of_pos(l) {
        cov.hit(Branch::PDirect);
        let sub = e.subs.get(be.nl as usize).ok_or(missing("P sub-entry"))?;
        (Some(sub.cid), sub.to_hb, sub.to_hc)
    } else {
        let eb = b.p_entry(be.id).ok_or(missing("P entry of h(b)"))?;
        let lb = eb.ell.ok_or(missing("ℓ of h(b)"))?;
        if ae.in_upper_set_of_pos(lb) {
            cov.hit(Branch::PRerunHit);
            let sub = eb.subs.get(ae.nl as usize).ok_or(missing("P sub-entry"))?;
            (Some(sub.cid), sub.to_hc, true)
        } else {
            cov.hit(Branch::PRerunMiss);
            (None, true, true)
        }
    };
    let (to_hx, to_hy) = if swapped { (hb, ha) } else { (ha, hb) };
    Ok(PInfo { cid, to_hx, to_hy })
}

fn independent(u: &Vft2Body, v: &Vft2Body, x: &Vft2Body, y: &Vft2Body, cov: &mut Coverage) -> Result<bool, DecodeError> {
    let s = &u.root_vft1;
    for w in [u, v] {
        for f in [x, y] {
            if !vft1::decode_bodies(&w.vft1, s, &f.vft1)? {
                cov.hit(Branch::C3);
                return Ok(true);
            }
        }
    }
    let pu = prop_p(u, x, y, cov)?;
    let pv = prop_p(v, x, y, cov)?;
    Ok(match (pu.cid, pv.cid) {
        (Some(a), Some(b)) => a == b,
        (None, Some(_)) => pv.to_hx || pv.to_hy,
        (Some(_), None) => pu.to_hx || pu.to_hy,
        (None, None) => true,
    })
}

/// `conn(w, par(y), G ∖ {x, y})` for `w ∈ T_y`, plus `CID(y′, G ∖ T[s, y])`.
fn towards_parent(w: &AhBody, x: &ExtendedId, y: &AhBody) -> Result<(bool, Vertex), DecodeError> {
    let ye = &y.owner;
    let e = if ye.heavy_contains(&w.owner) {
        let hy = ye.heavy_id().expect("heavy child exists");
        y.entries.iter().find(|e| e.child == hy)
    } else {
        w.entry(ye.id)
    }
    .ok_or(missing("AH entry of y′"))?;
    let up = match e.f {
        None => false,
        Some(f) if f == x.id => e.bit,
        Some(_) => true,
    };
    Ok((up, e.cid))
}

/// Connectivity of `u, v ∈ T_{h(x)}` with `y ∈ T_{h(x)}`.
fn ah_query(u: &AhBody, v: &AhBody, x: &AhBody, y: &AhBody, cov: &mut Coverage) -> Result<bool, DecodeError> {
    let ye = &y.owner;
    let (du, dv) = (ye.is_strict_ancestor_of(&u.owner), ye.is_strict_ancestor_of(&v.owner));
    match (du, dv) {
        (false, false) => {
            cov.hit(Branch::AhNeither);
            Ok(true)
        }
        (true, false) | (false, true) => {
            cov.hit(Branch::AhOne);
            let w = if du { u } else { v };
            Ok(towards_parent(w, &x.owner, y)?.0)
        }
        (true, true) => {
            let (pu, cu) = towards_parent(u, &x.owner, y)?;
            let (pv, cv) = towards_parent(v, &x.owner, y)?;
            if pu || pv {
                cov.hit(Branch::AhBits);
                Ok(pu && pv)
            } else {
                cov.hit(Branch::AhCid);
                Ok(cu == cv)
            }
        }
    }
}

/// `y` a strict descendant of `x`, both faults above `u` and `v`.
fn dependent<'a>(u: &'a Vft2Body, v: &'a Vft2Body, x: &'a Vft2Body, y: &'a Vft2Body, cov: &mut Coverage) -> Result<bool, DecodeError> {
    let (xe, ye) = (x.owner(), y.owner());
    if !xe.is_strict_ancestor_of(u.owner()) || !xe.is_strict_ancestor_of(v.owner()) {
        return Err(missing("faults not above the query"));
    }
    if xe.is_light_ancestor_of(ye) {
        cov.hit(Branch::LightAncestor);
        fn light_1f(w: &Vft2Body, b: Vertex) -> Option<&Vft1Body> {
            w.dep_entry(b).and_then(|e| e.own.as_ref())
        }
        let heavy_1f = x.dep_entry(xe.id).and_then(|e| e.heavy.as_ref());
        let tilde = |w: &'a Vft2Body| if xe.heavy_contains(w.owner()) { heavy_1f } else { light_1f(w, xe.id) };
        let (tu, tv) = (tilde(u), tilde(v));
        let ty = light_1f(y, xe.id);
        return match (tu, tv, ty) {
            (Some(a), Some(b), Some(c)) => vft1::decode_bodies(a, b, c),
            _ => Err(missing("1-VFT label in G∖x")),
        };
    }
    let hat = |w: &'_ Vft2Body, cov: &mut Coverage| -> Result<Option<AhBody>, DecodeError> {
        if xe.heavy_contains(w.owner()) {
            return Ok(Some(w.ah.clone()));
        }
        let e = w.dep_entry(xe.id).ok_or(missing("Dep entry of x_w"))?;
        let a = e.analogs.iter().find(|a| a.owner.id != ye.id);
        if a.is_some() {
            cov.hit(Branch::Analog);
        }
        Ok(a.cloned())
    };
    let (hu, hv) = (hat(u, cov)?, hat(v, cov)?);
    match (hu, hv) {
        (Some(a), Some(b)) => ah_query(&a, &b, &x.ah, &y.ah, cov),
        _ => {
            if xe.heavy_contains(u.owner()) || xe.heavy_contains(v.owner()) {
                cov.hit(Branch::C4Heavy);
                return Ok(false);
            }
            cov.hit(Branch::C4Cid);
            let out = |w: &Vft2Body| w.dep_entry(xe.id).map(|e| e.cid_out);
            let (cu, cv) = (out(u).ok_or(missing("Dep entry"))?, out(v).ok_or(missing("Dep entry"))?);
            Ok(cu.is_some() && cu == cv)
        }
    }
}

/// `conn(u, v, G ∖ {x, y})`, recording the branch taken.
pub fn decode_bodies_traced(
    u: &Vft2Body,
    v: &Vft2Body,
    x: &Vft2Body,
    y: &Vft2Body,
    cov: &mut Coverage,
) -> Result<bool, DecodeError> {
    let (ui, vi) = (u.owner().id, v.owner().id);
    if [x.owner().id, y.owner().id].iter().any(|&f| f == ui || f == vi) {
        cov.hit(Branch::Trivial);
        return Ok(false);
    }
    if ui == vi {
        cov.hit(Branch::Trivial);
        return Ok(true);
    }
    if u.vft1.base != v.vft1.base {
        cov.hit(Branch::Trivial);
        return Ok(false);
    }
    let (xin, yin) = (x.vft1.base == u.vft1.base, y.vft1.base == u.vft1.base);
    let single = match (xin, yin) {
        (false, false) => {
            cov.hit(Branch::Trivial);
            return Ok(true);
        }
        (true, false) => Some(x),
        (false, true) => Some(y),
        (true, true) => (x.owner().id == y.owner().id).then_some(x),
    };
    if let Some(f) = single {
        cov.hit(Branch::OneFault);
        return vft1::decode_bodies(&u.vft1, &v.vft1, &f.vft1);
    }
    if !vft1::decode_bodies(&u.vft1, &v.vft1, &x.vft1)? || !vft1::decode_bodies(&u.vft1, &v.vft1, &y.vft1)? {
        cov.hit(Branch::C1);
        return Ok(false);
    }
    let su = ss::decode_ss2_bodies(&u.ss2, &x.ss2, &y.ss2)?;
    let sv = ss::decode_ss2_bodies(&v.ss2, &x.ss2, &y.ss2)?;
    if su || sv {
        cov.hit(Branch::C2);
        return Ok(su && sv);
    }
    let (xe, ye) = (x.owner(), y.owner());
    if xe.is_ancestor_of(ye) {
        dependent(u, v, x, y, cov)
    } else if ye.is_ancestor_of(xe) {
        dependent(u, v, y, x, cov)
    } else {
        independent(u, v, x, y, cov)
    }
}

pub fn decode_bodies(u: &Vft2Body, v: &Vft2Body, x: &Vft2Body, y: &Vft2Body) -> Result<bool, DecodeError> {
    decode_bodies_traced(u, v, x, y, &mut Coverage::default())
}

pub fn decode_2vft(u: &Label2Vft, v: &Label2Vft, x: &Label2Vft, y: &Label2Vft) -> Result<bool, DecodeError> {
    let i = u.instance;
    if [v, x, y].iter().any(|l| l.instance != i) {
        return Err(DecodeError::InstanceMismatch);
    }
    decode_bodies(&u.body, &v.body, &x.body, &y.body)
}

/// `conn(u, v, G ∖ F)` for `|F| ≤ 2`.
pub fn decode_2vft_faults(u: &Label2Vft, v: &Label2Vft, faults: &[&Label2Vft]) -> Result<bool, DecodeError> {
    match faults {
        [] => {
            if u.instance != v.instance {
                return Err(DecodeError::InstanceMismatch);
            }
            Ok(u.body.vft1.base == v.body.vft1.base)
        }
        [x] => decode_2vft(u, v, x, x),
        [x, y] => decode_2vft(u, v, x, y),
        _ => Err(DecodeError::Budget { got: faults.len(), budget: 2 }),
    }
}

// Serialization.

impl Codec for PSub {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.cid.write(w, c);
        w.bit(self.to_hb);
        w.bit(self.to_hc);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(PSub { cid: Vertex::read(r, c)?, to_hb: r.bit()?, to_hc: r.bit()? })
    }
}

impl Codec for PEntry {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.b.write(w, c);
        self.child.write(w, c);
        self.ell.write(w, c);
        self.subs.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(PEntry { b: Vertex::read(r, c)?, child: Vertex::read(r, c)?, ell: Option::read(r, c)?, subs: Vec::read(r, c)? })
    }
}

impl Codec for AhEntry {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.b.write(w, c);
        self.child.write(w, c);
        self.f.write(w, c);
        w.bit(self.bit);
        self.cid.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(AhEntry {
            b: Vertex::read(r, c)?,
            child: Vertex::read(r, c)?,
            f: Option::read(r, c)?,
            bit: r.bit()?,
            cid: Vertex::read(r, c)?,
        })
    }
}

impl Codec for AhBody {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.owner.write(w, c);
        self.entries.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(AhBody { owner: ExtendedId::read(r, c)?, entries: Vec::read(r, c)? })
    }
}

impl Codec for DepEntry {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.b.write(w, c);
        self.child.write(w, c);
        self.own.write(w, c);
        self.heavy.write(w, c);
        self.analogs.write(w, c);
        self.cid_out.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(DepEntry {
            b: Vertex::read(r, c)?,
            child: Vertex::read(r, c)?,
            own: Option::read(r, c)?,
            heavy: Option::read(r, c)?,
            analogs: Vec::read(r, c)?,
            cid_out: Option::read(r, c)?,
        })
    }
}

impl Codec for Vft2Body {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.vft1.write(w, c);
        self.root_vft1.write(w, c);
        self.ss2.write(w, c);
        self.p.write(w, c);
        self.ah.write(w, c);
        self.dep.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(Vft2Body {
            vft1: Vft1Body::read(r, c)?,
            root_vft1: Vft1Body::read(r, c)?,
            ss2: Ss2Body::read(r, c)?,
            p: Vec::read(r, c)?,
            ah: AhBody::read(r, c)?,
            dep: Vec::read(r, c)?,
        })
    }
}

impl Codec for Label2Vft {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.instance.0.write(w, c);
        self.body.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(Label2Vft { instance: InstanceId(u64::read(r, c)?), body: Vft2Body::read(r, c)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::graph::oracle_connected;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check_exhaustive(g: &Graph, cov: &mut Coverage) {
        let labels = encode_bodies(g);
        let n = g.n() as Vertex;
        for x in 0..n {
            for y in x..n {
                for u in 0..n {
                    for v in u..n {
                        let l = |i: Vertex| &labels[i as usize];
                        let got = decode_bodies_traced(l(u), l(v), l(x), l(y), cov)
                            .unwrap_or_else(|e| panic!("{e} on {g:?} u={u} v={v} x={x} y={y}"));
                        let want = oracle_connected(g, u, v, &[x, y]).unwrap();
                        assert_eq!(got, want, "{g:?} u={u} v={v} x={x} y={y}");
                    }
                }
            }
        }
    }

    #[test]
    fn analog_sets_match_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for i in 0..20 {
            let g = gen::gnp(8 + i % 10, 0.25, &mut rng);
            let labels = encode_bodies(&g);
            let h = Hld::build(&g);
            for (u, l) in labels.iter().enumerate() {
                for e in l.dep.iter().filter(|e| e.own.is_some()) {
                    let got: Vec<Vertex> = e.analogs.iter().map(|a| a.owner.id).collect();
                    assert_eq!(got, paths::analog_set(&g, &h, u as Vertex, e.b), "u={u} b={}", e.b);
                }
            }
        }
    }

    #[test]
    fn exhaustive_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut cov = Coverage::default();
        for i in 0..45 {
            let p = [0.15, 0.3, 0.5][i % 3];
            check_exhaustive(&gen::gnp(6 + i % 15, p, &mut rng), &mut cov);
        }
        assert!(cov.missing().is_empty(), "unreached branches {:?}", cov.missing());
    }

    #[test]
    fn exhaustive_structured() {
        let mut cov = Coverage::default();
        for (_, g) in gen::structured(14) {
            check_exhaustive(&g, &mut cov);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..6 {
            check_exhaustive(&gen::shuffle(&gen::grid(3, 5), &mut rng), &mut cov);
            check_exhaustive(&gen::shuffle(&gen::theta(&[3, 4, 5]), &mut rng), &mut cov);
        }
    }

    #[test]
    fn certificate_preserves_answers() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..6 {
            let g = gen::gnp(12, 0.5, &mut rng);
            let labels = encode_2vft_certified(&g);
            let n = g.n() as Vertex;
            for x in 0..n {
                for y in x..n {
                    for u in 0..n {
                        for v in u..n {
                            let l = |i: Vertex| &labels[i as usize];
                            let got = decode_2vft(l(u), l(v), l(x), l(y)).unwrap();
                            assert_eq!(got, oracle_connected(&g, u, v, &[x, y]).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn codec_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = gen::gnp(30, 0.15, &mut rng);
        let c = Widths::new(g.n());
        for l in encode_2vft(&g) {
            assert_eq!(Label2Vft::from_bytes(&l.to_bytes(&c), &c).unwrap(), l);
        }
    }

    #[test]
    fn instance_mismatch() {
        let a = encode_2vft(&gen::cycle(5));
        let b = encode_2vft(&gen::path(5));
        assert_eq!(decode_2vft(&a[0], &a[1], &b[2], &a[3]), Err(DecodeError::InstanceMismatch));
    }
}
