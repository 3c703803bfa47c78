//! Single-fault all-pairs labels.
//!
//! Every vertex `a` stores, for each `b′ ∈ I(a)` with `b = par(b′)`, whether
//! `b′` still reaches the root once `b` fails and, if not, the component of
//! `b′` in `G ∖ {b}`. A query fault `x` that separates `w` from the root is
//! always `par(b′)` for the child `b′` of `x` towards `w`, and that child is
//! either `h(x)` (stored at `x`) or a light vertex (stored at `w`).

use crate::bits::{BitReader, BitWriter, Codec, FormatError, Widths};
use crate::graph::{Graph, Vertex};
use crate::instance::{par_vertices, DecodeError, InstanceId, Substrate};
use crate::tree::ExtendedId;

pub const TAG: &str = "1vft";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Vft1Entry {
    /// `par(b′)`.
    pub b: Vertex,
    pub child: Vertex,
    /// `conn(s, b′, G′ ∖ {b})`.
    pub conn_s: bool,
    /// `CID(b′, G′ ∖ {b})`.
    pub cid: Vertex,
}

/// Instance-free part of a 1-VFT label, embeddable in other labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vft1Body {
    pub owner: ExtendedId,
    /// Component of the owner in the base graph.
    pub base: Vertex,
    pub entries: Vec<Vft1Entry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Label1Vft {
    pub instance: InstanceId,
    pub body: Vft1Body,
}

/// Where a vertex ends up after one fault.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceSide {
    /// Still connected to the root of its tree.
    Source,
    /// Cut off from the root; the component identifier.
    Cid(Vertex),
}

impl Vft1Body {
    pub fn encode(sub: &Substrate, a: Vertex) -> Self {
        let h = &sub.hld;
        let entries = h
            .interesting(a)
            .into_iter()
            .map(|child| {
                let b = h.parent[child as usize];
                Vft1Entry {
                    b,
                    child,
                    conn_s: sub.source_conn(child, b),
                    cid: sub.cut.cid(child, b).expect("child survives its parent's failure"),
                }
            })
            .collect();
        Vft1Body { owner: h.extended_id(a), base: sub.cut.cid0(a).expect("owner present"), entries }
    }

    fn entry_for_parent(&self, b: Vertex) -> Option<&Vft1Entry> {
        self.entries.iter().find(|e| e.b == b)
    }
}

/// Labels of every vertex present in the substrate.
pub fn encode_bodies(sub: &Substrate) -> Vec<Option<Vft1Body>> {
    par_vertices(sub.n(), |v| sub.present(v).then(|| Vft1Body::encode(sub, v)))
}

pub fn encode_1vft(g: &Graph) -> Vec<Label1Vft> {
    let sub = Substrate::full(g);
    let instance = sub.instance(TAG);
    encode_bodies(&sub)
        .into_iter()
        .map(|b| Label1Vft { instance, body: b.expect("full substrate") })
        .collect()
}

/// Connectivity of `w` to its root after `x` fails. `w ≠ x`.
pub fn decode_source(w: &Vft1Body, x: &Vft1Body) -> Result<SourceSide, DecodeError> {
    let (wid, xid) = (&w.owner, &x.owner);
    if wid.id == xid.id {
        return Err(DecodeError::Inconsistent("source query with w = x"));
    }
    if !xid.is_strict_ancestor_of(wid) {
        return Ok(SourceSide::Source);
    }
    let entry = if xid.heavy_contains(wid) {
        let h = xid.heavy_id().expect("heavy child exists");
        x.entries.iter().find(|e| e.child == h)
    } else {
        w.entry_for_parent(xid.id)
    };
    let e = entry.ok_or(DecodeError::Inconsistent("missing entry for the child towards w"))?;
    Ok(if e.conn_s { SourceSide::Source } else { SourceSide::Cid(e.cid) })
}

/// `conn(u, v, G′ ∖ {x})` from three bodies of one instance.
pub fn decode_bodies(u: &Vft1Body, v: &Vft1Body, x: &Vft1Body) -> Result<bool, DecodeError> {
    let (ui, vi, xi) = (u.owner.id, v.owner.id, x.owner.id);
    if ui == xi || vi == xi {
        return Ok(false);
    }
    if u.base != v.base {
        return Ok(false);
    }
    if ui == vi {
        return Ok(true);
    }
    Ok(decode_source(u, x)? == decode_source(v, x)?)
}

pub fn decode_1vft(lu: &Label1Vft, lv: &Label1Vft, lx: &Label1Vft) -> Result<bool, DecodeError> {
    if lu.instance != lv.instance || lu.instance != lx.instance {
        return Err(DecodeError::InstanceMismatch);
    }
    decode_bodies(&lu.body, &lv.body, &lx.body)
}

impl Codec for Vft1Entry {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.b.write(w, c);
        self.child.write(w, c);
        w.bit(self.conn_s);
        self.cid.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(Vft1Entry { b: Vertex::read(r, c)?, child: Vertex::read(r, c)?, conn_s: r.bit()?, cid: Vertex::read(r, c)? })
    }
}

impl Codec for Vft1Body {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.owner.write(w, c);
        self.base.write(w, c);
        self.entries.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(Vft1Body { owner: ExtendedId::read(r, c)?, base: Vertex::read(r, c)?, entries: Vec::read(r, c)? })
    }
}

impl Codec for Label1Vft {
    fn write(&self, w: &mut BitWriter, c: &Widths) {
        self.instance.0.write(w, c);
        self.body.write(w, c);
    }
    fn read(r: &mut BitReader<'_>, c: &Widths) -> Result<Self, FormatError> {
        Ok(Label1Vft { instance: InstanceId(u64::read(r, c)?), body: Vft1Body::read(r, c)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::graph::oracle_connected;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check_exhaustive(g: &Graph) {
        let labels = encode_1vft(g);
        let n = g.n() as Vertex;
        for x in 0..n {
            for u in 0..n {
                for v in u..n {
                    let got = decode_1vft(&labels[u as usize], &labels[v as usize], &labels[x as usize]).unwrap();
                    assert_eq!(got, oracle_connected(g, u, v, &[x]).unwrap(), "{g:?} u={u} v={v} x={x}");
                }
            }
        }
    }

    #[test]
    fn path_entries() {
        let g = gen::path(5);
        let labels = encode_1vft(&g);
        assert!(labels[4].body.entries.is_empty());
        let e = labels[3].body.entries[0];
        assert_eq!((e.b, e.child, e.conn_s, e.cid), (3, 4, false, 4));
        let src = decode_source(&labels[4].body, &labels[2].body).unwrap();
        assert_eq!(src, SourceSide::Cid(4));
        assert!(!decode_1vft(&labels[0], &labels[4], &labels[2]).unwrap());
    }

    #[test]
    fn star_entries() {
        let g = gen::star(5);
        let labels = encode_1vft(&g);
        assert_eq!(labels[0].body.entries.len(), 1);
        assert_eq!(labels[0].body.entries[0].child, 1);
        for (leaf, l) in labels.iter().enumerate().skip(2) {
            assert_eq!(l.body.entries.len(), 1);
            assert_eq!(l.body.entries[0].child, leaf as Vertex);
        }
    }

    #[test]
    fn exhaustive_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..30 {
            let p = [0.1, 0.2, 0.4][i % 3];
            check_exhaustive(&gen::gnp(6 + i % 15, p, &mut rng));
        }
        for (_, g) in gen::structured(12) {
            check_exhaustive(&g);
        }
    }

    #[test]
    fn codec_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = gen::gnp(40, 0.1, &mut rng);
        let c = Widths::new(g.n());
        for l in encode_1vft(&g) {
            assert_eq!(Label1Vft::from_bytes(&l.to_bytes(&c), &c).unwrap(), l);
        }
    }

    #[test]
    fn instance_mismatch() {
        let a = encode_1vft(&gen::path(4));
        let b = encode_1vft(&gen::cycle(4));
        assert_eq!(decode_1vft(&a[0], &b[1], &a[2]), Err(DecodeError::InstanceMismatch));
    }
}
