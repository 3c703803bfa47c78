//! Tree-biased replacement paths and the special vertices derived from them.
//!
//! Every function here works on the tree of `h` containing its arguments and
//! uses that tree's root as the source `s`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::{mask_of, reach_from, Graph, Vertex};
use crate::tree::{Hld, NIL};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PathError {
    #[error("endpoint {0} is a failed vertex")]
    EndpointFailed(Vertex),
    #[error("vertex {0} out of range")]
    OutOfRange(Vertex),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplacementPath {
    pub vertices: Vec<Vertex>,
    pub weight: u64,
}

/// Single-source shortest paths under weights 1 (tree edge) and `n` (other).
#[derive(Debug, Clone)]
pub struct PathTree {
    pub source: Vertex,
    pub dist: Vec<u64>,
    pub pred: Vec<u32>,
}

impl PathTree {
    /// Dijkstra from `source` in `G ∖ blocked`. Among equal-weight
    /// predecessors the lowest ID wins. Stops early once `target` settles.
    pub fn new(g: &Graph, h: &Hld, source: Vertex, blocked: &[bool], target: Option<Vertex>) -> Self {
        let n = g.n();
        let heavy_w = n as u64;
        let mut dist = vec![u64::MAX; n];
        let mut pred = vec![NIL; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[source as usize] = 0;
        heap.push(Reverse((0u64, source)));
        while let Some(Reverse((d, x))) = heap.pop() {
            if done[x as usize] {
                continue;
            }
            done[x as usize] = true;
            if Some(x) == target {
                break;
            }
            for &y in g.neighbors(x) {
                if blocked[y as usize] || done[y as usize] {
                    continue;
                }
                let tree = h.parent[y as usize] == x || h.parent[x as usize] == y;
                let nd = d + if tree { 1 } else { heavy_w };
                let slot = &mut dist[y as usize];
                if nd < *slot {
                    *slot = nd;
                    pred[y as usize] = x;
                    heap.push(Reverse((nd, y)));
                } else if nd == *slot && x < pred[y as usize] {
                    pred[y as usize] = x;
                }
            }
        }
        PathTree { source, dist, pred }
    }

    /// Path from the source to `t`, source first.
    pub fn path_to(&self, t: Vertex) -> Option<Vec<Vertex>> {
        if self.dist[t as usize] == u64::MAX {
            return None;
        }
        let mut out = vec![t];
        let mut x = t;
        while x != self.source {
            x = self.pred[x as usize];
            out.push(x);
        }
        out.reverse();
        Some(out)
    }
}

/// Minimum-weight `a`–`b` path in `G ∖ F`.
pub fn replacement_path(
    g: &Graph,
    h: &Hld,
    a: Vertex,
    b: Vertex,
    faults: &[Vertex],
) -> Result<Option<ReplacementPath>, PathError> {
    for &v in faults.iter().chain([&a, &b]) {
        if v as usize >= g.n() {
            return Err(PathError::OutOfRange(v));
        }
    }
    for v in [a, b] {
        if faults.contains(&v) {
            return Err(PathError::EndpointFailed(v));
        }
    }
    let blocked = mask_of(g.n(), faults);
    let t = PathTree::new(g, h, a, &blocked, Some(b));
    Ok(t.path_to(b).map(|vertices| ReplacementPath { weight: t.dist[b as usize], vertices }))
}

fn source_of(h: &Hld, v: Vertex) -> Vertex {
    h.root[v as usize]
}

/// `P_{s,a,par(a)}` for a vertex whose parent is not the root.
fn path_from_source(g: &Graph, h: &Hld, a: Vertex) -> Option<Vec<Vertex>> {
    let p = h.parent_of(a)?;
    let s = source_of(h, a);
    if p == s {
        return None;
    }
    let blocked = mask_of(g.n(), &[p]);
    PathTree::new(g, h, s, &blocked, Some(a)).path_to(a)
}

/// Last vertex of `path` outside `T_p`.
pub fn ell_on_path(h: &Hld, path: &[Vertex], p: Vertex) -> Option<Vertex> {
    path.iter().rev().copied().find(|&v| !h.is_ancestor(p, v))
}

/// First vertex of `path` inside `T_u`.
pub fn q_on_path(h: &Hld, path: &[Vertex], u: Vertex) -> Option<Vertex> {
    path.iter().copied().find(|&v| h.is_ancestor(u, v))
}

/// Last vertex of `path` inside `T_{h(p)}`.
pub fn g_on_path(h: &Hld, path: &[Vertex], p: Vertex) -> Option<Vertex> {
    let hp = h.heavy_of(p)?;
    path.iter().rev().copied().find(|&v| h.is_ancestor(hp, v))
}

/// First vertex of `path` on `T[s, p)`.
pub fn f_on_path(h: &Hld, path: &[Vertex], p: Vertex) -> Option<Vertex> {
    path.iter().copied().find(|&v| h.is_strict_ancestor(v, p))
}

/// `ℓ_a`: last vertex of `P_{s,a,par(a)}` in `T ∖ T_{par(a)}`.
pub fn vertex_ell(g: &Graph, h: &Hld, a: Vertex) -> Option<Vertex> {
    let p = h.parent_of(a)?;
    ell_on_path(h, &path_from_source(g, h, a)?, p)
}

/// `f_a`: first vertex of `P_{a,s,par(a)}` on `T[s, par(a))`.
pub fn vertex_f(g: &Graph, h: &Hld, a: Vertex) -> Option<Vertex> {
    let p = h.parent_of(a)?;
    let s = source_of(h, a);
    if p == s {
        return None;
    }
    let blocked = mask_of(g.n(), &[p]);
    let path = PathTree::new(g, h, a, &blocked, Some(s)).path_to(s)?;
    f_on_path(h, &path, p)
}

/// `q_u`: first vertex of `P_{s,u,par(u)}` in `T_u`.
pub fn vertex_q(g: &Graph, h: &Hld, u: Vertex) -> Option<Vertex> {
    q_on_path(h, &path_from_source(g, h, u)?, u)
}

/// `g_u`: last vertex of `P_{s,u,par(u)}` in `T_{h(par(u))}`.
pub fn vertex_g(g: &Graph, h: &Hld, u: Vertex) -> Option<Vertex> {
    let p = h.parent_of(u)?;
    g_on_path(h, &path_from_source(g, h, u)?, p)
}

fn subtree_mask(h: &Hld, v: Vertex, mask: &mut [bool]) {
    for &x in h.subtree(v) {
        mask[x as usize] = true;
    }
}

fn touches(g: &Graph, v: Vertex, set: &[bool]) -> bool {
    g.neighbors(v).iter().any(|&w| set[w as usize])
}

/// `A_u` and `α_u = LCA(A_u)`.
pub fn alpha(g: &Graph, h: &Hld, u: Vertex) -> (Vec<Vertex>, Option<Vertex>) {
    let Some(p) = h.parent_of(u) else {
        return (Vec::new(), None);
    };
    let s = source_of(h, u);
    if p == s {
        return (Vec::new(), None);
    }
    let mut blocked = vec![false; g.n()];
    subtree_mask(h, u, &mut blocked);
    blocked[p as usize] = true;
    let reach = reach_from(g, s, &blocked);
    let set: Vec<Vertex> = h.subtree(u).iter().copied().filter(|&v| touches(g, v, &reach)).collect();
    let lca = h.lca_all(&set);
    (set, lca)
}

/// Vertices of `T[s, par(u))` adjacent to `u`'s component in `G ∖ T[s, par(u)]`,
/// top to bottom.
pub fn exits_above(g: &Graph, h: &Hld, u: Vertex) -> Vec<Vertex> {
    let Some(p) = h.parent_of(u) else {
        return Vec::new();
    };
    let upper = h.root_path(p);
    let blocked = mask_of(g.n(), &upper);
    let reach = reach_from(g, u, &blocked);
    upper[..upper.len() - 1].iter().copied().filter(|&v| touches(g, v, &reach)).collect()
}

/// `β_u`: deepest qualifying vertex of `T[s, par(u))`.
pub fn beta(g: &Graph, h: &Hld, u: Vertex) -> Option<Vertex> {
    exits_above(g, h, u).last().copied()
}

/// `a_u`: highest qualifying vertex of `T[s, par(u))`.
pub fn vertex_a(g: &Graph, h: &Hld, u: Vertex) -> Option<Vertex> {
    exits_above(g, h, u).first().copied()
}

/// `b_{u,Q}` for the heavy path `Q` with top `q_top`; `None` unless `u ∈ Q↑`.
pub fn vertex_b(g: &Graph, h: &Hld, u: Vertex, q_top: Vertex) -> Option<Vertex> {
    let leaf = opt_leaf(h, q_top)?;
    if !h.is_ancestor(u, leaf) {
        return None;
    }
    let below = h.path_down(u, leaf);
    let blocked = mask_of(g.n(), &below);
    let reach = reach_from(g, source_of(h, u), &blocked);
    below[1..].iter().copied().find(|&v| touches(g, v, &reach))
}

/// `c_u`: deepest `v ∈ T[s,u)` reachable from `h(u)` avoiding `T[s,u]` inside.
pub fn vertex_c(g: &Graph, h: &Hld, u: Vertex) -> Option<Vertex> {
    let hu = h.heavy_of(u)?;
    let upper = h.root_path(u);
    let blocked = mask_of(g.n(), &upper);
    let reach = reach_from(g, hu, &blocked);
    upper[..upper.len() - 1].iter().rev().copied().find(|&v| touches(g, v, &reach))
}

/// `d_{u,Q}`: deepest `v ∈ Q` with an `s`–`v` path internally avoiding
/// `{u} ∪ (Q ∖ T[s,u))`.
pub fn vertex_d(g: &Graph, h: &Hld, u: Vertex, q_top: Vertex) -> Option<Vertex> {
    let leaf = opt_leaf(h, q_top)?;
    let q = h.path_down(q_top, leaf);
    let mut blocked = vec![false; g.n()];
    for &v in &q {
        if !h.is_strict_ancestor(v, u) {
            blocked[v as usize] = true;
        }
    }
    blocked[u as usize] = true;
    let reach = reach_from(g, source_of(h, u), &blocked);
    q.iter().rev().copied().find(|&v| reach[v as usize] || touches(g, v, &reach))
}

fn opt_leaf(h: &Hld, q_top: Vertex) -> Option<Vertex> {
    let leaf = h.path_leaf[q_top as usize];
    (leaf != NIL).then_some(leaf)
}

/// `AnSet(a, b)`: up to two lowest-ID vertices `c ∈ T_{h(b)}` with an `a`–`c`
/// path avoiding `T⁺_{h(b)} ∖ {c}`.
pub fn analog_set(g: &Graph, h: &Hld, a: Vertex, b: Vertex) -> Vec<Vertex> {
    let Some(hb) = h.heavy_of(b) else {
        return Vec::new();
    };
    if h.is_ancestor(hb, a) {
        return vec![a];
    }
    if a == b {
        return Vec::new();
    }
    let mut blocked = vec![false; g.n()];
    subtree_mask(h, hb, &mut blocked);
    blocked[b as usize] = true;
    let reach = reach_from(g, a, &blocked);
    let mut out: Vec<Vertex> = h.subtree(hb).iter().copied().filter(|&c| touches(g, c, &reach)).collect();
    out.sort_unstable();
    out.truncate(2);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::graph::oracle_connected;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Is there a `from`–`to` path whose interior avoids `avoid`? Endpoints may
    /// lie in `avoid`; an edge `from`–`to` or `from == to` counts.
    fn path_exists(g: &Graph, from: Vertex, to: Vertex, avoid: &[Vertex]) -> bool {
        let blocked: Vec<Vertex> = avoid.iter().copied().filter(|&v| v != from && v != to).collect();
        reach_from(g, from, &mask_of(g.n(), &blocked))[to as usize]
    }

    fn conn_without(g: &Graph, a: Vertex, b: Vertex, removed: &[Vertex]) -> bool {
        oracle_connected(g, a, b, removed).unwrap()
    }

    fn graphs() -> Vec<Graph> {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut out: Vec<Graph> = (0..40)
            .map(|i| {
                let n = rng.gen_range(4..13);
                gen::gnp(n, [0.2, 0.3, 0.5][i % 3], &mut rng)
            })
            .collect();
        out.extend(gen::structured(10).into_iter().map(|(_, g)| g));
        out
    }

    fn path_vertices(h: &Hld, a: Vertex, b: Vertex) -> Vec<Vertex> {
        h.path_down(a, b)
    }

    #[test]
    fn cycle_examples() {
        let g = gen::cycle(5);
        let h = Hld::build(&g);
        let p = replacement_path(&g, &h, 0, 2, &[1]).unwrap().unwrap();
        assert_eq!(p.vertices, vec![0, 4, 3, 2]);
        assert_eq!(vertex_ell(&g, &h, 2), Some(3));
        assert_eq!(vertex_f(&g, &h, 2), Some(0));
        assert_eq!(replacement_path(&g, &h, 0, 3, &[]).unwrap().unwrap().vertices, vec![0, 4, 3]);
        assert!(replacement_path(&g, &h, 0, 1, &[1]).is_err());
    }

    #[test]
    fn tree_hugging() {
        for g in graphs() {
            let h = Hld::build(&g);
            let n = g.n() as Vertex;
            for f1 in 0..n {
                for f2 in f1..n {
                    let faults = [f1, f2];
                    for a in 0..n {
                        for b in 0..n {
                            if faults.contains(&a) || faults.contains(&b) || h.root[a as usize] != h.root[b as usize] {
                                continue;
                            }
                            let Some(p) = replacement_path(&g, &h, a, b, &faults).unwrap() else {
                                assert!(!conn_without(&g, a, b, &faults));
                                continue;
                            };
                            assert!(p.vertices.iter().all(|v| !faults.contains(v)));
                            for i in 0..p.vertices.len() {
                                for j in i + 1..p.vertices.len() {
                                    let (c, d) = (p.vertices[i], p.vertices[j]);
                                    let l = h.lca(c, d).unwrap();
                                    let mut tp = path_vertices(&h, l, c);
                                    tp.reverse();
                                    tp.extend(path_vertices(&h, l, d).into_iter().skip(1));
                                    if tp.iter().all(|v| !faults.contains(v)) {
                                        assert_eq!(&p.vertices[i..=j], &tp[..]);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn special_vertices_satisfy_their_definitions() {
        for g in graphs() {
            let h = Hld::build(&g);
            for u in 0..g.n() as Vertex {
                let s = h.root[u as usize];
                let Some(p) = h.parent_of(u) else { continue };
                let upper = h.root_path(p);
                let strict_upper = &upper[..upper.len() - 1];

                // β and a: exhaustive candidate scan over T[s, par(u)).
                let ok: Vec<Vertex> = strict_upper
                    .iter()
                    .copied()
                    .filter(|&v| path_exists(&g, u, v, &upper))
                    .collect();
                assert_eq!(beta(&g, &h, u), ok.last().copied());
                // a_u via its first formulation: an s–u path avoiding T(v, par(u)].
                let a_first = strict_upper.iter().copied().find(|&v| {
                    let below: Vec<Vertex> = upper.iter().copied().filter(|&x| h.is_strict_ancestor(v, x)).collect();
                    conn_without(&g, s, u, &below)
                });
                assert_eq!(vertex_a(&g, &h, u), a_first);

                // α: membership per definition.
                let (set, lca) = alpha(&g, &h, u);
                if p != s {
                    let mut tplus: Vec<Vertex> = h.subtree(u).to_vec();
                    tplus.push(p);
                    let expect: Vec<Vertex> = h
                        .subtree(u)
                        .iter()
                        .copied()
                        .filter(|&v| {
                            let rm: Vec<Vertex> = tplus.iter().copied().filter(|&x| x != v).collect();
                            conn_without(&g, s, v, &rm)
                        })
                        .collect();
                    assert_eq!(set, expect);
                    assert_eq!(lca, h.lca_all(&expect));
                }

                // ℓ, f, q, g and their structural observations.
                if p != s && conn_without(&g, s, u, &[p]) {
                    let path = replacement_path(&g, &h, s, u, &[p]).unwrap().unwrap().vertices;
                    let ell = vertex_ell(&g, &h, u).unwrap();
                    let i = path.iter().position(|&v| v == ell).unwrap();
                    assert!(path[i + 1..].iter().all(|&v| h.is_ancestor(p, v)));
                    let q = vertex_q(&g, &h, u).unwrap();
                    let iq = path.iter().position(|&v| v == q).unwrap();
                    assert!(path[..iq].iter().all(|&v| !h.is_ancestor(u, v)));
                    assert_eq!(&path[iq..], &h.path_down(u, q).into_iter().rev().collect::<Vec<_>>()[..]);
                    if let Some(gv) = vertex_g(&g, &h, u) {
                        let ig = path.iter().position(|&v| v == gv).unwrap();
                        let hp = h.heavy_of(p).unwrap();
                        assert!(h.is_ancestor(hp, gv));
                        assert!(path[ig + 1..].iter().all(|&v| !h.is_ancestor(hp, v) && v != p));
                    }
                    let back = replacement_path(&g, &h, u, s, &[p]).unwrap().unwrap().vertices;
                    let f = vertex_f(&g, &h, u).unwrap();
                    assert!(h.is_strict_ancestor(f, p));
                    let jf = back.iter().position(|&v| v == f).unwrap();
                    assert!(back[..jf].iter().all(|v| !upper.contains(v)));
                } else {
                    assert_eq!(vertex_ell(&g, &h, u), None);
                    assert_eq!(vertex_f(&g, &h, u), None);
                }

                // c_u: deepest v ∈ T[s,u) with an h(u)–v path avoiding T[s,u].
                let rp = h.root_path(u);
                let c_expect = h.heavy_of(u).and_then(|hu| {
                    rp[..rp.len() - 1].iter().rev().copied().find(|&v| path_exists(&g, hu, v, &rp))
                });
                assert_eq!(vertex_c(&g, &h, u), c_expect);

                // b_{u,Q}, d_{u,Q} over every heavy path.
                for top in 0..g.n() as Vertex {
                    let leaf = h.path_leaf[top as usize];
                    if leaf == NIL {
                        continue;
                    }
                    let qv = h.path_down(top, leaf);
                    let b_expect = if h.is_ancestor(u, leaf) {
                        let below = h.path_down(u, leaf);
                        below[1..].iter().copied().find(|&v| path_exists(&g, s, v, &below))
                    } else {
                        None
                    };
                    assert_eq!(vertex_b(&g, &h, u, top), b_expect);
                    let mut avoid: Vec<Vertex> = qv.iter().copied().filter(|&v| !h.is_strict_ancestor(v, u)).collect();
                    avoid.push(u);
                    let d_expect = qv.iter().rev().copied().find(|&v| path_exists(&g, s, v, &avoid));
                    assert_eq!(vertex_d(&g, &h, u, top), d_expect);
                }

                // AnSet(u, b) for every strict ancestor b.
                for &b in &upper {
                    let Some(hb) = h.heavy_of(b) else { continue };
                    let got = analog_set(&g, &h, u, b);
                    let mut tplus: Vec<Vertex> = h.subtree(hb).to_vec();
                    tplus.push(b);
                    let mut expect: Vec<Vertex> = h
                        .subtree(hb)
                        .iter()
                        .copied()
                        .filter(|&c| {
                            if c == u {
                                return true;
                            }
                            if tplus.contains(&u) {
                                return false;
                            }
                            let rm: Vec<Vertex> = tplus.iter().copied().filter(|&x| x != c).collect();
                            conn_without(&g, u, c, &rm)
                        })
                        .collect();
                    expect.sort_unstable();
                    expect.truncate(2);
                    assert_eq!(got, expect, "u={u} b={b}");
                }
            }
        }
    }

    #[test]
    fn direct_edge_cases() {
        // u's only non-tree edge goes to s: q_u = u and a_u = s.
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let h = Hld::build(&g);
        assert_eq!(h.parent_of(2), Some(1));
        assert_eq!(vertex_q(&g, &h, 2), Some(2));
        assert_eq!(vertex_a(&g, &h, 2), Some(0));
        // Pure path: nothing qualifies for b.
        let p = gen::path(6);
        let hp = Hld::build(&p);
        assert_eq!(vertex_b(&p, &hp, 2, 0), None);
    }
}
