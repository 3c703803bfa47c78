//! BFS spanning forests with heavy-light decomposition and extended IDs.

use std::collections::VecDeque;

use crate::graph::{Graph, Vertex};

pub const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("vertex {0} out of range")]
    OutOfRange(Vertex),
    #[error("{a} is not a strict ancestor of {b}")]
    NotAncestor { a: Vertex, b: Vertex },
    #[error("{0} and {1} lie in different components")]
    DifferentComponents(Vertex, Vertex),
}

/// Half-open DFS interval `[tin, tout)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Anc {
    pub tin: u32,
    pub tout: u32,
}

impl Anc {
    pub fn contains(self, other: Anc) -> bool {
        self.tin <= other.tin && other.tin < self.tout
    }
}

/// Everything a decoder needs to know about a vertex's place in the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExtendedId {
    pub id: Vertex,
    /// Root of the vertex's tree (lowest ID of its component).
    pub root: Vertex,
    pub anc: Anc,
    pub heavy: Option<(Vertex, Anc)>,
    pub nl: u32,
    pub path: Vertex,
}

/// A vertex and its ancestry interval, enough to place it relative to any
/// extended ID of the same tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pos {
    pub id: Vertex,
    pub anc: Anc,
}

/// Relation of the first argument to the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ancestry {
    Equal,
    AncestorHeavy,
    AncestorLight,
    Descendant,
    Unrelated,
}

pub fn ancestry(a: &ExtendedId, b: &ExtendedId) -> Ancestry {
    if a.id == b.id {
        Ancestry::Equal
    } else if a.root != b.root {
        Ancestry::Unrelated
    } else if a.anc.contains(b.anc) {
        if a.heavy_contains(b) {
            Ancestry::AncestorHeavy
        } else {
            Ancestry::AncestorLight
        }
    } else if b.anc.contains(a.anc) {
        Ancestry::Descendant
    } else {
        Ancestry::Unrelated
    }
}

impl ExtendedId {
    pub fn is_root(&self) -> bool {
        self.id == self.root
    }

    pub fn same_tree(&self, other: &ExtendedId) -> bool {
        self.root == other.root
    }

    /// Non-strict ancestry: `self ∈ T[root, other]`.
    pub fn is_ancestor_of(&self, other: &ExtendedId) -> bool {
        self.root == other.root && self.anc.contains(other.anc)
    }

    pub fn is_strict_ancestor_of(&self, other: &ExtendedId) -> bool {
        self.id != other.id && self.is_ancestor_of(other)
    }

    /// `other ∈ T_{h(self)}`.
    pub fn heavy_contains(&self, other: &ExtendedId) -> bool {
        self.root == other.root && self.heavy.is_some_and(|(_, a)| a.contains(other.anc))
    }

    pub fn is_light_ancestor_of(&self, other: &ExtendedId) -> bool {
        self.is_strict_ancestor_of(other) && !self.heavy_contains(other)
    }

    /// `self ∈ I↑(other)`: `self` is `other` or a light ancestor of it.
    pub fn in_upper_set_of(&self, other: &ExtendedId) -> bool {
        self.id == other.id || self.is_light_ancestor_of(other)
    }

    pub fn pos(&self) -> Pos {
        Pos { id: self.id, anc: self.anc }
    }

    /// Non-strict ancestry towards a vertex of the same tree.
    pub fn above(&self, p: Pos) -> bool {
        self.anc.contains(p.anc)
    }

    pub fn strictly_above(&self, p: Pos) -> bool {
        self.id != p.id && self.above(p)
    }

    pub fn heavy_above(&self, p: Pos) -> bool {
        self.heavy.is_some_and(|(_, a)| a.contains(p.anc))
    }

    /// `self ∈ I↑(p)`.
    pub fn in_upper_set_of_pos(&self, p: Pos) -> bool {
        self.id == p.id || (self.above(p) && !self.heavy_above(p))
    }

    /// The heavy child, as a partial ID (ID and interval only).
    pub fn heavy_id(&self) -> Option<Vertex> {
        self.heavy.map(|(h, _)| h)
    }
}

/// Rooted BFS spanning forest of `G ∖ removed` with heavy-light data.
/// Each component is rooted at its lowest vertex ID.
#[derive(Debug, Clone)]
pub struct Hld {
    pub root: Vec<u32>,
    pub parent: Vec<u32>,
    pub depth: Vec<u32>,
    pub size: Vec<u32>,
    pub heavy: Vec<u32>,
    pub tin: Vec<u32>,
    pub tout: Vec<u32>,
    pub nl: Vec<u32>,
    pub path: Vec<u32>,
    /// Deepest vertex of the heavy path whose top is the index (NIL otherwise).
    pub path_leaf: Vec<u32>,
    /// Vertices by DFS entry time.
    pub preorder: Vec<Vertex>,
    children_start: Vec<u32>,
    children: Vec<Vertex>,
}

impl Hld {
    /// Forest over every component of `g`.
    pub fn build(g: &Graph) -> Self {
        Self::build_masked(g, &vec![false; g.n()])
    }

    /// Tree of the component of `s`, rooted at `s`; other vertices are absent.
    pub fn build_rooted(g: &Graph, s: Vertex) -> Result<Self, TreeError> {
        if s as usize >= g.n() {
            return Err(TreeError::OutOfRange(s));
        }
        Ok(Self::build_from(g, &vec![false; g.n()], Some(s)))
    }

    /// Forest over the components of `G ∖ removed`.
    pub fn build_masked(g: &Graph, removed: &[bool]) -> Self {
        Self::build_from(g, removed, None)
    }

    fn build_from(g: &Graph, removed: &[bool], only: Option<Vertex>) -> Self {
        let n = g.n();
        let mut root = vec![NIL; n];
        let mut parent = vec![NIL; n];
        let mut depth = vec![NIL; n];
        let mut bfs = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        let starts: Vec<Vertex> = match only {
            Some(s) => vec![s],
            None => (0..n as Vertex).collect(),
        };
        for s in starts {
            if removed[s as usize] || root[s as usize] != NIL {
                continue;
            }
            root[s as usize] = s;
            depth[s as usize] = 0;
            queue.push_back(s);
            while let Some(x) = queue.pop_front() {
                bfs.push(x);
                for &y in g.neighbors(x) {
                    if !removed[y as usize] && root[y as usize] == NIL {
                        root[y as usize] = s;
                        parent[y as usize] = x;
                        depth[y as usize] = depth[x as usize] + 1;
                        queue.push_back(y);
                    }
                }
            }
        }

        // Children come out of the BFS in ascending order per parent.
        let mut children_start = vec![0u32; n + 1];
        for &v in &bfs {
            if parent[v as usize] != NIL {
                children_start[parent[v as usize] as usize + 1] += 1;
            }
        }
        for i in 0..n {
            children_start[i + 1] += children_start[i];
        }
        let mut fill = children_start.clone();
        let mut children = vec![0; children_start[n] as usize];
        for &v in &bfs {
            let p = parent[v as usize];
            if p != NIL {
                children[fill[p as usize] as usize] = v;
                fill[p as usize] += 1;
            }
        }
        for v in 0..n {
            children[children_start[v] as usize..children_start[v + 1] as usize].sort_unstable();
        }

        let mut size = vec![0u32; n];
        for &v in bfs.iter().rev() {
            size[v as usize] += 1;
            let p = parent[v as usize];
            if p != NIL {
                size[p as usize] += size[v as usize];
            }
        }
        let mut heavy = vec![NIL; n];
        for &v in &bfs {
            let kids = &children[children_start[v as usize] as usize..children_start[v as usize + 1] as usize];
            let mut best = NIL;
            for &c in kids {
                if best == NIL || size[c as usize] > size[best as usize] {
                    best = c;
                }
            }
            heavy[v as usize] = best;
        }

        let mut nl = vec![NIL; n];
        let mut path = vec![NIL; n];
        for &v in &bfs {
            let p = parent[v as usize];
            if p == NIL {
                nl[v as usize] = 0;
                path[v as usize] = v;
            } else if heavy[p as usize] == v {
                nl[v as usize] = nl[p as usize];
                path[v as usize] = path[p as usize];
            } else {
                nl[v as usize] = nl[p as usize] + 1;
                path[v as usize] = v;
            }
        }
        let mut path_leaf = vec![NIL; n];
        for &v in &bfs {
            if path[v as usize] == v {
                let mut x = v;
                while heavy[x as usize] != NIL {
                    x = heavy[x as usize];
                }
                path_leaf[v as usize] = x;
            }
        }

        // DFS intervals, heavy child first then ascending IDs.
        let mut visit = children.clone();
        for v in 0..n {
            let kids = &mut visit[children_start[v] as usize..children_start[v + 1] as usize];
            if let Some(i) = kids.iter().position(|&c| c == heavy[v]) {
                kids[..=i].rotate_right(1);
            }
        }
        let mut tin = vec![NIL; n];
        let mut tout = vec![NIL; n];
        let mut preorder = Vec::with_capacity(bfs.len());
        let mut stack: Vec<(Vertex, u32)> = Vec::new();
        for &r in &bfs {
            if parent[r as usize] != NIL {
                continue;
            }
            tin[r as usize] = preorder.len() as u32;
            preorder.push(r);
            stack.push((r, children_start[r as usize]));
            while let Some(top) = stack.last_mut() {
                let (x, i) = *top;
                if i < children_start[x as usize + 1] {
                    top.1 += 1;
                    let c = visit[i as usize];
                    tin[c as usize] = preorder.len() as u32;
                    preorder.push(c);
                    stack.push((c, children_start[c as usize]));
                } else {
                    stack.pop();
                    tout[x as usize] = preorder.len() as u32;
                }
            }
        }

        Hld {
            root,
            parent,
            depth,
            size,
            heavy,
            tin,
            tout,
            nl,
            path,
            path_leaf,
            preorder,
            children_start,
            children,
        }
    }

    pub fn n(&self) -> usize {
        self.root.len()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.root[v as usize] != NIL
    }

    pub fn parent_of(&self, v: Vertex) -> Option<Vertex> {
        opt(self.parent[v as usize])
    }

    pub fn heavy_of(&self, v: Vertex) -> Option<Vertex> {
        opt(self.heavy[v as usize])
    }

    pub fn children(&self, v: Vertex) -> &[Vertex] {
        &self.children[self.children_start[v as usize] as usize..self.children_start[v as usize + 1] as usize]
    }

    /// Non-root vertex that is not its parent's heavy child.
    pub fn is_light(&self, v: Vertex) -> bool {
        let p = self.parent[v as usize];
        p != NIL && self.heavy[p as usize] != v
    }

    /// Non-strict ancestry within one tree.
    pub fn is_ancestor(&self, a: Vertex, b: Vertex) -> bool {
        let (a, b) = (a as usize, b as usize);
        self.root[a] != NIL && self.root[a] == self.root[b] && self.tin[a] <= self.tin[b] && self.tin[b] < self.tout[a]
    }

    pub fn is_strict_ancestor(&self, a: Vertex, b: Vertex) -> bool {
        a != b && self.is_ancestor(a, b)
    }

    /// Vertices of the subtree `T_v`, in DFS order.
    pub fn subtree(&self, v: Vertex) -> &[Vertex] {
        &self.preorder[self.tin[v as usize] as usize..self.tout[v as usize] as usize]
    }

    /// `T[a, b]` for an ancestor `a` of `b`, listed from `a` down to `b`.
    pub fn path_down(&self, a: Vertex, b: Vertex) -> Vec<Vertex> {
        debug_assert!(self.is_ancestor(a, b));
        let mut out = vec![b];
        let mut x = b;
        while x != a {
            x = self.parent[x as usize];
            out.push(x);
        }
        out.reverse();
        out
    }

    /// `T[root, v]`, from the root down.
    pub fn root_path(&self, v: Vertex) -> Vec<Vertex> {
        self.path_down(self.root[v as usize], v)
    }

    pub fn extended_id(&self, v: Vertex) -> ExtendedId {
        let u = v as usize;
        debug_assert!(self.contains(v));
        let h = self.heavy[u];
        ExtendedId {
            id: v,
            root: self.root[u],
            anc: self.anc(v),
            heavy: opt(h).map(|h| (h, self.anc(h))),
            nl: self.nl[u],
            path: self.path[u],
        }
    }

    pub fn pos(&self, v: Vertex) -> Pos {
        Pos { id: v, anc: self.anc(v) }
    }

    pub fn anc(&self, v: Vertex) -> Anc {
        Anc { tin: self.tin[v as usize], tout: self.tout[v as usize] }
    }

    /// `I(a)`: light vertices on `T[root, a]` plus `h(a)`, top to bottom.
    pub fn interesting(&self, a: Vertex) -> Vec<Vertex> {
        let mut out = Vec::new();
        let mut x = a;
        while self.parent[x as usize] != NIL {
            if self.is_light(x) {
                out.push(x);
            }
            x = self.parent[x as usize];
        }
        out.reverse();
        if let Some(h) = self.heavy_of(a) {
            out.push(h);
        }
        out
    }

    /// `I↑(a)`: parents of the members of `I(a)` together with `a`, top to bottom.
    pub fn upper_interesting(&self, a: Vertex) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = self
            .interesting(a)
            .into_iter()
            .map(|b| self.parent[b as usize])
            .filter(|&p| p != a)
            .collect();
        out.push(a);
        out
    }

    /// Child of `a` whose subtree contains `b`.
    pub fn child_on_path(&self, a: Vertex, b: Vertex) -> Result<Vertex, TreeError> {
        if !self.is_strict_ancestor(a, b) {
            return Err(TreeError::NotAncestor { a, b });
        }
        let h = self.heavy[a as usize];
        if h != NIL && self.is_ancestor(h, b) {
            return Ok(h);
        }
        let mut x = b;
        while self.parent[x as usize] != a {
            // Jump to the top of the heavy path, then one light edge up.
            let top = self.path[x as usize];
            x = if top == x || !self.is_strict_ancestor(a, top) { self.parent[x as usize] } else { top };
        }
        Ok(x)
    }

    pub fn lca(&self, a: Vertex, b: Vertex) -> Result<Vertex, TreeError> {
        if !self.contains(a) || self.root[a as usize] != self.root[b as usize] {
            return Err(TreeError::DifferentComponents(a, b));
        }
        let (mut a, mut b) = (a, b);
        while self.path[a as usize] != self.path[b as usize] {
            let (ta, tb) = (self.path[a as usize], self.path[b as usize]);
            if self.depth[ta as usize] > self.depth[tb as usize] {
                a = self.parent[ta as usize];
            } else {
                b = self.parent[tb as usize];
            }
        }
        Ok(if self.depth[a as usize] < self.depth[b as usize] { a } else { b })
    }

    /// Tops of the heavy paths meeting `T[root, v]`, bottom-up.
    pub fn paths_above(&self, v: Vertex) -> Vec<Vertex> {
        let mut out = Vec::new();
        let mut x = v;
        loop {
            let top = self.path[x as usize];
            out.push(top);
            match self.parent_of(top) {
                Some(p) => x = p,
                None => return out,
            }
        }
    }

    /// LCA of a nonempty set.
    pub fn lca_all(&self, set: &[Vertex]) -> Option<Vertex> {
        let mut it = set.iter().copied();
        let first = it.next()?;
        Some(it.fold(first, |acc, v| self.lca(acc, v).expect("set within one tree")))
    }
}

pub(crate) fn opt(x: u32) -> Option<u32> {
    (x != NIL).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn floor_log2(n: usize) -> u32 {
        usize::BITS - 1 - n.leading_zeros()
    }

    #[test]
    fn path_is_one_heavy_path() {
        let h = Hld::build(&gen::path(5));
        for v in 0..4 {
            assert_eq!(h.heavy_of(v), Some(v + 1));
        }
        assert_eq!(h.nl[4], 0);
        assert!(h.interesting(4).is_empty());
        assert_eq!(h.upper_interesting(4), vec![4]);
        assert_eq!(h.interesting(3), vec![4]);
        assert_eq!(h.child_on_path(0, 3).unwrap(), 1);
        assert_eq!(h.child_on_path(2, 3).unwrap(), 3);
        assert!(h.child_on_path(3, 3).is_err());
    }

    #[test]
    fn star_tie_break() {
        let h = Hld::build(&gen::star(5));
        assert_eq!(h.heavy_of(0), Some(1));
        assert!((2..5).all(|v| h.is_light(v)));
        assert!(!h.is_light(0) && !h.is_light(1));
        assert_eq!(h.interesting(0), vec![1]);
        assert_eq!(h.nl[0], 0);
        assert_eq!(h.lca(2, 3).unwrap(), 0);
        assert_eq!(h.lca(0, 3).unwrap(), 0);
    }

    #[test]
    fn disconnected_forest_roots() {
        let g = Graph::from_edges(6, [(1, 4), (4, 5), (2, 3)]).unwrap();
        let h = Hld::build(&g);
        assert_eq!(h.root, vec![0, 1, 2, 2, 1, 1]);
        assert!(h.lca(0, 1).is_err());
        let e = h.extended_id(5);
        assert_eq!(ancestry(&h.extended_id(1), &e), Ancestry::AncestorHeavy);
        assert_eq!(ancestry(&h.extended_id(2), &e), Ancestry::Unrelated);
        let r = Hld::build_rooted(&g, 4).unwrap();
        assert!(!r.contains(2) && r.contains(1));
        assert_eq!(r.parent_of(1), Some(4));
    }

    #[test]
    fn invariants_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..60 {
            let n = 5 + trial * 3;
            let g = gen::gnp(n, [0.05, 0.1, 0.3][trial % 3], &mut rng);
            let h = Hld::build(&g);
            let lg = floor_log2(n);
            for v in 0..n as Vertex {
                // Light edges on every root path.
                assert!(h.nl[v as usize] <= lg);
                let rp = h.root_path(v);
                assert_eq!(h.nl[v as usize] as usize, rp.iter().filter(|&&x| h.is_light(x)).count());
                let i = h.interesting(v);
                assert!(i.len() <= lg as usize + 1);
                let up = h.upper_interesting(v);
                let mut expect: Vec<Vertex> = rp[..rp.len() - 1]
                    .iter()
                    .copied()
                    .filter(|&a| !h.is_ancestor(h.heavy[a as usize], v))
                    .collect();
                expect.push(v);
                assert_eq!(up, expect);
                let ev = h.extended_id(v);
                for w in 0..n as Vertex {
                    let ew = h.extended_id(w);
                    let walk = {
                        let mut x = w;
                        let mut found = x == v;
                        while let Some(p) = h.parent_of(x) {
                            x = p;
                            found |= x == v;
                        }
                        found
                    };
                    assert_eq!(h.is_ancestor(v, w), walk);
                    assert_eq!(ev.is_ancestor_of(&ew), walk);
                    let rel = ancestry(&ev, &ew);
                    match rel {
                        Ancestry::Equal => assert_eq!(v, w),
                        Ancestry::AncestorHeavy | Ancestry::AncestorLight => {
                            assert!(walk && v != w);
                            let c = h.child_on_path(v, w).unwrap();
                            assert_eq!(h.parent_of(c), Some(v));
                            assert!(h.is_ancestor(c, w));
                            assert_eq!(rel == Ancestry::AncestorHeavy, h.heavy_of(v) == Some(c));
                            assert!(h.interesting(v).contains(&c) || h.interesting(w).contains(&c));
                            assert_eq!(ev.in_upper_set_of(&ew), h.upper_interesting(w).contains(&v));
                        }
                        Ancestry::Descendant => assert!(h.is_strict_ancestor(w, v)),
                        Ancestry::Unrelated => assert!(!walk && !h.is_ancestor(w, v)),
                    }
                    if h.root[v as usize] == h.root[w as usize] {
                        let l = h.lca(v, w).unwrap();
                        let (mut a, mut b) = (v, w);
                        while h.depth[a as usize] > h.depth[b as usize] {
                            a = h.parent[a as usize];
                        }
                        while h.depth[b as usize] > h.depth[a as usize] {
                            b = h.parent[b as usize];
                        }
                        while a != b {
                            a = h.parent[a as usize];
                            b = h.parent[b as usize];
                        }
                        assert_eq!(l, a);
                    }
                }
            }
            // Heavy paths partition the vertex set.
            let mut covered = vec![0u32; n];
            for top in 0..n as Vertex {
                if h.path_leaf[top as usize] != NIL {
                    let leaf = h.path_leaf[top as usize];
                    for x in h.path_down(top, leaf) {
                        covered[x as usize] += 1;
                        assert_eq!(h.path[x as usize], top);
                    }
                }
            }
            assert!(covered.iter().all(|&c| c == 1));
        }
    }
}
