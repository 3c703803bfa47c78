//! Shared per-instance machinery: identity hashes, decode errors, the
//! tree-plus-cut substrate every scheme is built on, and the parallel map.

use sha2::{Digest, Sha256};

use crate::bits::FormatError;
use crate::graph::{CutOracle, Graph, Vertex};
use crate::tree::Hld;

/// Identity of a labeled instance: hash of the (masked) edge set and roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct InstanceId(pub u64);

impl InstanceId {
    pub fn of(g: &Graph, removed: &[bool], h: &Hld, tag: &str) -> Self {
        let mut d = Sha256::new();
        d.update(tag.as_bytes());
        d.update((g.n() as u64).to_le_bytes());
        for (u, v) in g.edges() {
            if !removed[u as usize] && !removed[v as usize] {
                d.update(u.to_le_bytes());
                d.update(v.to_le_bytes());
            }
        }
        for v in 0..g.n() as Vertex {
            if h.contains(v) && h.parent_of(v).is_none() {
                d.update(v.to_le_bytes());
            }
        }
        let out = d.finalize();
        InstanceId(u64::from_le_bytes(out[..8].try_into().unwrap()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("labels come from different instances")]
    InstanceMismatch,
    #[error("label data inconsistent with the query: {0}")]
    Inconsistent(&'static str),
    #[error("too many faults: {got} > {budget}")]
    Budget { got: usize, budget: usize },
    #[error(transparent)]
    Format(#[from] FormatError),
}

/// Spanning forest and single-fault oracle of `G ∖ removed`.
pub struct Substrate<'g> {
    pub g: &'g Graph,
    pub removed: Vec<bool>,
    pub hld: Hld,
    pub cut: CutOracle,
}

impl<'g> Substrate<'g> {
    pub fn new(g: &'g Graph, removed: Vec<bool>) -> Self {
        let hld = Hld::build_masked(g, &removed);
        let cut = CutOracle::new(g, &removed);
        Substrate { g, removed, hld, cut }
    }

    pub fn full(g: &'g Graph) -> Self {
        Self::new(g, vec![false; g.n()])
    }

    pub fn without(g: &'g Graph, v: Vertex) -> Self {
        let mut removed = vec![false; g.n()];
        removed[v as usize] = true;
        Self::new(g, removed)
    }

    pub fn n(&self) -> usize {
        self.g.n()
    }

    pub fn present(&self, v: Vertex) -> bool {
        !self.removed[v as usize]
    }

    pub fn root(&self, v: Vertex) -> Vertex {
        self.hld.root[v as usize]
    }

    /// `conn(s, w, G' ∖ {c})` with `s` the root of `w`'s tree.
    pub fn source_conn(&self, w: Vertex, c: Vertex) -> bool {
        let s = self.root(w);
        s != c && self.cut.connected(s, w, c)
    }

    pub fn instance(&self, tag: &str) -> InstanceId {
        InstanceId::of(self.g, &self.removed, &self.hld, tag)
    }
}

thread_local! {
    static SEQUENTIAL: std::cell::Cell<bool> = const { std::cell::Cell::new(false) };
}

/// Runs `f` with every `par_map` on this thread done sequentially.
pub fn sequential<R>(f: impl FnOnce() -> R) -> R {
    let old = SEQUENTIAL.with(|s| s.replace(true));
    let out = f();
    SEQUENTIAL.with(|s| s.set(old));
    out
}

/// Maps `f` over `items`, in parallel when the `parallel` feature is on and
/// the caller is not inside [`sequential`].
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if !SEQUENTIAL.with(|s| s.get()) {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// `par_map` over `0..n` as vertices.
pub fn par_vertices<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(Vertex) -> U + Sync + Send,
{
    let vs: Vec<Vertex> = (0..n as Vertex).collect();
    par_map(&vs, |&v| f(v))
}
