use super::{Graph, Vertex};

const NONE: u32 = u32::MAX;

/// Constant-time single-fault component queries on `G ∖ removed`.
///
/// Built from one DFS with low-points: removing `c` splits off exactly the
/// DFS child subtrees of `c` whose low-point does not climb above `c`; every
/// other surviving vertex of the component stays together.
#[derive(Debug, Clone)]
pub struct CutOracle {
    removed: Vec<bool>,
    tin: Vec<u32>,
    tout: Vec<u32>,
    low: Vec<u32>,
    submax: Vec<u32>,
    /// `[start, end)` positions of each vertex's component in DFS order.
    span: Vec<(u32, u32)>,
    prefix_max: Vec<u32>,
    suffix_max: Vec<u32>,
    /// Max over non-separated DFS children subtrees.
    attached_max: Vec<u32>,
    child_start: Vec<u32>,
    children: Vec<Vertex>,
    is_root: Vec<bool>,
}

impl CutOracle {
    pub fn new(g: &Graph, removed: &[bool]) -> Self {
        let n = g.n();
        let mut tin = vec![NONE; n];
        let mut tout = vec![NONE; n];
        let mut low = vec![NONE; n];
        let mut parent = vec![NONE; n];
        let mut order = Vec::with_capacity(n);
        let mut span = vec![(NONE, NONE); n];
        let mut is_root = vec![false; n];
        let mut stack: Vec<(Vertex, usize)> = Vec::new();
        for root in 0..n {
            if removed[root] || tin[root] != NONE {
                continue;
            }
            let start = order.len() as u32;
            is_root[root] = true;
            tin[root] = start;
            low[root] = start;
            order.push(root as Vertex);
            stack.push((root as Vertex, 0));
            while let Some(&mut (x, ref mut next)) = stack.last_mut() {
                let nb = g.neighbors(x);
                if *next < nb.len() {
                    let y = nb[*next];
                    *next += 1;
                    if removed[y as usize] {
                        continue;
                    }
                    if tin[y as usize] == NONE {
                        parent[y as usize] = x;
                        tin[y as usize] = order.len() as u32;
                        low[y as usize] = tin[y as usize];
                        order.push(y);
                        stack.push((y, 0));
                    } else if y != parent[x as usize] {
                        low[x as usize] = low[x as usize].min(tin[y as usize]);
                    }
                } else {
                    stack.pop();
                    tout[x as usize] = order.len() as u32;
                    let p = parent[x as usize];
                    if p != NONE {
                        low[p as usize] = low[p as usize].min(low[x as usize]);
                    }
                }
            }
            let end = order.len() as u32;
            for &v in &order[start as usize..] {
                span[v as usize] = (start, end);
            }
        }

        let mut submax: Vec<u32> = (0..n as u32).collect();
        for &v in order.iter().rev() {
            let p = parent[v as usize];
            if p != NONE {
                submax[p as usize] = submax[p as usize].max(submax[v as usize]);
            }
        }
        let len = order.len();
        let mut prefix_max = vec![0u32; len];
        let mut suffix_max = vec![0u32; len];
        for i in 0..len {
            let (s, _) = span[order[i] as usize];
            prefix_max[i] = if i as u32 == s { order[i] } else { prefix_max[i - 1].max(order[i]) };
        }
        for i in (0..len).rev() {
            let (_, e) = span[order[i] as usize];
            suffix_max[i] = if i as u32 + 1 == e { order[i] } else { suffix_max[i + 1].max(order[i]) };
        }

        // Children in DFS order, which is increasing tin.
        let mut child_count = vec![0u32; n + 1];
        for &v in &order {
            let p = parent[v as usize];
            if p != NONE {
                child_count[p as usize + 1] += 1;
            }
        }
        for i in 0..n {
            child_count[i + 1] += child_count[i];
        }
        let child_start = child_count.clone();
        let mut fill = child_count;
        let mut children = vec![0; child_start[n] as usize];
        for &v in &order {
            let p = parent[v as usize];
            if p != NONE {
                children[fill[p as usize] as usize] = v;
                fill[p as usize] += 1;
            }
        }
        let mut attached_max = vec![NONE; n];
        for &v in &order {
            let p = parent[v as usize];
            if p != NONE && !is_root[p as usize] && low[v as usize] < tin[p as usize] {
                let a = &mut attached_max[p as usize];
                *a = if *a == NONE { submax[v as usize] } else { (*a).max(submax[v as usize]) };
            }
        }

        CutOracle {
            removed: removed.to_vec(),
            tin,
            tout,
            low,
            submax,
            span,
            prefix_max,
            suffix_max,
            attached_max,
            child_start,
            children,
            is_root,
        }
    }

    pub fn is_present(&self, v: Vertex) -> bool {
        !self.removed[v as usize]
    }

    /// Component ID of `w` in `G ∖ removed`.
    pub fn cid0(&self, w: Vertex) -> Option<Vertex> {
        if self.removed[w as usize] {
            return None;
        }
        let (s, e) = self.span[w as usize];
        Some(self.suffix_max[s as usize].max(self.prefix_max[e as usize - 1]))
    }

    /// Component ID of `w` in `G ∖ removed ∖ {c}`.
    pub fn cid(&self, w: Vertex, c: Vertex) -> Option<Vertex> {
        if w == c || self.removed[w as usize] {
            return None;
        }
        if self.removed[c as usize] || self.span[w as usize] != self.span[c as usize] {
            return self.cid0(w);
        }
        let (cu, wu) = (c as usize, w as usize);
        let inside = self.tin[cu] <= self.tin[wu] && self.tin[wu] < self.tout[cu];
        if inside {
            let ch = self.child_toward(c, w);
            if self.is_root[cu] || self.low[ch as usize] >= self.tin[cu] {
                return Some(self.submax[ch as usize]);
            }
        }
        Some(self.rest_max(c))
    }

    pub fn connected(&self, a: Vertex, b: Vertex, c: Vertex) -> bool {
        match (self.cid(a, c), self.cid(b, c)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }

    fn child_toward(&self, c: Vertex, w: Vertex) -> Vertex {
        let kids = &self.children[self.child_start[c as usize] as usize..self.child_start[c as usize + 1] as usize];
        let t = self.tin[w as usize];
        let i = kids.partition_point(|&k| self.tin[k as usize] <= t);
        kids[i - 1]
    }

    fn rest_max(&self, c: Vertex) -> Vertex {
        let cu = c as usize;
        let (s, e) = self.span[cu];
        let mut best = self.attached_max[cu];
        let mut take = |v: u32| best = if best == NONE { v } else { best.max(v) };
        if self.tin[cu] > s {
            take(self.prefix_max[self.tin[cu] as usize - 1]);
        }
        if self.tout[cu] < e {
            take(self.suffix_max[self.tout[cu] as usize]);
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{component_ids, mask_of};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
        let mut e = Vec::new();
        for u in 0..n as Vertex {
            for v in u + 1..n as Vertex {
                if rng.gen_bool(p) {
                    e.push((u, v));
                }
            }
        }
        Graph::from_edges(n, e).unwrap()
    }

    #[test]
    fn matches_bfs_components() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..300 {
            let n = rng.gen_range(1..18);
            let g = random_graph(&mut rng, n, [0.1, 0.2, 0.35][trial % 3]);
            let base: Vec<Vertex> = (0..n as Vertex).filter(|_| rng.gen_bool(0.15)).collect();
            let mask = mask_of(n, &base);
            let oracle = CutOracle::new(&g, &mask);
            assert_eq!((0..n as Vertex).map(|w| oracle.cid0(w)).collect::<Vec<_>>(), component_ids(&g, &mask));
            for c in 0..n as Vertex {
                let mut m2 = mask.clone();
                m2[c as usize] = true;
                let expect = component_ids(&g, &m2);
                for w in 0..n as Vertex {
                    assert_eq!(oracle.cid(w, c), expect[w as usize], "n={n} c={c} w={w} {g:?}");
                }
            }
        }
    }
}
