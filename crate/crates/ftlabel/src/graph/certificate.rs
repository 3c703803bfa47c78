use std::collections::VecDeque;

use super::{Graph, Vertex};

/// Union of `k` scan-first search forests, each taken on what remains of the
/// graph after removing the previous forests. The result has at most
/// `k·(n−1)` edges and preserves `u`–`v` connectivity under every vertex
/// fault set of size below `k`.
pub fn sparse_certificate(g: &Graph, k: usize) -> Graph {
    assert!(k >= 1, "certificate parameter must be positive");
    let n = g.n();
    let mut remaining: Vec<Vec<Vertex>> = (0..n as Vertex).map(|v| g.neighbors(v).to_vec()).collect();
    let mut kept = Vec::new();
    for _ in 0..k {
        let forest = scan_first_forest(&remaining);
        if forest.is_empty() {
            break;
        }
        for &(u, v) in &forest {
            remove_sorted(&mut remaining[u as usize], v);
            remove_sorted(&mut remaining[v as usize], u);
        }
        kept.extend(forest);
    }
    kept.sort_unstable();
    g.edge_subgraph(kept)
}

fn remove_sorted(list: &mut Vec<Vertex>, v: Vertex) {
    if let Ok(i) = list.binary_search(&v) {
        list.remove(i);
    }
}

/// BFS forest: roots by ascending ID, neighbors scanned in ascending order.
fn scan_first_forest(adj: &[Vec<Vertex>]) -> Vec<(Vertex, Vertex)> {
    let n = adj.len();
    let mut marked = vec![false; n];
    let mut forest = Vec::new();
    let mut queue = VecDeque::new();
    for root in 0..n {
        if marked[root] {
            continue;
        }
        marked[root] = true;
        queue.push_back(root as Vertex);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x as usize] {
                if !marked[y as usize] {
                    marked[y as usize] = true;
                    forest.push((x.min(y), x.max(y)));
                    queue.push_back(y);
                }
            }
        }
    }
    forest
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::oracle_connected;

    fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for u in 0..n as Vertex {
            for v in u + 1..n as Vertex {
                e.push((u, v));
            }
        }
        Graph::from_edges(n, e).unwrap()
    }

    fn all_subsets(n: usize, max: usize) -> Vec<Vec<Vertex>> {
        let mut out = vec![vec![]];
        for mask in 1u32..(1 << n) {
            if (mask.count_ones() as usize) <= max {
                out.push((0..n as Vertex).filter(|&v| mask >> v & 1 == 1).collect());
            }
        }
        out
    }

    fn equivalent(g: &Graph, h: &Graph, max_faults: usize) -> bool {
        let n = g.n();
        all_subsets(n, max_faults).iter().all(|f| {
            (0..n as Vertex).all(|u| {
                (u..n as Vertex).all(|v| oracle_connected(g, u, v, f).unwrap() == oracle_connected(h, u, v, f).unwrap())
            })
        })
    }

    #[test]
    fn k1_is_spanning_forest() {
        let g = complete(7);
        let c = sparse_certificate(&g, 1);
        assert_eq!(c.m(), 6);
        assert!(equivalent(&g, &c, 0));
    }

    #[test]
    fn k6_k3_preserves_dual_faults() {
        let g = complete(6);
        let c = sparse_certificate(&g, 3);
        assert!(c.m() <= 18);
        assert!(equivalent(&g, &c, 2));
    }

    #[test]
    fn c5_k2_keeps_cycle() {
        let g = Graph::parse("5 5\n0 1\n1 2\n2 3\n3 4\n4 0").unwrap();
        let c = sparse_certificate(&g, 2);
        assert_eq!(c, g);
        assert!(equivalent(&g, &c, 1));
    }

    #[test]
    fn k_faults_can_break_a_k_certificate() {
        // Three faults on K5 leave two vertices whose edge the 3-certificate drops.
        let g = complete(5);
        let c = sparse_certificate(&g, 3);
        assert!(!equivalent(&g, &c, 3));
        assert!(equivalent(&g, &sparse_certificate(&g, 4), 3));
    }
}
