//! Graph families used by tests, benchmarks and the CLI.

use rand::Rng;

use crate::graph::{Graph, Vertex};

fn build(n: usize, edges: Vec<(Vertex, Vertex)>) -> Graph {
    Graph::from_edges(n, edges).expect("generator emits a simple graph")
}

/// Erdős–Rényi `G(n, p)`.
pub fn gnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut e = Vec::new();
    for u in 0..n as Vertex {
        for v in u + 1..n as Vertex {
            if rng.gen_bool(p) {
                e.push((u, v));
            }
        }
    }
    build(n, e)
}

/// `G(n, p)` sampled by geometric skipping, for large sparse instances.
pub fn gnp_sparse<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    if p >= 0.5 {
        return gnp(n, p, rng);
    }
    let mut e = Vec::new();
    let lq = (1.0 - p).ln();
    let (mut v, mut w) = (1i64, -1i64);
    let n = n as i64;
    while v < n {
        let r: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        w += 1 + (r.ln() / lq).floor() as i64;
        while w >= v && v < n {
            w -= v;
            v += 1;
        }
        if v < n {
            e.push((w as Vertex, v as Vertex));
        }
    }
    build(n as usize, e)
}

pub fn path(n: usize) -> Graph {
    build(n, (1..n as Vertex).map(|v| (v - 1, v)).collect())
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3);
    let mut e: Vec<_> = (1..n as Vertex).map(|v| (v - 1, v)).collect();
    e.push((0, n as Vertex - 1));
    build(n, e)
}

/// `rows × cols` grid, row-major IDs.
pub fn grid(rows: usize, cols: usize) -> Graph {
    let id = |r: usize, c: usize| (r * cols + c) as Vertex;
    let mut e = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                e.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                e.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    build(rows * cols, e)
}

/// Star with center 0.
pub fn star(n: usize) -> Graph {
    build(n, (1..n as Vertex).map(|v| (0, v)).collect())
}

/// Hub 0 joined to a cycle on `1..n`.
pub fn wheel(n: usize) -> Graph {
    assert!(n >= 4);
    let mut e: Vec<_> = (1..n as Vertex).map(|v| (0, v)).collect();
    for v in 2..n as Vertex {
        e.push((v - 1, v));
    }
    e.push((1, n as Vertex - 1));
    build(n, e)
}

pub fn complete(n: usize) -> Graph {
    let mut e = Vec::new();
    for u in 0..n as Vertex {
        for v in u + 1..n as Vertex {
            e.push((u, v));
        }
    }
    build(n, e)
}

/// Two poles 0 and 1 joined by internally disjoint paths with the given
/// numbers of internal vertices.
pub fn theta(lengths: &[usize]) -> Graph {
    let n = 2 + lengths.iter().sum::<usize>();
    let mut e = Vec::new();
    let mut next = 2 as Vertex;
    for &len in lengths {
        let mut prev = 0;
        for _ in 0..len {
            e.push((prev, next));
            prev = next;
            next += 1;
        }
        if prev == 0 {
            e.push((0, 1));
        } else {
            e.push((prev, 1));
        }
    }
    build(n, e)
}

/// Randomly relabels vertices, keeping the structure.
pub fn shuffle<R: Rng>(g: &Graph, rng: &mut R) -> Graph {
    use rand::seq::SliceRandom;
    let mut perm: Vec<Vertex> = (0..g.n() as Vertex).collect();
    perm.shuffle(rng);
    build(g.n(), g.edges().map(|(u, v)| (perm[u as usize], perm[v as usize])).collect())
}

/// `G(n, 2 ln n / n)`, the sparse regime of the size experiments.
pub fn sparse_random<R: Rng>(n: usize, rng: &mut R) -> Graph {
    gnp_sparse(n, (2.0 * (n as f64).ln() / n as f64).min(1.0), rng)
}

/// Adds edges so that each `(hub, d)` has degree at least `d`, choosing new
/// neighbours uniformly.
pub fn with_hubs<R: Rng>(g: &Graph, hubs: &[(Vertex, usize)], rng: &mut R) -> Graph {
    let n = g.n();
    let mut e: std::collections::HashSet<(Vertex, Vertex)> = g.edges().collect();
    for &(h, d) in hubs {
        let d = d.min(n - 1);
        let mut deg = g.degree(h) + e.iter().filter(|&&(a, b)| (a == h || b == h) && !g.has_edge(a, b)).count();
        while deg < d {
            let w = rng.gen_range(0..n as Vertex);
            if w != h && e.insert((h.min(w), h.max(w))) {
                deg += 1;
            }
        }
    }
    let mut e: Vec<_> = e.into_iter().collect();
    e.sort_unstable();
    build(n, e)
}

/// A family by name: `gnp` (sparse random), `cycle`, `grid`, `wheel`, `path`, `star`.
pub fn family<R: Rng>(name: &str, n: usize, rng: &mut R) -> Option<Graph> {
    Some(match name {
        "gnp" => sparse_random(n, rng),
        "cycle" => cycle(n.max(3)),
        "grid" => {
            let r = (n as f64).sqrt().floor().max(1.0) as usize;
            grid(r, n / r)
        }
        "wheel" => wheel(n.max(4)),
        "path" => path(n),
        "star" => star(n),
        _ => return None,
    })
}

/// Named structured families at size roughly `n`, for exhaustive suites.
pub fn structured(n: usize) -> Vec<(String, Graph)> {
    let mut out = vec![
        (format!("path{n}"), path(n)),
        (format!("cycle{n}"), cycle(n.max(3))),
        (format!("star{n}"), star(n)),
        (format!("wheel{n}"), wheel(n.max(4))),
    ];
    let r = (n as f64).sqrt().floor().max(2.0) as usize;
    out.push((format!("grid{r}x{}", n / r), grid(r, n / r)));
    let k = (n - 2) / 3;
    out.push((format!("theta{n}"), theta(&[k, k, n - 2 - 2 * k])));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn shapes() {
        assert_eq!(path(5).m(), 4);
        assert_eq!(cycle(5).m(), 5);
        assert_eq!(grid(3, 4).m(), 17);
        assert_eq!(wheel(6).m(), 10);
        assert_eq!(theta(&[1, 2, 0]).m(), 6);
        assert_eq!(complete(5).m(), 10);
    }

    #[test]
    fn hubs_reach_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = with_hubs(&cycle(50), &[(0, 20), (1, 35)], &mut rng);
        assert!(g.degree(0) >= 20 && g.degree(1) >= 35);
        assert!(g.degree(0) <= 21);
        assert!(family("grid", 20, &mut rng).unwrap().n() == 20);
        assert!(family("nope", 20, &mut rng).is_none());
    }

    #[test]
    fn sparse_sampler_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = gnp_sparse(2000, 0.004, &mut rng);
        let expect = 0.004 * 2000.0 * 1999.0 / 2.0;
        assert!((g.m() as f64 - expect).abs() < 0.1 * expect);
    }
}
