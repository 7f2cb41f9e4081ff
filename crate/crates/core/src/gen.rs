//! Small generators for test spaces. Unit-edge generators use every vertex
//! as a lattice point and vertex 0 as basepoint.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::length::{self, Length};
use crate::metric::{Space, Vertex};

fn unit_graph(name: &str, ids: Vec<String>, edges: &[(usize, usize)]) -> Space {
    let edges = edges
        .iter()
        .map(|&(u, v)| (Vertex::from(u), Vertex::from(v), length::int(1)))
        .collect();
    let lattice = (0..ids.len()).map(Vertex::from).collect();
    Space::from_parts(name, ids, edges, lattice, Vertex(0)).expect("generated graph is valid")
}

/// Path `0 - 1 - ... - (n-1)`.
pub fn path(n: usize) -> Space {
    let ids = (0..n).map(|i| format!("v{i}")).collect();
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    unit_graph("path", ids, &edges)
}

/// Cycle on `n >= 3` vertices.
pub fn cycle(n: usize) -> Space {
    let ids = (0..n).map(|i| format!("v{i}")).collect();
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    unit_graph("cycle", ids, &edges)
}

/// Hub `h` with three legs `a1..aL`, `b1..bL`, `c1..cL`.
pub fn tripod(leg: usize) -> Space {
    let mut ids = vec!["h".to_string()];
    let mut edges = Vec::new();
    for name in ["a", "b", "c"] {
        for i in 1..=leg {
            ids.push(format!("{name}{i}"));
            let here = ids.len() - 1;
            edges.push((if i == 1 { 0 } else { here - 1 }, here));
        }
    }
    unit_graph("tripod", ids, &edges)
}

/// `w x h` grid with vertices `r{row}c{col}`.
pub fn grid(w: usize, h: usize) -> Space {
    let mut ids = Vec::new();
    let mut edges = Vec::new();
    for r in 0..h {
        for c in 0..w {
            ids.push(format!("r{r}c{c}"));
            let i = r * w + c;
            if c > 0 {
                edges.push((i - 1, i));
            }
            if r > 0 {
                edges.push((i - w, i));
            }
        }
    }
    unit_graph("grid", ids, &edges)
}

/// Uniform random recursive tree on `n` vertices.
pub fn random_tree(n: usize, seed: u64) -> Space {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids = (0..n).map(|i| format!("t{i}")).collect();
    let edges: Vec<_> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    unit_graph("tree", ids, &edges)
}

/// `k` distinct random points of `{0..=side}^2` under the l1 metric.
pub fn random_lattice(k: usize, side: i64, seed: u64) -> Result<Space> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts: Vec<(i64, i64)> = Vec::with_capacity(k);
    while pts.len() < k {
        let p = (rng.gen_range(0..=side), rng.gen_range(0..=side));
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    let d: Vec<Vec<Length>> = pts
        .iter()
        .map(|a| {
            pts.iter()
                .map(|b| length::int((a.0 - b.0).abs() + (a.1 - b.1).abs()))
                .collect()
        })
        .collect();
    let ids = pts.iter().map(|(x, y)| format!("p{x}_{y}")).collect();
    Space::from_metric("lattice", ids, &d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        assert_eq!(tripod(3).len(), 10);
        assert_eq!(grid(3, 2).edge_count(), 7);
        assert_eq!(cycle(4).eccentricity(Vertex(0)), length::int(2));
        let t = random_tree(30, 1);
        assert_eq!(t.edge_count(), 29);
    }

    #[test]
    fn random_lattice_is_an_l1_metric() {
        let s = random_lattice(12, 16, 7).unwrap();
        assert_eq!(s.len(), 12);
        assert_eq!(s.lattice().len(), 12);
        for u in s.vertices() {
            for v in s.vertices() {
                let [a, b] = [u, v].map(|w| {
                    let id = &s.id(w)[1..];
                    let (x, y) = id.split_once('_').unwrap();
                    (x.parse::<i64>().unwrap(), y.parse::<i64>().unwrap())
                });
                let l1 = (a.0 - b.0).abs() + (a.1 - b.1).abs();
                assert_eq!(s.dist_ticks(u, v), l1 as u64);
            }
        }
    }
}
