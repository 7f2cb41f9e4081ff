//! Combinatorial and glued (metric) horoballs over a lattice.
//!
//! Vertices are pairs `(x, l)` of a lattice point and a depth. Vertical edges
//! join `(x, l)` and `(x, l + 1)`; horizontal edges join `(x, l)` and
//! `(y, l)` for `l >= 1` whenever `0 < d(x, y) <= 2^l`. All horoball edges
//! have unit length. A glued horoball additionally identifies `(x, 0)` with
//! the lattice vertex `x` of the base space and keeps the base edges.

use std::borrow::Cow;
use std::collections::VecDeque;

use crate::bicombing::Combing;
use crate::emit::{self, Attrs};
use crate::error::{Error, Result};
use crate::length::{self, Length};
use crate::metric::{Path, Space, Vertex};
use crate::par::{self, Mode};
use crate::sample::Sample;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Vertical,
    Horizontal,
    Base,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Vertical => "vertical",
            EdgeKind::Horizontal => "horizontal",
            EdgeKind::Base => "base",
        }
    }
}

const UNREACHED: u32 = u32::MAX;

/// A horoball truncated at `depth_max`, realized as a [`Space`].
#[derive(Clone, Debug)]
pub struct HoroballGraph {
    space: Space,
    glued: bool,
    depth_max: u32,
    /// Lattice point names, in lattice order.
    points: Vec<String>,
    /// `at[x][l]` is the vertex `(x, l)`.
    at: Vec<Vec<Vertex>>,
    /// Per vertex: `(lattice index, depth)`, or `None` for non-lattice base
    /// vertices of a glued horoball.
    coords: Vec<Option<(u32, u32)>>,
    /// `hops[l][x * k + y]`: horizontal edge count between `x` and `y` at
    /// depth `l`, [`UNREACHED`] if none.
    hops: Vec<Vec<u32>>,
    sufficient_depth: u32,
    /// Number of base vertices kept by a glued horoball.
    base_len: usize,
}

/// `up * across * down`: at most two vertical segments around one horizontal
/// segment. For glued horoballs `across` may instead be a base geodesic at
/// depth 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalGeodesic {
    pub up: Path,
    pub across: Path,
    pub down: Path,
    /// Depth of the `across` segment.
    pub apex: u32,
    /// `true` when `across` runs through the base space.
    pub through_base: bool,
}

impl NormalGeodesic {
    pub fn path(&self) -> Path {
        self.up.clone().concat(&self.across).concat(&self.down)
    }

    pub fn length_ticks(&self) -> u64 {
        self.up.length_ticks() + self.across.length_ticks() + self.down.length_ticks()
    }
}

fn smallest_exponent(d_ticks: u64, scale: u64) -> u32 {
    // least l >= 1 with d <= 2^l
    let mut l = 1u32;
    while d_ticks > (scale << l) {
        l += 1;
    }
    l
}

impl HoroballGraph {
    /// Builds the horoball over the lattice of `base`.
    pub fn build(base: &Space, depth_max: u32, glued: bool) -> Result<HoroballGraph> {
        if depth_max < 1 {
            return Err(Error::DepthTooSmall(depth_max));
        }
        let lattice = base.lattice().to_vec();
        let k = lattice.len();
        let scale = base.scale() as u64;
        let mut base_dist = vec![0u64; k * k];
        for (i, &x) in lattice.iter().enumerate() {
            for (j, &y) in lattice.iter().enumerate() {
                base_dist[i * k + j] = base.dist_ticks(x, y);
            }
        }
        let points: Vec<String> = lattice.iter().map(|v| base.id(*v).to_string()).collect();

        let mut ids: Vec<String> = Vec::new();
        let mut coords: Vec<Option<(u32, u32)>> = Vec::new();
        let mut at = vec![Vec::with_capacity(depth_max as usize + 1); k];
        let mut edges: Vec<(Vertex, Vertex, Length)> = Vec::new();
        let first_level = if glued {
            for v in base.vertices() {
                ids.push(base.id(v).to_string());
                coords.push(None);
            }
            for (i, &x) in lattice.iter().enumerate() {
                coords[x.ix()] = Some((i as u32, 0));
                at[i].push(x);
            }
            edges.extend(base.edges());
            1
        } else {
            0
        };
        for l in first_level..=depth_max {
            for (i, name) in points.iter().enumerate() {
                let v = Vertex::from(ids.len());
                ids.push(format!("{name}@{l}"));
                coords.push(Some((i as u32, l)));
                at[i].push(v);
            }
        }
        let one = length::int(1);
        for col in &at {
            for w in col.windows(2) {
                edges.push((w[0], w[1], one));
            }
        }
        for l in 1..=depth_max {
            let reach = scale << l;
            for i in 0..k {
                for j in i + 1..k {
                    let d = base_dist[i * k + j];
                    if d > 0 && d <= reach {
                        edges.push((at[i][l as usize], at[j][l as usize], one));
                    }
                }
            }
        }
        let horo_lattice: Vec<Vertex> = if glued {
            let mut v: Vec<Vertex> = base.lattice().to_vec();
            v.extend((base.len()..ids.len()).map(Vertex::from));
            v
        } else {
            (0..ids.len()).map(Vertex::from).collect()
        };
        let basepoint = if glued {
            base.basepoint()
        } else {
            let nearest = lattice
                .iter()
                .position(|x| *x == base.basepoint())
                .unwrap_or(0);
            at[nearest][0]
        };
        let name = format!(
            "{}-horoball-{}",
            base.name(),
            if glued { "glued" } else { "comb" }
        );
        let space = Space::from_parts(name, ids, edges, horo_lattice, basepoint)?;

        let hops = (0..=depth_max)
            .map(|l| {
                if l == 0 {
                    return vec![UNREACHED; k * k];
                }
                let reach = scale << l;
                level_hops(k, |i, j| {
                    let d = base_dist[i * k + j];
                    d > 0 && d <= reach
                })
            })
            .collect();
        let diam = base_dist.iter().copied().max().unwrap_or(0);
        let sufficient_depth = if diam == 0 {
            1
        } else {
            smallest_exponent(diam, scale) + 3
        };
        Ok(HoroballGraph {
            space,
            glued,
            depth_max,
            points,
            at,
            coords,
            hops,
            sufficient_depth,
            base_len: if glued { base.len() } else { 0 },
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn glued(&self) -> bool {
        self.glued
    }

    pub fn depth_max(&self) -> u32 {
        self.depth_max
    }

    /// `ceil(log2 diam) + 3` for the lattice diameter: depth beyond which
    /// truncation cannot shorten distances between shallow points.
    pub fn sufficient_depth(&self) -> u32 {
        self.sufficient_depth
    }

    pub fn lattice_points(&self) -> &[String] {
        &self.points
    }

    pub fn vertex_at(&self, point: usize, depth: u32) -> Vertex {
        self.at[point][depth as usize]
    }

    /// `(lattice index, depth)` of a horoball vertex.
    pub fn coords(&self, v: Vertex) -> Option<(usize, u32)> {
        self.coords
            .get(v.ix())
            .copied()
            .flatten()
            .map(|(p, l)| (p as usize, l))
    }

    pub fn depth(&self, v: Vertex) -> u32 {
        self.coords(v).map_or(0, |(_, l)| l)
    }

    /// Vertices of the deepest layer.
    pub fn top_layer(&self) -> Vec<Vertex> {
        self.at.iter().map(|col| *col.last().unwrap()).collect()
    }

    pub fn edge_kind(&self, u: Vertex, v: Vertex) -> EdgeKind {
        match (self.coords(u), self.coords(v)) {
            (Some((x, l)), Some((y, m))) if x == y && l.abs_diff(m) == 1 => EdgeKind::Vertical,
            (Some((_, l)), Some((_, m))) if l == m && l >= 1 => EdgeKind::Horizontal,
            _ => EdgeKind::Base,
        }
    }

    /// Horizontal edges at depth `l` as pairs of lattice indices.
    pub fn horizontal_pairs(&self, l: u32) -> Vec<(usize, usize)> {
        let k = self.points.len();
        let mut out = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                if self.hops[l as usize][i * k + j] == 1 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn vertical(&self, point: usize, from: u32, to: u32) -> Path {
        let scale = self.space.scale();
        let col = &self.at[point];
        let verts: Vec<Vertex> = if from <= to {
            (from..=to).map(|l| col[l as usize]).collect()
        } else {
            (to..=from).rev().map(|l| col[l as usize]).collect()
        };
        let arc = (0..verts.len() as u64).map(|i| i * scale as u64).collect();
        Path::from_parts(verts, arc, scale)
    }

    /// Lexicographically minimal shortest horizontal path at depth `l`.
    fn horizontal(&self, l: u32, from: usize, to: usize) -> Path {
        let k = self.points.len();
        let hops = &self.hops[l as usize];
        let scale = self.space.scale() as u64;
        let mut verts = vec![self.at[from][l as usize]];
        let mut cur = from;
        while cur != to {
            let here = hops[cur * k + to];
            cur = (0..k)
                .find(|&w| hops[cur * k + w] == 1 && hops[w * k + to] == here - 1)
                .expect("horizontal distances are consistent");
            verts.push(self.at[cur][l as usize]);
        }
        let arc = (0..verts.len() as u64).map(|i| i * scale).collect();
        Path::from_parts(verts, arc, self.space.scale())
    }

    /// The normal geodesic from `x` to `y`: lowest admissible apex among
    /// those of minimal length.
    pub fn normal_geodesic(&self, x: Vertex, y: Vertex) -> Result<NormalGeodesic> {
        self.space.check_vertex(x)?;
        self.space.check_vertex(y)?;
        let not_horoball = |v: Vertex| {
            Error::UnknownVertex(format!("{} is not a horoball vertex", self.space.id(v)))
        };
        let (a, la) = self.coords(x).ok_or_else(|| not_horoball(x))?;
        let (b, lb) = self.coords(y).ok_or_else(|| not_horoball(y))?;
        let scale = self.space.scale();
        if a == b {
            let v = self.vertical(a, la, lb);
            return Ok(NormalGeodesic {
                up: if la <= lb { v.clone() } else { Path::single(x, scale) },
                across: Path::single(if la <= lb { y } else { x }, scale),
                down: if la <= lb { Path::single(y, scale) } else { v },
                apex: la.max(lb),
                through_base: false,
            });
        }
        let k = self.points.len();
        let unit = scale as u64;
        let mut best: Option<(u64, u32)> = None;
        for m in la.max(lb).max(1)..=self.depth_max {
            let h = self.hops[m as usize][a * k + b];
            if h == UNREACHED {
                continue;
            }
            let len = u64::from((m - la) + (m - lb) + h) * unit;
            if best.is_none_or(|(bl, _)| len < bl) {
                best = Some((len, m));
            }
        }
        if self.glued && la == 0 && lb == 0 {
            let d = self.space.dist_ticks(x, y);
            let base_wins = best.is_none_or(|(bl, _)| d <= bl);
            // a pure base route only counts when it avoids the horoball
            let base = self.base_geodesic(x, y);
            if base_wins {
                if let Some(p) = base.filter(|p| p.length_ticks() == d) {
                    return Ok(NormalGeodesic {
                        up: Path::single(x, scale),
                        across: p,
                        down: Path::single(y, scale),
                        apex: 0,
                        through_base: true,
                    });
                }
            }
        }
        let (_, m) = best.ok_or_else(|| {
            Error::BadParams(format!(
                "no horizontal route between {} and {} below depth {}",
                self.points[a], self.points[b], self.depth_max
            ))
        })?;
        Ok(NormalGeodesic {
            up: self.vertical(a, la, m),
            across: self.horizontal(m, a, b),
            down: self.vertical(b, m, lb),
            apex: m,
            through_base: false,
        })
    }

    /// Lexicographic geodesic in the base layer only.
    fn base_geodesic(&self, x: Vertex, y: Vertex) -> Option<Path> {
        // Dijkstra restricted to base vertices, then lexicographic walk.
        let n = self.base_len;
        let mut dist = vec![u64::MAX; n];
        let mut heap = std::collections::BinaryHeap::new();
        dist[y.ix()] = 0;
        heap.push(std::cmp::Reverse((0u64, y.0)));
        while let Some(std::cmp::Reverse((d, u))) = heap.pop() {
            if d > dist[u as usize] {
                continue;
            }
            for &(w, t) in self.space.neighbors(Vertex(u)) {
                if w.ix() >= n {
                    continue;
                }
                let nd = d + u64::from(t);
                if nd < dist[w.ix()] {
                    dist[w.ix()] = nd;
                    heap.push(std::cmp::Reverse((nd, w.0)));
                }
            }
        }
        if dist[x.ix()] == u64::MAX {
            return None;
        }
        let mut verts = vec![x];
        let mut arc = vec![0u64];
        let mut cur = x;
        while cur != y {
            let &(next, t) = self
                .space
                .neighbors(cur)
                .iter()
                .find(|(w, t)| w.ix() < n && u64::from(*t) + dist[w.ix()] == dist[cur.ix()])?;
            verts.push(next);
            arc.push(arc.last().unwrap() + u64::from(t));
            cur = next;
        }
        Some(Path::from_parts(verts, arc, self.space.scale()))
    }

    /// DOT rendering with `depth` and edge `kind` attributes.
    pub fn to_dot(&self) -> String {
        emit::to_dot(&self.space, |v| self.vertex_attrs(v), |u, v| self.edge_attrs(u, v))
    }

    pub fn to_graphml(&self) -> String {
        emit::to_graphml(&self.space, |v| self.vertex_attrs(v), |u, v| self.edge_attrs(u, v))
    }

    fn vertex_attrs(&self, v: Vertex) -> Attrs {
        let mut a = vec![("depth", self.depth(v).to_string())];
        a.extend(emit::space_vertex_attrs(&self.space, v));
        a
    }

    fn edge_attrs(&self, u: Vertex, v: Vertex) -> Attrs {
        vec![("kind", self.edge_kind(u, v).as_str().to_string())]
    }
}

/// All-pairs hop counts on the graph `0..k` with adjacency `adj`.
fn level_hops(k: usize, adj: impl Fn(usize, usize) -> bool) -> Vec<u32> {
    let mut out = vec![UNREACHED; k * k];
    let nbrs: Vec<Vec<usize>> = (0..k)
        .map(|i| (0..k).filter(|&j| j != i && adj(i.min(j), i.max(j))).collect())
        .collect();
    let mut queue = VecDeque::new();
    for s in 0..k {
        let row = &mut out[s * k..(s + 1) * k];
        row[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &w in &nbrs[u] {
                if row[w] == UNREACHED {
                    row[w] = row[u] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    out
}

/// Normal geodesics where they realize the distance, lexicographic
/// geodesics otherwise.
#[derive(Clone, Copy, Debug)]
pub struct NormalCombing<'a>(pub &'a HoroballGraph);

impl Combing for NormalCombing<'_> {
    fn space(&self) -> &Space {
        &self.0.space
    }

    fn path(&self, x: Vertex, y: Vertex) -> Cow<'_, Path> {
        let d = self.0.space.dist_ticks(x, y);
        match self.0.normal_geodesic(x, y) {
            Ok(ng) if ng.length_ticks() == d => Cow::Owned(ng.path()),
            _ => Cow::Owned(self.0.space.geodesic_unchecked(x, y)),
        }
    }
}

/// One maximal run of same-kind edges of a path through a horoball.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub kind: EdgeKind,
    pub edges: usize,
    pub from_depth: u32,
    pub to_depth: u32,
}

/// Splits a path into maximal vertical / horizontal / base runs. Vertical
/// runs also split where the direction changes.
pub fn segments(h: &HoroballGraph, p: &Path) -> Vec<Segment> {
    let mut out: Vec<Segment> = Vec::new();
    for w in p.vertices().windows(2) {
        let kind = h.edge_kind(w[0], w[1]);
        let (d0, d1) = (h.depth(w[0]), h.depth(w[1]));
        if let Some(last) = out.last_mut() {
            let same_dir = kind != EdgeKind::Vertical
                || (last.to_depth > last.from_depth) == (d1 > d0);
            if last.kind == kind && same_dir {
                last.edges += 1;
                last.to_depth = d1;
                continue;
            }
        }
        out.push(Segment {
            kind,
            edges: 1,
            from_depth: d0,
            to_depth: d1,
        });
    }
    out
}

/// Horizontal runs strictly below the deepest vertex of the path have one
/// edge. Base runs are ignored.
pub fn claim_one_holds(segs: &[Segment]) -> bool {
    let top = segs
        .iter()
        .map(|s| s.from_depth.max(s.to_depth))
        .max()
        .unwrap_or(0);
    segs.iter()
        .filter(|s| s.kind == EdgeKind::Horizontal && s.from_depth < top)
        .all(|s| s.edges == 1)
}

/// No run `horizontal, vertical, horizontal, vertical` whose two vertical
/// runs both go deeper.
pub fn claim_two_holds(segs: &[Segment]) -> bool {
    let deeper = |s: &Segment| s.kind == EdgeKind::Vertical && s.to_depth > s.from_depth;
    !segs.windows(4).any(|w| {
        w[0].kind == EdgeKind::Horizontal
            && deeper(&w[1])
            && w[2].kind == EdgeKind::Horizontal
            && deeper(&w[3])
    })
}

/// Exact Hausdorff distance between the vertex images of two paths with
/// common endpoints.
pub fn hausdorff_deviation(space: &Space, p: &Path, q: &Path) -> Result<Length> {
    if p.start() != q.start() || p.end() != q.end() {
        return Err(Error::EndpointMismatch);
    }
    Ok(space.ticks_to_length(hausdorff_ticks(space, p.vertices(), q.vertices())))
}

pub(crate) fn hausdorff_ticks(space: &Space, a: &[Vertex], b: &[Vertex]) -> u64 {
    let one_way = |a: &[Vertex], b: &[Vertex]| {
        a.iter()
            .map(|&u| {
                let row = space.dist_row(u);
                b.iter().map(|v| u64::from(row[v.ix()])).min().unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Result of a minimal-diameter triangle scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleReport {
    /// Maximum over scanned triangles of the minimal diameter.
    pub max_min_diameter: Length,
    /// A triangle attaining the maximum.
    pub witness: Option<[Vertex; 3]>,
    pub triangles: usize,
}

/// Bit set over the points of one side of a triangle.
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Bits {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn meets(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| a & b != 0)
    }
}

/// Whether points `p1 ∈ s1, p2 ∈ s2, p3 ∈ s3` exist with all pairwise
/// distances `<= r` ticks.
fn has_small_triple(space: &Space, s1: &[Vertex], s2: &[Vertex], s3: &[Vertex], r: u64) -> bool {
    let near3 = |p: Vertex| {
        let row = space.dist_row(p);
        let mut b = Bits::new(s3.len());
        for (i, q) in s3.iter().enumerate() {
            if u64::from(row[q.ix()]) <= r {
                b.set(i);
            }
        }
        b
    };
    let m2: Vec<Bits> = s2.iter().map(|&p| near3(p)).collect();
    s1.iter().any(|&p1| {
        let m1 = near3(p1);
        let row = space.dist_row(p1);
        s2.iter()
            .zip(&m2)
            .any(|(p2, b2)| u64::from(row[p2.ix()]) <= r && m1.meets(b2))
    })
}

/// Exact `min over (p1, p2, p3) of max pairwise distance`, in ticks.
pub(crate) fn min_diameter_ticks(space: &Space, s1: &[Vertex], s2: &[Vertex], s3: &[Vertex]) -> u64 {
    let mut best = u64::MAX;
    for &p1 in s1 {
        let r1 = space.dist_row(p1);
        for &p2 in s2 {
            let d12 = u64::from(r1[p2.ix()]);
            if d12 >= best {
                continue;
            }
            let r2 = space.dist_row(p2);
            for &p3 in s3 {
                let d = d12.max(u64::from(r1[p3.ix()])).max(u64::from(r2[p3.ix()]));
                best = best.min(d);
            }
        }
    }
    best
}

/// For every sampled triangle `(x, y, z)` with sides `path(x, y)`,
/// `path(y, z)`, `path(z, x)`, computes the minimal diameter of a point
/// triple taken one per side, and returns the maximum over triangles.
///
/// `Sample::All` visits every unordered triple in both orientations.
pub fn min_diameter_triangles<C: Combing>(
    combing: &C,
    triples: Sample,
    mode: Mode,
) -> Result<TriangleReport> {
    let space = combing.space();
    let n = space.len();
    let list: Vec<[u32; 3]> = match triples {
        Sample::All => {
            let mut v = Vec::new();
            for x in 0..n as u32 {
                for y in x..n as u32 {
                    for z in y..n as u32 {
                        v.push([x, y, z]);
                        if x != y && y != z {
                            v.push([x, z, y]);
                        }
                    }
                }
            }
            v
        }
        s => s.tuples::<3>(n)?,
    };
    if list.is_empty() {
        return Err(Error::EmptySample);
    }
    let table;
    let paths: &dyn Combing = if matches!(triples, Sample::All) || list.len() > n * n {
        table = crate::bicombing::PathTable::new(combing, mode);
        &table
    } else {
        combing
    };
    let floor = std::sync::atomic::AtomicU64::new(0);
    let best = par::fold(
        mode,
        list.len(),
        || (0u64, None::<[u32; 3]>),
        |acc, i| {
            let [x, y, z] = list[i];
            let (x, y, z) = (Vertex(x), Vertex(y), Vertex(z));
            let s1 = paths.path(x, y);
            let s2 = paths.path(y, z);
            let s3 = paths.path(z, x);
            let cutoff = floor.load(std::sync::atomic::Ordering::Relaxed).max(acc.0);
            let beats = |d: u64| d > acc.0 || acc.1.is_none();
            if acc.1.is_some()
                && has_small_triple(space, s1.vertices(), s2.vertices(), s3.vertices(), cutoff)
            {
                return acc;
            }
            let d = min_diameter_ticks(space, s1.vertices(), s2.vertices(), s3.vertices());
            if beats(d) {
                floor.fetch_max(d, std::sync::atomic::Ordering::Relaxed);
                (d, Some(list[i]))
            } else {
                acc
            }
        },
        |a, b| match (a.1, b.1) {
            (None, _) => b,
            (_, None) => a,
            (Some(wa), Some(wb)) => {
                if b.0 > a.0 || (b.0 == a.0 && wb < wa) {
                    b
                } else {
                    a
                }
            }
        },
    );
    Ok(TriangleReport {
        max_min_diameter: space.ticks_to_length(best.0),
        witness: best.1.map(|[x, y, z]| [Vertex(x), Vertex(y), Vertex(z)]),
        triangles: list.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bicombing::LexCombing;
    use crate::metric::tests::path_graph;

    /// Two lattice points at distance `d` joined by a unit path.
    fn pair(d: usize) -> Space {
        let ids = (0..=d).map(|i| format!("p{i}")).collect();
        let edges = (1..=d)
            .map(|i| (Vertex::from(i - 1), Vertex::from(i), length::int(1)))
            .collect();
        // lattice {p0, pd} is not 2-dense for d > 4; use a line metric instead
        let lattice = (0..=d).step_by(2).map(Vertex::from).collect();
        Space::from_parts("pair", ids, edges, lattice, Vertex(0)).unwrap()
    }

    /// Two-point space `{a, b}` with `d(a, b) = d`.
    fn two_points(d: i64) -> Space {
        Space::from_parts(
            "ab",
            vec!["a".into(), "b".into()],
            vec![(Vertex(0), Vertex(1), length::int(d))],
            vec![Vertex(0), Vertex(1)],
            Vertex(0),
        )
        .unwrap_or_else(|e| panic!("{e}"))
    }

    #[test]
    fn depth_zero_is_rejected() {
        let s = path_graph(2);
        assert_eq!(HoroballGraph::build(&s, 0, false).unwrap_err().code(), "DEPTH_TOO_SMALL");
    }

    #[test]
    fn horizontal_edges_follow_the_power_rule() {
        let h = HoroballGraph::build(&two_points(4), 3, false).unwrap();
        assert!(h.horizontal_pairs(0).is_empty());
        assert!(h.horizontal_pairs(1).is_empty());
        assert_eq!(h.horizontal_pairs(2), vec![(0, 1)]);
        assert_eq!(h.horizontal_pairs(3), vec![(0, 1)]);
    }

    #[test]
    fn single_point_is_a_vertical_ray() {
        let s = Space::from_parts("a", vec!["a".into()], vec![], vec![Vertex(0)], Vertex(0)).unwrap();
        let h = HoroballGraph::build(&s, 5, false).unwrap();
        assert_eq!(h.space().len(), 6);
        assert_eq!(h.space().edge_count(), 5);
        assert!((1..=5).all(|l| h.horizontal_pairs(l).is_empty()));
    }

    #[test]
    fn three_point_rule_oracle() {
        let h = HoroballGraph::build(&path_graph(3), 2, false).unwrap();
        // d(0,1) = d(1,2) = 1, d(0,2) = 2 <= 2^1
        assert_eq!(h.horizontal_pairs(1), vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(h.horizontal_pairs(2), vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn normal_geodesic_over_distance_four() {
        let h = HoroballGraph::build(&two_points(4), 3, false).unwrap();
        let a0 = h.vertex_at(0, 0);
        let b0 = h.vertex_at(1, 0);
        let ng = h.normal_geodesic(a0, b0).unwrap();
        assert_eq!(ng.up.edge_count(), 2);
        assert_eq!(ng.across.edge_count(), 1);
        assert_eq!(ng.down.edge_count(), 2);
        assert_eq!(h.space().dist_ticks(a0, b0), 5);
        let a3 = h.vertex_at(0, 3);
        let v = h.normal_geodesic(a0, a3).unwrap();
        assert_eq!(v.length_ticks(), 3);
        assert_eq!(v.across.edge_count(), 0);
    }

    #[test]
    fn glued_horoball_uses_the_base() {
        let h = HoroballGraph::build(&two_points(4), 3, true).unwrap();
        let (a, b) = (Vertex(0), Vertex(1));
        assert_eq!(h.space().distance(a, b).unwrap(), length::int(4));
        let ng = h.normal_geodesic(a, b).unwrap();
        assert!(ng.through_base);
        assert_eq!(ng.length_ticks(), 4);
    }

    #[test]
    fn glued_over_fine_base_matches_dijkstra() {
        let base = pair(9);
        let h = HoroballGraph::build(&base, 6, true).unwrap();
        let s = h.space();
        for x in s.vertices().filter(|v| h.coords(*v).is_some()) {
            for y in s.vertices().filter(|v| h.coords(*v).is_some()) {
                let ng = h.normal_geodesic(x, y).unwrap();
                assert_eq!(ng.length_ticks(), s.dist_ticks(x, y), "{} {}", s.id(x), s.id(y));
            }
        }
    }

    #[test]
    fn hausdorff_of_identical_paths_is_zero() {
        let s = path_graph(4);
        let p = s.geodesic(Vertex(0), Vertex(3)).unwrap();
        assert_eq!(hausdorff_deviation(&s, &p, &p).unwrap(), length::int(0));
        let q = s.geodesic(Vertex(0), Vertex(2)).unwrap();
        assert_eq!(hausdorff_deviation(&s, &p, &q).unwrap_err().code(), "ENDPOINT_MISMATCH");
    }

    #[test]
    fn hausdorff_between_adjacent_vertical_rays() {
        // no horizontal edges at depth 0
        let h = HoroballGraph::build(&path_graph(2), 2, false).unwrap();
        let s = h.space();
        let ray = |p: usize| {
            s.path_through(&[h.vertex_at(p, 0), h.vertex_at(p, 1), h.vertex_at(p, 2)])
                .unwrap()
        };
        let (p, q) = (ray(0), ray(1));
        // oracle: max over each image of the min distance to the other
        let mut oracle = 0;
        for &u in p.vertices() {
            oracle = oracle.max(q.vertices().iter().map(|&v| s.dist_ticks(u, v)).min().unwrap());
        }
        for &u in q.vertices() {
            oracle = oracle.max(p.vertices().iter().map(|&v| s.dist_ticks(u, v)).min().unwrap());
        }
        assert_eq!(oracle, 2);
        assert_eq!(hausdorff_ticks(s, p.vertices(), q.vertices()), 2);
    }

    #[test]
    fn degenerate_triangle_has_zero_diameter() {
        let h = HoroballGraph::build(&path_graph(3), 2, false).unwrap();
        let c = LexCombing(h.space());
        let s = h.space();
        let p = c.path(Vertex(4), Vertex(4));
        assert_eq!(min_diameter_ticks(s, p.vertices(), p.vertices(), p.vertices()), 0);
    }

    #[test]
    fn sufficiency_depth_is_recorded() {
        let h = HoroballGraph::build(&two_points(32), 5, false).unwrap();
        assert_eq!(h.sufficient_depth(), 8);
    }
    /// Floyd-Warshall over the edge list, independent of the space's table.
    fn floyd(s: &Space) -> Vec<Vec<u64>> {
        let n = s.len();
        let mut d = vec![vec![u64::MAX / 4; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0;
        }
        for (u, v, l) in s.edges() {
            let t = s.length_to_ticks(&l).unwrap();
            d[u.ix()][v.ix()] = d[u.ix()][v.ix()].min(t);
            d[v.ix()][u.ix()] = d[v.ix()][u.ix()].min(t);
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
                }
            }
        }
        d
    }

    #[test]
    fn triangle_over_distance_sixteen() {
        let h = HoroballGraph::build(&two_points(16), 5, false).unwrap();
        let s = h.space();
        let (a0, b0, a4) = (h.vertex_at(0, 0), h.vertex_at(1, 0), h.vertex_at(0, 4));
        let c = LexCombing(s);
        let sides = [c.path(a0, b0), c.path(b0, a4), c.path(a4, a0)];
        let d = floyd(s);
        let mut oracle = u64::MAX;
        for p in sides[0].vertices() {
            for q in sides[1].vertices() {
                for r in sides[2].vertices() {
                    let m = d[p.ix()][q.ix()].max(d[p.ix()][r.ix()]).max(d[q.ix()][r.ix()]);
                    oracle = oracle.min(m);
                }
            }
        }
        let got = min_diameter_ticks(s, sides[0].vertices(), sides[1].vertices(), sides[2].vertices());
        assert_eq!(got, oracle);
        // the three sides share the vertex (a, 4)
        assert_eq!(got, 0);
    }

    #[test]
    fn unit_interval_horoball_is_thin() {
        let h = HoroballGraph::build(&path_graph(5), 4, false).unwrap();
        let r = min_diameter_triangles(&LexCombing(h.space()), Sample::All, Mode::Sequential).unwrap();
        assert!(r.max_min_diameter <= length::int(9));
        assert_eq!(r.max_min_diameter, length::int(2));
        let r2 = min_diameter_triangles(&LexCombing(h.space()), Sample::All, Mode::Parallel).unwrap();
        assert_eq!(r, r2);
    }

    #[test]
    fn normal_geodesics_are_exact_and_claims_hold() {
        let base = crate::gen::random_lattice(7, 16, 11).unwrap();
        let h = HoroballGraph::build(&base, 8, false).unwrap();
        let s = h.space();
        let d = floyd(s);
        let lex = LexCombing(s);
        for x in s.vertices() {
            for y in s.vertices() {
                let ng = h.normal_geodesic(x, y).unwrap();
                assert_eq!(ng.length_ticks(), d[x.ix()][y.ix()]);
                assert!(ng.across.edge_count() <= 5);
                let segs = segments(&h, &ng.path());
                assert!(segs.iter().filter(|g| g.kind == EdgeKind::Horizontal).count() <= 1);
                let g = lex.path(x, y);
                let bfs = segments(&h, &g);
                assert!(claim_one_holds(&bfs) && claim_two_holds(&bfs));
                let dev = hausdorff_deviation(s, &g, &ng.path()).unwrap();
                assert!(dev <= length::int(4));
            }
        }
    }

    #[test]
    fn claim_patterns() {
        let seg = |kind, edges, from_depth, to_depth| Segment { kind, edges, from_depth, to_depth };
        use EdgeKind::*;
        let bad = [seg(Horizontal, 1, 1, 1), seg(Vertical, 1, 1, 2), seg(Horizontal, 1, 2, 2), seg(Vertical, 1, 2, 3)];
        assert!(!claim_two_holds(&bad));
        let ok = [seg(Horizontal, 1, 2, 2), seg(Vertical, 1, 2, 1), seg(Horizontal, 1, 1, 1), seg(Vertical, 1, 1, 0)];
        assert!(claim_two_holds(&ok));
        let wide_low = [seg(Horizontal, 2, 1, 1), seg(Vertical, 2, 1, 3)];
        assert!(!claim_one_holds(&wide_low));
        let wide_top = [seg(Vertical, 2, 1, 3), seg(Horizontal, 3, 3, 3)];
        assert!(claim_one_holds(&wide_top));
    }

    #[test]
    fn emitters_carry_depth_and_kind() {
        let h = HoroballGraph::build(&two_points(4), 2, true).unwrap();
        let dot = h.to_dot();
        assert!(dot.contains("kind=\"base\""));
        assert!(dot.contains("kind=\"vertical\""));
        assert!(dot.contains("kind=\"horizontal\""));
        assert!(dot.contains("depth=\"2\""));
        assert!(h.to_graphml().contains("<data key=\"e_kind\">horizontal</data>"));
    }
}
