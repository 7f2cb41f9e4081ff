//! Finite weighted-graph metric spaces with a designated lattice.
//!
//! Edge lengths are exact rationals. Internally every length is an integer
//! number of *ticks*, where one unit of length is `scale` ticks and `scale`
//! is the least common multiple of the edge-length denominators. All
//! distance comparisons are exact.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::length::{self, Length};
use crate::par::{self, Mode};

/// Index of a vertex in its host space. Vertex order is the declaration
/// order and is the order used for every lexicographic tie-break.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Vertex(pub u32);

impl Vertex {
    #[inline]
    pub fn ix(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for Vertex {
    fn from(i: usize) -> Self {
        Vertex(i as u32)
    }
}

/// Edge length in a document: either a string (`"1/2"`, `"0.5"`) or an
/// integer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LengthRepr {
    Int(i64),
    Text(String),
}

impl LengthRepr {
    fn parse(&self) -> Result<Length> {
        match self {
            LengthRepr::Int(n) => Ok(length::int(*n)),
            LengthRepr::Text(s) => length::parse(s),
        }
    }
}

impl From<Length> for LengthRepr {
    fn from(l: Length) -> Self {
        if l.is_integer() {
            LengthRepr::Int(l.to_integer())
        } else {
            LengthRepr::Text(length::fmt(&l))
        }
    }
}

/// Serialized form of a [`Space`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceDoc {
    #[serde(default)]
    pub name: String,
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String, LengthRepr)>,
    pub lattice: Vec<String>,
    pub basepoint: String,
}

#[derive(Clone, Debug)]
struct DistTable {
    n: usize,
    ticks: Vec<u32>,
}

impl DistTable {
    #[inline]
    fn get(&self, u: usize, v: usize) -> u32 {
        self.ticks[u * self.n + v]
    }

    fn row(&self, u: usize) -> &[u32] {
        &self.ticks[u * self.n..(u + 1) * self.n]
    }
}

/// A validated finite metric space: connected graph with positive edge
/// lengths, a 1-discrete 2-dense lattice and a basepoint.
///
/// Immutable after construction. The all-pairs distance table is built on
/// first use and shared between threads.
pub struct Space {
    name: String,
    ids: Vec<String>,
    index: HashMap<String, Vertex>,
    adj: Vec<Vec<(Vertex, u32)>>,
    lattice: Vec<Vertex>,
    in_lattice: Vec<bool>,
    basepoint: Vertex,
    scale: i64,
    max_edge: u32,
    dist: OnceLock<DistTable>,
}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Space")
            .field("name", &self.name)
            .field("vertices", &self.ids.len())
            .field("lattice", &self.lattice.len())
            .field("scale", &self.scale)
            .finish()
    }
}

impl Clone for Space {
    fn clone(&self) -> Self {
        Space {
            name: self.name.clone(),
            ids: self.ids.clone(),
            index: self.index.clone(),
            adj: self.adj.clone(),
            lattice: self.lattice.clone(),
            in_lattice: self.in_lattice.clone(),
            basepoint: self.basepoint,
            scale: self.scale,
            max_edge: self.max_edge,
            dist: self.dist.clone(),
        }
    }
}

/// Parses and validates a JSON space document. Error locations name the
/// offending field and, where possible, its line in `text`.
pub fn load_space(text: &str) -> Result<Space> {
    let doc: SpaceDoc = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    Space::from_doc(&doc).map_err(|err| match err {
        Error::BadEdge { location, reason } => {
            let line = edge_index(&location)
                .and_then(|i| locate_array_item(text, "edges", i))
                .map(|l| format!("{location} (line {l})"))
                .unwrap_or(location);
            Error::BadEdge { location: line, reason }
        }
        other => other,
    })
}

fn edge_index(location: &str) -> Option<usize> {
    location.strip_prefix("edges[")?.strip_suffix(']')?.parse().ok()
}

/// 1-based line of the `item`-th element of the top-level array `key`.
fn locate_array_item(text: &str, key: &str, item: usize) -> Option<usize> {
    let start = text.find(&format!("\"{key}\""))?;
    let open = start + text[start..].find('[')?;
    let mut depth = 0usize;
    let mut seen = 0usize;
    let mut in_str = false;
    let mut escaped = false;
    for (off, ch) in text[open..].char_indices() {
        if in_str {
            match (escaped, ch) {
                (true, _) => escaped = false,
                (false, '\\') => escaped = true,
                (false, '"') => in_str = false,
                _ => {}
            }
            continue;
        }
        match ch {
            '"' => in_str = true,
            '[' | '{' => {
                depth += 1;
                if depth == 2 {
                    if seen == item {
                        return Some(text[..open + off].matches('\n').count() + 1);
                    }
                    seen += 1;
                }
            }
            ']' | '}' => {
                if depth == 1 {
                    return None;
                }
                depth -= 1;
            }
            _ => {}
        }
    }
    None
}

impl Space {
    pub fn from_doc(doc: &SpaceDoc) -> Result<Space> {
        let mut index = HashMap::with_capacity(doc.vertices.len());
        for (i, id) in doc.vertices.iter().enumerate() {
            if index.insert(id.clone(), Vertex::from(i)).is_some() {
                return Err(Error::Parse(format!("duplicate vertex id {id:?}")));
            }
        }
        let lookup = |id: &str| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| Error::UnknownVertex(id.to_string()))
        };
        let mut edges = Vec::with_capacity(doc.edges.len());
        for (i, (u, v, len)) in doc.edges.iter().enumerate() {
            let location = format!("edges[{i}]");
            let len = len.parse().map_err(|e| Error::BadEdge {
                location: location.clone(),
                reason: e.to_string(),
            })?;
            let (u, v) = (lookup(u)?, lookup(v)?);
            edges.push((u, v, len, location));
        }
        let basepoint = index
            .get(&doc.basepoint)
            .copied()
            .ok_or_else(|| Error::MissingBasepoint(doc.basepoint.clone()))?;
        let lattice = doc
            .lattice
            .iter()
            .map(|id| lookup(id))
            .collect::<Result<Vec<_>>>()?;
        Space::build(doc.name.clone(), doc.vertices.clone(), edges, lattice, basepoint)
    }

    /// Builds a space from already-indexed parts. Errors locate edges by
    /// their position in `edges`.
    pub fn from_parts(
        name: impl Into<String>,
        ids: Vec<String>,
        edges: Vec<(Vertex, Vertex, Length)>,
        lattice: Vec<Vertex>,
        basepoint: Vertex,
    ) -> Result<Space> {
        let edges = edges
            .into_iter()
            .enumerate()
            .map(|(i, (u, v, l))| (u, v, l, format!("edges[{i}]")))
            .collect();
        Space::build(name.into(), ids, edges, lattice, basepoint)
    }

    /// A finite metric space given by its distance matrix, every point a
    /// lattice point. Only edges not factoring through a third point are
    /// kept.
    pub fn from_metric(name: impl Into<String>, ids: Vec<String>, d: &[Vec<Length>]) -> Result<Space> {
        let n = ids.len();
        if d.len() != n || d.iter().any(|r| r.len() != n) {
            return Err(Error::BadParams("distance matrix shape".into()));
        }
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if d[i][j] != d[j][i] {
                    return Err(Error::BadParams(format!("asymmetric at ({i}, {j})")));
                }
                let mut direct = true;
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    let via = d[i][k] + d[k][j];
                    if via < d[i][j] {
                        return Err(Error::BadParams(format!(
                            "triangle inequality fails at ({i}, {k}, {j})"
                        )));
                    }
                    if via == d[i][j] {
                        direct = false;
                    }
                }
                if direct {
                    edges.push((Vertex::from(i), Vertex::from(j), d[i][j]));
                }
            }
        }
        let lattice = (0..n).map(Vertex::from).collect();
        Space::from_parts(name, ids, edges, lattice, Vertex(0))
    }

    fn build(
        name: String,
        ids: Vec<String>,
        edges: Vec<(Vertex, Vertex, Length, String)>,
        lattice: Vec<Vertex>,
        basepoint: Vertex,
    ) -> Result<Space> {
        let n = ids.len();
        if n == 0 {
            return Err(Error::Disconnected("space has no vertices".into()));
        }
        if basepoint.ix() >= n {
            return Err(Error::MissingBasepoint(format!("#{}", basepoint.0)));
        }
        let mut scale: i64 = 1;
        for (u, v, len, location) in &edges {
            if u.ix() >= n || v.ix() >= n {
                return Err(Error::UnknownVertex(location.to_string()));
            }
            if !length::is_positive(len) {
                return Err(Error::BadEdge {
                    location: location.clone(),
                    reason: format!("length {} is not positive", length::fmt(len)),
                });
            }
            if u == v {
                return Err(Error::BadEdge {
                    location: location.clone(),
                    reason: "self-loop".into(),
                });
            }
            scale = scale.lcm(len.denom());
        }
        let mut adj: Vec<Vec<(Vertex, u32)>> = vec![Vec::new(); n];
        let mut total: u64 = 0;
        let mut max_edge = 0u32;
        for (u, v, len, location) in &edges {
            let t = (len * scale).to_integer();
            let t = u32::try_from(t).map_err(|_| Error::BadEdge {
                location: location.clone(),
                reason: "length too large".into(),
            })?;
            total += u64::from(t);
            max_edge = max_edge.max(t);
            for (a, b) in [(*u, *v), (*v, *u)] {
                match adj[a.ix()].iter_mut().find(|(w, _)| *w == b) {
                    Some(slot) => slot.1 = slot.1.min(t),
                    None => adj[a.ix()].push((b, t)),
                }
            }
        }
        if total >= u64::from(u32::MAX) {
            return Err(Error::BadParams("total edge length overflows tick range".into()));
        }
        for nb in &mut adj {
            nb.sort_unstable_by_key(|(w, _)| *w);
        }
        let index = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), Vertex::from(i)))
            .collect();
        let mut in_lattice = vec![false; n];
        let mut lat = Vec::with_capacity(lattice.len());
        for v in lattice {
            if v.ix() >= n {
                return Err(Error::UnknownVertex(format!("#{}", v.0)));
            }
            if !in_lattice[v.ix()] {
                in_lattice[v.ix()] = true;
                lat.push(v);
            }
        }
        lat.sort_unstable();
        let space = Space {
            name,
            ids,
            index,
            adj,
            lattice: lat,
            in_lattice,
            basepoint,
            scale,
            max_edge,
            dist: OnceLock::new(),
        };
        space.check_connected()?;
        space.check_lattice()?;
        Ok(space)
    }

    fn check_connected(&self) -> Result<()> {
        let d = self.sssp(self.basepoint, None);
        if let Some(v) = d.iter().position(|x| *x == u64::MAX) {
            return Err(Error::Disconnected(format!(
                "vertex {:?} unreachable from {:?}",
                self.ids[v],
                self.ids[self.basepoint.ix()]
            )));
        }
        Ok(())
    }

    fn check_lattice(&self) -> Result<()> {
        if self.lattice.is_empty() {
            return Err(Error::BadLattice("lattice is empty".into()));
        }
        let unit = self.scale as u64;
        for &x in &self.lattice {
            let near = self.sssp(x, Some(unit.saturating_sub(1)));
            if let Some(y) = self
                .lattice
                .iter()
                .find(|y| **y != x && near[y.ix()] < unit)
            {
                return Err(Error::BadLattice(format!(
                    "lattice points {:?} and {:?} are closer than 1",
                    self.ids[x.ix()],
                    self.ids[y.ix()]
                )));
            }
        }
        let nearest = self.multi_source(&self.lattice);
        if let Some((v, _)) = nearest
            .iter()
            .enumerate()
            .find(|(_, d)| **d > 2 * unit)
        {
            return Err(Error::BadLattice(format!(
                "vertex {:?} is farther than 2 from the lattice",
                self.ids[v]
            )));
        }
        Ok(())
    }

    /// Dijkstra from `src`, optionally stopping beyond `limit` ticks.
    /// Unreached vertices get `u64::MAX`.
    fn sssp(&self, src: Vertex, limit: Option<u64>) -> Vec<u64> {
        self.multi_source_bounded(&[src], limit)
    }

    fn multi_source(&self, srcs: &[Vertex]) -> Vec<u64> {
        self.multi_source_bounded(srcs, None)
    }

    fn multi_source_bounded(&self, srcs: &[Vertex], limit: Option<u64>) -> Vec<u64> {
        let n = self.ids.len();
        let mut dist = vec![u64::MAX; n];
        let mut heap = BinaryHeap::new();
        for s in srcs {
            dist[s.ix()] = 0;
            heap.push(Reverse((0u64, s.0)));
        }
        let limit = limit.unwrap_or(u64::MAX);
        while let Some(Reverse((d, u))) = heap.pop() {
            if d > dist[u as usize] {
                continue;
            }
            for &(w, t) in &self.adj[u as usize] {
                let nd = d + u64::from(t);
                if nd <= limit && nd < dist[w.ix()] {
                    dist[w.ix()] = nd;
                    heap.push(Reverse((nd, w.0)));
                }
            }
        }
        dist
    }

    fn table(&self) -> &DistTable {
        self.dist.get_or_init(|| {
            let n = self.ids.len();
            let rows = par::map(Mode::Parallel, n, |s| {
                self.sssp(Vertex::from(s), None)
                    .into_iter()
                    .map(|d| d as u32)
                    .collect::<Vec<u32>>()
            });
            DistTable {
                n,
                ticks: rows.concat(),
            }
        })
    }

    /// Forces the all-pairs table to be built now.
    pub fn warm(&self) {
        let _ = self.table();
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = Vertex> + '_ {
        (0..self.ids.len()).map(Vertex::from)
    }

    pub fn id(&self, v: Vertex) -> &str {
        &self.ids[v.ix()]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn vertex(&self, id: &str) -> Result<Vertex> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<Vertex> {
        if v.ix() < self.ids.len() {
            Ok(v)
        } else {
            Err(Error::UnknownVertex(format!("#{}", v.0)))
        }
    }

    pub fn neighbors(&self, v: Vertex) -> &[(Vertex, u32)] {
        &self.adj[v.ix()]
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex, Length)> + '_ {
        self.adj.iter().enumerate().flat_map(move |(u, nb)| {
            nb.iter()
                .filter(move |(w, _)| w.ix() > u)
                .map(move |&(w, t)| (Vertex::from(u), w, self.ticks_to_length(u64::from(t))))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn lattice(&self) -> &[Vertex] {
        &self.lattice
    }

    pub fn in_lattice(&self, v: Vertex) -> bool {
        self.in_lattice[v.ix()]
    }

    pub fn basepoint(&self) -> Vertex {
        self.basepoint
    }

    /// Ticks per unit length.
    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn max_edge(&self) -> Length {
        self.ticks_to_length(u64::from(self.max_edge))
    }

    pub fn max_edge_ticks(&self) -> u64 {
        u64::from(self.max_edge)
    }

    pub fn ticks_to_length(&self, t: u64) -> Length {
        Length::new(t as i64, self.scale)
    }

    /// Ticks of `l`, if `l` is a whole number of ticks.
    pub fn length_to_ticks(&self, l: &Length) -> Option<u64> {
        let t = l * self.scale;
        (t.is_integer() && t.to_integer() >= 0).then(|| t.to_integer() as u64)
    }

    #[inline]
    pub fn dist_ticks(&self, u: Vertex, v: Vertex) -> u64 {
        u64::from(self.table().get(u.ix(), v.ix()))
    }

    /// Distances from `u` to every vertex, in ticks.
    pub fn dist_row(&self, u: Vertex) -> &[u32] {
        self.table().row(u.ix())
    }

    pub fn distance(&self, u: Vertex, v: Vertex) -> Result<Length> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        Ok(self.ticks_to_length(self.dist_ticks(u, v)))
    }

    pub fn eccentricity(&self, u: Vertex) -> Length {
        let m = self.dist_row(u).iter().copied().max().unwrap_or(0);
        self.ticks_to_length(u64::from(m))
    }

    /// Shortest path from `u` to `v` whose vertex sequence is
    /// lexicographically minimal among all shortest paths.
    pub fn geodesic(&self, u: Vertex, v: Vertex) -> Result<Path> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        Ok(self.geodesic_unchecked(u, v))
    }

    pub(crate) fn geodesic_unchecked(&self, u: Vertex, v: Vertex) -> Path {
        let to_v = self.dist_row(v);
        let mut verts = vec![u];
        let mut arc = vec![0u64];
        let mut cur = u;
        while cur != v {
            let here = u64::from(to_v[cur.ix()]);
            let &(next, t) = self.adj[cur.ix()]
                .iter()
                .find(|(w, t)| u64::from(*t) + u64::from(to_v[w.ix()]) == here)
                .expect("distance table is consistent");
            verts.push(next);
            arc.push(arc.last().unwrap() + u64::from(t));
            cur = next;
        }
        Path::from_parts(verts, arc, self.scale)
    }

    /// Builds a [`Path`] from a vertex sequence, checking adjacency.
    pub fn path_through(&self, verts: &[Vertex]) -> Option<Path> {
        verts.first()?;
        let mut arc = vec![0u64];
        for w in verts.windows(2) {
            let t = self.adj[w[0].ix()].iter().find(|(x, _)| *x == w[1])?.1;
            arc.push(arc.last().unwrap() + u64::from(t));
        }
        Some(Path::from_parts(verts.to_vec(), arc, self.scale))
    }

    /// Vertices whose distance from `center` lies in `[lo, hi]` ticks.
    pub fn sphere_ticks(&self, center: Vertex, lo: u64, hi: u64) -> Vec<Vertex> {
        self.dist_row(center)
            .iter()
            .enumerate()
            .filter(|(_, d)| (lo..=hi).contains(&u64::from(**d)))
            .map(|(i, _)| Vertex::from(i))
            .collect()
    }

    pub fn to_doc(&self) -> SpaceDoc {
        SpaceDoc {
            name: self.name.clone(),
            vertices: self.ids.clone(),
            edges: self
                .edges()
                .map(|(u, v, l)| (self.ids[u.ix()].clone(), self.ids[v.ix()].clone(), l.into()))
                .collect(),
            lattice: self.lattice.iter().map(|v| self.ids[v.ix()].clone()).collect(),
            basepoint: self.ids[self.basepoint.ix()].clone(),
        }
    }
}

/// A path in a host space: vertices plus cumulative arclength in ticks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    verts: Vec<Vertex>,
    arc: Vec<u64>,
    scale: i64,
}

impl Path {
    pub(crate) fn from_parts(verts: Vec<Vertex>, arc: Vec<u64>, scale: i64) -> Path {
        debug_assert_eq!(verts.len(), arc.len());
        debug_assert!(!verts.is_empty());
        Path { verts, arc, scale }
    }

    pub fn single(v: Vertex, scale: i64) -> Path {
        Path::from_parts(vec![v], vec![0], scale)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.verts
    }

    pub fn arclengths(&self) -> &[u64] {
        &self.arc
    }

    pub fn start(&self) -> Vertex {
        self.verts[0]
    }

    pub fn end(&self) -> Vertex {
        *self.verts.last().unwrap()
    }

    pub fn edge_count(&self) -> usize {
        self.verts.len() - 1
    }

    pub fn length_ticks(&self) -> u64 {
        *self.arc.last().unwrap()
    }

    pub fn length(&self) -> Length {
        Length::new(self.length_ticks() as i64, self.scale)
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    /// Index of the path vertex whose arclength is closest to `num / den`
    /// ticks; ties go to the earlier vertex. Targets beyond either end clamp.
    pub fn index_near(&self, num: i128, den: i128) -> usize {
        debug_assert!(den > 0);
        // first index with arc * den >= num
        let hi = self.arc.partition_point(|a| i128::from(*a) * den < num);
        if hi == 0 {
            return 0;
        }
        if hi == self.arc.len() {
            return hi - 1;
        }
        let below = num - i128::from(self.arc[hi - 1]) * den;
        let above = i128::from(self.arc[hi]) * den - num;
        if above < below {
            hi
        } else {
            hi - 1
        }
    }

    /// The vertex at fraction `t` of the path length, quantized to the
    /// nearest path vertex (ties to the earlier one).
    pub fn at_fraction(&self, t: &Length) -> Vertex {
        let num = i128::from(*t.numer()) * i128::from(self.length_ticks());
        self.verts[self.index_near(num, i128::from(*t.denom()))]
    }

    /// The vertex at arclength `s` (clamped to the path), quantized.
    pub fn at_length(&self, s: &Length) -> Vertex {
        let num = i128::from(*s.numer()) * i128::from(self.scale);
        self.verts[self.index_near(num, i128::from(*s.denom()))]
    }

    /// The vertex at arclength `ticks`, quantized.
    #[inline]
    pub fn at_ticks(&self, ticks: u64) -> Vertex {
        self.verts[self.index_near(i128::from(ticks), 1)]
    }

    pub fn reversed(&self) -> Path {
        let total = self.length_ticks();
        Path {
            verts: self.verts.iter().rev().copied().collect(),
            arc: self.arc.iter().rev().map(|a| total - a).collect(),
            scale: self.scale,
        }
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn concat(mut self, other: &Path) -> Path {
        assert_eq!(self.end(), other.start(), "paths must share the junction");
        let base = self.length_ticks();
        self.verts.extend_from_slice(&other.verts[1..]);
        self.arc.extend(other.arc[1..].iter().map(|a| a + base));
        self
    }

    pub fn ids<'a>(&'a self, space: &'a Space) -> Vec<&'a str> {
        self.verts.iter().map(|v| space.id(*v)).collect()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn path_graph(n: usize) -> Space {
        let ids = (0..n).map(|i| i.to_string()).collect();
        let edges = (1..n)
            .map(|i| (Vertex::from(i - 1), Vertex::from(i), length::int(1)))
            .collect();
        Space::from_parts("path", ids, edges, (0..n).map(Vertex::from).collect(), Vertex(0)).unwrap()
    }

    fn doc(vertices: &[&str], edges: &[(&str, &str, &str)], lattice: &[&str], base: &str) -> SpaceDoc {
        SpaceDoc {
            name: "t".into(),
            vertices: vertices.iter().map(|s| s.to_string()).collect(),
            edges: edges
                .iter()
                .map(|(u, v, l)| (u.to_string(), v.to_string(), LengthRepr::Text(l.to_string())))
                .collect(),
            lattice: lattice.iter().map(|s| s.to_string()).collect(),
            basepoint: base.into(),
        }
    }

    #[test]
    fn unit_path_is_accepted() {
        let d = doc(
            &["0", "1", "2", "3"],
            &[("0", "1", "1"), ("1", "2", "1"), ("2", "3", "1")],
            &["0", "1", "2", "3"],
            "0",
        );
        let s = Space::from_doc(&d).unwrap();
        assert_eq!(s.distance(Vertex(0), Vertex(3)).unwrap(), length::int(3));
        assert_eq!(s.distance(Vertex(2), Vertex(2)).unwrap(), length::int(0));
    }

    #[test]
    fn sparse_lattice_is_rejected() {
        let d = doc(
            &["0", "1", "2", "3"],
            &[("0", "1", "1"), ("1", "2", "1"), ("2", "3", "1")],
            &["0"],
            "0",
        );
        assert_eq!(Space::from_doc(&d).unwrap_err().code(), "BAD_LATTICE");
    }

    #[test]
    fn crowded_lattice_is_rejected() {
        let d = doc(&["a", "b"], &[("a", "b", "1/2")], &["a", "b"], "a");
        assert_eq!(Space::from_doc(&d).unwrap_err().code(), "BAD_LATTICE");
    }

    #[test]
    fn disjoint_edges_are_disconnected() {
        let d = doc(
            &["a", "b", "c", "d"],
            &[("a", "b", "1"), ("c", "d", "1")],
            &["a", "b", "c", "d"],
            "a",
        );
        assert_eq!(Space::from_doc(&d).unwrap_err().code(), "DISCONNECTED");
    }

    #[test]
    fn nonpositive_edge_is_bad() {
        let d = doc(&["a", "b"], &[("a", "b", "0")], &["a", "b"], "a");
        assert_eq!(Space::from_doc(&d).unwrap_err().code(), "BAD_EDGE");
        let d = doc(&["a", "b"], &[("a", "b", "-1")], &["a", "b"], "a");
        assert_eq!(Space::from_doc(&d).unwrap_err().code(), "BAD_EDGE");
    }

    #[test]
    fn missing_basepoint() {
        let d = doc(&["a", "b"], &[("a", "b", "1")], &["a", "b"], "z");
        assert_eq!(Space::from_doc(&d).unwrap_err().code(), "MISSING_BASEPOINT");
    }

    #[test]
    fn unknown_vertex() {
        let s = path_graph(3);
        assert_eq!(s.distance(Vertex(0), Vertex(9)).unwrap_err().code(), "UNKNOWN_VERTEX");
        assert_eq!(s.vertex("x").unwrap_err().code(), "UNKNOWN_VERTEX");
    }

    #[test]
    fn bad_edge_reports_line() {
        let text = "{\n \"vertices\": [\"a\", \"b\", \"c\"],\n \"edges\": [\n  [\"a\", \"b\", \"1\"],\n  [\"b\", \"c\", \"0\"]\n ],\n \"lattice\": [\"a\", \"b\", \"c\"],\n \"basepoint\": \"a\"\n}";
        let err = load_space(text).unwrap_err();
        assert_eq!(err.code(), "BAD_EDGE");
        assert!(err.to_string().contains("edges[1] (line 5)"), "{err}");
    }

    #[test]
    fn four_cycle_lexicographic_tiebreak() {
        let d = doc(
            &["a", "b", "c", "d"],
            &[("a", "b", "1"), ("b", "c", "1"), ("c", "d", "1"), ("d", "a", "1")],
            &["a", "b", "c", "d"],
            "a",
        );
        let s = Space::from_doc(&d).unwrap();
        let p = s.geodesic(Vertex(0), Vertex(2)).unwrap();
        assert_eq!(p.ids(&s), vec!["a", "b", "c"]);
        let q = s.geodesic(Vertex(2), Vertex(0)).unwrap();
        assert_eq!(q.ids(&s), vec!["c", "b", "a"]);
        let r = s.geodesic(Vertex(1), Vertex(1)).unwrap();
        assert_eq!(r.vertices(), &[Vertex(1)]);
        assert_eq!(r.length_ticks(), 0);
    }

    #[test]
    fn rational_lengths_are_exact() {
        let d = doc(
            &["a", "m", "b"],
            &[("a", "m", "2/3"), ("m", "b", "0.5")],
            &["a", "b"],
            "a",
        );
        let s = Space::from_doc(&d).unwrap();
        assert_eq!(s.scale(), 6);
        assert_eq!(s.distance(Vertex(0), Vertex(2)).unwrap(), Length::new(7, 6));
    }

    #[test]
    fn quantized_evaluation_ties_to_earlier() {
        let s = path_graph(4);
        let p = s.geodesic(Vertex(0), Vertex(3)).unwrap();
        assert_eq!(p.at_fraction(&Length::new(1, 2)), Vertex(1));
        assert_eq!(p.at_fraction(&Length::new(2, 3)), Vertex(2));
        assert_eq!(p.at_length(&length::int(2)), Vertex(2));
        assert_eq!(p.at_length(&length::int(10)), Vertex(3));
        assert_eq!(p.at_fraction(&length::int(0)), Vertex(0));
    }
}
