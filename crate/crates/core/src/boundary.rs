//! Finite-radius approximation of the ideal boundary: frontier rays, their
//! Gromov products, threshold partitions, isolated horoball centers and the
//! retraction onto the boundary of a component.

use std::fmt::Write as _;

use petgraph::unionfind::UnionFind;

use crate::bicombing::{Combing, GromovConstants};
use crate::error::{Error, Result};
use crate::length::{self, Length};
use crate::metric::{Path, Space, Vertex};
use crate::par::{self, Mode};
use crate::tree::{AugmentedSpace, TreeCombing, TreeOfSpaces};

/// A geodesic from the basepoint to a frontier vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayApprox {
    pub basepoint: Vertex,
    pub target: Vertex,
    pub path: Path,
    pub radius: Length,
    /// Set for the center ray of a replaced component.
    pub center_of: Option<usize>,
}

impl RayApprox {
    /// Point at arclength `ticks`, clamped to the target.
    pub fn at_ticks(&self, ticks: u64) -> Vertex {
        self.path.at_ticks(ticks)
    }
}

/// One ray per vertex at distance in `(R - maxedge, R]` from `e`, ordered
/// by target id.
pub fn frontier_rays<C: Combing + ?Sized>(combing: &C, e: Vertex, radius: &Length) -> Result<Vec<RayApprox>> {
    let s = combing.space();
    s.check_vertex(e)?;
    let too_large = || Error::RadiusTooLarge(length::fmt(radius));
    if *radius > s.eccentricity(e) || *radius < length::int(0) {
        return Err(too_large());
    }
    let hi = s.length_to_ticks(radius).ok_or_else(too_large)?;
    let lo = (hi + 1).saturating_sub(s.max_edge_ticks());
    let mut targets = s.sphere_ticks(e, lo, hi);
    if targets.is_empty() {
        return Err(too_large());
    }
    targets.sort_by(|a, b| s.id(*a).cmp(s.id(*b)));
    Ok(targets
        .into_iter()
        .map(|t| RayApprox {
            basepoint: e,
            target: t,
            path: combing.path(e, t).into_owned(),
            radius: *radius,
            center_of: None,
        })
        .collect())
}

/// Integer times `0, 1, ..., floor(R)` followed by `R` itself, in ticks.
fn times(space: &Space, radius: &Length) -> Vec<u64> {
    let scale = space.scale() as u64;
    let r = space.length_to_ticks(radius).expect("radius is on the tick grid");
    let mut out: Vec<u64> = (0..=r / scale).map(|t| t * scale).collect();
    if out.last() != Some(&r) {
        out.push(r);
    }
    out
}

fn product_ticks(space: &Space, p: &Path, q: &Path, d1_ticks: &Length, times: &[u64]) -> u64 {
    times
        .iter()
        .rev()
        .copied()
        .find(|&t| length::int(space.dist_ticks(p.at_ticks(t), q.at_ticks(t)) as i64) <= *d1_ticks)
        .unwrap_or(0)
}

/// `sup { t <= R : d(r1(t), r2(t)) <= D1 }` over integer `t` and `t = R`.
pub fn ray_product(space: &Space, r1: &RayApprox, r2: &RayApprox, consts: &GromovConstants) -> Result<Length> {
    if r1.basepoint != r2.basepoint || r1.radius != r2.radius {
        return Err(Error::BasepointMismatch);
    }
    let d1 = consts.d1 * length::int(space.scale());
    let t = product_ticks(space, &r1.path, &r2.path, &d1, &times(space, &r1.radius));
    Ok(space.ticks_to_length(t))
}

/// Rays and their pairwise products.
#[derive(Clone, Debug)]
pub struct BoundaryApprox {
    pub rays: Vec<RayApprox>,
    pub products: Vec<Vec<Length>>,
    pub consts: GromovConstants,
    pub radius: Length,
    /// For rays in an augmented space: the replaced component whose
    /// horoball holds the target above depth 0.
    pub markers: Vec<Option<usize>>,
    pub names: Vec<String>,
}

fn products(space: &Space, rays: &[RayApprox], consts: &GromovConstants, radius: &Length, mode: Mode) -> Vec<Vec<Length>> {
    let d1 = consts.d1 * length::int(space.scale());
    let ts = times(space, radius);
    let n = rays.len();
    let upper = par::map(mode, n, |i| {
        (i..n)
            .map(|j| space.ticks_to_length(product_ticks(space, &rays[i].path, &rays[j].path, &d1, &ts)))
            .collect::<Vec<_>>()
    });
    let mut m = vec![vec![length::int(0); n]; n];
    for (i, row) in upper.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            m[i][i + off] = v;
            m[i + off][i] = v;
        }
    }
    m
}

impl BoundaryApprox {
    pub fn new<C: Combing + ?Sized>(
        combing: &C,
        e: Vertex,
        radius: Length,
        consts: GromovConstants,
        mode: Mode,
    ) -> Result<BoundaryApprox> {
        let s = combing.space();
        let rays = frontier_rays(combing, e, &radius)?;
        let products = products(s, &rays, &consts, &radius, mode);
        let names = rays.iter().map(|r| s.id(r.target).to_string()).collect();
        let markers = vec![None; rays.len()];
        Ok(BoundaryApprox { rays, products, consts, radius, markers, names })
    }

    /// Frontier rays of an augmented space plus one center ray per replaced
    /// component, each tagged with its horoball.
    pub fn augmented(a: &AugmentedSpace, radius: Length, consts: GromovConstants, mode: Mode) -> Result<BoundaryApprox> {
        let z = &a.tree;
        let s = z.space();
        let combing = TreeCombing(z);
        let e = s.basepoint();
        let mut rays = frontier_rays(&combing, e, &radius)?;
        for &k in &a.replaced {
            if let Some(c) = a.center(k) {
                rays.push(RayApprox {
                    basepoint: e,
                    target: c,
                    path: combing.path(e, c).into_owned(),
                    radius,
                    center_of: Some(k),
                });
            }
        }
        let products = products(s, &rays, &consts, &radius, mode);
        let markers = rays.iter().map(|r| r.center_of.or_else(|| a.marker(r.target))).collect();
        let names = rays
            .iter()
            .map(|r| match r.center_of {
                Some(k) => format!("center:{}", z.component(k).name),
                None => s.id(r.target).to_string(),
            })
            .collect();
        Ok(BoundaryApprox { rays, products, consts, radius, markers, names })
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("ray");
        for n in &self.names {
            out.push(',');
            out.push_str(&csv_field(n));
        }
        out.push('\n');
        for (n, row) in self.names.iter().zip(&self.products) {
            out.push_str(&csv_field(n));
            for v in row {
                out.push(',');
                out.push_str(&length::fmt(v));
            }
            out.push('\n');
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Threshold partitions `W_n` for `n = 0..=n_max`: rays joined by chains of
/// products `>= n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionTree {
    /// `levels[n][b]`: sorted ray indices of block `b`; blocks are ordered
    /// by their smallest ray.
    pub levels: Vec<Vec<Vec<usize>>>,
    /// `parents[n][b]`: the level `n - 1` block containing block `b` of
    /// level `n`; empty at level 0.
    pub parents: Vec<Vec<usize>>,
    pub names: Vec<String>,
}

pub fn partition_tree(b: &BoundaryApprox, n_max: u32) -> Result<PartitionTree> {
    if length::int(i64::from(n_max)) > b.radius {
        return Err(Error::BadThreshold { n_max, radius: length::fmt(&b.radius) });
    }
    let n = b.len();
    let mut levels = Vec::with_capacity(n_max as usize + 1);
    let mut parents = Vec::with_capacity(n_max as usize + 1);
    let mut owner_prev: Vec<usize> = Vec::new();
    for level in 0..=n_max {
        let thr = length::int(i64::from(level));
        let mut uf = UnionFind::<usize>::new(n);
        for i in 0..n {
            for j in i + 1..n {
                if b.products[i][j] >= thr {
                    uf.union(i, j);
                }
            }
        }
        let mut root_block: Vec<Option<usize>> = vec![None; n];
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut owner = vec![0; n];
        for (i, slot) in owner.iter_mut().enumerate() {
            let r = uf.find(i);
            let bi = *root_block[r].get_or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[bi].push(i);
            *slot = bi;
        }
        let parent = if level == 0 { Vec::new() } else { blocks.iter().map(|bl| owner_prev[bl[0]]).collect() };
        levels.push(blocks);
        parents.push(parent);
        owner_prev = owner;
    }
    Ok(PartitionTree { levels, parents, names: b.names.clone() })
}

impl PartitionTree {
    pub fn n_max(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    pub fn block_of(&self, level: u32, ray: usize) -> usize {
        self.levels[level as usize]
            .iter()
            .position(|b| b.binary_search(&ray).is_ok())
            .expect("every ray is in a block")
    }

    fn children(&self, level: usize, block: usize) -> Vec<usize> {
        match self.parents.get(level + 1) {
            Some(p) => (0..p.len()).filter(|&c| p[c] == block).collect(),
            None => Vec::new(),
        }
    }

    /// Indented `block -> children` listing.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for b in 0..self.levels[0].len() {
            self.text_block(0, b, &mut out);
        }
        out
    }

    fn text_block(&self, level: usize, b: usize, out: &mut String) {
        let rays: Vec<&str> = self.levels[level][b].iter().map(|&r| self.names[r].as_str()).collect();
        writeln!(out, "{}n={level} block={b} rays=[{}]", "  ".repeat(level), rays.join(" ")).unwrap();
        for c in self.children(level, b) {
            self.text_block(level + 1, c, out);
        }
    }

    /// Newick string with one internal node per block, labelled `n<level>b<block>`.
    pub fn to_newick(&self) -> String {
        let roots: Vec<String> = (0..self.levels[0].len()).map(|b| self.newick_block(0, b)).collect();
        if roots.len() == 1 {
            format!("{};", roots[0])
        } else {
            format!("({});", roots.join(","))
        }
    }

    fn newick_block(&self, level: usize, b: usize) -> String {
        let kids = self.children(level, b);
        let label = format!("n{level}b{b}");
        if kids.is_empty() {
            let rays: Vec<String> = self.levels[level][b].iter().map(|&r| newick_label(&self.names[r])).collect();
            return format!("({}){label}", rays.join(","));
        }
        let inner: Vec<String> = kids.iter().map(|&c| self.newick_block(level + 1, c)).collect();
        format!("({}){label}", inner.join(","))
    }
}

fn newick_label(s: &str) -> String {
    if s.contains(|c: char| "(),:;'[] \t".contains(c)) {
        format!("'{}'", s.replace('\'', "''"))
    } else {
        s.to_string()
    }
}

/// The finite-scale content of zero-dimensionality for one partition tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroDimCertificate {
    pub block_counts: Vec<usize>,
    /// Blocks at every level are pairwise disjoint and cover all rays.
    pub order_one: bool,
    /// Blocks at safe levels holding at least two resolved points.
    pub safe_blocks: usize,
    /// Blocks at safe levels with two or more rays that all stand for one
    /// resolved point.
    pub frontier_blocks: usize,
    /// For each such block `(level, block)`, the number of further levels
    /// until its rays first fall into two blocks; `None` if that does not
    /// happen by `n_max`.
    pub splits: Vec<((u32, usize), Option<u32>)>,
    /// Largest split delay over the safe blocks when there are some and all
    /// of them split.
    pub perfect_scale: Option<u32>,
    pub rays: usize,
}

impl ZeroDimCertificate {
    pub fn perfect(&self) -> bool {
        self.rays >= 2 && self.perfect_scale.is_some()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("zero-dimensional certificate\n");
        writeln!(out, "rays: {}", self.rays).unwrap();
        writeln!(out, "order one: {}", self.order_one).unwrap();
        let counts: Vec<String> = self.block_counts.iter().map(usize::to_string).collect();
        writeln!(out, "blocks per level: {}", counts.join(" ")).unwrap();
        writeln!(out, "safe blocks with two or more rays: {}", self.safe_blocks).unwrap();
        writeln!(out, "frontier blocks: {}", self.frontier_blocks).unwrap();
        match (self.rays, self.perfect_scale) {
            (0 | 1, _) => out.push_str("perfect: no perfectness (single ray)\n"),
            (_, None) if self.safe_blocks == 0 => out.push_str("perfect: no safe blocks\n"),
            (_, Some(s)) => writeln!(out, "perfect at scale {s}").unwrap(),
            (_, None) => out.push_str("perfect: no\n"),
        }
        for ((n, b), s) in &self.splits {
            match s {
                Some(s) => writeln!(out, "  n={n} block={b} splits after {s}").unwrap(),
                None => writeln!(out, "  n={n} block={b} does not split").unwrap(),
            }
        }
        out
    }
}

/// Certifies order one and records the splitting profile of the blocks at
/// safe levels `n <= safe` (pass `R - margin`). Rays sharing a block at
/// level `floor(safe) + 1` are one resolved point; only blocks holding at
/// least two resolved points are profiled.
pub fn zero_dim_certificate(t: &PartitionTree, safe: Option<Length>) -> ZeroDimCertificate {
    let rays = t.names.len();
    let order_one = t.levels.iter().all(|blocks| {
        let mut seen = vec![false; rays];
        for &r in blocks.iter().flatten() {
            if std::mem::replace(&mut seen[r], true) {
                return false;
            }
        }
        seen.into_iter().all(|s| s)
    });
    let block_counts = t.levels.iter().map(Vec::len).collect();
    let mut splits = Vec::new();
    let mut frontier_blocks = 0;
    if let Some(safe) = safe.filter(|s| *s >= length::int(0)) {
        let top = length::floor_u32(&safe).min(t.n_max());
        let resolved = (top + 1).min(t.n_max());
        for n in 0..=top {
            for (b, rays_in) in t.levels[n as usize].iter().enumerate() {
                if rays_in.len() < 2 {
                    continue;
                }
                let first = rays_in[0];
                if rays_in.iter().all(|&r| t.block_of(resolved, r) == t.block_of(resolved, first)) {
                    frontier_blocks += 1;
                    continue;
                }
                let s = (n + 1..=t.n_max())
                    .find(|&m| rays_in.iter().any(|&r| t.block_of(m, r) != t.block_of(m, first)))
                    .map(|m| m - n);
                splits.push(((n, b), s));
            }
        }
    }
    let perfect_scale = if !splits.is_empty() && splits.iter().all(|(_, s)| s.is_some()) {
        splits.iter().filter_map(|(_, s)| *s).max()
    } else {
        None
    };
    ZeroDimCertificate { block_counts, order_one, safe_blocks: splits.len(), frontier_blocks, splits, perfect_scale, rays }
}

/// `floor(R - margin)`, the deepest level whose blocks are trusted.
pub fn safe_level(radius: &Length, margin: &Length) -> Option<u32> {
    let s = radius - margin;
    (s >= length::int(0)).then(|| length::floor_u32(&s))
}

/// Both isolation detectors on a fully augmented space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsolationReport {
    /// Replaced components away from the truncation frontier.
    pub considered: Vec<usize>,
    /// Centers whose level-`n_max` block only holds rays into their own
    /// horoball.
    pub by_partition: Vec<usize>,
    /// Components whose interior cut points lie within `rho` of the entry.
    pub by_criterion: Vec<usize>,
    pub level: u32,
    pub rho: Length,
    /// `n_max <= R - margin`.
    pub within_safe_region: bool,
}

impl IsolationReport {
    pub fn agree(&self) -> bool {
        self.by_partition == self.by_criterion
    }

    pub fn to_text(&self, z: &TreeOfSpaces) -> String {
        let names = |ks: &[usize]| ks.iter().map(|&k| z.component(k).name.clone()).collect::<Vec<_>>().join(" ");
        let mut out = String::from("isolated centers\n");
        writeln!(out, "level: {}", self.level).unwrap();
        writeln!(out, "rho: {}", length::fmt(&self.rho)).unwrap();
        writeln!(out, "within safe region: {}", self.within_safe_region).unwrap();
        writeln!(out, "considered: [{}]", names(&self.considered)).unwrap();
        writeln!(out, "partition detector: [{}]", names(&self.by_partition)).unwrap();
        writeln!(out, "criterion detector: [{}]", names(&self.by_criterion)).unwrap();
        writeln!(out, "agree: {}", self.agree()).unwrap();
        out
    }
}

/// Runs the partition detector at level `n_max` and the bounded-criterion
/// detector with radius `rho` on every replaced, non-frontier component.
pub fn isolated_centers(
    a: &AugmentedSpace,
    b: &BoundaryApprox,
    t: &PartitionTree,
    n_max: u32,
    rho: Length,
    margin: Length,
) -> Result<IsolationReport> {
    if a.level != 0 {
        return Err(Error::NotFullyAugmented(a.level));
    }
    if n_max > t.n_max() {
        return Err(Error::BadThreshold { n_max, radius: length::fmt(&b.radius) });
    }
    let z = &a.tree;
    let considered: Vec<usize> = a.replaced.iter().copied().filter(|&k| !z.component(k).frontier).collect();
    let mut by_partition = Vec::new();
    let mut by_criterion = Vec::new();
    for &k in &considered {
        if let Some(ci) = b.rays.iter().position(|r| r.center_of == Some(k)) {
            let block = &t.levels[n_max as usize][t.block_of(n_max, ci)];
            if block.iter().all(|&r| b.markers[r] == Some(k)) {
                by_partition.push(k);
            }
        }
        let base = &a.base.component(k).space;
        let entry = a.base.entry(k);
        let reach = a
            .base
            .interior_cut_points(k)
            .into_iter()
            .map(|p| base.distance(entry, p).expect("local vertices"))
            .max()
            .unwrap_or(length::int(0));
        if reach <= rho {
            by_criterion.push(k);
        }
    }
    let within_safe_region = safe_level(&b.radius, &margin).is_some_and(|s| n_max <= s);
    Ok(IsolationReport { considered, by_partition, by_criterion, level: n_max, rho, within_safe_region })
}

/// `(t, vertex)`: the last arclength at which the ray is in component `k`.
pub fn last_exit(z: &TreeOfSpaces, ray: &RayApprox, k: usize) -> Result<(Length, Vertex)> {
    let p = &ray.path;
    let i = (0..p.vertices().len())
        .rev()
        .find(|&i| z.local(k, p.vertices()[i]).is_some())
        .ok_or_else(|| Error::NeverMeets(z.component(k).name.clone()))?;
    Ok((z.space().ticks_to_length(p.arclengths()[i]), p.vertices()[i]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Retraction {
    /// Index of the chosen ray of the component boundary.
    pub ray: usize,
    pub block: usize,
    /// Last-exit vertex, assembled.
    pub exit: Vertex,
}

/// `s_k(ray)`: the ray of `boundary_k` with the largest product against the
/// component geodesic from its basepoint to the last-exit vertex, and that
/// ray's block at `level` of `tree_k`. Ties go to the smaller target id.
pub fn retract<C: Combing + ?Sized>(
    z: &TreeOfSpaces,
    k: usize,
    ray: &RayApprox,
    component: &C,
    boundary_k: &BoundaryApprox,
    tree_k: &PartitionTree,
    level: u32,
) -> Result<Retraction> {
    let (_, exit) = last_exit(z, ray, k)?;
    let local = z.local(k, exit).expect("exit lies in the component");
    let s = component.space();
    let e_k = boundary_k.rays.first().map(|r| r.basepoint).ok_or(Error::EmptySample)?;
    let g = component.path(e_k, local);
    let d1 = boundary_k.consts.d1 * length::int(s.scale());
    let ts = times(s, &boundary_k.radius);
    let mut best = (0u64, 0usize);
    for (j, r) in boundary_k.rays.iter().enumerate() {
        let p = product_ticks(s, &g, &r.path, &d1, &ts);
        if j == 0 || p > best.0 {
            best = (p, j);
        }
    }
    Ok(Retraction { ray: best.1, block: tree_k.block_of(level, best.1), exit })
}

/// `f(n) = min` of image products over ray pairs whose product is `>= n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuityModulus {
    pub levels: Vec<(u32, Option<Length>)>,
    /// `max n / f(n)` over levels with `f(n) > 0`; `None` when some
    /// `f(n) = 0` with `n >= 1`.
    pub constant: Option<Length>,
    pub monotone: bool,
}

pub fn continuity_modulus(b: &BoundaryApprox, images: &[usize], boundary_k: &BoundaryApprox, n_max: u32) -> ContinuityModulus {
    let n = b.len();
    let mut levels = Vec::new();
    for level in 0..=n_max {
        let thr = length::int(i64::from(level));
        let mut f: Option<Length> = None;
        for i in 0..n {
            for j in i + 1..n {
                if b.products[i][j] >= thr {
                    let v = boundary_k.products[images[i]][images[j]];
                    f = Some(f.map_or(v, |g| g.min(v)));
                }
            }
        }
        levels.push((level, f));
    }
    let defined: Vec<(u32, Length)> = levels.iter().filter_map(|(n, f)| f.map(|f| (*n, f))).collect();
    let monotone = defined.windows(2).all(|w| w[0].1 <= w[1].1);
    let mut constant = Some(length::int(1));
    for &(n, f) in &defined {
        if n == 0 {
            continue;
        }
        if f == length::int(0) {
            constant = None;
            break;
        }
        let ratio = length::int(i64::from(n)) / f;
        constant = constant.map(|c| c.max(ratio));
    }
    ContinuityModulus { levels, constant, monotone }
}
