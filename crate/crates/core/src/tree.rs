//! Trees of spaces: components glued at single cut points along a bipartite
//! tree, free products of pointed spaces, and augmented spaces in which
//! components are replaced by their glued horoballs.

use std::borrow::Cow;
use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::bicombing::{self, Combing, ConvexityParams, LexCombing, Report};
use crate::error::{Error, Result};
use crate::horoball::{HoroballGraph, NormalCombing};
use crate::length::{self, Length};
use crate::metric::{Path, Space, SpaceDoc, Vertex};
use crate::par::Mode;
use crate::sample::Sample;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TreeDoc {
    #[serde(rename = "K")]
    pub k: Vec<String>,
    #[serde(rename = "L")]
    pub l: Vec<String>,
    pub edges: Vec<(String, String)>,
}

/// Serialized tree of spaces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeOfSpacesDoc {
    pub components: BTreeMap<String, SpaceDoc>,
    pub tree: TreeDoc,
    pub cuts: BTreeMap<String, Vec<(String, String)>>,
    pub basepoint: (String, String),
}

pub fn load_tree(text: &str) -> Result<TreeOfSpaces> {
    let doc: TreeOfSpacesDoc = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
    TreeOfSpaces::from_doc(&doc)
}

#[derive(Clone, Debug)]
pub struct Component {
    pub name: String,
    pub space: Space,
    /// Set when the component is a glued horoball.
    pub horoball: Option<HoroballGraph>,
    /// Components cut off by free-product truncation.
    pub frontier: bool,
}

impl Component {
    fn plain(name: String, space: Space) -> Component {
        Component { name, space, horoball: None, frontier: false }
    }

    /// The component's own selector geodesic, in local vertices.
    pub fn geodesic(&self, x: Vertex, y: Vertex) -> Path {
        match &self.horoball {
            Some(h) => NormalCombing(h).path(x, y).into_owned(),
            None => LexCombing(&self.space).path(x, y).into_owned(),
        }
    }
}

/// A cut point: the gluing of one lattice vertex from each adjacent
/// component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    pub name: String,
    pub members: Vec<(usize, Vertex)>,
    pub vertex: Vertex,
}

impl Cut {
    /// Adjacent to at least two distinct components.
    pub fn interior(&self) -> bool {
        let mut ks: Vec<usize> = self.members.iter().map(|m| m.0).collect();
        ks.sort_unstable();
        ks.dedup();
        ks.len() >= 2
    }
}

/// Components ordered by name, cut points, and the assembled space.
#[derive(Clone, Debug)]
pub struct TreeOfSpaces {
    components: Vec<Component>,
    cuts: Vec<Cut>,
    /// Cut indices adjacent to each component.
    component_cuts: Vec<Vec<usize>>,
    space: Space,
    embed: Vec<Vec<Vertex>>,
    owners: Vec<Vec<(usize, Vertex)>>,
    basepoint: (usize, Vertex),
    /// `entry[k]`: the vertex of `k` closest to the basepoint, local.
    entry: Vec<Vertex>,
    /// BFS parent of every component in the tree rooted at the basepoint's
    /// component, as `(parent component, cut)`.
    parent: Vec<Option<(usize, usize)>>,
    depth: Vec<usize>,
}

impl TreeOfSpaces {
    pub fn from_doc(doc: &TreeOfSpacesDoc) -> Result<TreeOfSpaces> {
        let names: Vec<&String> = doc.tree.k.iter().collect();
        let kidx: HashMap<&str, usize> = {
            let mut sorted = names.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != names.len() {
                return Err(Error::Parse("duplicate K-node".into()));
            }
            sorted.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect()
        };
        let lset: HashMap<&str, usize> = doc.tree.l.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        if lset.len() != doc.tree.l.len() {
            return Err(Error::Parse("duplicate L-node".into()));
        }
        for l in &doc.tree.l {
            if kidx.contains_key(l.as_str()) {
                return Err(Error::NotBipartite(format!("{l:?} is both a K-node and an L-node")));
            }
        }
        for name in doc.components.keys() {
            if !kidx.contains_key(name.as_str()) {
                return Err(Error::DisconnectedAssembly(format!("component {name:?} is not a K-node of the tree")));
            }
        }
        let mut ordered: Vec<&String> = doc.tree.k.iter().collect();
        ordered.sort();
        let mut components = Vec::with_capacity(ordered.len());
        for name in &ordered {
            let sd = doc
                .components
                .get(*name)
                .ok_or_else(|| Error::UnknownVertex(format!("K-node {name:?} has no component")))?;
            components.push(Component::plain((*name).clone(), Space::from_doc(sd)?));
        }

        // tree edges
        let nk = ordered.len();
        let nl = doc.tree.l.len();
        let mut l_adj: Vec<Vec<usize>> = vec![Vec::new(); nl];
        for (a, b) in &doc.tree.edges {
            let (k, l) = match (kidx.get(a.as_str()), lset.get(b.as_str()), kidx.get(b.as_str()), lset.get(a.as_str())) {
                (Some(&k), Some(&l), _, _) | (_, _, Some(&k), Some(&l)) => (k, l),
                (Some(_), _, Some(_), _) | (_, Some(_), _, Some(_)) => {
                    return Err(Error::NotBipartite(format!("edge {a:?} - {b:?} joins two nodes of one class")))
                }
                _ => return Err(Error::UnknownVertex(format!("tree edge {a:?} - {b:?} names an unknown node"))),
            };
            if l_adj[l].contains(&k) {
                return Err(Error::NotBipartite(format!("edge {a:?} - {b:?} is repeated")));
            }
            l_adj[l].push(k);
        }
        let edge_count: usize = l_adj.iter().map(Vec::len).sum();
        if edge_count + 1 != nk + nl {
            // a connected graph with this many edges has a cycle, or the
            // graph is disconnected
            let connected = tree_connected(nk, &l_adj);
            return Err(if connected {
                Error::NotBipartite("the tree has a cycle".into())
            } else {
                Error::DisconnectedAssembly("the tree is disconnected".into())
            });
        }
        if !tree_connected(nk, &l_adj) {
            return Err(Error::DisconnectedAssembly("the tree is disconnected".into()));
        }

        let mut cuts = Vec::with_capacity(nl);
        for (li, lname) in doc.tree.l.iter().enumerate() {
            let list = doc.cuts.get(lname).map(Vec::as_slice).unwrap_or(&[]);
            let mut members = Vec::with_capacity(list.len());
            for (kname, vid) in list {
                let k = *kidx
                    .get(kname.as_str())
                    .ok_or_else(|| Error::UnknownVertex(format!("cut {lname:?} names unknown component {kname:?}")))?;
                let sp = &components[k].space;
                let v = sp.vertex(vid)?;
                if !sp.in_lattice(v) {
                    return Err(Error::CutNotInLattice { component: kname.clone(), vertex: vid.clone() });
                }
                members.push((k, v));
            }
            let mut listed: Vec<usize> = members.iter().map(|m| m.0).collect();
            listed.sort_unstable();
            let mut adj = l_adj[li].clone();
            adj.sort_unstable();
            if listed != adj {
                return Err(Error::NotBipartite(format!(
                    "cut list of {lname:?} must name each adjacent component exactly once"
                )));
            }
            cuts.push(Cut { name: lname.clone(), members, vertex: Vertex(0) });
        }
        for l in doc.cuts.keys() {
            if !lset.contains_key(l.as_str()) {
                return Err(Error::UnknownVertex(format!("cuts name unknown L-node {l:?}")));
            }
        }
        let bk = *kidx
            .get(doc.basepoint.0.as_str())
            .ok_or_else(|| Error::MissingBasepoint(format!("unknown component {:?}", doc.basepoint.0)))?;
        let bv = components[bk]
            .space
            .vertex(&doc.basepoint.1)
            .map_err(|_| Error::MissingBasepoint(format!("{}:{}", doc.basepoint.0, doc.basepoint.1)))?;
        TreeOfSpaces::assemble(components, cuts, (bk, bv))
    }

    /// Glues components along `cuts`. Cut vertices are named after their
    /// first member.
    pub fn assemble(components: Vec<Component>, mut cuts: Vec<Cut>, basepoint: (usize, Vertex)) -> Result<TreeOfSpaces> {
        let nk = components.len();
        // union cut members into one assembled vertex
        let mut glued: HashMap<(usize, Vertex), usize> = HashMap::new();
        for (ci, cut) in cuts.iter().enumerate() {
            for &m in &cut.members {
                if glued.insert(m, ci).is_some() {
                    return Err(Error::NotBipartite(format!(
                        "vertex {}:{} is glued by two cuts",
                        components[m.0].name,
                        components[m.0].space.id(m.1)
                    )));
                }
            }
        }
        let mut ids: Vec<String> = Vec::new();
        let mut owners: Vec<Vec<(usize, Vertex)>> = Vec::new();
        let mut embed: Vec<Vec<Vertex>> = Vec::with_capacity(nk);
        let mut cut_vertex: Vec<Option<Vertex>> = vec![None; cuts.len()];
        for (k, comp) in components.iter().enumerate() {
            let mut row = Vec::with_capacity(comp.space.len());
            for v in comp.space.vertices() {
                let here = match glued.get(&(k, v)) {
                    Some(&ci) => match cut_vertex[ci] {
                        Some(w) => {
                            owners[w.ix()].push((k, v));
                            w
                        }
                        None => {
                            let w = Vertex::from(ids.len());
                            let (k0, v0) = cuts[ci].members[0];
                            ids.push(format!("{}:{}", components[k0].name, components[k0].space.id(v0)));
                            owners.push(vec![(k, v)]);
                            cut_vertex[ci] = Some(w);
                            w
                        }
                    },
                    None => {
                        let w = Vertex::from(ids.len());
                        ids.push(format!("{}:{}", comp.name, comp.space.id(v)));
                        owners.push(vec![(k, v)]);
                        w
                    }
                };
                row.push(here);
            }
            embed.push(row);
        }
        for (cut, v) in cuts.iter_mut().zip(&cut_vertex) {
            cut.vertex = v.expect("every cut has members");
        }
        let mut edges = Vec::new();
        let mut lattice = Vec::new();
        for (k, comp) in components.iter().enumerate() {
            for (u, v, l) in comp.space.edges() {
                edges.push((embed[k][u.ix()], embed[k][v.ix()], l));
            }
            lattice.extend(comp.space.lattice().iter().map(|v| embed[k][v.ix()]));
        }
        lattice.sort_unstable();
        lattice.dedup();
        let name = if nk == 1 { components[0].name.clone() } else { "assembled".to_string() };
        let space = Space::from_parts(name, ids, edges, lattice, embed[basepoint.0][basepoint.1.ix()])
            .map_err(|e| match e {
                Error::Disconnected(m) => Error::DisconnectedAssembly(m),
                other => other,
            })?;

        let mut component_cuts = vec![Vec::new(); nk];
        for (ci, cut) in cuts.iter().enumerate() {
            for &(k, _) in &cut.members {
                component_cuts[k].push(ci);
            }
        }
        // BFS over components from the basepoint's component
        let mut parent = vec![None; nk];
        let mut depth = vec![usize::MAX; nk];
        let mut entry = vec![Vertex(0); nk];
        depth[basepoint.0] = 0;
        entry[basepoint.0] = basepoint.1;
        let mut queue = VecDeque::from([basepoint.0]);
        while let Some(k) = queue.pop_front() {
            for &ci in &component_cuts[k] {
                for &(j, v) in &cuts[ci].members {
                    if depth[j] == usize::MAX {
                        depth[j] = depth[k] + 1;
                        parent[j] = Some((k, ci));
                        entry[j] = v;
                        queue.push_back(j);
                    }
                }
            }
        }
        if let Some(k) = depth.iter().position(|d| *d == usize::MAX) {
            return Err(Error::DisconnectedAssembly(format!("component {:?} is not reachable", components[k].name)));
        }
        Ok(TreeOfSpaces { components, cuts, component_cuts, space, embed, owners, basepoint, entry, parent, depth })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component(&self, k: usize) -> &Component {
        &self.components[k]
    }

    pub fn component_index(&self, name: &str) -> Option<usize> {
        self.components.binary_search_by(|c| c.name.as_str().cmp(name)).ok()
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    /// Cuts adjacent to at least two components.
    pub fn interior_cuts(&self) -> Vec<&Cut> {
        self.cuts.iter().filter(|c| c.interior()).collect()
    }

    pub fn basepoint(&self) -> (usize, Vertex) {
        self.basepoint
    }

    /// Assembled vertex of local vertex `v` of component `k`.
    pub fn embed(&self, k: usize, v: Vertex) -> Vertex {
        self.embed[k][v.ix()]
    }

    /// `(component, local vertex)` pairs of an assembled vertex.
    pub fn owners(&self, v: Vertex) -> &[(usize, Vertex)] {
        &self.owners[v.ix()]
    }

    pub fn local(&self, k: usize, v: Vertex) -> Option<Vertex> {
        self.owners[v.ix()].iter().find(|o| o.0 == k).map(|o| o.1)
    }

    /// Local vertex of `k` nearest the basepoint.
    pub fn entry(&self, k: usize) -> Vertex {
        self.entry[k]
    }

    /// Distance in the tree of components from the basepoint's component.
    pub fn component_depth(&self, k: usize) -> usize {
        self.depth[k]
    }

    /// Cut points of `k` that lie in interior cuts, as local vertices.
    pub fn interior_cut_points(&self, k: usize) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = self.component_cuts[k]
            .iter()
            .filter(|&&ci| self.cuts[ci].interior())
            .flat_map(|&ci| self.cuts[ci].members.iter().filter(|m| m.0 == k).map(|m| m.1))
            .collect();
        out.sort_unstable();
        out
    }

    /// Component sequence of the tree path from `a` to `b`, with the cut
    /// crossed between consecutive components.
    fn component_path(&self, a: usize, b: usize) -> (Vec<usize>, Vec<usize>) {
        let up = |mut k: usize| {
            let mut chain = vec![k];
            while let Some((p, _)) = self.parent[k] {
                chain.push(p);
                k = p;
            }
            chain
        };
        let (ca, cb) = (up(a), up(b));
        let (ia, ib) = ca
            .iter()
            .enumerate()
            .find_map(|(i, k)| cb.iter().position(|j| j == k).map(|j| (i, j)))
            .expect("components share the root");
        let mut comps: Vec<usize> = ca[..=ia].to_vec();
        comps.extend(cb[..ib].iter().rev());
        let via = comps
            .windows(2)
            .map(|w| {
                let (x, y) = (w[0], w[1]);
                match (self.parent[x], self.parent[y]) {
                    (Some((p, ci)), _) if p == y => ci,
                    (_, Some((p, ci))) if p == x => ci,
                    _ => unreachable!("consecutive components are adjacent"),
                }
            })
            .collect();
        (comps, via)
    }

    /// Geodesic through the cut points separating the components of `u`
    /// and `v`, made of component geodesics.
    pub fn tree_geodesic(&self, u: Vertex, v: Vertex) -> Result<Path> {
        self.space.check_vertex(u)?;
        self.space.check_vertex(v)?;
        Ok(self.tree_geodesic_unchecked(u, v))
    }

    fn tree_geodesic_unchecked(&self, u: Vertex, v: Vertex) -> Path {
        let mut best: Option<(Vec<usize>, Vec<usize>, Vertex, Vertex)> = None;
        for &(ku, lu) in self.owners(u) {
            for &(kv, lv) in self.owners(v) {
                let (comps, via) = self.component_path(ku, kv);
                if best.as_ref().is_none_or(|b| comps.len() < b.0.len()) {
                    best = Some((comps, via, lu, lv));
                }
            }
        }
        let (comps, via, lu, lv) = best.expect("vertices have owners");
        let mut from = lu;
        let mut out: Option<Path> = None;
        for (i, &k) in comps.iter().enumerate() {
            let to = match via.get(i) {
                Some(&ci) => self.cuts[ci].members.iter().find(|m| m.0 == k).unwrap().1,
                None => lv,
            };
            let local = self.components[k].geodesic(from, to);
            let mapped = self.lift(k, &local);
            out = Some(match out {
                None => mapped,
                Some(p) => p.concat(&mapped),
            });
            if let Some(&ci) = via.get(i) {
                let next = comps[i + 1];
                from = self.cuts[ci].members.iter().find(|m| m.0 == next).unwrap().1;
            }
        }
        out.unwrap()
    }

    /// A path of component `k` in assembled vertices.
    pub fn lift(&self, k: usize, p: &Path) -> Path {
        let verts = p.vertices().iter().map(|v| self.embed[k][v.ix()]).collect();
        let factor = self.space.scale() / p.scale();
        let arc = p.arclengths().iter().map(|a| a * factor as u64).collect();
        Path::from_parts(verts, arc, self.space.scale())
    }

    /// Whether every vertex of `p` belongs to component `k`.
    pub fn path_in(&self, k: usize, p: &Path) -> bool {
        p.vertices().iter().all(|v| self.local(k, *v).is_some())
    }
}

fn tree_connected(nk: usize, l_adj: &[Vec<usize>]) -> bool {
    let n = nk + l_adj.len();
    if n == 0 {
        return false;
    }
    let mut adj = vec![Vec::new(); n];
    for (l, ks) in l_adj.iter().enumerate() {
        for &k in ks {
            adj[k].push(nk + l);
            adj[nk + l].push(k);
        }
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &w in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// The bicombing of a tree of spaces by cut-point concatenation.
#[derive(Clone, Copy, Debug)]
pub struct TreeCombing<'a>(pub &'a TreeOfSpaces);

impl Combing for TreeCombing<'_> {
    fn space(&self) -> &Space {
        &self.0.space
    }

    fn path(&self, x: Vertex, y: Vertex) -> Cow<'_, Path> {
        Cow::Owned(self.0.tree_geodesic_unchecked(x, y))
    }
}

/// Free product of pointed spaces `X * Y`, truncated at `word_depth`.
///
/// The root copy `X` carries a copy of `Y` at each of its lattice points;
/// each further copy carries copies of the other space at each of its
/// lattice points except its own basepoint. Copies are named by their word:
/// `X`, `X.p`, `X.p.q` where `p`, `q` are the gluing points. With
/// `truncate_radius`, copies whose gluing point is farther than the radius
/// from the basepoint are dropped.
pub fn free_product(x: &Space, y: &Space, word_depth: u32, truncate_radius: Option<Length>) -> Result<TreeOfSpaces> {
    if word_depth < 1 {
        return Err(Error::BadDepth(word_depth));
    }
    let scale = num_integer::lcm(x.scale(), y.scale());
    let radius = truncate_radius.map(|r| r * length::int(scale));
    let spaces = [x, y];
    struct Pending {
        name: String,
        which: usize,
        depth: u32,
        /// Ticks at the common scale from the basepoint to this copy's
        /// basepoint.
        offset: Length,
        parent: Option<(usize, Vertex)>,
    }
    // name, source space, frontier flag, parent attachment
    type Row = (String, usize, bool, Option<(usize, Vertex)>);
    let mut comps: Vec<Row> = Vec::new();
    let mut queue = VecDeque::from([Pending { name: x.name().to_string(), which: 0, depth: 0, offset: length::int(0), parent: None }]);
    let name_of = |s: &Space, v: Vertex| s.id(v).to_string();
    while let Some(p) = queue.pop_front() {
        let here = comps.len();
        let sp = spaces[p.which];
        comps.push((p.name.clone(), p.which, p.depth == word_depth, p.parent));
        if p.depth == word_depth {
            continue;
        }
        let other = 1 - p.which;
        let unit = length::int(scale / sp.scale());
        for &v in sp.lattice() {
            if p.parent.is_some() && v == sp.basepoint() {
                continue;
            }
            let offset = p.offset + length::int(sp.dist_ticks(sp.basepoint(), v) as i64) * unit;
            if radius.is_some_and(|r| offset > r) {
                continue;
            }
            queue.push_back(Pending {
                name: format!("{}.{}", p.name, name_of(sp, v)),
                which: other,
                depth: p.depth + 1,
                offset,
                parent: Some((here, v)),
            });
        }
    }
    // order components by name, remapping parents
    let mut order: Vec<usize> = (0..comps.len()).collect();
    order.sort_by(|a, b| comps[*a].0.cmp(&comps[*b].0));
    let mut rank = vec![0; comps.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let mut components = Vec::with_capacity(comps.len());
    let mut cuts = Vec::new();
    for &i in &order {
        let (name, which, frontier, _) = &comps[i];
        components.push(Component { name: name.clone(), space: spaces[*which].clone(), horoball: None, frontier: *frontier });
    }
    for (i, (_, which, _, parent)) in comps.iter().enumerate() {
        if let Some((pi, v)) = parent {
            let child_base = spaces[*which].basepoint();
            cuts.push(Cut {
                name: format!("{}@{}", comps[*pi].0, name_of(spaces[comps[*pi].1], *v)),
                members: vec![(rank[*pi], *v), (rank[i], child_base)],
                vertex: Vertex(0),
            });
        }
    }
    cuts.sort_by(|a, b| a.name.cmp(&b.name));
    let root = rank[0];
    TreeOfSpaces::assemble(components, cuts, (root, x.basepoint()))
}

/// A tree of spaces with the components of index `> n` (1-based, in name
/// order) replaced by glued horoballs.
#[derive(Clone, Debug)]
pub struct AugmentedSpace {
    pub tree: TreeOfSpaces,
    /// The tree before augmentation.
    pub base: TreeOfSpaces,
    pub level: usize,
    pub depth_max: u32,
    /// Indices of replaced components.
    pub replaced: Vec<usize>,
}

impl AugmentedSpace {
    /// Deepest-layer vertices of a replaced component, assembled.
    pub fn center_layer(&self, k: usize) -> Vec<Vertex> {
        match &self.tree.components[k].horoball {
            Some(h) => h.top_layer().into_iter().map(|v| self.tree.embed(k, v)).collect(),
            None => Vec::new(),
        }
    }

    /// The center marker of `k`: the deepest-layer vertex closest to the
    /// basepoint, ties to the smaller index.
    pub fn center(&self, k: usize) -> Option<Vertex> {
        let s = self.tree.space();
        let e = s.basepoint();
        self.center_layer(k).into_iter().min_by_key(|v| (s.dist_ticks(e, *v), *v))
    }

    /// Replaced component whose horoball contains `v` strictly above depth 0.
    pub fn marker(&self, v: Vertex) -> Option<usize> {
        self.tree.owners(v).iter().find_map(|&(k, local)| {
            let h = self.tree.components[k].horoball.as_ref()?;
            (h.depth(local) >= 1).then_some(k)
        })
    }
}

/// Replaces components `k(i)` with `i > n` by glued horoballs of depth
/// `depth_max`; `n = 0` gives the fully augmented space.
pub fn augment(z: &TreeOfSpaces, n: usize, depth_max: u32) -> Result<AugmentedSpace> {
    let count = z.components.len();
    if n > count {
        return Err(Error::BadLevel { level: n, components: count });
    }
    let mut components = z.components.clone();
    let mut replaced = Vec::new();
    for (i, comp) in components.iter_mut().enumerate() {
        if i + 1 > n {
            let h = HoroballGraph::build(&comp.space, depth_max, true)?;
            comp.space = h.space().clone();
            comp.horoball = Some(h);
            replaced.push(i);
        }
    }
    let tree = TreeOfSpaces::assemble(components, z.cuts.clone(), z.basepoint)?;
    Ok(AugmentedSpace { tree, base: z.clone(), level: n, depth_max, replaced })
}

/// Per-component fits and the assembled certificate.
#[derive(Clone, Debug)]
pub struct TransferReport {
    pub component_params: Vec<ConvexityParams>,
    /// `(E', C')`: the largest `E` and `C` over the components.
    pub component_bound: ConvexityParams,
    pub assembled: ConvexityParams,
    pub report: Report<bicombing::ConvexityViolation>,
}

/// Fits `(E', C')` on every component, then checks the assembled bicombing
/// at `(E' + 2, 6 C')` with the quantization slack.
pub fn check_ec_transfer(
    z: &TreeOfSpaces,
    component_sample: Sample,
    assembled_sample: Sample,
    grid: &[Length],
    e_grid: &[Length],
    mode: Mode,
) -> Result<TransferReport> {
    let mut params = Vec::new();
    let mut seen: HashMap<String, ConvexityParams> = HashMap::new();
    for comp in &z.components {
        // copies of one space share a fit
        let key = format!("{:?}", comp.space.to_doc());
        if let Some(p) = seen.get(&key) {
            params.push(*p);
            continue;
        }
        let slack = length::int(2) * comp.space.max_edge();
        let fit = match &comp.horoball {
            Some(h) => bicombing::fit_constants(&NormalCombing(h), component_sample, grid, e_grid, slack, mode)?,
            None => bicombing::fit_constants(&LexCombing(&comp.space), component_sample, grid, e_grid, slack, mode)?,
        };
        seen.insert(key, fit.best);
        params.push(fit.best);
    }
    let e1 = params.iter().map(|p| p.e).max().expect("at least one component");
    let c1 = params.iter().map(|p| p.c).max().expect("at least one component");
    let component_bound = ConvexityParams { e: e1, c: c1 };
    let assembled = ConvexityParams { e: e1 + length::int(2), c: length::int(6) * c1 };
    let slack = length::int(2) * z.space.max_edge();
    let report = bicombing::check_convexity(&TreeCombing(z), assembled, assembled_sample, grid, slack, mode)?;
    Ok(TransferReport { component_params: params, component_bound, assembled, report })
}
