//! Geodesic bicombings, convexity certificates and Gromov products.

use std::borrow::Cow;
use std::fmt;

use crate::error::{Error, Result};
use crate::length::{self, Length};
use crate::metric::{Path, Space, Vertex};
use crate::par::{self, Mode};
use crate::sample::Sample;

/// A deterministic choice of geodesic between every pair of points of a
/// host space.
pub trait Combing: Sync {
    fn space(&self) -> &Space;

    /// The selected geodesic from `x` to `y`.
    fn path(&self, x: Vertex, y: Vertex) -> Cow<'_, Path>;
}

impl<C: Combing + ?Sized> Combing for &C {
    fn space(&self) -> &Space {
        (**self).space()
    }

    fn path(&self, x: Vertex, y: Vertex) -> Cow<'_, Path> {
        (**self).path(x, y)
    }
}

/// The lexicographically minimal geodesics of a space.
#[derive(Clone, Copy, Debug)]
pub struct LexCombing<'a>(pub &'a Space);

impl Combing for LexCombing<'_> {
    fn space(&self) -> &Space {
        self.0
    }

    fn path(&self, x: Vertex, y: Vertex) -> Cow<'_, Path> {
        Cow::Owned(self.0.geodesic_unchecked(x, y))
    }
}

/// Every selected path of a combing, computed once.
pub struct PathTable<'a> {
    space: &'a Space,
    paths: Vec<Path>,
}

impl<'a> PathTable<'a> {
    pub fn new<C: Combing>(combing: &'a C, mode: Mode) -> PathTable<'a> {
        let space = combing.space();
        let n = space.len();
        let paths = par::map(mode, n * n, |i| {
            combing
                .path(Vertex::from(i / n), Vertex::from(i % n))
                .into_owned()
        });
        PathTable { space, paths }
    }
}

impl Combing for PathTable<'_> {
    fn space(&self) -> &Space {
        self.space
    }

    fn path(&self, x: Vertex, y: Vertex) -> Cow<'_, Path> {
        Cow::Borrowed(&self.paths[x.ix() * self.space.len() + y.ix()])
    }
}

/// Point of the selected geodesic at parameter `t` in `[0, 1]`, quantized
/// to the nearest path vertex.
pub fn eval<C: Combing + ?Sized>(combing: &C, x: Vertex, y: Vertex, t: &Length) -> Vertex {
    combing.path(x, y).at_fraction(t)
}

/// Arclength parametrization: the point at distance `min(t, d(x, y))` from
/// `x` along the selected geodesic.
pub fn reparametrize<C: Combing + ?Sized>(combing: &C, x: Vertex, y: Vertex, t: &Length) -> Result<Vertex> {
    let s = combing.space();
    s.check_vertex(x)?;
    s.check_vertex(y)?;
    if *t < length::int(0) {
        return Err(Error::BadParams(format!("negative time {}", length::fmt(t))));
    }
    Ok(combing.path(x, y).at_length(t))
}

/// `(E, C)` of the convexity inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConvexityParams {
    pub e: Length,
    pub c: Length,
}

impl ConvexityParams {
    pub fn new(e: Length, c: Length) -> Result<ConvexityParams> {
        if e < length::int(1) || c < length::int(0) {
            return Err(Error::BadParams(format!(
                "need E >= 1 and C >= 0, got E={} C={}",
                length::fmt(&e),
                length::fmt(&c)
            )));
        }
        Ok(ConvexityParams { e, c })
    }
}

impl fmt::Display for ConvexityParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E={} C={}", length::fmt(&self.e), length::fmt(&self.c))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GromovConstants {
    pub lambda: Length,
    pub k: Length,
    pub e: Length,
    pub c: Length,
    pub k1: Length,
    pub d: Length,
    pub d1: Length,
    pub d2: Length,
}

/// `k1 = lambda + k`, `D = 2(1 + E)k1 + C`, `D1 = 2D + 2`,
/// `D2 = E(D1 + 2k1)`.
pub fn derive_constants(lambda: Length, k: Length, e: Length, c: Length) -> Result<GromovConstants> {
    let zero = length::int(0);
    let one = length::int(1);
    if lambda < one || k < zero || e < one || c < zero {
        return Err(Error::BadParams(format!(
            "need lambda >= 1, k >= 0, E >= 1, C >= 0, got {}, {}, {}, {}",
            length::fmt(&lambda),
            length::fmt(&k),
            length::fmt(&e),
            length::fmt(&c)
        )));
    }
    let two = length::int(2);
    let k1 = lambda + k;
    let d = two * (one + e) * k1 + c;
    let d1 = two * d + two;
    let d2 = e * (d1 + two * k1);
    Ok(GromovConstants { lambda, k, e, c, k1, d, d1, d2 })
}

impl GromovConstants {
    /// Constants of a geodesic bicombing with the given convexity parameters.
    pub fn geodesic(p: ConvexityParams) -> GromovConstants {
        derive_constants(length::int(1), length::int(0), p.e, p.c).expect("params are validated")
    }
}

impl fmt::Display for GromovConstants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "lambda={} k={} E={} C={} k1={} D={} D1={} D2={}",
            length::fmt(&self.lambda),
            length::fmt(&self.k),
            length::fmt(&self.e),
            length::fmt(&self.c),
            length::fmt(&self.k1),
            length::fmt(&self.d),
            length::fmt(&self.d1),
            length::fmt(&self.d2)
        )
    }
}

/// Outcome of a certificate run: how many tuples were checked and which
/// failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report<V> {
    pub checked: usize,
    pub violations: Vec<V>,
}

impl<V> Report<V> {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl<V: fmt::Display> Report<V> {
    pub fn to_text(&self, title: &str) -> String {
        let mut out = format!(
            "{title}\nchecked: {}\nviolations: {}\nstatus: {}\n",
            self.checked,
            self.violations.len(),
            if self.is_clean() { "pass" } else { "fail" }
        );
        for v in &self.violations {
            out.push_str("  ");
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }
}

/// The default parameter grid `{0, 1/4, 1/2, 3/4, 1}`.
pub fn quarter_grid() -> Vec<Length> {
    (0..=4).map(|i| Length::new(i, 4)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexityViolation {
    pub x1: Vertex,
    pub x2: Vertex,
    pub y1: Vertex,
    pub y2: Vertex,
    pub a: Length,
    pub b: Length,
    pub c: Length,
    pub lhs: Length,
    pub rhs: Length,
    pub slack: Length,
}

impl fmt::Display for ConvexityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "x1={} x2={} y1={} y2={} a={} b={} c={} lhs={} rhs={} slack={}",
            self.x1.0,
            self.x2.0,
            self.y1.0,
            self.y2.0,
            length::fmt(&self.a),
            length::fmt(&self.b),
            length::fmt(&self.c),
            length::fmt(&self.lhs),
            length::fmt(&self.rhs),
            length::fmt(&self.slack)
        )
    }
}

/// One evaluated instance of the convexity inequality, in ticks:
/// `lhs <= (1 - c) E d + c E d' + C + slack` with `w = (1 - c) d + c d'`.
struct Instance {
    quad: [u32; 4],
    ai: usize,
    bi: usize,
    ci: usize,
    lhs: u64,
    d: u64,
    d_prime: u64,
}

/// Paths of a combing, cached when many lookups repeat.
fn cached<'a, C: Combing>(combing: &'a C, lookups: usize, mode: Mode) -> Option<PathTable<'a>> {
    let n = combing.space().len();
    (lookups > n * n).then(|| PathTable::new(combing, mode))
}

fn for_each_instance<C: Combing, F>(combing: &C, quad: [u32; 4], grid: &[Length], mut f: F)
where
    F: FnMut(Instance),
{
    let s = combing.space();
    let [x1, x2, y1, y2] = quad.map(Vertex);
    let p1 = combing.path(x1, y1);
    let p2 = combing.path(x2, y2);
    let d = s.dist_ticks(x1, x2);
    let g = grid.len();
    // at[i * g + j] = point at fraction grid[i] * grid[j]
    let table = |p: &Path| -> Vec<Vertex> {
        let mut v = Vec::with_capacity(g * g);
        for ti in grid {
            for tj in grid {
                v.push(p.at_fraction(&(ti * tj)));
            }
        }
        v
    };
    let (t1, t2) = (table(p1.as_ref()), table(p2.as_ref()));
    let one = grid.iter().position(|t| *t == length::int(1));
    for ai in 0..g {
        let y1p = one.map_or_else(|| p1.at_fraction(&grid[ai]), |o| t1[o * g + ai]);
        for bi in 0..g {
            let y2p = one.map_or_else(|| p2.at_fraction(&grid[bi]), |o| t2[o * g + bi]);
            let d_prime = s.dist_ticks(y1p, y2p);
            for ci in 0..g {
                let lhs = s.dist_ticks(t1[ci * g + ai], t2[ci * g + bi]);
                f(Instance { quad, ai, bi, ci, lhs, d, d_prime });
            }
        }
    }
}

fn weight(inst: &Instance, grid: &[Length]) -> Length {
    let c = grid[inst.ci];
    (length::int(1) - c) * length::int(inst.d as i64) + c * length::int(inst.d_prime as i64)
}

/// Checks `d(g(x1,y1,ca), g(x2,y2,cb)) <= (1-c) E d(x1,x2) + c E d(y1',y2') + C`
/// with `y1' = g(x1,y1,a)`, `y2' = g(x2,y2,b)` and `a, b, c` from `grid`.
/// A tuple violates only when it exceeds the right side by more than
/// `slack`.
pub fn check_convexity<C: Combing>(
    combing: &C,
    params: ConvexityParams,
    quadruples: Sample,
    grid: &[Length],
    slack: Length,
    mode: Mode,
) -> Result<Report<ConvexityViolation>> {
    if grid.is_empty() {
        return Err(Error::EmptySample);
    }
    let s = combing.space();
    let quads = quadruples.tuples::<4>(s.len())?;
    let table = cached(combing, quads.len() * 2, mode);
    let paths: &dyn Combing = match &table {
        Some(t) => t,
        None => combing,
    };
    let scale = length::int(s.scale());
    let c_ticks = params.c * scale;
    let slack_ticks = slack * scale;
    let violations = par::flat_map(mode, quads.len(), |qi| {
        let mut out = Vec::new();
        for_each_instance(&paths, quads[qi], grid, |inst| {
            let rhs = params.e * weight(&inst, grid) + c_ticks;
            let lhs = length::int(inst.lhs as i64);
            if lhs > rhs + slack_ticks {
                let [x1, x2, y1, y2] = inst.quad.map(Vertex);
                out.push(ConvexityViolation {
                    x1,
                    x2,
                    y1,
                    y2,
                    a: grid[inst.ai],
                    b: grid[inst.bi],
                    c: grid[inst.ci],
                    lhs: lhs / scale,
                    rhs: rhs / scale,
                    slack,
                });
            }
        });
        out
    });
    let per_quad = grid.len().pow(3);
    Ok(Report { checked: quads.len() * per_quad, violations })
}

/// Minimal `C` for every `E` in `e_grid`, exact on the sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexityFit {
    pub best: ConvexityParams,
    pub curve: Vec<ConvexityParams>,
}

/// `{1, 3/2, 2, ..., e_max}`.
pub fn e_grid(e_max: Length) -> Vec<Length> {
    let mut out = Vec::new();
    let mut e = length::int(1);
    while e <= e_max {
        out.push(e);
        e += Length::new(1, 2);
    }
    out
}

/// For each `E` of `e_grid` computes the least `C >= 0` for which
/// [`check_convexity`] is clean on the sample, then reports the least `C`
/// overall, ties going to the smaller `E`.
pub fn fit_constants<C: Combing>(
    combing: &C,
    quadruples: Sample,
    grid: &[Length],
    e_grid: &[Length],
    slack: Length,
    mode: Mode,
) -> Result<ConvexityFit> {
    if grid.is_empty() || e_grid.is_empty() {
        return Err(Error::EmptySample);
    }
    let s = combing.space();
    let quads = quadruples.tuples::<4>(s.len())?;
    let table = cached(combing, quads.len() * 2, mode);
    let paths: &dyn Combing = match &table {
        Some(t) => t,
        None => combing,
    };
    let scale = length::int(s.scale());
    let slack_ticks = slack * scale;
    let zero = length::int(0);
    let excess = par::fold(
        mode,
        quads.len(),
        || vec![zero; e_grid.len()],
        |mut acc, qi| {
            for_each_instance(&paths, quads[qi], grid, |inst| {
                let w = weight(&inst, grid);
                let lhs = length::int(inst.lhs as i64) - slack_ticks;
                for (slot, e) in acc.iter_mut().zip(e_grid) {
                    let ex = lhs - e * w;
                    if ex > *slot {
                        *slot = ex;
                    }
                }
            });
            acc
        },
        |a, b| a.into_iter().zip(b).map(|(x, y)| x.max(y)).collect(),
    );
    let curve: Vec<ConvexityParams> = e_grid
        .iter()
        .zip(excess)
        .map(|(e, ex)| ConvexityParams { e: *e, c: ex / scale })
        .collect();
    let best = *curve
        .iter()
        .min_by(|p, q| p.c.cmp(&q.c).then(p.e.cmp(&q.e)))
        .expect("grid is nonempty");
    Ok(ConvexityFit { best, curve })
}

/// Largest integer `t <= t_max` (in units) at which the two paths, read at
/// arclength `t`, are within `d1` ticks; `None` means the condition still
/// holds at `t_max`.
pub(crate) fn last_close(space: &Space, p: &Path, q: &Path, d1: &Length, t_max: u64) -> Option<u64> {
    let scale = space.scale() as u64;
    let close = |t: u64| {
        let d = length::int(space.dist_ticks(p.at_ticks(t * scale), q.at_ticks(t * scale)) as i64);
        d <= *d1 * length::int(scale as i64)
    };
    if close(t_max) {
        return None;
    }
    (0..t_max).rev().find(|&t| close(t))
}

/// `(x | y)_e`: the minimum of `d(e, x)`, `d(e, y)` and the last integer
/// time at which the arclength-parametrized combing lines from `e` stay
/// within `D1`.
pub fn gromov_product<C: Combing + ?Sized>(
    combing: &C,
    consts: &GromovConstants,
    e: Vertex,
    x: Vertex,
    y: Vertex,
) -> Result<Length> {
    let s = combing.space();
    for v in [e, x, y] {
        s.check_vertex(v)?;
    }
    Ok(gromov_product_unchecked(combing, consts, e, x, y))
}

pub(crate) fn gromov_product_unchecked<C: Combing + ?Sized>(
    combing: &C,
    consts: &GromovConstants,
    e: Vertex,
    x: Vertex,
    y: Vertex,
) -> Length {
    let s = combing.space();
    let (px, py) = (combing.path(e, x), combing.path(e, y));
    let (lx, ly) = (px.length_ticks(), py.length_ticks());
    let m = s.ticks_to_length(lx.min(ly));
    let scale = s.scale() as u64;
    let t_max = lx.max(ly).div_ceil(scale);
    match last_close(s, &px, &py, &consts.d1, t_max) {
        None => m,
        Some(t) => m.min(length::int(t as i64)),
    }
}

/// `P[x][y] = (x | y)_e` for every pair.
pub fn product_matrix<C: Combing>(combing: &C, consts: &GromovConstants, e: Vertex, mode: Mode) -> Vec<Vec<Length>> {
    let n = combing.space().len();
    let rows = par::map(mode, n, |x| {
        (0..n)
            .map(|y| {
                if y < x {
                    length::int(0)
                } else {
                    gromov_product_unchecked(combing, consts, e, Vertex::from(x), Vertex::from(y))
                }
            })
            .collect::<Vec<_>>()
    });
    let mut rows = rows;
    for (x, y) in (0..n).flat_map(|x| (0..x).map(move |y| (x, y))) {
        rows[x][y] = rows[y][x];
    }
    rows
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UltrametricViolation {
    pub x: Vertex,
    pub y: Vertex,
    pub z: Vertex,
    pub xz: Length,
    pub xy: Length,
    pub yz: Length,
    pub bound: Length,
}

impl fmt::Display for UltrametricViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "x={} y={} z={} (x|z)={} (x|y)={} (y|z)={} bound={}",
            self.x.0,
            self.y.0,
            self.z.0,
            length::fmt(&self.xz),
            length::fmt(&self.xy),
            length::fmt(&self.yz),
            length::fmt(&self.bound)
        )
    }
}

/// `(x | z)_e + slack >= min((x | y)_e, (y | z)_e) / D2` on every sampled
/// triple.
pub fn check_quasi_ultrametric<C: Combing>(
    combing: &C,
    consts: &GromovConstants,
    triples: Sample,
    e: Vertex,
    slack: Length,
    mode: Mode,
) -> Result<Report<UltrametricViolation>> {
    let s = combing.space();
    s.check_vertex(e)?;
    let list = triples.tuples::<3>(s.len())?;
    let p = product_matrix(combing, consts, e, mode);
    let violations = par::flat_map(mode, list.len(), |i| {
        let [x, y, z] = list[i].map(|v| v as usize);
        let bound = p[x][y].min(p[y][z]) / consts.d2;
        if p[x][z] + slack < bound {
            vec![UltrametricViolation {
                x: Vertex::from(x),
                y: Vertex::from(y),
                z: Vertex::from(z),
                xz: p[x][z],
                xy: p[x][y],
                yz: p[y][z],
                bound,
            }]
        } else {
            vec![]
        }
    });
    Ok(Report { checked: list.len(), violations })
}

/// `min(d(e, x), d(e, y)) / (2 E d(x, y))`.
pub fn gprod_lower_bound(space: &Space, consts: &GromovConstants, e: Vertex, x: Vertex, y: Vertex) -> Result<Length> {
    if x == y {
        return Err(Error::DivisionByZero(format!("x = y = {}", space.id(x))));
    }
    let m = space.distance(e, x)?.min(space.distance(e, y)?);
    Ok(m / (length::int(2) * consts.e * space.distance(x, y)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerBoundViolation {
    pub e: Vertex,
    pub x: Vertex,
    pub y: Vertex,
    pub product: Length,
    pub bound: Length,
}

impl fmt::Display for LowerBoundViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "e={} x={} y={} product={} bound={}",
            self.e.0,
            self.x.0,
            self.y.0,
            length::fmt(&self.product),
            length::fmt(&self.bound)
        )
    }
}

/// `(x | y)_e + slack >= min(d(e, x), d(e, y)) / (2 E d(x, y))` for every
/// sampled pair with `x != y`. Pairs with `x = y` are skipped.
pub fn check_gprod_lower_bound<C: Combing>(
    combing: &C,
    consts: &GromovConstants,
    pairs: Sample,
    e: Vertex,
    slack: Length,
    mode: Mode,
) -> Result<Report<LowerBoundViolation>> {
    let s = combing.space();
    s.check_vertex(e)?;
    let list: Vec<[u32; 2]> = pairs.tuples::<2>(s.len())?.into_iter().filter(|[x, y]| x != y).collect();
    if list.is_empty() {
        return Err(Error::EmptySample);
    }
    let violations = par::flat_map(mode, list.len(), |i| {
        let [x, y] = list[i].map(Vertex);
        let bound = gprod_lower_bound(s, consts, e, x, y).expect("x != y");
        let product = gromov_product_unchecked(combing, consts, e, x, y);
        if product + slack < bound {
            vec![LowerBoundViolation { e, x, y, product, bound }]
        } else {
            vec![]
        }
    });
    Ok(Report { checked: list.len(), violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::horoball::HoroballGraph;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Length {
        Length::new(n, d)
    }

    fn unit() -> GromovConstants {
        derive_constants(length::int(1), length::int(0), length::int(1), length::int(0)).unwrap()
    }

    #[test]
    fn constants_by_substitution() {
        let c = unit();
        assert_eq!([c.k1, c.d, c.d1, c.d2], [1, 4, 10, 12].map(length::int));
        let c = derive_constants(q(1, 1), q(0, 1), q(3, 1), q(6, 1)).unwrap();
        assert_eq!([c.k1, c.d, c.d1, c.d2], [1, 14, 30, 96].map(length::int));
        let c = derive_constants(q(2, 1), q(1, 1), q(1, 1), q(0, 1)).unwrap();
        assert_eq!([c.k1, c.d, c.d1, c.d2], [3, 12, 26, 32].map(length::int));
        let err = derive_constants(q(1, 2), q(0, 1), q(1, 1), q(0, 1)).unwrap_err();
        assert_eq!(err.code(), "BAD_PARAMS");
    }

    #[test]
    fn reparametrize_clamps() {
        let s = gen::path(4);
        let c = LexCombing(&s);
        let (x, y) = (Vertex(0), Vertex(3));
        assert_eq!(reparametrize(&c, x, y, &q(0, 1)).unwrap(), x);
        assert_eq!(reparametrize(&c, x, y, &q(7, 1)).unwrap(), y);
        assert_eq!(reparametrize(&c, x, y, &q(2, 1)).unwrap(), Vertex(2));
        assert_eq!(reparametrize(&c, x, Vertex(9), &q(2, 1)).unwrap_err().code(), "UNKNOWN_VERTEX");
        assert_eq!(eval(&c, x, y, &q(0, 1)), x);
        assert_eq!(eval(&c, x, y, &q(1, 1)), y);
    }

    /// Direct evaluation of the convexity inequality without the instance
    /// tables: Floyd distances and fresh path lookups for every point.
    fn convexity_oracle(s: &Space, p: ConvexityParams, grid: &[Length], slack: Length) -> usize {
        let n = s.len();
        let mut d = vec![vec![i64::MAX / 4; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0;
        }
        for (u, v, l) in s.edges() {
            let l = *l.numer() / *l.denom();
            d[u.ix()][v.ix()] = l;
            d[v.ix()][u.ix()] = l;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
                }
            }
        }
        let c = LexCombing(s);
        let mut bad = 0;
        for x1 in s.vertices() {
            for x2 in s.vertices() {
                for y1 in s.vertices() {
                    for y2 in s.vertices() {
                        for a in grid {
                            for b in grid {
                                let y1p = eval(&c, x1, y1, a);
                                let y2p = eval(&c, x2, y2, b);
                                for t in grid {
                                    let u = eval(&c, x1, y1, &(t * a));
                                    let v = eval(&c, x2, y2, &(t * b));
                                    let lhs = length::int(d[u.ix()][v.ix()]);
                                    let rhs = (length::int(1) - t) * p.e * length::int(d[x1.ix()][x2.ix()])
                                        + t * p.e * length::int(d[y1p.ix()][y2p.ix()])
                                        + p.c;
                                    if lhs > rhs + slack {
                                        bad += 1;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        bad
    }

    #[test]
    fn tripod_is_convex_up_to_quantization() {
        let s = gen::tripod(1);
        let p = ConvexityParams::new(q(1, 1), q(0, 1)).unwrap();
        let slack = length::int(2) * s.max_edge();
        let r = check_convexity(&LexCombing(&s), p, Sample::All, &quarter_grid(), slack, Mode::Parallel).unwrap();
        assert!(r.is_clean());
        assert_eq!(r.checked, 256 * 125);
        assert_eq!(convexity_oracle(&s, p, &quarter_grid(), slack), 0);
    }

    #[test]
    fn endpoint_parameter_never_violates() {
        let s = gen::cycle(5);
        let p = ConvexityParams::new(q(1, 1), q(0, 1)).unwrap();
        let r = check_convexity(&LexCombing(&s), p, Sample::All, &[q(0, 1)], q(0, 1), Mode::Sequential).unwrap();
        assert!(r.is_clean());
    }

    #[test]
    fn four_cycle_violates_exact_convexity() {
        let s = gen::cycle(4);
        let p = ConvexityParams::new(q(1, 1), q(0, 1)).unwrap();
        let grid = quarter_grid();
        let r = check_convexity(&LexCombing(&s), p, Sample::All, &grid, q(0, 1), Mode::Parallel).unwrap();
        let oracle = convexity_oracle(&s, p, &grid, q(0, 1));
        assert!(oracle > 0);
        assert_eq!(r.violations.len(), oracle);
        let seq = check_convexity(&LexCombing(&s), p, Sample::All, &grid, q(0, 1), Mode::Sequential).unwrap();
        assert_eq!(r, seq);
        assert!(r.to_text("convexity").contains("status: fail"));
    }

    #[test]
    fn fitted_constants() {
        let grid = quarter_grid();
        let es = e_grid(length::int(3));
        assert_eq!(es.len(), 5);
        let edge = gen::path(2);
        let slack = length::int(2) * edge.max_edge();
        let fit = fit_constants(&LexCombing(&edge), Sample::All, &grid, &es, slack, Mode::Parallel).unwrap();
        assert_eq!(fit.best, ConvexityParams::new(q(1, 1), q(0, 1)).unwrap());

        let tripod = gen::tripod(2);
        let fit = fit_constants(&LexCombing(&tripod), Sample::All, &grid, &es, slack, Mode::Parallel).unwrap();
        assert_eq!(fit.best.e, length::int(1));
        assert!(fit.best.c <= length::int(2) * tripod.max_edge());
        // the fit is tight: C is clean, anything smaller is not
        let c = LexCombing(&tripod);
        assert!(check_convexity(&c, fit.best, Sample::All, &grid, slack, Mode::Parallel).unwrap().is_clean());
        for p in fit.curve.iter().filter(|p| p.c > length::int(0)) {
            let under = ConvexityParams { e: p.e, c: p.c - q(1, 8) };
            assert!(!check_convexity(&c, under, Sample::All, &grid, slack, Mode::Parallel).unwrap().is_clean());
        }
    }

    #[test]
    fn horoball_fit_golden() {
        let ab = Space::from_parts(
            "ab",
            vec!["a".into(), "b".into()],
            vec![(Vertex(0), Vertex(1), length::int(4))],
            vec![Vertex(0), Vertex(1)],
            Vertex(0),
        )
        .unwrap();
        let h = HoroballGraph::build(&ab, 4, false).unwrap();
        let c = LexCombing(h.space());
        let slack = length::int(2);
        let fit = fit_constants(&c, Sample::All, &quarter_grid(), &e_grid(length::int(3)), slack, Mode::Parallel).unwrap();
        assert_eq!(fit.best, ConvexityParams { e: length::int(1), c: GOLDEN_HOROBALL_C });
        for p in &fit.curve {
            assert!(check_convexity(&c, *p, Sample::All, &quarter_grid(), slack, Mode::Parallel).unwrap().is_clean());
        }
    }

    const GOLDEN_HOROBALL_C: Length = Length::new_raw(0, 1);

    #[test]
    fn gromov_product_on_a_long_tripod() {
        let s = gen::tripod(20);
        let c = LexCombing(&s);
        let (e, x, y) = (s.vertex("a20").unwrap(), s.vertex("b20").unwrap(), s.vertex("c20").unwrap());
        let g = unit();
        assert_eq!(gromov_product(&c, &g, e, x, y).unwrap(), length::int(25));
        // brute force over integer times
        let (px, py) = (c.path(e, x), c.path(e, y));
        let last = (0..=40u64)
            .filter(|&t| s.dist_ticks(px.at_ticks(t), py.at_ticks(t)) <= 10)
            .max()
            .unwrap();
        assert_eq!(last, 25);
        assert_eq!(gromov_product(&c, &g, e, x, x).unwrap(), length::int(40));
    }

    #[test]
    fn quasi_ultrametric_on_a_random_tree() {
        let s = gen::random_tree(30, 5);
        let r = check_quasi_ultrametric(&LexCombing(&s), &unit(), Sample::All, Vertex(0), q(0, 1), Mode::Parallel).unwrap();
        assert_eq!(r.checked, 27_000);
        assert!(r.is_clean());
    }

    #[test]
    fn quasi_ultrametric_on_a_glued_horoball() {
        let base = gen::random_lattice(6, 8, 2).unwrap();
        let h = HoroballGraph::build(&base, 6, true).unwrap();
        let c = crate::horoball::NormalCombing(&h);
        let fit = fit_constants(
            &c,
            Sample::Random { count: 2000, seed: 9 },
            &quarter_grid(),
            &e_grid(length::int(3)),
            length::int(2) * h.space().max_edge(),
            Mode::Parallel,
        )
        .unwrap();
        let g = GromovConstants::geodesic(fit.best);
        let r = check_quasi_ultrametric(&c, &g, Sample::All, h.space().basepoint(), q(0, 1), Mode::Parallel).unwrap();
        assert!(r.is_clean());
    }

    #[test]
    fn lower_bound_examples() {
        let s = gen::cycle(21);
        let g = unit();
        let (e, x, y) = (Vertex(0), Vertex(10), Vertex(11));
        assert_eq!(gprod_lower_bound(&s, &g, e, x, y).unwrap(), length::int(5));
        let c = LexCombing(&s);
        assert!(gromov_product(&c, &g, e, x, y).unwrap() >= length::int(4));
        assert_eq!(gprod_lower_bound(&s, &g, e, x, x).unwrap_err().code(), "DIVISION_BY_ZERO");
        assert_eq!(gprod_lower_bound(&s, &g, e, e, x).unwrap(), length::int(0));

        let p = gen::path(20);
        for e in p.vertices() {
            let r = check_gprod_lower_bound(&LexCombing(&p), &g, Sample::All, e, length::int(1), Mode::Parallel).unwrap();
            assert!(r.is_clean());
        }
    }

    proptest! {
        #[test]
        fn constants_identities(l in 2i64..40, k in 0i64..40, e in 2i64..40, c in 0i64..80) {
            let (l, k, e, c) = (q(l, 2), q(k, 2), q(e, 2), q(c, 4));
            let g = derive_constants(l, k, e, c).unwrap();
            let two = length::int(2);
            prop_assert_eq!(g.k1, l + k);
            prop_assert_eq!(g.d, two * (length::int(1) + e) * g.k1 + c);
            prop_assert_eq!(g.d1, two * g.d + two);
            prop_assert_eq!(g.d2, e * (g.d1 + two * g.k1));
        }

        #[test]
        fn product_symmetric_and_clamped(n in 2usize..25, seed in 0u64..1000, e in 0usize..25, x in 0usize..25, y in 0usize..25) {
            let s = gen::random_tree(n, seed);
            let (e, x, y) = (Vertex::from(e % n), Vertex::from(x % n), Vertex::from(y % n));
            let c = LexCombing(&s);
            let g = unit();
            let xy = gromov_product(&c, &g, e, x, y).unwrap();
            prop_assert_eq!(xy, gromov_product(&c, &g, e, y, x).unwrap());
            prop_assert!(xy <= s.distance(e, x).unwrap().min(s.distance(e, y).unwrap()));
            prop_assert!(xy >= length::int(0));
        }
    }
}
