use std::fmt::Write as _;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use horocomb::bicombing::{
    self, check_convexity, check_gprod_lower_bound, check_quasi_ultrametric, derive_constants, e_grid,
    fit_constants, quarter_grid, Combing, ConvexityParams, GromovConstants, LexCombing,
};
use horocomb::boundary::{
    continuity_modulus, isolated_centers, partition_tree, retract, zero_dim_certificate, BoundaryApprox,
    PartitionTree,
};
use horocomb::horoball::{min_diameter_triangles, segments, HoroballGraph, NormalCombing};
use horocomb::length::{self, Length};
use horocomb::metric::load_space;
use horocomb::par::Mode;
use horocomb::sample::Sample;
use horocomb::tree::{augment, check_ec_transfer, free_product, load_tree, AugmentedSpace, TreeCombing, TreeOfSpaces};
use horocomb::{emit, Error, Space, Vertex};

#[derive(Parser, Debug)]
#[command(name = "horocomb", version, about = "Horoballs, bicombings, trees of spaces and their boundaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Load and validate a space or tree-of-spaces document.
    Validate,
    /// Build a combinatorial horoball over the lattice of a space.
    Horoball,
    /// Geodesic between two vertices; normal geodesic when --depth-max is set.
    Geodesic,
    /// Minimal-diameter triangle certificate.
    Hyperbolicity,
    /// Coarse convexity check, or a fit when --E and --C are omitted.
    Convexity,
    /// Gromov-product constants and the quasi-ultrametric certificate.
    Gromov,
    /// Assemble a tree of spaces.
    Assemble,
    /// Truncated free product of two pointed spaces.
    Freeproduct,
    /// Replace components by glued horoballs.
    Augment,
    /// Frontier rays, products and threshold partitions.
    Boundary,
    /// Retraction of the boundary onto one component.
    Retract,
    /// Run every certificate that applies to the input.
    Certify,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default)]
enum Format {
    #[default]
    Text,
    Dot,
    Graphml,
    Csv,
    Newick,
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// Input document; repeat for commands taking two spaces.
    #[arg(long, global = true)]
    input: Vec<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t)]
    format: Format,
    #[arg(long = "depth-max", global = true)]
    depth_max: Option<u32>,
    /// Glue the horoball to its base space.
    #[arg(long, global = true)]
    glued: bool,
    #[arg(long, global = true)]
    radius: Option<String>,
    #[arg(long = "n-max", global = true)]
    n_max: Option<u32>,
    #[arg(long = "word-depth", global = true)]
    word_depth: Option<u32>,
    /// Augmentation level; 0 replaces every component.
    #[arg(long, global = true, default_value_t = 0)]
    level: usize,
    #[arg(long, global = true)]
    lambda: Option<String>,
    #[arg(long, global = true)]
    k: Option<String>,
    #[arg(long = "E", global = true)]
    e: Option<String>,
    #[arg(long = "C", global = true)]
    c: Option<String>,
    /// Largest E tried by a convexity fit.
    #[arg(long = "E-max", global = true, default_value = "3")]
    e_max: String,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of sampled tuples; requires --seed.
    #[arg(long, global = true)]
    sample: Option<usize>,
    /// Enumerate every tuple.
    #[arg(long, global = true)]
    all: bool,
    /// Upper bound asserted by the triangle certificate.
    #[arg(long, global = true, default_value = "9")]
    bound: String,
    #[arg(long, global = true)]
    from: Option<String>,
    #[arg(long, global = true)]
    to: Option<String>,
    /// Component name for `retract`; defaults to the basepoint component.
    #[arg(long, global = true)]
    component: Option<String>,
    /// Radius of the bounded cut-point criterion; asks `boundary` for the
    /// isolated-center detectors (default 1 on fully augmented input).
    #[arg(long, global = true)]
    rho: Option<String>,
    /// Run without rayon.
    #[arg(long, global = true)]
    sequential: bool,
}

/// Failure with the exit status it maps to.
enum Failure {
    Input { context: String, err: Error },
    Usage(String),
    Io(String),
}

type Run<T> = std::result::Result<T, Failure>;

struct Outcome {
    body: String,
    pass: bool,
}

fn input_err(context: impl Into<String>) -> impl FnOnce(Error) -> Failure {
    let context = context.into();
    move |err| Failure::Input { context, err }
}

fn flag_err(flag: &str) -> impl FnOnce(Error) -> Failure + '_ {
    move |err| Failure::Input { context: format!("--{flag}"), err }
}

#[allow(clippy::large_enum_variant)]
enum Doc {
    Space(Space),
    Tree(TreeOfSpaces),
}

fn read(path: &FsPath) -> Run<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load(path: &FsPath) -> Run<Doc> {
    let text = read(path)?;
    let ctx = path.display().to_string();
    let is_tree = serde_json::from_str::<serde_json::Value>(&text)
        .ok()
        .is_some_and(|v| v.get("components").is_some());
    if is_tree {
        load_tree(&text).map(Doc::Tree).map_err(input_err(ctx))
    } else {
        load_space(&text).map(Doc::Space).map_err(input_err(ctx))
    }
}

impl Opts {
    fn mode(&self) -> Mode {
        if self.sequential {
            Mode::Sequential
        } else {
            Mode::Parallel
        }
    }

    fn one_input(&self) -> Run<&PathBuf> {
        match self.input.as_slice() {
            [p] => Ok(p),
            _ => Err(Failure::Usage("expected exactly one --input".into())),
        }
    }

    fn space_input(&self) -> Run<Space> {
        let p = self.one_input()?;
        match load(p)? {
            Doc::Space(s) => Ok(s),
            Doc::Tree(_) => Err(Failure::Usage(format!("{}: expected a space document", p.display()))),
        }
    }

    fn tree_input(&self) -> Run<TreeOfSpaces> {
        let p = self.one_input()?;
        match load(p)? {
            Doc::Tree(t) => Ok(t),
            Doc::Space(_) => Err(Failure::Usage(format!("{}: expected a tree-of-spaces document", p.display()))),
        }
    }

    fn sample(&self) -> Run<Sample> {
        match (self.all, self.sample, self.seed) {
            (true, None, _) => Ok(Sample::All),
            (true, Some(_), _) => Err(Failure::Usage("--all and --sample are exclusive".into())),
            (false, Some(count), Some(seed)) => Ok(Sample::Random { count, seed }),
            (false, Some(_), None) => Err(Failure::Usage("--sample requires --seed".into())),
            (false, None, _) => Ok(Sample::All),
        }
    }

    fn length(&self, flag: &'static str, value: &Option<String>) -> Run<Option<Length>> {
        value.as_deref().map(length::parse).transpose().map_err(flag_err(flag))
    }

    fn need_length(&self, flag: &'static str, value: &Option<String>) -> Run<Length> {
        self.length(flag, value)?
            .ok_or_else(|| Failure::Usage(format!("--{flag} is required")))
    }

    fn depth(&self) -> Run<u32> {
        self.depth_max.ok_or_else(|| Failure::Usage("--depth-max is required".into()))
    }

    /// Constants from --lambda/--k/--E/--C, defaulting to `(1, 0, 1, 0)`.
    fn consts(&self) -> Run<GromovConstants> {
        let one = length::int(1);
        let zero = length::int(0);
        let lambda = self.length("lambda", &self.lambda)?.unwrap_or(one);
        let k = self.length("k", &self.k)?.unwrap_or(zero);
        let e = self.length("E", &self.e)?.unwrap_or(one);
        let c = self.length("C", &self.c)?.unwrap_or(zero);
        derive_constants(lambda, k, e, c).map_err(flag_err("E"))
    }
}

fn header(cmd: Command, opts: &Opts, sample: Option<Sample>) -> String {
    let mut out = format!("# horocomb {}\n", format!("{cmd:?}").to_lowercase());
    for p in &opts.input {
        writeln!(out, "# input: {}", p.display()).unwrap();
    }
    if let Some(s) = sample {
        writeln!(out, "# sample: {}", s.describe()).unwrap();
        if let Sample::Random { seed, .. } = s {
            writeln!(out, "# seed: {seed}").unwrap();
        }
    }
    out
}

fn space_dot(s: &Space) -> String {
    emit::to_dot(s, |v| emit::space_vertex_attrs(s, v), |u, v| edge_attrs(s, u, v))
}

fn space_graphml(s: &Space) -> String {
    emit::to_graphml(s, |v| emit::space_vertex_attrs(s, v), |u, v| edge_attrs(s, u, v))
}

fn edge_attrs(s: &Space, u: Vertex, v: Vertex) -> emit::Attrs {
    vec![("length", length::fmt(&s.distance(u, v).expect("edge endpoints are vertices")))]
}

fn space_summary(s: &Space) -> String {
    let e = s.basepoint();
    format!(
        "name: {}\nvertices: {}\nedges: {}\nlattice points: {}\nbasepoint: {}\nscale: {}\nmax edge: {}\neccentricity of basepoint: {}\n",
        s.name(),
        s.len(),
        s.edge_count(),
        s.lattice().len(),
        s.id(e),
        s.scale(),
        length::fmt(&s.max_edge()),
        length::fmt(&s.eccentricity(e))
    )
}

fn tree_summary(z: &TreeOfSpaces) -> String {
    let mut out = space_summary(z.space());
    writeln!(out, "components: {}", z.components().len()).unwrap();
    writeln!(out, "interior cuts: {}", z.interior_cuts().len()).unwrap();
    for (k, c) in z.components().iter().enumerate() {
        writeln!(
            out,
            "  {} vertices={} depth={}{}{}",
            c.name,
            c.space.len(),
            z.component_depth(k),
            if c.horoball.is_some() { " horoball" } else { "" },
            if c.frontier { " frontier" } else { "" }
        )
        .unwrap();
    }
    out
}

fn render_space(s: &Space, summary: String, fmt: Format) -> Run<String> {
    match fmt {
        Format::Text => Ok(summary),
        Format::Dot => Ok(space_dot(s)),
        Format::Graphml => Ok(space_graphml(s)),
        other => Err(Failure::Usage(format!("format {other:?} does not apply to this command"))),
    }
}

fn pass(body: String) -> Outcome {
    Outcome { body, pass: true }
}

fn vertex(s: &Space, flag: &'static str, id: &Option<String>) -> Run<Vertex> {
    let id = id.as_deref().ok_or_else(|| Failure::Usage(format!("--{flag} is required")))?;
    s.vertex(id).map_err(flag_err(flag))
}

/// The combing of a space input: normal geodesics in a horoball when
/// `--depth-max` is set, lexicographic geodesics otherwise.
enum Host {
    Plain(Space),
    Horoball(HoroballGraph),
    Tree(TreeOfSpaces),
}

impl Host {
    fn from_opts(opts: &Opts) -> Run<Host> {
        let p = opts.one_input()?;
        match (load(p)?, opts.depth_max) {
            (Doc::Space(s), None) => Ok(Host::Plain(s)),
            (Doc::Space(s), Some(d)) => HoroballGraph::build(&s, d, opts.glued)
                .map(Host::Horoball)
                .map_err(flag_err("depth-max")),
            (Doc::Tree(z), None) => Ok(Host::Tree(z)),
            (Doc::Tree(z), Some(d)) => augment(&z, opts.level, d).map(|a| Host::Tree(a.tree)).map_err(flag_err("depth-max")),
        }
    }

    fn with<T>(&self, f: impl FnOnce(&dyn DynCombing) -> T) -> T {
        match self {
            Host::Plain(s) => f(&LexCombing(s)),
            Host::Horoball(h) => f(&NormalCombing(h)),
            Host::Tree(z) => f(&TreeCombing(z)),
        }
    }

    fn describe(&self) -> &'static str {
        match self {
            Host::Plain(_) => "lexicographic geodesics",
            Host::Horoball(_) => "normal geodesics in the horoball",
            Host::Tree(_) => "tree geodesics",
        }
    }
}

/// Object-safe bridge so one code path serves every combing.
trait DynCombing {
    fn triangles(&self, sample: Sample, mode: Mode) -> horocomb::Result<horocomb::horoball::TriangleReport>;
    fn convexity(&self, p: ConvexityParams, s: Sample, slack: Length, mode: Mode) -> horocomb::Result<bicombing::Report<bicombing::ConvexityViolation>>;
    fn fit(&self, s: Sample, es: &[Length], slack: Length, mode: Mode) -> horocomb::Result<bicombing::ConvexityFit>;
    fn ultrametric(&self, k: &GromovConstants, s: Sample, mode: Mode) -> horocomb::Result<bicombing::Report<bicombing::UltrametricViolation>>;
    fn lower_bound(&self, k: &GromovConstants, s: Sample, mode: Mode) -> horocomb::Result<bicombing::Report<bicombing::LowerBoundViolation>>;
    fn boundary(&self, r: Length, k: GromovConstants, mode: Mode) -> horocomb::Result<BoundaryApprox>;
    fn host(&self) -> &Space;
}

impl<C: Combing> DynCombing for C {
    fn triangles(&self, sample: Sample, mode: Mode) -> horocomb::Result<horocomb::horoball::TriangleReport> {
        min_diameter_triangles(self, sample, mode)
    }
    fn convexity(&self, p: ConvexityParams, s: Sample, slack: Length, mode: Mode) -> horocomb::Result<bicombing::Report<bicombing::ConvexityViolation>> {
        check_convexity(self, p, s, &quarter_grid(), slack, mode)
    }
    fn fit(&self, s: Sample, es: &[Length], slack: Length, mode: Mode) -> horocomb::Result<bicombing::ConvexityFit> {
        fit_constants(self, s, &quarter_grid(), es, slack, mode)
    }
    fn ultrametric(&self, k: &GromovConstants, s: Sample, mode: Mode) -> horocomb::Result<bicombing::Report<bicombing::UltrametricViolation>> {
        check_quasi_ultrametric(self, k, s, self.space().basepoint(), length::int(1), mode)
    }
    fn lower_bound(&self, k: &GromovConstants, s: Sample, mode: Mode) -> horocomb::Result<bicombing::Report<bicombing::LowerBoundViolation>> {
        check_gprod_lower_bound(self, k, s, self.space().basepoint(), length::int(1), mode)
    }
    fn boundary(&self, r: Length, k: GromovConstants, mode: Mode) -> horocomb::Result<BoundaryApprox> {
        BoundaryApprox::new(self, self.space().basepoint(), r, k, mode)
    }
    fn host(&self) -> &Space {
        self.space()
    }
}

fn quantization_slack(s: &Space) -> Length {
    length::int(2) * s.max_edge()
}

fn hyperbolicity(opts: &Opts, host: &Host, sample: Sample) -> Run<(String, bool)> {
    let bound = length::parse(&opts.bound).map_err(flag_err("bound"))?;
    let r = host.with(|c| c.triangles(sample, opts.mode())).map_err(flag_err("sample"))?;
    let ok = r.max_min_diameter <= bound;
    let mut out = String::from("minimal-diameter triangles\n");
    writeln!(out, "combing: {}", host.describe()).unwrap();
    writeln!(out, "triangles: {}", r.triangles).unwrap();
    writeln!(out, "max min-diameter: {}", length::fmt(&r.max_min_diameter)).unwrap();
    writeln!(out, "bound: {}", length::fmt(&bound)).unwrap();
    if let Some(w) = r.witness {
        host.with(|c| {
            let s = c.host();
            writeln!(out, "witness: {} {} {}", s.id(w[0]), s.id(w[1]), s.id(w[2])).unwrap();
        });
    }
    writeln!(out, "status: {}", if ok { "pass" } else { "fail" }).unwrap();
    Ok((out, ok))
}

fn convexity(opts: &Opts, host: &Host, sample: Sample) -> Run<(String, bool, ConvexityParams)> {
    let mode = opts.mode();
    let slack = host.with(|c| quantization_slack(c.host()));
    match (opts.length("E", &opts.e)?, opts.length("C", &opts.c)?) {
        (Some(e), Some(c)) => {
            let p = ConvexityParams::new(e, c).map_err(flag_err("E"))?;
            let r = host.with(|cb| cb.convexity(p, sample, slack, mode)).map_err(flag_err("sample"))?;
            let title = format!("coarse convexity at {p} (slack {})", length::fmt(&slack));
            Ok((r.to_text(&title), r.is_clean(), p))
        }
        (None, None) => {
            let emax = length::parse(&opts.e_max).map_err(flag_err("E-max"))?;
            let es = e_grid(emax);
            let fit = host.with(|c| c.fit(sample, &es, slack, mode)).map_err(flag_err("sample"))?;
            let mut out = format!("convexity fit (slack {})\n", length::fmt(&slack));
            for p in &fit.curve {
                writeln!(out, "  {p}").unwrap();
            }
            writeln!(out, "best: {}\nstatus: pass", fit.best).unwrap();
            Ok((out, true, fit.best))
        }
        _ => Err(Failure::Usage("--E and --C go together".into())),
    }
}

fn gromov(opts: &Opts, host: &Host, sample: Sample, consts: GromovConstants) -> Run<(String, bool)> {
    let mode = opts.mode();
    let mut out = format!("constants: {consts}\n");
    let u = host.with(|c| c.ultrametric(&consts, sample, mode)).map_err(flag_err("sample"))?;
    out.push_str(&u.to_text("quasi-ultrametric (slack 1)"));
    let l = host.with(|c| c.lower_bound(&consts, sample, mode)).map_err(flag_err("sample"))?;
    out.push_str(&l.to_text("product lower bound (slack 1)"));
    Ok((out, u.is_clean() && l.is_clean()))
}

fn tree_text(t: &PartitionTree, fmt: Format) -> String {
    match fmt {
        Format::Newick => t.to_newick() + "\n",
        _ => t.to_text(),
    }
}

fn boundary_cmd(opts: &Opts, sample_header: String) -> Run<Outcome> {
    let p = opts.one_input()?;
    let doc = load(p)?;
    let mode = opts.mode();
    let consts = opts.consts()?;
    let margin = consts.d1 + length::int(5);
    let (b, aug): (BoundaryApprox, Option<AugmentedSpace>) = match (doc, opts.depth_max) {
        (Doc::Tree(z), Some(d)) => {
            let a = augment(&z, opts.level, d).map_err(flag_err("depth-max"))?;
            let r = radius_or_default(opts, a.tree.space())?;
            (BoundaryApprox::augmented(&a, r, consts, mode).map_err(flag_err("radius"))?, Some(a))
        }
        (Doc::Tree(z), None) => {
            let r = radius_or_default(opts, z.space())?;
            (TreeCombing(&z).boundary(r, consts, mode).map_err(flag_err("radius"))?, None)
        }
        (Doc::Space(s), None) => {
            let r = radius_or_default(opts, &s)?;
            (LexCombing(&s).boundary(r, consts, mode).map_err(flag_err("radius"))?, None)
        }
        (Doc::Space(s), Some(d)) => {
            let h = HoroballGraph::build(&s, d, opts.glued).map_err(flag_err("depth-max"))?;
            let r = radius_or_default(opts, h.space())?;
            (NormalCombing(&h).boundary(r, consts, mode).map_err(flag_err("radius"))?, None)
        }
    };
    if opts.format == Format::Csv {
        return Ok(pass(b.to_csv()));
    }
    let n_max = opts.n_max.unwrap_or_else(|| length::floor_u32(&b.radius));
    let t = partition_tree(&b, n_max).map_err(flag_err("n-max"))?;
    if opts.format == Format::Newick {
        return Ok(pass(tree_text(&t, Format::Newick)));
    }
    let cert = zero_dim_certificate(&t, Some(b.radius - margin));
    let mut out = sample_header;
    writeln!(out, "constants: {consts}").unwrap();
    writeln!(out, "radius: {}\nrays: {}\nmargin: {}", length::fmt(&b.radius), b.len(), length::fmt(&margin)).unwrap();
    out.push_str(&t.to_text());
    out.push_str(&cert.to_text());
    let mut ok = cert.order_one;
    let detect = opts.rho.is_some() || aug.as_ref().is_some_and(|a| a.level == 0);
    if detect {
        let rho = opts.length("rho", &opts.rho)?.unwrap_or(length::int(1));
        let Some(a) = aug.as_ref() else {
            return Err(Failure::Usage("--rho needs an augmented tree (--depth-max)".into()));
        };
        let rep = isolated_centers(a, &b, &t, n_max, rho, margin).map_err(flag_err("level"))?;
        out.push_str(&rep.to_text(&a.tree));
        ok &= rep.agree() || !rep.within_safe_region;
    }
    writeln!(out, "status: {}", if ok { "pass" } else { "fail" }).unwrap();
    Ok(Outcome { body: out, pass: ok })
}

fn radius_or_default(opts: &Opts, s: &Space) -> Run<Length> {
    Ok(opts.length("radius", &opts.radius)?.unwrap_or_else(|| s.eccentricity(s.basepoint())))
}

fn retract_cmd(opts: &Opts, head: String) -> Run<Outcome> {
    let z = opts.tree_input()?;
    let consts = opts.consts()?;
    let mode = opts.mode();
    let k = match &opts.component {
        Some(name) => z
            .component_index(name)
            .ok_or(Failure::Input { context: "--component".into(), err: Error::UnknownVertex(name.clone()) })?,
        None => z.basepoint().0,
    };
    let r = opts.need_length("radius", &opts.radius)?;
    let s = z.space();
    let b = TreeCombing(&z).boundary(r, consts, mode).map_err(flag_err("radius"))?;
    let comp = &z.component(k).space;
    let lc = LexCombing(comp);
    let bk = BoundaryApprox::new(&lc, z.entry(k), r, consts, mode).map_err(flag_err("radius"))?;
    let level = opts.n_max.unwrap_or_else(|| length::floor_u32(&r));
    let tk = partition_tree(&bk, level).map_err(flag_err("n-max"))?;
    let mut out = head;
    writeln!(out, "component: {}\nradius: {}\nlevel: {level}", z.component(k).name, length::fmt(&r)).unwrap();
    let mut images = Vec::with_capacity(b.len());
    let mut ok = true;
    for ray in &b.rays {
        let ret = retract(&z, k, ray, &lc, &bk, &tk, level).map_err(input_err(s.id(ray.target).to_string()))?;
        let inside = z.path_in(k, &ray.path);
        if inside {
            let own = bk.rays.iter().position(|q| z.embed(k, q.target) == ray.target);
            ok &= own.is_some_and(|o| tk.levels[level as usize][ret.block].contains(&o));
        }
        writeln!(
            out,
            "  {} exit={} -> {} block={}{}",
            s.id(ray.target),
            s.id(ret.exit),
            bk.names[ret.ray],
            ret.block,
            if inside { " inside" } else { "" }
        )
        .unwrap();
        images.push(ret.ray);
    }
    let m = continuity_modulus(&b, &images, &bk, level);
    for (n, f) in &m.levels {
        writeln!(out, "modulus n={n} f={}", f.map_or("-".to_string(), |f| length::fmt(&f))).unwrap();
    }
    writeln!(out, "modulus constant: {}", m.constant.map_or("none".to_string(), |c| length::fmt(&c))).unwrap();
    writeln!(out, "monotone: {}", m.monotone).unwrap();
    ok &= m.monotone;
    writeln!(out, "status: {}", if ok { "pass" } else { "fail" }).unwrap();
    Ok(Outcome { body: out, pass: ok })
}

fn certify(opts: &Opts, sample: Sample, head: String) -> Run<Outcome> {
    let p = opts.one_input()?;
    let mut out = head;
    let mut ok = true;
    let mut section = |title: &str, body: String, pass: bool| {
        writeln!(out, "== {title}: {}", if pass { "pass" } else { "fail" }).unwrap();
        out.push_str(&body);
        ok &= pass;
    };
    match load(p)? {
        Doc::Space(s) => {
            let depth = opts.depth_max.unwrap_or(0);
            let host = Host::Plain(s.clone());
            let (body, pass, params) = convexity(opts, &host, sample)?;
            section("convexity", body, pass);
            let consts = GromovConstants::geodesic(params);
            let (body, pass) = gromov(opts, &host, sample, consts)?;
            section("gromov", body, pass);
            let probe = HoroballGraph::build(&s, 1, false).map_err(input_err(p.display().to_string()))?;
            let depth = depth.max(probe.sufficient_depth());
            let h = HoroballGraph::build(&s, depth, false).map_err(flag_err("depth-max"))?;
            let (body, pass) = hyperbolicity(opts, &Host::Horoball(h), sample)?;
            section(&format!("horoball triangles (depth {depth})"), body, pass);
        }
        Doc::Tree(z) => {
            let r = check_ec_transfer(&z, sample, sample, &quarter_grid(), &e_grid(length::int(3)), opts.mode())
                .map_err(flag_err("sample"))?;
            let body = format!(
                "components: {}\nassembled: {}\n{}",
                r.component_bound,
                r.assembled,
                r.report.to_text("assembled convexity")
            );
            section("convexity transfer", body, r.report.is_clean());
            let consts = GromovConstants::geodesic(r.component_bound);
            let host = Host::Tree(z);
            let (body, pass) = gromov(opts, &host, sample, consts)?;
            section("gromov", body, pass);
        }
    }
    writeln!(out, "status: {}", if ok { "pass" } else { "fail" }).unwrap();
    Ok(Outcome { body: out, pass: ok })
}

fn run(cli: &Cli) -> Run<Outcome> {
    let opts = &cli.opts;
    let cmd = cli.command;
    match cmd {
        Command::Validate => {
            let p = opts.one_input()?;
            let body = match load(p)? {
                Doc::Space(s) => space_summary(&s),
                Doc::Tree(z) => tree_summary(&z),
            };
            Ok(pass(header(cmd, opts, None) + &body + "status: pass\n"))
        }
        Command::Horoball => {
            let s = opts.space_input()?;
            let h = HoroballGraph::build(&s, opts.depth()?, opts.glued).map_err(flag_err("depth-max"))?;
            let body = match opts.format {
                Format::Dot => h.to_dot(),
                Format::Graphml => h.to_graphml(),
                Format::Text => {
                    let mut t = header(cmd, opts, None) + &space_summary(h.space());
                    writeln!(t, "depth: {}\nglued: {}\nsufficient depth: {}", h.depth_max(), h.glued(), h.sufficient_depth()).unwrap();
                    t
                }
                other => return Err(Failure::Usage(format!("format {other:?} does not apply to this command"))),
            };
            Ok(pass(body))
        }
        Command::Geodesic => {
            let host = Host::from_opts(opts)?;
            let mut out = header(cmd, opts, None);
            match &host {
                Host::Horoball(h) => {
                    let s = h.space();
                    let (x, y) = (vertex(s, "from", &opts.from)?, vertex(s, "to", &opts.to)?);
                    let g = h.normal_geodesic(x, y).map_err(flag_err("from"))?;
                    let p = g.path();
                    writeln!(out, "path: {}\nlength: {}\napex: {}\nthrough base: {}", p.ids(s).join(" "), length::fmt(&p.length()), g.apex, g.through_base).unwrap();
                    for seg in segments(h, &p) {
                        writeln!(out, "  {} x{} depth {} -> {}", seg.kind.as_str(), seg.edges, seg.from_depth, seg.to_depth).unwrap();
                    }
                }
                Host::Plain(s) => {
                    let (x, y) = (vertex(s, "from", &opts.from)?, vertex(s, "to", &opts.to)?);
                    let p = s.geodesic(x, y).map_err(flag_err("from"))?;
                    writeln!(out, "path: {}\nlength: {}", p.ids(s).join(" "), length::fmt(&p.length())).unwrap();
                }
                Host::Tree(z) => {
                    let s = z.space();
                    let (x, y) = (vertex(s, "from", &opts.from)?, vertex(s, "to", &opts.to)?);
                    let p = z.tree_geodesic(x, y).map_err(flag_err("from"))?;
                    writeln!(out, "path: {}\nlength: {}", p.ids(s).join(" "), length::fmt(&p.length())).unwrap();
                }
            }
            Ok(pass(out))
        }
        Command::Hyperbolicity => {
            let sample = opts.sample()?;
            let host = Host::from_opts(opts)?;
            let (body, ok) = hyperbolicity(opts, &host, sample)?;
            Ok(Outcome { body: header(cmd, opts, Some(sample)) + &body, pass: ok })
        }
        Command::Convexity => {
            let sample = opts.sample()?;
            let host = Host::from_opts(opts)?;
            let (body, ok, _) = convexity(opts, &host, sample)?;
            Ok(Outcome { body: header(cmd, opts, Some(sample)) + &body, pass: ok })
        }
        Command::Gromov => {
            let sample = opts.sample()?;
            let host = Host::from_opts(opts)?;
            let consts = opts.consts()?;
            if opts.format == Format::Csv {
                let (s, m) = match &host {
                    Host::Plain(s) => (s, bicombing::product_matrix(&LexCombing(s), &consts, s.basepoint(), opts.mode())),
                    Host::Horoball(h) => (h.space(), bicombing::product_matrix(&NormalCombing(h), &consts, h.space().basepoint(), opts.mode())),
                    Host::Tree(z) => (z.space(), bicombing::product_matrix(&TreeCombing(z), &consts, z.space().basepoint(), opts.mode())),
                };
                return Ok(pass(matrix_csv(s, &m)));
            }
            let (body, ok) = gromov(opts, &host, sample, consts)?;
            Ok(Outcome { body: header(cmd, opts, Some(sample)) + &body, pass: ok })
        }
        Command::Assemble => {
            let z = opts.tree_input()?;
            render_space(z.space(), header(cmd, opts, None) + &tree_summary(&z), opts.format).map(pass)
        }
        Command::Freeproduct => {
            let [a, b] = opts.input.as_slice() else {
                return Err(Failure::Usage("freeproduct takes two --input spaces".into()));
            };
            let space = |p: &PathBuf| match load(p)? {
                Doc::Space(s) => Ok(s),
                Doc::Tree(_) => Err(Failure::Usage(format!("{}: expected a space document", p.display()))),
            };
            let (x, y) = (space(a)?, space(b)?);
            let wd = opts.word_depth.ok_or_else(|| Failure::Usage("--word-depth is required".into()))?;
            let radius = opts.length("radius", &opts.radius)?;
            let z = free_product(&x, &y, wd, radius).map_err(flag_err("word-depth"))?;
            render_space(z.space(), header(cmd, opts, None) + &tree_summary(&z), opts.format).map(pass)
        }
        Command::Augment => {
            let z = opts.tree_input()?;
            let a = augment(&z, opts.level, opts.depth()?).map_err(flag_err("level"))?;
            let mut body = header(cmd, opts, None) + &tree_summary(&a.tree);
            writeln!(body, "level: {}\nreplaced: {}", a.level, a.replaced.len()).unwrap();
            render_space(a.tree.space(), body, opts.format).map(pass)
        }
        Command::Boundary => boundary_cmd(opts, header(cmd, opts, None)),
        Command::Retract => retract_cmd(opts, header(cmd, opts, None)),
        Command::Certify => {
            if !opts.all && opts.sample.is_none() {
                return Err(Failure::Usage("certify needs --all or --sample with --seed".into()));
            }
            let sample = opts.sample()?;
            certify(opts, sample, header(cmd, opts, Some(sample)))
        }
    }
}

fn matrix_csv(s: &Space, m: &[Vec<Length>]) -> String {
    let mut out = String::from("vertex");
    for v in s.vertices() {
        write!(out, ",{}", s.id(v)).unwrap();
    }
    out.push('\n');
    for (v, row) in s.vertices().zip(m) {
        out.push_str(s.id(v));
        for x in row {
            write!(out, ",{}", length::fmt(x)).unwrap();
        }
        out.push('\n');
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli).and_then(|o| {
        match &cli.opts.output {
            Some(path) => std::fs::write(path, &o.body).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
            None => print!("{}", o.body),
        }
        Ok(o)
    });
    match outcome {
        Ok(o) if o.pass => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(2),
        Err(Failure::Input { context, err }) => {
            eprintln!("error[{}]: {context}: {err}", err.code());
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error[USAGE]: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error[IO]: {msg}");
            ExitCode::from(1)
        }
    }
}
